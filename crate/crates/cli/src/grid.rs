//! Sweep grids: `--lambda 1,10,100` or `--lambda 1:1000:50:log`.

use std::fmt;
use std::str::FromStr;

#[derive(Clone, Debug, PartialEq)]
pub struct Grid(Vec<f64>);

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Spacing {
    Lin,
    Log,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GridError(String);

impl fmt::Display for GridError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for GridError {}

fn err<T>(msg: impl Into<String>) -> Result<T, GridError> {
    Err(GridError(msg.into()))
}

fn number(s: &str) -> Result<f64, GridError> {
    s.trim().parse::<f64>().or_else(|_| err(format!("'{s}' is not a number")))
}

impl Grid {
    pub fn new(values: Vec<f64>) -> Result<Self, GridError> {
        if values.is_empty() {
            return err("grid is empty");
        }
        if let Some(v) = values.iter().find(|v| !v.is_finite()) {
            return err(format!("grid value {v} is not finite"));
        }
        if values.windows(2).any(|w| w[1] <= w[0]) {
            return err(format!("grid must be strictly increasing, got {values:?}"));
        }
        Ok(Self(values))
    }

    pub fn range(min: f64, max: f64, points: usize, spacing: Spacing) -> Result<Self, GridError> {
        if points == 0 {
            return err("a range needs at least one point");
        }
        if points == 1 {
            return if min == max { Self::new(vec![min]) } else { err("a one-point range needs min == max") };
        }
        if !(max > min) {
            return err(format!("range needs min < max, got {min}:{max}"));
        }
        let step = (points - 1) as f64;
        let values = match spacing {
            Spacing::Lin => (0..points).map(|i| min + (max - min) * i as f64 / step).collect(),
            Spacing::Log => {
                if min <= 0.0 {
                    return err("log spacing needs min > 0");
                }
                let (a, b) = (min.ln(), max.ln());
                (0..points)
                    .map(|i| if i + 1 == points { max } else { (a + (b - a) * i as f64 / step).exp() })
                    .collect()
            }
        };
        Self::new(values)
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }
}

impl FromStr for Grid {
    type Err = GridError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        if s.is_empty() {
            return err("grid is empty");
        }
        if !s.contains(':') {
            return Self::new(s.split(',').map(number).collect::<Result<_, _>>()?);
        }
        let parts: Vec<&str> = s.split(':').collect();
        if !(3..=4).contains(&parts.len()) {
            return err(format!("range must be min:max:points[:lin|log], got '{s}'"));
        }
        let points = parts[2].trim().parse::<usize>().or_else(|_| err(format!("'{}' is not a point count", parts[2])))?;
        let spacing = match parts.get(3).map(|p| p.trim().to_ascii_lowercase()) {
            None => Spacing::Lin,
            Some(p) if p == "lin" => Spacing::Lin,
            Some(p) if p == "log" => Spacing::Log,
            Some(p) => return err(format!("spacing must be lin or log, got '{p}'")),
        };
        Self::range(number(parts[0])?, number(parts[1])?, points, spacing)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_lists() {
        assert_eq!("0.01, 1e4".parse::<Grid>().unwrap().values(), &[0.01, 1e4]);
        assert!("3,2".parse::<Grid>().is_err());
        assert!("1,1".parse::<Grid>().is_err());
        assert!("".parse::<Grid>().is_err());
        assert!("1,x".parse::<Grid>().is_err());
    }

    #[test]
    fn parses_ranges() {
        let g: Grid = "1:1000:50:log".parse().unwrap();
        assert_eq!(g.values().len(), 50);
        assert_eq!(g.values()[0], 1.0);
        assert_eq!(g.values()[49], 1000.0);
        assert!((g.values()[1] / g.values()[0] - 1000f64.powf(1.0 / 49.0)).abs() < 1e-12);
        let lin: Grid = "0:1:5".parse().unwrap();
        assert_eq!(lin.values(), &[0.0, 0.25, 0.5, 0.75, 1.0]);
        assert!("0:1:5:log".parse::<Grid>().is_err());
        assert!("1:0:5".parse::<Grid>().is_err());
        assert!("1:2:0".parse::<Grid>().is_err());
        assert!("1:2:3:cubic".parse::<Grid>().is_err());
        assert_eq!("5:5:1".parse::<Grid>().unwrap().values(), &[5.0]);
    }
}
