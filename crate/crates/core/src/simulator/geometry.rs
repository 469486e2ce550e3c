//! PPP deployment inside a circular window and Voronoi-uniform UE placement.

use std::f64::consts::PI;

use rand::Rng;
use rand_distr::{Distribution, Poisson};
use serde::{Deserialize, Serialize};

use super::rng::{stream_rng, Stream};
use super::{SimConfig, TypicalBs};
use crate::{per_km2_to_per_m2, Error, Result};

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const ORIGIN: Point = Point { x: 0.0, y: 0.0 };

    pub fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    #[inline]
    pub fn dist(self, other: Point) -> f64 {
        self.dist2(other).sqrt()
    }

    #[inline]
    fn dist2(self, other: Point) -> f64 {
        let (dx, dy) = (self.x - other.x, self.y - other.y);
        dx * dx + dy * dy
    }

    pub fn norm(self) -> f64 {
        (self.x * self.x + self.y * self.y).sqrt()
    }
}

/// One sampled deployment.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NetworkRealization {
    pub window_radius_m: f64,
    pub bs_positions: Vec<Point>,
    /// Index of the typical (measured) BS.
    pub typical: usize,
    /// `ue_positions[l]` holds the UEs of BS `l`; empty until [`drop_ues`].
    pub ue_positions: Vec<Vec<Point>>,
    /// Area of each BS's clipped Voronoi cell (m²); filled by [`drop_ues`].
    pub cell_areas: Vec<f64>,
    /// `pilot_share[l][i] = Some(t)` when UE `i` of BS `l` reuses the pilot of
    /// typical-cell UE `t`. Empty until pilots are assigned.
    pub pilot_share: Vec<Vec<Option<usize>>>,
    /// How many Poisson counts were redrawn because fewer than two BSs came up.
    pub count_redraws: u32,
}

impl NetworkRealization {
    /// Builds a realization from explicit positions (no UEs yet).
    pub fn from_positions(window_radius_m: f64, bs_positions: Vec<Point>, typical: usize) -> Result<Self> {
        if typical >= bs_positions.len() {
            return Err(Error::Config(format!("typical index {typical} out of {} BSs", bs_positions.len())));
        }
        let n = bs_positions.len();
        Ok(Self {
            window_radius_m,
            bs_positions,
            typical,
            ue_positions: vec![Vec::new(); n],
            cell_areas: Vec::new(),
            pilot_share: Vec::new(),
            count_redraws: 0,
        })
    }

    pub fn num_bs(&self) -> usize {
        self.bs_positions.len()
    }

    /// Serving BS of a point under nearest-BS association.
    pub fn nearest_bs(&self, p: Point) -> usize {
        let mut best = (0, f64::INFINITY);
        for (i, b) in self.bs_positions.iter().enumerate() {
            let d = p.dist2(*b);
            if d < best.1 {
                best = (i, d);
            }
        }
        best.0
    }
}

/// Samples a PPP of intensity `lambda` (BS/km²) in the configured disc.
///
/// With [`TypicalBs::Palm`] a BS is added at the window center on top of the
/// Poisson points; otherwise the typical BS is the one nearest the center.
/// A draw with fewer than two BSs in total is redrawn and counted.
pub fn generate_network(lambda: f64, config: &SimConfig, trial: u64) -> Result<NetworkRealization> {
    if !(lambda > 0.0 && lambda.is_finite()) {
        return Err(Error::InvalidParams(format!("lambda must be positive and finite, got {lambda}")));
    }
    let w = config.window_radius_m;
    let expected = per_km2_to_per_m2(lambda) * PI * w * w;
    let extra = usize::from(config.typical_bs == TypicalBs::Palm);
    if expected + (extra as f64) < 2.0 {
        return Err(Error::Config(format!(
            "window of radius {w} m holds {expected:.3} BSs on average at lambda = {lambda}; need at least 2"
        )));
    }
    let poisson = Poisson::new(expected).map_err(|e| Error::Config(e.to_string()))?;
    let mut rng = stream_rng(config.master_seed, trial, Stream::Deployment);

    let mut redraws = 0u32;
    let count = loop {
        let n = poisson.sample(&mut rng) as usize;
        if n + extra >= 2 {
            break n;
        }
        redraws += 1;
    };

    let mut bs = Vec::with_capacity(count + extra);
    if extra == 1 {
        bs.push(Point::ORIGIN);
    }
    for _ in 0..count {
        let r = w * rng.random::<f64>().sqrt();
        let theta = 2.0 * PI * rng.random::<f64>();
        bs.push(Point::new(r * theta.cos(), r * theta.sin()));
    }
    let typical = match config.typical_bs {
        TypicalBs::Palm => 0,
        TypicalBs::NearestToCenter => {
            let mut best = (0, f64::INFINITY);
            for (i, b) in bs.iter().enumerate() {
                let d = b.norm();
                if d < best.1 {
                    best = (i, d);
                }
            }
            best.0
        }
    };
    let mut net = NetworkRealization::from_positions(w, bs, typical)?;
    net.count_redraws = redraws;
    Ok(net)
}

/// Places `k` UEs uniformly in the Voronoi cell of every BS, cells clipped to
/// a regular polygon circumscribing the window. Deterministic in
/// `(master_seed, trial)`.
pub fn drop_ues(net: &mut NetworkRealization, k: usize, config: &SimConfig, trial: u64) -> Result<()> {
    if net.num_bs() < 2 {
        return Err(Error::Config(format!("need at least 2 BSs to drop UEs, got {}", net.num_bs())));
    }
    let mut rng = stream_rng(config.master_seed, trial, Stream::Users);
    let cells = CellBuilder::new(&net.bs_positions, net.window_radius_m);
    let mut scratch = Scratch::default();
    net.cell_areas.clear();
    for l in 0..net.num_bs() {
        cells.cell(&net.bs_positions, l, &mut scratch);
        let cell = &scratch.poly;
        net.cell_areas.push(polygon_area(cell));
        let ues = &mut net.ue_positions[l];
        ues.clear();
        ues.extend((0..k).map(|_| sample_in_fan(net.bs_positions[l], cell, &mut scratch.areas, &mut rng)));
    }
    Ok(())
}

/// Voronoi cell of BS `l` clipped to [`window_polygon`], as a
/// counter-clockwise convex polygon.
pub fn voronoi_cell(net: &NetworkRealization, l: usize) -> Vec<Point> {
    let cells = CellBuilder::new(&net.bs_positions, net.window_radius_m);
    let mut scratch = Scratch::default();
    cells.cell(&net.bs_positions, l, &mut scratch);
    scratch.poly
}

/// Sides of the polygon that bounds the outermost cells.
pub const WINDOW_POLYGON_SIDES: usize = 32;

/// Regular polygon whose inscribed circle is the window disc.
pub fn window_polygon(window_radius: f64) -> Vec<Point> {
    let n = WINDOW_POLYGON_SIDES;
    let rc = window_radius / (PI / n as f64).cos();
    (0..n)
        .map(|i| {
            let t = 2.0 * PI * (i as f64 + 0.5) / n as f64;
            Point::new(rc * t.cos(), rc * t.sin())
        })
        .collect()
}

pub fn polygon_area(poly: &[Point]) -> f64 {
    let n = poly.len();
    let mut twice = 0.0;
    for i in 0..n {
        let (a, b) = (poly[i], poly[(i + 1) % n]);
        twice += a.x * b.y - b.x * a.y;
    }
    0.5 * twice.abs()
}

#[derive(Default)]
struct Scratch {
    poly: Vec<Point>,
    tmp: Vec<Point>,
    sides: Vec<f64>,
    areas: Vec<f64>,
}

/// Voronoi neighbors from the Delaunay triangulation, in CSR form.
struct CellBuilder {
    half: f64,
    radius: f64,
    bound: Vec<Point>,
    offsets: Vec<usize>,
    neighbors: Vec<usize>,
}

impl CellBuilder {
    fn new(bs: &[Point], window_radius: f64) -> Self {
        let half = window_radius.max(bs.iter().fold(0.0f64, |m, p| m.max(p.x.abs()).max(p.y.abs()))) * 1.01;
        let n = bs.len();
        let pts: Vec<delaunator::Point> = bs.iter().map(|p| delaunator::Point { x: p.x, y: p.y }).collect();
        let tri = delaunator::triangulate(&pts);

        let mut edges: Vec<(usize, usize)> = Vec::with_capacity(tri.halfedges.len());
        for (e, &twin) in tri.halfedges.iter().enumerate() {
            if twin == delaunator::EMPTY || e < twin {
                let a = tri.triangles[e];
                let b = tri.triangles[delaunator::next_halfedge(e)];
                edges.push((a, b));
            }
        }
        if tri.triangles.is_empty() {
            // Fewer than three points, or all collinear: every pair is adjacent.
            for a in 0..n {
                for b in a + 1..n {
                    edges.push((a, b));
                }
            }
        }
        let mut offsets = vec![0usize; n + 1];
        for &(a, b) in &edges {
            offsets[a + 1] += 1;
            offsets[b + 1] += 1;
        }
        for i in 0..n {
            offsets[i + 1] += offsets[i];
        }
        let mut fill = offsets.clone();
        let mut neighbors = vec![0usize; offsets[n]];
        for &(a, b) in &edges {
            neighbors[fill[a]] = b;
            fill[a] += 1;
            neighbors[fill[b]] = a;
            fill[b] += 1;
        }
        Self { half, radius: window_radius, bound: window_polygon(window_radius), offsets, neighbors }
    }

    /// Clips a bounding square by the bisector with every Delaunay neighbor,
    /// then by the window polygon if the cell still reaches past it.
    fn cell(&self, bs: &[Point], l: usize, s: &mut Scratch) {
        let h = self.half;
        let c = bs[l];
        s.poly.clear();
        s.poly.extend([Point::new(-h, -h), Point::new(h, -h), Point::new(h, h), Point::new(-h, h)]);
        for &m in &self.neighbors[self.offsets[l]..self.offsets[l + 1]] {
            let o = bs[m];
            let normal = Point::new(o.x - c.x, o.y - c.y);
            let offset = 0.5 * (o.x * o.x + o.y * o.y - c.x * c.x - c.y * c.y);
            if clip_half_plane(&s.poly, &mut s.tmp, &mut s.sides, normal, offset) {
                std::mem::swap(&mut s.poly, &mut s.tmp);
            }
        }
        if s.poly.iter().any(|p| p.norm() > self.radius) {
            let n = self.bound.len();
            for i in 0..n {
                let (a, b) = (self.bound[i], self.bound[(i + 1) % n]);
                let normal = Point::new(b.y - a.y, a.x - b.x);
                let offset = normal.x * a.x + normal.y * a.y;
                if clip_half_plane(&s.poly, &mut s.tmp, &mut s.sides, normal, offset) {
                    std::mem::swap(&mut s.poly, &mut s.tmp);
                }
            }
        }
    }
}

/// Keeps the part of `poly` with `normal · p <= offset`. Returns `false` (and
/// leaves `out` untouched) when nothing is cut off.
fn clip_half_plane(poly: &[Point], out: &mut Vec<Point>, sides: &mut Vec<f64>, normal: Point, offset: f64) -> bool {
    sides.clear();
    let mut any_out = false;
    for p in poly {
        let d = normal.x * p.x + normal.y * p.y - offset;
        any_out |= d > 0.0;
        sides.push(d);
    }
    if !any_out {
        return false;
    }
    out.clear();
    let n = poly.len();
    let (mut prev, mut dp) = (poly[n - 1], sides[n - 1]);
    for (&cur, &dc) in poly.iter().zip(sides.iter()) {
        if dc <= 0.0 {
            if dp > 0.0 {
                out.push(lerp(prev, cur, dp / (dp - dc)));
            }
            out.push(cur);
        } else if dp <= 0.0 {
            out.push(lerp(prev, cur, dp / (dp - dc)));
        }
        prev = cur;
        dp = dc;
    }
    true
}

fn lerp(a: Point, b: Point, t: f64) -> Point {
    Point::new(a.x + t * (b.x - a.x), a.y + t * (b.y - a.y))
}

/// Uniform point in a convex polygon containing `center`, via the triangle fan
/// around `center`.
fn sample_in_fan<R: Rng>(center: Point, poly: &[Point], areas: &mut Vec<f64>, rng: &mut R) -> Point {
    let n = poly.len();
    areas.clear();
    let mut total = 0.0;
    for i in 0..n {
        let (a, b) = (poly[i], poly[(i + 1) % n]);
        let cross = (a.x - center.x) * (b.y - center.y) - (b.x - center.x) * (a.y - center.y);
        total += 0.5 * cross.abs();
        areas.push(total);
    }
    let target = rng.random::<f64>() * total;
    let i = areas.partition_point(|&c| c <= target).min(n - 1);
    let (a, b) = (poly[i], poly[(i + 1) % n]);
    let (mut u, mut v): (f64, f64) = (rng.random(), rng.random());
    if u + v > 1.0 {
        u = 1.0 - u;
        v = 1.0 - v;
    }
    Point::new(
        center.x + u * (a.x - center.x) + v * (b.x - center.x),
        center.y + u * (a.y - center.y) + v * (b.y - center.y),
    )
}
