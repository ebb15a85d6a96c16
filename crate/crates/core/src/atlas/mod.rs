//! Chart atlases of star-shaped sets, local potentials built by in-chart
//! segment integration, the overlap cocycle `c_ij = V_i − V_j`, and the
//! coboundary (exactness) test over the overlap nerve.

mod cocycle;
mod potential;

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fields::R_MIN;
use crate::geom::{point_segment_distance, Vec2};

pub use cocycle::{
    classify, cocycle, exactness_test, CechCocycle, ClassificationReport, ClassifyOptions, CyclePeriod,
    ExactnessReport, CONSTANCY_TOL, DEFAULT_OVERLAP_SAMPLES, PERIOD_TOL,
};
pub use potential::{LocalPotential, PotentialSet};

/// Slack on half-plane membership, so points computed on a chart boundary
/// count as lying on it.
pub const CHART_EPS: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ChartId(pub u32);

impl fmt::Display for ChartId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Closed half-plane `a·x + b·y ≥ c`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HalfPlane {
    pub a: f64,
    pub b: f64,
    pub c: f64,
}

impl HalfPlane {
    pub fn new(a: f64, b: f64, c: f64) -> HalfPlane {
        HalfPlane { a, b, c }
    }

    /// Signed slack `a·x + b·y − c`.
    pub fn slack(&self, q: Vec2) -> f64 {
        self.a * q.x + self.b * q.y - self.c
    }

    /// Orthogonal projection onto the boundary line.
    pub fn project(&self, q: Vec2) -> Vec2 {
        let n2 = self.a * self.a + self.b * self.b;
        let s = self.slack(q) / n2;
        Vec2::new(q.x - s * self.a, q.y - s * self.b)
    }
}

/// A convex chart: intersection of closed half-planes, minus punctures.
#[derive(Debug, Clone, Serialize)]
pub struct Chart {
    pub id: ChartId,
    pub label: String,
    pub constraints: Vec<HalfPlane>,
    pub basepoint: Vec2,
    pub punctures: Vec<Vec2>,
}

impl Chart {
    pub fn new(
        id: ChartId,
        label: impl Into<String>,
        constraints: Vec<HalfPlane>,
        basepoint: Vec2,
        punctures: Vec<Vec2>,
    ) -> Result<Chart> {
        for h in &constraints {
            if h.a == 0.0 && h.b == 0.0 {
                return Err(Error::invalid(format!("chart {id}: degenerate half-plane constraint")));
            }
            if h.slack(basepoint) <= CHART_EPS {
                return Err(Error::invalid(format!(
                    "chart {id}: basepoint ({}, {}) is not strictly inside",
                    basepoint.x, basepoint.y
                )));
            }
        }
        if punctures.iter().any(|p| p.dist(basepoint) < R_MIN) {
            return Err(Error::invalid(format!("chart {id}: basepoint is a puncture")));
        }
        Ok(Chart {
            id,
            label: label.into(),
            constraints,
            basepoint,
            punctures,
        })
    }

    pub fn contains(&self, q: Vec2) -> bool {
        self.constraints.iter().all(|h| h.slack(q) >= -CHART_EPS)
            && self.punctures.iter().all(|p| p.dist(q) >= R_MIN)
    }

    /// Distance from the segment basepoint→q to the nearest puncture.
    pub fn ray_clearance(&self, q: Vec2) -> f64 {
        self.punctures
            .iter()
            .map(|&p| point_segment_distance(p, self.basepoint, q))
            .fold(f64::INFINITY, f64::min)
    }
}

/// Shape of an intersection of charts within the sampling window.
#[derive(Debug, Clone, PartialEq)]
pub enum Region {
    Empty,
    Segment(Vec2, Vec2),
    Polygon(Vec<Vec2>),
}

#[derive(Debug, Clone, Serialize)]
pub struct Atlas {
    pub charts: Vec<Chart>,
    /// Overlaps are computed inside the square `[−window, window]²`.
    pub window: f64,
    /// Overlap samples keep at least this distance from punctures.
    pub puncture_clearance: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct StarShapeReport {
    pub chart: ChartId,
    pub samples: usize,
    pub pass: bool,
    pub first_violation: Option<Vec2>,
}

/// Chart description as it appears in configuration files.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChartSpec {
    pub id: u32,
    #[serde(default)]
    pub label: String,
    /// `[a, b, c]` triples meaning `a·x + b·y ≥ c`.
    pub constraints: Vec<[f64; 3]>,
    pub basepoint: [f64; 2],
}

impl Atlas {
    pub const DEFAULT_WINDOW: f64 = 2.0;
    pub const DEFAULT_CLEARANCE: f64 = 0.25;

    pub fn new(mut charts: Vec<Chart>) -> Result<Atlas> {
        if charts.is_empty() {
            return Err(Error::invalid("atlas needs at least one chart"));
        }
        charts.sort_by_key(|c| c.id);
        if charts.windows(2).any(|w| w[0].id == w[1].id) {
            return Err(Error::invalid("duplicate chart id"));
        }
        Ok(Atlas {
            charts,
            window: Self::DEFAULT_WINDOW,
            puncture_clearance: Self::DEFAULT_CLEARANCE,
        })
    }

    pub fn from_specs(specs: &[ChartSpec], punctures: &[Vec2]) -> Result<Atlas> {
        let charts = specs
            .iter()
            .map(|s| {
                Chart::new(
                    ChartId(s.id),
                    s.label.clone(),
                    s.constraints.iter().map(|&[a, b, c]| HalfPlane::new(a, b, c)).collect(),
                    Vec2::from(s.basepoint),
                    punctures.to_vec(),
                )
            })
            .collect::<Result<Vec<_>>>()?;
        Atlas::new(charts)
    }

    /// The four closed quadrants of ℝ² ∖ {0}, ids 1..=4 counter-clockwise
    /// from the first quadrant, basepoints `(±1, ±1)`.
    pub fn quadrant() -> Atlas {
        let o = vec![Vec2::ZERO];
        let q = |id, label: &str, sx: f64, sy: f64| {
            Chart::new(
                ChartId(id),
                label,
                vec![HalfPlane::new(sx, 0.0, 0.0), HalfPlane::new(0.0, sy, 0.0)],
                Vec2::new(sx, sy),
                o.clone(),
            )
            .expect("quadrant chart")
        };
        Atlas::new(vec![
            q(1, "x ≥ 0, y ≥ 0", 1.0, 1.0),
            q(2, "x ≤ 0, y ≥ 0", -1.0, 1.0),
            q(3, "x ≤ 0, y ≤ 0", -1.0, -1.0),
            q(4, "x ≥ 0, y ≤ 0", 1.0, -1.0),
        ])
        .expect("quadrant atlas")
    }

    /// A single chart, the whole window around the basepoint (no punctures).
    pub fn single(basepoint: Vec2) -> Atlas {
        let chart = Chart::new(ChartId(1), "plane", vec![], basepoint, vec![]).expect("plane chart");
        Atlas::new(vec![chart]).expect("single chart")
    }

    pub fn ids(&self) -> Vec<ChartId> {
        self.charts.iter().map(|c| c.id).collect()
    }

    pub fn chart(&self, id: ChartId) -> Result<&Chart> {
        self.charts
            .iter()
            .find(|c| c.id == id)
            .ok_or_else(|| Error::invalid(format!("unknown chart {id}")))
    }

    pub fn index_of(&self, id: ChartId) -> Result<usize> {
        self.charts
            .iter()
            .position(|c| c.id == id)
            .ok_or_else(|| Error::invalid(format!("unknown chart {id}")))
    }

    /// Lowest-id chart containing `q`.
    pub fn lowest_containing(&self, q: Vec2) -> Option<ChartId> {
        self.charts.iter().find(|c| c.contains(q)).map(|c| c.id)
    }

    pub fn containing(&self, q: Vec2) -> Vec<ChartId> {
        self.charts.iter().filter(|c| c.contains(q)).map(|c| c.id).collect()
    }

    /// Probe points not covered by any chart.
    pub fn uncovered(&self, probes: &[Vec2]) -> Vec<Vec2> {
        probes
            .iter()
            .copied()
            .filter(|&q| self.lowest_containing(q).is_none())
            .collect()
    }

    fn punctures(&self, ids: &[ChartId]) -> Result<Vec<Vec2>> {
        let mut out: Vec<Vec2> = Vec::new();
        for &id in ids {
            for &p in &self.chart(id)?.punctures {
                if !out.contains(&p) {
                    out.push(p);
                }
            }
        }
        Ok(out)
    }

    /// Intersection of the given charts (punctures ignored) clipped to the window.
    pub fn region(&self, ids: &[ChartId]) -> Result<Region> {
        let w = self.window;
        let mut poly = vec![Vec2::new(-w, -w), Vec2::new(w, -w), Vec2::new(w, w), Vec2::new(-w, w)];
        for &id in ids {
            for h in &self.chart(id)?.constraints {
                poly = clip(&poly, h);
                if poly.is_empty() {
                    return Ok(Region::Empty);
                }
            }
        }
        let area = shoelace(&poly).abs();
        if area > 1e-12 * w * w {
            return Ok(Region::Polygon(poly));
        }
        let mut best = (0.0, poly[0], poly[0]);
        for (i, &a) in poly.iter().enumerate() {
            for &b in &poly[i + 1..] {
                let d = a.dist(b);
                if d > best.0 {
                    best = (d, a, b);
                }
            }
        }
        if best.0 < 1e-9 {
            // a single point; the only candidate is a puncture corner
            return Ok(Region::Empty);
        }
        let (a, b) = if (best.1.x, best.1.y) <= (best.2.x, best.2.y) {
            (best.1, best.2)
        } else {
            (best.2, best.1)
        };
        Ok(Region::Segment(a, b))
    }

    /// Up to `k` deterministic low-discrepancy points in the intersection
    /// of `ids`, away from punctures. Empty when the intersection is.
    pub fn intersection_samples(&self, ids: &[ChartId], k: usize) -> Result<Vec<Vec2>> {
        let punctures = self.punctures(ids)?;
        let clear = |q: Vec2| punctures.iter().all(|p| p.dist(q) >= self.puncture_clearance);
        let inside = |q: Vec2| -> Result<bool> {
            for &id in ids {
                if !self.chart(id)?.contains(q) {
                    return Ok(false);
                }
            }
            Ok(true)
        };
        let mut out = Vec::with_capacity(k);
        let max_tries = 64 * k.max(1);
        match self.region(ids)? {
            Region::Empty => {}
            Region::Segment(a, b) => {
                for n in 1..=max_tries {
                    if out.len() == k {
                        break;
                    }
                    let q = a.lerp(b, radical_inverse(n as u64, 2));
                    if clear(q) && inside(q)? {
                        out.push(q);
                    }
                }
            }
            Region::Polygon(poly) => {
                let (lo, hi) = bbox(&poly);
                for n in 1..=max_tries {
                    if out.len() == k {
                        break;
                    }
                    let q = Vec2::new(
                        lo.x + (hi.x - lo.x) * radical_inverse(n as u64, 2),
                        lo.y + (hi.y - lo.y) * radical_inverse(n as u64, 3),
                    );
                    if clear(q) && inside(q)? {
                        out.push(q);
                    }
                }
            }
        }
        Ok(out)
    }

    pub fn overlap_samples(&self, i: ChartId, j: ChartId, k: usize) -> Result<Vec<Vec2>> {
        self.intersection_samples(&[i, j], k)
    }

    pub fn overlaps(&self, i: ChartId, j: ChartId) -> Result<bool> {
        Ok(i == j || !self.overlap_samples(i, j, 1)?.is_empty())
    }

    /// Nerve edges `(i, j)`, `i < j`, with nonempty overlap.
    pub fn nerve_edges(&self) -> Result<Vec<(ChartId, ChartId)>> {
        let ids = self.ids();
        let mut edges = Vec::new();
        for (a, &i) in ids.iter().enumerate() {
            for &j in &ids[a + 1..] {
                if self.overlaps(i, j)? {
                    edges.push((i, j));
                }
            }
        }
        Ok(edges)
    }

    /// Triples `i < j < k` with nonempty triple overlap.
    pub fn triple_overlaps(&self) -> Result<Vec<(ChartId, ChartId, ChartId)>> {
        let ids = self.ids();
        let mut out = Vec::new();
        for a in 0..ids.len() {
            for b in a + 1..ids.len() {
                for c in b + 1..ids.len() {
                    let t = [ids[a], ids[b], ids[c]];
                    if !self.intersection_samples(&t, 1)?.is_empty() {
                        out.push((t[0], t[1], t[2]));
                    }
                }
            }
        }
        Ok(out)
    }

    /// Samples points of the chart and checks that the segment from the
    /// basepoint to each stays inside and clear of punctures.
    pub fn check_star_shaped(&self, id: ChartId, samples: usize) -> Result<StarShapeReport> {
        if samples == 0 {
            return Err(Error::invalid("star-shape check needs at least one sample"));
        }
        let chart = self.chart(id)?;
        let mut sub = self.clone();
        sub.puncture_clearance = 1e-6;
        let mut points = Vec::new();
        // points just behind each puncture as seen from the basepoint: their
        // segments run through the puncture exactly
        for &p in &chart.punctures {
            let dir = p - chart.basepoint;
            let len = dir.norm();
            if len == 0.0 {
                continue;
            }
            for eps in [1e-6, 1e-3, 1e-1] {
                let q = p + dir * (eps / len);
                if chart.contains(q) {
                    points.push(q);
                }
            }
        }
        points.extend(sub.intersection_samples(&[id], samples)?);
        let mut first_violation = None;
        'outer: for &q in &points {
            if chart.ray_clearance(q) < R_MIN {
                first_violation = Some(q);
                break;
            }
            for m in 1..32 {
                if !chart.contains(chart.basepoint.lerp(q, m as f64 / 32.0)) {
                    first_violation = Some(q);
                    break 'outer;
                }
            }
        }
        Ok(StarShapeReport {
            chart: id,
            samples: points.len(),
            pass: first_violation.is_none(),
            first_violation,
        })
    }
}

/// Van der Corput radical inverse of `n` in `base`.
pub fn radical_inverse(mut n: u64, base: u64) -> f64 {
    let inv = 1.0 / base as f64;
    let mut f = inv;
    let mut r = 0.0;
    while n > 0 {
        r += (n % base) as f64 * f;
        n /= base;
        f *= inv;
    }
    r
}

fn clip(poly: &[Vec2], h: &HalfPlane) -> Vec<Vec2> {
    let mut out = Vec::with_capacity(poly.len() + 1);
    for k in 0..poly.len() {
        let p = poly[k];
        let q = poly[(k + 1) % poly.len()];
        let sp = h.slack(p);
        let sq = h.slack(q);
        let pin = sp >= -CHART_EPS;
        let qin = sq >= -CHART_EPS;
        if pin {
            out.push(p);
        }
        if pin != qin {
            let s = sp / (sp - sq);
            out.push(h.project(p.lerp(q, s)));
        }
    }
    out.dedup_by(|a, b| a.dist(*b) < 1e-15);
    if out.len() > 1 && out[0].dist(out[out.len() - 1]) < 1e-15 {
        out.pop();
    }
    out
}

fn shoelace(poly: &[Vec2]) -> f64 {
    let n = poly.len();
    (0..n).map(|k| poly[k].cross(poly[(k + 1) % n])).sum::<f64>() / 2.0
}

fn bbox(poly: &[Vec2]) -> (Vec2, Vec2) {
    let mut lo = poly[0];
    let mut hi = poly[0];
    for p in poly {
        lo = Vec2::new(lo.x.min(p.x), lo.y.min(p.y));
        hi = Vec2::new(hi.x.max(p.x), hi.y.max(p.y));
    }
    (lo, hi)
}
