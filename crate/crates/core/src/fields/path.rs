use std::f64::consts::TAU;

use crate::error::{Error, Result};
use crate::expr::{Env, Func, Node, ScalarExpr, Var};
use crate::geom::{point_segment_distance, Vec2};
use crate::quad::{integrate, Rule};

use super::{FieldOneForm, R_MIN};

/// Endpoints closer than this make a path closed.
pub const CLOSED_TOL: f64 = 1e-12;

/// A 1-chain in the plane.
#[derive(Debug, Clone)]
pub enum PlanarPath {
    /// Straight edges between vertices; edge `k` is split into
    /// `edge_segments[k]` quadrature segments.
    Polyline {
        vertices: Vec<Vec2>,
        edge_segments: Vec<usize>,
    },
    /// `t ↦ (x(t), y(t))` for `t` from `t0` to `t1` (either order) with
    /// `samples` segments.
    Parametric {
        x: ScalarExpr,
        y: ScalarExpr,
        t0: f64,
        t1: f64,
        samples: usize,
    },
    /// Concatenation, traversed in order.
    Chain(Vec<PlanarPath>),
}

/// Elementary piece of a path.
#[derive(Debug, Clone)]
pub enum Piece<'a> {
    Segment {
        a: Vec2,
        b: Vec2,
        n: usize,
    },
    Param {
        x: &'a ScalarExpr,
        y: &'a ScalarExpr,
        t0: f64,
        t1: f64,
        n: usize,
    },
}

impl PlanarPath {
    /// Polyline whose `segments` quadrature segments are distributed over
    /// the edges in proportion to their length (at least one per edge).
    pub fn polyline(vertices: Vec<Vec2>, segments: usize) -> PlanarPath {
        let lengths: Vec<f64> = vertices.windows(2).map(|w| w[0].dist(w[1])).collect();
        let total: f64 = lengths.iter().sum();
        let edge_segments = lengths
            .iter()
            .map(|&l| {
                if total > 0.0 {
                    ((segments as f64 * l / total).round() as usize).max(1)
                } else {
                    1
                }
            })
            .collect();
        PlanarPath::Polyline {
            vertices,
            edge_segments,
        }
    }

    pub fn polyline_with_edge_segments(vertices: Vec<Vec2>, edge_segments: Vec<usize>) -> Result<PlanarPath> {
        if vertices.len() < 2 || edge_segments.len() + 1 != vertices.len() {
            return Err(Error::invalid("polyline needs n ≥ 2 vertices and n−1 edge segment counts"));
        }
        if edge_segments.contains(&0) {
            return Err(Error::invalid("edge segment counts must be positive"));
        }
        Ok(PlanarPath::Polyline {
            vertices,
            edge_segments,
        })
    }

    pub fn parametric(x: ScalarExpr, y: ScalarExpr, t0: f64, t1: f64, samples: usize) -> Result<PlanarPath> {
        for e in [&x, &y] {
            if e.uses(Var::X) || e.uses(Var::Y) {
                return Err(Error::invalid("parametric components may only use `t`"));
            }
        }
        if samples == 0 {
            return Err(Error::invalid("parametric path needs at least one sample segment"));
        }
        Ok(PlanarPath::Parametric {
            x,
            y,
            t0,
            t1,
            samples,
        })
    }

    /// Circle about `center`; negative `turns` runs clockwise. Starts at
    /// `center + (r, 0)`.
    pub fn circle(center: Vec2, r: f64, turns: f64, samples: usize) -> PlanarPath {
        let t = || Node::var(Var::T);
        let x = Node::add(Node::num(center.x), Node::mul(Node::num(r), Node::call(Func::Cos, vec![t()])));
        let y = Node::add(Node::num(center.y), Node::mul(Node::num(r), Node::call(Func::Sin, vec![t()])));
        PlanarPath::Parametric {
            x: ScalarExpr::from_node(x),
            y: ScalarExpr::from_node(y),
            t0: 0.0,
            t1: TAU * turns,
            samples: samples.max(1),
        }
    }

    pub fn pieces(&self) -> Vec<Piece<'_>> {
        let mut out = Vec::new();
        self.collect_pieces(&mut out);
        out
    }

    fn collect_pieces<'a>(&'a self, out: &mut Vec<Piece<'a>>) {
        match self {
            PlanarPath::Polyline {
                vertices,
                edge_segments,
            } => {
                for (w, &n) in vertices.windows(2).zip(edge_segments) {
                    out.push(Piece::Segment { a: w[0], b: w[1], n });
                }
            }
            PlanarPath::Parametric {
                x,
                y,
                t0,
                t1,
                samples,
            } => out.push(Piece::Param {
                x,
                y,
                t0: *t0,
                t1: *t1,
                n: *samples,
            }),
            PlanarPath::Chain(parts) => parts.iter().for_each(|p| p.collect_pieces(out)),
        }
    }

    pub fn start(&self) -> Result<Vec2> {
        let pieces = self.pieces();
        let first = pieces.first().ok_or_else(|| Error::invalid("empty path"))?;
        first.point(0.0)
    }

    pub fn end(&self) -> Result<Vec2> {
        let pieces = self.pieces();
        let last = pieces.last().ok_or_else(|| Error::invalid("empty path"))?;
        last.point(1.0)
    }

    pub fn endpoint_gap(&self) -> Result<f64> {
        Ok(self.start()?.dist(self.end()?))
    }

    pub fn is_closed(&self) -> Result<bool> {
        Ok(self.endpoint_gap()? <= CLOSED_TOL)
    }

    /// Same trace, opposite orientation.
    pub fn reversed(&self) -> PlanarPath {
        match self {
            PlanarPath::Polyline {
                vertices,
                edge_segments,
            } => PlanarPath::Polyline {
                vertices: vertices.iter().rev().copied().collect(),
                edge_segments: edge_segments.iter().rev().copied().collect(),
            },
            PlanarPath::Parametric {
                x,
                y,
                t0,
                t1,
                samples,
            } => PlanarPath::Parametric {
                x: x.clone(),
                y: y.clone(),
                t0: *t1,
                t1: *t0,
                samples: *samples,
            },
            PlanarPath::Chain(parts) => PlanarPath::Chain(parts.iter().rev().map(|p| p.reversed()).collect()),
        }
    }

    /// `self` followed by `other`; polylines merge into one polyline.
    pub fn then(&self, other: &PlanarPath) -> PlanarPath {
        if let (
            PlanarPath::Polyline {
                vertices: va,
                edge_segments: sa,
            },
            PlanarPath::Polyline {
                vertices: vb,
                edge_segments: sb,
            },
        ) = (self, other)
        {
            if let (Some(&end), Some(&start)) = (va.last(), vb.first()) {
                if end == start {
                    let mut vertices = va.clone();
                    vertices.extend_from_slice(&vb[1..]);
                    let mut edge_segments = sa.clone();
                    edge_segments.extend_from_slice(sb);
                    return PlanarPath::Polyline {
                        vertices,
                        edge_segments,
                    };
                }
            }
        }
        let mut parts = Vec::new();
        for p in [self, other] {
            match p {
                PlanarPath::Chain(inner) => parts.extend(inner.iter().cloned()),
                _ => parts.push(p.clone()),
            }
        }
        PlanarPath::Chain(parts)
    }

    /// Sample points, one per segment boundary.
    /// Total number of quadrature segments over all pieces.
    pub fn segments(&self) -> usize {
        self.pieces().iter().map(Piece::segments).sum()
    }

    pub fn sample_points(&self) -> Result<Vec<Vec2>> {
        let mut out: Vec<Vec2> = Vec::new();
        for piece in self.pieces() {
            let n = piece.segments();
            for k in 0..=n {
                if k == 0 && !out.is_empty() {
                    let p = piece.point(0.0)?;
                    if out.last() == Some(&p) {
                        continue;
                    }
                    out.push(p);
                    continue;
                }
                out.push(piece.point(k as f64 / n as f64)?);
            }
        }
        Ok(out)
    }
}

impl Piece<'_> {
    pub fn segments(&self) -> usize {
        match self {
            Piece::Segment { n, .. } | Piece::Param { n, .. } => (*n).max(1),
        }
    }

    /// Point at normalized parameter `s ∈ [0, 1]`.
    pub fn point(&self, s: f64) -> Result<Vec2> {
        match self {
            Piece::Segment { a, b, .. } => Ok(if s == 1.0 { *b } else { a.lerp(*b, s) }),
            Piece::Param { x, y, t0, t1, .. } => {
                let t = if s == 1.0 { *t1 } else { t0 + (t1 - t0) * s };
                let env = Env { x: 0.0, y: 0.0, t };
                Ok(Vec2::new(x.eval_env(&env)?, y.eval_env(&env)?))
            }
        }
    }

    pub(crate) fn integrate(&self, f: &FieldOneForm, rule: Rule) -> Result<f64> {
        match self {
            Piece::Segment { a, b, n } => {
                for &s in &f.singular_points {
                    let d = point_segment_distance(s, *a, *b);
                    if d < R_MIN {
                        return Err(Error::SingularProximity {
                            point: s,
                            singular: s,
                            distance: d,
                        });
                    }
                }
                let d = *b - *a;
                integrate(rule, 0.0, 1.0, *n, |s| f.pair(a.lerp(*b, s), d))
            }
            Piece::Param { x, y, t0, t1, n } => integrate(rule, *t0, *t1, *n, |t| {
                let (px, vx) = x.eval_t_with_derivative(t)?;
                let (py, vy) = y.eval_t_with_derivative(t)?;
                f.pair(Vec2::new(px, py), Vec2::new(vx, vy))
            }),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::work;

    fn square(h: f64, segments: usize) -> PlanarPath {
        PlanarPath::polyline(
            vec![
                Vec2::new(h, -h),
                Vec2::new(h, h),
                Vec2::new(-h, h),
                Vec2::new(-h, -h),
                Vec2::new(h, -h),
            ],
            segments,
        )
    }

    #[test]
    fn closed_flag() {
        assert!(PlanarPath::circle(Vec2::ZERO, 1.0, 1.0, 100).is_closed().unwrap());
        assert!(square(2.0, 40).is_closed().unwrap());
        let open = PlanarPath::polyline(vec![Vec2::ZERO, Vec2::new(1.0, 0.0)], 4);
        assert!(!open.is_closed().unwrap());
    }

    #[test]
    fn segment_distribution_is_proportional() {
        let p = PlanarPath::polyline(vec![Vec2::ZERO, Vec2::new(3.0, 0.0), Vec2::new(3.0, 1.0)], 40);
        match p {
            PlanarPath::Polyline { edge_segments, .. } => assert_eq!(edge_segments, vec![30, 10]),
            _ => unreachable!(),
        }
    }

    #[test]
    fn reversal_negates_and_concatenation_adds() {
        let f = FieldOneForm::parse("poly", "x*y + 1", "x - y^2", vec![]).unwrap();
        let a = PlanarPath::polyline(vec![Vec2::ZERO, Vec2::new(1.0, 2.0), Vec2::new(-1.0, 3.0)], 50);
        let b = PlanarPath::polyline(vec![Vec2::new(-1.0, 3.0), Vec2::new(0.5, -1.0)], 30);
        let wa = work(&f, &a, Rule::Simpson).unwrap();
        let wb = work(&f, &b, Rule::Simpson).unwrap();
        let wab = work(&f, &a.then(&b), Rule::Simpson).unwrap();
        assert!((wa + wb - wab).abs() < 1e-10);
        assert!((work(&f, &a.reversed(), Rule::Simpson).unwrap() + wa).abs() < 1e-10);
        let c = PlanarPath::circle(Vec2::new(0.3, 0.1), 0.7, 1.0, 400);
        let wc = work(&f, &c, Rule::Gauss(8)).unwrap();
        assert!((work(&f, &c.reversed(), Rule::Gauss(8)).unwrap() + wc).abs() < 1e-10);
        let mixed = a.then(&c.reversed());
        assert!(matches!(mixed, PlanarPath::Chain(ref v) if v.len() == 2));
    }

    #[test]
    fn reparametrization_invariance() {
        let f = FieldOneForm::vortex();
        let c1 = PlanarPath::circle(Vec2::new(0.2, -0.1), 1.5, 1.0, 2000);
        // same circle traced with t ↦ 2t on [0, π]
        let c2 = PlanarPath::parametric(
            ScalarExpr::parse_param("0.2 + 1.5*cos(2*t)").unwrap(),
            ScalarExpr::parse_param("-0.1 + 1.5*sin(2*t)").unwrap(),
            0.0,
            std::f64::consts::PI,
            2000,
        )
        .unwrap();
        let w1 = work(&f, &c1, Rule::Simpson).unwrap();
        let w2 = work(&f, &c2, Rule::Simpson).unwrap();
        assert!((w1 - w2).abs() < 1e-9, "{w1} vs {w2}");
    }

    #[test]
    fn parametric_rejects_plane_variables() {
        let e = ScalarExpr::parse("x").unwrap();
        assert!(PlanarPath::parametric(e.clone(), e, 0.0, 1.0, 10).is_err());
    }

    #[test]
    fn sample_points_skip_duplicate_junctions() {
        let p = square(1.0, 8);
        let pts = p.sample_points().unwrap();
        assert_eq!(pts.len(), 9);
        assert_eq!(pts[0], pts[8]);
    }
}
