//! Planar force 1-forms `f = f_x dx + f_y dy`: closedness, work along
//! paths, and winding numbers.

mod path;
mod winding;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::expr::ScalarExpr;
use crate::geom::Vec2;
use crate::quad::Rule;

pub use path::{Piece, PlanarPath, CLOSED_TOL};
pub use winding::{accumulate_angle, winding_number, Winding};

/// Evaluation guard radius around singular points.
pub const R_MIN: f64 = 1e-9;

/// Default number of sub-segments for paths built without an explicit count.
pub const DEFAULT_SEGMENTS: usize = 2000;

#[derive(Debug, Clone)]
pub struct FieldOneForm {
    pub name: String,
    pub fx: ScalarExpr,
    pub fy: ScalarExpr,
    pub singular_points: Vec<Vec2>,
}

impl FieldOneForm {
    pub fn new(
        name: impl Into<String>,
        fx: ScalarExpr,
        fy: ScalarExpr,
        singular_points: Vec<Vec2>,
    ) -> FieldOneForm {
        FieldOneForm {
            name: name.into(),
            fx,
            fy,
            singular_points,
        }
    }

    pub fn parse(
        name: impl Into<String>,
        fx: &str,
        fy: &str,
        singular_points: Vec<Vec2>,
    ) -> Result<FieldOneForm> {
        Ok(FieldOneForm::new(
            name,
            ScalarExpr::parse(fx)?,
            ScalarExpr::parse(fy)?,
            singular_points,
        ))
    }

    /// `(-y dx + x dy) / (x² + y²)` on the plane minus the origin.
    pub fn vortex() -> FieldOneForm {
        FieldOneForm::parse("vortex", "-y/(x^2+y^2)", "x/(x^2+y^2)", vec![Vec2::ZERO])
            .expect("built-in expression")
    }

    /// `2x dx + 2y dy`, the differential of `x² + y²`.
    pub fn radial_exact() -> FieldOneForm {
        FieldOneForm::parse("radial-exact", "2*x", "2*y", vec![]).expect("built-in expression")
    }

    /// `x dy`, which is not closed.
    pub fn x_dy() -> FieldOneForm {
        FieldOneForm::parse("x-dy", "0", "x", vec![]).expect("built-in expression")
    }

    pub fn zero() -> FieldOneForm {
        FieldOneForm::parse("zero", "0", "0", vec![]).expect("built-in expression")
    }

    pub fn builtin(name: &str) -> Option<FieldOneForm> {
        match name {
            "vortex" => Some(Self::vortex()),
            "radial-exact" | "exact" => Some(Self::radial_exact()),
            "x-dy" | "xdy" => Some(Self::x_dy()),
            "zero" => Some(Self::zero()),
            _ => None,
        }
    }

    pub const BUILTIN_NAMES: [&'static str; 4] = ["vortex", "radial-exact", "x-dy", "zero"];

    /// Nearest singular point closer than `r_min`, if any.
    pub fn too_close(&self, q: Vec2, r_min: f64) -> Option<(Vec2, f64)> {
        self.singular_points
            .iter()
            .map(|&s| (s, q.dist(s)))
            .find(|&(_, d)| d < r_min)
    }

    pub fn guard(&self, q: Vec2, r_min: f64) -> Result<()> {
        match self.too_close(q, r_min) {
            Some((singular, distance)) => Err(Error::SingularProximity {
                point: q,
                singular,
                distance,
            }),
            None => Ok(()),
        }
    }

    /// Components `(f_x, f_y)` at `q`, i.e. the force vector f♯(q).
    pub fn eval(&self, q: Vec2) -> Result<Vec2> {
        self.guard(q, R_MIN)?;
        Ok(Vec2::new(self.fx.eval(q.x, q.y)?, self.fy.eval(q.x, q.y)?))
    }

    /// Pairing of f with a displacement, `f_x v_x + f_y v_y`.
    pub fn pair(&self, q: Vec2, v: Vec2) -> Result<f64> {
        Ok(self.eval(q)?.dot(v))
    }
}

/// Axis-aligned rectangle `[x0, x1] × [y0, y1]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Rect {
    pub x0: f64,
    pub y0: f64,
    pub x1: f64,
    pub y1: f64,
}

impl Rect {
    pub fn new(x0: f64, y0: f64, x1: f64, y1: f64) -> Rect {
        Rect { x0, y0, x1, y1 }
    }

    pub fn distance_to(&self, p: Vec2) -> f64 {
        let dx = (self.x0 - p.x).max(0.0).max(p.x - self.x1);
        let dy = (self.y0 - p.y).max(0.0).max(p.y - self.y1);
        dx.hypot(dy)
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ClosednessReport {
    pub field: String,
    pub region: Rect,
    pub grid: usize,
    pub h: f64,
    pub tol: f64,
    /// max |∂f_x/∂y − ∂f_y/∂x| over the grid
    pub max_residual: f64,
    pub worst_point: Vec2,
    pub pass: bool,
}

/// Checks `df = 0` numerically on a `grid × grid` lattice over `region`.
pub fn is_closed(
    f: &FieldOneForm,
    region: Rect,
    grid: usize,
    h: f64,
    tol: f64,
) -> Result<ClosednessReport> {
    if grid < 2 {
        return Err(Error::invalid("closedness grid must be at least 2"));
    }
    if !(h > 0.0) {
        return Err(Error::invalid("finite-difference step must be positive"));
    }
    for &s in &f.singular_points {
        let d = region.distance_to(s);
        if d < 10.0 * h {
            return Err(Error::SingularProximity {
                point: s,
                singular: s,
                distance: d,
            });
        }
    }
    let mut max_residual = 0.0f64;
    let mut worst_point = Vec2::new(region.x0, region.y0);
    let step = |a: f64, b: f64, i: usize| a + (b - a) * i as f64 / (grid - 1) as f64;
    for i in 0..grid {
        for j in 0..grid {
            let q = Vec2::new(step(region.x0, region.x1, i), step(region.y0, region.y1, j));
            let dfx_dy = (f.fx.eval(q.x, q.y + h)? - f.fx.eval(q.x, q.y - h)?) / (2.0 * h);
            let dfy_dx = (f.fy.eval(q.x + h, q.y)? - f.fy.eval(q.x - h, q.y)?) / (2.0 * h);
            let r = (dfx_dy - dfy_dx).abs();
            if r > max_residual {
                max_residual = r;
                worst_point = q;
            }
        }
    }
    Ok(ClosednessReport {
        field: f.name.clone(),
        region,
        grid,
        h,
        tol,
        max_residual,
        worst_point,
        pass: max_residual < tol,
    })
}

/// Line integral `∫_c f` with the given per-segment rule.
pub fn work(f: &FieldOneForm, c: &PlanarPath, rule: Rule) -> Result<f64> {
    let mut total = 0.0;
    for piece in c.pieces() {
        total += piece.integrate(f, rule)?;
    }
    Ok(total)
}

/// Where a field sits in `B¹ ⊂ Z¹ ⊂ Ω¹`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Classification {
    Exact,
    ClosedNotExact,
    NotClosed,
}

impl std::fmt::Display for Classification {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Classification::Exact => "exact",
            Classification::ClosedNotExact => "closed-not-exact",
            Classification::NotClosed => "not-closed",
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{PI, TAU};

    #[test]
    fn vortex_is_closed_on_first_quadrant_box() {
        let r = is_closed(&FieldOneForm::vortex(), Rect::new(0.5, 0.5, 2.0, 2.0), 20, 1e-5, 1e-5)
            .unwrap();
        assert!(r.pass);
        assert!(r.max_residual < 1e-5);
    }

    #[test]
    fn x_dy_is_not_closed() {
        let r = is_closed(&FieldOneForm::x_dy(), Rect::new(-1.0, -1.0, 1.0, 1.0), 10, 1e-5, 1e-5)
            .unwrap();
        assert!(!r.pass);
        assert!((r.max_residual - 1.0).abs() < 1e-6);
    }

    #[test]
    fn radial_exact_is_closed() {
        let r = is_closed(&FieldOneForm::radial_exact(), Rect::new(-3.0, -3.0, 3.0, 3.0), 15, 1e-5, 1e-6)
            .unwrap();
        assert!(r.pass && r.max_residual < 1e-6);
    }

    #[test]
    fn closedness_rejects_region_touching_singularity() {
        let err = is_closed(&FieldOneForm::vortex(), Rect::new(-1.0, -1.0, 1.0, 1.0), 5, 1e-5, 1e-5)
            .unwrap_err();
        assert!(matches!(err, Error::SingularProximity { .. }));
        assert!(is_closed(&FieldOneForm::vortex(), Rect::new(0.5, 0.5, 1.0, 1.0), 1, 1e-5, 1e-5).is_err());
    }

    #[test]
    fn vortex_work_examples() {
        let f = FieldOneForm::vortex();
        let unit = PlanarPath::circle(Vec2::ZERO, 1.0, 1.0, 2000);
        assert!((work(&f, &unit, Rule::Simpson).unwrap() - TAU).abs() < 1e-8);
        let off = PlanarPath::circle(Vec2::new(2.0, 0.0), 0.3, 1.0, 2000);
        assert!(work(&f, &off, Rule::Simpson).unwrap().abs() < 1e-8);
        let twice_cw = PlanarPath::circle(Vec2::ZERO, 1.0, -2.0, 2000);
        assert!((work(&f, &twice_cw, Rule::Simpson).unwrap() + 4.0 * PI).abs() < 1e-7);
    }

    #[test]
    fn work_guard_near_singularity() {
        let f = FieldOneForm::vortex();
        let through = PlanarPath::polyline(vec![Vec2::new(-1.0, 0.0), Vec2::new(1.0, 0.0)], 2);
        assert!(matches!(
            work(&f, &through, Rule::Simpson),
            Err(Error::SingularProximity { .. })
        ));
    }

    #[test]
    fn eval_guard_radius() {
        let f = FieldOneForm::vortex();
        assert!(f.eval(Vec2::new(5e-10, 0.0)).is_err());
        assert!(f.eval(Vec2::new(2e-9, 0.0)).is_ok());
    }
}
