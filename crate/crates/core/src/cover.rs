//! Lifts to the universal cover `ℂ → ℂ∖{0}`, `w ↦ exp(w)`, and analytic
//! continuation of logarithm germs with sheet tracking.

use std::f64::consts::{PI, TAU};

use num_complex::Complex64;
use serde::Serialize;

use crate::dynamics::Trajectory;
use crate::error::{Error, Result};
use crate::fields::{accumulate_angle, PlanarPath, CLOSED_TOL, R_MIN};
use crate::geom::Vec2;

/// Tolerance on the integrality of a recovered sheet index.
pub const SHEET_TOL: f64 = 1e-6;
/// How far a path may start from the germ's anchor.
pub const ANCHOR_TOL: f64 = 1e-9;

/// A point `w = u + i v` of the cover over `exp(w)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LiftState {
    pub t: f64,
    /// `log r`
    pub u: f64,
    /// continuous angle
    pub v: f64,
}

impl LiftState {
    pub fn z(&self) -> Complex64 {
        Complex64::new(self.u, self.v).exp()
    }

    /// Projection to the plane, relative to the lift center.
    pub fn base(&self) -> Vec2 {
        let z = self.z();
        Vec2::new(z.re, z.im)
    }
}

/// Principal argument in `(−π, π]`.
pub fn principal_arg(z: Complex64) -> f64 {
    let a = z.im.atan2(z.re);
    if a == -PI {
        PI
    } else {
        a
    }
}

/// `round((v − Arg e^{u+iv}) / 2π)`, which must be an integer up to
/// [`SHEET_TOL`].
pub fn sheet_of(ls: &LiftState) -> Result<i64> {
    sheet_index(ls.v, principal_arg(ls.z()))
}

fn sheet_index(v: f64, arg: f64) -> Result<i64> {
    let x = (v - arg) / TAU;
    let n = x.round();
    let residual = (x - n).abs();
    if residual > SHEET_TOL {
        return Err(Error::NonIntegerSheet { residual });
    }
    Ok(n as i64)
}

/// `u = log r`, `v = θ_acc + 2π·initial_sheet` about the trajectory's first
/// center.
pub fn lift_trajectory(tr: &Trajectory, initial_sheet: i64) -> Vec<LiftState> {
    let samples: Vec<(f64, Vec2, f64)> = tr.states.iter().map(|s| (s.t, s.q, s.theta_acc[0])).collect();
    lift_samples(&samples, tr.centers[0], initial_sheet)
}

/// Lift of `(t, q, continuous angle)` samples about `center`.
pub fn lift_samples(samples: &[(f64, Vec2, f64)], center: Vec2, initial_sheet: i64) -> Vec<LiftState> {
    let shift = TAU * initial_sheet as f64;
    samples
        .iter()
        .map(|&(t, q, theta)| LiftState {
            t,
            u: (q - center).norm().ln(),
            v: theta + shift,
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CoverEnergy {
    /// `(t, Ẽ(t))`
    pub series: Vec<(f64, f64)>,
    /// `max |Ẽ(t) − Ẽ(0)|`
    pub max_drift: f64,
}

/// `Ẽ = T + Ṽ(w)` along a lift, for a global potential `Ṽ` on the cover.
pub fn cover_energy(tr: &Trajectory, lift: &[LiftState], potential: impl Fn(&LiftState) -> f64) -> Result<CoverEnergy> {
    if lift.len() != tr.states.len() {
        return Err(Error::invalid("lift and trajectory lengths differ"));
    }
    let series: Vec<(f64, f64)> = tr
        .states
        .iter()
        .zip(lift)
        .map(|(s, l)| (s.t, s.kinetic + potential(l)))
        .collect();
    let e0 = series.first().map_or(0.0, |p| p.1);
    let max_drift = series.iter().map(|p| (p.1 - e0).abs()).fold(0.0, f64::max);
    Ok(CoverEnergy { series, max_drift })
}

/// `Ṽ(w) = −Im w`, the global potential of the vortex on the cover.
pub fn vortex_cover_potential(l: &LiftState) -> f64 {
    -l.v
}

/// A germ of `log` at `anchor ≠ 0` on sheet `n`:
/// `log|z| + i(Arg z + 2πn)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LogGerm {
    pub anchor: Complex64,
    pub sheet: i64,
}

impl LogGerm {
    pub fn new(anchor: Complex64, sheet: i64) -> Result<LogGerm> {
        if !(anchor.re.is_finite() && anchor.im.is_finite()) || anchor.norm() < R_MIN {
            return Err(Error::invalid("log germ anchor must be finite and nonzero"));
        }
        Ok(LogGerm { anchor, sheet })
    }

    pub fn value(&self) -> Complex64 {
        Complex64::new(
            self.anchor.norm().ln(),
            principal_arg(self.anchor) + TAU * self.sheet as f64,
        )
    }

    fn point(&self) -> Vec2 {
        Vec2::new(self.anchor.re, self.anchor.im)
    }
}

/// Continues `g` along `path`, stepping the imaginary part by principal
/// angle increments (refined until each is small), and returns the germ at
/// the end point with its sheet recovered. A path that returns to its start
/// ends on the original anchor exactly.
pub fn continue_log(g: &LogGerm, path: &PlanarPath) -> Result<LogGerm> {
    let start = path.start()?;
    let gap = start.dist(g.point());
    if gap > ANCHOR_TOL {
        return Err(Error::invalid(format!(
            "path starts {gap:.3e} away from the germ anchor"
        )));
    }
    for p in path.sample_points()? {
        if p.norm() < R_MIN {
            return Err(Error::SingularProximity {
                point: p,
                singular: Vec2::ZERO,
                distance: p.norm(),
            });
        }
    }
    let swept = accumulate_angle(path, Vec2::ZERO)?;
    let end = path.end()?;
    let anchor = if end.dist(start) <= CLOSED_TOL {
        g.anchor
    } else {
        Complex64::new(end.x, end.y)
    };
    let im = principal_arg(g.anchor) + TAU * g.sheet as f64 + swept;
    let sheet = sheet_index(im, principal_arg(anchor))?;
    LogGerm::new(anchor, sheet)
}

/// Change of `log` after `n_loops` positive turns about the origin.
pub fn monodromy_log(n_loops: i64) -> Complex64 {
    Complex64::new(0.0, TAU * n_loops as f64)
}
