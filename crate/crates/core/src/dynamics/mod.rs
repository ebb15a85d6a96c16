//! Newtonian motion under a force 1-form, integrated in global Cartesian
//! coordinates, with chart-local Hamiltonians used only for bookkeeping.

mod ledger;
mod sim;

use serde::{Deserialize, Serialize};

use crate::atlas::{Atlas, ChartId, PotentialSet};
use crate::error::{Error, Result};
use crate::fields::FieldOneForm;
use crate::geom::Vec2;

pub use ledger::{
    energy_ledger, polar_diagnostics, EnergyLedger, LoopCheck, PolarSample, SegmentDrift, TransitionCheck,
};
pub use sim::simulate;

/// Default closest approach to a singular point during simulation.
pub const DEFAULT_SIM_R_MIN: f64 = 1e-3;
/// Largest angle about a singular point that a single step may sweep.
pub const STEP_ANGLE_GUARD: f64 = std::f64::consts::FRAC_PI_2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Integrator {
    /// Kick-drift-kick Störmer-Verlet.
    Leapfrog,
    /// Classical fourth-order Runge-Kutta, used as a reference.
    #[serde(alias = "rk4-reference")]
    Rk4,
}

impl std::str::FromStr for Integrator {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Integrator, String> {
        match s {
            "leapfrog" | "verlet" => Ok(Integrator::Leapfrog),
            "rk4" | "rk4-reference" => Ok(Integrator::Rk4),
            _ => Err(format!("unknown integrator `{s}` (leapfrog, rk4)")),
        }
    }
}

#[derive(Debug, Clone)]
pub struct SimConfig {
    pub m: f64,
    pub q0: Vec2,
    pub p0: Vec2,
    pub h: f64,
    /// Total time.
    pub t_end: f64,
    pub r_min: f64,
    pub integrator: Integrator,
    pub field: FieldOneForm,
    pub atlas: Atlas,
}

impl SimConfig {
    /// The vortex benchmark: `m = 1`, `q0 = (1, 0)`, `p0 = (0, 1)`,
    /// `h = 1e-3`, `T = 5`, leapfrog.
    pub fn new(field: FieldOneForm, atlas: Atlas) -> SimConfig {
        SimConfig {
            m: 1.0,
            q0: Vec2::new(1.0, 0.0),
            p0: Vec2::new(0.0, 1.0),
            h: 1e-3,
            t_end: 5.0,
            r_min: DEFAULT_SIM_R_MIN,
            integrator: Integrator::Leapfrog,
            field,
            atlas,
        }
    }

    pub fn steps(&self) -> usize {
        (self.t_end / self.h).round() as usize
    }

    pub fn validate(&self) -> Result<()> {
        let positive = |v: f64, what: &str| {
            if v > 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(Error::invalid(format!("{what} must be positive and finite, got {v}")))
            }
        };
        positive(self.m, "mass")?;
        positive(self.h, "step")?;
        positive(self.t_end, "total time")?;
        positive(self.r_min, "r_min")?;
        if !(self.q0.x.is_finite() && self.q0.y.is_finite() && self.p0.x.is_finite() && self.p0.y.is_finite()) {
            return Err(Error::invalid("initial state must be finite"));
        }
        if self.atlas.lowest_containing(self.q0).is_none() {
            return Err(Error::OutsideAtlas { point: self.q0 });
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimState {
    pub t: f64,
    pub q: Vec2,
    pub p: Vec2,
    pub chart: ChartId,
    /// Continuous angle about each tracked center.
    pub theta_acc: Vec<f64>,
    /// Local potential `V_chart(q)`.
    pub v: f64,
    pub kinetic: f64,
    pub e_local: f64,
    /// `m (x ẏ − y ẋ)` about the first center.
    pub p_theta: f64,
    /// `∫ f` along the logged polyline so far.
    pub work: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Transition {
    pub t: f64,
    pub from: ChartId,
    pub to: ChartId,
    pub q: Vec2,
    /// `V_to(q) − V_from(q)`.
    pub delta_e: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "status", rename_all = "kebab-case")]
pub enum SimStatus {
    Completed,
    Aborted { reason: String, numeric: bool },
}

#[derive(Debug, Clone, Serialize)]
pub struct Trajectory {
    pub m: f64,
    pub h: f64,
    pub integrator: Integrator,
    /// Angle centers: the field's singular points, or the origin if none.
    pub centers: Vec<Vec2>,
    pub states: Vec<SimState>,
    pub transitions: Vec<Transition>,
    pub status: SimStatus,
}

impl Trajectory {
    pub fn completed(&self) -> bool {
        self.status == SimStatus::Completed
    }

    pub fn first(&self) -> Option<&SimState> {
        self.states.first()
    }

    pub fn last(&self) -> Option<&SimState> {
        self.states.last()
    }

    pub fn positions(&self) -> Vec<Vec2> {
        self.states.iter().map(|s| s.q).collect()
    }
}

/// `H_i(q, p) = |p|²/2m + V_i(q)`.
pub fn hamiltonian(ps: &PotentialSet, i: ChartId, q: Vec2, p: Vec2, m: f64) -> Result<f64> {
    Ok(kinetic(p, m) + ps.eval(i, q)?)
}

/// `L_i(q, q̇) = (m/2)|q̇|² − V_i(q)`.
pub fn lagrangian(ps: &PotentialSet, i: ChartId, q: Vec2, qdot: Vec2, m: f64) -> Result<f64> {
    Ok(0.5 * m * qdot.norm_sq() - ps.eval(i, q)?)
}

pub fn kinetic(p: Vec2, m: f64) -> f64 {
    p.norm_sq() / (2.0 * m)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LegendreCheck {
    pub lagrangian: f64,
    pub hamiltonian: f64,
    /// `|p·q̇ − L − H|` with `p = m q̇`.
    pub residual: f64,
}

pub fn legendre_check(ps: &PotentialSet, i: ChartId, q: Vec2, qdot: Vec2, m: f64) -> Result<LegendreCheck> {
    let p = qdot * m;
    let l = lagrangian(ps, i, q, qdot, m)?;
    let h = hamiltonian(ps, i, q, p, m)?;
    Ok(LegendreCheck {
        lagrangian: l,
        hamiltonian: h,
        residual: (p.dot(qdot) - l - h).abs(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn setup() -> PotentialSet {
        PotentialSet::build(&FieldOneForm::vortex(), &Atlas::quadrant())
    }

    #[test]
    fn hamiltonian_examples() {
        let ps = setup();
        let c1 = ChartId(1);
        assert_eq!(hamiltonian(&ps, c1, Vec2::new(1.0, 1.0), Vec2::ZERO, 1.0).unwrap(), 0.0);
        // gauge making V_1(1, 0) = 0
        let g = -ps.eval(c1, Vec2::new(1.0, 0.0)).unwrap();
        let shifted = ps.gauge_shift(&[g, 0.0, 0.0, 0.0]).unwrap();
        let h = hamiltonian(&shifted, c1, Vec2::new(1.0, 0.0), Vec2::new(0.0, 1.0), 1.0).unwrap();
        assert!((h - 0.5).abs() < 1e-15);
        let p = Vec2::new(0.3, -1.7);
        assert_eq!(kinetic(p * 2.0, 1.3), 4.0 * kinetic(p, 1.3));
        assert!(hamiltonian(&ps, c1, Vec2::new(-1.0, 0.5), p, 1.0).is_err());
    }

    #[test]
    fn legendre_examples() {
        let ps = setup();
        let c1 = ChartId(1);
        let r = legendre_check(&ps, c1, Vec2::new(0.4, 1.3), Vec2::new(-0.7, 2.1), 1.7).unwrap();
        assert!(r.residual < 1e-12);
        let q = Vec2::new(0.5, 0.25);
        let r0 = legendre_check(&ps, c1, q, Vec2::ZERO, 1.0).unwrap();
        let v = ps.eval(c1, q).unwrap();
        assert_eq!(r0.lagrangian, -v);
        assert_eq!(r0.hamiltonian, v);
        assert_eq!(r0.residual, 0.0);
        let l = lagrangian(&ps, c1, Vec2::new(1.0, 1.0), Vec2::new(1.0, 1.0), 2.0).unwrap();
        assert_eq!(l, 2.0);
    }

    #[test]
    fn integrator_names() {
        assert_eq!("rk4-reference".parse::<Integrator>().unwrap(), Integrator::Rk4);
        assert_eq!("leapfrog".parse::<Integrator>().unwrap(), Integrator::Leapfrog);
        assert!("euler".parse::<Integrator>().is_err());
        let i: Integrator = serde_json::from_str("\"rk4-reference\"").unwrap();
        assert_eq!(i, Integrator::Rk4);
    }
}
