//! Transition functions `t_ij = exp(c_ij)` of the principal ℝ-bundle glued
//! from the overlap cocycle, cycle holonomies and the triviality test.
//!
//! Points of the total space are triples `(i, q, a)` with the fiber
//! identification `(i, q, a) ~ (j, q, t_ij·a)`.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::atlas::{exactness_test, Atlas, CechCocycle, ChartId, CyclePeriod, PERIOD_TOL};
use crate::error::{Error, Result};
use crate::geom::Vec2;

/// Largest `|c_ij|` whose exponential is representable.
pub const MAX_LOG_TRANSITION: f64 = 700.0;

/// For the record: the constants printed for the quadrant example give
/// `t_12 = exp(π)`. Their cycle product is 1, which cannot come from a field
/// with a nonzero period, so they are not used anywhere.
pub const PRINTED_QUADRANT_T12: f64 = 23.140_692_632_779_27;

#[derive(Debug, Clone)]
pub struct TransitionSystem {
    cocycle: CechCocycle,
    t: BTreeMap<(ChartId, ChartId), f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TransitionEntry {
    pub i: ChartId,
    pub j: ChartId,
    pub t: f64,
}

impl TransitionSystem {
    /// Exponentiates a cocycle entrywise.
    pub fn new(cc: &CechCocycle) -> Result<TransitionSystem> {
        cc.verify()?;
        let mut t = BTreeMap::new();
        for &i in cc.charts() {
            t.insert((i, i), 1.0);
        }
        for (i, j) in cc.edges() {
            let c = cc.c(i, j)?;
            if c.abs() > MAX_LOG_TRANSITION {
                return Err(Error::TransitionOverflow { i, j, c });
            }
            t.insert((i, j), c.exp());
            t.insert((j, i), (-c).exp());
        }
        let ts = TransitionSystem { cocycle: cc.clone(), t };
        ts.verify()?;
        Ok(ts)
    }

    pub fn cocycle(&self) -> &CechCocycle {
        &self.cocycle
    }

    pub fn charts(&self) -> &[ChartId] {
        self.cocycle.charts()
    }

    pub fn get(&self, i: ChartId, j: ChartId) -> Option<f64> {
        self.t.get(&(i, j)).copied()
    }

    pub fn t(&self, i: ChartId, j: ChartId) -> Result<f64> {
        self.get(i, j).ok_or(Error::MissingOverlap { i, j })
    }

    pub fn entries(&self) -> Vec<TransitionEntry> {
        self.t
            .iter()
            .filter(|((i, j), _)| i != j)
            .map(|(&(i, j), &t)| TransitionEntry { i, j, t })
            .collect()
    }

    /// `t_ii = 1`, `t_ij·t_ji = 1` and `t_ij·t_jk = t_ik` on triple overlaps.
    pub fn verify(&self) -> Result<()> {
        for &i in self.charts() {
            if self.get(i, i) != Some(1.0) {
                return Err(Error::invalid(format!("t_{i}{i} is not 1")));
            }
        }
        for (&(i, j), &t) in &self.t {
            let r = (t * self.t(j, i)? - 1.0).abs();
            if r > 1e-12 {
                return Err(Error::invalid(format!("t_{i}{j}·t_{j}{i} differs from 1 by {r:.3e}")));
            }
        }
        for &(i, j, k) in self.cocycle.triples() {
            let tik = self.t(i, k)?;
            let residual = ((self.t(i, j)? * self.t(j, k)? - tik) / tik).abs();
            if residual > 1e-9 {
                return Err(Error::TripleOverlap { i, j, k, residual });
            }
        }
        Ok(())
    }

    /// `log` of the ordered product of `t` along a closed chart cycle.
    pub fn log_holonomy(&self, cycle: &[ChartId]) -> Result<f64> {
        self.cocycle.cycle_sum(cycle)
    }

    /// Ordered product of `t` along a closed chart cycle, summed in the log
    /// domain and exponentiated once.
    pub fn holonomy(&self, cycle: &[ChartId]) -> Result<f64> {
        Ok(self.log_holonomy(cycle)?.exp())
    }

    /// Triviality via the additive exactness test. When trivial, the fiber
    /// gauges satisfy `t_ij = s_i / s_j`.
    pub fn is_trivial(&self) -> Result<TrivialityReport> {
        let ex = exactness_test(&self.cocycle)?;
        let witnesses = ex
            .periods
            .iter()
            .map(|CyclePeriod { cycle, period }| HolonomyWitness {
                cycle: cycle.clone(),
                holonomy: period.exp(),
                log_holonomy: *period,
            })
            .collect();
        Ok(TrivialityReport {
            trivial: ex.exact,
            tol: PERIOD_TOL,
            charts: ex.charts.clone(),
            fiber_gauges: ex.exact.then(|| ex.offsets.iter().map(|a| a.exp()).collect()),
            witnesses,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HolonomyWitness {
    pub cycle: Vec<ChartId>,
    pub holonomy: f64,
    pub log_holonomy: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrivialityReport {
    pub trivial: bool,
    pub tol: f64,
    pub charts: Vec<ChartId>,
    /// `s_i > 0` with `t_ij = s_i / s_j`, present when trivial.
    pub fiber_gauges: Option<Vec<f64>>,
    /// Holonomy of every independent nerve cycle.
    pub witnesses: Vec<HolonomyWitness>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BundlePoint {
    pub chart: ChartId,
    pub base: Vec2,
    pub fiber: f64,
}

/// Representative of `[(chart, q, fiber)]` in the lowest-id chart
/// containing `q`.
pub fn canonical_point(ts: &TransitionSystem, at: &Atlas, chart: ChartId, q: Vec2, fiber: f64) -> Result<BundlePoint> {
    if !at.chart(chart)?.contains(q) {
        return Err(Error::OutsideChart { chart, point: q });
    }
    let low = at.lowest_containing(q).ok_or(Error::OutsideAtlas { point: q })?;
    // (low, q, b) ~ (chart, q, t_{low,chart}·b)
    let fiber = if low == chart { fiber } else { ts.t(chart, low)? * fiber };
    Ok(BundlePoint {
        chart: low,
        base: q,
        fiber,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::atlas::{cocycle, PotentialSet, CONSTANCY_TOL};
    use crate::fields::FieldOneForm;
    use std::f64::consts::{PI, TAU};

    fn id(k: u32) -> ChartId {
        ChartId(k)
    }

    fn system(f: &FieldOneForm) -> (Atlas, TransitionSystem) {
        let at = Atlas::quadrant();
        let ps = PotentialSet::build(f, &at);
        let cc = cocycle(&ps, &at, 32, CONSTANCY_TOL).unwrap();
        (at, TransitionSystem::new(&cc).unwrap())
    }

    const CYCLE: [ChartId; 5] = [ChartId(1), ChartId(2), ChartId(3), ChartId(4), ChartId(1)];

    #[test]
    fn zero_entry_is_one() {
        let cc = CechCocycle::from_edges(vec![id(1), id(2)], &[(id(1), id(2), 0.0)], vec![], 1e-7).unwrap();
        let ts = TransitionSystem::new(&cc).unwrap();
        assert_eq!(ts.t(id(1), id(2)).unwrap(), 1.0);
    }

    #[test]
    fn vortex_holonomy() {
        let (_, ts) = system(&FieldOneForm::vortex());
        let h = ts.holonomy(&CYCLE).unwrap();
        let oracle = (-TAU).exp();
        assert!((h / oracle - 1.0).abs() < 1e-9);
        assert!((h - 1.8674e-3).abs() < 1e-7);
        let rev: Vec<ChartId> = CYCLE.iter().rev().copied().collect();
        assert!((ts.holonomy(&rev).unwrap() / TAU.exp() - 1.0).abs() < 1e-9);
        let triv = ts.is_trivial().unwrap();
        assert!(!triv.trivial);
        assert_eq!(triv.witnesses[0].cycle, CYCLE.to_vec());
        assert!((triv.witnesses[0].holonomy / oracle - 1.0).abs() < 1e-9);
    }

    #[test]
    fn exact_field_is_trivial() {
        let (_, ts) = system(&FieldOneForm::radial_exact());
        assert!((ts.holonomy(&CYCLE).unwrap() - 1.0).abs() < 1e-9);
        let triv = ts.is_trivial().unwrap();
        assert!(triv.trivial);
        let s = triv.fiber_gauges.unwrap();
        for e in ts.entries() {
            let si = s[ts.charts().binary_search(&e.i).unwrap()];
            let sj = s[ts.charts().binary_search(&e.j).unwrap()];
            assert!((e.t - si / sj).abs() < 1e-9);
        }
    }

    #[test]
    fn single_chart_is_trivial() {
        let cc = CechCocycle::from_edges(vec![id(1)], &[], vec![], 1e-7).unwrap();
        let ts = TransitionSystem::new(&cc).unwrap();
        let r = ts.is_trivial().unwrap();
        assert!(r.trivial);
        assert!(r.witnesses.is_empty());
        assert_eq!(r.fiber_gauges, Some(vec![1.0]));
    }

    #[test]
    fn overflow_reported() {
        let cc = CechCocycle::from_edges(vec![id(1), id(2)], &[(id(1), id(2), 701.0)], vec![], 1e-7).unwrap();
        assert!(matches!(TransitionSystem::new(&cc), Err(Error::TransitionOverflow { .. })));
    }

    #[test]
    fn printed_constant_is_exp_pi() {
        assert!((PRINTED_QUADRANT_T12 - PI.exp()).abs() < 1e-12);
    }

    #[test]
    fn canonical_points() {
        let (at, ts) = system(&FieldOneForm::vortex());
        let inner = canonical_point(&ts, &at, id(3), Vec2::new(-1.0, -0.5), 2.0).unwrap();
        assert_eq!(inner, BundlePoint { chart: id(3), base: Vec2::new(-1.0, -0.5), fiber: 2.0 });
        let q = Vec2::new(0.0, 1.5);
        let p = canonical_point(&ts, &at, id(2), q, 3.0).unwrap();
        assert_eq!(p.chart, id(1));
        assert_eq!(p.fiber, ts.t(id(2), id(1)).unwrap() * 3.0);
        let again = canonical_point(&ts, &at, p.chart, p.base, p.fiber).unwrap();
        assert_eq!(again, p);
        // (1, q, a) and (2, q, t_12·a) are the same point
        let a = 0.75;
        let from1 = canonical_point(&ts, &at, id(1), q, a).unwrap();
        let from2 = canonical_point(&ts, &at, id(2), q, ts.t(id(1), id(2)).unwrap() * a).unwrap();
        assert!((from1.fiber - from2.fiber).abs() < 1e-15);
        assert!(canonical_point(&ts, &at, id(1), Vec2::new(-1.0, 1.0), 1.0).is_err());
    }
}
