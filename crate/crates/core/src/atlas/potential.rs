use std::collections::HashMap;
use std::sync::{Arc, RwLock};

use crate::error::{Error, Result};
use crate::fields::{FieldOneForm, R_MIN};
use crate::geom::Vec2;
use crate::quad::adaptive_simpson;

use super::{Atlas, Chart, ChartId};

const SEGMENT_TOL: f64 = 1e-12;
// initial Simpson panel length along the basepoint segment
const PANEL_LEN: f64 = 1.0;

type RayCache = Arc<RwLock<HashMap<(u64, u64), f64>>>;

/// `V(q) = gauge − ∫_{basepoint → q} f` on one chart.
///
/// Integrals are memoized per query point; clones and gauge shifts share
/// the cache.
#[derive(Debug, Clone)]
pub struct LocalPotential {
    chart: Chart,
    field: Arc<FieldOneForm>,
    gauge: f64,
    cache: RayCache,
}

impl LocalPotential {
    pub fn new(field: Arc<FieldOneForm>, chart: Chart, gauge: f64) -> LocalPotential {
        LocalPotential {
            chart,
            field,
            gauge,
            cache: Arc::default(),
        }
    }

    pub fn chart(&self) -> &Chart {
        &self.chart
    }

    pub fn gauge(&self) -> f64 {
        self.gauge
    }

    pub fn with_offset(&self, a: f64) -> LocalPotential {
        LocalPotential {
            gauge: self.gauge + a,
            ..self.clone()
        }
    }

    /// `∫ f` along the straight segment from the basepoint to `q`.
    pub fn ray_integral(&self, q: Vec2) -> Result<f64> {
        if !self.chart.contains(q) {
            return Err(Error::OutsideChart {
                chart: self.chart.id,
                point: q,
            });
        }
        if self.chart.ray_clearance(q) < R_MIN {
            return Err(Error::StarShapeViolation {
                chart: self.chart.id,
                point: q,
            });
        }
        let key = (q.x.to_bits(), q.y.to_bits());
        if let Some(&v) = self.cache.read().expect("cache lock").get(&key) {
            return Ok(v);
        }
        let b = self.chart.basepoint;
        let d = q - b;
        let len = d.norm();
        let v = if len == 0.0 {
            0.0
        } else {
            let panels = (len / PANEL_LEN).ceil().max(1.0) as usize;
            adaptive_simpson(0.0, 1.0, panels, SEGMENT_TOL, |s| self.field.pair(b.lerp(q, s), d))?
        };
        self.cache.write().expect("cache lock").insert(key, v);
        Ok(v)
    }

    pub fn eval(&self, q: Vec2) -> Result<f64> {
        Ok(self.gauge - self.ray_integral(q)?)
    }

    /// Central-difference gradient of `V`.
    pub fn gradient_fd(&self, q: Vec2, h: f64) -> Result<Vec2> {
        let dx = (self.eval(q + Vec2::new(h, 0.0))? - self.eval(q - Vec2::new(h, 0.0))?) / (2.0 * h);
        let dy = (self.eval(q + Vec2::new(0.0, h))? - self.eval(q - Vec2::new(0.0, h))?) / (2.0 * h);
        Ok(Vec2::new(dx, dy))
    }
}

/// One local potential per chart of an atlas.
#[derive(Debug, Clone)]
pub struct PotentialSet {
    field: Arc<FieldOneForm>,
    potentials: Vec<LocalPotential>,
}

impl PotentialSet {
    /// Potentials with `V_i(basepoint_i) = 0`.
    pub fn build(field: &FieldOneForm, atlas: &Atlas) -> PotentialSet {
        Self::with_gauges(field, atlas, &vec![0.0; atlas.charts.len()]).expect("gauge count matches")
    }

    /// Potentials with `V_i(basepoint_i) = gauges[i]`.
    pub fn with_gauges(field: &FieldOneForm, atlas: &Atlas, gauges: &[f64]) -> Result<PotentialSet> {
        if gauges.len() != atlas.charts.len() {
            return Err(Error::invalid(format!(
                "expected {} gauges, got {}",
                atlas.charts.len(),
                gauges.len()
            )));
        }
        let field = Arc::new(field.clone());
        let potentials = atlas
            .charts
            .iter()
            .zip(gauges)
            .map(|(c, &g)| LocalPotential::new(field.clone(), c.clone(), g))
            .collect();
        Ok(PotentialSet { field, potentials })
    }

    pub fn field(&self) -> &FieldOneForm {
        &self.field
    }

    pub fn potentials(&self) -> &[LocalPotential] {
        &self.potentials
    }

    pub fn ids(&self) -> Vec<ChartId> {
        self.potentials.iter().map(|p| p.chart.id).collect()
    }

    pub fn get(&self, id: ChartId) -> Result<&LocalPotential> {
        self.potentials
            .iter()
            .find(|p| p.chart.id == id)
            .ok_or_else(|| Error::invalid(format!("no potential for chart {id}")))
    }

    pub fn eval(&self, id: ChartId, q: Vec2) -> Result<f64> {
        self.get(id)?.eval(q)
    }

    pub fn gauges(&self) -> Vec<f64> {
        self.potentials.iter().map(|p| p.gauge).collect()
    }

    /// `V_i ↦ V_i + a_i`; the underlying integrals are shared.
    pub fn gauge_shift(&self, a: &[f64]) -> Result<PotentialSet> {
        if a.len() != self.potentials.len() {
            return Err(Error::invalid(format!(
                "expected {} gauge offsets, got {}",
                self.potentials.len(),
                a.len()
            )));
        }
        Ok(PotentialSet {
            field: self.field.clone(),
            potentials: self.potentials.iter().zip(a).map(|(p, &ai)| p.with_offset(ai)).collect(),
        })
    }

    /// `max |∇V_i + f|` over the given points of chart `id`.
    pub fn gradient_residual(&self, id: ChartId, points: &[Vec2], h: f64) -> Result<f64> {
        let p = self.get(id)?;
        let mut worst = 0.0f64;
        for &q in points {
            let g = p.gradient_fd(q, h)?;
            let f = self.field.eval(q)?;
            worst = worst.max((g + f).norm());
        }
        Ok(worst)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_PI_4;

    #[test]
    fn vortex_potential_is_minus_angle() {
        let at = Atlas::quadrant();
        let f = Arc::new(FieldOneForm::vortex());
        let chart = at.chart(ChartId(1)).unwrap().clone();
        let raw = LocalPotential::new(f.clone(), chart.clone(), 0.0);
        // gauge chosen so V(1, 0) = 0
        let g = -raw.eval(Vec2::new(1.0, 0.0)).unwrap();
        let v = LocalPotential::new(f, chart, g);
        assert!(v.eval(Vec2::new(1.0, 0.0)).unwrap().abs() < 1e-15);
        // oracle: fixed-step Simpson along the segment (1,0) → (1,1)
        let n = 20_000;
        let h = 1.0 / n as f64;
        let g_at = |y: f64| 1.0 / (1.0 + y * y);
        let mut oracle = g_at(0.0) + g_at(1.0);
        for k in 1..n {
            oracle += if k % 2 == 1 { 4.0 } else { 2.0 } * g_at(k as f64 * h);
        }
        oracle *= h / 3.0;
        assert!((oracle - FRAC_PI_4).abs() < 1e-14);
        assert!((v.eval(Vec2::new(1.0, 1.0)).unwrap() + oracle).abs() < 1e-8);
    }

    #[test]
    fn value_at_basepoint_is_gauge() {
        let at = Atlas::quadrant();
        let ps = PotentialSet::with_gauges(&FieldOneForm::vortex(), &at, &[0.5, -1.0, 2.0, 3.25]).unwrap();
        for (c, g) in at.charts.iter().zip([0.5, -1.0, 2.0, 3.25]) {
            assert_eq!(ps.eval(c.id, c.basepoint).unwrap(), g);
        }
    }

    #[test]
    fn exact_field_potential() {
        let chart = Chart::new(ChartId(1), "plane", vec![], Vec2::new(1.0, 0.0), vec![]).unwrap();
        let at = Atlas::new(vec![chart]).unwrap();
        let ps = PotentialSet::with_gauges(&FieldOneForm::radial_exact(), &at, &[1.0]).unwrap();
        // antiderivative oracle: V = 1 − ((x² + y²) − 1)
        let v = ps.eval(ChartId(1), Vec2::new(2.0, 0.0)).unwrap();
        assert!((v + 2.0).abs() < 1e-9);
    }

    #[test]
    fn outside_chart_and_gauge_shift() {
        let at = Atlas::quadrant();
        let ps = PotentialSet::build(&FieldOneForm::vortex(), &at);
        assert!(matches!(
            ps.eval(ChartId(1), Vec2::new(-1.0, 1.0)),
            Err(Error::OutsideChart { .. })
        ));
        let q = Vec2::new(0.3, 1.7);
        let same = ps.gauge_shift(&[0.0; 4]).unwrap();
        assert_eq!(same.eval(ChartId(1), q).unwrap(), ps.eval(ChartId(1), q).unwrap());
        assert!(ps.gauge_shift(&[1.0; 3]).is_err());
    }

    #[test]
    fn gradient_matches_force_in_every_chart() {
        let at = Atlas::quadrant();
        let ps = PotentialSet::build(&FieldOneForm::vortex(), &at);
        let shifted = ps.gauge_shift(&[3.0, -2.0, 0.5, 7.0]).unwrap();
        for c in &at.charts {
            let pts: Vec<Vec2> = (1..=25)
                .map(|k| {
                    let s = k as f64 / 26.0;
                    Vec2::new(c.basepoint.x * (0.3 + 1.5 * s), c.basepoint.y * (1.6 - 1.2 * s))
                })
                .collect();
            assert!(ps.gradient_residual(c.id, &pts, 1e-5).unwrap() < 1e-5);
            assert!(shifted.gradient_residual(c.id, &pts, 1e-5).unwrap() < 1e-5);
        }
    }
}
