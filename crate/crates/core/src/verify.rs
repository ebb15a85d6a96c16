//! The built-in vortex acceptance suite.
//!
//! Every criterion computes its figures of merit and compares them with a
//! fixed bound. Where possible the reference value comes from a second,
//! independent route (a different quadrature, a closed form, an integer
//! count) rather than from the code under test.

use std::f64::consts::TAU;
use std::time::Instant;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::atlas::{cocycle, exactness_test, Atlas, ChartId, ClassifyOptions, PotentialSet, CONSTANCY_TOL};
use crate::bundle::TransitionSystem;
use crate::cover::{continue_log, cover_energy, lift_trajectory, monodromy_log, sheet_of, vortex_cover_potential, LogGerm};
use crate::dynamics::{energy_ledger, polar_diagnostics, simulate, SimConfig, Trajectory};
use crate::error::{Error, Result};
use crate::fields::{is_closed, winding_number, work, FieldOneForm, PlanarPath, DEFAULT_SEGMENTS};
use crate::forms3::{self, FormValue, DEFAULT_H};
use crate::geom::Vec2;
use crate::quad::Rule;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub value: f64,
    /// Human-readable bound, e.g. `< 1e-7`.
    pub bound: String,
    pub pass: bool,
}

impl Check {
    fn below(name: impl Into<String>, value: f64, bound: f64) -> Check {
        Check {
            name: name.into(),
            value,
            bound: format!("< {bound:e}"),
            pass: value < bound,
        }
    }

    fn within(name: impl Into<String>, value: f64, lo: f64, hi: f64) -> Check {
        Check {
            name: name.into(),
            value,
            bound: format!("in [{lo}, {hi}]"),
            pass: (lo..=hi).contains(&value),
        }
    }

    fn holds(name: impl Into<String>, ok: bool) -> Check {
        Check {
            name: name.into(),
            value: if ok { 1.0 } else { 0.0 },
            bound: "true".into(),
            pass: ok,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CriterionResult {
    pub id: u8,
    pub name: &'static str,
    pub pass: bool,
    pub checks: Vec<Check>,
    /// Wall-clock seconds; absent in deterministic reports.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seconds: Option<f64>,
}

impl CriterionResult {
    fn new(id: u8, name: &'static str, checks: Vec<Check>) -> CriterionResult {
        CriterionResult {
            id,
            name,
            pass: checks.iter().all(|c| c.pass),
            checks,
            seconds: None,
        }
    }

    fn failed(id: u8, name: &'static str, e: &Error) -> CriterionResult {
        CriterionResult::new(id, name, vec![Check {
            name: format!("error: {e}"),
            value: f64::NAN,
            bound: "no error".into(),
            pass: false,
        }])
    }

    /// `PASS`/`FAIL` summary line.
    pub fn line(&self) -> String {
        let failing: Vec<&str> = self.checks.iter().filter(|c| !c.pass).map(|c| c.name.as_str()).collect();
        let mut s = format!(
            "{} criterion {:>2} {}",
            if self.pass { "PASS" } else { "FAIL" },
            self.id,
            self.name
        );
        if !failing.is_empty() {
            s.push_str(&format!(" (failing: {})", failing.join(", ")));
        }
        s
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerifyReport {
    pub pass: bool,
    pub criteria: Vec<CriterionResult>,
}

impl VerifyReport {
    pub fn table(&self) -> String {
        let mut out = String::new();
        for c in &self.criteria {
            out.push_str(&c.line());
            out.push('\n');
            for k in &c.checks {
                out.push_str(&format!(
                    "    [{}] {}: {:e} {}\n",
                    if k.pass { "ok" } else { "xx" },
                    k.name,
                    k.value,
                    k.bound
                ));
            }
        }
        out
    }
}

pub const CRITERIA: [(u8, &str); 10] = [
    (1, "work-winding law"),
    (2, "closedness"),
    (3, "cocycle identities"),
    (4, "bundle holonomy"),
    (5, "angular-momentum law"),
    (6, "local-vs-global energy"),
    (7, "cover conservation"),
    (8, "log monodromy"),
    (9, "forms identities"),
    (10, "determinism"),
];

/// Shared state so that criteria reuse the same benchmark runs.
#[derive(Default)]
pub struct Suite {
    vortex: Option<(Atlas, PotentialSet)>,
    runs: Vec<(u64, Trajectory)>,
}

impl Suite {
    pub fn new() -> Suite {
        Suite::default()
    }

    fn vortex(&mut self) -> &(Atlas, PotentialSet) {
        self.vortex.get_or_insert_with(|| {
            let at = Atlas::quadrant();
            let ps = PotentialSet::build(&FieldOneForm::vortex(), &at);
            (at, ps)
        })
    }

    /// Leapfrog vortex benchmark at step `h`.
    fn benchmark(&mut self, h: f64) -> Result<Trajectory> {
        if let Some((_, tr)) = self.runs.iter().find(|(k, _)| *k == h.to_bits()) {
            return Ok(tr.clone());
        }
        let (at, ps) = self.vortex().clone();
        let mut cfg = SimConfig::new(FieldOneForm::vortex(), at);
        cfg.h = h;
        let tr = simulate(&cfg, &ps)?;
        if !tr.completed() {
            return Err(Error::invalid(format!("benchmark run aborted: {:?}", tr.status)));
        }
        self.runs.push((h.to_bits(), tr.clone()));
        Ok(tr)
    }

    pub fn run(&mut self, id: u8) -> CriterionResult {
        let name = CRITERIA.iter().find(|c| c.0 == id).map_or("unknown", |c| c.1);
        let r = match id {
            1 => criterion_work_winding(),
            2 => criterion_closedness(),
            3 => self.criterion_cocycle(),
            4 => self.criterion_bundle(),
            5 => self.criterion_angular_momentum(),
            6 => self.criterion_local_energy(),
            7 => self.criterion_cover(),
            8 => criterion_monodromy(),
            9 => criterion_forms(),
            10 => criterion_determinism(),
            _ => Err(Error::invalid(format!("no criterion {id}"))),
        };
        match r {
            Ok(checks) => CriterionResult::new(id, name, checks),
            Err(e) => CriterionResult::failed(id, name, &e),
        }
    }

    fn criterion_cocycle(&mut self) -> Result<Vec<Check>> {
        let (at, ps) = self.vortex().clone();
        let cc = cocycle(&ps, &at, 32, CONSTANCY_TOL)?;
        let ids = cc.charts().to_vec();
        let mut diag = true;
        let mut antisym = true;
        for &i in &ids {
            diag &= cc.c(i, i)? == 0.0;
            for &j in &ids {
                if let (Some(a), Some(b)) = (cc.get(i, j), cc.get(j, i)) {
                    antisym &= a == -b;
                }
            }
        }
        let cycle = quad_cycle();
        let sum = cc.cycle_sum(&cycle)?;
        // the nerve cycle runs clockwise around the origin
        let loop_work = work(
            &FieldOneForm::vortex(),
            &PlanarPath::circle(Vec2::ZERO, 1.0, 1.0, DEFAULT_SEGMENTS),
            Rule::Gauss(8),
        )?;
        let ex = exactness_test(&cc)?;

        let gauges = [0.3, -1.1, 2.0, 0.7];
        let exact = FieldOneForm::radial_exact();
        let eps = PotentialSet::with_gauges(&exact, &at, &gauges)?;
        let ecc = cocycle(&eps, &at, 32, CONSTANCY_TOL)?;
        let eex = exactness_test(&ecc)?;
        // offsets equal the gauges up to one additive constant
        let shift = gauges[0] - eex.offsets[0];
        let offset_err = eex
            .offsets
            .iter()
            .zip(gauges)
            .map(|(a, g)| (a + shift - g).abs())
            .fold(0.0, f64::max);

        Ok(vec![
            Check::holds("c_ii = 0 exactly", diag),
            Check::holds("c_ij = -c_ji exactly", antisym),
            Check::below("max constancy spread (32 samples)", cc.max_spread(), 1e-7),
            Check::below("|cycle sum + 2pi|", (sum + TAU).abs(), 1e-6),
            Check::below("|cycle sum - (-loop work)|", (sum + loop_work).abs(), 1e-6),
            Check::holds("vortex reported non-exact", !ex.exact),
            Check::holds("2x dx + 2y dy reported exact", eex.exact),
            Check::below("recovered offsets vs gauges", offset_err, 1e-9),
        ])
    }

    fn criterion_bundle(&mut self) -> Result<Vec<Check>> {
        let (at, ps) = self.vortex().clone();
        let ts = TransitionSystem::new(&cocycle(&ps, &at, 32, CONSTANCY_TOL)?)?;
        let hol = ts.holonomy(&quad_cycle())?;
        let expect = (-TAU).exp();
        let triv = ts.is_trivial()?;

        let gauges = [0.3, -1.1, 2.0, 0.7];
        let eps = PotentialSet::with_gauges(&FieldOneForm::radial_exact(), &at, &gauges)?;
        let ets = TransitionSystem::new(&cocycle(&eps, &at, 32, CONSTANCY_TOL)?)?;
        let etriv = ets.is_trivial()?;
        let mut gauge_err = f64::INFINITY;
        if let Some(s) = &etriv.fiber_gauges {
            gauge_err = 0.0;
            for e in ets.entries() {
                let i = etriv.charts.iter().position(|&c| c == e.i).expect("chart");
                let j = etriv.charts.iter().position(|&c| c == e.j).expect("chart");
                gauge_err = gauge_err.max((e.t - s[i] / s[j]).abs() / e.t);
            }
        }
        Ok(vec![
            Check::below("holonomy (1,2,3,4,1) vs exp(-2pi), relative", (hol - expect).abs() / expect, 1e-9),
            Check::holds("vortex bundle non-trivial", !triv.trivial),
            Check::holds("exact control trivial", etriv.trivial),
            Check::below("t_ij vs s_i/s_j, relative", gauge_err, 1e-9),
        ])
    }

    fn criterion_angular_momentum(&mut self) -> Result<Vec<Check>> {
        let err = |tr: &Trajectory| {
            let pol = polar_diagnostics(tr);
            let p0 = pol[0].p_theta;
            pol.iter().map(|s| (s.p_theta - p0 - s.t).abs()).fold(0.0, f64::max)
        };
        let e1 = err(&self.benchmark(1e-3)?);
        let e2 = err(&self.benchmark(5e-4)?);
        Ok(vec![
            Check::below("max |p_theta(t) - p_theta(0) - t| at h = 1e-3", e1, 1e-4),
            Check::within("error ratio h = 1e-3 over h = 5e-4", e1 / e2, 3.0, 5.0),
        ])
    }

    fn criterion_local_energy(&mut self) -> Result<Vec<Check>> {
        let tr = self.benchmark(1e-3)?;
        let (at, ps) = self.vortex().clone();
        let cc = cocycle(&ps, &at, 32, CONSTANCY_TOL)?;
        let led = energy_ledger(&tr, &FieldOneForm::vortex(), &cc, 1e-6)?;
        let t0 = tr.states[0].kinetic;
        let work_gap = tr
            .states
            .iter()
            .map(|s| (s.kinetic - t0 - s.work).abs())
            .fold(0.0, f64::max);
        Ok(vec![
            Check::below("max per-segment drift of E_local", led.max_segment_drift, 1e-5),
            Check::below("max |dE + c_ij| over transitions", led.max_transition_residual, 1e-9),
            Check::holds("trajectory changes chart", !led.transitions.is_empty()),
            Check::below("max |T(t) - T(0) - work(t)|", work_gap, 1e-5),
        ])
    }

    fn criterion_cover(&mut self) -> Result<Vec<Check>> {
        let drift = |tr: &Trajectory| -> Result<f64> {
            Ok(cover_energy(tr, &lift_trajectory(tr, 0), vortex_cover_potential)?.max_drift)
        };
        let d1 = drift(&self.benchmark(1e-3)?)?;
        let d2 = drift(&self.benchmark(2e-3)?)?;

        let cfg = trapped_vortex_orbit(CLOSED_ORBIT_STEPS)?;
        let ps = PotentialSet::build(&cfg.field, &cfg.atlas);
        let tr = simulate(&cfg, &ps)?;
        let lift = lift_trajectory(&tr, 0);
        let sheets = sheet_of(lift.last().expect("nonempty"))? - sheet_of(&lift[0])?;
        let mut loop_pts = tr.positions();
        loop_pts.push(loop_pts[0]);
        let n = loop_pts.len();
        let w = winding_number(&PlanarPath::polyline(loop_pts, n), Vec2::ZERO)?;
        Ok(vec![
            Check::below("max |E~(t) - E~(0)| at h = 1e-3", d1, 1e-4),
            Check::within("drift ratio h = 2e-3 over h = 1e-3", d2 / d1, 3.0, 5.0),
            Check::holds(
                format!("sheet change {sheets} equals winding {} of a closed orbit", w.n),
                sheets == w.n && w.n != 0,
            ),
        ])
    }
}

fn quad_cycle() -> Vec<ChartId> {
    [1, 2, 3, 4, 1].map(ChartId).to_vec()
}

fn criterion_work_winding() -> Result<Vec<Check>> {
    let f = FieldOneForm::vortex();
    let mut circle_err = 0.0f64;
    let mut poly_err = 0.0f64;
    let mut counts = true;
    for n in -2i64..=2 {
        let expect = TAU * n as f64;
        // n = 0 loops sit away from the origin
        let (center, turns) = if n == 0 { (Vec2::new(3.0, 0.0), 1.0) } else { (Vec2::ZERO, n as f64) };
        let c = PlanarPath::circle(center, 1.5, turns, DEFAULT_SEGMENTS);
        circle_err = circle_err.max((work(&f, &c, Rule::Simpson)? - expect).abs());
        counts &= winding_number(&c, Vec2::ZERO)?.n == n;

        let sq = [(1.0, -1.0), (1.0, 1.0), (-1.0, 1.0), (-1.0, -1.0)];
        let (off, reps) = if n == 0 { (3.0, 1) } else { (0.0, n.unsigned_abs() as usize) };
        let mut v = vec![Vec2::new(1.0 + off, -1.0)];
        for _ in 0..reps {
            for &(x, y) in sq.iter().skip(1).chain(&sq[..1]) {
                v.push(Vec2::new(x + off, y));
            }
        }
        if n < 0 {
            v.reverse();
        }
        let p = PlanarPath::polyline(v, DEFAULT_SEGMENTS * reps);
        poly_err = poly_err.max((work(&f, &p, Rule::Simpson)? - expect).abs());
        counts &= winding_number(&p, Vec2::ZERO)?.n == n;
    }
    Ok(vec![
        Check::below("max |work - 2 pi n| over circles", circle_err, 1e-7),
        Check::below("max |work - 2 pi n| over polylines", poly_err, 1e-7),
        Check::holds("winding numbers equal n", counts),
    ])
}

fn criterion_closedness() -> Result<Vec<Check>> {
    let opts = ClassifyOptions::default();
    let mut vortex = 0.0f64;
    let mut control = 0.0f64;
    for r in &opts.regions {
        vortex = vortex.max(is_closed(&FieldOneForm::vortex(), *r, opts.grid, opts.h, opts.tol)?.max_residual);
        control = control.max(is_closed(&FieldOneForm::x_dy(), *r, opts.grid, opts.h, opts.tol)?.max_residual);
    }
    Ok(vec![
        Check::below("vortex max |d f| on 20x20 grids", vortex, 1e-5),
        Check::below("x dy control |residual - 1|", (control - 1.0).abs(), 1e-6),
    ])
}

fn criterion_monodromy() -> Result<Vec<Check>> {
    let g = LogGerm::new(Complex64::new(1.0, 0.0), 0)?;
    let mut exact = true;
    for n in -2i64..=2 {
        let c = continue_log(&g, &PlanarPath::circle(Vec2::ZERO, 1.0, n as f64, 64))?;
        exact &= c.sheet == n && c.anchor == g.anchor && c.value() - g.value() == monodromy_log(n);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0008);
    let mut sheets_equal = true;
    let mut value_gap = 0.0f64;
    for _ in 0..100 {
        let a = random_polygon(&mut rng, Vec2::new(1.0, 0.0), 5);
        let b = random_polygon(&mut rng, a.end()?, 5);
        let g0 = LogGerm::new(Complex64::new(1.0, 0.0), rng.gen_range(-2..=2))?;
        let stepwise = continue_log(&continue_log(&g0, &a)?, &b)?;
        let joined = continue_log(&g0, &a.then(&b))?;
        sheets_equal &= stepwise.sheet == joined.sheet;
        value_gap = value_gap.max((stepwise.value() - joined.value()).norm());
    }
    Ok(vec![
        Check::holds("n loops shift value by 2 pi i n and sheet by n exactly", exact),
        Check::holds("groupoid: equal sheets on 100 paths", sheets_equal),
        Check::below("groupoid: max value gap", value_gap, 1e-9),
    ])
}

/// Polygon from `start` whose vertices turn by less than `π/2` about the
/// origin, so no edge comes near it.
pub fn random_polygon(rng: &mut impl Rng, start: Vec2, edges: usize) -> PlanarPath {
    let mut v = vec![start];
    let mut theta = start.arg();
    for _ in 0..edges {
        theta += rng.gen_range(-1.2..1.2);
        let r = rng.gen_range(0.5..3.0);
        v.push(Vec2::new(r * theta.cos(), r * theta.sin()));
    }
    PlanarPath::polyline(v, 8 * edges)
}

fn criterion_forms() -> Result<Vec<Check>> {
    // ⋆e_I = σ e_{I^c} with σ fixed by e_I ∧ ⋆e_I = dx∧dy∧dz
    let mut table_exact = true;
    for degree in 0..=3 {
        for &m in forms3::basis(degree) {
            let comp = 7 ^ m;
            let mut expect = FormValue::zero(3 - degree);
            let idx = forms3::basis(3 - degree).iter().position(|&b| b == comp).expect("basis");
            expect.coeffs[idx] = forms3::wedge_sign(m, comp);
            table_exact &= FormValue::basis_element(m).hodge() == expect;
        }
    }
    let r = forms3::identity_residuals(100, 0x5eed_0009, DEFAULT_H)?;
    Ok(vec![
        Check::holds("star table matches e_I ^ *e_I = vol", table_exact),
        Check::holds("** = id exactly", r.star_star_max == 0.0),
        Check::below("cross product via forms", r.cross_product_max, 1e-12),
        Check::below("scalar product via forms", r.scalar_product_max, 1e-12),
        Check::below("curl grad (bound 10 h)", r.curl_grad_max, 10.0 * DEFAULT_H),
        Check::below("div curl (bound 10 h)", r.div_curl_max, 10.0 * DEFAULT_H),
    ])
}

/// Recomputes the analytic criteria in a fresh suite and compares their
/// serialized form byte for byte.
fn criterion_determinism() -> Result<Vec<Check>> {
    let once = || -> Result<String> {
        let mut s = Suite::new();
        let rs: Vec<CriterionResult> = [1, 2, 3, 4, 8, 9].iter().map(|&i| s.run(i)).collect();
        serde_json::to_string(&rs).map_err(|e| Error::invalid(e.to_string()))
    };
    let a = once()?;
    let b = once()?;
    Ok(vec![Check::holds("repeat run is byte-identical", a == b)])
}

/// Runs every criterion in order.
pub fn run_all(timed: bool) -> VerifyReport {
    let mut suite = Suite::new();
    let criteria: Vec<CriterionResult> = CRITERIA
        .iter()
        .map(|&(id, _)| {
            let t = Instant::now();
            let mut r = suite.run(id);
            if timed {
                r.seconds = Some(t.elapsed().as_secs_f64());
            }
            r
        })
        .collect();
    VerifyReport {
        pass: criteria.iter().all(|c| c.pass),
        criteria,
    }
}

/// Steps used for the closed orbit in the cover check.
pub const CLOSED_ORBIT_STEPS: usize = 20_000;

/// The vortex plus the exact trap `−10 (x dx + y dy)`. The trap adds
/// nothing to loop integrals but admits orbits that close after one turn.
pub fn trapped_vortex() -> FieldOneForm {
    FieldOneForm::parse(
        "trapped vortex",
        "-y/(x^2+y^2) - 10*x",
        "x/(x^2+y^2) - 10*y",
        vec![Vec2::ZERO],
    )
    .expect("valid expressions")
}

/// Leapfrog end point after `n` steps of size `t/n` from `(1, 0)` with
/// momentum `(0, p_y)`. Same arithmetic as `simulate`, without the
/// bookkeeping.
fn shoot(f: &FieldOneForm, py: f64, t: f64, n: usize) -> Result<Vec2> {
    let h = t / n as f64;
    let q0 = Vec2::new(1.0, 0.0);
    let (mut q, mut p) = (q0, Vec2::new(0.0, py));
    let mut force = f.eval(q)?;
    for _ in 0..n {
        let p_half = p + force * (0.5 * h);
        q = q + p_half * h;
        force = f.eval(q)?;
        p = p_half + force * (0.5 * h);
    }
    Ok(q - q0)
}

/// A discrete orbit of [`trapped_vortex`] that returns to `(1, 0)` after
/// `n` leapfrog steps, winding once about the origin. Found by Newton on
/// `(p_y, T)` from a coarse continuous-time solution.
pub fn trapped_vortex_orbit(n: usize) -> Result<SimConfig> {
    let f = trapped_vortex();
    let (mut py, mut t) = (-2.630_233_277, 6.786_948_296);
    for _ in 0..8 {
        let r = shoot(&f, py, t, n)?;
        if r.norm() < 1e-11 {
            break;
        }
        let e = 1e-7;
        let a = (shoot(&f, py + e, t, n)? - r) * (1.0 / e);
        let b = (shoot(&f, py, t + e, n)? - r) * (1.0 / e);
        let det = a.cross(b);
        py -= r.cross(b) / det;
        t -= a.cross(r) / det;
    }
    let mut cfg = SimConfig::new(f, Atlas::quadrant());
    cfg.p0 = Vec2::new(0.0, py);
    cfg.t_end = t;
    cfg.h = t / n as f64;
    Ok(cfg)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn analytic_criteria_pass() {
        let mut s = Suite::new();
        for id in [1, 2, 3, 4, 8, 9] {
            let r = s.run(id);
            assert!(r.pass, "{}", r.line());
        }
    }

    #[test]
    fn closed_orbit_returns() {
        let cfg = trapped_vortex_orbit(CLOSED_ORBIT_STEPS).unwrap();
        let r = shoot(&cfg.field, cfg.p0.y, cfg.t_end, CLOSED_ORBIT_STEPS).unwrap();
        assert!(r.norm() < 1e-10, "{r:?}");
    }

    #[test]
    fn line_format() {
        let r = CriterionResult::new(3, "x", vec![Check::below("a", 2.0, 1.0), Check::below("b", 0.0, 1.0)]);
        assert_eq!(r.line(), "FAIL criterion  3 x (failing: a)");
    }
}
