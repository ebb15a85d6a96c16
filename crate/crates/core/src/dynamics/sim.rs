use crate::atlas::{Atlas, Chart, ChartId, PotentialSet, CHART_EPS};
use crate::error::{Error, Result};
use crate::fields::FieldOneForm;
use crate::geom::{angle_step, Vec2};
use crate::quad::{integrate, Rule};

use super::{kinetic, Integrator, SimConfig, SimState, SimStatus, Trajectory, Transition, STEP_ANGLE_GUARD};

/// Integrates `q̇ = p/m`, `ṗ = f♯(q)` with a fixed step and tracks the
/// chart, the continuous angle and the energy bookkeeping along the way.
///
/// Numeric trouble (singularity approach, step-angle guard, evaluation
/// failures) ends the run early with an `Aborted` status; the states up to
/// that point are kept.
pub fn simulate(cfg: &SimConfig, ps: &PotentialSet) -> Result<Trajectory> {
    cfg.validate()?;
    let f = &cfg.field;
    let guarded = !f.singular_points.is_empty();
    let centers = if guarded { f.singular_points.clone() } else { vec![Vec2::ZERO] };
    let mut tr = Trajectory {
        m: cfg.m,
        h: cfg.h,
        integrator: cfg.integrator,
        centers: centers.clone(),
        states: Vec::new(),
        transitions: Vec::new(),
        status: SimStatus::Completed,
    };

    let abort = |tr: &mut Trajectory, e: Error| {
        tr.status = SimStatus::Aborted {
            reason: e.to_string(),
            numeric: e.is_numeric(),
        };
    };

    if let Err(e) = f.guard(cfg.q0, cfg.r_min) {
        // still log the starting point when it can be evaluated
        if let Ok(s0) = initial_state(cfg, ps, &centers) {
            tr.states.push(s0);
        }
        abort(&mut tr, e);
        return Ok(tr);
    }
    let s0 = initial_state(cfg, ps, &centers)?;
    tr.states.push(s0);

    let n = cfg.steps();
    let mut force = match f.eval(cfg.q0) {
        Ok(v) => v,
        Err(e) => {
            abort(&mut tr, e);
            return Ok(tr);
        }
    };
    for k in 1..=n {
        let prev = tr.states.last().expect("initial state").clone();
        let t = k as f64 * cfg.h;
        let stepped = match cfg.integrator {
            Integrator::Leapfrog => leapfrog(f, prev.q, prev.p, force, cfg.h, cfg.m),
            Integrator::Rk4 => rk4(f, prev.q, prev.p, cfg.h, cfg.m),
        };
        let (q, p, f1) = match stepped {
            Ok(v) => v,
            Err(e) => {
                abort(&mut tr, e);
                return Ok(tr);
            }
        };
        force = f1;
        match advance(cfg, ps, &centers, guarded, &prev, t, q, p) {
            Ok((state, hops)) => {
                tr.transitions.extend(hops);
                tr.states.push(state);
            }
            Err(e) => {
                abort(&mut tr, e);
                return Ok(tr);
            }
        }
    }
    Ok(tr)
}

fn initial_state(cfg: &SimConfig, ps: &PotentialSet, centers: &[Vec2]) -> Result<SimState> {
    let q = cfg.q0;
    let chart = cfg.atlas.lowest_containing(q).ok_or(Error::OutsideAtlas { point: q })?;
    let v = ps.eval(chart, q)?;
    let kin = kinetic(cfg.p0, cfg.m);
    Ok(SimState {
        t: 0.0,
        q,
        p: cfg.p0,
        chart,
        theta_acc: centers.iter().map(|&c| (q - c).arg()).collect(),
        v,
        kinetic: kin,
        e_local: kin + v,
        p_theta: (q - centers[0]).cross(cfg.p0),
        work: 0.0,
    })
}

fn leapfrog(f: &FieldOneForm, q: Vec2, p: Vec2, f0: Vec2, h: f64, m: f64) -> Result<(Vec2, Vec2, Vec2)> {
    let p_half = p + f0 * (0.5 * h);
    let q1 = q + p_half * (h / m);
    let f1 = f.eval(q1)?;
    Ok((q1, p_half + f1 * (0.5 * h), f1))
}

fn rk4(f: &FieldOneForm, q: Vec2, p: Vec2, h: f64, m: f64) -> Result<(Vec2, Vec2, Vec2)> {
    let k1q = p * (1.0 / m);
    let k1p = f.eval(q)?;
    let k2q = (p + k1p * (0.5 * h)) * (1.0 / m);
    let k2p = f.eval(q + k1q * (0.5 * h))?;
    let k3q = (p + k2p * (0.5 * h)) * (1.0 / m);
    let k3p = f.eval(q + k2q * (0.5 * h))?;
    let k4q = (p + k3p * h) * (1.0 / m);
    let k4p = f.eval(q + k3q * h)?;
    let q1 = q + (k1q + k2q * 2.0 + k3q * 2.0 + k4q) * (h / 6.0);
    let p1 = p + (k1p + k2p * 2.0 + k3p * 2.0 + k4p) * (h / 6.0);
    let f1 = f.eval(q1)?;
    Ok((q1, p1, f1))
}

#[allow(clippy::too_many_arguments)]
fn advance(
    cfg: &SimConfig,
    ps: &PotentialSet,
    centers: &[Vec2],
    guarded: bool,
    prev: &SimState,
    t: f64,
    q: Vec2,
    p: Vec2,
) -> Result<(SimState, Vec<Transition>)> {
    let f = &cfg.field;
    f.guard(q, cfg.r_min)?;
    let mut theta_acc = prev.theta_acc.clone();
    for (th, &c) in theta_acc.iter_mut().zip(centers) {
        let d = angle_step(prev.q, q, c);
        if guarded && d.abs() > STEP_ANGLE_GUARD {
            return Err(Error::StepAngleGuard { t, angle: d });
        }
        *th += d;
    }
    let chart = cfg.atlas.lowest_containing(q).ok_or(Error::OutsideAtlas { point: q })?;
    let hops = if chart == prev.chart {
        Vec::new()
    } else {
        crossings(&cfg.atlas, ps, prev.chart, chart, prev.q, q, t - cfg.h, cfg.h)?
    };
    let d = q - prev.q;
    let chord = integrate(Rule::Simpson, 0.0, 1.0, 2, |s| f.pair(prev.q.lerp(q, s), d))?;
    let v = ps.eval(chart, q)?;
    let kin = kinetic(p, cfg.m);
    let state = SimState {
        t,
        q,
        p,
        chart,
        theta_acc,
        v,
        kinetic: kin,
        e_local: kin + v,
        p_theta: (q - centers[0]).cross(p),
        work: prev.work + chord,
    };
    Ok((state, hops))
}

/// Parameter in `[0, 1]` where the segment `a → b` leaves the chart, with
/// the constraint responsible (`None` if it never does).
fn exit_param(chart: &Chart, a: Vec2, b: Vec2) -> (f64, Option<usize>) {
    let mut best = (1.0, None);
    for (k, h) in chart.constraints.iter().enumerate() {
        let sa = h.slack(a);
        let sb = h.slack(b);
        if sb < -CHART_EPS {
            let s = if sa <= 0.0 { 0.0 } else { (sa / (sa - sb)).clamp(0.0, 1.0) };
            if s < best.0 {
                best = (s, Some(k));
            }
        }
    }
    best
}

/// Chart hand-overs along one step, from `from` (containing `a`) to `to`
/// (the chart assigned at `b`), logged where the segment crosses chart
/// boundaries.
#[allow(clippy::too_many_arguments)]
fn crossings(
    at: &Atlas,
    ps: &PotentialSet,
    from: ChartId,
    to: ChartId,
    a: Vec2,
    b: Vec2,
    t0: f64,
    h: f64,
) -> Result<Vec<Transition>> {
    if at.chart(from)?.contains(b) {
        return Ok(vec![Transition {
            t: t0 + h,
            from,
            to,
            q: b,
            delta_e: ps.eval(to, b)? - ps.eval(from, b)?,
        }]);
    }
    let mut out = Vec::new();
    let mut cur = from;
    for _ in 0..at.charts.len() {
        let chart = at.chart(cur)?;
        let (s, k) = exit_param(chart, a, b);
        let mut x = a.lerp(b, s);
        if let Some(k) = k {
            x = chart.constraints[k].project(x);
        }
        let candidates: Vec<ChartId> = at.containing(x).into_iter().filter(|&c| c != cur).collect();
        let next = if candidates.contains(&to) {
            to
        } else {
            // the neighbour that carries the segment furthest
            let mut best: Option<(f64, ChartId)> = None;
            for &c in &candidates {
                let reach = exit_param(at.chart(c)?, x, b).0;
                if best.is_none_or(|(r, _)| reach > r) {
                    best = Some((reach, c));
                }
            }
            best.ok_or(Error::OutsideAtlas { point: x })?.1
        };
        out.push(Transition {
            t: t0 + s * h,
            from: cur,
            to: next,
            q: x,
            delta_e: ps.eval(next, x)? - ps.eval(cur, x)?,
        });
        if next == to {
            return Ok(out);
        }
        cur = next;
    }
    Err(Error::invalid(format!("could not route the chart change {from} → {to}")))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::atlas::{cocycle, CONSTANCY_TOL};

    fn vortex_run(h: f64, integrator: Integrator) -> (PotentialSet, Trajectory) {
        let at = Atlas::quadrant();
        let f = FieldOneForm::vortex();
        let ps = PotentialSet::build(&f, &at);
        let mut cfg = SimConfig::new(f, at);
        cfg.h = h;
        cfg.integrator = integrator;
        let tr = simulate(&cfg, &ps).unwrap();
        (ps, tr)
    }

    #[test]
    fn angular_momentum_grows_linearly() {
        let (_, tr) = vortex_run(1e-3, Integrator::Leapfrog);
        assert!(tr.completed());
        assert_eq!(tr.states.len(), 5001);
        let p0 = tr.states[0].p_theta;
        for s in &tr.states {
            assert!((s.p_theta - p0 - s.t).abs() < 1e-4);
        }
    }

    #[test]
    fn zero_field_is_free_motion() {
        let at = Atlas::single(Vec2::new(0.1, 0.2));
        let f = FieldOneForm::zero();
        let ps = PotentialSet::build(&f, &at);
        let mut cfg = SimConfig::new(f, at);
        cfg.q0 = Vec2::new(0.3, -0.4);
        cfg.p0 = Vec2::new(0.25, 0.5);
        cfg.m = 2.0;
        cfg.t_end = 1.0;
        let tr = simulate(&cfg, &ps).unwrap();
        let end = tr.last().unwrap().q;
        let expect = cfg.q0 + cfg.p0 * (cfg.t_end / cfg.m);
        assert!(end.dist(expect) < 1e-9);
    }

    #[test]
    fn work_energy_theorem() {
        let (_, tr) = vortex_run(1e-3, Integrator::Leapfrog);
        let s0 = tr.first().unwrap();
        for s in &tr.states {
            assert!((s.kinetic - s0.kinetic - s.work).abs() < 1e-5);
        }
    }

    #[test]
    fn transitions_match_cocycle() {
        let (ps, tr) = vortex_run(1e-3, Integrator::Leapfrog);
        let cc = cocycle(&ps, &Atlas::quadrant(), 32, CONSTANCY_TOL).unwrap();
        assert!(!tr.transitions.is_empty());
        for e in &tr.transitions {
            assert!((e.delta_e + cc.c(e.from, e.to).unwrap()).abs() < 1e-9, "{e:?}");
        }
        // hand-overs happen on the boundary axes
        for e in &tr.transitions {
            assert!(e.q.x == 0.0 || e.q.y == 0.0);
        }
    }

    #[test]
    fn time_reversal() {
        let at = Atlas::quadrant();
        let f = FieldOneForm::vortex();
        let ps = PotentialSet::build(&f, &at);
        let mut cfg = SimConfig::new(f, at);
        cfg.t_end = 2.0;
        let fwd = simulate(&cfg, &ps).unwrap();
        let end = fwd.last().unwrap();
        let mut back = cfg.clone();
        back.q0 = end.q;
        back.p0 = -end.p;
        let bwd = simulate(&back, &ps).unwrap();
        let fin = bwd.last().unwrap();
        assert!(fin.q.dist(cfg.q0) < 1e-9);
        assert!((-fin.p).dist(cfg.p0) < 1e-9);
    }

    #[test]
    fn gauge_does_not_change_motion() {
        let at = Atlas::quadrant();
        let f = FieldOneForm::vortex();
        let ps = PotentialSet::build(&f, &at);
        let shifted = ps.gauge_shift(&[1.5, -3.0, 0.25, 8.0]).unwrap();
        let mut cfg = SimConfig::new(f, at);
        cfg.t_end = 1.0;
        let a = simulate(&cfg, &ps).unwrap();
        let b = simulate(&cfg, &shifted).unwrap();
        for (x, y) in a.states.iter().zip(&b.states) {
            assert_eq!(x.q, y.q);
            assert_eq!(x.p, y.p);
        }
    }

    #[test]
    fn singular_start_aborts() {
        let at = Atlas::quadrant();
        let f = FieldOneForm::vortex();
        let ps = PotentialSet::build(&f, &at);
        let mut cfg = SimConfig::new(f, at);
        cfg.q0 = Vec2::new(1e-4, 0.0);
        cfg.p0 = Vec2::new(-1.0, 0.0);
        let tr = simulate(&cfg, &ps).unwrap();
        assert!(matches!(tr.status, SimStatus::Aborted { numeric: true, .. }));
        assert_eq!(tr.states.len(), 1);

        // aimed at the origin from further out: stops before reaching it
        let mut cfg2 = cfg.clone();
        cfg2.q0 = Vec2::new(0.5, 0.0);
        cfg2.p0 = Vec2::new(-50.0, 0.0);
        let tr2 = simulate(&cfg2, &ps).unwrap();
        assert!(matches!(tr2.status, SimStatus::Aborted { numeric: true, .. }));
        assert!(tr2.states.len() > 1);
        assert!(tr2.states.iter().all(|s| s.q.norm() >= cfg2.r_min));
    }

    #[test]
    fn coarse_step_trips_angle_guard() {
        let at = Atlas::quadrant();
        let f = FieldOneForm::vortex();
        let ps = PotentialSet::build(&f, &at);
        let mut cfg = SimConfig::new(f, at);
        cfg.q0 = Vec2::new(0.1, 0.0);
        cfg.p0 = Vec2::new(-4.0, 0.5);
        cfg.h = 0.05;
        let tr = simulate(&cfg, &ps).unwrap();
        match &tr.status {
            SimStatus::Aborted { reason, numeric } => {
                assert!(*numeric);
                assert!(reason.contains("step angle"), "{reason}");
            }
            s => panic!("expected abort, got {s:?}"),
        }
    }

    #[test]
    fn rk4_agrees_with_leapfrog() {
        let (_, a) = vortex_run(1e-3, Integrator::Leapfrog);
        let (_, b) = vortex_run(1e-3, Integrator::Rk4);
        assert!(a.last().unwrap().q.dist(b.last().unwrap().q) < 1e-4);
        // rk4 p_θ also grows at unit rate
        let p0 = b.states[0].p_theta;
        for s in &b.states {
            assert!((s.p_theta - p0 - s.t).abs() < 1e-9);
        }
    }

    #[test]
    fn corner_crossing_routes_through_neighbour() {
        // a step passing from chart 2 straight across to chart 4 near the origin
        let at = Atlas::quadrant();
        let ps = PotentialSet::build(&FieldOneForm::vortex(), &at);
        let a = Vec2::new(-0.01, 0.02);
        let b = Vec2::new(0.02, -0.01);
        let hops = crossings(&at, &ps, ChartId(2), ChartId(4), a, b, 0.0, 1.0).unwrap();
        assert_eq!(hops.len(), 2);
        assert_eq!(hops[0].from, ChartId(2));
        assert_eq!(hops[1].to, ChartId(4));
        assert_eq!(hops[0].to, hops[1].from);
        let cc = cocycle(&ps, &at, 32, CONSTANCY_TOL).unwrap();
        for e in &hops {
            assert!((e.delta_e + cc.c(e.from, e.to).unwrap()).abs() < 1e-9);
        }
    }
}
