use std::f64::consts::TAU;

use serde::Serialize;

use crate::atlas::{CechCocycle, ChartId};
use crate::error::{Error, Result};
use crate::fields::{work, FieldOneForm, PlanarPath};
use crate::geom::angle_step;
use crate::quad::Rule;

use super::Trajectory;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SegmentDrift {
    pub chart: ChartId,
    pub t_start: f64,
    pub t_end: f64,
    pub states: usize,
    /// `max |E_local(t) − E_local(t_start)|` within the segment.
    pub max_drift: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TransitionCheck {
    pub t: f64,
    pub from: ChartId,
    pub to: ChartId,
    pub delta_e: f64,
    pub c: f64,
    /// `|ΔE + c_{from,to}|`.
    pub residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LoopCheck {
    /// Distance between the first and last positions.
    pub gap: f64,
    pub winding: i64,
    /// `∮ f` once around the first center.
    pub period: f64,
    pub delta_kinetic: f64,
    pub expected: f64,
    pub error: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EnergyLedger {
    pub segments: Vec<SegmentDrift>,
    pub transitions: Vec<TransitionCheck>,
    pub closed_loop: Option<LoopCheck>,
    pub max_segment_drift: f64,
    pub max_transition_residual: f64,
}

/// Energy bookkeeping of a trajectory: drift of `E_local` within each chart
/// segment, each hand-over jump against the cocycle, and for a trajectory
/// whose ends meet within `closure_tol`, the kinetic gain against
/// `winding × period`.
pub fn energy_ledger(tr: &Trajectory, f: &FieldOneForm, cc: &CechCocycle, closure_tol: f64) -> Result<EnergyLedger> {
    let first = tr.first().ok_or_else(|| Error::invalid("empty trajectory"))?;
    let mut segments = Vec::new();
    let mut start = 0;
    for k in 1..=tr.states.len() {
        if k == tr.states.len() || tr.states[k].chart != tr.states[start].chart {
            let seg = &tr.states[start..k];
            let e0 = seg[0].e_local;
            segments.push(SegmentDrift {
                chart: seg[0].chart,
                t_start: seg[0].t,
                t_end: seg[seg.len() - 1].t,
                states: seg.len(),
                max_drift: seg.iter().map(|s| (s.e_local - e0).abs()).fold(0.0, f64::max),
            });
            start = k;
        }
    }
    let transitions = tr
        .transitions
        .iter()
        .map(|e| {
            let c = cc.c(e.from, e.to)?;
            Ok(TransitionCheck {
                t: e.t,
                from: e.from,
                to: e.to,
                delta_e: e.delta_e,
                c,
                residual: (e.delta_e + c).abs(),
            })
        })
        .collect::<Result<Vec<_>>>()?;

    let last = tr.last().expect("nonempty");
    let gap = first.q.dist(last.q);
    let closed_loop = if tr.states.len() > 1 && gap < closure_tol && !first.theta_acc.is_empty() {
        let center = tr.centers[0];
        let swept = last.theta_acc[0] - first.theta_acc[0] + angle_step(last.q, first.q, center);
        let winding = (swept / TAU).round() as i64;
        let radius = 0.5 * tr.states.iter().map(|s| s.q.dist(center)).fold(f64::INFINITY, f64::min);
        let period = work(f, &PlanarPath::circle(center, radius, 1.0, 2000), Rule::Simpson)?;
        let delta_kinetic = last.kinetic - first.kinetic;
        let expected = winding as f64 * period;
        Some(LoopCheck {
            gap,
            winding,
            period,
            delta_kinetic,
            expected,
            error: (delta_kinetic - expected).abs(),
        })
    } else {
        None
    };
    Ok(EnergyLedger {
        max_segment_drift: segments.iter().map(|s| s.max_drift).fold(0.0, f64::max),
        max_transition_residual: transitions.iter().map(|t| t.residual).fold(0.0, f64::max),
        segments,
        transitions,
        closed_loop,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PolarSample {
    pub t: f64,
    pub r: f64,
    /// Continuous angle.
    pub theta: f64,
    /// `m ṙ = (x p_x + y p_y) / r`.
    pub p_r: f64,
    /// `m r² θ̇ = x p_y − y p_x`.
    pub p_theta: f64,
}

/// Polar coordinates and momenta about the first center.
pub fn polar_diagnostics(tr: &Trajectory) -> Vec<PolarSample> {
    let c = tr.centers[0];
    tr.states
        .iter()
        .map(|s| {
            let d = s.q - c;
            let r = d.norm();
            PolarSample {
                t: s.t,
                r,
                theta: s.theta_acc[0],
                p_r: d.dot(s.p) / r,
                p_theta: d.cross(s.p),
            }
        })
        .collect()
}
