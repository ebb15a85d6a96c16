use std::f64::consts::{FRAC_PI_2, TAU};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::geom::{angle_step, Vec2};

use super::path::{Piece, PlanarPath, CLOSED_TOL};

const MAX_DEPTH: u32 = 40;
// Steps larger than this are bisected before being trusted.
const MAX_STEP: f64 = FRAC_PI_2;
const ON_PATH: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Winding {
    pub n: i64,
    pub total_angle: f64,
    pub residual: f64,
}

/// Total continuous angle swept by `c` as seen from `about`.
pub fn accumulate_angle(c: &PlanarPath, about: Vec2) -> Result<f64> {
    let mut total = 0.0;
    let mut prev: Option<Vec2> = None;
    for piece in c.pieces() {
        let n = piece.segments();
        let mut s_prev = 0.0;
        let mut p_prev = piece.point(0.0)?;
        check_off(p_prev, about)?;
        if let Some(q) = prev {
            // bridge between pieces of a chain (zero when continuous)
            total += angle_step(q, p_prev, about);
        }
        for k in 1..=n {
            let s = k as f64 / n as f64;
            let p = piece.point(s)?;
            total += swept(&piece, about, s_prev, p_prev, s, p, 0)?;
            s_prev = s;
            p_prev = p;
        }
        prev = Some(p_prev);
    }
    Ok(total)
}

fn check_off(p: Vec2, about: Vec2) -> Result<()> {
    if p.dist(about) < ON_PATH {
        return Err(Error::RefinementLimit { near: p });
    }
    Ok(())
}

fn swept(piece: &Piece<'_>, about: Vec2, s0: f64, p0: Vec2, s1: f64, p1: Vec2, depth: u32) -> Result<f64> {
    check_off(p1, about)?;
    let d = angle_step(p0, p1, about);
    if d.abs() <= MAX_STEP {
        return Ok(d);
    }
    if depth >= MAX_DEPTH {
        return Err(Error::RefinementLimit { near: p0 });
    }
    let sm = 0.5 * (s0 + s1);
    let pm = piece.point(sm)?;
    Ok(swept(piece, about, s0, p0, sm, pm, depth + 1)? + swept(piece, about, sm, pm, s1, p1, depth + 1)?)
}

/// Winding number of a closed path about `q`, by angle unwrapping.
pub fn winding_number(c: &PlanarPath, q: Vec2) -> Result<Winding> {
    let gap = c.endpoint_gap()?;
    if gap > CLOSED_TOL {
        return Err(Error::PathNotClosed { gap });
    }
    let total_angle = accumulate_angle(c, q)?;
    let n = (total_angle / TAU).round();
    Ok(Winding {
        n: n as i64,
        total_angle,
        residual: (total_angle - TAU * n).abs(),
    })
}
