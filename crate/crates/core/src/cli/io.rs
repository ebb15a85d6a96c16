//! Trajectory and lift files, and the SVG figure.

use std::fmt::Write as _;
use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use crate::cover::{sheet_of, LiftState};
use crate::dynamics::{Trajectory, Transition};
use crate::error::{Error, Result};
use crate::geom::Vec2;

pub const TRAJECTORY_HEADER: [&str; 11] =
    ["t", "x", "y", "px", "py", "chart", "V", "Tkin", "Elocal", "theta_acc", "p_theta"];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryRow {
    pub t: f64,
    pub x: f64,
    pub y: f64,
    pub px: f64,
    pub py: f64,
    pub chart: u32,
    #[serde(rename = "V")]
    pub v: f64,
    #[serde(rename = "Tkin")]
    pub t_kin: f64,
    #[serde(rename = "Elocal")]
    pub e_local: f64,
    pub theta_acc: f64,
    pub p_theta: f64,
}

pub fn trajectory_rows(tr: &Trajectory) -> Vec<TrajectoryRow> {
    tr.states
        .iter()
        .map(|s| TrajectoryRow {
            t: s.t,
            x: s.q.x,
            y: s.q.y,
            px: s.p.x,
            py: s.p.y,
            chart: s.chart.0,
            v: s.v,
            t_kin: s.kinetic,
            e_local: s.e_local,
            theta_acc: s.theta_acc.first().copied().unwrap_or(0.0),
            p_theta: s.p_theta,
        })
        .collect()
}

/// Writes the trajectory CSV, preceded by `metadata` as a `#` comment line
/// when given.
pub fn write_trajectory_csv(w: impl Write, tr: &Trajectory, metadata: Option<&str>) -> Result<()> {
    write_rows(w, &trajectory_rows(tr), metadata)
}

fn write_rows<T: Serialize>(mut w: impl Write, rows: &[T], metadata: Option<&str>) -> Result<()> {
    if let Some(m) = metadata {
        writeln!(w, "# {m}")?;
    }
    let mut out = csv::Writer::from_writer(w);
    for r in rows {
        out.serialize(r)?;
    }
    out.flush()?;
    Ok(())
}

pub fn read_trajectory_csv(r: impl Read) -> Result<Vec<TrajectoryRow>> {
    let mut rd = csv::ReaderBuilder::new().comment(Some(b'#')).from_reader(r);
    let headers = rd.headers()?.clone();
    if headers.iter().ne(TRAJECTORY_HEADER) {
        return Err(Error::invalid(format!(
            "trajectory CSV header must be `{}`",
            TRAJECTORY_HEADER.join(",")
        )));
    }
    let rows = rd.deserialize().collect::<std::result::Result<Vec<TrajectoryRow>, _>>()?;
    if rows.is_empty() {
        return Err(Error::invalid("trajectory CSV has no rows"));
    }
    Ok(rows)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LiftRow {
    pub t: f64,
    pub u: f64,
    pub v: f64,
    pub sheet: i64,
}

pub fn lift_rows(lift: &[LiftState]) -> Result<Vec<LiftRow>> {
    lift.iter()
        .map(|l| {
            Ok(LiftRow {
                t: l.t,
                u: l.u,
                v: l.v,
                sheet: sheet_of(l)?,
            })
        })
        .collect()
}

pub fn write_lift_csv(w: impl Write, rows: &[LiftRow], metadata: Option<&str>) -> Result<()> {
    write_rows(w, rows, metadata)
}

#[derive(Debug, Clone, Serialize)]
pub struct TransitionLog<'a> {
    pub transitions: &'a [Transition],
}

/// `traj.csv` → `traj.transitions.json`.
pub fn sidecar_path(csv: &str) -> String {
    let stem = csv.strip_suffix(".csv").unwrap_or(csv);
    format!("{stem}.transitions.json")
}

/// Static figure: axes through the origin, the trajectory polyline, and a
/// marker at each singular point.
pub fn trajectory_svg(points: &[Vec2], singular: &[Vec2]) -> String {
    let (w, h, pad) = (600.0, 600.0, 30.0);
    let all = points.iter().chain(singular).chain(std::iter::once(&Vec2::ZERO));
    let (mut x0, mut y0, mut x1, mut y1) = (f64::INFINITY, f64::INFINITY, f64::NEG_INFINITY, f64::NEG_INFINITY);
    for p in all {
        x0 = x0.min(p.x);
        y0 = y0.min(p.y);
        x1 = x1.max(p.x);
        y1 = y1.max(p.y);
    }
    let span = (x1 - x0).max(y1 - y0).max(1e-9);
    let scale = (w - 2.0 * pad) / span;
    let sx = |x: f64| pad + (x - x0) * scale;
    let sy = |y: f64| h - pad - (y - y0) * scale;

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}">"#
    );
    let _ = writeln!(s, r#"<rect width="{w}" height="{h}" fill="white"/>"#);
    let _ = writeln!(
        s,
        r##"<line x1="0" y1="{:.3}" x2="{w}" y2="{:.3}" stroke="#999" stroke-width="1"/>"##,
        sy(0.0),
        sy(0.0)
    );
    let _ = writeln!(
        s,
        r##"<line x1="{:.3}" y1="0" x2="{:.3}" y2="{h}" stroke="#999" stroke-width="1"/>"##,
        sx(0.0),
        sx(0.0)
    );
    let mut pts = String::new();
    for p in points {
        let _ = write!(pts, "{:.3},{:.3} ", sx(p.x), sy(p.y));
    }
    let _ = writeln!(
        s,
        r##"<polyline points="{}" fill="none" stroke="#1f5fbf" stroke-width="1.5"/>"##,
        pts.trim_end()
    );
    for p in singular {
        let _ = writeln!(
            s,
            r##"<circle cx="{:.3}" cy="{:.3}" r="4" fill="#c0392b"/>"##,
            sx(p.x),
            sy(p.y)
        );
    }
    s.push_str("</svg>\n");
    s
}
