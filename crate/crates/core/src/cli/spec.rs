//! Parsers for the compact command-line argument syntaxes.

use crate::error::{Error, Result};
use crate::expr::ScalarExpr;
use crate::fields::{PlanarPath, DEFAULT_SEGMENTS};
use crate::geom::Vec2;

/// Splits at commas that are not inside parentheses.
pub fn split_top_level(s: &str, sep: char) -> Vec<&str> {
    let mut out = Vec::new();
    let mut depth = 0i32;
    let mut start = 0;
    for (i, ch) in s.char_indices() {
        match ch {
            '(' => depth += 1,
            ')' => depth -= 1,
            c if c == sep && depth == 0 => {
                out.push(&s[start..i]);
                start = i + c.len_utf8();
            }
            _ => {}
        }
    }
    out.push(&s[start..]);
    out
}

/// A number, or a constant expression such as `2*pi`.
pub fn parse_number(s: &str) -> Result<f64> {
    let s = s.trim();
    if let Ok(v) = s.parse::<f64>() {
        return Ok(v);
    }
    let e = ScalarExpr::parse_with_vars(s, &[])?;
    Ok(e.eval(0.0, 0.0)?)
}

pub fn parse_point(s: &str) -> Result<Vec2> {
    let parts = split_top_level(s, ',');
    if parts.len() != 2 {
        return Err(Error::invalid(format!("expected `x,y`, got `{s}`")));
    }
    Ok(Vec2::new(parse_number(parts[0])?, parse_number(parts[1])?))
}

pub fn parse_list(s: &str) -> Result<Vec<f64>> {
    split_top_level(s, ',').into_iter().map(parse_number).collect()
}

/// `circle:cx,cy,r,turns[,N]`, `poly:x1,y1;x2,y2;...[@N]` or
/// `param:xexpr,yexpr,t0,t1,N`.
pub fn parse_path(s: &str) -> Result<PlanarPath> {
    let (kind, body) = s
        .split_once(':')
        .ok_or_else(|| Error::invalid(format!("path spec `{s}` needs a `circle:`, `poly:` or `param:` prefix")))?;
    match kind.trim() {
        "circle" => {
            let v = parse_list(body)?;
            if !(v.len() == 4 || v.len() == 5) {
                return Err(Error::invalid("circle spec is `circle:cx,cy,r,turns[,N]`"));
            }
            if !(v[2] > 0.0) {
                return Err(Error::invalid("circle radius must be positive"));
            }
            let n = v.get(4).map_or(Ok(DEFAULT_SEGMENTS), |&n| count(n))?;
            Ok(PlanarPath::circle(Vec2::new(v[0], v[1]), v[2], v[3], n))
        }
        "poly" => {
            let (pts, n) = match body.rsplit_once('@') {
                Some((p, n)) => (p, count(parse_number(n)?)?),
                None => (body, DEFAULT_SEGMENTS),
            };
            let vertices = pts
                .split(';')
                .filter(|p| !p.trim().is_empty())
                .map(parse_point)
                .collect::<Result<Vec<_>>>()?;
            if vertices.len() < 2 {
                return Err(Error::invalid("poly spec needs at least two vertices"));
            }
            Ok(PlanarPath::polyline(vertices, n))
        }
        "param" => {
            let parts = split_top_level(body, ',');
            if parts.len() != 5 {
                return Err(Error::invalid("param spec is `param:xexpr,yexpr,t0,t1,N`"));
            }
            let x = ScalarExpr::parse_param(parts[0])?;
            let y = ScalarExpr::parse_param(parts[1])?;
            PlanarPath::parametric(x, y, parse_number(parts[2])?, parse_number(parts[3])?, count(parse_number(parts[4])?)?)
        }
        other => Err(Error::invalid(format!("unknown path kind `{other}`"))),
    }
}

fn count(n: f64) -> Result<usize> {
    if n >= 1.0 && n.fract() == 0.0 && n < 1e9 {
        Ok(n as usize)
    } else {
        Err(Error::invalid(format!("segment count must be a positive integer, got {n}")))
    }
}

/// `x,y@chart`.
pub fn parse_eval_point(s: &str) -> Result<(Vec2, u32)> {
    let (p, c) = s
        .rsplit_once('@')
        .ok_or_else(|| Error::invalid(format!("expected `x,y@chart`, got `{s}`")))?;
    let chart = c
        .trim()
        .parse::<u32>()
        .map_err(|_| Error::invalid(format!("bad chart id `{c}`")))?;
    Ok((parse_point(p)?, chart))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn top_level_split() {
        assert_eq!(split_top_level("atan2(y,x),cos(t),0,1", ','), vec!["atan2(y,x)", "cos(t)", "0", "1"]);
        assert_eq!(split_top_level("", ','), vec![""]);
    }

    #[test]
    fn numbers_and_points() {
        assert_eq!(parse_number("2*pi").unwrap(), 2.0 * PI);
        assert_eq!(parse_number(" -1.5e-3 ").unwrap(), -1.5e-3);
        assert!(parse_number("x").is_err());
        assert_eq!(parse_point("1,-2").unwrap(), Vec2::new(1.0, -2.0));
        assert!(parse_point("1").is_err());
        assert_eq!(parse_eval_point("0.5,0.25@3").unwrap(), (Vec2::new(0.5, 0.25), 3));
    }

    #[test]
    fn path_kinds() {
        let c = parse_path("circle:0,0,1,2").unwrap();
        assert!(c.end().unwrap().dist(Vec2::new(1.0, 0.0)) < 1e-12);
        let p = parse_path("poly:1,0;0,1;-1,0@30").unwrap();
        assert_eq!(p.end().unwrap(), Vec2::new(-1.0, 0.0));
        assert_eq!(p.segments(), 30);
        let q = parse_path("param:cos(t),sin(t),0,pi,50").unwrap();
        assert!(q.end().unwrap().dist(Vec2::new(-1.0, 0.0)) < 1e-12);
        for bad in ["circle:0,0,1", "circle:0,0,-1,1", "poly:1,0", "param:x,y,0,1,5", "spiral:1", "nocolon"] {
            assert!(parse_path(bad).is_err(), "{bad}");
        }
    }
}
