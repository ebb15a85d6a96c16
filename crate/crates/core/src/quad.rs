//! One-dimensional quadrature rules used for line integrals.

use serde::{Deserialize, Serialize};

/// Per-segment rule of a composite quadrature.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Rule {
    Trapezoid,
    #[default]
    Simpson,
    /// Gauss-Legendre with the given number of nodes per segment.
    Gauss(usize),
}

impl std::str::FromStr for Rule {
    type Err = String;

    fn from_str(s: &str) -> Result<Rule, String> {
        match s {
            "trapezoid" => Ok(Rule::Trapezoid),
            "simpson" => Ok(Rule::Simpson),
            _ => {
                let n = s
                    .strip_prefix("gauss")
                    .map(|r| r.trim_start_matches(['(', ':']).trim_end_matches(')'))
                    .ok_or_else(|| format!("unknown quadrature rule `{s}`"))?;
                let n: usize = n.parse().map_err(|_| format!("bad Gauss order in `{s}`"))?;
                if n == 0 {
                    return Err("Gauss order must be positive".into());
                }
                Ok(Rule::Gauss(n))
            }
        }
    }
}

/// Gauss-Legendre nodes and weights on [-1, 1], by Newton iteration on P_n.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n > 0);
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre(n, z);
            dp = d;
            let dz = p / d;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre(n, z);
        if d != 0.0 {
            dp = d;
        }
        let w = 2.0 / ((1.0 - z * z) * dp * dp);
        nodes[i] = -z;
        nodes[n - 1 - i] = z;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
    (nodes, weights)
}

// (P_n(z), P_n'(z)) by the three-term recurrence.
fn legendre(n: usize, z: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = z;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let k = k as f64;
        let p2 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (z * p1 - p0) / (z * z - 1.0);
    (p1, d)
}

/// Composite rule over `[a, b]` split into `segments` equal pieces.
/// Summation order is fixed (left to right), so results are reproducible.
pub fn integrate<E>(
    rule: Rule,
    a: f64,
    b: f64,
    segments: usize,
    mut g: impl FnMut(f64) -> Result<f64, E>,
) -> Result<f64, E> {
    let n = segments.max(1);
    let h = (b - a) / n as f64;
    let at = |k: usize| if k == n { b } else { a + h * k as f64 };
    match rule {
        Rule::Trapezoid => {
            let mut sum = 0.0;
            let mut left = g(a)?;
            for k in 1..=n {
                let right = g(at(k))?;
                sum += left + right;
                left = right;
            }
            Ok(sum * h / 2.0)
        }
        Rule::Simpson => {
            let mut sum = 0.0;
            let mut left = g(a)?;
            for k in 1..=n {
                let x0 = at(k - 1);
                let x1 = at(k);
                let mid = g(0.5 * (x0 + x1))?;
                let right = g(x1)?;
                sum += left + 4.0 * mid + right;
                left = right;
            }
            Ok(sum * h / 6.0)
        }
        Rule::Gauss(order) => {
            let (nodes, weights) = gauss_legendre(order);
            let mut sum = 0.0;
            for k in 1..=n {
                let x0 = at(k - 1);
                let x1 = at(k);
                let c = 0.5 * (x0 + x1);
                let r = 0.5 * (x1 - x0);
                let mut seg = 0.0;
                for (z, w) in nodes.iter().zip(&weights) {
                    seg += w * g(c + r * z)?;
                }
                sum += seg * r;
            }
            Ok(sum)
        }
    }
}

/// Adaptive Simpson on `[a, b]` starting from `panels` equal panels.
pub fn adaptive_simpson<E>(
    a: f64,
    b: f64,
    panels: usize,
    tol: f64,
    mut g: impl FnMut(f64) -> Result<f64, E>,
) -> Result<f64, E> {
    let n = panels.max(1);
    let h = (b - a) / n as f64;
    let panel_tol = tol / n as f64;
    let mut total = 0.0;
    for k in 0..n {
        let x0 = a + h * k as f64;
        let x1 = if k + 1 == n { b } else { a + h * (k + 1) as f64 };
        let f0 = g(x0)?;
        let f1 = g(x1)?;
        let xm = 0.5 * (x0 + x1);
        let fm = g(xm)?;
        let whole = (x1 - x0) / 6.0 * (f0 + 4.0 * fm + f1);
        total += refine(&mut g, x0, x1, f0, fm, f1, whole, panel_tol, 40)?;
    }
    Ok(total)
}

#[allow(clippy::too_many_arguments)]
fn refine<E>(
    g: &mut impl FnMut(f64) -> Result<f64, E>,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> Result<f64, E> {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = g(lm)?;
    let frm = g(rm)?;
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let delta = left + right - whole;
    if depth == 0 || delta.abs() <= 15.0 * tol {
        return Ok(left + right + delta / 15.0);
    }
    Ok(refine(g, a, m, fa, flm, fm, left, tol / 2.0, depth - 1)?
        + refine(g, m, b, fm, frm, fb, right, tol / 2.0, depth - 1)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::convert::Infallible;

    fn ok(v: f64) -> Result<f64, Infallible> {
        Ok(v)
    }

    #[test]
    fn gauss_nodes_known_values() {
        let (x, w) = gauss_legendre(2);
        assert!((x[1] - 1.0 / 3f64.sqrt()).abs() < 1e-15);
        assert!((w[0] - 1.0).abs() < 1e-15);
        let (x, w) = gauss_legendre(3);
        assert!((x[2] - (0.6f64).sqrt()).abs() < 1e-15);
        assert!((w[1] - 8.0 / 9.0).abs() < 1e-15);
        let (_, w) = gauss_legendre(8);
        assert!((w.iter().sum::<f64>() - 2.0).abs() < 1e-14);
    }

    #[test]
    fn rules_integrate_polynomials() {
        // Simpson is exact for cubics, Gauss(n) up to degree 2n-1
        let cubic = |x: f64| ok(x * x * x - 2.0 * x + 1.0);
        let exact = 4.0 - 4.0 + 2.0;
        assert!((integrate(Rule::Simpson, 0.0, 2.0, 1, cubic).unwrap() - exact).abs() < 1e-14);
        let p7 = |x: f64| ok(x.powi(7));
        assert!((integrate(Rule::Gauss(4), 0.0, 1.0, 1, p7).unwrap() - 0.125).abs() < 1e-15);
        let lin = |x: f64| ok(3.0 * x);
        assert!((integrate(Rule::Trapezoid, -1.0, 1.0, 7, lin).unwrap()).abs() < 1e-15);
    }

    #[test]
    fn adaptive_handles_sharp_integrand() {
        let v = adaptive_simpson(0.0, 1.0, 1, 1e-12, |x| ok(1.0 / (1e-2 + x * x))).unwrap();
        let exact = (1.0f64 / 0.1).atan() / 0.1;
        assert!((v - exact).abs() < 1e-10, "{v} vs {exact}");
    }

    #[test]
    fn rule_parsing() {
        assert_eq!("simpson".parse::<Rule>().unwrap(), Rule::Simpson);
        assert_eq!("gauss(8)".parse::<Rule>().unwrap(), Rule::Gauss(8));
        assert_eq!("gauss:5".parse::<Rule>().unwrap(), Rule::Gauss(5));
        assert!("midpoint".parse::<Rule>().is_err());
    }
}
