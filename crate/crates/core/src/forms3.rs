//! Exterior calculus on E³ with the standard orientation `(x, y, z)`.
//!
//! A `k`-form is stored as its coefficients on a fixed ordered basis:
//!
//! | degree | basis                          |
//! |--------|--------------------------------|
//! | 0      | `1`                            |
//! | 1      | `dx, dy, dz`                   |
//! | 2      | `dx∧dy, dx∧dz, dy∧dz`          |
//! | 3      | `dx∧dy∧dz`                     |
//!
//! Basis elements are bitmasks over `{x = 1, y = 2, z = 4}`. The Hodge
//! star is the explicit table in [`STAR_TABLE`]; gradient, curl and
//! divergence are built from flat/sharp/star/d rather than written out.

use std::fmt;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::expr::{EvalError, ScalarExpr};

pub type Point3 = [f64; 3];

/// A scalar field on E³.
pub type Scalar3 = Arc<dyn Fn(Point3) -> Result<f64, EvalError> + Send + Sync>;

pub const DEFAULT_H: f64 = 1e-4;

const BASIS: [&[u8]; 4] = [&[0], &[1, 2, 4], &[3, 5, 6], &[7]];

/// `⋆ e = sign · target` for every basis element `e`.
pub const STAR_TABLE: [(u8, u8, f64); 8] = [
    (0, 7, 1.0),  // ⋆1 = dx∧dy∧dz
    (1, 6, 1.0),  // ⋆dx = dy∧dz
    (2, 5, -1.0), // ⋆dy = −dx∧dz
    (4, 3, 1.0),  // ⋆dz = dx∧dy
    (3, 4, 1.0),  // ⋆(dx∧dy) = dz
    (5, 2, -1.0), // ⋆(dx∧dz) = −dy
    (6, 1, 1.0),  // ⋆(dy∧dz) = dx
    (7, 0, 1.0),  // ⋆(dx∧dy∧dz) = 1
];

pub fn basis(degree: usize) -> &'static [u8] {
    BASIS[degree]
}

fn index_of(mask: u8) -> (usize, usize) {
    let degree = mask.count_ones() as usize;
    let idx = BASIS[degree].iter().position(|&m| m == mask).expect("valid mask");
    (degree, idx)
}

pub fn basis_name(mask: u8) -> String {
    if mask == 0 {
        return "1".into();
    }
    ["dx", "dy", "dz"]
        .iter()
        .enumerate()
        .filter(|(i, _)| mask & (1 << i) != 0)
        .map(|(_, n)| *n)
        .collect::<Vec<_>>()
        .join("∧")
}

fn star_entry(mask: u8) -> (u8, f64) {
    let (_, target, sign) = STAR_TABLE.iter().find(|(m, _, _)| *m == mask).copied().expect("mask");
    (target, sign)
}

/// Sign of `e_I ∧ e_J` relative to the sorted basis element `e_{I∪J}`,
/// zero when they share a factor.
pub fn wedge_sign(i: u8, j: u8) -> f64 {
    if i & j != 0 {
        return 0.0;
    }
    let mut inversions = 0;
    for a in 0..3 {
        if i & (1 << a) == 0 {
            continue;
        }
        for b in 0..a {
            if j & (1 << b) != 0 {
                inversions += 1;
            }
        }
    }
    if inversions % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

/// Form with constant coefficients (a form at a single point).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FormValue {
    pub degree: usize,
    pub coeffs: Vec<f64>,
}

impl FormValue {
    pub fn zero(degree: usize) -> FormValue {
        FormValue {
            degree,
            coeffs: vec![0.0; BASIS[degree].len()],
        }
    }

    pub fn basis_element(mask: u8) -> FormValue {
        let (degree, idx) = index_of(mask);
        let mut v = FormValue::zero(degree);
        v.coeffs[idx] = 1.0;
        v
    }

    pub fn one_form(v: Point3) -> FormValue {
        FormValue {
            degree: 1,
            coeffs: v.to_vec(),
        }
    }

    pub fn hodge(&self) -> FormValue {
        let mut out = FormValue::zero(3 - self.degree);
        for (k, &mask) in BASIS[self.degree].iter().enumerate() {
            let (target, sign) = star_entry(mask);
            let (_, idx) = index_of(target);
            out.coeffs[idx] += sign * self.coeffs[k];
        }
        out
    }

    pub fn wedge(&self, other: &FormValue) -> Option<FormValue> {
        let degree = self.degree + other.degree;
        if degree > 3 {
            return None;
        }
        let mut out = FormValue::zero(degree);
        for (a, &ma) in BASIS[self.degree].iter().enumerate() {
            for (b, &mb) in BASIS[other.degree].iter().enumerate() {
                let s = wedge_sign(ma, mb);
                if s != 0.0 {
                    let (_, idx) = index_of(ma | mb);
                    out.coeffs[idx] += s * self.coeffs[a] * other.coeffs[b];
                }
            }
        }
        Some(out)
    }

    pub fn sharp(&self) -> Result<Point3> {
        if self.degree != 1 {
            return Err(Error::invalid(format!("sharp needs a 1-form, got degree {}", self.degree)));
        }
        Ok([self.coeffs[0], self.coeffs[1], self.coeffs[2]])
    }
}

impl fmt::Display for FormValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let terms: Vec<String> = BASIS[self.degree]
            .iter()
            .zip(&self.coeffs)
            .filter(|(_, c)| **c != 0.0)
            .map(|(m, c)| {
                if *m == 0 {
                    format!("{c}")
                } else if *c == 1.0 {
                    basis_name(*m)
                } else if *c == -1.0 {
                    format!("-{}", basis_name(*m))
                } else {
                    format!("{c} {}", basis_name(*m))
                }
            })
            .collect();
        if terms.is_empty() {
            f.write_str("0")
        } else {
            f.write_str(&terms.join(" + "))
        }
    }
}

/// Scalar field helpers.
pub mod scalar {
    use super::*;

    pub fn constant(c: f64) -> Scalar3 {
        Arc::new(move |_| Ok(c))
    }

    pub fn from_fn(f: impl Fn(Point3) -> f64 + Send + Sync + 'static) -> Scalar3 {
        Arc::new(move |p| Ok(f(p)))
    }

    /// Planar expression in `x, y`, constant in `z`.
    pub fn from_expr(e: ScalarExpr) -> Scalar3 {
        Arc::new(move |p| e.eval(p[0], p[1]))
    }

    pub(super) fn scaled(s: f64, f: Scalar3) -> Scalar3 {
        if s == 1.0 {
            return f;
        }
        Arc::new(move |p| Ok(s * f(p)?))
    }
}

#[derive(Clone)]
pub struct VectorField3 {
    pub vx: Scalar3,
    pub vy: Scalar3,
    pub vz: Scalar3,
}

impl VectorField3 {
    pub fn new(vx: Scalar3, vy: Scalar3, vz: Scalar3) -> VectorField3 {
        VectorField3 { vx, vy, vz }
    }

    pub fn constant(v: Point3) -> VectorField3 {
        VectorField3::new(scalar::constant(v[0]), scalar::constant(v[1]), scalar::constant(v[2]))
    }

    pub fn eval(&self, p: Point3) -> Result<Point3> {
        Ok([(self.vx)(p)?, (self.vy)(p)?, (self.vz)(p)?])
    }
}

impl fmt::Debug for VectorField3 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("VectorField3 { .. }")
    }
}

/// Differential form with field-valued coefficients.
#[derive(Clone)]
pub struct FormField {
    degree: usize,
    comps: Vec<Scalar3>,
}

impl fmt::Debug for FormField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "FormField {{ degree: {} }}", self.degree)
    }
}

impl FormField {
    pub fn new(degree: usize, comps: Vec<Scalar3>) -> Result<FormField> {
        if degree > 3 || comps.len() != BASIS[degree].len() {
            return Err(Error::invalid(format!(
                "a degree-{degree} form on E³ has {} components, got {}",
                BASIS.get(degree).map_or(0, |b| b.len()),
                comps.len()
            )));
        }
        Ok(FormField { degree, comps })
    }

    pub fn zero(degree: usize) -> FormField {
        FormField {
            degree,
            comps: (0..BASIS[degree].len()).map(|_| scalar::constant(0.0)).collect(),
        }
    }

    pub fn constant(v: &FormValue) -> FormField {
        FormField {
            degree: v.degree,
            comps: v.coeffs.iter().map(|&c| scalar::constant(c)).collect(),
        }
    }

    pub fn scalar(f: Scalar3) -> FormField {
        FormField {
            degree: 0,
            comps: vec![f],
        }
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn component(&self, mask: u8) -> &Scalar3 {
        let (degree, idx) = index_of(mask);
        assert_eq!(degree, self.degree, "basis element of the wrong degree");
        &self.comps[idx]
    }

    pub fn eval(&self, p: Point3) -> Result<FormValue> {
        let coeffs = self.comps.iter().map(|c| c(p)).collect::<Result<Vec<_>, _>>()?;
        Ok(FormValue {
            degree: self.degree,
            coeffs,
        })
    }
}

pub fn flat(v: &VectorField3) -> FormField {
    FormField {
        degree: 1,
        comps: vec![v.vx.clone(), v.vy.clone(), v.vz.clone()],
    }
}

pub fn sharp(a: &FormField) -> Result<VectorField3> {
    if a.degree != 1 {
        return Err(Error::invalid(format!("sharp needs a 1-form, got degree {}", a.degree)));
    }
    Ok(VectorField3::new(a.comps[0].clone(), a.comps[1].clone(), a.comps[2].clone()))
}

/// Hodge star, applied coefficient-wise from [`STAR_TABLE`].
pub fn hodge(a: &FormField) -> FormField {
    let out_degree = 3 - a.degree;
    let mut comps: Vec<Option<Scalar3>> = vec![None; BASIS[out_degree].len()];
    for (k, &mask) in BASIS[a.degree].iter().enumerate() {
        let (target, sign) = star_entry(mask);
        let (_, idx) = index_of(target);
        comps[idx] = Some(scalar::scaled(sign, a.comps[k].clone()));
    }
    FormField {
        degree: out_degree,
        comps: comps.into_iter().map(|c| c.expect("star is a bijection")).collect(),
    }
}

/// Pointwise wedge product.
pub fn wedge(a: &FormField, b: &FormField) -> Result<FormField> {
    let degree = a.degree + b.degree;
    if degree > 3 {
        return Err(Error::invalid("wedge product exceeds degree 3"));
    }
    let (a, b) = (a.clone(), b.clone());
    let comps = BASIS[degree]
        .iter()
        .map(|&target| {
            let mut terms: Vec<(f64, Scalar3, Scalar3)> = Vec::new();
            for (i, &ma) in BASIS[a.degree].iter().enumerate() {
                for (j, &mb) in BASIS[b.degree].iter().enumerate() {
                    if ma | mb == target && ma & mb == 0 {
                        terms.push((wedge_sign(ma, mb), a.comps[i].clone(), b.comps[j].clone()));
                    }
                }
            }
            let c: Scalar3 = Arc::new(move |p| {
                let mut s = 0.0;
                for (sign, fa, fb) in &terms {
                    s += sign * fa(p)? * fb(p)?;
                }
                Ok(s)
            });
            c
        })
        .collect();
    Ok(FormField { degree, comps })
}

/// Exterior derivative with central differences of step `h`:
/// `d(ω_I e_I) = Σ_j ∂_j ω_I dx_j ∧ e_I`.
pub fn ext_d(a: &FormField, h: f64) -> Result<FormField> {
    if a.degree > 2 {
        return Err(Error::invalid("exterior derivative of a 3-form on E³ is zero-dimensional"));
    }
    if !(h > 0.0) {
        return Err(Error::invalid("finite-difference step must be positive"));
    }
    let degree = a.degree + 1;
    let comps = BASIS[degree]
        .iter()
        .map(|&target| {
            let mut terms: Vec<(f64, usize, Scalar3)> = Vec::new();
            for (i, &mi) in BASIS[a.degree].iter().enumerate() {
                for axis in 0..3 {
                    let mj = 1u8 << axis;
                    if mj | mi == target && mj & mi == 0 {
                        terms.push((wedge_sign(mj, mi), axis, a.comps[i].clone()));
                    }
                }
            }
            let c: Scalar3 = Arc::new(move |p| {
                let mut s = 0.0;
                for (sign, axis, f) in &terms {
                    let mut plus = p;
                    let mut minus = p;
                    plus[*axis] += h;
                    minus[*axis] -= h;
                    s += sign * (f(plus)? - f(minus)?) / (2.0 * h);
                }
                Ok(s)
            });
            c
        })
        .collect();
    Ok(FormField { degree, comps })
}

/// `grad f = (df)♯`
pub fn grad(f: Scalar3, h: f64) -> Result<VectorField3> {
    sharp(&ext_d(&FormField::scalar(f), h)?)
}

/// `curl v = [⋆(d v♭)]♯`
pub fn curl(v: &VectorField3, h: f64) -> Result<VectorField3> {
    sharp(&hodge(&ext_d(&flat(v), h)?))
}

/// `div v = ⋆ d (⋆ v♭)`
pub fn div(v: &VectorField3, h: f64) -> Result<Scalar3> {
    let out = hodge(&ext_d(&hodge(&flat(v)), h)?);
    Ok(out.comps[0].clone())
}

/// `v × w = [⋆(v♭ ∧ w♭)]♯` for vectors at a point.
pub fn cross_via_forms(v: Point3, w: Point3) -> Point3 {
    let vw = FormValue::one_form(v).wedge(&FormValue::one_form(w)).expect("degree 2");
    vw.hodge().sharp().expect("degree 1")
}

/// Coefficient of `v♭ ∧ ⋆(w♭)` on `dx∧dy∧dz`.
pub fn dot_via_forms(v: Point3, w: Point3) -> f64 {
    let form = FormValue::one_form(v).wedge(&FormValue::one_form(w).hodge()).expect("degree 3");
    form.coeffs[0]
}

#[derive(Debug, Clone, Serialize)]
pub struct StarRow {
    pub input: String,
    pub output: String,
}

/// The star table rendered by applying [`FormValue::hodge`] to every basis element.
pub fn star_table() -> Vec<StarRow> {
    STAR_TABLE
        .iter()
        .map(|&(mask, _, _)| StarRow {
            input: basis_name(mask),
            output: FormValue::basis_element(mask).hodge().to_string(),
        })
        .collect()
}

#[derive(Debug, Clone, Serialize)]
pub struct IdentityResiduals {
    pub star_star_max: f64,
    pub cross_product_max: f64,
    pub scalar_product_max: f64,
    pub curl_grad_max: f64,
    pub div_curl_max: f64,
    pub samples: usize,
    pub h: f64,
}

/// Residuals of the vector-calculus identities on `samples` seeded random
/// vectors and points.
pub fn identity_residuals(samples: usize, seed: u64, h: f64) -> Result<IdentityResiduals> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut star_star_max = 0.0f64;
    for degree in 0..=3 {
        for &m in BASIS[degree] {
            let e = FormValue::basis_element(m);
            let back = e.hodge().hodge();
            for (a, b) in back.coeffs.iter().zip(&e.coeffs) {
                star_star_max = star_star_max.max((a - b).abs());
            }
        }
    }
    let mut cross_product_max = 0.0f64;
    let mut scalar_product_max = 0.0f64;
    for _ in 0..samples {
        let v: Point3 = [rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)];
        let w: Point3 = [rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)];
        let direct = [
            v[1] * w[2] - v[2] * w[1],
            v[2] * w[0] - v[0] * w[2],
            v[0] * w[1] - v[1] * w[0],
        ];
        let via = cross_via_forms(v, w);
        for k in 0..3 {
            cross_product_max = cross_product_max.max((direct[k] - via[k]).abs());
        }
        let dot = v[0] * w[0] + v[1] * w[1] + v[2] * w[2];
        scalar_product_max = scalar_product_max.max((dot - dot_via_forms(v, w)).abs());
    }

    let f = scalar::from_fn(|p| (p[0]).sin() * p[1] + p[2] * p[2] * p[0]);
    let curl_grad = curl(&grad(f, h)?, h)?;
    let v = VectorField3::new(
        scalar::from_fn(|p| p[1] * p[2].cos()),
        scalar::from_fn(|p| p[0] * p[0] * p[2]),
        scalar::from_fn(|p| (p[0] * p[1]).sin()),
    );
    let div_curl = div(&curl(&v, h)?, h)?;
    let mut curl_grad_max = 0.0f64;
    let mut div_curl_max = 0.0f64;
    for _ in 0..10 {
        let p: Point3 = [rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)];
        for c in curl_grad.eval(p)? {
            curl_grad_max = curl_grad_max.max(c.abs());
        }
        div_curl_max = div_curl_max.max(div_curl(p)?.abs());
    }
    Ok(IdentityResiduals {
        star_star_max,
        cross_product_max,
        scalar_product_max,
        curl_grad_max,
        div_curl_max,
        samples,
        h,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    const ALL_MASKS: [u8; 8] = [0, 1, 2, 4, 3, 5, 6, 7];

    #[test]
    fn star_table_rows() {
        let rows: Vec<(String, String)> = star_table().into_iter().map(|r| (r.input, r.output)).collect();
        let expect = [
            ("1", "dx∧dy∧dz"),
            ("dx", "dy∧dz"),
            ("dy", "-dx∧dz"),
            ("dz", "dx∧dy"),
            ("dx∧dy", "dz"),
            ("dx∧dz", "-dy"),
            ("dy∧dz", "dx"),
            ("dx∧dy∧dz", "1"),
        ];
        for ((i, o), (ei, eo)) in rows.iter().zip(expect) {
            assert_eq!((i.as_str(), o.as_str()), (ei, eo));
        }
    }

    #[test]
    fn star_star_is_identity_on_basis() {
        for m in ALL_MASKS {
            let e = FormValue::basis_element(m);
            assert_eq!(e.hodge().hodge(), e);
        }
    }

    #[test]
    fn field_hodge_matches_value_hodge() {
        for m in ALL_MASKS {
            let e = FormValue::basis_element(m);
            let f = hodge(&FormField::constant(&e)).eval([0.3, 0.2, 0.1]).unwrap();
            assert_eq!(f, e.hodge());
        }
    }

    #[test]
    fn flat_sharp() {
        let dx = flat(&VectorField3::constant([1.0, 0.0, 0.0])).eval([0.0; 3]).unwrap();
        assert_eq!(dx, FormValue::basis_element(1));
        let z = flat(&VectorField3::constant([0.0; 3])).eval([1.0, 2.0, 3.0]).unwrap();
        assert_eq!(z, FormValue::zero(1));
        let dz = FormField::constant(&FormValue::basis_element(4));
        assert_eq!(sharp(&dz).unwrap().eval([0.0; 3]).unwrap(), [0.0, 0.0, 1.0]);
        assert!(sharp(&FormField::zero(2)).is_err());

        // x dy round trip
        let alpha = FormField::new(1, vec![scalar::constant(0.0), scalar::from_fn(|p| p[0]), scalar::constant(0.0)])
            .unwrap();
        let back = flat(&sharp(&alpha).unwrap());
        let p = [1.5, -2.0, 0.5];
        assert_eq!(back.eval(p).unwrap(), alpha.eval(p).unwrap());

        let v = VectorField3::new(scalar::from_fn(|p| p[1]), scalar::from_fn(|p| -p[0]), scalar::constant(0.0));
        assert_eq!(sharp(&flat(&v)).unwrap().eval(p).unwrap(), v.eval(p).unwrap());
    }

    #[test]
    fn component_count_enforced() {
        assert!(FormField::new(2, vec![scalar::constant(1.0)]).is_err());
        assert!(FormField::new(4, vec![]).is_err());
    }

    #[test]
    fn d_of_linear_and_constant() {
        let x_dy = FormField::new(1, vec![scalar::constant(0.0), scalar::from_fn(|p| p[0]), scalar::constant(0.0)])
            .unwrap();
        let d = ext_d(&x_dy, DEFAULT_H).unwrap().eval([0.7, -0.2, 3.0]).unwrap();
        assert!((d.coeffs[0] - 1.0).abs() < 1e-10);
        assert!(d.coeffs[1].abs() < 1e-12 && d.coeffs[2].abs() < 1e-12);

        let c = ext_d(&FormField::scalar(scalar::constant(4.0)), DEFAULT_H).unwrap();
        assert_eq!(c.eval([1.0, 1.0, 1.0]).unwrap(), FormValue::zero(1));
        assert!(ext_d(&FormField::zero(3), DEFAULT_H).is_err());
    }

    #[test]
    fn dd_vanishes() {
        let h = 1e-4;
        let f = FormField::scalar(scalar::from_fn(|p| p[0].sin() * p[1]));
        let ddf = ext_d(&ext_d(&f, h).unwrap(), h).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..10 {
            let p = [rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0)];
            for c in ddf.eval(p).unwrap().coeffs {
                assert!(c.abs() < 10.0 * h, "{c}");
            }
        }
    }

    #[test]
    fn grad_curl_div_examples() {
        let h = DEFAULT_H;
        let g = grad(scalar::from_fn(|p| p[0] * p[0] + p[1] * p[1] + p[2] * p[2]), h)
            .unwrap()
            .eval([1.0, 2.0, 3.0])
            .unwrap();
        for (a, b) in g.iter().zip([2.0, 4.0, 6.0]) {
            assert!((a - b).abs() < 1e-6);
        }
        let rot = VectorField3::new(scalar::from_fn(|p| -p[1]), scalar::from_fn(|p| p[0]), scalar::constant(0.0));
        let c = curl(&rot, h).unwrap();
        let div_id = div(
            &VectorField3::new(scalar::from_fn(|p| p[0]), scalar::from_fn(|p| p[1]), scalar::from_fn(|p| p[2])),
            h,
        )
        .unwrap();
        for p in [[0.0, 0.0, 0.0], [1.0, -2.0, 0.5], [-3.0, 4.0, 7.0]] {
            // hand oracle: curl(−y, x, 0) = (∂y 0 − ∂z x, ∂z(−y) − ∂x 0, ∂x x − ∂y(−y)) = (0, 0, 2)
            let v = c.eval(p).unwrap();
            assert!(v[0].abs() < 1e-6 && v[1].abs() < 1e-6 && (v[2] - 2.0).abs() < 1e-6);
            assert!((div_id(p).unwrap() - 3.0).abs() < 1e-6);
        }
    }

    #[test]
    fn identities_hold() {
        let r = identity_residuals(100, 7, DEFAULT_H).unwrap();
        assert_eq!(r.star_star_max, 0.0);
        assert!(r.cross_product_max < 1e-12);
        assert!(r.scalar_product_max < 1e-12);
        assert!(r.curl_grad_max < 10.0 * DEFAULT_H);
        assert!(r.div_curl_max < 10.0 * DEFAULT_H);
    }
}
