//! Elliptic K3 models `y^2 = x^3 - 3AB t^4 x + AB t^5 (B t^2 - 2B t + 1)` attached to
//! decompositions, with `A = j1 j2` and `B = (1 - j1)(1 - j2)`.

use std::collections::{BTreeMap, BTreeSet};

use astro_float::BigFloat;
use rayon::prelude::*;

use cmdecomp::classgroup::reduced_forms;
use cmdecomp::decomposer::{enumerate_decompositions, CurveClass};
use cmdecomp::forms::QuadraticForm;
use cmdecomp::numtheory::split_discriminant;
use cmdecomp::Int;

use crate::complex::{Complex, RM};
use crate::jinvariant::{format_value, j_invariant, JValue};
use crate::{Error, Result};

/// Significant digits used when rendering the fibration.
const RENDER_DIGITS: usize = 30;

#[derive(Debug, Clone)]
pub struct SandwichModel<T: Int> {
    pub first: CurveClass<T>,
    pub second: CurveClass<T>,
    pub j1: JValue,
    pub j2: JValue,
    pub a: JValue,
    pub b: JValue,
}

impl<T: Int> SandwichModel<T> {
    /// The Weierstrass family over `t` with the numerical coefficients substituted.
    pub fn fibration(&self) -> String {
        self.fibration_with(RENDER_DIGITS)
    }

    pub fn fibration_with(&self, digits: usize) -> String {
        let p = self.a.precision_bits() + 64;
        let ab = JValue::from_complex(self.a.complex().mul(&self.b.complex()), self.a.precision_bits(), product_bound(&self.a, &self.b, p));
        let ab = format_value(&ab, digits);
        let b = format_value(&self.b, digits);
        format!("y^2 = x^3 - 3*({ab}) t^4 x + ({ab}) t^5 (({b}) t^2 - 2*({b}) t + 1)")
    }

    /// The larger of the error bounds on `A` and `B`.
    pub fn error_bound(&self) -> &BigFloat {
        let (ea, eb) = (self.a.error_bound(), self.b.error_bound());
        if ea.cmp(eb).unwrap_or(0) >= 0 {
            ea
        } else {
            eb
        }
    }
}

fn d_k<T: Int>(e: &CurveClass<T>) -> Result<T> {
    Ok(split_discriminant(&e.cls.disc())?.d_k)
}

/// `|x| e_y + |y| e_x + e_x e_y`, a bound on the error of a product.
fn product_bound(x: &JValue, y: &JValue, p: usize) -> BigFloat {
    let (ex, ey) = (x.error_bound(), y.error_bound());
    x.complex().abs().mul(ey, p, RM).add(&y.complex().abs().mul(ex, p, RM), p, RM).add(&ex.mul(ey, p, RM), p, RM)
}

fn one_minus(j: &JValue, p: usize) -> JValue {
    let z = Complex::one(p).sub(&j.complex());
    JValue::from_complex(z, j.precision_bits(), j.error_bound().clone())
}

fn assemble<T: Int>(first: CurveClass<T>, second: CurveClass<T>, j1: JValue, j2: JValue) -> SandwichModel<T> {
    let bits = j1.precision_bits().min(j2.precision_bits());
    let p = bits + 64;
    let a = JValue::from_complex(j1.complex().mul(&j2.complex()), bits, product_bound(&j1, &j2, p));
    let (m1, m2) = (one_minus(&j1, p), one_minus(&j2, p));
    let b = JValue::from_complex(m1.complex().mul(&m2.complex()), bits, product_bound(&m1, &m2, p));
    SandwichModel { first, second, j1, j2, a, b }
}

pub fn sandwich_model<T: Int>(e1: &CurveClass<T>, e2: &CurveClass<T>, precision_bits: usize) -> Result<SandwichModel<T>> {
    let (k1, k2) = (d_k(e1)?, d_k(e2)?);
    if k1 != k2 {
        return Err(Error::Core(cmdecomp::Error::FieldMismatch(k1.to_string(), k2.to_string())));
    }
    let j1 = j_invariant(&e1.cm_point()?, precision_bits)?;
    let j2 = j_invariant(&e2.cm_point()?, precision_bits)?;
    Ok(assemble(e1.clone(), e2.clone(), j1, j2))
}

/// One model per unordered decomposition of the surface with transcendental form `n Q0`.
pub fn shioda_inose_models<T: Int>(n: &T, q0: &QuadraticForm<T>, precision_bits: usize) -> Result<Vec<SandwichModel<T>>> {
    let report = enumerate_decompositions(n, q0)?;
    let pairs: BTreeSet<_> = report.pairs.iter().map(|p| p.unordered()).collect();
    let curves: BTreeSet<CurveClass<T>> = pairs.iter().flat_map(|(a, b)| [a.clone(), b.clone()]).collect();
    let curves: Vec<CurveClass<T>> = curves.into_iter().collect();
    let values: Vec<JValue> =
        curves.par_iter().map(|c| j_invariant(&c.cm_point()?, precision_bits)).collect::<Result<_>>()?;
    let j: BTreeMap<_, _> = curves.into_iter().zip(values).collect();
    Ok(pairs.into_iter().map(|(a, b)| assemble(a.clone(), b.clone(), j[&a].clone(), j[&b].clone())).collect())
}

/// Coefficients of `prod (x - j(tau_Q))` over the reduced forms of discriminant `d`,
/// constant term first. For a negative discriminant they approximate integers.
pub fn class_polynomial<T: Int>(d: &T, precision_bits: usize) -> Result<Vec<JValue>> {
    let p = precision_bits + 64;
    let roots: Vec<JValue> = reduced_forms(d)?
        .par_iter()
        .map(|q| j_invariant(&q.cm_point()?, precision_bits))
        .collect::<Result<_>>()?;
    // Coefficient errors are bounded by the product of (|root| + error) over all roots.
    let mut bound = BigFloat::from_u64(1, p);
    let mut coeffs = vec![Complex::one(p)];
    for r in &roots {
        let z = r.complex();
        let mut next = vec![Complex::real(BigFloat::from_u64(0, p), p); coeffs.len() + 1];
        for (i, c) in coeffs.iter().enumerate() {
            next[i + 1] = next[i + 1].add(c);
            next[i] = next[i].sub(&c.mul(&z));
        }
        coeffs = next;
        bound = bound.mul(&z.abs().add(r.error_bound(), p, RM).add(&BigFloat::from_u64(1, p), p, RM), p, RM);
    }
    let scale = bound;
    let mut total_err = BigFloat::from_u64(0, p);
    for r in &roots {
        total_err = total_err.add(r.error_bound(), p, RM);
    }
    let err = scale.mul(&total_err, p, RM);
    Ok(coeffs.into_iter().map(|c| JValue::from_complex(c, precision_bits, err.clone())).collect())
}
