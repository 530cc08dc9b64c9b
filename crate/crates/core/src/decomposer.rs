//! Decompositions `A = E1 x E2` of a singular abelian surface with `T(A) = n Q0`.
//!
//! Brute force runs every pair of curve classes with admissible conductors through the
//! period-map oracle; the counting formulas are evaluated separately and compared.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use rayon::prelude::*;
use serde::{Serialize, Serializer};

use crate::classgroup::{class_number, class_number_formula, inverse, reduced_forms, FormClass};
use crate::error::{Error, Result};
use crate::forms::{KPoint, QuadraticForm};
use crate::gcomp::{act, lift_class, ExtendedClass};
use crate::numtheory::{coprime_splitting_count, factorize, is_fundamental, split_discriminant, tau};
use crate::periods::transcendental_lattice;
use crate::scalar::Int;
use crate::JsonInt;

/// An elliptic curve with CM by `O_{K,f}`, named by its class in `C(f^2 d_K)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CurveClass<T: Int> {
    pub f: T,
    pub cls: FormClass<T>,
}

impl<T: Int> CurveClass<T> {
    pub fn new(cls: FormClass<T>) -> Result<Self> {
        let f = split_discriminant(&cls.disc())?.f;
        Ok(Self { f, cls })
    }

    pub fn cm_point(&self) -> Result<KPoint<T>> {
        self.cls.repr().cm_point()
    }
}

impl<T: Int> Serialize for CurveClass<T> {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut s = serializer.serialize_struct("CurveClass", 2)?;
        s.serialize_field("f", &JsonInt(&self.f))?;
        s.serialize_field("form", &self.cls)?;
        s.end()
    }
}

impl<T: Int> fmt::Display for CurveClass<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}@{}", self.cls.repr(), self.f)
    }
}

/// An ordered decomposition `(E1, E2)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(bound = "")]
pub struct DecompositionPair<T: Int> {
    pub first: CurveClass<T>,
    pub second: CurveClass<T>,
}

impl<T: Int> DecompositionPair<T> {
    pub fn conductors(&self) -> (T, T) {
        (self.first.f.clone(), self.second.f.clone())
    }

    pub fn is_diagonal(&self) -> bool {
        self.first == self.second
    }

    /// The pair with its curves in ascending order.
    pub fn unordered(&self) -> (CurveClass<T>, CurveClass<T>) {
        if self.first <= self.second {
            (self.first.clone(), self.second.clone())
        } else {
            (self.second.clone(), self.first.clone())
        }
    }
}

/// Which counting formula produced a prediction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum FormulaTag {
    /// `n = 1`: `h(D0)`.
    Primitive,
    /// `n > 1`, `D0` not `-3` or `-4`: `2^tau(n) h(n^2 D0)`.
    Scaled,
    /// `Q0 = (1,0,1)`, `n > 1`: `(1 + 2^(tau(n)-1)) h(-4 n^2)`.
    Gaussian,
    /// `Q0 = (1,1,1)`, `n > 1`: `(2/3)(2 + 2^(tau(n)-1)) h(-3 n^2)`.
    Eisenstein,
    /// `n = 1` and `Q0` one of `(1,0,1)`, `(1,1,1)`: a single decomposition.
    SelfProduct,
}

impl fmt::Display for FormulaTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Primitive => "primitive",
            Self::Scaled => "scaled",
            Self::Gaussian => "gaussian",
            Self::Eisenstein => "eisenstein",
            Self::SelfProduct => "self-product",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Prediction {
    pub value: u64,
    pub formula: FormulaTag,
}

/// All decompositions found for one target `n Q0`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DecompositionReport<T: Int> {
    pub n: T,
    pub q0: QuadraticForm<T>,
    pub pairs: Vec<DecompositionPair<T>>,
    pub delta_tilde: u64,
    pub delta: u64,
    pub delta0: u64,
    pub predicted: Option<Prediction>,
    pub possibly_incomplete: bool,
}

impl<T: Int> DecompositionReport<T> {
    fn new(n: T, q0: QuadraticForm<T>, mut pairs: Vec<DecompositionPair<T>>, possibly_incomplete: bool) -> Result<Self> {
        pairs.sort();
        pairs.dedup();
        let delta0 = pairs.iter().filter(|p| p.is_diagonal()).count() as u64;
        let delta = pairs.iter().map(DecompositionPair::unordered).collect::<BTreeSet<_>>().len() as u64;
        let predicted = Some(ma_count(&n, &q0)?);
        Ok(Self { n, delta_tilde: pairs.len() as u64, q0, pairs, delta, delta0, predicted, possibly_incomplete })
    }

    /// `delta~ = 2 delta - delta0`.
    pub fn counts_consistent(&self) -> bool {
        self.delta_tilde + self.delta0 == 2 * self.delta
    }

    pub fn matches_prediction(&self) -> bool {
        self.predicted.map_or(false, |p| p.value == self.delta_tilde)
    }

    /// Number of pairs per ordered conductor pair.
    pub fn survivors_by_conductors(&self) -> BTreeMap<(T, T), u64> {
        let mut out = BTreeMap::new();
        for p in &self.pairs {
            *out.entry(p.conductors()).or_insert(0) += 1;
        }
        out
    }
}

impl<T: Int> Serialize for DecompositionReport<T> {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        #[derive(Serialize)]
        #[serde(bound = "")]
        struct Bucket<'a, T: Int> {
            f1: JsonInt<'a, T>,
            f2: JsonInt<'a, T>,
            count: u64,
        }
        let by = self.survivors_by_conductors();
        let buckets: Vec<Bucket<T>> = by
            .iter()
            .map(|((f1, f2), &count)| Bucket { f1: JsonInt(f1), f2: JsonInt(f2), count })
            .collect();
        let mut s = serializer.serialize_struct("DecompositionReport", 10)?;
        s.serialize_field("n", &JsonInt(&self.n))?;
        s.serialize_field("form", &self.q0)?;
        s.serialize_field("delta_tilde", &self.delta_tilde)?;
        s.serialize_field("delta", &self.delta)?;
        s.serialize_field("delta0", &self.delta0)?;
        s.serialize_field("predicted", &self.predicted.map(|p| p.value))?;
        s.serialize_field("formula", &self.predicted.map(|p| p.formula))?;
        s.serialize_field("possibly_incomplete", &self.possibly_incomplete)?;
        s.serialize_field("by_conductors", &buckets)?;
        s.serialize_field("pairs", &self.pairs)?;
        s.end()
    }
}

/// Ordered `(f1, f2)` with `gcd(f1, f2) = f0` and `f1 f2 = n f0^2`.
pub fn admissible_conductor_pairs<T: Int>(n: &T, f0: &T) -> Result<Vec<(T, T)>> {
    if !n.is_positive() || !f0.is_positive() {
        return Err(Error::InvalidArgument(format!("n = {n} and f0 = {f0} must be positive")));
    }
    let parts: Vec<T> = factorize(n)?.prime_powers.into_iter().map(|(p, e)| num_traits::pow(p, e as usize)).collect();
    let mut out = Vec::with_capacity(1 << parts.len());
    for mask in 0u64..(1 << parts.len()) {
        let u = parts
            .iter()
            .enumerate()
            .filter(|(i, _)| mask >> i & 1 == 1)
            .fold(T::one(), |acc, (_, q)| acc * q.clone());
        let v = n.clone() / u.clone();
        out.push((f0.clone() * u, f0.clone() * v));
    }
    out.sort_by(|x, y| {
        let key = |p: &(T, T)| (p.0.clone().min(p.1.clone()), p.0.clone());
        key(x).cmp(&key(y))
    });
    Ok(out)
}

/// Every ordered pair of curve classes with admissible conductors for `(d_K, f0, n)`,
/// bucketed by the primitive part of the transcendental form.
#[derive(Debug, Clone)]
pub struct Census<T: Int> {
    pub d_k: T,
    pub f0: T,
    pub n: T,
    pub buckets: BTreeMap<FormClass<T>, Vec<DecompositionPair<T>>>,
    /// Pairs whose transcendental form does not have content `n`.
    pub off_target: Vec<(DecompositionPair<T>, QuadraticForm<T>)>,
}

fn curves<T: Int>(d_k: &T, f: &T) -> Result<Vec<(CurveClass<T>, KPoint<T>)>> {
    let d = f.clone() * f.clone() * d_k.clone();
    reduced_forms(&d)?
        .into_iter()
        .map(|q| {
            let point = q.cm_point()?;
            Ok((CurveClass { f: f.clone(), cls: FormClass::from_form(&q)? }, point))
        })
        .collect()
}

/// Transcendental forms of `E_X x E_Y` for all classes `X`, `Y` at conductors `f1`, `f2`.
pub fn product_table<T: Int>(d_k: &T, f1: &T, f2: &T) -> Result<Vec<(DecompositionPair<T>, QuadraticForm<T>)>> {
    let left = curves(d_k, f1)?;
    let right = curves(d_k, f2)?;
    let rows: Vec<Vec<(DecompositionPair<T>, QuadraticForm<T>)>> = left
        .par_iter()
        .map(|(x, px)| {
            right
                .iter()
                .map(|(y, py)| {
                    let t = transcendental_lattice(px, py)?.form();
                    Ok((DecompositionPair { first: x.clone(), second: y.clone() }, t))
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<_>>()?;
    Ok(rows.into_iter().flatten().collect())
}

pub fn census<T: Int>(d_k: &T, f0: &T, n: &T) -> Result<Census<T>> {
    if !(d_k.is_negative() && is_fundamental(d_k)) {
        return Err(Error::NotFundamental(d_k.to_string()));
    }
    let mut buckets: BTreeMap<FormClass<T>, Vec<DecompositionPair<T>>> = BTreeMap::new();
    let mut off_target = Vec::new();
    for (f1, f2) in admissible_conductor_pairs(n, f0)? {
        for (pair, t) in product_table(d_k, &f1, &f2)? {
            let (content, primitive) = t.content();
            if content == *n {
                buckets.entry(FormClass::from_form(&primitive)?).or_default().push(pair);
            } else {
                off_target.push((pair, t));
            }
        }
    }
    for pairs in buckets.values_mut() {
        pairs.sort();
    }
    Ok(Census { d_k: d_k.clone(), f0: f0.clone(), n: n.clone(), buckets, off_target })
}

impl<T: Int> Census<T> {
    /// The brute-force report for target `n Q0`, `Q0` of conductor `f0`.
    pub fn report(&self, q0: &FormClass<T>) -> Result<DecompositionReport<T>> {
        let pairs = self.buckets.get(q0).cloned().unwrap_or_default();
        DecompositionReport::new(self.n.clone(), q0.repr().clone(), pairs, false)
    }
}

fn target_data<T: Int>(q0: &QuadraticForm<T>) -> Result<(FormClass<T>, T, T)> {
    let cls = FormClass::from_form(q0)?;
    let split = split_discriminant(&q0.discriminant())?;
    Ok((cls, split.d_k, split.f))
}

/// All ordered decompositions of the surface with transcendental form `n Q0`, by brute force.
pub fn enumerate_decompositions<T: Int>(n: &T, q0: &QuadraticForm<T>) -> Result<DecompositionReport<T>> {
    let (cls, d_k, f0) = target_data(q0)?;
    census(&d_k, &f0, n)?.report(&cls)
}

/// Decompositions generated by the `C(D)`-action on lifts of `(Q0, P0)`.
///
/// When `d_K` is `-3` or `-4` and `f0 = 1`, the action need not reach every decomposition
/// and the report is flagged as possibly incomplete.
pub fn classify_via_action<T: Int>(n: &T, q0: &QuadraticForm<T>) -> Result<DecompositionReport<T>> {
    let (cls, d_k, f0) = target_data(q0)?;
    let f = n.clone() * f0.clone();
    let group = reduced_forms(&(f.clone() * f.clone() * d_k.clone()))?;
    let principal0 = FormClass::principal(&q0.discriminant())?;
    let mut pairs = Vec::new();
    for (f1, f2) in admissible_conductor_pairs(n, &f0)? {
        let q1 = ExtendedClass::of(lift_class(&cls, &(f1.clone() * f1.clone() * d_k.clone()))?)?;
        let q2 = ExtendedClass::of(lift_class(&principal0, &(f2.clone() * f2.clone() * d_k.clone()))?)?;
        for r in &group {
            let r = FormClass::from_form(r)?;
            let x = act(&r, &q1)?;
            let y = act(&inverse(&r), &q2)?;
            pairs.push(DecompositionPair {
                first: CurveClass { f: x.conductor().clone(), cls: x.class().clone() },
                second: CurveClass { f: y.conductor().clone(), cls: y.class().clone() },
            });
        }
    }
    let special = d_k == T::lit(-3) || d_k == T::lit(-4);
    DecompositionReport::new(n.clone(), cls.repr().clone(), pairs, special && f0.is_one())
}

fn pow2(k: u32) -> u64 {
    1u64 << k
}

/// Predicted number of ordered decompositions of `n Q0`.
pub fn ma_count<T: Int>(n: &T, q0: &QuadraticForm<T>) -> Result<Prediction> {
    let cls = FormClass::from_form(q0)?;
    let d0 = q0.discriminant();
    let special = d0 == T::lit(-3) || d0 == T::lit(-4);
    if n.is_one() {
        let (value, formula) = if special { (1, FormulaTag::SelfProduct) } else { (class_number(&d0)?, FormulaTag::Primitive) };
        return Ok(Prediction { value, formula });
    }
    let t = tau(n)?;
    let dn = n.clone() * n.clone() * d0.clone();
    if !special {
        return Ok(Prediction { value: pow2(t) * class_number(&dn)?, formula: FormulaTag::Scaled });
    }
    debug_assert!(cls.is_principal());
    let h = class_number_formula(&d0, n)?;
    if d0 == T::lit(-4) {
        Ok(Prediction { value: (1 + pow2(t - 1)) * h, formula: FormulaTag::Gaussian })
    } else {
        let num = 2 * (2 + pow2(t - 1)) * h;
        if num % 3 != 0 {
            return Err(Error::Divisibility(format!("(2/3)(2 + 2^{}) * {h} is not an integer", t - 1)));
        }
        Ok(Prediction { value: num / 3, formula: FormulaTag::Eisenstein })
    }
}

/// One line of a formula sweep.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SweepRow<T: Int> {
    pub d_k: T,
    pub f0: T,
    pub q0: QuadraticForm<T>,
    pub n: T,
    pub delta_tilde: u64,
    pub predicted: Option<u64>,
    pub formula: Option<FormulaTag>,
}

impl<T: Int> SweepRow<T> {
    pub fn matches(&self) -> bool {
        self.predicted == Some(self.delta_tilde)
    }
}

impl<T: Int> Serialize for SweepRow<T> {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut s = serializer.serialize_struct("SweepRow", 8)?;
        s.serialize_field("d_K", &JsonInt(&self.d_k))?;
        s.serialize_field("f0", &JsonInt(&self.f0))?;
        s.serialize_field("Q0", &self.q0)?;
        s.serialize_field("n", &JsonInt(&self.n))?;
        s.serialize_field("delta_tilde", &self.delta_tilde)?;
        s.serialize_field("predicted", &self.predicted)?;
        s.serialize_field("formula", &self.formula)?;
        s.serialize_field("match", &self.matches())?;
        s.end()
    }
}

/// Brute force against the formulas for every `Q0` of conductor `<= f0_max` and `n <= n_max`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(bound = "")]
pub struct SweepReport<T: Int> {
    pub rows: Vec<SweepRow<T>>,
}

impl<T: Int> SweepReport<T> {
    pub fn mismatches(&self) -> Vec<&SweepRow<T>> {
        self.rows.iter().filter(|r| !r.matches()).collect()
    }
}

pub fn verify_ma<T: Int>(d_k: &T, f0_max: u64, n_max: u64) -> Result<SweepReport<T>> {
    if f0_max == 0 || n_max == 0 {
        return Err(Error::InvalidArgument("sweep bounds must be positive".into()));
    }
    let jobs: Vec<(u64, u64)> = (1..=f0_max).flat_map(|f0| (1..=n_max).map(move |n| (f0, n))).collect();
    let chunks: Vec<Vec<SweepRow<T>>> = jobs
        .par_iter()
        .map(|&(f0, n)| {
            let (f0, n) = (T::from_u64(f0).expect("small"), T::from_u64(n).expect("small"));
            let c = census(d_k, &f0, &n)?;
            reduced_forms(&(f0.clone() * f0.clone() * d_k.clone()))?
                .into_iter()
                .map(|q0| {
                    let report = c.report(&FormClass::from_form(&q0)?)?;
                    Ok(SweepRow {
                        d_k: d_k.clone(),
                        f0: f0.clone(),
                        q0,
                        n: n.clone(),
                        delta_tilde: report.delta_tilde,
                        predicted: report.predicted.map(|p| p.value),
                        formula: report.predicted.map(|p| p.formula),
                    })
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<_>>()?;
    Ok(SweepReport { rows: chunks.into_iter().flatten().collect() })
}

/// Outcome of checking the class-number sum identity.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "status", rename_all = "kebab-case")]
pub enum SumIdentity {
    Holds { lhs: u64, rhs: u64 },
    Fails { lhs: u64, rhs: u64 },
    /// `d_K` is `-3` or `-4` with `f0 = 1`, where the identity is not claimed.
    Skipped,
}

/// `#pairs * h(O_{K,n f0}) h(O_{K,f0}) = sum over admissible (f1, f2) of h(O_{K,f1}) h(O_{K,f2})`.
pub fn verify_sum_identity<T: Int>(d_k: &T, f0: &T, n: &T) -> Result<SumIdentity> {
    if (*d_k == T::lit(-3) || *d_k == T::lit(-4)) && f0.is_one() {
        return Ok(SumIdentity::Skipped);
    }
    let f = n.clone() * f0.clone();
    let lhs = coprime_splitting_count(n)? * class_number_formula(d_k, &f)? * class_number_formula(d_k, f0)?;
    let mut rhs = 0;
    for (f1, f2) in admissible_conductor_pairs(n, f0)? {
        rhs += class_number_formula(d_k, &f1)? * class_number_formula(d_k, &f2)?;
    }
    Ok(if lhs == rhs { SumIdentity::Holds { lhs, rhs } } else { SumIdentity::Fails { lhs, rhs } })
}
