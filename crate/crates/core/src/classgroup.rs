//! The form class group `C(D)` of primitive positive definite forms.

use std::fmt;

use num_traits::One;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::forms::{principal_form, QuadraticForm};
use crate::numtheory::{check_discriminant, factorize, is_fundamental, kronecker, unit_index};
use crate::scalar::{gcd_all, isqrt, rat, xgcd, Int, Rat};

/// A proper equivalence class of primitive forms, keyed by its reduced representative.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FormClass<T> {
    repr: QuadraticForm<T>,
}

impl<T: Int> FormClass<T> {
    /// The class of a primitive positive definite form.
    pub fn from_form(q: &QuadraticForm<T>) -> Result<Self> {
        if !(q.a.is_positive() && q.discriminant().is_negative()) {
            return Err(Error::NotPositiveDefinite(q.to_string()));
        }
        if !q.is_primitive() {
            return Err(Error::Imprimitive(q.to_string()));
        }
        Ok(Self { repr: q.reduced() })
    }

    /// Wraps a form already known to be reduced and primitive.
    pub(crate) fn from_reduced(repr: QuadraticForm<T>) -> Self {
        debug_assert!(repr.is_reduced() && repr.is_primitive());
        Self { repr }
    }

    pub fn principal(d: &T) -> Result<Self> {
        Ok(Self { repr: principal_form(d)? })
    }

    pub fn repr(&self) -> &QuadraticForm<T> {
        &self.repr
    }

    pub fn disc(&self) -> T {
        self.repr.discriminant()
    }

    pub fn is_principal(&self) -> bool {
        self.repr.a.is_one()
    }
}

impl<T: Int> fmt::Display for FormClass<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}]", self.repr)
    }
}

impl<T: Int> Serialize for FormClass<T> {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        self.repr.serialize(serializer)
    }
}

/// The finite abelian group `C(D)` with its elements sorted by `(a, b, c)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClassGroup<T> {
    d: T,
    elements: Vec<FormClass<T>>,
    structure: Vec<u64>,
}

impl<T: Int> ClassGroup<T> {
    pub fn disc(&self) -> &T {
        &self.d
    }

    pub fn elements(&self) -> &[FormClass<T>] {
        &self.elements
    }

    /// Orders of the cyclic factors, each dividing the next.
    pub fn structure(&self) -> &[u64] {
        &self.structure
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn principal(&self) -> &FormClass<T> {
        &self.elements[0]
    }

    pub fn contains(&self, x: &FormClass<T>) -> bool {
        self.elements.binary_search(x).is_ok()
    }
}

/// All reduced primitive forms of discriminant `d`, sorted by `(a, b, c)`.
pub fn reduced_forms<T: Int>(d: &T) -> Result<Vec<QuadraticForm<T>>> {
    check_discriminant(d)?;
    let a_max = isqrt(&(-d.clone() / T::lit(3)));
    let four = T::lit(4);
    let mut out = Vec::new();
    let mut a = T::one();
    while a <= a_max {
        let mut b = -a.clone() + T::one();
        while b <= a {
            let num = b.clone() * b.clone() - d.clone();
            let den = four.clone() * a.clone();
            if (num.clone() % den.clone()).is_zero() {
                let c = num / den;
                let q = QuadraticForm { a: a.clone(), b: b.clone(), c };
                if q.is_reduced() && gcd_all(&[q.a.clone(), q.b.clone(), q.c.clone()]).is_one() {
                    out.push(q);
                }
            }
            b = b + T::one();
        }
        a = a + T::one();
    }
    out.sort();
    Ok(out)
}

/// Enumerates `C(d)` and computes its invariant factors.
pub fn enumerate_class_group<T: Int>(d: &T) -> Result<ClassGroup<T>> {
    let elements: Vec<FormClass<T>> = reduced_forms(d)?.into_iter().map(FormClass::from_reduced).collect();
    let structure = group_structure(&elements)?;
    Ok(ClassGroup { d: d.clone(), elements, structure })
}

/// `h(d)`, the number of reduced primitive forms.
pub fn class_number<T: Int>(d: &T) -> Result<u64> {
    Ok(reduced_forms(d)?.len() as u64)
}

/// `h(f^2 d_K)` from `h(d_K)` by the conductor formula, in exact rational arithmetic.
pub fn class_number_formula<T: Int>(d_k: &T, f: &T) -> Result<u64> {
    if !(d_k.is_negative() && is_fundamental(d_k)) {
        return Err(Error::NotFundamental(d_k.to_string()));
    }
    if !f.is_positive() {
        return Err(Error::InvalidArgument(format!("conductor {f} must be positive")));
    }
    let mut h: Rat<T> = rat(T::from_u64(class_number(d_k)?).expect("class number fits"));
    h = h * rat(f.clone()) / rat(T::from_u32(unit_index(d_k, f)).expect("small"));
    for p in factorize(f)?.primes() {
        let chi = T::lit(i64::from(kronecker(d_k, p)));
        h = h * (Rat::one() - Rat::new(chi, p.clone()));
    }
    debug_assert!(h.is_integer());
    h.to_integer()
        .to_u64()
        .ok_or_else(|| Error::InvalidArgument(format!("class number of conductor {f} out of range")))
}

/// Dirichlet composition of two forms of the same discriminant with
/// `gcd(a, a', (b + b')/2) = 1`, which need not be primitive. The middle coefficient is the
/// least non-negative solution modulo `2aa'`.
pub(crate) fn dirichlet_united<T: Int>(q1: &QuadraticForm<T>, q2: &QuadraticForm<T>) -> Option<QuadraticForm<T>> {
    let d = q1.discriminant();
    debug_assert_eq!(d, q2.discriminant());
    let two = T::lit(2);
    let h = (q1.b.clone() + q2.b.clone()) / two.clone();
    let (g1, x1, y1) = xgcd(&q1.a, &q2.a);
    let (e, x2, y2) = xgcd(&g1, &h);
    if !e.is_one() {
        return None;
    }
    let (u, v, w) = (x1 * x2.clone(), y1 * x2, y2);
    let modulus = two.clone() * q1.a.clone() * q2.a.clone();
    let big_b = (u * q1.a.clone() * q2.b.clone()
        + v * q2.a.clone() * q1.b.clone()
        + w * (q1.b.clone() * q2.b.clone() + d.clone()) / two)
        .mod_floor(&modulus);
    let a = q1.a.clone() * q2.a.clone();
    let c = (big_b.clone() * big_b.clone() - d) / (T::lit(4) * a.clone());
    Some(QuadraticForm { a, b: big_b, c })
}

/// Dirichlet composition after moving `q2` to a leading coefficient coprime to `2 a D`.
pub(crate) fn dirichlet<T: Int>(q1: &QuadraticForm<T>, q2: &QuadraticForm<T>) -> Result<QuadraticForm<T>> {
    if let Some(q) = dirichlet_united(q1, q2) {
        return Ok(q);
    }
    let modulus = T::lit(2) * q1.a.clone() * q1.discriminant();
    let moved = q2.with_leading_coprime_to(&modulus.abs())?;
    dirichlet_united(q1, &moved).ok_or_else(|| Error::Divisibility(format!("cannot unite {q1} and {q2}")))
}

/// The class of the Dirichlet composition of two primitive forms of equal discriminant.
pub fn compose<T: Int>(q1: &QuadraticForm<T>, q2: &QuadraticForm<T>) -> Result<FormClass<T>> {
    let (d1, d2) = (q1.discriminant(), q2.discriminant());
    if d1 != d2 {
        return Err(Error::DiscriminantMismatch(d1.to_string(), d2.to_string()));
    }
    for q in [q1, q2] {
        if !q.is_primitive() {
            return Err(Error::Imprimitive(q.to_string()));
        }
    }
    FormClass::from_form(&dirichlet(q1, q2)?)
}

/// Composition of classes.
pub fn compose_classes<T: Int>(x: &FormClass<T>, y: &FormClass<T>) -> Result<FormClass<T>> {
    compose(x.repr(), y.repr())
}

/// The inverse class, represented by `(a, -b, c)`.
pub fn inverse<T: Int>(x: &FormClass<T>) -> FormClass<T> {
    FormClass { repr: x.repr.opposite().reduced() }
}

/// `x^k` for `k >= 0`.
pub fn power<T: Int>(x: &FormClass<T>, k: u64) -> Result<FormClass<T>> {
    let mut acc = FormClass::principal(&x.disc())?;
    let mut base = x.clone();
    let mut k = k;
    while k > 0 {
        if k & 1 == 1 {
            acc = compose_classes(&acc, &base)?;
        }
        base = compose_classes(&base, &base)?;
        k >>= 1;
    }
    Ok(acc)
}

/// Order of `x` in its class group.
pub fn element_order<T: Int>(x: &FormClass<T>) -> Result<u64> {
    let mut k = 1;
    let mut y = x.clone();
    while !y.is_principal() {
        y = compose_classes(&y, x)?;
        k += 1;
    }
    Ok(k)
}

fn group_structure<T: Int>(elements: &[FormClass<T>]) -> Result<Vec<u64>> {
    let h = elements.len() as u64;
    let orders: Vec<u64> = elements.iter().map(element_order).collect::<Result<_>>()?;
    // Per prime: cyclic factor exponents, largest first.
    let mut per_prime: Vec<Vec<u64>> = Vec::new();
    for (p, e) in factorize(&(h as i64))?.prime_powers {
        let p = p as u64;
        let mut counts = vec![1u64];
        let mut pk = 1u64;
        for _ in 0..e {
            pk *= p;
            counts.push(orders.iter().filter(|&&o| pk % o == 0).count() as u64);
        }
        // r[k] = number of cyclic factors of order >= p^k.
        let r: Vec<u32> = (1..counts.len()).map(|k| ilog(counts[k] / counts[k - 1], p)).collect();
        let mut factors = Vec::new();
        for k in 0..r.len() {
            let next = r.get(k + 1).copied().unwrap_or(0);
            for _ in 0..(r[k] - next) {
                factors.push(p.pow(k as u32 + 1));
            }
        }
        factors.sort_unstable_by(|a, b| b.cmp(a));
        per_prime.push(factors);
    }
    let len = per_prime.iter().map(Vec::len).max().unwrap_or(0);
    let mut structure: Vec<u64> = (0..len)
        .map(|i| per_prime.iter().map(|fs| fs.get(i).copied().unwrap_or(1)).product())
        .collect();
    structure.reverse();
    Ok(structure)
}

fn ilog(mut v: u64, p: u64) -> u32 {
    let mut k = 0;
    while v > 1 {
        v /= p;
        k += 1;
    }
    k
}
