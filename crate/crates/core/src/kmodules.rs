//! Elements and rank-two lattices of an imaginary quadratic field `Q(sqrt(d_K))`.
//!
//! Elements are written `x + y*w` with `w = (d_K + sqrt(d_K)) / 2`, which satisfies
//! `w^2 = d_K w - N_w` where `N_w = (d_K^2 - d_K) / 4`.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};


use crate::classgroup::FormClass;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::forms::QuadraticForm;
use crate::linalg::hnf_rows;
use crate::numtheory::{is_fundamental, split_discriminant};
use crate::scalar::{gcd_all, rat, Int, Rat};

/// The exact field element `x + y*w_K`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct KElement<T: Int> {
    x: Rat<T>,
    y: Rat<T>,
    d_k: T,
}

fn norm_w<T: Int>(d_k: &T) -> T {
    (d_k.clone() * d_k.clone() - d_k.clone()) / T::lit(4)
}

impl<T: Int> KElement<T> {
    /// `d_k` is trusted to be a negative fundamental discriminant; use
    /// [`KElement::checked`] for untrusted input.
    pub fn new(x: Rat<T>, y: Rat<T>, d_k: T) -> Self {
        debug_assert!(d_k.is_negative());
        Self { x, y, d_k }
    }

    pub fn checked(x: Rat<T>, y: Rat<T>, d_k: T) -> Result<Self> {
        if d_k.is_negative() && is_fundamental(&d_k) {
            Ok(Self { x, y, d_k })
        } else {
            Err(Error::NotFundamental(d_k.to_string()))
        }
    }

    pub fn from_int(v: T, d_k: &T) -> Self {
        Self::new(rat(v), Rat::zero(), d_k.clone())
    }

    pub fn from_rat(v: Rat<T>, d_k: &T) -> Self {
        Self::new(v, Rat::zero(), d_k.clone())
    }

    pub fn zero(d_k: &T) -> Self {
        Self::from_int(T::zero(), d_k)
    }

    pub fn one(d_k: &T) -> Self {
        Self::from_int(T::one(), d_k)
    }

    /// The generator `w_K` of the maximal order.
    pub fn w(d_k: &T) -> Self {
        Self::new(Rat::zero(), Rat::one(), d_k.clone())
    }

    /// `sqrt(d_K) = 2 w_K - d_K`.
    pub fn sqrt_dk(d_k: &T) -> Self {
        Self::new(rat(-d_k.clone()), rat(T::lit(2)), d_k.clone())
    }

    /// Coordinate on `1`.
    pub fn x(&self) -> &Rat<T> {
        &self.x
    }

    /// Coordinate on `w_K`.
    pub fn y(&self) -> &Rat<T> {
        &self.y
    }

    pub fn d_k(&self) -> &T {
        &self.d_k
    }

    /// Rational part in the basis `{1, sqrt(d_K)}`.
    pub fn rational_part(&self) -> Rat<T> {
        self.x.clone() + self.y.clone() * rat(self.d_k.clone()) / rat(T::lit(2))
    }

    /// Coefficient of `sqrt(d_K)`.
    pub fn sqrt_coeff(&self) -> Rat<T> {
        self.y.clone() / rat(T::lit(2))
    }

    pub fn is_zero(&self) -> bool {
        self.x.is_zero() && self.y.is_zero()
    }

    pub fn is_rational(&self) -> bool {
        self.y.is_zero()
    }

    /// Whether both coordinates are integers, i.e. the element lies in the maximal order.
    pub fn is_integral(&self) -> bool {
        self.x.is_integer() && self.y.is_integer()
    }

    pub fn conj(&self) -> Self {
        Self::new(self.x.clone() + self.y.clone() * rat(self.d_k.clone()), -self.y.clone(), self.d_k.clone())
    }

    pub fn norm(&self) -> Rat<T> {
        let (x, y) = (&self.x, &self.y);
        x.clone() * x.clone() + rat(self.d_k.clone()) * x.clone() * y.clone() + rat(norm_w(&self.d_k)) * y.clone() * y.clone()
    }

    pub fn trace(&self) -> Rat<T> {
        rat(T::lit(2)) * self.x.clone() + rat(self.d_k.clone()) * self.y.clone()
    }

    pub fn scale(&self, k: &Rat<T>) -> Self {
        Self::new(self.x.clone() * k.clone(), self.y.clone() * k.clone(), self.d_k.clone())
    }

    pub fn inverse(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::InvalidArgument("inverse of zero".into()));
        }
        Ok(self.conj().scale(&self.norm().recip()))
    }

    pub fn div(&self, other: &Self) -> Result<Self> {
        self.check_field(other)?;
        Ok(self.clone() * other.inverse()?)
    }

    pub fn check_field(&self, other: &Self) -> Result<()> {
        if self.d_k == other.d_k {
            Ok(())
        } else {
            Err(Error::FieldMismatch(self.d_k.to_string(), other.d_k.to_string()))
        }
    }
}

impl<T: Int> Add for KElement<T> {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        debug_assert_eq!(self.d_k, rhs.d_k);
        Self::new(self.x + rhs.x, self.y + rhs.y, self.d_k)
    }
}

impl<T: Int> Sub for KElement<T> {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        debug_assert_eq!(self.d_k, rhs.d_k);
        Self::new(self.x - rhs.x, self.y - rhs.y, self.d_k)
    }
}

impl<T: Int> Neg for KElement<T> {
    type Output = Self;
    fn neg(self) -> Self {
        Self::new(-self.x, -self.y, self.d_k)
    }
}

impl<T: Int> Mul for KElement<T> {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        debug_assert_eq!(self.d_k, rhs.d_k);
        let n = rat(norm_w(&self.d_k));
        let d = rat(self.d_k.clone());
        let yy = self.y.clone() * rhs.y.clone();
        let x = self.x.clone() * rhs.x.clone() - n * yy.clone();
        let y = self.x * rhs.y + rhs.x * self.y + d * yy;
        Self::new(x, y, self.d_k)
    }
}

impl<T: Int> fmt::Display for KElement<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} + {}*w[{}]", self.x, self.y, self.d_k)
    }
}

/// A rank-two `Z`-module `scale * (Z a + Z (b + c w_K))` in canonical form:
/// `a > 0`, `c > 0`, `0 <= b < a`, `gcd(a, b, c) = 1` and `scale > 0`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct KModule<T: Int> {
    d_k: T,
    scale: Rat<T>,
    a: T,
    b: T,
    c: T,
}

impl<T: Int> KModule<T> {
    /// The `Z`-span of `generators`; fails unless it has rank two.
    pub fn from_generators(d_k: &T, generators: &[KElement<T>]) -> Result<Self> {
        if !(d_k.is_negative() && is_fundamental(d_k)) {
            return Err(Error::NotFundamental(d_k.to_string()));
        }
        for g in generators {
            if g.d_k != *d_k {
                return Err(Error::FieldMismatch(d_k.to_string(), g.d_k.to_string()));
            }
        }
        let den = generators
            .iter()
            .fold(T::one(), |acc, g| acc.lcm(g.x.denom()).lcm(g.y.denom()));
        // Coordinates ordered (y, x) so the echelon form is [[c, b], [0, a]].
        let rows: Vec<Vec<T>> = generators
            .iter()
            .map(|g| {
                let y = g.y.clone() * rat(den.clone());
                let x = g.x.clone() * rat(den.clone());
                vec![y.to_integer(), x.to_integer()]
            })
            .collect();
        let h = hnf_rows(&rows);
        if h.len() != 2 || h[0][0].is_zero() {
            return Err(Error::RankDefect { expected: 2, found: h.len() });
        }
        let (c, b, a) = (h[0][0].clone(), h[0][1].clone(), h[1][1].clone());
        let g = gcd_all(&[a.clone(), b.clone(), c.clone()]);
        Ok(Self {
            d_k: d_k.clone(),
            scale: Rat::new(g.clone(), den),
            a: a / g.clone(),
            b: b / g.clone(),
            c: c / g,
        })
    }

    /// The maximal order `Z + Z w_K`.
    pub fn maximal_order(d_k: &T) -> Result<Self> {
        Self::from_generators(d_k, &[KElement::one(d_k), KElement::w(d_k)])
    }

    /// The order of conductor `f`, `Z + Z f w_K`.
    pub fn order(d_k: &T, f: &T) -> Result<Self> {
        let fw = KElement::w(d_k).scale(&rat(f.clone()));
        Self::from_generators(d_k, &[KElement::one(d_k), fw])
    }

    pub fn d_k(&self) -> &T {
        &self.d_k
    }

    pub fn scale_factor(&self) -> &Rat<T> {
        &self.scale
    }

    /// Canonical integer triangle `(a, b, c)` of the primitive part.
    pub fn triangle(&self) -> (&T, &T, &T) {
        (&self.a, &self.b, &self.c)
    }

    /// The canonical basis `scale * a`, `scale * (b + c w_K)`, positively oriented.
    pub fn basis(&self) -> [KElement<T>; 2] {
        [
            KElement::from_int(self.a.clone(), &self.d_k).scale(&self.scale),
            KElement::new(rat(self.b.clone()), rat(self.c.clone()), self.d_k.clone()).scale(&self.scale),
        ]
    }

    /// Membership test.
    pub fn contains(&self, z: &KElement<T>) -> bool {
        if z.d_k != self.d_k {
            return false;
        }
        let x = z.x.clone() / self.scale.clone();
        let y = z.y.clone() / self.scale.clone();
        if !x.is_integer() || !y.is_integer() {
            return false;
        }
        let (x, y) = (x.to_integer(), y.to_integer());
        if !(y.clone() % self.c.clone()).is_zero() {
            return false;
        }
        let k = y / self.c.clone();
        ((x - k * self.b.clone()) % self.a.clone()).is_zero()
    }

    /// The module `lambda * M`.
    pub fn scaled_by(&self, lambda: &KElement<T>) -> Result<Self> {
        let gens: Vec<KElement<T>> = self.basis().into_iter().map(|e| e * lambda.clone()).collect();
        Self::from_generators(&self.d_k, &gens)
    }
}

impl<T: Int> fmt::Display for KModule<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} * [{}, {} + {}*w[{}]]", self.scale, self.a, self.b, self.c, self.d_k)
    }
}

/// The `Z`-span of the four pairwise products of basis elements.
pub fn module_product<T: Int>(m1: &KModule<T>, m2: &KModule<T>) -> Result<KModule<T>> {
    if m1.d_k != m2.d_k {
        return Err(Error::FieldMismatch(m1.d_k.to_string(), m2.d_k.to_string()));
    }
    let mut gens = Vec::with_capacity(4);
    for e1 in m1.basis() {
        for e2 in m2.basis() {
            gens.push(e1.clone() * e2);
        }
    }
    KModule::from_generators(&m1.d_k, &gens)
}

/// Conductor of the ring `{x in K : xM in M}`.
pub fn cm_ring<T: Int>(m: &KModule<T>) -> T {
    let (a, b, c) = (&m.a, &m.b, &m.c);
    // Least g > 0 with g * (x, y) in Z(a, 0) + Z(b, c), coordinates on {1, w}.
    let least_multiple = |x: T, y: T| -> T {
        let g0 = c.clone() / c.gcd(&y);
        let t = g0.clone() * x - (g0.clone() * y / c.clone()) * b.clone();
        g0 * (a.clone() / a.gcd(&t))
    };
    let nw = norm_w(&m.d_k);
    // w * a and w * (b + c w) in coordinates.
    let f1 = least_multiple(T::zero(), a.clone());
    let f2 = least_multiple(-c.clone() * nw, b.clone() + c.clone() * m.d_k.clone());
    f1.lcm(&f2)
}

/// The module `[a, (-b + sqrt(D)) / 2]` of a primitive positive definite form.
pub fn form_to_module<T: Int>(q: &QuadraticForm<T>) -> Result<KModule<T>> {
    if !(q.a.is_positive() && q.discriminant().is_negative()) {
        return Err(Error::NotPositiveDefinite(q.to_string()));
    }
    if !q.is_primitive() {
        return Err(Error::Imprimitive(q.to_string()));
    }
    let split = split_discriminant(&q.discriminant())?;
    let d_k = split.d_k;
    let two = T::lit(2);
    // (-b + f sqrt(d_K)) / 2 = (-b - f d_K) / 2 + f w.
    let beta = KElement::new(
        Rat::new(-q.b.clone() - split.f.clone() * d_k.clone(), two),
        rat(split.f),
        d_k.clone(),
    );
    KModule::from_generators(&d_k, &[KElement::from_int(q.a.clone(), &d_k), beta])
}

/// Norm form of the canonical basis divided by the module norm, before reduction.
fn oriented_norm_form<T: Int>(m: &KModule<T>, f: &T) -> QuadraticForm<T> {
    let (a, b, c) = (&m.a, &m.b, &m.c);
    let d = &m.d_k;
    let nw = norm_w(d);
    // N(x a - y (b + c w)) for the basis (a, b + c w).
    let qa = a.clone() * a.clone();
    let qb = -(a.clone() * (T::lit(2) * b.clone() + c.clone() * d.clone()));
    let qc = b.clone() * b.clone() + d.clone() * b.clone() * c.clone() + nw * c.clone() * c.clone();
    let norm = a.clone() * c.clone();
    let unscale = |v: T| v * f.clone() / norm.clone();
    QuadraticForm { a: unscale(qa), b: unscale(qb), c: unscale(qc) }
}

/// Conductor of the CM ring and the proper class of the normalized norm form.
pub fn module_to_class<T: Int>(m: &KModule<T>) -> Result<(T, FormClass<T>)> {
    let f = cm_ring(m);
    let q = oriented_norm_form(m, &f);
    Ok((f, FormClass::from_form(&q)?))
}

/// A `lambda` with `lambda * M1 = M2`, if the modules are homothetic.
pub fn is_homothetic<T: Int>(m1: &KModule<T>, m2: &KModule<T>) -> Result<Option<KElement<T>>> {
    if m1.d_k != m2.d_k {
        return Err(Error::FieldMismatch(m1.d_k.to_string(), m2.d_k.to_string()));
    }
    let (f1, c1) = module_to_class(m1)?;
    let (f2, c2) = module_to_class(m2)?;
    if f1 != f2 || c1 != c2 {
        return Ok(None);
    }
    let reduced_first = |m: &KModule<T>, f: &T| -> KElement<T> {
        let (_, g) = oriented_norm_form(m, f).reduce();
        let [alpha, beta] = m.basis();
        // Basis change matching the form's change of variables.
        alpha.scale(&rat(g.p.clone())) - beta.scale(&rat(g.r.clone()))
    };
    let lambda = reduced_first(m2, &f2).div(&reduced_first(m1, &f1))?;
    debug_assert_eq!(m1.scaled_by(&lambda)?, *m2);
    Ok(Some(lambda))
}
