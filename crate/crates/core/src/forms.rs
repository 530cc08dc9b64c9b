//! Positive definite integral binary quadratic forms `ax^2 + bxy + cy^2`.

use std::cmp::Ordering;
use std::fmt;

use serde::ser::{Serialize, SerializeSeq, Serializer};

use num_traits::Signed;

use crate::error::{Error, Result};
use crate::kmodules::KElement;
use crate::numtheory::{check_discriminant, split_discriminant};
use crate::scalar::{gcd_all, isqrt, xgcd, Int, Rat};

/// Default cap on the coordinate box searched by [`QuadraticForm::represent_coprime`].
pub const DEFAULT_REPRESENT_CAP: u64 = 1 << 14;

/// The form `ax^2 + bxy + cy^2`, stored verbatim (never auto-reduced).
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct QuadraticForm<T> {
    pub a: T,
    pub b: T,
    pub c: T,
}

/// A proper change of variables `(x, y) -> (px + qy, rx + sy)` with `ps - qr = 1`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct UnimodularMap<T> {
    pub p: T,
    pub q: T,
    pub r: T,
    pub s: T,
}

impl<T: Int> UnimodularMap<T> {
    pub fn identity() -> Self {
        Self { p: T::one(), q: T::zero(), r: T::zero(), s: T::one() }
    }

    pub fn new(p: T, q: T, r: T, s: T) -> Result<Self> {
        let m = Self { p, q, r, s };
        if m.det().is_one() {
            Ok(m)
        } else {
            Err(Error::InvalidArgument(format!("map {m:?} does not have determinant 1")))
        }
    }

    pub fn det(&self) -> T {
        self.p.clone() * self.s.clone() - self.q.clone() * self.r.clone()
    }

    /// `x -> x + k y`, shifting the middle coefficient by `2ak`.
    pub fn translation(k: T) -> Self {
        Self { p: T::one(), q: k, r: T::zero(), s: T::one() }
    }

    /// `(x, y) -> (-y, x)`, mapping `(a, b, c)` to `(c, -b, a)`.
    pub fn swap() -> Self {
        Self { p: T::zero(), q: -T::one(), r: T::one(), s: T::zero() }
    }

    /// Matrix product `self * other`; acting by the product equals acting by `self` first.
    pub fn compose(&self, other: &Self) -> Self {
        let (p, q, r, s) = (&self.p, &self.q, &self.r, &self.s);
        Self {
            p: p.clone() * other.p.clone() + q.clone() * other.r.clone(),
            q: p.clone() * other.q.clone() + q.clone() * other.s.clone(),
            r: r.clone() * other.p.clone() + s.clone() * other.r.clone(),
            s: r.clone() * other.q.clone() + s.clone() * other.s.clone(),
        }
    }

    pub fn inverse(&self) -> Self {
        Self { p: self.s.clone(), q: -self.q.clone(), r: -self.r.clone(), s: self.p.clone() }
    }
}

/// An exact point `re + coeff * sqrt(radicand)` of the upper half plane, where `radicand`
/// is the fundamental discriminant of the field containing it.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct KPoint<T: Int>(KElement<T>);

impl<T: Int> KPoint<T> {
    /// Wraps a field element; fails unless it lies in the upper half plane.
    pub fn new(z: KElement<T>) -> Result<Self> {
        if z.sqrt_coeff().is_positive() {
            Ok(Self(z))
        } else {
            Err(Error::InvalidArgument(format!("{z} is not in the upper half plane")))
        }
    }

    pub fn re(&self) -> Rat<T> {
        self.0.rational_part()
    }

    pub fn coeff(&self) -> Rat<T> {
        self.0.sqrt_coeff()
    }

    pub fn radicand(&self) -> &T {
        self.0.d_k()
    }

    pub fn element(&self) -> &KElement<T> {
        &self.0
    }

    pub fn into_element(self) -> KElement<T> {
        self.0
    }
}

impl<T: Int> fmt::Display for KPoint<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} + {}*sqrt({})", self.re(), self.coeff(), self.radicand())
    }
}

impl<T: Int> QuadraticForm<T> {
    /// A positive definite form; rejects `a <= 0` or a non-negative discriminant.
    pub fn new(a: T, b: T, c: T) -> Result<Self> {
        let q = Self { a, b, c };
        if q.a.is_positive() && q.discriminant().is_negative() {
            Ok(q)
        } else {
            Err(Error::NotPositiveDefinite(q.to_string()))
        }
    }

    pub fn from_i64(a: i64, b: i64, c: i64) -> Result<Self> {
        Self::new(T::lit(a), T::lit(b), T::lit(c))
    }

    /// `b^2 - 4ac`.
    pub fn discriminant(&self) -> T {
        self.b.clone() * self.b.clone() - T::lit(4) * self.a.clone() * self.c.clone()
    }

    /// Splits the form as `m * Q0` with `Q0` primitive.
    pub fn content(&self) -> (T, Self) {
        let m = gcd_all(&[self.a.clone(), self.b.clone(), self.c.clone()]);
        let q0 = Self { a: self.a.clone() / m.clone(), b: self.b.clone() / m.clone(), c: self.c.clone() / m.clone() };
        (m, q0)
    }

    pub fn is_primitive(&self) -> bool {
        self.content().0.is_one()
    }

    pub fn scale(&self, m: &T) -> Self {
        Self { a: self.a.clone() * m.clone(), b: self.b.clone() * m.clone(), c: self.c.clone() * m.clone() }
    }

    /// `(a, -b, c)`, the form of the opposite orientation.
    pub fn opposite(&self) -> Self {
        Self { a: self.a.clone(), b: -self.b.clone(), c: self.c.clone() }
    }

    pub fn eval(&self, x: &T, y: &T) -> T {
        self.a.clone() * x.clone() * x.clone() + self.b.clone() * x.clone() * y.clone() + self.c.clone() * y.clone() * y.clone()
    }

    /// The form `(x, y) -> Q(px + qy, rx + sy)`.
    pub fn act(&self, g: &UnimodularMap<T>) -> Self {
        let (a, b, c) = (&self.a, &self.b, &self.c);
        let two = T::lit(2);
        let (p, q, r, s) = (&g.p, &g.q, &g.r, &g.s);
        Self {
            a: self.eval(p, r),
            b: two.clone() * a.clone() * p.clone() * q.clone()
                + b.clone() * (p.clone() * s.clone() + q.clone() * r.clone())
                + two * c.clone() * r.clone() * s.clone(),
            c: self.eval(q, s),
        }
    }

    /// Normal-form conditions: `-a < b <= a <= c`, and `b >= 0` when `a = c`.
    pub fn is_reduced(&self) -> bool {
        let normal = -self.a.clone() < self.b && self.b <= self.a;
        normal
            && match self.a.cmp(&self.c) {
                Ordering::Less => true,
                Ordering::Equal => !self.b.is_negative(),
                Ordering::Greater => false,
            }
    }

    /// The unique reduced form in the proper class, with a proper map `g` such that
    /// `self.act(g)` equals it.
    pub fn reduce(&self) -> (Self, UnimodularMap<T>) {
        let mut q = self.clone();
        let mut g = UnimodularMap::identity();
        let two = T::lit(2);
        loop {
            if !(-q.a.clone() < q.b && q.b <= q.a) {
                let k = (q.a.clone() - q.b.clone()).div_floor(&(two.clone() * q.a.clone()));
                let t = UnimodularMap::translation(k);
                q = q.act(&t);
                g = g.compose(&t);
            }
            if q.a > q.c || (q.a == q.c && q.b.is_negative()) {
                let s = UnimodularMap::swap();
                q = q.act(&s);
                g = g.compose(&s);
            } else {
                return (q, g);
            }
        }
    }

    pub fn reduced(&self) -> Self {
        self.reduce().0
    }

    /// A proper map `g` with `self.act(g) == other`, if the forms are properly equivalent.
    pub fn is_properly_equivalent(&self, other: &Self) -> Option<UnimodularMap<T>> {
        let (r1, g1) = self.reduce();
        let (r2, g2) = other.reduce();
        (r1 == r2).then(|| g1.compose(&g2.inverse()))
    }

    /// Improper equivalence test: the reduced forms agree after flipping orientation.
    pub fn is_improperly_equivalent(&self, other: &Self) -> bool {
        self.reduced() == other.opposite().reduced()
    }

    /// Exhaustive list of proper representations of `m` (sign-normalized), in search order.
    fn proper_representations(&self, m: &T) -> Vec<(T, T)> {
        if !m.is_positive() {
            return Vec::new();
        }
        let disc_abs = self.discriminant().abs();
        let four_m = T::lit(4) * m.clone();
        // 4a*Q = (2ax + by)^2 + |D| y^2 bounds |y|; symmetrically for |x|.
        let y_max = isqrt(&(four_m.clone() * self.a.clone() / disc_abs.clone()));
        let x_max = isqrt(&(four_m * self.c.clone() / disc_abs));
        let mut out = Vec::new();
        let mut y = -y_max.clone();
        while y <= y_max {
            let mut x = T::zero();
            while x <= x_max {
                if is_sign_normalized(&x, &y) && x.gcd(&y).is_one() && self.eval(&x, &y) == *m {
                    out.push((x.clone(), y.clone()));
                }
                x = x + T::one();
            }
            y = y + T::one();
        }
        out.sort_by(|l, r| search_key(l).cmp(&search_key(r)));
        out
    }

    /// Smallest value coprime to `modulus` that the form properly represents, with its
    /// representation `(x, y)`.
    ///
    /// Representations are taken up to the sign `(x, y) ~ (-x, -y)`, normalized to `x > 0` or
    /// `x = 0, y > 0`; ties on the value go to the smaller `(|y|, |x|)`, then to `y >= 0`.
    pub fn represent_coprime(&self, modulus: &T) -> Result<(T, T, T)> {
        self.represent_coprime_capped(modulus, DEFAULT_REPRESENT_CAP)
    }

    pub fn represent_coprime_capped(&self, modulus: &T, cap: u64) -> Result<(T, T, T)> {
        let disc_abs = self.discriminant().abs();
        let mut bound: u64 = 8;
        loop {
            let b = T::from_u64(bound).expect("search bound fits");
            let mut best: Option<(T, T, T)> = None;
            let mut y = -b.clone();
            while y <= b {
                let mut x = T::zero();
                while x <= b {
                    if is_sign_normalized(&x, &y) && x.gcd(&y).is_one() {
                        let v = self.eval(&x, &y);
                        if v.gcd(modulus).is_one() {
                            let better = match &best {
                                None => true,
                                Some((bx, by, bv)) => {
                                    (v.clone(), search_key(&(x.clone(), y.clone())))
                                        < (bv.clone(), search_key(&(bx.clone(), by.clone())))
                                }
                            };
                            if better {
                                best = Some((x.clone(), y.clone(), v));
                            }
                        }
                    }
                    x = x + T::one();
                }
                y = y + T::one();
            }
            if let Some((x, y, v)) = best {
                // Every representation of a value <= v lies inside the ellipse bounds.
                let four_v = T::lit(4) * v.clone();
                let y_need = isqrt(&(four_v.clone() * self.a.clone() / disc_abs.clone()));
                let x_need = isqrt(&(four_v * self.c.clone() / disc_abs.clone()));
                if y_need <= b && x_need <= b {
                    return Ok((x, y, v));
                }
                let need = if y_need > x_need { y_need } else { x_need };
                let need = num_traits::ToPrimitive::to_u64(&need).unwrap_or(u64::MAX);
                if need > cap {
                    return Err(Error::SearchExhausted { modulus: modulus.to_string(), bound: cap });
                }
                bound = need;
                continue;
            }
            if bound >= cap {
                return Err(Error::SearchExhausted { modulus: modulus.to_string(), bound: cap });
            }
            bound = (bound * 2).min(cap);
        }
    }

    /// A properly equivalent form `(m, B, C)` with `0 <= B < 2m`, and the map producing it.
    pub fn with_leading_map(&self, m: &T) -> Result<(Self, UnimodularMap<T>)> {
        let (x, y) = self
            .proper_representations(m)
            .into_iter()
            .next()
            .ok_or_else(|| Error::NotRepresented { form: self.to_string(), value: m.to_string() })?;
        // Complete (x, y) to a proper map with first column (x, y).
        let (_, u, v) = xgcd(&x, &y);
        let g = UnimodularMap { p: x, q: -v, r: y, s: u };
        debug_assert!(g.det().is_one());
        let q = self.act(&g);
        let two_m = T::lit(2) * m.clone();
        let b_canon = q.b.mod_floor(&two_m);
        let k = (b_canon - q.b.clone()) / two_m;
        let t = UnimodularMap::translation(k);
        Ok((q.act(&t), g.compose(&t)))
    }

    /// A properly equivalent form with leading coefficient `m`.
    pub fn with_leading(&self, m: &T) -> Result<Self> {
        Ok(self.with_leading_map(m)?.0)
    }

    /// An equivalent form whose leading coefficient is coprime to `modulus`.
    pub fn with_leading_coprime_to(&self, modulus: &T) -> Result<Self> {
        if self.a.gcd(modulus).is_one() {
            return Ok(self.clone());
        }
        let (_, _, v) = self.represent_coprime(modulus)?;
        self.with_leading(&v)
    }

    /// The CM point `(-b + sqrt(D)) / (2a)`.
    pub fn cm_point(&self) -> Result<KPoint<T>> {
        let split = split_discriminant(&self.discriminant())?;
        // sqrt(D) = f sqrt(d_K) = f (2 w_K - d_K).
        let two_a = T::lit(2) * self.a.clone();
        let x = Rat::new(-self.b.clone() - split.f.clone() * split.d_k.clone(), two_a);
        let y = Rat::new(split.f, self.a.clone());
        KPoint::new(KElement::new(x, y, split.d_k))
    }
}

fn is_sign_normalized<T: Int>(x: &T, y: &T) -> bool {
    x.is_positive() || (x.is_zero() && y.is_positive())
}

fn search_key<T: Int>(xy: &(T, T)) -> (T, T, bool) {
    (xy.1.abs(), xy.0.abs(), xy.1.is_negative())
}

/// The principal form of discriminant `d`.
pub fn principal_form<T: Int>(d: &T) -> Result<QuadraticForm<T>> {
    check_discriminant(d)?;
    let four = T::lit(4);
    if d.mod_floor(&four).is_zero() {
        QuadraticForm::new(T::one(), T::zero(), -d.clone() / four)
    } else {
        QuadraticForm::new(T::one(), T::one(), (T::one() - d.clone()) / four)
    }
}

/// Form `(a, b, c)` with `b^2 - 4ac = d`, if `c` comes out integral.
pub fn form_from_ab<T: Int>(a: &T, b: &T, d: &T) -> Option<QuadraticForm<T>> {
    let num = b.clone() * b.clone() - d.clone();
    let den = T::lit(4) * a.clone();
    (num.clone() % den.clone()).is_zero().then(|| QuadraticForm { a: a.clone(), b: b.clone(), c: num / den })
}

impl<T: Int> fmt::Display for QuadraticForm<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{},{})", self.a, self.b, self.c)
    }
}

/// Forms serialize as the array `[a, b, c]`.
impl<T: Int> Serialize for QuadraticForm<T> {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut seq = serializer.serialize_seq(Some(3))?;
        for v in [&self.a, &self.b, &self.c] {
            seq.serialize_element(&crate::JsonInt(v))?;
        }
        seq.end()
    }
}
