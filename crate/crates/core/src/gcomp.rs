//! Composition of form classes across discriminants sharing a fundamental part, and the
//! action of `C(D)` on the class groups of divisor discriminants.

use std::fmt;

use serde::{Serialize, Serializer};

use crate::classgroup::{dirichlet_united, enumerate_class_group, inverse, ClassGroup, FormClass};
use crate::error::{Error, Result};
use crate::forms::QuadraticForm;
use crate::kmodules::{form_to_module, module_product, module_to_class, KModule};
use crate::numtheory::split_discriminant;
use crate::scalar::Int;

/// A class of some order `O_{K,f}`: a primitive class of discriminant `f^2 d_K`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ExtendedClass<T> {
    f: T,
    cls: FormClass<T>,
    d_k: T,
}

impl<T: Int> ExtendedClass<T> {
    /// The extended class of a primitive class, with conductor read off its discriminant.
    pub fn of(cls: FormClass<T>) -> Result<Self> {
        let split = split_discriminant(&cls.disc())?;
        Ok(Self { f: split.f, cls, d_k: split.d_k })
    }

    pub fn from_form(q: &QuadraticForm<T>) -> Result<Self> {
        Self::of(FormClass::from_form(q)?)
    }

    /// The principal class at conductor `f`.
    pub fn principal(d_k: &T, f: &T) -> Result<Self> {
        Self::of(FormClass::principal(&(f.clone() * f.clone() * d_k.clone()))?)
    }

    pub fn conductor(&self) -> &T {
        &self.f
    }

    pub fn class(&self) -> &FormClass<T> {
        &self.cls
    }

    pub fn d_k(&self) -> &T {
        &self.d_k
    }

    pub fn is_principal(&self) -> bool {
        self.cls.is_principal()
    }

    fn check_field(&self, other: &Self) -> Result<()> {
        if self.d_k == other.d_k {
            Ok(())
        } else {
            Err(Error::FieldMismatch(self.d_k.to_string(), other.d_k.to_string()))
        }
    }
}

impl<T: Int> fmt::Display for ExtendedClass<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} at f={}", self.cls, self.f)
    }
}

impl<T: Int> Serialize for ExtendedClass<T> {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut s = serializer.serialize_struct("ExtendedClass", 2)?;
        s.serialize_field("f", &crate::JsonInt(&self.f))?;
        s.serialize_field("form", &self.cls)?;
        s.end()
    }
}

/// Composition of `n*Q` and `m*Q'` for primitive `Q`, `Q'` with `n^2 disc(Q) = m^2 disc(Q')`
/// and `gcd(n, m) = 1`. The result has content `n*m` and is returned reduced.
pub fn compose_imprimitive<T: Int>(n: &T, q: &QuadraticForm<T>, m: &T, q2: &QuadraticForm<T>) -> Result<QuadraticForm<T>> {
    for form in [q, q2] {
        if !form.is_primitive() {
            return Err(Error::Imprimitive(form.to_string()));
        }
    }
    let d = n.clone() * n.clone() * q.discriminant();
    let d2 = m.clone() * m.clone() * q2.discriminant();
    if d != d2 {
        return Err(Error::DiscriminantMismatch(d.to_string(), d2.to_string()));
    }
    if !n.gcd(m).is_one() {
        return Err(Error::Divisibility(format!("scales {n} and {m} are not coprime")));
    }
    let two_nmd = (T::lit(2) * n.clone() * m.clone() * d).abs();
    let r1 = q.with_leading_coprime_to(&two_nmd)?;
    let r2 = q2.with_leading_coprime_to(&(two_nmd * r1.a.clone()))?;
    let united = dirichlet_united(&r1.scale(n), &r2.scale(m))
        .ok_or_else(|| Error::Divisibility(format!("cannot unite {n}{q} and {m}{q2}")))?;
    Ok(united.reduced())
}

/// `A (*) B` computed through the module product.
pub fn gcompose<T: Int>(a: &ExtendedClass<T>, b: &ExtendedClass<T>) -> Result<ExtendedClass<T>> {
    a.check_field(b)?;
    let m = module_product(&form_to_module(a.cls.repr())?, &form_to_module(b.cls.repr())?)?;
    module_class(&m, &a.d_k)
}

fn module_class<T: Int>(m: &KModule<T>, d_k: &T) -> Result<ExtendedClass<T>> {
    let (f, cls) = module_to_class(m)?;
    Ok(ExtendedClass { f, cls, d_k: d_k.clone() })
}

/// `A (*) B` computed through imprimitive Dirichlet composition and content extraction.
pub fn gcompose_via_forms<T: Int>(a: &ExtendedClass<T>, b: &ExtendedClass<T>) -> Result<ExtendedClass<T>> {
    a.check_field(b)?;
    let f0 = a.f.gcd(&b.f);
    // d1^2 D_A = d2^2 D_B with coprime d1, d2.
    let d1 = b.f.clone() / f0.clone();
    let d2 = a.f.clone() / f0;
    let composed = compose_imprimitive(&d1, a.cls.repr(), &d2, b.cls.repr())?;
    let (content, primitive) = composed.content();
    debug_assert_eq!(content, d1 * d2);
    ExtendedClass::from_form(&primitive)
}

/// Results of both composition paths, for auditing.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(bound = "")]
pub struct DualComposition<T: Int> {
    pub via_modules: ExtendedClass<T>,
    pub via_forms: ExtendedClass<T>,
}

impl<T: Int> DualComposition<T> {
    pub fn agree(&self) -> bool {
        self.via_modules == self.via_forms
    }
}

pub fn gcompose_both<T: Int>(a: &ExtendedClass<T>, b: &ExtendedClass<T>) -> Result<DualComposition<T>> {
    Ok(DualComposition { via_modules: gcompose(a, b)?, via_forms: gcompose_via_forms(a, b)? })
}

/// Conductors `(f0, f)` of `d0` and `d`, checking they share `d_K` and `f0 | f`.
fn nested_conductors<T: Int>(d0: &T, d: &T) -> Result<(T, T, T)> {
    let s0 = split_discriminant(d0)?;
    let s = split_discriminant(d)?;
    if s0.d_k != s.d_k {
        return Err(Error::FieldMismatch(s0.d_k.to_string(), s.d_k.to_string()));
    }
    if !(s.f.clone() % s0.f.clone()).is_zero() {
        return Err(Error::Divisibility(format!("{d0} does not divide {d} as an order")));
    }
    Ok((s.d_k, s0.f, s.f))
}

/// A class `Q` of discriminant `d` with `Q (*) P0 = Q0`, where `P0` is principal in `C(D0)`.
///
/// Uses a representative `(a0, b0, c0)` of `Q0` with `a0` coprime to `2d`; then
/// `(a0, k b0, k^2 c0)` with `k = f/f0` is primitive of discriminant `d`.
pub fn lift_class<T: Int>(q0: &FormClass<T>, d: &T) -> Result<FormClass<T>> {
    let (d_k, f0, f) = nested_conductors(&q0.disc(), d)?;
    let k = f.clone() / f0.clone();
    let rep = q0.repr().with_leading_coprime_to(&(T::lit(2) * d.clone()).abs())?;
    let lifted = QuadraticForm {
        a: rep.a.clone(),
        b: k.clone() * rep.b.clone(),
        c: k.clone() * k * rep.c.clone(),
    };
    let lifted = FormClass::from_form(&lifted)?;
    let back = gcompose(&ExtendedClass { f: f.clone(), cls: lifted.clone(), d_k: d_k.clone() }, &ExtendedClass::principal(&d_k, &f0)?)?;
    if back.cls != *q0 || back.f != f0 {
        return Err(Error::InvalidArgument(format!("lift of {q0} to {d} failed its round trip")));
    }
    Ok(lifted)
}

/// `R (*) X` for `R` in `C(D)`, requiring the conductor of `X` to divide that of `D`.
pub fn act<T: Int>(r: &FormClass<T>, x: &ExtendedClass<T>) -> Result<ExtendedClass<T>> {
    let r = ExtendedClass::of(r.clone())?;
    r.check_field(x)?;
    if !(r.f.clone() % x.f.clone()).is_zero() {
        return Err(Error::Divisibility(format!("conductor {} does not divide {}", x.f, r.f)));
    }
    gcompose(&r, x)
}

/// A subgroup of a class group, members sorted.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StabilizerSubgroup<T: Int> {
    ambient: ClassGroup<T>,
    members: Vec<FormClass<T>>,
}

impl<T: Int> StabilizerSubgroup<T> {
    pub fn ambient(&self) -> &ClassGroup<T> {
        &self.ambient
    }

    pub fn members(&self) -> &[FormClass<T>] {
        &self.members
    }

    pub fn order(&self) -> usize {
        self.members.len()
    }

    pub fn is_trivial(&self) -> bool {
        self.members.len() == 1
    }
}

/// Whether `u` in `C(D)` fixes the principal class of conductor `f0`.
fn fixes_principal<T: Int>(u: &FormClass<T>, d_k: &T, f0: &T) -> Result<bool> {
    let m = module_product(&form_to_module(u.repr())?, &KModule::order(d_k, f0)?)?;
    let (f, cls) = module_to_class(&m)?;
    Ok(f == *f0 && cls.is_principal())
}

fn stabilizer_in<T: Int>(group: &ClassGroup<T>, d_k: &T, f0: &T) -> Result<Vec<FormClass<T>>> {
    let mut members = Vec::new();
    for u in group.elements() {
        if fixes_principal(u, d_k, f0)? {
            members.push(u.clone());
        }
    }
    Ok(members)
}

/// Classes of `C(d)` acting trivially on `C(d0)`.
pub fn stabilizer<T: Int>(d: &T, d0: &T) -> Result<StabilizerSubgroup<T>> {
    let (d_k, f0, _) = nested_conductors(d0, d)?;
    let ambient = enumerate_class_group(d)?;
    let members = stabilizer_in(&ambient, &d_k, &f0)?;
    Ok(StabilizerSubgroup { ambient, members })
}

/// Intersection of the stabilizers of `C(d1)` and `C(d2)` in `C(d)`.
pub fn stab_intersection<T: Int>(d: &T, d1: &T, d2: &T) -> Result<StabilizerSubgroup<T>> {
    let (d_k, f1, f) = nested_conductors(d1, d)?;
    let (_, f2, _) = nested_conductors(d2, d)?;
    if f1.lcm(&f2) != f {
        return Err(Error::Divisibility(format!("lcm({f1}, {f2}) differs from the conductor {f}")));
    }
    let ambient = enumerate_class_group(d)?;
    let mut members = Vec::new();
    for u in ambient.elements() {
        if fixes_principal(u, &d_k, &f1)? && fixes_principal(u, &d_k, &f2)? {
            members.push(u.clone());
        }
    }
    Ok(StabilizerSubgroup { ambient, members })
}

/// Orbit of `x` under `C(d)`, sorted and deduplicated.
pub fn orbit<T: Int>(d: &T, x: &ExtendedClass<T>) -> Result<Vec<ExtendedClass<T>>> {
    let group = enumerate_class_group(d)?;
    let mut out: Vec<ExtendedClass<T>> = group.elements().iter().map(|r| act(r, x)).collect::<Result<_>>()?;
    out.sort();
    out.dedup();
    Ok(out)
}

/// `R^{-1} (*) X`.
pub fn act_inverse<T: Int>(r: &FormClass<T>, x: &ExtendedClass<T>) -> Result<ExtendedClass<T>> {
    act(&inverse(r), x)
}
