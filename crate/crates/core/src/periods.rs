//! Néron–Severi and transcendental lattices of `E_tau1 x E_tau2` from the period vector.
//!
//! Second cohomology is modelled on `Z^6` with basis `u12, u13, u14, u23, u24, u34` and the
//! wedge pairing `(u12, u34) = 1`, `(u13, u24) = -1`, `(u14, u23) = 1`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::forms::{KPoint, QuadraticForm, UnimodularMap};
use crate::kmodules::KElement;
use crate::linalg::integer_kernel;
use crate::scalar::{rat, Int};

/// Index of the partner basis vector and the sign of their pairing.
const WEDGE: [(usize, i64); 6] = [(5, 1), (4, -1), (3, 1), (2, 1), (1, -1), (0, 1)];

/// The wedge pairing of two integer vectors.
pub fn wedge<T: Int>(u: &[T], v: &[T]) -> T {
    WEDGE
        .iter()
        .enumerate()
        .fold(T::zero(), |acc, (i, &(j, s))| acc + T::lit(s) * u[i].clone() * v[j].clone())
}

/// `W v`, so that `wedge(u, v) = u . (W v)`.
fn wedge_dual<T: Int>(v: &[T]) -> Vec<T> {
    WEDGE.iter().map(|&(j, s)| T::lit(s) * v[j].clone()).collect()
}

/// Coefficients of the period `p_A` on `u12, u13, u14, u23, u24, u34`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PeriodVector<T: Int> {
    coords: [KElement<T>; 6],
}

impl<T: Int> PeriodVector<T> {
    pub fn new(coords: [KElement<T>; 6]) -> Result<Self> {
        for c in &coords[1..] {
            coords[0].check_field(c)?;
        }
        Ok(Self { coords })
    }

    pub fn coords(&self) -> &[KElement<T>; 6] {
        &self.coords
    }

    pub fn d_k(&self) -> &T {
        self.coords[0].d_k()
    }

    /// `(p, q)` under the wedge pairing, extended bilinearly.
    pub fn pair(&self, other: &Self) -> KElement<T> {
        WEDGE.iter().enumerate().fold(KElement::zero(self.d_k()), |acc, (i, &(j, s))| {
            acc + (self.coords[i].clone() * other.coords[j].clone()).scale(&rat(T::lit(s)))
        })
    }

    /// `(p, v)` for an integer vector `v`.
    pub fn eval(&self, v: &[T]) -> KElement<T> {
        WEDGE.iter().enumerate().fold(KElement::zero(self.d_k()), |acc, (i, &(j, s))| {
            acc + self.coords[i].scale(&rat(T::lit(s) * v[j].clone()))
        })
    }

    pub fn conj(&self) -> Self {
        Self { coords: self.coords.clone().map(|c| c.conj()) }
    }
}

/// `p = u12 + tau2 u14 + tau1 u23 - tau1 tau2 u34`.
pub fn period_vector<T: Int>(tau1: &KPoint<T>, tau2: &KPoint<T>) -> Result<PeriodVector<T>> {
    let (t1, t2) = (tau1.element(), tau2.element());
    t1.check_field(t2)?;
    let d_k = t1.d_k();
    let zero = KElement::zero(d_k);
    PeriodVector::new([
        KElement::one(d_k),
        zero.clone(),
        t2.clone(),
        t1.clone(),
        zero,
        -(t1.clone() * t2.clone()),
    ])
}

/// `(p, p) = 0` and `(p, conj p) > 0`, checked exactly.
pub fn check_period_relations<T: Int>(p: &PeriodVector<T>) -> bool {
    let pp = p.pair(p);
    let pq = p.pair(&p.conj());
    pp.is_zero() && pq.is_rational() && pq.x() > &rat(T::zero())
}

/// Integer rows `[x-part; y-part]` of the functional `v -> (p, v)` with denominators cleared.
fn functional_rows<T: Int>(p: &PeriodVector<T>) -> Vec<Vec<T>> {
    let c: Vec<KElement<T>> = wedge_dual_elements(p);
    let mut rows = Vec::with_capacity(2);
    for part in 0..2 {
        let coeffs: Vec<_> = c.iter().map(|e| if part == 0 { e.x().clone() } else { e.y().clone() }).collect();
        let den = coeffs.iter().fold(T::one(), |acc, r| acc.lcm(r.denom()));
        rows.push(coeffs.iter().map(|r| (r.clone() * rat(den.clone())).to_integer()).collect());
    }
    rows
}

fn wedge_dual_elements<T: Int>(p: &PeriodVector<T>) -> Vec<KElement<T>> {
    WEDGE.iter().map(|&(j, s)| p.coords[j].scale(&rat(T::lit(s)))).collect()
}

/// Basis of `NS = ker(p)` in `Z^6`, saturated and in Hermite normal form.
pub fn neron_severi<T: Int>(p: &PeriodVector<T>) -> Result<Vec<Vec<T>>> {
    let ns = integer_kernel(&functional_rows(p), 6);
    if ns.len() != 4 {
        return Err(Error::RankDefect { expected: 4, found: ns.len() });
    }
    Ok(ns)
}

/// A positive definite even lattice of rank two with a positively oriented basis.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(bound = "")]
pub struct OrientedLattice2<T: Int> {
    #[serde(serialize_with = "ser_matrix")]
    gram: [[T; 2]; 2],
    #[serde(skip)]
    basis: [Vec<T>; 2],
}

fn ser_matrix<T: Int, S: serde::Serializer>(m: &[[T; 2]; 2], s: S) -> std::result::Result<S::Ok, S::Error> {
    use serde::ser::SerializeSeq;
    let mut seq = s.serialize_seq(Some(2))?;
    for row in m {
        seq.serialize_element(&[crate::JsonInt(&row[0]), crate::JsonInt(&row[1])])?;
    }
    seq.end()
}

impl<T: Int> OrientedLattice2<T> {
    pub fn gram(&self) -> &[[T; 2]; 2] {
        &self.gram
    }

    /// Basis vectors in `Z^6`.
    pub fn basis(&self) -> &[Vec<T>; 2] {
        &self.basis
    }

    /// The form `(g11/2, g12, g22/2)`.
    pub fn form(&self) -> QuadraticForm<T> {
        let two = T::lit(2);
        QuadraticForm {
            a: self.gram[0][0].clone() / two.clone(),
            b: self.gram[0][1].clone(),
            c: self.gram[1][1].clone() / two,
        }
    }

    pub fn content(&self) -> T {
        self.form().content().0
    }

    fn from_basis(basis: [Vec<T>; 2]) -> Self {
        let g = |i: usize, j: usize| wedge(&basis[i], &basis[j]);
        Self { gram: [[g(0, 0), g(0, 1)], [g(1, 0), g(1, 1)]], basis }
    }

    /// Change of basis by a proper map, following the form's change of variables.
    fn transform(&self, g: &UnimodularMap<T>) -> Self {
        let comb = |x: &T, y: &T| -> Vec<T> {
            self.basis[0]
                .iter()
                .zip(&self.basis[1])
                .map(|(u, v)| x.clone() * u.clone() + y.clone() * v.clone())
                .collect()
        };
        Self::from_basis([comb(&g.p, &g.r), comb(&g.q, &g.s)])
    }
}

/// `T(E_tau1 x E_tau2)`, positively oriented and properly reduced.
pub fn transcendental_lattice<T: Int>(tau1: &KPoint<T>, tau2: &KPoint<T>) -> Result<OrientedLattice2<T>> {
    let p = period_vector(tau1, tau2)?;
    let ns = neron_severi(&p)?;
    let rows: Vec<Vec<T>> = ns.iter().map(|v| wedge_dual(v)).collect();
    let t = integer_kernel(&rows, 6);
    if t.len() != 2 {
        return Err(Error::RankDefect { expected: 2, found: t.len() });
    }
    let (mut t1, mut t2) = (t[0].clone(), t[1].clone());
    // Im(p(t1) / p(t2)) has the sign of the sqrt(d_K) part of p(t1) * conj(p(t2)).
    let orient = (p.eval(&t1) * p.eval(&t2).conj()).y().clone();
    if orient < rat(T::zero()) {
        std::mem::swap(&mut t1, &mut t2);
    }
    let lattice = OrientedLattice2::from_basis([t1, t2]);
    let (_, g) = lattice.form().reduce();
    let reduced = lattice.transform(&g);
    debug_assert!(reduced.form().is_reduced());
    Ok(reduced)
}

/// The pair `(tau(Q), a tau(Q) + b)` whose product surface has transcendental form `Q`.
pub fn surface_from_form<T: Int>(q: &QuadraticForm<T>) -> Result<(KPoint<T>, KPoint<T>)> {
    let tau = q.cm_point()?;
    let d_k = tau.radicand().clone();
    let shifted = tau.element().scale(&rat(q.a.clone())) + KElement::from_int(q.b.clone(), &d_k);
    Ok((tau, KPoint::new(shifted)?))
}

/// Transcendental form of the product of the curves attached to two classes.
pub fn product_form<T: Int>(q1: &QuadraticForm<T>, q2: &QuadraticForm<T>) -> Result<QuadraticForm<T>> {
    Ok(transcendental_lattice(&q1.cm_point()?, &q2.cm_point()?)?.form())
}
