//! Just enough complex arithmetic over `BigFloat` for q-series.

use astro_float::{BigFloat, RoundingMode};

pub(crate) const RM: RoundingMode = RoundingMode::ToEven;

#[derive(Debug, Clone)]
pub(crate) struct Complex {
    pub re: BigFloat,
    pub im: BigFloat,
    p: usize,
}

impl Complex {
    pub fn new(re: BigFloat, im: BigFloat, p: usize) -> Self {
        Self { re, im, p }
    }

    pub fn real(re: BigFloat, p: usize) -> Self {
        Self::new(re, BigFloat::from_u64(0, p), p)
    }

    pub fn one(p: usize) -> Self {
        Self::real(BigFloat::from_u64(1, p), p)
    }

    pub fn add(&self, o: &Self) -> Self {
        Self::new(self.re.add(&o.re, self.p, RM), self.im.add(&o.im, self.p, RM), self.p)
    }

    pub fn sub(&self, o: &Self) -> Self {
        Self::new(self.re.sub(&o.re, self.p, RM), self.im.sub(&o.im, self.p, RM), self.p)
    }

    pub fn mul(&self, o: &Self) -> Self {
        let p = self.p;
        let re = self.re.mul(&o.re, p, RM).sub(&self.im.mul(&o.im, p, RM), p, RM);
        let im = self.re.mul(&o.im, p, RM).add(&self.im.mul(&o.re, p, RM), p, RM);
        Self::new(re, im, p)
    }

    pub fn scale(&self, k: &BigFloat) -> Self {
        Self::new(self.re.mul(k, self.p, RM), self.im.mul(k, self.p, RM), self.p)
    }

    pub fn norm(&self) -> BigFloat {
        self.re.mul(&self.re, self.p, RM).add(&self.im.mul(&self.im, self.p, RM), self.p, RM)
    }

    pub fn abs(&self) -> BigFloat {
        self.norm().sqrt(self.p, RM)
    }

    pub fn div(&self, o: &Self) -> Self {
        let n = o.norm();
        let conj = Self::new(o.re.clone(), o.im.neg(), self.p);
        let num = self.mul(&conj);
        Self::new(num.re.div(&n, self.p, RM), num.im.div(&n, self.p, RM), self.p)
    }

    pub fn powi(&self, k: u32) -> Self {
        (0..k).fold(Self::one(self.p), |acc, _| acc.mul(self))
    }
}
