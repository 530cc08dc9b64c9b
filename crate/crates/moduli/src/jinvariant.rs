//! `j(tau)` from the q-expansions of `E4` and `Delta`.

use astro_float::{BigFloat, Consts, Radix};
use num_bigint::BigInt;
use num_traits::Zero;

use cmdecomp::forms::KPoint;
use cmdecomp::{Int, Rat};

use crate::complex::{Complex, RM};
use crate::{Error, Result};

pub const DEFAULT_PRECISION: usize = 256;

/// Guard bits carried through the series on top of the requested precision.
const GUARD: usize = 64;

/// Series length past which the requested precision is declared unattainable.
pub const MAX_TERMS: usize = 4096;

/// A complex value with an absolute error bound.
#[derive(Debug, Clone)]
pub struct JValue {
    re: BigFloat,
    im: BigFloat,
    precision_bits: usize,
    error_bound: BigFloat,
}

impl JValue {
    pub(crate) fn from_complex(z: Complex, precision_bits: usize, error_bound: BigFloat) -> Self {
        Self { re: z.re, im: z.im, precision_bits, error_bound }
    }

    pub(crate) fn complex(&self) -> Complex {
        Complex::new(self.re.clone(), self.im.clone(), self.precision_bits + GUARD)
    }

    pub fn re(&self) -> &BigFloat {
        &self.re
    }

    pub fn im(&self) -> &BigFloat {
        &self.im
    }

    pub fn precision_bits(&self) -> usize {
        self.precision_bits
    }

    pub fn error_bound(&self) -> &BigFloat {
        &self.error_bound
    }

    /// The integer nearest to the real part.
    pub fn nearest_integer(&self) -> BigInt {
        to_bigint(&self.re)
    }

    /// `|self - k|` in the complex plane.
    pub fn distance_to(&self, k: &BigInt) -> BigFloat {
        let p = self.precision_bits + GUARD;
        let dr = self.re.sub(&from_bigint(k, p), p, RM);
        Complex::new(dr, self.im.clone(), p).abs()
    }
}

fn consts() -> Consts {
    Consts::new().expect("astro-float constants cache")
}

pub(crate) fn from_bigint(k: &BigInt, p: usize) -> BigFloat {
    BigFloat::parse(&k.to_string(), Radix::Dec, p, RM, &mut consts())
}

fn from_int<T: Int>(k: &T, p: usize) -> BigFloat {
    BigFloat::parse(&k.to_string(), Radix::Dec, p, RM, &mut consts())
}

fn from_rat<T: Int>(r: &Rat<T>, p: usize) -> BigFloat {
    from_int(r.numer(), p).div(&from_int(r.denom(), p), p, RM)
}

/// Splits astro-float's `d.ddde+E` rendering into sign, digits and the exponent of the first digit.
fn decimal_parts(x: &BigFloat) -> (bool, String, i64) {
    let s = x.format(Radix::Dec, RM, &mut consts()).expect("finite value");
    let (neg, s) = match s.strip_prefix('-') {
        Some(rest) => (true, rest.to_string()),
        None => (false, s),
    };
    let (mant, exp) = s.split_once('e').unwrap_or((&s, "0"));
    let exp: i64 = exp.parse().expect("decimal exponent");
    let digits: String = mant.chars().filter(|c| c.is_ascii_digit()).collect();
    let digits = digits.trim_end_matches('0').to_string();
    if digits.is_empty() {
        return (false, "0".into(), 0);
    }
    // A mantissa of the form `0.ddd` shifts the exponent.
    let lead = mant.split('.').next().unwrap_or("");
    let exp = if lead == "0" {
        let frac = mant.split('.').nth(1).unwrap_or("");
        exp - 1 - (frac.len() - frac.trim_start_matches('0').len()) as i64
    } else {
        exp + lead.len() as i64 - 1
    };
    (neg, digits.trim_start_matches('0').to_string(), exp)
}

/// The integer nearest to `x`.
pub fn to_bigint(x: &BigFloat) -> BigInt {
    let (neg, digits, exp) = decimal_parts(&x.round(0, RM));
    if digits == "0" || exp < 0 {
        return BigInt::zero();
    }
    let width = exp as usize + 1;
    let mut s = digits;
    if s.len() > width {
        s.truncate(width);
    }
    while s.len() < width {
        s.push('0');
    }
    let v: BigInt = s.parse().expect("digits");
    if neg {
        -v
    } else {
        v
    }
}

/// `x` to `sig` significant digits, fixed-point for moderate magnitudes.
pub fn format_decimal(x: &BigFloat, sig: usize) -> String {
    let (neg, digits, mut exp) = decimal_parts(x);
    if digits == "0" {
        return "0".into();
    }
    let mut d: Vec<u8> = digits.bytes().map(|b| b - b'0').collect();
    if d.len() > sig {
        let up = d[sig] >= 5;
        d.truncate(sig);
        if up {
            let mut i = sig;
            loop {
                if i == 0 {
                    d.insert(0, 1);
                    d.truncate(sig);
                    exp += 1;
                    break;
                }
                i -= 1;
                if d[i] == 9 {
                    d[i] = 0;
                } else {
                    d[i] += 1;
                    break;
                }
            }
        }
    }
    while d.len() > 1 && d[d.len() - 1] == 0 {
        d.pop();
    }
    let digits: String = d.iter().map(|v| char::from(b'0' + v)).collect();
    let sign = if neg { "-" } else { "" };
    if exp >= -6 && exp < sig as i64 {
        let body = if exp < 0 {
            format!("0.{}{}", "0".repeat((-exp - 1) as usize), digits)
        } else if digits.len() as i64 <= exp + 1 {
            format!("{}{}", digits, "0".repeat((exp + 1) as usize - digits.len()))
        } else {
            let (int, frac) = digits.split_at(exp as usize + 1);
            format!("{int}.{frac}")
        };
        format!("{sign}{body}")
    } else if digits.len() == 1 {
        format!("{sign}{digits}e{exp}")
    } else {
        format!("{sign}{}.{}e{exp}", &digits[..1], &digits[1..])
    }
}

/// `v` to `sig` significant digits, with an imaginary part only when it exceeds the error bound.
pub fn format_value(v: &JValue, sig: usize) -> String {
    let re = format_decimal(v.re(), sig);
    if v.im().abs().cmp(v.error_bound()).map_or(true, |c| c <= 0) {
        return re;
    }
    let im = format_decimal(&v.im().abs(), sig);
    let sign = if v.im().is_negative() { '-' } else { '+' };
    format!("{re} {sign} {im}*i")
}

/// `tau` moved into the standard fundamental domain, as `(u, v)` with `tau = u + v sqrt(d)`.
pub fn reduce_to_fundamental_domain<T: Int>(tau: &KPoint<T>) -> (Rat<T>, Rat<T>) {
    let d = Rat::from_integer(tau.radicand().clone());
    let one = Rat::<T>::from_integer(T::one());
    let (mut u, mut v) = (tau.re(), tau.coeff());
    loop {
        u = u.clone() - u.round();
        // |tau|^2 = u^2 - v^2 d since d < 0.
        let n = u.clone() * u.clone() - v.clone() * v.clone() * d.clone();
        if n >= one {
            break;
        }
        u = -u / n.clone();
        v = v / n;
    }
    (u, v)
}

fn sigma3(n: usize) -> u64 {
    (1..=n).filter(|d| n % d == 0).map(|d| (d as u64).pow(3)).sum()
}

fn ceil_log2(n: usize) -> i64 {
    (usize::BITS - n.next_power_of_two().leading_zeros() - 1) as i64
}

/// `j(tau)` to `precision_bits` bits.
///
/// The series are truncated once `(N + 2)^3 |q|^(N + 1)` falls below the working
/// precision, which bounds both the `E4` tail and the relative `Delta` tail.
pub fn j_invariant<T: Int>(tau: &KPoint<T>, precision_bits: usize) -> Result<JValue> {
    let p = precision_bits + GUARD;
    let mut cc = consts();
    let (u, v) = reduce_to_fundamental_domain(tau);
    let im = from_rat(&v, p).mul(&from_int(&tau.radicand().abs(), p).sqrt(p, RM), p, RM);
    let two_pi = cc.pi(p, RM).mul(&BigFloat::from_u64(2, p), p, RM);
    let r = two_pi.mul(&im, p, RM).neg().exp(p, RM, &mut cc);
    let theta = two_pi.mul(&from_rat(&u, p), p, RM);
    let q = Complex::new(theta.cos(p, RM, &mut cc), theta.sin(p, RM, &mut cc), p).scale(&r);

    // |q| < 2^e with e <= -7 inside the fundamental domain.
    let e = r.exponent().map(i64::from).unwrap_or(i64::MIN / 4).min(-7);
    let terms = (1..=MAX_TERMS)
        .find(|&n| e * (n as i64 + 1) + 3 * ceil_log2(n + 2) + 12 <= -(p as i64))
        .ok_or(Error::PrecisionUnattainable { bits: precision_bits, max_terms: MAX_TERMS })?;

    let mut e4 = Complex::one(p);
    let mut prod = Complex::one(p);
    let mut qn = Complex::one(p);
    for n in 1..=terms {
        qn = qn.mul(&q);
        e4 = e4.add(&qn.scale(&BigFloat::from_u64(240 * sigma3(n), p)));
        prod = prod.mul(&Complex::one(p).sub(&qn));
    }
    let delta = q.mul(&prod.powi(24));
    let j = e4.powi(3).div(&delta);

    // Truncation and rounding both sit below 2^-(p - 20) relative to |j| + 1/|Delta|.
    let scale = BigFloat::from_u64(1, p).div(&delta.abs(), p, RM).add(&j.abs(), p, RM);
    let ulp = BigFloat::from_u64(2, p).powi(p - 20, p, RM);
    let error_bound = scale.div(&ulp, p, RM);
    Ok(JValue::from_complex(j, precision_bits, error_bound))
}
