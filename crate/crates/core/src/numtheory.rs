//! Exact integer primitives: trial-division factorization, the Kronecker symbol and the
//! splitting of a negative discriminant into fundamental part and conductor.


use crate::error::{Error, Result};
use crate::scalar::Int;

/// Default trial-division bound used by [`factorize`].
pub const DEFAULT_TRIAL_BOUND: u64 = 1_000_000;

/// Prime factorization as `(prime, exponent)` pairs, primes strictly increasing.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Factorization<T> {
    pub prime_powers: Vec<(T, u32)>,
}

impl<T: Int> Factorization<T> {
    /// Multiplies the prime powers back together.
    pub fn value(&self) -> T {
        self.prime_powers
            .iter()
            .fold(T::one(), |acc, (p, e)| acc * num_traits::pow(p.clone(), *e as usize))
    }

    pub fn primes(&self) -> impl Iterator<Item = &T> {
        self.prime_powers.iter().map(|(p, _)| p)
    }
}

/// Factorizes `n >= 1` with the default trial-division bound.
pub fn factorize<T: Int>(n: &T) -> Result<Factorization<T>> {
    factorize_with_bound(n, DEFAULT_TRIAL_BOUND)
}

/// Factorizes `n >= 1` by trial division up to `bound`.
///
/// A leftover cofactor is accepted as prime only when no divisor up to its square root can
/// remain untested; otherwise the call fails instead of returning a partial answer.
pub fn factorize_with_bound<T: Int>(n: &T, bound: u64) -> Result<Factorization<T>> {
    if !n.is_positive() {
        return Err(Error::InvalidArgument(format!("cannot factorize {n}")));
    }
    let mut rest = n.clone();
    let mut out = Vec::new();
    let mut p = T::lit(2);
    let mut tested: u64 = 2;
    while p.clone() * p.clone() <= rest {
        if tested > bound {
            return Err(Error::FactorizationBound { n: n.to_string(), bound });
        }
        let mut e = 0u32;
        while (rest.clone() % p.clone()).is_zero() {
            rest = rest / p.clone();
            e += 1;
        }
        if e > 0 {
            out.push((p.clone(), e));
        }
        let step = if tested == 2 { 1 } else { 2 };
        p = p + T::lit(step);
        tested += step as u64;
    }
    if !rest.is_one() {
        out.push((rest, 1));
    }
    Ok(Factorization { prime_powers: out })
}

/// Number of distinct prime divisors of `n`, with the convention `tau(1) = 1`.
///
/// Callers counting coprime splittings of `n` must special-case `n = 1`, where there is a
/// single splitting rather than `2^tau(1) = 2`.
pub fn tau<T: Int>(n: &T) -> Result<u32> {
    if n.is_one() {
        return Ok(1);
    }
    Ok(factorize(n)?.prime_powers.len() as u32)
}

/// Number of ordered coprime splittings `n = s*t`: `2^tau(n)` for `n > 1` and 1 for `n = 1`.
pub fn coprime_splitting_count<T: Int>(n: &T) -> Result<u64> {
    if n.is_one() {
        return Ok(1);
    }
    Ok(1u64 << tau(n)?)
}

fn two_adic_table(r: i64) -> i8 {
    // (2 / r) for odd r, indexed by r mod 8.
    match r {
        1 | 7 => 1,
        3 | 5 => -1,
        _ => 0,
    }
}

/// Kronecker symbol `(a / n)`.
pub fn kronecker<T: Int>(a: &T, n: &T) -> i8 {
    let two = T::lit(2);
    let four = T::lit(4);
    let eight = T::lit(8);
    if n.is_zero() {
        return if a.abs().is_one() { 1 } else { 0 };
    }
    if a.is_even() && n.is_even() {
        return 0;
    }
    let mut a = a.clone();
    let mut n = n.clone();
    let mut v = 0u32;
    while n.is_even() {
        n = n / two.clone();
        v += 1;
    }
    let mut k: i8 = if v % 2 == 0 {
        1
    } else {
        two_adic_table(a.mod_floor(&eight).to_i64().unwrap())
    };
    if n.is_negative() {
        n = -n;
        if a.is_negative() {
            k = -k;
        }
    }
    // n is odd and positive from here on.
    loop {
        if a.is_zero() {
            return if n.is_one() { k } else { 0 };
        }
        let mut v = 0u32;
        while a.is_even() {
            a = a / two.clone();
            v += 1;
        }
        if v % 2 == 1 {
            k *= two_adic_table(n.mod_floor(&eight).to_i64().unwrap());
        }
        let three = T::lit(3);
        if a.mod_floor(&four) == three && n.mod_floor(&four) == three {
            k = -k;
        }
        let r = a.abs();
        a = n.mod_floor(&r);
        n = r;
    }
}

/// True for `d < 0` with `d ≡ 0, 1 (mod 4)`.
pub fn is_negative_discriminant<T: Int>(d: &T) -> bool {
    let r = d.mod_floor(&T::lit(4));
    d.is_negative() && (r.is_zero() || r.is_one())
}

pub(crate) fn check_discriminant<T: Int>(d: &T) -> Result<()> {
    if is_negative_discriminant(d) {
        Ok(())
    } else {
        Err(Error::InvalidDiscriminant(d.to_string()))
    }
}

fn is_squarefree<T: Int>(n: &T) -> Result<bool> {
    Ok(factorize(&n.abs())?.prime_powers.iter().all(|(_, e)| *e == 1))
}

/// True if `d` is a negative fundamental discriminant.
pub fn is_fundamental<T: Int>(d: &T) -> bool {
    if !is_negative_discriminant(d) {
        return false;
    }
    let four = T::lit(4);
    if d.mod_floor(&four).is_one() {
        return is_squarefree(d).unwrap_or(false);
    }
    let m = d.clone() / four.clone();
    let r = m.mod_floor(&four);
    (r == T::lit(2) || r == T::lit(3)) && is_squarefree(&m).unwrap_or(false)
}

/// A discriminant written as `f^2 * d_K` with `d_K` fundamental.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SplitDiscriminant<T> {
    pub d_k: T,
    pub f: T,
}

impl<T: Int> SplitDiscriminant<T> {
    pub fn disc(&self) -> T {
        self.f.clone() * self.f.clone() * self.d_k.clone()
    }
}

/// Splits a negative discriminant as `D = f^2 d_K`.
pub fn split_discriminant<T: Int>(d: &T) -> Result<SplitDiscriminant<T>> {
    check_discriminant(d)?;
    let fac = factorize(&d.abs())?;
    let mut square_root = T::one();
    let mut core = -T::one();
    for (p, e) in &fac.prime_powers {
        square_root = square_root * num_traits::pow(p.clone(), (*e / 2) as usize);
        if e % 2 == 1 {
            core = core * p.clone();
        }
    }
    let four = T::lit(4);
    if core.mod_floor(&four).is_one() {
        Ok(SplitDiscriminant { d_k: core, f: square_root })
    } else {
        // D ≡ 0 mod 4 forces an even square part here.
        Ok(SplitDiscriminant { d_k: core * four, f: square_root / T::lit(2) })
    }
}

/// `[O_K^× : O_{K,f}^×]`: 1 for `f = 1`, otherwise 2 for `d_K = -4`, 3 for `d_K = -3`, 1 else.
pub fn unit_index<T: Int>(d_k: &T, f: &T) -> u32 {
    if f.is_one() {
        1
    } else if *d_k == T::lit(-4) {
        2
    } else if *d_k == T::lit(-3) {
        3
    } else {
        1
    }
}

/// Positive divisors of `n >= 1` in increasing order.
pub fn divisors<T: Int>(n: &T) -> Result<Vec<T>> {
    let fac = factorize(n)?;
    let mut out = vec![T::one()];
    for (p, e) in &fac.prime_powers {
        let mut next = Vec::with_capacity(out.len() * (*e as usize + 1));
        for d in &out {
            let mut pk = T::one();
            for _ in 0..=*e {
                next.push(d.clone() * pk.clone());
                pk = pk * p.clone();
            }
        }
        out = next;
    }
    out.sort();
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;
    use proptest::prelude::*;

    fn pairs(f: &Factorization<i64>) -> Vec<(i64, u32)> {
        f.prime_powers.clone()
    }

    #[test]
    fn factorize_examples() {
        assert!(factorize(&1i64).unwrap().prime_powers.is_empty());
        assert_eq!(pairs(&factorize(&60i64).unwrap()), vec![(2, 2), (3, 1), (5, 1)]);
        assert_eq!(pairs(&factorize(&432i64).unwrap()), vec![(2, 4), (3, 3)]);
        assert!(factorize(&0i64).is_err());
    }

    #[test]
    fn factorize_reports_bound_failure() {
        // 1000003 * 1000033 has no factor below the bound.
        let n = 1_000_003i64 * 1_000_033;
        assert!(matches!(
            factorize_with_bound(&n, 1000),
            Err(Error::FactorizationBound { .. })
        ));
        // A prime cofactor above the bound is still fine when the square-root test completes.
        assert_eq!(pairs(&factorize_with_bound(&(4 * 1_000_003i64), 2000).unwrap()), vec![(2, 2), (1_000_003, 1)]);
    }

    #[test]
    fn tau_examples() {
        assert_eq!(tau(&1i64).unwrap(), 1);
        assert_eq!(tau(&30i64).unwrap(), 3);
        assert_eq!(tau(&12i64).unwrap(), 2);
        assert_eq!(coprime_splitting_count(&1i64).unwrap(), 1);
        assert_eq!(coprime_splitting_count(&30i64).unwrap(), 8);
    }

    #[test]
    fn kronecker_examples() {
        assert_eq!(kronecker(&-4i64, &2), 0);
        assert_eq!(kronecker(&-3i64, &2), -1);
        assert_eq!(kronecker(&-3i64, &5), -1);
        assert_eq!(kronecker(&BigInt::from(-23), &BigInt::from(2)), 1);
    }

    /// Euler's criterion for an odd prime, extended multiplicatively: the definition of the
    /// Kronecker symbol, evaluated independently of the reciprocity-based routine.
    fn kronecker_oracle(a: i64, n: i64) -> i8 {
        if n == 0 {
            return if a.abs() == 1 { 1 } else { 0 };
        }
        let mut k: i8 = if n < 0 && a < 0 { -1 } else { 1 };
        for (p, e) in factorize(&n.abs()).unwrap().prime_powers {
            let s: i8 = if p == 2 {
                if a % 2 == 0 {
                    0
                } else if matches!(a.rem_euclid(8), 1 | 7) {
                    1
                } else {
                    -1
                }
            } else {
                let r = a.rem_euclid(p);
                if r == 0 {
                    0
                } else {
                    let mut acc = 1i64;
                    let mut base = r;
                    let mut ex = (p - 1) / 2;
                    while ex > 0 {
                        if ex & 1 == 1 {
                            acc = acc * base % p;
                        }
                        base = base * base % p;
                        ex >>= 1;
                    }
                    if acc == 1 { 1 } else { -1 }
                }
            };
            for _ in 0..e {
                k *= s;
            }
        }
        k
    }

    #[test]
    fn kronecker_matches_definition_on_grid() {
        for a in -60i64..=60 {
            for n in -60i64..=60 {
                assert_eq!(kronecker(&a, &n), kronecker_oracle(a, n), "({a}/{n})");
            }
        }
    }

    #[test]
    fn split_discriminant_examples() {
        let s = split_discriminant(&-432i64).unwrap();
        assert_eq!((s.d_k, s.f), (-3, 12));
        let s = split_discriminant(&-4i64).unwrap();
        assert_eq!((s.d_k, s.f), (-4, 1));
        let s = split_discriminant(&-20i64).unwrap();
        assert_eq!((s.d_k, s.f), (-20, 1));
        let s = split_discriminant(&-16i64).unwrap();
        assert_eq!((s.d_k, s.f), (-4, 2));
        assert!(matches!(split_discriminant(&-5i64), Err(Error::InvalidDiscriminant(_))));
        assert!(split_discriminant(&-6i64).is_err());
        assert!(split_discriminant(&8i64).is_err());
    }

    #[test]
    fn fundamental_discriminants() {
        let fundamental: Vec<i64> = (-60..0).filter(is_fundamental).collect();
        assert_eq!(
            fundamental,
            vec![-59, -56, -55, -52, -51, -47, -43, -40, -39, -35, -31, -24, -23, -20, -19, -15, -11, -8, -7, -4, -3]
        );
    }

    #[test]
    fn divisors_of_sixty() {
        assert_eq!(divisors(&60i64).unwrap(), vec![1, 2, 3, 4, 5, 6, 10, 12, 15, 20, 30, 60]);
    }

    proptest! {
        #[test]
        fn split_reconstructs(k in 1i64..5000) {
            let d = -k;
            if is_negative_discriminant(&d) {
                let s = split_discriminant(&d).unwrap();
                prop_assert_eq!(s.f * s.f * s.d_k, d);
                prop_assert!(is_fundamental(&s.d_k));
            }
        }

        #[test]
        fn kronecker_multiplicative(a in -200i64..200, b in -200i64..200, n in 1i64..200) {
            prop_assert_eq!(kronecker(&(a * b), &n), kronecker(&a, &n) * kronecker(&b, &n));
            prop_assert_eq!(kronecker(&n, &(a * b)), kronecker(&n, &a) * kronecker(&n, &b));
        }

        #[test]
        fn tau_additive_on_coprime(m in 2i64..3000, n in 2i64..3000) {
            use num_integer::Integer;
            prop_assume!(m.gcd(&n) == 1);
            prop_assert_eq!(tau(&(m * n)).unwrap(), tau(&m).unwrap() + tau(&n).unwrap());
        }

        #[test]
        fn factorization_reconstructs(n in 1i64..1_000_000) {
            let f = factorize(&n).unwrap();
            prop_assert_eq!(f.value(), n);
            prop_assert!(f.prime_powers.windows(2).all(|w| w[0].0 < w[1].0));
        }
    }
}
