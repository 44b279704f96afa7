//! Denominators of `A_n(x)` and the prime-power facts behind them.
//!
//! `α_n` is always measured from the reduced polynomial and compared with the
//! prediction `n! · lcm(1..n)`, so a mismatch points at the broken claim.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::harmonic::harmonic_prefix;
use crate::iterated::{a_poly, b_coeff};
use crate::logpoly::{int, Polynomial, Rational};
use crate::numtheory::{binomial, factorial, is_prime, lcm_range, mangoldt_exp, p_adic_valuation, primes_up_to};

/// One row of the denominator table.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DenominatorReport {
    pub n: u64,
    #[serde(with = "bigint_string")]
    pub alpha_measured: BigInt,
    #[serde(with = "bigint_string")]
    pub alpha_closed: BigInt,
    /// `None` for `n < 2`.
    pub beta: Option<u64>,
    pub mangoldt: Option<u64>,
    #[serde(rename = "match")]
    pub matches: bool,
}

mod bigint_string {
    use num_bigint::BigInt;
    use serde::de::Error;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &BigInt, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&v.to_string())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BigInt, D::Error> {
        String::deserialize(d)?.parse().map_err(D::Error::custom)
    }
}

/// lcm of the reduced coefficient denominators (1 for the zero polynomial).
pub fn poly_denominator(p: &Polynomial) -> BigInt {
    p.denominator()
}

/// `α_n` measured from the reduced `A_n`; `α_0 = 1` since `A_0 = 0`.
pub fn alpha_measured(n: u64) -> Result<BigInt> {
    if n == 0 {
        return Ok(BigInt::one());
    }
    Ok(poly_denominator(&a_poly(n)?))
}

/// `n! · lcm(1, ..., n)`.
pub fn alpha_closed(n: u64) -> BigInt {
    factorial(n) * lcm_range(n)
}

/// `β_n = α_n / (n α_{n-1})` from measured denominators, required integral.
pub fn beta(n: u64) -> Result<Rational> {
    if n < 2 {
        return Err(Error::InvalidArgument("beta needs n >= 2".into()));
    }
    beta_from(n, &alpha_measured(n)?, &alpha_measured(n - 1)?)
}

fn beta_from(n: u64, alpha_n: &BigInt, alpha_prev: &BigInt) -> Result<Rational> {
    let q = Rational::new(alpha_n.clone(), alpha_prev * n);
    if !q.is_integer() {
        return Err(Error::NonIntegral { n, value: q.to_string() });
    }
    Ok(q)
}

/// Reports for `n = from..=to`, reusing `α_{n-1}` between rows; `α_0 = 1`.
pub fn denominator_reports(from: u64, to: u64) -> Result<Vec<DenominatorReport>> {
    let mut prev = alpha_measured(from.saturating_sub(1))?;
    let mut out = Vec::new();
    for n in from..=to {
        let measured = alpha_measured(n)?;
        let closed = alpha_closed(n);
        let (beta, mangoldt) = if n >= 2 {
            let b = beta_from(n, &measured, &prev)?;
            let b = u64::try_from(b.to_integer()).map_err(|_| Error::NonIntegral { n, value: b.to_string() })?;
            (Some(b), Some(mangoldt_exp(n)))
        } else {
            (None, None)
        };
        out.push(DenominatorReport {
            n,
            matches: measured == closed,
            alpha_measured: measured.clone(),
            alpha_closed: closed,
            beta,
            mangoldt,
        });
        prev = measured;
    }
    Ok(out)
}

/// Whether `ν_p(C(n, p^k) (H_n - H_{n-p^k})) = -k`.
pub fn lemma32_check(n: u64, p: u64, k: u32) -> Result<bool> {
    if !is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    let pk = p
        .checked_pow(k)
        .filter(|&v| v <= n)
        .ok_or_else(|| Error::InvalidArgument(format!("{p}^{k} exceeds n = {n}")))?;
    let h = harmonic_prefix(n);
    let q = int(binomial(n, pk)) * (&h[n as usize] - &h[(n - pk) as usize]);
    Ok(p_adic_valuation(&q, p)? == -(k as i64))
}

/// Whether every prime dividing the reduced denominator of `b_{n,k,j}` is at
/// most `max(n, k)`.
pub fn cor58_check(n: u64, k: u64, j: u64) -> Result<bool> {
    let b = b_coeff(n, k, j)?;
    let bound = n.max(k);
    Ok(largest_prime_factor(b.denom()).is_none_or(|p| p <= bound))
}

/// Largest prime factor by trial division.
fn largest_prime_factor(m: &BigInt) -> Option<u64> {
    if m.is_one() {
        return None;
    }
    let mut rest = m.clone();
    let mut largest = None;
    let mut d: u64 = 2;
    // once d^2 exceeds the cofactor, the cofactor is prime
    while !rest.is_one() {
        let bd = BigInt::from(d);
        if &bd * &bd > rest {
            largest = Some(u64::try_from(&rest).unwrap_or(u64::MAX));
            break;
        }
        let mut hit = false;
        loop {
            let (q, r) = rest.div_rem(&bd);
            if !r.is_zero() {
                break;
            }
            rest = q;
            hit = true;
        }
        if hit {
            largest = Some(d);
        }
        d += if d == 2 { 1 } else { 2 };
    }
    largest
}

/// All primes `p <= n` with the exponents `k >= 0` such that `p^k <= n`.
pub fn lemma32_cases(n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    for p in primes_up_to(n) {
        let mut k = 0;
        let mut pk = 1u64;
        while pk <= n {
            out.push((p, k));
            k += 1;
            match pk.checked_mul(p) {
                Some(v) => pk = v,
                None => break,
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn alpha_table() {
        let expected = [1u64, 1, 4, 36, 288, 7200, 43200, 2116800, 33868800];
        for (n, &a) in expected.iter().enumerate() {
            assert_eq!(alpha_measured(n as u64).unwrap(), BigInt::from(a), "n = {n}");
            if n >= 1 {
                assert_eq!(alpha_closed(n as u64), BigInt::from(a));
            }
        }
        assert_eq!(poly_denominator(&Polynomial::from_integers([3, -4, 7])), BigInt::one());
        assert_eq!(poly_denominator(&Polynomial::zero()), BigInt::one());
        assert_eq!(poly_denominator(&a_poly(6).unwrap()), BigInt::from(43200));
    }

    #[test]
    fn beta_values() {
        assert_eq!(beta(2).unwrap(), int(2));
        assert_eq!(beta(6).unwrap(), int(1));
        assert_eq!(beta(9).unwrap(), int(3));
        assert!(beta(1).is_err());
        assert!(matches!(beta_from(3, &BigInt::from(5), &BigInt::from(2)), Err(Error::NonIntegral { .. })));
    }

    #[test]
    fn reports() {
        let rows = denominator_reports(0, 13).unwrap();
        assert_eq!(rows.len(), 14);
        assert_eq!(rows[0].alpha_measured, BigInt::one());
        let rows = &rows[1..];
        assert!(rows.iter().all(|r| r.matches));
        let betas: Vec<u64> = rows.iter().filter_map(|r| r.beta).collect();
        assert_eq!(betas, vec![2, 3, 2, 5, 1, 7, 2, 3, 1, 11, 1, 13]);
        assert!(rows.iter().all(|r| r.beta == r.mangoldt));
        let json = serde_json::to_string(&rows[1]).unwrap();
        assert_eq!(json, r#"{"n":2,"alpha_measured":"4","alpha_closed":"4","beta":2,"mangoldt":2,"match":true}"#);
    }

    #[test]
    fn lemma32_examples() {
        assert!(lemma32_check(4, 2, 2).unwrap());
        for (p, k) in [(2u64, 3u32), (3, 2), (5, 1), (7, 2)] {
            assert!(lemma32_check(p.pow(k), p, k).unwrap());
        }
        assert!(lemma32_check(4, 2, 3).is_err());
        assert!(lemma32_check(4, 4, 1).is_err());
        assert!(lemma32_cases(4).contains(&(2, 0)));
        assert_eq!(lemma32_cases(4).len(), 5);
    }

    #[test]
    fn cor58_examples() {
        for n in 0..8 {
            assert!(cor58_check(n, 3, 3).unwrap());
        }
        assert!(cor58_check(2, 1, 2).unwrap());
        assert_eq!(largest_prime_factor(&BigInt::from(2 * 2 * 3 * 7 * 7)), Some(7));
        assert_eq!(largest_prime_factor(&BigInt::from(97)), Some(97));
        assert_eq!(largest_prime_factor(&BigInt::one()), None);
    }
}
