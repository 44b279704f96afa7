//! The power-series form `f_n(x) = -x^n Σ_{j>=1} (-x)^j / (j(j+1)...(j+n))`
//! and the polynomial identity obtained by comparing the two formulas for
//! `A_n`.

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use super::f_closed;
use crate::error::{Error, Result};
use crate::logpoly::{int, Polynomial, Rational};
use crate::numtheory::binomial;

fn series_term(n: u64, x0: &Rational, j: u64) -> Rational {
    // j (j+1) ... (j+n)
    let rising: BigInt = (j..=j + n).map(BigInt::from).product();
    let mag = num_traits::pow(x0.clone(), (n + j) as usize) / int(rising);
    // -x^n (-x)^j = (-1)^(j+1) x^(n+j)
    if j % 2 == 1 {
        mag
    } else {
        -mag
    }
}

/// Partial sum of the first `terms` terms of the series for `f_n(x0)` and
/// the magnitude of the first omitted term.
///
/// For `0 < x0 < 1` the series alternates with decreasing terms, so the
/// omitted tail is bounded by that magnitude.
pub fn series_partial(n: u64, x0: &Rational, terms: u64) -> Result<(Rational, Rational)> {
    if !(x0.is_positive() && *x0 < Rational::one()) {
        return Err(Error::InvalidArgument(format!("x0 = {x0} must lie in (0, 1)")));
    }
    let partial = (1..=terms).map(|j| series_term(n, x0, j)).sum();
    let bound = series_term(n, x0, terms + 1).abs();
    Ok((partial, bound))
}

/// Rational enclosure `lo <= ln(x) <= hi` with `hi - lo < 10^-digits`.
///
/// Uses `ln x = 2 Σ_k z^(2k+1)/(2k+1)` with `z = (x-1)/(x+1)`, with tail
/// bounded by `2|z|^(2K+1) / ((2K+1)(1 - z^2))`.
pub fn ln_enclosure(x: &Rational, digits: u32) -> Result<(Rational, Rational)> {
    if !x.is_positive() {
        return Err(Error::InvalidArgument(format!("ln of non-positive {x}")));
    }
    let z = (x - Rational::one()) / (x + Rational::one());
    if z.is_zero() {
        return Ok((Rational::zero(), Rational::zero()));
    }
    let tol = Rational::new(BigInt::one(), BigInt::from(10).pow(digits));
    let z2 = &z * &z;
    let tail_scale = int(2) / (Rational::one() - &z2);
    let mut power = z.clone();
    let mut sum = Rational::zero();
    let mut k: u64 = 0;
    loop {
        let odd = int(2 * k + 1);
        sum += int(2) * &power / &odd;
        power *= &z2;
        k += 1;
        let tail = &tail_scale * power.abs() / int(2 * k + 1);
        // the interval width is twice the tail
        if int(2) * &tail < tol {
            return Ok((&sum - &tail, &sum + &tail));
        }
    }
}

/// Result of comparing the truncated series against the exact closed form.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SeriesBracket {
    pub n: u64,
    pub terms: u64,
    pub partial: Rational,
    pub bound: Rational,
    /// Enclosure of the closed-form value `c_0 + c_1 ln(1 + x0)`.
    pub value_lo: Rational,
    pub value_hi: Rational,
}

impl SeriesBracket {
    /// Whether every point of the value enclosure is within `bound` of the
    /// partial sum.
    pub fn holds(&self) -> bool {
        (&self.value_hi - &self.partial).abs() <= self.bound && (&self.partial - &self.value_lo).abs() <= self.bound
    }
}

/// Evaluates `f_n(x0)` from the closed form with a `digits`-digit enclosure
/// of `ln(1 + x0)` and sets it against the series partial sum.
pub fn series_bracket(n: u64, x0: &Rational, terms: u64, digits: u32) -> Result<SeriesBracket> {
    if n == 0 {
        return Err(Error::InvalidArgument("series check needs n >= 1".into()));
    }
    let (partial, bound) = series_partial(n, x0, terms)?;
    let c = f_closed(n, 1)?.expr.eval_components(x0);
    let c0 = c.first().cloned().unwrap_or_else(Rational::zero);
    let c1 = c.get(1).cloned().unwrap_or_else(Rational::zero);
    let (lo, hi) = ln_enclosure(&(x0 + Rational::one()), digits)?;
    let (a, b) = (&c0 + &c1 * &lo, &c0 + &c1 * &hi);
    let (value_lo, value_hi) = if a <= b { (a, b) } else { (b, a) };
    Ok(SeriesBracket { n, terms, partial, bound, value_lo, value_hi })
}

/// Checks, as polynomials,
///
/// ```text
/// -Σ_{k=0}^{n} C(n,k) x^k Σ_{m=1}^{n-k} (-x)^m/m  =  Σ_{k=1}^{n} C(n,k) x^k Σ_{m=1}^{k} 1/(m+n-k)
/// ```
pub fn identity_check(n: u64) -> bool {
    let len = n as usize + 1;
    let mut lhs = vec![Rational::zero(); len];
    for k in 0..=n {
        let c = int(binomial(n, k));
        for m in 1..=(n - k) {
            // -(-x)^m/m
            let term = &c / int(m);
            let idx = (k + m) as usize;
            if m % 2 == 1 {
                lhs[idx] += term;
            } else {
                lhs[idx] -= term;
            }
        }
    }
    let mut rhs = vec![Rational::zero(); len];
    for k in 1..=n {
        let inner: Rational = (1..=k).map(|m| Rational::new(BigInt::one(), BigInt::from(m + n - k))).sum();
        rhs[k as usize] = int(binomial(n, k)) * inner;
    }
    Polynomial::new(lhs) == Polynomial::new(rhs)
}
