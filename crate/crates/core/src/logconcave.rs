//! Log-concavity and infinite log-concavity of coefficient sequences.
//!
//! The operator `𝔏(a)_j = a_j² - a_{j-1} a_{j+1}` (with zeros outside the
//! index range) is iterated until either an entry goes negative or the
//! current iterate is `r₀`-factor log-concave for `r₀ = (3 + √5)/2`; the
//! latter property is preserved by `𝔏`, so from that level on every iterate
//! stays nonnegative.
//!
//! The `r₀` comparison never touches floating point. With `P = a_{j-1} a_{j+1}`
//! and `S = 2a_j² - 3P`,
//!
//! ```text
//! a_j² >= r₀ P   <=>   S >= √5 P   <=>   S >= 0  and  S² >= 5P²
//! ```

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::harmonic::scaled_harmonic_prefix;
use crate::iterated::a_poly;
use crate::logpoly::{int, Rational};
use crate::numtheory::binomial;

/// Iteration budget used when the caller does not pick one.
pub const DEFAULT_MAX_ITER: u32 = 12;

/// A finite sequence `a_0..a_n`, implicitly zero outside that range.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Seq(Vec<Rational>);

impl Seq {
    pub fn new(values: Vec<Rational>) -> Self {
        Self(values)
    }

    pub fn from_integers<I: IntoIterator<Item = i64>>(values: I) -> Self {
        Self(values.into_iter().map(int).collect())
    }

    pub fn values(&self) -> &[Rational] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    fn first_negative(&self) -> Option<usize> {
        self.0.iter().position(Signed::is_negative)
    }

    /// Positive integer multiple of the sequence (cleared denominators).
    fn to_integers(&self) -> Vec<BigInt> {
        let l = self.0.iter().fold(BigInt::one(), |acc, q| acc.lcm(q.denom()));
        self.0.iter().map(|q| q.numer() * (&l / q.denom())).collect()
    }
}

impl From<Vec<Rational>> for Seq {
    fn from(v: Vec<Rational>) -> Self {
        Self(v)
    }
}

impl fmt::Display for Seq {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(ToString::to_string).collect();
        write!(f, "[{}]", parts.join(", "))
    }
}

fn l_step<T>(a: &[T]) -> Vec<T>
where
    T: Clone + Zero,
    for<'x> &'x T: std::ops::Mul<&'x T, Output = T> + std::ops::Sub<&'x T, Output = T>,
{
    let zero = T::zero();
    (0..a.len())
        .map(|j| {
            let left = if j == 0 { &zero } else { &a[j - 1] };
            let right = a.get(j + 1).unwrap_or(&zero);
            &(&a[j] * &a[j]) - &(left * right)
        })
        .collect()
}

/// `𝔏(a)_j = a_j² - a_{j-1} a_{j+1}`; same length as the input.
pub fn l_operator(a: &Seq) -> Seq {
    Seq(l_step(&a.0))
}

/// `a_j² >= a_{j-1} a_{j+1}` for every `j`.
pub fn is_logconcave(a: &Seq) -> bool {
    // positive rescaling leaves every inequality unchanged
    l_step(&a.to_integers()).iter().all(|v| !v.is_negative())
}

fn r0_holds(left: &BigInt, mid: &BigInt, right: &BigInt) -> bool {
    let p = left * right;
    if p.is_zero() {
        return true;
    }
    let s = (mid * mid) * 2u32 - &p * 3u32;
    !s.is_negative() && &s * &s >= (&p * &p) * 5u32
}

fn r0_factor(a: &[BigInt]) -> bool {
    let zero = BigInt::zero();
    (0..a.len()).all(|j| {
        let left = if j == 0 { &zero } else { &a[j - 1] };
        let right = a.get(j + 1).unwrap_or(&zero);
        r0_holds(left, &a[j], right)
    })
}

/// Exact test of `a_j² >= r₀ a_{j-1} a_{j+1}` for every `j`.
pub fn is_r0_factor(a: &Seq) -> Result<bool> {
    if let Some(index) = a.first_negative() {
        return Err(Error::NegativeEntry { index, value: a.0[index].to_string() });
    }
    // positive rescaling leaves the test unchanged
    Ok(r0_factor(&a.to_integers()))
}

/// Which sequence a certificate speaks about.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Family {
    /// Coefficients of `A_n(x)`.
    #[serde(rename = "An")]
    An,
    /// `C(n, 0..=n)`.
    #[serde(rename = "binomial-row")]
    BinomialRow,
    /// `d_{0,m}..d_{m,m}`.
    #[serde(rename = "dlm")]
    Dlm,
    #[serde(rename = "custom")]
    Custom,
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Family::An => "An",
            Family::BinomialRow => "binomial-row",
            Family::Dlm => "dlm",
            Family::Custom => "custom",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Status {
    /// Nonnegative through `iterations_used` and `r₀`-factor there.
    Certified,
    /// `𝔏^level` has a negative entry at `index`.
    Refuted { level: u32, index: usize },
    /// Still undecided after `max_iter` applications of `𝔏`.
    Inconclusive { max_iter: u32 },
}

/// Verdict of [`certify`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(into = "CertificateRecord", try_from = "CertificateRecord")]
pub struct Certificate {
    pub family: Family,
    pub n: u64,
    pub iterations_used: u32,
    pub status: Status,
}

impl Certificate {
    pub fn is_certified(&self) -> bool {
        self.status == Status::Certified
    }
}

#[derive(Serialize, Deserialize)]
struct CertificateRecord {
    family: Family,
    n: u64,
    iterations_used: u32,
    status: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    witness_index: Option<usize>,
}

impl From<Certificate> for CertificateRecord {
    fn from(c: Certificate) -> Self {
        let (status, witness_index) = match c.status {
            Status::Certified => ("certified", None),
            Status::Refuted { index, .. } => ("refuted", Some(index)),
            Status::Inconclusive { .. } => ("inconclusive", None),
        };
        Self { family: c.family, n: c.n, iterations_used: c.iterations_used, status: status.to_string(), witness_index }
    }
}

impl TryFrom<CertificateRecord> for Certificate {
    type Error = String;

    fn try_from(r: CertificateRecord) -> std::result::Result<Self, String> {
        let status = match (r.status.as_str(), r.witness_index) {
            ("certified", None) => Status::Certified,
            ("refuted", Some(index)) => Status::Refuted { level: r.iterations_used, index },
            ("inconclusive", None) => Status::Inconclusive { max_iter: r.iterations_used },
            (s, w) => return Err(format!("inconsistent status {s:?} with witness {w:?}")),
        };
        Ok(Self { family: r.family, n: r.n, iterations_used: r.iterations_used, status })
    }
}

impl fmt::Display for Certificate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} n={} ", self.family, self.n)?;
        match self.status {
            Status::Certified => write!(f, "certified at level {}", self.iterations_used),
            Status::Refuted { level, index } => {
                write!(f, "REFUTED: negative entry at index {index} of level {level}")
            }
            Status::Inconclusive { max_iter } => write!(f, "inconclusive after {max_iter} iterations"),
        }
    }
}

fn remove_content(a: &mut [BigInt]) {
    let g = a.iter().fold(BigInt::zero(), |acc, v| acc.gcd(v));
    if !g.is_zero() && !g.is_one() {
        for v in a.iter_mut() {
            *v /= &g;
        }
    }
}

/// Runs the infinite-log-concavity procedure on `a` with at most `max_iter`
/// applications of `𝔏`.
///
/// Entries must be nonnegative. The sequence is first cleared to coprime
/// integers, a positive rescaling which leaves the sign pattern and the `r₀`
/// test unchanged at every level.
pub fn certify(a: &Seq, family: Family, n: u64, max_iter: u32) -> Result<Certificate> {
    if let Some(index) = a.first_negative() {
        return Err(Error::NegativeEntry { index, value: a.0[index].to_string() });
    }
    let mut cur = a.to_integers();
    remove_content(&mut cur);
    let mut level = 0;
    loop {
        if let Some(index) = cur.iter().position(Signed::is_negative) {
            return Ok(Certificate { family, n, iterations_used: level, status: Status::Refuted { level, index } });
        }
        if r0_factor(&cur) {
            return Ok(Certificate { family, n, iterations_used: level, status: Status::Certified });
        }
        if level >= max_iter {
            return Ok(Certificate { family, n, iterations_used: level, status: Status::Inconclusive { max_iter } });
        }
        cur = l_step(&cur);
        level += 1;
    }
}

/// Replays a certificate from its input with plain rational arithmetic.
pub fn verify_certificate(a: &Seq, cert: &Certificate) -> bool {
    let mut cur = a.clone();
    for _ in 0..cert.iterations_used {
        if cur.first_negative().is_some() {
            return false;
        }
        cur = l_operator(&cur);
    }
    match cert.status {
        Status::Certified => cur.first_negative().is_none() && is_r0_factor(&cur).unwrap_or(false),
        Status::Refuted { index, .. } => cur.0.get(index).is_some_and(Signed::is_negative),
        Status::Inconclusive { .. } => cur.first_negative().is_none() && !is_r0_factor(&cur).unwrap_or(true),
    }
}

/// For each `1 <= j <= n-1` with `f = H_n - H_{n-j}`, checks
/// `((n+1)(n-j+1)/j) f² - f + 1 >= 0` and that the discriminant numerator
/// `j(4n+5) - 4(n+1)²` is negative.
///
/// With `L = lcm(1..n)` and `F = L f`, the quadratic is tested as the integer
/// `(n+1)(n-j+1) F² - j L F + j L²`.
pub fn discriminant_check(n: u64) -> bool {
    if n < 2 {
        return true;
    }
    let (l, g) = scaled_harmonic_prefix(n);
    let nn = n as usize;
    let l2 = &l * &l;
    (1..n).all(|j| {
        let f = &g[nn] - &g[nn - j as usize];
        let quad = &f * &f * ((n + 1) * (n - j + 1)) - &l * &f * j + &l2 * j;
        let disc = BigInt::from(j) * (4 * n + 5) - BigInt::from(4 * (n + 1) * (n + 1));
        !quad.is_negative() && disc.is_negative()
    })
}

/// `d_{l,m} = 2^(-2m) Σ_{k=l}^{m} 2^k C(2m-2k, m-k) C(m+k, m) C(k, l)`.
pub fn d_coeff(l: u64, m: u64) -> Result<Rational> {
    if l > m {
        return Err(Error::InvalidArgument(format!("need l <= m, got l = {l}, m = {m}")));
    }
    let mut sum = BigInt::zero();
    for k in l..=m {
        sum += (BigInt::one() << k) * binomial(2 * m - 2 * k, m - k) * binomial(m + k, m) * binomial(k, l);
    }
    Ok(Rational::new(sum, BigInt::one() << (2 * m)))
}

/// Coefficients of `A_n(x)`, ascending.
pub fn a_n_sequence(n: u64) -> Result<Seq> {
    Ok(Seq(a_poly(n)?.into_coeffs()))
}

pub fn binomial_row(n: u64) -> Seq {
    Seq((0..=n).map(|k| int(binomial(n, k))).collect())
}

/// `d_{0,m}, ..., d_{m,m}`.
pub fn dlm_row(m: u64) -> Seq {
    Seq((0..=m).map(|l| d_coeff(l, m).expect("l <= m")).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::logpoly::rational;

    #[test]
    fn l_operator_examples() {
        assert_eq!(l_operator(&Seq::from_integers([1, 1])), Seq::from_integers([1, 1]));
        assert_eq!(l_operator(&Seq::from_integers([1, 2, 1])), Seq::from_integers([1, 3, 1]));
        assert_eq!(l_operator(&Seq::from_integers([1, 4, 6, 4, 1])), Seq::from_integers([1, 10, 20, 10, 1]));
        assert!(l_operator(&Seq::default()).is_empty());
    }

    #[test]
    fn geometric_sequence_has_zero_interior() {
        let g = Seq::new((0..6).map(|j| rational(3i64.pow(j), 2i64.pow(j))).collect());
        let l = l_operator(&g);
        let v = l.values();
        assert!(v[0].is_positive() && v[5].is_positive());
        assert!(v[1..5].iter().all(Zero::is_zero));
    }

    #[test]
    fn logconcave_examples() {
        assert!(is_logconcave(&Seq::from_integers([1, 2, 1])));
        assert!(!is_logconcave(&Seq::from_integers([1, 1, 3])));
    }

    #[test]
    fn r0_examples() {
        assert!(!is_r0_factor(&Seq::from_integers([1, 1, 1])).unwrap());
        assert!(is_r0_factor(&Seq::from_integers([1, 2, 1])).unwrap());
        // neighbors of index 1 multiply to zero
        assert!(is_r0_factor(&Seq::from_integers([0, 5, 7])).unwrap());
        assert!(is_r0_factor(&Seq::from_integers([0, 1, 0, 1])).is_ok());
        assert!(r0_holds(&BigInt::from(0), &BigInt::from(0), &BigInt::from(9)));
        assert!(matches!(is_r0_factor(&Seq::from_integers([1, -1])), Err(Error::NegativeEntry { index: 1, .. })));
    }

    #[test]
    fn r0_boundary_is_sharp() {
        // a_j² / P straddling r₀ = 2.6180339887...
        let just_above = Seq::new(vec![int(1), rational(16180340, 10000000), int(1)]);
        let just_below = Seq::new(vec![int(1), rational(16180339, 10000000), int(1)]);
        assert!(is_r0_factor(&just_above).unwrap());
        assert!(!is_r0_factor(&just_below).unwrap());
    }

    #[test]
    fn certify_examples() {
        let row = Seq::from_integers([1, 4, 6, 4, 1]);
        let c = certify(&row, Family::BinomialRow, 4, DEFAULT_MAX_ITER).unwrap();
        assert_eq!(c.status, Status::Certified);
        assert_eq!(c.iterations_used, 1);
        assert!(verify_certificate(&row, &c));

        let flat = Seq::from_integers([1, 1, 1]);
        let c = certify(&flat, Family::Custom, 2, 0).unwrap();
        assert_eq!(c.status, Status::Inconclusive { max_iter: 0 });
        assert!(verify_certificate(&flat, &c));

        // [1, 1, 3] fails at level 1: 1 - 3 < 0 at index 1
        let bad = Seq::from_integers([1, 1, 3]);
        let c = certify(&bad, Family::Custom, 2, 5).unwrap();
        assert_eq!(c.status, Status::Refuted { level: 1, index: 1 });
        assert!(verify_certificate(&bad, &c));

        assert!(certify(&Seq::from_integers([1, -2]), Family::Custom, 1, 3).is_err());
    }

    #[test]
    fn certificate_json() {
        let c = Certificate { family: Family::An, n: 7, iterations_used: 3, status: Status::Certified };
        let s = serde_json::to_string(&c).unwrap();
        assert_eq!(s, r#"{"family":"An","n":7,"iterations_used":3,"status":"certified"}"#);
        assert_eq!(serde_json::from_str::<Certificate>(&s).unwrap(), c);

        let r = Certificate {
            family: Family::Custom,
            n: 2,
            iterations_used: 1,
            status: Status::Refuted { level: 1, index: 1 },
        };
        let s = serde_json::to_string(&r).unwrap();
        assert_eq!(s, r#"{"family":"custom","n":2,"iterations_used":1,"status":"refuted","witness_index":1}"#);
        assert_eq!(serde_json::from_str::<Certificate>(&s).unwrap(), r);
        assert!(serde_json::from_str::<Certificate>(
            r#"{"family":"dlm","n":2,"iterations_used":1,"status":"certified","witness_index":0}"#
        )
        .is_err());
    }

    #[test]
    fn discriminant_examples() {
        assert!(discriminant_check(1));
        assert!(discriminant_check(2));
        for n in 3..40 {
            assert!(discriminant_check(n));
        }
    }

    #[test]
    fn d_coeff_examples() {
        assert_eq!(d_coeff(0, 0).unwrap(), int(1));
        assert_eq!(d_coeff(0, 1).unwrap(), rational(3, 2));
        assert_eq!(d_coeff(1, 1).unwrap(), int(1));
        assert!(d_coeff(2, 1).is_err());
    }

    #[test]
    fn families() {
        assert_eq!(binomial_row(4), Seq::from_integers([1, 4, 6, 4, 1]));
        assert_eq!(a_n_sequence(2).unwrap(), Seq::new(vec![rational(1, 2), rational(3, 4)]));
        assert_eq!(dlm_row(1), Seq::new(vec![rational(3, 2), int(1)]));
    }
}
