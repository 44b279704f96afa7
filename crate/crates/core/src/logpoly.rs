//! Dense rational polynomials and expressions `Σ_k P_k(x) ln^k(1+x)`.
//!
//! Polynomials are stored in the monomial basis in `x`. The antiderivative
//! works in the shifted variable `t = 1 + x`, where
//!
//! ```text
//! ∫ t^r ln^k t dt = t^(r+1) Σ_{i=0}^{k} (-1)^i k!/(k-i)! ln^(k-i) t / (r+1)^(i+1)
//! ```
//!
//! and shifts back; [`Polynomial::taylor_shift`] is the only basis change.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Arbitrary-precision fraction, always in lowest terms with a positive
/// denominator.
pub type Rational = BigRational;

pub fn rational(numer: i64, denom: i64) -> Rational {
    Rational::new(numer.into(), denom.into())
}

pub fn int(n: impl Into<BigInt>) -> Rational {
    Rational::from_integer(n.into())
}

/// `"p/q"`, or `"p"` when `q = 1`.
pub fn format_rational(q: &Rational) -> String {
    q.to_string()
}

pub fn parse_rational(s: &str) -> Result<Rational> {
    let s = s.trim();
    let (num, den) = match s.split_once('/') {
        Some((n, d)) => (n, d),
        None => (s, "1"),
    };
    let num: BigInt = num.trim().parse().map_err(|_| Error::Parse(s.to_string()))?;
    let den: BigInt = den.trim().parse().map_err(|_| Error::Parse(s.to_string()))?;
    if den.is_zero() {
        return Err(Error::Parse(s.to_string()));
    }
    Ok(Rational::new(num, den))
}

/// Serde adapters rendering rationals as `"p/q"` strings.
pub mod rational_serde {
    use super::*;

    pub fn serialize<S: Serializer>(q: &Rational, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&format_rational(q))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Rational, D::Error> {
        let raw = String::deserialize(d)?;
        parse_rational(&raw).map_err(D::Error::custom)
    }

    pub mod vec {
        use super::*;

        pub fn serialize<S: Serializer>(v: &[Rational], s: S) -> std::result::Result<S::Ok, S::Error> {
            s.collect_seq(v.iter().map(format_rational))
        }

        pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Vec<Rational>, D::Error> {
            Vec::<String>::deserialize(d)?.iter().map(|s| parse_rational(s).map_err(D::Error::custom)).collect()
        }
    }
}

/// Dense polynomial over the rationals, coefficient `i` multiplies `x^i`.
///
/// Canonical form has no trailing zero coefficients; the zero polynomial has
/// no coefficients at all.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct Polynomial {
    coeffs: Vec<Rational>,
}

impl Polynomial {
    pub fn zero() -> Self {
        Self { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        Self::constant(Rational::one())
    }

    pub fn constant(c: Rational) -> Self {
        Self::new(vec![c])
    }

    /// `x`
    pub fn x() -> Self {
        Self::new(vec![Rational::zero(), Rational::one()])
    }

    /// `c · x^k`
    pub fn monomial(c: Rational, k: usize) -> Self {
        let mut coeffs = vec![Rational::zero(); k + 1];
        coeffs[k] = c;
        Self::new(coeffs)
    }

    pub fn new(mut coeffs: Vec<Rational>) -> Self {
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        Self { coeffs }
    }

    pub fn from_integers<I: IntoIterator<Item = i64>>(coeffs: I) -> Self {
        Self::new(coeffs.into_iter().map(int).collect())
    }

    /// `(1 + x)^n`
    pub fn one_plus_x_pow(n: usize) -> Self {
        Self::new((0..=n as u64).map(|k| int(crate::numtheory::binomial(n as u64, k))).collect())
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<Rational> {
        self.coeffs
    }

    /// Coefficient of `x^k` (zero beyond the degree).
    pub fn coeff(&self, k: usize) -> Rational {
        self.coeffs.get(k).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn scale(&self, c: &Rational) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        Self { coeffs: self.coeffs.iter().map(|a| a * c).collect() }
    }

    pub fn derivative(&self) -> Self {
        Self::new(self.coeffs.iter().enumerate().skip(1).map(|(i, a)| a * int(i as u64)).collect())
    }

    /// Horner evaluation.
    pub fn eval(&self, x0: &Rational) -> Rational {
        self.coeffs.iter().rev().fold(Rational::zero(), |acc, a| acc * x0 + a)
    }

    /// `p(x + c)`.
    pub fn taylor_shift(&self, c: &Rational) -> Self {
        // synthetic division repeated n times
        let mut a = self.coeffs.clone();
        let n = a.len();
        for i in 0..n {
            for k in (i..n.saturating_sub(1)).rev() {
                let t = &a[k + 1] * c;
                a[k] += t;
            }
        }
        Self::new(a)
    }

    /// Quotient and remainder of division by a nonzero polynomial.
    pub fn div_rem(&self, d: &Polynomial) -> Result<(Polynomial, Polynomial)> {
        let dd = d.degree().ok_or_else(|| Error::InvalidArgument("division by the zero polynomial".into()))?;
        let lead = d.coeffs[dd].clone();
        let mut rem = self.coeffs.clone();
        if rem.len() <= dd {
            return Ok((Polynomial::zero(), self.clone()));
        }
        let mut quot = vec![Rational::zero(); rem.len() - dd];
        for i in (0..quot.len()).rev() {
            let q = &rem[i + dd] / &lead;
            if q.is_zero() {
                continue;
            }
            for (k, dk) in d.coeffs.iter().enumerate() {
                rem[i + k] -= &q * dk;
            }
            quot[i] = q;
        }
        rem.truncate(dd);
        Ok((Polynomial::new(quot), Polynomial::new(rem)))
    }

    /// Quotient `q` with `self = q · d`; fails on a nonzero remainder.
    pub fn divide_exact(&self, d: &Polynomial) -> Result<Polynomial> {
        let (q, r) = self.div_rem(d)?;
        if r.is_zero() {
            Ok(q)
        } else {
            Err(Error::InexactDivision { remainder: r.to_string() })
        }
    }

    /// lcm of coefficient denominators (1 for the zero polynomial).
    pub fn denominator(&self) -> BigInt {
        use num_integer::Integer;
        self.coeffs.iter().fold(BigInt::one(), |acc, c| acc.lcm(c.denom()))
    }
}

impl Add for &Polynomial {
    type Output = Polynomial;

    fn add(self, rhs: &Polynomial) -> Polynomial {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        Polynomial::new((0..n).map(|i| self.coeff(i) + rhs.coeff(i)).collect())
    }
}

impl Sub for &Polynomial {
    type Output = Polynomial;

    fn sub(self, rhs: &Polynomial) -> Polynomial {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        Polynomial::new((0..n).map(|i| self.coeff(i) - rhs.coeff(i)).collect())
    }
}

impl Neg for &Polynomial {
    type Output = Polynomial;

    fn neg(self) -> Polynomial {
        Polynomial { coeffs: self.coeffs.iter().map(|c| -c).collect() }
    }
}

impl Mul for &Polynomial {
    type Output = Polynomial;

    fn mul(self, rhs: &Polynomial) -> Polynomial {
        if self.is_zero() || rhs.is_zero() {
            return Polynomial::zero();
        }
        let mut out = vec![Rational::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Polynomial::new(out)
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr for Polynomial {
            type Output = Polynomial;

            fn $m(self, rhs: Polynomial) -> Polynomial {
                (&self).$m(&rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl fmt::Display for Polynomial {
    /// Ascending by degree: `1/2 + 3/4*x + x^2`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let mag = c.abs();
            if first {
                if c.is_negative() {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if c.is_negative() { '-' } else { '+' })?;
            }
            first = false;
            let var = match i {
                0 => String::new(),
                1 => "x".to_string(),
                _ => format!("x^{i}"),
            };
            match (i, mag.is_one()) {
                (0, _) => write!(f, "{mag}")?,
                (_, true) => write!(f, "{var}")?,
                (_, false) => write!(f, "{mag}*{var}")?,
            }
        }
        Ok(())
    }
}

impl Serialize for Polynomial {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_seq(self.coeffs.iter().map(format_rational))
    }
}

impl<'de> Deserialize<'de> for Polynomial {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw = Vec::<String>::deserialize(d)?;
        let coeffs = raw
            .iter()
            .map(|s| parse_rational(s).map_err(D::Error::custom))
            .collect::<std::result::Result<Vec<_>, _>>()?;
        Ok(Polynomial::new(coeffs))
    }
}

/// `Σ_k P_k(x) · ln^k(1+x)`, keyed by the log power `k`.
///
/// Zero polynomials are never stored; the empty map is the zero expression.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(from = "BTreeMap<usize, Polynomial>", into = "BTreeMap<usize, Polynomial>")]
pub struct LogPolyExpr {
    terms: BTreeMap<usize, Polynomial>,
}

impl From<BTreeMap<usize, Polynomial>> for LogPolyExpr {
    fn from(terms: BTreeMap<usize, Polynomial>) -> Self {
        Self::from_terms(terms)
    }
}

impl From<LogPolyExpr> for BTreeMap<usize, Polynomial> {
    fn from(e: LogPolyExpr) -> Self {
        e.terms
    }
}

impl LogPolyExpr {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn from_terms<I: IntoIterator<Item = (usize, Polynomial)>>(terms: I) -> Self {
        let mut e = Self::zero();
        for (k, p) in terms {
            e.add_term(k, &p);
        }
        e
    }

    /// `ln^k(1+x)`
    pub fn log_power(k: usize) -> Self {
        Self::from_terms([(k, Polynomial::one())])
    }

    pub fn term(&self, k: usize) -> Polynomial {
        self.terms.get(&k).cloned().unwrap_or_default()
    }

    pub fn terms(&self) -> impl Iterator<Item = (usize, &Polynomial)> {
        self.terms.iter().map(|(k, p)| (*k, p))
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Highest log power present.
    pub fn max_log_power(&self) -> Option<usize> {
        self.terms.keys().next_back().copied()
    }

    pub fn add_term(&mut self, k: usize, p: &Polynomial) {
        let sum = &self.term(k) + p;
        if sum.is_zero() {
            self.terms.remove(&k);
        } else {
            self.terms.insert(k, sum);
        }
    }

    /// The iterated primitive `∫_0^x e(t) dt`, vanishing at `x = 0`.
    pub fn antiderivative(&self) -> LogPolyExpr {
        let one = Rational::one();
        let minus_one = -Rational::one();
        // accumulate in the t = 1 + x basis: shifted[k'][r'] is the coefficient of t^r' ln^k' t
        let mut shifted: BTreeMap<usize, Vec<Rational>> = BTreeMap::new();
        for (&k, p) in &self.terms {
            let q = p.taylor_shift(&minus_one);
            for (r, c) in q.coeffs().iter().enumerate() {
                if c.is_zero() {
                    continue;
                }
                let r1 = int(r as u64 + 1);
                // falling factorial k!/(k-i)! and (r+1)^(i+1)
                let mut falling = Rational::one();
                let mut power = r1.clone();
                for i in 0..=k {
                    let mut term = c * &falling / &power;
                    if i % 2 == 1 {
                        term = -term;
                    }
                    let slot = shifted.entry(k - i).or_default();
                    if slot.len() < r + 2 {
                        slot.resize(r + 2, Rational::zero());
                    }
                    slot[r + 1] += term;
                    falling *= int((k - i) as u64);
                    power *= &r1;
                }
            }
        }
        let mut out = LogPolyExpr::zero();
        for (k, coeffs) in shifted {
            out.add_term(k, &Polynomial::new(coeffs).taylor_shift(&one));
        }
        // ln^k(1+0) = 0 for k >= 1, so only the pure polynomial part fixes the constant
        let c0 = out.term(0).eval(&Rational::zero());
        out.add_term(0, &Polynomial::constant(-c0));
        out
    }

    /// Formal `d/dx`.
    ///
    /// `d/dx P ln^k(1+x) = P' ln^k(1+x) + k P/(1+x) ln^(k-1)(1+x)` stays in the
    /// class only when `(1+x)` divides `P` for every `k >= 1`.
    pub fn derivative(&self) -> Result<LogPolyExpr> {
        let one_plus_x = Polynomial::one_plus_x_pow(1);
        let mut out = LogPolyExpr::zero();
        for (&k, p) in &self.terms {
            out.add_term(k, &p.derivative());
            if k >= 1 {
                let q = p.divide_exact(&one_plus_x).map_err(|_| Error::NotRepresentable { power: k })?;
                out.add_term(k - 1, &q.scale(&int(k as u64)));
            }
        }
        Ok(out)
    }

    /// `(c_0, ..., c_J)` with `c_k = P_k(x0)`, so that the value is
    /// `Σ c_k u^k` with `u = ln(1 + x0)`.
    pub fn eval_components(&self, x0: &Rational) -> Vec<Rational> {
        let top = self.max_log_power().map_or(0, |k| k + 1);
        (0..top).map(|k| self.term(k).eval(x0)).collect()
    }
}

impl Add for &LogPolyExpr {
    type Output = LogPolyExpr;

    fn add(self, rhs: &LogPolyExpr) -> LogPolyExpr {
        let mut out = self.clone();
        for (k, p) in rhs.terms() {
            out.add_term(k, p);
        }
        out
    }
}

impl Neg for &LogPolyExpr {
    type Output = LogPolyExpr;

    fn neg(self) -> LogPolyExpr {
        LogPolyExpr { terms: self.terms.iter().map(|(k, p)| (*k, -p)).collect() }
    }
}

impl Sub for &LogPolyExpr {
    type Output = LogPolyExpr;

    fn sub(self, rhs: &LogPolyExpr) -> LogPolyExpr {
        self + &(-rhs)
    }
}

impl fmt::Display for LogPolyExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (&k, p) in &self.terms {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            let log = match k {
                0 => String::new(),
                1 => "ln(1+x)".to_string(),
                _ => format!("ln(1+x)^{k}"),
            };
            match (k, p.coeffs()) {
                (0, [_]) => write!(f, "{p}")?,
                (0, _) => write!(f, "({p})")?,
                (_, [c]) if c.is_one() => write!(f, "{log}")?,
                (_, [_]) => write!(f, "{p}*{log}")?,
                _ => write!(f, "({p})*{log}")?,
            }
        }
        Ok(())
    }
}
