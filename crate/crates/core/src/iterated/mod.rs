//! Closed forms for the iterated primitives
//!
//! ```text
//! f_{n,j}(x) = A_{n,j}(x) + Σ_{k=1}^{j} b_{n,k,j} (1+x)^n ln^k(1+x)
//! ```
//!
//! and, for `j = 1`, `f_n(x) = -x A_n(x) + (1+x)^n/n! · ln(1+x)`.
//!
//! Every closed form has at least one independent route next to it: the
//! repeated antiderivative [`f_oracle`] is ground truth, and the coefficient
//! recurrences ([`a_rec`], [`b_coeff_rec`], [`c_rec`]) are built without
//! reference to the closed formulas.

mod series;

pub use series::{identity_check, ln_enclosure, series_bracket, series_partial, SeriesBracket};

use serde::{Deserialize, Serialize};

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::harmonic::{gen_harmonic, scaled_harmonic_prefix};
use crate::logpoly::{int, rational_serde, LogPolyExpr, Polynomial, Rational};
use crate::numtheory::{binomial, factorial};

/// Limits for the brute-force antiderivative oracle.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OracleBudget {
    pub max_n: u64,
    pub max_j: u64,
}

impl Default for OracleBudget {
    fn default() -> Self {
        Self { max_n: 60, max_j: 8 }
    }
}

/// `f_{n,j}` split into its pure-polynomial part and log coefficients.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IteratedResult {
    pub n: u64,
    pub j: u64,
    /// `A_{n,j}(x)`
    pub a_part: Polynomial,
    /// `b_{n,k,j}` for `k = 1..=j`
    #[serde(with = "rational_serde::vec")]
    pub b_coeffs: Vec<Rational>,
    pub expr: LogPolyExpr,
}

fn inv_factorial(n: u64) -> Rational {
    Rational::new(BigInt::one(), factorial(n))
}

fn sign(e: u64) -> Rational {
    if e.is_multiple_of(2) {
        Rational::one()
    } else {
        -Rational::one()
    }
}

fn require_positive(name: &str, v: u64) -> Result<()> {
    if v == 0 {
        return Err(Error::InvalidArgument(format!("{name} must be >= 1")));
    }
    Ok(())
}

/// `ln^j(1+x)` integrated `n` times from 0.
pub fn f_oracle(n: u64, j: u64) -> Result<LogPolyExpr> {
    f_oracle_with_budget(n, j, OracleBudget::default())
}

pub fn f_oracle_with_budget(n: u64, j: u64, budget: OracleBudget) -> Result<LogPolyExpr> {
    require_positive("j", j)?;
    if n > budget.max_n || j > budget.max_j {
        return Err(Error::BudgetExceeded(format!(
            "oracle f_{{{n},{j}}} exceeds n <= {}, j <= {}",
            budget.max_n, budget.max_j
        )));
    }
    let mut f = LogPolyExpr::log_power(j as usize);
    for _ in 0..n {
        f = f.antiderivative();
    }
    Ok(f)
}

/// `A_n(x) = (1/n!) Σ_{k=1}^{n} C(n,k) (H_n - H_{n-k}) x^(k-1)`.
pub fn a_poly(n: u64) -> Result<Polynomial> {
    require_positive("n", n)?;
    let (l, g) = scaled_harmonic_prefix(n);
    let den = factorial(n) * l;
    let nn = n as usize;
    Ok(Polynomial::new(
        (1..=n).map(|k| Rational::new(binomial(n, k) * (&g[nn] - &g[nn - k as usize]), den.clone())).collect(),
    ))
}

/// `A_n(x) = (1/n!) Σ_{k=0}^{n} C(n,k) x^k Σ_{m=1}^{n-k} (-x)^(m-1)/m`.
pub fn a_poly_alt(n: u64) -> Result<Polynomial> {
    require_positive("n", n)?;
    let mut coeffs = vec![Rational::zero(); n as usize];
    for k in 0..=n {
        let c = int(binomial(n, k));
        for m in 1..=(n - k) {
            let term = &c * sign(m - 1) / int(m);
            coeffs[(k + m - 1) as usize] += term;
        }
    }
    Ok(Polynomial::new(coeffs).scale(&inv_factorial(n)))
}

/// `A_n` from `a_{n,1} = 1/n!` and `k a_{n,k} = a_{n-1,k-1} + C(n-1,k-1)/n!`.
pub fn a_rec(n: u64) -> Result<Polynomial> {
    require_positive("n", n)?;
    // prev[k - 1] = a_{m-1,k}
    let mut prev: Vec<Rational> = Vec::new();
    for m in 1..=n {
        let inv = inv_factorial(m);
        let mut row = Vec::with_capacity(m as usize);
        row.push(inv.clone());
        for k in 2..=m {
            let v = (&prev[(k - 2) as usize] + int(binomial(m - 1, k - 1)) * &inv) / int(k);
            row.push(v);
        }
        prev = row;
    }
    Ok(Polynomial::new(prev))
}

/// `B_n(x) = (1+x)^n / n!`.
pub fn b_poly(n: u64) -> Polynomial {
    Polynomial::one_plus_x_pow(n as usize).scale(&inv_factorial(n))
}

fn check_kj(k: u64, j: u64) -> Result<()> {
    if k == 0 || k > j {
        return Err(Error::InvalidArgument(format!("need 1 <= k <= j, got k = {k}, j = {j}")));
    }
    Ok(())
}

/// `b_{n,k,j} = (-1)^(j-k) j! / (n! k!) · H_{n,j-k}`.
pub fn b_coeff(n: u64, k: u64, j: u64) -> Result<Rational> {
    check_kj(k, j)?;
    let scale = Rational::new(factorial(j), factorial(n) * factorial(k));
    Ok(sign(j - k) * scale * gen_harmonic(n, j - k))
}

/// `[b_{m,1,j}, ..., b_{m,j,j}]` for `m = 0..=n` from the recurrence
/// `b_{m,k,j} = -((k+1)/m) b_{m,k+1,j} + b_{m-1,k,j}/m`.
pub fn b_coeff_rec_table(n: u64, j: u64) -> Result<Vec<Vec<Rational>>> {
    require_positive("j", j)?;
    let jj = j as usize;
    let mut rows = Vec::with_capacity(n as usize + 1);
    let mut row = vec![Rational::zero(); jj];
    row[jj - 1] = Rational::one();
    rows.push(row);
    for m in 1..=n {
        let prev = &rows[rows.len() - 1];
        let mut row = vec![Rational::zero(); jj];
        let inv_m = Rational::new(BigInt::one(), BigInt::from(m));
        row[jj - 1] = &prev[jj - 1] * &inv_m;
        for k in (1..j).rev() {
            let idx = (k - 1) as usize;
            let v = (&prev[idx] - int(k + 1) * &row[idx + 1]) * &inv_m;
            row[idx] = v;
        }
        rows.push(row);
    }
    Ok(rows)
}

pub fn b_coeff_rec(n: u64, k: u64, j: u64) -> Result<Rational> {
    check_kj(k, j)?;
    let rows = b_coeff_rec_table(n, j)?;
    Ok(rows[n as usize][(k - 1) as usize].clone())
}

/// `α_{n,j} = (-1)^j j! H_{n,j-1} / n!`
fn alpha_nj(n: u64, j: u64) -> Rational {
    sign(j) * Rational::new(factorial(j), factorial(n)) * gen_harmonic(n, j - 1)
}

/// `A_{n,j}(x) = ((-1)^j j!/n!) Σ_{r=1}^{n} C(n,r) [Σ_{k=0}^{r-1} H_{n-k,j-1}/(n-k)] x^r`.
///
/// `A_{0,j} = 0`.
pub fn a_poly_general(n: u64, j: u64) -> Result<Polynomial> {
    require_positive("j", j)?;
    let mut coeffs = vec![Rational::zero(); n as usize + 1];
    let mut inner = Rational::zero();
    for r in 1..=n {
        let m = n - (r - 1);
        inner += gen_harmonic(m, j - 1) / int(m);
        coeffs[r as usize] = int(binomial(n, r)) * &inner;
    }
    let scale = sign(j) * Rational::new(factorial(j), factorial(n));
    Ok(Polynomial::new(coeffs).scale(&scale))
}

/// `A_{n,j}` from `c_{n,1,j} = α_{n,j}` and
/// `c_{n,r,j} = c_{n-1,r-1,j}/r + C(n-1,r-1) α_{n,j}/r`.
pub fn c_rec(n: u64, j: u64) -> Result<Polynomial> {
    require_positive("j", j)?;
    // prev[r] = c_{m-1,r,j}, prev[0] = 0
    let mut prev = vec![Rational::zero()];
    for m in 1..=n {
        let alpha = alpha_nj(m, j);
        let mut row = vec![Rational::zero(); m as usize + 1];
        for r in 1..=m {
            let carried = prev.get((r - 1) as usize).cloned().unwrap_or_else(Rational::zero);
            row[r as usize] = (carried + int(binomial(m - 1, r - 1)) * &alpha) / int(r);
        }
        prev = row;
    }
    Ok(Polynomial::new(prev))
}

/// The closed form of `f_{n,j}` assembled from [`a_poly_general`] and [`b_coeff`].
pub fn f_closed(n: u64, j: u64) -> Result<IteratedResult> {
    require_positive("j", j)?;
    let a_part = a_poly_general(n, j)?;
    let b_coeffs = (1..=j).map(|k| b_coeff(n, k, j)).collect::<Result<Vec<_>>>()?;
    let power = Polynomial::one_plus_x_pow(n as usize);
    let mut expr = LogPolyExpr::from_terms([(0, a_part.clone())]);
    for (k, b) in b_coeffs.iter().enumerate() {
        expr.add_term(k + 1, &power.scale(b));
    }
    Ok(IteratedResult { n, j, a_part, b_coeffs, expr })
}

/// Reads `b_{n,k,j}` off an expression whose log coefficients must all be
/// constant multiples of `(1+x)^n`.
pub fn extract_b_coeffs(expr: &LogPolyExpr, n: u64, j: u64) -> Result<Vec<Rational>> {
    let power = Polynomial::one_plus_x_pow(n as usize);
    (1..=j as usize)
        .map(|k| {
            let q = expr.term(k).divide_exact(&power)?;
            match q.degree() {
                None | Some(0) => Ok(q.coeff(0)),
                Some(_) => Err(Error::InexactDivision { remainder: format!("quotient {q} is not constant") }),
            }
        })
        .collect()
}
