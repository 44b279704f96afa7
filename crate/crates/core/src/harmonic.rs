//! Harmonic numbers `H_n` and the generalized harmonic numbers
//!
//! ```text
//! H_{n,m} = Σ_{1 <= a_1 <= ... <= a_m <= n} 1/(a_1 a_2 ... a_m)
//! ```
//!
//! computed three ways: the memoized recurrence
//! `H_{n,m} = H_{n,m-1}/n + H_{n-1,m}`, the alternating binomial sum
//! `Σ_k (-1)^(k+1) C(n,k) k^(-m)`, and brute-force tuple enumeration.

use std::sync::{Mutex, OnceLock};

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::logpoly::{int, Rational};
use crate::numtheory::{binomial, lcm_range};

/// Default cap on the number of tuples [`gen_harmonic_enum`] may visit.
pub const DEFAULT_ENUM_BUDGET: u64 = 1_000_000;

/// Memoized grid of `H_{n,m}`.
///
/// Filled row by row in `n`; widening to a larger `m` extends every row.
#[derive(Debug, Default)]
pub struct HarmonicTable {
    // rows[n][m] = H_{n,m}; all rows share one width
    rows: Mutex<Vec<Vec<Rational>>>,
}

impl HarmonicTable {
    pub fn new() -> Self {
        Self::default()
    }

    /// The process-wide table.
    pub fn global() -> &'static HarmonicTable {
        static TABLE: OnceLock<HarmonicTable> = OnceLock::new();
        TABLE.get_or_init(HarmonicTable::new)
    }

    pub fn get(&self, n: u64, m: u64) -> Rational {
        let (n, m) = (n as usize, m as usize);
        let mut rows = self.rows.lock().expect("harmonic table poisoned");
        let width = rows.first().map_or(0, Vec::len);
        if m >= width {
            let new_width = (m + 1).max(2 * width);
            for i in 0..rows.len() {
                for col in width..new_width {
                    let v = Self::entry(&rows, i, col);
                    rows[i].push(v);
                }
            }
        }
        let width = rows.first().map_or(m + 1, Vec::len).max(m + 1);
        while rows.len() <= n {
            let i = rows.len();
            let mut row = Vec::with_capacity(width);
            for col in 0..width {
                let v = Self::entry_with_partial(&rows, &row, i, col);
                row.push(v);
            }
            rows.push(row);
        }
        rows[n][m].clone()
    }

    // row i already exists up to column col - 1
    fn entry(rows: &[Vec<Rational>], i: usize, col: usize) -> Rational {
        Self::entry_with_partial(rows, &rows[i][..col], i, col)
    }

    fn entry_with_partial(rows: &[Vec<Rational>], row: &[Rational], i: usize, col: usize) -> Rational {
        match (i, col) {
            (_, 0) => Rational::one(),
            (0, _) => Rational::zero(),
            _ => &row[col - 1] / int(i as u64) + &rows[i - 1][col],
        }
    }
}

fn harmonic_prefix_table() -> &'static Mutex<Vec<Rational>> {
    static TABLE: OnceLock<Mutex<Vec<Rational>>> = OnceLock::new();
    TABLE.get_or_init(|| Mutex::new(vec![Rational::zero()]))
}

/// `H_n = 1 + 1/2 + ... + 1/n`, with `H_0 = 0`.
pub fn harmonic(n: u64) -> Rational {
    harmonic_prefix(n).pop().expect("prefix is never empty")
}

/// `[H_0, H_1, ..., H_n]`.
pub fn harmonic_prefix(n: u64) -> Vec<Rational> {
    let mut table = harmonic_prefix_table().lock().expect("harmonic prefix poisoned");
    while (table.len() as u64) <= n {
        let i = table.len() as u64;
        let next = &table[table.len() - 1] + Rational::new(BigInt::one(), BigInt::from(i));
        table.push(next);
    }
    table[..=n as usize].to_vec()
}

/// `H_{n,m}` from the recurrence, memoized in [`HarmonicTable::global`].
pub fn gen_harmonic(n: u64, m: u64) -> Rational {
    HarmonicTable::global().get(n, m)
}

/// `H_{n,m} = Σ_{k=1}^{n} (-1)^(k+1) C(n,k) / k^m` for `n >= 1`.
pub fn gen_harmonic_alt(n: u64, m: u64) -> Result<Rational> {
    if n == 0 {
        return Err(Error::InvalidArgument("alternating form needs n >= 1".into()));
    }
    let mut sum = Rational::zero();
    for k in 1..=n {
        let term = Rational::new(binomial(n, k), BigInt::from(k).pow(m as u32));
        if k % 2 == 1 {
            sum += term;
        } else {
            sum -= term;
        }
    }
    Ok(sum)
}

/// `H_{n,m}` by enumerating every nondecreasing `m`-tuple from `{1..n}`.
///
/// Refuses to run when the tuple count `C(n+m-1, m)` exceeds `budget`.
pub fn gen_harmonic_enum(n: u64, m: u64, budget: u64) -> Result<Rational> {
    if m == 0 {
        return Ok(Rational::one());
    }
    if n == 0 {
        return Ok(Rational::zero());
    }
    let count = binomial(n + m - 1, m);
    if count > BigInt::from(budget) {
        return Err(Error::BudgetExceeded(format!("H_{{{n},{m}}} needs {count} tuples, budget is {budget}")));
    }
    // every term is D/(a_1...a_m) over D = lcm(1..n)^m, summed exactly as integers
    let l = lcm_range(n);
    let d = num_traits::pow(l, m as usize);
    let mut sum = BigInt::zero();
    enum_tuples(n, 1, m, &d, &mut sum);
    Ok(Rational::new(sum, d))
}

fn enum_tuples(n: u64, start: u64, depth: u64, q: &BigInt, sum: &mut BigInt) {
    for a in start..=n {
        let next = q / a;
        if depth == 1 {
            *sum += next;
        } else {
            enum_tuples(n, a, depth - 1, &next, sum);
        }
    }
}

/// `L · H_i` for `i = 0..=n` together with `L = lcm(1..n)`; all integers.
pub fn scaled_harmonic_prefix(n: u64) -> (BigInt, Vec<BigInt>) {
    let l = lcm_range(n);
    let mut out = Vec::with_capacity(n as usize + 1);
    let mut acc = BigInt::zero();
    out.push(acc.clone());
    for i in 1..=n {
        acc += &l / i;
        out.push(acc.clone());
    }
    (l, out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::logpoly::rational;

    #[test]
    fn harmonic_values() {
        assert_eq!(harmonic(0), rational(0, 1));
        assert_eq!(harmonic(2), rational(3, 2));
        assert_eq!(harmonic(4), rational(25, 12));
        let direct: Rational = (1..=30).map(|i| rational(1, i)).sum();
        assert_eq!(harmonic(30), direct);
    }

    #[test]
    fn gen_harmonic_values() {
        assert_eq!(gen_harmonic(0, 3), rational(0, 1));
        assert_eq!(gen_harmonic(0, 0), rational(1, 1));
        assert_eq!(gen_harmonic(3, 2), rational(85, 36));
        for m in 0..20u64 {
            let geometric = Rational::new((BigInt::from(2).pow(m as u32 + 1)) - 1, BigInt::from(2).pow(m as u32));
            assert_eq!(gen_harmonic(2, m), geometric, "m = {m}");
        }
    }

    #[test]
    fn alternating_form() {
        for m in 0..6 {
            assert_eq!(gen_harmonic_alt(1, m).unwrap(), rational(1, 1));
        }
        assert_eq!(gen_harmonic_alt(3, 2).unwrap(), rational(85, 36));
        assert_eq!(gen_harmonic_alt(3, 0).unwrap(), rational(1, 1));
        assert!(gen_harmonic_alt(0, 2).is_err());
    }

    #[test]
    fn enumeration() {
        let b = DEFAULT_ENUM_BUDGET;
        assert_eq!(gen_harmonic_enum(2, 2, b).unwrap(), rational(7, 4));
        assert_eq!(gen_harmonic_enum(1, 5, b).unwrap(), rational(1, 1));
        assert_eq!(gen_harmonic_enum(3, 1, b).unwrap(), rational(11, 6));
        assert_eq!(gen_harmonic_enum(3, 2, b).unwrap(), rational(85, 36));
        assert!(matches!(gen_harmonic_enum(40, 40, b), Err(Error::BudgetExceeded(_))));
        assert!(gen_harmonic_enum(3, 2, 5).is_err());
        assert!(gen_harmonic_enum(3, 2, 6).is_ok());
        assert_eq!(gen_harmonic_enum(7, 3, b).unwrap(), gen_harmonic(7, 3));
    }

    #[test]
    fn scaled_prefix() {
        let (l, g) = scaled_harmonic_prefix(12);
        let h = harmonic_prefix(12);
        for (gi, hi) in g.iter().zip(&h) {
            assert_eq!(Rational::new(gi.clone(), l.clone()), *hi);
        }
    }

    #[test]
    fn table_invariants() {
        let t = HarmonicTable::new();
        // grow in an awkward order to exercise widening
        assert_eq!(t.get(5, 1), harmonic(5));
        assert_eq!(t.get(2, 7), gen_harmonic(2, 7));
        assert_eq!(t.get(9, 3), gen_harmonic_alt(9, 3).unwrap());
        for n in 0..10 {
            assert_eq!(t.get(n, 0), rational(1, 1));
        }
        for m in 1..8 {
            assert_eq!(t.get(0, m), rational(0, 1));
        }
        for n in 1..10 {
            for m in 0..8 {
                assert!(t.get(n, m) > Rational::zero());
            }
        }
    }

    #[test]
    fn table_is_consistent_across_threads() {
        let t = HarmonicTable::new();
        std::thread::scope(|s| {
            for i in 0..4u64 {
                let t = &t;
                s.spawn(move || {
                    for n in 0..12 {
                        assert_eq!(t.get(n + 1, 3 + i), gen_harmonic_alt(n + 1, 3 + i).unwrap());
                    }
                });
            }
        });
        for n in 1..15 {
            assert_eq!(t.get(n, 4), gen_harmonic_alt(n, 4).unwrap());
        }
    }
}
