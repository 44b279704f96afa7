//! Primes, lcm(1..n), prime powers and p-adic valuations.

use std::sync::{Mutex, OnceLock};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::logpoly::Rational;

/// A prime power `p^k` with `k >= 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PrimePower {
    p: u64,
    k: u32,
    value: u64,
}

impl PrimePower {
    pub fn new(p: u64, k: u32) -> Result<Self> {
        if !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        if k == 0 {
            return Err(Error::InvalidArgument("prime power exponent must be >= 1".into()));
        }
        let value = p.checked_pow(k).ok_or_else(|| Error::InvalidArgument(format!("{p}^{k} overflows u64")))?;
        Ok(Self { p, k, value })
    }

    pub fn prime(&self) -> u64 {
        self.p
    }

    pub fn exponent(&self) -> u32 {
        self.k
    }

    pub fn value(&self) -> u64 {
        self.value
    }
}

/// Every prime power `p^k <= n` with `k >= 1`, ordered by prime then exponent.
pub fn prime_powers_up_to(n: u64) -> Vec<PrimePower> {
    let mut out = Vec::new();
    for p in primes_up_to(n) {
        let mut value = p;
        let mut k = 1;
        loop {
            out.push(PrimePower { p, k, value });
            match value.checked_mul(p) {
                Some(next) if next <= n => {
                    value = next;
                    k += 1;
                }
                _ => break,
            }
        }
    }
    out
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n < 4 {
        return true;
    }
    if n.is_multiple_of(2) {
        return false;
    }
    let mut d = 3;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 2;
    }
    true
}

/// Primes in `[2, n]`, ascending (sieve of Eratosthenes).
pub fn primes_up_to(n: u64) -> Vec<u64> {
    if n < 2 {
        return Vec::new();
    }
    let n = n as usize;
    let mut composite = vec![false; n + 1];
    let mut primes = Vec::new();
    for i in 2..=n {
        if composite[i] {
            continue;
        }
        primes.push(i as u64);
        let mut m = i * i;
        while m <= n {
            composite[m] = true;
            m += i;
        }
    }
    primes
}

fn lcm_table() -> &'static Mutex<Vec<BigInt>> {
    static TABLE: OnceLock<Mutex<Vec<BigInt>>> = OnceLock::new();
    // index 0 holds lcm() = 1 so that table[n] = lcm(1..n)
    TABLE.get_or_init(|| Mutex::new(vec![BigInt::one()]))
}

/// `lcm(1, 2, ..., n)`, with `lcm_range(0) = 1`.
///
/// Filled incrementally: `lcm(1..n) = lcm(1..n-1) * mangoldt_exp(n)`.
pub fn lcm_range(n: u64) -> BigInt {
    let mut table = lcm_table().lock().expect("lcm table poisoned");
    while (table.len() as u64) <= n {
        let m = table.len() as u64;
        let next = if m < 2 { table[table.len() - 1].clone() } else { &table[table.len() - 1] * mangoldt_exp(m) };
        table.push(next);
    }
    table[n as usize].clone()
}

/// `exp(Λ(n))`: the prime `p` when `n = p^k` with `k >= 1`, otherwise `1`.
///
/// `n < 2` returns 1.
pub fn mangoldt_exp(n: u64) -> u64 {
    if n < 2 {
        return 1;
    }
    for p in primes_up_to(n) {
        // largest power of p not exceeding n, exact integer powering
        let mut q = p;
        while q <= n / p {
            q *= p;
        }
        if q == n {
            return p;
        }
    }
    1
}

fn factorial_table() -> &'static Mutex<Vec<BigInt>> {
    static TABLE: OnceLock<Mutex<Vec<BigInt>>> = OnceLock::new();
    TABLE.get_or_init(|| Mutex::new(vec![BigInt::one()]))
}

pub fn factorial(n: u64) -> BigInt {
    let mut table = factorial_table().lock().expect("factorial table poisoned");
    while (table.len() as u64) <= n {
        let m = table.len() as u64;
        let next = &table[table.len() - 1] * m;
        table.push(next);
    }
    table[n as usize].clone()
}

/// `C(n, k)`; zero when `k > n`.
pub fn binomial(n: u64, k: u64) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigInt::one();
    for i in 0..k {
        acc *= n - i;
        acc /= i + 1;
    }
    acc
}

/// Exponent of `p` in a nonzero integer.
pub fn integer_valuation(m: &BigInt, p: u64) -> u64 {
    debug_assert!(!m.is_zero());
    let p = BigInt::from(p);
    let mut m = m.abs();
    let mut v = 0;
    loop {
        let (q, r) = m.div_rem(&p);
        if !r.is_zero() {
            return v;
        }
        m = q;
        v += 1;
    }
}

/// `ν_p(q)`: the exponent of `p` in `q = p^ν · a/b` with `p ∤ a, b`.
pub fn p_adic_valuation(q: &Rational, p: u64) -> Result<i64> {
    if q.is_zero() {
        return Err(Error::ZeroValuation);
    }
    if !is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    // lowest terms: p divides at most one of numerator and denominator
    let up = integer_valuation(q.numer(), p) as i64;
    let down = integer_valuation(q.denom(), p) as i64;
    Ok(up - down)
}

/// Number of borrows when subtracting `k` from `n` in base `p`.
///
/// By Kummer's theorem this equals `ν_p(C(n, k))`.
pub fn kummer_borrows(n: u64, k: u64, p: u64) -> Result<u64> {
    if k > n {
        return Err(Error::InvalidArgument(format!("k = {k} exceeds n = {n}")));
    }
    if !is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    let (mut a, mut b) = (n, k);
    let mut borrow = 0;
    let mut borrows = 0;
    while a > 0 || b > 0 {
        let da = (a % p) as i64;
        let db = (b % p) as i64 + borrow;
        if da < db {
            borrow = 1;
            borrows += 1;
        } else {
            borrow = 0;
        }
        a /= p;
        b /= p;
    }
    Ok(borrows)
}
