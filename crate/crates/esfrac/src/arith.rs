//! Exact integer and rational arithmetic, primality, factorization and the
//! classical divisor functions.
//!
//! `Integer` and `Rational` are the `num` big types; rationals are reduced on
//! construction so equality is structural.

use num_bigint::{BigInt, RandBigInt, Sign};
use num_integer::Integer as _;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{domain, Result};

pub type Integer = BigInt;
pub type Rational = BigRational;

/// Seed for the randomized parts of primality and factorization.
pub const ARITH_SEED: u64 = 0x5eed_0f_fac7;

/// Trial division bound used before switching to Pollard rho.
pub const TRIAL_LIMIT: u64 = 1_000_000;

pub fn int(v: i64) -> Integer {
    BigInt::from(v)
}

pub fn ratio(n: i64, d: i64) -> Rational {
    BigRational::new(int(n), int(d))
}

pub fn gcd(a: &Integer, b: &Integer) -> Result<Integer> {
    if a.is_zero() && b.is_zero() {
        return domain("gcd(0, 0) is undefined");
    }
    Ok(a.gcd(b))
}

pub fn lcm(a: &Integer, b: &Integer) -> Integer {
    if a.is_zero() || b.is_zero() {
        return Integer::zero();
    }
    a.lcm(b)
}

pub fn lcm_many(xs: &[Integer]) -> Result<Integer> {
    if xs.is_empty() {
        return domain("lcm of an empty list");
    }
    let mut acc = Integer::one();
    for x in xs {
        if !x.is_positive() {
            return domain(format!("lcm input {x} is not positive"));
        }
        acc = acc.lcm(x);
    }
    Ok(acc)
}

pub fn gcd_u64(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

pub fn lcm_u64(a: u64, b: u64) -> u64 {
    if a == 0 || b == 0 {
        0
    } else {
        a / gcd_u64(a, b) * b
    }
}

// ---------------------------------------------------------------------------
// primality

/// Outcome of a primality test. `Probable` results come from the randomized
/// test used above 2^64 (error probability below 2^-128).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Primality {
    Prime,
    Probable,
    Composite,
}

impl Primality {
    pub fn is_prime(self) -> bool {
        !matches!(self, Primality::Composite)
    }
    pub fn is_deterministic(self) -> bool {
        !matches!(self, Primality::Probable)
    }
}

const SMALL_PRIMES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];

fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn pow_mod(mut b: u64, mut e: u64, m: u64) -> u64 {
    let mut r = 1 % m;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            r = mul_mod(r, b, m);
        }
        b = mul_mod(b, b, m);
        e >>= 1;
    }
    r
}

/// Deterministic Miller-Rabin for all `u64` (witnesses: the first 12 primes).
pub fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for &p in &SMALL_PRIMES {
        if n % p == 0 {
            return n == p;
        }
    }
    let mut d = n - 1;
    let mut s = 0;
    while d % 2 == 0 {
        d /= 2;
        s += 1;
    }
    'witness: for &a in &SMALL_PRIMES {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

fn mr_round(n: &Integer, d: &Integer, s: u32, a: &Integer) -> bool {
    let one = Integer::one();
    let nm1 = n - &one;
    let mut x = a.modpow(d, n);
    if x == one || x == nm1 {
        return true;
    }
    for _ in 1..s {
        x = (&x * &x) % n;
        if x == nm1 {
            return true;
        }
    }
    false
}

pub fn primality(n: &Integer) -> Primality {
    if n.sign() != Sign::Plus {
        return Primality::Composite;
    }
    if let Some(v) = n.to_u64() {
        return if is_prime_u64(v) { Primality::Prime } else { Primality::Composite };
    }
    for &p in &SMALL_PRIMES {
        if (n % p).is_zero() {
            return Primality::Composite;
        }
    }
    let one = Integer::one();
    let nm1 = n - &one;
    let s = nm1.trailing_zeros().unwrap_or(0) as u32;
    let d = &nm1 >> s;
    for &a in &SMALL_PRIMES {
        if !mr_round(n, &d, s, &int(a as i64)) {
            return Primality::Composite;
        }
    }
    // 64 further random rounds: error below 4^-64 = 2^-128.
    let mut rng = ChaCha8Rng::seed_from_u64(ARITH_SEED);
    let two = int(2);
    for _ in 0..64 {
        let a = rng.gen_bigint_range(&two, &nm1);
        if !mr_round(n, &d, s, &a) {
            return Primality::Composite;
        }
    }
    Primality::Probable
}

pub fn is_prime(n: &Integer) -> bool {
    primality(n).is_prime()
}

// ---------------------------------------------------------------------------
// factorization

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Factorization {
    pub factors: Vec<(Integer, u32)>,
}

impl Factorization {
    pub fn reconstruct(&self) -> Integer {
        self.factors
            .iter()
            .fold(Integer::one(), |acc, (p, e)| acc * num_traits::pow(p.clone(), *e as usize))
    }

    pub fn tau(&self) -> Integer {
        self.factors.iter().fold(Integer::one(), |acc, (_, e)| acc * (*e + 1))
    }

    pub fn sigma(&self) -> Integer {
        self.factors.iter().fold(Integer::one(), |acc, (p, e)| {
            let pe1 = num_traits::pow(p.clone(), *e as usize + 1);
            acc * ((pe1 - 1u32) / (p - 1u32))
        })
    }

    pub fn phi(&self) -> Integer {
        self.factors.iter().fold(Integer::one(), |acc, (p, e)| {
            acc * num_traits::pow(p.clone(), *e as usize - 1) * (p - 1u32)
        })
    }

    pub fn radical(&self) -> Integer {
        self.factors.iter().fold(Integer::one(), |acc, (p, _)| acc * p)
    }

    pub fn exponent_of(&self, p: &Integer) -> u32 {
        self.factors.iter().find(|(q, _)| q == p).map_or(0, |(_, e)| *e)
    }

    /// All divisors in ascending order.
    pub fn divisors(&self) -> Vec<Integer> {
        let mut ds = vec![Integer::one()];
        for (p, e) in &self.factors {
            let len = ds.len();
            let mut pk = Integer::one();
            for _ in 0..*e {
                pk *= p;
                for i in 0..len {
                    let v = &ds[i] * &pk;
                    ds.push(v);
                }
            }
        }
        ds.sort();
        ds
    }
}

fn pollard_brent_u64(n: u64, rng: &mut ChaCha8Rng) -> u64 {
    if n % 2 == 0 {
        return 2;
    }
    loop {
        let c = rng.gen_range(1..n);
        let mut y = rng.gen_range(0..n);
        let m = 128u64;
        let (mut g, mut r, mut q) = (1u64, 1u64, 1u64);
        let mut x = 0;
        let mut ys = 0;
        let f = |v: u64| ((mul_mod(v, v, n) as u128 + c as u128) % n as u128) as u64;
        while g == 1 {
            x = y;
            for _ in 0..r {
                y = f(y);
            }
            let mut k = 0;
            while k < r && g == 1 {
                ys = y;
                for _ in 0..m.min(r - k) {
                    y = f(y);
                    q = mul_mod(q, x.abs_diff(y), n);
                }
                g = gcd_u64(q, n);
                k += m;
            }
            r *= 2;
        }
        if g == n {
            loop {
                ys = f(ys);
                g = gcd_u64(x.abs_diff(ys), n);
                if g > 1 {
                    break;
                }
            }
        }
        if g != n {
            return g;
        }
    }
}

fn split_u64(n: u64, rng: &mut ChaCha8Rng, out: &mut Vec<u64>) {
    if n == 1 {
        return;
    }
    if is_prime_u64(n) {
        out.push(n);
        return;
    }
    let d = pollard_brent_u64(n, rng);
    split_u64(d, rng, out);
    split_u64(n / d, rng, out);
}

/// Prime factorization of a machine integer, ascending primes.
pub fn factor_u64(mut n: u64) -> Vec<(u64, u32)> {
    let mut out: Vec<(u64, u32)> = Vec::new();
    if n <= 1 {
        return out;
    }
    let push = |p: u64, out: &mut Vec<(u64, u32)>| match out.last_mut() {
        Some((q, e)) if *q == p => *e += 1,
        _ => out.push((p, 1)),
    };
    while n % 2 == 0 {
        n /= 2;
        push(2, &mut out);
    }
    let mut p = 3u64;
    while p <= TRIAL_LIMIT && p * p <= n {
        while n % p == 0 {
            n /= p;
            push(p, &mut out);
        }
        p += 2;
    }
    if n > 1 {
        if p * p > n {
            push(n, &mut out);
        } else {
            let mut rng = ChaCha8Rng::seed_from_u64(ARITH_SEED);
            let mut rest = Vec::new();
            split_u64(n, &mut rng, &mut rest);
            rest.sort_unstable();
            for q in rest {
                push(q, &mut out);
            }
        }
    }
    out
}

fn pollard_brent_big(n: &Integer, rng: &mut ChaCha8Rng) -> Integer {
    let one = Integer::one();
    loop {
        let c = rng.gen_bigint_range(&one, n);
        let mut y = rng.gen_bigint_range(&Integer::zero(), n);
        let f = |v: &Integer| (v * v + &c) % n;
        let m = 128u64;
        let (mut g, mut r, mut q) = (one.clone(), 1u64, one.clone());
        let mut x = Integer::zero();
        let mut ys = Integer::zero();
        while g == one {
            x = y.clone();
            for _ in 0..r {
                y = f(&y);
            }
            let mut k = 0;
            while k < r && g == one {
                ys = y.clone();
                for _ in 0..m.min(r - k) {
                    y = f(&y);
                    q = (q * (&x - &y).abs()) % n;
                }
                g = q.gcd(n);
                k += m;
            }
            r *= 2;
        }
        if &g == n {
            loop {
                ys = f(&ys);
                g = (&x - &ys).abs().gcd(n);
                if g > one {
                    break;
                }
            }
        }
        if &g != n {
            return g;
        }
    }
}

fn split_big(n: Integer, rng: &mut ChaCha8Rng, out: &mut Vec<Integer>) {
    if n.is_one() {
        return;
    }
    if let Some(v) = n.to_u64() {
        for (p, e) in factor_u64(v) {
            for _ in 0..e {
                out.push(Integer::from(p));
            }
        }
        return;
    }
    if is_prime(&n) {
        out.push(n);
        return;
    }
    if let Some(r) = perfect_power_root(&n) {
        let k = {
            let mut k = 0u32;
            let mut m = n.clone();
            while (&m % &r).is_zero() {
                m /= &r;
                k += 1;
            }
            k
        };
        for _ in 0..k {
            split_big(r.clone(), rng, out);
        }
        return;
    }
    let d = pollard_brent_big(&n, rng);
    let rest = &n / &d;
    split_big(d, rng, out);
    split_big(rest, rng, out);
}

/// Returns `r` with `r^k = n` for some `k >= 2`, if `n` is a perfect power.
fn perfect_power_root(n: &Integer) -> Option<Integer> {
    let bits = n.bits() as u32;
    for k in 2..=bits {
        let r = n.nth_root(k);
        if num_traits::pow(r.clone(), k as usize) == *n {
            return Some(r);
        }
        if r < int(2) {
            break;
        }
    }
    None
}

pub fn factorize(n: &Integer) -> Result<Factorization> {
    if n < &Integer::one() {
        return domain(format!("factorize({n}): input must be >= 1"));
    }
    if let Some(v) = n.to_u64() {
        let factors = factor_u64(v).into_iter().map(|(p, e)| (Integer::from(p), e)).collect();
        return Ok(Factorization { factors });
    }
    let mut m = n.clone();
    let mut factors: Vec<(Integer, u32)> = Vec::new();
    let mut p = 2u64;
    while p <= TRIAL_LIMIT {
        let bp = Integer::from(p);
        let mut e = 0;
        while (&m % &bp).is_zero() {
            m /= &bp;
            e += 1;
        }
        if e > 0 {
            factors.push((bp, e));
        }
        if m.is_one() {
            break;
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if !m.is_one() {
        let mut rng = ChaCha8Rng::seed_from_u64(ARITH_SEED);
        let mut rest = Vec::new();
        split_big(m, &mut rng, &mut rest);
        rest.sort();
        for q in rest {
            match factors.last_mut() {
                Some((r, e)) if *r == q => *e += 1,
                _ => factors.push((q, 1)),
            }
        }
    }
    Ok(Factorization { factors })
}

pub fn divisors(n: &Integer) -> Result<Vec<Integer>> {
    Ok(factorize(n)?.divisors())
}

pub fn tau(n: &Integer) -> Result<Integer> {
    Ok(factorize(n)?.tau())
}

pub fn sigma(n: &Integer) -> Result<Integer> {
    Ok(factorize(n)?.sigma())
}

pub fn phi(n: &Integer) -> Result<Integer> {
    Ok(factorize(n)?.phi())
}

/// Divisors of a machine integer, ascending.
pub fn divisors_u64(n: u64) -> Vec<u64> {
    divisors_from(&factor_u64(n))
}

pub fn divisors_from(f: &[(u64, u32)]) -> Vec<u64> {
    let mut ds = vec![1u64];
    for &(p, e) in f {
        let len = ds.len();
        let mut pk = 1u64;
        for _ in 0..e {
            pk *= p;
            for i in 0..len {
                ds.push(ds[i] * pk);
            }
        }
    }
    ds.sort_unstable();
    ds
}

pub fn tau_u64(n: u64) -> u64 {
    factor_u64(n).iter().map(|&(_, e)| e as u64 + 1).product()
}

/// Rational helpers.
pub fn is_integral(r: &Rational) -> bool {
    r.denom().is_one()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_examples() {
        assert_eq!(gcd(&int(12), &int(18)).unwrap(), int(6));
        assert!(gcd(&int(0), &int(0)).is_err());
        assert_eq!(lcm_many(&[int(1), int(2), int(21)]).unwrap(), int(42));
        assert_eq!(lcm_many(&[int(5), int(17)]).unwrap(), int(85));
        assert!(lcm_many(&[]).is_err());
        assert!(lcm_many(&[int(3), int(0)]).is_err());
        assert!(is_prime(&int(5569)));
        assert!(!is_prime(&int(1)));
        assert!(!is_prime(&int(4095)));
        let f = factorize(&int(451)).unwrap();
        assert_eq!(f.factors, vec![(int(11), 1), (int(41), 1)]);
        assert!(factorize(&int(1)).unwrap().factors.is_empty());
        assert_eq!(factorize(&int(144)).unwrap().factors, vec![(int(2), 4), (int(3), 2)]);
        assert_eq!(divisors(&int(12)).unwrap(), [1, 2, 3, 4, 6, 12].map(int).to_vec());
        assert_eq!(tau(&int(144)).unwrap(), int(15));
        assert_eq!(sigma(&int(3)).unwrap(), int(4));
        assert_eq!(phi(&int(97)).unwrap(), int(96));
        assert!(factorize(&int(0)).is_err());
    }

    #[test]
    fn large_inputs() {
        // 2^61 - 1 is prime; (2^61 - 1)(2^31 - 1) needs rho after trial division.
        let m61: Integer = (Integer::one() << 61) - 1;
        assert_eq!(primality(&m61), Primality::Prime);
        let m31 = int((1i64 << 31) - 1);
        let n = &m61 * &m31 * &m61;
        let f = factorize(&n).unwrap();
        assert_eq!(f.factors, vec![(m31.clone(), 1), (m61.clone(), 2)]);
        assert_eq!(f.reconstruct(), n);
        let m89: Integer = (Integer::one() << 89) - 1;
        assert_eq!(primality(&m89), Primality::Probable);
        let semi = int(1_000_003) * int(998_244_353);
        assert_eq!(factorize(&semi).unwrap().factors, vec![(int(1_000_003), 1), (int(998_244_353), 1)]);
    }
}
