//! Counting, summing and multiplying the `x` with `lcm(x, b) = a`
//! (`Q_a[b]`, `SQ_a[b]`, `MQ_a[b]`), their closed forms, the series and
//! product identities, restricted divisor sums and the Fermat-quotient
//! congruence. Brute force is ground truth; closed forms are checked against it.

use num_traits::{One, Pow, Zero};
use serde::Serialize;

use crate::arith::{divisors_u64, factor_u64, gcd_u64, is_prime_u64, lcm_u64, tau_u64, Integer};
use crate::error::{domain, Result};
use crate::par;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct QTriple {
    pub a: u64,
    pub b: u64,
    pub q: u64,
    #[serde(serialize_with = "as_str")]
    pub sq: Integer,
    #[serde(serialize_with = "as_str")]
    pub mq: Integer,
}

fn as_str<S: serde::Serializer>(x: &Integer, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&x.to_string())
}

/// Enumerates `x | a` with `lcm(x, b) = a`.
pub fn q_members(a: u64, b: u64) -> Vec<u64> {
    divisors_u64(a).into_iter().filter(|&x| lcm_u64(x, b) == a).collect()
}

pub fn q_brute(a: u64, b: u64) -> QTriple {
    assert!(a >= 1 && b >= 1);
    let xs = q_members(a, b);
    let sq = xs.iter().map(|&x| Integer::from(x)).sum();
    let mq = xs.iter().fold(Integer::one(), |acc, &x| acc * Integer::from(x));
    QTriple { a, b, q: xs.len() as u64, sq, mq }
}

/// `Q_a[b]` alone, by enumeration.
pub fn q_count(a: u64, b: u64) -> u64 {
    divisors_u64(a).into_iter().filter(|&x| lcm_u64(x, b) == a).count() as u64
}

fn exponent(mut n: u64, p: u64) -> u32 {
    let mut e = 0;
    while n % p == 0 {
        n /= p;
        e += 1;
    }
    e
}

/// Product of the `p^{v_p(a)}` over primes where `b` has the full exponent
/// of `a`; every other prime power of `a` is forced into `x`.
pub fn free_part(a: u64, b: u64) -> u64 {
    factor_u64(a)
        .into_iter()
        .filter(|&(p, e)| exponent(b, p) == e)
        .map(|(p, e)| p.pow(e))
        .product()
}

/// The split `a = d k` taken over the primes dividing `b`.
pub fn free_part_printed(a: u64, b: u64) -> u64 {
    factor_u64(a).into_iter().filter(|&(p, _)| b % p == 0).map(|(p, e)| p.pow(e)).product()
}

fn closed_from_k(a: u64, b: u64, k: u64) -> QTriple {
    let d = a / k;
    let t = tau_u64(k);
    let sigma: u64 = divisors_u64(k).iter().sum();
    let dk = Integer::from(d).pow(t as u32);
    // prod of divisors of k is k^{tau/2}; tau odd means k is a square.
    let kpart = if t % 2 == 0 {
        Integer::from(k).pow((t / 2) as u32)
    } else {
        let r = (k as f64).sqrt().round() as u64;
        let r = (r.saturating_sub(2)..=r + 2).find(|x| x * x == k).expect("odd tau implies square");
        Integer::from(r).pow(t as u32)
    };
    QTriple { a, b, q: t, sq: Integer::from(d) * Integer::from(sigma), mq: dk * kpart }
}

/// Closed form: `Q = tau(k)`, `SQ = d sigma(k)`, `MQ = d^tau(k) k^(tau(k)/2)`.
pub fn q_closed(a: u64, b: u64) -> Result<QTriple> {
    if b == 0 || a % b != 0 {
        return domain(format!("q_closed needs b | a, got a={a}, b={b}"));
    }
    Ok(closed_from_k(a, b, free_part(a, b)))
}

/// The same closed form with `k` built from every prime of `b`.
pub fn q_closed_printed(a: u64, b: u64) -> Result<QTriple> {
    if b == 0 || a % b != 0 {
        return domain(format!("q_closed needs b | a, got a={a}, b={b}"));
    }
    Ok(closed_from_k(a, b, free_part_printed(a, b)))
}

/// `sum_{x | n} Q_n[x]`, which equals `tau(n^2)`.
pub fn sum_q_over_divisors(n: u64) -> u64 {
    divisors_u64(n).into_iter().map(|x| q_count(n, x)).sum()
}

pub fn tau_sq(n: u64) -> u64 {
    factor_u64(n).iter().map(|&(_, e)| 2 * e as u64 + 1).product()
}

// ---------------------------------------------------------------------------
// checks and findings

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Check {
    pub name: String,
    pub input: String,
    pub lhs: String,
    pub rhs: String,
    pub ok: bool,
}

fn check(name: &str, input: String, lhs: impl ToString, rhs: impl ToString) -> Check {
    let (lhs, rhs) = (lhs.to_string(), rhs.to_string());
    Check { name: name.into(), input, ok: lhs == rhs, lhs, rhs }
}

fn factorial(n: u64) -> Integer {
    (1..=n).fold(Integer::one(), |a, i| a * Integer::from(i))
}

fn binom(n: u64, k: u64) -> u64 {
    (0..k).fold(1u64, |acc, i| acc * (n - i) / (i + 1))
}

fn two_pow(e: u64) -> Integer {
    Integer::from(2u32).pow(e as u32)
}

/// The series and product identities for one `(p, s, k, t)`.
pub fn series_suite(p: u64, s: u64, k: u64, t: u64) -> Vec<Check> {
    assert!(is_prime_u64(p));
    let inp = format!("p={p} s={s} k={k} t={t}");
    let mut out = Vec::new();

    let qs: Vec<u64> = (1..=s).map(|j| q_count(p * j, p)).collect();
    out.push(check("sum_j Q_pj[p] = 2s - floor(s/p)", inp.clone(), qs.iter().sum::<u64>(), 2 * s - s / p));
    let prod = qs.iter().fold(Integer::one(), |a, &q| a * Integer::from(q));
    out.push(check("prod_j Q_pj[p] = 2^(s - floor(s/p))", inp.clone(), &prod, two_pow(s - s / p)));

    let pk = p.pow(k as u32);
    let qd: Vec<u64> = divisors_u64(pk).into_iter().map(|x| q_count(pk, x)).collect();
    out.push(check("sum_{x | p^k} Q[x] = 2k + 1", inp.clone(), qd.iter().sum::<u64>(), 2 * k + 1));
    out.push(check("prod_{x | p^k} Q[x] = k + 1", inp.clone(), qd.iter().product::<u64>(), k + 1));

    if gcd_u64(t, p) == 1 {
        let qr: Vec<u64> = (0..=k).map(|r| q_count(t * p.pow(r as u32), p.pow(r as u32))).collect();
        out.push(check("sum_r Q_(t p^r)[p^r] = C(k+2, 2)", inp.clone(), qr.iter().sum::<u64>(), binom(k + 2, 2)));
        let prod = qr.iter().fold(Integer::one(), |a, &q| a * Integer::from(q));
        out.push(check("prod_r Q_(t p^r)[p^r] = (k+1)!", inp.clone(), &prod, factorial(k + 1)));
    }

    let ratios: Vec<num_rational::BigRational> = divisors_u64(pk)
        .into_iter()
        .map(|b| num_rational::BigRational::new(Integer::from(tau_u64(b)), Integer::from(q_count(pk, b))))
        .collect();
    let sum = ratios.iter().fold(num_rational::BigRational::zero(), |a, r| a + r);
    let prod = ratios.iter().fold(num_rational::BigRational::one(), |a, r| a * r);
    out.push(check("sum_{b | p^k} tau(b)/Q[b] = C(k+1, 2) + 1", inp.clone(), &sum, binom(k + 1, 2) + 1));
    out.push(check("prod_{b | p^k} tau(b)/Q[b] = k!", inp.clone(), &prod, factorial(k)));

    let qe: Vec<u64> = (1..=p).map(|j| q_count(p * j, p)).collect();
    out.push(check("sum_{j <= p} Q_pj[p] = p + phi(p)", inp.clone(), qe.iter().sum::<u64>(), 2 * p - 1));
    let prod = qe.iter().fold(Integer::one(), |a, &q| a * Integer::from(q));
    out.push(check("prod_{j <= p} Q_pj[p] = 2^(p-1)", inp, &prod, two_pow(p - 1)));
    out
}

/// `sum_{x t | n} Q_n[x t]` by enumeration.
pub fn restricted_sum_brute(n: u64, x: u64) -> Result<u64> {
    if x == 0 || n % x != 0 {
        return domain(format!("restricted sum needs x | n, got n={n}, x={x}"));
    }
    Ok(divisors_u64(n).into_iter().filter(|y| y % x == 0).map(|y| q_count(n, y)).sum())
}

/// `tau(x) tau(n^2 / prod p^(alpha+a))` over the primes `p^a || x`.
pub fn restricted_sum_closed(n: u64, x: u64) -> Result<u64> {
    if x == 0 || n % x != 0 {
        return domain(format!("restricted sum needs x | n, got n={n}, x={x}"));
    }
    let mut rest = 1u64;
    for (p, alpha) in factor_u64(n) {
        let a = exponent(x, p);
        rest *= if a == 0 { 2 * alpha as u64 + 1 } else { (alpha - a) as u64 + 1 };
    }
    Ok(tau_u64(x) * rest)
}

/// `tau(n^2) - d tau(n^2 / p^(2 alpha))`.
pub fn restricted_sum_prime_closed(n: u64, p: u64, d: u32) -> Result<u64> {
    let alpha = exponent(n, p);
    if !is_prime_u64(p) || d < 1 || d > alpha {
        return domain(format!("need p^{d} | n with p prime, got n={n}, p={p}"));
    }
    Ok(tau_sq(n) - d as u64 * tau_sq(n / p.pow(alpha)))
}

pub fn restricted_sum_prime_brute(n: u64, p: u64, d: u32) -> Result<u64> {
    let alpha = exponent(n, p);
    if !is_prime_u64(p) || d < 1 || d > alpha {
        return domain(format!("need p^{d} | n with p prime, got n={n}, p={p}"));
    }
    restricted_sum_brute(n, p.pow(d))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FermatCheck {
    pub p: u64,
    pub d: u64,
    pub k: u64,
    #[serde(serialize_with = "as_str")]
    pub quotient: Integer,
    #[serde(serialize_with = "as_str")]
    pub sq: Integer,
    pub holds: bool,
}

/// Tests `dp | q_p(dp+1) + SQ_(dp)[p]` with `SQ` by enumeration.
pub fn fermat_congruence(p: u64, d: u64) -> Result<FermatCheck> {
    if p < 3 || !is_prime_u64(p) || d < 1 {
        return domain(format!("need an odd prime p and d >= 1, got p={p}, d={d}"));
    }
    let k = d * p + 1;
    let quotient = (Integer::from(k).pow((p - 1) as u32) - 1u32) / Integer::from(p);
    let sq = q_brute(d * p, p).sq;
    let holds = ((&quotient + &sq) % Integer::from(d * p)).is_zero();
    Ok(FermatCheck { p, d, k, quotient, sq, holds })
}

// ---------------------------------------------------------------------------
// the suite

#[derive(Debug, Clone, Copy, Serialize)]
pub struct SuiteConfig {
    pub q_max: u64,
    pub tau_max: u64,
    pub prime_max: u64,
    pub s_max: u64,
    pub k_max: u64,
    pub t_max: u64,
    pub restricted_max: u64,
    pub fermat_prime_max: u64,
    pub fermat_d_max: u64,
    pub p2_max: u64,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        SuiteConfig {
            q_max: 2000,
            tau_max: 5000,
            prime_max: 50,
            s_max: 500,
            k_max: 8,
            t_max: 50,
            restricted_max: 2000,
            fermat_prime_max: 100,
            fermat_d_max: 30,
            p2_max: 2000,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Section {
    pub name: String,
    /// Gated sections must have no failures.
    pub gated: bool,
    pub checked: u64,
    pub failures: u64,
    /// First mismatches, capped.
    pub examples: Vec<Check>,
}

#[derive(Debug, Clone, Serialize)]
pub struct SuiteReport {
    pub config: SuiteConfig,
    pub sections: Vec<Section>,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.sections.iter().all(|s| !s.gated || s.failures == 0)
    }
    pub fn section(&self, name: &str) -> Option<&Section> {
        self.sections.iter().find(|s| s.name == name)
    }
}

const EXAMPLES: usize = 8;

fn section(name: &str, gated: bool, checks: Vec<Check>) -> Section {
    let failures: Vec<Check> = checks.iter().filter(|c| !c.ok).cloned().collect();
    Section {
        name: name.into(),
        gated,
        checked: checks.len() as u64,
        failures: failures.len() as u64,
        examples: failures.into_iter().take(EXAMPLES).collect(),
    }
}

fn pairs_b_divides_a(max: u64) -> Vec<(u64, u64)> {
    (1..=max).flat_map(|a| divisors_u64(a).into_iter().map(move |b| (a, b))).collect()
}

fn triple_str(t: &QTriple) -> String {
    format!("Q={} SQ={} MQ={}", t.q, t.sq, t.mq)
}

pub fn run_suite(cfg: &SuiteConfig) -> SuiteReport {
    let mut sections = Vec::new();
    let pairs = pairs_b_divides_a(cfg.q_max);

    let closed = par::map(pairs.clone(), |(a, b)| {
        let (x, y) = (q_brute(a, b), q_closed(a, b).expect("b | a"));
        check("q_closed = q_brute", format!("a={a} b={b}"), triple_str(&x), triple_str(&y))
    });
    sections.push(section("q_closed", true, closed));

    let printed = par::map(pairs.clone(), |(a, b)| {
        let (x, y) = (q_brute(a, b), q_closed_printed(a, b).expect("b | a"));
        check("k over primes of b", format!("a={a} b={b}"), triple_str(&x), triple_str(&y))
    });
    sections.push(section("q_closed_printed_split", false, printed));

    let mq_full = par::map(pairs, |(a, b)| {
        let x = q_brute(a, b);
        let rhs = closed_from_k(a, a, a).mq;
        check("MQ_a[b] = a^(tau(a)/2)", format!("a={a} b={b}"), &x.mq, &rhs)
    });
    sections.push(section("mq_printed_general_b", false, mq_full));

    let tau = par::map_range(1, cfg.tau_max, |n| {
        check("sum_{x | n} Q_n[x] = tau(n^2)", format!("n={n}"), sum_q_over_divisors(n), tau_sq(n))
    });
    sections.push(section("tau_n_squared", true, tau));

    let mult = par::map_range(1, 60, |m| {
        (1..=60)
            .filter(|&n| gcd_u64(m, n) == 1)
            .flat_map(|n| {
                let inp = format!("m={m} n={n}");
                [
                    check("Q_mn[m] = tau(m)", inp.clone(), q_count(m * n, m), tau_u64(m)),
                    check("Q_mn[mn] = Q_mn[m] Q_mn[n]", inp, q_count(m * n, m * n), q_count(m * n, m) * q_count(m * n, n)),
                ]
            })
            .collect::<Vec<_>>()
    });
    sections.push(section("multiplicativity", true, mult.into_iter().flatten().collect()));

    let same = (2..=60u64)
        .map(|m| check("Q_mm[mm] = Q_mm[m]^2", format!("m={m}"), q_count(m * m, m * m), q_count(m * m, m).pow(2)))
        .collect();
    sections.push(section("multiplicativity_equal_factors", false, same));

    let pk = (1..cfg.prime_max)
        .filter(|&p| is_prime_u64(p))
        .flat_map(|p| (1..=cfg.t_max).map(move |t| (p, t)))
        .collect::<Vec<_>>();
    let (s_max, k_max) = (cfg.s_max, cfg.k_max);
    let series = par::map(pk, |(p, t)| {
        let mut out = Vec::new();
        for k in 1..=k_max {
            let s = if t == 1 && k == 1 { s_max } else { 1 + (t * 37 + k * 11) % s_max };
            out.extend(series_suite(p, s, k, t));
        }
        out
    });
    sections.push(section("series", true, series.into_iter().flatten().collect()));

    let rmax = cfg.restricted_max;
    let first = par::map_range(1, rmax, |n| {
        divisors_u64(n)
            .into_iter()
            .map(|x| {
                check(
                    "sum_{xt | n} Q_n[xt] = tau(x) tau(n^2 / prod p^(alpha+a))",
                    format!("n={n} x={x}"),
                    restricted_sum_brute(n, x).unwrap(),
                    restricted_sum_closed(n, x).unwrap(),
                )
            })
            .collect::<Vec<_>>()
    });
    sections.push(section("restricted_sum_first_form", false, first.into_iter().flatten().collect()));

    let second = par::map_range(1, rmax, |n| {
        factor_u64(n)
            .into_iter()
            .flat_map(|(p, alpha)| {
                (1..=alpha).map(move |d| {
                    check(
                        "sum_{p^d t | n} Q_n[p^d t] = tau(n^2) - d tau(n^2 / p^(2 alpha))",
                        format!("n={n} p={p} d={d}"),
                        restricted_sum_prime_brute(n, p, d).unwrap(),
                        restricted_sum_prime_closed(n, p, d).unwrap(),
                    )
                })
            })
            .collect::<Vec<_>>()
    });
    sections.push(section("restricted_sum_second_form", true, second.into_iter().flatten().collect()));

    let fermat: Vec<Check> = (3..cfg.fermat_prime_max)
        .filter(|&p| is_prime_u64(p))
        .flat_map(|p| (1..=cfg.fermat_d_max).map(move |d| (p, d)))
        .map(|(p, d)| {
            let f = fermat_congruence(p, d).unwrap();
            let r = (&f.quotient + &f.sq) % Integer::from(d * p);
            check("dp | q_p(dp+1) + SQ_dp[p]", format!("p={p} d={d} SQ={}", f.sq), r, 0)
        })
        .collect();
    sections.push(section("fermat_congruence", false, fermat));

    let p2 = par::map_range(1, cfg.p2_max, |n| {
        let n_big = Integer::from(n);
        let count = crate::egyptian::count_two(&n_big).unwrap();
        let listed = crate::egyptian::solve_two(&crate::arith::ratio(1, n as i64)).unwrap().len();
        check("count_two(n) = |solve_two(1/n)| = ceil(tau(n^2)/2)", format!("n={n}"), format!("{count} {listed}"), format!("{0} {0}", tau_sq(n).div_ceil(2)))
    });
    sections.push(section("p2_count", true, p2));

    SuiteReport { config: *cfg, sections }
}
