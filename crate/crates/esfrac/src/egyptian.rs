//! Decomposition records, exact verification and brute-force oracles.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;

use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::arith::{self, Integer, Rational};
use crate::error::{domain, Error, Result};
use crate::expr::Val;
use crate::par;

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct UnitTerm {
    pub sign: i8,
    pub den: Integer,
}

impl UnitTerm {
    pub fn new(sign: i8, den: Integer) -> Result<Self> {
        if sign != 1 && sign != -1 {
            return domain(format!("term sign {sign} is not +1 or -1"));
        }
        if !den.is_positive() {
            return domain(format!("term denominator {den} is not positive"));
        }
        Ok(UnitTerm { sign, den })
    }

    pub fn pos(den: impl Into<Integer>) -> Self {
        UnitTerm { sign: 1, den: den.into() }
    }

    pub fn value(&self) -> Rational {
        Rational::new(Integer::from(self.sign), self.den.clone())
    }
}

impl fmt::Display for UnitTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = if self.sign < 0 { "-" } else { "" };
        write!(f, "{s}1/{}", self.den)
    }
}

/// Where a decomposition came from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Provenance {
    Family { id: String, params: BTreeMap<String, Val> },
    Oracle,
}

impl Provenance {
    pub fn label(&self) -> &str {
        match self {
            Provenance::Family { id, .. } => id,
            Provenance::Oracle => "oracle",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UnitFractionSum {
    pub target: Rational,
    pub terms: Vec<UnitTerm>,
    pub provenance: Provenance,
}

impl UnitFractionSum {
    pub fn new(target: Rational, terms: Vec<UnitTerm>, provenance: Provenance) -> Self {
        UnitFractionSum { target, terms, provenance }
    }

    pub fn total(&self) -> Rational {
        self.terms.iter().fold(Rational::zero(), |acc, t| acc + t.value())
    }

    pub fn dens(&self) -> Vec<Integer> {
        self.terms.iter().map(|t| t.den.clone()).collect()
    }
}

impl fmt::Display for UnitFractionSum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} =", self.target)?;
        for (i, t) in self.terms.iter().enumerate() {
            match (i, t.sign) {
                (0, s) if s < 0 => write!(f, " -1/{}", t.den)?,
                (0, _) => write!(f, " 1/{}", t.den)?,
                (_, s) if s < 0 => write!(f, " - 1/{}", t.den)?,
                _ => write!(f, " + 1/{}", t.den)?,
            }
        }
        Ok(())
    }
}

/// True iff the signed terms sum exactly to the target.
pub fn verify_sum(s: &UnitFractionSum) -> bool {
    s.terms.iter().all(|t| t.den.is_positive() && (t.sign == 1 || t.sign == -1)) && s.total() == s.target
}

/// Sorts terms by sign (positive first) then denominator; keeps duplicates.
pub fn canonicalize(s: &UnitFractionSum) -> UnitFractionSum {
    let mut out = s.clone();
    out.terms.sort_by(|a, b| b.sign.cmp(&a.sign).then_with(|| a.den.cmp(&b.den)));
    out
}

// ---------------------------------------------------------------------------
// records

/// A verified decomposition with its metadata. Only [`DecompRecord::seal`]
/// sets `verified`, and only after [`verify_sum`] succeeds.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DecompRecord {
    pub k: Integer,
    pub n: Integer,
    pub sum: UnitFractionSum,
    verified: bool,
}

impl DecompRecord {
    /// Verifies `sum` and builds the record; `k/n` is the unreduced target.
    pub fn seal(k: Integer, n: Integer, sum: UnitFractionSum) -> Result<Self> {
        if Rational::new(k.clone(), n.clone()) != sum.target {
            return Err(Error::IdentityViolation(format!("record target {k}/{n} differs from {}", sum.target)));
        }
        if !verify_sum(&sum) {
            return Err(Error::IdentityViolation(format!("sum does not verify: {sum}")));
        }
        Ok(DecompRecord { k, n, sum, verified: true })
    }

    pub fn verified(&self) -> bool {
        self.verified
    }

    pub fn family(&self) -> &str {
        self.sum.provenance.label()
    }

    pub fn to_json(&self) -> RecordJson {
        let params = match &self.sum.provenance {
            Provenance::Family { params, .. } => params.iter().map(|(k, v)| (k.clone(), v.to_string())).collect(),
            Provenance::Oracle => BTreeMap::new(),
        };
        RecordJson {
            k: int_json(&self.k),
            n: int_json(&self.n),
            terms: self
                .sum
                .terms
                .iter()
                .map(|t| TermJson { sign: t.sign as i32, den: t.den.to_string() })
                .collect(),
            family: self.family().to_string(),
            params,
            verified: self.verified,
        }
    }

    /// Rebuilds a record from JSON and re-verifies it; the stored flag is ignored.
    pub fn from_json(j: &RecordJson) -> Result<Self> {
        let k = json_int(&j.k)?;
        let n = json_int(&j.n)?;
        if !n.is_positive() {
            return domain("record n must be positive");
        }
        let mut terms = Vec::with_capacity(j.terms.len());
        for t in &j.terms {
            let den: Integer = t.den.parse().map_err(|_| Error::Parse(format!("bad denominator {:?}", t.den)))?;
            terms.push(UnitTerm::new(t.sign as i8, den)?);
        }
        let provenance = if j.family == "oracle" {
            Provenance::Oracle
        } else {
            let mut params = BTreeMap::new();
            for (name, v) in &j.params {
                params.insert(name.clone(), parse_param(v).ok_or_else(|| Error::Parse(format!("bad parameter {name}={v}")))?);
            }
            Provenance::Family { id: j.family.clone(), params }
        };
        let sum = UnitFractionSum::new(Rational::new(k.clone(), n.clone()), terms, provenance);
        DecompRecord::seal(k, n, sum)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TermJson {
    pub sign: i32,
    pub den: String,
}

/// JSON shape of a record. Field order is the serialization order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RecordJson {
    pub k: serde_json::Value,
    pub n: serde_json::Value,
    pub terms: Vec<TermJson>,
    pub family: String,
    pub params: BTreeMap<String, String>,
    pub verified: bool,
}

/// Parses a parameter value written as `3`, `-1/2` or `[1,2,3]`.
pub fn parse_param(s: &str) -> Option<Val> {
    let s = s.trim();
    if let Some(inner) = s.strip_prefix('[').and_then(|r| r.strip_suffix(']')) {
        if inner.trim().is_empty() {
            return Some(Val::List(std::sync::Arc::new(Vec::new())));
        }
        let items: Option<Vec<Rational>> = inner.split(',').map(|x| x.trim().parse().ok()).collect();
        return items.map(|v| Val::List(std::sync::Arc::new(v)));
    }
    s.parse().ok().map(Val::Num)
}

fn int_json(v: &Integer) -> serde_json::Value {
    match v.to_i64() {
        Some(x) => serde_json::Value::from(x),
        None => serde_json::Value::from(v.to_string()),
    }
}

fn json_int(v: &serde_json::Value) -> Result<Integer> {
    match v {
        serde_json::Value::Number(n) => n
            .as_i64()
            .map(Integer::from)
            .ok_or_else(|| Error::Parse(format!("non-integer number {n}"))),
        serde_json::Value::String(s) => s.parse().map_err(|_| Error::Parse(format!("bad integer {s:?}"))),
        other => Err(Error::Parse(format!("expected integer, got {other}"))),
    }
}

// ---------------------------------------------------------------------------
// oracles

fn unit_n(target: &Rational) -> Result<Integer> {
    if !target.numer().is_one() || !target.denom().is_positive() {
        return domain(format!("{target} is not a unit fraction 1/n"));
    }
    Ok(target.denom().clone())
}

/// All pairs x <= y with 1/x + 1/y = 1/n, via divisors v <= n of n^2,
/// ascending in x.
pub fn solve_two(target: &Rational) -> Result<Vec<UnitFractionSum>> {
    let n = unit_n(target)?;
    let f = arith::factorize(&n)?;
    let sq = arith::Factorization { factors: f.factors.iter().map(|(p, e)| (p.clone(), 2 * e)).collect() };
    let n2 = &n * &n;
    let mut out = Vec::new();
    for v in sq.divisors() {
        if v > n {
            break;
        }
        let x = &n + &v;
        let y = &n + &n2 / &v;
        out.push(UnitFractionSum::new(target.clone(), vec![UnitTerm::pos(x), UnitTerm::pos(y)], Provenance::Oracle));
    }
    Ok(out)
}

/// P2(n) = ceil(tau(n^2) / 2).
pub fn count_two(n: &Integer) -> Result<Integer> {
    let f = arith::factorize(n)?;
    let t: Integer = f.factors.iter().fold(Integer::one(), |acc, (_, e)| acc * (2 * e + 1));
    Ok((t + 1u32) / 2u32)
}

fn check_three_pre(k: &Integer, n: &Integer) -> Result<(u128, u128)> {
    if !k.is_positive() || !n.is_positive() {
        return domain("solve_three needs k >= 1 and n >= 1");
    }
    if k > &(n * 3u32) {
        return domain(format!("{k}/{n} > 3 has no three-term positive decomposition"));
    }
    let kk = k.to_u128().filter(|&v| v < 1 << 32);
    let nn = n.to_u128().filter(|&v| v < 1 << 31);
    match (kk, nn) {
        (Some(a), Some(b)) => Ok((a, b)),
        _ => domain("solve_three supports n < 2^31 and k < 2^32"),
    }
}

fn factor_u128_small(x: u128) -> Vec<(u64, u32)> {
    arith::factor_u64(x as u64)
}

fn merge_factors(a: &[(u64, u32)], b: &[(u64, u32)]) -> Vec<(u64, u32)> {
    let mut m: BTreeMap<u64, u32> = BTreeMap::new();
    for &(p, e) in a.iter().chain(b) {
        *m.entry(p).or_default() += e;
    }
    m.into_iter().collect()
}

fn divisors_u128(f: &[(u64, u32)]) -> Vec<u128> {
    let mut ds = vec![1u128];
    for &(p, e) in f {
        let len = ds.len();
        let mut pk = 1u128;
        for _ in 0..e {
            pk *= p as u128;
            for i in 0..len {
                ds.push(ds[i] * pk);
            }
        }
    }
    ds.sort_unstable();
    ds
}

/// Triples (y, z), y <= z, y >= ymin, with 1/y + 1/z = p/q, ascending in y.
fn pairs_for(p: u128, q: u128, qf: &[(u64, u32)], ymin: u128, first_only: bool) -> Vec<(u128, u128)> {
    let sq: Vec<(u64, u32)> = qf.iter().map(|&(pr, e)| (pr, 2 * e)).collect();
    let q2 = q * q;
    let mut out = Vec::new();
    for a in divisors_u128(&sq) {
        if a > q {
            break;
        }
        if (q + a) % p != 0 {
            continue;
        }
        let y = (q + a) / p;
        if y < ymin {
            continue;
        }
        let b = q2 / a;
        if (q + b) % p != 0 {
            continue;
        }
        out.push((y, (q + b) / p));
        if first_only {
            break;
        }
    }
    out
}

fn triples_at_x(k: u128, n: u128, nf: &[(u64, u32)], x: u128, first_only: bool) -> Vec<(u128, u128, u128)> {
    let num = k * x - n;
    let den = n * x;
    let g = gcd_u128(num, den);
    let (p, q) = (num / g, den / g);
    let qf: Vec<(u64, u32)> = {
        let all = merge_factors(nf, &factor_u128_small(x));
        let mut rest = q;
        let mut out = Vec::new();
        for (pr, _) in all {
            let mut e = 0;
            while rest % pr as u128 == 0 {
                rest /= pr as u128;
                e += 1;
            }
            if e > 0 {
                out.push((pr, e));
            }
        }
        out
    };
    pairs_for(p, q, &qf, x, first_only).into_iter().map(|(y, z)| (x, y, z)).collect()
}

fn gcd_u128(mut a: u128, mut b: u128) -> u128 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

fn triples_to_sums(k: &Integer, n: &Integer, ts: Vec<(u128, u128, u128)>) -> Vec<UnitFractionSum> {
    let target = Rational::new(k.clone(), n.clone());
    ts.into_iter()
        .map(|(x, y, z)| {
            UnitFractionSum::new(
                target.clone(),
                vec![UnitTerm::pos(BigInt::from(x)), UnitTerm::pos(BigInt::from(y)), UnitTerm::pos(BigInt::from(z))],
                Provenance::Oracle,
            )
        })
        .collect()
}

/// All (or the lexicographically smallest) positive triples x <= y <= z with
/// k/n = 1/x + 1/y + 1/z. For each x the residual p/q is split through the
/// divisors A <= q of q^2: (p y - q)(p z - q) = q^2.
pub fn solve_three(k: &Integer, n: &Integer, find_all: bool) -> Result<Vec<UnitFractionSum>> {
    let (kk, nn) = check_three_pre(k, n)?;
    Ok(triples_to_sums(k, n, solve_three_raw(kk, nn, find_all)))
}

pub fn solve_three_raw(k: u128, n: u128, find_all: bool) -> Vec<(u128, u128, u128)> {
    let nf = arith::factor_u64(n as u64);
    let lo = n / k + 1;
    let hi = 3 * n / k;
    if find_all {
        let per_x = par::map_range(lo as u64, hi as u64, |x| triples_at_x(k, n, &nf, x as u128, false));
        per_x.into_iter().flatten().collect()
    } else {
        let mut x = lo;
        while x <= hi {
            let t = triples_at_x(k, n, &nf, x, true);
            if let Some(&first) = t.first() {
                return vec![first];
            }
            x += 1;
        }
        Vec::new()
    }
}

/// Independent cross-check of [`solve_three`]: scans x and y downward from
/// their upper bounds and tests the remainder for being a unit fraction.
pub fn solve_three_naive(k: u128, n: u128) -> Vec<(u128, u128, u128)> {
    let mut out = Vec::new();
    let mut x = 3 * n / k;
    while x > n / k {
        // residual a/b = k/n - 1/x
        let a = k * x - n;
        let b = n * x;
        let mut y = 2 * b / a;
        let ymin = (b / a + 1).max(x);
        while y >= ymin {
            let c = a * y - b;
            if (b * y) % c == 0 {
                out.push((x, y, b * y / c));
            }
            y -= 1;
        }
        x -= 1;
    }
    out.sort_unstable();
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::{int, ratio};

    fn sum(k: i64, n: i64, dens: &[i64]) -> UnitFractionSum {
        UnitFractionSum::new(ratio(k, n), dens.iter().map(|&d| UnitTerm::pos(int(d))).collect(), Provenance::Oracle)
    }

    #[test]
    fn verify_examples() {
        assert!(verify_sum(&sum(4, 7, &[2, 28, 28])));
        assert!(!verify_sum(&sum(4, 7, &[2, 28, 29])));
        assert!(verify_sum(&sum(4, 1801, &[451, 295364, 3249004])));
    }

    #[test]
    fn canonical_order() {
        let s = canonicalize(&sum(4, 7, &[28, 2, 28]));
        assert_eq!(s.dens(), vec![int(2), int(28), int(28)]);
        let mut m = sum(1, 3, &[6, 2]);
        m.terms[0].sign = -1;
        let c = canonicalize(&m);
        assert_eq!(c.terms[0], UnitTerm::pos(int(2)));
        assert_eq!(c.terms[1].sign, -1);
    }

    #[test]
    fn two_term_examples() {
        let s = solve_two(&ratio(1, 2)).unwrap();
        let pairs: Vec<_> = s.iter().map(|u| u.dens()).collect();
        assert_eq!(pairs, vec![vec![int(3), int(6)], vec![int(4), int(4)]]);
        assert_eq!(solve_two(&ratio(1, 1)).unwrap().len(), 1);
        assert_eq!(count_two(&int(12)).unwrap(), int(8));
        assert_eq!(count_two(&int(1)).unwrap(), int(1));
        assert_eq!(count_two(&int(97)).unwrap(), int(2));
        assert!(solve_two(&ratio(2, 5)).is_err());
    }

    #[test]
    fn three_term_examples() {
        let all = solve_three_raw(4, 7, true);
        for t in [(2, 28, 28), (3, 6, 14), (4, 4, 14)] {
            assert!(all.contains(&t));
        }
        assert!(solve_three_raw(4, 2, true).contains(&(1, 2, 2)));
        assert!(solve_three(&int(4), &int(1), true).is_err());
        let first = solve_three(&int(4), &int(13), false).unwrap();
        assert_eq!(first.len(), 1);
        assert_eq!(solve_three_raw(4, 7, false), vec![all[0]]);
    }

    #[test]
    fn record_roundtrip() {
        let rec = DecompRecord::seal(int(4), int(7), sum(4, 7, &[2, 28, 28])).unwrap();
        let j = serde_json::to_string(&rec.to_json()).unwrap();
        assert_eq!(
            j,
            r#"{"k":4,"n":7,"terms":[{"sign":1,"den":"2"},{"sign":1,"den":"28"},{"sign":1,"den":"28"}],"family":"oracle","params":{},"verified":true}"#
        );
        let back: RecordJson = serde_json::from_str(&j).unwrap();
        assert_eq!(DecompRecord::from_json(&back).unwrap(), rec);
        assert!(DecompRecord::seal(int(4), int(7), sum(4, 7, &[2, 28, 29])).is_err());
    }
}
