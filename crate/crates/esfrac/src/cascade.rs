//! `k/n` decomposition strategies: a fixed cascade of families with an oracle
//! fallback, a single named family, or the oracle alone.

use std::collections::{BTreeSet, HashMap};
use std::str::FromStr;
use std::sync::{Arc, Mutex, OnceLock};

use crate::arith::Integer;
use crate::coverage::{progressions_k, CoverConfig, Progression};
use crate::egyptian::{solve_three, DecompRecord};
use crate::error::{Error, Result};
use crate::families::{registry, FamilyDef, ParamBinding};

/// Families tried by the cascade, in order. Each contributes the progressions
/// its grid traces; the first progression containing `n` is used.
pub const CASCADE: [&str; 14] = [
    "F31", "F32a", "F32b", "F32c", "F32d", "F32e", "F32f", "F43", "F48c", "F48d", "F48e", "F49a", "F49b", "F50",
];

const CASCADE_GRID: CoverConfig = CoverConfig { grid_max: 6, combo_cap: 4000, check_len: 0 };

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Strategy {
    Cascade,
    Family(String),
    Oracle,
}

impl FromStr for Strategy {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "cascade" => Ok(Strategy::Cascade),
            "oracle" => Ok(Strategy::Oracle),
            _ => match s.strip_prefix("family:") {
                Some(id) if !id.is_empty() => Ok(Strategy::Family(id.to_string())),
                _ => Err(Error::Parse(format!("unknown strategy {s:?}, expected cascade, oracle or family:<id>"))),
            },
        }
    }
}

type Cache = Mutex<HashMap<(String, u64), Arc<Vec<Progression>>>>;

fn cached_progressions(f: &FamilyDef, k: u64) -> Arc<Vec<Progression>> {
    static CACHE: OnceLock<Cache> = OnceLock::new();
    let cache = CACHE.get_or_init(Default::default);
    let key = (f.id.clone(), k);
    if let Some(p) = cache.lock().expect("cache lock").get(&key) {
        return p.clone();
    }
    let p = Arc::new(progressions_k(f, &CASCADE_GRID, k));
    cache.lock().expect("cache lock").insert(key, p.clone());
    p
}

fn dens_key(rec: &DecompRecord) -> Vec<Integer> {
    let mut d = rec.sum.dens();
    d.sort();
    d
}

/// Records for `k/n` from the progressions of `f`: the first one, or every
/// distinct one when `all`. `terms` restricts the number of terms.
fn from_family(f: &FamilyDef, k: u64, n: u64, all: bool, terms: Option<usize>) -> Vec<DecompRecord> {
    let target = Integer::from(n);
    let mut out = Vec::new();
    let mut seen = BTreeSet::new();
    for pr in cached_progressions(f, k).iter() {
        if !pr.class.contains(&target) {
            continue;
        }
        let step: Integer = (&target - pr.class.first()) / &pr.class.m;
        let Ok(step) = i64::try_from(step) else { continue };
        let Ok(p) = f.bind_free(&pr.partial, pr.free_t0 + step) else { continue };
        let Ok(rec) = f.evaluate(&p) else { continue };
        let fits = rec.verified()
            && rec.k == Integer::from(k)
            && rec.n == target
            && rec.sum.terms.iter().all(|t| t.sign == 1)
            && terms.is_none_or(|c| rec.sum.terms.len() == c);
        if fits && seen.insert(dens_key(&rec)) {
            out.push(rec);
            if !all {
                break;
            }
        }
    }
    out
}

fn oracle(k: u64, n: u64, all: bool) -> Result<Vec<DecompRecord>> {
    let (ki, ni) = (Integer::from(k), Integer::from(n));
    solve_three(&ki, &ni, all)?.into_iter().map(|s| DecompRecord::seal(ki.clone(), ni.clone(), s)).collect()
}

/// Verified decompositions of `k/n`. The cascade returns three positive terms
/// and falls back to the oracle, so it always answers for `k = 4, n >= 2`.
pub fn decompose(k: u64, n: u64, strategy: &Strategy, all: bool) -> Result<Vec<DecompRecord>> {
    if k == 0 || n == 0 {
        return Err(Error::Domain(format!("need k, n >= 1, got {k}/{n}")));
    }
    match strategy {
        Strategy::Oracle => oracle(k, n, all),
        Strategy::Family(id) => {
            let mut out = Vec::new();
            for f in registry().select(id)? {
                out.extend(from_family(f, k, n, all, None));
                if !all && !out.is_empty() {
                    break;
                }
            }
            if out.is_empty() {
                return Err(Error::Domain(format!("{id}: no progression of the family reaches {k}/{n}")));
            }
            Ok(out)
        }
        Strategy::Cascade => {
            let mut out = Vec::new();
            let mut seen = BTreeSet::new();
            for id in CASCADE {
                for rec in from_family(registry().get(id)?, k, n, all, Some(3)) {
                    if seen.insert(dens_key(&rec)) {
                        out.push(rec);
                    }
                }
                if !all && !out.is_empty() {
                    return Ok(out);
                }
            }
            if out.is_empty() {
                out = oracle(k, n, false)?;
            }
            if out.is_empty() {
                return Err(Error::Domain(format!("{k}/{n} has no three-term decomposition")));
            }
            Ok(out)
        }
    }
}

/// Evaluates `id` at explicit parameters and checks the result is `k/n`.
/// Parameters named `k` or `n` default to the target when not given.
pub fn decompose_with(id: &str, k: u64, n: u64, params: &ParamBinding) -> Result<DecompRecord> {
    let f = registry().get(id)?;
    let mut params = params.clone();
    for (name, v) in [("k", k), ("n", n)] {
        if f.params.iter().any(|p| p.name == name) {
            params.entry(name.to_string()).or_insert_with(|| crate::expr::Val::Num(crate::arith::ratio(v as i64, 1)));
        }
    }
    let rec = f.evaluate(&params)?;
    if crate::arith::ratio(k as i64, n as i64) != rec.sum.target {
        return Err(Error::Domain(format!("{id} at these parameters gives {}, not {k}/{n}", rec.sum.target)));
    }
    Ok(rec)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dens(r: &DecompRecord) -> Vec<u64> {
        let mut d: Vec<u64> = r.sum.dens().iter().map(|x| u64::try_from(x).unwrap()).collect();
        d.sort();
        d
    }

    #[test]
    fn cascade_small() {
        for n in 2..=300 {
            let r = decompose(4, n, &Strategy::Cascade, false).unwrap();
            assert_eq!(r.len(), 1);
            assert!(r[0].verified() && r[0].sum.terms.len() == 3, "n={n}");
        }
        let r = decompose(4, 7, &Strategy::Cascade, false).unwrap();
        assert_eq!(r[0].family(), "F31");
        assert_eq!(dens(&r[0]), vec![2, 16, 112]);
    }

    #[test]
    fn family_and_oracle() {
        let r = decompose(4, 7, &Strategy::Family("F43".into()), false).unwrap();
        assert_eq!(dens(&r[0]), vec![2, 28, 28]);
        let r = decompose(4, 7, &Strategy::Oracle, true).unwrap();
        assert!(r.iter().any(|r| dens(r) == vec![2, 28, 28]));
        assert!(decompose(4, 8, &Strategy::Family("F43".into()), false).is_err());
        assert!("family:".parse::<Strategy>().is_err());
        assert_eq!("family:F31".parse::<Strategy>().unwrap(), Strategy::Family("F31".into()));
    }
}
