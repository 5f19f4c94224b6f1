//! Residue classes `{m t - g : t >= t0}`, coverage of residues by family
//! progressions, and the integer- and rational-size reachability searches.

use std::collections::BTreeMap;
use std::fmt;

use num_integer::Integer as _;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::Serialize;

use crate::arith::{lcm_u64, Integer};
use crate::egyptian::DecompRecord;
use crate::error::{domain, Result};
use crate::families::{registry, FamilyDef, FreeVar, ParamBinding, ParamKind};
use crate::par;

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ResidueClass {
    pub m: Integer,
    pub g: Integer,
    pub t0: u64,
}

impl ResidueClass {
    /// Normalizes to `0 <= g < m` and `t0 >= 1`, keeping the first member.
    pub fn new(m: Integer, g: Integer, t0: i64) -> Self {
        assert!(m.is_positive(), "modulus must be positive");
        let first = &m * Integer::from(t0) - &g;
        let g2 = (-&first).mod_floor(&m);
        let t = (&first + &g2) / &m;
        let t0 = t.to_i64().unwrap_or(1).max(1) as u64;
        ResidueClass { m, g: g2, t0 }
    }

    pub fn modulus(&self) -> &Integer {
        &self.m
    }

    /// Residue of the members modulo `m`.
    pub fn residue(&self) -> Integer {
        (-&self.g).mod_floor(&self.m)
    }

    pub fn at(&self, t: u64) -> Integer {
        &self.m * Integer::from(t) - &self.g
    }

    pub fn first(&self) -> Integer {
        self.at(self.t0)
    }

    pub fn contains(&self, n: &Integer) -> bool {
        (n + &self.g).mod_floor(&self.m).is_zero() && n >= &self.first()
    }

    /// `factor` disjoint subclasses of modulus `m * factor`, offsets ascending.
    pub fn split(&self, factor: u64) -> Vec<ResidueClass> {
        assert!(factor >= 2, "split factor must be at least 2");
        let f = Integer::from(factor);
        (0..factor)
            .map(|i| {
                let g = &self.g + &self.m * Integer::from(i);
                let t0 = (self.t0 + i).div_ceil(factor);
                ResidueClass { m: &self.m * &f, g, t0 }
            })
            .collect()
    }

    /// The `(modulus, residue)` rendering.
    pub fn pair(&self) -> (Integer, Integer) {
        (self.m.clone(), self.residue())
    }

    pub fn json(&self) -> serde_json::Value {
        serde_json::json!({
            "class": self.to_string(),
            "modulus": self.m.to_string(),
            "residue": self.residue().to_string(),
            "t0": self.t0,
        })
    }
}

impl fmt::Display for ResidueClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.g.is_zero() {
            write!(f, "{}t", self.m)?;
        } else {
            write!(f, "{}t-{}", self.m, self.g)?;
        }
        if self.t0 > 1 {
            write!(f, " (t>={})", self.t0)?;
        }
        Ok(())
    }
}

// ---------------------------------------------------------------------------
// coverage

/// Grid bounds for the non-free parameters used by [`covers`].
#[derive(Debug, Clone, Copy, Serialize)]
pub struct CoverConfig {
    pub grid_max: i64,
    /// At most this many partial bindings per family.
    pub combo_cap: usize,
    /// Consecutive progression members checked per reported class.
    pub check_len: u64,
}

impl Default for CoverConfig {
    fn default() -> Self {
        CoverConfig { grid_max: 12, combo_cap: 4000, check_len: 100 }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Witness {
    pub family: String,
    pub binding: BTreeMap<String, String>,
    pub class: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct ResidueStatus {
    pub residue: u64,
    pub form: String,
    pub covered_by: Vec<String>,
    pub witnesses: Vec<Witness>,
}

impl ResidueStatus {
    pub fn covered(&self) -> bool {
        !self.covered_by.is_empty()
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct CoverageReport {
    pub modulus: u64,
    pub config: CoverConfig,
    pub families: Vec<String>,
    pub residues: Vec<ResidueStatus>,
}

impl CoverageReport {
    pub fn status(&self, residue: u64) -> &ResidueStatus {
        &self.residues[(residue % self.modulus) as usize]
    }
    pub fn uncovered(&self) -> Vec<u64> {
        self.residues.iter().filter(|r| !r.covered()).map(|r| r.residue).collect()
    }
}

/// One progression traced by a family with its other parameters fixed.
#[derive(Debug, Clone)]
pub struct Progression {
    pub family: String,
    pub partial: ParamBinding,
    pub class: ResidueClass,
    pub free_t0: i64,
}

fn positive_k(rec: &DecompRecord, k: u64) -> bool {
    rec.k == Integer::from(k) && rec.sum.terms.iter().all(|t| t.sign == 1)
}

/// The parameter determined by the free variable (itself, unless derived).
fn free_param(f: &FamilyDef) -> Option<&str> {
    match &f.free {
        Some(FreeVar { name, derive: None }) => Some(name),
        Some(FreeVar { derive: Some((p, _)), .. }) => Some(p),
        None => None,
    }
}

/// Partial bindings (free parameter removed) from the grid, `k` pinned.
fn partials(f: &FamilyDef, cfg: &CoverConfig, k: u64) -> Vec<ParamBinding> {
    let Some(fp) = free_param(f) else { return Vec::new() };
    let mut def = f.clone();
    for s in &mut def.params {
        if s.name == fp {
            s.grid_hi = s.lo.max(1);
            s.lo = s.grid_hi;
        }
        if s.name == "k" {
            s.lo = k as i64;
            s.grid_hi = k as i64;
        }
        if let ParamKind::List { .. } = s.kind {
            s.grid_hi = s.grid_hi.min(4);
        }
    }
    let mut out = def.grid(cfg.grid_max);
    out.truncate(cfg.combo_cap);
    for p in &mut out {
        p.remove(fp);
    }
    out
}

/// Consecutive members from the first admissible free value evaluate to the
/// class, in order, as 4/n sums with positive terms.
fn sound(f: &FamilyDef, pr: &Progression, len: u64) -> bool {
    (0..len).all(|i| {
        let want = pr.class.first() + &pr.class.m * Integer::from(i);
        f.bind_free(&pr.partial, pr.free_t0 + i as i64)
            .and_then(|p| f.evaluate(&p))
            .map(|rec| rec.n == want && positive_k(&rec, 4))
            .unwrap_or(false)
    })
}

/// Progressions of 4/n decompositions with positive terms traced by `f`.
pub fn progressions(f: &FamilyDef, cfg: &CoverConfig) -> Vec<Progression> {
    progressions_k(f, cfg, 4)
}

/// Progressions of k/n decompositions with positive terms traced by `f`.
pub fn progressions_k(f: &FamilyDef, cfg: &CoverConfig, k: u64) -> Vec<Progression> {
    let found = par::map(partials(f, cfg, k), |p| {
        let (class, free_t0) = f.progression_scan(&p, 200).ok()?;
        let rec = f.evaluate(&f.bind_free(&p, free_t0).ok()?).ok()?;
        positive_k(&rec, k).then_some(Progression { family: f.id.clone(), partial: p, class, free_t0 })
    });
    found.into_iter().flatten().collect()
}

fn show(p: &ParamBinding) -> BTreeMap<String, String> {
    p.iter().map(|(k, v)| (k.clone(), v.to_string())).collect()
}

/// Residue statuses modulo `modulus` for the selected families. A residue is
/// covered by a family when one of its progressions contains the whole class,
/// that is when the progression modulus divides `modulus`.
pub fn covers(family_ids: &[String], modulus: u64, cfg: &CoverConfig) -> Result<CoverageReport> {
    if modulus < 2 {
        return domain("modulus must be at least 2");
    }
    let reg = registry();
    let mut fams: Vec<&FamilyDef> = Vec::new();
    for id in family_ids {
        for f in reg.select(id)? {
            if !fams.iter().any(|g| g.id == f.id) {
                fams.push(f);
            }
        }
    }
    let mut residues: Vec<ResidueStatus> = (0..modulus)
        .map(|r| {
            let g = (modulus - r) % modulus;
            let form = if g == 0 { format!("{modulus}t") } else { format!("{modulus}t-{g}") };
            ResidueStatus { residue: r, form, covered_by: Vec::new(), witnesses: Vec::new() }
        })
        .collect();
    let big = Integer::from(modulus);
    for f in &fams {
        let mut done = vec![false; modulus as usize];
        for pr in progressions(f, cfg) {
            if !(&big % &pr.class.m).is_zero() {
                continue;
            }
            let m = pr.class.m.to_u64().expect("modulus divides a u64");
            let r0 = pr.class.residue().to_u64().expect("residue below modulus");
            let hits: Vec<u64> = (0..modulus / m).map(|j| r0 + j * m).filter(|r| !done[*r as usize]).collect();
            if hits.is_empty() || !sound(f, &pr, cfg.check_len) {
                continue;
            }
            for r in hits {
                done[r as usize] = true;
                let st = &mut residues[r as usize];
                st.covered_by.push(f.id.clone());
                st.witnesses.push(Witness {
                    family: f.id.clone(),
                    binding: show(&pr.partial),
                    class: pr.class.to_string(),
                });
            }
        }
    }
    Ok(CoverageReport { modulus, config: *cfg, families: fams.iter().map(|f| f.id.clone()).collect(), residues })
}

pub fn all_families() -> Vec<String> {
    registry().families.iter().map(|f| f.id.clone()).collect()
}

/// Squares of 1, 11, 13, 17, 19, 23 modulo 840.
pub const MORDELL_SQUARES: [u64; 6] = [1, 121, 169, 289, 361, 529];
/// The same residues as printed with the exponent lost.
pub const MORDELL_RAW: [u64; 6] = [12, 112, 132, 172, 192, 232];

#[derive(Debug, Clone, Serialize)]
pub struct MordellReport {
    pub residues: Vec<(u64, Vec<String>)>,
}

pub fn mordell_check(family_ids: &[String], raw: bool, cfg: &CoverConfig) -> Result<MordellReport> {
    let list = if raw { MORDELL_RAW } else { MORDELL_SQUARES };
    if family_ids.is_empty() {
        return Ok(MordellReport { residues: list.iter().map(|r| (*r, Vec::new())).collect() });
    }
    let rep = covers(family_ids, 840, cfg)?;
    Ok(MordellReport { residues: list.iter().map(|r| (*r, rep.status(*r).covered_by.clone())).collect() })
}

// ---------------------------------------------------------------------------
// reachability

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct IntWitness {
    pub c: u64,
    pub d: u64,
    pub t: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct RatWitness {
    pub e: u64,
    pub u: u64,
    pub f: u64,
    pub t: u64,
}

/// Largest `max(c, d)` worth trying: from `k max(c,d) <= n + 2 max(c,d)`.
/// For `k <= 2` the bound is not forced; `n + 2` always suffices there.
pub fn integer_bound(n: u64, k: u64) -> u64 {
    if k >= 3 {
        n.div_ceil(k - 2)
    } else {
        n + 2
    }
}

fn int_hit(n: u64, k: u64, c: u64, d: u64) -> Option<u64> {
    let w = lcm_u64(c, d) as u128 * k as u128;
    let rhs = n as u128 + c as u128 + d as u128;
    (rhs % w == 0).then(|| (rhs / w) as u64)
}

/// Smallest `(c, d)` with `c <= d` and `k lcm(c,d) t = n + c + d`, or `None`,
/// which is a proof of nonexistence for `k >= 3`.
pub fn integer_size_reachable(n: u64, k: u64) -> Option<IntWitness> {
    assert!(n >= 1 && k >= 1);
    let b = integer_bound(n, k);
    par::find_first(1, b, |c| (c..=b).find_map(|d| int_hit(n, k, c, d).map(|t| IntWitness { c, d, t })))
        .map(|(_, w)| w)
}

/// Smallest `(e, u, f)` with `e <= u <= bound`, `f | e+u` and
/// `k lcm(e,u) t = n + (e+u)/f`. `None` is only a bounded verdict.
pub fn rational_size_reachable(n: u64, k: u64, bound: u64) -> Option<RatWitness> {
    assert!(n >= 1 && k >= 1);
    par::find_first(1, bound, |e| {
        (e..=bound).find_map(|u| {
            let w = lcm_u64(e, u) as u128 * k as u128;
            let s = e + u;
            crate::arith::divisors_u64(s).into_iter().find_map(|f| {
                let rhs = n as u128 + (s / f) as u128;
                (rhs % w == 0).then(|| RatWitness { e, u, f, t: (rhs / w) as u64 })
            })
        })
    })
    .map(|(_, w)| w)
}

/// Checks `k lcm(c,d) t = n + c + d`.
pub fn check_int_witness(n: u64, k: u64, w: &IntWitness) -> bool {
    w.t >= 1 && int_hit(n, k, w.c, w.d) == Some(w.t)
}

/// Checks `f | e+u` and `k lcm(e,u) t = n + (e+u)/f`.
pub fn check_rat_witness(n: u64, k: u64, w: &RatWitness) -> bool {
    let s = w.e + w.u;
    w.t >= 1
        && w.f >= 1
        && s % w.f == 0
        && lcm_u64(w.e, w.u) as u128 * k as u128 * w.t as u128 == n as u128 + (s / w.f) as u128
}

/// The 4/n decomposition carried by a rational-size witness:
/// `1/(wt) + 1/(wtfn/e) + 1/(wtfn/u)` with `w = lcm(e, u)`.
pub fn rational_witness_dens(n: u64, w: &RatWitness) -> Option<[Integer; 3]> {
    let l = Integer::from(lcm_u64(w.e, w.u)) * Integer::from(w.t);
    let big = &l * Integer::from(w.f) * Integer::from(n);
    let (e, u) = (Integer::from(w.e), Integer::from(w.u));
    if !(&big % &e).is_zero() || !(&big % &u).is_zero() {
        return None;
    }
    Some([l, &big / e, &big / u])
}
