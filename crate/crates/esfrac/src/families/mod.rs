//! The identity catalog. Each family is data: parameter declarations, an
//! ordered list of derived quantities and guard predicates, a target
//! `num/den`, and signed denominator formulas. One generic evaluator turns a
//! binding into a verified [`DecompRecord`].

mod catalog;

use std::collections::BTreeMap;
use std::sync::{Arc, OnceLock};

use num_traits::{One, Signed, ToPrimitive};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::arith::{Integer, Rational};
use crate::coverage::ResidueClass;
use crate::egyptian::{DecompRecord, Provenance, UnitFractionSum, UnitTerm};
use crate::error::{Error, Result};
use crate::expr::{self, Env, Expr, Val};
use crate::par;

/// Version tag of the built-in catalog, printed by every CLI run.
pub const REGISTRY_VERSION: &str = "esfrac-registry/1.0";

/// Maximum rejection-sampling draws per family in [`verify_identity`].
pub const DRAW_CAP: u64 = 100_000;

/// Default upper value for exhaustive grids.
pub const GRID_MAX: i64 = 6;

/// Name -> value map; values are numbers or (for list parameters) lists.
pub type ParamBinding = BTreeMap<String, Val>;

#[derive(Debug, Clone)]
pub enum ParamKind {
    Int,
    /// Rational with denominator sampled from `1..=den_hi`.
    Rational { den_hi: i64 },
    /// List of integers whose length is given by an expression over scalars.
    List { len: Expr, len_src: String },
}

#[derive(Debug, Clone)]
pub struct ParamSpec {
    pub name: String,
    pub kind: ParamKind,
    /// Smallest admissible value (entries, for lists); part of the domain.
    pub lo: i64,
    /// Upper end of the sampling range.
    pub hi: i64,
    /// Upper end of the exhaustive grid.
    pub grid_hi: i64,
    /// Optional sampling window over earlier parameters; falls back to `lo..=hi`.
    pub range: Option<(Expr, Expr)>,
    /// Optional targeted sampler for parameters that rejection sampling
    /// rarely lands in-domain; sees the parameters drawn before it.
    pub hint: Option<Hint>,
}

/// Draws a value given the earlier parameters, or `None` to fall back.
pub type Hint = fn(&mut ChaCha8Rng, &Env) -> Option<i64>;

/// Integer value of a bound name, for sampling hints.
pub fn int_of(env: &Env, name: &str) -> Option<i64> {
    match env.get(name)? {
        Val::Num(r) if r.is_integer() => r.to_integer().to_i64(),
        _ => None,
    }
}

#[derive(Debug, Clone)]
pub enum Step {
    Let { name: String, expr: Expr, src: String },
    Guard { desc: String, pred: Expr },
}

#[derive(Debug, Clone)]
pub struct TermSpec {
    pub sign: Expr,
    pub den: Expr,
    pub each: Option<(String, Expr, Expr)>,
    pub src: String,
}

/// The progression variable of a family. When `derive` is set the variable is
/// not itself a parameter; it determines that parameter instead.
#[derive(Debug, Clone)]
pub struct FreeVar {
    pub name: String,
    pub derive: Option<(String, Expr)>,
}

#[derive(Debug, Clone)]
pub struct FamilyDef {
    pub id: String,
    pub group: String,
    pub name: String,
    pub params: Vec<ParamSpec>,
    pub steps: Vec<Step>,
    pub num: Expr,
    pub den: Expr,
    pub num_src: String,
    pub den_src: String,
    pub terms: Vec<TermSpec>,
    pub free: Option<FreeVar>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DomainReport {
    pub ok: bool,
    pub violated: Option<String>,
}

pub struct Registry {
    pub families: Vec<FamilyDef>,
}

pub fn registry() -> &'static Registry {
    static REG: OnceLock<Registry> = OnceLock::new();
    REG.get_or_init(|| Registry { families: catalog::build() })
}

impl Registry {
    /// Exact id, or a group id that names a single variant.
    pub fn get(&self, id: &str) -> Result<&FamilyDef> {
        if let Some(f) = self.families.iter().find(|f| f.id == id) {
            return Ok(f);
        }
        let group: Vec<&FamilyDef> = self.families.iter().filter(|f| f.group == id).collect();
        match group.len() {
            0 => Err(Error::UnknownFamily(id.to_string())),
            1 => Ok(group[0]),
            _ => Err(Error::UnknownFamily(format!(
                "{id} is a group; pick one of {}",
                group.iter().map(|f| f.id.as_str()).collect::<Vec<_>>().join(", ")
            ))),
        }
    }

    /// All variants matching an id or a group id.
    pub fn select(&self, id: &str) -> Result<Vec<&FamilyDef>> {
        let hits: Vec<&FamilyDef> = self.families.iter().filter(|f| f.id == id || f.group == id).collect();
        if hits.is_empty() {
            return Err(Error::UnknownFamily(id.to_string()));
        }
        Ok(hits)
    }

    pub fn ids(&self) -> Vec<&str> {
        self.families.iter().map(|f| f.id.as_str()).collect()
    }
}

fn num_val(v: i64) -> Val {
    Val::Num(Rational::from_integer(v.into()))
}

/// Builds a binding from integer pairs.
pub fn binding(pairs: &[(&str, i64)]) -> ParamBinding {
    pairs.iter().map(|(k, v)| (k.to_string(), num_val(*v))).collect()
}

enum Prepared {
    Ok(Env),
    Violated(String),
}

impl FamilyDef {
    pub fn signature(&self) -> String {
        let mut parts: Vec<String> = self
            .params
            .iter()
            .map(|p| match &p.kind {
                ParamKind::Int => format!("{}>={}", p.name, p.lo),
                ParamKind::Rational { .. } => format!("{}:rational", p.name),
                ParamKind::List { len_src, .. } => format!("{}[{}]>={}", p.name, len_src, p.lo),
            })
            .collect();
        if let Some(FreeVar { name, derive: Some((p, _)) }) = &self.free {
            parts.push(format!("free {name} -> {p}"));
        }
        parts.join(", ")
    }

    pub fn identity(&self) -> String {
        let terms: Vec<String> = self
            .terms
            .iter()
            .map(|t| match &t.each {
                Some((v, _, _)) => format!("sum_{v} {}", t.src),
                None => t.src.clone(),
            })
            .collect();
        format!("({})/({}) = {}", self.num_src, self.den_src, terms.join(" + "))
    }

    pub fn class_template(&self) -> String {
        match &self.free {
            None => "-".to_string(),
            Some(f) => format!("n({}) = {}", f.name, self.den_src),
        }
    }

    fn prepare(&self, p: &ParamBinding) -> Result<Prepared> {
        let mut env = Env::new();
        for spec in &self.params {
            let v = p.get(&spec.name).ok_or_else(|| Error::Domain(format!("{}: missing parameter {}", self.id, spec.name)))?;
            match (&spec.kind, v) {
                (ParamKind::Int, Val::Num(r)) => {
                    if !r.is_integer() {
                        return Ok(Prepared::Violated(format!("{} must be an integer", spec.name)));
                    }
                    if r < &Rational::from_integer(spec.lo.into()) {
                        return Ok(Prepared::Violated(format!("{} >= {}", spec.name, spec.lo)));
                    }
                }
                (ParamKind::Rational { .. }, Val::Num(r)) => {
                    if r < &Rational::from_integer(spec.lo.into()) {
                        return Ok(Prepared::Violated(format!("{} >= {}", spec.name, spec.lo)));
                    }
                }
                (ParamKind::List { .. }, Val::List(_)) => {}
                _ => return Err(Error::Domain(format!("{}: parameter {} has the wrong kind", self.id, spec.name))),
            }
            if !matches!(spec.kind, ParamKind::List { .. }) {
                env.set(&spec.name, v.clone());
            }
        }
        for spec in &self.params {
            if let ParamKind::List { len, len_src } = &spec.kind {
                let want = match expr::eval(len, &mut env).and_then(|v| v.num().cloned()) {
                    Ok(r) => r,
                    Err(e) => return Ok(Prepared::Violated(format!("len {}: {e}", spec.name))),
                };
                let Val::List(items) = &p[&spec.name] else { unreachable!() };
                if Rational::from_integer(items.len().into()) != want {
                    return Ok(Prepared::Violated(format!("len({}) == {len_src}", spec.name)));
                }
                let lo = Rational::from_integer(spec.lo.into());
                if items.iter().any(|x| !x.is_integer() || x < &lo) {
                    return Ok(Prepared::Violated(format!("{} entries are integers >= {}", spec.name, spec.lo)));
                }
                env.set(&spec.name, Val::List(items.clone()));
            }
        }
        for step in &self.steps {
            match step {
                Step::Let { name, expr, src } => match expr::eval(expr, &mut env) {
                    Ok(v) => env.set(name, v),
                    Err(e) => return Ok(Prepared::Violated(format!("{name} = {src}: {e}"))),
                },
                Step::Guard { desc, pred } => match expr::eval(pred, &mut env).and_then(|v| v.boolean()) {
                    Ok(true) => {}
                    Ok(false) => return Ok(Prepared::Violated(desc.clone())),
                    Err(e) => return Ok(Prepared::Violated(format!("{desc}: {e}"))),
                },
            }
        }
        Ok(Prepared::Ok(env))
    }

    pub fn check_domain(&self, p: &ParamBinding) -> Result<DomainReport> {
        Ok(match self.prepare(p)? {
            Prepared::Ok(_) => DomainReport { ok: true, violated: None },
            Prepared::Violated(v) => DomainReport { ok: false, violated: Some(v) },
        })
    }

    pub fn evaluate(&self, p: &ParamBinding) -> Result<DecompRecord> {
        let mut env = match self.prepare(p)? {
            Prepared::Ok(env) => env,
            Prepared::Violated(v) => return Err(Error::Domain(format!("{}: violated {v}", self.id))),
        };
        let bug = |msg: String| Error::IdentityViolation(format!("{}: {msg}", self.id));
        let num = expr::eval(&self.num, &mut env).and_then(|v| v.num().cloned()).map_err(|e| bug(e.to_string()))?;
        let den = expr::eval(&self.den, &mut env).and_then(|v| v.num().cloned()).map_err(|e| bug(e.to_string()))?;
        if !num.is_positive() || !den.is_positive() {
            return Err(bug(format!("target {num}/{den} is not positive")));
        }
        let target = &num / &den;
        let mut terms = Vec::new();
        for t in &self.terms {
            let mut one = |env: &mut Env| -> Result<()> {
                let s = expr::eval(&t.sign, env).and_then(|v| v.num().cloned()).map_err(|e| bug(e.to_string()))?;
                let d = expr::eval(&t.den, env).and_then(|v| v.num().cloned()).map_err(|e| bug(e.to_string()))?;
                let sign = if s.is_one() {
                    1
                } else if s == -Rational::one() {
                    -1
                } else {
                    return Err(bug(format!("term {} has sign {s}", t.src)));
                };
                if !d.is_integer() || !d.is_positive() {
                    return Err(bug(format!("denominator {} = {d} is not a positive integer", t.src)));
                }
                terms.push(UnitTerm { sign, den: d.to_integer() });
                Ok(())
            };
            match &t.each {
                None => one(&mut env)?,
                Some((var, lo, hi)) => {
                    let lo = expr::eval(lo, &mut env).and_then(|v| v.num().cloned()).map_err(|e| bug(e.to_string()))?;
                    let hi = expr::eval(hi, &mut env).and_then(|v| v.num().cloned()).map_err(|e| bug(e.to_string()))?;
                    let (lo, hi) = (lo.to_integer().to_i64().unwrap_or(0), hi.to_integer().to_i64().unwrap_or(-1));
                    for i in lo..=hi {
                        env.set(var, num_val(i));
                        let r = one(&mut env);
                        env.pop();
                        r?;
                    }
                }
            }
        }
        let params: BTreeMap<String, Val> =
            self.params.iter().map(|s| (s.name.clone(), p[&s.name].clone())).collect();
        let sum = UnitFractionSum::new(target, terms, Provenance::Family { id: self.id.clone(), params });
        let (k, n) = if num.is_integer() && den.is_integer() {
            (num.to_integer(), den.to_integer())
        } else {
            (sum.target.numer().clone(), sum.target.denom().clone())
        };
        DecompRecord::seal(k, n, sum).map_err(|e| bug(e.to_string()))
    }

    fn free_var(&self) -> Result<&FreeVar> {
        self.free
            .as_ref()
            .ok_or_else(|| Error::NotAProgression(format!("{} has no free variable", self.id)))
    }

    /// Completes a partial binding with the free variable set to `t`.
    pub fn bind_free(&self, partial: &ParamBinding, t: i64) -> Result<ParamBinding> {
        let fv = self.free_var()?;
        let mut p = partial.clone();
        match &fv.derive {
            None => {
                p.insert(fv.name.clone(), num_val(t));
            }
            Some((param, e)) => {
                let mut env = Env::new();
                for (k, v) in partial {
                    env.set(k, v.clone());
                }
                env.set(&fv.name, num_val(t));
                p.insert(param.clone(), expr::eval(e, &mut env)?);
            }
        }
        Ok(p)
    }

    fn free_lo(&self) -> i64 {
        match &self.free {
            Some(FreeVar { name, derive: None }) => {
                self.params.iter().find(|s| &s.name == name).map_or(1, |s| s.lo.max(0))
            }
            _ => 1,
        }
    }

    /// The progression of target denominators traced by the free variable.
    pub fn residue_signature(&self, partial: &ParamBinding) -> Result<ResidueClass> {
        self.progression_scan(partial, 2000).map(|(c, _)| c)
    }

    /// The class together with the first admissible free value, scanning at
    /// most `scan` values for it.
    pub fn progression_scan(&self, partial: &ParamBinding, scan: i64) -> Result<(ResidueClass, i64)> {
        let fv = self.free_var()?;
        if fv.derive.is_none() && partial.contains_key(&fv.name) {
            let mut p = partial.clone();
            p.remove(&fv.name);
            return self.progression_scan(&p, scan);
        }
        let lo = self.free_lo();
        let mut t0 = None;
        for t in lo..=lo + scan {
            if self.check_domain(&self.bind_free(partial, t)?)?.ok {
                t0 = Some(t);
                break;
            }
        }
        let t0 = t0.ok_or_else(|| Error::NotAProgression(format!("{}: no admissible {} in {lo}..{}", self.id, fv.name, lo + scan)))?;
        let mut ns = Vec::new();
        for t in t0..t0 + 3 {
            let rec = self
                .evaluate(&self.bind_free(partial, t)?)
                .map_err(|e| Error::NotAProgression(format!("{}: {} = {t}: {e}", self.id, fv.name)))?;
            ns.push(rec.n);
        }
        let m = &ns[1] - &ns[0];
        if &ns[2] - &ns[1] != m || !m.is_positive() {
            return Err(Error::NotAProgression(format!("{}: n is not increasing affinely in {}", self.id, fv.name)));
        }
        let g = &m * Integer::from(t0) - &ns[0];
        Ok((ResidueClass::new(m, g, t0), t0))
    }

    fn sample(&self, rng: &mut ChaCha8Rng) -> ParamBinding {
        let mut p = ParamBinding::new();
        let mut env = Env::new();
        for s in &self.params {
            let v = match &s.kind {
                ParamKind::Int => {
                    if let Some(v) = s.hint.and_then(|h| h(rng, &env)) {
                        env.set(&s.name, num_val(v));
                        p.insert(s.name.clone(), num_val(v));
                        continue;
                    }
                    let window = s.range.as_ref().and_then(|(a, b)| {
                        let a = expr::eval(a, &mut env).ok()?.num().ok()?.ceil().to_integer().to_i64()?;
                        let b = expr::eval(b, &mut env).ok()?.num().ok()?.floor().to_integer().to_i64()?;
                        (a <= b).then_some((a, b))
                    });
                    let (a, b) = window.unwrap_or((s.lo, s.hi));
                    num_val(rng.gen_range(a..=b))
                }
                ParamKind::Rational { den_hi } => {
                    let n = rng.gen_range(s.lo..=s.hi);
                    let d = rng.gen_range(1..=*den_hi);
                    Val::Num(Rational::new(n.into(), d.into()))
                }
                ParamKind::List { .. } => continue,
            };
            env.set(&s.name, v.clone());
            p.insert(s.name.clone(), v);
        }
        for s in &self.params {
            if let ParamKind::List { len, .. } = &s.kind {
                let n = expr::eval(len, &mut env)
                    .ok()
                    .and_then(|v| v.num().ok().and_then(|r| r.to_integer().to_i64()))
                    .unwrap_or(0)
                    .clamp(0, 64);
                let items: Vec<Rational> = (0..n).map(|_| Rational::from_integer(rng.gen_range(s.lo..=s.hi).into())).collect();
                p.insert(s.name.clone(), Val::List(Arc::new(items)));
            }
        }
        p
    }

    /// Every binding with all values in `lo..=grid_hi` (list entries likewise).
    pub fn grid(&self, grid_max: i64) -> Vec<ParamBinding> {
        let scalars: Vec<(&ParamSpec, Vec<Val>)> = self
            .params
            .iter()
            .filter(|s| !matches!(s.kind, ParamKind::List { .. }))
            .map(|s| {
                let hi = s.grid_hi.min(grid_max);
                let vals: Vec<Val> = match &s.kind {
                    ParamKind::Rational { den_hi } => (s.lo..=hi)
                        .flat_map(|n| (1..=*den_hi).map(move |d| Rational::new(n.into(), d.into())))
                        .collect::<std::collections::BTreeSet<_>>()
                        .into_iter()
                        .map(Val::Num)
                        .collect(),
                    _ => (s.lo..=hi).map(num_val).collect(),
                };
                (s, vals)
            })
            .collect();
        let mut out = Vec::new();
        let mut idx = vec![0usize; scalars.len()];
        if scalars.iter().any(|(_, v)| v.is_empty()) {
            return out;
        }
        loop {
            let mut p = ParamBinding::new();
            let mut env = Env::new();
            for (i, (s, vals)) in scalars.iter().enumerate() {
                p.insert(s.name.clone(), vals[idx[i]].clone());
                env.set(&s.name, vals[idx[i]].clone());
            }
            self.expand_lists(p, &mut env, grid_max, &mut out);
            let mut i = 0;
            loop {
                if i == idx.len() {
                    return out;
                }
                idx[i] += 1;
                if idx[i] < scalars[i].1.len() {
                    break;
                }
                idx[i] = 0;
                i += 1;
            }
        }
    }

    fn expand_lists(&self, base: ParamBinding, env: &mut Env, grid_max: i64, out: &mut Vec<ParamBinding>) {
        let mut acc = vec![base];
        for s in &self.params {
            let ParamKind::List { len, .. } = &s.kind else { continue };
            let n = match expr::eval(len, env).ok().and_then(|v| v.num().ok().and_then(|r| r.to_integer().to_i64())) {
                Some(n) if (0..=8).contains(&n) => n as usize,
                _ => return,
            };
            let hi = s.grid_hi.min(grid_max);
            let vals: Vec<i64> = (s.lo..=hi).collect();
            let mut lists: Vec<Vec<Rational>> = vec![Vec::new()];
            for _ in 0..n {
                lists = lists
                    .into_iter()
                    .flat_map(|l| {
                        vals.iter().map(move |&v| {
                            let mut l2 = l.clone();
                            l2.push(Rational::from_integer(v.into()));
                            l2
                        })
                    })
                    .collect();
            }
            acc = acc
                .into_iter()
                .flat_map(|p| {
                    lists.iter().map(move |l| {
                        let mut p2 = p.clone();
                        p2.insert(s.name.clone(), Val::List(Arc::new(l.clone())));
                        p2
                    })
                })
                .collect();
        }
        out.extend(acc);
    }
}

// ---------------------------------------------------------------------------
// public operations

pub fn evaluate(id: &str, p: &ParamBinding) -> Result<DecompRecord> {
    registry().get(id)?.evaluate(p)
}

pub fn check_domain(id: &str, p: &ParamBinding) -> Result<DomainReport> {
    registry().get(id)?.check_domain(p)
}

pub fn residue_signature(id: &str, p: &ParamBinding) -> Result<ResidueClass> {
    registry().get(id)?.residue_signature(p)
}

#[derive(Debug, Clone, Serialize)]
pub struct Failure {
    pub binding: BTreeMap<String, String>,
    pub error: String,
}

fn show(p: &ParamBinding) -> BTreeMap<String, String> {
    p.iter().map(|(k, v)| (k.clone(), v.to_string())).collect()
}

#[derive(Debug, Clone, Serialize)]
pub struct GridReport {
    pub grid_max: i64,
    pub points: u64,
    pub in_domain: u64,
    pub failures: Vec<Failure>,
}

#[derive(Debug, Clone, Serialize)]
pub struct VerifyReport {
    pub registry: &'static str,
    pub id: String,
    pub seed: u64,
    pub samples_requested: u64,
    pub samples_verified: u64,
    pub draws: u64,
    pub draw_cap_hit: bool,
    pub failures: Vec<Failure>,
    pub grid: Option<GridReport>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
            && !self.draw_cap_hit
            && self.grid.as_ref().map_or(true, |g| g.failures.is_empty())
    }
}

fn fnv(s: &str) -> u64 {
    s.bytes().fold(0xcbf2_9ce4_8422_2325u64, |h, b| (h ^ b as u64).wrapping_mul(0x0100_0000_01b3))
}

fn splitmix(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9e37_79b9_7f4a_7c15);
    x = (x ^ (x >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    x ^ (x >> 31)
}

/// Seed of draw `i` for family `id`: independent of scheduling.
pub fn draw_seed(seed: u64, id: &str, i: u64) -> u64 {
    splitmix(seed ^ fnv(id) ^ splitmix(i))
}

enum Outcome {
    Rejected,
    Verified,
    Failed(Failure),
}

fn try_binding(f: &FamilyDef, p: &ParamBinding) -> Outcome {
    match f.evaluate(p) {
        Ok(rec) if rec.verified() => Outcome::Verified,
        Ok(_) => Outcome::Failed(Failure { binding: show(p), error: "record not verified".into() }),
        Err(Error::Domain(_)) => Outcome::Rejected,
        Err(e) => Outcome::Failed(Failure { binding: show(p), error: e.to_string() }),
    }
}

/// Seeded rejection sampling of in-domain bindings, each evaluated and verified.
pub fn verify_samples(f: &FamilyDef, samples: u64, seed: u64) -> VerifyReport {
    const BATCH: u64 = 512;
    let mut verified = 0;
    let mut failures = Vec::new();
    let mut draws = 0;
    while verified + failures.len() as u64 <= samples.saturating_sub(1) && draws < DRAW_CAP {
        let hi = (draws + BATCH).min(DRAW_CAP);
        let outcomes = par::map_range(draws, hi - 1, |i| {
            let mut rng = ChaCha8Rng::seed_from_u64(draw_seed(seed, &f.id, i));
            try_binding(f, &f.sample(&mut rng))
        });
        for o in outcomes {
            draws += 1;
            match o {
                Outcome::Rejected => {}
                Outcome::Verified => verified += 1,
                Outcome::Failed(x) => failures.push(x),
            }
            if verified + failures.len() as u64 >= samples {
                break;
            }
        }
    }
    VerifyReport {
        registry: REGISTRY_VERSION,
        id: f.id.clone(),
        seed,
        samples_requested: samples,
        samples_verified: verified,
        draws,
        draw_cap_hit: verified + (failures.len() as u64) < samples,
        failures,
        grid: None,
    }
}

pub fn grid_sweep(f: &FamilyDef, grid_max: i64) -> GridReport {
    let pts = f.grid(grid_max);
    let points = pts.len() as u64;
    let outcomes = par::map(pts, |p| try_binding(f, &p));
    let mut in_domain = 0;
    let mut failures = Vec::new();
    for o in outcomes {
        match o {
            Outcome::Rejected => {}
            Outcome::Verified => in_domain += 1,
            Outcome::Failed(x) => {
                in_domain += 1;
                failures.push(x)
            }
        }
    }
    GridReport { grid_max, points, in_domain, failures }
}

/// Sampling plus the exhaustive small grid for one family id.
pub fn verify_identity(id: &str, samples: u64, seed: u64) -> Result<VerifyReport> {
    let f = registry().get(id)?;
    let mut r = verify_samples(f, samples, seed);
    r.grid = Some(grid_sweep(f, GRID_MAX));
    Ok(r)
}
