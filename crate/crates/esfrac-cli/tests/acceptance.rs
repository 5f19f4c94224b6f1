//! One PASS/FAIL line per acceptance criterion. A criterion may only fail on
//! sub-checks listed in `UNATTAINABLE`, which are errors in the printed source
//! data; any other failure fails the test.

use std::collections::BTreeMap;
use std::process::Command;
use std::time::{Duration, Instant};

use esfrac::arith::{factor_u64, Integer};
use esfrac::cascade::{decompose, Strategy};
use esfrac::coverage::{check_int_witness, check_rat_witness, integer_size_reachable, rational_size_reachable};
use esfrac::egyptian::{count_two, solve_three_naive, solve_three_raw, solve_two};
use esfrac::families::{binding, evaluate, registry, verify_identity};
use esfrac::lcmfn::{run_suite, SuiteConfig};
use esfrac::par;
use esfrac::tables::{brvs_primes, search_brvs_many, BrvsCaps, BrvsRow, PRINTED_120A1, PRINTED_4A1};

/// Sub-checks that cannot pass because the printed value is arithmetically false.
const UNATTAINABLE: [(&str, &str); 3] = [
    ("4/13 printed triple (18,18,468)", "1/468 + 1/18 + 1/18 = 53/468, not 4/13"),
    ("printed row w=353 (1,5,53,21)", "(4b-1)s - r = 58 does not divide rvs = 5565"),
    ("printed row w=2161 (24,188,273,43)", "(4b-1)s - r = 3897 does not divide rvs = 2206932"),
];

struct Criterion {
    failures: Vec<String>,
    notes: Vec<String>,
}

impl Criterion {
    fn new() -> Self {
        Criterion { failures: Vec::new(), notes: Vec::new() }
    }
    fn check(&mut self, name: impl Into<String>, ok: bool) {
        if !ok {
            self.failures.push(name.into());
        }
    }
    fn note(&mut self, s: impl Into<String>) {
        self.notes.push(s.into());
    }
    fn budget(&mut self, t: Instant, limit: Duration) {
        let e = t.elapsed();
        self.note(format!("{:.1}s", e.as_secs_f64()));
        self.check(format!("runtime {:.1}s over {}s", e.as_secs_f64(), limit.as_secs()), e <= limit);
    }
}

fn cli(args: &[&str]) -> (i32, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_esfrac")).args(args).output().expect("run esfrac");
    (out.status.code().unwrap_or(-1), String::from_utf8_lossy(&out.stdout).into_owned())
}

fn sorted_dens(id: &str, p: &[(&str, i64)]) -> Option<Vec<Integer>> {
    let rec = evaluate(id, &binding(p)).ok()?;
    rec.verified().then(|| {
        let mut d = rec.sum.dens();
        d.sort();
        d
    })
}

fn ints(xs: &[u64]) -> Vec<Integer> {
    xs.iter().map(|&x| Integer::from(x)).collect()
}

fn c1_soundness() -> Criterion {
    let mut c = Criterion::new();
    let t = Instant::now();
    for f in &registry().families {
        match verify_identity(&f.id, 1000, 0) {
            Ok(r) => c.check(format!("{} sampling or grid", f.id), r.passed()),
            Err(e) => c.check(format!("{}: {e}", f.id), false),
        }
    }
    c.note(format!("{} families", registry().families.len()));
    c.budget(t, Duration::from_secs(60));
    c
}

fn c2_cascade() -> Criterion {
    let mut c = Criterion::new();
    let t = Instant::now();
    let mut oracle = 0;
    par::sequential(|| {
        for n in 2..=100_000u64 {
            match decompose(4, n, &Strategy::Cascade, false) {
                Ok(r) if r[0].verified() && r[0].sum.terms.len() == 3 => oracle += u64::from(r[0].family() == "oracle"),
                _ => c.check(format!("n={n}"), false),
            }
        }
    });
    c.note(format!("oracle fallback for {oracle} values"));
    c.budget(t, Duration::from_secs(300));
    let (code, out) = cli(&["decompose", "--k", "4", "--n", "5569", "--strategy", "cascade"]);
    c.check("cli decompose 4/5569", code == 0 && out.starts_with("4/5569 "));
    c
}

fn c3_regressions() -> Criterion {
    let mut c = Criterion::new();
    let f13 = [("k", 4), ("n", 5569), ("d", 1), ("z", 1), ("v", 71), ("al", 282)];
    c.check("4/5569 {1410,111380,15704580}", sorted_dens("F13", &f13) == Some(ints(&[1410, 111380, 15704580])));
    let f13b = [("k", 4), ("n", 5569), ("d", 3), ("z", 2), ("v", 7), ("al", 41)];
    c.check("4/5569 {1394,1136076,46579116}", sorted_dens("F13", &f13b) == Some(ints(&[1394, 1136076, 46579116])));
    let all7 = solve_three_raw(4, 7, true);
    for t in [(2, 28, 28), (4, 4, 14), (2, 21, 42), (3, 6, 14), (2, 16, 112), (2, 18, 63), (2, 15, 210)] {
        c.check(format!("4/7 {t:?}"), all7.contains(&t));
    }
    let all19 = solve_three_raw(4, 19, true);
    let printed19 = [
        (5, 190, 190),
        (10, 10, 95),
        (5, 114, 570),
        (5, 100, 1900),
        (5, 120, 456),
        (5, 96, 9120),
        (6, 38, 57),
        (6, 24, 456),
        (8, 12, 456),
        (6, 30, 95),
        (6, 23, 2622),
    ];
    for t in printed19 {
        c.check(format!("4/19 {t:?}"), all19.contains(&t));
    }
    let all13 = solve_three_raw(4, 13, true);
    c.check("4/13 printed triple (5,10,130)", all13.contains(&(5, 10, 130)));
    c.check("4/13 printed triple (4,20,130)", all13.contains(&(4, 20, 130)));
    c.check("4/13 printed triple (18,18,468)", all13.contains(&(18, 18, 468)));
    let f45 = |u: i64| [("a", u), ("z", 1), ("j", 0), ("t", 450)];
    c.check("4/1801 {451,295364,3249004}", sorted_dens("F45", &f45(4)) == Some(ints(&[451, 295364, 3249004])));
    c.check("4/1801 {451,277354,11371514}", sorted_dens("F45", &f45(14)) == Some(ints(&[451, 277354, 11371514])));
    c
}

fn c4_tables() -> Criterion {
    let mut c = Criterion::new();
    let t = Instant::now();
    for &[w, b, r, v, s] in PRINTED_4A1.iter().chain(PRINTED_120A1.iter()) {
        c.check(format!("printed row w={w} ({b},{r},{v},{s})"), BrvsRow::new(w, b, r, v, s).verified);
    }
    c.note(format!("{} + {} printed rows", PRINTED_4A1.len(), PRINTED_120A1.len()));
    let ws = brvs_primes(false, 25_000);
    match search_brvs_many(&ws, BrvsCaps::default()) {
        Ok(found) => {
            for (w, f) in ws.iter().zip(&found) {
                c.check(format!("search w={w}"), f.row().is_some_and(|r| r.verified));
            }
        }
        Err(e) => c.check(format!("search: {e}"), false),
    }
    c.note(format!("{} primes searched, b<=64, s<=10^4", ws.len()));
    c.budget(t, Duration::from_secs(120));
    c
}

fn c5_reach() -> Criterion {
    let mut c = Criterion::new();
    let t = Instant::now();
    for n in [3, 7, 31, 127, 409, 5569] {
        c.check(format!("integer none for {n}"), integer_size_reachable(n, 4).is_none());
    }
    c.check("integer witness for 3049", integer_size_reachable(3049, 4).is_some_and(|w| check_int_witness(3049, 4, &w)));
    let mut found = 0;
    for n in (3..=200).step_by(4) {
        if let Some(w) = integer_size_reachable(n, 4) {
            found += 1;
            c.check(format!("integer witness for {n}"), check_int_witness(n, 4, &w));
        }
    }
    c.note(format!("{found} of 50 values n = 3 mod 4 below 200 reachable"));
    for n in [7, 409, 5569, 3049] {
        let w = rational_size_reachable(n, 4, n.div_ceil(2));
        c.check(format!("rational witness for {n}"), w.is_some_and(|w| check_rat_witness(n, 4, &w)));
    }
    c.budget(t, Duration::from_secs(120));
    c
}

fn c6_coverage() -> Criterion {
    let mut c = Criterion::new();
    let t = Instant::now();
    let status = |out: &str, form: &str| -> Option<String> {
        out.lines().find_map(|l| {
            let mut it = l.split('\t');
            (it.next() == Some(form)).then(|| it.next().unwrap_or("").to_string())
        })
    };
    let (code, out) = cli(&["cover", "--mod", "8"]);
    c.check("cover --mod 8 exit", code == 0);
    for form in ["8t-1", "8t-3", "8t-5"] {
        c.check(format!("{form} covered"), status(&out, form).as_deref() == Some("covered"));
    }
    c.check("8t-7 uncovered", status(&out, "8t-7").as_deref() == Some("uncovered"));
    let (code, out) = cli(&["cover", "--mod", "120"]);
    c.check("cover --mod 120 exit", code == 0);
    c.check("120t-71 uncovered", status(&out, "120t-71").as_deref() == Some("uncovered"));
    let unc: Vec<&str> = out.lines().filter(|l| l.ends_with("\tuncovered")).map(|l| l.split('\t').next().unwrap()).collect();
    c.note(format!("mod 120 uncovered: {}", unc.join(", ")));
    c.budget(t, Duration::from_secs(120));
    c
}

fn c7_lcmfn() -> Criterion {
    let mut c = Criterion::new();
    let t = Instant::now();
    let rep = run_suite(&SuiteConfig::default());
    for s in &rep.sections {
        if s.gated {
            c.check(format!("{} ({} mismatches)", s.name, s.failures), s.failures == 0);
        } else if s.failures > 0 {
            c.note(format!("finding {}: {}/{}", s.name, s.failures, s.checked));
        }
    }
    let (code, out) = cli(&["lcmfn", "q", "--a", "12", "--b", "4"]);
    c.check("cli lcmfn q 12 4", code == 0 && out.trim() == "Q=3 SQ=21 MQ=216");
    c.budget(t, Duration::from_secs(180));
    c
}

fn c8_two_terms() -> Criterion {
    let mut c = Criterion::new();
    for n in 1..=2000u64 {
        let want = factor_u64(n).iter().map(|&(_, e)| 2 * e as u64 + 1).product::<u64>().div_ceil(2);
        let counted = count_two(&Integer::from(n)).ok() == Some(Integer::from(want));
        let listed = solve_two(&esfrac::arith::ratio(1, n as i64)).map(|v| v.len() as u64).ok() == Some(want);
        c.check(format!("n={n}"), counted && listed);
    }
    c
}

fn multiset(v: Vec<(u128, u128, u128)>) -> BTreeMap<(u128, u128, u128), usize> {
    let mut m = BTreeMap::new();
    for t in v {
        *m.entry(t).or_insert(0) += 1;
    }
    m
}

fn c9_three_terms() -> Criterion {
    let mut c = Criterion::new();
    for n in 2..=500u128 {
        c.check(format!("4/{n}"), multiset(solve_three_raw(4, n, true)) == multiset(solve_three_naive(4, n)));
    }
    for k in 1..=3u128 {
        for n in (1..=200u128).filter(|&n| k <= 3 * n) {
            c.check(format!("{k}/{n}"), multiset(solve_three_raw(k, n, true)) == multiset(solve_three_naive(k, n)));
        }
    }
    c
}

#[test]
fn acceptance() {
    let criteria: [(&str, fn() -> Criterion); 9] = [
        ("identity soundness sweep", c1_soundness),
        ("cascade totality to 10^5", c2_cascade),
        ("worked example regressions", c3_regressions),
        ("table verification and search", c4_tables),
        ("reachability classification", c5_reach),
        ("coverage reports", c6_coverage),
        ("lcm-function suite", c7_lcmfn),
        ("two-term counts", c8_two_terms),
        ("three-term solver vs naive oracle", c9_three_terms),
    ];
    let mut unexpected = Vec::new();
    for (i, (name, run)) in criteria.iter().enumerate() {
        let c = run();
        let verdict = if c.failures.is_empty() { "PASS" } else { "FAIL" };
        let mut detail = c.notes.join("; ");
        for f in &c.failures {
            match UNATTAINABLE.iter().find(|(k, _)| k == f) {
                Some((_, why)) => detail.push_str(&format!("; unattainable: {f}: {why}")),
                None => {
                    detail.push_str(&format!("; failed: {f}"));
                    unexpected.push(format!("{}: {f}", i + 1));
                }
            }
        }
        println!("criterion {} {verdict} {name} [{}]", i + 1, detail.trim_start_matches("; "));
    }
    assert!(unexpected.is_empty(), "unexpected failures: {unexpected:?}");
}
