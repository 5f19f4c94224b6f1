use std::time::Instant;

use esfrac::arith::Integer;
use esfrac::coverage::*;
use esfrac::egyptian::{parse_param, solve_three_raw};
use esfrac::families::{binding, registry, residue_signature};
use proptest::prelude::*;

fn ids(xs: &[&str]) -> Vec<String> {
    xs.iter().map(|s| s.to_string()).collect()
}

fn class(m: i64, g: i64) -> ResidueClass {
    ResidueClass::new(Integer::from(m), Integer::from(g), 1)
}

fn forms(cs: &[ResidueClass]) -> Vec<String> {
    cs.iter().map(|c| c.to_string()).collect()
}

#[test]
fn split_examples() {
    assert_eq!(forms(&class(2, 1).split(2)), ["4t-1", "4t-3"]);
    assert_eq!(forms(&class(24, 23).split(5)), ["120t-23", "120t-47", "120t-71", "120t-95", "120t-119"]);
    let s = forms(&class(120, 119).split(11));
    assert_eq!((s.len(), s[0].as_str(), s[10].as_str()), (11, "1320t-119", "1320t-1319"));
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 64, failure_persistence: None, ..ProptestConfig::default() })]
    #[test]
    fn split_partitions(m in 1i64..40, g in 0i64..40, t0 in 1i64..5, f in 2u64..9) {
        let c = ResidueClass::new(Integer::from(m), Integer::from(g), t0);
        let parts = c.split(f);
        for n in 1..=2_000i64 {
            let n = Integer::from(n);
            let hits = parts.iter().filter(|p| p.contains(&n)).count();
            prop_assert_eq!(hits, usize::from(c.contains(&n)), "n={}", n);
        }
    }
}

#[test]
fn signatures_from_the_catalog() {
    let sig = |id: &str, p: &[(&str, i64)]| residue_signature(id, &binding(p)).unwrap().to_string();
    assert_eq!(sig("F33", &[("om", 1)]), "8t-3");
    assert_eq!(sig("F34", &[("om", 1)]), "16t-13");
    assert_eq!(sig("F41", &[("k", 4), ("r", 1)]), "12t-7");
    assert_eq!(sig("F31", &[("k", 4)]), "4t-1");
}

#[test]
fn mod8_with_f32_and_default_registry() {
    let cfg = CoverConfig::default();
    let r = covers(&ids(&["F32"]), 8, &cfg).unwrap();
    for res in [7, 5, 3] {
        assert!(r.status(res).covered(), "{}", r.status(res).form);
    }
    assert!(!r.status(1).covered());
    let t = Instant::now();
    let r = covers(&all_families(), 8, &cfg).unwrap();
    println!("mod 8 default registry: uncovered {:?} in {:?}", r.uncovered(), t.elapsed());
    assert!(r.status(3).covered() && r.status(5).covered() && r.status(7).covered());
    assert!(!r.status(1).covered());
}

#[test]
fn mod120_leaves_120t_minus_71() {
    let t = Instant::now();
    let r = covers(&all_families(), 120, &CoverConfig::default()).unwrap();
    println!("mod 120 default registry: uncovered {:?} in {:?}", r.uncovered(), t.elapsed());
    assert_eq!(r.status(49).form, "120t-71");
    assert!(!r.status(49).covered());
}

#[test]
fn f31_at_k4_covers_exactly_3_mod_4() {
    let r = covers(&ids(&["F31"]), 4, &CoverConfig::default()).unwrap();
    assert_eq!(r.uncovered(), vec![0, 1, 2]);
    assert!(covers(&[], 4, &CoverConfig::default()).unwrap().uncovered().len() == 4);
    assert!(covers(&ids(&["F31"]), 1, &CoverConfig::default()).is_err());
}

#[test]
fn mordell_statuses() {
    let cfg = CoverConfig::default();
    let empty = mordell_check(&[], false, &cfg).unwrap();
    assert!(empty.residues.iter().all(|(_, c)| c.is_empty()));
    assert_eq!(empty.residues.iter().map(|r| r.0).collect::<Vec<_>>(), MORDELL_SQUARES);
    let all = mordell_check(&all_families(), false, &cfg).unwrap();
    assert_eq!(all.residues.len(), 6);
}

#[test]
fn covered_residues_are_sound() {
    let r = covers(&ids(&["F32", "F31", "F49", "F50"]), 24, &CoverConfig::default()).unwrap();
    assert!(r.residues.iter().any(|s| s.covered()));
    for st in r.residues.iter().filter(|s| s.covered()) {
        for w in &st.witnesses {
            let f = registry().get(&w.family).unwrap();
            let p = w.binding.iter().map(|(k, v)| (k.clone(), parse_param(v).unwrap())).collect();
            let (c, t0) = f.progression_scan(&p, 200).unwrap();
            for i in 0..100 {
                let rec = f.evaluate(&f.bind_free(&p, t0 + i).unwrap()).unwrap();
                assert_eq!(rec.k, Integer::from(4));
                assert_eq!(Integer::from(24) % &c.m, Integer::from(0));
                assert_eq!(&rec.n % &c.m, Integer::from(st.residue) % &c.m, "{} {:?}", w.family, w.binding);
                assert!(c.contains(&rec.n));
            }
        }
    }
}

#[test]
fn integer_reachability() {
    for n in [3, 7, 31, 127, 409, 5569] {
        assert_eq!(integer_size_reachable(n, 4), None, "n={n}");
    }
    let w = integer_size_reachable(3049, 4).unwrap();
    assert!(check_int_witness(3049, 4, &w));
    for n in (3..=1000).step_by(8) {
        if let Some(w) = integer_size_reachable(n, 4) {
            assert!(check_int_witness(n, 4, &w));
        }
    }
}

/// Every (c, d) with c <= d <= bound, straight from the equation.
fn int_oracle(n: u64, k: u64) -> bool {
    let b = n + 2;
    (1..=b).any(|c| (c..=b).any(|d| (n + c + d) % (k * esfrac::arith::lcm_u64(c, d)) == 0))
}

#[test]
fn integer_reachability_matches_unbounded_oracle() {
    for n in 1..=300 {
        assert_eq!(integer_size_reachable(n, 4).is_some(), int_oracle(n, 4), "n={n}");
        assert_eq!(integer_size_reachable(n, 3).is_some(), int_oracle(n, 3), "n={n}");
    }
}

#[test]
fn rational_reachability() {
    assert_eq!(rational_size_reachable(7, 4, 10), Some(RatWitness { e: 1, u: 1, f: 2, t: 2 }));
    for (n, b) in [(409, 20), (5569, 200), (3049, 100)] {
        let w = rational_size_reachable(n, 4, b).unwrap();
        assert!(check_rat_witness(n, 4, &w), "n={n}");
        let dens = rational_witness_dens(n, &w).unwrap();
        let total: esfrac::arith::Rational =
            dens.iter().map(|d| esfrac::arith::Rational::new(1.into(), d.clone())).sum();
        assert_eq!(total, esfrac::arith::ratio(4, n as i64), "n={n}");
    }
    assert!(check_rat_witness(409, 4, &RatWitness { e: 1, u: 13, f: 2, t: 8 }));
    assert!(check_rat_witness(5569, 4, &RatWitness { e: 1, u: 141, f: 2, t: 10 }));
}

#[test]
fn rational_reach_against_three_term_oracle() {
    let mut gaps = Vec::new();
    for n in 2..=500u64 {
        let has_three = !solve_three_raw(4, n as u128, false).is_empty();
        let has_rat = rational_size_reachable(n, 4, n).is_some();
        if has_three != has_rat {
            gaps.push(n);
        }
    }
    println!("rational reach differs from the oracle at {gaps:?}");
}

#[test]
fn multiple_chain() {
    for t in 1..=50i64 {
        assert_eq!(3 * (8 * t - 5), 24 * t - 15);
        assert_eq!(5 * (24 * t - 19), 120 * t - 95);
        assert_eq!(11 * (120 * t - 109), 1320 * t - 1199);
    }
}
