use std::collections::BTreeMap;

use esfrac::arith::{factor_u64, Integer};
use esfrac::egyptian::{count_two, solve_three_naive, solve_three_raw, solve_two};
use esfrac::families::{binding, evaluate};
use proptest::prelude::*;

fn dens(id: &str, p: &[(&str, i64)]) -> Vec<Integer> {
    let rec = evaluate(id, &binding(p)).unwrap();
    assert!(rec.verified());
    let mut d = rec.sum.dens();
    d.sort();
    d
}

fn ints(xs: &[u64]) -> Vec<Integer> {
    xs.iter().map(|&x| Integer::from(x)).collect()
}

#[test]
fn distributive_5569() {
    let base = [("k", 4), ("n", 5569), ("d", 1), ("z", 1), ("v", 71), ("al", 282)];
    assert_eq!(dens("F13", &base), ints(&[1410, 111380, 15704580]));
    let other = [("k", 4), ("n", 5569), ("d", 3), ("z", 2), ("v", 7), ("al", 41)];
    assert_eq!(dens("F13", &other), ints(&[1394, 1136076, 46579116]));
}

#[test]
fn oracle_lists_for_7_and_19() {
    let all7 = solve_three_raw(4, 7, true);
    for t in [(2, 28, 28), (4, 4, 14), (2, 21, 42), (3, 6, 14), (2, 16, 112), (2, 18, 63), (2, 15, 210)] {
        assert!(all7.contains(&t), "{t:?}");
    }
    let all19 = solve_three_raw(4, 19, true);
    let printed = [
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
    for t in printed {
        assert!(all19.contains(&t), "{t:?}");
    }
}

#[test]
fn key_equation_13() {
    assert_eq!(dens("F51", &[("r", 1), ("v", 10), ("s", 1), ("w", 13)]), ints(&[5, 10, 130]));
    assert_eq!(dens("F51", &[("r", 1), ("v", 10), ("s", 2), ("w", 13)]), ints(&[4, 20, 130]));
    assert_eq!(dens("F51", &[("r", 2), ("v", 18), ("s", 1), ("w", 13)]), ints(&[4, 18, 468]));
    let all = solve_three_raw(4, 13, true);
    for t in [(5, 10, 130), (4, 20, 130), (4, 18, 468)] {
        assert!(all.contains(&t), "{t:?}");
    }
    // 1/468 + 1/18 + 1/18 = 53/468, so the third partition as printed is not 4/13.
    assert!(!all.contains(&(18, 18, 468)));
}

#[test]
fn modular_1801() {
    let p = |u: i64| [("a", u), ("z", 1), ("j", 0), ("t", 450)];
    assert_eq!(dens("F45", &p(4)), ints(&[451, 295364, 3249004]));
    assert_eq!(dens("F45", &p(14)), ints(&[451, 277354, 11371514]));
}

#[test]
fn catalog_examples() {
    assert_eq!(dens("F31", &[("k", 4), ("b", 2)]), ints(&[2, 16, 112]));
    assert_eq!(dens("F43", &[("n", 7)]), ints(&[2, 28, 28]));
}

fn tau_sq(n: u64) -> u64 {
    factor_u64(n).iter().map(|&(_, e)| 2 * e as u64 + 1).product()
}

#[test]
fn two_term_counts() {
    for n in 1..=2000u64 {
        let c = count_two(&Integer::from(n)).unwrap();
        let listed = solve_two(&esfrac::arith::ratio(1, n as i64)).unwrap();
        let want = tau_sq(n).div_ceil(2);
        assert_eq!(c, Integer::from(want), "n={n}");
        assert_eq!(listed.len() as u64, want, "n={n}");
    }
}

fn multiset(v: Vec<(u128, u128, u128)>) -> BTreeMap<(u128, u128, u128), usize> {
    let mut m = BTreeMap::new();
    for t in v {
        *m.entry(t).or_insert(0) += 1;
    }
    m
}

#[test]
fn three_term_matches_naive() {
    for n in 2..=500u128 {
        assert_eq!(multiset(solve_three_raw(4, n, true)), multiset(solve_three_naive(4, n)), "4/{n}");
    }
    for k in 1..=3u128 {
        for n in 1..=200u128 {
            if k <= 3 * n {
                assert_eq!(multiset(solve_three_raw(k, n, true)), multiset(solve_three_naive(k, n)), "{k}/{n}");
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 64, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn first_triple_is_smallest(n in 2u128..3000) {
        let first = solve_three_raw(4, n, false);
        let all = solve_three_raw(4, n, true);
        prop_assert_eq!(first.first(), all.iter().min());
    }

    #[test]
    fn every_triple_sums(n in 2u128..2000, k in 1u128..6) {
        prop_assume!(k <= 3 * n);
        for (x, y, z) in solve_three_raw(k, n, true) {
            prop_assert!(x <= y && y <= z);
            prop_assert_eq!(k * x * y * z, n * (y * z + x * z + x * y));
        }
    }
}
