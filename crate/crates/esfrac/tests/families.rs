use esfrac::arith::{ratio, Integer};
use esfrac::expr::Val;
use esfrac::families::*;
use esfrac::Error;
use proptest::prelude::*;

fn b(p: &[(&str, i64)]) -> ParamBinding {
    binding(p)
}

fn dens(id: &str, p: &ParamBinding) -> Vec<Integer> {
    evaluate(id, p).unwrap().sum.dens()
}

#[test]
fn registry_shape() {
    let ids = registry().ids();
    let mut sorted = ids.clone();
    sorted.sort();
    sorted.dedup();
    assert_eq!(sorted.len(), ids.len());
    for g in 1..=53 {
        let id = format!("F{g:02}");
        assert!(registry().select(&id).is_ok(), "{id}");
    }
    assert!(registry().get("F31").is_ok());
    assert!(matches!(registry().get("F32"), Err(Error::UnknownFamily(_))));
    assert!(matches!(registry().get("F99"), Err(Error::UnknownFamily(_))));
    assert_eq!(registry().select("F32").unwrap().len(), 6);
}

#[test]
fn domain_reports() {
    let r = check_domain("F02", &b(&[("k", 4), ("m", 3), ("v", 2), ("t", 2)])).unwrap();
    assert!(r.ok, "{r:?}");
    let r = check_domain("F51", &b(&[("r", 1), ("v", 1), ("s", 1), ("w", 3)])).unwrap();
    assert_eq!((r.ok, r.violated.as_deref()), (false, Some("divisor is zero")));
    assert!(check_domain("F51", &b(&[("r", 1), ("v", 1)])).is_err());
    let e = evaluate("F51", &b(&[("r", 1), ("v", 1), ("s", 1), ("w", 3)])).unwrap_err();
    assert!(e.to_string().contains("divisor is zero"));
    // z must lie in [6t+1, 12t] on the 24t+1 branch.
    let mut seen_out = false;
    let f = registry().get("F48e").unwrap();
    for p in f.grid(6) {
        let (Some(Val::Num(t)), Some(Val::Num(z))) = (p.get("t"), p.get("z")) else { continue };
        let (t, z) = (t.to_integer(), z.to_integer());
        if z < Integer::from(6) * &t + 1 || z > Integer::from(12) * &t {
            seen_out = true;
            assert!(!f.check_domain(&p).unwrap().ok);
        }
    }
    assert!(seen_out);
}

#[test]
fn lcm_triple_example() {
    let r = evaluate("F53a", &b(&[("a", 1), ("b", 1), ("c", 2), ("d", 1)])).unwrap();
    assert_eq!(r.sum.target, ratio(2, 1));
    let mut d = r.sum.dens();
    d.sort();
    assert_eq!(d, vec![Integer::from(1), Integer::from(2), Integer::from(2)]);
    assert!(!check_domain("F53a", &b(&[("a", 1), ("b", 2), ("c", 3), ("d", 1)])).unwrap().ok);
    assert!(matches!(residue_signature("F53a", &b(&[("a", 1)])), Err(Error::NotAProgression(_))));
}

#[test]
fn every_progression_matches_its_signature() {
    for f in &registry().families {
        let Some(fv) = &f.free else { continue };
        let drop = fv.derive.as_ref().map_or(fv.name.clone(), |(p, _)| p.clone());
        let mut tried = 0;
        for mut p in f.grid(4) {
            p.remove(&drop);
            let Ok((class, t0)) = f.progression_scan(&p, 200) else { continue };
            for i in 0..100 {
                let rec = f.evaluate(&f.bind_free(&p, t0 + i).unwrap());
                let rec = rec.unwrap_or_else(|e| panic!("{} {p:?} at {}: {e}", f.id, t0 + i));
                assert_eq!(rec.n, class.first() + &class.m * Integer::from(i), "{} {p:?}", f.id);
            }
            tried += 1;
            if tried == 3 {
                break;
            }
        }
        assert!(tried > 0, "{} has no progression on the grid", f.id);
    }
}

#[test]
fn q_form_lemma() {
    // q = 1, -1, -3, -5 (mod 8) select 8t-1, 24t-7, 8t-5, 24t-19.
    for t in 1..=100i64 {
        for (v, q) in [(8 * t - 1, 8 * t + 1), (24 * t - 7, 8 * t - 1), (8 * t - 5, 8 * t - 3), (24 * t - 19, 8 * t - 5)] {
            assert_eq!((q * v + 1) % 8, 0, "t={t}");
            if q > 1 {
                assert_eq!(((q * v + 1) / 4) % (q - 1), 0, "t={t} q={q}");
            }
        }
    }
}

#[test]
fn f42_at_half_integers_is_the_shift() {
    for t in 1..=60i64 {
        let x = Val::Num(ratio(2 * t - 1, 2));
        let p: ParamBinding = [("x".to_string(), x)].into_iter().collect();
        assert_eq!(dens("F42a", &p), dens("F42b", &b(&[("t", t)])), "t={t}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 256, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn schinzel_divisibility(k in 1i64..12, om in 1i64..30, t in 1i64..200) {
        prop_assume!(k * om > 2);
        let m = k * (k * om - 2) * t - (k * om - 1);
        prop_assume!(m > 0);
        let x = m * (k * om - 1) + 1;
        prop_assert_eq!(x % (k * (k * om - 2)), 0);
        prop_assert_eq!(x / (k * (k * om - 2)), (k * om - 1) * t - om);
    }

    #[test]
    fn key_equation_specialization(a in 1i64..400, bb in 1i64..12, r_pick in 0usize..64, s_pick in 0usize..8) {
        let p = (4 * bb - 1) * a + bb;
        let divs: Vec<i64> = (1..=p).filter(|d| p % d == 0).collect();
        let r = divs[r_pick % divs.len()];
        let ss: Vec<i64> = (1..=2000).filter(|&s| {
            let d = (4 * bb - 1) * s - r;
            d > 0 && (p * s) % d == 0
        }).collect();
        prop_assume!(!ss.is_empty());
        let s = ss[s_pick % ss.len()];
        let d = (4 * bb - 1) * s - r;
        let w = 4 * a + 1;
        let via52 = dens("F52", &b(&[("a", a), ("b", bb), ("r", r), ("s", s)]));
        let via51 = dens("F51", &b(&[("r", r), ("v", p / r), ("s", s), ("w", w)]));
        prop_assert_eq!(&via52, &via51);
        prop_assert_eq!(via51[2].clone(), Integer::from(p * s / d));
    }

    #[test]
    fn kb_minus_one(k in 1i64..20, bb in 2i64..500) {
        let r = evaluate("F31", &b(&[("k", k), ("b", bb)])).unwrap();
        prop_assert!(r.verified());
        prop_assert_eq!(r.sum.target, ratio(k, k * bb - 1));
    }
}

#[test]
fn sampling_is_reproducible() {
    let a = verify_identity("F22", 200, 7).unwrap();
    let b = verify_identity("F22", 200, 7).unwrap();
    assert_eq!(serde_json::to_string(&a).unwrap(), serde_json::to_string(&b).unwrap());
    assert!(a.passed());
    let c = esfrac::par::sequential(|| verify_identity("F22", 200, 7).unwrap());
    assert_eq!(serde_json::to_string(&a).unwrap(), serde_json::to_string(&c).unwrap());
}
