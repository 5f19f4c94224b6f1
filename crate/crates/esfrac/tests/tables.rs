use std::time::Instant;

use esfrac::arith::divisors_u64;
use esfrac::coverage::{check_int_witness, check_rat_witness};
use esfrac::egyptian::DecompRecord;
use esfrac::tables::*;

/// Lex-smallest (b, r, v, s) by direct enumeration of s.
fn brvs_oracle(w: u64, b_max: u64, s_max: u64) -> Option<(u64, u64, u64, u64)> {
    for b in 1..=b_max {
        let p = ((4 * b - 1) * w + 1) / 4;
        for r in divisors_u64(p) {
            for s in 1..=s_max {
                let d = (4 * b - 1) as i128 * s as i128 - r as i128;
                if d > 0 && (p as i128 * s as i128) % d == 0 {
                    return Some((b, r, p / r, s));
                }
            }
        }
    }
    None
}

#[test]
fn printed_rows_failing_arithmetic() {
    let bad: Vec<_> = printed_rows().into_iter().filter(|r| !r.verified).map(|r| (r.w, r.b, r.r, r.v, r.s)).collect();
    assert_eq!(bad, vec![(353, 1, 5, 53, 21), (2161, 24, 188, 273, 43)]);
    assert_eq!(PRINTED_4A1.len() + PRINTED_120A1.len(), 159);
}

#[test]
fn search_matches_oracle() {
    for w in brvs_primes(false, 3000) {
        let got = search_brvs(w, BrvsCaps { b_max: 8, s_max: 2000 }).unwrap();
        let got = got.row().map(|r| (r.b, r.r, r.v, r.s));
        assert_eq!(got, brvs_oracle(w, 8, 2000), "w={w}");
    }
}

#[test]
fn search_covers_all_primes_to_25000() {
    let t = Instant::now();
    let ws = brvs_primes(false, 25_000);
    let found = search_brvs_many(&ws, BrvsCaps::default()).unwrap();
    let missing: Vec<u64> = ws.iter().zip(&found).filter(|(_, f)| f.row().is_none()).map(|(w, _)| *w).collect();
    println!("{} primes, {} missing, {:?}", ws.len(), missing.len(), t.elapsed());
    assert!(missing.is_empty(), "{missing:?}");
    assert!(found.iter().all(|f| f.row().unwrap().verified));
}

#[test]
fn witness_rows() {
    for n in [409, 5569] {
        let r = search_integer_witness(n).unwrap();
        assert!(r.integer.is_none());
        let q = r.rational.expect("rational witness");
        assert!(check_rat_witness(n, 4, &q), "{q:?}");
    }
    let r = search_integer_witness(3049).unwrap();
    assert!(check_int_witness(3049, 4, &r.integer.unwrap()));
    assert!(search_integer_witness(1).is_err());
}

/// Smallest (c, a, b) over both forms by plain enumeration.
fn abc_oracle(m: u64, c_max: u64, b_max: u64) -> Option<(u64, u64, u64)> {
    for c in 1..=c_max {
        let lim = ((m + c) / 4).max((m * c + 1) / 4);
        for a in 1..lim {
            for b in 1..=b_max {
                let fa = (m + c) % 4 == 0 && {
                    let top = (m + c) as u128 * (a + b) as u128 * m as u128;
                    top % (4 * a * c) as u128 == 0 && top % (4 * b * c) as u128 == 0
                };
                let fb = (m * c + 1) % 4 == 0 && {
                    let top = (m * c + 1) as u128 * (a + b) as u128;
                    top % (4 * a * c) as u128 == 0 && top % (4 * b * c) as u128 == 0
                };
                if fa || fb {
                    return Some((c, a, b));
                }
            }
        }
    }
    None
}

#[test]
fn mod840_pin() {
    let rows = search_abc_mod840(841, 99, 10).unwrap();
    assert_eq!(rows.len(), 2);
    assert_eq!(rows[0].m, 1);
    let hit = rows[1].hit.clone().unwrap();
    assert_eq!((hit.c, hit.a, hit.b, hit.form), (3, 29, 1, "F17a"));
    assert_eq!(Some((hit.c, hit.a, hit.b)), abc_oracle(841, 99, 10));
    let rows2 = esfrac::par::sequential(|| search_abc_mod840(841, 99, 10).unwrap());
    assert_eq!(rows, rows2);
}

#[test]
fn json_round_trips() {
    let rows = vec![BrvsRow::new(5, 1, 1, 4, 1), BrvsRow::new(241, 6, 66, 21, 33)];
    let s = brvs_json(&rows).unwrap();
    let back: Vec<esfrac::egyptian::RecordJson> = serde_json::from_str(&s).unwrap();
    assert_eq!(back.len(), 2);
    for (j, row) in back.iter().zip(&rows) {
        let rec = DecompRecord::from_json(j).unwrap();
        assert_eq!(rec, row.record().unwrap());
    }
    let dir = std::env::temp_dir().join(format!("esfrac-tables-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let p = dir.join("t.csv");
    emit_table(&rows, Format::Csv, &p).unwrap();
    assert_eq!(std::fs::read_to_string(&p).unwrap(), "w,b,r,v,s\n5,1,1,4,1\n241,6,66,21,33\n");
    assert!(emit_table(&[BrvsRow::new(5, 1, 1, 4, 2)], Format::Csv, &p).is_err());
}
