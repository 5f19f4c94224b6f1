use std::collections::BTreeMap;
use std::time::Instant;

use esfrac::cascade::{decompose, Strategy};

#[test]
fn cascade_total_to_1e5_single_threaded() {
    let t = Instant::now();
    let mut by_family: BTreeMap<String, u64> = BTreeMap::new();
    esfrac::par::sequential(|| {
        for n in 2..=100_000u64 {
            let r = decompose(4, n, &Strategy::Cascade, false).unwrap_or_else(|e| panic!("n={n}: {e}"));
            assert!(r[0].verified() && r[0].sum.terms.len() == 3, "n={n}");
            *by_family.entry(r[0].family().to_string()).or_default() += 1;
        }
    });
    println!("{by_family:?} in {:?}", t.elapsed());
}
