use esfrac::families::{registry, verify_identity};

#[test]
fn every_family_verifies_on_samples_and_grid() {
    let mut bad = Vec::new();
    for f in &registry().families {
        let t = std::time::Instant::now();
        let r = verify_identity(&f.id, 1000, 0).unwrap();
        let g = r.grid.as_ref().unwrap();
        println!(
            "{:5} verified {:4} draws {:6} grid {:7}/{:7} failures {} {} {:?}",
            f.id, r.samples_verified, r.draws, g.in_domain, g.points, r.failures.len(), g.failures.len(), t.elapsed()
        );
        if !r.passed() {
            bad.push((f.id.clone(), r.failures.first().cloned(), g.failures.first().cloned()));
        }
    }
    assert!(bad.is_empty(), "{bad:#?}");
}
