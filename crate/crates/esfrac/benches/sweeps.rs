use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use esfrac::coverage::{integer_size_reachable, rational_size_reachable};
use esfrac::egyptian::solve_three_raw;
use esfrac::families::verify_identity;
use esfrac::lcmfn::{run_suite, SuiteConfig};
use esfrac::par;

fn both<R>(c: &mut Criterion, group: &str, f: impl Fn() -> R) {
    let mut g = c.benchmark_group(group);
    g.sample_size(10);
    g.bench_function(BenchmarkId::new("mode", "parallel"), |b| b.iter(&f));
    g.bench_function(BenchmarkId::new("mode", "sequential"), |b| b.iter(|| par::sequential(&f)));
    g.finish();
}

fn sweeps(c: &mut Criterion) {
    both(c, "verify_identity_F13", || verify_identity("F13", 500, 0).unwrap());
    both(c, "solve_three_all_4_over_9973", || solve_three_raw(4, 9973, true));
    both(c, "integer_reach_5569", || integer_size_reachable(5569, 4));
    both(c, "rational_reach_5569", || rational_size_reachable(5569, 4, 200));
    let small = SuiteConfig { q_max: 300, tau_max: 600, prime_max: 20, s_max: 100, k_max: 4, t_max: 10, restricted_max: 300, fermat_prime_max: 30, fermat_d_max: 10, p2_max: 300 };
    both(c, "lcmfn_suite_small", move || run_suite(&small));
}

criterion_group!(benches, sweeps);
criterion_main!(benches);
