use esfrac::lcmfn::{run_suite, SuiteConfig};

#[test]
fn suite_gates_pass_and_findings_are_reported() {
    let r = run_suite(&SuiteConfig::default());
    for s in &r.sections {
        println!("{:32} gated={:5} checked={:6} failures={}", s.name, s.gated, s.checked, s.failures);
        if let Some(e) = s.examples.first() {
            println!("    e.g. {} {}: {} vs {}", e.name, e.input, e.lhs, e.rhs);
        }
    }
    assert!(r.passed());
    assert_eq!(r.section("q_closed").unwrap().failures, 0);
    assert!(r.section("q_closed_printed_split").unwrap().failures > 0);
    assert!(r.section("restricted_sum_first_form").unwrap().failures > 0);
    assert!(r.section("mq_printed_general_b").unwrap().failures > 0);
    assert_eq!(r.section("multiplicativity_equal_factors").unwrap().failures, 59);
}
