use pencil_core::convergence::{lambda_branch, verify_exactness, MatchStatus, DEFAULT_N};
use std::f64::consts::PI;

#[test]
fn first_branch_approaches_half_pi() {
    let t = lambda_branch(&DEFAULT_N, 1, 0.0, 0.0, 1e-8).unwrap();
    let report = verify_exactness(&t, 3);
    assert!(report.verdict);
    for r in &t.rows {
        assert_eq!(r.oscillator_index, 0);
        let gap = r.lambda.arg() - PI / 2.0;
        assert!((gap - PI / (2.0 * (2 * r.n + 1) as f64)).abs() < 1e-6, "n={}", r.n);
    }
    assert_eq!(t.rows.last().unwrap().status, MatchStatus::Matched);
}

#[test]
fn convergence_is_not_uniform_in_k() {
    let n = [1, 2, 3];
    let e1 = lambda_branch(&n, 1, 0.0, 0.0, 1e-8).unwrap();
    let e4 = lambda_branch(&n, 4, 0.0, 0.0, 1e-8).unwrap();
    for (a, b) in e1.rows.iter().zip(&e4.rows) {
        assert!(b.error > a.error, "n={}: {} vs {}", a.n, b.error, a.error);
    }
}

#[test]
fn real_pair_limit_uses_real_axis_distance() {
    let t = lambda_branch(&DEFAULT_N, 1, 3.0, 0.0, 1e-8).unwrap();
    assert!(t.limit.is_real_pair());
    for r in &t.rows {
        assert!(r.lambda.re <= -3.0 && r.lambda.im > 0.0);
    }
    let minus = -3.0 - (9.0 - PI * PI / 4.0).sqrt();
    let last = t.rows.last().unwrap();
    assert!((last.lambda - pencil_core::Complex64::new(minus, 0.0)).norm() == last.error);
    assert!(verify_exactness(&t, 3).verdict);
}
