use pencil_core::dispersion::{implied_mu, line_branches, line_char_poly, PencilParams};
use pencil_core::poly::roots_all;
use pencil_core::Complex64;
use proptest::prelude::*;

/// Expand `Π (λ - r_i)` back into coefficients.
fn from_roots(roots: &[Complex64]) -> Vec<Complex64> {
    let mut c = vec![Complex64::new(1.0, 0.0)];
    for r in roots {
        let mut next = vec![Complex64::new(0.0, 0.0); c.len() + 1];
        for (i, ci) in c.iter().enumerate() {
            next[i + 1] += ci;
            next[i] -= ci * r;
        }
        c = next;
    }
    c
}

proptest! {
    #[test]
    fn roots_reconstruct_line_polynomial(
        n in 1u32..4, a0 in 0.0f64..4.0, q0 in 0.0f64..2.0, mu in 0.5f64..30.0
    ) {
        let params = PencilParams::new(n, a0, q0).unwrap();
        let p = line_char_poly(&params, mu).unwrap();
        let rs = roots_all(&p).unwrap();
        let rebuilt = from_roots(&rs.roots);
        // compare against the root-modulus scale of each coefficient
        let r = rs.roots.iter().map(|z| z.norm()).fold(1.0, f64::max);
        for (i, (a, b)) in p.coefficients().iter().zip(&rebuilt).enumerate() {
            let scale = r.powi((p.degree() - i) as i32) * 2f64.powi(p.degree() as i32);
            prop_assert!((a - b).norm() <= 1e-9 * scale, "i={} {} vs {}", i, a, b);
        }
    }

    #[test]
    fn physical_roots_respect_enclosures(
        n in 1u32..4, a0 in 0.0f64..4.0, q0 in 0.0f64..2.0, mu in 0.5f64..30.0
    ) {
        let params = PencilParams::new(n, a0, q0).unwrap();
        for b in line_branches(&params, 0, mu).unwrap() {
            prop_assert!(b.lambda.im > 0.0);
            prop_assert!(b.lambda.re <= -a0);
            prop_assert!(b.lambda.norm_sqr() >= q0);
        }
    }
}

#[test]
fn spurious_root_is_off_the_principal_sheet() {
    // n = 3, a0 = q0 = 0: λ⁸ = 2λμ⁴, so λ⁷ = 2μ⁴ with seven roots on a circle;
    // only arg λ = 4π/7 solves the principal-branch relation
    let params = PencilParams::new(3, 0.0, 0.0).unwrap();
    let b = line_branches(&params, 0, 1.0).unwrap();
    assert_eq!(b.len(), 2);
    let on: Vec<_> = b.iter().filter(|x| x.principal_sheet).collect();
    assert_eq!(on.len(), 1);
    let arg = on[0].lambda.arg();
    assert!((arg - 4.0 * std::f64::consts::PI / 7.0).abs() < 1e-10);
    let off = b.iter().find(|x| !x.principal_sheet).unwrap();
    assert!((off.lambda.arg().to_degrees() - 154.29).abs() < 0.01);
    assert!((implied_mu(&params, off.lambda) - 1.0).norm() > 0.1);
}
