use pencil_core::dispersion::{line_branches, PencilParams};
use pencil_core::verify::{
    assemble, assemble_for_modes, count_eigs_contour, refine_eig, smallest_singular_value,
    ContourSpec,
};
use pencil_core::Complex64;

fn closed_form(k: usize) -> Complex64 {
    Complex64::from_polar(
        2f64.cbrt() * ((2 * k + 1) as f64).powf(2.0 / 3.0),
        2.0 * std::f64::consts::PI / 3.0,
    )
}

/// Contour counts against dispersion roots for every (a0, q0) pair.
#[test]
fn contour_count_matches_dispersion_roots() {
    for a0 in [0.0, 3.0] {
        for q0 in [0.0, 1.0] {
            let params = PencilParams::new(1, a0, q0).unwrap();
            let roots: Vec<Complex64> = (0..=10)
                .flat_map(|k| line_branches(&params, k, (2 * k + 1) as f64).unwrap())
                .map(|b| b.lambda)
                .collect();
            // top edge halfway between the k = 4 and k = 5 roots
            let top = 0.5 * (roots[4].im + roots[5].im);
            let c = ContourSpec::new(-14.0, -0.05, 0.3, top).unwrap();
            let expected = roots.iter().filter(|z| c.contains(**z)).count() as i64;
            assert_eq!(expected, 5, "a0={a0} q0={q0}");
            let grid = assemble_for_modes(&params, 6).unwrap();
            let got = count_eigs_contour(&grid, &c).unwrap();
            assert_eq!(got, expected, "a0={a0} q0={q0}");
        }
    }
}

#[test]
fn sigma_min_is_minimal_at_the_eigenvalue() {
    let params = PencilParams::new(1, 0.0, 0.0).unwrap();
    let grid = assemble(&params, 6.0, 1999).unwrap();
    let r = refine_eig(&grid, closed_form(1), 1e-12).unwrap();
    let dir = Complex64::new(0.6, 0.8);
    let samples: Vec<f64> = [-0.2, -0.1, 0.0, 0.1, 0.2]
        .iter()
        .map(|t| smallest_singular_value(&grid, r.lambda + dir * *t).unwrap().value)
        .collect();
    let centre = samples[2];
    assert!(samples.iter().enumerate().all(|(i, s)| i == 2 || *s > centre), "{samples:?}");
}

#[test]
fn refined_eigenvalues_converge_like_h_squared() {
    let params = PencilParams::new(1, 0.0, 0.0).unwrap();
    let mut last: Option<Complex64> = None;
    let mut changes = vec![];
    for points in [399, 799, 1599] {
        let grid = assemble(&params, 6.0, points).unwrap();
        let l = refine_eig(&grid, closed_form(0), 1e-13).unwrap().lambda;
        if let Some(prev) = last {
            changes.push((l - prev).norm());
        }
        last = Some(l);
    }
    let ratio = changes[0] / changes[1];
    assert!((3.5..4.5).contains(&ratio), "{changes:?}");
    // the fine-grid value is within its own grid error of the closed form
    assert!((last.unwrap() - closed_form(0)).norm() < 2.0 * changes[1]);
}

#[test]
fn asymptotic_seed_refines_to_closed_form() {
    let params = PencilParams::new(1, 0.0, 0.0).unwrap();
    let grid = assemble_for_modes(&params, 2).unwrap();
    let seed = pencil_core::dispersion::asymptotic_lambda(1, 0.0, 1.0).unwrap();
    let r = refine_eig(&grid, seed, 1e-12).unwrap();
    assert!((r.lambda - closed_form(0)).norm() < 1e-4, "{r:?}");
}

#[test]
fn quartic_damping_root_is_near_singular() {
    let params = PencilParams::new(2, 0.0, 0.0).unwrap();
    let mu0 = pencil_core::oscillator::anharmonic_eigenvalues(2, 0, 1e-8).unwrap().values[0];
    let root = line_branches(&params, 0, mu0).unwrap()[0].lambda;
    let grid = assemble(&params, 8.0, 1999).unwrap();
    let at = smallest_singular_value(&grid, root).unwrap().value;
    let off = smallest_singular_value(&grid, root + 0.5).unwrap().value;
    assert!(at < 1e-4 * pencil_core::verify::sigma_scale(root), "{at}");
    assert!(off > 10.0 * at);
}
