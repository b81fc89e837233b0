use pencil_core::dispersion::PencilParams;
use pencil_core::quasimodes::{
    amplitude, build_quasimode, cone_sequence, envelope_residual_ratio, probe_sequence,
    Coefficient, EssentialProbe, RatioRoute, DEFAULT_M,
};
use pencil_core::verify::assemble_window;
use pencil_core::Complex64;

fn strictly_decreasing(v: &[f64]) -> bool {
    v.windows(2).all(|w| w[1] < w[0])
}

#[test]
fn ratios_decrease_for_quadratic_damping() {
    for lambda in [-0.1, -1.0, -5.0] {
        let amp = amplitude(lambda, &Coefficient::damping(1, 0.0), &Coefficient::zero()).unwrap();
        let reports = probe_sequence(&amp, &DEFAULT_M).unwrap();
        let ratios: Vec<f64> = reports.iter().map(|r| r.ratio).collect();
        assert!(reports.iter().all(|r| r.route == RatioRoute::Grid));
        assert!(strictly_decreasing(&ratios), "λ={lambda}: {ratios:?}");
        for r in &reports {
            // grid and continuum agree to the stencil accuracy the grid was sized for
            assert!((r.ratio - r.envelope_ratio).abs() < 0.03 * r.envelope_ratio, "{r:?}");
        }
    }
}

#[test]
fn ratios_decrease_for_quartic_damping() {
    for lambda in [-0.1, -1.0, -5.0] {
        let amp = amplitude(lambda, &Coefficient::damping(2, 0.0), &Coefficient::zero()).unwrap();
        let reports = probe_sequence(&amp, &DEFAULT_M).unwrap();
        let ratios: Vec<f64> = reports.iter().map(|r| r.ratio).collect();
        assert!(strictly_decreasing(&ratios), "λ={lambda}: {ratios:?}");
    }
}

#[test]
fn pencil_residual_matches_ratio() {
    // B ≡ 0, so T(λ)φ = (-Δ - A)φ row by row
    let lambda = -1.0;
    let amp = amplitude(lambda, &Coefficient::damping(1, 0.0), &Coefficient::zero()).unwrap();
    let probe = EssentialProbe::new(amp, 10).unwrap();
    let qm = build_quasimode(&probe).unwrap();
    let n = qm.values.len();
    let pencil = assemble_window(
        &PencilParams::new(1, 0.0, 0.0).unwrap(),
        qm.left,
        qm.right(),
        n - 2,
    )
    .unwrap();
    let interior = &qm.values[1..n - 1];
    let t = pencil.apply(Complex64::new(lambda, 0.0), interior);
    let residual = (t.iter().map(|z| z.norm_sqr()).sum::<f64>() * qm.step).sqrt();
    let ratio = residual / qm.gradient_norm();
    let h2 = qm.step * qm.step;
    assert!(ratio <= qm.residual_ratio * (1.0 + 1e-9) + h2, "{ratio} vs {}", qm.residual_ratio);
}

#[test]
fn support_drifts_right() {
    let amp = amplitude(-1.0, &Coefficient::damping(1, 0.0), &Coefficient::zero()).unwrap();
    let mids: Vec<f64> = DEFAULT_M
        .iter()
        .map(|&m| {
            let p = EssentialProbe::new(amp.clone(), m).unwrap();
            let (l, r) = p.support();
            assert!((l - m as f64 * p.rho.powf(-0.5)).abs() < 1e-9 * l);
            0.5 * (l + r)
        })
        .collect();
    assert!(mids.windows(2).all(|w| w[1] > 1.9 * w[0]), "{mids:?}");
}

#[test]
fn cone_sequence_decays_like_inverse_sqrt() {
    let ratios: Vec<f64> = DEFAULT_M
        .iter()
        .map(|&m| cone_sequence(&Coefficient::zero(), m).unwrap().residual_ratio)
        .collect();
    let xs: Vec<f64> = DEFAULT_M.iter().map(|&m| (m as f64).ln()).collect();
    let ys: Vec<f64> = ratios.iter().map(|r| r.ln()).collect();
    let slope = least_squares_slope(&xs, &ys);
    assert!((slope + 0.5).abs() < 0.15, "slope {slope}, {ratios:?}");
}

#[test]
fn cone_sequence_with_decaying_potential() {
    let q = Coefficient::Lorentzian { scale: 1.0 };
    let r5 = cone_sequence(&q, 5).unwrap().residual_ratio;
    let r20 = cone_sequence(&q, 20).unwrap().residual_ratio;
    assert!(r20 < r5, "{r5} {r20}");
}

#[test]
fn envelope_ratio_tracks_rho() {
    // leading term 2‖f'‖/‖f‖ = 2ρ^{1/2}‖𝜑'‖/‖𝜑‖
    let amp = amplitude(-1.0, &Coefficient::damping(1, 0.0), &Coefficient::zero()).unwrap();
    for m in [80u32, 640] {
        let p = EssentialProbe::new(amp.clone(), m).unwrap();
        let scaled = envelope_residual_ratio(&p) / p.rho.sqrt();
        assert!((8.0..11.0).contains(&scaled), "m={m}: {scaled}");
    }
}

fn least_squares_slope(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    sxy / sxx
}

#[test]
fn small_ratio_needs_very_large_m() {
    // ratio ≈ 2ρ^{1/2}‖𝜑'‖/‖𝜑‖ with ρ ≈ 2/m, so 0.05 is crossed near m ≈ 7·10⁴
    let amp = amplitude(-0.1, &Coefficient::damping(1, 0.0), &Coefficient::zero()).unwrap();
    let at = |m| envelope_residual_ratio(&EssentialProbe::new(amp.clone(), m).unwrap());
    assert!(at(80) > 1.0);
    assert!(at(1 << 17) < 0.05, "{}", at(1 << 17));
}
