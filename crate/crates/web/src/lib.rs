//! wasm-bindgen bindings for the browser demo in `www/`.
//!
//! Each export returns a JSON string; errors become a thrown JS string. The
//! `*_json` functions hold the logic so they can be tested natively.

use pencil_core::dispersion::{PencilParams, StripParams};
use pencil_core::export::{
    expand_conjugates, line_spectrum, strip_spectrum, EssentialSegment, ExportPoint, MuSource,
};
use pencil_core::quasimodes::{amplitude, cone_sequence, probe_sequence, Coefficient};
use serde::Serialize;
use wasm_bindgen::prelude::*;

#[derive(Serialize)]
struct Spectrum {
    points: Vec<ExportPoint>,
    essential_segment: EssentialSegment,
}

#[derive(Serialize)]
struct RatioRow {
    m: u32,
    rho: f64,
    ratio: f64,
    route: &'static str,
}

fn to_json<T: Serialize>(value: &T) -> Result<String, String> {
    serde_json::to_string(value).map_err(|e| e.to_string())
}

fn segment(points: &[ExportPoint]) -> Result<EssentialSegment, String> {
    let re_min = points.iter().map(|p| p.re_lambda).fold(-1.0, f64::min);
    EssentialSegment::new((1.1 * re_min).floor()).map_err(|e| e.to_string())
}

pub fn line_spectrum_json(n: u32, a0: f64, q0: f64, k_max: usize) -> Result<String, String> {
    let params = PencilParams::new(n, a0, q0).map_err(|e| e.to_string())?;
    let branches = line_spectrum(&params, k_max, MuSource::default(), false)
        .map_err(|e| e.to_string())?;
    let points = expand_conjugates(&branches);
    let essential_segment = segment(&points)?;
    to_json(&Spectrum {
        points,
        essential_segment,
    })
}

pub fn strip_spectrum_json(
    ell: f64,
    a0: f64,
    q0: f64,
    j_max: u32,
    k_max: usize,
) -> Result<String, String> {
    let params = StripParams::new(ell, a0, q0).map_err(|e| e.to_string())?;
    let branches = strip_spectrum(&params, j_max, k_max, false).map_err(|e| e.to_string())?;
    let points = expand_conjugates(&branches);
    let essential_segment = segment(&points)?;
    to_json(&Spectrum {
        points,
        essential_segment,
    })
}

/// Residual ratios of the quasimode sequence for damping `x^{2n} + a0` at
/// `λ < 0`, or the cone sequence at `λ = 0`.
pub fn quasimode_ratios_json(lambda: f64, n: u32, a0: f64, ms: &[u32]) -> Result<String, String> {
    let rows: Vec<RatioRow> = if lambda == 0.0 {
        ms.iter()
            .map(|&m| {
                cone_sequence(&Coefficient::zero(), m).map(|q| RatioRow {
                    m,
                    rho: q.rho,
                    ratio: q.residual_ratio,
                    route: "cone",
                })
            })
            .collect::<Result<_, _>>()
            .map_err(|e| e.to_string())?
    } else {
        let amp = amplitude(lambda, &Coefficient::damping(n, a0), &Coefficient::zero())
            .map_err(|e| e.to_string())?;
        probe_sequence(&amp, ms)
            .map_err(|e| e.to_string())?
            .into_iter()
            .map(|r| RatioRow {
                m: r.m,
                rho: r.rho,
                ratio: r.ratio,
                route: match r.route {
                    pencil_core::quasimodes::RatioRoute::Grid => "grid",
                    pencil_core::quasimodes::RatioRoute::Envelope => "envelope",
                },
            })
            .collect()
    };
    to_json(&rows)
}

fn js(r: Result<String, String>) -> Result<String, JsValue> {
    r.map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen(js_name = lineSpectrum)]
pub fn line_spectrum_js(n: u32, a0: f64, q0: f64, k_max: usize) -> Result<String, JsValue> {
    js(line_spectrum_json(n, a0, q0, k_max))
}

#[wasm_bindgen(js_name = stripSpectrum)]
pub fn strip_spectrum_js(
    ell: f64,
    a0: f64,
    q0: f64,
    j_max: u32,
    k_max: usize,
) -> Result<String, JsValue> {
    js(strip_spectrum_json(ell, a0, q0, j_max, k_max))
}

#[wasm_bindgen(js_name = quasimodeRatios)]
pub fn quasimode_ratios_js(lambda: f64, n: u32, a0: f64, ms: Vec<u32>) -> Result<String, JsValue> {
    js(quasimode_ratios_json(lambda, n, a0, &ms))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn line_points_come_in_conjugate_pairs() {
        let v: serde_json::Value =
            serde_json::from_str(&line_spectrum_json(1, 0.0, 0.0, 3).unwrap()).unwrap();
        let pts = v["points"].as_array().unwrap();
        assert_eq!(pts.len(), 8);
        let re0 = pts[0]["re_lambda"].as_f64().unwrap();
        assert!((re0 + 0.629_960_5).abs() < 1e-6);
        assert_eq!(pts[0]["re_lambda"], pts[1]["re_lambda"]);
        assert!(v["essential_segment"]["start"][0].as_f64().unwrap() < re0);
    }

    #[test]
    fn strip_reports_every_j() {
        let v: serde_json::Value =
            serde_json::from_str(&strip_spectrum_json(1.0, 1.0, 0.0, 5, 0).unwrap()).unwrap();
        assert_eq!(v["points"].as_array().unwrap().len(), 10);
    }

    #[test]
    fn ratios_decrease() {
        let v: serde_json::Value =
            serde_json::from_str(&quasimode_ratios_json(-1.0, 1, 0.0, &[10, 20, 40]).unwrap())
                .unwrap();
        let r: Vec<f64> = v
            .as_array()
            .unwrap()
            .iter()
            .map(|x| x["ratio"].as_f64().unwrap())
            .collect();
        assert!(r[0] > r[1] && r[1] > r[2]);
        let cone: serde_json::Value =
            serde_json::from_str(&quasimode_ratios_json(0.0, 1, 0.0, &[10]).unwrap()).unwrap();
        assert_eq!(cone[0]["route"], "cone");
    }

    #[test]
    fn bad_parameters_are_errors() {
        assert!(line_spectrum_json(0, 0.0, 0.0, 3).is_err());
        assert!(quasimode_ratios_json(1.0, 1, 0.0, &[10]).is_err());
    }
}
