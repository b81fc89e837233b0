use pencil_core::{
    convergence::{lambda_branch, verify_exactness},
    dispersion::{EigenvalueBranch, PencilParams, StripParams},
    export::{
        expand_conjugates, figure_strip, figure_x2, line_spectrum, strip_spectrum, ExportPoint,
        FigureData, MuSource,
    },
    oscillator::{anharmonic_eigenvalues, dirichlet_interval_eigenvalues},
    quasimodes::{amplitude, cone_sequence, probe_sequence, Coefficient},
    verify::{
        assemble, assemble_for_modes, count_eigs_contour, refine_eig, sigma_scale,
        smallest_singular_value, ContourSpec, REFINE_TOLERANCE,
    },
    Complex64,
};
use serde::Serialize;

use crate::args::{Cli, Command, Figure, MuArg};
use crate::output::{emit, emit_with_summary, float, Table};
use crate::CliError;

pub fn run(cli: &Cli) -> Result<(), CliError> {
    match &cli.command {
        Command::SpectrumLine {
            n,
            a0,
            q0,
            k_max,
            mu,
            mu_tol,
            verify,
            ..
        } => {
            let params = PencilParams::new(*n, *a0, *q0)?;
            let source = match mu {
                MuArg::Exact => MuSource::Exact,
                MuArg::Numeric => MuSource::Numeric { tol: *mu_tol },
            };
            let branches = line_spectrum(&params, *k_max, source, *verify)?;
            print_branches(&branches);
            spectrum_out(cli, &branches, false)
        }
        Command::SpectrumStrip {
            ell,
            a0,
            q0,
            j_max,
            k_max,
            verify,
            ..
        } => {
            let params = StripParams::new(*ell, *a0, *q0)?;
            let branches = strip_spectrum(&params, *j_max, *k_max, *verify)?;
            print_branches(&branches);
            spectrum_out(cli, &branches, true)
        }
        Command::Oscillator {
            n,
            k_max,
            tol,
            interval_ell,
            ..
        } => {
            let spectrum = match interval_ell {
                Some(ell) => dirichlet_interval_eigenvalues(*ell, *k_max)?,
                None => anharmonic_eigenvalues(*n, *k_max, *tol)?,
            };
            for (k, (mu, err)) in spectrum.values.iter().zip(&spectrum.error_bounds).enumerate() {
                say!("k={k} mu={mu:.15} bound={err:.2e}");
            }
            let table = Table {
                header: vec!["k", "mu", "error_bound"],
                rows: spectrum
                    .values
                    .iter()
                    .zip(&spectrum.error_bounds)
                    .enumerate()
                    .map(|(k, (mu, e))| vec![k.to_string(), float(*mu), float(*e)])
                    .collect(),
            };
            #[derive(Serialize)]
            struct Summary<'a> {
                converged: bool,
                source: &'a pencil_core::oscillator::SpectrumSource,
            }
            let summary = Summary {
                converged: spectrum.converged,
                source: &spectrum.source,
            };
            done(emit_with_summary(cli, &table, &spectrum, &summary)?)
        }
        Command::Converge {
            k,
            a0,
            q0,
            n_list,
            tol,
            window,
            ..
        } => {
            let table = lambda_branch(n_list, *k, *a0, *q0, *tol)?;
            let report = verify_exactness(&table, *window);
            for r in &table.rows {
                say!(
                    "n={} lambda={} error={:.6e} status={:?}",
                    r.n,
                    complex(r.lambda),
                    r.error,
                    r.status
                );
            }
            say!("verdict={}", report.verdict);
            let csv = Table {
                header: vec![
                    "n",
                    "oscillator_index",
                    "mu",
                    "re_lambda",
                    "im_lambda",
                    "error",
                    "status",
                ],
                rows: table
                    .rows
                    .iter()
                    .map(|r| {
                        vec![
                            r.n.to_string(),
                            r.oscillator_index.to_string(),
                            float(r.mu),
                            float(r.lambda.re),
                            float(r.lambda.im),
                            float(r.error),
                            serde_json::to_value(r.status)
                                .ok()
                                .and_then(|v| v.as_str().map(str::to_string))
                                .unwrap_or_default(),
                        ]
                    })
                    .collect(),
            };
            #[derive(Serialize)]
            struct Out<'a> {
                table: &'a pencil_core::convergence::ConvergenceTable,
                report: &'a pencil_core::convergence::ExactnessReport,
            }
            #[derive(Serialize)]
            struct Summary<'a> {
                limit: &'a pencil_core::dispersion::LimitEigenvalue,
                matching_radius: f64,
                report: &'a pencil_core::convergence::ExactnessReport,
            }
            let data = Out {
                table: &table,
                report: &report,
            };
            let summary = Summary {
                limit: &table.limit,
                matching_radius: table.matching_radius,
                report: &report,
            };
            done(emit_with_summary(cli, &csv, &data, &summary)?)
        }
        Command::Essential {
            lambda,
            damping,
            a0,
            potential,
            m,
            ..
        } => essential(cli, *lambda, damping, *a0, potential, m),
        Command::Verify {
            n,
            a0,
            q0,
            lambda,
            k_max,
            half_width,
            points,
            contour,
            quad_points,
            ..
        } => {
            let params = PencilParams::new(*n, *a0, *q0)?;
            let grid = match (half_width, points) {
                (Some(l), Some(p)) => assemble(&params, *l, *p)?,
                _ => assemble_for_modes(&params, *k_max)?,
            };
            let seeds: Vec<Complex64> = if lambda.is_empty() {
                line_spectrum(&params, *k_max, MuSource::default(), false)?
                    .iter()
                    .map(|b| b.lambda)
                    .collect()
            } else {
                lambda
                    .iter()
                    .map(|s| parse_complex(s))
                    .collect::<Result<_, _>>()?
            };
            let mut rows = vec![];
            for seed in seeds {
                let sigma = smallest_singular_value(&grid, seed)?;
                let (refined, residual, iterations, status) =
                    match refine_eig(&grid, seed, REFINE_TOLERANCE) {
                        Ok(r) => (Some(r.lambda), Some(r.residual), Some(r.iterations), "converged"),
                        Err(e @ pencil_core::Error::OutOfBasin { .. })
                        | Err(e @ pencil_core::Error::RefineNoConvergence { .. }) => {
                            (None, None, None, e.tag())
                        }
                        Err(e) => return Err(e.into()),
                    };
                let row = VerifyRow {
                    seed,
                    sigma_min: sigma.value,
                    sigma_scale: sigma_scale(seed),
                    exact_singular: sigma.exact_singular,
                    refined,
                    residual,
                    iterations,
                    status,
                };
                say!(
                    "seed={} sigma_min={:.3e} refined={} status={}",
                    complex(seed),
                    row.sigma_min,
                    refined.map(complex).unwrap_or_else(|| "-".into()),
                    status
                );
                rows.push(row);
            }
            let count = match contour {
                Some(s) => {
                    let b = parse_list::<4>(s, "contour")?;
                    let spec = ContourSpec::with_points(b[0], b[1], b[2], b[3], *quad_points)?;
                    let c = count_eigs_contour(&grid, &spec)?;
                    say!("contour_count={c}");
                    Some(c)
                }
                None => None,
            };
            let table = Table {
                header: vec![
                    "re_seed",
                    "im_seed",
                    "sigma_min",
                    "sigma_scale",
                    "re_refined",
                    "im_refined",
                    "residual",
                    "iterations",
                    "status",
                ],
                rows: rows
                    .iter()
                    .map(|r| {
                        vec![
                            float(r.seed.re),
                            float(r.seed.im),
                            float(r.sigma_min),
                            float(r.sigma_scale),
                            r.refined.map(|z| float(z.re)).unwrap_or_default(),
                            r.refined.map(|z| float(z.im)).unwrap_or_default(),
                            r.residual.map(float).unwrap_or_default(),
                            r.iterations.map(|i| i.to_string()).unwrap_or_default(),
                            r.status.to_string(),
                        ]
                    })
                    .collect(),
            };
            #[derive(Serialize)]
            struct Out<'a> {
                grid: &'a pencil_core::verify::GridDescriptor,
                candidates: &'a [VerifyRow],
                contour_count: Option<i64>,
            }
            #[derive(Serialize)]
            struct Summary<'a> {
                grid: &'a pencil_core::verify::GridDescriptor,
                contour_count: Option<i64>,
            }
            let data = Out {
                grid: &grid.grid,
                candidates: &rows,
                contour_count: count,
            };
            let summary = Summary {
                grid: &grid.grid,
                contour_count: count,
            };
            done(emit_with_summary(cli, &table, &data, &summary)?)
        }
        Command::Figure {
            which,
            k_max,
            j_max,
            ell,
            a0,
            re_cut,
            verify,
            ..
        } => {
            let fig = match which {
                Figure::FigX2 => figure_x2(k_max.unwrap_or(12), *re_cut, *verify)?,
                Figure::FigStrip => figure_strip(
                    &StripParams::new(*ell, *a0, 0.0)?,
                    *j_max,
                    k_max.unwrap_or(4),
                    *re_cut,
                    *verify,
                )?,
            };
            for s in &fig.series {
                say!("series {} points={}", s.label, s.points.len());
            }
            done(emit(cli, &figure_table(&fig), &fig)?)
        }
    }
}

#[derive(Serialize)]
struct VerifyRow {
    seed: Complex64,
    sigma_min: f64,
    sigma_scale: f64,
    exact_singular: bool,
    refined: Option<Complex64>,
    residual: Option<f64>,
    iterations: Option<usize>,
    status: &'static str,
}

fn done(path: std::path::PathBuf) -> Result<(), CliError> {
    say!("wrote {}", path.display());
    Ok(())
}

fn complex(z: Complex64) -> String {
    format!("{:.16}{:+.16}i", z.re, z.im)
}

fn print_branches(branches: &[EigenvalueBranch]) {
    for b in branches {
        let j = match b.params {
            pencil_core::dispersion::BranchParams::Strip { j, .. } => format!("j={j} "),
            _ => String::new(),
        };
        say!(
            "{j}k={} lambda={} residual={:.1e} verified={}",
            b.k,
            complex(b.lambda),
            b.residual,
            b.verified
        );
    }
}

fn point_row(p: &ExportPoint, with_j: bool) -> Vec<String> {
    let mut row = vec![];
    if with_j {
        row.push(p.j.map(|j| j.to_string()).unwrap_or_default());
    }
    row.extend([
        p.branch_index.to_string(),
        float(p.re_lambda),
        float(p.im_lambda),
        float(p.mu),
        float(p.residual),
        p.verified.to_string(),
    ]);
    row
}

const SPECTRUM_HEADER: [&str; 6] = [
    "branch_index",
    "re_lambda",
    "im_lambda",
    "mu",
    "residual",
    "verified",
];

fn spectrum_out(cli: &Cli, branches: &[EigenvalueBranch], strip: bool) -> Result<(), CliError> {
    let points = expand_conjugates(branches);
    let mut header = vec![];
    if strip {
        header.push("j");
    }
    header.extend(SPECTRUM_HEADER);
    let table = Table {
        header,
        rows: points.iter().map(|p| point_row(p, strip)).collect(),
    };
    #[derive(Serialize)]
    struct Out<'a> {
        eigenvalues: &'a [ExportPoint],
        branches: &'a [EigenvalueBranch],
    }
    let data = Out {
        eigenvalues: &points,
        branches,
    };
    done(emit(cli, &table, &data)?)
}

fn figure_table(fig: &FigureData) -> Table {
    let mut header = vec!["series", "j"];
    header.extend(SPECTRUM_HEADER);
    let mut rows: Vec<Vec<String>> = fig
        .series
        .iter()
        .flat_map(|s| {
            s.points.iter().map(|p| {
                let mut row = vec![s.label.clone()];
                row.extend(point_row(p, true));
                row
            })
        })
        .collect();
    for (re, im) in [fig.essential_segment.start, fig.essential_segment.end] {
        rows.push(vec![
            "essential".to_string(),
            String::new(),
            String::new(),
            float(re),
            float(im),
            String::new(),
            String::new(),
            String::new(),
        ]);
    }
    Table { header, rows }
}

fn parse_list<const N: usize>(s: &str, what: &str) -> Result<[f64; N], CliError> {
    let parts: Vec<f64> = s
        .split(',')
        .map(|p| p.trim().parse::<f64>())
        .collect::<Result<_, _>>()
        .map_err(|e| CliError::Parameter(format!("--{what} {s:?}: {e}")))?;
    parts
        .try_into()
        .map_err(|_| CliError::Parameter(format!("--{what} needs {N} comma-separated numbers")))
}

fn parse_complex(s: &str) -> Result<Complex64, CliError> {
    let [re, im] = parse_list::<2>(s, "lambda")?;
    Ok(Complex64::new(re, im))
}

/// `x2`, `x4`, ... → exponent `n`.
fn parse_damping(s: &str) -> Result<u32, CliError> {
    let bad = || CliError::Parameter(format!("--damping must look like x2, x4, ...; got {s:?}"));
    let e: u32 = s.strip_prefix('x').ok_or_else(bad)?.parse().map_err(|_| bad())?;
    if e == 0 || e % 2 == 1 {
        return Err(bad());
    }
    Ok(e / 2)
}

fn parse_potential(s: &str) -> Result<Coefficient, CliError> {
    if let Some(scale) = s.strip_prefix("lorentzian:") {
        let scale = scale
            .parse()
            .map_err(|_| CliError::Parameter(format!("bad lorentzian scale in {s:?}")))?;
        return Ok(Coefficient::Lorentzian { scale });
    }
    let c: f64 = s
        .parse()
        .map_err(|_| CliError::Parameter(format!("--potential must be a number or lorentzian:<scale>, got {s:?}")))?;
    Ok(Coefficient::constant(c))
}

fn essential(
    cli: &Cli,
    lambda: f64,
    damping: &str,
    a0: f64,
    potential: &str,
    ms: &[u32],
) -> Result<(), CliError> {
    let n = parse_damping(damping)?;
    let q = parse_potential(potential)?;
    if ms.windows(2).any(|w| w[0] >= w[1]) || ms.is_empty() {
        return Err(CliError::Parameter("--m must be strictly ascending".into()));
    }
    #[derive(Serialize)]
    struct Row {
        lambda: f64,
        m: u32,
        rho: f64,
        support: (f64, f64),
        points: usize,
        ratio: f64,
        route: &'static str,
        envelope_ratio: Option<f64>,
    }
    let rows: Vec<Row> = if lambda == 0.0 {
        ms.iter()
            .map(|&m| {
                let qm = cone_sequence(&q, m)?;
                Ok(Row {
                    lambda,
                    m,
                    rho: qm.rho,
                    support: (qm.left, qm.right()),
                    points: qm.values.len(),
                    ratio: qm.residual_ratio,
                    route: "cone",
                    envelope_ratio: None,
                })
            })
            .collect::<Result<_, pencil_core::Error>>()?
    } else {
        let amp = amplitude(lambda, &Coefficient::damping(n, a0), &q)?;
        probe_sequence(&amp, ms)?
            .into_iter()
            .map(|r| Row {
                lambda,
                m: r.m,
                rho: r.rho,
                support: r.support,
                points: r.points,
                ratio: r.ratio,
                route: match r.route {
                    pencil_core::quasimodes::RatioRoute::Grid => "grid",
                    pencil_core::quasimodes::RatioRoute::Envelope => "envelope",
                },
                envelope_ratio: Some(r.envelope_ratio),
            })
            .collect()
    };
    for r in &rows {
        say!("m={} rho={:.6e} ratio={:.6e} route={}", r.m, r.rho, r.ratio, r.route);
    }
    let table = Table {
        header: vec![
            "lambda",
            "m",
            "rho",
            "support_left",
            "support_right",
            "points",
            "ratio",
            "route",
            "envelope_ratio",
        ],
        rows: rows
            .iter()
            .map(|r| {
                vec![
                    float(r.lambda),
                    r.m.to_string(),
                    float(r.rho),
                    float(r.support.0),
                    float(r.support.1),
                    r.points.to_string(),
                    float(r.ratio),
                    r.route.to_string(),
                    r.envelope_ratio.map(float).unwrap_or_default(),
                ]
            })
            .collect(),
    };
    done(emit(cli, &table, &rows)?)
}
