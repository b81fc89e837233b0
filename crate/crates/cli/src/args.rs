use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

#[derive(Debug, Parser, Serialize)]
#[command(name = "pencil", version, about = "Spectra of the damped-wave operator pencil")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

impl Format {
    pub fn extension(self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Json => "json",
        }
    }
}

/// Where to write and in which format.
#[derive(Debug, Args, Serialize)]
pub struct Output {
    /// Output file; defaults to `<command>.<ext>` in $PENCIL_OUT_DIR (or the
    /// working directory).
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Csv, global = true)]
    pub format: Format,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum MuArg {
    /// μ_k = 2k+1 (n = 1 only)
    Exact,
    /// Grid eigenvalues of the anharmonic oscillator
    Numeric,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Figure {
    FigX2,
    FigStrip,
}

#[derive(Debug, Subcommand, Serialize)]
#[serde(tag = "command", rename_all = "kebab-case")]
pub enum Command {
    /// Non-real eigenvalues on the line with damping x^{2n} + a0.
    SpectrumLine {
        #[arg(long, default_value_t = 1)]
        n: u32,
        #[arg(long, default_value_t = 0.0)]
        a0: f64,
        #[arg(long, default_value_t = 0.0)]
        q0: f64,
        #[arg(long, default_value_t = 10)]
        k_max: usize,
        #[arg(long, value_enum, default_value_t = MuArg::Numeric)]
        mu: MuArg,
        #[arg(long, default_value_t = pencil_core::export::DEFAULT_MU_TOL)]
        mu_tol: f64,
        /// Confirm each root on the grid pencil.
        #[arg(long)]
        verify: bool,
        #[command(flatten)]
        output: Output,
    },
    /// Non-real eigenvalues on the strip R × (-ell, ell) with damping x² + a0.
    SpectrumStrip {
        #[arg(long, default_value_t = 1.0)]
        ell: f64,
        #[arg(long, default_value_t = 1.0)]
        a0: f64,
        #[arg(long, default_value_t = 0.0)]
        q0: f64,
        #[arg(long, default_value_t = 20)]
        j_max: u32,
        #[arg(long, default_value_t = 4)]
        k_max: usize,
        #[arg(long)]
        verify: bool,
        #[command(flatten)]
        output: Output,
    },
    /// Eigenvalues of -d²/dx² + x^{2n}, or of the Dirichlet interval (-ell, ell).
    Oscillator {
        #[arg(long, default_value_t = 1)]
        n: u32,
        #[arg(long, default_value_t = 10)]
        k_max: usize,
        #[arg(long, default_value_t = 1e-6)]
        tol: f64,
        /// Use the exact Dirichlet spectrum of (-ell, ell) instead.
        #[arg(long)]
        interval_ell: Option<f64>,
        #[command(flatten)]
        output: Output,
    },
    /// Branch k as the damping exponent n grows, against its n → ∞ limit.
    Converge {
        #[arg(long, default_value_t = 1)]
        k: usize,
        #[arg(long, default_value_t = 0.0)]
        a0: f64,
        #[arg(long, default_value_t = 0.0)]
        q0: f64,
        #[arg(long, value_delimiter = ',', default_values_t = pencil_core::convergence::DEFAULT_N)]
        n_list: Vec<u32>,
        #[arg(long, default_value_t = 1e-8)]
        tol: f64,
        /// Trailing rows checked by the exactness verdict.
        #[arg(long, default_value_t = 3)]
        window: usize,
        #[command(flatten)]
        output: Output,
    },
    /// Quasimode residual ratios for λ ∈ (-∞, 0].
    Essential {
        #[arg(long, allow_hyphen_values = true)]
        lambda: f64,
        /// Damping x^{2n} written as x2, x4, ...
        #[arg(long, default_value = "x2")]
        damping: String,
        /// Constant added to the damping.
        #[arg(long, default_value_t = 0.0)]
        a0: f64,
        /// Potential: a constant (`0`, `1.5`) or `lorentzian:<scale>` for scale/(1+x²).
        #[arg(long, default_value = "0")]
        potential: String,
        #[arg(long, value_delimiter = ',', default_values_t = pencil_core::quasimodes::DEFAULT_M)]
        m: Vec<u32>,
        #[command(flatten)]
        output: Output,
    },
    /// Check candidate eigenvalues on the grid pencil.
    Verify {
        #[arg(long, default_value_t = 1)]
        n: u32,
        #[arg(long, default_value_t = 0.0)]
        a0: f64,
        #[arg(long, default_value_t = 0.0)]
        q0: f64,
        /// Candidate `re,im`; repeatable. Defaults to the dispersion roots for k ≤ k-max.
        #[arg(long, allow_hyphen_values = true)]
        lambda: Vec<String>,
        /// Grid sized for modes up to this index.
        #[arg(long, default_value_t = 4)]
        k_max: usize,
        /// Explicit grid: half-width L (requires --points).
        #[arg(long, requires = "points")]
        half_width: Option<f64>,
        #[arg(long, requires = "half_width")]
        points: Option<usize>,
        /// Rectangle `re_min,re_max,im_min,im_max` for an argument-principle count.
        #[arg(long, allow_hyphen_values = true)]
        contour: Option<String>,
        #[arg(long, default_value_t = pencil_core::verify::DEFAULT_QUAD_POINTS)]
        quad_points: usize,
        #[command(flatten)]
        output: Output,
    },
    /// Plot data for the line (fig-x2) or strip (fig-strip) spectra.
    Figure {
        #[arg(value_enum)]
        which: Figure,
        /// Highest k (default 12 for fig-x2, 4 for fig-strip).
        #[arg(long)]
        k_max: Option<usize>,
        #[arg(long, default_value_t = 20)]
        j_max: u32,
        #[arg(long, default_value_t = 1.0)]
        ell: f64,
        /// Damping constant for fig-strip.
        #[arg(long, default_value_t = 1.0)]
        a0: f64,
        #[arg(long, default_value_t = pencil_core::export::DEFAULT_RE_CUT, allow_hyphen_values = true)]
        re_cut: f64,
        #[arg(long)]
        verify: bool,
        #[command(flatten)]
        output: Output,
    },
}

impl Command {
    pub fn output(&self) -> &Output {
        match self {
            Command::SpectrumLine { output, .. }
            | Command::SpectrumStrip { output, .. }
            | Command::Oscillator { output, .. }
            | Command::Converge { output, .. }
            | Command::Essential { output, .. }
            | Command::Verify { output, .. }
            | Command::Figure { output, .. } => output,
        }
    }

    /// Default file stem.
    pub fn stem(&self) -> &'static str {
        match self {
            Command::SpectrumLine { .. } => "spectrum-line",
            Command::SpectrumStrip { .. } => "spectrum-strip",
            Command::Oscillator { .. } => "oscillator",
            Command::Converge { .. } => "converge",
            Command::Essential { .. } => "essential",
            Command::Verify { .. } => "verify",
            Command::Figure {
                which: Figure::FigX2,
                ..
            } => "fig-x2",
            Command::Figure {
                which: Figure::FigStrip,
                ..
            } => "fig-strip",
        }
    }
}
