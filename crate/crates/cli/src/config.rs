use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use jacobi_scatter::ensemble::{draw, seeded_rng};
use jacobi_scatter::{load_profile, CoefficientProfile, Partition};

use crate::CliError;

#[derive(Parser, Debug)]
#[command(name = "jacobi-scatter", version, about = "Scattering data of matrix-valued Jacobi recurrences")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub options: Options,
}

#[derive(Subcommand, Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    /// Check that the profile belongs to the admissible class
    Validate,
    /// Tabulate T_l, T_r, L and R over a grid on the unit circle
    Scatter,
    /// Compare the transition matrix with the product over fragments
    Factorize,
    /// Compare the single-site closed form with the general pipeline
    ClosedForm,
    /// Run every identity check and report the worst residual of each
    Verify,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

#[derive(clap::Args, Debug, Clone)]
pub struct Options {
    /// Profile description in JSON
    #[arg(long, global = true)]
    pub profile: Option<PathBuf>,
    /// Number of grid points on the unit circle
    #[arg(long, global = true, default_value_t = 64, value_parser = clap::value_parser!(u32).range(1..))]
    pub z_samples: u32,
    /// Grid points closer than this to z = 1 or z = -1 are dropped
    #[arg(long, global = true, default_value_t = 1e-6, value_parser = non_negative)]
    pub eps: f64,
    /// Residual threshold for pass/fail
    #[arg(long, global = true, default_value_t = 1e-9, value_parser = positive)]
    pub tol: f64,
    /// Strictly increasing cut sites, e.g. --cuts=-1,2
    #[arg(long, global = true, value_delimiter = ',', allow_hyphen_values = true)]
    pub cuts: Option<Vec<i64>>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    /// Draw a random profile and partition when no --profile is given
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Write results here instead of standard output
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
}

fn parse_f64(s: &str) -> Result<f64, String> {
    s.parse::<f64>().map_err(|e| e.to_string())
}

fn positive(s: &str) -> Result<f64, String> {
    parse_f64(s).and_then(|x| if x > 0.0 && x.is_finite() { Ok(x) } else { Err("must be positive".into()) })
}

fn non_negative(s: &str) -> Result<f64, String> {
    parse_f64(s).and_then(|x| if x >= 0.0 && x.is_finite() { Ok(x) } else { Err("must be non-negative".into()) })
}

/// Everything a command needs, with the profile loaded.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub profile: CoefficientProfile,
    pub expect_unequal_det: bool,
    pub partition: Option<Partition>,
    pub z_samples: usize,
    pub eps: f64,
    pub tol: f64,
    pub format: Format,
    pub out: Option<PathBuf>,
}

impl RunConfig {
    pub fn resolve(opts: &Options) -> Result<Self, CliError> {
        let cuts = opts.cuts.clone().map(Partition::new).transpose().map_err(|e| CliError::Input(e.to_string()))?;
        let (profile, expect_unequal_det, partition) = match (&opts.profile, opts.seed) {
            (Some(path), _) => {
                let spec = load_profile(path).map_err(|e| CliError::Input(e.to_string()))?;
                (spec.profile, spec.expect_unequal_det, cuts)
            }
            (None, Some(seed)) => {
                let (p, drawn) = draw(&mut seeded_rng(seed));
                (p, false, cuts.or(Some(drawn)))
            }
            (None, None) => return Err(CliError::Input("either --profile or --seed is required".into())),
        };
        Ok(RunConfig {
            profile,
            expect_unequal_det,
            partition,
            z_samples: opts.z_samples as usize,
            eps: opts.eps,
            tol: opts.tol,
            format: opts.format,
            out: opts.out.clone(),
        })
    }
}
