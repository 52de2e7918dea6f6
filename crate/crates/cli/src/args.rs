use std::ops::RangeInclusive;
use std::path::PathBuf;

use biwave::DiracParams;
use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::CliError;

#[derive(Debug, Parser)]
#[command(name = "biwave", version, about = "Bi-orthogonal wavelet transform and relativistic hydrogen spectra")]
pub struct Cli {
    /// Key-value file whose entries act as flags; the command line wins on conflicts.
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Bound-state energies for a range of radial quantum numbers.
    #[command(args_override_self = true)]
    Spectrum(SpectrumArgs),
    /// Normalised radial eigenfunction (f, g) on a uniform q-grid.
    #[command(args_override_self = true)]
    Wavefunction(WavefunctionArgs),
    /// Runs the check suite and writes a JSON report.
    #[command(args_override_self = true)]
    Verify(VerifyArgs),
    /// Transforms a single atom c q^(alpha-1) e^(i zeta0 q), tabulates F and checks the round trip.
    #[command(name = "transform-demo", args_override_self = true)]
    TransformDemo(DemoArgs),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Spectrum(_) => "spectrum",
            Command::Wavefunction(_) => "wavefunction",
            Command::Verify(_) => "verify",
            Command::TransformDemo(_) => "transform-demo",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Parity {
    /// `χ = −(j + 1/2)`.
    Minus,
    /// `χ = +(j + 1/2)`.
    Plus,
}

#[derive(Debug, Clone, Args)]
pub struct PhysicsArgs {
    /// Nuclear charge; sets lambda = N/137 and adds eV columns.
    #[arg(long = "N", value_name = "N", conflicts_with = "lambda")]
    pub charge: Option<f64>,

    /// Coupling lambda = N alpha.
    #[arg(long)]
    pub lambda: Option<f64>,

    /// Spin-orbit quantum number chi = ±(j + 1/2).
    #[arg(long, allow_hyphen_values = true, conflicts_with_all = ["j", "parity"])]
    pub chi: Option<f64>,

    /// Total angular momentum; needs --parity.
    #[arg(long, requires = "parity")]
    pub j: Option<f64>,

    #[arg(long, value_enum, requires = "j")]
    pub parity: Option<Parity>,
}

impl PhysicsArgs {
    pub fn is_empty(&self) -> bool {
        self.charge.is_none() && self.lambda.is_none() && self.chi.is_none() && self.j.is_none()
    }

    pub fn resolve(&self) -> Result<DiracParams, CliError> {
        let chi = match (self.chi, self.j, self.parity) {
            (Some(c), _, _) => c,
            (None, Some(j), Some(p)) => DiracParams::chi_from_j(j, p == Parity::Minus)?,
            _ => return Err(CliError::usage("give --chi, or --j with --parity")),
        };
        let p = match (self.charge, self.lambda) {
            (Some(n), None) => DiracParams::hydrogen_like(n, chi)?,
            (None, Some(l)) => DiracParams::new(1.0, l, chi)?,
            _ => return Err(CliError::usage("give exactly one of --N and --lambda")),
        };
        Ok(p)
    }
}

#[derive(Debug, Clone, Args)]
pub struct OutputArgs {
    /// Output file; stdout when absent. A `<FILE>.meta.json` sidecar records the run.
    #[arg(long, short)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct SpectrumArgs {
    #[command(flatten)]
    pub physics: PhysicsArgs,

    /// Inclusive range `a..b`, or a single level; `b < a` gives an empty table.
    #[arg(long = "n", value_name = "RANGE", default_value = "0..3", value_parser = parse_range)]
    pub levels: RangeInclusive<u32>,

    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Args)]
pub struct WavefunctionArgs {
    #[command(flatten)]
    pub physics: PhysicsArgs,

    #[arg(long = "n", default_value_t = 0)]
    pub level: u32,

    #[arg(long, default_value_t = 1e-3)]
    pub q_min: f64,

    /// Defaults to 50 + 8n.
    #[arg(long)]
    pub q_max: Option<f64>,

    #[arg(long, default_value_t = 4001)]
    pub points: usize,

    /// Extra file with (q, r, q^2 (f^2 + g^2)) for plotting.
    #[arg(long, value_name = "FILE")]
    pub plot: Option<PathBuf>,

    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Args)]
pub struct VerifyArgs {
    /// Replaces every per-check tolerance.
    #[arg(long)]
    pub tolerance: Option<f64>,

    /// Skips the isometry quadrature and shortens the shooting sweep.
    #[arg(long)]
    pub quick: bool,

    /// Adds checks for this parameter set.
    #[command(flatten)]
    pub physics: PhysicsArgs,

    /// Levels for the parameter checks.
    #[arg(long = "n", value_name = "RANGE", default_value = "0..3", value_parser = parse_range)]
    pub levels: RangeInclusive<u32>,

    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Args)]
pub struct DemoArgs {
    #[arg(long, default_value_t = 0.6)]
    pub gamma: f64,

    #[arg(long, default_value_t = 1.0)]
    pub alpha: f64,

    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub pole_re: f64,

    #[arg(long, default_value_t = 1.0)]
    pub pole_im: f64,

    #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
    pub coeff_re: f64,

    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub coeff_im: f64,

    /// Uses the zero function instead of the atom.
    #[arg(long)]
    pub zero: bool,

    #[arg(long, default_value_t = 0.05)]
    pub a_min: f64,

    #[arg(long, default_value_t = 5.0)]
    pub a_max: f64,

    #[arg(long, default_value_t = 10.0)]
    pub half_width: f64,

    #[arg(long, default_value_t = 20)]
    pub na: usize,

    #[arg(long, default_value_t = 41)]
    pub nb: usize,

    #[command(flatten)]
    pub output: OutputArgs,
}

pub fn parse_range(s: &str) -> Result<RangeInclusive<u32>, String> {
    let num = |t: &str| t.trim().parse::<u32>().map_err(|e| format!("bad level {t:?}: {e}"));
    match s.split_once("..") {
        Some((a, b)) => Ok(num(a)?..=num(b.trim_start_matches('='))?),
        None => {
            let n = num(s)?;
            Ok(n..=n)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ranges() {
        assert_eq!(parse_range("0..3").unwrap(), 0..=3);
        assert_eq!(parse_range("0..=3").unwrap(), 0..=3);
        assert_eq!(parse_range("2").unwrap(), 2..=2);
        assert!(parse_range("3..1").unwrap().is_empty());
        assert!(parse_range("a..1").is_err());
        assert!(parse_range("-1").is_err());
    }
}
