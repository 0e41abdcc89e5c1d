//! Run configuration: command-line flags layered over an optional JSON file.

use clap::{Args, Parser, Subcommand, ValueEnum};
use kl_strip::{BoundaryKind, Error, Result};
use serde::{Deserialize, Serialize};
use std::path::PathBuf;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Bc {
    Simply,
    Clamped,
}

impl From<Bc> for BoundaryKind {
    fn from(b: Bc) -> Self {
        match b {
            Bc::Simply => BoundaryKind::SimplySupported,
            Bc::Clamped => BoundaryKind::Clamped,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Dir {
    Plus,
    Minus,
}

#[derive(Debug, Parser)]
#[command(name = "kl-strip", version, about = "Kirchhoff-Love plate waveguides in the strip (0, 1)")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CommandKind {
    Modes,
    Thresholds,
    Dispersion,
    SolveStrip,
    Scatter,
    ClampedSolve,
    Labs,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Modal exponents at one wavenumber.
    Modes(Flags),
    /// Threshold wavenumbers.
    Thresholds(Flags),
    /// Propagating branches, group and phase velocities over a range of k.
    Dispersion(Flags),
    /// One incident mode scattered in a simply supported strip (FEM + DtN).
    SolveStrip(Flags),
    /// Scattering matrix of a simply supported strip with a hole.
    Scatter(Flags),
    /// Outgoing solution of the clamped strip for a compactly supported source.
    ClampedSolve(Flags),
    /// Limiting absorption trajectory of a propagating exponent.
    Labs(Flags),
}

impl Command {
    pub fn split(self) -> (CommandKind, Flags) {
        match self {
            Command::Modes(f) => (CommandKind::Modes, f),
            Command::Thresholds(f) => (CommandKind::Thresholds, f),
            Command::Dispersion(f) => (CommandKind::Dispersion, f),
            Command::SolveStrip(f) => (CommandKind::SolveStrip, f),
            Command::Scatter(f) => (CommandKind::Scatter, f),
            Command::ClampedSolve(f) => (CommandKind::ClampedSolve, f),
            Command::Labs(f) => (CommandKind::Labs, f),
        }
    }
}

/// Every flag is optional so that a JSON config can supply it instead.
#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Flags {
    /// JSON file with any of these settings; flags given on the command line win.
    #[arg(long)]
    #[serde(skip)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub k: Option<f64>,
    #[arg(long, value_enum)]
    pub bc: Option<Bc>,
    #[arg(long)]
    pub nx: Option<usize>,
    #[arg(long)]
    pub ny: Option<usize>,
    /// Half-length of the computational domain (-L, L) x (0, 1).
    #[arg(long = "L")]
    #[serde(rename = "L")]
    pub l: Option<f64>,
    /// Rectangular hole `x0,y0,x1,y1`.
    #[arg(long)]
    pub hole: Option<String>,
    #[arg(long)]
    pub pmax: Option<usize>,
    /// Integration abscissa Re(lambda) = -beta for clamped-solve.
    #[arg(long)]
    pub beta: Option<f64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Number of thresholds.
    #[arg(long)]
    pub n: Option<usize>,
    /// Mode index, 1 = largest eta.
    #[arg(long)]
    pub p: Option<usize>,
    #[arg(long, value_enum)]
    pub dir: Option<Dir>,
    /// Wave speed c = sqrt(D / rho h).
    #[arg(long)]
    pub c: Option<f64>,
    #[arg(long)]
    pub kmin: Option<f64>,
    #[arg(long)]
    pub kmax: Option<f64>,
    #[arg(long)]
    pub nk: Option<usize>,
    /// Dampings: a comma list or a decade range such as `1e-2..1e-6`.
    #[arg(long)]
    pub gammas: Option<String>,
    /// Source description (JSON) for clamped-solve.
    #[arg(long)]
    pub source: Option<PathBuf>,
    /// Where clamped-solve writes the modal coefficients (JSON).
    #[arg(long)]
    pub coeffs: Option<PathBuf>,
    /// Where to write the JSON summary; stdout when absent.
    #[arg(long)]
    pub summary: Option<PathBuf>,
}

macro_rules! overlay {
    ($dst:ident, $src:ident; $($f:ident),*) => {
        $( if $dst.$f.is_none() { $dst.$f = $src.$f; } )*
    };
}

impl Flags {
    /// Fill unset flags from the JSON file named by `--config`.
    pub fn resolve(mut self) -> Result<Self> {
        let Some(path) = self.config.clone() else { return Ok(self) };
        let text = std::fs::read_to_string(&path).map_err(|e| Error::InvalidParameter(format!("cannot read config {}: {e}", path.display())))?;
        let file: Flags = serde_json::from_str(&text).map_err(|e| Error::InvalidParameter(format!("config {}: {e}", path.display())))?;
        overlay!(self, file; k, bc, nx, ny, l, hole, pmax, beta, out, seed, n, p, dir, c, kmin, kmax, nk, gammas, source, coeffs, summary);
        Ok(self)
    }

    pub fn k(&self) -> Result<f64> {
        let k = self.k.ok_or_else(|| Error::InvalidParameter("--k is required".into()))?;
        if !(k > 0.0 && k.is_finite()) {
            return Err(Error::InvalidParameter(format!("k must be positive, got {k}")));
        }
        Ok(k)
    }

    pub fn c(&self) -> Result<f64> {
        let c = self.c.unwrap_or(1.0);
        kl_strip::physics::WaveSpeed::new(c).map(|w| w.c)
    }
}

/// `"1e-2..1e-6"` (decades, inclusive) or `"0.1,0.01,0.003"`.
pub fn parse_gammas(s: &str) -> Result<Vec<f64>> {
    let bad = || Error::InvalidParameter(format!("cannot parse dampings {s:?}"));
    if let Some((a, b)) = s.split_once("..") {
        let (a, b): (f64, f64) = (a.trim().parse().map_err(|_| bad())?, b.trim().parse().map_err(|_| bad())?);
        if !(a > 0.0 && b > 0.0 && a > b) {
            return Err(bad());
        }
        let (hi, lo) = (a.log10().round() as i32, b.log10().round() as i32);
        if (10f64.powi(hi) - a).abs() > 1e-12 * a || (10f64.powi(lo) - b).abs() > 1e-12 * b {
            return Err(Error::InvalidParameter(format!("range ends must be powers of ten, got {s:?}")));
        }
        return Ok(kl_strip::physics::decades(hi, lo));
    }
    s.split(',').map(|t| t.trim().parse::<f64>().map_err(|_| bad())).collect()
}
