use num_complex::Complex64;
use thiserror::Error;

/// Every failure the library can report.
///
/// Variants split into two families: input validation (bad parameters,
/// geometry that cannot be meshed) and numerical failures (singular systems,
/// lost continuation). [`Error::is_validation`] tells them apart so front ends
/// can map them to distinct exit codes.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("k = {k} lies within {tol:e} of the threshold wavenumber {threshold}")]
    ThresholdWavenumber { k: f64, threshold: f64, tol: f64 },

    #[error("lambda = {lambda} is not an eigenvalue (smallest singular value {sigma_min:e}, largest {sigma_max:e})")]
    NotAnEigenvalue {
        lambda: Complex64,
        sigma_min: f64,
        sigma_max: f64,
    },

    #[error("symbol system at lambda = {lambda} is near singular (condition estimate {estimate:e})")]
    NearSingularSymbol { lambda: Complex64, estimate: f64 },

    #[error("no sign change found while bracketing root {index}")]
    BracketFailure { index: usize },

    #[error("dispersion function vanishes on a search box edge after {attempts} perturbations")]
    ContourThroughZero { attempts: usize },

    #[error("multiplicity at lambda = {lambda} is inconclusive (|d det| = {derivative:e}, noise floor {noise:e})")]
    Inconclusive {
        lambda: Complex64,
        derivative: f64,
        noise: f64,
    },

    #[error("finite element system is singular: {0}")]
    SingularSystem(String),

    #[error("cutoff transition band [{band_start}, {band_end}] intersects the hole")]
    CutoffOverlapsHole { band_start: f64, band_end: f64 },

    #[error("eigenvalue {lambda} lies within {distance:e} of the integration line Re(lambda) = {abscissa}")]
    EigenvalueNearContour {
        lambda: Complex64,
        abscissa: f64,
        distance: f64,
    },

    #[error("lambda = {0} has algebraic multiplicity two; residues are only taken at simple poles")]
    MultiplicityTwo(Complex64),

    #[error("mode {p} is not propagating at k = {k}")]
    NotPropagating { p: usize, k: f64 },

    #[error("continuation lost at gamma = {gamma:e}: Newton moved {step:e}, trust radius {radius:e}")]
    ContinuationLost { gamma: f64, step: f64, radius: f64 },

    #[error("iteration failed to converge: {0}")]
    NoConvergence(String),

    #[error("i/o failure: {0}")]
    Io(String),
}

impl Error {
    /// True for errors caused by inputs rather than by the numerics.
    pub fn is_validation(&self) -> bool {
        matches!(
            self,
            Error::InvalidParameter(_)
                | Error::ThresholdWavenumber { .. }
                | Error::CutoffOverlapsHole { .. }
                | Error::NotPropagating { .. }
                | Error::MultiplicityTwo(_)
                | Error::EigenvalueNearContour { .. }
        )
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
