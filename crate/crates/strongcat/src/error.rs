//! Error types shared across the crate.

use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    /// Fock truncation too small for the requested state.
    #[error("truncation {n_trunc} too small: leakage |c_(N-1)|^2 = {leakage:.3e} >= {limit:.1e}")]
    TruncationTooSmall {
        n_trunc: usize,
        leakage: f64,
        limit: f64,
    },

    /// Coherent-state superposition with vanishing norm.
    #[error("degenerate superposition: squared norm {norm_sq:.3e} underflows")]
    DegenerateSuperposition { norm_sq: f64 },

    /// g2 undefined for states with zero mean photon number.
    #[error("zero mean photon number: g2(0) undefined")]
    ZeroMeanPhoton,

    /// Keldysh parameter undefined at zero ponderomotive energy.
    #[error("zero field: Keldysh parameter undefined for U_p = 0")]
    ZeroField,

    /// No recollision for the requested ionization time.
    #[error("no return to the core for ionization at t = {t_ion:.4} a.u.")]
    NoReturns { t_ion: f64 },

    /// Time grid undersamples the dipole response.
    #[error("time grid too coarse: dt = {dt:.4e} a.u., need dt <= {dt_max:.4e} a.u.")]
    GridTooCoarse { dt: f64, dt_max: f64 },

    /// Time grid cannot resolve the requested harmonic order.
    #[error("Nyquist violation: dt = {dt:.4e} a.u. cannot resolve harmonic q = {q}")]
    NyquistViolation { dt: f64, q: usize },

    /// Conditioning on HHG with no harmonic excitation.
    #[error("null conditioning: all mode shifts vanish, conditioned state has zero norm")]
    NullConditioning,

    /// Branch discretization failed to converge.
    #[error("ATI branch discretization did not converge: change {change:.3e} at {n_tsteps} steps/cycle")]
    ConvergenceFailure { n_tsteps: usize, change: f64 },

    /// Maximum-likelihood iteration hit an underflowing bin probability.
    #[error("maximum-likelihood iteration ill-conditioned: bin probability underflow")]
    IllConditioned,

    /// Maximum-likelihood iteration exhausted its iteration budget.
    #[error("maximum-likelihood iteration did not converge after {iterations} iterations")]
    NonConvergence { iterations: usize },

    /// Too few homodyne phases for reconstruction.
    #[error("insufficient phases: found {found} distinct phases, need at least {needed}")]
    InsufficientPhases { found: usize, needed: usize },

    /// Diagonal selection produced an empty shot list.
    #[error("empty selection: no shots within width {width:.3e} of the anticorrelation diagonal")]
    EmptySelection { width: f64 },

    /// Generic precondition violation.
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// I/O failure while reading or writing artifacts.
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    /// Malformed file content.
    #[error("parse error: {0}")]
    Parse(String),
}

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;
