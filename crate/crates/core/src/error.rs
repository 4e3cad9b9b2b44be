use thiserror::Error;

/// Errors produced by the numerical routines and the command-line surface.
#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("no solution: {0}")]
    NoSolution(String),

    #[error("energy {energy} outside the open interval ({lower}, {upper})")]
    OutOfRange { energy: f64, lower: f64, upper: f64 },

    #[error("degenerate fixed points: v_l = v_u = {0}")]
    Degenerate(f64),

    #[error("no convergence after {iterations} iterations (residual {residual:e})")]
    NonConvergence { iterations: usize, residual: f64 },

    #[error("positivity violated: min(1 + v) = {min_height:e}")]
    Positivity { min_height: f64 },

    #[error("continuation step failed: ds = {ds:e}")]
    StepFailure { ds: f64 },

    #[error("insufficient resolution: trailing-mode energy {tail:e}")]
    Resolution { tail: f64 },

    #[error("fit window not reached: {0}")]
    WindowNotReached(String),

    #[error("solution exceeded {bound:e} at t = {t}")]
    Overflow { t: f64, bound: f64 },

    #[error("time step {dt:e} too small at t = {t}: min h = {min_height:e}")]
    StepTooSmall { t: f64, dt: f64, min_height: f64 },

    #[error("height floor reached at t = {t}: min h = {min_height:e}")]
    HeightFloor { t: f64, min_height: f64 },

    /// Configuration problem; `line` is 0 for values given on the command line.
    #[error("{}{message}", line_prefix(*.line))]
    Config { line: usize, message: String },

    #[error("invalid data: {0}")]
    Data(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    /// True for failures of the numerics (as opposed to bad input or I/O).
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::NoSolution(_)
                | Error::NonConvergence { .. }
                | Error::Positivity { .. }
                | Error::StepFailure { .. }
                | Error::Resolution { .. }
                | Error::WindowNotReached(_)
                | Error::HeightFloor { .. }
                | Error::Overflow { .. }
                | Error::StepTooSmall { .. }
                | Error::Degenerate(_)
        )
    }
}

fn line_prefix(line: usize) -> String {
    if line == 0 {
        String::new()
    } else {
        format!("line {line}: ")
    }
}

pub type Result<T> = std::result::Result<T, Error>;
