use thiserror::Error;

/// Errors raised by the numerical routines in this crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("argument {what} = {value} is outside the supported domain: {reason}")]
    Domain {
        what: &'static str,
        value: f64,
        reason: &'static str,
    },

    #[error("Bessel order {0} exceeds the supported maximum")]
    OrderTooLarge(f64),

    #[error("failed to isolate zero #{s} of {what} for order {order}")]
    ZeroIsolation {
        what: &'static str,
        order: f64,
        s: u32,
    },

    #[error("invalid medium: {0}")]
    InvalidMedium(String),

    #[error("expression parse error at offset {offset}: {message}")]
    Parse { offset: usize, message: String },

    #[error("evaluation at r = {0} coincides with a layer interface; request a side explicitly")]
    AtInterface(f64),

    #[error("operation requires {expected}, got a {found} profile")]
    WrongProfileKind {
        expected: &'static str,
        found: &'static str,
    },

    #[error("step size underflow at r = {r} (k = {k}, m = {m})")]
    StepUnderflow { r: f64, k: f64, m: u32 },

    #[error("non-finite value encountered: {0}")]
    NonFinite(String),

    #[error("Assumption A does not hold: {0}")]
    AssumptionA(String),

    #[error("no sign change of {what} found for m = {m} on [{lo}, {hi}]")]
    NoSignChange {
        what: &'static str,
        m: u32,
        lo: f64,
        hi: f64,
        samples: Vec<f64>,
    },

    #[error("degenerate medium: sigma = n = 1 makes the characteristic function vanish identically")]
    Degenerate,

    #[error("degenerate normalization: phi(1; k) vanishes at k = {0}")]
    DegenerateNormalization(f64),

    #[error("interval ({0}, {1}) is outside the solved radial grid")]
    OutsideGrid(f64, f64),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
