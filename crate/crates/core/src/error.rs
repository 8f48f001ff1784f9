use alloc::string::String;
use core::fmt;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// A scalar argument is outside its admissible range.
    InvalidParameter {
        name: &'static str,
        reason: String,
    },
    /// Total mass deviates from one by more than the renormalization slack.
    NotNormalized {
        total: f64,
    },
    NegativeWeight {
        index: usize,
        value: f64,
    },
    /// Two grids that must share a step or an alignment do not.
    GridMismatch(String),
    /// A displacement or location is not an integer multiple of the grid step.
    OffGrid {
        what: &'static str,
        value: f64,
        step: f64,
    },
    AsymmetricGrid {
        x_min: f64,
        x_max: f64,
    },
    /// A state does not fit inside the position or momentum window.
    StateEscapesGrid(String),
    /// An outcome window loses more mass than allowed.
    MassDeficit {
        window: String,
        deficit: f64,
    },
    /// No finite window inside the scenario window satisfies the confidence level.
    ExceedsWindow {
        required: f64,
        window: f64,
    },
    NonMonotone(String),
    NotLipschitz {
        slope: f64,
    },
    /// Calibration errors increased as the localization width decreased.
    LadderInconsistent {
        wider: f64,
        narrower: f64,
        delta: f64,
    },
    EmptyFamily,
    ClosedFormUnavailable(&'static str),
    /// A checked inequality `lhs <= rhs` failed beyond tolerance.
    RelationViolated {
        relation: &'static str,
        lhs: f64,
        rhs: f64,
    },
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::InvalidParameter { name, reason } => write!(f, "invalid {name}: {reason}"),
            Error::NotNormalized { total } => write!(f, "total mass {total} is not 1"),
            Error::NegativeWeight { index, value } => {
                write!(f, "negative weight {value} at index {index}")
            }
            Error::GridMismatch(msg) => write!(f, "grid mismatch: {msg}"),
            Error::OffGrid { what, value, step } => {
                write!(f, "{what} = {value} is not a multiple of the grid step {step}")
            }
            Error::AsymmetricGrid { x_min, x_max } => {
                write!(f, "grid [{x_min}, {x_max}] is not symmetric about 0")
            }
            Error::StateEscapesGrid(msg) => write!(f, "state escapes the grid window: {msg}"),
            Error::MassDeficit { window, deficit } => {
                write!(f, "outcome window {window} misses mass {deficit:e}")
            }
            Error::ExceedsWindow { required, window } => {
                write!(f, "required width {required} exceeds the scenario window {window}")
            }
            Error::NonMonotone(msg) => write!(f, "map is not monotone: {msg}"),
            Error::NotLipschitz { slope } => {
                write!(f, "function has slope {slope}, not 1-Lipschitz")
            }
            Error::LadderInconsistent { wider, narrower, delta } => {
                write!(f, "calibration error {narrower} at delta = {delta} exceeds the value {wider} at the wider rung")
            }
            Error::EmptyFamily => f.write_str("probe family is empty"),
            Error::ClosedFormUnavailable(what) => write!(f, "no closed form for {what}"),
            Error::RelationViolated { relation, lhs, rhs } => {
                write!(f, "{relation} violated: {lhs} > {rhs}")
            }
        }
    }
}

impl core::error::Error for Error {}

pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidParameter { name, reason: reason.into() }
}
