use std::fmt;

use serde::{Deserialize, Serialize};

/// Non-fatal conditions collected while evaluating an operating point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Warning {
    /// Probe power is not small compared with the coupling power.
    ProbeNotWeak { ratio: f64 },
    /// Several admissible steady-state intensities; the lowest branch was kept.
    Multistable { roots: usize },
    /// The selected steady state has a drift eigenvalue with non-negative real part.
    Unstable { max_real_part: f64 },
    /// The stability check could not be completed.
    StabilityUnknown { reason: String },
}

impl fmt::Display for Warning {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Warning::ProbeNotWeak { ratio } => {
                write!(f, "probe/coupling power ratio {ratio:.3e} exceeds 0.1; linear response may not apply")
            }
            Warning::Multistable { roots } => {
                write!(f, "{roots} admissible steady states; using the lowest-intensity branch")
            }
            Warning::Unstable { max_real_part } => {
                write!(f, "operating point is linearly unstable (max Re(lambda) = {max_real_part:.6e} rad/s)")
            }
            Warning::StabilityUnknown { reason } => write!(f, "stability check failed: {reason}"),
        }
    }
}
