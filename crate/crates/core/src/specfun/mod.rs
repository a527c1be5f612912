//! Special functions used by the detection-performance formulas.
//!
//! Everything here is a pure function of its arguments. Each routine
//! validates its domain and returns [`Error::Domain`](crate::Error::Domain)
//! rather than producing `NaN`.

mod erf;
mod gamma;
mod hyp2f1;
mod marcum;

pub use erf::{erfc, erfc_inv};
pub use gamma::{ln_gamma, regularized_gamma};
pub use hyp2f1::{log_hyp2f1_nn1, log_hyp2f1_nn1_with};
pub use marcum::{marcum_q1, marcum_q1_with};

use serde::{Deserialize, Serialize};

/// Truncation tolerances for the series-based routines.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Accuracy {
    pub rel_tol: f64,
    /// Values below this are treated as underflow.
    pub abs_tol: f64,
}

impl Default for Accuracy {
    fn default() -> Self {
        Accuracy { rel_tol: 1e-12, abs_tol: 1e-300 }
    }
}

impl Accuracy {
    pub fn new(rel_tol: f64, abs_tol: f64) -> crate::Result<Self> {
        if !(rel_tol > 0.0 && rel_tol.is_finite()) || !(abs_tol >= 0.0 && abs_tol.is_finite()) {
            return crate::error::domain(format!(
                "accuracy requires rel_tol > 0 and abs_tol >= 0, got ({rel_tol}, {abs_tol})"
            ));
        }
        Ok(Accuracy { rel_tol, abs_tol })
    }
}
