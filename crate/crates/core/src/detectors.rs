//! The three correlation detectors and threshold tests.
//!
//! * [`DetectorKind::D0`]: `D₀ = R̄_c`. Locally most powerful near `ρ = 0`
//!   when `σ₁ = σ₂ = 1` and `φ = 0`; it is computed for any parameters, but
//!   that optimality only holds under those conditions.
//! * [`DetectorKind::RhoHat`]: `ρ̂ = √((R̄_c² + R̄_s²) / (P̄₁P̄₂))`, the
//!   maximum likelihood estimate of `ρ` and the GLRT statistic.
//! * [`DetectorKind::MatchedFilter`]: `D_MF = √(R̄_c² + R̄_s²)`, the
//!   magnitude of the zero-lag matched-filter output.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::signal::AuxStats;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum DetectorKind {
    #[serde(rename = "d0")]
    D0,
    #[serde(rename = "rhohat")]
    RhoHat,
    #[serde(rename = "mf")]
    MatchedFilter,
}

impl DetectorKind {
    pub const ALL: [DetectorKind; 3] = [DetectorKind::D0, DetectorKind::RhoHat, DetectorKind::MatchedFilter];

    pub fn name(self) -> &'static str {
        match self {
            DetectorKind::D0 => "d0",
            DetectorKind::RhoHat => "rhohat",
            DetectorKind::MatchedFilter => "mf",
        }
    }
}

impl fmt::Display for DetectorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for DetectorKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "d0" => Ok(DetectorKind::D0),
            "rhohat" | "rho" | "glrt" => Ok(DetectorKind::RhoHat),
            "mf" | "matched" | "matchedfilter" | "dmf" => Ok(DetectorKind::MatchedFilter),
            other => Err(Error::Domain(format!("unknown detector {other:?} (expected d0, rhohat or mf)"))),
        }
    }
}

/// A detector output for one block.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DetectorStatistic {
    pub kind: DetectorKind,
    pub value: f64,
    pub n: usize,
}

/// Evaluates a detector on the auxiliary statistics of a block.
pub fn compute(kind: DetectorKind, aux: &AuxStats) -> Result<DetectorStatistic> {
    let value = match kind {
        DetectorKind::D0 => aux.rc_bar,
        DetectorKind::MatchedFilter => aux.rc_bar.hypot(aux.rs_bar),
        DetectorKind::RhoHat => {
            if !(aux.p1_bar > 0.0 && aux.p2_bar > 0.0) {
                return Err(Error::Degenerate(format!(
                    "ρ̂ is undefined for zero power (P̄₁ = {}, P̄₂ = {})",
                    aux.p1_bar, aux.p2_bar
                )));
            }
            rho_hat(aux)
        }
    };
    Ok(DetectorStatistic { kind, value, n: aux.n })
}

#[inline]
pub(crate) fn rho_hat(aux: &AuxStats) -> f64 {
    // Cauchy–Schwarz bounds the exact value by one; clamp rounding overshoot
    (aux.rc_bar.hypot(aux.rs_bar) / (aux.p1_bar * aux.p2_bar).sqrt()).min(1.0)
}

/// Statistic value without validation, for inner Monte Carlo loops.
#[inline]
pub(crate) fn value_of(kind: DetectorKind, aux: &AuxStats) -> f64 {
    match kind {
        DetectorKind::D0 => aux.rc_bar,
        DetectorKind::MatchedFilter => aux.rc_bar.hypot(aux.rs_bar),
        DetectorKind::RhoHat => {
            if aux.p1_bar > 0.0 && aux.p2_bar > 0.0 {
                rho_hat(aux)
            } else {
                0.0
            }
        }
    }
}

/// Declares a detection when the statistic strictly exceeds the threshold.
pub fn declare(stat: &DetectorStatistic, threshold: f64) -> bool {
    stat.value > threshold
}

#[cfg(test)]
mod tests {
    use super::*;

    fn aux(p1: f64, p2: f64, rc: f64, rs: f64) -> AuxStats {
        AuxStats { p1_bar: p1, p2_bar: p2, rc_bar: rc, rs_bar: rs, n: 1 }
    }

    #[test]
    fn unit_correlation() {
        let a = aux(1.0, 1.0, 1.0, 0.0);
        for kind in DetectorKind::ALL {
            assert_eq!(compute(kind, &a).unwrap().value, 1.0);
        }
    }

    #[test]
    fn zero_correlation_sums() {
        let a = aux(2.0, 3.0, 0.0, 0.0);
        for kind in DetectorKind::ALL {
            assert_eq!(compute(kind, &a).unwrap().value, 0.0);
        }
    }

    #[test]
    fn unequal_powers() {
        let a = aux(4.0, 1.0, 1.0, 1.0);
        assert_eq!(compute(DetectorKind::D0, &a).unwrap().value, 1.0);
        let r = compute(DetectorKind::RhoHat, &a).unwrap().value;
        assert!((r - (0.5_f64).sqrt()).abs() < 1e-15);
        let m = compute(DetectorKind::MatchedFilter, &a).unwrap().value;
        assert!((m - 2.0_f64.sqrt()).abs() < 1e-15);
        assert!((m - r * (4.0_f64).sqrt()).abs() < 1e-12 * m);
    }

    #[test]
    fn zero_power_is_degenerate_for_rhohat_only() {
        let a = aux(0.0, 1.0, 0.0, 0.0);
        assert!(matches!(compute(DetectorKind::RhoHat, &a), Err(Error::Degenerate(_))));
        assert!(compute(DetectorKind::D0, &a).is_ok());
        assert!(compute(DetectorKind::MatchedFilter, &a).is_ok());
    }

    #[test]
    fn strict_threshold() {
        let s = |v| DetectorStatistic { kind: DetectorKind::D0, value: v, n: 1 };
        assert!(!declare(&s(0.5), 0.5));
        assert!(declare(&s(0.6), 0.5));
        assert!(!declare(&s(-0.2), 0.0));
    }

    #[test]
    fn parses_names() {
        assert_eq!("RhoHat".parse::<DetectorKind>().unwrap(), DetectorKind::RhoHat);
        assert_eq!("mf".parse::<DetectorKind>().unwrap(), DetectorKind::MatchedFilter);
        assert!("cfar".parse::<DetectorKind>().is_err());
    }
}
