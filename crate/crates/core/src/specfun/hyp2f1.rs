use super::Accuracy;
use crate::error::{domain, Error, Result};

const RESCALE_AT: f64 = 1e250;
const LN_RESCALE: f64 = 575.646_273_248_511_4; // ln(1e250)

/// `ln ₂F₁(n, n; 1; z)` with default accuracy.
pub fn log_hyp2f1_nn1(n: u32, z: f64) -> Result<f64> {
    log_hyp2f1_nn1_with(n, z, Accuracy::default())
}

/// Logarithm of the Gauss hypergeometric function `₂F₁(n, n; 1; z)` for
/// integer `n ≥ 2` and `0 ≤ z < 1`.
///
/// The series `Σ_k [(n)_k / k!]² z^k` has all-positive terms whose ratio is
/// `((n + k) / (k + 1))² z`. The terms are accumulated with a running scale
/// factor so that the sum never overflows even when its logarithm is in the
/// thousands. Summation stops once the terms are decreasing and the next
/// term, bounded by a geometric tail, is below `rel_tol` of the sum.
pub fn log_hyp2f1_nn1_with(n: u32, z: f64, acc: Accuracy) -> Result<f64> {
    if n < 2 {
        return domain(format!("log_hyp2f1_nn1 requires n >= 2, got {n}"));
    }
    if !(0.0..1.0).contains(&z) {
        return domain(format!("log_hyp2f1_nn1 requires 0 <= z < 1, got {z}"));
    }
    if z == 0.0 {
        return Ok(0.0);
    }
    let nf = n as f64;
    let mut term = 1.0_f64;
    let mut sum = 1.0_f64;
    let mut log_scale = 0.0_f64;
    let max_terms = 50_000_000_u64;
    let mut k = 0_u64;
    loop {
        let kf = k as f64;
        let ratio = {
            let r = (nf + kf) / (kf + 1.0);
            r * r * z
        };
        term *= ratio;
        sum += term;
        k += 1;
        if sum > RESCALE_AT {
            sum /= RESCALE_AT;
            term /= RESCALE_AT;
            log_scale += LN_RESCALE;
        }
        if ratio < 1.0 {
            // remaining tail ≤ term · r / (1 − r) with r the current ratio,
            // which only shrinks from here on
            let tail = term * ratio / (1.0 - ratio);
            if tail <= acc.rel_tol * sum {
                break;
            }
        }
        if k >= max_terms {
            return Err(Error::Numeric(format!("₂F₁({n}, {n}; 1; {z}) series did not converge in {max_terms} terms")));
        }
    }
    Ok(log_scale + sum.ln())
}
