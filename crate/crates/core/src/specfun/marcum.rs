use super::gamma::{ln_gamma_pos, regularized_gamma};
use super::Accuracy;
use crate::error::{domain, Result};

/// Marcum Q-function of order 1 with default accuracy.
pub fn marcum_q1(a: f64, b: f64) -> Result<f64> {
    marcum_q1_with(a, b, Accuracy::default())
}

/// Marcum Q-function of order 1, `Q₁(a, b) = ∫_b^∞ t e^{-(t²+a²)/2} I₀(at) dt`.
///
/// Evaluated as the Poisson mixture
/// `Σ_k Pois(k; a²/2) · Q(k + 1, b²/2)` where `Q` is the regularized upper
/// incomplete gamma function. The sum is started at the Poisson mode and
/// walked outward in both directions, so the number of terms grows like
/// `a` rather than `a²`. When `b ≤ a` the result is near one and the
/// complementary sum over `P(k + 1, b²/2)` is accumulated instead, so every
/// partial sum adds nonnegative terms.
pub fn marcum_q1_with(a: f64, b: f64, acc: Accuracy) -> Result<f64> {
    if !(a >= 0.0 && a.is_finite()) || !(b >= 0.0 && b.is_finite()) {
        return domain(format!("marcum_q1 requires finite nonnegative arguments, got ({a}, {b})"));
    }
    if b == 0.0 {
        return Ok(1.0);
    }
    let beta = 0.5 * b * b;
    if a == 0.0 {
        return Ok((-beta).exp());
    }
    let alpha = 0.5 * a * a;
    let upper = b > a;

    let mode = alpha.floor();
    let k0 = mode as u64;
    let w0 = (-alpha + mode * alpha.ln() - ln_gamma_pos(mode + 1.0)).exp();
    // v(k) = e^{-β} β^k / k!, the gap P(k, β) - P(k + 1, β)
    let v_at = |k: f64| (-beta + k * beta.ln() - ln_gamma_pos(k + 1.0)).exp();
    let (p0, q0) = regularized_gamma(mode + 1.0, beta)?;
    let g0 = if upper { q0 } else { p0 };

    let mut sum = w0 * g0;

    // walk up: k = k0 + 1, k0 + 2, ...
    {
        let mut w = w0;
        let mut g = g0;
        let mut v = v_at(mode + 1.0);
        let mut k = k0;
        let cap = k0 + 1000 + (60.0 * alpha.sqrt()) as u64;
        while k < cap {
            k += 1;
            w *= alpha / k as f64;
            // G(k + 1) from G(k): Q gains v(k), P loses it
            if upper {
                g += v;
            } else {
                g = (g - v).max(0.0);
            }
            v *= beta / (k + 1) as f64;
            let term = w * g;
            sum += term;
            let bound = if upper { w } else { term };
            if bound <= acc.rel_tol * sum.max(acc.abs_tol) {
                break;
            }
        }
    }

    // walk down: k = k0 - 1, ..., 0
    {
        let mut w = w0;
        let mut g = g0;
        let mut v = v_at(mode);
        let mut k = k0;
        while k > 0 {
            w *= k as f64 / alpha;
            // G(k) from G(k + 1): Q loses v(k), P gains it
            if upper {
                g = (g - v).max(0.0);
            } else {
                g += v;
            }
            v *= k as f64 / beta;
            k -= 1;
            let term = w * g;
            sum += term;
            if w <= acc.rel_tol * sum.max(acc.abs_tol) {
                break;
            }
        }
    }

    let q = if upper { sum } else { 1.0 - sum };
    Ok(q.clamp(0.0, 1.0))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn threshold_zero_is_certain() {
        for &a in &[0.0, 0.5, 3.0, 40.0] {
            assert_eq!(marcum_q1(a, 0.0).unwrap(), 1.0);
        }
    }

    #[test]
    fn zero_noncentrality_is_rayleigh_tail() {
        let b = (-2.0 * 0.01_f64.ln()).sqrt();
        assert!((marcum_q1(0.0, b).unwrap() - 0.01).abs() < 1e-15);
        let b = (-2.0 * 1e-10_f64.ln()).sqrt();
        assert!((marcum_q1(0.0, b).unwrap() / 1e-10 - 1.0).abs() < 1e-12);
    }

    #[test]
    fn small_a_continuity() {
        let b = 2.0;
        let q0 = marcum_q1(0.0, b).unwrap();
        let q = marcum_q1(1e-6, b).unwrap();
        assert!((q - q0).abs() < 1e-10);
    }

    #[test]
    fn symmetric_identity() {
        // Q₁(a, b) + Q₁(b, a) = 1 + e^{-(a²+b²)/2} I₀(ab)
        let (a, b) = (1.3_f64, 2.1_f64);
        let x = a * b;
        let mut i0 = 0.0;
        let mut term = 1.0;
        for k in 0..60 {
            if k > 0 {
                term *= (x / 2.0).powi(2) / (k as f64 * k as f64);
            }
            i0 += term;
        }
        let lhs = marcum_q1(a, b).unwrap() + marcum_q1(b, a).unwrap();
        let rhs = 1.0 + (-(a * a + b * b) / 2.0).exp() * i0;
        assert!((lhs - rhs).abs() < 1e-13, "{lhs} vs {rhs}");
    }

    #[test]
    fn large_arguments_stay_in_range() {
        let q = marcum_q1(300.0, 290.0).unwrap();
        assert!(q > 0.999 && q <= 1.0);
        let q = marcum_q1(290.0, 300.0).unwrap();
        assert!(q < 1e-15);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(marcum_q1(-1.0, 1.0).is_err());
        assert!(marcum_q1(1.0, f64::NAN).is_err());
    }
}
