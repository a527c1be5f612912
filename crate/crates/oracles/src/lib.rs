//! Reference values computed the slow, obvious way.
//!
//! Nothing here shares code with `noise-radar`: integrals are adaptive
//! Simpson, roots are bisection, and series are summed in exact integer
//! arithmetic. Everything is deliberately simple and slow.

use num_bigint::BigUint;
use num_traits::{ToPrimitive, Zero};

/// Adaptive Simpson on `[a, b]` to absolute tolerance `tol`.
pub fn simpson<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64) -> f64 {
    #[allow(clippy::too_many_arguments)]
    fn rec<F: Fn(f64) -> f64>(
        f: &F,
        a: f64,
        b: f64,
        fa: f64,
        fm: f64,
        fb: f64,
        whole: f64,
        tol: f64,
        depth: u32,
    ) -> f64 {
        let m = 0.5 * (a + b);
        let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
        let (flm, frm) = (f(lm), f(rm));
        let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
        let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
        let delta = left + right - whole;
        if depth == 0 || delta.abs() <= 15.0 * tol {
            return left + right + delta / 15.0;
        }
        rec(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) + rec(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)
    }
    let m = 0.5 * (a + b);
    let (fa, fm, fb) = (f(a), f(m), f(b));
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    rec(f, a, b, fa, fm, fb, whole, tol, 48)
}

/// Simpson over consecutive pieces of `edges`.
pub fn simpson_pieces<F: Fn(f64) -> f64>(f: &F, edges: &[f64], tol: f64) -> f64 {
    edges.windows(2).map(|w| simpson(f, w[0], w[1], tol / edges.len() as f64)).sum()
}

/// Root of a monotone function by bisection on `[lo, hi]`.
pub fn bisect<F: Fn(f64) -> f64>(f: F, mut lo: f64, mut hi: f64) -> f64 {
    let flo = f(lo);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid == lo || mid == hi {
            break;
        }
        if (f(mid) > 0.0) == (flo > 0.0) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// `erfc(x)` for `x ≥ 0` as `(2/√π) e^{−x²} ∫₀^∞ e^{−2xs − s²} ds`, which
/// keeps full relative precision far into the tail.
pub fn erfc_quad(x: f64) -> f64 {
    assert!(x >= 0.0);
    let g = |s: f64| (-2.0 * x * s - s * s).exp();
    let upper = 40.0 / (2.0 * x + 1.0) + 7.0;
    let edges: Vec<f64> = (0..=200).map(|i| upper * (i as f64 / 200.0).powi(2)).collect();
    let scale = g(0.0);
    let integral = simpson_pieces(&g, &edges, 1e-16 * scale);
    2.0 / std::f64::consts::PI.sqrt() * (-x * x).exp() * integral
}

/// `ln(e^{−x} I₀(x))` from the power series `Σ (x/2)^{2k} / (k!)²`, summed
/// in log space.
pub fn ln_scaled_i0(x: f64) -> f64 {
    if x == 0.0 {
        return 0.0;
    }
    let lh = (0.5 * x).ln();
    let mut ln_fact = 0.0;
    let mut terms = Vec::new();
    let mut k = 0u32;
    loop {
        if k > 0 {
            ln_fact += (k as f64).ln();
        }
        let t = 2.0 * k as f64 * lh - 2.0 * ln_fact;
        terms.push(t);
        if k as f64 > x && t < terms.iter().cloned().fold(f64::MIN, f64::max) - 60.0 {
            break;
        }
        k += 1;
    }
    let m = terms.iter().cloned().fold(f64::MIN, f64::max);
    m + terms.iter().map(|t| (t - m).exp()).sum::<f64>().ln() - x
}

/// Rice density `t exp(−(t² + a²)/2) I₀(at)`.
pub fn rice_pdf(t: f64, a: f64) -> f64 {
    if t <= 0.0 {
        return 0.0;
    }
    (t.ln() - 0.5 * (t - a) * (t - a) + ln_scaled_i0(a * t)).exp()
}

/// `Q₁(a, b)` for every `b` in the ascending list `bs`, by integrating
/// the Rice density downward from far in its upper tail.
pub fn marcum_q1_column(a: f64, bs: &[f64], tol: f64) -> Vec<f64> {
    let top = bs.last().copied().unwrap_or(0.0).max(a) + 40.0;
    let f = |t: f64| rice_pdf(t, a);
    let mut out = vec![0.0; bs.len()];
    let mut acc = 0.0;
    let mut upper = top;
    for (i, &b) in bs.iter().enumerate().rev() {
        let n = (((upper - b) / 0.25).ceil() as usize).max(1);
        let edges: Vec<f64> = (0..=n).map(|j| b + (upper - b) * j as f64 / n as f64).collect();
        acc += simpson_pieces(&f, &edges, tol);
        out[i] = acc;
        upper = b;
    }
    out
}

pub fn marcum_q1(a: f64, b: f64) -> f64 {
    marcum_q1_column(a, &[b], 1e-13)[0]
}

/// `ln ₂F₁(n, n; 1; p/q)` by exact summation of the series in fixed point
/// with `frac_bits` fractional bits.
pub fn ln_hyp2f1_nn1(n: u64, p: u64, q: u64, frac_bits: u64) -> f64 {
    assert!(p < q);
    let one = BigUint::from(1u8) << frac_bits;
    let mut term = one.clone();
    let mut sum = one.clone();
    let mut k = 0u64;
    loop {
        let num = BigUint::from(n + k) * BigUint::from(n + k) * BigUint::from(p);
        let den = BigUint::from(k + 1) * BigUint::from(k + 1) * BigUint::from(q);
        term = term * num / den;
        k += 1;
        if term.is_zero() {
            break;
        }
        sum += &term;
        // past the peak, stop once the term no longer moves the sum
        let past_peak = ((n + k) as f64 / (k + 1) as f64).powi(2) * (p as f64 / q as f64) < 1.0;
        if past_peak && (&term << (frac_bits + 8)) < sum {
            break;
        }
    }
    ln_big(&sum, frac_bits)
}

/// `ln(x / 2^frac_bits)`.
fn ln_big(x: &BigUint, frac_bits: u64) -> f64 {
    let shift = x.bits().saturating_sub(60);
    let top = (x >> shift).to_f64().expect("60-bit value fits");
    top.ln() + (shift as i64 - frac_bits as i64) as f64 * std::f64::consts::LN_2
}

/// Two-sample Kolmogorov–Smirnov statistic `sup |F₁ − F₂|`.
pub fn ks_statistic(a: &[f64], b: &[f64]) -> f64 {
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    a.sort_by(f64::total_cmp);
    b.sort_by(f64::total_cmp);
    let (n, m) = (a.len() as f64, b.len() as f64);
    let (mut i, mut j, mut d) = (0usize, 0usize, 0.0f64);
    while i < a.len() && j < b.len() {
        let x = a[i].min(b[j]);
        while i < a.len() && a[i] <= x {
            i += 1;
        }
        while j < b.len() && b[j] <= x {
            j += 1;
        }
        d = d.max((i as f64 / n - j as f64 / m).abs());
    }
    d
}

/// Asymptotic two-sample KS critical value at significance `alpha`.
pub fn ks_critical(n: usize, m: usize, alpha: f64) -> f64 {
    let c = (-(0.5 * alpha).ln() / 2.0).sqrt();
    c * ((n + m) as f64 / (n as f64 * m as f64)).sqrt()
}
