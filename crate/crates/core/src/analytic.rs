//! Closed-form and quadrature-based detection performance.
//!
//! The small-ρ families take `Nρ²` as their only performance parameter, so
//! curves at equal `Nρ²` coincide by construction. The finite-ρ formulas
//! depend on `ρ` and `N` separately.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::quad;
use crate::roc::{validate_pfa_grid, Provenance, RocCurve, RocPoint};
use crate::specfun::{erfc, erfc_inv, log_hyp2f1_nn1, marcum_q1};

/// Sample count below which the Marcum-Q ROC of ρ̂ is flagged as outside
/// its validity range.
pub const RHOHAT_LARGE_N_MIN: u64 = 100;

/// Absolute tolerance for the exact ρ̂ detection probability.
pub const EXACT_PD_TOL: f64 = 1e-8;

fn check_pfa(pfa: f64) -> Result<()> {
    if !(pfa > 0.0 && pfa < 1.0) {
        return domain(format!("false-alarm probability must lie in (0, 1), got {pfa}"));
    }
    Ok(())
}

fn check_rho(rho: f64) -> Result<()> {
    if !(0.0..1.0).contains(&rho) {
        return domain(format!("correlation coefficient must lie in [0, 1), got {rho}"));
    }
    Ok(())
}

fn check_nrho2(nrho2: f64) -> Result<()> {
    if !(nrho2 >= 0.0 && nrho2.is_finite()) {
        return domain(format!("Nρ² must be finite and nonnegative, got {nrho2}"));
    }
    Ok(())
}

/// Large-N ROC of `D₀`:
/// `½ erfc[(erfc⁻¹(2p_fa) − √N ρ cos φ) / √(1 + ρ² cos² φ)]`.
pub fn pd_d0_large_n(pfa: f64, rho: f64, n: u64, phi: f64) -> Result<f64> {
    check_pfa(pfa)?;
    check_rho(rho)?;
    if n == 0 || !phi.is_finite() {
        return domain(format!("need n >= 1 and finite φ, got n = {n}, φ = {phi}"));
    }
    let c = rho * phi.cos();
    let arg = (erfc_inv(2.0 * pfa)? - (n as f64).sqrt() * c) / (1.0 + c * c).sqrt();
    Ok(0.5 * erfc(arg)?)
}

/// First-order-in-ρ ROC of `D₀` at `φ = 0`: `½ erfc[erfc⁻¹(2p_fa) − √(Nρ²)]`.
pub fn pd_d0_small_rho(pfa: f64, nrho2: f64) -> Result<f64> {
    check_pfa(pfa)?;
    check_nrho2(nrho2)?;
    Ok(0.5 * erfc(erfc_inv(2.0 * pfa)? - nrho2.sqrt())?)
}

/// Detection probability together with a validity flag.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FlaggedPd {
    pub pd: f64,
    /// Set when `N` is below the range where the formula is accurate.
    pub below_validity: bool,
}

/// Large-N ROC of `ρ̂`:
/// `Q₁(ρ√(2N) / (1 − ρ²), √(−2 ln p_fa) / (1 − ρ²))`.
///
/// The result is flagged, not refused, for `N` below about 100.
pub fn pd_rhohat_large_n(pfa: f64, rho: f64, n: u64) -> Result<FlaggedPd> {
    check_pfa(pfa)?;
    check_rho(rho)?;
    if n == 0 {
        return domain("need n >= 1");
    }
    let scale = 1.0 / (1.0 - rho * rho);
    let a = rho * (2.0 * n as f64).sqrt() * scale;
    let b = (-2.0 * pfa.ln()).sqrt() * scale;
    Ok(FlaggedPd { pd: marcum_q1(a, b)?, below_validity: n < RHOHAT_LARGE_N_MIN })
}

/// Small-ρ ROC shared by `ρ̂` and `D_MF`: `Q₁(√(2Nρ²), √(−2 ln p_fa))`.
pub fn pd_small_rho_marcum(pfa: f64, nrho2: f64) -> Result<f64> {
    check_pfa(pfa)?;
    check_nrho2(nrho2)?;
    marcum_q1((2.0 * nrho2).sqrt(), (-2.0 * pfa.ln()).sqrt())
}

fn check_pdf_args(rho: f64, n: u64) -> Result<()> {
    check_rho(rho)?;
    if n < 2 {
        return domain(format!("the ρ̂ density needs n >= 2, got {n}"));
    }
    Ok(())
}

/// Logarithm of the exact density of `ρ̂`,
/// `f(x) = 2(N−1)(1−ρ²)ᴺ x (1−x²)^{N−2} ₂F₁(N, N; 1; ρ²x²)`.
pub fn rhohat_log_pdf(x: f64, rho: f64, n: u64) -> Result<f64> {
    check_pdf_args(rho, n)?;
    if !(0.0..=1.0).contains(&x) {
        return domain(format!("ρ̂ density is supported on [0, 1], got x = {x}"));
    }
    if x == 0.0 {
        return Ok(f64::NEG_INFINITY);
    }
    let nf = n as f64;
    let one_minus_x2 = (1.0 - x) * (1.0 + x);
    let tail = if n == 2 {
        0.0
    } else if one_minus_x2 == 0.0 {
        return Ok(f64::NEG_INFINITY);
    } else {
        (nf - 2.0) * one_minus_x2.ln()
    };
    let nn = u32::try_from(n).map_err(|_| Error::Domain(format!("n = {n} is too large")))?;
    let hyp = log_hyp2f1_nn1(nn, rho * rho * x * x)?;
    Ok(std::f64::consts::LN_2 + (nf - 1.0).ln() + nf * (-rho * rho).ln_1p() + x.ln() + tail + hyp)
}

/// Exact density of `ρ̂` for `x ∈ [0, 1]`.
pub fn rhohat_pdf(x: f64, rho: f64, n: u64) -> Result<f64> {
    Ok(rhohat_log_pdf(x, rho, n)?.exp())
}

/// Threshold `T` with `P(ρ̂ > T | ρ = 0) = p_fa`.
///
/// Under the null the CDF is `1 − (1 − x²)^{N−1}`, so
/// `T = √(1 − p_fa^{1/(N−1)})`.
pub fn rhohat_null_threshold(pfa: f64, n: u64) -> Result<f64> {
    check_pfa(pfa)?;
    if n < 2 {
        return domain(format!("the ρ̂ null threshold needs n >= 2, got {n}"));
    }
    Ok((-(pfa.ln() / (n as f64 - 1.0)).exp_m1()).sqrt())
}

/// Breakpoints that bracket the bulk of the ρ̂ density.
fn rhohat_breakpoints(rho: f64, n: u64, extra: &[f64]) -> Vec<f64> {
    let nf = n as f64;
    let center = (rho * rho + 1.0 / nf).sqrt();
    let width = ((1.0 - rho * rho) / nf.sqrt()).max(1e-6);
    let mut pts: Vec<f64> = (-16..=16).map(|j| center + j as f64 * 0.5 * width).collect();
    pts.extend((1..32).map(|j| j as f64 / 32.0));
    pts.extend_from_slice(extra);
    pts.retain(|p| *p > 0.0 && *p < 1.0);
    pts
}

/// `∫ f_ρ̂` over `[lo, hi]`.
pub fn rhohat_integral(lo: f64, hi: f64, rho: f64, n: u64, abs_tol: f64) -> Result<quad::Integral> {
    check_pdf_args(rho, n)?;
    let lo = lo.clamp(0.0, 1.0);
    let hi = hi.clamp(0.0, 1.0);
    let bps = rhohat_breakpoints(rho, n, &[lo, hi]);
    let f = |x: f64| rhohat_log_pdf(x, rho, n).map(f64::exp).unwrap_or(f64::NAN);
    let r = quad::integrate(f, lo, hi, &bps, abs_tol, 200_000)?;
    if !r.value.is_finite() {
        return Err(Error::Numeric(format!(
            "ρ̂ density integral over [{lo}, {hi}] at ρ = {rho}, N = {n} is not finite"
        )));
    }
    Ok(r)
}

/// Exact detection probability of `ρ̂`, `∫_T¹ f_ρ̂(x | ρ, N) dx`.
pub fn pd_rhohat_exact(pfa: f64, rho: f64, n: u64) -> Result<f64> {
    let t = rhohat_null_threshold(pfa, n)?;
    check_rho(rho)?;
    let tol = 0.01 * EXACT_PD_TOL;
    let upper = rhohat_integral(t, 1.0, rho, n, tol)?;
    // For detection probabilities near one, the complement is the better
    // conditioned integral.
    let pd = if upper.value > 0.5 {
        let lower = rhohat_integral(0.0, t, rho, n, tol)?;
        1.0 - lower.value
    } else {
        upper.value
    };
    Ok(pd.clamp(0.0, 1.0))
}

/// The two invertible small-ρ families.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SmallRhoFamily {
    /// `D₀`, first order in ρ.
    D0,
    /// `ρ̂` and `D_MF` (Marcum Q).
    Marcum,
}

impl SmallRhoFamily {
    pub fn pd(self, pfa: f64, nrho2: f64) -> Result<f64> {
        match self {
            SmallRhoFamily::D0 => pd_d0_small_rho(pfa, nrho2),
            SmallRhoFamily::Marcum => pd_small_rho_marcum(pfa, nrho2),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            SmallRhoFamily::D0 => "d0",
            SmallRhoFamily::Marcum => "marcum",
        }
    }
}

impl fmt::Display for SmallRhoFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SmallRhoFamily {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "d0" | "erf" | "erfc" => Ok(SmallRhoFamily::D0),
            "marcum" | "rhohat" | "mf" => Ok(SmallRhoFamily::Marcum),
            other => Err(Error::Domain(format!("unknown family {other:?} (expected d0 or marcum)"))),
        }
    }
}

/// Smallest `Nρ²` reaching detection probability `pd` at false-alarm
/// probability `pfa`, by bisection on the monotone small-ρ ROC.
pub fn required_nrho2(pd: f64, pfa: f64, family: SmallRhoFamily) -> Result<f64> {
    check_pfa(pfa)?;
    if !(pd > pfa && pd < 1.0) {
        return domain(format!("need 0 < pfa < pd < 1, got pd = {pd}, pfa = {pfa}"));
    }
    let f = |x: f64| family.pd(pfa, x).map(|v| v - pd);
    let mut lo = 0.0;
    let mut hi = 200.0 - 40.0 * pfa.log10();
    let mut expansions = 0;
    while f(hi)? < 0.0 {
        lo = hi;
        hi *= 2.0;
        expansions += 1;
        if expansions > 60 {
            return Err(Error::Numeric(format!("could not bracket Nρ² for pd = {pd}, pfa = {pfa}")));
        }
    }
    for _ in 0..400 {
        let mid = 0.5 * (lo + hi);
        if f(mid)? < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= 1e-12 * hi {
            break;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Which formula produces a curve.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RocFamily {
    D0FirstOrder,
    D0LargeN,
    #[serde(rename = "rhohat_large_n")]
    RhoHatLargeN,
    #[serde(rename = "rhohat_small_rho")]
    RhoHatSmallRho,
    MfLargeN,
    #[serde(rename = "rhohat_exact")]
    RhoHatExact,
}

impl RocFamily {
    pub const ALL: [RocFamily; 6] = [
        RocFamily::D0FirstOrder,
        RocFamily::D0LargeN,
        RocFamily::RhoHatLargeN,
        RocFamily::RhoHatSmallRho,
        RocFamily::MfLargeN,
        RocFamily::RhoHatExact,
    ];

    pub fn name(self) -> &'static str {
        match self {
            RocFamily::D0FirstOrder => "d0_first_order",
            RocFamily::D0LargeN => "d0_large_n",
            RocFamily::RhoHatLargeN => "rhohat_large_n",
            RocFamily::RhoHatSmallRho => "rhohat_small_rho",
            RocFamily::MfLargeN => "mf_large_n",
            RocFamily::RhoHatExact => "rhohat_exact",
        }
    }

    /// True for families that depend on `ρ` and `N` only through `Nρ²`.
    pub fn is_small_rho(self) -> bool {
        matches!(self, RocFamily::D0FirstOrder | RocFamily::RhoHatSmallRho | RocFamily::MfLargeN)
    }
}

impl fmt::Display for RocFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for RocFamily {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        RocFamily::ALL
            .into_iter()
            .find(|f| f.name() == s.to_ascii_lowercase())
            .ok_or_else(|| Error::Domain(format!("unknown ROC family {s:?}")))
    }
}

/// Operating point of a curve: either `Nρ²` alone or a finite `(ρ, N, φ)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OperatingPoint {
    Nrho2(f64),
    Finite { rho: f64, n: u64, phi: f64 },
}

impl OperatingPoint {
    pub fn nrho2(&self) -> f64 {
        match *self {
            OperatingPoint::Nrho2(x) => x,
            OperatingPoint::Finite { rho, n, .. } => n as f64 * rho * rho,
        }
    }
}

/// Detection probability of `family` at one false-alarm probability.
pub fn pd(family: RocFamily, pfa: f64, at: &OperatingPoint) -> Result<f64> {
    if family.is_small_rho() {
        let x = at.nrho2();
        return match family {
            RocFamily::D0FirstOrder => pd_d0_small_rho(pfa, x),
            _ => pd_small_rho_marcum(pfa, x),
        };
    }
    let OperatingPoint::Finite { rho, n, phi } = *at else {
        return domain(format!("{family} needs finite (ρ, N), not Nρ² alone"));
    };
    match family {
        RocFamily::D0LargeN => pd_d0_large_n(pfa, rho, n, phi),
        RocFamily::RhoHatLargeN => pd_rhohat_large_n(pfa, rho, n).map(|r| r.pd),
        RocFamily::RhoHatExact => pd_rhohat_exact(pfa, rho, n),
        _ => unreachable!("small-ρ families handled above"),
    }
}

/// Evaluates `family` over a strictly increasing false-alarm grid.
pub fn roc_curve(family: RocFamily, at: &OperatingPoint, pfa_grid: &[f64]) -> Result<RocCurve> {
    validate_pfa_grid(pfa_grid)?;
    let points = pfa_grid
        .iter()
        .map(|&pfa| Ok(RocPoint { pfa, pd: pd(family, pfa, at)?, stderr: None }))
        .collect::<Result<Vec<_>>>()?;
    let provenance = Provenance { source: family.name().to_string(), params: serde_json::to_value(at)? };
    RocCurve::new(points, provenance)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn d0_chance_line_and_quadrature_phase() {
        for &pfa in &[1e-1, 1e-4, 1e-9] {
            assert!((pd_d0_large_n(pfa, 0.0, 1000, 0.0).unwrap() - pfa).abs() < 1e-12 * pfa.max(1e-3));
            let v = pd_d0_large_n(pfa, 0.4, 1000, std::f64::consts::FRAC_PI_2).unwrap();
            assert!((v - pfa).abs() < 1e-9 * pfa.max(1e-3) + 1e-15);
        }
    }

    #[test]
    fn d0_first_order_close_to_full_at_small_rho() {
        let a = pd_d0_small_rho(1e-6, 25.0).unwrap();
        let b = pd_d0_large_n(1e-6, 0.05, 10_000, 0.0).unwrap();
        assert!((a - b).abs() < 1e-3, "{a} vs {b}");
    }

    #[test]
    fn rhohat_large_n_edges() {
        let r = pd_rhohat_large_n(1e-3, 0.0, 500).unwrap();
        assert!((r.pd - 1e-3).abs() < 1e-15);
        assert!(!r.below_validity);
        assert!(pd_rhohat_large_n(1e-3, 0.1, 50).unwrap().below_validity);
        let near_one = pd_rhohat_large_n(1.0 - 1e-12, 0.2, 500).unwrap().pd;
        assert!(near_one > 1.0 - 1e-6);
    }

    #[test]
    fn null_threshold_closed_form() {
        let t = rhohat_null_threshold(1e-2, 2).unwrap();
        assert!((t - 0.99_f64.sqrt()).abs() < 1e-15);
        assert!(rhohat_null_threshold(1.0, 10).is_err());
        let t = rhohat_null_threshold(1e-2, 10_000).unwrap();
        let asym = (-2.0 * 0.01_f64.ln() / 2e4).sqrt();
        assert!((t / asym - 1.0).abs() < 0.01);
    }

    #[test]
    fn pdf_special_cases() {
        // ρ = 0, N = 2: f(x) = 2x
        for &x in &[0.1, 0.5, 0.9, 1.0] {
            assert!((rhohat_pdf(x, 0.0, 2).unwrap() - 2.0 * x).abs() < 1e-14);
        }
        assert_eq!(rhohat_pdf(0.0, 0.3, 10).unwrap(), 0.0);
        assert_eq!(rhohat_pdf(1.0, 0.3, 10).unwrap(), 0.0);
        assert!(rhohat_pdf(0.5, 0.3, 1).is_err());
        // ρ = 0 closed form
        let (x, n) = (0.3_f64, 7_u64);
        let expect = 2.0 * 6.0 * x * (1.0 - x * x).powi(5);
        assert!((rhohat_pdf(x, 0.0, n).unwrap() - expect).abs() < 1e-13);
    }

    #[test]
    fn exact_pd_is_pfa_without_target() {
        for &n in &[2_u64, 10, 1000] {
            let v = pd_rhohat_exact(1e-3, 0.0, n).unwrap();
            assert!((v - 1e-3).abs() < 1e-8, "n = {n}: {v}");
        }
    }

    #[test]
    fn required_rejects_below_chance() {
        assert!(required_nrho2(0.5, 0.5, SmallRhoFamily::Marcum).is_err());
        assert!(required_nrho2(0.1, 0.2, SmallRhoFamily::D0).is_err());
        assert!(required_nrho2(1.0, 0.2, SmallRhoFamily::D0).is_err());
    }

    #[test]
    fn finite_family_needs_finite_point() {
        assert!(pd(RocFamily::RhoHatExact, 0.1, &OperatingPoint::Nrho2(4.0)).is_err());
        assert!(pd(RocFamily::MfLargeN, 0.1, &OperatingPoint::Nrho2(4.0)).is_ok());
    }

    #[test]
    fn family_names_round_trip() {
        for f in RocFamily::ALL {
            assert_eq!(f.name().parse::<RocFamily>().unwrap(), f);
        }
    }
}
