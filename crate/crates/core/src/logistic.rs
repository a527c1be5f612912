//! Generalized-logistic approximation of detection probability vs `Nρ²`.
//!
//! The small-ρ ROC curves are sigmoids in `x = Nρ²` and are approximated by
//!
//! ```text
//! y(x | A, S, k, d) = A / (1 + S e^{−kx})^d
//! ```
//!
//! with `A = 1` and `d = 2` fixed. `S` and `k` minimize the mean square
//! error over `[0, L]`, `L = 15 − 3 log₁₀(p_fa)`. Unlike the Marcum Q or
//! erfc forms, the logistic inverts in closed form:
//! `x = ln[S / ((A/y)^{1/d} − 1)] / k`.

use std::cell::RefCell;
use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::analytic::SmallRhoFamily;
use crate::error::{domain, Error, Result};
use crate::fmt::sig12;
use crate::optimize::{nelder_mead, NelderMeadOptions};
use crate::quad::gauss_legendre;

/// Fitted (or given) generalized-logistic parameters for one family and
/// false-alarm probability.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LogisticFit {
    pub family: SmallRhoFamily,
    pub pfa: f64,
    /// Upper asymptote.
    pub a: f64,
    pub s: f64,
    pub k: f64,
    /// Exponent.
    pub d: f64,
    /// Mean square error of the fit over `[0, L]`.
    pub epsilon: f64,
}

impl LogisticFit {
    /// A fit with the fixed `A = 1`, `d = 2`.
    pub fn new(family: SmallRhoFamily, pfa: f64, s: f64, k: f64) -> Result<Self> {
        let fit = LogisticFit { family, pfa, a: 1.0, s, k, d: 2.0, epsilon: f64::NAN };
        fit.validate()?;
        Ok(fit)
    }

    fn validate(&self) -> Result<()> {
        let ok = |v: f64| v > 0.0 && v.is_finite();
        if !(ok(self.a) && ok(self.s) && ok(self.k) && ok(self.d)) {
            return domain(format!(
                "logistic parameters must be positive, got A = {}, S = {}, k = {}, d = {}",
                self.a, self.s, self.k, self.d
            ));
        }
        Ok(())
    }
}

#[inline]
fn y(a: f64, s: f64, k: f64, d: f64, x: f64) -> f64 {
    a / (1.0 + s * (-k * x).exp()).powf(d)
}

/// `A / (1 + S e^{−kx})^d`.
pub fn logistic_eval(fit: &LogisticFit, x: f64) -> Result<f64> {
    fit.validate()?;
    if !(x >= 0.0) {
        return domain(format!("logistic argument must be nonnegative, got {x}"));
    }
    Ok(y(fit.a, fit.s, fit.k, fit.d, x))
}

/// Inverse of [`logistic_eval`] for `0 < y < A`.
///
/// Values of `y` below `y(0)` map to negative `x`.
pub fn logistic_inverse(fit: &LogisticFit, y: f64) -> Result<f64> {
    fit.validate()?;
    if !(y > 0.0 && y < fit.a) {
        return domain(format!("logistic inverse needs 0 < y < A = {}, got {y}", fit.a));
    }
    let denom = (fit.a / y).powf(1.0 / fit.d) - 1.0;
    Ok((fit.s / denom).ln() / fit.k)
}

/// Upper integration limit `L = 15 − 3 log₁₀(p_fa)`.
pub fn upper_limit(pfa: f64) -> f64 {
    15.0 - 3.0 * pfa.log10()
}

/// What the fit error integrates over.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FitObjectiveSpec {
    pub family: SmallRhoFamily,
    pub pfa: f64,
    /// Upper integration limit.
    pub upper: f64,
    /// Gauss–Legendre nodes at the first level; doubled until two
    /// successive levels agree.
    pub min_nodes: usize,
    /// Relative agreement required between successive levels.
    pub rel_tol: f64,
}

impl FitObjectiveSpec {
    pub fn new(family: SmallRhoFamily, pfa: f64) -> Result<Self> {
        if !(pfa > 0.0 && pfa < 1.0) {
            return domain(format!("false-alarm probability must lie in (0, 1), got {pfa}"));
        }
        Ok(FitObjectiveSpec { family, pfa, upper: upper_limit(pfa), min_nodes: 256, rel_tol: 1e-10 })
    }
}

const MAX_LEVELS: usize = 7;

struct Level {
    x: Vec<f64>,
    /// Quadrature weights including the Jacobian and the 1/L factor.
    w: Vec<f64>,
    target: Vec<f64>,
}

/// Mean square error between a target curve and the logistic, with the
/// target tabulated once per quadrature level.
///
/// The integral over `x ∈ [0, L]` is taken in `u = √x`, which removes the
/// square-root behaviour of both targets at the origin and leaves a smooth
/// integrand for Gauss–Legendre.
pub struct IseObjective<F> {
    upper: f64,
    min_nodes: usize,
    rel_tol: f64,
    target: F,
    levels: RefCell<Vec<Level>>,
}

impl<F> IseObjective<F>
where
    F: Fn(f64) -> Result<f64>,
{
    pub fn with_target(upper: f64, min_nodes: usize, rel_tol: f64, target: F) -> Result<Self> {
        if !(upper > 0.0 && upper.is_finite()) || min_nodes == 0 {
            return domain(format!("need L > 0 and at least one node, got L = {upper}, nodes = {min_nodes}"));
        }
        Ok(IseObjective { upper, min_nodes, rel_tol, target, levels: RefCell::new(Vec::new()) })
    }

    fn ensure_level(&self, i: usize) -> Result<()> {
        let mut levels = self.levels.borrow_mut();
        while levels.len() <= i {
            let n = self.min_nodes << levels.len();
            let (t, wt) = gauss_legendre(n);
            let r = self.upper.sqrt();
            let mut x = Vec::with_capacity(n);
            let mut w = Vec::with_capacity(n);
            let mut target = Vec::with_capacity(n);
            for (ti, wi) in t.iter().zip(&wt) {
                let u = 0.5 * r * (ti + 1.0);
                let xi = u * u;
                x.push(xi);
                w.push(wi * 0.5 * r * 2.0 * u / self.upper);
                target.push((self.target)(xi)?);
            }
            levels.push(Level { x, w, target });
        }
        Ok(())
    }

    fn at_level(&self, i: usize, s: f64, k: f64) -> f64 {
        let levels = self.levels.borrow();
        let lv = &levels[i];
        lv.x.iter()
            .zip(&lv.w)
            .zip(&lv.target)
            .map(|((&x, &w), &t)| {
                let r = t - y(1.0, s, k, 2.0, x);
                w * r * r
            })
            .sum()
    }

    /// Error of `y(x | 1, S, k, 2)` against the target.
    pub fn evaluate(&self, s: f64, k: f64) -> Result<f64> {
        if !(s > 0.0 && k > 0.0 && s.is_finite() && k.is_finite()) {
            return domain(format!("S and k must be positive, got S = {s}, k = {k}"));
        }
        self.ensure_level(0)?;
        let mut prev = self.at_level(0, s, k);
        for i in 1..MAX_LEVELS {
            self.ensure_level(i)?;
            let cur = self.at_level(i, s, k);
            if (cur - prev).abs() <= self.rel_tol * cur.abs() + 1e-24 {
                return Ok(cur);
            }
            prev = cur;
        }
        Err(Error::Numeric(format!(
            "fit error did not settle within {} nodes at S = {s}, k = {k}",
            self.min_nodes << (MAX_LEVELS - 1)
        )))
    }
}

/// The objective for one row of the tables.
pub fn objective(spec: &FitObjectiveSpec) -> Result<IseObjective<impl Fn(f64) -> Result<f64>>> {
    let family = spec.family;
    let pfa = spec.pfa;
    IseObjective::with_target(spec.upper, spec.min_nodes, spec.rel_tol, move |x| family.pd(pfa, x))
}

/// `(1/L) ∫₀ᴸ [target(x) − y(x | 1, S, k, 2)]² dx` for the family's
/// small-ρ ROC as target.
pub fn ise_objective(spec: &FitObjectiveSpec, s: f64, k: f64) -> Result<f64> {
    objective(spec)?.evaluate(s, k)
}

fn log_grid(lo: f64, hi: f64, n: usize) -> impl Iterator<Item = f64> {
    let (a, b) = (lo.ln(), hi.ln());
    (0..n).map(move |i| (a + (b - a) * i as f64 / (n - 1) as f64).exp())
}

/// Minimizes the fit error over `(S, k)` with multi-start Nelder–Mead.
///
/// Starts lie on a log-spaced grid over `S ∈ [0.5, 100]`, `k ∈ [0.05, 2]`;
/// the search runs in `(ln S, ln k)` so both stay positive. The best
/// converged start is polished by one more restart.
pub fn fit_logistic(spec: &FitObjectiveSpec) -> Result<LogisticFit> {
    let obj = objective(spec)?;
    let f = |p: &[f64]| obj.evaluate(p[0].exp(), p[1].exp()).unwrap_or(f64::INFINITY);
    let opts = NelderMeadOptions { f_tol: 1e-10, f_abs: 1e-24, x_tol: 1e-9, max_evals: 5_000, step: 0.3 };

    let mut best: Option<(Vec<f64>, f64)> = None;
    let mut failures = Vec::new();
    for s0 in log_grid(0.5, 100.0, 6) {
        for k0 in log_grid(0.05, 2.0, 5) {
            let m = nelder_mead(f, &[s0.ln(), k0.ln()], &opts);
            if !m.converged || !m.f.is_finite() {
                failures.push(format!("start (S={s0:.3}, k={k0:.3}): f = {:.3e} after {} evals", m.f, m.evals));
                continue;
            }
            if best.as_ref().is_none_or(|(_, fb)| m.f < *fb) {
                best = Some((m.x, m.f));
            }
        }
    }
    let Some((x, _)) = best else {
        return Err(Error::Optimization(format!(
            "no Nelder–Mead start converged for {} at pfa = {}: {}",
            spec.family,
            spec.pfa,
            failures.join("; ")
        )));
    };
    let polish = nelder_mead(f, &x, &NelderMeadOptions { step: 0.05, ..opts });
    let (s, k) = (polish.x[0].exp(), polish.x[1].exp());
    Ok(LogisticFit { family: spec.family, pfa: spec.pfa, a: 1.0, s, k, d: 2.0, epsilon: polish.f })
}

/// False-alarm probabilities of the tables, `10⁻¹ … 10⁻¹⁰`.
pub fn table_pfas() -> Vec<f64> {
    (1..=10).map(|e| 10f64.powi(-e)).collect()
}

/// Fits every (family, p_fa) row: `D₀` first, then Marcum, each for
/// `p_fa = 10⁻¹ … 10⁻¹⁰`.
pub fn reproduce_tables() -> Result<Vec<LogisticFit>> {
    let specs: Vec<FitObjectiveSpec> = [SmallRhoFamily::D0, SmallRhoFamily::Marcum]
        .into_iter()
        .flat_map(|fam| table_pfas().into_iter().map(move |p| FitObjectiveSpec::new(fam, p)))
        .collect::<Result<_>>()?;
    specs.par_iter().map(fit_logistic).collect()
}

/// Writes `family,pfa,S,k,epsilon` rows.
pub fn write_table_csv<W: Write>(rows: &[LogisticFit], w: W) -> Result<()> {
    let mut wtr = csv::Writer::from_writer(w);
    wtr.write_record(["family", "pfa", "S", "k", "epsilon"])?;
    for r in rows {
        wtr.write_record([r.family.name().to_string(), sig12(r.pfa), sig12(r.s), sig12(r.k), sig12(r.epsilon)])?;
    }
    wtr.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fit(s: f64, k: f64) -> LogisticFit {
        LogisticFit::new(SmallRhoFamily::Marcum, 1e-6, s, k).unwrap()
    }

    #[test]
    fn eval_limits() {
        let f = fit(16.2928, 0.275043);
        assert!((logistic_eval(&f, 0.0).unwrap() - 1.0 / (17.2928_f64).powi(2)).abs() < 1e-15);
        assert!((logistic_eval(&f, 500.0).unwrap() - 1.0).abs() < 1e-15);
        let std = LogisticFit { a: 1.0, s: 1.0, k: 1.0, d: 1.0, ..f };
        assert_eq!(logistic_eval(&std, 0.0).unwrap(), 0.5);
        assert!(logistic_eval(&f, -1.0).is_err());
    }

    #[test]
    fn inverse_round_trip() {
        let f = fit(16.2928, 0.275043);
        for &y in &[0.1, 0.5, 0.95] {
            let x = logistic_inverse(&f, y).unwrap();
            let back = logistic_eval(&f, x).unwrap();
            assert!((back / y - 1.0).abs() < 1e-10);
        }
        let y0 = 1.0 / (17.2928_f64).powi(2);
        assert!(logistic_inverse(&f, y0).unwrap().abs() < 1e-12);
        assert!(logistic_inverse(&f, 1.0).is_err());
        assert!(logistic_inverse(&f, 0.0).is_err());
    }

    #[test]
    fn self_fit_has_zero_error() {
        let obj = IseObjective::with_target(30.0, 256, 1e-10, |x| Ok(y(1.0, 4.0, 0.4, 2.0, x))).unwrap();
        assert!(obj.evaluate(4.0, 0.4).unwrap().abs() < 1e-12);
        assert!(obj.evaluate(4.5, 0.4).unwrap() > 0.0);
    }

    #[test]
    fn limit_formula() {
        assert_eq!(upper_limit(1e-2), 21.0);
        assert_eq!(upper_limit(1e-10), 45.0);
    }
}
