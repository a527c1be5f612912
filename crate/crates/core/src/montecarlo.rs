//! Monte Carlo estimation of thresholds, detection probabilities and ROC
//! curves.
//!
//! Trial `t` of a run draws from the stream `(seed, hypothesis, t)`, so a
//! run is bitwise reproducible for any number of workers. Blocks with more
//! than 16 samples are simulated through their scatter matrix by default
//! (see [`SamplingMode`]), which has exactly the distribution of the
//! sample-by-sample sums but costs O(1) per trial.

use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::detectors::{value_of, DetectorKind};
use crate::error::{domain, Error, Result};
use crate::fmt::sig12;
use crate::rng::{self, stream_rng};
use crate::roc::{validate_pfa_grid, Provenance, RocCurve, RocPoint};
use crate::signal::{build_covariance, draw_aux_stats, SamplingMode, SignalParams};

/// Minimum expected number of null exceedances for a usable tail quantile.
pub const MIN_EXCEEDANCES: f64 = 100.0;

/// One Monte Carlo experiment.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct McConfig {
    pub kind: DetectorKind,
    pub params: SignalParams,
    /// Samples integrated per block.
    pub n: usize,
    /// Independent blocks per hypothesis.
    pub trials: usize,
    pub seed: u64,
    #[serde(default)]
    pub mode: SamplingMode,
    /// Worker threads; `None` uses the global pool. Does not affect results
    /// and is not serialized.
    #[serde(skip)]
    pub workers: Option<usize>,
}

impl McConfig {
    pub fn new(kind: DetectorKind, params: SignalParams, n: usize, trials: usize, seed: u64) -> Self {
        McConfig { kind, params, n, trials, seed, mode: SamplingMode::Auto, workers: None }
    }

    pub fn with_workers(mut self, workers: usize) -> Self {
        self.workers = Some(workers);
        self
    }

    pub fn with_mode(mut self, mode: SamplingMode) -> Self {
        self.mode = mode;
        self
    }

    fn validate(&self) -> Result<()> {
        self.params.validate()?;
        if self.trials == 0 {
            return domain("Monte Carlo needs at least one trial");
        }
        if self.n == 0 {
            return domain("blocks need at least one sample");
        }
        if self.kind == DetectorKind::RhoHat && self.n < 2 {
            // with one sample ρ̂ ≡ 1
            return domain("ρ̂ needs blocks of at least two samples");
        }
        Ok(())
    }
}

/// Outcome of a detection-probability estimate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct McResult {
    pub pd_hat: f64,
    /// Target false-alarm probability the threshold was calibrated for.
    pub pfa_target: Option<f64>,
    pub threshold: f64,
    /// `√(p̂(1 − p̂) / trials)`.
    pub stderr: f64,
    pub detections: usize,
    pub config: McConfig,
}

impl McResult {
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    /// Header plus one data row.
    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut wtr = csv::Writer::from_writer(w);
        wtr.write_record([
            "kind",
            "rho",
            "phi",
            "sigma1",
            "sigma2",
            "variant",
            "n",
            "trials",
            "seed",
            "pfa_target",
            "threshold",
            "detections",
            "pd_hat",
            "stderr",
        ])?;
        let c = &self.config;
        wtr.write_record([
            c.kind.name().to_string(),
            sig12(c.params.rho),
            sig12(c.params.phi),
            sig12(c.params.sigma1),
            sig12(c.params.sigma2),
            format!("{:?}", c.params.variant).to_lowercase(),
            c.n.to_string(),
            c.trials.to_string(),
            c.seed.to_string(),
            self.pfa_target.map(sig12).unwrap_or_default(),
            sig12(self.threshold),
            self.detections.to_string(),
            sig12(self.pd_hat),
            sig12(self.stderr),
        ])?;
        wtr.flush()?;
        Ok(())
    }
}

fn run_in_pool<T: Send>(workers: Option<usize>, job: impl FnOnce() -> T + Send) -> Result<T> {
    match workers {
        None => Ok(job()),
        Some(k) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(k.max(1))
                .build()
                .map_err(|e| Error::Numeric(format!("could not start {k} workers: {e}")))?;
            Ok(pool.install(job))
        }
    }
}

/// Detector values of `trials` independent blocks drawn under `params`, in
/// trial order. `hypothesis` selects the stream domain.
pub fn simulate_statistics(cfg: &McConfig, hypothesis: u64) -> Result<Vec<f64>> {
    cfg.validate()?;
    let factor = build_covariance(&cfg.params)?.square_root();
    let McConfig { kind, n, seed, mode, params, .. } = *cfg;
    run_in_pool(cfg.workers, || {
        (0..cfg.trials as u64)
            .into_par_iter()
            .map(|t| {
                let mut rng = stream_rng(seed, hypothesis, t);
                let aux = draw_aux_stats(&factor, n, params.variant, mode, &mut rng);
                value_of(kind, &aux)
            })
            .collect()
    })
}

fn check_quantile(trials: usize, pfa: f64) -> Result<()> {
    if !(pfa > 0.0 && pfa < 1.0) {
        return domain(format!("false-alarm probability must lie in (0, 1), got {pfa}"));
    }
    if (trials as f64) * pfa < MIN_EXCEEDANCES - 1e-9 {
        return Err(Error::InsufficientTrials { trials, pfa, min_trials: (MIN_EXCEEDANCES / pfa).ceil() as usize });
    }
    Ok(())
}

/// Upper `pfa` quantile of sorted null statistics: the order statistic at
/// one-based index `⌈trials · (1 − pfa)⌉`.
fn upper_quantile(sorted: &[f64], pfa: f64) -> f64 {
    let trials = sorted.len();
    let exceed = ((trials as f64) * pfa + 1e-9).floor() as usize;
    let idx = trials - exceed.min(trials - 1);
    sorted[idx - 1]
}

/// Empirical `(1 − pfa)`-quantile of the detector under the null.
///
/// `cfg.params` must have `ρ = 0`.
pub fn calibrate_threshold(cfg: &McConfig, pfa: f64) -> Result<f64> {
    if cfg.params.rho != 0.0 {
        return domain(format!("calibration runs under the null, but ρ = {}", cfg.params.rho));
    }
    check_quantile(cfg.trials, pfa)?;
    let mut stats = simulate_statistics(cfg, rng::domain::NULL)?;
    stats.sort_by(f64::total_cmp);
    Ok(upper_quantile(&stats, pfa))
}

fn summarize(cfg: &McConfig, stats: &[f64], threshold: f64, pfa_target: Option<f64>) -> McResult {
    let detections = stats.iter().filter(|&&v| v > threshold).count();
    let trials = stats.len() as f64;
    let pd_hat = detections as f64 / trials;
    McResult {
        pd_hat,
        pfa_target,
        threshold,
        stderr: (pd_hat * (1.0 - pd_hat) / trials).sqrt(),
        detections,
        config: *cfg,
    }
}

/// Fraction of blocks under `cfg.params` whose statistic exceeds
/// `threshold`.
pub fn estimate_pd(cfg: &McConfig, threshold: f64) -> Result<McResult> {
    if !threshold.is_finite() {
        return domain(format!("threshold must be finite, got {threshold}"));
    }
    let stats = simulate_statistics(cfg, rng::domain::ALTERNATIVE)?;
    Ok(summarize(cfg, &stats, threshold, None))
}

/// Calibrates on the null version of `cfg.params`, then estimates the
/// detection probability under `cfg.params`.
pub fn simulate(cfg: &McConfig, pfa: f64) -> Result<McResult> {
    let null_cfg = McConfig { params: cfg.params.null(), ..*cfg };
    let threshold = calibrate_threshold(&null_cfg, pfa)?;
    let mut r = estimate_pd(cfg, threshold)?;
    r.pfa_target = Some(pfa);
    Ok(r)
}

/// Empirical ROC curve: one null calibration pass and one alternative pass,
/// shared across the whole false-alarm grid.
pub fn empirical_roc(cfg: &McConfig, pfa_grid: &[f64]) -> Result<RocCurve> {
    validate_pfa_grid(pfa_grid)?;
    check_quantile(cfg.trials, pfa_grid[0])?;
    let null_cfg = McConfig { params: cfg.params.null(), ..*cfg };
    let mut null_stats = simulate_statistics(&null_cfg, rng::domain::NULL)?;
    null_stats.sort_by(f64::total_cmp);
    let alt_stats = simulate_statistics(cfg, rng::domain::ALTERNATIVE)?;

    let points = pfa_grid
        .iter()
        .map(|&pfa| {
            let t = upper_quantile(&null_stats, pfa);
            let r = summarize(cfg, &alt_stats, t, Some(pfa));
            RocPoint { pfa, pd: r.pd_hat, stderr: Some(r.stderr) }
        })
        .collect();
    let provenance = Provenance { source: format!("montecarlo:{}", cfg.kind), params: serde_json::to_value(cfg)? };
    RocCurve::new(points, provenance)
}
