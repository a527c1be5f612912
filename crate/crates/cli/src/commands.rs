use std::io::Write;
use std::path::{Path, PathBuf};

use noise_radar::analytic::{self, OperatingPoint, RocFamily, SmallRhoFamily};
use noise_radar::detectors::DetectorKind;
use noise_radar::fmt::sig12;
use noise_radar::logistic::{reproduce_tables, write_table_csv};
use noise_radar::montecarlo::{empirical_roc, simulate as run_simulation, McConfig};
use noise_radar::signal::{sample_block_stream, MatrixVariant, SignalParams};
use serde::Serialize;

use crate::manifest::write_with_manifest;
use crate::{CliError, FitTablesArgs, LargeRhoArgs, PdCurveArgs, RequiredArgs, SampleArgs, SimulateArgs};

const FIGURE_PFAS: [f64; 5] = [1e-2, 1e-4, 1e-6, 1e-8, 1e-10];

fn usage<T>(msg: impl Into<String>) -> Result<T, CliError> {
    Err(CliError::Usage(msg.into()))
}

fn io_err(path: &Path) -> impl Fn(std::io::Error) -> CliError + '_ {
    move |e| CliError::io(path, e)
}

fn csv_err(e: csv::Error) -> CliError {
    CliError::Numeric(e.to_string())
}

fn pick<T>(flag: Option<T>, config: Option<T>, default: T) -> T {
    flag.or(config).unwrap_or(default)
}

fn output_path(flag: Option<PathBuf>, config: Option<PathBuf>, dir: &Path, default_name: &str) -> PathBuf {
    flag.or(config).unwrap_or_else(|| dir.join(default_name))
}

fn check_pfas(pfas: &[f64]) -> Result<(), CliError> {
    if pfas.is_empty() {
        return usage("the false-alarm list is empty");
    }
    if let Some(p) = pfas.iter().find(|p| !(**p > 0.0 && **p < 1.0)) {
        return usage(format!("false-alarm probabilities must lie in (0, 1), got {p}"));
    }
    Ok(())
}

/// 12 significant digits in plain notation.
fn plain(x: f64) -> String {
    let rounded: f64 = format!("{x:.11e}").parse().unwrap_or(x);
    format!("{rounded}")
}

fn finish(out: &mut dyn Write, path: &Path) -> Result<(), CliError> {
    writeln!(out, "wrote {}", path.display()).map_err(|e| CliError::io(Path::new("<stdout>"), e))
}

#[derive(Debug, Serialize)]
struct PdCurveParams {
    family: RocFamily,
    pfa: Vec<f64>,
    nrho2_min: f64,
    nrho2_max: f64,
    nrho2_step: f64,
    n: Option<u64>,
    points: Option<Vec<(f64, u64)>>,
}

fn parse_points(raw: &[String]) -> Result<Vec<(f64, u64)>, CliError> {
    raw.iter()
        .map(|p| {
            let (r, n) = p.split_once(':').ok_or_else(|| CliError::Usage(format!("point {p:?} is not rho:n")))?;
            let rho: f64 = r.trim().parse().map_err(|_| CliError::Usage(format!("bad ρ in point {p:?}")))?;
            let n: u64 = n.trim().parse().map_err(|_| CliError::Usage(format!("bad N in point {p:?}")))?;
            Ok((rho, n))
        })
        .collect()
}

pub(crate) fn pd_curve(a: PdCurveArgs, c: PdCurveArgs, dir: &Path, out: &mut dyn Write) -> Result<(), CliError> {
    let points = match a.points.or(c.points) {
        Some(raw) => Some(parse_points(&raw)?),
        None => None,
    };
    let p = PdCurveParams {
        family: pick(a.family, c.family, RocFamily::RhoHatSmallRho),
        pfa: pick(a.pfa, c.pfa, FIGURE_PFAS.to_vec()),
        nrho2_min: pick(a.nrho2_min, c.nrho2_min, 0.0),
        nrho2_max: pick(a.nrho2_max, c.nrho2_max, 50.0),
        nrho2_step: pick(a.nrho2_step, c.nrho2_step, 0.5),
        n: a.n.or(c.n),
        points,
    };
    check_pfas(&p.pfa)?;
    if !(p.nrho2_step > 0.0 && p.nrho2_min >= 0.0 && p.nrho2_max >= p.nrho2_min && p.nrho2_max.is_finite()) {
        return usage(format!(
            "need 0 <= nrho2-min <= nrho2-max and nrho2-step > 0, got {}..{} step {}",
            p.nrho2_min, p.nrho2_max, p.nrho2_step
        ));
    }
    if let Some(n) = p.n {
        if n < 2 || p.nrho2_max >= n as f64 {
            return usage(format!("need n >= 2 and nrho2-max < n so that ρ < 1, got n = {n}"));
        }
    }

    let ops: Vec<OperatingPoint> = match (&p.points, p.n) {
        (Some(pts), _) => pts.iter().map(|&(rho, n)| OperatingPoint::Finite { rho, n, phi: 0.0 }).collect(),
        (None, n) => {
            let count = ((p.nrho2_max - p.nrho2_min) / p.nrho2_step + 1e-9).floor() as usize;
            let xs = (0..=count).map(|i| p.nrho2_min + i as f64 * p.nrho2_step);
            match (p.family.is_small_rho(), n) {
                (true, _) => xs.map(OperatingPoint::Nrho2).collect(),
                (false, Some(n)) => {
                    xs.map(|x| OperatingPoint::Finite { rho: (x / n as f64).sqrt(), n, phi: 0.0 }).collect()
                }
                (false, None) => return usage(format!("{} needs --n or --points", p.family)),
            }
        }
    };

    let mut wtr = csv::Writer::from_writer(Vec::new());
    wtr.write_record(["family", "pfa", "nrho2", "pd"]).map_err(csv_err)?;
    for &pfa in &p.pfa {
        for at in &ops {
            let v = analytic::pd(p.family, pfa, at)?;
            wtr.write_record([p.family.name().to_string(), sig12(pfa), sig12(at.nrho2()), sig12(v)])
                .map_err(csv_err)?;
        }
    }
    let data = wtr.into_inner().map_err(|e| CliError::Numeric(e.to_string()))?;
    let path = output_path(a.output, c.output, dir, "pd_curve.csv");
    write_with_manifest(&path, &data, "pd-curve", &p, None)?;
    finish(out, &path)
}

#[derive(Debug, Serialize)]
struct RequiredReport {
    family: SmallRhoFamily,
    pd: f64,
    pfa: f64,
    nrho2: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    rho: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    n: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    sample_rate_hz: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    integration_time_s: Option<f64>,
}

pub(crate) fn required(a: RequiredArgs, c: RequiredArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let pd = pick(a.pd, c.pd, 0.95);
    let pfa = pick(a.pfa, c.pfa, 1e-6);
    let family = pick(a.family, c.family, SmallRhoFamily::Marcum);
    let rho = a.rho.or(c.rho);
    let rate = a.sample_rate.or(c.sample_rate);
    if !(pfa > 0.0 && pfa < pd && pd < 1.0) {
        return usage(format!("need 0 < pfa < pd < 1, got pd = {pd}, pfa = {pfa}"));
    }
    if let Some(r) = rho {
        if !(r > 0.0 && r <= 1.0) {
            return usage(format!("rho must lie in (0, 1], got {r}"));
        }
    }
    if let Some(f) = rate {
        if !(f > 0.0 && f.is_finite()) {
            return usage(format!("sample rate must be positive, got {f}"));
        }
        if rho.is_none() {
            return usage("--sample-rate needs --rho");
        }
    }

    let nrho2 = analytic::required_nrho2(pd, pfa, family)?;
    // smallest whole N reaching the target
    let n = rho.map(|r| {
        let exact = nrho2 / (r * r);
        let rounded = exact.round();
        if (exact - rounded).abs() <= 1e-9 * exact {
            rounded as u64
        } else {
            exact.ceil() as u64
        }
    });
    let report = RequiredReport {
        family,
        pd,
        pfa,
        nrho2,
        rho,
        n,
        sample_rate_hz: rate,
        integration_time_s: n.zip(rate).map(|(n, f)| n as f64 / f),
    };

    let json = serde_json::to_string_pretty(&report).map_err(|e| CliError::Numeric(e.to_string()))? + "\n";
    let stdout = Path::new("<stdout>");
    if a.json || c.json {
        out.write_all(json.as_bytes()).map_err(io_err(stdout))?;
    } else {
        let mut text = format!("nrho2 {}\n", plain(nrho2));
        if let Some(n) = report.n {
            text += &format!("n {n}\n");
        }
        if let Some(t) = report.integration_time_s {
            text += &format!("integration_time_s {}\n", plain(t));
        }
        out.write_all(text.as_bytes()).map_err(io_err(stdout))?;
    }
    if let Some(path) = a.output.or(c.output) {
        write_with_manifest(&path, json.as_bytes(), "required", &report, None)?;
    }
    Ok(())
}

fn signal_params(
    rho: Option<f64>,
    phi: Option<f64>,
    sigma1: Option<f64>,
    sigma2: Option<f64>,
    variant: Option<MatrixVariant>,
) -> Result<SignalParams, CliError> {
    Ok(SignalParams::new(
        sigma1.unwrap_or(1.0),
        sigma2.unwrap_or(1.0),
        rho.unwrap_or(0.0),
        phi.unwrap_or(0.0),
        variant.unwrap_or_default(),
    )?)
}

#[derive(Debug, Serialize)]
struct SimulateParams {
    #[serde(flatten)]
    config: McConfig,
    pfa: f64,
}

pub(crate) fn simulate(a: SimulateArgs, c: SimulateArgs, dir: &Path, out: &mut dyn Write) -> Result<(), CliError> {
    let params = signal_params(
        Some(pick(a.rho, c.rho, 0.05)),
        a.phi.or(c.phi),
        a.sigma1.or(c.sigma1),
        a.sigma2.or(c.sigma2),
        a.variant.or(c.variant),
    )?;
    let mut cfg = McConfig::new(
        pick(a.kind, c.kind, DetectorKind::RhoHat),
        params,
        pick(a.n, c.n, 10_000),
        pick(a.trials, c.trials, 100_000),
        pick(a.seed, c.seed, 42),
    );
    cfg.workers = a.workers.or(c.workers);
    let pfa = pick(a.pfa, c.pfa, 1e-2);
    check_pfas(&[pfa])?;

    let result = run_simulation(&cfg, pfa)?;
    let json = result.to_json()? + "\n";
    let path = output_path(a.output, c.output, dir, "simulate.json");
    write_with_manifest(&path, json.as_bytes(), "simulate", &SimulateParams { config: cfg, pfa }, Some(cfg.seed))?;
    out.write_all(json.as_bytes()).map_err(io_err(Path::new("<stdout>")))?;
    Ok(())
}

pub(crate) fn fit_tables(a: FitTablesArgs, c: FitTablesArgs, dir: &Path, out: &mut dyn Write) -> Result<(), CliError> {
    let rows = reproduce_tables()?;
    let path = output_path(a.output, c.output, dir, "fit_tables.csv");
    let mut csv_bytes = Vec::new();
    write_table_csv(&rows, &mut csv_bytes)?;
    let json = serde_json::to_string_pretty(&rows).map_err(|e| CliError::Numeric(e.to_string()))? + "\n";
    let params = serde_json::json!({ "pfa": noise_radar::logistic::table_pfas(), "families": ["d0", "marcum"] });
    write_with_manifest(&path, &csv_bytes, "fit-tables", &params, None)?;
    let json_path = path.with_extension("json");
    write_with_manifest(&json_path, json.as_bytes(), "fit-tables", &params, None)?;
    finish(out, &path)?;
    finish(out, &json_path)
}

#[derive(Debug, Serialize)]
struct LargeRhoParams {
    kind: DetectorKind,
    rho: f64,
    pfa: Vec<f64>,
    n_min: u64,
    n_max: u64,
    n_step: u64,
    trials: Option<usize>,
    seed: Option<u64>,
}

pub(crate) fn large_rho(a: LargeRhoArgs, c: LargeRhoArgs, dir: &Path, out: &mut dyn Write) -> Result<(), CliError> {
    let kind = pick(a.kind, c.kind, DetectorKind::RhoHat);
    let mc = kind != DetectorKind::RhoHat;
    let default_pfas = if mc { vec![1e-3, 1e-2] } else { FIGURE_PFAS.to_vec() };
    let mut pfa = pick(a.pfa, c.pfa, default_pfas);
    check_pfas(&pfa)?;
    pfa.sort_by(f64::total_cmp);
    pfa.dedup();
    let p = LargeRhoParams {
        kind,
        rho: pick(a.rho, c.rho, 0.5),
        pfa,
        n_min: pick(a.n_min, c.n_min, 4),
        n_max: pick(a.n_max, c.n_max, 200),
        n_step: pick(a.n_step, c.n_step, 4),
        trials: mc.then(|| pick(a.trials, c.trials, 100_000)),
        seed: mc.then(|| pick(a.seed, c.seed, 42)),
    };
    if !(p.rho > 0.0 && p.rho < 1.0) {
        return usage(format!("rho must lie in (0, 1), got {}", p.rho));
    }
    if p.n_step == 0 || p.n_min < 2 || p.n_max < p.n_min {
        return usage(format!(
            "need 2 <= n-min <= n-max and n-step > 0, got {}..{} step {}",
            p.n_min, p.n_max, p.n_step
        ));
    }
    let small = if kind == DetectorKind::D0 { SmallRhoFamily::D0 } else { SmallRhoFamily::Marcum };
    let params = SignalParams::unit(p.rho)?;
    let workers = a.workers.or(c.workers);

    let mut wtr = csv::Writer::from_writer(Vec::new());
    wtr.write_record(["kind", "rho", "pfa", "n", "nrho2", "pd", "stderr", "pd_small_rho"]).map_err(csv_err)?;
    for n in (p.n_min..=p.n_max).step_by(p.n_step as usize) {
        let x = n as f64 * p.rho * p.rho;
        let pds: Vec<(f64, Option<f64>)> = if mc {
            let mut cfg =
                McConfig::new(kind, params, n as usize, p.trials.unwrap_or_default(), p.seed.unwrap_or_default());
            cfg.workers = workers;
            empirical_roc(&cfg, &p.pfa)?.points.iter().map(|pt| (pt.pd, pt.stderr)).collect()
        } else {
            p.pfa
                .iter()
                .map(|&f| Ok((analytic::pd_rhohat_exact(f, p.rho, n)?, None)))
                .collect::<Result<_, CliError>>()?
        };
        for (&f, (v, se)) in p.pfa.iter().zip(pds) {
            wtr.write_record([
                kind.name().to_string(),
                sig12(p.rho),
                sig12(f),
                n.to_string(),
                sig12(x),
                sig12(v),
                se.map(sig12).unwrap_or_default(),
                sig12(small.pd(f, x)?),
            ])
            .map_err(csv_err)?;
        }
    }
    let data = wtr.into_inner().map_err(|e| CliError::Numeric(e.to_string()))?;
    let path = output_path(a.output, c.output, dir, &format!("large_rho_{}.csv", kind.name()));
    write_with_manifest(&path, &data, "large-rho", &p, p.seed)?;
    finish(out, &path)
}

#[derive(Debug, Serialize)]
struct SampleParams {
    params: SignalParams,
    n: usize,
    seed: u64,
    stream: u64,
}

pub(crate) fn sample(a: SampleArgs, c: SampleArgs, dir: &Path, out: &mut dyn Write) -> Result<(), CliError> {
    let p = SampleParams {
        params: signal_params(
            Some(pick(a.rho, c.rho, 0.5)),
            a.phi.or(c.phi),
            a.sigma1.or(c.sigma1),
            a.sigma2.or(c.sigma2),
            a.variant.or(c.variant),
        )?,
        n: pick(a.n, c.n, 1000),
        seed: pick(a.seed, c.seed, 42),
        stream: pick(a.stream, c.stream, 0),
    };
    let block = sample_block_stream(&p.params, p.n, p.seed, p.stream)?;
    let mut data = Vec::new();
    block.write_csv(&mut data)?;
    let path = output_path(a.output, c.output, dir, "sample.csv");
    write_with_manifest(&path, &data, "sample", &p, Some(p.seed))?;
    finish(out, &path)
}
