//! Jointly Gaussian received/reference signal model.
//!
//! A sample is the four-vector `(I₁, Q₁, I₂, Q₂)` with zero mean and
//! covariance
//!
//! ```text
//! ⎡ σ₁² 1₂        ρσ₁σ₂ M(φ) ⎤
//! ⎣ ρσ₁σ₂ M(φ)ᵀ   σ₂² 1₂     ⎦
//! ```
//!
//! where `M` is either the rotation `R(φ)` (noise radar) or the reflection
//! `R′(φ)` (two-mode squeezing radar).

use std::io::{Read, Write};

use nalgebra::{Matrix4, SymmetricEigen, Vector4};
use rand::Rng;
use rand_distr::{ChiSquared, Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::rng::{self, stream_rng};

/// Which orthogonal matrix couples the two signals.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum MatrixVariant {
    /// `R(φ) = [[cos φ, sin φ], [−sin φ, cos φ]]`
    #[default]
    Rotation,
    /// `R′(φ) = [[cos φ, sin φ], [sin φ, −cos φ]]`
    Reflection,
}

impl MatrixVariant {
    fn block(self, phi: f64) -> [[f64; 2]; 2] {
        let (s, c) = phi.sin_cos();
        match self {
            MatrixVariant::Rotation => [[c, s], [-s, c]],
            MatrixVariant::Reflection => [[c, s], [s, -c]],
        }
    }

    /// Sign applied to the `Q₁Q₂` term of `R_c` (and, negated, to the
    /// `I₂Q₁` term of `R_s`).
    fn sign(self) -> f64 {
        match self {
            MatrixVariant::Rotation => 1.0,
            MatrixVariant::Reflection => -1.0,
        }
    }
}

impl std::str::FromStr for MatrixVariant {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "rotation" => Ok(MatrixVariant::Rotation),
            "reflection" => Ok(MatrixVariant::Reflection),
            other => Err(Error::Domain(format!("unknown matrix variant {other:?} (expected rotation or reflection)"))),
        }
    }
}

/// Covariance parameters of the signal model.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SignalParams {
    /// Received-signal amplitude scale.
    pub sigma1: f64,
    /// Reference-signal amplitude scale.
    pub sigma2: f64,
    /// Correlation coefficient, in `[0, 1]`.
    pub rho: f64,
    /// Phase between the two signals in radians.
    pub phi: f64,
    pub variant: MatrixVariant,
}

impl SignalParams {
    pub fn new(sigma1: f64, sigma2: f64, rho: f64, phi: f64, variant: MatrixVariant) -> Result<Self> {
        let p = SignalParams { sigma1, sigma2, rho, phi, variant };
        p.validate()?;
        Ok(p)
    }

    /// Unit powers and zero phase.
    pub fn unit(rho: f64) -> Result<Self> {
        Self::new(1.0, 1.0, rho, 0.0, MatrixVariant::Rotation)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.sigma1 > 0.0 && self.sigma1.is_finite() && self.sigma2 > 0.0 && self.sigma2.is_finite()) {
            return domain(format!(
                "signal scales must be positive and finite, got σ₁ = {}, σ₂ = {}",
                self.sigma1, self.sigma2
            ));
        }
        if !(0.0..=1.0).contains(&self.rho) {
            return domain(format!("correlation coefficient must lie in [0, 1], got {}", self.rho));
        }
        if !self.phi.is_finite() {
            return domain(format!("phase must be finite, got {}", self.phi));
        }
        Ok(())
    }

    /// The same parameters with the target removed (`ρ = 0`).
    pub fn null(&self) -> Self {
        SignalParams { rho: 0.0, ..*self }
    }

    pub fn with_rho(&self, rho: f64) -> Result<Self> {
        let p = SignalParams { rho, ..*self };
        p.validate()?;
        Ok(p)
    }
}

/// 4×4 covariance matrix ordered `(I₁, Q₁, I₂, Q₂)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CovMatrix4(pub Matrix4<f64>);

impl CovMatrix4 {
    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.0[(row, col)]
    }

    /// Eigenvalues in ascending order.
    pub fn eigenvalues(&self) -> [f64; 4] {
        let eig = SymmetricEigen::new(self.0);
        let mut ev = [eig.eigenvalues[0], eig.eigenvalues[1], eig.eigenvalues[2], eig.eigenvalues[3]];
        ev.sort_by(f64::total_cmp);
        ev
    }

    /// A matrix `F` with `F Fᵀ = Σ`: the Cholesky factor when `Σ` is
    /// positive definite, otherwise `V √Λ` from the eigendecomposition.
    pub fn square_root(&self) -> Matrix4<f64> {
        if let Some(ch) = self.0.cholesky() {
            return ch.l();
        }
        let eig = SymmetricEigen::new(self.0);
        let mut f = eig.eigenvectors;
        for (j, lambda) in eig.eigenvalues.iter().enumerate() {
            let s = lambda.max(0.0).sqrt();
            for i in 0..4 {
                f[(i, j)] *= s;
            }
        }
        f
    }
}

/// Assembles the signal covariance matrix.
pub fn build_covariance(params: &SignalParams) -> Result<CovMatrix4> {
    params.validate()?;
    let SignalParams { sigma1, sigma2, rho, phi, variant } = *params;
    let m = variant.block(phi);
    let c = rho * sigma1 * sigma2;
    let mut s = Matrix4::zeros();
    s[(0, 0)] = sigma1 * sigma1;
    s[(1, 1)] = sigma1 * sigma1;
    s[(2, 2)] = sigma2 * sigma2;
    s[(3, 3)] = sigma2 * sigma2;
    for i in 0..2 {
        for j in 0..2 {
            s[(i, 2 + j)] = c * m[i][j];
            s[(2 + j, i)] = c * m[i][j];
        }
    }
    Ok(CovMatrix4(s))
}

/// `n` four-channel voltage samples from one coherent processing interval.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IQBlock {
    pub i1: Vec<f64>,
    pub q1: Vec<f64>,
    pub i2: Vec<f64>,
    pub q2: Vec<f64>,
    /// Seed and stream id the block was drawn from, if it was simulated.
    pub seed: Option<u64>,
    pub stream: Option<u64>,
}

impl IQBlock {
    pub fn from_columns(i1: Vec<f64>, q1: Vec<f64>, i2: Vec<f64>, q2: Vec<f64>) -> Result<Self> {
        let n = i1.len();
        if n == 0 || q1.len() != n || i2.len() != n || q2.len() != n {
            return domain(format!(
                "IQ columns must be nonempty and of equal length, got ({}, {}, {}, {})",
                i1.len(),
                q1.len(),
                i2.len(),
                q2.len()
            ));
        }
        Ok(IQBlock { i1, q1, i2, q2, seed: None, stream: None })
    }

    pub fn len(&self) -> usize {
        self.i1.len()
    }

    pub fn is_empty(&self) -> bool {
        self.i1.is_empty()
    }

    /// Multiplies every channel by `c`.
    pub fn scaled(&self, c: f64) -> Self {
        let s = |v: &Vec<f64>| v.iter().map(|x| x * c).collect();
        IQBlock { i1: s(&self.i1), q1: s(&self.q1), i2: s(&self.i2), q2: s(&self.q2), ..self.clone() }
    }

    /// Writes `index,i1,q1,i2,q2` rows with a header.
    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut wtr = csv::Writer::from_writer(w);
        wtr.write_record(["index", "i1", "q1", "i2", "q2"])?;
        for k in 0..self.len() {
            wtr.write_record([
                k.to_string(),
                format!("{:.17e}", self.i1[k]),
                format!("{:.17e}", self.q1[k]),
                format!("{:.17e}", self.i2[k]),
                format!("{:.17e}", self.q2[k]),
            ])?;
        }
        wtr.flush()?;
        Ok(())
    }

    pub fn read_csv<R: Read>(r: R) -> Result<Self> {
        let mut rdr = csv::Reader::from_reader(r);
        let (mut i1, mut q1, mut i2, mut q2) = (vec![], vec![], vec![], vec![]);
        for rec in rdr.records() {
            let rec = rec?;
            let field = |k: usize| -> Result<f64> {
                rec.get(k)
                    .and_then(|s| s.trim().parse::<f64>().ok())
                    .ok_or_else(|| Error::Domain(format!("bad IQ CSV field {k} in record {rec:?}")))
            };
            i1.push(field(1)?);
            q1.push(field(2)?);
            i2.push(field(3)?);
            q2.push(field(4)?);
        }
        Self::from_columns(i1, q1, i2, q2)
    }
}

/// Draws `n` i.i.d. samples on stream 0 of `seed`.
pub fn sample_block(params: &SignalParams, n: usize, seed: u64) -> Result<IQBlock> {
    sample_block_stream(params, n, seed, 0)
}

/// Draws `n` i.i.d. samples from `N(0, Σ(params))` on the given stream.
pub fn sample_block_stream(params: &SignalParams, n: usize, seed: u64, stream: u64) -> Result<IQBlock> {
    if n == 0 {
        return domain("sample count must be at least 1");
    }
    let f = build_covariance(params)?.square_root();
    let mut rng = stream_rng(seed, rng::domain::BLOCK, stream);
    let mut block = IQBlock {
        i1: Vec::with_capacity(n),
        q1: Vec::with_capacity(n),
        i2: Vec::with_capacity(n),
        q2: Vec::with_capacity(n),
        seed: Some(seed),
        stream: Some(stream),
    };
    for _ in 0..n {
        let x = draw(&f, &mut rng);
        block.i1.push(x[0]);
        block.q1.push(x[1]);
        block.i2.push(x[2]);
        block.q2.push(x[3]);
    }
    Ok(block)
}

#[inline]
fn draw<R: Rng>(f: &Matrix4<f64>, rng: &mut R) -> Vector4<f64> {
    let z = Vector4::new(
        rng.sample(StandardNormal),
        rng.sample(StandardNormal),
        rng.sample(StandardNormal),
        rng.sample(StandardNormal),
    );
    f * z
}

/// Sample means of the per-sample powers and correlation products.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AuxStats {
    pub p1_bar: f64,
    pub p2_bar: f64,
    pub rc_bar: f64,
    pub rs_bar: f64,
    pub n: usize,
}

/// Computes `P̄₁, P̄₂, R̄_c, R̄_s` with the sign convention of `variant`:
/// `R_c = I₁I₂ ± Q₁Q₂`, `R_s = I₁Q₂ ∓ I₂Q₁`, upper signs for the rotation.
pub fn aux_stats(block: &IQBlock, variant: MatrixVariant) -> Result<AuxStats> {
    let n = block.len();
    if n == 0 || block.q1.len() != n || block.i2.len() != n || block.q2.len() != n {
        return domain("aux_stats requires a nonempty block with equal-length columns");
    }
    let sg = variant.sign();
    let (mut p1, mut p2, mut rc, mut rs) = (0.0, 0.0, 0.0, 0.0);
    for k in 0..n {
        let (i1, q1, i2, q2) = (block.i1[k], block.q1[k], block.i2[k], block.q2[k]);
        p1 += i1 * i1 + q1 * q1;
        p2 += i2 * i2 + q2 * q2;
        rc += i1 * i2 + sg * q1 * q2;
        rs += i1 * q2 - sg * i2 * q1;
    }
    let nf = n as f64;
    Ok(AuxStats { p1_bar: p1 / nf, p2_bar: p2 / nf, rc_bar: rc / nf, rs_bar: rs / nf, n })
}

/// Per-sample `(P₁, P₂, R_c, R_s)` values of a block.
pub fn per_sample_aux(block: &IQBlock, variant: MatrixVariant) -> Vec<[f64; 4]> {
    let sg = variant.sign();
    (0..block.len())
        .map(|k| {
            let (i1, q1, i2, q2) = (block.i1[k], block.q1[k], block.i2[k], block.q2[k]);
            [i1 * i1 + q1 * q1, i2 * i2 + q2 * q2, i1 * i2 + sg * q1 * q2, i1 * q2 - sg * i2 * q1]
        })
        .collect()
}

fn aux_from_scatter(w: &Matrix4<f64>, n: usize, variant: MatrixVariant) -> AuxStats {
    let sg = variant.sign();
    let nf = n as f64;
    AuxStats {
        p1_bar: (w[(0, 0)] + w[(1, 1)]) / nf,
        p2_bar: (w[(2, 2)] + w[(3, 3)]) / nf,
        rc_bar: (w[(0, 2)] + sg * w[(1, 3)]) / nf,
        rs_bar: (w[(0, 3)] - sg * w[(2, 1)]) / nf,
        n,
    }
}

/// How a block's auxiliary statistics are drawn.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum SamplingMode {
    /// Draw all `n` samples and accumulate.
    Direct,
    /// Draw the scatter matrix `Σₖ xₖxₖᵀ` from its Wishart distribution
    /// (Bartlett decomposition); cost independent of `n`. Needs `n ≥ 4`.
    Scatter,
    /// `Scatter` when `n > 16`, otherwise `Direct`.
    #[default]
    Auto,
}

impl SamplingMode {
    fn resolve(self, n: usize) -> SamplingMode {
        match self {
            SamplingMode::Auto if n > 16 => SamplingMode::Scatter,
            SamplingMode::Auto => SamplingMode::Direct,
            SamplingMode::Scatter if n < 4 => SamplingMode::Direct,
            m => m,
        }
    }
}

/// Draws the auxiliary statistics of one `n`-sample block without keeping
/// the samples. `factor` must satisfy `F Fᵀ = Σ`.
pub fn draw_aux_stats<R: Rng>(
    factor: &Matrix4<f64>,
    n: usize,
    variant: MatrixVariant,
    mode: SamplingMode,
    rng: &mut R,
) -> AuxStats {
    match mode.resolve(n) {
        SamplingMode::Scatter => {
            // Bartlett: W = F A Aᵀ Fᵀ with A lower triangular,
            // A_ii² ~ χ²(n − i), A_ij ~ N(0, 1) below the diagonal.
            let mut a = Matrix4::<f64>::zeros();
            for i in 0..4 {
                let dof = (n - i) as f64;
                let chi = ChiSquared::new(dof).expect("dof is positive");
                a[(i, i)] = chi.sample(rng).sqrt();
                for j in 0..i {
                    a[(i, j)] = rng.sample(StandardNormal);
                }
            }
            let fa = factor * a;
            let w = fa * fa.transpose();
            aux_from_scatter(&w, n, variant)
        }
        _ => {
            let sg = variant.sign();
            let (mut p1, mut p2, mut rc, mut rs) = (0.0, 0.0, 0.0, 0.0);
            for _ in 0..n {
                let x = draw(factor, rng);
                let (i1, q1, i2, q2) = (x[0], x[1], x[2], x[3]);
                p1 += i1 * i1 + q1 * q1;
                p2 += i2 * i2 + q2 * q2;
                rc += i1 * i2 + sg * q1 * q2;
                rs += i1 * q2 - sg * i2 * q1;
            }
            let nf = n as f64;
            AuxStats { p1_bar: p1 / nf, p2_bar: p2 / nf, rc_bar: rc / nf, rs_bar: rs / nf, n }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_PI_2;

    fn close(a: f64, b: f64) -> bool {
        (a - b).abs() < 1e-12
    }

    #[test]
    fn zero_correlation_is_identity() {
        let s = build_covariance(&SignalParams::new(1.0, 1.0, 0.0, 0.3, MatrixVariant::Rotation).unwrap()).unwrap();
        assert_eq!(s.0, Matrix4::identity());
    }

    #[test]
    fn perfect_correlation_is_rank_two() {
        let s = build_covariance(&SignalParams::unit(1.0).unwrap()).unwrap();
        assert!(close(s.get(0, 2), 1.0) && close(s.get(1, 3), 1.0));
        assert!(close(s.get(0, 3), 0.0) && close(s.get(1, 2), 0.0));
        let ev = s.eigenvalues();
        assert!(ev[0].abs() < 1e-12 && ev[1].abs() < 1e-12);
        assert!(close(ev[2], 2.0) && close(ev[3], 2.0));
    }

    #[test]
    fn quarter_turn_cross_block() {
        let s =
            build_covariance(&SignalParams::new(2.0, 3.0, 0.5, FRAC_PI_2, MatrixVariant::Rotation).unwrap()).unwrap();
        // 3 · [[0, 1], [−1, 0]]
        assert!(close(s.get(0, 2), 0.0));
        assert!(close(s.get(0, 3), 3.0));
        assert!(close(s.get(1, 2), -3.0));
        assert!(close(s.get(1, 3), 0.0));
        assert!(close(s.get(0, 0), 4.0) && close(s.get(3, 3), 9.0));
    }

    #[test]
    fn rejects_bad_rho() {
        assert!(SignalParams::unit(1.2).is_err());
        assert!(SignalParams::unit(-0.1).is_err());
        let p = SignalParams { sigma1: 1.0, sigma2: 1.0, rho: 1.5, phi: 0.0, variant: MatrixVariant::Rotation };
        assert!(build_covariance(&p).is_err());
    }

    #[test]
    fn singular_factor_reproduces_sigma() {
        for variant in [MatrixVariant::Rotation, MatrixVariant::Reflection] {
            let p = SignalParams::new(1.5, 0.7, 1.0, 0.4, variant).unwrap();
            let s = build_covariance(&p).unwrap();
            let f = s.square_root();
            assert!((f * f.transpose() - s.0).abs().max() < 1e-12);
        }
    }

    #[test]
    fn aux_by_hand() {
        let one = |a: f64, b: f64, c: f64, d: f64| {
            let blk = IQBlock::from_columns(vec![a], vec![b], vec![c], vec![d]).unwrap();
            aux_stats(&blk, MatrixVariant::Rotation).unwrap()
        };
        let s = one(1.0, 0.0, 1.0, 0.0);
        assert_eq!((s.p1_bar, s.p2_bar, s.rc_bar, s.rs_bar), (1.0, 1.0, 1.0, 0.0));
        let s = one(0.0, 1.0, 0.0, 1.0);
        assert_eq!((s.rc_bar, s.rs_bar), (1.0, 0.0));
        let s = one(1.0, 0.0, 0.0, 1.0);
        assert_eq!((s.rc_bar, s.rs_bar), (0.0, 1.0));
    }

    #[test]
    fn reflection_flips_lower_signs() {
        let blk = IQBlock::from_columns(vec![0.0], vec![1.0], vec![1.0], vec![1.0]).unwrap();
        let r = aux_stats(&blk, MatrixVariant::Rotation).unwrap();
        let f = aux_stats(&blk, MatrixVariant::Reflection).unwrap();
        assert_eq!((r.rc_bar, r.rs_bar), (1.0, -1.0));
        assert_eq!((f.rc_bar, f.rs_bar), (-1.0, 1.0));
    }

    #[test]
    fn block_csv_round_trip() {
        let blk = sample_block(&SignalParams::unit(0.3).unwrap(), 5, 9).unwrap();
        let mut buf = Vec::new();
        blk.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("index,i1,q1,i2,q2\n"));
        let back = IQBlock::read_csv(&buf[..]).unwrap();
        assert_eq!(back.i1, blk.i1);
        assert_eq!(back.q2, blk.q2);
    }

    #[test]
    fn mismatched_columns_rejected() {
        assert!(IQBlock::from_columns(vec![1.0], vec![], vec![1.0], vec![1.0]).is_err());
        assert!(IQBlock::from_columns(vec![], vec![], vec![], vec![]).is_err());
        assert!(sample_block(&SignalParams::unit(0.0).unwrap(), 0, 1).is_err());
    }
}
