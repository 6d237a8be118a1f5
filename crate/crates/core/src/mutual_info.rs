//! Instantaneous mutual information of the block-fading channel
//! `y = α·x + w` for discrete inputs, and the scalar-channel quantities of a
//! projected constellation (MI, its inverse, MMSE).
//!
//! Noise is circular complex Gaussian with `E|w_b|² = 1/γ`. For a real input
//! only the real part of the noise reaches the log-likelihood ratio, so the
//! noise expectation runs over `B` real dimensions (real inputs) or `2B`
//! (complex inputs), each with variance `1/(2γ)`. Internally everything is in
//! nats; public values are bits unless the name says otherwise.
//!
//! With `u = √γ w` (so `u ~ N(0, I/2)`) and `s_ij = √γ (t_i − t_j)` for faded
//! points `t = α·x`, the expectation inside the MI becomes
//!
//! ```text
//! I = −Σ_i p_i E_u[ ln Σ_j p_j exp(−|s_ij|² − 2 s_ij·u) ]
//! ```
//!
//! which is evaluated with a tensor Gauss–Hermite rule or plain Monte Carlo.

use std::collections::HashMap;
use std::f64::consts::LN_2;
use std::sync::{Arc, Mutex};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::constellations::{Constellation, Field, ProjectionSet};
use crate::error::{Error, Result};
use crate::quadrature::ProductRule;
use crate::roots::{bracket_increasing, illinois_increasing, Bracket};

/// Terms whose exponent falls this far below the running maximum are dropped.
const PRUNE_NATS: f64 = 60.0;
/// Relative bracket width at which the SNR inversion stops.
pub const INV_REL_TOL: f64 = 1e-10;
/// Largest SNR probed before declaring the scalar MI saturated.
const INV_SNR_LIMIT: f64 = 1e12;
const MMSE_STEP: f64 = 0.005;
const MMSE_HALF_WIDTH: f64 = 8.0;

#[derive(Debug, Clone, PartialEq)]
pub struct ChannelSample {
    alpha: Vec<f64>,
    gamma: f64,
}

impl ChannelSample {
    pub fn new(alpha: Vec<f64>, gamma: f64) -> Result<Self> {
        if alpha.is_empty() {
            return Err(Error::InvalidParameter("fading vector is empty".into()));
        }
        if alpha.iter().any(|a| !(*a >= 0.0) || !a.is_finite()) {
            return Err(Error::InvalidParameter(format!("fading gains must be finite and >= 0: {alpha:?}")));
        }
        if !(gamma > 0.0) || !gamma.is_finite() {
            return Err(Error::InvalidParameter(format!("average SNR must be > 0, got {gamma}")));
        }
        Ok(Self { alpha, gamma })
    }

    pub fn alpha(&self) -> &[f64] {
        &self.alpha
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    /// Per-real-dimension noise variance `1/(2γ)`.
    pub fn sigma2(&self) -> f64 {
        0.5 / self.gamma
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Engine {
    /// Quadrature when it fits in the budget, Monte Carlo otherwise.
    Auto,
    Quadrature,
    Mc,
}

/// Engine settings; the JSON form is
/// `{ "engine", "gh_order", "mc_samples", "seed", "budget_ops", "complex_chain_rule" }`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MiConfig {
    pub engine: Engine,
    pub gh_order: usize,
    pub mc_samples: usize,
    pub seed: u64,
    pub budget_ops: u64,
    /// Evaluate `Ψ + jΨ` inputs as twice the real MI of `Ψ`.
    pub complex_chain_rule: bool,
}

impl Default for MiConfig {
    fn default() -> Self {
        Self {
            engine: Engine::Auto,
            gh_order: 32,
            mc_samples: 20_000,
            seed: 1,
            budget_ops: 1_000_000_000,
            complex_chain_rule: true,
        }
    }
}

impl MiConfig {
    pub fn with_order(mut self, order: usize) -> Self {
        self.gh_order = order;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.gh_order == 0 || self.gh_order > 256 {
            return Err(Error::InvalidParameter(format!("gh_order must be in 1..=256, got {}", self.gh_order)));
        }
        if self.mc_samples < 2 {
            return Err(Error::InvalidParameter("mc_samples must be >= 2".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MiUnits {
    PerChannelUse,
    PerSymbolVector,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MiMethod {
    Quadrature,
    MonteCarlo,
    ClosedForm,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MiEstimate {
    /// bits
    pub value: f64,
    pub units: MiUnits,
    pub method: MiMethod,
    /// bits; zero for deterministic methods
    pub std_error: f64,
    pub nodes_or_samples: usize,
}

impl MiEstimate {
    fn scaled(self, factor: f64, units: MiUnits) -> Self {
        Self { value: self.value * factor, std_error: self.std_error * factor, units, ..self }
    }
}

/// Discrete weighted alphabet in real coordinates.
#[derive(Debug, Clone)]
struct Alphabet {
    dims: usize,
    coords: Vec<f64>,
    probs: Vec<f64>,
}

impl Alphabet {
    fn len(&self) -> usize {
        self.probs.len()
    }

    fn point(&self, i: usize) -> &[f64] {
        &self.coords[i * self.dims..(i + 1) * self.dims]
    }
}

/// A constellation prepared for repeated MI evaluation at different fading
/// points. Holds the chain-rule reduction when it applies.
#[derive(Debug, Clone)]
pub struct PreparedInput {
    blocks: usize,
    field: Field,
    /// block index of each real dimension
    block_of: Vec<usize>,
    alphabet: Alphabet,
    /// 2 when a `Ψ + jΨ` input was reduced to `Ψ`
    multiplier: f64,
}

impl PreparedInput {
    pub fn blocks(&self) -> usize {
        self.blocks
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn uses_chain_rule(&self) -> bool {
        self.multiplier != 1.0
    }

    /// Noise dimensions the expectation actually runs over.
    pub fn noise_dims(&self) -> usize {
        self.alphabet.dims
    }

    pub fn alphabet_size(&self) -> usize {
        self.alphabet.len()
    }
}

/// Mutual-information engine with cached quadrature rules. Cheap to share
/// across threads.
#[derive(Debug)]
pub struct MiEngine {
    cfg: MiConfig,
    rules: Mutex<HashMap<usize, Arc<ProductRule>>>,
}

impl Clone for MiEngine {
    fn clone(&self) -> Self {
        Self::new(self.cfg.clone()).expect("validated config")
    }
}

impl MiEngine {
    pub fn new(cfg: MiConfig) -> Result<Self> {
        cfg.validate()?;
        Ok(Self { cfg, rules: Mutex::new(HashMap::new()) })
    }

    pub fn config(&self) -> &MiConfig {
        &self.cfg
    }

    fn rule(&self, dims: usize) -> Result<Arc<ProductRule>> {
        let mut guard = self.rules.lock().expect("rule cache poisoned");
        if let Some(r) = guard.get(&dims) {
            return Ok(Arc::clone(r));
        }
        let r = Arc::new(ProductRule::new(self.cfg.gh_order, dims)?);
        guard.insert(dims, Arc::clone(&r));
        Ok(r)
    }

    pub fn prepare(&self, omega_x: &Constellation) -> PreparedInput {
        let b = omega_x.dim();
        let m = omega_x.len();
        if self.cfg.complex_chain_rule {
            if let Some(psi) = omega_x.real_imag_factor() {
                let k = psi.len();
                return PreparedInput {
                    blocks: b,
                    field: Field::Complex,
                    block_of: (0..b).collect(),
                    alphabet: Alphabet { dims: b, coords: psi.coords().to_vec(), probs: vec![1.0 / k as f64; k] },
                    multiplier: 2.0,
                };
            }
        }
        let w = omega_x.field().width();
        PreparedInput {
            blocks: b,
            field: omega_x.field(),
            block_of: (0..b * w).map(|d| d / w).collect(),
            alphabet: Alphabet { dims: b * w, coords: omega_x.coords().to_vec(), probs: vec![1.0 / m as f64; m] },
            multiplier: 1.0,
        }
    }

    fn choose(&self, size: usize, dims: usize) -> Result<bool> {
        let required = (size as f64).powi(2) * (self.cfg.gh_order as f64).powi(dims as i32);
        let fits = required <= self.cfg.budget_ops as f64;
        match self.cfg.engine {
            Engine::Mc => Ok(false),
            Engine::Auto => Ok(fits),
            Engine::Quadrature if fits => Ok(true),
            Engine::Quadrature => Err(Error::QuadratureBudget { required, budget: self.cfg.budget_ops as f64 }),
        }
    }

    /// `I(X;Y | α, γ)` in bits per symbol vector.
    pub fn mi_prepared(&self, input: &PreparedInput, s: &ChannelSample) -> Result<MiEstimate> {
        if s.alpha().len() != input.blocks {
            return Err(Error::DimensionMismatch { expected: input.blocks, actual: s.alpha().len() });
        }
        let root_gamma = s.gamma().sqrt();
        let a = &input.alphabet;
        let scale: Vec<f64> = input.block_of.iter().map(|&b| s.alpha()[b] * root_gamma).collect();
        let faded = Alphabet {
            dims: a.dims,
            coords: a.coords.chunks_exact(a.dims).flat_map(|p| p.iter().zip(&scale).map(|(v, k)| v * k)).collect(),
            probs: a.probs.clone(),
        };
        let est = self.evaluate(&faded)?;
        Ok(est.scaled(input.multiplier / LN_2, MiUnits::PerSymbolVector))
    }

    /// Nats, per symbol, for an alphabet already scaled by `√snr`.
    fn evaluate(&self, scaled: &Alphabet) -> Result<MiEstimate> {
        if self.choose(scaled.len(), scaled.dims)? {
            let rule = self.rule(scaled.dims)?;
            Ok(MiEstimate {
                value: quadrature_mi_nats(scaled, &rule),
                units: MiUnits::PerSymbolVector,
                method: MiMethod::Quadrature,
                std_error: 0.0,
                nodes_or_samples: rule.len(),
            })
        } else {
            let (value, std_error) = mc_mi_nats(scaled, self.cfg.mc_samples, self.cfg.seed);
            Ok(MiEstimate {
                value,
                units: MiUnits::PerSymbolVector,
                method: MiMethod::MonteCarlo,
                std_error,
                nodes_or_samples: self.cfg.mc_samples,
            })
        }
    }

    pub fn mi_discrete(&self, omega_x: &Constellation, s: &ChannelSample) -> Result<MiEstimate> {
        self.mi_prepared(&self.prepare(omega_x), s)
    }

    /// `I(α, γ, P) = I(X;Y|α,γ) / B`, bits per channel use.
    pub fn mi_per_use(&self, omega_x: &Constellation, s: &ChannelSample) -> Result<MiEstimate> {
        let input = self.prepare(omega_x);
        self.mi_per_use_prepared(&input, s)
    }

    pub fn mi_per_use_prepared(&self, input: &PreparedInput, s: &ChannelSample) -> Result<MiEstimate> {
        let est = self.mi_prepared(input, s)?;
        Ok(est.scaled(1.0 / input.blocks as f64, MiUnits::PerChannelUse))
    }

    fn projection_alphabet(sp: &ProjectionSet, snr: f64) -> Alphabet {
        let k = snr.max(0.0).sqrt();
        Alphabet { dims: sp.width(), coords: sp.values().iter().map(|v| v * k).collect(), probs: sp.weights().to_vec() }
    }

    /// MI in nats of the scalar channel `y = x + w`, `x ∈ S_p`, at
    /// instantaneous SNR `snr = α²γ`.
    pub fn mi_scalar_nats(&self, sp: &ProjectionSet, snr: f64) -> Result<f64> {
        if snr <= 0.0 {
            return Ok(0.0);
        }
        if self.cfg.complex_chain_rule {
            if let Some(re) = sp.real_imag_factor() {
                return Ok(2.0 * self.evaluate(&Self::projection_alphabet(&re, snr))?.value);
            }
        }
        Ok(self.evaluate(&Self::projection_alphabet(sp, snr))?.value)
    }

    /// `I_{S_p}(snr)` in bits.
    pub fn mi_scalar(&self, sp: &ProjectionSet, snr: f64) -> Result<f64> {
        Ok(self.mi_scalar_nats(sp, snr)? / LN_2)
    }

    /// Smallest `snr` with `I_{S_p}(snr) = target_bits`. Fails with
    /// [`Error::Saturation`] when the target is at or above the entropy of the
    /// projection.
    pub fn inv_mi_scalar(&self, sp: &ProjectionSet, target_bits: f64) -> Result<f64> {
        if !(target_bits > 0.0) {
            return Err(Error::InvalidParameter(format!("target rate must be > 0, got {target_bits}")));
        }
        let limit = sp.entropy_bits();
        if target_bits >= limit {
            return Err(Error::Saturation { target: target_bits, limit, points: sp.len() });
        }
        let mut failure = None;
        let mut f = |snr: f64| match self.mi_scalar(sp, snr) {
            Ok(v) => v,
            Err(e) => {
                failure.get_or_insert(e);
                f64::NAN
            }
        };
        let bracket = bracket_increasing(&mut f, target_bits, 1e-4, INV_SNR_LIMIT);
        let snr = match bracket {
            Bracket::Found { lo, hi } => illinois_increasing(&mut f, target_bits, lo, hi, INV_REL_TOL)?,
            Bracket::NotReached { .. } => return Err(Error::Saturation { target: target_bits, limit, points: sp.len() }),
        };
        match failure {
            Some(e) => Err(e),
            None => Ok(snr),
        }
    }

    /// `E|X − E[X|Y]|²` for the scalar channel at instantaneous SNR `snr`
    /// (noise variance `1/(2 snr)` per real dimension).
    /// One-dimensional sets use a fine trapezoid rule; the posterior mean is
    /// too sharp for Gauss–Hermite at moderate SNR.
    pub fn mmse_scalar(&self, sp: &ProjectionSet, snr: f64) -> Result<f64> {
        if snr < 0.0 {
            return Err(Error::InvalidParameter(format!("snr must be >= 0, got {snr}")));
        }
        if snr == 0.0 {
            return Ok(sp.variance());
        }
        let rule = if sp.width() == 1 {
            Arc::new(ProductRule::trapezoid_1d(MMSE_STEP, MMSE_HALF_WIDTH))
        } else {
            self.rule(sp.width())?
        };
        let k = snr.sqrt();
        let dims = sp.width();
        let n = sp.len();
        let mut post = vec![0.0; n];
        let mut total = 0.0;
        for i in 0..n {
            let xi = sp.value(i);
            for (u, wq) in rule.iter() {
                let mut max_e = f64::NEG_INFINITY;
                for j in 0..n {
                    let xj = sp.value(j);
                    let mut e = 0.0;
                    for d in 0..dims {
                        let s = k * (xi[d] - xj[d]);
                        e -= s * s + 2.0 * s * u[d];
                    }
                    post[j] = e;
                    max_e = max_e.max(e);
                }
                let mut z = 0.0;
                let mut est = [0.0; 2];
                for j in 0..n {
                    let wgt = sp.weights()[j] * (post[j] - max_e).exp();
                    z += wgt;
                    for d in 0..dims {
                        est[d] += wgt * sp.value(j)[d];
                    }
                }
                let err: f64 = (0..dims).map(|d| (xi[d] - est[d] / z).powi(2)).sum();
                total += sp.weights()[i] * wq * err;
            }
        }
        Ok(total)
    }
}

/// Deterministic tensor-rule evaluation of the MI (nats).
fn quadrature_mi_nats(a: &Alphabet, rule: &ProductRule) -> f64 {
    let m = a.len();
    let dims = a.dims;
    let mut diff = vec![0.0; m * dims];
    let mut norm2 = vec![0.0; m];
    let mut norm = vec![0.0; m];
    let mut expo = vec![0.0; m];
    let log_probs: Vec<f64> = a.probs.iter().map(|p| p.ln()).collect();
    let mut acc = 0.0;
    for i in 0..m {
        if a.probs[i] == 0.0 {
            continue;
        }
        let xi = a.point(i);
        for j in 0..m {
            let xj = a.point(j);
            let mut s2 = 0.0;
            for d in 0..dims {
                let s = xi[d] - xj[d];
                diff[j * dims + d] = s;
                s2 += s * s;
            }
            norm2[j] = s2;
            norm[j] = s2.sqrt();
        }
        let mut inner = 0.0;
        for (u, wq) in rule.iter() {
            let unorm = u.iter().map(|v| v * v).sum::<f64>().sqrt();
            inner += wq * log_partition(&diff, &norm2, &norm, &log_probs, u, unorm, &mut expo, dims);
        }
        acc += a.probs[i] * inner;
    }
    -acc
}

/// `ln Σ_j p_j exp(−|s_j|² − 2 s_j·u)` with max-subtraction.
#[inline]
#[allow(clippy::too_many_arguments)]
fn log_partition(
    diff: &[f64],
    norm2: &[f64],
    norm: &[f64],
    log_probs: &[f64],
    u: &[f64],
    unorm: f64,
    expo: &mut [f64],
    dims: usize,
) -> f64 {
    let m = norm2.len();
    let mut max_e = f64::NEG_INFINITY;
    for j in 0..m {
        // Cauchy–Schwarz upper bound on the exponent; the self term (s = 0)
        // keeps max_e >= ln p_i, so pruned terms are below e^-60 relative.
        let bound = -norm2[j] + 2.0 * norm[j] * unorm + log_probs[j];
        if bound < max_e - PRUNE_NATS {
            expo[j] = f64::NEG_INFINITY;
            continue;
        }
        let s = &diff[j * dims..(j + 1) * dims];
        let mut dot = 0.0;
        for d in 0..dims {
            dot += s[d] * u[d];
        }
        let e = -norm2[j] - 2.0 * dot + log_probs[j];
        expo[j] = e;
        if e > max_e {
            max_e = e;
        }
    }
    let mut sum = 0.0;
    for &e in expo.iter() {
        if e > max_e - PRUNE_NATS {
            sum += (e - max_e).exp();
        }
    }
    max_e + sum.ln()
}

/// Monte Carlo MI (nats) with its standard error. Every draw of `u` is shared
/// by all transmitted points.
fn mc_mi_nats(a: &Alphabet, samples: usize, seed: u64) -> (f64, f64) {
    let m = a.len();
    let dims = a.dims;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut diff = vec![0.0; m * dims];
    let mut norm2 = vec![0.0; m];
    let mut norm = vec![0.0; m];
    let mut expo = vec![0.0; m];
    let log_probs: Vec<f64> = a.probs.iter().map(|p| p.ln()).collect();
    let draws: Vec<f64> = (0..samples * dims)
        .map(|_| {
            let z: f64 = StandardNormal.sample(&mut rng);
            z * std::f64::consts::FRAC_1_SQRT_2
        })
        .collect();
    let mut per_sample = vec![0.0; samples];
    for i in 0..m {
        if a.probs[i] == 0.0 {
            continue;
        }
        let xi = a.point(i);
        for j in 0..m {
            let xj = a.point(j);
            let mut s2 = 0.0;
            for d in 0..dims {
                let s = xi[d] - xj[d];
                diff[j * dims + d] = s;
                s2 += s * s;
            }
            norm2[j] = s2;
            norm[j] = s2.sqrt();
        }
        for (n, u) in draws.chunks_exact(dims).enumerate() {
            let unorm = u.iter().map(|v| v * v).sum::<f64>().sqrt();
            per_sample[n] += a.probs[i] * log_partition(&diff, &norm2, &norm, &log_probs, u, unorm, &mut expo, dims);
        }
    }
    let n = samples as f64;
    let mean = per_sample.iter().sum::<f64>() / n;
    let var = per_sample.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (-mean, (var / n).sqrt())
}

/// Closed-form MI of i.i.d. Gaussian inputs, bits per channel use:
/// `(1/B) Σ_b ½ log2(1 + 2γα_b²)` for real inputs and
/// `(1/B) Σ_b log2(1 + γα_b²)` for complex inputs.
pub fn mi_gaussian(s: &ChannelSample, field: Field) -> MiEstimate {
    let b = s.alpha().len() as f64;
    let value = s
        .alpha()
        .iter()
        .map(|a| match field {
            Field::Real => 0.5 * (2.0 * s.gamma() * a * a).ln_1p(),
            Field::Complex => (s.gamma() * a * a).ln_1p(),
        })
        .sum::<f64>()
        / (b * LN_2);
    MiEstimate {
        value,
        units: MiUnits::PerChannelUse,
        method: MiMethod::ClosedForm,
        std_error: 0.0,
        nodes_or_samples: 0,
    }
}

/// Instantaneous SNR at which a Gaussian scalar input carries `bits`.
pub fn gaussian_inverse_snr(bits: f64, field: Field) -> f64 {
    match field {
        Field::Real => ((2.0 * bits * LN_2).exp() - 1.0) / 2.0,
        Field::Complex => (bits * LN_2).exp() - 1.0,
    }
}

/// First-order low-SNR MI in bits per channel use:
/// `γ Σ_b α_b² Var(X_b) / (B ln 2)`.
pub fn mi_lowsnr_approx(omega_x: &Constellation, s: &ChannelSample) -> Result<f64> {
    if s.alpha().len() != omega_x.dim() {
        return Err(Error::DimensionMismatch { expected: omega_x.dim(), actual: s.alpha().len() });
    }
    let b = omega_x.dim();
    let acc: f64 = (0..b).map(|k| s.alpha()[k].powi(2) * omega_x.component_variance(k)).sum();
    Ok(s.gamma() * acc / (b as f64 * LN_2))
}

/// Minimum Euclidean distance of the faded constellation `α·Ω_x`.
pub fn faded_min_distance(omega_x: &Constellation, alpha: &[f64]) -> Result<f64> {
    if alpha.len() != omega_x.dim() {
        return Err(Error::DimensionMismatch { expected: omega_x.dim(), actual: alpha.len() });
    }
    let n = omega_x.len();
    let mut best = f64::INFINITY;
    for i in 0..n {
        for j in (i + 1)..n {
            let mut d2 = 0.0;
            for (b, a) in alpha.iter().enumerate() {
                let (ar, ai) = omega_x.component(i, b);
                let (br, bi) = omega_x.component(j, b);
                d2 += a * a * ((ar - br).powi(2) + (ai - bi).powi(2));
            }
            best = best.min(d2);
        }
    }
    Ok(best.sqrt())
}

/// `(1/B) Σ_b I_{S_b}(α_b² γ)` with `S_b` the projection on axis `b`; an
/// upper bound on `I(α, γ, P)`.
pub fn projection_upper_bound(engine: &MiEngine, omega_x: &Constellation, s: &ChannelSample, tol: f64) -> Result<f64> {
    if s.alpha().len() != omega_x.dim() {
        return Err(Error::DimensionMismatch { expected: omega_x.dim(), actual: s.alpha().len() });
    }
    let b = omega_x.dim();
    let mut acc = 0.0;
    for (axis, a) in s.alpha().iter().enumerate() {
        let sp = omega_x.project(axis, tol)?;
        acc += engine.mi_scalar(&sp, a * a * s.gamma())?;
    }
    Ok(acc / b as f64)
}

pub fn mi_discrete(omega_x: &Constellation, s: &ChannelSample, cfg: &MiConfig) -> Result<MiEstimate> {
    MiEngine::new(cfg.clone())?.mi_discrete(omega_x, s)
}

pub fn mi_per_use(omega_x: &Constellation, s: &ChannelSample, cfg: &MiConfig) -> Result<MiEstimate> {
    MiEngine::new(cfg.clone())?.mi_per_use(omega_x, s)
}

pub fn mi_scalar(sp: &ProjectionSet, snr: f64, cfg: &MiConfig) -> Result<f64> {
    MiEngine::new(cfg.clone())?.mi_scalar(sp, snr)
}

pub fn inv_mi_scalar(sp: &ProjectionSet, target_bits: f64, cfg: &MiConfig) -> Result<f64> {
    MiEngine::new(cfg.clone())?.inv_mi_scalar(sp, target_bits)
}

pub fn mmse_scalar(sp: &ProjectionSet, snr: f64, cfg: &MiConfig) -> Result<f64> {
    MiEngine::new(cfg.clone())?.mmse_scalar(sp, snr)
}
