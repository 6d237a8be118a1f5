//! Outage probability over unit-power Rayleigh block fading: anchor points of
//! the outage boundary, hypersphere bounds, boundary tracing for `B = 2` and a
//! Monte Carlo estimator for any `B`.

use std::collections::HashMap;
use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};
use std::sync::Mutex;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp1};
use serde::{Deserialize, Serialize};

use crate::constellations::{Constellation, Field, DEDUP_TOL};
use crate::error::{Error, Result};
use crate::mutual_info::{gaussian_inverse_snr, mi_gaussian, ChannelSample, MiEngine, PreparedInput};
use crate::precoders::Precoder;
use crate::roots::{bracket_increasing, illinois_increasing, Bracket};

/// Relative tolerance on boundary radii and ergodic anchors.
pub const RADIUS_REL_TOL: f64 = 1e-9;
/// Fewest angular intervals accepted by the boundary integrator.
pub const MIN_TRACE_INTERVALS: usize = 64;
pub const DEFAULT_TRACE_INTERVALS: usize = 512;
const RAY_LIMIT_FACTOR: f64 = 1e4;
const Z95: f64 = 1.959_963_984_540_054;

/// `R = R_c · m / B`.
pub fn rate_from_code(rc: f64, m: f64, b: usize) -> f64 {
    rc * m / b as f64
}

pub trait FadingSampler: Sync {
    fn fill(&self, rng: &mut ChaCha8Rng, alpha: &mut [f64]);
}

/// Independent unit-power Rayleigh gains, `p(α) = 2α e^{−α²}`.
#[derive(Debug, Clone, Copy, Default)]
pub struct Rayleigh;

impl FadingSampler for Rayleigh {
    fn fill(&self, rng: &mut ChaCha8Rng, alpha: &mut [f64]) {
        for a in alpha.iter_mut() {
            let e: f64 = Exp1.sample(rng);
            *a = e.sqrt();
        }
    }
}

#[derive(Debug, Clone)]
enum Input {
    Discrete { omega_x: Constellation, prepared: PreparedInput, max_rate: f64 },
    Gaussian { field: Field },
}

/// Transmitted input, rate and average SNR of an outage computation.
#[derive(Debug, Clone)]
pub struct OutageQuery {
    input: Input,
    dim: usize,
    rate: f64,
    gamma: f64,
}

impl OutageQuery {
    pub fn discrete(engine: &MiEngine, omega_z: &Constellation, precoder: &Precoder, rate: f64, gamma: f64) -> Result<Self> {
        let omega_x = precoder.apply(omega_z)?;
        Self::precoded(engine, omega_x, rate, gamma)
    }

    /// Query on an already precoded constellation `Ω_x`.
    pub fn precoded(engine: &MiEngine, omega_x: Constellation, rate: f64, gamma: f64) -> Result<Self> {
        check_rate_gamma(rate, gamma)?;
        let prepared = engine.prepare(&omega_x);
        let max_rate = omega_x.bits() / omega_x.dim() as f64;
        Ok(Self { dim: omega_x.dim(), input: Input::Discrete { omega_x, prepared, max_rate }, rate, gamma })
    }

    pub fn gaussian(field: Field, dim: usize, rate: f64, gamma: f64) -> Result<Self> {
        check_rate_gamma(rate, gamma)?;
        if dim == 0 {
            return Err(Error::InvalidParameter("B must be >= 1".into()));
        }
        Ok(Self { input: Input::Gaussian { field }, dim, rate, gamma })
    }

    pub fn with_gamma(&self, gamma: f64) -> Result<Self> {
        check_rate_gamma(self.rate, gamma)?;
        Ok(Self { gamma, ..self.clone() })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn rate(&self) -> f64 {
        self.rate
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn omega_x(&self) -> Option<&Constellation> {
        match &self.input {
            Input::Discrete { omega_x, .. } => Some(omega_x),
            Input::Gaussian { .. } => None,
        }
    }

    pub fn field(&self) -> Field {
        match &self.input {
            Input::Discrete { omega_x, .. } => omega_x.field(),
            Input::Gaussian { field } => *field,
        }
    }

    /// Largest rate the input can carry, `m/B` (unbounded for Gaussian input).
    pub fn max_rate(&self) -> f64 {
        match &self.input {
            Input::Discrete { max_rate, .. } => *max_rate,
            Input::Gaussian { .. } => f64::INFINITY,
        }
    }

    /// Outage is certain when the rate is not below `m/B`.
    pub fn is_trivial(&self) -> bool {
        self.rate >= self.max_rate()
    }

    /// `I(α, γ, P)` in bits per channel use.
    pub fn mi(&self, engine: &MiEngine, alpha: &[f64]) -> Result<f64> {
        if alpha.iter().all(|a| *a == 0.0) {
            return Ok(0.0);
        }
        let s = ChannelSample::new(alpha.to_vec(), self.gamma)?;
        match &self.input {
            Input::Discrete { prepared, .. } => Ok(engine.mi_per_use_prepared(prepared, &s)?.value),
            Input::Gaussian { field } => Ok(mi_gaussian(&s, *field).value),
        }
    }

    /// Gaussian-input axis anchor, used as the natural radius scale.
    fn reference_radius(&self) -> f64 {
        (gaussian_inverse_snr(self.dim as f64 * self.rate, self.field()) / self.gamma).sqrt()
    }
}

fn check_rate_gamma(rate: f64, gamma: f64) -> Result<()> {
    if !(rate > 0.0) || !rate.is_finite() {
        return Err(Error::InvalidParameter(format!("rate must be > 0, got {rate}")));
    }
    if !(gamma > 0.0) || !gamma.is_finite() {
        return Err(Error::InvalidParameter(format!("average SNR must be > 0, got {gamma}")));
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OutageAnchors {
    /// Axis intersection; `None` when the projection saturates below `B·R`.
    pub alpha_o: Option<f64>,
    /// Ergodic-line intersection; `None` when `R >= m/B`.
    pub alpha_e: Option<f64>,
    pub alpha_o_reason: Option<String>,
    pub alpha_e_reason: Option<String>,
}

impl OutageAnchors {
    pub fn gaussian(field: Field, dim: usize, rate: f64, gamma: f64) -> Self {
        Self {
            alpha_o: Some((gaussian_inverse_snr(dim as f64 * rate, field) / gamma).sqrt()),
            alpha_e: Some((gaussian_inverse_snr(rate, field) / gamma).sqrt()),
            alpha_o_reason: None,
            alpha_e_reason: None,
        }
    }
}

/// `α_o` from the inverse scalar MI of the projection on the first axis and
/// `α_e` by bisection along the ergodic line.
pub fn compute_anchors(engine: &MiEngine, q: &OutageQuery) -> Result<OutageAnchors> {
    let omega_x = match &q.input {
        Input::Gaussian { field } => return Ok(OutageAnchors::gaussian(*field, q.dim, q.rate, q.gamma)),
        Input::Discrete { omega_x, .. } => omega_x,
    };
    let b = q.dim as f64;
    let sp = omega_x.project(0, DEDUP_TOL)?;
    let (alpha_o, alpha_o_reason) = match engine.inv_mi_scalar(&sp, b * q.rate) {
        Ok(snr) => (Some((snr / q.gamma).sqrt()), None),
        Err(e @ Error::Saturation { .. }) => (None, Some(e.to_string())),
        Err(e) => return Err(e),
    };
    let (alpha_e, alpha_e_reason) = if q.is_trivial() {
        (None, Some(format!("rate {} is not below m/B = {}", q.rate, q.max_rate())))
    } else {
        let ones = vec![1.0; q.dim];
        let c = solve_ray(engine, q, &ones, q.reference_radius())?;
        match c {
            Some(c) => (Some(c), None),
            None => (None, Some("mutual information on the ergodic line stays below the rate".into())),
        }
    };
    Ok(OutageAnchors { alpha_o, alpha_e, alpha_o_reason, alpha_e_reason })
}

/// Smallest `c` with `I(c·dir) = R`, or `None` when the ray saturates.
fn solve_ray(engine: &MiEngine, q: &OutageQuery, dir: &[f64], start: f64) -> Result<Option<f64>> {
    let mut failure = None;
    let mut alpha = vec![0.0; dir.len()];
    let mut f = |c: f64| {
        for (a, d) in alpha.iter_mut().zip(dir) {
            *a = c * d;
        }
        match q.mi(engine, &alpha) {
            Ok(v) => v,
            Err(e) => {
                failure.get_or_insert(e);
                f64::NAN
            }
        }
    };
    let found = match bracket_increasing(&mut f, q.rate, start, start * RAY_LIMIT_FACTOR) {
        Bracket::Found { lo, hi } => Some(illinois_increasing(&mut f, q.rate, lo, hi, RADIUS_REL_TOL)?),
        Bracket::NotReached { .. } => None,
    };
    match failure {
        Some(e) => Err(e),
        None => Ok(found),
    }
}

/// CDF of `Σ_b α_b²` for `b` unit-power Rayleigh gains:
/// `1 − e^{−x} Σ_{k<B} x^k/k!`.
pub fn chi_square_cdf(x: f64, b: usize) -> f64 {
    assert!(b >= 1, "B must be >= 1");
    if !(x > 0.0) {
        return 0.0;
    }
    if x.is_infinite() {
        return 1.0;
    }
    if x < b as f64 {
        // e^{−x} Σ_{k≥B} x^k/k!, no cancellation
        let mut term = (-x).exp();
        for k in 1..=b {
            term *= x / k as f64;
        }
        let mut sum = 0.0;
        let mut k = b;
        while term > sum * 1e-17 {
            sum += term;
            k += 1;
            term *= x / k as f64;
        }
        sum.min(1.0)
    } else {
        let mut term = 1.0;
        let mut sum = 1.0;
        for k in 1..b {
            term *= x / k as f64;
            sum += term;
        }
        (1.0 - (-x).exp() * sum).max(0.0)
    }
}

/// `(p_up, p_low)` from the outer sphere of radius `α_o` and the inner sphere
/// of squared radius `B·α_e²`. A missing `α_o` gives `p_up = 1`, a missing
/// `α_e` gives `p_low = 0`.
pub fn hypersphere_bounds(anchors: &OutageAnchors, b: usize) -> (f64, f64) {
    let p_up = anchors.alpha_o.map_or(1.0, |a| chi_square_cdf(a * a, b));
    let p_low = anchors.alpha_e.map_or(0.0, |a| chi_square_cdf(b as f64 * a * a, b));
    (p_up, p_low)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OutageMethod {
    Mc,
    RayMc,
    BoundaryIntegration,
    Trivial,
}

impl OutageMethod {
    pub fn label(self) -> &'static str {
        match self {
            OutageMethod::Mc => "mc",
            OutageMethod::RayMc => "ray_mc",
            OutageMethod::BoundaryIntegration => "boundary_integration",
            OutageMethod::Trivial => "trivial",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OutageResult {
    pub p_out: f64,
    pub ci95: (f64, f64),
    pub method: OutageMethod,
    pub samples: usize,
    pub p_up: f64,
    pub p_low: f64,
}

impl OutageResult {
    fn certain() -> Self {
        Self { p_out: 1.0, ci95: (1.0, 1.0), method: OutageMethod::Trivial, samples: 0, p_up: 1.0, p_low: 1.0 }
    }
}

/// Wilson score interval at 95% confidence.
pub fn wilson_interval(hits: u64, n: u64) -> (f64, f64) {
    if n == 0 {
        return (0.0, 1.0);
    }
    let n = n as f64;
    let p = hits as f64 / n;
    let z2 = Z95 * Z95;
    let denom = 1.0 + z2 / n;
    let centre = (p + z2 / (2.0 * n)) / denom;
    let half = Z95 * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt() / denom;
    ((centre - half).max(0.0), (centre + half).min(1.0))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct McOptions {
    pub samples: usize,
    pub seed: u64,
    /// Samples per independent RNG stream.
    pub chunk: usize,
    /// Resolution of the geometric certificate lattice.
    pub steps_per_octave: u32,
}

impl Default for McOptions {
    fn default() -> Self {
        Self { samples: 100_000, seed: 1, chunk: 1 << 16, steps_per_octave: 16 }
    }
}

impl McOptions {
    pub fn new(samples: usize, seed: u64) -> Self {
        Self { samples, seed, ..Self::default() }
    }
}

/// Geometric grid per gain, `0` followed by `r·2^{(k−k0)/s}`, on which the
/// componentwise-monotone MI is memoized.
struct Lattice {
    levels: Vec<f64>,
    memo: Mutex<HashMap<Vec<u16>, f64>>,
}

const LATTICE_OCTAVES: i32 = 10;

impl Lattice {
    fn new(reference: f64, steps_per_octave: u32) -> Self {
        let s = steps_per_octave.max(1) as i32;
        let mut levels = vec![0.0];
        for k in -LATTICE_OCTAVES * s..=LATTICE_OCTAVES * s {
            levels.push(reference * 2f64.powf(k as f64 / s as f64));
        }
        Self { levels, memo: Mutex::new(HashMap::new()) }
    }

    /// Index `l` with `levels[l] <= a < levels[l + 1]`, or `None` above the top.
    fn cell(&self, a: f64) -> Option<u16> {
        let l = self.levels.partition_point(|v| *v <= a);
        (l < self.levels.len()).then(|| (l - 1) as u16)
    }

    fn corner_mi(&self, engine: &MiEngine, q: &OutageQuery, idx: &[u16]) -> Result<f64> {
        if let Some(v) = self.memo.lock().expect("memo poisoned").get(idx) {
            return Ok(*v);
        }
        let alpha: Vec<f64> = idx.iter().map(|&k| self.levels[k as usize]).collect();
        let v = q.mi(engine, &alpha)?;
        self.memo.lock().expect("memo poisoned").insert(idx.to_vec(), v);
        Ok(v)
    }

    fn in_outage(&self, engine: &MiEngine, q: &OutageQuery, alpha: &[f64]) -> Result<bool> {
        let cells: Option<Vec<u16>> = alpha.iter().map(|a| self.cell(*a)).collect();
        if let Some(lo) = cells {
            let hi: Vec<u16> = lo.iter().map(|k| k + 1).collect();
            if self.corner_mi(engine, q, &hi)? < q.rate {
                return Ok(true);
            }
            if self.corner_mi(engine, q, &lo)? >= q.rate {
                return Ok(false);
            }
        }
        Ok(q.mi(engine, alpha)? < q.rate)
    }
}

/// Monte Carlo outage estimate with `p_up`/`p_low` from the anchors.
///
/// Each fading draw is classified exactly: the MI is nondecreasing in every
/// gain, so evaluations at the corners of the enclosing lattice cell decide
/// most draws and the rest are evaluated directly.
pub fn outage_mc(engine: &MiEngine, q: &OutageQuery, opts: &McOptions) -> Result<OutageResult> {
    outage_mc_with(engine, q, opts, &Rayleigh)
}

pub fn outage_mc_with<S: FadingSampler>(engine: &MiEngine, q: &OutageQuery, opts: &McOptions, sampler: &S) -> Result<OutageResult> {
    if opts.samples < 1000 {
        return Err(Error::InvalidParameter(format!("Monte Carlo needs at least 1000 samples, got {}", opts.samples)));
    }
    if opts.chunk == 0 {
        return Err(Error::InvalidParameter("chunk must be >= 1".into()));
    }
    if q.is_trivial() {
        return Ok(OutageResult { samples: opts.samples, ..OutageResult::certain() });
    }
    let anchors = compute_anchors(engine, q)?;
    let (p_up, p_low) = hypersphere_bounds(&anchors, q.dim);
    let lattice = Lattice::new(q.reference_radius(), opts.steps_per_octave);
    let chunks = opts.samples.div_ceil(opts.chunk);
    let run_chunk = |c: usize| -> Result<u64> {
        let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
        rng.set_stream(c as u64);
        let n = opts.chunk.min(opts.samples - c * opts.chunk);
        let mut alpha = vec![0.0; q.dim];
        let mut hits = 0;
        for _ in 0..n {
            sampler.fill(&mut rng, &mut alpha);
            if lattice.in_outage(engine, q, &alpha)? {
                hits += 1;
            }
        }
        Ok(hits)
    };
    let counts: Vec<Result<u64>> = par_map(chunks, run_chunk);
    let mut hits = 0;
    for c in counts {
        hits += c?;
    }
    let n = opts.samples as u64;
    Ok(OutageResult {
        p_out: hits as f64 / n as f64,
        ci95: wilson_interval(hits, n),
        method: OutageMethod::Mc,
        samples: opts.samples,
        p_up,
        p_low,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RayMcOptions {
    pub rays: usize,
    pub seed: u64,
}

impl Default for RayMcOptions {
    fn default() -> Self {
        Self { rays: 2000, seed: 1 }
    }
}

pub const MIN_RAYS: usize = 100;
/// Rays per independent RNG stream.
const RAY_BLOCK: usize = 32;

/// Radially conditioned Monte Carlo.
///
/// Under i.i.d. Rayleigh gains, `|α|²` is independent of the direction
/// `u = α/|α|` and has CDF `chi_square_cdf(·, B)`. Each sampled direction
/// therefore contributes `chi_square_cdf(ρ(u)², B)`, where `ρ(u)` is the
/// boundary radius along `u`. The CI is the normal interval of the mean.
pub fn outage_ray_mc(engine: &MiEngine, q: &OutageQuery, opts: &RayMcOptions) -> Result<OutageResult> {
    Ok(outage_ray_mc_curve(engine, q, &[q.gamma], opts)?.remove(0))
}

/// [`outage_ray_mc`] over an SNR grid from one set of rays traced at `q.gamma`;
/// radii scale as `√(γ_q/γ)`.
pub fn outage_ray_mc_curve(engine: &MiEngine, q: &OutageQuery, gammas: &[f64], opts: &RayMcOptions) -> Result<Vec<OutageResult>> {
    if opts.rays < MIN_RAYS {
        return Err(Error::InvalidParameter(format!("ray Monte Carlo needs at least {MIN_RAYS} rays, got {}", opts.rays)));
    }
    for g in gammas {
        check_rate_gamma(q.rate, *g)?;
    }
    if q.is_trivial() {
        return Ok(gammas.iter().map(|_| OutageResult { samples: opts.rays, ..OutageResult::certain() }).collect());
    }
    let start = q.reference_radius();
    let blocks = opts.rays.div_ceil(RAY_BLOCK);
    let traced: Vec<Result<Vec<f64>>> = par_map(blocks, |c| {
        let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
        rng.set_stream(c as u64);
        let n = RAY_BLOCK.min(opts.rays - c * RAY_BLOCK);
        let mut alpha = vec![0.0; q.dim];
        let mut out = Vec::with_capacity(n);
        for _ in 0..n {
            let norm = loop {
                Rayleigh.fill(&mut rng, &mut alpha);
                let norm = alpha.iter().map(|a| a * a).sum::<f64>().sqrt();
                if norm > 0.0 {
                    break norm;
                }
            };
            for a in alpha.iter_mut() {
                *a /= norm;
            }
            out.push(solve_ray(engine, q, &alpha, start)?.map_or(f64::INFINITY, |r| r * r));
        }
        Ok(out)
    });
    let mut rho2 = Vec::with_capacity(opts.rays);
    for t in traced {
        rho2.extend(t?);
    }
    let anchors = compute_anchors(engine, q)?;
    let n = rho2.len() as f64;
    Ok(gammas
        .iter()
        .map(|g| {
            let k = q.gamma / g;
            let vals = rho2.iter().map(|r| if r.is_finite() { chi_square_cdf(r * k, q.dim) } else { 1.0 });
            let (sum, sum2) = vals.fold((0.0, 0.0), |(s, s2), v| (s + v, s2 + v * v));
            let mean = sum / n;
            let var = ((sum2 / n - mean * mean) * n / (n - 1.0)).max(0.0);
            let half = Z95 * (var / n).sqrt();
            let scaled = OutageAnchors {
                alpha_o: anchors.alpha_o.map(|a| a * k.sqrt()),
                alpha_e: anchors.alpha_e.map(|a| a * k.sqrt()),
                ..anchors.clone()
            };
            let (p_up, p_low) = hypersphere_bounds(&scaled, q.dim);
            OutageResult {
                p_out: mean,
                ci95: ((mean - half).max(0.0), (mean + half).min(1.0)),
                method: OutageMethod::RayMc,
                samples: opts.rays,
                p_up,
                p_low,
            }
        })
        .collect())
}

#[cfg(feature = "parallel")]
pub(crate) fn par_map<T: Send, F: Fn(usize) -> T + Sync + Send>(n: usize, f: F) -> Vec<T> {
    use rayon::prelude::*;
    (0..n).into_par_iter().map(f).collect()
}

#[cfg(not(feature = "parallel"))]
pub(crate) fn par_map<T: Send, F: Fn(usize) -> T + Sync + Send>(n: usize, f: F) -> Vec<T> {
    (0..n).map(f).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundaryPoint {
    pub lambda_rad: f64,
    /// `+∞` when saturated
    pub rho: f64,
    pub saturated: bool,
}

/// Outage boundary of a `B = 2` query in polar coordinates,
/// `α = ρ(λ)(cos λ, sin λ)` on `n_intervals + 1` equally spaced angles in
/// `[0, π/2]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundaryTrace {
    pub rate: f64,
    pub gamma: f64,
    pub points: Vec<BoundaryPoint>,
}

impl BoundaryTrace {
    pub fn intervals(&self) -> usize {
        self.points.len().saturating_sub(1)
    }

    /// The boundary at another average SNR. The MI depends on `α` and `γ`
    /// only through `γ α_b²`, so every radius scales by `√(γ_old/γ)`.
    pub fn at_gamma(&self, gamma: f64) -> Result<Self> {
        check_rate_gamma(self.rate, gamma)?;
        let k = (self.gamma / gamma).sqrt();
        let points = self.points.iter().map(|p| BoundaryPoint { rho: p.rho * k, ..*p }).collect();
        Ok(Self { rate: self.rate, gamma, points })
    }

    /// `ρ(π/4)/√2`, when the grid contains the ergodic direction.
    pub fn ergodic_anchor(&self) -> Option<f64> {
        let n = self.intervals();
        (n % 4 == 0 && n > 0).then(|| self.points[n / 2].rho / 2f64.sqrt())
    }
}

pub fn trace_boundary_2d(engine: &MiEngine, q: &OutageQuery, n_intervals: usize) -> Result<BoundaryTrace> {
    if q.dim != 2 {
        return Err(Error::DimensionMismatch { expected: 2, actual: q.dim });
    }
    if n_intervals == 0 {
        return Err(Error::InvalidParameter("boundary trace needs at least one interval".into()));
    }
    let start = q.reference_radius();
    let points: Vec<Result<BoundaryPoint>> = par_map(n_intervals + 1, |k| {
        let lambda = FRAC_PI_2 * k as f64 / n_intervals as f64;
        let (c, s) = if k == n_intervals { (0.0, 1.0) } else { (lambda.cos(), lambda.sin()) };
        let rho = if q.is_trivial() { None } else { solve_ray(engine, q, &[c, s], start)? };
        Ok(BoundaryPoint { lambda_rad: lambda, rho: rho.unwrap_or(f64::INFINITY), saturated: rho.is_none() })
    });
    Ok(BoundaryTrace { rate: q.rate, gamma: q.gamma, points: points.into_iter().collect::<Result<_>>()? })
}

/// Deterministic outage probability from a traced boundary:
/// `∫_0^{π/2} sin(2λ) (1 − (1 + ρ²) e^{−ρ²}) dλ` by composite Simpson.
pub fn outage_from_boundary_2d(trace: &BoundaryTrace) -> Result<OutageResult> {
    let n = trace.intervals();
    if n < MIN_TRACE_INTERVALS {
        return Err(Error::InvalidParameter(format!(
            "boundary trace has {n} intervals, at least {MIN_TRACE_INTERVALS} are required"
        )));
    }
    if n % 2 != 0 {
        return Err(Error::InvalidParameter(format!("boundary trace needs an even number of intervals, got {n}")));
    }
    let h = FRAC_PI_2 / n as f64;
    let mut acc = 0.0;
    for (k, p) in trace.points.iter().enumerate() {
        let radial = if p.saturated { 1.0 } else { chi_square_cdf(p.rho * p.rho, 2) };
        let w = if k == 0 || k == n { 1.0 } else if k % 2 == 1 { 4.0 } else { 2.0 };
        acc += w * (2.0 * p.lambda_rad).sin() * radial;
    }
    let p_out = (acc * h / 3.0).clamp(0.0, 1.0);
    let first = trace.points[0];
    let last = trace.points[n];
    let alpha_o = (!first.saturated && !last.saturated).then(|| first.rho.max(last.rho));
    let anchors = OutageAnchors { alpha_o, alpha_e: trace.ergodic_anchor(), alpha_o_reason: None, alpha_e_reason: None };
    let (p_up, p_low) = hypersphere_bounds(&anchors, 2);
    Ok(OutageResult {
        p_out,
        ci95: (p_out, p_out),
        method: OutageMethod::BoundaryIntegration,
        samples: n + 1,
        p_up,
        p_low,
    })
}

/// Boundary-integration outage over an SNR grid from a single trace.
pub fn outage_curve_2d(engine: &MiEngine, q: &OutageQuery, gammas: &[f64], n_intervals: usize) -> Result<Vec<OutageResult>> {
    if q.is_trivial() {
        return Ok(gammas.iter().map(|_| OutageResult::certain()).collect());
    }
    let trace = trace_boundary_2d(engine, q, n_intervals)?;
    gammas.iter().map(|g| outage_from_boundary_2d(&trace.at_gamma(*g)?)).collect()
}

/// Boundary integration for `B = 2`, Monte Carlo otherwise.
pub fn outage_auto(engine: &MiEngine, q: &OutageQuery, opts: &McOptions) -> Result<OutageResult> {
    if q.is_trivial() {
        return Ok(OutageResult::certain());
    }
    if q.dim == 2 {
        outage_from_boundary_2d(&trace_boundary_2d(engine, q, DEFAULT_TRACE_INTERVALS)?)
    } else {
        outage_mc(engine, q, opts)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiversityReport {
    pub gammas: Vec<f64>,
    pub p_up: Vec<f64>,
    /// Least-squares slope of `log10 p_up` against `log10 γ` over the top decade.
    pub slope: f64,
}

/// Upper bound `p_up(γ)` along an SNR grid and its high-SNR slope. Fails
/// with the diversity-loss diagnostic when `α_o` does not exist.
pub fn diversity_bound(engine: &MiEngine, q: &OutageQuery, gammas: &[f64]) -> Result<DiversityReport> {
    if gammas.len() < 2 {
        return Err(Error::InvalidParameter("diversity slope needs at least two SNR values".into()));
    }
    let axis_snr = match &q.input {
        Input::Gaussian { field } => gaussian_inverse_snr(q.dim as f64 * q.rate, *field),
        Input::Discrete { omega_x, .. } => {
            let sp = omega_x.project(0, DEDUP_TOL)?;
            engine.inv_mi_scalar(&sp, q.dim as f64 * q.rate)?
        }
    };
    let mut p_up = Vec::with_capacity(gammas.len());
    for &g in gammas {
        check_rate_gamma(q.rate, g)?;
        p_up.push(chi_square_cdf(axis_snr / g, q.dim));
    }
    let top = gammas.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let pts: Vec<(f64, f64)> = gammas
        .iter()
        .zip(&p_up)
        .filter(|(g, p)| **g >= top / 10.0 * (1.0 - 1e-12) && **p > 0.0)
        .map(|(g, p)| (g.log10(), p.log10()))
        .collect();
    let slope = loglog_slope(&pts).ok_or_else(|| Error::InvalidParameter("top decade holds fewer than two SNR values".into()))?;
    Ok(DiversityReport { gammas: gammas.to_vec(), p_up, slope })
}

/// Least-squares slope through `(x, y)` pairs.
pub fn loglog_slope(pts: &[(f64, f64)]) -> Option<f64> {
    if pts.len() < 2 {
        return None;
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    (sxx > 0.0).then(|| sxy / sxx)
}

pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

pub fn linear_to_db(x: f64) -> f64 {
    10.0 * x.log10()
}

/// Angle of the ergodic direction for `B = 2`.
pub const ERGODIC_ANGLE: f64 = FRAC_PI_4;
