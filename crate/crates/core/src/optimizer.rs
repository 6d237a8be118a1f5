//! Precoder-angle search against the axis-anchor criterion
//! `γ_s(θ) = I_{S_p}^{-1}(B·R)`, constellation-expansion comparison and
//! minimum-product-distance profiles.

use serde::{Deserialize, Serialize};

use crate::constellations::{Constellation, Field, DEDUP_TOL};
use crate::error::{Error, Result};
use crate::mutual_info::{gaussian_inverse_snr, MiEngine};
use crate::outage::{compute_anchors, linear_to_db, par_map, OutageQuery};
use crate::precoders::precode;
use crate::roots::golden_section_min;

/// Relative tolerance under which two grid values count as a tie.
pub const TIE_REL_TOL: f64 = 1e-6;

/// Smallest instantaneous SNR at which any input of the given field carries
/// `B·R` bits on one axis.
pub fn gaussian_floor(field: Field, dim: usize, rate: f64) -> f64 {
    gaussian_inverse_snr(dim as f64 * rate, field)
}

/// Default search range in degrees: `[0, 90]` for `B = 2`, `[0, 120]` for `B = 3`.
pub fn default_range_deg(dim: usize) -> (f64, f64) {
    match dim {
        3 => (0.0, 120.0),
        _ => (0.0, 90.0),
    }
}

pub fn param_name(dim: usize) -> &'static str {
    match dim {
        3 => "theta1",
        _ => "theta",
    }
}

/// Evenly spaced angles in degrees, both ends included.
pub fn degree_grid(lo: f64, hi: f64, step: f64) -> Result<Vec<f64>> {
    if !(step > 0.0) || !(hi >= lo) {
        return Err(Error::InvalidParameter(format!("invalid grid {lo}:{hi}:{step}")));
    }
    let n = ((hi - lo) / step + 1e-9).floor() as usize;
    Ok((0..=n).map(|k| lo + step * k as f64).collect())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepProfile {
    pub param_name: String,
    pub dim: usize,
    pub rate: f64,
    /// radians
    pub grid: Vec<f64>,
    /// linear; `+∞` when saturated
    pub gamma_s: Vec<f64>,
    pub d_pmin: Option<Vec<f64>>,
    pub gaussian_floor: f64,
}

impl SweepProfile {
    pub fn saturated(&self, k: usize) -> bool {
        self.gamma_s[k].is_infinite()
    }

    /// Index of the smallest `γ_s`, preferring the smallest angle on ties.
    pub fn argmin(&self) -> Option<usize> {
        let mut best: Option<usize> = None;
        for (k, g) in self.gamma_s.iter().enumerate() {
            if !g.is_finite() {
                continue;
            }
            match best {
                Some(b) if *g >= self.gamma_s[b] * (1.0 - TIE_REL_TOL) => {}
                _ => best = Some(k),
            }
        }
        best
    }
}

/// `γ_s` of the precoded projection at one angle (radians); `+∞` on saturation.
pub fn gamma_s_at(engine: &MiEngine, omega_z: &Constellation, rate: f64, angle: f64) -> Result<f64> {
    let omega_x = precode(omega_z, angle)?;
    let sp = omega_x.project(0, DEDUP_TOL)?;
    match engine.inv_mi_scalar(&sp, omega_z.dim() as f64 * rate) {
        Ok(g) => Ok(g),
        Err(Error::Saturation { .. }) => Ok(f64::INFINITY),
        Err(e) => Err(e),
    }
}

fn check_sweep_input(omega_z: &Constellation, rate: f64) -> Result<()> {
    if !(rate > 0.0) {
        return Err(Error::InvalidParameter(format!("rate must be > 0, got {rate}")));
    }
    if !matches!(omega_z.dim(), 2 | 3) {
        return Err(Error::InvalidParameter(format!("angle sweeps need B=2 or B=3, got B={}", omega_z.dim())));
    }
    Ok(())
}

/// `γ_s` over a grid of angles (radians). Fails when every grid point is
/// saturated.
pub fn sweep(engine: &MiEngine, omega_z: &Constellation, rate: f64, grid: &[f64], with_d_pmin: bool) -> Result<SweepProfile> {
    check_sweep_input(omega_z, rate)?;
    if grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidParameter("sweep grid must be strictly increasing".into()));
    }
    let gamma_s = par_map(grid.len(), |k| gamma_s_at(engine, omega_z, rate, grid[k])).into_iter().collect::<Result<Vec<_>>>()?;
    if gamma_s.iter().all(|g| g.is_infinite()) {
        return Err(infeasible(omega_z, rate));
    }
    let d_pmin = if with_d_pmin { Some(product_distance_profile(omega_z, grid)?) } else { None };
    Ok(SweepProfile {
        param_name: param_name(omega_z.dim()).into(),
        dim: omega_z.dim(),
        rate,
        grid: grid.to_vec(),
        gamma_s,
        d_pmin,
        gaussian_floor: gaussian_floor(omega_z.field(), omega_z.dim(), rate),
    })
}

fn infeasible(omega_z: &Constellation, rate: f64) -> Error {
    Error::InfeasibleRate(format!(
        "{}: the projection saturates below {:.4} bits at every angle, so no precoder gives full diversity",
        omega_z.name(),
        omega_z.dim() as f64 * rate
    ))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OptimizeOptions {
    pub coarse_step_deg: f64,
    pub refine_tol_deg: f64,
    pub interval_db: f64,
    /// Defaults to [`default_range_deg`].
    pub range_deg: Option<(f64, f64)>,
}

impl Default for OptimizeOptions {
    fn default() -> Self {
        Self { coarse_step_deg: 0.5, refine_tol_deg: 0.05, interval_db: 0.05, range_deg: None }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Optimum {
    pub theta_opt_deg: f64,
    pub gamma_s_opt: f64,
    /// Contiguous grid runs within `interval_db` of the minimum, in degrees.
    pub intervals_deg: Vec<(f64, f64)>,
    pub profile: SweepProfile,
}

impl Optimum {
    pub fn gap_to_gaussian_db(&self) -> f64 {
        linear_to_db(self.gamma_s_opt / self.profile.gaussian_floor)
    }
}

/// Coarse grid followed by golden-section refinement around the best grid
/// point.
pub fn optimize(engine: &MiEngine, omega_z: &Constellation, rate: f64, opts: &OptimizeOptions) -> Result<Optimum> {
    check_sweep_input(omega_z, rate)?;
    let (lo, hi) = opts.range_deg.unwrap_or_else(|| default_range_deg(omega_z.dim()));
    let grid_deg = degree_grid(lo, hi, opts.coarse_step_deg)?;
    let grid: Vec<f64> = grid_deg.iter().map(|d| d.to_radians()).collect();
    let profile = sweep(engine, omega_z, rate, &grid, true)?;
    let k = profile.argmin().ok_or_else(|| infeasible(omega_z, rate))?;
    let grid_best = profile.gamma_s[k];

    let a = (grid_deg[k] - opts.coarse_step_deg).max(lo);
    let b = (grid_deg[k] + opts.coarse_step_deg).min(hi);
    let mut failure = None;
    let (x, fx) = golden_section_min(
        |deg: f64| match gamma_s_at(engine, omega_z, rate, deg.to_radians()) {
            Ok(g) => g,
            Err(e) => {
                failure.get_or_insert(e);
                f64::INFINITY
            }
        },
        a,
        b,
        opts.refine_tol_deg,
    );
    if let Some(e) = failure {
        return Err(e);
    }
    let (theta_opt_deg, gamma_s_opt) = if fx < grid_best { (x, fx) } else { (grid_deg[k], grid_best) };

    let limit_db = linear_to_db(gamma_s_opt) + opts.interval_db;
    let mut intervals_deg = Vec::new();
    let mut start: Option<usize> = None;
    for (i, g) in profile.gamma_s.iter().enumerate() {
        let inside = g.is_finite() && linear_to_db(*g) <= limit_db;
        match (inside, start) {
            (true, None) => start = Some(i),
            (false, Some(s)) => {
                intervals_deg.push((grid_deg[s], grid_deg[i - 1]));
                start = None;
            }
            _ => {}
        }
    }
    if let Some(s) = start {
        intervals_deg.push((grid_deg[s], grid_deg[grid_deg.len() - 1]));
    }
    Ok(Optimum { theta_opt_deg, gamma_s_opt, intervals_deg, profile })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExpansionRow {
    pub name: String,
    pub m: f64,
    pub rc: f64,
    pub theta_opt_deg: f64,
    pub gamma_s_opt_db: f64,
    /// Instantaneous SNR `γ α_e²` on the ergodic line, in dB.
    pub ergodic_snr_db: f64,
    pub gap_db: f64,
}

/// Optimized `γ_s` of each candidate at a common rate `R = R_c·m/B`.
pub fn expansion_compare(engine: &MiEngine, candidates: &[(Constellation, f64)], rate: f64, opts: &OptimizeOptions) -> Result<Vec<ExpansionRow>> {
    let mut rows = Vec::with_capacity(candidates.len());
    for (omega_z, rc) in candidates {
        let m = omega_z.bits();
        let b = omega_z.dim();
        if !(*rc > 0.0 && *rc <= 1.0) {
            return Err(Error::InvalidParameter(format!(
                "{}: code rate {rc} must be in (0, 1]; m = {m} is below ceil(B·R) = {}",
                omega_z.name(),
                (b as f64 * rate).ceil()
            )));
        }
        let implied = rc * m / b as f64;
        if (implied - rate).abs() > 1e-9 * rate.max(1.0) {
            return Err(Error::InvalidParameter(format!(
                "{}: R_c·m/B = {implied} does not match R = {rate}",
                omega_z.name()
            )));
        }
        let opt = optimize(engine, omega_z, rate, opts)?;
        let omega_x = precode(omega_z, opt.theta_opt_deg.to_radians())?;
        let q = OutageQuery::precoded(engine, omega_x, rate, 1.0)?;
        let anchors = compute_anchors(engine, &q)?;
        rows.push(ExpansionRow {
            name: omega_z.name().to_string(),
            m,
            rc: *rc,
            theta_opt_deg: opt.theta_opt_deg,
            gamma_s_opt_db: linear_to_db(opt.gamma_s_opt),
            ergodic_snr_db: anchors.alpha_e.map_or(f64::INFINITY, |a| linear_to_db(a * a)),
            gap_db: opt.gap_to_gaussian_db(),
        });
    }
    Ok(rows)
}

/// `d_{p,min}` of the precoded constellation at each angle (radians).
pub fn product_distance_profile(omega_z: &Constellation, grid: &[f64]) -> Result<Vec<f64>> {
    grid.iter().map(|&a| Ok(precode(omega_z, a)?.min_product_distance())).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constellations::build_named;
    use crate::mutual_info::MiConfig;
    use approx::assert_abs_diff_eq;

    fn engine() -> MiEngine {
        MiEngine::new(MiConfig::default()).unwrap()
    }

    #[test]
    fn floor_values() {
        assert_abs_diff_eq!(gaussian_floor(Field::Real, 2, 0.9), (2f64.powf(3.6) - 1.0) / 2.0, epsilon = 1e-12);
        assert_abs_diff_eq!(gaussian_floor(Field::Complex, 2, 1.8), 2f64.powf(3.6) - 1.0, epsilon = 1e-12);
    }

    #[test]
    fn grid_includes_both_ends() {
        let g = degree_grid(0.0, 90.0, 0.5).unwrap();
        assert_eq!(g.len(), 181);
        assert_eq!(*g.last().unwrap(), 90.0);
        assert!(degree_grid(0.0, 1.0, 0.0).is_err());
    }

    #[test]
    fn unrotated_square_saturates_at_high_rate() {
        let e = engine();
        let x = build_named("r2_4").unwrap();
        assert!(gamma_s_at(&e, &x, 0.9, 0.0).unwrap().is_infinite());
        assert!(gamma_s_at(&e, &x, 0.4, 0.0).unwrap().is_finite());
        assert!(matches!(sweep(&e, &x, 0.9, &[0.0, std::f64::consts::FRAC_PI_2], false), Err(Error::InfeasibleRate(_))));
    }

    #[test]
    fn ties_pick_smallest_angle() {
        let p = SweepProfile {
            param_name: "theta".into(),
            dim: 2,
            rate: 1.0,
            grid: vec![0.0, 0.1, 0.2, 0.3],
            gamma_s: vec![f64::INFINITY, 2.0, 3.0, 2.0 * (1.0 - 1e-9)],
            d_pmin: None,
            gaussian_floor: 1.0,
        };
        assert_eq!(p.argmin(), Some(1));
    }

    #[test]
    fn product_distance_zero_without_rotation() {
        let x = build_named("r2_8").unwrap();
        let d = product_distance_profile(&x, &[0.0, 0.3]).unwrap();
        assert_eq!(d[0], 0.0);
        assert!(d[1] > 0.0);
    }

    #[test]
    fn expansion_rejects_rate_mismatch() {
        let e = engine();
        let x = build_named("r2_4").unwrap();
        assert!(expansion_compare(&e, &[(x.clone(), 0.8)], 0.9, &OptimizeOptions::default()).is_err());
        assert!(expansion_compare(&e, &[(x, 1.2)], 1.2, &OptimizeOptions::default()).is_err());
    }
}
