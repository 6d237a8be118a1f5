//! Real orthogonal precoders: plane rotations for `B = 2` and orthogonal
//! circulants `P = F Λ F^H` for any `B`, parameterized by eigenphases.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::constellations::Constellation;
use crate::error::{Error, Result};

pub const ORTHO_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PrecoderParams {
    Rotation2 {
        theta: f64,
    },
    Circulant {
        phases: Vec<f64>,
        lambda0_sign: i8,
        lambda_half_sign: Option<i8>,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct Precoder {
    dim: usize,
    /// row-major `dim x dim`
    matrix: Vec<f64>,
    params: PrecoderParams,
}

impl Precoder {
    pub fn identity(dim: usize) -> Self {
        let mut matrix = vec![0.0; dim * dim];
        for i in 0..dim {
            matrix[i * dim + i] = 1.0;
        }
        let params = if dim == 2 {
            PrecoderParams::Rotation2 { theta: 0.0 }
        } else {
            PrecoderParams::Circulant {
                phases: vec![0.0; (dim.saturating_sub(1)) / 2],
                lambda0_sign: 1,
                lambda_half_sign: (dim % 2 == 0).then_some(1),
            }
        };
        Self { dim, matrix, params }
    }

    /// Plane rotation with first row `(cos θ, -sin θ)`.
    pub fn rotation2(theta: f64) -> Self {
        let theta = theta.rem_euclid(2.0 * PI);
        let (s, c) = theta.sin_cos();
        Self { dim: 2, matrix: vec![c, -s, s, c], params: PrecoderParams::Rotation2 { theta } }
    }

    /// Rotation by `theta1` about the bisector `(1,1,1)/√3`: the circulant with
    /// eigenvalues `(λ0, e^{jθ1}, e^{-jθ1})`.
    pub fn rotation3(theta1: f64, lambda0_sign: i8) -> Result<Self> {
        Self::circulant_from_phases(3, &[theta1], lambda0_sign, None)
    }

    /// Real orthogonal circulant with eigenvalues `λ_0 = ±1`,
    /// `λ_n = e^{j phases[n-1]}` for `1 <= n <= ⌊(B-1)/2⌋`, conjugate symmetry
    /// `λ_{B-n} = λ_n^*`, and `λ_{B/2} = ±1` when `B` is even.
    pub fn circulant_from_phases(dim: usize, phases: &[f64], lambda0_sign: i8, lambda_half_sign: Option<i8>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidParameter("precoder dimension must be >= 1".into()));
        }
        let free = (dim - 1) / 2;
        if phases.len() != free {
            return Err(Error::InvalidParameter(format!(
                "B={dim} circulant takes {free} phases, got {}",
                phases.len()
            )));
        }
        check_sign("lambda0_sign", lambda0_sign)?;
        match (dim % 2 == 0, lambda_half_sign) {
            (true, None) => {
                return Err(Error::InvalidParameter(format!("B={dim} is even: lambda_half_sign is required")))
            }
            (false, Some(_)) => {
                return Err(Error::InvalidParameter(format!("B={dim} is odd: lambda_half_sign does not apply")))
            }
            (true, Some(s)) => check_sign("lambda_half_sign", s)?,
            _ => {}
        }
        let mut lambdas = vec![Complex64::new(0.0, 0.0); dim];
        lambdas[0] = Complex64::new(lambda0_sign as f64, 0.0);
        for (n, &ph) in phases.iter().enumerate() {
            let l = Complex64::from_polar(1.0, ph);
            lambdas[n + 1] = l;
            lambdas[dim - n - 1] = l.conj();
        }
        if let Some(s) = lambda_half_sign {
            lambdas[dim / 2] = Complex64::new(s as f64, 0.0);
        }
        // p_l = (1/B) Σ_m λ_m exp(j 2π m l / B)
        let mut row = Vec::with_capacity(dim);
        for l in 0..dim {
            let mut acc = Complex64::new(0.0, 0.0);
            for (m, lam) in lambdas.iter().enumerate() {
                acc += lam * Complex64::from_polar(1.0, 2.0 * PI * (m * l % dim) as f64 / dim as f64);
            }
            acc /= dim as f64;
            if acc.im.abs() > ORTHO_TOL {
                return Err(Error::Solver(format!("circulant entry {l} has imaginary part {}", acc.im)));
            }
            row.push(acc.re);
        }
        let mut matrix = vec![0.0; dim * dim];
        for r in 0..dim {
            for c in 0..dim {
                matrix[r * dim + c] = row[(c + dim - r) % dim];
            }
        }
        Ok(Self {
            dim,
            matrix,
            params: PrecoderParams::Circulant { phases: phases.to_vec(), lambda0_sign, lambda_half_sign },
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn matrix(&self) -> &[f64] {
        &self.matrix
    }

    pub fn entry(&self, r: usize, c: usize) -> f64 {
        self.matrix[r * self.dim + c]
    }

    pub fn params(&self) -> &PrecoderParams {
        &self.params
    }

    pub fn first_row(&self) -> &[f64] {
        &self.matrix[..self.dim]
    }

    /// `max |P Pᵀ - I|`
    pub fn orthogonality_error(&self) -> f64 {
        let b = self.dim;
        let mut worst: f64 = 0.0;
        for i in 0..b {
            for j in 0..b {
                let dot: f64 = (0..b).map(|k| self.entry(i, k) * self.entry(j, k)).sum();
                let target = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((dot - target).abs());
            }
        }
        worst
    }

    /// `x = P z`; complex points are precoded as `P Re{z} + j P Im{z}`.
    pub fn apply(&self, c: &Constellation) -> Result<Constellation> {
        if c.dim() != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, actual: c.dim() });
        }
        let b = self.dim;
        let w = c.field().width();
        let m = &self.matrix;
        Ok(c.map_points(c.name().to_string(), |src, dst| {
            for part in 0..w {
                for r in 0..b {
                    let mut acc = 0.0;
                    for k in 0..b {
                        acc += m[r * b + k] * src[k * w + part];
                    }
                    dst[r * w + part] = acc;
                }
            }
        }))
    }
}

fn check_sign(what: &str, s: i8) -> Result<()> {
    if s == 1 || s == -1 {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("{what} must be +1 or -1, got {s}")))
    }
}

/// Eigenvalues of a circulant from its first row:
/// `λ_n = Σ_l p_l exp(-j 2π n l / B)`.
pub fn circulant_eigenvalues(first_row: &[f64]) -> Vec<Complex64> {
    let b = first_row.len();
    (0..b)
        .map(|n| {
            first_row
                .iter()
                .enumerate()
                .map(|(l, p)| p * Complex64::from_polar(1.0, -2.0 * PI * (n * l % b) as f64 / b as f64))
                .sum()
        })
        .collect()
}

/// Closed-form bisector rotation with `k = cos θ1`, `l = sin θ1`.
pub fn bisector_rotation_closed_form(theta1: f64) -> [[f64; 3]; 3] {
    let (l, k) = theta1.sin_cos();
    let r3 = 3f64.sqrt();
    let d = (1.0 + 2.0 * k) / 3.0;
    let a = (1.0 - k - r3 * l) / 3.0;
    let c = (1.0 - k + r3 * l) / 3.0;
    [[d, a, c], [c, d, a], [a, c, d]]
}

/// JSON precoder description:
/// `{ "B", "kind": "rotation2"|"rotation3"|"circulant", "theta_deg" | "phases_deg",
///    "lambda0_sign", "lambda_half_sign" }`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PrecoderSpec {
    #[serde(rename = "B")]
    pub dim: usize,
    pub kind: PrecoderKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub theta_deg: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub phases_deg: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lambda0_sign: Option<i8>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lambda_half_sign: Option<i8>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PrecoderKind {
    Rotation2,
    Rotation3,
    Circulant,
}

impl PrecoderSpec {
    pub fn build(&self) -> Result<Precoder> {
        let need_theta = || {
            self.theta_deg
                .ok_or_else(|| Error::InvalidParameter(format!("{:?} precoder needs theta_deg", self.kind)))
        };
        match self.kind {
            PrecoderKind::Rotation2 => {
                if self.dim != 2 {
                    return Err(Error::InvalidParameter(format!("rotation2 needs B=2, got {}", self.dim)));
                }
                Ok(Precoder::rotation2(need_theta()?.to_radians()))
            }
            PrecoderKind::Rotation3 => {
                if self.dim != 3 {
                    return Err(Error::InvalidParameter(format!("rotation3 needs B=3, got {}", self.dim)));
                }
                Precoder::rotation3(need_theta()?.to_radians(), self.lambda0_sign.unwrap_or(1))
            }
            PrecoderKind::Circulant => {
                let phases: Vec<f64> = match (&self.phases_deg, self.theta_deg) {
                    (Some(p), _) => p.iter().map(|d| d.to_radians()).collect(),
                    (None, Some(t)) => vec![t.to_radians()],
                    (None, None) => Vec::new(),
                };
                Precoder::circulant_from_phases(
                    self.dim,
                    &phases,
                    self.lambda0_sign.unwrap_or(1),
                    self.lambda_half_sign.or((self.dim % 2 == 0).then_some(1)),
                )
            }
        }
    }
}

/// The one-parameter family searched by the optimizer: plane rotations for
/// `B = 2`, bisector rotations (`λ0 = +1`) for `B = 3`.
pub fn single_phase_precoder(dim: usize, angle: f64) -> Result<Precoder> {
    match dim {
        2 => Ok(Precoder::rotation2(angle)),
        3 => Precoder::rotation3(angle, 1),
        b => Err(Error::InvalidParameter(format!(
            "single-angle precoders are defined for B=2 and B=3, got B={b}"
        ))),
    }
}

/// Ω_x for the single-parameter family at `angle` (radians).
pub fn precode(omega_z: &Constellation, angle: f64) -> Result<Constellation> {
    if omega_z.dim() == 1 {
        return Ok(omega_z.clone());
    }
    single_phase_precoder(omega_z.dim(), angle)?.apply(omega_z)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constellations::{build_named, DEDUP_TOL};
    use approx::assert_abs_diff_eq;

    #[test]
    fn rotation2_examples() {
        let p = Precoder::rotation2(0.0);
        assert_eq!(p.matrix(), &[1.0, -0.0, 0.0, 1.0]);
        let q = Precoder::rotation2(PI / 2.0);
        for (a, b) in q.matrix().iter().zip([0.0, -1.0, 1.0, 0.0]) {
            assert_abs_diff_eq!(*a, b, epsilon = 1e-15);
        }
        let r = Precoder::rotation2(27f64.to_radians());
        assert_abs_diff_eq!(r.entry(0, 0), 0.8910, epsilon = 1e-4);
        assert_abs_diff_eq!(r.entry(0, 1), -0.4540, epsilon = 1e-4);
        assert!(r.orthogonality_error() < ORTHO_TOL);
    }

    #[test]
    fn circulant_identity_and_shift() {
        let id = Precoder::circulant_from_phases(3, &[0.0], 1, None).unwrap();
        for r in 0..3 {
            for c in 0..3 {
                assert_abs_diff_eq!(id.entry(r, c), if r == c { 1.0 } else { 0.0 }, epsilon = 1e-12);
            }
        }
        let shift = Precoder::circulant_from_phases(3, &[2.0 * PI / 3.0], 1, None).unwrap();
        let expected = [[0.0, 0.0, 1.0], [1.0, 0.0, 0.0], [0.0, 1.0, 0.0]];
        for r in 0..3 {
            for c in 0..3 {
                assert_abs_diff_eq!(shift.entry(r, c), expected[r][c], epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn circulant_matches_bisector_closed_form() {
        for k in 0..50 {
            let t = k as f64 * 0.13 - 1.0;
            let p = Precoder::rotation3(t, 1).unwrap();
            let q = bisector_rotation_closed_form(t);
            for r in 0..3 {
                for c in 0..3 {
                    assert_abs_diff_eq!(p.entry(r, c), q[r][c], epsilon = 1e-10);
                }
            }
        }
    }

    #[test]
    fn circulant_rows_are_right_shifts_and_eigenphases_round_trip() {
        for b in 2..=7usize {
            let phases: Vec<f64> = (0..(b - 1) / 2).map(|k| 0.37 + 0.91 * k as f64).collect();
            let half = (b % 2 == 0).then_some(-1);
            for s0 in [1, -1] {
                let p = Precoder::circulant_from_phases(b, &phases, s0, half).unwrap();
                assert!(p.orthogonality_error() < ORTHO_TOL, "B={b}");
                for r in 1..b {
                    for c in 0..b {
                        assert_abs_diff_eq!(p.entry(r, c), p.entry(r - 1, (c + b - 1) % b), epsilon = 1e-10);
                    }
                }
                let eig = circulant_eigenvalues(p.first_row());
                assert_abs_diff_eq!(eig[0].re, s0 as f64, epsilon = 1e-9);
                for (n, ph) in phases.iter().enumerate() {
                    let got = eig[n + 1].arg();
                    let diff = (got - ph + PI).rem_euclid(2.0 * PI) - PI;
                    assert!(diff.abs() < 1e-9, "B={b} phase {n}: {got} vs {ph}");
                    assert_abs_diff_eq!(eig[n + 1].norm(), 1.0, epsilon = 1e-9);
                }
            }
        }
    }

    #[test]
    fn circulant_argument_errors() {
        assert!(Precoder::circulant_from_phases(3, &[], 1, None).is_err());
        assert!(Precoder::circulant_from_phases(4, &[0.1], 1, None).is_err());
        assert!(Precoder::circulant_from_phases(3, &[0.1], 1, Some(1)).is_err());
        assert!(Precoder::circulant_from_phases(3, &[0.1], 2, None).is_err());
    }

    #[test]
    fn two_dimensional_circulants_versus_rotations() {
        // With λ0 = +1 and λ1 = ±1 the B=2 circulants are I and the swap
        // [[0,1],[1,0]], which is rotation2(90°) with its second column negated.
        let swap = Precoder::circulant_from_phases(2, &[], 1, Some(-1)).unwrap();
        let rot = Precoder::rotation2(PI / 2.0);
        assert!(swap.orthogonality_error() < ORTHO_TOL && rot.orthogonality_error() < ORTHO_TOL);
        for r in 0..2 {
            assert_abs_diff_eq!(swap.entry(r, 0), rot.entry(r, 0), epsilon = 1e-12);
            assert_abs_diff_eq!(swap.entry(r, 1), -rot.entry(r, 1), epsilon = 1e-12);
        }
        let sq = build_named("r2_8").unwrap();
        let a = swap.apply(&sq).unwrap().project(0, DEDUP_TOL).unwrap();
        let b = rot.apply(&sq).unwrap().project(0, DEDUP_TOL).unwrap();
        assert_eq!(a.len(), b.len());
    }

    #[test]
    fn apply_preserves_geometry() {
        for name in ["r2_4", "r2_8", "c2_16"] {
            let c = build_named(name).unwrap();
            let p = Precoder::rotation2(0.47);
            let x = p.apply(&c).unwrap();
            assert_abs_diff_eq!(x.min_distance(), c.min_distance(), epsilon = 1e-10);
            assert_abs_diff_eq!(x.energy_per_component(), c.energy_per_component(), epsilon = 1e-10);
            for (a, b) in x.points().zip(c.points()) {
                let na: f64 = a.iter().map(|v| v * v).sum();
                let nb: f64 = b.iter().map(|v| v * v).sum();
                assert_abs_diff_eq!(na, nb, epsilon = 1e-10);
            }
        }
        let c3 = build_named("r3_16").unwrap();
        assert!(Precoder::rotation2(0.3).apply(&c3).is_err());
        let id = Precoder::identity(3).apply(&c3).unwrap();
        assert_eq!(id, c3);
    }

    #[test]
    fn spec_json_builds() {
        let s: PrecoderSpec = serde_json::from_str(r#"{"B":2,"kind":"rotation2","theta_deg":27}"#).unwrap();
        let p = s.build().unwrap();
        assert_abs_diff_eq!(p.entry(0, 0), 27f64.to_radians().cos(), epsilon = 1e-15);
        let s: PrecoderSpec = serde_json::from_str(r#"{"B":3,"kind":"rotation3","theta_deg":120}"#).unwrap();
        assert_abs_diff_eq!(s.build().unwrap().entry(0, 2), 1.0, epsilon = 1e-12);
        let s: PrecoderSpec =
            serde_json::from_str(r#"{"B":5,"kind":"circulant","phases_deg":[10,70],"lambda0_sign":-1}"#).unwrap();
        assert!(s.build().unwrap().orthogonality_error() < ORTHO_TOL);
        let s: PrecoderSpec = serde_json::from_str(r#"{"B":3,"kind":"rotation2","theta_deg":1}"#).unwrap();
        assert!(s.build().is_err());
    }
}
