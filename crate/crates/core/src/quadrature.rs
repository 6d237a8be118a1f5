//! Gauss–Hermite quadrature.
//!
//! The rule integrates `e^(-x^2) f(x)` over the real line. Nodes are found by
//! Newton iteration on the orthonormal Hermite recurrence, which stays stable
//! well beyond the orders used here (a few hundred).

use crate::error::{Error, Result};

const PI_M4: f64 = 0.751_125_544_464_942_5; // pi^(-1/4)
const NEWTON_EPS: f64 = 1e-15;
const MAX_NEWTON: usize = 100;

#[derive(Debug, Clone, PartialEq)]
pub struct GaussHermite {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl GaussHermite {
    pub fn new(order: usize) -> Result<Self> {
        if order == 0 {
            return Err(Error::InvalidParameter("Gauss-Hermite order must be >= 1".into()));
        }
        let n = order;
        let mut x = vec![0.0; n];
        let mut w = vec![0.0; n];
        let m = n.div_ceil(2);
        let mut z = 0.0_f64;
        for i in 0..m {
            z = match i {
                0 => (2.0 * n as f64 + 1.0).sqrt() - 1.855_75 * (2.0 * n as f64 + 1.0).powf(-1.0 / 6.0),
                1 => z - 1.14 * (n as f64).powf(0.426) / z,
                2 => 1.86 * z - 0.86 * x[0],
                3 => 1.91 * z - 0.91 * x[1],
                _ => 2.0 * z - x[i - 2],
            };
            let mut pp = 0.0;
            let mut converged = false;
            for _ in 0..MAX_NEWTON {
                let mut p1 = PI_M4;
                let mut p2 = 0.0;
                for j in 0..n {
                    let p3 = p2;
                    p2 = p1;
                    let jf = j as f64;
                    p1 = z * (2.0 / (jf + 1.0)).sqrt() * p2 - (jf / (jf + 1.0)).sqrt() * p3;
                }
                pp = (2.0 * n as f64).sqrt() * p2;
                let z1 = z;
                z = z1 - p1 / pp;
                if (z - z1).abs() <= NEWTON_EPS * z.abs().max(1.0) {
                    converged = true;
                    break;
                }
            }
            if !converged {
                return Err(Error::Solver(format!("Gauss-Hermite node {i} of order {n} did not converge")));
            }
            x[i] = z;
            x[n - 1 - i] = -z;
            w[i] = 2.0 / (pp * pp);
            w[n - 1 - i] = w[i];
        }
        // ascending order
        x.reverse();
        w.reverse();
        Ok(Self { nodes: x, weights: w })
    }

    pub fn order(&self) -> usize {
        self.nodes.len()
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// `∫ e^(-x^2) f(x) dx`
    pub fn integrate<F: FnMut(f64) -> f64>(&self, mut f: F) -> f64 {
        self.nodes.iter().zip(&self.weights).map(|(&x, &w)| w * f(x)).sum()
    }

    /// `E[f(U)]` for `U ~ N(0, 1/2)`.
    pub fn expect_half_variance<F: FnMut(f64) -> f64>(&self, f: F) -> f64 {
        self.integrate(f) / std::f64::consts::PI.sqrt()
    }
}

/// Tensor-product rule over `dims` dimensions with weights normalized to one,
/// i.e. an expectation rule for `U ~ N(0, I/2)`.
#[derive(Debug, Clone)]
pub struct ProductRule {
    dims: usize,
    /// `points[n * dims + d]`
    points: Vec<f64>,
    weights: Vec<f64>,
}

impl ProductRule {
    pub fn new(order: usize, dims: usize) -> Result<Self> {
        if dims == 0 {
            return Err(Error::InvalidParameter("product rule needs at least one dimension".into()));
        }
        let base = GaussHermite::new(order)?;
        let norm = std::f64::consts::PI.sqrt();
        let total = order
            .checked_pow(dims as u32)
            .ok_or_else(|| Error::InvalidParameter("product rule too large".into()))?;
        let mut points = Vec::with_capacity(total * dims);
        let mut weights = Vec::with_capacity(total);
        let mut idx = vec![0usize; dims];
        for _ in 0..total {
            let mut wt = 1.0;
            for &k in &idx {
                points.push(base.nodes[k]);
                wt *= base.weights[k] / norm;
            }
            weights.push(wt);
            for slot in idx.iter_mut().rev() {
                *slot += 1;
                if *slot < order {
                    break;
                }
                *slot = 0;
            }
        }
        Ok(Self { dims, points, weights })
    }

    /// Trapezoid rule for `u ~ N(0, 1/2)` on `[-half_width, half_width]`.
    pub fn trapezoid_1d(step: f64, half_width: f64) -> Self {
        let n = (half_width / step).ceil() as i64;
        let norm = std::f64::consts::PI.sqrt();
        let points: Vec<f64> = (-n..=n).map(|k| k as f64 * step).collect();
        let weights = points.iter().map(|u| step * (-u * u).exp() / norm).collect();
        Self { dims: 1, points, weights }
    }

    pub fn dims(&self) -> usize {
        self.dims
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn point(&self, n: usize) -> &[f64] {
        &self.points[n * self.dims..(n + 1) * self.dims]
    }

    pub fn weight(&self, n: usize) -> f64 {
        self.weights[n]
    }

    pub fn iter(&self) -> impl Iterator<Item = (&[f64], f64)> {
        self.points.chunks_exact(self.dims).zip(self.weights.iter().copied())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::{E, PI};

    #[test]
    fn low_order_nodes_match_closed_form() {
        let gh = GaussHermite::new(2).unwrap();
        assert_abs_diff_eq!(gh.nodes()[1], 0.5f64.sqrt(), epsilon = 1e-14);
        assert_abs_diff_eq!(gh.weights()[0], PI.sqrt() / 2.0, epsilon = 1e-14);
        let gh = GaussHermite::new(3).unwrap();
        assert_abs_diff_eq!(gh.nodes()[1], 0.0, epsilon = 1e-14);
        assert_abs_diff_eq!(gh.nodes()[2], 1.5f64.sqrt(), epsilon = 1e-14);
        assert_abs_diff_eq!(gh.weights()[1], 2.0 * PI.sqrt() / 3.0, epsilon = 1e-14);
    }

    #[test]
    fn integrates_moments_and_cosine() {
        for order in [16, 32, 64, 100] {
            let gh = GaussHermite::new(order).unwrap();
            assert_abs_diff_eq!(gh.integrate(|_| 1.0), PI.sqrt(), epsilon = 1e-12);
            assert_abs_diff_eq!(gh.integrate(|x| x * x), PI.sqrt() / 2.0, epsilon = 1e-12);
            assert_abs_diff_eq!(gh.integrate(|x| x.powi(4)), 3.0 * PI.sqrt() / 4.0, epsilon = 1e-11);
            assert_abs_diff_eq!(gh.integrate(|x| x.cos()), PI.sqrt() / E.powf(0.25), epsilon = 1e-12);
            assert!(gh.nodes().windows(2).all(|p| p[0] < p[1]));
        }
    }

    #[test]
    fn zero_order_rejected() {
        assert!(GaussHermite::new(0).is_err());
    }

    #[test]
    fn product_rule_is_an_expectation() {
        let rule = ProductRule::new(10, 3).unwrap();
        assert_eq!(rule.len(), 1000);
        let total: f64 = rule.iter().map(|(_, w)| w).sum();
        assert_abs_diff_eq!(total, 1.0, epsilon = 1e-12);
        // E[U_0^2 + U_1^2 + U_2^2] = 3/2 for U ~ N(0, I/2)
        let second: f64 = rule.iter().map(|(u, w)| w * u.iter().map(|v| v * v).sum::<f64>()).sum();
        assert_abs_diff_eq!(second, 1.5, epsilon = 1e-12);
    }
}
