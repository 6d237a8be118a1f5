//! One-dimensional solvers used throughout: bracketing, bisection and
//! Illinois regula falsi for monotone functions, and golden-section search
//! for unimodal minimization.

use crate::error::{Error, Result};

const MAX_BISECTION: usize = 200;
const MAX_DOUBLING: usize = 200;

/// Outcome of expanding a bracket for an increasing function.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Bracket {
    /// `f(lo) < target <= f(hi)`
    Found { lo: f64, hi: f64 },
    /// `f` stayed below `target` up to `limit`.
    NotReached { limit: f64, value: f64 },
}

/// Finds `[lo, hi]` with `f(lo) < target <= f(hi)` for an increasing `f`,
/// starting at `start` and doubling (or halving) until the target is straddled.
pub fn bracket_increasing<F>(mut f: F, target: f64, start: f64, limit: f64) -> Bracket
where
    F: FnMut(f64) -> f64,
{
    assert!(start > 0.0 && limit >= start);
    let mut x = start;
    let v = f(x);
    if v >= target {
        // walk down
        let mut hi = x;
        for _ in 0..MAX_DOUBLING {
            let lo = hi * 0.5;
            if f(lo) < target {
                return Bracket::Found { lo, hi };
            }
            hi = lo;
            if hi < f64::MIN_POSITIVE {
                break;
            }
        }
        return Bracket::Found { lo: 0.0, hi };
    }
    let mut lo = x;
    let mut last = v;
    for _ in 0..MAX_DOUBLING {
        x = (lo * 2.0).min(limit);
        last = f(x);
        if last >= target {
            return Bracket::Found { lo, hi: x };
        }
        if x >= limit {
            break;
        }
        lo = x;
    }
    Bracket::NotReached { limit: x, value: last }
}

/// Bisection for an increasing `f` on a valid bracket. Stops when the bracket
/// width drops below `rel_tol * hi` or `|f(mid) - target| < f_tol`.
pub fn bisect_increasing<F>(mut f: F, target: f64, mut lo: f64, mut hi: f64, rel_tol: f64, f_tol: f64) -> Result<f64>
where
    F: FnMut(f64) -> f64,
{
    if !(lo <= hi) {
        return Err(Error::Solver(format!("invalid bracket [{lo}, {hi}]")));
    }
    for _ in 0..MAX_BISECTION {
        let mid = 0.5 * (lo + hi);
        let v = f(mid);
        if (v - target).abs() < f_tol && (hi - lo) <= 1e3 * rel_tol * hi {
            return Ok(mid);
        }
        if v < target {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= rel_tol * hi {
            return Ok(0.5 * (lo + hi));
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Illinois regula falsi for an increasing `f` on a valid bracket, with a
/// bisection step whenever the bracket fails to shrink below three quarters
/// of its width. Stops when the bracket width drops below `rel_tol * hi`.
pub fn illinois_increasing<F>(mut f: F, target: f64, mut lo: f64, mut hi: f64, rel_tol: f64) -> Result<f64>
where
    F: FnMut(f64) -> f64,
{
    if !(lo <= hi) {
        return Err(Error::Solver(format!("invalid bracket [{lo}, {hi}]")));
    }
    let mut g_lo = f(lo) - target;
    let mut g_hi = f(hi) - target;
    if g_lo >= 0.0 {
        return Ok(lo);
    }
    if !(g_hi >= 0.0) {
        return Err(Error::Solver(format!("[{lo}, {hi}] does not bracket the target")));
    }
    let mut side = 0i8;
    let mut width = hi - lo;
    for _ in 0..MAX_BISECTION {
        if hi - lo <= rel_tol * hi {
            break;
        }
        let falsi = (lo * g_hi - hi * g_lo) / (g_hi - g_lo);
        let shrinking = side == 0 || hi - lo < 0.75 * width;
        let x = if shrinking && falsi > lo && falsi < hi { falsi } else { 0.5 * (lo + hi) };
        width = hi - lo;
        let g = f(x) - target;
        if g.is_nan() {
            return Err(Error::Solver(format!("objective is NaN at {x}")));
        }
        if g == 0.0 {
            return Ok(x);
        }
        if g < 0.0 {
            lo = x;
            g_lo = g;
            if side == -1 {
                g_hi *= 0.5;
            }
            side = -1;
        } else {
            hi = x;
            g_hi = g;
            if side == 1 {
                g_lo *= 0.5;
            }
            side = 1;
        }
    }
    Ok(lo + (hi - lo) * (-g_lo) / (g_hi - g_lo))
}

/// Golden-section minimization on `[a, b]` down to an interval of width `tol`.
/// Returns `(x_min, f(x_min))`.
pub fn golden_section_min<F>(mut f: F, mut a: f64, mut b: f64, tol: f64) -> (f64, f64)
where
    F: FnMut(f64) -> f64,
{
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    while (b - a).abs() > tol {
        if fc <= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
    }
    if fc <= fd {
        (c, fc)
    } else {
        (d, fd)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn brackets_and_bisects_a_cubic() {
        let f = |x: f64| x * x * x;
        let Bracket::Found { lo, hi } = bracket_increasing(f, 27.0, 1e-4, 1e12) else {
            panic!("bracket not found");
        };
        assert!(f(lo) < 27.0 && f(hi) >= 27.0);
        let x = bisect_increasing(f, 27.0, lo, hi, 1e-12, 0.0).unwrap();
        assert_relative_eq!(x, 3.0, max_relative = 1e-10);
    }

    #[test]
    fn illinois_matches_bisection_with_fewer_calls() {
        for target in [0.3, 1.7, 2.9] {
            let mut calls = 0;
            let f = |x: f64| {
                calls += 1;
                3.0 * (1.0 - (-x * x).exp())
            };
            let x = illinois_increasing(f, target, 0.0, 8.0, 1e-12).unwrap();
            let exact = (-(1.0 - target / 3.0).ln()).sqrt();
            assert_relative_eq!(x, exact, max_relative = 1e-10);
            assert!(calls < 40, "{calls} calls");
        }
    }

    #[test]
    fn bracket_walks_down_when_start_is_too_large() {
        let Bracket::Found { lo, hi } = bracket_increasing(|x| x, 1e-3, 1.0, 10.0) else {
            panic!()
        };
        assert!(lo < 1e-3 && hi >= 1e-3);
    }

    #[test]
    fn saturating_function_reports_not_reached() {
        let f = |x: f64| 1.0 - (-x).exp();
        match bracket_increasing(f, 1.5, 1e-4, 1e6) {
            Bracket::NotReached { value, .. } => assert!(value <= 1.0),
            b => panic!("unexpected {b:?}"),
        }
    }

    #[test]
    fn golden_section_finds_parabola_minimum() {
        let (x, fx) = golden_section_min(|x| (x - 0.3).powi(2) + 2.0, -1.0, 2.0, 1e-8);
        assert!((x - 0.3).abs() < 1e-7);
        assert_relative_eq!(fx, 2.0, max_relative = 1e-12);
    }
}
