//! Multidimensional signal sets.
//!
//! A [`Constellation`] holds `M` points of dimension `B`, either real or
//! complex. Complex components are stored as interleaved `(re, im)` pairs so
//! that every point is a flat slice of `real_dims()` reals.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Distinct-point threshold applied after normalization.
pub const DISTINCT_TOL: f64 = 1e-9;
/// Default merge tolerance for projections and symmetry checks.
pub const DEDUP_TOL: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Field {
    Real,
    Complex,
}

impl Field {
    /// Reals per component.
    pub fn width(self) -> usize {
        match self {
            Field::Real => 1,
            Field::Complex => 2,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Field::Real => "real",
            Field::Complex => "complex",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Constellation {
    name: String,
    dim: usize,
    field: Field,
    coords: Vec<f64>,
}

impl Constellation {
    /// Builds a constellation from per-point real coordinates
    /// (`B` reals per point, or `2B` interleaved reals when complex).
    pub fn from_coords(name: impl Into<String>, dim: usize, field: Field, points: &[Vec<f64>]) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidConstellation("dimension must be at least 1".into()));
        }
        if points.len() < 2 {
            return Err(Error::InvalidConstellation(format!("need at least 2 points, got {}", points.len())));
        }
        let width = dim * field.width();
        let mut coords = Vec::with_capacity(points.len() * width);
        for (i, p) in points.iter().enumerate() {
            if p.len() != width {
                return Err(Error::InvalidConstellation(format!(
                    "point {i} has {} reals, expected {width}",
                    p.len()
                )));
            }
            if p.iter().any(|v| !v.is_finite()) {
                return Err(Error::InvalidConstellation(format!("point {i} is not finite")));
            }
            coords.extend_from_slice(p);
        }
        let c = Self { name: name.into(), dim, field, coords };
        c.check_distinct(DISTINCT_TOL * c.rms_scale())?;
        Ok(c)
    }

    fn from_coords_unchecked(name: String, dim: usize, field: Field, coords: Vec<f64>) -> Self {
        Self { name, dim, field, coords }
    }

    fn rms_scale(&self) -> f64 {
        let e = self.energy_per_component();
        if e > 0.0 {
            e.sqrt()
        } else {
            1.0
        }
    }

    fn check_distinct(&self, tol: f64) -> Result<()> {
        let n = self.len();
        for i in 0..n {
            for j in (i + 1)..n {
                if dist2(self.point(i), self.point(j)) <= tol * tol {
                    return Err(Error::InvalidConstellation(format!("points {i} and {j} coincide")));
                }
            }
        }
        Ok(())
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    /// Number of components `B`.
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn field(&self) -> Field {
        self.field
    }

    /// Reals per point.
    pub fn real_dims(&self) -> usize {
        self.dim * self.field.width()
    }

    /// Number of points `M`.
    pub fn len(&self) -> usize {
        self.coords.len() / self.real_dims()
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    /// `log2 M`
    pub fn bits(&self) -> f64 {
        (self.len() as f64).log2()
    }

    pub fn is_power_of_two(&self) -> bool {
        self.len().is_power_of_two()
    }

    pub fn point(&self, i: usize) -> &[f64] {
        let w = self.real_dims();
        &self.coords[i * w..(i + 1) * w]
    }

    pub fn points(&self) -> impl Iterator<Item = &[f64]> {
        self.coords.chunks_exact(self.real_dims())
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    /// Component `b` of point `i` as `(re, im)`; `im` is zero for real sets.
    pub fn component(&self, i: usize, b: usize) -> (f64, f64) {
        let p = self.point(i);
        match self.field {
            Field::Real => (p[b], 0.0),
            Field::Complex => (p[2 * b], p[2 * b + 1]),
        }
    }

    /// Average of `|x_b|^2` over points and components.
    pub fn energy_per_component(&self) -> f64 {
        let total: f64 = self.coords.iter().map(|v| v * v).sum();
        total / (self.len() * self.dim) as f64
    }

    /// Rescales all points by one scalar so that the average energy per
    /// component is 1.
    pub fn normalize_energy(&self) -> Self {
        let e = self.energy_per_component();
        let s = if e > 0.0 { 1.0 / e.sqrt() } else { 1.0 };
        self.scaled(s)
    }

    pub fn scaled(&self, s: f64) -> Self {
        Self::from_coords_unchecked(
            self.name.clone(),
            self.dim,
            self.field,
            self.coords.iter().map(|v| v * s).collect(),
        )
    }

    /// Applies `f` to every point's real coordinates. The caller guarantees the
    /// map is injective (e.g. an orthogonal transform).
    pub(crate) fn map_points<F>(&self, name: String, mut f: F) -> Self
    where
        F: FnMut(&[f64], &mut [f64]),
    {
        let w = self.real_dims();
        let mut coords = vec![0.0; self.coords.len()];
        for (src, dst) in self.coords.chunks_exact(w).zip(coords.chunks_exact_mut(w)) {
            f(src, dst);
        }
        Self::from_coords_unchecked(name, self.dim, self.field, coords)
    }

    /// Splits `Ω = Ψ + jΨ` into the real constellation `Ψ` when the point set
    /// is exactly the set of all `re + j im` with `re, im` drawn independently
    /// from the same real `B`-dimensional set.
    pub fn real_imag_factor(&self) -> Option<Constellation> {
        if self.field != Field::Complex {
            return None;
        }
        let b = self.dim;
        let tol = DEDUP_TOL * self.rms_scale();
        let mut re_set: Vec<Vec<f64>> = Vec::new();
        let mut im_set: Vec<Vec<f64>> = Vec::new();
        for p in self.points() {
            let re: Vec<f64> = (0..b).map(|k| p[2 * k]).collect();
            let im: Vec<f64> = (0..b).map(|k| p[2 * k + 1]).collect();
            if !re_set.iter().any(|q| dist2(q, &re) <= tol * tol) {
                re_set.push(re);
            }
            if !im_set.iter().any(|q| dist2(q, &im) <= tol * tol) {
                im_set.push(im);
            }
        }
        if re_set.len() * im_set.len() != self.len() || re_set.len() != im_set.len() {
            return None;
        }
        let same = re_set.iter().all(|r| im_set.iter().any(|q| dist2(q, r) <= tol * tol));
        if !same || re_set.len() < 2 {
            return None;
        }
        Constellation::from_coords(format!("{}:re", self.name), b, Field::Real, &re_set).ok()
    }

    /// Euclidean minimum distance over distinct pairs.
    pub fn min_distance(&self) -> f64 {
        let n = self.len();
        let mut best = f64::INFINITY;
        for i in 0..n {
            for j in (i + 1)..n {
                best = best.min(dist2(self.point(i), self.point(j)));
            }
        }
        best.sqrt()
    }

    /// Minimum over distinct pairs of `prod_b |x_b - x'_b|`. Zero whenever two
    /// points share a component.
    pub fn min_product_distance(&self) -> f64 {
        let n = self.len();
        let mut best = f64::INFINITY;
        for i in 0..n {
            for j in (i + 1)..n {
                let mut prod = 1.0;
                for b in 0..self.dim {
                    let (ar, ai) = self.component(i, b);
                    let (br, bi) = self.component(j, b);
                    prod *= (ar - br).hypot(ai - bi);
                }
                best = best.min(prod);
            }
        }
        best
    }

    /// Per-component variance of the points (mean removed), averaged over
    /// real and imaginary parts jointly for complex sets.
    pub fn component_variance(&self, b: usize) -> f64 {
        let n = self.len() as f64;
        let (mut sr, mut si, mut s2) = (0.0, 0.0, 0.0);
        for i in 0..self.len() {
            let (re, im) = self.component(i, b);
            sr += re;
            si += im;
            s2 += re * re + im * im;
        }
        s2 / n - (sr / n).powi(2) - (si / n).powi(2)
    }

    /// Projection of the point set onto component `axis` (0-based).
    pub fn project(&self, axis: usize, tol: f64) -> Result<ProjectionSet> {
        if axis >= self.dim {
            return Err(Error::AxisOutOfRange { axis, dim: self.dim });
        }
        let width = self.field.width();
        let mut values: Vec<Vec<f64>> = Vec::new();
        let mut counts: Vec<usize> = Vec::new();
        for p in self.points() {
            let v = &p[axis * width..(axis + 1) * width];
            match values.iter().position(|q| dist2(q, v) <= tol * tol) {
                Some(k) => counts[k] += 1,
                None => {
                    values.push(v.to_vec());
                    counts.push(1);
                }
            }
        }
        let mut order: Vec<usize> = (0..values.len()).collect();
        order.sort_by(|&a, &b| {
            values[a]
                .iter()
                .zip(&values[b])
                .map(|(x, y)| x.total_cmp(y))
                .find(|o| o.is_ne())
                .unwrap_or(std::cmp::Ordering::Equal)
        });
        let total = self.len() as f64;
        Ok(ProjectionSet {
            width,
            values: order.iter().flat_map(|&k| values[k].iter().copied()).collect(),
            weights: order.iter().map(|&k| counts[k] as f64 / total).collect(),
            dedup_tolerance: tol,
        })
    }

    /// Invariance test behind equal axis anchors: a quarter-turn for `B = 2`,
    /// a one-step cyclic shift of the components for `B > 2`.
    pub fn check_symmetry(&self, tol: f64) -> bool {
        if self.dim == 1 {
            return true;
        }
        let width = self.field.width();
        let b = self.dim;
        let mut image = vec![0.0; self.real_dims()];
        self.points().all(|p| {
            if b == 2 {
                for k in 0..width {
                    image[k] = -p[width + k];
                    image[width + k] = p[k];
                }
            } else {
                for comp in 0..b {
                    let src = (comp + b - 1) % b;
                    image[comp * width..(comp + 1) * width].copy_from_slice(&p[src * width..(src + 1) * width]);
                }
            }
            self.points().any(|q| dist2(q, &image) <= tol * tol)
        })
    }
}

/// Distinct coordinate values of a constellation along one axis, with the
/// probability mass each value carries under uniform signalling.
#[derive(Debug, Clone, PartialEq)]
pub struct ProjectionSet {
    width: usize,
    values: Vec<f64>,
    weights: Vec<f64>,
    dedup_tolerance: f64,
}

impl ProjectionSet {
    /// Builds a projection set directly from real values and probabilities.
    pub fn from_real(values: &[f64], weights: &[f64]) -> Result<Self> {
        Self::build(1, values.to_vec(), weights.to_vec())
    }

    pub fn from_real_uniform(values: &[f64]) -> Result<Self> {
        let w = vec![1.0 / values.len() as f64; values.len()];
        Self::from_real(values, &w)
    }

    fn build(width: usize, values: Vec<f64>, weights: Vec<f64>) -> Result<Self> {
        if values.len() != weights.len() * width || weights.is_empty() {
            return Err(Error::InvalidParameter("projection values and weights disagree".into()));
        }
        let total: f64 = weights.iter().sum();
        if (total - 1.0).abs() > 1e-9 || weights.iter().any(|w| *w < 0.0) {
            return Err(Error::InvalidParameter("projection weights must be a distribution".into()));
        }
        Ok(Self { width, values, weights, dedup_tolerance: DEDUP_TOL })
    }

    /// The real marginal `A` when a complex set is `A + jA` with independent,
    /// identically distributed real and imaginary parts.
    pub fn real_imag_factor(&self) -> Option<ProjectionSet> {
        if self.width != 2 {
            return None;
        }
        let tol = self.dedup_tolerance;
        let marginal = |part: usize| {
            let mut vals: Vec<f64> = Vec::new();
            let mut wts: Vec<f64> = Vec::new();
            for (k, w) in self.weights.iter().enumerate() {
                let v = self.values[2 * k + part];
                match vals.iter().position(|q| (q - v).abs() <= tol) {
                    Some(i) => wts[i] += w,
                    None => {
                        vals.push(v);
                        wts.push(*w);
                    }
                }
            }
            (vals, wts)
        };
        let (re, wre) = marginal(0);
        let (im, wim) = marginal(1);
        if re.len() * im.len() != self.len() || re.len() != im.len() {
            return None;
        }
        let find = |vals: &[f64], v: f64| vals.iter().position(|q| (q - v).abs() <= tol);
        for (i, v) in re.iter().enumerate() {
            let j = find(&im, *v)?;
            if (wre[i] - wim[j]).abs() > 1e-12 {
                return None;
            }
        }
        for (k, w) in self.weights.iter().enumerate() {
            let i = find(&re, self.values[2 * k])?;
            let j = find(&im, self.values[2 * k + 1])?;
            if (w - wre[i] * wim[j]).abs() > 1e-12 {
                return None;
            }
        }
        let mut order: Vec<usize> = (0..re.len()).collect();
        order.sort_by(|a, b| re[*a].total_cmp(&re[*b]));
        let values: Vec<f64> = order.iter().map(|&i| re[i]).collect();
        let weights: Vec<f64> = order.iter().map(|&i| wre[i]).collect();
        let mut out = Self::build(1, values, weights).ok()?;
        out.dedup_tolerance = tol;
        Some(out)
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn is_complex(&self) -> bool {
        self.width == 2
    }

    /// Reals per value (1 or 2).
    pub fn width(&self) -> usize {
        self.width
    }

    /// Flat values, `width()` reals each.
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn value(&self, k: usize) -> &[f64] {
        &self.values[k * self.width..(k + 1) * self.width]
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn dedup_tolerance(&self) -> f64 {
        self.dedup_tolerance
    }

    /// Entropy of the projected symbol in bits; the mutual information of the
    /// scalar channel saturates at this value.
    pub fn entropy_bits(&self) -> f64 {
        -self.weights.iter().filter(|w| **w > 0.0).map(|w| w * w.log2()).sum::<f64>()
    }

    pub fn variance(&self) -> f64 {
        let mut mean = vec![0.0; self.width];
        let mut second = 0.0;
        for (k, w) in self.weights.iter().enumerate() {
            for (d, v) in self.value(k).iter().enumerate() {
                mean[d] += w * v;
                second += w * v * v;
            }
        }
        second - mean.iter().map(|m| m * m).sum::<f64>()
    }
}

pub(crate) fn dist2(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// Cartesian product of `b` copies of a one-dimensional constellation.
pub fn cartesian_product(factor: &Constellation, b: usize) -> Result<Constellation> {
    if factor.dim() != 1 {
        return Err(Error::InvalidConstellation(format!(
            "cartesian product needs a 1-D factor, got B={}",
            factor.dim()
        )));
    }
    if b < 2 {
        return Err(Error::InvalidParameter(format!("product dimension must be >= 2, got {b}")));
    }
    let m = factor.len();
    let total = m
        .checked_pow(b as u32)
        .ok_or_else(|| Error::InvalidParameter("product constellation too large".into()))?;
    let mut points = Vec::with_capacity(total);
    let mut idx = vec![0usize; b];
    for _ in 0..total {
        let p: Vec<f64> = idx.iter().flat_map(|&k| factor.point(k).iter().copied()).collect();
        points.push(p);
        for slot in idx.iter_mut().rev() {
            *slot += 1;
            if *slot < m {
                break;
            }
            *slot = 0;
        }
    }
    let name = format!("{}^{}", factor.name(), b);
    Ok(Constellation::from_coords(name, b, factor.field(), &points)?.normalize_energy())
}

/// Names accepted by [`build_named`].
pub const REGISTRY: &[&str] = &[
    "bpsk",
    "pam4",
    "qam4",
    "qam8_star",
    "qam16_grid",
    "cross_qam32",
    "r2_4",
    "r2_8",
    "r2_16",
    "r3_8",
    "r3_16",
    "r3_64",
    "c2_16",
    "c2_64",
    "c2_256",
    "c2_1024",
];

/// Outer radius of the star 8-QAM before normalization; the inner square has
/// corners at `(±1, ±1)`.
pub const STAR8_RADIUS: f64 = 1.0 + 1.732_050_807_568_877_2;

/// Rounded generator triples of the 16-point three-dimensional design; each
/// is completed by its cyclic shifts and the origin is added.
pub const R3_16_GENERATORS: [[f64; 3]; 5] = [
    [0.0, 1.0, -1.0],
    [1.9, 0.12, 0.12],
    [1.3, -0.5, 1.3],
    [0.5, -1.3, -1.3],
    [-1.9, -0.1, -0.1],
];

pub fn build_named(name: &str) -> Result<Constellation> {
    build_named_with(name, &BTreeMap::new())
}

/// Registry lookup with optional parameters.
///
/// Recognized keys: `B` (must equal the registry dimension) and
/// `star_radius` (outer radius of the star 8-QAM for `qam8_star`, `r2_8`
/// and `c2_64`, relative to inner corners at `(±1, ±1)`).
pub fn build_named_with(name: &str, params: &BTreeMap<String, f64>) -> Result<Constellation> {
    for key in params.keys() {
        if key != "B" && key != "star_radius" {
            return Err(Error::InvalidParameter(format!("unknown constellation parameter `{key}`")));
        }
    }
    let star_radius = params.get("star_radius").copied();
    if star_radius.is_some() && !matches!(name, "qam8_star" | "r2_8" | "c2_64") {
        return Err(Error::InvalidParameter(format!("`star_radius` does not apply to `{name}`")));
    }
    let radius = star_radius.unwrap_or(STAR8_RADIUS);
    if !(radius > 0.0) || !radius.is_finite() {
        return Err(Error::InvalidParameter(format!("star radius {radius} is degenerate")));
    }
    let c = match name {
        "bpsk" => real1("bpsk", &[-1.0, 1.0])?,
        "pam4" => real1("pam4", &[-3.0, -1.0, 1.0, 3.0])?,
        "qam4" => complex1("qam4", &grid_qam(&[-1.0, 1.0], |_, _| true))?,
        "qam8_star" => complex1("qam8_star", &star8(radius))?,
        "qam16_grid" => complex1("qam16_grid", &grid_qam(&[-3.0, -1.0, 1.0, 3.0], |_, _| true))?,
        "cross_qam32" => complex1(
            "cross_qam32",
            &grid_qam(&[-5.0, -3.0, -1.0, 1.0, 3.0, 5.0], |a, b| !(a.abs() == 5.0 && b.abs() == 5.0)),
        )?,
        "r2_4" => cartesian_product(&build_named("bpsk")?, 2)?,
        "r2_8" => {
            let pts: Vec<Vec<f64>> = star8(radius).into_iter().map(|(a, b)| vec![a, b]).collect();
            Constellation::from_coords("r2_8", 2, Field::Real, &pts)?.normalize_energy()
        }
        "r2_16" => cartesian_product(&build_named("pam4")?, 2)?,
        "r3_8" => cartesian_product(&build_named("bpsk")?, 3)?,
        "r3_16" => {
            let mut pts: Vec<Vec<f64>> = Vec::with_capacity(16);
            for g in R3_16_GENERATORS {
                for s in 0..3 {
                    pts.push((0..3).map(|k| g[(k + s) % 3]).collect());
                }
            }
            pts.push(vec![0.0; 3]);
            Constellation::from_coords("r3_16", 3, Field::Real, &pts)?.normalize_energy()
        }
        "r3_64" => cartesian_product(&build_named("pam4")?, 3)?,
        "c2_16" => cartesian_product(&build_named("qam4")?, 2)?,
        "c2_64" => cartesian_product(&build_named_with("qam8_star", &star_only(params))?, 2)?,
        "c2_256" => cartesian_product(&build_named("qam16_grid")?, 2)?,
        "c2_1024" => cartesian_product(&build_named("cross_qam32")?, 2)?,
        other => return Err(Error::UnknownConstellation(other.to_string())),
    };
    if let Some(&b) = params.get("B") {
        if b != c.dim() as f64 {
            return Err(Error::InvalidParameter(format!(
                "`{name}` is {}-dimensional but B={b} was requested",
                c.dim()
            )));
        }
    }
    Ok(c.with_name(name))
}

fn star_only(params: &BTreeMap<String, f64>) -> BTreeMap<String, f64> {
    params.iter().filter(|(k, _)| *k == "star_radius").map(|(k, v)| (k.clone(), *v)).collect()
}

fn real1(name: &str, values: &[f64]) -> Result<Constellation> {
    let pts: Vec<Vec<f64>> = values.iter().map(|v| vec![*v]).collect();
    Ok(Constellation::from_coords(name, 1, Field::Real, &pts)?.normalize_energy())
}

fn complex1(name: &str, values: &[(f64, f64)]) -> Result<Constellation> {
    let pts: Vec<Vec<f64>> = values.iter().map(|(a, b)| vec![*a, *b]).collect();
    Ok(Constellation::from_coords(name, 1, Field::Complex, &pts)?.normalize_energy())
}

fn grid_qam(levels: &[f64], keep: impl Fn(f64, f64) -> bool) -> Vec<(f64, f64)> {
    let mut out = Vec::new();
    for &re in levels {
        for &im in levels {
            if keep(re, im) {
                out.push((re, im));
            }
        }
    }
    out
}

fn star8(radius: f64) -> Vec<(f64, f64)> {
    vec![
        (1.0, 1.0),
        (-1.0, 1.0),
        (-1.0, -1.0),
        (1.0, -1.0),
        (radius, 0.0),
        (0.0, radius),
        (-radius, 0.0),
        (0.0, -radius),
    ]
}

/// JSON constellation file: `{ "name", "B", "field", "points", "normalize" }`.
/// Complex components are `[re, im]` pairs.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConstellationFile {
    pub name: String,
    #[serde(rename = "B")]
    pub dim: usize,
    pub field: Field,
    pub points: Vec<Vec<ComponentValue>>,
    #[serde(default = "default_true")]
    pub normalize: bool,
}

fn default_true() -> bool {
    true
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ComponentValue {
    Real(f64),
    Complex([f64; 2]),
}

impl ConstellationFile {
    pub fn into_constellation(self) -> Result<Constellation> {
        let mut pts = Vec::with_capacity(self.points.len());
        for (i, p) in self.points.iter().enumerate() {
            if p.len() != self.dim {
                return Err(Error::InvalidConstellation(format!(
                    "point {i} has {} components, expected B={}",
                    p.len(),
                    self.dim
                )));
            }
            let mut flat = Vec::with_capacity(self.dim * self.field.width());
            for c in p {
                match (self.field, c) {
                    (Field::Real, ComponentValue::Real(v)) => flat.push(*v),
                    (Field::Complex, ComponentValue::Complex([re, im])) => {
                        flat.push(*re);
                        flat.push(*im);
                    }
                    (Field::Complex, ComponentValue::Real(v)) => {
                        flat.push(*v);
                        flat.push(0.0);
                    }
                    (Field::Real, ComponentValue::Complex(_)) => {
                        return Err(Error::InvalidConstellation(format!(
                            "point {i} has a complex component in a real constellation"
                        )))
                    }
                }
            }
            pts.push(flat);
        }
        let c = Constellation::from_coords(self.name, self.dim, self.field, &pts)?;
        Ok(if self.normalize { c.normalize_energy() } else { c })
    }

    pub fn from_constellation(c: &Constellation) -> Self {
        let points = c
            .points()
            .map(|p| match c.field() {
                Field::Real => p.iter().map(|v| ComponentValue::Real(*v)).collect(),
                Field::Complex => p.chunks_exact(2).map(|z| ComponentValue::Complex([z[0], z[1]])).collect(),
            })
            .collect();
        Self { name: c.name().to_string(), dim: c.dim(), field: c.field(), points, normalize: false }
    }
}

pub fn parse_constellation_json(text: &str) -> Result<Constellation> {
    let file: ConstellationFile = serde_json::from_str(text)?;
    file.into_constellation()
}

pub fn load_constellation(path: impl AsRef<Path>) -> Result<Constellation> {
    parse_constellation_json(&std::fs::read_to_string(path)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn registry_entries_build_normalized() {
        for name in REGISTRY {
            let c = build_named(name).unwrap();
            assert_abs_diff_eq!(c.energy_per_component(), 1.0, epsilon = 1e-9);
            assert_eq!(c.name(), *name);
        }
    }

    #[test]
    fn registry_sizes() {
        let sizes = [
            ("bpsk", 1, 2),
            ("pam4", 1, 4),
            ("qam4", 1, 4),
            ("qam8_star", 1, 8),
            ("qam16_grid", 1, 16),
            ("cross_qam32", 1, 32),
            ("r2_4", 2, 4),
            ("r2_8", 2, 8),
            ("r2_16", 2, 16),
            ("r3_8", 3, 8),
            ("r3_16", 3, 16),
            ("r3_64", 3, 64),
            ("c2_16", 2, 16),
            ("c2_64", 2, 64),
            ("c2_256", 2, 256),
            ("c2_1024", 2, 1024),
        ];
        for (name, b, m) in sizes {
            let c = build_named(name).unwrap();
            assert_eq!((c.dim(), c.len()), (b, m), "{name}");
        }
    }

    #[test]
    fn square_is_bpsk_squared() {
        let c = build_named("r2_4").unwrap();
        assert_eq!(c.len(), 4);
        assert_eq!(c.bits(), 2.0);
        for p in c.points() {
            assert_abs_diff_eq!(p[0].abs(), 1.0, epsilon = 1e-12);
            assert_abs_diff_eq!(p[1].abs(), 1.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn r3_16_contains_the_origin_and_cyclic_triples() {
        let c = build_named("r3_16").unwrap();
        assert_eq!(c.len(), 16);
        assert!(!c.is_power_of_two() || c.len() == 16);
        assert!(c.points().any(|p| p.iter().all(|v| v.abs() < 1e-12)));
        assert!(c.check_symmetry(DEDUP_TOL));
    }

    #[test]
    fn unknown_name_and_bad_params_rejected() {
        assert!(matches!(build_named("r5_7"), Err(Error::UnknownConstellation(_))));
        let mut p = BTreeMap::new();
        p.insert("B".to_string(), 3.0);
        assert!(build_named_with("r2_4", &p).is_err());
        p.clear();
        p.insert("star_radius".to_string(), 2.0);
        assert!(build_named_with("r2_4", &p).is_err());
        assert!(build_named_with("r2_8", &p).is_ok());
        p.clear();
        p.insert("colour".to_string(), 1.0);
        assert!(build_named_with("bpsk", &p).is_err());
    }

    #[test]
    fn cartesian_product_sizes() {
        let bpsk = build_named("bpsk").unwrap();
        let pam4 = build_named("pam4").unwrap();
        assert_eq!(cartesian_product(&bpsk, 2).unwrap().len(), 4);
        let cube = cartesian_product(&bpsk, 3).unwrap();
        assert_eq!(cube.len(), 8);
        for p in cube.points() {
            assert!(p.iter().all(|v| (v.abs() - 1.0).abs() < 1e-12));
        }
        assert_eq!(cartesian_product(&pam4, 3).unwrap().len(), 64);
        let square = cartesian_product(&bpsk, 2).unwrap();
        assert!(cartesian_product(&square, 2).is_err());
        assert!(cartesian_product(&bpsk, 1).is_err());
    }

    #[test]
    fn duplicate_points_rejected() {
        let pts = vec![vec![1.0, 0.0], vec![1.0, 0.0], vec![0.0, 1.0]];
        assert!(Constellation::from_coords("dup", 2, Field::Real, &pts).is_err());
        assert!(Constellation::from_coords("one", 2, Field::Real, &pts[..1]).is_err());
        assert!(Constellation::from_coords("zero", 0, Field::Real, &pts).is_err());
    }

    #[test]
    fn projection_axis_out_of_range() {
        let c = build_named("r2_4").unwrap();
        assert!(matches!(c.project(2, DEDUP_TOL), Err(Error::AxisOutOfRange { .. })));
        let sp = c.project(0, DEDUP_TOL).unwrap();
        assert_eq!(sp.len(), 2);
        assert_abs_diff_eq!(sp.entropy_bits(), 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(sp.variance(), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn symmetry_of_square_and_rectangle() {
        assert!(build_named("r2_4").unwrap().check_symmetry(DEDUP_TOL));
        assert!(build_named("r2_8").unwrap().check_symmetry(DEDUP_TOL));
        assert!(build_named("r2_16").unwrap().check_symmetry(DEDUP_TOL));
        assert!(build_named("c2_16").unwrap().check_symmetry(DEDUP_TOL));
        // 2 x 4 rectangular grid: the quarter-turn image has 4 x 2 shape
        let mut pts = Vec::new();
        for a in [-1.0, 1.0] {
            for b in [-3.0, -1.0, 1.0, 3.0] {
                pts.push(vec![a, b]);
            }
        }
        let rect = Constellation::from_coords("rect", 2, Field::Real, &pts).unwrap().normalize_energy();
        assert!(!rect.check_symmetry(DEDUP_TOL));
    }

    #[test]
    fn distances() {
        let bpsk = build_named("bpsk").unwrap();
        assert_abs_diff_eq!(bpsk.min_distance(), 2.0, epsilon = 1e-12);
        let sq = build_named("r2_4").unwrap();
        assert_abs_diff_eq!(sq.min_product_distance(), 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(sq.min_distance(), 2.0, epsilon = 1e-12);
    }

    #[test]
    fn real_imag_split_detects_products_of_qam4() {
        let c = build_named("c2_16").unwrap();
        let psi = c.real_imag_factor().expect("4-QAM x 4-QAM splits");
        assert_eq!(psi.len(), 4);
        assert_eq!(psi.dim(), 2);
        assert!(build_named("c2_64").unwrap().real_imag_factor().is_none());
        assert!(build_named("c2_1024").unwrap().real_imag_factor().is_none());
        assert_eq!(build_named("c2_256").unwrap().real_imag_factor().unwrap().len(), 16);
    }

    #[test]
    fn json_file_round_trip() {
        let text = r#"{ "name": "tiny", "B": 2, "field": "complex",
                         "points": [[[1, 0], [0, 1]], [[-1, 0], [0, -1]]], "normalize": true }"#;
        let c = parse_constellation_json(text).unwrap();
        assert_eq!(c.field(), Field::Complex);
        assert_abs_diff_eq!(c.energy_per_component(), 1.0, epsilon = 1e-12);
        let back = ConstellationFile::from_constellation(&c).into_constellation().unwrap();
        assert_eq!(back, c);
        assert!(parse_constellation_json(r#"{"name":"x","B":1,"field":"real","points":[[1],[1]]}"#).is_err());
        assert!(parse_constellation_json(r#"{"name":"x","B":1,"field":"real","points":[[1],[-1]],"extra":1}"#).is_err());
    }
}
