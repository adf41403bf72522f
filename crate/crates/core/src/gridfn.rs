//! Extended-real functions sampled on a uniform box grid `[-L, L]^N`.

use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::par;

/// A point in the ambient space, zero-padded beyond the grid dimension.
pub type Point = [f64; 3];

/// Uniform box grid with an odd number of nodes per axis, so 0 is a node.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridDomain {
    dim: usize,
    half_width: f64,
    points_per_axis: usize,
}

pub fn make_grid(dim: usize, half_width: f64, points_per_axis: usize) -> Result<GridDomain> {
    GridDomain::new(dim, half_width, points_per_axis)
}

impl GridDomain {
    pub fn new(dim: usize, half_width: f64, points_per_axis: usize) -> Result<Self> {
        if !(1..=3).contains(&dim) {
            return Err(Error::UnsupportedDim(dim));
        }
        if !(half_width > 0.0 && half_width.is_finite()) {
            return Err(Error::NonPositiveHalfWidth(half_width));
        }
        if points_per_axis.is_multiple_of(2) {
            return Err(Error::EvenGrid(points_per_axis));
        }
        if points_per_axis < 3 {
            return Err(Error::TooFewPoints(points_per_axis));
        }
        Ok(Self { dim, half_width, points_per_axis })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn half_width(&self) -> f64 {
        self.half_width
    }

    pub fn points_per_axis(&self) -> usize {
        self.points_per_axis
    }

    /// Index of the origin along each axis.
    pub fn mid(&self) -> usize {
        (self.points_per_axis - 1) / 2
    }

    pub fn spacing(&self) -> f64 {
        2.0 * self.half_width / (self.points_per_axis - 1) as f64
    }

    pub fn cell_volume(&self) -> f64 {
        self.spacing().powi(self.dim as i32)
    }

    pub fn len(&self) -> usize {
        self.points_per_axis.pow(self.dim as u32)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Discrete measure of the whole grid: node count times cell volume.
    pub fn volume(&self) -> f64 {
        self.len() as f64 * self.cell_volume()
    }

    /// Coordinate of axis index `i`.
    pub fn coord(&self, i: usize) -> f64 {
        (i as f64 - self.mid() as f64) * self.spacing()
    }

    /// Signed axis offsets from the origin, `-mid..=mid`.
    pub fn offsets(&self, flat: usize) -> [isize; 3] {
        let idx = self.multi_index(flat);
        let m = self.mid() as isize;
        let mut out = [0isize; 3];
        for a in 0..self.dim {
            out[a] = idx[a] as isize - m;
        }
        out
    }

    pub fn multi_index(&self, mut flat: usize) -> [usize; 3] {
        let n = self.points_per_axis;
        let mut idx = [0usize; 3];
        for a in (0..self.dim).rev() {
            idx[a] = flat % n;
            flat /= n;
        }
        idx
    }

    pub fn flat_index(&self, idx: &[usize]) -> usize {
        idx[..self.dim]
            .iter()
            .fold(0, |acc, &i| acc * self.points_per_axis + i)
    }

    /// Flat index of the node with the given signed offsets, if inside the box.
    pub fn flat_from_offsets(&self, off: &[isize]) -> Option<usize> {
        let m = self.mid() as isize;
        let n = self.points_per_axis as isize;
        let mut flat = 0usize;
        for &o in &off[..self.dim] {
            let i = o + m;
            if i < 0 || i >= n {
                return None;
            }
            flat = flat * self.points_per_axis + i as usize;
        }
        Some(flat)
    }

    pub fn origin_index(&self) -> usize {
        self.flat_index(&[self.mid(); 3])
    }

    pub fn point(&self, flat: usize) -> Point {
        let idx = self.multi_index(flat);
        let mut p = [0.0; 3];
        for a in 0..self.dim {
            p[a] = self.coord(idx[a]);
        }
        p
    }

    pub fn norm_at(&self, flat: usize) -> f64 {
        let p = self.point(flat);
        (p[0] * p[0] + p[1] * p[1] + p[2] * p[2]).sqrt()
    }

    pub fn on_boundary(&self, flat: usize) -> bool {
        let idx = self.multi_index(flat);
        let last = self.points_per_axis - 1;
        idx[..self.dim].iter().any(|&i| i == 0 || i == last)
    }

    /// Node nearest to `x`, clamped into the box.
    pub fn nearest_node(&self, x: &[f64]) -> usize {
        let h = self.spacing();
        let m = self.mid() as f64;
        let last = (self.points_per_axis - 1) as f64;
        let mut idx = [0usize; 3];
        for a in 0..self.dim {
            let xa = x.get(a).copied().unwrap_or(0.0);
            idx[a] = (xa / h + m).round().clamp(0.0, last) as usize;
        }
        self.flat_index(&idx)
    }
}

/// A tagged extended real: a finite real, `+inf` or `-inf`. NaN is never admitted.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
pub struct ExtReal(f64);

impl ExtReal {
    pub const PLUS_INF: ExtReal = ExtReal(f64::INFINITY);
    pub const MINUS_INF: ExtReal = ExtReal(f64::NEG_INFINITY);
    pub const ZERO: ExtReal = ExtReal(0.0);

    pub fn new(v: f64) -> Result<Self> {
        if v.is_nan() {
            Err(Error::NotANumber)
        } else {
            Ok(ExtReal(v))
        }
    }

    pub fn value(self) -> f64 {
        self.0
    }

    pub fn is_finite(self) -> bool {
        self.0.is_finite()
    }

    /// Sum with the rule that `+inf + -inf` is rejected.
    pub fn checked_add(self, other: ExtReal) -> Result<ExtReal> {
        ext_add(self.0, other.0).map(ExtReal)
    }

    pub fn min(self, other: ExtReal) -> ExtReal {
        ExtReal(self.0.min(other.0))
    }

    pub fn max(self, other: ExtReal) -> ExtReal {
        ExtReal(self.0.max(other.0))
    }

    /// Reciprocal with `1/0 = +inf` and `1/inf = 0`.
    pub fn recip(self) -> ExtReal {
        ExtReal(recip(self.0))
    }
}

impl fmt::Display for ExtReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", fmt_sig(self.0))
    }
}

impl From<ExtReal> for f64 {
    fn from(v: ExtReal) -> f64 {
        v.0
    }
}

/// Extended-real addition on raw values.
pub fn ext_add(a: f64, b: f64) -> Result<f64> {
    if (a == f64::INFINITY && b == f64::NEG_INFINITY) || (a == f64::NEG_INFINITY && b == f64::INFINITY) {
        Err(Error::UndefinedSum)
    } else {
        Ok(a + b)
    }
}

/// Reciprocal with `1/0 = +inf` (either sign of zero) and `1/inf = 0`.
pub fn recip(v: f64) -> f64 {
    if v == 0.0 {
        f64::INFINITY
    } else {
        1.0 / v
    }
}

/// Format with 12 significant digits; infinities as `inf` / `-inf`.
pub fn fmt_sig(v: f64) -> String {
    if v.is_infinite() {
        return if v > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if v == 0.0 {
        return "0".into();
    }
    let s = format!("{:.11e}", v);
    let parsed: f64 = s.parse().unwrap_or(v);
    let a = parsed.abs();
    if (1e-4..1e12).contains(&a) {
        let digits = 11 - a.log10().floor() as i32;
        let fixed = format!("{:.*}", digits.max(0) as usize, parsed);
        if fixed.contains('.') {
            fixed.trim_end_matches('0').trim_end_matches('.').to_string()
        } else {
            fixed
        }
    } else {
        s
    }
}

/// Parse a number allowing `inf`, `+inf`, `-inf` and the unicode minus sign.
pub fn parse_ext(s: &str) -> Result<f64> {
    let t = s.trim().replace('\u{2212}', "-");
    let v: f64 = match t.to_ascii_lowercase().as_str() {
        "inf" | "+inf" | "infinity" | "+infinity" => f64::INFINITY,
        "-inf" | "-infinity" => f64::NEG_INFINITY,
        other => other
            .parse()
            .map_err(|_| Error::InvalidSpec(format!("not a number: {s:?}")))?,
    };
    if v.is_nan() {
        return Err(Error::NotANumber);
    }
    Ok(v)
}

/// Conceptual extension of a grid function beyond the box.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum OutsideMode {
    PlusInfinity,
    MinusInfinity,
}

/// Node statistics. `node_*` are over grid nodes only; the extended pair
/// also accounts for the declared outside extension.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Stats {
    pub node_min: f64,
    pub node_max: f64,
    pub extended_min: f64,
    pub extended_max: f64,
}

/// Node indices of a level set and whether any of them sits on the box boundary.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LevelSet {
    pub indices: Vec<usize>,
    pub touches_boundary: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GridFunction {
    domain: GridDomain,
    values: Vec<f64>,
    outside: OutsideMode,
}

impl GridFunction {
    pub fn new(domain: GridDomain, values: Vec<f64>, outside: OutsideMode) -> Result<Self> {
        if values.len() != domain.len() {
            return Err(Error::SizeMismatch { expected: domain.len(), got: values.len() });
        }
        if values.iter().any(|v| v.is_nan()) {
            return Err(Error::NotANumber);
        }
        Ok(Self { domain, values, outside })
    }

    pub fn constant(domain: GridDomain, v: f64, outside: OutsideMode) -> Self {
        Self { domain, values: vec![v; domain.len()], outside }
    }

    /// Evaluate `f` at every node. NaN results are mapped to `+inf`.
    pub fn from_fn<F>(domain: GridDomain, outside: OutsideMode, f: F) -> Self
    where
        F: Fn(&Point) -> f64 + Sync + Send,
    {
        let values = par::map_range(domain.len(), |i| {
            let v = f(&domain.point(i));
            if v.is_nan() {
                f64::INFINITY
            } else {
                v
            }
        });
        Self { domain, values, outside }
    }

    pub fn domain(&self) -> &GridDomain {
        &self.domain
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn get(&self, flat: usize) -> ExtReal {
        ExtReal(self.values[flat])
    }

    pub fn outside_mode(&self) -> OutsideMode {
        self.outside
    }

    pub fn with_outside(mut self, outside: OutsideMode) -> Self {
        self.outside = outside;
        self
    }

    pub fn same_domain(&self, other: &GridFunction) -> Result<()> {
        if self.domain == other.domain {
            Ok(())
        } else {
            Err(Error::DomainMismatch)
        }
    }

    pub fn stats(&self) -> Stats {
        let node_min = self.values.iter().copied().fold(f64::INFINITY, f64::min);
        let node_max = self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let (extended_min, extended_max) = match self.outside {
            OutsideMode::PlusInfinity => (node_min, f64::INFINITY),
            OutsideMode::MinusInfinity => (f64::NEG_INFINITY, node_max),
        };
        Stats { node_min, node_max, extended_min, extended_max }
    }

    /// Infimum over nodes.
    pub fn min(&self) -> f64 {
        self.stats().node_min
    }

    /// Supremum over nodes.
    pub fn max(&self) -> f64 {
        self.stats().node_max
    }

    pub fn map<F: Fn(f64) -> f64 + Sync + Send>(&self, f: F) -> Self {
        let values = par::map_slice(&self.values, |&v| {
            let r = f(v);
            if r.is_nan() {
                f64::INFINITY
            } else {
                r
            }
        });
        Self { domain: self.domain, values, outside: self.outside }
    }

    pub fn zip_map<F: Fn(f64, f64) -> f64>(&self, other: &GridFunction, f: F) -> Result<Self> {
        self.same_domain(other)?;
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(&a, &b)| f(a, b))
            .collect();
        GridFunction::new(self.domain, values, self.outside)
    }

    /// Negation; flips the outside extension.
    pub fn neg(&self) -> Self {
        let outside = match self.outside {
            OutsideMode::PlusInfinity => OutsideMode::MinusInfinity,
            OutsideMode::MinusInfinity => OutsideMode::PlusInfinity,
        };
        Self { domain: self.domain, values: self.values.iter().map(|v| -v).collect(), outside }
    }

    /// Node-wise reciprocal with `1/0 = +inf`, `1/inf = 0`.
    pub fn recip(&self) -> Self {
        let outside = match self.outside {
            OutsideMode::PlusInfinity => OutsideMode::MinusInfinity,
            OutsideMode::MinusInfinity => OutsideMode::PlusInfinity,
        };
        Self { domain: self.domain, values: self.values.iter().map(|&v| recip(v)).collect(), outside }
    }

    /// Add a real constant; infinities are preserved.
    pub fn add_const(&self, z: f64) -> Self {
        self.map(|v| if v.is_infinite() { v } else { v + z })
    }

    /// Multiply by `c >= 0`, with `0 * inf = 0`.
    pub fn scale(&self, c: f64) -> Self {
        self.map(|v| if c == 0.0 { 0.0 } else { c * v })
    }

    /// Node-wise sum, rejecting `+inf + -inf`.
    pub fn add(&self, other: &GridFunction) -> Result<Self> {
        self.same_domain(other)?;
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(&a, &b)| ext_add(a, b))
            .collect::<Result<Vec<_>>>()?;
        GridFunction::new(self.domain, values, self.outside)
    }

    pub fn pos_part(&self) -> Self {
        self.map(|v| v.max(0.0))
    }

    pub fn abs(&self) -> Self {
        self.map(f64::abs)
    }

    pub fn min_with(&self, other: &GridFunction) -> Result<Self> {
        self.zip_map(other, f64::min)
    }

    pub fn max_with(&self, other: &GridFunction) -> Result<Self> {
        self.zip_map(other, f64::max)
    }

    /// Restrict to nodes where `keep` holds; other nodes are set to `fill`.
    pub fn masked(&self, fill: f64, keep: impl Fn(&Point) -> bool) -> Self {
        let values = (0..self.values.len())
            .map(|i| if keep(&self.domain.point(i)) { self.values[i] } else { fill })
            .collect();
        Self { domain: self.domain, values, outside: self.outside }
    }

    /// Largest absolute node difference, with equal infinities counted as 0.
    pub fn max_abs_diff(&self, other: &GridFunction) -> f64 {
        self.values
            .iter()
            .zip(&other.values)
            .map(|(&a, &b)| if a == b { 0.0 } else { (a - b).abs() })
            .fold(0.0, f64::max)
    }

    pub fn write_csv<W: std::io::Write>(&self, w: W) -> Result<()> {
        let mut wr = csv::Writer::from_writer(w);
        let dim = self.domain.dim;
        let mut header: Vec<String> = ["x", "y", "z"][..dim].iter().map(|s| s.to_string()).collect();
        header.push("value".into());
        wr.write_record(&header)?;
        for (i, &v) in self.values.iter().enumerate() {
            let p = self.domain.point(i);
            let mut rec: Vec<String> = p[..dim].iter().map(|&c| fmt_sig(c)).collect();
            rec.push(fmt_sig(v));
            wr.write_record(&rec)?;
        }
        wr.flush()?;
        Ok(())
    }
}

/// Riemann sum of a nonnegative grid function; `+inf` if any node is `+inf`.
pub fn integrate(f: &GridFunction) -> Result<ExtReal> {
    let mut sum = 0.0;
    for (index, &value) in f.values.iter().enumerate() {
        if value < 0.0 {
            return Err(Error::NegativeValue { index, value });
        }
        sum += value;
    }
    Ok(ExtReal(if sum.is_infinite() { sum } else { sum * f.domain.cell_volume() }))
}

/// Nodes with value strictly above `xi`.
pub fn level_set_upper(f: &GridFunction, xi: f64) -> LevelSet {
    level_set_by(f, |v| v > xi)
}

/// Nodes with value strictly below `xi`.
pub fn level_set_lower(f: &GridFunction, xi: f64) -> LevelSet {
    level_set_by(f, |v| v < xi)
}

fn level_set_by(f: &GridFunction, pred: impl Fn(f64) -> bool) -> LevelSet {
    let mut indices = Vec::new();
    let mut touches_boundary = false;
    for (i, &v) in f.values.iter().enumerate() {
        if pred(v) {
            indices.push(i);
            touches_boundary |= f.domain.on_boundary(i);
        }
    }
    LevelSet { indices, touches_boundary }
}

/// Catalog of test functions. Every kind is evaluated at `x - shift`, then
/// `offset` is added.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FunctionSpec {
    #[serde(flatten)]
    pub kind: FunctionKind,
    #[serde(default)]
    pub shift: Vec<f64>,
    #[serde(default)]
    pub offset: f64,
}

fn one() -> f64 {
    1.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FunctionKind {
    /// `c |x - center|^alpha`.
    Power {
        #[serde(default = "one")]
        c: f64,
        alpha: f64,
        #[serde(default)]
        center: Vec<f64>,
    },
    /// `c |x|^2`.
    Quadratic {
        #[serde(default = "one")]
        c: f64,
    },
    /// `c |x|`.
    Abs {
        #[serde(default = "one")]
        c: f64,
    },
    /// 0 on the closed ball, `+inf` outside.
    Indicator {
        radius: f64,
        #[serde(default)]
        center: Vec<f64>,
    },
    /// `height` on the closed ball, 0 outside.
    Characteristic {
        radius: f64,
        #[serde(default = "one")]
        height: f64,
        #[serde(default)]
        center: Vec<f64>,
    },
    /// `ln(1 + |x|)`.
    LogPlus,
    Constant {
        value: f64,
    },
    /// `z` at the node nearest `x0`, 0 elsewhere.
    Spike {
        x0: Vec<f64>,
        z: f64,
    },
    /// `max(1 - |x|, 0)`.
    Triangle,
    /// `height` where every coordinate lies in the k-th Cantor iterate of [0, 1], else 0.
    CantorIterate {
        k: u32,
        height: f64,
    },
    /// `height * exp(-|x|^2 / (2 width^2))`.
    Gaussian {
        height: f64,
        width: f64,
        #[serde(default)]
        center: Vec<f64>,
    },
    /// `slope . x`.
    Affine {
        slope: Vec<f64>,
    },
    /// Node-wise sum of the terms.
    Sum {
        terms: Vec<FunctionSpec>,
    },
    /// Samples listed row-major, inline or from a one-value-per-line file.
    Custom {
        #[serde(default)]
        values: Option<Vec<f64>>,
        #[serde(default)]
        path: Option<String>,
    },
}

impl FunctionSpec {
    pub fn new(kind: FunctionKind) -> Self {
        Self { kind, shift: Vec::new(), offset: 0.0 }
    }

    pub fn with_offset(mut self, offset: f64) -> Self {
        self.offset = offset;
        self
    }

    pub fn with_shift(mut self, shift: Vec<f64>) -> Self {
        self.shift = shift;
        self
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let spec: FunctionSpec = serde_json::from_str(s)?;
        spec.validate()?;
        Ok(spec)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("function spec serializes")
    }

    pub fn validate(&self) -> Result<()> {
        match &self.kind {
            FunctionKind::CantorIterate { k, .. } if *k > 8 => {
                Err(Error::InvalidSpec(format!("Cantor depth {k} exceeds 8")))
            }
            FunctionKind::Indicator { radius, .. } | FunctionKind::Characteristic { radius, .. }
                if *radius < 0.0 =>
            {
                Err(Error::InvalidSpec("negative radius".into()))
            }
            FunctionKind::Gaussian { width, .. } if *width <= 0.0 => {
                Err(Error::InvalidSpec("nonpositive width".into()))
            }
            FunctionKind::Custom { values: None, path: None } => {
                Err(Error::InvalidSpec("custom spec needs values or path".into()))
            }
            FunctionKind::Sum { terms } => terms.iter().try_for_each(|t| t.validate()),
            _ => Ok(()),
        }
    }
}

/// Read a one-value-per-line sample file.
pub fn read_samples(path: impl AsRef<Path>) -> Result<Vec<f64>> {
    let text = std::fs::read_to_string(path)?;
    text.lines()
        .map(str::trim)
        .filter(|l| !l.is_empty())
        .map(parse_ext)
        .collect()
}

fn dist(x: &Point, center: &[f64]) -> f64 {
    let mut s = 0.0;
    for a in 0..3 {
        let d = x[a] - center.get(a).copied().unwrap_or(0.0);
        s += d * d;
    }
    s.sqrt()
}

fn in_cantor(mut x: f64, k: u32) -> bool {
    if !(0.0..=1.0).contains(&x) {
        return false;
    }
    for _ in 1..k {
        x *= 3.0;
        if x > 1.0 + 1e-12 && x < 2.0 - 1e-12 {
            return false;
        }
        if x >= 2.0 - 1e-12 {
            x -= 2.0;
        }
        x = x.clamp(0.0, 1.0);
    }
    true
}

/// Sample a catalog function on the grid.
pub fn sample(spec: &FunctionSpec, domain: &GridDomain, outside: OutsideMode) -> Result<GridFunction> {
    spec.validate()?;
    let raw = sample_unshifted_offset(spec, domain)?;
    GridFunction::new(*domain, raw, outside)
}

fn sample_unshifted_offset(spec: &FunctionSpec, domain: &GridDomain) -> Result<Vec<f64>> {
    let dim = domain.dim();
    let mut shift = [0.0; 3];
    for (a, s) in spec.shift.iter().take(dim).enumerate() {
        shift[a] = *s;
    }
    let offset = spec.offset;
    let add_offset = move |v: f64| if v.is_infinite() { v } else { v + offset };
    let base: Vec<f64> = match &spec.kind {
        FunctionKind::Sum { terms } => {
            let mut acc = vec![0.0; domain.len()];
            for t in terms {
                let s = sample_unshifted_offset(t, domain)?;
                for (a, b) in acc.iter_mut().zip(s) {
                    *a = ext_add(*a, b)?;
                }
            }
            if shift.iter().any(|&s| s != 0.0) {
                return Err(Error::InvalidSpec("shift on a sum is not supported".into()));
            }
            return Ok(acc.into_iter().map(add_offset).collect());
        }
        FunctionKind::Custom { values, path } => {
            let vals = match (values, path) {
                (Some(v), _) => v.clone(),
                (None, Some(p)) => read_samples(p)?,
                (None, None) => unreachable!("validated"),
            };
            if vals.len() != domain.len() {
                return Err(Error::SizeMismatch { expected: domain.len(), got: vals.len() });
            }
            if vals.iter().any(|v| v.is_nan()) {
                return Err(Error::NotANumber);
            }
            return Ok(vals.into_iter().map(add_offset).collect());
        }
        FunctionKind::Spike { x0, z } => {
            let mut target = [0.0; 3];
            for a in 0..dim {
                target[a] = x0.get(a).copied().unwrap_or(0.0) + shift[a];
            }
            let at = domain.nearest_node(&target);
            let mut v = vec![0.0; domain.len()];
            v[at] = *z;
            return Ok(v.into_iter().map(add_offset).collect());
        }
        _ => par::map_range(domain.len(), |i| {
            let p = domain.point(i);
            let mut y = [0.0; 3];
            for a in 0..3 {
                y[a] = p[a] - shift[a];
            }
            eval_pointwise(&spec.kind, &y)
        }),
    };
    Ok(base.into_iter().map(add_offset).collect())
}

fn eval_pointwise(kind: &FunctionKind, y: &Point) -> f64 {
    let r = dist(y, &[]);
    match kind {
        FunctionKind::Power { c, alpha, center } => {
            let d = dist(y, center);
            if d == 0.0 && *alpha <= 0.0 {
                if *alpha == 0.0 { *c } else { f64::INFINITY }
            } else {
                c * d.powf(*alpha)
            }
        }
        FunctionKind::Quadratic { c } => c * r * r,
        FunctionKind::Abs { c } => c * r,
        FunctionKind::Indicator { radius, center } => {
            if dist(y, center) <= radius * (1.0 + 1e-12) + 1e-12 {
                0.0
            } else {
                f64::INFINITY
            }
        }
        FunctionKind::Characteristic { radius, height, center } => {
            if dist(y, center) <= radius * (1.0 + 1e-12) + 1e-12 {
                *height
            } else {
                0.0
            }
        }
        FunctionKind::LogPlus => r.ln_1p(),
        FunctionKind::Constant { value } => *value,
        FunctionKind::Triangle => (1.0 - r).max(0.0),
        FunctionKind::CantorIterate { k, height } => {
            // padded coordinates are 0, which lies in every iterate
            if y.iter().all(|&c| in_cantor(c, *k)) {
                *height
            } else {
                0.0
            }
        }
        FunctionKind::Gaussian { height, width, center } => {
            let d = dist(y, center);
            height * (-(d * d) / (2.0 * width * width)).exp()
        }
        FunctionKind::Affine { slope } => slope.iter().zip(y.iter()).map(|(a, b)| a * b).sum(),
        FunctionKind::Spike { .. } | FunctionKind::Sum { .. } | FunctionKind::Custom { .. } => {
            unreachable!("handled before pointwise evaluation")
        }
    }
}
