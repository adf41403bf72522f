//! Young functions and Luxemburg norms of grid functions.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gridfn::{parse_ext, GridFunction};

/// Relative bracket width at which bisection stops.
pub const BISECTION_REL_WIDTH: f64 = 1e-10;
pub const BISECTION_MAX_ITER: usize = 200;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum YoungFunction {
    /// `tau^p`, `p >= 1`.
    Power { p: f64 },
    /// 0 on `[0, 1]`, `+inf` beyond; the norm is the max norm.
    IndicatorUnit,
    /// `tau^p` on `[0, 1]`, `p tau + 1 - p` beyond.
    OnePlus { p: f64 },
    /// 0 on `[0, 1]`, `tau - 1` beyond.
    OneInf,
    /// `exp(tau - tau^-2)`, 0 at 0.
    ExpMinusInvSq,
    /// Piecewise-linear through `points` (first point `(0, 0)`), extended with
    /// the last slope, and `+inf` beyond `cutoff` when given.
    Custom {
        points: Vec<(f64, f64)>,
        #[serde(default)]
        cutoff: Option<f64>,
    },
}

impl YoungFunction {
    /// Parse JSON; a custom kind may give `"path"` to a `(tau, phi)` CSV instead of `"points"`.
    pub fn from_json(s: &str) -> Result<Self> {
        let mut v: serde_json::Value = serde_json::from_str(s)?;
        if v.get("kind").and_then(|k| k.as_str()) == Some("custom") && v.get("points").is_none() {
            let path = v
                .get("path")
                .and_then(|p| p.as_str())
                .ok_or_else(|| Error::InvalidYoung("custom needs points or path".into()))?
                .to_string();
            let pts = read_table(path)?;
            v["points"] = serde_json::to_value(pts)?;
        }
        let phi: YoungFunction = serde_json::from_value(v)?;
        phi.validate()?;
        Ok(phi)
    }

    pub fn custom_from_csv(path: impl AsRef<Path>, cutoff: Option<f64>) -> Result<Self> {
        let phi = YoungFunction::Custom { points: read_table(path)?, cutoff };
        phi.validate()?;
        Ok(phi)
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            YoungFunction::Power { p } | YoungFunction::OnePlus { p } => {
                if !(*p >= 1.0 && p.is_finite()) {
                    return Err(Error::InvalidYoung(format!("exponent {p} must be finite and >= 1")));
                }
            }
            YoungFunction::Custom { points, cutoff } => validate_table(points, *cutoff)?,
            _ => {}
        }
        self.check_sampled()
    }

    /// Sampled checks: `phi(0) = 0`, nondecreasing, convex on the finite part,
    /// and for invertible kinds `phi(psi(s)) = s`.
    fn check_sampled(&self) -> Result<()> {
        if self.eval(0.0) != 0.0 {
            return Err(Error::InvalidYoung("phi(0) != 0".into()));
        }
        let taus: Vec<f64> = (0..=400).map(|k| k as f64 * 0.0125).collect();
        let vals: Vec<f64> = taus.iter().map(|&t| self.eval(t)).collect();
        for w in vals.windows(2) {
            if w[1] < w[0] {
                return Err(Error::InvalidYoung("not nondecreasing".into()));
            }
        }
        for w in vals.windows(3) {
            if w.iter().all(|v| v.is_finite()) && w[0] + w[2] - 2.0 * w[1] < -1e-9 * (1.0 + w[1].abs()) {
                return Err(Error::InvalidYoung("not convex".into()));
            }
        }
        if vals.iter().all(|&v| v == 0.0) && self.eval(f64::INFINITY) == 0.0 {
            return Err(Error::InvalidYoung("constant".into()));
        }
        if self.invertible() {
            for s in [1e-6, 0.01, 0.3, 1.0, 2.5, 17.0, 1e4] {
                let back = self.eval(self.inverse(s)?);
                if (back - s).abs() > 1e-10 * s.max(1.0) {
                    return Err(Error::InvalidYoung(format!("inverse mismatch at {s}")));
                }
            }
        }
        Ok(())
    }

    pub fn eval(&self, tau: f64) -> f64 {
        if tau <= 0.0 {
            return 0.0;
        }
        if tau == f64::INFINITY {
            return f64::INFINITY;
        }
        match self {
            YoungFunction::Power { p } => tau.powf(*p),
            YoungFunction::IndicatorUnit => {
                if tau <= 1.0 {
                    0.0
                } else {
                    f64::INFINITY
                }
            }
            YoungFunction::OnePlus { p } => {
                if tau <= 1.0 {
                    tau.powf(*p)
                } else {
                    p * tau + 1.0 - p
                }
            }
            YoungFunction::OneInf => (tau - 1.0).max(0.0),
            YoungFunction::ExpMinusInvSq => (tau - tau.powi(-2)).exp(),
            YoungFunction::Custom { points, cutoff } => {
                if cutoff.is_some_and(|c| tau > c) {
                    return f64::INFINITY;
                }
                eval_table(points, tau)
            }
        }
    }

    /// Whether `phi` is a continuous bijection of `[0, inf]`.
    pub fn invertible(&self) -> bool {
        match self {
            YoungFunction::Power { .. } | YoungFunction::OnePlus { .. } | YoungFunction::ExpMinusInvSq => true,
            YoungFunction::IndicatorUnit | YoungFunction::OneInf => false,
            YoungFunction::Custom { points, cutoff } => {
                cutoff.is_none() && points.windows(2).all(|w| w[1].1 > w[0].1)
            }
        }
    }

    /// The inverse `psi` of an invertible `phi`.
    pub fn inverse(&self, s: f64) -> Result<f64> {
        if !self.invertible() {
            return Err(Error::NotInvertible);
        }
        if s <= 0.0 {
            return Ok(0.0);
        }
        if s == f64::INFINITY {
            return Ok(f64::INFINITY);
        }
        Ok(match self {
            YoungFunction::Power { p } => s.powf(1.0 / p),
            YoungFunction::OnePlus { p } => {
                if s <= 1.0 {
                    s.powf(1.0 / p)
                } else {
                    (s - 1.0 + p) / p
                }
            }
            YoungFunction::ExpMinusInvSq => {
                // tau - tau^-2 = ln s, increasing in tau
                let target = s.ln();
                let g = |t: f64| t - t.powi(-2) - target;
                let mut lo = 1e-3;
                while g(lo) > 0.0 {
                    lo *= 0.5;
                }
                let mut hi = 1.0;
                while g(hi) < 0.0 {
                    hi *= 2.0;
                }
                for _ in 0..200 {
                    let mid = 0.5 * (lo + hi);
                    if g(mid) < 0.0 {
                        lo = mid;
                    } else {
                        hi = mid;
                    }
                    if hi - lo <= 1e-15 * hi {
                        break;
                    }
                }
                0.5 * (lo + hi)
            }
            YoungFunction::Custom { points, .. } => invert_table(points, s),
            _ => unreachable!("checked invertible"),
        })
    }
}

fn read_table(path: impl AsRef<Path>) -> Result<Vec<(f64, f64)>> {
    let mut rd = csv::ReaderBuilder::new().has_headers(false).trim(csv::Trim::All).from_path(path)?;
    let mut out = Vec::new();
    for rec in rd.records() {
        let rec = rec?;
        if rec.len() < 2 {
            return Err(Error::InvalidYoung("expected tau,phi rows".into()));
        }
        let (Ok(t), Ok(v)) = (parse_ext(&rec[0]), parse_ext(&rec[1])) else {
            // header line
            if out.is_empty() {
                continue;
            }
            return Err(Error::InvalidYoung(format!("bad row {:?}", rec)));
        };
        out.push((t, v));
    }
    Ok(out)
}

fn validate_table(points: &[(f64, f64)], cutoff: Option<f64>) -> Result<()> {
    if points.len() < 2 {
        return Err(Error::InvalidYoung("need at least two points".into()));
    }
    if points[0] != (0.0, 0.0) {
        return Err(Error::InvalidYoung("first point must be (0, 0)".into()));
    }
    if points.iter().any(|(t, v)| !t.is_finite() || !v.is_finite()) {
        return Err(Error::InvalidYoung("table entries must be finite; use the cutoff for +inf".into()));
    }
    let mut last_slope = f64::NEG_INFINITY;
    for w in points.windows(2) {
        let dt = w[1].0 - w[0].0;
        if dt <= 0.0 {
            return Err(Error::InvalidYoung("abscissae must increase".into()));
        }
        let slope = (w[1].1 - w[0].1) / dt;
        if slope < 0.0 {
            return Err(Error::InvalidYoung("not nondecreasing".into()));
        }
        if slope < last_slope - 1e-12 * last_slope.abs().max(1.0) {
            return Err(Error::InvalidYoung("not convex".into()));
        }
        last_slope = slope;
    }
    if last_slope == 0.0 && cutoff.is_none() {
        return Err(Error::InvalidYoung("constant".into()));
    }
    if let Some(c) = cutoff {
        if !(c > 0.0) {
            return Err(Error::InvalidYoung("cutoff must be positive".into()));
        }
    }
    Ok(())
}

fn eval_table(points: &[(f64, f64)], tau: f64) -> f64 {
    let k = points.partition_point(|p| p.0 < tau);
    if k == 0 {
        return points[0].1;
    }
    let (a, b) = if k < points.len() { (points[k - 1], points[k]) } else { (points[k - 2], points[k - 1]) };
    a.1 + (b.1 - a.1) * (tau - a.0) / (b.0 - a.0)
}

fn invert_table(points: &[(f64, f64)], s: f64) -> f64 {
    let k = points.partition_point(|p| p.1 < s);
    let (a, b) = if k == 0 {
        (points[0], points[1])
    } else if k < points.len() {
        (points[k - 1], points[k])
    } else {
        (points[points.len() - 2], points[points.len() - 1])
    };
    a.0 + (b.0 - a.0) * (s - a.1) / (b.1 - a.1)
}

/// `sum phi(|v| / r) * cell`, `+inf` as soon as one term is infinite.
fn modular(values: &[f64], cell: f64, phi: &YoungFunction, r: f64) -> f64 {
    let mut s = 0.0;
    for &v in values {
        let t = phi.eval(v.abs() / r);
        if t == f64::INFINITY {
            return f64::INFINITY;
        }
        s += t;
    }
    s * cell
}

/// `sum phi(|h|/r)` over the grid, times the cell volume.
pub fn modular_integral(h: &GridFunction, phi: &YoungFunction, r: f64) -> f64 {
    modular(h.values(), h.domain().cell_volume(), phi, r)
}

/// Luxemburg norm `inf{r > 0 : sum phi(|h|/r) cell <= 1}`; `Power` uses the
/// closed form.
pub fn luxemburg_norm(h: &GridFunction, phi: &YoungFunction) -> f64 {
    if let YoungFunction::Power { p } = phi {
        return power_norm(h.values(), h.domain().cell_volume(), *p);
    }
    luxemburg_bisection(h, phi)
}

fn power_norm(values: &[f64], cell: f64, p: f64) -> f64 {
    let top = values.iter().fold(0.0f64, |a, v| a.max(v.abs()));
    if top == 0.0 {
        return 0.0;
    }
    if top == f64::INFINITY {
        return f64::INFINITY;
    }
    // scale by the max to avoid overflow for large exponents
    let s: f64 = values.iter().map(|v| (v.abs() / top).powf(p)).sum::<f64>() * cell;
    top * s.powf(1.0 / p)
}

/// Luxemburg norm by bracketing and bisection, for any Young function.
pub fn luxemburg_bisection(h: &GridFunction, phi: &YoungFunction) -> f64 {
    let values = h.values();
    let cell = h.domain().cell_volume();
    let top = values.iter().fold(0.0f64, |a, v| a.max(v.abs()));
    if top == 0.0 {
        return 0.0;
    }
    if top == f64::INFINITY {
        return f64::INFINITY;
    }
    let feasible = |r: f64| modular(values, cell, phi, r) <= 1.0;
    let mut hi = top;
    let mut grow = 0;
    while !feasible(hi) {
        hi *= 2.0;
        grow += 1;
        if grow > 2000 || hi == f64::INFINITY {
            return f64::INFINITY;
        }
    }
    let mut lo = hi * 0.5;
    let mut shrink = 0;
    while feasible(lo) {
        hi = lo;
        lo *= 0.5;
        shrink += 1;
        if shrink > 2000 || lo == 0.0 {
            return 0.0;
        }
    }
    for _ in 0..BISECTION_MAX_ITER {
        if hi - lo <= BISECTION_REL_WIDTH * hi {
            break;
        }
        let mid = 0.5 * (lo + hi);
        if feasible(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    hi
}

/// `1 / psi(1 / measure)`: the norm of a characteristic function of a set of
/// the given measure, for invertible `phi`.
pub fn characteristic_norm(phi: &YoungFunction, measure: f64) -> Result<f64> {
    if measure <= 0.0 {
        return Ok(0.0);
    }
    Ok(crate::gridfn::recip(phi.inverse(1.0 / measure)?))
}

/// Node-wise `phi(h)` for `h >= 0`.
pub fn young_compose(phi: &YoungFunction, h: &GridFunction) -> Result<GridFunction> {
    if let Some((index, &value)) = h.values().iter().enumerate().find(|(_, v)| **v < 0.0) {
        return Err(Error::NegativeValue { index, value });
    }
    Ok(h.map(|v| phi.eval(v)))
}

/// Whether `max phi(h) = phi(max h)` holds on the nodes.
pub fn max_commutes(phi: &YoungFunction, h: &GridFunction) -> Result<bool> {
    let c = young_compose(phi, h)?;
    Ok(c.max() == phi.eval(h.max()))
}

#[derive(Debug, Clone, PartialEq)]
pub struct AxiomsReport {
    pub norm_h: f64,
    pub norm_k: f64,
    /// `|h| <= |k|` implies `||h|| <= ||k||`; `None` when `|h| <= |k|` fails.
    pub monotone: Option<bool>,
    /// `sum phi(|h| / ||h||) <= 1 + 1e-8`; `None` when the norm is 0 or infinite.
    pub unit_integral: Option<bool>,
    pub unit_integral_value: Option<f64>,
    /// `||c h|| = |c| ||h||` within `1e-8` relative.
    pub homogeneous: bool,
}

impl AxiomsReport {
    pub fn all_hold(&self) -> bool {
        self.monotone.unwrap_or(true) && self.unit_integral.unwrap_or(true) && self.homogeneous
    }
}

pub fn norm_axioms_check(h: &GridFunction, k: &GridFunction, phi: &YoungFunction, c: f64) -> Result<AxiomsReport> {
    h.same_domain(k)?;
    let norm_h = luxemburg_norm(h, phi);
    let norm_k = luxemburg_norm(k, phi);
    let dominated = h.values().iter().zip(k.values()).all(|(a, b)| a.abs() <= b.abs());
    let monotone = dominated.then_some(norm_h <= norm_k * (1.0 + 1e-10));
    let (unit_integral, unit_integral_value) = if norm_h > 0.0 && norm_h.is_finite() {
        let v = modular_integral(h, phi, norm_h);
        (Some(v <= 1.0 + 1e-8), Some(v))
    } else {
        (None, None)
    };
    let scaled = h.map(|v| c * v);
    let ns = luxemburg_norm(&scaled, phi);
    let want = c.abs() * norm_h;
    let homogeneous = if want.is_infinite() || ns.is_infinite() {
        want == ns || c == 0.0
    } else {
        (ns - want).abs() <= 1e-8 * want.max(f64::MIN_POSITIVE) || (ns == 0.0 && want == 0.0)
    };
    Ok(AxiomsReport { norm_h, norm_k, monotone, unit_integral, unit_integral_value, homogeneous })
}
