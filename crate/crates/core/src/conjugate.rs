//! Discrete Legendre-Fenchel conjugates on a dual box grid.

use crate::error::{Error, Result};
use crate::gridfn::{GridDomain, GridFunction, OutsideMode};
use crate::par;

/// Dual grid `[-P, P]^N` on which conjugates are sampled.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DualGrid {
    domain: GridDomain,
}

/// Safety factor applied to the finite-difference slope bound.
pub const SLOPE_MARGIN: f64 = 1.25;

impl DualGrid {
    pub fn new(dim: usize, slope_half_width: f64, points_per_axis: usize) -> Result<Self> {
        if !(slope_half_width > 0.0 && slope_half_width.is_finite()) {
            return Err(Error::DegenerateDual(format!("slope half width {slope_half_width}")));
        }
        let domain = GridDomain::new(dim, slope_half_width, points_per_axis)
            .map_err(|e| Error::DegenerateDual(e.to_string()))?;
        Ok(Self { domain })
    }

    /// Dual box sized from the largest finite-difference slope of `f`, same node count.
    pub fn default_for(f: &GridFunction) -> Result<Self> {
        let p = max_slope(f) * SLOPE_MARGIN;
        let p = if p > 0.0 && p.is_finite() { p } else { 1.0 };
        Self::new(f.domain().dim(), p, f.domain().points_per_axis())
    }

    /// Use a primal domain as the target grid of a conjugate.
    pub fn primal_dual(&self, primal: &GridDomain) -> DualGrid {
        DualGrid { domain: *primal }
    }

    pub fn on(domain: &GridDomain) -> DualGrid {
        DualGrid { domain: *domain }
    }

    pub fn domain(&self) -> &GridDomain {
        &self.domain
    }

    pub fn slope_half_width(&self) -> f64 {
        self.domain.half_width()
    }
}

/// Largest absolute forward difference quotient between finite neighbours.
pub fn max_slope(f: &GridFunction) -> f64 {
    let d = f.domain();
    let h = d.spacing();
    let v = f.values();
    let mut best = 0.0f64;
    for i in 0..d.len() {
        let off = d.offsets(i);
        for a in 0..d.dim() {
            let mut o = off;
            o[a] += 1;
            if let Some(j) = d.flat_from_offsets(&o) {
                if v[i].is_finite() && v[j].is_finite() {
                    best = best.max((v[j] - v[i]).abs() / h);
                }
            }
        }
    }
    best
}

/// `f*(y) = max_x x.y - f(x)` over nodes with `f(x) < inf`. A `-inf` node
/// makes the conjugate `+inf` everywhere; an all-`+inf` input gives `-inf`.
pub fn legendre(f: &GridFunction, dual: &DualGrid) -> Result<GridFunction> {
    let d = f.domain();
    if d.dim() != dual.domain.dim() {
        return Err(Error::DegenerateDual("dimension mismatch".into()));
    }
    let out_domain = dual.domain;
    if f.min() == f64::NEG_INFINITY {
        return Ok(GridFunction::constant(out_domain, f64::INFINITY, OutsideMode::PlusInfinity));
    }
    let values = if d.dim() == 1 { legendre_1d_hull(f, &out_domain) } else { legendre_brute_values(f, &out_domain) };
    GridFunction::new(out_domain, values, OutsideMode::PlusInfinity)
}

/// Brute-force conjugate over all primal/dual node pairs.
pub fn legendre_brute(f: &GridFunction, dual: &DualGrid) -> Result<GridFunction> {
    if f.min() == f64::NEG_INFINITY {
        return Ok(GridFunction::constant(dual.domain, f64::INFINITY, OutsideMode::PlusInfinity));
    }
    let v = legendre_brute_values(f, &dual.domain);
    GridFunction::new(dual.domain, v, OutsideMode::PlusInfinity)
}

fn legendre_brute_values(f: &GridFunction, out: &GridDomain) -> Vec<f64> {
    let d = f.domain();
    let prim: Vec<([f64; 3], f64)> = (0..d.len())
        .filter(|&i| f.values()[i] < f64::INFINITY)
        .map(|i| (d.point(i), f.values()[i]))
        .collect();
    par::map_range(out.len(), |j| {
        let y = out.point(j);
        prim.iter()
            .map(|(x, fx)| x[0] * y[0] + x[1] * y[1] + x[2] * y[2] - fx)
            .fold(f64::NEG_INFINITY, f64::max)
    })
}

/// One-dimensional conjugate via the lower convex hull of the finite samples.
/// The conjugate only sees the hull, so this is exact for any input.
fn legendre_1d_hull(f: &GridFunction, out: &GridDomain) -> Vec<f64> {
    let d = f.domain();
    let pts: Vec<(f64, f64)> = (0..d.len())
        .filter(|&i| f.values()[i] < f64::INFINITY)
        .map(|i| (d.coord(i), f.values()[i]))
        .collect();
    if pts.is_empty() {
        return vec![f64::NEG_INFINITY; out.len()];
    }
    let hull = lower_hull(&pts);
    let mut res = Vec::with_capacity(out.len());
    let mut k = 0;
    for j in 0..out.len() {
        let y = out.coord(j);
        // advance while the next vertex is at least as good for slope y
        while k + 1 < hull.len() {
            let (x0, f0) = hull[k];
            let (x1, f1) = hull[k + 1];
            if x1 * y - f1 >= x0 * y - f0 {
                k += 1;
            } else {
                break;
            }
        }
        let (x, fx) = hull[k];
        res.push(x * y - fx);
    }
    res
}

/// Lower convex hull of points sorted by abscissa.
pub(crate) fn lower_hull(pts: &[(f64, f64)]) -> Vec<(f64, f64)> {
    let mut hull: Vec<(f64, f64)> = Vec::with_capacity(pts.len());
    for &p in pts {
        while hull.len() >= 2 {
            let (ax, ay) = hull[hull.len() - 2];
            let (bx, by) = hull[hull.len() - 1];
            // drop b if it lies on or above the chord from a to p
            if (by - ay) * (p.0 - ax) >= (p.1 - ay) * (bx - ax) {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(p);
    }
    hull
}

/// `(tH)*(x) = t H*(x / t)` sampled on `target`.
pub fn scaled_conjugate(h: &GridFunction, t: f64, target: &DualGrid) -> Result<GridFunction> {
    if !(t > 0.0 && t.is_finite()) {
        return Err(Error::NonPositiveTime(t));
    }
    let td = target.domain;
    let inner = DualGrid::new(td.dim(), td.half_width() / t, td.points_per_axis())?;
    let hs = legendre(h, &inner)?;
    let values = hs.values().iter().map(|&v| if v.is_infinite() { v } else { t * v }).collect();
    GridFunction::new(td, values, OutsideMode::PlusInfinity)
}

/// `f**` sampled back on the primal grid of `f`.
pub fn biconjugate(f: &GridFunction, dual: &DualGrid) -> Result<GridFunction> {
    let fs = legendre(f, dual)?;
    legendre(&fs, &DualGrid::on(f.domain()))
}
