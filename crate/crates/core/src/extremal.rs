//! Infimal convolution, sup-min and inf-max of grid functions.
//!
//! Off-grid arguments take the extension that never wins the inner
//! optimization: `+inf` for infimal convolution and inf-max operands, `-inf`
//! for sup-min operands. The operand's own `outside_mode` is therefore
//! ignored; the result carries the extension of its operation.

use crate::conjugate::{legendre, DualGrid};
use crate::error::{Error, Result};
use crate::gridfn::{level_set_upper, GridDomain, GridFunction, OutsideMode};
use crate::par;

/// Default number of thresholds for level-set reconstruction.
pub const DEFAULT_LADDER: usize = 128;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExtremalKind {
    InfConv,
    SupMin,
    InfMax,
}

pub fn apply(kind: ExtremalKind, f: &GridFunction, g: &GridFunction) -> Result<GridFunction> {
    match kind {
        ExtremalKind::InfConv => inf_conv(f, g),
        ExtremalKind::SupMin => sup_min(f, g),
        ExtremalKind::InfMax => inf_max(f, g),
    }
}

/// `(f □ g)(x) = min_y f(x - y) + g(y)`. Uses the parabola-envelope scan when
/// either operand is exactly `c|x|^2` with `c > 0` on the nodes.
pub fn inf_conv(f: &GridFunction, g: &GridFunction) -> Result<GridFunction> {
    f.same_domain(g)?;
    if f.min() == f64::NEG_INFINITY || g.min() == f64::NEG_INFINITY {
        return Err(Error::NotBoundedBelow);
    }
    if let Some(c) = quadratic_coefficient(g) {
        return inf_conv_quadratic(f, c);
    }
    if let Some(c) = quadratic_coefficient(f) {
        return inf_conv_quadratic(g, c);
    }
    inf_conv_brute(f, g)
}

/// Brute-force infimal convolution, `O(n^{2N})`.
pub fn inf_conv_brute(f: &GridFunction, g: &GridFunction) -> Result<GridFunction> {
    f.same_domain(g)?;
    if f.min() == f64::NEG_INFINITY || g.min() == f64::NEG_INFINITY {
        return Err(Error::NotBoundedBelow);
    }
    let v = brute(f, g, f64::INFINITY, |a, b| a + b, f64::min);
    GridFunction::new(*f.domain(), v, OutsideMode::PlusInfinity)
}

/// `(f ⊼ g)(x) = max_y min{f(x - y), g(y)}`.
pub fn sup_min(f: &GridFunction, g: &GridFunction) -> Result<GridFunction> {
    f.same_domain(g)?;
    let v = brute(f, g, f64::NEG_INFINITY, f64::min, f64::max);
    GridFunction::new(*f.domain(), v, OutsideMode::MinusInfinity)
}

/// `(f ⊻ g)(x) = min_y max{f(x - y), g(y)}`. In one dimension, an operand
/// that is even and nondecreasing away from the origin takes an
/// `O(n log n)` path.
pub fn inf_max(f: &GridFunction, g: &GridFunction) -> Result<GridFunction> {
    f.same_domain(g)?;
    if radial_nondecreasing_1d(f) {
        return inf_max_radial_1d(f, g);
    }
    if radial_nondecreasing_1d(g) {
        return inf_max_radial_1d(g, f);
    }
    inf_max_brute(f, g)
}

pub fn inf_max_brute(f: &GridFunction, g: &GridFunction) -> Result<GridFunction> {
    f.same_domain(g)?;
    let v = brute(f, g, f64::INFINITY, f64::max, f64::min);
    GridFunction::new(*f.domain(), v, OutsideMode::PlusInfinity)
}

/// One-dimensional, even, and nondecreasing in `|x|`.
pub fn radial_nondecreasing_1d(k: &GridFunction) -> bool {
    let d = k.domain();
    if d.dim() != 1 {
        return false;
    }
    let (m, v) = (d.mid(), k.values());
    (0..=m).all(|r| v[m + r] == v[m - r] && (r == 0 || v[m + r] >= v[m + r - 1]))
}

/// Range minima in `O(1)` after `O(n log n)` setup.
struct SparseMin {
    levels: Vec<Vec<f64>>,
}

impl SparseMin {
    fn new(v: &[f64]) -> Self {
        let mut levels = vec![v.to_vec()];
        let mut w = 1;
        while 2 * w <= v.len() {
            let prev = levels.last().expect("nonempty");
            let next: Vec<f64> = (0..=v.len() - 2 * w).map(|j| prev[j].min(prev[j + w])).collect();
            levels.push(next);
            w *= 2;
        }
        SparseMin { levels }
    }

    /// Minimum over `lo..=hi`.
    fn query(&self, lo: usize, hi: usize) -> f64 {
        let len = hi - lo + 1;
        let l = (usize::BITS - 1 - len.leading_zeros()) as usize;
        self.levels[l][lo].min(self.levels[l][hi + 1 - (1 << l)])
    }
}

/// `k ⊻ g` for a 1-D kernel `k` that is even and nondecreasing in `|x|`:
/// `u(x) = min_r max{K(r), min_{|y| <= r} g(x - y)}`, where the first term
/// grows and the second shrinks with `r`, so the crossing is bisected.
pub fn inf_max_radial_1d(k: &GridFunction, g: &GridFunction) -> Result<GridFunction> {
    k.same_domain(g)?;
    if !radial_nondecreasing_1d(k) {
        return Err(Error::InvalidSpec("kernel must be one-dimensional, even and radially nondecreasing".into()));
    }
    let d = *k.domain();
    let (n, m) = (d.points_per_axis(), d.mid());
    let kv = &k.values()[m..];
    let table = SparseMin::new(g.values());
    let window = |i: usize, r: usize| table.query(i.saturating_sub(r), (i + r).min(n - 1));
    let v = par::map_range(n, |i| {
        // smallest r with K(r) >= E(i, r)
        let (mut lo, mut hi) = (0usize, m + 1);
        while lo < hi {
            let mid = (lo + hi) / 2;
            if kv[mid] >= window(i, mid) {
                hi = mid;
            } else {
                lo = mid + 1;
            }
        }
        match lo {
            r if r > m => window(i, m),
            0 => kv[0],
            r => kv[r].min(window(i, r - 1)),
        }
    });
    GridFunction::new(d, v, OutsideMode::PlusInfinity)
}

/// Per-axis index box holding every node whose value differs from `neutral`;
/// `None` when there is none.
fn active_box(f: &GridFunction, neutral: f64) -> Option<([usize; 3], [usize; 3])> {
    let d = f.domain();
    let mut lo = [usize::MAX; 3];
    let mut hi = [0usize; 3];
    let mut any = false;
    for (i, &v) in f.values().iter().enumerate() {
        if v != neutral {
            any = true;
            let ix = d.multi_index(i);
            for a in 0..d.dim() {
                lo[a] = lo[a].min(ix[a]);
                hi[a] = hi[a].max(ix[a]);
            }
        }
    }
    any.then_some((lo, hi))
}

/// Per output node, reduce `combine(f(x - y), g(y))` over all nodes `y` with
/// `x - y` on the grid. `init` must be neutral for both `combine` and
/// `reduce`, so nodes holding it are skipped.
fn brute<C, R>(f: &GridFunction, g: &GridFunction, init: f64, combine: C, reduce: R) -> Vec<f64>
where
    C: Fn(f64, f64) -> f64 + Sync + Send,
    R: Fn(f64, f64) -> f64 + Sync + Send,
{
    let d = *f.domain();
    let n = d.points_per_axis();
    let m = d.mid();
    let fv = f.values();
    let gv = g.values();
    let (Some((flo, fhi)), Some((glo, ghi))) = (active_box(f, init), active_box(g, init)) else {
        return vec![init; d.len()];
    };
    // y on the grid, inside g's box, with x - y inside f's box
    let range = |i: usize, a: usize| {
        let lo = i.saturating_sub(m).max(glo[a]).max((i + m).saturating_sub(fhi[a]));
        let hi = (i + m).min(n - 1).min(ghi[a]).min((i + m).saturating_sub(flo[a]));
        (lo, hi)
    };
    par::map_range(d.len(), |x| {
        let ix = d.multi_index(x);
        let mut acc = init;
        match d.dim() {
            1 => {
                let (lo, hi) = range(ix[0], 0);
                for iy in lo..=hi {
                    acc = reduce(acc, combine(fv[ix[0] + m - iy], gv[iy]));
                }
            }
            2 => {
                let (lo0, hi0) = range(ix[0], 0);
                let (lo1, hi1) = range(ix[1], 1);
                for iy0 in lo0..=hi0 {
                    let fr = (ix[0] + m - iy0) * n;
                    let gr = iy0 * n;
                    for iy1 in lo1..=hi1 {
                        acc = reduce(acc, combine(fv[fr + ix[1] + m - iy1], gv[gr + iy1]));
                    }
                }
            }
            _ => {
                let (lo0, hi0) = range(ix[0], 0);
                let (lo1, hi1) = range(ix[1], 1);
                let (lo2, hi2) = range(ix[2], 2);
                for iy0 in lo0..=hi0 {
                    for iy1 in lo1..=hi1 {
                        let fr = ((ix[0] + m - iy0) * n + ix[1] + m - iy1) * n;
                        let gr = (iy0 * n + iy1) * n;
                        for iy2 in lo2..=hi2 {
                            acc = reduce(acc, combine(fv[fr + ix[2] + m - iy2], gv[gr + iy2]));
                        }
                    }
                }
            }
        }
        acc
    })
}

/// `Some(c)` if `g = c|x|^2` at every node (relative `1e-12`) with `c > 0`.
pub fn quadratic_coefficient(g: &GridFunction) -> Option<f64> {
    let d = g.domain();
    let mut off = [0isize; 3];
    off[0] = 1;
    let probe = d.flat_from_offsets(&off)?;
    let h = d.spacing();
    let c = g.values()[probe] / (h * h);
    if !(c > 0.0 && c.is_finite()) {
        return None;
    }
    let ok = g.values().iter().enumerate().all(|(i, &v)| {
        let r = d.norm_at(i);
        let want = c * r * r;
        (v - want).abs() <= 1e-12 * (1.0 + want.abs())
    });
    ok.then_some(c)
}

/// `min_z f(z) + c|x - z|^2` with `x - z` restricted to the box, computed by
/// one windowed lower-envelope pass per axis.
pub fn inf_conv_quadratic(f: &GridFunction, c: f64) -> Result<GridFunction> {
    if !(c > 0.0 && c.is_finite()) {
        return Err(Error::InvalidSpec(format!("quadratic coefficient must be positive, got {c}")));
    }
    if f.min() == f64::NEG_INFINITY {
        return Err(Error::NotBoundedBelow);
    }
    let d = *f.domain();
    let n = d.points_per_axis();
    let mut cur = f.values().to_vec();
    for axis in 0..d.dim() {
        let stride = n.pow((d.dim() - 1 - axis) as u32);
        let lines = d.len() / n;
        let starts: Vec<usize> = (0..lines)
            .map(|l| {
                let outer = l / stride;
                let inner = l % stride;
                outer * stride * n + inner
            })
            .collect();
        let src = &cur;
        let done: Vec<Vec<f64>> = par::map_slice(&starts, |&s| {
            let line: Vec<f64> = (0..n).map(|k| src[s + k * stride]).collect();
            envelope_1d(&line, c, d.spacing(), d.mid())
        });
        let mut next = vec![0.0; d.len()];
        for (s, line) in starts.iter().zip(done) {
            for (k, v) in line.into_iter().enumerate() {
                next[s + k * stride] = v;
            }
        }
        cur = next;
    }
    GridFunction::new(d, cur, OutsideMode::PlusInfinity)
}

/// `out[i] = min_{|i-j| <= window} v[j] + c ((i-j) h)^2`.
fn envelope_1d(v: &[f64], c: f64, h: f64, window: usize) -> Vec<f64> {
    let n = v.len();
    let finite: Vec<usize> = (0..n).filter(|&j| v[j] < f64::INFINITY).collect();
    if finite.is_empty() {
        return vec![f64::INFINITY; n];
    }
    let pos = |j: usize| j as f64 * h;
    let key = |j: usize| v[j] + c * pos(j) * pos(j);
    let mut hull: Vec<usize> = Vec::with_capacity(finite.len());
    let mut bounds: Vec<f64> = Vec::with_capacity(finite.len() + 1);
    for &q in &finite {
        loop {
            let Some(&p) = hull.last() else { break };
            let s = (key(q) - key(p)) / (2.0 * c * (pos(q) - pos(p)));
            if s <= *bounds.last().unwrap() {
                hull.pop();
                bounds.pop();
            } else {
                hull.push(q);
                bounds.push(s);
                break;
            }
        }
        if hull.is_empty() {
            hull.push(q);
            bounds.push(f64::NEG_INFINITY);
        }
    }
    let cost = |i: usize, j: usize| {
        let dz = (i as f64 - j as f64) * h;
        v[j] + c * dz * dz
    };
    let mut out = vec![f64::INFINITY; n];
    let mut k = 0;
    for (i, o) in out.iter_mut().enumerate() {
        let x = pos(i);
        while k + 1 < hull.len() && bounds[k + 1] < x {
            k += 1;
        }
        let j = hull[k];
        if i.abs_diff(j) <= window {
            *o = cost(i, j);
        } else {
            let lo = i.saturating_sub(window);
            let hi = (i + window).min(n - 1);
            *o = (lo..=hi).map(|j| cost(i, j)).fold(f64::INFINITY, f64::min);
        }
    }
    out
}

/// One-dimensional infimal convolution through `(f* + g*)*` on a dual grid.
/// Exact only up to the dual resolution; intended for convex operands.
pub fn inf_conv_via_conjugacy(f: &GridFunction, g: &GridFunction, dual: &DualGrid) -> Result<GridFunction> {
    f.same_domain(g)?;
    if f.domain().dim() != 1 {
        return Err(Error::UnsupportedDim(f.domain().dim()));
    }
    let fs = legendre(f, dual)?;
    let gs = legendre(g, dual)?;
    let sum = fs.add(&gs)?;
    let back = dual.primal_dual(f.domain());
    let out = legendre(&sum, &back)?;
    GridFunction::new(*f.domain(), out.into_values(), OutsideMode::PlusInfinity)
}

/// Node indices of the discrete Minkowski sum `A ⊕ B`, restricted to the grid.
pub fn minkowski_sum(domain: &GridDomain, a: &[usize], b: &[usize]) -> Vec<usize> {
    let mut hit = vec![false; domain.len()];
    let boffs: Vec<[isize; 3]> = b.iter().map(|&j| domain.offsets(j)).collect();
    for &i in a {
        let oa = domain.offsets(i);
        for ob in &boffs {
            let s = [oa[0] + ob[0], oa[1] + ob[1], oa[2] + ob[2]];
            if let Some(k) = domain.flat_from_offsets(&s) {
                hit[k] = true;
            }
        }
    }
    (0..domain.len()).filter(|&k| hit[k]).collect()
}

/// Uniform ladder of `k` thresholds spanning the finite node values of both operands.
pub fn value_ladder(f: &GridFunction, g: &GridFunction, k: usize) -> Vec<f64> {
    let finite = f.values().iter().chain(g.values()).copied().filter(|v| v.is_finite());
    let (lo, hi) = finite.fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| (a.min(v), b.max(v)));
    if !lo.is_finite() {
        return vec![0.0];
    }
    if k <= 1 || hi == lo {
        return vec![lo];
    }
    (0..k).map(|i| lo + (hi - lo) * i as f64 / (k - 1) as f64).collect()
}

/// Reconstruct `f ⊼ g` from Minkowski sums of upper level sets: the value at
/// `x` is the largest ladder threshold whose sum set contains `x`, or the
/// lowest threshold when none does.
pub fn sup_min_via_level_sets(f: &GridFunction, g: &GridFunction, ladder: &[f64]) -> Result<GridFunction> {
    f.same_domain(g)?;
    if ladder.is_empty() {
        return Err(Error::EmptyLadder);
    }
    let mut sorted = ladder.to_vec();
    sorted.sort_by(f64::total_cmp);
    let d = *f.domain();
    let sums = par::map_slice(&sorted, |&xi| {
        let fa = level_set_upper(f, xi).indices;
        let gb = level_set_upper(g, xi).indices;
        minkowski_sum(&d, &fa, &gb)
    });
    let mut out = vec![sorted[0]; d.len()];
    for (xi, w) in sorted.iter().zip(&sums) {
        for &k in w {
            out[k] = *xi;
        }
    }
    GridFunction::new(d, out, OutsideMode::MinusInfinity)
}

/// Node-statistics relations between operands and results.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundsReport {
    /// `M` of sup-min equals `min(M_f, M_g)`.
    pub sup_min_max_eq: bool,
    pub sup_min_max_gap: f64,
    /// `m` of sup-min is at least `min(m_f, m_g)`.
    pub sup_min_min_ge: bool,
    pub sup_min_min_margin: f64,
    /// `M` of inf-max is at most `max(M_f, M_g)`.
    pub inf_max_max_le: bool,
    pub inf_max_max_margin: f64,
    /// `m` of inf-max equals `max(m_f, m_g)`.
    pub inf_max_min_eq: bool,
    pub inf_max_min_gap: f64,
    /// For nonnegative operands: `0 <= (f ⊻ g)^{-1} <= 2 (f □ g)^{-1}` node-wise.
    pub sandwich: Option<bool>,
}

impl BoundsReport {
    pub fn all_hold(&self) -> bool {
        self.sup_min_max_eq
            && self.sup_min_min_ge
            && self.inf_max_max_le
            && self.inf_max_min_eq
            && self.sandwich.unwrap_or(true)
    }
}

fn gap(a: f64, b: f64) -> f64 {
    if a == b {
        0.0
    } else {
        (a - b).abs()
    }
}

/// Check the node-statistics relations. Equalities are exact on the grid when
/// the extremal nodes of the operands add up to a grid node.
pub fn extremal_bounds_check(f: &GridFunction, g: &GridFunction) -> Result<BoundsReport> {
    let sm = sup_min(f, g)?;
    let im = inf_max(f, g)?;
    let (mf, mg) = (f.min(), g.min());
    let (bf, bg) = (f.max(), g.max());
    let sup_min_max_gap = gap(sm.max(), bf.min(bg));
    let inf_max_min_gap = gap(im.min(), mf.max(mg));
    let lo = mf.min(mg);
    let hi = bf.max(bg);
    let sup_min_min_margin = if sm.min() == lo { 0.0 } else { sm.min() - lo };
    let inf_max_max_margin = if im.max() == hi { 0.0 } else { hi - im.max() };
    let sandwich = if mf >= 0.0 && mg >= 0.0 && f.max() < f64::INFINITY && g.max() < f64::INFINITY {
        let ic = inf_conv(f, g)?;
        let ok = im.values().iter().zip(ic.values()).all(|(&a, &b)| {
            let ra = crate::gridfn::recip(a);
            let rb = crate::gridfn::recip(b);
            ra >= 0.0 && ra <= 2.0 * rb * (1.0 + 1e-12)
        });
        Some(ok)
    } else {
        None
    };
    Ok(BoundsReport {
        sup_min_max_eq: sup_min_max_gap == 0.0,
        sup_min_max_gap,
        sup_min_min_ge: sup_min_min_margin >= 0.0,
        sup_min_min_margin,
        inf_max_max_le: inf_max_max_margin >= 0.0,
        inf_max_max_margin,
        inf_max_min_eq: inf_max_min_gap == 0.0,
        inf_max_min_gap,
        sandwich,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gridfn::{make_grid, sample, FunctionKind, FunctionSpec};

    fn s(kind: FunctionKind, d: &GridDomain) -> GridFunction {
        sample(&FunctionSpec::new(kind), d, OutsideMode::PlusInfinity).unwrap()
    }

    /// Plain quadruple loop over all node pairs, independent of the kernel above.
    fn oracle(f: &GridFunction, g: &GridFunction, kind: ExtremalKind) -> Vec<f64> {
        let d = f.domain();
        (0..d.len())
            .map(|x| {
                let ox = d.offsets(x);
                let mut acc = match kind {
                    ExtremalKind::SupMin => f64::NEG_INFINITY,
                    _ => f64::INFINITY,
                };
                for y in 0..d.len() {
                    let oy = d.offsets(y);
                    let diff = [ox[0] - oy[0], ox[1] - oy[1], ox[2] - oy[2]];
                    let Some(z) = d.flat_from_offsets(&diff) else { continue };
                    let (a, b) = (f.values()[z], g.values()[y]);
                    acc = match kind {
                        ExtremalKind::InfConv => acc.min(a + b),
                        ExtremalKind::SupMin => acc.max(a.min(b)),
                        ExtremalKind::InfMax => acc.min(a.max(b)),
                    };
                }
                acc
            })
            .collect()
    }

    #[test]
    fn constants() {
        let d = make_grid(2, 1.0, 5).unwrap();
        let one = GridFunction::constant(d, 1.0, OutsideMode::PlusInfinity);
        assert!(inf_conv(&one, &one).unwrap().values().iter().all(|&v| v == 2.0));
        assert!(sup_min(&one, &one).unwrap().values().iter().all(|&v| v == 1.0));
        assert!(inf_max(&one, &one).unwrap().values().iter().all(|&v| v == 1.0));
    }

    #[test]
    fn brute_matches_oracle_all_dims() {
        for (dim, n) in [(1, 9), (2, 7), (3, 5)] {
            let d = make_grid(dim, 1.5, n).unwrap();
            let f = s(FunctionKind::Gaussian { height: 2.0, width: 0.5, center: vec![0.3, 0.1, -0.2] }, &d);
            let g = s(FunctionKind::Power { c: 0.8, alpha: 1.5, center: vec![-0.2, 0.4, 0.0] }, &d);
            for kind in [ExtremalKind::InfConv, ExtremalKind::SupMin, ExtremalKind::InfMax] {
                let got = apply(kind, &f, &g).unwrap();
                assert_eq!(got.values(), &oracle(&f, &g, kind)[..], "{kind:?} dim {dim}");
            }
        }
    }

    #[test]
    fn quadratic_self_convolution() {
        let d = make_grid(1, 4.0, 161).unwrap();
        let q = s(FunctionKind::Quadratic { c: 1.0 }, &d);
        let u = inf_conv(&q, &q).unwrap();
        let h = d.spacing();
        for i in 0..d.len() {
            let x = d.coord(i);
            assert!((u.values()[i] - x * x / 2.0).abs() <= h * h, "x={x}");
        }
    }

    #[test]
    fn shift_identity_exact() {
        let d = make_grid(1, 3.0, 61).unwrap();
        let f = s(FunctionKind::Abs { c: 1.0 }, &d);
        let g = s(FunctionKind::Gaussian { height: 1.0, width: 0.4, center: vec![0.5] }, &d);
        let z = 0.75;
        let a = inf_conv_brute(&f, &g).unwrap();
        let b = inf_conv_brute(&f.add_const(-z), &g.add_const(z)).unwrap();
        assert!(a.max_abs_diff(&b) <= 1e-12);
    }

    #[test]
    fn triangle_sup_min_is_dilation() {
        let d = make_grid(1, 4.0, 81).unwrap();
        let t = s(FunctionKind::Triangle, &d);
        let w = sup_min(&t, &t).unwrap();
        for i in 0..d.len() {
            let off = d.offsets(i)[0];
            if off % 2 == 0 {
                let half = d.flat_from_offsets(&[off / 2, 0, 0]).unwrap();
                assert!((w.values()[i] - t.values()[half]).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn unit_spikes_with_interval() {
        // integrable background with unit spikes at the integers, g = characteristic of (-1, 1)
        let d = make_grid(1, 4.0, 81).unwrap();
        let h = d.spacing();
        let f = GridFunction::from_fn(d, OutsideMode::PlusInfinity, |p| {
            let x = p[0];
            if (x - x.round()).abs() < 1e-9 { 1.0 } else { 0.3 * (-x * x).exp() }
        });
        let g = GridFunction::from_fn(d, OutsideMode::PlusInfinity, |p| if p[0].abs() < 1.0 - h / 2.0 { 1.0 } else { 0.0 });
        let w = sup_min(&f, &g).unwrap();
        assert!(w.values().iter().all(|&v| v == 1.0));
    }

    #[test]
    fn dualities() {
        let d = make_grid(1, 2.0, 41).unwrap();
        let f = s(FunctionKind::Gaussian { height: 2.0, width: 0.5, center: vec![0.3] }, &d).add_const(0.5);
        let g = s(FunctionKind::Abs { c: 0.7 }, &d).add_const(0.2);
        let im = inf_max(&f, &g).unwrap();
        let dual = sup_min(&f.neg(), &g.neg()).unwrap().neg();
        assert_eq!(im.values(), dual.values());
        let recip = sup_min(&f.recip(), &g.recip()).unwrap().recip();
        assert!(im.max_abs_diff(&recip) <= 1e-12);
    }

    #[test]
    fn quadratic_fast_path_matches_brute() {
        for (dim, n) in [(1, 257), (2, 65)] {
            let d = make_grid(dim, 2.0, n).unwrap();
            let q = s(FunctionKind::Quadratic { c: 0.7 }, &d);
            let f = sample(
                &FunctionSpec::new(FunctionKind::Sum {
                    terms: vec![
                        FunctionSpec::new(FunctionKind::Abs { c: 1.3 }),
                        FunctionSpec::new(FunctionKind::Gaussian { height: -1.0, width: 0.3, center: vec![0.8, -0.5] }),
                    ],
                }),
                &d,
                OutsideMode::PlusInfinity,
            )
            .unwrap();
            assert_eq!(quadratic_coefficient(&q).map(|c| (c - 0.7).abs() < 1e-12), Some(true));
            let fast = inf_conv(&f, &q).unwrap();
            let slow = inf_conv_brute(&f, &q).unwrap();
            assert!(fast.max_abs_diff(&slow) <= 1e-9, "dim {dim}");
        }
    }

    #[test]
    fn fast_path_window_and_infinities() {
        // steep data forces minimizers beyond the kernel's box for edge nodes
        let d = make_grid(1, 1.0, 33).unwrap();
        let q = s(FunctionKind::Quadratic { c: 0.01 }, &d);
        let mut v: Vec<f64> = (0..33).map(|i| -(i as f64) * 3.0).collect();
        v[5] = f64::INFINITY;
        let f = GridFunction::new(d, v, OutsideMode::PlusInfinity).unwrap();
        let fast = inf_conv_quadratic(&f, 0.01).unwrap();
        let slow = inf_conv_brute(&f, &q).unwrap();
        assert!(fast.max_abs_diff(&slow) <= 1e-9);
    }

    #[test]
    fn level_set_reconstruction() {
        let d = make_grid(1, 1.0, 5).unwrap();
        let one = GridFunction::constant(d, 1.0, OutsideMode::PlusInfinity);
        let r = sup_min_via_level_sets(&one, &one, &[0.0, 0.5, 1.0]).unwrap();
        assert!(r.values().iter().all(|&v| (v - 1.0).abs() <= 0.5));
        assert_eq!(sup_min_via_level_sets(&one, &one, &[]), Err(Error::EmptyLadder));

        let d = make_grid(1, 4.0, 81).unwrap();
        let t = s(FunctionKind::Triangle, &d);
        let ladder = value_ladder(&t, &t, DEFAULT_LADDER);
        let step = ladder[1] - ladder[0];
        let r = sup_min_via_level_sets(&t, &t, &ladder).unwrap();
        assert!(r.max_abs_diff(&sup_min(&t, &t).unwrap()) <= step + 1e-12);
    }

    #[test]
    fn minkowski_identity_exhaustive() {
        let d = make_grid(2, 1.0, 7).unwrap();
        let f = s(FunctionKind::Gaussian { height: 1.0, width: 0.4, center: vec![0.3, 0.0] }, &d);
        let g = s(FunctionKind::Triangle, &d);
        let w = sup_min(&f, &g).unwrap();
        for xi in value_ladder(&f, &g, 20) {
            let lhs = level_set_upper(&w, xi).indices;
            let rhs = minkowski_sum(&d, &level_set_upper(&f, xi).indices, &level_set_upper(&g, xi).indices);
            assert_eq!(lhs, rhs, "xi={xi}");
        }
    }

    #[test]
    fn bounds_relations() {
        let d = make_grid(1, 2.0, 41).unwrap();
        let one = GridFunction::constant(d, 1.0, OutsideMode::PlusInfinity);
        let r = extremal_bounds_check(&one, &one).unwrap();
        assert!(r.all_hold());
        assert_eq!((r.sup_min_max_gap, r.sup_min_min_margin, r.inf_max_max_margin, r.inf_max_min_gap), (0.0, 0.0, 0.0, 0.0));

        let t = s(FunctionKind::Triangle, &d);
        let zero = GridFunction::constant(d, 0.0, OutsideMode::PlusInfinity);
        assert_eq!(sup_min(&t, &zero).unwrap().max(), 0.0);
        assert!(extremal_bounds_check(&t, &zero).unwrap().all_hold());

        let g = s(FunctionKind::Gaussian { height: 0.8, width: 0.6, center: vec![-0.4] }, &d).add_const(0.1);
        assert!(extremal_bounds_check(&t, &g).unwrap().all_hold());
    }

    #[test]
    fn commutative_and_monotone() {
        let d = make_grid(2, 1.0, 9).unwrap();
        let f = s(FunctionKind::Gaussian { height: 1.0, width: 0.4, center: vec![0.3, -0.2] }, &d);
        let g = s(FunctionKind::Abs { c: 0.5 }, &d);
        let f2 = f.add_const(0.1).max_with(&s(FunctionKind::Triangle, &d)).unwrap();
        for kind in [ExtremalKind::InfConv, ExtremalKind::SupMin, ExtremalKind::InfMax] {
            let a = apply(kind, &f, &g).unwrap();
            assert_eq!(a.values(), apply(kind, &g, &f).unwrap().values());
            let b = apply(kind, &f2, &g).unwrap();
            assert!(a.values().iter().zip(b.values()).all(|(x, y)| x <= y));
        }
    }

    #[test]
    fn self_convolution_below_twice_half() {
        let d = make_grid(1, 3.0, 121).unwrap();
        for f in [s(FunctionKind::Quadratic { c: 1.0 }, &d), s(FunctionKind::Triangle, &d), s(FunctionKind::LogPlus, &d)] {
            let w = inf_conv(&f, &f).unwrap();
            for i in 0..d.len() {
                let off = d.offsets(i)[0];
                if off % 2 == 0 {
                    let half = d.flat_from_offsets(&[off / 2, 0, 0]).unwrap();
                    assert!(w.values()[i] <= 2.0 * f.values()[half] + 1e-12);
                }
            }
        }
    }

    #[test]
    fn rejects_bad_operands() {
        let d1 = make_grid(1, 1.0, 5).unwrap();
        let d2 = make_grid(1, 1.0, 7).unwrap();
        let a = GridFunction::constant(d1, 0.0, OutsideMode::PlusInfinity);
        let b = GridFunction::constant(d2, 0.0, OutsideMode::PlusInfinity);
        assert_eq!(inf_conv(&a, &b), Err(Error::DomainMismatch));
        let neg = GridFunction::constant(d1, f64::NEG_INFINITY, OutsideMode::PlusInfinity);
        assert_eq!(inf_conv(&a, &neg), Err(Error::NotBoundedBelow));
    }

    #[test]
    fn radial_inf_max_matches_brute() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for n in [3usize, 5, 17, 41, 101] {
            let d = make_grid(1, 2.0, n).unwrap();
            for _ in 0..20 {
                let m = d.mid();
                let mut prof: Vec<f64> = (0..=m).map(|_| rng.gen_range(0.0..1.0)).collect();
                prof.sort_by(f64::total_cmp);
                if rng.gen_bool(0.3) {
                    prof[m] = f64::INFINITY;
                }
                let k = GridFunction::new(d, (0..n).map(|i| prof[i.abs_diff(m)]).collect(), OutsideMode::PlusInfinity).unwrap();
                let g = GridFunction::new(d, (0..n).map(|_| if rng.gen_bool(0.1) { f64::INFINITY } else { rng.gen_range(0.0..1.5) }).collect(), OutsideMode::PlusInfinity).unwrap();
                assert!(radial_nondecreasing_1d(&k));
                let fast = inf_max(&k, &g).unwrap();
                assert_eq!(fast.values(), inf_max_brute(&k, &g).unwrap().values());
                assert_eq!(inf_max(&g, &k).unwrap().values(), fast.values());
            }
        }
    }
}
