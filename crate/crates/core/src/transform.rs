//! Radial transforms built from enclosing-ball radii of level sets.
//!
//! `hat(f)(x) = min{xi : level set {f > xi} fits in a closed centered ball of
//! radius |x|}` on a value ladder. Nodes on the sphere of a level set's
//! enclosing ball count as inside, and level sets with at most one node are
//! treated as null, matching points being null sets in the continuum. With
//! these conventions the transform of a radially nonincreasing function is
//! the function itself and a single spike transforms to its background.

use std::io::Write;

use crate::error::Result;
use crate::gridfn::{fmt_sig, level_set_lower, level_set_upper, recip, GridFunction};
use crate::minball::radius_of_indices;
use crate::orlicz::{luxemburg_norm, YoungFunction};
use crate::par;

/// Default number of uniform thresholds.
pub const DEFAULT_LADDER: usize = 256;

const SPHERE_SLACK: f64 = 1e-9;

/// How value thresholds are chosen.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Ladder {
    /// `k` uniform thresholds spanning the finite node values.
    Uniform(usize),
    /// Every distinct finite node value; makes the transform exact.
    NodeValues,
}

impl Default for Ladder {
    fn default() -> Self {
        Ladder::Uniform(DEFAULT_LADDER)
    }
}

impl Ladder {
    /// Finite thresholds, ascending.
    pub fn thresholds(&self, f: &GridFunction) -> Vec<f64> {
        let mut finite: Vec<f64> = f.values().iter().copied().filter(|v| v.is_finite()).collect();
        if finite.is_empty() {
            return Vec::new();
        }
        match *self {
            Ladder::NodeValues => {
                finite.sort_by(f64::total_cmp);
                finite.dedup();
                finite
            }
            Ladder::Uniform(k) => {
                let lo = finite.iter().copied().fold(f64::INFINITY, f64::min);
                let hi = finite.iter().copied().fold(f64::NEG_INFINITY, f64::max);
                if k <= 1 || lo == hi {
                    return vec![lo];
                }
                (0..k).map(|i| lo + (hi - lo) * i as f64 / (k - 1) as f64).collect()
            }
        }
    }

    /// Spacing of the thresholds: the error bound of a transform on this ladder.
    pub fn step(&self, f: &GridFunction) -> f64 {
        let t = self.thresholds(f);
        match *self {
            Ladder::NodeValues => 0.0,
            Ladder::Uniform(_) if t.len() > 1 => t[1] - t[0],
            Ladder::Uniform(_) => 0.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
pub enum ProfileDirection {
    HatNonincreasing,
    CheckNondecreasing,
}

/// Step function of the radius: value `breakpoints[i].1` on
/// `[breakpoints[i].0, breakpoints[i+1].0)`.
#[derive(Debug, Clone, PartialEq)]
pub struct RadialProfile {
    pub breakpoints: Vec<(f64, f64)>,
    pub direction: ProfileDirection,
    pub value_at_infinity: f64,
}

impl RadialProfile {
    /// Right-continuous evaluation at radius `t >= 0`.
    pub fn eval(&self, t: f64) -> f64 {
        let k = self.breakpoints.partition_point(|b| b.0 <= t);
        if k == 0 {
            match self.direction {
                ProfileDirection::HatNonincreasing => f64::INFINITY,
                ProfileDirection::CheckNondecreasing => f64::NEG_INFINITY,
            }
        } else {
            self.breakpoints[k - 1].1
        }
    }

    fn negated(&self) -> RadialProfile {
        RadialProfile {
            breakpoints: self.breakpoints.iter().map(|&(t, v)| (t, -v)).collect(),
            direction: match self.direction {
                ProfileDirection::HatNonincreasing => ProfileDirection::CheckNondecreasing,
                ProfileDirection::CheckNondecreasing => ProfileDirection::HatNonincreasing,
            },
            value_at_infinity: -self.value_at_infinity,
        }
    }

    /// The radially symmetric function `x -> profile(|x|)` on the grid of `like`.
    pub fn to_grid(&self, like: &GridFunction) -> GridFunction {
        let d = *like.domain();
        let values = par::map_range(d.len(), |i| self.eval(d.norm_at(i)));
        GridFunction::new(d, values, like.outside_mode()).expect("profile values are never NaN")
    }

    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut wr = csv::Writer::from_writer(w);
        wr.write_record(["t", "gamma"])?;
        for &(t, v) in &self.breakpoints {
            wr.write_record([fmt_sig(t), fmt_sig(v)])?;
        }
        wr.flush()?;
        Ok(())
    }
}

/// Raw enclosing-ball radii `rho+(xi)` of `{f > xi}` for every ladder threshold.
pub fn rho_plus(f: &GridFunction, ladder: &[f64]) -> Vec<(f64, f64)> {
    let d = *f.domain();
    par::map_slice(ladder, |&xi| {
        let ls = level_set_upper(f, xi);
        (xi, radius_of_indices(&d, &ls.indices, ls.touches_boundary))
    })
}

/// Raw radii `rho-(xi)` of `{f < xi}`.
pub fn rho_minus(f: &GridFunction, ladder: &[f64]) -> Vec<(f64, f64)> {
    let d = *f.domain();
    par::map_slice(ladder, |&xi| {
        let ls = level_set_lower(f, xi);
        (xi, radius_of_indices(&d, &ls.indices, ls.touches_boundary))
    })
}

/// Threshold radius at which a level becomes admissible: `+inf` for unbounded
/// sets, 0 for null sets, just beyond the enclosing sphere otherwise.
fn admission_radius(count: usize, rho: f64, inflate: f64) -> f64 {
    if rho.is_infinite() {
        f64::INFINITY
    } else if count == 0 || (count == 1 && inflate == 0.0) {
        0.0
    } else {
        rho * (1.0 + SPHERE_SLACK) + 1e-12 + inflate
    }
}

/// `(threshold, admission radius)` for every level including the sentinels,
/// ascending in threshold.
fn upper_levels(f: &GridFunction, ladder: &Ladder, inflate: f64) -> Vec<(f64, f64)> {
    let d = *f.domain();
    let mut xs = vec![f64::NEG_INFINITY];
    xs.extend(ladder.thresholds(f));
    xs.push(f64::INFINITY);
    par::map_slice(&xs, |&xi| {
        let ls = level_set_upper(f, xi);
        let rho = radius_of_indices(&d, &ls.indices, ls.touches_boundary);
        (xi, admission_radius(ls.indices.len(), rho, inflate))
    })
}

/// Breakpoints from levels visited in the order in which the transform value
/// improves: a level is reached at the smallest admission radius among itself
/// and the levels before it.
fn breakpoints_from(levels: impl Iterator<Item = (f64, f64)>) -> Vec<(f64, f64)> {
    let mut bps: Vec<(f64, f64)> = Vec::new();
    let mut running = f64::INFINITY;
    for (xi, t) in levels {
        if t < running {
            running = t;
            bps.push((t, xi));
        }
    }
    bps.reverse();
    bps
}

fn hat_profile_from_levels(levels: &[(f64, f64)]) -> RadialProfile {
    let bps = breakpoints_from(levels.iter().copied());
    let value_at_infinity = bps.last().map_or(f64::INFINITY, |b| b.1);
    RadialProfile { breakpoints: bps, direction: ProfileDirection::HatNonincreasing, value_at_infinity }
}

/// Profile and grid function of the upper transform on the given ladder.
pub fn hat_with(f: &GridFunction, ladder: &Ladder) -> (RadialProfile, GridFunction) {
    let prof = hat_profile_from_levels(&upper_levels(f, ladder, 0.0));
    let g = prof.to_grid(f);
    (prof, g)
}

pub fn hat(f: &GridFunction) -> (RadialProfile, GridFunction) {
    hat_with(f, &Ladder::default())
}

/// Upper transform with every non-empty level admitted only beyond
/// `rho + inflate`; a pointwise majorant of `hat` used to bound grid effects.
pub fn hat_inflated(f: &GridFunction, ladder: &Ladder, inflate: f64) -> GridFunction {
    hat_profile_from_levels(&upper_levels(f, ladder, inflate)).to_grid(f)
}

/// Lower transform computed as `-hat(-f)`.
pub fn check_with(f: &GridFunction, ladder: &Ladder) -> (RadialProfile, GridFunction) {
    let (p, g) = hat_with(&f.neg(), ladder);
    (p.negated(), g.neg().with_outside(f.outside_mode()))
}

pub fn check(f: &GridFunction) -> (RadialProfile, GridFunction) {
    check_with(f, &Ladder::default())
}

/// Lower transform through the radii of `{f < xi}` and the largest admissible threshold.
pub fn check_via_lower_sets(f: &GridFunction, ladder: &Ladder) -> (RadialProfile, GridFunction) {
    let d = *f.domain();
    let mut xs = vec![f64::NEG_INFINITY];
    xs.extend(ladder.thresholds(&f.neg()).into_iter().rev().map(|v| -v));
    xs.push(f64::INFINITY);
    let levels: Vec<(f64, f64)> = par::map_slice(&xs, |&xi| {
        let ls = level_set_lower(f, xi);
        let rho = radius_of_indices(&d, &ls.indices, ls.touches_boundary);
        (xi, admission_radius(ls.indices.len(), rho, 0.0))
    });
    let bps = breakpoints_from(levels.iter().rev().copied());
    let value_at_infinity = bps.last().map_or(f64::NEG_INFINITY, |b| b.1);
    let prof = RadialProfile { breakpoints: bps, direction: ProfileDirection::CheckNondecreasing, value_at_infinity };
    let g = prof.to_grid(f);
    (prof, g)
}

/// One named property of the transform suite.
#[derive(Debug, Clone, PartialEq)]
pub struct PropertyCheck {
    pub name: &'static str,
    /// `false` when the hypothesis of the property does not hold for the input.
    pub applicable: bool,
    pub pass: bool,
    /// Largest violation found (0 when none).
    pub worst: f64,
    pub tolerance: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PropertyReport {
    pub checks: Vec<PropertyCheck>,
}

impl PropertyReport {
    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| !c.applicable || c.pass)
    }

    pub fn get(&self, name: &str) -> Option<&PropertyCheck> {
        self.checks.iter().find(|c| c.name == name)
    }
}

fn slack(v: f64) -> f64 {
    1e-12 * (1.0 + if v.is_finite() { v.abs() } else { 0.0 })
}

/// Largest amount by which `a <= b + tol` is violated node-wise.
fn excess_le(a: &[f64], b: &[f64], tol: f64) -> f64 {
    a.iter()
        .zip(b)
        .map(|(&x, &y)| if x <= y + tol + slack(y) { 0.0 } else { x - y - tol })
        .fold(0.0, f64::max)
}

fn within(a: &[f64], b: &[f64], tol: f64) -> f64 {
    excess_le(a, b, tol).max(excess_le(b, a, tol))
}

fn mk(name: &'static str, applicable: bool, worst: f64, tolerance: f64) -> PropertyCheck {
    PropertyCheck { name, applicable, pass: worst == 0.0, worst, tolerance }
}

/// Whether `f` depends only on `|x|` and is monotone in it.
pub fn radial_monotone(f: &GridFunction, nonincreasing: bool) -> bool {
    let d = f.domain();
    let mut pairs: Vec<(f64, f64)> = (0..d.len()).map(|i| (d.norm_at(i), f.values()[i])).collect();
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    pairs.windows(2).all(|w| {
        let same_r = (w[1].0 - w[0].0).abs() <= 1e-12 * (1.0 + w[0].0);
        if same_r {
            w[0].1 == w[1].1
        } else if nonincreasing {
            w[1].1 <= w[0].1
        } else {
            w[1].1 >= w[0].1
        }
    })
}

/// Checks the translation, scaling, monotonicity, bound, radial-identity,
/// reciprocal, positive-part, spike, composition and norm-domination
/// properties on a ladder, each with the tolerance that ladder rounding allows.
pub fn transform_property_suite(
    f: &GridFunction,
    g: &GridFunction,
    phi: &YoungFunction,
    z: f64,
    c: f64,
    ladder: &Ladder,
) -> Result<PropertyReport> {
    f.same_domain(g)?;
    let d = *f.domain();
    let mut checks = Vec::new();
    let df = ladder.step(f);
    let (_, fh) = hat_with(f, ladder);

    // sup does not grow, inf does not shrink
    checks.push(mk("max_bound", true, (fh.max() - f.max()).max(0.0), 0.0));
    checks.push(mk("min_bound", true, (f.min() - fh.min()).max(0.0), 0.0));

    let fz = f.add_const(z);
    let (_, fzh) = hat_with(&fz, ladder);
    let tol = df + ladder.step(&fz);
    checks.push(mk("translation", true, within(fzh.values(), fh.add_const(z).values(), tol), tol));

    let c = c.max(0.0);
    let fc = f.scale(c);
    let (_, fch) = hat_with(&fc, ladder);
    let tol = c * df + ladder.step(&fc);
    checks.push(mk("scaling", true, within(fch.values(), fh.scale(c).values(), tol), tol));

    let low = f.min_with(g)?;
    let (_, lowh) = hat_with(&low, ladder);
    let tol = ladder.step(&low);
    checks.push(mk("monotone", true, excess_le(lowh.values(), fh.values(), tol), tol));

    // equality inside the inscribed ball, domination beyond it; a one-node
    // top level set is null, so the origin carries the next value down
    let nonincr = radial_monotone(f, true);
    let radial_worst = if nonincr {
        let o = d.origin_index();
        let next = (0..d.len()).filter(|&i| i != o).map(|i| f.values()[i]).fold(f64::NEG_INFINITY, f64::max);
        (0..d.len())
            .map(|i| {
                let (a, b) = (fh.values()[i], if i == o { next } else { f.values()[i] });
                if d.norm_at(i) < d.half_width() {
                    within(&[a], &[b], df)
                } else {
                    excess_le(&[b], &[a], 0.0)
                }
            })
            .fold(0.0, f64::max)
    } else {
        0.0
    };
    checks.push(mk("radial_hat_identity", nonincr, radial_worst, df));

    let (_, fc_lower) = check_with(f, ladder);
    let nondecr = radial_monotone(f, false);
    let radial_worst = if nondecr {
        let o = d.origin_index();
        let next = (0..d.len()).filter(|&i| i != o).map(|i| f.values()[i]).fold(f64::INFINITY, f64::min);
        (0..d.len())
            .map(|i| {
                let (a, b) = (fc_lower.values()[i], if i == o { next } else { f.values()[i] });
                if d.norm_at(i) < d.half_width() {
                    within(&[a], &[b], df)
                } else {
                    excess_le(&[a], &[b], 0.0)
                }
            })
            .fold(0.0, f64::max)
    } else {
        0.0
    };
    checks.push(mk("radial_check_identity", nondecr, radial_worst, df));

    let (_, via_lower) = check_via_lower_sets(f, ladder);
    let tol = df + ladder.step(&f.neg());
    checks.push(mk("check_routes", true, within(fc_lower.values(), via_lower.values(), tol), tol));

    let nonneg = f.min() >= 0.0;
    // reciprocal: hat(1/f) against 1/check(f); check(f) sits in [exact - df, exact]
    let recip_worst = if nonneg {
        let fr = f.recip();
        let (_, frh) = hat_with(&fr, ladder);
        let dr = ladder.step(&fr);
        (0..d.len())
            .map(|i| {
                let a = fc_lower.values()[i];
                let lo = recip(a + df);
                let hi = recip(a) + dr;
                let v = frh.values()[i];
                if v < lo - slack(lo) {
                    lo - v
                } else if v > hi + slack(hi) {
                    v - hi
                } else {
                    0.0
                }
            })
            .fold(0.0, f64::max)
    } else {
        0.0
    };
    checks.push(mk("reciprocal", nonneg, recip_worst, df));

    let fp = f.pos_part();
    let (_, fpc) = check_with(&fp, ladder);
    let tol = ladder.step(&fp) + df;
    checks.push(mk("positive_part", true, within(fpc.values(), fc_lower.pos_part().values(), tol), tol));

    // a nonnegative function has a vanishing upper transform exactly when it
    // is positive on at most one node
    let positives = f.values().iter().filter(|&&v| v > 0.0).count();
    let spike_worst = if nonneg {
        let null = fh.values().iter().all(|&v| v == 0.0);
        if null == (positives <= 1) {
            0.0
        } else {
            1.0
        }
    } else {
        0.0
    };
    checks.push(mk("spike_null", nonneg, spike_worst, 0.0));

    // composition with an invertible Young function, on the positive part
    let (_, fph) = hat_with(&fp, ladder);
    let dp = ladder.step(&fp);
    let comp_worst = if phi.invertible() {
        let pf = fp.map(|v| phi.eval(v));
        let (_, pfh) = hat_with(&pf, ladder);
        let dphi = ladder.step(&pf);
        (0..d.len())
            .map(|i| {
                let b = fph.values()[i];
                let lo = phi.eval((b - dp).max(0.0));
                let hi = phi.eval(b) + dphi;
                let v = pfh.values()[i];
                if v < lo - slack(lo) {
                    lo - v
                } else if v > hi + slack(hi) {
                    v - hi
                } else {
                    0.0
                }
            })
            .fold(0.0, f64::max)
    } else {
        0.0
    };
    checks.push(mk("composition", phi.invertible(), comp_worst, dp));

    // norm domination on the positive part; the inflated transform absorbs
    // the lattice-count difference between a level set and a centered ball
    let lhs = luxemburg_norm(&fp, phi);
    let rhs = luxemburg_norm(&fph, phi);
    let inflated = hat_inflated(&fp, ladder, (d.dim() as f64).sqrt() * d.spacing());
    let rhs_inflated = luxemburg_norm(&inflated, phi);
    let tol = (rhs_inflated - rhs).max(0.0);
    let worst = if lhs <= rhs_inflated * (1.0 + 1e-9) { 0.0 } else { lhs - rhs_inflated };
    checks.push(mk("norm_domination", true, worst, tol));

    Ok(PropertyReport { checks })
}
