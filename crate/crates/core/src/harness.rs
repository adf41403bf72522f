//! Numerical verification of the integral inequalities between extremal
//! convolutions, their operands and the radial transforms.
//!
//! Operands are grid samples on `[-L, L]^N`, read as functions on the whole
//! space that are `+inf` outside the box (`0` for the nonnegative sup-min
//! operands). Convolutions and transforms of such functions live on
//! `[-2L, 2L]^N`, so every check lifts its operands onto the doubled grid
//! with the same spacing before computing; the discrete sides are then
//! those of an honest instance, up to lattice effects.
//!
//! Hamilton-Jacobi checks use the kernel `(tH)*` (or `h_[t]+`) cut off
//! outside the box. The cut kernel is itself `(tK)*` for a convex `K` with
//! the same value and hull at the origin, so the inequalities apply to it.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::conjugate::{legendre, max_slope, DualGrid};
use crate::error::{Error, Result};
use crate::extremal::{inf_conv, inf_max, sup_min};
use crate::gridfn::{
    fmt_sig, integrate, recip, sample, FunctionKind, FunctionSpec, GridDomain, GridFunction, OutsideMode,
};
use crate::hj::{is_convex, level_kernel, HamiltonianKind, HamiltonianSpec};
use crate::orlicz::{characteristic_norm, luxemburg_norm, YoungFunction};
use crate::par;
use crate::transform::{check_with, hat_with, Ladder, RadialProfile};

/// Default multiplier of the additive tolerance.
pub const DEFAULT_C_TOL: f64 = 4.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[allow(non_camel_case_types)]
pub enum InequalityId {
    L4_Eq12,
    L6_Eq16,
    T7_Eq19,
    C8_Eq20,
    T18_Eq29,
    T19_Eq33,
    T19_Eq34,
    C20_Eq35,
    L21_Eq36,
    L21_Eq37,
    T23_Eq38,
    HL_Eq42,
    HL_Eq43,
    HF_Eq47,
    HF_Eq48,
    LS_Eq52,
    LS_Eq53,
}

use InequalityId::*;

impl InequalityId {
    pub const ALL: [InequalityId; 17] = [
        L4_Eq12, L6_Eq16, T7_Eq19, C8_Eq20, T18_Eq29, T19_Eq33, T19_Eq34, C20_Eq35, L21_Eq36, L21_Eq37, T23_Eq38,
        HL_Eq42, HL_Eq43, HF_Eq47, HF_Eq48, LS_Eq52, LS_Eq53,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            L4_Eq12 => "L4_Eq12",
            L6_Eq16 => "L6_Eq16",
            T7_Eq19 => "T7_Eq19",
            C8_Eq20 => "C8_Eq20",
            T18_Eq29 => "T18_Eq29",
            T19_Eq33 => "T19_Eq33",
            T19_Eq34 => "T19_Eq34",
            C20_Eq35 => "C20_Eq35",
            L21_Eq36 => "L21_Eq36",
            L21_Eq37 => "L21_Eq37",
            T23_Eq38 => "T23_Eq38",
            HL_Eq42 => "HL_Eq42",
            HL_Eq43 => "HL_Eq43",
            HF_Eq47 => "HF_Eq47",
            HF_Eq48 => "HF_Eq48",
            LS_Eq52 => "LS_Eq52",
            LS_Eq53 => "LS_Eq53",
        }
    }

    /// The constant multiplying the right-hand side in dimension `dim`.
    pub fn constant(self, dim: usize) -> f64 {
        let two_pow = |k: i32| 2f64.powi(k);
        let n = dim as i32;
        match self {
            L4_Eq12 | L6_Eq16 => 1.0,
            T7_Eq19 | C8_Eq20 => 4.0,
            T18_Eq29 | T19_Eq33 | T19_Eq34 => two_pow(n - 1),
            // the inf-convolution bound with f = (tH)* picks up a factor 2 from
            // the shift m_{f,g} = -(tH(0) + m_g) / 2
            C20_Eq35 | HL_Eq43 | HF_Eq48 => two_pow(n),
            L21_Eq36 | L21_Eq37 | T23_Eq38 | HL_Eq42 | HF_Eq47 | LS_Eq52 => 2.0,
            LS_Eq53 => two_pow(n + 1),
        }
    }

    /// Discretization layers between the inputs and the compared sides.
    pub fn layers(self) -> f64 {
        match self {
            L4_Eq12 => 1.0,
            L6_Eq16 | T7_Eq19 | C8_Eq20 | L21_Eq36 | L21_Eq37 | T23_Eq38 | LS_Eq52 => 2.0,
            T18_Eq29 | T19_Eq33 | T19_Eq34 | C20_Eq35 | HL_Eq42 | HF_Eq47 | LS_Eq53 => 3.0,
            HL_Eq43 | HF_Eq48 => 4.0,
        }
    }

    /// Generator profile whose output meets this id's hypotheses.
    pub fn profile(self) -> Profile {
        match self {
            L4_Eq12 | L6_Eq16 | T18_Eq29 => Profile::BoundedPair,
            C8_Eq20 | C20_Eq35 | LS_Eq52 | LS_Eq53 => Profile::NonnegPair,
            _ => Profile::CoerciveConvex,
        }
    }

    fn hamilton_jacobi(self) -> bool {
        matches!(self, HL_Eq42 | HL_Eq43 | HF_Eq47 | HF_Eq48 | LS_Eq52 | LS_Eq53)
    }
}

impl fmt::Display for InequalityId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for InequalityId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .iter()
            .copied()
            .find(|id| id.as_str().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::InvalidSpec(format!("unknown inequality id {s}")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Profile {
    CoerciveConvex,
    BoundedPair,
    NonnegPair,
}

impl FromStr for Profile {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "coercive_convex" => Ok(Profile::CoerciveConvex),
            "bounded_pair" => Ok(Profile::BoundedPair),
            "nonneg_pair" => Ok(Profile::NonnegPair),
            _ => Err(Error::InvalidSpec(format!("unknown profile {s}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Checked,
    /// `rhs = +inf`.
    Vacuous,
    HypothesisNotMet,
}

/// `f >= c |x|^alpha` for `|x|` large.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Growth {
    pub c: f64,
    pub alpha: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct InequalityReport {
    pub id: InequalityId,
    pub status: Status,
    pub lhs: f64,
    pub rhs: f64,
    pub margin: f64,
    pub tolerance: f64,
    pub pass: bool,
    /// `lhs = +inf` against a finite `rhs`.
    pub needs_review: bool,
    pub m_fg: Option<f64>,
    pub z: Option<f64>,
    pub constant: f64,
    pub inputs: Vec<String>,
    pub note: Option<String>,
}

impl InequalityReport {
    fn not_met(id: InequalityId, constant: f64, inputs: Vec<String>, why: impl Into<String>) -> Self {
        InequalityReport {
            id,
            status: Status::HypothesisNotMet,
            lhs: f64::NAN,
            rhs: f64::NAN,
            margin: f64::NAN,
            tolerance: 0.0,
            pass: false,
            needs_review: false,
            m_fg: None,
            z: None,
            constant,
            inputs,
            note: Some(why.into()),
        }
    }

    /// `max(0, lhs - rhs)`.
    pub fn deficit(&self) -> f64 {
        if self.status == Status::Checked {
            (self.lhs - self.rhs).max(0.0)
        } else {
            0.0
        }
    }

    pub fn is_failure(&self) -> bool {
        self.status == Status::Checked && !self.pass
    }

    pub fn to_json(&self) -> serde_json::Value {
        let opt = |v: Option<f64>| v.map(fmt_sig);
        serde_json::json!({
            "id": self.id.as_str(),
            "status": self.status,
            "lhs": fmt_sig(self.lhs),
            "rhs": fmt_sig(self.rhs),
            "margin": fmt_sig(self.margin),
            "tolerance": fmt_sig(self.tolerance),
            "pass": self.pass,
            "needs_review": self.needs_review,
            "m_fg": opt(self.m_fg),
            "z": opt(self.z),
            "constant": fmt_sig(self.constant),
            "inputs": self.inputs,
            "note": self.note,
        })
    }
}

/// Id-specific parameters; unused fields are ignored.
#[derive(Debug, Clone, PartialEq)]
pub struct CheckParams {
    pub t: f64,
    pub hamiltonian: Option<HamiltonianSpec>,
    /// Shift for `T19_Eq34` and the `L21` ids; `None` picks defaults.
    pub z: Option<f64>,
    pub growth: Option<Growth>,
    pub ladder: Ladder,
    pub c_tol: f64,
    /// Replaces the id's constant (self-test).
    pub constant: Option<f64>,
}

impl Default for CheckParams {
    fn default() -> Self {
        CheckParams {
            t: 1.0,
            hamiltonian: None,
            z: None,
            growth: None,
            ladder: Ladder::default(),
            c_tol: DEFAULT_C_TOL,
            constant: None,
        }
    }
}

/// FNV-1a over the grid shape and value bits.
pub fn fingerprint(f: &GridFunction) -> String {
    let d = f.domain();
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    let mut eat = |x: u64| {
        for b in x.to_le_bytes() {
            h ^= b as u64;
            h = h.wrapping_mul(0x0100_0000_01b3);
        }
    };
    eat(d.dim() as u64);
    eat(d.points_per_axis() as u64);
    eat(d.half_width().to_bits());
    for v in f.values() {
        eat(v.to_bits());
    }
    format!("{h:016x}")
}

/// Grid with the same spacing and twice the half width.
pub fn doubled(d: &GridDomain) -> Result<GridDomain> {
    GridDomain::new(d.dim(), 2.0 * d.half_width(), 2 * d.points_per_axis() - 1)
}

/// `f` on the doubled grid, `fill` elsewhere.
pub fn lift(f: &GridFunction, fill: f64) -> Result<GridFunction> {
    let d = f.domain();
    let big = doubled(d)?;
    let off = d.mid();
    let mut v = vec![fill; big.len()];
    for (i, &x) in f.values().iter().enumerate() {
        let ix = d.multi_index(i);
        v[big.flat_index(&[ix[0] + off, ix[1] + off, ix[2] + off])] = x;
    }
    let mode = if fill == f64::NEG_INFINITY { OutsideMode::MinusInfinity } else { OutsideMode::PlusInfinity };
    GridFunction::new(big, v, mode)
}

/// Volume of the unit ball.
pub fn unit_ball_volume(dim: usize) -> f64 {
    match dim {
        1 => 2.0,
        2 => std::f64::consts::PI,
        3 => 4.0 * std::f64::consts::PI / 3.0,
        _ => {
            let n = dim as f64;
            std::f64::consts::PI.powf(n / 2.0) / gamma_half_int(dim + 2)
        }
    }
}

// Gamma(k / 2) for integer k >= 1.
fn gamma_half_int(k: usize) -> f64 {
    match k {
        1 => std::f64::consts::PI.sqrt(),
        2 => 1.0,
        _ => (k as f64 / 2.0 - 1.0) * gamma_half_int(k - 2),
    }
}

/// Norm of the indicator of a set of measure `mu`, for any Young function.
pub fn indicator_norm(phi: &YoungFunction, mu: f64) -> f64 {
    if mu <= 0.0 {
        return 0.0;
    }
    bisect_norm(|r| mu * phi.eval(1.0 / r), 1.0)
}

/// `inf{r > 0 : modular(r) <= 1}` for a nonincreasing modular.
fn bisect_norm(modular: impl Fn(f64) -> f64, guess: f64) -> f64 {
    let (mut lo, mut hi) = (guess, guess);
    let mut k = 0;
    while modular(hi) > 1.0 {
        hi *= 2.0;
        k += 1;
        if k > 2000 {
            return f64::INFINITY;
        }
    }
    k = 0;
    while modular(lo) <= 1.0 {
        lo /= 2.0;
        k += 1;
        if k > 2000 {
            return 0.0;
        }
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if modular(mid) <= 1.0 {
            hi = mid;
        } else {
            lo = mid;
        }
        if hi - lo <= 1e-12 * hi {
            break;
        }
    }
    hi
}

// Composite Simpson rule for `int_a^b f(s) ds` in the variable `ln s`.
fn simpson_log(f: impl Fn(f64) -> f64, a: f64, b: f64, panels: usize) -> f64 {
    if b <= a {
        return 0.0;
    }
    let (la, lb) = (a.ln(), b.ln());
    let n = 2 * panels;
    let w = (lb - la) / n as f64;
    let g = |k: usize| {
        let s = (la + k as f64 * w).exp();
        f(s) * s
    };
    let mut acc = g(0) + g(n);
    for k in 1..n {
        acc += if k % 2 == 1 { 4.0 } else { 2.0 } * g(k);
    }
    acc * w / 3.0
}

/// `|| (c|x|^alpha)^{-1} ||_phi` over `|x| > radius` in `R^dim`.
pub fn power_tail_norm(phi: &YoungFunction, c: f64, alpha: f64, radius: f64, dim: usize) -> f64 {
    let n = dim as f64;
    let area = n * unit_ball_volume(dim);
    // int_{s0}^inf s^{N-1-a p} ds, the tail where phi is a pure power
    let power_tail = |p: f64, s0: f64| {
        if alpha * p <= n {
            f64::INFINITY
        } else {
            area * s0.powf(n - alpha * p) / (alpha * p - n)
        }
    };
    match phi {
        YoungFunction::Power { p } => (power_tail(*p, radius)).powf(1.0 / p) / c,
        YoungFunction::IndicatorUnit => 1.0 / (c * radius.powf(alpha)),
        _ => {
            let modular = |r: f64| {
                let tau = |s: f64| 1.0 / (r * c * s.powf(alpha));
                let s_unit = (1.0 / (r * c)).powf(1.0 / alpha);
                let split = s_unit.max(radius);
                let near = simpson_log(|s| phi.eval(tau(s)) * area * s.powf(n - 1.0), radius, split, 2000);
                let far = match phi {
                    YoungFunction::OnePlus { p } => power_tail(*p, split) * (r * c).powf(-p),
                    YoungFunction::OneInf => 0.0,
                    _ => simpson_log(|s| phi.eval(tau(s)) * area * s.powf(n - 1.0), split, split * 1e12, 4000),
                };
                near + far
            };
            bisect_norm(modular, 1.0 / (c * radius.powf(alpha)))
        }
    }
}

fn nonneg_recip(v: f64) -> f64 {
    recip(v.max(0.0))
}

/// `(a f + b)^{-1}`, with negative rounding residue clamped to 0.
fn recip_affine(f: &GridFunction, a: f64, b: f64) -> GridFunction {
    f.map(move |v| if v == f64::INFINITY { 0.0 } else { nonneg_recip(a * v + b) })
}

fn finite_min(f: &GridFunction) -> Option<f64> {
    let m = f.min();
    (m.is_finite()).then_some(m)
}

fn lower_transform(f: &GridFunction, ladder: &Ladder) -> Result<(RadialProfile, GridFunction)> {
    Ok(check_with(&lift(f, f64::INFINITY)?, ladder))
}

/// Upper transform of `f >= 0` extended by zero.
fn upper_transform_nonneg(f: &GridFunction, ladder: &Ladder) -> Result<GridFunction> {
    Ok(hat_with(&lift(f, f64::NEG_INFINITY)?, ladder).1.pos_part())
}

/// Sup-min of nonnegative operands extended by zero.
fn sup_min_nonneg(f: &GridFunction, g: &GridFunction) -> Result<GridFunction> {
    Ok(sup_min(&lift(f, f64::NEG_INFINITY)?, &lift(g, f64::NEG_INFINITY)?)?.pos_part())
}

fn lifted_inf_conv(f: &GridFunction, g: &GridFunction) -> Result<GridFunction> {
    inf_conv(&lift(f, f64::INFINITY)?, &lift(g, f64::INFINITY)?)
}

fn lifted_inf_max(f: &GridFunction, g: &GridFunction) -> Result<GridFunction> {
    inf_max(&lift(f, f64::INFINITY)?, &lift(g, f64::INFINITY)?)
}

/// Hopf solution `(tK + g*)*` on the doubled grid for the cut kernel
/// `k = (tK)*`, restricted to the domain of `k □ g`.
fn lifted_hopf(k: &GridFunction, g: &GridFunction) -> Result<GridFunction> {
    let (kl, gl) = (lift(k, f64::INFINITY)?, lift(g, f64::INFINITY)?);
    let slope = max_slope(&kl).max(max_slope(&gl)).max(1.0) * 1.25;
    let dual = DualGrid::new(k.domain().dim(), slope, k.domain().points_per_axis())?;
    let sum = legendre(&kl, &dual)?.add(&legendre(&gl, &dual)?)?;
    let u = legendre(&sum, &DualGrid::on(kl.domain()))?;
    let lax = inf_conv(&kl, &gl)?;
    u.zip_map(&lax, |a, b| if b == f64::INFINITY { b } else { a })
}

fn growth_radius(f: &GridFunction, gr: Growth, floor: f64) -> f64 {
    let d = f.domain();
    let mut r0 = 0.0f64;
    for (i, &v) in f.values().iter().enumerate() {
        let s = d.norm_at(i);
        let h = gr.c * s.powf(gr.alpha);
        if v < h || h < floor {
            r0 = r0.max(s);
        }
    }
    (r0 * (1.0 + 1e-9)).max(d.spacing())
}

/// Smallest radius beyond which a nondecreasing radial profile dominates
/// `c s^alpha` and `c s^alpha >= floor`.
fn profile_growth_radius(p: &RadialProfile, gr: Growth, floor: f64, min_radius: f64) -> f64 {
    let bps = &p.breakpoints;
    let mut r = 0.0f64;
    for (k, &(start, v)) in bps.iter().enumerate() {
        let end = bps.get(k + 1).map_or(f64::INFINITY, |b| b.0);
        if end.is_infinite() {
            // the last step extends forever
            if v < f64::INFINITY {
                return f64::INFINITY;
            }
        } else if v < gr.c * end.powf(gr.alpha) {
            r = r.max(end);
        }
        let _ = start;
    }
    let floor_r = if floor > 0.0 { (floor / gr.c).powf(1.0 / gr.alpha) } else { 0.0 };
    r.max(floor_r).max(min_radius)
}

/// Check one inequality. Hypotheses are tested first; a violated hypothesis
/// gives a `HypothesisNotMet` report.
pub fn check_inequality(
    id: InequalityId,
    f: &GridFunction,
    g: &GridFunction,
    phi: &YoungFunction,
    params: &CheckParams,
) -> Result<InequalityReport> {
    f.same_domain(g)?;
    phi.validate()?;
    let d = *f.domain();
    let dim = d.dim();
    let c = params.constant.unwrap_or_else(|| id.constant(dim));
    let inputs = vec![fingerprint(f), fingerprint(g)];
    let nrm = |h: &GridFunction| luxemburg_norm(h, phi);
    let ladder = &params.ladder;
    let not_met = |why: &str| Ok(InequalityReport::not_met(id, c, inputs.clone(), why));
    let nonneg = |h: &GridFunction| h.values().iter().all(|&v| v >= 0.0);
    let all_inf = |h: &GridFunction| h.values().iter().all(|&v| v == f64::INFINITY);

    let mut m_fg = None;
    let mut z_used = None;
    let mut note = None;
    let (lhs, rhs) = match id {
        L4_Eq12 | L6_Eq16 => {
            if !nonneg(f) || !nonneg(g) {
                return not_met("operands must be nonnegative");
            }
            if f.max() != g.max() {
                return not_met("suprema differ");
            }
            let s = sup_min_nonneg(f, g)?;
            if id == L4_Eq12 {
                let total = |h: &GridFunction| integrate(h).map(|v| v.value());
                (total(f)? + total(g)?, c * total(&s)?)
            } else {
                (nrm(f).max(nrm(g)), c * nrm(&s))
            }
        }
        T7_Eq19 | T19_Eq33 | T19_Eq34 => {
            let (Some(mf), Some(mg)) = (finite_min(f), finite_min(g)) else {
                return not_met("infima must be finite");
            };
            if mf + mg < 0.0 {
                return not_met("sum of infima is negative");
            }
            let m = (mf - mg) / 2.0;
            m_fg = Some(m);
            let conv = lifted_inf_conv(f, g)?;
            match id {
                T7_Eq19 => (nrm(&recip_affine(f, 1.0, -m)) + nrm(&recip_affine(g, 1.0, m)), c * nrm(&conv.recip())),
                T19_Eq33 => {
                    let (_, fc) = lower_transform(f, ladder)?;
                    let (_, gc) = lower_transform(g, ladder)?;
                    (nrm(&conv.recip()), c * (nrm(&recip_affine(&fc, 1.0, -m)) + nrm(&recip_affine(&gc, 1.0, m))))
                }
                _ => {
                    let zs = match params.z {
                        Some(z) if z < -mg || z > mf => return not_met("shift outside [-m_g, m_f]"),
                        Some(z) => vec![z],
                        None => vec![-mg, m, mf],
                    };
                    let (_, fc) = lower_transform(f, ladder)?;
                    let (_, gc) = lower_transform(g, ladder)?;
                    let lhs = nrm(&conv.recip());
                    let mut best: Option<(f64, f64)> = None;
                    for z in zs {
                        let r = c * (nrm(&recip_affine(&fc, 1.0, -z)) + nrm(&recip_affine(&gc, 1.0, z)));
                        if best.is_none_or(|(_, br)| r < br) {
                            best = Some((z, r));
                        }
                    }
                    let (z, r) = best.expect("at least one shift");
                    z_used = Some(z);
                    (lhs, r)
                }
            }
        }
        C8_Eq20 | C20_Eq35 => {
            if !nonneg(g) {
                return not_met("g must be nonnegative");
            }
            if all_inf(f) || all_inf(g) {
                return not_met("operand identically +inf");
            }
            let fp = f.pos_part();
            let m = (fp.min() - g.min()) / 2.0;
            m_fg = Some(m);
            let im = lifted_inf_max(f, g)?;
            if id == C8_Eq20 {
                (nrm(&recip_affine(&fp, 1.0, -m)) + nrm(&recip_affine(g, 1.0, m)), c * nrm(&im.recip()))
            } else {
                let (_, fc) = lower_transform(&fp, ladder)?;
                let (_, gc) = lower_transform(g, ladder)?;
                (nrm(&im.recip()), c * (nrm(&recip_affine(&fc, 1.0, -m)) + nrm(&recip_affine(&gc, 1.0, m))))
            }
        }
        T18_Eq29 => {
            if !nonneg(f) || !nonneg(g) {
                return not_met("operands must be nonnegative");
            }
            let s = sup_min_nonneg(f, g)?;
            let (fh, gh) = (upper_transform_nonneg(f, ladder)?, upper_transform_nonneg(g, ladder)?);
            (nrm(&s), c * (nrm(&fh) + nrm(&gh)))
        }
        L21_Eq36 | L21_Eq37 => {
            let Some(mf) = finite_min(f) else {
                return not_met("f must be bounded below");
            };
            let Some(gr) = params.growth.filter(|g| g.c > 0.0 && g.alpha > 0.0) else {
                return not_met("no power growth bound supplied");
            };
            if id == L21_Eq37 && !phi.invertible() {
                return not_met("Young function is not invertible");
            }
            let z = params.z.unwrap_or(mf - 0.5 * (1.0 + mf.abs()));
            if z >= mf {
                return not_met("shift must lie below m_f");
            }
            z_used = Some(z);
            let radius = growth_radius(f, gr, 2.0 * z);
            let mu = unit_ball_volume(dim) * radius.powi(dim as i32);
            let ball = if id == L21_Eq36 { indicator_norm(phi, mu) } else { characteristic_norm(phi, mu)? };
            let (_, fc) = lower_transform(f, ladder)?;
            note = Some(format!("ball radius {}", fmt_sig(radius)));
            (nrm(&recip_affine(&fc, 1.0, -z)), c * power_tail_norm(phi, gr.c, gr.alpha, radius, dim) + ball / (mf - z))
        }
        T23_Eq38 => {
            let p = match phi {
                YoungFunction::Power { p } if *p >= 1.0 => *p,
                YoungFunction::IndicatorUnit => f64::INFINITY,
                _ => return not_met("needs an L^p norm with p >= 1"),
            };
            let (Some(mf), Some(mg)) = (finite_min(f), finite_min(g)) else {
                return not_met("infima must be finite");
            };
            if mf < 0.0 || (mf == 0.0 && mg <= 0.0) {
                return not_met("needs m_f >= 0, and m_g > 0 when m_f = 0");
            }
            let Some(gr) = params.growth.filter(|g| g.c > 0.0 && g.alpha > dim as f64 / p) else {
                return not_met("growth exponent must exceed N/p");
            };
            let t = params.t;
            if !(t >= 1.0 && t.is_finite()) || t * mf + mg <= 0.0 {
                return not_met("needs t >= 1 and t m_f + m_g > 0");
            }
            let (prof, _) = lower_transform(f, ladder)?;
            let radius = profile_growth_radius(&prof, gr, mf + mg.abs(), d.spacing());
            if radius.is_infinite() {
                return not_met("transform does not dominate the growth bound");
            }
            let m = (t * mf - mg) / 2.0;
            m_fg = Some(m);
            let big = doubled(&d)?;
            let dt = GridDomain::new(dim, big.half_width() * t, big.points_per_axis())?;
            let ft = GridFunction::from_fn(dt, OutsideMode::PlusInfinity, |x| {
                let r = x[..dim].iter().map(|v| v * v).sum::<f64>().sqrt();
                let v = prof.eval(r / t);
                if v.is_infinite() { v } else { t * v }
            });
            let n = dim as f64;
            let (scale, ball) = if p.is_infinite() {
                (1.0 / t, 1.0)
            } else {
                (t.powf(-1.0 + n / p), t.powf(n / p) * (unit_ball_volume(dim) * radius.powi(dim as i32)).powf(1.0 / p))
            };
            note = Some(format!("ball radius {}", fmt_sig(radius)));
            (
                nrm(&recip_affine(&ft, 1.0, -m)),
                c * scale * power_tail_norm(phi, gr.c, gr.alpha, radius, dim) + 2.0 * ball / (t * mf + mg),
            )
        }
        HL_Eq42 | HL_Eq43 | HF_Eq47 | HF_Eq48 => {
            let Some(h) = params.hamiltonian.as_ref() else {
                return not_met("no Hamiltonian supplied");
            };
            if h.level_dependent() || !h.convex_in_x {
                return not_met("needs a convex value-independent Hamiltonian");
            }
            let t = params.t;
            if !(t > 0.0 && t.is_finite()) {
                return Err(Error::NonPositiveTime(t));
            }
            let Some(mg) = finite_min(g) else {
                return not_met("g must be bounded below");
            };
            let hopf = matches!(id, HF_Eq47 | HF_Eq48);
            if hopf && !is_convex(g) {
                return not_met("Hopf formula needs convex data");
            }
            let a0 = t * if id == HF_Eq48 { h.at_origin(dim)? } else { h.hull_at_origin(dim)? };
            let gate = -t * if hopf { h.at_origin(dim)? } else { h.hull_at_origin(dim)? } + mg;
            if gate < 0.0 {
                return not_met("sign condition on the data fails");
            }
            let k = h.scaled_conjugate_on(t, &d)?;
            let u = if hopf { lifted_hopf(&k, g)? } else { lifted_inf_conv(&k, g)? };
            if matches!(id, HL_Eq42 | HF_Eq47) {
                (nrm(&recip_affine(&k, 2.0, a0 + mg)) + nrm(&recip_affine(g, 2.0, -a0 - mg)), c * nrm(&u.recip()))
            } else {
                let (_, kc) = lower_transform(&k, ladder)?;
                let (_, gc) = lower_transform(g, ladder)?;
                (nrm(&u.recip()), c * (nrm(&recip_affine(&kc, 2.0, a0 + mg)) + nrm(&recip_affine(&gc, 2.0, -a0 - mg))))
            }
        }
        LS_Eq52 | LS_Eq53 => {
            let Some(h) = params.hamiltonian.as_ref() else {
                return not_met("no Hamiltonian supplied");
            };
            if !h.level_dependent() {
                return not_met("needs a value-dependent Hamiltonian");
            }
            if !nonneg(g) {
                return not_met("g must be nonnegative");
            }
            let t = params.t;
            if !(t > 0.0 && t.is_finite()) {
                return Err(Error::NonPositiveTime(t));
            }
            let mg = g.min();
            let k = level_kernel(h, &d, t)?;
            let u = lifted_inf_max(&k, g)?;
            m_fg = Some(-mg / 2.0);
            if id == LS_Eq52 {
                (nrm(&recip_affine(&k, 2.0, mg)) + nrm(&recip_affine(g, 2.0, -mg)), c * nrm(&u.recip()))
            } else {
                let (_, kc) = lower_transform(&k, ladder)?;
                let (_, gc) = lower_transform(g, ladder)?;
                (nrm(&u.recip()), c * (nrm(&recip_affine(&kc, 2.0, mg)) + nrm(&recip_affine(&gc, 2.0, -mg))))
            }
        }
    };
    if lhs.is_nan() || rhs.is_nan() {
        return Err(Error::NotANumber);
    }
    let scale = [lhs, rhs].into_iter().filter(|v| v.is_finite()).fold(0.0f64, |a, v| a.max(v.abs()));
    let tolerance = params.c_tol * d.spacing() * scale * id.layers();
    let (status, pass, needs_review) = if rhs == f64::INFINITY {
        (Status::Vacuous, true, false)
    } else {
        (Status::Checked, lhs <= rhs + tolerance, lhs == f64::INFINITY)
    };
    Ok(InequalityReport {
        id,
        status,
        lhs,
        rhs,
        margin: rhs - lhs,
        tolerance,
        pass,
        needs_review,
        m_fg,
        z: z_used,
        constant: c,
        inputs,
        note,
    })
}

/// A generated operand pair with its catalog descriptions.
#[derive(Debug, Clone, PartialEq)]
pub struct Instance {
    pub seed: u64,
    pub profile: Profile,
    pub f: GridFunction,
    pub g: GridFunction,
    pub f_spec: FunctionSpec,
    pub g_spec: FunctionSpec,
    /// Valid for `f` outside some ball.
    pub growth: Option<Growth>,
}

fn power_spec(c: f64, alpha: f64, center: Vec<f64>) -> FunctionSpec {
    FunctionSpec::new(FunctionKind::Power { c, alpha, center })
}

fn gaussian_spec(height: f64, width: f64, center: Vec<f64>) -> FunctionSpec {
    FunctionSpec::new(FunctionKind::Gaussian { height, width, center })
}

/// Reproducible operand pair on `domain`.
pub fn random_instance(seed: u64, profile: Profile, domain: &GridDomain) -> Result<Instance> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let dim = domain.dim();
    let l = domain.half_width();
    let point = |rng: &mut ChaCha8Rng, reach: f64| -> Vec<f64> { (0..dim).map(|_| rng.gen_range(-reach..=reach)).collect() };
    let inf = OutsideMode::PlusInfinity;
    match profile {
        Profile::CoerciveConvex | Profile::NonnegPair => {
            let lo = (dim as f64).max(1.5) + 0.25;
            let alpha = rng.gen_range(lo..lo + 1.5);
            let cf = rng.gen_range(0.5..1.5);
            let bump = gaussian_spec(rng.gen_range(0.0..1.0), rng.gen_range(0.2..0.6), point(&mut rng, l / 2.0));
            let f_off = if profile == Profile::NonnegPair { -rng.gen_range(0.0..1.0) } else { rng.gen_range(-0.5..1.0) };
            let f_spec =
                FunctionSpec::new(FunctionKind::Sum { terms: vec![power_spec(cf, alpha, vec![]), bump] }).with_offset(f_off);
            let f = sample(&f_spec, domain, inf)?;
            let ag = rng.gen_range(1.5..3.0);
            let cg = rng.gen_range(0.5..1.5);
            let raw = power_spec(cg, ag, point(&mut rng, l / 4.0));
            let raw_min = sample(&raw, domain, inf)?.min();
            let g_off = if profile == Profile::NonnegPair {
                rng.gen_range(0.1..1.0) - raw_min
            } else {
                rng.gen_range(0.05..1.0) - f.min() - raw_min
            };
            let g_spec = raw.with_offset(g_off);
            let g = sample(&g_spec, domain, inf)?;
            Ok(Instance { seed, profile, f, g, f_spec, g_spec, growth: Some(Growth { c: cf, alpha }) })
        }
        Profile::BoundedPair => {
            let mut pair = || {
                let terms: Vec<FunctionSpec> = (0..rng.gen_range(1..=2))
                    .map(|_| gaussian_spec(rng.gen_range(0.5..2.0), rng.gen_range(0.2..0.6), point(&mut rng, l / 2.0)))
                    .collect();
                FunctionSpec::new(FunctionKind::Sum { terms })
            };
            let f_spec = pair();
            let g_raw = pair();
            let f = sample(&f_spec, domain, inf)?;
            let g0 = sample(&g_raw, domain, inf)?;
            let ratio = f.max() / g0.max();
            let g_spec = match g_raw.kind {
                FunctionKind::Sum { terms } => FunctionSpec::new(FunctionKind::Sum {
                    terms: terms
                        .into_iter()
                        .map(|t| match t.kind {
                            FunctionKind::Gaussian { height, width, center } => gaussian_spec(height * ratio, width, center),
                            _ => t,
                        })
                        .collect(),
                }),
                _ => unreachable!("built as a sum"),
            };
            // pin the maxima to the same bits
            let mut gv = sample(&g_spec, domain, inf)?.into_values();
            let top = gv.iter().copied().enumerate().fold((0, f64::NEG_INFINITY), |a, (i, v)| if v > a.1 { (i, v) } else { a }).0;
            gv[top] = f.max();
            let g = GridFunction::new(*domain, gv, inf)?;
            Ok(Instance { seed, profile, f, g, f_spec, g_spec, growth: None })
        }
    }
}

/// An instance and parameters meeting the hypotheses of `id`.
pub fn instance_for(id: InequalityId, seed: u64, domain: &GridDomain) -> Result<(Instance, CheckParams, YoungFunction)> {
    let mut inst = random_instance(seed, id.profile(), domain)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x9e37_79b9_7f4a_7c15 ^ (id as u64) << 32);
    let mut params = CheckParams { growth: inst.growth, ..CheckParams::default() };
    let general = [
        YoungFunction::Power { p: 1.0 },
        YoungFunction::Power { p: 2.0 },
        YoungFunction::OnePlus { p: 2.0 },
        YoungFunction::IndicatorUnit,
        YoungFunction::OneInf,
    ];
    let phi = match id {
        T23_Eq38 => [YoungFunction::Power { p: 1.0 }, YoungFunction::Power { p: 2.0 }, YoungFunction::IndicatorUnit]
            [rng.gen_range(0..3)]
        .clone(),
        L21_Eq37 => [YoungFunction::Power { p: 1.0 }, YoungFunction::Power { p: 2.0 }, YoungFunction::OnePlus { p: 2.0 }]
            [rng.gen_range(0..3)]
        .clone(),
        _ => general[rng.gen_range(0..general.len())].clone(),
    };
    if id.hamilton_jacobi() {
        // data with m_g > 0
        let shift = rng.gen_range(0.05..1.0) - inst.g.min();
        inst.g = inst.g.add_const(shift);
        inst.g_spec.offset += shift;
        params.t = rng.gen_range(0.25..1.5);
        params.hamiltonian = Some(HamiltonianSpec::new(match id {
            LS_Eq52 | LS_Eq53 => {
                if rng.gen_bool(0.7) {
                    HamiltonianKind::LevelPowerAbs { alpha: rng.gen_range(0.5..2.0) }
                } else {
                    HamiltonianKind::LevelExpAbs
                }
            }
            _ => match rng.gen_range(0..3) {
                0 => HamiltonianKind::QuadraticHalf,
                1 => HamiltonianKind::Norm,
                _ => HamiltonianKind::PowerGrowth { d: rng.gen_range(0.3..1.0), alpha_prime: rng.gen_range(1.5..3.0) },
            },
        }));
    }
    if id == T23_Eq38 {
        // m_f and m_g both positive
        let (sf, sg) = (rng.gen_range(0.05..1.0) - inst.f.min(), rng.gen_range(0.05..1.0) - inst.g.min());
        inst.f = inst.f.add_const(sf);
        inst.f_spec.offset += sf;
        inst.g = inst.g.add_const(sg);
        inst.g_spec.offset += sg;
        params.t = rng.gen_range(1.0..2.0);
    }
    if matches!(id, L21_Eq36 | L21_Eq37) {
        params.z = Some(inst.f.min() - rng.gen_range(0.1..1.0));
    }
    Ok((inst, params, phi))
}

#[derive(Debug, Clone, PartialEq)]
pub struct CampaignConfig {
    pub ids: Vec<InequalityId>,
    pub trials: usize,
    pub first_seed: u64,
    pub dim: usize,
    pub half_width: f64,
    pub points_per_axis: usize,
    pub c_tol: f64,
    /// Overrides the per-id Young function.
    pub phi: Option<YoungFunction>,
}

impl CampaignConfig {
    pub fn new(dim: usize, half_width: f64, points_per_axis: usize, trials: usize) -> Self {
        CampaignConfig {
            ids: InequalityId::ALL.to_vec(),
            trials,
            first_seed: 1,
            dim,
            half_width,
            points_per_axis,
            c_tol: DEFAULT_C_TOL,
            phi: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CampaignSummary {
    pub rows: Vec<InequalityReport>,
    pub passes: usize,
    pub vacuous: usize,
    pub hypothesis_not_met: usize,
    pub failures: usize,
    pub errors: Vec<String>,
    /// Largest finite `lhs / rhs` per id, as evidence on the constants.
    pub max_ratio: BTreeMap<InequalityId, f64>,
}

impl CampaignSummary {
    pub fn exit_code(&self) -> i32 {
        if self.failures == 0 && self.errors.is_empty() { 0 } else { 1 }
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "passes": self.passes,
            "vacuous": self.vacuous,
            "hypothesis_not_met": self.hypothesis_not_met,
            "failures": self.failures,
            "errors": self.errors,
            "max_ratio": self.max_ratio.iter().map(|(k, v)| (k.as_str().to_string(), fmt_sig(*v))).collect::<BTreeMap<_, _>>(),
            "rows": self.rows.iter().map(InequalityReport::to_json).collect::<Vec<_>>(),
        })
    }
}

/// Run every `(id, seed)` pair; trials run in parallel.
pub fn campaign(cfg: &CampaignConfig) -> Result<CampaignSummary> {
    if cfg.trials == 0 {
        return Err(Error::InvalidSpec("trials must be at least 1".into()));
    }
    let domain = GridDomain::new(cfg.dim, cfg.half_width, cfg.points_per_axis)?;
    let jobs: Vec<(InequalityId, u64)> = cfg
        .ids
        .iter()
        .flat_map(|&id| (0..cfg.trials as u64).map(move |k| (id, cfg.first_seed + k)))
        .collect();
    let results = par::map_slice(&jobs, |&(id, seed)| {
        let (inst, mut params, phi) = instance_for(id, seed, &domain)?;
        params.c_tol = cfg.c_tol;
        let phi = cfg.phi.clone().unwrap_or(phi);
        check_inequality(id, &inst.f, &inst.g, &phi, &params)
    });
    let mut s = CampaignSummary {
        rows: Vec::new(),
        passes: 0,
        vacuous: 0,
        hypothesis_not_met: 0,
        failures: 0,
        errors: Vec::new(),
        max_ratio: BTreeMap::new(),
    };
    for ((id, seed), r) in jobs.into_iter().zip(results) {
        match r {
            Ok(rep) => {
                match rep.status {
                    Status::HypothesisNotMet => s.hypothesis_not_met += 1,
                    Status::Vacuous => s.vacuous += 1,
                    Status::Checked if rep.pass => s.passes += 1,
                    Status::Checked => s.failures += 1,
                }
                if rep.status == Status::Checked && rep.rhs > 0.0 && rep.lhs.is_finite() {
                    let e = s.max_ratio.entry(id).or_insert(0.0);
                    *e = e.max(rep.lhs / rep.rhs);
                }
                s.rows.push(rep);
            }
            Err(e) => s.errors.push(format!("{id} seed {seed}: {e}")),
        }
    }
    Ok(s)
}

/// The sharp constant-function case, checked with the true constant and
/// with a weakened one.
#[derive(Debug, Clone, PartialEq)]
pub struct SelftestReport {
    pub control: InequalityReport,
    pub weakened: InequalityReport,
}

impl SelftestReport {
    /// The true constant passes and the weakened one is caught.
    pub fn ok(&self) -> bool {
        self.control.pass && self.weakened.is_failure()
    }
}

pub fn selftest(weakened_constant: f64) -> Result<SelftestReport> {
    let d = GridDomain::new(1, 0.5, 1025)?;
    let one = GridFunction::constant(d, 1.0, OutsideMode::PlusInfinity);
    let phi = YoungFunction::IndicatorUnit;
    let control = check_inequality(T7_Eq19, &one, &one, &phi, &CheckParams::default())?;
    let params = CheckParams { constant: Some(weakened_constant), ..CheckParams::default() };
    let weakened = check_inequality(T7_Eq19, &one, &one, &phi, &params)?;
    Ok(SelftestReport { control, weakened })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gridfn::make_grid;

    fn spec(kind: FunctionKind) -> FunctionSpec {
        FunctionSpec::new(kind)
    }

    #[test]
    fn sharp_constant_case() {
        let r = selftest(3.9).unwrap();
        assert_eq!((r.control.lhs, r.control.rhs), (2.0, 2.0));
        assert!(r.control.pass);
        assert!(r.weakened.is_failure(), "{:?}", r.weakened);
        assert!(r.ok());
    }

    #[test]
    fn triangle_sup_min_equality() {
        let d = make_grid(1, 4.0, 513).unwrap();
        let f = sample(&spec(FunctionKind::Triangle), &d, OutsideMode::PlusInfinity).unwrap();
        let r = check_inequality(T18_Eq29, &f, &f, &YoungFunction::Power { p: 1.0 }, &CheckParams::default()).unwrap();
        assert!((r.lhs - 2.0).abs() <= 0.02 && (r.rhs - 2.0).abs() <= 0.02, "{r:?}");
        assert!(r.pass);
    }

    #[test]
    fn inf_max_sharpness_family() {
        let d = make_grid(1, 1.0, 65).unwrap();
        let phi = YoungFunction::IndicatorUnit;
        let mut last = 0.0;
        for l in [1.0, 4.0, 16.0, 64.0] {
            let f = GridFunction::constant(d, 1.0, OutsideMode::PlusInfinity);
            let g = GridFunction::constant(d, l, OutsideMode::PlusInfinity);
            let r = check_inequality(C8_Eq20, &f, &g, &phi, &CheckParams::default()).unwrap();
            let ratio = r.lhs / r.rhs;
            assert!(ratio <= 1.0 && ratio > last, "{ratio}");
            assert!((ratio - l / (l + 1.0)).abs() < 1e-12);
            last = ratio;
        }
        assert!(last > 0.98);
    }

    #[test]
    fn naive_reverse_inequality_breaks() {
        // f large except comb teeth, g large except a short plateau: f □ g is
        // small everywhere while f^{-1} and g^{-1} are small in norm
        let d = make_grid(1, 2.0, 257).unwrap();
        let (big, eps) = (1e3, 0.01);
        let tooth = (0.5 / d.spacing()).round() as usize;
        let f = GridFunction::from_fn(d, OutsideMode::PlusInfinity, |_| big);
        let fv: Vec<f64> = f.values().iter().enumerate().map(|(i, &v)| if i % tooth == 0 { eps } else { v }).collect();
        let f = GridFunction::new(d, fv, OutsideMode::PlusInfinity).unwrap();
        let g = GridFunction::from_fn(d, OutsideMode::PlusInfinity, |x| if (0.0..0.5).contains(&x[0]) { eps } else { big });
        let phi = YoungFunction::Power { p: 1.0 };
        let conv = lifted_inf_conv(&f, &g).unwrap();
        let naive_lhs = luxemburg_norm(&conv.recip(), &phi);
        let naive_rhs = luxemburg_norm(&f.recip(), &phi) + luxemburg_norm(&g.recip(), &phi);
        assert!(naive_lhs > 3.0 * naive_rhs, "{naive_lhs} {naive_rhs}");
        let r = check_inequality(T19_Eq33, &f, &g, &phi, &CheckParams::default()).unwrap();
        assert!(r.pass, "{r:?}");
    }

    #[test]
    fn generator_contracts() {
        let d = make_grid(1, 2.0, 129).unwrap();
        let a = random_instance(1, Profile::CoerciveConvex, &d).unwrap();
        assert!(a.f.min() + a.g.min() > 0.0);
        assert_eq!(a, random_instance(1, Profile::CoerciveConvex, &d).unwrap());
        let b = random_instance(2, Profile::BoundedPair, &d).unwrap();
        assert_eq!(b.f.max(), b.g.max());
        assert!(b.f.min() >= 0.0 && b.g.min() >= 0.0);
        let c = random_instance(3, Profile::NonnegPair, &d).unwrap();
        assert!(c.g.min() > 0.0);
        for id in InequalityId::ALL {
            let (inst, params, phi) = instance_for(id, 7, &d).unwrap();
            let r = check_inequality(id, &inst.f, &inst.g, &phi, &params).unwrap();
            assert_ne!(r.status, Status::HypothesisNotMet, "{id}: {:?}", r.note);
        }
    }

    #[test]
    fn every_gate_rejects_a_crafted_input() {
        let d = make_grid(1, 2.0, 65).unwrap();
        let k = |v: f64| GridFunction::constant(d, v, OutsideMode::PlusInfinity);
        let bowl = sample(&spec(FunctionKind::Quadratic { c: 1.0 }), &d, OutsideMode::PlusInfinity).unwrap();
        let wavy = GridFunction::from_fn(d, OutsideMode::PlusInfinity, |x| 1.0 + x[0].sin().abs());
        let quad = Some(HamiltonianSpec::new(HamiltonianKind::QuadraticHalf));
        let level = Some(HamiltonianSpec::new(HamiltonianKind::LevelPowerAbs { alpha: 1.0 }));
        let growth = Some(Growth { c: 1.0, alpha: 2.0 });
        let p2 = YoungFunction::Power { p: 2.0 };
        let cases: Vec<(InequalityId, GridFunction, GridFunction, YoungFunction, CheckParams)> = vec![
            (L4_Eq12, k(1.0), k(0.0), p2.clone(), CheckParams::default()),
            (L6_Eq16, k(1.0), k(0.0), p2.clone(), CheckParams::default()),
            (T7_Eq19, k(-1.0), k(-1.0), p2.clone(), CheckParams::default()),
            (C8_Eq20, k(1.0), k(-1.0), p2.clone(), CheckParams::default()),
            (T18_Eq29, k(-1.0), k(1.0), p2.clone(), CheckParams::default()),
            (T19_Eq33, k(-1.0), k(-1.0), p2.clone(), CheckParams::default()),
            (T19_Eq34, bowl.clone(), bowl.clone(), p2.clone(), CheckParams { z: Some(5.0), ..CheckParams::default() }),
            (C20_Eq35, k(1.0), k(-1.0), p2.clone(), CheckParams::default()),
            (L21_Eq36, bowl.clone(), bowl.clone(), p2.clone(), CheckParams { growth, z: Some(0.0), ..CheckParams::default() }),
            (L21_Eq37, bowl.clone(), bowl.clone(), YoungFunction::IndicatorUnit, CheckParams { growth, ..CheckParams::default() }),
            (T23_Eq38, bowl.add_const(-1.0), k(1.0), p2.clone(), CheckParams { growth, t: 2.0, ..CheckParams::default() }),
            (HL_Eq42, bowl.clone(), k(-1.0), p2.clone(), CheckParams { hamiltonian: quad.clone(), ..CheckParams::default() }),
            (HL_Eq43, bowl.clone(), k(-1.0), p2.clone(), CheckParams { hamiltonian: level.clone(), ..CheckParams::default() }),
            (HF_Eq47, bowl.clone(), wavy.clone(), p2.clone(), CheckParams { hamiltonian: quad.clone(), ..CheckParams::default() }),
            (HF_Eq48, bowl.clone(), wavy, p2.clone(), CheckParams { hamiltonian: quad.clone(), ..CheckParams::default() }),
            (LS_Eq52, bowl.clone(), k(-1.0), p2.clone(), CheckParams { hamiltonian: level, ..CheckParams::default() }),
            (LS_Eq53, bowl.clone(), k(1.0), p2, CheckParams { hamiltonian: quad, ..CheckParams::default() }),
        ];
        assert_eq!(cases.len(), 17);
        for (id, f, g, phi, params) in cases {
            let r = check_inequality(id, &f, &g, &phi, &params).unwrap();
            assert_eq!(r.status, Status::HypothesisNotMet, "{id}");
            assert!(!r.pass);
        }
    }

    #[test]
    fn pass_flag_is_recomputable() {
        let d = make_grid(1, 2.0, 65).unwrap();
        let cfg = CampaignConfig { trials: 2, ..CampaignConfig::new(1, 2.0, 65, 2) };
        let s = campaign(&cfg).unwrap();
        assert!(s.errors.is_empty(), "{:?}", s.errors);
        for r in &s.rows {
            match r.status {
                Status::Checked => assert_eq!(r.pass, r.lhs <= r.rhs + r.tolerance),
                Status::Vacuous => assert!(r.pass && r.rhs == f64::INFINITY),
                Status::HypothesisNotMet => assert!(!r.pass),
            }
        }
        let _ = d;
    }

    #[test]
    fn empty_campaign() {
        let cfg = CampaignConfig { ids: vec![], ..CampaignConfig::new(1, 2.0, 33, 3) };
        let s = campaign(&cfg).unwrap();
        assert!(s.rows.is_empty());
        assert_eq!(s.exit_code(), 0);
        assert!(campaign(&CampaignConfig::new(1, 2.0, 33, 0)).is_err());
    }

    #[test]
    fn deficit_shrinks_under_refinement() {
        for id in InequalityId::ALL {
            let mut prev = f64::INFINITY;
            for n in [65, 129, 257] {
                let d = make_grid(1, 2.0, n).unwrap();
                let (inst, params, phi) = instance_for(id, 3, &d).unwrap();
                let r = check_inequality(id, &inst.f, &inst.g, &phi, &params).unwrap();
                assert!(r.deficit() <= prev * (1.0 + 1e-9) + 1e-12, "{id} n={n}: {} after {prev}", r.deficit());
                prev = r.deficit();
            }
        }
    }

    #[test]
    fn tail_norm_closed_forms_agree_with_quadrature() {
        // OnePlus reduces to the square norm when the integrand stays below 1
        let (c, alpha, r) = (2.0, 1.5, 1.0);
        let p2 = power_tail_norm(&YoungFunction::Power { p: 2.0 }, c, alpha, r, 1);
        let want = (2.0 / (c * c * (2.0 * alpha - 1.0))).sqrt();
        assert!((p2 - want).abs() < 1e-12);
        let one_plus = power_tail_norm(&YoungFunction::OnePlus { p: 2.0 }, c, alpha, r, 1);
        assert!((one_plus - p2).abs() < 1e-6 * p2, "{one_plus} {p2}");
        let custom = YoungFunction::Custom { points: vec![(0.0, 0.0), (1.0, 1.0), (2.0, 3.0)], cutoff: None };
        let lin = power_tail_norm(&YoungFunction::Power { p: 1.0 }, c, 2.0, r, 1);
        let q = power_tail_norm(&custom, c, 2.0, r, 1);
        assert!((q - lin).abs() < 1e-4 * lin, "{q} {lin}");
        assert!(power_tail_norm(&YoungFunction::Power { p: 1.0 }, 1.0, 1.0, 1.0, 1).is_infinite());
        assert!((indicator_norm(&YoungFunction::Power { p: 2.0 }, 4.0) - 2.0).abs() < 1e-9);
    }

    #[test]
    fn solution_reverse_bound_needs_the_doubled_constant() {
        // erosion by a short window: ||u^{-1}||_1 = 2t/m_g + int 1/g, while the
        // smaller constant gives 2t/m_g + int 1/(2g - m_g)
        let d = make_grid(1, 2.0, 513).unwrap();
        let g = GridFunction::from_fn(d, OutsideMode::PlusInfinity, |x| 0.01 + x[0] * x[0]);
        let phi = YoungFunction::Power { p: 1.0 };
        let base = CheckParams { hamiltonian: Some(HamiltonianSpec::new(HamiltonianKind::Norm)), t: 0.05, ladder: Ladder::NodeValues, ..CheckParams::default() };
        for id in [HL_Eq43, HF_Eq48] {
            let halved = check_inequality(id, &g, &g, &phi, &CheckParams { constant: Some(1.0), ..base.clone() }).unwrap();
            assert!(halved.lhs > 1.2 * halved.rhs, "{halved:?}");
            let r = check_inequality(id, &g, &g, &phi, &base).unwrap();
            assert!(r.pass && r.lhs < r.rhs, "{r:?}");
        }
    }

    #[test]
    fn ids_round_trip() {
        for id in InequalityId::ALL {
            assert_eq!(id.as_str().parse::<InequalityId>().unwrap(), id);
        }
        assert!("T99".parse::<InequalityId>().is_err());
        assert_eq!(T19_Eq33.constant(3), 4.0);
        assert_eq!(C20_Eq35.constant(2), 4.0);
        assert_eq!(LS_Eq53.constant(1), 4.0);
    }
}

