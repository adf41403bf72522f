//! Minimal enclosing balls of finite point sets (move-to-front Welzl).
//!
//! The empty set gets the degenerate ball `{0}`; sets flagged unbounded get
//! the whole space with radius `+inf`.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::gridfn::{level_set_lower, level_set_upper, GridDomain, GridFunction, Point};

/// Relative slack used when deciding containment.
pub const CONTAINMENT_TOL: f64 = 1e-9;
const INNER_TOL: f64 = 1e-11;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BallKind {
    Proper,
    DegeneratePoint,
    WholeSpace,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Ball {
    pub center: Vec<f64>,
    pub radius: f64,
    pub kind: BallKind,
}

impl Ball {
    fn whole(dim: usize) -> Self {
        Ball { center: vec![0.0; dim], radius: f64::INFINITY, kind: BallKind::WholeSpace }
    }

    fn finite(dim: usize, center: &Point, radius: f64) -> Self {
        let kind = if radius == 0.0 { BallKind::DegeneratePoint } else { BallKind::Proper };
        Ball { center: center[..dim].to_vec(), radius, kind }
    }

    /// Containment with slack `1e-9 * (1 + radius)`.
    pub fn contains(&self, p: &[f64]) -> bool {
        if self.kind == BallKind::WholeSpace {
            return true;
        }
        let d = self
            .center
            .iter()
            .zip(p)
            .map(|(c, x)| (c - x) * (c - x))
            .sum::<f64>()
            .sqrt();
        d <= self.radius + CONTAINMENT_TOL * (1.0 + self.radius)
    }
}

fn to_point(p: &[f64]) -> Point {
    let mut out = [0.0; 3];
    out[..p.len()].copy_from_slice(p);
    out
}

fn dist2(a: &Point, b: &Point) -> f64 {
    (0..3).map(|i| (a[i] - b[i]) * (a[i] - b[i])).sum()
}

/// Minimal enclosing ball of `points` in dimension `dim`.
pub fn enclosing_ball(dim: usize, points: &[Vec<f64>], unbounded: bool) -> Result<Ball> {
    if !(1..=3).contains(&dim) {
        return Err(Error::UnsupportedDim(dim));
    }
    let mut pts = Vec::with_capacity(points.len());
    for p in points {
        if p.len() != dim {
            return Err(Error::PointDimension { expected: dim, got: p.len() });
        }
        if p.iter().any(|c| !c.is_finite()) {
            return Err(Error::NonFiniteCoordinate);
        }
        pts.push(to_point(p));
    }
    if unbounded {
        return Ok(Ball::whole(dim));
    }
    Ok(min_ball_points(dim, pts))
}

/// Minimal enclosing ball of already validated points; shuffles them first.
pub(crate) fn min_ball_points(dim: usize, mut pts: Vec<Point>) -> Ball {
    if pts.is_empty() {
        return Ball::finite(dim, &[0.0; 3], 0.0);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_ba11);
    pts.shuffle(&mut rng);
    let mut support = Vec::with_capacity(4);
    let end = pts.len();
    let (c, r2) = mtf(&mut pts, end, &mut support, dim);
    Ball::finite(dim, &c, r2.max(0.0).sqrt())
}

fn inside(c: &Point, r2: f64, p: &Point) -> bool {
    if r2 < 0.0 {
        return false;
    }
    let r = r2.sqrt();
    dist2(c, p).sqrt() <= r + INNER_TOL * (1.0 + r)
}

fn mtf(pts: &mut [Point], end: usize, support: &mut Vec<Point>, dim: usize) -> (Point, f64) {
    let (mut c, mut r2) = support_ball(support);
    if support.len() == dim + 1 {
        return (c, r2);
    }
    for i in 0..end {
        if !inside(&c, r2, &pts[i]) {
            support.push(pts[i]);
            let b = mtf(pts, i, support, dim);
            c = b.0;
            r2 = b.1;
            support.pop();
            pts[..=i].rotate_right(1);
        }
    }
    (c, r2)
}

/// Smallest ball with every support point on its boundary; if the support is
/// affinely dependent, the smallest ball containing it.
fn support_ball(support: &[Point]) -> (Point, f64) {
    match support.len() {
        0 => ([0.0; 3], -1.0),
        1 => (support[0], 0.0),
        _ => circumball(support).unwrap_or_else(|| fallback_ball(support)),
    }
}

/// Center in the affine hull equidistant from all points; `None` if degenerate.
pub(crate) fn circumball(pts: &[Point]) -> Option<(Point, f64)> {
    let k = pts.len() - 1;
    let p0 = pts[0];
    let v: Vec<Point> = pts[1..]
        .iter()
        .map(|p| [p[0] - p0[0], p[1] - p0[1], p[2] - p0[2]])
        .collect();
    let dot = |a: &Point, b: &Point| a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
    let mut a = [[0.0f64; 4]; 3];
    let mut scale = 0.0f64;
    for i in 0..k {
        for j in 0..k {
            a[i][j] = dot(&v[i], &v[j]);
        }
        a[i][k] = 0.5 * dot(&v[i], &v[i]);
        scale = scale.max(a[i][i]);
    }
    if scale == 0.0 {
        return None;
    }
    let lambda = solve(&mut a, k, scale)?;
    let mut c = p0;
    for i in 0..k {
        for ax in 0..3 {
            c[ax] += lambda[i] * v[i][ax];
        }
    }
    let r2 = pts.iter().map(|p| dist2(&c, p)).fold(0.0, f64::max);
    Some((c, r2))
}

fn solve(a: &mut [[f64; 4]; 3], k: usize, scale: f64) -> Option<[f64; 3]> {
    for col in 0..k {
        let piv = (col..k).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))?;
        if a[piv][col].abs() <= 1e-12 * scale {
            return None;
        }
        a.swap(col, piv);
        for row in 0..k {
            if row != col {
                let f = a[row][col] / a[col][col];
                for c in col..=k {
                    a[row][c] -= f * a[col][c];
                }
            }
        }
    }
    let mut x = [0.0; 3];
    for i in 0..k {
        x[i] = a[i][k] / a[i][i];
    }
    Some(x)
}

fn fallback_ball(pts: &[Point]) -> (Point, f64) {
    let n = pts.len();
    let mut best: Option<(Point, f64)> = None;
    for mask in 1u32..(1 << n) - 1 {
        let sub: Vec<Point> = (0..n).filter(|i| mask & (1 << i) != 0).map(|i| pts[i]).collect();
        let cand = if sub.len() == 1 { Some((sub[0], 0.0)) } else { circumball(&sub) };
        if let Some((c, r2)) = cand {
            if pts.iter().all(|p| inside(&c, r2, p)) && best.is_none_or(|b| r2 < b.1) {
                best = Some((c, r2));
            }
        }
    }
    best.unwrap_or_else(|| {
        let c = pts[0];
        (c, pts.iter().map(|p| dist2(&c, p)).fold(0.0, f64::max))
    })
}

/// Largest pairwise distance.
pub fn diameter(points: &[Vec<f64>]) -> f64 {
    let mut best = 0.0f64;
    for (i, a) in points.iter().enumerate() {
        for b in &points[i + 1..] {
            let d = a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt();
            best = best.max(d);
        }
    }
    best
}

/// Jung's bounds `diam <= 2r <= sqrt(2N/(N+1)) diam`, with additive slack `1e-9`.
pub fn jung_bound_holds(dim: usize, points: &[Vec<f64>], ball: &Ball) -> bool {
    if points.is_empty() {
        return true;
    }
    let d = diameter(points);
    let two_r = 2.0 * ball.radius;
    let factor = (2.0 * dim as f64 / (dim as f64 + 1.0)).sqrt();
    d <= two_r + 1e-9 * (1.0 + d) && two_r <= factor * d + 1e-9 * (1.0 + d)
}

/// Radius of the enclosing ball of `{f > xi}` (upper) or `{f < xi}` (lower).
/// A level set touching the box boundary counts as unbounded.
pub fn radius_of_level_set(f: &GridFunction, xi: f64, upper: bool) -> f64 {
    let ls = if upper { level_set_upper(f, xi) } else { level_set_lower(f, xi) };
    radius_of_indices(f.domain(), &ls.indices, ls.touches_boundary)
}

/// Enclosing-ball radius of a sorted node index set.
pub fn radius_of_indices(domain: &GridDomain, indices: &[usize], touches_boundary: bool) -> f64 {
    if touches_boundary {
        return f64::INFINITY;
    }
    if indices.is_empty() {
        return 0.0;
    }
    let pts = extreme_nodes(domain, indices);
    min_ball_points(domain.dim(), pts).radius
}

/// Keep the first and last node of every grid line along the last axis; the
/// enclosing ball only depends on these.
fn extreme_nodes(domain: &GridDomain, indices: &[usize]) -> Vec<Point> {
    let n = domain.points_per_axis();
    let mut out = Vec::new();
    let mut i = 0;
    while i < indices.len() {
        let line = indices[i] / n;
        let mut j = i;
        while j + 1 < indices.len() && indices[j + 1] / n == line {
            j += 1;
        }
        out.push(domain.point(indices[i]));
        if j != i {
            out.push(domain.point(indices[j]));
        }
        i = j + 1;
    }
    out
}
