//! Brute-force oracles and seeded fixture generators.
//!
//! The oracles use membership queries only and share no code path with the
//! closed-form ray exits they check.

use rand::Rng as _;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::bounds::{check_range, BoundedConvexFn};
use crate::error::{Error, Result};
use crate::geometry::{self, BodyKind, ConvexBody};
use crate::rng::{self, streams, Rng};
use crate::vector::{ExtReal, Vector};

/// Doubling stops here and reports `+∞`.
pub const TAU_CAP: f64 = 1e12;

/// τ(x, y) by doubling then bisecting on membership.
///
/// Brackets by doubling `t` from 1 until `x + t(y − x)` leaves the body (or
/// `t` passes [`TAU_CAP`], reported as `+∞`), then bisects until the bracket
/// is narrower than `tol·max(1, t)`.
pub fn tau_bisection_oracle(body: &ConvexBody, x: &Vector, y: &Vector, tol: f64) -> Result<ExtReal> {
    body.require_interior(x)?;
    body.require_interior(y)?;
    let d = y - x;
    let inside = |t: f64| geometry::contains(body, &x.along(&d, t), 0.0);
    let (mut lo, mut hi) = (1.0, 2.0);
    while inside(hi)? {
        lo = hi;
        hi *= 2.0;
        if hi > TAU_CAP {
            return Ok(ExtReal::PosInf);
        }
    }
    while hi - lo > tol * lo.max(1.0) {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if inside(mid)? {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(ExtReal::Finite(0.5 * (lo + hi)))
}

/// Exit parameter from `origin` along `dir`: the closed-form estimate is
/// bracketed and then refined by bisection on membership alone.
fn refined_exit(body: &ConvexBody, origin: &Vector, dir: &Vector) -> Result<f64> {
    let estimate = geometry::ray_exit(body, origin, dir)?
        .t
        .finite()
        .ok_or(Error::UnboundedChord)?;
    let inside = |t: f64| geometry::contains(body, &origin.along(dir, t), 0.0);
    let mut lo = estimate * (1.0 - 1e-6);
    let mut hi = estimate * (1.0 + 1e-6);
    if !inside(lo)? {
        lo = 0.0;
    }
    while inside(hi)? {
        lo = hi;
        hi *= 2.0;
        if hi > TAU_CAP {
            return Err(Error::UnboundedChord);
        }
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if inside(mid)? {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Half the log cross-ratio of `(a, x, y, b)` on the chord through `x` and
/// `y`, where `a = b(y, x)` and `b = b(x, y)` are the chord's endpoints.
pub fn hilbert_cross_ratio_oracle(body: &ConvexBody, x: &Vector, y: &Vector) -> Result<f64> {
    body.require_interior(x)?;
    body.require_interior(y)?;
    if x == y {
        return Ok(0.0);
    }
    let fwd = y - x;
    let bwd = x - y;
    // both exits measured from x so the four points share one parameterization
    let b = x.along(&fwd, refined_exit(body, x, &fwd)?);
    let a = x.along(&bwd, refined_exit(body, x, &bwd)?);
    let num = a.distance(y) * b.distance(x);
    let den = a.distance(x) * b.distance(y);
    Ok(0.5 * (num / den).ln())
}

#[derive(Debug, Clone, PartialEq)]
pub struct AffinePiece {
    pub gradient: Vector,
    pub offset: f64,
}

impl AffinePiece {
    pub fn new(gradient: Vector, offset: f64) -> Self {
        AffinePiece { gradient, offset }
    }

    pub fn eval(&self, z: &Vector) -> f64 {
        self.gradient.dot(z) + self.offset
    }
}

/// `f(z) = max(m, M − s·(H − h(z)))` with `h(z) = maxᵢ ⟨gᵢ, z⟩ + cᵢ` and
/// `H = max_C h`.
///
/// Convex as the max of a constant and a convex function, and within
/// `[m, M]` on the body since `h <= H` there. `H` is exact: it equals
/// `maxᵢ (h_C(gᵢ) + cᵢ)` with `h_C` the support function.
#[derive(Debug, Clone, PartialEq)]
pub struct PiecewiseAffineConvexFn {
    pieces: Vec<AffinePiece>,
    m: f64,
    big_m: f64,
    scale: f64,
    top: f64,
}

/// Wire format of a piecewise-affine function; `H` is recomputed from the
/// body on load.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PiecewiseAffineSpec {
    pub pieces: Vec<(Vec<f64>, f64)>,
    pub m: f64,
    #[serde(rename = "M")]
    pub big_m: f64,
    pub scale: f64,
}

impl PiecewiseAffineConvexFn {
    /// Fits the function to `body` by computing `H` exactly.
    pub fn fit(
        body: &ConvexBody,
        pieces: Vec<AffinePiece>,
        m: f64,
        big_m: f64,
        scale: f64,
    ) -> Result<Self> {
        check_range(m, big_m)?;
        if pieces.is_empty() {
            return Err(Error::Generator("at least one affine piece is required".into()));
        }
        if !(scale.is_finite() && scale > 0.0) {
            return Err(Error::Generator(format!("scale {scale} must be positive")));
        }
        let mut top = f64::NEG_INFINITY;
        for p in &pieces {
            let h = geometry::support_function(body, &p.gradient)?
                .finite()
                .ok_or_else(|| Error::Generator("h is unbounded above on the body".into()))?;
            top = top.max(h + p.offset);
        }
        Ok(PiecewiseAffineConvexFn {
            pieces,
            m,
            big_m,
            scale,
            top,
        })
    }

    pub fn from_spec(body: &ConvexBody, spec: &PiecewiseAffineSpec) -> Result<Self> {
        let pieces = spec
            .pieces
            .iter()
            .map(|(g, c)| {
                let g = Vector::new(g.clone())?;
                g.check_dim(body.dim())?;
                Ok(AffinePiece::new(g, *c))
            })
            .collect::<Result<_>>()?;
        Self::fit(body, pieces, spec.m, spec.big_m, spec.scale)
    }

    pub fn to_spec(&self) -> PiecewiseAffineSpec {
        PiecewiseAffineSpec {
            pieces: self
                .pieces
                .iter()
                .map(|p| (p.gradient.as_slice().to_vec(), p.offset))
                .collect(),
            m: self.m,
            big_m: self.big_m,
            scale: self.scale,
        }
    }

    pub fn pieces(&self) -> &[AffinePiece] {
        &self.pieces
    }

    pub fn floor(&self) -> f64 {
        self.m
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    /// `H`, the maximum of `h` over the body.
    pub fn top(&self) -> f64 {
        self.top
    }

    pub fn inner(&self, z: &Vector) -> Result<f64> {
        z.check_dim(self.pieces[0].gradient.dim())?;
        Ok(self
            .pieces
            .iter()
            .map(|p| p.eval(z))
            .fold(f64::NEG_INFINITY, f64::max))
    }

    /// Index of the maximizing piece; the lowest index among near-ties.
    pub fn active_piece(&self, z: &Vector) -> Result<usize> {
        let h = self.inner(z)?;
        let tie = 1e-12 * (1.0 + h.abs());
        Ok(self
            .pieces
            .iter()
            .position(|p| p.eval(z) >= h - tie)
            .expect("the maximum is attained"))
    }

    pub fn eval(&self, z: &Vector) -> Result<f64> {
        let raw = self.big_m - self.scale * (self.top - self.inner(z)?);
        // h(z) may exceed H by rounding on the body
        let raw = if raw > self.big_m && raw - self.big_m <= 1e-12 * (1.0 + self.big_m.abs()) {
            self.big_m
        } else {
            raw
        };
        Ok(raw.max(self.m))
    }
}

impl BoundedConvexFn for PiecewiseAffineConvexFn {
    fn eval(&self, z: &Vector) -> Result<f64> {
        PiecewiseAffineConvexFn::eval(self, z)
    }

    fn range(&self) -> (f64, f64) {
        (self.m, self.big_m)
    }
}

/// Random piecewise-affine convex function with values in `[m, M]` on a
/// bounded body.
///
/// Gradients and offsets are standard normal. The scale is drawn from
/// `[0.5, 2]·(M − m)/(1 + spread)` where `spread` is the range of `h` over
/// the vertices (V-polytopes) or over a few interior samples (otherwise), so
/// that the floor is active on part of the body for some seeds and not
/// others.
pub fn random_convex_fn(
    body: &ConvexBody,
    m: f64,
    big_m: f64,
    n_pieces: usize,
    rng_seed: u64,
) -> Result<PiecewiseAffineConvexFn> {
    check_range(m, big_m)?;
    if m == big_m {
        return Err(Error::InvalidRange { m, big_m });
    }
    if n_pieces == 0 {
        return Err(Error::Generator("n_pieces must be at least 1".into()));
    }
    if !body.is_bounded() {
        return Err(Error::Generator("body must be bounded".into()));
    }
    let mut rng = rng::stream(rng_seed, streams::FUNCTION);
    let dim = body.dim();
    let pieces: Vec<AffinePiece> = (0..n_pieces)
        .map(|_| {
            let g = crate::geometry::sample::gaussian(&mut rng, dim);
            AffinePiece::new(g, StandardNormal.sample(&mut rng))
        })
        .collect();
    let h = |z: &Vector| {
        pieces
            .iter()
            .map(|p| p.eval(z))
            .fold(f64::NEG_INFINITY, f64::max)
    };
    let probe: Vec<Vector> = match body.as_vpolytope() {
        Some(v) => v.vertices().to_vec(),
        None => geometry::sample_interior(body, rng_seed, 8)?,
    };
    let (lo, hi) = probe
        .iter()
        .map(h)
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v), hi.max(v)));
    let spread = hi - lo;
    if !spread.is_finite() {
        return Err(Error::Generator("degenerate vertex set".into()));
    }
    let scale = rng.random_range(0.5..=2.0) * (big_m - m) / (1.0 + spread);
    PiecewiseAffineConvexFn::fit(body, pieces, m, big_m, scale)
}

/// Seeded, well-conditioned test bodies in dimension 1 to 16.
///
/// * ball: center in `[−1, 1]ⁿ`, radius in `[0.5, 2]`.
/// * vpolytope: `n + 2 ..= 3n` points at distance `[0.5, 1.5]` from the
///   origin, recentered on their centroid, so the origin is strictly inside.
/// * hpolytope: halfspaces tangent to a unit sphere centered in
///   `[−0.5, 0.5]ⁿ`: the `2n` faces of a randomly rotated cube (bounded by
///   construction) plus up to `2n` further random tangents.
pub fn random_body(dim: usize, kind: BodyKind, rng_seed: u64) -> Result<ConvexBody> {
    if !(1..=16).contains(&dim) {
        return Err(Error::Generator(format!("dimension {dim} outside 1..=16")));
    }
    let mut rng = rng::stream(rng_seed, streams::BODY);
    for _ in 0..100 {
        let body = match kind {
            BodyKind::Ball => {
                let center = (0..dim).map(|_| rng.random_range(-1.0..=1.0)).collect();
                return ConvexBody::ball(center, rng.random_range(0.5..=2.0));
            }
            BodyKind::HPolytope => return random_hpolytope(&mut rng, dim),
            BodyKind::VPolytope => random_vpolytope(&mut rng, dim)?,
        };
        if well_conditioned(&body)? {
            return Ok(body);
        }
    }
    Err(Error::Generator(format!(
        "no well-conditioned {} in dimension {dim} after 100 attempts",
        kind.name()
    )))
}

fn random_vpolytope(rng: &mut Rng, dim: usize) -> Result<ConvexBody> {
    let k = rng.random_range(dim + 2..=(3 * dim).max(dim + 2));
    let pts: Vec<Vector> = (0..k)
        .map(|_| {
            let g = crate::geometry::sample::gaussian(rng, dim);
            let r = rng.random_range(0.5..=1.5);
            &g * (r / g.norm().max(f64::MIN_POSITIVE))
        })
        .collect();
    let mut centroid = Vector::zeros(dim);
    for p in &pts {
        centroid = centroid.along(p, 1.0 / k as f64);
    }
    ConvexBody::vpolytope(pts.iter().map(|p| (p - &centroid).into_inner()).collect())
}

fn random_hpolytope(rng: &mut Rng, dim: usize) -> Result<ConvexBody> {
    let center: Vec<f64> = (0..dim).map(|_| rng.random_range(-0.5..=0.5)).collect();
    let center = Vector::new(center)?;
    let mut normals = random_rotation(rng, dim);
    normals.extend(normals.iter().map(|q| -q).collect::<Vec<_>>());
    let extra = rng.random_range(0..=2 * dim);
    for _ in 0..extra {
        let g = crate::geometry::sample::gaussian(rng, dim);
        let n = g.norm();
        if n > 1e-3 {
            normals.push(&g * (1.0 / n));
        }
    }
    let b = normals.iter().map(|a| 1.0 + a.dot(&center)).collect();
    ConvexBody::hpolytope(normals.into_iter().map(Vector::into_inner).collect(), b)
}

/// Orthonormal basis by Gram–Schmidt on Gaussian vectors.
fn random_rotation(rng: &mut Rng, dim: usize) -> Vec<Vector> {
    let mut basis: Vec<Vector> = Vec::with_capacity(dim);
    while basis.len() < dim {
        let mut g = crate::geometry::sample::gaussian(rng, dim);
        for q in &basis {
            g = g.along(q, -g.dot(q));
        }
        let n = g.norm();
        if n > 1e-3 {
            basis.push(&g * (1.0 / n));
        }
    }
    basis
}

/// Rejects V-polytopes whose origin sits too close to the boundary relative
/// to the body's size. Generated H-polytopes contain a unit ball inside a
/// rotated cube and always pass.
fn well_conditioned(body: &ConvexBody) -> Result<bool> {
    match body {
        ConvexBody::VPolytope(_) => {
            Ok(body.interior_depth(&Vector::zeros(body.dim()))? >= 0.02 * body.scale())
        }
        _ => Ok(true),
    }
}

/// Fixture document: the body's JSON object plus an `"fn"` key.
pub fn fixture_json(body: &ConvexBody, f: &PiecewiseAffineConvexFn) -> serde_json::Value {
    let mut value = serde_json::to_value(body).expect("bodies serialize");
    if let serde_json::Value::Object(map) = &mut value {
        map.insert(
            "fn".into(),
            serde_json::to_value(f.to_spec()).expect("function specs serialize"),
        );
    }
    value
}
