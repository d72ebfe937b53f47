//! Minkowski gauge centered at an interior point and the maximal
//! subdifferential of bounded convex functions.
//!
//! `g_{C,x₀}(x) = inf {λ > 0 : x − x₀ ∈ λ(C − x₀)} = 1/τ(x₀, x)`. Over all
//! convex `f: C → [m, M]`, the largest possible `∂f(x₀)` is
//! `(M − m)·∂g_{C,x₀}(x₀)`, i.e. the set of ζ with
//! `⟨ζ, x − x₀⟩ <= (M − m)·g_{C,x₀}(x)` for every x. Membership is tested
//! through the polar: `h_{C−x₀}(ζ/(M − m)) <= 1`.

use serde::Serialize;

use crate::bounds::check_range;
use crate::error::{Error, Result};
use crate::geometry::{self, ConvexBody};
use crate::oracles::PiecewiseAffineConvexFn;
use crate::vector::{ExtReal, Vector};

/// Slack on the normalized support comparison.
pub const TOL_SUB: f64 = 1e-9;

#[derive(Debug, Clone)]
pub struct GaugeFn<'a> {
    body: &'a ConvexBody,
    center: Vector,
}

impl<'a> GaugeFn<'a> {
    pub fn new(body: &'a ConvexBody, center: Vector) -> Result<Self> {
        body.require_interior(&center)?;
        Ok(GaugeFn { body, center })
    }

    pub fn center(&self) -> &Vector {
        &self.center
    }

    pub fn value(&self, x: &Vector) -> Result<f64> {
        gauge_value(self, x)
    }
}

/// `1/τ(x₀, x)`, zero when τ is infinite (in particular at `x = x₀`).
pub fn gauge_value(g: &GaugeFn<'_>, x: &Vector) -> Result<f64> {
    g.body.require_interior(x)?;
    Ok(geometry::tau_interior(g.body, &g.center, x)?.recip())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SubdiffMembership {
    pub member: bool,
    /// `h_{C−x₀}(ζ/(M − m))`; membership means this is at most 1.
    pub support_value: ExtReal,
}

/// Is ζ in the maximal subdifferential `(M − m)·∂g_{C,x₀}(x₀)`?
///
/// For `m = M` only constant functions qualify and the maximal
/// subdifferential is `{0}`.
pub fn max_subdiff_contains(
    body: &ConvexBody,
    x0: &Vector,
    zeta: &Vector,
    m: f64,
    big_m: f64,
) -> Result<SubdiffMembership> {
    check_range(m, big_m)?;
    zeta.check_dim(body.dim())?;
    body.require_interior(x0)?;
    if m == big_m {
        let zero = zeta.is_zero();
        return Ok(SubdiffMembership {
            member: zero,
            support_value: if zero { ExtReal::Finite(0.0) } else { ExtReal::PosInf },
        });
    }
    let scaled = zeta * (1.0 / (big_m - m));
    let support_value = match geometry::support_function(body, &scaled)? {
        ExtReal::Finite(h) => ExtReal::Finite(h - scaled.dot(x0)),
        ExtReal::PosInf => ExtReal::PosInf,
    };
    Ok(SubdiffMembership {
        member: support_value.le(1.0 + TOL_SUB),
        support_value,
    })
}

/// Explicit H-representation of the maximal subdifferential of a
/// V-polytope: `{ζ : ⟨ζ, vᵢ − x₀⟩ <= M − m}` over the vertices.
pub fn max_subdiff_hrep(vpoly: &ConvexBody, x0: &Vector, m: f64, big_m: f64) -> Result<ConvexBody> {
    check_range(m, big_m)?;
    let v = vpoly
        .as_vpolytope()
        .ok_or_else(|| Error::InvalidBody("expected a vpolytope".into()))?;
    vpoly.require_interior(x0)?;
    let rows = v
        .vertices()
        .iter()
        .map(|p| (p - x0).into_inner())
        .collect();
    ConvexBody::hpolytope(rows, vec![big_m - m; v.vertices().len()])
}

/// A subgradient of a generated piecewise-affine function at `x₀`: the
/// scaled gradient of the active piece, lowest index on ties.
///
/// Fails with [`Error::ClampedPoint`] where the function sits on its floor
/// `m` (there 0 is a subgradient and the caller decides).
pub fn subgradient_of_max_affine(f: &PiecewiseAffineConvexFn, x0: &Vector) -> Result<Vector> {
    let value = f.eval(x0)?;
    let m = f.floor();
    if value <= m + 1e-12 * (1.0 + m.abs()) {
        return Err(Error::ClampedPoint);
    }
    let piece = f.active_piece(x0)?;
    Ok(&f.pieces()[piece].gradient * f.scale())
}
