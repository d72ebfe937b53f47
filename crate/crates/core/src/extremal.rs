//! Convex functions that attain the variation bounds.
//!
//! For an anchor pair `(x, y)` with finite τ = τ(x, y), let `u = τ(y − x)`
//! (the vector from `x` to the exit point) and
//! `σ(z) = sup {t >= 0 : z + t·u ∈ C}`. σ is concave, so `φ = 1 − σ` is
//! convex, with `φ(x) = 0` and `φ(y) = 1/τ`. The clamped
//! `f = m + (M − m)·max(φ, 0)` is then convex with values in `[m, M]` and
//! `f(y) − f(x) = (M − m)/τ(x, y)`, which is the upper bound. The lower
//! orientation runs the same construction with the anchors swapped.

use serde::{Deserialize, Serialize};

use crate::bounds::{check_range, BoundedConvexFn};
use crate::error::Result;
use crate::geometry::{self, ConvexBody};
use crate::vector::{ExtReal, Vector};

/// Which bound the function attains.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Orientation {
    Upper,
    Lower,
}

impl std::str::FromStr for Orientation {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "upper" => Ok(Orientation::Upper),
            "lower" => Ok(Orientation::Lower),
            _ => Err(format!("unknown orientation {s:?} (expected upper or lower)")),
        }
    }
}

/// σ(z) = sup {t >= 0 : z + t·u ∈ C}.
pub fn sigma(body: &ConvexBody, z: &Vector, u: &Vector) -> Result<ExtReal> {
    Ok(geometry::ray_exit(body, z, u)?.t)
}

#[derive(Debug, Clone)]
pub struct ExtremalFn<'a> {
    body: &'a ConvexBody,
    x: Vector,
    y: Vector,
    // None: the construction degenerates to the constant m
    u: Option<Vector>,
    m: f64,
    big_m: f64,
    orientation: Orientation,
}

pub fn build_extremal<'a>(
    body: &'a ConvexBody,
    x: &Vector,
    y: &Vector,
    m: f64,
    big_m: f64,
    orientation: Orientation,
) -> Result<ExtremalFn<'a>> {
    check_range(m, big_m)?;
    body.require_interior(x)?;
    body.require_interior(y)?;
    let (from, to) = match orientation {
        Orientation::Upper => (x, y),
        Orientation::Lower => (y, x),
    };
    let u = if m == big_m {
        None
    } else {
        match geometry::tau_interior(body, from, to)? {
            ExtReal::Finite(t) => Some(&(to - from) * t),
            ExtReal::PosInf => None,
        }
    };
    Ok(ExtremalFn {
        body,
        x: x.clone(),
        y: y.clone(),
        u,
        m,
        big_m,
        orientation,
    })
}

impl<'a> ExtremalFn<'a> {
    pub fn body(&self) -> &'a ConvexBody {
        self.body
    }

    pub fn anchors(&self) -> (&Vector, &Vector) {
        (&self.x, &self.y)
    }

    /// The direction `u`; `None` when the function is the constant `m`.
    pub fn direction(&self) -> Option<&Vector> {
        self.u.as_ref()
    }

    pub fn orientation(&self) -> Orientation {
        self.orientation
    }

    pub fn is_constant(&self) -> bool {
        self.u.is_none()
    }

    /// `m + (M − m)·max(1 − σ(z), 0)`; `σ = +∞` maps straight to `m`.
    pub fn eval(&self, z: &Vector) -> Result<f64> {
        let Some(u) = &self.u else {
            z.check_dim(self.body.dim())?;
            return Ok(self.m);
        };
        Ok(match sigma(self.body, z, u)? {
            ExtReal::PosInf => self.m,
            ExtReal::Finite(s) => {
                let phi = (1.0 - s.max(0.0)).max(0.0);
                (self.m + (self.big_m - self.m) * phi).min(self.big_m)
            }
        })
    }
}

impl BoundedConvexFn for ExtremalFn<'_> {
    fn eval(&self, z: &Vector) -> Result<f64> {
        ExtremalFn::eval(self, z)
    }

    fn range(&self) -> (f64, f64) {
        (self.m, self.big_m)
    }
}

/// Tolerance on the attained differences.
pub const TOL_ATTAIN: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Attainment {
    pub upper_attained: bool,
    pub lower_attained: bool,
    /// `f(y) − f(x)` for the upper extremal function.
    pub upper_difference: f64,
    /// `g(y) − g(x)` for the lower extremal function.
    pub lower_difference: f64,
    /// `(M − m)/τ(x, y)`, 0 when τ is infinite.
    pub upper_target: f64,
    /// `−(M − m)/τ(y, x)`, 0 when τ is infinite.
    pub lower_target: f64,
}

/// Builds both extremal functions for `(x, y)` and checks that they hit the
/// bounds within [`TOL_ATTAIN`].
pub fn attainment_check(
    body: &ConvexBody,
    x: &Vector,
    y: &Vector,
    m: f64,
    big_m: f64,
) -> Result<Attainment> {
    let bounds = crate::bounds::variation_bounds(body, x, y, m, big_m)?;
    let f = build_extremal(body, x, y, m, big_m, Orientation::Upper)?;
    let g = build_extremal(body, x, y, m, big_m, Orientation::Lower)?;
    let upper_difference = f.eval(y)? - f.eval(x)?;
    let lower_difference = g.eval(y)? - g.eval(x)?;
    Ok(Attainment {
        upper_attained: (upper_difference - bounds.upper).abs() <= TOL_ATTAIN,
        lower_attained: (lower_difference - bounds.lower).abs() <= TOL_ATTAIN,
        upper_difference,
        lower_difference,
        upper_target: bounds.upper,
        lower_target: bounds.lower,
    })
}
