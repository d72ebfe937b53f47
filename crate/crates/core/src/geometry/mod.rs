//! Convex bodies, membership, ray exits and support functions.
//!
//! Bodies are stored as closed sets. Every routine that takes "interior"
//! points checks them against [`ConvexBody::margin`] and fails with
//! [`Error::NotInterior`] otherwise.

mod body;
pub mod lp;
pub(crate) mod sample;

use serde::Serialize;

pub use body::{Ball, BodyKind, ConvexBody, HPolytope, VPolytope, TOL_INT};
pub use lp::{lp_maximize, LpOutcome, LpStatus};
pub use sample::sample_interior;

use crate::error::{Error, Result};
use crate::vector::{ExtReal, Vector};

/// A computed ray parameter at or below `1 + NEAR_BOUNDARY` means the second
/// point sits on the boundary as far as double precision can tell.
pub const NEAR_BOUNDARY: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RayExitResult {
    pub t: ExtReal,
    /// `origin + t·direction`; present iff `t` is finite.
    pub boundary_point: Option<Vector>,
}

/// Membership within `tol`.
pub fn contains(body: &ConvexBody, p: &Vector, tol: f64) -> Result<bool> {
    p.check_dim(body.dim())?;
    body.contains_unchecked(p, tol.max(0.0))
}

/// `sup {t >= 0 : origin + t·direction ∈ body}` for a strictly interior origin.
/// A zero direction never leaves the body.
pub fn ray_exit(body: &ConvexBody, origin: &Vector, direction: &Vector) -> Result<RayExitResult> {
    direction.check_dim(body.dim())?;
    body.require_interior(origin)?;
    let t = body.exit_unchecked(origin, direction)?;
    let boundary_point = t.finite().map(|t| origin.along(direction, t));
    Ok(RayExitResult { t, boundary_point })
}

/// τ(x, y) = sup {t >= 1 : x + t(y − x) ∈ C}.
///
/// `+∞` when `x = y` or when `y − x` is a recession direction. Finite values
/// are strictly greater than 1; a value within [`NEAR_BOUNDARY`] of 1 is
/// rejected with [`Error::NearBoundary`].
pub fn tau(body: &ConvexBody, x: &Vector, y: &Vector) -> Result<ExtReal> {
    body.require_interior(x)?;
    body.require_interior(y)?;
    tau_interior(body, x, y)
}

/// [`tau`] for points already known to be interior.
pub(crate) fn tau_interior(body: &ConvexBody, x: &Vector, y: &Vector) -> Result<ExtReal> {
    if x == y {
        return Ok(ExtReal::PosInf);
    }
    let t = body.exit_unchecked(x, &(y - x))?;
    if let ExtReal::Finite(t) = t {
        if t <= 1.0 + NEAR_BOUNDARY {
            return Err(Error::NearBoundary { tau: t });
        }
    }
    Ok(t)
}

/// b(x, y) = x + τ(x, y)(y − x), the point where the ray from `x` through
/// `y` leaves the body.
pub fn boundary_point_b(body: &ConvexBody, x: &Vector, y: &Vector) -> Result<Vector> {
    match tau(body, x, y)? {
        ExtReal::Finite(t) => Ok(x.along(&(y - x), t)),
        ExtReal::PosInf => Err(Error::UnboundedDirection),
    }
}

/// `sup_{p ∈ body} ⟨d, p⟩`.
pub fn support_function(body: &ConvexBody, d: &Vector) -> Result<ExtReal> {
    body.support(d)
}

/// A maximizer of `⟨d, ·⟩` over the body, `None` if the support is infinite.
pub fn support_point(body: &ConvexBody, d: &Vector) -> Result<Option<Vector>> {
    body.support_point(d)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(x: &[f64]) -> Vector {
        Vector::new(x.to_vec()).unwrap()
    }

    fn unit_interval() -> ConvexBody {
        ConvexBody::hpolytope(vec![vec![1.0], vec![-1.0]], vec![1.0, 0.0]).unwrap()
    }

    fn half_line() -> ConvexBody {
        ConvexBody::hpolytope(vec![vec![-1.0]], vec![0.0]).unwrap()
    }

    fn unit_disk() -> ConvexBody {
        ConvexBody::ball(vec![0.0, 0.0], 1.0).unwrap()
    }

    fn square() -> ConvexBody {
        ConvexBody::vpolytope(vec![
            vec![1.0, 1.0],
            vec![1.0, -1.0],
            vec![-1.0, 1.0],
            vec![-1.0, -1.0],
        ])
        .unwrap()
    }

    /// Membership-only bisection, independent of the closed forms.
    fn bisect_tau(body: &ConvexBody, x: &Vector, y: &Vector) -> f64 {
        let d = y - x;
        let (mut lo, mut hi) = (1.0, 2.0);
        while contains(body, &x.along(&d, hi), 0.0).unwrap() {
            lo = hi;
            hi *= 2.0;
        }
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if contains(body, &x.along(&d, mid), 0.0).unwrap() {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        lo
    }

    #[test]
    fn contains_examples() {
        assert!(contains(&unit_interval(), &v(&[0.5]), 0.0).unwrap());
        assert!(!contains(&unit_disk(), &v(&[1.5, 0.0]), 0.0).unwrap());
        assert!(contains(&square(), &v(&[0.3, -0.7]), 1e-9).unwrap());
        assert!(matches!(
            contains(&unit_disk(), &v(&[0.0]), 0.0),
            Err(Error::Dimension { expected: 2, found: 1 })
        ));
    }

    #[test]
    fn ray_exit_examples() {
        let oracle = bisect_tau(&unit_interval(), &v(&[0.25]), &v(&[0.5])) * 0.25;
        assert!((oracle - 0.75).abs() < 1e-12);
        let r = ray_exit(&unit_interval(), &v(&[0.25]), &v(&[1.0])).unwrap();
        assert_eq!(r.t, ExtReal::Finite(0.75));
        assert_eq!(r.boundary_point, Some(v(&[1.0])));

        let r = ray_exit(&unit_disk(), &v(&[0.0, 0.0]), &v(&[1.0, 0.0])).unwrap();
        assert_eq!(r.t, ExtReal::Finite(1.0));
        assert_eq!(r.boundary_point, Some(v(&[1.0, 0.0])));

        let r = ray_exit(&half_line(), &v(&[1.0]), &v(&[1.0])).unwrap();
        assert_eq!(r.t, ExtReal::PosInf);
        assert_eq!(r.boundary_point, None);
    }

    #[test]
    fn ray_exit_zero_direction_and_boundary_origin() {
        let r = ray_exit(&square(), &v(&[0.2, 0.1]), &v(&[0.0, 0.0])).unwrap();
        assert_eq!(r.t, ExtReal::PosInf);
        assert!(matches!(
            ray_exit(&unit_interval(), &v(&[1.0]), &v(&[1.0])),
            Err(Error::NotInterior { .. })
        ));
        assert!(matches!(
            ray_exit(&square(), &v(&[3.0, 0.0]), &v(&[1.0, 0.0])),
            Err(Error::NotInterior { .. })
        ));
    }

    #[test]
    fn vpolytope_ray_exit_matches_bisection() {
        let x = v(&[0.2, -0.3]);
        let y = v(&[0.5, 0.1]);
        let t = tau(&square(), &x, &y).unwrap().finite().unwrap();
        let oracle = bisect_tau(&square(), &x, &y);
        assert!((t - oracle).abs() < 1e-9 * oracle, "{t} vs {oracle}");
    }

    #[test]
    fn tau_examples() {
        let oracle = bisect_tau(&unit_interval(), &v(&[0.25]), &v(&[0.5]));
        let t = tau(&unit_interval(), &v(&[0.25]), &v(&[0.5])).unwrap();
        assert!((t.finite().unwrap() - 3.0).abs() < 1e-15);
        assert!((oracle - 3.0).abs() < 1e-12);

        assert_eq!(
            tau(&square(), &v(&[0.1, 0.2]), &v(&[0.1, 0.2])).unwrap(),
            ExtReal::PosInf
        );

        let oracle = bisect_tau(&unit_disk(), &v(&[0.0, 0.0]), &v(&[0.5, 0.0]));
        let t = tau(&unit_disk(), &v(&[0.0, 0.0]), &v(&[0.5, 0.0])).unwrap();
        assert!((t.finite().unwrap() - 2.0).abs() < 1e-15);
        assert!((oracle - 2.0).abs() < 1e-12);
    }

    #[test]
    fn tau_rejects_boundary_points() {
        assert!(matches!(
            tau(&unit_interval(), &v(&[0.5]), &v(&[1.0])),
            Err(Error::NotInterior { .. })
        ));
        // {z <= 1}: y passes the margin test, but τ − 1 = 1e-8 / 1e6
        let body = ConvexBody::hpolytope(vec![vec![1.0]], vec![1.0]).unwrap();
        let err = tau(&body, &v(&[-1e6]), &v(&[1.0 - 1e-8])).unwrap_err();
        assert!(matches!(err, Error::NearBoundary { .. }), "{err:?}");
    }

    #[test]
    fn boundary_point_examples() {
        assert_eq!(
            boundary_point_b(&unit_interval(), &v(&[0.25]), &v(&[0.5])).unwrap(),
            v(&[1.0])
        );
        assert_eq!(
            boundary_point_b(&unit_disk(), &v(&[0.0, 0.0]), &v(&[0.5, 0.0])).unwrap(),
            v(&[1.0, 0.0])
        );
        // τ(y, x) = 3 by bisection
        let oracle = bisect_tau(&unit_disk(), &v(&[0.5, 0.0]), &v(&[0.0, 0.0]));
        assert!((oracle - 3.0).abs() < 1e-12);
        let b = boundary_point_b(&unit_disk(), &v(&[0.5, 0.0]), &v(&[0.0, 0.0])).unwrap();
        assert!(b.distance(&v(&[-1.0, 0.0])) < 1e-15);
        assert!(matches!(
            boundary_point_b(&half_line(), &v(&[1.0]), &v(&[2.0])),
            Err(Error::UnboundedDirection)
        ));
    }

    #[test]
    fn support_examples() {
        assert_eq!(
            support_function(&unit_disk(), &v(&[3.0, 4.0])).unwrap(),
            ExtReal::Finite(5.0)
        );
        let vertex_max = [(1.0, 1.0), (1.0, -1.0), (-1.0, 1.0), (-1.0, -1.0)]
            .iter()
            .map(|(a, b)| a + 2.0 * b)
            .fold(f64::MIN, f64::max);
        assert_eq!(
            support_function(&square(), &v(&[1.0, 2.0])).unwrap(),
            ExtReal::Finite(vertex_max)
        );
        assert_eq!(
            support_function(&half_line(), &v(&[1.0])).unwrap(),
            ExtReal::PosInf
        );
        assert!(support_function(&unit_disk(), &v(&[1.0])).is_err());
    }

    #[test]
    fn square_support_agrees_across_representations() {
        let h = ConvexBody::hpolytope(
            vec![vec![1.0, 0.0], vec![-1.0, 0.0], vec![0.0, 1.0], vec![0.0, -1.0]],
            vec![1.0; 4],
        )
        .unwrap();
        for k in 0..16 {
            let a = k as f64 * std::f64::consts::PI / 8.0;
            let d = v(&[a.cos(), 0.3 + a.sin()]);
            let sv = support_function(&square(), &d).unwrap().finite().unwrap();
            let sh = support_function(&h, &d).unwrap().finite().unwrap();
            assert!((sv - sh).abs() < 1e-9);
        }
    }
}
