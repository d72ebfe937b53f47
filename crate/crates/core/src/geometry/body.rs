//! Convex body representations and their per-representation kernels.

use serde::{Deserialize, Serialize};

use super::lp::{self, LpOutcome, StandardOutcome};
use crate::error::{Error, Result};
use crate::vector::{ExtReal, Vector};

/// Interior margin relative to the body's scale (its diameter when bounded).
pub const TOL_INT: f64 = 1e-9;

/// Absolute slack granted to LP-decided membership on top of the caller's
/// tolerance, relative to `1 + scale`.
const LP_FLOOR: f64 = 1e-12;

/// `{x : ⟨aᵢ, x⟩ <= bᵢ}`.
#[derive(Debug, Clone, PartialEq)]
pub struct HPolytope {
    a: Vec<Vector>,
    b: Vec<f64>,
    dim: usize,
    // per-coordinate (min, max), None when unbounded
    bbox: Option<Vec<(f64, f64)>>,
    scale: f64,
}

/// Convex hull of a finite point set.
#[derive(Debug, Clone, PartialEq)]
pub struct VPolytope {
    vertices: Vec<Vector>,
    dim: usize,
    scale: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Ball {
    center: Vector,
    radius: f64,
}

/// A closed convex body in ℝⁿ.
///
/// The metric and bound routines work on the body's interior; entry points
/// reject points closer to the boundary than [`ConvexBody::margin`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "BodySpec", into = "BodySpec")]
pub enum ConvexBody {
    HPolytope(HPolytope),
    VPolytope(VPolytope),
    Ball(Ball),
}

/// Wire format of a body.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
enum BodySpec {
    Hpolytope {
        #[serde(rename = "A")]
        a: Vec<Vec<f64>>,
        b: Vec<f64>,
    },
    Vpolytope {
        vertices: Vec<Vec<f64>>,
    },
    Ball {
        center: Vec<f64>,
        radius: f64,
    },
}

impl TryFrom<BodySpec> for ConvexBody {
    type Error = Error;

    fn try_from(spec: BodySpec) -> Result<Self> {
        match spec {
            BodySpec::Hpolytope { a, b } => ConvexBody::hpolytope(a, b),
            BodySpec::Vpolytope { vertices } => ConvexBody::vpolytope(vertices),
            BodySpec::Ball { center, radius } => ConvexBody::ball(center, radius),
        }
    }
}

impl From<ConvexBody> for BodySpec {
    fn from(body: ConvexBody) -> Self {
        match body {
            ConvexBody::HPolytope(h) => BodySpec::Hpolytope {
                a: h.a.into_iter().map(Vector::into_inner).collect(),
                b: h.b,
            },
            ConvexBody::VPolytope(v) => BodySpec::Vpolytope {
                vertices: v.vertices.into_iter().map(Vector::into_inner).collect(),
            },
            ConvexBody::Ball(b) => BodySpec::Ball {
                center: b.center.into_inner(),
                radius: b.radius,
            },
        }
    }
}

fn vectors(rows: Vec<Vec<f64>>, what: &str) -> Result<(Vec<Vector>, usize)> {
    let dim = rows
        .first()
        .map(Vec::len)
        .ok_or_else(|| Error::InvalidBody(format!("{what} is empty")))?;
    if dim == 0 {
        return Err(Error::InvalidBody("dimension must be positive".into()));
    }
    let rows = rows
        .into_iter()
        .map(|r| {
            let v = Vector::new(r)?;
            v.check_dim(dim)?;
            Ok(v)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok((rows, dim))
}

impl ConvexBody {
    pub fn hpolytope(a: Vec<Vec<f64>>, b: Vec<f64>) -> Result<Self> {
        let (a, dim) = vectors(a, "constraint matrix")?;
        if a.len() != b.len() {
            return Err(Error::Dimension {
                expected: a.len(),
                found: b.len(),
            });
        }
        if let Some(i) = a.iter().position(Vector::is_zero) {
            return Err(Error::InvalidBody(format!("row {i} has a zero normal")));
        }
        let b = Vector::new(b)?.into_inner();

        let mut bbox = Vec::with_capacity(dim);
        let mut bounded = true;
        for j in 0..dim {
            let hi = lp::lp_maximize(&Vector::axis(dim, j, 1.0), &a, &b)?;
            let lo = lp::lp_maximize(&Vector::axis(dim, j, -1.0), &a, &b)?;
            match (hi, lo) {
                (LpOutcome::Infeasible, _) | (_, LpOutcome::Infeasible) => {
                    return Err(Error::InvalidBody("constraints are infeasible".into()))
                }
                (LpOutcome::Optimal { value: h, .. }, LpOutcome::Optimal { value: l, .. }) => {
                    bbox.push((-l, h))
                }
                _ => bounded = false,
            }
        }
        let (bbox, scale) = if bounded {
            let diag = bbox.iter().map(|(l, h)| (h - l) * (h - l)).sum::<f64>().sqrt();
            (Some(bbox), diag)
        } else {
            (None, 1.0)
        };
        Ok(ConvexBody::HPolytope(HPolytope {
            a,
            b,
            dim,
            bbox,
            scale,
        }))
    }

    pub fn vpolytope(vertices: Vec<Vec<f64>>) -> Result<Self> {
        let (vertices, dim) = vectors(vertices, "vertex list")?;
        let mut scale = 0.0f64;
        for (i, p) in vertices.iter().enumerate() {
            for q in &vertices[i + 1..] {
                scale = scale.max(p.distance(q));
            }
        }
        Ok(ConvexBody::VPolytope(VPolytope {
            vertices,
            dim,
            scale,
        }))
    }

    pub fn ball(center: Vec<f64>, radius: f64) -> Result<Self> {
        if center.is_empty() {
            return Err(Error::InvalidBody("dimension must be positive".into()));
        }
        if !(radius.is_finite() && radius > 0.0) {
            return Err(Error::InvalidBody(format!("radius {radius} must be positive")));
        }
        Ok(ConvexBody::Ball(Ball {
            center: Vector::new(center)?,
            radius,
        }))
    }

    pub fn dim(&self) -> usize {
        match self {
            ConvexBody::HPolytope(h) => h.dim,
            ConvexBody::VPolytope(v) => v.dim,
            ConvexBody::Ball(b) => b.center.dim(),
        }
    }

    /// Diameter for bounded bodies (bounding-box diagonal for H-polytopes),
    /// 1 otherwise.
    pub fn scale(&self) -> f64 {
        match self {
            ConvexBody::HPolytope(h) => h.scale,
            ConvexBody::VPolytope(v) => v.scale,
            ConvexBody::Ball(b) => 2.0 * b.radius,
        }
    }

    /// Minimum interior depth a point needs to count as strictly interior.
    pub fn margin(&self) -> f64 {
        TOL_INT * self.scale()
    }

    pub fn is_bounded(&self) -> bool {
        match self {
            ConvexBody::HPolytope(h) => h.bbox.is_some(),
            _ => true,
        }
    }

    /// Per-coordinate `(min, max)` extents, `None` if unbounded.
    pub fn bounding_box(&self) -> Option<Vec<(f64, f64)>> {
        match self {
            ConvexBody::HPolytope(h) => h.bbox.clone(),
            ConvexBody::VPolytope(v) => Some(
                (0..v.dim)
                    .map(|j| {
                        v.vertices.iter().fold((f64::MAX, f64::MIN), |(lo, hi), p| {
                            (lo.min(p[j]), hi.max(p[j]))
                        })
                    })
                    .collect(),
            ),
            ConvexBody::Ball(b) => Some(
                b.center
                    .as_slice()
                    .iter()
                    .map(|c| (c - b.radius, c + b.radius))
                    .collect(),
            ),
        }
    }

    pub fn as_hpolytope(&self) -> Option<&HPolytope> {
        match self {
            ConvexBody::HPolytope(h) => Some(h),
            _ => None,
        }
    }

    pub fn as_vpolytope(&self) -> Option<&VPolytope> {
        match self {
            ConvexBody::VPolytope(v) => Some(v),
            _ => None,
        }
    }

    pub fn as_ball(&self) -> Option<&Ball> {
        match self {
            ConvexBody::Ball(b) => Some(b),
            _ => None,
        }
    }

    pub fn kind(&self) -> BodyKind {
        match self {
            ConvexBody::HPolytope(_) => BodyKind::HPolytope,
            ConvexBody::VPolytope(_) => BodyKind::VPolytope,
            ConvexBody::Ball(_) => BodyKind::Ball,
        }
    }

    /// Membership of `p` with slack `tol`. V-polytopes decide this by the
    /// minimum L1 residual of the convex-combination system.
    pub(crate) fn contains_unchecked(&self, p: &Vector, tol: f64) -> Result<bool> {
        Ok(match self {
            ConvexBody::HPolytope(h) => h.a.iter().zip(&h.b).all(|(a, &b)| a.dot(p) <= b + tol),
            ConvexBody::VPolytope(v) => v.residual(p)? <= tol + LP_FLOOR * (1.0 + v.scale),
            ConvexBody::Ball(b) => b.center.distance(p) <= b.radius + tol,
        })
    }

    /// Signed interior depth: positive inside, nonpositive on or outside the
    /// boundary. Exact Euclidean distance to the boundary for balls and
    /// H-polytopes. For V-polytopes it is the shortest exit along the `2n`
    /// coordinate directions, which is within a factor `√n` of the distance.
    pub fn interior_depth(&self, p: &Vector) -> Result<f64> {
        p.check_dim(self.dim())?;
        Ok(match self {
            ConvexBody::HPolytope(h) => h
                .a
                .iter()
                .zip(&h.b)
                .map(|(a, &b)| (b - a.dot(p)) / a.norm())
                .fold(f64::INFINITY, f64::min),
            ConvexBody::Ball(b) => b.radius - b.center.distance(p),
            ConvexBody::VPolytope(v) => {
                let residual = v.residual(p)?;
                if residual > LP_FLOOR * (1.0 + v.scale) {
                    return Ok(-residual);
                }
                let mut depth = f64::INFINITY;
                for j in 0..v.dim {
                    for sign in [1.0, -1.0] {
                        match v.exit(p, &Vector::axis(v.dim, j, sign))? {
                            Some(ExtReal::Finite(t)) => depth = depth.min(t),
                            Some(ExtReal::PosInf) => {}
                            None => return Ok(-residual),
                        }
                    }
                }
                depth
            }
        })
    }

    pub fn require_interior(&self, p: &Vector) -> Result<()> {
        let depth = self.interior_depth(p)?;
        let margin = self.margin();
        if depth > margin {
            Ok(())
        } else {
            Err(Error::NotInterior { depth, margin })
        }
    }

    /// `sup {t >= 0 : origin + t·dir ∈ body}` without interiority checks.
    pub(crate) fn exit_unchecked(&self, origin: &Vector, dir: &Vector) -> Result<ExtReal> {
        if dir.is_zero() {
            return Ok(ExtReal::PosInf);
        }
        match self {
            ConvexBody::HPolytope(h) => Ok(h.exit(origin, dir)),
            ConvexBody::Ball(b) => Ok(b.exit(origin, dir)),
            ConvexBody::VPolytope(v) => v.exit(origin, dir)?.ok_or(Error::NotInterior {
                depth: -v.residual(origin)?,
                margin: self.margin(),
            }),
        }
    }

    pub(crate) fn support(&self, d: &Vector) -> Result<ExtReal> {
        d.check_dim(self.dim())?;
        Ok(match self {
            ConvexBody::VPolytope(v) => ExtReal::Finite(
                v.vertices
                    .iter()
                    .map(|p| p.dot(d))
                    .fold(f64::NEG_INFINITY, f64::max),
            ),
            ConvexBody::Ball(b) => ExtReal::Finite(b.center.dot(d) + b.radius * d.norm()),
            ConvexBody::HPolytope(h) => match lp::lp_maximize(d, &h.a, &h.b)? {
                LpOutcome::Optimal { value, .. } => ExtReal::Finite(value),
                LpOutcome::Unbounded => ExtReal::PosInf,
                LpOutcome::Infeasible => {
                    return Err(Error::InvalidBody("constraints are infeasible".into()))
                }
            },
        })
    }

    pub(crate) fn support_point(&self, d: &Vector) -> Result<Option<Vector>> {
        d.check_dim(self.dim())?;
        Ok(match self {
            ConvexBody::VPolytope(v) => v
                .vertices
                .iter()
                .max_by(|p, q| p.dot(d).total_cmp(&q.dot(d)))
                .cloned(),
            ConvexBody::Ball(b) => {
                let n = d.norm();
                if n == 0.0 {
                    Some(b.center.clone())
                } else {
                    Some(b.center.along(d, b.radius / n))
                }
            }
            ConvexBody::HPolytope(h) => match lp::lp_maximize(d, &h.a, &h.b)? {
                LpOutcome::Optimal { argmax, .. } => Some(argmax),
                _ => None,
            },
        })
    }
}

/// Representation tag, matching the `"type"` key of the wire format.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BodyKind {
    HPolytope,
    VPolytope,
    Ball,
}

impl BodyKind {
    pub const ALL: [BodyKind; 3] = [BodyKind::HPolytope, BodyKind::VPolytope, BodyKind::Ball];

    pub fn name(self) -> &'static str {
        match self {
            BodyKind::HPolytope => "hpolytope",
            BodyKind::VPolytope => "vpolytope",
            BodyKind::Ball => "ball",
        }
    }
}

impl std::str::FromStr for BodyKind {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        BodyKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| format!("unknown body kind {s:?}"))
    }
}

impl HPolytope {
    pub fn rows(&self) -> &[Vector] {
        &self.a
    }

    pub fn rhs(&self) -> &[f64] {
        &self.b
    }

    fn exit(&self, origin: &Vector, dir: &Vector) -> ExtReal {
        let dn = dir.norm();
        let mut best: Option<f64> = None;
        for (a, &b) in self.a.iter().zip(&self.b) {
            let rate = a.dot(dir);
            // skip rows the ray moves away from (or along, up to rounding)
            if rate <= 1e-15 * a.norm() * dn {
                continue;
            }
            let t = ((b - a.dot(origin)) / rate).max(0.0);
            best = Some(best.map_or(t, |bt| bt.min(t)));
        }
        best.map_or(ExtReal::PosInf, ExtReal::Finite)
    }
}

impl VPolytope {
    pub fn vertices(&self) -> &[Vector] {
        &self.vertices
    }

    /// Rows `[v₁ … v_k | extra]` over coordinates, then the weight-sum row.
    fn hull_system(&self, extra: Option<&Vector>) -> Vec<Vec<f64>> {
        let k = self.vertices.len();
        let mut rows: Vec<Vec<f64>> = (0..self.dim)
            .map(|r| {
                let mut row: Vec<f64> = self.vertices.iter().map(|v| v[r]).collect();
                if let Some(d) = extra {
                    row.push(-d[r]);
                }
                row
            })
            .collect();
        let mut sum = vec![1.0; k];
        if extra.is_some() {
            sum.push(0.0);
        }
        rows.push(sum);
        rows
    }

    fn residual(&self, p: &Vector) -> Result<f64> {
        let mut b = p.as_slice().to_vec();
        b.push(1.0);
        lp::min_residual(&self.hull_system(None), &b)
    }

    /// Parametric LP `max t : origin + t·dir ∈ conv(V)`. `None` if the origin
    /// itself is not in the hull.
    fn exit(&self, origin: &Vector, dir: &Vector) -> Result<Option<ExtReal>> {
        let rows = self.hull_system(Some(dir));
        let mut b = origin.as_slice().to_vec();
        b.push(1.0);
        let k = self.vertices.len();
        let mut cost = vec![0.0; k + 1];
        cost[k] = 1.0;
        Ok(match lp::solve_standard(&rows, &b, &cost)? {
            StandardOutcome::Optimal { value, .. } => Some(ExtReal::Finite(value.max(0.0))),
            StandardOutcome::Unbounded => Some(ExtReal::PosInf),
            StandardOutcome::Infeasible { .. } => None,
        })
    }
}

impl Ball {
    pub fn center(&self) -> &Vector {
        &self.center
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    /// Positive root of `‖o + t d − c‖² = r²`.
    fn exit(&self, origin: &Vector, dir: &Vector) -> ExtReal {
        let w = origin - &self.center;
        let dd = dir.dot(dir);
        let wd = w.dot(dir);
        let wn = w.norm();
        // r² − ‖w‖², factored for accuracy near the center
        let gap = (self.radius - wn) * (self.radius + wn);
        let disc = (wd * wd + dd * gap).max(0.0).sqrt();
        let t = if wd <= 0.0 {
            (disc - wd) / dd
        } else {
            gap / (wd + disc)
        };
        ExtReal::Finite(t.max(0.0))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn square() -> ConvexBody {
        ConvexBody::vpolytope(vec![
            vec![1.0, 1.0],
            vec![1.0, -1.0],
            vec![-1.0, 1.0],
            vec![-1.0, -1.0],
        ])
        .unwrap()
    }

    #[test]
    fn json_schema_round_trip() {
        let src = r#"{"type":"hpolytope","A":[[1.0],[-1.0]],"b":[1.0,0.0]}"#;
        let body: ConvexBody = serde_json::from_str(src).unwrap();
        assert_eq!(body.dim(), 1);
        assert_eq!(serde_json::to_string(&body).unwrap(), src);

        let ball: ConvexBody =
            serde_json::from_str(r#"{"type":"ball","center":[0,0],"radius":1}"#).unwrap();
        assert_eq!(ball.kind(), BodyKind::Ball);
        let v: ConvexBody =
            serde_json::from_str(r#"{"type":"vpolytope","vertices":[[0],[1]]}"#).unwrap();
        assert_eq!(v.scale(), 1.0);
    }

    #[test]
    fn invalid_bodies_are_rejected() {
        assert!(ConvexBody::ball(vec![0.0], 0.0).is_err());
        assert!(ConvexBody::ball(vec![0.0], -1.0).is_err());
        assert!(ConvexBody::hpolytope(vec![vec![0.0, 0.0]], vec![1.0]).is_err());
        assert!(ConvexBody::hpolytope(vec![vec![1.0], vec![-1.0]], vec![-1.0, -1.0]).is_err());
        assert!(ConvexBody::vpolytope(vec![]).is_err());
        assert!(ConvexBody::vpolytope(vec![vec![0.0, 1.0], vec![1.0]]).is_err());
        let bad = r#"{"type":"ball","center":[0,0],"radius":-2}"#;
        assert!(serde_json::from_str::<ConvexBody>(bad).is_err());
    }

    #[test]
    fn unbounded_hpolytope_has_unit_scale() {
        let half = ConvexBody::hpolytope(vec![vec![-1.0]], vec![0.0]).unwrap();
        assert!(!half.is_bounded());
        assert_eq!(half.scale(), 1.0);
        let unit = ConvexBody::hpolytope(vec![vec![1.0], vec![-1.0]], vec![1.0, 0.0]).unwrap();
        assert_eq!(unit.bounding_box(), Some(vec![(0.0, 1.0)]));
    }

    #[test]
    fn vpolytope_depth_and_membership() {
        let sq = square();
        let c = Vector::new(vec![0.0, 0.0]).unwrap();
        assert!((sq.interior_depth(&c).unwrap() - 1.0).abs() < 1e-12);
        let out = Vector::new(vec![1.5, 0.0]).unwrap();
        assert!(sq.interior_depth(&out).unwrap() < 0.0);
        assert!(!sq.contains_unchecked(&out, 0.0).unwrap());
        let corner = Vector::new(vec![1.0, 1.0]).unwrap();
        assert!(sq.contains_unchecked(&corner, 0.0).unwrap());
        assert!(sq.require_interior(&corner).is_err());
    }

    #[test]
    fn ball_exit_is_stable_off_center() {
        let b = ConvexBody::ball(vec![0.0, 0.0], 1.0).unwrap();
        let o = Vector::new(vec![0.5, 0.0]).unwrap();
        let d = Vector::new(vec![1.0, 0.0]).unwrap();
        assert_eq!(b.exit_unchecked(&o, &d).unwrap(), ExtReal::Finite(0.5));
        assert_eq!(b.exit_unchecked(&o, &(-&d)).unwrap(), ExtReal::Finite(1.5));
    }

    #[test]
    fn support_point_is_maximizer() {
        let sq = square();
        let d = Vector::new(vec![1.0, 2.0]).unwrap();
        let p = sq.support_point(&d).unwrap().unwrap();
        assert_eq!(p.as_slice(), &[1.0, 1.0]);
    }
}
