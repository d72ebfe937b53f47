use rand::Rng as _;
use rand_distr::{Distribution, Exp1, StandardNormal};

use super::body::ConvexBody;
use super::lp::{lp_maximize, LpOutcome};
use crate::error::{Error, Result};
use crate::rng::{self, Rng};
use crate::vector::Vector;

/// Balls are sampled inside this fraction of the radius.
const BALL_SHRINK: f64 = 0.95;

/// Deterministic interior samples.
///
/// * Ball: uniform direction, radius `0.95·r·U^{1/n}`.
/// * V-polytope: convex combination with exponential (Dirichlet(1)) weights.
/// * H-polytope: rejection inside the bounding box; unbounded sides are cut
///   at ten units from an inscribed-ball center.
///
/// Every returned point passes the strict interiority test.
pub fn sample_interior(body: &ConvexBody, rng_seed: u64, count: usize) -> Result<Vec<Vector>> {
    let mut rng = rng::stream(rng_seed, rng::streams::SAMPLE);
    let mut out = Vec::with_capacity(count);
    let budget = 1000 * count + 10_000;
    let mut attempts = 0;
    let hbox = match body {
        ConvexBody::HPolytope(_) => Some(sampling_box(body)?),
        _ => None,
    };
    while out.len() < count {
        attempts += 1;
        if attempts > budget {
            return Err(Error::Sampling(format!(
                "accepted {} of {count} points after {budget} attempts",
                out.len()
            )));
        }
        let p = match body {
            ConvexBody::Ball(b) => {
                let dir = gaussian(&mut rng, b.center().dim());
                let n = dir.norm();
                if n == 0.0 {
                    continue;
                }
                let u: f64 = rng.random();
                let rho = BALL_SHRINK * b.radius() * u.powf(1.0 / dir.dim() as f64);
                b.center().along(&dir, rho / n)
            }
            ConvexBody::VPolytope(v) => {
                let w: Vec<f64> = v.vertices().iter().map(|_| Exp1.sample(&mut rng)).collect();
                let total: f64 = w.iter().sum();
                let mut p = Vector::zeros(v.vertices()[0].dim());
                for (wi, vi) in w.iter().zip(v.vertices()) {
                    p = p.along(vi, wi / total);
                }
                p
            }
            ConvexBody::HPolytope(_) => {
                let bx = hbox.as_ref().expect("box computed for H-polytopes");
                let coords = bx.iter().map(|&(lo, hi)| rng.random_range(lo..=hi)).collect();
                Vector::new(coords)?
            }
        };
        if body.interior_depth(&p)? > body.margin() {
            out.push(p);
        }
    }
    Ok(out)
}

pub(crate) fn gaussian(rng: &mut Rng, dim: usize) -> Vector {
    let coords = (0..dim).map(|_| StandardNormal.sample(rng)).collect();
    Vector::new(coords).expect("gaussian samples are finite")
}

fn sampling_box(body: &ConvexBody) -> Result<Vec<(f64, f64)>> {
    if let Some(bbox) = body.bounding_box() {
        return Ok(bbox);
    }
    let (center, radius) = inscribed_ball(body)?;
    let reach = 10.0 * radius.max(1.0);
    let dim = body.dim();
    (0..dim)
        .map(|j| {
            let hi = body.support(&Vector::axis(dim, j, 1.0))?.finite();
            let lo = body.support(&Vector::axis(dim, j, -1.0))?.finite().map(|v| -v);
            Ok((
                lo.unwrap_or(center[j] - reach),
                hi.unwrap_or(center[j] + reach),
            ))
        })
        .collect()
}

/// Largest ball inside an H-polytope, radius capped at 1.
fn inscribed_ball(body: &ConvexBody) -> Result<(Vector, f64)> {
    let h = body
        .as_hpolytope()
        .expect("inscribed ball is only needed for H-polytopes");
    let dim = body.dim();
    // variables (x, r): ⟨a, x⟩ + ‖a‖ r <= b, r <= 1
    let mut rows: Vec<Vector> = h
        .rows()
        .iter()
        .map(|a| {
            let mut r = a.as_slice().to_vec();
            r.push(a.norm());
            Vector::new(r)
        })
        .collect::<Result<_>>()?;
    rows.push(Vector::axis(dim + 1, dim, 1.0));
    let mut rhs = h.rhs().to_vec();
    rhs.push(1.0);
    match lp_maximize(&Vector::axis(dim + 1, dim, 1.0), &rows, &rhs)? {
        LpOutcome::Optimal { value, argmax } if value > body.margin() => {
            let center = Vector::new(argmax.as_slice()[..dim].to_vec())?;
            Ok((center, value))
        }
        _ => Err(Error::Sampling("body has empty interior".into())),
    }
}
