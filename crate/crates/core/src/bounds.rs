//! Universal variation bounds for convex functions `f: C → [m, M]`:
//!
//! ```text
//! −(M − m)/τ(y, x)  <=  f(y) − f(x)  <=  (M − m)/τ(x, y)
//! ```
//!
//! together with their Funk/Thompson/Hilbert forms, and a falsifier that
//! checks a claimed bounded convex function against them on finite pair sets.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::{self, ConvexBody};
use crate::metrics::{self, MetricValue};
use crate::vector::{ExtReal, Vector};

/// Default absolute tolerance for comparing observed variations to bounds.
pub const TOL_CERT: f64 = 1e-9;

/// A function on a convex body that claims to be convex with values in
/// `[m, M]`. The claim is only ever falsified, never proven.
pub trait BoundedConvexFn: Sync {
    fn eval(&self, z: &Vector) -> Result<f64>;

    /// Declared `(m, M)`.
    fn range(&self) -> (f64, f64);
}

/// Adapts a closure and a declared range.
pub struct FnWithRange<F> {
    f: F,
    m: f64,
    big_m: f64,
}

impl<F: Fn(&Vector) -> f64 + Sync> FnWithRange<F> {
    pub fn new(f: F, m: f64, big_m: f64) -> Result<Self> {
        check_range(m, big_m)?;
        Ok(FnWithRange { f, m, big_m })
    }
}

impl<F: Fn(&Vector) -> f64 + Sync> BoundedConvexFn for FnWithRange<F> {
    fn eval(&self, z: &Vector) -> Result<f64> {
        Ok((self.f)(z))
    }

    fn range(&self) -> (f64, f64) {
        (self.m, self.big_m)
    }
}

pub(crate) fn check_range(m: f64, big_m: f64) -> Result<()> {
    if m.is_finite() && big_m.is_finite() && m <= big_m {
        Ok(())
    } else {
        Err(Error::InvalidRange { m, big_m })
    }
}

/// Negation that maps `0` to `+0`.
fn neg_or_zero(v: f64) -> f64 {
    if v == 0.0 {
        0.0
    } else {
        -v
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BoundsInterval {
    pub lower: f64,
    pub upper: f64,
    pub m: f64,
    #[serde(rename = "M")]
    pub big_m: f64,
}

pub fn variation_bounds(
    body: &ConvexBody,
    x: &Vector,
    y: &Vector,
    m: f64,
    big_m: f64,
) -> Result<BoundsInterval> {
    check_range(m, big_m)?;
    let (fwd, bwd) = taus(body, x, y)?;
    Ok(interval_from_taus(fwd, bwd, m, big_m))
}

fn taus(body: &ConvexBody, x: &Vector, y: &Vector) -> Result<(ExtReal, ExtReal)> {
    body.require_interior(x)?;
    body.require_interior(y)?;
    Ok((
        geometry::tau_interior(body, x, y)?,
        geometry::tau_interior(body, y, x)?,
    ))
}

fn interval_from_taus(fwd: ExtReal, bwd: ExtReal, m: f64, big_m: f64) -> BoundsInterval {
    let span = big_m - m;
    BoundsInterval {
        lower: neg_or_zero(span * bwd.recip()),
        upper: span * fwd.recip(),
        m,
        big_m,
    }
}

/// Bounds rewritten through the metrics.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MetricFormBounds {
    /// `−(M−m)(1 − e^{−F(y,x)}) <= Δf <= (M−m)(1 − e^{−F(x,y)})`; equal to
    /// [`variation_bounds`] up to rounding.
    pub funk: BoundsInterval,
    /// `|Δf| <= (M−m)(1 − e^{−T(x,y)})`.
    pub thompson: f64,
    /// `|Δf| <= (M−m)(1 − e^{−2H(x,y)})`.
    pub hilbert: f64,
}

pub fn metric_form_bounds(
    body: &ConvexBody,
    x: &Vector,
    y: &Vector,
    m: f64,
    big_m: f64,
) -> Result<MetricFormBounds> {
    check_range(m, big_m)?;
    let (fwd, bwd) = metrics::funk_pair(body, x, y)?;
    Ok(metric_form_from_funk(fwd, bwd, m, big_m))
}

/// `1 − e^{−s}` without cancellation.
fn one_minus_exp_neg(s: f64) -> f64 {
    -(-s).exp_m1()
}

fn metric_form_from_funk(fwd: MetricValue, bwd: MetricValue, m: f64, big_m: f64) -> MetricFormBounds {
    let span = big_m - m;
    let thompson = fwd.value.max(bwd.value);
    let hilbert = 0.5 * (fwd.value + bwd.value);
    MetricFormBounds {
        funk: BoundsInterval {
            lower: neg_or_zero(span * one_minus_exp_neg(bwd.value)),
            upper: span * one_minus_exp_neg(fwd.value),
            m,
            big_m,
        },
        thompson: span * one_minus_exp_neg(thompson),
        hilbert: span * one_minus_exp_neg(2.0 * hilbert),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LipschitzCertificate {
    pub pair: (Vector, Vector),
    /// `|f(y) − f(x)|`
    pub lhs: f64,
    /// `(M − m)·T(x, y)`
    pub thompson_rhs: f64,
    /// `2(M − m)·H(x, y)`
    pub hilbert_rhs: f64,
    pub thompson_pass: bool,
    pub hilbert_pass: bool,
}

impl LipschitzCertificate {
    pub fn pass(&self) -> bool {
        self.thompson_pass && self.hilbert_pass
    }
}

fn eval_in_range<F: BoundedConvexFn + ?Sized>(f: &F, z: &Vector, tol: f64) -> Result<f64> {
    let (m, big_m) = f.range();
    let value = f.eval(z)?;
    if value >= m - tol && value <= big_m + tol {
        Ok(value)
    } else {
        Err(Error::RangeViolation { value, m, big_m })
    }
}

/// Checks `|Δf| <= (M−m)·T` and `|Δf| <= 2(M−m)·H` on each pair, within
/// [`TOL_CERT`].
pub fn lipschitz_certificates<F: BoundedConvexFn + ?Sized>(
    body: &ConvexBody,
    f: &F,
    pairs: &[(Vector, Vector)],
) -> Result<Vec<LipschitzCertificate>> {
    let (m, big_m) = f.range();
    check_range(m, big_m)?;
    let span = big_m - m;
    pairs
        .par_iter()
        .map(|(x, y)| {
            let (fwd, bwd) = metrics::funk_pair(body, x, y)?;
            let lhs = (eval_in_range(f, y, TOL_CERT)? - eval_in_range(f, x, TOL_CERT)?).abs();
            let thompson_rhs = span * fwd.value.max(bwd.value);
            let hilbert_rhs = 2.0 * span * (0.5 * (fwd.value + bwd.value));
            Ok(LipschitzCertificate {
                pair: (x.clone(), y.clone()),
                lhs,
                thompson_rhs,
                hilbert_rhs,
                thompson_pass: lhs <= thompson_rhs + TOL_CERT,
                hilbert_pass: lhs <= hilbert_rhs + TOL_CERT,
            })
        })
        .collect()
}

/// Outcome of checking one pair against the variation bounds.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundReport {
    pub pair: (Vector, Vector),
    /// `f(y) − f(x)`
    pub observed: f64,
    pub interval: BoundsInterval,
    /// `observed − lower`
    pub slack_lower: f64,
    /// `upper − observed`
    pub slack_upper: f64,
    pub pass: bool,
}

/// Evaluates the variation bounds on every pair. A failing report is a
/// witness that `f` is not a convex function on the body with values in its
/// declared range. Reports come back in input order.
pub fn certify<F: BoundedConvexFn + ?Sized>(
    body: &ConvexBody,
    f: &F,
    pairs: &[(Vector, Vector)],
    tol_cert: f64,
) -> Result<Vec<BoundReport>> {
    let (m, big_m) = f.range();
    check_range(m, big_m)?;
    pairs
        .par_iter()
        .map(|(x, y)| {
            let (fwd, bwd) = taus(body, x, y)?;
            let interval = interval_from_taus(fwd, bwd, m, big_m);
            let observed = eval_in_range(f, y, tol_cert)? - eval_in_range(f, x, tol_cert)?;
            Ok(BoundReport {
                pair: (x.clone(), y.clone()),
                observed,
                interval,
                slack_lower: observed - interval.lower,
                slack_upper: interval.upper - observed,
                pass: interval.lower - tol_cert <= observed && observed <= interval.upper + tol_cert,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::sample_interior;

    fn v(x: &[f64]) -> Vector {
        Vector::new(x.to_vec()).unwrap()
    }

    fn unit_interval() -> ConvexBody {
        ConvexBody::hpolytope(vec![vec![1.0], vec![-1.0]], vec![1.0, 0.0]).unwrap()
    }

    fn seeded_pairs(body: &ConvexBody, seed: u64, n: usize) -> Vec<(Vector, Vector)> {
        let pts = sample_interior(body, seed, 2 * n).unwrap();
        pts.chunks(2).map(|c| (c[0].clone(), c[1].clone())).collect()
    }

    #[test]
    fn variation_bound_examples() {
        // τ(0.25, 0.5) = 3, τ(0.5, 0.25) = 2
        let b = variation_bounds(&unit_interval(), &v(&[0.25]), &v(&[0.5]), 0.0, 1.0).unwrap();
        assert!((b.lower + 0.5).abs() < 1e-15);
        assert!((b.upper - 1.0 / 3.0).abs() < 1e-15);

        let b = variation_bounds(&unit_interval(), &v(&[0.25]), &v(&[0.5]), 2.0, 2.0).unwrap();
        assert_eq!((b.lower, b.upper), (0.0, 0.0));
        assert!(b.lower.is_sign_positive());

        let half = ConvexBody::hpolytope(vec![vec![-1.0]], vec![0.0]).unwrap();
        let b = variation_bounds(&half, &v(&[1.0]), &v(&[2.0]), 0.0, 1.0).unwrap();
        assert_eq!(b.upper, 0.0);
        assert!((b.lower + 0.5).abs() < 1e-15);
    }

    #[test]
    fn invalid_range_is_rejected() {
        let err = variation_bounds(&unit_interval(), &v(&[0.25]), &v(&[0.5]), 1.0, 0.0);
        assert!(matches!(err, Err(Error::InvalidRange { .. })));
    }

    #[test]
    fn metric_form_examples() {
        let mf = metric_form_bounds(&unit_interval(), &v(&[0.25]), &v(&[0.5]), 0.0, 1.0).unwrap();
        assert!((mf.funk.lower + 0.5).abs() < 1e-12);
        assert!((mf.funk.upper - 1.0 / 3.0).abs() < 1e-12);
        assert!((mf.thompson - 0.5).abs() < 1e-12);
        assert!((mf.hilbert - 2.0 / 3.0).abs() < 1e-12);

        let p = v(&[0.3]);
        let mf = metric_form_bounds(&unit_interval(), &p, &p, 0.0, 1.0).unwrap();
        assert_eq!((mf.funk.lower, mf.funk.upper, mf.thompson, mf.hilbert), (0.0, 0.0, 0.0, 0.0));

        let disk = ConvexBody::ball(vec![0.0, 0.0], 1.0).unwrap();
        let (a, b) = (v(&[0.25, 0.0]), v(&[-0.25, 0.0]));
        let ab = metric_form_bounds(&disk, &a, &b, 0.0, 1.0).unwrap();
        let ba = metric_form_bounds(&disk, &b, &a, 0.0, 1.0).unwrap();
        assert_eq!(ab.thompson, ba.thompson);
        assert_eq!(ab.hilbert, ba.hilbert);
    }

    #[test]
    fn lipschitz_examples() {
        let body = unit_interval();
        let id = FnWithRange::new(|z: &Vector| z[0], 0.0, 1.0).unwrap();
        let c = &lipschitz_certificates(&body, &id, &[(v(&[0.25]), v(&[0.5]))]).unwrap()[0];
        assert!((c.lhs - 0.25).abs() < 1e-15);
        assert!((c.thompson_rhs - 2f64.ln()).abs() < 1e-12);
        assert!((c.hilbert_rhs - 3f64.ln()).abs() < 1e-12);
        assert!(c.pass());

        let constant = FnWithRange::new(|_: &Vector| 0.5, 0.0, 1.0).unwrap();
        let certs = lipschitz_certificates(&body, &constant, &seeded_pairs(&body, 4, 20)).unwrap();
        assert!(certs.iter().all(|c| c.lhs == 0.0 && c.pass()));
    }

    #[test]
    fn certify_identity_and_square() {
        let body = unit_interval();
        let id = FnWithRange::new(|z: &Vector| z[0], 0.0, 1.0).unwrap();
        let r = &certify(&body, &id, &[(v(&[0.25]), v(&[0.5]))], TOL_CERT).unwrap()[0];
        assert!(r.pass);
        assert!((r.observed - 0.25).abs() < 1e-15);
        assert!((r.slack_upper - (1.0 / 3.0 - 0.25)).abs() < 1e-15);

        let sq = FnWithRange::new(|z: &Vector| z[0] * z[0], 0.0, 1.0).unwrap();
        let reports = certify(&body, &sq, &seeded_pairs(&body, 11, 100), TOL_CERT).unwrap();
        assert_eq!(reports.len(), 100);
        assert!(reports.iter().all(|r| r.pass));
    }

    #[test]
    fn certify_falsifies_rescaled_sine() {
        let body = unit_interval();
        let f = FnWithRange::new(|z: &Vector| 0.5 * ((6.0 * z[0]).sin() + 1.0), 0.0, 1.0).unwrap();
        let pairs = seeded_pairs(&body, 5, 500);
        let reports = certify(&body, &f, &pairs, TOL_CERT).unwrap();
        // brute-force scan of the same pairs for a violated upper bound
        let scan = pairs.iter().any(|(x, y)| {
            let t = geometry::tau(&body, x, y).unwrap().finite().unwrap();
            f.eval(y).unwrap() - f.eval(x).unwrap() > 1.0 / t + TOL_CERT
                || f.eval(x).unwrap() - f.eval(y).unwrap()
                    > 1.0 / geometry::tau(&body, y, x).unwrap().finite().unwrap() + TOL_CERT
        });
        assert!(scan);
        assert!(reports.iter().any(|r| !r.pass));
    }

    #[test]
    fn range_violation_is_reported() {
        let body = unit_interval();
        let f = FnWithRange::new(|z: &Vector| 2.0 * z[0], 0.0, 1.0).unwrap();
        let err = certify(&body, &f, &[(v(&[0.25]), v(&[0.75]))], TOL_CERT).unwrap_err();
        assert!(matches!(err, Error::RangeViolation { .. }));
    }

    #[test]
    fn report_order_matches_input() {
        let body = unit_interval();
        let id = FnWithRange::new(|z: &Vector| z[0], 0.0, 1.0).unwrap();
        let pairs = seeded_pairs(&body, 8, 64);
        let reports = certify(&body, &id, &pairs, TOL_CERT).unwrap();
        for (r, p) in reports.iter().zip(&pairs) {
            assert_eq!(&r.pair, p);
        }
    }

    #[test]
    fn report_serializes_named_fields() {
        let body = unit_interval();
        let id = FnWithRange::new(|z: &Vector| z[0], 0.0, 1.0).unwrap();
        let r = &certify(&body, &id, &[(v(&[0.25]), v(&[0.5]))], TOL_CERT).unwrap()[0];
        let json: serde_json::Value = serde_json::to_value(r).unwrap();
        for key in ["pair", "observed", "interval", "slack_lower", "slack_upper", "pass"] {
            assert!(json.get(key).is_some(), "missing {key}");
        }
        assert_eq!(json["interval"]["M"], 1.0);
    }
}
