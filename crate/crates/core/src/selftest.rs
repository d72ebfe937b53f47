//! Oracle-agreement suite run by `cvxmetric selftest`.
//!
//! Every check draws seeded instances, compares a closed-form quantity with
//! an independent computation, and records the worst discrepancy.

use rayon::prelude::*;
use serde::Serialize;

use crate::bounds::{certify, metric_form_bounds, variation_bounds, TOL_CERT};
use crate::error::Result;
use crate::extremal::attainment_check;
use crate::gauge::{max_subdiff_contains, max_subdiff_hrep, subgradient_of_max_affine, GaugeFn};
use crate::geometry::{self, sample_interior, BodyKind, ConvexBody};
use crate::metrics::{funk, funk_pair, funk_ratio, hilbert, thompson};
use crate::oracles::{hilbert_cross_ratio_oracle, random_body, random_convex_fn, tau_bisection_oracle};
use crate::vector::{ExtReal, Vector};
use crate::Error;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub instances: usize,
    pub max_error: f64,
    pub tolerance: f64,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SelftestReport {
    pub seed: u64,
    pub checks: Vec<Check>,
    pub passed: bool,
}

/// Per-instance seed; distinct instances get well-separated ChaCha keys.
pub fn instance_seed(seed: u64, check: u64, index: usize) -> u64 {
    seed ^ check.wrapping_mul(0xD1B5_4A32_D192_ED03) ^ (index as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15)
}

/// A random bounded body with `count` interior points. Kinds cycle through
/// all representations and dimensions through `1..=max_dim`.
pub fn bounded_instance(seed: u64, index: usize, max_dim: usize, count: usize) -> Result<(ConvexBody, Vec<Vector>)> {
    let kind = BodyKind::ALL[index % 3];
    let dim = 1 + (index / 3) % max_dim;
    let body = random_body(dim, kind, seed)?;
    let points = sample_interior(&body, seed.rotate_left(17), count)?;
    Ok((body, points))
}

/// Folds per-instance errors into a check; any `Err` fails it.
fn summarize(name: impl Into<String>, tolerance: f64, errors: Vec<Result<f64>>) -> Check {
    let instances = errors.len();
    let mut max_error: f64 = 0.0;
    let mut failed = false;
    for e in errors {
        match e {
            Ok(v) if v.is_nan() => failed = true,
            Ok(v) => max_error = max_error.max(v),
            Err(_) => failed = true,
        }
    }
    Check {
        name: name.into(),
        instances,
        max_error,
        tolerance,
        passed: !failed && max_error <= tolerance,
    }
}

fn run<F>(n: usize, f: F) -> Vec<Result<f64>>
where
    F: Fn(usize) -> Result<f64> + Sync + Send,
{
    (0..n).into_par_iter().map(f).collect()
}

fn positive_part(v: f64) -> f64 {
    v.max(0.0)
}

fn tau_oracle(seed: u64, kind: BodyKind, n: usize) -> Check {
    let errors = run(n, |i| {
        let s = instance_seed(seed, 1, i);
        let dim = 1 + i % 8;
        let body = random_body(dim, kind, s)?;
        let p = sample_interior(&body, s.rotate_left(17), 2)?;
        let closed = geometry::tau(&body, &p[0], &p[1])?;
        let oracle = tau_bisection_oracle(&body, &p[0], &p[1], 1e-10)?;
        match (closed, oracle) {
            (ExtReal::Finite(a), ExtReal::Finite(b)) => Ok((a - b).abs() / a),
            (ExtReal::PosInf, ExtReal::PosInf) => Ok(0.0),
            _ => Ok(f64::INFINITY),
        }
    });
    summarize(format!("tau_vs_bisection_{}", kind.name()), 1e-6, errors)
}

fn cross_ratio(seed: u64, n: usize) -> Check {
    let errors = run(n, |i| {
        let s = instance_seed(seed, 2, i);
        let body = if i % 2 == 0 {
            ConvexBody::ball(vec![0.0, 0.0], 1.0)?
        } else {
            bounded_instance(s, i / 2, 6, 0)?.0
        };
        let p = sample_interior(&body, s, 2)?;
        Ok((hilbert(&body, &p[0], &p[1])?.value - hilbert_cross_ratio_oracle(&body, &p[0], &p[1])?).abs())
    });
    summarize("hilbert_vs_cross_ratio", 1e-9, errors)
}

fn funk_identity(seed: u64, n: usize) -> [Check; 2] {
    let pairs: Vec<Result<(f64, f64)>> = (0..n)
        .into_par_iter()
        .map(|i| {
            let (body, p) = bounded_instance(instance_seed(seed, 3, i), i, 8, 2)?;
            let tau = geometry::tau(&body, &p[0], &p[1])?.recip();
            let f = funk(&body, &p[0], &p[1])?.value;
            let r = funk_ratio(&body, &p[0], &p[1])?.value;
            Ok(((-(-f).exp_m1() - tau).abs(), (f - r).abs()))
        })
        .collect();
    let (a, b): (Vec<_>, Vec<_>) = pairs
        .into_iter()
        .map(|r| match r {
            Ok((a, b)) => (Ok(a), Ok(b)),
            Err(e) => (Err(e.clone()), Err(e)),
        })
        .unzip();
    [
        summarize("funk_exp_identity", 1e-12, a),
        summarize("funk_vs_ratio", 1e-9, b),
    ]
}

fn soundness(seed: u64, n: usize) -> Check {
    let errors = run(n, |i| {
        let s = instance_seed(seed, 4, i);
        let (body, p) = bounded_instance(s, i, 8, 2)?;
        let m = -1.0 + (i % 7) as f64 * 0.5;
        let big_m = m + 0.25 + (i % 5) as f64;
        let f = random_convex_fn(&body, m, big_m, 1 + i % 6, s)?;
        let pairs = [(p[0].clone(), p[1].clone()), (p[1].clone(), p[0].clone())];
        let reports = certify(&body, &f, &pairs, TOL_CERT)?;
        if reports.iter().any(|r| !r.pass) {
            return Ok(f64::INFINITY);
        }
        Ok(reports
            .iter()
            .map(|r| positive_part(-r.slack_lower).max(positive_part(-r.slack_upper)))
            .fold(0.0, f64::max))
    });
    summarize("certify_generated_functions", TOL_CERT, errors)
}

fn attainment(seed: u64, n: usize) -> Check {
    let errors = run(n, |i| {
        let s = instance_seed(seed, 5, i);
        let (m, big_m) = (-((i % 3) as f64), 1.0 + (i % 4) as f64);
        let (body, x, y) = match i % 10 {
            // τ(x, y) = ∞: y − x is a recession direction of a halfspace
            0 => {
                let dim = 1 + i % 4;
                let mut row = vec![0.0; dim];
                row[0] = 1.0;
                let body = ConvexBody::hpolytope(vec![row], vec![1.0])?;
                let x = Vector::zeros(dim);
                let y = x.along(&Vector::axis(dim, 0, -1.0), 1.0 + (i % 3) as f64);
                (body, x, y)
            }
            1 => {
                let (body, p) = bounded_instance(s, i, 8, 1)?;
                (body, p[0].clone(), p[0].clone())
            }
            _ => {
                let (body, p) = bounded_instance(s, i, 8, 2)?;
                (body, p[0].clone(), p[1].clone())
            }
        };
        let a = attainment_check(&body, &x, &y, m, big_m)?;
        let err = (a.upper_difference - a.upper_target)
            .abs()
            .max((a.lower_difference - a.lower_target).abs());
        Ok(if a.upper_attained && a.lower_attained { err } else { f64::INFINITY })
    });
    summarize("extremal_attainment", 1e-9, errors)
}

fn domination(seed: u64, n: usize) -> Check {
    let errors = run(n, |i| {
        let (body, p) = bounded_instance(instance_seed(seed, 6, i), i, 8, 2)?;
        let (m, big_m) = (0.0, 1.0 + (i % 3) as f64);
        let span = big_m - m;
        let b = variation_bounds(&body, &p[0], &p[1], m, big_m)?;
        let mf = metric_form_bounds(&body, &p[0], &p[1], m, big_m)?;
        let t = thompson(&body, &p[0], &p[1])?.value;
        let h = hilbert(&body, &p[0], &p[1])?.value;
        let gaps = [
            b.upper - mf.thompson,
            mf.thompson - span * t,
            mf.hilbert - 2.0 * span * h,
        ];
        Ok(gaps.into_iter().map(positive_part).fold(0.0, f64::max))
    });
    summarize("domination_chain", 1e-12, errors)
}

fn gauge_identity(seed: u64, n: usize) -> Check {
    let errors = run(n, |i| {
        let (body, p) = bounded_instance(instance_seed(seed, 7, i), i, 8, 2)?;
        let g = GaugeFn::new(&body, p[0].clone())?;
        let tau = geometry::tau(&body, &p[0], &p[1])?;
        match tau {
            ExtReal::Finite(t) => Ok((g.value(&p[1])? * t - 1.0).abs()),
            ExtReal::PosInf => Ok(f64::INFINITY),
        }
    });
    summarize("gauge_times_tau", 1e-9, errors)
}

fn subdiff_inclusion(seed: u64, n: usize) -> Check {
    let errors = run(n, |i| {
        let s = instance_seed(seed, 8, i);
        let (body, p) = bounded_instance(s, i, 8, 1)?;
        let (m, big_m) = (0.0, 1.0 + (i % 4) as f64);
        let f = random_convex_fn(&body, m, big_m, 1 + i % 5, s)?;
        let zeta = match subgradient_of_max_affine(&f, &p[0]) {
            Ok(z) => z,
            Err(Error::ClampedPoint) => Vector::zeros(body.dim()),
            Err(e) => return Err(e),
        };
        let r = max_subdiff_contains(&body, &p[0], &zeta, m, big_m)?;
        Ok(match r.support_value {
            ExtReal::Finite(v) if r.member => positive_part(v - 1.0),
            _ => f64::INFINITY,
        })
    });
    summarize("subgradient_in_max_subdiff", 1e-9, errors)
}

fn hrep_square(_seed: u64) -> Check {
    let errors = (|| {
        let square = ConvexBody::vpolytope(vec![
            vec![1.0, 1.0],
            vec![1.0, -1.0],
            vec![-1.0, 1.0],
            vec![-1.0, -1.0],
        ])?;
        let o = Vector::zeros(2);
        let diamond = max_subdiff_hrep(&square, &o, 0.0, 1.0)?;
        let mut worst: f64 = 0.0;
        for k in 0..64 {
            let th = k as f64 * std::f64::consts::TAU / 64.0;
            let d = Vector::new(vec![th.cos(), th.sin()])?;
            // support of {|ζ₁| + |ζ₂| <= 1}
            let expected = d[0].abs().max(d[1].abs());
            let got = geometry::support_function(&diamond, &d)?.finite().unwrap_or(f64::INFINITY);
            worst = worst.max((got - expected).abs());
            // boundary points of the diamond are exactly in the polar
            let zeta = Vector::new(vec![th.cos(), th.sin()])?;
            let zeta = &zeta * (1.0 / (zeta[0].abs() + zeta[1].abs()));
            let r = max_subdiff_contains(&square, &o, &zeta, 0.0, 1.0)?;
            let sv = r.support_value.finite().unwrap_or(f64::INFINITY);
            worst = worst.max((sv - 1.0).abs());
        }
        Ok(worst)
    })();
    summarize("hrep_square_diamond", 1e-12, vec![errors])
}

fn metric_axioms(seed: u64, n: usize) -> Check {
    let errors = run(n, |i| {
        let (body, p) = bounded_instance(instance_seed(seed, 9, i), i, 8, 3)?;
        let (x, y, z) = (&p[0], &p[1], &p[2]);
        let f = |a: &Vector, b: &Vector| funk(&body, a, b).map(|v| v.value);
        let mut err = positive_part(f(x, z)? - f(x, y)? - f(y, z)?);
        if f(x, x)? != 0.0 {
            err = f64::INFINITY;
        }
        let (t, tr) = (thompson(&body, x, y)?.value, thompson(&body, y, x)?.value);
        let (h, hr) = (hilbert(&body, x, y)?.value, hilbert(&body, y, x)?.value);
        if t != tr || h != hr {
            err = f64::INFINITY;
        }
        err = err.max(positive_part(h - t)).max(positive_part(t - 2.0 * h));
        Ok(err)
    });
    summarize("metric_axioms", 1e-9, errors)
}

fn generated_convexity(seed: u64, n: usize) -> Check {
    let errors = run(n, |i| {
        let s = instance_seed(seed, 10, i);
        let (body, p) = bounded_instance(s, i, 8, 2)?;
        let f = random_convex_fn(&body, -1.0, 1.0, 1 + i % 6, s)?;
        let mid = p[0].along(&(&p[1] - &p[0]), 0.5);
        let (a, b, c) = (f.eval(&p[0])?, f.eval(&p[1])?, f.eval(&mid)?);
        let range = [a, b, c].into_iter().map(|v| positive_part(v - 1.0).max(positive_part(-1.0 - v)));
        Ok(positive_part(c - 0.5 * (a + b)).max(range.fold(0.0, f64::max)))
    });
    summarize("generated_fn_convexity", 1e-12, errors)
}

fn funk_pair_consistency(seed: u64, n: usize) -> Check {
    let errors = run(n, |i| {
        let (body, p) = bounded_instance(instance_seed(seed, 11, i), i, 8, 2)?;
        let (fwd, bwd) = funk_pair(&body, &p[0], &p[1])?;
        let a = funk(&body, &p[0], &p[1])?;
        let b = funk(&body, &p[1], &p[0])?;
        Ok(if fwd == a && bwd == b { 0.0 } else { f64::INFINITY })
    });
    summarize("funk_pair_consistency", 0.0, errors)
}

/// Runs every check. Instance counts meet the acceptance minimums.
pub fn run_selftest(seed: u64) -> SelftestReport {
    let mut checks = Vec::new();
    for kind in BodyKind::ALL {
        checks.push(tau_oracle(seed, kind, 500));
    }
    checks.push(cross_ratio(seed, 400));
    checks.extend(funk_identity(seed, 500));
    checks.push(soundness(seed, 1000));
    checks.push(attainment(seed, 500));
    checks.push(domination(seed, 500));
    checks.push(gauge_identity(seed, 500));
    checks.push(subdiff_inclusion(seed, 500));
    checks.push(hrep_square(seed));
    checks.push(metric_axioms(seed, 600));
    checks.push(generated_convexity(seed, 1000));
    checks.push(funk_pair_consistency(seed, 200));
    let passed = checks.iter().all(|c| c.passed);
    SelftestReport { seed, checks, passed }
}
