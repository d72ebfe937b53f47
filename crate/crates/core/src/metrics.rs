//! Funk weak metric and its Thompson (max) and Hilbert (mean)
//! symmetrizations.
//!
//! The primary path computes `F(x, y) = −log(1 − 1/τ(x, y))`; [`funk_ratio`]
//! recomputes it from the boundary point with Euclidean norms and is kept as
//! an independent cross-check.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{self, ConvexBody};
use crate::vector::{ExtReal, Vector};

/// τ above this is treated as `+∞`: `1/τ` is below double resolution
/// relative to 1.
pub const TAU_SATURATION: f64 = 1e12;

/// A metric value with a flag recording that some τ exceeded
/// [`TAU_SATURATION`] and was treated as infinite.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MetricValue {
    pub value: f64,
    pub saturated: bool,
}

impl MetricValue {
    const ZERO: MetricValue = MetricValue {
        value: 0.0,
        saturated: false,
    };
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Metric {
    Funk,
    Thompson,
    Hilbert,
}

impl Metric {
    pub fn name(self) -> &'static str {
        match self {
            Metric::Funk => "funk",
            Metric::Thompson => "thompson",
            Metric::Hilbert => "hilbert",
        }
    }
}

impl fmt::Display for Metric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Metric {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "funk" => Ok(Metric::Funk),
            "thompson" => Ok(Metric::Thompson),
            "hilbert" => Ok(Metric::Hilbert),
            _ => Err(format!("unknown metric {s:?} (expected funk, thompson or hilbert)")),
        }
    }
}

/// `−log(1 − 1/τ)`, computed as `−log1p(−1/τ)`; zero for `τ = +∞`.
pub fn funk_from_tau(tau: ExtReal) -> MetricValue {
    match tau {
        ExtReal::PosInf => MetricValue::ZERO,
        ExtReal::Finite(t) if t > TAU_SATURATION => MetricValue {
            value: 0.0,
            saturated: true,
        },
        ExtReal::Finite(t) => MetricValue {
            value: -(-1.0 / t).ln_1p(),
            saturated: false,
        },
    }
}

pub fn funk(body: &ConvexBody, x: &Vector, y: &Vector) -> Result<MetricValue> {
    Ok(funk_from_tau(geometry::tau(body, x, y)?))
}

/// `log(‖x − b‖ / ‖y − b‖)` with `b = b(x, y)`.
pub fn funk_ratio(body: &ConvexBody, x: &Vector, y: &Vector) -> Result<MetricValue> {
    match geometry::tau(body, x, y)? {
        ExtReal::PosInf => Ok(MetricValue::ZERO),
        ExtReal::Finite(t) if t > TAU_SATURATION => Ok(MetricValue {
            value: 0.0,
            saturated: true,
        }),
        ExtReal::Finite(t) => {
            let b = x.along(&(y - x), t);
            Ok(MetricValue {
                value: (x.distance(&b) / y.distance(&b)).ln(),
                saturated: false,
            })
        }
    }
}

/// `(F(x, y), F(y, x))`.
pub fn funk_pair(body: &ConvexBody, x: &Vector, y: &Vector) -> Result<(MetricValue, MetricValue)> {
    body.require_interior(x)?;
    body.require_interior(y)?;
    Ok((
        funk_from_tau(geometry::tau_interior(body, x, y)?),
        funk_from_tau(geometry::tau_interior(body, y, x)?),
    ))
}

fn combine(metric: Metric, fwd: MetricValue, bwd: MetricValue) -> MetricValue {
    let value = match metric {
        Metric::Funk => return fwd,
        Metric::Thompson => fwd.value.max(bwd.value),
        Metric::Hilbert => 0.5 * (fwd.value + bwd.value),
    };
    MetricValue {
        value,
        saturated: fwd.saturated || bwd.saturated,
    }
}

pub fn thompson(body: &ConvexBody, x: &Vector, y: &Vector) -> Result<MetricValue> {
    let (fwd, bwd) = funk_pair(body, x, y)?;
    Ok(combine(Metric::Thompson, fwd, bwd))
}

pub fn hilbert(body: &ConvexBody, x: &Vector, y: &Vector) -> Result<MetricValue> {
    let (fwd, bwd) = funk_pair(body, x, y)?;
    Ok(combine(Metric::Hilbert, fwd, bwd))
}

pub fn metric(body: &ConvexBody, x: &Vector, y: &Vector, which: Metric) -> Result<MetricValue> {
    match which {
        Metric::Funk => funk(body, x, y),
        Metric::Thompson => thompson(body, x, y),
        Metric::Hilbert => hilbert(body, x, y),
    }
}

/// `M[i][j] = metric(pᵢ, pⱼ)`.
///
/// Rows are evaluated in parallel; every entry is a pure function of its
/// two points, so the result is bitwise identical to a sequential loop.
pub fn distance_matrix(body: &ConvexBody, points: &[Vector], which: Metric) -> Result<Vec<Vec<f64>>> {
    for (index, p) in points.iter().enumerate() {
        body.require_interior(p).map_err(|e| Error::Point {
            index,
            source: Box::new(e),
        })?;
    }
    let n = points.len();
    let funk_rows = (0..n)
        .into_par_iter()
        .map(|i| {
            (0..n)
                .map(|j| {
                    if i == j {
                        return Ok(0.0);
                    }
                    geometry::tau_interior(body, &points[i], &points[j])
                        .map(|t| funk_from_tau(t).value)
                        .map_err(|e| Error::MatrixEntry {
                            row: i,
                            col: j,
                            source: Box::new(e),
                        })
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;

    let symmetrize = |f: fn(f64, f64) -> f64| -> Vec<Vec<f64>> {
        (0..n)
            .map(|i| (0..n).map(|j| f(funk_rows[i][j], funk_rows[j][i])).collect())
            .collect()
    };
    Ok(match which {
        Metric::Funk => funk_rows,
        Metric::Thompson => symmetrize(f64::max),
        Metric::Hilbert => symmetrize(|a, b| 0.5 * (a + b)),
    })
}
