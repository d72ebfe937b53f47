//! Shared fixtures for the criterion benchmarks in `benches/`.

use cvxmetric::{random_body, sample_interior, BodyKind, ConvexBody, Vector};

/// A seeded body of each representation with `count` interior points.
pub fn fixtures(dim: usize, count: usize) -> Vec<(BodyKind, ConvexBody, Vec<Vector>)> {
    BodyKind::ALL
        .into_iter()
        .map(|kind| {
            let body = random_body(dim, kind, 42).expect("benchmark body");
            let points = sample_interior(&body, 7, count).expect("benchmark points");
            (kind, body, points)
        })
        .collect()
}
