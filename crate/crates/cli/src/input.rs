use std::fs;
use std::path::Path;

use anyhow::{anyhow, bail, Context, Result};
use cvxmetric::oracles::PiecewiseAffineSpec;
use cvxmetric::{BoundedConvexFn, ConvexBody, FnWithRange, PiecewiseAffineConvexFn, Vector};
use serde::Deserialize;

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))
}

pub fn load_body(path: &Path) -> Result<ConvexBody> {
    let text = read(path)?;
    // serde_json errors end with "at line L column C"
    serde_json::from_str(&text).map_err(|e| anyhow!("malformed body JSON in {}: {e}", path.display()))
}

/// Parses `--name` and checks it against the body's dimension.
pub fn point(name: &str, text: &str, body: &ConvexBody) -> Result<Vector> {
    let p = Vector::parse_csv(text).map_err(|e| anyhow!("--{name}: {e}"))?;
    p.check_dim(body.dim()).with_context(|| format!("--{name}"))?;
    Ok(p)
}

/// Points file: CSV, one point per row, no header.
pub fn load_points(path: &Path, body: &ConvexBody) -> Result<Vec<Vector>> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .from_path(path)
        .with_context(|| format!("cannot read {}", path.display()))?;
    let mut points = Vec::new();
    for (row, record) in reader.records().enumerate() {
        let record = record.with_context(|| format!("{}: row {}", path.display(), row + 1))?;
        let coords = record
            .iter()
            .map(|t| t.parse::<f64>())
            .collect::<Result<Vec<_>, _>>()
            .with_context(|| format!("{}: row {}", path.display(), row + 1))?;
        let p = Vector::new(coords)
            .and_then(|p| p.check_dim(body.dim()).map(|_| p))
            .with_context(|| format!("{}: row {}", path.display(), row + 1))?;
        points.push(p);
    }
    Ok(points)
}

#[derive(Debug, Deserialize)]
struct Fixture {
    #[serde(rename = "fn")]
    function: Option<FnSpec>,
}

#[derive(Debug, Deserialize)]
#[serde(untagged)]
enum FnSpec {
    Builtin(BuiltinSpec),
    Pieces(PiecewiseAffineSpec),
}

/// `f(z) = m + (M − m)·(sin(ω·z₁) + 1)/2`. Stays in `[m, M]` but is not
/// convex, so certification is expected to fail for large enough ω.
#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct BuiltinSpec {
    builtin: String,
    frequency: f64,
    m: f64,
    #[serde(rename = "M")]
    big_m: f64,
}

pub fn load_function(path: &Path, body: &ConvexBody) -> Result<Box<dyn BoundedConvexFn>> {
    let text = read(path)?;
    let fixture: Fixture = serde_json::from_str(&text)
        .map_err(|e| anyhow!("malformed function fixture in {}: {e}", path.display()))?;
    match fixture.function {
        None => bail!("{} has no \"fn\" key", path.display()),
        Some(FnSpec::Pieces(spec)) => Ok(Box::new(PiecewiseAffineConvexFn::from_spec(body, &spec)?)),
        Some(FnSpec::Builtin(b)) => {
            if b.builtin != "sin" {
                bail!("unknown builtin function {:?} (expected \"sin\")", b.builtin);
            }
            let (m, big_m, w) = (b.m, b.big_m, b.frequency);
            let f = FnWithRange::new(move |z: &Vector| m + (big_m - m) * 0.5 * ((w * z[0]).sin() + 1.0), m, big_m)?;
            Ok(Box::new(f))
        }
    }
}
