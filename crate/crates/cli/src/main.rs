mod args;
mod input;
mod output;

use std::path::Path;
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{anyhow, bail, Result};
use clap::Parser;
use cvxmetric::geometry::tau;
use cvxmetric::{
    attainment_check, build_extremal, certify, distance_matrix, gauge_value, max_subdiff_contains,
    metric_form_bounds, run_selftest, sample_interior, variation_bounds, BoundReport, ConvexBody,
    Error, GaugeFn, Metric, Vector,
};
use serde_json::json;

use args::{
    CertifyArgs, Cli, Command, ExtremalArgs, Format, MatrixArgs, PairArgs, RangePairArgs, SelftestArgs,
    SubdiffArgs,
};
use output::{coords, ext, num, Table};

/// Exit status of a command that ran to completion.
enum Outcome {
    Success,
    /// A bound was violated: exit 2.
    Falsified,
    /// The self-test found a disagreement: exit 1.
    SelftestFailed,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            // usage errors exit 1; 2 is reserved for falsification
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli.command) {
        Ok(Outcome::Success) => ExitCode::SUCCESS,
        Ok(Outcome::Falsified) => ExitCode::from(2),
        Ok(Outcome::SelftestFailed) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}

fn run(command: Command) -> Result<Outcome> {
    match command {
        Command::Tau(a) => pair_verb(a, PairVerb::Tau),
        Command::Funk(a) => pair_verb(a, PairVerb::Metric(Metric::Funk)),
        Command::Thompson(a) => pair_verb(a, PairVerb::Metric(Metric::Thompson)),
        Command::Hilbert(a) => pair_verb(a, PairVerb::Metric(Metric::Hilbert)),
        Command::Gauge(a) => pair_verb(a, PairVerb::Gauge),
        Command::Matrix(a) => matrix(a),
        Command::Bounds(a) => bounds(a),
        Command::Certify(a) => certify_cmd(a),
        Command::Extremal(a) => extremal(a),
        Command::Subdiff(a) => subdiff(a),
        Command::Selftest(a) => selftest(a),
    }
}

fn interior(name: &str, body: &ConvexBody, p: &Vector) -> Result<()> {
    body.require_interior(p)
        .map_err(|e| anyhow!("point --{name} ({p}): {e}"))
}

/// Interiority of both points, then the ray exits that the verb needs.
/// Numerically-on-the-boundary failures name the point next to the exit.
fn check_pair(body: &ConvexBody, x: &Vector, y: &Vector, both_ways: bool) -> Result<()> {
    interior("x", body, x)?;
    interior("y", body, y)?;
    let named = |name: &str, p: &Vector, e: Error| match e {
        Error::NearBoundary { .. } => anyhow!("point --{name} ({p}): {e}"),
        e => e.into(),
    };
    tau(body, x, y).map_err(|e| named("y", y, e))?;
    if both_ways {
        tau(body, y, x).map_err(|e| named("x", x, e))?;
    }
    Ok(())
}

fn load_pair(a: &PairArgs) -> Result<(ConvexBody, Vector, Vector)> {
    let body = input::load_body(&a.common.body)?;
    let x = input::point("x", &a.x, &body)?;
    let y = input::point("y", &a.y, &body)?;
    Ok((body, x, y))
}

fn emit(format: Format, out: Option<&Path>, doc: serde_json::Value, table: Table) -> Result<()> {
    match format {
        Format::Json => output::json(&doc, out),
        Format::Csv => output::csv(&table, out),
    }
}

enum PairVerb {
    Tau,
    Metric(Metric),
    Gauge,
}

fn pair_verb(a: PairArgs, verb: PairVerb) -> Result<Outcome> {
    let (body, x, y) = load_pair(&a)?;
    let format = a.common.format.unwrap_or(Format::Json);
    let out = a.common.out.as_deref();
    match verb {
        PairVerb::Tau => {
            check_pair(&body, &x, &y, false)?;
            let t = tau(&body, &x, &y)?;
            let mut table = Table::new(["tau"]);
            table.push(vec![ext(t)]);
            emit(format, out, json!({ "tau": t }), table)?;
        }
        PairVerb::Metric(which) => {
            check_pair(&body, &x, &y, which != Metric::Funk)?;
            let v = cvxmetric::metric(&body, &x, &y, which)?;
            let mut doc = json!({ which.name(): v.value });
            if v.saturated {
                doc["saturated"] = json!(true);
            }
            let mut table = Table::new([which.name(), "saturated"]);
            table.push(vec![num(v.value), v.saturated.to_string()]);
            emit(format, out, doc, table)?;
        }
        PairVerb::Gauge => {
            interior("x", &body, &x)?;
            interior("y", &body, &y)?;
            let g = gauge_value(&GaugeFn::new(&body, x.clone())?, &y)?;
            let mut table = Table::new(["gauge"]);
            table.push(vec![num(g)]);
            emit(format, out, json!({ "gauge": g }), table)?;
        }
    }
    Ok(Outcome::Success)
}

fn matrix(a: MatrixArgs) -> Result<Outcome> {
    let body = input::load_body(&a.common.body)?;
    let points = input::load_points(&a.points, &body)?;
    let m = distance_matrix(&body, &points, a.metric).map_err(|e| match e {
        Error::Point { index, source } => anyhow!("{} row {}: {source}", a.points.display(), index + 1),
        e => e.into(),
    })?;
    let mut table = Table::new(Vec::<String>::new());
    for row in &m {
        table.push(row.iter().map(|&v| num(v)).collect());
    }
    let doc = json!({ "metric": a.metric.name(), "matrix": m });
    emit(a.common.format.unwrap_or(Format::Json), a.common.out.as_deref(), doc, table)?;
    Ok(Outcome::Success)
}

fn bounds(a: RangePairArgs) -> Result<Outcome> {
    let (body, x, y) = load_pair(&a.pair)?;
    check_pair(&body, &x, &y, true)?;
    let (m, big_m) = (a.range.m, a.range.big_m);
    let b = variation_bounds(&body, &x, &y, m, big_m)?;
    let mf = metric_form_bounds(&body, &x, &y, m, big_m)?;
    let t = cvxmetric::thompson(&body, &x, &y)?.value;
    let h = cvxmetric::hilbert(&body, &x, &y)?.value;
    let span = big_m - m;
    let doc = json!({
        "tau_xy": tau(&body, &x, &y)?,
        "tau_yx": tau(&body, &y, &x)?,
        "lower": b.lower,
        "upper": b.upper,
        "m": m,
        "M": big_m,
        "funk_form": { "lower": mf.funk.lower, "upper": mf.funk.upper },
        "thompson_form": mf.thompson,
        "hilbert_form": mf.hilbert,
        "thompson_lipschitz": span * t,
        "hilbert_lipschitz": 2.0 * span * h,
    });
    let mut table = Table::new([
        "lower",
        "upper",
        "funk_lower",
        "funk_upper",
        "thompson_form",
        "hilbert_form",
        "thompson_lipschitz",
        "hilbert_lipschitz",
    ]);
    table.push(
        [b.lower, b.upper, mf.funk.lower, mf.funk.upper, mf.thompson, mf.hilbert, span * t, 2.0 * span * h]
            .into_iter()
            .map(num)
            .collect(),
    );
    emit(a.pair.common.format.unwrap_or(Format::Json), a.pair.common.out.as_deref(), doc, table)?;
    Ok(Outcome::Success)
}

fn certify_cmd(a: CertifyArgs) -> Result<Outcome> {
    let body = input::load_body(&a.common.body)?;
    let f = input::load_function(&a.common.body, &body)?;
    let pairs: Vec<(Vector, Vector)> = if let (Some(x), Some(y)) = (&a.x, &a.y) {
        let (x, y) = (input::point("x", x, &body)?, input::point("y", y, &body)?);
        check_pair(&body, &x, &y, true)?;
        vec![(x, y)]
    } else if let Some(path) = &a.points {
        let pts = input::load_points(path, &body)?;
        if pts.len() % 2 != 0 {
            bail!("{}: expected an even number of rows (x, y alternating)", path.display());
        }
        for (i, p) in pts.iter().enumerate() {
            interior(&format!("points row {}", i + 1), &body, p)?;
        }
        pts.chunks(2).map(|c| (c[0].clone(), c[1].clone())).collect()
    } else {
        let pts = sample_interior(&body, a.seed.seed, 2 * a.pairs)?;
        pts.chunks(2).map(|c| (c[0].clone(), c[1].clone())).collect()
    };
    let format = a.common.format.unwrap_or(Format::Json);
    let out = a.common.out.as_deref();

    let reports = match certify(&body, f.as_ref(), &pairs, a.tol) {
        Ok(r) => r,
        Err(e @ Error::RangeViolation { .. }) => {
            eprintln!("certification failed: {e}");
            let doc = json!({ "passed": false, "pairs": pairs.len(), "reason": e.to_string() });
            let mut table = Table::new(["passed", "reason"]);
            table.push(vec!["false".into(), e.to_string()]);
            emit(format, out, doc, table)?;
            return Ok(Outcome::Falsified);
        }
        Err(e) => return Err(e.into()),
    };
    let failing: Vec<&BoundReport> = reports.iter().filter(|r| !r.pass).collect();
    let tightest = reports
        .iter()
        .min_by(|a, b| a.slack_lower.min(a.slack_upper).total_cmp(&b.slack_lower.min(b.slack_upper)));
    let passed = failing.is_empty();

    let dim = body.dim();
    let mut header: Vec<String> = (1..=dim).map(|i| format!("x{i}")).collect();
    header.extend((1..=dim).map(|i| format!("y{i}")));
    header.extend(["observed", "lower", "upper", "slack_lower", "slack_upper", "pass"].map(String::from));
    let mut table = Table::new(header);
    for r in &reports {
        let mut row: Vec<String> = coords(&r.pair.0).chain(coords(&r.pair.1)).collect();
        row.extend([r.observed, r.interval.lower, r.interval.upper, r.slack_lower, r.slack_upper].map(num));
        row.push(r.pass.to_string());
        table.push(row);
    }
    let doc = json!({
        "passed": passed,
        "pairs": reports.len(),
        "failures": failing.len(),
        "tol": a.tol,
        "tightest": tightest,
        "failing": failing.iter().take(10).collect::<Vec<_>>(),
    });
    emit(format, out, doc, table)?;
    if passed {
        Ok(Outcome::Success)
    } else {
        eprintln!("certification failed on {} of {} pairs", failing.len(), reports.len());
        Ok(Outcome::Falsified)
    }
}

/// Cell centers of an `n`-per-axis grid over the bounding box.
fn grid_points(body: &ConvexBody, n: usize) -> Result<Vec<Vector>> {
    if body.dim() > 2 {
        bail!("gridding limited to dim ≤ 2");
    }
    if n == 0 {
        bail!("--grid must be at least 1");
    }
    let bbox = body
        .bounding_box()
        .ok_or_else(|| anyhow!("gridding needs a bounded body"))?;
    let axis = |(lo, hi): (f64, f64)| -> Vec<f64> {
        (0..n).map(|k| lo + (k as f64 + 0.5) / n as f64 * (hi - lo)).collect()
    };
    let axes: Vec<Vec<f64>> = bbox.into_iter().map(axis).collect();
    let cells: Vec<Vec<f64>> = match axes.as_slice() {
        [a] => a.iter().map(|&u| vec![u]).collect(),
        [a, b] => a.iter().flat_map(|&u| b.iter().map(move |&v| vec![u, v])).collect(),
        _ => unreachable!(),
    };
    let mut points = Vec::new();
    for c in cells {
        let p = Vector::new(c)?;
        if body.require_interior(&p).is_ok() {
            points.push(p);
        }
    }
    Ok(points)
}

fn extremal(a: ExtremalArgs) -> Result<Outcome> {
    let (body, x, y) = load_pair(&a.pair)?;
    check_pair(&body, &x, &y, true)?;
    let (m, big_m) = (a.range.m, a.range.big_m);
    let f = build_extremal(&body, &x, &y, m, big_m, a.orientation)?;
    let out = a.pair.common.out.as_deref();

    let evaluated = match (&a.grid, &a.points) {
        (Some(n), _) => Some(grid_points(&body, *n)?),
        (None, Some(path)) => {
            let pts = input::load_points(path, &body)?;
            for (i, p) in pts.iter().enumerate() {
                interior(&format!("points row {}", i + 1), &body, p)?;
            }
            Some(pts)
        }
        (None, None) => None,
    };
    let default_format = if a.grid.is_some() { Format::Csv } else { Format::Json };
    let format = a.pair.common.format.unwrap_or(default_format);

    let mut header: Vec<String> = (1..=body.dim()).map(|i| format!("z{i}")).collect();
    header.push("f".into());
    let mut table = Table::new(header);
    let mut values = Vec::new();
    if let Some(pts) = &evaluated {
        for p in pts {
            let v = f.eval(p)?;
            table.push(coords(p).chain([num(v)]).collect());
            values.push(json!({ "z": p, "f": v }));
        }
    }
    let doc = if evaluated.is_some() {
        json!({ "orientation": a.orientation, "values": values })
    } else {
        let att = attainment_check(&body, &x, &y, m, big_m)?;
        let (fx, fy) = (f.eval(&x)?, f.eval(&y)?);
        table.push(coords(&x).chain([num(fx)]).collect());
        table.push(coords(&y).chain([num(fy)]).collect());
        json!({
            "orientation": a.orientation,
            "direction": f.direction(),
            "constant": f.is_constant(),
            "f_x": fx,
            "f_y": fy,
            "attainment": att,
        })
    };
    emit(format, out, doc, table)?;
    Ok(Outcome::Success)
}

fn subdiff(a: SubdiffArgs) -> Result<Outcome> {
    let body = input::load_body(&a.common.body)?;
    let x0 = input::point("x", &a.x, &body)?;
    let zeta = input::point("zeta", &a.zeta, &body)?;
    interior("x", &body, &x0)?;
    let r = max_subdiff_contains(&body, &x0, &zeta, a.range.m, a.range.big_m)?;
    let mut table = Table::new(["member", "support_value"]);
    table.push(vec![r.member.to_string(), ext(r.support_value)]);
    emit(a.common.format.unwrap_or(Format::Json), a.common.out.as_deref(), json!(r), table)?;
    Ok(Outcome::Success)
}

fn selftest(a: SelftestArgs) -> Result<Outcome> {
    let start = Instant::now();
    let report = run_selftest(a.seed.seed);
    let elapsed = start.elapsed().as_secs_f64();
    let mut table = Table::new(["check", "instances", "max_error", "tolerance", "passed"]);
    for c in &report.checks {
        table.push(vec![
            c.name.clone(),
            c.instances.to_string(),
            num(c.max_error),
            num(c.tolerance),
            c.passed.to_string(),
        ]);
    }
    let mut doc = json!(report);
    doc["elapsed_seconds"] = json!(elapsed);
    emit(a.format.unwrap_or(Format::Json), a.out.as_deref(), doc, table)?;
    let passed = report.checks.iter().filter(|c| c.passed).count();
    eprintln!("selftest: {passed}/{} checks passed in {elapsed:.2} s", report.checks.len());
    Ok(if report.passed { Outcome::Success } else { Outcome::SelftestFailed })
}
