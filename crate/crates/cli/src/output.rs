use std::fs::File;
use std::io::{self, Write};
use std::path::Path;

use anyhow::{Context, Result};
use cvxmetric::ExtReal;
use serde::Serialize;

/// A CSV table; cells are preformatted.
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new<S: Into<String>>(header: impl IntoIterator<Item = S>) -> Self {
        Table {
            header: header.into_iter().map(Into::into).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        self.rows.push(row);
    }
}

/// 17 significant digits.
pub fn num(v: f64) -> String {
    format!("{v:.16e}")
}

pub fn ext(v: ExtReal) -> String {
    match v {
        ExtReal::Finite(t) => num(t),
        ExtReal::PosInf => "inf".into(),
    }
}

pub fn coords(p: &cvxmetric::Vector) -> impl Iterator<Item = String> + '_ {
    p.as_slice().iter().map(|&c| num(c))
}

fn sink(out: Option<&Path>) -> Result<Box<dyn Write>> {
    Ok(match out {
        Some(path) => Box::new(File::create(path).with_context(|| format!("cannot create {}", path.display()))?),
        None => Box::new(io::stdout().lock()),
    })
}

pub fn json<T: Serialize>(value: &T, out: Option<&Path>) -> Result<()> {
    let mut w = sink(out)?;
    serde_json::to_writer_pretty(&mut w, value)?;
    writeln!(w)?;
    Ok(w.flush()?)
}

pub fn csv(table: &Table, out: Option<&Path>) -> Result<()> {
    let mut w = csv::Writer::from_writer(sink(out)?);
    if !table.header.is_empty() {
        w.write_record(&table.header)?;
    }
    for row in &table.rows {
        w.write_record(row)?;
    }
    Ok(w.flush()?)
}
