//! CSV input and output. Angles are in radians throughout; rows of grid
//! tables are in node order `theta_k = 2 pi k / n`.

use std::f64::consts::{PI, TAU};
use std::io::Write;
use std::path::Path;

use mrh_core::fibers::RadialFiberFamily;
use serde::{Deserialize, Serialize};

use crate::error::CliError;

/// Header of a fiber table.
pub const FIBER_HEADER: [&str; 3] = ["theta", "phi", "log_r"];
/// Header of a solution table.
pub const SOLUTION_HEADER: [&str; 6] = ["theta", "re_f", "im_f", "re_kappa", "im_kappa", "residual"];

const GRID_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FiberSample {
    pub theta: f64,
    pub phi: f64,
    pub log_r: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolutionRow {
    pub theta: f64,
    pub re_f: f64,
    pub im_f: f64,
    pub re_kappa: f64,
    pub im_kappa: f64,
    pub residual: f64,
}

fn reader(path: &Path) -> Result<csv::Reader<std::fs::File>, CliError> {
    let file = std::fs::File::open(path).map_err(|e| CliError::io(path, e))?;
    Ok(csv::ReaderBuilder::new().trim(csv::Trim::All).comment(Some(b'#')).from_reader(file))
}

fn csv_error(path: &Path, e: csv::Error) -> CliError {
    CliError::table(path, e.to_string())
}

fn check_header(path: &Path, rdr: &mut csv::Reader<std::fs::File>, expected: &[&str]) -> Result<(), CliError> {
    let found = rdr.headers().map_err(|e| csv_error(path, e))?;
    if found.iter().ne(expected.iter().copied()) {
        return Err(CliError::table(
            path,
            format!("header must be `{}`, found `{}`", expected.join(","), found.iter().collect::<Vec<_>>().join(",")),
        ));
    }
    Ok(())
}

/// Distinct sorted values, merged within `GRID_TOL`.
fn distinct(mut values: Vec<f64>) -> Vec<f64> {
    values.sort_by(f64::total_cmp);
    values.dedup_by(|a, b| (*a - *b).abs() < GRID_TOL);
    values
}

fn uniform(values: &[f64], first: f64, step: f64) -> bool {
    values.iter().enumerate().all(|(i, v)| (v - (first + step * i as f64)).abs() < GRID_TOL)
}

/// Reads a full tensor grid of log-radii: `theta` uniform on `[0, pi]` with
/// both ends present, `phi` uniform on `[0, 2 pi)`, rows in any order.
pub fn read_fiber_csv(path: &Path) -> Result<RadialFiberFamily, CliError> {
    let mut rdr = reader(path)?;
    check_header(path, &mut rdr, &FIBER_HEADER)?;
    let samples: Vec<FiberSample> = rdr.deserialize().collect::<Result<_, _>>().map_err(|e| csv_error(path, e))?;
    fiber_family_from_samples(&samples).map_err(|m| CliError::table(path, m))
}

pub fn fiber_family_from_samples(samples: &[FiberSample]) -> Result<RadialFiberFamily, String> {
    if let Some(s) = samples.iter().find(|s| !(s.theta.is_finite() && s.phi.is_finite() && s.log_r.is_finite())) {
        return Err(format!("non-finite sample {s:?}"));
    }
    let thetas = distinct(samples.iter().map(|s| s.theta).collect());
    let phis = distinct(samples.iter().map(|s| s.phi).collect());
    let (m, p) = (thetas.len(), phis.len());
    if m < 2 || p < 2 {
        return Err(format!("need at least two theta and two phi values, found {m} and {p}"));
    }
    if !uniform(&thetas, 0.0, PI / (m - 1) as f64) {
        return Err(format!("theta values must be uniform on [0, pi] with both ends; found {m} values"));
    }
    if !uniform(&phis, 0.0, TAU / p as f64) {
        return Err(format!("phi values must be 2 pi j / {p} for j = 0..{p}"));
    }
    if samples.len() != m * p {
        return Err(format!("expected {m} x {p} = {} samples, found {}", m * p, samples.len()));
    }
    let mut lam = vec![f64::NAN; m * p];
    for s in samples {
        let i = (s.theta / (PI / (m - 1) as f64)).round() as usize;
        let j = (s.phi / (TAU / p as f64)).round() as usize;
        let slot = &mut lam[i * p + j];
        if !slot.is_nan() {
            return Err(format!("duplicate sample at theta = {}, phi = {}", s.theta, s.phi));
        }
        *slot = s.log_r;
    }
    RadialFiberFamily::new(m, p, lam).map_err(|e| e.to_string())
}

pub fn write_fiber_csv(out: impl Write, fam: &RadialFiberFamily) -> Result<(), csv::Error> {
    let mut w = csv::Writer::from_writer(out);
    for i in 0..fam.m_theta() {
        for (j, &log_r) in fam.row(i).iter().enumerate() {
            w.serialize(FiberSample { theta: fam.theta_at(i), phi: fam.phi_at(j), log_r })?;
        }
    }
    w.flush()?;
    Ok(())
}

pub fn write_rows<T: Serialize>(path: &Path, rows: &[T]) -> Result<(), CliError> {
    let mut w = csv::Writer::from_path(path).map_err(|e| csv_error(path, e))?;
    for row in rows {
        w.serialize(row).map_err(|e| csv_error(path, e))?;
    }
    w.flush().map_err(|e| CliError::io(path, e))
}

pub fn read_solution(path: &Path) -> Result<Vec<SolutionRow>, CliError> {
    let mut rdr = reader(path)?;
    check_header(path, &mut rdr, &SOLUTION_HEADER)?;
    rdr.deserialize().collect::<Result<_, _>>().map_err(|e| csv_error(path, e))
}

/// Named numeric columns of a CSV file, in the order requested.
pub fn read_columns(path: &Path, names: &[&str]) -> Result<Vec<Vec<f64>>, CliError> {
    let mut rdr = reader(path)?;
    let header = rdr.headers().map_err(|e| csv_error(path, e))?.clone();
    let index: Vec<usize> = names
        .iter()
        .map(|name| {
            header
                .iter()
                .position(|h| h == *name)
                .ok_or_else(|| CliError::table(path, format!("no column named `{name}`")))
        })
        .collect::<Result<_, _>>()?;
    let mut columns = vec![Vec::new(); names.len()];
    for (row, record) in rdr.records().enumerate() {
        let record = record.map_err(|e| csv_error(path, e))?;
        for (col, &i) in index.iter().enumerate() {
            let raw = record.get(i).unwrap_or("");
            let x: f64 = raw.parse().map_err(|_| {
                CliError::table(path, format!("row {}: column `{}` is not a number: `{raw}`", row + 2, names[col]))
            })?;
            columns[col].push(x);
        }
    }
    Ok(columns)
}
