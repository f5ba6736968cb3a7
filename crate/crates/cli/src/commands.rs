//! Subcommand implementations. Each returns what to print on stdout and the
//! exit status; failures come back as [`CliError`].

use std::path::{Path, PathBuf};

use mrh_core::circlefn::{hilbert_transform, node_angle, winding_number, GridFunction};
use mrh_core::linear_rh::{solve_linear, LinearRHProblem};
use mrh_core::reduction::to_standard_form;
use mrh_core::solver::{solve_problem, Solved};
use mrh_core::verify::{log_oracle_solve, pointwise_residuals, verify_boundary, ResidualReport, PASS_RESIDUAL};
use num_complex::Complex64;
use serde::Serialize;
use serde_json::json;

use crate::error::{CliError, EXIT_NUMERICAL};
use crate::problem_file::parse_problem;
use crate::tables::{read_columns, read_solution, write_rows, SolutionRow};

/// Agreement required between the continuation solve and the oracle.
pub const ORACLE_AGREEMENT: f64 = 1e-6;
/// Residual bound both sides of the oracle comparison must meet.
pub const ORACLE_RESIDUAL: f64 = 1e-7;
/// Tolerance on the angle column when a solution table is checked against a problem.
const THETA_TOL: f64 = 1e-9;

#[derive(Debug)]
pub struct Output {
    pub stdout: String,
    pub status: u8,
}

impl Output {
    fn ok(stdout: String) -> Self {
        Self { stdout, status: 0 }
    }

    fn checked(stdout: String, pass: bool) -> Self {
        Self { stdout, status: if pass { 0 } else { EXIT_NUMERICAL } }
    }
}

#[derive(Debug, Serialize)]
struct TraceJson {
    t: f64,
    iterations: usize,
    residual: f64,
}

/// Contents of `report.json`.
#[derive(Debug, Serialize)]
pub struct SolveReport {
    beta_plus: f64,
    beta_minus: f64,
    delta_plus: f64,
    delta_minus: f64,
    beta_cap: f64,
    winding: f64,
    residual_sup: f64,
    zero_count: i64,
    holder_fit_plus: f64,
    holder_fit_minus: f64,
    trace: Vec<TraceJson>,
}

impl SolveReport {
    fn new(solved: &Solved) -> Self {
        let b = &solved.bundle;
        Self {
            beta_plus: b.corner.beta_plus,
            beta_minus: b.corner.beta_minus,
            delta_plus: b.corner.delta_plus,
            delta_minus: b.corner.delta_minus,
            beta_cap: b.corner.beta_cap,
            winding: b.winding.value(),
            residual_sup: b.residuals.sup_residual(),
            zero_count: b.residuals.zero_count,
            holder_fit_plus: b.residuals.holder_fit_plus,
            holder_fit_minus: b.residuals.holder_fit_minus,
            trace: b.trace.iter().map(|e| TraceJson { t: e.t, iterations: e.iterations, residual: e.residual }).collect(),
        }
    }
}

fn create_dir(dir: &Path) -> Result<(), CliError> {
    std::fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))
}

fn write_json(path: &Path, value: &impl Serialize) -> Result<(), CliError> {
    let text = serde_json::to_string_pretty(value).expect("report types serialize");
    std::fs::write(path, text + "\n").map_err(|e| CliError::io(path, e))
}

/// Solution rows in node order: original-frame angle and value of `f`, the
/// standard-frame corner unknown, and the node residual.
fn solution_rows(solved: &Solved) -> Result<Vec<SolutionRow>, CliError> {
    let f = solved.original_boundary()?;
    let angles = solved.reduction.original_angles();
    let residuals = pointwise_residuals(&solved.standard.fibers, solved.bundle.f_boundary.values())?;
    Ok((0..f.n_grid())
        .map(|k| {
            let (v, kappa) = (f.values()[k], solved.bundle.kappa.values()[k]);
            SolutionRow {
                theta: angles[k],
                re_f: v.re,
                im_f: v.im,
                re_kappa: kappa.re,
                im_kappa: kappa.im,
                residual: residuals[k],
            }
        })
        .collect())
}

pub fn solve(problem_path: &Path, out_dir: &Path) -> Result<Output, CliError> {
    let problem = parse_problem(problem_path)?.to_problem()?;
    let solved = solve_problem(&problem)?;
    create_dir(out_dir)?;
    let csv_path = out_dir.join("solution.csv");
    let report_path = out_dir.join("report.json");
    write_rows(&csv_path, &solution_rows(&solved)?)?;
    let report = SolveReport::new(&solved);
    write_json(&report_path, &report)?;
    let summary = json!({
        "solution": csv_path.display().to_string(),
        "report": report_path.display().to_string(),
        "grid": problem.grid,
        "residual_sup": report.residual_sup,
        "zero_count": report.zero_count,
        "analyticity_residual": solved.bundle.residuals.analyticity_residual,
    });
    Ok(Output::ok(summary.to_string()))
}

fn report_json(r: &ResidualReport, accepted: bool) -> serde_json::Value {
    json!({
        "sup_residual_upper": r.sup_residual_upper,
        "sup_residual_lower": r.sup_residual_lower,
        "analyticity_residual": r.analyticity_residual,
        "zero_count": r.zero_count,
        "holder_fit_plus": r.holder_fit_plus,
        "holder_fit_minus": r.holder_fit_minus,
        "beta_cap": r.beta_cap,
        "pass": r.pass,
        "accepted": accepted,
    })
}

/// Re-checks a solution table against its problem. The table is accepted
/// when both boundary residuals are below the pass bound and the zero count
/// equals the prescribed multiplicity; the strict `pass` flag, which also
/// bounds the spectral tail, is reported alongside.
pub fn verify(problem_path: &Path, solution_path: &Path) -> Result<Output, CliError> {
    let problem = parse_problem(problem_path)?.to_problem()?;
    let rows = read_solution(solution_path)?;
    let (standard, reduction) = to_standard_form(&problem)?;
    if rows.len() != problem.grid {
        return Err(CliError::table(
            solution_path,
            format!("expected {} rows for grid {}, found {}", problem.grid, problem.grid, rows.len()),
        ));
    }
    let angles = reduction.original_angles();
    if let Some(k) = (0..rows.len()).find(|&k| {
        let d = (rows[k].theta - angles[k]).rem_euclid(std::f64::consts::TAU);
        d.min(std::f64::consts::TAU - d) > THETA_TOL
    }) {
        return Err(CliError::table(
            solution_path,
            format!("row {}: theta {} does not match the problem's node {}", k + 2, rows[k].theta, angles[k]),
        ));
    }
    let f = GridFunction::new(rows.iter().map(|r| Complex64::new(r.re_f, r.im_f)).collect())?;
    let f_std = reduction.push_forward(&f)?;
    let report = verify_boundary(&standard.fibers, &f_std)?;
    let expected = problem.zeros.total_multiplicity() as i64;
    let accepted = report.sup_residual() < PASS_RESIDUAL && report.zero_count == expected;
    Ok(Output::checked(report_json(&report, accepted).to_string(), accepted))
}

/// One linear solve from a full-circle table `theta,re_b,im_b,rhs` of the
/// assembled coefficient and right-hand side. Writes the particular solution
/// and the kernel basis as columns `re_kappa,im_kappa,re_kernel_j,im_kernel_j`.
pub fn linear(table: &Path, output: &Path) -> Result<Output, CliError> {
    let cols = read_columns(table, &["theta", "re_b", "im_b", "rhs"])?;
    let n = cols[0].len();
    mrh_core::circlefn::check_grid_size(n)?;
    if let Some(k) = (0..n).find(|&k| (cols[0][k] - node_angle(n, k)).abs() > THETA_TOL) {
        return Err(CliError::table(table, format!("row {}: theta must be 2 pi k / n in node order", k + 2)));
    }
    let coeff = GridFunction::new((0..n).map(|k| Complex64::new(cols[1][k], cols[2][k])).collect())?;
    let problem = LinearRHProblem::new(coeff, cols[3].clone())?;
    let sol = solve_linear(&problem)?;

    let mut w = csv::Writer::from_path(output).map_err(|e| CliError::table(output, e.to_string()))?;
    let mut header = vec!["theta".to_string(), "re_kappa".into(), "im_kappa".into()];
    for j in 0..sol.kernel_dimension() {
        header.push(format!("re_kernel_{j}"));
        header.push(format!("im_kernel_{j}"));
    }
    w.write_record(&header).map_err(|e| CliError::table(output, e.to_string()))?;
    for k in 0..n {
        let mut record = vec![node_angle(n, k), sol.kappa.values()[k].re, sol.kappa.values()[k].im];
        for v in &sol.kernel {
            record.push(v.values()[k].re);
            record.push(v.values()[k].im);
        }
        w.write_record(record.iter().map(|x| x.to_string())).map_err(|e| CliError::table(output, e.to_string()))?;
    }
    w.flush().map_err(|e| CliError::io(output, e))?;
    let summary = json!({
        "winding": problem.index().to_string(),
        "winding_value": problem.index().value(),
        "kernel_dimension": sol.kernel_dimension(),
        "residual": sol.residual,
        "solution": output.display().to_string(),
    });
    Ok(Output::ok(summary.to_string()))
}

/// Continuation solve against the log-linear oracle on the same grid.
pub fn oracle(problem_path: &Path, out_dir: &Path) -> Result<Output, CliError> {
    let problem = parse_problem(problem_path)?.to_problem()?;
    if !problem.zeros.is_empty() {
        return Err(CliError::Usage("the oracle covers zero-free solutions only; remove `zeros`".into()));
    }
    let n = problem.grid;
    let (standard, _) = to_standard_form(&problem)?;
    let oracle = log_oracle_solve(&standard.fibers, n)?;
    let solved = solve_problem(&problem)?;
    let solution = &solved.bundle.f_boundary;
    let difference = oracle.zip_with(solution, |a, b| a - b)?.sup_norm();
    let oracle_report = verify_boundary(&standard.fibers, &oracle)?;
    let solve_residual = solved.bundle.residuals.sup_residual();
    let agree = difference < ORACLE_AGREEMENT
        && solve_residual < ORACLE_RESIDUAL
        && oracle_report.sup_residual() < ORACLE_RESIDUAL;

    create_dir(out_dir)?;
    #[derive(Serialize)]
    struct Row {
        theta: f64,
        re_f: f64,
        im_f: f64,
        re_oracle: f64,
        im_oracle: f64,
    }
    let rows: Vec<Row> = (0..n)
        .map(|k| {
            let (s, o) = (solution.values()[k], oracle.values()[k]);
            Row { theta: node_angle(n, k), re_f: s.re, im_f: s.im, re_oracle: o.re, im_oracle: o.im }
        })
        .collect();
    let csv_path = out_dir.join("oracle.csv");
    write_rows(&csv_path, &rows)?;
    let report = json!({
        "grid": n,
        "sup_difference": difference,
        "solve_residual_sup": solve_residual,
        "oracle_residual_sup": oracle_report.sup_residual(),
        "agree": agree,
    });
    write_json(&out_dir.join("oracle_report.json"), &report)?;
    Ok(Output::checked(report.to_string(), agree))
}

fn grid_column(path: &Path, name: &str) -> Result<Vec<f64>, CliError> {
    let col = read_columns(path, &[name])?.remove(0);
    mrh_core::circlefn::check_grid_size(col.len())?;
    Ok(col)
}

/// Conjugate function of a real column; writes `theta,u,hilbert`.
pub fn hilbert(input: &Path, column: &str, output: Option<&Path>) -> Result<Output, CliError> {
    let u = grid_column(input, column)?;
    let n = u.len();
    let h = hilbert_transform(&GridFunction::from_real(u.clone())?)?;
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["theta", "u", "hilbert"]).expect("in-memory write");
    for (k, (x, hx)) in u.iter().zip(h.values()).enumerate() {
        w.write_record([node_angle(n, k).to_string(), x.to_string(), hx.re.to_string()]).expect("in-memory write");
    }
    let bytes = w.into_inner().expect("in-memory flush");
    match output {
        Some(path) => {
            std::fs::write(path, &bytes).map_err(|e| CliError::io(path, e))?;
            Ok(Output::ok(json!({ "output": path.display().to_string(), "grid": n }).to_string()))
        }
        None => Ok(Output::ok(String::from_utf8(bytes).expect("csv output is utf-8").trim_end().to_string())),
    }
}

/// Winding number of the complex column `re + i im`, printed as `k` or `k/2`.
pub fn winding(input: &Path, re: &str, im: &str, allow_half: bool) -> Result<Output, CliError> {
    let cols = read_columns(input, &[re, im])?;
    mrh_core::circlefn::check_grid_size(cols[0].len())?;
    let b = GridFunction::new(cols[0].iter().zip(&cols[1]).map(|(&x, &y)| Complex64::new(x, y)).collect())?;
    Ok(Output::ok(winding_number(&b, allow_half)?.to_string()))
}

/// Default output directory for `solve` and `oracle`.
pub fn default_out_dir() -> PathBuf {
    PathBuf::from(".")
}
