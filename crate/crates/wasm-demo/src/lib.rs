//! Browser bindings for the demo page in `www/`.
//!
//! Every export returns a JSON string: the payload on success, or
//! `{"error": "..."}` on failure, so the page never has to catch exceptions.

use std::f64::consts::{PI, TAU};
use std::str::FromStr;

use mrh_core::circlefn::{node_angle, GridFunction};
use mrh_core::corners::corner_data;
use mrh_core::fibers::{validate_angles, FiberPreset, RadialFiberFamily};
use mrh_core::linear_rh::{solve_linear, LinearRHProblem};
use mrh_core::problem::{Problem, ZeroPrescription};
use mrh_core::solver::solve_problem;
use num_complex::Complex64;
use serde_json::{json, Value};
use wasm_bindgen::prelude::*;

/// Largest grid the page may request; keeps a solve interactive.
pub const MAX_GRID: u32 = 4096;
/// Number of fibers drawn by `inspect_fibers`.
const FIBER_CURVES: usize = 9;
const CURVE_POINTS: usize = 181;
/// Boundary points returned by `solve_preset` for plotting.
const PLOT_POINTS: usize = 512;

fn respond(result: Result<Value, String>) -> String {
    match result {
        Ok(v) => v.to_string(),
        Err(e) => json!({ "error": e }).to_string(),
    }
}

fn preset(spec: &str) -> Result<RadialFiberFamily, String> {
    let p = FiberPreset::from_str(spec).map_err(|e| e.to_string())?;
    p.build().map_err(|e| e.to_string())
}

fn grid(n: u32) -> Result<usize, String> {
    if n > MAX_GRID {
        return Err(format!("grid {n} exceeds the demo limit {MAX_GRID}"));
    }
    let n = n as usize;
    mrh_core::circlefn::check_grid_size(n).map_err(|e| e.to_string())?;
    Ok(n)
}

/// Parses `"re im m; re im m"`; an empty string means no zeros.
fn zeros(spec: &str) -> Result<ZeroPrescription, String> {
    let mut points = Vec::new();
    for item in spec.split(';').map(str::trim).filter(|s| !s.is_empty()) {
        let parts: Vec<&str> = item.split_whitespace().collect();
        let [re, im, m] = parts.as_slice() else {
            return Err(format!("zero `{item}` must be `re im multiplicity`"));
        };
        let num = |s: &str| s.parse::<f64>().map_err(|_| format!("`{s}` is not a number"));
        let m = m.parse::<u32>().map_err(|_| format!("multiplicity `{m}` is not a positive integer"))?;
        points.push((Complex64::new(num(re)?, num(im)?), m));
    }
    ZeroPrescription::new(points).map_err(|e| e.to_string())
}

fn inspect(spec: &str) -> Result<Value, String> {
    let fam = preset(spec)?;
    let angles = validate_angles(&fam);
    let corner = corner_data(&fam).map_err(|e| e.to_string())?;
    let (r_min, r_max) = fam.radius_bounds();
    let curves: Vec<Value> = (0..FIBER_CURVES)
        .map(|i| {
            let theta = PI * i as f64 / (FIBER_CURVES - 1) as f64;
            let points: Vec<[f64; 2]> = (0..CURVE_POINTS)
                .map(|j| {
                    let phi = TAU * j as f64 / (CURVE_POINTS - 1) as f64;
                    let r = fam.log_radius(theta, phi).value.exp();
                    [r * phi.cos(), r * phi.sin()]
                })
                .collect();
            json!({ "theta": theta, "points": points })
        })
        .collect();
    Ok(json!({
        "preset": spec,
        "radius_min": r_min,
        "radius_max": r_max,
        "endpoint_angle": angles.endpoint_angle,
        "angle_gate_pass": angles.pass,
        "beta_plus": corner.beta_plus,
        "beta_minus": corner.beta_minus,
        "delta_plus": corner.delta_plus,
        "delta_minus": corner.delta_minus,
        "beta_cap": corner.beta_cap,
        "curves": curves,
    }))
}

fn solve(spec: &str, n: u32, zero_spec: &str) -> Result<Value, String> {
    let n = grid(n)?;
    let problem = Problem::standard(preset(spec)?).with_grid(n).with_zeros(zeros(zero_spec)?);
    let solved = solve_problem(&problem).map_err(|e| e.to_string())?;
    let f = solved.original_boundary().map_err(|e| e.to_string())?;
    let stride = (n / PLOT_POINTS).max(1);
    let boundary: Vec<[f64; 3]> = (0..n)
        .step_by(stride)
        .map(|k| [node_angle(n, k), f.values()[k].re, f.values()[k].im])
        .collect();
    let r = &solved.bundle.residuals;
    let trace: Vec<[f64; 3]> =
        solved.bundle.trace.iter().map(|e| [e.t, e.iterations as f64, e.residual]).collect();
    Ok(json!({
        "grid": n,
        "residual_sup": r.sup_residual(),
        "analyticity_residual": r.analyticity_residual,
        "zero_count": r.zero_count,
        "winding": solved.bundle.winding.to_string(),
        "holder_fit_plus": r.holder_fit_plus,
        "holder_fit_minus": r.holder_fit_minus,
        "boundary": boundary,
        "trace": trace,
    }))
}

fn winding_demo(doubled_turns: i32, wobble: f64, n: u32) -> Result<Value, String> {
    let n = grid(n)?;
    if !wobble.is_finite() || wobble.abs() > 1.0 {
        return Err(format!("wobble must lie in [-1, 1], got {wobble}"));
    }
    let half_turns = doubled_turns as f64 / 2.0;
    let coeff = GridFunction::from_fn(n, |t| Complex64::from_polar(1.0, -half_turns * t + wobble * t.cos()))
        .map_err(|e| e.to_string())?;
    // vanishes at theta = 0 so that half-integer indices stay solvable
    let rhs: Vec<f64> = (0..n).map(|k| 0.3 * (node_angle(n, k) / 2.0).sin()).collect();
    let problem = LinearRHProblem::new(coeff, rhs).map_err(|e| e.to_string())?;
    let index = problem.index();
    let (kernel, residual, note) = match solve_linear(&problem) {
        Ok(sol) => (Some(sol.kernel_dimension()), Some(sol.residual), None),
        Err(e) => (None, None, Some(e.to_string())),
    };
    Ok(json!({
        "index": index.to_string(),
        "index_value": index.value(),
        "kernel_dimension": kernel,
        "expected_kernel_dimension": (index.doubled() >= -1).then(|| index.doubled() + 1),
        "residual": residual,
        "note": note,
    }))
}

/// Fiber curves and corner data for a preset such as `radial-cos:0.1:1`.
#[wasm_bindgen]
pub fn inspect_fibers(preset: &str) -> String {
    respond(inspect(preset))
}

/// Solves the standard problem for a preset. `zeros` is `"re im m; ..."`.
#[wasm_bindgen]
pub fn solve_preset(preset: &str, grid: u32, zeros: &str) -> String {
    respond(solve(preset, grid, zeros))
}

/// Index and kernel dimension of a linear problem with coefficient
/// `exp(i(-doubled_turns theta / 2 + wobble cos theta))`.
#[wasm_bindgen]
pub fn linear_winding(doubled_turns: i32, wobble: f64, grid: u32) -> String {
    respond(winding_demo(doubled_turns, wobble, grid))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(s: String) -> Value {
        serde_json::from_str(&s).unwrap()
    }

    #[test]
    fn circles_inspect_as_right_angles() {
        let v = parse(inspect_fibers("circle:2"));
        assert_eq!(v["beta_plus"], 0.5);
        assert_eq!(v["delta_minus"], 0.5);
        assert_eq!(v["angle_gate_pass"], true);
        let curves = v["curves"].as_array().unwrap();
        assert_eq!(curves.len(), FIBER_CURVES);
        let p = &curves[0]["points"][0];
        assert!((p[0].as_f64().unwrap() - 2.0).abs() < 1e-12);
    }

    #[test]
    fn bad_presets_return_an_error_object() {
        let v = parse(inspect_fibers("ellipse:2"));
        assert!(v["error"].as_str().unwrap().contains("ellipse"));
        let v = parse(solve_preset("circle:1", 100, ""));
        assert!(v["error"].is_string());
        let v = parse(solve_preset("circle:1", 1 << 14, ""));
        assert!(v["error"].as_str().unwrap().contains("limit"));
        let v = parse(solve_preset("circle:1", 256, "0.2 0.1"));
        assert!(v["error"].as_str().unwrap().contains("multiplicity"));
    }

    #[test]
    fn solve_returns_a_plot_ready_boundary() {
        let v = parse(solve_preset("radial-cos:0.1:1", 256, "0.2 0.1 1"));
        assert!(v["residual_sup"].as_f64().unwrap() < 1e-7, "{v}");
        assert_eq!(v["zero_count"], 1);
        assert_eq!(v["boundary"].as_array().unwrap().len(), 256);
        assert!(!v["trace"].as_array().unwrap().is_empty());
    }

    #[test]
    fn circle_solution_is_constant() {
        let v = parse(solve_preset("circle:1.5", 128, ""));
        for p in v["boundary"].as_array().unwrap() {
            assert!((p[1].as_f64().unwrap() - 1.5).abs() < 1e-12);
        }
        assert_eq!(v["winding"], "-1/2");
    }

    #[test]
    fn linear_kernel_follows_the_index() {
        for doubled in [-1, 0, 1, 2, 3] {
            let v = parse(linear_winding(doubled, 0.3, 256));
            assert_eq!(v["kernel_dimension"], v["expected_kernel_dimension"], "{v}");
            assert_eq!(v["index_value"], doubled as f64 / 2.0);
        }
        let v = parse(linear_winding(-4, 0.0, 256));
        assert!(v["kernel_dimension"].is_null());
        assert!(v["note"].is_string());
        assert!(parse(linear_winding(0, 2.0, 256))["error"].is_string());
    }
}
