//! Newton iteration on the corner-substituted unknown, continuation along the
//! isotopy to circles, and interior zeros through a Blaschke multiplier.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::circlefn::{
    analytic_projection, node_angle, winding_number, AnalyticFunction, DoubledWinding, GridFunction,
};
use crate::corners::{corner_data, CornerData, Substitution};
use crate::error::{Error, Result};
use crate::fibers::{defining_unchecked, isotopy_at, RadialFiberFamily};
use crate::linear_rh::{corner_coefficient, solve_linear_unchecked, LinearRHProblem};
use crate::problem::{Problem, ZeroPrescription};
use crate::reduction::{boundary_psi, half_disk_boundary, half_disk_map, to_standard_form, ReductionData, StandardProblem};
use crate::verify::{boundary_residuals, verify_solution, ResidualReport};

/// Absolute Newton tolerance on the weighted residual, scaled by `1 + max(w+, w-)`.
pub const NEWTON_TOL: f64 = 1e-12;
pub const NEWTON_MAX_ITERATIONS: usize = 20;
/// Step lengths tried by the line search.
pub const BACKTRACK_STEPS: [f64; 4] = [1.0, 0.5, 0.25, 0.125];
pub const MAX_BISECTIONS: u32 = 12;
/// Residual a finished continuation must reach.
pub const FINAL_RESIDUAL_TOL: f64 = 1e-7;

const FIXED_POINT_TOL: f64 = 1e-13;

/// Fibers together with the corner data and substitution they induce on a grid.
#[derive(Debug, Clone, PartialEq)]
pub struct Frame {
    pub fibers: RadialFiberFamily,
    pub corner: CornerData,
    pub substitution: Substitution,
}

impl Frame {
    pub fn new(fibers: RadialFiberFamily, n: usize) -> Result<Self> {
        crate::circlefn::check_grid_size(n)?;
        let corner = corner_data(&fibers)?;
        let substitution = Substitution::new(&corner, boundary_psi(n));
        Ok(Self { fibers, corner, substitution })
    }

    pub fn n_grid(&self) -> usize {
        self.substitution.n_grid()
    }

    fn scale(&self) -> f64 {
        1.0 + self.corner.w_plus.max(self.corner.w_minus)
    }

    pub fn assemble(&self, kappa: &GridFunction) -> Result<GridFunction> {
        GridFunction::new(self.substitution.assemble(kappa.values()))
    }

    /// Weighted boundary residual: `|rho| / (2 |rho_w|)` on the closed upper arc, `|Im f|` below.
    pub fn residual(&self, f: &[Complex64]) -> Result<f64> {
        let (upper, lower) = boundary_residuals(&self.fibers, f)?;
        Ok(upper.max(lower))
    }

    /// Linearization at `kappa`: `Re(rho_w P dk) = -rho/2` above, `Im(P dk) = -Im f` below.
    pub fn linearize(&self, kappa: &[Complex64], f: &[Complex64]) -> Result<LinearRHProblem> {
        let n = self.n_grid();
        let half = n / 2;
        let evals: Vec<_> = (0..=half)
            .map(|k| {
                if f[k].norm() < 1e-300 {
                    Err(Error::IterateVanishes(k))
                } else {
                    Ok(defining_unchecked(&self.fibers, node_angle(n, k), f[k]))
                }
            })
            .collect::<Result<_>>()?;
        let b_upper: Vec<Complex64> = evals.iter().map(|e| e.rho_w.conj()).collect();
        let (coeff, sign) = corner_coefficient(&b_upper, &self.substitution)?;
        let modulus = self.substitution.modulus();
        let rhs: Vec<f64> = (0..n)
            .map(|k| {
                if k == 0 || k == half {
                    // limit of the weighted residual at the corner
                    -(coeff[k] * kappa[k]).re
                } else if k < half {
                    -evals[k].rho / (2.0 * evals[k].rho_w.norm() * modulus[k])
                } else {
                    -sign * f[k].im / modulus[k]
                }
            })
            .collect();
        LinearRHProblem::new(GridFunction::new(coeff)?, rhs)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepDiagnostics {
    pub residual_before: f64,
    pub residual_after: f64,
    /// Accepted line-search step, 0 for the fixed-point case.
    pub step_length: f64,
    pub index: DoubledWinding,
}

pub fn newton_step(frame: &Frame, kappa: &GridFunction) -> Result<(GridFunction, StepDiagnostics)> {
    let f = frame.substitution.assemble(kappa.values());
    let r0 = frame.residual(&f)?;
    step_from(frame, kappa, &f, r0)
}

fn step_from(
    frame: &Frame,
    kappa: &GridFunction,
    f: &[Complex64],
    r0: f64,
) -> Result<(GridFunction, StepDiagnostics)> {
    if r0 <= FIXED_POINT_TOL * frame.scale() {
        let index = winding_of_linearization(frame, kappa.values(), f)?;
        let diag = StepDiagnostics { residual_before: r0, residual_after: r0, step_length: 0.0, index };
        return Ok((kappa.clone(), diag));
    }
    let problem = frame.linearize(kappa.values(), f)?;
    let index = problem.index();
    if index.doubled() < -1 {
        return Err(Error::LinearizationDegenerate(index.doubled()));
    }
    let update = solve_linear_unchecked(&problem)?.min_norm();
    for s in BACKTRACK_STEPS {
        let trial = kappa.zip_with(&update, |a, b| a + s * b)?;
        let residual = match frame.residual(&frame.substitution.assemble(trial.values())) {
            Ok(r) => r,
            Err(_) => continue,
        };
        if residual < r0 {
            let diag = StepDiagnostics { residual_before: r0, residual_after: residual, step_length: s, index };
            return Ok((trial, diag));
        }
    }
    Err(Error::NewtonStall(r0))
}

fn winding_of_linearization(frame: &Frame, kappa: &[Complex64], f: &[Complex64]) -> Result<DoubledWinding> {
    Ok(frame.linearize(kappa, f)?.index())
}

#[derive(Debug, Clone, PartialEq)]
pub struct NewtonOutcome {
    pub kappa: GridFunction,
    pub iterations: usize,
    pub residual: f64,
    /// Residual before every iteration and after the last one.
    pub history: Vec<f64>,
}

pub fn newton_solve(frame: &Frame, kappa0: &GridFunction) -> Result<NewtonOutcome> {
    let tol = NEWTON_TOL * frame.scale();
    let mut kappa = kappa0.clone();
    let mut residual = frame.residual(&frame.substitution.assemble(kappa.values()))?;
    let mut history = vec![residual];
    for iteration in 0..NEWTON_MAX_ITERATIONS {
        if residual <= tol {
            return Ok(NewtonOutcome { kappa, iterations: iteration, residual, history });
        }
        let f = frame.substitution.assemble(kappa.values());
        let (next, diag) = step_from(frame, &kappa, &f, residual)?;
        kappa = next;
        residual = diag.residual_after;
        history.push(residual);
    }
    if residual <= tol {
        return Ok(NewtonOutcome { kappa, iterations: NEWTON_MAX_ITERATIONS, residual, history });
    }
    Err(Error::NewtonMaxIterations { iterations: NEWTON_MAX_ITERATIONS, residual })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceEntry {
    pub t: f64,
    pub iterations: usize,
    pub residual: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ContinuationOutcome {
    pub frame: Frame,
    pub kappa: GridFunction,
    pub trace: Vec<TraceEntry>,
}

/// Tracks the solution from circles (`t = 1`) to `fibers` (`t = 0`).
pub fn continue_family(fibers: &RadialFiberFamily, n: usize, steps: usize) -> Result<ContinuationOutcome> {
    let zero = GridFunction::from_fn(n, |_| Complex64::new(0.0, 0.0))?;
    let mut trace = Vec::new();
    if fibers.is_constant(1e-14) {
        let frame = Frame::new(fibers.clone(), n)?;
        let out = newton_solve(&frame, &zero)?;
        trace.push(TraceEntry { t: 0.0, iterations: out.iterations, residual: out.residual });
        return Ok(ContinuationOutcome { frame, kappa: out.kappa, trace });
    }
    let attempt = |t: f64, start: &GridFunction| -> Result<(Frame, NewtonOutcome)> {
        let frame = Frame::new(isotopy_at(fibers, t)?, n)?;
        let out = newton_solve(&frame, start)?;
        Ok((frame, out))
    };
    let (mut frame, first) = attempt(1.0, &zero)
        .map_err(|e| Error::ContinuationFailure { last_good_t: 1.0, reason: e.to_string() })?;
    trace.push(TraceEntry { t: 1.0, iterations: first.iterations, residual: first.residual });
    let mut kappa = first.kappa;
    let mut t = 1.0;
    let mut dt = 1.0 / steps.max(1) as f64;
    let mut halvings = 0;
    while t > 0.0 {
        let next = if t - dt < 1e-12 { 0.0 } else { t - dt };
        match attempt(next, &kappa) {
            Ok((f, out)) => {
                trace.push(TraceEntry { t: next, iterations: out.iterations, residual: out.residual });
                frame = f;
                kappa = out.kappa;
                t = next;
            }
            Err(e) => {
                halvings += 1;
                if halvings > MAX_BISECTIONS {
                    return Err(Error::ContinuationFailure { last_good_t: t, reason: e.to_string() });
                }
                dt /= 2.0;
            }
        }
    }
    Ok(ContinuationOutcome { frame, kappa, trace })
}

/// Product of doubled Blaschke factors in the half-disk coordinate `z = Psi(xi)`.
///
/// Each requested zero `a` maps to `Psi(a)` in the upper half-disk, and the
/// factor `(z-b)(z-conj b) / ((1-conj(b) z)(1-b z))` is unimodular on the
/// upper semicircle and positive on `[-1, 1]`. Composed with `Psi` it is
/// holomorphic in the disk, vanishes exactly at `a`, is unimodular on the
/// upper arc, positive on the lower arc and equal to 1 at both corners.
#[derive(Debug, Clone, PartialEq)]
pub struct ZeroMultiplier {
    points: Vec<(Complex64, u32)>,
}

impl ZeroMultiplier {
    pub fn new(zeros: &ZeroPrescription) -> Self {
        let points = zeros.zeros().iter().map(|&(a, m)| (half_disk_map(a).0, m)).collect();
        Self { points }
    }

    /// Images of the zeros in the half-disk coordinate.
    pub fn half_disk_points(&self) -> &[(Complex64, u32)] {
        &self.points
    }

    pub fn total_multiplicity(&self) -> usize {
        self.points.iter().map(|&(_, m)| m as usize).sum()
    }

    fn factor(&self, z: Complex64) -> Complex64 {
        self.points.iter().fold(Complex64::new(1.0, 0.0), |acc, &(b, m)| {
            let f = (z - b) * (z - b.conj()) / ((1.0 - b.conj() * z) * (1.0 - b * z));
            acc * f.powu(m)
        })
    }

    pub fn eval(&self, xi: Complex64) -> Complex64 {
        self.factor(half_disk_map(xi).0)
    }

    /// Continuous argument along the upper arc, `theta` in `[0, pi]`; 0 at
    /// `theta = 0` and `2 pi` times the total multiplicity at `theta = pi`.
    pub fn boundary_arg(&self, theta: f64) -> f64 {
        let s = half_disk_boundary(theta).arg().clamp(0.0, PI);
        let back = Complex64::from_polar(1.0, -s);
        self.points
            .iter()
            .map(|&(b, m)| {
                let one = Complex64::new(1.0, 0.0);
                m as f64 * (2.0 * s + 2.0 * (one - b * back).arg() + 2.0 * (one - b.conj() * back).arg())
            })
            .sum()
    }

    /// Boundary values on the native grid.
    pub fn on_grid(&self, n: usize) -> Vec<Complex64> {
        (0..n)
            .map(|k| {
                let theta = node_angle(n, k);
                if 2 * k <= n {
                    Complex64::from_polar(1.0, self.boundary_arg(theta))
                } else {
                    let x = half_disk_boundary(theta).re;
                    Complex64::new(self.factor(Complex64::new(x, 0.0)).re, 0.0)
                }
            })
            .collect()
    }
}

/// Rotates the fibers so that `f = m f~` solves the original problem when
/// `f~` solves the rotated one; returns the multiplier `m` when zeros are requested.
///
/// The phase of `m` turns by a full multiple of `2 pi` along the arc, so
/// interpolating rotated rows in `theta` would not commute with the rotation.
/// The rotated family is therefore resampled onto rows that contain every
/// upper-arc node of an `n`-point grid.
pub fn prescribe_zeros(
    fibers: &RadialFiberFamily,
    zeros: &ZeroPrescription,
    n: usize,
) -> Result<(RadialFiberFamily, Option<ZeroMultiplier>)> {
    crate::circlefn::check_grid_size(n)?;
    ZeroPrescription::new(zeros.zeros().to_vec())?;
    if zeros.is_empty() {
        return Ok((fibers.clone(), None));
    }
    let multiplier = ZeroMultiplier::new(zeros);
    let half = n / 2;
    let intervals = half * (fibers.m_theta() - 1).div_ceil(half);
    let rotated = fibers.resampled(intervals + 1, |theta| (theta, -multiplier.boundary_arg(theta), 0.0))?;
    Ok((rotated, Some(multiplier)))
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolutionBundle {
    /// Boundary values of the solution in the standard frame.
    pub f_boundary: GridFunction,
    /// Spectral projection of `f_boundary`.
    pub f_analytic: AnalyticFunction,
    /// Corner-substituted unknown of the zero-free factor.
    pub kappa: GridFunction,
    pub corner: CornerData,
    /// Winding of the assembled coefficient of the linearization at the solution.
    pub winding: DoubledWinding,
    pub residuals: ResidualReport,
    pub trace: Vec<TraceEntry>,
    pub multiplier: Option<ZeroMultiplier>,
    /// Spectral projection of the zero-free factor.
    pub base: AnalyticFunction,
}

impl SolutionBundle {
    pub fn n_grid(&self) -> usize {
        self.f_boundary.n_grid()
    }

    /// `f(xi)` for `|xi| < 1`, through the multiplier when there is one.
    pub fn eval_interior(&self, xi: Complex64) -> Complex64 {
        match &self.multiplier {
            Some(m) => m.eval(xi) * self.base.eval(xi),
            None => self.f_analytic.eval(xi),
        }
    }

    /// `f` on the circle of radius `r` at the native angles.
    pub fn on_circle(&self, r: f64) -> Result<GridFunction> {
        match &self.multiplier {
            Some(m) => {
                let base = self.base.on_circle(r);
                let values = base
                    .values()
                    .iter()
                    .enumerate()
                    .map(|(k, v)| v * m.eval(Complex64::from_polar(r, node_angle(base.n_grid(), k))))
                    .collect();
                GridFunction::new(values)
            }
            None => Ok(self.f_analytic.on_circle(r)),
        }
    }

    /// Argument-principle zero count on the circle of radius `1 - 2/n`.
    pub fn zero_count(&self) -> Result<i64> {
        let n = self.n_grid();
        let r = 1.0 - 2.0 / n as f64;
        let w = winding_number(&self.on_circle(r)?, false)?;
        Ok(w.doubled() / 2)
    }
}

/// Continuation solve of a standard-form problem, followed by verification.
pub fn continuation_solve(problem: &StandardProblem) -> Result<SolutionBundle> {
    let n = problem.grid;
    let (rotated, multiplier) = prescribe_zeros(&problem.fibers, &problem.zeros, n)?;
    let out = continue_family(&rotated, n, problem.steps)?;
    let tilde = out.frame.assemble(&out.kappa)?;
    let winding = out.frame.linearize(out.kappa.values(), tilde.values())?.index();
    let base = analytic_projection(&tilde).function;
    let f_boundary = match &multiplier {
        Some(m) => GridFunction::new(tilde.values().iter().zip(m.on_grid(n)).map(|(a, b)| a * b).collect())?,
        None => tilde,
    };
    let f_analytic = analytic_projection(&f_boundary).function;
    let mut bundle = SolutionBundle {
        f_boundary,
        f_analytic,
        kappa: out.kappa,
        corner: out.frame.corner,
        winding,
        residuals: ResidualReport::default(),
        trace: out.trace,
        multiplier,
        base,
    };
    bundle.residuals = verify_solution(&problem.fibers, &bundle)?;
    let residual = bundle.residuals.sup_residual();
    if !(residual < FINAL_RESIDUAL_TOL) {
        return Err(Error::ResidualCheck { residual, tolerance: FINAL_RESIDUAL_TOL });
    }
    let expected = problem.zeros.total_multiplicity();
    if bundle.residuals.zero_count != expected as i64 {
        return Err(Error::ZeroCountMismatch { expected, found: bundle.residuals.zero_count });
    }
    Ok(bundle)
}

/// A solved problem with the data needed to return to its original frame.
#[derive(Debug, Clone, PartialEq)]
pub struct Solved {
    pub standard: StandardProblem,
    pub reduction: ReductionData,
    pub bundle: SolutionBundle,
}

impl Solved {
    /// Boundary values in the original frame, at [`ReductionData::original_angles`].
    pub fn original_boundary(&self) -> Result<GridFunction> {
        self.reduction.pull_back(&self.bundle.f_boundary)
    }
}

pub fn solve_problem(problem: &Problem) -> Result<Solved> {
    let (standard, reduction) = to_standard_form(problem)?;
    let bundle = continuation_solve(&standard)?;
    Ok(Solved { standard, reduction, bundle })
}
