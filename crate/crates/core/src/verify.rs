//! Independent checks of computed solutions. The log-linear oracle covers
//! circle fibers; the exponential-integrability diagnostic tests the
//! conjugate function.

use std::f64::consts::{FRAC_PI_2, TAU};

use num_complex::Complex64;

use crate::circlefn::{
    analytic_projection, hilbert_transform, holder_estimate, lp_norm, node_angle, winding_number, GridFunction,
};
use crate::corners::{corner_data, Substitution};
use crate::error::{Error, Result};
use crate::fibers::{defining_unchecked, RadialFiberFamily};
use crate::linear_rh::{build_linear_problem, solve_linear};
use crate::reduction::boundary_psi;
use crate::solver::SolutionBundle;

/// Boundary residual bound for `pass`.
pub const PASS_RESIDUAL: f64 = 1e-6;
/// Bound on the discarded spectral energy fraction for `pass`.
pub const PASS_ANALYTICITY: f64 = 1e-8;

#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct ResidualReport {
    /// `sup |rho(xi, f)| / (2 |rho_w|)` over the closed upper arc.
    pub sup_residual_upper: f64,
    /// `sup |Im f|` over the open lower arc.
    pub sup_residual_lower: f64,
    /// Energy fraction outside the nonnegative frequencies.
    pub analyticity_residual: f64,
    pub zero_count: i64,
    pub holder_fit_plus: f64,
    pub holder_fit_minus: f64,
    pub beta_cap: f64,
    pub pass: bool,
}

impl ResidualReport {
    pub fn sup_residual(&self) -> f64 {
        self.sup_residual_upper.max(self.sup_residual_lower)
    }
}

/// Residual at every node: the weighted defining function on the closed upper
/// arc and `|Im f|` on the open lower arc.
pub fn pointwise_residuals(fam: &RadialFiberFamily, f: &[Complex64]) -> Result<Vec<f64>> {
    let n = f.len();
    let half = n / 2;
    let values: Vec<f64> = f
        .iter()
        .enumerate()
        .map(|(k, &w)| {
            if k > half {
                return Ok(w.im.abs());
            }
            if !(w.norm() > 1e-300) {
                return Err(Error::IterateVanishes(k));
            }
            let e = defining_unchecked(fam, node_angle(n, k), w);
            Ok(e.rho.abs() / (2.0 * e.rho_w.norm()))
        })
        .collect::<Result<_>>()?;
    match values.iter().position(|r| !r.is_finite()) {
        Some(k) => Err(Error::NonFinite(k)),
        None => Ok(values),
    }
}

/// `(upper, lower)` boundary residuals of the values `f` on the native grid.
pub fn boundary_residuals(fam: &RadialFiberFamily, f: &[Complex64]) -> Result<(f64, f64)> {
    let half = f.len() / 2;
    let values = pointwise_residuals(fam, f)?;
    let upper = values[..=half].iter().copied().fold(0.0, f64::max);
    let lower = values[half + 1..].iter().copied().fold(0.0, f64::max);
    Ok((upper, lower))
}

fn report(fam: &RadialFiberFamily, f: &GridFunction, zero_count: i64, beta_cap: f64) -> Result<ResidualReport> {
    let n = f.n_grid();
    let (upper, lower) = boundary_residuals(fam, f.values())?;
    let analyticity = analytic_projection(f).discarded_fraction();
    let radius = (n / 16).max(8);
    let holder_fit_plus = holder_estimate(f, 0, radius)?;
    let holder_fit_minus = holder_estimate(f, n / 2, radius)?;
    let pass = upper < PASS_RESIDUAL && lower < PASS_RESIDUAL && analyticity < PASS_ANALYTICITY;
    Ok(ResidualReport {
        sup_residual_upper: upper,
        sup_residual_lower: lower,
        analyticity_residual: analyticity,
        zero_count,
        holder_fit_plus,
        holder_fit_minus,
        beta_cap,
        pass,
    })
}

fn check_nonvanishing(f: &GridFunction) -> Result<()> {
    let scale = f.sup_norm();
    match f.values().iter().position(|v| v.norm() <= 1e-12 * scale.max(1e-300)) {
        Some(k) => Err(Error::BoundaryZero(k)),
        None => Ok(()),
    }
}

/// Checks a solved bundle against the standard-frame fibers it was solved for.
pub fn verify_solution(fam: &RadialFiberFamily, bundle: &SolutionBundle) -> Result<ResidualReport> {
    check_nonvanishing(&bundle.f_boundary)?;
    report(fam, &bundle.f_boundary, bundle.zero_count()?, bundle.corner.beta_cap)
}

/// Checks bare boundary values; zeros are counted on the spectral projection.
pub fn verify_boundary(fam: &RadialFiberFamily, f: &GridFunction) -> Result<ResidualReport> {
    check_nonvanishing(f)?;
    let n = f.n_grid();
    let interior = analytic_projection(f).function.on_circle(1.0 - 2.0 / n as f64);
    let zero_count = winding_number(&interior, false)?.doubled() / 2;
    report(fam, f, zero_count, corner_data(fam)?.beta_cap)
}

/// Solution for fibers that are circles `|w| = R(theta)`, computed from the
/// linear problem for `g = log f`: `Re g = log R` above and `Im g = 0` below.
pub fn log_oracle_solve(fam: &RadialFiberFamily, n: usize) -> Result<GridFunction> {
    let variation = fam.phi_variation();
    if variation > 1e-12 {
        return Err(Error::OracleInapplicable(variation));
    }
    crate::circlefn::check_grid_size(n)?;
    let half = n / 2;
    let log_r: Vec<f64> = (0..=half).map(|k| fam.log_radius(node_angle(n, k), 0.0).value).collect();
    let sub = Substitution::with_endpoints(0.5, 0.5, log_r[0], log_r[half], boundary_psi(n));
    let rhs: Vec<f64> = (0..=half)
        .map(|k| if k == 0 || k == half { 0.0 } else { log_r[k] - sub.blend(k).re })
        .collect();
    let ones = vec![Complex64::new(1.0, 0.0); half + 1];
    let problem = build_linear_problem(&ones, &rhs, &sub)?;
    let solution = solve_linear(&problem)?;
    let g = sub.assemble(solution.kappa.values());
    GridFunction::new(g.into_iter().map(|v| v.exp()).collect())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ZygmundCheck {
    pub lhs: f64,
    pub rhs: f64,
    pub pass: bool,
}

/// `||e^{Hu}||_p <= (2 pi / cos(p ||u||_inf))^{1/p}` for real `u`.
pub fn zygmund_check(u: &GridFunction, p: f64) -> Result<ZygmundCheck> {
    let hyp = p * u.sup_norm();
    if !(hyp < FRAC_PI_2) {
        return Err(Error::ZygmundHypothesis(hyp));
    }
    let conjugate = hilbert_transform(u)?;
    let lhs = lp_norm(&conjugate.map(|v| Complex64::new(v.re.exp(), 0.0))?, p)?;
    let rhs = (TAU / hyp.cos()).powf(1.0 / p);
    Ok(ZygmundCheck { lhs, rhs, pass: lhs <= rhs * (1.0 + 1e-6) })
}

/// Largest asymmetry `|lambda(theta, phi) - lambda(theta, -phi)|` over the two
/// endpoint rows; zero when those fibers are symmetric under conjugation.
pub fn reflection_defect(fam: &RadialFiberFamily) -> f64 {
    let p = fam.p_phi();
    let last = fam.m_theta() - 1;
    [0, last]
        .iter()
        .flat_map(|&i| {
            let row = fam.row(i);
            (0..p).map(move |j| (row[j] - row[(p - j) % p]).abs())
        })
        .fold(0.0, f64::max)
}
