//! Star-shaped fiber families stored as a log-radius field `lambda(theta, phi)`.
//!
//! Row `i` holds the fiber over `theta_i = pi i / (m_theta - 1)`, column `j`
//! the angle `phi_j = 2 pi j / p_phi`. Off-grid values come from a bicubic
//! Hermite patch whose nodal slopes are spectral in `phi` and fourth-order
//! finite differences in `theta`; the derivatives returned by
//! [`RadialFiberFamily::log_radius`] are exact derivatives of that patch.

use std::f64::consts::{PI, TAU};
use std::str::FromStr;

use num_complex::Complex64;

use crate::circlefn::{fft_forward, fft_inverse, signed_frequency};
use crate::error::{Error, Result};

/// On-fiber tolerance: `|rho| <= ON_FIBER_TOL * (1 + |w|^2)`.
pub const ON_FIBER_TOL: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq)]
pub struct RadialFiberFamily {
    m_theta: usize,
    p_phi: usize,
    lam: Vec<f64>,
    lam_theta: Vec<f64>,
    lam_phi: Vec<f64>,
    lam_theta_phi: Vec<f64>,
}

/// Log-radius and its first derivatives at one point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogRadius {
    pub value: f64,
    pub d_theta: f64,
    pub d_phi: f64,
}

/// `rho = |w|^2 - R^2` together with its first derivatives.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DefiningFunctionEval {
    pub rho: f64,
    pub rho_w: Complex64,
    pub rho_theta: f64,
}

fn spectral_phi_derivative(row: &[f64]) -> Vec<f64> {
    let p = row.len();
    let input: Vec<Complex64> = row.iter().map(|&x| Complex64::new(x, 0.0)).collect();
    let mut coeffs = fft_forward(&input);
    for (k, c) in coeffs.iter_mut().enumerate() {
        *c = if 2 * k == p {
            Complex64::new(0.0, 0.0)
        } else {
            *c * Complex64::new(0.0, signed_frequency(k, p) as f64)
        };
    }
    fft_inverse(&coeffs).into_iter().map(|c| c.re).collect()
}

/// Rigid shift `row(phi - shift)` evaluated exactly on the nodes of a periodic row.
fn spectral_shift(row: &[f64], shift: f64) -> Vec<f64> {
    let p = row.len();
    let input: Vec<Complex64> = row.iter().map(|&x| Complex64::new(x, 0.0)).collect();
    let mut coeffs = fft_forward(&input);
    for (k, c) in coeffs.iter_mut().enumerate() {
        if 2 * k == p {
            *c *= (p as f64 / 2.0 * shift).cos();
        } else {
            *c *= Complex64::from_polar(1.0, -(signed_frequency(k, p) as f64) * shift);
        }
    }
    fft_inverse(&coeffs).into_iter().map(|c| c.re).collect()
}

/// Fourth-order finite-difference derivative of equally spaced samples.
fn fd_derivative(f: &[f64], h: f64) -> Vec<f64> {
    let m = f.len();
    let mut d = vec![0.0; m];
    let s = 12.0 * h;
    d[0] = (-25.0 * f[0] + 48.0 * f[1] - 36.0 * f[2] + 16.0 * f[3] - 3.0 * f[4]) / s;
    d[1] = (-3.0 * f[0] - 10.0 * f[1] + 18.0 * f[2] - 6.0 * f[3] + f[4]) / s;
    for i in 2..m - 2 {
        d[i] = (f[i - 2] - 8.0 * f[i - 1] + 8.0 * f[i + 1] - f[i + 2]) / s;
    }
    d[m - 2] = (3.0 * f[m - 1] + 10.0 * f[m - 2] - 18.0 * f[m - 3] + 6.0 * f[m - 4] - f[m - 5]) / s;
    d[m - 1] =
        (25.0 * f[m - 1] - 48.0 * f[m - 2] + 36.0 * f[m - 3] - 16.0 * f[m - 4] + 3.0 * f[m - 5]) / s;
    d
}

/// Cubic Hermite basis: values for (p0, m0, p1, m1) and their s-derivatives.
fn hermite(s: f64) -> ([f64; 4], [f64; 4]) {
    let s2 = s * s;
    let s3 = s2 * s;
    (
        [2.0 * s3 - 3.0 * s2 + 1.0, s3 - 2.0 * s2 + s, -2.0 * s3 + 3.0 * s2, s3 - s2],
        [6.0 * s2 - 6.0 * s, 3.0 * s2 - 4.0 * s + 1.0, -6.0 * s2 + 6.0 * s, 3.0 * s2 - 2.0 * s],
    )
}

impl RadialFiberFamily {
    pub fn new(m_theta: usize, p_phi: usize, lam: Vec<f64>) -> Result<Self> {
        if m_theta < 33 || m_theta.is_multiple_of(2) {
            return Err(Error::InvalidFiberGrid(format!(
                "m_theta must be odd and at least 33, got {m_theta}"
            )));
        }
        if p_phi < 64 || !p_phi.is_power_of_two() {
            return Err(Error::InvalidFiberGrid(format!(
                "p_phi must be a power of two and at least 64, got {p_phi}"
            )));
        }
        if lam.len() != m_theta * p_phi {
            return Err(Error::InvalidFiberGrid(format!(
                "expected {} samples, got {}",
                m_theta * p_phi,
                lam.len()
            )));
        }
        if let Some(k) = lam.iter().position(|x| !x.is_finite()) {
            return Err(Error::InvalidFiberGrid(format!("non-finite log-radius at sample {k}")));
        }
        let mut lam_phi = Vec::with_capacity(lam.len());
        for row in lam.chunks(p_phi) {
            lam_phi.extend(spectral_phi_derivative(row));
        }
        let h_theta = PI / (m_theta - 1) as f64;
        let mut lam_theta = vec![0.0; lam.len()];
        let mut column = vec![0.0; m_theta];
        for j in 0..p_phi {
            for i in 0..m_theta {
                column[i] = lam[i * p_phi + j];
            }
            for (i, d) in fd_derivative(&column, h_theta).into_iter().enumerate() {
                lam_theta[i * p_phi + j] = d;
            }
        }
        let mut lam_theta_phi = Vec::with_capacity(lam.len());
        for row in lam_theta.chunks(p_phi) {
            lam_theta_phi.extend(spectral_phi_derivative(row));
        }
        Ok(Self { m_theta, p_phi, lam, lam_theta, lam_phi, lam_theta_phi })
    }

    pub fn from_fn(m_theta: usize, p_phi: usize, f: impl Fn(f64, f64) -> f64) -> Result<Self> {
        let mut lam = Vec::with_capacity(m_theta * p_phi);
        for i in 0..m_theta {
            let theta = PI * i as f64 / (m_theta.max(2) - 1) as f64;
            for j in 0..p_phi {
                lam.push(f(theta, TAU * j as f64 / p_phi as f64));
            }
        }
        Self::new(m_theta, p_phi, lam)
    }

    pub fn m_theta(&self) -> usize {
        self.m_theta
    }

    pub fn p_phi(&self) -> usize {
        self.p_phi
    }

    pub fn theta_at(&self, i: usize) -> f64 {
        PI * i as f64 / (self.m_theta - 1) as f64
    }

    pub fn phi_at(&self, j: usize) -> f64 {
        TAU * j as f64 / self.p_phi as f64
    }

    pub fn samples(&self) -> &[f64] {
        &self.lam
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.lam[i * self.p_phi..(i + 1) * self.p_phi]
    }

    /// Spectral `phi` derivative on the nodes of row `i`.
    pub fn row_phi_derivative(&self, i: usize) -> &[f64] {
        &self.lam_phi[i * self.p_phi..(i + 1) * self.p_phi]
    }

    pub fn mean(&self) -> f64 {
        self.lam.iter().sum::<f64>() / self.lam.len() as f64
    }

    /// Largest spread of `lambda` along a single fiber.
    pub fn phi_variation(&self) -> f64 {
        self.lam
            .chunks(self.p_phi)
            .map(|row| {
                let (lo, hi) =
                    row.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &x| {
                        (lo.min(x), hi.max(x))
                    });
                hi - lo
            })
            .fold(0.0, f64::max)
    }

    /// True when every fiber is the same circle.
    pub fn is_constant(&self, tol: f64) -> bool {
        let first = self.lam[0];
        self.lam.iter().all(|x| (x - first).abs() <= tol)
    }

    pub fn radius_bounds(&self) -> (f64, f64) {
        let (lo, hi) = self
            .lam
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &x| (lo.min(x), hi.max(x)));
        (lo.exp(), hi.exp())
    }

    /// Bicubic Hermite evaluation of `lambda` and its first derivatives.
    ///
    /// `theta` is clamped to `[0, pi]`; `phi` is taken modulo `2 pi`.
    pub fn log_radius(&self, theta: f64, phi: f64) -> LogRadius {
        let h_theta = PI / (self.m_theta - 1) as f64;
        let h_phi = TAU / self.p_phi as f64;
        let u = (theta.clamp(0.0, PI) / h_theta).max(0.0);
        let i = (u.floor() as usize).min(self.m_theta - 2);
        let s = u - i as f64;
        let v = phi.rem_euclid(TAU) / h_phi;
        let j0 = (v.floor() as usize) % self.p_phi;
        let t = v - v.floor();
        let j1 = (j0 + 1) % self.p_phi;

        let (a, da) = hermite(s);
        let (b, db) = hermite(t);
        let p = self.p_phi;
        let mut value = 0.0;
        let mut d_s = 0.0;
        let mut d_t = 0.0;
        for (ai, row) in [(0usize, i), (2usize, i + 1)] {
            for (bj, col) in [(0usize, j0), (2usize, j1)] {
                let k = row * p + col;
                let f = self.lam[k];
                let ft = self.lam_theta[k] * h_theta;
                let fp = self.lam_phi[k] * h_phi;
                let ftp = self.lam_theta_phi[k] * h_theta * h_phi;
                let terms = |aa: &[f64; 4], bb: &[f64; 4]| {
                    aa[ai] * bb[bj] * f
                        + aa[ai] * bb[bj + 1] * fp
                        + aa[ai + 1] * bb[bj] * ft
                        + aa[ai + 1] * bb[bj + 1] * ftp
                };
                value += terms(&a, &b);
                d_s += terms(&da, &b);
                d_t += terms(&a, &db);
            }
        }
        LogRadius { value, d_theta: d_s / h_theta, d_phi: d_t / h_phi }
    }

    /// Returns a new family with rows `lambda(theta_i, phi - shift_i) + add_i`,
    /// where `(shift_i, add_i) = transform(theta_i)`. The shift is spectral and
    /// exact on the nodes.
    pub fn shifted(&self, transform: impl Fn(f64) -> (f64, f64)) -> Result<Self> {
        let mut lam = Vec::with_capacity(self.lam.len());
        for i in 0..self.m_theta {
            let (shift, add) = transform(self.theta_at(i));
            lam.extend(spectral_shift(self.row(i), shift).into_iter().map(|x| x + add));
        }
        Self::new(self.m_theta, self.p_phi, lam)
    }

    /// Builds a family on `m_out` rows whose row at `theta_new` equals
    /// `lambda(theta_old, phi - shift) + add` with `(theta_old, shift, add) = map(theta_new)`.
    /// Rows are interpolated in `theta` along the `phi` nodes, then shifted spectrally.
    pub fn resampled(&self, m_out: usize, map: impl Fn(f64) -> (f64, f64, f64)) -> Result<Self> {
        let h_theta = PI / (self.m_theta - 1) as f64;
        let p = self.p_phi;
        let mut lam = Vec::with_capacity(m_out * p);
        for i in 0..m_out {
            let theta_new = PI * i as f64 / (m_out - 1) as f64;
            let (theta_old, shift, add) = map(theta_new);
            let u = theta_old.clamp(0.0, PI) / h_theta;
            let r = (u.floor() as usize).min(self.m_theta - 2);
            let (a, _) = hermite(u - r as f64);
            let row: Vec<f64> = (0..p)
                .map(|j| {
                    let k0 = r * p + j;
                    let k1 = k0 + p;
                    a[0] * self.lam[k0]
                        + a[1] * h_theta * self.lam_theta[k0]
                        + a[2] * self.lam[k1]
                        + a[3] * h_theta * self.lam_theta[k1]
                })
                .collect();
            lam.extend(spectral_shift(&row, shift).into_iter().map(|x| x + add));
        }
        Self::new(m_out, p, lam)
    }
}

/// Named fiber families usable from problem files.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FiberPreset {
    /// Circles of a fixed radius.
    Circle { radius: f64 },
    /// `lambda = eps cos(k phi)`, the same fiber over every boundary point.
    RadialCos { eps: f64, k: u32 },
    /// `lambda = eps cos(theta)`, circles whose radius varies along the arc.
    RadialTheta { eps: f64 },
}

impl FiberPreset {
    pub const M_THETA: usize = 129;
    pub const P_PHI: usize = 256;

    pub fn build(&self) -> Result<RadialFiberFamily> {
        let (m, p) = (Self::M_THETA, Self::P_PHI);
        match *self {
            FiberPreset::Circle { radius } => {
                let log_r = radius.ln();
                RadialFiberFamily::from_fn(m, p, |_, _| log_r)
            }
            FiberPreset::RadialCos { eps, k } => {
                RadialFiberFamily::from_fn(m, p, |_, phi| eps * (k as f64 * phi).cos())
            }
            FiberPreset::RadialTheta { eps } => {
                RadialFiberFamily::from_fn(m, p, |theta, _| eps * theta.cos())
            }
        }
    }
}

impl FromStr for FiberPreset {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.trim().split(':').collect();
        let bad = || Error::InvalidProblem(format!("unrecognized fiber preset `{s}`"));
        let num = |t: &str| t.trim().parse::<f64>().map_err(|_| bad());
        let preset = match parts.as_slice() {
            ["circle", r] => {
                let radius = num(r)?;
                if !(radius > 0.0) || !radius.is_finite() {
                    return Err(Error::InvalidProblem(format!(
                        "circle radius must be positive, got {r}"
                    )));
                }
                FiberPreset::Circle { radius }
            }
            ["radial-cos", eps, k] => FiberPreset::RadialCos {
                eps: num(eps)?,
                k: k.trim().parse::<u32>().map_err(|_| bad())?,
            },
            ["radial-theta", eps] => FiberPreset::RadialTheta { eps: num(eps)? },
            _ => return Err(bad()),
        };
        Ok(preset)
    }
}

fn check_theta(theta: f64) -> Result<()> {
    if (-1e-12..=PI + 1e-12).contains(&theta) {
        Ok(())
    } else {
        Err(Error::ThetaOutOfRange(theta))
    }
}

pub fn eval_defining(
    fam: &RadialFiberFamily,
    theta: f64,
    w: Complex64,
) -> Result<DefiningFunctionEval> {
    check_theta(theta)?;
    if w.norm() == 0.0 {
        return Err(Error::ZeroArgument);
    }
    Ok(defining_unchecked(fam, theta, w))
}

/// `rho = |w|^2 - R^2`, `rho_w = conj(w) + i R^2 lambda_phi / w`, `rho_theta = -2 R^2 lambda_theta`.
pub(crate) fn defining_unchecked(
    fam: &RadialFiberFamily,
    theta: f64,
    w: Complex64,
) -> DefiningFunctionEval {
    let lr = fam.log_radius(theta, w.arg());
    let r2 = (2.0 * lr.value).exp();
    DefiningFunctionEval {
        rho: w.norm_sqr() - r2,
        rho_w: w.conj() + Complex64::new(0.0, r2 * lr.d_phi) / w,
        rho_theta: -2.0 * r2 * lr.d_theta,
    }
}

/// Angle between `w` and the outer normal of the fiber at `w`.
pub fn angle_field_d(fam: &RadialFiberFamily, theta: f64, w: Complex64) -> Result<f64> {
    let e = eval_defining(fam, theta, w)?;
    if e.rho.abs() > ON_FIBER_TOL * (1.0 + w.norm_sqr()) {
        return Err(Error::OffFiber(e.rho.abs()));
    }
    Ok((w * e.rho_w).arg())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AngleReport {
    /// `sup |d lambda / d phi|` over the two endpoint fibers.
    pub endpoint_slope_sup: f64,
    /// `arctan` of the endpoint slope: the largest endpoint angle `|d|`.
    pub endpoint_angle: f64,
    /// Same supremum over all fibers (diagnostic only).
    pub all_rows_slope_sup: f64,
    pub all_rows_angle: f64,
    /// `(2/pi) * endpoint_angle`.
    pub beta0: f64,
    pub beta0_ok: bool,
    /// Endpoint angle strictly below `pi/10`.
    pub pass: bool,
}

pub fn validate_angles(fam: &RadialFiberFamily) -> AngleReport {
    let sup_row = |i: usize| fam.row_phi_derivative(i).iter().fold(0.0f64, |m, x| m.max(x.abs()));
    let endpoint_slope_sup = sup_row(0).max(sup_row(fam.m_theta() - 1));
    let all_rows_slope_sup = (0..fam.m_theta()).map(sup_row).fold(0.0, f64::max);
    let endpoint_angle = endpoint_slope_sup.atan();
    let beta0 = 2.0 / PI * endpoint_angle;
    AngleReport {
        endpoint_slope_sup,
        endpoint_angle,
        all_rows_slope_sup,
        all_rows_angle: all_rows_slope_sup.atan(),
        beta0,
        beta0_ok: beta0 <= 0.2,
        pass: endpoint_angle < PI / 10.0,
    }
}

/// Linear isotopy of log-radii toward the circle of radius `exp(mean lambda)`.
pub fn isotopy_at(fam: &RadialFiberFamily, t: f64) -> Result<RadialFiberFamily> {
    if !(0.0..=1.0).contains(&t) {
        return Err(Error::ParameterOutOfRange(t));
    }
    let mean = fam.mean();
    let keep = 1.0 - t;
    let scale = |v: &[f64]| v.iter().map(|x| keep * x).collect::<Vec<f64>>();
    Ok(RadialFiberFamily {
        m_theta: fam.m_theta,
        p_phi: fam.p_phi,
        lam: fam.lam.iter().map(|x| keep * x + t * mean).collect(),
        lam_theta: scale(&fam.lam_theta),
        lam_phi: scale(&fam.lam_phi),
        lam_theta_phi: scale(&fam.lam_theta_phi),
    })
}
