//! Corner data at `xi = +-1` and the substitution
//! `f = (xi-1)^{d+} (xi+1)^{d-} kappa + w+ (1+psi)/2 + w- (1-psi)/2`.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_3, PI, TAU};

use num_complex::Complex64;

use crate::circlefn::{node_angle, GridFunction};
use crate::error::{Error, Result};
use crate::fibers::{eval_defining, RadialFiberFamily};
use crate::reduction::{blend_polynomial, half_disk_boundary};

/// Distance kept between `beta_cap` and the smallest admissible exponent.
pub const BETA_CAP_MARGIN: f64 = 1e-3;

/// Intersections of the endpoint fibers with the positive real axis and the
/// resulting corner exponents.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CornerData {
    pub w_plus: f64,
    pub w_minus: f64,
    pub beta_plus: f64,
    pub beta_minus: f64,
    pub delta_plus: f64,
    pub delta_minus: f64,
    pub beta_cap: f64,
}

impl CornerData {
    /// Builds corner data from the intersection radii and the tangent angles
    /// `tau` (in `(0, pi)`) of the endpoint fibers, measured from the positive
    /// real axis in the direction of increasing `phi`.
    pub fn from_tangents(w_plus: f64, w_minus: f64, tau_plus: f64, tau_minus: f64) -> Result<Self> {
        let transversal = |tau: f64| tau > 1e-9 && tau < PI - 1e-9;
        if !transversal(tau_plus) {
            return Err(Error::Nontransversal(1));
        }
        if !transversal(tau_minus) {
            return Err(Error::Nontransversal(-1));
        }
        let beta_plus = tau_plus / PI;
        let beta_minus = -tau_minus / PI;
        let beta_cap = beta_plus
            .min(1.0 - beta_plus)
            .min(beta_minus.abs())
            .min(1.0 - beta_minus.abs())
            - BETA_CAP_MARGIN;
        Ok(Self {
            w_plus,
            w_minus,
            beta_plus,
            beta_minus,
            delta_plus: 1.0 - beta_plus,
            delta_minus: beta_minus.abs(),
            beta_cap,
        })
    }

    /// Corner data of the circle of radius `radius`.
    pub fn circles(radius: f64) -> Self {
        Self::from_tangents(radius, radius, FRAC_PI_2, FRAC_PI_2)
            .expect("right angles are transversal")
    }
}

pub fn corner_data(fam: &RadialFiberFamily) -> Result<CornerData> {
    let last = fam.m_theta() - 1;
    let end = |i: usize| (fam.row(i)[0], fam.row_phi_derivative(i)[0]);
    let (lam_plus, slope_plus) = end(0);
    let (lam_minus, slope_minus) = end(last);
    // Tangent of phi -> R(phi) e^{i phi} at phi = 0 is (R', R) = R (lambda', 1).
    CornerData::from_tangents(
        lam_plus.exp(),
        lam_minus.exp(),
        1f64.atan2(slope_plus),
        1f64.atan2(slope_minus),
    )
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Corner {
    /// `xi = 1`, cut along the positive reals.
    Plus,
    /// `xi = -1`, cut along the negative reals.
    Minus,
}

/// `(xi - 1)^delta` with `arg` in `(pi/2, 3pi/2)`, or `(xi + 1)^delta` with
/// `arg` in `(-pi/2, pi/2)`.
pub fn branch_power(xi: Complex64, delta: f64, corner: Corner) -> Complex64 {
    let base = match corner {
        Corner::Plus => xi - 1.0,
        Corner::Minus => xi + 1.0,
    };
    if base.norm() == 0.0 {
        return Complex64::new(0.0, 0.0);
    }
    let mut arg = base.arg();
    if corner == Corner::Plus && arg < FRAC_PI_2 {
        arg += TAU;
    }
    Complex64::from_polar(base.norm().powf(delta), delta * arg)
}

/// `T_+(xi) = (xi - 1) / (i (xi + 1))`, positive on the upper arc.
pub fn t_plus(xi: Complex64) -> Complex64 {
    (xi - 1.0) / (Complex64::i() * (xi + 1.0))
}

/// `T_-(xi) = 1 / T_+(xi)`.
pub fn t_minus(xi: Complex64) -> Complex64 {
    1.0 / t_plus(xi)
}

/// Smooth cutoff: 1 up to `pi/3`, 0 from `2pi/3` to `3pi/2`, quintic smoothstep between.
pub fn cutoff(theta: f64) -> f64 {
    let t = (theta + FRAC_PI_2).rem_euclid(TAU) - FRAC_PI_2;
    if t <= FRAC_PI_3 {
        1.0
    } else if t >= 2.0 * FRAC_PI_3 {
        0.0
    } else {
        let x = (t - FRAC_PI_3) / FRAC_PI_3;
        1.0 - x * x * x * (10.0 - 15.0 * x + 6.0 * x * x)
    }
}

/// The corner substitution sampled on a fixed grid.
#[derive(Debug, Clone, PartialEq)]
pub struct Substitution {
    n: usize,
    w_plus: f64,
    w_minus: f64,
    psi: Vec<Complex64>,
    factor: Vec<Complex64>,
    unit: Vec<Complex64>,
    modulus: Vec<f64>,
}

impl Substitution {
    pub fn new(cd: &CornerData, psi: Vec<Complex64>) -> Self {
        Self::with_endpoints(cd.delta_plus, cd.delta_minus, cd.w_plus, cd.w_minus, psi)
    }

    /// Same substitution with arbitrary real endpoint values.
    pub fn with_endpoints(
        delta_plus: f64,
        delta_minus: f64,
        w_plus: f64,
        w_minus: f64,
        psi: Vec<Complex64>,
    ) -> Self {
        let n = psi.len();
        let mut factor = Vec::with_capacity(n);
        let mut unit = Vec::with_capacity(n);
        let mut modulus = Vec::with_capacity(n);
        for k in 0..n {
            let theta = node_angle(n, k);
            let (arg_plus, arg_minus, m) = if k == 0 {
                (FRAC_PI_2, 0.0, 0.0)
            } else if 2 * k == n {
                (PI, FRAC_PI_2, 0.0)
            } else {
                let half = 0.5 * theta;
                let arg_minus = if 2 * k < n { half } else { half - PI };
                let m = (2.0 * half.sin()).powf(delta_plus) * (2.0 * half.cos().abs()).powf(delta_minus);
                (half + FRAC_PI_2, arg_minus, m)
            };
            let u = Complex64::from_polar(1.0, delta_plus * arg_plus + delta_minus * arg_minus);
            unit.push(u);
            modulus.push(m);
            factor.push(u * m);
        }
        Self { n, w_plus, w_minus, psi, factor, unit, modulus }
    }

    pub fn n_grid(&self) -> usize {
        self.n
    }

    pub fn psi(&self) -> &[Complex64] {
        &self.psi
    }

    /// `(xi-1)^{d+} (xi+1)^{d-}` on the nodes; zero at both corners.
    pub fn factor(&self) -> &[Complex64] {
        &self.factor
    }

    /// Unimodular part of the factor; at the corners the upper-arc limit.
    pub fn unit(&self) -> &[Complex64] {
        &self.unit
    }

    pub fn modulus(&self) -> &[f64] {
        &self.modulus
    }

    pub fn blend(&self, k: usize) -> Complex64 {
        let p = self.psi[k];
        self.w_plus * (1.0 + p) / 2.0 + self.w_minus * (1.0 - p) / 2.0
    }

    pub fn assemble(&self, kappa: &[Complex64]) -> Vec<Complex64> {
        (0..self.n).map(|k| self.factor[k] * kappa[k] + self.blend(k)).collect()
    }

    pub fn extract(&self, f: &[Complex64]) -> Result<Vec<Complex64>> {
        let n = self.n;
        let half = n / 2;
        for (corner, k, w) in [(1i8, 0usize, self.w_plus), (-1, half, self.w_minus)] {
            let mismatch = (f[k] - w).norm();
            if mismatch > 1e-6 {
                return Err(Error::PinningViolation { corner, mismatch });
            }
        }
        let mut kappa: Vec<Complex64> = (0..n)
            .map(|k| {
                if k == 0 || k == half {
                    Complex64::new(0.0, 0.0)
                } else {
                    (f[k] - self.blend(k)) / self.factor[k]
                }
            })
            .collect();
        kappa[0] = 3.0 * kappa[1] - 3.0 * kappa[2] + kappa[3];
        kappa[half] = 3.0 * kappa[half - 1] - 3.0 * kappa[half - 2] + kappa[half - 3];
        Ok(kappa)
    }
}

pub fn assemble_f(kappa: &GridFunction, cd: &CornerData, psi: &GridFunction) -> Result<GridFunction> {
    if kappa.n_grid() != psi.n_grid() {
        return Err(Error::GridMismatch { left: kappa.n_grid(), right: psi.n_grid() });
    }
    let sub = Substitution::new(cd, psi.values().to_vec());
    GridFunction::new(sub.assemble(kappa.values()))
}

pub fn extract_kappa(f: &GridFunction, cd: &CornerData, psi: &GridFunction) -> Result<GridFunction> {
    if f.n_grid() != psi.n_grid() {
        return Err(Error::GridMismatch { left: f.n_grid(), right: psi.n_grid() });
    }
    let sub = Substitution::new(cd, psi.values().to_vec());
    GridFunction::new(sub.extract(f.values())?)
}

/// Value and `w`-derivative of the desingularized defining function.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RhoTilde {
    pub value: f64,
    pub w_derivative: Complex64,
}

/// `chi rho_+ + (1 - chi) rho_-` with
/// `rho_j(xi, w) = rho(xi, P(xi) w + blend(xi)) / T_j(xi)^{delta_j}` on the open upper arc.
pub fn build_rho_tilde(
    fam: &RadialFiberFamily,
    cd: &CornerData,
    xi: Complex64,
    w: Complex64,
) -> Result<RhoTilde> {
    if (xi.norm() - 1.0).abs() > 1e-9 {
        return Err(Error::NotUnimodular(format!("{xi}")));
    }
    if xi.im < 0.0 {
        return Err(Error::LowerArc);
    }
    let theta = xi.arg();
    if theta <= 0.0 || theta >= PI {
        return Err(Error::ThetaOutOfRange(theta));
    }
    let factor = branch_power(xi, cd.delta_plus, Corner::Plus)
        * branch_power(xi, cd.delta_minus, Corner::Minus);
    let psi = blend_polynomial(half_disk_boundary(theta));
    let blend = cd.w_plus * (1.0 + psi) / 2.0 + cd.w_minus * (1.0 - psi) / 2.0;
    let e = eval_defining(fam, theta, factor * w + blend)?;
    let tan = (0.5 * theta).tan();
    let scale_plus = tan.powf(cd.delta_plus);
    let scale_minus = tan.powf(-cd.delta_minus);
    let chi = cutoff(theta);
    let weight = chi / scale_plus + (1.0 - chi) / scale_minus;
    Ok(RhoTilde { value: e.rho * weight, w_derivative: e.rho_w * factor * weight })
}
