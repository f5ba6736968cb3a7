//! Reduction of a general instance to standard form.
//!
//! In standard form the linear arc is the lower semicircle, its endpoints are
//! `1` (exit point) and `-1`, and the linear condition reads `Im f = 0`.

use std::f64::consts::{FRAC_PI_2, PI, TAU};

use num_complex::Complex64;

use crate::circlefn::{
    analytic_projection, hilbert_real, node_angle, signed_frequency, unwrap_phase, winding_number,
    AnalyticFunction, GridFunction,
};
use crate::error::{Error, Result};
use crate::fibers::RadialFiberFamily;
use crate::problem::{ArcSpec, Problem, SymbolSpec, ZeroPrescription};

const I: Complex64 = Complex64::new(0.0, 1.0);

/// `z -> (a z + b) / (c z + d)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mobius {
    pub a: Complex64,
    pub b: Complex64,
    pub c: Complex64,
    pub d: Complex64,
}

impl Mobius {
    pub fn identity() -> Self {
        let one = Complex64::new(1.0, 0.0);
        let zero = Complex64::new(0.0, 0.0);
        Self { a: one, b: zero, c: zero, d: one }
    }

    pub fn apply(&self, z: Complex64) -> Complex64 {
        (self.a * z + self.b) / (self.c * z + self.d)
    }

    pub fn inverse(&self) -> Self {
        Self { a: self.d, b: -self.b, c: -self.c, d: self.a }.normalized()
    }

    /// `self(other(z))`.
    pub fn compose(&self, other: &Mobius) -> Self {
        Self {
            a: self.a * other.a + self.b * other.c,
            b: self.a * other.b + self.b * other.d,
            c: self.c * other.a + self.d * other.c,
            d: self.c * other.b + self.d * other.d,
        }
        .normalized()
    }

    fn normalized(self) -> Self {
        let det = self.a * self.d - self.b * self.c;
        let s = det.sqrt();
        Self { a: self.a / s, b: self.b / s, c: self.c / s, d: self.d / s }
    }

    /// Sends `z1 -> 0`, `z2 -> 1`, `z3 -> infinity`.
    fn three_point(z1: Complex64, z2: Complex64, z3: Complex64) -> Self {
        Self { a: z2 - z3, b: -z1 * (z2 - z3), c: z2 - z1, d: -z3 * (z2 - z1) }.normalized()
    }

    pub fn is_identity(&self, tol: f64) -> bool {
        let z = [Complex64::new(0.0, 0.0), Complex64::new(0.5, 0.0), Complex64::new(0.0, 0.5)];
        z.iter().all(|&p| (self.apply(p) - p).norm() <= tol)
    }
}

fn check_unimodular(z: Complex64) -> Result<()> {
    if (z.norm() - 1.0).abs() > 1e-9 {
        return Err(Error::NotUnimodular(format!("{z}")));
    }
    Ok(())
}

/// Disk automorphism with `plus -> 1`, `minus -> -1`, mapping the arc that
/// runs counterclockwise from `minus` to `plus` onto the lower semicircle and
/// its midpoint to `-i`.
pub fn normalize_arc(plus: Complex64, minus: Complex64) -> Result<Mobius> {
    check_unimodular(plus)?;
    check_unimodular(minus)?;
    if (plus - minus).norm() < 1e-9 {
        return Err(Error::DegenerateArc);
    }
    let span = (plus.arg() - minus.arg()).rem_euclid(TAU);
    let mid = minus * Complex64::from_polar(1.0, span / 2.0);
    let source = Mobius::three_point(plus, mid, minus);
    let target = Mobius::three_point(Complex64::new(1.0, 0.0), -I, Complex64::new(-1.0, 0.0));
    Ok(target.inverse().compose(&source))
}

/// Hermite interpolation on `[0, len]` between `(v0, d0)` and `(v1, d1)`.
fn hermite_span(x: f64, len: f64, v0: f64, d0: f64, v1: f64, d1: f64) -> f64 {
    let s = x / len;
    let s2 = s * s;
    let s3 = s2 * s;
    (2.0 * s3 - 3.0 * s2 + 1.0) * v0
        + (s3 - 2.0 * s2 + s) * len * d0
        + (-2.0 * s3 + 3.0 * s2) * v1
        + (s3 - s2) * len * d1
}

/// Extends samples of `a` on the lower arc to a nonvanishing function with
/// winding 0 on the whole circle.
///
/// `lower[j]` is the value at `theta = pi + 2 pi j / n` for `j = 0..=n/2`.
/// On the upper arc `log|a|` and a continuous argument are blended by a cubic
/// Hermite span that matches values and one-sided slopes at both endpoints.
pub fn extend_symbol(n: usize, lower: &[Complex64]) -> Result<GridFunction> {
    crate::circlefn::check_grid_size(n)?;
    let half = n / 2;
    if lower.len() != half + 1 {
        return Err(Error::InvalidProblem(format!(
            "expected {} symbol samples on the lower arc, got {}",
            half + 1,
            lower.len()
        )));
    }
    if let Some(v) = lower.iter().find(|v| v.norm() < 1e-12) {
        return Err(Error::SingularSymbol(v.norm()));
    }
    let h = TAU / n as f64;
    let modulus: Vec<f64> = lower.iter().map(|v| v.norm().ln()).collect();
    let arg = unwrap_phase(lower);
    let slope_start = |v: &[f64]| (-3.0 * v[0] + 4.0 * v[1] - v[2]) / (2.0 * h);
    let slope_end = |v: &[f64]| (3.0 * v[half] - 4.0 * v[half - 1] + v[half - 2]) / (2.0 * h);
    let mut values = vec![Complex64::new(0.0, 0.0); n];
    for (j, v) in lower.iter().enumerate().take(half) {
        values[half + j] = *v;
    }
    values[0] = lower[half];
    let blend = |v: &[f64], theta: f64| {
        hermite_span(theta, PI, v[half], slope_end(v), v[0], slope_start(v))
    };
    for (k, value) in values.iter_mut().enumerate().take(half).skip(1) {
        let theta = node_angle(n, k);
        *value = Complex64::from_polar(blend(&modulus, theta).exp(), blend(&arg, theta));
    }
    GridFunction::new(values)
}

/// `conj(a) = r e^h` with `r > 0` and `h` holomorphic.
#[derive(Debug, Clone, PartialEq)]
pub struct SymbolFactorization {
    pub r: GridFunction,
    pub h: AnalyticFunction,
    /// Boundary values of `h` on the grid.
    pub h_trace: GridFunction,
}

pub fn factor_conjugate_symbol(a_ext: &GridFunction) -> Result<SymbolFactorization> {
    let winding = winding_number(a_ext, false)?;
    if winding.doubled() != 0 {
        return Err(Error::SymbolWinding(winding.doubled()));
    }
    let conj: Vec<Complex64> = a_ext.values().iter().map(|v| v.conj()).collect();
    let alpha = unwrap_phase(&conj);
    let h_alpha = hilbert_real(&alpha);
    let h_trace = GridFunction::new(
        alpha.iter().zip(&h_alpha).map(|(&a, &ha)| Complex64::new(-ha, a)).collect(),
    )?;
    let r = GridFunction::from_real(
        a_ext.values().iter().zip(&h_alpha).map(|(v, &ha)| v.norm() * ha.exp()).collect(),
    )?;
    let h = analytic_projection(&h_trace).function;
    Ok(SymbolFactorization { r, h, h_trace })
}

/// `(Psi(xi), psi(xi))` for `|xi| <= 1`, where `Psi` maps the disk onto the
/// upper half-disk with `Psi(+-1) = +-1` and `psi = F(Psi)`, `F(x) = x (3 - x^2) / 2`.
pub fn half_disk_map(xi: Complex64) -> (Complex64, Complex64) {
    if (xi - 1.0).norm() < 1e-300 {
        return (Complex64::new(1.0, 0.0), Complex64::new(1.0, 0.0));
    }
    let mut omega = I * (1.0 + xi) / (1.0 - xi);
    if omega.im < 0.0 {
        omega.im = 0.0;
    }
    let s = omega.sqrt();
    let big = (s - 1.0) / (s + 1.0);
    (big, blend_polynomial(big))
}

pub(crate) fn blend_polynomial(x: Complex64) -> Complex64 {
    x * (3.0 - x * x) / 2.0
}

/// `Psi(e^{i theta})` computed from the angle, which avoids cancellation near `theta = 0`.
pub(crate) fn half_disk_boundary(theta: f64) -> Complex64 {
    let half = 0.5 * theta.rem_euclid(TAU);
    if half == 0.0 {
        return Complex64::new(1.0, 0.0);
    }
    if half == FRAC_PI_2 {
        return Complex64::new(-1.0, 0.0);
    }
    let omega = -half.cos() / half.sin();
    let s = if omega >= 0.0 {
        Complex64::new(omega.sqrt(), 0.0)
    } else {
        Complex64::new(0.0, (-omega).sqrt())
    };
    (s - 1.0) / (s + 1.0)
}

/// `psi` on the native grid; exactly `+-1` at the corner nodes and real on the lower arc.
pub fn boundary_psi(n: usize) -> Vec<Complex64> {
    (0..n)
        .map(|k| {
            if k == 0 {
                Complex64::new(1.0, 0.0)
            } else if 2 * k == n {
                Complex64::new(-1.0, 0.0)
            } else {
                let v = blend_polynomial(half_disk_boundary(node_angle(n, k)));
                if 2 * k > n {
                    Complex64::new(v.re, 0.0)
                } else {
                    v
                }
            }
        })
        .collect()
}

/// Everything needed to move between the original and the standard frame.
#[derive(Debug, Clone, PartialEq)]
pub struct ReductionData {
    pub mobius: Mobius,
    pub mobius_inverse: Mobius,
    pub h: AnalyticFunction,
    pub h_trace: GridFunction,
    pub r: GridFunction,
    pub psi: GridFunction,
}

impl ReductionData {
    /// Original-frame angle of every standard-frame grid node.
    pub fn original_angles(&self) -> Vec<f64> {
        let n = self.psi.n_grid();
        (0..n)
            .map(|k| {
                let xi = Complex64::from_polar(1.0, node_angle(n, k));
                self.mobius_inverse.apply(xi).arg().rem_euclid(TAU)
            })
            .collect()
    }

    /// `f = -i e^{-h} f_std` node by node.
    pub fn pull_back(&self, f_std: &GridFunction) -> Result<GridFunction> {
        f_std.zip_with(&self.h_trace, |f, h| -I * (-h).exp() * f)
    }

    /// `f_std = i e^{h} f` node by node.
    pub fn push_forward(&self, f: &GridFunction) -> Result<GridFunction> {
        f.zip_with(&self.h_trace, |f, h| I * h.exp() * f)
    }
}

/// Standard-form instance produced by [`to_standard_form`].
#[derive(Debug, Clone, PartialEq)]
pub struct StandardProblem {
    pub fibers: RadialFiberFamily,
    pub grid: usize,
    pub steps: usize,
    pub zeros: ZeroPrescription,
}

fn symbol_on_lower_arc(problem: &Problem, inverse: &Mobius) -> Result<Vec<Complex64>> {
    let n = problem.grid;
    let half = n / 2;
    let samples = match &problem.symbol {
        SymbolSpec::Standard => return Ok(vec![I; half + 1]),
        SymbolSpec::Table(samples) => samples,
    };
    let mut table: Vec<(f64, Complex64)> = samples
        .iter()
        .map(|s| {
            let q = problem.arc.linear_fraction(s.theta, 1e-9).ok_or_else(|| {
                Error::InvalidProblem(format!("symbol sample at {} rad is off the arc", s.theta))
            })?;
            Ok((q, s.value))
        })
        .collect::<Result<_>>()?;
    table.sort_by(|a, b| a.0.total_cmp(&b.0));
    table.dedup_by(|a, b| (a.0 - b.0).abs() < 1e-14);
    if let Some(v) = table.iter().find(|t| t.1.norm() < 1e-12) {
        return Err(Error::SingularSymbol(v.1.norm()));
    }
    let xs: Vec<f64> = table.iter().map(|t| t.0).collect();
    let values: Vec<Complex64> = table.iter().map(|t| t.1).collect();
    let log_mod: Vec<f64> = values.iter().map(|v| v.norm().ln()).collect();
    let arg = unwrap_phase(&values);
    let interp = |ys: &[f64], x: f64| -> f64 {
        let m = xs.len();
        if m == 1 || x <= xs[0] {
            return ys[0];
        }
        if x >= xs[m - 1] {
            return ys[m - 1];
        }
        let k = xs.partition_point(|&t| t <= x) - 1;
        let slope = |i: usize| {
            let (l, r) = (i.saturating_sub(1), (i + 1).min(m - 1));
            (ys[r] - ys[l]) / (xs[r] - xs[l])
        };
        hermite_span(x - xs[k], xs[k + 1] - xs[k], ys[k], slope(k), ys[k + 1], slope(k + 1))
    };
    (0..=half)
        .map(|j| {
            let xi = Complex64::from_polar(1.0, PI + TAU * j as f64 / n as f64);
            let q = if j == 0 {
                0.0
            } else if j == half {
                1.0
            } else {
                problem.arc.linear_fraction(inverse.apply(xi).arg(), 1e-6).ok_or_else(|| {
                    Error::InvalidProblem("normalized lower arc does not map onto L".into())
                })?
            };
            Ok(Complex64::from_polar(interp(&log_mod, q).exp(), interp(&arg, q)))
        })
        .collect()
}

/// Trigonometric interpolant of grid samples from precomputed coefficients.
fn trig_eval(coeffs: &[Complex64], theta: f64) -> Complex64 {
    let n = coeffs.len();
    coeffs
        .iter()
        .enumerate()
        .map(|(k, c)| {
            if 2 * k == n {
                c * (n as f64 / 2.0 * theta).cos()
            } else {
                c * Complex64::from_polar(1.0, signed_frequency(k, n) as f64 * theta)
            }
        })
        .sum()
}

/// Maps the arc to the lower semicircle and absorbs the factored symbol
/// into the fibers by the rotation and dilation `i e^{h}`: the new log-radius is
/// `lambda(theta_src, phi - tau) + Re h` with `tau = pi/2 + Im h`.
pub fn to_standard_form(problem: &Problem) -> Result<(StandardProblem, ReductionData)> {
    problem.validate()?;
    let n = problem.grid;
    let (plus, minus) = problem.arc.endpoints();
    let mobius = match problem.arc {
        ArcSpec::Standard => Mobius::identity(),
        ArcSpec::Endpoints { .. } => normalize_arc(plus, minus)?,
    };
    let inverse = mobius.inverse();
    let lower = symbol_on_lower_arc(problem, &inverse)?;
    let a_ext = extend_symbol(n, &lower)?;
    let SymbolFactorization { r, h, h_trace } = factor_conjugate_symbol(&a_ext)?;

    let coeffs = h_trace.coefficients();
    let h_at = |theta: f64| {
        let k = theta / TAU * n as f64;
        if (k - k.round()).abs() < 1e-9 {
            h_trace.values()[(k.round() as usize) % n]
        } else {
            trig_eval(&coeffs, theta)
        }
    };
    let src = &problem.fibers;
    let standard_arc = mobius.is_identity(1e-14);
    let trivial_symbol = (0..src.m_theta()).all(|i| {
        let hv = h_at(src.theta_at(i));
        hv.re.abs() < 1e-15 && (FRAC_PI_2 + hv.im).rem_euclid(TAU).min(
            TAU - (FRAC_PI_2 + hv.im).rem_euclid(TAU),
        ) < 1e-15
    });
    let fibers = if standard_arc && trivial_symbol {
        src.clone()
    } else if standard_arc {
        src.shifted(|theta| {
            let hv = h_at(theta);
            (FRAC_PI_2 + hv.im, hv.re)
        })?
    } else {
        src.resampled(src.m_theta(), |theta| {
            let xi = Complex64::from_polar(1.0, theta);
            let source_theta = PI * problem.arc.fiber_fraction(inverse.apply(xi).arg());
            let hv = h_at(theta);
            (source_theta, FRAC_PI_2 + hv.im, hv.re)
        })?
    };
    let zeros = problem.zeros.map_points(|z| mobius.apply(z))?;
    let psi = GridFunction::new(boundary_psi(n))?;
    Ok((
        StandardProblem { fibers, grid: n, steps: problem.steps, zeros },
        ReductionData { mobius, mobius_inverse: inverse, h, h_trace, r, psi },
    ))
}
