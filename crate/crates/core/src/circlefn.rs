//! Functions sampled on the uniform grid of the unit circle.
//!
//! Node `k` of an `n`-point grid sits at `theta_k = 2 pi k / n`. Fourier
//! coefficients use the normalized convention `c_k = (1/n) sum_j u_j e^{-i k theta_j}`
//! so that `u_j = sum_k c_k e^{i k theta_j}`.

use std::cell::RefCell;
use std::f64::consts::{PI, TAU};
use std::fmt;

use num_complex::Complex64;
use rustfft::FftPlanner;

use crate::error::{Error, Result};

thread_local! {
    static PLANNER: RefCell<FftPlanner<f64>> = RefCell::new(FftPlanner::new());
}

/// Normalized forward transform: returns `c_k` with `u_j = sum_k c_k e^{i k theta_j}`.
pub(crate) fn fft_forward(values: &[Complex64]) -> Vec<Complex64> {
    let n = values.len();
    let mut buf = values.to_vec();
    PLANNER.with(|p| p.borrow_mut().plan_fft_forward(n).process(&mut buf));
    let scale = 1.0 / n as f64;
    buf.iter_mut().for_each(|c| *c *= scale);
    buf
}

/// Synthesis `u_j = sum_k c_k e^{i k theta_j}` (inverse of [`fft_forward`]).
pub(crate) fn fft_inverse(coeffs: &[Complex64]) -> Vec<Complex64> {
    let n = coeffs.len();
    let mut buf = coeffs.to_vec();
    PLANNER.with(|p| p.borrow_mut().plan_fft_inverse(n).process(&mut buf));
    buf
}

/// Signed frequency of DFT slot `k` on an `n`-point grid; the Nyquist slot maps to `n/2`.
pub(crate) fn signed_frequency(k: usize, n: usize) -> i64 {
    if k <= n / 2 {
        k as i64
    } else {
        k as i64 - n as i64
    }
}

/// Hilbert transform of real samples without validation.
pub(crate) fn hilbert_real(u: &[f64]) -> Vec<f64> {
    let n = u.len();
    let input: Vec<Complex64> = u.iter().map(|&x| Complex64::new(x, 0.0)).collect();
    let mut coeffs = fft_forward(&input);
    for (k, c) in coeffs.iter_mut().enumerate() {
        let freq = signed_frequency(k, n);
        *c = if freq == 0 || 2 * k == n {
            Complex64::new(0.0, 0.0)
        } else {
            *c * Complex64::new(0.0, -(freq.signum() as f64))
        };
    }
    fft_inverse(&coeffs).into_iter().map(|c| c.re).collect()
}

/// Continuous argument along a closed sampled curve, starting from the
/// principal argument of the first sample. No closure correction is applied.
pub(crate) fn unwrap_phase(values: &[Complex64]) -> Vec<f64> {
    let mut out = Vec::with_capacity(values.len());
    let mut acc = values[0].arg();
    out.push(acc);
    for pair in values.windows(2) {
        acc += (pair[1] / pair[0]).arg();
        out.push(acc);
    }
    out
}

pub fn node_angle(n: usize, k: usize) -> f64 {
    TAU * k as f64 / n as f64
}

pub fn check_grid_size(n: usize) -> Result<()> {
    if n >= 64 && n.is_power_of_two() {
        Ok(())
    } else {
        Err(Error::InvalidGridSize(n))
    }
}

/// Complex samples on the uniform circle grid.
#[derive(Debug, Clone, PartialEq)]
pub struct GridFunction {
    values: Vec<Complex64>,
}

impl GridFunction {
    pub fn new(values: Vec<Complex64>) -> Result<Self> {
        check_grid_size(values.len())?;
        if let Some(k) = values.iter().position(|v| !v.re.is_finite() || !v.im.is_finite()) {
            return Err(Error::NonFinite(k));
        }
        Ok(Self { values })
    }

    pub fn from_real(values: Vec<f64>) -> Result<Self> {
        Self::new(values.into_iter().map(|x| Complex64::new(x, 0.0)).collect())
    }

    pub fn from_fn(n: usize, f: impl Fn(f64) -> Complex64) -> Result<Self> {
        check_grid_size(n)?;
        Self::new((0..n).map(|k| f(node_angle(n, k))).collect())
    }

    pub fn from_real_fn(n: usize, f: impl Fn(f64) -> f64) -> Result<Self> {
        Self::from_fn(n, |t| Complex64::new(f(t), 0.0))
    }

    pub fn n_grid(&self) -> usize {
        self.values.len()
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<Complex64> {
        self.values
    }

    pub fn theta(&self, k: usize) -> f64 {
        node_angle(self.n_grid(), k)
    }

    pub fn real_parts(&self) -> Vec<f64> {
        self.values.iter().map(|v| v.re).collect()
    }

    pub fn max_imag(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.im.abs()))
    }

    pub fn sup_norm(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.norm()))
    }

    pub fn mean(&self) -> Complex64 {
        self.values.iter().sum::<Complex64>() / self.n_grid() as f64
    }

    pub fn is_real(&self, tol: f64) -> bool {
        self.max_imag() <= tol * (1.0 + self.sup_norm())
    }

    /// Fourier coefficients in DFT slot order.
    pub fn coefficients(&self) -> Vec<Complex64> {
        fft_forward(&self.values)
    }

    pub fn from_coefficients(coeffs: &[Complex64]) -> Result<Self> {
        check_grid_size(coeffs.len())?;
        Self::new(fft_inverse(coeffs))
    }

    pub fn map(&self, f: impl Fn(Complex64) -> Complex64) -> Result<Self> {
        Self::new(self.values.iter().map(|&v| f(v)).collect())
    }

    pub fn zip_with(
        &self,
        other: &GridFunction,
        f: impl Fn(Complex64, Complex64) -> Complex64,
    ) -> Result<Self> {
        if self.n_grid() != other.n_grid() {
            return Err(Error::GridMismatch { left: self.n_grid(), right: other.n_grid() });
        }
        Self::new(self.values.iter().zip(&other.values).map(|(&a, &b)| f(a, b)).collect())
    }

    pub fn try_add(&self, other: &GridFunction) -> Result<Self> {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn try_mul(&self, other: &GridFunction) -> Result<Self> {
        self.zip_with(other, |a, b| a * b)
    }

    /// Trigonometric interpolant at an arbitrary angle. The Nyquist mode is
    /// split symmetrically so that real samples give a real interpolant.
    pub fn eval_trig(&self, theta: f64) -> Complex64 {
        let n = self.n_grid();
        let coeffs = self.coefficients();
        let mut acc = Complex64::new(0.0, 0.0);
        for (k, c) in coeffs.iter().enumerate() {
            if 2 * k == n {
                acc += c * (n as f64 / 2.0 * theta).cos();
            } else {
                acc += c * Complex64::from_polar(1.0, signed_frequency(k, n) as f64 * theta);
            }
        }
        acc
    }
}

/// Holomorphic function represented by its nonnegative-frequency coefficients
/// `c_0 .. c_{n/2-1}` on an `n`-point grid.
#[derive(Debug, Clone, PartialEq)]
pub struct AnalyticFunction {
    coeffs: Vec<Complex64>,
}

impl AnalyticFunction {
    pub fn from_coeffs(coeffs: Vec<Complex64>) -> Result<Self> {
        check_grid_size(2 * coeffs.len())?;
        if let Some(k) = coeffs.iter().position(|v| !v.re.is_finite() || !v.im.is_finite()) {
            return Err(Error::NonFinite(k));
        }
        Ok(Self { coeffs })
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn n_grid(&self) -> usize {
        2 * self.coeffs.len()
    }

    /// Power-series evaluation by Horner's rule.
    pub fn eval(&self, z: Complex64) -> Complex64 {
        self.coeffs.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, &c| acc * z + c)
    }

    /// Boundary trace on the native grid.
    pub fn trace(&self) -> GridFunction {
        self.on_circle(1.0)
    }

    /// Values on the circle of radius `r` sampled at the native grid angles.
    pub fn on_circle(&self, r: f64) -> GridFunction {
        let n = self.n_grid();
        let mut full = vec![Complex64::new(0.0, 0.0); n];
        let mut scale = 1.0;
        for (slot, &c) in full.iter_mut().zip(&self.coeffs) {
            *slot = c * scale;
            scale *= r;
        }
        GridFunction { values: fft_inverse(&full) }
    }
}

/// Output of [`analytic_projection`].
#[derive(Debug, Clone, PartialEq)]
pub struct Projection {
    pub function: AnalyticFunction,
    /// Sum of `|c_k|^2` over the discarded slots (negative frequencies and Nyquist).
    pub discarded_energy: f64,
    /// Sum of `|c_k|^2` over all slots.
    pub total_energy: f64,
}

impl Projection {
    pub fn discarded_fraction(&self) -> f64 {
        if self.total_energy > 0.0 {
            self.discarded_energy / self.total_energy
        } else {
            0.0
        }
    }
}

pub fn analytic_projection(u: &GridFunction) -> Projection {
    let n = u.n_grid();
    let coeffs = u.coefficients();
    let total_energy = coeffs.iter().map(|c| c.norm_sqr()).sum();
    let discarded_energy = coeffs[n / 2..].iter().map(|c| c.norm_sqr()).sum();
    Projection {
        function: AnalyticFunction { coeffs: coeffs[..n / 2].to_vec() },
        discarded_energy,
        total_energy,
    }
}

/// Conjugate function with multiplier `-i sign(k)`; the result has zero mean.
pub fn hilbert_transform(u: &GridFunction) -> Result<GridFunction> {
    let tol = 1e-12 * (1.0 + u.sup_norm());
    let imag = u.max_imag();
    if imag > tol {
        return Err(Error::NotReal(imag));
    }
    GridFunction::from_real(hilbert_real(&u.real_parts()))
}

/// Winding number stored as twice its value so that half-integers are exact.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct DoubledWinding(pub i64);

impl DoubledWinding {
    pub fn doubled(self) -> i64 {
        self.0
    }

    pub fn is_half(self) -> bool {
        self.0 % 2 != 0
    }

    pub fn value(self) -> f64 {
        self.0 as f64 / 2.0
    }

    pub fn negated(self) -> Self {
        Self(-self.0)
    }
}

impl fmt::Display for DoubledWinding {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_half() {
            write!(f, "{}/2", self.0)
        } else {
            write!(f, "{}", self.0 / 2)
        }
    }
}

/// Total argument increment of `b` around the circle divided by `2 pi`.
///
/// When `allow_half` is set and the last sample sits next to `-b(theta_0)`
/// rather than `b(theta_0)`, the curve is read as closing onto its negative
/// and the result is an odd multiple of one half.
pub fn winding_number(b: &GridFunction, allow_half: bool) -> Result<DoubledWinding> {
    let values = b.values();
    let scale = b.sup_norm();
    if let Some(k) = values.iter().position(|v| v.norm() <= 1e-14 * scale || v.norm() == 0.0) {
        return Err(Error::SingularCoefficient(k));
    }
    let n = values.len();
    let mut total = 0.0;
    for (index, pair) in values.windows(2).enumerate() {
        let step = (pair[1] / pair[0]).arg();
        if step.abs() >= PI / 2.0 {
            return Err(Error::UnderResolved { index, step });
        }
        total += step;
    }
    let closure = (values[0] / values[n - 1]).arg();
    if closure.abs() < PI / 2.0 {
        total += closure;
        return Ok(DoubledWinding(2 * (total / TAU).round() as i64));
    }
    let flipped = (-values[0] / values[n - 1]).arg();
    if flipped.abs() >= PI / 2.0 {
        return Err(Error::UnderResolved { index: n - 1, step: closure });
    }
    if !allow_half {
        return Err(Error::HalfWindingNotAllowed);
    }
    total += flipped;
    Ok(DoubledWinding((total / PI).round() as i64))
}

/// Empirical Hoelder exponent at node `center`.
///
/// For `s = 2^j` nodes, `j = 1..=log2(radius)`, the modulus of continuity
/// `max_{|k| <= s} |u(center + k) - u(center)|` is fitted against the
/// distance `s h` in log-log coordinates. Functions that do not oscillate
/// measurably get the sentinel 1.5.
pub fn holder_estimate(u: &GridFunction, center: usize, radius: usize) -> Result<f64> {
    if radius < 8 {
        return Err(Error::RadiusTooSmall(radius));
    }
    let n = u.n_grid();
    let values = u.values();
    let center = center % n;
    let base = values[center];
    let h = TAU / n as f64;
    let max_j = (radius.min(n / 2) as f64).log2().floor() as u32;
    let mut osc = 0.0f64;
    let mut points = Vec::new();
    let mut k_done = 0usize;
    for j in 1..=max_j {
        let s = 1usize << j;
        for k in (k_done + 1)..=s {
            let right = values[(center + k) % n];
            let left = values[(center + n - k % n) % n];
            osc = osc.max((right - base).norm()).max((left - base).norm());
        }
        k_done = s;
        points.push(((s as f64 * h).ln(), osc));
    }
    let floor = 1e-13 * (1.0 + base.norm());
    let usable: Vec<(f64, f64)> =
        points.into_iter().filter(|&(_, w)| w > floor).map(|(x, w)| (x, w.ln())).collect();
    if usable.len() < 2 {
        return Ok(1.5);
    }
    let m = usable.len() as f64;
    let mx = usable.iter().map(|p| p.0).sum::<f64>() / m;
    let my = usable.iter().map(|p| p.1).sum::<f64>() / m;
    let sxy: f64 = usable.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = usable.iter().map(|p| (p.0 - mx).powi(2)).sum();
    Ok((sxy / sxx).clamp(0.0, 1.5))
}

/// Trapezoidal `(integral |u|^p d theta)^{1/p}` over the full circle.
pub fn lp_norm(u: &GridFunction, p: f64) -> Result<f64> {
    if !(p >= 1.0) || !p.is_finite() {
        return Err(Error::InvalidExponent(p));
    }
    let h = TAU / u.n_grid() as f64;
    let sum: f64 = u.values().iter().map(|v| v.norm().powf(p)).sum();
    Ok((h * sum).powf(1.0 / p))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn max_diff(a: &GridFunction, b: &GridFunction) -> f64 {
        a.values().iter().zip(b.values()).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
    }

    #[test]
    fn grid_size_is_checked() {
        assert!(GridFunction::new(vec![c(0.0, 0.0); 48]).is_err());
        assert!(GridFunction::new(vec![c(0.0, 0.0); 96]).is_err());
        assert!(GridFunction::new(vec![c(0.0, 0.0); 64]).is_ok());
        let mut bad = vec![c(0.0, 0.0); 64];
        bad[3] = c(f64::NAN, 0.0);
        assert_eq!(GridFunction::new(bad), Err(Error::NonFinite(3)));
    }

    #[test]
    fn mismatched_grids_are_rejected() {
        let a = GridFunction::from_real_fn(64, |_| 1.0).unwrap();
        let b = GridFunction::from_real_fn(128, |_| 1.0).unwrap();
        assert_eq!(a.try_add(&b), Err(Error::GridMismatch { left: 64, right: 128 }));
    }

    #[test]
    fn hilbert_of_cos_is_sin() {
        let u = GridFunction::from_real_fn(256, f64::cos).unwrap();
        let expected = GridFunction::from_real_fn(256, f64::sin).unwrap();
        assert!(max_diff(&hilbert_transform(&u).unwrap(), &expected) < 1e-13);
    }

    #[test]
    fn hilbert_of_constant_vanishes() {
        let u = GridFunction::from_real_fn(64, |_| 1.0).unwrap();
        assert!(hilbert_transform(&u).unwrap().sup_norm() < 1e-15);
    }

    #[test]
    fn hilbert_of_sin_is_minus_cos() {
        // sin = (e^{it} - e^{-it})/(2i); multiply by -i sign(k): -(e^{it}+e^{-it})/2 = -cos
        let u = GridFunction::from_real_fn(128, f64::sin).unwrap();
        let expected = GridFunction::from_real_fn(128, |t| -t.cos()).unwrap();
        assert!(max_diff(&hilbert_transform(&u).unwrap(), &expected) < 1e-13);
    }

    #[test]
    fn hilbert_rejects_complex_input() {
        let u = GridFunction::from_fn(64, |t| Complex64::from_polar(1.0, t)).unwrap();
        assert!(matches!(hilbert_transform(&u), Err(Error::NotReal(_))));
    }

    #[test]
    fn hilbert_gives_analytic_completion() {
        let u = GridFunction::from_real_fn(128, |t| 0.3 + (2.0 * t).cos() - 0.5 * (3.0 * t).sin())
            .unwrap();
        let hu = hilbert_transform(&u).unwrap();
        let w = u.zip_with(&hu, |a, b| a + Complex64::i() * b).unwrap();
        let proj = analytic_projection(&w);
        assert!(proj.discarded_energy < 1e-28);
        assert_abs_diff_eq!(proj.function.eval(c(0.0, 0.0)).re, 0.3, epsilon = 1e-14);
        assert_abs_diff_eq!(proj.function.eval(c(0.0, 0.0)).im, 0.0, epsilon = 1e-14);
    }

    #[test]
    fn projection_examples() {
        let e = GridFunction::from_fn(64, |t| Complex64::from_polar(1.0, t)).unwrap();
        let p = analytic_projection(&e);
        assert_abs_diff_eq!(p.function.coeffs()[1].re, 1.0, epsilon = 1e-14);
        assert!(p.discarded_energy < 1e-28);

        let em = GridFunction::from_fn(64, |t| Complex64::from_polar(1.0, -t)).unwrap();
        let p = analytic_projection(&em);
        assert!(p.function.coeffs().iter().all(|c| c.norm() < 1e-14));
        assert_abs_diff_eq!(p.discarded_energy, p.total_energy, epsilon = 1e-14);

        let two_cos = GridFunction::from_real_fn(64, |t| 2.0 * t.cos()).unwrap();
        let p = analytic_projection(&two_cos);
        assert_abs_diff_eq!(p.function.coeffs()[1].re, 1.0, epsilon = 1e-14);
        assert!(p.function.coeffs()[0].norm() < 1e-14);
        assert_abs_diff_eq!(p.discarded_energy, 1.0, epsilon = 1e-13);
    }

    #[test]
    fn analytic_eval_matches_trace_and_series() {
        let mut coeffs = vec![c(0.0, 0.0); 32];
        coeffs[0] = c(1.0, 0.0);
        coeffs[2] = c(0.0, 0.5);
        let f = AnalyticFunction::from_coeffs(coeffs).unwrap();
        let z = c(0.3, -0.4);
        assert!((f.eval(z) - (1.0 + c(0.0, 0.5) * z * z)).norm() < 1e-15);
        let trace = f.trace();
        for k in 0..64 {
            let xi = Complex64::from_polar(1.0, trace.theta(k));
            assert!((trace.values()[k] - f.eval(xi)).norm() < 1e-13);
        }
        let inner = f.on_circle(0.5);
        let xi = Complex64::from_polar(0.5, inner.theta(5));
        assert!((inner.values()[5] - f.eval(xi)).norm() < 1e-14);
    }

    #[test]
    fn winding_examples() {
        let e = GridFunction::from_fn(64, |t| Complex64::from_polar(1.0, t)).unwrap();
        assert_eq!(winding_number(&e, false).unwrap(), DoubledWinding(2));
        let five = GridFunction::from_real_fn(64, |_| 5.0).unwrap();
        assert_eq!(winding_number(&five, false).unwrap(), DoubledWinding(0));
        let third = GridFunction::from_fn(64, |t| Complex64::from_polar(2.0, -3.0 * t)).unwrap();
        assert_eq!(winding_number(&third, false).unwrap().value(), -3.0);
    }

    #[test]
    fn half_winding_needs_permission() {
        let half = GridFunction::from_fn(64, |t| Complex64::from_polar(1.0, -0.5 * t)).unwrap();
        assert_eq!(winding_number(&half, false), Err(Error::HalfWindingNotAllowed));
        let w = winding_number(&half, true).unwrap();
        assert_eq!(w, DoubledWinding(-1));
        assert!(w.is_half());
        assert_eq!(w.to_string(), "-1/2");
        let three_halves =
            GridFunction::from_fn(128, |t| Complex64::from_polar(1.0, 1.5 * t)).unwrap();
        assert_eq!(winding_number(&three_halves, true).unwrap(), DoubledWinding(3));
    }

    #[test]
    fn winding_errors() {
        let mut v = vec![c(1.0, 0.0); 64];
        v[7] = c(0.0, 0.0);
        assert_eq!(
            winding_number(&GridFunction::new(v).unwrap(), true),
            Err(Error::SingularCoefficient(7))
        );
        let fast = GridFunction::from_fn(64, |t| Complex64::from_polar(1.0, 20.0 * t)).unwrap();
        assert!(matches!(winding_number(&fast, true), Err(Error::UnderResolved { .. })));
    }

    #[test]
    fn holder_fits_power_laws() {
        let n = 4096;
        for &alpha in &[0.5, 0.4] {
            let u = GridFunction::from_real_fn(n, |t| (t - PI).abs().powf(alpha)).unwrap();
            let est = holder_estimate(&u, n / 2, 64).unwrap();
            assert!((est - alpha).abs() < 0.05, "alpha {alpha}: {est}");
        }
        let u = GridFunction::from_real_fn(n, f64::cos).unwrap();
        assert!(holder_estimate(&u, n / 4, 16).unwrap() >= 0.99);
        assert_eq!(holder_estimate(&u, 0, 64).unwrap(), 1.5);
        let flat = GridFunction::from_real_fn(n, |_| 2.0).unwrap();
        assert_eq!(holder_estimate(&flat, 0, 64).unwrap(), 1.5);
        assert_eq!(holder_estimate(&flat, 0, 4), Err(Error::RadiusTooSmall(4)));
    }

    #[test]
    fn lp_norm_examples() {
        let one = GridFunction::from_real_fn(64, |_| 1.0).unwrap();
        assert_abs_diff_eq!(lp_norm(&one, 2.0).unwrap(), TAU.sqrt(), epsilon = 1e-14);
        let cos = GridFunction::from_real_fn(64, f64::cos).unwrap();
        assert_abs_diff_eq!(lp_norm(&cos, 2.0).unwrap(), PI.sqrt(), epsilon = 1e-14);
        let zero = GridFunction::from_real_fn(64, |_| 0.0).unwrap();
        assert_eq!(lp_norm(&zero, 3.5).unwrap(), 0.0);
        assert!(lp_norm(&one, 0.5).is_err());
    }

    #[test]
    fn eval_trig_interpolates() {
        let u = GridFunction::from_real_fn(64, |t| (3.0 * t).cos() + 0.2 * t.sin()).unwrap();
        let x = 0.123;
        assert!((u.eval_trig(x).re - ((3.0 * x).cos() + 0.2 * x.sin())).abs() < 1e-13);
        assert!(u.eval_trig(x).im.abs() < 1e-14);
    }

    fn band_limited(n: usize, coeffs: &[(f64, f64)]) -> GridFunction {
        GridFunction::from_real_fn(n, |t| {
            coeffs
                .iter()
                .enumerate()
                .map(|(k, &(a, b))| a * (k as f64 * t).cos() + b * (k as f64 * t).sin())
                .sum()
        })
        .unwrap()
    }

    proptest! {
        #[test]
        fn hilbert_squared_is_minus_identity(
            coeffs in proptest::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 1..16)
        ) {
            let u = band_limited(64, &coeffs);
            let hhu = hilbert_transform(&hilbert_transform(&u).unwrap()).unwrap();
            let mean = u.mean().re;
            let expected = u.map(|v| -(v - mean)).unwrap();
            prop_assert!(max_diff(&hhu, &expected) < 1e-12);
        }

        #[test]
        fn hilbert_is_linear(
            a in -2.0f64..2.0,
            b in -2.0f64..2.0,
            cu in proptest::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 1..20),
            cv in proptest::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 1..20),
        ) {
            let u = band_limited(128, &cu);
            let v = band_limited(128, &cv);
            let combo = u.zip_with(&v, |x, y| a * x + b * y).unwrap();
            let lhs = hilbert_transform(&combo).unwrap();
            let hu = hilbert_transform(&u).unwrap();
            let hv = hilbert_transform(&v).unwrap();
            let rhs = hu.zip_with(&hv, |x, y| a * x + b * y).unwrap();
            prop_assert!(max_diff(&lhs, &rhs) < 1e-12);
        }

        #[test]
        fn winding_is_additive(k1 in -4i64..5, k2 in -4i64..5, eps in 0.0f64..0.5) {
            let b1 = GridFunction::from_fn(128, |t| {
                Complex64::from_polar(1.0 + eps * t.cos(), k1 as f64 * t + eps * t.sin())
            }).unwrap();
            let b2 = GridFunction::from_fn(128, |t| {
                Complex64::from_polar(2.0, k2 as f64 * t) + Complex64::new(eps, 0.0)
            }).unwrap();
            let prod = b1.try_mul(&b2).unwrap();
            let w1 = winding_number(&b1, false).unwrap().doubled();
            let w2 = winding_number(&b2, false).unwrap().doubled();
            prop_assert_eq!(winding_number(&prod, false).unwrap().doubled(), w1 + w2);
        }

        #[test]
        fn projection_is_idempotent(
            re in proptest::collection::vec(-1.0f64..1.0, 64),
            im in proptest::collection::vec(-1.0f64..1.0, 64),
        ) {
            let u = GridFunction::new(
                re.iter().zip(&im).map(|(&a, &b)| Complex64::new(a, b)).collect()
            ).unwrap();
            let once = analytic_projection(&u).function;
            let twice = analytic_projection(&once.trace());
            prop_assert!(twice.discarded_energy < 1e-28);
            let diff = once.coeffs().iter().zip(twice.function.coeffs())
                .map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
            prop_assert!(diff < 1e-14);
        }
    }
}
