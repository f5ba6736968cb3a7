//! Linear Riemann–Hilbert problem `Re(C kappa) = b` on the circle grid.
//!
//! `kappa` is the boundary trace of a function holomorphic in the disk and
//! `C` is unimodular with (possibly half-integer) winding. With
//! `N = -wind(C)` the solution set is an affine space of real dimension
//! `2N + 1` for `N >= 0`. For `N = -1/2` the solution is unique, provided the
//! right-hand side vanishes where `C` changes sign. Lower indices are
//! rejected as over-determined.
//!
//! Integer indices are solved by factoring `C z^N = e^{i v}` and dividing by
//! the outer function `e^{i v - H v}`, which reduces everything to a Schwarz
//! problem. Half-integer indices are lifted to the double cover `zeta^2 = xi`,
//! where the coefficient becomes continuous with odd integer index.

use num_complex::Complex64;

use crate::circlefn::{
    analytic_projection, fft_forward, fft_inverse, hilbert_real, node_angle, unwrap_phase,
    winding_number, DoubledWinding, GridFunction, Projection,
};
use crate::corners::Substitution;
use crate::error::{Error, Result};

const I: Complex64 = Complex64::new(0.0, 1.0);

/// Relative tolerance on the node equations after a solve.
pub const LINEAR_RESIDUAL_TOL: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq)]
pub struct LinearRHProblem {
    coeff: GridFunction,
    rhs: Vec<f64>,
    index: DoubledWinding,
}

impl LinearRHProblem {
    /// Normalizes `Re(c kappa) = r` to a unimodular coefficient.
    pub fn new(coeff: GridFunction, rhs: Vec<f64>) -> Result<Self> {
        let n = coeff.n_grid();
        if rhs.len() != n {
            return Err(Error::GridMismatch { left: n, right: rhs.len() });
        }
        if let Some(k) = rhs.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite(k));
        }
        let scale = coeff.sup_norm();
        let mut unit = Vec::with_capacity(n);
        let mut scaled = Vec::with_capacity(n);
        for (k, (&c, &r)) in coeff.values().iter().zip(&rhs).enumerate() {
            let m = c.norm();
            if m == 0.0 || m <= 1e-14 * scale {
                return Err(Error::SingularCoefficient(k));
            }
            unit.push(c / m);
            scaled.push(r / m);
        }
        let coeff = GridFunction::new(unit)?;
        let index = winding_number(&coeff, true)?.negated();
        Ok(Self { coeff, rhs: scaled, index })
    }

    /// Unimodular coefficient after normalization.
    pub fn coeff(&self) -> &GridFunction {
        &self.coeff
    }

    pub fn rhs(&self) -> &[f64] {
        &self.rhs
    }

    /// `2N`, with `N = -wind(coeff)`.
    pub fn index(&self) -> DoubledWinding {
        self.index
    }

    pub fn n_grid(&self) -> usize {
        self.coeff.n_grid()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LinearSolution {
    /// A particular solution, as node values of a holomorphic trace.
    pub kappa: GridFunction,
    /// Orthonormal basis (real inner product) of the homogeneous solutions.
    pub kernel: Vec<GridFunction>,
    pub index: DoubledWinding,
    /// Sup of `|Re(C kappa) - b|` over the nodes.
    pub residual: f64,
}

impl LinearSolution {
    pub fn kernel_dimension(&self) -> usize {
        self.kernel.len()
    }

    /// Spectral holomorphic representative of the particular solution.
    pub fn analytic(&self) -> Projection {
        analytic_projection(&self.kappa)
    }

    /// The solution of smallest discrete `L2` norm.
    pub fn min_norm(&self) -> GridFunction {
        let mut values = self.kappa.values().to_vec();
        for k in &self.kernel {
            let c = real_inner(k.values(), &values);
            values.iter_mut().zip(k.values()).for_each(|(v, b)| *v -= c * b);
        }
        GridFunction::new(values).expect("finite combination of finite vectors")
    }
}

fn real_inner(a: &[Complex64], b: &[Complex64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x.conj() * y).re).sum::<f64>() / a.len() as f64
}

/// Modified Gram–Schmidt under `Re <a, b>`, dropping directions that are
/// numerically dependent and keeping at most `limit` vectors.
fn orthonormalize(vectors: Vec<Vec<Complex64>>, limit: usize) -> Vec<Vec<Complex64>> {
    let mut basis: Vec<Vec<Complex64>> = Vec::new();
    for mut v in vectors {
        let original = real_inner(&v, &v).sqrt();
        if original == 0.0 || !original.is_finite() {
            continue;
        }
        for b in &basis {
            let c = real_inner(b, &v);
            v.iter_mut().zip(b).for_each(|(x, y)| *x -= c * y);
        }
        let norm = real_inner(&v, &v).sqrt();
        if norm > 1e-8 * original {
            v.iter_mut().for_each(|x| *x /= norm);
            basis.push(v);
        }
        if basis.len() == limit {
            break;
        }
    }
    basis
}

fn node_power(m: usize, j: usize, power: i64) -> Complex64 {
    Complex64::from_polar(1.0, power as f64 * node_angle(m, j))
}

struct IntegerSolve {
    kappa: Vec<Complex64>,
    kernel: Vec<Vec<Complex64>>,
}

/// `Re(coeff kappa) = rhs` for unimodular `coeff` with winding `-index`, `index >= -1`.
fn solve_integer(coeff: &[Complex64], rhs: &[f64], index: i64) -> Result<IntegerSolve> {
    let m = coeff.len();
    let t: Vec<Complex64> = (0..m).map(|j| coeff[j] * node_power(m, j, index)).collect();
    let v = unwrap_phase(&t);
    let closure = v[m - 1] + (t[0] / t[m - 1]).arg() - v[0];
    if closure.abs() > 1e-6 {
        return Err(Error::UnderResolved { index: m - 1, step: closure });
    }
    let hv = hilbert_real(&v);
    let outer: Vec<Complex64> = v.iter().zip(&hv).map(|(&a, &h)| Complex64::from_polar((-h).exp(), a)).collect();
    let scaled: Vec<Complex64> =
        rhs.iter().zip(&hv).map(|(&b, &h)| Complex64::new(b * h.exp().recip(), 0.0)).collect();
    let c = fft_forward(&scaled);
    let mut q = vec![Complex64::new(0.0, 0.0); m];
    if index == -1 {
        let size = scaled.iter().map(|s| s.re.abs()).fold(0.0, f64::max);
        if c[0].norm() > 1e-10 * (1.0 + size) {
            return Err(Error::IncompatibleRhs(c[0].norm()));
        }
    } else {
        q[0] = c[0];
    }
    for k in 1..m / 2 {
        q[k] = 2.0 * c[k];
    }
    q[m / 2] = c[m / 2];
    let schwarz = fft_inverse(&q);
    let kappa = (0..m).map(|j| node_power(m, j, index) * schwarz[j] / outer[j]).collect();

    let mut kernel = Vec::new();
    if index >= 0 {
        kernel.push((0..m).map(|j| I * node_power(m, j, index) / outer[j]).collect());
        for s in 1..=index {
            kernel.push(
                (0..m)
                    .map(|j| (node_power(m, j, index + s) - node_power(m, j, index - s)) / outer[j])
                    .collect(),
            );
            kernel.push(
                (0..m)
                    .map(|j| I * (node_power(m, j, index + s) + node_power(m, j, index - s)) / outer[j])
                    .collect(),
            );
        }
    }
    Ok(IntegerSolve { kappa, kernel })
}

pub fn solve_linear(problem: &LinearRHProblem) -> Result<LinearSolution> {
    let two_n = problem.index.doubled();
    if two_n < -1 {
        return Err(Error::OverDetermined(two_n));
    }
    if problem.index.is_half() {
        let rhs = &problem.rhs;
        let size = rhs.iter().map(|b| b.abs()).fold(0.0, f64::max);
        if rhs[0].abs() > LINEAR_RESIDUAL_TOL * (1.0 + size) {
            return Err(Error::IncompatibleRhs(rhs[0].abs()));
        }
    }
    solve_linear_unchecked(problem)
}

/// Solve without the admissibility checks of [`solve_linear`].
///
/// For a half-integer index the right-hand side only has to change sign
/// together with the coefficient at `xi = 1`; a nonzero value there is fine.
/// Index `-1` is solvable when the mean of the reduced right-hand side vanishes.
pub(crate) fn solve_linear_unchecked(problem: &LinearRHProblem) -> Result<LinearSolution> {
    let n = problem.n_grid();
    let two_n = problem.index.doubled();
    if two_n < -2 {
        return Err(Error::OverDetermined(two_n));
    }
    let coeff = problem.coeff.values();
    let rhs = &problem.rhs;
    let size = rhs.iter().map(|b| b.abs()).fold(0.0, f64::max);

    let (kappa, kernel) = if problem.index.is_half() {
        let sign = |j: usize| if j < n { 1.0 } else { -1.0 };
        let cover_coeff: Vec<Complex64> = (0..2 * n).map(|j| sign(j) * coeff[j % n]).collect();
        let cover_rhs: Vec<f64> = (0..2 * n).map(|j| sign(j) * rhs[j % n]).collect();
        let lifted = solve_integer(&cover_coeff, &cover_rhs, two_n)?;
        let descend = |k: &[Complex64]| -> Vec<Complex64> { (0..n).map(|j| 0.5 * (k[j] + k[j + n])).collect() };
        // Kernel elements odd under zeta -> -zeta do not descend.
        let kernel = lifted
            .kernel
            .iter()
            .filter_map(|k| {
                let down = descend(k);
                let kept = real_inner(&down, &down) > 1e-16 * real_inner(k, k);
                kept.then_some(down)
            })
            .collect();
        (descend(&lifted.kappa), kernel)
    } else {
        let lifted = solve_integer(coeff, rhs, two_n / 2)?;
        (lifted.kappa, lifted.kernel)
    };

    let expected = (two_n + 1).max(0) as usize;
    let kernel = orthonormalize(kernel, expected)
        .into_iter()
        .map(GridFunction::new)
        .collect::<Result<Vec<_>>>()?;
    let residual = coeff
        .iter()
        .zip(&kappa)
        .zip(rhs)
        .map(|((c, k), b)| ((c * k).re - b).abs())
        .fold(0.0, f64::max);
    let tolerance = LINEAR_RESIDUAL_TOL * (1.0 + size);
    if !(residual < tolerance) {
        return Err(Error::LinearResidual { residual, tolerance });
    }
    Ok(LinearSolution { kappa: GridFunction::new(kappa)?, kernel, index: problem.index, residual })
}

/// Assembles the problem for the corner-substituted unknown.
///
/// On the upper nodes `0..=n/2` the condition `Re(conj(B) P kappa) = r` is
/// normalized by `|B| |P|`; the corners get a zero right-hand side and the
/// upper-arc limit of the coefficient. On the lower arc the condition is
/// `Im(P kappa) = 0`, with the sign chosen so that the coefficient is
/// continuous through `xi = -1`.
pub fn build_linear_problem(
    b_upper: &[Complex64],
    rhs_upper: &[f64],
    sub: &Substitution,
) -> Result<LinearRHProblem> {
    let n = sub.n_grid();
    let half = n / 2;
    for len in [b_upper.len(), rhs_upper.len()] {
        if len != half + 1 {
            return Err(Error::GridMismatch { left: half + 1, right: len });
        }
    }
    let (coeff, _) = corner_coefficient(b_upper, sub)?;
    let modulus = sub.modulus();
    let rhs = (0..n)
        .map(|k| {
            if k == 0 || k >= half {
                0.0
            } else {
                rhs_upper[k] / (b_upper[k].norm() * modulus[k])
            }
        })
        .collect();
    LinearRHProblem::new(GridFunction::new(coeff)?, rhs)
}

/// Full-circle coefficient `conj(B)/|B| P/|P|` on the upper nodes and
/// `-i s P/|P|` on the lower ones; also returns the sign `s`.
pub(crate) fn corner_coefficient(b_upper: &[Complex64], sub: &Substitution) -> Result<(Vec<Complex64>, f64)> {
    let n = sub.n_grid();
    let half = n / 2;
    if b_upper.len() != half + 1 {
        return Err(Error::GridMismatch { left: half + 1, right: b_upper.len() });
    }
    let unit = sub.unit();
    let mut coeff = Vec::with_capacity(n);
    for (k, b) in b_upper.iter().enumerate() {
        let m = b.norm();
        if !(m > 0.0) {
            return Err(Error::SingularCoefficient(k));
        }
        coeff.push(b.conj() / m * unit[k]);
    }
    let first = -I * unit[half + 1];
    let sign = if (first - coeff[half]).norm() <= (first + coeff[half]).norm() { 1.0 } else { -1.0 };
    coeff.extend((half + 1..n).map(|k| -I * unit[k] * sign));
    Ok((coeff, sign))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corners::CornerData;
    use crate::reduction::boundary_psi;
    use proptest::prelude::*;
    use std::f64::consts::PI;

    fn power_coeff(n: usize, two_n: i64, extra: impl Fn(f64) -> f64) -> GridFunction {
        GridFunction::from_fn(n, |t| Complex64::from_polar(1.0, -(two_n as f64) * t / 2.0 + extra(t))).unwrap()
    }

    fn residual_of(p: &LinearRHProblem, kappa: &GridFunction) -> f64 {
        p.coeff()
            .values()
            .iter()
            .zip(kappa.values())
            .zip(p.rhs())
            .map(|((c, k), b)| ((c * k).re - b).abs())
            .fold(0.0, f64::max)
    }

    #[test]
    fn schwarz_problem_has_constant_kernel() {
        let n = 128;
        let coeff = GridFunction::from_fn(n, |_| Complex64::new(1.0, 0.0)).unwrap();
        let rhs: Vec<f64> = (0..n).map(|k| node_angle(n, k).cos()).collect();
        let p = LinearRHProblem::new(coeff, rhs).unwrap();
        assert_eq!(p.index(), DoubledWinding(0));
        let sol = solve_linear(&p).unwrap();
        assert_eq!(sol.kernel_dimension(), 1);
        let k = sol.kernel[0].values();
        assert!(k.iter().all(|v| v.re.abs() < 1e-14 && (v.im.abs() - 1.0).abs() < 1e-12));
        // kappa = z
        for (j, v) in sol.kappa.values().iter().enumerate() {
            let z = Complex64::from_polar(1.0, node_angle(n, j));
            assert!((v - z).norm() < 1e-12);
        }
    }

    #[test]
    fn corner_problem_for_circles_is_uniquely_solvable() {
        let n = 256;
        let sub = Substitution::new(&CornerData::circles(1.0), boundary_psi(n));
        let half = n / 2;
        let b = vec![Complex64::new(1.0, 0.0); half + 1];
        let rhs: Vec<f64> = (0..=half).map(|k| 0.1 * node_angle(n, k).sin()).collect();
        let p = build_linear_problem(&b, &rhs, &sub).unwrap();
        assert_eq!(p.index(), DoubledWinding(-1));
        let sol = solve_linear(&p).unwrap();
        assert_eq!(sol.kernel_dimension(), 0);
        assert!(sol.residual < 1e-10);
        let f: Vec<Complex64> = sub.factor().iter().zip(sol.kappa.values()).map(|(a, b)| a * b).collect();
        assert!(f[half + 1..n].iter().all(|v| v.im.abs() < 1e-10));
    }

    #[test]
    fn kernel_dimensions_follow_the_index() {
        let n = 256;
        for two_n in [-1i64, 0, 1, 2, 3, 4] {
            let coeff = power_coeff(n, two_n, |t| 0.2 * t.cos());
            let rhs: Vec<f64> = (0..n).map(|k| 0.3 * (node_angle(n, k) / 2.0).sin()).collect();
            let p = LinearRHProblem::new(coeff, rhs).unwrap();
            assert_eq!(p.index(), DoubledWinding(two_n));
            let sol = solve_linear(&p).unwrap();
            assert_eq!(sol.kernel_dimension(), (two_n + 1) as usize, "2N = {two_n}");
            for k in &sol.kernel {
                let zero = LinearRHProblem::new(p.coeff().clone(), vec![0.0; n]).unwrap();
                let r = residual_of(&zero, k);
                assert!(r < 1e-10, "2N = {two_n}: {r}");
            }
        }
    }

    #[test]
    fn index_minus_one_is_over_determined() {
        let n = 128;
        let coeff = power_coeff(n, -2, |_| 0.0);
        let ok: Vec<f64> = (0..n).map(|k| node_angle(n, k).sin()).collect();
        let p = LinearRHProblem::new(coeff.clone(), ok).unwrap();
        assert_eq!(solve_linear(&p), Err(Error::OverDetermined(-2)));
        // The internal path still solves it when the single condition holds.
        let sol = solve_linear_unchecked(&p).unwrap();
        assert_eq!(sol.kernel_dimension(), 0);
        let p = LinearRHProblem::new(coeff, vec![1.0; n]).unwrap();
        assert!(matches!(solve_linear_unchecked(&p), Err(Error::IncompatibleRhs(_))));
    }

    #[test]
    fn odd_rhs_across_the_jump_is_solvable_internally() {
        let n = 256;
        let coeff = power_coeff(n, -1, |t| 0.2 * t.sin());
        // b changes sign together with the coefficient at xi = 1.
        let rhs: Vec<f64> = (0..n).map(|k| (node_angle(n, k) / 2.0).cos()).collect();
        let p = LinearRHProblem::new(coeff, rhs).unwrap();
        assert!(matches!(solve_linear(&p), Err(Error::IncompatibleRhs(_))));
        let sol = solve_linear_unchecked(&p).unwrap();
        assert!(sol.residual < 1e-10);
        assert!(sol.analytic().discarded_fraction() < 1e-20);
    }

    fn corner_example(b: impl Fn(f64) -> Complex64) -> LinearRHProblem {
        let n = 256;
        let sub = Substitution::new(&CornerData::circles(1.0), boundary_psi(n));
        let upper: Vec<Complex64> = (0..=n / 2).map(|k| b(node_angle(n, k))).collect();
        build_linear_problem(&upper, &vec![0.0; n / 2 + 1], &sub).unwrap()
    }

    #[test]
    fn assembled_coefficient_examples() {
        let p = corner_example(|t| Complex64::from_polar(1.0, t));
        assert_eq!(p.index(), DoubledWinding(0));
        assert_eq!(solve_linear(&p).unwrap().kernel_dimension(), 1);

        let p = corner_example(|_| Complex64::new(1.0, 0.0));
        assert_eq!(p.index(), DoubledWinding(-1));
        // closed form of the conjugated coefficient on the upper arc
        let n = p.n_grid();
        for k in 1..n / 2 {
            let t = node_angle(n, k);
            let expected = Complex64::from_polar(1.0, (PI + 2.0 * t) / 4.0);
            assert!((p.coeff().values()[k] - expected).norm() < 1e-12);
        }

        let p = corner_example(|_| I);
        assert_eq!(p.index(), DoubledWinding(0));
    }

    #[test]
    fn zero_rhs_gives_zero_particular_solution() {
        let n = 128;
        for two_n in [-1, 0, 3] {
            let p = LinearRHProblem::new(power_coeff(n, two_n, |t| 0.4 * t.cos()), vec![0.0; n]).unwrap();
            assert!(solve_linear(&p).unwrap().kappa.sup_norm() == 0.0);
        }
    }

    #[test]
    fn cover_solution_is_even() {
        let n = 128;
        let coeff = power_coeff(n, 1, |t| 0.3 * t.sin());
        let rhs: Vec<f64> = (0..n).map(|k| (node_angle(n, k) / 2.0).sin().powi(3)).collect();
        let sol = solve_linear(&LinearRHProblem::new(coeff, rhs).unwrap()).unwrap();
        // lifting the descended solution to zeta^2 = xi gives only even modes
        let lifted: Vec<Complex64> = (0..2 * n).map(|j| sol.kappa.values()[j % n]).collect();
        let c = fft_forward(&lifted);
        assert!(c.iter().skip(1).step_by(2).all(|v| v.norm() < 1e-14));
    }

    #[test]
    fn half_index_needs_vanishing_rhs_at_the_jump() {
        let n = 128;
        let p = LinearRHProblem::new(power_coeff(n, -1, |_| 0.0), vec![1.0; n]).unwrap();
        assert!(matches!(solve_linear(&p), Err(Error::IncompatibleRhs(_))));
    }

    #[test]
    fn half_index_solution_is_holomorphic() {
        let n = 512;
        let coeff = power_coeff(n, -1, |t| 0.3 * t.cos());
        let rhs: Vec<f64> = (0..n)
            .map(|k| {
                let t = node_angle(n, k);
                (t / 2.0).sin() * (1.0 + 0.3 * t.cos())
            })
            .collect();
        let p = LinearRHProblem::new(coeff, rhs).unwrap();
        let sol = solve_linear(&p).unwrap();
        assert!(sol.analytic().discarded_fraction() < 1e-20);
    }

    #[test]
    fn min_norm_is_orthogonal_to_the_kernel() {
        let n = 128;
        let p = LinearRHProblem::new(
            power_coeff(n, 2, |t| 0.1 * (2.0 * t).sin()),
            (0..n).map(|k| node_angle(n, k).cos() + 0.5).collect(),
        )
        .unwrap();
        let sol = solve_linear(&p).unwrap();
        let m = sol.min_norm();
        assert!(residual_of(&p, &m) < 1e-10);
        for k in &sol.kernel {
            assert!(real_inner(k.values(), m.values()).abs() < 1e-12);
        }
    }

    #[test]
    fn non_unimodular_input_is_normalized() {
        let n = 64;
        let coeff = GridFunction::from_fn(n, |_| Complex64::new(0.0, 2.0)).unwrap();
        let p = LinearRHProblem::new(coeff, vec![4.0; n]).unwrap();
        let sol = solve_linear(&p).unwrap();
        assert!(sol.kappa.values().iter().all(|k| (k.im + 2.0).abs() < 1e-12));
        let singular = GridFunction::from_fn(n, |t| Complex64::new(t.cos() - 1.0, 0.0)).unwrap();
        assert!(matches!(LinearRHProblem::new(singular, vec![0.0; n]), Err(Error::SingularCoefficient(0))));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]
        #[test]
        fn solutions_satisfy_node_equations_and_are_holomorphic(
            two_n in prop::sample::select(vec![0i64, 2, 4, 6]),
            a in -0.5f64..0.5, b in -0.5f64..0.5,
            modes in prop::collection::vec(-1.0f64..1.0, 4),
        ) {
            let n = 256;
            let coeff = power_coeff(n, two_n, |t| a * t.cos() + b * (2.0 * t).sin());
            let rhs: Vec<f64> = (0..n).map(|k| {
                let t = node_angle(n, k);
                modes.iter().enumerate().map(|(m, c)| c * ((m as f64) * t + m as f64).cos()).sum()
            }).collect();
            let p = LinearRHProblem::new(coeff, rhs).unwrap();
            let sol = solve_linear(&p).unwrap();
            prop_assert!(sol.residual < 1e-10);
            prop_assert_eq!(sol.kernel_dimension() as i64, two_n + 1);
            prop_assert!(sol.analytic().discarded_fraction() < 1e-20);
        }

        #[test]
        fn solutions_are_linear_modulo_the_kernel(
            two_n in prop::sample::select(vec![-1i64, 0, 1, 2]),
            a in prop::collection::vec(-1.0f64..1.0, 3),
            b in prop::collection::vec(-1.0f64..1.0, 3),
        ) {
            let n = 128;
            let coeff = power_coeff(n, two_n, |t| 0.3 * t.cos());
            let make = |c: &[f64]| -> Vec<f64> {
                (0..n).map(|k| {
                    let t = node_angle(n, k);
                    (t / 2.0).sin() * (c[0] + c[1] * t.cos() + c[2] * (2.0 * t).sin())
                }).collect()
            };
            let (ra, rb) = (make(&a), make(&b));
            let sum: Vec<f64> = ra.iter().zip(&rb).map(|(x, y)| x + y).collect();
            let solve = |r: Vec<f64>| solve_linear(&LinearRHProblem::new(coeff.clone(), r).unwrap()).unwrap();
            let (sa, sb, ss) = (solve(ra), solve(rb), solve(sum));
            let mut diff: Vec<Complex64> = (0..n)
                .map(|j| ss.kappa.values()[j] - sa.kappa.values()[j] - sb.kappa.values()[j])
                .collect();
            for k in &ss.kernel {
                let c = real_inner(k.values(), &diff);
                diff.iter_mut().zip(k.values()).for_each(|(d, v)| *d -= c * v);
            }
            prop_assert!(diff.iter().all(|d| d.norm() < 1e-8));
        }
    }
}
