//! Validated problem instances.

use std::f64::consts::{PI, TAU};

use num_complex::Complex64;

use crate::circlefn::check_grid_size;
use crate::error::{Error, Result};
use crate::fibers::RadialFiberFamily;

pub const DEFAULT_GRID: usize = 1024;
pub const DEFAULT_STEPS: usize = 16;
pub const MIN_STEPS: usize = 8;

/// Endpoints of the linear arc `L`. The arc runs counterclockwise from
/// `minus` to `plus`; the fibers live on the complementary arc.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ArcSpec {
    /// `L` is the lower semicircle, `plus = 1`, `minus = -1`.
    Standard,
    /// Endpoint angles in radians.
    Endpoints { plus: f64, minus: f64 },
}

impl ArcSpec {
    pub fn endpoint_angles(&self) -> (f64, f64) {
        match *self {
            ArcSpec::Standard => (0.0, PI),
            ArcSpec::Endpoints { plus, minus } => (plus, minus),
        }
    }

    pub fn endpoints(&self) -> (Complex64, Complex64) {
        let (plus, minus) = self.endpoint_angles();
        (Complex64::from_polar(1.0, plus), Complex64::from_polar(1.0, minus))
    }

    /// Angular length of the complementary (fiber) arc, from `plus` to `minus`.
    pub fn fiber_arc_length(&self) -> f64 {
        let (plus, minus) = self.endpoint_angles();
        (minus - plus).rem_euclid(TAU)
    }

    /// Position of `angle` along the fiber arc as a fraction in `[0, 1]`,
    /// measured from `plus`. Points on `L` snap to the nearer end.
    pub fn fiber_fraction(&self, angle: f64) -> f64 {
        let (plus, _) = self.endpoint_angles();
        let len = self.fiber_arc_length();
        let d = (angle - plus).rem_euclid(TAU);
        if d <= len {
            d / len
        } else if d - len < (TAU - d) {
            1.0
        } else {
            0.0
        }
    }

    /// Position of `angle` along `L` as a fraction of its length, measured
    /// from `minus`; `None` when the point is off `L` by more than `tol` radians.
    pub fn linear_fraction(&self, angle: f64, tol: f64) -> Option<f64> {
        let (_, minus) = self.endpoint_angles();
        let len = TAU - self.fiber_arc_length();
        let d = (angle - minus).rem_euclid(TAU);
        if d <= len + tol {
            Some((d / len).min(1.0))
        } else if TAU - d <= tol {
            Some(0.0)
        } else {
            None
        }
    }
}

/// One sample of the symbol `a` on `L`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SymbolSample {
    /// Angle in radians.
    pub theta: f64,
    pub value: Complex64,
}

#[derive(Debug, Clone, PartialEq)]
pub enum SymbolSpec {
    /// `a = i` on `L`, so the linear condition reads `Im f = 0`.
    Standard,
    Table(Vec<SymbolSample>),
}

/// Interior zeros requested for the solution.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ZeroPrescription {
    zeros: Vec<(Complex64, u32)>,
}

impl ZeroPrescription {
    pub fn new(zeros: Vec<(Complex64, u32)>) -> Result<Self> {
        for &(point, multiplicity) in &zeros {
            if !(point.norm() < 1.0 - 1e-12) || !point.re.is_finite() || !point.im.is_finite() {
                return Err(Error::ZeroOutsideDisk(format!("{point}")));
            }
            if multiplicity == 0 {
                return Err(Error::InvalidMultiplicity);
            }
        }
        Ok(Self { zeros })
    }

    pub fn empty() -> Self {
        Self::default()
    }

    pub fn zeros(&self) -> &[(Complex64, u32)] {
        &self.zeros
    }

    pub fn is_empty(&self) -> bool {
        self.zeros.is_empty()
    }

    pub fn total_multiplicity(&self) -> usize {
        self.zeros.iter().map(|&(_, m)| m as usize).sum()
    }

    pub fn map_points(&self, f: impl Fn(Complex64) -> Complex64) -> Result<Self> {
        Self::new(self.zeros.iter().map(|&(z, m)| (f(z), m)).collect())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Problem {
    pub grid: usize,
    pub arc: ArcSpec,
    pub symbol: SymbolSpec,
    pub fibers: RadialFiberFamily,
    pub zeros: ZeroPrescription,
    pub steps: usize,
}

impl Problem {
    /// Standard arc and symbol, no zeros, default grid and step count.
    pub fn standard(fibers: RadialFiberFamily) -> Self {
        Self {
            grid: DEFAULT_GRID,
            arc: ArcSpec::Standard,
            symbol: SymbolSpec::Standard,
            fibers,
            zeros: ZeroPrescription::empty(),
            steps: DEFAULT_STEPS,
        }
    }

    pub fn with_grid(mut self, grid: usize) -> Self {
        self.grid = grid;
        self
    }

    pub fn with_steps(mut self, steps: usize) -> Self {
        self.steps = steps;
        self
    }

    pub fn with_zeros(mut self, zeros: ZeroPrescription) -> Self {
        self.zeros = zeros;
        self
    }

    pub fn validate(&self) -> Result<()> {
        check_grid_size(self.grid)?;
        if self.steps < MIN_STEPS {
            return Err(Error::InvalidProblem(format!(
                "steps must be at least {MIN_STEPS}, got {}",
                self.steps
            )));
        }
        if let ArcSpec::Endpoints { plus, minus } = self.arc {
            if !plus.is_finite() || !minus.is_finite() {
                return Err(Error::InvalidProblem("arc endpoints must be finite".into()));
            }
            let gap = (plus - minus).rem_euclid(TAU);
            if gap < 1e-9 || TAU - gap < 1e-9 {
                return Err(Error::DegenerateArc);
            }
        }
        if let SymbolSpec::Table(samples) = &self.symbol {
            if samples.is_empty() {
                return Err(Error::InvalidProblem("symbol table is empty".into()));
            }
            for s in samples {
                if self.arc.linear_fraction(s.theta, 1e-9).is_none() {
                    return Err(Error::InvalidProblem(format!(
                        "symbol sample at {:.6} rad is not on the linear arc",
                        s.theta
                    )));
                }
                if s.value.norm() < 1e-12 {
                    return Err(Error::SingularSymbol(s.value.norm()));
                }
            }
        }
        ZeroPrescription::new(self.zeros.zeros.clone())?;
        Ok(())
    }
}
