//! Finite-difference stencils on uniform grids and the fixed-step RK4 stage
//! contract used by the sequential solver.

use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Error)]
pub enum NumericsError {
    #[error("grid has {count} stations, at least {required} are needed")]
    GridTooShort { count: usize, required: usize },
    #[error("time step must be positive and finite, got {0}")]
    BadStep(f64),
    #[error("sampled value at station {0} is not finite")]
    NonFiniteSample(usize),
}

/// Evenly spaced time stations `t0, t0 + dt, …`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UniformGrid {
    pub t0: f64,
    pub dt: f64,
    pub count: usize,
}

impl UniformGrid {
    pub fn new(t0: f64, dt: f64, count: usize) -> Result<Self, NumericsError> {
        if !(dt > 0.0 && dt.is_finite()) {
            return Err(NumericsError::BadStep(dt));
        }
        if count < 4 {
            return Err(NumericsError::GridTooShort { count, required: 4 });
        }
        Ok(UniformGrid { t0, dt, count })
    }

    /// Grid covering `[t0, t0 + duration]`; the station count is rounded to
    /// the nearest whole number of steps.
    pub fn spanning(t0: f64, duration: f64, dt: f64) -> Result<Self, NumericsError> {
        if !(dt > 0.0 && dt.is_finite()) {
            return Err(NumericsError::BadStep(dt));
        }
        let steps = (duration / dt).round() as usize;
        Self::new(t0, dt, steps + 1)
    }

    pub fn time(&self, n: usize) -> f64 {
        self.t0 + n as f64 * self.dt
    }

    pub fn end(&self) -> f64 {
        self.time(self.count - 1)
    }

    pub fn times(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.count).map(|n| self.time(n))
    }
}

/// Scalar values sampled on a [`UniformGrid`].
#[derive(Debug, Clone, PartialEq)]
pub struct SampledSignal {
    pub grid: UniformGrid,
    pub values: Vec<f64>,
}

impl SampledSignal {
    pub fn new(grid: UniformGrid, values: Vec<f64>) -> Result<Self, NumericsError> {
        if values.len() != grid.count {
            return Err(NumericsError::GridTooShort { count: values.len(), required: grid.count });
        }
        if let Some(n) = values.iter().position(|v| !v.is_finite()) {
            return Err(NumericsError::NonFiniteSample(n));
        }
        Ok(SampledSignal { grid, values })
    }

    pub fn from_fn(grid: UniformGrid, f: impl Fn(f64) -> f64) -> Self {
        let values = grid.times().map(f).collect();
        SampledSignal { grid, values }
    }
}

fn require(signal: &SampledSignal, required: usize) -> Result<usize, NumericsError> {
    let count = signal.values.len();
    if count < required {
        Err(NumericsError::GridTooShort { count, required })
    } else {
        Ok(count)
    }
}

/// Second-order first derivative: one-sided three-point formulas at the two
/// ends, central differences inside.
pub fn fd_first_derivative(signal: &SampledSignal) -> Result<SampledSignal, NumericsError> {
    let n = require(signal, 4)?;
    let v = &signal.values;
    let h2 = 2.0 * signal.grid.dt;
    let mut out = Vec::with_capacity(n);
    out.push((-3.0 * v[0] + 4.0 * v[1] - v[2]) / h2);
    out.extend(v.windows(3).map(|w| (w[2] - w[0]) / h2));
    out.push((3.0 * v[n - 1] - 4.0 * v[n - 2] + v[n - 3]) / h2);
    Ok(SampledSignal { grid: signal.grid, values: out })
}

/// Second-order second derivative: one-sided four-point formulas at the two
/// ends, central differences inside.
pub fn fd_second_derivative(signal: &SampledSignal) -> Result<SampledSignal, NumericsError> {
    let n = require(signal, 4)?;
    let v = &signal.values;
    let hh = signal.grid.dt * signal.grid.dt;
    let mut out = Vec::with_capacity(n);
    out.push((2.0 * v[0] - 5.0 * v[1] + 4.0 * v[2] - v[3]) / hh);
    out.extend(v.windows(3).map(|w| (w[2] - 2.0 * w[1] + w[0]) / hh));
    out.push((2.0 * v[n - 1] - 5.0 * v[n - 2] + 4.0 * v[n - 3] - v[n - 4]) / hh);
    Ok(SampledSignal { grid: signal.grid, values: out })
}

/// Third derivative as the first derivative of the second derivative. Second
/// order from the third station to the third-last; first order next to the ends.
pub fn fd_third_derivative(signal: &SampledSignal) -> Result<SampledSignal, NumericsError> {
    require(signal, 5)?;
    fd_first_derivative(&fd_second_derivative(signal)?)
}

/// Result of one RK4 step: the new state and the four stage rates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rk4Step<const N: usize> {
    pub y: [f64; N],
    pub k: [[f64; N]; 4],
}

impl<const N: usize> Rk4Step<N> {
    /// `(k1 + 2k2 + 2k3 + k4) / 6` for every component.
    pub fn weighted_rate(&self) -> [f64; N] {
        weighted_average(&self.k)
    }
}

pub fn weighted_average<const N: usize>(k: &[[f64; N]; 4]) -> [f64; N] {
    std::array::from_fn(|i| (k[0][i] + 2.0 * k[1][i] + 2.0 * k[2][i] + k[3][i]) / 6.0)
}

/// Stage position within an RK4 step.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stage {
    Start,
    FirstMid,
    SecondMid,
    End,
}

impl Stage {
    pub const ALL: [Stage; 4] = [Stage::Start, Stage::FirstMid, Stage::SecondMid, Stage::End];

    /// Fraction of the step at which the stage is evaluated.
    pub fn offset(self) -> f64 {
        match self {
            Stage::Start => 0.0,
            Stage::FirstMid | Stage::SecondMid => 0.5,
            Stage::End => 1.0,
        }
    }
}

/// Classic fixed-step RK4. `rate` is called once per stage, in order, with
/// the stage tag and the stage state; it may carry information from one
/// stage to the next through its captured environment.
pub fn rk4_step<const N: usize, E>(
    y: &[f64; N],
    dt: f64,
    mut rate: impl FnMut(Stage, &[f64; N]) -> Result<[f64; N], E>,
) -> Result<Rk4Step<N>, E> {
    let shifted = |k: &[f64; N], h: f64| -> [f64; N] { std::array::from_fn(|i| y[i] + h * k[i]) };

    let k1 = rate(Stage::Start, y)?;
    let k2 = rate(Stage::FirstMid, &shifted(&k1, 0.5 * dt))?;
    let k3 = rate(Stage::SecondMid, &shifted(&k2, 0.5 * dt))?;
    let k4 = rate(Stage::End, &shifted(&k3, dt))?;
    let k = [k1, k2, k3, k4];
    let avg = weighted_average(&k);
    Ok(Rk4Step { y: std::array::from_fn(|i| y[i] + dt * avg[i]), k })
}

/// A scalar carried with its first and second time derivatives.
///
/// Used to write the differentiated equations of motion as explicit
/// product and chain rules over their trigonometric factors.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Jet {
    pub v: f64,
    pub d: f64,
    pub dd: f64,
}

impl Jet {
    pub const fn new(v: f64, d: f64, dd: f64) -> Self {
        Jet { v, d, dd }
    }

    pub const fn constant(v: f64) -> Self {
        Jet { v, d: 0.0, dd: 0.0 }
    }

    /// `sin x(t)` given `x, ẋ, ẍ`.
    pub fn sin(self) -> Self {
        let (s, c) = self.v.sin_cos();
        Jet { v: s, d: c * self.d, dd: c * self.dd - s * self.d * self.d }
    }

    /// `cos x(t)` given `x, ẋ, ẍ`.
    pub fn cos(self) -> Self {
        let (s, c) = self.v.sin_cos();
        Jet { v: c, d: -s * self.d, dd: -s * self.dd - c * self.d * self.d }
    }

    pub fn scale(self, k: f64) -> Self {
        Jet { v: k * self.v, d: k * self.d, dd: k * self.dd }
    }
}

impl std::ops::Add for Jet {
    type Output = Jet;
    fn add(self, o: Jet) -> Jet {
        Jet { v: self.v + o.v, d: self.d + o.d, dd: self.dd + o.dd }
    }
}

impl std::ops::Sub for Jet {
    type Output = Jet;
    fn sub(self, o: Jet) -> Jet {
        Jet { v: self.v - o.v, d: self.d - o.d, dd: self.dd - o.dd }
    }
}

impl std::ops::Neg for Jet {
    type Output = Jet;
    fn neg(self) -> Jet {
        self.scale(-1.0)
    }
}

impl std::ops::Mul for Jet {
    type Output = Jet;
    fn mul(self, o: Jet) -> Jet {
        Jet {
            v: self.v * o.v,
            d: self.d * o.v + self.v * o.d,
            dd: self.dd * o.v + 2.0 * self.d * o.d + self.v * o.dd,
        }
    }
}
