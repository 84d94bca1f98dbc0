//! Prescribed constraint histories: ground position `(x_g, y_g, z_g)` and bank
//! angle `phi`, either as closed-form maneuvers or as sampled series.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::atmosphere::TROPOPAUSE_ALTITUDE;
use crate::numerics::{Jet, NumericsError, SampledSignal, UniformGrid};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SpecError {
    #[error(transparent)]
    Numerics(#[from] NumericsError),
    #[error("constraint series do not share one time grid")]
    GridMismatch,
    #[error("altitude {altitude} m at station {station} is outside [0, {TROPOPAUSE_ALTITUDE}] m")]
    AltitudeOutOfRange { station: usize, altitude: f64 },
    #[error("duration must be positive, got {0}")]
    BadDuration(f64),
}

/// A maneuver given in closed form.
pub trait Maneuver: Send + Sync + fmt::Debug {
    fn name(&self) -> &str;

    fn duration(&self) -> f64;

    /// Ground position and its first three time derivatives, `[order][axis]`.
    fn position(&self, t: f64) -> [[f64; 3]; 4];

    /// Bank angle with its first two time derivatives.
    fn bank(&self, t: f64) -> Jet;
}

/// 360° roll at constant speed, height and heading over 6 s.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MirageRoll;

impl MirageRoll {
    pub const SPEED: f64 = 200.0;
    pub const Z_G: f64 = -10_000.0;
    pub const DURATION: f64 = 6.0;
}

impl Maneuver for MirageRoll {
    fn name(&self) -> &str {
        "mirage-roll"
    }

    fn duration(&self) -> f64 {
        Self::DURATION
    }

    fn position(&self, t: f64) -> [[f64; 3]; 4] {
        [[Self::SPEED * t, 0.0, Self::Z_G], [Self::SPEED, 0.0, 0.0], [0.0; 3], [0.0; 3]]
    }

    /// `(π/8)·[cos(πt/2) − 9 cos(πt/6) + 8]`
    fn bank(&self, t: f64) -> Jet {
        let (w1, w2) = (PI / 2.0, PI / 6.0);
        let k = PI / 8.0;
        let (s1, c1) = (w1 * t).sin_cos();
        let (s2, c2) = (w2 * t).sin_cos();
        Jet::new(
            k * (c1 - 9.0 * c2 + 8.0),
            k * (-w1 * s1 + 9.0 * w2 * s2),
            k * (-w1 * w1 * c1 + 9.0 * w2 * w2 * c2),
        )
    }
}

/// Straight, wings-level flight along `x_g`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LevelFlight {
    pub speed: f64,
    pub z_g: f64,
    pub duration: f64,
}

impl Default for LevelFlight {
    fn default() -> Self {
        LevelFlight { speed: MirageRoll::SPEED, z_g: MirageRoll::Z_G, duration: MirageRoll::DURATION }
    }
}

impl Maneuver for LevelFlight {
    fn name(&self) -> &str {
        "level"
    }

    fn duration(&self) -> f64 {
        self.duration
    }

    fn position(&self, t: f64) -> [[f64; 3]; 4] {
        [[self.speed * t, 0.0, self.z_g], [self.speed, 0.0, 0.0], [0.0; 3], [0.0; 3]]
    }

    fn bank(&self, _t: f64) -> Jet {
        Jet::constant(0.0)
    }
}

/// Steady climbing (or descending) straight line with constant bank.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StraightClimb {
    pub speed: f64,
    /// Flight-path elevation, rad.
    pub theta_w: f64,
    pub z_g0: f64,
    pub duration: f64,
}

impl Maneuver for StraightClimb {
    fn name(&self) -> &str {
        "climb"
    }

    fn duration(&self) -> f64 {
        self.duration
    }

    fn position(&self, t: f64) -> [[f64; 3]; 4] {
        let (s, c) = self.theta_w.sin_cos();
        let vel = [self.speed * c, 0.0, -self.speed * s];
        [[vel[0] * t, 0.0, self.z_g0 + vel[2] * t], vel, [0.0; 3], [0.0; 3]]
    }

    fn bank(&self, _t: f64) -> Jet {
        Jet::constant(0.0)
    }
}

/// Helix `x = R cos ωt`, `y = R sin ωt`, `z = z0 − c t` flown with constant bank.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Helix {
    pub radius: f64,
    pub omega: f64,
    pub climb_rate: f64,
    pub z_g0: f64,
    pub bank: f64,
    pub duration: f64,
}

impl Maneuver for Helix {
    fn name(&self) -> &str {
        "helix"
    }

    fn duration(&self) -> f64 {
        self.duration
    }

    fn position(&self, t: f64) -> [[f64; 3]; 4] {
        let (r, w, c) = (self.radius, self.omega, self.climb_rate);
        let (s, co) = (w * t).sin_cos();
        [
            [r * co, r * s, self.z_g0 - c * t],
            [-r * w * s, r * w * co, -c],
            [-r * w * w * co, -r * w * w * s, 0.0],
            [r * w * w * w * s, -r * w * w * w * co, 0.0],
        ]
    }

    fn bank(&self, _t: f64) -> Jet {
        Jet::constant(self.bank)
    }
}

/// Names accepted by [`builtin`].
pub const BUILTIN_NAMES: [&str; 2] = ["mirage-roll", "level"];

pub fn builtin(name: &str) -> Option<Arc<dyn Maneuver>> {
    match name {
        "mirage-roll" => Some(Arc::new(MirageRoll)),
        "level" => Some(Arc::new(LevelFlight::default())),
        _ => None,
    }
}

/// Constraint series sampled on one grid.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledConstraints {
    pub x_g: SampledSignal,
    pub y_g: SampledSignal,
    pub z_g: SampledSignal,
    pub phi: SampledSignal,
}

#[derive(Debug, Clone)]
pub enum Constraints {
    Analytic(Arc<dyn Maneuver>),
    Sampled(SampledConstraints),
}

/// Constraint histories together with the solution grid.
#[derive(Debug, Clone)]
pub struct TrajectorySpec {
    pub constraints: Constraints,
    pub grid: UniformGrid,
}

fn check_altitudes(z: impl Iterator<Item = f64>) -> Result<(), SpecError> {
    for (station, z_g) in z.enumerate() {
        let altitude = -z_g;
        if !(0.0..=TROPOPAUSE_ALTITUDE).contains(&altitude) {
            return Err(SpecError::AltitudeOutOfRange { station, altitude });
        }
    }
    Ok(())
}

impl TrajectorySpec {
    /// Closed-form maneuver over its own duration with step `dt`.
    pub fn analytic(maneuver: Arc<dyn Maneuver>, dt: f64) -> Result<Self, SpecError> {
        let duration = maneuver.duration();
        if !(duration > 0.0 && duration.is_finite()) {
            return Err(SpecError::BadDuration(duration));
        }
        let grid = UniformGrid::spanning(0.0, duration, dt)?;
        check_altitudes(grid.times().map(|t| maneuver.position(t)[0][2]))?;
        Ok(TrajectorySpec { constraints: Constraints::Analytic(maneuver), grid })
    }

    /// Sampled series; the solution grid is the sample grid.
    pub fn sampled(c: SampledConstraints) -> Result<Self, SpecError> {
        let grid = c.x_g.grid;
        if [&c.y_g, &c.z_g, &c.phi].iter().any(|s| s.grid != grid) {
            return Err(SpecError::GridMismatch);
        }
        for s in [&c.x_g, &c.y_g, &c.z_g, &c.phi] {
            SampledSignal::new(s.grid, s.values.clone())?;
        }
        check_altitudes(c.z_g.values.iter().copied())?;
        Ok(TrajectorySpec { constraints: Constraints::Sampled(c), grid })
    }

    pub fn duration(&self) -> f64 {
        self.grid.end() - self.grid.t0
    }

    /// Prescribed `(x_g, y_g, z_g, phi)` at station `n`.
    pub fn constraint_at(&self, n: usize) -> [f64; 4] {
        match &self.constraints {
            Constraints::Analytic(m) => {
                let t = self.grid.time(n);
                let [x, y, z] = m.position(t)[0];
                [x, y, z, m.bank(t).v]
            }
            Constraints::Sampled(c) => [c.x_g.values[n], c.y_g.values[n], c.z_g.values[n], c.phi.values[n]],
        }
    }
}
