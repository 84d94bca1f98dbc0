//! Direct simulation: integrates the body-axes equations of motion under given
//! control histories. Used to check inverse solutions.

use thiserror::Error;

use crate::aero::{self, EquilibriumReference};
use crate::atmosphere::{self, AltitudeOutOfRange};
use crate::dynamics::{self, ControlVector, DynamicsError};
use crate::kinematics::{self, BodyRates, KinematicsError};
use crate::model::{AircraftConfig, FlightEnvironment, FlightState};
use crate::numerics::{self, UniformGrid};
use crate::solver::{SolutionHistory, StationFlags, StationRecord};
use crate::trajectory::TrajectorySpec;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ForwardError {
    #[error("pitch reached the Euler-angle singularity at station {station}")]
    GimbalSingularity { station: usize },
    #[error("state became non-finite at station {station}")]
    NonFiniteState { station: usize },
    #[error("station {station}: {source}")]
    Kinematics { station: usize, source: KinematicsError },
    #[error("station {station}: {source}")]
    Dynamics { station: usize, source: DynamicsError },
    #[error("station {station}: {source}")]
    Atmosphere { station: usize, source: AltitudeOutOfRange },
    #[error("{controls} control samples for a grid of {stations} stations")]
    LengthMismatch { controls: usize, stations: usize },
    #[error("control sample {0} is not finite")]
    NonFiniteControl(usize),
}

/// Thrust and deflections per station.
#[derive(Debug, Clone, PartialEq)]
pub struct ControlHistory {
    pub grid: UniformGrid,
    pub controls: Vec<ControlVector>,
}

impl ControlHistory {
    pub fn new(grid: UniformGrid, controls: Vec<ControlVector>) -> Result<Self, ForwardError> {
        if controls.len() != grid.count {
            return Err(ForwardError::LengthMismatch { controls: controls.len(), stations: grid.count });
        }
        if let Some(n) = controls
            .iter()
            .position(|c| ![c.delta_l, c.delta_m, c.delta_n, c.thrust].iter().all(|v| v.is_finite()))
        {
            return Err(ForwardError::NonFiniteControl(n));
        }
        Ok(ControlHistory { grid, controls })
    }

    pub fn from_solution(h: &SolutionHistory) -> Self {
        ControlHistory { grid: h.grid, controls: h.records.iter().map(StationRecord::controls).collect() }
    }

    /// Linear interpolation between stations, held constant outside the grid.
    pub fn at(&self, t: f64) -> ControlVector {
        let x = ((t - self.grid.t0) / self.grid.dt).clamp(0.0, (self.grid.count - 1) as f64);
        let i = (x.floor() as usize).min(self.grid.count - 2);
        let s = x - i as f64;
        let (a, b) = (self.controls[i], self.controls[i + 1]);
        let l = |x: f64, y: f64| x + s * (y - x);
        ControlVector {
            delta_l: l(a.delta_l, b.delta_l),
            delta_m: l(a.delta_m, b.delta_m),
            delta_n: l(a.delta_n, b.delta_n),
            thrust: l(a.thrust, b.thrust),
        }
    }
}

// Layout of the integrated vector.
const U: usize = 0;
const V: usize = 1;
const W: usize = 2;
const P: usize = 3;
const Q: usize = 4;
const R: usize = 5;
const PHI: usize = 6;
const THETA: usize = 7;
const PSI: usize = 8;
const X: usize = 9;

type State = [f64; 12];

/// Everything derived from one state and control sample.
struct Derived {
    rates: State,
    speed: f64,
    alpha: f64,
    beta: f64,
    theta_w: f64,
    psi_w: f64,
    accels: BodyRates,
}

struct Simulator<'a> {
    cfg: &'a AircraftConfig,
    env: &'a FlightEnvironment,
}

impl Simulator<'_> {
    fn derive(&self, s: &State, c: &ControlVector, station: usize) -> Result<Derived, ForwardError> {
        let kin = |source| ForwardError::Kinematics { station, source };
        let (speed, alpha, beta) = kinematics::incidence_from_body_velocity(s[U], s[V], s[W]).map_err(kin)?;
        let rho = atmosphere::density(s[X + 2], self.env).map_err(|source| ForwardError::Atmosphere { station, source })?;
        let qbar = aero::dynamic_pressure(rho, speed);
        let a = &self.cfg.aero;
        let fc = aero::force_coefficients(alpha, beta, a);
        let mc = aero::moment_coefficients(
            alpha,
            beta,
            s[P],
            s[Q],
            s[R],
            speed,
            self.cfg.lateral_ref_length,
            c.delta_l,
            c.delta_m,
            c.delta_n,
            a,
        );
        let loads = aero::dimensionalize(qbar, self.cfg.wing_area, self.cfg.longitudinal_ref_length, &fc, &mc);

        let m = self.cfg.mass;
        let mg = m * self.env.g;
        let (sp, cp) = s[PHI].sin_cos();
        let (st, ct) = s[THETA].sin_cos();
        let fx = loads.x + c.thrust - mg * st;
        let fy = loads.y + mg * ct * sp;
        let fz = loads.z + mg * ct * cp;
        let (u, v, w, p, q, r) = (s[U], s[V], s[W], s[P], s[Q], s[R]);

        let w_body = BodyRates { p, q, r };
        let accels = dynamics::angular_accels_forward(&w_body, &loads, &self.cfg.inertia)
            .map_err(|source| ForwardError::Dynamics { station, source })?;
        let euler = kinematics::euler_rates_from_body(s[PHI], s[THETA], w_body).map_err(|e| match e {
            KinematicsError::GimbalSingularity { .. } => ForwardError::GimbalSingularity { station },
            other => kin(other),
        })?;
        let path = kinematics::path_angles_from_attitude(alpha, beta, s[PHI], s[THETA], s[PSI]).map_err(kin)?;
        let ground = kinematics::ground_velocity_from_path(speed, path.theta_w, path.psi_w);

        Ok(Derived {
            rates: [
                r * v - q * w + fx / m,
                p * w - r * u + fy / m,
                q * u - p * v + fz / m,
                accels.p,
                accels.q,
                accels.r,
                euler.phi_dot,
                euler.theta_dot,
                euler.psi_dot,
                ground[0],
                ground[1],
                ground[2],
            ],
            speed,
            alpha,
            beta,
            theta_w: path.theta_w,
            psi_w: path.psi_w,
            accels,
        })
    }

    fn record(&self, t: f64, s: &State, c: &ControlVector, station: usize) -> Result<StationRecord, ForwardError> {
        let d = self.derive(s, c, station)?;
        let [ud, vd, wd] = [d.rates[U], d.rates[V], d.rates[W]];
        let (u, v, w) = (s[U], s[V], s[W]);
        let speed_dot = (u * ud + v * vd + w * wd) / d.speed;
        let state = FlightState {
            t,
            v: d.speed,
            alpha: d.alpha,
            beta: d.beta,
            p: s[P],
            q: s[Q],
            r: s[R],
            phi: s[PHI],
            theta: s[THETA],
            psi: s[PSI],
            theta_w: d.theta_w,
            psi_w: d.psi_w,
            delta_l: c.delta_l,
            delta_m: c.delta_m,
            delta_n: c.delta_n,
            thrust: c.thrust,
            x_g_dot: d.rates[X],
            y_g_dot: d.rates[X + 1],
            z_g_dot: d.rates[X + 2],
            alpha_dot: (u * wd - w * ud) / (u * u + w * w),
            beta_dot: (vd - v * speed_dot / d.speed) / (d.speed * d.beta.cos()),
            theta_dot: d.rates[THETA],
            psi_dot: d.rates[PSI],
            thrust_dot: 0.0,
        };
        Ok(StationRecord {
            state,
            position: [s[X], s[X + 1], s[X + 2]],
            rate_derivatives: d.accels,
            flags: StationFlags { stall_warning: false, reverse_thrust: c.thrust < 0.0 },
            ..Default::default()
        })
    }
}

/// Integrates from `initial` at ground position `position` over the control
/// grid. `cfg` is used as given; pass the equilibrium-shifted data to replay
/// an inverse solution. The returned history reports angle of attack without
/// offset.
pub fn simulate(
    initial: &FlightState,
    position: [f64; 3],
    controls: &ControlHistory,
    cfg: &AircraftConfig,
    env: &FlightEnvironment,
) -> Result<SolutionHistory, ForwardError> {
    let sim = Simulator { cfg, env };
    let grid = controls.grid;
    let [u, v, w] = kinematics::velocity_triplet(initial.v, initial.alpha, initial.beta);
    let mut y: State = [
        u,
        v,
        w,
        initial.p,
        initial.q,
        initial.r,
        initial.phi,
        initial.theta,
        initial.psi,
        position[0],
        position[1],
        position[2],
    ];
    let mut records = Vec::with_capacity(grid.count);
    records.push(sim.record(grid.t0, &y, &controls.controls[0], 0)?);
    for n in 0..grid.count - 1 {
        let t = grid.time(n);
        let step = numerics::rk4_step(&y, grid.dt, |stage, ys| {
            let c = controls.at(t + stage.offset() * grid.dt);
            sim.derive(ys, &c, n).map(|d| d.rates)
        })?;
        if step.y.iter().any(|v| !v.is_finite()) {
            return Err(ForwardError::NonFiniteState { station: n + 1 });
        }
        y = step.y;
        records.push(sim.record(grid.time(n + 1), &y, &controls.controls[n + 1], n + 1)?);
    }
    let neutral = EquilibriumReference { c_l0_equib: cfg.aero.c_l0, alpha_equib: 0.0, alpha_zero_lift: 0.0 };
    Ok(SolutionHistory { grid, records, equilibrium: neutral, config: *cfg, env: *env })
}

/// Largest departure of a simulated history from the prescribed constraints.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct TrackingDeviation {
    /// `|Δx_g|, |Δy_g|, |Δz_g|`, m.
    pub position: [f64; 3],
    /// `|Δφ|`, rad.
    pub phi: f64,
}

impl TrackingDeviation {
    pub fn within(&self, position_tol: f64, phi_tol: f64) -> bool {
        self.position.iter().all(|d| *d <= position_tol) && self.phi <= phi_tol
    }
}

/// Compares `history` station by station with the constraints of `spec`.
/// Both must share one grid.
pub fn tracking_deviation(spec: &TrajectorySpec, history: &SolutionHistory) -> Result<TrackingDeviation, ForwardError> {
    if history.records.len() != spec.grid.count {
        return Err(ForwardError::LengthMismatch { controls: history.records.len(), stations: spec.grid.count });
    }
    let mut dev = TrackingDeviation::default();
    for (n, r) in history.records.iter().enumerate() {
        let [x, y, z, phi] = spec.constraint_at(n);
        for (d, (a, b)) in dev.position.iter_mut().zip(r.position.iter().zip([x, y, z])) {
            *d = d.max((a - b).abs());
        }
        dev.phi = dev.phi.max((r.state.phi - phi).abs());
    }
    Ok(dev)
}
