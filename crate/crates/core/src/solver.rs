//! Sequential inverse solver: trajectory preprocessing, equilibrium start and
//! the explicit RK4 march that recovers controls station by station.

use std::sync::Arc;

use log::warn;
use thiserror::Error;

use crate::aero::{self, EquilibriumReference, STALL_ALPHA};
use crate::atmosphere::{self, AltitudeOutOfRange};
use crate::dynamics::{self, ControlContext, ControlVector, DynamicsError, ForceRateInputs, WindAxesState};
use crate::kinematics::{
    self, AttitudeMotion, BodyRates, EulerRates, KinematicsError, PathAngles,
};
use crate::model::{validate_config, AircraftConfig, FlightEnvironment, FlightState, InvalidConfig};
use crate::numerics::{self, Jet, NumericsError, SampledSignal, Stage, UniformGrid};
use crate::trajectory::{Constraints, Maneuver, SpecError, TrajectorySpec};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Phase {
    Setup,
    Initialization,
    Loop,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SolveErrorKind {
    #[error(transparent)]
    Kinematics(#[from] KinematicsError),
    #[error(transparent)]
    Dynamics(#[from] DynamicsError),
    #[error(transparent)]
    Atmosphere(#[from] AltitudeOutOfRange),
    #[error(transparent)]
    Numerics(#[from] NumericsError),
    #[error(transparent)]
    Spec(#[from] SpecError),
    #[error(transparent)]
    Config(#[from] InvalidConfig),
    #[error("integrated state became non-finite")]
    NonFiniteState,
    #[error("a convergence study needs at least two distinct step sizes")]
    TooFewStepSizes,
}

#[derive(Debug, Clone, PartialEq, Error)]
#[error("{phase:?} failed at station {station}: {kind}")]
pub struct SolveError {
    pub phase: Phase,
    pub station: usize,
    #[source]
    pub kind: SolveErrorKind,
}

impl SolveError {
    fn new(phase: Phase, station: usize, kind: impl Into<SolveErrorKind>) -> Self {
        SolveError { phase, station, kind: kind.into() }
    }
}

/// Prescribed motion at one instant, with everything the rate equations read
/// from the trajectory.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ProfilePoint {
    pub t: f64,
    /// Ground position and its first three derivatives, `[order][axis]`.
    pub ground: [[f64; 3]; 4],
    pub v: f64,
    pub v_dot: f64,
    pub v_ddot: f64,
    pub theta_w: Jet,
    pub psi_w: Jet,
    pub phi: Jet,
    pub rho: f64,
    pub rho_dot: f64,
}

impl ProfilePoint {
    fn lerp(a: &ProfilePoint, b: &ProfilePoint, s: f64) -> ProfilePoint {
        let l = |x: f64, y: f64| x + s * (y - x);
        let lj = |x: Jet, y: Jet| Jet::new(l(x.v, y.v), l(x.d, y.d), l(x.dd, y.dd));
        ProfilePoint {
            t: l(a.t, b.t),
            ground: std::array::from_fn(|o| std::array::from_fn(|i| l(a.ground[o][i], b.ground[o][i]))),
            v: l(a.v, b.v),
            v_dot: l(a.v_dot, b.v_dot),
            v_ddot: l(a.v_ddot, b.v_ddot),
            theta_w: lj(a.theta_w, b.theta_w),
            psi_w: lj(a.psi_w, b.psi_w),
            phi: lj(a.phi, b.phi),
            rho: l(a.rho, b.rho),
            rho_dot: l(a.rho_dot, b.rho_dot),
        }
    }
}

/// Per-station kinematic profiles plus the half-step points used by the
/// middle RK4 stages.
#[derive(Debug, Clone, PartialEq)]
pub struct KinematicProfiles {
    pub grid: UniformGrid,
    pub stations: Vec<ProfilePoint>,
    pub midpoints: Vec<ProfilePoint>,
}

impl KinematicProfiles {
    pub fn at(&self, n: usize, stage: Stage) -> &ProfilePoint {
        match stage {
            Stage::Start => &self.stations[n],
            Stage::FirstMid | Stage::SecondMid => &self.midpoints[n],
            Stage::End => &self.stations[n + 1],
        }
    }
}

/// Builds profile points on `grid` from ground-position derivatives and bank.
/// Speed derivatives are taken by finite differences of the speed samples.
fn profile_points(
    grid: UniformGrid,
    ground: &[[[f64; 3]; 4]],
    bank: &[Jet],
    env: &FlightEnvironment,
) -> Result<Vec<ProfilePoint>, SolveError> {
    let err = |n: usize| move |e: KinematicsError| SolveError::new(Phase::Setup, n, e);
    let paths = ground
        .iter()
        .enumerate()
        .map(|(n, g)| kinematics::path_from_ground_velocity(g[1][0], g[1][1], g[1][2]).map_err(err(n)))
        .collect::<Result<Vec<_>, _>>()?;
    let speed = SampledSignal::new(grid, paths.iter().map(|p| p.v).collect())
        .map_err(|e| SolveError::new(Phase::Setup, 0, e))?;
    let v_dot = numerics::fd_first_derivative(&speed).map_err(|e| SolveError::new(Phase::Setup, 0, e))?;
    let v_ddot = numerics::fd_second_derivative(&speed).map_err(|e| SolveError::new(Phase::Setup, 0, e))?;

    let mut out = Vec::with_capacity(grid.count);
    for n in 0..grid.count {
        let [_, vel, acc, jerk] = ground[n];
        let path = paths[n];
        let (v, vd, vdd) = (path.v, v_dot.values[n], v_ddot.values[n]);
        let (st, ct) = path.theta_w.sin_cos();
        let theta_w_dot = -(acc[2] + vd * st) / (v * ct);
        let theta_w_ddot =
            -(jerk[2] + vdd * st + 2.0 * vd * ct * theta_w_dot - v * st * theta_w_dot * theta_w_dot) / (v * ct);

        let h2 = vel[0] * vel[0] + vel[1] * vel[1];
        let cross = vel[0] * acc[1] - vel[1] * acc[0];
        let cross_dot = vel[0] * jerk[1] - vel[1] * jerk[0];
        let h2_dot = 2.0 * (vel[0] * acc[0] + vel[1] * acc[1]);
        let psi_w_dot = cross / h2;
        let psi_w_ddot = (cross_dot * h2 - cross * h2_dot) / (h2 * h2);

        let z = ground[n][0][2];
        let rho = atmosphere::density(z, env).map_err(|e| SolveError::new(Phase::Setup, n, e))?;
        let rho_dot = atmosphere::density_gradient(z, env).map_err(|e| SolveError::new(Phase::Setup, n, e))? * vel[2];

        out.push(ProfilePoint {
            t: grid.time(n),
            ground: ground[n],
            v,
            v_dot: vd,
            v_ddot: vdd,
            theta_w: Jet::new(path.theta_w, theta_w_dot, theta_w_ddot),
            psi_w: Jet::new(path.psi_w, psi_w_dot, psi_w_ddot),
            phi: bank[n],
            rho,
            rho_dot,
        });
    }
    Ok(out)
}

/// Trajectory preprocessing. Closed-form maneuvers are differentiated
/// analytically and evaluated on a half-step grid so the middle RK4 stages see
/// exact constraint values; sampled series go through the finite-difference
/// stencils and the middle stages interpolate linearly.
pub fn setup(spec: &TrajectorySpec, env: &FlightEnvironment) -> Result<KinematicProfiles, SolveError> {
    let grid = spec.grid;
    match &spec.constraints {
        Constraints::Analytic(m) => {
            let fine = UniformGrid::new(grid.t0, 0.5 * grid.dt, 2 * grid.count - 1)
                .map_err(|e| SolveError::new(Phase::Setup, 0, e))?;
            let ground: Vec<_> = fine.times().map(|t| m.position(t)).collect();
            let bank: Vec<_> = fine.times().map(|t| m.bank(t)).collect();
            let points = profile_points(fine, &ground, &bank, env).map_err(|mut e| {
                e.station /= 2;
                e
            })?;
            let stations = points.iter().step_by(2).copied().collect();
            let midpoints = points.iter().skip(1).step_by(2).copied().collect();
            Ok(KinematicProfiles { grid, stations, midpoints })
        }
        Constraints::Sampled(c) => {
            let fd = |s: &SampledSignal| -> Result<[Vec<f64>; 4], SolveError> {
                let e = |e| SolveError::new(Phase::Setup, 0, e);
                Ok([
                    s.values.clone(),
                    numerics::fd_first_derivative(s).map_err(e)?.values,
                    numerics::fd_second_derivative(s).map_err(e)?.values,
                    numerics::fd_third_derivative(s).map_err(e)?.values,
                ])
            };
            let axes = [fd(&c.x_g)?, fd(&c.y_g)?, fd(&c.z_g)?];
            let ground: Vec<_> = (0..grid.count)
                .map(|n| std::array::from_fn(|o| std::array::from_fn(|i| axes[i][o][n])))
                .collect();
            let phi = fd(&c.phi)?;
            let bank: Vec<_> = (0..grid.count).map(|n| Jet::new(phi[0][n], phi[1][n], phi[2][n])).collect();
            let stations = profile_points(grid, &ground, &bank, env)?;
            let midpoints = stations.windows(2).map(|w| ProfilePoint::lerp(&w[0], &w[1], 0.5)).collect();
            Ok(KinematicProfiles { grid, stations, midpoints })
        }
    }
}

/// How `(ṗ, q̇, ṙ)` at the new station is formed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum AccelUpdate {
    /// RK4-weighted average of the four stage values.
    #[default]
    WeightedAverage,
    /// Re-evaluated from the Euler-angle relations at the new station.
    Reevaluated,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SolverOptions {
    pub accel_update: AccelUpdate,
    /// Evaluations of the acceleration chain per RK4 stage. The first pass
    /// feeds the force balances with the `(ṗ, q̇, ṙ)` of the previous stage
    /// (the station value for the first stage); each further pass feeds back
    /// its own output. With one pass the error is first order in the step and
    /// shrinks roughly in proportion to the number of passes.
    pub stage_passes: usize,
}

impl SolverOptions {
    pub const DEFAULT_STAGE_PASSES: usize = 6;
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions { accel_update: AccelUpdate::default(), stage_passes: Self::DEFAULT_STAGE_PASSES }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct StationFlags {
    /// Actual angle of attack beyond the linear lift range.
    pub stall_warning: bool,
    pub reverse_thrust: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct StationRecord {
    pub state: FlightState,
    pub position: [f64; 3],
    /// `(ṗ, q̇, ṙ)`
    pub rate_derivatives: BodyRates,
    pub alpha_ddot: f64,
    pub beta_ddot: f64,
    pub theta_ddot: f64,
    pub psi_ddot: f64,
    pub flags: StationFlags,
    /// Largest difference between the averaged and re-evaluated `(ṗ, q̇, ṙ)`.
    pub accel_gap: f64,
}

impl StationRecord {
    pub fn controls(&self) -> ControlVector {
        ControlVector {
            delta_l: self.state.delta_l,
            delta_m: self.state.delta_m,
            delta_n: self.state.delta_n,
            thrust: self.state.thrust,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolutionHistory {
    pub grid: UniformGrid,
    pub records: Vec<StationRecord>,
    pub equilibrium: EquilibriumReference,
    /// Aircraft data as used, with the lift reference at equilibrium.
    pub config: AircraftConfig,
    pub env: FlightEnvironment,
}

impl SolutionHistory {
    pub fn alpha_actual(&self, n: usize) -> f64 {
        self.equilibrium.actual_alpha(self.records[n].state.alpha)
    }

    /// Linear interpolation of `f` over the records at time `t`.
    pub fn sample(&self, t: f64, f: impl Fn(&StationRecord) -> f64) -> f64 {
        let x = ((t - self.grid.t0) / self.grid.dt).clamp(0.0, (self.grid.count - 1) as f64);
        let nearest = x.round();
        if (x - nearest).abs() < 1e-6 {
            return f(&self.records[nearest as usize]);
        }
        let i = (x.floor() as usize).min(self.grid.count - 2);
        let s = x - i as f64;
        let (a, b) = (f(&self.records[i]), f(&self.records[i + 1]));
        a + s * (b - a)
    }

    pub fn max_by(&self, f: impl Fn(&StationRecord) -> f64) -> f64 {
        self.records.iter().map(f).fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn min_by(&self, f: impl Fn(&StationRecord) -> f64) -> f64 {
        self.records.iter().map(f).fold(f64::INFINITY, f64::min)
    }
}

// Layout of the integrated vector.
const ALPHA: usize = 0;
const BETA: usize = 1;
const THETA: usize = 2;
const PSI: usize = 3;
const THRUST: usize = 4;
const ALPHA_DOT: usize = 5;
const BETA_DOT: usize = 6;
const THETA_DOT: usize = 7;
const PSI_DOT: usize = 8;
const P: usize = 9;
const Q: usize = 10;
const R: usize = 11;

type State = [f64; 12];

/// Algebraic quantities produced while evaluating one set of rates.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
struct Evaluation {
    thrust_dot: f64,
    alpha_ddot: f64,
    beta_ddot: f64,
    theta_ddot: f64,
    psi_ddot: f64,
    rate_derivatives: BodyRates,
}

struct Solver<'a> {
    profiles: &'a KinematicProfiles,
    cfg: AircraftConfig,
    env: FlightEnvironment,
}

fn rates_array(w: &BodyRates) -> [f64; 3] {
    [w.p, w.q, w.r]
}

impl Solver<'_> {
    fn wind_state(&self, pp: &ProfilePoint, y: &State) -> WindAxesState {
        WindAxesState {
            v: pp.v,
            v_dot: pp.v_dot,
            v_ddot: pp.v_ddot,
            rho: pp.rho,
            rho_dot: pp.rho_dot,
            alpha: y[ALPHA],
            beta: y[BETA],
            theta: y[THETA],
            phi: pp.phi.v,
            alpha_dot: y[ALPHA_DOT],
            beta_dot: y[BETA_DOT],
            theta_dot: y[THETA_DOT],
            phi_dot: pp.phi.d,
            p: y[P],
            q: y[Q],
            r: y[R],
            thrust: y[THRUST],
        }
    }

    /// Differentiated force balances, second-derivative path relations and
    /// Euler-rate relations, given the angular accelerations fed to the force
    /// balances.
    fn evaluate(&self, pp: &ProfilePoint, y: &State, accels_in: &BodyRates) -> Result<Evaluation, SolveErrorKind> {
        let ws = self.wind_state(pp, y);
        let thrust_dot = dynamics::thrust_rate(&ws, &self.cfg, &self.env)?;
        let extra = ForceRateInputs { thrust_dot, p_dot: accels_in.p, q_dot: accels_in.q, r_dot: accels_in.r };
        let beta_ddot = dynamics::sideslip_accel(&ws, &extra, &self.cfg, &self.env)?;
        let alpha_ddot = dynamics::aoa_accel(&ws, &extra, &self.cfg, &self.env)?;
        let motion = AttitudeMotion {
            alpha: Jet::new(y[ALPHA], y[ALPHA_DOT], alpha_ddot),
            beta: Jet::new(y[BETA], y[BETA_DOT], beta_ddot),
            phi: pp.phi,
            theta_w: pp.theta_w,
            psi_w: pp.psi_w,
        };
        let (theta_ddot, psi_ddot) =
            kinematics::attitude_accels(&motion, y[THETA], y[THETA_DOT], y[PSI], y[PSI_DOT])?;
        let rate_derivatives = kinematics::body_rate_derivatives(
            pp.phi.v,
            y[THETA],
            EulerRates { phi_dot: pp.phi.d, theta_dot: y[THETA_DOT], psi_dot: y[PSI_DOT] },
            EulerRates { phi_dot: pp.phi.dd, theta_dot: theta_ddot, psi_dot: psi_ddot },
        );
        Ok(Evaluation { thrust_dot, alpha_ddot, beta_ddot, theta_ddot, psi_ddot, rate_derivatives })
    }
    fn rates(y: &State, ev: &Evaluation) -> State {
        let w = ev.rate_derivatives;
        [
            y[ALPHA_DOT],
            y[BETA_DOT],
            y[THETA_DOT],
            y[PSI_DOT],
            ev.thrust_dot,
            ev.alpha_ddot,
            ev.beta_ddot,
            ev.theta_ddot,
            ev.psi_ddot,
            w.p,
            w.q,
            w.r,
        ]
    }

    fn record(
        &self,
        pp: &ProfilePoint,
        y: &State,
        ev: &Evaluation,
        accels: BodyRates,
        eq: &EquilibriumReference,
    ) -> Result<StationRecord, SolveErrorKind> {
        let rates = BodyRates { p: y[P], q: y[Q], r: y[R] };
        let ctx = ControlContext {
            alpha: y[ALPHA],
            beta: y[BETA],
            v: pp.v,
            qbar: aero::dynamic_pressure(pp.rho, pp.v),
            rates,
        };
        let c = dynamics::controls_from_angular_accels(&accels, &ctx, &self.cfg)?;
        let state = FlightState {
            t: pp.t,
            v: pp.v,
            alpha: y[ALPHA],
            beta: y[BETA],
            p: y[P],
            q: y[Q],
            r: y[R],
            phi: pp.phi.v,
            theta: y[THETA],
            psi: y[PSI],
            theta_w: pp.theta_w.v,
            psi_w: pp.psi_w.v,
            delta_l: c.delta_l,
            delta_m: c.delta_m,
            delta_n: c.delta_n,
            thrust: y[THRUST],
            x_g_dot: pp.ground[1][0],
            y_g_dot: pp.ground[1][1],
            z_g_dot: pp.ground[1][2],
            alpha_dot: y[ALPHA_DOT],
            beta_dot: y[BETA_DOT],
            theta_dot: y[THETA_DOT],
            psi_dot: y[PSI_DOT],
            thrust_dot: ev.thrust_dot,
        };
        Ok(StationRecord {
            state,
            position: pp.ground[0],
            rate_derivatives: accels,
            alpha_ddot: ev.alpha_ddot,
            beta_ddot: ev.beta_ddot,
            theta_ddot: ev.theta_ddot,
            psi_ddot: ev.psi_ddot,
            flags: StationFlags {
                stall_warning: eq.actual_alpha(y[ALPHA]).abs() > STALL_ALPHA,
                reverse_thrust: y[THRUST] < 0.0,
            },
            accel_gap: 0.0,
        })
    }

    fn initial_state(&self, pp: &ProfilePoint) -> Result<State, SolveErrorKind> {
        let path = PathAngles { theta_w: pp.theta_w.v, psi_w: pp.psi_w.v };
        let (theta, psi) = kinematics::attitude_from_path(0.0, 0.0, pp.phi.v, path)?;
        let mut y = [0.0; 12];
        y[THETA] = theta;
        y[PSI] = psi;
        y[THRUST] = dynamics::thrust_from_force_balance(&self.wind_state(pp, &y), &self.cfg, &self.env)?;
        let still = Jet::constant(0.0);
        let motion = AttitudeMotion { alpha: still, beta: still, phi: pp.phi, theta_w: pp.theta_w, psi_w: pp.psi_w };
        let (theta_dot, psi_dot) = kinematics::attitude_rates(&motion, theta, psi)?;
        y[THETA_DOT] = theta_dot;
        y[PSI_DOT] = psi_dot;
        let w = kinematics::body_rates_from_euler(pp.phi.v, theta, EulerRates { phi_dot: pp.phi.d, theta_dot, psi_dot });
        y[P] = w.p;
        y[Q] = w.q;
        y[R] = w.r;
        Ok(y)
    }
}

/// Lift reference for the given profiles' first station.
pub fn equilibrium_for(profiles: &KinematicProfiles, cfg: &AircraftConfig, env: &FlightEnvironment) -> EquilibriumReference {
    let p0 = &profiles.stations[0];
    aero::equilibrium_reference(
        cfg.mass,
        env.g,
        aero::dynamic_pressure(p0.rho, p0.v),
        cfg.wing_area,
        cfg.aero.c_l_alpha,
        cfg.aero.c_l0,
    )
}

/// Equilibrium start at the first station, with the lift reference shifted to
/// the equilibrium point.
pub fn initialize(
    profiles: &KinematicProfiles,
    cfg: &AircraftConfig,
    env: &FlightEnvironment,
) -> Result<StationRecord, SolveError> {
    let eq = equilibrium_for(profiles, cfg, env);
    let shifted = AircraftConfig { aero: eq.shifted(&cfg.aero), ..*cfg };
    let solver = Solver { profiles, cfg: shifted, env: *env };
    init_record(&solver, &eq).map_err(|kind| SolveError { phase: Phase::Initialization, station: 0, kind })
}

fn init_record(solver: &Solver, eq: &EquilibriumReference) -> Result<StationRecord, SolveErrorKind> {
    let pp = &solver.profiles.stations[0];
    let y = solver.initial_state(pp)?;
    let zero = BodyRates::default();
    let ev = solver.evaluate(pp, &y, &zero)?;
    solver.record(pp, &y, &ev, zero, eq)
}

fn state_of(r: &StationRecord) -> State {
    let s = &r.state;
    [
        s.alpha, s.beta, s.theta, s.psi, s.thrust, s.alpha_dot, s.beta_dot, s.theta_dot, s.psi_dot, s.p, s.q, s.r,
    ]
}

pub fn solve(spec: &TrajectorySpec, cfg: &AircraftConfig, env: &FlightEnvironment) -> Result<SolutionHistory, SolveError> {
    solve_with(spec, cfg, env, SolverOptions::default())
}

pub fn solve_with(
    spec: &TrajectorySpec,
    cfg: &AircraftConfig,
    env: &FlightEnvironment,
    options: SolverOptions,
) -> Result<SolutionHistory, SolveError> {
    validate_config(cfg).map_err(|e| SolveError::new(Phase::Setup, 0, e))?;
    let profiles = setup(spec, env)?;
    let eq = equilibrium_for(&profiles, cfg, env);
    let shifted = AircraftConfig { aero: eq.shifted(&cfg.aero), ..*cfg };
    let solver = Solver { profiles: &profiles, cfg: shifted, env: *env };
    let grid = profiles.grid;

    let mut records = Vec::with_capacity(grid.count);
    records.push(init_record(&solver, &eq).map_err(|kind| SolveError { phase: Phase::Initialization, station: 0, kind })?);
    let mut warned = StationFlags::default();

    for n in 0..grid.count - 1 {
        let fail = |kind: SolveErrorKind| SolveError { phase: Phase::Loop, station: n + 1, kind };
        let prev = &records[n];
        let y = state_of(prev);
        let mut lag = prev.rate_derivatives;
        let step = numerics::rk4_step(&y, grid.dt, |stage, ys| {
            let pp = profiles.at(n, stage);
            let mut ev = solver.evaluate(pp, ys, &lag)?;
            for _ in 1..options.stage_passes {
                ev = solver.evaluate(pp, ys, &ev.rate_derivatives)?;
            }
            lag = ev.rate_derivatives;
            Ok::<_, SolveErrorKind>(Solver::rates(ys, &ev))
        })
        .map_err(fail)?;
        if step.y.iter().any(|v| !v.is_finite()) {
            return Err(fail(SolveErrorKind::NonFiniteState));
        }

        let avg = step.weighted_rate();
        let averaged = BodyRates { p: avg[P], q: avg[Q], r: avg[R] };
        let pp = &profiles.stations[n + 1];
        let ev = solver.evaluate(pp, &step.y, &averaged).map_err(fail)?;
        let gap = rates_array(&ev.rate_derivatives)
            .iter()
            .zip(rates_array(&averaged))
            .fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
        let accels = match options.accel_update {
            AccelUpdate::WeightedAverage => averaged,
            AccelUpdate::Reevaluated => ev.rate_derivatives,
        };
        let mut rec = solver.record(pp, &step.y, &ev, accels, &eq).map_err(fail)?;
        rec.accel_gap = gap;
        if [rec.state.delta_l, rec.state.delta_m, rec.state.delta_n].iter().any(|v| !v.is_finite()) {
            return Err(fail(SolveErrorKind::NonFiniteState));
        }
        if rec.flags.stall_warning && !warned.stall_warning {
            aero::stall_warning(eq.actual_alpha(rec.state.alpha));
            warned.stall_warning = true;
        }
        if rec.flags.reverse_thrust && !warned.reverse_thrust {
            warn!("required thrust is negative ({:.1} N) at t = {:.4} s", rec.state.thrust, rec.state.t);
            warned.reverse_thrust = true;
        }
        records.push(rec);
    }

    Ok(SolutionHistory { grid, records, equilibrium: eq, config: shifted, env: *env })
}

/// Relative difference below which two control histories count as equal.
pub const INSENSITIVITY_TOLERANCE: f64 = 0.01;

/// Differences between two runs for `(δl, δm, δn, T)`, each divided by the
/// peak magnitude of that control in the finest run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PairDifference {
    pub dt_a: f64,
    pub dt_b: f64,
    pub relative: [f64; 4],
}

impl PairDifference {
    pub fn max(&self) -> f64 {
        self.relative.iter().copied().fold(0.0, f64::max)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceReport {
    /// Ascending.
    pub step_sizes: Vec<f64>,
    /// Step of the common comparison grid (the coarsest successful run).
    pub comparison_dt: f64,
    /// Peak `|δl|, |δm|, |δn|, |T|` of the finest run.
    pub peaks: [f64; 4],
    pub pairs: Vec<PairDifference>,
    pub failures: Vec<(f64, SolveError)>,
}

impl ConvergenceReport {
    /// Pairs involving `dt`.
    pub fn pairs_with(&self, dt: f64) -> impl Iterator<Item = &PairDifference> {
        self.pairs.iter().filter(move |p| p.dt_a == dt || p.dt_b == dt)
    }

    /// Largest relative difference between `dt` and the finest step.
    pub fn deviation_from_finest(&self, dt: f64) -> Option<f64> {
        let finest = self.step_sizes[0];
        if self.failures.iter().any(|(d, _)| *d == dt) {
            return Some(f64::INFINITY);
        }
        self.pairs
            .iter()
            .find(|p| (p.dt_a == finest && p.dt_b == dt) || (p.dt_b == finest && p.dt_a == dt))
            .map(PairDifference::max)
    }

    pub fn insensitive(&self) -> bool {
        self.failures.is_empty() && self.pairs.iter().all(|p| p.max() < INSENSITIVITY_TOLERANCE)
    }
}

fn controls_of(r: &StationRecord) -> [f64; 4] {
    let c = r.controls();
    [c.delta_l, c.delta_m, c.delta_n, c.thrust]
}

/// Solves the same maneuver at several step sizes and compares the control
/// histories pairwise on the coarsest grid. A run that fails is reported in
/// `failures` and makes the verdict sensitive.
pub fn convergence_study(
    maneuver: Arc<dyn Maneuver>,
    cfg: &AircraftConfig,
    env: &FlightEnvironment,
    step_sizes: &[f64],
    options: SolverOptions,
) -> Result<ConvergenceReport, SolveError> {
    let mut dts = step_sizes.to_vec();
    dts.sort_by(f64::total_cmp);
    dts.dedup();
    if dts.len() < 2 {
        return Err(SolveError::new(Phase::Setup, 0, SolveErrorKind::TooFewStepSizes));
    }
    let specs = dts
        .iter()
        .map(|&dt| TrajectorySpec::analytic(maneuver.clone(), dt).map_err(|e| SolveError::new(Phase::Setup, 0, e)))
        .collect::<Result<Vec<_>, _>>()?;

    let outcomes: Vec<_> = std::thread::scope(|s| {
        let handles: Vec<_> = specs.iter().map(|spec| s.spawn(move || solve_with(spec, cfg, env, options))).collect();
        handles.into_iter().map(|h| h.join().expect("solver thread panicked")).collect()
    });

    let mut runs = Vec::new();
    let mut failures = Vec::new();
    for (dt, outcome) in dts.iter().zip(outcomes) {
        match outcome {
            Ok(h) => runs.push((*dt, h)),
            Err(e) => failures.push((*dt, e)),
        }
    }
    let Some((_, finest)) = runs.first() else {
        let (_, e) = failures.swap_remove(0);
        return Err(e);
    };
    let mut peaks = [0.0f64; 4];
    for r in &finest.records {
        for (p, c) in peaks.iter_mut().zip(controls_of(r)) {
            *p = p.max(c.abs());
        }
    }
    let (comparison_dt, coarse) = runs.last().map(|(dt, h)| (*dt, h.grid)).expect("non-empty");
    let mut pairs = Vec::new();
    for i in 0..runs.len() {
        for j in i + 1..runs.len() {
            let (a, b) = (&runs[i].1, &runs[j].1);
            let mut diff = [0.0f64; 4];
            for t in coarse.times() {
                for k in 0..4 {
                    let d = (a.sample(t, |r| controls_of(r)[k]) - b.sample(t, |r| controls_of(r)[k])).abs();
                    diff[k] = diff[k].max(d);
                }
            }
            let relative = std::array::from_fn(|k| if peaks[k] > 1e-12 { diff[k] / peaks[k] } else { diff[k] });
            pairs.push(PairDifference { dt_a: runs[i].0, dt_b: runs[j].0, relative });
        }
    }
    Ok(ConvergenceReport { step_sizes: dts, comparison_dt, peaks, pairs, failures })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::trajectory::{Helix, LevelFlight, MirageRoll, SampledConstraints, StraightClimb};
    use std::f64::consts::PI;

    const ENV: FlightEnvironment = FlightEnvironment::STANDARD;

    fn mirage_spec(dt: f64) -> TrajectorySpec {
        TrajectorySpec::analytic(Arc::new(MirageRoll), dt).unwrap()
    }

    #[test]
    fn mirage_profiles_are_straight_and_level() {
        let p = setup(&mirage_spec(1e-3), &ENV).unwrap();
        assert_eq!(p.stations.len(), 6001);
        assert_eq!(p.midpoints.len(), 6000);
        for pt in p.stations.iter().chain(&p.midpoints) {
            assert_eq!(pt.v, 200.0);
            assert_eq!((pt.v_dot, pt.v_ddot), (0.0, 0.0));
            assert_eq!(pt.theta_w, Jet::constant(0.0));
            assert_eq!(pt.psi_w, Jet::constant(0.0));
            assert_eq!(pt.rho_dot, 0.0);
        }
        assert_eq!(p.stations[0].phi.v, 0.0);
        assert!((p.stations[3000].phi.v - PI).abs() < 1e-15);
        assert!((p.stations[6000].phi.v - 2.0 * PI).abs() < 1e-15);
        assert!(p.stations[0].phi.d.abs() < 1e-15 && p.stations[6000].phi.d.abs() < 1e-14);
        assert!((p.midpoints[0].t - 5e-4).abs() < 1e-15);
    }

    #[test]
    fn helix_profiles() {
        let (r, w, c) = (1500.0, 0.12, 6.0);
        let helix = Helix { radius: r, omega: w, climb_rate: c, z_g0: -4000.0, bank: 0.3, duration: 5.0 };
        let p = setup(&TrajectorySpec::analytic(Arc::new(helix), 1e-2).unwrap(), &ENV).unwrap();
        let v = (r * r * w * w + c * c).sqrt();
        let theta_w = (c / v).asin();
        for pt in &p.stations {
            assert!((pt.v - v).abs() < 1e-9);
            assert!(pt.v_dot.abs() < 1e-8 && pt.v_ddot.abs() < 1e-5);
            assert!((pt.theta_w.v - theta_w).abs() < 1e-12);
            assert!(pt.theta_w.d.abs() < 1e-9);
            assert!((pt.psi_w.d - w).abs() < 1e-12);
            assert!(pt.psi_w.dd.abs() < 1e-12);
            assert!(pt.rho_dot < 0.0);
        }
    }

    #[test]
    fn sampled_profiles_match_analytic() {
        let helix = Helix { radius: 1500.0, omega: 0.12, climb_rate: 6.0, z_g0: -4000.0, bank: 0.3, duration: 5.0 };
        let spec = TrajectorySpec::analytic(Arc::new(helix), 1e-2).unwrap();
        let exact = setup(&spec, &ENV).unwrap();
        let grid = spec.grid;
        let axis = |i: usize| SampledSignal::from_fn(grid, move |t| helix.position(t)[0][i]);
        let sampled = TrajectorySpec::sampled(SampledConstraints {
            x_g: axis(0),
            y_g: axis(1),
            z_g: axis(2),
            phi: SampledSignal::from_fn(grid, |_| 0.3),
        })
        .unwrap();
        let approx = setup(&sampled, &ENV).unwrap();
        for n in 2..grid.count - 2 {
            let (a, e) = (&approx.stations[n], &exact.stations[n]);
            assert!((a.v - e.v).abs() < 1e-3);
            assert!((a.theta_w.v - e.theta_w.v).abs() < 1e-6);
            assert!((a.psi_w.d - e.psi_w.d).abs() < 1e-5);
            assert!((a.psi_w.dd - e.psi_w.dd).abs() < 1e-4);
        }
        let mid = &approx.midpoints[10];
        assert!((mid.t - grid.time(10) - 0.005).abs() < 1e-12);
    }

    #[test]
    fn mirage_initial_state_is_trim() {
        let spec = mirage_spec(1e-3);
        let profiles = setup(&spec, &ENV).unwrap();
        let cfg = AircraftConfig::mirage_iii();
        let init = initialize(&profiles, &cfg, &ENV).unwrap();
        let s = init.state;
        assert_eq!((s.alpha, s.beta, s.theta, s.psi), (0.0, 0.0, 0.0, 0.0));
        assert_eq!((s.p, s.q, s.r), (0.0, 0.0, 0.0));
        assert_eq!((s.alpha_dot, s.beta_dot), (0.0, 0.0));
        assert!(s.delta_l.abs() < 1e-15 && s.delta_m.abs() < 1e-15 && s.delta_n.abs() < 1e-15);
        // trim oracle: q̄S(C_D0 + K C_L²) with C_L = mg/(q̄S)
        let rho = atmosphere::density(-10_000.0, &ENV).unwrap();
        let qs = 0.5 * rho * 200.0 * 200.0 * 36.0;
        let c_l = 7400.0 * 9.81 / qs;
        assert!((s.thrust - qs * (0.015 + 0.4 * c_l * c_l)).abs() < 1e-6);
        assert!((s.thrust - 11_572.0).abs() < 50.0);
    }

    #[test]
    fn climb_start_needs_weight_component() {
        let theta_w = 0.1;
        let climb = StraightClimb { speed: 200.0, theta_w, z_g0: -10_000.0, duration: 1.0 };
        let profiles = setup(&TrajectorySpec::analytic(Arc::new(climb), 1e-2).unwrap(), &ENV).unwrap();
        let init = initialize(&profiles, &AircraftConfig::mirage_iii(), &ENV).unwrap();
        assert!((init.state.theta - theta_w).abs() < 1e-12);
        let rho = profiles.stations[0].rho;
        let cfg = AircraftConfig::mirage_iii();
        let eq = equilibrium_for(&profiles, &cfg, &ENV);
        let level = dynamics::cruise_trim(cfg.mass, ENV.g, rho, 200.0, cfg.wing_area, &eq.shifted(&cfg.aero)).thrust;
        let excess = init.state.thrust - level;
        assert!((excess - cfg.mass * ENV.g * theta_w.sin()).abs() < 1e-6, "{excess}");
    }

    #[test]
    fn level_flight_is_a_fixed_point() {
        let spec = TrajectorySpec::analytic(Arc::new(LevelFlight::default()), 1e-3).unwrap();
        let h = solve(&spec, &AircraftConfig::mirage_iii(), &ENV).unwrap();
        let t0 = h.records[0].state.thrust;
        for r in &h.records {
            let s = &r.state;
            for x in [s.alpha, s.beta, s.p, s.q, s.r, s.theta, s.psi, s.delta_l, s.delta_m, s.delta_n] {
                assert!(x.abs() < 1e-12);
            }
            assert!((s.thrust - t0).abs() < 1e-9);
            assert!(!r.flags.stall_warning && !r.flags.reverse_thrust);
        }
    }

    #[test]
    fn constraints_are_reproduced() {
        let spec = mirage_spec(2e-3);
        let h = solve(&spec, &AircraftConfig::mirage_iii(), &ENV).unwrap();
        assert_eq!(h.records.len(), spec.grid.count);
        for (n, r) in h.records.iter().enumerate() {
            let [x, y, z, phi] = spec.constraint_at(n);
            assert_eq!(r.position, [x, y, z]);
            assert_eq!(r.state.phi, phi);
            assert_eq!((r.state.theta_w, r.state.psi_w), (0.0, 0.0));
            assert_eq!(r.state.t, spec.grid.time(n));
        }
    }

    #[test]
    fn single_pass_and_reevaluation_stay_close() {
        let spec = mirage_spec(1e-3);
        let cfg = AircraftConfig::mirage_iii();
        let base = solve(&spec, &cfg, &ENV).unwrap();
        let literal = solve_with(&spec, &cfg, &ENV, SolverOptions { stage_passes: 1, ..Default::default() }).unwrap();
        let reeval =
            solve_with(&spec, &cfg, &ENV, SolverOptions { accel_update: AccelUpdate::Reevaluated, ..Default::default() })
                .unwrap();
        let peak = base.max_by(|r| r.state.delta_n.abs());
        for other in [&literal, &reeval] {
            let diff = base
                .records
                .iter()
                .zip(&other.records)
                .map(|(a, b)| (a.state.delta_n - b.state.delta_n).abs())
                .fold(0.0, f64::max);
            assert!(diff < 0.1 * peak, "{diff}");
        }
        assert!(base.max_by(|r| r.accel_gap) > 0.0);
    }

    #[test]
    fn convergence_needs_two_steps() {
        let err = convergence_study(Arc::new(MirageRoll), &AircraftConfig::mirage_iii(), &ENV, &[1e-3, 1e-3], SolverOptions::default())
            .unwrap_err();
        assert_eq!(err.kind, SolveErrorKind::TooFewStepSizes);
    }

    #[test]
    fn convergence_report_pairs() {
        let level = Arc::new(LevelFlight { duration: 1.0, ..Default::default() });
        let r = convergence_study(level, &AircraftConfig::mirage_iii(), &ENV, &[1e-2, 5e-3, 2e-3], SolverOptions::default())
            .unwrap();
        assert_eq!(r.step_sizes, vec![2e-3, 5e-3, 1e-2]);
        assert_eq!(r.pairs.len(), 3);
        assert_eq!(r.comparison_dt, 1e-2);
        assert!(r.insensitive());
        assert_eq!(r.deviation_from_finest(1e-2), Some(0.0));
    }

    #[test]
    fn invalid_config_is_rejected() {
        let mut cfg = AircraftConfig::mirage_iii();
        cfg.mass = -1.0;
        let err = solve(&mirage_spec(1e-2), &cfg, &ENV).unwrap_err();
        assert_eq!(err.phase, Phase::Setup);
        assert!(matches!(err.kind, SolveErrorKind::Config(_)));
    }

    #[test]
    fn vertical_path_fails_in_setup() {
        let up = StraightClimb { speed: 100.0, theta_w: PI / 2.0, z_g0: -1000.0, duration: 1.0 };
        let err = setup(&TrajectorySpec::analytic(Arc::new(up), 0.1).unwrap(), &ENV).unwrap_err();
        assert_eq!(err.phase, Phase::Setup);
        assert_eq!(err.kind, SolveErrorKind::Kinematics(KinematicsError::VerticalFlight));
    }

    #[test]
    fn history_sampling_interpolates() {
        let h = solve(&mirage_spec(1e-2), &AircraftConfig::mirage_iii(), &ENV).unwrap();
        let a = h.records[100].state.beta;
        let b = h.records[101].state.beta;
        assert_eq!(h.sample(1.0, |r| r.state.beta), a);
        assert!((h.sample(1.005, |r| r.state.beta) - 0.5 * (a + b)).abs() < 1e-12);
    }
}
