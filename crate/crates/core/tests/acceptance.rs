//! Acceptance suite. Prints one verdict line per criterion followed by the
//! individual checks, and exits non-zero if any criterion fails.

use std::f64::consts::PI;
use std::process::ExitCode;
use std::sync::Arc;
use std::time::{Duration, Instant};

use invsim::aero::{self, AeroLoads};
use invsim::atmosphere::density;
use invsim::dynamics::{
    aoa_accel, aoa_rate, angular_accels_forward, control_moments, controls_from_angular_accels, sideslip_accel,
    sideslip_rate, thrust_from_force_balance, thrust_rate, ControlContext, ForceRateInputs, WindAxesState,
};
use invsim::forward::{simulate, ControlHistory};
use invsim::kinematics::{
    attitude_accels, attitude_from_path, attitude_rates, body_rate_derivatives, body_rates_from_euler,
    AttitudeMotion, BodyRates, EulerRates, PathAngles,
};
use invsim::numerics::{fd_first_derivative, fd_second_derivative, rk4_step, Jet, SampledSignal, UniformGrid};
use invsim::solver::{self, convergence_study, SolutionHistory, SolverOptions, INSENSITIVITY_TOLERANCE};
use invsim::trajectory::{LevelFlight, Maneuver, MirageRoll, TrajectorySpec};
use invsim::{AircraftConfig, FlightEnvironment, Inertia};
use proptest::prelude::*;
use proptest::test_runner::{Config, RngAlgorithm, TestRng, TestRunner};

const ENV: FlightEnvironment = FlightEnvironment::STANDARD;
const MIRAGE_DT: f64 = 1e-4;
const MIRAGE_STATIONS: usize = 60_001;

// Pinned tolerances.
const RHO_10KM: f64 = 0.412;
const RHO_REL_TOL: f64 = 0.0025;
const C_L0_EQUIB: f64 = 0.245;
const C_L0_EQUIB_TOL: f64 = 0.001;
const ALPHA_EQUIB_DEG: f64 = 6.36;
const ALPHA_EQUIB_TOL_DEG: f64 = 0.02;
const DELTA_N_MAX_DEG: f64 = 49.9;
const DELTA_N_TOL_DEG: f64 = 1.0;
const ALPHA_RANGE_DEG: (f64, f64) = (-6.05 - 0.2, 6.36 + 0.2);
const RUNTIME_BUDGET: Duration = Duration::from_secs(60);
const CONVERGED_STEPS: [f64; 3] = [1e-4, 2e-4, 1e-3];
const COARSE_STEP: f64 = 1e-2;
const SYMMETRY_TOL: f64 = 0.10;
const MOMENT_ROUND_TRIP_TOL: f64 = 1e-9;
const ROUND_TRIP_POSITION_TOL: f64 = 0.005 * 1200.0;
const ROUND_TRIP_BANK_TOL_DEG: f64 = 2.0;
const FD_ORDER_MIN: f64 = 1.9;
const STENCIL_TOL: f64 = 1e-9;
const LEVEL_TOL: f64 = 1e-6;
const TRIM_THRUST: f64 = 11_600.0;
const TRIM_THRUST_TOL: f64 = 200.0;
const THRUST_SYMMETRY_TOL: f64 = 0.15;
const MAX_TAKEOFF_THRUST: f64 = 71_000.0;

struct Check {
    name: String,
    ok: bool,
    detail: String,
}

fn check(name: &str, ok: bool, detail: String) -> Check {
    Check { name: name.to_string(), ok, detail }
}

fn within(name: &str, value: f64, target: f64, tol: f64) -> Check {
    check(name, (value - target).abs() <= tol, format!("{value:.6} vs {target} ± {tol}"))
}

fn deg(x: f64) -> f64 {
    x.to_degrees()
}

fn mirage() -> AircraftConfig {
    AircraftConfig::mirage_iii()
}

fn mirage_spec(dt: f64) -> TrajectorySpec {
    TrajectorySpec::analytic(Arc::new(MirageRoll), dt).expect("mirage spec")
}

fn criterion_1() -> Vec<Check> {
    let rho = density(-10_000.0, &ENV).unwrap();
    let rho0 = density(0.0, &ENV).unwrap();
    vec![
        check(
            "density at 10 km",
            ((rho - RHO_10KM) / RHO_10KM).abs() <= RHO_REL_TOL,
            format!("{rho:.5} kg/m³ vs {RHO_10KM} within {:.2}%", RHO_REL_TOL * 100.0),
        ),
        check("density at sea level", rho0 == 1.225, format!("{rho0} kg/m³")),
    ]
}

fn criterion_2() -> Vec<Check> {
    let cfg = mirage();
    let rho = density(-10_000.0, &ENV).unwrap();
    let qbar = aero::dynamic_pressure(rho, 200.0);
    let eq = aero::equilibrium_reference(cfg.mass, ENV.g, qbar, cfg.wing_area, cfg.aero.c_l_alpha, cfg.aero.c_l0);
    let profiles = solver::setup(&mirage_spec(MIRAGE_DT), &ENV).unwrap();
    let init = solver::initialize(&profiles, &cfg, &ENV).unwrap().state;
    let deflections = [init.delta_l, init.delta_m, init.delta_n];
    vec![
        within("C_L0 at equilibrium", eq.c_l0_equib, C_L0_EQUIB, C_L0_EQUIB_TOL),
        within("alpha at equilibrium (deg)", deg(eq.alpha_equib), ALPHA_EQUIB_DEG, ALPHA_EQUIB_TOL_DEG),
        check("initial deflections zero", deflections == [0.0; 3], format!("{deflections:?}")),
        check(
            "initial incidence rates zero",
            init.alpha_dot == 0.0 && init.beta_dot == 0.0,
            format!("alpha_dot {} beta_dot {}", init.alpha_dot, init.beta_dot),
        ),
    ]
}

fn criterion_3(h: &SolutionHistory, elapsed: Duration) -> Vec<Check> {
    let dn_max = deg(h.max_by(|r| r.state.delta_n.abs()));
    let n = h.records.len();
    let alpha: Vec<f64> = (0..n).map(|i| deg(h.alpha_actual(i))).collect();
    let (a_min, a_max) = alpha.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &a| (lo.min(a), hi.max(a)));
    let t_min = h.min_by(|r| r.state.thrust);
    let path_max = h.max_by(|r| r.state.theta_w.abs().max(r.state.psi_w.abs()));
    vec![
        check("station count", n == MIRAGE_STATIONS, format!("{n}")),
        within("max |delta_n| (deg)", dn_max, DELTA_N_MAX_DEG, DELTA_N_TOL_DEG),
        check(
            "actual alpha range (deg)",
            a_min >= ALPHA_RANGE_DEG.0 && a_max <= ALPHA_RANGE_DEG.1,
            format!("[{a_min:.3}, {a_max:.3}] within [{:.2}, {:.2}]", ALPHA_RANGE_DEG.0, ALPHA_RANGE_DEG.1),
        ),
        check("thrust positive", t_min > 0.0, format!("min {t_min:.1} N")),
        check("path angles zero", path_max == 0.0, format!("max |theta_w|, |psi_w| = {path_max:e}")),
        check("runtime", elapsed < RUNTIME_BUDGET, format!("{:.2} s", elapsed.as_secs_f64())),
    ]
}

fn criterion_4() -> Vec<Check> {
    let cfg = mirage();
    let fine = convergence_study(Arc::new(MirageRoll), &cfg, &ENV, &CONVERGED_STEPS, SolverOptions::default()).unwrap();
    let mut checks: Vec<Check> = fine
        .pairs
        .iter()
        .map(|p| {
            check(
                &format!("dt {:e} vs {:e}", p.dt_a, p.dt_b),
                p.max() < INSENSITIVITY_TOLERANCE,
                format!("max relative difference {:.3}%", p.max() * 100.0),
            )
        })
        .collect();
    checks.push(check("all fine runs succeed", fine.failures.is_empty(), format!("{} failures", fine.failures.len())));

    let coarse =
        convergence_study(Arc::new(MirageRoll), &cfg, &ENV, &[CONVERGED_STEPS[0], COARSE_STEP], SolverOptions::default())
            .unwrap();
    let dev = coarse.deviation_from_finest(COARSE_STEP).unwrap_or(f64::INFINITY);
    checks.push(check(
        "dt 1e-2 deviates",
        dev >= INSENSITIVITY_TOLERANCE,
        format!("max relative difference {:.2}%", dev * 100.0),
    ));
    checks
}

/// Largest `|f(t) − sign·f(6 − t)|` over the grid relative to the peak `|f|`.
fn mirror_error(h: &SolutionHistory, f: impl Fn(&invsim::solver::StationRecord) -> f64, sign: f64) -> f64 {
    let n = h.records.len();
    let peak = h.max_by(|r| f(r).abs());
    let worst = (0..n).map(|i| (f(&h.records[i]) - sign * f(&h.records[n - 1 - i])).abs()).fold(0.0, f64::max);
    worst / peak
}

fn criterion_5(h: &SolutionHistory) -> Vec<Check> {
    let theta = mirror_error(h, |r| r.state.theta, 1.0);
    let psi = mirror_error(h, |r| r.state.psi, -1.0);
    let theta_min = h.min_by(|r| r.state.theta);
    let theta_peak = h.max_by(|r| r.state.theta);
    let m = MirageRoll;
    let phi = [m.bank(0.0).v, m.bank(3.0).v, m.bank(6.0).v];
    let recorded = [h.records[0].state.phi, h.records[30_000].state.phi, h.records[60_000].state.phi];
    let exact = [0.0, PI, 2.0 * PI];
    let bank_ok = phi.iter().chain(&recorded).zip(exact.iter().chain(&exact)).all(|(a, b)| (a - b).abs() <= 1e-12);
    vec![
        check("theta symmetric", theta <= SYMMETRY_TOL, format!("{:.3}% of peak", theta * 100.0)),
        check("psi antisymmetric", psi <= SYMMETRY_TOL, format!("{:.3}% of peak", psi * 100.0)),
        check(
            "theta non-negative",
            theta_min >= -1e-6 * theta_peak,
            format!("min {:.2e} deg, peak {:.3} deg", deg(theta_min), deg(theta_peak)),
        ),
        check("bank at 0, 3, 6 s", bank_ok, format!("prescribed {phi:?}, solved {recorded:?}")),
    ]
}

fn arb_inertia() -> impl Strategy<Value = Inertia> {
    (1e3..1e5f64, 1e3..1e5f64, 1e3..1e5f64, -500.0..500.0f64, -3e3..3e3f64, -500.0..500.0f64)
        .prop_map(|(a, b, c, d, e, f)| Inertia { a, b, c, d, e, f })
}

fn moment_round_trip() -> Check {
    let config = Config { cases: 2000, failure_persistence: None, ..Config::default() };
    let mut runner = TestRunner::new_with_rng(config, TestRng::deterministic_rng(RngAlgorithm::ChaCha));
    let strategy = (
        arb_inertia(),
        prop::array::uniform3(-2.0..2.0f64),
        prop::array::uniform3(-2.0..2.0f64),
        -0.3..0.3f64,
        -0.4..0.4f64,
        100.0..300.0f64,
        0.3..1.2f64,
    );
    let worst = std::cell::Cell::new(0.0f64);
    let outcome = runner.run(&strategy, |(inertia, w, wd, alpha, beta, v, rho)| {
        let mut cfg = mirage();
        cfg.inertia = inertia;
        let rates = BodyRates { p: w[0], q: w[1], r: w[2] };
        let target = BodyRates { p: wd[0], q: wd[1], r: wd[2] };
        let ctx = ControlContext { alpha, beta, v, qbar: aero::dynamic_pressure(rho, v), rates };
        let controls = controls_from_angular_accels(&target, &ctx, &cfg).unwrap();
        let loads: AeroLoads = control_moments(&ctx, &controls, &cfg);
        let back = angular_accels_forward(&rates, &loads, &cfg.inertia).unwrap();
        let scale = wd.iter().map(|x| x.abs()).fold(1e-3, f64::max);
        let err = [(back.p - wd[0]), (back.q - wd[1]), (back.r - wd[2])].iter().map(|e| e.abs()).fold(0.0, f64::max) / scale;
        worst.set(worst.get().max(err));
        prop_assert!(err <= MOMENT_ROUND_TRIP_TOL);
        Ok(())
    });
    check("moment round trip", outcome.is_ok(), format!("2000 random states, worst relative {:.2e}", worst.get()))
}

fn full_round_trip(h: &SolutionHistory) -> Vec<Check> {
    let spec = mirage_spec(MIRAGE_DT);
    let controls = ControlHistory::from_solution(h);
    let first = &h.records[0];
    let fwd = simulate(&first.state, first.position, &controls, &h.config, &h.env).unwrap();
    let mut dev = [0.0f64; 3];
    for (n, r) in fwd.records.iter().enumerate() {
        let c = spec.constraint_at(n);
        for k in 0..3 {
            dev[k] = dev[k].max((r.position[k] - c[k]).abs());
        }
    }
    let phi_end = deg(fwd.records.last().unwrap().state.phi);
    vec![
        check(
            "trajectory reproduced",
            dev[1] < ROUND_TRIP_POSITION_TOL && dev[2] < ROUND_TRIP_POSITION_TOL,
            format!("max |dx| {:.4} m, |dy| {:.4} m, |dz| {:.4} m, limit {ROUND_TRIP_POSITION_TOL} m", dev[0], dev[1], dev[2]),
        ),
        within("final bank (deg)", phi_end, 360.0, ROUND_TRIP_BANK_TOL_DEG),
    ]
}

/// Observed order of the central difference of `parent` against `exact`.
fn fd_order(parent: impl Fn(f64) -> f64, exact: f64, t: f64) -> f64 {
    let fd = |h: f64| (parent(t + h) - parent(t - h)) / (2.0 * h);
    let (e1, e2) = ((fd(1e-2) - exact).abs(), (fd(5e-3) - exact).abs());
    (e1 / e2).log2()
}

fn force_history(t: f64) -> (WindAxesState, ForceRateInputs) {
    let s = WindAxesState {
        v: 190.0 + 4.0 * t * t,
        v_dot: 8.0 * t,
        v_ddot: 8.0,
        rho: 0.45 + 0.02 * t,
        rho_dot: 0.02,
        alpha: 0.08 * (1.1 * t).sin(),
        alpha_dot: 0.088 * (1.1 * t).cos(),
        beta: 0.15 * (0.9 * t).cos(),
        beta_dot: -0.135 * (0.9 * t).sin(),
        theta: 0.2 * t,
        theta_dot: 0.2,
        phi: 1.2 * t - 0.1 * t * t,
        phi_dot: 1.2 - 0.2 * t,
        p: (1.5 * t).sin(),
        q: 0.1 + 0.05 * t,
        r: -0.2 * t * t,
        thrust: 12_000.0 + 1_500.0 * t,
    };
    let extra = ForceRateInputs { thrust_dot: 1_500.0, p_dot: 1.5 * (1.5 * t).cos(), q_dot: 0.05, r_dot: -0.4 * t };
    (s, extra)
}

fn motion(t: f64) -> AttitudeMotion {
    let j = |v: f64, d: f64, dd: f64| Jet::new(v, d, dd);
    AttitudeMotion {
        alpha: j(0.1 + 0.05 * (t).sin(), 0.05 * t.cos(), -0.05 * t.sin()),
        beta: j(0.08 * (0.7 * t).cos(), -0.056 * (0.7 * t).sin(), -0.0392 * (0.7 * t).cos()),
        phi: j(0.5 * t * t, t, 1.0),
        theta_w: j(0.2 * (0.5 * t).sin(), 0.1 * (0.5 * t).cos(), -0.05 * (0.5 * t).sin()),
        psi_w: j(0.3 * t, 0.3, 0.0),
    }
}

fn attitude(t: f64) -> (f64, f64) {
    let m = motion(t);
    attitude_from_path(m.alpha.v, m.beta.v, m.phi.v, PathAngles { theta_w: m.theta_w.v, psi_w: m.psi_w.v }).unwrap()
}

fn differentiated_equations() -> Vec<Check> {
    let cfg = mirage();
    let t = 0.8;
    let (s, extra) = force_history(t);
    let mut orders = Vec::new();

    let balanced = WindAxesState { thrust: thrust_from_force_balance(&s, &cfg, &ENV).unwrap(), ..s };
    let exact = thrust_rate(&balanced, &cfg, &ENV).unwrap();
    orders.push(("thrust", fd_order(|t| thrust_from_force_balance(&force_history(t).0, &cfg, &ENV).unwrap(), exact, t)));

    let f = sideslip_rate(&s, &cfg, &ENV).unwrap();
    let exact = sideslip_accel(&s, &extra, &cfg, &ENV).unwrap() + s.v_dot * (s.beta_dot - f) / s.v;
    orders.push(("sideslip", fd_order(|t| sideslip_rate(&force_history(t).0, &cfg, &ENV).unwrap(), exact, t)));

    let f = aoa_rate(&s, &cfg, &ENV).unwrap();
    let (cb, cb_dot) = (s.beta.cos(), -s.beta.sin() * s.beta_dot);
    let exact = aoa_accel(&s, &extra, &cfg, &ENV).unwrap() + (s.v_dot * cb + s.v * cb_dot) * (s.alpha_dot - f) / (s.v * cb);
    orders.push(("incidence", fd_order(|t| aoa_rate(&force_history(t).0, &cfg, &ENV).unwrap(), exact, t)));

    let euler = |t: f64| (0.4 * t.sin(), 0.3 * (0.6 * t).cos(), 0.5 * t);
    let rates = |t: f64| EulerRates { phi_dot: 0.4 * t.cos(), theta_dot: -0.18 * (0.6 * t).sin(), psi_dot: 0.5 };
    let accels = |t: f64| EulerRates { phi_dot: -0.4 * t.sin(), theta_dot: -0.108 * (0.6 * t).cos(), psi_dot: 0.0 };
    let body = |t: f64| {
        let (phi, theta, _) = euler(t);
        body_rates_from_euler(phi, theta, rates(t))
    };
    let (phi, theta, _) = euler(t);
    let exact = body_rate_derivatives(phi, theta, rates(t), accels(t));
    orders.push(("roll rate", fd_order(|t| body(t).p, exact.p, t)));
    orders.push(("pitch rate", fd_order(|t| body(t).q, exact.q, t)));
    orders.push(("yaw rate", fd_order(|t| body(t).r, exact.r, t)));

    let (th, ps) = attitude(t);
    let (th_dot, ps_dot) = attitude_rates(&motion(t), th, ps).unwrap();
    orders.push(("pitch attitude rate", fd_order(|t| attitude(t).0, th_dot, t)));
    orders.push(("heading attitude rate", fd_order(|t| attitude(t).1, ps_dot, t)));
    let rate_at = |t: f64| {
        let (a, b) = attitude(t);
        attitude_rates(&motion(t), a, b).unwrap()
    };
    let (th_dd, ps_dd) = attitude_accels(&motion(t), th, th_dot, ps, ps_dot).unwrap();
    orders.push(("pitch attitude accel", fd_order(|t| rate_at(t).0, th_dd, t)));
    orders.push(("heading attitude accel", fd_order(|t| rate_at(t).1, ps_dd, t)));

    orders
        .into_iter()
        .map(|(name, order)| check(&format!("{name} derivative order"), order >= FD_ORDER_MIN, format!("{order:.3}")))
        .collect()
}

fn stencils_and_rk4() -> Vec<Check> {
    let grid = UniformGrid::new(0.3, 0.05, 40).unwrap();
    let quad = SampledSignal::from_fn(grid, |t| 2.0 - 3.0 * t + 1.7 * t * t);
    let d1 = fd_first_derivative(&quad).unwrap();
    let e1 = grid.times().zip(&d1.values).map(|(t, v)| (v - (-3.0 + 3.4 * t)).abs()).fold(0.0, f64::max);
    let cubic = SampledSignal::from_fn(grid, |t| 1.0 + t - 0.5 * t * t + 0.8 * t * t * t);
    let d2 = fd_second_derivative(&cubic).unwrap();
    let e2 = grid.times().zip(&d2.values).map(|(t, v)| (v - (-1.0 + 4.8 * t)).abs()).fold(0.0, f64::max);

    let poly = |t: f64| 0.5 + 2.0 * t - 1.5 * t * t + 0.7 * t * t * t;
    let (t0, h) = (0.4, 0.3);
    let step = rk4_step(&[poly(t0)], h, |stage, _| {
        let t = t0 + stage.offset() * h;
        Ok::<_, ()>([2.0 - 3.0 * t + 2.1 * t * t])
    })
    .unwrap();
    let e_poly = (step.y[0] - poly(t0 + h)).abs();

    let local = |h: f64| (rk4_step(&[1.0], h, |_, y| Ok::<_, ()>([y[0]])).unwrap().y[0] - h.exp()).abs();
    let order = (local(0.1) / local(0.05)).log2();
    vec![
        check("3-point first derivative on quadratic", e1 <= STENCIL_TOL, format!("max error {e1:.2e}")),
        check("4-point second derivative on cubic", e2 <= STENCIL_TOL, format!("max error {e2:.2e}")),
        check("RK4 on cubic polynomial", e_poly <= STENCIL_TOL, format!("error {e_poly:.2e}")),
        check("RK4 local order on exponential", order >= 4.8, format!("{order:.3}")),
    ]
}

fn level_equilibrium() -> Check {
    let spec = TrajectorySpec::analytic(Arc::new(LevelFlight::default()), MIRAGE_DT).unwrap();
    let h = solver::solve(&spec, &mirage(), &ENV).unwrap();
    let t0 = h.records[0].state.thrust;
    let worst = h
        .records
        .iter()
        .map(|r| {
            let s = &r.state;
            [s.alpha, s.beta, s.p, s.q, s.r, s.theta, s.psi, s.delta_l, s.delta_m, s.delta_n, (s.thrust - t0) / t0]
                .iter()
                .map(|x| x.abs())
                .fold(0.0, f64::max)
        })
        .fold(0.0, f64::max);
    check("level flight stays at equilibrium", worst <= LEVEL_TOL, format!("max deviation {worst:.2e} over {:.0} s", spec.duration()))
}

fn criterion_6(h: &SolutionHistory) -> Vec<Check> {
    let mut checks = vec![moment_round_trip()];
    checks.extend(full_round_trip(h));
    checks.extend(differentiated_equations());
    checks.extend(stencils_and_rk4());
    checks.push(level_equilibrium());
    checks
}

fn criterion_7(h: &SolutionHistory) -> Vec<Check> {
    let thrust = |i: usize| h.records[i].state.thrust;
    let n = h.records.len();
    let t0 = thrust(0);
    let t_end = thrust(n - 1);
    let t_min = h.min_by(|r| r.state.thrust);
    let t_max = h.max_by(|r| r.state.thrust);
    let mid = (0..n).filter(|&i| (h.grid.time(i) - 3.0).abs() <= 0.5).map(thrust).fold(f64::NEG_INFINITY, f64::max);
    let recovery = (mid - t_min) / (t0 - t_min);
    let asym = (0..n).map(|i| (thrust(i) - thrust(n - 1 - i)).abs()).fold(0.0, f64::max) / (t_max - t_min);
    vec![
        within("initial thrust (N)", t0, TRIM_THRUST, TRIM_THRUST_TOL),
        check("dips below trim", t_min < 0.9 * t0, format!("min {t_min:.1} N")),
        check(
            "recovers near mid-maneuver",
            recovery >= 0.5,
            format!("peak within 0.5 s of t = 3 s is {mid:.1} N, {:.1}% of the dip recovered", recovery * 100.0),
        ),
        within("final thrust near trim (N)", t_end, t0, TRIM_THRUST_TOL),
        check("symmetric about 3 s", asym <= THRUST_SYMMETRY_TOL, format!("{:.3}% of peak-to-trough", asym * 100.0)),
        check("below take-off thrust", t_max < MAX_TAKEOFF_THRUST, format!("max {t_max:.1} N")),
    ]
}

fn report(number: usize, title: &str, checks: &[Check]) -> bool {
    let ok = checks.iter().all(|c| c.ok);
    println!("criterion {number} {}: {title}", if ok { "PASS" } else { "FAIL" });
    for c in checks {
        println!("    [{}] {}: {}", if c.ok { "ok" } else { "FAIL" }, c.name, c.detail);
    }
    ok
}

fn main() -> ExitCode {
    let start = Instant::now();
    let mirage_run = solver::solve(&mirage_spec(MIRAGE_DT), &mirage(), &ENV).expect("mirage roll solve");
    let elapsed = start.elapsed();

    let results = [
        report(1, "atmosphere", &criterion_1()),
        report(2, "trim identities", &criterion_2()),
        report(3, "mirage roll at dt = 1e-4", &criterion_3(&mirage_run, elapsed)),
        report(4, "step-size insensitivity", &criterion_4()),
        report(5, "symmetry of the roll solution", &criterion_5(&mirage_run)),
        report(6, "property suite", &criterion_6(&mirage_run)),
        report(7, "thrust history shape", &criterion_7(&mirage_run)),
    ];
    let passed = results.iter().filter(|&&ok| ok).count();
    println!("acceptance: {passed}/{} criteria passed", results.len());
    if passed == results.len() {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
