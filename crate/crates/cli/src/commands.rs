//! One function per subcommand.

use invsim::aero;
use invsim::atmosphere::density;
use invsim::dynamics::cruise_trim;
use invsim::forward::{simulate, tracking_deviation, ControlHistory};
use invsim::solver::{self, convergence_study, SolutionHistory, SolverOptions};
use invsim::{AircraftConfig, FlightEnvironment};

use crate::args::{ConvergeArgs, ForwardArgs, RoundtripArgs, RunArgs, TrimArgs};
use crate::error::CliError;
use crate::input::{self, ManeuverSource};
use crate::output::{self, number};

const ENV: FlightEnvironment = FlightEnvironment::STANDARD;

/// Round-trip position tolerance as a fraction of the distance flown.
pub const ROUND_TRIP_POSITION_FRACTION: f64 = 0.005;
/// Round-trip bank tolerance, deg.
pub const ROUND_TRIP_BANK_DEG: f64 = 2.0;

fn solve(args: &RunArgs) -> Result<(invsim::trajectory::TrajectorySpec, SolutionHistory), CliError> {
    let cfg = input::load_config(args.common.config.as_deref())?;
    let source = input::resolve_maneuver(&args.maneuver)?;
    let spec = input::trajectory_spec(&source, args.dt)?;
    let h = solver::solve(&spec, &cfg, &ENV)?;
    Ok((spec, h))
}

pub fn inverse(args: &RunArgs) -> Result<(), CliError> {
    let (_, h) = solve(args)?;
    let summary = output::write_solution(&args.common.out, "history", &h, args.common.angles)?;
    print!("{summary}");
    Ok(())
}

pub fn forward(args: &ForwardArgs) -> Result<(), CliError> {
    let cfg = input::load_config(args.common.config.as_deref())?;
    let replay = input::read_history(&args.controls, args.common.angles)?;
    // lift reference at the first row, as in the inverse run
    let rho = density(replay.position[2], &ENV)?;
    let qbar = aero::dynamic_pressure(rho, replay.initial.v);
    let eq = aero::equilibrium_reference(cfg.mass, ENV.g, qbar, cfg.wing_area, cfg.aero.c_l_alpha, cfg.aero.c_l0);
    let shifted = AircraftConfig { aero: eq.shifted(&cfg.aero), ..cfg };
    let mut h = simulate(&replay.initial, replay.position, &replay.controls, &shifted, &ENV)?;
    h.equilibrium = eq;
    let summary = output::write_solution(&args.common.out, "forward", &h, args.common.angles)?;
    print!("{summary}");
    Ok(())
}

pub fn roundtrip(args: &RoundtripArgs) -> Result<(), CliError> {
    let common = &args.run.common;
    let (spec, h) = solve(&args.run)?;
    output::write_solution(&common.out, "history", &h, common.angles)?;

    let mut controls = ControlHistory::from_solution(&h);
    if args.zero_rudder {
        controls.controls.iter_mut().for_each(|c| c.delta_n = 0.0);
    }
    let first = &h.records[0];
    let fwd = simulate(&first.state, first.position, &controls, &h.config, &h.env)?;
    output::write_solution(&common.out, "forward", &fwd, common.angles)?;

    let dev = tracking_deviation(&spec, &fwd)?;
    let path: f64 = (1..spec.grid.count)
        .map(|n| {
            let (a, b) = (spec.constraint_at(n - 1), spec.constraint_at(n));
            ((b[0] - a[0]).powi(2) + (b[1] - a[1]).powi(2) + (b[2] - a[2]).powi(2)).sqrt()
        })
        .sum();
    let position_tol = ROUND_TRIP_POSITION_FRACTION * path;
    let phi_tol = ROUND_TRIP_BANK_DEG.to_radians();
    let [dx, dy, dz] = dev.position;
    let ok = dy <= position_tol && dz <= position_tol && dev.phi <= phi_tol;

    let report = format!(
        "path_length_m = {}\nmax_abs_dx_g_m = {}\nmax_abs_dy_g_m = {}\nmax_abs_dz_g_m = {}\nmax_abs_dphi_deg = {}\n\
         position_tolerance_m = {}\nbank_tolerance_deg = {}\nstatus = {}\n",
        number(path),
        number(dx),
        number(dy),
        number(dz),
        number(dev.phi.to_degrees()),
        number(position_tol),
        number(ROUND_TRIP_BANK_DEG),
        if ok { "match" } else { "mismatch" },
    );
    output::write_file(&common.out.join("roundtrip.txt"), &report)?;
    print!("{report}");
    if ok {
        Ok(())
    } else {
        Err(CliError::Mismatch(format!(
            "lateral {} m, vertical {} m, bank {} deg",
            number(dy),
            number(dz),
            number(dev.phi.to_degrees())
        )))
    }
}

pub fn trim(args: &TrimArgs) -> Result<(), CliError> {
    let cfg = input::load_config(args.config.as_deref())?;
    if !(args.speed > 0.0 && args.speed.is_finite()) {
        return Err(CliError::Usage(format!("speed must be positive, got {}", args.speed)));
    }
    let rho = density(-args.altitude, &ENV)?;
    let qbar = aero::dynamic_pressure(rho, args.speed);
    let trim = cruise_trim(cfg.mass, ENV.g, rho, args.speed, cfg.wing_area, &cfg.aero);
    let alpha_equib = trim.c_l / cfg.aero.c_l_alpha;
    println!("rho = {} kg/m^3", number(rho));
    println!("qbar = {} Pa", number(qbar));
    println!("C_L = {}", number(trim.c_l));
    println!("C_D = {}", number(trim.c_d));
    println!("alpha_equib = {} rad ({} deg)", number(alpha_equib), number(alpha_equib.to_degrees()));
    println!("T = {} N", number(trim.thrust));
    Ok(())
}

pub fn converge(args: &ConvergeArgs) -> Result<(), CliError> {
    let cfg = input::load_config(args.common.config.as_deref())?;
    let ManeuverSource::Builtin(maneuver) = input::resolve_maneuver(&args.maneuver)? else {
        return Err(CliError::Usage("converge needs a built-in maneuver".into()));
    };
    let mut dts = args.dt_list.iter().map(|&dt| input::check_step(dt)).collect::<Result<Vec<_>, _>>()?;
    dts.sort_by(f64::total_cmp);
    dts.dedup();
    if dts.len() < 2 {
        return Err(CliError::Usage("--dt-list needs at least two distinct step sizes".into()));
    }
    let report = convergence_study(maneuver, &cfg, &ENV, &dts, SolverOptions::default())?;
    let mut table = output::convergence_table(&report);
    for (dt, e) in &report.failures {
        table.push_str(&format!("# dt {} failed: {e}\n", number(*dt)));
    }
    output::ensure_dir(&args.common.out)?;
    output::write_file(&args.common.out.join("convergence.csv"), &table)?;
    print!("{table}");
    println!("verdict = {}", if report.insensitive() { "insensitive" } else { "sensitive" });
    Ok(())
}
