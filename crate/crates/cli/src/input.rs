//! Aircraft data, maneuver and time-history files.

use std::fs;
use std::path::Path;
use std::sync::Arc;

use invsim::dynamics::ControlVector;
use invsim::forward::ControlHistory;
use invsim::model::validate_config;
use invsim::numerics::{SampledSignal, UniformGrid};
use invsim::trajectory::{self, Maneuver, SampledConstraints, TrajectorySpec, BUILTIN_NAMES};
use invsim::{AircraftConfig, FlightState};

use crate::args::{AngleUnit, DEFAULT_DT};
use crate::error::CliError;
use crate::output::HISTORY_HEADER;

pub const SAMPLE_HEADER: [&str; 5] = ["t", "x_g", "y_g", "z_g", "phi"];

pub fn load_config(path: Option<&Path>) -> Result<AircraftConfig, CliError> {
    let cfg = match path {
        None => AircraftConfig::mirage_iii(),
        Some(path) => {
            let text = fs::read_to_string(path).map_err(|source| CliError::Read { path: path.into(), source })?;
            text.parse().map_err(|source| CliError::ConfigFile { path: path.into(), source })?
        }
    };
    validate_config(&cfg)?;
    Ok(cfg)
}

#[derive(Debug, Clone)]
pub enum ManeuverSource {
    Builtin(Arc<dyn Maneuver>),
    Sampled(SampledConstraints),
}

/// A built-in name, otherwise a sample file path.
pub fn resolve_maneuver(name: &str) -> Result<ManeuverSource, CliError> {
    if let Some(m) = trajectory::builtin(name) {
        return Ok(ManeuverSource::Builtin(m));
    }
    let path = Path::new(name);
    if !path.is_file() {
        return Err(CliError::Usage(format!(
            "unknown maneuver `{name}`: expected one of {} or a sample file",
            BUILTIN_NAMES.join(", ")
        )));
    }
    read_samples(path).map(ManeuverSource::Sampled)
}

pub fn check_step(dt: f64) -> Result<f64, CliError> {
    if dt > 0.0 && dt.is_finite() {
        Ok(dt)
    } else {
        Err(CliError::Usage(format!("time step must be positive, got {dt}")))
    }
}

pub fn trajectory_spec(source: &ManeuverSource, dt: Option<f64>) -> Result<TrajectorySpec, CliError> {
    match source {
        ManeuverSource::Builtin(m) => Ok(TrajectorySpec::analytic(m.clone(), check_step(dt.unwrap_or(DEFAULT_DT))?)?),
        ManeuverSource::Sampled(c) => {
            if let Some(dt) = dt {
                let own = c.x_g.grid.dt;
                if (check_step(dt)? - own).abs() > 1e-9 * own {
                    return Err(CliError::Usage(format!("--dt {dt} differs from the sample spacing {own}")));
                }
            }
            Ok(TrajectorySpec::sampled(c.clone())?)
        }
    }
}

fn open_table(path: &Path) -> Result<csv::Reader<fs::File>, CliError> {
    let file = fs::File::open(path).map_err(|source| CliError::Read { path: path.into(), source })?;
    Ok(csv::ReaderBuilder::new().trim(csv::Trim::All).comment(Some(b'#')).from_reader(file))
}

fn table_error(path: &Path, row: usize, message: impl Into<String>) -> CliError {
    CliError::Table { path: path.into(), row, message: message.into() }
}

/// Reads every row of `path` as numbers in the order of `columns`, which
/// must all appear in the header. Row numbers in errors count the header as 1.
fn read_columns(path: &Path, columns: &[&str]) -> Result<Vec<Vec<f64>>, CliError> {
    let mut reader = open_table(path)?;
    let header = reader.headers().map_err(|e| table_error(path, 1, e.to_string()))?.clone();
    let index = columns
        .iter()
        .map(|c| {
            header.iter().position(|h| h == *c).ok_or_else(|| table_error(path, 1, format!("missing column `{c}`")))
        })
        .collect::<Result<Vec<_>, _>>()?;
    let mut rows = Vec::new();
    for (i, record) in reader.records().enumerate() {
        let row = i + 2;
        let record = record.map_err(|e| table_error(path, row, e.to_string()))?;
        let values = index
            .iter()
            .zip(columns)
            .map(|(&k, c)| {
                let field = record.get(k).unwrap_or("");
                field.parse::<f64>().map_err(|_| table_error(path, row, format!("`{c}` is not a number: `{field}`")))
            })
            .collect::<Result<Vec<_>, _>>()?;
        rows.push(values);
    }
    Ok(rows)
}

/// Uniform grid through the given times.
fn grid_of(path: &Path, times: &[f64]) -> Result<UniformGrid, CliError> {
    if times.len() < 2 {
        return Err(table_error(path, 1, "need at least two rows"));
    }
    let dt = times[1] - times[0];
    let grid = UniformGrid::new(times[0], dt, times.len()).map_err(|e| table_error(path, 2, e.to_string()))?;
    for (n, &t) in times.iter().enumerate() {
        if (t - grid.time(n)).abs() > 1e-6 * dt {
            return Err(table_error(path, n + 2, format!("time {t} breaks the uniform spacing {dt}")));
        }
    }
    Ok(grid)
}

/// Sample file: header `t,x_g,y_g,z_g,phi`, uniform `t`, SI units, `phi` in rad.
pub fn read_samples(path: &Path) -> Result<SampledConstraints, CliError> {
    let rows = read_columns(path, &SAMPLE_HEADER)?;
    let times: Vec<f64> = rows.iter().map(|r| r[0]).collect();
    let grid = grid_of(path, &times)?;
    let column = |k: usize| {
        SampledSignal::new(grid, rows.iter().map(|r| r[k]).collect()).map_err(|e| table_error(path, 1, e.to_string()))
    };
    Ok(SampledConstraints { x_g: column(1)?, y_g: column(2)?, z_g: column(3)?, phi: column(4)? })
}

/// Initial state, ground position and controls from a time-history file.
#[derive(Debug, Clone)]
pub struct ReplayInput {
    pub initial: FlightState,
    pub position: [f64; 3],
    pub controls: ControlHistory,
}

pub fn read_history(path: &Path, units: AngleUnit) -> Result<ReplayInput, CliError> {
    let columns: Vec<&str> = HISTORY_HEADER.iter().copied().filter(|c| *c != "flags").collect();
    let rows = read_columns(path, &columns)?;
    let col = |name: &str| columns.iter().position(|c| *c == name).expect("known column");
    let times: Vec<f64> = rows.iter().map(|r| r[col("t")]).collect();
    let grid = grid_of(path, &times)?;
    let angle = |r: &Vec<f64>, name: &str| units.to_rad(r[col(name)]);

    let first = &rows[0];
    let initial = FlightState {
        t: first[col("t")],
        v: first[col("V")],
        alpha: angle(first, "alpha_proc"),
        beta: angle(first, "beta"),
        p: angle(first, "p"),
        q: angle(first, "q"),
        r: angle(first, "r"),
        phi: angle(first, "phi"),
        theta: angle(first, "theta"),
        psi: angle(first, "psi"),
        ..Default::default()
    };
    let position = [first[col("x_g")], first[col("y_g")], first[col("z_g")]];
    let controls = rows
        .iter()
        .map(|r| ControlVector {
            delta_l: angle(r, "delta_l"),
            delta_m: angle(r, "delta_m"),
            delta_n: angle(r, "delta_n"),
            thrust: r[col("T")],
        })
        .collect();
    let controls = ControlHistory::new(grid, controls).map_err(|e| table_error(path, 1, e.to_string()))?;
    Ok(ReplayInput { initial, position, controls })
}
