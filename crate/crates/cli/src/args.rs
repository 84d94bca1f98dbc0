use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

pub const DEFAULT_DT: f64 = 1e-4;

#[derive(Parser, Debug)]
#[command(name = "invsim", version, about = "Inverse simulation of prescribed fixed-wing aircraft maneuvers")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Recover the control histories that fly a maneuver
    Inverse(RunArgs),
    /// Fly the controls of a time-history file forward from its first row
    Forward(ForwardArgs),
    /// Inverse solve, then replay its controls forward and compare with the prescription
    Roundtrip(RoundtripArgs),
    /// Steady level cruise at one altitude and speed
    Trim(TrimArgs),
    /// Solve one maneuver at several step sizes and compare the controls
    Converge(ConvergeArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum)]
pub enum AngleUnit {
    #[default]
    Rad,
    Deg,
}

impl AngleUnit {
    pub fn from_rad(self, x: f64) -> f64 {
        match self {
            AngleUnit::Rad => x,
            AngleUnit::Deg => x.to_degrees(),
        }
    }

    pub fn to_rad(self, x: f64) -> f64 {
        match self {
            AngleUnit::Rad => x,
            AngleUnit::Deg => x.to_radians(),
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            AngleUnit::Rad => "rad",
            AngleUnit::Deg => "deg",
        }
    }
}

#[derive(Args, Debug, Clone)]
pub struct Common {
    /// Aircraft data as `key = value` lines; the built-in Mirage III data when omitted
    #[arg(long)]
    pub config: Option<PathBuf>,

    /// Output directory, created if missing
    #[arg(long, default_value = "out")]
    pub out: PathBuf,

    /// Unit of the angle and angular-rate columns
    #[arg(long, value_enum, default_value_t = AngleUnit::Rad)]
    pub angles: AngleUnit,
}

#[derive(Args, Debug, Clone)]
pub struct RunArgs {
    #[command(flatten)]
    pub common: Common,

    /// Built-in maneuver name or a sample file with columns t,x_g,y_g,z_g,phi
    #[arg(long, default_value = "mirage-roll")]
    pub maneuver: String,

    /// Time step in seconds (defaults to 1e-4; sample files use their own spacing)
    #[arg(long)]
    pub dt: Option<f64>,
}

#[derive(Args, Debug, Clone)]
pub struct ForwardArgs {
    #[command(flatten)]
    pub common: Common,

    /// Time-history file written by `inverse`, in the units given by `--angles`
    #[arg(long)]
    pub controls: PathBuf,
}

#[derive(Args, Debug, Clone)]
pub struct RoundtripArgs {
    #[command(flatten)]
    pub run: RunArgs,

    /// Replay with the rudder held at zero (negative control)
    #[arg(long)]
    pub zero_rudder: bool,
}

#[derive(Args, Debug, Clone)]
pub struct TrimArgs {
    #[arg(long)]
    pub config: Option<PathBuf>,

    /// Altitude above sea level, m
    #[arg(long, default_value_t = 10_000.0)]
    pub altitude: f64,

    /// True airspeed, m/s
    #[arg(long, default_value_t = 200.0)]
    pub speed: f64,
}

#[derive(Args, Debug, Clone)]
pub struct ConvergeArgs {
    #[command(flatten)]
    pub common: Common,

    /// Built-in maneuver name
    #[arg(long, default_value = "mirage-roll")]
    pub maneuver: String,

    /// Comma-separated step sizes in seconds
    #[arg(long = "dt-list", value_delimiter = ',', required = true)]
    pub dt_list: Vec<f64>,
}
