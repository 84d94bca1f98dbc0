//! Time-history, summary and convergence files.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use invsim::solver::{ConvergenceReport, SolutionHistory, StationRecord};

use crate::args::AngleUnit;
use crate::error::CliError;

pub const HISTORY_HEADER: [&str; 21] = [
    "t",
    "x_g",
    "y_g",
    "z_g",
    "V",
    "alpha_proc",
    "alpha_actual",
    "beta",
    "p",
    "q",
    "r",
    "phi",
    "theta",
    "psi",
    "theta_w",
    "psi_w",
    "delta_l",
    "delta_m",
    "delta_n",
    "T",
    "flags",
];

/// Nine significant digits; negative zero is written as zero.
pub fn number(x: f64) -> String {
    format!("{:.8e}", x + 0.0)
}

fn flags(r: &StationRecord) -> &'static str {
    match (r.flags.stall_warning, r.flags.reverse_thrust) {
        (false, false) => "none",
        (true, false) => "stall",
        (false, true) => "reverse_thrust",
        (true, true) => "stall;reverse_thrust",
    }
}

pub fn ensure_dir(dir: &Path) -> Result<(), CliError> {
    fs::create_dir_all(dir).map_err(|source| CliError::Write { path: dir.into(), source })
}

pub fn write_file(path: &Path, contents: &str) -> Result<(), CliError> {
    fs::write(path, contents).map_err(|source| CliError::Write { path: path.into(), source })
}

pub fn write_history(path: &Path, h: &SolutionHistory, units: AngleUnit) -> Result<(), CliError> {
    let io = |e: csv::Error| CliError::Write { path: path.into(), source: e.into() };
    let mut w = csv::Writer::from_path(path).map_err(io)?;
    w.write_record(HISTORY_HEADER).map_err(io)?;
    let a = |x: f64| number(units.from_rad(x));
    for (n, r) in h.records.iter().enumerate() {
        let s = &r.state;
        let [x, y, z] = r.position;
        let row = [
            number(s.t),
            number(x),
            number(y),
            number(z),
            number(s.v),
            a(s.alpha),
            a(h.alpha_actual(n)),
            a(s.beta),
            a(s.p),
            a(s.q),
            a(s.r),
            a(s.phi),
            a(s.theta),
            a(s.psi),
            a(s.theta_w),
            a(s.psi_w),
            a(s.delta_l),
            a(s.delta_m),
            a(s.delta_n),
            number(s.thrust),
            flags(r).to_string(),
        ];
        w.write_record(&row).map_err(io)?;
    }
    w.flush().map_err(|e| CliError::Write { path: path.into(), source: e })
}

/// Extremes of a solution history.
#[derive(Debug, Clone, PartialEq)]
pub struct Summary {
    pub stations: usize,
    pub dt: f64,
    pub max_thrust: f64,
    pub min_thrust: f64,
    pub max_abs_delta: [f64; 3],
    pub alpha_actual: (f64, f64),
    pub stall_stations: usize,
    pub reverse_thrust_stations: usize,
}

impl Summary {
    pub fn of(h: &SolutionHistory) -> Self {
        let n = h.records.len();
        let alpha = (0..n).map(|i| h.alpha_actual(i));
        Summary {
            stations: n,
            dt: h.grid.dt,
            max_thrust: h.max_by(|r| r.state.thrust),
            min_thrust: h.min_by(|r| r.state.thrust),
            max_abs_delta: [
                h.max_by(|r| r.state.delta_l.abs()),
                h.max_by(|r| r.state.delta_m.abs()),
                h.max_by(|r| r.state.delta_n.abs()),
            ],
            alpha_actual: alpha.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), a| (lo.min(a), hi.max(a))),
            stall_stations: h.records.iter().filter(|r| r.flags.stall_warning).count(),
            reverse_thrust_stations: h.records.iter().filter(|r| r.flags.reverse_thrust).count(),
        }
    }

    /// `key = value` lines; angles in `units`.
    pub fn render(&self, units: AngleUnit) -> String {
        let u = units.label();
        let a = |x: f64| number(units.from_rad(x));
        let mut out = String::new();
        let mut line = |k: &str, v: String| writeln!(out, "{k} = {v}").expect("write to string");
        line("stations", self.stations.to_string());
        line("dt_s", number(self.dt));
        line("max_thrust_N", number(self.max_thrust));
        line("min_thrust_N", number(self.min_thrust));
        line(&format!("max_abs_delta_l_{u}"), a(self.max_abs_delta[0]));
        line(&format!("max_abs_delta_m_{u}"), a(self.max_abs_delta[1]));
        line(&format!("max_abs_delta_n_{u}"), a(self.max_abs_delta[2]));
        line(&format!("min_alpha_actual_{u}"), a(self.alpha_actual.0));
        line(&format!("max_alpha_actual_{u}"), a(self.alpha_actual.1));
        line("stall_warning_stations", self.stall_stations.to_string());
        line("reverse_thrust_stations", self.reverse_thrust_stations.to_string());
        out
    }
}

/// Writes `<stem>.csv` and `<stem>_summary.txt` into `dir` and returns the
/// summary text.
pub fn write_solution(dir: &Path, stem: &str, h: &SolutionHistory, units: AngleUnit) -> Result<String, CliError> {
    ensure_dir(dir)?;
    write_history(&dir.join(format!("{stem}.csv")), h, units)?;
    let summary = Summary::of(h).render(units);
    write_file(&dir.join(format!("{stem}_summary.txt")), &summary)?;
    Ok(summary)
}

pub fn convergence_table(r: &ConvergenceReport) -> String {
    let mut out = String::from("dt_a,dt_b,delta_l,delta_m,delta_n,T,max\n");
    for p in &r.pairs {
        let [l, m, n, t] = p.relative;
        let fields = [p.dt_a, p.dt_b, l, m, n, t, p.max()].map(number);
        out.push_str(&fields.join(","));
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nine_significant_digits() {
        assert_eq!(number(-0.0), "0.00000000e0");
        assert_eq!(number(11_554.751844), "1.15547518e4");
        assert_eq!(number(-6.143074069e-3), "-6.14307407e-3");
    }

    #[test]
    fn angle_units() {
        assert_eq!(AngleUnit::Deg.from_rad(std::f64::consts::PI), 180.0);
        assert_eq!(AngleUnit::Deg.to_rad(180.0), std::f64::consts::PI);
        assert_eq!(AngleUnit::Rad.from_rad(0.3), 0.3);
    }
}
