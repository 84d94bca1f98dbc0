//! Aircraft and environment data, flight state records, and input validation.
//!
//! All angles are radians and all quantities SI. Degrees only appear at the
//! I/O boundary (the CLI).

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

/// Gravitational acceleration, m/s².
pub const G: f64 = 9.81;

/// Fixed atmospheric and gravitational constants for one run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FlightEnvironment {
    /// m/s²
    pub g: f64,
    /// Sea-level density, kg/m³.
    pub rho_sea_level: f64,
    /// Temperature lapse rate, K/m.
    pub lapse_rate: f64,
    /// Sea-level temperature, K.
    pub temperature_sea_level: f64,
    /// Specific gas constant of air, J/(kg·K).
    pub gas_constant: f64,
}

impl FlightEnvironment {
    pub const STANDARD: FlightEnvironment = FlightEnvironment {
        g: G,
        rho_sea_level: 1.225,
        lapse_rate: 0.0065,
        temperature_sea_level: 288.0,
        gas_constant: 287.0,
    };
}

impl Default for FlightEnvironment {
    fn default() -> Self {
        Self::STANDARD
    }
}

/// Moments and products of inertia about the body axes, kg·m².
///
/// `a`, `b`, `c` are the rolling, pitching and yawing moments; `d`, `e`, `f`
/// the products in the y–z, z–x and x–y planes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Inertia {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
    pub e: f64,
    pub f: f64,
}

impl Inertia {
    /// Determinant of the inertia system, `ABC − AD² − BE² − CF² − 2DEF`.
    pub fn t0(&self) -> f64 {
        let Inertia { a, b, c, d, e, f } = *self;
        a * b * c - a * d * d - b * e * e - c * f * f - 2.0 * d * e * f
    }
}

/// Aerodynamic, stability and control coefficients. Per-radian where the
/// derivative is taken with respect to an angle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AeroCoefficients {
    pub c_l0: f64,
    pub c_l_alpha: f64,
    pub c_d0: f64,
    pub k_cd: f64,
    pub c_y_beta: f64,

    pub c_m0: f64,
    pub c_m_alpha: f64,
    pub c_m_q: f64,
    pub c_m_delta_m: f64,

    pub c_roll_beta: f64,
    pub c_roll_p: f64,
    pub c_roll_r: f64,
    pub c_roll_delta_l: f64,
    pub c_roll_delta_n: f64,

    pub c_n_beta: f64,
    pub c_n_p: f64,
    pub c_n_r: f64,
    pub c_n_delta_l: f64,
    pub c_n_delta_n: f64,
}

impl AeroCoefficients {
    /// Determinant of the lateral control matrix `[[Clδl, Clδn], [Cnδl, Cnδn]]`.
    pub fn lateral_control_determinant(&self) -> f64 {
        self.c_roll_delta_l * self.c_n_delta_n - self.c_roll_delta_n * self.c_n_delta_l
    }
}

/// Mass, inertia, reference geometry and aerodynamics of a rigid aircraft.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AircraftConfig {
    /// kg
    pub mass: f64,
    pub inertia: Inertia,
    /// Wing projected area, m².
    pub wing_area: f64,
    /// Reference length for lateral derivatives, m.
    pub lateral_ref_length: f64,
    /// Reference length for longitudinal derivatives, m. Also the moment arm
    /// used to dimensionalize all three moment coefficients.
    pub longitudinal_ref_length: f64,
    pub aero: AeroCoefficients,
}

impl AircraftConfig {
    /// Dassault Mirage-III data set used for the continuous-roll case.
    pub fn mirage_iii() -> Self {
        AircraftConfig {
            mass: 7400.0,
            inertia: Inertia {
                a: 90_000.0,
                b: 54_000.0,
                c: 60_000.0,
                d: 0.0,
                e: 1_800.0,
                f: 0.0,
            },
            wing_area: 36.0,
            lateral_ref_length: 5.25,
            longitudinal_ref_length: 5.25,
            aero: AeroCoefficients {
                c_l0: 0.0,
                c_l_alpha: 2.204,
                c_d0: 0.015,
                k_cd: 0.4,
                c_y_beta: -0.60,
                c_m0: 0.0,
                c_m_alpha: -0.17,
                c_m_q: -0.4,
                c_m_delta_m: -0.45,
                c_roll_beta: -0.05,
                c_roll_p: -0.25,
                c_roll_r: 0.06,
                c_roll_delta_l: -0.30,
                c_roll_delta_n: 0.018,
                c_n_beta: 0.15,
                c_n_p: 0.055,
                c_n_r: -0.7,
                c_n_delta_l: 0.0,
                c_n_delta_n: -0.085,
            },
        }
    }

    /// Weight, N.
    pub fn weight(&self, env: &FlightEnvironment) -> f64 {
        self.mass * env.g
    }
}

/// One violated invariant of an [`AircraftConfig`].
#[derive(Debug, Clone, PartialEq, Error)]
pub enum ConfigError {
    #[error("mass must be positive, got {0}")]
    NonPositiveMass(f64),
    #[error("moment of inertia {name} must be positive, got {value}")]
    NonPositiveInertia { name: &'static str, value: f64 },
    #[error("reference geometry {name} must be positive, got {value}")]
    NonPositiveGeometry { name: &'static str, value: f64 },
    #[error("inertia system is singular (T0 = {0})")]
    SingularInertia(f64),
    #[error("lateral control matrix is singular (determinant = {0})")]
    SingularControlMatrix(f64),
    #[error("lift slope must be positive, got {0}")]
    NonPositiveLiftSlope(f64),
    #[error("{name} must be non-negative, got {value}")]
    NegativeDragTerm { name: &'static str, value: f64 },
    #[error("pitch control derivative C_mdm must be nonzero")]
    ZeroPitchControl,
    #[error("{name} is not finite")]
    NonFinite { name: &'static str },
}

/// Every invariant violated by a configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct InvalidConfig(pub Vec<ConfigError>);

impl fmt::Display for InvalidConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "invalid aircraft configuration:")?;
        for err in &self.0 {
            write!(f, " {err};")?;
        }
        Ok(())
    }
}

impl std::error::Error for InvalidConfig {}

/// Relative tolerance below which `T0` or the control determinant count as zero.
const SINGULAR_RTOL: f64 = 1e-12;

/// Checks every invariant of the configuration and reports all violations.
pub fn validate_config(cfg: &AircraftConfig) -> Result<(), InvalidConfig> {
    let mut errors = Vec::new();

    for (name, value) in config_fields(cfg) {
        if !value.is_finite() {
            errors.push(ConfigError::NonFinite { name });
        }
    }
    if !errors.is_empty() {
        return Err(InvalidConfig(errors));
    }

    if cfg.mass <= 0.0 {
        errors.push(ConfigError::NonPositiveMass(cfg.mass));
    }
    let i = &cfg.inertia;
    for (name, value) in [("A", i.a), ("B", i.b), ("C", i.c)] {
        if value <= 0.0 {
            errors.push(ConfigError::NonPositiveInertia { name, value });
        }
    }
    for (name, value) in [
        ("S", cfg.wing_area),
        ("b", cfg.lateral_ref_length),
        ("d", cfg.longitudinal_ref_length),
    ] {
        if value <= 0.0 {
            errors.push(ConfigError::NonPositiveGeometry { name, value });
        }
    }
    let t0 = i.t0();
    if t0.abs() <= SINGULAR_RTOL * (i.a * i.b * i.c).abs() {
        errors.push(ConfigError::SingularInertia(t0));
    }

    let aero = &cfg.aero;
    if aero.c_l_alpha <= 0.0 {
        errors.push(ConfigError::NonPositiveLiftSlope(aero.c_l_alpha));
    }
    if aero.c_d0 < 0.0 {
        errors.push(ConfigError::NegativeDragTerm { name: "C_D0", value: aero.c_d0 });
    }
    if aero.k_cd < 0.0 {
        errors.push(ConfigError::NegativeDragTerm { name: "K_CD", value: aero.k_cd });
    }
    let det = aero.lateral_control_determinant();
    let scale = (aero.c_roll_delta_l * aero.c_n_delta_n).abs()
        + (aero.c_roll_delta_n * aero.c_n_delta_l).abs();
    if det == 0.0 || det.abs() <= SINGULAR_RTOL * scale {
        errors.push(ConfigError::SingularControlMatrix(det));
    }
    if aero.c_m_delta_m == 0.0 {
        errors.push(ConfigError::ZeroPitchControl);
    }

    if errors.is_empty() {
        Ok(())
    } else {
        Err(InvalidConfig(errors))
    }
}

/// Key names used by the configuration file, paired with the field values.
fn config_fields(cfg: &AircraftConfig) -> [(&'static str, f64); 29] {
    let i = &cfg.inertia;
    let a = &cfg.aero;
    [
        ("m", cfg.mass),
        ("A", i.a),
        ("B", i.b),
        ("C", i.c),
        ("D", i.d),
        ("E", i.e),
        ("F", i.f),
        ("S", cfg.wing_area),
        ("b", cfg.lateral_ref_length),
        ("d", cfg.longitudinal_ref_length),
        ("C_L0", a.c_l0),
        ("C_Lalpha", a.c_l_alpha),
        ("C_D0", a.c_d0),
        ("K_CD", a.k_cd),
        ("C_Ybeta", a.c_y_beta),
        ("C_m0", a.c_m0),
        ("C_malpha", a.c_m_alpha),
        ("C_mq", a.c_m_q),
        ("C_mdm", a.c_m_delta_m),
        ("C_lbeta", a.c_roll_beta),
        ("C_lp", a.c_roll_p),
        ("C_lr", a.c_roll_r),
        ("C_ldl", a.c_roll_delta_l),
        ("C_ldn", a.c_roll_delta_n),
        ("C_nbeta", a.c_n_beta),
        ("C_np", a.c_n_p),
        ("C_nr", a.c_n_r),
        ("C_ndl", a.c_n_delta_l),
        ("C_ndn", a.c_n_delta_n),
    ]
}

fn field_mut<'a>(cfg: &'a mut AircraftConfig, key: &str) -> Option<&'a mut f64> {
    let i = &mut cfg.inertia;
    let a = &mut cfg.aero;
    Some(match key {
        "m" => &mut cfg.mass,
        "A" => &mut i.a,
        "B" => &mut i.b,
        "C" => &mut i.c,
        "D" => &mut i.d,
        "E" => &mut i.e,
        "F" => &mut i.f,
        "S" => &mut cfg.wing_area,
        "b" => &mut cfg.lateral_ref_length,
        "d" => &mut cfg.longitudinal_ref_length,
        "C_L0" => &mut a.c_l0,
        "C_Lalpha" => &mut a.c_l_alpha,
        "C_D0" => &mut a.c_d0,
        "K_CD" => &mut a.k_cd,
        "C_Ybeta" => &mut a.c_y_beta,
        "C_m0" => &mut a.c_m0,
        "C_malpha" => &mut a.c_m_alpha,
        "C_mq" => &mut a.c_m_q,
        "C_mdm" => &mut a.c_m_delta_m,
        "C_lbeta" => &mut a.c_roll_beta,
        "C_lp" => &mut a.c_roll_p,
        "C_lr" => &mut a.c_roll_r,
        "C_ldl" => &mut a.c_roll_delta_l,
        "C_ldn" => &mut a.c_roll_delta_n,
        "C_nbeta" => &mut a.c_n_beta,
        "C_np" => &mut a.c_n_p,
        "C_nr" => &mut a.c_n_r,
        "C_ndl" => &mut a.c_n_delta_l,
        "C_ndn" => &mut a.c_n_delta_n,
        _ => return None,
    })
}

/// Failure to read an aircraft configuration file.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum ParseError {
    #[error("line {line}: expected `key = value`, got `{text}`")]
    Malformed { line: usize, text: String },
    #[error("line {line}: unknown key `{key}`")]
    UnknownKey { line: usize, key: String },
    #[error("line {line}: key `{key}` already set on line {first}")]
    DuplicateKey { line: usize, key: String, first: usize },
    #[error("line {line}: key `{key}` has non-numeric value `{value}`")]
    BadNumber { line: usize, key: String, value: String },
    #[error("missing key `{0}`")]
    MissingKey(&'static str),
}

impl AircraftConfig {
    /// Writes the configuration in the key-value format read by [`FromStr`].
    pub fn to_config_string(&self) -> String {
        let mut out = String::new();
        for (key, value) in config_fields(self) {
            out.push_str(&format!("{key} = {value}\n"));
        }
        out
    }
}

/// Parses `key = value` lines. Blank lines and `#` comments are ignored;
/// every key must appear exactly once. Values are SI, angles in radians.
impl FromStr for AircraftConfig {
    type Err = ParseError;

    fn from_str(text: &str) -> Result<Self, Self::Err> {
        let mut cfg = AircraftConfig::mirage_iii();
        let mut seen: Vec<(String, usize)> = Vec::new();

        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let Some((key, value)) = content.split_once('=') else {
                return Err(ParseError::Malformed { line, text: raw.to_string() });
            };
            let (key, value) = (key.trim(), value.trim());
            if key.is_empty() {
                return Err(ParseError::Malformed { line, text: raw.to_string() });
            }
            if let Some((_, first)) = seen.iter().find(|(k, _)| k == key) {
                return Err(ParseError::DuplicateKey {
                    line,
                    key: key.to_string(),
                    first: *first,
                });
            }
            let slot = field_mut(&mut cfg, key)
                .ok_or_else(|| ParseError::UnknownKey { line, key: key.to_string() })?;
            *slot = value.parse::<f64>().map_err(|_| ParseError::BadNumber {
                line,
                key: key.to_string(),
                value: value.to_string(),
            })?;
            seen.push((key.to_string(), line));
        }

        for (key, _) in config_fields(&cfg) {
            if !seen.iter().any(|(k, _)| k == key) {
                return Err(ParseError::MissingKey(key));
            }
        }
        Ok(cfg)
    }
}

/// The 18 solved variables at one time station plus the auxiliary rates the
/// sequential solver carries between stations.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct FlightState {
    /// s
    pub t: f64,
    /// m/s
    pub v: f64,
    pub alpha: f64,
    pub beta: f64,
    pub p: f64,
    pub q: f64,
    pub r: f64,
    pub phi: f64,
    pub theta: f64,
    pub psi: f64,
    pub theta_w: f64,
    pub psi_w: f64,
    pub delta_l: f64,
    pub delta_m: f64,
    pub delta_n: f64,
    /// N
    pub thrust: f64,
    pub x_g_dot: f64,
    pub y_g_dot: f64,
    pub z_g_dot: f64,

    pub alpha_dot: f64,
    pub beta_dot: f64,
    pub theta_dot: f64,
    pub psi_dot: f64,
    /// N/s
    pub thrust_dot: f64,
}
