//! Troposphere air density as a function of the ground-axes vertical coordinate.
//!
//! `z_g` points down, so altitude is `-z_g`. The model covers sea level to
//! 11 km.

use thiserror::Error;

use crate::model::FlightEnvironment;

/// Upper altitude limit of the troposphere model, m.
pub const TROPOPAUSE_ALTITUDE: f64 = 11_000.0;

#[derive(Debug, Clone, Copy, PartialEq, Error)]
#[error("altitude {altitude} m is outside the troposphere model range [0, {TROPOPAUSE_ALTITUDE}] m")]
pub struct AltitudeOutOfRange {
    pub altitude: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DensitySample {
    /// m, negative above ground
    pub z_g: f64,
    /// kg/m³
    pub rho: f64,
}

fn check_range(z_g: f64) -> Result<(), AltitudeOutOfRange> {
    let altitude = -z_g;
    if (0.0..=TROPOPAUSE_ALTITUDE).contains(&altitude) {
        Ok(())
    } else {
        Err(AltitudeOutOfRange { altitude })
    }
}

/// Polytropic exponent `g / (lapse·R) − 1`.
fn exponent(env: &FlightEnvironment) -> f64 {
    env.g / (env.lapse_rate * env.gas_constant) - 1.0
}

fn base(z_g: f64, env: &FlightEnvironment) -> f64 {
    1.0 + env.lapse_rate / env.temperature_sea_level * z_g
}

/// Air density, kg/m³, at ground-axes height `z_g` (m).
pub fn density(z_g: f64, env: &FlightEnvironment) -> Result<f64, AltitudeOutOfRange> {
    check_range(z_g)?;
    Ok(env.rho_sea_level * base(z_g, env).powf(exponent(env)))
}

/// `dρ/dz_g`, kg/m⁴. Positive: density grows as `z_g` increases (descending).
pub fn density_gradient(z_g: f64, env: &FlightEnvironment) -> Result<f64, AltitudeOutOfRange> {
    check_range(z_g)?;
    let n = exponent(env);
    Ok(env.rho_sea_level
        * n
        * base(z_g, env).powf(n - 1.0)
        * (env.lapse_rate / env.temperature_sea_level))
}

pub fn sample(z_g: f64, env: &FlightEnvironment) -> Result<DensitySample, AltitudeOutOfRange> {
    Ok(DensitySample { z_g, rho: density(z_g, env)? })
}
