//! Translational equations in wind axes and rotational equations in body
//! axes, with the time derivatives the sequential solver needs.
//!
//! The wind-axes force balance is written with the weight separated from the
//! aerodynamic and propulsive forces. Thrust acts along the body `x` axis.

use thiserror::Error;

use crate::aero::{self, AeroLoads};
use crate::kinematics::BodyRates;
use crate::model::{AeroCoefficients, AircraftConfig, FlightEnvironment, Inertia};
use crate::numerics::Jet;

/// Magnitude below which a divisor in the force or moment balance counts as zero.
const DEGENERATE_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Error)]
pub enum DynamicsError {
    #[error("thrust axis is perpendicular to the velocity (cos α cos β = {0})")]
    DegenerateAxialProjection(f64),
    #[error("velocity magnitude is zero")]
    ZeroVelocity,
    #[error("sideslip at ±90 deg (cos β = {0})")]
    SideslipSingularity(f64),
    #[error("inertia system is singular")]
    SingularInertia,
    #[error("control effectiveness matrix is singular")]
    SingularControlMatrix,
    #[error("dynamic pressure must be positive to recover control deflections")]
    NoDynamicPressure,
}

/// Control deflections (rad) and thrust (N).
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ControlVector {
    pub delta_l: f64,
    pub delta_m: f64,
    pub delta_n: f64,
    pub thrust: f64,
}

/// Determinant and right-hand sides of the body-axes moment equations.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InertiaCouplings {
    pub t0: f64,
    pub t1: f64,
    pub t2: f64,
    pub t3: f64,
}

/// State entering the wind-axes force equations and their derivatives.
///
/// Rates are only read by the differentiated forms.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct WindAxesState {
    pub v: f64,
    pub v_dot: f64,
    pub v_ddot: f64,
    pub rho: f64,
    pub rho_dot: f64,
    pub alpha: f64,
    pub beta: f64,
    pub theta: f64,
    pub phi: f64,
    pub alpha_dot: f64,
    pub beta_dot: f64,
    pub theta_dot: f64,
    pub phi_dot: f64,
    pub p: f64,
    pub q: f64,
    pub r: f64,
    pub thrust: f64,
}

impl WindAxesState {
    fn qbar(&self) -> f64 {
        aero::dynamic_pressure(self.rho, self.v)
    }

    fn qbar_dot(&self) -> f64 {
        0.5 * self.rho_dot * self.v * self.v + self.rho * self.v * self.v_dot
    }

    fn jets(&self) -> (Jet, Jet, Jet, Jet) {
        (
            Jet::new(self.alpha, self.alpha_dot, 0.0),
            Jet::new(self.beta, self.beta_dot, 0.0),
            Jet::new(self.theta, self.theta_dot, 0.0),
            Jet::new(self.phi, self.phi_dot, 0.0),
        )
    }
}

/// Direction cosines of the downward vertical on the wind axes `(x_w, y_w, z_w)`.
fn gravity_cosines(alpha: Jet, beta: Jet, theta: Jet, phi: Jet) -> [Jet; 3] {
    let (sa, ca) = (alpha.sin(), alpha.cos());
    let (sb, cb) = (beta.sin(), beta.cos());
    let (st, ct) = (theta.sin(), theta.cos());
    let (sp, cp) = (phi.sin(), phi.cos());
    [
        ct * sp * sb - st * ca * cb + ct * cp * sa * cb,
        ct * sp * cb + st * ca * sb - sa * ct * cp * sb,
        st * sa + ct * cp * ca,
    ]
}

fn check_speed(v: f64) -> Result<(), DynamicsError> {
    if v.abs() < DEGENERATE_TOL || !v.is_finite() {
        Err(DynamicsError::ZeroVelocity)
    } else {
        Ok(())
    }
}

/// Thrust that satisfies the `x_w` force balance for the given speed rate.
pub fn thrust_from_force_balance(
    s: &WindAxesState,
    cfg: &AircraftConfig,
    env: &FlightEnvironment,
) -> Result<f64, DynamicsError> {
    let (sa, ca) = s.alpha.sin_cos();
    let (sb, cb) = s.beta.sin_cos();
    let axial = ca * cb;
    if axial.abs() < DEGENERATE_TOL {
        return Err(DynamicsError::DegenerateAxialProjection(axial));
    }
    let f = aero::force_coefficients(s.alpha, s.beta, &cfg.aero);
    let c = Jet::constant;
    let [gx, _, _] = gravity_cosines(c(s.alpha), c(s.beta), c(s.theta), c(s.phi));
    let m = cfg.mass;
    let aero_xw = s.qbar() * cfg.wing_area * (f.c_x * ca * cb + f.c_y * sb + f.c_z * sa * cb);
    Ok((m * s.v_dot - aero_xw - m * env.g * gx.v) / axial)
}

/// `β̇` from the `y_w` force balance.
pub fn sideslip_rate(s: &WindAxesState, cfg: &AircraftConfig, env: &FlightEnvironment) -> Result<f64, DynamicsError> {
    check_speed(s.v)?;
    let (sa, ca) = s.alpha.sin_cos();
    let (sb, cb) = s.beta.sin_cos();
    let f = aero::force_coefficients(s.alpha, s.beta, &cfg.aero);
    let c = Jet::constant;
    let [_, gy, _] = gravity_cosines(c(s.alpha), c(s.beta), c(s.theta), c(s.phi));
    let m = cfg.mass;
    let aero_yw = s.qbar() * cfg.wing_area * (f.c_y * cb - f.c_x * ca * sb - f.c_z * sa * sb);
    let rhs = m * env.g * gy.v - s.thrust * ca * sb + aero_yw + m * s.v * (-s.r * ca + s.p * sa);
    Ok(rhs / (m * s.v))
}

/// `α̇` from the `z_w` force balance.
pub fn aoa_rate(s: &WindAxesState, cfg: &AircraftConfig, env: &FlightEnvironment) -> Result<f64, DynamicsError> {
    check_speed(s.v)?;
    let (sa, ca) = s.alpha.sin_cos();
    let (sb, cb) = s.beta.sin_cos();
    if cb.abs() < DEGENERATE_TOL {
        return Err(DynamicsError::SideslipSingularity(cb));
    }
    let f = aero::force_coefficients(s.alpha, s.beta, &cfg.aero);
    let c = Jet::constant;
    let [_, _, gz] = gravity_cosines(c(s.alpha), c(s.beta), c(s.theta), c(s.phi));
    let m = cfg.mass;
    let qs = s.qbar() * cfg.wing_area;
    let rhs = m * env.g * gz.v + qs * f.c_z * ca - (s.thrust + qs * f.c_x) * sa
        + m * s.v * (s.q * cb - s.r * sb * sa - s.p * sb * ca);
    Ok(rhs / (m * s.v * cb))
}

/// Time derivative of the thrust required by the `x_w` balance.
pub fn thrust_rate(s: &WindAxesState, cfg: &AircraftConfig, env: &FlightEnvironment) -> Result<f64, DynamicsError> {
    let (alpha, beta, theta, phi) = s.jets();
    let axial = alpha.cos() * beta.cos();
    if axial.v.abs() < DEGENERATE_TOL {
        return Err(DynamicsError::DegenerateAxialProjection(axial.v));
    }
    let a = &cfg.aero;
    let c_l = aero::lift_coefficient(s.alpha, a);
    let c_d = aero::drag_coefficient(c_l, a);
    let c_d_dot = 2.0 * a.k_cd * c_l * a.c_l_alpha * s.alpha_dot;
    let [gx, _, _] = gravity_cosines(alpha, beta, theta, phi);
    let m = cfg.mass;
    let sw = cfg.wing_area;
    let numerator_dot = m * s.v_ddot + s.qbar_dot() * sw * c_d + s.qbar() * sw * c_d_dot - m * env.g * gx.d;
    Ok((numerator_dot - s.thrust * axial.d) / axial.v)
}

/// Inputs to the differentiated side and normal force balances that are not
/// part of [`WindAxesState`].
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ForceRateInputs {
    pub thrust_dot: f64,
    pub p_dot: f64,
    pub q_dot: f64,
    pub r_dot: f64,
}

/// `β̈` from the time derivative of the `y_w` balance.
pub fn sideslip_accel(
    s: &WindAxesState,
    extra: &ForceRateInputs,
    cfg: &AircraftConfig,
    env: &FlightEnvironment,
) -> Result<f64, DynamicsError> {
    check_speed(s.v)?;
    let (alpha, beta, theta, phi) = s.jets();
    let [_, gy, _] = gravity_cosines(alpha, beta, theta, phi);
    let a = &cfg.aero;
    let m = cfg.mass;
    let sw = cfg.wing_area;
    let thrust_proj = alpha.cos() * beta.sin();
    let c_c = aero::side_force_coefficient(s.beta, a);
    let (p, r) = (Jet::new(s.p, extra.p_dot, 0.0), Jet::new(s.r, extra.r_dot, 0.0));
    let turn = p * alpha.sin() - r * alpha.cos();

    let rhs_dot = m * env.g * gy.d - extra.thrust_dot * thrust_proj.v - s.thrust * thrust_proj.d
        + s.qbar_dot() * sw * c_c
        + s.qbar() * sw * a.c_y_beta * s.beta_dot
        + m * s.v_dot * turn.v
        + m * s.v * turn.d;
    Ok((rhs_dot - m * s.v_dot * s.beta_dot) / (m * s.v))
}

/// `α̈` from the time derivative of the `z_w` balance.
pub fn aoa_accel(
    s: &WindAxesState,
    extra: &ForceRateInputs,
    cfg: &AircraftConfig,
    env: &FlightEnvironment,
) -> Result<f64, DynamicsError> {
    check_speed(s.v)?;
    let (alpha, beta, theta, phi) = s.jets();
    let cb = beta.cos();
    if cb.v.abs() < DEGENERATE_TOL {
        return Err(DynamicsError::SideslipSingularity(cb.v));
    }
    let [_, _, gz] = gravity_cosines(alpha, beta, theta, phi);
    let a = &cfg.aero;
    let m = cfg.mass;
    let sw = cfg.wing_area;
    let c_l = aero::lift_coefficient(s.alpha, a);
    let (sa, ca) = (alpha.sin(), alpha.cos());
    let sb = beta.sin();
    let p = Jet::new(s.p, extra.p_dot, 0.0);
    let q = Jet::new(s.q, extra.q_dot, 0.0);
    let r = Jet::new(s.r, extra.r_dot, 0.0);
    let rot = q * cb - r * sb * sa - p * sb * ca;

    let rhs_dot = m * env.g * gz.d - s.qbar_dot() * sw * c_l - s.qbar() * sw * a.c_l_alpha * s.alpha_dot
        - extra.thrust_dot * sa.v
        - s.thrust * sa.d
        + m * s.v_dot * rot.v
        + m * s.v * rot.d;
    // d/dt (m V cos β) · α̇
    let lhs_known = m * (s.v_dot * cb.v + s.v * cb.d) * s.alpha_dot;
    Ok((rhs_dot - lhs_known) / (m * s.v * cb.v))
}

/// Coefficient matrix multiplying `(T1, T2, T3)` in the body-axes moment
/// equations, row per `(ṗ, q̇, ṙ)`.
pub fn inertia_coupling_matrix(i: &Inertia) -> [[f64; 3]; 3] {
    let Inertia { a, b, c, d, e, f } = *i;
    [
        [b * c - d * d, f * c + e * d, f * d - e * b],
        [f * c + e * d, a * c - e * e, a * d + e * f],
        [f * d + b * e, a * d + f * e, a * b - f * f],
    ]
}

/// Gyroscopic parts of `T1..T3` (everything except the applied moments).
fn gyroscopic_terms(i: &Inertia, w: &BodyRates) -> [f64; 3] {
    let Inertia { a, b, c, d, e, f } = *i;
    let BodyRates { p, q, r } = *w;
    [
        (b - c) * q * r + (e * q - f * r) * p + (q * q - r * r) * d,
        (c - a) * r * p + (f * r - d * p) * q + (r * r - p * p) * e,
        (a - b) * p * q + (d * p - e * q) * r + (p * p - q * q) * f,
    ]
}

pub fn inertia_couplings(i: &Inertia, w: &BodyRates, l: f64, m: f64, n: f64) -> InertiaCouplings {
    let g = gyroscopic_terms(i, w);
    InertiaCouplings { t0: i.t0(), t1: g[0] + l, t2: g[1] + m, t3: g[2] + n }
}

fn check_inertia(i: &Inertia) -> Result<f64, DynamicsError> {
    let t0 = i.t0();
    if t0.abs() <= 1e-12 * (i.a * i.b * i.c).abs() || !t0.is_finite() {
        Err(DynamicsError::SingularInertia)
    } else {
        Ok(t0)
    }
}

/// Angular accelerations from body rates and applied moments.
pub fn angular_accels_forward(
    w: &BodyRates,
    loads: &AeroLoads,
    inertia: &Inertia,
) -> Result<BodyRates, DynamicsError> {
    let t0 = check_inertia(inertia)?;
    let k = inertia_coupling_matrix(inertia);
    let tc = inertia_couplings(inertia, w, loads.l, loads.m, loads.n);
    let t = [tc.t1, tc.t2, tc.t3];
    let row = |i: usize| (k[i][0] * t[0] + k[i][1] * t[1] + k[i][2] * t[2]) / t0;
    Ok(BodyRates { p: row(0), q: row(1), r: row(2) })
}

/// Solves a 3×3 linear system by Gaussian elimination with partial pivoting.
fn solve3(mut m: [[f64; 3]; 3], mut rhs: [f64; 3]) -> Option<[f64; 3]> {
    let scale = m.iter().flatten().fold(0.0f64, |acc, x| acc.max(x.abs()));
    for col in 0..3 {
        let pivot = (col..3).max_by(|&a, &b| m[a][col].abs().total_cmp(&m[b][col].abs()))?;
        if m[pivot][col].abs() <= 1e-14 * scale {
            return None;
        }
        m.swap(col, pivot);
        rhs.swap(col, pivot);
        for row in col + 1..3 {
            let factor = m[row][col] / m[col][col];
            for k in col..3 {
                m[row][k] -= factor * m[col][k];
            }
            rhs[row] -= factor * rhs[col];
        }
    }
    let mut x = [0.0; 3];
    for row in (0..3).rev() {
        let tail: f64 = (row + 1..3).map(|k| m[row][k] * x[k]).sum();
        x[row] = (rhs[row] - tail) / m[row][row];
    }
    Some(x)
}

/// Flight condition needed to turn required moments into deflections.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ControlContext {
    pub alpha: f64,
    pub beta: f64,
    pub v: f64,
    pub qbar: f64,
    pub rates: BodyRates,
}

/// Applied moments `(L, M, N)` that produce the given angular accelerations.
pub fn moments_for_angular_accels(
    accels: &BodyRates,
    rates: &BodyRates,
    inertia: &Inertia,
) -> Result<[f64; 3], DynamicsError> {
    let t0 = check_inertia(inertia)?;
    let k = inertia_coupling_matrix(inertia);
    let rhs = [t0 * accels.p, t0 * accels.q, t0 * accels.r];
    let t = solve3(k, rhs).ok_or(DynamicsError::SingularInertia)?;
    let g = gyroscopic_terms(inertia, rates);
    Ok([t[0] - g[0], t[1] - g[1], t[2] - g[2]])
}

/// Deflections `(δl, δm, δn)` that produce the given angular accelerations.
/// The returned thrust field is zero.
pub fn controls_from_angular_accels(
    accels: &BodyRates,
    ctx: &ControlContext,
    cfg: &AircraftConfig,
) -> Result<ControlVector, DynamicsError> {
    let [l, m, n] = moments_for_angular_accels(accels, &ctx.rates, &cfg.inertia)?;
    let qsd = ctx.qbar * cfg.wing_area * cfg.longitudinal_ref_length;
    if !(qsd > 0.0) {
        return Err(DynamicsError::NoDynamicPressure);
    }
    check_speed(ctx.v)?;
    let a: &AeroCoefficients = &cfg.aero;
    let free = aero::moment_coefficients(
        ctx.alpha,
        ctx.beta,
        ctx.rates.p,
        ctx.rates.q,
        ctx.rates.r,
        ctx.v,
        cfg.lateral_ref_length,
        0.0,
        0.0,
        0.0,
        a,
    );
    let (need_l, need_m, need_n) = (l / qsd - free.c_l, m / qsd - free.c_m, n / qsd - free.c_n);

    if a.c_m_delta_m == 0.0 {
        return Err(DynamicsError::SingularControlMatrix);
    }
    let det = a.lateral_control_determinant();
    if det.abs() <= 1e-14 {
        return Err(DynamicsError::SingularControlMatrix);
    }
    Ok(ControlVector {
        delta_l: (need_l * a.c_n_delta_n - a.c_roll_delta_n * need_n) / det,
        delta_m: need_m / a.c_m_delta_m,
        delta_n: (a.c_roll_delta_l * need_n - a.c_n_delta_l * need_l) / det,
        thrust: 0.0,
    })
}

/// Aerodynamic moments for the given flight condition and deflections.
pub fn control_moments(ctx: &ControlContext, controls: &ControlVector, cfg: &AircraftConfig) -> AeroLoads {
    let mc = aero::moment_coefficients(
        ctx.alpha,
        ctx.beta,
        ctx.rates.p,
        ctx.rates.q,
        ctx.rates.r,
        ctx.v,
        cfg.lateral_ref_length,
        controls.delta_l,
        controls.delta_m,
        controls.delta_n,
        &cfg.aero,
    );
    let fc = aero::force_coefficients(ctx.alpha, ctx.beta, &cfg.aero);
    aero::dimensionalize(ctx.qbar, cfg.wing_area, cfg.longitudinal_ref_length, &fc, &mc)
}

/// Steady level cruise: lift balances weight, thrust balances drag.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CruiseTrim {
    pub thrust: f64,
    pub c_l: f64,
    pub c_d: f64,
}

pub fn cruise_trim(mass: f64, g: f64, rho: f64, v: f64, s: f64, coeffs: &AeroCoefficients) -> CruiseTrim {
    let qs = aero::dynamic_pressure(rho, v) * s;
    let c_l = mass * g / qs;
    let c_d = aero::drag_coefficient(c_l, coeffs);
    CruiseTrim { thrust: qs * c_d, c_l, c_d }
}
