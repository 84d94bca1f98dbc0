//! Angle, rate and velocity relations between the body, wind, local-level and
//! ground frames, with their explicit time derivatives.

use thiserror::Error;

use crate::numerics::Jet;

/// `|cos θ|` below which the Euler-rate map is treated as singular.
pub const GIMBAL_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Error)]
pub enum KinematicsError {
    #[error("pitch angle {theta} rad is at the Euler-angle singularity")]
    GimbalSingularity { theta: f64 },
    #[error("velocity magnitude is zero")]
    ZeroVelocity,
    #[error("flight path is vertical; heading of the velocity vector is undefined")]
    VerticalFlight,
    #[error("coefficient of {0} vanishes; the rate cannot be isolated")]
    DegenerateCoefficient(&'static str),
    #[error("no attitude satisfies the path relations for {0}")]
    NoSolution(&'static str),
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct AttitudeAngles {
    pub phi: f64,
    pub theta: f64,
    pub psi: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct PathAngles {
    pub theta_w: f64,
    pub psi_w: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct BodyRates {
    pub p: f64,
    pub q: f64,
    pub r: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct EulerRates {
    pub phi_dot: f64,
    pub theta_dot: f64,
    pub psi_dot: f64,
}

/// Speed and flight-path angles of the ground velocity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PathVelocity {
    pub v: f64,
    pub theta_w: f64,
    pub psi_w: f64,
}

pub fn body_rates_from_euler(phi: f64, theta: f64, rates: EulerRates) -> BodyRates {
    let (sp, cp) = phi.sin_cos();
    let (st, ct) = theta.sin_cos();
    let EulerRates { phi_dot, theta_dot, psi_dot } = rates;
    BodyRates {
        p: phi_dot - st * psi_dot,
        q: sp * ct * psi_dot + cp * theta_dot,
        r: cp * ct * psi_dot - sp * theta_dot,
    }
}

pub fn euler_rates_from_body(phi: f64, theta: f64, rates: BodyRates) -> Result<EulerRates, KinematicsError> {
    let (st, ct) = theta.sin_cos();
    if ct.abs() < GIMBAL_TOLERANCE {
        return Err(KinematicsError::GimbalSingularity { theta });
    }
    let (sp, cp) = phi.sin_cos();
    let BodyRates { p, q, r } = rates;
    let psi_dot = (q * sp + r * cp) / ct;
    Ok(EulerRates {
        phi_dot: p + st * psi_dot,
        theta_dot: q * cp - r * sp,
        psi_dot,
    })
}

/// Time derivative of the body rates given Euler angles, rates and
/// accelerations.
pub fn body_rate_derivatives(phi: f64, theta: f64, rates: EulerRates, accels: EulerRates) -> BodyRates {
    let (sp, cp) = phi.sin_cos();
    let (st, ct) = theta.sin_cos();
    let EulerRates { phi_dot: pd, theta_dot: td, psi_dot: sd } = rates;
    let EulerRates { phi_dot: pdd, theta_dot: tdd, psi_dot: sdd } = accels;
    BodyRates {
        p: pdd - ct * td * sd - st * sdd,
        q: cp * pd * ct * sd - sp * st * td * sd + sp * ct * sdd - sp * pd * td + cp * tdd,
        r: -sp * pd * ct * sd - cp * st * td * sd + cp * ct * sdd - cp * pd * td - sp * tdd,
    }
}

pub fn path_from_ground_velocity(x_dot: f64, y_dot: f64, z_dot: f64) -> Result<PathVelocity, KinematicsError> {
    let v = (x_dot * x_dot + y_dot * y_dot + z_dot * z_dot).sqrt();
    if v == 0.0 || !v.is_finite() {
        return Err(KinematicsError::ZeroVelocity);
    }
    let horizontal = x_dot.hypot(y_dot);
    if horizontal < GIMBAL_TOLERANCE * v {
        return Err(KinematicsError::VerticalFlight);
    }
    Ok(PathVelocity {
        v,
        theta_w: (-z_dot / v).clamp(-1.0, 1.0).asin(),
        psi_w: y_dot.atan2(x_dot),
    })
}

pub fn ground_velocity_from_path(v: f64, theta_w: f64, psi_w: f64) -> [f64; 3] {
    let (st, ct) = theta_w.sin_cos();
    let (sp, cp) = psi_w.sin_cos();
    [v * ct * cp, v * ct * sp, -v * st]
}

/// Right-hand side of the heading relation, `sin β cos φ − cos β sin α sin φ`.
fn heading_relation(alpha: Jet, beta: Jet, phi: Jet) -> Jet {
    beta.sin() * phi.cos() - beta.cos() * alpha.sin() * phi.sin()
}

/// Right-hand side of the elevation relation,
/// `cos β cos α sin θ − (sin β sin φ + cos β sin α cos φ) cos θ`.
fn elevation_relation(alpha: Jet, beta: Jet, phi: Jet, theta: Jet) -> Jet {
    let (sb, cb) = (beta.sin(), beta.cos());
    cb * alpha.cos() * theta.sin() - (sb * phi.sin() + cb * alpha.sin() * phi.cos()) * theta.cos()
}

/// `∂/∂θ` of [`elevation_relation`].
fn elevation_theta_partial(alpha: f64, beta: f64, phi: f64, theta: f64) -> f64 {
    let (sa, ca) = alpha.sin_cos();
    let (sb, cb) = beta.sin_cos();
    let (sp, cp) = phi.sin_cos();
    let (st, ct) = theta.sin_cos();
    cb * ca * ct + (sb * sp + cb * sa * cp) * st
}

/// Flight-path angles implied by the attitude and incidence angles.
pub fn path_angles_from_attitude(
    alpha: f64,
    beta: f64,
    phi: f64,
    theta: f64,
    psi: f64,
) -> Result<PathAngles, KinematicsError> {
    let c = Jet::constant;
    let sin_tw = elevation_relation(c(alpha), c(beta), c(phi), c(theta)).v;
    let theta_w = sin_tw.clamp(-1.0, 1.0).asin();
    let cos_tw = theta_w.cos();
    if cos_tw < GIMBAL_TOLERANCE {
        return Err(KinematicsError::VerticalFlight);
    }
    let s = heading_relation(c(alpha), c(beta), c(phi)).v / cos_tw;
    Ok(PathAngles { theta_w, psi_w: psi + s.clamp(-1.0, 1.0).asin() })
}

/// Attitude `(θ, ψ)` that places the velocity vector at the given path
/// angles for the given incidence and bank. The pitch branch inside
/// `[−π/2, π/2]` and the heading branch with `|ψw − ψ| ≤ π/2` are returned.
pub fn attitude_from_path(
    alpha: f64,
    beta: f64,
    phi: f64,
    path: PathAngles,
) -> Result<(f64, f64), KinematicsError> {
    if alpha == 0.0 && beta == 0.0 {
        return Ok((path.theta_w, path.psi_w));
    }
    let (sa, ca) = alpha.sin_cos();
    let (sb, cb) = beta.sin_cos();
    let (sp, cp) = phi.sin_cos();
    // sin θw = A sin θ − B cos θ = R sin(θ − δ)
    let a = cb * ca;
    let b = sb * sp + cb * sa * cp;
    let radius = a.hypot(b);
    let ratio = path.theta_w.sin() / radius;
    if radius == 0.0 || ratio.abs() > 1.0 {
        return Err(KinematicsError::NoSolution("pitch"));
    }
    let delta = b.atan2(a);
    let principal = delta + ratio.asin();
    let alternate = delta + std::f64::consts::PI - ratio.asin();
    let wrap = |x: f64| (x + std::f64::consts::PI).rem_euclid(std::f64::consts::TAU) - std::f64::consts::PI;
    let half_pi = std::f64::consts::FRAC_PI_2 + 1e-12;
    let theta = [wrap(principal), wrap(alternate)]
        .into_iter()
        .filter(|t| t.abs() <= half_pi)
        .min_by(|x, y| (x - path.theta_w).abs().total_cmp(&(y - path.theta_w).abs()))
        .ok_or(KinematicsError::NoSolution("pitch"))?;

    let cos_tw = path.theta_w.cos();
    if cos_tw < GIMBAL_TOLERANCE {
        return Err(KinematicsError::VerticalFlight);
    }
    let s = (sb * cp - cb * sa * sp) / cos_tw;
    if s.abs() > 1.0 {
        return Err(KinematicsError::NoSolution("heading"));
    }
    Ok((theta, path.psi_w - s.asin()))
}

/// Angles with the rates (and, where known, accelerations) needed by the
/// differentiated path relations.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AttitudeMotion {
    pub alpha: Jet,
    pub beta: Jet,
    pub phi: Jet,
    pub theta_w: Jet,
    pub psi_w: Jet,
}

fn heading_coefficient(theta_w: f64, psi_w: f64, psi: f64) -> Result<f64, KinematicsError> {
    let k = theta_w.cos() * (psi_w - psi).cos();
    if k.abs() < GIMBAL_TOLERANCE {
        Err(KinematicsError::DegenerateCoefficient("heading rate"))
    } else {
        Ok(k)
    }
}

fn pitch_coefficient(m: &AttitudeMotion, theta: f64) -> Result<f64, KinematicsError> {
    let k = elevation_theta_partial(m.alpha.v, m.beta.v, m.phi.v, theta);
    if k.abs() < GIMBAL_TOLERANCE {
        Err(KinematicsError::DegenerateCoefficient("pitch rate"))
    } else {
        Ok(k)
    }
}

/// `(θ̇, ψ̇)` from the first time derivative of the path relations. Only the
/// values and first derivatives of the inputs are used.
pub fn attitude_rates(m: &AttitudeMotion, theta: f64, psi: f64) -> Result<(f64, f64), KinematicsError> {
    let first = |j: Jet| Jet::new(j.v, j.d, 0.0);
    let (alpha, beta, phi) = (first(m.alpha), first(m.beta), first(m.phi));
    let (theta_w, psi_w) = (first(m.theta_w), first(m.psi_w));

    let k_psi = heading_coefficient(theta_w.v, psi_w.v, psi)?;
    let lhs = theta_w.cos() * (psi_w - Jet::constant(psi)).sin();
    let rhs = heading_relation(alpha, beta, phi);
    let psi_dot = (lhs.d - rhs.d) / k_psi;

    let k_theta = pitch_coefficient(m, theta)?;
    let lhs = theta_w.sin();
    let rhs = elevation_relation(alpha, beta, phi, Jet::constant(theta));
    let theta_dot = (lhs.d - rhs.d) / k_theta;

    Ok((theta_dot, psi_dot))
}

/// `(θ̈, ψ̈)` from the second time derivative of the path relations, given
/// the attitude and its rates.
pub fn attitude_accels(
    m: &AttitudeMotion,
    theta: f64,
    theta_dot: f64,
    psi: f64,
    psi_dot: f64,
) -> Result<(f64, f64), KinematicsError> {
    let k_psi = heading_coefficient(m.theta_w.v, m.psi_w.v, psi)?;
    let lhs = m.theta_w.cos() * (m.psi_w - Jet::new(psi, psi_dot, 0.0)).sin();
    let rhs = heading_relation(m.alpha, m.beta, m.phi);
    let psi_ddot = (lhs.dd - rhs.dd) / k_psi;

    let k_theta = pitch_coefficient(m, theta)?;
    let lhs = m.theta_w.sin();
    let rhs = elevation_relation(m.alpha, m.beta, m.phi, Jet::new(theta, theta_dot, 0.0));
    let theta_ddot = (lhs.dd - rhs.dd) / k_theta;

    Ok((theta_ddot, psi_ddot))
}

/// Body-axes velocity components `(u, v, w)`.
pub fn velocity_triplet(v: f64, alpha: f64, beta: f64) -> [f64; 3] {
    let (sa, ca) = alpha.sin_cos();
    let (sb, cb) = beta.sin_cos();
    [v * ca * cb, v * sb, v * sa * cb]
}

/// Inverse of [`velocity_triplet`]: `(V, α, β)`.
pub fn incidence_from_body_velocity(u: f64, v: f64, w: f64) -> Result<(f64, f64, f64), KinematicsError> {
    let speed = (u * u + v * v + w * w).sqrt();
    if speed == 0.0 || !speed.is_finite() {
        return Err(KinematicsError::ZeroVelocity);
    }
    Ok((speed, w.atan2(u), (v / speed).clamp(-1.0, 1.0).asin()))
}
