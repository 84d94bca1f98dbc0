//! Aerodynamic coefficient build-up and dimensionalization.
//!
//! Lift is linear in angle of attack, drag follows a parabolic polar, and
//! side force is linear in sideslip. Moment coefficients are affine in the
//! three control deflections. Pitch is the longitudinal line (α, q, δm) and
//! roll/yaw are the lateral lines (β, p, r, δl, δn).

use log::warn;

use crate::model::AeroCoefficients;

/// Actual angle of attack beyond which the linear lift model is unreliable.
pub const STALL_ALPHA: f64 = 15.0 * std::f64::consts::PI / 180.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BodyForceCoefficients {
    pub c_x: f64,
    pub c_y: f64,
    pub c_z: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MomentCoefficients {
    /// Rolling moment coefficient.
    pub c_l: f64,
    /// Pitching moment coefficient.
    pub c_m: f64,
    /// Yawing moment coefficient.
    pub c_n: f64,
}

/// Body-axes aerodynamic forces (N) and moments (N·m).
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct AeroLoads {
    pub x: f64,
    pub y: f64,
    pub z: f64,
    pub l: f64,
    pub m: f64,
    pub n: f64,
}

/// Lift reference moved to the equilibrium point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EquilibriumReference {
    /// Lift coefficient that balances weight at the reference dynamic pressure.
    pub c_l0_equib: f64,
    pub alpha_equib: f64,
    pub alpha_zero_lift: f64,
}

impl EquilibriumReference {
    /// Offset added to the solver's angle of attack to obtain the actual one.
    pub fn alpha_offset(&self) -> f64 {
        self.alpha_equib - self.alpha_zero_lift.abs()
    }

    pub fn actual_alpha(&self, alpha_procedure: f64) -> f64 {
        alpha_procedure + self.alpha_offset()
    }

    /// Coefficients with `C_L0` replaced by the equilibrium value.
    pub fn shifted(&self, coeffs: &AeroCoefficients) -> AeroCoefficients {
        AeroCoefficients { c_l0: self.c_l0_equib, ..*coeffs }
    }
}

pub fn dynamic_pressure(rho: f64, v: f64) -> f64 {
    0.5 * rho * v * v
}

pub fn lift_coefficient(alpha: f64, coeffs: &AeroCoefficients) -> f64 {
    coeffs.c_l0 + coeffs.c_l_alpha * alpha
}

/// Returns true (and logs) when the actual angle of attack exceeds [`STALL_ALPHA`].
pub fn stall_warning(alpha_actual: f64) -> bool {
    let stalled = alpha_actual.abs() > STALL_ALPHA;
    if stalled {
        warn!(
            "angle of attack {:.2} deg is beyond the linear lift range",
            alpha_actual.to_degrees()
        );
    }
    stalled
}

pub fn drag_coefficient(c_l: f64, coeffs: &AeroCoefficients) -> f64 {
    coeffs.c_d0 + coeffs.k_cd * c_l * c_l
}

pub fn side_force_coefficient(beta: f64, coeffs: &AeroCoefficients) -> f64 {
    coeffs.c_y_beta * beta
}

/// Resolves drag, side force and lift (wind axes) onto the body axes.
pub fn body_force_coefficients(
    c_d: f64,
    c_c: f64,
    c_l: f64,
    alpha: f64,
    beta: f64,
) -> BodyForceCoefficients {
    let (sa, ca) = alpha.sin_cos();
    let (sb, cb) = beta.sin_cos();
    BodyForceCoefficients {
        c_x: -c_d * ca * cb - c_c * ca * sb + c_l * sa,
        c_y: -c_d * sb + c_c * cb,
        c_z: -c_d * sa * cb - c_c * sa * sb - c_l * ca,
    }
}

/// Wind-axes coefficients `(C_L, C_D, C_C)` at the given incidence.
pub fn wind_coefficients(alpha: f64, beta: f64, coeffs: &AeroCoefficients) -> (f64, f64, f64) {
    let c_l = lift_coefficient(alpha, coeffs);
    (c_l, drag_coefficient(c_l, coeffs), side_force_coefficient(beta, coeffs))
}

/// Full body-force coefficient build-up from incidence angles.
pub fn force_coefficients(alpha: f64, beta: f64, coeffs: &AeroCoefficients) -> BodyForceCoefficients {
    let (c_l, c_d, c_c) = wind_coefficients(alpha, beta, coeffs);
    body_force_coefficients(c_d, c_c, c_l, alpha, beta)
}

/// Moment coefficients. Lateral rate terms scale by `b/V`; the pitch-rate
/// term uses the bare pitch rate.
#[allow(clippy::too_many_arguments)]
pub fn moment_coefficients(
    alpha: f64,
    beta: f64,
    p: f64,
    q: f64,
    r: f64,
    v: f64,
    b: f64,
    delta_l: f64,
    delta_m: f64,
    delta_n: f64,
    coeffs: &AeroCoefficients,
) -> MomentCoefficients {
    let pb = p * b / v;
    let rb = r * b / v;
    MomentCoefficients {
        c_l: coeffs.c_roll_beta * beta
            + coeffs.c_roll_p * pb
            + coeffs.c_roll_r * rb
            + coeffs.c_roll_delta_l * delta_l
            + coeffs.c_roll_delta_n * delta_n,
        c_m: coeffs.c_m0 + coeffs.c_m_alpha * alpha + coeffs.c_m_q * q + coeffs.c_m_delta_m * delta_m,
        c_n: coeffs.c_n_beta * beta
            + coeffs.c_n_p * pb
            + coeffs.c_n_r * rb
            + coeffs.c_n_delta_l * delta_l
            + coeffs.c_n_delta_n * delta_n,
    }
}

/// Forces scale with `q̄S`, all three moments with `q̄Sd`.
pub fn dimensionalize(
    qbar: f64,
    s: f64,
    d: f64,
    force: &BodyForceCoefficients,
    moment: &MomentCoefficients,
) -> AeroLoads {
    let qs = qbar * s;
    AeroLoads {
        x: force.c_x * qs,
        y: force.c_y * qs,
        z: force.c_z * qs,
        l: moment.c_l * qs * d,
        m: moment.c_m * qs * d,
        n: moment.c_n * qs * d,
    }
}

pub fn equilibrium_reference(
    mass: f64,
    g: f64,
    qbar: f64,
    s: f64,
    c_l_alpha: f64,
    c_l0_actual: f64,
) -> EquilibriumReference {
    let c_l0_equib = mass * g / (qbar * s);
    EquilibriumReference {
        c_l0_equib,
        alpha_equib: c_l0_equib / c_l_alpha,
        alpha_zero_lift: -c_l0_actual / c_l_alpha,
    }
}
