//! Coupled quadrotor–payload dynamics on SE(3) × S².
//!
//! State: payload position/velocity, cable direction ξ on the unit sphere and
//! its rate ξ̇, and the vehicle attitude quaternion. Input: collective thrust
//! and body angular velocity. The payload hangs taut below the vehicle;
//! ξ points from the robot body origin to the cable attach point, so
//! ξ = (0, 0, -1) when the payload hangs straight down (z up).

mod jacobian;

pub use jacobian::dynamics_jacobians;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::math::{self, Mat3, Vec3, Vec4};

/// Number of state entries: payload position/velocity, ξ, ξ̇, quaternion.
pub const NX: usize = 16;
/// Number of input entries: thrust plus three body rates.
pub const NU: usize = 4;

pub type StateVec = nalgebra::SVector<f64, NX>;
pub type InputVec = nalgebra::SVector<f64, NU>;
pub type StateMat = nalgebra::SMatrix<f64, NX, NX>;
pub type InputMat = nalgebra::SMatrix<f64, NX, NU>;

/// Physical constants of the vehicle–cable–payload assembly.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SystemParams {
    /// Robot mass (kg).
    pub m_q: f64,
    /// Payload mass (kg).
    pub m_l: f64,
    /// Cable length (m).
    pub l: f64,
    /// Robot inertia (kg·m²); carried for completeness, the body-rate input
    /// model never consults it.
    pub inertia: Mat3,
    /// Gravity (m/s²).
    pub g: f64,
    /// Motor thrust constant (N·s²/rad²), thrust per motor = k_f ω².
    pub k_f: f64,
}

impl Default for SystemParams {
    fn default() -> Self {
        SystemParams {
            m_q: 0.25,
            m_l: 0.075,
            l: 0.5,
            inertia: Mat3::from_diagonal(&Vec3::new(2.0e-4, 2.0e-4, 3.5e-4)),
            g: 9.81,
            k_f: 2.0e-7,
        }
    }
}

impl SystemParams {
    pub fn total_mass(&self) -> f64 {
        self.m_q + self.m_l
    }

    /// Thrust that holds the whole assembly in hover.
    pub fn hover_thrust(&self) -> f64 {
        self.total_mass() * self.g
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.m_q > 0.0 && self.m_l > 0.0 && self.l > 0.0 && self.g > 0.0 && self.k_f > 0.0) {
            return Err(Error::invalid("masses, cable length, g, k_f must be positive"));
        }
        if (self.inertia - self.inertia.transpose()).norm() > 1e-12 {
            return Err(Error::invalid("inertia must be symmetric"));
        }
        let eig = self.inertia.symmetric_eigenvalues();
        if eig.min() <= 0.0 {
            return Err(Error::invalid("inertia must be positive definite"));
        }
        Ok(())
    }
}

/// Full system state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SysState {
    /// Payload position in the inertial frame (m).
    pub x_l: Vec3,
    /// Payload velocity (m/s).
    pub v_l: Vec3,
    /// Cable direction, robot → attach point, unit length.
    pub xi: Vec3,
    /// Cable direction rate (1/s), tangent to the sphere: ξᵀξ̇ = 0.
    pub xi_dot: Vec3,
    /// Attitude quaternion, scalar-first, body → inertial.
    pub q: Vec4,
}

impl SysState {
    /// Hover state with the payload at `x_l`, cable straight down.
    pub fn hover(x_l: Vec3) -> Self {
        SysState {
            x_l,
            v_l: Vec3::zeros(),
            xi: Vec3::new(0.0, 0.0, -1.0),
            xi_dot: Vec3::zeros(),
            q: math::quat_identity(),
        }
    }

    pub fn to_vector(&self) -> StateVec {
        let mut v = StateVec::zeros();
        v.fixed_rows_mut::<3>(0).copy_from(&self.x_l);
        v.fixed_rows_mut::<3>(3).copy_from(&self.v_l);
        v.fixed_rows_mut::<3>(6).copy_from(&self.xi);
        v.fixed_rows_mut::<3>(9).copy_from(&self.xi_dot);
        v.fixed_rows_mut::<4>(12).copy_from(&self.q);
        v
    }

    pub fn from_vector(v: &StateVec) -> Self {
        SysState {
            x_l: v.fixed_rows::<3>(0).into_owned(),
            v_l: v.fixed_rows::<3>(3).into_owned(),
            xi: v.fixed_rows::<3>(6).into_owned(),
            xi_dot: v.fixed_rows::<3>(9).into_owned(),
            q: v.fixed_rows::<4>(12).into_owned(),
        }
    }

    pub fn is_finite(&self) -> bool {
        self.to_vector().iter().all(|x| x.is_finite())
    }

    /// Largest violation of the manifold invariants ‖ξ‖=1, ξᵀξ̇=0, ‖q‖=1.
    pub fn manifold_violation(&self) -> f64 {
        let e_xi = (self.xi.norm() - 1.0).abs();
        let e_tan = self.xi.dot(&self.xi_dot).abs();
        let e_q = (self.q.norm() - 1.0).abs();
        e_xi.max(e_tan).max(e_q)
    }

    /// Renormalize ξ and q, project ξ̇ onto the tangent space at ξ.
    pub fn project_manifold(&mut self) {
        let n_xi = self.xi.norm();
        if n_xi > 0.0 {
            self.xi /= n_xi;
        }
        self.xi_dot = math::project_tangent(&self.xi, &self.xi_dot);
        let n_q = self.q.norm();
        if n_q > 0.0 {
            self.q /= n_q;
        }
    }

    /// Attitude as a rotation matrix (raw quaternion components).
    pub fn rotation(&self) -> Mat3 {
        math::rotation_raw(&self.q)
    }
}

/// Collective thrust plus body angular velocity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ControlInput {
    /// Collective thrust along body z (N).
    pub f: f64,
    /// Body angular velocity (rad/s).
    pub omega: Vec3,
}

impl ControlInput {
    pub fn new(f: f64, omega: Vec3) -> Self {
        ControlInput { f, omega }
    }

    pub fn hover(params: &SystemParams) -> Self {
        ControlInput { f: params.hover_thrust(), omega: Vec3::zeros() }
    }

    pub fn to_vector(&self) -> InputVec {
        InputVec::from_column_slice(&[self.f, self.omega.x, self.omega.y, self.omega.z])
    }

    pub fn from_vector(v: &InputVec) -> Self {
        ControlInput { f: v[0], omega: Vec3::new(v[1], v[2], v[3]) }
    }

    pub fn is_finite(&self) -> bool {
        self.f.is_finite() && self.omega.iter().all(|x| x.is_finite())
    }
}

/// Time derivative of every [`SysState`] field.
#[derive(Debug, Clone, Copy)]
pub struct StateDerivative {
    pub x_l_dot: Vec3,
    pub v_l_dot: Vec3,
    pub xi_dot: Vec3,
    pub xi_ddot: Vec3,
    pub q_dot: Vec4,
}

impl StateDerivative {
    pub fn to_vector(&self) -> StateVec {
        let mut v = StateVec::zeros();
        v.fixed_rows_mut::<3>(0).copy_from(&self.x_l_dot);
        v.fixed_rows_mut::<3>(3).copy_from(&self.v_l_dot);
        v.fixed_rows_mut::<3>(6).copy_from(&self.xi_dot);
        v.fixed_rows_mut::<3>(9).copy_from(&self.xi_ddot);
        v.fixed_rows_mut::<4>(12).copy_from(&self.q_dot);
        v
    }
}

/// Continuous-time dynamics of the coupled system.
///
/// Payload translation:
///   (m_Q + m_L)(ẍ_L + g e₃) = (ξᵀ(f R e₃) − m_Q l ‖ξ̇‖²) ξ
/// Cable direction:
///   m_Q l ξ̈ = ξ × (ξ × f R e₃) − m_Q l ‖ξ̇‖² ξ
/// Attitude:
///   q̇ = ½ Λ(Ω) q
pub fn state_derivative(
    s: &SysState,
    u: &ControlInput,
    p: &SystemParams,
) -> Result<StateDerivative> {
    if !s.is_finite() || !u.is_finite() {
        return Err(Error::invalid("non-finite state or input"));
    }
    Ok(state_derivative_unchecked(s, u, p))
}

/// Same as [`state_derivative`] without the finiteness check; hot path for
/// integrators and sensitivity rollouts.
pub(crate) fn state_derivative_unchecked(
    s: &SysState,
    u: &ControlInput,
    p: &SystemParams,
) -> StateDerivative {
    let r = math::rotation_raw(&s.q);
    let thrust_w = u.f * (r * Vec3::z());
    let xi_dot_sq = s.xi_dot.norm_squared();
    let e3 = Vec3::z();

    let scale = (s.xi.dot(&thrust_w) - p.m_q * p.l * xi_dot_sq) / p.total_mass();
    let v_l_dot = scale * s.xi - p.g * e3;

    let xi_ddot = s.xi.cross(&s.xi.cross(&thrust_w)) / (p.m_q * p.l) - xi_dot_sq * s.xi;

    let q_dot = 0.5 * math::lambda(&u.omega) * s.q;

    StateDerivative { x_l_dot: s.v_l, v_l_dot, xi_dot: s.xi_dot, xi_ddot, q_dot }
}

/// Rotation matrix of `q` per the Hamilton body→inertial convention.
/// Renormalizes internally; ‖q‖ must be within 1e-6 of one.
pub fn quat_to_rotation(q: &Vec4) -> Result<Mat3> {
    let n = q.norm();
    if n < 1e-9 {
        return Err(Error::invalid("zero quaternion has no rotation"));
    }
    Ok(math::rotation_raw(&(q / n)))
}

/// Cable tension implied by a payload acceleration: T = m_L ‖a_L + g e₃‖.
pub fn cable_tension(a_l: &Vec3, p: &SystemParams) -> f64 {
    p.m_l * (a_l + p.g * Vec3::z()).norm()
}

/// Vehicle position from the payload position and cable direction:
/// x_Q = x_L − l ξ.
pub fn quadrotor_position(s: &SysState, p: &SystemParams) -> Vec3 {
    s.x_l - p.l * s.xi
}

/// True vehicle acceleration ẍ_Q = ẍ_L − l ξ̈ at the given state and input.
pub fn quadrotor_acceleration(s: &SysState, u: &ControlInput, p: &SystemParams) -> Vec3 {
    let d = state_derivative_unchecked(s, u, p);
    d.v_l_dot - p.l * d.xi_ddot
}

/// Classical RK4 step on the raw state vector, no manifold projection.
pub(crate) fn rk4_raw(s: &SysState, u: &ControlInput, p: &SystemParams, dt: f64) -> SysState {
    let f = |x: &SysState| state_derivative_unchecked(x, u, p).to_vector();
    let x0 = s.to_vector();
    let k1 = f(s);
    let k2 = f(&SysState::from_vector(&(x0 + 0.5 * dt * k1)));
    let k3 = f(&SysState::from_vector(&(x0 + 0.5 * dt * k2)));
    let k4 = f(&SysState::from_vector(&(x0 + dt * k3)));
    SysState::from_vector(&(x0 + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)))
}

/// RK4 integration step followed by manifold projection (ξ renormalized,
/// ξ̇ re-tangented, q renormalized).
pub fn integrate_step(
    s: &SysState,
    u: &ControlInput,
    p: &SystemParams,
    dt: f64,
) -> Result<SysState> {
    if dt <= 0.0 {
        return Err(Error::invalid("integration step must be positive"));
    }
    if !s.is_finite() || !u.is_finite() {
        return Err(Error::invalid("non-finite state or input"));
    }
    let mut next = rk4_raw(s, u, p, dt);
    next.project_manifold();
    Ok(next)
}
