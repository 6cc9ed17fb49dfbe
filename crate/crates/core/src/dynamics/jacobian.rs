//! Hand-derived Jacobians of the continuous dynamics, validated against
//! central finite differences in the test suite. The SQP linearization calls
//! these every control cycle, so they must stay allocation-free.

use super::{ControlInput, InputMat, StateMat, SysState, SystemParams};
use crate::math::{self, Mat3, Vec3};

/// Analytic Jacobians (∂ẋ/∂x, ∂ẋ/∂u) of [`super::state_derivative`] at
/// `(s, u)`, taken on the raw state parameterization (quaternion and cable
/// direction are differentiated as free vectors).
pub fn dynamics_jacobians(
    s: &SysState,
    u: &ControlInput,
    p: &SystemParams,
) -> (StateMat, InputMat) {
    let mut a = StateMat::zeros();
    let mut b = InputMat::zeros();

    let e3 = Vec3::z();
    let r = math::rotation_raw(&s.q);
    let r_e3 = r * e3;
    let w = u.f * r_e3;
    let dw_dq = u.f * math::drotate_dq(&s.q, &e3);
    let m_total = p.total_mass();
    let c = 1.0 / (p.m_q * p.l);
    let xi = s.xi;
    let xi_dot = s.xi_dot;
    let xi_dot_sq = xi_dot.norm_squared();
    let scale = xi.dot(&w) - p.m_q * p.l * xi_dot_sq;

    // Row 0..3: d(x_L)/dt = v_L.
    a.fixed_view_mut::<3, 3>(0, 3).copy_from(&Mat3::identity());

    // Row 3..6: v̇_L = (s/M) ξ − g e₃ with s = ξᵀw − m_Q l ‖ξ̇‖².
    let dv_dxi = (xi * w.transpose() + scale * Mat3::identity()) / m_total;
    a.fixed_view_mut::<3, 3>(3, 6).copy_from(&dv_dxi);
    let dv_dxidot = xi * (-2.0 * p.m_q * p.l / m_total) * xi_dot.transpose();
    a.fixed_view_mut::<3, 3>(3, 9).copy_from(&dv_dxidot);
    let dv_dq = xi * (xi.transpose() * dw_dq) / m_total;
    a.fixed_view_mut::<3, 4>(3, 12).copy_from(&dv_dq);
    let dv_df = xi * xi.dot(&r_e3) / m_total;
    b.fixed_view_mut::<3, 1>(3, 0).copy_from(&dv_df);

    // Row 6..9: d(ξ)/dt = ξ̇.
    a.fixed_view_mut::<3, 3>(6, 9).copy_from(&Mat3::identity());

    // Row 9..12: ξ̈ = c (ξ (ξᵀw) − (ξᵀξ) w) − ‖ξ̇‖² ξ.
    let xtx = xi.norm_squared();
    let dxidd_dxi = c * (xi.dot(&w) * Mat3::identity() + xi * w.transpose()
        - 2.0 * w * xi.transpose())
        - xi_dot_sq * Mat3::identity();
    a.fixed_view_mut::<3, 3>(9, 6).copy_from(&dxidd_dxi);
    let dxidd_dxidot = -2.0 * xi * xi_dot.transpose();
    a.fixed_view_mut::<3, 3>(9, 9).copy_from(&dxidd_dxidot);
    let proj = xi * xi.transpose() - xtx * Mat3::identity();
    let dxidd_dq = c * proj * dw_dq;
    a.fixed_view_mut::<3, 4>(9, 12).copy_from(&dxidd_dq);
    let dxidd_df = c * proj * r_e3;
    b.fixed_view_mut::<3, 1>(9, 0).copy_from(&dxidd_df);

    // Row 12..16: q̇ = ½ Λ(Ω) q.
    let lam = math::lambda(&u.omega);
    a.fixed_view_mut::<4, 4>(12, 12).copy_from(&(0.5 * lam));
    let (qw, qx, qy, qz) = (s.q[0], s.q[1], s.q[2], s.q[3]);
    let dqdot_domega = 0.5
        * nalgebra::SMatrix::<f64, 4, 3>::new(
            -qx, -qy, -qz, //
            qw, -qz, qy, //
            qz, qw, -qx, //
            -qy, qx, qw,
        );
    b.fixed_view_mut::<4, 3>(12, 1).copy_from(&dqdot_domega);

    (a, b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::tests::{random_input, random_state};
    use crate::dynamics::{state_derivative, InputVec, StateVec, NU, NX};
    use approx::assert_relative_eq;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn fd_jacobians(
        s: &SysState,
        u: &ControlInput,
        p: &SystemParams,
        h: f64,
    ) -> (StateMat, InputMat) {
        let mut a = StateMat::zeros();
        let mut b = InputMat::zeros();
        let x0 = s.to_vector();
        let u0 = u.to_vector();
        for j in 0..NX {
            let mut xp = x0;
            let mut xm = x0;
            xp[j] += h;
            xm[j] -= h;
            let dp = state_derivative(&SysState::from_vector(&xp), u, p).unwrap().to_vector();
            let dm = state_derivative(&SysState::from_vector(&xm), u, p).unwrap().to_vector();
            a.set_column(j, &((dp - dm) / (2.0 * h)));
        }
        for j in 0..NU {
            let mut up = u0;
            let mut um = u0;
            up[j] += h;
            um[j] -= h;
            let dp = state_derivative(s, &ControlInput::from_vector(&up), p).unwrap().to_vector();
            let dm = state_derivative(s, &ControlInput::from_vector(&um), p).unwrap().to_vector();
            b.set_column(j, &((dp - dm) / (2.0 * h)));
        }
        (a, b)
    }

    #[test]
    fn velocity_block_is_identity() {
        let p = SystemParams::default();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let s = random_state(&mut rng);
        let u = random_input(&mut rng, &p);
        let (a, _) = dynamics_jacobians(&s, &u, &p);
        assert_relative_eq!(
            a.fixed_view::<3, 3>(0, 3).into_owned(),
            Mat3::identity(),
            epsilon = 1e-15
        );
    }

    #[test]
    fn hover_thrust_column_matches_hand_derivation() {
        let p = SystemParams::default();
        let s = SysState::hover(Vec3::new(0.0, 0.0, 1.0));
        let u = ControlInput::hover(&p);
        let (_, b) = dynamics_jacobians(&s, &u, &p);
        // ∂v̇_L/∂f = ξ(ξᵀRe₃)/(m_Q+m_L) = e₃/0.325 at hover.
        let col = b.fixed_view::<3, 1>(3, 0).into_owned();
        assert_relative_eq!(
            Vec3::new(col[0], col[1], col[2]),
            Vec3::new(0.0, 0.0, 1.0 / 0.325),
            epsilon = 1e-12
        );
    }

    #[test]
    fn jacobians_match_finite_differences() {
        let p = SystemParams::default();
        let mut rng = ChaCha8Rng::seed_from_u64(101);
        let mut worst = 0.0f64;
        for _ in 0..1000 {
            let s = random_state(&mut rng);
            let u = random_input(&mut rng, &p);
            let (a, b) = dynamics_jacobians(&s, &u, &p);
            let (a_fd, b_fd) = fd_jacobians(&s, &u, &p, 1e-6);
            let scale_a = a.amax().max(1.0);
            let scale_b = b.amax().max(1.0);
            let err_a = (a - a_fd).amax() / scale_a;
            let err_b = (b - b_fd).amax() / scale_b;
            worst = worst.max(err_a).max(err_b);
            assert!(err_a < 1e-4, "state jacobian mismatch {err_a}");
            assert!(err_b < 1e-4, "input jacobian mismatch {err_b}");
        }
        // Central differences on smooth polynomials should do much better
        // than the spec'd bound; catch silent degradation.
        assert!(worst < 1e-5, "worst-case relative error {worst}");
    }

    #[test]
    fn jacobians_are_deterministic() {
        let p = SystemParams::default();
        let mut rng = ChaCha8Rng::seed_from_u64(55);
        let s = random_state(&mut rng);
        let u = random_input(&mut rng, &p);
        let (a1, b1) = dynamics_jacobians(&s, &u, &p);
        let (a2, b2) = dynamics_jacobians(&s, &u, &p);
        assert_eq!(a1, a2);
        assert_eq!(b1, b2);
        let d1 = state_derivative(&s, &u, &p).unwrap().to_vector();
        let d2 = state_derivative(&s, &u, &p).unwrap().to_vector();
        assert_eq!(d1, d2);
    }

    // Quiet the unused-import warnings for items only used in some tests.
    #[allow(dead_code)]
    fn _types(_: StateVec, _: InputVec) {}
}
