//! Quaternion and small-vector utilities shared across the crate.
//!
//! Quaternions are Hamilton convention, scalar-first `[w, x, y, z]`, and
//! rotate body-frame vectors into the inertial frame. They are stored as raw
//! `Vector4` so the optimizer can treat the four components as plain states;
//! normalization is the caller's job.

use nalgebra::{Matrix3, Matrix4, SMatrix, Vector3, Vector4};

pub type Vec3 = Vector3<f64>;
pub type Vec4 = Vector4<f64>;
pub type Mat3 = Matrix3<f64>;
pub type Mat4 = Matrix4<f64>;

/// Skew-symmetric matrix such that `skew(a) * b == a.cross(&b)`.
pub fn skew(a: &Vec3) -> Mat3 {
    Mat3::new(0.0, -a.z, a.y, a.z, 0.0, -a.x, -a.y, a.x, 0.0)
}

/// Quaternion kinematics matrix, row layout:
///
/// ```text
///         |  0   -Ωx  -Ωy  -Ωz |
/// Λ(Ω) =  |  Ωx   0    Ωz  -Ωy |
///         |  Ωy  -Ωz   0    Ωx |
///         |  Ωz   Ωy  -Ωx   0  |
/// ```
///
/// so that `q_dot = 0.5 * Λ(Ω) * q` for body angular velocity Ω.
pub fn lambda(omega: &Vec3) -> Mat4 {
    let (x, y, z) = (omega.x, omega.y, omega.z);
    Mat4::new(
        0.0, -x, -y, -z, //
        x, 0.0, z, -y, //
        y, -z, 0.0, x, //
        z, y, -x, 0.0,
    )
}

/// Hamilton product `a ⊗ b`, scalar-first.
pub fn quat_mul(a: &Vec4, b: &Vec4) -> Vec4 {
    Vec4::new(
        a[0] * b[0] - a[1] * b[1] - a[2] * b[2] - a[3] * b[3],
        a[0] * b[1] + a[1] * b[0] + a[2] * b[3] - a[3] * b[2],
        a[0] * b[2] - a[1] * b[3] + a[2] * b[0] + a[3] * b[1],
        a[0] * b[3] + a[1] * b[2] - a[2] * b[1] + a[3] * b[0],
    )
}

pub fn quat_conj(q: &Vec4) -> Vec4 {
    Vec4::new(q[0], -q[1], -q[2], -q[3])
}

pub fn quat_identity() -> Vec4 {
    Vec4::new(1.0, 0.0, 0.0, 0.0)
}

/// Rotation matrix of a quaternion, evaluated on the raw (possibly
/// unnormalized) components. Valid as a rotation only for unit quaternions;
/// the raw form keeps analytic Jacobians consistent with finite differences.
pub fn rotation_raw(q: &Vec4) -> Mat3 {
    let (w, x, y, z) = (q[0], q[1], q[2], q[3]);
    Mat3::new(
        1.0 - 2.0 * (y * y + z * z),
        2.0 * (x * y - w * z),
        2.0 * (w * y + x * z),
        2.0 * (w * z + x * y),
        1.0 - 2.0 * (x * x + z * z),
        2.0 * (y * z - w * x),
        2.0 * (x * z - w * y),
        2.0 * (w * x + y * z),
        1.0 - 2.0 * (x * x + y * y),
    )
}

/// Jacobian of `rotation_raw(q) * v` with respect to the four raw quaternion
/// components, for a constant vector `v`. Shape 3x4.
pub fn drotate_dq(q: &Vec4, v: &Vec3) -> SMatrix<f64, 3, 4> {
    let (w, x, y, z) = (q[0], q[1], q[2], q[3]);
    let (vx, vy, vz) = (v.x, v.y, v.z);
    SMatrix::<f64, 3, 4>::new(
        -2.0 * z * vy + 2.0 * y * vz,
        2.0 * y * vy + 2.0 * z * vz,
        -4.0 * y * vx + 2.0 * x * vy + 2.0 * w * vz,
        -4.0 * z * vx - 2.0 * w * vy + 2.0 * x * vz,
        //
        2.0 * z * vx - 2.0 * x * vz,
        2.0 * y * vx - 4.0 * x * vy - 2.0 * w * vz,
        2.0 * x * vx + 2.0 * z * vz,
        2.0 * w * vx - 4.0 * z * vy + 2.0 * y * vz,
        //
        -2.0 * y * vx + 2.0 * x * vy,
        2.0 * z * vx + 2.0 * w * vy - 4.0 * x * vz,
        -2.0 * w * vx + 2.0 * z * vy - 4.0 * y * vz,
        2.0 * x * vx + 2.0 * y * vy,
    )
}

/// Quaternion from a rotation matrix (Shepperd's method), scalar-first with
/// non-negative scalar part.
pub fn quat_from_rotation(r: &Mat3) -> Vec4 {
    let trace = r[(0, 0)] + r[(1, 1)] + r[(2, 2)];
    let q = if trace > 0.0 {
        let s = (trace + 1.0).sqrt() * 2.0;
        Vec4::new(
            0.25 * s,
            (r[(2, 1)] - r[(1, 2)]) / s,
            (r[(0, 2)] - r[(2, 0)]) / s,
            (r[(1, 0)] - r[(0, 1)]) / s,
        )
    } else if r[(0, 0)] > r[(1, 1)] && r[(0, 0)] > r[(2, 2)] {
        let s = (1.0 + r[(0, 0)] - r[(1, 1)] - r[(2, 2)]).sqrt() * 2.0;
        Vec4::new(
            (r[(2, 1)] - r[(1, 2)]) / s,
            0.25 * s,
            (r[(0, 1)] + r[(1, 0)]) / s,
            (r[(0, 2)] + r[(2, 0)]) / s,
        )
    } else if r[(1, 1)] > r[(2, 2)] {
        let s = (1.0 + r[(1, 1)] - r[(0, 0)] - r[(2, 2)]).sqrt() * 2.0;
        Vec4::new(
            (r[(0, 2)] - r[(2, 0)]) / s,
            (r[(0, 1)] + r[(1, 0)]) / s,
            0.25 * s,
            (r[(1, 2)] + r[(2, 1)]) / s,
        )
    } else {
        let s = (1.0 + r[(2, 2)] - r[(0, 0)] - r[(1, 1)]).sqrt() * 2.0;
        Vec4::new(
            (r[(1, 0)] - r[(0, 1)]) / s,
            (r[(0, 2)] + r[(2, 0)]) / s,
            (r[(1, 2)] + r[(2, 1)]) / s,
            0.25 * s,
        )
    };
    if q[0] < 0.0 {
        -q
    } else {
        q
    }
}

/// Unit quaternion for a rotation of `angle` about `axis` (need not be unit).
pub fn quat_from_axis_angle(axis: &Vec3, angle: f64) -> Vec4 {
    let n = axis.norm();
    if n < 1e-15 {
        return quat_identity();
    }
    let half = 0.5 * angle;
    let u = axis / n;
    Vec4::new(half.cos(), u.x * half.sin(), u.y * half.sin(), u.z * half.sin())
}

/// Body angular velocity extracted from R and its time derivative:
/// `Ω = vee(Rᵀ Ṙ)`, antisymmetrized against numerical noise.
pub fn angular_velocity_from_rdot(r: &Mat3, r_dot: &Mat3) -> Vec3 {
    let s = r.transpose() * r_dot;
    let a = 0.5 * (s - s.transpose());
    Vec3::new(a[(2, 1)], a[(0, 2)], a[(1, 0)])
}

/// Component of `v` orthogonal to the unit vector `n`.
pub fn project_tangent(n: &Vec3, v: &Vec3) -> Vec3 {
    v - n * n.dot(v)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn lambda_matches_hamilton_product() {
        let q = Vec4::new(0.4, -0.3, 0.7, 0.5).normalize();
        let omega = Vec3::new(0.3, -1.2, 2.1);
        let via_lambda = 0.5 * lambda(&omega) * q;
        let via_product = 0.5 * quat_mul(&q, &Vec4::new(0.0, omega.x, omega.y, omega.z));
        assert_relative_eq!(via_lambda, via_product, epsilon = 1e-14);
    }

    #[test]
    fn rotation_matches_sandwich_product() {
        let q = Vec4::new(0.9, 0.1, -0.3, 0.2).normalize();
        let v = Vec3::new(0.3, -0.8, 1.1);
        let r = rotation_raw(&q);
        let vq = Vec4::new(0.0, v.x, v.y, v.z);
        let rotated = quat_mul(&quat_mul(&q, &vq), &quat_conj(&q));
        assert_relative_eq!(r * v, Vec3::new(rotated[1], rotated[2], rotated[3]), epsilon = 1e-13);
    }

    #[test]
    fn quat_from_rotation_round_trip() {
        for seed in 0..20 {
            let angle = 0.3 * seed as f64;
            let axis = Vec3::new(1.0, 0.5 * seed as f64, -0.2);
            let q = quat_from_axis_angle(&axis, angle);
            let r = rotation_raw(&q);
            let q2 = quat_from_rotation(&r);
            let sign = if q[0] < 0.0 { -1.0 } else { 1.0 };
            assert_relative_eq!(sign * q, q2, epsilon = 1e-12);
        }
    }

    #[test]
    fn drotate_dq_matches_finite_differences() {
        let q = Vec4::new(0.8, -0.2, 0.4, 0.1);
        let v = Vec3::new(0.5, -1.0, 2.0);
        let jac = drotate_dq(&q, &v);
        let h = 1e-7;
        for k in 0..4 {
            let mut qp = q;
            let mut qm = q;
            qp[k] += h;
            qm[k] -= h;
            let fd = (rotation_raw(&qp) * v - rotation_raw(&qm) * v) / (2.0 * h);
            assert_relative_eq!(jac.column(k).into_owned(), fd, epsilon = 1e-6);
        }
    }
}
