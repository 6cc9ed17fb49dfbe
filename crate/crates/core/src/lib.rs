//! Perception-constrained model predictive control and cable-state
//! estimation for a quadrotor carrying a cable-suspended payload.
//!
//! The crate provides:
//!
//! - [`dynamics`]: the coupled vehicle–cable–payload model on SE(3) × S²,
//!   its analytic Jacobians, and manifold-projected RK4 integration;
//! - [`flatness`]: trajectory generation in the flat output space (payload
//!   position + yaw) and the exact map to full state/input references;
//! - [`pcmpc`]: the receding-horizon controller — multiple-shooting SQP with
//!   a dense active-set QP, hard input bounds, and softened field-of-view,
//!   accelerometer, and cable-tautness constraints;
//! - [`estimation`]: the cable direction/velocity EKF driven by motor-speed
//!   thrust inputs and pinhole tag detections;
//! - [`sim`]: a deterministic closed-loop simulator with synthetic sensors
//!   and CSV/JSON logging;
//! - [`metrics`]: tracking and estimation error statistics computed from
//!   simulation logs.

pub mod dynamics;
pub mod error;
pub mod estimation;
pub mod flatness;
pub mod math;
pub mod metrics;
pub mod pcmpc;
pub mod sim;

pub use error::{Error, Result};
