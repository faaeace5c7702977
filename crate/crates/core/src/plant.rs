//! Discrete-time longitudinal kinematics for the ego and lead vehicles.
//!
//! Both vehicles are point masses on a straight road. The ego integrates a
//! commanded acceleration; the lead follows a fixed speed profile. Speeds are
//! clamped at zero — vehicles do not reverse — and when a braking step would
//! cross zero the position update is split at the exact stop instant so no
//! backward motion is ever integrated.

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Kinematic state of one vehicle.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VehicleState {
    /// Position along the road (m).
    pub x: f64,
    /// Speed (m/s); never negative.
    pub v: f64,
    /// Acceleration applied over the step that produced this state (m/s²).
    pub a: f64,
}

impl VehicleState {
    pub fn new(x: f64, v: f64) -> Self {
        VehicleState { x, v, a: 0.0 }
    }

    fn require_finite(&self) -> Result<(), PlantError> {
        for (quantity, value) in [("x", self.x), ("v", self.v), ("a", self.a)] {
            if !value.is_finite() {
                return Err(PlantError::NonFinite { quantity, value });
            }
        }
        Ok(())
    }
}

/// Speed profile driven by the lead vehicle, in m/s.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum LeadProfile {
    /// Constant speed `v0`.
    Constant { v0: f64 },
    /// `v(t) = v0 + amplitude * sin(angular_frequency * t)`.
    Sine {
        v0: f64,
        amplitude: f64,
        angular_frequency: f64,
    },
}

impl LeadProfile {
    /// Profile speed at absolute time `t`.
    pub fn speed_at(&self, t: f64) -> f64 {
        match *self {
            LeadProfile::Constant { v0 } => v0,
            LeadProfile::Sine {
                v0,
                amplitude,
                angular_frequency,
            } => v0 + amplitude * (angular_frequency * t).sin(),
        }
    }

    /// Rejects profiles that could drive the lead speed negative or that
    /// contain non-finite parameters.
    pub fn validate(&self) -> Result<(), PlantError> {
        match *self {
            LeadProfile::Constant { v0 } => {
                if !v0.is_finite() || v0 < 0.0 {
                    return Err(PlantError::InvalidProfile {
                        reason: format!("constant speed must be finite and >= 0, got {v0}"),
                    });
                }
            }
            LeadProfile::Sine {
                v0,
                amplitude,
                angular_frequency,
            } => {
                if ![v0, amplitude, angular_frequency]
                    .iter()
                    .all(|p| p.is_finite())
                {
                    return Err(PlantError::InvalidProfile {
                        reason: "sine profile parameters must be finite".into(),
                    });
                }
                if v0 < 0.0 || amplitude < 0.0 {
                    return Err(PlantError::InvalidProfile {
                        reason: format!(
                            "sine profile needs v0 >= 0 and amplitude >= 0, got v0={v0}, amplitude={amplitude}"
                        ),
                    });
                }
                if amplitude > v0 {
                    return Err(PlantError::InvalidProfile {
                        reason: format!(
                            "sine amplitude {amplitude} exceeds mean speed {v0}; lead speed would go negative"
                        ),
                    });
                }
            }
        }
        Ok(())
    }
}

#[derive(Debug, Error)]
pub enum PlantError {
    #[error("non-finite {quantity} in plant step: {value}")]
    NonFinite { quantity: &'static str, value: f64 },
    #[error("step size must be finite and positive, got {0}")]
    BadStep(f64),
    #[error("invalid lead profile: {reason}")]
    InvalidProfile { reason: String },
}

/// Advances the ego vehicle one step under commanded acceleration `a_cmd`.
///
/// Position integrates the commanded acceleration exactly over the step. If
/// braking would take the speed below zero, the vehicle stops at the point
/// where speed reaches zero and stays there for the remainder of the step.
pub fn step_ego(state: VehicleState, a_cmd: f64, dt: f64) -> Result<VehicleState, PlantError> {
    state.require_finite()?;
    if !a_cmd.is_finite() {
        return Err(PlantError::NonFinite {
            quantity: "a_cmd",
            value: a_cmd,
        });
    }
    if !dt.is_finite() || dt <= 0.0 {
        return Err(PlantError::BadStep(dt));
    }
    let v_end = state.v + a_cmd * dt;
    if v_end >= 0.0 {
        Ok(VehicleState {
            x: state.x + state.v * dt + 0.5 * a_cmd * dt * dt,
            v: v_end,
            a: a_cmd,
        })
    } else {
        // Speed crosses zero inside the step: advance only to the stop point.
        let t_stop = -state.v / a_cmd;
        Ok(VehicleState {
            x: state.x + state.v * t_stop + 0.5 * a_cmd * t_stop * t_stop,
            v: 0.0,
            a: a_cmd,
        })
    }
}

/// Advances the lead vehicle from time `t` to `t + dt` along its profile.
///
/// The new speed is taken from the profile at `t + dt`; position advances by
/// the trapezoidal integral of the speed over the step.
pub fn step_lead(
    t: f64,
    profile: &LeadProfile,
    state: VehicleState,
    dt: f64,
) -> Result<VehicleState, PlantError> {
    state.require_finite()?;
    if !t.is_finite() {
        return Err(PlantError::NonFinite {
            quantity: "t",
            value: t,
        });
    }
    if !dt.is_finite() || dt <= 0.0 {
        return Err(PlantError::BadStep(dt));
    }
    let v_new = profile.speed_at(t + dt);
    Ok(VehicleState {
        x: state.x + 0.5 * (state.v + v_new) * dt,
        v: v_new,
        a: (v_new - state.v) / dt,
    })
}
