//! Switched dual-PID ACC law.
//!
//! The controller runs one of two positional PID loops per step:
//!
//! * **speed mode** tracks the driver-set cruise speed, error `v_set - v_ego`;
//! * **space mode** restores the velocity-dependent safe gap, error
//!   `d_rel - d_safe` (negative while the gap is too small, so the output
//!   brakes).
//!
//! Mode selection looks at the switching errors `e_v = v_set - v_ego` and
//! `e_d = d_safe - d_rel`. The default rule activates space mode exactly
//! when the gap is unsafe (`e_d > 0`); an alternative latched rule uses two
//! one-sided triggers and leaves the no-trigger region to hysteresis.
//! On a mode switch the controller going off duty has its integral cleared so
//! stale windup cannot kick when it is next activated.

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Gains of one PID loop.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PidGains {
    pub kp: f64,
    pub ki: f64,
    pub kd: f64,
}

impl PidGains {
    pub fn new(kp: f64, ki: f64, kd: f64) -> Self {
        PidGains { kp, ki, kd }
    }

    fn validate(&self, which: &str) -> Result<(), ConfigError> {
        for (name, g) in [("kp", self.kp), ("ki", self.ki), ("kd", self.kd)] {
            if !g.is_finite() || g < 0.0 {
                return Err(ConfigError::Invalid(format!(
                    "{which}.{name} must be finite and >= 0, got {g}"
                )));
            }
        }
        Ok(())
    }
}

/// Mutable state of one PID loop.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct PidState {
    pub integral: f64,
    pub prev_error: f64,
}

/// Which loop drives the vehicle.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    Speed,
    Space,
}

impl Mode {
    /// Activation signal as recorded in traces: `+1` speed, `-1` space.
    pub fn signal(self) -> i8 {
        match self {
            Mode::Speed => 1,
            Mode::Space => -1,
        }
    }
}

/// How the activation signal is derived from the switching errors.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModeRule {
    /// Space mode exactly when the gap is unsafe (`e_d > 0`). Total: every
    /// input picks a mode, independent of history.
    GapThreshold,
    /// One-sided activation table: speed wants the wheel when `e_v < 0`,
    /// space when `e_d > 0`; space wins when both fire, and when neither
    /// fires the previous mode is kept.
    Latched,
}

/// Switching errors fed to mode selection.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SwitchSignals {
    /// `v_set - v_ego`: negative when the ego is above the set speed.
    pub e_v: f64,
    /// `d_safe - d_rel`: positive when the gap is unsafe.
    pub e_d: f64,
}

/// Static controller parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ControllerConfig {
    /// Cruise set speed (m/s).
    pub v_set: f64,
    /// Standstill component of the safe distance (m).
    pub d_default: f64,
    /// Time-gap component of the safe distance (s).
    pub t_gap: f64,
    pub speed_pid: PidGains,
    pub space_pid: PidGains,
    /// Symmetric clamp on each PID integral.
    pub windup_limit: f64,
    /// Acceleration saturation floor (m/s²), negative.
    pub a_min: f64,
    /// Acceleration saturation ceiling (m/s²), positive.
    pub a_max: f64,
    pub mode_rule: ModeRule,
}

impl ControllerConfig {
    /// Stock tuning for the given set speed.
    ///
    /// The speed loop is proportional-only: an integral term there makes the
    /// ego overshoot its set speed after a recovery, re-closing the gap it
    /// just opened and pinning the system on the safe-distance boundary. A
    /// first-order speed approach leaves the recovered margin in place. The
    /// gain sweep behind these values ships as the `tune_gains` example.
    pub fn defaults(v_set: f64) -> Self {
        ControllerConfig {
            v_set,
            d_default: 10.0,
            t_gap: 1.4,
            speed_pid: PidGains::new(0.5, 0.0, 0.0),
            space_pid: PidGains::new(0.5, 0.02, 0.4),
            windup_limit: 10.0,
            a_min: -2.0,
            a_max: 2.0,
            mode_rule: ModeRule::GapThreshold,
        }
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if !self.v_set.is_finite() || self.v_set < 0.0 {
            return Err(ConfigError::Invalid(format!(
                "v_set must be finite and >= 0, got {}",
                self.v_set
            )));
        }
        if !self.d_default.is_finite() || self.d_default <= 0.0 {
            return Err(ConfigError::Invalid(format!(
                "d_default must be > 0, got {}",
                self.d_default
            )));
        }
        if !self.t_gap.is_finite() || self.t_gap <= 0.0 {
            return Err(ConfigError::Invalid(format!(
                "t_gap must be > 0, got {}",
                self.t_gap
            )));
        }
        if !self.windup_limit.is_finite() || self.windup_limit <= 0.0 {
            return Err(ConfigError::Invalid(format!(
                "windup_limit must be > 0, got {}",
                self.windup_limit
            )));
        }
        if !self.a_min.is_finite() || !self.a_max.is_finite() || !(self.a_min < 0.0 && 0.0 < self.a_max)
        {
            return Err(ConfigError::Invalid(format!(
                "acceleration bounds must satisfy a_min < 0 < a_max, got [{}, {}]",
                self.a_min, self.a_max
            )));
        }
        self.speed_pid.validate("speed_pid")?;
        self.space_pid.validate("space_pid")?;
        Ok(())
    }
}

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("invalid controller config: {0}")]
    Invalid(String),
}

/// Headway to the lead vehicle: lead position minus ego position.
pub fn relative_distance(x_lead: f64, x_ego: f64) -> f64 {
    x_lead - x_ego
}

/// Speed-dependent safe following distance.
pub fn safe_distance(v_ego: f64, cfg: &ControllerConfig) -> f64 {
    cfg.d_default + cfg.t_gap * v_ego
}

/// Picks the active mode from the switching errors.
pub fn select_mode(signals: SwitchSignals, prev: Mode, rule: ModeRule) -> Mode {
    match rule {
        ModeRule::GapThreshold => {
            if signals.e_d > 0.0 {
                Mode::Space
            } else {
                Mode::Speed
            }
        }
        ModeRule::Latched => {
            let space_wants = signals.e_d > 0.0;
            let speed_wants = signals.e_v < 0.0;
            if space_wants {
                // Safety takes priority when both conditions fire.
                Mode::Space
            } else if speed_wants {
                Mode::Speed
            } else {
                prev
            }
        }
    }
}

/// One PID update. The integral is accumulated (and clamped) before use, so
/// a single step already reflects the new error.
pub fn pid_step(
    gains: PidGains,
    st: PidState,
    error: f64,
    dt: f64,
    windup_limit: f64,
) -> (f64, PidState) {
    let integral = (st.integral + error * dt).clamp(-windup_limit, windup_limit);
    let derivative = (error - st.prev_error) / dt;
    let command = gains.kp * error + gains.ki * integral + gains.kd * derivative;
    (
        command,
        PidState {
            integral,
            prev_error: error,
        },
    )
}

/// Sensor snapshot available to the controller at one instant.
#[derive(Debug, Clone, Copy)]
pub struct Measurements {
    pub x_ego: f64,
    pub v_ego: f64,
    pub x_lead: f64,
}

/// Controller state threaded through the simulation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ControllerState {
    pub mode: Mode,
    pub speed: PidState,
    pub space: PidState,
}

impl Default for ControllerState {
    /// Fresh controller: speed mode with both loops zeroed.
    fn default() -> Self {
        ControllerState {
            mode: Mode::Speed,
            speed: PidState::default(),
            space: PidState::default(),
        }
    }
}

/// Runs one controller cycle: derive distances and switching errors, select
/// the mode, step the active PID, and saturate the command to `[a_min, a_max]`.
pub fn controller_step(
    cfg: &ControllerConfig,
    st: ControllerState,
    m: Measurements,
    dt: f64,
) -> (f64, ControllerState) {
    let d_rel = relative_distance(m.x_lead, m.x_ego);
    let d_safe = safe_distance(m.v_ego, cfg);
    let signals = SwitchSignals {
        e_v: cfg.v_set - m.v_ego,
        e_d: d_safe - d_rel,
    };
    let mode = select_mode(signals, st.mode, cfg.mode_rule);

    let mut speed = st.speed;
    let mut space = st.space;
    if mode != st.mode {
        // The loop going off duty drops its accumulated integral.
        match st.mode {
            Mode::Speed => speed.integral = 0.0,
            Mode::Space => space.integral = 0.0,
        }
    }

    let raw = match mode {
        Mode::Speed => {
            let (c, next) = pid_step(cfg.speed_pid, speed, signals.e_v, dt, cfg.windup_limit);
            speed = next;
            c
        }
        Mode::Space => {
            let (c, next) = pid_step(cfg.space_pid, space, d_rel - d_safe, dt, cfg.windup_limit);
            space = next;
            c
        }
    };

    (raw.clamp(cfg.a_min, cfg.a_max), ControllerState { mode, speed, space })
}
