//! Scenario execution: configs, the simulation loop, trace CSV I/O, and
//! property verdicts.
//!
//! A scenario pairs initial conditions (given in the same units they are
//! usually quoted in: speeds in km/h, positions in m) with optional overrides
//! of the stock controller tuning. Running a scenario yields a [`Trace`]: one
//! [`Sample`] per control period, ending early only if the vehicles collide.
//! Identical configs produce byte-identical trace CSVs. Checking a trace
//! against a property yields a [`Verdict`] with settling-time diagnostics;
//! [`reproduce_reference_verdicts`] runs the bundled scenario battery and
//! compares against the designed outcomes.

use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::controller::{
    controller_step, relative_distance, safe_distance, ControllerConfig, ControllerState,
    Measurements, ModeRule, PidGains,
};
use crate::ltl::{AtomPredicate, Formula};
use crate::patterns::{build_acc_stability, PropertySpec};
use crate::plant::{step_ego, step_lead, LeadProfile, PlantError, VehicleState};

pub const DEFAULT_DT: f64 = 0.1;
pub const DEFAULT_HORIZON: f64 = 45.0;

/// km/h to m/s.
pub fn kmh_to_ms(v: f64) -> f64 {
    v / 3.6
}

fn default_dt() -> f64 {
    DEFAULT_DT
}

fn default_horizon() -> f64 {
    DEFAULT_HORIZON
}

/// Per-field overrides of the stock controller tuning. Anything left out
/// keeps its default.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ControllerOverrides {
    pub d_default: Option<f64>,
    pub t_gap: Option<f64>,
    pub speed_pid: Option<PidGains>,
    pub space_pid: Option<PidGains>,
    pub windup_limit: Option<f64>,
    pub a_min: Option<f64>,
    pub a_max: Option<f64>,
    pub mode_rule: Option<ModeRule>,
}

impl ControllerOverrides {
    fn apply(&self, mut cfg: ControllerConfig) -> ControllerConfig {
        if let Some(v) = self.d_default {
            cfg.d_default = v;
        }
        if let Some(v) = self.t_gap {
            cfg.t_gap = v;
        }
        if let Some(v) = self.speed_pid {
            cfg.speed_pid = v;
        }
        if let Some(v) = self.space_pid {
            cfg.space_pid = v;
        }
        if let Some(v) = self.windup_limit {
            cfg.windup_limit = v;
        }
        if let Some(v) = self.a_min {
            cfg.a_min = v;
        }
        if let Some(v) = self.a_max {
            cfg.a_max = v;
        }
        if let Some(v) = self.mode_rule {
            cfg.mode_rule = v;
        }
        cfg
    }
}

/// One simulation setup, loadable from JSON.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub id: String,
    /// Initial ego speed (km/h).
    pub v0_ego: f64,
    /// Initial lead speed (km/h); ignored when `lead_profile` is given.
    pub v0_lead: f64,
    /// Initial ego position (m).
    pub x0_ego: f64,
    /// Initial lead position (m).
    pub x0_lead: f64,
    /// Cruise set speed (m/s). Defaults to the converted initial ego speed.
    #[serde(default)]
    pub v_set: Option<f64>,
    /// Lead speed profile (m/s). Defaults to constant at the converted
    /// initial lead speed.
    #[serde(default)]
    pub lead_profile: Option<LeadProfile>,
    /// Control period (s).
    #[serde(default = "default_dt")]
    pub dt: f64,
    /// Simulated time span (s).
    #[serde(default = "default_horizon")]
    pub horizon: f64,
    #[serde(default)]
    pub controller: ControllerOverrides,
}

impl ScenarioConfig {
    /// Resolved cruise set speed in m/s.
    pub fn v_set_ms(&self) -> f64 {
        self.v_set.unwrap_or_else(|| kmh_to_ms(self.v0_ego))
    }

    /// Resolved lead speed profile.
    pub fn lead_profile_resolved(&self) -> LeadProfile {
        self.lead_profile.unwrap_or(LeadProfile::Constant {
            v0: kmh_to_ms(self.v0_lead),
        })
    }

    /// Full controller config: stock tuning, set speed, then overrides.
    pub fn controller_config(&self) -> ControllerConfig {
        self.controller
            .apply(ControllerConfig::defaults(self.v_set_ms()))
    }

    pub fn validate(&self) -> Result<(), HarnessError> {
        let bad = |msg: String| Err(HarnessError::InvalidScenario(msg));
        for (name, v) in [
            ("v0_ego", self.v0_ego),
            ("v0_lead", self.v0_lead),
            ("x0_ego", self.x0_ego),
            ("x0_lead", self.x0_lead),
            ("dt", self.dt),
            ("horizon", self.horizon),
        ] {
            if !v.is_finite() {
                return bad(format!("{name} must be finite, got {v}"));
            }
        }
        if self.v0_ego < 0.0 || self.v0_lead < 0.0 {
            return bad("initial speeds must be >= 0".into());
        }
        if self.x0_lead <= self.x0_ego {
            return bad(format!(
                "lead must start ahead of ego: x0_lead={} <= x0_ego={}",
                self.x0_lead, self.x0_ego
            ));
        }
        if self.dt <= 0.0 {
            return bad(format!("dt must be > 0, got {}", self.dt));
        }
        if self.horizon < self.dt {
            return bad(format!(
                "horizon must cover at least one step, got {}",
                self.horizon
            ));
        }
        self.lead_profile_resolved().validate()?;
        self.controller_config().validate()?;
        Ok(())
    }

    /// Stable content hash of the config, recorded on generated traces.
    pub fn fingerprint(&self) -> String {
        let canonical = serde_json::to_string(self).expect("config serializes");
        let digest = Sha256::digest(canonical.as_bytes());
        let mut hex = String::with_capacity(64);
        for byte in digest {
            write!(hex, "{byte:02x}").unwrap();
        }
        hex
    }

    pub fn from_json(text: &str) -> Result<Self, HarnessError> {
        let cfg: ScenarioConfig = serde_json::from_str(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_file(path: impl AsRef<Path>) -> Result<Self, HarnessError> {
        let text = std::fs::read_to_string(path)?;
        Self::from_json(&text)
    }

    /// Names of the scenarios shipped with the crate.
    pub fn bundled_names() -> &'static [&'static str] {
        &["case1", "case2", "case3", "fig1_sine"]
    }

    /// A scenario shipped with the crate, by name.
    pub fn bundled(name: &str) -> Option<Self> {
        let text = match name {
            "case1" => include_str!("../scenarios/case1.json"),
            "case2" => include_str!("../scenarios/case2.json"),
            "case3" => include_str!("../scenarios/case3.json"),
            "fig1_sine" => include_str!("../scenarios/fig1_sine.json"),
            _ => return None,
        };
        Some(Self::from_json(text).expect("bundled scenario is valid"))
    }

    /// Resolves a bundled scenario name, falling back to a filesystem path.
    pub fn load(name_or_path: &str) -> Result<Self, HarnessError> {
        if let Some(cfg) = Self::bundled(name_or_path) {
            return Ok(cfg);
        }
        if Path::new(name_or_path).exists() {
            return Self::from_file(name_or_path);
        }
        Err(HarnessError::UnknownScenario {
            name: name_or_path.to_string(),
            bundled: Self::bundled_names().join(", "),
        })
    }
}

/// One recorded control period.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sample {
    pub t: f64,
    pub x_ego: f64,
    pub v_ego: f64,
    /// Acceleration commanded at this instant (applied over the next step).
    pub a_ego: f64,
    pub x_lead: f64,
    pub v_lead: f64,
    /// Headway `x_lead - x_ego`.
    pub d_rel: f64,
    /// Safe distance at the current ego speed.
    pub d_safe: f64,
    /// Active mode: `+1` speed, `-1` space.
    pub mode: i8,
}

pub const TRACE_HEADER: &str = "t,x_ego,v_ego,a_ego,x_lead,v_lead,d_rel,d_safe,mode";

/// Field names a trace exposes to atom predicates.
pub const TRACE_FIELDS: &[&str] = &[
    "t", "x_ego", "v_ego", "a_ego", "x_lead", "v_lead", "d_rel", "d_safe", "mode",
];

impl Sample {
    /// Looks up a field by its trace column name.
    pub fn field(&self, name: &str) -> Option<f64> {
        Some(match name {
            "t" => self.t,
            "x_ego" => self.x_ego,
            "v_ego" => self.v_ego,
            "a_ego" => self.a_ego,
            "x_lead" => self.x_lead,
            "v_lead" => self.v_lead,
            "d_rel" => self.d_rel,
            "d_safe" => self.d_safe,
            "mode" => f64::from(self.mode),
            _ => return None,
        })
    }
}

/// The instant the headway reached zero.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Collision {
    pub time: f64,
}

/// Result of running one scenario.
#[derive(Debug, Clone, PartialEq)]
pub struct Trace {
    pub samples: Vec<Sample>,
    /// Present iff the run ended in a collision; always the final sample.
    pub collision: Option<Collision>,
    /// Content hash of the generating config; absent on traces loaded from
    /// files.
    pub fingerprint: Option<String>,
}

impl Trace {
    /// Number of times the active mode changes between consecutive samples.
    pub fn mode_switch_count(&self) -> usize {
        self.samples
            .windows(2)
            .filter(|w| w[0].mode != w[1].mode)
            .count()
    }

    /// Renders the trace in its canonical CSV form. Floats are written in
    /// shortest round-trip notation, so equal traces produce equal bytes.
    pub fn to_csv_string(&self) -> String {
        let mut out = String::with_capacity(64 * (self.samples.len() + 1));
        out.push_str(TRACE_HEADER);
        out.push('\n');
        for s in &self.samples {
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{},{},{}",
                s.t, s.x_ego, s.v_ego, s.a_ego, s.x_lead, s.v_lead, s.d_rel, s.d_safe, s.mode
            );
        }
        if let Some(c) = self.collision {
            let _ = writeln!(out, "# collision t={}", c.time);
        }
        out
    }

    pub fn write_csv(&self, path: impl AsRef<Path>) -> Result<(), HarnessError> {
        std::fs::write(path, self.to_csv_string())?;
        Ok(())
    }

    pub fn from_csv_str(text: &str) -> Result<Self, HarnessError> {
        let mut lines = text.lines().enumerate();
        let (_, header) = lines.next().ok_or(HarnessError::TraceFormat {
            line: 1,
            message: "empty trace file".into(),
        })?;
        if header != TRACE_HEADER {
            return Err(HarnessError::TraceFormat {
                line: 1,
                message: format!("expected header `{TRACE_HEADER}`, got `{header}`"),
            });
        }
        let mut samples = Vec::new();
        let mut collision = None;
        for (idx, line) in lines {
            let lineno = idx + 1;
            if line.is_empty() {
                continue;
            }
            if let Some(rest) = line.strip_prefix('#') {
                let rest = rest.trim();
                let time = rest
                    .strip_prefix("collision t=")
                    .and_then(|v| v.parse::<f64>().ok())
                    .ok_or_else(|| HarnessError::TraceFormat {
                        line: lineno,
                        message: format!("unrecognized comment `{line}`"),
                    })?;
                collision = Some(Collision { time });
                continue;
            }
            if collision.is_some() {
                return Err(HarnessError::TraceFormat {
                    line: lineno,
                    message: "data after collision marker".into(),
                });
            }
            let fields: Vec<&str> = line.split(',').collect();
            if fields.len() != 9 {
                return Err(HarnessError::TraceFormat {
                    line: lineno,
                    message: format!("expected 9 fields, got {}", fields.len()),
                });
            }
            let num = |i: usize| -> Result<f64, HarnessError> {
                fields[i].parse::<f64>().map_err(|_| HarnessError::TraceFormat {
                    line: lineno,
                    message: format!("bad float `{}`", fields[i]),
                })
            };
            let mode: i8 = fields[8].parse().map_err(|_| HarnessError::TraceFormat {
                line: lineno,
                message: format!("bad mode `{}`", fields[8]),
            })?;
            if mode != 1 && mode != -1 {
                return Err(HarnessError::TraceFormat {
                    line: lineno,
                    message: format!("mode must be 1 or -1, got {mode}"),
                });
            }
            samples.push(Sample {
                t: num(0)?,
                x_ego: num(1)?,
                v_ego: num(2)?,
                a_ego: num(3)?,
                x_lead: num(4)?,
                v_lead: num(5)?,
                d_rel: num(6)?,
                d_safe: num(7)?,
                mode,
            });
        }
        let trace = Trace {
            samples,
            collision,
            fingerprint: None,
        };
        trace.validate_structure()?;
        Ok(trace)
    }

    pub fn read_csv(path: impl AsRef<Path>) -> Result<Self, HarnessError> {
        let text = std::fs::read_to_string(path)?;
        Self::from_csv_str(&text)
    }

    fn validate_structure(&self) -> Result<(), HarnessError> {
        let bad = |message: String| {
            Err(HarnessError::TraceFormat { line: 0, message })
        };
        if self.samples.is_empty() {
            return bad("trace has no samples".into());
        }
        for w in self.samples.windows(2) {
            if !(w[1].t > w[0].t) {
                return bad(format!(
                    "time must be strictly increasing, got {} then {}",
                    w[0].t, w[1].t
                ));
            }
        }
        if let Some(c) = self.collision {
            let last = self.samples.last().unwrap();
            if last.d_rel > 0.0 {
                return bad(format!(
                    "collision marker but final d_rel = {} > 0",
                    last.d_rel
                ));
            }
            if c.time != last.t {
                return bad(format!(
                    "collision time {} does not match final sample t={}",
                    c.time, last.t
                ));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("config parse error: {0}")]
    Json(#[from] serde_json::Error),
    #[error("invalid scenario: {0}")]
    InvalidScenario(String),
    #[error("unknown scenario `{name}` (bundled: {bundled}, or pass a config file path)")]
    UnknownScenario { name: String, bundled: String },
    #[error(transparent)]
    Plant(#[from] PlantError),
    #[error(transparent)]
    Controller(#[from] crate::controller::ConfigError),
    #[error("trace format error at line {line}: {message}")]
    TraceFormat { line: usize, message: String },
    #[error(transparent)]
    Check(#[from] crate::ltl::CheckError),
}

/// Runs a scenario to its horizon, or to first contact.
///
/// Each iteration measures the current states, runs one controller cycle,
/// records the sample, and then advances both vehicles by `dt`. The loop
/// stops once the headway is no longer positive (recording the collision) or
/// after the sample at the horizon.
pub fn run_scenario(cfg: &ScenarioConfig) -> Result<Trace, HarnessError> {
    cfg.validate()?;
    let ctrl_cfg = cfg.controller_config();
    let profile = cfg.lead_profile_resolved();

    let mut ego = VehicleState::new(cfg.x0_ego, kmh_to_ms(cfg.v0_ego));
    let mut lead = VehicleState::new(cfg.x0_lead, profile.speed_at(0.0));
    let mut ctrl = ControllerState::default();

    let n_steps = (cfg.horizon / cfg.dt + 1e-9).floor() as usize;
    let mut samples = Vec::with_capacity(n_steps + 1);
    let mut collision = None;

    for k in 0..=n_steps {
        let t = k as f64 * cfg.dt;
        let d_rel = relative_distance(lead.x, ego.x);
        let d_safe = safe_distance(ego.v, &ctrl_cfg);
        let m = Measurements {
            x_ego: ego.x,
            v_ego: ego.v,
            x_lead: lead.x,
        };
        let (a_cmd, next_ctrl) = controller_step(&ctrl_cfg, ctrl, m, cfg.dt);
        ctrl = next_ctrl;
        samples.push(Sample {
            t,
            x_ego: ego.x,
            v_ego: ego.v,
            a_ego: a_cmd,
            x_lead: lead.x,
            v_lead: lead.v,
            d_rel,
            d_safe,
            mode: ctrl.mode.signal(),
        });
        if d_rel <= 0.0 {
            collision = Some(Collision { time: t });
            break;
        }
        if k == n_steps {
            break;
        }
        ego = step_ego(ego, a_cmd, cfg.dt)?;
        lead = step_lead(t, &profile, lead, cfg.dt)?;
    }

    Ok(Trace {
        samples,
        collision,
        fingerprint: Some(cfg.fingerprint()),
    })
}

/// Distinct atom names referenced by a formula but absent from the trace
/// schema; used to reject typo'd predicates before checking.
pub fn unknown_fields(names: &BTreeSet<String>) -> Vec<String> {
    names
        .iter()
        .filter(|n| !TRACE_FIELDS.contains(&n.as_str()))
        .cloned()
        .collect()
}

impl crate::ltl::FieldSource for Sample {
    fn field(&self, name: &str) -> Option<f64> {
        Sample::field(self, name)
    }
}

/// Timing context attached to a verdict.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VerdictDiagnostics {
    /// Time of the first sample of the trailing hold, when one exists.
    pub convergence_time: Option<f64>,
    /// How long the condition held from convergence to the end of the trace.
    pub trailing_hold: Option<f64>,
    /// Whether the run ended in a collision.
    pub collision: bool,
}

/// Outcome of checking one property against one trace.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Verdict {
    pub holds: bool,
    /// First index of the trailing stretch on which the condition holds.
    pub witness_index: Option<usize>,
    /// Index implicated in the violation, when one was found.
    pub counterexample_index: Option<usize>,
    pub diagnostics: VerdictDiagnostics,
}

/// Checks a formula against a trace, given predicates for its atoms.
///
/// A collision is an immediate violation, counterexampled at the final
/// sample: the stutter extension of a crashed state would otherwise evaluate
/// a meaningless band condition forever. Collision-free traces delegate to
/// the temporal checker.
pub fn check_trace_with(
    trace: &Trace,
    formula: &Formula,
    atoms: &[AtomPredicate],
) -> Result<Verdict, HarnessError> {
    if trace.samples.is_empty() {
        return Err(crate::ltl::CheckError::EmptyTrace.into());
    }
    if trace.collision.is_some() {
        return Ok(Verdict {
            holds: false,
            witness_index: None,
            counterexample_index: Some(trace.samples.len() - 1),
            diagnostics: VerdictDiagnostics {
                convergence_time: None,
                trailing_hold: None,
                collision: true,
            },
        });
    }
    let result = crate::ltl::check_trace(formula, &trace.samples, atoms)?;
    let convergence_time = result.witness_index.map(|i| trace.samples[i].t);
    let end_time = trace.samples.last().expect("non-empty trace").t;
    Ok(Verdict {
        holds: result.holds,
        witness_index: result.witness_index,
        counterexample_index: result.counterexample_index,
        diagnostics: VerdictDiagnostics {
            convergence_time,
            trailing_hold: convergence_time.map(|t| end_time - t),
            collision: false,
        },
    })
}

/// Checks a named property (pattern + atom bindings) against a trace.
pub fn check_scenario(trace: &Trace, spec: &PropertySpec) -> Result<Verdict, HarnessError> {
    check_trace_with(trace, &spec.formula, &spec.atoms)
}

/// The designed outcomes of the bundled following scenarios: the first stays
/// safe throughout, the second recovers from an unsafe start, the third ends
/// in a collision.
pub const REFERENCE_VERDICTS: [(&str, bool); 3] =
    [("case1", true), ("case2", true), ("case3", false)];

/// One scenario's row in the reference comparison.
#[derive(Debug, Clone, PartialEq)]
pub struct ReportRow {
    pub scenario: String,
    pub expected: bool,
    pub actual: bool,
    pub matches: bool,
    pub verdict: Verdict,
}

/// Comparison of fresh runs against the reference outcomes.
#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    pub rows: Vec<ReportRow>,
    pub all_match: bool,
}

impl Report {
    /// Plain-text table, one scenario per row.
    pub fn render(&self) -> String {
        let mut out = String::new();
        let verdict = |b: bool| if b { "holds" } else { "violated" };
        out.push_str("scenario  expected  actual    match  notes\n");
        for row in &self.rows {
            let note = if row.verdict.diagnostics.collision {
                "collision ends the run".to_string()
            } else if let Some(t) = row.verdict.diagnostics.convergence_time {
                format!("margin holds from t={t:.1}s onward")
            } else {
                "margin violated with no recovery".to_string()
            };
            let _ = writeln!(
                out,
                "{:<9} {:<9} {:<9} {:<6} {}",
                row.scenario,
                verdict(row.expected),
                verdict(row.actual),
                if row.matches { "yes" } else { "NO" },
                note,
            );
        }
        let matched = self.rows.iter().filter(|r| r.matches).count();
        let _ = writeln!(
            out,
            "verdicts match the reference on {matched}/{} scenarios",
            self.rows.len()
        );
        out
    }
}

/// Runs the three bundled following scenarios against the stability
/// property and compares each verdict with its designed outcome.
///
/// Scenarios are independent, so they run on parallel threads; rows are
/// assembled in scenario order regardless of completion order.
pub fn reproduce_reference_verdicts() -> Result<Report, HarnessError> {
    let results: Vec<Result<Verdict, HarnessError>> = std::thread::scope(|scope| {
        let handles: Vec<_> = REFERENCE_VERDICTS
            .iter()
            .map(|(name, _)| {
                scope.spawn(move || {
                    let cfg = ScenarioConfig::load(name)?;
                    let trace = run_scenario(&cfg)?;
                    check_scenario(&trace, &build_acc_stability())
                })
            })
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("scenario runner panicked"))
            .collect()
    });
    let mut rows = Vec::with_capacity(REFERENCE_VERDICTS.len());
    for ((name, expected), result) in REFERENCE_VERDICTS.iter().zip(results) {
        let verdict = result?;
        rows.push(ReportRow {
            scenario: name.to_string(),
            expected: *expected,
            actual: verdict.holds,
            matches: verdict.holds == *expected,
            verdict,
        });
    }
    let all_match = rows.iter().all(|r| r.matches);
    Ok(Report { rows, all_match })
}
