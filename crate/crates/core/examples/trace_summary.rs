//! Prints per-scenario statistics and the reference verdict table.
//!
//! Useful when adjusting controller tuning or scenario files: it shows how
//! much margin each run ends with and where the stability property settles.
//!
//! ```text
//! cargo run -p cruisecheck --example trace_summary
//! ```

use cruisecheck::harness::{
    check_scenario, reproduce_reference_verdicts, run_scenario, ScenarioConfig,
};
use cruisecheck::patterns::build_acc_stability;

fn main() {
    let spec = build_acc_stability();
    for name in ScenarioConfig::bundled_names() {
        let cfg = ScenarioConfig::bundled(name).expect("bundled scenario");
        let trace = run_scenario(&cfg).expect("scenario runs");
        let last = trace.samples.last().expect("non-empty trace");
        let margin = |s: &cruisecheck::harness::Sample| s.d_rel - s.d_safe - 0.05 * s.d_safe;
        let min_margin = trace
            .samples
            .iter()
            .map(|s| margin(s))
            .fold(f64::INFINITY, f64::min);
        let trailing_min = trace
            .samples
            .iter()
            .rev()
            .take(100)
            .map(margin)
            .fold(f64::INFINITY, f64::min);
        println!("== {name} ==");
        println!(
            "  samples: {}  mode switches: {}  collision: {:?}",
            trace.samples.len(),
            trace.mode_switch_count(),
            trace.collision.map(|c| c.time),
        );
        println!(
            "  final: t={:.1} d_rel={:.3} d_safe={:.3} margin-above-band={:.4}",
            last.t,
            last.d_rel,
            last.d_safe,
            margin(last),
        );
        println!("  min margin-above-band: whole-run {min_margin:.4}  trailing-10s {trailing_min:.4}");
        match check_scenario(&trace, &spec) {
            Ok(v) => println!(
                "  verdict: holds={} witness={:?} counterexample={:?} convergence_t={:?}",
                v.holds,
                v.witness_index,
                v.counterexample_index,
                v.diagnostics.convergence_time,
            ),
            Err(e) => println!("  verdict error: {e}"),
        }
        println!();
    }
    match reproduce_reference_verdicts() {
        Ok(report) => print!("{}", report.render()),
        Err(e) => println!("report error: {e}"),
    }
}
