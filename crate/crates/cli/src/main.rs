//! Command-line front end for the cruise-control verification workbench.
//!
//! Subcommands:
//!
//! * `simulate` — run a scenario and write its trace CSV;
//! * `check`    — check a temporal property against a recorded trace;
//! * `verify`   — simulate a scenario and check it in one step;
//! * `report`   — rerun the reference scenarios and compare verdicts;
//! * `catalog`  — list the property pattern templates;
//! * `plot`     — render selected trace columns as an SVG.
//!
//! Properties are selected either by built-in name (`--ct stability`) or as
//! a raw LTL formula with predicate bindings (`--formula "F G ss"
//! --atom "ss = d_rel - d_safe > 0.05 * d_safe"`).
//!
//! Exit codes: 0 when the checked property holds (or the command has no
//! verdict and simply succeeded), 1 when a property is violated or the
//! report mismatches, 2 for usage and runtime errors. Every file named on
//! the command line is read and parsed before any work starts.

mod plot;

use std::collections::BTreeSet;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use cruisecheck::harness::{
    check_trace_with, reproduce_reference_verdicts, run_scenario, unknown_fields, ScenarioConfig,
    Trace, Verdict, TRACE_FIELDS,
};
use cruisecheck::ltl::{parse_atom, parse_formula, AtomPredicate, Formula};
use cruisecheck::patterns::{build_acc_stability, catalog, RECOGNIZED_UNIMPLEMENTED_SCOPES};

#[derive(Parser)]
#[command(
    name = "cruisecheck",
    version,
    about = "Simulate adaptive cruise control scenarios and check temporal properties on the traces"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a scenario and write the trace CSV.
    Simulate {
        /// Bundled scenario name (case1, case2, case3, fig1_sine) or a path
        /// to a scenario JSON file.
        #[arg(long)]
        scenario: String,
        /// Output CSV path.
        #[arg(long)]
        out: PathBuf,
    },
    /// Check a property against a recorded trace CSV.
    Check {
        /// Trace CSV path (as written by `simulate`).
        #[arg(long)]
        trace: PathBuf,
        #[command(flatten)]
        property: PropertyArgs,
    },
    /// Simulate a scenario and check a property against the fresh trace.
    Verify {
        /// Bundled scenario name or scenario JSON path.
        #[arg(long)]
        scenario: String,
        #[command(flatten)]
        property: PropertyArgs,
    },
    /// Rerun the bundled reference scenarios and compare the verdicts
    /// against the expected table.
    Report,
    /// List the scope x pattern catalog with each rendered formula template.
    Catalog,
    /// Render selected trace columns over time as a standalone SVG.
    Plot {
        /// Trace CSV path.
        #[arg(long)]
        trace: PathBuf,
        /// Comma-separated column names, e.g. `v_ego,v_lead,d_rel,d_safe`.
        /// Columns are grouped into one panel per unit (speeds, distances,
        /// acceleration, mode) sharing the time axis.
        #[arg(long, value_delimiter = ',', value_name = "NAMES")]
        columns: Vec<String>,
        /// Output SVG path.
        #[arg(long)]
        out: PathBuf,
    },
}

/// Property selection shared by `check` and `verify`.
#[derive(Args)]
struct PropertyArgs {
    /// Built-in control-theory property.
    #[arg(long, value_name = "NAME", value_parser = ["stability"])]
    ct: Option<String>,
    /// LTL formula over named atoms, e.g. "F G ss".
    #[arg(long, value_name = "LTL")]
    formula: Option<String>,
    /// Atom binding "name = <expr> <cmp> <expr>" over trace columns;
    /// repeatable, one per atom the formula uses.
    #[arg(long, value_name = "DEF")]
    atom: Vec<String>,
}

const PROPERTY_USAGE: &str =
    "cruisecheck <check|verify> ... (--ct stability | --formula <LTL> [--atom <DEF>]...)";
const PLOT_USAGE: &str = "cruisecheck plot --trace <FILE> --columns <NAMES> --out <FILE>";

#[derive(Debug)]
enum CliError {
    /// Bad argument combinations and malformed argument content.
    Usage {
        message: String,
        hint: &'static str,
    },
    /// File, parse, simulation, and checking failures.
    Runtime(String),
}

impl CliError {
    fn usage(message: impl Into<String>) -> Self {
        CliError::Usage {
            message: message.into(),
            hint: PROPERTY_USAGE,
        }
    }

    fn plot_usage(message: impl Into<String>) -> Self {
        CliError::Usage {
            message: message.into(),
            hint: PLOT_USAGE,
        }
    }
}

fn runtime(e: impl std::fmt::Display) -> CliError {
    CliError::Runtime(e.to_string())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(code) => code,
        Err(CliError::Usage { message, hint }) => {
            eprintln!("error: {message}");
            eprintln!("usage: {hint}");
            ExitCode::from(2)
        }
        Err(CliError::Runtime(message)) => {
            eprintln!("error: {message}");
            ExitCode::from(2)
        }
    }
}

fn run(command: Command) -> Result<ExitCode, CliError> {
    match command {
        Command::Simulate { scenario, out } => cmd_simulate(&scenario, &out),
        Command::Check { trace, property } => cmd_check(&trace, &property),
        Command::Verify { scenario, property } => cmd_verify(&scenario, &property),
        Command::Report => cmd_report(),
        Command::Catalog => Ok(cmd_catalog()),
        Command::Plot {
            trace,
            columns,
            out,
        } => cmd_plot(&trace, &columns, &out),
    }
}

/// A checkable property: a formula plus the predicates its atoms stand for.
struct Property {
    label: String,
    formula: Formula,
    atoms: Vec<AtomPredicate>,
}

/// Resolves `--ct`/`--formula`/`--atom` into a validated [`Property`].
///
/// All argument content is parsed here, and the atom bindings are checked
/// for completeness (every formula atom bound, no duplicates) and for
/// schema fit (every referenced field is a trace column) — before any
/// trace is read or simulated.
fn resolve_property(args: &PropertyArgs) -> Result<Property, CliError> {
    let (label, formula, atoms) = match (&args.ct, &args.formula) {
        (Some(_), Some(_)) => {
            return Err(CliError::usage(
                "--ct and --formula are mutually exclusive",
            ))
        }
        (None, None) => {
            return Err(CliError::usage(
                "a property is required: pass --ct <NAME> or --formula <LTL>",
            ))
        }
        (Some(name), None) => {
            if !args.atom.is_empty() {
                return Err(CliError::usage(
                    "--atom only applies together with --formula",
                ));
            }
            // value_parser restricts `name`; match anyway so a future
            // built-in cannot fall through silently.
            match name.as_str() {
                "stability" => {
                    let spec = build_acc_stability();
                    (spec.name, spec.formula, spec.atoms)
                }
                other => {
                    return Err(CliError::usage(format!(
                        "unknown --ct property `{other}` (available: stability)"
                    )))
                }
            }
        }
        (None, Some(text)) => {
            let formula = parse_formula(text)
                .map_err(|e| CliError::usage(format!("cannot parse --formula: {e}")))?;
            let mut atoms = Vec::new();
            for def in &args.atom {
                let atom = parse_atom(def)
                    .map_err(|e| CliError::usage(format!("cannot parse --atom `{def}`: {e}")))?;
                if atoms.iter().any(|a: &AtomPredicate| a.name == atom.name) {
                    return Err(CliError::usage(format!(
                        "atom `{}` is defined twice",
                        atom.name
                    )));
                }
                atoms.push(atom);
            }
            (text.clone(), formula, atoms)
        }
    };

    let needed = formula.atoms();
    let bound: BTreeSet<String> = atoms.iter().map(|a| a.name.clone()).collect();
    let unbound: Vec<&str> = needed.difference(&bound).map(|s| s.as_str()).collect();
    if !unbound.is_empty() {
        return Err(CliError::usage(format!(
            "formula atom(s) without an --atom definition: {}",
            unbound.join(", ")
        )));
    }

    let mut fields = BTreeSet::new();
    for atom in &atoms {
        fields.extend(atom.fields());
    }
    let foreign = unknown_fields(&fields);
    if !foreign.is_empty() {
        return Err(CliError::usage(format!(
            "atom expression(s) reference unknown trace column(s): {} (columns: {})",
            foreign.join(", "),
            TRACE_FIELDS.join(", ")
        )));
    }

    Ok(Property {
        label,
        formula,
        atoms,
    })
}

fn load_trace(path: &Path) -> Result<Trace, CliError> {
    Trace::read_csv(path).map_err(|e| CliError::Runtime(format!("{}: {e}", path.display())))
}

fn load_scenario(name_or_path: &str) -> Result<ScenarioConfig, CliError> {
    ScenarioConfig::load(name_or_path).map_err(runtime)
}

fn trace_summary(trace: &Trace) -> String {
    let n = trace.samples.len();
    let end = trace.samples.last().map_or(0.0, |s| s.t);
    format!(
        "{n} samples over {end:.1}s, {} mode switch(es)",
        trace.mode_switch_count()
    )
}

fn print_verdict(property: &Property, trace: &Trace, verdict: &Verdict) {
    println!("property: {}", property.label);
    println!("formula:  {}", property.formula);
    for atom in &property.atoms {
        println!("  atom {atom}");
    }
    println!("trace:    {}", trace_summary(trace));
    println!("holds={}", verdict.holds);
    if verdict.holds {
        if let (Some(w), Some(t)) = (verdict.witness_index, verdict.diagnostics.convergence_time) {
            let hold = verdict.diagnostics.trailing_hold.unwrap_or(0.0);
            println!("  satisfied from sample {w} (t={t:.1}s) onward; trailing hold {hold:.1}s");
        }
    } else {
        if verdict.diagnostics.collision {
            if let Some(c) = trace.collision {
                println!("  collision at t={:.1}s terminates the run", c.time);
            }
        }
        if let Some(i) = verdict.counterexample_index {
            println!(
                "  counterexample at sample {i} (t={:.1}s)",
                trace.samples[i].t
            );
        }
    }
}

fn verdict_exit(verdict: &Verdict) -> ExitCode {
    if verdict.holds {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}

fn cmd_simulate(scenario: &str, out: &Path) -> Result<ExitCode, CliError> {
    let cfg = load_scenario(scenario)?;
    let trace = run_scenario(&cfg).map_err(runtime)?;
    trace.write_csv(out).map_err(runtime)?;
    println!("scenario: {}", cfg.id);
    println!("trace:    {}", trace_summary(&trace));
    if let Some(c) = trace.collision {
        println!("collision at t={:.1}s", c.time);
    }
    println!("wrote {}", out.display());
    Ok(ExitCode::SUCCESS)
}

fn cmd_check(trace_path: &Path, args: &PropertyArgs) -> Result<ExitCode, CliError> {
    let property = resolve_property(args)?;
    let trace = load_trace(trace_path)?;
    let verdict = check_trace_with(&trace, &property.formula, &property.atoms).map_err(runtime)?;
    print_verdict(&property, &trace, &verdict);
    Ok(verdict_exit(&verdict))
}

fn cmd_verify(scenario: &str, args: &PropertyArgs) -> Result<ExitCode, CliError> {
    let property = resolve_property(args)?;
    let cfg = load_scenario(scenario)?;
    println!("scenario: {}", cfg.id);
    let trace = run_scenario(&cfg).map_err(runtime)?;
    let verdict = check_trace_with(&trace, &property.formula, &property.atoms).map_err(runtime)?;
    print_verdict(&property, &trace, &verdict);
    Ok(verdict_exit(&verdict))
}

fn cmd_report() -> Result<ExitCode, CliError> {
    let report = reproduce_reference_verdicts().map_err(runtime)?;
    print!("{}", report.render());
    if report.all_match {
        Ok(ExitCode::SUCCESS)
    } else {
        Ok(ExitCode::from(1))
    }
}

fn cmd_catalog() -> ExitCode {
    let rows = catalog();
    let scope_w = rows.iter().map(|r| r.scope.len()).max().unwrap_or(5).max("scope".len());
    let kind_w = rows
        .iter()
        .map(|r| r.kind.name().len())
        .max()
        .unwrap_or(7)
        .max("pattern".len());
    println!("{:<scope_w$}  {:<kind_w$}  {:<9}  template", "scope", "pattern", "supported");
    for r in &rows {
        println!(
            "{:<scope_w$}  {:<kind_w$}  {:<9}  {}",
            r.scope,
            r.kind.name(),
            if r.supported { "yes" } else { "no" },
            r.template
        );
    }
    println!();
    println!(
        "Scopes recognized by name but not implemented: {}.",
        RECOGNIZED_UNIMPLEMENTED_SCOPES.join(", ")
    );
    ExitCode::SUCCESS
}

fn cmd_plot(trace_path: &Path, columns: &[String], out: &Path) -> Result<ExitCode, CliError> {
    if columns.is_empty() {
        return Err(CliError::plot_usage(
            "at least one --columns name is required (e.g. --columns v_ego,d_rel)",
        ));
    }
    let mut cols: Vec<String> = Vec::new();
    for c in columns {
        if c == "t" {
            return Err(CliError::plot_usage(
                "column `t` is the shared x axis; pick data columns to plot",
            ));
        }
        if !TRACE_FIELDS.contains(&c.as_str()) {
            return Err(CliError::plot_usage(format!(
                "unknown column `{c}` (columns: {})",
                TRACE_FIELDS.join(", ")
            )));
        }
        if !cols.iter().any(|have| have == c) {
            cols.push(c.clone());
        }
    }
    let trace = load_trace(trace_path)?;
    let svg = plot::render_svg(&trace, &cols);
    std::fs::write(out, svg).map_err(runtime)?;
    println!("wrote {}", out.display());
    Ok(ExitCode::SUCCESS)
}
