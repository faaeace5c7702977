//! The release gate: one test per acceptance criterion. Each prints a PASS
//! line with the measured figures (visible under `--nocapture`); any
//! regression fails the corresponding test.

use std::time::Instant;

use cruisecheck::controller::PidGains;
use cruisecheck::harness::{reproduce_reference_verdicts, run_scenario, ScenarioConfig};
use cruisecheck::ltl::{
    accepts, eval_lasso, parse_formula, to_buchi, Assignment, Formula, LassoWord,
};
use cruisecheck::patterns::{build_acc_stability, instantiate, PatternInstance, PatternKind, Scope};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Criterion 1 — the three reference scenarios reproduce the expected
/// verdicts (safe: holds, recovery: holds, collision: violated) in under
/// five seconds of wall time.
#[test]
fn criterion_1_reference_verdicts_reproduce() {
    let start = Instant::now();
    let report = reproduce_reference_verdicts().expect("reference scenarios run");
    let elapsed = start.elapsed();

    let actual: Vec<bool> = report.rows.iter().map(|r| r.actual).collect();
    assert_eq!(actual, vec![true, true, false], "verdict table mismatch");
    assert!(report.all_match, "report flags a mismatch:\n{}", report.render());
    assert!(
        elapsed.as_secs_f64() < 5.0,
        "verdict table took {elapsed:?}, budget is 5s"
    );
    println!("PASS criterion 1: verdicts true/true/false reproduced in {elapsed:.2?}");
}

/// Criterion 2 — the collision scenario makes contact inside the kinematic
/// window [1.44 s, 3.47 s] with the stock gains, and no random non-negative
/// gain set can avoid the collision (braking authority is insufficient by
/// construction): 100/100 sampled gain sets collide.
#[test]
fn criterion_2_collision_bound_and_gain_sweep() {
    let cfg = ScenarioConfig::load("case3").expect("bundled scenario");
    let trace = run_scenario(&cfg).expect("simulation runs");
    let t = trace.collision.expect("stock gains collide").time;
    assert!(
        (1.44..=3.47).contains(&t),
        "collision at t={t}s outside [1.44, 3.47]"
    );

    let mut rng = ChaCha8Rng::seed_from_u64(0x5EED_CA5E);
    let mut earliest = f64::INFINITY;
    let mut latest: f64 = 0.0;
    for i in 0..100 {
        let mut cfg = ScenarioConfig::load("case3").expect("bundled scenario");
        cfg.controller.speed_pid = Some(random_gains(&mut rng));
        cfg.controller.space_pid = Some(random_gains(&mut rng));
        let trace = run_scenario(&cfg).expect("simulation runs");
        let c = trace
            .collision
            .unwrap_or_else(|| panic!("gain set #{i} avoided the unavoidable collision"));
        // Even flat-out braking cannot stretch contact past the
        // speed-match time; acceleration only hastens it.
        assert!(c.time <= 3.47, "gain set #{i} collided late at t={}s", c.time);
        earliest = earliest.min(c.time);
        latest = latest.max(c.time);
    }
    println!(
        "PASS criterion 2: stock collision at t={t}s in [1.44, 3.47]; \
         100/100 random gain sets collided (t in [{earliest}, {latest}])"
    );
}

fn random_gains(rng: &mut ChaCha8Rng) -> PidGains {
    PidGains::new(
        rng.random_range(0.0..4.0),
        rng.random_range(0.0..1.0),
        rng.random_range(0.0..2.0),
    )
}

/// Criterion 3 — the fixpoint evaluator and the compiled automaton agree on
/// over 1000 random (formula, lasso) pairs: formulas up to depth 5 over at
/// most 3 atoms, lassos with prefix up to 4 and cycle up to 3.
#[test]
fn criterion_3_random_dual_procedure_agreement() {
    let mut rng = ChaCha8Rng::seed_from_u64(0xA6_0E11);
    let mut checked = 0usize;
    for _ in 0..1200 {
        let f = random_formula(&mut rng, 5);
        let w = random_lasso(&mut rng);
        let oracle = eval_lasso(&f, &w).expect("all atoms assigned");
        let automaton = accepts(&to_buchi(&f), &w)
            .expect("all atoms assigned")
            .is_some();
        assert_eq!(oracle, automaton, "procedures disagree on `{f}` over {w:?}");
        checked += 1;
    }
    println!("PASS criterion 3: oracle and automaton agreed on {checked}/{checked} random pairs");
}

const ATOM_NAMES: [&str; 3] = ["p", "q", "r"];

fn random_formula(rng: &mut ChaCha8Rng, depth: usize) -> Formula {
    // A quarter of interior choices terminate early so sizes vary.
    if depth == 0 || rng.random_range(0..4) == 0 {
        return match rng.random_range(0..5) {
            0 => Formula::True,
            1 => Formula::False,
            _ => Formula::atom(ATOM_NAMES[rng.random_range(0..ATOM_NAMES.len())]),
        };
    }
    let a = random_formula(rng, depth - 1);
    match rng.random_range(0..9) {
        0 => Formula::not(a),
        1 => Formula::and(a, random_formula(rng, depth - 1)),
        2 => Formula::or(a, random_formula(rng, depth - 1)),
        3 => Formula::implies(a, random_formula(rng, depth - 1)),
        4 => Formula::next(a),
        5 => Formula::until(a, random_formula(rng, depth - 1)),
        6 => Formula::release(a, random_formula(rng, depth - 1)),
        7 => Formula::eventually(a),
        _ => Formula::globally(a),
    }
}

fn random_assignment(rng: &mut ChaCha8Rng) -> Assignment {
    ATOM_NAMES
        .iter()
        .map(|name| ((*name).to_string(), rng.random()))
        .collect()
}

fn random_lasso(rng: &mut ChaCha8Rng) -> LassoWord {
    let prefix_len = rng.random_range(0..=4);
    let cycle_len = rng.random_range(1..=3);
    let prefix = (0..prefix_len).map(|_| random_assignment(rng)).collect();
    let cycle = (0..cycle_len).map(|_| random_assignment(rng)).collect();
    LassoWord::new(prefix, cycle)
}

/// Criterion 4 — for the fixed six-formula corpus, the automaton verdict
/// matches the oracle on every lasso with prefix length up to 3 and cycle
/// length up to 2 over the formula's own atoms.
#[test]
fn criterion_4_exhaustive_small_instance_agreement() {
    let corpus = ["G p", "F p", "F G p", "G F p", "p U q", "G (p -> F q)"];
    let mut checked = 0usize;
    for text in corpus {
        let f = parse_formula(text).expect("corpus parses");
        let atoms: Vec<String> = f.atoms().into_iter().collect();
        let aut = to_buchi(&f);
        for prefix_len in 0..=3 {
            for cycle_len in 1..=2 {
                for word in all_words(&atoms, prefix_len, cycle_len) {
                    let oracle = eval_lasso(&f, &word).expect("atoms covered");
                    let automaton = accepts(&aut, &word).expect("atoms covered").is_some();
                    assert_eq!(
                        oracle, automaton,
                        "procedures disagree on `{text}` over {word:?}"
                    );
                    checked += 1;
                }
            }
        }
    }
    println!(
        "PASS criterion 4: exhaustive agreement on {checked} lassos across {} formulas",
        corpus.len()
    );
}

fn all_assignments(atoms: &[String]) -> Vec<Assignment> {
    (0..1usize << atoms.len())
        .map(|bits| {
            atoms
                .iter()
                .enumerate()
                .map(|(i, a)| (a.clone(), bits >> i & 1 == 1))
                .collect()
        })
        .collect()
}

fn all_words(atoms: &[String], prefix_len: usize, cycle_len: usize) -> Vec<LassoWord> {
    let letters = all_assignments(atoms);
    let k = letters.len();
    let total = prefix_len + cycle_len;
    (0..k.pow(total as u32))
        .map(|mut index| {
            let mut positions = Vec::with_capacity(total);
            for _ in 0..total {
                positions.push(letters[index % k].clone());
                index /= k;
            }
            let cycle = positions.split_off(prefix_len);
            LassoWord::new(positions, cycle)
        })
        .collect()
}

/// Criterion 5 — pattern nesting produces exactly the intended shapes:
/// [existence, universality] is F(G ss) (the stability property) and
/// [universality, existence] is G(F p).
#[test]
fn criterion_5_pattern_instantiation_shapes() {
    let stability = instantiate(&PatternInstance::unary(
        Scope::Globally,
        vec![PatternKind::Existence, PatternKind::Universality],
        Formula::atom("ss"),
    ))
    .expect("supported combination");
    assert_eq!(stability, parse_formula("F (G ss)").unwrap());
    assert_eq!(build_acc_stability().formula, stability);

    let recurrence = instantiate(&PatternInstance::unary(
        Scope::Globally,
        vec![PatternKind::Universality, PatternKind::Existence],
        Formula::atom("p"),
    ))
    .expect("supported combination");
    assert_eq!(recurrence, parse_formula("G (F p)").unwrap());
    println!("PASS criterion 5: [existence, universality] = F (G ss); [universality, existence] = G (F p)");
}

/// Criterion 6 — the sine-following scenario runs its full 45 s horizon
/// with at least two mode switches, no collision, and distance columns
/// that recompute exactly from positions and velocity at every sample.
#[test]
fn criterion_6_sine_scenario_switches_without_collision() {
    let cfg = ScenarioConfig::load("fig1_sine").expect("bundled scenario");
    let trace = run_scenario(&cfg).expect("simulation runs");

    assert!(trace.collision.is_none(), "sine scenario must not collide");
    let switches = trace.mode_switch_count();
    assert!(switches >= 2, "expected at least 2 mode switches, saw {switches}");

    let ctrl = cfg.controller_config();
    for s in &trace.samples {
        assert_eq!(s.d_rel, s.x_lead - s.x_ego, "d_rel not recomputable at t={}", s.t);
        assert_eq!(
            s.d_safe,
            ctrl.d_default + ctrl.t_gap * s.v_ego,
            "d_safe not recomputable at t={}",
            s.t
        );
    }
    let end = trace.samples.last().expect("non-empty").t;
    assert!((end - 45.0).abs() < 1e-9, "horizon cut short at t={end}");
    println!(
        "PASS criterion 6: 45s sine run, {switches} mode switches, no collision, \
         distances recomputable at all {} samples",
        trace.samples.len()
    );
}

/// Criterion 7 — simulation is deterministic: rerunning any bundled
/// scenario yields a byte-identical trace CSV.
#[test]
fn criterion_7_reruns_are_byte_identical() {
    let names = ScenarioConfig::bundled_names();
    for name in names {
        let cfg = ScenarioConfig::load(name).expect("bundled scenario");
        let first = run_scenario(&cfg).expect("simulation runs").to_csv_string();
        let second = run_scenario(&cfg).expect("simulation runs").to_csv_string();
        assert_eq!(first, second, "rerun of `{name}` differs");
    }
    println!(
        "PASS criterion 7: {} bundled scenarios rerun to byte-identical CSVs",
        names.len()
    );
}

/// Criterion 8 — parse→print→parse is the identity on a corpus covering
/// every operator and the precedence interactions between them.
#[test]
fn criterion_8_parser_round_trip() {
    let corpus = [
        "true",
        "false",
        "p",
        "steady_state",
        "!p",
        "!!p",
        "!X !p",
        "p & q",
        "p | q",
        "p -> q",
        "p & q & r",
        "p | q | r",
        "p -> q -> r",
        "p & q | r",
        "p | q & r",
        "!p & !q",
        "!(p & q)",
        "X p",
        "X X p",
        "F p",
        "G p",
        "F F p",
        "G G p",
        "F G p",
        "G F p",
        "p U q",
        "p R q",
        "p U q U r",
        "p R q R r",
        "p U q R r",
        "(p U q) R r",
        "(p U q) U r",
        "p U (q U r)",
        "!p U q",
        "!(p U q)",
        "!(p R q)",
        "X p U q",
        "X (p U q)",
        "F p & G q",
        "p & q U r",
        "p U q & r",
        "F (p & q)",
        "G (p -> F q)",
        "G (p -> (!q U r))",
        "F G (p | q)",
        "G F (p & !q)",
        "(p -> q) & (q -> r)",
        "!F p",
        "!G !p",
        "F p -> G q",
        "p -> q | r",
        "p | q -> r",
        "!p | !q -> !r",
        "G (request -> F response)",
        "G ((p & q) -> F (q | r))",
        "X (p & X (q & X r))",
        "G (p -> X F q)",
        "((p))",
    ];
    assert!(corpus.len() >= 50, "corpus too small: {}", corpus.len());
    for text in corpus {
        let first = parse_formula(text).unwrap_or_else(|e| panic!("parse `{text}`: {e}"));
        let printed = first.to_string();
        let second =
            parse_formula(&printed).unwrap_or_else(|e| panic!("reparse `{printed}`: {e}"));
        assert_eq!(first, second, "round trip changed `{text}` (printed `{printed}`)");
    }
    println!(
        "PASS criterion 8: parse-print-parse identity on {} formulas",
        corpus.len()
    );
}
