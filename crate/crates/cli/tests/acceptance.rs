//! Acceptance suite. One test per criterion; each prints a PASS line when
//! it holds (run with `-- --nocapture` to see them):
//!
//! 1. Reordering fidelity on the bundled report fixture.
//! 2. Extraction precision/recall >= 0.90 on the ground-truth corpus.
//! 3. Missing-step bridging: impossible with no no-op budget, learned with
//!    a budget of one.
//! 4. Local-optimum escape: the greedy baseline fails the trap scenario,
//!    Q-learning reproduces it.
//! 5. Q-learning converges to the value-iteration fixpoint on a toy MDP,
//!    and degenerate-parameter identities hold exactly.
//! 6. Every success trace replays through the model alone.
//! 7. Reproduce runs are byte-identical given a seed.
//! 8. Module invariants hold over 1,000 randomized cases each.

use std::collections::HashMap;
use std::path::PathBuf;
use std::time::{Duration, Instant};

use proptest::prelude::*;
use proptest::test_runner::{Config as ProptestConfig, TestRunner};

use reproforge_cli::commands::{cmd_extract, cmd_replay, cmd_reproduce};
use reproforge_cli::config::{Policy, RunConfig};
use reproforge_cli::metrics::score;
use reproforge_cli::pipeline::{extract_report, Resources};
use reproforge_core::app_model::{load_model, Outcome, UiDriver};
use reproforge_core::embeddings::{similarity, VectorStore};
use reproforge_core::matcher::{Hyperparams, Matched, Matcher, QTable};
use reproforge_core::reorder::{find_outermost_conjunction, normalize, ConnectiveLexicon};
use reproforge_core::s2r_extract::parse_s2rs;
use reproforge_core::sentence_ingest::{parse_restricted, tokenize};

fn corpus() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../corpus")
}

fn scenario_dir(name: &str) -> PathBuf {
    corpus().join("scenarios").join(name)
}

fn scenario_config(name: &str, seed: u64, out: Option<PathBuf>) -> RunConfig {
    let dir = scenario_dir(name);
    let cfg_text = std::fs::read_to_string(dir.join("scenario.cfg")).unwrap();
    let crash_message = cfg_text
        .lines()
        .find_map(|l| l.strip_prefix("crash_message: "))
        .unwrap()
        .to_string();
    let noop_budget: Option<u32> = cfg_text
        .lines()
        .find_map(|l| l.strip_prefix("noop_budget: "))
        .map(|v| v.parse().unwrap());

    let mut config = RunConfig {
        report_path: Some(dir.join("report.txt")),
        app_model_path: Some(dir.join("app.model")),
        crash_message: Some(crash_message),
        out_path: out,
        ..RunConfig::default()
    };
    config.hyper.seed = seed;
    if let Some(n0) = noop_budget {
        config.hyper.n0 = n0;
    }
    config
}

fn pass(criterion: u32, name: &str) {
    println!("[acceptance] criterion {criterion} ({name}): PASS");
}

// ---------------------------------------------------------------------------
// Criterion 1 — reordering fidelity
// ---------------------------------------------------------------------------

#[test]
fn criterion_1_reordering_fidelity() {
    let started = Instant::now();
    let report = std::fs::read_to_string(corpus().join("fig1/report.txt")).unwrap();
    let expected = std::fs::read_to_string(corpus().join("fig1/expected_order.txt")).unwrap();

    let lexicon = ConnectiveLexicon::default();
    let mut got = Vec::new();
    for line in report.lines().filter(|l| !l.trim().is_empty()) {
        let tree = parse_restricted(line).unwrap();
        got.extend(
            normalize(tree, &lexicon)
                .unwrap()
                .iter()
                .map(|t| t.yield_text()),
        );
    }
    let want: Vec<String> = expected.lines().map(str::to_string).collect();
    assert_eq!(got, want, "reordered sentence list must match exactly");
    assert!(
        started.elapsed() < Duration::from_secs(1),
        "took {:?}",
        started.elapsed()
    );
    pass(1, "reordering fidelity");
}

// ---------------------------------------------------------------------------
// Criterion 2 — extraction corpus precision/recall
// ---------------------------------------------------------------------------

#[test]
fn criterion_2_extraction_corpus() {
    let started = Instant::now();
    let dir = corpus().join("extraction/main");
    let report_text = std::fs::read_to_string(dir.join("report.txt")).unwrap();
    let truth = parse_s2rs(&std::fs::read_to_string(dir.join("expected_s2rs.txt")).unwrap())
        .unwrap();

    let resources = Resources::load(&RunConfig::default()).unwrap();
    let report = extract_report(
        &report_text,
        reproforge_cli::config::InputMode::Text,
        &resources,
        0.1,
    )
    .unwrap();
    let pr = score(&report.steps, &truth);

    assert!(
        pr.precision() >= 0.90,
        "precision {:.4} below 0.90 ({} correct / {} extracted)",
        pr.precision(),
        pr.correct,
        pr.extracted
    );
    assert!(
        pr.recall() >= 0.90,
        "recall {:.4} below 0.90 ({} correct / {} truth)",
        pr.recall(),
        pr.correct,
        pr.truth
    );
    assert!(
        started.elapsed() < Duration::from_secs(5),
        "took {:?}",
        started.elapsed()
    );
    pass(2, "extraction corpus precision/recall");
}

// ---------------------------------------------------------------------------
// Criterion 3 — missing-step bridging
// ---------------------------------------------------------------------------

/// Exhaustive breadth-first search over raw event sequences.
fn shortest_crash(model: &reproforge_core::app_model::AppModel, message: &str, depth: usize) -> Option<usize> {
    use std::collections::VecDeque;
    let mut queue = VecDeque::new();
    queue.push_back((model.reset(), 0usize));
    let mut seen = std::collections::HashSet::new();
    while let Some((state, len)) = queue.pop_front() {
        if len >= depth {
            continue;
        }
        for template in model.available_events(&state) {
            let event = template.bind("test");
            match model.execute(&state, &event).unwrap() {
                Outcome::Crashed(m) => {
                    if m.trim() == message.trim() {
                        return Some(len + 1);
                    }
                }
                Outcome::NewState(next) => {
                    let key = model.state_key(&next);
                    if seen.insert(key) {
                        queue.push_back((next, len + 1));
                    }
                }
                Outcome::NoChange => {}
            }
        }
    }
    None
}

#[test]
fn criterion_3_missing_step_bridging() {
    // Ground truth by exhaustive search: the crash needs three events while
    // the report describes two steps.
    let model = load_model(&scenario_dir("missing_step").join("app.model")).unwrap();
    let message = "IllegalStateException in DeleteHandler";
    assert_eq!(shortest_crash(&model, message, 5), Some(3));
    assert_eq!(shortest_crash(&model, message, 2), None);

    let mut bridged = 0;
    for seed in [1, 2, 3] {
        let started = Instant::now();

        let mut without = scenario_config("missing_step", seed, None);
        without.hyper.n0 = 0;
        without.out_path = None;
        let (_, trace, code) = cmd_reproduce(&without).unwrap();
        assert!(!trace.success, "seed {seed} must fail with n0 = 0");
        assert_eq!(code, 1);
        assert_eq!(trace.episodes_used, 500, "budget exhausted, not timed out");

        let mut with = scenario_config("missing_step", seed, None);
        with.hyper.n0 = 1;
        let (_, trace, _) = cmd_reproduce(&with).unwrap();
        if trace.success {
            assert!(trace.episodes_used <= 500);
            bridged += 1;
        }
        assert!(
            started.elapsed() < Duration::from_secs(30),
            "seed {seed} took {:?}",
            started.elapsed()
        );
    }
    assert!(bridged >= 2, "only {bridged}/3 seeds bridged the missing step");
    pass(3, "missing-step bridging");
}

// ---------------------------------------------------------------------------
// Criterion 4 — local-optimum escape
// ---------------------------------------------------------------------------

#[test]
fn criterion_4_local_optimum_escape() {
    let mut greedy = scenario_config("greedy_trap", 1, None);
    greedy.policy = Policy::Greedy;
    let (_, trace, code) = cmd_reproduce(&greedy).unwrap();
    assert!(!trace.success, "the greedy baseline must fall into the trap");
    assert_eq!(code, 1);

    let mut escaped = 0;
    for seed in [1, 2, 3] {
        let started = Instant::now();
        let config = scenario_config("greedy_trap", seed, None);
        let (_, trace, _) = cmd_reproduce(&config).unwrap();
        if trace.success {
            assert!(trace.episodes_used <= 500);
            escaped += 1;
        }
        assert!(
            started.elapsed() < Duration::from_secs(60),
            "seed {seed} took {:?}",
            started.elapsed()
        );
    }
    assert!(escaped >= 2, "only {escaped}/3 seeds escaped the trap");
    pass(4, "local-optimum escape");
}

// ---------------------------------------------------------------------------
// Criterion 5 — Q-learning correctness on a toy MDP
// ---------------------------------------------------------------------------

/// Three-state deterministic chain: s0 -a(+1)-> s1, s0 -b(0)-> terminal,
/// s1 -a(+2)-> terminal, s1 -b(-1)-> s0.
fn toy_transitions() -> Vec<(&'static str, &'static str, f64, Option<&'static str>)> {
    vec![
        ("s0", "a", 1.0, Some("s1")),
        ("s0", "b", 0.0, None),
        ("s1", "a", 2.0, None),
        ("s1", "b", -1.0, Some("s0")),
    ]
}

#[test]
fn criterion_5_q_learning_correctness() {
    let gamma = 0.9;
    let transitions = toy_transitions();

    // Independent value-iteration oracle.
    let mut oracle: HashMap<(&str, &str), f64> = transitions
        .iter()
        .map(|(s, a, _, _)| ((*s, *a), 0.0))
        .collect();
    for _ in 0..10_000 {
        let snapshot = oracle.clone();
        for (s, a, r, dest) in &transitions {
            let future = dest.map_or(0.0, |d| {
                transitions
                    .iter()
                    .filter(|(s2, _, _, _)| *s2 == d)
                    .map(|(s2, a2, _, _)| snapshot[&(*s2, *a2)])
                    .fold(f64::NEG_INFINITY, f64::max)
            });
            oracle.insert((s, a), r + gamma * future);
        }
    }

    // Q-learning sweeps over the same MDP.
    let mut q = QTable::new();
    for (s, a, _, _) in &transitions {
        q.set(s, a, 0.0);
    }
    let keys_of = |s: &str| -> Vec<String> {
        transitions
            .iter()
            .filter(|(s2, _, _, _)| *s2 == s)
            .map(|(_, a, _, _)| a.to_string())
            .collect()
    };
    let mut updates = 0;
    let mut converged = false;
    while updates < 10_000 {
        for (s, a, r, dest) in &transitions {
            let next_keys = dest.map(keys_of);
            let next = match (dest, &next_keys) {
                (Some(d), Some(k)) => Some((*d, k.as_slice())),
                _ => None,
            };
            q.update(s, a, *r, next, 0.5, gamma);
            updates += 1;
        }
        let dist = transitions
            .iter()
            .map(|(s, a, _, _)| (q.get(s, a).unwrap() - oracle[&(*s, *a)]).abs())
            .fold(0.0_f64, f64::max);
        if dist < 1e-3 {
            converged = true;
            break;
        }
    }
    assert!(converged, "no convergence within 10,000 updates");

    // Degenerate-parameter identities hold exactly.
    let mut q = QTable::new();
    q.set("s", "a", 123.0);
    q.update("s", "a", -2.5, None, 1.0, 0.0);
    assert_eq!(q.get("s", "a"), Some(-2.5));
    let keys = vec!["a".to_string()];
    q.set("t", "a", 10.0);
    q.update("s", "a", 4.0, Some(("t", &keys)), 1.0, 0.0);
    assert_eq!(q.get("s", "a"), Some(4.0));
    pass(5, "q-learning correctness");
}

// ---------------------------------------------------------------------------
// Criterion 6 — replay soundness
// ---------------------------------------------------------------------------

#[test]
fn criterion_6_replay_soundness() {
    let tmp = tempfile::tempdir().unwrap();
    let mut successes = 0;
    for scenario in ["exact_steps", "missing_step", "greedy_trap"] {
        for seed in [1, 2, 3] {
            let out = tmp.path().join(format!("{scenario}-{seed}.trace"));
            let config = scenario_config(scenario, seed, Some(out.clone()));
            let (_, trace, _) = cmd_reproduce(&config).unwrap();
            if !trace.success {
                continue;
            }
            successes += 1;
            let (verdict, code) = cmd_replay(&config, &out).unwrap();
            assert!(
                verdict.reproduced(),
                "{scenario} seed {seed}: replay said {verdict:?}"
            );
            assert_eq!(code, 0);
        }
    }
    assert!(successes > 0, "no success traces to check");
    pass(6, "replay soundness");
}

// ---------------------------------------------------------------------------
// Criterion 7 — determinism
// ---------------------------------------------------------------------------

#[test]
fn criterion_7_determinism() {
    let tmp = tempfile::tempdir().unwrap();
    for scenario in ["exact_steps", "missing_step", "greedy_trap"] {
        let out_a = tmp.path().join(format!("{scenario}-a.trace"));
        let out_b = tmp.path().join(format!("{scenario}-b.trace"));
        let config_a = scenario_config(scenario, 1, Some(out_a.clone()));
        let config_b = scenario_config(scenario, 1, Some(out_b.clone()));
        cmd_reproduce(&config_a).unwrap();
        cmd_reproduce(&config_b).unwrap();
        let bytes_a = std::fs::read(&out_a).unwrap();
        let bytes_b = std::fs::read(&out_b).unwrap();
        assert_eq!(bytes_a, bytes_b, "{scenario}: trace artifacts differ");

        let report_a = std::fs::read(out_a.with_extension("report.txt")).unwrap();
        let report_b = std::fs::read(out_b.with_extension("report.txt")).unwrap();
        assert_eq!(report_a, report_b, "{scenario}: report artifacts differ");
    }
    pass(7, "determinism");
}

// ---------------------------------------------------------------------------
// Criterion 8 — invariant property suites, 1,000 cases each
// ---------------------------------------------------------------------------

fn runner() -> TestRunner {
    TestRunner::new(ProptestConfig {
        cases: 1000,
        failure_persistence: None,
        ..ProptestConfig::default()
    })
}

fn clause_pool() -> impl Strategy<Value = String> {
    prop::sample::select(vec![
        "I click the OK button",
        "I press the BACK button",
        "I tap Save",
        "I scroll down",
        "I swipe left",
        "I rotate the screen",
        "I enter 42 on the amount field",
        "I fill the username field with alice",
        "the user opens the settings",
        "the app crashes",
    ])
    .prop_map(str::to_string)
}

fn sentence_strategy() -> impl Strategy<Value = String> {
    (
        clause_pool(),
        prop::collection::vec(
            (
                prop::sample::select(vec!["and", "then", "or", "when", "after", "once"]),
                clause_pool(),
            ),
            0..3,
        ),
    )
        .prop_map(|(head, tail)| {
            let mut out = head;
            for (conn, cl) in tail {
                out.push(' ');
                out.push_str(conn);
                out.push(' ');
                out.push_str(&cl);
            }
            out
        })
}

#[test]
fn criterion_8_invariant_suites() {
    // Leaf-yield conservation.
    runner()
        .run(&sentence_strategy(), |s| {
            let tree = parse_restricted(&s).unwrap();
            let tokens: Vec<String> = tokenize(&s).iter().map(|t| t.text.clone()).collect();
            let leaves: Vec<String> =
                tree.leaf_tokens().iter().map(|t| t.text.clone()).collect();
            prop_assert_eq!(tokens, leaves);
            Ok(())
        })
        .unwrap();

    // Normalize idempotence.
    let lexicon = ConnectiveLexicon::default();
    runner()
        .run(&sentence_strategy(), |s| {
            let tree = parse_restricted(&s).unwrap();
            for out in normalize(tree, &lexicon).unwrap() {
                prop_assert!(find_outermost_conjunction(&out).is_none());
                let again = normalize(out.clone(), &lexicon).unwrap();
                prop_assert_eq!(again, vec![out]);
            }
            Ok(())
        })
        .unwrap();

    // Similarity symmetry and range.
    let store = VectorStore::bundled();
    let phrase = prop::collection::vec(
        prop::sample::select(vec![
            "cancel", "button", "save", "document", "photo", "screen", "zorble", "the",
        ]),
        1..4,
    )
    .prop_map(|w| w.join(" "));
    runner()
        .run(&(phrase.clone(), phrase), |(a, b)| {
            let ab = similarity(&a, &b, &store);
            let ba = similarity(&b, &a, &store);
            prop_assert!((ab - ba).abs() < 1e-12);
            prop_assert!((-1.0..=1.0).contains(&ab));
            Ok(())
        })
        .unwrap();

    // Scale invariance of the classification argmax.
    let lexicon_actions = reproforge_core::s2r_extract::ActionLexicon::default();
    runner()
        .run(
            &(
                prop::sample::select(vec!["change", "update", "take", "press", "slide"]),
                0.1f64..10.0,
            ),
            |(verb, c)| {
                let scaled = {
                    let mut text = String::new();
                    let mut lines = reproforge_core::embeddings::BUNDLED_VECTORS.lines();
                    text.push_str(lines.next().unwrap());
                    text.push('\n');
                    for line in lines {
                        let mut fields = line.split_whitespace();
                        match fields.next() {
                            None => continue,
                            Some(word) => text.push_str(word),
                        }
                        for f in fields {
                            let v: f64 = f.parse().unwrap();
                            text.push_str(&format!(" {}", v * c));
                        }
                        text.push('\n');
                    }
                    VectorStore::parse(&text).unwrap()
                };
                let base_rank: Vec<_> =
                    reproforge_core::s2r_extract::rank_actions(verb, &lexicon_actions, &store)
                        .into_iter()
                        .map(|(k, _)| k)
                        .collect();
                let scaled_rank: Vec<_> =
                    reproforge_core::s2r_extract::rank_actions(verb, &lexicon_actions, &scaled)
                        .into_iter()
                        .map(|(k, _)| k)
                        .collect();
                prop_assert_eq!(base_rank, scaled_rank);
                Ok(())
            },
        )
        .unwrap();

    // Reward bounds, Q-value bounds and no-op conservation over seeded runs
    // of the missing-step scenario.
    let dir = scenario_dir("missing_step");
    let model = load_model(&dir.join("app.model")).unwrap();
    let resources = Resources::load(&RunConfig::default()).unwrap();
    let report_text = std::fs::read_to_string(dir.join("report.txt")).unwrap();
    let report = extract_report(
        &report_text,
        reproforge_cli::config::InputMode::Text,
        &resources,
        0.1,
    )
    .unwrap();
    runner()
        .run(&(0u64..100_000), |seed| {
            let hyper = Hyperparams {
                seed,
                n0: 1,
                ..Hyperparams::default()
            };
            let reward_floor = hyper.r_d + hyper.r_e + hyper.r_f;
            let q_bound = (hyper.r_d.abs() + hyper.r_e.abs() + hyper.r_f.abs()).max(1.0)
                / (1.0 - hyper.gamma);
            let matcher = Matcher::new(
                &model,
                &report.steps,
                &resources.store,
                hyper,
                "IllegalStateException in DeleteHandler",
            );
            let mut q = QTable::new();
            let trace = matcher.run_with_qtable(&mut q).unwrap();

            let noops = trace
                .steps
                .iter()
                .filter(|s| s.action.matched == Matched::Noop)
                .count();
            prop_assert!(noops <= 1);
            for step in &trace.steps {
                prop_assert!(step.reward >= reward_floor - 1e-9);
                prop_assert!(step.reward <= 1.0 + 1e-9);
                if let Matched::Step(i) = step.action.matched {
                    prop_assert!(i < report.steps.len());
                }
            }
            for (_, _, value) in q.entries() {
                prop_assert!(value.abs() <= q_bound + 1e-9);
            }
            Ok(())
        })
        .unwrap();

    // View-hierarchy equality agrees with the canonical state key.
    let walk = prop::collection::vec(0usize..6, 0..6);
    runner()
        .run(&(walk.clone(), walk), |(a, b)| {
            let follow = |steps: &[usize]| {
                let mut state = model.reset();
                for &choice in steps {
                    let events = model.available_events(&state);
                    let event = events[choice % events.len()].bind("x");
                    if let Ok(Outcome::NewState(next)) = model.execute(&state, &event) {
                        state = next;
                    }
                }
                state
            };
            let sa = follow(&a);
            let sb = follow(&b);
            prop_assert_eq!(
                model.vh_equal(&sa, &sb),
                model.state_key(&sa) == model.state_key(&sb)
            );
            Ok(())
        })
        .unwrap();

    pass(8, "invariant property suites");
}

// ---------------------------------------------------------------------------
// Supporting check: the extract command's exit-code contract.
// ---------------------------------------------------------------------------

#[test]
fn extract_exit_codes() {
    let tmp = tempfile::tempdir().unwrap();

    let clean = tmp.path().join("clean.txt");
    std::fs::write(&clean, "I tap Save\n").unwrap();
    let config = RunConfig {
        report_path: Some(clean),
        out_path: Some(tmp.path().join("clean.out")),
        ..RunConfig::default()
    };
    let (_, code) = cmd_extract(&config).unwrap();
    assert_eq!(code, 0);

    let warny = tmp.path().join("warny.txt");
    std::fs::write(&warny, "I tap Save\nColorless green ideas sleep furiously\n").unwrap();
    let config = RunConfig {
        report_path: Some(warny),
        out_path: Some(tmp.path().join("warny.out")),
        ..RunConfig::default()
    };
    let (report, code) = cmd_extract(&config).unwrap();
    assert_eq!(code, 2);
    assert_eq!(report.warnings.len(), 1);

    let empty = tmp.path().join("empty.txt");
    std::fs::write(&empty, "").unwrap();
    let config = RunConfig {
        report_path: Some(empty),
        out_path: Some(tmp.path().join("empty.out")),
        ..RunConfig::default()
    };
    let (report, code) = cmd_extract(&config).unwrap();
    assert_eq!(code, 0);
    assert!(report.steps.is_empty());
}
