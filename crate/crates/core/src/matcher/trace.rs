//! Trace document: the structured-text artifact a matching run emits and
//! the replay command reads back. Key order is fixed so identical runs
//! produce byte-identical files.

use thiserror::Error;

use crate::app_model::{UiEvent, WidgetRef};
use crate::s2r_extract::Direction;

use super::{Hyperparams, Matched, Trace};

#[derive(Debug, Error, PartialEq)]
pub enum TraceError {
    #[error("trace line {line}: {message}")]
    Malformed { line: usize, message: String },
}

/// Serialize a trace with the run's parameters echoed.
pub fn write_trace(
    trace: &Trace,
    hyper: &Hyperparams,
    policy: &str,
    crash_message: &str,
) -> String {
    let mut out = String::new();
    let mut line = |s: String| {
        out.push_str(&s);
        out.push('\n');
    };
    line("schema_version: 1".into());
    line(format!("policy: {policy}"));
    line(format!("crash_message: {crash_message}"));
    line(format!("seed: {}", hyper.seed));
    line(format!("alpha: {}", hyper.alpha));
    line(format!("gamma: {}", hyper.gamma));
    line(format!("epsilon: {}", hyper.epsilon));
    line(format!("delta: {}", hyper.delta));
    line(format!("d: {}", hyper.d));
    line(format!("r_d: {}", hyper.r_d));
    line(format!("r_e: {}", hyper.r_e));
    line(format!("r_f: {}", hyper.r_f));
    line(format!("n0: {}", hyper.n0));
    line(format!("episode_budget: {}", hyper.episode_budget));
    line(format!(
        "step_budget: {}",
        hyper
            .step_budget
            .map_or("default".to_string(), |b| b.to_string())
    ));
    line(format!("success: {}", trace.success));
    line(format!("episodes_used: {}", trace.episodes_used));
    line(format!(
        "final_message: {}",
        trace.final_message.as_deref().unwrap_or("-")
    ));
    line(format!("steps: {}", trace.steps.len()));
    for (i, step) in trace.steps.iter().enumerate() {
        line(String::new());
        line(format!("[step {}]", i + 1));
        line(format!("event: {}", step.action.event));
        line(format!(
            "matched: {}",
            match step.action.matched {
                Matched::Step(i) => i.to_string(),
                Matched::Noop => "noop".to_string(),
            }
        ));
        line(format!("reward: {}", step.reward));
        line(format!("outcome: {}", step.outcome.describe()));
    }
    out
}

/// A trace read back from disk: enough to replay and compare.
#[derive(Debug, Clone, PartialEq)]
pub struct ParsedTrace {
    pub policy: String,
    pub crash_message: String,
    pub seed: u64,
    pub success: bool,
    pub episodes_used: usize,
    pub final_message: Option<String>,
    pub events: Vec<UiEvent>,
    pub matched: Vec<Matched>,
    pub outcomes: Vec<String>,
}

/// Parse a trace document produced by [`write_trace`].
pub fn parse_trace(text: &str) -> Result<ParsedTrace, TraceError> {
    let mut policy = String::new();
    let mut crash_message = String::new();
    let mut seed = 0u64;
    let mut success = false;
    let mut episodes_used = 0usize;
    let mut final_message = None;
    let mut events = Vec::new();
    let mut matched = Vec::new();
    let mut outcomes = Vec::new();

    let fail = |line: usize, message: &str| TraceError::Malformed {
        line,
        message: message.to_string(),
    };

    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim_end();
        if line.is_empty() || line.starts_with('[') {
            continue;
        }
        let (key, value) = line
            .split_once(": ")
            .or_else(|| line.strip_suffix(':').map(|k| (k, "")))
            .ok_or_else(|| fail(line_no, "expected `key: value`"))?;
        match key {
            "schema_version" => {
                if value != "1" {
                    return Err(fail(line_no, "unsupported schema_version"));
                }
            }
            "policy" => policy = value.to_string(),
            "crash_message" => crash_message = value.to_string(),
            "seed" => {
                seed = value
                    .parse()
                    .map_err(|_| fail(line_no, "seed must be an integer"))?
            }
            "success" => {
                success = value
                    .parse()
                    .map_err(|_| fail(line_no, "success must be true or false"))?
            }
            "episodes_used" => {
                episodes_used = value
                    .parse()
                    .map_err(|_| fail(line_no, "episodes_used must be an integer"))?
            }
            "final_message" => {
                final_message = if value == "-" {
                    None
                } else {
                    Some(value.to_string())
                }
            }
            "event" => events.push(parse_event(value, line_no)?),
            "matched" => matched.push(if value == "noop" {
                Matched::Noop
            } else {
                Matched::Step(
                    value
                        .parse()
                        .map_err(|_| fail(line_no, "matched must be an index or `noop`"))?,
                )
            }),
            "outcome" => outcomes.push(value.to_string()),
            // Echoed hyperparameters are informational.
            _ => {}
        }
    }

    if events.len() != matched.len() || events.len() != outcomes.len() {
        return Err(fail(0, "step records are incomplete"));
    }
    Ok(ParsedTrace {
        policy,
        crash_message,
        seed,
        success,
        episodes_used,
        final_message,
        events,
        matched,
        outcomes,
    })
}

fn parse_event(text: &str, line: usize) -> Result<UiEvent, TraceError> {
    let fail = |message: &str| TraceError::Malformed {
        line,
        message: message.to_string(),
    };
    let (kind, rest) = text
        .split_once(' ')
        .map(|(k, r)| (k, r.trim()))
        .unwrap_or((text, ""));
    match kind {
        "click" => {
            let widget = WidgetRef::parse(rest).ok_or_else(|| fail("bad widget ref"))?;
            Ok(UiEvent::Click(widget))
        }
        "input" => {
            let (target, value) = rest
                .split_once(" = ")
                .ok_or_else(|| fail("input event needs `widget = value`"))?;
            let widget = WidgetRef::parse(target.trim()).ok_or_else(|| fail("bad widget ref"))?;
            Ok(UiEvent::Input(widget, value.to_string()))
        }
        "scroll" => Direction::parse(rest)
            .map(UiEvent::Scroll)
            .ok_or_else(|| fail("bad scroll direction")),
        "swipe" => Direction::parse(rest)
            .map(UiEvent::Swipe)
            .ok_or_else(|| fail("bad swipe direction")),
        "rotate" => Ok(UiEvent::Rotate),
        other => Err(fail(&format!("unknown event kind {other:?}"))),
    }
}
