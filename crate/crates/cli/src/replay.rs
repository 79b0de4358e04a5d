//! Independent trace replay: re-execute a trace's events through the app
//! model alone — no matcher, no Q-table — and check that the run ends in
//! the expected crash.

use reproforge_core::app_model::{AppModel, Outcome, UiDriver};
use reproforge_core::matcher::ParsedTrace;

#[derive(Debug, Clone, PartialEq)]
pub enum ReplayVerdict {
    Reproduced,
    NotReproduced { detail: String },
    /// The replay diverged from the recorded outcomes; `index` is the first
    /// differing step (0-based).
    Diverged { index: usize, detail: String },
}

impl ReplayVerdict {
    pub fn reproduced(&self) -> bool {
        matches!(self, ReplayVerdict::Reproduced)
    }
}

/// Replay every event of a parsed trace and compare outcomes step by step.
pub fn replay(model: &AppModel, trace: &ParsedTrace, crash_message: &str) -> ReplayVerdict {
    let mut state = model.reset();
    let mut last_crash: Option<String> = None;

    for (index, event) in trace.events.iter().enumerate() {
        let outcome = match model.execute(&state, event) {
            Ok(o) => o,
            Err(e) => {
                return ReplayVerdict::Diverged {
                    index,
                    detail: e.to_string(),
                }
            }
        };
        let description = match &outcome {
            Outcome::NewState(s) => format!("state {}", model.state_key(s)),
            Outcome::NoChange => "nochange".to_string(),
            Outcome::Crashed(m) => format!("crash {m}"),
        };
        if let Some(recorded) = trace.outcomes.get(index) {
            if *recorded != description {
                return ReplayVerdict::Diverged {
                    index,
                    detail: format!("recorded {recorded:?}, replayed {description:?}"),
                };
            }
        }
        match outcome {
            Outcome::NewState(next) => state = next,
            Outcome::NoChange => {}
            Outcome::Crashed(message) => {
                last_crash = Some(message);
                if index + 1 < trace.events.len() {
                    return ReplayVerdict::Diverged {
                        index,
                        detail: "crash before the final recorded event".into(),
                    };
                }
            }
        }
    }

    match last_crash {
        Some(message) if message.trim() == crash_message.trim() => ReplayVerdict::Reproduced,
        Some(message) => ReplayVerdict::NotReproduced {
            detail: format!("crashed with a different message: {message:?}"),
        },
        None => ReplayVerdict::NotReproduced {
            detail: "replay ended without a crash".into(),
        },
    }
}
