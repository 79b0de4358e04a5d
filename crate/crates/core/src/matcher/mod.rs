//! MDP formulation and Q-learning search for a crash-reproducing event
//! sequence.
//!
//! A state is (device view hierarchy, index of the next unmatched step,
//! remaining no-op budget). An action pairs a concrete UI event with either
//! the next step or a no-op marker; no-ops let the search bridge steps the
//! report never mentioned. Rewards combine the widget-description similarity
//! of matched events with penalties for events that leave the UI unchanged
//! and for dead-ending without the target crash. An episode ends on a crash
//! or when both the step list and the no-op budget are exhausted; episodes
//! repeat from the initial state until the crash with the specified message
//! is found or the episode budget runs out.

mod qtable;
mod trace;

pub use qtable::QTable;
pub use trace::{parse_trace, write_trace, ParsedTrace, TraceError};

use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::app_model::{ModelError, Outcome, UiDriver, UiEvent};
use crate::embeddings::{similarity, VectorStore};
use crate::s2r_extract::{ActionKind, S2R};

/// MDP state: device snapshot, next-step index, remaining no-op budget.
#[derive(Debug, Clone, PartialEq)]
pub struct MdpState<S> {
    pub device: S,
    pub rs_index: usize,
    pub noop_remaining: u32,
}

impl<S> MdpState<S> {
    /// Terminal once every step is matched and no no-ops remain.
    pub fn is_terminal(&self, total_steps: usize) -> bool {
        self.rs_index >= total_steps && self.noop_remaining == 0
    }
}

/// What an event was matched with: the step at an index, or a no-op.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Matched {
    Step(usize),
    Noop,
}

/// One MDP action: a concrete UI event paired with its match.
#[derive(Debug, Clone, PartialEq)]
pub struct MatchAction {
    pub event: UiEvent,
    pub matched: Matched,
}

impl MatchAction {
    /// Canonical serialization; doubles as the Q-table action key and the
    /// deterministic tie-break order.
    pub fn key(&self) -> String {
        match self.matched {
            Matched::Step(i) => format!("step{i}:{}", self.event),
            Matched::Noop => format!("noop:{}", self.event),
        }
    }
}

/// Learning and reward parameters. Penalties are negative; `d` is the
/// similarity floor below which a widget match counts as a non-synonym.
#[derive(Debug, Clone)]
pub struct Hyperparams {
    pub alpha: f64,
    pub gamma: f64,
    pub epsilon: f64,
    pub delta: f64,
    pub d: f64,
    pub r_d: f64,
    pub r_e: f64,
    pub r_f: f64,
    pub n0: u32,
    pub episode_budget: usize,
    /// Max actions per episode; `None` means steps + n0 + 4.
    pub step_budget: Option<usize>,
    pub seed: u64,
    pub wall_clock_timeout: Option<Duration>,
    /// Value bound to input events matched as no-ops (and to steps that
    /// carry no input value).
    pub default_input: String,
}

impl Default for Hyperparams {
    fn default() -> Self {
        Hyperparams {
            alpha: 0.5,
            gamma: 0.9,
            epsilon: 0.2,
            delta: 0.1,
            d: 0.55,
            r_d: -1.0,
            r_e: -2.0,
            r_f: -5.0,
            n0: 2,
            episode_budget: 500,
            step_budget: None,
            seed: 0,
            wall_clock_timeout: None,
            default_input: "test".into(),
        }
    }
}

impl Hyperparams {
    pub fn validate(&self, total_steps: usize) -> Result<(), MatchError> {
        let check = |ok: bool, what: &str| {
            if ok {
                Ok(())
            } else {
                Err(MatchError::InvalidHyperparams {
                    reason: what.to_string(),
                })
            }
        };
        check(self.alpha > 0.0 && self.alpha <= 1.0, "alpha must be in (0, 1]")?;
        check(self.gamma >= 0.0 && self.gamma < 1.0, "gamma must be in [0, 1)")?;
        check(
            (0.0..=1.0).contains(&self.epsilon),
            "epsilon must be in [0, 1]",
        )?;
        check((0.0..=2.0).contains(&self.delta), "delta must be in [0, 2]")?;
        check(self.d > 0.0 && self.d < 1.0, "d must be in (0, 1)")?;
        check(self.r_d < 0.0, "r_d must be negative")?;
        check(self.r_e < 0.0, "r_e must be negative")?;
        check(self.r_f < 0.0, "r_f must be negative")?;
        if let Some(budget) = self.step_budget {
            check(
                budget >= total_steps + self.n0 as usize,
                "step_budget must be at least steps + n0",
            )?;
        }
        Ok(())
    }

    fn effective_step_budget(&self, total_steps: usize) -> usize {
        self.step_budget
            .unwrap_or(total_steps + self.n0 as usize + 4)
    }
}

#[derive(Debug, Error)]
pub enum MatchError {
    #[error("invalid hyperparameters: {reason}")]
    InvalidHyperparams { reason: String },
    #[error(transparent)]
    Driver(#[from] ModelError),
}

/// Outcome of one executed trace step, in canonical text form.
#[derive(Debug, Clone, PartialEq)]
pub enum StepOutcome {
    /// New state, recorded as its canonical state key.
    State(String),
    NoChange,
    Crashed(String),
}

impl StepOutcome {
    pub fn describe(&self) -> String {
        match self {
            StepOutcome::State(key) => format!("state {key}"),
            StepOutcome::NoChange => "nochange".to_string(),
            StepOutcome::Crashed(msg) => format!("crash {msg}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TraceStep {
    pub action: MatchAction,
    pub outcome: StepOutcome,
    pub reward: f64,
}

/// Result of a matching run: the event/outcome list of the final episode,
/// whether the specified crash was reproduced, and how many episodes ran.
#[derive(Debug, Clone)]
pub struct Trace {
    pub steps: Vec<TraceStep>,
    pub success: bool,
    pub episodes_used: usize,
    pub final_message: Option<String>,
}

/// A successor MDP state together with the executed event's outcome.
pub type TransitionResult<S> = (MdpState<S>, Outcome<S>);

/// The matching engine: a driver, the extracted steps, an embedding store
/// and hyperparameters.
pub struct Matcher<'a, D: UiDriver> {
    driver: &'a D,
    steps: &'a [S2R],
    store: &'a VectorStore,
    hyper: Hyperparams,
    crash_message: String,
}

impl<'a, D: UiDriver> Matcher<'a, D> {
    pub fn new(
        driver: &'a D,
        steps: &'a [S2R],
        store: &'a VectorStore,
        hyper: Hyperparams,
        crash_message: impl Into<String>,
    ) -> Self {
        Matcher {
            driver,
            steps,
            store,
            hyper,
            crash_message: crash_message.into(),
        }
    }

    pub fn hyper(&self) -> &Hyperparams {
        &self.hyper
    }

    /// Canonical Q-table key of an MDP state.
    pub fn state_key(&self, state: &MdpState<D::State>) -> String {
        format!(
            "{}#rs={}#n={}",
            self.driver.state_key(&state.device),
            state.rs_index,
            state.noop_remaining
        )
    }

    pub fn initial_state(&self) -> MdpState<D::State> {
        MdpState {
            device: self.driver.reset(),
            rs_index: 0,
            noop_remaining: self.hyper.n0,
        }
    }

    /// Enumerate the actions available in a state: every available event
    /// whose kind matches the next step's action (or its alternate), plus —
    /// while no-op budget remains — every available event as a no-op match.
    pub fn infer_actions(&self, state: &MdpState<D::State>) -> Vec<MatchAction> {
        let mut actions = Vec::new();
        let events = self.driver.available_events(&state.device);

        if let Some(step) = self.steps.get(state.rs_index) {
            for template in &events {
                if !step.kinds().any(|k| k == template.kind()) {
                    continue;
                }
                if let (Some(want), Some(have)) = (step.direction, template.direction()) {
                    if want != have {
                        continue;
                    }
                }
                let value = step
                    .input_value
                    .as_deref()
                    .unwrap_or(&self.hyper.default_input);
                actions.push(MatchAction {
                    event: template.bind(value),
                    matched: Matched::Step(state.rs_index),
                });
            }
        }

        if state.noop_remaining > 0 {
            for template in &events {
                actions.push(MatchAction {
                    event: template.bind(&self.hyper.default_input),
                    matched: Matched::Noop,
                });
            }
        }
        actions
    }

    /// Similarity component of the reward. Click/input step matches score
    /// the best of the widget's three description attributes against the
    /// step's target widget, floored at `d`; everything else — gestures,
    /// no-ops, absent targets, sub-threshold matches — gets the default
    /// negative score `r_d`.
    pub fn similarity_score(&self, action: &MatchAction) -> f64 {
        let step_index = match action.matched {
            Matched::Noop => return self.hyper.r_d,
            Matched::Step(i) => i,
        };
        let widget_ref = match &action.event {
            UiEvent::Click(w) | UiEvent::Input(w, _) => w,
            _ => return self.hyper.r_d,
        };
        let Some(target) = self.steps[step_index].target_widget.as_deref() else {
            return self.hyper.r_d;
        };
        let Some(widget) = self.driver.widget(widget_ref) else {
            return self.hyper.r_d;
        };
        let best = widget
            .descriptions()
            .map(|description| similarity(description, target, self.store))
            .fold(f64::NEG_INFINITY, f64::max);
        if best < self.hyper.d {
            self.hyper.r_d
        } else {
            best
        }
    }

    /// Full reward: similarity score plus the exploration penalty when the
    /// event left the UI unchanged plus the failure penalty when the
    /// successor is a dead end without the target crash (or the crash
    /// message does not match).
    pub fn reward(
        &self,
        action: &MatchAction,
        outcome: &Outcome<D::State>,
        successor_has_actions: bool,
    ) -> f64 {
        let mut reward = self.similarity_score(action);
        if matches!(outcome, Outcome::NoChange) {
            reward += self.hyper.r_e;
        }
        let failed = match outcome {
            Outcome::Crashed(message) => !self.message_matches(message),
            _ => !successor_has_actions,
        };
        if failed {
            reward += self.hyper.r_f;
        }
        reward
    }

    fn message_matches(&self, message: &str) -> bool {
        message.trim() == self.crash_message.trim()
    }

    /// Apply one action: execute the event, then advance the step index or
    /// consume a no-op.
    pub fn transition(
        &self,
        state: &MdpState<D::State>,
        action: &MatchAction,
    ) -> Result<TransitionResult<D::State>, MatchError> {
        let outcome = self.driver.execute(&state.device, &action.event)?;
        let device = match &outcome {
            Outcome::NewState(next) => next.clone(),
            _ => state.device.clone(),
        };
        let (rs_index, noop_remaining) = match action.matched {
            Matched::Step(_) => (state.rs_index + 1, state.noop_remaining),
            Matched::Noop => (state.rs_index, state.noop_remaining - 1),
        };
        Ok((
            MdpState {
                device,
                rs_index,
                noop_remaining,
            },
            outcome,
        ))
    }

    /// Seed Q-values for a newly encountered state: click/input step matches
    /// start at their similarity score, gesture step matches at the
    /// threshold `d` so they still get explored, no-ops at their defined
    /// similarity score `r_d`.
    pub fn init_q(&self, q: &mut QTable, state_key: &str, actions: &[MatchAction]) {
        for action in actions {
            let key = action.key();
            if q.contains(state_key, &key) {
                continue;
            }
            let value = match (&action.matched, action.event.kind()) {
                (Matched::Noop, _) => self.hyper.r_d,
                (Matched::Step(_), ActionKind::Click | ActionKind::Input) => {
                    self.similarity_score(action)
                }
                (Matched::Step(_), _) => self.hyper.d,
            };
            q.set(state_key, &key, value);
        }
    }

    /// Run Q-learning episodes until the specified crash is reproduced or
    /// a budget runs out. A failed search is a `Trace` with
    /// `success = false`, not an error.
    pub fn run(&self) -> Result<Trace, MatchError> {
        self.hyper.validate(self.steps.len())?;
        let mut q = QTable::new();
        let trace = self.run_with_qtable(&mut q)?;
        Ok(trace)
    }

    /// [`Matcher::run`] exposing the learned Q-table for inspection.
    pub fn run_with_qtable(&self, q: &mut QTable) -> Result<Trace, MatchError> {
        self.hyper.validate(self.steps.len())?;
        let mut rng = ChaCha8Rng::seed_from_u64(self.hyper.seed);
        let step_budget = self.hyper.effective_step_budget(self.steps.len());
        let started = Instant::now();

        let mut episodes_used = 0;
        let mut last_episode: Vec<TraceStep> = Vec::new();

        for episode in 1..=self.hyper.episode_budget {
            if let Some(timeout) = self.hyper.wall_clock_timeout {
                if started.elapsed() >= timeout {
                    break;
                }
            }
            episodes_used = episode;
            let mut state = self.initial_state();
            let mut taken: Vec<TraceStep> = Vec::new();

            for _ in 0..step_budget {
                if state.is_terminal(self.steps.len()) {
                    break;
                }
                let actions = self.infer_actions(&state);
                if actions.is_empty() {
                    break;
                }
                let state_key = self.state_key(&state);
                self.init_q(q, &state_key, &actions);
                let chosen = select_action(q, &state_key, &actions, self.hyper.epsilon, &mut rng);
                let action = actions[chosen].clone();

                let (next, outcome) = self.transition(&state, &action)?;
                let crashed = matches!(outcome, Outcome::Crashed(_));
                let successor_actions = if crashed || next.is_terminal(self.steps.len()) {
                    Vec::new()
                } else {
                    self.infer_actions(&next)
                };
                let reward = self.reward(&action, &outcome, !successor_actions.is_empty());

                let step_outcome = match &outcome {
                    Outcome::NewState(s) => StepOutcome::State(self.driver.state_key(s)),
                    Outcome::NoChange => StepOutcome::NoChange,
                    Outcome::Crashed(m) => StepOutcome::Crashed(m.clone()),
                };
                taken.push(TraceStep {
                    action: action.clone(),
                    outcome: step_outcome,
                    reward,
                });

                if let Outcome::Crashed(message) = &outcome {
                    if self.message_matches(message) {
                        return Ok(Trace {
                            steps: taken,
                            success: true,
                            episodes_used: episode,
                            final_message: Some(message.clone()),
                        });
                    }
                }

                let action_key = action.key();
                if successor_actions.is_empty() {
                    q.update(&state_key, &action_key, reward, None, self.hyper.alpha, self.hyper.gamma);
                } else {
                    let next_key = self.state_key(&next);
                    self.init_q(q, &next_key, &successor_actions);
                    let next_action_keys: Vec<String> =
                        successor_actions.iter().map(MatchAction::key).collect();
                    q.update(
                        &state_key,
                        &action_key,
                        reward,
                        Some((&next_key, &next_action_keys)),
                        self.hyper.alpha,
                        self.hyper.gamma,
                    );
                }

                if crashed {
                    break;
                }
                state = next;
            }
            last_episode = taken;
        }

        Ok(Trace {
            steps: last_episode,
            success: false,
            episodes_used,
            final_message: None,
        })
    }

    /// Deterministic single-episode baseline: always take the
    /// highest-similarity match for the next step; fall back to a single
    /// no-op (highest seeded value, then smallest key) only when the step
    /// has no match at all. No value propagation, no restarts.
    pub fn run_greedy_baseline(&self) -> Result<Trace, MatchError> {
        self.hyper.validate(self.steps.len())?;
        let step_budget = self.hyper.effective_step_budget(self.steps.len());
        let mut state = self.initial_state();
        let mut taken: Vec<TraceStep> = Vec::new();

        for _ in 0..step_budget {
            if state.is_terminal(self.steps.len()) {
                break;
            }
            let actions = self.infer_actions(&state);
            if actions.is_empty() {
                break;
            }
            let step_matches: Vec<&MatchAction> = actions
                .iter()
                .filter(|a| matches!(a.matched, Matched::Step(_)))
                .collect();

            let action = if !step_matches.is_empty() {
                (*step_matches
                    .iter()
                    .max_by(|a, b| {
                        let (sa, sb) = (self.similarity_score(a), self.similarity_score(b));
                        sa.partial_cmp(&sb)
                            .unwrap_or(std::cmp::Ordering::Equal)
                            // Prefer the smaller key on equal scores.
                            .then_with(|| b.key().cmp(&a.key()))
                    })
                    .expect("non-empty"))
                .clone()
            } else {
                // All no-ops seed at r_d, so the smallest key wins.
                actions
                    .iter()
                    .filter(|a| matches!(a.matched, Matched::Noop))
                    .min_by_key(|a| a.key())
                    .expect("no-ops exist when the action set is non-empty")
                    .clone()
            };

            let (next, outcome) = self.transition(&state, &action)?;
            let crashed = matches!(outcome, Outcome::Crashed(_));
            let successor_actions = if crashed || next.is_terminal(self.steps.len()) {
                Vec::new()
            } else {
                self.infer_actions(&next)
            };
            let reward = self.reward(&action, &outcome, !successor_actions.is_empty());
            let step_outcome = match &outcome {
                Outcome::NewState(s) => StepOutcome::State(self.driver.state_key(s)),
                Outcome::NoChange => StepOutcome::NoChange,
                Outcome::Crashed(m) => StepOutcome::Crashed(m.clone()),
            };
            taken.push(TraceStep {
                action: action.clone(),
                outcome: step_outcome,
                reward,
            });

            if let Outcome::Crashed(message) = &outcome {
                if self.message_matches(message) {
                    return Ok(Trace {
                        steps: taken,
                        success: true,
                        episodes_used: 1,
                        final_message: Some(message.clone()),
                    });
                }
                break;
            }
            state = next;
        }

        Ok(Trace {
            steps: taken,
            success: false,
            episodes_used: 1,
            final_message: None,
        })
    }
}

/// Epsilon-greedy selection over initialized actions: with probability
/// `1 - epsilon` the argmax (ties to the smallest action key), otherwise a
/// uniform choice among the non-argmax actions. A single action is returned
/// unconditionally, without consuming randomness.
pub fn select_action(
    q: &QTable,
    state_key: &str,
    actions: &[MatchAction],
    epsilon: f64,
    rng: &mut ChaCha8Rng,
) -> usize {
    debug_assert!(!actions.is_empty());
    if actions.len() == 1 {
        return 0;
    }
    let keys: Vec<String> = actions.iter().map(MatchAction::key).collect();
    let best = q.argmax(state_key, &keys);
    if rng.random::<f64>() < epsilon {
        let others: Vec<usize> = (0..actions.len()).filter(|i| *i != best).collect();
        others[rng.random_range(0..others.len())]
    } else {
        best
    }
}
