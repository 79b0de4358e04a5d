//! Core engine: steps-to-reproduce extraction from natural-language bug
//! report sentences, plus Q-learning guided matching of the extracted steps
//! against a simulated app model to find a crash-reproducing event sequence.
//!
//! Pipeline overview:
//!
//! 1. [`sentence_ingest`] turns sentences into constituency parse trees,
//!    either from bracketed-tree input or via a built-in controlled-grammar
//!    parser.
//! 2. [`reorder`] splits conjuncted step spans into standalone sentences and
//!    normalizes their temporal order by connective semantics.
//! 3. [`s2r_extract`] decomposes each standalone sentence into
//!    subject/predicate/object/modifier and infers the structured step:
//!    action kind, target widget, input value, direction.
//! 4. [`app_model`] simulates the app under test as a declarative finite
//!    state machine: screens, widgets, transitions, crash conditions.
//! 5. [`matcher`] searches for an event sequence reproducing a specified
//!    crash by formulating step-to-event matching as an MDP and learning
//!    action values with tabular Q-learning.
//!
//! [`embeddings`] supplies the phrase-similarity primitive used by both
//! extraction and reward scoring.

pub mod app_model;
pub mod embeddings;
pub mod matcher;
pub mod reorder;
pub mod s2r_extract;
pub mod sentence_ingest;
