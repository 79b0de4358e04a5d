//! Declarative finite-state simulation of an app under test.
//!
//! A model declares screens, widgets (each describable by text, resource id
//! and content description), transitions and crash conditions; see
//! `docs/app-model.md` for the file format. [`DeviceState`] plays the role
//! of a view hierarchy snapshot: current screen, orientation, text-field
//! contents and per-screen scroll offsets.
//!
//! The [`UiDriver`] trait is the five-operation surface the matcher drives:
//! reset, enumerate events, execute one event, compare states, canonical
//! state key. Only the simulator backend implements it here; a real-device
//! driver would plug in behind the same trait.

mod schema;

pub use schema::{load_model, parse_model};

use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

use crate::s2r_extract::{ActionKind, Direction};

/// A widget addressed as `screen/key`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct WidgetRef {
    pub screen: String,
    pub key: String,
}

impl WidgetRef {
    pub fn new(screen: impl Into<String>, key: impl Into<String>) -> Self {
        WidgetRef {
            screen: screen.into(),
            key: key.into(),
        }
    }

    pub fn parse(s: &str) -> Option<WidgetRef> {
        let (screen, key) = s.split_once('/')?;
        if screen.is_empty() || key.is_empty() {
            return None;
        }
        Some(WidgetRef::new(screen, key))
    }
}

impl fmt::Display for WidgetRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.screen, self.key)
    }
}

/// A widget and its three description attributes.
#[derive(Debug, Clone, PartialEq)]
pub struct Widget {
    pub key: String,
    pub text: Option<String>,
    pub resource_id: Option<String>,
    pub content_description: Option<String>,
    pub clickable: bool,
    pub editable: bool,
    /// Widget only appears once the screen is scrolled at least this far.
    pub visible_from_offset: Option<u32>,
}

impl Widget {
    /// The description attributes that are present, in the fixed order
    /// text, resource id, content description.
    pub fn descriptions(&self) -> impl Iterator<Item = &str> {
        self.text
            .as_deref()
            .into_iter()
            .chain(self.resource_id.as_deref())
            .chain(self.content_description.as_deref())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Screen {
    pub id: String,
    pub widgets: Vec<Widget>,
    pub scrollable: bool,
    pub max_scroll: u32,
}

impl Screen {
    pub fn widget(&self, key: &str) -> Option<&Widget> {
        self.widgets.iter().find(|w| w.key == key)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Orientation {
    Portrait,
    Landscape,
}

impl Orientation {
    fn toggled(self) -> Orientation {
        match self {
            Orientation::Portrait => Orientation::Landscape,
            Orientation::Landscape => Orientation::Portrait,
        }
    }

    fn letter(self) -> char {
        match self {
            Orientation::Portrait => 'P',
            Orientation::Landscape => 'L',
        }
    }
}

/// A concrete UI event, executable on the simulator.
#[derive(Debug, Clone, PartialEq)]
pub enum UiEvent {
    Click(WidgetRef),
    Input(WidgetRef, String),
    Scroll(Direction),
    Swipe(Direction),
    Rotate,
}

impl UiEvent {
    pub fn kind(&self) -> ActionKind {
        match self {
            UiEvent::Click(_) => ActionKind::Click,
            UiEvent::Input(..) => ActionKind::Input,
            UiEvent::Scroll(_) => ActionKind::Scroll,
            UiEvent::Swipe(_) => ActionKind::Swipe,
            UiEvent::Rotate => ActionKind::Rotate,
        }
    }

    /// The widget the event interacts with, for click and input events.
    pub fn widget(&self) -> Option<&WidgetRef> {
        match self {
            UiEvent::Click(w) | UiEvent::Input(w, _) => Some(w),
            _ => None,
        }
    }
}

impl fmt::Display for UiEvent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            UiEvent::Click(w) => write!(f, "click {w}"),
            UiEvent::Input(w, v) => write!(f, "input {w} = {v}"),
            UiEvent::Scroll(d) => write!(f, "scroll {d}"),
            UiEvent::Swipe(d) => write!(f, "swipe {d}"),
            UiEvent::Rotate => write!(f, "rotate"),
        }
    }
}

/// An available event before value binding: input slots carry no value yet.
#[derive(Debug, Clone, PartialEq)]
pub enum EventTemplate {
    Click(WidgetRef),
    Input(WidgetRef),
    Scroll(Direction),
    Swipe(Direction),
    Rotate,
}

impl EventTemplate {
    pub fn kind(&self) -> ActionKind {
        match self {
            EventTemplate::Click(_) => ActionKind::Click,
            EventTemplate::Input(_) => ActionKind::Input,
            EventTemplate::Scroll(_) => ActionKind::Scroll,
            EventTemplate::Swipe(_) => ActionKind::Swipe,
            EventTemplate::Rotate => ActionKind::Rotate,
        }
    }

    pub fn direction(&self) -> Option<Direction> {
        match self {
            EventTemplate::Scroll(d) | EventTemplate::Swipe(d) => Some(*d),
            _ => None,
        }
    }

    /// Bind an input value, producing a concrete event. Non-input templates
    /// ignore the value.
    pub fn bind(&self, value: &str) -> UiEvent {
        match self {
            EventTemplate::Click(w) => UiEvent::Click(w.clone()),
            EventTemplate::Input(w) => UiEvent::Input(w.clone(), value.to_string()),
            EventTemplate::Scroll(d) => UiEvent::Scroll(*d),
            EventTemplate::Swipe(d) => UiEvent::Swipe(*d),
            EventTemplate::Rotate => UiEvent::Rotate,
        }
    }
}

/// Transition trigger pattern. Input patterns may constrain the value.
#[derive(Debug, Clone, PartialEq)]
pub enum EventPattern {
    Click(String),
    Input(String, ValuePattern),
    Scroll(Direction),
    Swipe(Direction),
    Rotate,
}

#[derive(Debug, Clone, PartialEq)]
pub enum ValuePattern {
    Any,
    Exact(String),
    Greater(f64),
    Less(f64),
}

impl ValuePattern {
    fn matches(&self, value: &str) -> bool {
        match self {
            ValuePattern::Any => true,
            ValuePattern::Exact(want) => value == want,
            ValuePattern::Greater(bound) => {
                value.trim().parse::<f64>().is_ok_and(|v| v > *bound)
            }
            ValuePattern::Less(bound) => value.trim().parse::<f64>().is_ok_and(|v| v < *bound),
        }
    }

    /// Exact beats numeric beats wildcard.
    fn specificity(&self) -> u8 {
        match self {
            ValuePattern::Exact(_) => 2,
            ValuePattern::Greater(_) | ValuePattern::Less(_) => 1,
            ValuePattern::Any => 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Target {
    Screen(String),
    Crash(String),
    SelfLoop,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Transition {
    pub from: String,
    pub on: EventPattern,
    pub to: Target,
}

impl Transition {
    fn matches(&self, screen: &str, event: &UiEvent) -> bool {
        if self.from != screen {
            return false;
        }
        match (&self.on, event) {
            (EventPattern::Click(key), UiEvent::Click(w)) => *key == w.key,
            (EventPattern::Input(key, pat), UiEvent::Input(w, value)) => {
                *key == w.key && pat.matches(value)
            }
            (EventPattern::Scroll(pd), UiEvent::Scroll(d)) => pd == d,
            (EventPattern::Swipe(pd), UiEvent::Swipe(d)) => pd == d,
            (EventPattern::Rotate, UiEvent::Rotate) => true,
            _ => false,
        }
    }

    fn specificity(&self) -> u8 {
        match &self.on {
            EventPattern::Input(_, pat) => pat.specificity(),
            _ => 0,
        }
    }
}

/// View-hierarchy abstraction: screen, orientation, text-field contents and
/// per-screen scroll offsets. Empty field values and zero offsets are not
/// stored, so equality and the state key agree on untouched defaults.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DeviceState {
    pub screen: String,
    pub orientation: Orientation,
    field_values: BTreeMap<String, String>,
    scroll_offsets: BTreeMap<String, u32>,
}

impl DeviceState {
    fn new(screen: &str) -> Self {
        DeviceState {
            screen: screen.to_string(),
            orientation: Orientation::Portrait,
            field_values: BTreeMap::new(),
            scroll_offsets: BTreeMap::new(),
        }
    }

    pub fn field_value(&self, widget: &WidgetRef) -> &str {
        self.field_values
            .get(&widget.to_string())
            .map(String::as_str)
            .unwrap_or("")
    }

    fn set_field_value(&mut self, widget: &WidgetRef, value: &str) {
        let key = widget.to_string();
        if value.is_empty() {
            self.field_values.remove(&key);
        } else {
            self.field_values.insert(key, value.to_string());
        }
    }

    pub fn scroll_offset(&self, screen: &str) -> u32 {
        self.scroll_offsets.get(screen).copied().unwrap_or(0)
    }

    fn set_scroll_offset(&mut self, screen: &str, offset: u32) {
        if offset == 0 {
            self.scroll_offsets.remove(screen);
        } else {
            self.scroll_offsets.insert(screen.to_string(), offset);
        }
    }
}

/// Result of executing one event.
#[derive(Debug, Clone, PartialEq)]
pub enum Outcome<S = DeviceState> {
    NewState(S),
    Crashed(String),
    NoChange,
}

#[derive(Debug, Error, PartialEq)]
pub enum ModelError {
    #[error("schema error at {path}: {message}")]
    SchemaError { path: String, message: String },
    #[error("transition at {path} references undeclared screen {screen:?}")]
    DanglingScreenRef { screen: String, path: String },
    #[error("ambiguous transitions at {path}: {message}")]
    AmbiguousTransition { path: String, message: String },
    #[error("illegal event {event}: {reason}")]
    IllegalEvent { event: String, reason: String },
}

/// The five-operation surface between the matcher and a device backend.
pub trait UiDriver {
    type State: Clone + PartialEq + fmt::Debug;

    /// Fresh state at the app's entry point.
    fn reset(&self) -> Self::State;
    /// Events executable in this state, in deterministic order. Input
    /// templates carry no value; the caller binds one.
    fn available_events(&self, state: &Self::State) -> Vec<EventTemplate>;
    /// Execute one event.
    fn execute(&self, state: &Self::State, event: &UiEvent)
        -> Result<Outcome<Self::State>, ModelError>;
    /// Are two states the same view hierarchy?
    fn vh_equal(&self, a: &Self::State, b: &Self::State) -> bool;
    /// Canonical key, injective over reachable states.
    fn state_key(&self, state: &Self::State) -> String;
    /// Widget lookup for similarity scoring.
    fn widget(&self, widget: &WidgetRef) -> Option<&Widget>;
}

/// A validated app model.
#[derive(Debug, Clone)]
pub struct AppModel {
    pub name: String,
    pub initial_screen: String,
    pub screens: Vec<Screen>,
    /// Crash id -> message.
    pub crashes: BTreeMap<String, String>,
    pub transitions: Vec<Transition>,
}

impl AppModel {
    pub fn screen(&self, id: &str) -> Option<&Screen> {
        self.screens.iter().find(|s| s.id == id)
    }

    pub fn initial_state(&self) -> DeviceState {
        DeviceState::new(&self.initial_screen)
    }

    pub fn crash_message(&self, id: &str) -> Option<&str> {
        self.crashes.get(id).map(String::as_str)
    }

    fn visible(&self, state: &DeviceState, widget: &Widget) -> bool {
        match widget.visible_from_offset {
            None => true,
            Some(offset) => state.scroll_offset(&state.screen) >= offset,
        }
    }

    fn illegal(&self, event: &UiEvent, reason: impl Into<String>) -> ModelError {
        ModelError::IllegalEvent {
            event: event.to_string(),
            reason: reason.into(),
        }
    }

    fn check_widget_event(
        &self,
        state: &DeviceState,
        event: &UiEvent,
        widget_ref: &WidgetRef,
        need_clickable: bool,
    ) -> Result<(), ModelError> {
        if widget_ref.screen != state.screen {
            return Err(self.illegal(event, "widget is not on the current screen"));
        }
        let screen = self
            .screen(&state.screen)
            .ok_or_else(|| self.illegal(event, "unknown screen"))?;
        let widget = screen
            .widget(&widget_ref.key)
            .ok_or_else(|| self.illegal(event, "unknown widget"))?;
        if !self.visible(state, widget) {
            return Err(self.illegal(event, "widget is not visible at this scroll offset"));
        }
        if need_clickable && !widget.clickable {
            return Err(self.illegal(event, "widget is not clickable"));
        }
        if !need_clickable && !widget.editable {
            return Err(self.illegal(event, "widget is not editable"));
        }
        Ok(())
    }

    fn best_transition(&self, screen: &str, event: &UiEvent) -> Option<&Transition> {
        self.transitions
            .iter()
            .filter(|t| t.matches(screen, event))
            .max_by_key(|t| t.specificity())
    }
}

impl UiDriver for AppModel {
    type State = DeviceState;

    fn reset(&self) -> DeviceState {
        self.initial_state()
    }

    fn available_events(&self, state: &DeviceState) -> Vec<EventTemplate> {
        let mut events = Vec::new();
        let screen = match self.screen(&state.screen) {
            Some(s) => s,
            None => return events,
        };
        for widget in &screen.widgets {
            if !self.visible(state, widget) {
                continue;
            }
            let widget_ref = WidgetRef::new(&screen.id, &widget.key);
            if widget.clickable {
                events.push(EventTemplate::Click(widget_ref.clone()));
            }
            if widget.editable {
                events.push(EventTemplate::Input(widget_ref));
            }
        }
        if screen.scrollable {
            events.push(EventTemplate::Scroll(Direction::Up));
            events.push(EventTemplate::Scroll(Direction::Down));
        }
        events.push(EventTemplate::Swipe(Direction::Left));
        events.push(EventTemplate::Swipe(Direction::Right));
        events.push(EventTemplate::Rotate);
        events
    }

    fn execute(
        &self,
        state: &DeviceState,
        event: &UiEvent,
    ) -> Result<Outcome<DeviceState>, ModelError> {
        let screen = self
            .screen(&state.screen)
            .ok_or_else(|| self.illegal(event, "unknown screen"))?;

        let mut next = state.clone();
        match event {
            UiEvent::Click(w) => {
                self.check_widget_event(state, event, w, true)?;
            }
            UiEvent::Input(w, value) => {
                self.check_widget_event(state, event, w, false)?;
                next.set_field_value(w, value);
            }
            UiEvent::Scroll(dir) => {
                if !screen.scrollable {
                    return Err(self.illegal(event, "screen is not scrollable"));
                }
                let offset = state.scroll_offset(&screen.id);
                let new_offset = match dir {
                    Direction::Down => offset.saturating_add(1).min(screen.max_scroll),
                    Direction::Up => offset.saturating_sub(1),
                    _ => return Err(self.illegal(event, "scroll direction must be up or down")),
                };
                next.set_scroll_offset(&screen.id, new_offset);
            }
            UiEvent::Swipe(dir) => {
                if !matches!(dir, Direction::Left | Direction::Right) {
                    return Err(self.illegal(event, "swipe direction must be left or right"));
                }
            }
            UiEvent::Rotate => {
                next.orientation = next.orientation.toggled();
            }
        }

        if let Some(transition) = self.best_transition(&state.screen, event) {
            match &transition.to {
                Target::Crash(id) => {
                    let message = self
                        .crash_message(id)
                        .expect("crash ids validated at load");
                    return Ok(Outcome::Crashed(message.to_string()));
                }
                Target::Screen(id) => next.screen = id.clone(),
                Target::SelfLoop => {}
            }
        }

        if next == *state {
            Ok(Outcome::NoChange)
        } else {
            Ok(Outcome::NewState(next))
        }
    }

    fn vh_equal(&self, a: &DeviceState, b: &DeviceState) -> bool {
        a == b
    }

    fn state_key(&self, state: &DeviceState) -> String {
        let fields = state
            .field_values
            .iter()
            .map(|(k, v)| format!("{}={}", escape(k), escape(v)))
            .collect::<Vec<_>>()
            .join(";");
        let scrolls = state
            .scroll_offsets
            .iter()
            .map(|(k, v)| format!("{}={}", escape(k), v))
            .collect::<Vec<_>>()
            .join(";");
        format!(
            "screen={}|orient={}|fields={}|scroll={}",
            escape(&state.screen),
            state.orientation.letter(),
            fields,
            scrolls
        )
    }

    fn widget(&self, widget_ref: &WidgetRef) -> Option<&Widget> {
        self.screen(&widget_ref.screen)?.widget(&widget_ref.key)
    }
}

fn escape(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for c in s.chars() {
        match c {
            '%' => out.push_str("%25"),
            ';' => out.push_str("%3B"),
            '=' => out.push_str("%3D"),
            '|' => out.push_str("%7C"),
            c => out.push(c),
        }
    }
    out
}
