//! Loader and validator for the sectioned model file format.
//!
//! A model file is a sequence of `[section]` headers with `key: value`
//! lines; `#` starts a comment. Sections: `[app]`, `[crash <id>]`,
//! `[screen <id>]`, `[widget <screen>/<key>]`, `[transition]`. The format is
//! documented with examples in `docs/app-model.md`.

use std::collections::BTreeMap;
use std::path::Path;

use crate::s2r_extract::Direction;

use super::{
    AppModel, EventPattern, ModelError, Screen, Target, Transition, ValuePattern, Widget,
};

/// Parse and validate a model document.
pub fn parse_model(text: &str) -> Result<AppModel, ModelError> {
    let mut doc = Document::default();
    let mut section = SectionKind::Top;

    for (idx, raw) in text.lines().enumerate() {
        let line = raw.trim();
        let line_no = idx + 1;
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        if let Some(header) = line.strip_prefix('[') {
            let header = header.strip_suffix(']').ok_or_else(|| schema(
                format!("line {line_no}"),
                "section header must end with `]`",
            ))?;
            section = doc.open_section(header.trim(), line_no)?;
            continue;
        }
        let (key, value) = line.split_once(':').ok_or_else(|| {
            schema(format!("line {line_no}"), "expected `key: value`")
        })?;
        doc.set(&section, key.trim(), value.trim(), line_no)?;
    }

    doc.finish()
}

/// Read and parse a model file.
pub fn load_model(path: &Path) -> Result<AppModel, ModelError> {
    let text = std::fs::read_to_string(path).map_err(|e| schema(
        path.display().to_string(),
        format!("cannot read file: {e}"),
    ))?;
    parse_model(&text)
}

fn schema(path: impl Into<String>, message: impl Into<String>) -> ModelError {
    ModelError::SchemaError {
        path: path.into(),
        message: message.into(),
    }
}

#[derive(Clone)]
enum SectionKind {
    Top,
    App,
    Crash(String),
    Screen(String),
    Widget { screen: String, key: String },
    Transition(usize),
}

#[derive(Default)]
struct Document {
    schema_version: Option<String>,
    name: Option<String>,
    initial_screen: Option<String>,
    crashes: BTreeMap<String, String>,
    screens: Vec<Screen>,
    transitions: Vec<PendingTransition>,
}

#[derive(Default)]
struct PendingTransition {
    from: Option<String>,
    on: Option<EventPattern>,
    to: Option<Target>,
    line: usize,
}

impl Document {
    fn open_section(&mut self, header: &str, line: usize) -> Result<SectionKind, ModelError> {
        let path = format!("line {line}");
        let mut parts = header.splitn(2, char::is_whitespace);
        let kind = parts.next().unwrap_or_default();
        let arg = parts.next().map(str::trim).unwrap_or_default();
        match kind {
            "app" => Ok(SectionKind::App),
            "crash" => {
                if arg.is_empty() {
                    return Err(schema(path, "crash section needs an id: `[crash <id>]`"));
                }
                self.crashes.entry(arg.to_string()).or_default();
                Ok(SectionKind::Crash(arg.to_string()))
            }
            "screen" => {
                if arg.is_empty() {
                    return Err(schema(path, "screen section needs an id"));
                }
                if self.screens.iter().any(|s| s.id == arg) {
                    return Err(schema(path, format!("duplicate screen {arg:?}")));
                }
                self.screens.push(Screen {
                    id: arg.to_string(),
                    widgets: Vec::new(),
                    scrollable: false,
                    max_scroll: 0,
                });
                Ok(SectionKind::Screen(arg.to_string()))
            }
            "widget" => {
                let (screen, key) = arg.split_once('/').ok_or_else(|| {
                    schema(&path, "widget section needs `[widget <screen>/<key>]`")
                })?;
                let screen_entry = self
                    .screens
                    .iter_mut()
                    .find(|s| s.id == screen)
                    .ok_or_else(|| schema(&path, format!("widget references undeclared screen {screen:?}")))?;
                if screen_entry.widgets.iter().any(|w| w.key == key) {
                    return Err(schema(&path, format!("duplicate widget key {key:?} on screen {screen:?}")));
                }
                screen_entry.widgets.push(Widget {
                    key: key.to_string(),
                    text: None,
                    resource_id: None,
                    content_description: None,
                    clickable: false,
                    editable: false,
                    visible_from_offset: None,
                });
                Ok(SectionKind::Widget {
                    screen: screen.to_string(),
                    key: key.to_string(),
                })
            }
            "transition" => {
                self.transitions.push(PendingTransition {
                    line,
                    ..PendingTransition::default()
                });
                Ok(SectionKind::Transition(self.transitions.len() - 1))
            }
            other => Err(schema(path, format!("unknown section kind {other:?}"))),
        }
    }

    fn set(
        &mut self,
        section: &SectionKind,
        key: &str,
        value: &str,
        line: usize,
    ) -> Result<(), ModelError> {
        let path = format!("line {line}");
        match section {
            SectionKind::Top => match key {
                "schema_version" => {
                    self.schema_version = Some(value.to_string());
                    Ok(())
                }
                other => Err(schema(path, format!("unknown top-level key {other:?}"))),
            },
            SectionKind::App => match key {
                "name" => {
                    self.name = Some(value.to_string());
                    Ok(())
                }
                "initial_screen" => {
                    self.initial_screen = Some(value.to_string());
                    Ok(())
                }
                other => Err(schema(path, format!("unknown app key {other:?}"))),
            },
            SectionKind::Crash(id) => match key {
                "message" => {
                    self.crashes.insert(id.clone(), value.to_string());
                    Ok(())
                }
                other => Err(schema(path, format!("unknown crash key {other:?}"))),
            },
            SectionKind::Screen(id) => {
                let screen = self
                    .screens
                    .iter_mut()
                    .find(|s| s.id == *id)
                    .expect("section opened");
                match key {
                    "scrollable" => {
                        screen.scrollable = parse_bool(value, &path)?;
                        Ok(())
                    }
                    "max_scroll" => {
                        screen.max_scroll = value.parse().map_err(|_| {
                            schema(&path, format!("max_scroll must be an integer, got {value:?}"))
                        })?;
                        Ok(())
                    }
                    other => Err(schema(path, format!("unknown screen key {other:?}"))),
                }
            }
            SectionKind::Widget { screen, key: wkey } => {
                let widget = self
                    .screens
                    .iter_mut()
                    .find(|s| s.id == *screen)
                    .and_then(|s| s.widgets.iter_mut().find(|w| w.key == *wkey))
                    .expect("section opened");
                match key {
                    "text" => widget.text = Some(value.to_string()),
                    "resource_id" => widget.resource_id = Some(value.to_string()),
                    "content_description" => {
                        widget.content_description = Some(value.to_string())
                    }
                    "clickable" => widget.clickable = parse_bool(value, &path)?,
                    "editable" => widget.editable = parse_bool(value, &path)?,
                    "visible_from_offset" => {
                        widget.visible_from_offset = Some(value.parse().map_err(|_| {
                            schema(&path, "visible_from_offset must be an integer")
                        })?)
                    }
                    other => {
                        return Err(schema(path, format!("unknown widget key {other:?}")))
                    }
                }
                Ok(())
            }
            SectionKind::Transition(idx) => {
                let t = &mut self.transitions[*idx];
                match key {
                    "from" => t.from = Some(value.to_string()),
                    "on" => t.on = Some(parse_event_pattern(value, &path)?),
                    "to" => t.to = Some(parse_target(value)),
                    other => {
                        return Err(schema(path, format!("unknown transition key {other:?}")))
                    }
                }
                Ok(())
            }
        }
    }

    fn finish(self) -> Result<AppModel, ModelError> {
        if self.schema_version.as_deref() != Some("1") {
            return Err(schema("schema_version", "expected `schema_version: 1`"));
        }
        let name = self.name.ok_or_else(|| schema("app", "missing name"))?;
        let initial_screen = self
            .initial_screen
            .ok_or_else(|| schema("app", "missing initial_screen"))?;
        if self.screens.is_empty() {
            return Err(schema("screens", "a model needs at least one screen"));
        }
        if !self.screens.iter().any(|s| s.id == initial_screen) {
            return Err(ModelError::DanglingScreenRef {
                screen: initial_screen,
                path: "app/initial_screen".into(),
            });
        }
        for (id, message) in &self.crashes {
            if message.is_empty() {
                return Err(schema(format!("crash {id}"), "missing message"));
            }
        }
        for screen in &self.screens {
            for widget in &screen.widgets {
                if widget.text.is_none()
                    && widget.resource_id.is_none()
                    && widget.content_description.is_none()
                {
                    return Err(schema(
                        format!("widget {}/{}", screen.id, widget.key),
                        "a widget needs at least one of text, resource_id, content_description",
                    ));
                }
            }
        }

        let mut transitions = Vec::with_capacity(self.transitions.len());
        for pending in &self.transitions {
            let path = format!("transition at line {}", pending.line);
            let from = pending
                .from
                .clone()
                .ok_or_else(|| schema(&path, "missing from"))?;
            let on = pending
                .on
                .clone()
                .ok_or_else(|| schema(&path, "missing on"))?;
            let to = pending
                .to
                .clone()
                .ok_or_else(|| schema(&path, "missing to"))?;

            let from_screen = self
                .screens
                .iter()
                .find(|s| s.id == from)
                .ok_or_else(|| ModelError::DanglingScreenRef {
                    screen: from.clone(),
                    path: path.clone(),
                })?;

            match &on {
                EventPattern::Click(key) => {
                    let widget = from_screen.widget(key).ok_or_else(|| {
                        schema(&path, format!("unknown widget {key:?} on screen {from:?}"))
                    })?;
                    if !widget.clickable {
                        return Err(schema(&path, format!("widget {key:?} is not clickable")));
                    }
                    if widget.editable && matches!(to, Target::Crash(_)) {
                        return Err(schema(
                            &path,
                            format!("editable widget {key:?} cannot be a click crash trigger"),
                        ));
                    }
                }
                EventPattern::Input(key, _) => {
                    let widget = from_screen.widget(key).ok_or_else(|| {
                        schema(&path, format!("unknown widget {key:?} on screen {from:?}"))
                    })?;
                    if !widget.editable {
                        return Err(schema(&path, format!("widget {key:?} is not editable")));
                    }
                }
                EventPattern::Scroll(_) => {
                    if !from_screen.scrollable {
                        return Err(schema(
                            &path,
                            format!("screen {from:?} is not scrollable"),
                        ));
                    }
                }
                EventPattern::Swipe(_) | EventPattern::Rotate => {}
            }

            match &to {
                Target::Screen(id) => {
                    if !self.screens.iter().any(|s| s.id == *id) {
                        return Err(ModelError::DanglingScreenRef {
                            screen: id.clone(),
                            path,
                        });
                    }
                }
                Target::Crash(id) => {
                    if !self.crashes.contains_key(id) {
                        return Err(schema(&path, format!("unknown crash id {id:?}")));
                    }
                }
                Target::SelfLoop => {}
            }

            transitions.push(Transition { from, on, to });
        }

        check_ambiguity(&transitions)?;

        Ok(AppModel {
            name,
            initial_screen,
            screens: self.screens,
            crashes: self.crashes,
            transitions,
        })
    }
}

fn parse_bool(value: &str, path: &str) -> Result<bool, ModelError> {
    match value {
        "true" => Ok(true),
        "false" => Ok(false),
        other => Err(schema(path, format!("expected true or false, got {other:?}"))),
    }
}

fn parse_target(value: &str) -> Target {
    if value == "self" {
        Target::SelfLoop
    } else if let Some(id) = value.strip_prefix("crash ") {
        Target::Crash(id.trim().to_string())
    } else {
        Target::Screen(value.to_string())
    }
}

fn parse_event_pattern(value: &str, path: &str) -> Result<EventPattern, ModelError> {
    let mut parts = value.splitn(2, char::is_whitespace);
    let kind = parts.next().unwrap_or_default();
    let rest = parts.next().map(str::trim).unwrap_or_default();
    match kind {
        "click" => {
            if rest.is_empty() {
                return Err(schema(path, "click pattern needs a widget key"));
            }
            Ok(EventPattern::Click(rest.to_string()))
        }
        "input" => {
            // `input <key>`, `input <key> = <value>`, `input <key> > <num>`,
            // `input <key> < <num>`
            if rest.is_empty() {
                return Err(schema(path, "input pattern needs a widget key"));
            }
            for (op, ctor) in [
                (" = ", None),
                (" > ", Some(true)),
                (" < ", Some(false)),
            ] {
                if let Some((key, val)) = rest.split_once(op) {
                    let key = key.trim().to_string();
                    let pattern = match ctor {
                        None => ValuePattern::Exact(val.to_string()),
                        Some(greater) => {
                            let bound: f64 = val.trim().parse().map_err(|_| {
                                schema(path, format!("numeric bound expected, got {val:?}"))
                            })?;
                            if greater {
                                ValuePattern::Greater(bound)
                            } else {
                                ValuePattern::Less(bound)
                            }
                        }
                    };
                    return Ok(EventPattern::Input(key, pattern));
                }
            }
            Ok(EventPattern::Input(rest.to_string(), ValuePattern::Any))
        }
        "scroll" => match Direction::parse(rest) {
            Some(d @ (Direction::Up | Direction::Down)) => Ok(EventPattern::Scroll(d)),
            _ => Err(schema(path, "scroll pattern needs `up` or `down`")),
        },
        "swipe" => match Direction::parse(rest) {
            Some(d @ (Direction::Left | Direction::Right)) => Ok(EventPattern::Swipe(d)),
            _ => Err(schema(path, "swipe pattern needs `left` or `right`")),
        },
        "rotate" => Ok(EventPattern::Rotate),
        other => Err(schema(path, format!("unknown event pattern {other:?}"))),
    }
}

/// Reject two transitions that could both match one concrete event with
/// equal specificity.
fn check_ambiguity(transitions: &[Transition]) -> Result<(), ModelError> {
    for (i, a) in transitions.iter().enumerate() {
        for b in &transitions[i + 1..] {
            if a.from != b.from {
                continue;
            }
            let conflict = match (&a.on, &b.on) {
                (EventPattern::Click(x), EventPattern::Click(y)) => x == y,
                (EventPattern::Scroll(x), EventPattern::Scroll(y)) => x == y,
                (EventPattern::Swipe(x), EventPattern::Swipe(y)) => x == y,
                (EventPattern::Rotate, EventPattern::Rotate) => true,
                (EventPattern::Input(x, px), EventPattern::Input(y, py)) if x == y => {
                    input_patterns_conflict(px, py)
                }
                _ => false,
            };
            if conflict {
                return Err(ModelError::AmbiguousTransition {
                    path: format!("screen {:?}", a.from),
                    message: format!("patterns {:?} and {:?} overlap", a.on, b.on),
                });
            }
        }
    }
    Ok(())
}

fn input_patterns_conflict(a: &ValuePattern, b: &ValuePattern) -> bool {
    use ValuePattern::*;
    match (a, b) {
        (Any, Any) => true,
        (Exact(x), Exact(y)) => x == y,
        (Greater(_), Greater(_)) => true,
        (Less(_), Less(_)) => true,
        // `> x` and `< y` overlap when some value is both.
        (Greater(g), Less(l)) | (Less(l), Greater(g)) => l > g,
        _ => false,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const HEAD: &str = "schema_version: 1\n\n[app]\nname: t\ninitial_screen: main\n\n";

    #[test]
    fn transition_to_undeclared_screen_is_dangling() {
        let text = format!(
            "{HEAD}[screen main]\n\n[widget main/a]\ntext: A\nclickable: true\n\n\
             [transition]\nfrom: main\non: click a\nto: nowhere\n"
        );
        let err = parse_model(&text).unwrap_err();
        assert!(matches!(
            err,
            ModelError::DanglingScreenRef { screen, .. } if screen == "nowhere"
        ));
    }

    #[test]
    fn equally_specific_transitions_are_ambiguous() {
        let text = format!(
            "{HEAD}[screen main]\n\n[widget main/a]\ntext: A\nclickable: true\n\n\
             [transition]\nfrom: main\non: click a\nto: self\n\n\
             [transition]\nfrom: main\non: click a\nto: self\n"
        );
        assert!(matches!(
            parse_model(&text).unwrap_err(),
            ModelError::AmbiguousTransition { .. }
        ));
    }

    #[test]
    fn overlapping_numeric_predicates_are_ambiguous() {
        let text = format!(
            "{HEAD}[screen main]\n\n[widget main/f]\nresource_id: f\neditable: true\n\n\
             [transition]\nfrom: main\non: input f > 5\nto: self\n\n\
             [transition]\nfrom: main\non: input f < 10\nto: self\n"
        );
        assert!(matches!(
            parse_model(&text).unwrap_err(),
            ModelError::AmbiguousTransition { .. }
        ));
    }

    #[test]
    fn disjoint_numeric_predicates_are_fine() {
        let text = format!(
            "{HEAD}[screen main]\n\n[widget main/f]\nresource_id: f\neditable: true\n\n\
             [transition]\nfrom: main\non: input f > 10\nto: self\n\n\
             [transition]\nfrom: main\non: input f < 10\nto: self\n"
        );
        assert!(parse_model(&text).is_ok());
    }

    #[test]
    fn widget_needs_a_description() {
        let text = format!("{HEAD}[screen main]\n\n[widget main/a]\nclickable: true\n");
        let err = parse_model(&text).unwrap_err();
        assert!(matches!(err, ModelError::SchemaError { ref path, .. } if path.contains("main/a")));
    }

    #[test]
    fn editable_click_crash_trigger_rejected() {
        let text = format!(
            "{HEAD}[crash c]\nmessage: m\n\n[screen main]\n\n\
             [widget main/a]\ntext: A\nclickable: true\neditable: true\n\n\
             [transition]\nfrom: main\non: click a\nto: crash c\n"
        );
        assert!(matches!(
            parse_model(&text).unwrap_err(),
            ModelError::SchemaError { .. }
        ));
    }

    #[test]
    fn missing_schema_version_rejected() {
        let err = parse_model("[app]\nname: x\ninitial_screen: m\n\n[screen m]\n").unwrap_err();
        assert!(matches!(err, ModelError::SchemaError { ref path, .. } if path == "schema_version"));
    }

    #[test]
    fn unknown_crash_id_rejected() {
        let text = format!(
            "{HEAD}[screen main]\n\n[widget main/a]\ntext: A\nclickable: true\n\n\
             [transition]\nfrom: main\non: click a\nto: crash nope\n"
        );
        assert!(matches!(
            parse_model(&text).unwrap_err(),
            ModelError::SchemaError { .. }
        ));
    }
}
