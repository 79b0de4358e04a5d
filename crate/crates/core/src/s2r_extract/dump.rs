//! Structured-text records for step lists: the dump format written by the
//! extract command and read back for ground-truth comparison.
//!
//! One record per step:
//!
//! ```text
//! [s2r 1]
//! sentence: I tap Save
//! action: click
//! alt_action: -
//! target: Save
//! input: -
//! direction: -
//! ```
//!
//! `-` marks an absent field. Input values are double-quoted because they
//! may be empty or whitespace (`input: " "`).

use thiserror::Error;

use super::{ActionKind, Direction, S2R};

#[derive(Debug, Error, PartialEq)]
pub enum DumpError {
    #[error("s2r record line {line}: {message}")]
    Malformed { line: usize, message: String },
}

/// Serialize steps in record order.
pub fn write_s2rs(steps: &[S2R]) -> String {
    let mut out = String::new();
    for (i, step) in steps.iter().enumerate() {
        if i > 0 {
            out.push('\n');
        }
        out.push_str(&format!("[s2r {}]\n", i + 1));
        out.push_str(&format!("sentence: {}\n", step.source_sentence));
        out.push_str(&format!("action: {}\n", step.action));
        out.push_str(&format!(
            "alt_action: {}\n",
            step.alt_action.map_or("-".to_string(), |k| k.to_string())
        ));
        out.push_str(&format!(
            "target: {}\n",
            step.target_widget.as_deref().unwrap_or("-")
        ));
        out.push_str(&format!(
            "input: {}\n",
            step.input_value
                .as_deref()
                .map_or("-".to_string(), quote)
        ));
        out.push_str(&format!(
            "direction: {}\n",
            step.direction.map_or("-".to_string(), |d| d.to_string())
        ));
    }
    out
}

fn quote(value: &str) -> String {
    format!("\"{}\"", value.replace('\\', "\\\\").replace('"', "\\\""))
}

fn unquote(text: &str, line: usize) -> Result<String, DumpError> {
    let inner = text
        .strip_prefix('"')
        .and_then(|t| t.strip_suffix('"'))
        .ok_or_else(|| DumpError::Malformed {
            line,
            message: "input value must be double-quoted".into(),
        })?;
    let mut out = String::new();
    let mut chars = inner.chars();
    while let Some(c) = chars.next() {
        if c == '\\' {
            match chars.next() {
                Some(e @ ('\\' | '"')) => out.push(e),
                _ => {
                    return Err(DumpError::Malformed {
                        line,
                        message: "bad escape in input value".into(),
                    })
                }
            }
        } else {
            out.push(c);
        }
    }
    Ok(out)
}

/// Parse a dump produced by [`write_s2rs`].
pub fn parse_s2rs(text: &str) -> Result<Vec<S2R>, DumpError> {
    let mut steps = Vec::new();
    let mut current: Option<PartialRecord> = None;

    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim_end();
        if line.trim().is_empty() {
            continue;
        }
        if line.starts_with("[s2r") {
            if let Some(record) = current.take() {
                steps.push(record.finish(line_no)?);
            }
            current = Some(PartialRecord::default());
            continue;
        }
        let record = current.as_mut().ok_or(DumpError::Malformed {
            line: line_no,
            message: "field outside an [s2r] record".into(),
        })?;
        let (key, value) = line
            .split_once(": ")
            .or_else(|| line.strip_suffix(':').map(|k| (k, "")))
            .ok_or_else(|| DumpError::Malformed {
                line: line_no,
                message: "expected `key: value`".into(),
            })?;
        match key {
            "sentence" => record.sentence = value.to_string(),
            "action" => {
                record.action = Some(ActionKind::parse(value).ok_or_else(|| {
                    DumpError::Malformed {
                        line: line_no,
                        message: format!("unknown action {value:?}"),
                    }
                })?)
            }
            "alt_action" => {
                record.alt_action = if value == "-" {
                    None
                } else {
                    Some(ActionKind::parse(value).ok_or_else(|| DumpError::Malformed {
                        line: line_no,
                        message: format!("unknown action {value:?}"),
                    })?)
                }
            }
            "target" => {
                record.target = if value == "-" {
                    None
                } else {
                    Some(value.to_string())
                }
            }
            "input" => {
                record.input = if value == "-" {
                    None
                } else {
                    Some(unquote(value, line_no)?)
                }
            }
            "direction" => {
                record.direction = if value == "-" {
                    None
                } else {
                    Some(Direction::parse(value).ok_or_else(|| DumpError::Malformed {
                        line: line_no,
                        message: format!("unknown direction {value:?}"),
                    })?)
                }
            }
            other => {
                return Err(DumpError::Malformed {
                    line: line_no,
                    message: format!("unknown field {other:?}"),
                })
            }
        }
    }
    if let Some(record) = current {
        steps.push(record.finish(0)?);
    }
    Ok(steps)
}

#[derive(Default)]
struct PartialRecord {
    sentence: String,
    action: Option<ActionKind>,
    alt_action: Option<ActionKind>,
    target: Option<String>,
    input: Option<String>,
    direction: Option<Direction>,
}

impl PartialRecord {
    fn finish(self, line: usize) -> Result<S2R, DumpError> {
        let action = self.action.ok_or(DumpError::Malformed {
            line,
            message: "record is missing an action".into(),
        })?;
        S2R::new(
            action,
            self.alt_action,
            self.target,
            self.input,
            self.direction,
            self.sentence,
        )
        .map_err(|e| DumpError::Malformed {
            line,
            message: e.to_string(),
        })
    }
}
