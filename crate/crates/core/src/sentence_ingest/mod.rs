//! Sentence ingestion: turn raw step sentences into constituency parse trees.
//!
//! Two paths produce trees over the same tag set:
//! - [`parse_bracketed`] reads externally produced bracketed trees
//!   (`(S (NP (PRP I)) (VP (VBP click) ...))`);
//! - [`parse_restricted`] parses a controlled English subset directly, so the
//!   pipeline runs on plain text without an external parser. The grammar is
//!   documented in `docs/grammar.md`.

mod bracketed;
mod restricted;
mod tokenize;

pub use bracketed::{parse_bracketed, parse_bracketed_records};
pub use restricted::{is_participle, parse_restricted};
pub use tokenize::tokenize;

use std::fmt;

use thiserror::Error;

/// A word of the sentence: surface form plus its case-folded form. `quoted`
/// marks tokens that appeared inside double quotes in the raw sentence;
/// downstream value extraction treats such spans as exact literals.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Token {
    pub text: String,
    pub lower: String,
    pub quoted: bool,
}

impl Token {
    pub fn new(text: impl Into<String>) -> Self {
        let text = text.into();
        debug_assert!(!text.is_empty());
        let lower = text.to_lowercase();
        Token {
            text,
            lower,
            quoted: false,
        }
    }

    pub fn quoted(text: impl Into<String>) -> Self {
        let mut t = Token::new(text);
        t.quoted = true;
        t
    }
}

/// Labeled ordered tree over sentence tokens. A node carries either a token
/// (preterminal leaf) or a non-empty child list, never both.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConstituencyTree {
    pub label: String,
    pub children: Vec<ConstituencyTree>,
    pub token: Option<Token>,
}

impl ConstituencyTree {
    pub fn leaf(label: impl Into<String>, token: Token) -> Self {
        ConstituencyTree {
            label: label.into(),
            children: Vec::new(),
            token: Some(token),
        }
    }

    pub fn node(label: impl Into<String>, children: Vec<ConstituencyTree>) -> Self {
        debug_assert!(!children.is_empty());
        ConstituencyTree {
            label: label.into(),
            children,
            token: None,
        }
    }

    pub fn is_leaf(&self) -> bool {
        self.token.is_some()
    }

    /// Tokens of the leaves, left to right.
    pub fn leaf_tokens(&self) -> Vec<&Token> {
        let mut out = Vec::new();
        self.collect_leaves(&mut out);
        out
    }

    fn collect_leaves<'a>(&'a self, out: &mut Vec<&'a Token>) {
        if let Some(tok) = &self.token {
            out.push(tok);
        }
        for child in &self.children {
            child.collect_leaves(out);
        }
    }

    /// Surface text of the leaf yield, space-joined.
    pub fn yield_text(&self) -> String {
        self.leaf_tokens()
            .iter()
            .map(|t| t.text.as_str())
            .collect::<Vec<_>>()
            .join(" ")
    }

    /// Canonical single-space bracketed form; `parse_bracketed` of this text
    /// reconstructs the tree.
    pub fn serialize(&self) -> String {
        let mut out = String::new();
        self.write_to(&mut out);
        out
    }

    fn write_to(&self, out: &mut String) {
        out.push('(');
        out.push_str(&self.label);
        if let Some(tok) = &self.token {
            out.push(' ');
            out.push_str(&tok.text);
        } else {
            for child in &self.children {
                out.push(' ');
                child.write_to(out);
            }
        }
        out.push(')');
    }

    /// First leaf in document order, if any.
    pub fn first_leaf(&self) -> Option<&Token> {
        if let Some(tok) = &self.token {
            return Some(tok);
        }
        self.children.iter().find_map(|c| c.first_leaf())
    }
}

impl fmt::Display for ConstituencyTree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.serialize())
    }
}

/// The finite vocabulary of constituency labels used by both parsers.
#[derive(Debug, Clone)]
pub struct TagSet {
    pub clause_tags: Vec<&'static str>,
    pub phrase_tags: Vec<&'static str>,
    pub connective_tag: &'static str,
    pub pos_tags: Vec<&'static str>,
}

impl Default for TagSet {
    fn default() -> Self {
        TagSet {
            clause_tags: vec!["S", "SBAR"],
            phrase_tags: vec!["NP", "VP", "PP", "ADVP", "WHADVP"],
            connective_tag: "CC",
            pos_tags: vec![
                "PRP", "DT", "NN", "NNS", "NNP", "CD", "RB", "IN", "JJ", "RP", "VB", "VBD",
                "VBG", "VBN", "VBP", "VBZ", "MD", "TO", "WRB", "UH", ",",
            ],
        }
    }
}

impl TagSet {
    pub fn contains(&self, label: &str) -> bool {
        self.clause_tags.contains(&label)
            || self.phrase_tags.contains(&label)
            || self.connective_tag == label
            || self.pos_tags.contains(&label)
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum IngestError {
    #[error("unbalanced parentheses at offset {offset}")]
    UnbalancedParens { offset: usize },
    #[error("empty node at offset {offset}")]
    EmptyNode { offset: usize },
    #[error("unknown label {label:?} at offset {offset}")]
    UnknownLabel { label: String, offset: usize },
    #[error("malformed node at offset {offset}: a preterminal holds exactly one token")]
    MalformedNode { offset: usize },
    #[error("sentence is outside the controlled grammar ({reason}); supply a bracketed tree instead")]
    OutOfGrammar { reason: String },
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn leaf_yield_reads_left_to_right() {
        let tree = ConstituencyTree::node(
            "S",
            vec![
                ConstituencyTree::leaf("PRP", Token::new("I")),
                ConstituencyTree::node(
                    "VP",
                    vec![
                        ConstituencyTree::leaf("VBP", Token::new("click")),
                        ConstituencyTree::leaf("NN", Token::new("Save")),
                    ],
                ),
            ],
        );
        assert_eq!(tree.yield_text(), "I click Save");
        assert_eq!(tree.serialize(), "(S (PRP I) (VP (VBP click) (NN Save)))");
    }

    #[test]
    fn default_tagset_covers_used_labels() {
        let tags = TagSet::default();
        for label in ["S", "SBAR", "NP", "VP", "PP", "CC", "PRP", "DT", "NN", "IN", ","] {
            assert!(tags.contains(label), "missing {label}");
        }
        assert!(!tags.contains("XYZ"));
    }
}
