//! Recursive-descent parser for a controlled English subset.
//!
//! The accepted grammar is documented in `docs/grammar.md`. Informally, a
//! sentence is a chain of clauses joined by coordination (`and`, `or`,
//! `then`) or subordination (`when`, `after`, `before`, `once`); a clause is
//! an optional subject, a verb group (active, passive, or `verb to verb`),
//! an optional object and optional prepositional modifiers. Verbs come from
//! a closed word list shipped with the crate.

use super::{tokenize, ConstituencyTree, IngestError, Token};

const VERB_LIST: &str = include_str!("../../data/verbs.txt");
const PARTICIPLE_LIST: &str = include_str!("../../data/participles.txt");

const PRONOUNS: [&str; 7] = ["i", "you", "we", "he", "she", "it", "they"];
const DETERMINERS: [&str; 3] = ["the", "a", "an"];
const CC_WORDS: [&str; 3] = ["and", "or", "then"];
const SUBORDINATORS: [&str; 4] = ["when", "after", "before", "once"];
const PREPOSITIONS: [&str; 6] = ["in", "on", "into", "onto", "at", "with"];
const BE_FORMS: [&str; 8] = ["is", "are", "was", "were", "am", "be", "been", "being"];
const DIRECTIONS: [&str; 4] = ["up", "down", "left", "right"];

fn known_verbs() -> &'static std::collections::HashSet<&'static str> {
    use std::sync::OnceLock;
    static VERBS: OnceLock<std::collections::HashSet<&'static str>> = OnceLock::new();
    VERBS.get_or_init(|| {
        VERB_LIST
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty() && !l.starts_with('#'))
            .chain(BE_FORMS)
            .collect()
    })
}

/// Is this case-folded word on the shipped past-participle list?
pub fn is_participle(word: &str) -> bool {
    use std::sync::OnceLock;
    static PARTICIPLES: OnceLock<std::collections::HashSet<&'static str>> = OnceLock::new();
    PARTICIPLES
        .get_or_init(|| {
            PARTICIPLE_LIST
                .lines()
                .map(str::trim)
                .filter(|l| !l.is_empty() && !l.starts_with('#'))
                .collect()
        })
        .contains(word)
}

/// Parse a plain sentence in the controlled grammar into a constituency tree.
pub fn parse_restricted(sentence: &str) -> Result<ConstituencyTree, IngestError> {
    let tokens = tokenize(sentence);
    if tokens.is_empty() {
        return Err(IngestError::OutOfGrammar {
            reason: "empty sentence".into(),
        });
    }
    let mut parser = RParser { tokens, pos: 0 };
    let tree = parser.parse_sentence()?;
    if parser.pos < parser.tokens.len() {
        return Err(IngestError::OutOfGrammar {
            reason: format!(
                "unexpected token {:?} after clause",
                parser.tokens[parser.pos].text
            ),
        });
    }
    Ok(tree)
}

struct RParser {
    tokens: Vec<Token>,
    pos: usize,
}

impl RParser {
    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos)
    }

    fn peek_lower(&self) -> Option<&str> {
        self.peek().map(|t| t.lower.as_str())
    }

    fn next_token(&mut self) -> Token {
        let t = self.tokens[self.pos].clone();
        self.pos += 1;
        t
    }


    fn is_verb(&self, word: &str) -> bool {
        known_verbs().contains(word)
    }

    fn is_boundary(&self, word: &str) -> bool {
        word == ","
            || CC_WORDS.contains(&word)
            || SUBORDINATORS.contains(&word)
            || PREPOSITIONS.contains(&word)
    }

    fn out(&self, reason: impl Into<String>) -> IngestError {
        IngestError::OutOfGrammar {
            reason: reason.into(),
        }
    }

    fn parse_sentence(&mut self) -> Result<ConstituencyTree, IngestError> {
        if let Some(word) = self.peek_lower() {
            if SUBORDINATORS.contains(&word) {
                return self.parse_leading_subordination();
            }
        }
        self.parse_clause_chain()
    }

    /// `When <clause> , <rest>` — the comma is required.
    fn parse_leading_subordination(&mut self) -> Result<ConstituencyTree, IngestError> {
        let conn = self.next_token();
        let inner = self.parse_clause()?;
        let sbar = ConstituencyTree::node(
            "SBAR",
            vec![ConstituencyTree::leaf("IN", conn), inner],
        );
        if self.peek_lower() != Some(",") {
            return Err(self.out("a sentence-initial subordinate clause must end with a comma"));
        }
        let comma = ConstituencyTree::leaf(",", self.next_token());
        let main = self.parse_clause_chain()?;
        Ok(ConstituencyTree::node("S", vec![sbar, comma, main]))
    }

    fn parse_clause_chain(&mut self) -> Result<ConstituencyTree, IngestError> {
        let mut left = self.parse_clause()?;
        loop {
            let comma = if self.peek_lower() == Some(",") {
                let save = self.pos;
                let tok = self.next_token();
                match self.peek_lower() {
                    Some(w) if CC_WORDS.contains(&w) || SUBORDINATORS.contains(&w) => {
                        Some(ConstituencyTree::leaf(",", tok))
                    }
                    _ => {
                        self.pos = save;
                        return Err(self.out("a comma must introduce a connective"));
                    }
                }
            } else {
                None
            };

            match self.peek_lower() {
                Some(w) if CC_WORDS.contains(&w) => {
                    let cc = ConstituencyTree::leaf("CC", self.next_token());
                    if self.starts_clause() {
                        let right = self.parse_clause()?;
                        let mut children = vec![left];
                        if let Some(c) = comma {
                            children.push(c);
                        }
                        children.push(cc);
                        children.push(right);
                        left = ConstituencyTree::node("S", children);
                    } else {
                        // Subjectless continuation: coordinate at the VP level
                        // of the rightmost clause ("I tap Save and rotate").
                        let vp = self.parse_verb_phrase(true)?;
                        attach_vp_coordination(&mut left, comma, cc, vp);
                    }
                }
                Some(w) if SUBORDINATORS.contains(&w) => {
                    let conn = self.next_token();
                    let inner = self.parse_clause()?;
                    let sbar = ConstituencyTree::node(
                        "SBAR",
                        vec![ConstituencyTree::leaf("IN", conn), inner],
                    );
                    attach_trailing_subordination(&mut left, comma, sbar);
                }
                _ => break,
            }
        }
        Ok(left)
    }

    /// Does the upcoming input start a full clause (subject + verb)?
    fn starts_clause(&self) -> bool {
        match self.peek_lower() {
            Some(w) => PRONOUNS.contains(&w) || DETERMINERS.contains(&w),
            None => false,
        }
    }

    fn parse_clause(&mut self) -> Result<ConstituencyTree, IngestError> {
        let mut children = Vec::new();
        let mut has_subject = false;
        match self.peek_lower() {
            Some(w) if PRONOUNS.contains(&w) => {
                let subj = ConstituencyTree::node(
                    "NP",
                    vec![ConstituencyTree::leaf("PRP", self.next_token())],
                );
                children.push(subj);
                has_subject = true;
            }
            Some(w) if DETERMINERS.contains(&w) => {
                children.push(self.parse_determiner_subject()?);
                has_subject = true;
            }
            Some(w) if self.is_verb(w) => {}
            Some(w) => {
                return Err(self.out(format!("expected a subject or a known verb, got {w:?}")))
            }
            None => return Err(self.out("expected a clause")),
        }
        let vp = self.parse_verb_phrase(has_subject)?;
        children.push(vp);
        Ok(ConstituencyTree::node("S", children))
    }

    /// Subject of the form `the <words>`; the scan takes the first word
    /// unconditionally and then stops at the first known verb.
    fn parse_determiner_subject(&mut self) -> Result<ConstituencyTree, IngestError> {
        let det = ConstituencyTree::leaf("DT", self.next_token());
        let mut words = Vec::new();
        while let Some(tok) = self.peek() {
            let lower = tok.lower.clone();
            if self.is_boundary(&lower) {
                break;
            }
            if !words.is_empty() && self.is_verb(&lower) {
                break;
            }
            let tok = self.next_token();
            words.push(noun_leaf(tok));
        }
        if words.is_empty() {
            return Err(self.out("determiner without a noun"));
        }
        let mut children = vec![det];
        children.extend(words);
        Ok(ConstituencyTree::node("NP", children))
    }

    fn parse_verb_phrase(&mut self, has_subject: bool) -> Result<ConstituencyTree, IngestError> {
        let first = match self.peek_lower() {
            Some(w) if self.is_verb(w) => self.next_token(),
            Some(w) => return Err(self.out(format!("expected a verb, got {w:?}"))),
            None => return Err(self.out("expected a verb")),
        };

        let mut children = Vec::new();
        if BE_FORMS.contains(&first.lower.as_str()) {
            // Passive voice: be-form + past participle.
            children.push(ConstituencyTree::leaf(be_tag(&first.lower), first));
            match self.peek_lower() {
                Some(w) if is_participle(w) => {
                    let part = self.next_token();
                    children.push(ConstituencyTree::leaf("VBN", part));
                }
                _ => {
                    return Err(self.out("a form of `be` must be followed by a past participle"))
                }
            }
        } else {
            children.push(ConstituencyTree::leaf(verb_tag(&first.lower, has_subject), first));
            // `attempt to take`
            if self.peek_lower() == Some("to") {
                let save = self.pos;
                let to = self.next_token();
                match self.peek_lower() {
                    Some(w) if self.is_verb(w) => {
                        children.push(ConstituencyTree::leaf("TO", to));
                        let v = self.next_token();
                        children.push(ConstituencyTree::leaf("VB", v));
                    }
                    _ => self.pos = save,
                }
            }
        }

        if let Some(obj) = self.parse_object()? {
            children.push(obj);
        }
        while let Some(w) = self.peek_lower() {
            if !PREPOSITIONS.contains(&w) {
                break;
            }
            children.push(self.parse_prepositional_phrase()?);
        }
        Ok(ConstituencyTree::node("VP", children))
    }

    fn parse_object(&mut self) -> Result<Option<ConstituencyTree>, IngestError> {
        match self.peek_lower() {
            None => return Ok(None),
            Some(w) if self.is_boundary(w) => return Ok(None),
            _ => {}
        }
        Ok(Some(self.parse_noun_phrase()?))
    }

    fn parse_noun_phrase(&mut self) -> Result<ConstituencyTree, IngestError> {
        let mut children = Vec::new();
        while let Some(tok) = self.peek() {
            let lower = tok.lower.clone();
            if self.is_boundary(&lower) {
                break;
            }
            let tok = self.next_token();
            if DETERMINERS.contains(&lower.as_str()) {
                children.push(ConstituencyTree::leaf("DT", tok));
            } else {
                children.push(noun_leaf(tok));
            }
        }
        if children.is_empty() || children.iter().all(|c| c.label == "DT") {
            return Err(self.out("expected a noun phrase"));
        }
        Ok(ConstituencyTree::node("NP", children))
    }

    fn parse_prepositional_phrase(&mut self) -> Result<ConstituencyTree, IngestError> {
        let prep = ConstituencyTree::leaf("IN", self.next_token());
        let np = self.parse_noun_phrase()?;
        Ok(ConstituencyTree::node("PP", vec![prep, np]))
    }
}

fn noun_leaf(tok: Token) -> ConstituencyTree {
    let label = if tok.text.chars().all(|c| c.is_ascii_digit() || c == '.' || c == '-')
        && tok.text.chars().any(|c| c.is_ascii_digit())
    {
        "CD"
    } else if DIRECTIONS.contains(&tok.lower.as_str()) {
        "RB"
    } else if tok.text.chars().next().is_some_and(|c| c.is_uppercase()) {
        "NNP"
    } else {
        "NN"
    };
    ConstituencyTree::leaf(label, tok)
}

fn be_tag(lower: &str) -> &'static str {
    match lower {
        "is" => "VBZ",
        "are" | "am" => "VBP",
        "was" | "were" => "VBD",
        "been" => "VBN",
        "being" => "VBG",
        _ => "VB",
    }
}

fn verb_tag(lower: &str, has_subject: bool) -> &'static str {
    if lower.ends_with("ing") {
        "VBG"
    } else if lower.ends_with("ed") {
        "VBD"
    } else if lower.ends_with('s') && lower.len() > 2 {
        "VBZ"
    } else if has_subject {
        "VBP"
    } else {
        "VB"
    }
}

/// Coordinate a subjectless VP with the VP of the rightmost clause in `left`.
fn attach_vp_coordination(
    left: &mut ConstituencyTree,
    comma: Option<ConstituencyTree>,
    cc: ConstituencyTree,
    vp: ConstituencyTree,
) {
    let target = rightmost_clause(left);
    if let Some(old_vp) = target.children.iter_mut().rev().find(|c| c.label == "VP") {
        let prev = old_vp.clone();
        let mut children = vec![prev];
        if let Some(c) = comma {
            children.push(c);
        }
        children.push(cc);
        children.push(vp);
        *old_vp = ConstituencyTree::node("VP", children);
    }
}

/// Attach a trailing SBAR to the rightmost clause in `left`.
fn attach_trailing_subordination(
    left: &mut ConstituencyTree,
    comma: Option<ConstituencyTree>,
    sbar: ConstituencyTree,
) {
    let target = rightmost_clause(left);
    if let Some(c) = comma {
        target.children.push(c);
    }
    target.children.push(sbar);
}

/// Descend through clause-level coordinations to the rightmost plain clause.
fn rightmost_clause(tree: &mut ConstituencyTree) -> &mut ConstituencyTree {
    let is_coordination = tree.label == "S"
        && tree.children.len() >= 3
        && tree.children.iter().any(|c| c.label == "CC")
        && tree.children.first().is_some_and(|c| c.label == "S")
        && tree.children.last().is_some_and(|c| c.label == "S");
    if is_coordination {
        rightmost_clause(tree.children.last_mut().expect("non-empty"))
    } else {
        tree
    }
}
