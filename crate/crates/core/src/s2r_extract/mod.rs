//! Step inference: decompose each standalone sentence into
//! subject/predicate/object/modifier and infer the structured step tuple:
//! action kind, target widget, input value, direction.
//!
//! The action kind comes from the predicate's head verb. An exact hit in a
//! synonym group short-circuits; otherwise the verb is classified by cosine
//! similarity against every group, and when the top two groups are within
//! `delta` of each other both kinds are kept (primary plus alternate).

mod dump;

pub use dump::{parse_s2rs, write_s2rs, DumpError};

use std::collections::HashMap;
use std::fmt;

use thiserror::Error;

use crate::embeddings::{similarity, similarity_tokens, VectorStore};
use crate::sentence_ingest::{is_participle, ConstituencyTree, Token};

const ACTION_LEXICON: &str = include_str!("../../data/action_lexicon.txt");
const SPECIAL_VALUES: &str = include_str!("../../data/special_values.txt");
const DEVICE_WORDS: &str = include_str!("../../data/device_words.txt");

const ARTICLES: [&str; 3] = ["the", "a", "an"];
const BE_FORMS: [&str; 8] = ["is", "are", "was", "were", "am", "be", "been", "being"];
const AUXILIARIES: [&str; 12] = [
    "to", "do", "does", "did", "will", "would", "can", "could", "may", "might", "shall",
    "should",
];
const VALUE_PREPOSITION: &str = "with";
const TARGET_PREPOSITIONS: [&str; 5] = ["in", "on", "into", "onto", "at"];

/// The five standard UI action kinds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ActionKind {
    Click,
    Input,
    Rotate,
    Swipe,
    Scroll,
}

impl ActionKind {
    pub const ALL: [ActionKind; 5] = [
        ActionKind::Click,
        ActionKind::Input,
        ActionKind::Rotate,
        ActionKind::Swipe,
        ActionKind::Scroll,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            ActionKind::Click => "click",
            ActionKind::Input => "input",
            ActionKind::Rotate => "rotate",
            ActionKind::Swipe => "swipe",
            ActionKind::Scroll => "scroll",
        }
    }

    pub fn parse(s: &str) -> Option<ActionKind> {
        match s.trim().to_lowercase().as_str() {
            "click" => Some(ActionKind::Click),
            "input" => Some(ActionKind::Input),
            "rotate" => Some(ActionKind::Rotate),
            "swipe" => Some(ActionKind::Swipe),
            "scroll" => Some(ActionKind::Scroll),
            _ => None,
        }
    }
}

impl fmt::Display for ActionKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    Up,
    Down,
    Left,
    Right,
}

impl Direction {
    pub fn name(&self) -> &'static str {
        match self {
            Direction::Up => "up",
            Direction::Down => "down",
            Direction::Left => "left",
            Direction::Right => "right",
        }
    }

    pub fn parse(s: &str) -> Option<Direction> {
        match s.trim().to_lowercase().as_str() {
            "up" => Some(Direction::Up),
            "down" => Some(Direction::Down),
            "left" => Some(Direction::Left),
            "right" => Some(Direction::Right),
            _ => None,
        }
    }
}

impl fmt::Display for Direction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Voice {
    Active,
    Passive,
}

/// A constituent's text along with its tokens (tokens keep the quoted flag).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Phrase {
    pub tokens: Vec<Token>,
}

impl Phrase {
    fn from_tokens(tokens: Vec<Token>) -> Option<Phrase> {
        if tokens.is_empty() {
            None
        } else {
            Some(Phrase { tokens })
        }
    }

    pub fn text(&self) -> String {
        self.tokens
            .iter()
            .map(|t| t.text.as_str())
            .collect::<Vec<_>>()
            .join(" ")
    }

    fn lower_words(&self) -> Vec<&str> {
        self.tokens.iter().map(|t| t.lower.as_str()).collect()
    }

    /// Text with leading articles removed.
    fn text_without_articles(&self) -> String {
        self.strip_articles()
            .iter()
            .map(|t| t.text.as_str())
            .collect::<Vec<_>>()
            .join(" ")
    }

    fn strip_articles(&self) -> &[Token] {
        let mut start = 0;
        while start < self.tokens.len() && ARTICLES.contains(&self.tokens[start].lower.as_str())
        {
            start += 1;
        }
        &self.tokens[start..]
    }

    /// The maximal run of quoted tokens, if any.
    fn quoted_span(&self) -> Option<String> {
        let quoted: Vec<&Token> = self.tokens.iter().filter(|t| t.quoted).collect();
        if quoted.is_empty() {
            None
        } else {
            Some(
                quoted
                    .iter()
                    .map(|t| t.text.as_str())
                    .collect::<Vec<_>>()
                    .join(" "),
            )
        }
    }
}

impl fmt::Display for Phrase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.text())
    }
}

/// Syntactic constituents of a standalone sentence.
#[derive(Debug, Clone, PartialEq)]
pub struct ClauseParts {
    pub subject: Option<Phrase>,
    pub predicate: Phrase,
    pub object: Option<Phrase>,
    pub modifier: Option<Phrase>,
}

/// Synonym groups per action kind, loadable from `kind<TAB>synonym` lines.
#[derive(Debug, Clone)]
pub struct ActionLexicon {
    groups: HashMap<ActionKind, Vec<String>>,
}

impl Default for ActionLexicon {
    fn default() -> Self {
        ActionLexicon::parse(ACTION_LEXICON).expect("bundled action lexicon is well-formed")
    }
}

impl ActionLexicon {
    pub fn parse(text: &str) -> Result<Self, ExtractError> {
        let mut groups: HashMap<ActionKind, Vec<String>> = HashMap::new();
        for (idx, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (kind, synonym) = line
                .split_once('\t')
                .ok_or(ExtractError::BadLexiconLine { line: idx + 1 })?;
            let kind = ActionKind::parse(kind)
                .ok_or(ExtractError::BadLexiconLine { line: idx + 1 })?;
            groups
                .entry(kind)
                .or_default()
                .push(synonym.trim().to_lowercase());
        }
        for kind in ActionKind::ALL {
            if groups.get(&kind).is_none_or(|g| g.is_empty()) {
                return Err(ExtractError::EmptyGroup { kind });
            }
        }
        Ok(ActionLexicon { groups })
    }

    pub fn synonyms(&self, kind: ActionKind) -> &[String] {
        self.groups.get(&kind).map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn member_of(&self, word: &str) -> Option<ActionKind> {
        let folded = word.to_lowercase();
        ActionKind::ALL
            .into_iter()
            .find(|k| self.synonyms(*k).contains(&folded))
    }
}

/// Name-to-literal table for text-described input values ("space" -> " ").
#[derive(Debug, Clone)]
pub struct SpecialValues {
    map: HashMap<String, String>,
}

impl Default for SpecialValues {
    fn default() -> Self {
        SpecialValues::parse(SPECIAL_VALUES).expect("bundled special values are well-formed")
    }
}

impl SpecialValues {
    pub fn parse(text: &str) -> Result<Self, ExtractError> {
        let mut map = HashMap::new();
        for (idx, line) in text.lines().enumerate() {
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (name, literal) = line
                .split_once('\t')
                .ok_or(ExtractError::BadLexiconLine { line: idx + 1 })?;
            map.insert(name.to_lowercase(), literal.to_string());
        }
        Ok(SpecialValues { map })
    }

    pub fn lookup(&self, name: &str) -> Option<&str> {
        self.map.get(&name.to_lowercase()).map(String::as_str)
    }
}

fn device_words() -> Vec<&'static str> {
    DEVICE_WORDS
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .collect()
}

/// A structured reproduction step.
#[derive(Debug, Clone, PartialEq)]
pub struct S2R {
    pub action: ActionKind,
    pub alt_action: Option<ActionKind>,
    pub target_widget: Option<String>,
    pub input_value: Option<String>,
    pub direction: Option<Direction>,
    pub source_sentence: String,
}

impl S2R {
    /// Checked constructor enforcing the step invariants.
    pub fn new(
        action: ActionKind,
        alt_action: Option<ActionKind>,
        target_widget: Option<String>,
        input_value: Option<String>,
        direction: Option<Direction>,
        source_sentence: String,
    ) -> Result<S2R, ExtractError> {
        if alt_action == Some(action) {
            return Err(ExtractError::InvalidStep {
                reason: "alternate action equals primary action".into(),
            });
        }
        if direction.is_some()
            && !matches!(action, ActionKind::Scroll | ActionKind::Swipe)
        {
            return Err(ExtractError::InvalidStep {
                reason: "direction requires a scroll or swipe action".into(),
            });
        }
        if input_value.is_some()
            && action != ActionKind::Input
            && alt_action != Some(ActionKind::Input)
        {
            return Err(ExtractError::InvalidStep {
                reason: "input value requires an input action".into(),
            });
        }
        Ok(S2R {
            action,
            alt_action,
            target_widget,
            input_value,
            direction,
            source_sentence,
        })
    }

    pub fn kinds(&self) -> impl Iterator<Item = ActionKind> + '_ {
        std::iter::once(self.action).chain(self.alt_action)
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum ExtractError {
    #[error("sentence has no verb phrase or verb")]
    NoPredicate,
    #[error("predicate {predicate:?} and every synonym are out of vocabulary")]
    AllZeroVectors { predicate: String },
    #[error("lexicon line {line} is malformed")]
    BadLexiconLine { line: usize },
    #[error("synonym group for {kind} is empty")]
    EmptyGroup { kind: ActionKind },
    #[error("invalid step: {reason}")]
    InvalidStep { reason: String },
}

/// Decompose a standalone sentence tree into its syntactic constituents.
///
/// The subject is the leftmost NP before the VP; the predicate is the VP's
/// verb group; the object is the first NP inside the VP (not under a PP or
/// SBAR); the modifier is the first PP inside the VP.
pub fn decompose(tree: &ConstituencyTree) -> Result<ClauseParts, ExtractError> {
    let vp = first_descendant(tree, "VP").ok_or(ExtractError::NoPredicate)?;

    let subject = subject_before_vp(tree);
    let verb_tokens = collect_verb_tokens(vp);
    let predicate = Phrase::from_tokens(verb_tokens).ok_or(ExtractError::NoPredicate)?;

    let object = first_np_in_vp(vp).and_then(|np| Phrase::from_tokens(leaf_tokens_owned(np)));
    let modifier =
        first_descendant(vp, "PP").and_then(|pp| Phrase::from_tokens(leaf_tokens_owned(pp)));

    Ok(ClauseParts {
        subject,
        predicate,
        object,
        modifier,
    })
}

fn first_descendant<'a>(tree: &'a ConstituencyTree, label: &str) -> Option<&'a ConstituencyTree> {
    if tree.label == label {
        return Some(tree);
    }
    tree.children
        .iter()
        .find_map(|c| first_descendant(c, label))
}

/// Leftmost NP that precedes the first VP among the clause's constituents.
fn subject_before_vp(tree: &ConstituencyTree) -> Option<Phrase> {
    if tree.label != "S" {
        return None;
    }
    for child in &tree.children {
        match child.label.as_str() {
            "VP" => return None,
            "NP" => return Phrase::from_tokens(leaf_tokens_owned(child)),
            // Nested clause wrappers: look inside the first S child.
            "S" => return subject_before_vp(child),
            _ => {}
        }
    }
    None
}

const VERB_TAGS: [&str; 8] = ["VB", "VBD", "VBG", "VBN", "VBP", "VBZ", "MD", "TO"];

/// Verb-group leaves of the VP, skipping anything inside NP/PP/SBAR.
fn collect_verb_tokens(vp: &ConstituencyTree) -> Vec<Token> {
    let mut out = Vec::new();
    collect_verbs_rec(vp, &mut out);
    out
}

fn collect_verbs_rec(node: &ConstituencyTree, out: &mut Vec<Token>) {
    for child in &node.children {
        match child.label.as_str() {
            "NP" | "PP" | "SBAR" => {}
            label if VERB_TAGS.contains(&label) => {
                if let Some(tok) = &child.token {
                    out.push(tok.clone());
                }
            }
            _ if !child.is_leaf() => collect_verbs_rec(child, out),
            _ => {}
        }
    }
}

/// First NP inside the VP that is not nested in a PP or SBAR.
fn first_np_in_vp(vp: &ConstituencyTree) -> Option<&ConstituencyTree> {
    for child in &vp.children {
        match child.label.as_str() {
            "NP" => return Some(child),
            "PP" | "SBAR" => {}
            _ if !child.is_leaf() => {
                if let Some(np) = first_np_in_vp(child) {
                    return Some(np);
                }
            }
            _ => {}
        }
    }
    None
}

fn leaf_tokens_owned(tree: &ConstituencyTree) -> Vec<Token> {
    tree.leaf_tokens().into_iter().cloned().collect()
}

/// Passive iff the predicate is a form of `be` followed by a past participle.
pub fn detect_voice(parts: &ClauseParts) -> Voice {
    let words = parts.predicate.lower_words();
    for pair in words.windows(2) {
        if BE_FORMS.contains(&pair[0]) && is_participle(pair[1]) {
            return Voice::Passive;
        }
    }
    Voice::Active
}

/// The action-bearing verb of a multi-word predicate: the last token that is
/// neither an auxiliary nor a form of `be`.
pub fn head_verb(predicate: &Phrase) -> Option<String> {
    predicate
        .lower_words()
        .iter()
        .rev()
        .find(|w| !AUXILIARIES.contains(w) && !BE_FORMS.contains(w))
        .map(|w| w.to_string())
}

/// Classify the predicate into an action kind, with an alternate kind when
/// the top two group scores differ by less than `delta`.
///
/// Score per group = max over synonyms of `similarity(head verb, synonym)`;
/// exact membership in a group short-circuits that group's score to 1.0.
pub fn classify_action(
    predicate: &Phrase,
    lexicon: &ActionLexicon,
    store: &VectorStore,
    delta: f64,
) -> Result<(ActionKind, Option<ActionKind>), ExtractError> {
    let head = head_verb(predicate).ok_or(ExtractError::NoPredicate)?;
    let ranked = rank_actions(&head, lexicon, store);
    let (top_kind, top_score) = ranked[0];
    if top_score <= 0.0 {
        return Err(ExtractError::AllZeroVectors { predicate: head });
    }
    let (second_kind, second_score) = ranked[1];
    let alt = if top_score - second_score < delta && second_score > 0.0 {
        Some(second_kind)
    } else {
        None
    };
    Ok((top_kind, alt))
}

/// All five kinds with their scores, best first. Ties keep the
/// [`ActionKind::ALL`] declaration order.
pub fn rank_actions(
    head: &str,
    lexicon: &ActionLexicon,
    store: &VectorStore,
) -> Vec<(ActionKind, f64)> {
    let mut scores: Vec<(ActionKind, f64)> = ActionKind::ALL
        .into_iter()
        .map(|kind| {
            let score = if lexicon.member_of(head) == Some(kind) {
                1.0
            } else {
                lexicon
                    .synonyms(kind)
                    .iter()
                    .map(|s| similarity(head, s, store))
                    .fold(f64::NEG_INFINITY, f64::max)
            };
            (kind, score)
        })
        .collect();
    scores.sort_by(|a, b| b.1.partial_cmp(&a.1).unwrap_or(std::cmp::Ordering::Equal));
    scores
}

/// Target widget text: the object for active voice, the subject for passive;
/// leading articles stripped.
pub fn extract_target(parts: &ClauseParts, voice: Voice) -> Option<String> {
    let phrase = match voice {
        Voice::Active => parts.object.as_ref(),
        Voice::Passive => parts.subject.as_ref(),
    }?;
    let text = phrase.text_without_articles();
    if text.is_empty() {
        None
    } else {
        Some(text)
    }
}

/// Input value inference for input-kind steps.
///
/// `with <text>` puts the value in the modifier; `in/on/into/onto/at <text>`
/// keeps the value in the object and overrides the target with the modifier
/// text; no modifier takes the object as the value. Quoted spans are taken
/// verbatim. Otherwise two refinements apply: a value containing digits is
/// reduced to its first number, and text-named specials ("space", "empty",
/// "comma") are replaced by their literals.
pub fn extract_input_value(
    parts: &ClauseParts,
    specials: &SpecialValues,
) -> (Option<String>, Option<String>) {
    let (raw, target_override) = match &parts.modifier {
        Some(modifier) => {
            let head = modifier.tokens[0].lower.as_str();
            let rest_tokens: Vec<Token> = modifier.tokens[1..].to_vec();
            let rest = Phrase::from_tokens(rest_tokens);
            if head == VALUE_PREPOSITION && rest.is_some() {
                (rest, None)
            } else if TARGET_PREPOSITIONS.contains(&head) {
                let target = rest.map(|p| p.text_without_articles());
                (parts.object.clone(), target)
            } else {
                (parts.object.clone(), None)
            }
        }
        None => (parts.object.clone(), None),
    };

    let Some(raw) = raw else {
        return (None, target_override);
    };

    // Quoted spans are exact literals: no refinement.
    if let Some(span) = raw.quoted_span() {
        return (Some(span), target_override);
    }

    let mut text = raw.text_without_articles();
    if text.is_empty() {
        // Article-only objects stay verbatim rather than vanishing.
        text = raw.text();
    }
    if let Some(number) = first_number(&text) {
        return (Some(number), target_override);
    }
    if let Some(literal) = specials.lookup(&text) {
        return (Some(literal.to_string()), target_override);
    }
    (Some(text), target_override)
}

/// First maximal digit run, with an optional leading sign and one decimal
/// point.
fn first_number(text: &str) -> Option<String> {
    let bytes: Vec<char> = text.chars().collect();
    let start = bytes.iter().position(|c| c.is_ascii_digit())?;
    let mut number = String::new();
    if start > 0 && (bytes[start - 1] == '-' || bytes[start - 1] == '+') {
        number.push(bytes[start - 1]);
    }
    let mut seen_dot = false;
    for &c in &bytes[start..] {
        if c.is_ascii_digit() {
            number.push(c);
        } else if c == '.' && !seen_dot {
            seen_dot = true;
            number.push(c);
        } else {
            break;
        }
    }
    Some(number.trim_end_matches('.').to_string())
}

/// First directional keyword in the object text.
pub fn extract_direction(parts: &ClauseParts) -> Option<Direction> {
    let object = parts.object.as_ref()?;
    object
        .lower_words()
        .iter()
        .find_map(|w| Direction::parse(w))
}

/// Rotation sanity check: rotation acts on the whole device or screen, so a
/// rotate step whose target names neither is demoted to the runner-up kind.
/// A device-word target (or no target at all) keeps the rotation and clears
/// the target.
pub fn apply_rotate_guard(candidate: S2R, runner_up: ActionKind) -> S2R {
    debug_assert_eq!(candidate.action, ActionKind::Rotate);
    match &candidate.target_widget {
        None => candidate,
        Some(target) => {
            let words = similarity_tokens(target);
            let is_device = words
                .iter()
                .any(|w| device_words().contains(&w.as_str()));
            if is_device {
                S2R {
                    target_widget: None,
                    ..candidate
                }
            } else {
                S2R {
                    action: runner_up,
                    alt_action: None,
                    ..candidate
                }
            }
        }
    }
}

/// A sentence that could not be turned into a step, with the reason.
#[derive(Debug, Clone, PartialEq)]
pub struct ExtractionWarning {
    pub sentence: String,
    pub reason: String,
    /// True when a fallback step was still produced for the sentence.
    pub recovered: bool,
}

/// Result of extracting a whole ordered sentence list.
#[derive(Debug, Clone, Default)]
pub struct ExtractionOutcome {
    pub steps: Vec<S2R>,
    pub warnings: Vec<ExtractionWarning>,
}

/// Extraction configuration: lexicons plus the dual-action gap.
pub struct Extractor<'a> {
    pub lexicon: &'a ActionLexicon,
    pub specials: &'a SpecialValues,
    pub store: &'a VectorStore,
    pub delta: f64,
}

impl<'a> Extractor<'a> {
    pub fn new(
        lexicon: &'a ActionLexicon,
        specials: &'a SpecialValues,
        store: &'a VectorStore,
        delta: f64,
    ) -> Self {
        Extractor {
            lexicon,
            specials,
            store,
            delta,
        }
    }

    /// Infer the step for one standalone sentence.
    pub fn extract_one(&self, tree: &ConstituencyTree) -> Result<(S2R, Option<ExtractionWarning>), ExtractError> {
        let sentence = tree.yield_text();
        let parts = decompose(tree)?;
        let voice = detect_voice(&parts);

        let mut warning = None;
        let (action, alt_action) =
            match classify_action(&parts.predicate, self.lexicon, self.store, self.delta) {
                Ok(pair) => pair,
                Err(ExtractError::AllZeroVectors { predicate }) => {
                    // Out-of-vocabulary predicate: fall back to click, the
                    // dominant UI action, and record a warning.
                    warning = Some(ExtractionWarning {
                        sentence: sentence.clone(),
                        reason: format!(
                            "predicate {predicate:?} is out of vocabulary; defaulted to click"
                        ),
                        recovered: true,
                    });
                    (ActionKind::Click, None)
                }
                Err(e) => return Err(e),
            };

        let mut target_widget = extract_target(&parts, voice);

        let mut input_value = None;
        if action == ActionKind::Input || alt_action == Some(ActionKind::Input) {
            let (value, target_override) = extract_input_value(&parts, self.specials);
            input_value = value;
            if let Some(t) = target_override {
                target_widget = Some(t);
            }
        }

        let direction = if matches!(action, ActionKind::Scroll | ActionKind::Swipe) {
            extract_direction(&parts)
        } else {
            None
        };

        let step = S2R::new(
            action,
            alt_action,
            target_widget,
            input_value,
            direction,
            sentence,
        )?;

        let step = if step.action == ActionKind::Rotate {
            let runner_up = rank_actions(
                &head_verb(&parts.predicate).unwrap_or_default(),
                self.lexicon,
                self.store,
            )
            .into_iter()
            .map(|(k, _)| k)
            .find(|k| *k != ActionKind::Rotate)
            .expect("five kinds");
            let guarded = apply_rotate_guard(step, runner_up);
            // Re-run the checked constructor: the guard may have rewritten
            // the action kind.
            S2R::new(
                guarded.action,
                guarded.alt_action,
                guarded.target_widget,
                guarded.input_value,
                guarded.direction,
                guarded.source_sentence,
            )?
        } else {
            step
        };

        Ok((step, warning))
    }

    /// Infer steps for an ordered sentence list. Sentences without a
    /// classifiable predicate are skipped with a warning; the batch never
    /// aborts.
    pub fn extract_all(&self, sentences: &[ConstituencyTree]) -> ExtractionOutcome {
        let mut outcome = ExtractionOutcome::default();
        for tree in sentences {
            match self.extract_one(tree) {
                Ok((step, warning)) => {
                    outcome.steps.push(step);
                    outcome.warnings.extend(warning);
                }
                Err(err) => outcome.warnings.push(ExtractionWarning {
                    sentence: tree.yield_text(),
                    reason: err.to_string(),
                    recovered: false,
                }),
            }
        }
        outcome
    }
}


#[cfg(test)]
mod value_edge_tests {
    use super::*;
    use crate::sentence_ingest::{parse_bracketed, TagSet};

    /// With an object present, value extraction never comes back fully
    /// empty-handed, even for degenerate bracketed inputs.
    #[test]
    fn value_or_override_present_whenever_an_object_exists() {
        let specials = SpecialValues::default();
        let tags = TagSet::default();
        for text in [
            // Article-only object.
            "(S (NP (PRP I)) (VP (VBP enter) (NP (DT the))))",
            // Bare `with` modifier with no noun phrase behind it.
            "(S (NP (PRP I)) (VP (VBP enter) (NP (NN x)) (PP (IN with))))",
            // Bare `on` modifier.
            "(S (NP (PRP I)) (VP (VBP enter) (NP (NN x)) (PP (IN on))))",
        ] {
            let tree = parse_bracketed(text, &tags).unwrap();
            let parts = decompose(&tree).unwrap();
            assert!(parts.object.is_some());
            let (value, target_override) = extract_input_value(&parts, &specials);
            assert!(
                value.is_some() || target_override.is_some(),
                "no value and no override for {text}"
            );
        }
    }
}
