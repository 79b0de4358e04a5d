//! Temporal normalization: recursively split conjuncted step spans out of a
//! parse tree, rebuild each as a standalone sentence, and order the
//! sentences by connective semantics.
//!
//! Two conjunction shapes are recognized:
//! - coordination: a node whose children match `X CC X` (optionally with a
//!   comma before the connective) for `X` in `{S, VP}`;
//! - subordination: a node with an `SBAR` child whose first leaf is the
//!   connective.
//!
//! Connectives fall into three categories. A temporal-succession connective
//! ("when", "after", "once") means the clause it introduces happens first;
//! an alternative connective ("or") means only one conjunct is kept; all
//! other connectives preserve textual order.

use std::collections::HashMap;

use thiserror::Error;

use crate::sentence_ingest::ConstituencyTree;

const DEFAULT_RECURSION_LIMIT: usize = 16;
const DEFAULT_CONNECTIVES: &str = include_str!("../data/connectives.txt");

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConnectiveCategory {
    TemporalSuccession,
    Alternative,
    Neutral,
}

/// Case-insensitive map from connective word to category; unknown words
/// resolve to [`ConnectiveCategory::Neutral`].
#[derive(Debug, Clone)]
pub struct ConnectiveLexicon {
    map: HashMap<String, ConnectiveCategory>,
}

impl Default for ConnectiveLexicon {
    fn default() -> Self {
        ConnectiveLexicon::parse(DEFAULT_CONNECTIVES)
            .expect("bundled connective lexicon is well-formed")
    }
}

impl ConnectiveLexicon {
    pub fn lookup(&self, word: &str) -> ConnectiveCategory {
        self.map
            .get(&word.to_lowercase())
            .copied()
            .unwrap_or(ConnectiveCategory::Neutral)
    }

    /// Parse a lexicon file of `word<TAB>category` lines. Categories are
    /// `TemporalSuccession`, `Alternative`, or `Neutral`.
    pub fn parse(text: &str) -> Result<Self, ReorderError> {
        let mut map = HashMap::new();
        for (idx, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (word, cat) = line.split_once('\t').ok_or(ReorderError::BadLexiconLine {
                line: idx + 1,
            })?;
            let category = match cat.trim() {
                "TemporalSuccession" => ConnectiveCategory::TemporalSuccession,
                "Alternative" => ConnectiveCategory::Alternative,
                "Neutral" => ConnectiveCategory::Neutral,
                _ => return Err(ReorderError::BadLexiconLine { line: idx + 1 }),
            };
            map.insert(word.trim().to_lowercase(), category);
        }
        Ok(ConnectiveLexicon { map })
    }
}

/// Where the connective sits relative to the conjoined spans.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConnectivePosition {
    /// `A when B`, `A and B` — connective between the spans.
    BetweenSpans,
    /// `When B, A` — the subordinate clause opens the sentence.
    SubordinateFirst,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Conjunct {
    Left,
    Right,
}

/// The outermost conjunction of a tree: the two conjunct spans in textual
/// order, the connective, and (for coordination) the shared fragment the
/// conjuncts are grafted back into.
#[derive(Debug, Clone)]
pub struct ConjunctionSplit {
    pub left: ConstituencyTree,
    pub right: ConstituencyTree,
    pub connective: String,
    pub position: ConnectivePosition,
    shared: Option<SharedFragment>,
}

/// Tree with a hole: `skeleton` is the original tree minus the conjuncts;
/// `hole_path` is the child-index path to the removed coordination node. An
/// empty path means the whole tree was the coordination.
#[derive(Debug, Clone)]
struct SharedFragment {
    skeleton: ConstituencyTree,
    hole_path: Vec<usize>,
}

#[derive(Debug, Error, PartialEq)]
pub enum ReorderError {
    #[error("recursion limit {limit} exceeded while normalizing")]
    RecursionLimit { limit: usize },
    #[error("shared fragment has no attachment point at path {path:?}")]
    GraftSiteMissing { path: Vec<usize> },
    #[error("connective lexicon line {line} is malformed (want `word<TAB>category`)")]
    BadLexiconLine { line: usize },
}

/// Find the first conjunction top-down, left-to-right.
pub fn find_outermost_conjunction(tree: &ConstituencyTree) -> Option<ConjunctionSplit> {
    walk(tree, tree, &mut Vec::new(), 0)
}

fn walk(
    root: &ConstituencyTree,
    node: &ConstituencyTree,
    path: &mut Vec<usize>,
    leaves_before: usize,
) -> Option<ConjunctionSplit> {
    if node.is_leaf() {
        return None;
    }
    if let Some(split) = match_coordination(root, node, path) {
        return Some(split);
    }
    if let Some(split) = match_subordination(root, node, path, leaves_before) {
        return Some(split);
    }
    let mut offset = leaves_before;
    for (idx, child) in node.children.iter().enumerate() {
        path.push(idx);
        if let Some(split) = walk(root, child, path, offset) {
            path.pop();
            return Some(split);
        }
        path.pop();
        offset += leaf_count(child);
    }
    None
}

fn leaf_count(tree: &ConstituencyTree) -> usize {
    if tree.is_leaf() {
        1
    } else {
        tree.children.iter().map(leaf_count).sum()
    }
}

/// Children matching `X CC X` or `X , CC X` with `X` in `{S, VP}`.
fn match_coordination(
    root: &ConstituencyTree,
    node: &ConstituencyTree,
    path: &[usize],
) -> Option<ConjunctionSplit> {
    let ch = &node.children;
    let (li, cci, ri) = match ch.len() {
        3 if ch[1].label == "CC" => (0, 1, 2),
        4 if ch[1].label == "," && ch[2].label == "CC" => (0, 2, 3),
        _ => return None,
    };
    let x = ch[li].label.as_str();
    if !(x == "S" || x == "VP") || ch[ri].label != x {
        return None;
    }
    let connective = ch[cci].first_leaf()?.lower.clone();
    let mut skeleton = root.clone();
    replace_at(&mut skeleton, path, hole_marker()).ok()?;
    Some(ConjunctionSplit {
        left: ch[li].clone(),
        right: ch[ri].clone(),
        connective,
        position: ConnectivePosition::BetweenSpans,
        shared: Some(SharedFragment {
            skeleton,
            hole_path: path.to_vec(),
        }),
    })
}

/// A node with an `SBAR` child; the SBAR's first leaf is the connective.
fn match_subordination(
    root: &ConstituencyTree,
    node: &ConstituencyTree,
    path: &[usize],
    leaves_before: usize,
) -> Option<ConjunctionSplit> {
    let sbar_idx = node.children.iter().position(|c| c.label == "SBAR")?;
    let sbar = &node.children[sbar_idx];
    let connective = sbar.first_leaf()?.lower.clone();

    let leaves_before_sbar = leaves_before
        + node.children[..sbar_idx]
            .iter()
            .map(leaf_count)
            .sum::<usize>();
    let position = if leaves_before_sbar == 0 {
        ConnectivePosition::SubordinateFirst
    } else {
        ConnectivePosition::BetweenSpans
    };

    let inner = strip_connective(sbar);
    let matrix = remove_sbar(root, path, sbar_idx);

    let (left, right) = match position {
        ConnectivePosition::SubordinateFirst => (inner, matrix),
        ConnectivePosition::BetweenSpans => (matrix, inner),
    };
    Some(ConjunctionSplit {
        left,
        right,
        connective,
        position,
        shared: None,
    })
}

fn hole_marker() -> ConstituencyTree {
    ConstituencyTree {
        label: "__HOLE__".into(),
        children: Vec::new(),
        token: None,
    }
}

fn replace_at(
    tree: &mut ConstituencyTree,
    path: &[usize],
    replacement: ConstituencyTree,
) -> Result<(), ReorderError> {
    match path.split_first() {
        None => {
            *tree = replacement;
            Ok(())
        }
        Some((&idx, rest)) => {
            let child = tree
                .children
                .get_mut(idx)
                .ok_or_else(|| ReorderError::GraftSiteMissing {
                    path: path.to_vec(),
                })?;
            replace_at(child, rest, replacement)
        }
    }
}

/// SBAR minus its leading connective leaf, unwrapped to the inner clause.
fn strip_connective(sbar: &ConstituencyTree) -> ConstituencyTree {
    let mut rest: Vec<ConstituencyTree> = sbar.children.clone();
    if !rest.is_empty() {
        if rest[0].is_leaf() {
            rest.remove(0);
        } else {
            // Connective wrapped in a phrase node, e.g. (WHADVP (WRB when)).
            let first = &mut rest[0];
            if first.children.len() == 1 && first.children[0].is_leaf() {
                rest.remove(0);
            } else if !first.children.is_empty() {
                first.children.remove(0);
            }
        }
    }
    unwrap_clause(match rest.len() {
        1 => rest.pop().expect("one element"),
        _ => ConstituencyTree::node("S", rest),
    })
}

/// The full tree with the SBAR (and an adjacent comma) removed.
fn remove_sbar(root: &ConstituencyTree, path: &[usize], sbar_idx: usize) -> ConstituencyTree {
    let mut tree = root.clone();
    {
        let node = node_at_mut(&mut tree, path);
        node.children.remove(sbar_idx);
        if sbar_idx > 0 && node.children.get(sbar_idx - 1).is_some_and(|c| c.label == ",") {
            node.children.remove(sbar_idx - 1);
        } else if node.children.get(sbar_idx).is_some_and(|c| c.label == ",") {
            node.children.remove(sbar_idx);
        }
    }
    prune_empty(&mut tree);
    unwrap_clause(tree)
}

fn node_at_mut<'a>(tree: &'a mut ConstituencyTree, path: &[usize]) -> &'a mut ConstituencyTree {
    match path.split_first() {
        None => tree,
        Some((&idx, rest)) => node_at_mut(&mut tree.children[idx], rest),
    }
}

fn prune_empty(tree: &mut ConstituencyTree) {
    tree.children.retain(|c| !is_effectively_empty(c));
    for c in tree.children.iter_mut() {
        prune_empty(c);
    }
}

fn is_effectively_empty(tree: &ConstituencyTree) -> bool {
    !tree.is_leaf() && leaf_count(tree) == 0
}

/// Collapse `S[S[..]]` wrappers left behind by span removal.
fn unwrap_clause(mut tree: ConstituencyTree) -> ConstituencyTree {
    while tree.label == "S" && tree.children.len() == 1 && tree.children[0].label == "S" {
        tree = tree.children.remove(0);
    }
    tree
}

/// Rebuild one conjunct as a standalone sentence: graft it into the shared
/// fragment where the conjuncts were removed. The connective leaf is gone —
/// it belonged to the coordination node (or the SBAR) that the split
/// dissolved.
pub fn to_standalone(
    split: &ConjunctionSplit,
    which: Conjunct,
) -> Result<ConstituencyTree, ReorderError> {
    let conjunct = match which {
        Conjunct::Left => split.left.clone(),
        Conjunct::Right => split.right.clone(),
    };
    let tree = match &split.shared {
        None => conjunct,
        Some(shared) => {
            let mut tree = shared.skeleton.clone();
            graft(&mut tree, &shared.hole_path, conjunct)?;
            tree
        }
    };
    let tree = unwrap_clause(tree);
    if tree.label == "S" {
        Ok(tree)
    } else {
        Ok(ConstituencyTree::node("S", vec![tree]))
    }
}

fn graft(
    tree: &mut ConstituencyTree,
    path: &[usize],
    conjunct: ConstituencyTree,
) -> Result<(), ReorderError> {
    let target = try_node_at_mut(tree, path).ok_or_else(|| ReorderError::GraftSiteMissing {
        path: path.to_vec(),
    })?;
    if target.label != "__HOLE__" {
        return Err(ReorderError::GraftSiteMissing {
            path: path.to_vec(),
        });
    }
    *target = conjunct;
    Ok(())
}

fn try_node_at_mut<'a>(
    tree: &'a mut ConstituencyTree,
    path: &[usize],
) -> Option<&'a mut ConstituencyTree> {
    match path.split_first() {
        None => Some(tree),
        Some((&idx, rest)) => try_node_at_mut(tree.children.get_mut(idx)?, rest),
    }
}

/// Order a pair of standalone sentences by connective semantics. `first` and
/// `second` are in textual order.
pub fn order_pair(
    first: ConstituencyTree,
    second: ConstituencyTree,
    connective: &str,
    position: ConnectivePosition,
    lexicon: &ConnectiveLexicon,
) -> Vec<ConstituencyTree> {
    match lexicon.lookup(connective) {
        ConnectiveCategory::Neutral => vec![first, second],
        ConnectiveCategory::Alternative => vec![first],
        ConnectiveCategory::TemporalSuccession => match position {
            ConnectivePosition::BetweenSpans => vec![second, first],
            ConnectivePosition::SubordinateFirst => vec![first, second],
        },
    }
}

/// Split and order to a fixpoint: no returned tree contains a conjunction.
pub fn normalize(
    tree: ConstituencyTree,
    lexicon: &ConnectiveLexicon,
) -> Result<Vec<ConstituencyTree>, ReorderError> {
    normalize_rec(tree, lexicon, 0, DEFAULT_RECURSION_LIMIT)
}

/// [`normalize`] with an explicit recursion limit.
pub fn normalize_with_limit(
    tree: ConstituencyTree,
    lexicon: &ConnectiveLexicon,
    limit: usize,
) -> Result<Vec<ConstituencyTree>, ReorderError> {
    normalize_rec(tree, lexicon, 0, limit)
}

fn normalize_rec(
    tree: ConstituencyTree,
    lexicon: &ConnectiveLexicon,
    depth: usize,
    limit: usize,
) -> Result<Vec<ConstituencyTree>, ReorderError> {
    if depth > limit {
        return Err(ReorderError::RecursionLimit { limit });
    }
    let split = match find_outermost_conjunction(&tree) {
        None => return Ok(vec![tree]),
        Some(split) => split,
    };
    let left = to_standalone(&split, Conjunct::Left)?;
    let right = to_standalone(&split, Conjunct::Right)?;
    let ordered = order_pair(left, right, &split.connective, split.position, lexicon);
    let mut out = Vec::new();
    for t in ordered {
        out.extend(normalize_rec(t, lexicon, depth + 1, limit)?);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sentence_ingest::parse_restricted;

    fn lex() -> ConnectiveLexicon {
        ConnectiveLexicon::default()
    }

    fn sentences(trees: &[ConstituencyTree]) -> Vec<String> {
        trees.iter().map(|t| t.yield_text()).collect()
    }

    #[test]
    fn finds_vp_coordination_with_shared_subject() {
        let tree = parse_restricted("I tap Save and rotate the screen").unwrap();
        let split = find_outermost_conjunction(&tree).expect("split");
        assert_eq!(split.connective, "and");
        assert_eq!(split.position, ConnectivePosition::BetweenSpans);
        assert_eq!(split.left.label, "VP");
        assert_eq!(split.right.label, "VP");
        assert_eq!(split.left.yield_text(), "tap Save");
        assert_eq!(split.right.yield_text(), "rotate the screen");
    }

    #[test]
    fn no_conjunction_yields_none() {
        let tree = parse_restricted("I click the button").unwrap();
        assert!(find_outermost_conjunction(&tree).is_none());
    }

    #[test]
    fn finds_subordination_with_when() {
        let tree = parse_restricted("the app crashes when I press back").unwrap();
        let split = find_outermost_conjunction(&tree).expect("split");
        assert_eq!(split.connective, "when");
        assert_eq!(split.position, ConnectivePosition::BetweenSpans);
        assert_eq!(split.left.yield_text(), "the app crashes");
        assert_eq!(split.right.yield_text(), "I press back");
    }

    #[test]
    fn leading_subordinate_clause_is_subordinate_first() {
        let tree = parse_restricted("When I press back, the app crashes").unwrap();
        let split = find_outermost_conjunction(&tree).expect("split");
        assert_eq!(split.connective, "when");
        assert_eq!(split.position, ConnectivePosition::SubordinateFirst);
        assert_eq!(split.left.yield_text(), "I press back");
        assert_eq!(split.right.yield_text(), "the app crashes");
    }

    #[test]
    fn standalone_duplicates_shared_subject() {
        let tree = parse_restricted("I tap Save and rotate the screen").unwrap();
        let split = find_outermost_conjunction(&tree).unwrap();
        let left = to_standalone(&split, Conjunct::Left).unwrap();
        let right = to_standalone(&split, Conjunct::Right).unwrap();
        assert_eq!(left.yield_text(), "I tap Save");
        assert_eq!(right.yield_text(), "I rotate the screen");
        assert_eq!(left.label, "S");
        assert_eq!(right.label, "S");
    }

    #[test]
    fn standalone_of_full_clause_coordination_returns_conjunct() {
        let tree = parse_restricted("I tap Save and I rotate the screen").unwrap();
        let split = find_outermost_conjunction(&tree).unwrap();
        let left = to_standalone(&split, Conjunct::Left).unwrap();
        assert_eq!(left.yield_text(), "I tap Save");
        assert_eq!(left, split.left);
    }

    #[test]
    fn standalone_strips_subordinate_connective() {
        let tree = parse_restricted("the app crashes when I press back").unwrap();
        let split = find_outermost_conjunction(&tree).unwrap();
        let sub = to_standalone(&split, Conjunct::Right).unwrap();
        assert_eq!(sub.yield_text(), "I press back");
    }

    #[test]
    fn order_pair_neutral_keeps_textual_order() {
        let a = parse_restricted("I tap Save").unwrap();
        let b = parse_restricted("I rotate the screen").unwrap();
        let out = order_pair(
            a.clone(),
            b.clone(),
            "then",
            ConnectivePosition::BetweenSpans,
            &lex(),
        );
        assert_eq!(sentences(&out), ["I tap Save", "I rotate the screen"]);
    }

    #[test]
    fn order_pair_when_reverses() {
        let a = parse_restricted("I tap Save").unwrap();
        let b = parse_restricted("I rotate the screen").unwrap();
        let out = order_pair(a, b, "when", ConnectivePosition::BetweenSpans, &lex());
        assert_eq!(sentences(&out), ["I rotate the screen", "I tap Save"]);
    }

    #[test]
    fn order_pair_or_selects_one() {
        let a = parse_restricted("I tap Save").unwrap();
        let b = parse_restricted("I rotate the screen").unwrap();
        let out = order_pair(a, b, "or", ConnectivePosition::BetweenSpans, &lex());
        assert_eq!(sentences(&out), ["I tap Save"]);
    }

    #[test]
    fn normalize_single_clause_is_fixpoint() {
        let tree = parse_restricted("I click the button").unwrap();
        let out = normalize(tree.clone(), &lex()).unwrap();
        assert_eq!(out, vec![tree]);
    }

    #[test]
    fn normalize_nested_coordination_and_subordination() {
        let tree =
            parse_restricted("I open the settings and the app crashes when I press back")
                .unwrap();
        let out = normalize(tree, &lex()).unwrap();
        assert_eq!(
            sentences(&out),
            [
                "I open the settings",
                "I press back",
                "the app crashes"
            ]
        );
    }

    #[test]
    fn normalize_output_has_no_conjunctions() {
        let tree = parse_restricted(
            "I tap Save and I scroll down when I open the menu or I press back",
        )
        .unwrap();
        for t in normalize(tree, &lex()).unwrap() {
            assert!(find_outermost_conjunction(&t).is_none());
        }
    }

    #[test]
    fn recursion_limit_guards_deep_trees() {
        let mut text = String::from("I tap Save");
        for _ in 0..20 {
            text.push_str(" and I tap Save");
        }
        let tree = parse_restricted(&text).unwrap();
        let err = normalize_with_limit(tree, &lex(), 16).unwrap_err();
        assert_eq!(err, ReorderError::RecursionLimit { limit: 16 });
    }

    #[test]
    fn lexicon_parse_and_lookup() {
        let lex = ConnectiveLexicon::parse("when\tTemporalSuccession\nor\tAlternative\n").unwrap();
        assert_eq!(lex.lookup("WHEN"), ConnectiveCategory::TemporalSuccession);
        assert_eq!(lex.lookup("or"), ConnectiveCategory::Alternative);
        assert_eq!(lex.lookup("zorble"), ConnectiveCategory::Neutral);
        assert!(ConnectiveLexicon::parse("bad-line-without-tab\n").is_err());
    }
}
