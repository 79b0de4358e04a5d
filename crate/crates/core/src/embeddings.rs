//! Word-vector store and phrase-level cosine similarity.
//!
//! The similarity primitive is shared by action classification (which verb
//! group is a predicate closest to?) and by reward scoring (how well does a
//! widget description match a target-widget phrase?). Vectors are loaded from
//! a plain-text file: a `count dim` header line followed by one
//! `word c1 .. c_dim` row per word. A small hand-built file covering the test
//! corpus vocabulary is bundled; see `VectorStore::bundled`.

use std::collections::HashMap;
use std::fmt;
use std::path::Path;

use thiserror::Error;

/// Articles excluded from phrase aggregation.
const STOP_ARTICLES: [&str; 3] = ["the", "a", "an"];

/// Text of the word-vector file shipped with the crate.
///
/// Geometry: 20 dimensions arranged as ten orthogonal 2-D planes, one per
/// word cluster (one plane per UI-action synonym group, five noun/misc
/// planes). Words within a plane sit at fixed angles, so intra-cluster
/// cosines are `cos(angle difference)` and cross-cluster cosines are exactly
/// zero, except for a few deliberately mixed words ("change", "update",
/// "turn") placed between planes.
pub const BUNDLED_VECTORS: &str = include_str!("../data/vectors.txt");

#[derive(Debug, Error, PartialEq)]
pub enum EmbeddingError {
    #[error("bad header: expected `count dim`, got {0:?}")]
    BadHeader(String),
    #[error("line {line}: expected {expected} components, found {found}")]
    DimensionMismatch {
        line: usize,
        expected: usize,
        found: usize,
    },
    #[error("line {line}: duplicate word {word:?}")]
    DuplicateWord { line: usize, word: String },
    #[error("line {line}: unparsable component {text:?}")]
    BadComponent { line: usize, text: String },
    #[error("header declares {declared} entries, file has {found}")]
    CountMismatch { declared: usize, found: usize },
}

/// Immutable map from case-folded words to fixed-dimension vectors.
#[derive(Debug, Clone)]
pub struct VectorStore {
    dim: usize,
    table: HashMap<String, Vec<f64>>,
}

/// Mean vector of a phrase's in-vocabulary tokens.
#[derive(Debug, Clone, PartialEq)]
pub struct PhraseVector {
    pub components: Vec<f64>,
    pub in_vocab_count: usize,
}

impl PhraseVector {
    pub fn is_zero(&self) -> bool {
        self.in_vocab_count == 0
    }
}

impl VectorStore {
    /// Parse a vector file from text. First line is `count dim`; each
    /// following non-empty line is `word c1 .. c_dim`.
    pub fn parse(text: &str) -> Result<Self, EmbeddingError> {
        let mut lines = text.lines().enumerate();
        let (_, header) = lines
            .next()
            .ok_or_else(|| EmbeddingError::BadHeader(String::new()))?;
        let mut parts = header.split_whitespace();
        let count: usize = parts
            .next()
            .and_then(|p| p.parse().ok())
            .ok_or_else(|| EmbeddingError::BadHeader(header.to_string()))?;
        let dim: usize = parts
            .next()
            .and_then(|p| p.parse().ok())
            .ok_or_else(|| EmbeddingError::BadHeader(header.to_string()))?;
        if dim == 0 || parts.next().is_some() {
            return Err(EmbeddingError::BadHeader(header.to_string()));
        }

        let mut table = HashMap::with_capacity(count);
        for (idx, line) in lines {
            if line.trim().is_empty() {
                continue;
            }
            let line_no = idx + 1;
            let mut fields = line.split_whitespace();
            let word = fields.next().expect("non-empty line").to_lowercase();
            let mut vec = Vec::with_capacity(dim);
            for field in fields {
                let c: f64 = field.parse().map_err(|_| EmbeddingError::BadComponent {
                    line: line_no,
                    text: field.to_string(),
                })?;
                vec.push(c);
            }
            if vec.len() != dim {
                return Err(EmbeddingError::DimensionMismatch {
                    line: line_no,
                    expected: dim,
                    found: vec.len(),
                });
            }
            if table.contains_key(&word) {
                return Err(EmbeddingError::DuplicateWord {
                    line: line_no,
                    word,
                });
            }
            table.insert(word, vec);
        }
        if table.len() != count {
            return Err(EmbeddingError::CountMismatch {
                declared: count,
                found: table.len(),
            });
        }
        Ok(VectorStore { dim, table })
    }

    /// Load a vector file from disk.
    pub fn load(path: &Path) -> Result<Self, LoadError> {
        let text = std::fs::read_to_string(path).map_err(|source| LoadError::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::parse(&text).map_err(LoadError::Format)
    }

    /// The vector store bundled with the crate.
    pub fn bundled() -> Self {
        Self::parse(BUNDLED_VECTORS).expect("bundled vector file is well-formed")
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.table.len()
    }

    pub fn is_empty(&self) -> bool {
        self.table.is_empty()
    }

    pub fn contains(&self, word: &str) -> bool {
        self.table.contains_key(&word.to_lowercase())
    }

    pub fn get(&self, word: &str) -> Option<&[f64]> {
        self.table.get(&word.to_lowercase()).map(|v| v.as_slice())
    }
}

impl fmt::Display for VectorStore {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "VectorStore({} words, dim {})", self.table.len(), self.dim)
    }
}

#[derive(Debug, Error)]
pub enum LoadError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error(transparent)]
    Format(EmbeddingError),
}

/// Split text into case-folded alphanumeric tokens. Underscores, dashes and
/// other punctuation separate tokens, so resource ids like `btn_save` yield
/// `[btn, save]`.
pub fn similarity_tokens(text: &str) -> Vec<String> {
    let mut tokens = Vec::new();
    let mut current = String::new();
    for ch in text.chars() {
        if ch.is_alphanumeric() {
            current.extend(ch.to_lowercase());
        } else if !current.is_empty() {
            tokens.push(std::mem::take(&mut current));
        }
    }
    if !current.is_empty() {
        tokens.push(current);
    }
    tokens
}

/// Mean of the vectors of the phrase's in-vocabulary tokens, articles
/// excluded. An all-out-of-vocabulary phrase yields the zero vector with
/// `in_vocab_count` 0.
pub fn phrase_vector(text: &str, store: &VectorStore) -> PhraseVector {
    let mut sum = vec![0.0; store.dim()];
    let mut count = 0usize;
    for token in similarity_tokens(text) {
        if STOP_ARTICLES.contains(&token.as_str()) {
            continue;
        }
        if let Some(vec) = store.get(&token) {
            for (s, c) in sum.iter_mut().zip(vec) {
                *s += c;
            }
            count += 1;
        }
    }
    if count > 0 {
        for s in sum.iter_mut() {
            *s /= count as f64;
        }
    }
    PhraseVector {
        components: sum,
        in_vocab_count: count,
    }
}

fn cosine(a: &[f64], b: &[f64]) -> f64 {
    let mut dot = 0.0;
    let mut na = 0.0;
    let mut nb = 0.0;
    for (x, y) in a.iter().zip(b) {
        dot += x * y;
        na += x * x;
        nb += y * y;
    }
    if na == 0.0 || nb == 0.0 {
        return 0.0;
    }
    // Rounding can push the ratio a ulp past 1.
    (dot / (na.sqrt() * nb.sqrt())).clamp(-1.0, 1.0)
}

/// Cosine similarity of two phrases in `[-1, 1]`.
///
/// If either phrase has no in-vocabulary token the result falls back to an
/// exact-match indicator over the case-folded token sequences: 1.0 when they
/// are equal, 0.0 otherwise.
pub fn similarity(a: &str, b: &str, store: &VectorStore) -> f64 {
    let va = phrase_vector(a, store);
    let vb = phrase_vector(b, store);
    if va.is_zero() || vb.is_zero() {
        let ta = similarity_tokens(a);
        let tb = similarity_tokens(b);
        return if !ta.is_empty() && ta == tb { 1.0 } else { 0.0 };
    }
    cosine(&va.components, &vb.components)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toy() -> VectorStore {
        VectorStore::parse("3 3\nbutton 1 0 0\ncancel 0 1 0\nsave 0.707107 0.707107 0\n")
            .unwrap()
    }

    #[test]
    fn parse_well_formed_file() {
        let store = VectorStore::parse("2 3\nfoo 1 0 0\nbar 0 1 0\n").unwrap();
        assert_eq!(store.len(), 2);
        assert_eq!(store.dim(), 3);
        assert!(store.contains("FOO"));
    }

    #[test]
    fn dimension_mismatch_reports_line() {
        let err = VectorStore::parse("2 3\nfoo 1 0 0\nbar 0 1\n").unwrap_err();
        assert_eq!(
            err,
            EmbeddingError::DimensionMismatch {
                line: 3,
                expected: 3,
                found: 2
            }
        );
    }

    #[test]
    fn duplicate_word_rejected() {
        let err = VectorStore::parse("2 2\nfoo 1 0\nFOO 0 1\n").unwrap_err();
        assert!(matches!(err, EmbeddingError::DuplicateWord { line: 3, .. }));
    }

    #[test]
    fn bad_header_rejected() {
        assert!(matches!(
            VectorStore::parse("two 3\nfoo 1 0 0\n"),
            Err(EmbeddingError::BadHeader(_))
        ));
        assert!(matches!(
            VectorStore::parse(""),
            Err(EmbeddingError::BadHeader(_))
        ));
    }

    #[test]
    fn count_mismatch_rejected() {
        assert!(matches!(
            VectorStore::parse("3 2\nfoo 1 0\nbar 0 1\n"),
            Err(EmbeddingError::CountMismatch { .. })
        ));
    }

    #[test]
    fn phrase_vector_single_word_is_its_vector() {
        let store = toy();
        let pv = phrase_vector("button", &store);
        assert_eq!(pv.in_vocab_count, 1);
        assert_eq!(pv.components, vec![1.0, 0.0, 0.0]);
    }

    #[test]
    fn phrase_vector_excludes_articles() {
        let store = toy();
        assert_eq!(
            phrase_vector("the button", &store),
            phrase_vector("button", &store)
        );
    }

    #[test]
    fn phrase_vector_all_oov_is_zero() {
        let store = toy();
        let pv = phrase_vector("zorble quux", &store);
        assert!(pv.is_zero());
        assert_eq!(pv.components, vec![0.0; 3]);
    }

    #[test]
    fn similarity_identical_word_is_one() {
        let store = toy();
        assert!((similarity("button", "button", &store) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn similarity_orthogonal_is_zero() {
        let store = toy();
        assert_eq!(similarity("button", "cancel", &store), 0.0);
    }

    #[test]
    fn similarity_oov_falls_back_to_exact_match() {
        let store = toy();
        assert_eq!(similarity("zorble", "zorble", &store), 1.0);
        assert_eq!(similarity("zorble", "quux", &store), 0.0);
        assert_eq!(similarity("zorble", "Zorble", &store), 1.0);
        assert_eq!(similarity("", "", &store), 0.0);
    }

    // Frozen oracle value, brute-forced from the bundled file; equals
    // cos(45 deg) because the two words sit in orthogonal planes.
    #[allow(clippy::approx_constant)]
    const COS_WORD_VS_PAIR: f64 = 0.707107;

    #[test]
    fn bundled_store_loads_and_pins_hold() {
        let store = VectorStore::bundled();
        assert_eq!(store.dim(), 20);
        assert!((similarity("Cancel", "CANCEL button", &store) - COS_WORD_VS_PAIR).abs() < 1e-5);
        assert!(
            (similarity("Save Document", "save document button", &store) - 0.816497).abs()
                < 1e-5
        );
        assert!((similarity("Save", "save document button", &store) - 0.577350).abs() < 1e-5);
        assert_eq!(similarity("click", "scroll", &store), 0.0);
    }
}
