//! The extraction pipeline shared by the commands: report text to parse
//! trees to reordered standalone sentences to structured steps, with a
//! diff-friendly report document of every intermediate.

use anyhow::{Context, Result};
use reproforge_core::embeddings::VectorStore;
use reproforge_core::reorder::{normalize, ConnectiveLexicon};
use reproforge_core::s2r_extract::{
    write_s2rs, ActionLexicon, ExtractionWarning, Extractor, SpecialValues, S2R,
};
use reproforge_core::sentence_ingest::{parse_bracketed_records, parse_restricted, TagSet};

use crate::config::{InputMode, RunConfig};

/// One input sentence and what became of it.
#[derive(Debug, Clone)]
pub struct SentenceRecord {
    pub text: String,
    pub standalone: Vec<String>,
}

/// Everything the extraction stage produced.
#[derive(Debug, Clone)]
pub struct ExtractionReport {
    pub sentences: Vec<SentenceRecord>,
    pub steps: Vec<S2R>,
    pub warnings: Vec<ExtractionWarning>,
}

impl ExtractionReport {
    pub fn has_warnings(&self) -> bool {
        !self.warnings.is_empty()
    }

    /// Serialize with stable key order.
    pub fn to_document(&self) -> String {
        let mut out = String::new();
        out.push_str("schema_version: 1\n");
        out.push_str(&format!("sentences: {}\n", self.sentences.len()));
        out.push_str(&format!(
            "standalone_sentences: {}\n",
            self.sentences.iter().map(|s| s.standalone.len()).sum::<usize>()
        ));
        out.push_str(&format!("s2rs: {}\n", self.steps.len()));
        out.push_str(&format!("warnings: {}\n", self.warnings.len()));
        for (i, sentence) in self.sentences.iter().enumerate() {
            out.push('\n');
            out.push_str(&format!("[sentence {}]\n", i + 1));
            out.push_str(&format!("text: {}\n", sentence.text));
            for (j, standalone) in sentence.standalone.iter().enumerate() {
                out.push_str(&format!("standalone {}: {}\n", j + 1, standalone));
            }
        }
        if !self.steps.is_empty() {
            out.push('\n');
            out.push_str(&write_s2rs(&self.steps));
        }
        for (i, warning) in self.warnings.iter().enumerate() {
            out.push('\n');
            out.push_str(&format!("[warning {}]\n", i + 1));
            out.push_str(&format!("sentence: {}\n", warning.sentence));
            out.push_str(&format!("reason: {}\n", warning.reason));
            out.push_str(&format!("recovered: {}\n", warning.recovered));
        }
        out
    }
}

/// Loaded lexicons and vectors for one invocation.
pub struct Resources {
    pub connectives: ConnectiveLexicon,
    pub actions: ActionLexicon,
    pub specials: SpecialValues,
    pub store: VectorStore,
}

impl Resources {
    pub fn load(config: &RunConfig) -> Result<Resources> {
        let connectives = match &config.connectives_path {
            None => ConnectiveLexicon::default(),
            Some(path) => {
                let text = std::fs::read_to_string(path)
                    .with_context(|| format!("cannot read {}", path.display()))?;
                ConnectiveLexicon::parse(&text)?
            }
        };
        let actions = match &config.actions_path {
            None => ActionLexicon::default(),
            Some(path) => {
                let text = std::fs::read_to_string(path)
                    .with_context(|| format!("cannot read {}", path.display()))?;
                ActionLexicon::parse(&text)?
            }
        };
        let specials = match &config.specials_path {
            None => SpecialValues::default(),
            Some(path) => {
                let text = std::fs::read_to_string(path)
                    .with_context(|| format!("cannot read {}", path.display()))?;
                SpecialValues::parse(&text)?
            }
        };
        let store = match &config.embeddings_path {
            None => VectorStore::bundled(),
            Some(path) => VectorStore::load(path)?,
        };
        Ok(Resources {
            connectives,
            actions,
            specials,
            store,
        })
    }
}

/// Strip a leading enumeration marker ("1.", "2)", "-", "*") from a report
/// line.
fn strip_enumeration(line: &str) -> &str {
    let line = line.trim();
    if let Some(rest) = line.strip_prefix("- ").or_else(|| line.strip_prefix("* ")) {
        return rest.trim_start();
    }
    let digits = line.chars().take_while(|c| c.is_ascii_digit()).count();
    if digits > 0 {
        let rest = &line[digits..];
        if let Some(rest) = rest.strip_prefix('.').or_else(|| rest.strip_prefix(')')) {
            return rest.trim_start();
        }
    }
    line
}

/// Run the extraction stage over a report file's text.
pub fn extract_report(
    report_text: &str,
    mode: InputMode,
    resources: &Resources,
    delta: f64,
) -> Result<ExtractionReport> {
    let extractor = Extractor::new(
        &resources.actions,
        &resources.specials,
        &resources.store,
        delta,
    );
    let mut report = ExtractionReport {
        sentences: Vec::new(),
        steps: Vec::new(),
        warnings: Vec::new(),
    };

    let inputs: Vec<(String, Result<reproforge_core::sentence_ingest::ConstituencyTree, String>)> =
        match mode {
            InputMode::Text => report_text
                .lines()
                .map(strip_enumeration)
                .filter(|l| !l.is_empty())
                .map(|line| {
                    (
                        line.to_string(),
                        parse_restricted(line).map_err(|e| e.to_string()),
                    )
                })
                .collect(),
            InputMode::Trees => {
                let tags = TagSet::default();
                let trees = parse_bracketed_records(report_text, &tags)
                    .map_err(|e| anyhow::anyhow!("bracketed input: {e}"))?;
                trees
                    .into_iter()
                    .map(|t| (t.yield_text(), Ok(t)))
                    .collect()
            }
        };

    for (text, parsed) in inputs {
        match parsed {
            Err(reason) => {
                report.sentences.push(SentenceRecord {
                    text: text.clone(),
                    standalone: Vec::new(),
                });
                report.warnings.push(ExtractionWarning {
                    sentence: text,
                    reason,
                    recovered: false,
                });
            }
            Ok(tree) => {
                let standalone = normalize(tree, &resources.connectives)
                    .map_err(|e| anyhow::anyhow!("normalize: {e}"))?;
                report.sentences.push(SentenceRecord {
                    text,
                    standalone: standalone.iter().map(|t| t.yield_text()).collect(),
                });
                let outcome = extractor.extract_all(&standalone);
                report.steps.extend(outcome.steps);
                report.warnings.extend(outcome.warnings);
            }
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn resources() -> Resources {
        Resources::load(&RunConfig::default()).unwrap()
    }

    #[test]
    fn enumeration_markers_are_stripped() {
        assert_eq!(strip_enumeration("1. Open the app"), "Open the app");
        assert_eq!(strip_enumeration("2) I tap Save"), "I tap Save");
        assert_eq!(strip_enumeration("- I tap Save"), "I tap Save");
        assert_eq!(strip_enumeration("I tap Save"), "I tap Save");
        assert_eq!(strip_enumeration("13 is entered"), "13 is entered");
    }

    #[test]
    fn report_counts_are_conserved() {
        let text = "I tap Save and I press the BACK button\nColorless green ideas sleep\n";
        let report = extract_report(text, InputMode::Text, &resources(), 0.1).unwrap();
        assert_eq!(report.sentences.len(), 2);
        let standalone: usize = report.sentences.iter().map(|s| s.standalone.len()).sum();
        // Output sentences plus warnings cover every input sentence.
        assert!(standalone + report.warnings.len() >= report.sentences.len());
        assert_eq!(report.steps.len(), 2);
        assert_eq!(report.warnings.len(), 1);
    }

    #[test]
    fn tree_mode_accepts_bracketed_records() {
        let text = "(S (NP (PRP I)) (VP (VBP tap) (NP (NNP Save))))\n\n\
                    (S (NP (PRP I)) (VP (VBP press) (NP (DT the) (NNP BACK) (NN button))))\n";
        let report = extract_report(text, InputMode::Trees, &resources(), 0.1).unwrap();
        assert_eq!(report.steps.len(), 2);
        assert_eq!(report.steps[0].target_widget.as_deref(), Some("Save"));
    }

    #[test]
    fn document_is_deterministic() {
        let text = "I tap Save\n";
        let a = extract_report(text, InputMode::Text, &resources(), 0.1)
            .unwrap()
            .to_document();
        let b = extract_report(text, InputMode::Text, &resources(), 0.1)
            .unwrap()
            .to_document();
        assert_eq!(a, b);
        assert!(a.contains("[s2r 1]"));
    }
}
