//! Extraction precision/recall under the four step-correctness conditions:
//! exact action, target containing the ground-truth target words, exact
//! input value, exact direction.

use reproforge_core::embeddings::similarity_tokens;
use reproforge_core::s2r_extract::S2R;

/// Is an extracted step correct with respect to a ground-truth step?
pub fn step_correct(extracted: &S2R, truth: &S2R) -> bool {
    if extracted.action != truth.action {
        return false;
    }
    if let Some(truth_target) = &truth.target_widget {
        let Some(found) = &extracted.target_widget else {
            return false;
        };
        let found_tokens = similarity_tokens(found);
        if !similarity_tokens(truth_target)
            .iter()
            .all(|w| found_tokens.contains(w))
        {
            return false;
        }
    }
    if extracted.input_value != truth.input_value {
        return false;
    }
    extracted.direction == truth.direction
}

#[derive(Debug, Clone, PartialEq)]
pub struct PrecisionRecall {
    pub extracted: usize,
    pub truth: usize,
    pub correct: usize,
}

impl PrecisionRecall {
    pub fn precision(&self) -> f64 {
        if self.extracted == 0 {
            0.0
        } else {
            self.correct as f64 / self.extracted as f64
        }
    }

    pub fn recall(&self) -> f64 {
        if self.truth == 0 {
            0.0
        } else {
            self.correct as f64 / self.truth as f64
        }
    }
}

/// Score extracted steps against ground truth. Steps pair up by source
/// sentence, in order within equal sentences; extracted steps with no
/// ground-truth partner count against precision, unmatched ground truth
/// against recall.
pub fn score(extracted: &[S2R], truth: &[S2R]) -> PrecisionRecall {
    let mut truth_used = vec![false; truth.len()];
    let mut correct = 0;
    for step in extracted {
        let partner = truth.iter().enumerate().find(|(i, t)| {
            !truth_used[*i] && t.source_sentence == step.source_sentence
        });
        if let Some((i, t)) = partner {
            truth_used[i] = true;
            if step_correct(step, t) {
                correct += 1;
            }
        }
    }
    PrecisionRecall {
        extracted: extracted.len(),
        truth: truth.len(),
        correct,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use reproforge_core::s2r_extract::{ActionKind, Direction};

    fn step(
        sentence: &str,
        action: ActionKind,
        target: Option<&str>,
        input: Option<&str>,
        direction: Option<Direction>,
    ) -> S2R {
        S2R::new(
            action,
            if input.is_some() && action != ActionKind::Input {
                Some(ActionKind::Input)
            } else {
                None
            },
            target.map(String::from),
            input.map(String::from),
            direction,
            sentence.to_string(),
        )
        .unwrap()
    }

    #[test]
    fn action_must_match_exactly() {
        let a = step("s", ActionKind::Click, Some("OK"), None, None);
        let b = step("s", ActionKind::Input, Some("OK"), None, None);
        assert!(!step_correct(&a, &b));
        assert!(step_correct(&a, &a));
    }

    #[test]
    fn target_inclusion_is_token_based() {
        let truth = step("s", ActionKind::Click, Some("CANCEL button"), None, None);
        let more = step(
            "s",
            ActionKind::Click,
            Some("the big CANCEL button widget"),
            None,
            None,
        );
        let less = step("s", ActionKind::Click, Some("cancel"), None, None);
        assert!(step_correct(&more, &truth));
        assert!(!step_correct(&less, &truth));
        // Case-insensitive containment.
        let folded = step("s", ActionKind::Click, Some("cancel BUTTON"), None, None);
        assert!(step_correct(&folded, &truth));
    }

    #[test]
    fn absent_truth_target_is_unconstrained() {
        let truth = step("s", ActionKind::Scroll, None, None, Some(Direction::Down));
        let junky = step(
            "s",
            ActionKind::Scroll,
            Some("down"),
            None,
            Some(Direction::Down),
        );
        assert!(step_correct(&junky, &truth));
    }

    #[test]
    fn input_and_direction_are_exact() {
        let truth = step("s", ActionKind::Input, Some("port field"), Some("13"), None);
        let wrong = step("s", ActionKind::Input, Some("port field"), Some("14"), None);
        assert!(!step_correct(&wrong, &truth));
        let truth = step("s", ActionKind::Swipe, None, None, Some(Direction::Left));
        let wrong = step("s", ActionKind::Swipe, None, None, Some(Direction::Right));
        assert!(!step_correct(&wrong, &truth));
    }

    #[test]
    fn score_pairs_by_sentence() {
        let truth = vec![
            step("one", ActionKind::Click, Some("A"), None, None),
            step("two", ActionKind::Click, Some("B"), None, None),
        ];
        let extracted = vec![
            step("one", ActionKind::Click, Some("A"), None, None),
            // No ground truth for this sentence: precision hit only.
            step("noise", ActionKind::Click, None, None, None),
        ];
        let pr = score(&extracted, &truth);
        assert_eq!(pr.correct, 1);
        assert_eq!(pr.extracted, 2);
        assert_eq!(pr.truth, 2);
        assert!((pr.precision() - 0.5).abs() < 1e-12);
        assert!((pr.recall() - 0.5).abs() < 1e-12);
    }

    #[test]
    fn empty_inputs_give_zero_rates() {
        let pr = score(&[], &[]);
        assert_eq!(pr.precision(), 0.0);
        assert_eq!(pr.recall(), 0.0);
    }
}
