//! Parser for bracketed (Penn-Treebank-style) constituency trees.

use super::{ConstituencyTree, IngestError, TagSet, Token};

/// Parse a single bracketed tree, e.g.
/// `(S (NP (PRP I)) (VP (VBP click) (NP (DT the) (NN button))))`.
///
/// Labels must belong to the [`TagSet`]; the canonical serialization of the
/// result round-trips through this parser.
pub fn parse_bracketed(input: &str, tags: &TagSet) -> Result<ConstituencyTree, IngestError> {
    let bytes: Vec<char> = input.chars().collect();
    let mut parser = Parser {
        chars: &bytes,
        pos: 0,
        tags,
    };
    parser.skip_ws();
    let tree = parser.parse_node()?;
    parser.skip_ws();
    if parser.pos < parser.chars.len() {
        return Err(IngestError::UnbalancedParens { offset: parser.pos });
    }
    Ok(tree)
}

/// Parse a file of bracketed trees, one record per blank-line-separated block.
pub fn parse_bracketed_records(
    input: &str,
    tags: &TagSet,
) -> Result<Vec<ConstituencyTree>, IngestError> {
    input
        .split("\n\n")
        .map(str::trim)
        .filter(|block| !block.is_empty())
        .map(|block| parse_bracketed(block, tags))
        .collect()
}

struct Parser<'a> {
    chars: &'a [char],
    pos: usize,
    tags: &'a TagSet,
}

impl<'a> Parser<'a> {
    fn skip_ws(&mut self) {
        while self.pos < self.chars.len() && self.chars[self.pos].is_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&self) -> Option<char> {
        self.chars.get(self.pos).copied()
    }

    fn read_atom(&mut self) -> String {
        let start = self.pos;
        while let Some(c) = self.peek() {
            if c == '(' || c == ')' || c.is_whitespace() {
                break;
            }
            self.pos += 1;
        }
        self.chars[start..self.pos].iter().collect()
    }

    fn parse_node(&mut self) -> Result<ConstituencyTree, IngestError> {
        let open = self.pos;
        if self.peek() != Some('(') {
            return Err(IngestError::UnbalancedParens { offset: self.pos });
        }
        self.pos += 1;
        self.skip_ws();

        let label_offset = self.pos;
        let label = self.read_atom();
        if label.is_empty() {
            return Err(IngestError::EmptyNode { offset: open });
        }
        if !self.tags.contains(&label) {
            return Err(IngestError::UnknownLabel {
                label,
                offset: label_offset,
            });
        }

        let mut children = Vec::new();
        let mut token: Option<Token> = None;
        loop {
            self.skip_ws();
            match self.peek() {
                Some(')') => {
                    self.pos += 1;
                    break;
                }
                Some('(') => {
                    if token.is_some() {
                        return Err(IngestError::MalformedNode { offset: self.pos });
                    }
                    children.push(self.parse_node()?);
                }
                Some(_) => {
                    let word_offset = self.pos;
                    let word = self.read_atom();
                    if token.is_some() || !children.is_empty() {
                        return Err(IngestError::MalformedNode { offset: word_offset });
                    }
                    token = Some(Token::new(word));
                }
                None => return Err(IngestError::UnbalancedParens { offset: self.pos }),
            }
        }

        match (token, children.is_empty()) {
            (Some(tok), true) => Ok(ConstituencyTree::leaf(label, tok)),
            (None, false) => Ok(ConstituencyTree::node(label, children)),
            (None, true) => Err(IngestError::EmptyNode { offset: open }),
            (Some(_), false) => unreachable!("mixed content rejected above"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tags() -> TagSet {
        TagSet::default()
    }

    #[test]
    fn parses_example_tree() {
        let tree = parse_bracketed("(S (NP (PRP I)) (VP (VBP click)))", &tags()).unwrap();
        assert_eq!(tree.label, "S");
        assert_eq!(tree.children.len(), 2);
        assert_eq!(tree.children[0].label, "NP");
        assert_eq!(tree.children[0].children[0].label, "PRP");
        assert_eq!(tree.children[0].children[0].token.as_ref().unwrap().text, "I");
        assert_eq!(tree.yield_text(), "I click");
    }

    #[test]
    fn unbalanced_parens_at_end_of_input() {
        let err = parse_bracketed("(S (NP (PRP I))", &tags()).unwrap_err();
        assert_eq!(err, IngestError::UnbalancedParens { offset: 15 });
    }

    #[test]
    fn trailing_garbage_is_unbalanced() {
        let err = parse_bracketed("(S (NP (PRP I))))", &tags()).unwrap_err();
        assert!(matches!(err, IngestError::UnbalancedParens { .. }));
    }

    #[test]
    fn empty_node_rejected() {
        assert!(matches!(
            parse_bracketed("(S (NP))", &tags()),
            Err(IngestError::EmptyNode { .. })
        ));
        assert!(matches!(
            parse_bracketed("()", &tags()),
            Err(IngestError::EmptyNode { offset: 0 })
        ));
    }

    #[test]
    fn unknown_label_reports_offset() {
        let err = parse_bracketed("(S (XYZ hello))", &tags()).unwrap_err();
        assert_eq!(
            err,
            IngestError::UnknownLabel {
                label: "XYZ".into(),
                offset: 4
            }
        );
    }

    #[test]
    fn preterminal_with_two_tokens_rejected() {
        assert!(matches!(
            parse_bracketed("(NP the button)", &tags()),
            Err(IngestError::MalformedNode { .. })
        ));
    }

    #[test]
    fn serialization_round_trips() {
        let text = "(S (NP (PRP I)) (VP (VBP click) (NP (DT the) (NN button))))";
        let tree = parse_bracketed(text, &tags()).unwrap();
        assert_eq!(tree.serialize(), text);
        assert_eq!(parse_bracketed(&tree.serialize(), &tags()).unwrap(), tree);
    }

    #[test]
    fn records_split_on_blank_lines() {
        let trees =
            parse_bracketed_records("(S (PRP I))\n\n(S (VB go))\n\n\n", &tags()).unwrap();
        assert_eq!(trees.len(), 2);
    }

    #[test]
    fn whitespace_variants_parse_identically() {
        let a = parse_bracketed("(S (NP (PRP I)) (VP (VB go)))", &tags()).unwrap();
        let b = parse_bracketed("(S\n  (NP (PRP I))\n  (VP (VB go)))", &tags()).unwrap();
        assert_eq!(a, b);
    }
}
