//! Whitespace-plus-punctuation tokenizer for plain report sentences.

use super::Token;

/// Split a raw sentence into tokens.
///
/// - Whitespace separates tokens.
/// - Commas become their own tokens.
/// - Double quotes are stripped; tokens inside a quoted span carry
///   `quoted = true`.
/// - Terminal punctuation (`.` `!` `?` `;` `:`) is dropped.
/// - Apostrophes inside a word are kept (`don't`).
pub fn tokenize(sentence: &str) -> Vec<Token> {
    let mut tokens = Vec::new();
    let mut current = String::new();
    let mut in_quotes = false;

    let flush = |buf: &mut String, quoted: bool, out: &mut Vec<Token>| {
        if !buf.is_empty() {
            let mut tok = Token::new(std::mem::take(buf));
            tok.quoted = quoted;
            out.push(tok);
        }
    };

    for ch in sentence.chars() {
        match ch {
            '"' | '\u{201c}' | '\u{201d}' => {
                flush(&mut current, in_quotes, &mut tokens);
                in_quotes = !in_quotes;
            }
            ',' => {
                flush(&mut current, in_quotes, &mut tokens);
                let mut tok = Token::new(",");
                tok.quoted = in_quotes;
                tokens.push(tok);
            }
            '.' | '!' | '?' | ';' | ':' | '(' | ')' | '[' | ']' => {
                flush(&mut current, in_quotes, &mut tokens);
            }
            c if c.is_whitespace() => {
                flush(&mut current, in_quotes, &mut tokens);
            }
            c => current.push(c),
        }
    }
    flush(&mut current, in_quotes, &mut tokens);
    tokens
}

#[cfg(test)]
mod tests {
    use super::*;

    fn texts(tokens: &[Token]) -> Vec<&str> {
        tokens.iter().map(|t| t.text.as_str()).collect()
    }

    #[test]
    fn splits_on_whitespace_and_drops_final_period() {
        let toks = tokenize("I click the OK button.");
        assert_eq!(texts(&toks), ["I", "click", "the", "OK", "button"]);
        assert!(toks.iter().all(|t| !t.quoted));
    }

    #[test]
    fn comma_is_its_own_token() {
        let toks = tokenize("I tap Save, and I rotate");
        assert_eq!(texts(&toks), ["I", "tap", "Save", ",", "and", "I", "rotate"]);
    }

    #[test]
    fn quoted_span_is_flagged_and_quotes_stripped() {
        let toks = tokenize("I type \"level 5\" in the field");
        assert_eq!(
            texts(&toks),
            ["I", "type", "level", "5", "in", "the", "field"]
        );
        assert!(toks[2].quoted && toks[3].quoted);
        assert!(!toks[0].quoted && !toks[4].quoted);
    }

    #[test]
    fn lower_is_case_folded() {
        let toks = tokenize("CANCEL Button");
        assert_eq!(toks[0].lower, "cancel");
        assert_eq!(toks[1].lower, "button");
    }

    #[test]
    fn empty_input_yields_no_tokens() {
        assert!(tokenize("").is_empty());
        assert!(tokenize("  .  ").is_empty());
    }
}
