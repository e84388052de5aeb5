//! Text syntax for words and presentations.
//!
//! Words are whitespace-separated tokens. A token is a generator name, an
//! uppercased name (inverse), or `name^k` for an integer power; `a1 B1 a1^-1`
//! and `x y^-2` are words. The token `h` is reserved for the fiber letter in
//! mixed words. Presentations are JSON documents, see the README.

use thiserror::Error;

use crate::seifert::{MixedLetter, SeifertDescriptor, SeifertPresentation};
use crate::words::{Alphabet, Letter, Word, FIBER_NAME};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("parse error at {line}:{column}: {message} (token {token:?})")]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub token: String,
    pub message: String,
}

struct Token<'a> {
    text: &'a str,
    line: usize,
    column: usize,
}

fn tokenize(text: &str) -> Vec<Token<'_>> {
    let mut out = Vec::new();
    for (ln, line) in text.lines().enumerate() {
        let mut col = 0;
        for piece in line.split_whitespace() {
            // column of this piece within the line, 1-based
            let at = line[col..].find(piece).map(|o| col + o).unwrap_or(col);
            out.push(Token { text: piece, line: ln + 1, column: at + 1 });
            col = at + piece.len();
        }
    }
    out
}

/// One parsed token: a generator (or `h`) with a literal exponent.
struct Factor {
    name: String,
    exponent: i64,
}

fn parse_token(tok: &Token<'_>) -> Result<Factor, ParseError> {
    let err = |message: &str| ParseError {
        line: tok.line,
        column: tok.column,
        token: tok.text.to_string(),
        message: message.to_string(),
    };
    let (head, exp) = match tok.text.split_once('^') {
        None => (tok.text, 1i64),
        Some((head, e)) => {
            let exp: i64 = e.parse().map_err(|_| err("exponent must be an integer"))?;
            (head, exp)
        }
    };
    if head.is_empty() {
        return Err(err("missing generator name"));
    }
    // an all-uppercase name denotes the inverse
    let inverted = head.chars().all(|c| !c.is_ascii_lowercase());
    let name = head.to_ascii_lowercase();
    Ok(Factor { name, exponent: if inverted { -exp } else { exp } })
}

/// Parses a word over the base alphabet; the fiber letter is rejected.
pub fn parse_word(alphabet: &Alphabet, text: &str) -> Result<Word, ParseError> {
    let mut letters = Vec::new();
    for tok in tokenize(text) {
        if tok.text == "1" {
            continue; // identity
        }
        let f = parse_token(&tok)?;
        let err = |message: String| ParseError {
            line: tok.line,
            column: tok.column,
            token: tok.text.to_string(),
            message,
        };
        if f.name == FIBER_NAME {
            return Err(err("the fiber letter is not part of the base alphabet".into()));
        }
        let index = alphabet
            .index_of(&f.name)
            .ok_or_else(|| err(format!("unknown generator {:?}", f.name)))?;
        for _ in 0..f.exponent.unsigned_abs() {
            letters.push(Letter::new(index, f.exponent < 0));
        }
    }
    Ok(Word::from_letters(letters))
}

/// Parses a mixed word over the base alphabet plus the reserved `h`.
pub fn parse_mixed(alphabet: &Alphabet, text: &str) -> Result<Vec<MixedLetter>, ParseError> {
    let mut out = Vec::new();
    for tok in tokenize(text) {
        if tok.text == "1" {
            continue;
        }
        let f = parse_token(&tok)?;
        if f.name == FIBER_NAME {
            for _ in 0..f.exponent.unsigned_abs() {
                out.push(MixedLetter::Fiber { inverted: f.exponent < 0 });
            }
            continue;
        }
        let index = alphabet.index_of(&f.name).ok_or_else(|| ParseError {
            line: tok.line,
            column: tok.column,
            token: tok.text.to_string(),
            message: format!("unknown generator {:?}", f.name),
        })?;
        for _ in 0..f.exponent.unsigned_abs() {
            out.push(MixedLetter::Base(Letter::new(index, f.exponent < 0)));
        }
    }
    Ok(out)
}

/// Parses a presentation descriptor from JSON.
pub fn parse_presentation(json: &str) -> Result<SeifertPresentation, String> {
    let descriptor: SeifertDescriptor =
        serde_json::from_str(json).map_err(|e| format!("invalid presentation JSON: {e}"))?;
    SeifertPresentation::from_descriptor(&descriptor).map_err(|e| e.to_string())
}
