//! Tokenizer shared by the formula and marking-condition grammars.

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("column {column}: {message}")]
pub struct SyntaxError {
    /// 1-based character column.
    pub column: usize,
    pub message: String,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) enum Tok {
    Ident(String),
    Not,
    And,
    Or,
    Implies,
    Until,
    Release,
    Eventually,
    Globally,
    True,
    False,
    LParen,
    RParen,
}

impl Tok {
    pub(crate) fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("`{s}`"),
            Tok::Not => "`!`".into(),
            Tok::And => "`&`".into(),
            Tok::Or => "`|`".into(),
            Tok::Implies => "`->`".into(),
            Tok::Until => "`U`".into(),
            Tok::Release => "`R`".into(),
            Tok::Eventually => "`F`".into(),
            Tok::Globally => "`G`".into(),
            Tok::True => "`true`".into(),
            Tok::False => "`false`".into(),
            Tok::LParen => "`(`".into(),
            Tok::RParen => "`)`".into(),
        }
    }
}

pub(crate) fn lex(text: &str) -> Result<Vec<(usize, Tok)>, SyntaxError> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let col = i + 1;
        if c.is_whitespace() {
            i += 1;
            continue;
        }
        let two: String = chars[i..(i + 2).min(chars.len())].iter().collect();
        let (tok, width) = match (c, two.as_str()) {
            (_, "->") => (Tok::Implies, 2),
            (_, "<>") => (Tok::Eventually, 2),
            (_, "[]") => (Tok::Globally, 2),
            (_, "&&") => (Tok::And, 2),
            (_, "||") => (Tok::Or, 2),
            ('!', _) | ('~', _) => (Tok::Not, 1),
            ('&', _) => (Tok::And, 1),
            ('|', _) => (Tok::Or, 1),
            ('(', _) => (Tok::LParen, 1),
            (')', _) => (Tok::RParen, 1),
            (c, _) if c.is_ascii_alphabetic() || c == '_' => {
                let mut j = i;
                while j < chars.len()
                    && (chars[j].is_ascii_alphanumeric() || chars[j] == '_' || chars[j] == '.')
                {
                    j += 1;
                }
                let word: String = chars[i..j].iter().collect();
                let tok = match word.as_str() {
                    "U" => Tok::Until,
                    "R" => Tok::Release,
                    "F" => Tok::Eventually,
                    "G" => Tok::Globally,
                    "true" => Tok::True,
                    "false" => Tok::False,
                    _ => Tok::Ident(word),
                };
                (tok, j - i)
            }
            (c, _) => {
                return Err(SyntaxError {
                    column: col,
                    message: format!("unexpected character `{c}`"),
                })
            }
        };
        out.push((col, tok));
        i += width;
    }
    Ok(out)
}

/// Cursor over a token stream with the end-of-input column.
pub(crate) struct Cursor {
    toks: Vec<(usize, Tok)>,
    pos: usize,
    end_col: usize,
}

impl Cursor {
    pub(crate) fn new(text: &str) -> Result<Self, SyntaxError> {
        Ok(Cursor {
            toks: lex(text)?,
            pos: 0,
            end_col: text.chars().count() + 1,
        })
    }

    pub(crate) fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(_, t)| t)
    }

    pub(crate) fn next(&mut self) -> Option<(usize, Tok)> {
        let t = self.toks.get(self.pos).cloned();
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    pub(crate) fn column(&self) -> usize {
        self.toks.get(self.pos).map_or(self.end_col, |(c, _)| *c)
    }

    pub(crate) fn error(&self, message: impl Into<String>) -> SyntaxError {
        SyntaxError {
            column: self.column(),
            message: message.into(),
        }
    }

    pub(crate) fn expect(&mut self, tok: Tok) -> Result<(), SyntaxError> {
        match self.peek() {
            Some(t) if *t == tok => {
                self.pos += 1;
                Ok(())
            }
            Some(t) => Err(self.error(format!("expected {}, found {}", tok.describe(), t.describe()))),
            None => Err(self.error(format!("expected {}, found end of input", tok.describe()))),
        }
    }

    pub(crate) fn finish(&self) -> Result<(), SyntaxError> {
        match self.peek() {
            None => Ok(()),
            Some(t) => Err(self.error(format!("unexpected {}", t.describe()))),
        }
    }
}
