use std::sync::Arc;

use super::{Atom, Expr};
use crate::error::ParseError;

#[derive(Clone, Debug, PartialEq)]
enum Token {
    Atom(String),
    Arrow,
    Amp,
    LParen,
    RParen,
    End,
}

impl Token {
    fn describe(&self) -> String {
        match self {
            Token::Atom(name) => format!("atom `{name}`"),
            Token::Arrow => "`->`".into(),
            Token::Amp => "`&`".into(),
            Token::LParen => "`(`".into(),
            Token::RParen => "`)`".into(),
            Token::End => "end of input".into(),
        }
    }
}

const EXPECT_PRIM: &[&str] = &["atom", "`(`"];

/// Parses the ASCII grammar:
///
/// ```text
/// expr  := arrow
/// arrow := meet ("->" arrow)?
/// meet  := prim ("&" prim)*
/// prim  := ATOM | "(" expr ")"
/// ATOM  := "@" | [a-z][a-zA-Z0-9_]*
/// ```
///
/// `&` binds tighter than `->`, `->` associates to the right and `&` to
/// the left.
pub fn parse(text: &str) -> Result<Expr, ParseError> {
    let mut parser = Parser {
        text,
        offset: 0,
        token: Token::End,
        token_offset: 0,
    };
    parser.advance()?;
    let expr = parser.arrow()?;
    if parser.token != Token::End {
        return Err(parser.unexpected(&["`->`", "`&`", "end of input"]));
    }
    Ok(expr)
}

struct Parser<'a> {
    text: &'a str,
    offset: usize,
    token: Token,
    token_offset: usize,
}

impl Parser<'_> {
    fn advance(&mut self) -> Result<(), ParseError> {
        let bytes = self.text.as_bytes();
        while self.offset < bytes.len() && bytes[self.offset].is_ascii_whitespace() {
            self.offset += 1;
        }
        self.token_offset = self.offset;
        let Some(&b) = bytes.get(self.offset) else {
            self.token = Token::End;
            return Ok(());
        };
        self.token = match b {
            b'(' => {
                self.offset += 1;
                Token::LParen
            }
            b')' => {
                self.offset += 1;
                Token::RParen
            }
            b'&' => {
                self.offset += 1;
                Token::Amp
            }
            b'@' => {
                self.offset += 1;
                Token::Atom("@".into())
            }
            b'-' if bytes.get(self.offset + 1) == Some(&b'>') => {
                self.offset += 2;
                Token::Arrow
            }
            b'a'..=b'z' => {
                let start = self.offset;
                while self.offset < bytes.len()
                    && (bytes[self.offset].is_ascii_alphanumeric() || bytes[self.offset] == b'_')
                {
                    self.offset += 1;
                }
                Token::Atom(self.text[start..self.offset].to_string())
            }
            _ => {
                let found = self.text[self.offset..]
                    .chars()
                    .next()
                    .map(|c| format!("`{c}`"))
                    .unwrap_or_default();
                return Err(ParseError {
                    offset: self.offset,
                    expected: ["atom", "`(`", "`)`", "`->`", "`&`"]
                        .iter()
                        .map(|s| s.to_string())
                        .collect(),
                    found,
                });
            }
        };
        Ok(())
    }

    fn unexpected(&self, expected: &[&str]) -> ParseError {
        ParseError {
            offset: self.token_offset,
            expected: expected.iter().map(|s| s.to_string()).collect(),
            found: self.token.describe(),
        }
    }

    fn arrow(&mut self) -> Result<Expr, ParseError> {
        let source = self.meet()?;
        if self.token == Token::Arrow {
            self.advance()?;
            let target = self.arrow()?;
            return Ok(Expr::Arrow(Arc::new(source), Arc::new(target)));
        }
        Ok(source)
    }

    fn meet(&mut self) -> Result<Expr, ParseError> {
        let mut left = self.prim()?;
        while self.token == Token::Amp {
            self.advance()?;
            let right = self.prim()?;
            left = Expr::Meet(Arc::new(left), Arc::new(right));
        }
        Ok(left)
    }

    fn prim(&mut self) -> Result<Expr, ParseError> {
        match &self.token {
            Token::Atom(name) => {
                let atom = Atom::new(name).map_err(|_| self.unexpected(EXPECT_PRIM))?;
                self.advance()?;
                Ok(Expr::Atom(atom))
            }
            Token::LParen => {
                self.advance()?;
                let inner = self.arrow()?;
                if self.token != Token::RParen {
                    return Err(self.unexpected(&["`)`", "`->`", "`&`"]));
                }
                self.advance()?;
                Ok(inner)
            }
            _ => Err(self.unexpected(EXPECT_PRIM)),
        }
    }
}
