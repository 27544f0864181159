//! Concrete syntax for depth-one formulas.
//!
//! ```text
//! iff     := implies ("<->" implies)*
//! implies := or ("->" implies)?
//! or      := and ("|" and)*
//! and     := unary ("&" unary)*
//! unary   := "~" unary | "B" atom | atom
//! atom    := ident | "true" | "false" | "(" iff ")"
//! ident   := [a-z][A-Za-z0-9_]*
//! ```

use crate::error::{Error, Result};
use crate::formula::Formula;
use crate::vocabulary::Vocabulary;

#[derive(Clone, Debug, PartialEq)]
enum Token {
    Ident(String),
    True,
    False,
    Tilde,
    Belief,
    Amp,
    Bar,
    Arrow,
    DoubleArrow,
    LParen,
    RParen,
    End,
}

fn describe(t: &Token) -> String {
    match t {
        Token::Ident(s) => format!("`{s}`"),
        Token::True => "`true`".into(),
        Token::False => "`false`".into(),
        Token::Tilde => "`~`".into(),
        Token::Belief => "`B`".into(),
        Token::Amp => "`&`".into(),
        Token::Bar => "`|`".into(),
        Token::Arrow => "`->`".into(),
        Token::DoubleArrow => "`<->`".into(),
        Token::LParen => "`(`".into(),
        Token::RParen => "`)`".into(),
        Token::End => "end of input".into(),
    }
}

fn lex(text: &str) -> Result<Vec<(usize, Token)>> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        let start = i;
        let tok = match c {
            b' ' | b'\t' | b'\n' | b'\r' => {
                i += 1;
                continue;
            }
            b'~' => Token::Tilde,
            b'&' => Token::Amp,
            b'|' => Token::Bar,
            b'(' => Token::LParen,
            b')' => Token::RParen,
            b'B' => Token::Belief,
            b'-' if bytes.get(i + 1) == Some(&b'>') => {
                i += 1;
                Token::Arrow
            }
            b'<' if bytes.get(i + 1) == Some(&b'-') && bytes.get(i + 2) == Some(&b'>') => {
                i += 2;
                Token::DoubleArrow
            }
            b'a'..=b'z' => {
                let mut j = i + 1;
                while j < bytes.len() && (bytes[j].is_ascii_alphanumeric() || bytes[j] == b'_') {
                    j += 1;
                }
                let word = &text[i..j];
                i = j - 1;
                match word {
                    "true" => Token::True,
                    "false" => Token::False,
                    _ => Token::Ident(word.to_string()),
                }
            }
            _ => {
                let ch = text[i..].chars().next().unwrap_or('?');
                return Err(Error::Syntax {
                    position: i,
                    message: format!("unexpected character `{ch}`"),
                });
            }
        };
        out.push((start, tok));
        i += 1;
    }
    out.push((text.len(), Token::End));
    Ok(out)
}

struct Parser {
    tokens: Vec<(usize, Token)>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> &Token {
        &self.tokens[self.pos].1
    }

    fn offset(&self) -> usize {
        self.tokens[self.pos].0
    }

    fn bump(&mut self) -> Token {
        let t = self.tokens[self.pos].1.clone();
        if t != Token::End {
            self.pos += 1;
        }
        t
    }

    fn error<T>(&self, message: String) -> Result<T> {
        Err(Error::Syntax {
            position: self.offset(),
            message,
        })
    }

    fn iff(&mut self) -> Result<Formula> {
        let mut lhs = self.implies()?;
        while *self.peek() == Token::DoubleArrow {
            self.bump();
            lhs = Formula::iff(lhs, self.implies()?);
        }
        Ok(lhs)
    }

    fn implies(&mut self) -> Result<Formula> {
        let lhs = self.or()?;
        if *self.peek() == Token::Arrow {
            self.bump();
            return Ok(Formula::implies(lhs, self.implies()?));
        }
        Ok(lhs)
    }

    fn or(&mut self) -> Result<Formula> {
        let mut lhs = self.and()?;
        while *self.peek() == Token::Bar {
            self.bump();
            lhs = lhs | self.and()?;
        }
        Ok(lhs)
    }

    fn and(&mut self) -> Result<Formula> {
        let mut lhs = self.unary()?;
        while *self.peek() == Token::Amp {
            self.bump();
            lhs = lhs & self.unary()?;
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Formula> {
        match self.peek() {
            Token::Tilde => {
                self.bump();
                Ok(!self.unary()?)
            }
            Token::Belief => {
                self.bump();
                match self.peek() {
                    Token::Ident(_) | Token::True | Token::False | Token::LParen => {
                        Ok(Formula::belief(self.atom()?))
                    }
                    other => self.error(format!(
                        "`B` must be followed by a proposition, a constant or a parenthesized formula, found {}",
                        describe(other)
                    )),
                }
            }
            _ => self.atom(),
        }
    }

    fn atom(&mut self) -> Result<Formula> {
        match self.peek().clone() {
            Token::Ident(name) => {
                self.bump();
                Ok(Formula::Prop(name))
            }
            Token::True => {
                self.bump();
                Ok(Formula::True)
            }
            Token::False => {
                self.bump();
                Ok(Formula::False)
            }
            Token::LParen => {
                self.bump();
                let inner = self.iff()?;
                if *self.peek() != Token::RParen {
                    return self.error(format!("expected `)`, found {}", describe(self.peek())));
                }
                self.bump();
                Ok(inner)
            }
            other => self.error(format!("expected a formula, found {}", describe(&other))),
        }
    }
}

/// Parses without checking names or modal depth.
pub(crate) fn parse_unchecked(text: &str) -> Result<Formula> {
    let mut parser = Parser {
        tokens: lex(text)?,
        pos: 0,
    };
    let f = parser.iff()?;
    if *parser.peek() != Token::End {
        return parser.error(format!("unexpected {}", describe(parser.peek())));
    }
    Ok(f)
}

/// Parses a depth-one formula whose propositions all belong to `vocab`.
pub fn parse(text: &str, vocab: &Vocabulary) -> Result<Formula> {
    let f = parse_unchecked(text)?;
    f.check_vocabulary(vocab)?;
    f.validate_depth_one()?;
    Ok(f)
}

/// Parses a depth-one formula without a vocabulary; callers collect the
/// propositions with [`Formula::props`].
pub fn parse_free(text: &str) -> Result<Formula> {
    let f = parse_unchecked(text)?;
    f.validate_depth_one()?;
    Ok(f)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn vocab() -> Vocabulary {
        Vocabulary::new(["p", "q", "r"]).unwrap()
    }

    fn p() -> Formula {
        Formula::prop("p")
    }

    fn q() -> Formula {
        Formula::prop("q")
    }

    #[test]
    fn reads_belief_and_implication() {
        let f = parse("B(p -> q) & ~Bp", &vocab()).unwrap();
        assert_eq!(
            f,
            Formula::belief(Formula::implies(p(), q())) & !Formula::belief(p())
        );
    }

    #[test]
    fn constants() {
        assert_eq!(parse("true", &vocab()).unwrap(), Formula::True);
        assert_eq!(
            parse("B false", &vocab()).unwrap(),
            Formula::belief(Formula::False)
        );
    }

    #[test]
    fn rejects_nested_belief() {
        assert!(matches!(
            parse("B(Bp)", &vocab()),
            Err(Error::NestedBelief { .. })
        ));
    }

    #[test]
    fn rejects_unknown_and_malformed() {
        assert_eq!(
            parse("p & s", &vocab()),
            Err(Error::UnknownProposition("s".into()))
        );
        assert!(matches!(
            parse("p &", &vocab()),
            Err(Error::Syntax { position: 3, .. })
        ));
        assert!(matches!(
            parse("B~p", &vocab()),
            Err(Error::Syntax { position: 1, .. })
        ));
        assert!(matches!(parse("(p", &vocab()), Err(Error::Syntax { .. })));
        assert!(matches!(
            parse("p $ q", &vocab()),
            Err(Error::Syntax { position: 2, .. })
        ));
    }

    #[test]
    fn precedence_and_associativity() {
        let v = vocab();
        assert_eq!(
            parse("p | q & r", &v).unwrap(),
            p() | (q() & Formula::prop("r"))
        );
        assert_eq!(
            parse("p -> q -> r", &v).unwrap(),
            Formula::implies(p(), Formula::implies(q(), Formula::prop("r")))
        );
        assert_eq!(
            parse("p <-> q -> r", &v).unwrap(),
            Formula::iff(p(), Formula::implies(q(), Formula::prop("r")))
        );
        assert_eq!(parse("~Bp", &v).unwrap(), !Formula::belief(p()));
        assert_eq!(parse("Bp & q", &v).unwrap(), Formula::belief(p()) & q());
    }
}
