//! Lexer and recursive-descent parser.
//!
//! Grammar:
//!
//! ```text
//! assertion := ("empty" | "nonempty") "(" expr ")"
//!            | "disjoint" "(" expr "," expr ")"
//!            | expr ("<=" | "!<=" | "==" | "<") expr
//! expr      := and ("|" and)*
//! and       := diff ("&" diff)*
//! diff      := unary ("\" unary)*
//! unary     := ("K" | "K0".."K9" | "~") unary | atom
//! atom      := "(" expr ")" | "Omega" | "Empty" | "{" [label ("," label)*] "}" | ident
//! ```

use std::ops::Not;

use super::ast::{Assertion, BinaryRel, Expr, Stage, UnaryRel};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Word(String),
    Tilde,
    Backslash,
    Amp,
    Pipe,
    LParen,
    RParen,
    LBrace,
    RBrace,
    Comma,
    Le,
    NotLe,
    EqEq,
    Lt,
    Eof,
}

fn lex(text: &str) -> Result<Vec<(Tok, usize)>> {
    let mut out = Vec::new();
    let mut chars = text.char_indices().peekable();
    while let Some((pos, ch)) = chars.next() {
        let tok = match ch {
            c if c.is_whitespace() => continue,
            '~' | '¬' => Tok::Tilde,
            '\\' => Tok::Backslash,
            '&' | '∩' => Tok::Amp,
            '|' | '∪' => Tok::Pipe,
            '(' => Tok::LParen,
            ')' => Tok::RParen,
            '{' => Tok::LBrace,
            '}' => Tok::RBrace,
            ',' => Tok::Comma,
            '⊆' => Tok::Le,
            '⊂' => Tok::Lt,
            'Ω' => Tok::Word("Omega".into()),
            '∅' => Tok::Word("Empty".into()),
            '<' => {
                if chars.next_if(|&(_, c)| c == '=').is_some() {
                    Tok::Le
                } else {
                    Tok::Lt
                }
            }
            '=' => match chars.next() {
                Some((_, '=')) => Tok::EqEq,
                _ => return Err(Error::LexError(pos)),
            },
            '!' => match (chars.next(), chars.next()) {
                (Some((_, '<')), Some((_, '='))) => Tok::NotLe,
                _ => return Err(Error::LexError(pos)),
            },
            c if is_word_char(c) => {
                let mut word = String::from(c);
                while let Some((_, c)) = chars.next_if(|&(_, c)| is_word_char(c)) {
                    word.push(c);
                }
                Tok::Word(word)
            }
            _ => return Err(Error::LexError(pos)),
        };
        out.push((tok, pos));
    }
    out.push((Tok::Eof, text.len()));
    Ok(out)
}

fn is_word_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_'
}

pub(crate) fn is_identifier(word: &str) -> bool {
    let mut chars = word.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic() || c == '_')
        && chars.all(is_word_char)
}

/// Words with fixed meaning in expressions.
pub fn is_reserved(word: &str) -> bool {
    matches!(word, "Omega" | "Empty") || word.parse::<Stage>().is_ok()
}

struct Parser {
    toks: Vec<(Tok, usize)>,
    at: usize,
}

impl Parser {
    fn new(text: &str) -> Result<Self> {
        Ok(Self {
            toks: lex(text)?,
            at: 0,
        })
    }

    fn peek(&self) -> &Tok {
        &self.toks[self.at].0
    }

    fn peek2(&self) -> &Tok {
        &self.toks[(self.at + 1).min(self.toks.len() - 1)].0
    }

    fn pos(&self) -> usize {
        self.toks[self.at].1
    }

    fn bump(&mut self) -> Tok {
        let tok = self.toks[self.at].0.clone();
        if tok != Tok::Eof {
            self.at += 1;
        }
        tok
    }

    fn error(&self, expected: &[&str]) -> Error {
        Error::ParseError {
            position: self.pos(),
            expected: expected.iter().map(|s| s.to_string()).collect(),
        }
    }

    fn expect(&mut self, tok: Tok, shown: &str) -> Result<()> {
        if *self.peek() == tok {
            self.bump();
            Ok(())
        } else {
            Err(self.error(&[shown]))
        }
    }

    fn finish(&mut self) -> Result<()> {
        if *self.peek() == Tok::Eof {
            Ok(())
        } else {
            Err(self.error(&["end of input", "'|'", "'&'", "'\\'"]))
        }
    }

    fn expr(&mut self) -> Result<Expr> {
        let mut lhs = self.and()?;
        while *self.peek() == Tok::Pipe {
            self.bump();
            lhs = lhs.or(self.and()?);
        }
        Ok(lhs)
    }

    fn and(&mut self) -> Result<Expr> {
        let mut lhs = self.diff()?;
        while *self.peek() == Tok::Amp {
            self.bump();
            lhs = lhs.and(self.diff()?);
        }
        Ok(lhs)
    }

    fn diff(&mut self) -> Result<Expr> {
        let mut lhs = self.unary()?;
        while *self.peek() == Tok::Backslash {
            self.bump();
            lhs = lhs.diff(self.unary()?);
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Expr> {
        match self.peek() {
            Tok::Tilde => {
                self.bump();
                Ok(self.unary()?.not())
            }
            Tok::Word(w) => match w.parse::<Stage>() {
                Ok(stage) => {
                    self.bump();
                    Ok(Expr::Know(stage, Box::new(self.unary()?)))
                }
                Err(_) => self.atom(),
            },
            _ => self.atom(),
        }
    }

    fn atom(&mut self) -> Result<Expr> {
        const EXPECTED: &[&str] = &["'('", "'~'", "'K'", "'Omega'", "'{'", "identifier"];
        match self.peek().clone() {
            Tok::LParen => {
                self.bump();
                let inner = self.expr()?;
                self.expect(Tok::RParen, "')'")?;
                Ok(inner)
            }
            Tok::LBrace => {
                self.bump();
                let mut labels = Vec::new();
                if *self.peek() != Tok::RBrace {
                    loop {
                        match self.bump() {
                            Tok::Word(w) => labels.push(w),
                            _ => {
                                self.at -= 1;
                                return Err(self.error(&["state label"]));
                            }
                        }
                        if *self.peek() == Tok::Comma {
                            self.bump();
                        } else {
                            break;
                        }
                    }
                }
                self.expect(Tok::RBrace, "'}'")?;
                Ok(if labels.is_empty() {
                    Expr::Empty
                } else {
                    Expr::Literal(labels)
                })
            }
            Tok::Word(w) if w == "Omega" => {
                self.bump();
                Ok(Expr::Omega)
            }
            Tok::Word(w) if w == "Empty" => {
                self.bump();
                Ok(Expr::Empty)
            }
            Tok::Word(w) if is_identifier(&w) => {
                self.bump();
                Ok(Expr::Name(w))
            }
            _ => Err(self.error(EXPECTED)),
        }
    }

    fn assertion(&mut self) -> Result<Assertion> {
        if let (Tok::Word(w), Tok::LParen) = (self.peek(), self.peek2()) {
            let unary = match w.as_str() {
                "empty" => Some(UnaryRel::Empty),
                "nonempty" => Some(UnaryRel::Nonempty),
                _ => None,
            };
            if let Some(rel) = unary {
                self.bump();
                self.bump();
                let e = self.expr()?;
                self.expect(Tok::RParen, "')'")?;
                return Ok(Assertion::Unary(rel, e));
            }
            if w == "disjoint" {
                self.bump();
                self.bump();
                let l = self.expr()?;
                self.expect(Tok::Comma, "','")?;
                let r = self.expr()?;
                self.expect(Tok::RParen, "')'")?;
                return Ok(Assertion::Binary(BinaryRel::Disjoint, l, r));
            }
        }
        let lhs = self.expr()?;
        let rel = match self.peek() {
            Tok::Le => BinaryRel::Subseteq,
            Tok::NotLe => BinaryRel::NotSubseteq,
            Tok::EqEq => BinaryRel::Equals,
            Tok::Lt => BinaryRel::ProperSubset,
            _ => return Err(self.error(&["'<='", "'!<='", "'=='", "'<'"])),
        };
        self.bump();
        let rhs = self.expr()?;
        Ok(Assertion::Binary(rel, lhs, rhs))
    }
}

pub fn parse_expr(text: &str) -> Result<Expr> {
    let mut p = Parser::new(text)?;
    let e = p.expr()?;
    p.finish()?;
    Ok(e)
}

pub fn parse_assertion(text: &str) -> Result<Assertion> {
    let mut p = Parser::new(text)?;
    let a = p.assertion()?;
    p.finish()?;
    Ok(a)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn n(s: &str) -> Expr {
        Expr::name(s)
    }

    #[test]
    fn complement_then_difference_then_union() {
        let expected = n("E").know().or(n("F").not().diff(n("E")));
        assert_eq!(parse_expr("K E | ~F \\ E").unwrap(), expected);
        assert_eq!(parse_expr("(K E) | ((~F) \\ E)").unwrap(), expected);
    }

    #[test]
    fn unary_chains_are_right_associative() {
        let expected = Expr::Omega.know().not().know();
        assert_eq!(parse_expr("K ~ K Omega").unwrap(), expected);
        assert_eq!(parse_expr("K~K Omega").unwrap(), expected);
        assert_eq!(parse_expr("K ¬ K Ω").unwrap(), expected);
        assert_eq!(
            parse_expr("K1 ~ K0 Omega").unwrap(),
            Expr::Omega.know_at(0).not().know_at(1)
        );
    }

    #[test]
    fn binary_precedence_and_associativity() {
        assert_eq!(
            parse_expr("A | B & C").unwrap(),
            n("A").or(n("B").and(n("C")))
        );
        assert_eq!(
            parse_expr("A \\ B \\ C").unwrap(),
            n("A").diff(n("B")).diff(n("C"))
        );
        assert_eq!(
            parse_expr("A & B \\ C").unwrap(),
            n("A").and(n("B").diff(n("C")))
        );
    }

    #[test]
    fn literals() {
        assert_eq!(parse_expr("{}").unwrap(), Expr::Empty);
        assert_eq!(parse_expr("Empty").unwrap(), Expr::Empty);
        assert_eq!(
            parse_expr("K {a, b}").unwrap(),
            Expr::Literal(vec!["a".into(), "b".into()]).know()
        );
    }

    #[test]
    fn assertions() {
        assert_eq!(
            parse_assertion("K ~E <= ~ K E").unwrap(),
            Assertion::Binary(
                BinaryRel::Subseteq,
                n("E").not().know(),
                n("E").know().not()
            )
        );
        assert_eq!(
            parse_assertion("~ K E !<= E").unwrap(),
            Assertion::Binary(BinaryRel::NotSubseteq, n("E").know().not(), n("E"))
        );
        assert_eq!(
            parse_assertion("empty(K ~ K Omega)").unwrap(),
            Assertion::Unary(UnaryRel::Empty, Expr::Omega.know().not().know())
        );
        assert_eq!(
            parse_assertion("disjoint(K Omega, ~K Omega)").unwrap(),
            Assertion::Binary(
                BinaryRel::Disjoint,
                Expr::Omega.know(),
                Expr::Omega.know().not()
            )
        );
        assert!(matches!(
            parse_assertion("K Omega < Omega").unwrap(),
            Assertion::Binary(BinaryRel::ProperSubset, ..)
        ));
        // `empty` is an ordinary name outside call position.
        assert_eq!(
            parse_assertion("empty == {}").unwrap(),
            Assertion::Binary(BinaryRel::Equals, n("empty"), Expr::Empty)
        );
    }

    #[test]
    fn errors_carry_positions() {
        assert!(matches!(parse_expr("K E $"), Err(Error::LexError(4))));
        assert!(matches!(parse_expr("A = B"), Err(Error::LexError(2))));
        match parse_expr("K (E | ") {
            Err(Error::ParseError { position, expected }) => {
                assert_eq!(position, 7);
                assert!(expected.contains(&"identifier".to_string()));
            }
            other => panic!("{other:?}"),
        }
        assert!(matches!(
            parse_expr("A B"),
            Err(Error::ParseError { position: 2, .. })
        ));
        assert!(matches!(
            parse_assertion("K E"),
            Err(Error::ParseError { position: 3, .. })
        ));
        assert!(matches!(parse_expr("{a,}"), Err(Error::ParseError { .. })));
        assert!(matches!(
            parse_expr("3x"),
            Err(Error::ParseError { position: 0, .. })
        ));
    }

    #[test]
    fn format_examples() {
        let e = n("E").know().or(n("F").not().diff(n("E")));
        assert_eq!(e.to_string(), "K E | ~F \\ E");
        assert_eq!(Expr::Omega.know().not().know().to_string(), "K ~K Omega");
        assert_eq!(n("A").and(n("B").or(n("C"))).to_string(), "A & (B | C)");
        assert_eq!(n("A").or(n("B")).know().not().to_string(), "~K (A | B)");
        assert_eq!(
            Expr::Omega.know_at(0).not().know_at(1).to_string(),
            "K1 ~K0 Omega"
        );
    }

    #[test]
    fn assertion_display_round_trips() {
        for text in [
            "K ~E <= ~K E",
            "~K E !<= E",
            "empty(K ~K Omega)",
            "nonempty(K1 ~K0 Omega)",
            "disjoint(K Omega, ~K Omega)",
            "K Omega == Omega",
            "K E < E",
        ] {
            let a = parse_assertion(text).unwrap();
            assert_eq!(a.to_string(), text);
            assert_eq!(parse_assertion(&a.to_string()).unwrap(), a);
        }
    }
}
