//! Text form of group words.
//!
//! Grammar, whitespace insignificant:
//!
//! ```text
//! word   := factor (('*')? factor)*
//! factor := atom ('^' int)?
//! atom   := ident | '(' word ')' | '[' word ',' word ']'
//! ```
//!
//! `[u,v]` is the commutator u v u^-1 v^-1. Idents are generator names from
//! the table handed to the parser; integers may be negative. Exponents on
//! compound factors are expanded by repetition and are capped to keep a
//! typo from materializing a gigantic word.

use fixlocus_core::Word;
use std::fmt;

/// Exponent magnitude allowed on a parenthesized or bracketed factor.
/// Single-generator factors carry their exponent symbolically and have no
/// cap.
const COMPOUND_EXPONENT_CAP: i64 = 10_000;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum WordParseError {
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    UnknownGenerator {
        line: usize,
        column: usize,
        name: String,
    },
}

impl fmt::Display for WordParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            WordParseError::Syntax {
                line,
                column,
                message,
            } => {
                write!(f, "line {line}, column {column}: {message}")
            }
            WordParseError::UnknownGenerator { line, column, name } => {
                write!(
                    f,
                    "line {line}, column {column}: unknown generator `{name}`"
                )
            }
        }
    }
}

impl std::error::Error for WordParseError {}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Token {
    Ident(String),
    Int(i64),
    Star,
    Caret,
    LParen,
    RParen,
    LBracket,
    RBracket,
    Comma,
}

#[derive(Clone, Debug)]
struct Positioned {
    token: Token,
    line: usize,
    column: usize,
}

fn lex(text: &str) -> Result<Vec<Positioned>, WordParseError> {
    let mut out = Vec::new();
    let mut line = 1usize;
    let mut column = 1usize;
    let mut chars = text.chars().peekable();
    while let Some(&c) = chars.peek() {
        let (tline, tcol) = (line, column);
        let advance = |chars: &mut std::iter::Peekable<std::str::Chars>,
                       line: &mut usize,
                       column: &mut usize| {
            let c = chars.next().unwrap();
            if c == '\n' {
                *line += 1;
                *column = 1;
            } else {
                *column += 1;
            }
            c
        };
        if c.is_whitespace() {
            advance(&mut chars, &mut line, &mut column);
            continue;
        }
        let token = match c {
            '*' => {
                advance(&mut chars, &mut line, &mut column);
                Token::Star
            }
            '^' => {
                advance(&mut chars, &mut line, &mut column);
                Token::Caret
            }
            '(' => {
                advance(&mut chars, &mut line, &mut column);
                Token::LParen
            }
            ')' => {
                advance(&mut chars, &mut line, &mut column);
                Token::RParen
            }
            '[' => {
                advance(&mut chars, &mut line, &mut column);
                Token::LBracket
            }
            ']' => {
                advance(&mut chars, &mut line, &mut column);
                Token::RBracket
            }
            ',' => {
                advance(&mut chars, &mut line, &mut column);
                Token::Comma
            }
            '-' | '0'..='9' => {
                let mut s = String::new();
                s.push(advance(&mut chars, &mut line, &mut column));
                while let Some(&d) = chars.peek() {
                    if d.is_ascii_digit() {
                        s.push(advance(&mut chars, &mut line, &mut column));
                    } else {
                        break;
                    }
                }
                let value = s.parse::<i64>().map_err(|_| WordParseError::Syntax {
                    line: tline,
                    column: tcol,
                    message: format!("malformed integer `{s}`"),
                })?;
                Token::Int(value)
            }
            c if c.is_alphabetic() || c == '_' => {
                let mut s = String::new();
                s.push(advance(&mut chars, &mut line, &mut column));
                while let Some(&d) = chars.peek() {
                    if d.is_alphanumeric() || d == '_' {
                        s.push(advance(&mut chars, &mut line, &mut column));
                    } else {
                        break;
                    }
                }
                Token::Ident(s)
            }
            other => {
                return Err(WordParseError::Syntax {
                    line: tline,
                    column: tcol,
                    message: format!("unexpected character `{other}`"),
                })
            }
        };
        out.push(Positioned {
            token,
            line: tline,
            column: tcol,
        });
    }
    Ok(out)
}

struct Parser<'a> {
    tokens: Vec<Positioned>,
    pos: usize,
    names: &'a [String],
    end_line: usize,
    end_column: usize,
}

impl<'a> Parser<'a> {
    fn peek(&self) -> Option<&Positioned> {
        self.tokens.get(self.pos)
    }

    fn next(&mut self) -> Option<Positioned> {
        let t = self.tokens.get(self.pos).cloned();
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    fn here(&self) -> (usize, usize) {
        self.peek()
            .map(|t| (t.line, t.column))
            .unwrap_or((self.end_line, self.end_column))
    }

    fn syntax(&self, message: impl Into<String>) -> WordParseError {
        let (line, column) = self.here();
        WordParseError::Syntax {
            line,
            column,
            message: message.into(),
        }
    }

    fn word(&mut self) -> Result<Word, WordParseError> {
        let mut acc = self.factor()?;
        loop {
            match self.peek().map(|t| &t.token) {
                Some(Token::Star) => {
                    self.next();
                    let f = self.factor()?;
                    acc = acc.concat(&f);
                }
                Some(Token::Ident(_)) | Some(Token::LParen) | Some(Token::LBracket) => {
                    let f = self.factor()?;
                    acc = acc.concat(&f);
                }
                _ => break,
            }
        }
        Ok(acc)
    }

    fn factor(&mut self) -> Result<Word, WordParseError> {
        let atom = self.atom()?;
        if let Some(Token::Caret) = self.peek().map(|t| &t.token) {
            self.next();
            let (line, column) = self.here();
            match self.next().map(|t| t.token) {
                Some(Token::Int(e)) => word_power(&atom.word, e, atom.single).map_err(|message| {
                    WordParseError::Syntax {
                        line,
                        column,
                        message,
                    }
                }),
                _ => Err(WordParseError::Syntax {
                    line,
                    column,
                    message: "expected an integer exponent after `^`".to_string(),
                }),
            }
        } else {
            Ok(atom.word)
        }
    }

    fn atom(&mut self) -> Result<Atom, WordParseError> {
        let (line, column) = self.here();
        match self.next().map(|t| t.token) {
            Some(Token::Ident(name)) => {
                let index = self
                    .names
                    .iter()
                    .position(|n| *n == name)
                    .ok_or(WordParseError::UnknownGenerator { line, column, name })?;
                Ok(Atom {
                    word: Word::generator_power(index, 1),
                    single: Some(index),
                })
            }
            Some(Token::LParen) => {
                let inner = self.word()?;
                match self.next().map(|t| t.token) {
                    Some(Token::RParen) => Ok(Atom {
                        word: inner,
                        single: None,
                    }),
                    _ => Err(self.syntax("expected `)`")),
                }
            }
            Some(Token::LBracket) => {
                let u = self.word()?;
                match self.next().map(|t| t.token) {
                    Some(Token::Comma) => {}
                    _ => return Err(self.syntax("expected `,` inside commutator")),
                }
                let v = self.word()?;
                match self.next().map(|t| t.token) {
                    Some(Token::RBracket) => Ok(Atom {
                        word: u.concat(&v).concat(&u.inverse()).concat(&v.inverse()),
                        single: None,
                    }),
                    _ => Err(self.syntax("expected `]`")),
                }
            }
            _ => Err(WordParseError::Syntax {
                line,
                column,
                message: "expected a generator name, `(`, or `[`".to_string(),
            }),
        }
    }
}

struct Atom {
    word: Word,
    /// Set when the atom is a bare generator: its exponent stays symbolic.
    single: Option<usize>,
}

fn word_power(word: &Word, exponent: i64, single: Option<usize>) -> Result<Word, String> {
    if let Some(index) = single {
        return Ok(Word::generator_power(index, exponent));
    }
    if exponent.unsigned_abs() > COMPOUND_EXPONENT_CAP as u64 {
        return Err(format!(
            "exponent {exponent} on a compound factor exceeds the cap {COMPOUND_EXPONENT_CAP}"
        ));
    }
    let base = if exponent < 0 {
        word.inverse()
    } else {
        word.clone()
    };
    let mut acc = Word::identity();
    for _ in 0..exponent.unsigned_abs() {
        acc = acc.concat(&base);
    }
    Ok(acc)
}

/// Parses one word over the given generator-name table. The whole input
/// must be consumed.
pub fn parse_word(text: &str, names: &[String]) -> Result<Word, WordParseError> {
    let tokens = lex(text)?;
    let lines = text.lines().count().max(1);
    let last_len = text.lines().last().map(|l| l.len()).unwrap_or(0);
    let mut parser = Parser {
        tokens,
        pos: 0,
        names,
        end_line: lines,
        end_column: last_len + 1,
    };
    if parser.peek().is_none() {
        return Err(parser.syntax("empty word"));
    }
    let word = parser.word()?;
    if parser.peek().is_some() {
        return Err(parser.syntax("trailing input after word"));
    }
    Ok(word)
}

/// Canonical text: factors `name` or `name^e` joined by `*`. The identity
/// word renders as `name^0` on the first generator; it cannot be rendered
/// without one.
pub fn render_word(word: &Word, names: &[String]) -> String {
    if word.is_identity() {
        let first = names
            .first()
            .expect("cannot render the identity word without generators");
        return format!("{first}^0");
    }
    word.letters()
        .iter()
        .map(|&(g, e)| {
            if e == 1 {
                names[g].clone()
            } else {
                format!("{}^{}", names[g], e)
            }
        })
        .collect::<Vec<_>>()
        .join("*")
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn names() -> Vec<String> {
        vec!["x1".into(), "x2".into(), "a1".into(), "b1".into()]
    }

    #[test]
    fn single_power() {
        let w = parse_word("x1^3", &names()).unwrap();
        assert_eq!(w, Word::new([(0, 3)]));
    }

    #[test]
    fn juxtaposition_equals_star() {
        let n = names();
        assert_eq!(
            parse_word("x1 x2", &n).unwrap(),
            parse_word("x1*x2", &n).unwrap()
        );
    }

    #[test]
    fn compound_power_expands() {
        let w = parse_word("(x1*x2^-1)^2", &names()).unwrap();
        assert_eq!(w, Word::new([(0, 1), (1, -1), (0, 1), (1, -1)]));
    }

    #[test]
    fn commutator_expands() {
        let w = parse_word("[a1,b1]", &names()).unwrap();
        assert_eq!(w, Word::new([(2, 1), (3, 1), (2, -1), (3, -1)]));
    }

    #[test]
    fn negative_compound_power() {
        let w = parse_word("(x1*x2)^-1", &names()).unwrap();
        assert_eq!(w, Word::new([(1, -1), (0, -1)]));
    }

    #[test]
    fn nested_grouping() {
        let w = parse_word("((x1)^2*x2)^2", &names()).unwrap();
        assert_eq!(w, Word::new([(0, 2), (1, 1), (0, 2), (1, 1)]));
    }

    #[test]
    fn unknown_generator_is_positioned() {
        match parse_word("x1*zz", &names()) {
            Err(WordParseError::UnknownGenerator {
                line: 1,
                column: 4,
                name,
            }) => {
                assert_eq!(name, "zz");
            }
            other => panic!("unexpected: {other:?}"),
        }
    }

    #[test]
    fn syntax_errors_are_positioned() {
        match parse_word("x1^", &names()) {
            Err(WordParseError::Syntax {
                line: 1, column: 4, ..
            }) => {}
            other => panic!("unexpected: {other:?}"),
        }
        match parse_word("(x1", &names()) {
            Err(WordParseError::Syntax { .. }) => {}
            other => panic!("unexpected: {other:?}"),
        }
        match parse_word("", &names()) {
            Err(WordParseError::Syntax { message, .. }) => assert_eq!(message, "empty word"),
            other => panic!("unexpected: {other:?}"),
        }
    }

    #[test]
    fn exponent_cap_applies_to_compound_factors_only() {
        assert!(parse_word("x1^100000", &names()).is_ok());
        assert!(parse_word("(x1*x2)^100000", &names()).is_err());
    }

    #[test]
    fn identity_renders_as_zeroth_power() {
        let n = names();
        let id = Word::identity();
        let text = render_word(&id, &n);
        assert_eq!(parse_word(&text, &n).unwrap(), id);
    }

    fn word_strategy() -> impl Strategy<Value = Word> {
        proptest::collection::vec((0usize..4, -5i64..6), 0..12).prop_map(Word::new)
    }

    proptest! {
        #[test]
        fn render_parse_round_trip(w in word_strategy()) {
            let n = names();
            let text = render_word(&w, &n);
            prop_assert_eq!(parse_word(&text, &n).unwrap(), w);
        }
    }
}
