use std::fmt;

use thiserror::Error;

use super::signature::valid_identifier;
use super::Formula;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ParseErrorKind {
    UnexpectedChar(char),
    UnknownEscape,
    UnexpectedToken {
        found: String,
        expected: &'static str,
    },
    UnexpectedEnd {
        expected: &'static str,
    },
    UnclosedParen,
    UnmatchedParen,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{line}:{column}: {kind}")]
pub struct ParseError {
    pub kind: ParseErrorKind,
    pub offset: usize,
    pub line: usize,
    pub column: usize,
}

impl fmt::Display for ParseErrorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ParseErrorKind::UnexpectedChar(c) => write!(f, "unexpected character {c:?}"),
            ParseErrorKind::UnknownEscape => write!(f, "unknown escape"),
            ParseErrorKind::UnexpectedToken { found, expected } => {
                write!(f, "expected {expected}, found {found}")
            }
            ParseErrorKind::UnexpectedEnd { expected } => {
                write!(f, "expected {expected}, found end of input")
            }
            ParseErrorKind::UnclosedParen => write!(f, "unclosed parenthesis"),
            ParseErrorKind::UnmatchedParen => write!(f, "unmatched closing parenthesis"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Ident(String),
    True,
    False,
    Pi,
    Not,
    DiaB,
    DiaE,
    DiaG,
    BoxB,
    BoxE,
    BoxG,
    And,
    Or,
    Implies,
    Iff,
    LParen,
    RParen,
    End,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Tok::Ident(s) => return write!(f, "identifier {s:?}"),
            Tok::True => "`true`",
            Tok::False => "`false`",
            Tok::Pi => "`pi`",
            Tok::Not => "`~`",
            Tok::DiaB => "`<B>`",
            Tok::DiaE => "`<E>`",
            Tok::DiaG => "`<G>`",
            Tok::BoxB => "`[B]`",
            Tok::BoxE => "`[E]`",
            Tok::BoxG => "`[G]`",
            Tok::And => "`&`",
            Tok::Or => "`|`",
            Tok::Implies => "`->`",
            Tok::Iff => "`<->`",
            Tok::LParen => "`(`",
            Tok::RParen => "`)`",
            Tok::End => "end of input",
        };
        f.write_str(s)
    }
}

fn lex(src: &str) -> Result<Vec<(Tok, usize)>, (ParseErrorKind, usize)> {
    let bytes = src.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    let fixed: &[(&str, Tok)] = &[
        ("<->", Tok::Iff),
        ("<B>", Tok::DiaB),
        ("<E>", Tok::DiaE),
        ("<G>", Tok::DiaG),
        ("[B]", Tok::BoxB),
        ("[E]", Tok::BoxE),
        ("[G]", Tok::BoxG),
        ("->", Tok::Implies),
        ("~", Tok::Not),
        ("&", Tok::And),
        ("|", Tok::Or),
        ("(", Tok::LParen),
        (")", Tok::RParen),
    ];
    'outer: while i < bytes.len() {
        let c = src[i..].chars().next().unwrap();
        if c.is_whitespace() {
            i += c.len_utf8();
            continue;
        }
        if c == '\\' {
            return Err((ParseErrorKind::UnknownEscape, i));
        }
        for (text, tok) in fixed {
            if src[i..].starts_with(text) {
                out.push((tok.clone(), i));
                i += text.len();
                continue 'outer;
            }
        }
        if c.is_ascii_alphabetic() || c == '_' {
            let start = i;
            while i < bytes.len()
                && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_' || bytes[i] == b'#')
            {
                i += 1;
            }
            let word = &src[start..i];
            let tok = match word {
                "true" => Tok::True,
                "false" => Tok::False,
                "pi" => Tok::Pi,
                _ => {
                    debug_assert!(valid_identifier(word));
                    Tok::Ident(word.to_string())
                }
            };
            out.push((tok, start));
            continue;
        }
        return Err((ParseErrorKind::UnexpectedChar(c), i));
    }
    out.push((Tok::End, src.len()));
    Ok(out)
}

struct Parser {
    toks: Vec<(Tok, usize)>,
    pos: usize,
    open: Vec<usize>,
}

type PResult<T> = Result<T, (ParseErrorKind, usize)>;

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].0
    }

    fn offset(&self) -> usize {
        self.toks[self.pos].1
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].0.clone();
        if t != Tok::End {
            self.pos += 1;
        }
        t
    }

    fn unexpected(&self, expected: &'static str) -> (ParseErrorKind, usize) {
        match self.peek() {
            Tok::End => match self.open.last() {
                Some(&at) => (ParseErrorKind::UnclosedParen, at),
                None => (ParseErrorKind::UnexpectedEnd { expected }, self.offset()),
            },
            Tok::RParen if self.open.is_empty() => (ParseErrorKind::UnmatchedParen, self.offset()),
            t => (
                ParseErrorKind::UnexpectedToken {
                    found: t.to_string(),
                    expected,
                },
                self.offset(),
            ),
        }
    }

    fn iff(&mut self) -> PResult<Formula> {
        let lhs = self.implies()?;
        if *self.peek() == Tok::Iff {
            self.bump();
            let rhs = self.iff()?;
            return Ok(Formula::iff(lhs, rhs));
        }
        Ok(lhs)
    }

    fn implies(&mut self) -> PResult<Formula> {
        let lhs = self.or()?;
        if *self.peek() == Tok::Implies {
            self.bump();
            let rhs = self.implies()?;
            return Ok(Formula::implies(lhs, rhs));
        }
        Ok(lhs)
    }

    fn or(&mut self) -> PResult<Formula> {
        let lhs = self.and()?;
        if *self.peek() == Tok::Or {
            self.bump();
            let rhs = self.or()?;
            return Ok(Formula::or(lhs, rhs));
        }
        Ok(lhs)
    }

    fn and(&mut self) -> PResult<Formula> {
        let lhs = self.unary()?;
        if *self.peek() == Tok::And {
            self.bump();
            let rhs = self.and()?;
            return Ok(Formula::and(lhs, rhs));
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> PResult<Formula> {
        let at = self.offset();
        match self.peek().clone() {
            Tok::Not => {
                self.bump();
                Ok(Formula::not(self.unary()?))
            }
            Tok::DiaB => {
                self.bump();
                Ok(Formula::hs_b(self.unary()?))
            }
            Tok::DiaE => {
                self.bump();
                Ok(Formula::hs_e(self.unary()?))
            }
            Tok::DiaG => {
                self.bump();
                let x = self.unary()?;
                Ok(Formula::not(Formula::box_g(Formula::not(x))))
            }
            Tok::BoxB => {
                self.bump();
                Ok(Formula::box_b(self.unary()?))
            }
            Tok::BoxE => {
                self.bump();
                Ok(Formula::box_e(self.unary()?))
            }
            Tok::BoxG => {
                self.bump();
                Ok(Formula::box_g(self.unary()?))
            }
            Tok::True => {
                self.bump();
                Ok(Formula::top())
            }
            Tok::False => {
                self.bump();
                Ok(Formula::bot())
            }
            Tok::Pi => {
                self.bump();
                Ok(Formula::pi())
            }
            Tok::Ident(name) => {
                self.bump();
                Ok(Formula::atom(&name))
            }
            Tok::LParen => {
                self.bump();
                self.open.push(at);
                let f = self.iff()?;
                if *self.peek() != Tok::RParen {
                    return Err(self.unexpected("`)`"));
                }
                self.bump();
                self.open.pop();
                Ok(f)
            }
            _ => Err(self.unexpected("a formula")),
        }
    }
}

fn locate(src: &str, offset: usize) -> (usize, usize) {
    let before = &src[..offset.min(src.len())];
    let line = before.matches('\n').count() + 1;
    let column = before.rsplit('\n').next().map_or(0, |l| l.chars().count()) + 1;
    (line, column)
}

/// Parses the textual syntax. Binary operators are right-associative and bind,
/// from tightest: `&`, `|`, `->`, `<->`.
pub fn parse(src: &str) -> Result<Formula, ParseError> {
    let run = || -> PResult<Formula> {
        let toks = lex(src)?;
        let mut p = Parser {
            toks,
            pos: 0,
            open: Vec::new(),
        };
        let f = p.iff()?;
        if *p.peek() != Tok::End {
            return Err(p.unexpected("an operator or end of input"));
        }
        Ok(f)
    };
    run().map_err(|(kind, offset)| {
        let (line, column) = locate(src, offset);
        ParseError {
            kind,
            offset,
            line,
            column,
        }
    })
}
