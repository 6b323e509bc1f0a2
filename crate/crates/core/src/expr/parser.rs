//! Recursive-descent parser.
//!
//! Precedence, tightest first: `^`, unary `-`, `* /`, `+ -`. All binary
//! operators associate to the left. The exponent of `^` must be free of
//! variables and is folded to a number at parse time.

use super::ast::{BinOp, Func, Node};

#[derive(Clone, Debug, PartialEq, thiserror::Error)]
#[error("{kind} at position {position}")]
pub struct ParseError {
    /// Character offset into the source.
    pub position: usize,
    pub kind: ParseErrorKind,
}

#[derive(Clone, Debug, PartialEq, thiserror::Error)]
pub enum ParseErrorKind {
    #[error("empty expression")]
    Empty,
    #[error("unknown token `{0}`")]
    UnknownToken(char),
    #[error("malformed number `{0}`")]
    BadNumber(String),
    #[error("unmatched `(` opened at position {open}")]
    UnmatchedOpen { open: usize },
    #[error("unmatched `)`")]
    UnmatchedClose,
    #[error("unknown function `{0}`")]
    UnknownFunction(String),
    #[error("undeclared variable `{0}`")]
    UndeclaredVariable(String),
    #[error("exponent must be a constant expression")]
    NonConstantExponent,
    #[error("exponent does not evaluate to a finite number")]
    BadExponent,
    #[error("expected an operand, found {0}")]
    ExpectedOperand(String),
    #[error("unexpected {0}")]
    Unexpected(String),
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(f64),
    Ident(String),
    Op(char),
    LParen,
    RParen,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Num(v) => format!("number {v}"),
            Tok::Ident(s) => format!("identifier `{s}`"),
            Tok::Op(c) => format!("`{c}`"),
            Tok::LParen => "`(`".into(),
            Tok::RParen => "`)`".into(),
        }
    }
}

fn tokenize(src: &str) -> Result<Vec<(usize, Tok)>, ParseError> {
    let chars: Vec<char> = src.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        if c.is_whitespace() {
            i += 1;
            continue;
        }
        let start = i;
        if c.is_ascii_digit() || c == '.' {
            while i < chars.len() && (chars[i].is_ascii_digit() || chars[i] == '.') {
                i += 1;
            }
            if i < chars.len() && (chars[i] == 'e' || chars[i] == 'E') {
                let mut j = i + 1;
                if j < chars.len() && (chars[j] == '+' || chars[j] == '-') {
                    j += 1;
                }
                if j < chars.len() && chars[j].is_ascii_digit() {
                    i = j;
                    while i < chars.len() && chars[i].is_ascii_digit() {
                        i += 1;
                    }
                }
            }
            let text: String = chars[start..i].iter().collect();
            let v: f64 = text.parse().map_err(|_| ParseError {
                position: start,
                kind: ParseErrorKind::BadNumber(text.clone()),
            })?;
            out.push((start, Tok::Num(v)));
            // `2t` is rejected: a number may not run straight into a name.
            if i < chars.len() && (chars[i].is_alphabetic() || chars[i] == '_') {
                return Err(ParseError {
                    position: i,
                    kind: ParseErrorKind::Unexpected("identifier directly after number (use `*`)".into()),
                });
            }
            continue;
        }
        if c.is_alphabetic() || c == '_' {
            while i < chars.len() && (chars[i].is_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            out.push((start, Tok::Ident(chars[start..i].iter().collect())));
            continue;
        }
        let tok = match c {
            '+' | '-' | '*' | '/' | '^' => Tok::Op(c),
            '(' => Tok::LParen,
            ')' => Tok::RParen,
            other => {
                return Err(ParseError {
                    position: start,
                    kind: ParseErrorKind::UnknownToken(other),
                })
            }
        };
        out.push((start, tok));
        i += 1;
    }
    Ok(out)
}

struct Parser<'a> {
    toks: Vec<(usize, Tok)>,
    pos: usize,
    end: usize,
    vars: &'a [String],
}

impl Parser<'_> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(_, t)| t)
    }

    fn offset(&self) -> usize {
        self.toks.get(self.pos).map(|(p, _)| *p).unwrap_or(self.end)
    }

    fn err(&self, kind: ParseErrorKind) -> ParseError {
        ParseError {
            position: self.offset(),
            kind,
        }
    }

    fn expr(&mut self) -> Result<Node, ParseError> {
        let mut lhs = self.term()?;
        while let Some(Tok::Op(c @ ('+' | '-'))) = self.peek() {
            let op = if *c == '+' { BinOp::Add } else { BinOp::Sub };
            self.pos += 1;
            let rhs = self.term()?;
            lhs = Node::binary(op, lhs, rhs);
        }
        Ok(lhs)
    }

    fn term(&mut self) -> Result<Node, ParseError> {
        let mut lhs = self.unary()?;
        while let Some(Tok::Op(c @ ('*' | '/'))) = self.peek() {
            let op = if *c == '*' { BinOp::Mul } else { BinOp::Div };
            self.pos += 1;
            let rhs = self.unary()?;
            lhs = Node::binary(op, lhs, rhs);
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Node, ParseError> {
        if let Some(Tok::Op('-')) = self.peek() {
            self.pos += 1;
            return Ok(Node::Neg(Box::new(self.unary()?)));
        }
        self.power()
    }

    fn power(&mut self) -> Result<Node, ParseError> {
        let mut base = self.primary()?;
        while let Some(Tok::Op('^')) = self.peek() {
            self.pos += 1;
            let at = self.offset();
            let negate = if let Some(Tok::Op('-')) = self.peek() {
                self.pos += 1;
                true
            } else {
                false
            };
            let exponent = self.primary()?;
            if exponent.contains_variable() {
                return Err(ParseError {
                    position: at,
                    kind: ParseErrorKind::NonConstantExponent,
                });
            }
            let value = exponent.eval::<f64>(&[], self.vars).map_err(|_| ParseError {
                position: at,
                kind: ParseErrorKind::BadExponent,
            })?;
            let value = if negate { -value } else { value };
            if !value.is_finite() {
                return Err(ParseError {
                    position: at,
                    kind: ParseErrorKind::BadExponent,
                });
            }
            base = Node::Pow(Box::new(base), value);
        }
        Ok(base)
    }

    fn primary(&mut self) -> Result<Node, ParseError> {
        let Some((at, tok)) = self.toks.get(self.pos).cloned() else {
            return Err(self.err(ParseErrorKind::ExpectedOperand("end of input".into())));
        };
        match tok {
            Tok::Num(v) => {
                self.pos += 1;
                Ok(Node::Const(v))
            }
            Tok::LParen => {
                self.pos += 1;
                let inner = self.expr()?;
                self.close(at)?;
                Ok(inner)
            }
            Tok::Ident(name) => {
                self.pos += 1;
                if let Some(Tok::LParen) = self.peek() {
                    let func = Func::from_name(&name).ok_or(ParseError {
                        position: at,
                        kind: ParseErrorKind::UnknownFunction(name.clone()),
                    })?;
                    let open = self.offset();
                    self.pos += 1;
                    let arg = self.expr()?;
                    self.close(open)?;
                    return Ok(Node::Call(func, Box::new(arg)));
                }
                if let Some(i) = self.vars.iter().position(|v| *v == name) {
                    Ok(Node::Var(i))
                } else if name == "pi" {
                    Ok(Node::Const(std::f64::consts::PI))
                } else if Func::from_name(&name).is_some() {
                    Err(ParseError {
                        position: at,
                        kind: ParseErrorKind::Unexpected(format!(
                            "function `{name}` without argument list"
                        )),
                    })
                } else {
                    Err(ParseError {
                        position: at,
                        kind: ParseErrorKind::UndeclaredVariable(name),
                    })
                }
            }
            Tok::RParen => Err(ParseError {
                position: at,
                kind: ParseErrorKind::UnmatchedClose,
            }),
            other => Err(ParseError {
                position: at,
                kind: ParseErrorKind::ExpectedOperand(other.describe()),
            }),
        }
    }

    fn close(&mut self, open: usize) -> Result<(), ParseError> {
        match self.peek() {
            Some(Tok::RParen) => {
                self.pos += 1;
                Ok(())
            }
            None => Err(ParseError {
                position: open,
                kind: ParseErrorKind::UnmatchedOpen { open },
            }),
            Some(t) => Err(self.err(ParseErrorKind::Unexpected(t.describe()))),
        }
    }
}

pub(crate) fn parse_node(src: &str, vars: &[String]) -> Result<Node, ParseError> {
    let toks = tokenize(src)?;
    if toks.is_empty() {
        return Err(ParseError {
            position: 0,
            kind: ParseErrorKind::Empty,
        });
    }
    let mut p = Parser {
        toks,
        pos: 0,
        end: src.chars().count(),
        vars,
    };
    let node = p.expr()?;
    if let Some(t) = p.peek() {
        let kind = if *t == Tok::RParen {
            ParseErrorKind::UnmatchedClose
        } else {
            ParseErrorKind::Unexpected(t.describe())
        };
        return Err(p.err(kind));
    }
    Ok(node)
}
