use std::fmt;

use super::dual::Scalar;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
}

impl BinOp {
    fn symbol(self) -> char {
        match self {
            BinOp::Add => '+',
            BinOp::Sub => '-',
            BinOp::Mul => '*',
            BinOp::Div => '/',
        }
    }

    fn precedence(self) -> u8 {
        match self {
            BinOp::Add | BinOp::Sub => 1,
            BinOp::Mul | BinOp::Div => 2,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Func {
    Sin,
    Cos,
    Sinh,
    Cosh,
    Tanh,
    Exp,
    Log,
    Sqrt,
    Abs,
}

impl Func {
    pub const ALL: [Func; 9] = [
        Func::Sin,
        Func::Cos,
        Func::Sinh,
        Func::Cosh,
        Func::Tanh,
        Func::Exp,
        Func::Log,
        Func::Sqrt,
        Func::Abs,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Sinh => "sinh",
            Func::Cosh => "cosh",
            Func::Tanh => "tanh",
            Func::Exp => "exp",
            Func::Log => "log",
            Func::Sqrt => "sqrt",
            Func::Abs => "abs",
        }
    }

    pub fn from_name(name: &str) -> Option<Func> {
        Func::ALL.into_iter().find(|f| f.name() == name)
    }
}

/// Expression tree. Variables are indices into the owning
/// [`Expression`](super::Expression)'s variable list.
///
/// The parser never produces a negative `Const`; negation is always an
/// explicit `Neg` node.
#[derive(Clone, Debug, PartialEq)]
pub enum Node {
    Const(f64),
    Var(usize),
    Neg(Box<Node>),
    Binary(BinOp, Box<Node>, Box<Node>),
    /// Base raised to a constant exponent.
    Pow(Box<Node>, f64),
    Call(Func, Box<Node>),
}

#[derive(Clone, Debug, PartialEq, thiserror::Error)]
pub enum DomainError {
    #[error("division by zero in `{0}`")]
    DivisionByZero(String),
    #[error("log of non-positive argument {value} in `{expr}`")]
    LogNonPositive { expr: String, value: f64 },
    #[error("sqrt of negative argument {value} in `{expr}`")]
    SqrtNegative { expr: String, value: f64 },
    #[error("non-integer power of negative base {value} in `{expr}`")]
    NegativeBase { expr: String, value: f64 },
}

impl Node {
    pub fn constant(v: f64) -> Node {
        Node::Const(v)
    }

    pub fn binary(op: BinOp, l: Node, r: Node) -> Node {
        Node::Binary(op, Box::new(l), Box::new(r))
    }

    fn precedence(&self) -> u8 {
        match self {
            Node::Binary(op, _, _) => op.precedence(),
            Node::Neg(_) => 3,
            Node::Pow(_, _) => 4,
            Node::Const(_) | Node::Var(_) | Node::Call(_, _) => 5,
        }
    }

    pub fn contains_variable(&self) -> bool {
        match self {
            Node::Const(_) => false,
            Node::Var(_) => true,
            Node::Neg(a) | Node::Pow(a, _) | Node::Call(_, a) => a.contains_variable(),
            Node::Binary(_, a, b) => a.contains_variable() || b.contains_variable(),
        }
    }

    /// Evaluates the tree over any [`Scalar`], checking domains on the real
    /// part of every intermediate value.
    pub fn eval<S: Scalar>(&self, vars: &[S], names: &[String]) -> Result<S, DomainError> {
        Ok(match self {
            Node::Const(c) => S::constant(*c),
            Node::Var(i) => vars[*i],
            Node::Neg(a) => -a.eval(vars, names)?,
            Node::Binary(op, a, b) => {
                let x = a.eval(vars, names)?;
                let y = b.eval(vars, names)?;
                match op {
                    BinOp::Add => x + y,
                    BinOp::Sub => x - y,
                    BinOp::Mul => x * y,
                    BinOp::Div => {
                        if y.re() == 0.0 {
                            return Err(DomainError::DivisionByZero(self.render(names)));
                        }
                        x / y
                    }
                }
            }
            Node::Pow(a, e) => {
                let x = a.eval(vars, names)?;
                if e.fract() == 0.0 && e.abs() < i32::MAX as f64 {
                    if *e < 0.0 && x.re() == 0.0 {
                        return Err(DomainError::DivisionByZero(self.render(names)));
                    }
                    x.powi(*e as i32)
                } else {
                    if x.re() < 0.0 {
                        return Err(DomainError::NegativeBase {
                            expr: self.render(names),
                            value: x.re(),
                        });
                    }
                    x.powf(*e)
                }
            }
            Node::Call(f, a) => {
                let x = a.eval(vars, names)?;
                match f {
                    Func::Sin => x.sin(),
                    Func::Cos => x.cos(),
                    Func::Sinh => x.sinh(),
                    Func::Cosh => x.cosh(),
                    Func::Tanh => x.tanh(),
                    Func::Exp => x.exp(),
                    Func::Log => {
                        if x.re() <= 0.0 {
                            return Err(DomainError::LogNonPositive {
                                expr: self.render(names),
                                value: x.re(),
                            });
                        }
                        x.ln()
                    }
                    Func::Sqrt => {
                        if x.re() < 0.0 {
                            return Err(DomainError::SqrtNegative {
                                expr: self.render(names),
                                value: x.re(),
                            });
                        }
                        x.sqrt()
                    }
                    Func::Abs => x.abs(),
                }
            }
        })
    }

    /// Renders with the minimum parentheses needed to re-parse to the same tree.
    pub fn render(&self, names: &[String]) -> String {
        let mut out = String::new();
        self.write(&mut out, names);
        out
    }

    fn write_child(&self, out: &mut String, names: &[String], min_prec: u8) {
        if self.precedence() < min_prec {
            out.push('(');
            self.write(out, names);
            out.push(')');
        } else {
            self.write(out, names);
        }
    }

    fn write(&self, out: &mut String, names: &[String]) {
        match self {
            Node::Const(c) => out.push_str(&format_number(*c)),
            Node::Var(i) => out.push_str(&names[*i]),
            Node::Neg(a) => {
                out.push('-');
                a.write_child(out, names, 3);
            }
            Node::Binary(op, a, b) => {
                let p = op.precedence();
                a.write_child(out, names, p);
                out.push(' ');
                out.push(op.symbol());
                out.push(' ');
                b.write_child(out, names, p + 1);
            }
            Node::Pow(a, e) => {
                a.write_child(out, names, 4);
                out.push('^');
                if *e < 0.0 {
                    out.push_str("(-");
                    out.push_str(&format_number(-e));
                    out.push(')');
                } else {
                    out.push_str(&format_number(*e));
                }
            }
            Node::Call(f, a) => {
                out.push_str(f.name());
                out.push('(');
                a.write(out, names);
                out.push(')');
            }
        }
    }
}

/// Shortest representation that parses back to the identical `f64`.
fn format_number(v: f64) -> String {
    format!("{v:?}")
}

pub(crate) struct Display<'a> {
    pub node: &'a Node,
    pub names: &'a [String],
}

impl fmt::Display for Display<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.node.render(self.names))
    }
}
