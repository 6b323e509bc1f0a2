//! A small arithmetic expression language with forward-mode derivatives.
//!
//! ```
//! use wparab_core::expr::Expression;
//!
//! let e = Expression::parse("t^2", &["t"]).unwrap();
//! let d = e.eval_dual(&[3.0], &[1.0]).unwrap();
//! assert_eq!((d.value(), d.derivative()), (9.0, 6.0));
//! ```

mod ast;
mod dual;
mod parser;

use std::fmt;

pub use ast::{BinOp, DomainError, Func, Node};
pub use dual::{jet_of, Dual, Jet, Scalar};
pub use parser::{ParseError, ParseErrorKind};

/// A parsed expression together with its declared variables.
#[derive(Clone, Debug, PartialEq)]
pub struct Expression {
    source: String,
    variables: Vec<String>,
    root: Node,
}

impl Expression {
    pub fn parse<S: AsRef<str>>(source: &str, variables: &[S]) -> Result<Self, ParseError> {
        let variables: Vec<String> = variables.iter().map(|v| v.as_ref().to_owned()).collect();
        let root = parser::parse_node(source, &variables)?;
        Ok(Self {
            source: source.to_owned(),
            variables,
            root,
        })
    }

    /// Wraps an already-built tree. Variable indices in `root` must be valid
    /// for `variables`.
    pub fn from_node(root: Node, variables: Vec<String>) -> Self {
        let source = root.render(&variables);
        Self {
            source,
            variables,
            root,
        }
    }

    pub fn source(&self) -> &str {
        &self.source
    }

    pub fn variables(&self) -> &[String] {
        &self.variables
    }

    pub fn root(&self) -> &Node {
        &self.root
    }

    pub fn eval(&self, point: &[f64]) -> Result<f64, DomainError> {
        self.eval_generic(point)
    }

    /// Value and directional derivative at `point` along `direction`.
    pub fn eval_dual(&self, point: &[f64], direction: &[f64]) -> Result<Dual, DomainError> {
        assert_eq!(direction.len(), point.len(), "direction arity");
        let seeded: Vec<Dual> = point
            .iter()
            .zip(direction)
            .map(|(&x, &d)| Dual::new(x, d))
            .collect();
        self.eval_generic(&seeded)
    }

    /// Evaluates over any scalar type, e.g. nested duals for second derivatives.
    pub fn eval_generic<S: Scalar>(&self, point: &[S]) -> Result<S, DomainError> {
        assert_eq!(point.len(), self.variables.len(), "point arity");
        self.root.eval(point, &self.variables)
    }

    /// Value, first and second derivative of a one-variable expression.
    pub fn jet(&self, t: f64) -> Result<Jet, DomainError> {
        assert_eq!(self.variables.len(), 1, "jet needs a univariate expression");
        let seed = Dual::new(Dual::new(t, 1.0), Dual::new(1.0, 0.0));
        let out = self.eval_generic(&[seed])?;
        Ok(Jet::new(out.re.re, out.re.eps, out.eps.eps))
    }

    /// Canonical rendering that re-parses to an equal tree.
    pub fn pretty(&self) -> String {
        self.root.render(&self.variables)
    }
}

impl fmt::Display for Expression {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        ast::Display {
            node: &self.root,
            names: &self.variables,
        }
        .fmt(f)
    }
}
