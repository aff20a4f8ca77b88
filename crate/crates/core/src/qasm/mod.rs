//! Text format for circuits: an OpenQASM 2 subset with symbolic angles.
//!
//! ```text
//! program    = [ "OPENQASM" number ";" ] { statement } ;
//! statement  = qreg | creg | gate | measure | reset | barrier ;
//! qreg       = "qreg" ident "[" int "]" ";" ;          (* exactly one *)
//! creg       = "creg" ident "[" int "]" ";" ;          (* at most one *)
//! gate       = name [ "(" expr ")" ] arg { "," arg } ";" ;
//! name       = "x" | "sx" | "h" | "rx" | "ry" | "rz" | "cx" | "swap" ;
//! measure    = "measure" arg "->" arg ";" ;
//! reset      = "reset" arg ";" ;
//! barrier    = "barrier" arg { "," arg } ";" ;
//! arg        = ident [ "[" int "]" ] ;                 (* bare register = broadcast *)
//! expr       = term { ( "+" | "-" ) term } ;
//! term       = unary { ( "*" | "/" ) unary } ;
//! unary      = ( "+" | "-" ) unary | primary ;
//! primary    = number | "pi" | ident | "(" expr ")" ;
//! ```
//!
//! Identifiers inside angle expressions other than `pi` are free parameters. An expression
//! must reduce to `c * name + d` with at most one parameter name; arithmetic on literals is
//! folded while parsing. `//` starts a comment. Two comment directives carry metadata:
//! `//@name <text>` sets the circuit name and `//@layout p0 p1 ...` records the physical qubit
//! behind each wire.

mod lexer;
mod parser;
mod writer;

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::circuit::Violation;

pub use parser::parse;
pub use writer::serialize;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SourceSpan {
    pub line: usize,
    pub column: usize,
    pub offset: usize,
}

impl fmt::Display for SourceSpan {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.column)
    }
}

#[derive(Clone, Debug, PartialEq, Error)]
pub enum ParseErrorKind {
    #[error("unexpected character `{0}`")]
    UnexpectedChar(char),
    #[error("invalid number `{0}`")]
    InvalidNumber(String),
    #[error("expected {expected}, found {found}")]
    Syntax { expected: String, found: String },
    #[error("unknown gate `{0}`")]
    UnknownGate(String),
    #[error("undeclared register `{0}`")]
    UndeclaredRegister(String),
    #[error("only one {0} register is supported")]
    MultipleRegisters(&'static str),
    #[error("index {index} out of range for register `{register}`")]
    IndexOutOfRange { register: String, index: usize },
    #[error("`{gate}` expects {expected} {what}, found {found}")]
    Arity {
        gate: String,
        what: &'static str,
        expected: usize,
        found: usize,
    },
    #[error("angle expression is not linear in a single parameter")]
    NonLinear,
    #[error("division by zero in angle expression")]
    DivisionByZero,
    #[error("bad directive: {0}")]
    Directive(String),
    #[error("circuit violates invariants: {}", .0.iter().map(|v| v.to_string()).collect::<Vec<_>>().join("; "))]
    Invalid(Vec<Violation>),
}

#[derive(Clone, Debug, PartialEq, Error)]
#[error("{span}: {kind}")]
pub struct ParseError {
    pub kind: ParseErrorKind,
    pub span: SourceSpan,
}
