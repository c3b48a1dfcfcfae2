//! Embedded query engine for the declarative recognition rules.
//!
//! Implements a small openCypher subset: MATCH with WHERE and WITH, MERGE,
//! CREATE, RETURN, expressions over node and edge properties, and
//! variable-length relationship closures. Scripts are parsed to an AST,
//! canonically printable, and interpreted directly against the property
//! graph with index-first pattern enumeration.

mod ast;
mod exec;
mod parser;
mod printer;

pub use ast::{BinOp, Expr, Func, NodePattern, Pattern, QueryScript, RelDir, RelPattern, Statement};
pub use exec::{eval_expr, execute, Cell, ExecuteOptions, ResultTable};
pub use parser::{parse, ParseError};
pub use printer::{print_expr, print_script};

use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum EngineError {
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error("unbound variable {0}")]
    UnboundVariable(String),
    #[error("type mismatch: {0}")]
    TypeMismatch(String),
    #[error("missing property {0}")]
    MissingProperty(String),
    #[error("mutation statement after RETURN")]
    MutationInRead,
    #[error(transparent)]
    Graph(#[from] crate::property_graph::GraphError),
}
