//! Parsed form of a rule script. All nodes compare structurally, which is
//! what the print/reparse round-trip tests rely on.

#[derive(Debug, Clone, PartialEq)]
pub struct QueryScript {
    pub statements: Vec<Statement>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Statement {
    Match {
        patterns: Vec<Pattern>,
        where_expr: Option<Expr>,
        with_vars: Option<Vec<String>>,
    },
    Merge {
        node: NodePattern,
    },
    Create {
        pattern: Pattern,
    },
    Return {
        items: Vec<Expr>,
    },
}

/// A chain `start (-rel- node)*`, optionally named: `p = (a)-[:T]->(b)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Pattern {
    pub path_var: Option<String>,
    pub start: NodePattern,
    pub steps: Vec<(RelPattern, NodePattern)>,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct NodePattern {
    pub var: Option<String>,
    pub label: Option<String>,
    pub props: Vec<(String, Expr)>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RelPattern {
    pub var: Option<String>,
    pub etype: Option<String>,
    pub dir: RelDir,
    /// `Some((min, max))` for `*min..max`; `max = None` when unbounded.
    pub hops: Option<(u32, Option<u32>)>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RelDir {
    Right,
    Left,
    Undirected,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Int(i64),
    Float(f64),
    Str(String),
    List(Vec<Expr>),
    Var(String),
    Prop(Box<Expr>, String),
    Index(Box<Expr>, Box<Expr>),
    Neg(Box<Expr>),
    Binary(BinOp, Box<Expr>, Box<Expr>),
    Call(Func, Vec<Expr>),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BinOp {
    Or,
    And,
    Eq,
    Ne,
    Lt,
    Le,
    Gt,
    Ge,
    Add,
    Sub,
    Mul,
    Div,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Func {
    Abs,
    Size,
    /// Elements present in both argument lists, first-list order, deduped.
    /// `apoc.coll.intersection` parses to this same node.
    ListIntersection,
}
