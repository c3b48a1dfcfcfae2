//! Script interpreter. A binding table flows through the statements of a
//! script: MATCH fills it, WHERE filters it, WITH projects it, MERGE and
//! CREATE run once per row, RETURN evaluates into a result table.
//!
//! Pattern enumeration is index-first: chains start from the smallest
//! label index and expand along adjacency. Comma patterns are combined by
//! hash join on shared variables; disconnected patterns whose WHERE links
//! them through a `size(list_intersection(a.X, b.X)) >= k` conjunct are
//! joined through an inverted element index instead of a cartesian
//! product, which is what keeps rule execution subquadratic.

use std::collections::HashMap;

use super::ast::*;
use super::printer::print_expr;
use super::EngineError;
use crate::property_graph::{
    Dir, EdgeId, Graph, NodeId, NodeSpec, PathPattern, Props, RelSpec, Value,
};

/// Runtime value of a binding column or result cell.
#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Value(Value),
    Node(NodeId),
    Edge(EdgeId),
    /// Variable-length path, reported as its endpoints.
    Path { start: NodeId, end: NodeId },
}

#[derive(Debug, Clone, Copy, Default)]
pub struct ExecuteOptions {
    /// Also create the mirrored edge on every CREATE of a directed
    /// relationship, making symmetric relations explicit.
    pub create_reverse_edges: bool,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct ResultTable {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

pub fn execute(
    script: &QueryScript,
    g: &mut Graph,
    opts: ExecuteOptions,
) -> Result<ResultTable, EngineError> {
    let mut seen_return = false;
    for st in &script.statements {
        match st {
            Statement::Return { .. } => seen_return = true,
            Statement::Merge { .. } | Statement::Create { .. } if seen_return => {
                return Err(EngineError::MutationInRead)
            }
            _ => {}
        }
    }
    let mut ex = Exec {
        g,
        opts,
        cols: Vec::new(),
        rows: vec![Vec::new()],
        result: None,
    };
    for st in &script.statements {
        ex.run(st)?;
    }
    Ok(ex.result.unwrap_or_default())
}

struct Exec<'g> {
    g: &'g mut Graph,
    opts: ExecuteOptions,
    cols: Vec<String>,
    rows: Vec<Vec<Cell>>,
    result: Option<ResultTable>,
}

impl Exec<'_> {
    fn run(&mut self, st: &Statement) -> Result<(), EngineError> {
        match st {
            Statement::Match {
                patterns,
                where_expr,
                with_vars,
            } => self.run_match(patterns, where_expr.as_ref(), with_vars.as_deref()),
            Statement::Merge { node } => self.run_merge(node),
            Statement::Create { pattern } => self.run_create(pattern),
            Statement::Return { items } => self.run_return(items),
        }
    }

    fn run_match(
        &mut self,
        patterns: &[Pattern],
        where_expr: Option<&Expr>,
        with_vars: Option<&[String]>,
    ) -> Result<(), EngineError> {
        // a MATCH statement starts a fresh binding table
        let mut cols: Vec<String> = Vec::new();
        let mut rows: Vec<Vec<Cell>> = vec![Vec::new()];
        for pat in patterns {
            let (pcols, prows) = self.match_pattern(pat)?;
            (cols, rows) = join(self.g, cols, rows, pcols, prows, where_expr);
        }
        rows.retain(|row| distinct_edge_cells(row));
        if let Some(w) = where_expr {
            let mut kept = Vec::new();
            for row in rows {
                if eval_bool(w, &cols, &row, self.g)? {
                    kept.push(row);
                }
            }
            rows = kept;
        }
        if let Some(vars) = with_vars {
            let mut idx = Vec::with_capacity(vars.len());
            for v in vars {
                let i = cols
                    .iter()
                    .position(|c| c == v)
                    .ok_or_else(|| EngineError::UnboundVariable(v.clone()))?;
                idx.push(i);
            }
            rows = rows
                .into_iter()
                .map(|row| idx.iter().map(|&i| row[i].clone()).collect())
                .collect();
            cols = vars.to_vec();
        }
        self.cols = cols;
        self.rows = rows;
        Ok(())
    }

    /// Enumerates one comma pattern into named columns.
    fn match_pattern(
        &self,
        pat: &Pattern,
    ) -> Result<(Vec<String>, Vec<Vec<Cell>>), EngineError> {
        enum Source {
            Whole,
            NodeSlot(usize),
            RelSlot(usize),
        }
        let mut names: Vec<(String, Source)> = Vec::new();
        let bind = |name: &Option<String>, src: Source, names: &mut Vec<(String, Source)>| {
            if let Some(n) = name {
                if !names.iter().any(|(existing, _)| existing == n) {
                    names.push((n.clone(), src));
                }
            }
        };
        if let Some(p) = &pat.path_var {
            names.push((p.clone(), Source::Whole));
        }
        let node_patterns: Vec<&NodePattern> = std::iter::once(&pat.start)
            .chain(pat.steps.iter().map(|(_, n)| n))
            .collect();
        for (i, np) in node_patterns.iter().enumerate() {
            bind(&np.var, Source::NodeSlot(i), &mut names);
        }
        for (i, (rp, _)) in pat.steps.iter().enumerate() {
            bind(&rp.var, Source::RelSlot(i), &mut names);
        }

        let gpath = PathPattern {
            nodes: node_patterns
                .iter()
                .map(|np| NodeSpec {
                    label: np.label.clone(),
                })
                .collect(),
            rels: pat
                .steps
                .iter()
                .map(|(rp, _)| RelSpec {
                    etype: rp.etype.clone(),
                    dir: match rp.dir {
                        RelDir::Right => Dir::Out,
                        RelDir::Left => Dir::In,
                        RelDir::Undirected => Dir::Any,
                    },
                    hops: rp.hops,
                })
                .collect(),
        };
        // node property constraints evaluate without bindings (literals)
        let mut constraints: Vec<(usize, &str, Value)> = Vec::new();
        for (i, np) in node_patterns.iter().enumerate() {
            for (key, expr) in &np.props {
                match eval_expr(expr, &[], &[], self.g)? {
                    Cell::Value(v) => constraints.push((i, key, v)),
                    _ => {
                        return Err(EngineError::TypeMismatch(
                            "node pattern property must be a plain value".into(),
                        ))
                    }
                }
            }
        }

        let mut rows = Vec::new();
        'bindings: for b in self.g.match_path(&gpath)? {
            for (slot, key, want) in &constraints {
                let node = self.g.node(b.nodes[*slot]);
                match node.props.get(*key) {
                    Some(have) if value_eq(have, want) => {}
                    _ => continue 'bindings,
                }
            }
            let mut row = Vec::with_capacity(names.len());
            for (name, src) in &names {
                let cell = match src {
                    Source::Whole => Cell::Path {
                        start: b.nodes[0],
                        end: *b.nodes.last().expect("non-empty path"),
                    },
                    Source::NodeSlot(i) => Cell::Node(b.nodes[*i]),
                    Source::RelSlot(i) => match b.edges[*i] {
                        Some(e) => Cell::Edge(e),
                        None => continue 'bindings,
                    },
                };
                // a variable repeated inside one pattern must agree
                if let Some(pos) = names[..row.len()]
                    .iter()
                    .position(|(earlier, _)| earlier == name)
                {
                    if row[pos] != cell {
                        continue 'bindings;
                    }
                }
                row.push(cell);
            }
            rows.push(row);
        }
        Ok((names.into_iter().map(|(n, _)| n).collect(), rows))
    }

    fn run_merge(&mut self, node: &NodePattern) -> Result<(), EngineError> {
        let labels: Vec<String> = node.label.iter().cloned().collect();
        for row in &self.rows {
            let props = eval_props(&node.props, &self.cols, row, self.g)?;
            self.g.merge_node(labels.clone(), props);
        }
        Ok(())
    }

    fn run_create(&mut self, pattern: &Pattern) -> Result<(), EngineError> {
        let node_patterns: Vec<&NodePattern> = std::iter::once(&pattern.start)
            .chain(pattern.steps.iter().map(|(_, n)| n))
            .collect();
        for (rel, _) in &pattern.steps {
            if rel.etype.is_none() {
                return Err(EngineError::TypeMismatch(
                    "CREATE relationship requires a type".into(),
                ));
            }
            if rel.hops.is_some() {
                return Err(EngineError::TypeMismatch(
                    "CREATE cannot use a variable-length relationship".into(),
                ));
            }
            if rel.dir == RelDir::Undirected {
                return Err(EngineError::TypeMismatch(
                    "CREATE relationship requires a direction".into(),
                ));
            }
        }
        let rows = std::mem::take(&mut self.rows);
        for row in &rows {
            let mut local: HashMap<&str, NodeId> = HashMap::new();
            let mut ids = Vec::with_capacity(node_patterns.len());
            for np in &node_patterns {
                let id = self.resolve_create_node(np, row, &mut local)?;
                ids.push(id);
            }
            for (i, (rel, _)) in pattern.steps.iter().enumerate() {
                let etype = rel.etype.as_deref().expect("checked above");
                let (src, dst) = match rel.dir {
                    RelDir::Right => (ids[i], ids[i + 1]),
                    RelDir::Left => (ids[i + 1], ids[i]),
                    RelDir::Undirected => unreachable!("checked above"),
                };
                self.g.add_edge(src, dst, etype, Props::new())?;
                if self.opts.create_reverse_edges {
                    self.g.add_edge(dst, src, etype, Props::new())?;
                }
            }
        }
        self.rows = rows;
        Ok(())
    }

    fn resolve_create_node<'a>(
        &mut self,
        np: &'a NodePattern,
        row: &[Cell],
        local: &mut HashMap<&'a str, NodeId>,
    ) -> Result<NodeId, EngineError> {
        if let Some(var) = &np.var {
            if let Some(i) = self.cols.iter().position(|c| c == var) {
                return match row[i] {
                    Cell::Node(id) => Ok(id),
                    _ => Err(EngineError::TypeMismatch(format!(
                        "{var} is not a node"
                    ))),
                };
            }
            if let Some(&id) = local.get(var.as_str()) {
                return Ok(id);
            }
        }
        let props = eval_props(&np.props, &self.cols, row, self.g)?;
        let id = self.g.add_node(np.label.iter().cloned().collect(), props);
        if let Some(var) = &np.var {
            local.insert(var, id);
        }
        Ok(id)
    }

    fn run_return(&mut self, items: &[Expr]) -> Result<(), EngineError> {
        let columns: Vec<String> = items.iter().map(print_expr).collect();
        let mut rows = Vec::with_capacity(self.rows.len());
        for row in &self.rows {
            let mut out = Vec::with_capacity(items.len());
            for item in items {
                out.push(eval_expr(item, &self.cols, row, self.g)?);
            }
            rows.push(out);
        }
        // canonical row order makes result tables comparable across runs;
        // keys are computed once per row, not per comparison
        let mut keyed: Vec<(Vec<_>, Vec<Cell>)> = rows
            .into_iter()
            .map(|row| (row.iter().map(cell_key).collect(), row))
            .collect();
        keyed.sort_unstable_by(|a, b| a.0.cmp(&b.0));
        let rows = keyed.into_iter().map(|(_, row)| row).collect();
        self.result = Some(ResultTable { columns, rows });
        Ok(())
    }
}

fn eval_props(
    props: &[(String, Expr)],
    cols: &[String],
    row: &[Cell],
    g: &Graph,
) -> Result<Props, EngineError> {
    let mut out = Props::new();
    for (k, e) in props {
        match eval_expr(e, cols, row, g)? {
            Cell::Value(v) => {
                out.insert(k.clone(), v);
            }
            _ => {
                return Err(EngineError::TypeMismatch(format!(
                    "property {k} must be a plain value"
                )))
            }
        }
    }
    Ok(out)
}

fn distinct_edge_cells(row: &[Cell]) -> bool {
    let mut ids: Vec<EdgeId> = row
        .iter()
        .filter_map(|c| match c {
            Cell::Edge(e) => Some(*e),
            _ => None,
        })
        .collect();
    ids.sort_unstable();
    ids.windows(2).all(|w| w[0] != w[1])
}

fn cell_key(c: &Cell) -> (u8, u64, u64, String) {
    match c {
        Cell::Node(id) => (0, *id as u64, 0, String::new()),
        Cell::Edge(id) => (1, *id as u64, 0, String::new()),
        Cell::Path { start, end } => (2, *start as u64, *end as u64, String::new()),
        Cell::Value(v) => (3, 0, 0, format!("{v:?}")),
    }
}

/// Joins two binding tables. Shared variables hash-join; otherwise an
/// intersection conjunct from WHERE drives an inverted-index join, and
/// only as a last resort the product is materialized.
fn join(
    g: &Graph,
    lcols: Vec<String>,
    lrows: Vec<Vec<Cell>>,
    rcols: Vec<String>,
    rrows: Vec<Vec<Cell>>,
    where_expr: Option<&Expr>,
) -> (Vec<String>, Vec<Vec<Cell>>) {
    if lcols.is_empty() {
        return (rcols, rrows);
    }
    let shared: Vec<(usize, usize)> = rcols
        .iter()
        .enumerate()
        .filter_map(|(ri, rc)| lcols.iter().position(|lc| lc == rc).map(|li| (li, ri)))
        .collect();
    let r_keep: Vec<usize> = (0..rcols.len())
        .filter(|ri| !shared.iter().any(|(_, sri)| sri == ri))
        .collect();
    let mut cols = lcols;
    cols.extend(r_keep.iter().map(|&ri| rcols[ri].clone()));

    let combine = |lrow: &Vec<Cell>, rrow: &Vec<Cell>| -> Vec<Cell> {
        let mut row = lrow.clone();
        row.extend(r_keep.iter().map(|&ri| rrow[ri].clone()));
        row
    };

    let mut rows = Vec::new();
    if !shared.is_empty() {
        let mut by_key: HashMap<Vec<(u8, u64, u64, String)>, Vec<usize>> = HashMap::new();
        for (i, lrow) in lrows.iter().enumerate() {
            let key: Vec<_> = shared.iter().map(|&(li, _)| cell_key(&lrow[li])).collect();
            by_key.entry(key).or_default().push(i);
        }
        for rrow in &rrows {
            let key: Vec<_> = shared.iter().map(|&(_, ri)| cell_key(&rrow[ri])).collect();
            if let Some(lids) = by_key.get(&key) {
                for &i in lids {
                    rows.push(combine(&lrows[i], rrow));
                }
            }
        }
    } else if let Some(spec) =
        where_expr.and_then(|w| find_intersection_join(w, &cols[..cols.len() - r_keep.len()], &rcols))
    {
        let list_of = |row: &[Cell], col: usize, prop: &str| -> Option<Vec<Value>> {
            match row[col] {
                Cell::Node(id) => match g.node(id).props.get(prop) {
                    Some(Value::List(items)) => Some(items.clone()),
                    _ => None,
                },
                _ => None,
            }
        };
        let mut index: HashMap<String, Vec<usize>> = HashMap::new();
        for (i, lrow) in lrows.iter().enumerate() {
            if let Some(items) = list_of(lrow, spec.left_col, &spec.left_prop) {
                for it in items {
                    index.entry(format!("{it:?}")).or_default().push(i);
                }
            }
        }
        for rrow in &rrows {
            let Some(items) = list_of(rrow, spec.right_col, &spec.right_prop) else {
                continue;
            };
            let mut candidates: Vec<usize> = items
                .iter()
                .filter_map(|it| index.get(&format!("{it:?}")))
                .flatten()
                .copied()
                .collect();
            candidates.sort_unstable();
            candidates.dedup();
            for i in candidates {
                rows.push(combine(&lrows[i], rrow));
            }
        }
    } else {
        for lrow in &lrows {
            for rrow in &rrows {
                rows.push(combine(lrow, rrow));
            }
        }
    }
    (cols, rows)
}

struct IntersectionJoin {
    left_col: usize,
    left_prop: String,
    right_col: usize,
    right_prop: String,
}

/// Looks for a top-level `size(list_intersection(a.X, b.Y)) >= k` (k >= 1,
/// or `> k` with k >= 0) conjunct connecting one variable from each side.
/// Any pair surviving WHERE then shares at least one list element, so the
/// element index loses no rows.
fn find_intersection_join(
    where_expr: &Expr,
    lcols: &[String],
    rcols: &[String],
) -> Option<IntersectionJoin> {
    let mut conjuncts = Vec::new();
    collect_conjuncts(where_expr, &mut conjuncts);
    for c in conjuncts {
        let Expr::Binary(op, lhs, rhs) = c else {
            continue;
        };
        let implies_shared = match (op, rhs.as_ref()) {
            (BinOp::Ge, Expr::Int(k)) => *k >= 1,
            (BinOp::Gt, Expr::Int(k)) => *k >= 0,
            _ => false,
        };
        if !implies_shared {
            continue;
        }
        let Expr::Call(Func::Size, size_args) = lhs.as_ref() else {
            continue;
        };
        let Expr::Call(Func::ListIntersection, int_args) = &size_args[0] else {
            continue;
        };
        let (Expr::Prop(a_base, a_prop), Expr::Prop(b_base, b_prop)) =
            (&int_args[0], &int_args[1])
        else {
            continue;
        };
        let (Expr::Var(a), Expr::Var(b)) = (a_base.as_ref(), b_base.as_ref()) else {
            continue;
        };
        let pos = |cols: &[String], v: &str| cols.iter().position(|c| c == v);
        if let (Some(li), Some(ri)) = (pos(lcols, a), pos(rcols, b)) {
            return Some(IntersectionJoin {
                left_col: li,
                left_prop: a_prop.clone(),
                right_col: ri,
                right_prop: b_prop.clone(),
            });
        }
        if let (Some(li), Some(ri)) = (pos(lcols, b), pos(rcols, a)) {
            return Some(IntersectionJoin {
                left_col: li,
                left_prop: b_prop.clone(),
                right_col: ri,
                right_prop: a_prop.clone(),
            });
        }
    }
    None
}

fn collect_conjuncts<'e>(e: &'e Expr, out: &mut Vec<&'e Expr>) {
    if let Expr::Binary(BinOp::And, l, r) = e {
        collect_conjuncts(l, out);
        collect_conjuncts(r, out);
    } else {
        out.push(e);
    }
}

fn eval_bool(e: &Expr, cols: &[String], row: &[Cell], g: &Graph) -> Result<bool, EngineError> {
    match eval_expr(e, cols, row, g)? {
        Cell::Value(Value::Bool(b)) => Ok(b),
        other => Err(EngineError::TypeMismatch(format!(
            "WHERE must evaluate to a boolean, got {other:?}"
        ))),
    }
}

/// Evaluates an expression against one binding row. A missing property
/// inside a comparison makes the comparison false instead of failing the
/// whole query; anywhere else it surfaces as `MissingProperty`.
pub fn eval_expr(
    e: &Expr,
    cols: &[String],
    row: &[Cell],
    g: &Graph,
) -> Result<Cell, EngineError> {
    match e {
        Expr::Int(v) => Ok(Cell::Value(Value::Int(*v))),
        Expr::Float(v) => Ok(Cell::Value(Value::Float(*v))),
        Expr::Str(s) => Ok(Cell::Value(Value::Str(s.clone()))),
        Expr::List(items) => {
            let mut out = Vec::with_capacity(items.len());
            for it in items {
                match eval_expr(it, cols, row, g)? {
                    Cell::Value(v) => out.push(v),
                    _ => {
                        return Err(EngineError::TypeMismatch(
                            "list elements must be plain values".into(),
                        ))
                    }
                }
            }
            Ok(Cell::Value(Value::List(out)))
        }
        Expr::Var(name) => cols
            .iter()
            .position(|c| c == name)
            .map(|i| row[i].clone())
            .ok_or_else(|| EngineError::UnboundVariable(name.clone())),
        Expr::Prop(base, key) => {
            let props = match eval_expr(base, cols, row, g)? {
                Cell::Node(id) => &g.node(id).props,
                Cell::Edge(id) => &g.edge(id).props,
                other => {
                    return Err(EngineError::TypeMismatch(format!(
                        "cannot read property {key} of {other:?}"
                    )))
                }
            };
            props
                .get(key)
                .cloned()
                .map(Cell::Value)
                .ok_or_else(|| EngineError::MissingProperty(format!("{}.{key}", print_expr(base))))
        }
        Expr::Index(base, idx) => {
            let items = match eval_expr(base, cols, row, g)? {
                Cell::Value(Value::List(items)) => items,
                other => {
                    return Err(EngineError::TypeMismatch(format!(
                        "cannot index into {other:?}"
                    )))
                }
            };
            let i = match eval_expr(idx, cols, row, g)? {
                Cell::Value(Value::Int(i)) => i,
                other => {
                    return Err(EngineError::TypeMismatch(format!(
                        "list index must be an integer, got {other:?}"
                    )))
                }
            };
            usize::try_from(i)
                .ok()
                .and_then(|i| items.get(i).cloned())
                .map(Cell::Value)
                .ok_or_else(|| {
                    EngineError::MissingProperty(format!("{}[{i}]", print_expr(base)))
                })
        }
        Expr::Neg(inner) => match eval_value(inner, cols, row, g)? {
            Value::Int(v) => Ok(Cell::Value(Value::Int(v.wrapping_neg()))),
            Value::Float(v) => Ok(Cell::Value(Value::Float(-v))),
            other => Err(EngineError::TypeMismatch(format!(
                "cannot negate {other:?}"
            ))),
        },
        Expr::Binary(op, l, r) => eval_binary(*op, l, r, cols, row, g),
        Expr::Call(func, args) => eval_call(*func, args, cols, row, g),
    }
}

fn eval_value(e: &Expr, cols: &[String], row: &[Cell], g: &Graph) -> Result<Value, EngineError> {
    match eval_expr(e, cols, row, g)? {
        Cell::Value(v) => Ok(v),
        other => Err(EngineError::TypeMismatch(format!(
            "expected a plain value, got {other:?}"
        ))),
    }
}

fn eval_binary(
    op: BinOp,
    l: &Expr,
    r: &Expr,
    cols: &[String],
    row: &[Cell],
    g: &Graph,
) -> Result<Cell, EngineError> {
    use BinOp::*;
    match op {
        And => {
            if !as_bool(eval_value(l, cols, row, g)?)? {
                return Ok(Cell::Value(Value::Bool(false)));
            }
            Ok(Cell::Value(Value::Bool(as_bool(eval_value(
                r, cols, row, g,
            )?)?)))
        }
        Or => {
            if as_bool(eval_value(l, cols, row, g)?)? {
                return Ok(Cell::Value(Value::Bool(true)));
            }
            Ok(Cell::Value(Value::Bool(as_bool(eval_value(
                r, cols, row, g,
            )?)?)))
        }
        Eq | Ne | Lt | Le | Gt | Ge => {
            // absent data fails the comparison rather than the query
            let lhs = match eval_expr(l, cols, row, g) {
                Err(EngineError::MissingProperty(_)) => return Ok(Cell::Value(Value::Bool(false))),
                other => other?,
            };
            let rhs = match eval_expr(r, cols, row, g) {
                Err(EngineError::MissingProperty(_)) => return Ok(Cell::Value(Value::Bool(false))),
                other => other?,
            };
            Ok(Cell::Value(Value::Bool(compare_cells(op, &lhs, &rhs)?)))
        }
        Add | Sub | Mul | Div => {
            let lhs = eval_value(l, cols, row, g)?;
            let rhs = eval_value(r, cols, row, g)?;
            arith(op, &lhs, &rhs).map(Cell::Value)
        }
    }
}

fn as_bool(v: Value) -> Result<bool, EngineError> {
    match v {
        Value::Bool(b) => Ok(b),
        other => Err(EngineError::TypeMismatch(format!(
            "expected a boolean, got {other:?}"
        ))),
    }
}

fn as_f64(v: &Value) -> Option<f64> {
    match v {
        Value::Int(i) => Some(*i as f64),
        Value::Float(f) => Some(*f),
        _ => None,
    }
}

/// Division is always performed in floating point, so threshold ratios
/// like `EdgeCount/EdgeCount <= 1.5` behave the same for integer and float
/// properties.
fn arith(op: BinOp, l: &Value, r: &Value) -> Result<Value, EngineError> {
    use BinOp::*;
    if let (Value::Int(a), Value::Int(b)) = (l, r) {
        match op {
            Add => return Ok(Value::Int(a.wrapping_add(*b))),
            Sub => return Ok(Value::Int(a.wrapping_sub(*b))),
            Mul => return Ok(Value::Int(a.wrapping_mul(*b))),
            Div => return Ok(Value::Float(*a as f64 / *b as f64)),
            _ => unreachable!(),
        }
    }
    match (as_f64(l), as_f64(r)) {
        (Some(a), Some(b)) => Ok(Value::Float(match op {
            Add => a + b,
            Sub => a - b,
            Mul => a * b,
            Div => a / b,
            _ => unreachable!(),
        })),
        _ => Err(EngineError::TypeMismatch(format!(
            "arithmetic needs numbers, got {l:?} and {r:?}"
        ))),
    }
}

/// Structural equality with numeric promotion: 3 equals 3.0 here even
/// though the two are distinct stored values.
fn value_eq(a: &Value, b: &Value) -> bool {
    match (a, b) {
        (Value::Int(x), Value::Int(y)) => x == y,
        (Value::Str(x), Value::Str(y)) => x == y,
        (Value::Bool(x), Value::Bool(y)) => x == y,
        (Value::Null, Value::Null) => true,
        (Value::List(xs), Value::List(ys)) => {
            xs.len() == ys.len() && xs.iter().zip(ys).all(|(x, y)| value_eq(x, y))
        }
        _ => match (as_f64(a), as_f64(b)) {
            (Some(x), Some(y)) => x == y,
            _ => false,
        },
    }
}

fn compare_cells(op: BinOp, l: &Cell, r: &Cell) -> Result<bool, EngineError> {
    use BinOp::*;
    let eq = match (l, r) {
        (Cell::Value(a), Cell::Value(b)) => {
            if matches!(op, Lt | Le | Gt | Ge) {
                return match (as_f64(a), as_f64(b)) {
                    (Some(x), Some(y)) => Ok(match op {
                        Lt => x < y,
                        Le => x <= y,
                        Gt => x > y,
                        Ge => x >= y,
                        _ => unreachable!(),
                    }),
                    _ => match (a, b) {
                        (Value::Str(x), Value::Str(y)) => Ok(match op {
                            Lt => x < y,
                            Le => x <= y,
                            Gt => x > y,
                            Ge => x >= y,
                            _ => unreachable!(),
                        }),
                        _ => Err(EngineError::TypeMismatch(format!(
                            "cannot order {a:?} and {b:?}"
                        ))),
                    },
                };
            }
            value_eq(a, b)
        }
        (Cell::Node(a), Cell::Node(b)) => {
            if matches!(op, Lt | Le | Gt | Ge) {
                return Err(EngineError::TypeMismatch("cannot order nodes".into()));
            }
            a == b
        }
        (Cell::Edge(a), Cell::Edge(b)) => {
            if matches!(op, Lt | Le | Gt | Ge) {
                return Err(EngineError::TypeMismatch("cannot order edges".into()));
            }
            a == b
        }
        (Cell::Path { start: a, end: b }, Cell::Path { start: c, end: d }) => {
            if matches!(op, Lt | Le | Gt | Ge) {
                return Err(EngineError::TypeMismatch("cannot order paths".into()));
            }
            (a, b) == (c, d)
        }
        _ => false,
    };
    Ok(match op {
        Eq => eq,
        Ne => !eq,
        _ => unreachable!("order ops returned early"),
    })
}

fn eval_call(
    func: Func,
    args: &[Expr],
    cols: &[String],
    row: &[Cell],
    g: &Graph,
) -> Result<Cell, EngineError> {
    match func {
        Func::Abs => match eval_value(&args[0], cols, row, g)? {
            Value::Int(v) => Ok(Cell::Value(Value::Int(v.wrapping_abs()))),
            Value::Float(v) => Ok(Cell::Value(Value::Float(v.abs()))),
            other => Err(EngineError::TypeMismatch(format!(
                "abs needs a number, got {other:?}"
            ))),
        },
        Func::Size => match eval_value(&args[0], cols, row, g)? {
            Value::List(items) => Ok(Cell::Value(Value::Int(items.len() as i64))),
            other => Err(EngineError::TypeMismatch(format!(
                "size needs a list, got {other:?}"
            ))),
        },
        Func::ListIntersection => {
            let a = eval_value(&args[0], cols, row, g)?;
            let b = eval_value(&args[1], cols, row, g)?;
            let (Value::List(xs), Value::List(ys)) = (&a, &b) else {
                return Err(EngineError::TypeMismatch(format!(
                    "list_intersection needs two lists, got {a:?} and {b:?}"
                )));
            };
            let mut out: Vec<Value> = Vec::new();
            for x in xs {
                if ys.iter().any(|y| value_eq(x, y)) && !out.iter().any(|o| value_eq(o, x)) {
                    out.push(x.clone());
                }
            }
            Ok(Cell::Value(Value::List(out)))
        }
    }
}
