//! Canonical script formatting. Printing then reparsing yields a
//! structurally identical AST; printing is idempotent on its own output.

use std::fmt::Write;

use super::ast::*;

pub fn print_script(script: &QueryScript) -> String {
    let mut out = String::new();
    for st in &script.statements {
        match st {
            Statement::Match {
                patterns,
                where_expr,
                with_vars,
            } => {
                let pats: Vec<String> = patterns.iter().map(print_pattern).collect();
                let _ = writeln!(out, "MATCH {}", pats.join(", "));
                if let Some(w) = where_expr {
                    let _ = writeln!(out, "WHERE {}", print_expr(w));
                }
                if let Some(vars) = with_vars {
                    let _ = writeln!(out, "WITH {}", vars.join(", "));
                }
            }
            Statement::Merge { node } => {
                let _ = writeln!(out, "MERGE {}", print_node(node));
            }
            Statement::Create { pattern } => {
                let _ = writeln!(out, "CREATE {}", print_pattern(pattern));
            }
            Statement::Return { items } => {
                let items: Vec<String> = items.iter().map(print_expr).collect();
                let _ = writeln!(out, "RETURN {}", items.join(", "));
            }
        }
    }
    out
}

fn print_pattern(p: &Pattern) -> String {
    let mut out = String::new();
    if let Some(v) = &p.path_var {
        let _ = write!(out, "{v} = ");
    }
    out.push_str(&print_node(&p.start));
    for (rel, node) in &p.steps {
        out.push_str(&print_rel(rel));
        out.push_str(&print_node(node));
    }
    out
}

fn print_node(n: &NodePattern) -> String {
    let mut body = String::new();
    if let Some(v) = &n.var {
        body.push_str(v);
    }
    if let Some(l) = &n.label {
        let _ = write!(body, ":{l}");
    }
    if !n.props.is_empty() {
        if !body.is_empty() {
            body.push(' ');
        }
        let props: Vec<String> = n
            .props
            .iter()
            .map(|(k, e)| format!("{k}: {}", print_expr(e)))
            .collect();
        let _ = write!(body, "{{{}}}", props.join(", "));
    }
    format!("({body})")
}

fn print_rel(r: &RelPattern) -> String {
    let mut body = String::new();
    if let Some(v) = &r.var {
        body.push_str(v);
    }
    if let Some(t) = &r.etype {
        let _ = write!(body, ":{t}");
    }
    if let Some((min, max)) = r.hops {
        let _ = write!(body, "*{min}..");
        if let Some(max) = max {
            let _ = write!(body, "{max}");
        }
    }
    match r.dir {
        RelDir::Right => format!("-[{body}]->"),
        RelDir::Left => format!("<-[{body}]-"),
        RelDir::Undirected => format!("-[{body}]-"),
    }
}

pub fn print_expr(e: &Expr) -> String {
    let mut out = String::new();
    write_expr(&mut out, e);
    out
}

/// Precedence used for minimal parenthesization; larger binds tighter.
fn prec(e: &Expr) -> u8 {
    match e {
        Expr::Binary(op, ..) => match op {
            BinOp::Or => 1,
            BinOp::And => 2,
            BinOp::Eq | BinOp::Ne | BinOp::Lt | BinOp::Le | BinOp::Gt | BinOp::Ge => 3,
            BinOp::Add | BinOp::Sub => 4,
            BinOp::Mul | BinOp::Div => 5,
        },
        Expr::Neg(_) => 6,
        Expr::Prop(..) | Expr::Index(..) | Expr::Call(..) => 7,
        Expr::Int(_) | Expr::Float(_) | Expr::Str(_) | Expr::List(_) | Expr::Var(_) => 8,
    }
}

fn op_str(op: BinOp) -> &'static str {
    match op {
        BinOp::Or => "OR",
        BinOp::And => "AND",
        BinOp::Eq => "=",
        BinOp::Ne => "<>",
        BinOp::Lt => "<",
        BinOp::Le => "<=",
        BinOp::Gt => ">",
        BinOp::Ge => ">=",
        BinOp::Add => "+",
        BinOp::Sub => "-",
        BinOp::Mul => "*",
        BinOp::Div => "/",
    }
}

fn write_child(out: &mut String, child: &Expr, parent: u8, is_right: bool) {
    // all binary operators associate left
    let wrap = prec(child) < parent || (prec(child) == parent && is_right);
    if wrap {
        out.push('(');
        write_expr(out, child);
        out.push(')');
    } else {
        write_expr(out, child);
    }
}

fn write_expr(out: &mut String, e: &Expr) {
    match e {
        Expr::Int(v) => {
            let _ = write!(out, "{v}");
        }
        Expr::Float(v) => {
            let _ = write!(out, "{v:?}");
        }
        Expr::Str(s) => {
            let _ = write!(out, "{s:?}");
        }
        Expr::List(items) => {
            out.push('[');
            for (i, it) in items.iter().enumerate() {
                if i > 0 {
                    out.push_str(", ");
                }
                write_expr(out, it);
            }
            out.push(']');
        }
        Expr::Var(v) => out.push_str(v),
        Expr::Prop(base, key) => {
            write_child(out, base, 7, false);
            let _ = write!(out, ".{key}");
        }
        Expr::Index(base, idx) => {
            write_child(out, base, 7, false);
            out.push('[');
            write_expr(out, idx);
            out.push(']');
        }
        Expr::Neg(inner) => {
            out.push('-');
            write_child(out, inner, 7, false);
        }
        Expr::Binary(op, l, r) => {
            let p = prec(e);
            write_child(out, l, p, false);
            let _ = write!(out, " {} ", op_str(*op));
            write_child(out, r, p, true);
        }
        Expr::Call(func, args) => {
            let name = match func {
                Func::Abs => "abs",
                Func::Size => "size",
                Func::ListIntersection => "list_intersection",
            };
            out.push_str(name);
            out.push('(');
            for (i, a) in args.iter().enumerate() {
                if i > 0 {
                    out.push_str(", ");
                }
                write_expr(out, a);
            }
            out.push(')');
        }
    }
}
