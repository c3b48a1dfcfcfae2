//! Lexer and recursive-descent parser. Keywords and function names are
//! case-insensitive, identifiers are not. `//` starts a line comment.

use std::fmt;

use super::ast::*;

#[derive(Debug, Clone, PartialEq)]
pub struct ParseError {
    pub line: u32,
    pub col: u32,
    pub found: String,
    pub expected: Vec<String>,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "parse error at line {}, column {}: found {}, expected {}",
            self.line,
            self.col,
            self.found,
            self.expected.join(" | ")
        )
    }
}

impl std::error::Error for ParseError {}

const RESERVED: &[&str] = &[
    "match", "where", "with", "merge", "create", "return", "and", "or",
];

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Ident(String),
    Int(i64),
    Float(f64),
    Str(String),
    LParen,
    RParen,
    LBracket,
    RBracket,
    LBrace,
    RBrace,
    Colon,
    Comma,
    Dot,
    DotDot,
    Star,
    Plus,
    Minus,
    Slash,
    Eq,
    Ne,
    Lt,
    Le,
    Gt,
    Ge,
    ArrowRight,
    ArrowLeft,
    Eof,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("identifier `{s}`"),
            Tok::Int(v) => format!("integer {v}"),
            Tok::Float(v) => format!("number {v:?}"),
            Tok::Str(s) => format!("string {s:?}"),
            Tok::LParen => "`(`".into(),
            Tok::RParen => "`)`".into(),
            Tok::LBracket => "`[`".into(),
            Tok::RBracket => "`]`".into(),
            Tok::LBrace => "`{`".into(),
            Tok::RBrace => "`}`".into(),
            Tok::Colon => "`:`".into(),
            Tok::Comma => "`,`".into(),
            Tok::Dot => "`.`".into(),
            Tok::DotDot => "`..`".into(),
            Tok::Star => "`*`".into(),
            Tok::Plus => "`+`".into(),
            Tok::Minus => "`-`".into(),
            Tok::Slash => "`/`".into(),
            Tok::Eq => "`=`".into(),
            Tok::Ne => "`<>`".into(),
            Tok::Lt => "`<`".into(),
            Tok::Le => "`<=`".into(),
            Tok::Gt => "`>`".into(),
            Tok::Ge => "`>=`".into(),
            Tok::ArrowRight => "`->`".into(),
            Tok::ArrowLeft => "`<-`".into(),
            Tok::Eof => "end of input".into(),
        }
    }
}

struct Lexed {
    tok: Tok,
    line: u32,
    col: u32,
}

fn lex(text: &str) -> Result<Vec<Lexed>, ParseError> {
    let mut out = Vec::new();
    let chars: Vec<char> = text.chars().collect();
    let mut i = 0usize;
    let mut line = 1u32;
    let mut col = 1u32;
    macro_rules! push {
        ($tok:expr, $line:expr, $col:expr) => {
            out.push(Lexed {
                tok: $tok,
                line: $line,
                col: $col,
            })
        };
    }
    while i < chars.len() {
        let c = chars[i];
        let (tl, tc) = (line, col);
        let advance = |n: usize, i: &mut usize, col: &mut u32| {
            *i += n;
            *col += n as u32;
        };
        match c {
            '\n' => {
                i += 1;
                line += 1;
                col = 1;
            }
            c if c.is_whitespace() => advance(1, &mut i, &mut col),
            '/' if chars.get(i + 1) == Some(&'/') => {
                while i < chars.len() && chars[i] != '\n' {
                    i += 1;
                }
            }
            c if c.is_ascii_alphabetic() || c == '_' => {
                let start = i;
                while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                    i += 1;
                }
                col += (i - start) as u32;
                push!(Tok::Ident(chars[start..i].iter().collect()), tl, tc);
            }
            c if c.is_ascii_digit() => {
                let start = i;
                while i < chars.len() && chars[i].is_ascii_digit() {
                    i += 1;
                }
                let mut is_float = false;
                // a dot starts a fraction only when not `..` and a digit follows
                if chars.get(i) == Some(&'.')
                    && chars.get(i + 1).is_some_and(|d| d.is_ascii_digit())
                {
                    is_float = true;
                    i += 1;
                    while i < chars.len() && chars[i].is_ascii_digit() {
                        i += 1;
                    }
                }
                if chars.get(i).is_some_and(|&e| e == 'e' || e == 'E') {
                    let mut j = i + 1;
                    if chars.get(j).is_some_and(|&s| s == '+' || s == '-') {
                        j += 1;
                    }
                    if chars.get(j).is_some_and(|d| d.is_ascii_digit()) {
                        is_float = true;
                        i = j;
                        while i < chars.len() && chars[i].is_ascii_digit() {
                            i += 1;
                        }
                    }
                }
                let text: String = chars[start..i].iter().collect();
                col += (i - start) as u32;
                if is_float {
                    push!(Tok::Float(text.parse().expect("lexed float")), tl, tc);
                } else {
                    match text.parse() {
                        Ok(v) => push!(Tok::Int(v), tl, tc),
                        Err(_) => {
                            return Err(ParseError {
                                line: tl,
                                col: tc,
                                found: format!("integer literal `{text}`"),
                                expected: vec!["integer within 64-bit range".into()],
                            })
                        }
                    }
                }
            }
            '"' | '\'' => {
                let quote = c;
                let mut s = String::new();
                let mut j = i + 1;
                let mut closed = false;
                while j < chars.len() {
                    match chars[j] {
                        '\\' if j + 1 < chars.len() => {
                            s.push(chars[j + 1]);
                            j += 2;
                        }
                        q if q == quote => {
                            closed = true;
                            j += 1;
                            break;
                        }
                        '\n' => break,
                        other => {
                            s.push(other);
                            j += 1;
                        }
                    }
                }
                if !closed {
                    return Err(ParseError {
                        line: tl,
                        col: tc,
                        found: "unterminated string".into(),
                        expected: vec![format!("closing `{quote}`")],
                    });
                }
                col += (j - i) as u32;
                i = j;
                push!(Tok::Str(s), tl, tc);
            }
            _ => {
                let two = |a: char| chars.get(i + 1) == Some(&a);
                let (tok, len) = match c {
                    '-' if two('>') => (Tok::ArrowRight, 2),
                    '<' if two('-') => (Tok::ArrowLeft, 2),
                    '<' if two('>') => (Tok::Ne, 2),
                    '<' if two('=') => (Tok::Le, 2),
                    '>' if two('=') => (Tok::Ge, 2),
                    '.' if two('.') => (Tok::DotDot, 2),
                    '(' => (Tok::LParen, 1),
                    ')' => (Tok::RParen, 1),
                    '[' => (Tok::LBracket, 1),
                    ']' => (Tok::RBracket, 1),
                    '{' => (Tok::LBrace, 1),
                    '}' => (Tok::RBrace, 1),
                    ':' => (Tok::Colon, 1),
                    ',' => (Tok::Comma, 1),
                    '.' => (Tok::Dot, 1),
                    '*' => (Tok::Star, 1),
                    '+' => (Tok::Plus, 1),
                    '-' => (Tok::Minus, 1),
                    '/' => (Tok::Slash, 1),
                    '=' => (Tok::Eq, 1),
                    '<' => (Tok::Lt, 1),
                    '>' => (Tok::Gt, 1),
                    other => {
                        return Err(ParseError {
                            line: tl,
                            col: tc,
                            found: format!("character `{other}`"),
                            expected: vec!["a token".into()],
                        })
                    }
                };
                advance(len, &mut i, &mut col);
                push!(tok, tl, tc);
            }
        }
    }
    push!(Tok::Eof, line, col);
    Ok(out)
}

pub fn parse(text: &str) -> Result<QueryScript, ParseError> {
    let mut p = Parser {
        toks: lex(text)?,
        pos: 0,
    };
    let mut statements = Vec::new();
    while p.peek() != &Tok::Eof {
        statements.push(p.statement()?);
    }
    if statements.is_empty() {
        return Err(p.error(&["MATCH", "MERGE", "CREATE", "RETURN"]));
    }
    Ok(QueryScript { statements })
}

struct Parser {
    toks: Vec<Lexed>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    fn peek_at(&self, ahead: usize) -> &Tok {
        let i = (self.pos + ahead).min(self.toks.len() - 1);
        &self.toks[i].tok
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].tok.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn error(&self, expected: &[&str]) -> ParseError {
        let at = &self.toks[self.pos];
        ParseError {
            line: at.line,
            col: at.col,
            found: at.tok.describe(),
            expected: expected.iter().map(|s| s.to_string()).collect(),
        }
    }

    fn expect(&mut self, tok: Tok, expected: &str) -> Result<(), ParseError> {
        if self.peek() == &tok {
            self.bump();
            Ok(())
        } else {
            Err(self.error(&[expected]))
        }
    }

    /// Consumes an identifier matching `kw` case-insensitively.
    fn keyword(&mut self, kw: &str) -> bool {
        if self.peek_keyword(kw) {
            self.bump();
            true
        } else {
            false
        }
    }

    fn peek_keyword(&self, kw: &str) -> bool {
        matches!(self.peek(), Tok::Ident(s) if s.eq_ignore_ascii_case(kw))
    }

    fn ident(&mut self, what: &str) -> Result<String, ParseError> {
        match self.peek() {
            Tok::Ident(s) if !RESERVED.contains(&s.to_ascii_lowercase().as_str()) => {
                let s = s.clone();
                self.bump();
                Ok(s)
            }
            _ => Err(self.error(&[what])),
        }
    }

    fn statement(&mut self) -> Result<Statement, ParseError> {
        if self.keyword("match") {
            let mut patterns = vec![self.pattern()?];
            while self.peek() == &Tok::Comma {
                self.bump();
                patterns.push(self.pattern()?);
            }
            let where_expr = if self.keyword("where") {
                Some(self.expr()?)
            } else {
                None
            };
            let with_vars = if self.keyword("with") {
                let mut vars = vec![self.ident("variable")?];
                while self.peek() == &Tok::Comma {
                    self.bump();
                    vars.push(self.ident("variable")?);
                }
                Some(vars)
            } else {
                None
            };
            Ok(Statement::Match {
                patterns,
                where_expr,
                with_vars,
            })
        } else if self.keyword("merge") {
            Ok(Statement::Merge { node: self.node()? })
        } else if self.keyword("create") {
            Ok(Statement::Create {
                pattern: self.pattern()?,
            })
        } else if self.keyword("return") {
            let mut items = vec![self.expr()?];
            while self.peek() == &Tok::Comma {
                self.bump();
                items.push(self.expr()?);
            }
            Ok(Statement::Return { items })
        } else {
            Err(self.error(&["MATCH", "MERGE", "CREATE", "RETURN"]))
        }
    }

    fn pattern(&mut self) -> Result<Pattern, ParseError> {
        let path_var = if matches!(self.peek(), Tok::Ident(_)) && self.peek_at(1) == &Tok::Eq {
            let v = self.ident("path variable")?;
            self.bump(); // =
            Some(v)
        } else {
            None
        };
        let start = self.node()?;
        let mut steps = Vec::new();
        while matches!(self.peek(), Tok::Minus | Tok::ArrowLeft) {
            let rel = self.rel()?;
            let node = self.node()?;
            steps.push((rel, node));
        }
        Ok(Pattern {
            path_var,
            start,
            steps,
        })
    }

    fn node(&mut self) -> Result<NodePattern, ParseError> {
        self.expect(Tok::LParen, "`(`")?;
        let var = if matches!(self.peek(), Tok::Ident(_)) {
            Some(self.ident("variable")?)
        } else {
            None
        };
        let label = if self.peek() == &Tok::Colon {
            self.bump();
            Some(self.ident("label")?)
        } else {
            None
        };
        let mut props = Vec::new();
        if self.peek() == &Tok::LBrace {
            self.bump();
            loop {
                let key = self.ident("property name")?;
                self.expect(Tok::Colon, "`:`")?;
                props.push((key, self.expr()?));
                if self.peek() == &Tok::Comma {
                    self.bump();
                } else {
                    break;
                }
            }
            self.expect(Tok::RBrace, "`}`")?;
        }
        self.expect(Tok::RParen, "`)`")?;
        Ok(NodePattern { var, label, props })
    }

    fn rel(&mut self) -> Result<RelPattern, ParseError> {
        let from_left = match self.bump() {
            Tok::Minus => true,
            Tok::ArrowLeft => false,
            _ => return Err(self.error(&["`-`", "`<-`"])),
        };
        self.expect(Tok::LBracket, "`[`")?;
        let var = if matches!(self.peek(), Tok::Ident(_)) {
            Some(self.ident("variable")?)
        } else {
            None
        };
        let etype = if self.peek() == &Tok::Colon {
            self.bump();
            Some(self.ident("relationship type")?)
        } else {
            None
        };
        let hops = if self.peek() == &Tok::Star {
            self.bump();
            let min = if let Tok::Int(v) = self.peek() {
                let v = *v;
                self.bump();
                u32::try_from(v).map_err(|_| self.error(&["non-negative hop count"]))?
            } else {
                1
            };
            self.expect(Tok::DotDot, "`..`")?;
            let max = if let Tok::Int(v) = self.peek() {
                let v = *v;
                self.bump();
                Some(u32::try_from(v).map_err(|_| self.error(&["non-negative hop count"]))?)
            } else {
                None
            };
            Some((min, max))
        } else {
            None
        };
        if hops.is_some() && var.is_some() {
            return Err(self.error(&["unnamed variable-length relationship"]));
        }
        self.expect(Tok::RBracket, "`]`")?;
        let dir = if from_left {
            match self.bump() {
                Tok::ArrowRight => RelDir::Right,
                Tok::Minus => RelDir::Undirected,
                _ => return Err(self.error(&["`->`", "`-`"])),
            }
        } else {
            self.expect(Tok::Minus, "`-`")?;
            RelDir::Left
        };
        Ok(RelPattern {
            var,
            etype,
            dir,
            hops,
        })
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        self.or_expr()
    }

    fn or_expr(&mut self) -> Result<Expr, ParseError> {
        let mut l = self.and_expr()?;
        while self.keyword("or") {
            let r = self.and_expr()?;
            l = Expr::Binary(BinOp::Or, Box::new(l), Box::new(r));
        }
        Ok(l)
    }

    fn and_expr(&mut self) -> Result<Expr, ParseError> {
        let mut l = self.cmp_expr()?;
        while self.keyword("and") {
            let r = self.cmp_expr()?;
            l = Expr::Binary(BinOp::And, Box::new(l), Box::new(r));
        }
        Ok(l)
    }

    fn cmp_expr(&mut self) -> Result<Expr, ParseError> {
        let mut l = self.add_expr()?;
        loop {
            let op = match self.peek() {
                Tok::Eq => BinOp::Eq,
                Tok::Ne => BinOp::Ne,
                Tok::Lt => BinOp::Lt,
                Tok::Le => BinOp::Le,
                Tok::Gt => BinOp::Gt,
                Tok::Ge => BinOp::Ge,
                _ => break,
            };
            self.bump();
            let r = self.add_expr()?;
            l = Expr::Binary(op, Box::new(l), Box::new(r));
        }
        Ok(l)
    }

    fn add_expr(&mut self) -> Result<Expr, ParseError> {
        let mut l = self.mul_expr()?;
        loop {
            let op = match self.peek() {
                Tok::Plus => BinOp::Add,
                Tok::Minus => BinOp::Sub,
                _ => break,
            };
            self.bump();
            let r = self.mul_expr()?;
            l = Expr::Binary(op, Box::new(l), Box::new(r));
        }
        Ok(l)
    }

    fn mul_expr(&mut self) -> Result<Expr, ParseError> {
        let mut l = self.unary_expr()?;
        loop {
            let op = match self.peek() {
                Tok::Star => BinOp::Mul,
                Tok::Slash => BinOp::Div,
                _ => break,
            };
            self.bump();
            let r = self.unary_expr()?;
            l = Expr::Binary(op, Box::new(l), Box::new(r));
        }
        Ok(l)
    }

    fn unary_expr(&mut self) -> Result<Expr, ParseError> {
        if self.peek() == &Tok::Minus {
            self.bump();
            Ok(Expr::Neg(Box::new(self.unary_expr()?)))
        } else {
            self.postfix_expr()
        }
    }

    fn postfix_expr(&mut self) -> Result<Expr, ParseError> {
        let mut e = self.primary()?;
        loop {
            match self.peek() {
                Tok::Dot => {
                    self.bump();
                    let key = self.ident("property name")?;
                    e = Expr::Prop(Box::new(e), key);
                }
                Tok::LBracket => {
                    self.bump();
                    let idx = self.expr()?;
                    self.expect(Tok::RBracket, "`]`")?;
                    e = Expr::Index(Box::new(e), Box::new(idx));
                }
                Tok::LParen => {
                    let func = self.resolve_func(&e)?;
                    self.bump();
                    let mut args = Vec::new();
                    if self.peek() != &Tok::RParen {
                        args.push(self.expr()?);
                        while self.peek() == &Tok::Comma {
                            self.bump();
                            args.push(self.expr()?);
                        }
                    }
                    self.expect(Tok::RParen, "`)`")?;
                    let arity = match func {
                        Func::Abs | Func::Size => 1,
                        Func::ListIntersection => 2,
                    };
                    if args.len() != arity {
                        return Err(self.error(&[&format!("{arity} argument(s)")]));
                    }
                    e = Expr::Call(func, args);
                }
                _ => break,
            }
        }
        Ok(e)
    }

    /// A call target is a bare name or the `apoc.coll.intersection` chain.
    fn resolve_func(&self, e: &Expr) -> Result<Func, ParseError> {
        fn path<'e>(e: &'e Expr, out: &mut Vec<&'e str>) -> bool {
            match e {
                Expr::Var(v) => {
                    out.push(v);
                    true
                }
                Expr::Prop(base, key) => {
                    if !path(base, out) {
                        return false;
                    }
                    out.push(key);
                    true
                }
                _ => false,
            }
        }
        let mut segs = Vec::new();
        if path(e, &mut segs) {
            let lower: Vec<String> = segs.iter().map(|s| s.to_ascii_lowercase()).collect();
            let joined = lower.join(".");
            match joined.as_str() {
                "abs" => return Ok(Func::Abs),
                "size" => return Ok(Func::Size),
                "list_intersection" | "apoc.coll.intersection" => {
                    return Ok(Func::ListIntersection)
                }
                _ => {}
            }
        }
        Err(self.error(&["abs", "size", "list_intersection", "apoc.coll.intersection"]))
    }

    fn primary(&mut self) -> Result<Expr, ParseError> {
        match self.peek().clone() {
            Tok::Int(v) => {
                self.bump();
                Ok(Expr::Int(v))
            }
            Tok::Float(v) => {
                self.bump();
                Ok(Expr::Float(v))
            }
            Tok::Str(s) => {
                self.bump();
                Ok(Expr::Str(s))
            }
            Tok::Ident(s) if !RESERVED.contains(&s.to_ascii_lowercase().as_str()) => {
                self.bump();
                Ok(Expr::Var(s))
            }
            Tok::LParen => {
                self.bump();
                let e = self.expr()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(e)
            }
            Tok::LBracket => {
                self.bump();
                let mut items = Vec::new();
                if self.peek() != &Tok::RBracket {
                    items.push(self.expr()?);
                    while self.peek() == &Tok::Comma {
                        self.bump();
                        items.push(self.expr()?);
                    }
                }
                self.expect(Tok::RBracket, "`]`")?;
                Ok(Expr::List(items))
            }
            _ => Err(self.error(&["expression"])),
        }
    }
}
