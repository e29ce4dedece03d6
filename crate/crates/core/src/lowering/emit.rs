//! Canonical text form of a [`CoreProgram`].

use std::fmt::Write;

use thiserror::Error;

use super::{CoreProgram, MetaEntry};
use crate::diagnostic::Diagnostic;
use crate::frontend::ast::*;
use crate::frontend::token::escape;
use crate::frontend::{parse_source, ParseMode};

pub const HEADER: &str = "// eco-core v1";
const META_PREFIX: &str = "//#eco-meta ";
const INDENT: &str = "    ";
const UNARY_PREC: u8 = 7;
const POSTFIX_PREC: u8 = 8;

/// Pretty-prints a core program. Output depends only on the program, so it
/// is byte-identical across runs and platforms.
pub fn emit(core: &CoreProgram) -> String {
    let mut out = String::new();
    out.push_str(HEADER);
    out.push('\n');
    for class in &core.module.classes {
        out.push('\n');
        class_decl(&mut out, class);
    }
    if !core.meta.is_empty() {
        out.push('\n');
        for entry in &core.meta {
            out.push_str(META_PREFIX);
            out.push_str(&meta_line(entry));
            out.push('\n');
        }
    }
    out
}

fn meta_line(entry: &MetaEntry) -> String {
    match entry {
        MetaEntry::Support { class } => format!("support {class}"),
        MetaEntry::Extender { class, support } => format!("extender {class} {support}"),
        MetaEntry::Classer { class, support } => format!("classer {class} {support}"),
        MetaEntry::Behavior { class, emethod } => format!("behavior {class} {emethod}"),
    }
}

fn parse_meta_line(line: &str) -> Option<MetaEntry> {
    let words: Vec<&str> = line.split(' ').collect();
    let s = |i: usize| words[i].to_string();
    Some(match (words.first().copied()?, words.len()) {
        ("support", 2) => MetaEntry::Support { class: s(1) },
        ("extender", 3) => MetaEntry::Extender { class: s(1), support: s(2) },
        ("classer", 3) => MetaEntry::Classer { class: s(1), support: s(2) },
        ("behavior", 3) => MetaEntry::Behavior { class: s(1), emethod: s(2) },
        _ => return None,
    })
}

#[derive(Debug, Error)]
pub enum CoreParseError {
    #[error("missing '{HEADER}' header line")]
    MissingHeader,
    #[error("malformed metadata line {line}: {text}")]
    BadMeta { line: usize, text: String },
    #[error("core text does not parse:\n{}", crate::diagnostic::render(.0))]
    Syntax(Vec<Diagnostic>),
}

/// Parses emitted core text back into a [`CoreProgram`].
pub fn parse_core(text: &str, file: &str) -> Result<CoreProgram, CoreParseError> {
    if text.lines().next() != Some(HEADER) {
        return Err(CoreParseError::MissingHeader);
    }
    let mut meta = Vec::new();
    for (i, line) in text.lines().enumerate() {
        if let Some(rest) = line.strip_prefix(META_PREFIX) {
            meta.push(parse_meta_line(rest).ok_or_else(|| CoreParseError::BadMeta {
                line: i + 1,
                text: line.to_string(),
            })?);
        }
    }
    let module = parse_source(text, file, ParseMode::Core).map_err(CoreParseError::Syntax)?;
    Ok(CoreProgram { module, meta })
}

fn indent(out: &mut String, depth: usize) {
    for _ in 0..depth {
        out.push_str(INDENT);
    }
}

fn params(ps: &[String]) -> String {
    ps.join(", ")
}

fn class_decl(out: &mut String, c: &ClassDecl) {
    let _ = write!(out, "class {}", c.name);
    if let Some(base) = &c.base {
        let _ = write!(out, " extends {}", base.name);
    }
    out.push_str(" {\n");
    for m in &c.members {
        indent(out, 1);
        match m {
            Member::Field(f) => {
                let _ = writeln!(out, "var {};", f.name);
            }
            Member::Method(m) => {
                if m.is_static {
                    out.push_str("static ");
                }
                let _ = write!(out, "method {}({}) ", m.name, params(&m.params));
                block(out, &m.body, 1);
                out.push('\n');
            }
            Member::Ctor(c) => {
                if c.is_private {
                    out.push_str("private ");
                }
                let _ = write!(out, "constructor({}) ", params(&c.params));
                block(out, &c.body, 1);
                out.push('\n');
            }
            // Lowered programs never contain these; printed in surface syntax
            // so the printer stays total.
            Member::EMethodSig(s) => {
                let _ = writeln!(out, "extend {}({});", s.name, params(&s.params));
            }
            Member::EMethodBehavior(b) => {
                let _ = write!(out, "extend {}({}) ", b.name, params(&b.params));
                block(out, &b.body, 1);
                out.push('\n');
            }
        }
    }
    out.push_str("}\n");
}

/// Writes `{`, the statements one per line, and the closing `}` at `depth`.
fn block(out: &mut String, b: &Block, depth: usize) {
    out.push_str("{\n");
    for s in &b.stmts {
        stmt(out, s, depth + 1);
    }
    indent(out, depth);
    out.push('}');
}

fn stmt(out: &mut String, s: &Stmt, depth: usize) {
    indent(out, depth);
    match &s.kind {
        StmtKind::Var { name, init } => {
            let _ = writeln!(out, "var {name} = {};", expr(init));
        }
        StmtKind::Assign { target, value } => {
            let _ = writeln!(out, "{} = {};", expr(target), expr(value));
        }
        StmtKind::If { cond, then_block, else_block } => {
            let _ = write!(out, "if ({}) ", expr(cond));
            block(out, then_block, depth);
            if let Some(e) = else_block {
                out.push_str(" else ");
                block(out, e, depth);
            }
            out.push('\n');
        }
        StmtKind::While { cond, body } => {
            let _ = write!(out, "while ({}) ", expr(cond));
            block(out, body, depth);
            out.push('\n');
        }
        StmtKind::Return(None) => out.push_str("return;\n"),
        StmtKind::Return(Some(e)) => {
            let _ = writeln!(out, "return {};", expr(e));
        }
        StmtKind::Throw(e) => {
            let _ = writeln!(out, "throw {};", expr(e));
        }
        StmtKind::Try { body, var, handler } => {
            out.push_str("try ");
            block(out, body, depth);
            let _ = write!(out, " catch ({var}) ");
            block(out, handler, depth);
            out.push('\n');
        }
        StmtKind::Delete(e) => {
            let _ = writeln!(out, "delete {};", expr(e));
        }
        StmtKind::Expr(e) => {
            let _ = writeln!(out, "{};", expr(e));
        }
    }
}

fn args(es: &[Expr]) -> String {
    es.iter().map(expr).collect::<Vec<_>>().join(", ")
}

fn precedence(e: &Expr) -> u8 {
    match &e.kind {
        ExprKind::Binary { op, .. } => op.precedence(),
        ExprKind::Unary { .. } => UNARY_PREC,
        _ => POSTFIX_PREC,
    }
}

fn expr_at(e: &Expr, min: u8) -> String {
    let s = expr(e);
    if precedence(e) < min {
        format!("({s})")
    } else {
        s
    }
}

/// Prints an expression with the minimal parentheses needed to re-parse it
/// into the same tree.
pub fn expr(e: &Expr) -> String {
    use ExprKind::*;
    match &e.kind {
        Int(n) => n.to_string(),
        Str(s) => escape(s),
        Bool(b) => b.to_string(),
        Null => "null".into(),
        This => "this".into(),
        Ident(n) => n.clone(),
        List(items) => format!("[{}]", args(items)),
        New { class, args: a } => format!("new {class}({})", args(a)),
        Field { obj, name } => format!("{}.{name}", expr_at(obj, POSTFIX_PREC)),
        MethodCall { obj, method, args: a } => format!("{}.{method}({})", expr_at(obj, POSTFIX_PREC), args(a)),
        Index { obj, index } => format!("{}[{}]", expr_at(obj, POSTFIX_PREC), expr(index)),
        Call { func, args: a } => format!("{func}({})", args(a)),
        Unary { op, expr: inner } => {
            let sym = match op {
                UnaryOp::Not => "!",
                UnaryOp::Neg => "-",
            };
            format!("{sym}{}", expr_at(inner, UNARY_PREC))
        }
        Binary { op, lhs, rhs } => format!(
            "{} {} {}",
            expr_at(lhs, op.precedence()),
            op.symbol(),
            expr_at(rhs, op.precedence() + 1)
        ),
        ClasserTest { obj, classer } => format!("{}.{{{classer}}}", expr_at(obj, POSTFIX_PREC)),
        ClasserAccess { obj, classer, method, args: a } => {
            format!("{}.{{{classer}}}.{method}({})", expr_at(obj, POSTFIX_PREC), args(a))
        }
        CallEMethod { name, args: a } => {
            if a.is_empty() {
                format!("call_e_method({name})")
            } else {
                format!("call_e_method({name}, {})", args(a))
            }
        }
    }
}
