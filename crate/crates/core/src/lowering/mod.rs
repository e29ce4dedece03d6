//! Desugaring of ECO constructs into core ECO-mini plus runtime intrinsics.
//!
//! | surface                     | core                                        |
//! |-----------------------------|---------------------------------------------|
//! | extender constructor body   | `eco_attach(support, this, "C", classer);` prologue |
//! | `call_e_method(M, a..)`     | `eco_dispatch(this, "M", [a..])`             |
//! | `obj.{C}`                   | `eco_has(obj, "C")`                          |
//! | `obj.{C}.m(a..)`            | `eco_get(obj, "C").m(a..)`                   |
//! | `delete e`                  | `eco_destroy(e)`                             |
//! | `extend M(p..) {B}`         | `method __eco_b_M(p..) {B}`                  |
//! | `extend M(p..);`            | erased, kept as metadata                     |

mod emit;

pub use emit::{emit, parse_core, CoreParseError, HEADER};

use crate::analysis::{ClassKind, SymbolTable};
use crate::frontend::ast::*;

/// Prefix of lowered E-method behaviors.
pub const BEHAVIOR_PREFIX: &str = "__eco_b_";
pub const REGISTRY_FIELD: &str = "__eco_registry";
pub const SUPPORT_FIELD: &str = "__eco_support";

pub fn behavior_method_name(emethod: &str) -> String {
    format!("{BEHAVIOR_PREFIX}{emethod}")
}

/// One line of the dispatch/metadata side table.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum MetaEntry {
    /// Former `extensible` class.
    Support { class: String },
    Extender { class: String, support: String },
    Classer { class: String, support: String },
    /// `class` defines a behavior for E-method `emethod`.
    Behavior { class: String, emethod: String },
}

/// A lowered, ECO-free program plus its dispatch side table.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct CoreProgram {
    pub module: Module,
    pub meta: Vec<MetaEntry>,
}

/// Lowers an analyzed module. Total on input that passed analysis.
pub fn lower(ast: &Module, table: &SymbolTable) -> CoreProgram {
    let mut out = CoreProgram::default();
    for class in &ast.classes {
        let info = table.get(&class.name);
        let is_classer = matches!(info.map(|i| i.kind), Some(ClassKind::Classer));
        let mut members = Vec::new();

        if class.is_extensible {
            members.push(Member::Field(FieldDecl { pos: class.pos, name: REGISTRY_FIELD.into() }));
            out.meta.push(MetaEntry::Support { class: class.name.clone() });
        }
        if let Some(target) = &class.extend_target {
            members.push(Member::Field(FieldDecl { pos: class.pos, name: SUPPORT_FIELD.into() }));
            let (class_name, support) = (class.name.clone(), target.name.clone());
            out.meta.push(if is_classer {
                MetaEntry::Classer { class: class_name, support }
            } else {
                MetaEntry::Extender { class: class_name, support }
            });
        }

        for member in &class.members {
            match member {
                Member::Field(f) => members.push(Member::Field(f.clone())),
                Member::Method(m) => members.push(Member::Method(MethodDecl {
                    body: lower_block(&m.body),
                    ..m.clone()
                })),
                Member::Ctor(c) => {
                    let mut body = lower_block(&c.body);
                    if let (Some(_), Some(support)) = (&class.extend_target, c.params.first()) {
                        body.stmts.insert(0, attach_prologue(c.pos, support, &class.name, is_classer));
                    }
                    members.push(Member::Ctor(CtorDecl { body, ..c.clone() }));
                }
                Member::EMethodSig(_) => {}
                Member::EMethodBehavior(b) => {
                    out.meta.push(MetaEntry::Behavior { class: class.name.clone(), emethod: b.name.clone() });
                    members.push(Member::Method(MethodDecl {
                        pos: b.pos,
                        name: behavior_method_name(&b.name),
                        is_static: false,
                        params: b.params.clone(),
                        body: lower_block(&b.body),
                    }));
                }
            }
        }

        out.module.classes.push(ClassDecl {
            pos: class.pos,
            file: class.file.clone(),
            name: class.name.clone(),
            is_extensible: false,
            is_classer: false,
            extend_target: None,
            base: class.base.clone(),
            members,
        });
    }
    out
}

fn intrinsic(pos: Pos, func: &str, args: Vec<Expr>) -> Expr {
    Expr::new(pos, ExprKind::Call { func: func.into(), args })
}

fn str_lit(pos: Pos, s: &str) -> Expr {
    Expr::new(pos, ExprKind::Str(s.into()))
}

fn attach_prologue(pos: Pos, support: &str, class: &str, is_classer: bool) -> Stmt {
    let call = intrinsic(
        pos,
        "eco_attach",
        vec![
            Expr::new(pos, ExprKind::Ident(support.into())),
            Expr::new(pos, ExprKind::This),
            str_lit(pos, class),
            Expr::new(pos, ExprKind::Bool(is_classer)),
        ],
    );
    Stmt { pos, kind: StmtKind::Expr(call) }
}

fn lower_block(b: &Block) -> Block {
    Block { stmts: b.stmts.iter().map(lower_stmt).collect() }
}

fn lower_stmt(s: &Stmt) -> Stmt {
    let kind = match &s.kind {
        StmtKind::Var { name, init } => StmtKind::Var { name: name.clone(), init: lower_expr(init) },
        StmtKind::Assign { target, value } => StmtKind::Assign { target: lower_expr(target), value: lower_expr(value) },
        StmtKind::If { cond, then_block, else_block } => StmtKind::If {
            cond: lower_expr(cond),
            then_block: lower_block(then_block),
            else_block: else_block.as_ref().map(lower_block),
        },
        StmtKind::While { cond, body } => StmtKind::While { cond: lower_expr(cond), body: lower_block(body) },
        StmtKind::Return(e) => StmtKind::Return(e.as_ref().map(lower_expr)),
        StmtKind::Throw(e) => StmtKind::Throw(lower_expr(e)),
        StmtKind::Try { body, var, handler } => StmtKind::Try {
            body: lower_block(body),
            var: var.clone(),
            handler: lower_block(handler),
        },
        StmtKind::Delete(e) => StmtKind::Expr(intrinsic(s.pos, "eco_destroy", vec![lower_expr(e)])),
        StmtKind::Expr(e) => StmtKind::Expr(lower_expr(e)),
    };
    Stmt { pos: s.pos, kind }
}

fn lower_exprs(es: &[Expr]) -> Vec<Expr> {
    es.iter().map(lower_expr).collect()
}

fn lower_expr(e: &Expr) -> Expr {
    use ExprKind::*;
    let pos = e.pos;
    let kind = match &e.kind {
        Int(_) | Str(_) | Bool(_) | Null | This | Ident(_) => e.kind.clone(),
        List(items) => List(lower_exprs(items)),
        New { class, args } => New { class: class.clone(), args: lower_exprs(args) },
        Field { obj, name } => Field { obj: Box::new(lower_expr(obj)), name: name.clone() },
        MethodCall { obj, method, args } => MethodCall {
            obj: Box::new(lower_expr(obj)),
            method: method.clone(),
            args: lower_exprs(args),
        },
        Index { obj, index } => Index { obj: Box::new(lower_expr(obj)), index: Box::new(lower_expr(index)) },
        Call { func, args } => Call { func: func.clone(), args: lower_exprs(args) },
        Unary { op, expr } => Unary { op: *op, expr: Box::new(lower_expr(expr)) },
        Binary { op, lhs, rhs } => Binary { op: *op, lhs: Box::new(lower_expr(lhs)), rhs: Box::new(lower_expr(rhs)) },
        ClasserTest { obj, classer } => Call {
            func: "eco_has".into(),
            args: vec![lower_expr(obj), str_lit(pos, classer)],
        },
        ClasserAccess { obj, classer, method, args } => MethodCall {
            obj: Box::new(intrinsic(pos, "eco_get", vec![lower_expr(obj), str_lit(pos, classer)])),
            method: method.clone(),
            args: lower_exprs(args),
        },
        CallEMethod { name, args } => Call {
            func: "eco_dispatch".into(),
            args: vec![
                Expr::new(pos, This),
                str_lit(pos, name),
                Expr::new(pos, List(lower_exprs(args))),
            ],
        },
    };
    Expr::new(pos, kind)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analysis::analyze;
    use crate::frontend::{parse_source, ParseMode};

    fn lowered(src: &str) -> String {
        let m = parse_source(src, "t.eco", ParseMode::Surface).unwrap();
        let t = analyze(&m).unwrap();
        emit(&lower(&m, &t))
    }

    const GRAPH: &str = "extensible class Graph { extend Post_AddVertex(v); method AddVertex(v) { call_e_method(Post_AddVertex, v); } }\n";

    #[test]
    fn dispatch_rewrite() {
        let text = lowered(GRAPH);
        assert!(text.contains("eco_dispatch(this, \"Post_AddVertex\", [v]);"), "{text}");
    }

    #[test]
    fn classer_test_rewrite() {
        let src = format!(
            "{GRAPH}dynamic extend Graph class Connected {{ private constructor(g) {{}} }}\n\
             class Main {{ static method f(g) {{ if (g.{{Connected}}) {{ print(1); }} }} }}"
        );
        let text = lowered(&src);
        assert!(text.contains("if (eco_has(g, \"Connected\")) {"), "{text}");
    }

    #[test]
    fn classer_ctor_prologue() {
        let src = format!("{GRAPH}dynamic extend Graph class Planar {{ var x; private constructor(g) {{ this.x = 0; }} }}");
        let text = lowered(&src);
        assert!(
            text.contains("    private constructor(g) {\n        eco_attach(g, this, \"Planar\", true);\n        this.x = 0;\n    }"),
            "{text}"
        );
        assert!(text.contains("//#eco-meta classer Planar Graph"));
    }

    #[test]
    fn behavior_and_delete_rewrite() {
        let src = format!(
            "{GRAPH}extend Graph class L {{ constructor(g) {{}} extend Post_AddVertex(v) {{ delete this; }} }}"
        );
        let text = lowered(&src);
        assert!(text.contains("method __eco_b_Post_AddVertex(v) {\n        eco_destroy(this);"), "{text}");
        assert!(text.contains("//#eco-meta behavior L Post_AddVertex"));
        assert!(text.contains("var __eco_support;"));
        assert!(text.contains("var __eco_registry;"));
        assert!(!text.contains("extend "));
    }
}
