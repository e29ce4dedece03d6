use super::symbols::{ClassKind, SymbolTable};
use crate::diagnostic::{sort_diagnostics, Code, Diagnostic};
use crate::frontend::ast::*;

struct Checker<'a> {
    table: &'a SymbolTable,
    class: &'a ClassDecl,
    diags: Vec<Diagnostic>,
}

impl Checker<'_> {
    fn report(&mut self, code: Code, msg: String, pos: Pos) {
        self.diags.push(Diagnostic::new(code, msg, &self.class.file, pos.line, pos.col));
    }
}

/// Checks the declaration-level ECO rules (E010-E023) against a resolved
/// module. Returns an empty list iff every rule holds.
pub fn check_eco_rules(module: &Module, table: &SymbolTable) -> Vec<Diagnostic> {
    let mut diags = Vec::new();
    for class in &module.classes {
        let mut ck = Checker { table, class, diags: Vec::new() };
        check_class(&mut ck);
        diags.append(&mut ck.diags);
    }
    sort_diagnostics(&mut diags);
    diags
}

fn check_class(ck: &mut Checker<'_>) {
    let class = ck.class;
    let table = ck.table;

    if class.is_classer && class.extend_target.is_none() {
        ck.report(
            Code::E020,
            format!("'dynamic' class '{}' has no 'extend' head", class.name),
            class.pos,
        );
    }

    // Support-class validity gates the member checks below so one bad head
    // does not cascade into E011 noise.
    let mut support_ok = false;
    if let Some(target) = &class.extend_target {
        if table.get(&target.name).is_some() {
            if table.is_extensible(&target.name) {
                support_ok = true;
            } else {
                ck.report(
                    Code::E010,
                    format!("class '{}' is not declared extensible", target.name),
                    target.pos,
                );
            }
        }
    }

    let is_ext_class = class.extend_target.is_some();
    let is_classer = class.is_classer && is_ext_class;
    let extensible = table.is_extensible(&class.name);

    if is_ext_class && !class.members.iter().any(|m| matches!(m, Member::Ctor(_))) {
        ck.report(
            Code::E013,
            format!("extender '{}' needs a constructor taking the support-object first", class.name),
            class.pos,
        );
    }

    for member in &class.members {
        match member {
            Member::EMethodSig(sig) if !class.is_extensible => {
                ck.report(
                    Code::E023,
                    format!("E-method '{}' declared in non-extensible class '{}'", sig.name, class.name),
                    sig.pos,
                );
            }
            Member::EMethodBehavior(b) => {
                let matched = match &class.extend_target {
                    Some(t) if support_ok => table.emethod_arity(&t.name, &b.name) == Some(b.params.len()),
                    Some(_) => true,
                    None => false,
                };
                if !matched {
                    let target = class.extend_target.as_ref().map_or("<none>", |t| t.name.as_str());
                    ck.report(
                        Code::E011,
                        format!(
                            "behavior '{}/{}' has no matching E-method signature in support-class '{}'",
                            b.name,
                            b.params.len(),
                            target
                        ),
                        b.pos,
                    );
                }
                check_body(ck, &b.body, Some(&class.name), extensible, None);
            }
            Member::Ctor(c) => {
                if is_ext_class && c.params.is_empty() {
                    ck.report(
                        Code::E013,
                        format!("constructor of '{}' must take the support-object as first parameter", class.name),
                        c.pos,
                    );
                }
                if is_classer && !c.is_private {
                    ck.report(
                        Code::E021,
                        format!("classer '{}' has a non-private constructor", class.name),
                        c.pos,
                    );
                }
                let support_param = match (&class.extend_target, c.params.first()) {
                    (Some(t), Some(p)) if !rebinds(&c.body, p) => Some((p.as_str(), t.name.as_str())),
                    _ => None,
                };
                check_body(ck, &c.body, Some(&class.name), extensible, support_param);
            }
            Member::Method(m) => {
                let this_class = (!m.is_static).then_some(class.name.as_str());
                check_body(ck, &m.body, this_class, extensible && !m.is_static, None);
            }
            _ => {}
        }
    }
}

/// True if `name` is redeclared or reassigned anywhere in `body`.
fn rebinds(body: &Block, name: &str) -> bool {
    fn block(b: &Block, name: &str) -> bool {
        b.stmts.iter().any(|s| match &s.kind {
            StmtKind::Var { name: n, .. } => n == name,
            StmtKind::Assign { target, .. } => matches!(&target.kind, ExprKind::Ident(n) if n == name),
            StmtKind::If { then_block, else_block, .. } => {
                block(then_block, name) || else_block.as_ref().is_some_and(|e| block(e, name))
            }
            StmtKind::While { body, .. } => block(body, name),
            StmtKind::Try { body, var, handler } => var == name || block(body, name) || block(handler, name),
            _ => false,
        })
    }
    block(body, name)
}

fn check_body(
    ck: &mut Checker<'_>,
    body: &Block,
    this_class: Option<&str>,
    may_dispatch: bool,
    support_param: Option<(&str, &str)>,
) {
    let table = ck.table;
    let class_name = ck.class.name.clone();
    let mut found = Vec::new();
    walk_block_exprs(body, &mut |e| found.push(e));
    for e in found {
        match &e.kind {
            ExprKind::CallEMethod { name, args } => {
                if !may_dispatch {
                    ck.report(
                        Code::E012,
                        format!("call_e_method({name}) outside a method of an extensible class"),
                        e.pos,
                    );
                } else {
                    match table.emethod_arity(&class_name, name) {
                        None => ck.report(
                            Code::E012,
                            format!("'{name}' is not an E-method of class '{class_name}'"),
                            e.pos,
                        ),
                        Some(arity) if arity != args.len() => ck.report(
                            Code::E012,
                            format!("E-method '{name}' expects {arity} argument(s), got {}", args.len()),
                            e.pos,
                        ),
                        Some(_) => {}
                    }
                }
            }
            ExprKind::ClasserTest { obj, classer } | ExprKind::ClasserAccess { obj, classer, .. } => {
                let receiver = match &obj.kind {
                    ExprKind::This => this_class.map(str::to_string),
                    ExprKind::New { class, .. } => Some(class.clone()),
                    ExprKind::Ident(n) => support_param.filter(|(p, _)| p == n).map(|(_, s)| s.to_string()),
                    _ => None,
                };
                let (Some(receiver), Some(info)) = (receiver, table.get(classer)) else {
                    continue;
                };
                let ok = info.kind == ClassKind::Classer
                    && info.support.as_deref().is_some_and(|s| table.is_subclass_of(&receiver, s));
                if !ok {
                    ck.report(
                        Code::E022,
                        format!("'{classer}' is not a classer declared over class '{receiver}'"),
                        e.pos,
                    );
                }
            }
            _ => {}
        }
    }
}
