use std::collections::{BTreeMap, HashSet};

use crate::diagnostic::{sort_diagnostics, Code, Diagnostic};
use crate::frontend::ast::*;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ClassKind {
    Plain,
    Extensible,
    Extender,
    Classer,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MemberKind {
    Field,
    Method,
    StaticMethod,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClassInfo {
    pub name: String,
    pub kind: ClassKind,
    /// Declared `extensible`; independent of `kind` so extenders can be supports too.
    pub is_extensible: bool,
    /// Declared `dynamic`, whether or not an `extend` head is present.
    pub is_dynamic: bool,
    pub support: Option<String>,
    pub base: Option<String>,
    pub emethod_sigs: Vec<(String, usize)>,
    pub behaviors: Vec<(String, usize)>,
    pub members: BTreeMap<String, MemberKind>,
    /// `(arity, is_private)` per constructor, in declaration order.
    pub ctors: Vec<(usize, bool)>,
    pub file: String,
    pub pos: Pos,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SymbolTable {
    pub classes: BTreeMap<String, ClassInfo>,
}

impl SymbolTable {
    pub fn get(&self, name: &str) -> Option<&ClassInfo> {
        self.classes.get(name)
    }

    /// Iterates `name` and its ancestors, nearest first.
    pub fn ancestry<'a>(&'a self, name: &'a str) -> impl Iterator<Item = &'a ClassInfo> + 'a {
        let mut seen = HashSet::new();
        let mut next = self.classes.get(name);
        std::iter::from_fn(move || {
            let cur = next?;
            if !seen.insert(cur.name.as_str()) {
                return None;
            }
            next = cur.base.as_deref().and_then(|b| self.classes.get(b));
            Some(cur)
        })
    }

    pub fn is_subclass_of(&self, class: &str, ancestor: &str) -> bool {
        self.ancestry(class).any(|c| c.name == ancestor)
    }

    /// Arity of E-method `name` as declared on `class` or an ancestor.
    pub fn emethod_arity(&self, class: &str, name: &str) -> Option<usize> {
        self.ancestry(class)
            .flat_map(|c| c.emethod_sigs.iter())
            .find(|(n, _)| n == name)
            .map(|(_, a)| *a)
    }

    pub fn is_extensible(&self, class: &str) -> bool {
        self.ancestry(class).any(|c| c.is_extensible)
    }
}

/// Builds the symbol table: duplicate definitions, unknown class names and
/// inheritance cycles are rejected.
pub fn resolve(module: &Module) -> Result<SymbolTable, Vec<Diagnostic>> {
    let mut diags = Vec::new();
    let mut table = SymbolTable::default();
    let err = |diags: &mut Vec<Diagnostic>, code, msg: String, file: &str, pos: Pos| {
        diags.push(Diagnostic::new(code, msg, file, pos.line, pos.col));
    };

    for class in &module.classes {
        if table.classes.contains_key(&class.name) {
            err(&mut diags, Code::E030, format!("duplicate definition of class '{}'", class.name), &class.file, class.pos);
            continue;
        }
        let kind = match (&class.extend_target, class.is_classer) {
            (Some(_), true) => ClassKind::Classer,
            (Some(_), false) => ClassKind::Extender,
            (None, _) if class.is_extensible => ClassKind::Extensible,
            (None, _) => ClassKind::Plain,
        };
        let mut info = ClassInfo {
            name: class.name.clone(),
            kind,
            is_extensible: class.is_extensible,
            is_dynamic: class.is_classer,
            support: class.extend_target.as_ref().map(|n| n.name.clone()),
            base: class.base.as_ref().map(|n| n.name.clone()),
            emethod_sigs: Vec::new(),
            behaviors: Vec::new(),
            members: BTreeMap::new(),
            ctors: Vec::new(),
            file: class.file.clone(),
            pos: class.pos,
        };
        for member in &class.members {
            let pos = member.pos();
            let dup = |what: &str, name: &str| format!("duplicate definition of {what} '{name}' in class '{}'", class.name);
            match member {
                Member::Field(f) => {
                    if info.members.insert(f.name.clone(), MemberKind::Field).is_some() {
                        err(&mut diags, Code::E030, dup("member", &f.name), &class.file, pos);
                    }
                }
                Member::Method(m) => {
                    let kind = if m.is_static { MemberKind::StaticMethod } else { MemberKind::Method };
                    if info.members.insert(m.name.clone(), kind).is_some() {
                        err(&mut diags, Code::E030, dup("member", &m.name), &class.file, pos);
                    }
                }
                Member::Ctor(c) => {
                    if info.ctors.iter().any(|(a, _)| *a == c.params.len()) {
                        err(&mut diags, Code::E030, dup("constructor of arity", &c.params.len().to_string()), &class.file, pos);
                    } else {
                        info.ctors.push((c.params.len(), c.is_private));
                    }
                }
                Member::EMethodSig(s) => {
                    if info.emethod_sigs.iter().any(|(n, _)| n == &s.name) {
                        err(&mut diags, Code::E030, dup("E-method", &s.name), &class.file, pos);
                    } else {
                        info.emethod_sigs.push((s.name.clone(), s.params.len()));
                    }
                }
                Member::EMethodBehavior(b) => {
                    if info.behaviors.iter().any(|(n, _)| n == &b.name) {
                        err(&mut diags, Code::E030, dup("E-method behavior", &b.name), &class.file, pos);
                    } else {
                        info.behaviors.push((b.name.clone(), b.params.len()));
                    }
                }
            }
        }
        table.classes.insert(class.name.clone(), info);
    }

    for class in &module.classes {
        for name in class.base.iter().chain(class.extend_target.iter()) {
            if !table.classes.contains_key(&name.name) {
                err(&mut diags, Code::E001, format!("unknown class '{}'", name.name), &class.file, name.pos);
            }
        }
        for body in bodies(class) {
            walk_block_exprs(body, &mut |e| {
                let named = match &e.kind {
                    ExprKind::New { class, .. } => Some(class),
                    ExprKind::ClasserTest { classer, .. } | ExprKind::ClasserAccess { classer, .. } => Some(classer),
                    _ => None,
                };
                if let Some(name) = named {
                    if !table.classes.contains_key(name) {
                        err(&mut diags, Code::E001, format!("unknown class '{name}'"), &class.file, e.pos);
                    }
                }
            });
        }
    }

    // one report per cycle, at its first member in declaration order
    let mut on_reported_cycle: HashSet<&str> = HashSet::new();
    for class in &module.classes {
        if on_reported_cycle.contains(class.name.as_str()) {
            continue;
        }
        let mut path = Vec::new();
        let mut cur = Some(class.name.as_str());
        while let Some(name) = cur {
            if path.contains(&name) {
                if name == class.name {
                    on_reported_cycle.extend(path.iter().copied());
                    err(&mut diags, Code::E007, format!("inheritance cycle through class '{}'", class.name), &class.file, class.pos);
                }
                break;
            }
            path.push(name);
            cur = table.classes.get(name).and_then(|c| c.base.as_deref());
        }
    }

    if diags.is_empty() {
        Ok(table)
    } else {
        sort_diagnostics(&mut diags);
        Err(diags)
    }
}

/// Every executable body of a class, in declaration order.
pub(crate) fn bodies(class: &ClassDecl) -> impl Iterator<Item = &Block> {
    class.members.iter().filter_map(|m| match m {
        Member::Method(m) => Some(&m.body),
        Member::Ctor(c) => Some(&c.body),
        Member::EMethodBehavior(b) => Some(&b.body),
        _ => None,
    })
}
