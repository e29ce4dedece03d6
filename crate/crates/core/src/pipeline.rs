//! Source files to core program: parse, analyze, lower.

use std::collections::{BTreeSet, HashSet};

use crate::analysis::analyze;
use crate::diagnostic::{sort_diagnostics, Diagnostic};
use crate::frontend::ast::{walk_block_exprs, ExprKind, Member, Module};
use crate::frontend::{parse_source, ParseMode};
use crate::lowering::{lower, CoreProgram};
use crate::stdlib;

/// A named source text.
pub type SourceFile = (String, String);

/// Parses every file and concatenates the classes in argument order.
pub fn parse_all(sources: &[SourceFile]) -> Result<Module, Vec<Diagnostic>> {
    let mut module = Module::default();
    let mut diags = Vec::new();
    for (name, text) in sources {
        match parse_source(text, name, ParseMode::Surface) {
            Ok(m) => module.classes.extend(m.classes),
            Err(d) => diags.extend(d),
        }
    }
    if diags.is_empty() {
        Ok(module)
    } else {
        sort_diagnostics(&mut diags);
        Err(diags)
    }
}

/// Parses and analyzes; returns the merged module on success.
pub fn check_sources(sources: &[SourceFile]) -> Result<Module, Vec<Diagnostic>> {
    let module = parse_all(sources)?;
    analyze(&module)?;
    Ok(module)
}

pub fn compile_sources(sources: &[SourceFile]) -> Result<CoreProgram, Vec<Diagnostic>> {
    let module = parse_all(sources)?;
    let table = analyze(&module)?;
    Ok(lower(&module, &table))
}

/// Class names a module mentions in declarations, `new`, classer syntax or
/// static calls.
pub fn referenced_classes(module: &Module) -> BTreeSet<String> {
    let mut names = BTreeSet::new();
    for class in &module.classes {
        names.extend(class.base.iter().map(|n| n.name.clone()));
        names.extend(class.extend_target.iter().map(|n| n.name.clone()));
        for member in &class.members {
            let body = match member {
                Member::Method(m) => &m.body,
                Member::Ctor(c) => &c.body,
                Member::EMethodBehavior(b) => &b.body,
                Member::Field(_) | Member::EMethodSig(_) => continue,
            };
            walk_block_exprs(body, &mut |e| match &e.kind {
                ExprKind::New { class, .. } => {
                    names.insert(class.clone());
                }
                ExprKind::ClasserTest { classer, .. } | ExprKind::ClasserAccess { classer, .. } => {
                    names.insert(classer.clone());
                }
                ExprKind::MethodCall { obj, .. } => {
                    if let ExprKind::Ident(n) = &obj.kind {
                        if n.starts_with(|c: char| c.is_ascii_uppercase()) {
                            names.insert(n.clone());
                        }
                    }
                }
                _ => {}
            });
        }
    }
    names
}

/// Prepends the stdlib files needed to resolve classes the inputs reference
/// but do not declare. Inputs that fail to parse are returned unchanged so
/// their own diagnostics surface.
pub fn link_stdlib(sources: Vec<SourceFile>) -> Vec<SourceFile> {
    let Ok(user) = parse_all(&sources) else {
        return sources;
    };
    let declared: HashSet<String> = user.classes.iter().map(|c| c.name.clone()).collect();
    let library: Vec<(&str, Module)> = stdlib::LIBRARY
        .iter()
        .map(|(name, text)| {
            let m = parse_source(text, &stdlib::corpus_path(name), ParseMode::Surface).expect("stdlib parses");
            (*name, m)
        })
        .collect();

    let mut wanted: Vec<String> = referenced_classes(&user).into_iter().filter(|n| !declared.contains(n)).collect();
    let mut linked = vec![false; library.len()];
    while let Some(name) = wanted.pop() {
        let Some(idx) = library.iter().position(|(_, m)| m.class(&name).is_some()) else {
            continue;
        };
        if linked[idx] {
            continue;
        }
        linked[idx] = true;
        let m = &library[idx].1;
        let own: HashSet<&str> = m.classes.iter().map(|c| c.name.as_str()).collect();
        wanted.extend(referenced_classes(m).into_iter().filter(|n| !own.contains(n.as_str()) && !declared.contains(n)));
    }

    let mut out: Vec<SourceFile> = library
        .iter()
        .zip(&linked)
        .filter(|(_, l)| **l)
        .map(|((name, _), _)| (stdlib::corpus_path(name), stdlib::source(name).expect("listed").to_string()))
        .collect();
    out.extend(sources);
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn links_graph_for_extender() {
        let user = vec![(
            "u.eco".to_string(),
            "extend Graph class L { constructor(g) {} }\nclass Main { static method main() { var g = new Graph(); } }".to_string(),
        )];
        let linked = link_stdlib(user);
        let names: Vec<&str> = linked.iter().map(|(n, _)| n.as_str()).collect();
        assert_eq!(names, ["stdlib/graph.eco", "u.eco"]);
        assert!(compile_sources(&linked).is_ok());
    }

    #[test]
    fn self_contained_input_links_nothing() {
        let user = vec![("u.eco".to_string(), "class Main { static method main() { print(1); } }".to_string())];
        assert_eq!(link_stdlib(user.clone()), user);
    }

    #[test]
    fn user_declaration_shadows_stdlib() {
        let user = vec![("u.eco".to_string(), "class Graph { }\nclass Main { static method main() { new Graph(); } }".to_string())];
        assert_eq!(link_stdlib(user.clone()).len(), 1);
    }
}
