//! Static rule fixtures and resolution behavior.

use eco_core::analysis::{analyze, resolve, ClassKind};
use eco_core::diagnostic::{render, Code};
use eco_core::frontend::{parse_source, ParseMode};
use eco_core::pipeline::check_sources;
use eco_core::stdlib::{library_sources, LIBRARY};

fn codes(src: &str) -> Vec<Code> {
    check_sources(&[("f.eco".into(), src.into())])
        .err()
        .unwrap_or_default()
        .iter()
        .map(|d| d.code)
        .collect()
}

/// One minimal program per rule; each must produce that code and nothing else.
const FIXTURES: &[(Code, &str)] = &[
    (Code::E010, "class P { }\nextend P class X { constructor(p) { } }"),
    (Code::E011, "extensible class S { extend Post_A(x); }\nextend S class X { constructor(s) { } extend Post_A(x, y) { } }"),
    (Code::E012, "class P { method f(v) { call_e_method(Post_AddVertex, v); } }"),
    (Code::E012, "extensible class S { extend Post_A(x); method f() { call_e_method(Post_B, 1); } }"),
    (Code::E012, "extensible class S { extend Post_A(x); method f() { call_e_method(Post_A); } }"),
    (Code::E013, "extensible class S { }\nextend S class X { constructor() { } }"),
    (Code::E013, "extensible class S { }\nextend S class X { }"),
    (Code::E020, "dynamic class C { }"),
    (Code::E021, "extensible class S { }\ndynamic extend S class C { constructor(s) { } }"),
    (
        Code::E022,
        "extensible class S { }\nextensible class T { }\ndynamic extend T class C { private constructor(t) { } }\nclass M { static method f() { var b = new S().{C}; } }",
    ),
    (
        Code::E022,
        "extensible class S { }\nextend S class L { constructor(s) { } }\nclass M { static method f(s) { var b = new S().{L}; } }",
    ),
    (Code::E023, "class P { extend Post_A(x); }"),
];

#[test]
fn each_rule_isolated() {
    for (code, src) in FIXTURES {
        assert_eq!(codes(src), [*code], "fixture:\n{src}");
    }
}

#[test]
fn resolution_errors() {
    assert_eq!(codes("class Graph { }\nclass Graph { }"), [Code::E030]);
    assert_eq!(codes("class A extends B { }"), [Code::E001]);
    assert_eq!(codes("class A extends B { }\nclass B extends A { }"), [Code::E007]);
    assert_eq!(codes("class A { method f() { } method f() { } }"), [Code::E030]);
}

#[test]
fn duplicate_reported_at_second() {
    let diags = check_sources(&[("f.eco".into(), "class Graph { }\nclass Graph { }".into())]).unwrap_err();
    assert_eq!((diags[0].line, diags[0].col), (2, 1));
}

#[test]
fn graph_symbols() {
    let (name, src) = LIBRARY[0];
    let m = parse_source(src, name, ParseMode::Surface).unwrap();
    let table = resolve(&m).unwrap();
    let g = table.get("Graph").unwrap();
    assert_eq!(g.kind, ClassKind::Extensible);
    let sigs: Vec<&str> = g.emethod_sigs.iter().map(|(n, _)| n.as_str()).collect();
    assert_eq!(sigs.len(), 12);
    for m in ["AddVertex", "DeleteVertex", "AddEdge", "DeleteEdge"] {
        for phase in ["Check_", "Pre_", "Post_"] {
            assert!(sigs.contains(&format!("{phase}{m}").as_str()), "{phase}{m}");
        }
    }
}

#[test]
fn corpus_passes_with_zero_diagnostics() {
    check_sources(&library_sources()).unwrap();
}

#[test]
fn diagnostics_independent_of_file_order() {
    let a = ("a.eco".to_string(), "class P { }\nextend P class X { constructor(p) { } }".to_string());
    let b = ("b.eco".to_string(), "dynamic class C { }\nclass Q { extend Post_A(x); }".to_string());
    let ab = check_sources(&[a.clone(), b.clone()]).unwrap_err();
    let ba = check_sources(&[b, a]).unwrap_err();
    assert_eq!(render(&ab), render(&ba));
    assert_eq!(ab.len(), 3);
}

#[test]
fn classer_kinds() {
    let m = eco_core::pipeline::parse_all(&library_sources()).unwrap();
    let table = analyze(&m).unwrap();
    let classers: Vec<&str> = table
        .classes
        .values()
        .filter(|c| c.kind == ClassKind::Classer)
        .map(|c| c.name.as_str())
        .collect();
    assert_eq!(classers, ["ConnCompSet", "Connected", "Forest", "NotConnected", "Planar"]);
    assert_eq!(table.get("Embedding").unwrap().support.as_deref(), Some("Graph"));
    assert_eq!(table.get("OrthogonalShape").unwrap().support.as_deref(), Some("Embedding"));
}
