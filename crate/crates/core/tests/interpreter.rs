//! Interpreter semantics: write barrier, veto and fatal channels, nested
//! dispatch, and equivalence with hand-desugared core programs.

use eco_core::diagnostic::Code;
use eco_core::interpreter::{run_program, RunOutcome, DEFAULT_MAX_STEPS};
use eco_core::lowering::{emit, parse_core};
use eco_core::pipeline::compile_sources;
use proptest::prelude::*;

fn run(src: &str) -> RunOutcome {
    let core = compile_sources(&[("t.eco".into(), src.into())]).unwrap_or_else(|d| panic!("{d:?}"));
    run_program(&emit(&core), "main", DEFAULT_MAX_STEPS)
}

fn runtime_code(out: &RunOutcome) -> Option<&str> {
    out.stderr.strip_prefix("runtime error[").map(|s| &s[..4])
}

#[test]
fn equivalence_with_hand_desugared() {
    let dir = concat!(env!("CARGO_MANIFEST_DIR"), "/tests/fixtures/equivalence");
    for name in ["veto", "reclassify", "cascade"] {
        let surface = std::fs::read_to_string(format!("{dir}/{name}.eco")).unwrap();
        let hand = std::fs::read_to_string(format!("{dir}/{name}.core.eco")).unwrap();
        parse_core(&hand, name).unwrap_or_else(|e| panic!("{name}: {e}"));
        let lowered = run(&surface);
        let reference = run_program(&hand, "main", DEFAULT_MAX_STEPS);
        assert_eq!(lowered, reference, "{name}");
        assert!(!lowered.stdout.is_empty());
    }
}

#[test]
fn equivalence_fixtures_cover_every_exit_path() {
    let dir = concat!(env!("CARGO_MANIFEST_DIR"), "/tests/fixtures/equivalence");
    let exit = |n: &str| run(&std::fs::read_to_string(format!("{dir}/{n}.eco")).unwrap());
    assert_eq!(exit("veto").exit_code, 1);
    let r = exit("reclassify");
    assert_eq!((r.exit_code, runtime_code(&r)), (2, Some("R103")));
    let c = exit("cascade");
    assert_eq!((c.exit_code, runtime_code(&c)), (2, Some("R101")));
}

const SUPPORT: &str = "
extensible class S {
    var x;
    extend Check_Op();
    extend Pre_Op();
    extend Post_Op();
    constructor() { this.x = 0; }
    method Op() { call_e_method(Check_Op); call_e_method(Pre_Op); this.x = this.x + 1; call_e_method(Post_Op); }
}
extend S class Rec {
    var tag;
    var log;
    constructor(s, tag, log) { this.tag = tag; this.log = log; }
    extend Check_Op() { this.log.push(this.tag); if (this.tag == \"veto\") { throw \"no\"; } }
    extend Pre_Op() { if (this.tag == \"pre\") { throw \"late\"; } }
    extend Post_Op() { if (this.tag == \"post\") { throw \"later\"; } }
}
";

#[test]
fn first_throw_aborts_remaining_behaviors() {
    let out = run(&format!(
        "{SUPPORT}class Main {{ static method main() {{ var s = new S(); var log = [];
            new Rec(s, \"a\", log); new Rec(s, \"veto\", log); new Rec(s, \"c\", log);
            try {{ s.Op(); }} catch (m) {{ print(m); }}
            print(log); print(s.x); }} }}"
    ));
    assert_eq!(out.stdout, "no\n[\"a\", \"veto\"]\n0\n");
    assert_eq!(out.exit_code, 0);
}

#[test]
fn pre_and_post_throws_are_fatal() {
    for tag in ["pre", "post"] {
        let out = run(&format!(
            "{SUPPORT}class Main {{ static method main() {{ var s = new S(); new Rec(s, \"{tag}\", []);
                try {{ s.Op(); }} catch (m) {{ print(\"caught\"); }} }} }}"
        ));
        assert_eq!(out.exit_code, 2, "{tag}");
        assert_eq!(runtime_code(&out), Some("R105"));
        assert_eq!(out.stdout, "");
    }
}

#[test]
fn empty_registry_dispatch_is_noop() {
    let out = run(&format!("{SUPPORT}class Main {{ static method main() {{ var s = new S(); s.Op(); print(s.x); }} }}"));
    assert_eq!((out.exit_code, out.stdout.as_str()), (0, "1\n"));
}

#[test]
fn classer_lifecycle_errors() {
    let base = "extensible class S { }\ndynamic extend S class C { private constructor(s) { } static method Make(s) { return new C(s); } }\n";
    let twice = run(&format!("{base}class Main {{ static method main() {{ var s = new S(); C.Make(s); C.Make(s); }} }}"));
    assert_eq!(runtime_code(&twice), Some("R100"));
    let absent = run(&format!("{base}class Main {{ static method main() {{ var s = new S(); print(s.{{C}}); s.{{C}}.Make(s); }} }}"));
    assert_eq!(absent.stdout, "false\n");
    assert_eq!(runtime_code(&absent), Some("R103"));
    // a classer test over the wrong support class is caught at run time
    let wrong = run(&format!(
        "{base}extensible class T {{ }}\nclass Main {{ static method f(t) {{ return t.{{C}}; }} static method main() {{ Main.f(new T()); }} }}"
    ));
    assert_eq!(runtime_code(&wrong), Some("R103"));
}

#[test]
fn destroy_order_enforced() {
    let base = "extensible class G { }\nextend G class L { constructor(g) { } }\n";
    let bad = run(&format!("{base}class Main {{ static method main() {{ var g = new G(); new L(g); delete g; }} }}"));
    assert_eq!(runtime_code(&bad), Some("R101"));
    let good = run(&format!(
        "{base}class Main {{ static method main() {{ var g = new G(); var l = new L(g); delete l; delete g; print(\"ok\"); }} }}"
    ));
    assert_eq!(good.stdout, "ok\n");
}

#[test]
fn nested_dispatch_uses_innermost_barrier() {
    let src = "
extensible class S { extend Post_A(); method A() { call_e_method(Post_A); } }
extensible extend S class Mid {
    var own;
    var target;
    extend Post_B();
    constructor(s) { this.own = 0; }
    extend Post_A() { call_e_method(Post_B); this.own = this.own + 1; }
}
extend Mid class Leaf {
    var mid;
    var hits;
    constructor(m) { this.mid = m; this.hits = 0; }
    extend Post_B() { this.hits = this.hits + 1; WRITE }
}
class Main { static method main() { var s = new S(); var m = new Mid(s); var l = new Leaf(m); s.A(); print(m.own); print(l.hits); } }
";
    let ok = run(&src.replace("WRITE", ""));
    assert_eq!((ok.exit_code, ok.stdout.as_str()), (0, "1\n1\n"));
    let bad = run(&src.replace("WRITE", "this.mid.target = 1;"));
    assert_eq!(runtime_code(&bad), Some("R102"));
}

#[derive(Debug, Clone, Copy)]
enum Target {
    Own,
    Support,
    Sibling,
    Unrelated,
    FreshInBehavior,
    FreshInEarlierCall,
}

const TARGETS: [Target; 6] = [
    Target::Own,
    Target::Support,
    Target::Sibling,
    Target::Unrelated,
    Target::FreshInBehavior,
    Target::FreshInEarlierCall,
];

impl Target {
    fn expr(self) -> &'static str {
        match self {
            Target::Own => "this",
            Target::Support => "this.support",
            Target::Sibling => "this.sibling",
            Target::Unrelated => "this.other",
            Target::FreshInBehavior => "new Box()",
            Target::FreshInEarlierCall => "this.kept",
        }
    }

    fn allowed_in_behavior(self) -> bool {
        matches!(self, Target::Own | Target::FreshInBehavior)
    }
}

/// A behavior (or, with `in_dispatch` false, a plain method of the same
/// extension-object) assigning one field of `target`.
fn barrier_program(target: Target, in_dispatch: bool) -> String {
    let call = if in_dispatch { "s.Poke();" } else { "e.Direct();" };
    format!(
        "
class Box {{ var v; }}
extensible class S {{ var v; extend Post_Poke(); method Poke() {{ call_e_method(Post_Poke); }} }}
extend S class E {{
    var v; var support; var sibling; var other; var kept;
    constructor(s, other) {{ this.support = s; this.other = other; }}
    method Link(sib) {{ this.sibling = sib; }}
    method Keep() {{ this.kept = new Box(); }}
    method Write() {{ var t = {expr}; t.v = 7; }}
    method Direct() {{ this.Write(); }}
    extend Post_Poke() {{ this.Write(); }}
}}
class Main {{ static method main() {{
    var s = new S();
    var e = new E(s, new Box());
    var sib = new E(s, null);
    e.Link(sib);
    e.Keep();
    {call}
    print(\"done\");
}} }}
",
        expr = target.expr()
    )
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn barrier_fires_iff_rule_violated(t in 0..TARGETS.len(), in_dispatch in any::<bool>()) {
        let target = TARGETS[t];
        let out = run(&barrier_program(target, in_dispatch));
        let violation = in_dispatch && !target.allowed_in_behavior();
        if violation {
            prop_assert_eq!(out.exit_code, 2);
            prop_assert_eq!(runtime_code(&out), Some("R102"));
        } else {
            prop_assert_eq!(out.exit_code, 0, "{:?}: {}", target, out.stderr);
            prop_assert_eq!(out.stdout.as_str(), "done\n");
        }
    }

    #[test]
    fn programs_are_deterministic(steps in prop::collection::vec(0i64..5, 0..10)) {
        let list = steps.iter().map(|s| s.to_string()).collect::<Vec<_>>().join(", ");
        let src = format!(
            "{SUPPORT}class Main {{ static method main() {{ var s = new S(); var log = []; new Rec(s, \"a\", log);
                var xs = [{list}]; var i = 0; while (i < xs.size()) {{ s.Op(); print(xs[i] * s.x); i = i + 1; }} print(log); }} }}"
        );
        prop_assert_eq!(run(&src), run(&src));
    }
}

#[test]
fn barrier_does_not_restrict_reads_or_registry() {
    let src = "
extensible class S { var x; extend Post_Poke(); constructor() { this.x = 41; } method Poke() { call_e_method(Post_Poke); } }
dynamic extend S class Flag { private constructor(s) { } static method Make(s) { return new Flag(s); } }
extend S class E {
    var s; var seen;
    constructor(s) { this.s = s; }
    extend Post_Poke() { this.seen = this.s.x + 1; Flag.Make(this.s); }
}
class Main { static method main() { var s = new S(); var e = new E(s); s.Poke(); print(e.seen); print(s.{Flag}); } }
";
    let out = run(src);
    assert_eq!((out.exit_code, out.stdout.as_str()), (0, "42\ntrue\n"), "{}", out.stderr);
}

#[test]
fn runtime_errors_map_to_codes() {
    let cases = [
        ("print([1, 2].get(5));", Code::R104),
        ("print(\"a\" < 1);", Code::R104),
        ("if (1) { }", Code::R104),
        ("print(Main.nope());", Code::R104),
    ];
    for (body, code) in cases {
        let out = run(&format!("class Main {{ static method main() {{ {body} }} }}"));
        assert_eq!(out.exit_code, 2, "{body}");
        assert_eq!(runtime_code(&out), Some(code.to_string().as_str()), "{body}");
    }
}
