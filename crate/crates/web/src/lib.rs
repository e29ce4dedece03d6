//! Browser playground for ECO-mini.
//!
//! Every export takes plain strings and returns a JSON document, so the page
//! needs no bindings beyond `wasm-bindgen` itself. The same functions are
//! callable natively (see `tests/`).

use eco_core::diagnostic::Diagnostic;
use eco_core::interpreter::{run_program, Interpreter, Unwind, Value};
use eco_core::lowering::emit as emit_core;
use eco_core::pipeline::{check_sources, compile_sources, link_stdlib, SourceFile};
use eco_core::stdlib::library_interpreter;
use eco_core::stdlib::script::{parse_script, EditOp};
use serde_json::{json, Value as Json};
use wasm_bindgen::prelude::*;

const FILE: &str = "playground.eco";

/// Classers the graph demo may install; the page toggles them.
pub const GRAPH_CLASSERS: [&str; 3] = ["ConnCompSet", "Planar", "Forest"];

/// Classification classes reported after every edit.
const REPORTED: [&str; 4] = ["Connected", "NotConnected", "Planar", "Forest"];

fn sources(text: &str) -> Vec<SourceFile> {
    link_stdlib(vec![(FILE.to_string(), text.to_string())])
}

fn diagnostics(diags: &[Diagnostic]) -> Json {
    let mut sorted = diags.to_vec();
    eco_core::diagnostic::sort_diagnostics(&mut sorted);
    sorted
        .iter()
        .map(|d| {
            json!({
                "code": d.code.to_string(),
                "file": d.file,
                "line": d.line,
                "col": d.col,
                "message": d.message,
                "text": d.to_string(),
            })
        })
        .collect()
}

/// Parses and analyzes `source` (library classes are linked on demand).
pub fn check_json(source: &str) -> Json {
    match check_sources(&sources(source)) {
        Ok(m) => json!({ "ok": true, "classes": m.classes.len(), "diagnostics": [] }),
        Err(d) => json!({ "ok": false, "diagnostics": diagnostics(&d) }),
    }
}

/// Lowers `source` to core text.
pub fn emit_json(source: &str) -> Json {
    match compile_sources(&sources(source)) {
        Ok(core) => json!({ "ok": true, "core": emit_core(&core), "diagnostics": [] }),
        Err(d) => json!({ "ok": false, "diagnostics": diagnostics(&d) }),
    }
}

/// Compiles and runs `source`, starting at `Main.<entry>`.
pub fn run_json(source: &str, entry: &str, max_steps: u64) -> Json {
    match compile_sources(&sources(source)) {
        Ok(core) => {
            let out = run_program(&emit_core(&core), entry, max_steps);
            json!({
                "ok": out.exit_code == 0,
                "exit_code": out.exit_code,
                "stdout": out.stdout,
                "stderr": out.stderr,
                "diagnostics": [],
            })
        }
        Err(d) => json!({
            "ok": false,
            "exit_code": 1,
            "stdout": "",
            "stderr": eco_core::diagnostic::render(&d),
            "diagnostics": diagnostics(&d),
        }),
    }
}

struct GraphSession {
    interp: Interpreter,
    graph: Value,
}

impl GraphSession {
    fn new() -> Self {
        let mut interp = library_interpreter();
        let graph = interp.instantiate("Graph", vec![]).expect("graph constructs");
        GraphSession { interp, graph }
    }

    fn call(&mut self, method: &str, args: Vec<Value>) -> Result<Value, Unwind> {
        let g = self.graph.clone();
        self.interp.call_method(&g, method, args)
    }

    fn apply(&mut self, op: EditOp) -> Result<Value, Unwind> {
        match op {
            EditOp::AddVertex => self.call("AddVertex", vec![]),
            EditOp::DeleteVertex(v) => self.call("DeleteVertex", vec![Value::Int(v)]),
            EditOp::AddEdge(u, v) => self.call("AddEdge", vec![Value::Int(u), Value::Int(v)]),
            EditOp::DeleteEdge(e) => self.call("DeleteEdge", vec![Value::Int(e)]),
        }
    }

    fn state(&mut self) -> Json {
        let id = self.graph.as_obj().expect("graph is an object");
        let rt = self.interp.runtime();
        let classes: Vec<&str> = REPORTED.iter().copied().filter(|c| rt.classer_present(id, c)).collect();
        let components = rt
            .classer_get(id, "ConnCompSet")
            .ok()
            .map(|cs| self.interp.call_method(&Value::Obj(cs), "Count", vec![]));
        let vertices = self.call("VertexCount", vec![]).ok().and_then(|v| v.as_int());
        let edges = self.call("EdgeCount", vec![]).ok().and_then(|v| v.as_int());
        json!({
            "classes": classes,
            "components": components.and_then(|r| r.ok()).and_then(|v| v.as_int()),
            "vertices": vertices,
            "edges": edges,
        })
    }
}

/// Replays an edit script (`AV`, `DV v`, `AE u v`, `DE e`, one per line) on a
/// fresh graph carrying the chosen classers and reports the classification
/// after every step. Vetoed edits leave the graph unchanged.
pub fn classify_json(script: &str, classers: &[&str]) -> Json {
    let ops = match parse_script(script) {
        Ok(ops) => ops,
        Err(e) => return json!({ "ok": false, "error": e.to_string(), "steps": [] }),
    };
    let mut s = GraphSession::new();
    for c in classers {
        if !GRAPH_CLASSERS.contains(c) {
            return json!({ "ok": false, "error": format!("unknown classer '{c}'"), "steps": [] });
        }
        let g = s.graph.clone();
        if let Err(e) = s.interp.call_static(c, "Make", vec![g]) {
            return json!({ "ok": false, "error": e.to_string(), "steps": [] });
        }
    }
    let mut steps = vec![json!({ "op": "start", "outcome": "ok", "state": s.state() })];
    for op in ops {
        let (outcome, detail) = match s.apply(op) {
            Ok(Value::Int(id)) => ("ok", Json::from(id)),
            Ok(_) => ("ok", Json::Null),
            Err(Unwind::Throw(v)) => ("rejected", Json::from(v.to_string())),
            Err(Unwind::Fatal(e)) => {
                steps.push(json!({ "op": op.to_string(), "outcome": "fault", "detail": e.to_string() }));
                return json!({ "ok": false, "error": e.to_string(), "steps": steps });
            }
        };
        steps.push(json!({ "op": op.to_string(), "outcome": outcome, "detail": detail, "state": s.state() }));
    }
    json!({ "ok": true, "steps": steps })
}

#[wasm_bindgen]
pub fn check(source: &str) -> String {
    check_json(source).to_string()
}

#[wasm_bindgen]
pub fn emit(source: &str) -> String {
    emit_json(source).to_string()
}

#[wasm_bindgen]
pub fn run(source: &str, entry: &str, max_steps: u32) -> String {
    run_json(source, entry, u64::from(max_steps)).to_string()
}

/// `classers` is a comma-separated subset of [`GRAPH_CLASSERS`].
#[wasm_bindgen]
pub fn classify(script: &str, classers: &str) -> String {
    let chosen: Vec<&str> = classers.split(',').map(str::trim).filter(|c| !c.is_empty()).collect();
    classify_json(script, &chosen).to_string()
}

/// Library file names and sources, for the page's example picker.
#[wasm_bindgen]
pub fn examples() -> String {
    let all = eco_core::stdlib::SCENARIOS.iter().chain(eco_core::stdlib::LIBRARY.iter());
    Json::from(all.map(|(n, s)| json!({ "name": n, "source": s })).collect::<Vec<_>>()).to_string()
}
