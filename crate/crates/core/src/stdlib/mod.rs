//! The ECO-mini graph corpus and the host-side pieces it relies on.

pub mod oracle;
pub mod planarity;
pub mod script;

use crate::interpreter::Interpreter;
use crate::lowering::CoreProgram;
use crate::pipeline::compile_sources;

/// Library files in dependency order.
pub const LIBRARY: [(&str, &str); 8] = [
    ("graph.eco", include_str!("../../stdlib/graph.eco")),
    ("labeling.eco", include_str!("../../stdlib/labeling.eco")),
    ("orientation.eco", include_str!("../../stdlib/orientation.eco")),
    ("embedding.eco", include_str!("../../stdlib/embedding.eco")),
    ("orth_shape.eco", include_str!("../../stdlib/orth_shape.eco")),
    ("conncomp.eco", include_str!("../../stdlib/conncomp.eco")),
    ("planar.eco", include_str!("../../stdlib/planar.eco")),
    ("forest.eco", include_str!("../../stdlib/forest.eco")),
];

/// Scenario programs; each declares `Main` and links against the library.
pub const SCENARIOS: [(&str, &str); 2] = [
    ("scenario_fig4.eco", include_str!("../../stdlib/scenario_fig4.eco")),
    ("scenario_fig2.eco", include_str!("../../stdlib/scenario_fig2.eco")),
];

/// Expected stdout of `scenario_fig4.eco`.
pub const SCENARIO_FIG4_GOLDEN: &str = include_str!("../../stdlib/scenario_fig4.out");

pub fn corpus_path(name: &str) -> String {
    format!("stdlib/{name}")
}

pub fn source(name: &str) -> Option<&'static str> {
    LIBRARY.iter().chain(SCENARIOS.iter()).find(|(n, _)| *n == name).map(|(_, s)| *s)
}

/// Library files as pipeline inputs.
pub fn library_sources() -> Vec<(String, String)> {
    LIBRARY.iter().map(|(n, s)| (corpus_path(n), s.to_string())).collect()
}

/// The whole library, compiled.
pub fn library_program() -> CoreProgram {
    compile_sources(&library_sources()).expect("stdlib corpus compiles")
}

/// A fresh interpreter over the library, for host-driven scenarios.
pub fn library_interpreter() -> Interpreter {
    Interpreter::new(&library_program()).expect("stdlib corpus loads")
}
