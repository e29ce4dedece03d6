//! Name resolution and the static ECO rules.

mod rules;
mod symbols;

pub use rules::check_eco_rules;
pub use symbols::{resolve, ClassInfo, ClassKind, MemberKind, SymbolTable};

use crate::diagnostic::{sort_diagnostics, Diagnostic};
use crate::frontend::ast::Module;

/// Runs resolution then rule checking; returns the table only if both pass.
pub fn analyze(module: &Module) -> Result<SymbolTable, Vec<Diagnostic>> {
    let table = resolve(module)?;
    let mut diags = check_eco_rules(module, &table);
    if diags.is_empty() {
        Ok(table)
    } else {
        sort_diagnostics(&mut diags);
        Err(diags)
    }
}
