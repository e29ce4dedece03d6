//! Positioned, coded diagnostics shared by every pipeline stage.

use std::fmt;

/// Closed set of diagnostic and runtime error codes.
///
/// `E0xx` codes are produced statically (lexing, parsing, analysis),
/// `R1xx` codes by the interpreter.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Code {
    /// Unknown class name.
    E001,
    /// Unterminated string literal.
    E002,
    /// Illegal character.
    E003,
    /// Integer literal out of range.
    E004,
    /// Unexpected token.
    E005,
    /// Reserved identifier used in source.
    E006,
    /// Inheritance cycle.
    E007,
    /// Invalid escape sequence in a string literal.
    E008,
    /// Extender over a class that is not `extensible`.
    E010,
    /// E-method behavior without a matching signature in the support-class.
    E011,
    /// Misplaced or mismatched `call_e_method`.
    E012,
    /// Extender/classer constructor without the support parameter.
    E013,
    /// `dynamic` without an `extend` head.
    E020,
    /// Classer with a non-private constructor.
    E021,
    /// `obj.{C}` where `C` is not a classer over the class of `obj`.
    E022,
    /// E-method signature in a non-extensible class.
    E023,
    /// Duplicate definition.
    E030,
    /// Second live instance of a classer on one support-object.
    R100,
    /// Destroying or detaching an object that still supports live extensions.
    R101,
    /// Write barrier violation during E-method dispatch.
    R102,
    /// Classer absent or not declared over the receiver.
    R103,
    /// Generic runtime fault: step budget, arithmetic, indexing, dead objects.
    R104,
    /// A `Pre_`/`Post_` behavior threw after the support may have mutated.
    R105,
}

impl Code {
    pub fn is_runtime(self) -> bool {
        matches!(
            self,
            Code::R100 | Code::R101 | Code::R102 | Code::R103 | Code::R104 | Code::R105
        )
    }
}

impl fmt::Display for Code {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Diagnostic {
    pub code: Code,
    pub message: String,
    pub file: String,
    pub line: u32,
    pub col: u32,
}

impl Diagnostic {
    pub fn new(code: Code, message: impl Into<String>, file: &str, line: u32, col: u32) -> Self {
        Diagnostic {
            code,
            message: message.into(),
            file: file.to_string(),
            line,
            col,
        }
    }
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}:{}:{}: error[{}]: {}",
            self.file, self.line, self.col, self.code, self.message
        )
    }
}

/// Sorts diagnostics into their canonical print order.
pub fn sort_diagnostics(diags: &mut [Diagnostic]) {
    diags.sort_by(|a, b| {
        (&a.file, a.line, a.col, a.code, &a.message).cmp(&(&b.file, b.line, b.col, b.code, &b.message))
    });
}

/// Renders diagnostics one per line in canonical order.
pub fn render(diags: &[Diagnostic]) -> String {
    let mut sorted = diags.to_vec();
    sort_diagnostics(&mut sorted);
    let mut out = String::new();
    for d in &sorted {
        out.push_str(&d.to_string());
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn display_format() {
        let d = Diagnostic::new(Code::E010, "class 'A' is not extensible", "a.eco", 3, 7);
        assert_eq!(d.to_string(), "a.eco:3:7: error[E010]: class 'A' is not extensible");
    }

    #[test]
    fn render_sorts_by_position() {
        let diags = vec![
            Diagnostic::new(Code::E030, "dup", "a.eco", 5, 1),
            Diagnostic::new(Code::E001, "unknown", "a.eco", 2, 9),
            Diagnostic::new(Code::E001, "unknown", "a.eco", 2, 3),
        ];
        let text = render(&diags);
        let lines: Vec<_> = text.lines().collect();
        assert!(lines[0].starts_with("a.eco:2:3:"));
        assert!(lines[1].starts_with("a.eco:2:9:"));
        assert!(lines[2].starts_with("a.eco:5:1:"));
    }
}
