//! ECO-mini: a small class-based language with extenders, E-methods and
//! classers, compiled by a pre-compiler into an ECO-free core language and
//! run by a tree-walking interpreter.
//!
//! Pipeline: [`frontend`] → [`analysis`] → [`lowering`] → [`interpreter`].
//! The [`runtime`] module holds the extension registry the interpreter
//! drives, and [`stdlib`] carries the graph corpus with its host oracles.

pub mod analysis;
pub mod cli;
pub mod diagnostic;
pub mod frontend;
pub mod interpreter;
pub mod lowering;
pub mod pipeline;
pub mod runtime;
pub mod stdlib;

pub use diagnostic::{Code, Diagnostic};
