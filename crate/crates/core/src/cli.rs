//! `ecoc`: check, emit and run ECO-mini programs.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::diagnostic::{render, Diagnostic};
use crate::interpreter::{run_program, DEFAULT_MAX_STEPS};
use crate::lowering::{emit, parse_core, HEADER};
use crate::pipeline::{check_sources, compile_sources, link_stdlib, parse_all, SourceFile};

pub const EXIT_OK: i32 = 0;
pub const EXIT_ERROR: i32 = 1;
pub const EXIT_RUNTIME: i32 = 2;
pub const EXIT_USAGE: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "ecoc", version, about = "ECO-mini pre-compiler and interpreter")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Parse and analyze; print diagnostics.
    Check(Inputs),
    /// Lower to core text.
    Emit {
        #[command(flatten)]
        inputs: Inputs,
        /// Output path [default: <first input>.core.eco]
        #[arg(short = 'o', value_name = "PATH")]
        output: Option<PathBuf>,
    },
    /// Compile and interpret.
    Run {
        #[command(flatten)]
        inputs: Inputs,
        /// Static method of class Main to start from.
        #[arg(long, default_value = "main", value_name = "NAME")]
        entry: String,
        /// Evaluation step budget.
        #[arg(long, default_value_t = DEFAULT_MAX_STEPS, value_name = "N")]
        max_steps: u64,
    },
}

#[derive(Debug, Args)]
pub struct Inputs {
    /// Source files, concatenated in order.
    #[arg(required = true, value_name = "FILE")]
    pub files: Vec<PathBuf>,
    /// Print the parsed AST.
    #[arg(long)]
    pub dump_ast: bool,
}

/// Entry point used by the binary.
pub fn main<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run(args, &mut stdout.lock(), &mut stderr.lock())
}

/// Runs one invocation against the given streams and returns the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = write!(out, "{e}");
                return EXIT_OK;
            }
            let _ = write!(err, "{}", e.render());
            return EXIT_USAGE;
        }
    };
    match execute(cli.command, out, err) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            EXIT_USAGE
        }
    }
}

fn read_inputs(files: &[PathBuf]) -> std::io::Result<Vec<SourceFile>> {
    files
        .iter()
        .map(|p| {
            std::fs::read_to_string(p)
                .map(|text| (p.display().to_string(), text))
                .map_err(|e| std::io::Error::new(e.kind(), format!("cannot read {}: {e}", p.display())))
        })
        .collect()
}

fn report(err: &mut dyn Write, diags: &[Diagnostic]) -> i32 {
    let _ = write!(err, "{}", render(diags));
    EXIT_ERROR
}

fn default_output(first: &Path) -> PathBuf {
    let stem = first.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    first.with_file_name(format!("{stem}.core.eco"))
}

fn execute(command: Command, out: &mut dyn Write, err: &mut dyn Write) -> std::io::Result<i32> {
    let inputs = match &command {
        Command::Check(i) | Command::Emit { inputs: i, .. } | Command::Run { inputs: i, .. } => i,
    };
    let raw = read_inputs(&inputs.files)?;
    if let (Command::Run { entry, max_steps, .. }, [(file, text)]) = (&command, raw.as_slice()) {
        // previously emitted core text runs as is
        if text.lines().next() == Some(HEADER) {
            if let Err(e) = parse_core(text, file) {
                writeln!(err, "{file}: error: {e}")?;
                return Ok(EXIT_ERROR);
            }
            let outcome = run_program(text, entry, *max_steps);
            out.write_all(outcome.stdout.as_bytes())?;
            err.write_all(outcome.stderr.as_bytes())?;
            return Ok(outcome.exit_code);
        }
    }
    let sources = link_stdlib(raw);
    if inputs.dump_ast {
        if let Ok(module) = parse_all(&sources) {
            // keep program output clean when running
            let sink: &mut dyn Write = if matches!(command, Command::Run { .. }) { err } else { out };
            writeln!(sink, "{module:#?}")?;
        }
    }
    match command {
        Command::Check(_) => Ok(match check_sources(&sources) {
            Ok(_) => EXIT_OK,
            Err(d) => report(err, &d),
        }),
        Command::Emit { inputs, output } => {
            let core = match compile_sources(&sources) {
                Ok(c) => c,
                Err(d) => return Ok(report(err, &d)),
            };
            let path = output.unwrap_or_else(|| default_output(&inputs.files[0]));
            std::fs::write(&path, emit(&core))
                .map_err(|e| std::io::Error::new(e.kind(), format!("cannot write {}: {e}", path.display())))?;
            Ok(EXIT_OK)
        }
        Command::Run { entry, max_steps, .. } => {
            let core = match compile_sources(&sources) {
                Ok(c) => c,
                Err(d) => return Ok(report(err, &d)),
            };
            let outcome = run_program(&emit(&core), &entry, max_steps);
            out.write_all(outcome.stdout.as_bytes())?;
            err.write_all(outcome.stderr.as_bytes())?;
            Ok(outcome.exit_code)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn invoke(args: &[&str]) -> (i32, String, String) {
        let (mut out, mut err) = (Vec::new(), Vec::new());
        let code = run(std::iter::once("ecoc").chain(args.iter().copied()), &mut out, &mut err);
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    #[test]
    fn usage_errors_exit_3() {
        assert_eq!(invoke(&[]).0, EXIT_USAGE);
        assert_eq!(invoke(&["frobnicate"]).0, EXIT_USAGE);
        assert_eq!(invoke(&["check"]).0, EXIT_USAGE);
        let (code, out, err) = invoke(&["check", "/nonexistent/x.eco"]);
        assert_eq!((code, out.as_str()), (EXIT_USAGE, ""));
        assert!(err.contains("cannot read"));
    }

    #[test]
    fn help_goes_to_stdout() {
        let (code, out, _) = invoke(&["--help"]);
        assert_eq!(code, EXIT_OK);
        assert!(out.contains("check"));
    }

    #[test]
    fn default_output_name() {
        assert_eq!(default_output(Path::new("dir/scenario_fig4.eco")), PathBuf::from("dir/scenario_fig4.core.eco"));
    }
}
