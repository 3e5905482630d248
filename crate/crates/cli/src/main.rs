//! `tlm-forge` command-line front end.
//!
//! Exit codes: 0 success or PASS, 1 validation failure, constraint FAIL or
//! malformed input, 2 usage error or unreadable path, 3 runtime error.

use std::io::{IsTerminal, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{CommandFactory, Parser, Subcommand};
use tlm_forge::codegen::export_tlm;
use tlm_forge::sysdesc::ElaborationError;
use tlm_forge::trace::{check_constraints, parse_trace, render_svg, render_text_with, write_trace, Verdict};
use tlm_forge::{elaborate, parse_description, validate_description, SimTime, SystemDescription, TraceRecord};

#[derive(Parser)]
#[command(name = "tlm-forge", version, about = "Transaction-level virtual-platform simulator")]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Check a system description and print its diagnostics.
    Validate { desc: PathBuf },
    /// Simulate a system description and write its trace.
    Run {
        desc: PathBuf,
        /// Trace output file (stdout when omitted).
        #[arg(long, value_name = "FILE")]
        trace: Option<PathBuf>,
        /// Global quantum, e.g. `1us`; overrides the description.
        #[arg(long, value_name = "TIME")]
        quantum: Option<SimTime>,
        /// Maximum number of kernel dispatches.
        #[arg(long, value_name = "N")]
        event_limit: Option<u64>,
    },
    /// Draw a timing diagram from a trace.
    Render {
        trace: PathBuf,
        /// Write an SVG file.
        #[arg(long, value_name = "FILE", conflicts_with = "text")]
        svg: Option<PathBuf>,
        /// Print a terminal chart (the default).
        #[arg(long)]
        text: bool,
    },
    /// Evaluate a description's timing constraints against a trace.
    Check { desc: PathBuf, trace: PathBuf },
    /// Export the description as SystemC TLM-2.0 sources.
    Export {
        desc: PathBuf,
        #[arg(long, value_name = "DIR")]
        out: PathBuf,
    },
}

impl Cmd {
    fn name(&self) -> &'static str {
        match self {
            Cmd::Validate { .. } => "validate",
            Cmd::Run { .. } => "run",
            Cmd::Render { .. } => "render",
            Cmd::Check { .. } => "check",
            Cmd::Export { .. } => "export",
        }
    }
}

/// A failed invocation: exit code plus message for stderr.
struct Failure {
    code: u8,
    message: String,
    usage: bool,
}

impl Failure {
    fn input(message: impl Into<String>) -> Self {
        Failure { code: 1, message: message.into(), usage: false }
    }

    fn path(message: impl Into<String>) -> Self {
        Failure { code: 2, message: message.into(), usage: true }
    }

    fn runtime(message: impl Into<String>) -> Self {
        Failure { code: 3, message: message.into(), usage: false }
    }
}

type Outcome = Result<u8, Failure>;

fn read(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| Failure::path(format!("cannot read `{}`: {e}", path.display())))
}

fn write(path: &Path, contents: &str) -> Result<(), Failure> {
    std::fs::write(path, contents).map_err(|e| Failure::path(format!("cannot write `{}`: {e}", path.display())))
}

fn load(path: &Path) -> Result<SystemDescription, Failure> {
    let text = read(path)?;
    parse_description(&text).map_err(|d| Failure::input(format!("{}:{d}", path.display())))
}

/// Loads a description and refuses it on any diagnostic.
fn load_valid(path: &Path) -> Result<SystemDescription, Failure> {
    let desc = load(path)?;
    let diagnostics = validate_description(&desc);
    if diagnostics.is_empty() {
        return Ok(desc);
    }
    let lines: Vec<String> = diagnostics.iter().map(|d| format!("{}: {d}", path.display())).collect();
    Err(Failure::input(lines.join("\n")))
}

fn load_trace(path: &Path) -> Result<Vec<TraceRecord>, Failure> {
    let text = read(path)?;
    parse_trace(&text).map_err(|e| Failure::input(format!("{}: {e}", path.display())))
}

fn color_enabled() -> bool {
    std::env::var("TLMFORGE_COLOR").map_or(true, |v| v != "0") && std::io::stdout().is_terminal()
}

fn validate(desc: &Path, out: &mut impl Write) -> Outcome {
    let d = load(desc)?;
    let diagnostics = validate_description(&d);
    for diag in &diagnostics {
        let _ = writeln!(out, "{}: {diag}", desc.display());
    }
    if diagnostics.is_empty() {
        let _ = writeln!(
            out,
            "{}: ok ({} CPUs, {} modules, {} instances, {} bindings)",
            desc.display(),
            d.cpus.len(),
            d.modules.len(),
            d.instances.len(),
            d.bindings.len()
        );
        Ok(0)
    } else {
        Ok(1)
    }
}

fn run(
    desc: &Path,
    trace: Option<&Path>,
    quantum: Option<SimTime>,
    event_limit: Option<u64>,
    out: &mut impl Write,
) -> Outcome {
    let d = load_valid(desc)?;
    let mut model = elaborate(&d).map_err(|e| match e {
        ElaborationError::Invalid(_) => Failure::input(e.to_string()),
        ElaborationError::Overflow(_) => Failure::runtime(e.to_string()),
    })?;
    if let Some(q) = quantum {
        model.set_global_quantum(q);
    }
    if let Some(limit) = event_limit {
        model.set_event_limit(limit);
    }
    let result = model.simulate().map_err(|e| Failure::runtime(e.to_string()))?;
    let text = write_trace(&result.trace);
    match trace {
        Some(path) => {
            write(path, &text)?;
            let _ = writeln!(
                out,
                "simulated {} ({} ps), {} records -> {}",
                result.end_time,
                result.end_time.as_ps(),
                result.trace.len(),
                path.display()
            );
        }
        None => {
            let _ = out.write_all(text.as_bytes());
        }
    }
    Ok(0)
}

fn render(trace: &Path, svg: Option<&Path>, out: &mut impl Write) -> Outcome {
    let records = load_trace(trace)?;
    match svg {
        Some(path) => {
            write(path, &render_svg(&records))?;
            let _ = writeln!(out, "{} records -> {}", records.len(), path.display());
        }
        None => {
            let _ = out.write_all(render_text_with(&records, color_enabled()).as_bytes());
        }
    }
    Ok(0)
}

fn check(desc: &Path, trace: &Path, out: &mut impl Write) -> Outcome {
    let d = load_valid(desc)?;
    let records = load_trace(trace)?;
    let report = check_constraints(&records, &d.constraints);
    let _ = writeln!(out, "{report}");
    Ok(if report.verdict() == Verdict::Pass { 0 } else { 1 })
}

fn export(desc: &Path, dir: &Path, out: &mut impl Write) -> Outcome {
    let d = load_valid(desc)?;
    let bundle = export_tlm(&d).map_err(|e| Failure::input(format!("{}: {e}", desc.display())))?;
    std::fs::create_dir_all(dir).map_err(|e| Failure::path(format!("cannot create `{}`: {e}", dir.display())))?;
    for (name, text) in &bundle.files {
        let path = dir.join(name);
        write(&path, text)?;
        let _ = writeln!(out, "{}", path.display());
    }
    Ok(0)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let mut stdout = std::io::stdout().lock();
    let outcome = match &cli.command {
        Cmd::Validate { desc } => validate(desc, &mut stdout),
        Cmd::Run { desc, trace, quantum, event_limit } => {
            run(desc, trace.as_deref(), *quantum, *event_limit, &mut stdout)
        }
        Cmd::Render { trace, svg, text: _ } => render(trace, svg.as_deref(), &mut stdout),
        Cmd::Check { desc, trace } => check(desc, trace, &mut stdout),
        Cmd::Export { desc, out } => export(desc, out, &mut stdout),
    };
    let _ = stdout.flush();
    match outcome {
        Ok(code) => ExitCode::from(code),
        Err(failure) => {
            eprintln!("error: {}", failure.message);
            if failure.usage {
                let mut cmd = Cli::command();
                cmd.build();
                if let Some(sub) = cmd.find_subcommand_mut(cli.command.name()) {
                    eprintln!("\n{}", sub.render_usage());
                }
            }
            ExitCode::from(failure.code)
        }
    }
}
