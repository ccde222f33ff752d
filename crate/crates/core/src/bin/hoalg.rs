use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::json;

use hoalg::cli::{run, Options, Report};
use hoalg::complex::Window;
use hoalg::linalg::Field;
use hoalg::presentation::{Presentation, Session, Task};
use hoalg::Error;

/// Exact bar/cobar, 2-Cat_I and adjunction computations driven by presentation files.
#[derive(Parser)]
#[command(name = "hoalg", version)]
struct Cli {
    /// Coefficient field for homology ranks: Q or Fp:<p>.
    #[arg(long, global = true, value_parser = parse_field)]
    field: Option<Field>,
    /// Truncation window a:wmin:wmax:dmin:dmax, overriding the file.
    #[arg(long, global = true, value_parser = parse_window)]
    window: Option<Window>,
    /// Seed for sampled checks, overriding the file (default 0).
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Check basis elements in parallel; reports do not depend on it.
    #[arg(long, global = true)]
    parallel: bool,
    /// Compact JSON (the default).
    #[arg(long, global = true, conflicts_with = "pretty")]
    json: bool,
    /// Indented JSON.
    #[arg(long, global = true)]
    pretty: bool,
    /// One PASS/FAIL line per task instead of JSON.
    #[arg(long, global = true)]
    summary: bool,
    /// Record wall time per task (reports are then no longer byte-stable).
    #[arg(long, global = true)]
    timing: bool,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args)]
struct TaskArgs {
    file: PathBuf,
    /// Task arguments: names and key=value options; without any, the file's tasks of this kind run.
    args: Vec<String>,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run every task listed in the file.
    Run { file: PathBuf },
    /// Print the canonical form of a presentation file.
    Print { file: PathBuf },
    /// Catalan counts and anticommutation of edge contractions.
    Trees(TaskArgs),
    /// Diagram counts against the free 2-Cat_I in sets.
    Diagrams(TaskArgs),
    /// d² = 0 on the bar construction.
    Bar(TaskArgs),
    /// d² = 0 and the weight filtration on the cobar of the bar.
    Cobar(TaskArgs),
    /// The counit cobar(bar(P)) → P is a quasi-isomorphism.
    CounitVerify(TaskArgs),
    /// Component homology of an operad, or `det` for the edge-subset complexes.
    Homology(TaskArgs),
    /// Bar-cobar adjunction round trips through twisting cochains.
    McCheck(TaskArgs),
    /// The operad Adj, its hom counts and the strict 2-functors of declared adjunctions.
    AdjBuild(TaskArgs),
    /// The induced twisting cochain of a strict adjunction and its homotopy monad.
    AdjVerify(TaskArgs),
    /// Degree-zero cohomology of the hom complexes.
    H0(TaskArgs),
    /// Weak-equivalence check of a declared map.
    WeqCheck(TaskArgs),
    /// Fibration check of a declared map.
    FibCheck(TaskArgs),
    /// Unitalization: extension and restriction of maps, idempotence of red.
    Unital(TaskArgs),
    /// One-object shapes: diagram constructions against operad constructions.
    Twocat(TaskArgs),
    /// Hochschild cochains between endofunctors and their composition.
    Coh(TaskArgs),
}

fn parse_field(s: &str) -> Result<Field, String> {
    Field::parse(s).ok_or_else(|| format!("expected Q or Fp:<prime>, got {s}"))
}

fn parse_window(s: &str) -> Result<Window, String> {
    Window::parse(s).ok_or_else(|| format!("expected a:wmin:wmax:dmin:dmax, got {s}"))
}

fn error_kind(e: &Error) -> &'static str {
    match e {
        Error::Parse { .. } => "ParseError",
        Error::Validation(_) => "ValidationError",
        Error::WindowTooNarrow(_) => "WindowTooNarrow",
        _ => "Error",
    }
}

fn fail(e: &Error) -> ExitCode {
    let line = match e {
        Error::Parse { line, .. } => Some(*line),
        _ => None,
    };
    println!("{}", json!({ "error": { "kind": error_kind(e), "line": line, "message": e.to_string() } }));
    eprintln!("hoalg: {e}");
    ExitCode::from(2)
}

fn load(file: &PathBuf) -> Result<Session, Error> {
    let text = std::fs::read_to_string(file).map_err(|e| Error::Validation(format!("{}: {e}", file.display())))?;
    Session::load(&text)
}

fn emit(cli: &Cli, report: &Report) -> ExitCode {
    if cli.summary {
        print!("{}", report.summary());
    } else if cli.pretty {
        println!("{}", serde_json::to_string_pretty(report).expect("report serializes"));
    } else {
        println!("{}", serde_json::to_string(report).expect("report serializes"));
    }
    if report.passed() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let opts = Options { field: cli.field, window: cli.window, seed: cli.seed, parallel: cli.parallel, timing: cli.timing };
    let (kind, ta) = match &cli.cmd {
        Cmd::Run { file } => {
            return match load(file).and_then(|s| run(&s, None, &opts)) {
                Ok(r) => emit(&cli, &r),
                Err(e) => fail(&e),
            };
        }
        Cmd::Print { file } => {
            let text = match std::fs::read_to_string(file) {
                Ok(t) => t,
                Err(e) => return fail(&Error::Validation(format!("{}: {e}", file.display()))),
            };
            return match Presentation::parse(&text) {
                Ok(p) => {
                    print!("{p}");
                    ExitCode::SUCCESS
                }
                Err(e) => fail(&e),
            };
        }
        Cmd::Trees(a) => ("trees", a),
        Cmd::Diagrams(a) => ("diagrams", a),
        Cmd::Bar(a) => ("bar", a),
        Cmd::Cobar(a) => ("cobar", a),
        Cmd::CounitVerify(a) => ("counit-verify", a),
        Cmd::Homology(a) => ("homology", a),
        Cmd::McCheck(a) => ("mc-check", a),
        Cmd::AdjBuild(a) => ("adj-build", a),
        Cmd::AdjVerify(a) => ("adj-verify", a),
        Cmd::H0(a) => ("h0", a),
        Cmd::WeqCheck(a) => ("weq-check", a),
        Cmd::FibCheck(a) => ("fib-check", a),
        Cmd::Unital(a) => ("unital", a),
        Cmd::Twocat(a) => ("twocat", a),
        Cmd::Coh(a) => ("coh", a),
    };
    let session = match load(&ta.file) {
        Ok(s) => s,
        Err(e) => return fail(&e),
    };
    let tasks: Vec<Task> = if ta.args.is_empty() {
        let own: Vec<Task> = session.pres.tasks.iter().filter(|t| t.kind == kind).cloned().collect();
        if own.is_empty() {
            vec![Task { kind: kind.into(), args: vec![], line: 0 }]
        } else {
            own
        }
    } else {
        vec![Task { kind: kind.into(), args: ta.args.clone(), line: 0 }]
    };
    match run(&session, Some(&tasks), &opts) {
        Ok(r) => emit(&cli, &r),
        Err(e) => fail(&e),
    }
}
