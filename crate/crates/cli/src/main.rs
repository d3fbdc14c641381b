use std::io::{self, BufRead, IsTerminal, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use loopmatch::ast::Pos;
use loopmatch::engine::{self, Schedule, SweepInfo};
use loopmatch::reader::parse_program;
use loopmatch::{with_stack, Interpreter, Outcome, ParseError};

#[derive(Parser)]
#[command(name = "loopmatch", version, about = "Run programs with non-linear loop-pattern matching")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate every form of a file, printing one value per line.
    Run {
        file: PathBuf,
        #[command(flatten)]
        opts: Opts,
    },
    /// Read and evaluate forms interactively.
    Repl {
        #[command(flatten)]
        opts: Opts,
    },
    /// Evaluate the forms given on the command line.
    Eval {
        source: String,
        #[command(flatten)]
        opts: Opts,
    },
}

#[derive(Args, Clone)]
struct Opts {
    /// Print at most N elements of each collection.
    #[arg(long, value_name = "N")]
    take: Option<usize>,
    /// Start without the standard matchers and functions.
    #[arg(long)]
    no_prelude: bool,
    /// Report every search sweep on standard error.
    #[arg(long)]
    trace: bool,
    /// Print the parsed forms instead of evaluating them.
    #[arg(long)]
    dump_ast: bool,
    /// Order in which new search branches are explored.
    #[arg(long, value_enum, default_value_t = ScheduleArg::Interleaved)]
    schedule: ScheduleArg,
}

#[derive(ValueEnum, Clone, Copy)]
enum ScheduleArg {
    Interleaved,
    SpawnedFirst,
}

impl From<ScheduleArg> for Schedule {
    fn from(s: ScheduleArg) -> Schedule {
        match s {
            ScheduleArg::Interleaved => Schedule::Interleaved,
            ScheduleArg::SpawnedFirst => Schedule::SpawnedFirst,
        }
    }
}

fn session(opts: &Opts) -> Interpreter {
    engine::set_schedule(opts.schedule.into());
    if opts.trace {
        engine::set_trace_hook(Some(Box::new(|info: &SweepInfo| {
            eprintln!(
                "sweep {} depth {}: {} vector(s), {} result(s)",
                info.index, info.depth, info.vectors, info.emitted
            );
        })));
    }
    let mut interp = if opts.no_prelude { Interpreter::bare() } else { Interpreter::new() };
    interp.set_show_limit(opts.take);
    interp
}

fn report(pos: Pos, message: impl std::fmt::Display) {
    eprintln!("error at {pos}: {message}");
}

fn report_parse(e: &ParseError) {
    report(e.pos, &e.message);
}

/// Evaluates every form of `text`, printing values as they are produced.
/// Returns false if parsing failed or any form raised an error.
fn run_text(interp: &Interpreter, text: &str, opts: &Opts) -> bool {
    let forms = match parse_program(text) {
        Ok(forms) => forms,
        Err(e) => {
            report_parse(&e);
            return false;
        }
    };
    let stdout = io::stdout();
    let mut ok = true;
    for form in forms {
        if opts.dump_ast {
            let _ = writeln!(stdout.lock(), "{form}");
            continue;
        }
        match interp.eval_form(&form) {
            Ok(Outcome::Value(v)) => {
                let mut out = stdout.lock();
                let _ = writeln!(out, "{v}");
                let _ = out.flush();
            }
            Ok(Outcome::Defined(_)) => {}
            Err(e) => {
                report(form.pos, e);
                ok = false;
            }
        }
    }
    ok
}

fn run_file(interp: &Interpreter, path: &Path, opts: &Opts) -> bool {
    match std::fs::read_to_string(path) {
        Ok(text) => run_text(interp, &text, opts),
        Err(e) => {
            eprintln!("error: cannot read {}: {e}", path.display());
            false
        }
    }
}

fn repl(opts: &Opts) -> bool {
    let interp = session(opts);
    let interactive = io::stdin().is_terminal();
    let prompt = |continuing: bool| {
        if interactive {
            print!("{}", if continuing { "... " } else { "> " });
            let _ = io::stdout().flush();
        }
    };
    let mut buffer = String::new();
    let mut ok = true;
    prompt(false);
    for line in io::stdin().lock().lines() {
        let Ok(line) = line else { break };
        if buffer.is_empty() {
            let cmd = line.trim();
            if cmd == ":quit" || cmd == ":q" {
                return ok;
            }
            if let Some(path) = cmd.strip_prefix(":load") {
                ok &= run_file(&interp, Path::new(path.trim()), opts);
                prompt(false);
                continue;
            }
        }
        buffer.push_str(&line);
        buffer.push('\n');
        match parse_program(&buffer) {
            Err(e) if e.incomplete => {
                prompt(true);
                continue;
            }
            Err(e) => {
                report_parse(&e);
                ok = false;
            }
            Ok(_) => ok &= run_text(&interp, &buffer, opts),
        }
        buffer.clear();
        prompt(false);
    }
    if !buffer.trim().is_empty() {
        if let Err(e) = parse_program(&buffer) {
            report_parse(&e);
            ok = false;
        }
    }
    ok
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let ok = with_stack(move || match cli.command {
        Command::Run { file, opts } => run_file(&session(&opts), &file, &opts),
        Command::Eval { source, opts } => run_text(&session(&opts), &source, &opts),
        Command::Repl { opts } => repl(&opts),
    });
    if ok {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
