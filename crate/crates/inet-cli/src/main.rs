//! Command-line front end: check, translate, run and bench `.inet` programs.
//!
//! Exit codes: 0 success, 1 parse/check/translate failure (and bench
//! mismatches), 2 runtime fault during reduction, 3 step limit exceeded.

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand};

use inet_core::check::{blocking, CheckOptions};
use inet_core::engine::{reduce, reduce_all_orders, EngineError, Strategy};
use inet_core::iso::iso;
use inet_core::program::Program;
use inet_core::text::print_net;

#[derive(Parser)]
#[command(
    name = "inet",
    about = "Interaction nets with attributes, conditional rules and nested pattern matching"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Parse a program and check its rules for local sequentiality and
    /// pairwise distinctness
    Check {
        file: PathBuf,
        /// Reject rule sets with undecided guard overlaps
        #[arg(long)]
        strict: bool,
    },
    /// Flatten nested rules into plain conditional rules
    Translate {
        file: PathBuf,
        /// Write the flat program here instead of stdout
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
    /// Reduce a named net to normal form
    Run {
        file: PathBuf,
        /// Net name from the program's `nets:` section
        net: String,
        /// Pair selection order: fifo, lifo or random
        #[arg(long, default_value = "fifo")]
        strategy: String,
        /// Seed for the random strategy (default: $INET_SEED or 0)
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, default_value_t = 1_000_000)]
        max_steps: u64,
        /// Print one line per reduction step
        #[arg(long)]
        trace: bool,
        /// Write the trace to a file instead of stdout
        #[arg(long)]
        trace_file: Option<PathBuf>,
        /// Translate to flat rules first and run those
        #[arg(long)]
        flat: bool,
        /// Skip the rule-set checks (testing hook)
        #[arg(long)]
        unchecked: bool,
    },
    /// Reduce under many orders, nested and flat, and compare the outcomes
    Bench {
        file: PathBuf,
        net: String,
        #[arg(long, default_value_t = 20)]
        trials: u64,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, default_value_t = 1_000_000)]
        max_steps: u64,
        /// Skip the rule-set checks (testing hook)
        #[arg(long)]
        unchecked: bool,
    },
}

const EXIT_CHECK: u8 = 1;
const EXIT_FAULT: u8 = 2;
const EXIT_LIMIT: u8 = 3;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let code = match cli.cmd {
        Cmd::Check { file, strict } => cmd_check(&file, strict),
        Cmd::Translate { file, out } => cmd_translate(&file, out.as_deref()),
        Cmd::Run {
            file,
            net,
            strategy,
            seed,
            max_steps,
            trace,
            trace_file,
            flat,
            unchecked,
        } => cmd_run(
            &file,
            &net,
            &strategy,
            resolve_seed(seed),
            max_steps,
            trace,
            trace_file.as_deref(),
            flat,
            unchecked,
        ),
        Cmd::Bench {
            file,
            net,
            trials,
            seed,
            max_steps,
            unchecked,
        } => cmd_bench(&file, &net, trials, resolve_seed(seed), max_steps, unchecked),
    };
    ExitCode::from(code)
}

fn resolve_seed(flag: Option<u64>) -> u64 {
    flag.or_else(|| {
        std::env::var("INET_SEED")
            .ok()
            .and_then(|s| s.parse().ok())
    })
    .unwrap_or(0)
}

fn load(file: &Path) -> Result<Program, u8> {
    let text = std::fs::read_to_string(file).map_err(|e| {
        eprintln!("error: cannot read {}: {}", file.display(), e);
        EXIT_CHECK
    })?;
    Program::parse(&text).map_err(|e| {
        eprintln!("error: {}: {}", file.display(), e);
        EXIT_CHECK
    })
}

/// Runs the checks; prints diagnostics. Returns an exit code on failure.
fn ensure_checked(program: &Program, strict: bool) -> Result<(), u8> {
    let report = program.check(&CheckOptions {
        strict,
        ..CheckOptions::default()
    });
    for d in &report.diagnostics {
        println!("{}", d);
    }
    if blocking(&report.diagnostics, strict).is_empty() {
        Ok(())
    } else {
        Err(EXIT_CHECK)
    }
}

fn cmd_check(file: &Path, strict: bool) -> u8 {
    let program = match load(file) {
        Ok(p) => p,
        Err(c) => return c,
    };
    match ensure_checked(&program, strict) {
        Ok(()) => {
            println!(
                "ok: {} rule(s), {} net(s)",
                program.rules.len(),
                program.nets.len()
            );
            0
        }
        Err(c) => c,
    }
}

fn cmd_translate(file: &Path, out: Option<&Path>) -> u8 {
    let program = match load(file) {
        Ok(p) => p,
        Err(c) => return c,
    };
    if let Err(c) = ensure_checked(&program, false) {
        return c;
    }
    let (flat, introduced) = program.translate();
    let mut text = String::new();
    text.push_str(&format!(
        "# flattened: {} rule(s), {} introduced symbol(s)\n",
        flat.rules.len(),
        introduced.len()
    ));
    text.push_str(&flat.render());
    match out {
        None => {
            print!("{}", text);
            0
        }
        Some(path) => match std::fs::write(path, text) {
            Ok(()) => 0,
            Err(e) => {
                eprintln!("error: cannot write {}: {}", path.display(), e);
                EXIT_CHECK
            }
        },
    }
}

fn parse_strategy(name: &str, seed: u64) -> Result<Strategy, u8> {
    match name {
        "fifo" => Ok(Strategy::Fifo),
        "lifo" => Ok(Strategy::Lifo),
        "random" => Ok(Strategy::Random(seed)),
        other => {
            eprintln!(
                "error: unknown strategy `{}` (expected fifo, lifo or random)",
                other
            );
            Err(EXIT_CHECK)
        }
    }
}

fn engine_exit(e: &EngineError) -> u8 {
    match e {
        EngineError::StepLimit { .. } => EXIT_LIMIT,
        EngineError::Fault { .. } => EXIT_FAULT,
    }
}

#[allow(clippy::too_many_arguments)]
fn cmd_run(
    file: &Path,
    net_name: &str,
    strategy: &str,
    seed: u64,
    max_steps: u64,
    trace: bool,
    trace_file: Option<&Path>,
    flat: bool,
    unchecked: bool,
) -> u8 {
    let program = match load(file) {
        Ok(p) => p,
        Err(c) => return c,
    };
    if !unchecked {
        if let Err(c) = ensure_checked(&program, false) {
            return c;
        }
    }
    let strategy = match parse_strategy(strategy, seed) {
        Ok(s) => s,
        Err(c) => return c,
    };
    let (flat_program, rules) = if flat {
        let (fp, _) = program.translate();
        (Some(fp), None)
    } else {
        (None, Some(&program.rules))
    };
    let rules = rules.unwrap_or_else(|| &flat_program.as_ref().unwrap().rules);
    let Some(net) = program.net(net_name) else {
        eprintln!("error: no net named `{}` in {}", net_name, file.display());
        return EXIT_CHECK;
    };

    let started = Instant::now();
    match reduce(net.clone(), rules, strategy, max_steps) {
        Ok(red) => {
            let elapsed = started.elapsed();
            if trace || trace_file.is_some() {
                let lines: Vec<String> = red.trace.iter().map(|s| s.render()).collect();
                match trace_file {
                    None => {
                        for l in &lines {
                            println!("{}", l);
                        }
                    }
                    Some(path) => {
                        if let Err(e) = std::fs::write(path, lines.join("\n") + "\n") {
                            eprintln!("error: cannot write {}: {}", path.display(), e);
                            return EXIT_CHECK;
                        }
                    }
                }
            }
            println!("{}", print_net(&red.net, rules.symbols()));
            println!("steps: {}", red.steps);
            println!("time: {:.3}ms", elapsed.as_secs_f64() * 1e3);
            if red.blocked_remain {
                println!("note: blocked pairs remain");
            }
            0
        }
        Err(e) => {
            eprintln!("error: {}", e);
            engine_exit(&e)
        }
    }
}

fn cmd_bench(
    file: &Path,
    net_name: &str,
    trials: u64,
    seed: u64,
    max_steps: u64,
    unchecked: bool,
) -> u8 {
    let program = match load(file) {
        Ok(p) => p,
        Err(c) => return c,
    };
    if !unchecked {
        if let Err(c) = ensure_checked(&program, false) {
            return c;
        }
    }
    let Some(net) = program.net(net_name) else {
        eprintln!("error: no net named `{}` in {}", net_name, file.display());
        return EXIT_CHECK;
    };
    let (flat, _) = program.translate();

    let mut failed = false;
    let mut forms = Vec::new();
    for (label, rules) in [("nested", &program.rules), ("flat", &flat.rules)] {
        match reduce_all_orders(net, rules, trials, seed, max_steps) {
            Ok(report) => {
                for run in &report.runs {
                    println!("{} {}: {} steps", label, run.label, run.steps);
                }
                println!(
                    "{} normal form: {}",
                    label,
                    print_net(&report.reference, rules.symbols())
                );
                if let Some((run, form)) = &report.divergent {
                    println!(
                        "{} {} diverged to: {}",
                        label,
                        run,
                        print_net(form, rules.symbols())
                    );
                    println!("FAIL: {} normal forms differ across orders", label);
                    failed = true;
                }
                if !report.equal_steps {
                    println!("FAIL: {} step counts differ across orders", label);
                    failed = true;
                }
                forms.push((report.reference, report.runs[0].steps));
            }
            Err(e) => {
                eprintln!("error: {}", e);
                return engine_exit(&e);
            }
        }
    }
    let (nested_form, nested_steps) = &forms[0];
    let (flat_form, flat_steps) = &forms[1];
    if !iso(nested_form, flat_form) {
        println!("FAIL: nested and flat rules reach different normal forms");
        failed = true;
    }
    if nested_steps > flat_steps {
        println!(
            "FAIL: nested reduction took more steps ({}) than flat ({})",
            nested_steps, flat_steps
        );
        failed = true;
    }
    if failed {
        EXIT_CHECK
    } else {
        println!("PASS");
        0
    }
}
