mod commands;
mod spec;

use clap::{Args, Parser, Subcommand, ValueEnum};
use commands::{Outcome, RelationArg};
use reldoc::{Error, Limits, QuantaleKind, Result};
use serde_json::{json, Value};
use spec::{Built, Loaded, MonadKind, Recipe};
use std::io::{Read, Write};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser, Debug)]
#[command(name = "reldoc", version, about = "Check and construct finite relational doctrines")]
struct Cli {
    /// Largest fibre or hom-set that may be enumerated.
    #[arg(long, global = true, default_value_t = 1 << 20, value_parser = clap::value_parser!(u64).range(1..))]
    cap_fibre: u64,
    /// Largest hom-set allowed when enumerating doctrine morphisms.
    #[arg(long, global = true, default_value_t = 8, value_parser = clap::value_parser!(u64).range(1..))]
    cap_homs: u64,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Seed for sampled law checks.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Text,
}

#[derive(Args, Debug)]
struct Input {
    /// Spec file, or `-` for stdin.
    spec: String,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Quantale, doctrine and monad laws.
    Laws(Input),
    /// Property profiles of every relation and completeness of every object.
    Analyze(Input),
    /// The unique-choice completion.
    Complete(Input),
    /// Singleton objects and the Cauchy reflector.
    Singletons(Input),
    /// Quotient of an equivalence relation on an object.
    Quotient {
        #[command(flatten)]
        input: Input,
        #[arg(long)]
        object: String,
        /// JSON matrix of quantale element names.
        #[arg(long, conflicts_with = "pairs", required_unless_present = "pairs")]
        relation: Option<String>,
        /// Crisp equivalence generated by index pairs, e.g. `0-1,2-3`.
        #[arg(long)]
        pairs: Option<String>,
    },
    /// Compactification of a space; every space on the object when no
    /// structure is given.
    Compactify {
        #[command(flatten)]
        input: Input,
        #[arg(long)]
        object: String,
        /// JSON matrix of quantale element names, a relation from T(object) to object.
        #[arg(long)]
        phi: Option<String>,
    },
    /// A relation witnessing failure of unique choice, or `none`.
    Counterexample {
        #[command(flatten)]
        input: Input,
        /// Also report relations tracked by more than one arrow.
        #[arg(long)]
        strong: bool,
    },
    /// Writes a builtin presentation.
    Builtin(BuiltinArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum BuiltinKind {
    Vrel,
    Vcat,
    Walters,
    PowersetRel,
}

#[derive(Args, Debug)]
struct BuiltinArgs {
    kind: BuiltinKind,
    /// `boolean`, `chain(n)`, `powerset(n)` or `tropical(step,cap)`.
    #[arg(long, default_value = "boolean")]
    quantale: String,
    /// Carrier sizes, e.g. `1,2`.
    #[arg(long, value_delimiter = ',', default_value = "1,2")]
    carriers: Vec<usize>,
    /// JSON list of categories; drawn from the seed when absent.
    #[arg(long)]
    categories: Option<PathBuf>,
    /// Only identities as base arrows (vrel).
    #[arg(long)]
    identities_only: bool,
    /// Attach the identity monad (vrel, vcat).
    #[arg(long)]
    identity_monad: bool,
    /// Include the completion of every category (walters).
    #[arg(long)]
    completions: bool,
    /// Write the recipe without tabulating it.
    #[arg(long)]
    recipe_only: bool,
    /// Output path, `-` for stdout.
    #[arg(short, long, default_value = "-")]
    output: String,
}

fn limits(cli: &Cli) -> Limits {
    Limits {
        fibre_cap: cli.cap_fibre as u128,
        hom_cap: cli.cap_homs as usize,
        seed: cli.seed,
        ..Limits::default()
    }
}

fn read_input(path: &str) -> Result<String> {
    let mut text = String::new();
    let res = if path == "-" {
        std::io::stdin().read_to_string(&mut text).map(|_| ())
    } else {
        std::fs::read_to_string(path).map(|t| text = t)
    };
    res.map_err(|e| Error::structural(format!("cannot read {path}: {e}")))?;
    Ok(text)
}

fn load(input: &Input, limits: &Limits) -> Result<Loaded> {
    spec::parse(&read_input(&input.spec)?, limits)
}

/// The matrix presentation behind a spec, for quotients and compactification.
fn matrix_form(loaded: Loaded, limits: &Limits) -> Result<Built> {
    match loaded {
        Loaded::Recipe(built) => Ok(built),
        Loaded::Finite { recipe: Some(r), .. } => spec::build(&r, limits),
        Loaded::Finite { recipe: None, .. } => Err(Error::Unsupported(
            "this command needs a spec built from a recipe".into(),
        )),
    }
}

macro_rules! with_doctrine {
    ($loaded:expr, $d:ident => $body:expr) => {
        match $loaded {
            Loaded::Finite { doctrine: $d, .. } => $body,
            Loaded::Recipe(built) => match built {
                Built::Plain($d) => $body,
                Built::Identity(m) => {
                    let $d = m.doctrine;
                    $body
                }
                Built::Powerset(m) => {
                    let $d = reldoc::monad::DoctrineMonad::doctrine(&m).clone();
                    $body
                }
            },
        }
    };
}

fn run_laws(loaded: Loaded, limits: &Limits) -> Result<Outcome> {
    let monad = match &loaded {
        Loaded::Finite { monad: Some(m), .. } => Some(commands::monad_laws(m, limits)?),
        Loaded::Recipe(Built::Identity(m)) => Some(commands::monad_laws(m, limits)?),
        Loaded::Recipe(Built::Powerset(m)) => Some(commands::monad_laws(m, limits)?),
        _ => None,
    };
    let (mut report, mut clean) = match loaded {
        Loaded::Recipe(Built::Powerset(m)) => commands::tower_laws(&m, limits)?,
        other => with_doctrine!(other, d => commands::laws(&d, limits)?),
    };
    if let Some((m, ok)) = monad {
        report["monad"] = m;
        clean &= ok;
    }
    report["clean"] = json!(clean);
    Ok(Outcome { report, flagged: !clean })
}

fn builtin_recipe(args: &BuiltinArgs, seed: u64) -> Result<Recipe> {
    let quantale: QuantaleKind = args.quantale.parse()?;
    let monad = args.identity_monad.then_some(MonadKind::Identity);
    let categories = |walters: bool| -> Result<_> {
        match &args.categories {
            Some(path) => {
                let text = read_input(&path.to_string_lossy())?;
                serde_json::from_str(&text).map_err(|e| Error::structural(format!("categories: {e}")))
            }
            None => spec::random_categories(quantale, &args.carriers, walters, seed),
        }
    };
    Ok(match args.kind {
        BuiltinKind::Vrel => Recipe::Vrel {
            quantale,
            carriers: args.carriers.clone(),
            all_functions: !args.identities_only,
            monad,
        },
        BuiltinKind::Vcat => Recipe::Vcat {
            quantale,
            categories: categories(false)?,
            monad,
        },
        BuiltinKind::Walters => Recipe::Walters {
            quantale,
            categories: categories(true)?,
            completions: args.completions,
        },
        BuiltinKind::PowersetRel => Recipe::PowersetRel {
            carriers: args.carriers.clone(),
        },
    })
}

fn pretty(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("values serialize");
    s.push('\n');
    s
}

fn run_builtin(args: &BuiltinArgs, limits: &Limits) -> Result<Outcome> {
    let recipe = builtin_recipe(args, limits.seed)?;
    let text = spec::emit(&recipe, !args.recipe_only, limits)?;
    if args.output == "-" {
        std::io::stdout()
            .write_all(text.as_bytes())
            .map_err(|e| Error::structural(format!("cannot write output: {e}")))?;
        // The spec itself is the output; no separate report.
        return Ok(Outcome { report: Value::Null, flagged: false });
    }
    std::fs::write(&args.output, &text).map_err(|e| Error::structural(format!("cannot write {}: {e}", args.output)))?;
    Ok(Outcome {
        report: json!({ "written": args.output, "bytes": text.len() }),
        flagged: false,
    })
}

fn run(cli: &Cli) -> Result<Outcome> {
    let limits = limits(cli);
    match &cli.command {
        Command::Laws(input) => run_laws(load(input, &limits)?, &limits),
        Command::Analyze(input) => with_doctrine!(load(input, &limits)?, d => commands::analyze(&d, &limits)),
        Command::Complete(input) => with_doctrine!(load(input, &limits)?, d => commands::complete(d, &limits)),
        Command::Singletons(input) => with_doctrine!(load(input, &limits)?, d => commands::singletons(&d)),
        Command::Counterexample { input, strong } => {
            with_doctrine!(load(input, &limits)?, d => commands::counterexample(&d, *strong))
        }
        Command::Quotient { input, object, relation, pairs } => {
            let built = matrix_form(load(input, &limits)?, &limits)?;
            let rel = match (relation, pairs) {
                (Some(m), _) => RelationArg::Matrix(m),
                (None, Some(p)) => RelationArg::Pairs(p),
                (None, None) => return Err(Error::InvalidParameter("give --relation or --pairs".into())),
            };
            commands::quotient(built.doctrine(), object, rel)
        }
        Command::Compactify { input, object, phi } => match matrix_form(load(input, &limits)?, &limits)? {
            Built::Identity(m) => commands::compactify_one(&m, object, phi.as_deref()),
            Built::Powerset(m) => commands::compactify_one(&m, object, phi.as_deref()),
            Built::Plain(_) => Err(Error::Unsupported("the spec has no monad".into())),
        },
        Command::Builtin(args) => run_builtin(args, &limits),
    }
}

fn diagnostic(e: &Error) -> (u8, Value) {
    let (code, kind, messages) = match e {
        Error::Structural(msgs) => (2, "structural", msgs.clone()),
        Error::TypeMismatch(m) => (2, "type_mismatch", vec![m.clone()]),
        Error::InvalidParameter(m) => (2, "invalid_parameter", vec![m.clone()]),
        Error::Precondition(m) => (2, "precondition", vec![m.clone()]),
        Error::Unsupported(m) => (2, "unsupported", vec![m.clone()]),
        Error::CapExceeded { .. } => (3, "cap_exceeded", vec![e.to_string()]),
    };
    (code, json!({ "error": { "kind": kind, "messages": messages } }))
}

/// Indented plain rendering of a report.
fn render_text(v: &Value, indent: usize, out: &mut String) {
    let pad = "  ".repeat(indent);
    match v {
        Value::Object(map) => {
            for (k, v) in map {
                match v {
                    Value::Object(m) if !m.is_empty() => {
                        out.push_str(&format!("{pad}{k}:\n"));
                        render_text(v, indent + 1, out);
                    }
                    Value::Array(a) if a.iter().any(|x| x.is_object() || x.is_array()) => {
                        out.push_str(&format!("{pad}{k}:\n"));
                        render_text(v, indent + 1, out);
                    }
                    _ => out.push_str(&format!("{pad}{k}: {}\n", scalar(v))),
                }
            }
        }
        Value::Array(items) => {
            for item in items {
                match item {
                    Value::Object(_) | Value::Array(_) => {
                        out.push_str(&format!("{pad}-\n"));
                        render_text(item, indent + 1, out);
                    }
                    _ => out.push_str(&format!("{pad}- {}\n", scalar(item))),
                }
            }
        }
        _ => out.push_str(&format!("{pad}{}\n", scalar(v))),
    }
}

fn scalar(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

fn emit(format: Format, v: &Value, to_stderr: bool) {
    let text = match format {
        Format::Json => pretty(v),
        Format::Text => {
            let mut s = String::new();
            render_text(v, 0, &mut s);
            s
        }
    };
    // A closed pipe is not worth a panic.
    let _ = if to_stderr {
        std::io::stderr().write_all(text.as_bytes())
    } else {
        std::io::stdout().write_all(text.as_bytes())
    };
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(outcome) => {
            if !outcome.report.is_null() {
                emit(cli.format, &outcome.report, false);
            }
            ExitCode::from(u8::from(outcome.flagged))
        }
        Err(e) => {
            let (code, v) = diagnostic(&e);
            emit(cli.format, &v, cli.format == Format::Text);
            ExitCode::from(code)
        }
    }
}
