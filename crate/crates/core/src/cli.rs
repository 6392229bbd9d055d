//! Command-line front end. Exit codes: 0 success, 1 data/predicate failure,
//! 2 usage error.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::eval::{select_st, EvalEnv, StrategyRegistry, Strictness};
use crate::geometry::{Interval, Region};
use crate::io::{ingest_csv, parse_decimal, Dataset};
use crate::nf2::{compile_spatial, compile_temporal, execute, to_nf2, Nf2Error, RelExpr};
use crate::predicate::{parse_predicate, Predicate};
use crate::relations::{
    allen_predicate, catalog_tsv, classify_allen, classify_de9im, de9im_predicate, AllenLabel,
    De9imLabel,
};

#[derive(Parser, Debug)]
#[command(
    name = "trajql",
    version,
    about = "Spatio-temporal selection over trajectory datasets"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Default)]
struct Ranges {
    /// Named rectangle, repeatable.
    #[arg(long = "region", value_name = "NAME=X_MIN,Y_MIN,X_MAX,Y_MAX", value_parser = parse_region)]
    regions: Vec<(String, Region)>,
    /// Named open time interval, repeatable.
    #[arg(long = "interval", value_name = "NAME=START,END", value_parser = parse_interval)]
    intervals: Vec<(String, Interval)>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Load a dataset and report invariant violations.
    Validate { data: PathBuf },
    /// Print the tids of trajectories satisfying a predicate.
    Query {
        data: PathBuf,
        #[arg(
            long,
            required_unless_present = "relation",
            conflicts_with = "relation"
        )]
        predicate: Option<String>,
        /// Catalog relation label used as the predicate.
        #[arg(long)]
        relation: Option<String>,
        #[command(flatten)]
        ranges: Ranges,
        /// strict | relaxed | approx:<name>[:k]
        #[arg(long, default_value = "strict")]
        strictness: String,
    },
    /// Classify each trajectory against a region or an interval.
    Classify {
        #[command(subcommand)]
        kind: ClassifyKind,
    },
    /// Print the algebra expression compiled for a relation.
    Explain {
        #[arg(long)]
        relation: String,
        #[command(flatten)]
        ranges: Ranges,
        #[arg(long, default_value = "strict")]
        strictness: String,
    },
    /// Like `query --relation`, but evaluated by the algebra engine.
    ExecNf2 {
        data: PathBuf,
        #[arg(long)]
        relation: String,
        #[command(flatten)]
        ranges: Ranges,
        #[arg(long, default_value = "strict")]
        strictness: String,
    },
    /// Print the relation catalog as tab-separated text.
    Catalog,
}

#[derive(Subcommand, Debug)]
enum ClassifyKind {
    /// Topological relations against the single given region.
    De9im {
        data: PathBuf,
        #[command(flatten)]
        ranges: Ranges,
        #[arg(long, default_value = "strict")]
        strictness: String,
        /// Report direction-sensitive labels only in recorded direction.
        #[arg(long)]
        no_normalize: bool,
    },
    /// Interval relation of each trajectory's time span.
    Allen {
        data: PathBuf,
        #[command(flatten)]
        ranges: Ranges,
    },
}

fn split_named(text: &str, arity: usize) -> Result<(String, Vec<f64>), String> {
    let (name, rest) = text
        .split_once('=')
        .ok_or_else(|| format!("expected NAME=values, got `{text}`"))?;
    let values = rest
        .split(',')
        .map(parse_decimal)
        .collect::<Result<Vec<_>, _>>()?;
    if values.len() != arity {
        return Err(format!(
            "expected {arity} comma-separated numbers, got {}",
            values.len()
        ));
    }
    Ok((name.trim().to_owned(), values))
}

fn parse_region(text: &str) -> Result<(String, Region), String> {
    let (name, v) = split_named(text, 4)?;
    Ok((
        name,
        Region::new(v[0], v[1], v[2], v[3]).map_err(|e| e.to_string())?,
    ))
}

fn parse_interval(text: &str) -> Result<(String, Interval), String> {
    let (name, v) = split_named(text, 2)?;
    Ok((name, Interval::new(v[0], v[1]).map_err(|e| e.to_string())?))
}

enum Failure {
    Usage(String),
    Failed(String),
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Failed(e.to_string())
    }
}

#[derive(Clone, Copy)]
enum Label {
    De9im(De9imLabel),
    Allen(AllenLabel),
}

fn parse_label(text: &str) -> Result<Label, Failure> {
    let norm: String = text
        .chars()
        .filter(|c| !matches!(c, '-' | '_' | ' '))
        .collect();
    if let Ok(l) = norm.parse::<De9imLabel>() {
        return Ok(Label::De9im(l));
    }
    if let Ok(l) = norm.parse::<AllenLabel>() {
        return Ok(Label::Allen(l));
    }
    Err(Failure::Usage(format!("unknown relation `{text}`")))
}

fn env_from(ranges: &Ranges) -> Result<EvalEnv, Failure> {
    let mut env = EvalEnv::new();
    for (name, r) in &ranges.regions {
        env.add_region(name, *r)
            .map_err(|e| Failure::Usage(e.to_string()))?;
    }
    for (name, i) in &ranges.intervals {
        env.add_interval(name, *i)
            .map_err(|e| Failure::Usage(e.to_string()))?;
    }
    Ok(env)
}

fn strictness(text: &str) -> Result<Strictness, Failure> {
    StrategyRegistry::new()
        .parse_strictness(text)
        .map_err(|e| Failure::Usage(e.to_string()))
}

fn load(path: &PathBuf) -> Result<Dataset, Failure> {
    ingest_csv(path).map_err(|e| Failure::Failed(e.to_string()))
}

fn only_region(ranges: &Ranges) -> Result<Region, Failure> {
    match ranges.regions.as_slice() {
        [(_, r)] => Ok(*r),
        _ => Err(Failure::Usage("exactly one --region is required".into())),
    }
}

fn only_interval(ranges: &Ranges) -> Result<Interval, Failure> {
    match ranges.intervals.as_slice() {
        [(_, i)] => Ok(*i),
        _ => Err(Failure::Usage("exactly one --interval is required".into())),
    }
}

fn compile(label: Label, ranges: &Ranges, s: &Strictness) -> Result<RelExpr, Failure> {
    let result = match label {
        Label::De9im(l) => compile_spatial(l, &only_region(ranges)?, s),
        Label::Allen(l) => compile_temporal(l, &only_interval(ranges)?),
    };
    result.map_err(|e| match e {
        Nf2Error::UnsupportedLabel(_) | Nf2Error::UnsupportedStrictness(_) => {
            Failure::Usage(e.to_string())
        }
        other => Failure::Failed(other.to_string()),
    })
}

fn catalog_predicate(label: Label) -> Predicate {
    match label {
        Label::De9im(l) => de9im_predicate(l),
        Label::Allen(l) => allen_predicate(l),
    }
}

fn run(cli: Cli, out: &mut dyn Write, err: &mut dyn Write) -> Result<(), Failure> {
    match cli.command {
        Command::Validate { data } => {
            let d = load(&data)?;
            writeln!(
                out,
                "ok: {} trajectories, {} points",
                d.trajectories.len(),
                d.point_count()
            )?;
        }
        Command::Query {
            data,
            predicate,
            relation,
            ranges,
            strictness: s,
        } => {
            let s = strictness(&s)?;
            let env = env_from(&ranges)?;
            let pred = match (predicate, relation) {
                (Some(text), _) => {
                    parse_predicate(&text).map_err(|e| Failure::Failed(e.to_string()))?
                }
                (None, Some(label)) => catalog_predicate(parse_label(&label)?),
                (None, None) => {
                    return Err(Failure::Usage(
                        "--predicate or --relation is required".into(),
                    ))
                }
            };
            let d = load(&data)?;
            let selected = select_st(&d.trajectories, &pred, &env, &s)
                .map_err(|e| Failure::Failed(e.to_string()))?;
            for tid in selected.tids() {
                writeln!(out, "{tid}")?;
            }
        }
        Command::Classify {
            kind:
                ClassifyKind::De9im {
                    data,
                    ranges,
                    strictness: s,
                    no_normalize,
                },
        } => {
            let s = strictness(&s)?;
            let r = only_region(&ranges)?;
            let d = load(&data)?;
            for (tid, t) in d.trajectories.rows() {
                let labels = classify_de9im(t, &r, &s, !no_normalize)
                    .map_err(|e| Failure::Failed(e.to_string()))?;
                let text = if labels.is_empty() {
                    "-".to_owned()
                } else {
                    labels
                        .iter()
                        .map(|l| l.name())
                        .collect::<Vec<_>>()
                        .join(",")
                };
                writeln!(out, "{tid}\t{text}")?;
            }
        }
        Command::Classify {
            kind: ClassifyKind::Allen { data, ranges },
        } => {
            let i = only_interval(&ranges)?;
            let d = load(&data)?;
            let mut failed = 0usize;
            for (tid, t) in d.trajectories.rows() {
                match classify_allen(t, &i) {
                    Ok(label) => writeln!(out, "{tid}\t{label}")?,
                    Err(e) => {
                        failed += 1;
                        writeln!(err, "{tid}: {e}")?;
                    }
                }
            }
            if failed > 0 {
                return Err(Failure::Failed(format!(
                    "{failed} trajectories could not be classified"
                )));
            }
        }
        Command::Explain {
            relation,
            ranges,
            strictness: s,
        } => {
            let e = compile(parse_label(&relation)?, &ranges, &strictness(&s)?)?;
            writeln!(out, "{e}")?;
        }
        Command::ExecNf2 {
            data,
            relation,
            ranges,
            strictness: s,
        } => {
            let e = compile(parse_label(&relation)?, &ranges, &strictness(&s)?)?;
            let d = load(&data)?;
            let result = execute(&e, &to_nf2(&d.trajectories))
                .map_err(|e| Failure::Failed(e.to_string()))?;
            for tid in result.tids() {
                writeln!(out, "{tid}")?;
            }
        }
        Command::Catalog => out.write_all(catalog_tsv().as_bytes())?,
    }
    Ok(())
}

/// Runs the command line `args` (including the program name) and returns
/// the process exit code.
pub fn run_cli<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let text = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = out.write_all(text.as_bytes());
                    0
                }
                _ => {
                    let _ = err.write_all(text.as_bytes());
                    2
                }
            };
        }
    };
    match run(cli, out, err) {
        Ok(()) => 0,
        Err(Failure::Usage(m)) => {
            let _ = writeln!(err, "error: {m}");
            2
        }
        Err(Failure::Failed(m)) => {
            let _ = writeln!(err, "error: {m}");
            1
        }
    }
}
