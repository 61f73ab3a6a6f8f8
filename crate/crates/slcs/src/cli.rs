//! Command-line front-end. Every subcommand is a thin wrapper over a
//! library call: load JSON inputs, dispatch, and report on stdout with a
//! three-way exit code. 0 is success, 1 is a well-formed query whose
//! answer is negative (so shells can branch on it), 2 is a usage or input
//! error.

use std::fs;
use std::path::{Path, PathBuf};

use clap::{ColorChoice, Parser, Subcommand, ValueEnum};

use crate::bisim::{
    coarsest_bisimulation, coarsest_partition, lift_path_anchored, lift_path_forward,
    verify_path_preserving_on_walks, PointRelation, Variant,
};
use crate::checker::{oracle_sat_set, sat_set, Walk};
use crate::logic::parse;
use crate::model::QDModel;

/// What an invocation produced: the exit code and the lines to print.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CommandOutcome {
    pub exit_code: i32,
    pub lines: Vec<String>,
}

impl CommandOutcome {
    fn ok(lines: Vec<String>) -> CommandOutcome {
        CommandOutcome { exit_code: 0, lines }
    }

    fn negative(lines: Vec<String>) -> CommandOutcome {
        CommandOutcome { exit_code: 1, lines }
    }
}

#[derive(Parser)]
#[command(
    name = "slcs",
    version,
    about = "Spatial model checking and bisimulation on finite closure models",
    color = ColorChoice::Never
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum VariantArg {
    Modal,
    Converse,
}

impl From<VariantArg> for Variant {
    fn from(v: VariantArg) -> Variant {
        match v {
            VariantArg::Modal => Variant::Modal,
            VariantArg::Converse => Variant::Converse,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum RelationKind {
    Modal,
    Converse,
    Nbhd,
}

#[derive(Subcommand)]
enum Command {
    /// Print the points of a model that satisfy a formula
    Check { model: PathBuf, formula: String },
    /// Like check, but through the walk-enumerating reference evaluator
    OracleCheck {
        model: PathBuf,
        formula: String,
        /// Maximum walk length in points; defaults to the point count
        #[arg(long)]
        bound: Option<usize>,
    },
    /// Print the blocks of the coarsest bisimulation of two models
    Bisim {
        left: PathBuf,
        right: PathBuf,
        #[arg(long, value_enum, default_value_t = VariantArg::Converse)]
        variant: VariantArg,
    },
    /// Decide whether two points are bisimilar
    Bisimilar {
        left: PathBuf,
        left_point: String,
        right: PathBuf,
        right_point: String,
        #[arg(long, value_enum, default_value_t = VariantArg::Converse)]
        variant: VariantArg,
    },
    /// Check a relation file against the bisimulation conditions
    CheckRelation {
        left: PathBuf,
        right: PathBuf,
        relation: PathBuf,
        #[arg(long, value_enum, default_value_t = RelationKind::Converse)]
        variant: RelationKind,
    },
    /// Write the quotient of a model by its coarsest bisimulation
    Minimize {
        model: PathBuf,
        #[arg(long, value_enum, default_value_t = VariantArg::Converse)]
        variant: VariantArg,
        /// Write the quotient to a file instead of standard output
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Report separation, connectedness and transitivity of a model
    Props { model: PathBuf },
    /// Lift a walk through a relation into the other model
    LiftPath {
        left: PathBuf,
        right: PathBuf,
        relation: PathBuf,
        /// Comma-separated point ids forming a walk of the left model
        #[arg(long)]
        walk: String,
        /// Point of the right model to start from, or to pin the anchor to
        #[arg(long)]
        to: String,
        /// Pin the walk to the target at this index and lift both ways
        #[arg(long)]
        anchor: Option<usize>,
    },
    /// Verify the path-preserving conditions on bounded walks
    VerifyPpb {
        left: PathBuf,
        right: PathBuf,
        relation: PathBuf,
        #[arg(long, default_value_t = 4, value_parser = clap::value_parser!(u64).range(1..))]
        max_len: u64,
    },
    /// Print a model as a DOT digraph of its stored edges
    ExportDot { model: PathBuf },
}

/// Parses and dispatches `args`, given without the program name. Never
/// prints by itself; the caller decides what to do with the outcome.
pub fn run<T: Into<String>>(args: impl IntoIterator<Item = T>) -> CommandOutcome {
    let argv: Vec<String> = std::iter::once("slcs".to_string())
        .chain(args.into_iter().map(Into::into))
        .collect();
    let cli = match Cli::try_parse_from(argv.iter().map(String::as_str)) {
        Ok(cli) => cli,
        Err(e) => {
            let exit_code = match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => 0,
                _ => 2,
            };
            let lines = e.render().to_string().lines().map(str::to_string).collect();
            return CommandOutcome { exit_code, lines };
        }
    };
    match dispatch(cli.command) {
        Ok(outcome) => outcome,
        Err(message) => CommandOutcome { exit_code: 2, lines: vec![format!("error: {message}")] },
    }
}

fn load_model(path: &Path) -> Result<(QDModel, Vec<String>), String> {
    let text =
        fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    let loaded =
        QDModel::from_json(&text).map_err(|e| format!("{}: {e}", path.display()))?;
    let warnings = loaded
        .warnings
        .iter()
        .map(|w| format!("warning: {w}"))
        .collect();
    Ok((loaded.model, warnings))
}

fn load_relation<'m>(
    left: &'m QDModel,
    right: &'m QDModel,
    path: &Path,
) -> Result<PointRelation<'m>, String> {
    let text =
        fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    PointRelation::from_json(left, right, &text).map_err(|e| format!("{}: {e}", path.display()))
}

fn resolve(m: &QDModel, id: &str, path: &Path) -> Result<crate::model::Point, String> {
    m.point(id)
        .ok_or_else(|| format!("{}: unknown point {id:?}", path.display()))
}

fn sorted_ids(m: &QDModel, set: &crate::model::PointSet) -> Vec<String> {
    let mut ids: Vec<String> = m.ids(set).into_iter().map(str::to_string).collect();
    ids.sort_unstable();
    ids
}

fn dot_escape(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"")
}

fn dispatch(cmd: Command) -> Result<CommandOutcome, String> {
    match cmd {
        Command::Check { model, formula } => {
            let (m, mut lines) = load_model(&model)?;
            let f = parse(&formula).map_err(|e| format!("formula: {e}"))?;
            lines.extend(sorted_ids(&m, &sat_set(&m, &f)));
            Ok(CommandOutcome::ok(lines))
        }
        Command::OracleCheck { model, formula, bound } => {
            let (m, mut lines) = load_model(&model)?;
            let f = parse(&formula).map_err(|e| format!("formula: {e}"))?;
            let bound = bound.unwrap_or_else(|| m.len().max(1));
            let set = oracle_sat_set(&m, &f, bound).map_err(|e| e.to_string())?;
            lines.extend(sorted_ids(&m, &set));
            Ok(CommandOutcome::ok(lines))
        }
        Command::Bisim { left, right, variant } => {
            let (m1, mut lines) = load_model(&left)?;
            let (m2, warn2) = load_model(&right)?;
            lines.extend(warn2);
            let coarse = coarsest_bisimulation(&m1, &m2, variant.into());
            for block in coarse.partition.blocks() {
                let mut ids: Vec<&str> =
                    block.iter().map(|&x| coarse.union.id(x)).collect();
                ids.sort_unstable();
                lines.push(ids.join(" "));
            }
            Ok(CommandOutcome::ok(lines))
        }
        Command::Bisimilar { left, left_point, right, right_point, variant } => {
            let (m1, mut lines) = load_model(&left)?;
            let (m2, warn2) = load_model(&right)?;
            lines.extend(warn2);
            let x1 = resolve(&m1, &left_point, &left)?;
            let x2 = resolve(&m2, &right_point, &right)?;
            let related = crate::bisim::bisimilar(&m1, x1, &m2, x2, variant.into());
            lines.push(related.to_string());
            if related {
                Ok(CommandOutcome::ok(lines))
            } else {
                Ok(CommandOutcome::negative(lines))
            }
        }
        Command::CheckRelation { left, right, relation, variant } => {
            let (m1, mut lines) = load_model(&left)?;
            let (m2, warn2) = load_model(&right)?;
            lines.extend(warn2);
            let z = load_relation(&m1, &m2, &relation)?;
            let (holds, detail) = match variant {
                RelationKind::Modal => match z.check_modal() {
                    Ok(()) => (true, None),
                    Err(v) => (false, Some(v.to_string())),
                },
                RelationKind::Converse => match z.check_converse() {
                    Ok(()) => (true, None),
                    Err(v) => (false, Some(v.to_string())),
                },
                RelationKind::Nbhd => {
                    let ok = z
                        .is_nbhd_bisimulation_exhaustive()
                        .map_err(|e| e.to_string())?;
                    (ok, None)
                }
            };
            if holds && z.is_empty() {
                lines.push("warning: the relation is empty; the conditions hold vacuously".into());
            }
            lines.push(holds.to_string());
            lines.extend(detail);
            if holds {
                Ok(CommandOutcome::ok(lines))
            } else {
                Ok(CommandOutcome::negative(lines))
            }
        }
        Command::Minimize { model, variant, output } => {
            let (m, mut lines) = load_model(&model)?;
            let part = coarsest_partition(&m, variant.into());
            let q = m.quotient(&part).map_err(|e| e.to_string())?;
            let text = q.to_json();
            match output {
                Some(path) => {
                    fs::write(&path, text + "\n")
                        .map_err(|e| format!("{}: {e}", path.display()))?;
                }
                None => lines.extend(text.lines().map(str::to_string)),
            }
            Ok(CommandOutcome::ok(lines))
        }
        Command::Props { model } => {
            let (m, mut lines) = load_model(&model)?;
            let sep = m.separation_report();
            lines.push(format!(
                "t0={} t1={} connected={} topological={}",
                sep.t0,
                sep.t1,
                m.is_connected(),
                m.is_topological()
            ));
            Ok(CommandOutcome::ok(lines))
        }
        Command::LiftPath { left, right, relation, walk, to, anchor } => {
            let (m1, mut lines) = load_model(&left)?;
            let (m2, warn2) = load_model(&right)?;
            lines.extend(warn2);
            let z = load_relation(&m1, &m2, &relation)?;
            let ids: Vec<&str> = walk.split(',').collect();
            let source = Walk::from_ids(&m1, &ids).map_err(|e| e.to_string())?;
            let target = resolve(&m2, &to, &right)?;
            let lifted = match anchor {
                Some(n) => lift_path_anchored(&z, &source, n, target),
                None => lift_path_forward(&z, &source, target),
            };
            match lifted {
                Ok(lift) => {
                    lines.push(lift.lifted().ids().join(","));
                    Ok(CommandOutcome::ok(lines))
                }
                Err(e) => {
                    lines.push(e.to_string());
                    Ok(CommandOutcome::negative(lines))
                }
            }
        }
        Command::VerifyPpb { left, right, relation, max_len } => {
            let (m1, mut lines) = load_model(&left)?;
            let (m2, warn2) = load_model(&right)?;
            lines.extend(warn2);
            let z = load_relation(&m1, &m2, &relation)?;
            match verify_path_preserving_on_walks(&z, max_len as usize) {
                Ok(()) => {
                    lines.push("true".into());
                    Ok(CommandOutcome::ok(lines))
                }
                Err(v) => {
                    lines.push("false".into());
                    lines.push(v.to_string());
                    Ok(CommandOutcome::negative(lines))
                }
            }
        }
        Command::ExportDot { model } => {
            let (m, mut lines) = load_model(&model)?;
            lines.push("digraph model {".into());
            for x in m.points() {
                let props: Vec<&str> = m.props(x).iter().map(String::as_str).collect();
                lines.push(format!(
                    "  \"{}\" [label=\"{} {{{}}}\"];",
                    dot_escape(m.id(x)),
                    dot_escape(m.id(x)),
                    dot_escape(&props.join(","))
                ));
            }
            for (a, b) in m.edges() {
                lines.push(format!(
                    "  \"{}\" -> \"{}\";",
                    dot_escape(m.id(a)),
                    dot_escape(m.id(b))
                ));
            }
            lines.push("}".into());
            Ok(CommandOutcome::ok(lines))
        }
    }
}
