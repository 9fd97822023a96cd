//! Command-line front end: build topologies, color routings, compute
//! bounds and designs, certify optimality, and reproduce summary tables.
//!
//! Exit codes: 0 success/optimal, 2 invalid parameters, 3 failed
//! self-verification, 4 inconclusive within budget.

use std::io::Read;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use treewave::bounds::{
    best_vertex_cut_bound, edge_cut_bound_tree, forwarding_index_tree,
};
use treewave::colorings::{
    color_tree, greedy_coloring, verify_assignment, ColoredInstance, GreedyOrder,
};
use treewave::designs::{one_factorization, total_coloring_odd};
use treewave::exact::{certify, exact_chromatic, max_clique};
use treewave::graph::{
    all_pairs_routing, build_complete_mary_tree, build_double_tree, build_spider,
    conflict_graph, ConflictGraph, SpiderShape, Tree,
};
use treewave::table::{make_table, table_to_csv, table_to_json, DEFAULT_PATH_CAP};

const EXIT_BAD_PARAMS: u8 = 2;
const EXIT_VERIFY_FAILED: u8 = 3;
const EXIT_INCONCLUSIVE: u8 = 4;

#[derive(Parser)]
#[command(name = "treewave", version, about = "Wavelength assignment on tree networks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum OutputFormat {
    Json,
    Csv,
    Dot,
    Text,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum FamilyArg {
    Mary,
    Spider,
    Double,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ShapeArg {
    Path,
    Star,
    FullMary,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum MethodArg {
    Construct,
    Greedy,
}

#[derive(Args)]
struct FamilyParams {
    /// Topology family
    #[arg(long, value_enum, default_value = "mary")]
    family: FamilyArg,
    /// Arity of the m-ary or double tree
    #[arg(short, default_value_t = 2)]
    m: usize,
    /// Height of the tree (capital -H; -h is help)
    #[arg(short = 'H', long = "height", default_value_t = 1)]
    h: usize,
    /// Spider: root degree
    #[arg(short, default_value_t = 3)]
    k: usize,
    /// Spider: vertices per component
    #[arg(short, default_value_t = 1)]
    t: usize,
    /// Spider component shape
    #[arg(long, value_enum, default_value = "path")]
    shape: ShapeArg,
}

impl FamilyParams {
    fn build(&self) -> treewave::Result<Tree> {
        match self.family {
            FamilyArg::Mary => build_complete_mary_tree(self.m, self.h),
            FamilyArg::Double => build_double_tree(self.m, self.h),
            FamilyArg::Spider => {
                let shape = match self.shape {
                    ShapeArg::Path => SpiderShape::Path,
                    ShapeArg::Star => SpiderShape::Star,
                    ShapeArg::FullMary => SpiderShape::FullMaryIfApplicable,
                };
                build_spider(self.k, self.t, shape)
            }
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Build a topology and emit it as JSON or DOT
    Build {
        #[command(flatten)]
        family: FamilyParams,
        #[arg(long, value_enum, default_value = "json")]
        format: OutputFormat,
        #[arg(long)]
        out: Option<std::path::PathBuf>,
    },
    /// Color the all-to-all routing of an instance
    Color {
        #[command(flatten)]
        family: FamilyParams,
        #[arg(long, value_enum, default_value = "construct")]
        method: MethodArg,
        /// Re-check properness before exiting
        #[arg(long)]
        verify: bool,
        #[arg(long, value_enum, default_value = "text")]
        format: OutputFormat,
        #[arg(long)]
        out: Option<std::path::PathBuf>,
    },
    /// Edge-cut bound, best vertex-cut bound and forwarding index
    Bounds {
        #[command(flatten)]
        family: FamilyParams,
        #[arg(long, value_enum, default_value = "text")]
        format: OutputFormat,
    },
    /// Print the total coloring of K_n (odd n) or 1-factorization of K_m (even)
    Designs {
        #[arg(short, default_value_t = 5)]
        n: usize,
        #[arg(long, value_enum, default_value = "text")]
        format: OutputFormat,
    },
    /// Certify optimality of the constructive coloring of T_{m,h}
    Certify {
        #[arg(short, default_value_t = 2)]
        m: usize,
        #[arg(short = 'H', long = "height", default_value_t = 1)]
        h: usize,
        #[arg(long)]
        budget_ms: Option<u64>,
    },
    /// Summary table over a parameter grid
    Table {
        /// Inclusive range, e.g. 1..4
        #[arg(long, default_value = "1..4")]
        m_range: String,
        #[arg(long, default_value = "1..3")]
        h_range: String,
        /// Skip constructive columns above this many paths
        #[arg(long, default_value_t = DEFAULT_PATH_CAP)]
        path_cap: usize,
        #[arg(long, value_enum, default_value = "json")]
        format: OutputFormat,
        #[arg(long)]
        out: Option<std::path::PathBuf>,
    },
    /// Exact chromatic number of a serialized conflict graph (stdin or --in)
    Oracle {
        #[arg(long = "in")]
        input: Option<std::path::PathBuf>,
        #[arg(long)]
        budget_ms: Option<u64>,
    },
}

fn budget_default(cli_value: Option<u64>) -> u64 {
    cli_value
        .or_else(|| {
            std::env::var("TREEWAVE_BUDGET_MS")
                .ok()
                .and_then(|s| s.parse().ok())
        })
        .unwrap_or(60_000)
}

fn parse_range(spec: &str) -> Result<std::ops::RangeInclusive<usize>, String> {
    let (lo, hi) = spec
        .split_once("..")
        .ok_or_else(|| format!("range must look like 1..4, got {spec}"))?;
    let lo: usize = lo.trim().parse().map_err(|_| format!("bad range start in {spec}"))?;
    let hi: usize = hi.trim().parse().map_err(|_| format!("bad range end in {spec}"))?;
    if lo > hi || lo == 0 {
        return Err(format!("empty or zero-based range {spec}"));
    }
    Ok(lo..=hi)
}

fn emit(out: &Option<std::path::PathBuf>, payload: &str) -> std::io::Result<()> {
    match out {
        Some(path) => std::fs::write(path, payload),
        None => {
            print!("{payload}");
            Ok(())
        }
    }
}

fn fail(code: u8, msg: &str) -> ExitCode {
    eprintln!("error: {msg}");
    ExitCode::from(code)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(e) => fail(EXIT_BAD_PARAMS, &e.to_string()),
    }
}

fn run(cli: Cli) -> Result<ExitCode, Box<dyn std::error::Error>> {
    match cli.command {
        Command::Build { family, format, out } => {
            let tree = match family.build() {
                Ok(t) => t,
                Err(e) => return Ok(fail(EXIT_BAD_PARAMS, &e.to_string())),
            };
            let payload = match format {
                OutputFormat::Dot => tree.to_dot(),
                _ => format!("{:#}\n", tree.to_json()),
            };
            emit(&out, &payload)?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Color { family, method, verify, format, out } => {
            if family.family == FamilyArg::Mary && family.h == 0 {
                println!("0 colors, proper (empty routing)");
                return Ok(ExitCode::SUCCESS);
            }
            let tree = match family.build() {
                Ok(t) => t,
                Err(e) => return Ok(fail(EXIT_BAD_PARAMS, &e.to_string())),
            };
            let instance = match color_instance(tree, method) {
                Ok(i) => i,
                Err(treewave::Error::VerificationFailed(msg)) => {
                    return Ok(fail(EXIT_VERIFY_FAILED, &msg))
                }
                Err(e) => return Ok(fail(EXIT_BAD_PARAMS, &e.to_string())),
            };
            if verify {
                let report = verify_assignment(&instance.routing, &instance.assignment)?;
                if !report.proper {
                    return Ok(fail(
                        EXIT_VERIFY_FAILED,
                        &format!("{} violations", report.violations.len()),
                    ));
                }
            }
            let family_tag = instance.tree.family();
            let payload = match format {
                OutputFormat::Json => format!(
                    "{:#}\n",
                    instance.assignment.to_json(&instance.routing, &family_tag)
                ),
                OutputFormat::Csv => instance.assignment.to_csv(&instance.routing),
                _ => {
                    if verify {
                        format!("{} colors, proper\n", instance.assignment.num_colors)
                    } else {
                        format!("{} colors\n", instance.assignment.num_colors)
                    }
                }
            };
            emit(&out, &payload)?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Bounds { family, format } => {
            let tree = match family.build() {
                Ok(t) => t,
                Err(e) => return Ok(fail(EXIT_BAD_PARAMS, &e.to_string())),
            };
            let edge = edge_cut_bound_tree(&tree)?;
            let vertex = if tree.n() > 2 {
                Some(best_vertex_cut_bound(&tree, 1)?)
            } else {
                None
            };
            let pi = forwarding_index_tree(&tree)?;
            match format {
                OutputFormat::Json => {
                    let vertex_json = vertex
                        .as_ref()
                        .map(|v| v.to_json())
                        .unwrap_or(serde_json::Value::Null);
                    println!(
                        "{:#}",
                        serde_json::json!({
                            "edge_cut": edge.to_json(),
                            "vertex_cut": vertex_json,
                            "pi": pi,
                        })
                    );
                }
                _ => {
                    println!("edge_cut {}", edge.bound);
                    match &vertex {
                        Some(v) => println!("vertex_cut {}", v.bound),
                        None => println!("vertex_cut n/a"),
                    }
                    println!("pi {pi}");
                }
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Designs { n, format } => {
            if n == 0 {
                return Ok(fail(EXIT_BAD_PARAMS, "n must be at least 1"));
            }
            if n % 2 == 1 {
                let tc = total_coloring_odd(n)?;
                match format {
                    OutputFormat::Json => println!("{:#}", tc.to_json()),
                    _ => {
                        println!("total coloring of K_{n} ({n} colors, 0-based)");
                        for i in 0..n {
                            println!("vertex {i}: color {}", tc.vertex(i));
                        }
                        for i in 0..n {
                            for j in i + 1..n {
                                println!("edge {{{i},{j}}}: color {}", tc.edge(i, j));
                            }
                        }
                    }
                }
            } else {
                let ec = one_factorization(n)?;
                match format {
                    OutputFormat::Json => println!("{:#}", ec.to_json()),
                    _ => {
                        println!(
                            "1-factorization of K_{n} ({} matchings, 0-based)",
                            n - 1
                        );
                        for i in 0..n {
                            for j in i + 1..n {
                                println!("edge {{{i},{j}}}: color {}", ec.edge(i, j));
                            }
                        }
                    }
                }
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Certify { m, h, budget_ms } => {
            let budget = budget_default(budget_ms);
            let cert = match certify(m, h, budget) {
                Ok(c) => c,
                Err(e) => return Ok(fail(EXIT_BAD_PARAMS, &e.to_string())),
            };
            println!("{:#}", cert.to_json());
            if cert.optimal {
                Ok(ExitCode::SUCCESS)
            } else {
                Ok(ExitCode::from(EXIT_INCONCLUSIVE))
            }
        }
        Command::Table { m_range, h_range, path_cap, format, out } => {
            let ms = match parse_range(&m_range) {
                Ok(r) => r,
                Err(e) => return Ok(fail(EXIT_BAD_PARAMS, &e)),
            };
            let hs = match parse_range(&h_range) {
                Ok(r) => r,
                Err(e) => return Ok(fail(EXIT_BAD_PARAMS, &e)),
            };
            let rows = make_table(ms, hs, path_cap)?;
            let payload = match format {
                OutputFormat::Csv => table_to_csv(&rows),
                _ => format!("{}\n", table_to_json(&rows)),
            };
            emit(&out, &payload)?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Oracle { input, budget_ms } => {
            let budget = budget_default(budget_ms);
            let mut raw = String::new();
            match &input {
                Some(path) => raw = std::fs::read_to_string(path)?,
                None => {
                    std::io::stdin().read_to_string(&mut raw)?;
                }
            }
            let doc: serde_json::Value = serde_json::from_str(&raw)?;
            let order = doc["order"]
                .as_u64()
                .ok_or("conflict graph document needs an integer \"order\"")?
                as usize;
            let mut cg = ConflictGraph::new(order);
            for edge in doc["edges"].as_array().ok_or("missing \"edges\" array")? {
                let i = edge[0].as_u64().ok_or("bad edge endpoint")? as usize;
                let j = edge[1].as_u64().ok_or("bad edge endpoint")? as usize;
                if i >= order || j >= order {
                    return Ok(fail(EXIT_BAD_PARAMS, "edge endpoint out of range"));
                }
                cg.add_edge(i, j);
            }
            let clique = max_clique(&cg, budget / 4 + 1);
            let result = exact_chromatic(&cg, clique.size, 0, budget)?;
            println!(
                "{:#}",
                serde_json::json!({
                    "order": order,
                    "lower": result.lower,
                    "upper": result.upper,
                    "exact": result.exact,
                    "budget_exhausted": result.budget_exhausted,
                })
            );
            if result.exact.is_some() {
                Ok(ExitCode::SUCCESS)
            } else {
                Ok(ExitCode::from(EXIT_INCONCLUSIVE))
            }
        }
    }
}

fn color_instance(tree: Tree, method: MethodArg) -> treewave::Result<ColoredInstance> {
    let routing = all_pairs_routing(&tree)?;
    let assignment = match method {
        MethodArg::Construct => color_tree(&tree, &routing)?,
        MethodArg::Greedy => {
            let cg = conflict_graph(&routing);
            greedy_coloring(&cg, GreedyOrder::Canonical)
        }
    };
    Ok(ColoredInstance { tree, routing, assignment })
}
