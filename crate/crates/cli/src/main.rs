//! `bmres`: Betti numbers, Barile-Macchia resolutions and order searches from
//! the command line. Every record carries the input hash, version, seed and
//! the budget used, and no timing, so reruns are byte-identical.

mod commands;
mod input;
mod output;

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use bmres::{Budget, SearchConfig, Strategy};
use clap::{Args, Parser, Subcommand};
use rayon::prelude::*;

use commands::HostChoice;
use input::{InputKind, Item};
use output::{Format, Outcome, Status};

#[derive(Parser)]
#[command(name = "bmres", version, about = "Morse resolutions of monomial ideals")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct InputArgs {
    /// Input file: monomials, an edge list, graph6 lines (`.g6`), or hypergraph JSON.
    file: Option<PathBuf>,
    /// Use a named graph instead of a file, e.g. `"cycle 5"` or `net`.
    #[arg(long, conflicts_with = "file")]
    named: Option<String>,
    #[arg(long, value_enum, default_value_t = InputKind::Auto)]
    input_kind: InputKind,
}

#[derive(Args, Clone)]
struct RunArgs {
    /// Output format; defaults to json for one input and jsonl for a corpus.
    #[arg(long, value_enum)]
    format: Option<Format>,
    /// Write to this file instead of stdout.
    #[arg(long, short)]
    output: Option<PathBuf>,
    /// Worker threads for corpus inputs (0 = all cores).
    #[arg(long, default_value_t = 0)]
    jobs: usize,
}

#[derive(Args, Clone)]
struct SearchArgs {
    #[arg(long, value_enum, default_value_t = StrategyArg::Exhaustive)]
    strategy: StrategyArg,
    /// Maximum number of orders to test.
    #[arg(long)]
    budget_orders: Option<u64>,
    /// Wall-clock limit in seconds.
    #[arg(long)]
    budget_seconds: Option<f64>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Permutations tried in the random stage.
    #[arg(long, default_value_t = 64)]
    random_orders: usize,
}

#[derive(Clone, Copy, clap::ValueEnum)]
enum StrategyArg {
    Given,
    Heuristic,
    Random,
    Exhaustive,
}

impl SearchArgs {
    fn config(&self) -> SearchConfig {
        let mut config = SearchConfig::new(match self.strategy {
            StrategyArg::Given => Strategy::Given,
            StrategyArg::Heuristic => Strategy::Heuristic,
            StrategyArg::Random => Strategy::Random,
            StrategyArg::Exhaustive => Strategy::Exhaustive,
        });
        config.budget = self.budget();
        config.seed = self.seed;
        config.random_orders = self.random_orders;
        config
    }

    fn budget(&self) -> Budget {
        Budget {
            max_orders: self.budget_orders,
            max_seconds: self.budget_seconds,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Multigraded Betti numbers over GF(2).
    Betti {
        #[command(flatten)]
        input: InputArgs,
        #[command(flatten)]
        run: RunArgs,
    },
    /// Barile-Macchia matching for one order, its critical cells and minimality.
    Bm {
        #[command(flatten)]
        input: InputArgs,
        #[command(flatten)]
        run: RunArgs,
        /// Comma-separated generators, largest first; defaults to input order.
        #[arg(long)]
        order: Option<String>,
        /// Include the Morse differential.
        #[arg(long)]
        complex: bool,
    },
    /// Search for a bridge-friendly order.
    BridgeFriendly {
        #[command(flatten)]
        input: InputArgs,
        #[command(flatten)]
        run: RunArgs,
        #[command(flatten)]
        search: SearchArgs,
        /// Order tried first, comma-separated, largest first.
        #[arg(long)]
        order: Option<String>,
    },
    /// Per-multidegree order search certifying a minimal generalized Barile-Macchia resolution.
    CertifyGbm {
        #[command(flatten)]
        input: InputArgs,
        #[command(flatten)]
        run: RunArgs,
        #[command(flatten)]
        search: SearchArgs,
    },
    /// Order from a rooted host tree and its bridge-friendly verdict.
    Hypertree {
        #[command(flatten)]
        input: InputArgs,
        #[command(flatten)]
        run: RunArgs,
        /// Host tree as an edge list over the hypergraph's vertex labels.
        #[arg(long, conflicts_with = "search_host")]
        host: Option<PathBuf>,
        /// Root label; by default the first vertex the hypergraph is rooted at.
        #[arg(long)]
        root: Option<String>,
        /// Search all labelled trees for a rooted host.
        #[arg(long)]
        search_host: bool,
        /// Maximum number of trees examined by --search-host.
        #[arg(long)]
        budget_trees: Option<u64>,
    },
}

struct Job<'a> {
    name: &'static str,
    seed: u64,
    budget: Budget,
    run: &'a RunArgs,
}

fn execute<F>(job: Job, items: Vec<Item>, work: F) -> ExitCode
where
    F: Fn(&input::Subject) -> bmres::Result<Outcome> + Sync,
{
    let corpus = items.len() != 1;
    let pool = match rayon::ThreadPoolBuilder::new().num_threads(job.run.jobs).build() {
        Ok(p) => p,
        Err(e) => return fail(&format!("thread pool: {e}")),
    };
    let outcomes: Vec<Outcome> = pool.install(|| {
        items
            .par_iter()
            .map(|item| match &item.subject {
                Ok(subject) => work(subject).unwrap_or_else(|e| Outcome::error(&e)),
                Err(e) => Outcome::error(e),
            })
            .collect()
    });
    let status = outcomes
        .iter()
        .map(|o| o.status)
        .max_by_key(|s| s.severity())
        .unwrap_or(Status::Ok);
    if !corpus {
        if let Some(msg) = outcomes[0].result.get("error").and_then(|e| e.as_str()) {
            eprintln!("bmres: {}: {msg}", items[0].name);
        }
    }
    let records: Vec<_> = items
        .iter()
        .zip(outcomes)
        .map(|(item, o)| output::record(job.name, &item.name, &item.text, job.seed, job.budget, o))
        .collect();
    let format = job
        .run
        .format
        .unwrap_or(if corpus { Format::Jsonl } else { Format::Json });
    let written = match &job.run.output {
        Some(path) => File::create(path).and_then(|f| {
            let mut w = BufWriter::new(f);
            output::emit(&records, format, &mut w)?;
            w.flush()
        }),
        None => {
            let stdout = std::io::stdout();
            let mut lock = stdout.lock();
            output::emit(&records, format, &mut lock)
        }
    };
    if let Err(e) = written {
        return fail(&format!("writing output: {e}"));
    }
    ExitCode::from(status.code() as u8)
}

fn fail(msg: &str) -> ExitCode {
    eprintln!("bmres: {msg}");
    ExitCode::from(Status::InputError.code() as u8)
}

fn load(input: &InputArgs) -> Result<Vec<Item>, String> {
    input::load(input.file.as_deref(), input.named.as_deref(), input.input_kind)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let unlimited = Budget::unlimited();
    match &cli.command {
        Command::Betti { input, run } => match load(input) {
            Ok(items) => execute(
                Job {
                    name: "betti",
                    seed: 0,
                    budget: unlimited,
                    run,
                },
                items,
                commands::betti,
            ),
            Err(e) => fail(&e),
        },
        Command::Bm {
            input,
            run,
            order,
            complex,
        } => match load(input) {
            Ok(items) => execute(
                Job {
                    name: "bm",
                    seed: 0,
                    budget: unlimited,
                    run,
                },
                items,
                |s| commands::bm(s, order.as_deref(), *complex),
            ),
            Err(e) => fail(&e),
        },
        Command::BridgeFriendly {
            input,
            run,
            search,
            order,
        } => match load(input) {
            Ok(items) => {
                let config = search.config();
                let job = Job {
                    name: "bridge-friendly",
                    seed: search.seed,
                    budget: search.budget(),
                    run,
                };
                execute(job, items, |s| commands::bridge_friendly(s, order.as_deref(), &config))
            }
            Err(e) => fail(&e),
        },
        Command::CertifyGbm { input, run, search } => match load(input) {
            Ok(items) => {
                let config = search.config();
                let job = Job {
                    name: "certify-gbm",
                    seed: search.seed,
                    budget: search.budget(),
                    run,
                };
                execute(job, items, |s| commands::certify_gbm(s, &config))
            }
            Err(e) => fail(&e),
        },
        Command::Hypertree {
            input,
            run,
            host,
            root,
            search_host,
            budget_trees,
        } => {
            let item = match input::load_hypergraph(input.file.as_deref(), input.named.as_deref(), input.input_kind) {
                Ok(item) => item,
                Err(e) => return fail(&e),
            };
            let host_text = match host {
                Some(path) => match std::fs::read_to_string(path) {
                    Ok(t) => Some(t),
                    Err(e) => return fail(&format!("{}: {e}", path.display())),
                },
                None => None,
            };
            let choice = HostChoice {
                host_text: host_text.as_deref(),
                root: root.as_deref(),
                search: *search_host,
                max_trees: *budget_trees,
            };
            let budget = Budget {
                max_orders: *budget_trees,
                max_seconds: None,
            };
            let job = Job {
                name: "hypertree",
                seed: 0,
                budget,
                run,
            };
            execute(job, vec![item], |s| commands::hypertree(s, &choice))
        }
    }
}
