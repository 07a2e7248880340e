//! `fogsec`: benchmarks, scenario runs and cost-model reports.
//!
//! Exit status is 0 on success, 1 when a scenario assertion or a cost
//! comparison fails, and 2 on a usage error.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use fogsec::bench::{self, BenchConfig, Point, Suite};
use fogsec::costmodel::{self, Table};
use fogsec::fogsim::{Scenario, Simulation, BUILTIN_SCENARIOS};
use fogsec::pairing::{setup_pairing, Backend};

#[derive(Parser)]
#[command(name = "fogsec", version, about = "Fog-assisted IIoT security protocols: benchmarks, simulations, cost reports")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum BackendArg {
    Curve,
    Mock,
}

impl From<BackendArg> for Backend {
    fn from(b: BackendArg) -> Backend {
        match b {
            BackendArg::Curve => Backend::Curve,
            BackendArg::Mock => Backend::Mock,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum SuiteArg {
    Agg,
    Clpre,
    Mabe,
    Homo,
}

impl From<SuiteArg> for Suite {
    fn from(s: SuiteArg) -> Suite {
        match s {
            SuiteArg::Agg => Suite::Agg,
            SuiteArg::Clpre => Suite::Clpre,
            SuiteArg::Mabe => Suite::Mabe,
            SuiteArg::Homo => Suite::Homo,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Time one protocol suite over a parameter sweep.
    Bench {
        #[arg(long, value_enum)]
        suite: SuiteArg,
        /// Packet counts: `7`, `1..10` (inclusive) or `1,2,5`.
        #[arg(long, value_parser = parse_counts, default_value = "1..10")]
        n: Counts,
        #[arg(long, default_value_t = 100)]
        msg_size: usize,
        /// Attribute counts, same syntax as `--n`.
        #[arg(long, value_parser = parse_counts, default_value = "2")]
        attrs: Counts,
        #[arg(long, default_value_t = 10)]
        repeat: usize,
        #[arg(long, value_enum, default_value = "curve")]
        backend: BackendArg,
        #[arg(long, env = "FOGSEC_SEED", default_value_t = 0)]
        seed: u64,
        /// Output file; stdout when absent.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "csv")]
        format: Format,
    },
    /// Run a bundled scenario by name, or a scenario file.
    Scenario {
        /// Bundled name or path to a `.toml` scenario.
        name: String,
        #[arg(long, env = "FOGSEC_SEED")]
        seed: Option<u64>,
        /// Overrides the backend the scenario names.
        #[arg(long, value_enum)]
        backend: Option<BackendArg>,
        /// Directory for transcript.jsonl, ledger.csv, counters.json and report.json.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Print the full report (json) or the ledger (csv) instead of the summary.
        #[arg(long, value_enum)]
        format: Option<Format>,
    },
    /// Compare measured operation and byte counts against the cost tables.
    Report {
        /// Tables to compare (II, III, IV, V); all when empty.
        tables: Vec<String>,
        /// Restrict to the tables of these suites.
        #[arg(long, value_enum)]
        suite: Vec<SuiteArg>,
        #[arg(long, default_value_t = 7)]
        n: usize,
        #[arg(long, default_value_t = 100)]
        msg_size: usize,
        #[arg(long, default_value_t = 2)]
        attrs: usize,
        #[arg(long, value_enum, default_value = "curve")]
        backend: BackendArg,
        #[arg(long, env = "FOGSEC_SEED", default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Aligned text when absent.
        #[arg(long, value_enum)]
        format: Option<Format>,
    },
}

enum Failure {
    Usage(String),
    Check(String),
    Io(String),
}

type Outcome = Result<(), Failure>;

/// A list of positive counts given as one flag value.
#[derive(Clone, Debug)]
struct Counts(Vec<usize>);

fn parse_counts(s: &str) -> Result<Counts, String> {
    let num = |t: &str| t.trim().parse::<usize>().map_err(|_| format!("`{t}` is not a count"));
    let counts: Vec<usize> = if let Some((lo, hi)) = s.split_once("..") {
        let hi = hi.strip_prefix('=').unwrap_or(hi);
        let (lo, hi) = (num(lo)?, num(hi)?);
        if lo > hi {
            return Err(format!("empty range `{s}`"));
        }
        (lo..=hi).collect()
    } else {
        s.split(',').map(num).collect::<Result<_, _>>()?
    };
    if counts.contains(&0) {
        return Err("counts must be positive".into());
    }
    Ok(Counts(counts))
}

fn emit(out: Option<&Path>, text: &str) -> Outcome {
    match out {
        Some(path) => fs::write(path, text).map_err(|e| Failure::Io(format!("{}: {e}", path.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn bench_cmd(cfg: BenchConfig, out: Option<&Path>, format: Format) -> Outcome {
    cfg.validate().map_err(|e| Failure::Usage(e.to_string()))?;
    let report = bench::run_bench(&cfg).map_err(|e| Failure::Check(e.to_string()))?;
    let text = match format {
        Format::Csv => report.to_csv(),
        Format::Json => report.to_json() + "\n",
    };
    emit(out, &text)
}

fn load_scenario(name: &str) -> Result<Scenario, Failure> {
    if let Some(sc) = Scenario::builtin(name) {
        return Ok(sc);
    }
    let path = Path::new(name);
    if path.extension().is_some_and(|e| e == "toml") && path.is_file() {
        let text = fs::read_to_string(path).map_err(|e| Failure::Io(format!("{name}: {e}")))?;
        return Scenario::from_toml(&text).map_err(|e| Failure::Usage(format!("{name}: {e}")));
    }
    let known: Vec<&str> = BUILTIN_SCENARIOS.iter().map(|(n, _)| *n).collect();
    Err(Failure::Usage(format!(
        "unknown scenario `{name}`; bundled scenarios: {}",
        known.join(", ")
    )))
}

fn scenario_cmd(
    name: &str,
    seed: Option<u64>,
    backend: Option<BackendArg>,
    out: Option<&Path>,
    format: Option<Format>,
) -> Outcome {
    let mut sc = load_scenario(name)?;
    if let Some(seed) = seed {
        sc.seed = seed;
    }
    if let Some(b) = backend {
        sc.backend = b.into();
    }
    let report = Simulation::build(sc)
        .map_err(|e| Failure::Usage(e.to_string()))?
        .run();

    if let Some(dir) = out {
        let io = |e: std::io::Error| Failure::Io(format!("{}: {e}", dir.display()));
        fs::create_dir_all(dir).map_err(io)?;
        let json = serde_json::to_string_pretty(&report).expect("report serializes");
        fs::write(dir.join("transcript.jsonl"), report.transcript_jsonl()).map_err(io)?;
        fs::write(dir.join("ledger.csv"), report.ledger.to_csv()).map_err(io)?;
        fs::write(dir.join("counters.json"), report.counters_json() + "\n").map_err(io)?;
        fs::write(dir.join("report.json"), json + "\n").map_err(io)?;
    }
    match format {
        Some(Format::Json) => println!("{}", serde_json::to_string_pretty(&report).expect("report serializes")),
        Some(Format::Csv) => print!("{}", report.ledger.to_csv()),
        None => print!("{}", report.summary()),
    }
    if report.passed() {
        Ok(())
    } else {
        Err(Failure::Check(format!("scenario {} did not pass", report.scenario)))
    }
}

#[allow(clippy::too_many_arguments)]
fn report_cmd(
    tables: &[String],
    suites: &[SuiteArg],
    point: Point,
    backend: BackendArg,
    seed: u64,
    out: Option<&Path>,
    format: Option<Format>,
) -> Outcome {
    let mut wanted: Vec<Table> = tables
        .iter()
        .map(|t| t.parse::<Table>().map_err(|e| Failure::Usage(e.to_string())))
        .collect::<Result<_, _>>()?;
    wanted.extend(suites.iter().map(|s| Suite::from(*s).table()));
    if wanted.is_empty() {
        wanted = Table::ALL.to_vec();
    }
    let params = setup_pairing(backend.into(), &seed.to_be_bytes()).map_err(|e| Failure::Usage(e.to_string()))?;
    let mut measured = Vec::new();
    for suite in Suite::ALL {
        if wanted.contains(&suite.table()) {
            let rows = bench::measure_suite(&params, seed, suite, point).map_err(|e| Failure::Usage(e.to_string()))?;
            measured.extend(rows);
        }
    }
    let report = costmodel::compare(&measured).map_err(|e| Failure::Check(e.to_string()))?;
    let text = match format {
        Some(Format::Json) => report.to_json() + "\n",
        Some(Format::Csv) => report.to_csv(),
        None => report.to_text(),
    };
    emit(out, &text)?;
    let bad = report.unexplained();
    if bad.is_empty() {
        Ok(())
    } else {
        let tasks: Vec<String> = bad.iter().map(|r| format!("{}/{}", r.table, r.task)).collect();
        Err(Failure::Check(format!("unexplained deltas: {}", tasks.join(", "))))
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Bench {
            suite,
            n,
            msg_size,
            attrs,
            repeat,
            backend,
            seed,
            out,
            format,
        } => {
            let cfg = BenchConfig {
                ns: n.0,
                msg_size,
                attrs: attrs.0,
                repeat,
                backend: backend.into(),
                seed,
                ..BenchConfig::new(suite.into())
            };
            bench_cmd(cfg, out.as_deref(), format)
        }
        Command::Scenario {
            name,
            seed,
            backend,
            out,
            format,
        } => scenario_cmd(&name, seed, backend, out.as_deref(), format),
        Command::Report {
            tables,
            suite,
            n,
            msg_size,
            attrs,
            backend,
            seed,
            out,
            format,
        } => {
            let point = Point { n, msg_size, attrs };
            report_cmd(&tables, &suite, point, backend, seed, out.as_deref(), format)
        }
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Check(msg)) => {
            eprintln!("fogsec: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Io(msg)) => {
            eprintln!("fogsec: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("fogsec: {msg}");
            ExitCode::from(2)
        }
    }
}
