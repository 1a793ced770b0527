//! `entdex`: enumerate entanglement classes, build representative states,
//! classify state files, evaluate ensemble indices and run the property
//! suites.
//!
//! Exit codes: 0 success, 1 invalid input, 2 write failure or state norm
//! defect above 1e-3, 3 factorization inconsistency, 4 property failure.

mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use entdex_core::classify::{classify, ensemble_index};
use entdex_core::construct::{ghz_product, DressedProductSpec};
use entdex_core::io::{self, StateFile, TruthFile, FORMAT_VERSION};
use entdex_core::partitions::{
    enumerate_partitions, index_of, partition_count, IntegerPartition, SetPartition,
};
use entdex_core::statecore::{self, QubitSet, DEFAULT_TOL, MAX_QUBITS_ENV};
use entdex_core::verify::{run_property_suite_with_tol, Property};
use entdex_core::Error;

use output::{ClassReportDoc, PartitionRow, PartitionsDoc, VerifyDoc};

#[derive(Debug, Parser)]
#[command(
    name = "entdex",
    version,
    about = "N-qubit entanglement index and classification"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// List the integer partitions of N with their part count p and index E = N - p.
    Partitions {
        n: usize,
        /// Print only the number of partitions.
        #[arg(long)]
        counts: bool,
        #[arg(long)]
        json: bool,
    },
    /// Build a GHZ-block product state and write it with a ground-truth sidecar.
    Make {
        /// Block sizes, e.g. 3,2.
        #[arg(long, value_delimiter = ',', required = true)]
        partition: Vec<usize>,
        /// Qubits of each block, e.g. "0,2;1,3,4".
        #[arg(long)]
        assign: Option<String>,
        #[arg(long)]
        lu_seed: Option<u64>,
        /// Target position of each qubit, e.g. 2,0,1.
        #[arg(long, value_delimiter = ',')]
        perm: Option<Vec<usize>>,
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Recover the block structure and index of a state file.
    Classify {
        file: PathBuf,
        #[arg(long, default_value_t = DEFAULT_TOL)]
        tol: f64,
        #[arg(long)]
        json: bool,
    },
    /// Probability-weighted index of an ensemble file.
    Index {
        #[arg(long)]
        ensemble: PathBuf,
    },
    /// Run the entanglement-measure property suites.
    Verify {
        /// 1, 2, 3, 4 or all.
        #[arg(long, value_parser = parse_suite)]
        suite: Suite,
        #[arg(long, default_value_t = 6)]
        max_n: usize,
        #[arg(long, default_value_t = 100)]
        trials: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long)]
        json: bool,
    },
}

#[derive(Debug, Clone)]
enum Suite {
    One(Property),
    All,
}

fn parse_suite(raw: &str) -> Result<Suite, String> {
    if raw == "all" {
        return Ok(Suite::All);
    }
    let id: u8 = raw.parse().map_err(|_| format!("invalid suite {raw:?}"))?;
    Property::try_from(id)
        .map(Suite::One)
        .map_err(|e| e.to_string())
}

struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn new(code: u8, message: impl Into<String>) -> Self {
        Self {
            code,
            message: message.into(),
        }
    }

    fn input(e: impl std::fmt::Display) -> Self {
        Self::new(1, e.to_string())
    }
}

type CliResult = Result<(), Failure>;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    if let Ok(raw) = std::env::var(MAX_QUBITS_ENV) {
        if let Err(e) = statecore::parse_qubit_cap(&raw) {
            eprintln!("error: {MAX_QUBITS_ENV}: {e}");
            return ExitCode::from(1);
        }
    }
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            if !f.message.is_empty() {
                eprintln!("error: {}", f.message);
            }
            ExitCode::from(f.code)
        }
    }
}

fn run(command: Command) -> CliResult {
    match command {
        Command::Partitions { n, counts, json } => cmd_partitions(n, counts, json),
        Command::Make {
            partition,
            assign,
            lu_seed,
            perm,
            output,
        } => cmd_make(partition, assign.as_deref(), lu_seed, perm, output),
        Command::Classify { file, tol, json } => cmd_classify(file, tol, json),
        Command::Index { ensemble } => cmd_index(ensemble),
        Command::Verify {
            suite,
            max_n,
            trials,
            seed,
            json,
        } => cmd_verify(suite, max_n, trials, seed, json),
    }
}

fn cmd_partitions(n: usize, counts: bool, json: bool) -> CliResult {
    let count = partition_count(n).map_err(Failure::input)?;
    if counts {
        if json {
            print!("{}", io::to_json_string(&PartitionsDoc::counts(n, count)));
        } else {
            println!("{count}");
        }
        return Ok(());
    }
    let rows: Vec<PartitionRow> = enumerate_partitions(n)
        .map_err(Failure::input)?
        .into_iter()
        .map(|parts| PartitionRow {
            p: parts.len(),
            index: index_of(&parts).get(),
            parts,
        })
        .collect();
    if json {
        print!(
            "{}",
            io::to_json_string(&PartitionsDoc::listing(n, count, rows))
        );
    } else {
        for r in rows {
            println!("{}  p={}  E={}", r.parts, r.p, r.index);
        }
    }
    Ok(())
}

fn parse_assignment(raw: &str, n: usize) -> Result<SetPartition, Error> {
    let blocks = raw
        .split(';')
        .map(|block| {
            let members = block
                .split(',')
                .map(|q| {
                    q.trim().parse::<usize>().map_err(|_| {
                        Error::InvalidPartition(format!("bad qubit {q:?} in --assign"))
                    })
                })
                .collect::<Result<Vec<_>, _>>()?;
            QubitSet::new(members)
        })
        .collect::<Result<Vec<_>, _>>()?;
    SetPartition::new(n, blocks)
}

fn cmd_make(
    parts: Vec<usize>,
    assign: Option<&str>,
    lu_seed: Option<u64>,
    perm: Option<Vec<usize>>,
    output: PathBuf,
) -> CliResult {
    let shape = IntegerPartition::from_parts(parts).map_err(Failure::input)?;
    let n = shape.total();
    let mut spec = DressedProductSpec::new(shape.clone());
    if let Some(raw) = assign {
        spec = spec.with_assignment(parse_assignment(raw, n).map_err(Failure::input)?);
    }
    if let Some(seed) = lu_seed {
        spec = spec.with_lu_seed(seed);
    }
    if let Some(p) = &perm {
        spec = spec.with_perm(p.clone());
    }
    let product = ghz_product(&spec).map_err(Failure::input)?;

    let truth = TruthFile {
        format_version: FORMAT_VERSION,
        n,
        shape: shape.parts().to_vec(),
        blocks: product.blocks.to_vecs(),
        p: shape.len(),
        expected_index: index_of(&shape).get(),
        lu_seed,
        perm,
    };
    let truth_path = io::truth_path(&output);
    io::write_json(&output, &StateFile::from_state(&product.state))
        .map_err(|e| Failure::new(2, format!("{}: {e}", output.display())))?;
    io::write_json(&truth_path, &truth)
        .map_err(|e| Failure::new(2, format!("{}: {e}", truth_path.display())))?;
    println!(
        "wrote {} (n={n} shape={shape} E={}) and {}",
        output.display(),
        truth.expected_index,
        truth_path.display()
    );
    Ok(())
}

fn cmd_classify(file: PathBuf, tol: f64, json: bool) -> CliResult {
    if !(tol > 0.0 && tol < 1.0) {
        return Err(Failure::input(format!("--tol {tol} must lie in (0, 1)")));
    }
    let loaded = io::read_state_file(&file).map_err(|e| match e {
        Error::NormDefect { .. } => Failure::new(2, format!("{}: {e}", file.display())),
        other => Failure::input(format!("{}: {other}", file.display())),
    })?;
    if let Some(w) = &loaded.warning {
        eprintln!("warning: {}: {w}", file.display());
    }
    let report = classify(&loaded.state, tol).map_err(|e| match e {
        Error::FactorizationInconsistent(_) => Failure::new(3, e.to_string()),
        other => Failure::input(other),
    })?;
    for w in &report.warnings {
        eprintln!("warning: {w}");
    }
    if json {
        print!("{}", io::to_json_string(&ClassReportDoc::new(&report)));
    } else {
        println!("blocks={}", report.blocks);
        println!(
            "shape={} p={} E={}",
            report.shape,
            report.blocks.len(),
            report.index
        );
        if report.is_fully_separable() {
            println!("fully separable, E=0");
        } else {
            println!("{}", report.label);
        }
    }
    Ok(())
}

fn cmd_index(path: PathBuf) -> CliResult {
    let ensemble = io::read_ensemble_file(&path)
        .map_err(|e| Failure::input(format!("{}: {e}", path.display())))?;
    let value = ensemble_index(&ensemble, DEFAULT_TOL).map_err(Failure::input)?;
    println!("{}", output::format_significant(value, 12));
    Ok(())
}

fn cmd_verify(suite: Suite, max_n: usize, trials: usize, seed: u64, json: bool) -> CliResult {
    let properties = match suite {
        Suite::One(p) => vec![p],
        Suite::All => Property::ALL.to_vec(),
    };
    let reports = properties
        .into_iter()
        .map(|p| run_property_suite_with_tol(p, max_n, trials, seed, DEFAULT_TOL))
        .collect::<Result<Vec<_>, _>>()
        .map_err(Failure::input)?;
    let passed = reports.iter().all(|r| r.passed());
    if json {
        print!("{}", io::to_json_string(&VerifyDoc::new(&reports)));
    } else {
        for r in &reports {
            println!(
                "property {} ({}): cases={} failures={} max_deviation={}",
                r.property_id,
                r.name,
                r.cases_run,
                r.failures.len(),
                output::format_deviation(r.max_deviation)
            );
            for f in &r.failures {
                println!("  {f}");
            }
        }
    }
    if passed {
        Ok(())
    } else {
        Err(Failure::new(4, "property failures reported"))
    }
}
