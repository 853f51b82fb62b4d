use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use sha2::{Digest, Sha256};

use fermion_mi::scenario::{self, Overrides, Table};
use fermion_mi::Error;

#[derive(Parser)]
#[command(name = "fermion-mi", version, about = "Free-fermion mutual information: closed forms, lattice spectra, kernel traces, inequality audits")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate each scenario in its own mode; one CSV per scenario.
    Run(Common),
    /// Evaluate each scenario by every applicable method and report deviations.
    Compare(Common),
}

#[derive(Args)]
struct Common {
    /// Scenario JSON file (one object or a list).
    #[arg(long)]
    config: PathBuf,
    /// Output directory.
    #[arg(long, default_value = ".")]
    out: PathBuf,
    /// Base seed for audits, overriding the scenario's.
    #[arg(long)]
    seed: Option<u64>,
    /// Worker threads; 0 picks automatically.
    #[arg(long, default_value_t = 0)]
    threads: usize,
    /// Absolute quadrature tolerance, overriding the scenario's.
    #[arg(long)]
    tol: Option<f64>,
    /// Also write each table as JSON records.
    #[arg(long)]
    json: bool,
}

enum Failure {
    Validation(String),
    Numerical(String),
    Violation(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        if e.is_numerical() {
            Failure::Numerical(e.to_string())
        } else {
            Failure::Validation(e.to_string())
        }
    }
}

fn io_err(path: &Path, e: impl std::fmt::Display) -> Failure {
    Failure::Validation(format!("{}: {e}", path.display()))
}

fn write_table(dir: &Path, stem: &str, table: &Table, json: bool) -> Result<Vec<String>, Failure> {
    let csv_path = dir.join(format!("{stem}.csv"));
    let mut w = csv::Writer::from_path(&csv_path).map_err(|e| io_err(&csv_path, e))?;
    w.write_record(&table.header).map_err(|e| io_err(&csv_path, e))?;
    for row in &table.rows {
        w.write_record(row.iter().map(|c| c.to_string()))
            .map_err(|e| io_err(&csv_path, e))?;
    }
    w.flush().map_err(|e| io_err(&csv_path, e))?;
    let mut files = vec![format!("{stem}.csv")];
    if json {
        let json_path = dir.join(format!("{stem}.json"));
        let text = serde_json::to_string_pretty(&table.to_json()).expect("table serializes");
        fs::write(&json_path, text + "\n").map_err(|e| io_err(&json_path, e))?;
        files.push(format!("{stem}.json"));
    }
    Ok(files)
}

fn execute(command: Command) -> Result<(), Failure> {
    let (is_compare, opts) = match command {
        Command::Run(c) => (false, c),
        Command::Compare(c) => (true, c),
    };
    rayon::ThreadPoolBuilder::new()
        .num_threads(opts.threads)
        .build_global()
        .map_err(|e| Failure::Validation(format!("thread pool: {e}")))?;
    let text = fs::read_to_string(&opts.config).map_err(|e| io_err(&opts.config, e))?;
    let scenarios = scenario::parse_scenarios(&text)?;
    let overrides = Overrides {
        seed: opts.seed,
        tol: opts.tol,
    };
    let items = scenario::prepare(scenarios, overrides)?;
    fs::create_dir_all(&opts.out).map_err(|e| io_err(&opts.out, e))?;

    let mut files = Vec::new();
    let mut violations = Vec::new();
    if is_compare {
        let (table, violation) = scenario::compare_all(&items)?;
        files.extend(write_table(&opts.out, "compare", &table, opts.json)?);
        if violation {
            violations.push("compare".to_string());
        }
    } else {
        let mut outputs = scenario::run_all(&items)?;
        outputs.sort_by(|x, y| x.id.cmp(&y.id));
        for out in &outputs {
            files.extend(write_table(&opts.out, &out.id, &out.table, opts.json)?);
            if out.violation {
                violations.push(out.id.clone());
            }
        }
    }

    let manifest = serde_json::json!({
        "command": if is_compare { "compare" } else { "run" },
        "config_sha256": hex::encode(Sha256::digest(text.as_bytes())),
        "seed_override": opts.seed,
        "tol_override": opts.tol,
        "files": files,
    });
    let manifest_path = opts.out.join("manifest.json");
    fs::write(&manifest_path, serde_json::to_string_pretty(&manifest).expect("manifest serializes") + "\n")
        .map_err(|e| io_err(&manifest_path, e))?;

    if violations.is_empty() {
        Ok(())
    } else {
        Err(Failure::Violation(format!("tolerance exceeded in: {}", violations.join(", "))))
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Validation(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Numerical(msg)) => {
            eprintln!("numerical failure: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Violation(msg)) => {
            eprintln!("violation: {msg}");
            ExitCode::from(3)
        }
    }
}
