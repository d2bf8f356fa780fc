//! Experiment runner: five suites over the restriction-norm laboratory,
//! emitting deterministic CSV and a JSON result bundle.
//!
//! Exit codes: 0 all acceptance flags pass, 1 some flag failed, 2 usage error.

mod config;
mod output;
mod suites;

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;

use config::{
    parse_grid, parse_range, parse_symbol, read_config_file, ExperimentConfig, Suite, UsageError,
};

#[derive(Parser, Debug)]
#[command(name = "xsb-lab", version, about = "Restriction-norm laboratory experiment runner")]
struct Cli {
    /// Suite to run: norms | propagator | strichartz | knapp | trilinear.
    suite: String,

    /// Key=value config file; command-line flags override its entries.
    #[arg(long)]
    config: Option<PathBuf>,

    /// Output directory for CSV and JSON.
    #[arg(long)]
    out: Option<PathBuf>,

    /// RNG seed for all randomized data.
    #[arg(long)]
    seed: Option<u64>,

    /// Quadrature nodes per axis for exact-path norms.
    #[arg(long)]
    nodes: Option<usize>,

    /// Grid sizes n1,n2,nt (each <= 128).
    #[arg(long)]
    grid: Option<String>,

    /// s values: list `a,b,c` or range `a:b:+d` / `a:b:xk`.
    #[arg(long)]
    s: Option<String>,

    /// b values: list or range.
    #[arg(long)]
    b: Option<String>,

    /// Box scales N: list or range (geometric `4:256:x2` typical).
    #[arg(long = "N", alias = "n")]
    n: Option<String>,

    /// Reflection cases: subset of 1,2,3.
    #[arg(long)]
    j: Option<String>,

    /// Dispersion symbol: hyperbolic | elliptic.
    #[arg(long)]
    symbol: Option<String>,

    /// Randomized trial count for the trilinear suite.
    #[arg(long)]
    trials: Option<usize>,
}

fn pick<'a>(flag: &'a Option<String>, file: &'a BTreeMap<String, String>, key: &str) -> Option<&'a str> {
    flag.as_deref().or_else(|| file.get(key).map(|s| s.as_str()))
}

fn resolve(cli: &Cli) -> Result<ExperimentConfig, UsageError> {
    let suite = match cli.suite.as_str() {
        "norms" => Suite::Norms,
        "propagator" => Suite::Propagator,
        "strichartz" => Suite::Strichartz,
        "knapp" => Suite::Knapp,
        "trilinear" => Suite::Trilinear,
        other => {
            return Err(UsageError(format!(
                "unknown suite '{other}' (norms | propagator | strichartz | knapp | trilinear)"
            )))
        }
    };
    let file = match &cli.config {
        Some(path) => read_config_file(path)?,
        None => BTreeMap::new(),
    };
    let s_list = match pick(&cli.s, &file, "s") {
        Some(v) => parse_range(v)?,
        None => vec![-0.75, -0.5, -0.25, 0.0],
    };
    let b_list = match pick(&cli.b, &file, "b") {
        Some(v) => parse_range(v)?,
        None => vec![0.75],
    };
    let n_list = match pick(&cli.n, &file, "N") {
        Some(v) => parse_range(v)?,
        None => parse_range("4:256:x2")?,
    };
    let j_list: Vec<u8> = match pick(&cli.j, &file, "j") {
        Some(v) => parse_range(v)?
            .into_iter()
            .map(|x| {
                if x == x.trunc() && (1.0..=3.0).contains(&x) {
                    Ok(x as u8)
                } else {
                    Err(UsageError(format!("bad j value {x}")))
                }
            })
            .collect::<Result<_, _>>()?,
        None => vec![1, 2, 3],
    };
    let symbol = match pick(&cli.symbol, &file, "symbol") {
        Some(v) => parse_symbol(v)?,
        None => xsb_lab::SymbolKind::Hyperbolic,
    };
    let grid = match pick(&cli.grid, &file, "grid") {
        Some(v) => parse_grid(v)?,
        None => [64, 64, 48],
    };
    let nodes = match (cli.nodes, file.get("nodes")) {
        (Some(n), _) => n,
        (None, Some(v)) => v
            .parse()
            .map_err(|_| UsageError(format!("bad nodes '{v}'")))?,
        (None, None) => 32,
    };
    let seed = match (cli.seed, file.get("seed")) {
        (Some(s), _) => s,
        (None, Some(v)) => v
            .parse()
            .map_err(|_| UsageError(format!("bad seed '{v}'")))?,
        (None, None) => 2024,
    };
    let trials = match (cli.trials, file.get("trials")) {
        (Some(t), _) => t,
        (None, Some(v)) => v
            .parse()
            .map_err(|_| UsageError(format!("bad trials '{v}'")))?,
        (None, None) => 20,
    };
    let out = cli
        .out
        .clone()
        .or_else(|| file.get("out").map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("results"));
    let config = ExperimentConfig {
        suite,
        s_list,
        b_list,
        n_list,
        j_list,
        symbol,
        grid,
        nodes,
        seed,
        trials,
        out,
    };
    config.validate()?;
    Ok(config)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // clap handles --help/--version with success exits.
            if e.use_stderr() {
                eprintln!("{e}");
                return ExitCode::from(2);
            }
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
    };
    let config = match resolve(&cli) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("usage error: {e}");
            return ExitCode::from(2);
        }
    };
    let bundle = match suites::run(&config) {
        Ok(b) => b,
        Err(e) => {
            eprintln!("run failed: {e}");
            return ExitCode::from(2);
        }
    };
    if let Err(e) = std::fs::create_dir_all(&config.out) {
        eprintln!("cannot create output directory: {e}");
        return ExitCode::from(2);
    }
    let csv_path = config.out.join(format!("{}.csv", config.suite));
    let json_path = config.out.join(format!("{}.json", config.suite));
    if let Err(e) = output::write_csv(&csv_path, &bundle.csv_header, &bundle.records)
        .and_then(|_| output::write_json(&json_path, &bundle))
    {
        eprintln!("cannot write results: {e}");
        return ExitCode::from(2);
    }
    for fit in &bundle.fits {
        println!("fit {}: slope {:.4} +- {:.4}", fit.label, fit.slope, fit.stderr);
    }
    for flag in &bundle.flags {
        println!(
            "[{}] {} ({})",
            if flag.pass { "PASS" } else { "FAIL" },
            flag.name,
            flag.detail
        );
    }
    let all = bundle.all_pass();
    println!(
        "{} records -> {} ({} ms)",
        bundle.records.len(),
        csv_path.display(),
        bundle.wall_ms
    );
    if all {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}
