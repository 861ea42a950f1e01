use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use ivme_cli::bench::write_csv;
use ivme_cli::{
    bench, format_stream, insert_stream, load_stream, mixed_stream, parse_query, run, BenchConfig, ConfigError, Emit,
    Mode, RunConfig, RunError, Workload,
};
use ivme_core::oracle::QuerySpec;

#[derive(Parser)]
#[command(name = "ivme", version, about = "Incremental count maintenance under single-tuple updates")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Apply an update stream and print JSON records.
    Run(RunArgs),
    /// Measure op counts on insert-only streams and write a CSV.
    Bench(BenchArgs),
    /// Print a random update stream.
    Gen(GenArgs),
}

fn query_arg(s: &str) -> Result<QuerySpec, String> {
    parse_query(s).map_err(|e| e.to_string())
}

fn triple_arg(s: &str) -> Result<[f64; 3], String> {
    let v: Vec<f64> = s.split(',').map(|x| x.trim().parse::<f64>()).collect::<Result<_, _>>().map_err(|e| e.to_string())?;
    v.try_into().map_err(|_| "expected three comma-separated values".to_string())
}

#[derive(Args)]
struct RunArgs {
    /// triangle, triangle-selfjoin, path4 or lw:<n>.
    #[arg(long, value_parser = query_arg, default_value = "triangle")]
    query: QuerySpec,
    #[arg(long, value_enum, default_value_t = Mode::IvmEps)]
    mode: Mode,
    #[arg(long)]
    epsilon: Option<f64>,
    /// Per-relation ε for R,S,T.
    #[arg(long, value_parser = triple_arg)]
    epsilon_rst: Option<[f64; 3]>,
    /// Stream file, or `-` for stdin. Without it a stream is generated.
    #[arg(long)]
    stream: Option<PathBuf>,
    /// Check every prefix against brute force.
    #[arg(long)]
    verify: bool,
    /// Per-step CSV of op counts.
    #[arg(long)]
    metrics: Option<PathBuf>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, value_enum, default_value_t = Emit::Final)]
    emit: Emit,
    /// Length of the generated stream.
    #[arg(long, default_value_t = 1000)]
    length: usize,
}

#[derive(Args)]
struct BenchArgs {
    #[arg(long, value_parser = query_arg, default_value = "triangle")]
    query: QuerySpec,
    #[arg(long, value_enum, value_delimiter = ',', default_value = "ivm-eps")]
    mode: Vec<Mode>,
    #[arg(long, value_delimiter = ',', default_value = "0,0.5,1")]
    epsilon: Vec<f64>,
    #[arg(long, value_delimiter = ',', default_value = "4000,16000,64000")]
    sizes: Vec<usize>,
    #[arg(long, value_enum, default_value_t = Workload::Hub)]
    workload: Workload,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output CSV; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct GenArgs {
    #[arg(long, value_parser = query_arg, default_value = "triangle")]
    query: QuerySpec,
    #[arg(long, default_value_t = 100)]
    length: usize,
    #[arg(long, value_enum, default_value_t = Workload::Zipf)]
    workload: Workload,
    /// Value domain of mixed streams.
    #[arg(long, default_value_t = 24)]
    domain: i64,
    /// Inserts only, over a domain as large as the stream.
    #[arg(long)]
    insert_only: bool,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

fn cmd_run(a: RunArgs) -> Result<(), RunError> {
    let cfg = RunConfig {
        query: a.query,
        mode: a.mode,
        eps: a.epsilon,
        eps_rst: a.epsilon_rst,
        stream: a.stream,
        verify: a.verify,
        metrics: a.metrics,
        seed: a.seed,
        emit: a.emit,
    };
    cfg.validate()?;
    let updates = load_stream(&cfg, a.length)?;
    let stdout = io::stdout();
    let mut out = io::BufWriter::new(stdout.lock());
    run(&cfg, &updates, &mut out)?;
    out.flush()?;
    Ok(())
}

fn cmd_bench(a: BenchArgs) -> Result<(), RunError> {
    let cfg = BenchConfig {
        query: a.query,
        modes: a.mode,
        eps: a.epsilon,
        sizes: a.sizes,
        workload: a.workload,
        seed: a.seed,
    };
    if cfg.sizes.is_empty() || cfg.sizes.contains(&0) {
        return Err(ConfigError::Invalid("sizes must be positive".into()).into());
    }
    let start = Instant::now();
    let rows = bench(&cfg)?;
    match a.out {
        Some(p) => write_csv(&rows, std::fs::File::create(p)?)?,
        None => write_csv(&rows, io::stdout().lock())?,
    }
    eprintln!("bench: {} rows in {:.1?}", rows.len(), start.elapsed());
    Ok(())
}

fn cmd_gen(a: GenArgs) -> Result<(), RunError> {
    let ups = if a.insert_only {
        insert_stream(a.query, a.workload, a.length, a.seed)
    } else {
        if a.domain < 1 {
            return Err(ConfigError::Invalid("domain must be positive".into()).into());
        }
        mixed_stream(a.query, a.workload, a.length, a.domain, a.seed)
    };
    io::stdout().lock().write_all(format_stream(a.query, &ups).as_bytes())?;
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let res = match cli.cmd {
        Cmd::Run(a) => cmd_run(a),
        Cmd::Bench(a) => cmd_bench(a),
        Cmd::Gen(a) => cmd_gen(a),
    };
    match res {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("ivme: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
