use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use irs::bench::{run_bench, run_count, run_update_bench, IndexKind, UpdateMode};
use irs::gen::{gen_intervals, gen_queries, LengthDist};
use irs::io::{load_dataset, load_queries, write_dataset, write_queries};
use irs::model::{Coord, Error};
use irs::rng::RngHandle;

#[derive(Parser)]
#[command(name = "irs", about = "Independent range sampling over interval data", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum CoordKind {
    Int,
    Float,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Clone, Copy, ValueEnum)]
enum DistArg {
    Uniform,
    Zipf,
    Clustered,
}

impl From<DistArg> for LengthDist {
    fn from(d: DistArg) -> LengthDist {
        match d {
            DistArg::Uniform => LengthDist::Uniform,
            DistArg::Zipf => LengthDist::Zipf,
            DistArg::Clustered => LengthDist::Clustered,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum IndexArg {
    Itree,
    Ait,
    Aitv,
    Awit,
}

impl From<IndexArg> for IndexKind {
    fn from(i: IndexArg) -> IndexKind {
        match i {
            IndexArg::Itree => IndexKind::ITree,
            IndexArg::Ait => IndexKind::Ait,
            IndexArg::Aitv => IndexKind::Aitv,
            IndexArg::Awit => IndexKind::Awit,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Insert,
    InsertBatch,
    Delete,
}

impl From<ModeArg> for UpdateMode {
    fn from(m: ModeArg) -> UpdateMode {
        match m {
            ModeArg::Insert => UpdateMode::InsertEach,
            ModeArg::InsertBatch => UpdateMode::InsertBatch,
            ModeArg::Delete => UpdateMode::Delete,
        }
    }
}

#[derive(Args)]
struct CommonQueryArgs {
    /// Dataset CSV (l,r[,weight]).
    #[arg(long)]
    data: PathBuf,
    /// Query workload CSV (l,r[,s]).
    #[arg(long)]
    queries: PathBuf,
    #[arg(long, value_enum, default_value = "ait")]
    index: IndexArg,
    #[arg(long, value_enum, default_value = "int")]
    coord: CoordKind,
    /// Output path; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a synthetic interval dataset.
    GenData {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 1_000_000)]
        domain: i64,
        #[arg(long, value_enum, default_value = "uniform")]
        dist: DistArg,
        #[arg(long, default_value_t = false)]
        weighted: bool,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Generate a fixed-extent query workload.
    GenQueries {
        #[arg(long)]
        m: usize,
        #[arg(long, default_value_t = 1_000_000)]
        domain: i64,
        /// Query length as a fraction of the domain.
        #[arg(long, default_value_t = 0.08)]
        extent: f64,
        /// Per-query sample size column; omitted when not set.
        #[arg(long)]
        s: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Build an index and report build time and size.
    Build {
        #[arg(long)]
        data: PathBuf,
        #[arg(long, value_enum, default_value = "ait")]
        index: IndexArg,
        #[arg(long, value_enum, default_value = "int")]
        coord: CoordKind,
    },
    /// Run sampling queries and print the samples.
    Query {
        #[command(flatten)]
        common: CommonQueryArgs,
        /// Default sample size for queries without an s column.
        #[arg(long, default_value_t = 10)]
        s: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Run range-counting queries.
    Count {
        #[command(flatten)]
        common: CommonQueryArgs,
    },
    /// Benchmark an index over a workload.
    Bench {
        #[command(flatten)]
        common: CommonQueryArgs,
        #[arg(long, default_value_t = 1000)]
        s: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Benchmark updates (augmented tree only).
    UpdateBench {
        #[arg(long)]
        data: PathBuf,
        #[arg(long, default_value_t = 5000)]
        ops: usize,
        #[arg(long, value_enum, default_value = "insert")]
        mode: ModeArg,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

fn exit_code_for(err: &Error) -> u8 {
    match err {
        Error::Io(_) => 3,
        _ => 2,
    }
}

fn out_writer(out: &Option<PathBuf>) -> Result<Box<dyn Write>, Error> {
    Ok(match out {
        Some(path) => Box::new(std::io::BufWriter::new(std::fs::File::create(path)?)),
        None => Box::new(std::io::stdout().lock()),
    })
}

fn run_query_cmd<C: Coord>(common: &CommonQueryArgs, s: usize, seed: u64) -> Result<(), Error> {
    let data = load_dataset::<C>(&common.data)?;
    let queries = load_queries::<C>(&common.queries)?;
    let index = irs::bench::BuiltIndex::build(&data, common.index.into())?;
    let mut rng = RngHandle::new(seed);
    let mut w = out_writer(&common.out)?;
    for (i, spec) in queries.iter().enumerate() {
        let sz = spec.s.unwrap_or(s);
        let samples = index.sample(&spec.q, sz, &mut rng)?;
        match common.format {
            Format::Json => {
                let items: Vec<serde_json::Value> = samples
                    .iter()
                    .map(|x| {
                        serde_json::json!({
                            "id": x.id,
                            "l": x.l.to_f64(),
                            "r": x.r.to_f64(),
                            "weight": x.weight,
                        })
                    })
                    .collect();
                let row = serde_json::json!({
                    "query": i,
                    "l": spec.q.l.to_f64(),
                    "r": spec.q.r.to_f64(),
                    "s": sz,
                    "samples": items,
                });
                writeln!(w, "{row}")?;
            }
            Format::Csv => {
                for x in &samples {
                    writeln!(w, "{},{},{},{},{}", i, x.id, x.l, x.r, x.weight)?;
                }
            }
        }
    }
    w.flush()?;
    Ok(())
}

fn run_count_cmd<C: Coord>(common: &CommonQueryArgs) -> Result<(), Error> {
    let data = load_dataset::<C>(&common.data)?;
    let queries = load_queries::<C>(&common.queries)?;
    let counts = run_count(&data, &queries, common.index.into())?;
    let mut w = out_writer(&common.out)?;
    match common.format {
        Format::Json => writeln!(w, "{}", serde_json::to_string(&counts)?)?,
        Format::Csv => {
            for (i, c) in counts.iter().enumerate() {
                writeln!(w, "{i},{c}")?;
            }
        }
    }
    w.flush()?;
    Ok(())
}

fn run_bench_cmd<C: Coord>(common: &CommonQueryArgs, s: usize, seed: u64) -> Result<(), Error> {
    let data = load_dataset::<C>(&common.data)?;
    let queries = load_queries::<C>(&common.queries)?;
    let report = run_bench(&data, &queries, common.index.into(), s, seed)?;
    let mut w = out_writer(&common.out)?;
    match common.format {
        Format::Json => {
            // JSON lines: summary first, then one row per query.
            writeln!(w, "{}", serde_json::to_string(&report.summary)?)?;
            for row in &report.rows {
                writeln!(w, "{}", serde_json::to_string(row)?)?;
            }
        }
        Format::Csv => {
            writeln!(w, "query,l,r,s,count,candidate_ns,sample_ns")?;
            for row in &report.rows {
                writeln!(
                    w,
                    "{},{},{},{},{},{},{}",
                    row.query, row.l, row.r, row.s, row.count, row.candidate_ns, row.sample_ns
                )?;
            }
        }
    }
    w.flush()?;
    Ok(())
}

fn run_build_cmd<C: Coord>(data: &PathBuf, index: IndexArg) -> Result<(), Error> {
    let data = load_dataset::<C>(data)?;
    let kind: IndexKind = index.into();
    let t0 = std::time::Instant::now();
    let built = irs::bench::BuiltIndex::build(&data, kind)?;
    let build_ns = t0.elapsed().as_nanos() as u64;
    drop(built);
    let report = serde_json::json!({
        "index": kind.name(),
        "n": data.len(),
        "weighted": data.weighted,
        "build_ns": build_ns,
    });
    println!("{report}");
    Ok(())
}

fn dispatch(cli: Cli) -> Result<(), Error> {
    match cli.command {
        Command::GenData {
            n,
            domain,
            dist,
            weighted,
            seed,
            out,
        } => {
            let data = gen_intervals(n, domain, dist.into(), weighted, seed)?;
            write_dataset(&out, &data)
        }
        Command::GenQueries {
            m,
            domain,
            extent,
            s,
            seed,
            out,
        } => {
            let queries = gen_queries(m, domain, extent, s, seed)?;
            write_queries(&out, &queries)
        }
        Command::Build { data, index, coord } => match coord {
            CoordKind::Int => run_build_cmd::<i64>(&data, index),
            CoordKind::Float => run_build_cmd::<f64>(&data, index),
        },
        Command::Query { common, s, seed } => match common.coord {
            CoordKind::Int => run_query_cmd::<i64>(&common, s, seed),
            CoordKind::Float => run_query_cmd::<f64>(&common, s, seed),
        },
        Command::Count { common } => match common.coord {
            CoordKind::Int => run_count_cmd::<i64>(&common),
            CoordKind::Float => run_count_cmd::<f64>(&common),
        },
        Command::Bench { common, s, seed } => match common.coord {
            CoordKind::Int => run_bench_cmd::<i64>(&common, s, seed),
            CoordKind::Float => run_bench_cmd::<f64>(&common, s, seed),
        },
        Command::UpdateBench {
            data,
            ops,
            mode,
            seed,
        } => {
            let data = load_dataset::<i64>(&data)?;
            let report = run_update_bench(&data, ops, mode.into(), seed)?;
            println!("{}", serde_json::to_string(&report)?);
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(exit_code_for(&err))
        }
    }
}
