use std::fs::File;
use std::io::{self, BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use lotvg_core::bench::{run_benchmark, verify_equivalence, Algorithm, BenchConfig, NamedSeries};
use lotvg_core::io::{
    parse_value, read_series_csv, write_edge_list, write_edges, write_timings_csv, Measure,
    RowOrder, SeriesFile, ValueColumn,
};
use lotvg_core::{
    generate, BootstrapChoice, CriterionKind, Error, GeneratorKind, GeneratorSpec, OnlineAlgorithm,
    OnlineState, Window,
};

/// Visibility graphs of time series, offline and over sliding windows.
#[derive(Parser)]
#[command(name = "lotvg", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write a synthetic series, one value per line.
    Gen {
        #[arg(long)]
        kind: GeneratorKind,
        #[arg(long)]
        length: usize,
        #[arg(long, default_value_t = 1024)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Build the visibility graph of a whole series (or its last N values).
    Transform {
        #[arg(long)]
        algo: OfflineAlgo,
        #[arg(long)]
        criterion: CriterionKind,
        #[command(flatten)]
        input: SeriesArgs,
        /// Use only the last N values, keeping their absolute positions.
        #[arg(long)]
        window: Option<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Maintain a sliding window's graph over a value-per-line stream.
    Stream {
        #[arg(long)]
        algo: OnlineAlgorithm,
        #[arg(long)]
        window: usize,
        /// File to read, or - for stdin.
        #[arg(long, default_value = "-")]
        input: String,
        /// Print "- idx" per eviction and "+ i j" per added edge.
        #[arg(long, conflicts_with = "emit_final")]
        emit_deltas: bool,
        /// Print the last window's edge list (default).
        #[arg(long)]
        emit_final: bool,
        /// Offline builder for the first window.
        #[arg(long)]
        bootstrap: Option<BootstrapChoice>,
    },
    /// Time algorithms over moving windows and write a CSV.
    Bench {
        #[command(flatten)]
        grid: GridArgs,
        #[arg(long, default_value_t = 5)]
        repeats: usize,
        #[arg(long, value_enum, default_value_t = MeasureArg::Mean)]
        measure: MeasureArg,
        /// Count the first window's offline build in online timings.
        #[arg(long)]
        include_bootstrap: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Replay configurations against the quadratic oracle.
    Verify {
        #[command(flatten)]
        grid: GridArgs,
    },
}

#[derive(Args)]
struct SeriesArgs {
    #[arg(long)]
    input: PathBuf,
    /// Column name or 0-based position (default: second column).
    #[arg(long)]
    value_col: Option<ValueColumn>,
    #[arg(long)]
    no_header: bool,
    #[arg(long)]
    newest_first: bool,
}

impl SeriesArgs {
    fn file(&self) -> SeriesFile {
        SeriesFile {
            path: self.input.clone(),
            value_column: self.value_col.clone().unwrap_or_default(),
            has_header: !self.no_header,
            order: if self.newest_first {
                RowOrder::NewestFirst
            } else {
                RowOrder::OldestFirst
            },
        }
    }
}

#[derive(Args)]
struct GridArgs {
    #[arg(long, value_delimiter = ',', required = true)]
    algos: Vec<Algorithm>,
    /// Generator names (uniform, normal, exponential, conway, walk), each
    /// optionally suffixed with @SEED, or CSV paths (second column, header row).
    #[arg(long, value_delimiter = ',', required = true)]
    series: Vec<String>,
    #[arg(long, value_delimiter = ',', required = true)]
    windows: Vec<usize>,
    #[arg(long, default_value_t = 100)]
    iterations: usize,
    #[arg(long, default_value_t = 1)]
    stride: usize,
    /// Length of generated series.
    #[arg(long, default_value_t = 10_000)]
    length: usize,
    #[arg(long, default_value_t = 1024)]
    seed: u64,
    /// Run independent configurations concurrently.
    #[arg(long)]
    parallel: bool,
}

impl GridArgs {
    fn config(&self) -> Result<BenchConfig, Error> {
        let series = self
            .series
            .iter()
            .map(|s| self.load(s))
            .collect::<Result<Vec<_>, _>>()?;
        let mut config = BenchConfig::new(self.algos.clone(), series, self.windows.clone());
        config.iterations = self.iterations;
        config.stride = self.stride;
        config.parallel = self.parallel;
        Ok(config)
    }

    fn load(&self, name: &str) -> Result<NamedSeries, Error> {
        let (kind, seed) = match name.split_once('@') {
            Some((kind, seed)) => (kind, Some(seed)),
            None => (name, None),
        };
        if let Ok(kind) = kind.parse::<GeneratorKind>() {
            let seed = match seed {
                Some(s) => s
                    .parse()
                    .map_err(|_| Error::Config(format!("bad seed in {name:?}")))?,
                None => self.seed,
            };
            return NamedSeries::generated(&GeneratorSpec::new(kind, self.length, seed));
        }
        let path = Path::new(name);
        if !path.exists() {
            return Err(Error::Config(format!(
                "{name:?} is neither a generator nor an existing file"
            )));
        }
        let label = path
            .file_stem()
            .map_or_else(|| name.to_string(), |s| s.to_string_lossy().into_owned());
        Ok(NamedSeries::new(label, read_series_csv(&SeriesFile::new(path))?))
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum OfflineAlgo {
    Basic,
    Dc,
    Lt,
}

#[derive(Clone, Copy, ValueEnum)]
enum MeasureArg {
    Mean,
    Total,
}

enum Failure {
    Lib(Error),
    Verification,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Lib(Error::Io(e))
    }
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Io(_) | Error::Csv(_) | Error::Parse { .. } | Error::MissingColumn(_) | Error::EmptyInput | Error::NonFinite { .. } => 3,
        _ => 2,
    }
}

fn sink(out: Option<&Path>) -> io::Result<Box<dyn Write>> {
    Ok(match out {
        Some(p) if p != Path::new("-") => Box::new(BufWriter::new(File::create(p)?)),
        _ => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Verification) => ExitCode::from(1),
        Err(Failure::Lib(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}

fn run(command: Command) -> Result<(), Failure> {
    match command {
        Command::Gen {
            kind,
            length,
            seed,
            out,
        } => {
            let values = generate(&GeneratorSpec::new(kind, length, seed))?;
            let mut w = sink(out.as_deref())?;
            for v in values {
                writeln!(w, "{v}")?;
            }
            w.flush()?;
        }
        Command::Transform {
            algo,
            criterion,
            input,
            window,
            out,
        } => {
            let values = read_series_csv(&input.file())?;
            let n = window.unwrap_or(values.len());
            if n == 0 || n > values.len() {
                return Err(Error::Config(format!(
                    "window {n} does not fit a series of {} values",
                    values.len()
                ))
                .into());
            }
            let start = values.len() - n;
            let choice = match algo {
                OfflineAlgo::Basic => BootstrapChoice::BasicOracle,
                OfflineAlgo::Dc => BootstrapChoice::DivideAndConquer,
                OfflineAlgo::Lt => BootstrapChoice::MonotonicStack,
            };
            let g = lotvg_core::bootstrap(start as u64, &values[start..], criterion, choice)?;
            write_edge_list(&g, sink(out.as_deref())?)?;
        }
        Command::Stream {
            algo,
            window,
            input,
            emit_deltas,
            emit_final: _,
            bootstrap,
        } => {
            let reader: Box<dyn BufRead> = if input == "-" {
                Box::new(io::stdin().lock())
            } else {
                Box::new(BufReader::new(File::open(&input)?))
            };
            let choice = bootstrap.unwrap_or(BootstrapChoice::default_for(algo.criterion()));
            stream(reader, algo, window, choice, emit_deltas)?;
        }
        Command::Bench {
            grid,
            repeats,
            measure,
            include_bootstrap,
            out,
        } => {
            let mut config = grid.config()?;
            config.repeats = repeats;
            config.include_bootstrap = include_bootstrap;
            config.measure = match measure {
                MeasureArg::Mean => Measure::Mean,
                MeasureArg::Total => Measure::Total,
            };
            let records = run_benchmark(&config)?;
            write_timings_csv(&records, sink(out.as_deref())?)?;
        }
        Command::Verify { grid } => {
            let config = grid.config()?;
            let report = verify_equivalence(&config)?;
            let mut out = io::stdout().lock();
            for o in &report.outcomes {
                let status = if o.passed() { "ok" } else { "FAIL" };
                writeln!(
                    out,
                    "{status} {} {} N={} windows={}",
                    o.algorithm, o.series, o.window, o.windows_checked
                )?;
                if let Some(cx) = &o.failure {
                    writeln!(out, "{cx}")?;
                }
            }
            if !report.passed() {
                return Err(Failure::Verification);
            }
        }
    }
    Ok(())
}

fn stream(
    reader: Box<dyn BufRead>,
    algo: OnlineAlgorithm,
    capacity: usize,
    choice: BootstrapChoice,
    emit_deltas: bool,
) -> Result<(), Failure> {
    let mut out = BufWriter::new(io::stdout().lock());
    let mut warmup = Window::new(capacity)?;
    let mut state: Option<OnlineState> = None;

    for (k, line) in reader.lines().enumerate() {
        let line = line?;
        let cell = line.trim();
        if cell.is_empty() {
            continue;
        }
        let value = parse_value(cell).map_err(|message| Error::Parse {
            line: k as u64 + 1,
            message,
        })?;
        match state.as_mut() {
            Some(s) => {
                let delta = s.advance(value)?;
                if emit_deltas {
                    if let Some(r) = delta.removed_node {
                        writeln!(out, "- {r}")?;
                    }
                    for (i, j) in delta.added_edges {
                        writeln!(out, "+ {i} {j}")?;
                    }
                }
            }
            None => {
                warmup.push(value)?;
                if warmup.is_full() {
                    let full = std::mem::replace(&mut warmup, Window::new(capacity)?);
                    let s = OnlineState::init(full, algo, choice)?;
                    if emit_deltas {
                        for (i, j) in s.graph().edges_sorted() {
                            writeln!(out, "+ {i} {j}")?;
                        }
                    }
                    state = Some(s);
                }
            }
        }
    }

    let Some(state) = state else {
        return Err(Error::WarmupIncomplete {
            len: warmup.len(),
            capacity,
        }
        .into());
    };
    if !emit_deltas {
        write_edges(&state.graph().edges_sorted(), &mut out)?;
    }
    out.flush()?;
    Ok(())
}
