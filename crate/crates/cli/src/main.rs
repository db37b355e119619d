//! `intercont`: batch pipeline from publication records to rank files,
//! fit reports and plot data. Stages exchange plain files in an output
//! directory; see `intercont --help`.

mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use intercont_core::ingest::ExclusionPolicy;
use intercont_core::stats::{FitMethod, FitOptions, HeapOptions, RankRange};

#[derive(Parser, Debug)]
#[command(name = "intercont", version, about = "Continent-sequence rank-frequency pipeline")]
struct Cli {
    /// Worker threads (defaults to available parallelism).
    #[arg(long, global = true)]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Filter and map a corpus to one continent sequence per accepted record.
    Map(MapArgs),
    /// Build the rank table from sequence files.
    Rank(RankArgs),
    /// Fit a Zipf law to a rank table, with a sensitivity report.
    FitZipf(FitZipfArgs),
    /// Sample the distinct-sequence growth curve and fit a Heaps law.
    Heap(HeapArgs),
    /// Generate a synthetic Zipf-distributed corpus.
    Gen(GenArgs),
    /// Crawl a co-authorship graph from a seed author.
    Crawl(CrawlArgs),
    /// Write two-column plot data for the rank-frequency and heap curves.
    Plotdata(PlotdataArgs),
}

#[derive(Args, Debug, Clone)]
pub struct TableArgs {
    /// Territory-to-continent CSV (`territory,continent`); built-in table if absent.
    #[arg(long)]
    continents: Option<PathBuf>,
    /// Alias CSV (`alias,canonical_label`) applied on top of the table.
    #[arg(long)]
    aliases: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct MapArgs {
    /// Corpus files in JSON Lines format.
    #[arg(long, required = true, num_args = 1..)]
    input: Vec<PathBuf>,
    #[arg(long)]
    output_dir: PathBuf,
    #[command(flatten)]
    table: TableArgs,
    /// Records with an author listing more affiliations than this are excluded.
    #[arg(long, default_value_t = ExclusionPolicy::DEFAULT_MAX_AFFILIATIONS)]
    max_affils: u32,
}

#[derive(Args, Debug)]
pub struct RankArgs {
    /// Sequence files, one canonical sequence per line.
    #[arg(long, required = true, num_args = 1..)]
    input: Vec<PathBuf>,
    #[arg(long)]
    output_dir: PathBuf,
}

#[derive(Args, Debug, Clone)]
pub struct FitArgs {
    /// Ranks with fewer occurrences are left out of the fit.
    #[arg(long, default_value_t = FitOptions::DEFAULT_MIN_COUNT)]
    fit_min_count: u64,
    /// Rank window `LO:HI` or `LO:`. The first one restricts the main fit;
    /// all of them replace the default sensitivity windows.
    #[arg(long)]
    fit_range: Vec<RankRange>,
    /// Estimator for the exponent.
    #[arg(long, value_enum, default_value_t = Method::LeastSquares)]
    method: Method,
}

#[derive(clap::ValueEnum, Debug, Clone, Copy)]
pub enum Method {
    LeastSquares,
    MaxLikelihood,
}

impl FitArgs {
    fn options(&self) -> FitOptions {
        FitOptions {
            min_count: self.fit_min_count,
            rank_range: self.fit_range.first().copied(),
            method: match self.method {
                Method::LeastSquares => FitMethod::LeastSquares,
                Method::MaxLikelihood => FitMethod::MaxLikelihood,
            },
        }
    }
}

#[derive(Args, Debug)]
pub struct FitZipfArgs {
    /// Rank file (`rank,sequence,count,percent`).
    #[arg(long)]
    input: PathBuf,
    #[arg(long)]
    output_dir: PathBuf,
    #[command(flatten)]
    fit: FitArgs,
}

#[derive(Args, Debug)]
pub struct HeapArgs {
    /// Sequence files, concatenated in the order given.
    #[arg(long, required = true, num_args = 1..)]
    input: Vec<PathBuf>,
    #[arg(long)]
    output_dir: PathBuf,
    #[arg(long, default_value_t = HeapOptions::DEFAULT_POINTS)]
    heap_points: usize,
    #[arg(long, default_value_t = HeapOptions::DEFAULT_REPEATS)]
    heap_repeats: u32,
    /// Random seed; a fresh one is drawn and printed if absent.
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Args, Debug)]
pub struct GenArgs {
    #[arg(long)]
    output_dir: PathBuf,
    /// Number of distinct sequence types.
    #[arg(long, default_value_t = 5000)]
    vocab: usize,
    /// Zipf exponent of the type distribution.
    #[arg(long, default_value_t = 1.9)]
    exponent: f64,
    /// Number of records.
    #[arg(long, default_value_t = 1_000_000)]
    size: u64,
    /// Random seed; a fresh one is drawn and printed if absent.
    #[arg(long)]
    seed: Option<u64>,
    #[command(flatten)]
    table: TableArgs,
}

#[derive(Args, Debug)]
pub struct CrawlArgs {
    /// Corpus file used as the publication store.
    #[arg(long)]
    input: PathBuf,
    #[arg(long)]
    output_dir: PathBuf,
    /// Author id to start from.
    #[arg(long)]
    seed_author: String,
    #[arg(long, default_value_t = 6)]
    max_distance: u32,
    #[arg(long, default_value_t = 50)]
    min_pubs: u64,
    #[arg(long, default_value_t = 2015)]
    min_year: i32,
    /// Collect only publications of expanded authors.
    #[arg(long)]
    skip_pruned_publications: bool,
}

#[derive(Args, Debug)]
pub struct PlotdataArgs {
    /// Directory holding `rank.csv` + `zipf_fit.txt` and/or
    /// `heap_curve.tsv` + `heap_fit.txt`; defaults to the output directory.
    #[arg(long)]
    input: Option<PathBuf>,
    #[arg(long)]
    output_dir: PathBuf,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: cannot start thread pool: {e}");
            return ExitCode::from(1);
        }
    }
    let outcome = match cli.command {
        Command::Map(args) => commands::map(&args),
        Command::Rank(args) => commands::rank(&args),
        Command::FitZipf(args) => commands::fit_zipf(&args),
        Command::Heap(args) => commands::heap(&args),
        Command::Gen(args) => commands::gen(&args),
        Command::Crawl(args) => commands::crawl(&args),
        Command::Plotdata(args) => commands::plotdata(&args),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
