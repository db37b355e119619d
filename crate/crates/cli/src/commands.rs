use std::fmt;
use std::fs::{self, File};
use std::hash::{BuildHasher, RandomState};
use std::io::{self, BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::SystemTime;

use intercont_core::crawl::{crawl as run_crawl, CrawlError, CrawlPolicy, MemoryStore};
use intercont_core::ingest::{parse_corpus, write_record, CorpusItem, ExclusionPolicy, IngestReport};
use intercont_core::pipeline::CorpusMapper;
use intercont_core::stats::{
    default_sample_sizes, default_sensitivity_ranges, fit_heap, fit_zipf as run_fit_zipf,
    heap_curve, zipf_sensitivity, FitResult, HeapCurve, HeapOptions, Law, RankTable,
    SequenceCounts, StatsError,
};
use intercont_core::syngen::{Generator, SyntheticSpec};
use intercont_core::{ContinentSequence, ContinentTable};

use crate::{CrawlArgs, FitZipfArgs, GenArgs, HeapArgs, MapArgs, PlotdataArgs, RankArgs, TableArgs};

pub const SEQUENCES: &str = "sequences.txt";
pub const INGEST_REPORT: &str = "ingest_report.txt";
pub const RANK: &str = "rank.csv";
pub const ZIPF_FIT: &str = "zipf_fit.txt";
pub const ZIPF_SENSITIVITY: &str = "zipf_sensitivity.tsv";
pub const HEAP_CURVE: &str = "heap_curve.tsv";
pub const HEAP_FIT: &str = "heap_fit.txt";
pub const CORPUS: &str = "corpus.jsonl";

/// Malformed-line notices printed per input file before summarizing.
const MAX_NOTICES: u64 = 20;

#[derive(Debug)]
pub enum CliError {
    /// I/O or configuration problem.
    Config(String),
    /// The command ran but produced nothing.
    Empty(String),
    /// Too few points for a fit.
    Insufficient(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => 1,
            CliError::Empty(_) => 2,
            CliError::Insufficient(_) => 3,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Config(m) | CliError::Empty(m) | CliError::Insufficient(m) => f.write_str(m),
        }
    }
}

fn at(path: &Path) -> impl Fn(io::Error) -> CliError + '_ {
    move |e| CliError::Config(format!("{}: {e}", path.display()))
}

fn stats_error(context: &str, e: StatsError) -> CliError {
    let message = format!("{context}: {e}");
    match e {
        StatsError::EmptyInput => CliError::Empty(message),
        StatsError::InsufficientData { .. } | StatsError::Degenerate | StatsError::NoConvergence => {
            CliError::Insufficient(message)
        }
        _ => CliError::Config(message),
    }
}

fn open(path: &Path) -> Result<BufReader<File>, CliError> {
    File::open(path).map(|f| BufReader::with_capacity(1 << 20, f)).map_err(at(path))
}

fn output_file(dir: &Path, name: &str) -> Result<(PathBuf, BufWriter<File>), CliError> {
    fs::create_dir_all(dir).map_err(at(dir))?;
    let path = dir.join(name);
    let file = File::create(&path).map_err(at(&path))?;
    Ok((path, BufWriter::new(file)))
}

/// Writes a whole file produced by `body`.
fn write_output<F>(dir: &Path, name: &str, body: F) -> Result<(), CliError>
where
    F: FnOnce(&mut BufWriter<File>) -> io::Result<()>,
{
    let (path, mut out) = output_file(dir, name)?;
    body(&mut out).and_then(|()| out.flush()).map_err(at(&path))
}

fn load_table(args: &TableArgs) -> Result<ContinentTable, CliError> {
    let table = match &args.continents {
        Some(path) => ContinentTable::from_reader(open(path)?)
            .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?,
        None => ContinentTable::builtin().clone(),
    };
    match &args.aliases {
        Some(path) => table
            .with_aliases(open(path)?)
            .map_err(|e| CliError::Config(format!("{}: {e}", path.display()))),
        None => Ok(table),
    }
}

fn resolve_seed(seed: Option<u64>) -> u64 {
    let seed = seed.unwrap_or_else(|| RandomState::new().hash_one(SystemTime::now()));
    println!("seed = {seed}");
    seed
}

fn read_sequences(paths: &[PathBuf]) -> Result<Vec<ContinentSequence>, CliError> {
    let mut out = Vec::new();
    for path in paths {
        for (i, line) in open(path)?.lines().enumerate() {
            let line = line.map_err(at(path))?;
            if line.trim().is_empty() {
                continue;
            }
            let seq = line
                .parse()
                .map_err(|e| CliError::Config(format!("{}:{}: {e}", path.display(), i + 1)))?;
            out.push(seq);
        }
    }
    Ok(out)
}

pub fn map(args: &MapArgs) -> Result<(), CliError> {
    let table = load_table(&args.table)?;
    let policy = ExclusionPolicy::new(args.max_affils).map_err(|e| CliError::Config(e.to_string()))?;
    let mapper = CorpusMapper::new(&table, policy);
    let (out_path, mut out) = output_file(&args.output_dir, SEQUENCES)?;
    let mut report = IngestReport::default();
    for path in &args.input {
        let mut notices = 0u64;
        let mut write_error = None;
        let file_report = mapper
            .run(
                open(path)?,
                |_, seq| {
                    if write_error.is_none() {
                        write_error = writeln!(out, "{seq}").err();
                    }
                },
                |m| {
                    notices += 1;
                    if notices <= MAX_NOTICES {
                        eprintln!("{}:{}: {}", path.display(), m.line, m.message);
                    }
                },
            )
            .map_err(at(path))?;
        if let Some(e) = write_error {
            return Err(at(&out_path)(e));
        }
        if notices > MAX_NOTICES {
            eprintln!("{}: {} further malformed lines", path.display(), notices - MAX_NOTICES);
        }
        report += file_report;
    }
    out.flush().map_err(at(&out_path))?;
    write_output(&args.output_dir, INGEST_REPORT, |w| write!(w, "{report}"))?;
    print!("{report}");
    if report.accepted == 0 {
        return Err(CliError::Empty("no record was accepted".into()));
    }
    Ok(())
}

pub fn rank(args: &RankArgs) -> Result<(), CliError> {
    let mut counts = SequenceCounts::new();
    counts.extend(read_sequences(&args.input)?);
    let table = counts.into_rank_table().map_err(|e| stats_error("rank", e))?;
    write_output(&args.output_dir, RANK, |w| table.write_csv(w))?;
    println!("records = {}", table.total_count());
    println!("distinct_sequences = {}", table.len());
    Ok(())
}

fn write_sensitivity<W: Write>(w: &mut W, rows: &[intercont_core::stats::SensitivityRow]) -> io::Result<()> {
    writeln!(w, "range\tmethod\texponent\tuncertainty\tfit_range\tpoints\tr_squared\tstatus")?;
    for row in rows {
        match &row.result {
            Ok(f) => writeln!(
                w,
                "{}\t{}\t{:.6}\t{:.6}\t{}..{}\t{}\t{:.6}\tok",
                row.range,
                f.method.name(),
                f.exponent,
                f.uncertainty,
                f.fit_range.0,
                f.fit_range.1,
                f.points,
                f.r_squared
            )?,
            Err(e) => writeln!(w, "{}\t-\tNA\tNA\tNA\t0\tNA\t{e}", row.range)?,
        }
    }
    Ok(())
}

pub fn fit_zipf(args: &FitZipfArgs) -> Result<(), CliError> {
    let table = RankTable::read_csv(open(&args.input)?)
        .map_err(|e| stats_error(&args.input.display().to_string(), e))?;
    let opts = args.fit.options();
    let ranges = if args.fit.fit_range.is_empty() {
        default_sensitivity_ranges()
    } else {
        args.fit.fit_range.clone()
    };
    let rows = zipf_sensitivity(&table, &ranges, &opts);
    write_output(&args.output_dir, ZIPF_SENSITIVITY, |w| write_sensitivity(w, &rows))?;
    let fit = run_fit_zipf(&table, &opts).map_err(|e| stats_error("zipf fit", e))?;
    write_output(&args.output_dir, ZIPF_FIT, |w| write!(w, "{fit}"))?;
    print!("{fit}");
    Ok(())
}

pub fn heap(args: &HeapArgs) -> Result<(), CliError> {
    if args.heap_points == 0 {
        return Err(CliError::Config("--heap-points must be at least 1".into()));
    }
    let corpus = read_sequences(&args.input)?;
    if corpus.is_empty() {
        return Err(CliError::Empty("no sequences to sample".into()));
    }
    let seed = resolve_seed(args.seed);
    let opts = HeapOptions {
        sample_sizes: default_sample_sizes(corpus.len() as u64, args.heap_points),
        repeats: args.heap_repeats,
        seed,
    };
    let curve = heap_curve(&corpus, &opts).map_err(|e| stats_error("heap curve", e))?;
    write_output(&args.output_dir, HEAP_CURVE, |w| curve.write_tsv(w))?;
    let fit = fit_heap(&curve).map_err(|e| stats_error("heap fit", e))?;
    write_output(&args.output_dir, HEAP_FIT, |w| write!(w, "{fit}seed = {seed}\n"))?;
    print!("{fit}");
    Ok(())
}

pub fn gen(args: &GenArgs) -> Result<(), CliError> {
    let table = load_table(&args.table)?;
    let seed = resolve_seed(args.seed);
    let spec = SyntheticSpec {
        vocabulary_size: args.vocab,
        exponent: args.exponent,
        corpus_size: args.size,
        seed,
    };
    let generator = Generator::new(spec, &table).map_err(|e| CliError::Config(e.to_string()))?;
    write_output(&args.output_dir, CORPUS, |w| generator.write_corpus(w))?;
    println!("records = {}", args.size);
    if args.size == 0 {
        return Err(CliError::Empty("empty corpus requested".into()));
    }
    Ok(())
}

pub fn crawl(args: &CrawlArgs) -> Result<(), CliError> {
    let (store, skipped) = MemoryStore::from_corpus_file(&args.input)
        .map_err(|e| CliError::Config(format!("{}: {e}", args.input.display())))?;
    if skipped > 0 {
        eprintln!("{}: skipped {skipped} malformed lines", args.input.display());
    }
    let policy = CrawlPolicy {
        max_distance: args.max_distance,
        min_total_publications: args.min_pubs,
        min_last_publication_year: args.min_year,
        collect_pruned_publications: !args.skip_pruned_publications,
    };
    let result = run_crawl(&store, &args.seed_author, &policy).map_err(|e| match e {
        CrawlError::UnknownSeed(_) => CliError::Config(e.to_string()),
        CrawlError::Store(e) => CliError::Config(e.to_string()),
    })?;

    let mut by_distance: Vec<(&String, &u32)> = result.distances.iter().collect();
    by_distance.sort_by_key(|&(a, d)| (*d, a));
    write_output(&args.output_dir, "crawl_distances.tsv", |w| {
        writeln!(w, "author_id\tdistance\tstatus")?;
        for (a, d) in &by_distance {
            let status = if result.expanded.contains(*a) { "expanded" } else { "pruned" };
            writeln!(w, "{a}\t{d}\t{status}")?;
        }
        Ok(())
    })?;
    write_output(&args.output_dir, "crawl_pruned.tsv", |w| {
        writeln!(w, "author_id\tdistance\treasons")?;
        for (a, reasons) in &result.pruned {
            let names: Vec<&str> = reasons.iter().map(|r| r.name()).collect();
            writeln!(w, "{a}\t{}\t{}", result.distances[a], names.join(","))?;
        }
        Ok(())
    })?;
    write_output(&args.output_dir, "crawl_publications.txt", |w| {
        result.publication_ids.iter().try_for_each(|p| writeln!(w, "{p}"))
    })?;

    let mut remaining = result.publication_ids.clone();
    let (corpus_path, mut out) = output_file(&args.output_dir, "crawl_corpus.jsonl")?;
    for item in parse_corpus(open(&args.input)?) {
        if let CorpusItem::Record { record, .. } = item.map_err(at(&args.input))? {
            if remaining.remove(&record.id) {
                write_record(&mut out, &record).map_err(at(&corpus_path))?;
            }
        }
    }
    out.flush().map_err(at(&corpus_path))?;

    println!("authors_reached = {}", result.distances.len());
    println!("authors_expanded = {}", result.expanded.len());
    println!("authors_pruned = {}", result.pruned.len());
    println!("publications = {}", result.publication_ids.len());
    Ok(())
}

fn read_fit(path: &Path, law: Law) -> Result<FitResult, CliError> {
    let text = fs::read_to_string(path).map_err(at(path))?;
    let fit: FitResult = text
        .parse()
        .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
    if fit.law != law {
        return Err(CliError::Config(format!("{}: fit is for another law", path.display())));
    }
    Ok(fit)
}

/// Both files of a pair, or neither; a half pair is an error.
fn artifact_pair(dir: &Path, data: &str, fit: &str) -> Result<Option<(PathBuf, PathBuf)>, CliError> {
    let (d, f) = (dir.join(data), dir.join(fit));
    match (d.is_file(), f.is_file()) {
        (true, true) => Ok(Some((d, f))),
        (false, false) => Ok(None),
        (true, false) => Err(CliError::Config(format!("missing {}", f.display()))),
        (false, true) => Err(CliError::Config(format!("missing {}", d.display()))),
    }
}

fn write_xy<I>(dir: &Path, name: &str, header: &str, points: I) -> Result<(), CliError>
where
    I: IntoIterator<Item = (u64, f64)>,
{
    write_output(dir, name, |w| {
        writeln!(w, "# {header}")?;
        points.into_iter().try_for_each(|(x, y)| writeln!(w, "{x}\t{y:.9e}"))
    })
}

pub fn plotdata(args: &PlotdataArgs) -> Result<(), CliError> {
    let dir = args.input.as_deref().unwrap_or(&args.output_dir);
    let rank = artifact_pair(dir, RANK, ZIPF_FIT)?;
    let heap = artifact_pair(dir, HEAP_CURVE, HEAP_FIT)?;
    if rank.is_none() && heap.is_none() {
        return Err(CliError::Config(format!(
            "{}: neither {RANK} + {ZIPF_FIT} nor {HEAP_CURVE} + {HEAP_FIT} found",
            dir.display()
        )));
    }
    let out = &args.output_dir;
    if let Some((rank_path, fit_path)) = rank {
        let table = RankTable::read_csv(open(&rank_path)?)
            .map_err(|e| stats_error(&rank_path.display().to_string(), e))?;
        let fit = read_fit(&fit_path, Law::Zipf)?;
        let ranks = || table.entries().iter().map(|e| e.rank);
        write_xy(out, "rank_frequency.tsv", "rank\tfrequency", table.entries().iter().map(|e| (e.rank, e.frequency)))?;
        write_xy(out, "rank_frequency_fit.tsv", "rank\tfitted_frequency", ranks().map(|r| (r, fit.evaluate(r as f64))))?;
        println!("rank_points = {}", table.len());
    }
    if let Some((curve_path, fit_path)) = heap {
        let curve = HeapCurve::read_tsv(open(&curve_path)?)
            .map_err(|e| stats_error(&curve_path.display().to_string(), e))?;
        let fit = read_fit(&fit_path, Law::Heap)?;
        let points = curve.points();
        write_xy(out, "heap.tsv", "n\tmean_distinct", points.iter().map(|p| (p.sample_size, p.mean)))?;
        write_xy(out, "heap_fit.tsv", "n\tfitted_distinct", points.iter().map(|p| (p.sample_size, fit.evaluate(p.sample_size as f64))))?;
        println!("heap_points = {}", points.len());
    }
    Ok(())
}
