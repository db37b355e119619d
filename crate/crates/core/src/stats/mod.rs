//! Rank-frequency tables, Zipf exponent fits and Heaps-law curves.

mod fit;
mod heap;
mod rank;

use thiserror::Error;

pub use fit::{
    default_sensitivity_ranges, fit_heap, fit_zipf, zipf_sensitivity, FitMethod, FitOptions,
    FitResult, Law, RankRange, SensitivityRow,
};
pub use heap::{
    default_sample_sizes, heap_curve, heap_curve_ids, intern, HeapCurve, HeapOptions, HeapPoint,
};
pub use rank::{build_rank_table, build_rank_table_par, RankEntry, RankTable, SequenceCounts};

#[derive(Debug, Error)]
pub enum StatsError {
    #[error("no sequences to rank")]
    EmptyInput,
    #[error("need at least {required} points for a fit, have {points}")]
    InsufficientData { points: usize, required: usize },
    #[error("all fit points share the same x value")]
    Degenerate,
    #[error("sample size {requested} exceeds corpus size {available}")]
    SampleTooLarge { requested: u64, available: u64 },
    #[error("invalid option: {0}")]
    InvalidOption(String),
    #[error("rank file line {line}: {message}")]
    RankFile { line: u64, message: String },
    #[error("heap curve line {line}: {message}")]
    HeapFile { line: u64, message: String },
    #[error("fit report line {line}: {message}")]
    FitReport { line: u64, message: String },
    #[error("maximum-likelihood fit did not bracket a solution")]
    NoConvergence,
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Minimum number of points any fit accepts.
pub const MIN_FIT_POINTS: usize = 3;
