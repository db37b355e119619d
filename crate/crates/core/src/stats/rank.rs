use std::collections::HashMap;
use std::io::{Read, Write};

use rayon::prelude::*;

use super::StatsError;
use crate::model::ContinentSequence;

/// Mergeable sequence histogram.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SequenceCounts {
    counts: HashMap<ContinentSequence, u64>,
}

impl SequenceCounts {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, seq: ContinentSequence) {
        self.add_n(seq, 1);
    }

    pub fn add_n(&mut self, seq: ContinentSequence, n: u64) {
        if n > 0 {
            *self.counts.entry(seq).or_insert(0) += n;
        }
    }

    /// Folds `other` into `self`. Associative and commutative.
    pub fn merge(&mut self, other: SequenceCounts) {
        if self.counts.len() < other.counts.len() {
            let mine = std::mem::replace(self, other);
            return self.merge(mine);
        }
        for (seq, n) in other.counts {
            self.add_n(seq, n);
        }
    }

    pub fn distinct(&self) -> usize {
        self.counts.len()
    }

    pub fn total(&self) -> u64 {
        self.counts.values().sum()
    }

    pub fn get(&self, seq: &ContinentSequence) -> u64 {
        self.counts.get(seq).copied().unwrap_or(0)
    }

    pub fn into_rank_table(self) -> Result<RankTable, StatsError> {
        RankTable::from_counts(self.counts)
    }
}

impl Extend<ContinentSequence> for SequenceCounts {
    fn extend<T: IntoIterator<Item = ContinentSequence>>(&mut self, iter: T) {
        for seq in iter {
            self.add(seq);
        }
    }
}

impl FromIterator<ContinentSequence> for SequenceCounts {
    fn from_iter<T: IntoIterator<Item = ContinentSequence>>(iter: T) -> Self {
        let mut counts = SequenceCounts::new();
        counts.extend(iter);
        counts
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RankEntry {
    pub rank: u64,
    pub sequence: ContinentSequence,
    /// Rendered sequence, kept alongside since it also drives tie-breaks.
    pub label: String,
    pub count: u64,
    pub frequency: f64,
}

impl RankEntry {
    pub fn percent(&self) -> f64 {
        self.frequency * 100.0
    }
}

/// Distinct sequences by descending count. Ties go to the lexicographically
/// smaller rendered label; every entry has its own rank.
#[derive(Debug, Clone, PartialEq)]
pub struct RankTable {
    entries: Vec<RankEntry>,
    total_count: u64,
}

pub fn build_rank_table<I>(sequences: I) -> Result<RankTable, StatsError>
where
    I: IntoIterator<Item = ContinentSequence>,
{
    sequences
        .into_iter()
        .collect::<SequenceCounts>()
        .into_rank_table()
}

/// Parallel variant: per-worker histograms merged at the end.
pub fn build_rank_table_par(sequences: &[ContinentSequence]) -> Result<RankTable, StatsError> {
    sequences
        .par_iter()
        .fold(SequenceCounts::new, |mut acc, seq| {
            acc.add(*seq);
            acc
        })
        .reduce(SequenceCounts::new, |mut a, b| {
            a.merge(b);
            a
        })
        .into_rank_table()
}

impl RankTable {
    /// Builds a table from `(sequence, count)` pairs. Repeated sequences
    /// are summed and zero counts dropped.
    pub fn from_counts<I>(counts: I) -> Result<Self, StatsError>
    where
        I: IntoIterator<Item = (ContinentSequence, u64)>,
    {
        let mut merged: HashMap<ContinentSequence, u64> = HashMap::new();
        for (seq, n) in counts {
            if n > 0 {
                *merged.entry(seq).or_insert(0) += n;
            }
        }
        if merged.is_empty() {
            return Err(StatsError::EmptyInput);
        }
        let mut rows: Vec<(String, ContinentSequence, u64)> = merged
            .into_iter()
            .map(|(seq, n)| (seq.render(), seq, n))
            .collect();
        rows.sort_unstable_by(|a, b| b.2.cmp(&a.2).then_with(|| a.0.cmp(&b.0)));
        let total_count: u64 = rows.iter().map(|r| r.2).sum();
        let total = total_count as f64;
        let entries = rows
            .into_iter()
            .enumerate()
            .map(|(i, (label, sequence, count))| RankEntry {
                rank: i as u64 + 1,
                sequence,
                label,
                count,
                frequency: count as f64 / total,
            })
            .collect();
        Ok(RankTable {
            entries,
            total_count,
        })
    }

    pub fn entries(&self) -> &[RankEntry] {
        &self.entries
    }

    pub fn total_count(&self) -> u64 {
        self.total_count
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn by_rank(&self, rank: u64) -> Option<&RankEntry> {
        rank.checked_sub(1).and_then(|i| self.entries.get(i as usize))
    }

    pub fn rank_of(&self, seq: &ContinentSequence) -> Option<u64> {
        self.entries.iter().find(|e| e.sequence == *seq).map(|e| e.rank)
    }

    /// Writes `rank,sequence,count,percent`; the sequence is always quoted
    /// and the percentage has two decimals.
    pub fn write_csv<W: Write>(&self, out: &mut W) -> std::io::Result<()> {
        writeln!(out, "rank,sequence,count,percent")?;
        for e in &self.entries {
            writeln!(out, "{},\"{}\",{},{:.2}", e.rank, e.label, e.count, e.percent())?;
        }
        Ok(())
    }

    /// Reads a rank file. Only the `sequence` and `count` columns are used;
    /// ranks and percentages are recomputed.
    pub fn read_csv<R: Read>(source: R) -> Result<Self, StatsError> {
        let mut reader = csv::ReaderBuilder::new().flexible(true).from_reader(source);
        let headers = reader.headers().map_err(|e| StatsError::RankFile {
            line: 1,
            message: e.to_string(),
        })?;
        let col = |name: &str| {
            headers
                .iter()
                .position(|h| h.trim().eq_ignore_ascii_case(name))
                .ok_or_else(|| StatsError::RankFile {
                    line: 1,
                    message: format!("missing `{name}` column"),
                })
        };
        let (seq_col, count_col) = (col("sequence")?, col("count")?);
        let mut counts = Vec::new();
        for (i, record) in reader.records().enumerate() {
            let line = i as u64 + 2;
            let err = |message: String| StatsError::RankFile { line, message };
            let record = record.map_err(|e| err(e.to_string()))?;
            let seq_text = record.get(seq_col).ok_or_else(|| err("missing sequence".into()))?;
            let seq: ContinentSequence = seq_text.trim().parse().map_err(|e| err(format!("{e}")))?;
            let count: u64 = record
                .get(count_col)
                .ok_or_else(|| err("missing count".into()))?
                .trim()
                .parse()
                .map_err(|e| err(format!("bad count: {e}")))?;
            counts.push((seq, count));
        }
        Self::from_counts(counts)
    }
}
