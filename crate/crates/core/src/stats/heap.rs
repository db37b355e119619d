use std::collections::HashMap;
use std::io::{BufRead, Write};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::StatsError;
use crate::model::ContinentSequence;

#[derive(Debug, Clone, PartialEq)]
pub struct HeapPoint {
    pub sample_size: u64,
    /// Distinct-sequence count of each repeat, in repeat order.
    pub distinct: Vec<u64>,
    pub mean: f64,
    /// Sample standard deviation across repeats (0 for a single repeat).
    pub sd: f64,
}

impl HeapPoint {
    pub fn from_samples(sample_size: u64, distinct: Vec<u64>) -> Self {
        let n = distinct.len() as f64;
        let mean = distinct.iter().map(|&v| v as f64).sum::<f64>() / n;
        let sd = if distinct.len() > 1 {
            (distinct.iter().map(|&v| (v as f64 - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt()
        } else {
            0.0
        };
        HeapPoint {
            sample_size,
            distinct,
            mean,
            sd,
        }
    }

    pub fn repeats(&self) -> usize {
        self.distinct.len()
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct HeapCurve {
    points: Vec<HeapPoint>,
}

impl HeapCurve {
    pub fn from_points(points: Vec<HeapPoint>) -> Self {
        HeapCurve { points }
    }

    pub fn points(&self) -> &[HeapPoint] {
        &self.points
    }

    /// Tab-separated `n, mean, sd, distinct` where `distinct` lists the
    /// per-repeat counts separated by commas.
    pub fn write_tsv<W: Write>(&self, out: &mut W) -> std::io::Result<()> {
        writeln!(out, "n\tmean\tsd\tdistinct")?;
        for p in &self.points {
            let samples: Vec<String> = p.distinct.iter().map(u64::to_string).collect();
            writeln!(out, "{}\t{:.6}\t{:.6}\t{}", p.sample_size, p.mean, p.sd, samples.join(","))?;
        }
        Ok(())
    }

    pub fn read_tsv<R: BufRead>(source: R) -> Result<Self, StatsError> {
        let mut points = Vec::new();
        for (i, line) in source.lines().enumerate() {
            let line_no = i as u64 + 1;
            let line = line?;
            let err = |message: &str| StatsError::HeapFile {
                line: line_no,
                message: message.to_string(),
            };
            if i == 0 {
                if line.trim_end() != "n\tmean\tsd\tdistinct" {
                    return Err(err("expected header `n<TAB>mean<TAB>sd<TAB>distinct`"));
                }
                continue;
            }
            if line.trim().is_empty() {
                continue;
            }
            let fields: Vec<&str> = line.split('\t').collect();
            if fields.len() != 4 {
                return Err(err("expected 4 tab-separated fields"));
            }
            let n: u64 = fields[0].parse().map_err(|_| err("bad sample size"))?;
            let distinct = fields[3]
                .split(',')
                .map(|v| v.parse::<u64>())
                .collect::<Result<Vec<_>, _>>()
                .map_err(|_| err("bad distinct counts"))?;
            if distinct.is_empty() {
                return Err(err("no distinct counts"));
            }
            points.push(HeapPoint::from_samples(n, distinct));
        }
        Ok(HeapCurve { points })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HeapOptions {
    pub sample_sizes: Vec<u64>,
    pub repeats: u32,
    pub seed: u64,
}

impl HeapOptions {
    pub const DEFAULT_POINTS: usize = 20;
    pub const DEFAULT_REPEATS: u32 = 5;

    /// Default sampling plan for a corpus of `corpus_len` publications.
    pub fn defaults_for(corpus_len: u64, seed: u64) -> Self {
        HeapOptions {
            sample_sizes: default_sample_sizes(corpus_len, Self::DEFAULT_POINTS),
            repeats: Self::DEFAULT_REPEATS,
            seed,
        }
    }
}

/// `points` log-spaced sample sizes from `min(100, corpus_len)` to
/// `corpus_len`, rounded and deduplicated.
pub fn default_sample_sizes(corpus_len: u64, points: usize) -> Vec<u64> {
    if corpus_len == 0 || points == 0 {
        return Vec::new();
    }
    let lo = corpus_len.min(100) as f64;
    let hi = corpus_len as f64;
    if points == 1 || lo == hi {
        return vec![corpus_len];
    }
    let step = (hi.ln() - lo.ln()) / (points - 1) as f64;
    let mut sizes: Vec<u64> = (0..points)
        .map(|i| ((lo.ln() + step * i as f64).exp().round() as u64).clamp(1, corpus_len))
        .collect();
    *sizes.last_mut().expect("points > 1") = corpus_len;
    sizes.dedup();
    sizes
}

/// Dense ids for sequences, in order of first appearance. Returns the ids
/// and the vocabulary size.
pub fn intern(corpus: &[ContinentSequence]) -> (Vec<u32>, usize) {
    let mut ids: HashMap<ContinentSequence, u32> = HashMap::new();
    let out = corpus
        .iter()
        .map(|seq| {
            let next = ids.len() as u32;
            *ids.entry(*seq).or_insert(next)
        })
        .collect();
    (out, ids.len())
}

/// Distinct-sequence counts for random subsets of the corpus.
pub fn heap_curve(corpus: &[ContinentSequence], opts: &HeapOptions) -> Result<HeapCurve, StatsError> {
    let (ids, vocabulary) = intern(corpus);
    heap_curve_ids(&ids, vocabulary, opts)
}

/// [`heap_curve`] over pre-interned type ids, all `< vocabulary`.
///
/// Each `(point, repeat)` draw uses its own ChaCha8 stream,
/// `seed_from_u64(seed)` with stream `point << 32 | repeat`, and a partial
/// Fisher-Yates shuffle over the index range. Results do not depend on
/// thread count or scheduling.
pub fn heap_curve_ids(ids: &[u32], vocabulary: usize, opts: &HeapOptions) -> Result<HeapCurve, StatsError> {
    if opts.repeats == 0 {
        return Err(StatsError::InvalidOption("repeats must be at least 1".into()));
    }
    let available = ids.len() as u64;
    for &n in &opts.sample_sizes {
        if n > available {
            return Err(StatsError::SampleTooLarge {
                requested: n,
                available,
            });
        }
        if n == 0 {
            return Err(StatsError::InvalidOption("sample size must be at least 1".into()));
        }
    }
    let tasks: Vec<(usize, u32)> = (0..opts.sample_sizes.len())
        .flat_map(|p| (0..opts.repeats).map(move |r| (p, r)))
        .collect();
    let counts: Vec<u64> = tasks
        .par_iter()
        .map(|&(p, r)| {
            let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
            rng.set_stream(((p as u64) << 32) | u64::from(r));
            distinct_in_sample(ids, vocabulary, opts.sample_sizes[p] as usize, &mut rng)
        })
        .collect();
    let points = opts
        .sample_sizes
        .iter()
        .zip(counts.chunks(opts.repeats as usize))
        .map(|(&n, chunk)| HeapPoint::from_samples(n, chunk.to_vec()))
        .collect();
    Ok(HeapCurve { points })
}

fn distinct_in_sample(ids: &[u32], vocabulary: usize, n: usize, rng: &mut ChaCha8Rng) -> u64 {
    let len = ids.len();
    let mut index: Vec<u32> = (0..len as u32).collect();
    let mut seen = vec![false; vocabulary];
    let mut distinct = 0;
    for i in 0..n {
        let j = rng.random_range(i..len);
        index.swap(i, j);
        let t = ids[index[i] as usize] as usize;
        if !seen[t] {
            seen[t] = true;
            distinct += 1;
        }
    }
    distinct
}
