//! Synthetic corpora with a known Zipf distribution over sequence types.
//!
//! Type `k` (1-based) is drawn with probability `k^-a / H(V, a)` where
//! `H(V, a) = sum_{j=1..V} j^-a`. Sampling inverts the cumulative table
//! by binary search on one uniform `f64` per record.
//!
//! Randomness: ChaCha8 (`rand_chacha` 0.9) seeded with `seed_from_u64`.
//! Record `i` uses the `u64` at word position `2 i` of that stream, mapped
//! to `[0, 1)` as `(x >> 11) * 2^-53`. Any record can be regenerated on
//! its own, and parallel generation is identical to sequential.
//!
//! Each type is materialized as a fixed record template whose countries
//! are the first territories (in label order) of the built-in table on
//! each continent, so mapping a generated record returns its type exactly.

use std::io::{self, Write};
use std::ops::Range;

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use thiserror::Error;

use crate::ingest::write_record;
use crate::model::{
    Affiliation, AuthorRecord, Continent, ContinentSequence, ContinentTable, PublicationRecord,
    TerritoryLabel,
};

const CHUNK: usize = 8192;
const COUNTRIES_PER_AUTHOR: usize = 3;

#[derive(Debug, Error, PartialEq)]
pub enum SyngenError {
    #[error("vocabulary size must be at least 1")]
    EmptyVocabulary,
    #[error("exponent must be positive and finite, got {0}")]
    BadExponent(f64),
    #[error("the territory table supports only {available} distinct sequences, {requested} requested")]
    VocabularyTooLarge { requested: usize, available: usize },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SyntheticSpec {
    pub vocabulary_size: usize,
    pub exponent: f64,
    pub corpus_size: u64,
    pub seed: u64,
}

impl SyntheticSpec {
    pub fn validate(&self) -> Result<(), SyngenError> {
        if self.vocabulary_size == 0 {
            return Err(SyngenError::EmptyVocabulary);
        }
        if !(self.exponent.is_finite() && self.exponent > 0.0) {
            return Err(SyngenError::BadExponent(self.exponent));
        }
        Ok(())
    }
}

/// Inverse-CDF sampler for a finite Zipf distribution on `1..=n`.
#[derive(Debug, Clone)]
pub struct ZipfSampler {
    cdf: Vec<f64>,
}

impl ZipfSampler {
    pub fn new(n: usize, exponent: f64) -> Self {
        let mut cdf = Vec::with_capacity(n);
        let mut acc = 0.0;
        for k in 1..=n {
            acc += (k as f64).powf(-exponent);
            cdf.push(acc);
        }
        for c in &mut cdf {
            *c /= acc;
        }
        if let Some(last) = cdf.last_mut() {
            *last = 1.0;
        }
        ZipfSampler { cdf }
    }

    /// Maps `u` in `[0, 1)` to a 1-based type.
    pub fn sample(&self, u: f64) -> usize {
        self.cdf.partition_point(|&c| c <= u).min(self.cdf.len() - 1) + 1
    }
}

fn unit_f64(x: u64) -> f64 {
    (x >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// The first `n` sequences in generation order: by total country count,
/// then by per-continent counts in descending lexicographic order. Counts
/// are capped by the table's territories on each continent.
pub fn sequence_vocabulary(table: &ContinentTable, n: usize) -> Result<Vec<ContinentSequence>, SyngenError> {
    let caps: Vec<u32> = Continent::ALL
        .iter()
        .map(|&c| table.territories_on(c).len() as u32)
        .collect();
    let max_total: u32 = caps.iter().sum();
    let mut out = Vec::with_capacity(n);
    let mut counts = [0u32; Continent::COUNT];
    for total in 1..=max_total {
        compositions(&caps, 0, total, &mut counts, &mut out, n);
        if out.len() >= n {
            out.truncate(n);
            return Ok(out);
        }
    }
    Err(SyngenError::VocabularyTooLarge {
        requested: n,
        available: out.len(),
    })
}

fn compositions(
    caps: &[u32],
    pos: usize,
    remaining: u32,
    counts: &mut [u32; Continent::COUNT],
    out: &mut Vec<ContinentSequence>,
    limit: usize,
) {
    if out.len() >= limit {
        return;
    }
    if pos == Continent::COUNT - 1 {
        if remaining <= caps[pos] {
            counts[pos] = remaining;
            out.push(ContinentSequence::from_counts(*counts).expect("total >= 1"));
        }
        return;
    }
    let rest_cap: u32 = caps[pos + 1..].iter().sum();
    let hi = remaining.min(caps[pos]);
    let lo = remaining.saturating_sub(rest_cap);
    for c in (lo..=hi).rev() {
        counts[pos] = c;
        compositions(caps, pos + 1, remaining - c, counts, out, limit);
    }
    counts[pos] = 0;
}

/// A record whose mapped sequence is exactly `seq`.
pub fn template_record(type_index: usize, seq: &ContinentSequence, table: &ContinentTable) -> PublicationRecord {
    let countries: Vec<&TerritoryLabel> = seq
        .parts()
        .flat_map(|(c, n)| table.territories_on(c).into_iter().take(n as usize))
        .collect();
    let mut authors: Vec<AuthorRecord> = countries
        .chunks(COUNTRIES_PER_AUTHOR)
        .enumerate()
        .map(|(j, chunk)| AuthorRecord {
            author_id: format!("t{type_index}-a{j}"),
            affiliations: chunk
                .iter()
                .map(|c| Affiliation {
                    institution: format!("Institute of {c}"),
                    country: Some((*c).clone()),
                })
                .collect(),
        })
        .collect();
    // A repeated country on the first author exercises per-author dedup.
    let first = &mut authors[0];
    let repeat = first.affiliations[0].country.clone();
    first.affiliations.push(Affiliation {
        institution: format!("Second institute of {}", repeat.as_ref().expect("set above")),
        country: repeat,
    });
    PublicationRecord {
        id: String::new(),
        year: 0,
        authors,
    }
}

pub struct Generator {
    spec: SyntheticSpec,
    sampler: ZipfSampler,
    vocabulary: Vec<ContinentSequence>,
    templates: Vec<PublicationRecord>,
}

impl Generator {
    pub fn new(spec: SyntheticSpec, table: &ContinentTable) -> Result<Self, SyngenError> {
        spec.validate()?;
        let vocabulary = sequence_vocabulary(table, spec.vocabulary_size)?;
        let templates = vocabulary
            .iter()
            .enumerate()
            .map(|(i, seq)| template_record(i + 1, seq, table))
            .collect();
        Ok(Generator {
            sampler: ZipfSampler::new(spec.vocabulary_size, spec.exponent),
            spec,
            vocabulary,
            templates,
        })
    }

    pub fn with_builtin_table(spec: SyntheticSpec) -> Result<Self, SyngenError> {
        Self::new(spec, ContinentTable::builtin())
    }

    pub fn spec(&self) -> &SyntheticSpec {
        &self.spec
    }

    /// Sequence of 1-based type `k` is `vocabulary()[k - 1]`.
    pub fn vocabulary(&self) -> &[ContinentSequence] {
        &self.vocabulary
    }

    fn rng_at(&self, index: u64) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.spec.seed);
        rng.set_word_pos(u128::from(index) * 2);
        rng
    }

    /// 1-based type of record `index`.
    pub fn type_of(&self, index: u64) -> usize {
        self.sampler.sample(unit_f64(self.rng_at(index).next_u64()))
    }

    /// 1-based types of records in `range`, generated in parallel chunks.
    pub fn types(&self, range: Range<u64>) -> Vec<u32> {
        let starts: Vec<u64> = (range.start..range.end).step_by(CHUNK).collect();
        starts
            .par_iter()
            .flat_map_iter(|&start| {
                let end = (start + CHUNK as u64).min(range.end);
                let mut rng = self.rng_at(start);
                (start..end)
                    .map(move |_| self.sampler.sample(unit_f64(rng.next_u64())) as u32)
                    .collect::<Vec<_>>()
            })
            .collect()
    }

    pub fn all_types(&self) -> Vec<u32> {
        self.types(0..self.spec.corpus_size)
    }

    fn materialize(&self, index: u64, type_k: usize) -> PublicationRecord {
        let mut record = self.templates[type_k - 1].clone();
        record.id = format!("syn-{index:09}");
        record.year = 2015 + (index % 9) as i32;
        record
    }

    pub fn record(&self, index: u64) -> PublicationRecord {
        self.materialize(index, self.type_of(index))
    }

    pub fn records(&self, range: Range<u64>) -> Vec<PublicationRecord> {
        let start = range.start;
        self.types(range)
            .par_iter()
            .enumerate()
            .map(|(offset, &k)| self.materialize(start + offset as u64, k as usize))
            .collect()
    }

    /// Writes the whole corpus in the ingest line format.
    pub fn write_corpus<W: Write>(&self, out: &mut W) -> io::Result<()> {
        let n = self.spec.corpus_size;
        let mut start = 0;
        while start < n {
            let end = (start + 16 * CHUNK as u64).min(n);
            let lines: Vec<Vec<u8>> = self
                .records(start..end)
                .par_iter()
                .map(|r| {
                    let mut buf = Vec::with_capacity(256);
                    write_record(&mut buf, r).expect("writing to memory");
                    buf
                })
                .collect();
            for line in lines {
                out.write_all(&line)?;
            }
            start = end;
        }
        Ok(())
    }
}

/// The whole corpus, built from the built-in territory table.
pub fn generate_corpus(spec: &SyntheticSpec) -> Result<Vec<PublicationRecord>, SyngenError> {
    let generator = Generator::with_builtin_table(*spec)?;
    Ok(generator.records(0..spec.corpus_size))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ingest::{filter_record, ExclusionPolicy};
    use crate::mapping::map_to_sequence;

    fn spec(vocabulary_size: usize, exponent: f64, corpus_size: u64, seed: u64) -> SyntheticSpec {
        SyntheticSpec {
            vocabulary_size,
            exponent,
            corpus_size,
            seed,
        }
    }

    #[test]
    fn empty_corpus() {
        assert!(generate_corpus(&spec(10, 2.0, 0, 1)).unwrap().is_empty());
    }

    #[test]
    fn invalid_specs() {
        assert_eq!(
            Generator::with_builtin_table(spec(0, 2.0, 5, 1)).err(),
            Some(SyngenError::EmptyVocabulary)
        );
        assert!(matches!(
            Generator::with_builtin_table(spec(5, -1.0, 5, 1)).err(),
            Some(SyngenError::BadExponent(_))
        ));
        let tiny = ContinentTable::from_entries([("Poland", Continent::Europe)]).unwrap();
        assert_eq!(
            sequence_vocabulary(&tiny, 2),
            Err(SyngenError::VocabularyTooLarge { requested: 2, available: 1 })
        );
    }

    #[test]
    fn vocabulary_is_distinct_and_ordered_by_size() {
        let vocab = sequence_vocabulary(ContinentTable::builtin(), 5000).unwrap();
        let unique: std::collections::HashSet<_> = vocab.iter().collect();
        assert_eq!(unique.len(), 5000);
        assert!(vocab.windows(2).all(|w| w[0].total_countries() <= w[1].total_countries()));
        assert_eq!(vocab[0].render(), "Africa (1)");
        assert_eq!(vocab[5].render(), "South America (1)");
        assert_eq!(vocab[6].render(), "Africa (2)");
    }

    #[test]
    fn sampler_edges() {
        let s = ZipfSampler::new(3, 1.0);
        assert_eq!(s.sample(0.0), 1);
        assert_eq!(s.sample(0.999_999_999), 3);
        // P(1) = 1 / (1 + 1/2 + 1/3) = 6/11
        assert_eq!(s.sample(6.0 / 11.0 - 1e-12), 1);
        assert_eq!(s.sample(6.0 / 11.0 + 1e-12), 2);
        assert_eq!(ZipfSampler::new(1, 2.0).sample(0.7), 1);
    }

    #[test]
    fn seeded_determinism_and_random_access() {
        let s = spec(50, 1.5, 20_000, 99);
        let g = Generator::with_builtin_table(s).unwrap();
        let a = g.records(0..s.corpus_size);
        let b = generate_corpus(&s).unwrap();
        assert_eq!(a, b);
        for i in [0u64, 1, 8191, 8192, 19_999] {
            assert_eq!(g.record(i), a[i as usize]);
        }
        let mut ba = Vec::new();
        let mut bb = Vec::new();
        g.write_corpus(&mut ba).unwrap();
        Generator::with_builtin_table(s).unwrap().write_corpus(&mut bb).unwrap();
        assert_eq!(ba, bb);
        let other = generate_corpus(&SyntheticSpec { seed: 100, ..s }).unwrap();
        assert_ne!(a, other);
    }

    #[test]
    fn records_pass_ingest_and_map_to_their_type() {
        let s = spec(3000, 1.2, 30_000, 5);
        let g = Generator::with_builtin_table(s).unwrap();
        let table = ContinentTable::builtin();
        let policy = ExclusionPolicy::default();
        let types = g.all_types();
        for (rec, &k) in g.records(0..s.corpus_size).iter().zip(&types) {
            assert!(filter_record(rec, &policy, table).is_accepted());
            assert_eq!(map_to_sequence(rec, table).unwrap(), g.vocabulary()[k as usize - 1]);
        }
        // Every template, not just the sampled ones.
        for (i, seq) in g.vocabulary().iter().enumerate() {
            let rec = template_record(i + 1, seq, table);
            assert!(rec.authors.iter().all(|a| a.affiliations.len() <= 5));
            assert_eq!(map_to_sequence(&rec, table).unwrap(), *seq);
        }
    }
}
