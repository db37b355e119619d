use intercont_core::ingest::{filter_record, ExclusionPolicy};
use intercont_core::mapping::map_to_sequence;
use intercont_core::stats::{fit_zipf, FitOptions, SequenceCounts};
use intercont_core::syngen::{Generator, SyntheticSpec};
use intercont_core::ContinentTable;
use rayon::prelude::*;
use statrs::distribution::{ChiSquared, ContinuousCDF};

fn spec(vocabulary_size: usize, exponent: f64, corpus_size: u64, seed: u64) -> SyntheticSpec {
    SyntheticSpec {
        vocabulary_size,
        exponent,
        corpus_size,
        seed,
    }
}

#[test]
fn type_frequencies_pass_chi_square() {
    let (vocab, a, n) = (100usize, 2.0f64, 1_000_000u64);
    let weights: Vec<f64> = (1..=vocab).map(|k| (k as f64).powf(-a)).collect();
    let z: f64 = weights.iter().sum();
    for seed in [1u64, 2, 3] {
        let g = Generator::with_builtin_table(spec(vocab, a, n, seed)).unwrap();
        let mut observed = vec![0u64; vocab];
        for k in g.all_types() {
            observed[k as usize - 1] += 1;
        }
        // Pool the tail so every bin expects at least five records.
        let mut bins: Vec<(f64, f64)> = Vec::new();
        let mut acc = (0.0, 0.0);
        for (w, &o) in weights.iter().zip(&observed) {
            acc.0 += n as f64 * w / z;
            acc.1 += o as f64;
            if acc.0 >= 5.0 {
                bins.push(acc);
                acc = (0.0, 0.0);
            }
        }
        if acc.0 > 0.0 {
            let last = bins.last_mut().unwrap();
            last.0 += acc.0;
            last.1 += acc.1;
        }
        let stat: f64 = bins.iter().map(|(e, o)| (o - e).powi(2) / e).sum();
        let critical = ChiSquared::new((bins.len() - 1) as f64).unwrap().inverse_cdf(0.999);
        assert!(stat < critical, "seed {seed}: chi2 {stat} >= {critical}");
    }
}

/// Full path through records: generate, filter, map, rank, fit.
fn recovered_exponent(s: SyntheticSpec) -> f64 {
    let table = ContinentTable::builtin();
    let policy = ExclusionPolicy::default();
    let g = Generator::with_builtin_table(s).unwrap();
    let mut counts = SequenceCounts::new();
    let chunk = 1u64 << 16;
    let mut start = 0;
    while start < s.corpus_size {
        let end = (start + chunk).min(s.corpus_size);
        for rec in g.records(start..end) {
            assert!(filter_record(&rec, &policy, table).is_accepted());
            counts.add(map_to_sequence(&rec, table).unwrap());
        }
        start = end;
    }
    let ranks = counts.into_rank_table().unwrap();
    fit_zipf(&ranks, &FitOptions::default()).unwrap().exponent
}

#[test]
fn generate_map_rank_fit_recovers_exponent() {
    for a in [1.5, 1.9, 2.5] {
        let misses: Vec<(u64, f64)> = (1..=20u64)
            .into_par_iter()
            .map(|seed| (seed, recovered_exponent(spec(1000, a, 1_000_000, seed))))
            .filter(|(_, alpha)| (alpha - a).abs() > 0.05)
            .collect();
        assert!(misses.is_empty(), "a = {a}: {misses:?}");
    }
}
