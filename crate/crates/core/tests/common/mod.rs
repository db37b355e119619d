#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};
use std::path::PathBuf;

use intercont_core::crawl::{AuthorProfile, CrawlPolicy, CrawlResult, MemoryStore, PruneReason};
use intercont_core::syngen::sequence_vocabulary;
use intercont_core::{ContinentSequence, ContinentTable};
use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("tests/fixtures")
        .join(name)
}

pub fn read_fixture(name: &str) -> String {
    std::fs::read_to_string(fixture(name)).unwrap_or_else(|e| panic!("{name}: {e}"))
}

/// The 20 reference (sequence, percent) rows.
pub fn top20_percentages() -> Vec<(ContinentSequence, f64)> {
    read_fixture("top20_shares.tsv")
        .lines()
        .skip(1)
        .map(|line| {
            let cols: Vec<&str> = line.split('\t').collect();
            (cols[1].parse().unwrap(), cols[2].parse().unwrap())
        })
        .collect()
}

pub const TOP20_TOTAL: u64 = 10_000;

/// A 10,000-record corpus with the reference top-20 shares. The remainder
/// is spread over distinct filler sequences that occur once each, so the
/// filler never outranks a reference row.
pub fn top20_corpus() -> Vec<ContinentSequence> {
    let rows = top20_percentages();
    let mut corpus = Vec::with_capacity(TOP20_TOTAL as usize);
    for (seq, pct) in &rows {
        let n = (pct * 100.0).round() as usize;
        corpus.extend(std::iter::repeat_n(*seq, n));
    }
    let published: HashSet<ContinentSequence> = rows.iter().map(|r| r.0).collect();
    let remainder = TOP20_TOTAL as usize - corpus.len();
    let filler = sequence_vocabulary(ContinentTable::builtin(), remainder + published.len())
        .unwrap()
        .into_iter()
        .filter(|s| !published.contains(s))
        .take(remainder);
    corpus.extend(filler);
    assert_eq!(corpus.len() as u64, TOP20_TOTAL);
    corpus
}

/// Small random co-authorship graph with the data needed by the oracle.
pub struct RandomGraph {
    pub store: MemoryStore,
    pub publications: Vec<(String, i32, Vec<String>)>,
    /// Present when profiles were set explicitly on the store.
    pub explicit_profiles: Option<HashMap<String, AuthorProfile>>,
    pub seed_author: String,
    pub policy: CrawlPolicy,
}

pub fn random_graph(seed: u64) -> RandomGraph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = rng.random_range(1..=50usize);
    let authors: Vec<String> = (0..n).map(|i| format!("a{i:02}")).collect();
    let mut publications = Vec::new();
    let m = rng.random_range(0..=2 * n);
    for j in 0..m {
        let k = rng.random_range(1..=4usize.min(n));
        let members = sample(&mut rng, n, k).into_iter().map(|i| authors[i].clone()).collect();
        publications.push((format!("p{j:03}"), rng.random_range(2000..=2023), members));
    }
    let covered: BTreeSet<&String> = publications.iter().flat_map(|p| &p.2).collect();
    let uncovered: Vec<String> = authors.iter().filter(|a| !covered.contains(a)).cloned().collect();
    for a in uncovered {
        let id = format!("solo-{a}");
        publications.push((id, rng.random_range(2000..=2023), vec![a]));
    }

    let mut store = MemoryStore::new();
    for (id, year, members) in &publications {
        store.insert_raw(id, *year, members.iter().map(String::as_str));
    }
    let explicit = rng.random_bool(0.5);
    let explicit_profiles = explicit.then(|| {
        let profiles: HashMap<String, AuthorProfile> = authors
            .iter()
            .map(|a| {
                let p = AuthorProfile {
                    total_publications: rng.random_range(1..=120),
                    last_publication_year: rng.random_range(2005..=2023),
                };
                (a.clone(), p)
            })
            .collect();
        for (a, p) in &profiles {
            store.set_profile(a, *p);
        }
        profiles
    });
    let policy = CrawlPolicy {
        max_distance: rng.random_range(0..=6),
        min_total_publications: if explicit {
            rng.random_range(1..=80)
        } else {
            rng.random_range(1..=4)
        },
        min_last_publication_year: rng.random_range(2005..=2020),
        collect_pruned_publications: rng.random_bool(0.5),
    };
    let seed_author = authors[rng.random_range(0..n)].clone();
    RandomGraph {
        store,
        publications,
        explicit_profiles,
        seed_author,
        policy,
    }
}

/// Crawl outcome by relaxation to a fixpoint, using only the raw edge list.
pub fn crawl_oracle(g: &RandomGraph) -> CrawlResult {
    let mut profiles: HashMap<&str, AuthorProfile> = HashMap::new();
    for (_, year, members) in &g.publications {
        for a in members {
            let p = profiles.entry(a).or_insert(AuthorProfile {
                total_publications: 0,
                last_publication_year: i32::MIN,
            });
            p.total_publications += 1;
            p.last_publication_year = p.last_publication_year.max(*year);
        }
    }
    if let Some(explicit) = &g.explicit_profiles {
        for (a, p) in explicit {
            profiles.insert(a, *p);
        }
    }
    let policy = &g.policy;
    let reasons = |a: &str, d: u32| -> Vec<PruneReason> {
        if a == g.seed_author {
            return Vec::new();
        }
        let p = profiles[a];
        let mut r = Vec::new();
        if d > policy.max_distance {
            r.push(PruneReason::TooFar);
        }
        if p.total_publications < policy.min_total_publications {
            r.push(PruneReason::LowProductivity);
        }
        if p.last_publication_year < policy.min_last_publication_year {
            r.push(PruneReason::Inactive);
        }
        r
    };

    let mut dist: BTreeMap<String, u32> = BTreeMap::from([(g.seed_author.clone(), 0)]);
    loop {
        let mut changed = false;
        for (_, _, members) in &g.publications {
            for u in members {
                let Some(&du) = dist.get(u) else { continue };
                if !reasons(u, du).is_empty() {
                    continue;
                }
                for v in members {
                    if dist.get(v).is_none_or(|&dv| dv > du + 1) {
                        dist.insert(v.clone(), du + 1);
                        changed = true;
                    }
                }
            }
        }
        if !changed {
            break;
        }
    }

    let mut result = CrawlResult {
        distances: dist.clone(),
        ..Default::default()
    };
    for (a, &d) in &dist {
        let r = reasons(a, d);
        if r.is_empty() {
            result.expanded.insert(a.clone());
        } else {
            result.pruned.insert(a.clone(), r);
        }
    }
    for (id, _, members) in &g.publications {
        let collected = members.iter().any(|a| {
            result.expanded.contains(a) || (policy.collect_pruned_publications && result.pruned.contains_key(a))
        });
        if collected {
            result.publication_ids.insert(id.clone());
        }
    }
    result
}
