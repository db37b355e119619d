//! Breadth-first co-authorship crawl from a seed author.
//!
//! Every author reached is recorded with their shortest distance and has
//! their publications collected. Co-authors are followed only through
//! authors that pass all three stopping rules:
//!
//! - distance from the seed at most `max_distance`
//! - at least `min_total_publications` publications
//! - latest publication no earlier than `min_last_publication_year`
//!
//! The seed is always expanded. Distances are shortest paths through the
//! expanded part of the graph; an author only reachable through a pruned
//! author is never reached. Layers are processed in sorted id order, so a
//! crawl is deterministic even though store queries within a layer run in
//! parallel.

mod store;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use rayon::prelude::*;
use thiserror::Error;

pub use store::{AuthorProfile, MemoryStore, PublicationStore, StoreError};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CrawlPolicy {
    pub max_distance: u32,
    pub min_total_publications: u64,
    pub min_last_publication_year: i32,
    /// Whether pruned authors' own publications join the collected set.
    pub collect_pruned_publications: bool,
}

impl Default for CrawlPolicy {
    fn default() -> Self {
        CrawlPolicy {
            max_distance: 6,
            min_total_publications: 50,
            min_last_publication_year: 2015,
            collect_pruned_publications: true,
        }
    }
}

impl CrawlPolicy {
    /// Stopping rules the author fails at `distance`, in a fixed order.
    pub fn failures(&self, distance: u32, profile: &AuthorProfile) -> Vec<PruneReason> {
        let mut reasons = Vec::new();
        if distance > self.max_distance {
            reasons.push(PruneReason::TooFar);
        }
        if profile.total_publications < self.min_total_publications {
            reasons.push(PruneReason::LowProductivity);
        }
        if profile.last_publication_year < self.min_last_publication_year {
            reasons.push(PruneReason::Inactive);
        }
        reasons
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum PruneReason {
    TooFar,
    LowProductivity,
    Inactive,
}

impl PruneReason {
    pub fn name(self) -> &'static str {
        match self {
            PruneReason::TooFar => "too_far",
            PruneReason::LowProductivity => "low_productivity",
            PruneReason::Inactive => "inactive",
        }
    }
}

impl fmt::Display for PruneReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct CrawlResult {
    pub distances: BTreeMap<String, u32>,
    pub publication_ids: BTreeSet<String>,
    /// Recorded but not expanded, with every rule they failed.
    pub pruned: BTreeMap<String, Vec<PruneReason>>,
    pub expanded: BTreeSet<String>,
}

#[derive(Debug, Error)]
pub enum CrawlError {
    #[error("seed author `{0}` is not in the store")]
    UnknownSeed(String),
    #[error(transparent)]
    Store(#[from] StoreError),
}

struct Visit {
    author: String,
    publications: BTreeSet<String>,
    prune: Vec<PruneReason>,
}

pub fn crawl<S: PublicationStore + ?Sized>(
    store: &S,
    seed: &str,
    policy: &CrawlPolicy,
) -> Result<CrawlResult, CrawlError> {
    match store.publications_of(seed) {
        Err(StoreError::UnknownAuthor(_)) => return Err(CrawlError::UnknownSeed(seed.to_string())),
        Err(e) => return Err(e.into()),
        Ok(_) => {}
    }

    let mut result = CrawlResult::default();
    result.distances.insert(seed.to_string(), 0);
    let mut layer = vec![seed.to_string()];
    let mut distance = 0u32;

    while !layer.is_empty() {
        let visits: Vec<Visit> = layer
            .par_iter()
            .map(|author| -> Result<Visit, StoreError> {
                let publications = store.publications_of(author)?;
                let prune = if author == seed {
                    Vec::new()
                } else {
                    policy.failures(distance, &store.profile(author)?)
                };
                Ok(Visit {
                    author: author.clone(),
                    publications,
                    prune,
                })
            })
            .collect::<Result<_, _>>()?;

        // Gather co-authors of expanded authors; queries run in parallel,
        // merging happens in sorted order below.
        let to_expand: Vec<&Visit> = visits.iter().filter(|v| v.prune.is_empty()).collect();
        let coauthor_sets: Vec<BTreeSet<String>> = to_expand
            .par_iter()
            .map(|v| -> Result<BTreeSet<String>, StoreError> {
                let mut out = BTreeSet::new();
                for p in &v.publications {
                    out.extend(store.authors_of(p)?);
                }
                Ok(out)
            })
            .collect::<Result<_, _>>()?;

        for visit in &visits {
            if visit.prune.is_empty() {
                result.expanded.insert(visit.author.clone());
            } else {
                result.pruned.insert(visit.author.clone(), visit.prune.clone());
            }
            if visit.prune.is_empty() || policy.collect_pruned_publications {
                result.publication_ids.extend(visit.publications.iter().cloned());
            }
        }

        let mut next = BTreeSet::new();
        for coauthors in coauthor_sets {
            for a in coauthors {
                if !result.distances.contains_key(&a) {
                    next.insert(a);
                }
            }
        }
        distance += 1;
        for a in &next {
            result.distances.insert(a.clone(), distance);
        }
        layer = next.into_iter().collect();
    }
    Ok(result)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn productive() -> AuthorProfile {
        AuthorProfile {
            total_publications: 100,
            last_publication_year: 2022,
        }
    }

    fn store_with(edges: &[(&str, &str)], isolated: &[&str]) -> MemoryStore {
        let mut store = MemoryStore::new();
        for (i, (a, b)) in edges.iter().enumerate() {
            store.insert_raw(&format!("p{i}"), 2020, [*a, *b]);
        }
        for (i, a) in isolated.iter().enumerate() {
            store.insert_raw(&format!("solo{i}"), 2020, [*a]);
        }
        let ids: Vec<String> = store.author_ids().map(String::from).collect();
        for a in ids {
            store.set_profile(&a, productive());
        }
        store
    }

    #[test]
    fn isolated_seed() {
        let mut store = store_with(&[], &["s"]);
        store.insert_raw("solo-extra", 2021, ["s"]);
        let result = crawl(&store, "s", &CrawlPolicy::default()).unwrap();
        assert_eq!(result.distances, BTreeMap::from([("s".to_string(), 0)]));
        assert_eq!(
            result.publication_ids,
            BTreeSet::from(["solo0".to_string(), "solo-extra".to_string()])
        );
        assert!(result.pruned.is_empty());
    }

    #[test]
    fn path_graph_with_distance_one() {
        let store = store_with(&[("A", "B"), ("B", "C")], &[]);
        let policy = CrawlPolicy {
            max_distance: 1,
            ..Default::default()
        };
        let result = crawl(&store, "A", &policy).unwrap();
        assert_eq!(result.distances["B"], 1);
        assert_eq!(result.distances["C"], 2);
        assert!(result.expanded.contains("B"));
        assert_eq!(result.pruned["C"], vec![PruneReason::TooFar]);
        assert_eq!(result.publication_ids.len(), 2);
    }

    #[test]
    fn low_productivity_coauthor_is_recorded_but_not_followed() {
        let mut store = store_with(&[("S", "L"), ("L", "X")], &[]);
        store.set_profile(
            "L",
            AuthorProfile {
                total_publications: 40,
                last_publication_year: 2022,
            },
        );
        let result = crawl(&store, "S", &CrawlPolicy::default()).unwrap();
        assert_eq!(result.distances.get("L"), Some(&1));
        assert_eq!(result.pruned["L"], vec![PruneReason::LowProductivity]);
        // L's publications are collected, its co-author X is not reached.
        assert!(result.publication_ids.contains("p1"));
        assert!(!result.distances.contains_key("X"));

        let strict = CrawlPolicy {
            collect_pruned_publications: false,
            ..Default::default()
        };
        let result = crawl(&store, "S", &strict).unwrap();
        assert_eq!(result.publication_ids, BTreeSet::from(["p0".to_string()]));
    }

    #[test]
    fn inactive_and_seed_exemption() {
        let mut store = store_with(&[("S", "O")], &[]);
        let old = AuthorProfile {
            total_publications: 3,
            last_publication_year: 2001,
        };
        store.set_profile("S", old);
        store.set_profile("O", old);
        let result = crawl(&store, "S", &CrawlPolicy::default()).unwrap();
        assert!(result.expanded.contains("S"));
        assert_eq!(
            result.pruned["O"],
            vec![PruneReason::LowProductivity, PruneReason::Inactive]
        );
    }

    #[test]
    fn unknown_seed() {
        let store = store_with(&[("A", "B")], &[]);
        assert!(matches!(
            crawl(&store, "Z", &CrawlPolicy::default()),
            Err(CrawlError::UnknownSeed(_))
        ));
    }

    #[test]
    fn deterministic() {
        let store = store_with(&[("A", "B"), ("A", "C"), ("B", "D"), ("C", "D"), ("D", "E")], &[]);
        let a = crawl(&store, "A", &CrawlPolicy::default()).unwrap();
        let b = crawl(&store, "A", &CrawlPolicy::default()).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.distances["D"], 2);
        assert_eq!(a.distances["E"], 3);
    }
}
