//! Continent-sequence analysis of bibliographic corpora.
//!
//! Each publication is reduced to an alphabetized list of the continents
//! its authors are affiliated with, each annotated with the number of
//! distinct countries on it (`Asia (2), Europe (2), North America (1)`).
//! The crate covers the whole path from raw records to power-law fits:
//!
//! - [`model`]: territories, continents, records and sequences
//! - [`ingest`]: line-delimited corpus parsing and exclusion rules
//! - [`mapping`]: record to sequence canonicalization
//! - [`crawl`]: bounded breadth-first co-authorship crawl over a store
//! - [`stats`]: rank tables, Zipf and Heaps fits
//! - [`syngen`]: synthetic corpora with a known Zipf exponent
//! - [`pipeline`]: parallel ingest + map over a corpus stream

pub mod crawl;
pub mod ingest;
pub mod mapping;
pub mod model;
pub mod pipeline;
pub mod stats;
pub mod syngen;

pub use model::{Continent, ContinentSequence, ContinentTable, PublicationRecord};
