use std::collections::{BTreeSet, HashMap};
use std::fs::File;
use std::io::{self, BufReader, Read};
use std::path::Path;

use thiserror::Error;

use crate::ingest::{parse_corpus, CorpusItem};
use crate::model::PublicationRecord;

#[derive(Debug, Error)]
pub enum StoreError {
    #[error("unknown author `{0}`")]
    UnknownAuthor(String),
    #[error("unknown publication `{0}`")]
    UnknownPublication(String),
    #[error(transparent)]
    Io(#[from] io::Error),
}

/// Productivity summary used by the crawl's stopping rules.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AuthorProfile {
    pub total_publications: u64,
    pub last_publication_year: i32,
}

/// Read-only view of a bibliographic source.
///
/// Queries must be stable for the duration of a crawl. Implementations
/// are shared across the rayon pool, hence `Sync`. A client for a live
/// bibliographic API would implement this trait; the crate ships only
/// the in-memory [`MemoryStore`].
pub trait PublicationStore: Sync {
    fn publications_of(&self, author_id: &str) -> Result<BTreeSet<String>, StoreError>;
    fn authors_of(&self, publication_id: &str) -> Result<BTreeSet<String>, StoreError>;
    fn profile(&self, author_id: &str) -> Result<AuthorProfile, StoreError>;
}

/// Store indexed from publication records, typically a corpus file.
///
/// Profiles are computed from the indexed records (publication count and
/// latest year) unless overridden with [`MemoryStore::set_profile`], which
/// models a source whose author profiles cover more than the loaded
/// records.
#[derive(Debug, Clone, Default)]
pub struct MemoryStore {
    by_author: HashMap<String, BTreeSet<String>>,
    publications: HashMap<String, (i32, BTreeSet<String>)>,
    profiles: HashMap<String, AuthorProfile>,
}

impl MemoryStore {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, record: &PublicationRecord) {
        let authors: BTreeSet<String> = record.authors.iter().map(|a| a.author_id.clone()).collect();
        for a in &authors {
            self.by_author
                .entry(a.clone())
                .or_default()
                .insert(record.id.clone());
        }
        self.publications
            .insert(record.id.clone(), (record.year, authors));
    }

    /// Adds a publication directly from ids.
    pub fn insert_raw<I, S>(&mut self, publication_id: &str, year: i32, authors: I)
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let authors: BTreeSet<String> = authors.into_iter().map(Into::into).collect();
        for a in &authors {
            self.by_author
                .entry(a.clone())
                .or_default()
                .insert(publication_id.to_string());
        }
        self.publications
            .insert(publication_id.to_string(), (year, authors));
    }

    pub fn set_profile(&mut self, author_id: &str, profile: AuthorProfile) {
        self.profiles.insert(author_id.to_string(), profile);
    }

    /// Indexes every structurally valid record of a corpus stream;
    /// malformed lines are skipped. Returns the store and the number of
    /// skipped lines.
    pub fn from_corpus<R: Read>(source: R) -> Result<(Self, u64), StoreError> {
        let mut store = MemoryStore::new();
        let mut skipped = 0;
        for item in parse_corpus(BufReader::new(source)) {
            match item? {
                CorpusItem::Record { record, .. } => store.insert(&record),
                CorpusItem::Malformed(_) => skipped += 1,
            }
        }
        Ok((store, skipped))
    }

    pub fn from_corpus_file(path: &Path) -> Result<(Self, u64), StoreError> {
        Self::from_corpus(File::open(path)?)
    }

    pub fn author_count(&self) -> usize {
        self.by_author.len()
    }

    pub fn publication_count(&self) -> usize {
        self.publications.len()
    }

    pub fn author_ids(&self) -> impl Iterator<Item = &str> {
        self.by_author.keys().map(String::as_str)
    }

    pub fn publication_ids(&self) -> impl Iterator<Item = &str> {
        self.publications.keys().map(String::as_str)
    }
}

impl PublicationStore for MemoryStore {
    fn publications_of(&self, author_id: &str) -> Result<BTreeSet<String>, StoreError> {
        self.by_author
            .get(author_id)
            .cloned()
            .ok_or_else(|| StoreError::UnknownAuthor(author_id.to_string()))
    }

    fn authors_of(&self, publication_id: &str) -> Result<BTreeSet<String>, StoreError> {
        self.publications
            .get(publication_id)
            .map(|(_, authors)| authors.clone())
            .ok_or_else(|| StoreError::UnknownPublication(publication_id.to_string()))
    }

    fn profile(&self, author_id: &str) -> Result<AuthorProfile, StoreError> {
        if let Some(p) = self.profiles.get(author_id) {
            return Ok(*p);
        }
        let pubs = self
            .by_author
            .get(author_id)
            .ok_or_else(|| StoreError::UnknownAuthor(author_id.to_string()))?;
        let last = pubs
            .iter()
            .filter_map(|p| self.publications.get(p).map(|(year, _)| *year))
            .max()
            .expect("indexed authors have at least one publication");
        Ok(AuthorProfile {
            total_publications: pubs.len() as u64,
            last_publication_year: last,
        })
    }
}
