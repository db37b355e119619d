//! Corpus file parsing and publication exclusion rules.
//!
//! A corpus file holds one JSON object per line (see `docs/corpus-format.md`):
//!
//! ```text
//! {"schema_version":1,"id":"p1","year":2020,"authors":[{"author_id":"a1","affiliations":[{"institution":"AGH","country":"Poland"}]}]}
//! ```
//!
//! Parsing never aborts on a bad line; it yields a [`MalformedRecord`]
//! notice carrying the 1-based line number and keeps going. Only I/O
//! failures on the source are fatal.

use std::collections::HashSet;
use std::fmt;
use std::io::{self, BufRead, Write};
use std::ops::AddAssign;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::{Affiliation, AuthorRecord, ContinentTable, PublicationRecord, TerritoryLabel};

/// Version written to and accepted from the `schema_version` field.
pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ExclusionPolicy {
    max_affiliations_per_author: u32,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("max affiliations per author must be at least 1")]
pub struct InvalidPolicy;

impl ExclusionPolicy {
    pub const DEFAULT_MAX_AFFILIATIONS: u32 = 5;

    pub fn new(max_affiliations_per_author: u32) -> Result<Self, InvalidPolicy> {
        if max_affiliations_per_author == 0 {
            return Err(InvalidPolicy);
        }
        Ok(ExclusionPolicy {
            max_affiliations_per_author,
        })
    }

    pub fn max_affiliations_per_author(&self) -> u32 {
        self.max_affiliations_per_author
    }
}

impl Default for ExclusionPolicy {
    fn default() -> Self {
        ExclusionPolicy {
            max_affiliations_per_author: Self::DEFAULT_MAX_AFFILIATIONS,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RejectReason {
    /// Some author lists more affiliations than the policy allows.
    TooManyAffiliations,
    /// Some affiliation has no country, or one the table cannot resolve.
    CountryUnidentifiable,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Verdict {
    Accepted,
    Rejected(RejectReason),
}

impl Verdict {
    pub fn is_accepted(self) -> bool {
        self == Verdict::Accepted
    }
}

/// Applies the exclusion rules to a structurally valid record.
///
/// The affiliation-count rule is checked first: a record failing both
/// rules is reported as [`RejectReason::TooManyAffiliations`]. A single
/// unidentifiable affiliation excludes the whole publication.
pub fn filter_record(
    record: &PublicationRecord,
    policy: &ExclusionPolicy,
    table: &ContinentTable,
) -> Verdict {
    let limit = policy.max_affiliations_per_author as usize;
    if record.authors.iter().any(|a| a.affiliation_count() > limit) {
        return Verdict::Rejected(RejectReason::TooManyAffiliations);
    }
    let identifiable = record
        .authors
        .iter()
        .flat_map(|a| &a.affiliations)
        .all(|aff| aff.country.as_ref().is_some_and(|c| table.resolve(c).is_some()));
    if identifiable {
        Verdict::Accepted
    } else {
        Verdict::Rejected(RejectReason::CountryUnidentifiable)
    }
}

/// Per-run tallies. Reports from separate workers merge with `+=`.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct IngestReport {
    pub accepted: u64,
    pub rejected_too_many_affiliations: u64,
    pub rejected_country_unidentifiable: u64,
    pub rejected_malformed: u64,
    pub records_read: u64,
}

impl IngestReport {
    pub fn record_verdict(&mut self, verdict: Verdict) {
        self.records_read += 1;
        match verdict {
            Verdict::Accepted => self.accepted += 1,
            Verdict::Rejected(RejectReason::TooManyAffiliations) => {
                self.rejected_too_many_affiliations += 1
            }
            Verdict::Rejected(RejectReason::CountryUnidentifiable) => {
                self.rejected_country_unidentifiable += 1
            }
        }
    }

    pub fn record_malformed(&mut self) {
        self.records_read += 1;
        self.rejected_malformed += 1;
    }

    pub fn rejected(&self) -> u64 {
        self.rejected_too_many_affiliations
            + self.rejected_country_unidentifiable
            + self.rejected_malformed
    }

    /// True when accepted and rejected counts add up to `records_read`.
    pub fn is_partition(&self) -> bool {
        self.accepted + self.rejected() == self.records_read
    }
}

impl AddAssign for IngestReport {
    fn add_assign(&mut self, rhs: Self) {
        self.accepted += rhs.accepted;
        self.rejected_too_many_affiliations += rhs.rejected_too_many_affiliations;
        self.rejected_country_unidentifiable += rhs.rejected_country_unidentifiable;
        self.rejected_malformed += rhs.rejected_malformed;
        self.records_read += rhs.records_read;
    }
}

impl fmt::Display for IngestReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "records_read = {}", self.records_read)?;
        writeln!(f, "accepted = {}", self.accepted)?;
        writeln!(
            f,
            "rejected_too_many_affiliations = {}",
            self.rejected_too_many_affiliations
        )?;
        writeln!(
            f,
            "rejected_country_unidentifiable = {}",
            self.rejected_country_unidentifiable
        )?;
        writeln!(f, "rejected_malformed = {}", self.rejected_malformed)
    }
}

/// A line that could not be turned into a [`PublicationRecord`].
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}: {message}")]
pub struct MalformedRecord {
    pub line: u64,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CorpusItem {
    Record { line: u64, record: PublicationRecord },
    Malformed(MalformedRecord),
}

#[derive(Deserialize)]
struct WireRecord {
    #[serde(default)]
    schema_version: Option<u32>,
    id: String,
    year: i32,
    authors: Vec<WireAuthor>,
}

#[derive(Deserialize)]
struct WireAuthor {
    author_id: String,
    affiliations: Vec<WireAffiliation>,
}

#[derive(Deserialize)]
struct WireAffiliation {
    institution: String,
    #[serde(default)]
    country: Option<String>,
}

#[derive(Serialize)]
struct WireRecordOut<'a> {
    schema_version: u32,
    id: &'a str,
    year: i32,
    authors: Vec<WireAuthorOut<'a>>,
}

#[derive(Serialize)]
struct WireAuthorOut<'a> {
    author_id: &'a str,
    affiliations: Vec<WireAffiliationOut<'a>>,
}

#[derive(Serialize)]
struct WireAffiliationOut<'a> {
    institution: &'a str,
    #[serde(skip_serializing_if = "Option::is_none")]
    country: Option<&'a str>,
}

/// Parses one corpus line. Checks the structural invariants but not
/// identifier uniqueness, which needs the whole stream.
pub fn parse_line(text: &str, line: u64) -> Result<PublicationRecord, MalformedRecord> {
    let malformed = |message: String| MalformedRecord { line, message };
    let wire: WireRecord = serde_json::from_str(text).map_err(|e| malformed(e.to_string()))?;
    if let Some(v) = wire.schema_version {
        if v != SCHEMA_VERSION {
            return Err(malformed(format!("unsupported schema_version {v}")));
        }
    }
    let authors = wire
        .authors
        .into_iter()
        .map(|a| AuthorRecord {
            author_id: a.author_id,
            affiliations: a
                .affiliations
                .into_iter()
                .map(|aff| Affiliation {
                    institution: aff.institution,
                    // Blank country strings count as missing.
                    country: aff.country.and_then(|c| TerritoryLabel::new(&c).ok()),
                })
                .collect(),
        })
        .collect();
    let record = PublicationRecord {
        id: wire.id,
        year: wire.year,
        authors,
    };
    record.validate().map_err(|e| malformed(e.to_string()))?;
    Ok(record)
}

/// Serializes a record as one corpus line, without the trailing newline.
pub fn record_to_line(record: &PublicationRecord) -> String {
    let wire = WireRecordOut {
        schema_version: SCHEMA_VERSION,
        id: &record.id,
        year: record.year,
        authors: record
            .authors
            .iter()
            .map(|a| WireAuthorOut {
                author_id: &a.author_id,
                affiliations: a
                    .affiliations
                    .iter()
                    .map(|aff| WireAffiliationOut {
                        institution: &aff.institution,
                        country: aff.country.as_ref().map(TerritoryLabel::as_str),
                    })
                    .collect(),
            })
            .collect(),
    };
    serde_json::to_string(&wire).expect("corpus records always serialize")
}

pub fn write_record<W: Write>(out: &mut W, record: &PublicationRecord) -> io::Result<()> {
    out.write_all(record_to_line(record).as_bytes())?;
    out.write_all(b"\n")
}

/// Reads raw lines with 1-based numbering, skipping blank ones. Invalid
/// UTF-8 becomes a malformed notice.
pub(crate) struct LineSource<R> {
    reader: R,
    buf: Vec<u8>,
    line: u64,
}

impl<R: BufRead> LineSource<R> {
    pub(crate) fn new(reader: R) -> Self {
        LineSource {
            reader,
            buf: Vec::new(),
            line: 0,
        }
    }

    pub(crate) fn next_line(&mut self) -> io::Result<Option<(u64, Result<String, MalformedRecord>)>> {
        loop {
            self.buf.clear();
            if self.reader.read_until(b'\n', &mut self.buf)? == 0 {
                return Ok(None);
            }
            self.line += 1;
            let line = self.line;
            match std::str::from_utf8(&self.buf) {
                Ok(s) if s.trim().is_empty() => continue,
                Ok(s) => return Ok(Some((line, Ok(s.trim_end_matches(['\n', '\r']).to_string())))),
                Err(e) => {
                    return Ok(Some((
                        line,
                        Err(MalformedRecord {
                            line,
                            message: format!("invalid UTF-8: {e}"),
                        }),
                    )))
                }
            }
        }
    }
}

/// Tracks publication ids seen so far; repeats become malformed notices.
#[derive(Debug, Default)]
pub(crate) struct IdRegistry {
    seen: HashSet<String>,
}

impl IdRegistry {
    pub(crate) fn admit_id(&mut self, line: u64, id: &str) -> Result<(), MalformedRecord> {
        if self.seen.insert(id.to_string()) {
            Ok(())
        } else {
            Err(MalformedRecord {
                line,
                message: format!("duplicate publication id `{id}`"),
            })
        }
    }

    pub(crate) fn admit(
        &mut self,
        line: u64,
        record: PublicationRecord,
    ) -> Result<PublicationRecord, MalformedRecord> {
        self.admit_id(line, &record.id).map(|()| record)
    }
}

/// Streaming corpus parser; yields records and malformed notices in input
/// order.
pub struct CorpusReader<R> {
    lines: LineSource<R>,
    ids: IdRegistry,
}

pub fn parse_corpus<R: BufRead>(source: R) -> CorpusReader<R> {
    CorpusReader {
        lines: LineSource::new(source),
        ids: IdRegistry::default(),
    }
}

impl<R: BufRead> Iterator for CorpusReader<R> {
    type Item = io::Result<CorpusItem>;

    fn next(&mut self) -> Option<Self::Item> {
        let (line, text) = match self.lines.next_line() {
            Ok(Some(next)) => next,
            Ok(None) => return None,
            Err(e) => return Some(Err(e)),
        };
        let parsed = text
            .and_then(|t| parse_line(&t, line))
            .and_then(|record| self.ids.admit(line, record));
        Some(Ok(match parsed {
            Ok(record) => CorpusItem::Record { line, record },
            Err(notice) => CorpusItem::Malformed(notice),
        }))
    }
}
