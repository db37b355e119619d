//! Streaming ingest + map over a corpus source.
//!
//! Lines are read sequentially in chunks; each chunk is parsed, filtered
//! and mapped on the rayon pool, then drained in input order so outputs
//! and duplicate-id detection do not depend on scheduling.

use std::io::{self, BufRead};

use rayon::prelude::*;

use crate::ingest::{
    filter_record, parse_line, ExclusionPolicy, IdRegistry, IngestReport, LineSource,
    MalformedRecord, RejectReason, Verdict,
};
use crate::mapping::map_to_sequence;
use crate::model::{ContinentSequence, ContinentTable};

const DEFAULT_CHUNK: usize = 16 * 1024;

struct Processed {
    id: String,
    verdict: Verdict,
    sequence: Option<ContinentSequence>,
}

pub struct CorpusMapper<'a> {
    table: &'a ContinentTable,
    policy: ExclusionPolicy,
    chunk_size: usize,
}

impl<'a> CorpusMapper<'a> {
    pub fn new(table: &'a ContinentTable, policy: ExclusionPolicy) -> Self {
        CorpusMapper {
            table,
            policy,
            chunk_size: DEFAULT_CHUNK,
        }
    }

    pub fn with_chunk_size(mut self, chunk_size: usize) -> Self {
        self.chunk_size = chunk_size.max(1);
        self
    }

    fn process(&self, line: u64, text: Result<String, MalformedRecord>) -> Result<Processed, MalformedRecord> {
        let record = parse_line(&text?, line)?;
        let mut verdict = filter_record(&record, &self.policy, self.table);
        let sequence = match verdict {
            Verdict::Accepted => match map_to_sequence(&record, self.table) {
                Ok(seq) => Some(seq),
                Err(_) => {
                    verdict = Verdict::Rejected(RejectReason::CountryUnidentifiable);
                    None
                }
            },
            Verdict::Rejected(_) => None,
        };
        Ok(Processed {
            id: record.id,
            verdict,
            sequence,
        })
    }

    /// Runs the corpus through parse, exclusion and mapping.
    ///
    /// `on_sequence` receives `(publication id, sequence)` for every
    /// accepted record in input order; `on_malformed` receives each
    /// malformed-line notice. Only I/O errors on `source` are returned.
    pub fn run<R, S, M>(&self, source: R, mut on_sequence: S, mut on_malformed: M) -> io::Result<IngestReport>
    where
        R: BufRead,
        S: FnMut(&str, ContinentSequence),
        M: FnMut(&MalformedRecord),
    {
        let mut lines = LineSource::new(source);
        let mut ids = IdRegistry::default();
        let mut report = IngestReport::default();
        let mut chunk = Vec::with_capacity(self.chunk_size);
        loop {
            chunk.clear();
            while chunk.len() < self.chunk_size {
                match lines.next_line()? {
                    Some(item) => chunk.push(item),
                    None => break,
                }
            }
            if chunk.is_empty() {
                return Ok(report);
            }
            let results: Vec<(u64, Result<Processed, MalformedRecord>)> = chunk
                .par_drain(..)
                .map(|(line, text)| (line, self.process(line, text)))
                .collect();
            for (line, result) in results {
                let processed = result.and_then(|p| {
                    // Only the id matters for uniqueness.
                    ids.admit_id(line, &p.id).map(|()| p)
                });
                match processed {
                    Ok(p) => {
                        report.record_verdict(p.verdict);
                        if let Some(seq) = p.sequence {
                            on_sequence(&p.id, seq);
                        }
                    }
                    Err(notice) => {
                        report.record_malformed();
                        on_malformed(&notice);
                    }
                }
            }
        }
    }

    /// Convenience wrapper collecting accepted sequences in input order.
    pub fn collect<R: BufRead>(&self, source: R) -> io::Result<(Vec<ContinentSequence>, IngestReport)> {
        let mut out = Vec::new();
        let report = self.run(source, |_, seq| out.push(seq), |_| {})?;
        Ok((out, report))
    }
}
