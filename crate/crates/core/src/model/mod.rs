//! Domain types shared by every stage of the pipeline.

mod continent;
mod record;
mod sequence;
mod table;

pub use continent::{canonical_order, Continent, UnknownContinent};
pub use record::{Affiliation, AuthorRecord, PublicationRecord, RecordError, TerritoryLabel};
pub use sequence::{ContinentSequence, SequenceError};
pub use table::{ContinentTable, Resolved, TableError};

/// Lookup key for territory and continent labels: trimmed, case-folded,
/// with internal whitespace runs collapsed to a single space.
pub fn normalize_label(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for word in s.split_whitespace() {
        if !out.is_empty() {
            out.push(' ');
        }
        out.extend(word.chars().flat_map(char::to_lowercase));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::normalize_label;

    #[test]
    fn normalization() {
        assert_eq!(normalize_label("  Hong   Kong\tSAR "), "hong kong sar");
        assert_eq!(normalize_label("POLAND"), "poland");
        assert_eq!(normalize_label("   "), "");
    }
}
