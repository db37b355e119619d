//! Turns an accepted publication into its continent sequence.
//!
//! Per author the distinct countries of all listed affiliations are taken;
//! those sets are merged across authors; each distinct country is placed
//! on its continent; and every represented continent is annotated with the
//! number of distinct countries it contributed. Country identity is the
//! canonical table label, so aliases collapse before counting.

use std::collections::BTreeSet;

use thiserror::Error;

use crate::model::{
    AuthorRecord, Continent, ContinentSequence, ContinentTable, PublicationRecord,
    SequenceError, TerritoryLabel,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MappingError {
    #[error("author `{author}` has an affiliation without a country")]
    MissingCountry { author: String },
    #[error("territory `{0}` is not in the continent table")]
    UnresolvedTerritory(String),
    #[error("publication `{0}` has no authors")]
    NoAuthors(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AuthorCountrySet {
    pub author_id: String,
    pub countries: BTreeSet<TerritoryLabel>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PublicationCountrySet {
    pub countries: BTreeSet<TerritoryLabel>,
}

fn resolved_countries<'t, 'a>(
    author: &'a AuthorRecord,
    table: &'t ContinentTable,
) -> impl Iterator<Item = Result<(&'t TerritoryLabel, Continent), MappingError>> + use<'t, 'a> {
    author.affiliations.iter().map(move |aff| {
        let label = aff.country.as_ref().ok_or_else(|| MappingError::MissingCountry {
            author: author.author_id.clone(),
        })?;
        let resolved = table
            .resolve(label)
            .ok_or_else(|| MappingError::UnresolvedTerritory(label.as_str().to_string()))?;
        Ok((resolved.label, resolved.continent))
    })
}

/// Distinct countries across one author's affiliations.
pub fn author_countries(
    author: &AuthorRecord,
    table: &ContinentTable,
) -> Result<AuthorCountrySet, MappingError> {
    let countries = resolved_countries(author, table)
        .map(|r| r.map(|(label, _)| label.clone()))
        .collect::<Result<_, _>>()?;
    Ok(AuthorCountrySet {
        author_id: author.author_id.clone(),
        countries,
    })
}

/// Union of the authors' country sets.
pub fn publication_countries(
    record: &PublicationRecord,
    table: &ContinentTable,
) -> Result<PublicationCountrySet, MappingError> {
    let mut countries = BTreeSet::new();
    for author in &record.authors {
        countries.extend(author_countries(author, table)?.countries);
    }
    Ok(PublicationCountrySet { countries })
}

/// The canonical continent sequence of a publication.
pub fn map_to_sequence(
    record: &PublicationRecord,
    table: &ContinentTable,
) -> Result<ContinentSequence, MappingError> {
    if record.authors.is_empty() {
        return Err(MappingError::NoAuthors(record.id.clone()));
    }
    // Keys of canonical table labels, so aliases are already collapsed.
    let mut seen: Vec<(&str, Continent)> = Vec::with_capacity(8);
    for author in &record.authors {
        for r in resolved_countries(author, table) {
            let (label, continent) = r?;
            seen.push((label.key(), continent));
        }
    }
    seen.sort_unstable();
    seen.dedup();
    let mut counts = [0u32; Continent::COUNT];
    for (_, continent) in seen {
        counts[continent.index()] += 1;
    }
    Ok(ContinentSequence::from_counts(counts).expect("at least one affiliation per author"))
}

pub fn render_sequence(seq: &ContinentSequence) -> String {
    seq.render()
}

pub fn parse_sequence(text: &str) -> Result<ContinentSequence, SequenceError> {
    text.parse()
}
