use std::cmp::Ordering;
use std::fmt;
use std::hash::{Hash, Hasher};

use thiserror::Error;

use super::normalize_label;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RecordError {
    #[error("territory label is empty")]
    EmptyLabel,
    #[error("publication id is empty")]
    EmptyPublicationId,
    #[error("publication `{0}` has no authors")]
    NoAuthors(String),
    #[error("author id is empty in publication `{0}`")]
    EmptyAuthorId(String),
    #[error("author `{author}` of publication `{publication}` has no affiliations")]
    NoAffiliations { publication: String, author: String },
    #[error("author `{author}` of publication `{publication}` has an empty institution")]
    EmptyInstitution { publication: String, author: String },
}

/// A country or country-like territory, e.g. `Hong Kong SAR`.
///
/// Equality, ordering and hashing use the normalized key, so
/// `" united  KINGDOM"` and `"United Kingdom"` are the same label.
#[derive(Clone)]
pub struct TerritoryLabel {
    text: String,
    key: String,
}

impl TerritoryLabel {
    pub fn new(label: &str) -> Result<Self, RecordError> {
        let key = normalize_label(label);
        if key.is_empty() {
            return Err(RecordError::EmptyLabel);
        }
        let text = label.split_whitespace().collect::<Vec<_>>().join(" ");
        Ok(TerritoryLabel { text, key })
    }

    /// The label as written, with whitespace collapsed.
    pub fn as_str(&self) -> &str {
        &self.text
    }

    pub fn key(&self) -> &str {
        &self.key
    }
}

impl PartialEq for TerritoryLabel {
    fn eq(&self, other: &Self) -> bool {
        self.key == other.key
    }
}

impl Eq for TerritoryLabel {}

impl Hash for TerritoryLabel {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.key.hash(state);
    }
}

impl PartialOrd for TerritoryLabel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for TerritoryLabel {
    fn cmp(&self, other: &Self) -> Ordering {
        self.key.cmp(&other.key)
    }
}

impl fmt::Debug for TerritoryLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.text)
    }
}

impl fmt::Display for TerritoryLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.text)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Affiliation {
    pub institution: String,
    /// `None` when the source data does not identify a country.
    pub country: Option<TerritoryLabel>,
}

impl Affiliation {
    pub fn new(institution: impl Into<String>, country: Option<&str>) -> Result<Self, RecordError> {
        Ok(Affiliation {
            institution: institution.into(),
            country: country.map(TerritoryLabel::new).transpose()?,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AuthorRecord {
    pub author_id: String,
    pub affiliations: Vec<Affiliation>,
}

impl AuthorRecord {
    /// Number of affiliations listed for this author on the publication.
    pub fn affiliation_count(&self) -> usize {
        self.affiliations.len()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PublicationRecord {
    pub id: String,
    pub year: i32,
    pub authors: Vec<AuthorRecord>,
}

impl PublicationRecord {
    /// Checks the structural invariants: non-empty ids, at least one
    /// author, and at least one affiliation with a named institution per
    /// author. Country resolvability is an exclusion rule, not a
    /// structural one, and is left to ingest filtering.
    pub fn validate(&self) -> Result<(), RecordError> {
        if self.id.trim().is_empty() {
            return Err(RecordError::EmptyPublicationId);
        }
        if self.authors.is_empty() {
            return Err(RecordError::NoAuthors(self.id.clone()));
        }
        for author in &self.authors {
            if author.author_id.trim().is_empty() {
                return Err(RecordError::EmptyAuthorId(self.id.clone()));
            }
            if author.affiliations.is_empty() {
                return Err(RecordError::NoAffiliations {
                    publication: self.id.clone(),
                    author: author.author_id.clone(),
                });
            }
            if author.affiliations.iter().any(|a| a.institution.trim().is_empty()) {
                return Err(RecordError::EmptyInstitution {
                    publication: self.id.clone(),
                    author: author.author_id.clone(),
                });
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn labels_compare_normalized() {
        let a = TerritoryLabel::new(" united  KINGDOM").unwrap();
        let b = TerritoryLabel::new("United Kingdom").unwrap();
        assert_eq!(a, b);
        assert_eq!(a.as_str(), "united KINGDOM");
        assert!(TerritoryLabel::new(" \t").is_err());
    }

    #[test]
    fn validate_rejects_structural_defects() {
        let ok = PublicationRecord {
            id: "p1".into(),
            year: 2020,
            authors: vec![AuthorRecord {
                author_id: "a".into(),
                affiliations: vec![Affiliation::new("AGH", Some("Poland")).unwrap()],
            }],
        };
        assert!(ok.validate().is_ok());

        let mut no_authors = ok.clone();
        no_authors.authors.clear();
        assert_eq!(no_authors.validate(), Err(RecordError::NoAuthors("p1".into())));

        let mut no_affils = ok.clone();
        no_affils.authors[0].affiliations.clear();
        assert!(matches!(
            no_affils.validate(),
            Err(RecordError::NoAffiliations { .. })
        ));

        let mut blank_inst = ok;
        blank_inst.authors[0].affiliations[0].institution = " ".into();
        assert!(matches!(
            blank_inst.validate(),
            Err(RecordError::EmptyInstitution { .. })
        ));
    }
}
