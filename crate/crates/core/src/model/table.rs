use std::collections::HashMap;
use std::io::Read;
use std::sync::OnceLock;

use thiserror::Error;

use super::{normalize_label, Continent, TerritoryLabel};

const BUILTIN_TABLE: &str = include_str!("../../data/continents.csv");

#[derive(Debug, Error)]
pub enum TableError {
    #[error("row {row}: {message}")]
    Format { row: u64, message: String },
    #[error("row {row}: unknown continent `{value}`")]
    UnknownContinent { row: u64, value: String },
    #[error("row {row}: `{label}` is already mapped to {existing}")]
    Conflict {
        row: u64,
        label: String,
        existing: Continent,
    },
    #[error("row {row}: alias target `{label}` is not in the territory table")]
    UnknownAliasTarget { row: u64, label: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// A territory resolved through a [`ContinentTable`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Resolved<'a> {
    /// The canonical table label; aliases resolve to their target.
    pub label: &'a TerritoryLabel,
    pub continent: Continent,
}

/// Territory label to continent lookup, with optional aliases.
#[derive(Debug, Clone, Default)]
pub struct ContinentTable {
    entries: HashMap<String, (TerritoryLabel, Continent)>,
    aliases: HashMap<String, String>,
}

impl ContinentTable {
    /// The table shipped with the crate (see `data/README.md`).
    pub fn builtin() -> &'static ContinentTable {
        static TABLE: OnceLock<ContinentTable> = OnceLock::new();
        TABLE.get_or_init(|| {
            ContinentTable::from_reader(BUILTIN_TABLE.as_bytes())
                .expect("built-in continent table is valid")
        })
    }

    /// Reads a `territory,continent` table. The header row is required.
    /// Row numbers in errors are 1-based and count the header.
    pub fn from_reader<R: Read>(source: R) -> Result<Self, TableError> {
        let mut table = ContinentTable::default();
        for (row, fields) in read_pairs(source, ("territory", "continent"))? {
            let (label, continent) = fields;
            let label = TerritoryLabel::new(&label).map_err(|e| TableError::Format {
                row,
                message: e.to_string(),
            })?;
            let continent: Continent =
                continent
                    .parse()
                    .map_err(|_| TableError::UnknownContinent {
                        row,
                        value: continent.clone(),
                    })?;
            table.insert(row, label, continent)?;
        }
        Ok(table)
    }

    pub fn from_entries<'a, I>(entries: I) -> Result<Self, TableError>
    where
        I: IntoIterator<Item = (&'a str, Continent)>,
    {
        let mut table = ContinentTable::default();
        for (i, (label, continent)) in entries.into_iter().enumerate() {
            let row = i as u64 + 1;
            let label = TerritoryLabel::new(label).map_err(|e| TableError::Format {
                row,
                message: e.to_string(),
            })?;
            table.insert(row, label, continent)?;
        }
        Ok(table)
    }

    fn insert(
        &mut self,
        row: u64,
        label: TerritoryLabel,
        continent: Continent,
    ) -> Result<(), TableError> {
        match self.entries.get(label.key()) {
            Some((_, existing)) if *existing != continent => Err(TableError::Conflict {
                row,
                label: label.as_str().to_string(),
                existing: *existing,
            }),
            Some(_) => Ok(()),
            None => {
                self.entries
                    .insert(label.key().to_string(), (label, continent));
                Ok(())
            }
        }
    }

    /// Adds aliases from an `alias,canonical_label` file. Every target
    /// must already be a table entry.
    pub fn with_aliases<R: Read>(mut self, source: R) -> Result<Self, TableError> {
        for (row, (alias, target)) in read_pairs(source, ("alias", "canonical_label"))? {
            let alias_key = normalize_label(&alias);
            let target_key = normalize_label(&target);
            if alias_key.is_empty() {
                return Err(TableError::Format {
                    row,
                    message: "empty alias".into(),
                });
            }
            if !self.entries.contains_key(&target_key) {
                return Err(TableError::UnknownAliasTarget { row, label: target });
            }
            self.aliases.insert(alias_key, target_key);
        }
        Ok(self)
    }

    pub fn resolve(&self, label: &TerritoryLabel) -> Option<Resolved<'_>> {
        self.resolve_key(label.key())
    }

    pub fn resolve_str(&self, label: &str) -> Option<Resolved<'_>> {
        self.resolve_key(&normalize_label(label))
    }

    fn resolve_key(&self, key: &str) -> Option<Resolved<'_>> {
        let key = self.aliases.get(key).map(String::as_str).unwrap_or(key);
        self.entries
            .get(key)
            .map(|(label, continent)| Resolved {
                label,
                continent: *continent,
            })
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn alias_count(&self) -> usize {
        self.aliases.len()
    }

    /// All canonical entries, sorted by normalized label.
    pub fn entries(&self) -> Vec<(&TerritoryLabel, Continent)> {
        let mut out: Vec<_> = self.entries.values().map(|(l, c)| (l, *c)).collect();
        out.sort_by(|a, b| a.0.cmp(b.0));
        out
    }

    /// Canonical labels on one continent, sorted by normalized label.
    pub fn territories_on(&self, continent: Continent) -> Vec<&TerritoryLabel> {
        self.entries()
            .into_iter()
            .filter(|&(_, c)| c == continent)
            .map(|(l, _)| l)
            .collect()
    }
}

type Row = (u64, (String, String));

fn read_pairs<R: Read>(source: R, header: (&str, &str)) -> Result<Vec<Row>, TableError> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .from_reader(source);
    let mut rows = Vec::new();
    let mut saw_header = false;
    for (i, record) in reader.records().enumerate() {
        let row = i as u64 + 1;
        let record = record.map_err(|e| {
            let message = e.to_string();
            match e.into_kind() {
                csv::ErrorKind::Io(io) => TableError::Io(io),
                _ => TableError::Format { row, message },
            }
        })?;
        if record.len() != 2 {
            return Err(TableError::Format {
                row,
                message: format!("expected 2 columns, found {}", record.len()),
            });
        }
        if !saw_header {
            if normalize_label(&record[0]) != header.0 || normalize_label(&record[1]) != header.1 {
                return Err(TableError::Format {
                    row,
                    message: format!("expected header `{},{}`", header.0, header.1),
                });
            }
            saw_header = true;
            continue;
        }
        rows.push((row, (record[0].to_string(), record[1].to_string())));
    }
    if !saw_header {
        return Err(TableError::Format {
            row: 1,
            message: format!("missing header `{},{}`", header.0, header.1),
        });
    }
    Ok(rows)
}
