use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

/// The six continents used to classify territories.
///
/// Variant order is the alphabetical order of the display names, so the
/// derived `Ord` is the canonical ordering used in sequences.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Continent {
    Africa,
    Asia,
    AustraliaOceania,
    Europe,
    NorthAmerica,
    SouthAmerica,
}

impl Continent {
    pub const COUNT: usize = 6;

    pub const ALL: [Continent; Continent::COUNT] = [
        Continent::Africa,
        Continent::Asia,
        Continent::AustraliaOceania,
        Continent::Europe,
        Continent::NorthAmerica,
        Continent::SouthAmerica,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Continent::Africa => "Africa",
            Continent::Asia => "Asia",
            Continent::AustraliaOceania => "Australia & Oceania",
            Continent::Europe => "Europe",
            Continent::NorthAmerica => "North America",
            Continent::SouthAmerica => "South America",
        }
    }

    /// Position in [`Continent::ALL`].
    pub fn index(self) -> usize {
        self as usize
    }

    pub fn from_index(index: usize) -> Option<Continent> {
        Continent::ALL.get(index).copied()
    }
}

/// Total order on continents, alphabetical by name.
pub fn canonical_order(a: Continent, b: Continent) -> Ordering {
    a.cmp(&b)
}

impl fmt::Display for Continent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("unknown continent name `{0}`")]
pub struct UnknownContinent(pub String);

impl FromStr for Continent {
    type Err = UnknownContinent;

    /// Accepts the display names, compared after label normalization
    /// (so `north  america` parses too).
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let key = super::normalize_label(s);
        Continent::ALL
            .iter()
            .copied()
            .find(|c| c.name().to_lowercase() == key)
            .ok_or_else(|| UnknownContinent(s.to_string()))
    }
}
