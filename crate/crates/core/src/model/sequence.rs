use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use super::Continent;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SequenceError {
    #[error("a continent sequence needs at least one part")]
    Empty,
    #[error("country count for {0} must be at least 1")]
    ZeroCount(Continent),
    #[error("continents out of canonical order: {0} listed after {1}")]
    OutOfOrder(Continent, Continent),
    #[error("cannot parse sequence part `{0}`")]
    BadPart(String),
}

/// The canonical `continent (number of countries)` description of a
/// publication, e.g. `Asia (2), Europe (2), North America (1)`.
///
/// Stored as one count per continent; continents with a zero count are
/// absent from the sequence. This makes the alphabetical ordering and the
/// uniqueness of continents hold by construction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct ContinentSequence {
    counts: [u32; Continent::COUNT],
}

impl ContinentSequence {
    /// Builds a sequence from per-continent counts indexed as
    /// [`Continent::ALL`]. At least one count must be non-zero.
    pub fn from_counts(counts: [u32; Continent::COUNT]) -> Result<Self, SequenceError> {
        if counts.iter().all(|&c| c == 0) {
            return Err(SequenceError::Empty);
        }
        Ok(ContinentSequence { counts })
    }

    /// Builds a sequence from explicit parts, which must already be in
    /// canonical order with positive counts.
    pub fn from_parts<I>(parts: I) -> Result<Self, SequenceError>
    where
        I: IntoIterator<Item = (Continent, u32)>,
    {
        let mut counts = [0u32; Continent::COUNT];
        let mut prev: Option<Continent> = None;
        for (continent, count) in parts {
            if count == 0 {
                return Err(SequenceError::ZeroCount(continent));
            }
            if let Some(p) = prev {
                if continent <= p {
                    return Err(SequenceError::OutOfOrder(continent, p));
                }
            }
            counts[continent.index()] = count;
            prev = Some(continent);
        }
        Self::from_counts(counts)
    }

    pub fn counts(&self) -> [u32; Continent::COUNT] {
        self.counts
    }

    pub fn count_for(&self, continent: Continent) -> u32 {
        self.counts[continent.index()]
    }

    /// `(continent, country_count)` pairs in canonical order.
    pub fn parts(&self) -> impl Iterator<Item = (Continent, u32)> + '_ {
        Continent::ALL
            .iter()
            .map(|&c| (c, self.counts[c.index()]))
            .filter(|&(_, n)| n > 0)
    }

    /// Number of continents represented.
    pub fn len(&self) -> usize {
        self.counts.iter().filter(|&&c| c > 0).count()
    }

    /// Always false; present for API symmetry with `len`.
    pub fn is_empty(&self) -> bool {
        false
    }

    /// Total number of distinct countries across all continents.
    pub fn total_countries(&self) -> u64 {
        self.counts.iter().map(|&c| u64::from(c)).sum()
    }

    pub fn render(&self) -> String {
        self.to_string()
    }
}

impl fmt::Display for ContinentSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, (continent, count)) in self.parts().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{} ({})", continent.name(), count)?;
        }
        Ok(())
    }
}

impl FromStr for ContinentSequence {
    type Err = SequenceError;

    /// Parses the rendered form. Input must be canonical: parts joined by
    /// `", "`, each `<Continent> (<count>)`, continents in order.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s.trim().is_empty() {
            return Err(SequenceError::Empty);
        }
        let parts = s
            .split(", ")
            .map(parse_part)
            .collect::<Result<Vec<_>, _>>()?;
        Self::from_parts(parts)
    }
}

fn parse_part(part: &str) -> Result<(Continent, u32), SequenceError> {
    let bad = || SequenceError::BadPart(part.to_string());
    let inner = part.strip_suffix(')').ok_or_else(bad)?;
    let (name, count) = inner.rsplit_once(" (").ok_or_else(bad)?;
    let continent = Continent::ALL
        .iter()
        .copied()
        .find(|c| c.name() == name)
        .ok_or_else(bad)?;
    if count.is_empty() || !count.bytes().all(|b| b.is_ascii_digit()) {
        return Err(bad());
    }
    let count: u32 = count.parse().map_err(|_| bad())?;
    Ok((continent, count))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn renders_table_labels() {
        let seq = ContinentSequence::from_parts([
            (Continent::Europe, 2),
            (Continent::NorthAmerica, 1),
        ])
        .unwrap();
        assert_eq!(seq.render(), "Europe (2), North America (1)");

        let asia = ContinentSequence::from_parts([(Continent::Asia, 1)]).unwrap();
        assert_eq!(asia.render(), "Asia (1)");

        let oceania = ContinentSequence::from_parts([
            (Continent::AustraliaOceania, 1),
            (Continent::Europe, 1),
        ])
        .unwrap();
        assert_eq!(oceania.render(), "Australia & Oceania (1), Europe (1)");
    }

    #[test]
    fn rejects_non_canonical_input() {
        assert_eq!(
            "Europe (1), Asia (1)".parse::<ContinentSequence>(),
            Err(SequenceError::OutOfOrder(Continent::Asia, Continent::Europe))
        );
        assert_eq!(
            "Asia (1), Asia (2)".parse::<ContinentSequence>(),
            Err(SequenceError::OutOfOrder(Continent::Asia, Continent::Asia))
        );
        assert_eq!(
            "Asia (0)".parse::<ContinentSequence>(),
            Err(SequenceError::ZeroCount(Continent::Asia))
        );
        assert!("Asia(1)".parse::<ContinentSequence>().is_err());
        assert!("Asia (1),Europe (1)".parse::<ContinentSequence>().is_err());
        assert!("Asia (+1)".parse::<ContinentSequence>().is_err());
        assert!("Antarctica (1)".parse::<ContinentSequence>().is_err());
        assert_eq!("".parse::<ContinentSequence>(), Err(SequenceError::Empty));
        assert_eq!(
            ContinentSequence::from_counts([0; 6]),
            Err(SequenceError::Empty)
        );
    }

    pub(crate) fn arb_sequence() -> impl Strategy<Value = ContinentSequence> {
        proptest::array::uniform6(prop_oneof![Just(0u32), 1u32..60])
            .prop_filter("non-empty", |c| c.iter().any(|&x| x > 0))
            .prop_map(|c| ContinentSequence::from_counts(c).unwrap())
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(1000))]

        #[test]
        fn render_parse_round_trip(seq in arb_sequence()) {
            let text = seq.render();
            prop_assert_eq!(text.parse::<ContinentSequence>().unwrap(), seq);
        }

        #[test]
        fn parts_strictly_increasing(seq in arb_sequence()) {
            let parts: Vec<_> = seq.parts().collect();
            prop_assert!(!parts.is_empty() && parts.len() <= 6);
            for w in parts.windows(2) {
                prop_assert!(w[0].0 < w[1].0);
            }
        }
    }
}
