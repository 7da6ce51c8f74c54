//! JSON documents for functionals and cumulant series.
//!
//! Coefficients are exact rationals written as `"p/q"` in lowest terms.
//! Entries are sorted by degree, then lexicographically, and zero
//! coefficients are omitted except the empty-word entry of a state.

use std::collections::BTreeSet;
use std::str::FromStr;

use cfree_core::{CumulantKind, CumulantSeries, Functional, NcSeries, Rational, Word};
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{config, CliError, CliResult};

/// One coefficient: a word of 1-based letters and its value.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Entry {
    pub word: Vec<usize>,
    pub coeff: String,
}

/// A truncated series on `d` letters up to degree `N`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StateDocument {
    pub d: usize,
    #[serde(rename = "N")]
    pub order: usize,
    pub entries: Vec<Entry>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub flags: Vec<String>,
}

/// Flag marking a document that holds cumulants of the given kind.
pub fn kind_flag(kind: CumulantKind) -> String {
    format!("{}-cumulants", kind.name())
}

pub fn format_rational(r: &Rational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

pub fn parse_rational(s: &str) -> CliResult<Rational> {
    let r = Rational::from_str(s.trim()).map_err(|_| config(format!("not an exact rational: {s:?}")))?;
    Ok(r)
}

/// Comma-separated rationals, e.g. `1,-1/2`.
pub fn parse_rational_list(s: &str) -> CliResult<Vec<Rational>> {
    s.split(',').map(parse_rational).collect()
}

impl StateDocument {
    pub fn from_series(series: &NcSeries<Rational>, keep_constant: bool) -> Self {
        let mut entries: Vec<(Word, &Rational)> = series
            .iter()
            .filter(|(w, c)| !c.is_zero() || (keep_constant && w.is_empty()))
            .collect();
        entries.sort_by(|(a, _), (b, _)| a.degree().cmp(&b.degree()).then_with(|| a.letters().cmp(b.letters())));
        Self {
            d: series.d(),
            order: series.order(),
            entries: entries
                .into_iter()
                .map(|(w, c)| Entry { word: w.letters().to_vec(), coeff: format_rational(c) })
                .collect(),
            name: None,
            flags: Vec::new(),
        }
    }

    pub fn from_functional(f: &Functional<Rational>) -> Self {
        Self::from_series(f.moments(), true)
    }

    pub fn from_cumulants(c: &CumulantSeries<Rational>) -> Self {
        let mut doc = Self::from_series(c.series(), false);
        doc.flags.push(kind_flag(c.kind));
        doc
    }

    pub fn with_name(mut self, name: Option<String>) -> Self {
        self.name = name;
        self
    }

    /// Validates letters, degrees and duplicates and builds the series.
    pub fn to_series(&self, max_order: usize) -> CliResult<NcSeries<Rational>> {
        if self.d == 0 {
            return Err(config("d must be positive"));
        }
        if self.order > max_order {
            return Err(config(format!("N = {} exceeds the cap {max_order} (CFREE_MAX_N)", self.order)));
        }
        let mut series = NcSeries::zero(self.d, self.order);
        let mut seen = BTreeSet::new();
        for e in &self.entries {
            let word = Word::checked(e.word.clone(), self.d)?;
            if word.degree() > self.order {
                return Err(CliError::Core(cfree_core::Error::DegreeTooLarge { degree: word.degree(), order: self.order }));
            }
            if !seen.insert(e.word.clone()) {
                return Err(config(format!("duplicate entry for word {word}")));
            }
            series.set(&word, parse_rational(&e.coeff)?)?;
        }
        Ok(series)
    }

    /// A state document: the empty-word entry must be present and equal 1.
    pub fn to_functional(&self, max_order: usize) -> CliResult<Functional<Rational>> {
        let has_unit = self.entries.iter().any(|e| e.word.is_empty() && parse_rational(&e.coeff).is_ok_and(|c| c.is_one()));
        if !has_unit {
            return Err(config("state document needs the empty-word entry \"1/1\""));
        }
        Ok(Functional::new(self.to_series(max_order)?)?)
    }

    pub fn read(path: &str) -> CliResult<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| CliError::Io { path: path.into(), source })?;
        Ok(serde_json::from_str(&text)?)
    }
}
