use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type TokenSet = BTreeSet<String>;

/// Syntax tokens `I(x)` and semantic tokens `J(x)` of one data point.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FeatureEntry {
    #[serde(default)]
    pub syntax: TokenSet,
    #[serde(default)]
    pub semantics: TokenSet,
}

impl FeatureEntry {
    pub fn new<S: Into<String>>(
        syntax: impl IntoIterator<Item = S>,
        semantics: impl IntoIterator<Item = S>,
    ) -> Self {
        Self {
            syntax: syntax.into_iter().map(Into::into).collect(),
            semantics: semantics.into_iter().map(Into::into).collect(),
        }
    }

    /// `F(x) = I(x) ∪ J(x)`.
    pub fn all(&self) -> TokenSet {
        self.syntax.union(&self.semantics).cloned().collect()
    }

    pub fn features(&self, mode: AbstractionMode) -> TokenSet {
        match mode {
            AbstractionMode::Syntax => self.syntax.clone(),
            AbstractionMode::All => self.all(),
        }
    }
}

/// Which tokens feed the tree of abstractions and the matching of new
/// points.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AbstractionMode {
    #[default]
    Syntax,
    All,
}

impl std::str::FromStr for AbstractionMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "syntax" => Ok(Self::Syntax),
            "all" => Ok(Self::All),
            other => Err(Error::Argument(format!("unknown abstraction mode {other:?}"))),
        }
    }
}

impl std::fmt::Display for AbstractionMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Self::Syntax => "syntax",
            Self::All => "all",
        })
    }
}

/// Feature entries keyed by vertex id.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct FeatureCatalog {
    entries: BTreeMap<String, FeatureEntry>,
}

impl FeatureCatalog {
    pub fn new() -> Self {
        Self::default()
    }

    /// Every id present with empty token sets.
    pub fn empty_for<S: AsRef<str>>(ids: &[S]) -> Self {
        Self { entries: ids.iter().map(|id| (id.as_ref().to_owned(), FeatureEntry::default())).collect() }
    }

    pub fn insert(&mut self, id: impl Into<String>, entry: FeatureEntry) -> Option<FeatureEntry> {
        self.entries.insert(id.into(), entry)
    }

    pub fn get(&self, id: &str) -> Option<&FeatureEntry> {
        self.entries.get(id)
    }

    /// Entry for `id`, or [`Error::MissingFeatures`].
    pub fn entry(&self, id: &str) -> Result<&FeatureEntry> {
        self.entries.get(id).ok_or_else(|| Error::MissingFeatures(id.to_owned()))
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &FeatureEntry)> {
        self.entries.iter().map(|(k, v)| (k.as_str(), v))
    }

    /// Checks that every id has an entry.
    pub fn covers<S: AsRef<str>>(&self, ids: &[S]) -> Result<()> {
        for id in ids {
            self.entry(id.as_ref())?;
        }
        Ok(())
    }

    /// Per-vertex token sets in the order of `ids`.
    pub fn sets_for<S: AsRef<str>>(&self, ids: &[S], mode: AbstractionMode) -> Result<Vec<TokenSet>> {
        ids.iter().map(|id| self.entry(id.as_ref()).map(|e| e.features(mode))).collect()
    }

    pub(crate) fn all_sets_for<S: AsRef<str>>(&self, ids: &[S]) -> Result<Vec<TokenSet>> {
        ids.iter().map(|id| self.entry(id.as_ref()).map(FeatureEntry::all)).collect()
    }

    pub fn parse_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::parse_json(&std::fs::read_to_string(path)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("catalog serializes")
    }
}
