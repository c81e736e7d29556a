use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

use regex::Regex;

use crate::error::{Error, Result};
use crate::ngram::BigramNetwork;

/// Default keyword sets: Bulgaria, Balkans, Slav, Turkey, Russia, Germany,
/// Britain and War.
pub const DEFAULT_KEYWORDS_TOML: &str = include_str!("../../config/keywords.toml");

/// A named bundle of start-anchored lemma patterns.
#[derive(Debug, Clone)]
pub struct KeywordSet {
    name: String,
    patterns: Vec<String>,
    compiled: Vec<Regex>,
}

impl KeywordSet {
    pub fn new<I, S>(name: impl Into<String>, patterns: I) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let name = name.into();
        let mut kept: Vec<String> = Vec::new();
        let mut compiled = Vec::new();
        for pattern in patterns {
            let pattern = pattern.into();
            let invalid = |reason: String| Error::InvalidPattern {
                set: name.clone(),
                pattern: pattern.clone(),
                reason,
            };
            if !pattern.starts_with('^') {
                return Err(invalid("pattern must be anchored with `^`".into()));
            }
            if kept.contains(&pattern) {
                continue;
            }
            let re = Regex::new(&pattern).map_err(|e| invalid(e.to_string()))?;
            compiled.push(re);
            kept.push(pattern);
        }
        if kept.is_empty() {
            return Err(Error::Config(format!("keyword set `{name}` has no patterns")));
        }
        Ok(KeywordSet {
            name,
            patterns: kept,
            compiled,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn patterns(&self) -> &[String] {
        &self.patterns
    }

    pub fn matches(&self, lemma: &str) -> bool {
        self.compiled.iter().any(|re| re.is_match(lemma))
    }
}

impl PartialEq for KeywordSet {
    fn eq(&self, other: &Self) -> bool {
        self.name == other.name && self.patterns == other.patterns
    }
}

/// Builds sets from a name → patterns mapping, ordered by name.
pub fn keyword_sets_from_map(map: BTreeMap<String, Vec<String>>) -> Result<Vec<KeywordSet>> {
    map.into_iter().map(|(name, pats)| KeywordSet::new(name, pats)).collect()
}

pub fn parse_keyword_toml(text: &str) -> Result<Vec<KeywordSet>> {
    let map: BTreeMap<String, Vec<String>> =
        toml::from_str(text).map_err(|e| Error::Config(format!("keyword sets: {e}")))?;
    keyword_sets_from_map(map)
}

pub fn parse_keyword_json(text: &str) -> Result<Vec<KeywordSet>> {
    let map: BTreeMap<String, Vec<String>> =
        serde_json::from_str(text).map_err(|e| Error::Config(format!("keyword sets: {e}")))?;
    keyword_sets_from_map(map)
}

/// Loads a `.json` or `.toml` keyword file (chosen by extension, TOML otherwise).
pub fn load_keyword_file(path: &Path) -> Result<Vec<KeywordSet>> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
    if path.extension().is_some_and(|e| e == "json") {
        parse_keyword_json(&text)
    } else {
        parse_keyword_toml(&text)
    }
}

pub fn default_keyword_sets() -> Vec<KeywordSet> {
    parse_keyword_toml(DEFAULT_KEYWORDS_TOML).expect("bundled keyword file is valid")
}

/// Nodes of `net` matching any pattern of `set`.
pub fn match_seeds(net: &BigramNetwork, set: &KeywordSet) -> BTreeSet<String> {
    net.nodes.iter().filter(|n| set.matches(n)).cloned().collect()
}
