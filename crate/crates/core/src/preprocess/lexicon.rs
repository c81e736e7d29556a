use std::collections::{HashMap, HashSet};
use std::path::Path;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct StopwordList {
    words: HashSet<String>,
}

impl StopwordList {
    pub fn new<I, S>(words: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        StopwordList {
            words: words.into_iter().map(|w| w.as_ref().to_lowercase()).collect(),
        }
    }

    /// One word per line; blank lines and `#` comments are ignored.
    pub fn parse(text: &str) -> Self {
        Self::new(
            text.lines()
                .map(|line| line.split('#').next().unwrap_or("").trim())
                .filter(|w| !w.is_empty()),
        )
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Ok(Self::parse(&text))
    }

    pub fn contains(&self, word: &str) -> bool {
        self.words.contains(&word.to_lowercase())
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }
}

pub fn remove_stopwords(tokens: &[String], list: &StopwordList) -> Vec<String> {
    tokens.iter().filter(|t| !list.contains(t)).cloned().collect()
}

/// Inflected form to lemma. Absent forms map to themselves.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct LemmaDictionary {
    map: HashMap<String, String>,
}

impl LemmaDictionary {
    pub fn new<I, A, B>(pairs: I) -> Self
    where
        I: IntoIterator<Item = (A, B)>,
        A: AsRef<str>,
        B: AsRef<str>,
    {
        LemmaDictionary {
            map: pairs
                .into_iter()
                .map(|(f, l)| (f.as_ref().to_lowercase(), l.as_ref().to_lowercase()))
                .collect(),
        }
    }

    /// `form<TAB>lemma` per line. Blank lines and `#` comment lines are skipped;
    /// any other line without exactly two fields is an error.
    pub fn parse(text: &str, origin: &Path) -> Result<Self> {
        let mut pairs = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let trimmed = line.trim();
            if trimmed.is_empty() || trimmed.starts_with('#') {
                continue;
            }
            let mut fields = trimmed.split('\t');
            match (fields.next(), fields.next(), fields.next()) {
                (Some(form), Some(lemma), None) if !form.trim().is_empty() && !lemma.trim().is_empty() => {
                    pairs.push((form.trim().to_owned(), lemma.trim().to_owned()))
                }
                _ => {
                    return Err(Error::bad_input(
                        origin,
                        format!("line {}: expected `form<TAB>lemma`", lineno + 1),
                    ))
                }
            }
        }
        Ok(Self::new(pairs))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text, path)
    }

    pub fn lookup<'a>(&'a self, form: &'a str) -> &'a str {
        self.map.get(form).map(String::as_str).unwrap_or(form)
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }
}

pub fn lemmatize(tokens: &[String], dict: &LemmaDictionary) -> Vec<String> {
    tokens.iter().map(|t| dict.lookup(t).to_owned()).collect()
}
