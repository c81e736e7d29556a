//! Unigram spelling corrector in the style of Norvig's edit-distance model.
//!
//! Candidates are generated by single-character edits (deletes, adjacent
//! transposes, replaces, inserts) and ranked by their count in a
//! [`LanguageModel`]. Known words always win, then distance-1 candidates, then
//! distance-2 candidates.

use std::collections::{BTreeSet, HashMap};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// The 26 ASCII letters followed by the Italian accented vowels.
pub const ITALIAN_ALPHABET: &[char] = &[
    'a', 'b', 'c', 'd', 'e', 'f', 'g', 'h', 'i', 'j', 'k', 'l', 'm', 'n', 'o', 'p', 'q', 'r',
    's', 't', 'u', 'v', 'w', 'x', 'y', 'z', 'à', 'è', 'é', 'ì', 'ò', 'ù',
];

/// Word occurrence counts.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct LanguageModel {
    counts: HashMap<String, u64>,
    total: u64,
}

impl LanguageModel {
    pub fn from_counts(counts: HashMap<String, u64>) -> Self {
        let counts: HashMap<String, u64> = counts.into_iter().filter(|(_, c)| *c > 0).collect();
        let total = counts.values().sum();
        LanguageModel { counts, total }
    }

    pub fn count(&self, word: &str) -> u64 {
        self.counts.get(word).copied().unwrap_or(0)
    }

    pub fn contains(&self, word: &str) -> bool {
        self.counts.contains_key(word)
    }

    pub fn total(&self) -> u64 {
        self.total
    }

    pub fn len(&self) -> usize {
        self.counts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.counts.is_empty()
    }

    pub fn probability(&self, word: &str) -> f64 {
        if self.total == 0 {
            0.0
        } else {
            self.count(word) as f64 / self.total as f64
        }
    }

    pub fn counts(&self) -> &HashMap<String, u64> {
        &self.counts
    }
}

/// Counts every token of every sequence. Empty sequences contribute nothing.
pub fn train_language_model<I, S, T>(corpus: I) -> Result<LanguageModel>
where
    I: IntoIterator<Item = S>,
    S: IntoIterator<Item = T>,
    T: AsRef<str>,
{
    let mut counts: HashMap<String, u64> = HashMap::new();
    for doc in corpus {
        for tok in doc {
            *counts.entry(tok.as_ref().to_owned()).or_insert(0) += 1;
        }
    }
    let model = LanguageModel::from_counts(counts);
    if model.total == 0 {
        return Err(Error::EmptyTrainingCorpus);
    }
    Ok(model)
}

/// All single-edit variants of `word`, in generation order and with duplicates.
///
/// For a word of `n` characters and an alphabet of `a` letters this yields
/// `n` deletes, `n - 1` transposes, `a * n` replaces and `a * (n + 1)` inserts.
pub fn edits1_raw(word: &str, alphabet: &[char]) -> Vec<String> {
    let chars: Vec<char> = word.chars().collect();
    let n = chars.len();
    let mut out = Vec::with_capacity(n + n.saturating_sub(1) + alphabet.len() * (2 * n + 1));
    let assemble = |parts: &[&[char]]| -> String { parts.iter().flat_map(|p| p.iter()).collect() };

    for i in 0..n {
        out.push(assemble(&[&chars[..i], &chars[i + 1..]]));
    }
    for i in 0..n.saturating_sub(1) {
        out.push(assemble(&[&chars[..i], &[chars[i + 1], chars[i]], &chars[i + 2..]]));
    }
    for i in 0..n {
        for &c in alphabet {
            out.push(assemble(&[&chars[..i], &[c], &chars[i + 1..]]));
        }
    }
    for i in 0..=n {
        for &c in alphabet {
            out.push(assemble(&[&chars[..i], &[c], &chars[i..]]));
        }
    }
    out
}

/// Deduplicated single-edit variants of `word`.
pub fn edits1(word: &str, alphabet: &[char]) -> BTreeSet<String> {
    edits1_raw(word, alphabet).into_iter().collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "u8", into = "u8")]
pub enum MaxEdit {
    One,
    Two,
}

impl TryFrom<u8> for MaxEdit {
    type Error = String;

    fn try_from(v: u8) -> std::result::Result<Self, String> {
        match v {
            1 => Ok(MaxEdit::One),
            2 => Ok(MaxEdit::Two),
            other => Err(format!("max edit distance must be 1 or 2, got {other}")),
        }
    }
}

impl From<MaxEdit> for u8 {
    fn from(m: MaxEdit) -> u8 {
        match m {
            MaxEdit::One => 1,
            MaxEdit::Two => 2,
        }
    }
}

/// Picks the known candidate with the highest count; equal counts go to the
/// lexicographically smaller word.
fn best_known<'a, I>(candidates: I, model: &LanguageModel) -> Option<String>
where
    I: IntoIterator<Item = &'a String>,
{
    let mut best: Option<(&String, u64)> = None;
    for cand in candidates {
        let count = model.count(cand);
        if count == 0 {
            continue;
        }
        best = match best {
            Some((w, c)) if c > count || (c == count && w <= cand) => Some((w, c)),
            _ => Some((cand, count)),
        };
    }
    best.map(|(w, _)| w.clone())
}

/// Corrects `word` against `model` using the Italian alphabet.
pub fn correct(word: &str, model: &LanguageModel, max_edit: MaxEdit) -> String {
    correct_with_alphabet(word, model, max_edit, ITALIAN_ALPHABET)
}

pub fn correct_with_alphabet(
    word: &str,
    model: &LanguageModel,
    max_edit: MaxEdit,
    alphabet: &[char],
) -> String {
    if model.contains(word) || word.is_empty() {
        return word.to_owned();
    }
    let first = edits1(word, alphabet);
    if let Some(hit) = best_known(&first, model) {
        return hit;
    }
    if max_edit == MaxEdit::Two {
        let mut second = BTreeSet::new();
        for e1 in &first {
            for e2 in edits1_raw(e1, alphabet) {
                if model.contains(&e2) {
                    second.insert(e2);
                }
            }
        }
        if let Some(hit) = best_known(&second, model) {
            return hit;
        }
    }
    word.to_owned()
}

/// Pipeline wrapper: only tokens unknown to the model and at least
/// `min_len` characters long are sent to [`correct`].
#[derive(Debug, Clone)]
pub struct SpellCorrector {
    pub model: LanguageModel,
    pub max_edit: MaxEdit,
    pub min_len: usize,
}

impl SpellCorrector {
    pub const DEFAULT_MIN_LEN: usize = 3;

    pub fn new(model: LanguageModel, max_edit: MaxEdit) -> Self {
        SpellCorrector {
            model,
            max_edit,
            min_len: Self::DEFAULT_MIN_LEN,
        }
    }

    pub fn correct_token(&self, token: &str) -> String {
        if self.model.contains(token) || token.chars().count() < self.min_len {
            return token.to_owned();
        }
        correct(token, &self.model, self.max_edit)
    }
}
