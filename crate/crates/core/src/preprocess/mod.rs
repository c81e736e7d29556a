//! Raw text to lemma sequences: normalization, spell correction, stopword
//! removal and dictionary lemmatization, applied in that order.

mod corpus;
mod lexicon;
mod spell;
mod tokenize;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use corpus::{
    list_text_files, load_corpus_dir, load_training_texts, parse_document_filename, read_utf8,
    Document,
};
pub use lexicon::{lemmatize, remove_stopwords, LemmaDictionary, StopwordList};
pub use spell::{
    correct, correct_with_alphabet, edits1, edits1_raw, train_language_model, LanguageModel,
    MaxEdit, SpellCorrector, ITALIAN_ALPHABET,
};
pub use tokenize::normalize;

/// Token counts after each stage for one document.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DocumentStats {
    pub document_id: String,
    pub date: String,
    pub normalized_tokens: usize,
    pub corrected_tokens: usize,
    pub after_stopwords: usize,
    pub lemmas: usize,
}

#[derive(Debug, Clone)]
pub struct Preprocessor {
    pub corrector: Option<SpellCorrector>,
    pub stopwords: StopwordList,
    pub lemmas: LemmaDictionary,
}

impl Preprocessor {
    /// Fills `doc.tokens` with the lemma sequence and reports per-stage counts.
    pub fn process(&self, doc: &mut Document) -> DocumentStats {
        let normalized = normalize(&doc.raw_text);
        let mut corrected_tokens = 0;
        let corrected: Vec<String> = match &self.corrector {
            Some(c) => normalized
                .iter()
                .map(|t| {
                    let fixed = c.correct_token(t);
                    if &fixed != t {
                        corrected_tokens += 1;
                    }
                    fixed
                })
                .collect(),
            None => normalized.clone(),
        };
        let kept = remove_stopwords(&corrected, &self.stopwords);
        let lemmas = lemmatize(&kept, &self.lemmas);
        let stats = DocumentStats {
            document_id: doc.id.clone(),
            date: doc.date.to_string(),
            normalized_tokens: normalized.len(),
            corrected_tokens,
            after_stopwords: kept.len(),
            lemmas: lemmas.len(),
        };
        doc.tokens = lemmas;
        stats
    }

    /// Processes documents in parallel; output order follows input order.
    pub fn process_all(&self, docs: &mut [Document]) -> Vec<DocumentStats> {
        docs.par_iter_mut().map(|d| self.process(d)).collect()
    }
}
