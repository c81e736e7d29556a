use std::io::Write;

use chrono::NaiveDate;
use serde::Serialize;

use super::KeywordSet;
use crate::error::Result;
use crate::ngram::csv_writer;
use crate::preprocess::Document;

/// Share of a document's tokens matching one keyword set.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OccurrenceRow {
    pub date: NaiveDate,
    pub document_id: String,
    pub set: String,
    pub relative_frequency: f64,
}

/// One row per (document, set), ordered by date, set name, then document id.
/// Empty documents record a frequency of 0.
pub fn keyword_timeseries(docs: &[Document], sets: &[KeywordSet]) -> Vec<OccurrenceRow> {
    let mut rows = Vec::with_capacity(docs.len() * sets.len());
    for doc in docs {
        for set in sets {
            let hits = doc.tokens.iter().filter(|t| set.matches(t)).count();
            let relative_frequency = if doc.tokens.is_empty() {
                0.0
            } else {
                hits as f64 / doc.tokens.len() as f64
            };
            rows.push(OccurrenceRow {
                date: doc.date,
                document_id: doc.id.clone(),
                set: set.name().to_owned(),
                relative_frequency,
            });
        }
    }
    rows.sort_by(|a, b| {
        (a.date, &a.set, &a.document_id).cmp(&(b.date, &b.set, &b.document_id))
    });
    rows
}

/// `date,document_id,set,relative_frequency`
pub fn write_timeseries_csv<W: Write>(rows: &[OccurrenceRow], out: W) -> Result<()> {
    let mut w = csv_writer(out);
    w.write_record(["date", "document_id", "set", "relative_frequency"])?;
    for r in rows {
        w.write_record([
            r.date.to_string(),
            r.document_id.clone(),
            r.set.clone(),
            r.relative_frequency.to_string(),
        ])?;
    }
    w.flush().map_err(csv::Error::from)?;
    Ok(())
}
