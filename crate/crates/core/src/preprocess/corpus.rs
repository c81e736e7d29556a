use std::path::{Path, PathBuf};

use chrono::NaiveDate;

use crate::error::{Error, Result};

/// One dated text unit, typically a newspaper issue.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Document {
    pub id: String,
    pub date: NaiveDate,
    pub raw_text: String,
    pub tokens: Vec<String>,
}

impl Document {
    pub fn new(id: impl Into<String>, date: NaiveDate, raw_text: impl Into<String>) -> Self {
        Document {
            id: id.into(),
            date,
            raw_text: raw_text.into(),
            tokens: Vec::new(),
        }
    }
}

/// Splits a `YYYY-MM-DD_<id>.txt` file name into its date and id.
pub fn parse_document_filename(path: &Path) -> Result<(NaiveDate, String)> {
    let bad = |msg: &str| Error::bad_input(path, msg.to_owned());
    let stem = path
        .file_stem()
        .and_then(|s| s.to_str())
        .ok_or_else(|| bad("file name is not valid UTF-8"))?;
    let (date, id) = stem
        .split_once('_')
        .ok_or_else(|| bad("expected file name `YYYY-MM-DD_<id>.txt`"))?;
    if id.is_empty() {
        return Err(bad("empty document id in file name"));
    }
    let date = NaiveDate::parse_from_str(date, "%Y-%m-%d")
        .map_err(|e| bad(&format!("malformed date `{date}` in file name: {e}")))?;
    Ok((date, id.to_owned()))
}

/// `.txt` files directly under `dir`, sorted by path.
pub fn list_text_files(dir: &Path) -> Result<Vec<PathBuf>> {
    let entries = std::fs::read_dir(dir).map_err(|e| Error::io(dir, e))?;
    let mut files = Vec::new();
    for entry in entries {
        let path = entry.map_err(|e| Error::io(dir, e))?.path();
        if path.is_file() && path.extension().is_some_and(|ext| ext == "txt") {
            files.push(path);
        }
    }
    files.sort();
    Ok(files)
}

pub fn read_utf8(path: &Path) -> Result<String> {
    let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
    String::from_utf8(bytes).map_err(|e| Error::bad_input(path, format!("invalid UTF-8: {e}")))
}

/// Loads every dated document in `dir`, ordered by date then id.
pub fn load_corpus_dir(dir: &Path) -> Result<Vec<Document>> {
    let files = list_text_files(dir)?;
    if files.is_empty() {
        return Err(Error::NoDocuments(dir.to_path_buf()));
    }
    let mut docs = Vec::with_capacity(files.len());
    let mut seen = std::collections::HashSet::new();
    for path in files {
        let (date, id) = parse_document_filename(&path)?;
        if !seen.insert(id.clone()) {
            return Err(Error::DuplicateDocument(id));
        }
        docs.push(Document::new(id, date, read_utf8(&path)?));
    }
    docs.sort_by(|a, b| (a.date, &a.id).cmp(&(b.date, &b.id)));
    Ok(docs)
}

/// Raw texts of a language-model source: a single file, or every `.txt` in a directory.
pub fn load_training_texts(path: &Path) -> Result<Vec<String>> {
    if path.is_dir() {
        list_text_files(path)?.iter().map(|p| read_utf8(p)).collect()
    } else {
        Ok(vec![read_utf8(path)?])
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn filename_parsing() {
        let (date, id) = parse_document_filename(Path::new("/x/1877-04-24_issue093.txt")).unwrap();
        assert_eq!(date, NaiveDate::from_ymd_opt(1877, 4, 24).unwrap());
        assert_eq!(id, "issue093");
        // ids may themselves contain underscores
        let (_, id) = parse_document_filename(Path::new("1877-01-02_a_b.txt")).unwrap();
        assert_eq!(id, "a_b");
    }

    #[test]
    fn malformed_filenames() {
        for name in ["1877-13-01_x.txt", "noidea.txt", "1877-01-01_.txt", "01-01-1877_x.txt"] {
            let err = parse_document_filename(Path::new(name)).unwrap_err();
            assert!(err.to_string().contains(name), "{err}");
        }
    }

    #[test]
    fn corpus_directory() {
        let dir = tempfile::tempdir().unwrap();
        std::fs::write(dir.path().join("1877-02-01_b.txt"), "Seconda").unwrap();
        std::fs::write(dir.path().join("1877-01-01_z.txt"), "Prima").unwrap();
        std::fs::write(dir.path().join("notes.md"), "ignored").unwrap();
        let docs = load_corpus_dir(dir.path()).unwrap();
        assert_eq!(docs.iter().map(|d| d.id.as_str()).collect::<Vec<_>>(), ["z", "b"]);
    }

    #[test]
    fn empty_corpus_directory() {
        let dir = tempfile::tempdir().unwrap();
        let err = load_corpus_dir(dir.path()).unwrap_err();
        assert!(err.to_string().starts_with("no documents found"));
    }

    #[test]
    fn invalid_utf8_names_file() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("1877-01-01_a.txt");
        std::fs::write(&path, [0xff, 0xfe, 0x41]).unwrap();
        let err = load_corpus_dir(dir.path()).unwrap_err();
        assert!(err.to_string().contains("1877-01-01_a.txt"));
    }
}
