//! Common-answer screening.
//!
//! Answers such as a popular sport or a common first name are easy for an
//! acquaintance to guess, even when they happen to satisfy every meter rule.
//! Wordlists of such answers are loaded per category and an answer is
//! flagged when its normalized form is an exact member of any list.

use std::collections::BTreeSet;
use std::path::{Path, PathBuf};

use unicode_normalization::UnicodeNormalization;

use crate::error::{Error, Result};

/// Canonical form used for dictionary lookups: trimmed, NFC, case-folded.
///
/// Folding goes through the uppercase mapping first so that characters
/// whose uppercase form folds elsewhere (dotless `ı` → `I` → `i`) compare
/// equal to their uppercased spelling.
pub fn normalize_answer(text: &str) -> String {
    let composed: String = text.trim().nfc().collect();
    let upper = composed.to_uppercase();
    let folded = caseless::default_case_fold_str(&upper);
    folded.nfc().collect::<String>().trim().to_owned()
}

/// Form used for recovery digests: trimmed and NFC, case preserved.
pub fn match_normal(text: &str) -> String {
    text.trim().nfc().collect::<String>().trim().to_owned()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Wordlist {
    category: String,
    entries: BTreeSet<String>,
    source_path: String,
}

impl Wordlist {
    /// Parses wordlist text: one entry per line, `#` comment lines and blank
    /// lines skipped, LF or CRLF endings.
    pub fn parse(category: &str, text: &str, source_path: &str) -> Self {
        let mut list = Wordlist {
            category: category.to_owned(),
            entries: BTreeSet::new(),
            source_path: source_path.to_owned(),
        };
        for (idx, line) in text.split('\n').enumerate() {
            list.push_line(idx, line);
        }
        list
    }

    fn push_line(&mut self, idx: usize, line: &str) {
        let line = line.strip_suffix('\r').unwrap_or(line);
        let line = if idx == 0 {
            line.strip_prefix('\u{feff}').unwrap_or(line)
        } else {
            line
        };
        if line.starts_with('#') || line.trim().is_empty() {
            return;
        }
        let entry = normalize_answer(line);
        if !entry.is_empty() {
            self.entries.insert(entry);
        }
    }

    pub fn from_entries<I, S>(category: &str, entries: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        Wordlist {
            category: category.to_owned(),
            entries: entries
                .into_iter()
                .map(|e| normalize_answer(e.as_ref()))
                .filter(|e| !e.is_empty())
                .collect(),
            source_path: String::new(),
        }
    }

    pub fn category(&self) -> &str {
        &self.category
    }

    pub fn source_path(&self) -> &str {
        &self.source_path
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> impl Iterator<Item = &str> {
        self.entries.iter().map(String::as_str)
    }

    /// Membership of an already-normalized key.
    pub fn contains_normalized(&self, key: &str) -> bool {
        self.entries.contains(key)
    }
}

/// Reads a wordlist file. Invalid UTF-8 is reported with its 1-based line.
pub fn load_wordlist(path: impl AsRef<Path>, category: &str) -> Result<Wordlist> {
    let path = path.as_ref();
    let bytes = std::fs::read(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let mut list = Wordlist {
        category: category.to_owned(),
        entries: BTreeSet::new(),
        source_path: path.display().to_string(),
    };
    for (idx, raw) in bytes.split(|&b| b == b'\n').enumerate() {
        let line = std::str::from_utf8(raw).map_err(|_| Error::Decode {
            path: PathBuf::from(path),
            line: idx + 1,
        })?;
        list.push_line(idx, line);
    }
    Ok(list)
}

/// Wordlists queried together, kept sorted by category name so the first
/// match is deterministic.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct WordlistSet {
    lists: Vec<Wordlist>,
}

impl WordlistSet {
    pub fn new(lists: impl IntoIterator<Item = Wordlist>) -> Self {
        let mut set = WordlistSet::default();
        for list in lists {
            set.add(list);
        }
        set
    }

    pub fn add(&mut self, list: Wordlist) {
        let pos = self
            .lists
            .partition_point(|l| l.category.as_str() <= list.category.as_str());
        self.lists.insert(pos, list);
    }

    pub fn lists(&self) -> &[Wordlist] {
        &self.lists
    }

    pub fn is_empty(&self) -> bool {
        self.lists.is_empty()
    }

    /// Category of the first list containing the answer, if any.
    pub fn is_common(&self, answer: &str) -> Option<&str> {
        is_common(answer, &self.lists)
    }
}

pub fn is_common<'a>(answer: &str, lists: &'a [Wordlist]) -> Option<&'a str> {
    let key = normalize_answer(answer);
    if key.is_empty() {
        return None;
    }
    lists
        .iter()
        .filter(|l| l.contains_normalized(&key))
        .map(|l| l.category.as_str())
        .min()
}
