//! Lexicon-based OCR post-correction.
//!
//! Recognizers misread single letters ("Bravo!" comes back as "Bravol"), so
//! every token that is not in a frequency lexicon gets matched against it by
//! Levenshtein distance. The allowed distance grows with the word length: a
//! two-letter word is never altered, a seven-letter word may be two edits
//! away from its dictionary form. Lookup goes through a symmetric-delete
//! index, which reduces candidate search to hash probes over deletion
//! variants instead of a scan of the whole lexicon.
//!
//! Member-of-parliament surnames are inserted as protected entries with a
//! frequency above every lexicon word, so a mangled surname snaps back to
//! the name instead of drifting to a similar common word. That keeps the
//! downstream speaker detection intact.
//!
//! Lookup is case-folded; a replacement keeps the case it has in the
//! dictionary, and reported distances are measured on the folded forms.
//! Tokens containing digits (document ids, dates) are never touched.

use std::collections::{HashMap, HashSet};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Levenshtein distance on Unicode scalar values (insert/delete/substitute).
pub fn levenshtein(a: &str, b: &str) -> usize {
    let a: Vec<char> = a.chars().collect();
    let b: Vec<char> = b.chars().collect();
    if a.is_empty() {
        return b.len();
    }
    if b.is_empty() {
        return a.len();
    }
    let mut prev: Vec<usize> = (0..=b.len()).collect();
    let mut cur = vec![0usize; b.len() + 1];
    for (i, &ca) in a.iter().enumerate() {
        cur[0] = i + 1;
        for (j, &cb) in b.iter().enumerate() {
            let sub = prev[j] + usize::from(ca != cb);
            cur[j + 1] = sub.min(prev[j + 1] + 1).min(cur[j] + 1);
        }
        std::mem::swap(&mut prev, &mut cur);
    }
    prev[b.len()]
}

/// Maximum correction distance for a word of the given character length.
/// Monotone step table: short function words are never altered, medium
/// words allow one edit, words of seven characters and more allow two.
pub fn max_edit_distance(word_len: usize) -> usize {
    match word_len {
        0..=3 => 0,
        4..=6 => 1,
        _ => 2,
    }
}

/// Distance bound the delete index is built for; equals the largest value
/// of [`max_edit_distance`].
pub const MAX_INDEX_DISTANCE: usize = 2;

#[derive(Debug, Clone)]
struct Entry {
    /// Case-folded lookup key.
    key: Box<str>,
    /// Replacement form with the dictionary's casing.
    display: Box<str>,
    frequency: u64,
    protected: bool,
}

/// Frequency lexicon plus a deletion-variant index for bounded
/// edit-distance lookup.
#[derive(Debug, Clone)]
pub struct CorrectionDictionary {
    entries: Vec<Entry>,
    by_key: HashMap<Box<str>, u32>,
    deletes: HashMap<Box<str>, Vec<u32>>,
    max_key_chars: usize,
}

impl CorrectionDictionary {
    /// Builds the dictionary from `(token, frequency)` pairs and a list of
    /// protected surnames. Protected names are indexed like lexicon words
    /// but carry `max frequency + 1`, so they dominate every frequency
    /// tie-break. Duplicate tokens keep the larger frequency.
    pub fn build<T, N>(lexicon: impl IntoIterator<Item = (T, u64)>, protected_names: impl IntoIterator<Item = N>) -> Self
    where
        T: AsRef<str>,
        N: AsRef<str>,
    {
        let mut dict = CorrectionDictionary {
            entries: Vec::new(),
            by_key: HashMap::new(),
            deletes: HashMap::new(),
            max_key_chars: 0,
        };
        let mut max_frequency = 0u64;
        for (token, frequency) in lexicon {
            let token = token.as_ref();
            if token.is_empty() {
                continue;
            }
            max_frequency = max_frequency.max(frequency);
            dict.insert(token, frequency, false);
        }
        for name in protected_names {
            let name = name.as_ref();
            if name.is_empty() {
                continue;
            }
            dict.insert(name, max_frequency + 1, true);
        }
        for id in 0..dict.entries.len() as u32 {
            let key = dict.entries[id as usize].key.clone();
            dict.max_key_chars = dict.max_key_chars.max(key.chars().count());
            // the word itself is its own depth-0 variant
            dict.deletes.entry(key.clone()).or_default().push(id);
            for variant in delete_variants(&key, MAX_INDEX_DISTANCE) {
                dict.deletes
                    .entry(variant.into_boxed_str())
                    .or_default()
                    .push(id);
            }
        }
        dict
    }

    fn insert(&mut self, token: &str, frequency: u64, protected: bool) {
        let key = token.to_lowercase();
        match self.by_key.get(key.as_str()) {
            Some(&id) => {
                let entry = &mut self.entries[id as usize];
                if protected {
                    entry.protected = true;
                    entry.frequency = entry.frequency.max(frequency);
                    entry.display = token.into();
                } else if !entry.protected
                    && (frequency > entry.frequency
                        || (frequency == entry.frequency && token < &*entry.display))
                {
                    entry.frequency = frequency;
                    entry.display = token.into();
                }
            }
            None => {
                let id = self.entries.len() as u32;
                self.entries.push(Entry {
                    key: key.clone().into_boxed_str(),
                    display: token.into(),
                    frequency,
                    protected,
                });
                self.by_key.insert(key.into_boxed_str(), id);
            }
        }
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// True when the case-folded form of `token` is a dictionary entry.
    pub fn contains(&self, token: &str) -> bool {
        self.by_key.contains_key(token.to_lowercase().as_str())
    }

    pub fn is_protected(&self, token: &str) -> bool {
        self.by_key
            .get(token.to_lowercase().as_str())
            .is_some_and(|&id| self.entries[id as usize].protected)
    }

    pub fn frequency(&self, token: &str) -> Option<u64> {
        self.by_key
            .get(token.to_lowercase().as_str())
            .map(|&id| self.entries[id as usize].frequency)
    }

    /// Entry ids reachable from `variant` in the delete index; test hook.
    #[doc(hidden)]
    pub fn delete_sources(&self, variant: &str) -> Option<Vec<&str>> {
        self.deletes.get(variant).map(|ids| {
            ids.iter()
                .map(|&id| &*self.entries[id as usize].key)
                .collect()
        })
    }

    /// Iterates `(folded key, frequency)`; used by scan oracles in tests.
    pub fn iter_keys(&self) -> impl Iterator<Item = (&str, u64)> {
        self.entries.iter().map(|e| (&*e.key, e.frequency))
    }

    /// Best correction for an out-of-dictionary folded core, if any:
    /// smallest distance, then largest frequency, then lexicographically
    /// smallest key.
    fn best_candidate(&self, folded: &str, allowed: usize) -> Option<(&Entry, usize)> {
        if allowed == 0 {
            return None;
        }
        let folded_chars = folded.chars().count();
        // No entry can be within reach if the query is much longer than the
        // longest key; bail before generating deletion variants.
        if folded_chars > self.max_key_chars + allowed {
            return None;
        }
        let mut seen: HashSet<u32> = HashSet::new();
        let mut best: Option<(&Entry, usize)> = None;
        let mut variants = delete_variants(folded, allowed);
        variants.insert(folded.to_string());
        for variant in &variants {
            let Some(ids) = self.deletes.get(variant.as_str()) else {
                continue;
            };
            for &id in ids {
                if !seen.insert(id) {
                    continue;
                }
                let entry = &self.entries[id as usize];
                let dist = levenshtein(folded, &entry.key);
                if dist == 0 || dist > allowed {
                    continue;
                }
                let better = match &best {
                    None => true,
                    Some((cur, cur_dist)) => {
                        (dist, std::cmp::Reverse(entry.frequency), &*entry.key)
                            < (*cur_dist, std::cmp::Reverse(cur.frequency), &*cur.key)
                    }
                };
                if better {
                    best = Some((entry, dist));
                }
            }
        }
        best
    }
}

/// All distinct strings reachable from `word` by up to `depth` character
/// deletions, excluding `word` itself.
fn delete_variants(word: &str, depth: usize) -> HashSet<String> {
    let mut out = HashSet::new();
    if depth == 0 {
        return out;
    }
    let chars: Vec<char> = word.chars().collect();
    let mut frontier = vec![chars];
    for _ in 0..depth {
        let mut next = Vec::new();
        for chars in frontier {
            if chars.len() <= 1 {
                continue;
            }
            for skip in 0..chars.len() {
                let variant: String = chars
                    .iter()
                    .enumerate()
                    .filter(|(i, _)| *i != skip)
                    .map(|(_, c)| *c)
                    .collect();
                if out.insert(variant.clone()) {
                    next.push(variant.chars().collect());
                }
            }
        }
        frontier = next;
    }
    out
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CorrectionResult {
    pub original: String,
    pub corrected: String,
    /// Edit distance between the folded cores; 0 iff unchanged.
    pub distance: usize,
    pub changed: bool,
}

impl CorrectionResult {
    fn unchanged(token: &str) -> Self {
        CorrectionResult {
            original: token.to_string(),
            corrected: token.to_string(),
            distance: 0,
            changed: false,
        }
    }
}

/// Corrects a single whitespace-free token.
///
/// Leading and trailing punctuation is split off and reattached unchanged,
/// so "Bravol!" corrects its core and keeps the exclamation mark. Tokens
/// containing digits pass through untouched.
pub fn correct_token(token: &str, dict: &CorrectionDictionary) -> CorrectionResult {
    if token.is_empty() || token.chars().any(char::is_numeric) {
        return CorrectionResult::unchanged(token);
    }
    let Some((prefix, core, suffix)) = split_core(token) else {
        return CorrectionResult::unchanged(token);
    };
    let folded = core.to_lowercase();
    if dict.by_key.contains_key(folded.as_str()) {
        return CorrectionResult::unchanged(token);
    }
    let allowed = max_edit_distance(core.chars().count());
    match dict.best_candidate(&folded, allowed) {
        Some((entry, dist)) => CorrectionResult {
            original: token.to_string(),
            corrected: format!("{prefix}{}{suffix}", entry.display),
            distance: dist,
            changed: true,
        },
        None => CorrectionResult::unchanged(token),
    }
}

/// Splits `token` into (leading punctuation, alphabetic core, trailing
/// punctuation). Returns `None` when there is no alphanumeric core.
fn split_core(token: &str) -> Option<(&str, &str, &str)> {
    let start = token.find(|c: char| c.is_alphanumeric())?;
    let end = token.rfind(|c: char| c.is_alphanumeric())?;
    let end = end + token[end..].chars().next().map_or(1, char::len_utf8);
    Some((&token[..start], &token[start..end], &token[end..]))
}

/// One corrected token within a document; serialized into the JSONL change
/// log with exactly these fields.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChangeLogEntry {
    pub original: String,
    pub corrected: String,
    pub distance: usize,
    pub line_index: usize,
    pub token_index: usize,
}

/// Corrects every token of every line, preserving whitespace structure and
/// token order. Only changed tokens are logged. Callers route only
/// OCR-sourced documents through here; native text bypasses correction.
pub fn correct_lines(lines: &[String], dict: &CorrectionDictionary) -> (Vec<String>, Vec<ChangeLogEntry>) {
    let mut corrected = Vec::with_capacity(lines.len());
    let mut log = Vec::new();
    for (line_index, line) in lines.iter().enumerate() {
        let mut out = String::with_capacity(line.len());
        let mut token_index = 0usize;
        let mut rest = line.as_str();
        while !rest.is_empty() {
            let is_ws = rest.chars().next().unwrap().is_whitespace();
            let run_end = rest
                .char_indices()
                .find(|(_, c)| c.is_whitespace() != is_ws)
                .map(|(i, _)| i)
                .unwrap_or(rest.len());
            let (run, tail) = rest.split_at(run_end);
            if is_ws {
                out.push_str(run);
            } else {
                let result = correct_token(run, dict);
                out.push_str(&result.corrected);
                if result.changed {
                    log.push(ChangeLogEntry {
                        original: result.original,
                        corrected: result.corrected,
                        distance: result.distance,
                        line_index,
                        token_index,
                    });
                }
                token_index += 1;
            }
            rest = tail;
        }
        corrected.push(out);
    }
    (corrected, log)
}

/// Reads a `token<TAB>frequency` lexicon file. Empty lines are skipped;
/// anything else malformed is an error naming the line.
pub fn load_lexicon(path: &Path) -> Result<Vec<(String, u64)>> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_lexicon(&text, path)
}

/// [`load_lexicon`] for text already in memory; `origin` only names the
/// source in errors.
pub fn parse_lexicon(text: &str, origin: &Path) -> Result<Vec<(String, u64)>> {
    let path = origin;
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let err = |msg: &str| Error::Lexicon {
            path: path.to_path_buf(),
            line: i + 1,
            msg: msg.to_string(),
        };
        let (token, freq) = line.split_once('\t').ok_or_else(|| err("expected token<TAB>frequency"))?;
        if token.is_empty() {
            return Err(err("empty token"));
        }
        let frequency: u64 = freq
            .trim()
            .parse()
            .map_err(|_| err(&format!("bad frequency {freq:?}")))?;
        if frequency == 0 {
            return Err(err("frequency must be >= 1"));
        }
        out.push((token.to_string(), frequency));
    }
    Ok(out)
}

/// Reads a protected-name file, one surname per line.
pub fn load_protected_names(path: &Path) -> Result<Vec<String>> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    Ok(text
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty())
        .map(str::to_owned)
        .collect())
}
