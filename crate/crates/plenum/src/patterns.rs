//! Externalized recognition patterns for the segmenter.
//!
//! Session markers, greetings, closing phrases, chair keywords and the
//! speaker-line vocabulary all live in one TOML file, so per-parliament
//! variants can be added without code changes. The built-in defaults cover
//! the usual German stenographic conventions.
//!
//! OCR confusion pairs (e.g. "B" read as "ß") are applied to the marker
//! patterns as literal substitutions: each pattern is additionally compiled
//! with every confusion applied, so `(Beginn: ... Uhr)` also matches as
//! `(ßeginn: ... Uhr)`.

use std::path::Path;

use regex::Regex;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::metadata::CHAIR_KEYWORDS;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PatternConfig {
    /// Regexes marking the start of a session, e.g. "(Beginn: 9.02 Uhr)".
    pub start_markers: Vec<String>,
    /// Greeting phrases used as fallback session starts.
    pub greetings: Vec<String>,
    /// Regexes marking the end of a session, e.g. "(Ende: 18.47 Uhr)".
    pub end_markers: Vec<String>,
    /// Spoken closing phrases used as fallback session ends.
    pub closing_phrases: Vec<String>,
    /// Words marking the session chair in a speaker prefix.
    pub chair_keywords: Vec<String>,
    /// Role words allowed before a speaker name.
    pub role_words: Vec<String>,
    /// Academic titles allowed before a speaker name.
    pub titles: Vec<String>,
    /// OCR confusion pairs `[from, to]` expanded into marker variants.
    pub confusions: Vec<[String; 2]>,
}

impl Default for PatternConfig {
    fn default() -> Self {
        let s = |v: &[&str]| v.iter().map(|s| s.to_string()).collect();
        PatternConfig {
            start_markers: s(&[r"\(\s*Beginn\s*:?[^)]{0,40}?Uhr\s*\)"]),
            greetings: s(&[
                r"Meine\s+sehr\s+verehrten\s+Damen\s+und\s+Herren",
                r"Meine\s+(?:sehr\s+geehrten\s+)?Damen\s+und\s+Herren",
            ]),
            end_markers: s(&[
                r"\(\s*Ende\s*:?[^)]{0,40}?Uhr\s*\)",
                r"\(\s*Schlu(?:ß|ss)\s*:?[^)]{0,40}?Uhr\s*\)",
            ]),
            closing_phrases: s(&[
                r"[Dd]ie Sitzung ist (?:damit )?geschlossen",
                r"Ich schließe (?:damit )?die Sitzung",
            ]),
            chair_keywords: CHAIR_KEYWORDS.iter().map(|s| s.to_string()).collect(),
            role_words: s(&["Abgeordneter", "Abgeordnete", "Abg."]),
            titles: s(&["Dr.", "Prof."]),
            confusions: vec![["B".to_string(), "ß".to_string()]],
        }
    }
}

impl PatternConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_toml_str(&text)
    }

    pub fn from_toml_str(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string_pretty(self).expect("pattern config serializes")
    }
}

/// Compiled pattern set handed to the segmenter.
#[derive(Debug, Clone)]
pub struct PatternSet {
    start_markers: Vec<Regex>,
    greetings: Vec<Regex>,
    end_markers: Vec<Regex>,
    closing_phrases: Vec<Regex>,
    pub chair_keywords: Vec<String>,
    pub role_words: Vec<String>,
    pub titles: Vec<String>,
}

impl PatternSet {
    pub fn compile(config: &PatternConfig) -> Result<Self> {
        let compile_list = |patterns: &[String]| -> Result<Vec<Regex>> {
            let mut out = Vec::new();
            for pattern in patterns {
                for variant in confusion_variants(pattern, &config.confusions) {
                    out.push(
                        Regex::new(&variant)
                            .map_err(|e| Error::Config(format!("bad pattern {variant:?}: {e}")))?,
                    );
                }
            }
            Ok(out)
        };
        Ok(PatternSet {
            start_markers: compile_list(&config.start_markers)?,
            greetings: compile_list(&config.greetings)?,
            end_markers: compile_list(&config.end_markers)?,
            closing_phrases: compile_list(&config.closing_phrases)?,
            chair_keywords: config.chair_keywords.clone(),
            role_words: config.role_words.clone(),
            titles: config.titles.clone(),
        })
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::compile(&PatternConfig::load(path)?)
    }

    pub fn is_start_marker(&self, line: &str) -> bool {
        self.start_markers.iter().any(|r| r.is_match(line))
    }

    pub fn is_greeting(&self, line: &str) -> bool {
        self.greetings.iter().any(|r| r.is_match(line))
    }

    pub fn is_end_marker(&self, line: &str) -> bool {
        self.end_markers.iter().any(|r| r.is_match(line))
    }

    pub fn is_closing_phrase(&self, line: &str) -> bool {
        self.closing_phrases.iter().any(|r| r.is_match(line))
    }

    pub fn contains_chair_keyword(&self, text: &str) -> bool {
        let folded = text.to_lowercase();
        self.chair_keywords
            .iter()
            .any(|k| !k.is_empty() && folded.contains(&k.to_lowercase()))
    }
}

impl Default for PatternSet {
    fn default() -> Self {
        Self::compile(&PatternConfig::default()).expect("default patterns compile")
    }
}

/// The pattern itself plus one variant per confusion pair that applies.
fn confusion_variants(pattern: &str, confusions: &[[String; 2]]) -> Vec<String> {
    let mut variants = vec![pattern.to_string()];
    for [from, to] in confusions {
        if !from.is_empty() && pattern.contains(from.as_str()) {
            variants.push(pattern.replace(from.as_str(), to));
        }
    }
    variants
}
