//! JSONL corpus records: the join of segments with roster metadata.
//!
//! One record per segment, one JSON object per line, fixed key order,
//! nullable fields written as explicit nulls. The serialization is
//! canonical: writing, reading and writing again is byte-identical. A
//! complete file always ends with a newline; a missing terminal newline
//! marks a partially written file and is rejected on read.
//!
//! Corpus layout on disk: `out/{parliament}/{period}/{session}.jsonl`, with
//! the pre-correction text variant in a mirror tree next to it.

use std::collections::HashSet;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::LazyLock;

use chrono::NaiveDate;
use regex::Regex;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::metadata::{ScopedRoster, SpeakerRef};
use crate::segmenter::{Segment, SegmentKind};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RecordKind {
    Speech,
    Chair,
    Comment,
}

impl From<SegmentKind> for RecordKind {
    fn from(kind: SegmentKind) -> Self {
        match kind {
            SegmentKind::Speech => RecordKind::Speech,
            SegmentKind::ChairSpeech => RecordKind::Chair,
            SegmentKind::Comment => RecordKind::Comment,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RecordSpeakerKind {
    Mp,
    Chair,
    Unknown,
    Ambiguous,
}

/// One corpus line. Field order is the serialization order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorpusRecord {
    pub segment_id: String,
    pub parliament: String,
    pub period: u32,
    pub session: u32,
    pub date: Option<NaiveDate>,
    pub estimated_date: bool,
    pub kind: RecordKind,
    pub speaker_kind: RecordSpeakerKind,
    pub mp_id: Option<String>,
    pub first_name: Option<String>,
    pub last_name: Option<String>,
    pub party: Option<String>,
    pub alignment: Option<String>,
    pub birth_year: Option<i32>,
    pub constituency: Option<String>,
    pub text: String,
    /// Pre-correction text, present only when spell checking changed it.
    pub text_original: Option<String>,
    pub position: u32,
    pub attributed_mps: Vec<String>,
    pub attributed_parties: Vec<String>,
}

static HYPHEN_BREAK_LOWER: LazyLock<Regex> =
    LazyLock::new(|| Regex::new(r"(\p{L})-\n(\p{Ll})").unwrap());
static HYPHEN_BREAK_UPPER: LazyLock<Regex> =
    LazyLock::new(|| Regex::new(r"(\p{L})-\n(\p{Lu})").unwrap());

/// Flows a segment span into corpus text: words hyphenated across a line
/// break are rejoined ("Bundes-\nregierung" becomes "Bundesregierung",
/// "Baden-\nWürttemberg" keeps its hyphen), remaining line breaks become
/// spaces, outer whitespace is trimmed.
pub fn flow_text(raw: &str) -> String {
    let joined = HYPHEN_BREAK_LOWER.replace_all(raw, "$1$2");
    let joined = HYPHEN_BREAK_UPPER.replace_all(&joined, "$1-$2");
    joined.replace('\n', " ").trim().to_string()
}

/// Recovers the payload of a segment from the uncorrected source lines by
/// stripping the same header or bracket pair the segmenter stripped. The
/// offsets may differ from the corrected text, so the header is located by
/// its colon and the brackets by their position, not by length.
fn original_payload(segment: &Segment, original_lines: &[String]) -> String {
    let (from, to) = segment.line_range;
    let span = original_lines[from.min(original_lines.len())..to.min(original_lines.len())]
        .join("\n");
    match segment.kind {
        SegmentKind::Comment => {
            let mut s = span.as_str();
            let open_at = s
                .char_indices()
                .find(|(_, c)| !c.is_whitespace())
                .filter(|(_, c)| *c == '(' || *c == '[')
                .map(|(i, _)| i);
            if let Some(i) = open_at {
                s = &s[i + 1..];
            }
            let close_at = s
                .char_indices()
                .rev()
                .find(|(_, c)| !c.is_whitespace())
                .filter(|(_, c)| *c == ')' || *c == ']')
                .map(|(i, _)| i);
            if let Some(i) = close_at {
                s = &s[..i];
            }
            s.to_string()
        }
        _ if !segment.prefix.is_empty() => {
            // header line: everything after the first colon of the first line
            match span.split_once('\n') {
                Some((first, rest)) => {
                    let first = first.split_once(':').map(|(_, r)| r).unwrap_or(first);
                    format!("{first}\n{rest}")
                }
                None => span
                    .split_once(':')
                    .map(|(_, r)| r.to_string())
                    .unwrap_or(span),
            }
        }
        _ => span,
    }
}

/// Joins one segment with the roster into a corpus record.
///
/// `original_lines`, when given, supplies the pre-correction document; the
/// record carries the original text only if it differs after flowing.
pub fn record_from_segment(
    segment: &Segment,
    roster: &ScopedRoster<'_>,
    original_lines: Option<&[String]>,
) -> CorpusRecord {
    let speaker_kind = match &segment.speaker {
        SpeakerRef::Mp { .. } => RecordSpeakerKind::Mp,
        SpeakerRef::Chair { .. } => RecordSpeakerKind::Chair,
        SpeakerRef::Unknown => RecordSpeakerKind::Unknown,
        SpeakerRef::Ambiguous { .. } => RecordSpeakerKind::Ambiguous,
    };
    let entry = segment.speaker.mp_id().and_then(|id| roster.by_id(id));
    let text = flow_text(&segment.text);
    let text_original = original_lines
        .map(|lines| flow_text(&original_payload(segment, lines)))
        .filter(|orig| orig != &text);
    CorpusRecord {
        segment_id: segment.id(),
        parliament: segment.parliament.0.clone(),
        period: segment.period,
        session: segment.session,
        date: segment.date,
        estimated_date: segment.estimated_date,
        kind: segment.kind.into(),
        speaker_kind,
        mp_id: segment.speaker.mp_id().map(str::to_owned),
        first_name: entry.map(|e| e.first_name.clone()),
        last_name: entry.map(|e| e.last_name.clone()),
        party: segment.party.clone(),
        alignment: entry
            .map(|e| e.alignment.clone())
            .filter(|a| !a.is_empty()),
        birth_year: entry.and_then(|e| e.birth_year),
        constituency: entry
            .map(|e| e.constituency.clone())
            .filter(|c| !c.is_empty()),
        text,
        text_original,
        position: segment.position as u32,
        attributed_mps: segment.attributed_mps.clone(),
        attributed_parties: segment.attributed_parties.clone(),
    }
}

/// The same record with the original text promoted into `text`; used for
/// the mirror tree that publishes the uncorrected variant.
pub fn as_original_variant(record: &CorpusRecord) -> CorpusRecord {
    let mut out = record.clone();
    if let Some(orig) = out.text_original.take() {
        out.text = orig;
    }
    out
}

/// Writes records as JSONL. Fails on duplicate segment ids; returns the
/// number of records written. The terminal newline doubles as the
/// completeness sentinel checked by [`read_corpus`].
pub fn write_records<W: Write>(records: &[CorpusRecord], sink: &mut W) -> Result<usize> {
    let mut seen = HashSet::new();
    for record in records {
        if !seen.insert(record.segment_id.as_str()) {
            return Err(Error::Corpus(format!(
                "duplicate segment_id {}",
                record.segment_id
            )));
        }
        let line = serde_json::to_string(record)
            .map_err(|e| Error::Corpus(format!("serialization failed: {e}")))?;
        sink.write_all(line.as_bytes())
            .and_then(|()| sink.write_all(b"\n"))
            .map_err(|e| Error::Corpus(format!("write failed: {e}")))?;
    }
    Ok(records.len())
}

pub fn write_records_to_path(records: &[CorpusRecord], path: &Path) -> Result<usize> {
    if let Some(dir) = path.parent() {
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    }
    let mut file = std::io::BufWriter::new(
        std::fs::File::create(path).map_err(|e| Error::io(path, e))?,
    );
    let n = write_records(records, &mut file)?;
    file.flush().map_err(|e| Error::io(path, e))?;
    Ok(n)
}

/// Parses a JSONL corpus. Inverse of [`write_records`]: errors carry the
/// offending 1-based line number, duplicate segment ids are rejected, and
/// a non-empty input without a terminal newline counts as truncated.
pub fn read_corpus(text: &str) -> Result<Vec<CorpusRecord>> {
    if text.is_empty() {
        return Ok(Vec::new());
    }
    if !text.ends_with('\n') {
        return Err(Error::Corpus(
            "missing terminal newline; file appears truncated".into(),
        ));
    }
    let mut records = Vec::new();
    let mut seen = HashSet::new();
    for (i, line) in text.lines().enumerate() {
        let record: CorpusRecord = serde_json::from_str(line).map_err(|e| Error::CorpusLine {
            line: i + 1,
            msg: e.to_string(),
        })?;
        if !seen.insert(record.segment_id.clone()) {
            return Err(Error::CorpusLine {
                line: i + 1,
                msg: format!("duplicate segment_id {}", record.segment_id),
            });
        }
        records.push(record);
    }
    Ok(records)
}

pub fn read_corpus_path(path: &Path) -> Result<Vec<CorpusRecord>> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    read_corpus(&text)
}

/// `{root}/{parliament}/{period}/{session}.jsonl`
pub fn corpus_path(root: &Path, parliament: &str, period: u32, session: u32) -> PathBuf {
    root.join(parliament)
        .join(period.to_string())
        .join(format!("{session}.jsonl"))
}
