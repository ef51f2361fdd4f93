//! Session boundary detection and speech splitting.
//!
//! A protocol file carries a table of contents, the plenary session itself
//! and often an appendix. The session body is located via bracketed time
//! markers ("(Beginn: 10.02 Uhr)" / "(Ende: 18.47 Uhr)"), with greeting and
//! closing phrases as fallbacks and a fixed heuristic cut as the last
//! resort for bad scans. The body is then partitioned line by line into
//! chair statements, speeches and bracketed stenographer comments.
//!
//! Segments keep their source layout: `prefix` holds the verbatim speaker
//! header (or the opening bracket of a comment), `suffix` the closing
//! bracket, `text` everything in between. Concatenating
//! `prefix + text + suffix` over all segments and joining with single line
//! breaks reproduces the session body exactly; nothing is dropped.
//!
//! The body interval is half-open: the start marker line belongs to the
//! body (it becomes its first comment), the end marker line does not.

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};

use crate::metadata::{ParliamentId, PartyRegistry, ScopedRoster, SessionDates, SpeakerRef};
use crate::patterns::PatternSet;

/// How a protocol reached the pipeline; OCR output goes through spelling
/// correction, native text does not.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SourceKind {
    NativeText,
    OcrText,
}

/// One protocol file, already decoded to text lines.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RawDocument {
    pub parliament: ParliamentId,
    pub period: u32,
    /// Usually one; old scans sometimes bundle several sessions.
    pub session_numbers: Vec<u32>,
    pub lines: Vec<String>,
    pub source_kind: SourceKind,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum BoundaryMethod {
    StartMarker,
    GreetingPattern,
    EndMarker,
    ClosingPhrase,
    HeuristicCut,
}

impl BoundaryMethod {
    pub fn as_str(self) -> &'static str {
        match self {
            BoundaryMethod::StartMarker => "start_marker",
            BoundaryMethod::GreetingPattern => "greeting_pattern",
            BoundaryMethod::EndMarker => "end_marker",
            BoundaryMethod::ClosingPhrase => "closing_phrase",
            BoundaryMethod::HeuristicCut => "heuristic_cut",
        }
    }
}

/// Line interval `[start_line, end_line)` of the session body, together
/// with the method that fixed each bound.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SessionBody {
    pub start_line: usize,
    pub end_line: usize,
    pub start_method: BoundaryMethod,
    pub end_method: BoundaryMethod,
}

/// Fallback line budget cut off each end of an unmarked document.
const HEURISTIC_CUT_LINES: usize = 1000;

/// First line of the session body: the first start-marker line, else the
/// first greeting line, else a heuristic cut below the first quarter of
/// short documents.
pub fn find_session_start(lines: &[String], patterns: &PatternSet) -> (usize, BoundaryMethod) {
    if let Some(i) = lines.iter().position(|l| patterns.is_start_marker(l)) {
        return (i, BoundaryMethod::StartMarker);
    }
    if let Some(i) = lines.iter().position(|l| patterns.is_greeting(l)) {
        return (i, BoundaryMethod::GreetingPattern);
    }
    (
        HEURISTIC_CUT_LINES.min(lines.len() / 4),
        BoundaryMethod::HeuristicCut,
    )
}

/// Exclusive end of the session body: the last end-marker line after
/// `start`, else the last closing-phrase line, else everything but the
/// final 1000 lines. Never at or below `start`.
pub fn find_session_end(
    lines: &[String],
    start: usize,
    patterns: &PatternSet,
) -> (usize, BoundaryMethod) {
    for i in (start + 1..lines.len()).rev() {
        if patterns.is_end_marker(&lines[i]) {
            return (i, BoundaryMethod::EndMarker);
        }
    }
    for i in (start + 1..lines.len()).rev() {
        if patterns.is_closing_phrase(&lines[i]) {
            return (i, BoundaryMethod::ClosingPhrase);
        }
    }
    (
        (start + 1).max(lines.len().saturating_sub(HEURISTIC_CUT_LINES)),
        BoundaryMethod::HeuristicCut,
    )
}

pub fn session_body(lines: &[String], patterns: &PatternSet) -> SessionBody {
    let (start_line, start_method) = find_session_start(lines, patterns);
    let (end_line, end_method) = find_session_end(lines, start_line, patterns);
    SessionBody {
        start_line,
        end_line: end_line.min(lines.len()).max(start_line + 1),
        start_method,
        end_method,
    }
}

/// Splits a scan that bundles several sessions at every start marker after
/// the first. Session numbers are taken from the document when the counts
/// line up, otherwise numbered consecutively from the first.
pub fn split_multi_session(doc: RawDocument, patterns: &PatternSet) -> Vec<RawDocument> {
    let marks: Vec<usize> = doc
        .lines
        .iter()
        .enumerate()
        .filter(|(_, l)| patterns.is_start_marker(l))
        .map(|(i, _)| i)
        .collect();
    if marks.len() <= 1 {
        return vec![doc];
    }
    let mut bounds = vec![0usize];
    bounds.extend(&marks[1..]);
    bounds.push(doc.lines.len());

    let numbers: Vec<u32> = if doc.session_numbers.len() == bounds.len() - 1 {
        doc.session_numbers.clone()
    } else {
        let first = doc.session_numbers.first().copied().unwrap_or(1);
        (0..bounds.len() - 1).map(|i| first + i as u32).collect()
    };

    bounds
        .windows(2)
        .zip(numbers)
        .map(|(w, session)| RawDocument {
            parliament: doc.parliament.clone(),
            period: doc.period,
            session_numbers: vec![session],
            lines: doc.lines[w[0]..w[1]].to_vec(),
            source_kind: doc.source_kind,
        })
        .collect()
}

/// A recognized speaker header at the start of a line.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SpeakerLine {
    pub speaker: SpeakerRef,
    pub party_hint: Option<String>,
    /// Byte offset just past the colon; the speech text begins here.
    pub header_len: usize,
}

/// Longest plausible speaker header, in characters before the colon.
const MAX_HEADER_CHARS: usize = 80;

/// Matches `[role word] [titles] Surname [(Party)] ":"` at the start of a
/// line. Every word before the surname must come from the configured
/// role/title/chair vocabulary, which keeps ordinary sentences containing
/// colons from being taken for headers. The surname must resolve against
/// the roster unless the header names the session chair.
pub fn detect_speaker_line(
    line: &str,
    roster: &ScopedRoster<'_>,
    patterns: &PatternSet,
) -> Option<SpeakerLine> {
    let colon = line.find(':')?;
    let head = &line[..colon];
    if head.chars().count() > MAX_HEADER_CHARS {
        return None;
    }
    let head = head.trim();
    if head.is_empty() {
        return None;
    }

    // optional trailing "(Party)"
    let (name_part, party_hint) = match head.strip_suffix(')') {
        Some(before_close) => {
            let open = before_close.rfind('(')?;
            let hint = before_close[open + 1..].trim();
            if hint.is_empty() || hint.contains('(') {
                return None;
            }
            (before_close[..open].trim_end(), Some(hint.to_string()))
        }
        None => (head, None),
    };

    let words: Vec<&str> = name_part.split_whitespace().collect();
    let (&last_word, rest) = words.split_last()?;

    // a bare "Präsidentin:" header names the chair without a surname
    let bare_chair =
        rest.is_empty() && party_hint.is_none() && patterns.contains_chair_keyword(last_word);
    let (surname, prefix_words) = if bare_chair {
        ("", words.as_slice())
    } else {
        (last_word, rest)
    };

    for word in prefix_words {
        let allowed = patterns.role_words.iter().any(|r| r == word)
            || patterns.titles.iter().any(|t| t == word)
            || patterns.contains_chair_keyword(word);
        if !allowed {
            return None;
        }
    }
    if !bare_chair {
        let first = surname.chars().next()?;
        if !first.is_uppercase()
            || !surname
                .chars()
                .all(|c| c.is_alphabetic() || c == '-' || c == '\'')
        {
            return None;
        }
    }

    let title_prefix = prefix_words.join(" ");
    let speaker = roster.resolve_speaker(
        surname,
        party_hint.as_deref().unwrap_or(""),
        &title_prefix,
        &patterns.chair_keywords,
    );
    if speaker == SpeakerRef::Unknown {
        return None;
    }
    Some(SpeakerLine {
        speaker,
        party_hint,
        header_len: colon + 1,
    })
}

/// Longest line span a bracketed comment may cover; an unbalanced bracket
/// beyond this is treated as ordinary text.
pub const COMMENT_MAX_LINES: usize = 40;

/// A bracket-delimited stenographer comment, line-aligned in the source.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CommentSpan {
    pub start_line: usize,
    /// Inclusive index of the line holding the closing bracket.
    pub end_line: usize,
    /// Whitespace before the opening bracket, kept for reconstruction.
    pub leading: String,
    pub open: char,
    /// Verbatim text between the brackets, lines joined with `\n`.
    pub inner: String,
    pub close: char,
    /// Whitespace after the closing bracket.
    pub trailing: String,
    pub attributed_mps: Vec<String>,
    pub attributed_parties: Vec<String>,
    pub speaker: SpeakerRef,
}

/// Recognizes a comment starting at `cursor`, where the line's first
/// non-space character opens a round or square bracket. The span runs to
/// the matching close of the same family, at most [`COMMENT_MAX_LINES`]
/// lines away; the close must end its line. MP surnames inside resolve to
/// attributions, as do party names and aliases. A single attributed MP
/// becomes the comment's speaker, everything else stays unknown.
pub fn detect_comment(
    lines: &[String],
    cursor: usize,
    roster: &ScopedRoster<'_>,
    parties: &PartyRegistry,
) -> Option<CommentSpan> {
    let first = lines.get(cursor)?;
    let open_off = first.find(|c: char| !c.is_whitespace())?;
    let open = first[open_off..].chars().next()?;
    let close = match open {
        '(' => ')',
        '[' => ']',
        _ => return None,
    };

    let mut depth = 1usize;
    let mut found: Option<(usize, usize)> = None; // (line index, byte offset of close)
    'scan: for (line_idx, line) in lines
        .iter()
        .enumerate()
        .skip(cursor)
        .take(COMMENT_MAX_LINES.min(lines.len() - cursor))
    {
        let from = if line_idx == cursor { open_off + 1 } else { 0 };
        for (off, ch) in line[from..].char_indices() {
            if ch == open {
                depth += 1;
            } else if ch == close {
                depth -= 1;
                if depth == 0 {
                    found = Some((line_idx, from + off));
                    break 'scan;
                }
            }
        }
    }
    let (end_line, close_off) = found?;
    let close_rest = &lines[end_line][close_off + 1..];
    if !close_rest.trim().is_empty() {
        return None; // text after the close: not a line-aligned comment
    }

    let inner = if end_line == cursor {
        lines[cursor][open_off + 1..close_off].to_string()
    } else {
        let mut s = lines[cursor][open_off + 1..].to_string();
        for line in &lines[cursor + 1..end_line] {
            s.push('\n');
            s.push_str(line);
        }
        s.push('\n');
        s.push_str(&lines[end_line][..close_off]);
        s
    };

    let mut attributed_mps = Vec::new();
    for token in inner
        .split(|c: char| !(c.is_alphabetic() || c == '-'))
        .map(|t| t.trim_matches('-'))
        .filter(|t| !t.is_empty())
    {
        for entry in roster.matches(token) {
            attributed_mps.push(entry.mp_id.clone());
        }
    }
    attributed_mps.sort();
    attributed_mps.dedup();

    let mut attributed_parties = Vec::new();
    for record in parties.records() {
        let names = std::iter::once(&record.canonical_name).chain(&record.aliases);
        if names.into_iter().any(|n| contains_word(&inner, n)) {
            attributed_parties.push(record.canonical_name.clone());
        }
    }
    attributed_parties.sort();
    attributed_parties.dedup();

    let speaker = if attributed_mps.len() == 1 {
        SpeakerRef::Mp {
            mp_id: attributed_mps[0].clone(),
        }
    } else {
        SpeakerRef::Unknown
    };

    Some(CommentSpan {
        start_line: cursor,
        end_line,
        leading: first[..open_off].to_string(),
        open,
        inner,
        close,
        trailing: close_rest.to_string(),
        attributed_mps,
        attributed_parties,
        speaker,
    })
}

/// Substring match with non-alphanumeric (or string-edge) boundaries on
/// both sides; handles multi-word party names.
fn contains_word(haystack: &str, needle: &str) -> bool {
    if needle.is_empty() {
        return false;
    }
    let mut start = 0;
    while let Some(pos) = haystack[start..].find(needle) {
        let at = start + pos;
        let end = at + needle.len();
        let before_ok = haystack[..at]
            .chars()
            .next_back()
            .is_none_or(|c| !c.is_alphanumeric());
        let after_ok = haystack[end..]
            .chars()
            .next()
            .is_none_or(|c| !c.is_alphanumeric());
        if before_ok && after_ok {
            return true;
        }
        start = end.max(start + 1);
    }
    false
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub enum SegmentKind {
    Speech,
    ChairSpeech,
    Comment,
}

/// The atomic corpus unit: one chair statement, speech or comment.
///
/// `prefix`/`text`/`suffix` partition the verbatim source span (see the
/// module docs), `line_range` is the half-open interval of document lines
/// the segment came from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Segment {
    pub parliament: ParliamentId,
    pub period: u32,
    pub session: u32,
    pub kind: SegmentKind,
    pub speaker: SpeakerRef,
    /// Canonical party of the resolved speaker, if any.
    pub party: Option<String>,
    pub prefix: String,
    pub text: String,
    pub suffix: String,
    /// 0-based ordinal within the session.
    pub position: usize,
    pub line_range: (usize, usize),
    pub date: Option<NaiveDate>,
    pub estimated_date: bool,
    pub attributed_mps: Vec<String>,
    pub attributed_parties: Vec<String>,
}

impl Segment {
    /// Deterministic corpus-wide identifier.
    pub fn id(&self) -> String {
        format!(
            "{}-{}-{}-{}",
            self.parliament, self.period, self.session, self.position
        )
    }
}

/// Splits the session body into segments by a single linear scan.
///
/// Every speaker header opens a new speech or chair statement; every
/// bracketed comment becomes its own segment, and the interrupted speech
/// resumes afterwards as a separate segment with the same speaker. Body
/// text before the first header is kept as a chair statement with an
/// unresolved chair, so no line is lost.
pub fn split_speeches(
    doc: &RawDocument,
    body: &SessionBody,
    roster: &ScopedRoster<'_>,
    parties: &PartyRegistry,
    dates: &SessionDates,
    patterns: &PatternSet,
) -> Vec<Segment> {
    let session = doc.session_numbers.first().copied().unwrap_or(0);
    let (date, estimated_date) = match dates.lookup(&doc.parliament, doc.period, session) {
        Some((d, e)) => (Some(d), e),
        None => (None, false),
    };

    struct Pending {
        kind: SegmentKind,
        speaker: SpeakerRef,
        party: Option<String>,
        prefix: String,
        text: String,
        first_line: usize,
    }

    let blank_segment = |position: usize| Segment {
        parliament: doc.parliament.clone(),
        period: doc.period,
        session,
        kind: SegmentKind::Comment,
        speaker: SpeakerRef::Unknown,
        party: None,
        prefix: String::new(),
        text: String::new(),
        suffix: String::new(),
        position,
        line_range: (0, 0),
        date,
        estimated_date,
        attributed_mps: Vec::new(),
        attributed_parties: Vec::new(),
    };

    let flush = |pending: &mut Option<Pending>, segments: &mut Vec<Segment>, end: usize| {
        if let Some(p) = pending.take() {
            let mut seg = blank_segment(segments.len());
            seg.kind = p.kind;
            seg.speaker = p.speaker;
            seg.party = p.party;
            seg.prefix = p.prefix;
            seg.text = p.text;
            seg.line_range = (p.first_line, end);
            segments.push(seg);
        }
    };

    let mut segments: Vec<Segment> = Vec::new();
    let mut pending: Option<Pending> = None;
    // (kind, speaker, party) of the turn to resume after a comment; before
    // the first header this is the unresolved session chair.
    let mut turn: (SegmentKind, SpeakerRef, Option<String>) = (
        SegmentKind::ChairSpeech,
        SpeakerRef::Chair { mp_id: None },
        None,
    );

    let end_line = body.end_line.min(doc.lines.len());
    let mut i = body.start_line;
    while i < end_line {
        let line = &doc.lines[i];
        if matches!(line.trim_start().chars().next(), Some('(') | Some('[')) {
            if let Some(span) = detect_comment(&doc.lines[..end_line], i, roster, parties) {
                flush(&mut pending, &mut segments, i);
                let mut seg = blank_segment(segments.len());
                seg.kind = SegmentKind::Comment;
                seg.speaker = span.speaker;
                seg.prefix = format!("{}{}", span.leading, span.open);
                seg.text = span.inner;
                seg.suffix = format!("{}{}", span.close, span.trailing);
                seg.line_range = (span.start_line, span.end_line + 1);
                seg.attributed_mps = span.attributed_mps;
                seg.attributed_parties = span.attributed_parties;
                segments.push(seg);
                i = span.end_line + 1;
                continue;
            }
        }
        if let Some(header) = detect_speaker_line(line, roster, patterns) {
            flush(&mut pending, &mut segments, i);
            let kind = if header.speaker.is_chair() {
                SegmentKind::ChairSpeech
            } else {
                SegmentKind::Speech
            };
            let party = speaker_party(&header.speaker, roster, parties);
            turn = (kind, header.speaker.clone(), party.clone());
            pending = Some(Pending {
                kind,
                speaker: header.speaker,
                party,
                prefix: line[..header.header_len].to_string(),
                text: line[header.header_len..].to_string(),
                first_line: i,
            });
            i += 1;
            continue;
        }
        match &mut pending {
            Some(p) => {
                p.text.push('\n');
                p.text.push_str(line);
            }
            None => {
                pending = Some(Pending {
                    kind: turn.0,
                    speaker: turn.1.clone(),
                    party: turn.2.clone(),
                    prefix: String::new(),
                    text: line.clone(),
                    first_line: i,
                });
            }
        }
        i += 1;
    }
    flush(&mut pending, &mut segments, end_line);
    segments
}

fn speaker_party(
    speaker: &SpeakerRef,
    roster: &ScopedRoster<'_>,
    parties: &PartyRegistry,
) -> Option<String> {
    let mp_id = speaker.mp_id()?;
    let entry = roster.by_id(mp_id)?;
    if entry.party.trim().is_empty() {
        return None;
    }
    Some(parties.canonical_or_self(&entry.party).to_string())
}

/// Rebuilds the session body from segments; inverse of [`split_speeches`]
/// up to joining lines with `\n`.
pub fn reconstruct_body(segments: &[Segment]) -> String {
    let mut out = String::new();
    for (i, seg) in segments.iter().enumerate() {
        if i > 0 {
            out.push('\n');
        }
        out.push_str(&seg.prefix);
        out.push_str(&seg.text);
        out.push_str(&seg.suffix);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metadata::{Roster, RosterEntry};

    fn entry(mp_id: &str, first: &str, last: &str, party: &str) -> RosterEntry {
        RosterEntry {
            mp_id: mp_id.into(),
            first_name: first.into(),
            last_name: last.into(),
            birth_year: Some(1950),
            party: party.into(),
            constituency: String::new(),
            alignment: String::new(),
            wiki_url: String::new(),
            parliament: ParliamentId("NW".into()),
            period: 7,
        }
    }

    fn test_roster() -> Roster {
        Roster::new(vec![
            entry("m1", "Max", "Mustermann", "SPD"),
            entry("m2", "Hans", "Meyer", "CDU"),
            entry("m3", "Grete", "Lindemann", "FDP"),
            entry("m4", "Karl", "Muster", "SPD"),
        ])
    }

    fn test_parties() -> PartyRegistry {
        PartyRegistry::new(vec![
            crate::metadata::PartyRecord {
                canonical_name: "SPD".into(),
                aliases: vec![],
                alignment: "social democratic".into(),
                successor: None,
            },
            crate::metadata::PartyRecord {
                canonical_name: "CDU".into(),
                aliases: vec![],
                alignment: "conservative".into(),
                successor: None,
            },
            crate::metadata::PartyRecord {
                canonical_name: "FDP".into(),
                aliases: vec![],
                alignment: "liberal".into(),
                successor: None,
            },
        ])
        .unwrap()
    }

    fn lines(texts: &[&str]) -> Vec<String> {
        texts.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn start_marker_found_at_its_line() {
        let p = PatternSet::default();
        let mut doc = vec!["Inhalt".to_string(); 300];
        doc[214] = "(Beginn: 10.02 Uhr)".into();
        assert_eq!(
            find_session_start(&doc, &p),
            (214, BoundaryMethod::StartMarker)
        );
    }

    #[test]
    fn ocr_confused_start_marker_still_fires() {
        let p = PatternSet::default();
        let mut doc = vec!["Inhalt".to_string(); 50];
        doc[12] = "(ßeginn: 10.02 Uhr)".into();
        assert_eq!(
            find_session_start(&doc, &p),
            (12, BoundaryMethod::StartMarker)
        );
    }

    #[test]
    fn greeting_is_the_fallback_start() {
        let p = PatternSet::default();
        let mut doc = vec!["Punkt 1".to_string(); 40];
        doc[7] = "Meine sehr verehrten Damen und Herren! Ich eröffne die Sitzung.".into();
        assert_eq!(
            find_session_start(&doc, &p),
            (7, BoundaryMethod::GreetingPattern)
        );
    }

    #[test]
    fn heuristic_start_cut() {
        let p = PatternSet::default();
        let doc = vec!["x".to_string(); 8000];
        assert_eq!(
            find_session_start(&doc, &p),
            (1000, BoundaryMethod::HeuristicCut)
        );
        // short documents cut a quarter, not a flat thousand
        let short = vec!["x".to_string(); 100];
        assert_eq!(
            find_session_start(&short, &p),
            (25, BoundaryMethod::HeuristicCut)
        );
    }

    #[test]
    fn end_marker_and_fallbacks() {
        let p = PatternSet::default();
        let mut doc = vec!["Rede".to_string(); 6000];
        doc[5210] = "(Ende: 18.47 Uhr)".into();
        assert_eq!(
            find_session_end(&doc, 100, &p),
            (5210, BoundaryMethod::EndMarker)
        );

        let mut doc = vec!["Rede".to_string(); 600];
        doc[420] = "Ich schließe damit die Sitzung.".into();
        assert_eq!(
            find_session_end(&doc, 100, &p),
            (420, BoundaryMethod::ClosingPhrase)
        );

        let doc = vec!["Rede".to_string(); 8000];
        assert_eq!(
            find_session_end(&doc, 1000, &p),
            (7000, BoundaryMethod::HeuristicCut)
        );
    }

    #[test]
    fn multi_session_scans_split_at_later_markers() {
        let p = PatternSet::default();
        let mut text = vec!["Inhalt".to_string(); 10];
        text[2] = "(Beginn: 9.00 Uhr)".into();
        text[6] = "(Beginn: 14.00 Uhr)".into();
        let doc = RawDocument {
            parliament: ParliamentId("NW".into()),
            period: 3,
            session_numbers: vec![41],
            lines: text,
            source_kind: SourceKind::OcrText,
        };
        let parts = split_multi_session(doc, &p);
        assert_eq!(parts.len(), 2);
        assert_eq!(parts[0].lines.len(), 6);
        assert_eq!(parts[1].lines[0], "(Beginn: 14.00 Uhr)");
        assert_eq!(parts[0].session_numbers, vec![41]);
        assert_eq!(parts[1].session_numbers, vec![42]);
    }

    #[test]
    fn single_session_documents_pass_through() {
        let p = PatternSet::default();
        let mk = |marker: bool| {
            let mut text = vec!["Zeile".to_string(); 5];
            if marker {
                text[1] = "(Beginn: 9.00 Uhr)".into();
            }
            RawDocument {
                parliament: ParliamentId("NW".into()),
                period: 3,
                session_numbers: vec![41],
                lines: text,
                source_kind: SourceKind::NativeText,
            }
        };
        assert_eq!(split_multi_session(mk(true), &p).len(), 1);
        assert_eq!(split_multi_session(mk(false), &p).len(), 1);
    }

    #[test]
    fn speaker_lines_with_party_role_and_chair() {
        let roster = test_roster();
        let scoped = roster.scope(&ParliamentId("NW".into()), 7);
        let p = PatternSet::default();

        let l = detect_speaker_line("Mustermann (SPD): Meine Damen und Herren,", &scoped, &p)
            .expect("party header");
        assert_eq!(l.speaker, SpeakerRef::Mp { mp_id: "m1".into() });
        assert_eq!(l.party_hint.as_deref(), Some("SPD"));
        assert_eq!(l.header_len, "Mustermann (SPD):".len());

        let l = detect_speaker_line("Abgeordneter Dr. Mustermann: Ich widerspreche.", &scoped, &p)
            .expect("role header");
        assert_eq!(l.speaker, SpeakerRef::Mp { mp_id: "m1".into() });

        let l = detect_speaker_line(
            "Präsidentin Muster: Wir treten in die Tagesordnung ein.",
            &scoped,
            &p,
        )
        .expect("chair header");
        assert_eq!(
            l.speaker,
            SpeakerRef::Chair {
                mp_id: Some("m4".into())
            }
        );

        let l = detect_speaker_line("Präsident: Das Wort hat Herr Meyer.", &scoped, &p)
            .expect("bare chair header");
        assert_eq!(l.speaker, SpeakerRef::Chair { mp_id: None });
    }

    #[test]
    fn ordinary_sentences_are_not_headers() {
        let roster = test_roster();
        let scoped = roster.scope(&ParliamentId("NW".into()), 7);
        let p = PatternSet::default();
        for line in [
            "Der Haushalt 1971: eine Bilanz.",     // unknown prefix word
            "Er sagte zu Mustermann: kommen Sie.", // mid-sentence colon
            "Niemand: spricht hier.",              // not in the roster
            "mustermann (SPD): kleingeschrieben.", // lowercase surname
            "Ohne Doppelpunkt bleibt es Redetext", // no colon
        ] {
            assert_eq!(detect_speaker_line(line, &scoped, &p), None, "{line}");
        }
    }

    #[test]
    fn comment_attribution_variants() {
        let roster = test_roster();
        let scoped = roster.scope(&ParliamentId("NW".into()), 7);
        let parties = test_parties();

        let l = lines(&["(Beifall bei der SPD)"]);
        let c = detect_comment(&l, 0, &scoped, &parties).unwrap();
        assert_eq!(c.attributed_parties, vec!["SPD".to_string()]);
        assert!(c.attributed_mps.is_empty());
        assert_eq!(c.speaker, SpeakerRef::Unknown);
        assert_eq!(c.inner, "Beifall bei der SPD");

        let l = lines(&["(Zuruf des Abg. Mustermann)"]);
        let c = detect_comment(&l, 0, &scoped, &parties).unwrap();
        assert_eq!(c.attributed_mps, vec!["m1".to_string()]);
        assert_eq!(c.speaker, SpeakerRef::Mp { mp_id: "m1".into() });

        let l = lines(&["(Heiterkeit)"]);
        let c = detect_comment(&l, 0, &scoped, &parties).unwrap();
        assert!(c.attributed_mps.is_empty() && c.attributed_parties.is_empty());
        assert_eq!(c.speaker, SpeakerRef::Unknown);
    }

    #[test]
    fn comment_spans_lines_and_respects_the_cap() {
        let roster = test_roster();
        let scoped = roster.scope(&ParliamentId("NW".into()), 7);
        let parties = test_parties();

        let l = lines(&[
            "  (Beifall bei der SPD und bei",
            "   Abgeordneten der CDU)  ",
        ]);
        let c = detect_comment(&l, 0, &scoped, &parties).unwrap();
        assert_eq!(c.end_line, 1);
        assert_eq!(c.leading, "  ");
        assert_eq!(c.trailing, "  ");
        assert_eq!(
            c.attributed_parties,
            vec!["CDU".to_string(), "SPD".to_string()]
        );

        // unbalanced bracket within the window: ordinary text
        let mut unbalanced = vec!["(Beifall".to_string()];
        unbalanced.extend(vec!["weiter".to_string(); 60]);
        assert_eq!(detect_comment(&unbalanced, 0, &scoped, &parties), None);

        // close just beyond the 40-line cap
        let mut capped = vec!["(Beifall".to_string()];
        capped.extend(vec!["x".to_string(); 40]);
        capped.push(")".to_string());
        assert_eq!(detect_comment(&capped, 0, &scoped, &parties), None);

        // trailing text after the close disqualifies the span
        let l = lines(&["(Beifall) sagte er."]);
        assert_eq!(detect_comment(&l, 0, &scoped, &parties), None);

        // nested same-family brackets stay inside one comment
        let l = lines(&["(Beifall (vereinzelt) bei der FDP)"]);
        let c = detect_comment(&l, 0, &scoped, &parties).unwrap();
        assert_eq!(c.inner, "Beifall (vereinzelt) bei der FDP");
    }

    fn doc(lines_in: &[&str]) -> RawDocument {
        RawDocument {
            parliament: ParliamentId("NW".into()),
            period: 7,
            session_numbers: vec![44],
            lines: lines(lines_in),
            source_kind: SourceKind::NativeText,
        }
    }

    #[test]
    fn interruption_splits_a_speech_in_two() {
        let roster = test_roster();
        let scoped = roster.scope(&ParliamentId("NW".into()), 7);
        let parties = test_parties();
        let dates = SessionDates::default();
        let p = PatternSet::default();

        let d = doc(&[
            "(Beginn: 10.02 Uhr)",
            "Präsident: Ich eröffne die Sitzung. Das Wort hat Herr Mustermann.",
            "Mustermann (SPD): Meine Damen und Herren, wir stehen vor großen Aufgaben.",
            "Die Landesregierung hat geliefert.",
            "(Beifall bei der SPD)",
            "Und wir werden weiter liefern.",
        ]);
        let body = SessionBody {
            start_line: 0,
            end_line: d.lines.len(),
            start_method: BoundaryMethod::StartMarker,
            end_method: BoundaryMethod::HeuristicCut,
        };
        let segs = split_speeches(&d, &body, &scoped, &parties, &dates, &p);
        let kinds: Vec<SegmentKind> = segs.iter().map(|s| s.kind).collect();
        assert_eq!(
            kinds,
            vec![
                SegmentKind::Comment,
                SegmentKind::ChairSpeech,
                SegmentKind::Speech,
                SegmentKind::Comment,
                SegmentKind::Speech,
            ]
        );
        // interrupted speech resumes with the same speaker
        assert_eq!(segs[2].speaker, segs[4].speaker);
        assert_eq!(segs[2].speaker, SpeakerRef::Mp { mp_id: "m1".into() });
        assert_eq!(segs[2].party.as_deref(), Some("SPD"));
        let positions: Vec<usize> = segs.iter().map(|s| s.position).collect();
        assert_eq!(positions, vec![0, 1, 2, 3, 4]);
        assert_eq!(segs[0].id(), "NW-7-44-0");

        // lossless reconstruction of the body
        assert_eq!(reconstruct_body(&segs), d.lines.join("\n"));
    }

    #[test]
    fn two_speakers_without_comments() {
        let roster = test_roster();
        let scoped = roster.scope(&ParliamentId("NW".into()), 7);
        let parties = test_parties();
        let dates = SessionDates::default();
        let p = PatternSet::default();

        let d = doc(&[
            "Präsident: Ich eröffne die Sitzung.",
            "Mustermann (SPD): Erste Rede.",
            "Meyer (CDU): Zweite Rede.",
        ]);
        let body = SessionBody {
            start_line: 0,
            end_line: 3,
            start_method: BoundaryMethod::GreetingPattern,
            end_method: BoundaryMethod::HeuristicCut,
        };
        let segs = split_speeches(&d, &body, &scoped, &parties, &dates, &p);
        assert_eq!(segs.len(), 3);
        assert_eq!(segs[0].kind, SegmentKind::ChairSpeech);
        assert_eq!(segs[1].kind, SegmentKind::Speech);
        assert_eq!(segs[2].kind, SegmentKind::Speech);
        assert_eq!(segs[2].party.as_deref(), Some("CDU"));
        assert_eq!(reconstruct_body(&segs), d.lines.join("\n"));
    }

    #[test]
    fn leading_text_becomes_unknown_chair() {
        let roster = test_roster();
        let scoped = roster.scope(&ParliamentId("NW".into()), 7);
        let parties = test_parties();
        let dates = SessionDates::default();
        let p = PatternSet::default();

        let d = doc(&[
            "Meine sehr verehrten Damen und Herren!",
            "Ich eröffne die 44. Sitzung.",
            "Mustermann (SPD): Zur Sache.",
        ]);
        let body = SessionBody {
            start_line: 0,
            end_line: 3,
            start_method: BoundaryMethod::GreetingPattern,
            end_method: BoundaryMethod::HeuristicCut,
        };
        let segs = split_speeches(&d, &body, &scoped, &parties, &dates, &p);
        assert_eq!(segs[0].kind, SegmentKind::ChairSpeech);
        assert_eq!(segs[0].speaker, SpeakerRef::Chair { mp_id: None });
        assert_eq!(segs[0].line_range, (0, 2));
        assert_eq!(reconstruct_body(&segs), d.lines.join("\n"));
    }

    #[test]
    fn empty_body_yields_no_segments() {
        let roster = test_roster();
        let scoped = roster.scope(&ParliamentId("NW".into()), 7);
        let parties = test_parties();
        let dates = SessionDates::default();
        let p = PatternSet::default();
        let d = doc(&["a", "b"]);
        let body = SessionBody {
            start_line: 2,
            end_line: 2,
            start_method: BoundaryMethod::HeuristicCut,
            end_method: BoundaryMethod::HeuristicCut,
        };
        assert!(split_speeches(&d, &body, &scoped, &parties, &dates, &p).is_empty());
    }

    #[test]
    fn comments_never_cross_the_body_end() {
        let roster = test_roster();
        let scoped = roster.scope(&ParliamentId("NW".into()), 7);
        let parties = test_parties();
        let dates = SessionDates::default();
        let p = PatternSet::default();

        // the close lies beyond the body: treat the bracket as plain text
        let d = doc(&["Mustermann (SPD): Rede.", "(Beifall", "fortgesetzt)"]);
        let body = SessionBody {
            start_line: 0,
            end_line: 2,
            start_method: BoundaryMethod::GreetingPattern,
            end_method: BoundaryMethod::HeuristicCut,
        };
        let segs = split_speeches(&d, &body, &scoped, &parties, &dates, &p);
        assert_eq!(segs.len(), 1);
        assert_eq!(segs[0].kind, SegmentKind::Speech);
        assert_eq!(
            reconstruct_body(&segs),
            d.lines[..2].join("\n"),
            "body lines 0..2 must be covered exactly"
        );
    }
}
