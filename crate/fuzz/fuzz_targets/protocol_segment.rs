#![no_main]
use std::sync::LazyLock;

use libfuzzer_sys::fuzz_target;

use plenum::metadata::{ParliamentId, PartyRecord, PartyRegistry, Roster, RosterEntry, SessionDates};
use plenum::patterns::PatternSet;
use plenum::segmenter::{self, RawDocument, SourceKind};

static ROSTER: LazyLock<Roster> = LazyLock::new(|| {
    let entry = |mp_id: &str, last: &str, party: &str| RosterEntry {
        mp_id: mp_id.into(),
        first_name: "Fuzz".into(),
        last_name: last.into(),
        birth_year: Some(1950),
        party: party.into(),
        constituency: String::new(),
        alignment: String::new(),
        wiki_url: String::new(),
        parliament: ParliamentId("NW".into()),
        period: 1,
    };
    Roster::new(vec![
        entry("m1", "Mustermann", "SPD"),
        entry("m2", "Meyer", "CDU"),
        entry("m3", "Schmidt-Berger", "FDP"),
    ])
});

static PARTIES: LazyLock<PartyRegistry> = LazyLock::new(|| {
    PartyRegistry::new(vec![
        PartyRecord {
            canonical_name: "SPD".into(),
            aliases: vec![],
            alignment: String::new(),
            successor: None,
        },
        PartyRecord {
            canonical_name: "CDU".into(),
            aliases: vec![],
            alignment: String::new(),
            successor: None,
        },
        PartyRecord {
            canonical_name: "FDP".into(),
            aliases: vec![],
            alignment: String::new(),
            successor: None,
        },
    ])
    .unwrap()
});

static PATTERNS: LazyLock<PatternSet> = LazyLock::new(PatternSet::default);

// Arbitrary text through boundary detection and speech splitting must
// never panic, and the splitter's partition invariants must hold.
fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    let lines: Vec<String> = text.lines().take(500).map(str::to_owned).collect();
    if lines.is_empty() {
        return;
    }
    let doc = RawDocument {
        parliament: ParliamentId("NW".into()),
        period: 1,
        session_numbers: vec![1],
        lines,
        source_kind: SourceKind::OcrText,
    };
    let scoped = ROSTER.scope(&doc.parliament, 1);
    let dates = SessionDates::default();

    for part in segmenter::split_multi_session(doc, &PATTERNS) {
        let body = segmenter::session_body(&part.lines, &PATTERNS);
        assert!(body.start_line < body.end_line && body.end_line <= part.lines.len());
        let segments =
            segmenter::split_speeches(&part, &body, &scoped, &PARTIES, &dates, &PATTERNS);

        // positions are consecutive from zero
        for (i, seg) in segments.iter().enumerate() {
            assert_eq!(seg.position, i);
        }
        // segments partition the body lines without gaps or overlaps
        let mut cursor = body.start_line;
        for seg in &segments {
            assert_eq!(seg.line_range.0, cursor);
            assert!(seg.line_range.1 > seg.line_range.0);
            cursor = seg.line_range.1;
        }
        if !segments.is_empty() {
            assert_eq!(cursor, body.end_line);
        }
        // lossless reconstruction
        let rebuilt = segmenter::reconstruct_body(&segments);
        let expected = part.lines[body.start_line..body.end_line].join("\n");
        assert_eq!(rebuilt, expected);
    }
});
