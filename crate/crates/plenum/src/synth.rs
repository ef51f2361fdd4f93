//! Deterministic synthetic protocol generator.
//!
//! Real protocol collections cannot ship with the code, so tests and
//! benchmarks run against generated ones: randomized speaker turns, chair
//! interleavings and bracketed comments, produced together with the exact
//! segment list the splitter is expected to emit. Everything is seeded;
//! the same seed always yields the same fixture.

use chrono::NaiveDate;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use crate::metadata::{
    ParliamentId, PartyRecord, Roster, RosterEntry, SessionDateRecord, SpeakerRef,
};
use crate::segmenter::{
    BoundaryMethod, RawDocument, Segment, SegmentKind, SessionBody, SourceKind,
};

const SURNAME_HEADS: [&str; 12] = [
    "Berg", "Hof", "Stein", "Feld", "Wald", "Bach", "Lang", "Krau", "Eber", "Rosen", "Linden",
    "Oster",
];
const SURNAME_TAILS: [&str; 10] = [
    "mann", "ling", "hardt", "meier", "kamp", "horst", "feld", "brink", "haus", "witz",
];
const FIRST_NAMES: [&str; 10] = [
    "Anna", "Bruno", "Clara", "Dieter", "Elke", "Franz", "Gerda", "Heinz", "Ilse", "Jakob",
];
/// Speech filler; all lowercase so none of it collides with surnames or
/// party names during attribution scans.
const VOCAB: [&str; 24] = [
    "wir", "müssen", "die", "haushaltslage", "verbessern", "und", "den", "ländlichen", "raum",
    "stärken", "dafür", "braucht", "es", "mut", "sowie", "einen", "klaren", "plan", "der",
    "allen", "bürgern", "zugute", "kommt", "heute",
];

/// Parties available to generated rosters; includes a successor chain so
/// merged counting can be exercised.
pub fn synth_parties() -> Vec<PartyRecord> {
    let mk = |name: &str, aliases: &[&str], alignment: &str, successor: Option<&str>| PartyRecord {
        canonical_name: name.into(),
        aliases: aliases.iter().map(|s| s.to_string()).collect(),
        alignment: alignment.into(),
        successor: successor.map(str::to_owned),
    };
    vec![
        mk("SPD", &[], "social democratic", None),
        mk("CDU", &[], "conservative", None),
        mk("FDP", &[], "liberal", None),
        mk("GRÜNE", &["Die Grünen"], "green", None),
        mk("SED", &[], "socialist", Some("PDS")),
        mk("PDS", &[], "left", Some("Die Linke")),
        mk("Die Linke", &["Linke"], "left", None),
    ]
}

/// Shared metadata for a generated collection.
#[derive(Debug, Clone)]
pub struct SynthWorld {
    pub roster: Roster,
    pub parties: Vec<PartyRecord>,
    pub session_dates: Vec<SessionDateRecord>,
}

/// Expected splitter output for one generated document.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TruthSegment {
    pub kind: SegmentKind,
    pub speaker: SpeakerRef,
    pub party: Option<String>,
    pub position: usize,
    pub line_range: (usize, usize),
}

#[derive(Debug, Clone)]
pub struct SynthProtocol {
    pub doc: RawDocument,
    /// Expected session body interval and boundary methods.
    pub body: SessionBody,
    pub truth: Vec<TruthSegment>,
}

/// Boundary decoration of a generated document.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundaryStyle {
    /// Both "(Beginn: ...)" and "(Ende: ...)" markers present.
    Marked,
    /// Start marker with the B-as-ß OCR confusion, end marker intact.
    OcrConfusedStart,
    /// No end marker; the chair's closing phrase ends the session.
    ClosingPhraseEnd,
    /// Neither end marker nor closing phrase. The appendix is padded to
    /// exactly 1000 lines so the heuristic cut lands on the true body end.
    HeuristicEnd,
}

#[derive(Debug, Clone)]
pub struct SynthConfig {
    pub parliament: String,
    pub period: u32,
    pub session: u32,
    /// Speaker turns to generate (chair interleavings come on top).
    pub turns: usize,
    pub seed: u64,
    pub boundary: BoundaryStyle,
    pub source_kind: SourceKind,
}

impl Default for SynthConfig {
    fn default() -> Self {
        SynthConfig {
            parliament: "NW".into(),
            period: 7,
            session: 1,
            turns: 50,
            seed: 0,
            boundary: BoundaryStyle::Marked,
            source_kind: SourceKind::NativeText,
        }
    }
}

/// Builds the shared metadata for a set of parliaments: `mps_per_scope`
/// members per (parliament, period), the first acting as session chair,
/// plus dated sessions `1..=sessions`.
pub fn synth_world(
    parliaments: &[(&str, u32)],
    mps_per_scope: usize,
    sessions: u32,
    seed: u64,
) -> SynthWorld {
    let mut rng = StdRng::seed_from_u64(seed);
    let parties = synth_parties();
    let mut entries = Vec::new();
    let mut dates = Vec::new();
    for (parliament, period) in parliaments {
        let mut used_names = std::collections::HashSet::new();
        for i in 0..mps_per_scope {
            let last_name = loop {
                let head = SURNAME_HEADS[rng.gen_range(0..SURNAME_HEADS.len())];
                let tail = SURNAME_TAILS[rng.gen_range(0..SURNAME_TAILS.len())];
                let name = format!("{head}{tail}");
                if used_names.insert(name.clone()) {
                    break name;
                }
            };
            let party = &parties[rng.gen_range(0..parties.len())];
            entries.push(RosterEntry {
                mp_id: format!("{parliament}-{period}-{i:03}"),
                first_name: FIRST_NAMES[rng.gen_range(0..FIRST_NAMES.len())].to_string(),
                last_name,
                birth_year: Some(rng.gen_range(1920..1980)),
                party: party.canonical_name.clone(),
                constituency: format!("Wahlkreis {}", i + 1),
                alignment: party.alignment.clone(),
                wiki_url: String::new(),
                parliament: ParliamentId(parliament.to_string()),
                period: *period,
            });
        }
        let base = NaiveDate::from_ymd_opt(1950 + *period as i32, 1, 10).unwrap();
        for session in 1..=sessions {
            dates.push(SessionDateRecord {
                parliament: ParliamentId(parliament.to_string()),
                period: *period,
                session,
                date: base + chrono::Duration::days(i64::from(session) * 11),
                estimated: session % 5 == 0,
            });
        }
    }
    SynthWorld {
        roster: Roster::new(entries),
        parties,
        session_dates: dates,
    }
}

/// Collects body lines and the matching truth segments as they are laid
/// down; line ranges are body-relative until the preamble offset is known.
struct Emitter {
    lines: Vec<String>,
    truth: Vec<TruthSegment>,
}

impl Emitter {
    fn push_segment(
        &mut self,
        kind: SegmentKind,
        speaker: SpeakerRef,
        party: Option<String>,
        lines: Vec<String>,
    ) {
        let start = self.lines.len();
        self.lines.extend(lines);
        self.truth.push(TruthSegment {
            kind,
            speaker,
            party,
            position: self.truth.len(),
            line_range: (start, self.lines.len()),
        });
    }
}

/// Generates one protocol document together with its expected segments.
pub fn synth_protocol(world: &SynthWorld, config: &SynthConfig) -> SynthProtocol {
    let mut rng = StdRng::seed_from_u64(config.seed.wrapping_mul(0x9e37_79b9).wrapping_add(1));
    let parliament = ParliamentId(config.parliament.clone());
    let scoped: Vec<&RosterEntry> = world
        .roster
        .entries()
        .iter()
        .filter(|e| e.parliament == parliament && e.period == config.period)
        .collect();
    assert!(
        scoped.len() >= 2,
        "world holds no roster for {} period {}",
        config.parliament,
        config.period
    );
    let chair = scoped[0];
    let speakers = &scoped[1..];

    let canonical_party = |raw: &str| -> Option<String> {
        world
            .parties
            .iter()
            .find(|p| p.canonical_name == raw)
            .map(|p| p.canonical_name.clone())
    };

    fn sentence(rng: &mut StdRng, words: usize) -> String {
        let mut parts = Vec::with_capacity(words);
        for _ in 0..words {
            parts.push(VOCAB[rng.gen_range(0..VOCAB.len())]);
        }
        let mut s = parts.join(" ");
        s.push('.');
        s
    }

    // preamble: table-of-contents noise outside the session body
    let mut preamble = vec![
        format!("Landtag {}", config.parliament),
        format!("{}. Wahlperiode", config.period),
        format!("Drucksache {}/{}", config.period, rng.gen_range(100..999)),
        "Tagesordnung".to_string(),
    ];
    for i in 0..rng.gen_range(1usize..6) {
        preamble.push(format!("Punkt {}. Beratung des Gesetzentwurfs", i + 1));
    }

    let mut em = Emitter {
        lines: Vec::new(),
        truth: Vec::new(),
    };

    // the start marker opens the body and becomes its first comment
    let beginn_word = match config.boundary {
        BoundaryStyle::OcrConfusedStart => "ßeginn",
        _ => "Beginn",
    };
    em.push_segment(
        SegmentKind::Comment,
        SpeakerRef::Unknown,
        None,
        vec![format!(
            "({beginn_word}: {}.0{} Uhr)",
            rng.gen_range(9..11),
            rng.gen_range(0..6)
        )],
    );

    let chair_speaker = SpeakerRef::Chair {
        mp_id: Some(chair.mp_id.clone()),
    };
    let chair_party = canonical_party(&chair.party);
    let chair_title = if rng.gen_bool(0.5) {
        "Präsident"
    } else {
        "Präsidentin"
    };

    em.push_segment(
        SegmentKind::ChairSpeech,
        chair_speaker.clone(),
        chair_party.clone(),
        vec![
            format!(
                "{chair_title} {}: Meine sehr verehrten Damen und Herren! Ich eröffne die {}. Sitzung.",
                chair.last_name, config.session
            ),
            sentence(&mut rng, 8),
        ],
    );

    let comment_into = |em: &mut Emitter, rng: &mut StdRng| {
        let (lines, mps, parties_attr) = synth_comment(world, speakers, rng);
        let speaker = if mps.len() == 1 {
            SpeakerRef::Mp {
                mp_id: mps[0].clone(),
            }
        } else {
            SpeakerRef::Unknown
        };
        let start = em.lines.len();
        em.lines.extend(lines);
        em.truth.push(TruthSegment {
            kind: SegmentKind::Comment,
            speaker,
            party: None,
            position: em.truth.len(),
            line_range: (start, em.lines.len()),
        });
        (mps, parties_attr)
    };

    for _ in 0..config.turns {
        let speaker = speakers[rng.gen_range(0..speakers.len())];
        let speaker_ref = SpeakerRef::Mp {
            mp_id: speaker.mp_id.clone(),
        };
        let party = canonical_party(&speaker.party);

        // the chair hands over the floor every few turns
        if rng.gen_bool(0.4) {
            em.push_segment(
                SegmentKind::ChairSpeech,
                chair_speaker.clone(),
                chair_party.clone(),
                vec![format!(
                    "{chair_title} {}: Das Wort hat die Abgeordnete {}.",
                    chair.last_name, speaker.last_name
                )],
            );
        }

        let header = match rng.gen_range(0..3) {
            0 => format!(
                "{} ({}): {}",
                speaker.last_name,
                speaker.party,
                sentence(&mut rng, 6)
            ),
            1 => format!(
                "Abgeordneter Dr. {}: {}",
                speaker.last_name,
                sentence(&mut rng, 6)
            ),
            _ => format!("Abgeordnete {}: {}", speaker.last_name, sentence(&mut rng, 6)),
        };
        let mut body: Vec<String> = vec![header];
        for _ in 0..rng.gen_range(1usize..4) {
            let words = rng.gen_range(5..11);
            body.push(sentence(&mut rng, words));
        }

        if rng.gen_bool(0.5) {
            // interruption: speech, comment, resumed speech by the same MP
            em.push_segment(SegmentKind::Speech, speaker_ref.clone(), party.clone(), body);
            comment_into(&mut em, &mut rng);
            let mut resumed = Vec::new();
            for _ in 0..rng.gen_range(1usize..3) {
                let words = rng.gen_range(5..10);
                resumed.push(sentence(&mut rng, words));
            }
            em.push_segment(SegmentKind::Speech, speaker_ref, party, resumed);
        } else {
            em.push_segment(SegmentKind::Speech, speaker_ref, party, body);
            if rng.gen_bool(0.2) {
                // free-standing comment between two turns
                comment_into(&mut em, &mut rng);
            }
        }
    }

    // closing: for marked documents the phrase sits inside the body; when
    // the phrase itself is the boundary it must stay outside (the end
    // index is exclusive)
    if !matches!(config.boundary, BoundaryStyle::ClosingPhraseEnd) {
        let text = if matches!(config.boundary, BoundaryStyle::HeuristicEnd) {
            format!(
                "{chair_title} {}: Wir sind am Ende der heutigen Tagesordnung.",
                chair.last_name
            )
        } else {
            format!(
                "{chair_title} {}: Ich schließe damit die Sitzung.",
                chair.last_name
            )
        };
        em.push_segment(
            SegmentKind::ChairSpeech,
            chair_speaker,
            chair_party,
            vec![text],
        );
    }

    let body_len = em.lines.len();
    let body_start = preamble.len();
    let body_end = body_start + body_len;
    let mut lines = preamble;
    lines.extend(em.lines);

    let end_method = match config.boundary {
        BoundaryStyle::Marked | BoundaryStyle::OcrConfusedStart => {
            lines.push(format!(
                "(Ende: {}.{} Uhr)",
                rng.gen_range(17..20),
                rng.gen_range(10..60)
            ));
            for _ in 0..rng.gen_range(2usize..7) {
                lines.push(format!("Anlage {}", rng.gen_range(1..9)));
            }
            BoundaryMethod::EndMarker
        }
        BoundaryStyle::ClosingPhraseEnd => {
            lines.push(format!(
                "{chair_title} {}: Ich schließe damit die Sitzung.",
                chair.last_name
            ));
            for _ in 0..rng.gen_range(2usize..7) {
                lines.push(format!("Anlage {}", rng.gen_range(1..9)));
            }
            BoundaryMethod::ClosingPhrase
        }
        BoundaryStyle::HeuristicEnd => {
            for i in 0..1000usize {
                lines.push(format!("Anlage Seite {}", i + 1));
            }
            BoundaryMethod::HeuristicCut
        }
    };

    let truth: Vec<TruthSegment> = em
        .truth
        .into_iter()
        .map(|mut t| {
            t.line_range = (t.line_range.0 + body_start, t.line_range.1 + body_start);
            t
        })
        .collect();

    SynthProtocol {
        doc: RawDocument {
            parliament,
            period: config.period,
            session_numbers: vec![config.session],
            lines,
            source_kind: config.source_kind,
        },
        body: SessionBody {
            start_line: body_start,
            end_line: body_end,
            start_method: BoundaryMethod::StartMarker,
            end_method,
        },
        truth,
    }
}

fn synth_comment(
    world: &SynthWorld,
    speakers: &[&RosterEntry],
    rng: &mut StdRng,
) -> (Vec<String>, Vec<String>, Vec<String>) {
    match rng.gen_range(0..4) {
        0 => {
            let party = &world.parties[rng.gen_range(0..world.parties.len())];
            (
                vec![format!("(Beifall bei der {})", party.canonical_name)],
                vec![],
                vec![party.canonical_name.clone()],
            )
        }
        1 => {
            let mp = speakers[rng.gen_range(0..speakers.len())];
            (
                vec![format!("(Zuruf des Abg. {})", mp.last_name)],
                vec![mp.mp_id.clone()],
                vec![],
            )
        }
        2 => {
            let party = &world.parties[rng.gen_range(0..world.parties.len())];
            (
                vec![
                    format!("(Anhaltender Beifall bei der {}", party.canonical_name),
                    "und vereinzelt Zustimmung)".to_string(),
                ],
                vec![],
                vec![party.canonical_name.clone()],
            )
        }
        _ => (vec!["(Heiterkeit)".to_string()], vec![], vec![]),
    }
}

impl SynthWorld {
    /// Writes `roster.csv`, `parties.csv` and `sessions.csv` into `dir`.
    /// Generated fields contain no commas or quotes, so plain joining is
    /// valid CSV here.
    pub fn write_csvs(&self, dir: &std::path::Path) -> crate::Result<()> {
        use crate::error::Error;
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        let write = |name: &str, text: String| -> crate::Result<()> {
            let path = dir.join(name);
            std::fs::write(&path, text).map_err(|e| Error::io(&path, e))
        };

        let mut roster = String::from(
            "mp_id,first_name,last_name,birth_year,party,constituency,alignment,wiki_url,parliament,period\n",
        );
        for e in self.roster.entries() {
            let birth = e.birth_year.map(|y| y.to_string()).unwrap_or_default();
            roster.push_str(&format!(
                "{},{},{},{},{},{},{},{},{},{}\n",
                e.mp_id,
                e.first_name,
                e.last_name,
                birth,
                e.party,
                e.constituency,
                e.alignment,
                e.wiki_url,
                e.parliament,
                e.period
            ));
        }
        write("roster.csv", roster)?;

        let mut parties = String::from("canonical_name,aliases,alignment,successor\n");
        for p in &self.parties {
            parties.push_str(&format!(
                "{},{},{},{}\n",
                p.canonical_name,
                p.aliases.join("|"),
                p.alignment,
                p.successor.clone().unwrap_or_default()
            ));
        }
        write("parties.csv", parties)?;

        let mut sessions = String::from("parliament,period,session,date,estimated\n");
        for s in &self.session_dates {
            sessions.push_str(&format!(
                "{},{},{},{},{}\n",
                s.parliament, s.period, s.session, s.date, s.estimated
            ));
        }
        write("sessions.csv", sessions)?;
        Ok(())
    }
}

/// Materializes a complete pipeline working directory: metadata CSVs, one
/// input tree per parliament with the given documents, and a config file
/// pointing at all of it. Returns the config path.
pub fn write_pipeline_tree(
    dir: &std::path::Path,
    world: &SynthWorld,
    documents: &[(&SynthProtocol, String)],
) -> crate::Result<std::path::PathBuf> {
    use crate::error::Error;
    world.write_csvs(dir)?;
    let input_root = dir.join("in");
    let mut parliaments = std::collections::BTreeSet::new();
    for (fixture, file_name) in documents {
        let parliament = &fixture.doc.parliament.0;
        parliaments.insert(parliament.clone());
        let doc_dir = input_root.join(parliament);
        std::fs::create_dir_all(&doc_dir).map_err(|e| Error::io(&doc_dir, e))?;
        let path = doc_dir.join(file_name);
        let mut text = fixture.doc.lines.join("\n");
        text.push('\n');
        std::fs::write(&path, text).map_err(|e| Error::io(&path, e))?;
    }

    let mut config = String::new();
    config.push_str("workers = 1\n\n[inputs]\n");
    for parliament in &parliaments {
        config.push_str(&format!("{parliament} = \"in/{parliament}\"\n"));
    }
    config.push_str(
        "\n[metadata]\nroster = \"roster.csv\"\nparties = \"parties.csv\"\nsessions = \"sessions.csv\"\n\n[output]\nroot = \"out\"\n",
    );
    let config_path = dir.join("pipeline.toml");
    std::fs::write(&config_path, config).map_err(|e| Error::io(&config_path, e))?;
    Ok(config_path)
}

/// Comparison key for scoring produced segments against the truth.
pub fn segment_key(s: &Segment) -> (usize, SegmentKind, SpeakerRef, (usize, usize)) {
    (s.position, s.kind, s.speaker.clone(), s.line_range)
}

/// The same key computed from a truth segment.
pub fn truth_key(t: &TruthSegment) -> (usize, SegmentKind, SpeakerRef, (usize, usize)) {
    (t.position, t.kind, t.speaker.clone(), t.line_range)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metadata::{PartyRegistry, SessionDates};
    use crate::patterns::PatternSet;
    use crate::segmenter;

    #[test]
    fn generator_is_deterministic() {
        let world = synth_world(&[("NW", 7)], 20, 5, 99);
        let config = SynthConfig {
            turns: 30,
            seed: 4,
            ..Default::default()
        };
        let a = synth_protocol(&world, &config);
        let b = synth_protocol(&world, &config);
        assert_eq!(a.doc.lines, b.doc.lines);
        assert_eq!(a.truth, b.truth);
    }

    #[test]
    fn splitter_reproduces_the_truth_exactly() {
        let world = synth_world(&[("NW", 7)], 20, 5, 1);
        let parties = PartyRegistry::new(world.parties.clone()).unwrap();
        let dates = SessionDates::new(world.session_dates.clone()).unwrap();
        let patterns = PatternSet::default();
        for (seed, boundary) in [
            (11, BoundaryStyle::Marked),
            (12, BoundaryStyle::OcrConfusedStart),
            (13, BoundaryStyle::ClosingPhraseEnd),
            (14, BoundaryStyle::HeuristicEnd),
        ] {
            let config = SynthConfig {
                turns: 25,
                seed,
                session: 2,
                boundary,
                ..Default::default()
            };
            let fixture = synth_protocol(&world, &config);
            let body = segmenter::session_body(&fixture.doc.lines, &patterns);
            assert_eq!(body, fixture.body, "boundary mismatch for {boundary:?}");
            let scoped = world.roster.scope(&fixture.doc.parliament, 7);
            let segments = segmenter::split_speeches(
                &fixture.doc,
                &body,
                &scoped,
                &parties,
                &dates,
                &patterns,
            );
            assert_eq!(segments.len(), fixture.truth.len(), "{boundary:?}");
            for (seg, truth) in segments.iter().zip(&fixture.truth) {
                assert_eq!(segment_key(seg), truth_key(truth), "{boundary:?}");
                assert_eq!(seg.party, truth.party, "{boundary:?}");
            }
            // lossless partition of the body
            let rebuilt = segmenter::reconstruct_body(&segments);
            let expected = fixture.doc.lines[body.start_line..body.end_line].join("\n");
            assert_eq!(rebuilt, expected, "{boundary:?}");
        }
    }
}
