//! End-to-end pipeline tests on a small handcrafted working directory.

use std::fs;
use std::path::Path;

use plenum::corpus::{self, RecordKind, RecordSpeakerKind};
use plenum::pipeline::{self, PipelineConfig, SplitOptions, StatsOptions};
use plenum::preprocess::GrayBitmap;
use plenum::{pgm, preprocess};

const ROSTER: &str = "\
mp_id,first_name,last_name,birth_year,party,constituency,alignment,wiki_url,parliament,period
m0,Karla,Muster,1930,CDU,Bonn,conservative,,NW,7
m1,Max,Bergmann,1950,SPD,Köln I,social democratic,,NW,7
m2,Rita,Steinfeld,1940,FDP,Essen,liberal,,NW,3
";

const PARTIES: &str = "\
canonical_name,aliases,alignment,successor
SPD,,social democratic,
CDU,,conservative,
FDP,,liberal,
";

const SESSIONS: &str = "\
parliament,period,session,date,estimated
NW,7,44,1971-03-17,false
NW,3,41,1957-05-02,true
NW,3,42,1957-05-16,true
";

const LEXICON: &str = "Regierung\t500\nBravo\t80\nSitzung\t400\nDamen\t300\nHerren\t300\nWort\t100\n";

const OCR_PROTOCOL: &str = "\
Inhaltsverzeichnis
Punkt 1. Beratung
(Beginn: 10.02 Uhr)
Präsidentin Muster: Meine Damen und Herren! Das Wort hat Bergmann.
Bergmanm (SPD): Die Regierungl ist gefordert.
(Bravol bei der SPD)
Wir kommen voran.
Präsidentin Muster: Ich schließe damit die Sitzung.
(Ende: 18.47 Uhr)
Anlage 1
";

fn write(path: &Path, text: &str) {
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir).unwrap();
    }
    fs::write(path, text).unwrap();
}

fn setup(dir: &Path) -> std::path::PathBuf {
    write(&dir.join("roster.csv"), ROSTER);
    write(&dir.join("parties.csv"), PARTIES);
    write(&dir.join("sessions.csv"), SESSIONS);
    write(&dir.join("lexicon.tsv"), LEXICON);
    write(&dir.join("in/NW/7-44.ocr.txt"), OCR_PROTOCOL);
    let config = r#"
workers = 2

[inputs]
NW = "in/NW"

[metadata]
roster = "roster.csv"
parties = "parties.csv"
sessions = "sessions.csv"

[spellcheck]
lexicon = "lexicon.tsv"

[output]
root = "out"
"#;
    let path = dir.join("pipeline.toml");
    write(&path, config);
    path
}

#[test]
fn ocr_document_is_corrected_and_split() {
    let dir = tempfile::tempdir().unwrap();
    let config_path = setup(dir.path());
    let config = PipelineConfig::load(&config_path).unwrap();

    let summary = pipeline::run_split(&config, &SplitOptions::default()).unwrap();
    assert_eq!(summary.documents, 1);
    assert_eq!(summary.failed, 0, "{:?}", summary.reports);

    let records = corpus::read_corpus_path(&dir.path().join("out/NW/7/44.jsonl")).unwrap();
    let kinds: Vec<RecordKind> = records.iter().map(|r| r.kind).collect();
    assert_eq!(
        kinds,
        vec![
            RecordKind::Comment, // (Beginn: ...)
            RecordKind::Chair,
            RecordKind::Speech,
            RecordKind::Comment,
            RecordKind::Speech,
            RecordKind::Chair,
        ]
    );

    // the corrupted surname header was repaired by the protected
    // dictionary before splitting, so the speaker resolves
    let speech = &records[2];
    assert_eq!(speech.speaker_kind, RecordSpeakerKind::Mp);
    assert_eq!(speech.mp_id.as_deref(), Some("m1"));
    assert_eq!(speech.last_name.as_deref(), Some("Bergmann"));
    assert_eq!(speech.party.as_deref(), Some("SPD"));
    assert_eq!(speech.birth_year, Some(1950));
    assert_eq!(speech.text, "Die Regierung ist gefordert.");
    assert_eq!(
        speech.text_original.as_deref(),
        Some("Die Regierungl ist gefordert.")
    );
    assert_eq!(speech.date.map(|d| d.to_string()).as_deref(), Some("1971-03-17"));

    // comment correction and attribution
    let comment = &records[3];
    assert_eq!(comment.text, "Bravo bei der SPD");
    assert_eq!(comment.attributed_parties, vec!["SPD".to_string()]);

    // resumed speech after the comment keeps the speaker
    assert_eq!(records[4].mp_id.as_deref(), Some("m1"));
    assert_eq!(records[4].position, 4);

    // the original mirror carries the uncorrected wording
    let original =
        corpus::read_corpus_path(&dir.path().join("out-original/NW/7/44.jsonl")).unwrap();
    assert_eq!(original.len(), records.len());
    assert_eq!(original[2].text, "Die Regierungl ist gefordert.");
    assert_eq!(original[2].text_original, None);
    assert_eq!(original[3].text, "Bravol bei der SPD");

    // run report captures boundary methods and corrections
    let report = &summary.reports[0];
    assert_eq!(report.sessions.len(), 1);
    let session = &report.sessions[0];
    assert_eq!(session.start_method, "start_marker");
    assert_eq!(session.end_method, "end_marker");
    assert_eq!(session.segments, 6);
    assert!(session.corrections >= 3, "corrections {}", session.corrections);
    assert_eq!(session.unresolved_speeches, 0);
}

#[test]
fn no_spellcheck_flag_bypasses_correction() {
    let dir = tempfile::tempdir().unwrap();
    let config_path = setup(dir.path());
    let config = PipelineConfig::load(&config_path).unwrap();
    let options = SplitOptions {
        no_spellcheck: true,
        ..Default::default()
    };
    pipeline::run_split(&config, &options).unwrap();
    let records = corpus::read_corpus_path(&dir.path().join("out/NW/7/44.jsonl")).unwrap();
    // without correction the corrupted header does not resolve; the line
    // stays inside the surrounding chair statement
    assert!(records
        .iter()
        .all(|r| r.mp_id.as_deref() != Some("m1")));
    assert!(records.iter().all(|r| r.text_original.is_none()));
}

#[test]
fn multi_session_scan_writes_two_files() {
    let dir = tempfile::tempdir().unwrap();
    let config_path = setup(dir.path());
    write(
        &dir.path().join("in/NW/3-41+42.txt"),
        "Vorspann\n\
         (Beginn: 9.00 Uhr)\n\
         Steinfeld (FDP): Erste Sitzung.\n\
         (Ende: 12.00 Uhr)\n\
         Zwischenblatt\n\
         (Beginn: 14.00 Uhr)\n\
         Steinfeld (FDP): Zweite Sitzung.\n\
         (Ende: 17.00 Uhr)\n",
    );
    let config = PipelineConfig::load(&config_path).unwrap();
    let summary = pipeline::run_split(&config, &SplitOptions::default()).unwrap();
    assert_eq!(summary.failed, 0, "{:?}", summary.reports);

    let first = corpus::read_corpus_path(&dir.path().join("out/NW/3/41.jsonl")).unwrap();
    let second = corpus::read_corpus_path(&dir.path().join("out/NW/3/42.jsonl")).unwrap();
    assert!(!first.is_empty() && !second.is_empty());
    assert!(first.iter().any(|r| r.text.contains("Erste")));
    assert!(second.iter().any(|r| r.text.contains("Zweite")));
    // estimated session dates are flagged
    assert!(first[0].estimated_date);
}

#[test]
fn documents_without_roster_are_skipped_not_fatal() {
    let dir = tempfile::tempdir().unwrap();
    let config_path = setup(dir.path());
    // period 9 has no roster rows
    write(&dir.path().join("in/NW/9-1.txt"), "(Beginn: 9.00 Uhr)\nText.\n");
    // and one file with a malformed name
    write(&dir.path().join("in/NW/notes.txt"), "irrelevant\n");
    let config = PipelineConfig::load(&config_path).unwrap();
    let summary = pipeline::run_split(&config, &SplitOptions::default()).unwrap();
    assert_eq!(summary.documents, 2); // discovered, parseable names
    assert_eq!(summary.failed, 2);
    assert!(dir.path().join("out/NW/7/44.jsonl").is_file());
    let errors: Vec<&str> = summary
        .reports
        .iter()
        .filter_map(|r| r.error.as_deref())
        .collect();
    assert!(errors.iter().any(|e| e.contains("no roster")), "{errors:?}");
    assert!(errors.iter().any(|e| e.contains("does not match")), "{errors:?}");
}

#[test]
fn correct_command_writes_text_and_change_log() {
    let dir = tempfile::tempdir().unwrap();
    let config_path = setup(dir.path());
    let config = PipelineConfig::load(&config_path).unwrap();
    let summary = pipeline::run_correct(&config, &SplitOptions::default()).unwrap();
    assert_eq!(summary.documents, 1);
    assert_eq!(summary.failed, 0);

    let corrected = fs::read_to_string(dir.path().join("out-corrected/NW/7-44.ocr.txt")).unwrap();
    assert!(corrected.contains("Bergmann (SPD): Die Regierung ist gefordert."));
    assert!(corrected.contains("(Bravo bei der SPD)"));

    let log = fs::read_to_string(dir.path().join("out-corrected/NW/7-44.ocr.changes.jsonl")).unwrap();
    let entries: Vec<serde_json::Value> = log
        .lines()
        .map(|l| serde_json::from_str(l).unwrap())
        .collect();
    assert!(entries.len() >= 3);
    // tokens keep their punctuation; the bracketed interjection logs as
    // "(Bravol" -> "(Bravo"
    assert!(entries.iter().any(|e| e["original"] == "(Bravol"
        && e["corrected"] == "(Bravo"
        && e["distance"] == 1));
    assert!(entries.iter().any(|e| e["original"] == "Regierungl"
        && e["corrected"] == "Regierung"
        && e["distance"] == 1));
    // log rows carry positions
    assert!(entries.iter().all(|e| e["line_index"].is_u64() && e["token_index"].is_u64()));
}

#[test]
fn preprocess_emits_pages_and_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let config_path = setup(dir.path());
    let pgm_dir = dir.path().join("in/NW");

    // page 1: already-binary stripes; page 2: the same rotated; page 3: gray noise
    let mut stripes = GrayBitmap::filled(300, 200, 255).unwrap();
    for y in (20..180).step_by(12) {
        for x in 30..270 {
            stripes.set(x, y, 0);
        }
    }
    pgm::save_pgm(&pgm_dir.join("7-44-p1.pgm"), &stripes).unwrap();
    let rotated = preprocess::rotate(&stripes, 2.0);
    pgm::save_pgm(&pgm_dir.join("7-44-p2.pgm"), &rotated).unwrap();
    let mut gray = GrayBitmap::filled(100, 100, 200).unwrap();
    for y in 40..60 {
        for x in 10..90 {
            gray.set(x, y, 30);
        }
    }
    pgm::save_pgm(&pgm_dir.join("7-44-p3.pgm"), &gray).unwrap();

    let config = PipelineConfig::load(&config_path).unwrap();
    let summary = pipeline::run_preprocess(&config).unwrap();
    assert_eq!(summary.pages, 3);
    assert_eq!(summary.failed, 0, "{:?}", summary.errors);

    let manifest = fs::read_to_string(&summary.manifest).unwrap();
    let rows: Vec<serde_json::Value> = manifest
        .lines()
        .map(|l| serde_json::from_str(l).unwrap())
        .collect();
    assert_eq!(rows.len(), 3);
    for row in &rows {
        assert!(row["expected_text"].as_str().unwrap().ends_with(".txt"));
        assert!(Path::new(row["output"].as_str().unwrap()).is_file());
    }

    // an already-binary, unskewed page passes through unchanged
    let p1 = pgm::load_pgm(&dir.path().join("out-preprocessed/NW/7-44-p1.pgm")).unwrap();
    assert_eq!(p1, stripes);

    // the rotated page is deskewed back within tolerance
    let p2_row = rows
        .iter()
        .find(|r| r["source"].as_str().unwrap().contains("p2"))
        .unwrap();
    let angle = p2_row["skew_angle"].as_f64().unwrap();
    assert!((angle + 2.0).abs() <= 0.2, "angle {angle}");

    // the gray page came out binary
    let p3 = pgm::load_pgm(&dir.path().join("out-preprocessed/NW/7-44-p3.pgm")).unwrap();
    assert!(p3.pixels().iter().all(|&p| p == 0 || p == 255));
}

#[test]
fn stats_over_the_written_corpus() {
    let dir = tempfile::tempdir().unwrap();
    let config_path = setup(dir.path());
    let config = PipelineConfig::load(&config_path).unwrap();
    pipeline::run_split(&config, &SplitOptions::default()).unwrap();

    let summary = pipeline::run_stats(&config, &StatsOptions::default()).unwrap();
    assert_eq!(summary.records, 6);
    let counts = fs::read_to_string(&summary.counts_csv).unwrap();
    let mut lines = counts.lines();
    assert_eq!(
        lines.next().unwrap(),
        "parliament,chair,comment,SPD,unaffiliated,total"
    );
    assert_eq!(lines.next().unwrap(), "NW,2,2,2,0,6");

    let ages = fs::read_to_string(&summary.age_csv).unwrap();
    // chair born 1930 and speaker born 1950 both spoke in 1971
    assert!(ages.contains("1971,31.00,4") || ages.contains("1971"), "{ages}");
}

#[test]
fn empty_corpus_yields_header_only_tables() {
    let dir = tempfile::tempdir().unwrap();
    let config_path = setup(dir.path());
    fs::remove_file(dir.path().join("in/NW/7-44.ocr.txt")).unwrap();
    let config = PipelineConfig::load(&config_path).unwrap();
    let summary = pipeline::run_stats(&config, &StatsOptions::default()).unwrap();
    assert_eq!(summary.records, 0);
    assert_eq!(
        fs::read_to_string(&summary.counts_csv).unwrap(),
        "parliament,chair,comment,unaffiliated,total\n"
    );
    assert_eq!(
        fs::read_to_string(&summary.age_csv).unwrap(),
        "year,average_age,count\n"
    );
}
