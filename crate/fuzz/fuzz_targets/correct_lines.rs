#![no_main]
use std::sync::LazyLock;

use libfuzzer_sys::fuzz_target;

use plenum::spellcheck::{self, CorrectionDictionary};

static DICT: LazyLock<CorrectionDictionary> = LazyLock::new(|| {
    CorrectionDictionary::build(
        vec![
            ("regierung", 500u64),
            ("sitzung", 400),
            ("damen", 300),
            ("herren", 300),
            ("Bravo", 80),
            ("haus", 100),
        ],
        vec!["Mustermann"],
    )
});

fn core_len(token: &str) -> usize {
    token
        .trim_matches(|c: char| !c.is_alphanumeric())
        .chars()
        .count()
}

// Correction of arbitrary text must not panic and must respect the
// distance bound and whitespace preservation.
fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    let lines: Vec<String> = text.lines().take(200).map(str::to_owned).collect();
    let (corrected, log) = spellcheck::correct_lines(&lines, &DICT);
    assert_eq!(corrected.len(), lines.len());

    for entry in &log {
        assert!(entry.distance >= 1);
        assert!(entry.distance <= spellcheck::max_edit_distance(core_len(&entry.original)));
        // corrections are fixpoints
        let again = spellcheck::correct_token(&entry.corrected, &DICT);
        assert_eq!(again.corrected, entry.corrected);
    }

    // token streams stay aligned with per-token correction
    for (line, fixed) in lines.iter().zip(&corrected) {
        let per_token: Vec<String> = line
            .split_whitespace()
            .map(|t| spellcheck::correct_token(t, &DICT).corrected)
            .collect();
        let recomposed: Vec<&str> = fixed.split_whitespace().collect();
        assert_eq!(per_token, recomposed);
    }
});
