//! Corpus-level descriptive statistics.
//!
//! Two aggregates: segment counts per (parliament, party, kind), and the
//! average speaker age per calendar year. Counting keeps kind and party as
//! independent axes; the printed table projects them into the usual layout
//! (chair and comment columns, then one speech column per party).
//! Predecessor parties can be merged into their successor on request, so a
//! party and the parties it absorbed count as one.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::corpus::{CorpusRecord, RecordKind};
use crate::error::{Error, Result};
use crate::metadata::PartyRegistry;

/// Counting key: parliament, speaker party (`None` when unresolved), kind.
pub type CountKey = (String, Option<String>, RecordKind);

pub fn count_segments<'a>(
    records: impl IntoIterator<Item = &'a CorpusRecord>,
    merge_successors: Option<&PartyRegistry>,
) -> BTreeMap<CountKey, u64> {
    let mut counts = BTreeMap::new();
    for record in records {
        let party = record.party.as_deref().map(|p| match merge_successors {
            Some(registry) => registry.merged(p).to_string(),
            None => p.to_string(),
        });
        *counts
            .entry((record.parliament.clone(), party, record.kind))
            .or_insert(0) += 1;
    }
    counts
}

/// How the yearly average age weights its input.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AgeWeighting {
    /// Every speech and chair segment contributes once (the default).
    Segments,
    /// Every distinct speaker contributes once per year.
    UniqueSpeakers,
}

/// Mean age and the number of contributions behind it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AgeBucket {
    pub mean_age: f64,
    pub count: u64,
}

/// Average speaker age per session year over speech and chair segments.
/// Comments and records without birth year or date are excluded; age is
/// session year minus birth year (the roster carries years only).
pub fn average_age_series<'a>(
    records: impl IntoIterator<Item = &'a CorpusRecord>,
    weighting: AgeWeighting,
) -> BTreeMap<i32, AgeBucket> {
    use chrono::Datelike;
    let mut sums: BTreeMap<i32, (i64, u64)> = BTreeMap::new();
    let mut speakers_seen: HashMap<(i32, String), ()> = HashMap::new();
    for record in records {
        if record.kind == RecordKind::Comment {
            continue;
        }
        let (Some(date), Some(birth_year)) = (record.date, record.birth_year) else {
            continue;
        };
        let year = date.year();
        if weighting == AgeWeighting::UniqueSpeakers {
            let Some(mp_id) = &record.mp_id else { continue };
            if speakers_seen
                .insert((year, mp_id.clone()), ())
                .is_some()
            {
                continue;
            }
        }
        let age = i64::from(year) - i64::from(birth_year);
        let (sum, count) = sums.entry(year).or_insert((0, 0));
        *sum += age;
        *count += 1;
    }
    sums.into_iter()
        .map(|(year, (sum, count))| {
            (
                year,
                AgeBucket {
                    mean_age: sum as f64 / count as f64,
                    count,
                },
            )
        })
        .collect()
}

/// Round half-up to thousands, as in the per-parliament overview table.
pub fn in_thousands(n: u64) -> u64 {
    (n + 500) / 1000
}

/// Writes the counts table as CSV: one row per parliament with chair and
/// comment totals, one speech column per party (sorted), a column for
/// speeches without a resolved party, and the row total. `thousands`
/// switches the cells to rounded thousands; the total stays exact counts
/// before rounding.
pub fn write_counts_csv<W: Write>(
    counts: &BTreeMap<CountKey, u64>,
    sink: &mut W,
    thousands: bool,
) -> Result<()> {
    let parties: BTreeSet<&str> = counts
        .keys()
        .filter(|(_, _, kind)| *kind == RecordKind::Speech)
        .filter_map(|(_, party, _)| party.as_deref())
        .collect();
    let parliaments: BTreeSet<&str> = counts.keys().map(|(p, _, _)| p.as_str()).collect();

    let mut header = vec!["parliament".to_string(), "chair".into(), "comment".into()];
    header.extend(parties.iter().map(|p| p.to_string()));
    header.push("unaffiliated".into());
    header.push("total".into());
    write_csv_row(sink, &header)?;

    for parliament in parliaments {
        let total_of = |kind: RecordKind| -> u64 {
            counts
                .iter()
                .filter(|((p, _, k), _)| p == parliament && *k == kind)
                .map(|(_, n)| n)
                .sum()
        };
        let cell = |n: u64| {
            if thousands {
                in_thousands(n).to_string()
            } else {
                n.to_string()
            }
        };
        let mut row = vec![
            parliament.to_string(),
            cell(total_of(RecordKind::Chair)),
            cell(total_of(RecordKind::Comment)),
        ];
        let mut speech_accounted = 0u64;
        for party in &parties {
            let n = counts
                .get(&(
                    parliament.to_string(),
                    Some(party.to_string()),
                    RecordKind::Speech,
                ))
                .copied()
                .unwrap_or(0);
            speech_accounted += n;
            row.push(cell(n));
        }
        let unaffiliated = total_of(RecordKind::Speech) - speech_accounted;
        row.push(cell(unaffiliated));
        let total = total_of(RecordKind::Chair)
            + total_of(RecordKind::Comment)
            + total_of(RecordKind::Speech);
        row.push(total.to_string());
        write_csv_row(sink, &row)?;
    }
    Ok(())
}

/// Writes the age series as CSV: year, mean age, contributing count.
pub fn write_age_csv<W: Write>(series: &BTreeMap<i32, AgeBucket>, sink: &mut W) -> Result<()> {
    write_csv_row(
        sink,
        &["year".to_string(), "average_age".into(), "count".into()],
    )?;
    for (year, bucket) in series {
        write_csv_row(
            sink,
            &[
                year.to_string(),
                format!("{:.2}", bucket.mean_age),
                bucket.count.to_string(),
            ],
        )?;
    }
    Ok(())
}

fn write_csv_row<W: Write>(sink: &mut W, cells: &[String]) -> Result<()> {
    let quoted: Vec<String> = cells
        .iter()
        .map(|c| {
            if c.contains(',') || c.contains('"') || c.contains('\n') {
                format!("\"{}\"", c.replace('"', "\"\""))
            } else {
                c.clone()
            }
        })
        .collect();
    writeln!(sink, "{}", quoted.join(","))
        .map_err(|e| Error::Corpus(format!("stats write failed: {e}")))
}
