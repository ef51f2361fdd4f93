//! Roster, party and session-date ingestion plus speaker resolution.
//!
//! All three inputs are header-validated UTF-8 CSV files whose column names
//! match the field names here. They are loaded once per run and shared
//! read-only across workers.

use std::collections::{BTreeSet, HashMap};
use std::path::Path;

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Identifier of one parliament (e.g. "NW", "Bundestag").
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ParliamentId(pub String);

impl std::fmt::Display for ParliamentId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for ParliamentId {
    fn from(s: &str) -> Self {
        ParliamentId(s.to_string())
    }
}

/// One member of parliament within one legislative period.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RosterEntry {
    pub mp_id: String,
    pub first_name: String,
    pub last_name: String,
    pub birth_year: Option<i32>,
    pub party: String,
    pub constituency: String,
    pub alignment: String,
    pub wiki_url: String,
    pub parliament: ParliamentId,
    pub period: u32,
}

#[derive(Debug, Clone, Default)]
pub struct Roster {
    entries: Vec<RosterEntry>,
}

impl Roster {
    pub fn new(entries: Vec<RosterEntry>) -> Self {
        Roster { entries }
    }

    /// Loads and validates `roster.csv`. Every violated invariant is an
    /// error naming the row: empty surname, birth year outside
    /// [1850, 2010], duplicate (parliament, period, first_name, last_name).
    pub fn load(path: &Path) -> Result<Self> {
        let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
        Self::parse(file, path)
    }

    /// Same as [`Roster::load`] for an already opened reader; `origin` is
    /// only used in error messages.
    pub fn parse(reader: impl std::io::Read, origin: &Path) -> Result<Self> {
        let path = origin;
        let mut reader = csv_reader(reader);
        check_headers(
            &mut reader,
            path,
            &[
                "mp_id",
                "first_name",
                "last_name",
                "birth_year",
                "party",
                "constituency",
                "alignment",
                "wiki_url",
                "parliament",
                "period",
            ],
        )?;
        let mut entries = Vec::new();
        let mut seen = BTreeSet::new();
        for (i, record) in reader.deserialize::<RosterEntry>().enumerate() {
            let row = i + 2; // 1-based, after the header
            let entry = record.map_err(|e| Error::CsvRow {
                path: path.to_path_buf(),
                row,
                msg: e.to_string(),
            })?;
            let fail = |msg: String| Error::CsvRow {
                path: path.to_path_buf(),
                row,
                msg,
            };
            if entry.last_name.trim().is_empty() {
                return Err(fail("last_name must not be empty".into()));
            }
            if entry.mp_id.trim().is_empty() {
                return Err(fail("mp_id must not be empty".into()));
            }
            if let Some(year) = entry.birth_year {
                if !(1850..=2010).contains(&year) {
                    return Err(fail(format!("birth_year {year} outside [1850, 2010]")));
                }
            }
            let key = (
                entry.parliament.clone(),
                entry.period,
                entry.first_name.clone(),
                entry.last_name.clone(),
            );
            if !seen.insert(key) {
                return Err(fail(format!(
                    "duplicate entry for {} {} in {} period {}",
                    entry.first_name, entry.last_name, entry.parliament, entry.period
                )));
            }
            entries.push(entry);
        }
        Ok(Roster { entries })
    }

    pub fn entries(&self) -> &[RosterEntry] {
        &self.entries
    }

    /// Distinct surnames across all parliaments; these feed the protected
    /// part of the correction dictionary.
    pub fn surnames(&self) -> BTreeSet<String> {
        self.entries.iter().map(|e| e.last_name.clone()).collect()
    }

    /// View restricted to one parliament and period, indexed by surname.
    pub fn scope(&self, parliament: &ParliamentId, period: u32) -> ScopedRoster<'_> {
        let mut scoped = ScopedRoster {
            entries: Vec::new(),
            by_surname: HashMap::new(),
            by_id: HashMap::new(),
        };
        for entry in &self.entries {
            if &entry.parliament == parliament && entry.period == period {
                let idx = scoped.entries.len();
                scoped.entries.push(entry);
                scoped.by_id.insert(entry.mp_id.as_str(), idx);
                for key in surname_keys(&entry.last_name) {
                    scoped.by_surname.entry(key).or_default().push(idx);
                }
            }
        }
        scoped
    }
}

/// Lookup keys for a surname: the full form plus, for hyphenated double
/// surnames, each half. Protocols use either form.
fn surname_keys(last_name: &str) -> Vec<String> {
    let mut keys = vec![last_name.to_string()];
    if last_name.contains('-') {
        for part in last_name.split('-').filter(|p| !p.is_empty()) {
            keys.push(part.to_string());
        }
    }
    keys
}

/// Roster slice for one (parliament, period).
#[derive(Debug, Clone)]
pub struct ScopedRoster<'a> {
    entries: Vec<&'a RosterEntry>,
    by_surname: HashMap<String, Vec<usize>>,
    by_id: HashMap<&'a str, usize>,
}

/// Speaker attribution of a segment.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum SpeakerRef {
    /// Uniquely resolved member of parliament.
    Mp { mp_id: String },
    /// Session chair; carries the id when the name also resolved.
    Chair { mp_id: Option<String> },
    /// No roster match.
    Unknown,
    /// Several roster entries share the surname and nothing disambiguates.
    Ambiguous { candidates: Vec<String> },
}

impl SpeakerRef {
    pub fn mp_id(&self) -> Option<&str> {
        match self {
            SpeakerRef::Mp { mp_id } => Some(mp_id),
            SpeakerRef::Chair { mp_id } => mp_id.as_deref(),
            _ => None,
        }
    }

    pub fn is_chair(&self) -> bool {
        matches!(self, SpeakerRef::Chair { .. })
    }
}

/// Chair keywords recognized in speaker-line prefixes; matched
/// case-insensitively as substrings of the text before the colon.
pub const CHAIR_KEYWORDS: [&str; 5] = [
    "präsident",
    "präsidentin",
    "vizepräsident",
    "vizepräsidentin",
    "alterspräsident",
];

impl<'a> ScopedRoster<'a> {
    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn entries(&self) -> impl Iterator<Item = &'a RosterEntry> + '_ {
        self.entries.iter().copied()
    }

    pub fn by_id(&self, mp_id: &str) -> Option<&'a RosterEntry> {
        self.by_id.get(mp_id).map(|&i| self.entries[i])
    }

    /// Entries whose surname (full or hyphen half) equals `last_name`.
    pub fn matches(&self, last_name: &str) -> Vec<&'a RosterEntry> {
        self.by_surname
            .get(last_name)
            .map(|ids| ids.iter().map(|&i| self.entries[i]).collect())
            .unwrap_or_default()
    }

    /// Resolves a detected speaker name.
    ///
    /// A unique surname match yields an MP; with several matches a party
    /// hint may single one out, otherwise the result is ambiguous with the
    /// candidate list. A chair keyword anywhere in `title_prefix` marks the
    /// speaker as session chair, with the id attached when the name also
    /// resolved uniquely. Nothing is ever picked arbitrarily.
    pub fn resolve_speaker(
        &self,
        last_name: &str,
        party_hint: &str,
        title_prefix: &str,
        chair_keywords: &[String],
    ) -> SpeakerRef {
        let prefix_folded = title_prefix.to_lowercase();
        let is_chair = chair_keywords
            .iter()
            .any(|k| !k.is_empty() && prefix_folded.contains(&k.to_lowercase()));

        let matches = self.matches(last_name);
        let hint = party_hint.trim();
        let narrowed: Vec<&RosterEntry> = if matches.len() > 1 && !hint.is_empty() {
            let filtered: Vec<&RosterEntry> = matches
                .iter()
                .copied()
                .filter(|e| e.party.eq_ignore_ascii_case(hint))
                .collect();
            if filtered.is_empty() {
                matches.clone()
            } else {
                filtered
            }
        } else {
            matches.clone()
        };

        let unique = match narrowed.len() {
            1 => Some(narrowed[0].mp_id.clone()),
            _ => None,
        };

        if is_chair {
            return SpeakerRef::Chair { mp_id: unique };
        }
        match narrowed.len() {
            0 => SpeakerRef::Unknown,
            1 => SpeakerRef::Mp {
                mp_id: narrowed[0].mp_id.clone(),
            },
            _ => {
                let mut candidates: Vec<String> =
                    narrowed.iter().map(|e| e.mp_id.clone()).collect();
                candidates.sort();
                candidates.dedup();
                SpeakerRef::Ambiguous { candidates }
            }
        }
    }
}

/// One party with its aliases, coarse alignment label and, when it merged
/// into or continued as another party, the canonical name of that
/// successor.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PartyRecord {
    pub canonical_name: String,
    /// Pipe-separated in the CSV.
    pub aliases: Vec<String>,
    pub alignment: String,
    /// Canonical name of the succeeding party, empty when none.
    pub successor: Option<String>,
}

#[derive(Debug, Clone, Default)]
pub struct PartyRegistry {
    records: Vec<PartyRecord>,
    by_name: HashMap<String, usize>,
}

impl PartyRegistry {
    pub fn new(records: Vec<PartyRecord>) -> Result<Self> {
        let mut registry = PartyRegistry {
            records: Vec::new(),
            by_name: HashMap::new(),
        };
        for record in records {
            let idx = registry.records.len();
            if registry
                .by_name
                .insert(record.canonical_name.clone(), idx)
                .is_some()
            {
                return Err(Error::Config(format!(
                    "duplicate party {}",
                    record.canonical_name
                )));
            }
            for alias in &record.aliases {
                registry.by_name.entry(alias.clone()).or_insert(idx);
            }
            registry.records.push(record);
        }
        registry.check_successor_chains()?;
        Ok(registry)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
        Self::parse(file, path)
    }

    pub fn parse(reader: impl std::io::Read, origin: &Path) -> Result<Self> {
        #[derive(Deserialize)]
        struct Row {
            canonical_name: String,
            aliases: String,
            alignment: String,
            successor: String,
        }
        let path = origin;
        let mut reader = csv_reader(reader);
        check_headers(
            &mut reader,
            path,
            &["canonical_name", "aliases", "alignment", "successor"],
        )?;
        let mut records = Vec::new();
        for (i, row) in reader.deserialize::<Row>().enumerate() {
            let row = row.map_err(|e| Error::CsvRow {
                path: path.to_path_buf(),
                row: i + 2,
                msg: e.to_string(),
            })?;
            if row.canonical_name.trim().is_empty() {
                return Err(Error::CsvRow {
                    path: path.to_path_buf(),
                    row: i + 2,
                    msg: "canonical_name must not be empty".into(),
                });
            }
            records.push(PartyRecord {
                canonical_name: row.canonical_name,
                aliases: row
                    .aliases
                    .split('|')
                    .map(str::trim)
                    .filter(|a| !a.is_empty())
                    .map(str::to_owned)
                    .collect(),
                alignment: row.alignment,
                successor: match row.successor.trim() {
                    "" => None,
                    s => Some(s.to_string()),
                },
            });
        }
        Self::new(records)
    }

    fn check_successor_chains(&self) -> Result<()> {
        for record in &self.records {
            let mut hops = 0;
            let mut cur = record;
            while let Some(next) = &cur.successor {
                let Some(&idx) = self.by_name.get(next) else {
                    return Err(Error::Config(format!(
                        "party {} names unknown successor {next}",
                        cur.canonical_name
                    )));
                };
                cur = &self.records[idx];
                hops += 1;
                if hops > self.records.len() {
                    return Err(Error::Config(format!(
                        "successor cycle involving {}",
                        record.canonical_name
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn records(&self) -> &[PartyRecord] {
        &self.records
    }

    /// Canonical name for a name or alias; `None` for unregistered parties.
    pub fn canonical(&self, name_or_alias: &str) -> Option<&str> {
        self.by_name
            .get(name_or_alias.trim())
            .map(|&i| self.records[i].canonical_name.as_str())
    }

    /// Canonical name if registered, otherwise the trimmed input itself.
    pub fn canonical_or_self<'s>(&'s self, name: &'s str) -> &'s str {
        self.canonical(name).unwrap_or(name.trim())
    }

    pub fn alignment(&self, name: &str) -> Option<&str> {
        self.by_name
            .get(name.trim())
            .map(|&i| self.records[i].alignment.as_str())
    }

    /// Follows the successor chain to its end, so that predecessor parties
    /// can be counted together with their successor.
    pub fn merged<'s>(&'s self, name: &'s str) -> &'s str {
        let mut cur = match self.by_name.get(name.trim()) {
            Some(&i) => i,
            None => return name,
        };
        let mut hops = 0;
        while let Some(next) = &self.records[cur].successor {
            match self.by_name.get(next) {
                Some(&i) if hops <= self.records.len() => {
                    cur = i;
                    hops += 1;
                }
                _ => break,
            }
        }
        self.records[cur].canonical_name.as_str()
    }
}

/// Date of one plenary session; `estimated` marks dates reconstructed from
/// public sources rather than confirmed by the parliament.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SessionDateRecord {
    pub parliament: ParliamentId,
    pub period: u32,
    pub session: u32,
    pub date: NaiveDate,
    pub estimated: bool,
}

#[derive(Debug, Clone, Default)]
pub struct SessionDates {
    map: HashMap<(ParliamentId, u32, u32), (NaiveDate, bool)>,
}

impl SessionDates {
    pub fn new(records: Vec<SessionDateRecord>) -> Result<Self> {
        let mut map = HashMap::new();
        for r in records {
            let key = (r.parliament.clone(), r.period, r.session);
            if map.insert(key, (r.date, r.estimated)).is_some() {
                return Err(Error::Config(format!(
                    "duplicate session date for {} {}/{}",
                    r.parliament, r.period, r.session
                )));
            }
        }
        Ok(SessionDates { map })
    }

    pub fn load(path: &Path) -> Result<Self> {
        let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
        Self::parse(file, path)
    }

    pub fn parse(reader: impl std::io::Read, origin: &Path) -> Result<Self> {
        let path = origin;
        let mut reader = csv_reader(reader);
        check_headers(
            &mut reader,
            path,
            &["parliament", "period", "session", "date", "estimated"],
        )?;
        let mut records = Vec::new();
        for (i, row) in reader.deserialize::<SessionDateRecord>().enumerate() {
            records.push(row.map_err(|e| Error::CsvRow {
                path: path.to_path_buf(),
                row: i + 2,
                msg: e.to_string(),
            })?);
        }
        Self::new(records)
    }

    pub fn lookup(
        &self,
        parliament: &ParliamentId,
        period: u32,
        session: u32,
    ) -> Option<(NaiveDate, bool)> {
        self.map.get(&(parliament.clone(), period, session)).copied()
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }
}

fn csv_reader<R: std::io::Read>(reader: R) -> csv::Reader<R> {
    csv::ReaderBuilder::new().has_headers(true).from_reader(reader)
}

fn check_headers<R: std::io::Read>(
    reader: &mut csv::Reader<R>,
    path: &Path,
    required: &[&str],
) -> Result<()> {
    let headers = reader.headers().map_err(|e| Error::Csv {
        path: path.to_path_buf(),
        msg: e.to_string(),
    })?;
    for col in required {
        if !headers.iter().any(|h| h == *col) {
            return Err(Error::Csv {
                path: path.to_path_buf(),
                msg: format!("missing column {col:?}"),
            });
        }
    }
    Ok(())
}
