//! End-to-end orchestration behind a declarative TOML configuration.
//!
//! The pipeline walks configured input trees, one directory per
//! parliament, and processes documents independently: a bad scan is
//! skipped and reported, the run continues. Workers only parallelize
//! per-document computation; all files are written by a single thread in
//! sorted document order, so output bytes are identical no matter how
//! many workers ran.
//!
//! Input file naming: `{period}-{session}.txt` for native text,
//! `{period}-{session}.ocr.txt` for recognizer output (the only kind that
//! goes through spelling correction). Scans bundling several sessions
//! list them as `{period}-{s1}+{s2}.ocr.txt`.

use std::collections::{BTreeMap, HashSet};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::corpus::{self, CorpusRecord};
use crate::error::{Error, Result};
use crate::metadata::{ParliamentId, PartyRegistry, Roster, SessionDates};
use crate::patterns::PatternSet;
use crate::pgm;
use crate::preprocess;
use crate::segmenter::{self, RawDocument, SegmentKind, SourceKind};
use crate::spellcheck::{self, CorrectionDictionary};
use crate::stats::{self, AgeWeighting};

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PipelineConfig {
    /// Worker threads for document-level parallelism.
    #[serde(default = "default_workers")]
    pub workers: usize,
    /// Merge predecessor parties into their successor in statistics.
    #[serde(default)]
    pub merge_successors: bool,
    /// Pattern-set file; built-in defaults when absent.
    #[serde(default)]
    pub patterns: Option<PathBuf>,
    /// Input directory per parliament.
    pub inputs: BTreeMap<String, PathBuf>,
    pub metadata: MetadataPaths,
    #[serde(default)]
    pub spellcheck: SpellcheckSection,
    pub output: OutputSection,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MetadataPaths {
    pub roster: PathBuf,
    pub parties: PathBuf,
    pub sessions: PathBuf,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpellcheckSection {
    /// `token<TAB>frequency` lexicon; required when correction is on.
    pub lexicon: Option<PathBuf>,
    /// Extra protected surnames, one per line; roster surnames are always
    /// protected.
    pub protected_names: Option<PathBuf>,
    /// Defaults to "on when a lexicon is configured".
    pub enabled: Option<bool>,
}

impl SpellcheckSection {
    pub fn effective(&self) -> bool {
        self.enabled.unwrap_or(self.lexicon.is_some())
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSection {
    /// Corpus tree root: `{root}/{parliament}/{period}/{session}.jsonl`.
    pub root: PathBuf,
    /// Mirror tree with the uncorrected text; default `{root}-original`.
    #[serde(default)]
    pub original_root: Option<PathBuf>,
    /// Corrected text files from the `correct` command; default
    /// `{root}-corrected`.
    #[serde(default)]
    pub corrected_root: Option<PathBuf>,
    /// Prepared page images and the recognizer manifest; default
    /// `{root}-preprocessed`.
    #[serde(default)]
    pub preprocessed_root: Option<PathBuf>,
    /// Statistics CSVs; default `{root}-stats`.
    #[serde(default)]
    pub stats_root: Option<PathBuf>,
}

fn default_workers() -> usize {
    1
}

fn sibling(root: &Path, suffix: &str) -> PathBuf {
    let name = root
        .file_name()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "out".to_string());
    root.with_file_name(format!("{name}{suffix}"))
}

impl PipelineConfig {
    /// Parses a config without touching the file system; paths stay as
    /// written.
    pub fn parse(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    /// Loads a config file, resolves relative paths against its directory
    /// and validates that every referenced path exists.
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let mut config = Self::parse(&text)?;
        let base = path.parent().unwrap_or_else(|| Path::new("."));
        config.resolve(base);
        config.validate()?;
        Ok(config)
    }

    fn resolve(&mut self, base: &Path) {
        fn fix(base: &Path, p: &mut PathBuf) {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        }
        for dir in self.inputs.values_mut() {
            fix(base, dir);
        }
        fix(base, &mut self.metadata.roster);
        fix(base, &mut self.metadata.parties);
        fix(base, &mut self.metadata.sessions);
        fix(base, &mut self.output.root);
        for p in [
            &mut self.spellcheck.lexicon,
            &mut self.spellcheck.protected_names,
            &mut self.patterns,
            &mut self.output.original_root,
            &mut self.output.corrected_root,
            &mut self.output.preprocessed_root,
            &mut self.output.stats_root,
        ]
        .into_iter()
        .flatten()
        {
            fix(base, p);
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.workers == 0 {
            return Err(Error::Config("workers must be >= 1".into()));
        }
        if self.inputs.is_empty() {
            return Err(Error::Config("no input directories configured".into()));
        }
        for (parliament, dir) in &self.inputs {
            if !safe_component(parliament) {
                return Err(Error::Config(format!(
                    "parliament id {parliament:?} is not a safe path component"
                )));
            }
            if !dir.is_dir() {
                return Err(Error::Config(format!(
                    "input directory {} does not exist",
                    dir.display()
                )));
            }
        }
        for (what, path) in [
            ("roster", &self.metadata.roster),
            ("parties", &self.metadata.parties),
            ("sessions", &self.metadata.sessions),
        ] {
            if !path.is_file() {
                return Err(Error::Config(format!(
                    "{what} file {} does not exist",
                    path.display()
                )));
            }
        }
        for path in [
            &self.spellcheck.lexicon,
            &self.spellcheck.protected_names,
            &self.patterns,
        ]
        .into_iter()
        .flatten()
        {
            if !path.is_file() {
                return Err(Error::Config(format!("{} does not exist", path.display())));
            }
        }
        if self.spellcheck.enabled == Some(true) && self.spellcheck.lexicon.is_none() {
            return Err(Error::Config(
                "spellcheck is enabled but no lexicon is configured".into(),
            ));
        }
        Ok(())
    }

    pub fn original_root(&self) -> PathBuf {
        self.output
            .original_root
            .clone()
            .unwrap_or_else(|| sibling(&self.output.root, "-original"))
    }

    pub fn corrected_root(&self) -> PathBuf {
        self.output
            .corrected_root
            .clone()
            .unwrap_or_else(|| sibling(&self.output.root, "-corrected"))
    }

    pub fn preprocessed_root(&self) -> PathBuf {
        self.output
            .preprocessed_root
            .clone()
            .unwrap_or_else(|| sibling(&self.output.root, "-preprocessed"))
    }

    pub fn stats_root(&self) -> PathBuf {
        self.output
            .stats_root
            .clone()
            .unwrap_or_else(|| sibling(&self.output.root, "-stats"))
    }

    pub fn load_patterns(&self) -> Result<PatternSet> {
        match &self.patterns {
            Some(path) => PatternSet::load(path),
            None => Ok(PatternSet::default()),
        }
    }
}

fn safe_component(s: &str) -> bool {
    !s.is_empty() && !s.starts_with('.') && !s.contains(['/', '\\', ':'])
}

/// One discovered input file.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InputDocument {
    pub parliament: String,
    pub path: PathBuf,
    pub period: u32,
    pub sessions: Vec<u32>,
    pub source_kind: SourceKind,
}

/// `{period}-{session}[+{session}...][.ocr].txt`
pub fn parse_document_name(name: &str) -> Option<(u32, Vec<u32>, SourceKind)> {
    let stem = name.strip_suffix(".txt")?;
    let (stem, kind) = match stem.strip_suffix(".ocr") {
        Some(s) => (s, SourceKind::OcrText),
        None => (stem, SourceKind::NativeText),
    };
    let (period, sessions) = stem.split_once('-')?;
    let period: u32 = period.parse().ok()?;
    let sessions: Vec<u32> = sessions
        .split('+')
        .map(str::parse)
        .collect::<std::result::Result<_, _>>()
        .ok()?;
    if sessions.is_empty() {
        return None;
    }
    Some((period, sessions, kind))
}

/// Walks the input trees in sorted order. Files that do not follow the
/// naming convention come back as failed reports, not hard errors.
pub fn discover_inputs(config: &PipelineConfig) -> (Vec<InputDocument>, Vec<DocumentReport>) {
    let mut docs = Vec::new();
    let mut failures = Vec::new();
    for (parliament, dir) in &config.inputs {
        let walker = walkdir::WalkDir::new(dir)
            .sort_by_file_name()
            .into_iter()
            .filter_map(|e| e.ok())
            .filter(|e| e.file_type().is_file());
        for entry in walker {
            let name = entry.file_name().to_string_lossy().into_owned();
            if !name.ends_with(".txt") {
                continue;
            }
            match parse_document_name(&name) {
                Some((period, sessions, source_kind)) => docs.push(InputDocument {
                    parliament: parliament.clone(),
                    path: entry.path().to_path_buf(),
                    period,
                    sessions,
                    source_kind,
                }),
                None => failures.push(DocumentReport {
                    path: entry.path().display().to_string(),
                    parliament: parliament.clone(),
                    period: None,
                    sessions: Vec::new(),
                    error: Some(format!(
                        "file name {name:?} does not match {{period}}-{{session}}[.ocr].txt"
                    )),
                }),
            }
        }
    }
    docs.sort_by(|a, b| (&a.parliament, &a.path).cmp(&(&b.parliament, &b.path)));
    (docs, failures)
}

#[derive(Debug, Clone, Serialize)]
pub struct SessionReport {
    pub session: u32,
    pub start_method: String,
    pub end_method: String,
    pub segments: usize,
    pub speeches: usize,
    pub unresolved_speeches: usize,
    pub corrections: usize,
    pub output: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct DocumentReport {
    pub path: String,
    pub parliament: String,
    pub period: Option<u32>,
    pub sessions: Vec<SessionReport>,
    pub error: Option<String>,
}

#[derive(Debug, Default)]
pub struct RunSummary {
    pub documents: usize,
    pub failed: usize,
    pub segments: usize,
    pub reports: Vec<DocumentReport>,
}

#[derive(Debug, Clone, Default)]
pub struct SplitOptions {
    /// Override the configured worker count.
    pub workers: Option<usize>,
    /// Force spelling correction off (`--no-spellcheck`).
    pub no_spellcheck: bool,
    /// Write a machine-readable JSONL run report here.
    pub report: Option<PathBuf>,
}

struct SessionOutput {
    session: u32,
    records: Vec<CorpusRecord>,
    original_records: Vec<CorpusRecord>,
    report: SessionReport,
}

/// Splits every configured document into corpus records and writes the
/// corpus tree plus its uncorrected mirror. Returns per-document reports;
/// `failed` counts documents that were skipped.
pub fn run_split(config: &PipelineConfig, options: &SplitOptions) -> Result<RunSummary> {
    let patterns = config.load_patterns()?;
    let roster = Roster::load(&config.metadata.roster)?;
    let parties = PartyRegistry::load(&config.metadata.parties)?;
    let dates = SessionDates::load(&config.metadata.sessions)?;

    let spellcheck_on = !options.no_spellcheck && config.spellcheck.effective();
    let dictionary = if spellcheck_on {
        let lexicon_path = config.spellcheck.lexicon.as_ref().ok_or_else(|| {
            Error::Config("spellcheck is enabled but no lexicon is configured".into())
        })?;
        let lexicon = spellcheck::load_lexicon(lexicon_path)?;
        let mut protected: Vec<String> = roster.surnames().into_iter().collect();
        if let Some(path) = &config.spellcheck.protected_names {
            protected.extend(spellcheck::load_protected_names(path)?);
        }
        Some(CorrectionDictionary::build(lexicon, protected))
    } else {
        None
    };

    let (documents, mut reports) = discover_inputs(config);
    let workers = options.workers.unwrap_or(config.workers).max(1);
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| Error::Config(format!("worker pool: {e}")))?;
    let results: Vec<(Vec<SessionOutput>, DocumentReport)> = pool.install(|| {
        use rayon::prelude::*;
        documents
            .par_iter()
            .map(|doc| {
                process_document(doc, &roster, &parties, &dates, &patterns, dictionary.as_ref())
            })
            .collect()
    });

    // single-threaded write phase in deterministic document order
    let out_root = &config.output.root;
    let original_root = config.original_root();
    let mut written: HashSet<PathBuf> = HashSet::new();
    let mut summary = RunSummary::default();
    for (outputs, mut report) in results {
        summary.documents += 1;
        for output in outputs {
            let period = report.period.unwrap_or(0);
            let target = corpus::corpus_path(out_root, &report.parliament, period, output.session);
            if !written.insert(target.clone()) {
                report.error = Some(format!(
                    "output {} already produced by an earlier document",
                    target.display()
                ));
                continue;
            }
            corpus::write_records_to_path(&output.records, &target)?;
            let mirror =
                corpus::corpus_path(&original_root, &report.parliament, period, output.session);
            corpus::write_records_to_path(&output.original_records, &mirror)?;
            summary.segments += output.records.len();
            let mut session_report = output.report;
            session_report.output = target.display().to_string();
            report.sessions.push(session_report);
        }
        reports.push(report);
    }
    reports.sort_by(|a, b| (&a.parliament, &a.path).cmp(&(&b.parliament, &b.path)));
    summary.failed = reports.iter().filter(|r| r.error.is_some()).count();
    summary.reports = reports;

    if let Some(path) = &options.report {
        write_report(&summary.reports, path)?;
    }
    Ok(summary)
}

fn process_document(
    input: &InputDocument,
    roster: &Roster,
    parties: &PartyRegistry,
    dates: &SessionDates,
    patterns: &PatternSet,
    dictionary: Option<&CorrectionDictionary>,
) -> (Vec<SessionOutput>, DocumentReport) {
    let mut report = DocumentReport {
        path: input.path.display().to_string(),
        parliament: input.parliament.clone(),
        period: Some(input.period),
        sessions: Vec::new(),
        error: None,
    };
    let text = match std::fs::read_to_string(&input.path) {
        Ok(t) => t,
        Err(e) => {
            report.error = Some(format!("unreadable: {e}"));
            return (Vec::new(), report);
        }
    };
    let parliament = ParliamentId(input.parliament.clone());
    let scoped = roster.scope(&parliament, input.period);
    if scoped.is_empty() {
        report.error = Some(format!(
            "no roster entries for {} period {}",
            input.parliament, input.period
        ));
        return (Vec::new(), report);
    }

    let raw = RawDocument {
        parliament,
        period: input.period,
        session_numbers: input.sessions.clone(),
        lines: text.lines().map(str::to_owned).collect(),
        source_kind: input.source_kind,
    };
    if raw.lines.is_empty() {
        report.error = Some("empty document".into());
        return (Vec::new(), report);
    }

    let mut outputs = Vec::new();
    for part in segmenter::split_multi_session(raw, patterns) {
        let session = part.session_numbers.first().copied().unwrap_or(0);
        let (working, original_lines, corrections) = match (part.source_kind, dictionary) {
            (SourceKind::OcrText, Some(dict)) => {
                let (corrected, log) = spellcheck::correct_lines(&part.lines, dict);
                (corrected, Some(part.lines.clone()), log.len())
            }
            _ => (part.lines.clone(), None, 0),
        };
        let doc = RawDocument {
            lines: working,
            ..part
        };
        let body = segmenter::session_body(&doc.lines, patterns);
        let segments = segmenter::split_speeches(&doc, &body, &scoped, parties, dates, patterns);
        let records: Vec<CorpusRecord> = segments
            .iter()
            .map(|s| corpus::record_from_segment(s, &scoped, original_lines.as_deref()))
            .collect();
        let original_records: Vec<CorpusRecord> =
            records.iter().map(corpus::as_original_variant).collect();
        let speeches = segments
            .iter()
            .filter(|s| s.kind == SegmentKind::Speech)
            .count();
        let unresolved_speeches = segments
            .iter()
            .filter(|s| {
                s.kind == SegmentKind::Speech
                    && !matches!(s.speaker, crate::metadata::SpeakerRef::Mp { .. })
            })
            .count();
        outputs.push(SessionOutput {
            session,
            report: SessionReport {
                session,
                start_method: body.start_method.as_str().to_string(),
                end_method: body.end_method.as_str().to_string(),
                segments: segments.len(),
                speeches,
                unresolved_speeches,
                corrections,
                output: String::new(),
            },
            records,
            original_records,
        });
    }
    (outputs, report)
}

fn write_report(reports: &[DocumentReport], path: &Path) -> Result<()> {
    if let Some(dir) = path.parent() {
        if !dir.as_os_str().is_empty() {
            std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        }
    }
    let mut out = String::new();
    for report in reports {
        out.push_str(
            &serde_json::to_string(report)
                .map_err(|e| Error::Corpus(format!("report serialization: {e}")))?,
        );
        out.push('\n');
    }
    std::fs::write(path, out).map_err(|e| Error::io(path, e))
}

/// Corrects every OCR text document into the corrected tree, with one
/// JSONL change log per document. Native-text documents are not touched.
pub fn run_correct(config: &PipelineConfig, options: &SplitOptions) -> Result<RunSummary> {
    let lexicon_path = config
        .spellcheck
        .lexicon
        .as_ref()
        .ok_or_else(|| Error::Config("correct needs [spellcheck] lexicon".into()))?;
    let roster = Roster::load(&config.metadata.roster)?;
    let lexicon = spellcheck::load_lexicon(lexicon_path)?;
    let mut protected: Vec<String> = roster.surnames().into_iter().collect();
    if let Some(path) = &config.spellcheck.protected_names {
        protected.extend(spellcheck::load_protected_names(path)?);
    }
    let dictionary = CorrectionDictionary::build(lexicon, protected);

    let (documents, mut reports) = discover_inputs(config);
    let workers = options.workers.unwrap_or(config.workers).max(1);
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| Error::Config(format!("worker pool: {e}")))?;

    struct Corrected {
        relative: PathBuf,
        lines: Vec<String>,
        log: Vec<spellcheck::ChangeLogEntry>,
        report: DocumentReport,
    }

    let results: Vec<Option<Corrected>> = pool.install(|| {
        use rayon::prelude::*;
        documents
            .par_iter()
            .map(|doc| {
                if doc.source_kind != SourceKind::OcrText {
                    return None;
                }
                let mut report = DocumentReport {
                    path: doc.path.display().to_string(),
                    parliament: doc.parliament.clone(),
                    period: Some(doc.period),
                    sessions: Vec::new(),
                    error: None,
                };
                let relative =
                    Path::new(&doc.parliament).join(doc.path.file_name().unwrap_or_default());
                let (lines, log) = match std::fs::read_to_string(&doc.path) {
                    Ok(text) => {
                        let lines: Vec<String> = text.lines().map(str::to_owned).collect();
                        spellcheck::correct_lines(&lines, &dictionary)
                    }
                    Err(e) => {
                        report.error = Some(format!("unreadable: {e}"));
                        (Vec::new(), Vec::new())
                    }
                };
                Some(Corrected {
                    relative,
                    lines,
                    log,
                    report,
                })
            })
            .collect()
    });

    let root = config.corrected_root();
    let mut summary = RunSummary::default();
    for corrected in results.into_iter().flatten() {
        summary.documents += 1;
        let mut report = corrected.report;
        if report.error.is_none() {
            let target = root.join(&corrected.relative);
            if let Some(dir) = target.parent() {
                std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
            }
            let mut text = corrected.lines.join("\n");
            text.push('\n');
            std::fs::write(&target, text).map_err(|e| Error::io(&target, e))?;

            let log_path = target.with_extension("changes.jsonl");
            let mut log_text = String::new();
            for entry in &corrected.log {
                log_text.push_str(
                    &serde_json::to_string(entry)
                        .map_err(|e| Error::Corpus(format!("change log serialization: {e}")))?,
                );
                log_text.push('\n');
            }
            std::fs::write(&log_path, log_text).map_err(|e| Error::io(&log_path, e))?;
            report.sessions.push(SessionReport {
                session: 0,
                start_method: String::new(),
                end_method: String::new(),
                segments: 0,
                speeches: 0,
                unresolved_speeches: 0,
                corrections: corrected.log.len(),
                output: target.display().to_string(),
            });
        }
        reports.push(report);
    }
    reports.sort_by(|a, b| (&a.parliament, &a.path).cmp(&(&b.parliament, &b.path)));
    summary.failed = reports.iter().filter(|r| r.error.is_some()).count();
    summary.reports = reports;
    if let Some(path) = &options.report {
        write_report(&summary.reports, path)?;
    }
    Ok(summary)
}

/// One row of the recognizer manifest: which text file is expected for
/// which prepared page image.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ManifestRow {
    pub source: String,
    pub output: String,
    pub expected_text: String,
    pub skew_angle: f64,
    pub skew_confidence: f64,
}

#[derive(Debug, Default)]
pub struct PreprocessSummary {
    pub pages: usize,
    pub failed: usize,
    pub manifest: PathBuf,
    pub errors: Vec<String>,
}

/// Binarizes and deskews every page scan in the input trees, writing the
/// prepared pages and the recognizer invocation manifest.
pub fn run_preprocess(config: &PipelineConfig) -> Result<PreprocessSummary> {
    let root = config.preprocessed_root();
    let mut rows: Vec<ManifestRow> = Vec::new();
    let mut summary = PreprocessSummary::default();
    for (parliament, dir) in &config.inputs {
        let walker = walkdir::WalkDir::new(dir)
            .sort_by_file_name()
            .into_iter()
            .filter_map(|e| e.ok())
            .filter(|e| e.file_type().is_file());
        for entry in walker {
            if entry.path().extension().and_then(|e| e.to_str()) != Some("pgm") {
                continue;
            }
            summary.pages += 1;
            let target = root
                .join(parliament)
                .join(entry.path().file_name().unwrap_or_default());
            let outcome = pgm::load_pgm(entry.path())
                .and_then(|page| preprocess::prepare_page(&page))
                .and_then(|(prepared, estimate)| {
                    pgm::save_pgm(&target, &prepared)?;
                    Ok(estimate)
                });
            match outcome {
                Ok(estimate) => rows.push(ManifestRow {
                    source: entry.path().display().to_string(),
                    output: target.display().to_string(),
                    expected_text: target.with_extension("txt").display().to_string(),
                    skew_angle: estimate.angle,
                    skew_confidence: estimate.confidence,
                }),
                Err(e) => {
                    summary.failed += 1;
                    summary
                        .errors
                        .push(format!("{}: {e}", entry.path().display()));
                }
            }
        }
    }
    std::fs::create_dir_all(&root).map_err(|e| Error::io(&root, e))?;
    let manifest = root.join("manifest.jsonl");
    let mut text = String::new();
    for row in &rows {
        text.push_str(
            &serde_json::to_string(row)
                .map_err(|e| Error::Corpus(format!("manifest serialization: {e}")))?,
        );
        text.push('\n');
    }
    std::fs::write(&manifest, text).map_err(|e| Error::io(&manifest, e))?;
    summary.manifest = manifest;
    Ok(summary)
}

#[derive(Debug, Clone)]
pub struct StatsOptions {
    pub merge_successors: Option<bool>,
    pub thousands: bool,
    pub weighting: AgeWeighting,
}

impl Default for StatsOptions {
    fn default() -> Self {
        StatsOptions {
            merge_successors: None,
            thousands: false,
            weighting: AgeWeighting::Segments,
        }
    }
}

#[derive(Debug, Default)]
pub struct StatsSummary {
    pub records: usize,
    pub counts_csv: PathBuf,
    pub age_csv: PathBuf,
}

/// Aggregates the written corpus into `counts.csv` and `age_series.csv`.
/// An empty corpus yields tables with headers only.
pub fn run_stats(config: &PipelineConfig, options: &StatsOptions) -> Result<StatsSummary> {
    let merge = options.merge_successors.unwrap_or(config.merge_successors);
    let registry = if merge {
        Some(PartyRegistry::load(&config.metadata.parties)?)
    } else {
        None
    };

    let mut records: Vec<CorpusRecord> = Vec::new();
    let corpus_root = &config.output.root;
    if corpus_root.is_dir() {
        let walker = walkdir::WalkDir::new(corpus_root)
            .sort_by_file_name()
            .into_iter()
            .filter_map(|e| e.ok())
            .filter(|e| e.file_type().is_file());
        for entry in walker {
            if entry.path().extension().and_then(|e| e.to_str()) == Some("jsonl") {
                records.extend(corpus::read_corpus_path(entry.path())?);
            }
        }
    }

    let counts = stats::count_segments(&records, registry.as_ref());
    let ages = stats::average_age_series(&records, options.weighting);

    let root = config.stats_root();
    std::fs::create_dir_all(&root).map_err(|e| Error::io(&root, e))?;
    let counts_csv = root.join("counts.csv");
    let mut buf = Vec::new();
    stats::write_counts_csv(&counts, &mut buf, options.thousands)?;
    std::fs::write(&counts_csv, &buf).map_err(|e| Error::io(&counts_csv, e))?;

    let age_csv = root.join("age_series.csv");
    let mut buf = Vec::new();
    stats::write_age_csv(&ages, &mut buf)?;
    std::fs::write(&age_csv, &buf).map_err(|e| Error::io(&age_csv, e))?;

    Ok(StatsSummary {
        records: records.len(),
        counts_csv,
        age_csv,
    })
}
