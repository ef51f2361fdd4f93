//! Converts raw stenographic parliamentary protocols — scanned page bitmaps
//! or extracted page text — into a structured corpus of individual speeches
//! enriched with speaker metadata.
//!
//! The pipeline has four stages:
//!
//! 1. [`preprocess`] binarizes and deskews page scans for an external OCR
//!    engine (the engine itself stays behind [`preprocess::OcrAdapter`]).
//! 2. [`spellcheck`] repairs OCR character errors against a frequency
//!    lexicon extended with the surnames of all members of parliament.
//! 3. [`segmenter`] finds the session body inside a protocol and splits it
//!    into chair statements, speeches and bracketed comments, attributing
//!    each to a speaker from the [`metadata`] roster.
//! 4. [`corpus`] writes the result as JSONL, one record per segment, in two
//!    text variants (original and spell-checked); [`stats`] aggregates
//!    counts and the average speaker age per year.
//!
//! [`pipeline`] wires the stages together behind a declarative TOML
//! configuration; the `plenum` binary is a thin CLI over it.

pub mod corpus;
pub mod error;
pub mod metadata;
pub mod patterns;
pub mod pgm;
pub mod pipeline;
pub mod preprocess;
pub mod segmenter;
pub mod spellcheck;
pub mod stats;
pub mod synth;

pub use error::{Error, Result};
