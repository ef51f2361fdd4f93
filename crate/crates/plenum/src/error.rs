use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("invalid bitmap: {0}")]
    Bitmap(String),

    /// Otsu's threshold is undefined on a histogram with no pixel mass.
    #[error("empty image: intensity histogram has no pixel mass")]
    EmptyImage,

    #[error("invalid PGM data: {0}")]
    Pgm(String),

    #[error("{}: line {line}: {msg}", path.display())]
    Lexicon {
        path: PathBuf,
        line: usize,
        msg: String,
    },

    /// Row-level CSV failure; `row` is 1-based and counts the header.
    #[error("{}: row {row}: {msg}", path.display())]
    CsvRow {
        path: PathBuf,
        row: usize,
        msg: String,
    },

    #[error("{}: {msg}", path.display())]
    Csv { path: PathBuf, msg: String },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("corpus line {line}: {msg}")]
    CorpusLine { line: usize, msg: String },

    #[error("corpus: {0}")]
    Corpus(String),

    #[error("document {0}: {1}")]
    Document(String, String),
}

impl Error {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
