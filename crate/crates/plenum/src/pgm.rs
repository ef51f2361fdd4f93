//! Binary PGM ("P5") decoding and encoding for page bitmaps.
//!
//! Only 8-bit grayscale is supported, which is what protocol page scans use.
//! The decoder is meant to survive arbitrary bytes: header values are bounds
//! checked before any allocation happens.

use std::path::Path;

use crate::error::{Error, Result};
use crate::preprocess::GrayBitmap;

/// Upper bound on either image dimension; a protocol page scan is far below
/// this, and it keeps hostile headers from requesting huge buffers.
const MAX_DIMENSION: usize = 1 << 16;

pub fn read_pgm(bytes: &[u8]) -> Result<GrayBitmap> {
    let mut cursor = Cursor { bytes, pos: 0 };
    let magic = cursor.token()?;
    if magic != b"P5" {
        return Err(Error::Pgm("missing P5 magic".into()));
    }
    let width = cursor.unsigned("width")?;
    let height = cursor.unsigned("height")?;
    let maxval = cursor.unsigned("maxval")?;
    if maxval == 0 || maxval > 255 {
        return Err(Error::Pgm(format!("unsupported maxval {maxval}")));
    }
    if width == 0 || height == 0 {
        return Err(Error::Pgm(format!("degenerate dimensions {width}x{height}")));
    }
    if width > MAX_DIMENSION || height > MAX_DIMENSION {
        return Err(Error::Pgm(format!("dimensions {width}x{height} too large")));
    }
    // Exactly one whitespace byte separates the header from the raster.
    cursor.single_whitespace()?;
    let expected = width * height;
    let rest = &cursor.bytes[cursor.pos..];
    if rest.len() != expected {
        return Err(Error::Pgm(format!(
            "raster holds {} bytes, header promises {expected}",
            rest.len()
        )));
    }
    GrayBitmap::new(width, height, rest.to_vec())
}

pub fn write_pgm(bitmap: &GrayBitmap) -> Vec<u8> {
    let mut out = format!("P5\n{} {}\n255\n", bitmap.width(), bitmap.height()).into_bytes();
    out.extend_from_slice(bitmap.pixels());
    out
}

pub fn load_pgm(path: &Path) -> Result<GrayBitmap> {
    let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
    read_pgm(&bytes)
}

pub fn save_pgm(path: &Path, bitmap: &GrayBitmap) -> Result<()> {
    if let Some(dir) = path.parent() {
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    }
    std::fs::write(path, write_pgm(bitmap)).map_err(|e| Error::io(path, e))
}

struct Cursor<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl Cursor<'_> {
    /// Next whitespace-delimited token, skipping `#` comment lines.
    fn token(&mut self) -> Result<&[u8]> {
        loop {
            while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_whitespace() {
                self.pos += 1;
            }
            if self.pos < self.bytes.len() && self.bytes[self.pos] == b'#' {
                while self.pos < self.bytes.len() && self.bytes[self.pos] != b'\n' {
                    self.pos += 1;
                }
                continue;
            }
            break;
        }
        let start = self.pos;
        while self.pos < self.bytes.len()
            && !self.bytes[self.pos].is_ascii_whitespace()
            && self.bytes[self.pos] != b'#'
        {
            self.pos += 1;
        }
        if self.pos == start {
            return Err(Error::Pgm("truncated header".into()));
        }
        Ok(&self.bytes[start..self.pos])
    }

    fn unsigned(&mut self, what: &str) -> Result<usize> {
        let token = self.token()?;
        // cap token length so a malicious header cannot overflow
        if token.len() > 8 {
            return Err(Error::Pgm(format!("{what} out of range")));
        }
        let s = std::str::from_utf8(token).map_err(|_| Error::Pgm(format!("bad {what}")))?;
        s.parse::<usize>()
            .map_err(|_| Error::Pgm(format!("bad {what} {s:?}")))
    }

    fn single_whitespace(&mut self) -> Result<()> {
        if self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_whitespace() {
            self.pos += 1;
            Ok(())
        } else {
            Err(Error::Pgm("missing separator before raster".into()))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip() {
        let b = GrayBitmap::new(3, 2, vec![0, 10, 20, 30, 40, 250]).unwrap();
        let encoded = write_pgm(&b);
        let decoded = read_pgm(&encoded).unwrap();
        assert_eq!(decoded, b);
        // canonical bytes survive a second trip untouched
        assert_eq!(write_pgm(&decoded), encoded);
    }

    #[test]
    fn accepts_comments_and_extra_whitespace() {
        let mut bytes = b"P5 # a scanner remark\n# another\n 2\t1\n255\n".to_vec();
        bytes.extend_from_slice(&[7, 9]);
        let b = read_pgm(&bytes).unwrap();
        assert_eq!((b.width(), b.height()), (2, 1));
        assert_eq!(b.pixels(), &[7, 9]);
    }

    #[test]
    fn rejects_garbage() {
        assert!(read_pgm(b"").is_err());
        assert!(read_pgm(b"P6\n1 1\n255\nX").is_err());
        assert!(read_pgm(b"P5\n0 5\n255\n").is_err());
        assert!(read_pgm(b"P5\n2 2\n255\nab").is_err()); // short raster
        assert!(read_pgm(b"P5\n2 2\n70000\nabcd").is_err());
        assert!(read_pgm(b"P5\n99999999999999 1\n255\n").is_err());
    }
}
