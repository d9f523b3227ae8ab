//! Binary PGM (P5) images with `# key=value` metadata comments.
//!
//! Written images are 16-bit big-endian, scaled so the brightest pixel is
//! 65535. The reader also accepts 8-bit files and comments anywhere in the
//! header.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum PgmError {
    #[error("not a binary PGM (missing P5 magic)")]
    Magic,
    #[error("truncated header")]
    Header,
    #[error("bad header field '{0}'")]
    Field(String),
    #[error("expected {expected} bytes of pixel data, found {found}")]
    Truncated { expected: usize, found: usize },
    #[error("image has no pixels")]
    Empty,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PgmImage {
    pub width: usize,
    pub height: usize,
    pub maxval: u16,
    /// Row-major, top row first.
    pub samples: Vec<u16>,
    pub meta: BTreeMap<String, String>,
}

impl PgmImage {
    /// Quantize `values` (row-major) against their global maximum. Negative
    /// and non-finite values map to 0; an all-zero image stays zero.
    pub fn from_values(width: usize, height: usize, values: &[f64]) -> Self {
        assert_eq!(values.len(), width * height, "pixel count");
        let peak = values
            .iter()
            .copied()
            .filter(|v| v.is_finite())
            .fold(0.0_f64, f64::max);
        let samples = values
            .iter()
            .map(|&v| {
                if peak > 0.0 && v.is_finite() && v > 0.0 {
                    (v / peak * 65535.0).round().min(65535.0) as u16
                } else {
                    0
                }
            })
            .collect();
        Self {
            width,
            height,
            maxval: 65535,
            samples,
            meta: BTreeMap::new(),
        }
    }

    pub fn with_meta(mut self, key: &str, value: impl ToString) -> Self {
        self.meta.insert(key.to_string(), value.to_string());
        self
    }

    pub fn values(&self) -> Vec<f64> {
        self.samples.iter().map(|&s| f64::from(s)).collect()
    }

    pub fn meta_f64(&self, key: &str) -> Option<Result<f64, PgmError>> {
        self.meta.get(key).map(|v| {
            v.parse()
                .map_err(|_| PgmError::Field(format!("{key}={v}")))
        })
    }

    pub fn encode(&self) -> Vec<u8> {
        let mut header = String::from("P5\n");
        for (k, v) in &self.meta {
            let _ = writeln!(header, "# {k}={v}");
        }
        let _ = write!(header, "{} {}\n{}\n", self.width, self.height, self.maxval);
        let wide = self.maxval > 255;
        let mut out = header.into_bytes();
        out.reserve(self.samples.len() * if wide { 2 } else { 1 });
        for &s in &self.samples {
            if wide {
                out.extend_from_slice(&s.to_be_bytes());
            } else {
                out.push(s as u8);
            }
        }
        out
    }

    pub fn decode(bytes: &[u8]) -> Result<Self, PgmError> {
        if bytes.len() < 2 || &bytes[..2] != b"P5" {
            return Err(PgmError::Magic);
        }
        let mut pos = 2;
        let mut meta = BTreeMap::new();
        let mut fields = [0usize; 3];
        for field in &mut fields {
            let token = next_token(bytes, &mut pos, &mut meta)?;
            *field = token
                .parse()
                .map_err(|_| PgmError::Field(token.to_string()))?;
        }
        // exactly one whitespace byte separates the header from the raster
        if pos >= bytes.len() || !bytes[pos].is_ascii_whitespace() {
            return Err(PgmError::Header);
        }
        pos += 1;
        let [width, height, maxval] = fields;
        if width == 0 || height == 0 {
            return Err(PgmError::Empty);
        }
        if maxval == 0 || maxval > 65535 {
            return Err(PgmError::Field(format!("maxval {maxval}")));
        }
        let bpp = if maxval > 255 { 2 } else { 1 };
        let expected = width * height * bpp;
        let data = &bytes[pos..];
        if data.len() < expected {
            return Err(PgmError::Truncated {
                expected,
                found: data.len(),
            });
        }
        let samples = if bpp == 2 {
            data[..expected]
                .chunks_exact(2)
                .map(|c| u16::from_be_bytes([c[0], c[1]]))
                .collect()
        } else {
            data[..expected].iter().map(|&b| u16::from(b)).collect()
        };
        Ok(Self {
            width,
            height,
            maxval: maxval as u16,
            samples,
            meta,
        })
    }
}

/// Next whitespace-delimited header token, collecting `# key=value`
/// comments on the way.
fn next_token<'a>(
    bytes: &'a [u8],
    pos: &mut usize,
    meta: &mut BTreeMap<String, String>,
) -> Result<&'a str, PgmError> {
    loop {
        while *pos < bytes.len() && bytes[*pos].is_ascii_whitespace() {
            *pos += 1;
        }
        if *pos >= bytes.len() {
            return Err(PgmError::Header);
        }
        if bytes[*pos] == b'#' {
            let start = *pos + 1;
            while *pos < bytes.len() && bytes[*pos] != b'\n' {
                *pos += 1;
            }
            let comment = String::from_utf8_lossy(&bytes[start..*pos]);
            if let Some((k, v)) = comment.split_once('=') {
                meta.insert(k.trim().to_string(), v.trim().to_string());
            }
            continue;
        }
        let start = *pos;
        while *pos < bytes.len() && !bytes[*pos].is_ascii_whitespace() && bytes[*pos] != b'#' {
            *pos += 1;
        }
        return std::str::from_utf8(&bytes[start..*pos]).map_err(|_| PgmError::Header);
    }
}
