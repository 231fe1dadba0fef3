//! Binary PGM (`P5`) and PPM (`P6`) with maxval 255.

use thiserror::Error;

use super::{Channels, RawImage};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PnmError {
    #[error("unsupported format: {0}")]
    UnsupportedFormat(String),
    #[error("header syntax error at offset {offset}: {reason}")]
    HeaderSyntax { offset: usize, reason: &'static str },
    #[error("pixel data truncated: expected {expected} bytes, found {found}")]
    TruncatedPixels { expected: usize, found: usize },
}

struct Header<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl Header<'_> {
    fn syntax<T>(&self, reason: &'static str) -> Result<T, PnmError> {
        Err(PnmError::HeaderSyntax {
            offset: self.pos,
            reason,
        })
    }

    /// Skips whitespace and `#` comments that run to end of line.
    fn skip_separators(&mut self) {
        while let Some(&b) = self.bytes.get(self.pos) {
            if b.is_ascii_whitespace() {
                self.pos += 1;
            } else if b == b'#' {
                while let Some(&c) = self.bytes.get(self.pos) {
                    self.pos += 1;
                    if c == b'\n' || c == b'\r' {
                        break;
                    }
                }
            } else {
                break;
            }
        }
    }

    fn number(&mut self) -> Result<u32, PnmError> {
        let had_separator = self
            .bytes
            .get(self.pos)
            .is_some_and(|b| b.is_ascii_whitespace() || *b == b'#');
        self.skip_separators();
        if !had_separator {
            return self.syntax("expected whitespace");
        }
        let start = self.pos;
        let mut value: u32 = 0;
        while let Some(&b) = self.bytes.get(self.pos) {
            if !b.is_ascii_digit() {
                break;
            }
            value = match value.checked_mul(10).and_then(|v| v.checked_add(u32::from(b - b'0'))) {
                Some(v) => v,
                None => return self.syntax("number too large"),
            };
            self.pos += 1;
        }
        if self.pos == start {
            return self.syntax("expected a decimal number");
        }
        Ok(value)
    }
}

pub fn read_pnm(bytes: &[u8]) -> Result<RawImage, PnmError> {
    let magic = bytes.get(..2).ok_or(PnmError::HeaderSyntax {
        offset: 0,
        reason: "missing magic number",
    })?;
    let channels = match magic {
        b"P5" => Channels::Gray,
        b"P6" => Channels::Rgb,
        [b'P', b'1'..=b'4' | b'7'] => {
            return Err(PnmError::UnsupportedFormat(format!(
                "{} (only binary P5 and P6 are supported)",
                String::from_utf8_lossy(magic)
            )))
        }
        _ => {
            return Err(PnmError::HeaderSyntax {
                offset: 0,
                reason: "unknown magic number",
            })
        }
    };

    let mut h = Header { bytes, pos: 2 };
    let width = h.number()?;
    let height = h.number()?;
    let maxval = h.number()?;
    if width == 0 || height == 0 {
        return Err(PnmError::HeaderSyntax {
            offset: h.pos,
            reason: "zero image dimension",
        });
    }
    if maxval != 255 {
        return Err(PnmError::UnsupportedFormat(format!(
            "maxval {maxval} (only 255 is supported)"
        )));
    }
    // Exactly one whitespace byte separates the header from the raster.
    match bytes.get(h.pos) {
        Some(b) if b.is_ascii_whitespace() => h.pos += 1,
        _ => return h.syntax("expected whitespace before pixel data"),
    }

    let expected = (width as usize)
        .checked_mul(height as usize)
        .and_then(|n| n.checked_mul(channels.count()))
        .ok_or(PnmError::HeaderSyntax {
            offset: h.pos,
            reason: "image too large",
        })?;
    let raster = &bytes[h.pos..];
    if raster.len() < expected {
        return Err(PnmError::TruncatedPixels {
            expected,
            found: raster.len(),
        });
    }
    Ok(RawImage::new(width, height, channels, raster[..expected].to_vec()).expect("length checked"))
}

/// Canonical encoding: `P5 <w> <h> 255\n` (or `P6`) followed by the samples.
pub fn write_pnm(img: &RawImage) -> Vec<u8> {
    let magic = match img.channels() {
        Channels::Gray => "P5",
        Channels::Rgb => "P6",
    };
    let header = format!("{magic} {} {} 255\n", img.width(), img.height());
    let mut out = Vec::with_capacity(header.len() + img.samples().len());
    out.extend_from_slice(header.as_bytes());
    out.extend_from_slice(img.samples());
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reads_gray_and_rgb() {
        let img = read_pnm(b"P5 2 2 255\n\x00\x01\x02\xff").unwrap();
        assert_eq!((img.width(), img.height(), img.channels()), (2, 2, Channels::Gray));
        assert_eq!(img.samples(), &[0, 1, 2, 255]);

        let img = read_pnm(b"P6 1 1 255 \x10\x20\x30").unwrap();
        assert_eq!((img.width(), img.height(), img.channels()), (1, 1, Channels::Rgb));
        assert_eq!(img.samples(), &[0x10, 0x20, 0x30]);
    }

    #[test]
    fn comments_and_canonical_rewrite() {
        let src = b"P5\n# made by hand\n2  1\n255\n\x07\x08";
        let img = read_pnm(src).unwrap();
        assert_eq!(write_pnm(&img), b"P5 2 1 255\n\x07\x08");
        assert_eq!(read_pnm(&write_pnm(&img)).unwrap(), img);
    }

    #[test]
    fn rejects_unsupported() {
        assert!(matches!(read_pnm(b"P1 1 1\n1"), Err(PnmError::UnsupportedFormat(_))));
        assert!(matches!(
            read_pnm(b"P2 1 1 255\n1"),
            Err(PnmError::UnsupportedFormat(_))
        ));
        assert!(matches!(
            read_pnm(b"P7\nWIDTH 1\n"),
            Err(PnmError::UnsupportedFormat(_))
        ));
        assert!(matches!(
            read_pnm(b"P5 1 1 65535\n\x00\x00"),
            Err(PnmError::UnsupportedFormat(_))
        ));
    }

    #[test]
    fn rejects_bad_headers() {
        assert!(matches!(read_pnm(b""), Err(PnmError::HeaderSyntax { .. })));
        assert!(matches!(read_pnm(b"GIF89a"), Err(PnmError::HeaderSyntax { .. })));
        assert!(matches!(read_pnm(b"P5 x 1 255\n"), Err(PnmError::HeaderSyntax { .. })));
        assert!(matches!(read_pnm(b"P52 1 255\n"), Err(PnmError::HeaderSyntax { .. })));
        assert!(matches!(read_pnm(b"P5 0 1 255\n"), Err(PnmError::HeaderSyntax { .. })));
        assert!(matches!(read_pnm(b"P5 1 1 255"), Err(PnmError::HeaderSyntax { .. })));
        assert!(matches!(
            read_pnm(b"P5 99999999999 1 255\n"),
            Err(PnmError::HeaderSyntax { .. })
        ));
    }

    #[test]
    fn truncated_raster() {
        assert_eq!(
            read_pnm(b"P6 2 1 255\n\x01\x02\x03\x04"),
            Err(PnmError::TruncatedPixels { expected: 6, found: 4 })
        );
    }
}
