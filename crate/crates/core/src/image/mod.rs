//! Lossless image encryption.
//!
//! The image "boundary" (width and height) and every sample are encrypted as
//! independent ciphertexts. Each plaintext is shifted by `key + 1` first so it
//! is always strictly greater than the key, even for a sample of 0.
//!
//! Samples are encrypted independently (no chaining), so equal samples give
//! equal records. That is a known weakness; the container only promises a
//! lossless round trip, not secrecy.
//!
//! Container layout, all integers big-endian:
//!
//! ```text
//! "RAMM" | version u8 = 1 | flags u8 | channels u8
//! width record | height record | width*height*channels sample records
//! [crc32 of the raw samples, u32, when flags bit 0 is set]
//! ```
//!
//! A record is a `u16` length followed by the canonical ciphertext text.
//! The key is never stored.

pub mod pnm;

use std::fmt;

use num_bigint::BigUint;
use num_traits::ToPrimitive;
use rayon::prelude::*;
use thiserror::Error;

use crate::codec::{self, CodecError};
use crate::digits::KeyValue;
use crate::encrypt::{encrypt_with_limit, MAX_OPS};
use crate::error::Error;
use crate::trace::CipherText;

pub use pnm::{read_pnm, write_pnm, PnmError};

pub const MAGIC: [u8; 4] = *b"RAMM";
pub const VERSION: u8 = 1;
pub const FLAG_CHECKSUM: u8 = 0x01;

const HEADER_LEN: usize = 7;
const CHECKSUM_LEN: usize = 4;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Channels {
    Gray,
    Rgb,
}

impl Channels {
    pub fn count(self) -> usize {
        match self {
            Channels::Gray => 1,
            Channels::Rgb => 3,
        }
    }

    pub fn from_count(n: u8) -> Option<Self> {
        match n {
            1 => Some(Channels::Gray),
            3 => Some(Channels::Rgb),
            _ => None,
        }
    }
}

/// Row-major, channel-interleaved 8-bit samples.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RawImage {
    width: u32,
    height: u32,
    channels: Channels,
    samples: Vec<u8>,
}

impl RawImage {
    pub fn new(width: u32, height: u32, channels: Channels, samples: Vec<u8>) -> Result<Self, ImageError> {
        if width == 0 || height == 0 {
            return Err(ImageError::EmptyImage);
        }
        let expected = width as usize * height as usize * channels.count();
        if samples.len() != expected {
            return Err(ImageError::SampleCount {
                expected,
                found: samples.len(),
            });
        }
        Ok(RawImage {
            width,
            height,
            channels,
            samples,
        })
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn height(&self) -> u32 {
        self.height
    }

    pub fn channels(&self) -> Channels {
        self.channels
    }

    pub fn samples(&self) -> &[u8] {
        &self.samples
    }
}

/// Which record in a container an error refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RecordId {
    Width,
    Height,
    Sample(usize),
}

impl fmt::Display for RecordId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RecordId::Width => f.write_str("width record"),
            RecordId::Height => f.write_str("height record"),
            RecordId::Sample(i) => write!(f, "sample record {i}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ImageError {
    #[error("image has a zero dimension")]
    EmptyImage,
    #[error("expected {expected} samples, found {found}")]
    SampleCount { expected: usize, found: usize },
    #[error("not a ramm container (bad magic)")]
    BadMagic,
    #[error("container header truncated")]
    TruncatedHeader,
    #[error("unsupported container version {0}")]
    UnsupportedVersion(u8),
    #[error("unsupported container flags 0x{0:02x}")]
    UnsupportedFlags(u8),
    #[error("unsupported channel count {0}")]
    InvalidChannels(u8),
    #[error("{record}: {source}")]
    Codec { record: RecordId, source: CodecError },
    #[error("{record}: {source}")]
    Cipher { record: RecordId, source: Error },
    #[error("{record}: decrypted sample is outside [0, 255]")]
    SampleOutOfRange { record: RecordId },
    #[error("{record}: decrypted dimension is zero or too large")]
    DimensionOutOfRange { record: RecordId },
    #[error("container holds {found} sample records, dimensions call for {expected}")]
    RecordCountMismatch { expected: usize, found: usize },
    #[error("checksum mismatch: stored {stored:08x}, computed {computed:08x}")]
    ChecksumMismatch { stored: u32, computed: u32 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ImageOptions {
    /// Append a CRC-32 of the plaintext samples. Off by default because it
    /// leaks information about the plaintext.
    pub checksum: bool,
    pub max_ops: usize,
}

impl Default for ImageOptions {
    fn default() -> Self {
        ImageOptions {
            checksum: false,
            max_ops: MAX_OPS,
        }
    }
}

/// Encrypted image: boundary records, sample records and optional checksum.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ImageContainer {
    channels: u8,
    width: CipherText,
    height: CipherText,
    pixels: Vec<CipherText>,
    checksum: Option<u32>,
}

impl ImageContainer {
    pub fn channels(&self) -> u8 {
        self.channels
    }

    pub fn width_cipher(&self) -> &CipherText {
        &self.width
    }

    pub fn height_cipher(&self) -> &CipherText {
        &self.height
    }

    pub fn pixel_ciphers(&self) -> &[CipherText] {
        &self.pixels
    }

    pub fn checksum(&self) -> Option<u32> {
        self.checksum
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::new();
        out.extend_from_slice(&MAGIC);
        out.push(VERSION);
        out.push(if self.checksum.is_some() { FLAG_CHECKSUM } else { 0 });
        out.push(self.channels);
        // Record lengths were checked when the container was built.
        for c in [&self.width, &self.height].into_iter().chain(&self.pixels) {
            codec::write_record(c, &mut out).expect("record fits a u16 length");
        }
        if let Some(crc) = self.checksum {
            out.extend_from_slice(&crc.to_be_bytes());
        }
        out
    }

    /// Parses the container framing and every record. Record count against
    /// the dimensions can only be checked once the key is known.
    pub fn from_bytes(bytes: &[u8]) -> Result<Self, ImageError> {
        if bytes.len() < MAGIC.len() || bytes[..4] != MAGIC {
            return Err(ImageError::BadMagic);
        }
        if bytes.len() < HEADER_LEN {
            return Err(ImageError::TruncatedHeader);
        }
        let (version, flags, channels) = (bytes[4], bytes[5], bytes[6]);
        if version != VERSION {
            return Err(ImageError::UnsupportedVersion(version));
        }
        if flags & !FLAG_CHECKSUM != 0 {
            return Err(ImageError::UnsupportedFlags(flags));
        }
        if Channels::from_count(channels).is_none() {
            return Err(ImageError::InvalidChannels(channels));
        }
        let trailer = if flags & FLAG_CHECKSUM != 0 { CHECKSUM_LEN } else { 0 };
        let truncated = |record, offset| ImageError::Codec {
            record,
            source: CodecError::TruncatedRecord {
                offset,
                needed: 2,
                available: 0,
            },
        };
        let end = bytes.len().checked_sub(trailer).filter(|&e| e >= HEADER_LEN);
        let Some(end) = end else {
            return Err(truncated(RecordId::Width, HEADER_LEN));
        };
        let body = &bytes[..end];

        let read = |pos: usize, record: RecordId| {
            codec::read_record(body, pos).map_err(|source| ImageError::Codec { record, source })
        };
        let (width, pos) = read(HEADER_LEN, RecordId::Width)?;
        let (height, mut pos) = read(pos, RecordId::Height)?;
        let mut pixels = Vec::new();
        while pos < end {
            let (c, next) = read(pos, RecordId::Sample(pixels.len()))?;
            pixels.push(c);
            pos = next;
        }
        let checksum = (trailer != 0).then(|| {
            let t = &bytes[end..];
            u32::from_be_bytes([t[0], t[1], t[2], t[3]])
        });
        Ok(ImageContainer {
            channels,
            width,
            height,
            pixels,
            checksum,
        })
    }
}

fn bias(key: &KeyValue) -> BigUint {
    key.value() + 1u32
}

fn checked_record(c: CipherText, record: RecordId) -> Result<CipherText, ImageError> {
    let len = c.to_string().len();
    if len > u16::MAX as usize {
        return Err(ImageError::Codec {
            record,
            source: CodecError::LengthOverflow { len },
        });
    }
    Ok(c)
}

fn encrypt_value(v: u64, key: &KeyValue, max_ops: usize, record: RecordId) -> Result<CipherText, ImageError> {
    let c = encrypt_with_limit(&(BigUint::from(v) + bias(key)), key, max_ops)
        .map_err(|source| ImageError::Cipher { record, source })?;
    checked_record(c, record)
}

pub fn encrypt_image(img: &RawImage, key: &KeyValue) -> Result<ImageContainer, ImageError> {
    encrypt_image_with(img, key, &ImageOptions::default())
}

pub fn encrypt_image_with(img: &RawImage, key: &KeyValue, opts: &ImageOptions) -> Result<ImageContainer, ImageError> {
    let width = encrypt_value(img.width.into(), key, opts.max_ops, RecordId::Width)?;
    let height = encrypt_value(img.height.into(), key, opts.max_ops, RecordId::Height)?;

    // Encryption is a pure function of the sample value, so each distinct
    // value is encrypted once.
    let mut present = [false; 256];
    for &s in &img.samples {
        present[s as usize] = true;
    }
    let table: Vec<Option<Result<CipherText, Error>>> = (0..256usize)
        .into_par_iter()
        .map(|v| present[v].then(|| encrypt_with_limit(&(BigUint::from(v) + bias(key)), key, opts.max_ops)))
        .collect();

    let pixels = img
        .samples
        .iter()
        .enumerate()
        .map(|(i, &s)| {
            let record = RecordId::Sample(i);
            match &table[s as usize] {
                Some(Ok(c)) => checked_record(c.clone(), record),
                Some(Err(e)) => Err(ImageError::Cipher {
                    record,
                    source: e.clone(),
                }),
                None => unreachable!("every present sample value is in the table"),
            }
        })
        .collect::<Result<Vec<_>, _>>()?;

    let checksum = opts.checksum.then(|| crc32fast::hash(&img.samples));
    Ok(ImageContainer {
        channels: img.channels.count() as u8,
        width,
        height,
        pixels,
        checksum,
    })
}

/// Decrypted value minus the bias; `None` when it falls below the bias.
fn decrypt_value(c: &CipherText, key: &KeyValue, record: RecordId) -> Result<Option<BigUint>, ImageError> {
    let v = crate::decrypt(c, key).map_err(|source| ImageError::Cipher { record, source })?;
    let b = bias(key);
    Ok((v >= b).then(|| v - b))
}

fn decrypt_dimension(c: &CipherText, key: &KeyValue, record: RecordId) -> Result<u32, ImageError> {
    decrypt_value(c, key, record)?
        .and_then(|v| v.to_u32())
        .filter(|&d| d > 0)
        .ok_or(ImageError::DimensionOutOfRange { record })
}

/// Decrypts one sample record in isolation.
pub fn decrypt_sample(c: &CipherText, key: &KeyValue, index: usize) -> Result<u8, ImageError> {
    let record = RecordId::Sample(index);
    decrypt_value(c, key, record)?
        .and_then(|v| v.to_u8())
        .ok_or(ImageError::SampleOutOfRange { record })
}

/// Decrypts boundary then samples. The first failing record, in container
/// order, is the one reported.
pub fn decrypt_image(container: &ImageContainer, key: &KeyValue) -> Result<RawImage, ImageError> {
    let width = decrypt_dimension(&container.width, key, RecordId::Width)?;
    let height = decrypt_dimension(&container.height, key, RecordId::Height)?;
    let channels = Channels::from_count(container.channels).ok_or(ImageError::InvalidChannels(container.channels))?;
    let expected = (width as usize)
        .checked_mul(height as usize)
        .and_then(|n| n.checked_mul(channels.count()));
    if expected != Some(container.pixels.len()) {
        return Err(ImageError::RecordCountMismatch {
            expected: expected.unwrap_or(usize::MAX),
            found: container.pixels.len(),
        });
    }

    let results: Vec<Result<u8, ImageError>> = container
        .pixels
        .par_iter()
        .enumerate()
        .map(|(i, c)| decrypt_sample(c, key, i))
        .collect();
    let samples = results.into_iter().collect::<Result<Vec<u8>, _>>()?;

    if let Some(stored) = container.checksum {
        let computed = crc32fast::hash(&samples);
        if computed != stored {
            return Err(ImageError::ChecksumMismatch { stored, computed });
        }
    }
    RawImage::new(width, height, channels, samples)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn key(k: u64) -> KeyValue {
        KeyValue::try_from(k).unwrap()
    }

    #[test]
    fn single_pixel_golden() {
        let img = RawImage::new(1, 1, Channels::Gray, vec![57]).unwrap();
        let c = encrypt_image(&img, &key(5)).unwrap();
        // 57 + 6 = 63
        assert_eq!(c.pixel_ciphers()[0].to_string(), "m12R3m6Mm1R4m8 ~ 4");
        // 1 + 6 = 7
        assert_eq!(c.width_cipher().to_string(), "m1R2m4MR4m8 ~ 4");
        assert_eq!(decrypt_image(&c, &key(5)).unwrap(), img);
        let bytes = c.to_bytes();
        assert_eq!(&bytes[..7], b"RAMM\x01\x00\x01");
        assert_eq!(ImageContainer::from_bytes(&bytes).unwrap(), c);
    }

    #[test]
    fn equal_samples_give_equal_records() {
        let img = RawImage::new(2, 2, Channels::Gray, vec![0; 4]).unwrap();
        let c = encrypt_image(&img, &key(5)).unwrap();
        let p = c.pixel_ciphers();
        assert_eq!(p.len(), 4);
        assert!(p.iter().all(|x| x == &p[0]));
        // 0 + 6 = 6
        assert_eq!(p[0].to_string(), "m1R1m2MR1m2 ~ 1");
    }

    #[test]
    fn rgb_order() {
        let samples: Vec<u8> = (0..12).collect();
        let img = RawImage::new(2, 2, Channels::Rgb, samples.clone()).unwrap();
        let c = encrypt_image(&img, &key(5)).unwrap();
        assert_eq!(c.pixel_ciphers().len(), 12);
        for (i, rec) in c.pixel_ciphers().iter().enumerate() {
            assert_eq!(decrypt_sample(rec, &key(5), i).unwrap(), samples[i]);
        }
    }

    #[test]
    fn wrong_key_rejected() {
        let img = RawImage::new(2, 2, Channels::Gray, vec![1, 2, 3, 4]).unwrap();
        let c = encrypt_image(&img, &key(5)).unwrap();
        let err = decrypt_image(&c, &key(7)).unwrap_err();
        assert!(
            matches!(
                err,
                ImageError::Cipher {
                    record: RecordId::Width,
                    ..
                }
            ),
            "{err}"
        );
    }

    #[test]
    fn checksum_detects_tampering() {
        let img = RawImage::new(2, 1, Channels::Gray, vec![9, 200]).unwrap();
        let opts = ImageOptions {
            checksum: true,
            ..ImageOptions::default()
        };
        let c = encrypt_image_with(&img, &key(5), &opts).unwrap();
        assert_eq!(c.checksum(), Some(crc32fast::hash(&[9, 200])));
        let mut bytes = c.to_bytes();
        assert_eq!(bytes[5], FLAG_CHECKSUM);
        let parsed = ImageContainer::from_bytes(&bytes).unwrap();
        assert_eq!(decrypt_image(&parsed, &key(5)).unwrap(), img);

        let n = bytes.len();
        bytes[n - 1] ^= 1;
        let parsed = ImageContainer::from_bytes(&bytes).unwrap();
        assert!(matches!(
            decrypt_image(&parsed, &key(5)),
            Err(ImageError::ChecksumMismatch { .. })
        ));
    }

    #[test]
    fn truncated_final_record() {
        let img = RawImage::new(2, 1, Channels::Gray, vec![9, 200]).unwrap();
        let mut bytes = encrypt_image(&img, &key(5)).unwrap().to_bytes();
        bytes.truncate(bytes.len() - 3);
        let err = ImageContainer::from_bytes(&bytes).unwrap_err();
        assert!(
            matches!(
                err,
                ImageError::Codec {
                    record: RecordId::Sample(1),
                    source: CodecError::TruncatedRecord { .. }
                }
            ),
            "{err}"
        );
    }

    #[test]
    fn header_errors() {
        assert_eq!(ImageContainer::from_bytes(b"RAM"), Err(ImageError::BadMagic));
        assert_eq!(
            ImageContainer::from_bytes(b"PNG\x00\x01\x00\x01"),
            Err(ImageError::BadMagic)
        );
        assert_eq!(
            ImageContainer::from_bytes(b"RAMM\x01"),
            Err(ImageError::TruncatedHeader)
        );
        assert_eq!(
            ImageContainer::from_bytes(b"RAMM\x02\x00\x01"),
            Err(ImageError::UnsupportedVersion(2))
        );
        assert_eq!(
            ImageContainer::from_bytes(b"RAMM\x01\x02\x01"),
            Err(ImageError::UnsupportedFlags(2))
        );
        assert_eq!(
            ImageContainer::from_bytes(b"RAMM\x01\x00\x02"),
            Err(ImageError::InvalidChannels(2))
        );
        assert!(matches!(
            ImageContainer::from_bytes(b"RAMM\x01\x00\x01"),
            Err(ImageError::Codec {
                record: RecordId::Width,
                ..
            })
        ));
    }

    #[test]
    fn record_count_checked_against_dimensions() {
        let img = RawImage::new(2, 1, Channels::Gray, vec![9, 200]).unwrap();
        let c = encrypt_image(&img, &key(5)).unwrap();
        let mut bytes = c.to_bytes();
        // Duplicate the last record.
        let last = codec::serialize_binary(&c.pixel_ciphers()[1]).unwrap();
        bytes.extend_from_slice(&last);
        let parsed = ImageContainer::from_bytes(&bytes).unwrap();
        assert_eq!(
            decrypt_image(&parsed, &key(5)),
            Err(ImageError::RecordCountMismatch { expected: 2, found: 3 })
        );
    }

    #[test]
    fn out_of_range_sample() {
        // 300 + 6 decrypts fine but is no byte.
        let c = crate::encrypt(&BigUint::from(306u32), &key(5)).unwrap();
        assert_eq!(
            decrypt_sample(&c, &key(5), 4),
            Err(ImageError::SampleOutOfRange {
                record: RecordId::Sample(4)
            })
        );
        let c = crate::encrypt(&BigUint::from(6u32), &key(5)).unwrap();
        assert_eq!(decrypt_sample(&c, &key(5), 0), Ok(0));
    }
}
