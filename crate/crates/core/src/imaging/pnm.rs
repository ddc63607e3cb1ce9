//! Binary netpbm codecs: `P6` in, `P5` out (and `P5` in for ground-truth masks).
//!
//! Header grammar: magic, then width, height and maxval as ASCII decimals
//! separated by whitespace, where `#` starts a comment running to the end of
//! the line. Exactly one whitespace byte separates maxval from the payload.
//! Bytes past the payload are ignored.

use super::Image;
use crate::detection::DetectionMask;
use crate::Error;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum CodecError {
    #[error("bad magic: expected {expected}, found {found:?}")]
    BadMagic { expected: &'static str, found: String },
    #[error("malformed header: {0}")]
    MalformedHeader(String),
    #[error("unsupported maxval {0}")]
    UnsupportedMaxval(u32),
    #[error("truncated payload: expected {expected} bytes, got {actual}")]
    Truncated { expected: usize, actual: usize },
}

/// Single-channel 8-bit raster.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GrayImage {
    pub width: usize,
    pub height: usize,
    pub data: Vec<u8>,
}

struct Header {
    width: usize,
    height: usize,
    maxval: u32,
    payload_offset: usize,
}

fn parse_header(bytes: &[u8], magic: &'static str) -> Result<Header, CodecError> {
    if bytes.len() < 2 || &bytes[..2] != magic.as_bytes() {
        let found = String::from_utf8_lossy(&bytes[..bytes.len().min(2)]).into_owned();
        return Err(CodecError::BadMagic { expected: magic, found });
    }
    let mut pos = 2;
    let mut fields = [0u64; 3];
    const NAMES: [&str; 3] = ["width", "height", "maxval"];
    for (field, name) in fields.iter_mut().zip(NAMES) {
        let before = pos;
        skip_whitespace_and_comments(bytes, &mut pos);
        if pos == before {
            return Err(CodecError::MalformedHeader(format!("missing whitespace before {name}")));
        }
        let start = pos;
        while pos < bytes.len() && bytes[pos].is_ascii_digit() {
            pos += 1;
        }
        if start == pos {
            return Err(CodecError::MalformedHeader(format!("expected decimal {name}")));
        }
        // ASCII digits are always valid UTF-8.
        let text = std::str::from_utf8(&bytes[start..pos]).unwrap();
        *field = text
            .parse()
            .map_err(|_| CodecError::MalformedHeader(format!("{name} {text} is out of range")))?;
    }
    match bytes.get(pos) {
        Some(b) if b.is_ascii_whitespace() => pos += 1,
        Some(_) => {
            return Err(CodecError::MalformedHeader("garbage after maxval".into()));
        }
        None => return Err(CodecError::MalformedHeader("header ends before payload".into())),
    }
    let [width, height, maxval] = fields;
    if width == 0 || height == 0 {
        return Err(CodecError::MalformedHeader(format!(
            "dimensions must be positive, got {width}x{height}"
        )));
    }
    let maxval = u32::try_from(maxval).unwrap_or(u32::MAX);
    Ok(Header {
        width: usize::try_from(width)
            .map_err(|_| CodecError::MalformedHeader("width too large".into()))?,
        height: usize::try_from(height)
            .map_err(|_| CodecError::MalformedHeader("height too large".into()))?,
        maxval,
        payload_offset: pos,
    })
}

fn skip_whitespace_and_comments(bytes: &[u8], pos: &mut usize) {
    while *pos < bytes.len() {
        match bytes[*pos] {
            b'#' => {
                while *pos < bytes.len() && bytes[*pos] != b'\n' && bytes[*pos] != b'\r' {
                    *pos += 1;
                }
            }
            b if b.is_ascii_whitespace() => *pos += 1,
            _ => break,
        }
    }
}

fn payload<'a>(bytes: &'a [u8], header: &Header, channels: usize) -> Result<&'a [u8], CodecError> {
    let expected = header
        .width
        .checked_mul(header.height)
        .and_then(|n| n.checked_mul(channels))
        .ok_or_else(|| CodecError::MalformedHeader("dimensions overflow".into()))?;
    let available = &bytes[header.payload_offset..];
    if available.len() < expected {
        return Err(CodecError::Truncated { expected, actual: available.len() });
    }
    Ok(&available[..expected])
}

/// Decodes a binary `P6` image with maxval 255.
pub fn decode_ppm(bytes: &[u8]) -> Result<Image, Error> {
    let header = parse_header(bytes, "P6")?;
    if header.maxval != 255 {
        return Err(CodecError::UnsupportedMaxval(header.maxval).into());
    }
    let data = payload(bytes, &header, 3)?;
    let pixels = data.chunks_exact(3).map(|c| [c[0], c[1], c[2]]).collect();
    Image::new(header.width, header.height, pixels)
}

/// Decodes a binary `P5` image with an 8-bit maxval (1..=255).
pub fn decode_pgm(bytes: &[u8]) -> Result<GrayImage, Error> {
    let header = parse_header(bytes, "P5")?;
    if header.maxval == 0 || header.maxval > 255 {
        return Err(CodecError::UnsupportedMaxval(header.maxval).into());
    }
    let data = payload(bytes, &header, 1)?.to_vec();
    Ok(GrayImage { width: header.width, height: header.height, data })
}

pub fn encode_ppm(image: &Image) -> Vec<u8> {
    let mut out = format!("P6\n{} {}\n255\n", image.width(), image.height()).into_bytes();
    out.reserve(image.pixels().len() * 3);
    for px in image.pixels() {
        out.extend_from_slice(px);
    }
    out
}

pub fn encode_gray(image: &GrayImage) -> Vec<u8> {
    let mut out = format!("P5\n{} {}\n255\n", image.width, image.height).into_bytes();
    out.extend_from_slice(&image.data);
    out
}

/// Encodes a detection mask as `P5`: non-skin is 0 and class `k` of `K`
/// (1-based, model order) is `floor(255 * k / K)`.
pub fn encode_pgm(mask: &DetectionMask) -> Result<Vec<u8>, Error> {
    Ok(encode_gray(&mask.to_gray()?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn decodes_two_pixels() {
        let mut bytes = b"P6 2 1 255\n".to_vec();
        bytes.extend_from_slice(&[255, 0, 0, 0, 255, 0]);
        let img = decode_ppm(&bytes).unwrap();
        assert_eq!((img.width(), img.height()), (2, 1));
        assert_eq!(img.pixels(), &[[255, 0, 0], [0, 255, 0]]);
    }

    #[test]
    fn comments_in_header() {
        let mut bytes = b"P6\n# made by hand\n1 # width done\n1\n255\n".to_vec();
        bytes.extend_from_slice(&[1, 2, 3]);
        assert_eq!(decode_ppm(&bytes).unwrap().pixels(), &[[1, 2, 3]]);
    }

    #[test]
    fn truncated_payload() {
        let mut bytes = b"P6 1 1 255\n".to_vec();
        bytes.extend_from_slice(&[1, 2]);
        assert_eq!(
            decode_ppm(&bytes),
            Err(CodecError::Truncated { expected: 3, actual: 2 }.into())
        );
    }

    #[test]
    fn distinct_header_errors() {
        let wrong_magic = decode_ppm(b"P3 1 1 255\n000").unwrap_err();
        assert!(matches!(wrong_magic, Error::Codec(CodecError::BadMagic { .. })));
        let maxval = decode_ppm(b"P6 1 1 65535\n\0\0\0\0\0\0").unwrap_err();
        assert_eq!(maxval, Error::Codec(CodecError::UnsupportedMaxval(65535)));
        let not_number = decode_ppm(b"P6 x 1 255\n").unwrap_err();
        assert!(matches!(not_number, Error::Codec(CodecError::MalformedHeader(_))));
        let zero = decode_ppm(b"P6 0 1 255\n").unwrap_err();
        assert!(matches!(zero, Error::Codec(CodecError::MalformedHeader(_))));
        let no_payload_sep = decode_ppm(b"P6 1 1 255").unwrap_err();
        assert!(matches!(no_payload_sep, Error::Codec(CodecError::MalformedHeader(_))));
        let glued = decode_ppm(b"P61 1 255\n\0\0\0").unwrap_err();
        assert!(matches!(glued, Error::Codec(CodecError::MalformedHeader(_))));
    }

    #[test]
    fn pgm_round_trip_and_maxval() {
        let g = GrayImage { width: 3, height: 2, data: vec![0, 1, 2, 253, 254, 255] };
        let bytes = encode_gray(&g);
        assert_eq!(bytes.len(), b"P5\n3 2\n255\n".len() + 6);
        assert_eq!(decode_pgm(&bytes).unwrap(), g);
        assert!(decode_pgm(b"P5 1 1 1\n\x01").is_ok());
        assert_eq!(
            decode_pgm(b"P5 1 1 0\n\0"),
            Err(CodecError::UnsupportedMaxval(0).into())
        );
    }

    proptest! {
        #[test]
        fn ppm_round_trip(w in 1usize..12, h in 1usize..12, seed in any::<u64>()) {
            let mut s = seed;
            let img = Image::from_fn(w, h, |_, _| {
                s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                let b = s.to_le_bytes();
                [b[5], b[6], b[7]]
            }).unwrap();
            let bytes = encode_ppm(&img);
            prop_assert_eq!(bytes.len(), format!("P6\n{w} {h}\n255\n").len() + w * h * 3);
            prop_assert_eq!(decode_ppm(&bytes).unwrap(), img);
        }
    }
}
