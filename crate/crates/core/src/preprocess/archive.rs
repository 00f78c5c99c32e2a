//! SEGT segment archive.
//!
//! ```text
//! "SEGT" | version u16 | n_channels u16 | n_samples u32
//! repeated until end of file:
//!   label u8 | patient id (u16 length + UTF-8) | event id u32 | segment index u32
//!   n_channels * n_samples f32, channel-major
//! ```
//! All integers and floats are little-endian.

use super::SegmentTensor;
use crate::io::{ByteReader, ByteWriter, FormatError};
use crate::SeizureClass;

pub const MAGIC: &[u8; 4] = b"SEGT";
pub const VERSION: u16 = 1;

/// Encode segments that all share the same shape.
pub fn encode_archive(segments: &[SegmentTensor], n_channels: usize, n_samples: usize) -> Vec<u8> {
    let mut w = ByteWriter::new();
    w.bytes(MAGIC);
    w.u16(VERSION);
    w.u16(n_channels as u16);
    w.u32(n_samples as u32);
    for s in segments {
        assert_eq!(s.data.len(), n_channels * n_samples, "segment shape differs from archive header");
        w.u8(s.label.code());
        w.str(&s.patient_id);
        w.u32(s.event_id);
        w.u32(s.segment_index);
        for &v in &s.data {
            w.f32(v);
        }
    }
    w.into_inner()
}

pub fn decode_archive(bytes: &[u8]) -> Result<Vec<SegmentTensor>, FormatError> {
    let mut r = ByteReader::new(bytes);
    r.expect_magic(MAGIC)?;
    let version = r.u16()?;
    if version != VERSION {
        return Err(r.error(format!("unsupported SEGT version {version}")));
    }
    let n_channels = r.u16()? as usize;
    let n_samples = r.u32()? as usize;
    if n_channels == 0 || n_samples == 0 {
        return Err(r.error("archive declares an empty segment shape"));
    }
    let mut out = Vec::new();
    while !r.is_at_end() {
        let at = r.offset();
        let code = r.u8()?;
        let label = SeizureClass::from_code(code).ok_or(FormatError {
            offset: at,
            message: format!("invalid label code {code}"),
        })?;
        let patient_id = r.str()?;
        let event_id = r.u32()?;
        let segment_index = r.u32()?;
        let raw = r.take(n_channels * n_samples * 4)?;
        let data = raw
            .chunks_exact(4)
            .map(|b| f32::from_le_bytes([b[0], b[1], b[2], b[3]]))
            .collect();
        out.push(SegmentTensor {
            data,
            n_samples,
            label,
            patient_id,
            event_id,
            segment_index,
        });
    }
    Ok(out)
}
