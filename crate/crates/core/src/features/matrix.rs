//! FEAT feature file.
//!
//! ```text
//! "FEAT" | version u16 | n_rows u64 | n_cols u32
//! n_rows times: label u8 | patient id (u16 length + UTF-8) | n_cols f64
//! ```

use std::io::Write;

use super::FeatureVector;
use crate::io::{ByteReader, ByteWriter, FormatError};
use crate::SeizureClass;

pub const MAGIC: &[u8; 4] = b"FEAT";
pub const VERSION: u16 = 1;

pub fn encode_features(rows: &[FeatureVector]) -> Vec<u8> {
    let n_cols = rows.first().map_or(0, |r| r.values.len());
    let mut w = ByteWriter::new();
    w.bytes(MAGIC);
    w.u16(VERSION);
    w.u64(rows.len() as u64);
    w.u32(n_cols as u32);
    for r in rows {
        assert_eq!(r.values.len(), n_cols, "ragged feature rows");
        w.u8(r.label.code());
        w.str(&r.patient_id);
        for &v in &r.values {
            w.f64(v);
        }
    }
    w.into_inner()
}

pub fn decode_features(bytes: &[u8]) -> Result<Vec<FeatureVector>, FormatError> {
    let mut r = ByteReader::new(bytes);
    r.expect_magic(MAGIC)?;
    let version = r.u16()?;
    if version != VERSION {
        return Err(r.error(format!("unsupported FEAT version {version}")));
    }
    let n_rows = r.u64()?;
    let n_cols = r.u32()? as usize;
    // Each row takes at least 3 + 8 * n_cols bytes.
    if n_rows.saturating_mul(3 + 8 * n_cols as u64) > r.remaining() as u64 {
        return Err(r.error(format!("header declares {n_rows} rows but the file is too short")));
    }
    let mut out = Vec::with_capacity(n_rows as usize);
    for _ in 0..n_rows {
        let at = r.offset();
        let code = r.u8()?;
        let label = SeizureClass::from_code(code).ok_or(FormatError {
            offset: at,
            message: format!("invalid label code {code}"),
        })?;
        let patient_id = r.str()?;
        let values = (0..n_cols).map(|_| r.f64()).collect::<Result<Vec<_>, _>>()?;
        out.push(FeatureVector {
            values,
            label,
            patient_id,
            provenance: None,
        });
    }
    if !r.is_at_end() {
        return Err(r.error("trailing bytes after the last row"));
    }
    Ok(out)
}

/// CSV with a `label,patient_id,<names...>` header.
pub fn write_csv<W: Write>(mut out: W, rows: &[FeatureVector], names: &[String]) -> std::io::Result<()> {
    writeln!(out, "label,patient_id,{}", names.join(","))?;
    for r in rows {
        write!(out, "{},{}", r.label, r.patient_id)?;
        for v in &r.values {
            write!(out, ",{v}")?;
        }
        writeln!(out)?;
    }
    Ok(())
}
