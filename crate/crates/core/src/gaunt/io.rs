//! Table persistence.
//!
//! Binary layout, all integers little-endian:
//!
//! ```text
//! "GSHT" | version u16 | basis u8 (0 complex, 1 real) | N1 u16 | N2 u16
//! per target in ACN order: count u64, then count x (row u32, col u32, value f64)
//! CRC-64/XZ u64 over every preceding byte
//! ```

use std::io::{Read, Write};

use crc::{Crc, CRC_64_XZ};

use super::{Entry, GauntMatrix, GauntTable};
use crate::error::{Error, Result};
use crate::sh::{coeff_count, ShIndex};
use crate::Basis;

pub const TABLE_MAGIC: &[u8; 4] = b"GSHT";
pub const TABLE_VERSION: u16 = 1;

const CRC64: Crc<u64> = Crc::<u64>::new(&CRC_64_XZ);

fn basis_tag(basis: Basis) -> u8 {
    match basis {
        Basis::Complex => 0,
        Basis::Real => 1,
    }
}

fn basis_name(basis: Basis) -> &'static str {
    match basis {
        Basis::Complex => "complex",
        Basis::Real => "real",
    }
}

/// Serializes `table` into its binary form.
pub fn encode_table(table: &GauntTable) -> Result<Vec<u8>> {
    let (n1, n2) = table.orders();
    let to_u16 =
        |n: usize| u16::try_from(n).map_err(|_| Error::Format(format!("order {n} exceeds u16")));
    let mut out = Vec::with_capacity(13 + 8 * table.matrices().len() + 16 * table.nnz() + 8);
    out.extend_from_slice(TABLE_MAGIC);
    out.extend_from_slice(&TABLE_VERSION.to_le_bytes());
    out.push(basis_tag(table.basis()));
    out.extend_from_slice(&to_u16(n1)?.to_le_bytes());
    out.extend_from_slice(&to_u16(n2)?.to_le_bytes());
    for m in table.matrices() {
        out.extend_from_slice(&(m.nnz() as u64).to_le_bytes());
        for e in m.entries() {
            out.extend_from_slice(&e.row.to_le_bytes());
            out.extend_from_slice(&e.col.to_le_bytes());
            out.extend_from_slice(&e.value.to_le_bytes());
        }
    }
    let crc = CRC64.checksum(&out);
    out.extend_from_slice(&crc.to_le_bytes());
    Ok(out)
}

pub fn save_table<W: Write>(table: &GauntTable, mut w: W) -> Result<()> {
    w.write_all(&encode_table(table)?)?;
    w.flush()?;
    Ok(())
}

struct Cursor<'a> {
    buf: &'a [u8],
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn take(&mut self, n: usize) -> Result<&'a [u8]> {
        let end = self.pos.checked_add(n).filter(|&e| e <= self.buf.len());
        let end = end.ok_or_else(|| Error::Format(format!("truncated at byte {}", self.pos)))?;
        let s = &self.buf[self.pos..end];
        self.pos = end;
        Ok(s)
    }

    fn array<const K: usize>(&mut self) -> Result<[u8; K]> {
        Ok(self.take(K)?.try_into().expect("length checked"))
    }
}

/// Parses a binary table, validating the checksum before anything else.
pub fn decode_table(bytes: &[u8]) -> Result<GauntTable> {
    if bytes.len() < 13 + 8 {
        return Err(Error::Format(format!(
            "file too short ({} bytes)",
            bytes.len()
        )));
    }
    let (body, tail) = bytes.split_at(bytes.len() - 8);
    let stored = u64::from_le_bytes(tail.try_into().expect("8 bytes"));
    let computed = CRC64.checksum(body);
    if stored != computed {
        return Err(Error::Checksum { stored, computed });
    }

    let mut c = Cursor { buf: body, pos: 0 };
    if c.take(4)? != TABLE_MAGIC {
        return Err(Error::Format("bad magic".into()));
    }
    let version = u16::from_le_bytes(c.array()?);
    if version != TABLE_VERSION {
        return Err(Error::Format(format!("unsupported version {version}")));
    }
    let basis = match c.array::<1>()?[0] {
        0 => Basis::Complex,
        1 => Basis::Real,
        t => return Err(Error::Format(format!("unknown basis tag {t}"))),
    };
    let n1 = u16::from_le_bytes(c.array()?) as usize;
    let n2 = u16::from_le_bytes(c.array()?) as usize;
    let (rows, cols) = (coeff_count(n1), coeff_count(n2));

    let mut matrices = Vec::with_capacity(coeff_count(n1 + n2));
    for q in 0..coeff_count(n1 + n2) {
        let count = u64::from_le_bytes(c.array()?) as usize;
        if count > rows * cols {
            return Err(Error::Format(format!(
                "block {q}: {count} entries exceed matrix size"
            )));
        }
        let mut entries = Vec::with_capacity(count);
        for _ in 0..count {
            let row = u32::from_le_bytes(c.array()?);
            let col = u32::from_le_bytes(c.array()?);
            let value = f64::from_le_bytes(c.array()?);
            if row as usize >= rows || col as usize >= cols {
                return Err(Error::Format(format!(
                    "block {q}: index ({row}, {col}) out of range"
                )));
            }
            if let Some(prev) = entries.last().map(|e: &Entry| (e.row, e.col)) {
                if prev >= (row, col) {
                    return Err(Error::Format(format!("block {q}: entries not sorted")));
                }
            }
            entries.push(Entry { row, col, value });
        }
        matrices.push(GauntMatrix::from_sorted(
            basis,
            n1,
            n2,
            ShIndex::from_acn(q),
            entries,
        ));
    }
    if c.pos != body.len() {
        return Err(Error::Format(format!(
            "{} trailing bytes",
            body.len() - c.pos
        )));
    }
    Ok(GauntTable::from_parts(basis, n1, n2, matrices))
}

pub fn load_table<R: Read>(mut r: R) -> Result<GauntTable> {
    let mut bytes = Vec::new();
    r.read_to_end(&mut bytes)?;
    decode_table(&bytes)
}

/// Writes tables as JSON. Values use 17 significant digits, enough to
/// recover every `f64` exactly.
pub fn write_json<W: Write>(tables: &[&GauntTable], mut w: W) -> Result<()> {
    write!(w, "{{\"format\":\"gsht-json\",\"version\":{TABLE_VERSION},\"indexing\":\"acn-0\",\"tables\":[")?;
    for (ti, t) in tables.iter().enumerate() {
        if ti > 0 {
            write!(w, ",")?;
        }
        let (n1, n2) = t.orders();
        write!(
            w,
            "\n{{\"basis\":\"{}\",\"n1\":{n1},\"n2\":{n2},\"blocks\":[",
            basis_name(t.basis())
        )?;
        for (bi, m) in t.matrices().iter().enumerate() {
            if bi > 0 {
                write!(w, ",")?;
            }
            let ShIndex { n, m: deg } = m.target();
            write!(w, "\n{{\"n\":{n},\"m\":{deg},\"entries\":[")?;
            for (ei, e) in m.entries().iter().enumerate() {
                if ei > 0 {
                    write!(w, ",")?;
                }
                write!(w, "[{},{},{:.16e}]", e.row, e.col, e.value)?;
            }
            write!(w, "]}}")?;
        }
        write!(w, "]}}")?;
    }
    writeln!(w, "]}}")?;
    w.flush()?;
    Ok(())
}
