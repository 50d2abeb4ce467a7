//! On-disk table files.
//!
//! Layout, all integers little-endian:
//!
//! ```text
//! magic  b"DBCENSUS"
//! u16    version
//! u8     family (0 index, 1 levels)
//! u32    k
//! u8     mark kind (0 none, 1 total, 2 leaves, 3 unary, 4 binary)
//! u32    mark level
//! u8     rows per entry (1 = A, 2 = A B, 3 = A B C)
//! u32    N
//! then for class in 0..=k, n in 0..=N, each row: u32 byte length, magnitude bytes
//! ```

use super::{CountTable, MomentTable};
use crate::error::{Error, Result};
use crate::family::{Family, FamilySpec, MarkSpec};
use rug::integer::Order;
use rug::Integer;
use std::fs;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::{Path, PathBuf};
use std::sync::Arc;

/// Environment variable naming the cache directory.
pub const CACHE_ENV: &str = "DEBRUIJN_CENSUS_CACHE";

const MAGIC: &[u8; 8] = b"DBCENSUS";
const VERSION: u16 = 1;

pub(crate) fn file_name(spec: FamilySpec, mark: MarkSpec) -> String {
    format!("{}-{}.tbl", spec, mark.to_string().replace('@', "-"))
}

pub(crate) fn file_path(dir: &Path, spec: FamilySpec, mark: MarkSpec) -> PathBuf {
    dir.join(file_name(spec, mark))
}

fn mark_code(mark: MarkSpec) -> (u8, u32) {
    match mark {
        MarkSpec::None => (0, 0),
        MarkSpec::TotalLeaves => (1, 0),
        MarkSpec::LeavesAtLevel(l) => (2, l),
        MarkSpec::UnaryAtLevel(l) => (3, l),
        MarkSpec::BinaryAtLevel(l) => (4, l),
    }
}

fn mark_from_code(kind: u8, level: u32) -> Option<MarkSpec> {
    Some(match kind {
        0 => MarkSpec::None,
        1 => MarkSpec::TotalLeaves,
        2 => MarkSpec::LeavesAtLevel(level),
        3 => MarkSpec::UnaryAtLevel(level),
        4 => MarkSpec::BinaryAtLevel(level),
        _ => return None,
    })
}

fn io_err(path: &Path, e: impl std::fmt::Display) -> Error {
    Error::Cache { path: path.display().to_string(), message: e.to_string() }
}

pub fn write_table(path: &Path, table: &MomentTable) -> Result<()> {
    let spec = table.spec();
    let first = table.first_rows();
    let second = table.second_rows();
    let rows_per = if table.mark == MarkSpec::None {
        1u8
    } else if second.is_some() {
        3
    } else {
        2
    };
    let tmp = path.with_extension("tmp");
    let file = fs::File::create(&tmp).map_err(|e| io_err(&tmp, e))?;
    let mut w = BufWriter::new(file);
    let (kind, level) = mark_code(table.mark);
    let mut header = Vec::new();
    header.extend_from_slice(MAGIC);
    header.extend_from_slice(&VERSION.to_le_bytes());
    header.push(match spec.family {
        Family::BoundedIndex => 0,
        Family::BoundedLevels => 1,
    });
    header.extend_from_slice(&spec.k.to_le_bytes());
    header.push(kind);
    header.extend_from_slice(&level.to_le_bytes());
    header.push(rows_per);
    header.extend_from_slice(&(table.max_size() as u32).to_le_bytes());
    w.write_all(&header).map_err(|e| io_err(path, e))?;
    let mut put = |x: &Integer| -> std::io::Result<()> {
        let bytes: Vec<u8> = if *x == 0 { Vec::new() } else { x.to_digits::<u8>(Order::Lsf) };
        w.write_all(&(bytes.len() as u32).to_le_bytes())?;
        w.write_all(&bytes)
    };
    for i in 0..spec.classes() {
        for n in 0..=table.max_size() {
            put(table.count(i, n)).map_err(|e| io_err(path, e))?;
            if rows_per >= 2 {
                put(&first[i][n]).map_err(|e| io_err(path, e))?;
            }
            if let Some(c) = second {
                put(&c[i][n]).map_err(|e| io_err(path, e))?;
            }
        }
    }
    w.flush().map_err(|e| io_err(path, e))?;
    drop(w);
    fs::rename(&tmp, path).map_err(|e| io_err(path, e))
}

struct Reader<R> {
    inner: R,
}

impl<R: Read> Reader<R> {
    fn bytes<const N: usize>(&mut self) -> std::io::Result<[u8; N]> {
        let mut b = [0u8; N];
        self.inner.read_exact(&mut b)?;
        Ok(b)
    }

    fn u8(&mut self) -> std::io::Result<u8> {
        Ok(self.bytes::<1>()?[0])
    }

    fn u32(&mut self) -> std::io::Result<u32> {
        Ok(u32::from_le_bytes(self.bytes()?))
    }

    fn integer(&mut self) -> std::io::Result<Integer> {
        let len = self.u32()? as usize;
        let mut buf = vec![0u8; len];
        self.inner.read_exact(&mut buf)?;
        Ok(Integer::from_digits(&buf, Order::Lsf))
    }
}

pub fn read_table(path: &Path) -> Result<MomentTable> {
    let file = fs::File::open(path).map_err(|e| io_err(path, e))?;
    let mut r = Reader { inner: BufReader::new(file) };
    let bad = |m: &str| io_err(path, m);
    let magic: [u8; 8] = r.bytes().map_err(|e| io_err(path, e))?;
    if &magic != MAGIC {
        return Err(bad("not a table file"));
    }
    let version = u16::from_le_bytes(r.bytes().map_err(|e| io_err(path, e))?);
    if version != VERSION {
        return Err(bad(&format!("unsupported version {version}")));
    }
    let family = match r.u8().map_err(|e| io_err(path, e))? {
        0 => Family::BoundedIndex,
        1 => Family::BoundedLevels,
        _ => return Err(bad("unknown family")),
    };
    let k = r.u32().map_err(|e| io_err(path, e))?;
    let spec = FamilySpec::new(family, k).map_err(|e| io_err(path, e))?;
    let kind = r.u8().map_err(|e| io_err(path, e))?;
    let level = r.u32().map_err(|e| io_err(path, e))?;
    let mark = mark_from_code(kind, level).ok_or_else(|| bad("unknown mark"))?;
    mark.validate(spec).map_err(|e| io_err(path, e))?;
    let rows_per = r.u8().map_err(|e| io_err(path, e))?;
    if !(1..=3).contains(&rows_per) || (mark == MarkSpec::None) != (rows_per == 1) {
        return Err(bad("inconsistent row count"));
    }
    let max_size = r.u32().map_err(|e| io_err(path, e))? as usize;
    let classes = spec.classes();
    let mut a = vec![Vec::with_capacity(max_size + 1); classes];
    let mut b = vec![Vec::new(); if rows_per >= 2 { classes } else { 0 }];
    let mut c = vec![Vec::new(); if rows_per == 3 { classes } else { 0 }];
    for i in 0..classes {
        for _ in 0..=max_size {
            a[i].push(r.integer().map_err(|e| io_err(path, e))?);
            if rows_per >= 2 {
                b[i].push(r.integer().map_err(|e| io_err(path, e))?);
            }
            if rows_per == 3 {
                c[i].push(r.integer().map_err(|e| io_err(path, e))?);
            }
        }
    }
    let counts = Arc::new(CountTable::from_rows(spec, a));
    Ok(MomentTable::from_parts(counts, mark, b, (rows_per == 3).then_some(c)))
}
