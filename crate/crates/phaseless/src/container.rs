//! On-disk formats for vectors and matrices.
//!
//! Two formats are supported:
//!
//! * **Binary container** (`.bin`): a 16-byte little-endian header
//!   `[magic "PHLC" | field tag u8 | 3 reserved zero bytes | m u32 | n u32]`
//!   followed by row-major f64 payload (complex entries interleave re, im).
//!   Round-trips are bit-exact.
//! * **CSV** (`.csv`): one text row per matrix row; complex scalars render as
//!   `re+imj` (for example `1.5-0.25j`). Scalars use the shortest f64
//!   representation, which also round-trips exactly.
//!
//! Vectors and observations are stored as single-column matrices.

use std::fs;
use std::path::Path;

use num_complex::Complex64;

use crate::ensemble::{MeasurementEnsemble, PhaselessObservation};
use crate::error::{Error, Result};
use crate::field::Field;
use crate::signal::SignalVector;

const MAGIC: &[u8; 4] = b"PHLC";

fn field_tag(field: Field) -> u8 {
    match field {
        Field::Real => 0,
        Field::Complex => 1,
    }
}

fn tag_field(tag: u8) -> Result<Field> {
    match tag {
        0 => Ok(Field::Real),
        1 => Ok(Field::Complex),
        other => Err(Error::format(format!("unknown field tag {other}"))),
    }
}

/// Serialize a row-major grid to the binary container format.
pub fn write_grid_binary(
    path: &Path,
    field: Field,
    m: usize,
    n: usize,
    entries: &[Complex64],
) -> Result<()> {
    if entries.len() != m * n {
        return Err(Error::invalid("grid entry count does not match m x n"));
    }
    let (m32, n32) = (
        u32::try_from(m).map_err(|_| Error::invalid("m exceeds u32 range"))?,
        u32::try_from(n).map_err(|_| Error::invalid("n exceeds u32 range"))?,
    );
    let per_entry = match field {
        Field::Real => 8,
        Field::Complex => 16,
    };
    let mut buf = Vec::with_capacity(16 + entries.len() * per_entry);
    buf.extend_from_slice(MAGIC);
    buf.push(field_tag(field));
    buf.extend_from_slice(&[0u8; 3]);
    buf.extend_from_slice(&m32.to_le_bytes());
    buf.extend_from_slice(&n32.to_le_bytes());
    for z in entries {
        buf.extend_from_slice(&z.re.to_le_bytes());
        if field == Field::Complex {
            buf.extend_from_slice(&z.im.to_le_bytes());
        }
    }
    fs::write(path, buf).map_err(|e| Error::io(path, e))
}

/// Read a binary container; returns `(field, m, n, row-major entries)`.
pub fn read_grid_binary(path: &Path) -> Result<(Field, usize, usize, Vec<Complex64>)> {
    let buf = fs::read(path).map_err(|e| Error::io(path, e))?;
    if buf.len() < 16 {
        return Err(Error::format(format!(
            "{}: shorter than the 16-byte header",
            path.display()
        )));
    }
    if &buf[0..4] != MAGIC {
        return Err(Error::format(format!(
            "{}: bad magic, not a phaseless container",
            path.display()
        )));
    }
    let field = tag_field(buf[4])?;
    let m = u32::from_le_bytes(buf[8..12].try_into().unwrap()) as usize;
    let n = u32::from_le_bytes(buf[12..16].try_into().unwrap()) as usize;
    let per_entry = match field {
        Field::Real => 8,
        Field::Complex => 16,
    };
    let expect = 16 + m * n * per_entry;
    if buf.len() != expect {
        return Err(Error::format(format!(
            "{}: payload length {} does not match header {m} x {n}",
            path.display(),
            buf.len() - 16
        )));
    }
    let mut entries = Vec::with_capacity(m * n);
    let mut off = 16;
    for _ in 0..m * n {
        let re = f64::from_le_bytes(buf[off..off + 8].try_into().unwrap());
        off += 8;
        let im = if field == Field::Complex {
            let v = f64::from_le_bytes(buf[off..off + 8].try_into().unwrap());
            off += 8;
            v
        } else {
            0.0
        };
        entries.push(Complex64::new(re, im));
    }
    Ok((field, m, n, entries))
}

fn format_scalar(field: Field, z: Complex64) -> String {
    match field {
        Field::Real => format!("{}", z.re),
        Field::Complex => {
            if z.im < 0.0 || (z.im == 0.0 && z.im.is_sign_negative()) {
                format!("{}-{}j", z.re, -z.im)
            } else {
                format!("{}+{}j", z.re, z.im)
            }
        }
    }
}

fn parse_scalar(s: &str) -> Result<Complex64> {
    let t = s.trim();
    if t.is_empty() {
        return Err(Error::format("empty scalar cell".to_string()));
    }
    if let Some(body) = t.strip_suffix(['j', 'J']) {
        // Split at the last sign that is not an exponent sign and not leading.
        let bytes = body.as_bytes();
        let mut split = None;
        for (i, &b) in bytes.iter().enumerate().skip(1) {
            if (b == b'+' || b == b'-') && bytes[i - 1] != b'e' && bytes[i - 1] != b'E' {
                split = Some(i);
            }
        }
        match split {
            Some(i) => {
                let re: f64 = body[..i]
                    .parse()
                    .map_err(|_| Error::format(format!("bad real part in '{t}'")))?;
                let im: f64 = body[i..]
                    .parse()
                    .map_err(|_| Error::format(format!("bad imaginary part in '{t}'")))?;
                Ok(Complex64::new(re, im))
            }
            None => {
                let im: f64 = body
                    .parse()
                    .map_err(|_| Error::format(format!("bad imaginary scalar '{t}'")))?;
                Ok(Complex64::new(0.0, im))
            }
        }
    } else {
        let re: f64 = t
            .parse()
            .map_err(|_| Error::format(format!("bad real scalar '{t}'")))?;
        Ok(Complex64::new(re, 0.0))
    }
}

/// Serialize a row-major grid as CSV, one line per matrix row.
pub fn write_grid_csv(
    path: &Path,
    field: Field,
    m: usize,
    n: usize,
    entries: &[Complex64],
) -> Result<()> {
    if entries.len() != m * n {
        return Err(Error::invalid("grid entry count does not match m x n"));
    }
    let mut out = String::new();
    for i in 0..m {
        let row = &entries[i * n..(i + 1) * n];
        let cells: Vec<String> = row.iter().map(|&z| format_scalar(field, z)).collect();
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    fs::write(path, out).map_err(|e| Error::io(path, e))
}

/// Read a CSV grid. The field is inferred: any `j` suffix marks the grid
/// complex, otherwise it is real.
pub fn read_grid_csv(path: &Path) -> Result<(Field, usize, usize, Vec<Complex64>)> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let mut rows: Vec<Vec<Complex64>> = Vec::new();
    let mut complex = false;
    for (lineno, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let mut row = Vec::new();
        for cell in line.split(',') {
            if cell.trim().ends_with(['j', 'J']) {
                complex = true;
            }
            row.push(parse_scalar(cell)?);
        }
        if let Some(first) = rows.first() {
            if row.len() != first.len() {
                return Err(Error::format(format!(
                    "{}: row {} has {} cells, expected {}",
                    path.display(),
                    lineno + 1,
                    row.len(),
                    first.len()
                )));
            }
        }
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(Error::format(format!("{}: no data rows", path.display())));
    }
    let m = rows.len();
    let n = rows[0].len();
    let entries: Vec<Complex64> = rows.into_iter().flatten().collect();
    let field = if complex { Field::Complex } else { Field::Real };
    Ok((field, m, n, entries))
}

/// Which on-disk format a path refers to, decided by extension.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GridFormat {
    Binary,
    Csv,
}

pub fn detect_format(path: &Path) -> Result<GridFormat> {
    match path.extension().and_then(|e| e.to_str()) {
        Some("bin") => Ok(GridFormat::Binary),
        Some("csv") => Ok(GridFormat::Csv),
        other => Err(Error::invalid(format!(
            "cannot infer format from extension {:?} (expected .bin or .csv)",
            other
        ))),
    }
}

fn read_grid_any(path: &Path) -> Result<(Field, usize, usize, Vec<Complex64>)> {
    match detect_format(path)? {
        GridFormat::Binary => read_grid_binary(path),
        GridFormat::Csv => read_grid_csv(path),
    }
}

pub fn save_matrix(path: &Path, a: &MeasurementEnsemble) -> Result<()> {
    match detect_format(path)? {
        GridFormat::Binary => {
            write_grid_binary(path, a.field(), a.rows(), a.cols(), a.entries())
        }
        GridFormat::Csv => write_grid_csv(path, a.field(), a.rows(), a.cols(), a.entries()),
    }
}

pub fn load_matrix(path: &Path) -> Result<MeasurementEnsemble> {
    let (field, m, n, entries) = read_grid_any(path)?;
    MeasurementEnsemble::from_entries(field, m, n, entries)
}

pub fn save_signal(path: &Path, x: &SignalVector) -> Result<()> {
    match detect_format(path)? {
        GridFormat::Binary => write_grid_binary(path, x.field(), x.len(), 1, x.entries()),
        GridFormat::Csv => write_grid_csv(path, x.field(), x.len(), 1, x.entries()),
    }
}

pub fn load_signal(path: &Path) -> Result<SignalVector> {
    let (field, m, n, entries) = read_grid_any(path)?;
    if n != 1 {
        return Err(Error::format(format!(
            "{}: expected a single-column vector, got {m} x {n}",
            path.display()
        )));
    }
    SignalVector::new(field, entries)
}

pub fn save_observation(path: &Path, y: &PhaselessObservation) -> Result<()> {
    let entries: Vec<Complex64> = y.values().iter().map(|&v| Complex64::new(v, 0.0)).collect();
    match detect_format(path)? {
        GridFormat::Binary => write_grid_binary(path, Field::Real, y.len(), 1, &entries),
        GridFormat::Csv => write_grid_csv(path, Field::Real, y.len(), 1, &entries),
    }
}

pub fn load_observation(path: &Path) -> Result<PhaselessObservation> {
    let (field, m, n, entries) = read_grid_any(path)?;
    if field != Field::Real || n != 1 {
        return Err(Error::format(format!(
            "{}: observations must be real single-column vectors, got {} {m} x {n}",
            path.display(),
            field
        )));
    }
    let values: Vec<f64> = entries.iter().map(|z| z.re).collect();
    if values.iter().all(|&v| v >= 0.0) {
        PhaselessObservation::exact(values)
    } else {
        PhaselessObservation::noisy(values)
    }
}
