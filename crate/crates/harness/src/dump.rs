//! Matrix dumps as CSV: `#` header lines, then one matrix row per line.
//! Complex entries take two adjacent columns, real part first.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use ddsense::Complex64;
use ndarray::Array2;

use crate::error::Result;

fn header<W: Write>(out: &mut W, name: &str, rows: &str, cols: &str, dim: (usize, usize), complex: bool) -> Result<()> {
    writeln!(out, "# ddsense {} matrix {name}", env!("CARGO_PKG_VERSION"))?;
    writeln!(out, "# rows {} ({rows}), cols {} ({cols})", dim.0, dim.1)?;
    if complex {
        writeln!(out, "# entry (r, c) in columns 2c (re) and 2c+1 (im)")?;
    }
    Ok(())
}

pub fn write_complex<W: Write>(mut out: W, name: &str, rows: &str, cols: &str, a: &Array2<Complex64>) -> Result<()> {
    header(&mut out, name, rows, cols, a.dim(), true)?;
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(out);
    for row in a.rows() {
        w.write_record(row.iter().flat_map(|z| [z.re.to_string(), z.im.to_string()]))?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_real<W: Write>(mut out: W, name: &str, rows: &str, cols: &str, a: &Array2<f64>) -> Result<()> {
    header(&mut out, name, rows, cols, a.dim(), false)?;
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(out);
    for row in a.rows() {
        w.write_record(row.iter().map(|x| x.to_string()))?;
    }
    w.flush()?;
    Ok(())
}

pub fn complex_to_file(path: &Path, name: &str, rows: &str, cols: &str, a: &Array2<Complex64>) -> Result<()> {
    write_complex(BufWriter::new(File::create(path)?), name, rows, cols, a)
}

pub fn real_to_file(path: &Path, name: &str, rows: &str, cols: &str, a: &Array2<f64>) -> Result<()> {
    write_real(BufWriter::new(File::create(path)?), name, rows, cols, a)
}

/// Parses a matrix written by [`write_complex`].
pub fn read_complex(text: &str) -> Result<Array2<Complex64>> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .comment(Some(b'#'))
        .from_reader(text.as_bytes());
    let mut rows: Vec<Vec<Complex64>> = Vec::new();
    for rec in reader.records() {
        let rec = rec?;
        let vals: Vec<f64> = rec
            .iter()
            .map(|s| s.parse::<f64>().map_err(|e| crate::error::Error::Config(format!("bad matrix entry {s:?}: {e}"))))
            .collect::<Result<_>>()?;
        rows.push(vals.chunks(2).map(|p| Complex64::new(p[0], p[1])).collect());
    }
    let cols = rows.first().map_or(0, Vec::len);
    Ok(Array2::from_shape_fn((rows.len(), cols), |(r, c)| rows[r][c]))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn complex_round_trip() {
        let a = Array2::from_shape_fn((3, 4), |(r, c)| Complex64::new(r as f64 - 0.5, c as f64 * 1e-3));
        let mut buf = Vec::new();
        write_complex(&mut buf, "dd", "Doppler k", "delay l", &a).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("# ddsense"));
        let body: Vec<&str> = text.lines().filter(|l| !l.starts_with('#')).collect();
        assert_eq!(body.len(), 3);
        assert_eq!(body[0].split(',').count(), 8);
        assert_eq!(read_complex(&text).unwrap(), a);
    }

    #[test]
    fn real_layout() {
        let a = Array2::from_shape_fn((2, 5), |(r, c)| (r * 5 + c) as f64);
        let mut buf = Vec::new();
        write_real(&mut buf, "periodogram", "Doppler bin", "delay bin", &a).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let body: Vec<&str> = text.lines().filter(|l| !l.starts_with('#')).collect();
        assert_eq!(body, vec!["0,1,2,3,4", "5,6,7,8,9"]);
    }
}
