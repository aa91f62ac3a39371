//! Binary and CSV serialization of grids, fields and probe reports.
//!
//! Binary layout, all little-endian: 8-byte magic ("LMGRID1\0" or
//! "LMFIELD1"), d as u64, N per axis as u64, L per axis as f64, then
//! interleaved re/im f64 pairs in row-major order.

use std::io::{Read, Write};

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::spectral::{ProbeReport, SampledField};
use crate::symbol::{GridSpec, SymbolGrid};

pub const GRID_MAGIC: [u8; 8] = *b"LMGRID1\0";
pub const FIELD_MAGIC: [u8; 8] = *b"LMFIELD1";

fn write_binary<W: Write>(mut w: W, magic: &[u8; 8], grid: &GridSpec, values: &[C64]) -> Result<()> {
    let mut buf = Vec::with_capacity(16 + 16 * grid.d() + 16 * values.len());
    buf.extend_from_slice(magic);
    buf.extend_from_slice(&(grid.d() as u64).to_le_bytes());
    for &n in &grid.points {
        buf.extend_from_slice(&(n as u64).to_le_bytes());
    }
    for &l in &grid.lengths {
        buf.extend_from_slice(&l.to_le_bytes());
    }
    for v in values {
        buf.extend_from_slice(&v.re.to_le_bytes());
        buf.extend_from_slice(&v.im.to_le_bytes());
    }
    w.write_all(&buf)?;
    Ok(())
}

struct Cursor<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl Cursor<'_> {
    fn take(&mut self, n: usize) -> Result<&[u8]> {
        let end = self.pos + n;
        if end > self.bytes.len() {
            return Err(Error::Format(format!("truncated at byte {}", self.bytes.len())));
        }
        let s = &self.bytes[self.pos..end];
        self.pos = end;
        Ok(s)
    }

    fn u64(&mut self) -> Result<u64> {
        Ok(u64::from_le_bytes(self.take(8)?.try_into().expect("8 bytes")))
    }

    fn f64(&mut self) -> Result<f64> {
        Ok(f64::from_le_bytes(self.take(8)?.try_into().expect("8 bytes")))
    }
}

fn read_binary<R: Read>(mut r: R, magic: &[u8; 8]) -> Result<(GridSpec, Vec<C64>)> {
    let mut bytes = Vec::new();
    r.read_to_end(&mut bytes)?;
    let mut c = Cursor { bytes: &bytes, pos: 0 };
    if c.take(8)? != magic {
        return Err(Error::Format(format!("expected magic {:?}", String::from_utf8_lossy(magic))));
    }
    let d = c.u64()? as usize;
    if d == 0 || d > 3 {
        return Err(Error::Format(format!("dimension {d} out of range")));
    }
    let points = (0..d).map(|_| c.u64().map(|n| n as usize)).collect::<Result<Vec<_>>>()?;
    let lengths = (0..d).map(|_| c.f64()).collect::<Result<Vec<_>>>()?;
    let grid = GridSpec::new(lengths, points).map_err(|e| Error::Format(e.to_string()))?;
    let values = (0..grid.len())
        .map(|_| Ok(C64::new(c.f64()?, c.f64()?)))
        .collect::<Result<Vec<_>>>()?;
    if c.pos != bytes.len() {
        return Err(Error::Format(format!("{} trailing bytes", bytes.len() - c.pos)));
    }
    Ok((grid, values))
}

pub fn write_grid<W: Write>(w: W, m: &SymbolGrid) -> Result<()> {
    write_binary(w, &GRID_MAGIC, &m.grid, &m.values)
}

pub fn read_grid<R: Read>(r: R) -> Result<SymbolGrid> {
    let (grid, values) = read_binary(r, &GRID_MAGIC)?;
    SymbolGrid::from_values(grid, values)
}

pub fn write_field<W: Write>(w: W, f: &SampledField) -> Result<()> {
    write_binary(w, &FIELD_MAGIC, &f.grid, &f.values)
}

pub fn read_field<R: Read>(r: R) -> Result<SampledField> {
    let (grid, values) = read_binary(r, &FIELD_MAGIC)?;
    SampledField::new(grid, values)
}

/// 17 significant digits.
pub fn fmt17(v: f64) -> String {
    format!("{v:.16e}")
}

fn write_table<W: Write>(w: W, prefix: &str, grid: &GridSpec, values: &[C64], coords: impl Fn(usize) -> Vec<f64>, tail: [&str; 2]) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    let mut header: Vec<String> = (1..=grid.d()).map(|i| format!("{prefix}_{i}")).collect();
    header.extend(tail.iter().map(|s| s.to_string()));
    out.write_record(&header)?;
    for (i, v) in values.iter().enumerate() {
        let mut row: Vec<String> = coords(i).into_iter().map(fmt17).collect();
        row.push(fmt17(v.re));
        row.push(fmt17(v.im));
        out.write_record(&row)?;
    }
    out.flush()?;
    Ok(())
}

/// Header xi_1..xi_d,re_m,im_m; rows in row-major frequency order.
pub fn write_grid_csv<W: Write>(w: W, m: &SymbolGrid) -> Result<()> {
    write_table(w, "xi", &m.grid, &m.values, |i| m.grid.frequency(i), ["re_m", "im_m"])
}

/// Header x_1..x_d,re_f,im_f.
pub fn write_field_csv<W: Write>(w: W, f: &SampledField) -> Result<()> {
    write_table(w, "x", &f.grid, &f.values, |i| f.grid.position(i), ["re_f", "im_f"])
}

pub fn write_probe_csv<W: Write>(w: W, reports: &[ProbeReport]) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(["p", "bound", "best_ratio", "trials", "seed", "pass"])?;
    for r in reports {
        out.write_record([
            fmt17(r.p),
            fmt17(r.bound),
            fmt17(r.best_ratio),
            r.trials.to_string(),
            r.seed.to_string(),
            r.pass.to_string(),
        ])?;
    }
    out.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn binary_round_trip() {
        let grid = GridSpec::new(vec![4.0, 6.0], vec![4, 8]).unwrap();
        let f = SampledField::from_fn(grid.clone(), |x| C64::new(x[0], x[1] * 0.5)).unwrap();
        let mut buf = Vec::new();
        write_field(&mut buf, &f).unwrap();
        assert_eq!(&buf[..8], b"LMFIELD1");
        assert_eq!(buf.len(), 8 + 8 + 2 * 8 + 2 * 8 + 32 * 16);
        assert_eq!(read_field(&buf[..]).unwrap(), f);
        let m = SymbolGrid::from_values(grid, vec![C64::new(0.25, -0.5); 32]).unwrap();
        let mut buf = Vec::new();
        write_grid(&mut buf, &m).unwrap();
        assert_eq!(read_grid(&buf[..]).unwrap().values, m.values);
        // a grid file is not a field file
        assert!(matches!(read_field(&buf[..]), Err(Error::Format(_))));
    }

    #[test]
    fn truncated_file_is_rejected() {
        let grid = GridSpec::cube(1, 2.0, 4).unwrap();
        let mut buf = Vec::new();
        write_field(&mut buf, &SampledField::zeros(grid).unwrap()).unwrap();
        buf.pop();
        assert!(matches!(read_field(&buf[..]), Err(Error::Format(_))));
    }

    #[test]
    fn csv_has_full_precision() {
        let grid = GridSpec::cube(1, 2.0 * std::f64::consts::PI, 4).unwrap();
        let m = SymbolGrid::from_values(grid, vec![C64::new(1.0 / 3.0, 0.0); 4]).unwrap();
        let mut buf = Vec::new();
        write_grid_csv(&mut buf, &m).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some("xi_1,re_m,im_m"));
        let first: Vec<&str> = lines.next().unwrap().split(',').collect();
        assert_eq!(first[0].parse::<f64>().unwrap(), -2.0);
        assert_eq!(first[1].parse::<f64>().unwrap(), 1.0 / 3.0);
    }
}
