//! CSV formats: sampled fields, two-column tables, and plain row dumps.
//!
//! 1D fields are `x,value` rows. 2D fields start with an `n,L,h` header and its row,
//! followed by `side` rows of `side` values each (row-major, first index slowest).
//! Every float is written with the shortest round-trip representation, `inf` for `+∞`.

use std::io::{Read, Write};

use crate::ext::{fmt_f64, parse_f64};
use crate::fields_norms::{FieldError, Grid, SampledField};

#[derive(Debug, thiserror::Error)]
pub enum IoError {
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error(transparent)]
    Field(#[from] FieldError),
}

fn parse_at(s: &str, line: usize) -> Result<f64, IoError> {
    parse_f64(s).ok_or_else(|| IoError::Parse { line, msg: format!("not a number: '{}'", s.trim()) })
}

fn reader<R: Read>(r: R, headers: bool) -> csv::Reader<R> {
    csv::ReaderBuilder::new().has_headers(headers).flexible(true).trim(csv::Trim::All).from_reader(r)
}

pub fn write_field<W: Write>(f: &SampledField, w: W) -> Result<(), IoError> {
    let g = f.grid;
    let mut out = csv::WriterBuilder::new().flexible(true).from_writer(w);
    if g.dim == 1 {
        out.write_record(["x", "value"])?;
        for (i, v) in f.values.iter().enumerate() {
            out.write_record([fmt_f64(g.coord(i)), fmt_f64(*v)])?;
        }
    } else {
        out.write_record(["n", "L", "h"])?;
        out.write_record([g.dim.to_string(), fmt_f64(g.half_width), fmt_f64(g.h)])?;
        for row in f.values.chunks(g.side) {
            out.write_record(row.iter().map(|v| fmt_f64(*v)))?;
        }
    }
    out.flush().map_err(csv::Error::from)?;
    Ok(())
}

pub fn read_field<R: Read>(r: R) -> Result<SampledField, IoError> {
    let mut rows = Vec::new();
    for rec in reader(r, false).records() {
        rows.push(rec?);
    }
    let first = rows.first().ok_or(IoError::Parse { line: 1, msg: "empty file".into() })?;
    match (first.get(0), first.get(1), first.get(2)) {
        (Some("x"), Some("value"), None) => read_1d(&rows[1..]),
        (Some("n"), Some("L"), Some("h")) => read_2d(&rows[1..]),
        _ => Err(IoError::Parse { line: 1, msg: "expected header 'x,value' or 'n,L,h'".into() }),
    }
}

fn read_1d(rows: &[csv::StringRecord]) -> Result<SampledField, IoError> {
    let mut xs = Vec::with_capacity(rows.len());
    let mut vs = Vec::with_capacity(rows.len());
    for (k, rec) in rows.iter().enumerate() {
        let line = k + 2;
        if rec.len() != 2 {
            return Err(IoError::Parse { line, msg: format!("expected 2 columns, got {}", rec.len()) });
        }
        xs.push(parse_at(&rec[0], line)?);
        vs.push(parse_at(&rec[1], line)?);
    }
    if xs.len() < 3 {
        return Err(IoError::Parse { line: 2, msg: "need at least 3 points".into() });
    }
    let half_width = -xs[0];
    let h = 2.0 * half_width / (xs.len() - 1) as f64;
    for (i, &x) in xs.iter().enumerate() {
        if (x - (i as f64 * h - half_width)).abs() > 1e-9 * half_width.max(1.0) {
            return Err(IoError::Parse { line: i + 2, msg: format!("x = {x} is off the uniform symmetric grid") });
        }
    }
    let grid = Grid::new(1, half_width, h)?;
    Ok(SampledField::new(grid, vs)?)
}

fn read_2d(rows: &[csv::StringRecord]) -> Result<SampledField, IoError> {
    let head = rows.first().ok_or(IoError::Parse { line: 2, msg: "missing n,L,h row".into() })?;
    if head.len() != 3 || &head[0] != "2" {
        return Err(IoError::Parse { line: 2, msg: "expected '2,L,h'".into() });
    }
    let grid = Grid::new(2, parse_at(&head[1], 2)?, parse_at(&head[2], 2)?)?;
    let body = &rows[1..];
    if body.len() != grid.side {
        return Err(IoError::Parse { line: 3, msg: format!("expected {} rows, got {}", grid.side, body.len()) });
    }
    let mut values = Vec::with_capacity(grid.side * grid.side);
    for (k, rec) in body.iter().enumerate() {
        let line = k + 3;
        if rec.len() != grid.side {
            return Err(IoError::Parse { line, msg: format!("expected {} values, got {}", grid.side, rec.len()) });
        }
        for s in rec.iter() {
            values.push(parse_at(s, line)?);
        }
    }
    Ok(SampledField::new(grid, values)?)
}

/// Two numeric columns under any header, e.g. `t,Phi` for a tabulated Young function.
pub fn read_table<R: Read>(r: R) -> Result<(Vec<f64>, Vec<f64>), IoError> {
    let mut a = Vec::new();
    let mut b = Vec::new();
    for (k, rec) in reader(r, true).records().enumerate() {
        let rec = rec?;
        let line = k + 2;
        if rec.len() != 2 {
            return Err(IoError::Parse { line, msg: format!("expected 2 columns, got {}", rec.len()) });
        }
        a.push(parse_at(&rec[0], line)?);
        b.push(parse_at(&rec[1], line)?);
    }
    Ok((a, b))
}

pub fn write_rows<W: Write, const N: usize>(header: [&str; N], rows: &[[String; N]], w: W) -> Result<(), IoError> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(header)?;
    for row in rows {
        out.write_record(row)?;
    }
    out.flush().map_err(csv::Error::from)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn round_trip(f: &SampledField) -> SampledField {
        let mut buf = Vec::new();
        write_field(f, &mut buf).unwrap();
        read_field(buf.as_slice()).unwrap()
    }

    #[test]
    fn field_round_trip_1d() {
        let g = Grid::new(1, 1.0, 0.1).unwrap();
        let f = SampledField::from_fn(g, |x| if x[0] > 0.3 { f64::INFINITY } else { x[0] / 3.0 });
        assert_eq!(round_trip(&f), f);
    }

    #[test]
    fn field_round_trip_2d() {
        let g = Grid::new(2, 0.5, 0.1).unwrap();
        let f = SampledField::from_fn(g, |x| x[0] - 2.0 * x[1]);
        assert_eq!(round_trip(&f), f);
    }

    #[test]
    fn malformed_inputs() {
        assert!(matches!(read_field("x,value\n-1,0\n0,abc\n1,0\n".as_bytes()), Err(IoError::Parse { line: 3, .. })));
        assert!(read_field("a,b\n".as_bytes()).is_err());
        assert!(read_field("x,value\n-1,0\n0.3,0\n1,0\n".as_bytes()).is_err());
        assert!(read_field("".as_bytes()).is_err());
    }

    #[test]
    fn table_with_inf() {
        let (t, v) = read_table("t,Phi\n0,0\n1,1\n2,inf\n".as_bytes()).unwrap();
        assert_eq!(t, vec![0.0, 1.0, 2.0]);
        assert_eq!(v[2], f64::INFINITY);
    }
}
