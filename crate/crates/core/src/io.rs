//! Text formats: float formatting, `start:stop:step` grids and headerless
//! numeric CSV.

use crate::error::{Error, Result};

/// 17 significant digits, enough to round-trip any f64.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

/// Joins values as one CSV row.
pub fn csv_row(values: &[f64]) -> String {
    values.iter().map(|v| fmt_f64(*v)).collect::<Vec<_>>().join(",")
}

/// Parses `start:stop:step` into an inclusive uniform grid.
pub fn parse_grid(spec: &str) -> Result<Vec<f64>> {
    let parts: Vec<&str> = spec.split(':').collect();
    if parts.len() != 3 {
        return Err(Error::Parse(format!("grid `{spec}` is not start:stop:step")));
    }
    let num = |s: &str| s.trim().parse::<f64>().map_err(|e| Error::Parse(format!("grid `{spec}`: {e}")));
    let (start, stop, step) = (num(parts[0])?, num(parts[1])?, num(parts[2])?);
    if !(step > 0.0) || !(stop >= start) || !start.is_finite() || !stop.is_finite() {
        return Err(Error::Parse(format!("grid `{spec}` needs start ≤ stop and a positive step")));
    }
    let count = ((stop - start) / step + 1e-9).floor() as usize + 1;
    if count > 10_000_000 {
        return Err(Error::Parse(format!("grid `{spec}` has too many points")));
    }
    // snap the last point so `a:b:h` ends exactly at b when h divides b - a
    Ok((0..count)
        .map(|i| {
            let x = start + step * i as f64;
            if (x - stop).abs() <= 1e-9 * step { stop } else { x.min(stop) }
        })
        .collect())
}

/// Headerless numeric CSV as (rows, columns, row-major values).
pub fn read_numeric_csv(text: &str) -> Result<(usize, usize, Vec<f64>)> {
    let mut cols = None;
    let mut rows = 0;
    let mut out = Vec::new();
    for (k, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let before = out.len();
        for cell in line.split(',') {
            out.push(cell.trim().parse::<f64>().map_err(|e| Error::Parse(format!("line {}: {e}", k + 1)))?);
        }
        let width = out.len() - before;
        match cols {
            None => cols = Some(width),
            Some(c) if c != width => {
                return Err(Error::Parse(format!("line {} has {width} columns, expected {c}", k + 1)));
            }
            _ => {}
        }
        rows += 1;
    }
    Ok((rows, cols.unwrap_or(0), out))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grids() {
        let g = parse_grid("-8:4:0.05").unwrap();
        assert_eq!(g.len(), 241);
        assert!((g[240] - 4.0).abs() < 1e-12);
        assert_eq!(parse_grid("0:0:1").unwrap(), vec![0.0]);
        assert!(parse_grid("1:0:1").is_err());
        assert!(parse_grid("0:1").is_err());
        assert!(parse_grid("0:1:0").is_err());
    }

    #[test]
    fn float_roundtrip() {
        for v in [0.1, -1.0 / 3.0, 1e-300, 6.02e23, f64::MIN_POSITIVE] {
            assert_eq!(fmt_f64(v).parse::<f64>().unwrap(), v);
        }
        assert_eq!(fmt_f64(1.0), "1.0000000000000000e0");
    }

    #[test]
    fn csv() {
        assert_eq!(read_numeric_csv("1,2\n3,4\n\n").unwrap(), (2, 2, vec![1.0, 2.0, 3.0, 4.0]));
        assert!(read_numeric_csv("1,2\n3\n").is_err());
        assert!(read_numeric_csv("a,b\n").is_err());
    }
}
