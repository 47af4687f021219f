//! SGF, a line-oriented text format for sampled grid functions:
//!
//! ```text
//! SGF1
//! dim N
//! shape n1 … nN
//! origin o1 … oN
//! spacing h1 … hN
//! lipschitz L | lipschitz unknown
//! v v v …            (∏nᵢ values, row-major, last axis fastest)
//! ```
//!
//! Floats are written with 17 significant digits, so a write/read round trip
//! is bit-exact for finite values.

use std::io::{BufRead, Write};

use crate::error::{Error, Result};
use crate::grid::{GridGeometry, SampledGridFunction};

const MAGIC: &str = "SGF1";
const PER_LINE: usize = 8;

fn fmt17(x: f64) -> String {
    format!("{x:.16e}")
}

fn write_row(out: &mut impl Write, key: &str, xs: impl Iterator<Item = String>) -> Result<()> {
    let row: Vec<String> = xs.collect();
    writeln!(out, "{key} {}", row.join(" "))?;
    Ok(())
}

/// Writes `u` with `PER_LINE` values to a line.
pub fn write_sgf(u: &SampledGridFunction, out: &mut impl Write) -> Result<()> {
    let g = u.geometry();
    writeln!(out, "{MAGIC}")?;
    writeln!(out, "dim {}", g.dim())?;
    write_row(out, "shape", g.shape().iter().map(|n| n.to_string()))?;
    write_row(out, "origin", g.origin().iter().map(|&x| fmt17(x)))?;
    write_row(out, "spacing", g.spacing().iter().map(|&x| fmt17(x)))?;
    match u.lipschitz_hint() {
        Some(l) => writeln!(out, "lipschitz {}", fmt17(l))?,
        None => writeln!(out, "lipschitz unknown")?,
    }
    for chunk in u.values().chunks(PER_LINE) {
        let line: Vec<String> = chunk.iter().map(|&v| fmt17(v)).collect();
        writeln!(out, "{}", line.join(" "))?;
    }
    Ok(())
}

pub fn to_sgf_string(u: &SampledGridFunction) -> String {
    let mut buf = Vec::new();
    write_sgf(u, &mut buf).expect("writing to memory");
    String::from_utf8(buf).expect("ascii output")
}

struct Lines<R> {
    inner: std::io::Lines<R>,
    line: usize,
}

impl<R: BufRead> Lines<R> {
    fn next_line(&mut self) -> Result<Option<String>> {
        match self.inner.next() {
            None => Ok(None),
            Some(l) => {
                self.line += 1;
                Ok(Some(l?))
            }
        }
    }

    fn err(&self, msg: impl Into<String>) -> Error {
        Error::Parse {
            line: self.line,
            msg: msg.into(),
        }
    }

    /// The fields after `key` on the next line.
    fn header(&mut self, key: &str) -> Result<Vec<String>> {
        let l = self
            .next_line()?
            .ok_or_else(|| self.err(format!("missing `{key}` line")))?;
        let mut parts = l.split_whitespace();
        if parts.next() != Some(key) {
            return Err(self.err(format!("expected `{key}`")));
        }
        Ok(parts.map(str::to_string).collect())
    }

    fn parse<T: std::str::FromStr>(&self, s: &str, what: &str) -> Result<T> {
        s.parse()
            .map_err(|_| self.err(format!("invalid {what} `{s}`")))
    }

    fn floats(&mut self, key: &str, dim: usize) -> Result<Vec<f64>> {
        let f = self.header(key)?;
        if f.len() != dim {
            return Err(self.err(format!("`{key}` needs {dim} entries, found {}", f.len())));
        }
        f.iter().map(|s| self.parse(s, key)).collect()
    }
}

pub fn read_sgf(input: impl BufRead) -> Result<SampledGridFunction> {
    let mut r = Lines {
        inner: input.lines(),
        line: 0,
    };
    match r.next_line()? {
        Some(l) if l.trim_end() == MAGIC => {}
        _ => return Err(r.err("missing SGF1 magic")),
    }
    let d = r.header("dim")?;
    if d.len() != 1 {
        return Err(r.err("`dim` takes one entry"));
    }
    let dim: usize = r.parse(&d[0], "dimension")?;
    if dim == 0 {
        return Err(r.err("dimension must be positive"));
    }
    let sh = r.header("shape")?;
    if sh.len() != dim {
        return Err(r.err(format!("`shape` needs {dim} entries, found {}", sh.len())));
    }
    let shape: Vec<usize> = sh
        .iter()
        .map(|s| r.parse(s, "shape entry"))
        .collect::<Result<_>>()?;
    let origin = r.floats("origin", dim)?;
    let spacing = r.floats("spacing", dim)?;
    let l = r.header("lipschitz")?;
    let hint = match l.as_slice() {
        [s] if s == "unknown" => None,
        [s] => Some(r.parse::<f64>(s, "lipschitz constant")?),
        _ => return Err(r.err("`lipschitz` takes one entry")),
    };
    let header_line = r.line;
    let geometry = GridGeometry::new(shape, origin, spacing).map_err(|e| Error::Parse {
        line: header_line,
        msg: e.to_string(),
    })?;
    let total = geometry.len();
    let mut values = Vec::with_capacity(total);
    while let Some(l) = r.next_line()? {
        for tok in l.split_whitespace() {
            if values.len() == total {
                return Err(r.err(format!("more than {total} values")));
            }
            values.push(r.parse::<f64>(tok, "value")?);
        }
    }
    if values.len() != total {
        return Err(r.err(format!("expected {total} values, found {}", values.len())));
    }
    SampledGridFunction::new(geometry, values, hint).map_err(|e| Error::Parse {
        line: r.line,
        msg: e.to_string(),
    })
}

pub fn from_sgf_str(s: &str) -> Result<SampledGridFunction> {
    read_sgf(s.as_bytes())
}

pub fn write_sgf_file(u: &SampledGridFunction, path: &std::path::Path) -> Result<()> {
    let f = std::fs::File::create(path)?;
    let mut w = std::io::BufWriter::new(f);
    write_sgf(u, &mut w)?;
    w.flush()?;
    Ok(())
}

pub fn read_sgf_file(path: &std::path::Path) -> Result<SampledGridFunction> {
    let f = std::fs::File::open(path)?;
    read_sgf(std::io::BufReader::new(f))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> SampledGridFunction {
        let g = GridGeometry::new(vec![4, 5], vec![-1.0, 0.1], vec![0.7, 1.0 / 3.0]).unwrap();
        SampledGridFunction::from_fn(g, Some(std::f64::consts::PI), |x| (x[0] * x[0] + x[1]).abs().sqrt() / 7.0)
            .unwrap()
    }

    #[test]
    fn round_trip_is_bit_exact() {
        let u = sample();
        let back = from_sgf_str(&to_sgf_string(&u)).unwrap();
        assert_eq!(back.geometry(), u.geometry());
        assert_eq!(back.lipschitz_hint().map(f64::to_bits), u.lipschitz_hint().map(f64::to_bits));
        for (a, b) in u.values().iter().zip(back.values()) {
            assert_eq!(a.to_bits(), b.to_bits());
        }
    }

    #[test]
    fn unknown_lipschitz() {
        let u = sample().with_lipschitz_hint(None);
        let s = to_sgf_string(&u);
        assert!(s.contains("lipschitz unknown"));
        assert_eq!(from_sgf_str(&s).unwrap().lipschitz_hint(), None);
    }

    #[test]
    fn errors_carry_line_numbers() {
        let s = to_sgf_string(&sample());
        let bad = s.replacen("shape 4 5", "shape 4 x", 1);
        assert!(matches!(from_sgf_str(&bad), Err(Error::Parse { line: 3, .. })));
        let short: String = s.lines().take(8).collect::<Vec<_>>().join("\n");
        assert!(matches!(from_sgf_str(&short), Err(Error::Parse { .. })));
        assert!(matches!(from_sgf_str("SGF2\n"), Err(Error::Parse { line: 1, .. })));
    }
}
