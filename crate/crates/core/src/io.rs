//! File formats: signal CSV, coefficient CSV, frame descriptors.
//!
//! Floats are written with 17 significant digits (`{:.16e}`), which
//! round-trips every finite f64 bit-exactly.

use std::io::{BufRead, Write};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{GaborError, Result};
use crate::frame::{Coefficients, LatticeSpec};
use crate::signal::{Grid, SampledSignal, WindowSpec};
use crate::weyl::TimeFreqPoint;

pub(crate) fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

fn parse_f64(s: &str, what: &str) -> Result<f64> {
    s.trim()
        .parse::<f64>()
        .map_err(|e| GaborError::Format(format!("bad {what} value {s:?}: {e}")))
}

/// Serde helper storing complex sequences as `[re, im]` pairs.
pub mod complex_pairs {
    use num_complex::Complex64;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(v: &[Complex64], s: S) -> Result<S::Ok, S::Error> {
        let pairs: Vec<[f64; 2]> = v.iter().map(|c| [c.re, c.im]).collect();
        pairs.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Complex64>, D::Error> {
        let pairs = Vec::<[f64; 2]>::deserialize(d)?;
        Ok(pairs
            .into_iter()
            .map(|[re, im]| Complex64::new(re, im))
            .collect())
    }
}

/// Write a signal as CSV: a `# n=..,dt=..,t0=..` metadata comment, the
/// `index,t,re,im` header, one row per sample.
pub fn write_signal_csv(f: &SampledSignal, mut w: impl Write) -> Result<()> {
    let g = f.grid();
    writeln!(
        w,
        "# n={},dt={},t0={}",
        g.len(),
        fmt_f64(g.dt()),
        fmt_f64(g.t0())
    )?;
    writeln!(w, "index,t,re,im")?;
    for (k, v) in f.values().iter().enumerate() {
        writeln!(
            w,
            "{},{},{},{}",
            k,
            fmt_f64(g.time(k)),
            fmt_f64(v.re),
            fmt_f64(v.im)
        )?;
    }
    Ok(())
}

/// Read a signal written by [`write_signal_csv`].
pub fn read_signal_csv(r: impl BufRead) -> Result<SampledSignal> {
    let mut lines = r.lines();
    let meta = lines
        .next()
        .ok_or_else(|| GaborError::Format("empty signal file".into()))??;
    let meta = meta
        .strip_prefix('#')
        .ok_or_else(|| GaborError::Format("missing `# n=..,dt=..,t0=..` metadata line".into()))?
        .trim();
    let (mut n, mut dt, mut t0) = (None, None, None);
    for field in meta.split(',') {
        let (key, value) = field
            .split_once('=')
            .ok_or_else(|| GaborError::Format(format!("bad metadata field {field:?}")))?;
        match key.trim() {
            "n" => {
                n = Some(
                    value
                        .trim()
                        .parse::<usize>()
                        .map_err(|e| GaborError::Format(format!("bad n value {value:?}: {e}")))?,
                )
            }
            "dt" => dt = Some(parse_f64(value, "dt")?),
            "t0" => t0 = Some(parse_f64(value, "t0")?),
            other => {
                return Err(GaborError::Format(format!(
                    "unknown metadata key {other:?}"
                )))
            }
        }
    }
    let (n, dt, t0) = match (n, dt, t0) {
        (Some(n), Some(dt), Some(t0)) => (n, dt, t0),
        _ => return Err(GaborError::Format("metadata must set n, dt and t0".into())),
    };
    let grid = Grid::new(n, dt, t0)?;

    let header = lines
        .next()
        .ok_or_else(|| GaborError::Format("missing header line".into()))??;
    if header.trim() != "index,t,re,im" {
        return Err(GaborError::Format(format!(
            "expected header `index,t,re,im`, got {header:?}"
        )));
    }
    let mut values = Vec::with_capacity(n);
    for line in lines {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let cols: Vec<&str> = line.split(',').collect();
        if cols.len() != 4 {
            return Err(GaborError::Format(format!(
                "expected 4 columns, got {line:?}"
            )));
        }
        values.push(Complex64::new(
            parse_f64(cols[2], "re")?,
            parse_f64(cols[3], "im")?,
        ));
    }
    if values.len() != n {
        return Err(GaborError::Format(format!(
            "metadata says n={n} but file holds {} rows",
            values.len()
        )));
    }
    SampledSignal::new(grid, values)
}

/// Write coefficients as CSV. Lattice-spec frames get indexed rows
/// (`m,n,omega,s,re,im`); arbitrary lattices drop the index columns.
pub fn write_coefficients_csv(c: &Coefficients, mut w: impl Write) -> Result<()> {
    match &c.indices {
        Some(ix) => {
            writeln!(w, "m,n,omega,s,re,im")?;
            for ((p, v), (m, n)) in c.points.iter().zip(&c.values).zip(ix) {
                writeln!(
                    w,
                    "{},{},{},{},{},{}",
                    m,
                    n,
                    fmt_f64(p.omega),
                    fmt_f64(p.s),
                    fmt_f64(v.re),
                    fmt_f64(v.im)
                )?;
            }
        }
        None => {
            writeln!(w, "omega,s,re,im")?;
            for (p, v) in c.points.iter().zip(&c.values) {
                writeln!(
                    w,
                    "{},{},{},{}",
                    fmt_f64(p.omega),
                    fmt_f64(p.s),
                    fmt_f64(v.re),
                    fmt_f64(v.im)
                )?;
            }
        }
    }
    Ok(())
}

/// Read coefficients written by [`write_coefficients_csv`].
pub fn read_coefficients_csv(r: impl BufRead) -> Result<Coefficients> {
    let mut lines = r.lines();
    let header = lines
        .next()
        .ok_or_else(|| GaborError::Format("empty coefficient file".into()))??;
    let indexed = match header.trim() {
        "m,n,omega,s,re,im" => true,
        "omega,s,re,im" => false,
        other => {
            return Err(GaborError::Format(format!(
                "unrecognized coefficient header {other:?}"
            )))
        }
    };
    let mut points = Vec::new();
    let mut values = Vec::new();
    let mut indices = Vec::new();
    for line in lines {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let cols: Vec<&str> = line.split(',').collect();
        let want = if indexed { 6 } else { 4 };
        if cols.len() != want {
            return Err(GaborError::Format(format!(
                "expected {want} columns, got {line:?}"
            )));
        }
        let base =
            if indexed {
                indices.push((
                    cols[0].trim().parse::<i64>().map_err(|e| {
                        GaborError::Format(format!("bad m index {:?}: {e}", cols[0]))
                    })?,
                    cols[1].trim().parse::<i64>().map_err(|e| {
                        GaborError::Format(format!("bad n index {:?}: {e}", cols[1]))
                    })?,
                ));
                2
            } else {
                0
            };
        points.push(TimeFreqPoint::new(
            parse_f64(cols[base], "omega")?,
            parse_f64(cols[base + 1], "s")?,
        ));
        values.push(Complex64::new(
            parse_f64(cols[base + 2], "re")?,
            parse_f64(cols[base + 3], "im")?,
        ));
    }
    Ok(Coefficients {
        points,
        values,
        indices: if indexed { Some(indices) } else { None },
    })
}

/// Window source: an analytic spec or a signal file.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum WindowDescriptor {
    Spec(WindowSpec),
    File { file: String },
}

/// Lattice source: a separable spec or explicit points.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum LatticeDescriptor {
    Spec(LatticeSpec),
    Points { points: Vec<(f64, f64)> },
}

/// Frame descriptor: everything needed to rebuild a frame from JSON.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FrameDescriptor {
    pub window: WindowDescriptor,
    pub grid: Grid,
    pub lattice: LatticeDescriptor,
}
