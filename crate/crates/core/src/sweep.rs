//! Parameter-plane sweeps and the text formats written by the CLI.

use std::io::Write;
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::criteria::{classify, Classification, CriterionReport};
use crate::error::{Error, Result};
use crate::nonlinearity::{omega_p, Params, P_FLOOR};
use crate::shooting::Sample;

pub const SWEEP_HEADER: [&str; 10] = [
    "p",
    "omega",
    "omega_p",
    "a_p",
    "alpha",
    "beta",
    "b",
    "c",
    "classification",
    "k_alpha",
];

pub const PROFILE_HEADER: [&str; 3] = ["r", "u", "du"];

/// One `(p, ω)` grid point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepCell {
    pub p: f64,
    pub omega: f64,
    pub omega_p: f64,
    pub a_p: f64,
    pub alpha: Option<f64>,
    pub beta: Option<f64>,
    pub b: Option<f64>,
    pub c: Option<f64>,
    pub classification: Classification,
    pub k_alpha: Option<f64>,
}

impl From<&CriterionReport> for SweepCell {
    fn from(r: &CriterionReport) -> Self {
        SweepCell {
            p: r.p,
            omega: r.omega,
            omega_p: r.critical.omega_p,
            a_p: r.critical.a_p,
            alpha: Some(r.critical.alpha),
            beta: r.critical.beta,
            b: r.critical.b,
            c: r.critical.c,
            classification: r.classification,
            k_alpha: r.k_alpha,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepGrid {
    pub p_min: f64,
    pub p_max: f64,
    pub p_steps: usize,
    pub omega_steps: usize,
}

impl SweepGrid {
    pub fn validate(&self) -> Result<()> {
        if !(self.p_min.is_finite() && self.p_max.is_finite()) || self.p_min <= P_FLOOR {
            return Err(Error::InvalidParams(format!(
                "p_min must be finite and > 1 (got {})",
                self.p_min
            )));
        }
        if self.p_max < self.p_min {
            return Err(Error::InvalidParams("p_max must be >= p_min".into()));
        }
        if self.p_steps < 2 || self.omega_steps < 2 {
            return Err(Error::InvalidParams("p_steps and omega_steps must be >= 2".into()));
        }
        Ok(())
    }

    /// `p_steps` uniform exponents from `p_min` to `p_max` inclusive.
    pub fn p_values(&self) -> Vec<f64> {
        let span = self.p_max - self.p_min;
        (0..self.p_steps)
            .map(|i| self.p_min + span * i as f64 / (self.p_steps - 1) as f64)
            .collect()
    }

    /// `omega_steps` frequencies strictly inside `(0, ω_p(p))`, at the
    /// fractions `j/(omega_steps+1)`.
    pub fn omega_values(&self, p: f64) -> Result<Vec<f64>> {
        let wp = omega_p(p)?;
        let m = (self.omega_steps + 1) as f64;
        Ok((1..=self.omega_steps).map(|j| wp * j as f64 / m).collect())
    }
}

/// Classifies every cell of the grid. Rows are computed in parallel and
/// returned sorted by `(p, ω)`.
pub fn sweep(grid: &SweepGrid) -> Result<Vec<SweepCell>> {
    grid.validate()?;
    let rows: Vec<Vec<SweepCell>> = grid
        .p_values()
        .into_par_iter()
        .map(|p| {
            grid.omega_values(p)?
                .into_iter()
                .map(|w| Ok(SweepCell::from(&classify(&Params::planar(p, w)?))))
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<_>>()?;
    Ok(rows.into_iter().flatten().collect())
}

/// Decimal text with 17 significant digits, enough to round-trip any f64.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

fn fmt_opt(x: Option<f64>) -> String {
    x.map(fmt_f64).unwrap_or_default()
}

fn csv_err(e: csv::Error) -> Error {
    Error::InvalidParams(format!("csv: {e}"))
}

pub fn cell_record(c: &SweepCell) -> [String; 10] {
    [
        fmt_f64(c.p),
        fmt_f64(c.omega),
        fmt_f64(c.omega_p),
        fmt_f64(c.a_p),
        fmt_opt(c.alpha),
        fmt_opt(c.beta),
        fmt_opt(c.b),
        fmt_opt(c.c),
        c.classification.as_str().to_string(),
        fmt_opt(c.k_alpha),
    ]
}

pub fn write_sweep_csv<W: Write>(out: W, cells: &[SweepCell]) -> Result<()> {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(out);
    w.write_record(SWEEP_HEADER).map_err(csv_err)?;
    for c in cells {
        w.write_record(cell_record(c)).map_err(csv_err)?;
    }
    w.flush().map_err(|e| Error::InvalidParams(e.to_string()))
}

fn parse_opt(field: &str) -> Result<Option<f64>> {
    if field.is_empty() {
        return Ok(None);
    }
    field
        .parse()
        .map(Some)
        .map_err(|_| Error::InvalidParams(format!("bad number {field:?}")))
}

pub fn read_sweep_csv<R: std::io::Read>(input: R) -> Result<Vec<SweepCell>> {
    let mut r = csv::Reader::from_reader(input);
    let header = r.headers().map_err(csv_err)?;
    if header.iter().ne(SWEEP_HEADER) {
        return Err(Error::InvalidParams(format!("unexpected header {header:?}")));
    }
    r.records()
        .map(|rec| {
            let rec = rec.map_err(csv_err)?;
            let num = |i: usize| {
                parse_opt(&rec[i])?
                    .ok_or_else(|| Error::InvalidParams(format!("missing {}", SWEEP_HEADER[i])))
            };
            Ok(SweepCell {
                p: num(0)?,
                omega: num(1)?,
                omega_p: num(2)?,
                a_p: num(3)?,
                alpha: parse_opt(&rec[4])?,
                beta: parse_opt(&rec[5])?,
                b: parse_opt(&rec[6])?,
                c: parse_opt(&rec[7])?,
                classification: rec[8].parse()?,
                k_alpha: parse_opt(&rec[9])?,
            })
        })
        .collect()
}

pub fn write_sweep_json<W: Write>(mut out: W, cells: &[SweepCell]) -> Result<()> {
    serde_json::to_writer_pretty(&mut out, cells)
        .map_err(|e| Error::InvalidParams(format!("json: {e}")))?;
    out.write_all(b"\n").map_err(|e| Error::InvalidParams(e.to_string()))
}

pub fn write_profile_csv<W: Write>(out: W, rows: &[Sample]) -> Result<()> {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(out);
    w.write_record(PROFILE_HEADER).map_err(csv_err)?;
    for s in rows {
        w.write_record([fmt_f64(s.r), fmt_f64(s.u), fmt_f64(s.du)]).map_err(csv_err)?;
    }
    w.flush().map_err(|e| Error::InvalidParams(e.to_string()))
}

/// Writes through a temporary file in the destination directory and renames
/// it into place, so a failed write leaves nothing behind.
pub fn write_atomically<F>(path: &Path, fill: F) -> std::io::Result<()>
where
    F: FnOnce(&mut std::fs::File) -> Result<()>,
{
    let dir = path
        .parent()
        .filter(|d| !d.as_os_str().is_empty())
        .unwrap_or_else(|| Path::new("."));
    let name = path.file_name().and_then(|n| n.to_str()).unwrap_or("out");
    let tmp = dir.join(format!(".{name}.{}.tmp", std::process::id()));
    let result = (|| {
        let mut f = std::fs::File::create(&tmp)?;
        fill(&mut f).map_err(std::io::Error::other)?;
        f.sync_all()?;
        std::fs::rename(&tmp, path)
    })();
    if result.is_err() {
        let _ = std::fs::remove_file(&tmp);
    }
    result
}
