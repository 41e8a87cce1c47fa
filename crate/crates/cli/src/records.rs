//! JSONL branch files: a header line, one line per solution point, and a
//! closing status line.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use dropwave_core::{bifurcation_speed, BranchStatus, ContinuationConfig, SolutionPoint};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, Result};

pub const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BranchFileHeader {
    pub format_version: u32,
    pub m: usize,
    pub k: usize,
    pub sign: i8,
    pub direction: i8,
    #[serde(rename = "N")]
    pub modes: usize,
    #[serde(rename = "M")]
    pub grid: usize,
    pub c_bif: f64,
    pub config: ContinuationConfig,
    pub created: String,
}

impl BranchFileHeader {
    pub fn new(
        m: usize,
        k: usize,
        direction: i8,
        config: &ContinuationConfig,
        grid: usize,
    ) -> Result<Self> {
        let mut config = config.clone();
        config.grid = Some(grid);
        Ok(Self {
            format_version: FORMAT_VERSION,
            m,
            k,
            sign: 1,
            direction,
            modes: config.modes,
            grid,
            c_bif: bifurcation_speed(m, k)?,
            config,
            created: chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Secs, true),
        })
    }

    fn check(&self) -> std::result::Result<(), String> {
        if self.format_version != FORMAT_VERSION {
            return Err(format!(
                "unsupported format_version {}",
                self.format_version
            ));
        }
        let expect = bifurcation_speed(self.m, self.k).map_err(|e| e.to_string())?;
        if (self.c_bif - expect).abs() > 1e-12 {
            return Err(format!("c_bif {} does not match {expect}", self.c_bif));
        }
        Ok(())
    }
}

/// Infinite chord-arc values (self-contact) are written as the string "inf".
mod extended_float {
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    #[derive(Serialize, Deserialize)]
    #[serde(untagged)]
    enum Repr {
        Num(f64),
        Text(String),
    }

    pub fn serialize<S: Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
        if v.is_finite() {
            s.serialize_f64(*v)
        } else if v.is_nan() {
            s.serialize_str("nan")
        } else if *v > 0.0 {
            s.serialize_str("inf")
        } else {
            s.serialize_str("-inf")
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        match Repr::deserialize(d)? {
            Repr::Num(v) => Ok(v),
            Repr::Text(t) => match t.as_str() {
                "inf" => Ok(f64::INFINITY),
                "-inf" => Ok(f64::NEG_INFINITY),
                "nan" => Ok(f64::NAN),
                other => Err(serde::de::Error::custom(format!("not a number: {other}"))),
            },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointRecord {
    pub s: f64,
    pub c: f64,
    pub coeffs: Vec<f64>,
    pub residual_complex: f64,
    pub residual_real: f64,
    #[serde(with = "extended_float")]
    pub chord_arc: f64,
    pub c1_norm: f64,
    pub curvature_min: f64,
    pub curvature_max: f64,
    pub decay_slope: f64,
    pub newton_iters: usize,
}

impl From<&SolutionPoint> for PointRecord {
    fn from(p: &SolutionPoint) -> Self {
        Self {
            s: p.s,
            c: p.c,
            coeffs: p.z.coeffs().to_vec(),
            residual_complex: p.norm_complex,
            residual_real: p.norm_real,
            chord_arc: p.diagnostics.chord_arc,
            c1_norm: p.diagnostics.c1_norm,
            curvature_min: p.diagnostics.curvature_min,
            curvature_max: p.diagnostics.curvature_max,
            decay_slope: p.diagnostics.decay_slope,
            newton_iters: p.newton_iters,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StatusRecord {
    pub status: BranchStatus,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

/// Everything read back from a branch file. Runs that were interrupted have
/// no status line.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct BranchFile {
    pub header: Option<BranchFileHeader>,
    pub points: Vec<PointRecord>,
    pub status: Option<StatusRecord>,
}

/// Appends records line by line, flushing after each so a partial run is
/// readable while it is still going.
pub struct BranchWriter {
    path: PathBuf,
    out: BufWriter<File>,
}

impl BranchWriter {
    pub fn create(path: &Path) -> Result<Self> {
        let file = File::create(path).map_err(|e| CliError::io(path, e))?;
        Ok(Self {
            path: path.to_path_buf(),
            out: BufWriter::new(file),
        })
    }

    fn line<T: Serialize>(&mut self, value: &T) -> Result<()> {
        let text = serde_json::to_string(value).expect("records serialize");
        writeln!(self.out, "{text}")
            .and_then(|_| self.out.flush())
            .map_err(|e| CliError::io(&self.path, e))
    }

    pub fn header(&mut self, header: &BranchFileHeader) -> Result<()> {
        self.line(header)
    }

    pub fn point(&mut self, point: &PointRecord) -> Result<()> {
        self.line(point)
    }

    pub fn status(&mut self, status: &StatusRecord) -> Result<()> {
        self.line(status)
    }
}

pub fn read_branch(path: &Path) -> Result<BranchFile> {
    let file = File::open(path).map_err(|e| CliError::io(path, e))?;
    let mut branch = BranchFile::default();
    for (i, line) in BufReader::new(file).lines().enumerate() {
        let line = line.map_err(|e| CliError::io(path, e))?;
        let lineno = i + 1;
        let err = |message: String| CliError::Parse {
            path: path.to_path_buf(),
            line: lineno,
            message,
        };
        if line.trim().is_empty() {
            continue;
        }
        if branch.status.is_some() {
            return Err(err("content after the status line".into()));
        }
        let value: serde_json::Value =
            serde_json::from_str(&line).map_err(|e| err(e.to_string()))?;
        let Some(obj) = value.as_object() else {
            return Err(err("expected a JSON object".into()));
        };
        if obj.contains_key("format_version") {
            if branch.header.is_some() || !branch.points.is_empty() {
                return Err(err("header must be the first line".into()));
            }
            let header: BranchFileHeader =
                serde_json::from_value(value).map_err(|e| err(e.to_string()))?;
            header.check().map_err(err)?;
            branch.header = Some(header);
        } else if obj.contains_key("status") {
            branch.status = Some(serde_json::from_value(value).map_err(|e| err(e.to_string()))?);
        } else {
            if branch.header.is_none() {
                return Err(err("point before header".into()));
            }
            branch
                .points
                .push(serde_json::from_value(value).map_err(|e| err(e.to_string()))?);
        }
    }
    Ok(branch)
}
