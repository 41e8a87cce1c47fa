//! Subcommand implementations, separated from argument parsing so they can
//! be driven from tests.

use std::io::Write;
use std::path::{Path, PathBuf};

use dropwave_core::{
    bifurcation_speed, continue_branch, make_bifurcation_point, ContinuationConfig, LatticeCoeffs,
};

use crate::error::{CliError, Result};
use crate::export::write_csv;
use crate::records::{read_branch, BranchFileHeader, BranchWriter, PointRecord, StatusRecord};
use crate::render;
use crate::verify;

pub fn bif_values(m: usize, kmax: usize, out: &mut impl Write) -> Result<()> {
    if m < 2 {
        return Err(CliError::Usage(format!("--m must be at least 2, got {m}")));
    }
    let stdout = |e| CliError::io("<stdout>", e);
    writeln!(out, "k, mk, c").map_err(stdout)?;
    for k in 1..=kmax {
        let c = bifurcation_speed(m, k)?;
        writeln!(out, "{k}, {}, {c:.15}", m * k).map_err(stdout)?;
    }
    Ok(())
}

/// Prints one line per check and fails if any check does.
pub fn verify(full: bool, out: &mut impl Write) -> Result<()> {
    let results = verify::run(full);
    let width = results.iter().map(|r| r.name.len()).max().unwrap_or(0);
    let stdout = |e| CliError::io("<stdout>", e);
    for r in &results {
        let verdict = if r.passed { "PASS" } else { "FAIL" };
        writeln!(out, "{:width$}  {verdict}  {}", r.name, r.detail).map_err(stdout)?;
    }
    let failed: Vec<&str> = results
        .iter()
        .filter(|r| !r.passed)
        .map(|r| r.name)
        .collect();
    if failed.is_empty() {
        Ok(())
    } else {
        Err(CliError::Verification(failed.join(", ")))
    }
}

/// Reads a JSON config file; absent keys keep their defaults.
pub fn load_config(path: &Path) -> Result<ContinuationConfig> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    serde_json::from_str(&text).map_err(|e| CliError::Parse {
        path: path.to_path_buf(),
        line: e.line(),
        message: e.to_string(),
    })
}

#[derive(Debug, Clone)]
pub struct ContinueArgs {
    pub m: usize,
    pub k: usize,
    pub direction: i8,
    pub config: ContinuationConfig,
    pub out: PathBuf,
}

/// Streams a branch to `args.out`. A run that stops for a classified reason
/// (including Newton failure) is a success; the reason is in the status line.
pub fn continue_cmd(args: &ContinueArgs) -> Result<StatusRecord> {
    let cfg = &args.config;
    cfg.validate()?;
    let disc = cfg.discretization(args.m)?;
    let bp = make_bifurcation_point(args.m, args.k, cfg.modes)?;
    let header = BranchFileHeader::new(args.m, args.k, args.direction, cfg, disc.grid)?;

    let mut writer = BranchWriter::create(&args.out)?;
    writer.header(&header)?;
    let mut write_error = None;
    let record = continue_branch(&bp, args.direction, cfg, |p| {
        if write_error.is_none() {
            write_error = writer.point(&PointRecord::from(p)).err();
        }
    })?;
    if let Some(e) = write_error {
        return Err(e);
    }
    let status = StatusRecord {
        status: record.status,
        note: record.note,
    };
    writer.status(&status)?;
    Ok(status)
}

#[derive(Debug, Clone, Copy)]
pub enum Selector {
    Index(usize),
    /// Point with the arclength closest to this value.
    Arclength(f64),
}

pub fn render_cmd(input: &Path, select: Selector, out: &Path) -> Result<()> {
    let branch = read_branch(input)?;
    let header = branch.header.ok_or_else(|| CliError::Parse {
        path: input.to_path_buf(),
        line: 1,
        message: "missing header".into(),
    })?;
    let index = match select {
        Selector::Index(i) => i,
        Selector::Arclength(s) => branch
            .points
            .iter()
            .enumerate()
            .min_by(|a, b| (a.1.s - s).abs().total_cmp(&(b.1.s - s).abs()))
            .map(|(i, _)| i)
            .unwrap_or(0),
    };
    let point = branch.points.get(index).ok_or_else(|| {
        CliError::Usage(format!(
            "point {index} requested, file has {}",
            branch.points.len()
        ))
    })?;
    let z = LatticeCoeffs::new(header.m, point.coeffs.clone())?;
    let vertices = render::boundary(&z, header.grid)?;
    let title = format!(
        "m={} k={} s={:.6} c={:.6}",
        header.m, header.k, point.s, point.c
    );
    std::fs::write(out, render::svg(&vertices, &title)).map_err(|e| CliError::io(out, e))
}

pub fn export_csv(input: &Path, out: &Path) -> Result<()> {
    let branch = read_branch(input)?;
    write_csv(&branch.points, out)
}
