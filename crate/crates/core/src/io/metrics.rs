//! Comma-separated per-step metrics.
//!
//! The file starts with one `#` comment line echoing the reference
//! constants, then a header row:
//! `step,t,dt,cg_iterations,eta,xi_1,…,xi_K,d_bar,p_min,p_max,momentum_drift,volume`
//! with K the shifting iteration count.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use crate::calibration::ReferenceConstants;
use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::solver::StepReport;

fn real<T: Real>(x: T) -> String {
    format!("{x:.16e}")
}

pub fn metrics_header(shift_iterations: usize) -> String {
    let mut cols: Vec<String> = ["step", "t", "dt", "cg_iterations", "eta"].map(String::from).to_vec();
    cols.extend((1..=shift_iterations).map(|k| format!("xi_{k}")));
    cols.extend(["d_bar", "p_min", "p_max", "momentum_drift", "volume"].map(String::from));
    cols.join(",")
}

/// One row; ξ columns missing from the report are left empty.
pub fn metrics_row<T: Real>(report: &StepReport<T>, shift_iterations: usize) -> String {
    let mut cols = vec![
        report.step.to_string(),
        real(report.time),
        real(report.dt),
        report.cg_iterations.to_string(),
        real(report.eta),
    ];
    cols.extend((0..shift_iterations).map(|k| report.xi.get(k).map(|x| real(*x)).unwrap_or_default()));
    cols.extend([
        real(report.d_bar),
        real(report.p_min),
        real(report.p_max),
        real(report.momentum_drift),
        real(report.volume),
    ]);
    cols.join(",")
}

pub struct MetricsWriter {
    out: BufWriter<File>,
    path: PathBuf,
    shift_iterations: usize,
}

impl MetricsWriter {
    pub fn create<T: Real>(
        path: impl AsRef<Path>,
        constants: &ReferenceConstants<T>,
        shift_iterations: usize,
    ) -> Result<Self> {
        let path = path.as_ref().to_path_buf();
        let file = File::create(&path).map_err(|e| Error::io(&path, e))?;
        let mut writer = MetricsWriter {
            out: BufWriter::new(file),
            path,
            shift_iterations,
        };
        let c = constants;
        let comment = format!(
            "# alpha0={} a0={} c0={} delta0c={} beta0={}",
            real(c.alpha0),
            real(c.a0),
            real(c.c0),
            real(c.delta0c),
            real(c.beta0)
        );
        writer.line(&comment)?;
        writer.line(&metrics_header(shift_iterations))?;
        Ok(writer)
    }

    fn line(&mut self, text: &str) -> Result<()> {
        writeln!(self.out, "{text}").map_err(|e| Error::io(&self.path, e))
    }

    pub fn append<T: Real>(&mut self, report: &StepReport<T>) -> Result<()> {
        let row = metrics_row(report, self.shift_iterations);
        self.line(&row)
    }

    pub fn flush(&mut self) -> Result<()> {
        self.out.flush().map_err(|e| Error::io(&self.path, e))
    }
}
