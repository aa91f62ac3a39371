//! Verification report: one row per check.

use std::fmt::Write as _;
use std::io::Write;

use num_complex::Complex64 as C64;

use super::stats::Stat;
use crate::error::Result;

#[derive(Clone, Debug, PartialEq)]
pub struct ReportRow {
    pub name: String,
    pub estimate: C64,
    pub se_re: f64,
    pub se_im: f64,
    pub reference: Option<C64>,
    pub pass: bool,
    pub note: String,
}

impl ReportRow {
    pub fn from_stat(name: impl Into<String>, stat: &Stat, reference: Option<C64>, pass: bool) -> Self {
        Self {
            name: name.into(),
            estimate: stat.mean,
            se_re: stat.se_re,
            se_im: stat.se_im,
            reference,
            pass,
            note: String::new(),
        }
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Self {
        self.note = note.into();
        self
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct Report {
    pub rows: Vec<ReportRow>,
}

impl Report {
    pub fn push(&mut self, row: ReportRow) {
        self.rows.push(row);
    }

    pub fn all_pass(&self) -> bool {
        self.rows.iter().all(|r| r.pass)
    }

    pub fn failures(&self) -> Vec<&str> {
        self.rows.iter().filter(|r| !r.pass).map(|r| r.name.as_str()).collect()
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        for r in &self.rows {
            let _ = write!(
                s,
                "{} {} estimate={:.10e}{:+.10e}i se=({:.3e},{:.3e})",
                if r.pass { "PASS" } else { "FAIL" },
                r.name,
                r.estimate.re,
                r.estimate.im,
                r.se_re,
                r.se_im
            );
            if let Some(v) = r.reference {
                let _ = write!(s, " reference={:.10e}{:+.10e}i", v.re, v.im);
            }
            if !r.note.is_empty() {
                let _ = write!(s, " {}", r.note);
            }
            s.push('\n');
        }
        s
    }

    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        out.write_record(["name", "re_est", "im_est", "se_re", "se_im", "re_ref", "im_ref", "pass", "note"])?;
        for r in &self.rows {
            let (rr, ri) = r
                .reference
                .map(|v| (format!("{:.16e}", v.re), format!("{:.16e}", v.im)))
                .unwrap_or_default();
            out.write_record([
                r.name.clone(),
                format!("{:.16e}", r.estimate.re),
                format!("{:.16e}", r.estimate.im),
                format!("{:.16e}", r.se_re),
                format!("{:.16e}", r.se_im),
                rr,
                ri,
                r.pass.to_string(),
                r.note.clone(),
            ])?;
        }
        out.flush()?;
        Ok(())
    }
}
