//! Text and JSON renderings of a [`RunReport`].
//!
//! The JSON form is `serde_json`'s pretty printing of [`RunReport`] followed by
//! a newline. Top-level fields: `program`, `n_qubits`, `config` (`shots`,
//! `seed`, `alpha`, `resamples`, `legacy_chisq`), `checkpoints` and `summary`
//! (`checkpoints`, `passed`, `failed`, `errors`, `mismatched`). Each checkpoint
//! carries `item_index`, `seed` and an `outcome` tagged by `status`:
//! `"evaluated"` outcomes hold the assertion result (`directive`, `p_value`,
//! `alpha`, `passed`, `shots_used`, `table_shape`, `matches_expected`,
//! optional `warnings`); `"error"` outcomes hold `directive` and `message`.

use std::fmt::Write;

use serde::{Deserialize, Serialize};

use super::{CheckpointOutcome, RunReport};
use crate::assertions::Check;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum ReportFormat {
    #[default]
    Text,
    Json,
}

/// `%g`-style formatting with `digits` significant digits.
pub fn format_significant(x: f64, digits: usize) -> String {
    if x == 0.0 || !x.is_finite() {
        return format!("{x}");
    }
    let digits = digits.max(1);
    // Rounding may carry into the next decade, so decide on the rounded value.
    let sci = format!("{:.*e}", digits - 1, x);
    let (mantissa, exp) = sci.split_once('e').expect("scientific notation");
    let exp: i32 = exp.parse().expect("exponent");
    if exp < -4 || exp >= digits as i32 {
        format!("{}e{}", trim_zeros(mantissa), exp)
    } else {
        let decimals = (digits as i32 - 1 - exp).max(0) as usize;
        trim_zeros(&format!("{x:.decimals$}")).to_owned()
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

fn list(qubits: &[usize]) -> String {
    let parts: Vec<String> = qubits.iter().map(usize::to_string).collect();
    format!("[{}]", parts.join(" "))
}

pub fn render_report(report: &RunReport, format: ReportFormat) -> String {
    match format {
        ReportFormat::Json => {
            let mut s = serde_json::to_string_pretty(report).expect("report serializes");
            s.push('\n');
            s
        }
        ReportFormat::Text => render_text(report),
    }
}

fn render_text(report: &RunReport) -> String {
    let mut out = String::new();
    let c = &report.config;
    let shots = c.shots.map_or_else(|| "default".to_owned(), |s| s.to_string());
    let _ = writeln!(
        out,
        "program {} ({} qubits) seed={} alpha={} shots={} resamples={}{}",
        report.program,
        report.n_qubits,
        c.seed,
        c.alpha,
        shots,
        c.resamples,
        if c.legacy_chisq { " legacy-chisq" } else { "" }
    );
    for (ordinal, cp) in report.checkpoints.iter().enumerate() {
        let d = cp.directive();
        let qubits = match &d.check {
            Check::Classical {
                qubits,
                expected_bitstring: Some(bits),
            } => format!("{} ={bits}", list(qubits)),
            Check::Classical { qubits, .. } | Check::Uniform { qubits } => list(qubits),
            Check::Product { group0, group1 } => format!("{} | {}", list(group0), list(group1)),
        };
        let _ = write!(
            out,
            "#{} item {} {} {}",
            ordinal + 1,
            cp.item_index,
            d.kind().name(),
            qubits
        );
        match &cp.outcome {
            CheckpointOutcome::Evaluated(r) => {
                let expectation = match r.matches_expected {
                    Some(true) => "expected:match",
                    Some(false) => "expected:MISMATCH",
                    None => "expected:-",
                };
                let _ = write!(
                    out,
                    " {} p={} alpha={} {} shots={}",
                    r.p_value.method.name(),
                    format_significant(r.p_value.value, 6),
                    r.alpha,
                    if r.passed { "passed" } else { "failed" },
                    r.shots_used
                );
                if let Some([rows, cols]) = r.table_shape {
                    let _ = write!(out, " table={rows}x{cols}");
                }
                let _ = writeln!(out, " {expectation}");
                for w in &r.warnings {
                    let _ = writeln!(out, "    warning: {w}");
                }
            }
            CheckpointOutcome::Error { message, .. } => {
                let _ = writeln!(out, " ERROR {message}");
            }
        }
    }
    let s = &report.summary;
    let _ = writeln!(
        out,
        "{} checkpoints: {} passed, {} failed, {} errors, {} mismatched",
        s.checkpoints, s.passed, s.failed, s.errors, s.mismatched
    );
    out
}
