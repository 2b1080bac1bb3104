//! Circuit files, built-in examples, program runs and reports.

mod examples;
mod parser;
mod report;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use examples::{builtin_examples, example, ExampleInfo, EXAMPLES};
pub use parser::parse_circuit;
pub use report::{format_significant, render_report, ReportFormat};

use crate::assertions::{checkpoint_seed, evaluate_checkpoint, AssertionDirective, AssertionResult, EvaluationConfig};
use crate::error::Result;
use crate::sim::{Circuit, Item};

/// Settings for one program run.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct ProgramConfig {
    #[serde(flatten)]
    pub evaluation: EvaluationConfig,
    pub format: ReportFormat,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum CheckpointOutcome {
    Evaluated(AssertionResult),
    Error {
        directive: AssertionDirective,
        message: String,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckpointReport {
    /// Position of the directive among the circuit's items.
    pub item_index: usize,
    pub seed: u64,
    pub outcome: CheckpointOutcome,
}

impl CheckpointReport {
    pub fn directive(&self) -> &AssertionDirective {
        match &self.outcome {
            CheckpointOutcome::Evaluated(r) => &r.directive,
            CheckpointOutcome::Error { directive, .. } => directive,
        }
    }

    pub fn result(&self) -> Option<&AssertionResult> {
        match &self.outcome {
            CheckpointOutcome::Evaluated(r) => Some(r),
            CheckpointOutcome::Error { .. } => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct Summary {
    pub checkpoints: usize,
    pub passed: usize,
    pub failed: usize,
    pub errors: usize,
    /// Checkpoints whose verdict differs from the directive's expected verdict.
    pub mismatched: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub program: String,
    pub n_qubits: usize,
    pub config: EvaluationConfig,
    pub checkpoints: Vec<CheckpointReport>,
    pub summary: Summary,
}

impl RunReport {
    /// Process exit status: 0 when every expectation held and nothing errored.
    pub fn exit_code(&self) -> i32 {
        if self.summary.errors == 0 && self.summary.mismatched == 0 {
            0
        } else {
            1
        }
    }
}

/// Evaluates every checkpoint of `circuit`, reporting in circuit order.
///
/// Configuration and circuit-validity problems are fatal; failures inside a
/// single checkpoint are recorded on that checkpoint.
pub fn run_program(name: &str, circuit: &Circuit, config: &ProgramConfig) -> Result<RunReport> {
    config.evaluation.validate()?;
    circuit.validate()?;
    let eval = config.evaluation;
    let checkpoints: Vec<CheckpointReport> = circuit
        .checkpoints()
        .into_par_iter()
        .map(|index| {
            let outcome = match evaluate_checkpoint(circuit, index, &eval) {
                Ok(result) => CheckpointOutcome::Evaluated(result),
                Err(e) => CheckpointOutcome::Error {
                    directive: match &circuit.items[index] {
                        Item::Assert(d) => d.clone(),
                        _ => unreachable!("checkpoints() lists directives only"),
                    },
                    message: e.to_string(),
                },
            };
            CheckpointReport {
                item_index: index,
                seed: checkpoint_seed(eval.seed, index),
                outcome,
            }
        })
        .collect();

    let mut summary = Summary {
        checkpoints: checkpoints.len(),
        ..Summary::default()
    };
    for c in &checkpoints {
        match &c.outcome {
            CheckpointOutcome::Evaluated(r) => {
                if r.passed {
                    summary.passed += 1;
                } else {
                    summary.failed += 1;
                }
                if r.matches_expected == Some(false) {
                    summary.mismatched += 1;
                }
            }
            CheckpointOutcome::Error { .. } => summary.errors += 1,
        }
    }
    Ok(RunReport {
        program: name.to_owned(),
        n_qubits: circuit.n_qubits,
        config: eval,
        checkpoints,
        summary,
    })
}
