//! Classical, uniform and product-state assertions over sampled circuit prefixes.
//!
//! Every assertion samples the circuit up to its checkpoint, runs one
//! statistical test and reports `passed = p > alpha`. For the product
//! assertion a pass means "consistent with a product state"; a failure
//! means the two groups are likely entangled.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::derive_seed;
use crate::sampling::{check_subset, marginalize, sample, MeasurementDistribution, DEFAULT_SHOTS};
use crate::sim::{Circuit, Item};
use crate::stats::{
    chi_square_gof_pvalue, chi_square_sf, chi_square_statistic, fisher_exact_2x2, legacy_chisq_add1,
    monte_carlo_independence, ContingencyTable, PValue, TestMethod, DEFAULT_RESAMPLES,
};

pub const DEFAULT_ALPHA: f64 = 0.05;

/// Expected count given to each non-target cell under the classical null.
pub const CLASSICAL_OFF_PEAK_EXPECTED: f64 = 0.5;

/// Below this expected count per category the uniform test warns.
pub const UNIFORM_MIN_EXPECTED: f64 = 5.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum AssertionKind {
    Classical,
    Uniform,
    Product,
}

impl AssertionKind {
    pub fn name(self) -> &'static str {
        match self {
            AssertionKind::Classical => "CLASSICAL",
            AssertionKind::Uniform => "UNIFORM",
            AssertionKind::Product => "PRODUCT",
        }
    }
}

/// Shots used when neither the directive nor the run configuration sets them.
pub fn default_shots(kind: AssertionKind) -> u64 {
    match kind {
        AssertionKind::Classical => DEFAULT_SHOTS,
        AssertionKind::Uniform | AssertionKind::Product => 10_000,
    }
}

/// What a checkpoint tests, with its qubit operands.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Check {
    Classical {
        qubits: Vec<usize>,
        expected_bitstring: Option<String>,
    },
    Uniform {
        qubits: Vec<usize>,
    },
    Product {
        group0: Vec<usize>,
        group1: Vec<usize>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AssertionDirective {
    pub check: Check,
    pub alpha: Option<f64>,
    pub shots: Option<u64>,
    pub resamples: Option<usize>,
    /// Verdict the author expects, for regression checking.
    pub expected_verdict: Option<bool>,
}

impl AssertionDirective {
    fn with_check(check: Check) -> Self {
        Self {
            check,
            alpha: None,
            shots: None,
            resamples: None,
            expected_verdict: None,
        }
    }

    pub fn classical(qubits: impl Into<Vec<usize>>) -> Self {
        Self::with_check(Check::Classical {
            qubits: qubits.into(),
            expected_bitstring: None,
        })
    }

    pub fn uniform(qubits: impl Into<Vec<usize>>) -> Self {
        Self::with_check(Check::Uniform { qubits: qubits.into() })
    }

    pub fn product(group0: impl Into<Vec<usize>>, group1: impl Into<Vec<usize>>) -> Self {
        Self::with_check(Check::Product {
            group0: group0.into(),
            group1: group1.into(),
        })
    }

    /// Sets the target bitstring of a classical assertion; ignored otherwise.
    pub fn expecting(mut self, bits: impl Into<String>) -> Self {
        if let Check::Classical { expected_bitstring, .. } = &mut self.check {
            *expected_bitstring = Some(bits.into());
        }
        self
    }

    pub fn alpha(mut self, alpha: f64) -> Self {
        self.alpha = Some(alpha);
        self
    }

    pub fn shots(mut self, shots: u64) -> Self {
        self.shots = Some(shots);
        self
    }

    pub fn resamples(mut self, resamples: usize) -> Self {
        self.resamples = Some(resamples);
        self
    }

    pub fn verdict(mut self, pass: bool) -> Self {
        self.expected_verdict = Some(pass);
        self
    }

    pub fn kind(&self) -> AssertionKind {
        match self.check {
            Check::Classical { .. } => AssertionKind::Classical,
            Check::Uniform { .. } => AssertionKind::Uniform,
            Check::Product { .. } => AssertionKind::Product,
        }
    }

    /// Every qubit the directive touches.
    pub fn qubits(&self) -> Vec<usize> {
        match &self.check {
            Check::Classical { qubits, .. } | Check::Uniform { qubits } => qubits.clone(),
            Check::Product { group0, group1 } => group0.iter().chain(group1).copied().collect(),
        }
    }

    pub fn validate(&self, n_qubits: usize) -> Result<()> {
        match &self.check {
            Check::Classical {
                qubits,
                expected_bitstring,
            } => {
                check_subset(qubits, n_qubits)?;
                if let Some(bits) = expected_bitstring {
                    check_bitstring(bits, qubits.len())?;
                }
            }
            Check::Uniform { qubits } => check_subset(qubits, n_qubits)?,
            Check::Product { group0, group1 } => check_groups(group0, group1, n_qubits)?,
        }
        if let Some(alpha) = self.alpha {
            check_alpha(alpha)?;
        }
        if self.shots == Some(0) {
            return Err(Error::Argument("shots must be at least 1".into()));
        }
        if self.resamples == Some(0) {
            return Err(Error::Argument("resamples must be at least 1".into()));
        }
        Ok(())
    }
}

pub(crate) fn check_alpha(alpha: f64) -> Result<()> {
    if alpha > 0.0 && alpha < 1.0 {
        Ok(())
    } else {
        Err(Error::Argument(format!(
            "alpha {alpha} must lie strictly between 0 and 1"
        )))
    }
}

fn check_bitstring(bits: &str, len: usize) -> Result<()> {
    if bits.len() != len || !bits.bytes().all(|b| b == b'0' || b == b'1') {
        return Err(Error::Argument(format!(
            "expected bitstring `{bits}` must be {len} characters of 0/1"
        )));
    }
    Ok(())
}

fn check_groups(group0: &[usize], group1: &[usize], n_qubits: usize) -> Result<()> {
    check_subset(group0, n_qubits)?;
    check_subset(group1, n_qubits)?;
    if let Some(q) = group0.iter().find(|q| group1.contains(q)) {
        return Err(Error::Argument(format!("qubit {q} appears in both groups")));
    }
    Ok(())
}

fn write_list(f: &mut fmt::Formatter<'_>, qubits: &[usize]) -> fmt::Result {
    let parts: Vec<String> = qubits.iter().map(usize::to_string).collect();
    write!(f, "[{}]", parts.join(" "))
}

/// Renders the directive as a circuit-file statement.
impl fmt::Display for AssertionDirective {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.check {
            Check::Classical {
                qubits,
                expected_bitstring,
            } => {
                write!(f, "assert_classical")?;
                for q in qubits {
                    write!(f, " {q}")?;
                }
                if let Some(bits) = expected_bitstring {
                    write!(f, " expect={bits}")?;
                }
            }
            Check::Uniform { qubits } => {
                write!(f, "assert_uniform")?;
                for q in qubits {
                    write!(f, " {q}")?;
                }
            }
            Check::Product { group0, group1 } => {
                write!(f, "assert_product ")?;
                write_list(f, group0)?;
                write!(f, " ")?;
                write_list(f, group1)?;
            }
        }
        if let Some(alpha) = self.alpha {
            write!(f, " alpha={alpha:?}")?;
        }
        if let Some(shots) = self.shots {
            write!(f, " shots={shots}")?;
        }
        if let Some(resamples) = self.resamples {
            write!(f, " resamples={resamples}")?;
        }
        if let Some(pass) = self.expected_verdict {
            write!(f, " verdict={}", if pass { "pass" } else { "fail" })?;
        }
        Ok(())
    }
}

/// Outcome of one assertion.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AssertionResult {
    pub directive: AssertionDirective,
    pub p_value: PValue,
    pub alpha: f64,
    /// `p_value.value > alpha`.
    pub passed: bool,
    pub shots_used: u64,
    /// Contingency table shape, product assertions only.
    pub table_shape: Option<[usize; 2]>,
    pub matches_expected: Option<bool>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub warnings: Vec<String>,
}

impl AssertionResult {
    fn new(directive: AssertionDirective, p_value: PValue, alpha: f64, shots_used: u64) -> Self {
        let passed = p_value.value > alpha;
        let matches_expected = directive.expected_verdict.map(|e| e == passed);
        Self {
            directive,
            p_value,
            alpha,
            passed,
            shots_used,
            table_shape: None,
            matches_expected,
            warnings: Vec::new(),
        }
    }
}

/// Run-wide defaults applied to directives that leave a parameter unset.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EvaluationConfig {
    /// Overrides the per-kind default shot count.
    pub shots: Option<u64>,
    pub seed: u64,
    pub alpha: f64,
    pub resamples: usize,
    /// Route product assertions through the add-one chi-square test.
    pub legacy_chisq: bool,
}

impl Default for EvaluationConfig {
    fn default() -> Self {
        Self {
            shots: None,
            seed: 0,
            alpha: DEFAULT_ALPHA,
            resamples: DEFAULT_RESAMPLES,
            legacy_chisq: false,
        }
    }
}

impl EvaluationConfig {
    pub fn validate(&self) -> Result<()> {
        check_alpha(self.alpha)?;
        if self.resamples == 0 {
            return Err(Error::Argument("resamples must be at least 1".into()));
        }
        if self.shots == Some(0) {
            return Err(Error::Argument("shots must be at least 1".into()));
        }
        Ok(())
    }
}

/// Classical-state test on an already-marginalized distribution.
///
/// The null puts all mass on `target` (or the empirical mode). Cells are the
/// target plus every observed outcome; non-target cells expect
/// [`CLASSICAL_OFF_PEAK_EXPECTED`] counts and the target the remainder.
pub fn classical_pvalue(dist: &MeasurementDistribution, target: Option<&str>) -> Result<PValue> {
    let target = match target {
        Some(bits) => {
            check_bitstring(bits, dist.n_qubits())?;
            bits
        }
        None => dist.mode(),
    };
    let shots = dist.shots();
    if dist.count(target) == shots {
        return Ok(PValue {
            value: 1.0,
            method: TestMethod::ChiSquare,
            resamples: None,
            degrees_of_freedom: Some(0),
        });
    }
    let mut observed = vec![dist.count(target)];
    observed.extend(
        dist.counts()
            .iter()
            .filter(|(k, _)| k.as_str() != target)
            .map(|(_, &c)| c),
    );
    let k = observed.len();
    let mut expected = vec![CLASSICAL_OFF_PEAK_EXPECTED; k];
    expected[0] = shots as f64 - CLASSICAL_OFF_PEAK_EXPECTED * (k - 1) as f64;
    let statistic = chi_square_statistic(&observed, &expected)?;
    let df = k - 1;
    Ok(PValue {
        value: chi_square_sf(statistic, df)?,
        method: TestMethod::ChiSquare,
        resamples: None,
        degrees_of_freedom: Some(df),
    })
}

/// Uniform-state test over all `2^n` outcomes of an already-marginalized
/// distribution. Returns any small-sample warnings alongside the p-value.
pub fn uniform_pvalue(dist: &MeasurementDistribution) -> Result<(PValue, Vec<String>)> {
    let n = dist.n_qubits();
    let categories = 1u64 << n;
    let shots = dist.shots();
    let expected = shots as f64 / categories as f64;
    if expected < 1.0 {
        return Err(Error::InfeasibleShots {
            expected,
            required: categories,
        });
    }
    let mut warnings = Vec::new();
    if expected < UNIFORM_MIN_EXPECTED {
        warnings.push(format!(
            "expected count per category is {expected:.3}; the chi-square approximation wants at least {} shots",
            (UNIFORM_MIN_EXPECTED as u64) * categories
        ));
    }
    let mut observed = vec![0u64; categories as usize];
    for (bits, &count) in dist.counts() {
        observed[bitstring_index(bits)] = count;
    }
    let probs = vec![1.0 / categories as f64; categories as usize];
    Ok((chi_square_gof_pvalue(&observed, &probs, shots)?, warnings))
}

fn bitstring_index(bits: &str) -> usize {
    bits.bytes().fold(0, |acc, b| (acc << 1) | usize::from(b == b'1'))
}

/// Full `2^|group0| × 2^|group1|` table of joint outcome counts.
pub fn build_contingency_table(
    dist: &MeasurementDistribution,
    group0: &[usize],
    group1: &[usize],
) -> Result<ContingencyTable> {
    check_groups(group0, group1, dist.n_qubits())?;
    let mut table = ContingencyTable::zeros(1 << group0.len(), 1 << group1.len())?;
    for (bits, &count) in dist.counts() {
        let b = bits.as_bytes();
        let index = |group: &[usize]| group.iter().fold(0, |acc, &q| (acc << 1) | usize::from(b[q] == b'1'));
        table.add(index(group0), index(group1), count);
    }
    Ok(table)
}

/// Independence test used by the product assertion: Fisher exact for 2×2,
/// Monte Carlo otherwise, or the add-one chi-square when `legacy` is set.
pub fn product_pvalue(table: &ContingencyTable, resamples: usize, seed: u64, legacy: bool) -> Result<PValue> {
    if legacy {
        legacy_chisq_add1(table)
    } else if table.shape() == (2, 2) {
        fisher_exact_2x2(table)
    } else {
        monte_carlo_independence(table, resamples, seed)
    }
}

fn sample_checkpoint(circuit: &Circuit, at: usize, shots: u64, seed: u64) -> Result<MeasurementDistribution> {
    if at > circuit.items.len() {
        return Err(Error::Argument(format!(
            "checkpoint {at} is beyond the circuit's {} items",
            circuit.items.len()
        )));
    }
    sample(circuit, at, shots, seed)
}

/// Monte Carlo resampling seed for a checkpoint, kept apart from the shot substreams.
fn resampling_seed(seed: u64) -> u64 {
    derive_seed(seed, 0x4D43)
}

pub fn assert_classical(
    circuit: &Circuit,
    at: usize,
    qubits: &[usize],
    expected_bitstring: Option<&str>,
    alpha: f64,
    shots: u64,
    seed: u64,
) -> Result<AssertionResult> {
    let mut directive = AssertionDirective::classical(qubits).alpha(alpha).shots(shots);
    if let Some(bits) = expected_bitstring {
        directive = directive.expecting(bits);
    }
    evaluate(
        circuit,
        at,
        &directive,
        &EvaluationConfig {
            seed,
            ..Default::default()
        },
    )
}

pub fn assert_uniform(
    circuit: &Circuit,
    at: usize,
    qubits: &[usize],
    alpha: f64,
    shots: u64,
    seed: u64,
) -> Result<AssertionResult> {
    let directive = AssertionDirective::uniform(qubits).alpha(alpha).shots(shots);
    evaluate(
        circuit,
        at,
        &directive,
        &EvaluationConfig {
            seed,
            ..Default::default()
        },
    )
}

#[allow(clippy::too_many_arguments)]
pub fn assert_product(
    circuit: &Circuit,
    at: usize,
    group0: &[usize],
    group1: &[usize],
    alpha: f64,
    shots: u64,
    resamples: usize,
    seed: u64,
) -> Result<AssertionResult> {
    let directive = AssertionDirective::product(group0, group1)
        .alpha(alpha)
        .shots(shots)
        .resamples(resamples);
    evaluate(
        circuit,
        at,
        &directive,
        &EvaluationConfig {
            seed,
            ..Default::default()
        },
    )
}

/// Evaluates `directive` against the circuit prefix `items[..at]`, sampling
/// with `config.seed` directly.
pub fn evaluate(
    circuit: &Circuit,
    at: usize,
    directive: &AssertionDirective,
    config: &EvaluationConfig,
) -> Result<AssertionResult> {
    directive.validate(circuit.n_qubits)?;
    config.validate()?;
    let alpha = directive.alpha.unwrap_or(config.alpha);
    let shots = directive
        .shots
        .or(config.shots)
        .unwrap_or_else(|| default_shots(directive.kind()));
    let dist = sample_checkpoint(circuit, at, shots, config.seed)?;
    match &directive.check {
        Check::Classical {
            qubits,
            expected_bitstring,
        } => {
            let marginal = marginalize(&dist, qubits)?;
            let p = classical_pvalue(&marginal, expected_bitstring.as_deref())?;
            Ok(AssertionResult::new(directive.clone(), p, alpha, shots))
        }
        Check::Uniform { qubits } => {
            let marginal = marginalize(&dist, qubits)?;
            let (p, warnings) = uniform_pvalue(&marginal)?;
            let mut result = AssertionResult::new(directive.clone(), p, alpha, shots);
            result.warnings = warnings;
            Ok(result)
        }
        Check::Product { group0, group1 } => {
            let table = build_contingency_table(&dist, group0, group1)?;
            let resamples = directive.resamples.unwrap_or(config.resamples);
            let p = product_pvalue(&table, resamples, resampling_seed(config.seed), config.legacy_chisq)?;
            let mut result = AssertionResult::new(directive.clone(), p, alpha, shots);
            result.table_shape = Some([table.rows(), table.cols()]);
            Ok(result)
        }
    }
}

/// Seed used for the checkpoint at item `index` of a run seeded with `run_seed`.
pub fn checkpoint_seed(run_seed: u64, index: usize) -> u64 {
    derive_seed(run_seed, index as u64)
}

/// Evaluates the assertion directive stored at item `index`.
pub fn evaluate_checkpoint(circuit: &Circuit, index: usize, config: &EvaluationConfig) -> Result<AssertionResult> {
    let directive = match circuit.items.get(index) {
        Some(Item::Assert(d)) => d,
        Some(_) => return Err(Error::Argument(format!("item {index} is not an assertion directive"))),
        None => return Err(Error::Argument(format!("item {index} does not exist"))),
    };
    let config = EvaluationConfig {
        seed: checkpoint_seed(config.seed, index),
        ..*config
    };
    evaluate(circuit, index, directive, &config)
}
