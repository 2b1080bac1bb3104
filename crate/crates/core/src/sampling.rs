//! Shot sampling of circuit prefixes and the exact-distribution oracle.

use std::collections::{BTreeMap, HashMap};

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::substream;
use crate::sim::{format_bitstring, run_trajectory, Circuit, Item, StateVector};

/// Shot count used when nothing else specifies one.
pub const DEFAULT_SHOTS: u64 = 1000;

/// Maximum number of mid-circuit measurements the exact oracle will branch on.
pub const MAX_EXACT_MEASUREMENTS: usize = 16;

/// Bitstring counts from repeated full-register measurement.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MeasurementDistribution {
    n_qubits: usize,
    shots: u64,
    counts: BTreeMap<String, u64>,
}

impl MeasurementDistribution {
    /// Builds a distribution from `(bitstring, count)` pairs. Zero counts are
    /// dropped and repeated keys accumulate.
    pub fn from_counts<S: AsRef<str>>(n_qubits: usize, counts: impl IntoIterator<Item = (S, u64)>) -> Result<Self> {
        let mut map = BTreeMap::new();
        for (key, count) in counts {
            let key = key.as_ref();
            if key.len() != n_qubits || !key.bytes().all(|b| b == b'0' || b == b'1') {
                return Err(Error::Argument(format!(
                    "`{key}` is not a {n_qubits}-character bitstring"
                )));
            }
            if count > 0 {
                *map.entry(key.to_owned()).or_insert(0) += count;
            }
        }
        let shots = map.values().sum();
        if shots == 0 {
            return Err(Error::Argument("distribution has no shots".into()));
        }
        Ok(Self {
            n_qubits,
            shots,
            counts: map,
        })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn shots(&self) -> u64 {
        self.shots
    }

    pub fn counts(&self) -> &BTreeMap<String, u64> {
        &self.counts
    }

    pub fn count(&self, bitstring: &str) -> u64 {
        self.counts.get(bitstring).copied().unwrap_or(0)
    }

    /// Empirical outcome frequencies.
    pub fn frequencies(&self) -> BTreeMap<String, f64> {
        self.counts
            .iter()
            .map(|(k, &c)| (k.clone(), c as f64 / self.shots as f64))
            .collect()
    }

    /// Outcome with the highest count; ties go to the smallest bitstring.
    pub fn mode(&self) -> &str {
        let mut best: Option<(&String, u64)> = None;
        for (k, &c) in &self.counts {
            if best.is_none_or(|(_, b)| c > b) {
                best = Some((k, c));
            }
        }
        best.map(|(k, _)| k.as_str()).unwrap_or_default()
    }
}

/// Re-keys counts to the substring formed by `qubits`, in the given order.
pub fn marginalize(dist: &MeasurementDistribution, qubits: &[usize]) -> Result<MeasurementDistribution> {
    check_subset(qubits, dist.n_qubits)?;
    let mut counts: BTreeMap<String, u64> = BTreeMap::new();
    for (key, &count) in &dist.counts {
        let bytes = key.as_bytes();
        let sub: String = qubits.iter().map(|&q| bytes[q] as char).collect();
        *counts.entry(sub).or_insert(0) += count;
    }
    MeasurementDistribution::from_counts(qubits.len(), counts)
}

pub(crate) fn check_subset(qubits: &[usize], n_qubits: usize) -> Result<()> {
    if qubits.is_empty() {
        return Err(Error::Argument("qubit list is empty".into()));
    }
    let mut seen = vec![false; n_qubits];
    for &q in qubits {
        if q >= n_qubits {
            return Err(Error::Argument(format!(
                "qubit {q} out of range for a {n_qubits}-qubit register"
            )));
        }
        if std::mem::replace(&mut seen[q], true) {
            return Err(Error::Argument(format!("qubit {q} listed twice")));
        }
    }
    Ok(())
}

/// How shots are produced.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SamplingMode {
    /// Final-state sampling when the prefix has no mid-circuit measurement,
    /// per-shot trajectories otherwise.
    #[default]
    Auto,
    FinalState,
    Trajectories,
}

/// Samples the circuit prefix `items[..upto]` for `shots` shots.
pub fn sample(circuit: &Circuit, upto: usize, shots: u64, seed: u64) -> Result<MeasurementDistribution> {
    sample_with(circuit, upto, shots, seed, SamplingMode::Auto)
}

pub fn sample_with(
    circuit: &Circuit,
    upto: usize,
    shots: u64,
    seed: u64,
    mode: SamplingMode,
) -> Result<MeasurementDistribution> {
    if shots == 0 {
        return Err(Error::Argument("shots must be at least 1".into()));
    }
    let has_measurements = circuit.measurement_count(upto) > 0;
    let trajectories = match mode {
        SamplingMode::Auto => has_measurements,
        SamplingMode::FinalState if has_measurements => {
            return Err(Error::Argument(
                "final-state sampling requires a prefix without mid-circuit measurements".into(),
            ))
        }
        SamplingMode::FinalState => false,
        SamplingMode::Trajectories => true,
    };

    let indices: Vec<usize> = if trajectories {
        (0..shots)
            .into_par_iter()
            .map(|shot| {
                let mut rng = substream(seed, shot);
                let (state, _) = run_trajectory(circuit, upto, &mut rng)?;
                Ok(state.sample_index(&mut rng))
            })
            .collect::<Result<_>>()?
    } else {
        // No measurements, so the trajectory never touches its generator.
        let (state, _) = run_trajectory(circuit, upto, &mut substream(seed, u64::MAX))?;
        let cumulative = cumulative_probabilities(&state);
        (0..shots)
            .into_par_iter()
            .map(|shot| draw_cumulative(&cumulative, &mut substream(seed, shot)))
            .collect()
    };

    let mut tally: HashMap<usize, u64> = HashMap::new();
    for index in indices {
        *tally.entry(index).or_insert(0) += 1;
    }
    let n = circuit.n_qubits;
    MeasurementDistribution::from_counts(n, tally.into_iter().map(|(i, c)| (format_bitstring(i, n), c)))
}

fn cumulative_probabilities(state: &StateVector) -> Vec<f64> {
    let mut acc = 0.0;
    state
        .amplitudes()
        .iter()
        .map(|a| {
            acc += a.norm_sqr();
            acc
        })
        .collect()
}

fn draw_cumulative<R: Rng + ?Sized>(cumulative: &[f64], rng: &mut R) -> usize {
    let total = *cumulative.last().expect("non-empty state");
    let u = rng.gen::<f64>() * total;
    // First index whose cumulative mass exceeds u; its own mass is positive.
    let i = cumulative.partition_point(|&c| c <= u);
    if i < cumulative.len() {
        return i;
    }
    // u rounded up to the total: fall back to the last outcome with mass.
    let mut k = cumulative.len() - 1;
    while k > 0 && cumulative[k] == cumulative[k - 1] {
        k -= 1;
    }
    k
}

/// Exact outcome probabilities of the prefix, branching on each mid-circuit
/// measurement with its outcome probability.
pub fn exact_distribution(circuit: &Circuit, upto: usize) -> Result<BTreeMap<String, f64>> {
    if upto > circuit.items.len() {
        return Err(Error::Argument(format!(
            "prefix length {upto} exceeds circuit length {}",
            circuit.items.len()
        )));
    }
    let m = circuit.measurement_count(upto);
    if m > MAX_EXACT_MEASUREMENTS {
        return Err(Error::Capacity(format!(
            "{m} mid-circuit measurements; the exact oracle supports at most {MAX_EXACT_MEASUREMENTS}"
        )));
    }
    let mut out = BTreeMap::new();
    let state = StateVector::new(circuit.n_qubits)?;
    let bits = vec![None; circuit.n_classical_bits];
    branch(&circuit.items[..upto], state, bits, 1.0, &mut out)?;
    Ok(out)
}

fn branch(
    items: &[Item],
    mut state: StateVector,
    bits: Vec<Option<bool>>,
    weight: f64,
    out: &mut BTreeMap<String, f64>,
) -> Result<()> {
    for (i, item) in items.iter().enumerate() {
        match item {
            Item::Gate(g) => {
                if let Some(bit) = g.condition {
                    match bits.get(bit).copied().flatten() {
                        None => {
                            return Err(Error::Circuit(format!(
                                "conditional gate reads unwritten classical bit {bit}"
                            )))
                        }
                        Some(false) => continue,
                        Some(true) => {}
                    }
                }
                state.apply(g)?;
            }
            Item::Measure { qubit, bit } => {
                let p_one = state.probability_of_one(*qubit)?;
                for (outcome, p) in [(false, 1.0 - p_one), (true, p_one)] {
                    if p <= 0.0 {
                        continue;
                    }
                    let mut next = state.clone();
                    next.collapse(*qubit, outcome)?;
                    let mut next_bits = bits.clone();
                    next_bits[*bit] = Some(outcome);
                    branch(&items[i + 1..], next, next_bits, weight * p, out)?;
                }
                return Ok(());
            }
            Item::Assert(_) => {}
        }
    }
    let n = state.n_qubits();
    for (index, p) in state.probabilities().into_iter().enumerate() {
        if p > 0.0 {
            *out.entry(format_bitstring(index, n)).or_insert(0.0) += weight * p;
        }
    }
    Ok(())
}

/// Total-variation distance between two outcome distributions.
pub fn total_variation(a: &BTreeMap<String, f64>, b: &BTreeMap<String, f64>) -> f64 {
    let mut sum = 0.0;
    for (k, pa) in a {
        sum += (pa - b.get(k).copied().unwrap_or(0.0)).abs();
    }
    for (k, pb) in b {
        if !a.contains_key(k) {
            sum += pb;
        }
    }
    sum / 2.0
}
