//! Dense state-vector simulation.
//!
//! Basis index `b` encodes qubit `i` as bit `n_qubits - 1 - i` of `b`: qubit 0
//! is the most significant bit and the leftmost character of a bitstring.

use std::fmt;

use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::assertions::AssertionDirective;
use crate::error::{Error, Result};

/// Largest register the simulator will allocate (2^20 amplitudes).
pub const MAX_QUBITS: usize = 20;

/// Classical bit indices must stay below this.
pub const MAX_CLASSICAL_BITS: usize = 1 << 16;

/// Tolerance on the squared norm of a state.
pub const NORM_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    n_qubits: usize,
    amplitudes: Vec<Complex64>,
}

impl StateVector {
    /// The all-zeros state `|0…0⟩`.
    pub fn new(n_qubits: usize) -> Result<Self> {
        if n_qubits == 0 || n_qubits > MAX_QUBITS {
            return Err(Error::Capacity(format!(
                "register of {n_qubits} qubits; supported range is 1..={MAX_QUBITS}"
            )));
        }
        let mut amplitudes = vec![Complex64::new(0.0, 0.0); 1 << n_qubits];
        amplitudes[0] = Complex64::new(1.0, 0.0);
        Ok(Self { n_qubits, amplitudes })
    }

    /// Wraps raw amplitudes. The length must be a power of two and the state normalized.
    pub fn from_amplitudes(amplitudes: Vec<Complex64>) -> Result<Self> {
        let len = amplitudes.len();
        if len < 2 || !len.is_power_of_two() {
            return Err(Error::Argument(format!(
                "amplitude vector length {len} is not a power of two >= 2"
            )));
        }
        let n_qubits = len.trailing_zeros() as usize;
        if n_qubits > MAX_QUBITS {
            return Err(Error::Capacity(format!("{n_qubits} qubits exceeds {MAX_QUBITS}")));
        }
        let state = Self { n_qubits, amplitudes };
        let norm = state.norm_sqr();
        if (norm - 1.0).abs() > NORM_TOLERANCE {
            return Err(Error::Numerical(format!("state norm {norm} is not 1")));
        }
        Ok(state)
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum()
    }

    /// Outcome probabilities `|amplitude|²` indexed by basis state.
    pub fn probabilities(&self) -> Vec<f64> {
        self.amplitudes.iter().map(|a| a.norm_sqr()).collect()
    }

    fn mask(&self, qubit: usize) -> Result<usize> {
        if qubit >= self.n_qubits {
            return Err(Error::QubitIndex {
                index: qubit,
                n_qubits: self.n_qubits,
            });
        }
        Ok(1 << (self.n_qubits - 1 - qubit))
    }

    /// Applies the gate's unitary. Any classical condition is ignored here;
    /// [`run_trajectory`] resolves it before calling.
    pub fn apply(&mut self, gate: &GateOp) -> Result<()> {
        gate.check_indices(self.n_qubits)?;
        let mut control_mask = 0usize;
        for &c in &gate.controls {
            control_mask |= self.mask(c)?;
        }
        if gate.kind == GateKind::Swap {
            let a = self.mask(gate.targets[0])?;
            let b = self.mask(gate.targets[1])?;
            for i in 0..self.amplitudes.len() {
                if i & a != 0 && i & b == 0 && i & control_mask == control_mask {
                    self.amplitudes.swap(i, i ^ a ^ b);
                }
            }
            return Ok(());
        }
        let target = self.mask(gate.targets[0])?;
        let m = gate.kind.base_matrix(gate.angle.unwrap_or(0.0));
        for i in 0..self.amplitudes.len() {
            if i & target == 0 && i & control_mask == control_mask {
                let j = i | target;
                let (a, b) = (self.amplitudes[i], self.amplitudes[j]);
                self.amplitudes[i] = m[0][0] * a + m[0][1] * b;
                self.amplitudes[j] = m[1][0] * a + m[1][1] * b;
            }
        }
        Ok(())
    }

    /// Probability that measuring `qubit` yields 1.
    pub fn probability_of_one(&self, qubit: usize) -> Result<f64> {
        let mask = self.mask(qubit)?;
        Ok(self
            .amplitudes
            .iter()
            .enumerate()
            .filter(|(i, _)| i & mask != 0)
            .map(|(_, a)| a.norm_sqr())
            .sum())
    }

    /// Projects onto `qubit == outcome` and renormalizes, returning the
    /// probability of that outcome before projection.
    pub fn collapse(&mut self, qubit: usize, outcome: bool) -> Result<f64> {
        let mask = self.mask(qubit)?;
        let p_one = self.probability_of_one(qubit)?;
        let p = if outcome { p_one } else { 1.0 - p_one };
        if p <= 0.0 {
            return Err(Error::Numerical(format!(
                "outcome {} on qubit {qubit} has zero probability",
                u8::from(outcome)
            )));
        }
        let scale = 1.0 / p.sqrt();
        for (i, a) in self.amplitudes.iter_mut().enumerate() {
            if (i & mask != 0) == outcome {
                *a *= scale;
            } else {
                *a = Complex64::new(0.0, 0.0);
            }
        }
        Ok(p)
    }

    /// Projective measurement of one qubit.
    pub fn measure<R: Rng + ?Sized>(&mut self, qubit: usize, rng: &mut R) -> Result<bool> {
        let p_one = self.probability_of_one(qubit)?;
        let p_zero = self.probabilities_sum() - p_one;
        if p_one <= 0.0 && p_zero <= 0.0 {
            return Err(Error::Numerical(format!(
                "both outcomes on qubit {qubit} have zero probability; state is not normalized"
            )));
        }
        let outcome = rng.gen::<f64>() * (p_zero + p_one) >= p_zero;
        self.collapse(qubit, outcome)?;
        Ok(outcome)
    }

    fn probabilities_sum(&self) -> f64 {
        self.norm_sqr()
    }

    /// Draws a full-register basis index from `|amplitude|²`.
    pub fn sample_index<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        let total = self.norm_sqr();
        let mut u = rng.gen::<f64>() * total;
        let mut last_nonzero = 0;
        for (i, a) in self.amplitudes.iter().enumerate() {
            let p = a.norm_sqr();
            if p > 0.0 {
                last_nonzero = i;
                if u < p {
                    return i;
                }
                u -= p;
            }
        }
        last_nonzero
    }
}

/// Formats basis index `index` of an `n_qubits` register, qubit 0 leftmost.
pub fn format_bitstring(index: usize, n_qubits: usize) -> String {
    (0..n_qubits)
        .map(|q| if index >> (n_qubits - 1 - q) & 1 == 1 { '1' } else { '0' })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GateKind {
    H,
    X,
    Y,
    Z,
    S,
    T,
    Rx,
    Ry,
    Rz,
    R1,
    Cx,
    Cz,
    Cr1,
    Swap,
}

impl GateKind {
    pub const ALL: [GateKind; 14] = [
        GateKind::H,
        GateKind::X,
        GateKind::Y,
        GateKind::Z,
        GateKind::S,
        GateKind::T,
        GateKind::Rx,
        GateKind::Ry,
        GateKind::Rz,
        GateKind::R1,
        GateKind::Cx,
        GateKind::Cz,
        GateKind::Cr1,
        GateKind::Swap,
    ];

    pub fn mnemonic(self) -> &'static str {
        match self {
            GateKind::H => "h",
            GateKind::X => "x",
            GateKind::Y => "y",
            GateKind::Z => "z",
            GateKind::S => "s",
            GateKind::T => "t",
            GateKind::Rx => "rx",
            GateKind::Ry => "ry",
            GateKind::Rz => "rz",
            GateKind::R1 => "r1",
            GateKind::Cx => "cx",
            GateKind::Cz => "cz",
            GateKind::Cr1 => "cr1",
            GateKind::Swap => "swap",
        }
    }

    pub fn from_mnemonic(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|k| k.mnemonic() == s)
    }

    pub fn is_parameterized(self) -> bool {
        matches!(
            self,
            GateKind::Rx | GateKind::Ry | GateKind::Rz | GateKind::R1 | GateKind::Cr1
        )
    }

    /// Number of qubit operands, controls first.
    pub fn arity(self) -> usize {
        match self {
            GateKind::Cx | GateKind::Cz | GateKind::Cr1 | GateKind::Swap => 2,
            _ => 1,
        }
    }

    /// The single-qubit matrix acting on the target. Controlled kinds return
    /// the matrix applied when the control is set.
    fn base_matrix(self, theta: f64) -> [[Complex64; 2]; 2] {
        let c = |re: f64, im: f64| Complex64::new(re, im);
        let zero = c(0.0, 0.0);
        let one = c(1.0, 0.0);
        let (cos, sin) = ((theta / 2.0).cos(), (theta / 2.0).sin());
        match self {
            GateKind::H => {
                let r = std::f64::consts::FRAC_1_SQRT_2;
                [[c(r, 0.0), c(r, 0.0)], [c(r, 0.0), c(-r, 0.0)]]
            }
            GateKind::X | GateKind::Cx => [[zero, one], [one, zero]],
            GateKind::Y => [[zero, c(0.0, -1.0)], [c(0.0, 1.0), zero]],
            GateKind::Z | GateKind::Cz => [[one, zero], [zero, c(-1.0, 0.0)]],
            GateKind::S => [[one, zero], [zero, c(0.0, 1.0)]],
            GateKind::T => [
                [one, zero],
                [zero, Complex64::from_polar(1.0, std::f64::consts::FRAC_PI_4)],
            ],
            GateKind::Rx => [[c(cos, 0.0), c(0.0, -sin)], [c(0.0, -sin), c(cos, 0.0)]],
            GateKind::Ry => [[c(cos, 0.0), c(-sin, 0.0)], [c(sin, 0.0), c(cos, 0.0)]],
            GateKind::Rz => [
                [Complex64::from_polar(1.0, -theta / 2.0), zero],
                [zero, Complex64::from_polar(1.0, theta / 2.0)],
            ],
            GateKind::R1 | GateKind::Cr1 => [[one, zero], [zero, Complex64::from_polar(1.0, theta)]],
            GateKind::Swap => unreachable!("swap has no single-qubit matrix"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GateOp {
    pub kind: GateKind,
    pub angle: Option<f64>,
    pub targets: Vec<usize>,
    pub controls: Vec<usize>,
    /// Classical bit that must read 1 for the gate to fire.
    pub condition: Option<usize>,
}

impl GateOp {
    /// Builds a gate from its operands in file order: controls first, then target.
    pub fn new(kind: GateKind, angle: Option<f64>, qubits: &[usize]) -> Result<Self> {
        if kind.is_parameterized() != angle.is_some() {
            return Err(Error::Argument(format!(
                "gate `{}` {} an angle",
                kind.mnemonic(),
                if kind.is_parameterized() {
                    "requires"
                } else {
                    "takes no"
                }
            )));
        }
        if qubits.len() != kind.arity() {
            return Err(Error::Argument(format!(
                "gate `{}` takes {} qubit operand(s), got {}",
                kind.mnemonic(),
                kind.arity(),
                qubits.len()
            )));
        }
        let (controls, targets) = match kind {
            GateKind::Cx | GateKind::Cz | GateKind::Cr1 => (vec![qubits[0]], vec![qubits[1]]),
            _ => (Vec::new(), qubits.to_vec()),
        };
        let op = Self {
            kind,
            angle,
            targets,
            controls,
            condition: None,
        };
        if op.qubits().len() != 1 {
            let mut seen = op.qubits();
            seen.sort_unstable();
            seen.dedup();
            if seen.len() != op.qubits().len() {
                return Err(Error::Argument(format!(
                    "gate `{}` operands must be distinct",
                    kind.mnemonic()
                )));
            }
        }
        Ok(op)
    }

    fn fixed(kind: GateKind, angle: Option<f64>, qubits: &[usize]) -> Self {
        Self::new(kind, angle, qubits).expect("valid gate construction")
    }

    pub fn h(q: usize) -> Self {
        Self::fixed(GateKind::H, None, &[q])
    }
    pub fn x(q: usize) -> Self {
        Self::fixed(GateKind::X, None, &[q])
    }
    pub fn y(q: usize) -> Self {
        Self::fixed(GateKind::Y, None, &[q])
    }
    pub fn z(q: usize) -> Self {
        Self::fixed(GateKind::Z, None, &[q])
    }
    pub fn rx(theta: f64, q: usize) -> Self {
        Self::fixed(GateKind::Rx, Some(theta), &[q])
    }
    pub fn ry(theta: f64, q: usize) -> Self {
        Self::fixed(GateKind::Ry, Some(theta), &[q])
    }
    pub fn cx(control: usize, target: usize) -> Self {
        Self::fixed(GateKind::Cx, None, &[control, target])
    }
    pub fn cr1(theta: f64, control: usize, target: usize) -> Self {
        Self::fixed(GateKind::Cr1, Some(theta), &[control, target])
    }

    pub fn conditioned_on(mut self, bit: usize) -> Self {
        self.condition = Some(bit);
        self
    }

    /// Operands in file order (controls, then targets).
    pub fn qubits(&self) -> Vec<usize> {
        self.controls.iter().chain(&self.targets).copied().collect()
    }

    fn check_indices(&self, n_qubits: usize) -> Result<()> {
        if let Some(&index) = self.qubits().iter().find(|&&q| q >= n_qubits) {
            return Err(Error::QubitIndex { index, n_qubits });
        }
        Ok(())
    }
}

impl fmt::Display for GateOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(bit) = self.condition {
            write!(f, "cif {bit} ")?;
        }
        write!(f, "{}", self.kind.mnemonic())?;
        if let Some(angle) = self.angle {
            write!(f, " {angle:?}")?;
        }
        for q in self.qubits() {
            write!(f, " {q}")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Item {
    Gate(GateOp),
    Measure { qubit: usize, bit: usize },
    Assert(AssertionDirective),
}

impl fmt::Display for Item {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Item::Gate(g) => write!(f, "{g}"),
            Item::Measure { qubit, bit } => write!(f, "measure {qubit} -> {bit}"),
            Item::Assert(d) => write!(f, "{d}"),
        }
    }
}

/// An ordered program of gates, mid-circuit measurements and assertion checkpoints.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Circuit {
    pub n_qubits: usize,
    pub n_classical_bits: usize,
    pub items: Vec<Item>,
}

impl Circuit {
    pub fn new(n_qubits: usize) -> Self {
        Self {
            n_qubits,
            n_classical_bits: 0,
            items: Vec::new(),
        }
    }

    pub fn gate(&mut self, gate: GateOp) -> &mut Self {
        self.items.push(Item::Gate(gate));
        self
    }

    pub fn measure(&mut self, qubit: usize, bit: usize) -> &mut Self {
        self.n_classical_bits = self.n_classical_bits.max(bit + 1);
        self.items.push(Item::Measure { qubit, bit });
        self
    }

    pub fn assert(&mut self, directive: AssertionDirective) -> &mut Self {
        self.items.push(Item::Assert(directive));
        self
    }

    /// Item indices of every assertion directive, in circuit order.
    pub fn checkpoints(&self) -> Vec<usize> {
        self.items
            .iter()
            .enumerate()
            .filter(|(_, item)| matches!(item, Item::Assert(_)))
            .map(|(i, _)| i)
            .collect()
    }

    /// Number of mid-circuit measurements among the first `upto` items.
    pub fn measurement_count(&self, upto: usize) -> usize {
        self.items[..upto.min(self.items.len())]
            .iter()
            .filter(|item| matches!(item, Item::Measure { .. }))
            .count()
    }

    /// Checks qubit and classical-bit indices and directive well-formedness.
    pub fn validate(&self) -> Result<()> {
        if self.n_qubits == 0 || self.n_qubits > MAX_QUBITS {
            return Err(Error::Capacity(format!(
                "register of {} qubits; supported range is 1..={MAX_QUBITS}",
                self.n_qubits
            )));
        }
        if self.n_classical_bits > MAX_CLASSICAL_BITS {
            return Err(Error::Capacity(format!(
                "{} classical bits exceeds {MAX_CLASSICAL_BITS}",
                self.n_classical_bits
            )));
        }
        let mut written = vec![false; self.n_classical_bits];
        for (i, item) in self.items.iter().enumerate() {
            match item {
                Item::Gate(g) => {
                    g.check_indices(self.n_qubits)?;
                    if let Some(bit) = g.condition {
                        if !written.get(bit).copied().unwrap_or(false) {
                            return Err(Error::Circuit(format!(
                                "item {i}: conditional gate reads classical bit {bit} before any measurement writes it"
                            )));
                        }
                    }
                }
                Item::Measure { qubit, bit } => {
                    if *qubit >= self.n_qubits {
                        return Err(Error::QubitIndex {
                            index: *qubit,
                            n_qubits: self.n_qubits,
                        });
                    }
                    if *bit >= written.len() {
                        return Err(Error::Circuit(format!(
                            "item {i}: classical bit {bit} exceeds register of {} bits",
                            written.len()
                        )));
                    }
                    written[*bit] = true;
                }
                Item::Assert(d) => d
                    .validate(self.n_qubits)
                    .map_err(|e| Error::Circuit(format!("item {i}: {e}")))?,
            }
        }
        Ok(())
    }
}

impl fmt::Display for Circuit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "qubits {}", self.n_qubits)?;
        for item in &self.items {
            writeln!(f, "{item}")?;
        }
        Ok(())
    }
}

/// Executes the first `upto` items (assertion directives are skipped),
/// sampling mid-circuit measurements with `rng`.
pub fn run_trajectory<R: Rng + ?Sized>(
    circuit: &Circuit,
    upto: usize,
    rng: &mut R,
) -> Result<(StateVector, Vec<bool>)> {
    if upto > circuit.items.len() {
        return Err(Error::Argument(format!(
            "prefix length {upto} exceeds circuit length {}",
            circuit.items.len()
        )));
    }
    let mut state = StateVector::new(circuit.n_qubits)?;
    let mut bits = vec![false; circuit.n_classical_bits];
    let mut written = vec![false; circuit.n_classical_bits];
    for item in &circuit.items[..upto] {
        match item {
            Item::Gate(g) => {
                if let Some(bit) = g.condition {
                    if !written.get(bit).copied().unwrap_or(false) {
                        return Err(Error::Circuit(format!(
                            "conditional gate reads unwritten classical bit {bit}"
                        )));
                    }
                    if !bits[bit] {
                        continue;
                    }
                }
                state.apply(g)?;
            }
            Item::Measure { qubit, bit } => {
                if *bit >= bits.len() {
                    return Err(Error::Circuit(format!("classical bit {bit} out of range")));
                }
                bits[*bit] = state.measure(*qubit, rng)?;
                written[*bit] = true;
            }
            Item::Assert(_) => {}
        }
    }
    Ok((state, bits))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn close(a: Complex64, re: f64, im: f64) -> bool {
        (a.re - re).abs() < 1e-12 && (a.im - im).abs() < 1e-12
    }

    #[test]
    fn new_state_is_all_zeros() {
        let s = StateVector::new(1).unwrap();
        assert!(close(s.amplitudes()[0], 1.0, 0.0) && close(s.amplitudes()[1], 0.0, 0.0));
        let s = StateVector::new(2).unwrap();
        assert_eq!(s.amplitudes().len(), 4);
        assert!(close(s.amplitudes()[0], 1.0, 0.0));
        assert!(s.amplitudes()[1..].iter().all(|a| close(*a, 0.0, 0.0)));
    }

    #[test]
    fn new_state_rejects_out_of_range() {
        assert!(matches!(StateVector::new(0), Err(Error::Capacity(_))));
        assert!(matches!(StateVector::new(MAX_QUBITS + 1), Err(Error::Capacity(_))));
        assert!(StateVector::new(MAX_QUBITS).is_ok());
    }

    #[test]
    fn hadamard_on_zero() {
        let mut s = StateVector::new(1).unwrap();
        s.apply(&GateOp::h(0)).unwrap();
        let r = std::f64::consts::FRAC_1_SQRT_2;
        assert!(close(s.amplitudes()[0], r, 0.0) && close(s.amplitudes()[1], r, 0.0));
    }

    #[test]
    fn x_on_both_qubits_gives_11() {
        let mut s = StateVector::new(2).unwrap();
        s.apply(&GateOp::x(0)).unwrap();
        s.apply(&GateOp::x(1)).unwrap();
        assert!(close(s.amplitudes()[3], 1.0, 0.0));
    }

    #[test]
    fn bell_preparation() {
        let mut s = StateVector::new(2).unwrap();
        s.apply(&GateOp::h(0)).unwrap();
        s.apply(&GateOp::cx(0, 1)).unwrap();
        let r = std::f64::consts::FRAC_1_SQRT_2;
        let a = s.amplitudes();
        assert!(close(a[0], r, 0.0) && close(a[1], 0.0, 0.0));
        assert!(close(a[2], 0.0, 0.0) && close(a[3], r, 0.0));
    }

    #[test]
    fn qubit_zero_is_leftmost() {
        let mut s = StateVector::new(2).unwrap();
        s.apply(&GateOp::x(0)).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        assert_eq!(format_bitstring(s.sample_index(&mut rng), 2), "10");
    }

    #[test]
    fn invalid_index_is_rejected() {
        let mut s = StateVector::new(2).unwrap();
        assert_eq!(s.apply(&GateOp::h(2)), Err(Error::QubitIndex { index: 2, n_qubits: 2 }));
    }

    #[test]
    fn gate_construction_checks_operands() {
        assert!(GateOp::new(GateKind::Rx, None, &[0]).is_err());
        assert!(GateOp::new(GateKind::H, Some(1.0), &[0]).is_err());
        assert!(GateOp::new(GateKind::Cx, None, &[1, 1]).is_err());
        assert!(GateOp::new(GateKind::Swap, None, &[0]).is_err());
        let g = GateOp::new(GateKind::Cr1, Some(0.5), &[3, 1]).unwrap();
        assert_eq!((g.controls.as_slice(), g.targets.as_slice()), (&[3][..], &[1][..]));
    }

    #[test]
    fn swap_exchanges_qubits() {
        let mut s = StateVector::new(3).unwrap();
        s.apply(&GateOp::x(0)).unwrap();
        s.apply(&GateOp::new(GateKind::Swap, None, &[0, 2]).unwrap()).unwrap();
        // |001⟩
        assert!(close(s.amplitudes()[1], 1.0, 0.0));
    }

    #[test]
    fn measure_deterministic_one() {
        let mut s = StateVector::new(1).unwrap();
        s.apply(&GateOp::x(0)).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        assert!(s.measure(0, &mut rng).unwrap());
        assert!(close(s.amplitudes()[1], 1.0, 0.0));
    }

    #[test]
    fn measure_superposition_frequency() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let mut ones = 0;
        for _ in 0..10_000 {
            let mut s = StateVector::new(1).unwrap();
            s.apply(&GateOp::h(0)).unwrap();
            ones += usize::from(s.measure(0, &mut rng).unwrap());
        }
        let freq = ones as f64 / 10_000.0;
        assert!((freq - 0.5).abs() <= 0.02, "frequency {freq}");
    }

    #[test]
    fn bell_collapse_on_zero() {
        let mut s = StateVector::new(2).unwrap();
        s.apply(&GateOp::h(0)).unwrap();
        s.apply(&GateOp::cx(0, 1)).unwrap();
        let p = s.collapse(0, false).unwrap();
        assert!((p - 0.5).abs() < 1e-12);
        assert!(close(s.amplitudes()[0], 1.0, 0.0));
        assert!(s.amplitudes()[1..].iter().all(|a| close(*a, 0.0, 0.0)));
    }

    #[test]
    fn measuring_unnormalized_state_fails() {
        let mut s = StateVector::new(1).unwrap();
        s.amplitudes[0] = Complex64::new(0.0, 0.0);
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        assert!(matches!(s.measure(0, &mut rng), Err(Error::Numerical(_))));
    }

    #[test]
    fn trajectory_without_measurement_is_unitary() {
        let mut c = Circuit::new(2);
        c.gate(GateOp::h(0)).gate(GateOp::cx(0, 1));
        c.n_classical_bits = 2;
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let (state, bits) = run_trajectory(&c, c.items.len(), &mut rng).unwrap();
        assert_eq!(bits, vec![false, false]);
        let mut direct = StateVector::new(2).unwrap();
        direct.apply(&GateOp::h(0)).unwrap();
        direct.apply(&GateOp::cx(0, 1)).unwrap();
        assert_eq!(state, direct);
    }

    #[test]
    fn trajectory_measures_x() {
        let mut c = Circuit::new(1);
        c.gate(GateOp::x(0)).measure(0, 0);
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let (_, bits) = run_trajectory(&c, 2, &mut rng).unwrap();
        assert_eq!(bits, vec![true]);
    }

    #[test]
    fn conditional_on_unwritten_bit_is_invalid() {
        let mut c = Circuit::new(2);
        c.n_classical_bits = 1;
        c.gate(GateOp::x(1).conditioned_on(0));
        assert!(matches!(c.validate(), Err(Error::Circuit(_))));
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        assert!(matches!(run_trajectory(&c, 1, &mut rng), Err(Error::Circuit(_))));
    }

    #[test]
    fn conditional_gate_follows_bit() {
        let mut c = Circuit::new(2);
        c.gate(GateOp::x(0)).measure(0, 0).gate(GateOp::x(1).conditioned_on(0));
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let (state, _) = run_trajectory(&c, 3, &mut rng).unwrap();
        assert!(close(state.amplitudes()[3], 1.0, 0.0));
    }
}
