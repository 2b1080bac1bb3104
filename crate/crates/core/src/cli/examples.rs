//! Built-in example circuits with their checkpoints and expected verdicts.
//!
//! Checkpoints sit at semantic positions (after setup, after the oracle or
//! transform, at the end) rather than at literal source-line numbers.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use crate::assertions::AssertionDirective;
use crate::error::{Error, Result};
use crate::sim::{Circuit, GateOp};

/// Description of one built-in example.
#[derive(Debug, Clone, PartialEq)]
pub struct ExampleInfo {
    pub name: &'static str,
    pub summary: &'static str,
    /// `(parameter, default value)`.
    pub params: &'static [(&'static str, &'static str)],
    pub bugs: &'static [&'static str],
}

pub const EXAMPLES: &[ExampleInfo] = &[
    ExampleInfo {
        name: "bell",
        summary: "Bell pair; the product assertion should report entanglement",
        params: &[],
        bugs: &[],
    },
    ExampleInfo {
        name: "xgate",
        summary: "X on both qubits of |00>; a classical product state",
        params: &[],
        bugs: &[],
    },
    ExampleInfo {
        name: "teleport",
        summary: "Quantum teleportation with mid-circuit measurement and classical feed-forward",
        params: &[("theta", "3.14")],
        bugs: &[],
    },
    ExampleInfo {
        name: "bv",
        summary: "Bernstein-Vazirani with uniform/product checkpoints around the oracle",
        params: &[("secret", "01011")],
        bugs: &["drop-setup-hadamard"],
    },
    ExampleInfo {
        name: "qft",
        summary: "Quantum Fourier transform of a basis-state input",
        params: &[("input", "10000")],
        bugs: &["drop-qft-hadamard"],
    },
];

/// Every built-in example at its default parameters.
pub fn builtin_examples() -> Vec<(&'static str, Circuit)> {
    EXAMPLES
        .iter()
        .map(|info| {
            (
                info.name,
                example(info.name, &BTreeMap::new(), None).expect("defaults are valid"),
            )
        })
        .collect()
}

/// Builds the named example. `params` override the defaults listed in
/// [`EXAMPLES`]; `bug` selects one of the example's injectable bugs.
pub fn example(name: &str, params: &BTreeMap<String, String>, bug: Option<&str>) -> Result<Circuit> {
    let info = EXAMPLES
        .iter()
        .find(|info| info.name == name)
        .ok_or_else(|| Error::UnknownExample(name.to_owned()))?;
    if let Some(key) = params.keys().find(|k| !info.params.iter().any(|(p, _)| p == k)) {
        return Err(Error::Argument(format!("example `{name}` has no parameter `{key}`")));
    }
    if let Some(bug) = bug {
        if !info.bugs.contains(&bug) {
            return Err(Error::Argument(format!(
                "example `{name}` has no injectable bug `{bug}` (available: {})",
                if info.bugs.is_empty() {
                    "none".to_owned()
                } else {
                    info.bugs.join(", ")
                }
            )));
        }
    }
    let param = |key: &str| -> &str {
        params.get(key).map(String::as_str).unwrap_or_else(|| {
            info.params
                .iter()
                .find(|(p, _)| *p == key)
                .map(|(_, v)| *v)
                .expect("declared parameter")
        })
    };
    let circuit = match name {
        "bell" => bell(),
        "xgate" => xgate(),
        "teleport" => {
            let theta = param("theta");
            let theta: f64 = theta
                .parse()
                .ok()
                .filter(|t: &f64| t.is_finite())
                .ok_or_else(|| Error::Argument(format!("theta `{theta}` is not a number")))?;
            teleport(theta)
        }
        "bv" => bernstein_vazirani(&parse_bits("secret", param("secret"))?, bug.is_some()),
        "qft" => qft(&parse_bits("input", param("input"))?, bug.is_some()),
        _ => unreachable!("listed in EXAMPLES"),
    };
    circuit.validate()?;
    Ok(circuit)
}

fn parse_bits(what: &str, text: &str) -> Result<Vec<bool>> {
    if text.is_empty() || text.len() >= crate::sim::MAX_QUBITS || !text.bytes().all(|b| b == b'0' || b == b'1') {
        return Err(Error::Argument(format!(
            "{what} `{text}` must be a non-empty bitstring shorter than {} characters",
            crate::sim::MAX_QUBITS
        )));
    }
    Ok(text.bytes().map(|b| b == b'1').collect())
}

fn bell() -> Circuit {
    let mut c = Circuit::new(2);
    c.gate(GateOp::h(0))
        .gate(GateOp::cx(0, 1))
        .assert(AssertionDirective::product([0], [1]).verdict(false))
        .assert(AssertionDirective::uniform([0]).verdict(true));
    c
}

fn xgate() -> Circuit {
    let mut c = Circuit::new(2);
    c.gate(GateOp::x(0))
        .gate(GateOp::x(1))
        .assert(AssertionDirective::product([0], [1]).verdict(true));
    c
}

/// Teleports `rx(theta)|0>` from qubit 0 to qubit 2.
///
/// The entanglement checkpoint pairs the measured register `[0 1]` with the
/// receiving qubit `[2]`. Qubit 0 on its own is independent of `[1 2]` in the
/// computational basis (its Hadamard leaves only a phase dependence), so a
/// sampling-based test cannot see that split.
fn teleport(theta: f64) -> Circuit {
    let mut c = Circuit::new(3);
    c.gate(GateOp::rx(theta, 0))
        .gate(GateOp::h(1))
        .gate(GateOp::cx(1, 2))
        .gate(GateOp::cx(0, 1))
        .gate(GateOp::h(0))
        .assert(AssertionDirective::product([0, 1], [2]).verdict(false))
        .measure(0, 0)
        .measure(1, 1)
        .gate(GateOp::x(2).conditioned_on(1))
        .gate(GateOp::z(2).conditioned_on(0));
    if (theta / 2.0).sin().powi(2) > 0.999 {
        c.assert(AssertionDirective::classical([2]).expecting("1").verdict(true));
    }
    c
}

/// Bernstein-Vazirani over `secret.len()` data qubits plus one auxiliary qubit.
///
/// The uniform checkpoints cover the data register only; the auxiliary
/// qubit sits in |-> and measures 50/50 on its own.
fn bernstein_vazirani(secret: &[bool], drop_setup_hadamard: bool) -> Circuit {
    let n = secret.len();
    let aux = n;
    let data: Vec<usize> = (0..n).collect();
    let mut c = Circuit::new(n + 1);
    c.gate(GateOp::h(aux)).gate(GateOp::z(aux));
    if !drop_setup_hadamard {
        for &q in &data {
            c.gate(GateOp::h(q));
        }
    }
    c.assert(AssertionDirective::uniform(data.clone()).alpha(0.05).verdict(true))
        .assert(
            AssertionDirective::product(data.clone(), [aux])
                .alpha(0.05)
                .verdict(true),
        );
    for (q, &bit) in secret.iter().enumerate() {
        if bit {
            c.gate(GateOp::cx(q, aux));
        }
    }
    c.assert(AssertionDirective::uniform(data.clone()).alpha(0.05).verdict(true))
        .assert(
            AssertionDirective::product(data.clone(), [aux])
                .alpha(0.05)
                .verdict(true),
        );
    for &q in &data {
        c.gate(GateOp::h(q));
    }
    for &q in &data {
        c.measure(q, q);
    }
    let bits: String = secret.iter().map(|&b| if b { '1' } else { '0' }).collect();
    c.assert(AssertionDirective::classical(data).expecting(bits).verdict(true));
    c
}

/// QFT (without the final swaps) applied to a basis-state input.
fn qft(input: &[bool], drop_qft_hadamard: bool) -> Circuit {
    let n = input.len();
    let all: Vec<usize> = (0..n).collect();
    let bits: String = input.iter().map(|&b| if b { '1' } else { '0' }).collect();
    let mut c = Circuit::new(n);
    for (q, &bit) in input.iter().enumerate() {
        if bit {
            c.gate(GateOp::x(q));
        }
    }
    c.assert(AssertionDirective::classical(all.clone()).expecting(bits).verdict(true))
        .assert(AssertionDirective::uniform(all.clone()).verdict(false));
    for i in 0..n {
        if !drop_qft_hadamard {
            c.gate(GateOp::h(i));
        }
        for j in i + 1..n {
            let angle = 2.0 * PI / f64::from(1u32 << (j - i + 1));
            c.gate(GateOp::cr1(angle, j, i));
        }
    }
    c.assert(AssertionDirective::classical(all.clone()).verdict(false))
        .assert(AssertionDirective::uniform(all).verdict(true));
    c
}
