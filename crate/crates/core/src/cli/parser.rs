//! Line-based circuit file format.
//!
//! ```text
//! # comment
//! qubits N
//! h|x|y|z|s|t Q
//! rx|ry|rz|r1 ANGLE Q
//! cx|cz QC QT
//! cr1 ANGLE QC QT
//! swap Q1 Q2
//! measure Q -> CB
//! cif CB <gate statement>
//! assert_classical Q... [expect=BITS] [alpha=A] [shots=S] [verdict=pass|fail]
//! assert_uniform Q... [alpha=A] [shots=S] [verdict=pass|fail]
//! assert_product [Q...] [Q...] [alpha=A] [shots=S] [resamples=R] [verdict=pass|fail]
//! ```
//!
//! Angles are decimal radians. Qubit lists inside brackets may be separated
//! by spaces or commas. `qubits` must be the first statement.

use crate::assertions::AssertionDirective;
use crate::error::{Error, Result};
use crate::sim::{Circuit, GateKind, GateOp, MAX_CLASSICAL_BITS, MAX_QUBITS};

#[derive(Debug, Clone, Copy)]
struct Token<'a> {
    text: &'a str,
    column: usize,
}

fn tokenize(line: &str) -> Vec<Token<'_>> {
    let mut tokens = Vec::new();
    let mut start: Option<usize> = None;
    for (i, ch) in line.char_indices() {
        let separator = ch.is_whitespace() || ch == ',';
        let bracket = ch == '[' || ch == ']';
        if separator || bracket {
            if let Some(s) = start.take() {
                tokens.push(Token {
                    text: &line[s..i],
                    column: s + 1,
                });
            }
            if bracket {
                tokens.push(Token {
                    text: &line[i..i + 1],
                    column: i + 1,
                });
            }
        } else if start.is_none() {
            start = Some(i);
        }
    }
    if let Some(s) = start {
        tokens.push(Token {
            text: &line[s..],
            column: s + 1,
        });
    }
    tokens
}

struct LineParser<'a> {
    line: usize,
    end_column: usize,
    tokens: Vec<Token<'a>>,
    pos: usize,
}

impl<'a> LineParser<'a> {
    fn error_at(&self, column: usize, message: impl Into<String>) -> Error {
        Error::Parse {
            line: self.line,
            column,
            message: message.into(),
        }
    }

    fn error_here(&self, message: impl Into<String>) -> Error {
        let column = self.tokens.get(self.pos).map_or(self.end_column, |t| t.column);
        self.error_at(column, message)
    }

    fn peek(&self) -> Option<Token<'a>> {
        self.tokens.get(self.pos).copied()
    }

    fn next(&mut self, what: &str) -> Result<Token<'a>> {
        let token = self.peek().ok_or_else(|| self.error_here(format!("expected {what}")))?;
        self.pos += 1;
        Ok(token)
    }

    fn finish(&self) -> Result<()> {
        match self.peek() {
            Some(t) => Err(self.error_at(t.column, format!("unexpected `{}`", t.text))),
            None => Ok(()),
        }
    }

    fn integer(&mut self, what: &str) -> Result<(usize, Token<'a>)> {
        let token = self.next(what)?;
        let value = token
            .text
            .parse::<usize>()
            .map_err(|_| self.error_at(token.column, format!("expected {what}, found `{}`", token.text)))?;
        Ok((value, token))
    }

    fn qubit(&mut self, n_qubits: usize) -> Result<usize> {
        let (q, token) = self.integer("qubit index")?;
        if q >= n_qubits {
            return Err(self.error_at(
                token.column,
                format!("qubit {q} out of range for a {n_qubits}-qubit register"),
            ));
        }
        Ok(q)
    }

    fn angle(&mut self) -> Result<f64> {
        let token = self.next("angle")?;
        match token.text.parse::<f64>() {
            Ok(v) if v.is_finite() => Ok(v),
            _ => Err(self.error_at(
                token.column,
                format!("expected angle in radians, found `{}`", token.text),
            )),
        }
    }

    fn qubit_list(&mut self, n_qubits: usize) -> Result<Vec<usize>> {
        let open = self.next("`[`")?;
        if open.text != "[" {
            return Err(self.error_at(open.column, format!("expected `[`, found `{}`", open.text)));
        }
        let mut qubits = Vec::new();
        loop {
            match self.peek() {
                Some(t) if t.text == "]" => {
                    self.pos += 1;
                    return Ok(qubits);
                }
                Some(_) => qubits.push(self.qubit(n_qubits)?),
                None => return Err(self.error_here("unterminated qubit list, expected `]`")),
            }
        }
    }
}

#[derive(Default)]
struct Options {
    alpha: Option<f64>,
    shots: Option<u64>,
    resamples: Option<usize>,
    verdict: Option<bool>,
    expect: Option<String>,
}

/// Parses a circuit file.
pub fn parse_circuit(text: &str) -> Result<Circuit> {
    let mut circuit: Option<Circuit> = None;
    let mut written: Vec<bool> = Vec::new();

    for (index, raw) in text.lines().enumerate() {
        let line_no = index + 1;
        let content = raw.split('#').next().unwrap_or_default();
        let tokens = tokenize(content);
        if tokens.is_empty() {
            continue;
        }
        let mut p = LineParser {
            line: line_no,
            end_column: content.trim_end().len() + 1,
            tokens,
            pos: 0,
        };
        let head = p.next("statement")?;

        if head.text == "qubits" {
            if circuit.is_some() {
                return Err(p.error_at(head.column, "`qubits` declared twice"));
            }
            let (n, token) = p.integer("qubit count")?;
            if n == 0 || n > MAX_QUBITS {
                return Err(p.error_at(
                    token.column,
                    format!("qubit count {n} outside supported range 1..={MAX_QUBITS}"),
                ));
            }
            p.finish()?;
            circuit = Some(Circuit::new(n));
            continue;
        }

        let c = circuit
            .as_mut()
            .ok_or_else(|| p.error_at(head.column, "`qubits N` must come before any other statement"))?;
        let n = c.n_qubits;

        match head.text {
            "measure" => {
                let qubit = p.qubit(n)?;
                let arrow = p.next("`->`")?;
                if arrow.text != "->" {
                    return Err(p.error_at(arrow.column, format!("expected `->`, found `{}`", arrow.text)));
                }
                let (bit, token) = p.integer("classical bit index")?;
                if bit >= MAX_CLASSICAL_BITS {
                    return Err(p.error_at(
                        token.column,
                        format!("classical bit {bit} outside supported range 0..{MAX_CLASSICAL_BITS}"),
                    ));
                }
                p.finish()?;
                if written.len() <= bit {
                    written.resize(bit + 1, false);
                }
                written[bit] = true;
                c.measure(qubit, bit);
            }
            "cif" => {
                let (bit, token) = p.integer("classical bit index")?;
                if !written.get(bit).copied().unwrap_or(false) {
                    return Err(p.error_at(
                        token.column,
                        format!("classical bit {bit} is read before any measurement writes it"),
                    ));
                }
                let gate_token = p.next("gate")?;
                let gate = parse_gate(&mut p, gate_token, n)?;
                c.gate(gate.conditioned_on(bit));
            }
            "assert_classical" | "assert_uniform" => {
                let mut qubits = Vec::new();
                while p.peek().is_some_and(|t| !t.text.contains('=')) {
                    qubits.push(p.qubit(n)?);
                }
                if qubits.is_empty() {
                    return Err(p.error_here(format!("`{}` needs at least one qubit", head.text)));
                }
                let classical = head.text == "assert_classical";
                let allowed: &[&str] = if classical {
                    &["expect", "alpha", "shots", "verdict"]
                } else {
                    &["alpha", "shots", "verdict"]
                };
                let opts = parse_options(&mut p, allowed)?;
                let mut d = if classical {
                    AssertionDirective::classical(qubits)
                } else {
                    AssertionDirective::uniform(qubits)
                };
                if let Some(bits) = opts.expect.clone() {
                    d = d.expecting(bits);
                }
                push_directive(c, &p, head, d, opts)?;
            }
            "assert_product" => {
                let group0 = p.qubit_list(n)?;
                let group1 = p.qubit_list(n)?;
                let opts = parse_options(&mut p, &["alpha", "shots", "resamples", "verdict"])?;
                let d = AssertionDirective::product(group0, group1);
                push_directive(c, &p, head, d, opts)?;
            }
            _ => {
                let gate = parse_gate(&mut p, head, n)?;
                c.gate(gate);
            }
        }
    }

    let mut circuit = circuit.ok_or(Error::Parse {
        line: text.lines().count().max(1),
        column: 1,
        message: "missing `qubits N` declaration".into(),
    })?;
    circuit.n_classical_bits = written.len();
    circuit.validate()?;
    Ok(circuit)
}

fn parse_gate(p: &mut LineParser<'_>, head: Token<'_>, n_qubits: usize) -> Result<GateOp> {
    let kind = GateKind::from_mnemonic(head.text)
        .ok_or_else(|| p.error_at(head.column, format!("unknown gate or statement `{}`", head.text)))?;
    let angle = if kind.is_parameterized() {
        Some(p.angle()?)
    } else {
        None
    };
    let mut qubits = Vec::with_capacity(kind.arity());
    for _ in 0..kind.arity() {
        qubits.push(p.qubit(n_qubits)?);
    }
    if let Some(extra) = p.peek() {
        return Err(p.error_at(
            extra.column,
            format!("gate `{}` takes {} qubit operand(s)", kind.mnemonic(), kind.arity()),
        ));
    }
    GateOp::new(kind, angle, &qubits).map_err(|e| p.error_at(head.column, e.to_string()))
}

fn parse_options(p: &mut LineParser<'_>, allowed: &[&str]) -> Result<Options> {
    let mut opts = Options::default();
    while let Some(token) = p.peek() {
        p.pos += 1;
        let (key, value) = token.text.split_once('=').ok_or_else(|| {
            p.error_at(
                token.column,
                format!("expected key=value option, found `{}`", token.text),
            )
        })?;
        if !allowed.contains(&key) {
            return Err(p.error_at(token.column, format!("unknown option `{key}`")));
        }
        let bad = |what: &str| p.error_at(token.column, format!("invalid {what} `{value}`"));
        let duplicate = match key {
            "alpha" => opts.alpha.replace(value.parse().map_err(|_| bad("alpha"))?).is_some(),
            "shots" => opts
                .shots
                .replace(value.parse().map_err(|_| bad("shot count"))?)
                .is_some(),
            "resamples" => opts
                .resamples
                .replace(value.parse().map_err(|_| bad("resample count"))?)
                .is_some(),
            "verdict" => {
                let v = match value {
                    "pass" => true,
                    "fail" => false,
                    _ => return Err(bad("verdict (expected pass or fail)")),
                };
                opts.verdict.replace(v).is_some()
            }
            "expect" => opts.expect.replace(value.to_owned()).is_some(),
            _ => unreachable!(),
        };
        if duplicate {
            return Err(p.error_at(token.column, format!("option `{key}` given twice")));
        }
    }
    Ok(opts)
}

fn push_directive(
    circuit: &mut Circuit,
    p: &LineParser<'_>,
    head: Token<'_>,
    mut d: AssertionDirective,
    opts: Options,
) -> Result<()> {
    d.alpha = opts.alpha;
    d.shots = opts.shots;
    d.resamples = opts.resamples;
    d.expected_verdict = opts.verdict;
    d.validate(circuit.n_qubits)
        .map_err(|e| p.error_at(head.column, format!("malformed `{}`: {e}", head.text)))?;
    circuit.assert(d);
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::assertions::Check;
    use crate::sim::Item;

    fn parse_err(text: &str) -> (usize, usize, String) {
        match parse_circuit(text) {
            Err(Error::Parse { line, column, message }) => (line, column, message),
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn bell_with_product_directive() {
        let c = parse_circuit("qubits 2\nh 0\ncx 0 1\nassert_product [0] [1] alpha=0.05").unwrap();
        assert_eq!(c.n_qubits, 2);
        assert_eq!(c.items.len(), 3);
        assert_eq!(c.items[1], Item::Gate(GateOp::cx(0, 1)));
        match &c.items[2] {
            Item::Assert(d) => {
                assert_eq!(
                    d.check,
                    Check::Product {
                        group0: vec![0],
                        group1: vec![1]
                    }
                );
                assert_eq!(d.alpha, Some(0.05));
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn classical_bit_range() {
        let err = parse_circuit("qubits 1\nmeasure 0 -> 4000000000\n").unwrap_err();
        assert!(
            matches!(
                err,
                Error::Parse {
                    line: 2,
                    column: 14,
                    ..
                }
            ),
            "{err}"
        );
    }

    #[test]
    fn unknown_gate_reports_line() {
        let (line, column, message) = parse_err("qubits 1\nbadgate 0");
        assert_eq!((line, column), (2, 1));
        assert!(message.contains("badgate"));
    }

    #[test]
    fn error_locations() {
        assert_eq!(parse_err("qubits 2\nh 2").0, 2);
        assert_eq!(parse_err("qubits 2\nh 2").1, 3);
        assert_eq!(parse_err("qubits 2\ncx 0").1, 5);
        assert_eq!(parse_err("qubits 2\nh 0 1").1, 5);
        assert_eq!(parse_err("qubits 2\nrx 0").1, 5);
        assert_eq!(parse_err("qubits 2\nrx abc 0").1, 4);
        assert_eq!(parse_err("h 0").0, 1);
        assert_eq!(parse_err("").2, "missing `qubits N` declaration");
        assert_eq!(parse_err("qubits 0").1, 8);
        assert_eq!(parse_err("qubits 2\nqubits 2").0, 2);
        assert_eq!(parse_err("qubits 2\ncx 1 1").0, 2);
        assert_eq!(parse_err("qubits 2\ncif 0 x 1").1, 5);
        assert_eq!(parse_err("qubits 2\nmeasure 0 0").1, 11);
    }

    #[test]
    fn malformed_assertions() {
        assert_eq!(parse_err("qubits 2\nassert_product [0] [0]").0, 2);
        assert_eq!(parse_err("qubits 2\nassert_product [0 [1]").0, 2);
        assert_eq!(parse_err("qubits 2\nassert_product [0] [1").1, 22);
        assert_eq!(parse_err("qubits 2\nassert_uniform alpha=0.1").0, 2);
        assert!(parse_err("qubits 2\nassert_uniform 0 alpha=1.5").2.contains("alpha"));
        assert!(parse_err("qubits 2\nassert_uniform 0 expect=0")
            .2
            .contains("unknown option"));
        assert!(parse_err("qubits 2\nassert_uniform 0 verdict=maybe")
            .2
            .contains("verdict"));
        assert!(parse_err("qubits 2\nassert_classical 0 1 expect=0")
            .2
            .contains("malformed"));
        assert!(parse_err("qubits 2\nassert_uniform 0 shots=5 shots=6")
            .2
            .contains("twice"));
    }

    #[test]
    fn comments_commas_and_conditionals() {
        let text = "# teleport tail\nqubits 3 # three\nh 0\nmeasure 0 -> 1\ncif 1 x 2\nassert_product [0, 1] [2] resamples=99 verdict=fail\n";
        let c = parse_circuit(text).unwrap();
        assert_eq!(c.n_classical_bits, 2);
        assert_eq!(c.items[2], Item::Gate(GateOp::x(2).conditioned_on(1)));
        match &c.items[3] {
            Item::Assert(d) => {
                assert_eq!(d.resamples, Some(99));
                assert_eq!(d.expected_verdict, Some(false));
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn every_gate_kind_parses() {
        let text = "qubits 3\nh 0\nx 1\ny 2\nz 0\ns 1\nt 2\nrx 0.5 0\nry -1.25 1\nrz 3 2\nr1 0.125 0\ncx 0 1\ncz 1 2\ncr1 1.5707963267948966 2 0\nswap 0 2\n";
        let c = parse_circuit(text).unwrap();
        assert_eq!(c.items.len(), 14);
        let kinds: Vec<_> = c
            .items
            .iter()
            .map(|i| match i {
                Item::Gate(g) => g.kind,
                _ => unreachable!(),
            })
            .collect();
        assert_eq!(kinds, GateKind::ALL.to_vec());
        assert_eq!(parse_circuit(&c.to_string()).unwrap(), c);
    }
}
