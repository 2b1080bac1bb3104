//! Acceptance criteria, one PASS/FAIL line each.
//!
//! Runs as a plain binary (`harness = false`) so the lines always print:
//! `cargo test -p qassert --test acceptance`.

use std::collections::BTreeMap;
use std::process::Command;
use std::time::{Duration, Instant};

use qassert::assertions::{assert_classical, assert_product, assert_uniform, evaluate_checkpoint, EvaluationConfig};
use qassert::cli::{example, run_program, CheckpointOutcome, ProgramConfig, RunReport};
use qassert::stats::{fisher_exact_2x2, monte_carlo_independence, upper_regularized_gamma, DEFAULT_RESAMPLES};
use qassert::{Circuit, ContingencyTable, GateOp, Item, TestMethod};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Criteria that are expected to be red, with the reason. Each is logged in
/// the project's decision notes.
const KNOWN_RED: &[(u32, &str)] = &[(
    6,
    "at the default seed one true-null uniform checkpoint lands below alpha = 0.05 \
     (a 5% false alarm per test); the seed was not tuned",
)];

type Criterion = (u32, &'static str, fn() -> Outcome);

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

fn within(elapsed: Duration, limit_secs: f64) -> bool {
    elapsed.as_secs_f64() < limit_secs
}

fn qassert_json(args: &[&str]) -> (Vec<u8>, RunReport) {
    let out = Command::new(env!("CARGO_BIN_EXE_qassert"))
        .args(args)
        .args(["--format", "json"])
        .output()
        .expect("qassert binary runs");
    assert!(
        out.status.code().is_some_and(|c| c <= 1),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let report = serde_json::from_slice(&out.stdout).expect("JSON report");
    (out.stdout, report)
}

fn verdicts(report: &RunReport) -> Vec<Option<bool>> {
    report
        .checkpoints
        .iter()
        .map(|c| match &c.outcome {
            CheckpointOutcome::Evaluated(r) => Some(r.passed),
            CheckpointOutcome::Error { .. } => None,
        })
        .collect()
}

fn no_params() -> BTreeMap<String, String> {
    BTreeMap::new()
}

fn ac1_xgate() -> Outcome {
    let start = Instant::now();
    let (_, plain) = qassert_json(&["example", "xgate"]);
    let (_, legacy) = qassert_json(&["example", "xgate", "--legacy-chisq"]);
    let elapsed = start.elapsed();
    let r = plain.checkpoints[0].result().unwrap();
    let l = legacy.checkpoints[0].result().unwrap();
    let pass = r.p_value.value == 1.0
        && r.passed
        && l.p_value.method == TestMethod::LegacyChiSquareAdd1
        && l.p_value.value < 0.05
        && !l.passed
        && within(elapsed, 1.0);
    outcome(
        pass,
        format!(
            "p={} ({}), legacy p={:.3e} ({}), {:.2}s",
            r.p_value.value,
            if r.passed { "passed" } else { "failed" },
            l.p_value.value,
            if l.passed { "passed" } else { "failed" },
            elapsed.as_secs_f64()
        ),
    )
}

fn binomial(n: u64, k: u64) -> u128 {
    (0..k).fold(1u128, |acc, i| acc * u128::from(n - i) / u128::from(i + 1))
}

/// Two-sided Fisher p-value by enumerating tables with exact integer weights.
fn fisher_oracle([a, b, c, d]: [u64; 4]) -> f64 {
    let (r0, r1, c0, c1) = (a + b, c + d, a + c, b + d);
    if r0 == 0 || r1 == 0 || c0 == 0 || c1 == 0 {
        return 1.0;
    }
    let weight = |x: u64| binomial(r0, x) * binomial(r1, c0 - x);
    let observed = weight(a) as f64;
    let mut sum = 0u128;
    for x in c0.saturating_sub(r1)..=r0.min(c0) {
        if weight(x) as f64 <= observed * (1.0 + 1e-7) {
            sum += weight(x);
        }
    }
    (sum as f64 / binomial(r0 + r1, c0) as f64).min(1.0)
}

fn ac2_fisher_exhaustive() -> Outcome {
    let start = Instant::now();
    let mut tables = 0usize;
    let mut worst = 0.0f64;
    for n in 0..=30u64 {
        for a in 0..=n {
            for b in 0..=n - a {
                for c in 0..=n - a - b {
                    let cells = [a, b, c, n - a - b - c];
                    let t = ContingencyTable::new(2, 2, cells.to_vec()).unwrap();
                    let p = fisher_exact_2x2(&t).unwrap().value;
                    worst = worst.max((p - fisher_oracle(cells)).abs());
                    tables += 1;
                }
            }
        }
    }
    let elapsed = start.elapsed();
    outcome(
        worst <= 1e-12 && within(elapsed, 10.0),
        format!("{tables} tables, max |diff| {worst:.1e}, {:.2}s", elapsed.as_secs_f64()),
    )
}

fn ac3_monte_carlo_vs_fisher() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut close = 0;
    let mut worst = 0.0f64;
    for k in 0..100u64 {
        let n: u64 = rng.gen_range(1..=1000);
        let mut cuts = [rng.gen_range(0..=n), rng.gen_range(0..=n), rng.gen_range(0..=n)];
        cuts.sort_unstable();
        let cells = vec![cuts[0], cuts[1] - cuts[0], cuts[2] - cuts[1], n - cuts[2]];
        let t = ContingencyTable::new(2, 2, cells).unwrap();
        let mc = monte_carlo_independence(&t, DEFAULT_RESAMPLES, k).unwrap().value;
        let exact = fisher_exact_2x2(&t).unwrap().value;
        let diff = (mc - exact).abs();
        worst = worst.max(diff);
        if diff <= 0.03 {
            close += 1;
        }
    }
    let elapsed = start.elapsed();
    outcome(
        close >= 95 && within(elapsed, 60.0),
        format!(
            "{close}/100 within 0.03, max |diff| {worst:.4}, {:.2}s",
            elapsed.as_secs_f64()
        ),
    )
}

fn bell() -> Circuit {
    let mut c = Circuit::new(2);
    c.gate(GateOp::h(0)).gate(GateOp::cx(0, 1));
    c
}

fn hh() -> Circuit {
    let mut c = Circuit::new(2);
    c.gate(GateOp::h(0)).gate(GateOp::h(1));
    c
}

fn ac4_bell() -> Outcome {
    let c = bell();
    let mut detected = 0;
    let mut largest = 0.0f64;
    for seed in 0..100 {
        let r = assert_product(&c, c.items.len(), &[0], &[1], 0.05, 1000, DEFAULT_RESAMPLES, seed).unwrap();
        largest = largest.max(r.p_value.value);
        if !r.passed && r.p_value.value < 1e-6 {
            detected += 1;
        }
    }
    outcome(
        detected == 100,
        format!("{detected}/100 failed with p < 1e-6, max p {largest:.1e}"),
    )
}

fn ac5_product_soundness() -> Outcome {
    let c = hh();
    let passed = (0..100)
        .filter(|&seed| {
            assert_product(&c, c.items.len(), &[0], &[1], 0.05, 10_000, DEFAULT_RESAMPLES, seed)
                .unwrap()
                .passed
        })
        .count();
    outcome(passed >= 90, format!("{passed}/100 passed"))
}

fn run_example(name: &str, bug: Option<&str>, shots: Option<u64>) -> RunReport {
    let circuit = example(name, &no_params(), bug).unwrap();
    let mut config = ProgramConfig::default();
    config.evaluation.shots = shots;
    run_program(name, &circuit, &config).unwrap()
}

fn show(v: &[Option<bool>]) -> String {
    v.iter()
        .map(|x| match x {
            Some(true) => "pass",
            Some(false) => "fail",
            None => "error",
        })
        .collect::<Vec<_>>()
        .join(",")
}

fn ac6_bernstein_vazirani() -> Outcome {
    let start = Instant::now();
    let clean = verdicts(&run_example("bv", None, Some(10_000)));
    let buggy = verdicts(&run_example("bv", Some("drop-setup-hadamard"), Some(10_000)));
    let elapsed = start.elapsed();
    // Context only: how often a whole clean run matches across other seeds.
    let circuit = example("bv", &no_params(), None).unwrap();
    let battery = 20;
    let matching = (1..=battery)
        .filter(|&seed| {
            let mut config = ProgramConfig::default();
            config.evaluation.shots = Some(10_000);
            config.evaluation.seed = seed;
            run_program("bv", &circuit, &config).unwrap().summary.mismatched == 0
        })
        .count();
    let pass = clean == [Some(true); 5] && buggy[0] == Some(false) && buggy[2] == Some(false) && within(elapsed, 30.0);
    outcome(
        pass,
        format!(
            "seed 0: clean [{}], bug [{}], {:.2}s; clean runs fully matching at seeds 1..={battery}: {matching}/{battery}",
            show(&clean),
            show(&buggy),
            elapsed.as_secs_f64()
        ),
    )
}

fn ac7_qft() -> Outcome {
    let start = Instant::now();
    let clean = verdicts(&run_example("qft", None, None));
    let buggy = verdicts(&run_example("qft", Some("drop-qft-hadamard"), None));
    let elapsed = start.elapsed();
    let (t, f) = (Some(true), Some(false));
    let pass = clean == [t, f, f, t] && buggy == [t, f, t, f] && within(elapsed, 30.0);
    outcome(
        pass,
        format!(
            "clean [{}], bug [{}], {:.2}s",
            show(&clean),
            show(&buggy),
            elapsed.as_secs_f64()
        ),
    )
}

fn ac8_teleport() -> Outcome {
    let c = example("teleport", &no_params(), None).unwrap();
    let index = c
        .items
        .iter()
        .position(|i| matches!(i, Item::Assert(d) if d.kind() == qassert::AssertionKind::Product))
        .unwrap();
    let failed = (0..100u64)
        .filter(|&seed| {
            let config = EvaluationConfig {
                seed,
                ..Default::default()
            };
            !evaluate_checkpoint(&c, index, &config).unwrap().passed
        })
        .count();
    outcome(failed == 100, format!("{failed}/100 failed"))
}

/// ln Γ(k/2) from the exact product forms for integer and half-integer arguments.
fn ln_gamma_half(k: u32) -> f64 {
    if k.is_multiple_of(2) {
        (1..k / 2).map(|i| f64::from(i).ln()).sum()
    } else {
        0.5 * std::f64::consts::PI.ln() + (1..=k / 2).map(|i| (f64::from(i) - 0.5).ln()).sum::<f64>()
    }
}

fn simpson(a: f64, b: f64, fa: f64, fm: f64, fb: f64) -> f64 {
    (b - a) / 6.0 * (fa + 4.0 * fm + fb)
}

#[allow(clippy::too_many_arguments)]
fn adaptive(
    f: &dyn Fn(f64) -> f64,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> f64 {
    let m = 0.5 * (a + b);
    let (lm, rm) = (f(0.5 * (a + m)), f(0.5 * (m + b)));
    let left = simpson(a, m, fa, lm, fm);
    let right = simpson(m, b, fm, rm, fb);
    if depth == 0 || (left + right - whole).abs() <= 15.0 * tol {
        left + right + (left + right - whole) / 15.0
    } else {
        adaptive(f, a, m, fa, lm, fm, left, tol / 2.0, depth - 1)
            + adaptive(f, m, b, fm, rm, fb, right, tol / 2.0, depth - 1)
    }
}

/// Upper tail of the chi-square law by integrating its density.
fn chi_square_tail_oracle(df: u32, x: f64) -> f64 {
    let k = f64::from(df);
    let log_norm = 0.5 * k * 2f64.ln() + ln_gamma_half(df);
    let density = move |t: f64| {
        if t <= 0.0 {
            0.0
        } else {
            ((0.5 * k - 1.0) * t.ln() - 0.5 * t - log_norm).exp()
        }
    };
    let hi = x.max(k) + 60.0 * (2.0 * k).sqrt() + 100.0;
    // Split at the mode-ish region so the recursion starts on smooth pieces.
    let mut edges = vec![x];
    let step = (hi - x) / 64.0;
    for i in 1..=64 {
        edges.push(x + step * f64::from(i));
    }
    edges
        .windows(2)
        .map(|w| {
            let (a, b) = (w[0], w[1]);
            let (fa, fm, fb) = (density(a), density(0.5 * (a + b)), density(b));
            adaptive(&density, a, b, fa, fm, fb, simpson(a, b, fa, fm, fb), 1e-14, 40)
        })
        .sum()
}

fn ac9_chi_square_backend() -> Outcome {
    let grid: [(u32, f64); 20] = [
        (1, 0.05),
        (1, 0.5),
        (1, 3.841),
        (1, 10.0),
        (2, 1.0),
        (2, 5.991),
        (3, 2.0),
        (3, 7.815),
        (4, 0.3),
        (5, 11.07),
        (7, 3.0),
        (10, 18.307),
        (15, 8.0),
        (20, 31.41),
        (31, 44.98),
        (31, 20.0),
        (50, 67.5),
        (63, 80.0),
        (100, 124.3),
        (100, 70.0),
    ];
    let mut worst = 0.0f64;
    for (df, x) in grid {
        let q = upper_regularized_gamma(f64::from(df) / 2.0, x / 2.0).unwrap();
        worst = worst.max((q - chi_square_tail_oracle(df, x)).abs());
    }
    let p = upper_regularized_gamma(0.5, 3.841 / 2.0).unwrap();
    outcome(
        worst <= 1e-6 && (p - 0.05).abs() <= 1e-3,
        format!("20 points, max |diff| {worst:.1e}; Q(0.5, 3.841/2) = {p:.6}"),
    )
}

fn ac10_shot_scaling() -> Outcome {
    let mut states = Vec::new();
    let mut c = Circuit::new(2);
    c.gate(GateOp::x(0)).gate(GateOp::x(1));
    states.push((c, "11"));
    let mut c = Circuit::new(3);
    c.gate(GateOp::x(0)).gate(GateOp::x(2));
    states.push((c, "101"));
    states.push((Circuit::new(1), "0"));
    let mut classical_ok = true;
    for (c, bits) in &states {
        let qubits: Vec<usize> = (0..c.n_qubits).collect();
        for shots in [500, 1000, 10_000] {
            let r = assert_classical(c, c.items.len(), &qubits, Some(bits), 0.05, shots, 0).unwrap();
            classical_ok &= r.passed;
        }
    }
    let c = hh();
    let rate = |shots: u64| {
        (0..50)
            .filter(|&seed| {
                assert_uniform(&c, c.items.len(), &[0, 1], 0.05, shots, seed)
                    .unwrap()
                    .passed
            })
            .count()
    };
    let (low, high) = (rate(1000), rate(10_000));
    outcome(
        classical_ok && high >= low,
        format!(
            "classical {}; uniform H(x)H passes {low}/50 at 1000 shots, {high}/50 at 10000",
            if classical_ok {
                "passed at 500/1000/10000"
            } else {
                "FAILED"
            }
        ),
    )
}

fn ac11_determinism() -> Outcome {
    let runs = [
        vec!["example", "teleport", "--seed", "7"],
        vec!["example", "bv", "--shots", "2000"],
        vec!["example", "qft"],
    ];
    let identical = runs.iter().all(|args| qassert_json(args).0 == qassert_json(args).0);
    outcome(
        identical,
        format!("{} invocation pairs byte-identical: {identical}", runs.len()),
    )
}

fn main() {
    let criteria: [Criterion; 11] = [
        (1, "x-gate product p = 1 vs legacy add-one chi-square", ac1_xgate),
        (2, "Fisher exact vs enumeration oracle, N <= 30", ac2_fisher_exhaustive),
        (
            3,
            "Monte Carlo vs Fisher on 100 random 2x2 tables",
            ac3_monte_carlo_vs_fisher,
        ),
        (4, "Bell state entanglement detected", ac4_bell),
        (5, "H(x)H product state passes", ac5_product_soundness),
        (6, "Bernstein-Vazirani walkthrough", ac6_bernstein_vazirani),
        (7, "QFT walkthrough", ac7_qft),
        (8, "teleportation entanglement checkpoint", ac8_teleport),
        (9, "chi-square tail vs numerical integration", ac9_chi_square_backend),
        (10, "shot scaling", ac10_shot_scaling),
        (11, "CLI JSON determinism", ac11_determinism),
    ];
    let mut unexpected = Vec::new();
    for (id, title, check) in criteria {
        let start = Instant::now();
        let result = check();
        let known = KNOWN_RED.iter().find(|(k, _)| *k == id);
        let status = match (result.pass, known) {
            (true, _) => "PASS",
            (false, Some(_)) => "FAIL (known)",
            (false, None) => "FAIL",
        };
        println!(
            "{status} AC{id:<2} {title}: {} [{:.1}s]",
            result.detail,
            start.elapsed().as_secs_f64()
        );
        if let (false, Some((_, why))) = (result.pass, known) {
            println!("          {why}");
        }
        if !result.pass && known.is_none() {
            unexpected.push(id);
        }
    }
    if !unexpected.is_empty() {
        eprintln!("unexpected failures: {unexpected:?}");
        std::process::exit(1);
    }
}
