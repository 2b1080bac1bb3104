//! Log-gamma, log-factorial and the regularized incomplete gamma function.

use std::sync::OnceLock;

use crate::error::{Error, Result};

const LANCZOS_G: f64 = 7.0;
const LANCZOS_COEFFICIENTS: [f64; 9] = [
    0.999_999_999_999_809_9,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_1,
    -176.615_029_162_140_6,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_572e-6,
    1.505_632_735_149_311_6e-7,
];

/// Natural log of |Γ(x)| (Lanczos, g = 7).
pub fn ln_gamma(x: f64) -> f64 {
    if x < 0.5 {
        // Reflection formula.
        let pi = std::f64::consts::PI;
        return (pi / (pi * x).sin().abs()).ln() - ln_gamma(1.0 - x);
    }
    let x = x - 1.0;
    let mut sum = LANCZOS_COEFFICIENTS[0];
    for (i, &c) in LANCZOS_COEFFICIENTS.iter().enumerate().skip(1) {
        sum += c / (x + i as f64);
    }
    let t = x + LANCZOS_G + 0.5;
    0.5 * (2.0 * std::f64::consts::PI).ln() + (x + 0.5) * t.ln() - t + sum.ln()
}

const TABLE_LEN: usize = 171;

fn small_table() -> &'static [f64; TABLE_LEN] {
    static TABLE: OnceLock<[f64; TABLE_LEN]> = OnceLock::new();
    TABLE.get_or_init(|| {
        let mut table = [0.0; TABLE_LEN];
        let mut factorial = 1.0f64;
        for (n, slot) in table.iter_mut().enumerate().skip(1) {
            factorial *= n as f64;
            *slot = factorial.ln();
        }
        table
    })
}

/// ln(n!). Exact products below 171, Stirling's series above.
pub fn ln_factorial(n: u64) -> f64 {
    if (n as usize) < TABLE_LEN {
        return small_table()[n as usize];
    }
    let x = n as f64;
    let inv = 1.0 / x;
    let inv2 = inv * inv;
    x * x.ln() - x
        + 0.5 * (2.0 * std::f64::consts::PI * x).ln()
        + inv * (1.0 / 12.0 - inv2 * (1.0 / 360.0 - inv2 * (1.0 / 1260.0 - inv2 / 1680.0)))
}

/// ln(k!) for every k in 0..=n.
pub fn ln_factorial_table(n: u64) -> Vec<f64> {
    (0..=n).map(ln_factorial).collect()
}

const MAX_ITERATIONS: usize = 500;
const EPSILON: f64 = 1e-16;
const TINY: f64 = 1e-300;

/// Upper regularized incomplete gamma Q(a, x) = Γ(a, x) / Γ(a).
///
/// Uses the lower series for `x < a + 1` and a Lentz continued fraction
/// otherwise.
pub fn upper_regularized_gamma(a: f64, x: f64) -> Result<f64> {
    if a.is_nan() || a <= 0.0 || a.is_infinite() {
        return Err(Error::Argument(format!("shape a = {a} must be positive and finite")));
    }
    if x.is_nan() || x < 0.0 {
        return Err(Error::Argument(format!("x = {x} must be non-negative")));
    }
    if x == 0.0 {
        return Ok(1.0);
    }
    if x.is_infinite() {
        return Ok(0.0);
    }
    let log_prefactor = -x + a * x.ln() - ln_gamma(a);
    let q = if x < a + 1.0 {
        let mut term = 1.0 / a;
        let mut sum = term;
        let mut denom = a;
        let mut converged = false;
        for _ in 0..MAX_ITERATIONS {
            denom += 1.0;
            term *= x / denom;
            sum += term;
            if term.abs() < sum.abs() * EPSILON {
                converged = true;
                break;
            }
        }
        if !converged {
            return Err(non_convergence(a, x));
        }
        1.0 - sum * log_prefactor.exp()
    } else {
        let mut b = x + 1.0 - a;
        let mut c = 1.0 / TINY;
        let mut d = 1.0 / b;
        let mut h = d;
        let mut converged = false;
        for i in 1..=MAX_ITERATIONS {
            let an = -(i as f64) * (i as f64 - a);
            b += 2.0;
            d = an * d + b;
            if d.abs() < TINY {
                d = TINY;
            }
            c = b + an / c;
            if c.abs() < TINY {
                c = TINY;
            }
            d = 1.0 / d;
            let delta = d * c;
            h *= delta;
            if (delta - 1.0).abs() < EPSILON {
                converged = true;
                break;
            }
        }
        if !converged {
            return Err(non_convergence(a, x));
        }
        log_prefactor.exp() * h
    };
    Ok(q.clamp(0.0, 1.0))
}

fn non_convergence(a: f64, x: f64) -> Error {
    Error::Numerical(format!(
        "incomplete gamma Q({a}, {x}) did not converge in {MAX_ITERATIONS} iterations"
    ))
}

/// Survival function of the chi-square distribution.
pub fn chi_square_sf(statistic: f64, degrees_of_freedom: usize) -> Result<f64> {
    if degrees_of_freedom == 0 {
        return Ok(1.0);
    }
    upper_regularized_gamma(degrees_of_freedom as f64 / 2.0, statistic.max(0.0) / 2.0)
}
