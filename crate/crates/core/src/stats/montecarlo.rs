//! Monte Carlo permutation test of independence for r×c tables.
//!
//! Null tables are drawn from the fixed-margins (multivariate hypergeometric)
//! distribution, one cell at a time: cell (i, j) is a hypergeometric draw of
//! row i's remaining count from the column counts not yet placed. This is the
//! distribution obtained by randomly permuting column labels against row
//! labels, at a cost of r·c draws instead of N. The test statistic is the
//! table's own log-probability, so "at least as extreme" means "no more
//! probable".

use rand::Rng;
use rand_distr::{Distribution, Hypergeometric};
use rayon::prelude::*;

use super::gamma::ln_factorial_table;
use super::table::{margin_log_term, ContingencyTable};
use super::{PValue, TestMethod};
use crate::error::{Error, Result};
use crate::rng::substream;

/// Resample count used unless overridden.
pub const DEFAULT_RESAMPLES: usize = 9999;

/// Absolute slack on log-probability comparisons.
pub const LOG_TIE_TOLERANCE: f64 = 1e-9;

/// Draws one table with the given margins under independence.
pub fn generate_table_fixed_margins<R: Rng + ?Sized>(
    row_sums: &[u64],
    col_sums: &[u64],
    rng: &mut R,
) -> Result<ContingencyTable> {
    check_margins(row_sums, col_sums)?;
    let mut cells = vec![0; row_sums.len() * col_sums.len()];
    let mut remaining = col_sums.to_vec();
    fill_cells(row_sums, &mut remaining, &mut cells, rng);
    ContingencyTable::new(row_sums.len(), col_sums.len(), cells)
}

fn check_margins(row_sums: &[u64], col_sums: &[u64]) -> Result<()> {
    let n: u64 = row_sums.iter().sum();
    let m: u64 = col_sums.iter().sum();
    if n != m {
        return Err(Error::Argument(format!("row sums total {n} but column sums total {m}")));
    }
    if row_sums.is_empty() || col_sums.is_empty() {
        return Err(Error::Argument("margins are empty".into()));
    }
    if n == 0 {
        return Err(Error::Argument("margins are all zero".into()));
    }
    Ok(())
}

/// `remaining` starts as the column sums and is consumed.
fn fill_cells<R: Rng + ?Sized>(row_sums: &[u64], remaining: &mut [u64], cells: &mut [u64], rng: &mut R) {
    let cols = remaining.len();
    let mut pool: u64 = remaining.iter().sum();
    for (i, &row_sum) in row_sums.iter().enumerate() {
        let mut left = row_sum;
        let mut pool_row = pool;
        for j in 0..cols {
            let available = remaining[j];
            let x = if left == 0 || available == 0 {
                0
            } else if available == pool_row {
                left
            } else {
                Hypergeometric::new(pool_row, available, left)
                    .expect("draws never exceed the pool")
                    .sample(rng)
            };
            cells[i * cols + j] = x;
            left -= x;
            pool_row -= available;
            remaining[j] -= x;
        }
        pool -= row_sum;
    }
}

/// Permutation p-value `(1 + #{tables no more probable than observed}) / (1 + resamples)`.
///
/// Resample `i` draws from substream `(seed, i)`, so the result does not
/// depend on how the work is split across threads.
pub fn monte_carlo_independence(table: &ContingencyTable, resamples: usize, seed: u64) -> Result<PValue> {
    if resamples == 0 {
        return Err(Error::Argument("resamples must be at least 1".into()));
    }
    let n = table.total();
    if n == 0 {
        return Err(Error::Argument("table is empty (N = 0)".into()));
    }
    let row_sums = table.row_sums();
    let col_sums = table.col_sums();
    let ln_fact = ln_factorial_table(n);
    let margin = margin_log_term(&row_sums, &col_sums);
    let log_prob = |cells: &[u64]| margin - cells.iter().map(|&o| ln_fact[o as usize]).sum::<f64>();
    let observed = log_prob(table.cells());

    let extreme: usize = (0..resamples as u64)
        .into_par_iter()
        .map_init(
            || (col_sums.clone(), vec![0u64; table.cells().len()]),
            |(remaining, cells), i| {
                let mut rng = substream(seed, i);
                remaining.copy_from_slice(&col_sums);
                fill_cells(&row_sums, remaining, cells, &mut rng);
                usize::from(log_prob(cells) <= observed + LOG_TIE_TOLERANCE)
            },
        )
        .sum();

    let value = (1 + extreme) as f64 / (1 + resamples) as f64;
    Ok(PValue {
        value,
        method: TestMethod::MonteCarlo,
        resamples: Some(resamples),
        degrees_of_freedom: None,
    })
}
