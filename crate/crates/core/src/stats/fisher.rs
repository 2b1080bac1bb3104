use super::gamma::ln_factorial;
use super::table::ContingencyTable;
use super::PValue;
use crate::error::{Error, Result};

/// Relative slack when deciding whether a table is at least as extreme as
/// the observed one.
pub const RELATIVE_TIE_TOLERANCE: f64 = 1e-7;

/// Two-sided Fisher exact test on a 2×2 table.
///
/// Sums the hypergeometric probability of every table with the observed
/// margins whose probability does not exceed the observed table's. Works in
/// log space so totals up to ~10⁶ are fine.
pub fn fisher_exact_2x2(table: &ContingencyTable) -> Result<PValue> {
    let [a, b, c, d] = table
        .as_2x2()
        .ok_or_else(|| Error::Argument(format!("Fisher exact test needs a 2x2 table, got {:?}", table.shape())))?;
    let (row0, row1) = (a + b, c + d);
    let (col0, col1) = (a + c, b + d);
    if row0 == 0 || row1 == 0 || col0 == 0 || col1 == 0 {
        return Ok(PValue::fisher(1.0));
    }
    let n = row0 + row1;
    let fixed = ln_factorial(row0) + ln_factorial(row1) + ln_factorial(col0) + ln_factorial(col1) - ln_factorial(n);
    // The table is determined by its top-left cell.
    let log_p = |x: u64| {
        fixed - ln_factorial(x) - ln_factorial(row0 - x) - ln_factorial(col0 - x) - ln_factorial(row1 + x - col0)
    };
    let threshold = log_p(a) + RELATIVE_TIE_TOLERANCE.ln_1p();
    let lo = col0.saturating_sub(row1);
    let hi = row0.min(col0);
    let p: f64 = (lo..=hi).map(log_p).filter(|&lp| lp <= threshold).map(f64::exp).sum();
    Ok(PValue::fisher(p.clamp(0.0, 1.0)))
}
