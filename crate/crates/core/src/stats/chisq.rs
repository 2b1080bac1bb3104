//! Chi-square statistics: goodness of fit and the add-one independence test.

use super::gamma::chi_square_sf;
use super::table::ContingencyTable;
use super::{PValue, TestMethod};
use crate::error::{Error, Result};

/// Σ (O − E)² / E. Every expected value must be positive.
pub fn chi_square_statistic(observed: &[u64], expected: &[f64]) -> Result<f64> {
    if observed.len() != expected.len() {
        return Err(Error::Argument(format!(
            "{} observed cells but {} expected cells",
            observed.len(),
            expected.len()
        )));
    }
    let mut statistic = 0.0;
    for (cell, (&o, &e)) in observed.iter().zip(expected).enumerate() {
        if e.is_nan() || e <= 0.0 {
            return Err(Error::InvalidExpected { cell, value: e });
        }
        let diff = o as f64 - e;
        statistic += diff * diff / e;
    }
    Ok(statistic)
}

const PROBABILITY_SUM_TOLERANCE: f64 = 1e-9;

/// Goodness-of-fit test of `observed` against `total · expected_probs`.
pub fn chi_square_gof_pvalue(observed: &[u64], expected_probs: &[f64], total: u64) -> Result<PValue> {
    if expected_probs.len() < 2 {
        return Err(Error::Argument("goodness of fit needs at least two categories".into()));
    }
    let sum: f64 = expected_probs.iter().sum();
    if (sum - 1.0).abs() > PROBABILITY_SUM_TOLERANCE {
        return Err(Error::Argument(format!("expected probabilities sum to {sum}, not 1")));
    }
    let expected: Vec<f64> = expected_probs.iter().map(|p| p * total as f64).collect();
    let statistic = chi_square_statistic(observed, &expected)?;
    let df = expected.len() - 1;
    Ok(PValue::chi_square(
        chi_square_sf(statistic, df)?,
        df,
        TestMethod::ChiSquare,
    ))
}

/// Independence test that adds one to every cell before a Pearson
/// chi-square with expected counts `R_i C_j / N`.
///
/// Kept as a comparison baseline: on sparse tables the smoothing itself
/// manufactures dependence.
pub fn legacy_chisq_add1(table: &ContingencyTable) -> Result<PValue> {
    let smoothed = table.plus(1);
    let rows = smoothed.row_sums();
    let cols = smoothed.col_sums();
    let n = smoothed.total() as f64;
    let expected: Vec<f64> = rows
        .iter()
        .flat_map(|&r| cols.iter().map(move |&c| r as f64 * c as f64 / n))
        .collect();
    let statistic = chi_square_statistic(smoothed.cells(), &expected)?;
    let df = (table.rows() - 1) * (table.cols() - 1);
    Ok(PValue::chi_square(
        chi_square_sf(statistic, df)?,
        df,
        TestMethod::LegacyChiSquareAdd1,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn statistic_examples() {
        assert_eq!(chi_square_statistic(&[5, 5], &[5.0, 5.0]).unwrap(), 0.0);
        assert!((chi_square_statistic(&[10, 0], &[5.0, 5.0]).unwrap() - 10.0).abs() < 1e-12);
        assert_eq!(chi_square_statistic(&[2500; 4], &[2500.0; 4]).unwrap(), 0.0);
    }

    #[test]
    fn zero_expected_is_named() {
        let err = chi_square_statistic(&[3, 0], &[3.0, 0.0]).unwrap_err();
        assert_eq!(err, Error::InvalidExpected { cell: 1, value: 0.0 });
        assert!(err.to_string().contains("division by zero"));
        assert!(chi_square_statistic(&[1], &[1.0, 1.0]).is_err());
    }

    #[test]
    fn gof_exact_match_is_one() {
        let p = chi_square_gof_pvalue(&[250; 4], &[0.25; 4], 1000).unwrap();
        assert_eq!(p.value, 1.0);
        assert_eq!(p.degrees_of_freedom, Some(3));
    }

    #[test]
    fn gof_extreme_is_tiny() {
        let p = chi_square_gof_pvalue(&[1000, 0], &[0.5, 0.5], 1000).unwrap();
        assert!(p.value < 1e-100);
    }

    #[test]
    fn gof_validates_probabilities() {
        assert!(chi_square_gof_pvalue(&[1, 1], &[0.5, 0.6], 2).is_err());
        assert!(chi_square_gof_pvalue(&[1], &[1.0], 1).is_err());
        assert!(matches!(
            chi_square_gof_pvalue(&[1, 1], &[1.0, 0.0], 2),
            Err(Error::InvalidExpected { .. })
        ));
    }

    #[test]
    fn legacy_flags_independent_classical_state() {
        let t = ContingencyTable::from_rows(&[[0, 0], [0, 1000]]).unwrap();
        let p = legacy_chisq_add1(&t).unwrap();
        assert_eq!(p.method, TestMethod::LegacyChiSquareAdd1);
        assert!(p.value < 0.05, "p = {}", p.value);
    }

    #[test]
    fn legacy_on_balanced_table() {
        let t = ContingencyTable::from_rows(&[[250, 250], [250, 250]]).unwrap();
        assert!((legacy_chisq_add1(&t).unwrap().value - 1.0).abs() < 0.01);
        let t = ContingencyTable::from_rows(&[[0, 0], [0, 0]]).unwrap();
        assert!((legacy_chisq_add1(&t).unwrap().value - 1.0).abs() < 1e-9);
    }
}
