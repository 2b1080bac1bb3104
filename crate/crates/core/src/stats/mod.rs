//! Hypothesis tests behind the assertions.

mod chisq;
mod fisher;
pub mod gamma;
mod montecarlo;
mod table;

use serde::{Deserialize, Serialize};

pub use chisq::{chi_square_gof_pvalue, chi_square_statistic, legacy_chisq_add1};
pub use fisher::{fisher_exact_2x2, RELATIVE_TIE_TOLERANCE};
pub use gamma::{chi_square_sf, ln_factorial, ln_gamma, upper_regularized_gamma};
pub use montecarlo::{generate_table_fixed_margins, monte_carlo_independence, DEFAULT_RESAMPLES, LOG_TIE_TOLERANCE};
pub use table::{table_log_probability, ContingencyTable};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum TestMethod {
    #[serde(rename = "CHI_SQUARE")]
    ChiSquare,
    #[serde(rename = "FISHER_EXACT")]
    FisherExact,
    #[serde(rename = "MONTE_CARLO")]
    MonteCarlo,
    #[serde(rename = "LEGACY_CHI_SQUARE_ADD1")]
    LegacyChiSquareAdd1,
}

impl TestMethod {
    pub fn name(self) -> &'static str {
        match self {
            TestMethod::ChiSquare => "CHI_SQUARE",
            TestMethod::FisherExact => "FISHER_EXACT",
            TestMethod::MonteCarlo => "MONTE_CARLO",
            TestMethod::LegacyChiSquareAdd1 => "LEGACY_CHI_SQUARE_ADD1",
        }
    }
}

/// A p-value together with how it was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PValue {
    pub value: f64,
    pub method: TestMethod,
    /// Monte Carlo only.
    pub resamples: Option<usize>,
    /// Chi-square variants only.
    pub degrees_of_freedom: Option<usize>,
}

impl PValue {
    pub(crate) fn chi_square(value: f64, df: usize, method: TestMethod) -> Self {
        Self {
            value,
            method,
            resamples: None,
            degrees_of_freedom: Some(df),
        }
    }

    pub(crate) fn fisher(value: f64) -> Self {
        Self {
            value,
            method: TestMethod::FisherExact,
            resamples: None,
            degrees_of_freedom: None,
        }
    }
}
