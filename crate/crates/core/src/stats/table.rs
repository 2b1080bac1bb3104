use std::fmt;

use serde::{Deserialize, Serialize};

use super::gamma::ln_factorial;
use crate::error::{Error, Result};

/// An r×c table of non-negative counts, stored row-major.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ContingencyTable {
    rows: usize,
    cols: usize,
    cells: Vec<u64>,
}

impl ContingencyTable {
    pub fn new(rows: usize, cols: usize, cells: Vec<u64>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::Argument(format!("table shape {rows}x{cols} is empty")));
        }
        if cells.len() != rows * cols {
            return Err(Error::Argument(format!(
                "{} cells do not fill a {rows}x{cols} table",
                cells.len()
            )));
        }
        Ok(Self { rows, cols, cells })
    }

    pub fn zeros(rows: usize, cols: usize) -> Result<Self> {
        Self::new(rows, cols, vec![0; rows * cols])
    }

    /// Builds a table from equal-length rows.
    pub fn from_rows<R: AsRef<[u64]>>(rows: &[R]) -> Result<Self> {
        let cols = rows.first().map_or(0, |r| r.as_ref().len());
        if rows.iter().any(|r| r.as_ref().len() != cols) {
            return Err(Error::Argument("rows have different lengths".into()));
        }
        let cells = rows.iter().flat_map(|r| r.as_ref().iter().copied()).collect();
        Self::new(rows.len(), cols, cells)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn cells(&self) -> &[u64] {
        &self.cells
    }

    pub fn get(&self, row: usize, col: usize) -> u64 {
        self.cells[row * self.cols + col]
    }

    pub fn add(&mut self, row: usize, col: usize, count: u64) {
        self.cells[row * self.cols + col] += count;
    }

    pub fn row_sums(&self) -> Vec<u64> {
        self.cells.chunks(self.cols).map(|r| r.iter().sum()).collect()
    }

    pub fn col_sums(&self) -> Vec<u64> {
        let mut sums = vec![0; self.cols];
        for row in self.cells.chunks(self.cols) {
            for (s, &v) in sums.iter_mut().zip(row) {
                *s += v;
            }
        }
        sums
    }

    pub fn total(&self) -> u64 {
        self.cells.iter().sum()
    }

    /// `[A, B, C, D]` for a 2×2 table.
    pub fn as_2x2(&self) -> Option<[u64; 4]> {
        (self.shape() == (2, 2)).then(|| [self.cells[0], self.cells[1], self.cells[2], self.cells[3]])
    }

    pub fn transpose(&self) -> Self {
        let mut cells = Vec::with_capacity(self.cells.len());
        for j in 0..self.cols {
            for i in 0..self.rows {
                cells.push(self.get(i, j));
            }
        }
        Self {
            rows: self.cols,
            cols: self.rows,
            cells,
        }
    }

    /// A copy with `amount` added to every cell.
    pub fn plus(&self, amount: u64) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            cells: self.cells.iter().map(|c| c + amount).collect(),
        }
    }
}

impl fmt::Display for ContingencyTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, row) in self.cells.chunks(self.cols).enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{row:?}")?;
        }
        write!(f, "]")
    }
}

/// Log-probability of the table under independence with its margins fixed
/// (multivariate hypergeometric):
/// `Σ ln R_i! + Σ ln C_j! − ln N! − Σ ln O_ij!`.
pub fn table_log_probability(table: &ContingencyTable) -> f64 {
    margin_log_term(&table.row_sums(), &table.col_sums()) - cell_log_term(table.cells())
}

pub(crate) fn margin_log_term(row_sums: &[u64], col_sums: &[u64]) -> f64 {
    let n: u64 = row_sums.iter().sum();
    row_sums.iter().map(|&r| ln_factorial(r)).sum::<f64>() + col_sums.iter().map(|&c| ln_factorial(c)).sum::<f64>()
        - ln_factorial(n)
}

pub(crate) fn cell_log_term(cells: &[u64]) -> f64 {
    cells.iter().map(|&o| ln_factorial(o)).sum()
}
