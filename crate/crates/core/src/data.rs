//! Row-major n×d matrix of observations in (0,1).

use crate::error::{Error, Result};

/// An n×d matrix of values in (0,1): either true copula observations or
/// pseudo-observations.
#[derive(Clone, Debug, PartialEq)]
pub struct DataMatrix {
    n: usize,
    d: usize,
    values: Vec<f64>,
}

impl DataMatrix {
    pub fn from_rows(rows: Vec<Vec<f64>>) -> Result<Self> {
        if rows.is_empty() {
            return Err(Error::InvalidArgument("empty matrix".into()));
        }
        let d = rows[0].len();
        if d == 0 {
            return Err(Error::InvalidArgument("matrix with zero columns".into()));
        }
        let n = rows.len();
        let mut values = Vec::with_capacity(n * d);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != d {
                return Err(Error::InvalidArgument(format!(
                    "ragged matrix: row {i} has {} columns, expected {d}",
                    row.len()
                )));
            }
            values.extend_from_slice(row);
        }
        Ok(DataMatrix { n, d, values })
    }

    pub fn from_vec(n: usize, d: usize, values: Vec<f64>) -> Result<Self> {
        if values.len() != n * d || n == 0 || d == 0 {
            return Err(Error::InvalidArgument(format!(
                "shape mismatch: {n}x{d} with {} values",
                values.len()
            )));
        }
        Ok(DataMatrix { n, d, values })
    }

    #[inline]
    pub fn nrows(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn ncols(&self) -> usize {
        self.d
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[f64] {
        &self.values[i * self.d..(i + 1) * self.d]
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.d + j]
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        (0..self.n).map(|i| self.get(i, j)).collect()
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        self.values.chunks_exact(self.d)
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Checks every entry lies strictly inside (0,1).
    pub fn validate_open_unit(&self) -> Result<()> {
        for i in 0..self.n {
            for j in 0..self.d {
                let v = self.get(i, j);
                if !(v > 0.0 && v < 1.0) {
                    return Err(Error::DegenerateRow {
                        row: i,
                        col: j,
                        value: v,
                    });
                }
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shape_and_access() {
        let m = DataMatrix::from_rows(vec![vec![0.1, 0.2], vec![0.3, 0.4]]).unwrap();
        assert_eq!(m.nrows(), 2);
        assert_eq!(m.ncols(), 2);
        assert_eq!(m.get(1, 0), 0.3);
        assert_eq!(m.column(1), vec![0.2, 0.4]);
    }

    #[test]
    fn ragged_rejected() {
        assert!(DataMatrix::from_rows(vec![vec![0.1], vec![0.2, 0.3]]).is_err());
    }

    #[test]
    fn open_unit_validation() {
        let m = DataMatrix::from_rows(vec![vec![0.5, 1.0]]).unwrap();
        assert!(matches!(
            m.validate_open_unit(),
            Err(Error::DegenerateRow { row: 0, col: 1, .. })
        ));
    }
}
