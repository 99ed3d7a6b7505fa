//! Minimal column-major square matrix used for eigenvector sets.

/// Dense square matrix with contiguous columns.
///
/// Eigenvector sets are stored with one eigenvector per column, so
/// `mat.col(v)` is the amplitude vector of level `v` and `mat.at(f, v)`
/// is the component on basis index `f`.
#[derive(Debug, Clone, PartialEq)]
pub struct Mat {
    dim: usize,
    data: Vec<f64>,
}

impl Mat {
    pub fn zeros(dim: usize) -> Self {
        Mat { dim, data: vec![0.0; dim * dim] }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Mat::zeros(dim);
        for i in 0..dim {
            m.data[i * dim + i] = 1.0;
        }
        m
    }

    /// Builds a matrix from columns; all columns must have length `dim`.
    pub fn from_columns(cols: Vec<Vec<f64>>) -> Self {
        let dim = cols.len();
        let mut data = Vec::with_capacity(dim * dim);
        for c in &cols {
            assert_eq!(c.len(), dim, "column length must equal matrix dimension");
            data.extend_from_slice(c);
        }
        Mat { dim, data }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn at(&self, row: usize, col: usize) -> f64 {
        self.data[col * self.dim + row]
    }

    #[inline]
    pub fn set(&mut self, row: usize, col: usize, value: f64) {
        self.data[col * self.dim + row] = value;
    }

    #[inline]
    pub fn col(&self, col: usize) -> &[f64] {
        &self.data[col * self.dim..(col + 1) * self.dim]
    }

    pub fn col_mut(&mut self, col: usize) -> &mut [f64] {
        &mut self.data[col * self.dim..(col + 1) * self.dim]
    }

    pub fn transpose(&self) -> Mat {
        let mut t = Mat::zeros(self.dim);
        for c in 0..self.dim {
            for r in 0..self.dim {
                t.set(c, r, self.at(r, c));
            }
        }
        t
    }

    /// Scales every entry of one column.
    pub fn scale_col(&mut self, col: usize, factor: f64) {
        for x in self.col_mut(col) {
            *x *= factor;
        }
    }

    /// Largest absolute deviation of `selfᵀ self` from the identity.
    pub fn orthonormality_defect(&self) -> f64 {
        let n = self.dim;
        let mut worst = 0.0_f64;
        for a in 0..n {
            for b in a..n {
                let dot: f64 = self.col(a).iter().zip(self.col(b)).map(|(x, y)| x * y).sum();
                let target = if a == b { 1.0 } else { 0.0 };
                worst = worst.max((dot - target).abs());
            }
        }
        worst
    }

    /// Largest absolute deviation of `self selfᵀ` from the identity
    /// (completeness of a square orthonormal column set).
    pub fn completeness_defect(&self) -> f64 {
        self.transpose().orthonormality_defect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_is_orthonormal_and_complete() {
        let m = Mat::identity(5);
        assert_eq!(m.orthonormality_defect(), 0.0);
        assert_eq!(m.completeness_defect(), 0.0);
        assert_eq!(m.at(3, 3), 1.0);
        assert_eq!(m.at(3, 2), 0.0);
    }

    #[test]
    fn from_columns_round_trips() {
        let m = Mat::from_columns(vec![vec![1.0, 2.0], vec![3.0, 4.0]]);
        assert_eq!(m.at(0, 0), 1.0);
        assert_eq!(m.at(1, 0), 2.0);
        assert_eq!(m.at(0, 1), 3.0);
        assert_eq!(m.col(1), &[3.0, 4.0]);
        let t = m.transpose();
        assert_eq!(t.at(0, 1), 2.0);
    }
}
