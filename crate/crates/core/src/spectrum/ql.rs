//! Implicit-shift QL eigensolver for symmetric tridiagonal matrices.
//!
//! Classic Wilkinson-shift QL with accumulated plane rotations. Entirely
//! independent of the Sturm-sequence machinery; serves as the oracle route
//! for cross-checking eigenvalues and eigenvectors.

use crate::error::{Error, Result};
use crate::mat::Mat;

const MAX_SWEEPS: usize = 60;

/// Diagonalizes the matrix with diagonal `d` and off-diagonal `e`
/// (e[i] couples i and i+1). Returns ascending eigenvalues and the matrix of
/// eigenvector columns in the same order.
pub(crate) fn ql_implicit_shift(d: &[f64], e: &[f64]) -> Result<(Vec<f64>, Mat)> {
    let n = d.len();
    let mut d = d.to_vec();
    let mut e_work = vec![0.0; n];
    e_work[..n - 1.min(n)].copy_from_slice(&e[..n.saturating_sub(1)]);
    let mut z = Mat::identity(n);

    for l in 0..n {
        let mut iter = 0;
        loop {
            // deflation point: first negligible off-diagonal at or after l
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e_work[m].abs() <= f64::EPSILON * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            if iter > MAX_SWEEPS {
                return Err(Error::Convergence(format!("QL sweep limit exceeded at row {l}")));
            }
            // Wilkinson shift
            let mut g = (d[l + 1] - d[l]) / (2.0 * e_work[l]);
            let mut r = g.hypot(1.0);
            g = d[m] - d[l] + e_work[l] / (g + r.copysign(g));
            let mut s = 1.0;
            let mut c = 1.0;
            let mut p = 0.0;
            let mut underflow = false;
            for i in (l..m).rev() {
                let mut f = s * e_work[i];
                let b = c * e_work[i];
                r = f.hypot(g);
                e_work[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e_work[m] = 0.0;
                    underflow = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
                for row in 0..n {
                    f = z.at(row, i + 1);
                    z.set(row, i + 1, s * z.at(row, i) + c * f);
                    z.set(row, i, c * z.at(row, i) - s * f);
                }
            }
            if underflow {
                continue;
            }
            d[l] -= p;
            e_work[l] = g;
            e_work[m] = 0.0;
        }
    }

    // sort ascending, carrying columns along
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| d[a].partial_cmp(&d[b]).expect("finite eigenvalues"));
    let lambdas: Vec<f64> = order.iter().map(|&i| d[i]).collect();
    let mut cols = Vec::with_capacity(n);
    for &i in &order {
        let mut col = z.col(i).to_vec();
        // first-nonzero-positive sign convention
        if let Some(&lead) = col.iter().find(|x| **x != 0.0) {
            if lead < 0.0 {
                for x in &mut col {
                    *x = -*x;
                }
            }
        }
        cols.push(col);
    }
    Ok((lambdas, Mat::from_columns(cols)))
}
