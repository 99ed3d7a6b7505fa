//! Eigenvector extraction for a symmetric tridiagonal matrix at a known
//! eigenvalue.
//!
//! The workhorse is the twisted factorization: forward (LDLᵀ) and backward
//! (UDUᵀ) pivot sequences of T − λI meet at the index k* where the twisted
//! residual γ_k is smallest, and the solution of the twisted system with
//! unit entry at k* is the eigenvector. Entries are accumulated as
//! (sign, log₂|·|) pairs, so components far below the peak neither underflow
//! nor lose their sign — the sign of the first component is a plain product
//! of pivot-ratio signs and is therefore exact, which is what lets the
//! first-component-positive convention be applied reliably.

use crate::spectrum::sturm::exp2i;

const PIVMIN: f64 = 1e-300;

#[inline]
fn guard(p: f64) -> f64 {
    if p.abs() < PIVMIN {
        if p >= 0.0 {
            PIVMIN
        } else {
            -PIVMIN
        }
    } else {
        p
    }
}

/// ‖T q − λ q‖_∞ for the tridiagonal (d, e).
pub(crate) fn tridiag_residual(d: &[f64], e: &[f64], lambda: f64, q: &[f64]) -> f64 {
    let n = d.len();
    let mut worst = 0.0_f64;
    for i in 0..n {
        let mut acc = (d[i] - lambda) * q[i];
        if i > 0 {
            acc += e[i - 1] * q[i - 1];
        }
        if i + 1 < n {
            acc += e[i] * q[i + 1];
        }
        worst = worst.max(acc.abs());
    }
    worst
}

/// Unit eigenvector of the tridiagonal (d, e) for eigenvalue `lambda`,
/// normalized with its first component positive (sign determined exactly
/// from pivot-ratio signs, not from the possibly underflowed stored value).
pub(crate) fn twisted_eigenvector(d: &[f64], e: &[f64], lambda: f64) -> Vec<f64> {
    let n = d.len();
    if n == 1 {
        return vec![1.0];
    }

    // forward pivots of T - λI
    let mut fwd = vec![0.0; n];
    fwd[0] = d[0] - lambda;
    for i in 1..n {
        fwd[i] = (d[i] - lambda) - e[i - 1] * e[i - 1] / guard(fwd[i - 1]);
    }
    // backward pivots
    let mut bwd = vec![0.0; n];
    bwd[n - 1] = d[n - 1] - lambda;
    for i in (0..n - 1).rev() {
        bwd[i] = (d[i] - lambda) - e[i] * e[i] / guard(bwd[i + 1]);
    }
    // twist index: smallest twisted residual
    let mut kstar = 0;
    let mut best = f64::INFINITY;
    for k in 0..n {
        let gamma = (fwd[k] + bwd[k] - (d[k] - lambda)).abs();
        if gamma < best {
            best = gamma;
            kstar = k;
        }
    }

    // twisted solution in (sign, log2) representation
    let mut sign = vec![0.0_f64; n];
    let mut log2 = vec![f64::NEG_INFINITY; n];
    sign[kstar] = 1.0;
    log2[kstar] = 0.0;
    for i in (0..kstar).rev() {
        let ratio = -e[i] / guard(fwd[i]);
        if ratio == 0.0 || sign[i + 1] == 0.0 {
            sign[i] = 0.0;
        } else {
            sign[i] = sign[i + 1] * ratio.signum();
            log2[i] = log2[i + 1] + ratio.abs().log2();
        }
    }
    for i in kstar + 1..n {
        let ratio = -e[i - 1] / guard(bwd[i]);
        if ratio == 0.0 || sign[i - 1] == 0.0 {
            sign[i] = 0.0;
        } else {
            sign[i] = sign[i - 1] * ratio.signum();
            log2[i] = log2[i - 1] + ratio.abs().log2();
        }
    }

    let peak = log2.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let mut z: Vec<f64> = (0..n)
        .map(|i| {
            let ex = log2[i] - peak;
            if ex > -1000.0 {
                sign[i] * exp2i(ex.floor() as i64) * (ex - ex.floor()).exp2()
            } else {
                0.0
            }
        })
        .collect();
    let norm = z.iter().map(|x| x * x).sum::<f64>().sqrt();
    for x in &mut z {
        *x /= norm;
    }
    // First-component sign convention from the exact sign product. If the
    // first component vanished structurally (possible only with a zero
    // coupling), fall back to the first nonzero entry.
    let anchor =
        if sign[0] != 0.0 { sign[0] } else { z.iter().cloned().find(|x| *x != 0.0).unwrap_or(1.0) };
    if anchor < 0.0 {
        for x in &mut z {
            *x = -*x;
        }
    }
    z
}

/// Solves (T − λI)x = rhs by banded LU with partial pivoting. One
/// superdiagonal of fill-in appears; everything stays O(n).
pub(crate) fn solve_shifted(d: &[f64], e: &[f64], lambda: f64, rhs: &[f64]) -> Vec<f64> {
    let n = d.len();
    assert_eq!(rhs.len(), n);
    if n == 1 {
        return vec![rhs[0] / guard(d[0] - lambda)];
    }
    let mut main: Vec<f64> = d.iter().map(|&x| x - lambda).collect();
    let mut up1 = vec![0.0; n]; // first super
    let mut up2 = vec![0.0; n]; // fill-in
    up1[..n - 1].copy_from_slice(e);
    let mut low: Vec<f64> = e.to_vec();
    let mut x = rhs.to_vec();

    for i in 0..n - 1 {
        if low[i].abs() > main[i].abs() {
            // swap rows i and i+1; row i+1 reaches column i+2 at most
            x.swap(i, i + 1);
            let (old_main, old_up1, old_up2) = (main[i], up1[i], up2[i]);
            main[i] = low[i];
            up1[i] = main[i + 1];
            up2[i] = up1[i + 1];
            low[i] = old_main;
            main[i + 1] = old_up1;
            up1[i + 1] = old_up2;
        }
        let m = low[i] / guard(main[i]);
        main[i + 1] -= m * up1[i];
        up1[i + 1] -= m * up2[i];
        x[i + 1] -= m * x[i];
    }
    // back substitution
    x[n - 1] /= guard(main[n - 1]);
    x[n - 2] = (x[n - 2] - up1[n - 2] * x[n - 1]) / guard(main[n - 2]);
    for i in (0..n - 2).rev() {
        x[i] = (x[i] - up1[i] * x[i + 1] - up2[i] * x[i + 2]) / guard(main[i]);
    }
    x
}

/// Twisted eigenvector plus, if its residual is not already at rounding
/// level, a few classic inverse-iteration refinements seeded from it.
/// `scale` is an upper bound on the spectral radius.
pub(crate) fn eigenvector_at(d: &[f64], e: &[f64], scale: f64, lambda: f64) -> Vec<f64> {
    let mut z = twisted_eigenvector(d, e, lambda);
    let tol = 256.0 * f64::EPSILON * scale.max(1.0);
    for _ in 0..2 {
        if tridiag_residual(d, e, lambda, &z) <= tol {
            break;
        }
        let mut w = solve_shifted(d, e, lambda, &z);
        let norm = w.iter().map(|x| x * x).sum::<f64>().sqrt();
        if !norm.is_finite() || norm == 0.0 {
            break;
        }
        for x in &mut w {
            *x /= norm;
        }
        // keep the sign convention of the twisted seed
        let align: f64 = w.iter().zip(&z).map(|(a, b)| a * b).sum();
        if align < 0.0 {
            for x in &mut w {
                *x = -*x;
            }
        }
        z = w;
    }
    z
}
