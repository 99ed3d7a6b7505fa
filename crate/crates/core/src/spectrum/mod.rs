//! Exact per-block eigensolver.
//!
//! The primary route evaluates the orthogonal-polynomial (characteristic
//! minor) recurrence with overflow-safe scaling, isolates all eigenvalues by
//! bisection on the Sturm count inside the Gershgorin interval, and
//! reconstructs amplitudes from the minor values with log-magnitude and sign
//! tracking, falling back to inverse iteration where the forward recurrence
//! has lost accuracy. An independently implemented implicit-shift QL solver
//! provides the oracle route.

pub(crate) mod eigvec;
mod ql;
mod sturm;

pub use sturm::ScaledValue;

use crate::error::{invalid, Error, Result};
use crate::mat::Mat;
use crate::model::{
    hamiltonian_matrix, ln_factorial_table, Block, ModelParams, TridiagonalOperator,
};
use num_complex::Complex64;
use sturm::SturmKernel;

/// Which eigensolver route produced a solution.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolveMethod {
    /// Sturm-count bisection plus minor-recurrence / inverse-iteration
    /// amplitudes.
    Sturm,
    /// Implicit-shift QL cross-check route.
    Oracle,
}

/// Eigenvalues and orthonormal amplitudes of one block.
///
/// `lambdas[v]` is the v-th level (ascending; the block constant C(l₁) is
/// excluded) and `amplitudes.at(f, v)` = Q_f^v is the real-gauge amplitude
/// of |k,s;f⟩ in the v-th eigenvector, with Q_0^v > 0.
#[derive(Debug, Clone)]
pub struct SpectralSolution {
    pub block: Block,
    pub lambdas: Vec<f64>,
    pub amplitudes: Mat,
    pub method: SolveMethod,
}

impl SpectralSolution {
    pub fn dim(&self) -> usize {
        self.lambdas.len()
    }

    /// Amplitude Q_f^v in the real gauge.
    pub fn amplitude(&self, f: usize, v: usize) -> f64 {
        self.amplitudes.at(f, v)
    }

    /// Eigenvector for level v (real gauge).
    pub fn eigenvector(&self, v: usize) -> &[f64] {
        self.amplitudes.col(v)
    }

    /// Eigenvector of level v in the original (unrotated) basis: the phase
    /// of g is re-attached as the factor (g/|g|)^f on component f.
    pub fn eigenvector_original_gauge(&self, params: &ModelParams, v: usize) -> Vec<Complex64> {
        let unit = params.g_unit();
        let mut phase = Complex64::new(1.0, 0.0);
        self.eigenvector(v)
            .iter()
            .map(|&q| {
                let out = phase * q;
                phase *= unit;
                out
            })
            .collect()
    }

    /// Largest residual ‖T q_v − λ_v q_v‖_∞ over all levels.
    pub fn max_residual(&self, op: &TridiagonalOperator) -> f64 {
        (0..self.dim())
            .map(|v| op.residual(self.lambdas[v], self.eigenvector(v)))
            .fold(0.0, f64::max)
    }
}

/// Default relative tolerance of the eigenvalue bisection.
pub const DEFAULT_REL_TOL: f64 = sturm::BISECT_REL_TOL;

/// Residual threshold (relative to the Gershgorin radius) beyond which the
/// forward minor-recurrence amplitudes are considered degraded and the
/// inverse-iteration fallback is used instead.
const FORWARD_ROUTE_RESID: f64 = 64.0 * f64::EPSILON;

/// Acceptance threshold for amplitudes of a claimed eigenvalue.
const EIGENVALUE_RESID: f64 = 1e-9;

/// Scaled values of P_0..P_{s+1} at `lambda`, plus the number of eigenvalues
/// of the block Hamiltonian strictly below `lambda` (count of sign
/// agreements in the Sturm sequence).
pub fn sturm_polynomials(
    block: &Block,
    params: &ModelParams,
    lambda: f64,
) -> (Vec<ScaledValue>, usize) {
    let op = hamiltonian_matrix(block, params);
    let kernel = SturmKernel::new(&op, params);
    sturm::scaled_minor_sequence(&kernel, lambda)
}

/// All s+1 eigenvalues of the block, ascending, to relative tolerance
/// [`DEFAULT_REL_TOL`].
pub fn eigenvalues_sturm(block: &Block, params: &ModelParams) -> Result<Vec<f64>> {
    eigenvalues_sturm_tol(block, params, DEFAULT_REL_TOL)
}

/// As [`eigenvalues_sturm`] with an explicit relative tolerance.
pub fn eigenvalues_sturm_tol(
    block: &Block,
    params: &ModelParams,
    rel_tol: f64,
) -> Result<Vec<f64>> {
    if !(rel_tol > 0.0 && rel_tol < 1e-2) {
        return Err(invalid(format!("bisection tolerance out of range: {rel_tol}")));
    }
    let op = hamiltonian_matrix(block, params);
    if params.g_abs == 0.0 {
        return Ok(diagonal_spectrum(&op).0);
    }
    let (lo, hi) = op.gershgorin();
    let kernel = SturmKernel::new(&op, params);
    sturm::bisect_all(&kernel, lo, hi, rel_tol)
}

/// Sorted eigenvalues and permutation eigenvectors of a diagonal block
/// (g = 0). The diagonal Δ(l₀+f) is monotone in f, so this is a forward or
/// reversed identity.
fn diagonal_spectrum(op: &TridiagonalOperator) -> (Vec<f64>, Mat) {
    let n = op.dim();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| {
        op.diag[a].partial_cmp(&op.diag[b]).expect("finite diagonal").then(a.cmp(&b))
    });
    let lambdas: Vec<f64> = order.iter().map(|&f| op.diag[f]).collect();
    let mut q = Mat::zeros(n);
    for (v, &f) in order.iter().enumerate() {
        q.set(f, v, 1.0);
    }
    (lambdas, q)
}

/// Amplitudes Q_f for one converged eigenvalue: minor-recurrence
/// reconstruction Q_f ∝ N(f;k,s)·P_f(λ) in log space, with inverse-iteration
/// fallback when the forward recurrence has degraded. Rejects `lambda_v`
/// values that are not eigenvalues (residual check).
pub fn amplitudes_from_lambda(
    block: &Block,
    params: &ModelParams,
    lambda_v: f64,
) -> Result<Vec<f64>> {
    if !lambda_v.is_finite() {
        return Err(invalid("eigenvalue must be finite"));
    }
    let op = hamiltonian_matrix(block, params);
    let kernel = SturmKernel::new(&op, params);
    let q = amplitudes_internal(&op, &kernel, lambda_v);
    let scale = op.radius().max(1.0);
    let resid = op.residual(lambda_v, &q);
    if resid > EIGENVALUE_RESID * scale.max(lambda_v.abs()) {
        return Err(invalid(format!(
            "lambda = {lambda_v} is not an eigenvalue of the block (residual {resid:.3e})"
        )));
    }
    Ok(q)
}

/// ln N(f;k,s), the normalization relating minor values to amplitudes:
/// N(f)² = k!(s−f)! / ((k+2f)!·s!), i.e. 1/N(f)² = ∏_{i=1..f} ψ(l₀+i).
fn log_norm_table(block: &Block) -> Vec<f64> {
    let k = block.k();
    let s = block.s();
    let lf = ln_factorial_table(k + 2 * s + 1);
    (0..=s).map(|f| 0.5 * (lf[k] + lf[s - f] - lf[k + 2 * f] - lf[s])).collect()
}

fn amplitudes_internal(op: &TridiagonalOperator, kernel: &SturmKernel, lambda: f64) -> Vec<f64> {
    let n = op.dim();
    if n == 1 {
        return vec![1.0];
    }
    let scale = op.radius().max(1.0);
    if op.offdiag[0] == 0.0 {
        // zero coupling: eigenvectors are basis vectors
        return eigvec::eigenvector_at(&op.diag, &op.offdiag, scale, lambda);
    }

    // forward route: Q_f ∝ N(f) P_f(λ), assembled in log2 magnitude + sign
    let (p, _) = sturm::scaled_minor_sequence(kernel, lambda);
    let log_n = log_norm_table(&op.block);
    let log2_e = std::f64::consts::LOG2_E;
    let mut log2w = vec![f64::NEG_INFINITY; n];
    let mut signw = vec![0.0; n];
    let mut peak = f64::NEG_INFINITY;
    for f in 0..n {
        let lw = p[f].log2_abs() + log_n[f] * log2_e;
        log2w[f] = lw;
        signw[f] = p[f].signum();
        peak = peak.max(lw);
    }
    let mut q: Vec<f64> = (0..n)
        .map(|f| {
            let e = log2w[f] - peak;
            if e > -1000.0 {
                signw[f] * e.exp2()
            } else {
                0.0
            }
        })
        .collect();
    let norm = q.iter().map(|x| x * x).sum::<f64>().sqrt();
    for x in &mut q {
        *x /= norm;
    }
    if op.residual(lambda, &q) <= FORWARD_ROUTE_RESID * scale {
        return q;
    }
    eigvec::eigenvector_at(&op.diag, &op.offdiag, scale, lambda)
}

/// Solves the full per-block eigenproblem.
///
/// `SolveMethod::Sturm` composes bisection eigenvalues with per-level
/// amplitude reconstruction; `SolveMethod::Oracle` runs the independent QL
/// route. Both satisfy the same orthonormality, residual, ordering and sign
/// contracts.
pub fn solve(block: &Block, params: &ModelParams, method: SolveMethod) -> Result<SpectralSolution> {
    let op = hamiltonian_matrix(block, params);
    if params.g_abs == 0.0 {
        let (lambdas, amplitudes) = diagonal_spectrum(&op);
        return Ok(SpectralSolution { block: *block, lambdas, amplitudes, method });
    }
    match method {
        SolveMethod::Sturm => {
            let lambdas = eigenvalues_sturm(block, params)?;
            let kernel = SturmKernel::new(&op, params);
            let scale = op.radius().max(1.0);
            let cols: Vec<Vec<f64>> = lambdas
                .iter()
                .map(|&lam| {
                    let q = amplitudes_internal(&op, &kernel, lam);
                    let resid = op.residual(lam, &q);
                    if resid > EIGENVALUE_RESID * scale {
                        return Err(Error::Convergence(format!(
                            "amplitude residual {resid:.3e} too large at lambda = {lam}"
                        )));
                    }
                    Ok(q)
                })
                .collect::<Result<_>>()?;
            Ok(SpectralSolution {
                block: *block,
                lambdas,
                amplitudes: Mat::from_columns(cols),
                method,
            })
        }
        SolveMethod::Oracle => {
            let (lambdas, amplitudes) = ql::ql_implicit_shift(&op.diag, &op.offdiag)?;
            Ok(SpectralSolution { block: *block, lambdas, amplitudes, method })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn resonant(g: f64) -> ModelParams {
        ModelParams::resonant(g, 0.0).unwrap()
    }

    #[test]
    fn eigenvalues_two_level() {
        let block = Block::new(0, 1).unwrap();
        let lams = eigenvalues_sturm(&block, &resonant(1.0)).unwrap();
        let r2 = 2.0_f64.sqrt();
        assert!((lams[0] + r2).abs() < 1e-13);
        assert!((lams[1] - r2).abs() < 1e-13);

        let block = Block::new(1, 1).unwrap();
        let lams = eigenvalues_sturm(&block, &resonant(1.0)).unwrap();
        let r6 = 6.0_f64.sqrt();
        assert!((lams[0] + r6).abs() < 1e-13);
        assert!((lams[1] - r6).abs() < 1e-13);
    }

    #[test]
    fn eigenvalues_three_level() {
        let block = Block::new(0, 2).unwrap();
        let lams = eigenvalues_sturm(&block, &resonant(1.0)).unwrap();
        assert!((lams[0] + 4.0).abs() < 1e-12);
        assert!(lams[1].abs() < 1e-12);
        assert!((lams[2] - 4.0).abs() < 1e-12);
    }

    #[test]
    fn single_level_block() {
        let block = Block::new(0, 0).unwrap();
        let params = ModelParams::with_delta(2.4, 1.0, 0.0).unwrap();
        let sol = solve(&block, &params, SolveMethod::Sturm).unwrap();
        assert_eq!(sol.lambdas.len(), 1);
        assert!((sol.lambdas[0] - 2.4 * block.l0()).abs() < 1e-15);
        assert_eq!(sol.amplitudes.at(0, 0), 1.0);
    }

    #[test]
    fn amplitudes_examples() {
        let block = Block::new(0, 1).unwrap();
        let p = resonant(1.0);
        let r2 = 2.0_f64.sqrt();
        let inv = 1.0 / r2;
        let plus = amplitudes_from_lambda(&block, &p, r2).unwrap();
        assert!((plus[0] - inv).abs() < 1e-12 && (plus[1] - inv).abs() < 1e-12);
        let minus = amplitudes_from_lambda(&block, &p, -r2).unwrap();
        assert!((minus[0] - inv).abs() < 1e-12 && (minus[1] + inv).abs() < 1e-12);

        let block = Block::new(0, 2).unwrap();
        let zero_mode = amplitudes_from_lambda(&block, &p, 0.0).unwrap();
        let expect = [3.0_f64.sqrt() / 2.0, 0.0, -0.5];
        for (a, e) in zero_mode.iter().zip(expect) {
            assert!((a - e).abs() < 1e-13);
        }

        // not an eigenvalue
        assert!(amplitudes_from_lambda(&block, &p, 1.0).is_err());
    }

    #[test]
    fn sturm_polynomial_examples() {
        let block = Block::new(0, 1).unwrap();
        let p = resonant(1.0);
        let (seq, count) = sturm_polynomials(&block, &p, 0.0);
        let vals: Vec<f64> = seq.iter().map(|s| s.value()).collect();
        assert_eq!(vals, vec![1.0, 0.0, -2.0]);
        assert_eq!(count, 1);

        let block = Block::new(0, 2).unwrap();
        let (_, count) = sturm_polynomials(&block, &p, 5.0);
        assert_eq!(count, 3);
    }

    #[test]
    fn reference_multiplet_edges() {
        // k=0, s=100, resonance, g=1: the reference multiplet's edge and
        // middle levels, ±0.1.
        let block = Block::new(0, 100).unwrap();
        let lams = eigenvalues_sturm(&block, &resonant(1.0)).unwrap();
        assert!((lams[0] + 1536.9).abs() <= 0.1, "lambda_0 = {}", lams[0]);
        assert!(lams[50].abs() <= 1e-9, "lambda_50 = {}", lams[50]);
        assert!((lams[100] - 1536.9).abs() <= 0.1, "lambda_100 = {}", lams[100]);
    }

    #[test]
    fn solution_contract_moderate_sizes() {
        for &(k, s, delta, g) in
            &[(0usize, 5usize, 0.0, 1.0), (1, 17, 1.7, 0.3), (0, 40, -1.7, 2.0), (1, 100, 0.0, 1.0)]
        {
            let block = Block::new(k, s).unwrap();
            let params = ModelParams::with_delta(delta, g, 0.0).unwrap();
            let op = hamiltonian_matrix(&block, &params);
            let sol = solve(&block, &params, SolveMethod::Sturm).unwrap();

            for v in 1..sol.dim() {
                assert!(sol.lambdas[v] > sol.lambdas[v - 1], "ascending order k={k} s={s}");
            }
            let max_abs = sol.lambdas.iter().fold(0.0_f64, |m, &x| m.max(x.abs()));
            assert!(sol.max_residual(&op) <= 1e-9 * max_abs.max(1.0), "residual bound k={k} s={s}");
            assert!(sol.amplitudes.orthonormality_defect() <= 1e-10, "orthonormality k={k} s={s}");
            assert!(sol.amplitudes.completeness_defect() <= 1e-10, "completeness k={k} s={s}");
            for v in 0..sol.dim() {
                assert!(sol.amplitude(0, v) >= 0.0, "sign convention k={k} s={s} v={v}");
            }
        }
    }

    #[test]
    fn oracle_agrees_with_sturm() {
        for &(k, s, delta, g) in &[(0usize, 30usize, 0.0, 1.0), (1, 55, -1.7, 0.3)] {
            let block = Block::new(k, s).unwrap();
            let params = ModelParams::with_delta(delta, g, 0.0).unwrap();
            let a = solve(&block, &params, SolveMethod::Sturm).unwrap();
            let b = solve(&block, &params, SolveMethod::Oracle).unwrap();
            let radius = hamiltonian_matrix(&block, &params).radius();
            for v in 0..a.dim() {
                assert!(
                    (a.lambdas[v] - b.lambdas[v]).abs() <= 1e-10 * radius,
                    "eigenvalue mismatch k={k} s={s} v={v}"
                );
                let dot: f64 =
                    a.eigenvector(v).iter().zip(b.eigenvector(v)).map(|(x, y)| x * y).sum();
                let sign = if dot < 0.0 { -1.0 } else { 1.0 };
                let dev = a
                    .eigenvector(v)
                    .iter()
                    .zip(b.eigenvector(v))
                    .map(|(x, y)| (x - sign * y).abs())
                    .fold(0.0, f64::max);
                assert!(dev <= 1e-8, "eigenvector mismatch k={k} s={s} v={v}: {dev}");
            }
        }
    }

    #[test]
    fn resonance_antisymmetry_and_zero_mode() {
        let block = Block::new(0, 50).unwrap();
        let params = resonant(1.3);
        let sol = solve(&block, &params, SolveMethod::Sturm).unwrap();
        let s = block.s();
        let max_abs = sol.lambdas.iter().fold(0.0_f64, |m, &x| m.max(x.abs()));
        for v in 0..=s {
            assert!(
                (sol.lambdas[v] + sol.lambdas[s - v]).abs() <= 1e-9 * max_abs,
                "antisymmetry v={v}"
            );
        }
        // even s: exact zero in the middle
        assert!(sol.lambdas[s / 2].abs() <= 1e-9 * max_abs);
        // D T D = -T implies Q_f^{s-v} = (-1)^f Q_f^v with the Q_0 > 0 convention
        for v in 0..=s {
            for f in 0..=s {
                let expect = if f % 2 == 0 { 1.0 } else { -1.0 } * sol.amplitude(f, v);
                assert!(
                    (sol.amplitude(f, s - v) - expect).abs() <= 1e-8,
                    "amplitude mirror v={v} f={f}"
                );
            }
        }
    }

    #[test]
    fn scaling_covariance() {
        let block = Block::new(1, 24).unwrap();
        let base = solve(&block, &resonant(1.0), SolveMethod::Sturm).unwrap();
        let c = 3.7;
        let scaled = solve(&block, &resonant(c), SolveMethod::Sturm).unwrap();
        for v in 0..base.dim() {
            let want = c * base.lambdas[v];
            if want.abs() > 1e-12 {
                assert!(
                    ((scaled.lambdas[v] - want) / want).abs() <= 1e-12,
                    "eigenvalue scaling v={v}"
                );
            } else {
                assert!(scaled.lambdas[v].abs() <= 1e-10);
            }
            for f in 0..base.dim() {
                assert!(
                    (scaled.amplitude(f, v) - base.amplitude(f, v)).abs() <= 1e-9,
                    "amplitudes unchanged under coupling scaling"
                );
            }
        }
    }

    #[test]
    fn interlacing_with_principal_submatrix() {
        // Eigenvalues of the leading s x s principal submatrix strictly
        // interlace the full spectrum (Sturm-sequence correctness).
        let block = Block::new(0, 31).unwrap();
        let params = ModelParams::with_delta(0.9, 1.1, 0.0).unwrap();
        let op = hamiltonian_matrix(&block, &params);
        let full = eigenvalues_sturm(&block, &params).unwrap();
        let (sub_l, _) =
            ql::ql_implicit_shift(&op.diag[..op.dim() - 1], &op.offdiag[..op.dim() - 2]).unwrap();
        for i in 0..sub_l.len() {
            assert!(full[i] < sub_l[i] && sub_l[i] < full[i + 1], "interlacing violated at {i}");
        }
    }

    #[test]
    fn zero_coupling_block() {
        let block = Block::new(0, 6).unwrap();
        let params = ModelParams::with_delta(-2.0, 0.0, 0.0).unwrap();
        let sol = solve(&block, &params, SolveMethod::Sturm).unwrap();
        // diag = -2(l0+f) is decreasing, so eigenvalues are the reversed diagonal
        for v in 1..sol.dim() {
            assert!(sol.lambdas[v] > sol.lambdas[v - 1]);
        }
        assert!(sol.amplitudes.orthonormality_defect() == 0.0);
    }

    #[test]
    fn original_gauge_phase_reattachment() {
        let block = Block::new(0, 3).unwrap();
        let phase = 0.77;
        let params = ModelParams::resonant(1.0, phase).unwrap();
        let sol = solve(&block, &params, SolveMethod::Sturm).unwrap();
        let vec0 = sol.eigenvector_original_gauge(&params, 0);
        for (f, z) in vec0.iter().enumerate() {
            let expect = Complex64::from_polar(1.0, phase * f as f64) * sol.amplitude(f, 0);
            assert!((z - expect).norm() < 1e-14);
        }
        // phase-free spectra: eigenvalues must not depend on the phase
        let plain =
            solve(&block, &ModelParams::resonant(1.0, 0.0).unwrap(), SolveMethod::Sturm).unwrap();
        for v in 0..sol.dim() {
            assert!((sol.lambdas[v] - plain.lambdas[v]).abs() < 1e-13);
        }
    }
}
