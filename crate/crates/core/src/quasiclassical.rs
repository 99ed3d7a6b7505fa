//! SU(2)-quasiclassical approximation: Wigner d-function eigenvectors and
//! cluster mean-field eigenvalue estimates.
//!
//! On a block L(k,s) the approximate eigenvectors are columns of a spin-j
//! rotation, S[f][v] = d^j_{−j+f, −j+v}(2r) with j = s/2, and the
//! approximate eigenvalues come either from the full quadratic form
//! (λ^qc, exact congruence with the tridiagonal Hamiltonian) or from the
//! closed-form cluster mean-field expression (λ^cmf). The fitting angle 2r
//! is chosen per strategy; the adopted cos 2r signs are the ones that
//! reproduce the reference multiplets (see `AngleStrategy`).

use num_complex::Complex64;

use crate::error::{invalid, Result};
use crate::mat::Mat;
use crate::model::{Block, ModelParams};
use crate::spectrum::eigvec;

/// Fitting-angle strategy for the quasiclassical map.
///
/// The per-level cos 2r assignments are:
///
/// * `R1` — +1/3 for every level (energy stationarity, tuned to the upper
///   part of the spectrum);
/// * `MpR1` — −1/3 for the lower half of the spectrum (v < ⌈(s+1)/2⌉),
///   +1/3 for the rest; mixes two angles, so it carries no eigenvector set;
/// * `R2` — −1/√s (the "smooth" fit minimizing the global Hamiltonian
///   proximity measure);
/// * `R3` — 0, the quasi-linear map with an exactly equidistant λ^cmf
///   spectrum;
/// * `Explicit(c)` — a caller-chosen cos 2r ∈ [−1, 1] (e.g. +1/√s to probe
///   the opposite sign convention).
///
/// sin 2r = +√(1 − cos²2r) throughout.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum AngleStrategy {
    R1,
    MpR1,
    R2,
    R3,
    Explicit(f64),
}

impl AngleStrategy {
    /// cos 2r for level v of the given block.
    pub fn cos2r(&self, block: &Block, v: usize) -> f64 {
        match self {
            AngleStrategy::R1 => 1.0 / 3.0,
            AngleStrategy::MpR1 => {
                if v < block.dim().div_ceil(2) {
                    -1.0 / 3.0
                } else {
                    1.0 / 3.0
                }
            }
            AngleStrategy::R2 => {
                if block.s() == 0 {
                    0.0
                } else {
                    -1.0 / (block.s() as f64).sqrt()
                }
            }
            AngleStrategy::R3 => 0.0,
            AngleStrategy::Explicit(c) => *c,
        }
    }

    /// The single cos 2r shared by all levels, or `None` for `MpR1`.
    pub fn uniform_cos2r(&self, block: &Block) -> Option<f64> {
        match self {
            AngleStrategy::MpR1 => None,
            _ => Some(self.cos2r(block, 0)),
        }
    }

    pub fn label(&self) -> &'static str {
        match self {
            AngleStrategy::R1 => "r1",
            AngleStrategy::MpR1 => "mp_r1",
            AngleStrategy::R2 => "r2",
            AngleStrategy::R3 => "r3",
            AngleStrategy::Explicit(_) => "explicit",
        }
    }

    fn validate(&self) -> Result<()> {
        if let AngleStrategy::Explicit(c) = self {
            if !(-1.0..=1.0).contains(c) || !c.is_finite() {
                return Err(invalid(format!("explicit cos 2r must lie in [-1, 1], got {c}")));
            }
        }
        Ok(())
    }
}

/// Quasiclassical approximation of one block under one strategy.
#[derive(Debug, Clone)]
pub struct QCApproximation {
    pub block: Block,
    pub strategy: AngleStrategy,
    pub lambdas_cmf: Vec<f64>,
    /// Full quadratic-form eigenvalues; absent for `MpR1`.
    pub lambdas_qc: Option<Vec<f64>>,
    /// d-function eigenvector matrix S[f][v] in the real gauge; absent for
    /// `MpR1`, whose two-angle column set would not be orthogonal.
    pub eigvectors: Option<Mat>,
}

impl QCApproximation {
    /// Column v in the original basis, with the complex gauge factor
    /// (g/|g|)^{f−v} re-attached.
    pub fn eigvector_original_gauge(
        &self,
        params: &ModelParams,
        v: usize,
    ) -> Option<Vec<Complex64>> {
        let s = self.eigvectors.as_ref()?;
        let unit = params.g_unit();
        Some(
            s.col(v).iter().enumerate().map(|(f, &x)| unit.powi(f as i32 - v as i32) * x).collect(),
        )
    }
}

/// Wigner d-matrix d^j_{m,n}(β) for 2j = `two_j`, rows indexed by
/// m = −j..j (row f ↔ m = −j+f) and columns by n = −j..j.
///
/// Columns are computed as eigenvectors of cos β·J_z + sin β·J_x, whose
/// eigenvalue for column n is exactly n; this avoids the catastrophic
/// cancellation of the hypergeometric sum at large j. Signs follow the
/// closed-form top row, sign(d^j_{j,n}) = (−1)^{j−n} for β ∈ (0, π), which
/// is equivalent to an all-positive bottom row (m = −j). Outside [0, π] the
/// matrix is reduced via d(−β) = d(β)ᵀ and d(β+2π) = (−1)^{2j} d(β).
pub fn wigner_d_matrix(two_j: usize, beta: f64) -> Mat {
    use std::f64::consts::PI;
    let n = two_j + 1;
    // reduce to (-π, π], tracking the 2π-turn sign for half-integer j
    let turns = ((beta - PI) / (2.0 * PI)).ceil();
    let reduced = beta - 2.0 * PI * turns;
    let turn_sign =
        if !two_j.is_multiple_of(2) && (turns as i64).rem_euclid(2) == 1 { -1.0 } else { 1.0 };

    let signed = |mut m: Mat| {
        if turn_sign < 0.0 {
            for v in 0..n {
                m.scale_col(v, -1.0);
            }
        }
        m
    };

    if reduced == 0.0 {
        return signed(Mat::identity(n));
    }
    if reduced < 0.0 {
        // turn sign commutes with transposition
        return signed(wigner_d_matrix(two_j, -reduced).transpose());
    }
    if reduced == PI {
        // d^j_{m,n}(π) = (−1)^{j−n} δ_{m,−n}
        let mut m = Mat::zeros(n);
        for v in 0..n {
            let sign = if (two_j - v).is_multiple_of(2) { 1.0 } else { -1.0 };
            m.set(two_j - v, v, sign);
        }
        return signed(m);
    }

    let (sin_b, cos_b) = reduced.sin_cos();
    // M = cosβ Jz + sinβ Jx in the m-basis
    let diag: Vec<f64> = (0..n).map(|f| 0.5 * (2.0 * f as f64 - two_j as f64) * cos_b).collect();
    let off: Vec<f64> =
        (0..two_j).map(|f| 0.5 * sin_b * (((f + 1) * (two_j - f)) as f64).sqrt()).collect();
    let scale = 0.5 * two_j as f64 + 1.0;
    let cols: Vec<Vec<f64>> = (0..n)
        .map(|v| {
            let mu = 0.5 * (2.0 * v as f64 - two_j as f64); // exact eigenvalue n = v - j
            let mut col = eigvec::eigenvector_at(&diag, &off, scale, mu);
            if turn_sign < 0.0 {
                for x in &mut col {
                    *x = -*x;
                }
            }
            col
        })
        .collect();
    Mat::from_columns(cols)
}

/// d-function eigenvector matrix S[f][v] = d^j_{−j+f,−j+v}(2r) for a
/// single-angle strategy (real gauge; the complex factor (g/|g|)^{f−v} is
/// attached only on export). `MpR1` is rejected: its two angles would
/// produce a non-orthogonal column set.
pub fn qc_eigvectors(
    block: &Block,
    _params: &ModelParams,
    strategy: &AngleStrategy,
) -> Result<Mat> {
    strategy.validate()?;
    let cos2r = strategy
        .uniform_cos2r(block)
        .ok_or_else(|| invalid("mixed-angle strategy mp_r1 has no single eigenvector set"))?;
    Ok(wigner_d_matrix(block.s(), cos2r.acos()))
}

/// Cluster mean-field eigenvalues
/// λ^cmf_v = Δ[j+l₀ − (j−v)cos2r_v] − 2|g|(j−v)·sin2r_v·√(2[s+2k+1+(−s+2v)cos2r_v]).
///
/// The radicand is positive for every |cos 2r| ≤ 1 (it is bounded below by
/// 2(2k+1)); it is still clamped at zero with a diagnostic in case that
/// bound is ever violated.
pub fn lambda_cmf(block: &Block, params: &ModelParams, strategy: &AngleStrategy) -> Vec<f64> {
    let delta = params.delta();
    let j = block.j();
    let l0 = block.l0();
    let s = block.s() as f64;
    let k = block.k() as f64;
    (0..block.dim())
        .map(|v| {
            let c = strategy.cos2r(block, v);
            let sn = (1.0 - c * c).max(0.0).sqrt();
            let vf = v as f64;
            let mut radicand = 2.0 * (s + 2.0 * k + 1.0 + (-s + 2.0 * vf) * c);
            if radicand < 0.0 {
                log::warn!(
                    "cmf radicand {radicand:.3e} clamped to 0 at v={v} (cos2r={c}); \
                     check the angle strategy"
                );
                radicand = 0.0;
            }
            delta * (j + l0 - (j - vf) * c) - 2.0 * params.g_abs * (j - vf) * sn * radicand.sqrt()
        })
        .collect()
}

/// Full quasiclassical eigenvalues for one shared angle:
/// λ^qc_v = Δ[j+l₀ − (j−v)cos2r] + 2|g| Σ_f √((s−f)(f+1)·2(2k+1+2f))·S_f^v·S_{f+1}^v,
/// the sum running over f = 0..s−1 in ascending order (the f = s term
/// vanishes identically).
pub fn lambda_qc(block: &Block, params: &ModelParams, cos2r: f64) -> Result<Vec<f64>> {
    AngleStrategy::Explicit(cos2r).validate()?;
    let s_mat = wigner_d_matrix(block.s(), cos2r.acos());
    Ok(lambda_qc_with_vectors(block, params, cos2r, &s_mat))
}

fn lambda_qc_with_vectors(
    block: &Block,
    params: &ModelParams,
    cos2r: f64,
    s_mat: &Mat,
) -> Vec<f64> {
    let delta = params.delta();
    let j = block.j();
    let l0 = block.l0();
    let s = block.s();
    let k = block.k() as i64;
    // √((s−f)(f+1)·2(2k+1+2f)) = b_f/|g| by the exact integer factorization
    // (f+1)·2(2k+1+2f) = (k+2f+1)(k+2f+2)
    let coeff: Vec<f64> = (0..s)
        .map(|f| {
            let fi = f as i64;
            (((s - f) as i64 * (fi + 1) * 2 * (2 * k + 1 + 2 * fi)) as f64).sqrt()
        })
        .collect();
    (0..block.dim())
        .map(|v| {
            let col = s_mat.col(v);
            let mut sum = 0.0;
            for f in 0..s {
                sum += coeff[f] * col[f] * col[f + 1];
            }
            delta * (j + l0 - (j - v as f64) * cos2r) + 2.0 * params.g_abs * sum
        })
        .collect()
}

/// Assembles the quasiclassical approximation of a block: λ^cmf always,
/// λ^qc and the eigenvector matrix when the strategy has a single angle.
pub fn qc_approximation(
    block: &Block,
    params: &ModelParams,
    strategy: &AngleStrategy,
) -> Result<QCApproximation> {
    strategy.validate()?;
    let lambdas_cmf = lambda_cmf(block, params, strategy);
    let (lambdas_qc, eigvectors) = match strategy.uniform_cos2r(block) {
        Some(c) => {
            let s_mat = wigner_d_matrix(block.s(), c.acos());
            let qc = lambda_qc_with_vectors(block, params, c, &s_mat);
            (Some(qc), Some(s_mat))
        }
        None => (None, None),
    };
    Ok(QCApproximation { block: *block, strategy: *strategy, lambdas_cmf, lambdas_qc, eigvectors })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::hamiltonian_matrix;
    use crate::spectrum::{solve, SolveMethod};
    use std::f64::consts::PI;

    fn mat_mul(a: &Mat, b: &Mat) -> Mat {
        let n = a.dim();
        let mut out = Mat::zeros(n);
        for c in 0..n {
            for r in 0..n {
                let mut acc = 0.0;
                for i in 0..n {
                    acc += a.at(r, i) * b.at(i, c);
                }
                out.set(r, c, acc);
            }
        }
        out
    }

    /// Brute-force d-matrix through the series exponential of the real
    /// antisymmetric generator βG, G = −iJ_y (scaling and squaring).
    /// Independent of the eigenvector route; usable up to j ≈ 10.
    fn d_matrix_expm(two_j: usize, beta: f64) -> Mat {
        let n = two_j + 1;
        let mut gen = Mat::zeros(n);
        for f in 0..two_j {
            let c = 0.5 * (((f + 1) * (two_j - f)) as f64).sqrt();
            gen.set(f + 1, f, -c * beta);
            gen.set(f, f + 1, c * beta);
        }
        let k = 12;
        let scale = (2.0_f64).powi(-k);
        let mut scaled = Mat::zeros(n);
        for c in 0..n {
            for r in 0..n {
                scaled.set(r, c, gen.at(r, c) * scale);
            }
        }
        let mut term = Mat::identity(n);
        let mut result = Mat::identity(n);
        for order in 1..=24 {
            term = mat_mul(&term, &scaled);
            let inv = 1.0 / order as f64;
            for c in 0..n {
                for r in 0..n {
                    term.set(r, c, term.at(r, c) * inv);
                    result.set(r, c, result.at(r, c) + term.at(r, c));
                }
            }
        }
        for _ in 0..k {
            result = mat_mul(&result, &result);
        }
        result
    }

    fn max_abs_diff(a: &Mat, b: &Mat) -> f64 {
        let mut worst = 0.0_f64;
        for c in 0..a.dim() {
            for r in 0..a.dim() {
                worst = worst.max((a.at(r, c) - b.at(r, c)).abs());
            }
        }
        worst
    }

    #[test]
    fn identity_at_zero_angle() {
        for two_j in [0, 1, 2, 7, 40] {
            assert_eq!(wigner_d_matrix(two_j, 0.0), Mat::identity(two_j + 1));
        }
    }

    #[test]
    fn spin_half_rotation() {
        let d = wigner_d_matrix(1, PI / 2.0);
        let c = (PI / 4.0).cos();
        // rows m = -1/2, +1/2; columns n = -1/2, +1/2
        assert!((d.at(0, 0) - c).abs() < 1e-14);
        assert!((d.at(0, 1) - c).abs() < 1e-14);
        assert!((d.at(1, 0) + c).abs() < 1e-14);
        assert!((d.at(1, 1) - c).abs() < 1e-14);
    }

    #[test]
    fn spin_one_half_turn() {
        let d = wigner_d_matrix(2, PI);
        // d^1_{1,-1}(π) = 1 (row f=2, col v=0), d^1_{0,0}(π) = -1
        assert_eq!(d.at(2, 0), 1.0);
        assert_eq!(d.at(1, 1), -1.0);
        assert_eq!(d.at(0, 2), 1.0);
        assert_eq!(d.at(0, 0), 0.0);
    }

    #[test]
    fn matches_series_exponential_oracle() {
        for &(two_j, beta) in &[(1, 0.8), (4, 1.3), (9, 2.2), (20, 0.5)] {
            let fast = wigner_d_matrix(two_j, beta);
            let slow = d_matrix_expm(two_j, beta);
            let dev = max_abs_diff(&fast, &slow);
            assert!(dev < 1e-12, "2j={two_j} beta={beta}: dev {dev}");
        }
    }

    #[test]
    fn transpose_relation_and_composition() {
        let two_j = 100; // j = 50
        let b1 = 1.1;
        let b2 = 0.7;
        let d1 = wigner_d_matrix(two_j, b1);
        assert!(max_abs_diff(&wigner_d_matrix(two_j, -b1), &d1.transpose()) < 1e-12);

        let d2 = wigner_d_matrix(two_j, b2);
        let d12 = wigner_d_matrix(two_j, b1 + b2);
        assert!(max_abs_diff(&mat_mul(&d1, &d2), &d12) <= 1e-10, "composition within range");

        // composition crossing the β = π boundary
        let b3 = 2.5;
        let d3 = wigner_d_matrix(two_j, b3);
        let d13 = wigner_d_matrix(two_j, b1 + b3); // 3.6 > π
        assert!(max_abs_diff(&mat_mul(&d1, &d3), &d13) <= 1e-10, "composition beyond pi");
    }

    #[test]
    fn half_integer_full_turn_sign() {
        // d(β + 2π) = −d(β) for half-integer j
        let d = wigner_d_matrix(1, 0.9);
        let d_turn = wigner_d_matrix(1, 0.9 + 2.0 * PI);
        for c in 0..2 {
            for r in 0..2 {
                assert!((d_turn.at(r, c) + d.at(r, c)).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn orthogonality_and_sign_anchors() {
        for &(two_j, beta) in &[(11, 0.4), (100, 1.671), (100, 2.9)] {
            let d = wigner_d_matrix(two_j, beta);
            assert!(d.orthonormality_defect() <= 1e-10, "2j={two_j}");
            for v in 0..=two_j {
                assert!(d.at(0, v) > 0.0, "bottom row positive, 2j={two_j} v={v}");
                let want = if (two_j - v) % 2 == 0 { 1.0 } else { -1.0 };
                let top = d.at(two_j, v);
                assert!(top == 0.0 || top.signum() == want, "top-row sign 2j={two_j} v={v}: {top}");
            }
        }
    }

    #[test]
    fn qc_eigvectors_strategies() {
        let block = Block::new(0, 1).unwrap();
        let params = ModelParams::resonant(1.0, 0.0).unwrap();
        // explicit cos2r = 1 means 2r = 0: identity
        let s = qc_eigvectors(&block, &params, &AngleStrategy::Explicit(1.0)).unwrap();
        assert_eq!(s, Mat::identity(2));
        // 2r = π/2 on s=1 is the two-level rotation by π/4
        let s = qc_eigvectors(&block, &params, &AngleStrategy::Explicit(0.0)).unwrap();
        let c = (PI / 4.0).cos();
        assert!((s.at(0, 0) - c).abs() < 1e-14);
        assert!((s.at(1, 0) + c).abs() < 1e-14);
        // mp_r1 has no single-angle eigenvector set
        assert!(qc_eigvectors(&block, &params, &AngleStrategy::MpR1).is_err());
        // out-of-range explicit angle
        assert!(qc_eigvectors(&block, &params, &AngleStrategy::Explicit(1.5)).is_err());
    }

    #[test]
    fn cmf_reference_multiplet_entries() {
        // k=0, s=100, resonance, g=1: spot entries of the reference
        // multiplets at level step 10, ±0.2.
        let block = Block::new(0, 100).unwrap();
        let params = ModelParams::resonant(1.0, 0.0).unwrap();
        let checks: &[(AngleStrategy, usize, f64)] = &[
            (AngleStrategy::R1, 0, -1096.7),
            (AngleStrategy::R1, 40, -259.0),
            (AngleStrategy::R1, 100, 1545.3),
            (AngleStrategy::MpR1, 0, -1545.3),
            (AngleStrategy::MpR1, 10, -1205.2),
            (AngleStrategy::MpR1, 60, 276.7),
            (AngleStrategy::R2, 0, -1482.4),
            (AngleStrategy::R2, 60, 280.0),
            (AngleStrategy::R2, 100, 1342.3),
            (AngleStrategy::R3, 0, -1421.2),
            (AngleStrategy::R3, 90, 1137.0),
        ];
        for (strategy, v, want) in checks {
            let got = lambda_cmf(&block, &params, strategy)[*v];
            assert!(
                (got - want).abs() <= 0.2,
                "{} v={v}: got {got:.2}, want {want}",
                strategy.label()
            );
        }
    }

    #[test]
    fn cmf_quasilinear_is_equidistant() {
        let block = Block::new(0, 100).unwrap();
        let params = ModelParams::resonant(1.0, 0.0).unwrap();
        let cmf = lambda_cmf(&block, &params, &AngleStrategy::R3);
        let step = cmf[1] - cmf[0];
        for w in cmf.windows(2) {
            assert!((w[1] - w[0] - step).abs() < 1e-9, "equidistant spectrum");
        }
        // middle level vanishes for every strategy at resonance
        for strategy in
            [AngleStrategy::R1, AngleStrategy::MpR1, AngleStrategy::R2, AngleStrategy::R3]
        {
            assert_eq!(lambda_cmf(&block, &params, &strategy)[50], 0.0);
        }
    }

    #[test]
    fn qc_reduces_to_detuning_ladder_at_zero_angle() {
        let block = Block::new(1, 8).unwrap();
        let params = ModelParams::with_delta(1.3, 0.9, 0.0).unwrap();
        let qc = lambda_qc(&block, &params, 1.0).unwrap(); // cos2r = 1 → 2r = 0
        let cmf = lambda_cmf(&block, &params, &AngleStrategy::Explicit(1.0));
        for v in 0..block.dim() {
            let want = params.delta() * (block.l0() + v as f64);
            assert!((qc[v] - want).abs() < 1e-12, "qc ladder v={v}");
            assert!((cmf[v] - want).abs() < 1e-12, "cmf ladder v={v}");
        }
    }

    #[test]
    fn qc_exact_for_two_level_block() {
        let block = Block::new(0, 1).unwrap();
        let params = ModelParams::resonant(1.0, 0.0).unwrap();
        let qc = lambda_qc(&block, &params, 0.0).unwrap();
        let r2 = 2.0_f64.sqrt();
        assert!((qc[0] + r2).abs() < 1e-13);
        assert!((qc[1] - r2).abs() < 1e-13);
    }

    #[test]
    fn qc_congruence_with_quadratic_form() {
        for &s in &[1_usize, 20, 100] {
            let block = Block::new(0, s).unwrap();
            let params = ModelParams::resonant(1.0, 0.0).unwrap();
            let c = if s > 1 { -1.0 / (s as f64).sqrt() } else { 0.0 };
            let qc = lambda_qc(&block, &params, c).unwrap();
            let s_mat = wigner_d_matrix(s, c.acos());
            let op = hamiltonian_matrix(&block, &params);
            let scale = qc.iter().fold(0.0_f64, |m, &x| m.max(x.abs())).max(1.0);
            for (v, &qcv) in qc.iter().enumerate() {
                let col = s_mat.col(v);
                let quad: f64 = col.iter().zip(op.apply(col)).map(|(x, tx)| x * tx).sum();
                assert!(
                    (qcv - quad).abs() <= 1e-8 * scale,
                    "congruence s={s} v={v}: {qcv} vs {quad}"
                );
            }
        }
    }

    #[test]
    fn qc_trace_and_majorization() {
        let block = Block::new(0, 60).unwrap();
        let params = ModelParams::resonant(1.0, 0.0).unwrap();
        let qc = lambda_qc(&block, &params, -0.13).unwrap();
        // trace preservation; at resonance the trace is zero
        let total: f64 = qc.iter().sum();
        let scale: f64 = qc.iter().map(|x| x.abs()).sum();
        assert!(total.abs() <= 1e-8 * scale.max(1.0), "trace {total}");
        // majorization: Σ(λ^qc)² ≤ Σλ²
        let exact = solve(&block, &params, SolveMethod::Sturm).unwrap();
        let sum_qc2: f64 = qc.iter().map(|x| x * x).sum();
        let sum_l2: f64 = exact.lambdas.iter().map(|x| x * x).sum();
        assert!((sum_l2 - sum_qc2) / sum_l2 >= -1e-12, "majorization violated");
    }

    #[test]
    fn qc_trace_with_detuning() {
        let block = Block::new(1, 25).unwrap();
        let params = ModelParams::with_delta(1.7, 0.8, 0.0).unwrap();
        let qc = lambda_qc(&block, &params, -0.3).unwrap();
        let total: f64 = qc.iter().sum();
        let want: f64 = (0..block.dim()).map(|f| params.delta() * (block.l0() + f as f64)).sum();
        assert!((total - want).abs() <= 1e-8 * want.abs().max(1.0));
    }

    #[test]
    fn qc_approximation_assembly() {
        let block = Block::new(0, 12).unwrap();
        let params = ModelParams::resonant(1.0, 0.0).unwrap();
        let full = qc_approximation(&block, &params, &AngleStrategy::R2).unwrap();
        assert!(full.lambdas_qc.is_some());
        assert_eq!(full.lambdas_cmf.len(), 13);
        assert!(full.eigvectors.unwrap().orthonormality_defect() <= 1e-10);

        let mp = qc_approximation(&block, &params, &AngleStrategy::MpR1).unwrap();
        assert!(mp.lambdas_qc.is_none() && mp.eigvectors.is_none());
    }

    #[test]
    fn gauge_factor_reattachment() {
        let block = Block::new(0, 3).unwrap();
        let params = ModelParams::resonant(1.0, 1.1).unwrap();
        let qc = qc_approximation(&block, &params, &AngleStrategy::R3).unwrap();
        let col = qc.eigvector_original_gauge(&params, 1).unwrap();
        let s_mat = qc.eigvectors.as_ref().unwrap();
        for (f, z) in col.iter().enumerate() {
            let expect = Complex64::from_polar(1.0, 1.1 * (f as f64 - 1.0)) * s_mat.at(f, 1);
            assert!((z - expect).norm() < 1e-14);
        }
    }
}
