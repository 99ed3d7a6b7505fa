//! Accuracy measures comparing exact and approximate spectra and
//! eigenvectors.
//!
//! All measures are dimensionless ratios: the global Hamiltonian proximity
//! δ²_H = [Σλ² − Σλ̃²]/Σλ², the spectrum distances δ²_E and δ²_E_up
//! (the latter restricted to the upper half v ≥ ⌈s/2⌉ of the spectrum, with
//! matching denominator), per-level energy errors, and the Fubini-Study
//! overlap deficit δ²_ef = 1 − |Σ_f S_f Q_f|². Pairing between exact and
//! approximate levels is always by rank v.

use crate::error::{invalid, Error, Result};
use crate::model::Block;
use crate::quasiclassical::AngleStrategy;

/// Relative threshold under which an exact level counts as zero for the
/// per-level relative error (the resonance midpoint is an exact zero that
/// bisection can only pin to rounding accuracy).
const ZERO_LEVEL_REL: f64 = 1e-12;

fn check_lengths(exact: &[f64], approx: &[f64]) -> Result<()> {
    if exact.len() != approx.len() {
        return Err(invalid(format!(
            "spectrum length mismatch: {} vs {}",
            exact.len(),
            approx.len()
        )));
    }
    if exact.is_empty() {
        return Err(invalid("empty spectra"));
    }
    Ok(())
}

fn sum_sq(xs: &[f64]) -> f64 {
    xs.iter().map(|x| x * x).sum()
}

/// Global Hamiltonian proximity δ²_H = [Σ_v λ_v² − Σ_v λ̃_v²] / Σ_v λ_v².
///
/// The caller chooses whether λ̃ is the full quadratic-form spectrum
/// (non-negative result by majorization) or the closed-form cluster
/// mean-field spectrum (may come out negative).
pub fn delta2_h(exact: &[f64], approx: &[f64]) -> Result<f64> {
    check_lengths(exact, approx)?;
    let denom = sum_sq(exact);
    if denom == 0.0 {
        return Err(Error::UndefinedMeasure(
            "all-zero exact spectrum has no Hamiltonian weight".into(),
        ));
    }
    Ok((denom - sum_sq(approx)) / denom)
}

/// Spectrum distance δ²_E = Σ_v (λ_v − λ̃_v)² / Σ_v λ_v², optionally
/// restricted (numerator and denominator) to the upper half v ≥ ⌈s/2⌉.
pub fn delta2_e(exact: &[f64], approx: &[f64], upper_only: bool) -> Result<f64> {
    check_lengths(exact, approx)?;
    let s = exact.len() - 1;
    let start = if upper_only { s.div_ceil(2) } else { 0 };
    let denom = sum_sq(&exact[start..]);
    if denom == 0.0 {
        return Err(Error::UndefinedMeasure("zero spectral weight in the selected range".into()));
    }
    let num: f64 =
        exact[start..].iter().zip(&approx[start..]).map(|(l, a)| (l - a) * (l - a)).sum();
    Ok(num / denom)
}

/// Per-level energy errors ΔE_v = λ_v − λ̃_v and relative errors
/// δE_v = ΔE_v/λ_v, the latter `None` where the exact level vanishes.
pub fn energy_errors(exact: &[f64], approx: &[f64]) -> Result<(Vec<f64>, Vec<Option<f64>>)> {
    check_lengths(exact, approx)?;
    let scale = exact.iter().fold(0.0_f64, |m, &x| m.max(x.abs()));
    let abs: Vec<f64> = exact.iter().zip(approx).map(|(l, a)| l - a).collect();
    let rel = exact
        .iter()
        .zip(&abs)
        .map(|(&l, &d)| if l.abs() <= ZERO_LEVEL_REL * scale.max(1.0) { None } else { Some(d / l) })
        .collect();
    Ok((abs, rel))
}

/// Overlap of one approximate eigenvector with the matching exact one:
/// returns (cos, δ²_ef) with cos = Σ_f S_f Q_f and δ²_ef = 1 − cos²
/// (clamped into [0, 1] against rounding). Both inputs must be unit vectors.
pub fn overlap_deficit(s_col: &[f64], q_col: &[f64]) -> Result<(f64, f64)> {
    if s_col.len() != q_col.len() || s_col.is_empty() {
        return Err(invalid("overlap requires two equal-length vectors"));
    }
    for (name, v) in [("approximate", s_col), ("exact", q_col)] {
        let norm = sum_sq(v).sqrt();
        if (norm - 1.0).abs() > 1e-8 {
            return Err(invalid(format!(
                "{name} eigenvector is not unit-normalized: |v| = {norm}"
            )));
        }
    }
    let cos: f64 = s_col.iter().zip(q_col).map(|(a, b)| a * b).sum();
    let deficit = (1.0 - cos * cos).clamp(0.0, 1.0);
    Ok((cos, deficit))
}

/// Per-level overlap entry of a [`MeasureReport`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Overlap {
    pub cos: f64,
    pub deficit: f64,
}

/// Bundle of all accuracy measures of one strategy on one block.
#[derive(Debug, Clone)]
pub struct MeasureReport {
    pub block: Block,
    pub strategy: AngleStrategy,
    pub delta2_h: f64,
    pub delta2_e: f64,
    pub delta2_e_up: f64,
    pub energy_abs: Vec<f64>,
    pub energy_rel: Vec<Option<f64>>,
    /// Per-level eigenvector overlaps; `None` when the strategy provides no
    /// eigenvector set.
    pub overlaps: Option<Vec<Overlap>>,
}

impl MeasureReport {
    /// Builds the report from an exact spectrum, an approximate spectrum,
    /// and optionally the matching eigenvector sets (columns of S and Q).
    pub fn build(
        block: Block,
        strategy: AngleStrategy,
        exact: &[f64],
        approx: &[f64],
        vectors: Option<(&crate::mat::Mat, &crate::mat::Mat)>,
    ) -> Result<Self> {
        let delta2_h = delta2_h(exact, approx)?;
        let delta2_e_full = delta2_e(exact, approx, false)?;
        let delta2_e_up = delta2_e(exact, approx, true)?;
        let (energy_abs, energy_rel) = energy_errors(exact, approx)?;
        let overlaps = match vectors {
            Some((s_mat, q_mat)) => {
                let mut out = Vec::with_capacity(exact.len());
                for v in 0..exact.len() {
                    let (cos, deficit) = overlap_deficit(s_mat.col(v), q_mat.col(v))?;
                    out.push(Overlap { cos, deficit });
                }
                Some(out)
            }
            None => None,
        };
        Ok(MeasureReport {
            block,
            strategy,
            delta2_h,
            delta2_e: delta2_e_full,
            delta2_e_up,
            energy_abs,
            energy_rel,
            overlaps,
        })
    }
}
