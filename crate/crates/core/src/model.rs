//! Model parameters, invariant blocks, and per-block tridiagonal
//! Hamiltonians.
//!
//! The collective operators V₊ = a₁⁺²a₀, V₋ = a₀⁺a₁², V₀ = (N₁−N₀)/3 close a
//! polynomial deformation of su(2): [V₋,V₊] = ψ(V₀+1;R₁) − ψ(V₀;R₁) with the
//! cubic structure polynomial ψ. Each invariant block L(k,s) is spanned by
//! |k,s;f⟩ = |n₁ = k+2f, n₀ = s−f⟩, f = 0..s, and H (minus the block
//! constant C(l₁)) acts on it as a real symmetric tridiagonal matrix once
//! the phase of g is gauged away.

use num_complex::Complex64;

use crate::error::{invalid, Result};

/// Physical constants of the two-mode model, in units with ħ = 1.
///
/// The detuning Δ = 2ω₁ − ω₀ is derived, never stored, so the identity holds
/// exactly. All spectra exclude the additive block constant C(l₁) =
/// (ω₁+ω₀)·l₁.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelParams {
    pub omega0: f64,
    pub omega1: f64,
    pub g_abs: f64,
    pub g_phase: f64,
}

impl ModelParams {
    pub fn new(omega0: f64, omega1: f64, g_abs: f64, g_phase: f64) -> Result<Self> {
        if g_abs.is_nan() || g_abs < 0.0 {
            return Err(invalid(format!("coupling magnitude must be >= 0, got {g_abs}")));
        }
        if !omega0.is_finite() || !omega1.is_finite() || !g_phase.is_finite() {
            return Err(invalid("model frequencies and phase must be finite"));
        }
        Ok(ModelParams { omega0, omega1, g_abs, g_phase })
    }

    /// Exact resonance ω₀ = 2ω₁, i.e. Δ = 0.
    pub fn resonant(g_abs: f64, g_phase: f64) -> Result<Self> {
        ModelParams::new(2.0, 1.0, g_abs, g_phase)
    }

    /// Chooses frequencies realizing a given detuning exactly (ω₀ = ω₁ = Δ).
    pub fn with_delta(delta: f64, g_abs: f64, g_phase: f64) -> Result<Self> {
        ModelParams::new(delta, delta, g_abs, g_phase)
    }

    /// Detuning Δ = 2ω₁ − ω₀.
    #[inline]
    pub fn delta(&self) -> f64 {
        2.0 * self.omega1 - self.omega0
    }

    /// Complex coupling g = |g|·e^{iφ}.
    pub fn g(&self) -> Complex64 {
        Complex64::from_polar(self.g_abs, self.g_phase)
    }

    /// Unit phase factor g/|g| (1 when g = 0).
    pub fn g_unit(&self) -> Complex64 {
        if self.g_abs == 0.0 {
            Complex64::new(1.0, 0.0)
        } else {
            Complex64::from_polar(1.0, self.g_phase)
        }
    }
}

/// Invariant sector L(k,s): harmonic parity k ∈ {0,1} and size parameter
/// s ≥ 0. The block has dimension s+1 and carries the R-eigenvalues
/// l₀ = (k−s)/3 and l₁ = (k+2s)/3, which are exact thirds and therefore
/// kept as integer numerators.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Block {
    k: u8,
    s: usize,
}

impl Block {
    pub fn new(k: usize, s: usize) -> Result<Self> {
        if k > 1 {
            return Err(invalid(format!("harmonic parity k must be 0 or 1, got {k}")));
        }
        Ok(Block { k: k as u8, s })
    }

    #[inline]
    pub fn k(&self) -> usize {
        self.k as usize
    }

    #[inline]
    pub fn s(&self) -> usize {
        self.s
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.s + 1
    }

    /// Numerator of l₀ = (k−s)/3.
    #[inline]
    pub fn l0_numer(&self) -> i64 {
        self.k as i64 - self.s as i64
    }

    /// Numerator of l₁ = (k+2s)/3.
    #[inline]
    pub fn l1_numer(&self) -> i64 {
        self.k as i64 + 2 * self.s as i64
    }

    pub fn l0(&self) -> f64 {
        self.l0_numer() as f64 / 3.0
    }

    pub fn l1(&self) -> f64 {
        self.l1_numer() as f64 / 3.0
    }

    /// Spin label j = s/2 of the su(2) image of the block.
    pub fn j(&self) -> f64 {
        self.s as f64 / 2.0
    }

    /// Occupation numbers (n₁, n₀) of basis index f.
    pub fn occupations(&self, f: usize) -> Result<(usize, usize)> {
        if f > self.s {
            return Err(invalid(format!(
                "basis index f = {f} outside block of size s = {}",
                self.s
            )));
        }
        Ok((self.k() + 2 * f, self.s - f))
    }
}

/// Maps a Fock pair (n₁, n₀) to its block and basis index:
/// k = n₁ mod 2, f = (n₁−k)/2, s = n₀+f.
pub fn fock_to_block(n1: i64, n0: i64) -> Result<(Block, usize)> {
    if n1 < 0 || n0 < 0 {
        return Err(invalid(format!("occupation numbers must be non-negative, got ({n1}, {n0})")));
    }
    let k = (n1 % 2) as usize;
    let f = ((n1 as usize) - k) / 2;
    let s = n0 as usize + f;
    Ok((Block::new(k, s)?, f))
}

/// Structure polynomial ψ(l₀+f; l₁) = (k+2f)(k+2f−1)(s−f+1), evaluated
/// exactly in integer arithmetic. Valid for 0 ≤ f ≤ s+1; ψ vanishes at both
/// ends of that range (lowest- and highest-weight annihilation).
pub fn structure_poly(block: &Block, f: usize) -> Result<i64> {
    if f > block.s() + 1 {
        return Err(invalid(format!(
            "structure polynomial index f = {f} outside 0..={}",
            block.s() + 1
        )));
    }
    let k = block.k() as i64;
    let s = block.s() as i64;
    let f = f as i64;
    Ok((k + 2 * f) * (k + 2 * f - 1) * (s - f + 1))
}

/// Tridiagonal coupling b_f = |g|·√ψ(l₀+f+1; l₁) = ⟨f+1|g V₊|f⟩ in the real
/// gauge, for 0 ≤ f ≤ s−1.
pub fn coupling(block: &Block, params: &ModelParams, f: usize) -> Result<f64> {
    if block.s() == 0 || f > block.s() - 1 {
        return Err(invalid(format!(
            "coupling index f = {f} outside 0..={}",
            block.s().saturating_sub(1)
        )));
    }
    let psi = structure_poly(block, f + 1)?;
    Ok(params.g_abs * (psi as f64).sqrt())
}

/// Real symmetric tridiagonal matrix of H/ħ − C(l₁) on one block, in the
/// gauge where the coupling phase has been rotated away.
#[derive(Debug, Clone, PartialEq)]
pub struct TridiagonalOperator {
    /// Diagonal d_f = Δ·(l₀+f), length s+1.
    pub diag: Vec<f64>,
    /// Couplings b_f ≥ 0 between f and f+1, length s.
    pub offdiag: Vec<f64>,
    pub block: Block,
}

impl TridiagonalOperator {
    pub fn dim(&self) -> usize {
        self.diag.len()
    }

    /// Gershgorin bounds (lo, hi) enclosing the whole spectrum.
    pub fn gershgorin(&self) -> (f64, f64) {
        let n = self.dim();
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for i in 0..n {
            let left = if i > 0 { self.offdiag[i - 1] } else { 0.0 };
            let right = if i + 1 < n { self.offdiag[i] } else { 0.0 };
            lo = lo.min(self.diag[i] - left - right);
            hi = hi.max(self.diag[i] + left + right);
        }
        (lo, hi)
    }

    /// Upper bound on the spectral radius.
    pub fn radius(&self) -> f64 {
        let (lo, hi) = self.gershgorin();
        lo.abs().max(hi.abs())
    }

    /// Matrix-vector product.
    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        let n = self.dim();
        assert_eq!(x.len(), n);
        let mut y = vec![0.0; n];
        for i in 0..n {
            let mut acc = self.diag[i] * x[i];
            if i > 0 {
                acc += self.offdiag[i - 1] * x[i - 1];
            }
            if i + 1 < n {
                acc += self.offdiag[i] * x[i + 1];
            }
            y[i] = acc;
        }
        y
    }

    /// Max-norm residual ‖T q − λ q‖_∞.
    pub fn residual(&self, lambda: f64, q: &[f64]) -> f64 {
        self.apply(q).iter().zip(q).map(|(tq, qi)| (tq - lambda * qi).abs()).fold(0.0, f64::max)
    }
}

/// Assembles the block Hamiltonian: diag d_f = Δ·(l₀+f) with the exact
/// rational l₀ converted only here, offdiag b_f = |g|·√ψ(l₀+f+1).
pub fn hamiltonian_matrix(block: &Block, params: &ModelParams) -> TridiagonalOperator {
    let delta = params.delta();
    let l0_num = block.l0_numer();
    let diag = (0..block.dim()).map(|f| delta * ((l0_num + 3 * f as i64) as f64) / 3.0).collect();
    let offdiag = (0..block.s())
        .map(|f| coupling(block, params, f).expect("f in range by construction"))
        .collect();
    TridiagonalOperator { diag, offdiag, block: *block }
}

/// Cumulative table of ln(i!) for i = 0..=nmax.
pub(crate) fn ln_factorial_table(nmax: usize) -> Vec<f64> {
    let mut t = vec![0.0; nmax + 1];
    for i in 1..=nmax {
        t[i] = t[i - 1] + (i as f64).ln();
    }
    t
}
