//! Time-domain population dynamics.
//!
//! Observables Y₀, N₀, N₁ are block-diagonal, so an initial state is
//! realized as a weighted set of blocks with per-block amplitude vectors;
//! cross-block coherences multiply vanishing observable matrix elements and
//! never contribute. Each block evolves through its spectral decomposition,
//!
//! ```text
//! c_f(t) = Σ_v Q_f^v e^{−iλ_v t} a_v,   a_v = Σ_f Q_f^v c_f(0),
//! ```
//!
//! the block constant C(l₁) cancelling identically, and populations follow
//! from ⟨N₀⟩ = s̄/2 − ⟨Y₀⟩, ⟨N₁⟩ = s̄ + k̄ + 2⟨Y₀⟩. The closed-form
//! quasiclassical envelope for a cluster state is provided separately.

use std::collections::HashMap;

use num_complex::Complex64;

use crate::error::{invalid, Error, Result};
use crate::model::{fock_to_block, ln_factorial_table, Block, ModelParams};
use crate::spectrum::{solve, SolveMethod, SpectralSolution};

/// Initial state of the two-mode field.
#[derive(Debug, Clone, PartialEq)]
pub enum InitialState {
    /// Lowest-weight state of one block: all s quanta in the pump mode,
    /// parity k in the harmonic. Identical to `Fock { n1: k, n0: s }`.
    Cluster { block: Block },
    /// Product Fock state |n₁, n₀⟩.
    Fock { n1: i64, n0: i64 },
    /// Two-mode Glauber coherent state |α₁⟩⊗|α₀⟩, expanded over blocks
    /// until the captured probability reaches 1 − eps.
    Coherent { alpha1: Complex64, alpha0: Complex64, eps: f64 },
}

/// One block's share of an initial state: a unit amplitude vector and the
/// probability weight of the block.
#[derive(Debug, Clone)]
pub struct BlockState {
    pub block: Block,
    pub amplitudes: Vec<Complex64>,
    pub weight: f64,
}

impl InitialState {
    /// Expands the state over blocks (ascending s, then k). `s_cap` bounds
    /// the largest admissible block.
    pub fn realize(&self, s_cap: usize) -> Result<Vec<BlockState>> {
        match self {
            InitialState::Cluster { block } => {
                let bs = single_block_state(*block, 0, s_cap)?;
                Ok(vec![bs])
            }
            InitialState::Fock { n1, n0 } => {
                let (block, f) = fock_to_block(*n1, *n0)?;
                Ok(vec![single_block_state(block, f, s_cap)?])
            }
            InitialState::Coherent { alpha1, alpha0, eps } => {
                coherent_weights(*alpha1, *alpha0, *eps, s_cap)
            }
        }
    }
}

fn single_block_state(block: Block, f: usize, s_cap: usize) -> Result<BlockState> {
    if block.s() > s_cap {
        return Err(Error::Capacity { required_s: block.s(), cap: s_cap });
    }
    let mut amplitudes = vec![Complex64::new(0.0, 0.0); block.dim()];
    amplitudes[f] = Complex64::new(1.0, 0.0);
    Ok(BlockState { block, amplitudes, weight: 1.0 })
}

/// Smallest N with Poisson(μ) tail beyond N at most `tail_bound`.
fn poisson_cutoff(mu: f64, tail_bound: f64) -> usize {
    if mu == 0.0 {
        return 0;
    }
    let mut p = (-mu).exp();
    let mut cum = p;
    let mut n = 0_usize;
    while 1.0 - cum > tail_bound {
        n += 1;
        p *= mu / n as f64;
        cum += p;
        if n > 100_000 {
            break; // unreachable for sane inputs; avoids a pathological spin
        }
    }
    n
}

/// Expands a two-mode coherent state over invariant blocks.
///
/// Fock pairs are enumerated inside per-mode Poisson cutoffs chosen so the
/// captured probability is at least 1 − eps; amplitudes keep their complex
/// phases, per-block vectors are normalized, and weights are the raw
/// captured probabilities (summing to 1 within eps, deliberately not
/// renormalized).
pub fn coherent_weights(
    alpha1: Complex64,
    alpha0: Complex64,
    eps: f64,
    s_cap: usize,
) -> Result<Vec<BlockState>> {
    if !(eps > 0.0 && eps < 1.0) {
        return Err(invalid(format!("truncation tolerance must lie in (0,1), got {eps}")));
    }
    let mu1 = alpha1.norm_sqr();
    let mu0 = alpha0.norm_sqr();
    let n1_max = poisson_cutoff(mu1, eps / 2.0);
    let n0_max = poisson_cutoff(mu0, eps / 2.0);
    let required_s = n0_max + n1_max / 2;
    if required_s > s_cap {
        return Err(Error::Capacity { required_s, cap: s_cap });
    }

    let lf = ln_factorial_table(n1_max.max(n0_max));
    let log_amp = |n: usize, mu: f64, alpha: Complex64| -> f64 {
        if n == 0 {
            -mu / 2.0
        } else {
            -mu / 2.0 + n as f64 * alpha.norm().ln() - 0.5 * lf[n]
        }
    };

    let mut per_block: HashMap<(usize, usize), Vec<Complex64>> = HashMap::new();
    for n1 in 0..=n1_max {
        for n0 in 0..=n0_max {
            let (block, f) = fock_to_block(n1 as i64, n0 as i64)?;
            let magnitude = (log_amp(n1, mu1, alpha1) + log_amp(n0, mu0, alpha0)).exp();
            let phase = n1 as f64 * alpha1.arg() + n0 as f64 * alpha0.arg();
            let amp = Complex64::from_polar(magnitude, phase);
            per_block
                .entry((block.s(), block.k()))
                .or_insert_with(|| vec![Complex64::new(0.0, 0.0); block.dim()])[f] = amp;
        }
    }

    let mut keys: Vec<(usize, usize)> = per_block.keys().cloned().collect();
    keys.sort_unstable();
    let mut out = Vec::with_capacity(keys.len());
    for (s, k) in keys {
        let mut amplitudes = per_block.remove(&(s, k)).expect("key from map");
        let weight: f64 = amplitudes.iter().map(|c| c.norm_sqr()).sum();
        if weight == 0.0 {
            continue;
        }
        let norm = weight.sqrt();
        for c in &mut amplitudes {
            *c /= norm;
        }
        out.push(BlockState { block: Block::new(k, s)?, amplitudes, weight });
    }
    Ok(out)
}

/// Mean block labels (s̄, k̄) of a realized state.
pub fn mean_labels(blocks: &[BlockState]) -> (f64, f64) {
    let s_bar = blocks.iter().map(|b| b.weight * b.block.s() as f64).sum();
    let k_bar = blocks.iter().map(|b| b.weight * b.block.k() as f64).sum();
    (s_bar, k_bar)
}

/// Per-block evolution output.
#[derive(Debug, Clone)]
pub struct BlockTrace {
    /// ⟨Y₀(t)⟩ within the block (eigenvalues f − s/2).
    pub y0: Vec<f64>,
    /// Largest deviation of Σ_f |c_f(t)|² from one over the grid.
    pub max_norm_drift: f64,
}

/// Evolves one block state through a spectral solution.
pub fn evolve_block(
    solution: &SpectralSolution,
    c0: &[Complex64],
    times: &[f64],
) -> Result<BlockTrace> {
    let n = solution.dim();
    if c0.len() != n {
        return Err(invalid(format!(
            "amplitude vector length {} does not match block dimension {n}",
            c0.len()
        )));
    }
    let norm: f64 = c0.iter().map(|c| c.norm_sqr()).sum();
    if (norm - 1.0).abs() > 1e-10 {
        return Err(invalid(format!("initial amplitudes not unit-normalized: |c|² = {norm}")));
    }
    let q = &solution.amplitudes;
    // a_v = Σ_f Q_f^v c_f
    let a: Vec<Complex64> =
        (0..n).map(|v| q.col(v).iter().zip(c0).map(|(&qfv, cf)| qfv * cf).sum()).collect();
    let j = solution.block.j();
    let mut y0 = Vec::with_capacity(times.len());
    let mut drift = 0.0_f64;
    let mut cf = vec![Complex64::new(0.0, 0.0); n];
    for &t in times {
        for x in &mut cf {
            *x = Complex64::new(0.0, 0.0);
        }
        for (v, &av) in a.iter().enumerate() {
            let phase = Complex64::from_polar(1.0, -solution.lambdas[v] * t) * av;
            for (f, &qfv) in q.col(v).iter().enumerate() {
                cf[f] += qfv * phase;
            }
        }
        let mut val = 0.0;
        let mut total = 0.0;
        for (f, c) in cf.iter().enumerate() {
            let p = c.norm_sqr();
            total += p;
            val += (f as f64 - j) * p;
        }
        drift = drift.max((total - 1.0).abs());
        y0.push(val);
    }
    Ok(BlockTrace { y0, max_norm_drift: drift })
}

/// Time series of ⟨Y₀⟩, ⟨N₀⟩, ⟨N₁⟩ (and optionally the closed-form
/// quasiclassical ⟨Y₀⟩) on a common grid.
#[derive(Debug, Clone)]
pub struct DynamicsTrace {
    pub times: Vec<f64>,
    /// Dimensionless times τ = g·t·√(2s̄).
    pub taus: Vec<f64>,
    pub y0: Vec<f64>,
    pub n0: Vec<f64>,
    pub n1: Vec<f64>,
    pub y0_qc: Option<Vec<f64>>,
    pub s_bar: f64,
    pub k_bar: f64,
    /// Largest unitarity drift over blocks and times.
    pub max_norm_drift: f64,
}

/// Spectral solutions cached per (k, s, Δ, |g|); the coupling phase does not
/// enter the real-gauge solution.
#[derive(Default)]
pub struct SolutionCache {
    map: HashMap<(usize, usize, u64, u64), SpectralSolution>,
}

impl SolutionCache {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }

    fn get_or_solve(&mut self, block: &Block, params: &ModelParams) -> Result<&SpectralSolution> {
        let key = (block.k(), block.s(), params.delta().to_bits(), params.g_abs.to_bits());
        if let std::collections::hash_map::Entry::Vacant(e) = self.map.entry(key) {
            e.insert(solve(block, params, SolveMethod::Sturm)?);
        }
        Ok(&self.map[&key])
    }
}

/// Evolves an already-realized state. Blocks are combined in their given
/// (sorted) order with a fixed reduction sequence, so output bytes do not
/// depend on scheduling.
pub fn evolve_realized(
    blocks: &[BlockState],
    params: &ModelParams,
    times: &[f64],
    cache: &mut SolutionCache,
) -> Result<DynamicsTrace> {
    if blocks.is_empty() {
        return Err(invalid("initial state has no blocks"));
    }
    let (s_bar, k_bar) = mean_labels(blocks);
    let mut y0 = vec![0.0; times.len()];
    let mut drift = 0.0_f64;
    for bs in blocks {
        let solution = cache.get_or_solve(&bs.block, params)?;
        let trace = evolve_block(solution, &bs.amplitudes, times)?;
        drift = drift.max(trace.max_norm_drift);
        for (acc, val) in y0.iter_mut().zip(&trace.y0) {
            *acc += bs.weight * val;
        }
    }
    let n0: Vec<f64> = y0.iter().map(|&y| s_bar / 2.0 - y).collect();
    let n1: Vec<f64> = y0.iter().map(|&y| s_bar + k_bar + 2.0 * y).collect();
    let tau_rate = params.g_abs * (2.0 * s_bar).sqrt();
    let taus: Vec<f64> = times.iter().map(|&t| tau_rate * t).collect();
    Ok(DynamicsTrace {
        times: times.to_vec(),
        taus,
        y0,
        n0,
        n1,
        y0_qc: None,
        s_bar,
        k_bar,
        max_norm_drift: drift,
    })
}

/// Realizes and evolves an initial state with a fresh solution cache.
pub fn evolve(
    initial: &InitialState,
    params: &ModelParams,
    times: &[f64],
    s_cap: usize,
) -> Result<DynamicsTrace> {
    let blocks = initial.realize(s_cap)?;
    evolve_realized(&blocks, params, times, &mut SolutionCache::new())
}

/// Uniform grid of `steps`+1 times from 0 to `t_max`.
pub fn time_grid(t_max: f64, steps: usize) -> Vec<f64> {
    (0..=steps).map(|i| t_max * i as f64 / steps.max(1) as f64).collect()
}

/// Slow-modulation envelope A(x) = [cos²x + sin²x/s]^{(s−1)/2}.
fn envelope(s: f64, x: f64) -> f64 {
    let (sin_x, cos_x) = x.sin_cos();
    (cos_x * cos_x + sin_x * sin_x / s).powf((s - 1.0) / 2.0)
}

/// Modulation phase Φ with tan Φ = tan(x)/√s, unwrapped over branch cuts so
/// (s−1)Φ(t) stays smooth: the branch index m = ⌊x/π + ½⌋ is applied to the
/// principal value of the reduced angle u = x − πm ∈ [−π/2, π/2).
fn phase_unwrapped(s: f64, x: f64) -> f64 {
    use std::f64::consts::PI;
    let m = (x / PI + 0.5).floor();
    let u = x - PI * m;
    (u.tan() / s.sqrt()).atan() + PI * m
}

/// Closed-form quasiclassical ⟨Y₀(t)⟩ for the cluster state of one block:
///
/// ```text
/// ⟨Y₀(t)⟩ ≈ −½{1 + (s−1)·A(Ω_l t)·cos[Ω_L t − (s−1)·Φ(Ω_l t)]}
/// ```
///
/// with Ω_L = 4|g|√((1−1/s)(s/2+k+1/2)) and Ω_l = 4|g|√(s−1)/(s√(2s+4k+2)).
/// Requires s ≥ 2 and a grid fine enough that Ω_l·Δt < π/4 (so the branch
/// unwrapping of Φ is unambiguous between samples).
pub fn qc_closed_form(block: &Block, params: &ModelParams, times: &[f64]) -> Result<Vec<f64>> {
    let s = block.s() as f64;
    if block.s() < 2 {
        return Err(invalid(format!(
            "closed-form approximation needs s >= 2, got s = {}",
            block.s()
        )));
    }
    let k = block.k() as f64;
    let g = params.g_abs;
    let omega_big = 4.0 * g * ((1.0 - 1.0 / s) * (s / 2.0 + k + 0.5)).sqrt();
    let omega_small = 4.0 * g * (s - 1.0).sqrt() / (s * (2.0 * s + 4.0 * k + 2.0).sqrt());
    for w in times.windows(2) {
        let dt = (w[1] - w[0]).abs();
        if omega_small * dt >= std::f64::consts::FRAC_PI_4 {
            return Err(invalid(format!(
                "time step {dt:.3e} too coarse for the modulation frequency {omega_small:.3e}: \
                 need Ω_l·Δt < π/4"
            )));
        }
    }
    Ok(times
        .iter()
        .map(|&t| {
            let x = omega_small * t;
            let a = envelope(s, x);
            let phi = phase_unwrapped(s, x);
            -0.5 * (1.0 + (s - 1.0) * a * (omega_big * t - (s - 1.0) * phi).cos())
        })
        .collect())
}

/// Carrier frequency Ω_L of the closed-form approximation.
pub fn carrier_frequency(block: &Block, params: &ModelParams) -> f64 {
    let s = block.s() as f64;
    let k = block.k() as f64;
    4.0 * params.g_abs * ((1.0 - 1.0 / s) * (s / 2.0 + k + 0.5)).sqrt()
}

/// Modulation frequency Ω_l of the closed-form approximation.
pub fn modulation_frequency(block: &Block, params: &ModelParams) -> f64 {
    let s = block.s() as f64;
    let k = block.k() as f64;
    4.0 * params.g_abs * (s - 1.0).sqrt() / (s * (2.0 * s + 4.0 * k + 2.0).sqrt())
}
