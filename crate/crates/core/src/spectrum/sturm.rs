//! Overflow-safe evaluation of the characteristic-minor recurrence
//!
//! ```text
//! P_{f+1}(λ) = [λ − Δ(f+l₀)]·P_f(λ) − |g|²ψ(l₀+f)·P_{f−1}(λ),
//! P_0 = 1, P_{−1} = 0,
//! ```
//!
//! whose sign agreements count eigenvalues below λ (Sturm sequence), plus
//! the bisection driver built on it.
//!
//! Raw P values overflow f64 already for s of a few hundred, so each lane
//! carries the pair (P_{f−1}, P_f) as mantissas with one shared power-of-two
//! exponent; rescaling multiplies both by an exact power of two and is only
//! triggered when a mantissa leaves [2^-400, 2^400]. For counting, the
//! shared exponent is irrelevant and is not even tracked.

use crate::error::{Error, Result};

/// Mantissa range guard: rescale when |m| leaves [2^-400, 2^400].
const BIG: f64 = 2.582_249_878_086_908_6e120; // 2^400
const BIG_INV: f64 = 1.0 / BIG; // 2^-400, exact

/// Coefficients of the recurrence for one block: `diag[f]` = Δ(l₀+f) and
/// `psi_g2[f]` = |g|²ψ(l₀+f) = b_{f−1}² (zero at f = 0).
pub(crate) struct SturmKernel {
    pub diag: Vec<f64>,
    pub psi_g2: Vec<f64>,
}

impl SturmKernel {
    /// Recurrence coefficients with |g|²ψ built from the integer structure
    /// polynomial, not from squared couplings, so small-block minor values
    /// come out exact.
    pub fn new(op: &crate::model::TridiagonalOperator, params: &crate::model::ModelParams) -> Self {
        let n = op.dim();
        let g2 = params.g_abs * params.g_abs;
        let psi_g2 = (0..n)
            .map(|f| {
                g2 * crate::model::structure_poly(&op.block, f).expect("f <= s by construction")
                    as f64
            })
            .collect();
        SturmKernel { diag: op.diag.clone(), psi_g2 }
    }

    /// Number of eigenvalues strictly below `x`.
    #[cfg_attr(not(test), allow(dead_code))]
    pub fn count_below(&self, x: f64) -> usize {
        self.count_below_batch::<1>(&[x])[0]
    }

    /// Lockstep Sturm counts for `B` shift values in one sweep. Interleaving
    /// independent recurrences hides the multiply-add latency chain.
    pub fn count_below_batch<const B: usize>(&self, xs: &[f64; B]) -> [usize; B] {
        let n = self.diag.len();
        let mut m_prev = [0.0_f64; B];
        let mut m_cur = [1.0_f64; B];
        let mut prev_pos = [true; B];
        let mut count = [0_usize; B];
        for f in 0..n {
            let d = self.diag[f];
            let a = self.psi_g2[f];
            for l in 0..B {
                let mut new = (xs[l] - d) * m_cur[l] - a * m_prev[l];
                let mut cur = m_cur[l];
                // Rare: keep the pair's mantissas in range. Exact powers of
                // two leave every sign and ratio untouched.
                if !(BIG_INV..=BIG).contains(&new.abs()) && new != 0.0 {
                    while new.abs() > BIG {
                        new *= BIG_INV;
                        cur *= BIG_INV;
                    }
                    while new != 0.0 && new.abs() < BIG_INV {
                        new *= BIG;
                        cur *= BIG;
                    }
                }
                let pos = if new > 0.0 {
                    true
                } else if new < 0.0 {
                    false
                } else {
                    // A vanishing minor means an eigenvalue of the leading
                    // submatrix sits exactly at x; treating it as a sign
                    // disagreement makes the count "strictly below".
                    !prev_pos[l]
                };
                if pos == prev_pos[l] {
                    count[l] += 1;
                }
                prev_pos[l] = pos;
                m_prev[l] = cur;
                m_cur[l] = new;
            }
        }
        count
    }
}

/// One value of the minor recurrence as mantissa·2^exp2, |mantissa| ∈ [0.5,1).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScaledValue {
    pub mantissa: f64,
    pub exp2: i64,
}

impl ScaledValue {
    pub const ZERO: ScaledValue = ScaledValue { mantissa: 0.0, exp2: 0 };

    /// The plain f64 value; overflows to ±∞ for |exp2| beyond f64 range.
    pub fn value(&self) -> f64 {
        self.mantissa * exp2i(self.exp2)
    }

    /// log₂|value| (−∞ for zero).
    pub fn log2_abs(&self) -> f64 {
        if self.mantissa == 0.0 {
            f64::NEG_INFINITY
        } else {
            self.mantissa.abs().log2() + self.exp2 as f64
        }
    }

    pub fn signum(&self) -> f64 {
        if self.mantissa > 0.0 {
            1.0
        } else if self.mantissa < 0.0 {
            -1.0
        } else {
            0.0
        }
    }
}

/// Splits x into (mantissa, exp2) with |mantissa| ∈ [0.5, 1).
#[inline]
pub(crate) fn frexp(x: f64) -> (f64, i64) {
    if x == 0.0 || !x.is_finite() {
        return (x, 0);
    }
    let bits = x.to_bits();
    let exp_bits = ((bits >> 52) & 0x7ff) as i64;
    if exp_bits == 0 {
        // subnormal: renormalize first
        let (m, e) = frexp(x * 1.8014398509481984e16); // 2^54
        (m, e - 54)
    } else {
        let m = f64::from_bits((bits & !(0x7ff_u64 << 52)) | (1022_u64 << 52));
        (m, exp_bits - 1022)
    }
}

/// 2^k as f64, saturating to 0 / ∞ outside the representable range.
#[inline]
pub(crate) fn exp2i(k: i64) -> f64 {
    if k < -1074 {
        0.0
    } else if k < -1022 {
        f64::from_bits(1_u64 << (k + 1074) as u64)
    } else if k <= 1023 {
        f64::from_bits(((k + 1023) as u64) << 52)
    } else {
        f64::INFINITY
    }
}

/// Full scaled sequence P_0..P_n (n = dim) together with the Sturm count at
/// `x`. Used by the public `sturm_polynomials` operation and the amplitude
/// reconstruction.
pub(crate) fn scaled_minor_sequence(kernel: &SturmKernel, x: f64) -> (Vec<ScaledValue>, usize) {
    let n = kernel.diag.len();
    let mut out = Vec::with_capacity(n + 1);
    out.push(ScaledValue { mantissa: 0.5, exp2: 1 }); // P_0 = 1
    let mut m_prev = 0.0_f64;
    let mut m_cur = 1.0_f64;
    let mut shared_exp = 0_i64;
    let mut prev_pos = true;
    let mut count = 0_usize;
    for f in 0..n {
        let mut new = (x - kernel.diag[f]) * m_cur - kernel.psi_g2[f] * m_prev;
        let mut cur = m_cur;
        if !(BIG_INV..=BIG).contains(&new.abs()) && new != 0.0 {
            while new.abs() > BIG {
                new *= BIG_INV;
                cur *= BIG_INV;
                shared_exp += 400;
            }
            while new != 0.0 && new.abs() < BIG_INV {
                new *= BIG;
                cur *= BIG;
                shared_exp -= 400;
            }
        }
        let pos = if new > 0.0 {
            true
        } else if new < 0.0 {
            false
        } else {
            !prev_pos
        };
        if pos == prev_pos {
            count += 1;
        }
        prev_pos = pos;
        m_prev = cur;
        m_cur = new;
        let (m, e) = frexp(m_cur);
        out.push(if m_cur == 0.0 {
            ScaledValue::ZERO
        } else {
            ScaledValue { mantissa: m, exp2: e + shared_exp }
        });
    }
    (out, count)
}

/// Default relative bisection tolerance (absolute near zero).
pub(crate) const BISECT_REL_TOL: f64 = 1e-13;
const MAX_BISECT_ITERS: usize = 300;
const LANES: usize = 8;

#[inline]
fn bracket_tol(rel_tol: f64, a: f64, b: f64) -> f64 {
    rel_tol * a.abs().max(b.abs()).max(1.0)
}

/// All eigenvalues of the kernel's matrix, ascending, each isolated and
/// refined by bisection on the Sturm count. Roots are processed in lanes of
/// eight so the count sweeps pipeline; every root's iteration sequence is
/// independent of scheduling, so results do not depend on the worker count.
pub(crate) fn bisect_all(kernel: &SturmKernel, lo: f64, hi: f64, rel_tol: f64) -> Result<Vec<f64>> {
    use rayon::prelude::*;

    let n = kernel.diag.len();
    if n == 1 {
        return Ok(vec![kernel.diag[0]]);
    }
    // Pad the Gershgorin interval so strict "count below" brackets every root.
    let pad = 2.0 * f64::EPSILON * hi.abs().max(lo.abs()).max(1.0);
    let (lo, hi) = (lo - pad, hi + pad);

    let chunks: Vec<usize> = (0..n).step_by(LANES).collect();
    let mut results = vec![0.0_f64; n];
    let slots: Vec<(usize, &mut [f64])> = {
        // split results into per-chunk windows for parallel writing
        let mut rest = results.as_mut_slice();
        let mut out = Vec::with_capacity(chunks.len());
        for &start in &chunks {
            let len = LANES.min(n - start);
            let (head, tail) = rest.split_at_mut(len);
            out.push((start, head));
            rest = tail;
        }
        out
    };

    let errors: Vec<Option<Error>> = slots
        .into_par_iter()
        .map(|(start, window)| {
            let lanes = window.len();
            let mut a = [lo; LANES];
            let mut b = [hi; LANES];
            let mut done = [false; LANES];
            for d in done.iter_mut().skip(lanes) {
                *d = true;
            }
            let mut iter = 0;
            loop {
                if done.iter().all(|&d| d) {
                    break;
                }
                if iter > MAX_BISECT_ITERS {
                    return Some(Error::Convergence(format!(
                        "bisection failed to isolate eigenvalue near index {start} within {MAX_BISECT_ITERS} iterations"
                    )));
                }
                iter += 1;
                let mut mids = [0.0_f64; LANES];
                for l in 0..LANES {
                    mids[l] = 0.5 * (a[l] + b[l]);
                }
                let counts = kernel.count_below_batch::<LANES>(&mids);
                for l in 0..lanes {
                    if done[l] {
                        continue;
                    }
                    let v = start + l;
                    if counts[l] <= v {
                        a[l] = mids[l];
                    } else {
                        b[l] = mids[l];
                    }
                    let mid = 0.5 * (a[l] + b[l]);
                    if b[l] - a[l] <= bracket_tol(rel_tol, a[l], b[l]) || mid <= a[l] || mid >= b[l]
                    {
                        window[l] = mid;
                        done[l] = true;
                    }
                }
            }
            None
        })
        .collect();

    if let Some(err) = errors.into_iter().flatten().next() {
        return Err(err);
    }
    Ok(results)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{hamiltonian_matrix, Block, ModelParams};

    fn kernel(k: usize, s: usize, delta: f64, g: f64) -> SturmKernel {
        let block = Block::new(k, s).unwrap();
        let params = ModelParams::with_delta(delta, g, 0.0).unwrap();
        SturmKernel::new(&hamiltonian_matrix(&block, &params), &params)
    }

    #[test]
    fn frexp_round_trips() {
        for &x in &[1.0, -2.0, 0.75, 1e300, -3e-300, 5e-320, 123.456] {
            let (m, e) = frexp(x);
            assert!(m.abs() >= 0.5 && m.abs() < 1.0, "mantissa {m} for {x}");
            assert_eq!(m * exp2i(e), x, "x={x}");
        }
        assert_eq!(frexp(0.0), (0.0, 0));
    }

    #[test]
    fn minor_sequence_two_level() {
        // k=0, s=1, resonance: P = [1, λ, λ²−2]
        let kern = kernel(0, 1, 0.0, 1.0);
        let (p, count) = scaled_minor_sequence(&kern, 0.0);
        let vals: Vec<f64> = p.iter().map(|s| s.value()).collect();
        assert_eq!(vals, vec![1.0, 0.0, -2.0]);
        assert_eq!(count, 1, "one eigenvalue (-sqrt2) below 0");

        let (p, _) = scaled_minor_sequence(&kern, 2.0_f64.sqrt());
        assert!(p[2].value().abs() < 1e-14, "boundary polynomial vanishes at an eigenvalue");
    }

    #[test]
    fn count_examples() {
        // k=0, s=2, resonance: spectrum {-4, 0, 4}
        let kern = kernel(0, 2, 0.0, 1.0);
        assert_eq!(kern.count_below(5.0), 3);
        assert_eq!(kern.count_below(-5.0), 0);
        assert_eq!(kern.count_below(1.0), 2);
        assert_eq!(kern.count_below(-1.0), 1);
    }

    #[test]
    fn count_monotone_and_batch_consistent() {
        let kern = kernel(1, 57, -1.7, 0.7);
        let xs: Vec<f64> = (0..40).map(|i| -400.0 + 20.0 * i as f64).collect();
        let mut prev = 0;
        for &x in &xs {
            let c = kern.count_below(x);
            assert!(c >= prev, "count must be monotone in x");
            prev = c;
        }
        let mut batch = [0.0_f64; 8];
        batch.copy_from_slice(&xs[12..20]);
        let counts = kern.count_below_batch::<8>(&batch);
        for l in 0..8 {
            assert_eq!(counts[l], kern.count_below(batch[l]));
        }
    }

    #[test]
    fn no_overflow_at_large_s() {
        // The raw minors at s = 3000 span thousands of orders of magnitude.
        let kern = kernel(0, 3000, 0.0, 1.0);
        let (p, count) = scaled_minor_sequence(&kern, 1000.0);
        assert!(p.iter().all(|s| s.mantissa.is_finite()));
        assert!(count > 0 && count < 3001);
        // agreement between the sequence count and the batch kernel
        assert_eq!(count, kern.count_below(1000.0));
    }

    #[test]
    fn bisect_three_level() {
        let kern = kernel(0, 2, 0.0, 1.0);
        let lams = bisect_all(&kern, -10.0, 10.0, BISECT_REL_TOL).unwrap();
        assert!((lams[0] + 4.0).abs() < 1e-12);
        assert!(lams[1].abs() < 1e-12);
        assert!((lams[2] - 4.0).abs() < 1e-12);
    }
}
