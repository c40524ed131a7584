//! Exhaustive-enumeration ground truth.
//!
//! States are encoded as little-endian `u64` masks (bit `i` is index `i`) and
//! listed in increasing integer order. Everything here is exact up to double
//! rounding; the intended instances have at most a few thousand states.

use std::collections::HashMap;

use nalgebra::{DMatrix, SymmetricEigen};
use serde::{Deserialize, Serialize};

use crate::code::{Direction, Graph, ParityCheckCode};
use crate::dynamics::{ChainParams, KernelId, LiftParams};
use crate::error::{Error, Result};
use crate::gf2::{self, BitMatrix, BitVector};
use crate::par::{self, Execution};

/// Largest state space a dense [`TransitionMatrix`] may be built for.
pub const MAX_MATRIX_STATES: usize = 1 << 14;
/// Largest bit length for enumerated distributions.
pub const MAX_ENUM_BITS: usize = 24;

/// `k · ln q` with the convention `0 · ln 0 = 0`.
#[inline]
pub(crate) fn xlny(k: usize, q: f64) -> f64 {
    if k == 0 {
        0.0
    } else {
        k as f64 * q.ln()
    }
}

/// `q^k (1 − q)^{n−k}` in log space, well defined at `q ∈ {0, 1}`.
#[inline]
pub(crate) fn log_bernoulli(k: usize, n: usize, q: f64) -> f64 {
    xlny(k, q) + xlny(n - k, 1.0 - q)
}

fn guard_bits(what: &'static str, bits: usize, limit: usize) -> Result<()> {
    if bits > limit {
        return Err(Error::SizeLimit {
            what,
            limit,
            actual: bits,
        });
    }
    Ok(())
}

pub(crate) fn mask(v: &BitVector) -> u64 {
    v.to_mask().expect("enumerated states fit in 64 bits")
}

/// A normalised probability table over enumerated bit-string states.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExactDistribution {
    bits: usize,
    states: Vec<u64>,
    probs: Vec<f64>,
}

impl ExactDistribution {
    /// Normalise unnormalised log-weights; `-inf` entries get probability 0.
    pub fn from_log_weights(bits: usize, states: Vec<u64>, log_weights: &[f64]) -> Result<Self> {
        if states.len() != log_weights.len() {
            return Err(Error::DimensionMismatch {
                context: "states vs weights",
                expected: states.len(),
                found: log_weights.len(),
            });
        }
        if states.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidParameter("states must be strictly increasing".into()));
        }
        let max = log_weights.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        if !max.is_finite() {
            return Err(Error::InvalidParameter("distribution has no finite weight".into()));
        }
        let w: Vec<f64> = log_weights.iter().map(|&l| (l - max).exp()).collect();
        let z: f64 = w.iter().sum();
        Ok(Self {
            bits,
            states,
            probs: w.into_iter().map(|x| x / z).collect(),
        })
    }

    /// Over all `2^bits` states.
    pub fn from_full_log_weights(bits: usize, log_weights: &[f64]) -> Result<Self> {
        Self::from_log_weights(bits, (0..1u64 << bits).collect(), log_weights)
    }

    pub fn bits(&self) -> usize {
        self.bits
    }

    pub fn states(&self) -> &[u64] {
        &self.states
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn index_of(&self, state: u64) -> Option<usize> {
        self.states.binary_search(&state).ok()
    }

    /// Probability of `state`, zero if not enumerated.
    pub fn prob(&self, state: u64) -> f64 {
        self.index_of(state).map_or(0.0, |i| self.probs[i])
    }

    pub fn min_prob(&self) -> f64 {
        self.probs.iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// `Σ_s |p(s) − q(s)|` over the union of both supports.
    pub fn l1_distance(&self, other: &ExactDistribution) -> f64 {
        let mut d = 0.0;
        for (s, p) in self.states.iter().zip(&self.probs) {
            d += (p - other.prob(*s)).abs();
        }
        for (s, q) in other.states.iter().zip(&other.probs) {
            if self.index_of(*s).is_none() {
                d += q.abs();
            }
        }
        d
    }

    /// Expand to a dense vector over all `2^bits` states.
    pub fn dense(&self) -> Vec<f64> {
        let mut out = vec![0.0; 1usize << self.bits];
        for (s, p) in self.states.iter().zip(&self.probs) {
            out[*s as usize] = *p;
        }
        out
    }

    /// Push the distribution through `f` and merge equal images.
    pub fn map_states(&self, bits: usize, f: impl Fn(u64) -> u64) -> ExactDistribution {
        let mut acc: std::collections::BTreeMap<u64, f64> = Default::default();
        for (s, p) in self.states.iter().zip(&self.probs) {
            *acc.entry(f(*s)).or_default() += p;
        }
        ExactDistribution {
            bits,
            states: acc.keys().copied().collect(),
            probs: acc.values().copied().collect(),
        }
    }
}

/// Gibbs law `π(x) ∝ e^{−βH(x)}` over `{0,1}^n`.
pub fn enumerate_gibbs(code: &ParityCheckCode, beta: f64) -> Result<ExactDistribution> {
    guard_bits("bits for Gibbs enumeration", code.bits(), 20)?;
    let n = code.bits();
    let logw: Vec<f64> = (0..1u64 << n)
        .map(|m| {
            let e = code.energy(&BitVector::from_mask(n, m)).expect("length n");
            if e == 0 {
                0.0
            } else {
                -beta * e as f64
            }
        })
        .collect();
    ExactDistribution::from_full_log_weights(n, &logw)
}

/// `k(A) = dim ker(h_A)` for every `A ⊆ E`, indexed by mask.
pub fn k_table(code: &ParityCheckCode, exec: Execution) -> Result<Vec<usize>> {
    guard_bits("checks for k(A) table", code.checks(), 20)?;
    let c = code.checks();
    Ok(par::map_indices(exec, 1usize << c, |a| {
        code.subset_kernel_dim(&BitVector::from_mask(c, a as u64))
    }))
}

fn rc_log_weights(c: usize, p: f64, ks: &[usize]) -> Vec<f64> {
    ks.iter()
        .enumerate()
        .map(|(a, &k)| log_bernoulli((a as u64).count_ones() as usize, c, p) + k as f64 * std::f64::consts::LN_2)
        .collect()
}

/// Random-cluster law `φ(A) ∝ (p/(1−p))^{|A|} 2^{k(A)}`.
pub fn enumerate_rc(code: &ParityCheckCode, p: f64) -> Result<ExactDistribution> {
    let ks = k_table(code, Execution::best())?;
    enumerate_rc_with(code, p, &ks)
}

pub fn enumerate_rc_with(code: &ParityCheckCode, p: f64, ks: &[usize]) -> Result<ExactDistribution> {
    ExactDistribution::from_full_log_weights(code.checks(), &rc_log_weights(code.checks(), p, ks))
}

/// Even-cover law `ξ_{M,q}(A) ∝ (q/(1−q))^{|A|} 1(1_A ∈ ker Mᵀ)`, enumerating the kernel directly.
pub fn enumerate_even_covers(m: &BitMatrix, q: f64) -> Result<ExactDistribution> {
    let basis = gf2::kernel_basis(&m.transpose());
    weighted_subspace(m.rows(), &basis, q)
}

/// Syndrome law `ζ(s) ∝ e^{−2β|s|} 1(s ∈ col h)`.
pub fn enumerate_syndromes(h: &BitMatrix, beta: f64) -> Result<ExactDistribution> {
    let basis = gf2::column_space_basis(h);
    guard_bits("syndrome space dimension", basis.len(), 20)?;
    let mut states: Vec<u64> = gf2::span(&basis, h.rows()).iter().map(mask).collect();
    states.sort_unstable();
    let logw: Vec<f64> = states
        .iter()
        .map(|s| if *s == 0 { 0.0 } else { -2.0 * beta * s.count_ones() as f64 })
        .collect();
    ExactDistribution::from_log_weights(h.rows(), states, &logw)
}

fn weighted_subspace(len: usize, basis: &[BitVector], q: f64) -> Result<ExactDistribution> {
    guard_bits("subspace dimension", basis.len(), 20)?;
    guard_bits("vector length", len, 63)?;
    let mut states: Vec<u64> = gf2::span(basis, len).iter().map(mask).collect();
    states.sort_unstable();
    let logw: Vec<f64> = states
        .iter()
        .map(|s| log_bernoulli(s.count_ones() as usize, len, q))
        .collect();
    ExactDistribution::from_log_weights(len, states, &logw)
}

/// FK joint law `μ(x, A) ∝ (p/(1−p))^{|A|} 1(A ⊆ E(x))`; state mask `x | A << n`.
pub fn enumerate_fk(code: &ParityCheckCode, p: f64) -> Result<ExactDistribution> {
    let (n, c) = (code.bits(), code.checks());
    guard_bits("joint FK bits", n + c, MAX_ENUM_BITS)?;
    let mut states = Vec::new();
    let mut logw = Vec::new();
    for x in 0..1u64 << n {
        let sat = mask(&code.satisfied_checks(&BitVector::from_mask(n, x))?);
        for a in 0..1u64 << c {
            if a & !sat == 0 {
                states.push(x | (a << n));
                logw.push(log_bernoulli(a.count_ones() as usize, c, p));
            }
        }
    }
    let order = sort_permutation(&states);
    let states: Vec<u64> = order.iter().map(|&i| states[i]).collect();
    let logw: Vec<f64> = order.iter().map(|&i| logw[i]).collect();
    ExactDistribution::from_log_weights(n + c, states, &logw)
}

fn sort_permutation(v: &[u64]) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..v.len()).collect();
    idx.sort_unstable_by_key(|&i| v[i]);
    idx
}

/// Push an even-cover law through a lift: add every other check independently
/// at `lift.add_rate()`, then complement for the dual direction.
pub fn lift_pushforward(source: &ExactDistribution, lift: &LiftParams) -> Result<ExactDistribution> {
    let c = source.bits();
    guard_bits("checks for lift pushforward", c, 20)?;
    let full = (1u64 << c) - 1;
    let rate = lift.add_rate();
    let mut out = vec![0.0; 1usize << c];
    for (&w, &pw) in source.states().iter().zip(source.probs()) {
        if pw == 0.0 {
            continue;
        }
        let free = full & !w;
        let nfree = free.count_ones() as usize;
        // iterate submasks t of `free`
        let mut t = free;
        loop {
            let z = w | t;
            let pr = pw * log_bernoulli(t.count_ones() as usize, nfree, rate).exp();
            let target = match lift.direction {
                Direction::Primal => z,
                Direction::Dual => full & !z,
            };
            out[target as usize] += pr;
            if t == 0 {
                break;
            }
            t = (t - 1) & free;
        }
    }
    Ok(ExactDistribution {
        bits: c,
        states: (0..=full).collect(),
        probs: out,
    })
}

/// Deliberate corruptions used as negative controls.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Fault {
    #[default]
    None,
    /// Metropolis acceptance uses the reciprocal weight ratio.
    InvertedMetropolis,
}

/// Dense row-stochastic matrix over enumerated states (`0..2^bits` in mask order).
#[derive(Clone, Debug, PartialEq)]
pub struct TransitionMatrix {
    bits: usize,
    m: DMatrix<f64>,
}

impl TransitionMatrix {
    pub fn from_dense(bits: usize, m: DMatrix<f64>) -> Result<Self> {
        let n = 1usize << bits;
        if m.nrows() != n || m.ncols() != n {
            return Err(Error::DimensionMismatch {
                context: "transition matrix size",
                expected: n,
                found: m.nrows(),
            });
        }
        Ok(Self { bits, m })
    }

    fn from_rows(bits: usize, rows: Vec<Vec<(usize, f64)>>) -> Self {
        let n = rows.len();
        let mut m = DMatrix::zeros(n, n);
        for (i, row) in rows.into_iter().enumerate() {
            for (j, v) in row {
                m[(i, j)] += v;
            }
        }
        Self { bits, m }
    }

    pub fn bits(&self) -> usize {
        self.bits
    }

    pub fn size(&self) -> usize {
        self.m.nrows()
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.m[(i, j)]
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.m
    }

    /// `max_i |Σ_j P(i,j) − 1|`.
    pub fn row_sum_error(&self) -> f64 {
        self.m
            .row_iter()
            .map(|r| (r.sum() - 1.0).abs())
            .fold(0.0, f64::max)
    }

    pub fn min_entry(&self) -> f64 {
        self.m.min()
    }

    /// Row vector `μP` for a dense distribution `μ`.
    pub fn apply(&self, mu: &[f64]) -> Vec<f64> {
        let v = nalgebra::RowDVector::from_row_slice(mu);
        (v * &self.m).iter().copied().collect()
    }

    /// `‖πP − π‖₁`.
    pub fn stationarity_error(&self, pi: &ExactDistribution) -> f64 {
        let d = pi.dense();
        self.apply(&d).iter().zip(&d).map(|(a, b)| (a - b).abs()).sum()
    }

    /// `max_{i,j} |π_i P_ij − π_j P_ji|`.
    pub fn detailed_balance_error(&self, pi: &ExactDistribution) -> f64 {
        let d = pi.dense();
        let n = self.size();
        let mut worst: f64 = 0.0;
        for i in 0..n {
            for j in i + 1..n {
                worst = worst.max((d[i] * self.m[(i, j)] - d[j] * self.m[(j, i)]).abs());
            }
        }
        worst
    }

    /// Largest off-diagonal excess of `lower ≤ self ≤ factor·lower`.
    pub fn entrywise_sandwich_excess(&self, lower: &TransitionMatrix, factor: f64) -> f64 {
        let n = self.size();
        let mut worst = f64::NEG_INFINITY;
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    let (a, b) = (lower.m[(i, j)], self.m[(i, j)]);
                    worst = worst.max(a - b).max(b - factor * a);
                }
            }
        }
        worst
    }
}

fn guard_states(bits: usize) -> Result<()> {
    if bits >= usize::BITS as usize || (1usize << bits) > MAX_MATRIX_STATES {
        return Err(Error::SizeLimit {
            what: "transition matrix states",
            limit: MAX_MATRIX_STATES,
            actual: 1usize.checked_shl(bits as u32).unwrap_or(usize::MAX),
        });
    }
    Ok(())
}

/// Exact one-step matrix of a configuration or RC kernel.
pub fn build_transition_matrix(kernel: KernelId, code: &ParityCheckCode, params: &ChainParams) -> Result<TransitionMatrix> {
    build_transition_matrix_with(kernel, code, params, Fault::None, Execution::best())
}

pub fn build_transition_matrix_with(
    kernel: KernelId,
    code: &ParityCheckCode,
    params: &ChainParams,
    fault: Fault,
    exec: Execution,
) -> Result<TransitionMatrix> {
    match kernel {
        KernelId::Sw => sw_matrix(code, params.p(), exec),
        KernelId::Glauber => glauber_matrix(code, params.beta(), exec),
        KernelId::SwRc => {
            guard_states(code.checks())?;
            let ks = k_table(code, exec)?;
            Ok(sw_rc_matrix(code, params.p(), &ks, exec))
        }
        KernelId::MetropolisRc => {
            guard_states(code.checks())?;
            let ks = k_table(code, exec)?;
            Ok(metropolis_matrix(code.checks(), params.p(), &ks, fault, exec))
        }
        KernelId::SingleCheck => {
            guard_states(code.checks())?;
            let ks = k_table(code, exec)?;
            Ok(single_check_matrix(code.checks(), params.p(), &ks, exec))
        }
        KernelId::Worm => Err(Error::InvalidParameter(
            "the worm kernel needs a coupled graph; use worm::worm_transition_matrix".into(),
        )),
    }
}

/// `P(x, y) = Σ_{A ⊆ E(x) ∩ E(y)} p^{|A|} (1−p)^{|E(x)|−|A|} 2^{−k(A)}`,
/// evaluated from per-size subset-sum (zeta) transforms of `2^{−k(A)}`.
fn sw_matrix(code: &ParityCheckCode, p: f64, exec: Execution) -> Result<TransitionMatrix> {
    let (n, c) = (code.bits(), code.checks());
    guard_states(n)?;
    let ks = k_table(code, exec)?;
    let size = 1usize << c;
    let layers: Vec<Vec<f64>> = par::map_indices(exec, c + 1, |j| {
        let mut f: Vec<f64> = (0..size)
            .map(|a| {
                if a.count_ones() as usize == j {
                    (-(ks[a] as f64) * std::f64::consts::LN_2).exp()
                } else {
                    0.0
                }
            })
            .collect();
        for bit in 0..c {
            for a in 0..size {
                if a >> bit & 1 == 1 {
                    f[a] += f[a ^ (1 << bit)];
                }
            }
        }
        f
    });
    let sat: Vec<u64> = (0..1u64 << n)
        .map(|x| mask(&code.satisfied_checks(&BitVector::from_mask(n, x)).expect("length n")))
        .collect();
    let rows = par::map_indices(exec, 1 << n, |x| {
        let ex = sat[x];
        let deg = ex.count_ones() as usize;
        let coeff: Vec<f64> = (0..=c)
            .map(|j| if j <= deg { log_bernoulli(j, deg, p).exp() } else { 0.0 })
            .collect();
        (0..1usize << n)
            .map(|y| {
                let s = (ex & sat[y]) as usize;
                let v: f64 = (0..=deg).map(|j| coeff[j] * layers[j][s]).sum();
                (y, v)
            })
            .collect()
    });
    Ok(TransitionMatrix::from_rows(n, rows))
}

/// `A → x ∈ ker(h_A)` uniformly, then keep each satisfied check with probability `p`.
fn sw_rc_matrix(code: &ParityCheckCode, p: f64, ks: &[usize], exec: Execution) -> TransitionMatrix {
    let c = code.checks();
    let rows = par::map_indices(exec, 1 << c, |a| {
        let sub = code
            .h()
            .row_submatrix_mask(&BitVector::from_mask(c, a as u64))
            .expect("subset over checks");
        let xs = gf2::span(&gf2::kernel_basis(&sub), code.bits());
        let wx = (-(ks[a] as f64) * std::f64::consts::LN_2).exp();
        let mut row = Vec::new();
        for x in &xs {
            let ex = mask(&code.satisfied_checks(x).expect("length n"));
            let deg = ex.count_ones() as usize;
            let mut b = ex;
            loop {
                row.push((b as usize, wx * log_bernoulli(b.count_ones() as usize, deg, p).exp()));
                if b == 0 {
                    break;
                }
                b = (b - 1) & ex;
            }
        }
        row
    });
    TransitionMatrix::from_rows(c, rows)
}

fn metropolis_matrix(c: usize, p: f64, ks: &[usize], fault: Fault, exec: Execution) -> TransitionMatrix {
    let log_odds = p.ln() - (-p).ln_1p();
    let rows = par::map_indices(exec, 1 << c, |a| {
        let mut row = Vec::with_capacity(c + 1);
        let mut moved = 0.0;
        for e in 0..c {
            let b = a ^ (1 << e);
            let adding = b > a;
            let dk = ks[b] as f64 - ks[a] as f64;
            let mut log_ratio = dk * std::f64::consts::LN_2 + if adding { log_odds } else { -log_odds };
            if fault == Fault::InvertedMetropolis {
                log_ratio = -log_ratio;
            }
            let acc = log_ratio.exp().min(1.0) / (2.0 * c as f64);
            moved += acc;
            row.push((b, acc));
        }
        row.push((a, 1.0 - moved));
        row
    });
    TransitionMatrix::from_rows(c, rows)
}

fn single_check_matrix(c: usize, p: f64, ks: &[usize], exec: Execution) -> TransitionMatrix {
    let rows = par::map_indices(exec, 1 << c, |a| {
        let w = 1.0 / (2.0 * c as f64);
        let mut row = vec![(a, 0.5)];
        for e in 0..c {
            let bit = 1 << e;
            if a & bit != 0 {
                row.push((a ^ bit, w * (1.0 - p)));
                row.push((a, w * p));
            } else if ks[a | bit] == ks[a] {
                row.push((a | bit, w * p));
                row.push((a, w * (1.0 - p)));
            } else {
                row.push((a | bit, w * p / 2.0));
                row.push((a, w * (1.0 - p / 2.0)));
            }
        }
        row
    });
    TransitionMatrix::from_rows(c, rows)
}

fn glauber_matrix(code: &ParityCheckCode, beta: f64, exec: Execution) -> Result<TransitionMatrix> {
    let n = code.bits();
    guard_states(n)?;
    let rows = par::map_indices(exec, 1 << n, |x| {
        let xv = BitVector::from_mask(n, x as u64);
        let mut row = Vec::with_capacity(n + 1);
        let mut moved = 0.0;
        for i in 0..n {
            let d = crate::dynamics::energy_change(code, &xv, i);
            let acc = if d <= 0 { 1.0 } else { (-beta * d as f64).exp() } / n as f64;
            moved += acc;
            row.push((x ^ (1 << i), acc));
        }
        row.push((x, 1.0 - moved));
        row
    });
    Ok(TransitionMatrix::from_rows(n, rows))
}

/// `1 − max{|λ| : λ ≠ 1}` for a chain reversible with respect to `pi`.
///
/// The spectrum is taken from the symmetric matrix `D^{1/2} P D^{−1/2}`
/// restricted to the support of `pi`; exactly one top eigenvalue is dropped.
pub fn spectral_gap(p: &TransitionMatrix, pi: &ExactDistribution) -> Result<f64> {
    let deviation = p.detailed_balance_error(pi);
    if deviation > 1e-10 {
        return Err(Error::NonReversible { deviation });
    }
    let d = pi.dense();
    let support: Vec<usize> = (0..d.len()).filter(|&i| d[i] > 0.0).collect();
    let k = support.len();
    if k <= 1 {
        return Ok(1.0);
    }
    let s = DMatrix::from_fn(k, k, |a, b| {
        let (i, j) = (support[a], support[b]);
        let sij = d[i].sqrt() * p.get(i, j) / d[j].sqrt();
        let sji = d[j].sqrt() * p.get(j, i) / d[i].sqrt();
        0.5 * (sij + sji)
    });
    let mut ev: Vec<f64> = SymmetricEigen::new(s).eigenvalues.iter().copied().collect();
    ev.sort_by(|a, b| b.partial_cmp(a).expect("finite eigenvalues"));
    let rest = ev[1..].iter().map(|l| l.abs()).fold(0.0, f64::max);
    Ok((1.0 - rest).clamp(0.0, 1.0))
}

/// Worst-start `ℓ1` distance `max_x Σ_y |P^t(x,y) − π(y)|` for `t = 0..=steps`.
pub fn distance_profile(p: &TransitionMatrix, pi: &ExactDistribution, steps: usize) -> Vec<f64> {
    let d = pi.dense();
    let n = p.size();
    let mut pt = DMatrix::<f64>::identity(n, n);
    let mut out = Vec::with_capacity(steps + 1);
    let dist = |m: &DMatrix<f64>| {
        m.row_iter()
            .map(|r| r.iter().zip(&d).map(|(a, b)| (a - b).abs()).sum::<f64>())
            .fold(0.0, f64::max)
    };
    out.push(dist(&pt));
    for _ in 0..steps {
        pt = &pt * p.matrix();
        out.push(dist(&pt));
    }
    out
}

/// Smallest `t` with `max_x Σ_y |P^t(x,y) − π(y)| ≤ e^{−1}`.
pub fn exact_mixing_time(p: &TransitionMatrix, pi: &ExactDistribution, max_steps: usize) -> Result<usize> {
    let threshold = (-1.0f64).exp();
    let d = pi.dense();
    let n = p.size();
    let mut pt = DMatrix::<f64>::identity(n, n);
    for t in 0..=max_steps {
        let worst = pt
            .row_iter()
            .map(|r| r.iter().zip(&d).map(|(a, b)| (a - b).abs()).sum::<f64>())
            .fold(0.0, f64::max);
        if worst <= threshold {
            return Ok(t);
        }
        pt = &pt * p.matrix();
    }
    Err(Error::NotConverged { steps: max_steps })
}

/// One named verification outcome.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckResult {
    pub name: String,
    /// For equalities the largest absolute deviation; for bounds the largest
    /// excess `value − bound` (nonpositive when the bound holds).
    pub max_deviation: f64,
    pub tolerance: f64,
    pub passed: bool,
}

impl CheckResult {
    pub fn equality(name: impl Into<String>, deviation: f64, tolerance: f64) -> Self {
        Self {
            name: name.into(),
            max_deviation: deviation,
            tolerance,
            passed: deviation <= tolerance,
        }
    }

    pub fn bound(name: impl Into<String>, excess: f64, tolerance: f64) -> Self {
        Self::equality(name, excess, tolerance)
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub instance: String,
    pub checks: Vec<CheckResult>,
}

impl Report {
    pub fn new(instance: impl Into<String>) -> Self {
        Self {
            instance: instance.into(),
            checks: Vec::new(),
        }
    }

    pub fn push(&mut self, check: CheckResult) {
        self.checks.push(check);
    }

    pub fn extend(&mut self, other: Report) {
        self.checks.extend(other.checks);
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &CheckResult> {
        self.checks.iter().filter(|c| !c.passed)
    }
}

/// Sparse real matrix stored by rows, used for the FK-space operators.
#[derive(Clone, Debug)]
pub struct SparseOperator {
    cols: usize,
    rows: Vec<Vec<(usize, f64)>>,
}

impl SparseOperator {
    pub fn new(cols: usize, rows: Vec<Vec<(usize, f64)>>) -> Self {
        Self { cols, rows }
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows.len(), self.cols)
    }

    pub fn mul(&self, other: &SparseOperator) -> SparseOperator {
        assert_eq!(self.cols, other.rows.len(), "operator shapes");
        let rows = self
            .rows
            .iter()
            .map(|row| {
                let mut acc: HashMap<usize, f64> = HashMap::new();
                for &(k, a) in row {
                    for &(j, b) in &other.rows[k] {
                        *acc.entry(j).or_default() += a * b;
                    }
                }
                let mut v: Vec<(usize, f64)> = acc.into_iter().collect();
                v.sort_unstable_by_key(|e| e.0);
                v
            })
            .collect();
        SparseOperator {
            cols: other.cols,
            rows,
        }
    }

    pub fn add(&self, other: &SparseOperator) -> SparseOperator {
        assert_eq!(self.shape(), other.shape(), "operator shapes");
        let rows = self
            .rows
            .iter()
            .zip(&other.rows)
            .map(|(a, b)| {
                let mut acc: HashMap<usize, f64> = HashMap::new();
                for &(j, v) in a.iter().chain(b) {
                    *acc.entry(j).or_default() += v;
                }
                let mut v: Vec<(usize, f64)> = acc.into_iter().collect();
                v.sort_unstable_by_key(|e| e.0);
                v
            })
            .collect();
        SparseOperator { cols: self.cols, rows }
    }

    pub fn scale(&self, s: f64) -> SparseOperator {
        SparseOperator {
            cols: self.cols,
            rows: self
                .rows
                .iter()
                .map(|r| r.iter().map(|&(j, v)| (j, v * s)).collect())
                .collect(),
        }
    }

    /// Largest entrywise difference between two operators of the same shape.
    pub fn max_abs_diff_sparse(&self, other: &SparseOperator) -> f64 {
        self.add(&other.scale(-1.0))
            .rows
            .iter()
            .flatten()
            .fold(0.0, |m, &(_, v)| m.max(v.abs()))
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        let mut m = DMatrix::zeros(self.rows.len(), self.cols);
        for (i, row) in self.rows.iter().enumerate() {
            for &(j, v) in row {
                m[(i, j)] += v;
            }
        }
        m
    }

    pub fn identity(n: usize) -> SparseOperator {
        SparseOperator {
            cols: n,
            rows: (0..n).map(|i| vec![(i, 1.0)]).collect(),
        }
    }

    /// Largest entrywise difference.
    pub fn max_abs_diff(&self, other: &DMatrix<f64>) -> f64 {
        (self.to_dense() - other).abs().max()
    }
}

/// Operators on the FK space `X × Ω` (index `x + 2^n · A`) and the RC space Ω.
pub struct FkOperators {
    /// `M(B, (x, A)) = 2^{−k(A)} 1(A = B) 1(x ∈ ker h_A)`.
    pub m: SparseOperator,
    /// `M*((x, A), B) = 1(A = B)`.
    pub m_star: SparseOperator,
    /// `T_e` for every check.
    pub t: Vec<SparseOperator>,
}

pub fn fk_operators(code: &ParityCheckCode, p: f64) -> Result<FkOperators> {
    let (n, c) = (code.bits(), code.checks());
    guard_bits("joint FK bits", n + c, 16)?;
    let ks = k_table(code, Execution::best())?;
    let joint = 1usize << (n + c);
    let idx = |x: usize, a: usize| x + (a << n);
    let sat: Vec<usize> = (0..1u64 << n)
        .map(|x| mask(&code.satisfied_checks(&BitVector::from_mask(n, x)).expect("length n")) as usize)
        .collect();
    let m_rows = (0..1usize << c)
        .map(|b| {
            let w = (-(ks[b] as f64) * std::f64::consts::LN_2).exp();
            (0..1usize << n)
                .filter(|&x| b & !sat[x] == 0)
                .map(|x| (idx(x, b), w))
                .collect()
        })
        .collect();
    let m_star_rows = (0..joint).map(|j| vec![(j >> n, 1.0)]).collect();
    let t = (0..c)
        .map(|e| {
            let bit = 1usize << e;
            let rows = (0..joint)
                .map(|j| {
                    let (x, a) = (j & ((1 << n) - 1), j >> n);
                    if sat[x] & bit != 0 {
                        vec![(idx(x, a | bit), p), (idx(x, a & !bit), 1.0 - p)]
                    } else {
                        vec![(j, 1.0)]
                    }
                })
                .collect();
            SparseOperator::new(joint, rows)
        })
        .collect();
    Ok(FkOperators {
        m: SparseOperator::new(joint, m_rows),
        m_star: SparseOperator::new(1 << c, m_star_rows),
        t,
    })
}

/// Verify the SW / SC operator factorisations and the algebra of `M`, `M*`, `T_e`.
pub fn appendix_a_operator_check(code: &ParityCheckCode, p: f64, tol: f64) -> Result<Report> {
    let ops = fk_operators(code, p)?;
    let params = ChainParams::from_p(p)?;
    let c = code.checks();
    let mut report = Report::new(format!("operator identities, p = {p}"));

    let mut prod = ops.t[0].clone();
    for t in &ops.t[1..] {
        prod = prod.mul(t);
    }
    let sw = ops.m.mul(&prod).mul(&ops.m_star);
    let p_sw = build_transition_matrix(KernelId::SwRc, code, &params)?;
    report.push(CheckResult::equality("P_SW = M (prod T_e) M*", sw.max_abs_diff(p_sw.matrix()), tol));

    let mut sum = ops.t[0].clone();
    for t in &ops.t[1..] {
        sum = sum.add(t);
    }
    let sc = SparseOperator::identity(1 << c)
        .scale(0.5)
        .add(&ops.m.mul(&sum).mul(&ops.m_star).scale(1.0 / (2.0 * c as f64)));
    let p_sc = build_transition_matrix(KernelId::SingleCheck, code, &params)?;
    report.push(CheckResult::equality(
        "P_SC = I/2 + M (sum T_e) M* / 2|E|",
        sc.max_abs_diff(p_sc.matrix()),
        tol,
    ));

    let mm = ops.m.mul(&ops.m_star);
    report.push(CheckResult::equality(
        "M M* = I",
        mm.max_abs_diff(&DMatrix::identity(1 << c, 1 << c)),
        tol,
    ));

    let mut idem: f64 = 0.0;
    let mut comm: f64 = 0.0;
    for (e, te) in ops.t.iter().enumerate() {
        idem = idem.max(te.mul(te).max_abs_diff_sparse(te));
        for tf in &ops.t[e + 1..] {
            comm = comm.max(te.mul(tf).max_abs_diff_sparse(&tf.mul(te)));
        }
    }
    report.push(CheckResult::equality("T_e T_e = T_e", idem, tol));
    report.push(CheckResult::equality("T_e T_f = T_f T_e", comm, tol));
    Ok(report)
}

/// Spectral and mixing-time comparison of SW, Metropolis and SC on the RC space.
pub fn comparison_check(code: &ParityCheckCode, p: f64, tol: f64) -> Result<Report> {
    let params = ChainParams::from_p(p)?;
    let phi = enumerate_rc(code, p)?;
    let met = build_transition_matrix(KernelId::MetropolisRc, code, &params)?;
    let sc = build_transition_matrix(KernelId::SingleCheck, code, &params)?;
    let sw = build_transition_matrix(KernelId::SwRc, code, &params)?;
    let (g_sc, g_met) = (spectral_gap(&sc, &phi)?, spectral_gap(&met, &phi)?);
    let mut report = Report::new(format!("chain comparison, p = {p}"));
    report.push(CheckResult::bound("gap(SC) <= gap(Metropolis)", g_sc - g_met, tol));
    report.push(CheckResult::bound("gap(Metropolis) <= 2 gap(SC)", g_met - 2.0 * g_sc, tol));
    let limit = 100_000;
    let t_met = exact_mixing_time(&met, &phi, limit)? as f64;
    let t_sw = exact_mixing_time(&sw, &phi, limit)? as f64;
    report.push(CheckResult::bound("tau(Metropolis) >= tau(SW)/2", t_sw / 2.0 - t_met, 0.0));
    Ok(report)
}

/// Instance-level options for [`coupling_suite`] and [`stationarity_suite`].
#[derive(Clone, Debug)]
pub struct SuiteOptions {
    pub tolerance: f64,
    pub fault: Fault,
    /// Graphs coupled to the code for the subspace-loss check, with their direction and Δ.
    pub couplings: Vec<(Graph, Direction, usize)>,
}

impl Default for SuiteOptions {
    fn default() -> Self {
        Self {
            tolerance: 1e-10,
            fault: Fault::None,
            couplings: Vec::new(),
        }
    }
}

/// The FK coupling, both lifts and (when graphs are given) the subspace loss.
pub fn coupling_suite(code: &ParityCheckCode, p: f64, opts: &SuiteOptions) -> Result<Report> {
    let params = ChainParams::from_p(p)?;
    let (n, c) = (code.bits(), code.checks());
    let tol = opts.tolerance;
    let mut report = Report::new(format!("couplings, p = {p}"));
    let phi = enumerate_rc(code, p)?;
    let pi = enumerate_gibbs(code, params.beta())?;

    let mu = enumerate_fk(code, p)?;
    let low = (1u64 << n) - 1;
    let mu_x = mu.map_states(n, |s| s & low);
    let mu_a = mu.map_states(c, |s| s >> n);
    report.push(CheckResult::equality("FK marginal on configurations = pi", mu_x.l1_distance(&pi), tol));
    report.push(CheckResult::equality("FK marginal on subsets = phi", mu_a.l1_distance(&phi), tol));

    for direction in [Direction::Primal, Direction::Dual] {
        let lift = LiftParams::new(direction, p)?;
        let source = even_cover_source(code, &lift)?;
        let pushed = lift_pushforward(&source, &lift)?;
        report.push(CheckResult::equality(
            format!("{direction} lift pushforward = phi"),
            pushed.l1_distance(&phi),
            tol,
        ));
    }

    for (graph, direction, delta) in &opts.couplings {
        let ratio = crate::worm::subspace_loss_ratio(code, graph, *direction, p)?;
        let bound = 2f64.powi(*delta as i32 + 1);
        report.push(CheckResult::bound(
            format!("{direction} subspace loss <= 2^(delta+1), delta = {delta}"),
            ratio - bound,
            tol,
        ));
    }
    Ok(report)
}

/// `ξ_{h, p↑}` over `ker(hᵀ)` (primal) or `ξ_{h⊥, p↓}` over `col(h)` (dual).
pub fn even_cover_source(code: &ParityCheckCode, lift: &LiftParams) -> Result<ExactDistribution> {
    match lift.direction {
        Direction::Primal => enumerate_even_covers(code.h(), lift.weight),
        Direction::Dual => enumerate_even_covers(&gf2::orthogonal_complement_generator(code.h()), lift.weight),
    }
}

/// Every kernel fixes its stationary law (`ℓ1`), rows are stochastic, and
/// the Metropolis / SC chains satisfy detailed balance.
pub fn stationarity_suite(code: &ParityCheckCode, p: f64, opts: &SuiteOptions) -> Result<Report> {
    let params = ChainParams::from_p(p)?;
    let tol = opts.tolerance;
    let mut report = Report::new(format!("stationarity, p = {p}"));
    let pi = enumerate_gibbs(code, params.beta())?;
    let phi = enumerate_rc(code, p)?;
    for kernel in [
        KernelId::Sw,
        KernelId::Glauber,
        KernelId::SwRc,
        KernelId::MetropolisRc,
        KernelId::SingleCheck,
    ] {
        let matrix = build_transition_matrix_with(kernel, code, &params, opts.fault, Execution::best())?;
        let target = if kernel.on_configurations() { &pi } else { &phi };
        report.push(CheckResult::equality(format!("{kernel} rows sum to 1"), matrix.row_sum_error(), tol));
        report.push(CheckResult::equality(
            format!("{kernel} fixes its stationary law"),
            matrix.stationarity_error(target),
            tol,
        ));
        if matches!(kernel, KernelId::MetropolisRc | KernelId::SingleCheck | KernelId::Glauber) {
            report.push(CheckResult::equality(
                format!("{kernel} detailed balance"),
                matrix.detailed_balance_error(target),
                tol,
            ));
        }
    }
    for (graph, _, _) in &opts.couplings {
        for lift_dir in [Direction::Primal, Direction::Dual] {
            let lift = LiftParams::new(lift_dir, p)?;
            let space = crate::worm::WormSpace::new(graph.clone(), lift.weight)?;
            if graph.edge_count() > 12 {
                continue;
            }
            let matrix = crate::worm::worm_transition_matrix(&space)?;
            let omega = crate::worm::enumerate_worm(&space)?;
            report.push(CheckResult::equality(
                format!("worm ({lift_dir} weight) fixes omega_g"),
                matrix.stationarity_error(&omega),
                tol,
            ));
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn k3() -> ParityCheckCode {
        ParityCheckCode::ising(&Graph::complete(3).unwrap()).unwrap()
    }

    fn single() -> ParityCheckCode {
        ParityCheckCode::new(BitMatrix::from_bit_rows(&["11"]).unwrap()).unwrap()
    }

    #[test]
    fn gibbs_k3_by_hand() {
        let pi = enumerate_gibbs(&k3(), 1.0).unwrap();
        let z = 2.0 + 6.0 * (-4.0f64).exp();
        assert!((pi.prob(0) - 1.0 / z).abs() < 1e-15);
        assert!((pi.prob(7) - 1.0 / z).abs() < 1e-15);
        assert!((pi.prob(1) - (-4.0f64).exp() / z).abs() < 1e-15);
        let uniform = enumerate_gibbs(&k3(), 0.0).unwrap();
        assert!(uniform.probs().iter().all(|&q| (q - 0.125).abs() < 1e-15));
        // constant on cosets of ker(h) = {000, 111}
        for x in 0..8u64 {
            assert!((pi.prob(x) - pi.prob(x ^ 7)).abs() < 1e-15);
        }
    }

    #[test]
    fn rc_examples() {
        let phi = enumerate_rc(&single(), 0.5).unwrap();
        assert!((phi.prob(0) - 2.0 / 3.0).abs() < 1e-15);
        assert!((phi.prob(1) - 1.0 / 3.0).abs() < 1e-15);
        let point = enumerate_rc(&k3(), 0.0).unwrap();
        assert_eq!(point.prob(0), 1.0);
    }

    #[test]
    fn even_cover_examples() {
        let trivial = enumerate_even_covers(&BitMatrix::identity(3), 0.3).unwrap();
        assert_eq!(trivial.states(), &[0]);
        let c3 = Graph::cycle(3).unwrap().incidence_matrix();
        let xi = enumerate_even_covers(&c3, 0.3).unwrap();
        assert_eq!(xi.states(), &[0, 7]);
        let r: f64 = 0.3 / 0.7;
        assert!((xi.prob(7) - r.powi(3) / (1.0 + r.powi(3))).abs() < 1e-15);
    }

    #[test]
    fn dual_cover_law_is_the_syndrome_law() {
        let code = crate::code::toric2d(2).unwrap().hx;
        for beta in [0.2, 0.7, 1.3] {
            let params = ChainParams::from_beta(beta).unwrap();
            let lift = LiftParams::new(Direction::Dual, params.p()).unwrap();
            let xi = even_cover_source(&code, &lift).unwrap();
            let zeta = enumerate_syndromes(code.h(), beta).unwrap();
            assert!(xi.l1_distance(&zeta) < 1e-12);
        }
    }

    #[test]
    fn metropolis_matrix_by_hand() {
        // h = [[1,1]]: states ∅ and {0}; adding the check lowers k from 2 to 1
        for p in [0.2, 0.5, 0.8] {
            let m = build_transition_matrix(KernelId::MetropolisRc, &single(), &ChainParams::from_p(p).unwrap()).unwrap();
            let r = p / (1.0 - p);
            let up = 0.5 * (r / 2.0).min(1.0);
            let down = 0.5 * (2.0 / r).min(1.0);
            assert!((m.get(0, 1) - up).abs() < 1e-15);
            assert!((m.get(1, 0) - down).abs() < 1e-15);
            assert!((m.get(0, 0) - (1.0 - up)).abs() < 1e-15);
        }
    }

    #[test]
    fn sw_matrix_detailed_balance_on_k3() {
        let code = k3();
        let params = ChainParams::from_beta(1.0).unwrap();
        let p = build_transition_matrix(KernelId::Sw, &code, &params).unwrap();
        let pi = enumerate_gibbs(&code, 1.0).unwrap();
        assert!(p.row_sum_error() < 1e-12);
        assert!(p.stationarity_error(&pi) < 1e-10);
        for i in 0..8 {
            for j in 0..8 {
                let lhs = p.get(i, j) * pi.probs()[i];
                let rhs = p.get(j, i) * pi.probs()[j];
                assert!((lhs - rhs).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn sw_matrix_matches_direct_enumeration() {
        // independent oracle: sum over every A ⊆ E(x) explicitly
        let code = ParityCheckCode::ising(&Graph::cycle(4).unwrap()).unwrap();
        for p in [0.0, 0.3, 1.0] {
            let params = ChainParams::from_p(p).unwrap();
            let fast = build_transition_matrix(KernelId::Sw, &code, &params).unwrap();
            for x in 0..16u64 {
                let xv = BitVector::from_mask(4, x);
                let ex = mask(&code.satisfied_checks(&xv).unwrap());
                let mut row = [0.0; 16];
                for a in 0..16u64 {
                    if a & !ex != 0 {
                        continue;
                    }
                    let pa = p.powi(a.count_ones() as i32) * (1.0 - p).powi((ex & !a).count_ones() as i32);
                    let sub = code.h().row_submatrix_mask(&BitVector::from_mask(4, a)).unwrap();
                    let ker = gf2::span(&gf2::kernel_basis(&sub), 4);
                    for y in &ker {
                        row[mask(y) as usize] += pa / ker.len() as f64;
                    }
                }
                for y in 0..16 {
                    assert!((fast.get(x as usize, y) - row[y]).abs() < 1e-14, "p={p} x={x} y={y}");
                }
            }
        }
    }

    #[test]
    fn sw_rc_stationary_on_single_check() {
        for p in [0.2, 0.5, 0.8] {
            let m = build_transition_matrix(KernelId::SwRc, &single(), &ChainParams::from_p(p).unwrap()).unwrap();
            let phi = enumerate_rc(&single(), p).unwrap();
            assert!(m.stationarity_error(&phi) < 1e-12);
        }
    }

    #[test]
    fn gap_examples() {
        let pi = ExactDistribution::from_full_log_weights(1, &[0.0, 0.0]).unwrap();
        let half = TransitionMatrix::from_dense(1, DMatrix::from_element(2, 2, 0.5)).unwrap();
        assert!((spectral_gap(&half, &pi).unwrap() - 1.0).abs() < 1e-12);
        let id = TransitionMatrix::from_dense(1, DMatrix::identity(2, 2)).unwrap();
        assert!(spectral_gap(&id, &pi).unwrap().abs() < 1e-12);
        assert_eq!(exact_mixing_time(&half, &pi, 10).unwrap(), 1);
        assert!(matches!(exact_mixing_time(&id, &pi, 10), Err(Error::NotConverged { .. })));
        let skew = TransitionMatrix::from_dense(1, DMatrix::from_row_slice(2, 2, &[0.0, 1.0, 0.5, 0.5])).unwrap();
        assert!(matches!(spectral_gap(&skew, &pi), Err(Error::NonReversible { .. })));
    }

    #[test]
    fn operator_identities_on_k3() {
        for p in [0.3, 0.5, 0.9] {
            let r = appendix_a_operator_check(&k3(), p, 1e-12).unwrap();
            assert!(r.passed(), "{r:#?}");
        }
    }

    #[test]
    fn comparison_on_k3() {
        for p in [0.2, 0.3, 0.5, 0.8, 0.9] {
            let r = comparison_check(&k3(), p, 1e-12).unwrap();
            assert!(r.passed(), "{r:#?}");
        }
    }

    #[test]
    fn entrywise_sandwich_holds_only_below_one_half() {
        let code = k3();
        for p in [0.1, 0.3, 0.5] {
            let params = ChainParams::from_p(p).unwrap();
            let met = build_transition_matrix(KernelId::MetropolisRc, &code, &params).unwrap();
            let sc = build_transition_matrix(KernelId::SingleCheck, &code, &params).unwrap();
            assert!(met.entrywise_sandwich_excess(&sc, 2.0) <= 1e-15, "p = {p}");
        }
        // above 1/2 a rank-lowering addition has P_Met = min(1, r/2)/2c > 2 P_SC = p/2c
        let params = ChainParams::from_p(0.8).unwrap();
        let met = build_transition_matrix(KernelId::MetropolisRc, &code, &params).unwrap();
        let sc = build_transition_matrix(KernelId::SingleCheck, &code, &params).unwrap();
        assert!(met.entrywise_sandwich_excess(&sc, 2.0) > 0.01);
    }

    #[test]
    fn fk_marginals_and_lifts_on_k3() {
        let r = coupling_suite(&k3(), ChainParams::from_beta(0.7).unwrap().p(), &SuiteOptions::default()).unwrap();
        assert!(r.passed(), "{r:#?}");
    }

    #[test]
    fn inverted_metropolis_is_caught() {
        let opts = SuiteOptions {
            fault: Fault::InvertedMetropolis,
            ..SuiteOptions::default()
        };
        let r = stationarity_suite(&k3(), 0.5, &opts).unwrap();
        let failed: Vec<&str> = r.failures().map(|c| c.name.as_str()).collect();
        assert!(failed.contains(&"metropolis-rc fixes its stationary law"), "{failed:?}");
        assert!(stationarity_suite(&k3(), 0.5, &SuiteOptions::default()).unwrap().passed());
    }

    #[test]
    fn distribution_helpers() {
        let a = ExactDistribution::from_log_weights(2, vec![0, 3], &[0.0, 0.0]).unwrap();
        let b = ExactDistribution::from_log_weights(2, vec![1, 3], &[0.0, 0.0]).unwrap();
        assert!((a.l1_distance(&b) - 1.0).abs() < 1e-15);
        assert!(ExactDistribution::from_log_weights(2, vec![3, 1], &[0.0, 0.0]).is_err());
        assert!(ExactDistribution::from_log_weights(1, vec![0], &[f64::NEG_INFINITY]).is_err());
    }
}
