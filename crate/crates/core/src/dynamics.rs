//! Markov kernels on error configurations and on check subsets.
//!
//! Every kernel is a pure function of `(state, parameters, rng)`: the same
//! seeded stream reproduces the same trajectory bit for bit.

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::code::ParityCheckCode;
use crate::error::{Error, Result};
use crate::gf2::{BitVector, Echelon};

/// Inverse temperature and the derived bond probability `p = 1 − e^{−2β}`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChainParams {
    beta: f64,
    p: f64,
    pub seed: u64,
}

impl ChainParams {
    /// `beta` may be `f64::INFINITY` (then `p = 1`).
    pub fn from_beta(beta: f64) -> Result<Self> {
        if beta.is_nan() || beta < 0.0 {
            return Err(Error::InvalidParameter(format!("beta must be >= 0, got {beta}")));
        }
        let p = if beta.is_infinite() { 1.0 } else { -(-2.0 * beta).exp_m1() };
        Ok(Self { beta, p, seed: 0 })
    }

    pub fn from_p(p: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::InvalidParameter(format!("p must lie in [0, 1], got {p}")));
        }
        let beta = if p == 1.0 { f64::INFINITY } else { -(-p).ln_1p() / 2.0 };
        Ok(Self { beta, p, seed: 0 })
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    /// `ln(p / (1 − p))`, possibly infinite.
    pub fn log_odds(&self) -> f64 {
        self.p.ln() - (-self.p).ln_1p()
    }
}

#[inline]
fn bernoulli<R: Rng + ?Sized>(rng: &mut R, p: f64) -> bool {
    // gen::<f64>() lies in [0, 1), so p = 1 always fires and p = 0 never does
    rng.gen::<f64>() < p
}

/// Accept with probability `min{1, e^{log_ratio}}`.
#[inline]
fn metropolis_accept<R: Rng + ?Sized>(rng: &mut R, log_ratio: f64) -> bool {
    log_ratio >= 0.0 || rng.gen::<f64>() < log_ratio.exp()
}

fn check_config(code: &ParityCheckCode, x: &BitVector) -> Result<()> {
    if x.len() != code.bits() {
        return Err(Error::DimensionMismatch {
            context: "configuration length",
            expected: code.bits(),
            found: x.len(),
        });
    }
    Ok(())
}

fn check_subset(code: &ParityCheckCode, a: &BitVector) -> Result<()> {
    if a.len() != code.checks() {
        return Err(Error::DimensionMismatch {
            context: "check subset length",
            expected: code.checks(),
            found: a.len(),
        });
    }
    Ok(())
}

/// Cluster formation: keep each check of `satisfied` independently with probability `p`.
pub fn cluster_formation<R: Rng + ?Sized>(satisfied: &BitVector, p: f64, rng: &mut R) -> BitVector {
    let mut a = BitVector::zeros(satisfied.len());
    for e in satisfied.iter_ones() {
        if bernoulli(rng, p) {
            a.set(e, true);
        }
    }
    a
}

/// Cluster update: a uniform element of `ker(h_A)`.
pub fn cluster_update<R: Rng + ?Sized>(code: &ParityCheckCode, a: &BitVector, rng: &mut R) -> BitVector {
    let sub = code.h().row_submatrix_mask(a).expect("subset length checked by caller");
    Echelon::new(&sub).sample_kernel(rng)
}

/// One step of the code Swendsen–Wang chain on configurations (`x → A → x'`).
pub fn sw_step<R: Rng + ?Sized>(
    code: &ParityCheckCode,
    params: &ChainParams,
    x: &BitVector,
    rng: &mut R,
) -> Result<BitVector> {
    check_config(code, x)?;
    let satisfied = code.satisfied_checks(x)?;
    let a = cluster_formation(&satisfied, params.p, rng);
    Ok(cluster_update(code, &a, rng))
}

/// The same chain viewed on check subsets (`A → x → A'`); stationary law φ.
pub fn sw_rc_step<R: Rng + ?Sized>(
    code: &ParityCheckCode,
    params: &ChainParams,
    a: &BitVector,
    rng: &mut R,
) -> Result<BitVector> {
    check_subset(code, a)?;
    let x = cluster_update(code, a, rng);
    let satisfied = code.satisfied_checks(&x)?;
    Ok(cluster_formation(&satisfied, params.p, rng))
}

/// Whether adding check `e` to `a` lowers `k`, i.e. row `e` is independent of the rows in `a ∖ e`.
pub fn adding_lowers_k(code: &ParityCheckCode, a: &BitVector, e: usize) -> bool {
    let mut rest = a.clone();
    rest.set(e, false);
    let sub = code.h().row_submatrix_mask(&rest).expect("subset over checks");
    !Echelon::new(&sub).contains(code.h().row(e))
}

/// `ln φ(A ⊕ e) − ln φ(A)` up to the shared normalisation.
fn flip_log_ratio(code: &ParityCheckCode, params: &ChainParams, a: &BitVector, e: usize) -> f64 {
    let drop = adding_lowers_k(code, a, e);
    let adding = !a.get(e);
    // k(A ∪ e) − k(A ∖ e) is −1 or 0
    let dk = if drop { -std::f64::consts::LN_2 } else { 0.0 };
    if adding {
        params.log_odds() + dk
    } else {
        -params.log_odds() - dk
    }
}

/// Lazy Metropolis single-check flip for the random-cluster model.
pub fn metropolis_rc_step<R: Rng + ?Sized>(
    code: &ParityCheckCode,
    params: &ChainParams,
    a: &BitVector,
    rng: &mut R,
) -> Result<BitVector> {
    check_subset(code, a)?;
    let mut next = a.clone();
    if rng.gen::<bool>() {
        return Ok(next);
    }
    let e = rng.gen_range(0..code.checks());
    if metropolis_accept(rng, flip_log_ratio(code, params, a, e)) {
        next.flip(e);
    }
    Ok(next)
}

/// Lazy single-check (SC) update used in the spectral comparison with SW.
pub fn single_check_step<R: Rng + ?Sized>(
    code: &ParityCheckCode,
    params: &ChainParams,
    a: &BitVector,
    rng: &mut R,
) -> Result<BitVector> {
    check_subset(code, a)?;
    let mut next = a.clone();
    if rng.gen::<bool>() {
        return Ok(next);
    }
    let e = rng.gen_range(0..code.checks());
    if a.get(e) || !adding_lowers_k(code, a, e) {
        next.set(e, bernoulli(rng, params.p));
    } else if bernoulli(rng, params.p / 2.0) {
        next.set(e, true);
    }
    Ok(next)
}

/// Single-bit Metropolis (Glauber-type) update of a configuration.
pub fn glauber_step<R: Rng + ?Sized>(
    code: &ParityCheckCode,
    params: &ChainParams,
    x: &BitVector,
    rng: &mut R,
) -> Result<BitVector> {
    check_config(code, x)?;
    let i = rng.gen_range(0..code.bits());
    let mut y = x.clone();
    y.flip(i);
    let delta = energy_change(code, x, i);
    if delta <= 0 || metropolis_accept(rng, -params.beta * delta as f64) {
        Ok(y)
    } else {
        Ok(x.clone())
    }
}

/// `H(x ⊕ e_i) − H(x)`: each check containing `i` toggles.
pub fn energy_change(code: &ParityCheckCode, x: &BitVector, i: usize) -> i64 {
    let mut delta = 0i64;
    for row in code.h().row_vectors() {
        if row.get(i) {
            delta += if row.dot(x) { -2 } else { 2 };
        }
    }
    delta
}

/// Direction of a lift between even covers and RC configurations.
pub use crate::code::Direction as LiftDirection;

/// Weight parameter of the even-cover model feeding a lift.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LiftParams {
    pub direction: LiftDirection,
    /// `p↑ = p/2` (primal) or `p↓ = (1 − p)/(2 − p)` (dual); always in `[0, 1/2]`.
    pub weight: f64,
    /// The RC parameter `p` the lift targets.
    pub p: f64,
}

impl LiftParams {
    pub fn new(direction: LiftDirection, p: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::InvalidParameter(format!("p must lie in [0, 1], got {p}")));
        }
        let weight = match direction {
            LiftDirection::Primal => p / 2.0,
            LiftDirection::Dual => (1.0 - p) / (2.0 - p),
        };
        Ok(Self { direction, weight, p })
    }

    /// Probability of adding each edge outside the cover: `weight / (1 − weight)`.
    pub fn add_rate(&self) -> f64 {
        self.weight / (1.0 - self.weight)
    }
}

/// Primal lift: `W ∪` (each other check independently at rate `p↑/(1−p↑)`).
pub fn primal_lift_sample<R: Rng + ?Sized>(
    code: &ParityCheckCode,
    p: f64,
    w: &BitVector,
    rng: &mut R,
) -> Result<BitVector> {
    check_subset(code, w)?;
    if !code.h().transpose_mul_vec(w)?.is_zero() {
        return Err(Error::NotEvenCover("h^T 1_W is nonzero".into()));
    }
    let lift = LiftParams::new(LiftDirection::Primal, p)?;
    Ok(add_independently(w, lift.add_rate(), rng))
}

/// Dual lift: `S ∪` (each other check at rate `1 − p`), then complemented.
pub fn dual_lift_sample<R: Rng + ?Sized>(
    code: &ParityCheckCode,
    p: f64,
    s: &BitVector,
    rng: &mut R,
) -> Result<BitVector> {
    check_subset(code, s)?;
    if crate::gf2::lex_min_solution(code.h(), s)?.is_none() {
        return Err(Error::NotEvenCover("1_S is not in col(h)".into()));
    }
    let lift = LiftParams::new(LiftDirection::Dual, p)?;
    Ok(add_independently(s, lift.add_rate(), rng).not())
}

fn add_independently<R: Rng + ?Sized>(base: &BitVector, rate: f64, rng: &mut R) -> BitVector {
    let mut out = base.clone();
    for e in 0..base.len() {
        if !base.get(e) && bernoulli(rng, rate) {
            out.set(e, true);
        }
    }
    out
}

/// The chains exposed to the CLI and the oracle.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum KernelId {
    /// Code SW on configurations.
    Sw,
    /// Code SW on check subsets.
    SwRc,
    MetropolisRc,
    SingleCheck,
    Glauber,
    Worm,
}

impl KernelId {
    pub const ALL: [KernelId; 6] = [
        KernelId::Sw,
        KernelId::SwRc,
        KernelId::MetropolisRc,
        KernelId::SingleCheck,
        KernelId::Glauber,
        KernelId::Worm,
    ];

    pub fn name(self) -> &'static str {
        match self {
            KernelId::Sw => "sw",
            KernelId::SwRc => "sw-rc",
            KernelId::MetropolisRc => "metropolis-rc",
            KernelId::SingleCheck => "single-check",
            KernelId::Glauber => "glauber",
            KernelId::Worm => "worm",
        }
    }

    /// Kernels whose state is an error configuration rather than a subset of checks.
    pub fn on_configurations(self) -> bool {
        matches!(self, KernelId::Sw | KernelId::Glauber)
    }
}

impl fmt::Display for KernelId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for KernelId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        KernelId::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::InvalidParameter(format!("unknown chain {s:?}")))
    }
}

/// State of any of the chains.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ChainState {
    /// Error configuration `x ∈ {0,1}^n`.
    Config(BitVector),
    /// Random-cluster subset `A ⊆ E`.
    Rc(BitVector),
    /// Worm configuration `S ⊆ E(g)`.
    Worm(BitVector),
}

impl ChainState {
    pub fn bits(&self) -> &BitVector {
        match self {
            ChainState::Config(v) | ChainState::Rc(v) | ChainState::Worm(v) => v,
        }
    }
}

/// Advance a configuration or RC state by one step of `kernel`. The worm chain
/// needs a coupled graph and lives in [`crate::worm`].
pub fn step<R: Rng + ?Sized>(
    kernel: KernelId,
    code: &ParityCheckCode,
    params: &ChainParams,
    state: &BitVector,
    rng: &mut R,
) -> Result<BitVector> {
    match kernel {
        KernelId::Sw => sw_step(code, params, state, rng),
        KernelId::SwRc => sw_rc_step(code, params, state, rng),
        KernelId::MetropolisRc => metropolis_rc_step(code, params, state, rng),
        KernelId::SingleCheck => single_check_step(code, params, state, rng),
        KernelId::Glauber => glauber_step(code, params, state, rng),
        KernelId::Worm => Err(Error::InvalidParameter(
            "the worm chain needs a coupled graph; use worm::worm_step".into(),
        )),
    }
}
