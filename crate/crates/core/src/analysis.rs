//! Empirical diagnostics: traces of chain observables, TV against exact tables,
//! integrated autocorrelation times and two-seed KS consistency.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::code::ParityCheckCode;
use crate::dynamics::{self, ChainParams, KernelId};
use crate::error::{Error, Result};
use crate::gf2::BitVector;
use crate::oracle::{mask, ExactDistribution};
use crate::par::{self, Execution};
use crate::rng_for;
use crate::worm::{self, WormSpace};

/// `½ Σ |empirical − exact|`. Every sample must be a state of `exact`.
pub fn empirical_tv(samples: &[u64], exact: &ExactDistribution) -> Result<f64> {
    if samples.is_empty() {
        return Err(Error::InvalidParameter("no samples".into()));
    }
    let mut counts = vec![0u64; exact.len()];
    for &s in samples {
        let i = exact
            .index_of(s)
            .ok_or_else(|| Error::InvalidParameter(format!("sample {s:#b} is outside the exact table")))?;
        counts[i] += 1;
    }
    let n = samples.len() as f64;
    Ok(0.5
        * counts
            .iter()
            .zip(exact.probs())
            .map(|(&c, &p)| (c as f64 / n - p).abs())
            .sum::<f64>())
}

/// `n` independent draws from an exact table (inverse-CDF).
pub fn draw_from<R: Rng + ?Sized>(exact: &ExactDistribution, n: usize, rng: &mut R) -> Vec<u64> {
    let mut cdf = Vec::with_capacity(exact.len());
    let mut acc = 0.0;
    for &p in exact.probs() {
        acc += p;
        cdf.push(acc);
    }
    (0..n)
        .map(|_| {
            let u = rng.gen::<f64>() * acc;
            let i = cdf.partition_point(|&c| c <= u).min(exact.len() - 1);
            exact.states()[i]
        })
        .collect()
}

/// Windowing constant of the automatic window.
pub const WINDOW_C: f64 = 6.0;

/// Integrated autocorrelation time with the self-consistent window.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Autocorrelation {
    /// `τ = 1 + 2 Σ_{t=1}^{W} ρ(t)`; 1 for an uncorrelated series.
    pub tau: f64,
    /// Smallest `W` with `W ≥ c·τ(W)`.
    pub window: usize,
    /// True when the series has zero variance (τ is then reported as 1).
    pub constant: bool,
}

/// Integrated autocorrelation time, `τ = 1 + 2 Σ_{t ≤ W} ρ(t)`, with the window
/// `W` the smallest lag satisfying `W ≥ 6 τ(W)`. An alternating series gives
/// `τ(1) = −1` and stops there; that value is the estimator's, not a physical time.
pub fn autocorrelation_time(series: &[f64], exec: Execution) -> Result<Autocorrelation> {
    let n = series.len();
    if n < 2 {
        return Err(Error::InvalidParameter("autocorrelation needs at least two values".into()));
    }
    let mean = series.iter().sum::<f64>() / n as f64;
    let centred: Vec<f64> = series.iter().map(|v| v - mean).collect();
    let c0 = centred.iter().map(|v| v * v).sum::<f64>() / n as f64;
    if c0 == 0.0 {
        return Ok(Autocorrelation {
            tau: 1.0,
            window: 0,
            constant: true,
        });
    }
    let autocov = |t: usize| centred[..n - t].iter().zip(&centred[t..]).map(|(a, b)| a * b).sum::<f64>() / n as f64;
    // lags are evaluated in blocks; each block is data-parallel
    const BLOCK: usize = 64;
    let mut tau = 1.0;
    let mut lag = 1;
    while lag < n {
        let end = (lag + BLOCK).min(n);
        let rho = par::map_indices(exec, end - lag, |i| autocov(lag + i) / c0);
        for r in rho {
            tau += 2.0 * r;
            if lag as f64 >= WINDOW_C * tau {
                return Ok(Autocorrelation {
                    tau,
                    window: lag,
                    constant: false,
                });
            }
            lag += 1;
        }
    }
    Err(Error::NotConverged { steps: n })
}

/// Two-sample Kolmogorov–Smirnov test.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct KsResult {
    pub statistic: f64,
    pub p_value: f64,
}

/// `D = sup |F_a − F_b|` with the asymptotic Kolmogorov p-value.
pub fn ks_two_sample(a: &[f64], b: &[f64]) -> Result<KsResult> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::InvalidParameter("KS test needs two non-empty samples".into()));
    }
    let sorted = |v: &[f64]| {
        let mut s = v.to_vec();
        s.sort_by(|x, y| x.partial_cmp(y).expect("finite observations"));
        s
    };
    let (a, b) = (sorted(a), sorted(b));
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let (mut i, mut j, mut d) = (0, 0, 0.0f64);
    while i < a.len() && j < b.len() {
        let x = a[i].min(b[j]);
        while i < a.len() && a[i] <= x {
            i += 1;
        }
        while j < b.len() && b[j] <= x {
            j += 1;
        }
        d = d.max((i as f64 / na - j as f64 / nb).abs());
    }
    let ne = na * nb / (na + nb);
    let lambda = (ne.sqrt() + 0.12 + 0.11 / ne.sqrt()) * d;
    Ok(KsResult {
        statistic: d,
        p_value: kolmogorov_q(lambda),
    })
}

/// `Q(λ) = 2 Σ_{j≥1} (−1)^{j−1} e^{−2 j² λ²}`.
fn kolmogorov_q(lambda: f64) -> f64 {
    if lambda < 1e-3 {
        return 1.0;
    }
    let mut sum = 0.0;
    let mut sign = 2.0;
    for j in 1..=200 {
        let term = sign * (-2.0 * (j * j) as f64 * lambda * lambda).exp();
        sum += term;
        if term.abs() < 1e-12 * sum.abs() {
            break;
        }
        sign = -sign;
    }
    sum.clamp(0.0, 1.0)
}

/// What a trace records per step.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Observable {
    /// `H(x) = 2|hx|`.
    Energy,
    /// `|x|`.
    HammingWeight,
    /// `|A|` or `|S|`.
    Size,
    /// Odd-degree vertices of a worm state.
    Defects,
}

impl Observable {
    pub fn name(self) -> &'static str {
        match self {
            Observable::Energy => "energy",
            Observable::HammingWeight => "weight",
            Observable::Size => "size",
            Observable::Defects => "defects",
        }
    }

    /// Columns recorded for a kernel; the first is the primary observable.
    pub fn defaults(kernel: KernelId) -> &'static [Observable] {
        match kernel {
            KernelId::Sw | KernelId::Glauber => &[Observable::Energy, Observable::HammingWeight],
            KernelId::SwRc | KernelId::MetropolisRc | KernelId::SingleCheck => &[Observable::Size],
            KernelId::Worm => &[Observable::Size, Observable::Defects],
        }
    }
}

/// Per-step observables of one chain run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TraceSeries {
    pub kernel: KernelId,
    pub beta: f64,
    pub p: f64,
    pub seed: u64,
    pub stream: u64,
    pub observables: Vec<Observable>,
    /// `columns[k][t]` is observable `k` after step `t + 1`.
    pub columns: Vec<Vec<f64>>,
    /// State after the last step.
    #[serde(with = "bitstring")]
    pub final_state: BitVector,
}

mod bitstring {
    use crate::gf2::BitVector;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &BitVector, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&v.to_string())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BitVector, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

impl TraceSeries {
    pub fn len(&self) -> usize {
        self.columns.first().map_or(0, Vec::len)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn primary(&self) -> &[f64] {
        &self.columns[0]
    }

    /// `step,<observables…>` with one row per step.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("step");
        for o in &self.observables {
            out.push(',');
            out.push_str(o.name());
        }
        out.push('\n');
        for t in 0..self.len() {
            out.push_str(&(t + 1).to_string());
            for col in &self.columns {
                out.push(',');
                out.push_str(&format_value(col[t]));
            }
            out.push('\n');
        }
        out
    }
}

fn format_value(v: f64) -> String {
    if v.fract() == 0.0 && v.abs() < 1e15 {
        format!("{}", v as i64)
    } else {
        format!("{v}")
    }
}

/// How a chain is driven: which code, which kernel, and the worm space when needed.
#[derive(Clone, Copy)]
pub struct ChainSpec<'a> {
    pub code: &'a ParityCheckCode,
    pub kernel: KernelId,
    pub params: ChainParams,
    pub worm: Option<&'a WormSpace>,
}

impl ChainSpec<'_> {
    fn initial_state(&self) -> Result<BitVector> {
        Ok(match self.kernel {
            KernelId::Sw | KernelId::Glauber => BitVector::zeros(self.code.bits()),
            KernelId::SwRc | KernelId::MetropolisRc | KernelId::SingleCheck => BitVector::zeros(self.code.checks()),
            KernelId::Worm => BitVector::zeros(self.worm_space()?.edges()),
        })
    }

    fn worm_space(&self) -> Result<&WormSpace> {
        self.worm
            .ok_or_else(|| Error::InvalidParameter("the worm chain needs a coupled graph".into()))
    }

    fn advance<R: Rng + ?Sized>(&self, state: &BitVector, rng: &mut R) -> Result<BitVector> {
        match self.kernel {
            KernelId::Worm => worm::worm_step(self.worm_space()?, state, rng),
            k => dynamics::step(k, self.code, &self.params, state, rng),
        }
    }

    fn observe(&self, o: Observable, state: &BitVector) -> Result<f64> {
        Ok(match o {
            Observable::Energy => self.code.energy(state)? as f64,
            Observable::HammingWeight | Observable::Size => state.weight() as f64,
            Observable::Defects => self.worm_space()?.defect_count(state) as f64,
        })
    }

    /// Run `steps` steps from the zero state with `rng_for(seed, stream)`.
    pub fn trace(&self, steps: usize, seed: u64, stream: u64) -> Result<TraceSeries> {
        self.trace_with(steps, seed, stream, |_| {})
    }

    /// [`ChainSpec::trace`], also handing every visited state to `visit`.
    pub fn trace_with<F: FnMut(&BitVector)>(
        &self,
        steps: usize,
        seed: u64,
        stream: u64,
        mut visit: F,
    ) -> Result<TraceSeries> {
        let observables = Observable::defaults(self.kernel).to_vec();
        let mut rng = rng_for(seed, stream);
        let mut state = self.initial_state()?;
        let mut columns = vec![Vec::with_capacity(steps); observables.len()];
        for _ in 0..steps {
            state = self.advance(&state, &mut rng)?;
            visit(&state);
            for (col, &o) in columns.iter_mut().zip(&observables) {
                col.push(self.observe(o, &state)?);
            }
        }
        Ok(TraceSeries {
            kernel: self.kernel,
            beta: self.params.beta(),
            p: self.params.p(),
            seed,
            stream,
            observables,
            columns,
            final_state: state,
        })
    }

    /// States (as masks) after each of `steps` steps following `burn_in` discarded steps.
    pub fn sample_states(&self, burn_in: usize, steps: usize, seed: u64, stream: u64) -> Result<Vec<u64>> {
        let mut rng = rng_for(seed, stream);
        let mut state = self.initial_state()?;
        if state.len() > 64 {
            return Err(Error::SizeLimit {
                what: "state bits for mask sampling",
                limit: 64,
                actual: state.len(),
            });
        }
        for _ in 0..burn_in {
            state = self.advance(&state, &mut rng)?;
        }
        let mut out = Vec::with_capacity(steps);
        for _ in 0..steps {
            state = self.advance(&state, &mut rng)?;
            out.push(mask(&state));
        }
        Ok(out)
    }

    /// Independent replicas on streams `0..replicas`, run concurrently.
    pub fn replicas(&self, steps: usize, seed: u64, replicas: usize, exec: Execution) -> Result<Vec<TraceSeries>>
    where
        Self: Sync,
    {
        par::map_indices(exec, replicas, |r| self.trace(steps, seed, r as u64))
            .into_iter()
            .collect()
    }
}

/// Outcome of an empirical check.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MixingReport {
    pub instance: String,
    /// `"tv"` (pass iff `statistic ≤ threshold`) or `"ks"` (pass iff `p_value ≥ threshold`).
    pub metric: String,
    pub statistic: f64,
    pub p_value: Option<f64>,
    pub samples: usize,
    pub threshold: f64,
    pub burn_in: usize,
    pub thinning: usize,
    pub tau: Option<f64>,
    pub passed: bool,
}

impl MixingReport {
    pub fn tv(instance: impl Into<String>, tv: f64, samples: usize, threshold: f64, burn_in: usize) -> Self {
        Self {
            instance: instance.into(),
            metric: "tv".into(),
            statistic: tv,
            p_value: None,
            samples,
            threshold,
            burn_in,
            thinning: 1,
            tau: None,
            passed: tv <= threshold,
        }
    }
}

/// Default significance level of the KS consistency test.
pub const KS_ALPHA: f64 = 0.01;

/// KS test between two post-burn-in traces: burn-in is the first half, and both
/// tails are thinned by `⌈2τ⌉` with `τ` the larger of their autocorrelation times.
pub fn consistency_report(
    instance: impl Into<String>,
    a: &[f64],
    b: &[f64],
    alpha: f64,
    exec: Execution,
) -> Result<MixingReport> {
    if a.len() != b.len() {
        return Err(Error::DimensionMismatch {
            context: "trace lengths",
            expected: a.len(),
            found: b.len(),
        });
    }
    let burn_in = a.len() / 2;
    let (ta, tb) = (&a[burn_in..], &b[burn_in..]);
    let tau = autocorrelation_time(ta, exec)?.tau.max(autocorrelation_time(tb, exec)?.tau);
    let thinning = (2.0 * tau).ceil().max(1.0) as usize;
    let thin = |v: &[f64]| v.iter().step_by(thinning).copied().collect::<Vec<_>>();
    let (sa, sb) = (thin(ta), thin(tb));
    let ks = ks_two_sample(&sa, &sb)?;
    Ok(MixingReport {
        instance: instance.into(),
        metric: "ks".into(),
        statistic: ks.statistic,
        p_value: Some(ks.p_value),
        samples: sa.len(),
        threshold: alpha,
        burn_in,
        thinning,
        tau: Some(tau),
        passed: ks.p_value >= alpha,
    })
}

/// Run the chain from two seeds (stream 0 of each) and compare the primary observable.
pub fn two_seed_consistency(
    spec: &ChainSpec<'_>,
    steps: usize,
    seeds: (u64, u64),
    alpha: f64,
    exec: Execution,
) -> Result<(MixingReport, [TraceSeries; 2])> {
    let runs: Vec<Result<TraceSeries>> = par::map_indices(exec, 2, |i| {
        let seed = if i == 0 { seeds.0 } else { seeds.1 };
        spec.trace(steps, seed, 0)
    });
    let mut runs = runs.into_iter();
    let a = runs.next().expect("two runs")?;
    let b = runs.next().expect("two runs")?;
    let instance = format!("{} beta={} seeds={},{}", spec.kernel, spec.params.beta(), seeds.0, seeds.1);
    let report = consistency_report(instance, a.primary(), b.primary(), alpha, exec)?;
    Ok((report, [a, b]))
}
