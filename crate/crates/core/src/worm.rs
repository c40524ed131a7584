//! Worm configurations over a coupled graph, canonical paths between even
//! subgraphs, the Φ injection, and exact congestion of the lifted RC flow.
//!
//! Edges of the graph are identified with checks of the code, so a subset of
//! edges is a subset of checks and both are `BitVector`s of length `|E|`.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::code::{Direction, Graph, ParityCheckCode};
use crate::dynamics::{ChainParams, KernelId, LiftParams};
use crate::error::{Error, Result};
use crate::gf2::{self, BitMatrix, BitVector};
use crate::oracle::{self, mask, ExactDistribution, TransitionMatrix};
use crate::par::{self, Execution};

/// Odd-degree vertices of `(V, S)`, i.e. the support of `gᵀ 1_S`.
pub fn defects(graph: &Graph, s: &BitVector) -> BitVector {
    let mut d = BitVector::zeros(graph.vertex_count());
    for e in s.iter_ones() {
        let (u, v) = graph.edge(e);
        d.flip(u);
        d.flip(v);
    }
    d
}

/// Ω_w = even subgraphs ∪ two-defect subgraphs of `graph`, weighted by `p′`.
#[derive(Clone, Debug)]
pub struct WormSpace {
    graph: Graph,
    weight: f64,
    log_pairs: f64,
}

impl WormSpace {
    /// `weight` is `p′ ∈ [0, 1/2]`.
    pub fn new(graph: Graph, weight: f64) -> Result<Self> {
        if !(0.0..=0.5).contains(&weight) {
            return Err(Error::InvalidParameter(format!("worm weight must lie in [0, 1/2], got {weight}")));
        }
        // with m ≤ 1 there are no two-defect states, so the pair penalty is never used
        let m = graph.vertex_count() as f64;
        Ok(Self {
            log_pairs: if m >= 2.0 { (m * (m - 1.0) / 2.0).ln() } else { 0.0 },
            graph,
            weight,
        })
    }

    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    pub fn weight(&self) -> f64 {
        self.weight
    }

    pub fn edges(&self) -> usize {
        self.graph.edge_count()
    }

    /// `ln(p′/(1−p′))`.
    pub fn log_ratio(&self) -> f64 {
        self.weight.ln() - (-self.weight).ln_1p()
    }

    pub fn defect_count(&self, s: &BitVector) -> usize {
        defects(&self.graph, s).weight()
    }

    pub fn contains(&self, s: &BitVector) -> bool {
        matches!(self.defect_count(s), 0 | 2)
    }

    /// `ln w(S)` with `w(S) = (p′/(1−p′))^{|S|}`.
    fn log_w(&self, size: usize) -> f64 {
        oracle::xlny(size, self.weight) - oracle::xlny(size, 1.0 - self.weight)
    }
}

/// `ln ω_g(S)` up to normalisation: `ln w(S)`, minus `ln C(m,2)` on two-defect
/// states, `−∞` outside Ω_w.
pub fn worm_weight_log(space: &WormSpace, s: &BitVector) -> f64 {
    match space.defect_count(s) {
        0 => space.log_w(s.weight()),
        2 => space.log_w(s.weight()) - space.log_pairs,
        _ => f64::NEG_INFINITY,
    }
}

/// Lazy Metropolis single-edge flip restricted to Ω_w.
pub fn worm_step<R: Rng + ?Sized>(space: &WormSpace, s: &BitVector, rng: &mut R) -> Result<BitVector> {
    if s.len() != space.edges() {
        return Err(Error::DimensionMismatch {
            context: "worm state length",
            expected: space.edges(),
            found: s.len(),
        });
    }
    let mut next = s.clone();
    if rng.gen::<bool>() || space.edges() == 0 {
        return Ok(next);
    }
    let e = rng.gen_range(0..space.edges());
    next.flip(e);
    let target = worm_weight_log(space, &next);
    if target == f64::NEG_INFINITY {
        return Ok(s.clone());
    }
    let log_ratio = target - worm_weight_log(space, s);
    if log_ratio >= 0.0 || rng.gen::<f64>() < log_ratio.exp() {
        Ok(next)
    } else {
        Ok(s.clone())
    }
}

/// Exact ω_g over Ω_w.
pub fn enumerate_worm(space: &WormSpace) -> Result<ExactDistribution> {
    let c = space.edges();
    if c > 20 {
        return Err(Error::SizeLimit {
            what: "edges for worm enumeration",
            limit: 20,
            actual: c,
        });
    }
    let mut states = Vec::new();
    let mut logw = Vec::new();
    for s in 0..1u64 << c {
        let l = worm_weight_log(space, &BitVector::from_mask(c, s));
        if l > f64::NEG_INFINITY {
            states.push(s);
            logw.push(l);
        }
    }
    ExactDistribution::from_log_weights(c, states, &logw)
}

/// Exact matrix of [`worm_step`] over all `2^|E|` subsets (states outside Ω_w are absorbing).
pub fn worm_transition_matrix(space: &WormSpace) -> Result<TransitionMatrix> {
    let c = space.edges();
    if (1usize << c) > oracle::MAX_MATRIX_STATES {
        return Err(Error::SizeLimit {
            what: "transition matrix states",
            limit: oracle::MAX_MATRIX_STATES,
            actual: 1 << c,
        });
    }
    let n = 1usize << c;
    let mut m = nalgebra::DMatrix::zeros(n, n);
    for s in 0..n {
        let sv = BitVector::from_mask(c, s as u64);
        let here = worm_weight_log(space, &sv);
        if here == f64::NEG_INFINITY {
            m[(s, s)] = 1.0;
            continue;
        }
        let mut moved = 0.0;
        for e in 0..c {
            let mut t = sv.clone();
            t.flip(e);
            let there = worm_weight_log(space, &t);
            if there == f64::NEG_INFINITY {
                continue;
            }
            let acc = (there - here).exp().min(1.0) / (2.0 * c as f64);
            m[(s, s ^ (1 << e))] += acc;
            moved += acc;
        }
        m[(s, s)] += 1.0 - moved;
    }
    TransitionMatrix::from_dense(c, m)
}

/// Partition sums of `w` over even subgraphs, two-defect subgraphs and a cover subspace.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct WormPartition {
    pub z0: f64,
    pub z2: f64,
    pub z_cover: f64,
}

/// `Z₀ = Σ_{Ω₀} w`, `Z₂ = Σ_{Ω₂} w` (no pair penalty) and `Z_cover` over the span of `cover_basis`.
pub fn worm_partition(space: &WormSpace, cover_basis: &[BitVector]) -> Result<WormPartition> {
    let c = space.edges();
    let mut part = WormPartition {
        z0: 0.0,
        z2: 0.0,
        z_cover: 0.0,
    };
    for s in 0..1u64 << c {
        let sv = BitVector::from_mask(c, s);
        let w = space.log_w(sv.weight()).exp();
        match space.defect_count(&sv) {
            0 => part.z0 += w,
            2 => part.z2 += w,
            _ => {}
        }
    }
    for s in gf2::span(cover_basis, c) {
        part.z_cover += space.log_w(s.weight()).exp();
    }
    Ok(part)
}

/// Canonical ordering of an even edge set: repeatedly start at the lowest
/// remaining edge (from its first listed endpoint) and walk a closed trail,
/// always taking the lowest-indexed unused incident edge, until the walk
/// returns to its start vertex.
pub fn canonical_sequence(graph: &Graph, d: &BitVector) -> Result<Vec<usize>> {
    if d.len() != graph.edge_count() {
        return Err(Error::DimensionMismatch {
            context: "edge subset length",
            expected: graph.edge_count(),
            found: d.len(),
        });
    }
    if !defects(graph, d).is_zero() {
        return Err(Error::NotEvenCover("symmetric difference has odd-degree vertices".into()));
    }
    let adj = graph.adjacency();
    let mut remaining = d.clone();
    let mut seq = Vec::with_capacity(d.weight());
    while let Some(first) = remaining.first_one() {
        let (start, mut cur) = graph.edge(first);
        remaining.set(first, false);
        seq.push(first);
        while cur != start {
            let e = *adj[cur]
                .iter()
                .find(|&&e| remaining.get(e))
                .expect("an even edge set always continues the trail");
            remaining.set(e, false);
            seq.push(e);
            let (u, v) = graph.edge(e);
            cur = if u == cur { v } else { u };
        }
    }
    Ok(seq)
}

/// Path between two even subgraphs, flipping the edges of `A ⊕ B` in canonical order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CanonicalPath {
    pub start: BitVector,
    pub end: BitVector,
    pub edges: Vec<usize>,
}

impl CanonicalPath {
    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    /// `A, A ⊕ e₁, …, B`.
    pub fn states(&self) -> Vec<BitVector> {
        let mut out = Vec::with_capacity(self.edges.len() + 1);
        let mut cur = self.start.clone();
        out.push(cur.clone());
        for &e in &self.edges {
            cur.flip(e);
            out.push(cur.clone());
        }
        out
    }
}

pub fn canonical_path(space: &WormSpace, a: &BitVector, b: &BitVector) -> Result<CanonicalPath> {
    let edges = canonical_sequence(space.graph(), &a.xor(b))?;
    Ok(CanonicalPath {
        start: a.clone(),
        end: b.clone(),
        edges,
    })
}

/// Which endpoint of a transition `(W, W ⊕ e)` anchors the encoding.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Anchor {
    /// `Φ(A, B) = W ⊕ A ⊕ B`.
    Before,
    /// `Φ(A, B) = W′ ⊕ A ⊕ B`, used for additions `W′ = W ∪ e`.
    After,
}

pub fn phi_encode(w: &BitVector, w_next: &BitVector, a: &BitVector, b: &BitVector, anchor: Anchor) -> BitVector {
    let base = match anchor {
        Anchor::Before => w,
        Anchor::After => w_next,
    };
    base.xor(a).xor(b)
}

/// Recover `(A, B)` from the transition `(W, W ⊕ e)` and `U`, or `None` if `U` is not an image.
pub fn phi_decode(
    graph: &Graph,
    w: &BitVector,
    e: usize,
    u: &BitVector,
    anchor: Anchor,
) -> Option<(BitVector, BitVector)> {
    let mut w_next = w.clone();
    w_next.flip(e);
    let base = match anchor {
        Anchor::Before => w,
        Anchor::After => &w_next,
    };
    let d = u.xor(base);
    if !d.get(e) {
        return None;
    }
    let seq = canonical_sequence(graph, &d).ok()?;
    let j = seq.iter().position(|&f| f == e)?;
    // edges before e already have their B status in W; the rest still have A's
    let mut a = w.clone();
    for &f in &seq[..j] {
        a.flip(f);
    }
    let b = a.xor(&d);
    Some((a, b))
}

/// Exhaustive audit of the canonical path system between all even subgraphs.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PathAudit {
    pub pairs: usize,
    /// Path transitions `(W, W ⊕ e)` visited, counted with multiplicity.
    pub transitions: usize,
    pub max_defects: usize,
    /// Paths whose final state differs from `B`.
    pub wrong_endpoints: usize,
    /// Two pairs `(A, B)` mapped to the same `Φ` on one transition.
    pub collisions: usize,
    pub decode_failures: usize,
}

impl PathAudit {
    pub fn passed(&self) -> bool {
        self.max_defects <= 2 && self.wrong_endpoints == 0 && self.collisions == 0 && self.decode_failures == 0
    }
}

/// Walk every canonical path, checking defects, endpoints, Φ injectivity and decoding.
/// Uses `Φ = W′ ⊕ A ⊕ B` on additions and `W ⊕ A ⊕ B` on removals.
pub fn audit_paths(graph: &Graph) -> Result<PathAudit> {
    let evens = even_subgraphs(graph);
    if evens.len() > 1 << 10 {
        return Err(Error::SizeLimit {
            what: "even subgraphs for the path audit",
            limit: 1 << 10,
            actual: evens.len(),
        });
    }
    let mut audit = PathAudit {
        pairs: evens.len() * evens.len(),
        transitions: 0,
        max_defects: 0,
        wrong_endpoints: 0,
        collisions: 0,
        decode_failures: 0,
    };
    let mut images: std::collections::HashMap<(BitVector, usize), std::collections::HashSet<BitVector>> =
        Default::default();
    for a in &evens {
        for b in &evens {
            let edges = canonical_sequence(graph, &a.xor(b))?;
            let mut w = a.clone();
            for &e in &edges {
                let mut w2 = w.clone();
                w2.flip(e);
                audit.transitions += 1;
                audit.max_defects = audit.max_defects.max(defects(graph, &w2).weight());
                let anchor = if w.get(e) { Anchor::Before } else { Anchor::After };
                let u = phi_encode(&w, &w2, a, b, anchor);
                if !images.entry((w.clone(), e)).or_default().insert(u.clone()) {
                    audit.collisions += 1;
                }
                if phi_decode(graph, &w, e, &u, anchor) != Some((a.clone(), b.clone())) {
                    audit.decode_failures += 1;
                }
                w = w2;
            }
            if &w != b {
                audit.wrong_endpoints += 1;
            }
        }
    }
    Ok(audit)
}

/// Largest `φ_lift(B) / φ(B)` when the lift starts from ω_g instead of the even-cover law.
pub fn subspace_loss_ratio(code: &ParityCheckCode, graph: &Graph, direction: Direction, p: f64) -> Result<f64> {
    let lift = LiftParams::new(direction, p)?;
    let space = WormSpace::new(graph.clone(), lift.weight)?;
    if graph.edge_count() != code.checks() {
        return Err(Error::DimensionMismatch {
            context: "graph edges vs checks",
            expected: code.checks(),
            found: graph.edge_count(),
        });
    }
    let omega = enumerate_worm(&space)?;
    let pushed = oracle::lift_pushforward(&omega, &lift)?;
    let phi = oracle::enumerate_rc(code, p)?;
    Ok(phi
        .states()
        .iter()
        .zip(phi.probs())
        .filter(|(_, &q)| q > 0.0)
        .map(|(&s, &q)| pushed.prob(s) / q)
        .fold(0.0, f64::max))
}

/// Exact congestion analysis of the canonical-path flow and its RC lift.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FlowReport {
    pub direction: Direction,
    pub p: f64,
    pub delta: usize,
    pub vertices: usize,
    pub checks: usize,
    /// Most defects seen on any canonical-path state.
    pub max_path_defects: usize,
    /// `max Σ_{γ∋(W,W′)} f(γ) / (2^{Δ+1} m⁴ ω_g(W))` over all worm transitions.
    pub worm_flow_ratio: f64,
    /// The same over additions `W′ = W ∪ e`, with the extra factor `p′/(1−p′)` in the bound.
    pub worm_add_ratio: f64,
    /// `ρ(F)` of the lifted flow with respect to the lazy Metropolis RC chain.
    pub lifted_congestion: f64,
    /// `c² 2^{2Δ+5} m⁴`.
    pub congestion_bound: f64,
    /// `max |Σ_{λ∈Λ(I,F)} F(λ) − φ(I)φ(F)|`, tracked for `c ≤ 8`.
    pub validity_deviation: Option<f64>,
}

const MAX_FLOW_CHECKS: usize = 14;
const MAX_JOINT_CHECKS: usize = 8;

/// Enumerate every canonical path between even covers and the lifted flow
/// (follow, mimic, re-randomise), and evaluate loads on every transition.
///
/// Loads count a transition once per occurrence along a path, which is the
/// accounting of the bound and dominates the set-membership definition.
pub fn flow_congestion_exact(
    code: &ParityCheckCode,
    graph: &Graph,
    direction: Direction,
    p: f64,
    delta: usize,
    exec: Execution,
) -> Result<FlowReport> {
    let c = code.checks();
    if c > MAX_FLOW_CHECKS {
        return Err(Error::SizeLimit {
            what: "checks for exact congestion",
            limit: MAX_FLOW_CHECKS,
            actual: c,
        });
    }
    if graph.edge_count() != c {
        return Err(Error::DimensionMismatch {
            context: "graph edges vs checks",
            expected: c,
            found: graph.edge_count(),
        });
    }
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::InvalidParameter(format!("congestion needs 0 < p < 1, got {p}")));
    }
    let lift = LiftParams::new(direction, p)?;
    let space = WormSpace::new(graph.clone(), lift.weight)?;
    let xi = oracle::even_cover_source(code, &lift)?;
    let omega = enumerate_worm(&space)?;
    let phi = oracle::enumerate_rc(code, p)?;
    let met = oracle::build_transition_matrix(KernelId::MetropolisRc, code, &ChainParams::from_p(p)?)?;
    let m = graph.vertex_count() as f64;
    let r = lift.add_rate();
    let covers: Vec<(u64, f64)> = xi.states().iter().copied().zip(xi.probs().iter().copied()).collect();
    for &(s, _) in &covers {
        if space.defect_count(&BitVector::from_mask(c, s)) != 0 {
            return Err(Error::NotEvenCover(format!(
                "cover {s:#b} is not an even subgraph of the coupled graph"
            )));
        }
    }
    let track_joint = c <= MAX_JOINT_CHECKS;
    let size = 1usize << c;

    // Work is split by starting cover; each chunk is reduced sequentially and
    // chunks are summed in order, so the result does not depend on threading.
    let partials = par::map_indices(exec, covers.len(), |ai| {
        let mut acc = Accumulator::new(c, track_joint);
        let (a, fa) = covers[ai];
        for &(b, fb) in &covers {
            let f = fa * fb;
            let av = BitVector::from_mask(c, a);
            let path = canonical_sequence(graph, &av.xor(&BitVector::from_mask(c, b))).expect("covers are even");
            acc.add_path(&space, direction, r, a, b, &path, f);
        }
        acc
    });
    let mut total = Accumulator::new(c, track_joint);
    for part in partials {
        total.merge(part);
    }

    let bound_unit = 2f64.powi(delta as i32 + 1) * m.powi(4);
    let mut worm_flow_ratio: f64 = 0.0;
    let mut worm_add_ratio: f64 = 0.0;
    for w in 0..size {
        for e in 0..c {
            let load = total.worm_load[w * c + e];
            if load == 0.0 {
                continue;
            }
            let om = omega.prob(w as u64);
            let ratio = load / (bound_unit * om);
            worm_flow_ratio = worm_flow_ratio.max(ratio);
            if w >> e & 1 == 0 {
                worm_add_ratio = worm_add_ratio.max(ratio / r);
            }
        }
    }

    let phi_d = phi.dense();
    let mut congestion: f64 = 0.0;
    for z in 0..size {
        for slot in 0..=c {
            let load = total.rc_load[z * (c + 1) + slot];
            if load == 0.0 {
                continue;
            }
            let target = if slot == c { z } else { z ^ (1 << slot) };
            let cap = phi_d[z] * met.get(z, target);
            congestion = congestion.max(load / cap);
        }
    }

    let validity_deviation = total.joint.as_ref().map(|j| {
        let mut worst: f64 = 0.0;
        for i in 0..size {
            for f in 0..size {
                worst = worst.max((j[i * size + f] - phi_d[i] * phi_d[f]).abs());
            }
        }
        worst
    });

    Ok(FlowReport {
        direction,
        p,
        delta,
        vertices: graph.vertex_count(),
        checks: c,
        max_path_defects: total.max_defects,
        worm_flow_ratio,
        worm_add_ratio,
        lifted_congestion: congestion,
        congestion_bound: (c * c) as f64 * 2f64.powi(2 * delta as i32 + 5) * m.powi(4),
        validity_deviation,
    })
}

struct Accumulator {
    c: usize,
    /// Indexed `W·c + e` for the worm transition `(W, W ⊕ e)`.
    worm_load: Vec<f64>,
    /// Indexed `Z·(c+1) + slot`; slot `c` is the self-transition.
    rc_load: Vec<f64>,
    /// `Σ f · Pr(Z₀ = I, Z_end = F)`, indexed `I·2^c + F`.
    joint: Option<Vec<f64>>,
    max_defects: usize,
}

impl Accumulator {
    fn new(c: usize, track_joint: bool) -> Self {
        let size = 1usize << c;
        Self {
            c,
            worm_load: vec![0.0; size * c],
            rc_load: vec![0.0; size * (c + 1)],
            joint: track_joint.then(|| vec![0.0; size * size]),
            max_defects: 0,
        }
    }

    fn merge(&mut self, other: Accumulator) {
        for (a, b) in self.worm_load.iter_mut().zip(&other.worm_load) {
            *a += b;
        }
        for (a, b) in self.rc_load.iter_mut().zip(&other.rc_load) {
            *a += b;
        }
        if let (Some(a), Some(b)) = (self.joint.as_mut(), other.joint.as_ref()) {
            for (x, y) in a.iter_mut().zip(b) {
                *x += y;
            }
        }
        self.max_defects = self.max_defects.max(other.max_defects);
    }

    #[allow(clippy::too_many_arguments)]
    fn add_path(
        &mut self,
        space: &WormSpace,
        direction: Direction,
        r: f64,
        a: u64,
        b: u64,
        path: &[usize],
        f: f64,
    ) {
        let c = self.c;
        let size = 1usize << c;
        // worm-level loads and defect bookkeeping
        let mut w = a;
        for &e in path {
            self.worm_load[w as usize * c + e] += f;
            w ^= 1 << e;
            let d = space.defect_count(&BitVector::from_mask(c, w));
            self.max_defects = self.max_defects.max(d);
        }
        debug_assert_eq!(w, b);
        let redo: Vec<usize> = (0..c).filter(|&e| b >> e & 1 == 0).collect();
        let steps = path.len() + redo.len();
        let weight = f * steps as f64;

        // Distribution of Z₀ given W₀ = A; in the joint mode indexed (Z₀, Z_i).
        let init = initial_distribution(direction, a, r, c);
        let mut joint: Vec<f64> = if self.joint.is_some() {
            let mut j = vec![0.0; size * size];
            for (z, &pz) in init.iter().enumerate() {
                j[z * size + z] = pz;
            }
            j
        } else {
            init
        };
        let rows = if self.joint.is_some() { size } else { 1 };

        let mut w = a;
        let moves = path
            .iter()
            .map(|&e| {
                let adding = w >> e & 1 == 0;
                w ^= 1 << e;
                (e, Move::Follow { adding })
            })
            .chain(redo.iter().map(|&e| (e, Move::Rerandomise)));
        for (e, mv) in moves {
            let bit = 1usize << e;
            // transition kernel on Z for this step: list of (prob of toggling, keep)
            let mut next = vec![0.0; joint.len()];
            for row in 0..rows {
                let base = row * size;
                for z in 0..size {
                    let pz = joint[base + z];
                    if pz == 0.0 {
                        continue;
                    }
                    let has = z & bit != 0;
                    // probability of ending with e ∈ Z
                    let p_in = match (direction, mv) {
                        (Direction::Primal, Move::Follow { adding: true }) => 1.0,
                        (Direction::Dual, Move::Follow { adding: true }) => 0.0,
                        (Direction::Primal, Move::Follow { adding: false }) => r,
                        (Direction::Dual, Move::Follow { adding: false }) => 1.0 - r,
                        (Direction::Primal, Move::Rerandomise) => r,
                        (Direction::Dual, Move::Rerandomise) => 1.0 - r,
                    };
                    let (z_in, z_out) = (z | bit, z & !bit);
                    let stay_prob = if has { p_in } else { 1.0 - p_in };
                    let flip_prob = 1.0 - stay_prob;
                    let load_mass = pz * weight;
                    if stay_prob > 0.0 {
                        self.rc_load[z * (c + 1) + c] += load_mass * stay_prob;
                        next[base + z] += pz * stay_prob;
                    }
                    if flip_prob > 0.0 {
                        self.rc_load[z * (c + 1) + e] += load_mass * flip_prob;
                        next[base + if has { z_out } else { z_in }] += pz * flip_prob;
                    }
                }
            }
            joint = next;
        }
        if let Some(acc) = self.joint.as_mut() {
            for (x, y) in acc.iter_mut().zip(&joint) {
                *x += f * y;
            }
        }
    }
}

#[derive(Clone, Copy, Debug)]
enum Move {
    Follow { adding: bool },
    Rerandomise,
}

/// `δ(W, ·)`: primal `Z ⊇ W` with other edges in at rate `r`; dual `Z ⊆ Wᶜ` with other edges out at rate `r`.
fn initial_distribution(direction: Direction, w: u64, r: f64, c: usize) -> Vec<f64> {
    let size = 1usize << c;
    let mut out = vec![0.0; size];
    let free = ((size - 1) as u64) & !w;
    let nfree = free.count_ones() as usize;
    let mut t = free;
    loop {
        let k = t.count_ones() as usize;
        let z = match direction {
            // t = edges added to Z
            Direction::Primal => w | t,
            // t = edges removed from Wᶜ
            Direction::Dual => free & !t,
        };
        out[z as usize] += oracle::log_bernoulli(k, nfree, r).exp();
        if t == 0 {
            break;
        }
        t = (t - 1) & free;
    }
    out
}

/// `τ(P_Met) ≤ ln(2e / min φ) · ρ(F)`: returns `(τ, bound)`.
pub fn mixing_time_bound(code: &ParityCheckCode, p: f64, congestion: f64) -> Result<(usize, f64)> {
    let phi = oracle::enumerate_rc(code, p)?;
    let met = oracle::build_transition_matrix(KernelId::MetropolisRc, code, &ChainParams::from_p(p)?)?;
    let tau = oracle::exact_mixing_time(&met, &phi, 1_000_000)?;
    let bound = (2.0 * std::f64::consts::E / phi.min_prob()).ln() * congestion;
    Ok((tau, bound))
}

/// Subsets of a small edge set, as `BitVector`s (helper for exhaustive tests and the CLI).
pub fn even_subgraphs(graph: &Graph) -> Vec<BitVector> {
    let g: BitMatrix = graph.incidence_matrix();
    let basis = gf2::kernel_basis(&g.transpose());
    let mut all = gf2::span(&basis, graph.edge_count());
    all.sort_by_key(mask);
    all
}
