//! Pauli labels in symplectic form, stabilizer models with `h = gω`, a dense
//! density-matrix simulator, the exact joint channel of the quantum sampler and
//! a Pauli-frame trajectory sampler.
//!
//! Qubit `j` is bit `j` of a computational-basis index. Labels are `(x | z)`
//! with `P(x, z) = i^{x·z} X(x) Z(z)`; phases are dropped under composition.

use std::fmt;
use std::str::FromStr;

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use rand::Rng;

use crate::code::ParityCheckCode;
use crate::dynamics::{self, ChainParams, KernelId};
use crate::error::{Error, Result};
use crate::gf2::{self, BitMatrix, BitVector, Echelon};
use crate::oracle::{mask, TransitionMatrix};

/// Largest qubit count of a dense state.
pub const DENSE_LIMIT: usize = 8;
/// Largest qubit count of the joint classical–quantum channel.
pub const JOINT_LIMIT: usize = 4;

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct PauliLabel {
    x: BitVector,
    z: BitVector,
}

impl PauliLabel {
    pub fn new(x: BitVector, z: BitVector) -> Result<Self> {
        if x.len() != z.len() {
            return Err(Error::DimensionMismatch {
                context: "Pauli x and z parts",
                expected: x.len(),
                found: z.len(),
            });
        }
        Ok(Self { x, z })
    }

    pub fn identity(n: usize) -> Self {
        Self {
            x: BitVector::zeros(n),
            z: BitVector::zeros(n),
        }
    }

    /// Split a `2n`-bit `(x | z)` vector.
    pub fn from_symplectic(v: &BitVector) -> Result<Self> {
        if !v.len().is_multiple_of(2) {
            return Err(Error::InvalidParameter(format!(
                "symplectic vector needs even length, got {}",
                v.len()
            )));
        }
        let n = v.len() / 2;
        Ok(Self {
            x: v.slice(0, n),
            z: v.slice(n, n),
        })
    }

    pub fn to_symplectic(&self) -> BitVector {
        self.x.concat(&self.z)
    }

    pub fn qubits(&self) -> usize {
        self.x.len()
    }

    pub fn x(&self) -> &BitVector {
        &self.x
    }

    pub fn z(&self) -> &BitVector {
        &self.z
    }

    /// Product up to phase.
    pub fn compose(&self, other: &PauliLabel) -> Result<PauliLabel> {
        same_size(self, other)?;
        Ok(Self {
            x: self.x.xor(&other.x),
            z: self.z.xor(&other.z),
        })
    }

    pub fn is_identity(&self) -> bool {
        self.x.is_zero() && self.z.is_zero()
    }

    /// Number of qubits acted on non-trivially.
    pub fn support_size(&self) -> usize {
        (0..self.qubits()).filter(|&j| self.x.get(j) || self.z.get(j)).count()
    }

    fn masks(&self) -> (usize, usize) {
        (mask(&self.x) as usize, mask(&self.z) as usize)
    }
}

fn same_size(a: &PauliLabel, b: &PauliLabel) -> Result<()> {
    if a.qubits() != b.qubits() {
        return Err(Error::DimensionMismatch {
            context: "Pauli label qubits",
            expected: a.qubits(),
            found: b.qubits(),
        });
    }
    Ok(())
}

/// Letters `I X Y Z`, qubit 0 first.
impl fmt::Display for PauliLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for j in 0..self.qubits() {
            let c = match (self.x.get(j), self.z.get(j)) {
                (false, false) => 'I',
                (true, false) => 'X',
                (false, true) => 'Z',
                (true, true) => 'Y',
            };
            write!(f, "{c}")?;
        }
        Ok(())
    }
}

impl fmt::Debug for PauliLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "PauliLabel({self})")
    }
}

impl FromStr for PauliLabel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let n = s.chars().count();
        let mut label = PauliLabel::identity(n);
        for (j, c) in s.chars().enumerate() {
            match c.to_ascii_uppercase() {
                'I' => {}
                'X' => label.x.set(j, true),
                'Z' => label.z.set(j, true),
                'Y' => {
                    label.x.set(j, true);
                    label.z.set(j, true);
                }
                other => return Err(Error::parse(1, format!("unexpected Pauli letter {other:?}"))),
            }
        }
        Ok(label)
    }
}

/// `ω(a, b) = a_x·b_z + a_z·b_x`; `false` iff the operators commute.
pub fn symplectic_product(a: &PauliLabel, b: &PauliLabel) -> Result<bool> {
    same_size(a, b)?;
    Ok(a.x.dot(&b.z) ^ a.z.dot(&b.x))
}

/// Swap the `x` and `z` halves of every row.
fn apply_omega(g: &BitMatrix) -> BitMatrix {
    let n = g.cols() / 2;
    let rows = g
        .row_vectors()
        .iter()
        .map(|r| r.slice(n, n).concat(&r.slice(0, n)))
        .collect();
    BitMatrix::from_rows(rows, g.cols()).expect("row lengths preserved")
}

/// Commuting Pauli generators `g` (rows `(x | z)`) with `h = gω`.
#[derive(Clone, Debug)]
pub struct StabilizerModel {
    g: BitMatrix,
    code: ParityCheckCode,
    generators: Vec<PauliLabel>,
}

impl StabilizerModel {
    pub fn build(g: BitMatrix) -> Result<Self> {
        if g.cols() == 0 || !g.cols().is_multiple_of(2) {
            return Err(Error::InvalidParameter(format!(
                "stabilizer matrix needs an even, positive column count, got {}",
                g.cols()
            )));
        }
        let generators: Vec<PauliLabel> = g
            .row_vectors()
            .iter()
            .map(PauliLabel::from_symplectic)
            .collect::<Result<_>>()?;
        for i in 0..generators.len() {
            for j in i + 1..generators.len() {
                if symplectic_product(&generators[i], &generators[j])? {
                    return Err(Error::NonCommuting { first: i, second: j });
                }
            }
        }
        let code = ParityCheckCode::new(apply_omega(&g))?;
        Ok(Self { g, code, generators })
    }

    /// Rows `(hX | 0)` then `(0 | hZ)`.
    pub fn css(hx: &BitMatrix, hz: &BitMatrix) -> Result<Self> {
        if hx.cols() != hz.cols() {
            return Err(Error::DimensionMismatch {
                context: "CSS qubit counts",
                expected: hx.cols(),
                found: hz.cols(),
            });
        }
        let top = hx.hstack(&BitMatrix::zeros(hx.rows(), hx.cols()))?;
        let bottom = BitMatrix::zeros(hz.rows(), hz.cols()).hstack(hz)?;
        Self::build(top.vstack(&bottom)?)
    }

    pub fn g(&self) -> &BitMatrix {
        &self.g
    }

    pub fn h(&self) -> &BitMatrix {
        self.code.h()
    }

    /// The classical code `h = gω` on `2n` bits.
    pub fn classical_code(&self) -> &ParityCheckCode {
        &self.code
    }

    pub fn generators(&self) -> &[PauliLabel] {
        &self.generators
    }

    pub fn qubits(&self) -> usize {
        self.g.cols() / 2
    }

    pub fn checks(&self) -> usize {
        self.g.rows()
    }

    pub fn rank(&self) -> usize {
        self.code.rank()
    }

    /// `k = n − rank(g)`.
    pub fn logical_qubits(&self) -> usize {
        self.qubits() - self.rank()
    }

    pub fn syndrome(&self, e: &PauliLabel) -> Result<BitVector> {
        self.code.syndrome(&e.to_symplectic())
    }

    /// Lexicographically first `e` with `h e = s`.
    pub fn representative_error(&self, s: &BitVector) -> Result<PauliLabel> {
        match gf2::lex_min_solution(self.h(), s)? {
            Some(e) => PauliLabel::from_symplectic(&e),
            None => Err(Error::UnreachableSyndrome),
        }
    }

    /// All reachable syndromes `col(h)`, ascending by mask.
    pub fn syndromes(&self) -> Result<Vec<BitVector>> {
        let basis = gf2::column_space_basis(self.h());
        if basis.len() > 20 {
            return Err(Error::SizeLimit {
                what: "syndrome space dimension",
                limit: 20,
                actual: basis.len(),
            });
        }
        let mut all = gf2::span(&basis, self.checks());
        all.sort();
        Ok(all)
    }

    /// `2k` labels completing `row(g)` to a basis of `ker h` (logical coset representatives).
    pub fn logical_representatives(&self) -> Vec<PauliLabel> {
        let two_n = self.g.cols();
        let mut rows: Vec<BitVector> = self.g.row_vectors().to_vec();
        let mut reps = Vec::new();
        for v in gf2::kernel_basis(self.h()) {
            let ech = Echelon::new(&BitMatrix::from_rows(rows.clone(), two_n).expect("consistent rows"));
            if !ech.contains(&v) {
                rows.push(v.clone());
                reps.push(PauliLabel::from_symplectic(&v).expect("even length"));
            }
        }
        reps
    }

    /// `"c n"` then one `2n`-bit row per generator.
    pub fn to_text(&self) -> String {
        let mut out = format!("{} {}\n", self.checks(), self.qubits());
        for r in self.g.row_vectors() {
            out.push_str(&r.to_string());
            out.push('\n');
        }
        out
    }
}

impl FromStr for StabilizerModel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut lines = s
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
        let (ln, header) = lines.next().ok_or_else(|| Error::parse(1, "missing header"))?;
        let dims: Vec<usize> = header
            .split_whitespace()
            .map(|t| t.parse::<usize>().map_err(|e| Error::parse(ln, e.to_string())))
            .collect::<Result<_>>()?;
        let [c, n] = dims[..] else {
            return Err(Error::parse(ln, "header must be \"c n\""));
        };
        let mut rows = Vec::with_capacity(c);
        for (ln, line) in lines {
            let row: BitVector = line.parse().map_err(|_| Error::parse(ln, "row must be a 0/1 string"))?;
            if row.len() != 2 * n {
                return Err(Error::parse(ln, format!("row has {} bits, expected {}", row.len(), 2 * n)));
            }
            rows.push(row);
        }
        if rows.len() != c {
            return Err(Error::parse(ln, format!("expected {c} rows, found {}", rows.len())));
        }
        Self::build(BitMatrix::from_rows(rows, 2 * n)?)
    }
}

fn dense_guard(n: usize, limit: usize) -> Result<()> {
    if n > limit {
        return Err(Error::SizeLimit {
            what: "qubits for dense simulation",
            limit,
            actual: n,
        });
    }
    Ok(())
}

/// Dense `2^n × 2^n` matrix of `P(x, z) = i^{x·z} X(x) Z(z)`.
pub fn pauli_matrix(label: &PauliLabel) -> Result<DMatrix<Complex64>> {
    dense_guard(label.qubits(), DENSE_LIMIT)?;
    let dim = 1usize << label.qubits();
    let (x, z) = label.masks();
    let phase = Complex64::i().powu((x & z).count_ones());
    let mut m = DMatrix::zeros(dim, dim);
    for b in 0..dim {
        let sign = if (z & b).count_ones() % 2 == 1 { -1.0 } else { 1.0 };
        m[(b ^ x, b)] = phase * sign;
    }
    Ok(m)
}

/// `P ρ P†` for a Pauli label, by permuting entries (phases cancel).
pub fn conjugate_by_pauli(label: &PauliLabel, rho: &DMatrix<Complex64>) -> DMatrix<Complex64> {
    let (x, z) = label.masks();
    let dim = rho.nrows();
    let sign = |b: usize| if (z & b).count_ones() % 2 == 1 { -1.0 } else { 1.0 };
    DMatrix::from_fn(dim, dim, |a, b| {
        let (i, j) = (a ^ x, b ^ x);
        rho[(i, j)] * (sign(i) * sign(j))
    })
}

/// `H = −Σ_i P(g_i)`.
pub fn hamiltonian(model: &StabilizerModel) -> Result<DMatrix<Complex64>> {
    dense_guard(model.qubits(), DENSE_LIMIT)?;
    let dim = 1usize << model.qubits();
    let mut h = DMatrix::zeros(dim, dim);
    for gen in model.generators() {
        h -= pauli_matrix(gen)?;
    }
    Ok(h)
}

/// `Π(g, 0) = Π_i (I + P(g_i)) / 2`.
pub fn code_projector(model: &StabilizerModel) -> Result<DMatrix<Complex64>> {
    dense_guard(model.qubits(), DENSE_LIMIT)?;
    let dim = 1usize << model.qubits();
    let id = DMatrix::<Complex64>::identity(dim, dim);
    let mut proj = id.clone();
    for gen in model.generators() {
        proj *= (&id + pauli_matrix(gen)?).scale(0.5);
    }
    Ok(proj)
}

/// `Π(g, s) = E(s) Π(g, 0) E(s)`.
pub fn syndrome_projector(model: &StabilizerModel, s: &BitVector) -> Result<DMatrix<Complex64>> {
    let e = model.representative_error(s)?;
    Ok(conjugate_by_pauli(&e, &code_projector(model)?))
}

/// A density matrix on at most [`DENSE_LIMIT`] qubits.
#[derive(Clone, Debug, PartialEq)]
pub struct DenseState {
    qubits: usize,
    rho: DMatrix<Complex64>,
}

impl DenseState {
    /// Wrap a matrix after checking Hermiticity, unit trace and positivity to `1e−10`.
    pub fn new(rho: DMatrix<Complex64>) -> Result<Self> {
        let dim = rho.nrows();
        if dim == 0 || !dim.is_power_of_two() || rho.ncols() != dim {
            return Err(Error::InvalidParameter(format!(
                "density matrix must be 2^n square, got {}x{}",
                rho.nrows(),
                rho.ncols()
            )));
        }
        let qubits = dim.trailing_zeros() as usize;
        dense_guard(qubits, DENSE_LIMIT)?;
        let state = Self { qubits, rho };
        let tol = 1e-10;
        if state.hermiticity_error() > tol {
            return Err(Error::InvalidParameter("density matrix is not Hermitian".into()));
        }
        if (state.trace() - 1.0).abs() > tol {
            return Err(Error::InvalidParameter(format!("trace {} is not 1", state.trace())));
        }
        if state.min_eigenvalue() < -tol {
            return Err(Error::InvalidParameter("density matrix is not positive semidefinite".into()));
        }
        Ok(state)
    }

    pub fn maximally_mixed(qubits: usize) -> Result<Self> {
        dense_guard(qubits, DENSE_LIMIT)?;
        let dim = 1usize << qubits;
        Ok(Self {
            qubits,
            rho: DMatrix::identity(dim, dim).unscale(dim as f64),
        })
    }

    /// `|ψ⟩⟨ψ|` for a (not necessarily normalised) amplitude vector.
    pub fn pure(amplitudes: &[Complex64]) -> Result<Self> {
        let norm: f64 = amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if norm == 0.0 {
            return Err(Error::InvalidParameter("zero state vector".into()));
        }
        let v = nalgebra::DVector::from_iterator(amplitudes.len(), amplitudes.iter().map(|a| a / norm));
        Self::new(&v * v.adjoint())
    }

    pub fn basis_state(qubits: usize, index: usize) -> Result<Self> {
        dense_guard(qubits, DENSE_LIMIT)?;
        let mut amps = vec![Complex64::new(0.0, 0.0); 1 << qubits];
        *amps
            .get_mut(index)
            .ok_or(Error::IndexOutOfRange { index, len: 1 << qubits })? = Complex64::new(1.0, 0.0);
        Self::pure(&amps)
    }

    pub fn qubits(&self) -> usize {
        self.qubits
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.rho
    }

    pub fn trace(&self) -> f64 {
        self.rho.trace().re
    }

    pub fn hermiticity_error(&self) -> f64 {
        (&self.rho - self.rho.adjoint()).iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    pub fn min_eigenvalue(&self) -> f64 {
        hermitian_eigenvalues(&self.rho).into_iter().fold(f64::INFINITY, f64::min)
    }

    pub fn max_abs_diff(&self, other: &DenseState) -> f64 {
        (&self.rho - &other.rho).iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    /// `½ ‖ρ − σ‖₁`.
    pub fn trace_distance(&self, other: &DenseState) -> f64 {
        0.5 * hermitian_eigenvalues(&(&self.rho - &other.rho))
            .into_iter()
            .map(f64::abs)
            .sum::<f64>()
    }

    pub fn conjugate(&self, label: &PauliLabel) -> DenseState {
        Self {
            qubits: self.qubits,
            rho: conjugate_by_pauli(label, &self.rho),
        }
    }
}

fn hermitian_eigenvalues(m: &DMatrix<Complex64>) -> Vec<f64> {
    let herm = (m + m.adjoint()).scale(0.5);
    SymmetricEigen::new(herm).eigenvalues.iter().copied().collect()
}

/// How [`exact_gibbs_state`] is assembled.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum GibbsRoute {
    /// Matrix exponential of the Pauli-sum Hamiltonian.
    #[default]
    Exponential,
    /// `Σ_s e^{−2β|s|} Π(g, s)` over reachable syndromes.
    SyndromeSum,
}

/// `e^{−βH} / Z`.
pub fn exact_gibbs_state(model: &StabilizerModel, beta: f64, route: GibbsRoute) -> Result<DenseState> {
    if !(beta >= 0.0 && beta.is_finite()) {
        return Err(Error::InvalidParameter(format!("beta must be finite and non-negative, got {beta}")));
    }
    dense_guard(model.qubits(), DENSE_LIMIT)?;
    let unnormalised = match route {
        GibbsRoute::Exponential => {
            // shifting by c keeps the spectrum of the exponent non-positive
            let dim = 1usize << model.qubits();
            let shifted = hamiltonian(model)? + DMatrix::identity(dim, dim).scale(model.checks() as f64);
            shifted.scale(-beta).exp()
        }
        GibbsRoute::SyndromeSum => {
            let pi0 = code_projector(model)?;
            let mut acc = DMatrix::zeros(pi0.nrows(), pi0.ncols());
            for s in model.syndromes()? {
                let e = model.representative_error(&s)?;
                acc += conjugate_by_pauli(&e, &pi0).scale((-2.0 * beta * s.weight() as f64).exp());
            }
            acc
        }
    };
    let z = unnormalised.trace().re;
    DenseState::new(unnormalised.unscale(z))
}

/// Joint state of Algorithm 1: unnormalised quantum blocks indexed by the
/// classical register `x ∈ {0,1}^{2n}` (as a mask).
#[derive(Clone, Debug)]
pub struct JointState {
    qubits: usize,
    blocks: Vec<DMatrix<Complex64>>,
}

impl JointState {
    /// Classical register at `x0`, quantum register in `rho`.
    pub fn product(x0: &BitVector, rho: &DenseState) -> Result<Self> {
        let n = rho.qubits();
        dense_guard(n, JOINT_LIMIT)?;
        if x0.len() != 2 * n {
            return Err(Error::DimensionMismatch {
                context: "classical register length",
                expected: 2 * n,
                found: x0.len(),
            });
        }
        let dim = 1usize << n;
        let mut blocks = vec![DMatrix::zeros(dim, dim); 1 << (2 * n)];
        blocks[mask(x0) as usize] = rho.matrix().clone();
        Ok(Self { qubits: n, blocks })
    }

    /// Classical register ~ `weights`, quantum register `P(x) ρ_x P(x)` chosen by the caller.
    pub fn from_blocks(qubits: usize, blocks: Vec<DMatrix<Complex64>>) -> Result<Self> {
        dense_guard(qubits, JOINT_LIMIT)?;
        if blocks.len() != 1 << (2 * qubits) {
            return Err(Error::DimensionMismatch {
                context: "joint blocks",
                expected: 1 << (2 * qubits),
                found: blocks.len(),
            });
        }
        Ok(Self { qubits, blocks })
    }

    pub fn qubits(&self) -> usize {
        self.qubits
    }

    pub fn blocks(&self) -> &[DMatrix<Complex64>] {
        &self.blocks
    }

    pub fn total_trace(&self) -> f64 {
        self.blocks.iter().map(|b| b.trace().re).sum()
    }

    /// Law of the classical register.
    pub fn classical_marginal(&self) -> Vec<f64> {
        self.blocks.iter().map(|b| b.trace().re).collect()
    }

    pub fn quantum_marginal(&self) -> Result<DenseState> {
        let dim = 1usize << self.qubits;
        let mut acc = DMatrix::zeros(dim, dim);
        for b in &self.blocks {
            acc += b;
        }
        DenseState::new(acc)
    }
}

/// Exact one-step channel of Algorithm 1 for a fixed model and classical kernel `Q`.
pub struct ExactChannel {
    qubits: usize,
    /// `(Π(g, s), E(s))` for every reachable syndrome.
    sectors: Vec<(DMatrix<Complex64>, PauliLabel)>,
    q: DMatrix<f64>,
}

impl ExactChannel {
    /// `q` acts on `{0,1}^{2n}` with the state mask convention of [`TransitionMatrix`].
    pub fn new(model: &StabilizerModel, q: &TransitionMatrix) -> Result<Self> {
        let n = model.qubits();
        dense_guard(n, JOINT_LIMIT)?;
        if q.size() != 1 << (2 * n) {
            return Err(Error::DimensionMismatch {
                context: "classical kernel states",
                expected: 1 << (2 * n),
                found: q.size(),
            });
        }
        let pi0 = code_projector(model)?;
        let sectors = model
            .syndromes()?
            .into_iter()
            .map(|s| {
                let e = model.representative_error(&s)?;
                Ok((conjugate_by_pauli(&e, &pi0), e))
            })
            .collect::<Result<_>>()?;
        Ok(Self {
            qubits: n,
            sectors,
            q: q.matrix().clone(),
        })
    }

    /// Measure, correct by `E(s)`, then apply `P(y)` with `y ~ Q(x, ·)`.
    pub fn step(&self, joint: &JointState) -> Result<JointState> {
        if joint.qubits != self.qubits {
            return Err(Error::DimensionMismatch {
                context: "joint state qubits",
                expected: self.qubits,
                found: joint.qubits,
            });
        }
        let dim = 1usize << self.qubits;
        let states = joint.blocks.len();
        // after measurement and correction every block lies in the code space
        let corrected: Vec<DMatrix<Complex64>> = joint
            .blocks
            .iter()
            .map(|sigma| {
                let mut acc = DMatrix::zeros(dim, dim);
                if sigma.iter().all(|c| c.norm() == 0.0) {
                    return acc;
                }
                for (proj, e) in &self.sectors {
                    acc += conjugate_by_pauli(e, &(proj * sigma * proj));
                }
                acc
            })
            .collect();
        let mut blocks = Vec::with_capacity(states);
        for y in 0..states {
            let mut acc = DMatrix::zeros(dim, dim);
            for (x, block) in corrected.iter().enumerate() {
                let w = self.q[(x, y)];
                if w != 0.0 {
                    acc += block.scale(w);
                }
            }
            let label = PauliLabel::from_symplectic(&BitVector::from_mask(2 * self.qubits, y as u64))?;
            blocks.push(conjugate_by_pauli(&label, &acc));
        }
        Ok(JointState {
            qubits: self.qubits,
            blocks,
        })
    }
}

/// One exact step; builds the channel each call (see [`ExactChannel`] to reuse it).
pub fn algorithm1_channel_step(model: &StabilizerModel, q: &TransitionMatrix, joint: &JointState) -> Result<JointState> {
    ExactChannel::new(model, q)?.step(joint)
}

/// `Q(x, y) = π(y)`: the classical kernel that resamples exactly.
pub fn resampling_kernel(pi: &crate::oracle::ExactDistribution) -> Result<TransitionMatrix> {
    let d = pi.dense();
    let n = d.len();
    TransitionMatrix::from_dense(pi.bits(), DMatrix::from_fn(n, n, |_, j| d[j]))
}

/// Pauli-frame simulation of Algorithm 1: the physical state is `P(frame)`
/// applied to a code state, so every measurement is deterministic given the frame.
#[derive(Clone, Debug)]
pub struct PauliFrameSampler<'a> {
    model: &'a StabilizerModel,
    kernel: KernelId,
    params: ChainParams,
    frame: BitVector,
    x: BitVector,
}

impl<'a> PauliFrameSampler<'a> {
    pub fn new(
        model: &'a StabilizerModel,
        kernel: KernelId,
        params: ChainParams,
        frame: &PauliLabel,
        x0: &BitVector,
    ) -> Result<Self> {
        if !kernel.on_configurations() {
            return Err(Error::InvalidParameter(format!(
                "kernel {kernel} does not act on error configurations"
            )));
        }
        let two_n = 2 * model.qubits();
        if frame.qubits() != model.qubits() || x0.len() != two_n {
            return Err(Error::DimensionMismatch {
                context: "frame / classical register",
                expected: two_n,
                found: x0.len().max(2 * frame.qubits()),
            });
        }
        Ok(Self {
            model,
            kernel,
            params,
            frame: frame.to_symplectic(),
            x: x0.clone(),
        })
    }

    pub fn frame(&self) -> PauliLabel {
        PauliLabel::from_symplectic(&self.frame).expect("even length")
    }

    pub fn register(&self) -> &BitVector {
        &self.x
    }

    /// Returns the measured syndrome of this step.
    pub fn step<R: Rng + ?Sized>(&mut self, rng: &mut R) -> Result<BitVector> {
        let code = self.model.classical_code();
        let s = code.syndrome(&self.frame)?;
        let e = gf2::lex_min_solution(code.h(), &s)?.ok_or(Error::UnreachableSyndrome)?;
        let y = dynamics::step(self.kernel, code, &self.params, &self.x, rng)?;
        self.frame.xor_assign(&e);
        self.frame.xor_assign(&y);
        self.x = y;
        Ok(s)
    }
}

/// Syndromes measured over `steps` iterations from a Pauli frame and register `x0`.
pub fn trajectory_sampler<R: Rng + ?Sized>(
    model: &StabilizerModel,
    kernel: KernelId,
    params: ChainParams,
    frame: &PauliLabel,
    x0: &BitVector,
    steps: usize,
    rng: &mut R,
) -> Result<Vec<BitVector>> {
    let mut sampler = PauliFrameSampler::new(model, kernel, params, frame, x0)?;
    (0..steps).map(|_| sampler.step(rng)).collect()
}

/// Two-qubit model with stabilizers `XX` and `ZZ` (one Bell state, `k = 0`).
pub fn bell_pair() -> StabilizerModel {
    StabilizerModel::build(BitMatrix::from_bit_rows(&["1100", "0011"]).expect("valid rows"))
        .expect("XX and ZZ commute")
}
