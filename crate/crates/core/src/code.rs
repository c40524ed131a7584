//! Classical codes: graphs, parity-check matrices, toric families and
//! graphic / cographic certificates.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gf2::{self, BitMatrix, BitVector};

/// Undirected multigraph. The edge list order is the edge (check) indexing.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Graph {
    vertices: usize,
    edges: Vec<(usize, usize)>,
}

impl Graph {
    pub fn new(vertices: usize, edges: Vec<(usize, usize)>) -> Result<Self> {
        for (e, &(u, v)) in edges.iter().enumerate() {
            for w in [u, v] {
                if w >= vertices {
                    return Err(Error::IndexOutOfRange {
                        index: w,
                        len: vertices,
                    });
                }
            }
            if u == v {
                return Err(Error::SelfLoop { edge: e, vertex: u });
            }
        }
        Ok(Self { vertices, edges })
    }

    /// Cycle `0-1-…-(m−1)-0`; `m = 2` gives two parallel edges.
    pub fn cycle(m: usize) -> Result<Self> {
        if m < 2 {
            return Err(Error::InvalidParameter(format!("cycle needs at least 2 vertices, got {m}")));
        }
        Self::new(m, (0..m).map(|i| (i, (i + 1) % m)).collect())
    }

    pub fn path(m: usize) -> Result<Self> {
        if m < 1 {
            return Err(Error::InvalidParameter("path needs at least one vertex".into()));
        }
        Self::new(m, (0..m - 1).map(|i| (i, i + 1)).collect())
    }

    /// Complete graph, edges in lexicographic order of `(u, v)` with `u < v`.
    pub fn complete(m: usize) -> Result<Self> {
        let edges = (0..m)
            .flat_map(|u| (u + 1..m).map(move |v| (u, v)))
            .collect();
        Self::new(m, edges)
    }

    /// Two vertices joined by `k` parallel edges.
    pub fn theta(k: usize) -> Result<Self> {
        Self::new(2, vec![(0, 1); k])
    }

    /// 1-skeleton of the periodic `L^dim` hypercubic lattice.
    ///
    /// Vertex `x` has index `Σ x_i L^i`; edge `(x, axis)` joins `x` and
    /// `x + e_axis` and has index `x·dim + axis`.
    pub fn torus(dim: usize, l: usize) -> Result<Self> {
        if l < 2 || dim == 0 {
            return Err(Error::InvalidParameter(format!(
                "torus needs side length >= 2 and dimension >= 1, got L={l}, dim={dim}"
            )));
        }
        let lat = Lattice::new(dim, l);
        let edges = (0..lat.sites)
            .flat_map(|v| (0..dim).map(move |a| (v, a)))
            .map(|(v, a)| (v, lat.shift(v, a, 1)))
            .collect();
        Self::new(lat.sites, edges)
    }

    /// 1-skeleton of the dual 4D lattice, with edge `4v + t` crossing the 3-cell
    /// `TRIPLES[t]` at site `v` — the row order of the 4D toric Z checks.
    pub fn dual_torus4(l: usize) -> Result<Self> {
        if l < 2 {
            return Err(Error::InvalidParameter(format!("torus needs side length >= 2, got L={l}")));
        }
        let lat = Lattice::new(4, l);
        let edges = (0..lat.sites)
            .flat_map(|v| TRIPLES.iter().map(move |&(a, b, c)| (v, 6 - a - b - c)))
            .map(|(v, d)| (v, lat.shift(v, d, -1)))
            .collect();
        Self::new(lat.sites, edges)
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn edge(&self, e: usize) -> (usize, usize) {
        self.edges[e]
    }

    /// Edge–vertex incidence matrix (`|E| × |V|`, two ones per row).
    pub fn incidence_matrix(&self) -> BitMatrix {
        let rows = self
            .edges
            .iter()
            .map(|&(u, v)| BitVector::from_indices(self.vertices, [u, v]))
            .collect();
        BitMatrix::from_rows(rows, self.vertices).expect("rows have vertex-count length")
    }

    /// Incident edges per vertex, each list in ascending edge order.
    pub fn adjacency(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.vertices];
        for (e, &(u, v)) in self.edges.iter().enumerate() {
            adj[u].push(e);
            adj[v].push(e);
        }
        adj
    }

    pub fn connected_components(&self) -> usize {
        let mut parent: Vec<usize> = (0..self.vertices).collect();
        fn find(p: &mut [usize], mut x: usize) -> usize {
            while p[x] != x {
                p[x] = p[p[x]];
                x = p[x];
            }
            x
        }
        let mut comps = self.vertices;
        for &(u, v) in &self.edges {
            let (a, b) = (find(&mut parent, u), find(&mut parent, v));
            if a != b {
                parent[a] = b;
                comps -= 1;
            }
        }
        comps
    }

    /// Text format: `m` on the first line, then one `u v` pair per edge.
    pub fn to_text(&self) -> String {
        let mut s = format!("{}\n", self.vertices);
        for (u, v) in &self.edges {
            s.push_str(&format!("{u} {v}\n"));
        }
        s
    }
}

impl FromStr for Graph {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut lines = content_lines(s);
        let (hl, header) = lines.next().ok_or_else(|| Error::parse(1, "missing vertex count"))?;
        let m = parse_usize(header, hl)?;
        let mut edges = Vec::new();
        for (ln, line) in lines {
            if line.is_empty() {
                continue;
            }
            let nums = line
                .split_whitespace()
                .map(|t| parse_usize(t, ln))
                .collect::<Result<Vec<_>>>()?;
            let [u, v] = nums[..] else {
                return Err(Error::parse(ln, "edge line must be `u v`"));
            };
            edges.push((u, v));
        }
        Graph::new(m, edges)
    }
}

fn content_lines(s: &str) -> impl Iterator<Item = (usize, &str)> {
    s.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.starts_with('#'))
        .skip_while(|(_, l)| l.is_empty())
}

fn parse_usize(tok: &str, line: usize) -> Result<usize> {
    tok.trim()
        .parse()
        .map_err(|_| Error::parse(line, format!("expected a nonnegative integer, found {tok:?}")))
}

/// Periodic hypercubic lattice coordinates.
#[derive(Clone, Copy, Debug)]
struct Lattice {
    l: usize,
    sites: usize,
}

impl Lattice {
    fn new(dim: usize, l: usize) -> Self {
        Self {
            l,
            sites: l.pow(dim as u32),
        }
    }

    /// `v + step·e_axis` (mod L).
    fn shift(&self, v: usize, axis: usize, step: isize) -> usize {
        let stride = self.l.pow(axis as u32);
        let coord = (v / stride) % self.l;
        let new = (coord as isize + step).rem_euclid(self.l as isize) as usize;
        v - coord * stride + new * stride
    }
}

/// A classical linear code given by its `c × n` parity-check matrix.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParityCheckCode {
    h: BitMatrix,
    rank: usize,
}

impl ParityCheckCode {
    pub fn new(h: BitMatrix) -> Result<Self> {
        if h.rows() == 0 || h.cols() == 0 {
            return Err(Error::InvalidParameter(format!(
                "a code needs at least one check and one bit, got {}x{}",
                h.rows(),
                h.cols()
            )));
        }
        let rank = h.rank();
        Ok(Self { h, rank })
    }

    /// Ising model on `graph`: one check per edge, one bit per vertex.
    pub fn ising(graph: &Graph) -> Result<Self> {
        Self::new(graph.incidence_matrix())
    }

    pub fn h(&self) -> &BitMatrix {
        &self.h
    }

    /// Number of checks `c`.
    pub fn checks(&self) -> usize {
        self.h.rows()
    }

    /// Number of bits `n`.
    pub fn bits(&self) -> usize {
        self.h.cols()
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    /// `k = n − rank(h)`.
    pub fn kernel_dim(&self) -> usize {
        self.bits() - self.rank
    }

    fn check_len(&self, x: &BitVector) -> Result<()> {
        if x.len() != self.bits() {
            return Err(Error::DimensionMismatch {
                context: "configuration length",
                expected: self.bits(),
                found: x.len(),
            });
        }
        Ok(())
    }

    /// Syndrome `hx`.
    pub fn syndrome(&self, x: &BitVector) -> Result<BitVector> {
        self.h.mul_vec(x)
    }

    /// `H(x) = 2|hx|`.
    pub fn energy(&self, x: &BitVector) -> Result<usize> {
        Ok(2 * self.syndrome(x)?.weight())
    }

    /// Satisfied checks `E(x) = {e : (hx)_e = 0}` as a membership vector over checks.
    pub fn satisfied_checks(&self, x: &BitVector) -> Result<BitVector> {
        self.check_len(x)?;
        Ok(self.syndrome(x)?.not())
    }

    /// `k(A) = dim ker(h_A)` for a check subset `A`.
    pub fn subset_kernel_dim(&self, a: &BitVector) -> usize {
        let sub = self.h.row_submatrix_mask(a).expect("subset over checks");
        self.bits() - sub.rank()
    }

    /// Check-list text: `c n`, then per check its variable indices.
    pub fn to_check_list(&self) -> String {
        let mut s = format!("{} {}\n", self.checks(), self.bits());
        for row in self.h.row_vectors() {
            let idx: Vec<String> = row.iter_ones().map(|i| i.to_string()).collect();
            s.push_str(&idx.join(" "));
            s.push('\n');
        }
        s
    }

    pub fn from_check_list(text: &str) -> Result<Self> {
        let mut lines = content_lines(text);
        let (hl, header) = lines.next().ok_or_else(|| Error::parse(1, "missing `c n` header"))?;
        let dims = header
            .split_whitespace()
            .map(|t| parse_usize(t, hl))
            .collect::<Result<Vec<_>>>()?;
        let [c, n] = dims[..] else {
            return Err(Error::parse(hl, "header must be `c n`"));
        };
        let rest: Vec<(usize, &str)> = lines.collect();
        let used = rest.len().min(c);
        if rest.len() < c {
            return Err(Error::parse(hl, format!("expected {c} checks, found {}", rest.len())));
        }
        if let Some((ln, _)) = rest[used..].iter().find(|(_, l)| !l.is_empty()) {
            return Err(Error::parse(*ln, format!("more than {c} checks")));
        }
        let mut rows = Vec::with_capacity(c);
        for &(ln, line) in &rest[..used] {
            let mut row = BitVector::zeros(n);
            for tok in line.split_whitespace() {
                let i = parse_usize(tok, ln)?;
                if i >= n {
                    return Err(Error::parse(ln, format!("variable {i} out of range for n = {n}")));
                }
                row.flip(i);
            }
            rows.push(row);
        }
        Self::new(BitMatrix::from_rows(rows, n)?)
    }
}

/// The two sectors of a CSS code.
#[derive(Clone, Debug)]
pub struct CssPair {
    pub hx: ParityCheckCode,
    pub hz: ParityCheckCode,
}

/// 2D toric code on the `L × L` periodic square lattice.
///
/// Horizontal edge `(x, y)` has index `yL + x`, vertical edge `(x, y)` has
/// index `L² + yL + x`. `hX` rows are vertex stars, `hZ` rows plaquettes.
pub fn toric2d(l: usize) -> Result<CssPair> {
    if l < 2 {
        return Err(Error::InvalidParameter(format!("toric code needs L >= 2, got {l}")));
    }
    let n = 2 * l * l;
    let hor = |x: usize, y: usize| (y % l) * l + (x % l);
    let ver = |x: usize, y: usize| l * l + (y % l) * l + (x % l);
    let mut star = Vec::with_capacity(l * l);
    let mut plaq = Vec::with_capacity(l * l);
    for y in 0..l {
        for x in 0..l {
            star.push(BitVector::from_indices(
                n,
                [hor(x, y), hor(x + l - 1, y), ver(x, y), ver(x, y + l - 1)],
            ));
            plaq.push(BitVector::from_indices(
                n,
                [hor(x, y), hor(x, y + 1), ver(x, y), ver(x + 1, y)],
            ));
        }
    }
    Ok(CssPair {
        hx: ParityCheckCode::new(BitMatrix::from_rows(star, n)?)?,
        hz: ParityCheckCode::new(BitMatrix::from_rows(plaq, n)?)?,
    })
}

const PAIRS: [(usize, usize); 6] = [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)];
const TRIPLES: [(usize, usize, usize); 4] = [(0, 1, 2), (0, 1, 3), (0, 2, 3), (1, 2, 3)];

fn pair_index(a: usize, b: usize) -> usize {
    PAIRS.iter().position(|&p| p == (a, b)).expect("ordered axis pair")
}

/// 4D toric code: bits on the `6L⁴` faces of the periodic `L⁴` lattice.
///
/// Face `(v, a<b)` has index `6v + pair(a,b)`, edge `(v, a)` index `4v + a`
/// (matching [`Graph::torus`]), cube `(v, a<b<c)` index `4v + triple`. `hX`
/// rows are edges (each checks the faces it bounds), `hZ` rows are cubes.
pub fn toric4d(l: usize) -> Result<CssPair> {
    if l < 2 {
        return Err(Error::InvalidParameter(format!("toric code needs L >= 2, got {l}")));
    }
    let lat = Lattice::new(4, l);
    let n = 6 * lat.sites;
    let edge_count = 4 * lat.sites;
    let mut hx = BitMatrix::zeros(edge_count, n);
    for v in 0..lat.sites {
        for (pi, &(a, b)) in PAIRS.iter().enumerate() {
            let face = 6 * v + pi;
            for edge in [
                4 * v + a,
                4 * v + b,
                4 * lat.shift(v, a, 1) + b,
                4 * lat.shift(v, b, 1) + a,
            ] {
                hx.set(edge, face, true);
            }
        }
    }
    let mut cubes = Vec::with_capacity(4 * lat.sites);
    for v in 0..lat.sites {
        for &(a, b, c) in &TRIPLES {
            cubes.push(BitVector::from_indices(
                n,
                [
                    6 * v + pair_index(a, b),
                    6 * v + pair_index(a, c),
                    6 * v + pair_index(b, c),
                    6 * lat.shift(v, c, 1) + pair_index(a, b),
                    6 * lat.shift(v, b, 1) + pair_index(a, c),
                    6 * lat.shift(v, a, 1) + pair_index(b, c),
                ],
            ));
        }
    }
    Ok(CssPair {
        hx: ParityCheckCode::new(hx)?,
        hz: ParityCheckCode::new(BitMatrix::from_rows(cubes, n)?)?,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    /// Row dependencies of `h` embed in the cycle space of the graph.
    Primal,
    /// The same test applied to a generator of `col(h)⊥`.
    Dual,
}

impl fmt::Display for Direction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Direction::Primal => "primal",
            Direction::Dual => "dual",
        })
    }
}

impl FromStr for Direction {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "primal" | "graphic" => Ok(Direction::Primal),
            "dual" | "cographic" => Ok(Direction::Dual),
            other => Err(Error::InvalidParameter(format!("unknown direction {other:?}"))),
        }
    }
}

/// Witness that a code is Δ-graphic (primal) or Δ-cographic (dual) with respect to a graph.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GraphicCertificate {
    pub incidence: BitMatrix,
    pub direction: Direction,
    pub delta: usize,
    /// Vertex count of the graph. Recorded only; no size condition is enforced.
    pub vertices: usize,
}

impl GraphicCertificate {
    /// Recompute containment and the dimension gap from scratch.
    pub fn verify(&self, code: &ParityCheckCode) -> bool {
        matches!(
            certify_incidence(code, &self.incidence, self.direction),
            Ok(Some(d)) if d == self.delta
        )
    }
}

/// The matrix `M` whose row dependencies `ker(Mᵀ)` are tested.
fn tested_matrix(code: &ParityCheckCode, direction: Direction) -> BitMatrix {
    match direction {
        Direction::Primal => code.h().clone(),
        Direction::Dual => gf2::orthogonal_complement_generator(code.h()),
    }
}

fn certify_incidence(code: &ParityCheckCode, incidence: &BitMatrix, direction: Direction) -> Result<Option<usize>> {
    if incidence.rows() != code.checks() {
        return Err(Error::DimensionMismatch {
            context: "graph edges vs checks",
            expected: code.checks(),
            found: incidence.rows(),
        });
    }
    let m = tested_matrix(code, direction);
    let gt = incidence.transpose();
    let deps = gf2::kernel_basis(&m.transpose());
    for v in &deps {
        if !gt.mul_vec(v)?.is_zero() {
            return Ok(None);
        }
    }
    let cycle_dim = gf2::kernel_dim(&gt);
    Ok(Some(cycle_dim - deps.len()))
}

/// Test whether `code` is Δ-graphic (`Primal`) or Δ-cographic (`Dual`) with
/// respect to `graph`, whose edges must be indexed like the checks.
///
/// Returns the achieved Δ, or `None` when the containment fails.
pub fn certify_graphic(
    code: &ParityCheckCode,
    graph: &Graph,
    direction: Direction,
) -> Result<Option<GraphicCertificate>> {
    let incidence = graph.incidence_matrix();
    let delta = certify_incidence(code, &incidence, direction)?;
    Ok(delta.map(|delta| GraphicCertificate {
        incidence,
        direction,
        delta,
        vertices: graph.vertex_count(),
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn all_vectors(n: usize) -> impl Iterator<Item = BitVector> {
        (0..1u64 << n).map(move |m| BitVector::from_mask(n, m))
    }

    #[test]
    fn graph_validation() {
        assert!(matches!(Graph::new(2, vec![(0, 2)]), Err(Error::IndexOutOfRange { .. })));
        assert!(matches!(Graph::new(2, vec![(1, 1)]), Err(Error::SelfLoop { edge: 0, vertex: 1 })));
        assert!(Graph::new(2, vec![(0, 1), (0, 1)]).is_ok());
    }

    #[test]
    fn incidence_examples() {
        let single = Graph::new(2, vec![(0, 1)]).unwrap();
        assert_eq!(single.incidence_matrix(), BitMatrix::from_bit_rows(&["11"]).unwrap());
        let k3 = Graph::complete(3).unwrap().incidence_matrix();
        assert!(k3.row_vectors().iter().all(|r| r.weight() == 2));
        let p3 = Graph::path(3).unwrap().incidence_matrix();
        assert_eq!((p3.rows(), p3.cols(), p3.rank()), (2, 3, 2));
        assert!(gf2::kernel_basis(&p3.transpose()).is_empty());
    }

    #[test]
    fn toric2d_l2() {
        let t = toric2d(2).unwrap();
        assert_eq!((t.hx.bits(), t.hx.checks(), t.hx.rank()), (8, 4, 3));
        assert_eq!(t.hz.checks(), 4);
        assert!(toric2d(1).is_err());
    }

    #[test]
    fn toric2d_structure() {
        for l in 2..=4 {
            let t = toric2d(l).unwrap();
            assert!(t.hx.h().mul(&t.hz.h().transpose()).unwrap().is_zero());
            for code in [&t.hx, &t.hz] {
                assert!(code.h().row_vectors().iter().all(|r| r.weight() == 4));
                let deps = gf2::kernel_basis(&code.h().transpose());
                assert_eq!(deps, vec![BitVector::ones(l * l)]);
            }
        }
    }

    #[test]
    fn toric4d_l2_counts_and_boundaries() {
        let t = toric4d(2).unwrap();
        assert_eq!((t.hx.bits(), t.hx.checks(), t.hz.checks()), (96, 64, 64));
        assert!(t.hx.h().mul(&t.hz.h().transpose()).unwrap().is_zero());
        let g = Graph::torus(4, 2).unwrap().incidence_matrix();
        assert!(g.transpose().mul(t.hx.h()).unwrap().is_zero());
        // every face has 4 boundary edges, every edge bounds 6 faces
        assert!(t.hx.h().transpose().row_vectors().iter().all(|c| c.weight() == 4));
        assert!(t.hx.h().row_vectors().iter().all(|r| r.weight() == 6));
        assert!(t.hz.h().row_vectors().iter().all(|r| r.weight() == 6));
        let gap = gf2::kernel_dim(&g.transpose()) - t.hx.rank();
        assert_eq!(gap, 4);
    }

    #[test]
    fn energy_and_satisfied_checks() {
        let k3 = ParityCheckCode::ising(&Graph::complete(3).unwrap()).unwrap();
        let x: BitVector = "100".parse().unwrap();
        assert_eq!(k3.energy(&x).unwrap(), 4);
        // K3 edges are (0,1), (0,2), (1,2): only the last is satisfied
        assert_eq!(k3.satisfied_checks(&x).unwrap(), "001".parse().unwrap());
        assert_eq!(k3.energy(&BitVector::ones(3)).unwrap(), 0);
        assert_eq!(k3.satisfied_checks(&BitVector::zeros(3)).unwrap(), BitVector::ones(3));
        assert!(k3.energy(&BitVector::zeros(4)).is_err());
    }

    #[test]
    fn max_energy_matches_enumeration() {
        // K4: a cut has at most 4 edges
        let k4 = ParityCheckCode::ising(&Graph::complete(4).unwrap()).unwrap();
        let max = all_vectors(4).map(|x| k4.energy(&x).unwrap()).max().unwrap();
        assert_eq!(max, 8);
    }

    #[test]
    fn certify_claims() {
        // independent checks + path graph
        let indep = ParityCheckCode::new(BitMatrix::from_bit_rows(&["1100", "0110", "0011"]).unwrap()).unwrap();
        let cert = certify_graphic(&indep, &Graph::path(4).unwrap(), Direction::Primal).unwrap().unwrap();
        assert_eq!(cert.delta, 0);
        assert!(cert.verify(&indep));

        for l in 2..=3 {
            let t = toric2d(l).unwrap();
            let cycle = Graph::cycle(l * l).unwrap();
            let cert = certify_graphic(&t.hx, &cycle, Direction::Primal).unwrap().unwrap();
            assert_eq!(cert.delta, 0);
        }

        let t4 = toric4d(2).unwrap();
        let cert = certify_graphic(&t4.hx, &Graph::torus(4, 2).unwrap(), Direction::Dual)
            .unwrap()
            .unwrap();
        assert_eq!((cert.delta, cert.vertices), (4, 16));
        assert!(cert.verify(&t4.hx));
        let cert = certify_graphic(&t4.hz, &Graph::dual_torus4(2).unwrap(), Direction::Dual)
            .unwrap()
            .unwrap();
        assert_eq!(cert.delta, 4);
        assert!(cert.verify(&t4.hz));
    }

    #[test]
    fn certify_rejects_wrong_graph() {
        let t = toric2d(2).unwrap();
        // a path has no cycles, so the all-ones dependency cannot embed
        assert!(certify_graphic(&t.hx, &Graph::path(5).unwrap(), Direction::Primal).unwrap().is_none());
        assert!(certify_graphic(&t.hx, &Graph::path(3).unwrap(), Direction::Primal).is_err());
    }

    #[test]
    fn text_formats_round_trip() {
        let g = Graph::complete(4).unwrap();
        assert_eq!(g.to_text().parse::<Graph>().unwrap(), g);
        let code = toric2d(3).unwrap().hz;
        assert_eq!(ParityCheckCode::from_check_list(&code.to_check_list()).unwrap(), code);
        assert!(ParityCheckCode::from_check_list("2 3\n0 1\n").is_err());
        assert!(ParityCheckCode::from_check_list("1 3\n0 3\n").is_err());
        assert!("3\n0 1\n1 1\n".parse::<Graph>().is_err());
    }

    fn arb_graph() -> impl Strategy<Value = Graph> {
        (2usize..7).prop_flat_map(|m| {
            proptest::collection::vec((0..m, 1..m), 1..10).prop_map(move |pairs| {
                let edges = pairs.into_iter().map(|(u, d)| (u, (u + d) % m)).collect();
                Graph::new(m, edges).unwrap()
            })
        })
    }

    proptest! {
        #[test]
        fn ising_kernel_counts_components(g in arb_graph()) {
            let code = ParityCheckCode::ising(&g).unwrap();
            prop_assert_eq!(code.kernel_dim(), g.connected_components());
        }

        #[test]
        fn energy_complements_satisfied(g in arb_graph(), mask in any::<u64>()) {
            let code = ParityCheckCode::ising(&g).unwrap();
            let x = BitVector::from_mask(code.bits(), mask & ((1 << code.bits()) - 1));
            let sat = code.satisfied_checks(&x).unwrap();
            prop_assert_eq!(code.energy(&x).unwrap(), 2 * (code.checks() - sat.weight()));
        }

        #[test]
        fn certificate_implies_exhaustive_containment(g in arb_graph(), rows in proptest::collection::vec(any::<u16>(), 1..10)) {
            let c = g.edge_count();
            let n = 5;
            let h = BitMatrix::from_rows(
                (0..c).map(|i| BitVector::from_mask(n, u64::from(rows[i % rows.len()]) & 0x1f)).collect(),
                n,
            ).unwrap();
            prop_assume!(!h.is_zero());
            let code = ParityCheckCode::new(h).unwrap();
            if let Some(cert) = certify_graphic(&code, &g, Direction::Primal).unwrap() {
                let gt = cert.incidence.transpose();
                let ht = code.h().transpose();
                for v in all_vectors(c) {
                    if ht.mul_vec(&v).unwrap().is_zero() {
                        prop_assert!(gt.mul_vec(&v).unwrap().is_zero());
                    }
                }
            }
        }
    }
}
