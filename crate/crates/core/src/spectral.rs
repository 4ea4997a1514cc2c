//! Max-algebraic and classical spectral machinery: the maximum cycle
//! geometric mean, critical graphs, Kleene stars, strict visualization,
//! spectral classes in both algebras and the reduction to eigenvalue one.

use serde::{Deserialize, Serialize};

use crate::algebra::{Matrix, Semiring, Tolerance, Vector};
use crate::error::{Error, Result};
use crate::graphs::{cyclicity_of_component, digraph_of, frobenius_form, CyclicStructure, Digraph, FrobeniusForm};

/// Maximum cycle geometric mean `λ(A)`; zero for acyclic patterns.
///
/// Karp's algorithm runs on every strongly connected component with log
/// weights, so path sums never overflow.
pub fn max_cycle_mean(a: &Matrix) -> f64 {
    max_cycle_mean_with(a, &Tolerance::default())
}

pub fn max_cycle_mean_with(a: &Matrix, tol: &Tolerance) -> f64 {
    let g = digraph_of(a, tol);
    let mut best = f64::NEG_INFINITY;
    for comp in g.strongly_connected_components() {
        if comp.len() == 1 && !g.has_edge(comp[0], comp[0]) {
            continue;
        }
        best = best.max(karp_log(a, &g, &comp));
    }
    if best == f64::NEG_INFINITY {
        0.0
    } else {
        best.exp()
    }
}

/// Max mean cycle weight (log domain) inside one strongly connected component.
fn karp_log(a: &Matrix, g: &Digraph, comp: &[usize]) -> f64 {
    let m = comp.len();
    let mut local = vec![usize::MAX; a.dim()];
    for (k, &v) in comp.iter().enumerate() {
        local[v] = k;
    }
    let mut edges = Vec::new();
    for &u in comp {
        for v in g.successors(u) {
            if local[v] != usize::MAX {
                edges.push((local[u], local[v], a.get(u, v).ln()));
            }
        }
    }
    let neg = f64::NEG_INFINITY;
    let mut d = vec![vec![neg; m]; m + 1];
    d[0][0] = 0.0;
    for k in 1..=m {
        for &(u, v, w) in &edges {
            if d[k - 1][u] > neg {
                let cand = d[k - 1][u] + w;
                if cand > d[k][v] {
                    d[k][v] = cand;
                }
            }
        }
    }
    let mut best = neg;
    for v in 0..m {
        if d[m][v] == neg {
            continue;
        }
        let mut worst = f64::INFINITY;
        for k in 0..m {
            if d[k][v] > neg {
                worst = worst.min((d[m][v] - d[k][v]) / (m - k) as f64);
            }
        }
        best = best.max(worst);
    }
    best
}

/// Kleene star `A* = I ⊕ A ⊕ A^{⊗2} ⊕ …` by Floyd–Warshall relaxation.
pub fn kleene_star(a: &Matrix, tol: &Tolerance) -> Result<Matrix> {
    let lambda = max_cycle_mean_with(a, tol);
    if lambda > 1.0 + tol.rel_eps {
        return Err(Error::KleeneDiverges);
    }
    let n = a.dim();
    let mut c = a.with_semiring(Semiring::MaxTimes).rows();
    for k in 0..n {
        for i in 0..n {
            let cik = c[i][k];
            if cik == 0.0 {
                continue;
            }
            for j in 0..n {
                let cand = cik * c[k][j];
                if cand > c[i][j] {
                    c[i][j] = cand;
                }
            }
        }
    }
    for (i, row) in c.iter_mut().enumerate() {
        row[i] = row[i].max(1.0);
    }
    Matrix::from_rows(&c, Semiring::MaxTimes)
}

/// Critical edges of `A` with `λ(A) = 1`: `a_ij · a*_ji ≈ 1`.
fn critical_edge_mask(a: &Matrix, star: &Matrix, tol: &Tolerance) -> Vec<bool> {
    let n = a.dim();
    let mut mask = vec![false; n * n];
    for i in 0..n {
        for j in 0..n {
            let w = a.get(i, j);
            if w > tol.abs_eps && w * star.get(j, i) >= 1.0 - tol.rel_eps {
                mask[i * n + j] = true;
            }
        }
    }
    mask
}

/// Diagonal scaling `B = X^{-1} A X` with `b_ij ≤ 1` and `b_ij = 1` exactly
/// on critical edges. Requires `λ(A) = 1`.
pub fn visualize_strict(a: &Matrix, tol: &Tolerance) -> Result<(Vector, Matrix)> {
    let n = a.dim();
    let a = a.with_semiring(Semiring::MaxTimes);
    let star = kleene_star(&a, tol)?;
    let critical = critical_edge_mask(&a, &star, tol);

    let is_strict = |b: &Matrix| -> Option<(usize, usize, f64)> {
        for i in 0..n {
            for j in 0..n {
                let v = b.get(i, j);
                let one = v >= 1.0 - tol.rel_eps;
                if v > 1.0 + tol.rel_eps || one != critical[i * n + j] {
                    return Some((i, j, v));
                }
            }
        }
        None
    };

    if is_strict(&a).is_none() {
        return Ok((Vector::ones(n), a));
    }

    // Row sums of A*: an ordinary sum of columns of A* is a sub-eigenvector,
    // and it is strict off the critical edges.
    let x: Vec<f64> = (0..n).map(|i| (0..n).map(|j| star.get(i, j)).sum()).collect();
    let m = x.iter().copied().fold(0.0, f64::max);
    let x = Vector::new(x.iter().map(|v| v / m).collect())?;
    let b = a.diagonal_similarity(&x)?;
    if let Some((i, j, value)) = is_strict(&b) {
        return Err(Error::VisualizationFailed { i, j, value });
    }
    Ok((x, b))
}

/// One strongly connected component of the critical graph.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CriticalComponent {
    pub nodes: Vec<usize>,
    pub cyclic: CyclicStructure,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CriticalGraph {
    pub lambda: f64,
    pub nodes: Vec<usize>,
    pub edges: Vec<(usize, usize)>,
    pub components: Vec<CriticalComponent>,
}

impl CriticalGraph {
    /// lcm of the component cyclicities.
    pub fn cyclicity(&self) -> usize {
        self.components
            .iter()
            .fold(1, |acc, c| crate::graphs::lcm(acc, c.cyclic.sigma))
    }

    pub fn digraph(&self, n: usize) -> Digraph {
        Digraph::from_edges(n, self.edges.iter().copied())
    }

    pub fn component_of(&self, node: usize) -> Option<usize> {
        self.components.iter().position(|c| c.nodes.contains(&node))
    }
}

/// Nodes and edges on cycles attaining `λ(A)`.
pub fn critical_graph(a: &Matrix, tol: &Tolerance) -> Result<CriticalGraph> {
    let lambda = max_cycle_mean_with(a, tol);
    if lambda <= tol.abs_eps {
        return Err(Error::NoCriticalGraph);
    }
    let n = a.dim();
    let scaled = a.with_semiring(Semiring::MaxTimes).scaled(1.0 / lambda);
    let (_, b) = visualize_strict(&scaled, tol)?;
    let ones = b.booleanize(tol)?;
    let bool_graph = Digraph::from_edges(
        n,
        (0..n)
            .flat_map(|i| (0..n).map(move |j| (i, j)))
            .filter(|&(i, j)| ones.get(i, j) > 0.0),
    );
    let mut components = Vec::new();
    let mut edges = Vec::new();
    for comp in bool_graph.strongly_connected_components() {
        if comp.len() == 1 && !bool_graph.has_edge(comp[0], comp[0]) {
            continue;
        }
        for &u in &comp {
            for &v in &comp {
                if bool_graph.has_edge(u, v) {
                    edges.push((u, v));
                }
            }
        }
        let cyclic = cyclicity_of_component(&bool_graph, &comp)?;
        components.push(CriticalComponent { nodes: comp, cyclic });
    }
    components.sort_by_key(|c| c.nodes[0]);
    edges.sort_unstable();
    let mut nodes: Vec<usize> = components.iter().flat_map(|c| c.nodes.clone()).collect();
    nodes.sort_unstable();
    Ok(CriticalGraph {
        lambda,
        nodes,
        edges,
        components,
    })
}

/// Perron root and Perron vector (max entry 1) of an irreducible nonnegative
/// block in ordinary arithmetic.
///
/// Power iteration on the shifted block `B/s + cI` with `c` the (scaled)
/// maximum cycle mean, stopped by the Collatz–Wielandt bracket.
pub fn perron_pair(block: &Matrix) -> (f64, Vector) {
    let n = block.dim();
    let s = block.max_entry();
    if s == 0.0 {
        return (0.0, Vector::ones(n));
    }
    if n == 1 {
        return (block.get(0, 0), Vector::ones(1));
    }
    let b = block.with_semiring(Semiring::PlusTimes).scaled(1.0 / s);
    let shift = max_cycle_mean(&b).max(1e-3);
    let mut x = vec![1.0f64; n];
    let mut root = 0.0;
    for _ in 0..100_000 {
        let mut y = vec![0.0f64; n];
        for i in 0..n {
            let mut acc = shift * x[i];
            for j in 0..n {
                acc += b.get(i, j) * x[j];
            }
            y[i] = acc;
        }
        let (mut lo, mut hi) = (f64::INFINITY, 0.0f64);
        for i in 0..n {
            let r = y[i] / x[i];
            lo = lo.min(r);
            hi = hi.max(r);
        }
        let m = y.iter().copied().fold(0.0, f64::max);
        for (xi, yi) in x.iter_mut().zip(&y) {
            *xi = yi / m;
        }
        root = 0.5 * (lo + hi);
        if hi - lo <= 1e-14 * hi {
            break;
        }
    }
    let rho = ((root - shift) * s).max(0.0);
    (rho, Vector::from_vec_unchecked(x))
}

/// Perron roots of one Frobenius class in both algebras, with the spectral
/// flags of each algebra.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectralClassInfo {
    pub class_id: usize,
    pub nodes: Vec<usize>,
    pub rho_max: f64,
    pub rho_plus: f64,
    pub is_spectral_max: bool,
    pub is_spectral_plus: bool,
}

impl SpectralClassInfo {
    pub fn rho(&self, sr: Semiring) -> f64 {
        match sr {
            Semiring::PlusTimes => self.rho_plus,
            _ => self.rho_max,
        }
    }

    pub fn is_spectral(&self, sr: Semiring) -> bool {
        match sr {
            Semiring::PlusTimes => self.is_spectral_plus,
            _ => self.is_spectral_max,
        }
    }
}

/// Per-class Perron roots and spectral flags, in Frobenius order.
pub fn spectral_classes(a: &Matrix, tol: &Tolerance) -> (FrobeniusForm, Vec<SpectralClassInfo>) {
    let fnf = frobenius_form(a, tol);
    let r = fnf.class_count();
    let mut rho_max = vec![0.0; r];
    let mut rho_plus = vec![0.0; r];
    for mu in 0..r {
        if fnf.is_trivial(mu) {
            continue;
        }
        let block = a.submatrix(&fnf.classes[mu]);
        rho_max[mu] = max_cycle_mean_with(&block, tol);
        rho_plus[mu] = perron_pair(&block).0;
    }
    let infos = (0..r)
        .map(|nu| {
            let accessors = (0..r).filter(|&mu| mu != nu && fnf.accesses(mu, nu));
            let spectral_max = rho_max[nu] > tol.abs_eps
                && accessors.clone().all(|mu| tol.le(rho_max[mu], rho_max[nu]));
            let spectral_plus =
                rho_plus[nu] > tol.abs_eps && accessors.clone().all(|mu| tol.lt(rho_plus[mu], rho_plus[nu]));
            SpectralClassInfo {
                class_id: nu,
                nodes: fnf.classes[nu].clone(),
                rho_max: rho_max[nu],
                rho_plus: rho_plus[nu],
                is_spectral_max: spectral_max,
                is_spectral_plus: spectral_plus,
            }
        })
        .collect();
    (fnf, infos)
}

/// Distinct nonzero eigenvalues in the given algebra, descending.
pub fn spectrum(a: &Matrix, sr: Semiring, tol: &Tolerance) -> Vec<f64> {
    let (_, infos) = spectral_classes(a, tol);
    spectrum_of(&infos, sr, tol)
}

pub(crate) fn spectrum_of(infos: &[SpectralClassInfo], sr: Semiring, tol: &Tolerance) -> Vec<f64> {
    let mut values: Vec<f64> = infos
        .iter()
        .filter(|c| c.is_spectral(sr))
        .map(|c| c.rho(sr))
        .collect();
    values.sort_by(|a, b| b.total_cmp(a));
    values.dedup_by(|a, b| tol.eq(*a, *b));
    values
}

/// `A_ρ`: `A/ρ` restricted to the indices accessing an `(A, ρ)`-spectral
/// class, zero elsewhere.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RhoReduction {
    pub rho: f64,
    pub semiring: Semiring,
    pub m_rho: Vec<usize>,
    /// Class ids (in the Frobenius form of `A`) of the `(A, ρ)`-spectral classes.
    pub spectral_classes: Vec<usize>,
    pub a_rho: Matrix,
}

pub fn rho_reduction(a: &Matrix, rho: f64, sr: Semiring, tol: &Tolerance) -> Result<RhoReduction> {
    let (fnf, infos) = spectral_classes(a, tol);
    rho_reduction_with(a, &fnf, &infos, rho, sr, tol)
}

pub(crate) fn rho_reduction_with(
    a: &Matrix,
    fnf: &FrobeniusForm,
    infos: &[SpectralClassInfo],
    rho: f64,
    sr: Semiring,
    tol: &Tolerance,
) -> Result<RhoReduction> {
    let sr = match sr {
        Semiring::Boolean => Semiring::MaxTimes,
        s => s,
    };
    let spectral: Vec<usize> = infos
        .iter()
        .filter(|c| c.is_spectral(sr) && tol.eq(c.rho(sr), rho))
        .map(|c| c.class_id)
        .collect();
    if spectral.is_empty() || !(rho > 0.0) {
        return Err(Error::NotInSpectrum { rho });
    }
    let rho = infos[spectral[0]].rho(sr);
    let m_rho: Vec<usize> = (0..a.dim())
        .filter(|&i| spectral.iter().any(|&nu| fnf.node_accesses(i, nu)))
        .collect();
    let a_rho = a.with_semiring(sr).restricted(&m_rho).scaled(1.0 / rho);
    Ok(RhoReduction {
        rho,
        semiring: sr,
        m_rho,
        spectral_classes: spectral,
        a_rho,
    })
}
