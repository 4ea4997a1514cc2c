//! Digraph of a matrix: strongly connected components, Frobenius normal
//! form with its reduced graph, cyclicity and cyclic classes, graph powers.

use std::collections::{BTreeSet, VecDeque};

use petgraph::algo::tarjan_scc;
use petgraph::graph::DiGraph;
use serde::{Deserialize, Serialize};

use crate::algebra::{Matrix, Semiring, Tolerance};
use crate::error::{Error, Result};

/// Directed graph on nodes `0..n`, optionally weighted.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Digraph {
    n: usize,
    adj: Vec<bool>,
    weights: Option<Vec<f64>>,
}

impl Digraph {
    pub fn from_edges(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Self {
        let mut adj = vec![false; n * n];
        for (i, j) in edges {
            adj[i * n + j] = true;
        }
        Digraph {
            n,
            adj,
            weights: None,
        }
    }

    #[inline]
    pub fn node_count(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn has_edge(&self, i: usize, j: usize) -> bool {
        self.adj[i * self.n + j]
    }

    pub fn weight(&self, i: usize, j: usize) -> Option<f64> {
        if !self.has_edge(i, j) {
            return None;
        }
        Some(self.weights.as_ref().map_or(1.0, |w| w[i * self.n + j]))
    }

    pub fn edges(&self) -> Vec<(usize, usize)> {
        (0..self.n)
            .flat_map(|i| (0..self.n).map(move |j| (i, j)))
            .filter(|&(i, j)| self.has_edge(i, j))
            .collect()
    }

    pub fn edge_set(&self) -> BTreeSet<(usize, usize)> {
        self.edges().into_iter().collect()
    }

    pub fn successors(&self, i: usize) -> impl Iterator<Item = usize> + '_ {
        (0..self.n).filter(move |&j| self.has_edge(i, j))
    }

    /// Associated 0/1 matrix over the Boolean semiring.
    pub fn adjacency_matrix(&self) -> Matrix {
        let entries = self.adj.iter().map(|&b| if b { 1.0 } else { 0.0 }).collect();
        Matrix::new(self.n, entries, Semiring::Boolean).expect("adjacency is a valid matrix")
    }

    fn from_boolean(m: &Matrix) -> Self {
        let n = m.dim();
        Digraph {
            n,
            adj: m.entries().iter().map(|x| *x > 0.0).collect(),
            weights: None,
        }
    }

    /// Strongly connected components, each sorted ascending.
    pub fn strongly_connected_components(&self) -> Vec<Vec<usize>> {
        let mut g = DiGraph::<(), ()>::with_capacity(self.n, 0);
        let idx: Vec<_> = (0..self.n).map(|_| g.add_node(())).collect();
        for (i, j) in self.edges() {
            g.add_edge(idx[i], idx[j], ());
        }
        tarjan_scc(&g)
            .into_iter()
            .map(|c| {
                let mut v: Vec<usize> = c.into_iter().map(|x| x.index()).collect();
                v.sort_unstable();
                v
            })
            .collect()
    }

    /// Whether `nodes` induce a strongly connected subgraph.
    pub fn is_strongly_connected_on(&self, nodes: &[usize]) -> bool {
        if nodes.is_empty() {
            return false;
        }
        let inside = self.membership_mask(nodes);
        let reach = |forward: bool| {
            let mut seen = vec![false; self.n];
            let mut queue = VecDeque::from([nodes[0]]);
            seen[nodes[0]] = true;
            while let Some(u) = queue.pop_front() {
                for &v in nodes {
                    let e = if forward {
                        self.has_edge(u, v)
                    } else {
                        self.has_edge(v, u)
                    };
                    if e && !seen[v] {
                        seen[v] = true;
                        queue.push_back(v);
                    }
                }
            }
            nodes.iter().all(|&v| seen[v] && inside[v])
        };
        reach(true) && reach(false)
    }

    fn membership_mask(&self, nodes: &[usize]) -> Vec<bool> {
        let mut mask = vec![false; self.n];
        for &v in nodes {
            mask[v] = true;
        }
        mask
    }
}

/// Edge `(i, j)` iff `a_ij > abs_eps`, weighted by `a_ij`.
pub fn digraph_of(a: &Matrix, tol: &Tolerance) -> Digraph {
    let n = a.dim();
    let adj: Vec<bool> = a.entries().iter().map(|x| *x > tol.abs_eps).collect();
    let weights = a
        .entries()
        .iter()
        .zip(&adj)
        .map(|(x, e)| if *e { *x } else { 0.0 })
        .collect();
    Digraph {
        n,
        adj,
        weights: Some(weights),
    }
}

/// Edges of `g^k`: pairs joined by a walk of length exactly `k`.
pub fn graph_power(g: &Digraph, k: usize) -> Result<Digraph> {
    let p = g.adjacency_matrix().power(k)?;
    Ok(Digraph::from_boolean(&p))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ClassKind {
    /// A single node without a loop.
    Trivial,
    Nontrivial,
}

/// Frobenius normal form: classes ordered so that edges only run from a
/// class to one with a smaller or equal index (final classes first).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrobeniusForm {
    pub perm: Vec<usize>,
    pub classes: Vec<Vec<usize>>,
    pub class_of: Vec<usize>,
    /// Edges of the reduced graph between distinct classes.
    pub reduced_edges: BTreeSet<(usize, usize)>,
    /// Reflexive-transitive closure of `reduced_edges`, row-major `r × r`.
    access: Vec<bool>,
    pub class_kind: Vec<ClassKind>,
}

impl FrobeniusForm {
    pub fn class_count(&self) -> usize {
        self.classes.len()
    }

    /// `μ → ν` in the reduced graph (reflexive).
    #[inline]
    pub fn accesses(&self, mu: usize, nu: usize) -> bool {
        self.access[mu * self.classes.len() + nu]
    }

    /// Node `i` accesses class `nu`.
    pub fn node_accesses(&self, i: usize, nu: usize) -> bool {
        self.accesses(self.class_of[i], nu)
    }

    /// All nodes accessing class `nu`, ascending.
    pub fn nodes_accessing(&self, nu: usize) -> Vec<usize> {
        (0..self.class_of.len())
            .filter(|&i| self.node_accesses(i, nu))
            .collect()
    }

    pub fn is_trivial(&self, mu: usize) -> bool {
        self.class_kind[mu] == ClassKind::Trivial
    }
}

pub fn frobenius_form(a: &Matrix, tol: &Tolerance) -> FrobeniusForm {
    frobenius_form_of_graph(&digraph_of(a, tol))
}

pub fn frobenius_form_of_graph(g: &Digraph) -> FrobeniusForm {
    let n = g.node_count();
    let sccs = g.strongly_connected_components();
    let mut scc_of = vec![0usize; n];
    for (c, nodes) in sccs.iter().enumerate() {
        for &v in nodes {
            scc_of[v] = c;
        }
    }
    let r = sccs.len();
    let mut succ: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); r];
    for (i, j) in g.edges() {
        if scc_of[i] != scc_of[j] {
            succ[scc_of[i]].insert(scc_of[j]);
        }
    }

    // Canonical order: repeatedly place the class with the smallest node
    // among those whose successors are all placed.
    let mut order = Vec::with_capacity(r);
    let mut placed = vec![false; r];
    while order.len() < r {
        let next = (0..r)
            .filter(|&c| !placed[c] && succ[c].iter().all(|&d| placed[d]))
            .min_by_key(|&c| sccs[c][0])
            .expect("condensation is acyclic");
        placed[next] = true;
        order.push(next);
    }
    let mut rank = vec![0usize; r];
    for (pos, &c) in order.iter().enumerate() {
        rank[c] = pos;
    }

    let classes: Vec<Vec<usize>> = order.iter().map(|&c| sccs[c].clone()).collect();
    let class_of: Vec<usize> = (0..n).map(|v| rank[scc_of[v]]).collect();
    let reduced_edges: BTreeSet<(usize, usize)> = g
        .edges()
        .into_iter()
        .filter(|&(i, j)| class_of[i] != class_of[j])
        .map(|(i, j)| (class_of[i], class_of[j]))
        .collect();

    // closure in increasing class order: successors have smaller indices
    let mut access = vec![false; r * r];
    for mu in 0..r {
        access[mu * r + mu] = true;
        for &(a, b) in reduced_edges.range((mu, 0)..(mu + 1, 0)) {
            debug_assert_eq!(a, mu);
            debug_assert!(b < mu);
            for nu in 0..r {
                if access[b * r + nu] {
                    access[mu * r + nu] = true;
                }
            }
        }
    }

    let class_kind = classes
        .iter()
        .map(|c| {
            if c.len() == 1 && !g.has_edge(c[0], c[0]) {
                ClassKind::Trivial
            } else {
                ClassKind::Nontrivial
            }
        })
        .collect();

    FrobeniusForm {
        perm: classes.iter().flatten().copied().collect(),
        classes,
        class_of,
        reduced_edges,
        access,
        class_kind,
    }
}

/// Cyclicity `σ` and cyclic classes `C_0..C_{σ−1}` of a strongly connected
/// node set. Every edge runs from `C_t` to `C_{(t−1) mod σ}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CyclicStructure {
    pub sigma: usize,
    pub cyclic_classes: Vec<Vec<usize>>,
}

impl CyclicStructure {
    pub fn class_of(&self, node: usize) -> Option<usize> {
        self.cyclic_classes.iter().position(|c| c.contains(&node))
    }
}

pub fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

pub fn lcm(a: usize, b: usize) -> usize {
    if a == 0 || b == 0 {
        0
    } else {
        a / gcd(a, b) * b
    }
}

pub fn cyclicity_of_component(g: &Digraph, nodes: &[usize]) -> Result<CyclicStructure> {
    let mut nodes = nodes.to_vec();
    nodes.sort_unstable();
    nodes.dedup();
    if nodes.len() == 1 && !g.has_edge(nodes[0], nodes[0]) {
        return Ok(CyclicStructure {
            sigma: 1,
            cyclic_classes: vec![nodes],
        });
    }
    if !g.is_strongly_connected_on(&nodes) {
        return Err(Error::NotStronglyConnected);
    }
    let n = g.node_count();
    let mut inside = vec![false; n];
    for &v in &nodes {
        inside[v] = true;
    }
    let mut level: Vec<Option<i64>> = vec![None; n];
    level[nodes[0]] = Some(0);
    let mut queue = VecDeque::from([nodes[0]]);
    while let Some(u) = queue.pop_front() {
        let lu = level[u].expect("queued nodes are labelled");
        for v in g.successors(u).filter(|&v| inside[v]) {
            if level[v].is_none() {
                level[v] = Some(lu + 1);
                queue.push_back(v);
            }
        }
    }
    let mut sigma = 0usize;
    for &u in &nodes {
        for v in g.successors(u).filter(|&v| inside[v]) {
            let d = level[u].unwrap() + 1 - level[v].unwrap();
            sigma = gcd(sigma, d.unsigned_abs() as usize);
        }
    }
    let sigma = sigma.max(1);
    let mut cyclic_classes = vec![Vec::new(); sigma];
    for &v in &nodes {
        let l = level[v].unwrap().rem_euclid(sigma as i64) as usize;
        cyclic_classes[(sigma - l) % sigma].push(v);
    }
    Ok(CyclicStructure {
        sigma,
        cyclic_classes,
    })
}
