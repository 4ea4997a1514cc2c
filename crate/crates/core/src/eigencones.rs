//! Eigencones of matrix powers and their generators.
//!
//! For each eigenvalue `ρ` the generators of `V(A^k, ρ^k)` come from
//! "ancestors": spectral classes of `A` in classical algebra, components of
//! the critical graph of `A_ρ` in max algebra. An ancestor with cyclicity
//! `σ` splits into `gcd(k, σ)` pieces in the `k`-th power, one extremal
//! generator per piece.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::algebra::{Matrix, Semiring, Tolerance, Vector};
use crate::error::{Error, Result};
use crate::graphs::{cyclicity_of_component, digraph_of, gcd, lcm, CyclicStructure, FrobeniusForm};
use crate::spectral::{
    critical_graph, kleene_star, perron_pair, rho_reduction_with, spectral_classes, spectrum_of, RhoReduction,
    SpectralClassInfo,
};

/// Strongly connected node set whose cyclic classes give rise to
/// eigencone generators of powers.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Ancestor {
    /// Frobenius class id of `A` (classical) or critical component index of `A_ρ` (max).
    pub id: usize,
    pub nodes: Vec<usize>,
    pub cyclic: CyclicStructure,
}

impl Ancestor {
    /// Pieces of the ancestor in the `k`-th power: unions of cyclic classes
    /// congruent modulo `gcd(k, σ)`.
    pub fn pieces(&self, k: usize) -> Vec<Vec<usize>> {
        let g = gcd(k, self.cyclic.sigma);
        (0..g)
            .map(|r| {
                let mut piece: Vec<usize> = self
                    .cyclic
                    .cyclic_classes
                    .iter()
                    .enumerate()
                    .filter(|(t, _)| t % g == r)
                    .flat_map(|(_, c)| c.iter().copied())
                    .collect();
                piece.sort_unstable();
                piece
            })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RhoLevel {
    pub reduction: RhoReduction,
    pub ancestors: Vec<Ancestor>,
    /// lcm of the ancestor cyclicities.
    pub sigma: usize,
}

/// An extremal generator with the ancestor and cyclic class it came from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Generator {
    pub vector: Vector,
    pub ancestor: usize,
    pub cyclic_index: usize,
}

/// Generators of `V(A^k, ρ^k)`, normalized to max entry one.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Eigencone {
    pub semiring: Semiring,
    pub rho: f64,
    pub power: usize,
    pub generators: Vec<Generator>,
}

impl Eigencone {
    pub fn vectors(&self) -> Vec<Vector> {
        self.generators.iter().map(|g| g.vector.clone()).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PeriodReport {
    /// `(ρ, σ_ρ)` in descending order of `ρ`.
    pub per_rho: Vec<(f64, usize)>,
    pub sigma_lambda: usize,
}

/// Everything the eigencone and core computations need about one matrix in
/// one algebra.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectralData {
    pub semiring: Semiring,
    pub matrix: Matrix,
    pub fnf: FrobeniusForm,
    pub classes: Vec<SpectralClassInfo>,
    pub levels: Vec<RhoLevel>,
    pub tol: Tolerance,
}

fn effective(sr: Semiring) -> Semiring {
    match sr {
        Semiring::Boolean => Semiring::MaxTimes,
        s => s,
    }
}

pub fn analyze_spectrum(a: &Matrix, sr: Semiring, tol: &Tolerance) -> Result<SpectralData> {
    let sr = effective(sr);
    let a = a.with_semiring(sr);
    let (fnf, classes) = spectral_classes(&a, tol);
    let graph = digraph_of(&a, tol);
    let mut levels = Vec::new();
    for rho in spectrum_of(&classes, sr, tol) {
        let reduction = rho_reduction_with(&a, &fnf, &classes, rho, sr, tol)?;
        let ancestors = match sr {
            Semiring::PlusTimes => reduction
                .spectral_classes
                .iter()
                .map(|&id| {
                    let nodes = fnf.classes[id].clone();
                    let cyclic = cyclicity_of_component(&graph, &nodes)?;
                    Ok(Ancestor { id, nodes, cyclic })
                })
                .collect::<Result<Vec<_>>>()?,
            _ => critical_graph(&reduction.a_rho, tol)?
                .components
                .into_iter()
                .enumerate()
                .map(|(id, c)| Ancestor {
                    id,
                    nodes: c.nodes,
                    cyclic: c.cyclic,
                })
                .collect(),
        };
        let sigma = ancestors.iter().fold(1, |acc, c| lcm(acc, c.cyclic.sigma));
        levels.push(RhoLevel {
            reduction,
            ancestors,
            sigma,
        });
    }
    Ok(SpectralData {
        semiring: sr,
        matrix: a,
        fnf,
        classes,
        levels,
        tol: *tol,
    })
}

impl SpectralData {
    pub fn spectrum(&self) -> Vec<f64> {
        self.levels.iter().map(|l| l.reduction.rho).collect()
    }

    pub fn sigma_lambda(&self) -> usize {
        self.levels.iter().fold(1, |acc, l| lcm(acc, l.sigma))
    }

    pub fn periods(&self) -> PeriodReport {
        PeriodReport {
            per_rho: self.levels.iter().map(|l| (l.reduction.rho, l.sigma)).collect(),
            sigma_lambda: self.sigma_lambda(),
        }
    }

    pub fn level(&self, rho: f64) -> Result<&RhoLevel> {
        self.levels
            .iter()
            .find(|l| self.tol.eq(l.reduction.rho, rho))
            .ok_or(Error::NotInSpectrum { rho })
    }

    /// Generators of `V(A^k, ρ^k)`.
    pub fn eigencone(&self, rho: f64, k: usize) -> Result<Eigencone> {
        if k == 0 {
            return Err(Error::ZeroPower);
        }
        let level = self.level(rho)?;
        let b = level.reduction.a_rho.power(k)?;
        let generators = match self.semiring {
            Semiring::PlusTimes => plus_generators(&b, &level.ancestors, k, &self.tol)?,
            _ => max_generators(&b, &level.ancestors, k, &self.tol)?,
        };
        Ok(Eigencone {
            semiring: self.semiring,
            rho: level.reduction.rho,
            power: k,
            generators,
        })
    }

    /// `V^Σ(A^k)`: the eigencones of `A^k` for every eigenvalue of `A`.
    pub fn sum_eigencone(&self, k: usize) -> Result<Vec<Eigencone>> {
        self.levels
            .iter()
            .map(|l| self.eigencone(l.reduction.rho, k))
            .collect()
    }
}

/// Normalized columns of `B*` at the smallest node of each piece.
fn max_generators(b: &Matrix, ancestors: &[Ancestor], k: usize, tol: &Tolerance) -> Result<Vec<Generator>> {
    let star = kleene_star(b, tol)?;
    let mut out = Vec::new();
    for anc in ancestors {
        for (r, piece) in anc.pieces(k).into_iter().enumerate() {
            let vector = star.column(piece[0]).normalized().ok_or(Error::NoCriticalGraph)?;
            out.push(Generator {
                vector,
                ancestor: anc.id,
                cyclic_index: r,
            });
        }
    }
    Ok(out)
}

/// Perron vector on each piece, extended to every node accessing it by
/// solving `(I − B_SS) x_S = B_SP x_P`.
fn plus_generators(b: &Matrix, ancestors: &[Ancestor], k: usize, tol: &Tolerance) -> Result<Vec<Generator>> {
    let n = b.dim();
    let graph = digraph_of(b, tol);
    let mut out = Vec::new();
    for anc in ancestors {
        for (r, piece) in anc.pieces(k).into_iter().enumerate() {
            let (_, perron) = perron_pair(&b.submatrix(&piece));
            let mut x = vec![0.0; n];
            for (p, &i) in piece.iter().enumerate() {
                x[i] = perron[p];
            }
            let mut in_piece = vec![false; n];
            for &i in &piece {
                in_piece[i] = true;
            }
            let upstream: Vec<usize> = reaching(&graph, &piece)
                .into_iter()
                .filter(|&i| !in_piece[i])
                .collect();
            if !upstream.is_empty() {
                let s = upstream.len();
                let lhs = DMatrix::from_fn(s, s, |p, q| {
                    let id = if p == q { 1.0 } else { 0.0 };
                    id - b.get(upstream[p], upstream[q])
                });
                let rhs = DVector::from_fn(s, |p, _| piece.iter().map(|&j| b.get(upstream[p], j) * x[j]).sum());
                let sol = lhs.lu().solve(&rhs).ok_or(Error::SpectralBlowUp)?;
                for (p, &i) in upstream.iter().enumerate() {
                    x[i] = sol[p].max(0.0);
                }
            }
            let vector = Vector::new(x)?.normalized().ok_or(Error::SpectralBlowUp)?;
            out.push(Generator {
                vector,
                ancestor: anc.id,
                cyclic_index: r,
            });
        }
    }
    Ok(out)
}

/// Nodes with a path (possibly empty) into `targets`, ascending.
fn reaching(g: &crate::graphs::Digraph, targets: &[usize]) -> Vec<usize> {
    let n = g.node_count();
    let mut seen = vec![false; n];
    let mut stack: Vec<usize> = targets.to_vec();
    for &t in targets {
        seen[t] = true;
    }
    while let Some(v) = stack.pop() {
        for u in 0..n {
            if !seen[u] && g.has_edge(u, v) {
                seen[u] = true;
                stack.push(u);
            }
        }
    }
    (0..n).filter(|&i| seen[i]).collect()
}

/// Classical eigencone `V(A, 1)` of a matrix whose spectral classes at one
/// are to be extended; one generator per spectral class with Perron root one.
pub fn fv_generators_plus(a: &Matrix, tol: &Tolerance) -> Result<Eigencone> {
    let a = a.with_semiring(Semiring::PlusTimes);
    let (fnf, classes) = spectral_classes(&a, tol);
    let graph = digraph_of(&a, tol);
    let ancestors = classes
        .iter()
        .filter(|c| c.is_spectral_plus && tol.eq(c.rho_plus, 1.0))
        .map(|c| {
            let nodes = fnf.classes[c.class_id].clone();
            let cyclic = cyclicity_of_component(&graph, &nodes)?;
            Ok(Ancestor {
                id: c.class_id,
                nodes,
                cyclic,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Eigencone {
        semiring: Semiring::PlusTimes,
        rho: 1.0,
        power: 1,
        generators: plus_generators(&a, &ancestors, 1, tol)?,
    })
}

/// Max eigencone `V(A, 1)` of a matrix with `λ(A) = 1`: one column of `A*`
/// per critical component.
pub fn fv_generators_max(a: &Matrix, tol: &Tolerance) -> Result<Eigencone> {
    let a = a.with_semiring(Semiring::MaxTimes);
    let ancestors: Vec<Ancestor> = critical_graph(&a, tol)?
        .components
        .into_iter()
        .enumerate()
        .map(|(id, c)| Ancestor {
            id,
            nodes: c.nodes,
            cyclic: c.cyclic,
        })
        .collect();
    Ok(Eigencone {
        semiring: Semiring::MaxTimes,
        rho: 1.0,
        power: 1,
        generators: max_generators(&a, &ancestors, 1, tol)?,
    })
}

/// Generators of `V(A^k, ρ^k)`.
pub fn eigencone_of_power(a: &Matrix, rho: f64, k: usize, sr: Semiring, tol: &Tolerance) -> Result<Eigencone> {
    analyze_spectrum(a, sr, tol)?.eigencone(rho, k)
}

pub fn periods(a: &Matrix, sr: Semiring, tol: &Tolerance) -> Result<PeriodReport> {
    Ok(analyze_spectrum(a, sr, tol)?.periods())
}

pub fn sum_eigencone(a: &Matrix, k: usize, sr: Semiring, tol: &Tolerance) -> Result<Vec<Eigencone>> {
    analyze_spectrum(a, sr, tol)?.sum_eigencone(k)
}
