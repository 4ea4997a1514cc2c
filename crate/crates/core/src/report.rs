//! Serializable analysis report. Numbers are rounded to 12 significant digits
//! so that a report read back from JSON compares equal to the original.

use serde::{Deserialize, Serialize};

use crate::algebra::{Matrix, Semiring, Tolerance};
use crate::cores::{core_from_spectrum, CoreDescription};
use crate::eigencones::{analyze_spectrum, Eigencone, SpectralData};
use crate::error::{Error, Result};
use crate::oracle::CHECK_TOL;
use crate::spectral::{critical_graph, CriticalGraph};

/// Relative distance within which `--rho` snaps to a spectrum value.
pub const RHO_MATCH: f64 = 1e-3;

pub fn round_sig(x: f64) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return x;
    }
    format!("{x:.11e}").parse().expect("formatted float parses")
}

fn round_all(v: &[f64]) -> Vec<f64> {
    v.iter().copied().map(round_sig).collect()
}

pub fn algebra_name(sr: Semiring) -> &'static str {
    match sr {
        Semiring::PlusTimes => "nonneg",
        _ => "max",
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassEntry {
    pub id: usize,
    pub nodes: Vec<usize>,
    pub trivial: bool,
    pub rho: f64,
    pub spectral: bool,
    /// Other classes reachable from this one.
    pub accesses: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CriticalComponentEntry {
    pub nodes: Vec<usize>,
    pub cyclicity: usize,
    pub cyclic_classes: Vec<Vec<usize>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CriticalGraphEntry {
    pub lambda: f64,
    pub nodes: Vec<usize>,
    pub edges: Vec<(usize, usize)>,
    pub components: Vec<CriticalComponentEntry>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RhoPeriod {
    pub rho: f64,
    pub sigma: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PeriodsEntry {
    pub per_rho: Vec<RhoPeriod>,
    pub sigma_lambda: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeneratorEntry {
    pub vector: Vec<f64>,
    pub ancestor: usize,
    pub cyclic_index: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EigenconeEntry {
    pub rho: f64,
    pub power: usize,
    pub generators: Vec<GeneratorEntry>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExtremalEntry {
    pub vector: Vec<f64>,
    pub rho: f64,
    pub ancestor: usize,
    pub cyclic_index: usize,
    /// Index of the extremal proportional to `A x`.
    pub successor: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OrbitEntry {
    pub rho: f64,
    pub ancestor: usize,
    pub sigma: usize,
    pub members: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoreEntry {
    pub sigma_lambda: usize,
    pub census: usize,
    pub extremals: Vec<ExtremalEntry>,
    pub orbits: Vec<OrbitEntry>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckEntry {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub algebra: String,
    pub n: usize,
    pub spectrum: Vec<f64>,
    pub classes: Vec<ClassEntry>,
    /// Max-times only.
    pub critical_graph: Option<CriticalGraphEntry>,
    pub periods: PeriodsEntry,
    pub eigencones: Vec<EigenconeEntry>,
    pub core: CoreEntry,
    pub checks: Vec<CheckEntry>,
}

impl Report {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct ReportOptions {
    /// Eigencones of `A^k`; by default `k = 1` and `k = σ_Λ`.
    pub power: Option<usize>,
    /// Restrict eigencones to the spectrum value nearest to this one.
    pub rho: Option<f64>,
}

/// The spectrum value within `RHO_MATCH` (relative) of `rho`, nearest first.
pub fn match_rho(spectrum: &[f64], rho: f64) -> Result<f64> {
    spectrum
        .iter()
        .copied()
        .filter(|s| (s - rho).abs() <= RHO_MATCH * s.abs().max(rho.abs()))
        .min_by(|x, y| (x - rho).abs().total_cmp(&(y - rho).abs()))
        .ok_or(Error::NotInSpectrum { rho })
}

fn critical_entry(cg: &CriticalGraph) -> CriticalGraphEntry {
    CriticalGraphEntry {
        lambda: round_sig(cg.lambda),
        nodes: cg.nodes.clone(),
        edges: cg.edges.clone(),
        components: cg
            .components
            .iter()
            .map(|c| CriticalComponentEntry {
                nodes: c.nodes.clone(),
                cyclicity: c.cyclic.sigma,
                cyclic_classes: c.cyclic.cyclic_classes.clone(),
            })
            .collect(),
    }
}

fn eigencone_entry(cone: &Eigencone) -> EigenconeEntry {
    EigenconeEntry {
        rho: round_sig(cone.rho),
        power: cone.power,
        generators: cone
            .generators
            .iter()
            .map(|g| GeneratorEntry {
                vector: round_all(&g.vector),
                ancestor: g.ancestor,
                cyclic_index: g.cyclic_index,
            })
            .collect(),
    }
}

fn core_entry(core: &CoreDescription) -> CoreEntry {
    CoreEntry {
        sigma_lambda: core.sigma_lambda,
        census: core.census,
        extremals: core
            .extremals
            .iter()
            .zip(&core.successor)
            .map(|(x, &successor)| ExtremalEntry {
                vector: round_all(&x.vector),
                rho: round_sig(x.rho),
                ancestor: x.ancestor,
                cyclic_index: x.cyclic_index,
                successor,
            })
            .collect(),
        orbits: core
            .orbits
            .iter()
            .map(|o| OrbitEntry {
                rho: round_sig(o.rho),
                ancestor: o.ancestor,
                sigma: o.sigma,
                members: o.members.clone(),
            })
            .collect(),
    }
}

fn check(name: &str, outcome: std::result::Result<String, String>) -> CheckEntry {
    let (passed, detail) = match outcome {
        Ok(d) => (true, d),
        Err(d) => (false, d),
    };
    CheckEntry {
        name: name.to_string(),
        passed,
        detail,
    }
}

/// `A^k x = ρ^k x` for every reported generator.
fn eigen_equation(a: &Matrix, cones: &[Eigencone]) -> std::result::Result<String, String> {
    let mut count = 0;
    for cone in cones {
        let p = a.power(cone.power).map_err(|e| e.to_string())?;
        let scale = cone.rho.powi(cone.power as i32);
        for g in &cone.generators {
            let lhs = p.apply(&g.vector).map_err(|e| e.to_string())?;
            if !lhs.approx_eq(&g.vector.scaled(scale), &CHECK_TOL) {
                return Err(format!("generator {:?} of ρ = {} at power {}", g.vector.as_slice(), cone.rho, cone.power));
            }
            count += 1;
        }
    }
    Ok(format!("{count} generators"))
}

/// `A x_i ∝ x_{successor(i)}` and every orbit has the length of its ancestor's cyclicity.
fn core_action(a: &Matrix, core: &CoreDescription) -> std::result::Result<String, String> {
    for (i, x) in core.extremals.iter().enumerate() {
        let image = a.apply(&x.vector).map_err(|e| e.to_string())?;
        let target = &core.extremals[core.successor[i]].vector;
        if !image.proportional(target, &CHECK_TOL) {
            return Err(format!("A x_{i} is not proportional to x_{}", core.successor[i]));
        }
    }
    if let Some(o) = core.orbits.iter().find(|o| o.members.len() != o.sigma) {
        return Err(format!("orbit {:?} has length {}, cyclicity {}", o.members, o.members.len(), o.sigma));
    }
    Ok(format!("{} extremals in {} orbits", core.extremals.len(), core.orbits.len()))
}

pub fn report_from_spectrum(data: &SpectralData, opts: &ReportOptions) -> Result<Report> {
    let a = &data.matrix;
    let sr = data.semiring;
    let tol = &data.tol;
    let spectrum = data.spectrum();
    let rhos = match opts.rho {
        Some(r) => vec![match_rho(&spectrum, r)?],
        None => spectrum.clone(),
    };
    let mut powers = match opts.power {
        Some(k) => vec![k],
        None => vec![1, data.sigma_lambda()],
    };
    powers.dedup();
    let mut cones = Vec::new();
    for &rho in &rhos {
        for &k in &powers {
            cones.push(data.eigencone(rho, k)?);
        }
    }
    let core = core_from_spectrum(data)?;

    let critical = match sr {
        Semiring::PlusTimes => None,
        _ => match critical_graph(a, tol) {
            Ok(cg) => Some(critical_entry(&cg)),
            Err(Error::NoCriticalGraph) => None,
            Err(e) => return Err(e),
        },
    };
    let classes = data
        .classes
        .iter()
        .map(|c| ClassEntry {
            id: c.class_id,
            nodes: c.nodes.clone(),
            trivial: data.fnf.is_trivial(c.class_id),
            rho: round_sig(c.rho(sr)),
            spectral: c.is_spectral(sr),
            accesses: (0..data.fnf.class_count())
                .filter(|&nu| nu != c.class_id && data.fnf.accesses(c.class_id, nu))
                .collect(),
        })
        .collect();
    let periods = data.periods();
    Ok(Report {
        algebra: algebra_name(sr).to_string(),
        n: a.dim(),
        spectrum: round_all(&spectrum),
        classes,
        critical_graph: critical,
        periods: PeriodsEntry {
            per_rho: periods
                .per_rho
                .iter()
                .map(|&(rho, sigma)| RhoPeriod { rho: round_sig(rho), sigma })
                .collect(),
            sigma_lambda: periods.sigma_lambda,
        },
        eigencones: cones.iter().map(eigencone_entry).collect(),
        core: core_entry(&core),
        checks: vec![
            check("eigen_equation", eigen_equation(a, &cones)),
            check("core_action", core_action(a, &core)),
        ],
    })
}

pub fn build_report(a: &Matrix, sr: Semiring, opts: &ReportOptions, tol: &Tolerance) -> Result<Report> {
    if opts.power == Some(0) {
        return Err(Error::ZeroPower);
    }
    let data = analyze_spectrum(&a.with_semiring(sr), sr, tol)?;
    report_from_spectrum(&data, opts)
}
