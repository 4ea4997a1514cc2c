//! Brute-force validators for the fast paths, period detection, and seeded
//! random instances.

use std::collections::BTreeSet;
use std::panic::{catch_unwind, AssertUnwindSafe};

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::algebra::{cone_contains, extremal_filter, membership, nnls, same_cone, Matrix, Semiring, Tolerance, Vector};
use crate::cores::{core_from_spectrum, CoreDescription};
use crate::eigencones::{analyze_spectrum, SpectralData};
use crate::error::{Error, Result};
use crate::graphs::{cyclicity_of_component, digraph_of, gcd, graph_power, lcm, Digraph};
use crate::spectral::{critical_graph, kleene_star, max_cycle_mean_with, spectral_classes, spectrum, visualize_strict};

/// Least period `p`, then least threshold `T` (1-based), with
/// `seq[k + p] = seq[k]` for every `k ≥ T` inside the window. At least two
/// full periods must follow the threshold.
pub fn detect_period<T>(seq: &[T], eq: impl Fn(&T, &T) -> bool) -> Result<(usize, usize)> {
    let len = seq.len();
    for p in 1..=len / 2 {
        if let Some(t) = threshold_for_period(seq, p, &eq) {
            if len - (t - 1) >= 2 * p {
                return Ok((t, p));
            }
        }
    }
    Err(Error::PeriodUndetermined)
}

/// Least 1-based `T` with `seq[k + p] = seq[k]` for all `k ≥ T` in the window.
pub fn threshold_for_period<T>(seq: &[T], p: usize, eq: impl Fn(&T, &T) -> bool) -> Option<usize> {
    if p == 0 || seq.len() <= p {
        return None;
    }
    let mut t = seq.len() - p;
    while t > 0 && eq(&seq[t - 1], &seq[t - 1 + p]) {
        t -= 1;
    }
    Some(t + 1)
}

/// Tolerance used by every oracle check, independent of the tolerance the
/// fast path runs with.
pub const CHECK_TOL: Tolerance = Tolerance {
    rel_eps: 1e-6,
    abs_eps: 1e-9,
};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BruteCore {
    pub rays: Vec<Vector>,
    pub converged: bool,
    /// Largest power examined.
    pub horizon: usize,
}

/// Core by brute force.
///
/// Max-times: square `(A/λ)^t` from `t = W = lcm(1..=n)` until every column
/// of `A^t` repeats in direction at `t + W` (or `t` would pass `horizon`);
/// the spans decrease, so the extremals of the last span give the
/// intersection.
///
/// Plus-times: enumerate supports `S` closed under predecessors in the
/// graph of `M = A^L` (`L` the lcm of all class cyclicities) and keep the
/// strictly positive one-dimensional kernels of `M_SS − ρ(M_SS) I`. The
/// candidates are then checked against the spans: each must lie in
/// `span(A^t)` for small `t` and for `t = horizon`, and seeded probes outside
/// the candidate cone must fall outside `span(A^horizon)`.
pub fn brute_core(a: &Matrix, sr: Semiring, horizon: usize, tol: &Tolerance) -> Result<BruteCore> {
    match sr {
        Semiring::PlusTimes => brute_core_plus(a, horizon, tol, 0x5eed),
        _ => brute_core_max(&a.with_semiring(Semiring::MaxTimes), horizon, tol),
    }
}

fn normalized_columns(m: &Matrix) -> Vec<Vector> {
    m.columns().into_iter().filter_map(|c| c.normalized()).collect()
}

fn brute_core_max(a: &Matrix, horizon: usize, tol: &Tolerance) -> Result<BruteCore> {
    let n = a.dim();
    let window = (1..=n).fold(1, lcm);
    // Decaying transients must fall well below the filter tolerance before stopping.
    let settle = Tolerance {
        rel_eps: 1e-12,
        abs_eps: 1e-15,
    };
    let same = |x: &LogColumns, y: &LogColumns| {
        x.dirs.iter().zip(&y.dirs).all(|(p, q)| p.approx_eq(q, &settle))
    };
    let step = LogColumns::power(a, window).expect("window is positive");
    let mut t = window;
    let mut p = step.clone();
    let mut converged = false;
    loop {
        if same(&p, &p.compose(&step, Semiring::MaxTimes)) {
            converged = true;
            break;
        }
        if 2 * t > horizon.max(window) {
            break;
        }
        p = p.compose(&p, Semiring::MaxTimes);
        t *= 2;
    }
    Ok(BruteCore {
        rays: extremal_filter(&p.live(), Semiring::MaxTimes, tol),
        converged,
        horizon: t,
    })
}

/// Nodes with a path into `targets` in `g` (targets included).
fn upstream(g: &Digraph, targets: &[usize]) -> Vec<bool> {
    let n = g.node_count();
    let mut seen = vec![false; n];
    let mut stack = targets.to_vec();
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
    seen
}

fn lcm_of_class_cyclicities(a: &Matrix, tol: &Tolerance) -> Result<usize> {
    let g = digraph_of(a, tol);
    let mut l = 1;
    for comp in g.strongly_connected_components() {
        if comp.len() > 1 || g.has_edge(comp[0], comp[0]) {
            l = lcm(l, cyclicity_of_component(&g, &comp)?.sigma);
        }
    }
    Ok(l)
}

/// Spectral radius as the limit of `‖B^N‖^(1/N)`, with `N = 2^48` reached by squaring.
fn gelfand_radius(block: &DMatrix<f64>) -> f64 {
    let mut p = block.clone();
    let mut log_scale = 0.0f64;
    let mut exponent = 1.0f64;
    for _ in 0..48 {
        let norm = p.amax();
        if norm == 0.0 {
            return 0.0;
        }
        p /= norm;
        log_scale += norm.ln() / exponent;
        p = &p * &p;
        exponent *= 2.0;
    }
    let norm = p.amax();
    if norm == 0.0 {
        return 0.0;
    }
    (log_scale + norm.ln() / exponent).exp()
}

/// Nonnegative extremal eigenvectors of `M` found by support enumeration.
fn eigen_candidates(m: &Matrix, tol: &Tolerance) -> Vec<Vector> {
    let n = m.dim();
    let g = digraph_of(m, &Tolerance { abs_eps: 0.0, ..*tol });
    let mut out: Vec<Vector> = Vec::new();
    for mask in 1u32..(1u32 << n) {
        let s: Vec<usize> = (0..n).filter(|&i| mask & (1 << i) != 0).collect();
        // support must contain every node with a path into it
        let closure = upstream(&g, &s);
        if closure.iter().enumerate().any(|(i, &c)| c && mask & (1 << i) == 0) {
            continue;
        }
        let k = s.len();
        let block = DMatrix::from_fn(k, k, |p, q| m.get(s[p], s[q]));
        let r = gelfand_radius(&block);
        let scale = block.amax();
        if r <= 1e-12 * scale.max(f64::MIN_POSITIVE) {
            continue;
        }
        let shifted = (block - DMatrix::identity(k, k) * r) / r;
        let svd = shifted.clone().svd(false, true);
        let mut sv: Vec<(f64, usize)> = svd.singular_values.iter().copied().zip(0..).collect();
        sv.sort_by(|x, y| x.0.total_cmp(&y.0));
        if sv[0].0 > 1e-7 || (k > 1 && sv[1].0 < 1e-5) {
            continue;
        }
        let Some(vt) = svd.v_t else { continue };
        let v = vt.row(sv[0].1).transpose();
        if (&shifted * &v).amax() > 1e-6 {
            continue;
        }
        let row = vt.row(sv[0].1);
        let sign = if row.iter().fold(0.0f64, |acc, v| if v.abs() > acc.abs() { *v } else { acc }) < 0.0 {
            -1.0
        } else {
            1.0
        };
        let kernel: Vec<f64> = row.iter().map(|v| v * sign).collect();
        let top = kernel.iter().copied().fold(0.0, f64::max);
        if kernel.iter().any(|v| *v <= 1e-11 * top) {
            continue;
        }
        let mut x = vec![0.0; n];
        for (p, &i) in s.iter().enumerate() {
            x[i] = kernel[p] / top;
        }
        let x = Vector::from_vec_unchecked(x);
        if !out.iter().any(|y| y.approx_eq(&x, tol)) {
            out.push(x);
        }
    }
    out
}

/// Seeded probe vectors: random supports, uniform entries.
pub fn probe_vectors(n: usize, count: usize, seed: u64) -> Vec<Vector> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let v: Vec<f64> = (0..n)
            .map(|_| if rng.random_bool(0.3) { 0.0 } else { rng.random::<f64>() })
            .collect();
        if v.iter().any(|x| *x > 0.0) {
            out.push(Vector::from_vec_unchecked(v));
        }
    }
    out
}

fn nnls_residual(gens: &[Vector], z: &Vector) -> f64 {
    let n = z.len();
    if gens.is_empty() {
        return z.iter().map(|v| v * v).sum::<f64>().sqrt();
    }
    let g = DMatrix::from_fn(n, gens.len(), |i, j| gens[j][i]);
    let zv = nalgebra::DVector::from_column_slice(z);
    let alpha = nnls(&g, &zv);
    (&g * alpha - zv).norm()
}

/// Columns of `A^t` stored as directions with log scales, so columns
/// decaying at different rates never underflow one another.
#[derive(Clone)]
struct LogColumns {
    dirs: Vec<Vector>,
    logs: Vec<f64>,
}

impl LogColumns {
    fn of(a: &Matrix) -> Self {
        let (dirs, logs) = a
            .columns()
            .into_iter()
            .map(|c| match c.normalized() {
                Some(d) => (d, c.max_entry().ln()),
                None => (c, f64::NEG_INFINITY),
            })
            .unzip();
        LogColumns { dirs, logs }
    }

    /// `A^(a+b)` from `self = A^a` and `other = A^b`.
    fn compose(&self, other: &LogColumns, sr: Semiring) -> Self {
        let n = self.dirs.len();
        let mut dirs = Vec::with_capacity(n);
        let mut logs = Vec::with_capacity(n);
        for (col, &log) in other.dirs.iter().zip(&other.logs) {
            let weights: Vec<(usize, f64)> = (0..n)
                .filter(|&k| col[k] > 0.0 && self.logs[k].is_finite())
                .map(|k| (k, log + col[k].ln() + self.logs[k]))
                .collect();
            let top = weights.iter().map(|w| w.1).fold(f64::NEG_INFINITY, f64::max);
            let mut v = vec![0.0; n];
            for &(k, w) in &weights {
                let c = (w - top).exp();
                for (vi, di) in v.iter_mut().zip(self.dirs[k].iter()) {
                    *vi = sr.add(*vi, c * di);
                }
            }
            let v = Vector::from_vec_unchecked(v);
            match v.normalized() {
                Some(d) => {
                    logs.push(top + v.max_entry().ln());
                    dirs.push(d);
                }
                None => {
                    logs.push(f64::NEG_INFINITY);
                    dirs.push(v);
                }
            }
        }
        LogColumns { dirs, logs }
    }

    fn power(a: &Matrix, k: usize) -> Option<Self> {
        let sr = a.semiring();
        let mut base = LogColumns::of(a);
        let mut acc: Option<LogColumns> = None;
        let mut k = k;
        while k > 0 {
            if k & 1 == 1 {
                acc = Some(match acc {
                    Some(m) => m.compose(&base, sr),
                    None => base.clone(),
                });
            }
            k >>= 1;
            if k > 0 {
                base = base.compose(&base, sr);
            }
        }
        acc
    }

    fn live(self) -> Vec<Vector> {
        self.dirs.into_iter().filter(|d| d.max_entry() > 0.0).collect()
    }
}

fn brute_core_plus(a: &Matrix, horizon: usize, tol: &Tolerance, seed: u64) -> Result<BruteCore> {
    let n = a.dim();
    let a = a.with_semiring(Semiring::PlusTimes);
    let row_max = (0..n)
        .map(|i| (0..n).map(|j| a.get(i, j)).sum::<f64>())
        .fold(0.0, f64::max);
    if row_max == 0.0 {
        return Ok(BruteCore {
            rays: Vec::new(),
            converged: true,
            horizon: 1,
        });
    }
    let scaled = a.scaled(1.0 / row_max);
    let l = lcm_of_class_cyclicities(&a, tol)?;
    let m = scaled.power(l)?;
    let candidates = extremal_filter(&eigen_candidates(&m, tol), Semiring::PlusTimes, tol);

    let horizon = horizon.max(1);
    let mut spans: Vec<Vec<Vector>> = Vec::new();
    let mut cols: Vec<Vector> = (0..n).map(|j| Vector::unit(n, j)).collect();
    for _ in 1..=(2 * n).min(horizon) {
        cols = cols
            .iter()
            .map(|c| Ok(a.apply(c)?.normalized().unwrap_or_else(|| Vector::zeros(n))))
            .collect::<Result<_>>()?;
        spans.push(cols.iter().filter(|c| c.max_entry() > 0.0).cloned().collect());
    }
    spans.push(LogColumns::power(&a, horizon).map(LogColumns::live).unwrap_or_default());
    let mut converged = true;
    let mut rays = Vec::new();
    for c in &candidates {
        let inside_all = spans.iter().all(|span| {
            membership(span, c, Semiring::PlusTimes, tol)
                .map(|r| r.is_inside())
                .unwrap_or(false)
        });
        if inside_all {
            rays.push(c.clone());
        } else {
            converged = false;
        }
    }
    let last_span = spans.last().expect("at least one power");
    for z in probe_vectors(n, 200, seed) {
        let z = z.normalized().expect("probes are nonzero");
        if nnls_residual(&rays, &z) > 0.05 {
            let survives = membership(last_span, &z, Semiring::PlusTimes, tol)?.is_inside();
            if survives {
                converged = false;
            }
        }
    }
    Ok(BruteCore {
        rays,
        converged,
        horizon,
    })
}

// ---------------------------------------------------------------------------
// random instances

/// Entries zero with probability `1 − density`, else log-uniform on [0.1, 10].
pub fn random_log_uniform(rng: &mut impl Rng, n: usize, density: f64, sr: Semiring) -> Matrix {
    let entries = (0..n * n)
        .map(|_| {
            if rng.random_bool(density) {
                10f64.powf(rng.random_range(-1.0..1.0))
            } else {
                0.0
            }
        })
        .collect();
    Matrix::new(n, entries, sr).expect("generated entries are valid")
}

/// Entries drawn uniformly from {0, 0.25, 0.5, 1}.
pub fn random_discrete(rng: &mut impl Rng, n: usize, sr: Semiring) -> Matrix {
    const VALUES: [f64; 4] = [0.0, 0.25, 0.5, 1.0];
    let entries = (0..n * n).map(|_| VALUES[rng.random_range(0..4)]).collect();
    Matrix::new(n, entries, sr).expect("generated entries are valid")
}

/// Block-triangular matrix whose diagonal blocks have prescribed cyclicities,
/// with nodes shuffled.
pub fn random_structured(rng: &mut impl Rng, n: usize, sr: Semiring) -> Matrix {
    let mut blocks: Vec<(usize, usize)> = Vec::new(); // (start, size)
    let mut start = 0;
    while start < n {
        let size = rng.random_range(1..=(n - start).min(4));
        blocks.push((start, size));
        start += size;
    }
    let weight = |rng: &mut dyn rand::RngCore| 10f64.powf(rng.random_range(-1.0..1.0));
    let mut e = vec![0.0; n * n];
    for &(s, size) in &blocks {
        if size == 1 {
            if rng.random_bool(0.7) {
                e[s * n + s] = weight(rng);
            }
            continue;
        }
        let divisors: Vec<usize> = (1..=size).filter(|d| size % d == 0).collect();
        let sigma = divisors[rng.random_range(0..divisors.len())];
        // long cycle through the block plus a short one of length sigma
        for p in 0..size {
            let q = (p + 1) % size;
            e[(s + p) * n + s + q] = weight(rng);
        }
        e[(s + sigma - 1) * n + s] = weight(rng);
        // extra edges consistent with the cyclic classes p mod sigma
        for p in 0..size {
            for q in 0..size {
                if (p + 1) % sigma == q % sigma && e[(s + p) * n + s + q] == 0.0 && rng.random_bool(0.3) {
                    e[(s + p) * n + s + q] = weight(rng);
                }
            }
        }
    }
    for (bi, &(si, zi)) in blocks.iter().enumerate() {
        for &(sj, zj) in &blocks[..bi] {
            for p in si..si + zi {
                for q in sj..sj + zj {
                    if rng.random_bool(0.3) {
                        e[p * n + q] = weight(rng);
                    }
                }
            }
        }
    }
    let mut perm: Vec<usize> = (0..n).collect();
    for i in (1..n).rev() {
        perm.swap(i, rng.random_range(0..=i));
    }
    let m = Matrix::new(n, e, sr).expect("generated entries are valid");
    m.permuted(&perm)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InstanceKind {
    LogUniform,
    Structured,
    Discrete,
}

/// Deterministic instance for `(seed, trial)`; kinds rotate with the trial.
pub fn random_instance(seed: u64, trial: usize, n: usize, sr: Semiring) -> (InstanceKind, Matrix) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_mul(0x9e37_79b9_7f4a_7c15).wrapping_add(trial as u64));
    match trial % 3 {
        0 => (InstanceKind::LogUniform, random_log_uniform(&mut rng, n, 0.5, sr)),
        1 => (InstanceKind::Structured, random_structured(&mut rng, n, sr)),
        _ => (InstanceKind::Discrete, random_discrete(&mut rng, n, sr)),
    }
}

// ---------------------------------------------------------------------------
// verification bundle

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    pub matrix: Vec<Vec<f64>>,
    pub vectors: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckResult {
    pub name: String,
    pub instance: String,
    pub passed: bool,
    pub detail: String,
    pub witness: Option<Witness>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleReport {
    pub checks: Vec<CheckResult>,
    pub horizon: usize,
    pub seed: u64,
}

impl OracleReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &CheckResult> {
        self.checks.iter().filter(|c| !c.passed)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct VerifyConfig {
    /// Tolerance handed to the fast path. Checks always use [`CHECK_TOL`].
    pub tol: Tolerance,
    pub seed: u64,
    pub instance: String,
    pub max_power: usize,
    pub lattice_max: usize,
    /// Cap on the brute-force horizon.
    pub horizon: usize,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        VerifyConfig {
            tol: Tolerance::default(),
            seed: 0,
            instance: "matrix".into(),
            max_power: 8,
            lattice_max: 12,
            horizon: 1 << 24,
        }
    }
}

struct Fail {
    detail: String,
    vectors: Vec<Vector>,
}

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail {
            detail: e.to_string(),
            vectors: Vec::new(),
        }
    }
}

fn fail<T>(detail: impl Into<String>, vectors: Vec<Vector>) -> std::result::Result<T, Fail> {
    Err(Fail {
        detail: detail.into(),
        vectors,
    })
}

type Check = std::result::Result<String, Fail>;
type CheckFn = fn(&Ctx) -> Check;

fn ensure(cond: bool, detail: impl FnOnce() -> String, vectors: impl FnOnce() -> Vec<Vector>) -> std::result::Result<(), Fail> {
    if cond {
        Ok(())
    } else {
        fail(detail(), vectors())
    }
}

struct Ctx<'a> {
    a: &'a Matrix,
    sr: Semiring,
    cfg: &'a VerifyConfig,
    data: &'a SpectralData,
    core: &'a CoreDescription,
}

/// Runs every check on `A` and collects the outcomes.
pub fn verify_bundle(a: &Matrix, sr: Semiring, cfg: &VerifyConfig) -> OracleReport {
    let sr = match sr {
        Semiring::Boolean => Semiring::MaxTimes,
        s => s,
    };
    let a = a.with_semiring(sr);
    let mut report = OracleReport {
        checks: Vec::new(),
        horizon: cfg.horizon,
        seed: cfg.seed,
    };
    let record = |report: &mut OracleReport, name: &str, outcome: Check| {
        let (passed, detail, witness) = match outcome {
            Ok(detail) => (true, detail, None),
            Err(f) => (
                false,
                f.detail,
                Some(Witness {
                    matrix: a.rows(),
                    vectors: f.vectors.into_iter().map(Vector::into_inner).collect(),
                }),
            ),
        };
        report.checks.push(CheckResult {
            name: name.to_string(),
            instance: cfg.instance.clone(),
            passed,
            detail,
            witness,
        });
    };

    let setup = catch_unwind(AssertUnwindSafe(|| -> Result<(SpectralData, CoreDescription)> {
        let data = analyze_spectrum(&a, sr, &cfg.tol)?;
        let core = core_from_spectrum(&data)?;
        Ok((data, core))
    }));
    let (data, core) = match setup {
        Ok(Ok(v)) => v,
        Ok(Err(e)) => {
            record(&mut report, "analysis", Err(e.into()));
            return report;
        }
        Err(_) => {
            record(&mut report, "analysis", fail("panic during analysis", Vec::new()));
            return report;
        }
    };
    let ctx = Ctx {
        a: &a,
        sr,
        cfg,
        data: &data,
        core: &core,
    };

    let mut checks: Vec<(&str, CheckFn)> = vec![
        ("core_matches_brute_force", check_core_vs_brute),
        ("spectrum_of_powers", check_spectrum_of_powers),
        ("spectral_index_sets_of_powers", check_spectral_index_sets),
        ("eigencone_periodicity", check_eigencone_periodicity),
        ("sum_cone_lattice", check_lattice),
        ("extremal_permutation", check_extremal_permutation),
        ("eigen_equation", check_eigen_equation),
        ("span_chain", check_span_chain),
        ("scaling_invariance", check_scaling),
        ("boolean_cyclicity", check_boolean_cyclicity),
    ];
    if sr == Semiring::MaxTimes {
        checks.extend([
            ("critical_graph_of_powers", check_critical_powers as fn(&Ctx) -> Check),
            ("kleene_star", check_kleene),
            ("critical_threshold", check_critical_threshold),
        ]);
    }
    for (name, f) in checks {
        let outcome = catch_unwind(AssertUnwindSafe(|| f(&ctx)))
            .unwrap_or_else(|_| fail(format!("panic in check {name}"), Vec::new()));
        record(&mut report, name, outcome);
    }
    report
}

fn check_core_vs_brute(c: &Ctx) -> Check {
    let brute = brute_core(c.a, c.sr, c.cfg.horizon, &CHECK_TOL)?;
    let core = c.core.vectors();
    let mut all = core.clone();
    all.extend(brute.rays.iter().cloned());
    ensure(brute.converged, || format!("brute force not converged at horizon {}", brute.horizon), || all.clone())?;
    ensure(
        brute.rays.len() == core.len() && same_cone(&core, &brute.rays, c.sr, &CHECK_TOL),
        || format!("core has {} extremals, brute force {}", core.len(), brute.rays.len()),
        || all.clone(),
    )?;
    Ok(format!("{} rays, horizon {}", core.len(), brute.horizon))
}

fn same_values(x: &[f64], y: &[f64]) -> bool {
    x.len() == y.len() && x.iter().zip(y).all(|(a, b)| CHECK_TOL.eq(*a, *b))
}

fn check_spectrum_of_powers(c: &Ctx) -> Check {
    let base = c.data.spectrum();
    for k in 1..=c.cfg.max_power {
        let pk = c.a.power(k)?;
        let got = spectrum(&pk, c.sr, &c.cfg.tol);
        let want: Vec<f64> = base.iter().map(|r| r.powi(k as i32)).collect();
        ensure(
            same_values(&got, &want),
            || format!("k = {k}: spectrum {got:?}, expected {want:?}"),
            Vec::new,
        )?;
    }
    Ok(format!("{} eigenvalues, k ≤ {}", base.len(), c.cfg.max_power))
}

fn spectral_index_set(a: &Matrix, rho: f64, sr: Semiring, tol: &Tolerance) -> BTreeSet<usize> {
    let (_, classes) = spectral_classes(a, tol);
    classes
        .iter()
        .filter(|cl| cl.is_spectral(sr) && CHECK_TOL.eq(cl.rho(sr), rho))
        .flat_map(|cl| cl.nodes.iter().copied())
        .collect()
}

fn check_spectral_index_sets(c: &Ctx) -> Check {
    for rho in c.data.spectrum() {
        let base = spectral_index_set(c.a, rho, c.sr, &c.cfg.tol);
        for k in 2..=c.cfg.max_power {
            let got = spectral_index_set(&c.a.power(k)?, rho.powi(k as i32), c.sr, &c.cfg.tol);
            ensure(
                got == base,
                || format!("ρ = {rho}, k = {k}: {got:?} ≠ {base:?}"),
                Vec::new,
            )?;
        }
    }
    Ok("index sets agree".into())
}

fn check_eigencone_periodicity(c: &Ctx) -> Check {
    for level in &c.data.levels {
        let rho = level.reduction.rho;
        let sigma = level.sigma;
        let len = (3 * sigma).max(4);
        let cones: Vec<Vec<Vector>> = (1..=len)
            .map(|k| c.data.eigencone(rho, k).map(|e| e.vectors()))
            .collect::<Result<_>>()?;
        let found = detect_period(&cones, |x, y| same_cone(x, y, c.sr, &CHECK_TOL));
        ensure(
            found == Ok((1, sigma)),
            || format!("ρ = {rho}: detected {found:?}, expected threshold 1 and period {sigma}"),
            || cones.concat(),
        )?;
        let top = &cones[sigma - 1];
        for (k, cone) in cones.iter().enumerate() {
            ensure(
                cone_contains(top, cone, c.sr, &CHECK_TOL),
                || format!("ρ = {rho}: V(A^{}) not inside V(A^{sigma})", k + 1),
                || cone.clone(),
            )?;
        }
    }
    Ok(format!("σ_Λ = {}", c.data.sigma_lambda()))
}

fn check_lattice(c: &Ctx) -> Check {
    let s = c.data.sigma_lambda();
    let m = c.cfg.lattice_max;
    let cones: Vec<Vec<Vector>> = (1..=m)
        .map(|k| {
            c.data
                .sum_eigencone(k)
                .map(|cs| cs.iter().flat_map(|e| e.vectors()).collect())
        })
        .collect::<Result<_>>()?;
    for k in 1..=m {
        for l in 1..=m {
            let inside = cone_contains(&cones[l - 1], &cones[k - 1], c.sr, &CHECK_TOL);
            let divides = gcd(l, s).is_multiple_of(gcd(k, s));
            ensure(
                inside == divides,
                || format!("k = {k}, l = {l}, σ_Λ = {s}: inclusion {inside}, divisibility {divides}"),
                || [cones[k - 1].clone(), cones[l - 1].clone()].concat(),
            )?;
        }
    }
    Ok(format!("k, l ≤ {m}"))
}

fn check_extremal_permutation(c: &Ctx) -> Check {
    let core = c.core;
    let vectors = core.vectors();
    let expected_census: usize = c
        .data
        .levels
        .iter()
        .flat_map(|l| l.ancestors.iter().map(|a| a.cyclic.sigma))
        .sum();
    ensure(
        core.census == expected_census && core.census == vectors.len(),
        || format!("census {} but cyclicities sum to {expected_census}", core.census),
        || vectors.clone(),
    )?;
    ensure(
        core.census <= c.a.dim(),
        || format!("census {} exceeds dimension", core.census),
        || vectors.clone(),
    )?;
    let mut image: Vec<usize> = core.successor.clone();
    image.sort_unstable();
    ensure(
        image == (0..vectors.len()).collect::<Vec<_>>(),
        || "successor map is not a permutation".into(),
        || vectors.clone(),
    )?;
    for (i, x) in vectors.iter().enumerate() {
        let y = c.a.apply(x)?;
        ensure(
            y.proportional(&vectors[core.successor[i]], &CHECK_TOL),
            || format!("A x_{i} is not a multiple of its successor"),
            || vec![x.clone(), y.clone()],
        )?;
    }
    for orbit in &core.orbits {
        ensure(
            orbit.members.len() == orbit.sigma,
            || format!("orbit of length {} for cyclicity {}", orbit.members.len(), orbit.sigma),
            || orbit.members.iter().map(|&i| vectors[i].clone()).collect(),
        )?;
        let p = c.a.power(orbit.sigma)?;
        for &i in &orbit.members {
            let y = p.apply(&vectors[i])?;
            ensure(
                y.proportional(&vectors[i], &CHECK_TOL),
                || format!("A^σ does not fix extremal {i}"),
                || vec![vectors[i].clone(), y.clone()],
            )?;
        }
    }
    Ok(format!("census {}, {} orbits", core.census, core.orbits.len()))
}

fn check_eigen_equation(c: &Ctx) -> Check {
    let kmax = c.data.sigma_lambda().max(2).min(c.cfg.max_power);
    for k in 1..=kmax {
        let p = c.a.power(k)?;
        for cone in c.data.sum_eigencone(k)? {
            let rk = cone.rho.powi(k as i32);
            for g in cone.vectors() {
                let y = p.apply(&g)?.scaled(1.0 / rk);
                ensure(
                    y.approx_eq(&g, &CHECK_TOL),
                    || format!("A^{k} g ≠ ρ^{k} g for ρ = {}", cone.rho),
                    || vec![g.clone(), y.clone()],
                )?;
            }
        }
    }
    Ok(format!("k ≤ {kmax}"))
}

fn check_span_chain(c: &Ctx) -> Check {
    let n = c.a.dim();
    let mut spans = Vec::new();
    let mut p = c.a.clone();
    for t in 1..=2 * n + 1 {
        if t > 1 {
            p = p.mul(c.a)?;
        }
        spans.push(normalized_columns(&p));
    }
    let core = c.core.vectors();
    for t in 0..2 * n {
        ensure(
            cone_contains(&spans[t], &spans[t + 1], c.sr, &CHECK_TOL),
            || format!("span(A^{}) ⊄ span(A^{})", t + 2, t + 1),
            || spans[t + 1].clone(),
        )?;
        ensure(
            cone_contains(&spans[t], &core, c.sr, &CHECK_TOL),
            || format!("core ⊄ span(A^{})", t + 1),
            || core.clone(),
        )?;
    }
    Ok(format!("t ≤ {}", 2 * n))
}

fn check_scaling(c: &Ctx) -> Check {
    let factor = 3.7;
    let data = analyze_spectrum(&c.a.scaled(factor), c.sr, &c.cfg.tol)?;
    let scaled = core_from_spectrum(&data)?;
    let want: Vec<f64> = c.data.spectrum().iter().map(|r| r * factor).collect();
    ensure(
        same_values(&data.spectrum(), &want),
        || format!("spectrum {:?}, expected {want:?}", data.spectrum()),
        Vec::new,
    )?;
    ensure(
        scaled.census == c.core.census
            && scaled.sigma_lambda == c.core.sigma_lambda
            && same_cone(&scaled.vectors(), &c.core.vectors(), c.sr, &CHECK_TOL),
        || "core changed under scalar scaling".into(),
        || [scaled.vectors(), c.core.vectors()].concat(),
    )?;
    Ok(format!("factor {factor}"))
}

fn check_boolean_cyclicity(c: &Ctx) -> Check {
    let g = digraph_of(c.a, &c.cfg.tol);
    let mut count = 0;
    for comp in g.strongly_connected_components() {
        if comp.len() == 1 && !g.has_edge(comp[0], comp[0]) {
            continue;
        }
        count += 1;
        let m = comp.len();
        let sub = Digraph::from_edges(
            m,
            (0..m)
                .flat_map(|p| (0..m).map(move |q| (p, q)))
                .filter(|&(p, q)| g.has_edge(comp[p], comp[q])),
        );
        let all: Vec<usize> = (0..m).collect();
        let cyc = cyclicity_of_component(&sub, &all)?;
        let sigma = cyc.sigma;
        let bound = (m - 1) * (m - 1) + 1;
        let len = bound + 2 * sigma + 1;
        let powers: Vec<BTreeSet<(usize, usize)>> = (1..=len)
            .map(|k| graph_power(&sub, k).map(|h| h.edge_set()))
            .collect::<Result<_>>()?;
        let found = detect_period(&powers, |x, y| x == y)?;
        ensure(
            found.1 == sigma && found.0 <= bound,
            || format!("class {comp:?}: threshold/period {found:?}, cyclicity {sigma}, bound {bound}"),
            Vec::new,
        )?;
        for k in 1..=2 * sigma {
            let h = graph_power(&sub, k)?;
            let mut comps: Vec<Vec<usize>> = h.strongly_connected_components();
            comps.sort();
            let d = gcd(k, sigma);
            let mut pieces: Vec<Vec<usize>> = (0..d)
                .map(|r| {
                    let mut p: Vec<usize> = cyc
                        .cyclic_classes
                        .iter()
                        .enumerate()
                        .filter(|(t, _)| t % d == r)
                        .flat_map(|(_, cl)| cl.iter().copied())
                        .collect();
                    p.sort_unstable();
                    p
                })
                .collect();
            pieces.sort();
            ensure(
                comps == pieces,
                || format!("class {comp:?}, k = {k}: components of the power {comps:?}, expected {pieces:?}"),
                Vec::new,
            )?;
        }
    }
    Ok(format!("{count} nontrivial classes"))
}

fn check_critical_powers(c: &Ctx) -> Check {
    let tol = &c.cfg.tol;
    let lambda = max_cycle_mean_with(c.a, tol);
    if lambda == 0.0 {
        return Ok("no critical graph".into());
    }
    let crit = critical_graph(c.a, tol)?;
    let base = crit.digraph(c.a.dim());
    let unit = c.a.scaled(1.0 / lambda);
    let (_, b) = visualize_strict(&unit, tol)?;
    let bb = b.booleanize(&CHECK_TOL)?;
    for k in 1..=c.cfg.max_power {
        let ck = critical_graph(&c.a.power(k)?, tol)?;
        let want = graph_power(&base, k)?;
        // the critical graph of A^k is the k-th power restricted to its own edges
        ensure(
            ck.edges.iter().copied().collect::<BTreeSet<_>>() == want.edge_set(),
            || format!("k = {k}: crit(A^k) differs from crit(A)^k"),
            Vec::new,
        )?;
        ensure(
            ck.nodes == crit.nodes,
            || format!("k = {k}: critical nodes {:?} ≠ {:?}", ck.nodes, crit.nodes),
            Vec::new,
        )?;
        let lhs = b.power(k)?.booleanize(&CHECK_TOL)?;
        let rhs = bb.power(k)?;
        ensure(lhs == rhs, || format!("k = {k}: booleanization does not commute with powers"), Vec::new)?;
    }
    Ok(format!("k ≤ {}", c.cfg.max_power))
}

fn best_simple_path(a: &Matrix, i: usize, j: usize) -> f64 {
    fn walk(a: &Matrix, cur: usize, j: usize, acc: f64, used: &mut Vec<bool>, best: &mut f64) {
        for v in 0..a.dim() {
            let w = a.get(cur, v);
            if w == 0.0 {
                continue;
            }
            if v == j {
                *best = best.max(acc * w);
            }
            if !used[v] {
                used[v] = true;
                walk(a, v, j, acc * w, used, best);
                used[v] = false;
            }
        }
    }
    let mut best = if i == j { 1.0 } else { 0.0 };
    let mut used = vec![false; a.dim()];
    used[i] = true;
    walk(a, i, j, 1.0, &mut used, &mut best);
    best
}

fn check_kleene(c: &Ctx) -> Check {
    let n = c.a.dim();
    if n > 5 {
        return Ok("skipped for n > 5".into());
    }
    let lambda = max_cycle_mean_with(c.a, &c.cfg.tol);
    let unit = if lambda > 0.0 { c.a.scaled(1.0 / lambda) } else { c.a.clone() };
    let star = kleene_star(&unit, &c.cfg.tol)?;
    let sq = star.mul(&star)?;
    ensure(
        sq.entries().iter().zip(star.entries()).all(|(x, y)| CHECK_TOL.eq(*x, *y)),
        || "A* ⊗ A* ≠ A*".into(),
        Vec::new,
    )?;
    for i in 0..n {
        for j in 0..n {
            let want = best_simple_path(&unit, i, j);
            ensure(
                CHECK_TOL.eq(star.get(i, j), want),
                || format!("A*[{i}][{j}] = {}, best path weight {want}", star.get(i, j)),
                Vec::new,
            )?;
        }
    }
    Ok("idempotent and path-optimal".into())
}

fn strict_eq(x: &[f64], y: &[f64]) -> bool {
    x.iter()
        .zip(y)
        .all(|(a, b)| (*a == 0.0) == (*b == 0.0) && (a - b).abs() <= 1e-9 * a.abs().max(b.abs()))
}

fn check_critical_threshold(c: &Ctx) -> Check {
    let tol = &c.cfg.tol;
    let n = c.a.dim();
    let lambda = max_cycle_mean_with(c.a, tol);
    if lambda == 0.0 {
        return Ok("no critical graph".into());
    }
    let crit = critical_graph(c.a, tol)?;
    let sigma = crit.cyclicity();
    let len = n * n + 2 * sigma + 2;

    let g = crit.digraph(n);
    let mut t_crit = 1;
    for comp in &crit.components {
        let m = comp.nodes.len();
        let sub = Digraph::from_edges(
            m,
            (0..m)
                .flat_map(|p| (0..m).map(move |q| (p, q)))
                .filter(|&(p, q)| g.has_edge(comp.nodes[p], comp.nodes[q])),
        );
        let powers: Vec<BTreeSet<(usize, usize)>> = (1..=len)
            .map(|k| graph_power(&sub, k).map(|h| h.edge_set()))
            .collect::<Result<_>>()?;
        let t = threshold_for_period(&powers, comp.cyclic.sigma, |x, y| x == y).unwrap_or(usize::MAX);
        t_crit = t_crit.max(t);
    }

    let unit = c.a.scaled(1.0 / lambda);
    let mut powers = Vec::with_capacity(len);
    let mut p = unit.clone();
    for k in 1..=len {
        if k > 1 {
            p = p.mul(&unit)?;
        }
        powers.push(p.clone());
    }
    let mut t_c = 1;
    for &i in &crit.nodes {
        let cols: Vec<Vec<f64>> = powers.iter().map(|m| m.column(i).into_inner()).collect();
        let rows: Vec<Vec<f64>> = powers.iter().map(|m| m.rows()[i].clone()).collect();
        for seq in [cols, rows] {
            let t = threshold_for_period(&seq, sigma, |x, y| strict_eq(x, y)).unwrap_or(usize::MAX);
            t_c = t_c.max(t);
        }
    }
    ensure(
        t_crit <= t_c && t_c <= n * n,
        || format!("T(crit) = {t_crit}, T_c = {t_c}, n² = {}", n * n),
        Vec::new,
    )?;
    Ok(format!("T(crit) = {t_crit}, T_c = {t_c}"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn period_of_cycle_powers() {
        let g = Digraph::from_edges(4, [(0, 1), (1, 2), (2, 3), (3, 0)]);
        let seq: Vec<_> = (1..=12).map(|k| graph_power(&g, k).unwrap().edge_set()).collect();
        assert_eq!(detect_period(&seq, |a, b| a == b), Ok((1, 4)));
    }

    #[test]
    fn constant_and_transient_sequences() {
        assert_eq!(detect_period(&[5, 5, 5], |a, b| a == b), Ok((1, 1)));
        assert_eq!(detect_period(&[9, 8, 1, 2, 1, 2, 1, 2], |a, b| a == b), Ok((3, 2)));
        assert_eq!(detect_period(&[1, 2, 3, 4], |a, b| a == b), Err(Error::PeriodUndetermined));
    }

    fn m(rows: &[&[f64]], sr: Semiring) -> Matrix {
        Matrix::from_rows(&rows.iter().map(|r| r.to_vec()).collect::<Vec<_>>(), sr).unwrap()
    }

    #[test]
    fn gelfand_radius_of_small_blocks() {
        let rot = DMatrix::from_row_slice(2, 2, &[0.0, 2.0, 8.0, 0.0]);
        assert!((gelfand_radius(&rot) - 4.0).abs() < 1e-12);
        let jordan = DMatrix::from_row_slice(2, 2, &[0.5, 1.0, 0.0, 0.5]);
        assert!((gelfand_radius(&jordan) - 0.5).abs() < 1e-10);
        assert_eq!(gelfand_radius(&DMatrix::from_row_slice(2, 2, &[0.0, 1.0, 0.0, 0.0])), 0.0);
    }

    #[test]
    fn log_columns_keep_decaying_directions() {
        let a = m(&[&[0.25, 0.0], &[0.0, 1.0]], Semiring::PlusTimes);
        let p = LogColumns::power(&a, 1 << 20).unwrap();
        assert_eq!(p.dirs, vec![Vector::unit(2, 0), Vector::unit(2, 1)]);
        assert!((p.logs[0] - (1u64 << 20) as f64 * 0.25f64.ln()).abs() < 1e-6);
        let b = m(&[&[1.0, 2.0], &[3.0, 0.5]], Semiring::MaxTimes);
        let direct = b.power(7).unwrap();
        let logs = LogColumns::power(&b, 7).unwrap();
        for (j, d) in logs.dirs.iter().enumerate() {
            assert!(d.approx_eq(&direct.column(j).normalized().unwrap(), &Tolerance::default()));
        }
    }

    #[test]
    fn brute_core_of_unit_triangle() {
        let tol = Tolerance::default();
        let plus = brute_core(&m(&[&[1.0, 1.0], &[0.0, 1.0]], Semiring::PlusTimes), Semiring::PlusTimes, 2000, &tol).unwrap();
        assert!(plus.converged);
        assert_eq!(plus.rays, vec![Vector::unit(2, 0)]);

        let max = brute_core(&m(&[&[1.0, 1.0], &[0.0, 1.0]], Semiring::MaxTimes), Semiring::MaxTimes, 100, &tol).unwrap();
        assert!(max.converged);
        assert_eq!(max.rays, vec![Vector::unit(2, 0), Vector::ones(2)]);
    }

    #[test]
    fn random_instances_are_reproducible() {
        let (k1, a1) = random_instance(7, 4, 5, Semiring::MaxTimes);
        let (k2, a2) = random_instance(7, 4, 5, Semiring::MaxTimes);
        assert_eq!((k1, &a1), (k2, &a2));
        assert_eq!(k1, InstanceKind::Structured);
        let (_, b) = random_instance(8, 4, 5, Semiring::MaxTimes);
        assert_ne!(a1, b);
    }

    #[test]
    fn best_path_matches_star_on_a_triangle() {
        let a = m(&[&[0.0, 0.5, 0.0], &[0.0, 0.0, 0.5], &[1.0, 0.0, 0.0]], Semiring::MaxTimes);
        assert_eq!(best_simple_path(&a, 0, 2), 0.25);
        assert_eq!(best_simple_path(&a, 1, 1), 1.0);
    }
}
