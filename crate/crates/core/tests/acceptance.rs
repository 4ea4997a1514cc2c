//! Acceptance criteria, one PASS/FAIL line each. Exits nonzero if any fails.

mod common;

use std::collections::BTreeSet;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use common::{close, close_rays, example1, example2, same_rays, GOLDEN};
use tropicore::algebra::{same_cone, Matrix, Semiring, Tolerance, Vector};
use tropicore::cores::compute_core;
use tropicore::eigencones::analyze_spectrum;
use tropicore::graphs::{gcd, graph_power, Digraph};
use tropicore::oracle::{detect_period, random_instance, verify_bundle, VerifyConfig, CHECK_TOL};
use tropicore::spectral::critical_graph;

type Outcome = Result<String, String>;

fn require(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn unit_l2(x: &[f64]) -> Vec<f64> {
    let norm = x.iter().map(|v| v * v).sum::<f64>().sqrt();
    x.iter().map(|v| v / norm).collect()
}

fn example1_max() -> Outcome {
    let tol = Tolerance::default();
    let start = Instant::now();
    let a = example1(Semiring::MaxTimes);
    let data = analyze_spectrum(&a, Semiring::MaxTimes, &tol).map_err(|e| e.to_string())?;
    let crit = critical_graph(&a, &tol).map_err(|e| e.to_string())?;
    let core = compute_core(&a, Semiring::MaxTimes, &tol).map_err(|e| e.to_string())?;
    let elapsed = start.elapsed();

    let spectrum = data.spectrum();
    require(close(&spectrum, &[1.0], 1e-9), || format!("spectrum {spectrum:?}"))?;
    let cycle: BTreeSet<(usize, usize)> = [(1, 2), (2, 3), (3, 4), (4, 1)].into();
    require(
        crit.components.len() == 1
            && crit.nodes == vec![1, 2, 3, 4]
            && crit.edges.iter().copied().collect::<BTreeSet<_>>() == cycle,
        || format!("critical graph nodes {:?} edges {:?}", crit.nodes, crit.edges),
    )?;
    require(data.sigma_lambda() == 4, || format!("σ_Λ = {}", data.sigma_lambda()))?;
    let expected: [&[f64]; 4] = [
        &[0.0, 1.0, 0.6807, 0.7738, 0.8797],
        &[0.0, 0.8797, 1.0, 0.6807, 0.7738],
        &[0.0, 0.7738, 0.8797, 1.0, 0.6807],
        &[0.0, 0.6807, 0.7738, 0.8797, 1.0],
    ];
    require(same_rays(&core.vectors(), &expected, GOLDEN), || {
        format!("core extremals {:?}", core.vectors())
    })?;
    require(core.census == 4, || format!("census {}", core.census))?;
    require(
        core.orbits.len() == 1 && core.orbits[0].members.len() == 4,
        || format!("orbits {:?}", core.orbits),
    )?;
    require(elapsed < Duration::from_secs(1), || format!("runtime {elapsed:?}"))?;
    Ok(format!("census 4, one 4-orbit, {elapsed:.1?}"))
}

fn example1_powers() -> Outcome {
    let a = example1(Semiring::MaxTimes);
    let a10 = a.power(10).map_err(|e| e.to_string())?;
    let printed = [
        [0.7738, 0.6807, 1.0, 0.8797],
        [0.8797, 0.7738, 0.6807, 1.0],
        [1.0, 0.8797, 0.7738, 0.6807],
        [0.6807, 1.0, 0.8797, 0.7738],
    ];
    for (p, row) in printed.iter().enumerate() {
        for (q, want) in row.iter().enumerate() {
            let got = a10.get(p + 1, q + 1);
            require((got - want).abs() <= 1e-4, || format!("A^10[{}][{}] = {got}, printed {want}", p + 2, q + 2))?;
        }
    }
    let alpha = a10.get(0, 0);
    require(alpha > 0.0 && alpha < 1e-4, || format!("α = {alpha}"))?;

    let mm: Vec<usize> = vec![1, 2, 3, 4];
    let mut p = a.clone();
    let mut blocks = Vec::new();
    for t in 1..=40 {
        if t > 1 {
            p = p.mul(&a).map_err(|e| e.to_string())?;
        }
        blocks.push(p.submatrix(&mm));
    }
    let eq = |x: &Matrix, y: &Matrix| close(x.entries(), y.entries(), 1e-12);
    let (threshold, period) = detect_period(&blocks, eq).map_err(|e| e.to_string())?;
    require(period == 4 && threshold <= 10, || format!("threshold {threshold}, period {period}"))?;
    Ok(format!("α = {alpha:.2e}, period {period} from t = {threshold}"))
}

fn example2_max() -> Outcome {
    let tol = Tolerance::default();
    let sr = Semiring::MaxTimes;
    let a = example2(sr);
    let data = analyze_spectrum(&a, sr, &tol).map_err(|e| e.to_string())?;
    let spectrum = data.spectrum();
    require(close(&spectrum, &[1.0, 0.5805], 1e-9), || format!("spectrum {spectrum:?}"))?;
    let v2 = data.eigencone(1.0, 2).map_err(|e| e.to_string())?.vectors();
    let pair: [&[f64]; 2] = [&[1.0, 0.0, 0.3900, 0.6678], &[0.0, 1.0, 0.6718, 0.6951]];
    require(same_rays(&v2, &pair, GOLDEN), || format!("V(A^2, 1) = {v2:?}"))?;
    let core = compute_core(&a, sr, &tol).map_err(|e| e.to_string())?;
    let all: [&[f64]; 3] = [pair[0], pair[1], &[0.0, 0.0, 0.5805, 0.4753]];
    require(same_rays(&core.vectors(), &all, GOLDEN), || format!("core {:?}", core.vectors()))?;
    let span = |t: usize| -> Result<Vec<Vector>, String> {
        Ok(a.power(t).map_err(|e| e.to_string())?.columns().into_iter().filter_map(|c| c.normalized()).collect())
    };
    require(same_cone(&span(4)?, &core.vectors(), sr, &CHECK_TOL), || "span(A^4) differs from the core".into())?;
    require(!same_cone(&span(2)?, &core.vectors(), sr, &CHECK_TOL), || "span(A^2) already equals the core".into())?;
    Ok("span(A^4) = core".into())
}

fn example2_nonneg() -> Outcome {
    let tol = Tolerance::default();
    let sr = Semiring::PlusTimes;
    let a = example2(sr);
    let data = analyze_spectrum(&a, sr, &tol).map_err(|e| e.to_string())?;
    let spectrum = data.spectrum();
    require(spectrum.len() == 2 && (spectrum[0] - 1.0).abs() < 1e-9, || format!("spectrum {spectrum:?}"))?;
    let rho_nu = spectrum[1];
    require((rho_nu - 0.7924).abs() <= 5e-4, || format!("ρ_ν = {rho_nu}"))?;

    let l2_match = |got: &[Vector], want: &[&[f64]]| {
        got.len() == want.len()
            && want.iter().all(|w| got.iter().filter(|g| close(&unit_l2(g), &unit_l2(w), GOLDEN)).count() == 1)
    };
    let v1 = data.eigencone(1.0, 1).map_err(|e| e.to_string())?.vectors();
    require(l2_match(&v1, &[&[0.1326, 0.1326, 0.6218, 0.7604]]), || format!("V(A, 1) = {v1:?}"))?;
    let v2 = data.eigencone(1.0, 2).map_err(|e| e.to_string())?.vectors();
    require(
        l2_match(&v2, &[&[0.2646, 0.0, 0.5815, 0.7693], &[0.0, 0.2566, 0.6391, 0.7251]]),
        || format!("V(A^2, 1) = {v2:?}"),
    )?;
    let vnu = data.eigencone(rho_nu, 1).map_err(|e| e.to_string())?.vectors();
    require(l2_match(&vnu, &[&[0.0, 0.0, 0.6612, 0.7502]]), || format!("V(A, ρ_ν) = {vnu:?}"))?;

    let core = compute_core(&a, sr, &tol).map_err(|e| e.to_string())?;
    let mut lengths: Vec<usize> = core.orbits.iter().map(|o| o.members.len()).collect();
    lengths.sort_unstable();
    require(core.census == 3 && lengths == vec![1, 2], || {
        format!("census {}, orbit lengths {lengths:?}", core.census)
    })?;
    require(
        close_rays(&core.extremals.iter().find(|x| x.rho < 0.9).expect("ρ_ν extremal").vector, &[0.0, 0.0, 0.6612, 0.7502], GOLDEN),
        || "core extremal at ρ_ν".into(),
    )?;
    Ok(format!("ρ_ν = {rho_nu:.7}, census 3"))
}

fn property_suite() -> Outcome {
    let start = Instant::now();
    let letters = [
        ("a", "core_matches_brute_force"),
        ("b", "spectrum_of_powers"),
        ("c", "eigencone_periodicity"),
        ("d", "sum_cone_lattice"),
        ("e", "extremal_permutation"),
        ("f", "critical_graph_of_powers"),
        ("g", "kleene_star"),
    ];
    let mut failures = Vec::new();
    let mut seen = BTreeSet::new();
    let mut instances = 0;
    for sr in [Semiring::MaxTimes, Semiring::PlusTimes] {
        for trial in 0..50 {
            let n = 1 + trial % 6;
            let (kind, a) = random_instance(1, trial, n, sr);
            let cfg = VerifyConfig {
                seed: 1,
                instance: format!("{kind:?} #{trial} n={n}"),
                ..VerifyConfig::default()
            };
            let report = verify_bundle(&a, sr, &cfg);
            instances += 1;
            for c in &report.checks {
                seen.insert(c.name.clone());
                if !c.passed {
                    failures.push(format!("{sr} {}: {} ({})", c.instance, c.name, c.detail));
                }
            }
        }
    }
    let elapsed = start.elapsed();
    let missing: Vec<&str> = letters.iter().filter(|(_, name)| !seen.contains(*name)).map(|(l, _)| *l).collect();
    require(missing.is_empty(), || format!("properties never checked: {missing:?}"))?;
    require(failures.is_empty(), || format!("{} failures, first: {}", failures.len(), failures[0]))?;
    require(elapsed < Duration::from_secs(60), || format!("runtime {elapsed:?}"))?;
    Ok(format!("{instances} instances, properties (a)-(g), {elapsed:.1?}"))
}

/// Strongly connected graph whose nodes are split into `s` rotating layers,
/// so its cyclicity is a multiple of `s`.
fn random_strong_graph(rng: &mut ChaCha8Rng) -> Digraph {
    loop {
        let n = rng.random_range(2..=10usize);
        let s = rng.random_range(1..=n.min(4));
        let layer: Vec<usize> = (0..n).map(|i| i % s).collect();
        let density = rng.random_range(0.2..0.6);
        let edges: Vec<(usize, usize)> = (0..n)
            .flat_map(|i| (0..n).map(move |j| (i, j)))
            .filter(|&(i, j)| layer[j] == (layer[i] + 1) % s)
            .filter(|_| rng.random_bool(density))
            .collect();
        let g = Digraph::from_edges(n, edges);
        let sccs = g.strongly_connected_components();
        if sccs.len() == 1 && g.edges().len() > 0 {
            return g;
        }
    }
}

/// gcd of the lengths of closed walks of length at most `n`.
fn walk_cyclicity(g: &Digraph) -> usize {
    let n = g.node_count();
    (1..=n)
        .filter(|&k| {
            let h = graph_power(g, k).expect("positive power");
            (0..n).any(|i| h.has_edge(i, i))
        })
        .fold(0, gcd)
}

fn component_sets(g: &Digraph) -> Vec<BTreeSet<usize>> {
    g.strongly_connected_components().into_iter().map(|c| c.into_iter().collect()).collect()
}

fn boolean_layer() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0xb001);
    let mut sigmas = BTreeSet::new();
    for trial in 0..30 {
        let g = random_strong_graph(&mut rng);
        let n = g.node_count();
        let sigma = walk_cyclicity(&g);
        sigmas.insert(sigma);
        let all: Vec<usize> = (0..n).collect();
        let computed = tropicore::graphs::cyclicity_of_component(&g, &all).map_err(|e| e.to_string())?.sigma;
        require(computed == sigma, || format!("graph {trial}: cyclicity {computed}, walks give {sigma}"))?;

        for k in 1..=12 {
            let h = graph_power(&g, k).map_err(|e| e.to_string())?;
            let comps = component_sets(&h);
            require(comps.len() == gcd(k, sigma), || {
                format!("graph {trial}: G^{k} has {} components, gcd = {}", comps.len(), gcd(k, sigma))
            })?;
            let nontrivial = comps.iter().all(|c| c.len() > 1 || c.iter().all(|&v| h.has_edge(v, v)));
            let isolated = h.edges().iter().all(|(i, j)| comps.iter().any(|c| c.contains(i) && c.contains(j)));
            require(nontrivial && isolated, || format!("graph {trial}: components of G^{k} not separated"))?;
        }

        let bound = (n - 1) * (n - 1) + 1;
        let powers: Vec<BTreeSet<(usize, usize)>> = (1..=bound + 2 * sigma + 1)
            .map(|k| graph_power(&g, k).map(|h| h.edge_set()))
            .collect::<Result<_, _>>()
            .map_err(|e| e.to_string())?;
        let (threshold, period) = detect_period(&powers, |x, y| x == y).map_err(|e| e.to_string())?;
        require(period == sigma && threshold <= bound, || {
            format!("graph {trial}: threshold {threshold} (bound {bound}), period {period}, σ {sigma}")
        })?;

        for k in 1..=12 {
            let ck = component_sets(&graph_power(&g, k).map_err(|e| e.to_string())?);
            for l in 1..=12 {
                let cl = component_sets(&graph_power(&g, l).map_err(|e| e.to_string())?);
                let divides = gcd(l, sigma) % gcd(k, sigma) == 0;
                let refined = cl.iter().all(|c| ck.iter().any(|d| c.is_subset(d)));
                require(divides == refined, || {
                    format!("graph {trial}: k={k}, l={l}, divisibility {divides}, containment {refined}")
                })?;
            }
        }
    }
    Ok(format!("30 graphs, cyclicities {sigmas:?}"))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 6] = [
        ("Example 1, max-times: spectrum, critical cycle, core", example1_max),
        ("Example 1, max-times: A^10 and periodicity of A^t on M", example1_powers),
        ("Example 2, max-times: eigencones, core, stabilization at t=4", example2_max),
        ("Example 2, nonnegative: Perron roots, eigencones, orbits", example2_nonneg),
        ("property suite, 50 seeded instances per algebra", property_suite),
        ("Boolean layer on 30 strongly connected graphs", boolean_layer),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let outcome = catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|_| Err("panicked".into()));
        match outcome {
            Ok(detail) => println!("PASS {} {name}: {detail}", i + 1),
            Err(detail) => {
                failed += 1;
                println!("FAIL {} {name}: {detail}", i + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
