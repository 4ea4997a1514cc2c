//! The core of a nonnegative matrix: its extremal rays, the orbits of `A`
//! acting on them, and the max-algebraic periodicity classifier.

use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use crate::algebra::{membership, Matrix, Semiring, Tolerance, Vector};
use crate::eigencones::{analyze_spectrum, SpectralData};
use crate::error::{Error, Result};
use crate::graphs::ClassKind;
use crate::spectral::max_cycle_mean_with;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoreExtremal {
    pub vector: Vector,
    pub rho: f64,
    pub ancestor: usize,
    pub cyclic_index: usize,
}

/// A cycle of extremals under `x ↦ A x`, listed in the order of the action.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Orbit {
    pub rho: f64,
    pub ancestor: usize,
    /// Cyclicity of the ancestor class or critical component.
    pub sigma: usize,
    /// Indices into [`CoreDescription::extremals`].
    pub members: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoreDescription {
    pub algebra: Semiring,
    pub sigma_lambda: usize,
    pub extremals: Vec<CoreExtremal>,
    /// `successor[i] = j` when `A x_i` is a positive multiple of `x_j`.
    pub successor: Vec<usize>,
    pub orbits: Vec<Orbit>,
    pub census: usize,
}

impl CoreDescription {
    pub fn vectors(&self) -> Vec<Vector> {
        self.extremals.iter().map(|e| e.vector.clone()).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.extremals.is_empty()
    }

    pub fn contains(&self, v: &Vector, tol: &Tolerance) -> Result<bool> {
        if v.is_zero(tol) {
            return Ok(true);
        }
        Ok(membership(&self.vectors(), v, self.algebra, tol)?.is_inside())
    }
}

/// `core(A) = V^Σ(A^{σ_Λ})` with its orbit structure.
pub fn compute_core(a: &Matrix, sr: Semiring, tol: &Tolerance) -> Result<CoreDescription> {
    let data = analyze_spectrum(a, sr, tol)?;
    core_from_spectrum(&data)
}

pub fn core_from_spectrum(data: &SpectralData) -> Result<CoreDescription> {
    let tol = &data.tol;
    let sr = data.semiring;
    let sigma_lambda = data.sigma_lambda();

    let mut extremals: Vec<CoreExtremal> = Vec::new();
    let mut ancestor_sigma = Vec::new();
    for (level, cone) in data.levels.iter().zip(data.sum_eigencone(sigma_lambda)?) {
        for g in cone.generators {
            if extremals.iter().any(|e| e.vector.proportional(&g.vector, tol)) {
                continue;
            }
            let sigma = level
                .ancestors
                .iter()
                .find(|anc| anc.id == g.ancestor)
                .map_or(1, |anc| anc.cyclic.sigma);
            ancestor_sigma.push(sigma);
            extremals.push(CoreExtremal {
                vector: g.vector,
                rho: cone.rho,
                ancestor: g.ancestor,
                cyclic_index: g.cyclic_index,
            });
        }
    }

    let mut successor = Vec::with_capacity(extremals.len());
    for (i, e) in extremals.iter().enumerate() {
        let image = data.matrix.apply(&e.vector)?;
        let j = extremals
            .iter()
            .position(|f| f.vector.proportional(&image, tol))
            .ok_or(Error::OrbitClosure { index: i })?;
        successor.push(j);
    }
    let mut hit = vec![false; extremals.len()];
    for &j in &successor {
        if std::mem::replace(&mut hit[j], true) {
            return Err(Error::NotAPermutation);
        }
    }

    let mut seen = vec![false; extremals.len()];
    let mut orbits = Vec::new();
    for start in 0..extremals.len() {
        if seen[start] {
            continue;
        }
        let mut cycle = vec![start];
        seen[start] = true;
        let mut cur = successor[start];
        while cur != start {
            seen[cur] = true;
            cycle.push(cur);
            cur = successor[cur];
        }
        let first = (0..cycle.len())
            .min_by(|&p, &q| extremals[cycle[p]].vector.lex_cmp(&extremals[cycle[q]].vector))
            .unwrap_or(0);
        cycle.rotate_left(first);
        orbits.push(Orbit {
            rho: extremals[start].rho,
            ancestor: extremals[start].ancestor,
            sigma: ancestor_sigma[start],
            members: cycle,
        });
    }

    Ok(CoreDescription {
        algebra: sr,
        sigma_lambda,
        census: extremals.len(),
        extremals,
        successor,
        orbits,
    })
}

/// `A v` for `v` in the core.
pub fn act(a: &Matrix, core: &CoreDescription, v: &Vector, tol: &Tolerance) -> Result<Vector> {
    if !core.contains(v, tol)? {
        return Err(Error::OutsideCore);
    }
    a.with_semiring(core.algebra).apply(v)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PeriodicityClass {
    Irreducible,
    UltimatelyPeriodic,
    OrbitPeriodicCandidate,
    ColumnPeriodic,
    General,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PeriodicityReport {
    pub class: PeriodicityClass,
    pub horizon: usize,
    /// Per column: `(threshold, period)` of the normalized column sequence,
    /// when detected within the horizon.
    pub column_periods: Vec<Option<(usize, usize)>>,
    /// Least `t` with `span(A^t) = core(A)`, if reached at the horizon.
    pub stabilization: Option<usize>,
    /// Largest residuation gap between a normalized column of `A^t` and the
    /// core, at the horizon.
    pub gap_at_horizon: f64,
    pub undetermined_at_horizon: bool,
}

/// Ray equality without an absolute floor: equal supports and entrywise
/// relative agreement, so slowly decaying entries are never mistaken for zero.
fn strict_ray_eq(x: &[f64], y: &[f64]) -> bool {
    x.iter()
        .zip(y)
        .all(|(a, b)| (*a == 0.0) == (*b == 0.0) && (a - b).abs() <= 1e-9 * a.abs().max(b.abs()))
}

/// Threshold and period of a ray sequence whose first entry is power 1, so
/// the 1-based threshold is itself a power.
fn ray_period(seq: &[Vec<f64>]) -> Option<(usize, usize)> {
    crate::oracle::detect_period(seq, |a, b| strict_ray_eq(a, b)).ok()
}

fn normalize_in_place(x: &mut [f64]) -> bool {
    let m = x.iter().copied().fold(0.0, f64::max);
    if m > 0.0 {
        x.iter_mut().for_each(|v| *v /= m);
    }
    // a nonzero entry that underflowed makes the sequence useless
    !x.iter().any(|v| *v != 0.0 && *v < 1e-280)
}

/// Orbit of `x` under `A`, normalized at every step.
fn normalized_orbit(a: &Matrix, x: &[f64], horizon: usize) -> Option<Vec<Vec<f64>>> {
    let mut cur = x.to_vec();
    let mut out = Vec::with_capacity(horizon);
    for _ in 0..horizon {
        let v = Vector::new(cur).ok()?;
        let mut next = a.apply(&v).ok()?.into_inner();
        if !normalize_in_place(&mut next) {
            return None;
        }
        out.push(next.clone());
        cur = next;
    }
    Some(out)
}

/// Sorts a max-algebraic matrix into the periodicity classes of max algebra.
///
/// Column periodicity needs, for every column, a common growth rate of all its
/// nonzero entries (the largest Perron root on paths into the column); the
/// normalized column sequence must then repeat within the horizon.
pub fn classify_periodicity(
    a: &Matrix,
    horizon: usize,
    probes: &[Vector],
    tol: &Tolerance,
) -> Result<PeriodicityReport> {
    if a.semiring() == Semiring::PlusTimes {
        return Err(Error::MaxTimesOnly("periodicity classification"));
    }
    let n = a.dim();
    let a = a.with_semiring(Semiring::MaxTimes);
    let data = analyze_spectrum(&a, Semiring::MaxTimes, tol)?;
    let fnf = &data.fnf;
    let r = fnf.class_count();
    let lambda = max_cycle_mean_with(&a, tol);

    // growth rate of entry (i, j): largest Perron root of a nontrivial class
    // on a path from i to j
    let rate = |ci: usize, cj: usize| -> f64 {
        (0..r)
            .filter(|&l| fnf.class_kind[l] == ClassKind::Nontrivial && fnf.accesses(ci, l) && fnf.accesses(l, cj))
            .map(|l| data.classes[l].rho_max)
            .fold(0.0, f64::max)
    };
    let analytic_column_periodic = (0..n).all(|j| {
        let rates: Vec<f64> = (0..n)
            .map(|i| rate(fnf.class_of[i], fnf.class_of[j]))
            .filter(|x| *x > 0.0)
            .collect();
        rates.windows(2).all(|w| tol.eq(w[0], w[1]))
    });

    let column_periods: Vec<Option<(usize, usize)>> = (0..n)
        .map(|j| normalized_orbit(&a, &Vector::unit(n, j), horizon).and_then(|s| ray_period(&s)))
        .collect();
    let empirical_column_periodic = column_periods.iter().all(Option::is_some);

    let (stabilization, gap_at_horizon) = stabilization(&a, &data, horizon, tol)?;

    let irreducible = r == 1;
    let ultimately_periodic = (0..r)
        .filter(|&l| fnf.class_kind[l] == ClassKind::Nontrivial)
        .all(|l| tol.eq(data.classes[l].rho_max, lambda));

    let mut undetermined = false;
    let class = if irreducible {
        PeriodicityClass::Irreducible
    } else if ultimately_periodic {
        PeriodicityClass::UltimatelyPeriodic
    } else if analytic_column_periodic {
        if !empirical_column_periodic {
            undetermined = true;
            PeriodicityClass::General
        } else if !probes.is_empty()
            && probes.iter().all(|p| {
                normalized_orbit(&a, p, horizon)
                    .and_then(|s| ray_period(&s))
                    .is_some()
            })
        {
            PeriodicityClass::OrbitPeriodicCandidate
        } else {
            PeriodicityClass::ColumnPeriodic
        }
    } else {
        PeriodicityClass::General
    };

    Ok(PeriodicityReport {
        class,
        horizon,
        column_periods,
        stabilization,
        gap_at_horizon,
        undetermined_at_horizon: undetermined,
    })
}

/// First `t ≤ horizon` with `span(A^t) = core(A)` and the residuation gap at
/// the horizon. Membership uses no absolute floor.
fn stabilization(a: &Matrix, data: &SpectralData, horizon: usize, tol: &Tolerance) -> Result<(Option<usize>, f64)> {
    let n = a.dim();
    let strict = Tolerance::new(tol.rel_eps, 0.0)?;
    let core = crate::cores::core_from_spectrum(data)?;
    let core_vectors = core.vectors();
    let lambda = data.spectrum().first().copied().unwrap_or(1.0);
    let scaled = a.scaled(1.0 / lambda);

    let mut cols: Vec<Vec<f64>> = (0..n).map(|j| Vector::unit(n, j).into_inner()).collect();
    let mut found = None;
    let mut gap = 0.0;
    for t in 1..=horizon {
        for c in cols.iter_mut() {
            let mut next = scaled.apply(&Vector::from_vec_unchecked(c.clone()))?.into_inner();
            normalize_in_place(&mut next);
            *c = next;
        }
        let columns: Vec<Vector> = cols.iter().map(|c| Vector::from_vec_unchecked(c.clone())).collect();
        if found.is_none() {
            let span_in_core = columns.iter().all(|c| {
                c.max_entry() == 0.0
                    || membership(&core_vectors, c, Semiring::MaxTimes, &strict)
                        .map(|m| m.is_inside())
                        .unwrap_or(false)
            });
            let core_in_span = core_vectors.iter().all(|v| {
                membership(&columns, v, Semiring::MaxTimes, &strict)
                    .map(|m| m.is_inside())
                    .unwrap_or(false)
            });
            if span_in_core && core_in_span {
                found = Some(t);
            }
        }
        if t == horizon {
            gap = columns
                .iter()
                .map(|c| residuation_gap(&core_vectors, c))
                .fold(0.0, f64::max);
        }
    }
    Ok((found, gap))
}

/// `max_i (z_i − y_i)` for the greatest max combination `y ≤ z` of `gens`.
fn residuation_gap(gens: &[Vector], z: &[f64]) -> f64 {
    let n = z.len();
    let mut best = vec![0.0f64; n];
    for g in gens {
        let alpha = (0..n)
            .filter(|&j| g[j] > 0.0)
            .map(|j| z[j] / g[j])
            .fold(f64::INFINITY, f64::min);
        if alpha.is_finite() {
            for j in 0..n {
                best[j] = best[j].max(alpha * g[j]);
            }
        }
    }
    (0..n)
        .map(|i| z[i] - best[i])
        .max_by(|a, b| a.partial_cmp(b).unwrap_or(Ordering::Equal))
        .unwrap_or(0.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(rows: &[&[f64]], sr: Semiring) -> Matrix {
        Matrix::from_rows(&rows.iter().map(|r| r.to_vec()).collect::<Vec<_>>(), sr).unwrap()
    }

    #[test]
    fn permutation_core_and_action() {
        let tol = Tolerance::default();
        for sr in [Semiring::MaxTimes, Semiring::PlusTimes] {
            let a = m(&[&[0.0, 1.0], &[1.0, 0.0]], sr);
            let core = compute_core(&a, sr, &tol).unwrap();
            assert_eq!(core.census, 2);
            assert_eq!(core.orbits.len(), 1);
            assert_eq!(core.orbits[0].members.len(), 2);
            assert_eq!(act(&a, &core, &Vector::unit(2, 0), &tol).unwrap(), Vector::unit(2, 1));
            assert_eq!(act(&a, &core, &Vector::unit(2, 1), &tol).unwrap(), Vector::unit(2, 0));
            assert_eq!(act(&a, &core, &Vector::zeros(2), &tol).unwrap(), Vector::zeros(2));
        }
    }

    #[test]
    fn nilpotent_core_is_zero() {
        let tol = Tolerance::default();
        let a = m(&[&[0.0, 1.0], &[0.0, 0.0]], Semiring::MaxTimes);
        let core = compute_core(&a, Semiring::MaxTimes, &tol).unwrap();
        assert!(core.is_zero());
        assert_eq!(core.census, 0);
        assert_eq!(core.sigma_lambda, 1);
        assert_eq!(
            act(&a, &core, &Vector::unit(2, 0), &tol).unwrap_err(),
            Error::OutsideCore
        );
    }

    #[test]
    fn classifier_refuses_plus_times() {
        let a = m(&[&[1.0]], Semiring::PlusTimes);
        assert!(matches!(
            classify_periodicity(&a, 10, &[], &Tolerance::default()),
            Err(Error::MaxTimesOnly(_))
        ));
    }

    #[test]
    fn classifier_on_small_cases() {
        let tol = Tolerance::default();
        let cyc = m(&[&[0.0, 2.0], &[0.5, 0.0]], Semiring::MaxTimes);
        let rep = classify_periodicity(&cyc, 20, &[], &tol).unwrap();
        assert_eq!(rep.class, PeriodicityClass::Irreducible);
        assert_eq!(rep.stabilization, Some(1));

        // two loops of equal weight joined by an edge
        let up = m(&[&[1.0, 0.5], &[0.0, 1.0]], Semiring::MaxTimes);
        assert_eq!(
            classify_periodicity(&up, 20, &[], &tol).unwrap().class,
            PeriodicityClass::UltimatelyPeriodic
        );

        // rates 1 and 0.5 mixed in column 1
        let gen = m(&[&[0.5, 1.0], &[0.0, 1.0]], Semiring::MaxTimes);
        let rep = classify_periodicity(&gen, 20, &[], &tol).unwrap();
        assert_eq!(rep.class, PeriodicityClass::ColumnPeriodic);

        let mixed = m(&[&[0.5, 0.0], &[1.0, 1.0]], Semiring::MaxTimes);
        let rep = classify_periodicity(&mixed, 20, &[], &tol).unwrap();
        assert_eq!(rep.class, PeriodicityClass::General);
        assert_eq!(rep.stabilization, None);

        let probes = [Vector::ones(2)];
        assert_eq!(
            classify_periodicity(&gen, 20, &probes, &tol).unwrap().class,
            PeriodicityClass::OrbitPeriodicCandidate
        );
    }
}
