mod common;

use common::{close, close_rays, example1, example2, same_rays, GOLDEN};
use tropicore::algebra::{same_cone, Semiring, Tolerance, Vector};
use tropicore::cores::{act, classify_periodicity, compute_core, PeriodicityClass};
use tropicore::eigencones::analyze_spectrum;
use tropicore::oracle::{brute_core, probe_vectors, random_discrete, verify_bundle, VerifyConfig, CHECK_TOL};
use tropicore::report::{build_report, ReportOptions};
use tropicore::spectral::{perron_pair, spectrum};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[test]
fn example1_max_eigencones_of_powers() {
    let tol = Tolerance::default();
    let data = analyze_spectrum(&example1(Semiring::MaxTimes), Semiring::MaxTimes, &tol).unwrap();
    let ones: [&[f64]; 1] = [&[0.0, 1.0, 1.0, 1.0, 1.0]];
    assert!(same_rays(&data.eigencone(1.0, 1).unwrap().vectors(), &ones, GOLDEN));
    assert!(same_rays(&data.eigencone(1.0, 3).unwrap().vectors(), &ones, GOLDEN));
    let two: [&[f64]; 2] = [&[0.0, 1.0, 0.8797, 1.0, 0.8797], &[0.0, 0.8797, 1.0, 0.8797, 1.0]];
    assert!(same_rays(&data.eigencone(1.0, 2).unwrap().vectors(), &two, GOLDEN));
    assert_eq!(data.eigencone(1.0, 4).unwrap().generators.len(), 4);
}

#[test]
fn example1_nonneg_perron_data() {
    let a = example1(Semiring::PlusTimes);
    let tol = Tolerance::default();
    let s = spectrum(&a, Semiring::PlusTimes, &tol);
    assert_eq!(s.len(), 1);
    assert!((s[0] - 2.2101).abs() < 1e-4, "{s:?}");
    let cone = analyze_spectrum(&a, Semiring::PlusTimes, &tol).unwrap().eigencone(s[0], 1).unwrap();
    assert_eq!(cone.generators.len(), 1);
    assert!(close_rays(&cone.generators[0].vector, &[0.0, 0.5750, 0.5107, 0.4593, 0.4445], GOLDEN));

    let scaled = a.scaled(1.0 / s[0]).power(12).unwrap();
    let printed = [
        [0.2752, 0.2711, 0.3453, 0.2693],
        [0.2444, 0.2408, 0.3067, 0.2392],
        [0.2198, 0.2165, 0.2759, 0.2151],
        [0.2127, 0.2096, 0.2670, 0.2082],
    ];
    for (p, row) in printed.iter().enumerate() {
        assert!(close(&(1..5).map(|q| scaled.get(p + 1, q)).collect::<Vec<_>>(), row, 1e-4));
    }
    assert!(scaled.get(0, 0) > 0.0 && scaled.get(0, 0) < 1e-4);

    let block = a.submatrix(&[1, 2, 3, 4]);
    let (rho, _) = perron_pair(&block);
    assert!((rho - s[0]).abs() < 1e-12);
}

#[test]
fn example2_max_first_powers() {
    let a = example2(Semiring::MaxTimes);
    let tol = Tolerance::default();
    let data = analyze_spectrum(&a, Semiring::MaxTimes, &tol).unwrap();
    assert!(same_rays(&data.eigencone(1.0, 1).unwrap().vectors(), &[&[1.0, 1.0, 0.6718, 0.6951]], GOLDEN));
    let a2 = a.power(2).unwrap();
    let printed = [
        [1.0, 0.0, 0.0, 0.0],
        [0.0, 1.0, 0.0, 0.0],
        [0.3900, 0.6718, 0.3370, 0.1084],
        [0.6678, 0.6951, 0.2759, 0.1395],
    ];
    for (i, row) in printed.iter().enumerate() {
        assert!(close(&a2.rows()[i], row, 1e-4), "row {i}: {:?}", a2.rows()[i]);
    }
}

#[test]
fn example2_periodicity_class() {
    let a = example2(Semiring::MaxTimes);
    let tol = Tolerance::default();
    let report = classify_periodicity(&a, 60, &[], &tol).unwrap();
    assert_eq!(report.class, PeriodicityClass::ColumnPeriodic);
    assert_eq!(report.stabilization, Some(4));
    assert!(report.gap_at_horizon < 1e-9);
    // every probe orbit is periodic too, which refines the finding
    let probed = classify_periodicity(&a, 60, &probe_vectors(4, 20, 7), &tol).unwrap();
    assert_eq!(probed.class, PeriodicityClass::OrbitPeriodicCandidate);
    assert_eq!(probed.stabilization, Some(4));
}

#[test]
fn example1_is_not_column_periodic() {
    let a = example1(Semiring::MaxTimes);
    let tol = Tolerance::default();
    let report = classify_periodicity(&a, 60, &probe_vectors(5, 20, 7), &tol).unwrap();
    assert_eq!(report.class, PeriodicityClass::General);
    assert_eq!(report.stabilization, None);
    assert!(report.gap_at_horizon > 0.0);
}

#[test]
fn core_action_rotates_example1() {
    let a = example1(Semiring::MaxTimes);
    let tol = Tolerance::default();
    let core = compute_core(&a, Semiring::MaxTimes, &tol).unwrap();
    let orbit = &core.orbits[0].members;
    for (pos, &i) in orbit.iter().enumerate() {
        let image = act(&a, &core, &core.extremals[i].vector, &tol).unwrap();
        let next = orbit[(pos + 1) % orbit.len()];
        assert!(image.proportional(&core.extremals[next].vector, &tol));
        assert_eq!(core.successor[i], next);
    }
    let outside = Vector::unit(5, 0);
    assert!(act(&a, &core, &outside, &tol).is_err());
}

#[test]
fn brute_force_agrees_on_example2() {
    let tol = Tolerance::default();
    for sr in [Semiring::MaxTimes, Semiring::PlusTimes] {
        let a = example2(sr);
        let core = compute_core(&a, sr, &tol).unwrap().vectors();
        let horizon = if sr == Semiring::MaxTimes { 12 } else { 4000 };
        let brute = brute_core(&a, sr, horizon, &CHECK_TOL).unwrap();
        assert!(brute.converged);
        assert_eq!(brute.rays.len(), core.len());
        let tight = Tolerance::new(1e-6, 1e-9).unwrap();
        assert!(same_cone(&brute.rays, &core, sr, &tight));
    }
}

#[test]
fn examples_pass_every_check() {
    for sr in [Semiring::MaxTimes, Semiring::PlusTimes] {
        for (name, a) in [("example 1", example1(sr)), ("example 2", example2(sr))] {
            let report = verify_bundle(&a, sr, &VerifyConfig::default());
            let failed: Vec<_> = report.failures().map(|c| format!("{}: {}", c.name, c.detail)).collect();
            assert!(failed.is_empty(), "{name} {sr}: {failed:?}");
        }
    }
}

#[test]
fn discrete_five_by_five_passes() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for sr in [Semiring::MaxTimes, Semiring::PlusTimes] {
        let a = random_discrete(&mut rng, 5, sr);
        let report = verify_bundle(&a, sr, &VerifyConfig::default());
        assert!(report.passed(), "{:?}", report.failures().collect::<Vec<_>>());
    }
}

#[test]
fn report_censuses() {
    let tol = Tolerance::default();
    let opts = ReportOptions::default();
    let r1 = build_report(&example1(Semiring::MaxTimes), Semiring::MaxTimes, &opts, &tol).unwrap();
    assert_eq!((r1.core.census, r1.periods.sigma_lambda), (4, 4));
    for sr in [Semiring::MaxTimes, Semiring::PlusTimes] {
        let r2 = build_report(&example2(sr), sr, &opts, &tol).unwrap();
        assert_eq!(r2.core.census, 3);
        assert!(r2.passed());
    }
}
