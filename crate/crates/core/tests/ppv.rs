use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sfq_ecc::ppv::{monte_carlo, run_trial, ChipInstance, Margins, PpvConfig, Setup, SETUPS};

fn cfg(rho: f64, misfire: f64, seed: u64) -> PpvConfig {
    PpvConfig {
        margins: Margins::uniform(rho),
        misfire,
        seed,
        chips: 200,
        ..PpvConfig::default()
    }
}

#[test]
fn cdfs_are_monotone_and_end_at_one() {
    for name in SETUPS {
        let cdf = monte_carlo(&Setup::named(name).unwrap(), &cfg(0.17, 0.02, 1)).unwrap();
        assert_eq!(cdf.points.len(), 101);
        assert!(
            cdf.points.windows(2).all(|w| w[0].cdf <= w[1].cdf),
            "{name}"
        );
        assert_eq!(cdf.points.last().unwrap().cdf, 1.0);
    }
}

#[test]
fn same_seed_same_series() {
    let setup = Setup::named("hamming74").unwrap();
    let a = monte_carlo(&setup, &cfg(0.18, 0.05, 9)).unwrap();
    let b = monte_carlo(&setup, &cfg(0.18, 0.05, 9)).unwrap();
    let c = monte_carlo(&setup, &cfg(0.18, 0.05, 10)).unwrap();
    assert_eq!(a.to_csv(), b.to_csv());
    assert_ne!(a.histogram, c.histogram);
}

fn mean_and_se(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

/// Paired over seeds: `better` should not have a lower zero-error rate
/// than `worse` at 95% confidence.
fn assert_not_worse(
    setup: &Setup,
    better: impl Fn(u64) -> PpvConfig,
    worse: impl Fn(u64) -> PpvConfig,
) {
    let diffs: Vec<f64> = (0..12)
        .map(|s| {
            monte_carlo(setup, &better(s)).unwrap().zero_error_prob
                - monte_carlo(setup, &worse(s)).unwrap().zero_error_prob
        })
        .collect();
    let (mean, se) = mean_and_se(&diffs);
    assert!(
        mean + 1.96 * se >= 0.0,
        "{}: mean {mean} se {se}",
        setup.name
    );
}

#[test]
fn more_misfire_never_helps() {
    for name in SETUPS {
        let setup = Setup::named(name).unwrap();
        assert_not_worse(&setup, |s| cfg(0.18, 0.01, s), |s| cfg(0.18, 0.05, s));
    }
}

#[test]
fn smaller_margin_never_helps() {
    for name in SETUPS {
        let setup = Setup::named(name).unwrap();
        assert_not_worse(&setup, |s| cfg(0.19, 0.02, s), |s| cfg(0.17, 0.02, s));
    }
}

#[test]
fn one_flipping_output_is_corrected_but_not_on_the_baseline() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let c = cfg(0.0, 1.0, 0);
    for name in SETUPS {
        let setup = Setup::named(name).unwrap();
        for chip in 0..50 {
            let out = setup.netlist.outputs[rng.random_range(0..setup.netlist.outputs.len())];
            let instance = ChipInstance::with_faulty(&setup.netlist, chip, &[out.0]);
            let n = run_trial(&setup, &instance, &c);
            if name == "none" {
                assert_eq!(n, 100);
            } else {
                assert_eq!(n, 0, "{name}");
            }
        }
    }
}

/// With one faulty output at misfire q, every message is wrong with
/// probability q, so N averages 100 q.
#[test]
fn baseline_error_count_expectation() {
    let setup = Setup::baseline(4).unwrap();
    let q = 0.5;
    let c = cfg(0.0, q, 21);
    let out = setup.netlist.outputs[1].0;
    let counts: Vec<f64> = (0..10_000)
        .map(|i| {
            run_trial(
                &setup,
                &ChipInstance::with_faulty(&setup.netlist, i, &[out]),
                &c,
            ) as f64
        })
        .collect();
    let (mean, se) = mean_and_se(&counts);
    assert!((mean - 100.0 * q).abs() < 4.0 * se, "mean {mean} se {se}");
}

#[test]
fn no_faults_no_errors() {
    for name in SETUPS {
        let setup = Setup::named(name).unwrap();
        let cdf = monte_carlo(&setup, &cfg(0.2, 1.0, 3)).unwrap();
        assert_eq!(cdf.zero_error_prob, 1.0);
    }
}
