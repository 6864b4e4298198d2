use deqjump::diffusion::{mean_x, total_mass, transient_density, variance_x, DiffusionParams};
use deqjump::discrete::{
    failure_probability, mean_transient, steady_state, transient_probability, DiscreteParams,
};
use deqjump::simulation::{
    estimate, estimate_many, read_traces, simulate_diffusion, simulate_diffusion_parallel,
    simulate_discrete, simulate_discrete_parallel, write_traces, EventKind, ObservedState,
    SimConfig, Statistic, TraceHeader,
};
use deqjump::{integrate_adaptive, QuadratureSpec};
use proptest::prelude::*;
use statrs::distribution::{ChiSquared, ContinuousCDF};

const SEED: u64 = 0x5eed_0001;

fn within_three(e: deqjump::EmpiricalEstimate, target: f64) -> bool {
    (e.value - target).abs() <= 3.0 * e.standard_error
}

#[test]
fn lattice_law_chi_square() {
    let p = DiscreteParams::new(2.0, 2.0, 0.1, 1.0).unwrap();
    let cfg = SimConfig::new(SEED, 100_000, vec![1.0])
        .unwrap()
        .without_events();
    let traces = simulate_discrete_parallel(&p, &cfg).unwrap();
    let q = QuadratureSpec::default();

    // cells: n in [-8, 8], F, and everything else
    let mut observed = vec![0.0; 19];
    for trace in &traces {
        let cell = match trace.observation_at(1.0).unwrap() {
            ObservedState::Site(n) if (-8..=8).contains(&n) => (n + 8) as usize,
            ObservedState::Failed => 17,
            _ => 18,
        };
        observed[cell] += 1.0;
    }
    let mut expected: Vec<f64> = (-8..=8)
        .map(|n| transient_probability(&p, n, 1.0, &q).unwrap())
        .collect();
    expected.push(failure_probability(&p, 1.0).unwrap());
    expected.push(1.0 - expected.iter().sum::<f64>());
    let reps = traces.len() as f64;
    // pool the sparse outer cell into its neighbour so every expected count is large
    let rest = expected.pop().unwrap() + expected[0];
    expected[0] = rest;
    let last = observed.pop().unwrap();
    observed[0] += last;

    let stat: f64 = observed
        .iter()
        .zip(&expected)
        .map(|(o, e)| (o - reps * e).powi(2) / (reps * e))
        .sum();
    let dof = (observed.len() - 1) as f64;
    let p_value = 1.0 - ChiSquared::new(dof).unwrap().cdf(stat);
    assert!(p_value > 1e-3, "chi2 = {stat}, p = {p_value}");
}

#[test]
fn lattice_failure_and_mean() {
    let p = DiscreteParams::new(3.0, 1.0, 1.0, 1.0).unwrap();
    let cfg = SimConfig::new(SEED + 1, 100_000, vec![1.0])
        .unwrap()
        .without_events();
    let traces = simulate_discrete_parallel(&p, &cfg).unwrap();
    let fail = estimate(&traces, 1.0, Statistic::FailureProbability).unwrap();
    assert!((failure_probability(&p, 1.0).unwrap() - 0.432332).abs() < 1e-6);
    assert!(within_three(fail, 0.432332), "{fail:?}");

    let p = DiscreteParams::new(2.0, 2.0, 0.1, 1.0).unwrap();
    let traces = simulate_discrete_parallel(&p, &cfg).unwrap();
    let est = estimate_many(
        &traces,
        1.0,
        &[Statistic::TruncatedMean, Statistic::TruncatedVariance],
    )
    .unwrap();
    assert!(
        within_three(est[0], mean_transient(&p, 1.0).unwrap()),
        "{:?}",
        est[0]
    );
    assert!(
        within_three(
            est[1],
            deqjump::discrete::variance_transient(&p, 1.0).unwrap()
        ),
        "{:?}",
        est[1]
    );
}

#[test]
fn lattice_steady_regime() {
    let p = DiscreteParams::new(2.0, 1.0, 1.0, 1.0).unwrap();
    let cfg = SimConfig::new(SEED + 2, 20_000, vec![200.0])
        .unwrap()
        .without_events();
    let traces: Vec<_> = simulate_discrete(&p, &cfg).unwrap().collect();
    let e = estimate(&traces, 200.0, Statistic::StateProbability(0)).unwrap();
    assert!(within_three(e, steady_state(&p, 0).unwrap()), "{e:?}");
}

#[test]
fn free_wiener_marginal() {
    let dp = DiffusionParams::new(3.0, 1.0, 2.0, 0.0, 1.0).unwrap();
    let cfg = SimConfig::new(SEED + 3, 100_000, vec![0.5, 1.5]).unwrap();
    let traces = simulate_diffusion_parallel(&dp, &cfg).unwrap();
    for t in [0.5, 1.5] {
        let est = estimate_many(
            &traces,
            t,
            &[Statistic::TruncatedMean, Statistic::TruncatedVariance],
        )
        .unwrap();
        assert!(within_three(est[0], 2.0 * t), "t={t} {:?}", est[0]);
        assert!(within_three(est[1], 2.0 * t), "t={t} {:?}", est[1]);
    }
    assert!(traces.iter().all(|tr| tr.events.is_empty()));
}

#[test]
fn jump_diffusion_marginal() {
    let dp = DiffusionParams::new(3.0, 1.0, 1.0, 1.0, 1.0).unwrap();
    let q = QuadratureSpec::default();
    let cfg = SimConfig::new(SEED + 4, 100_000, vec![1.0])
        .unwrap()
        .without_events();
    let traces = simulate_diffusion_parallel(&dp, &cfg).unwrap();
    let cuts = [-1.0, 0.0, 0.5, 1.5, 3.0];
    let mut stats = vec![
        Statistic::FailureProbability,
        Statistic::TruncatedMean,
        Statistic::TruncatedVariance,
    ];
    stats.extend(cuts.iter().map(|&x| Statistic::Cdf(x)));
    let est = estimate_many(&traces, 1.0, &stats).unwrap();
    assert!(within_three(est[0], 0.432332), "{:?}", est[0]);
    assert!((1.0 - est[0].value - 0.5677).abs() < 0.01);
    assert!((total_mass(&dp, 1.0, &q).unwrap() - 0.5677).abs() < 5e-4);
    assert!(within_three(est[1], 0.865), "{:?}", est[1]);
    assert!(within_three(est[1], mean_x(&dp, 1.0).unwrap()));
    assert!(
        within_three(est[2], variance_x(&dp, 1.0).unwrap()),
        "{:?}",
        est[2]
    );
    let f = |x: f64| transient_density(&dp, x, 1.0, &q).unwrap().value().unwrap();
    for (&x, e) in cuts.iter().zip(&est[3..]) {
        let cdf = if x <= 0.0 {
            integrate_adaptive(f, -15.0, x, &q).unwrap().value
        } else {
            integrate_adaptive(f, -15.0, 0.0, &q).unwrap().value
                + integrate_adaptive(f, 0.0, x, &q).unwrap().value
        };
        assert!(within_three(*e, cdf), "x={x} {e:?} vs {cdf}");
    }
}

#[test]
fn trace_file_round_trip() {
    let p = DiscreteParams::new(2.0, 2.0, 0.1, 1.0).unwrap();
    let cfg = SimConfig::new(SEED, 50, vec![0.5, 1.0]).unwrap();
    let traces: Vec<_> = simulate_discrete(&p, &cfg).unwrap().collect();
    let header = TraceHeader {
        model: "discrete".into(),
        params: serde_json::to_value(p).unwrap(),
        seed: cfg.seed,
        replications: cfg.replications,
        horizon: cfg.horizon,
        observation_times: cfg.observation_times.clone(),
    };
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("run.trace");
    write_traces(std::fs::File::create(&path).unwrap(), &header, &traces).unwrap();
    let (h, back) =
        read_traces(std::io::BufReader::new(std::fs::File::open(&path).unwrap())).unwrap();
    assert_eq!(h, header);
    assert_eq!(back, traces);
    // the header alone is enough to regenerate the run
    let p2: DiscreteParams = serde_json::from_value(h.params).unwrap();
    let cfg2 = SimConfig::new(h.seed, h.replications, h.observation_times).unwrap();
    let again: Vec<_> = simulate_discrete(&p2, &cfg2).unwrap().collect();
    assert_eq!(again, traces);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn parallel_runs_are_bit_identical(
        seed in any::<u64>(),
        l in 0.1f64..5.0, m in 0.1f64..5.0, nu in 0.0f64..2.0, eta in 0.1f64..3.0,
    ) {
        let p = DiscreteParams::new(l, m, nu, eta).unwrap();
        let cfg = SimConfig::new(seed, 64, vec![0.5, 2.0]).unwrap();
        let seq: Vec<_> = simulate_discrete(&p, &cfg).unwrap().collect();
        let pool = rayon::ThreadPoolBuilder::new().num_threads(3).build().unwrap();
        let par = pool.install(|| simulate_discrete_parallel(&p, &cfg).unwrap());
        prop_assert_eq!(&seq, &par);
        for trace in &seq {
            prop_assert!(trace.check_legal().is_ok());
            if nu == 0.0 {
                prop_assert!(trace.events.iter().all(|e| e.kind != EventKind::Catastrophe));
            }
        }
        let dp = DiffusionParams::new(l, m, 1.0, nu, eta).unwrap();
        let seq: Vec<_> = simulate_diffusion(&dp, &cfg).unwrap().collect();
        let par = pool.install(|| simulate_diffusion_parallel(&dp, &cfg).unwrap());
        prop_assert_eq!(&seq, &par);
    }

    #[test]
    fn repair_always_restarts_at_origin(seed in any::<u64>()) {
        let p = DiscreteParams::new(2.0, 1.0, 2.0, 3.0).unwrap();
        let cfg = SimConfig::new(seed, 20, vec![3.0]).unwrap();
        for trace in simulate_discrete(&p, &cfg).unwrap() {
            let mut site = 0i64;
            let mut failed = false;
            for e in &trace.events {
                match e.kind {
                    EventKind::Up => site += 1,
                    EventKind::Down => site -= 1,
                    EventKind::Catastrophe => failed = true,
                    EventKind::RepairDone => { failed = false; site = 0; }
                }
            }
            let want = if failed { ObservedState::Failed } else { ObservedState::Site(site) };
            prop_assert_eq!(trace.observation_at(3.0).unwrap(), want);
        }
    }
}
