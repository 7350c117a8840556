use feelsim_core::rng::stream;
use feelsim_core::{
    make_cue, recall_probability, recall_probability_enum, retrieve, store_trace, CueSpec,
    NoiseModel, Trace,
};

const MODELS: [NoiseModel; 2] = [NoiseModel::Flip, NoiseModel::Erase];
const THETAS: [f64; 3] = [0.0, 0.25, 0.5];

fn p_grid() -> impl Iterator<Item = f64> {
    (0..=10).map(|i| i as f64 / 10.0)
}

#[test]
fn closed_form_equals_enumeration_on_grid() {
    for n in 1..=12 {
        for model in MODELS {
            for theta in THETAS {
                for p in p_grid() {
                    let spec = CueSpec::new(model, p).unwrap();
                    let a = recall_probability(n, spec, theta).unwrap();
                    let e = recall_probability_enum(n, spec, theta).unwrap();
                    assert!(
                        (a - e).abs() <= 1e-12,
                        "n={n} {model} p={p} theta={theta}: {a} vs {e}"
                    );
                }
            }
        }
    }
}

#[test]
fn recall_probability_is_monotone() {
    for n in 1..=12 {
        for model in MODELS {
            for theta in THETAS {
                let by_p: Vec<f64> = p_grid()
                    .map(|p| recall_probability(n, CueSpec::new(model, p).unwrap(), theta).unwrap())
                    .collect();
                assert!(
                    by_p.windows(2).all(|w| w[0] <= w[1]),
                    "n={n} {model} theta={theta}"
                );
            }
            for p in p_grid() {
                let spec = CueSpec::new(model, p).unwrap();
                let by_theta: Vec<f64> = THETAS
                    .iter()
                    .map(|&t| recall_probability(n, spec, t).unwrap())
                    .collect();
                assert!(
                    by_theta.windows(2).all(|w| w[0] >= w[1]),
                    "n={n} {model} p={p}"
                );
            }
        }
    }
}

fn empirical(n: usize, spec: CueSpec, theta: f64, trials: usize, seed: u64) -> f64 {
    let mut rng = stream(seed, &[]);
    let trace = Trace::random(n, &mut rng).unwrap();
    let cell = store_trace("mc", trace.clone(), theta).unwrap();
    let hits = (0..trials)
        .filter(|_| {
            let cue = make_cue(&trace, spec, &mut rng);
            let out = retrieve(&cell, &cue).unwrap();
            if let Some(o) = &out.output {
                assert_eq!(o, &trace);
            }
            out.is_recalled()
        })
        .count();
    hits as f64 / trials as f64
}

#[test]
fn monte_carlo_frequency_within_four_sigma() {
    let trials = 100_000;
    let cases = [
        (7, NoiseModel::Flip, 0.6, 0.0),
        (16, NoiseModel::Flip, 0.55, 0.25),
        (10, NoiseModel::Erase, 0.3, 0.25),
        (32, NoiseModel::Flip, 0.7, 0.5),
    ];
    for (i, (n, model, p, theta)) in cases.into_iter().enumerate() {
        let spec = CueSpec::new(model, p).unwrap();
        let exact = recall_probability(n, spec, theta).unwrap();
        let freq = empirical(n, spec, theta, trials, 1000 + i as u64);
        let sigma = (exact * (1.0 - exact) / trials as f64).sqrt();
        assert!(
            (freq - exact).abs() <= 4.0 * sigma,
            "n={n} {model} p={p} theta={theta}: freq {freq} vs exact {exact} (sigma {sigma})"
        );
    }
}

#[test]
fn same_seed_same_cues() {
    let trace = Trace::random(24, &mut stream(5, &[])).unwrap();
    let spec = CueSpec::new(NoiseModel::Flip, 0.5).unwrap();
    let a: Vec<_> = {
        let mut rng = stream(77, &[]);
        (0..50).map(|_| make_cue(&trace, spec, &mut rng)).collect()
    };
    let b: Vec<_> = {
        let mut rng = stream(77, &[]);
        (0..50).map(|_| make_cue(&trace, spec, &mut rng)).collect()
    };
    assert_eq!(a, b);
}
