//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any fails.

use std::collections::BTreeSet;
use std::process::{Command, ExitCode};
use std::time::Instant;

use feelsim_core::rng::KeyedStreams;
use feelsim_core::scenario::builtin;
use feelsim_core::scenario::checks::fok_violations;
use feelsim_core::{
    loop_success_probability, reachable_kinds, recall_probability, recall_probability_enum,
    run_implicit_loop, run_scenario, store_trace, summarize, sweep, CueSpec, EventKind, EventLog,
    Grid, LoopConfig, LoopStatus, NoiseModel, ScenarioConfig, SeedScheme, SweepParam, Trace,
};

const ORACLE_TOL: f64 = 1e-12;
const ORACLE_BUDGET_S: f64 = 5.0;
const SPOT_TOL: f64 = 1e-12;
const LOOP_RUNS: u64 = 10_000;
const LOOP_SIGMAS: f64 = 4.0;
const LOOP_BUDGET_S: f64 = 10.0;
const SEEDS: u64 = 100;
const DECAY_TOL: f64 = 1e-9;
const DECAY_LAG_S: f64 = 60.0;
const OVERNIGHT_SEEDS: u64 = 1_000;
const SIGN_TEST_ALPHA: f64 = 0.01;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn with_seed(config: &ScenarioConfig, seed: u64) -> ScenarioConfig {
    let mut c = config.clone();
    c.seed = seed;
    c
}

fn builtin_config(name: &str) -> ScenarioConfig {
    builtin::get(name).unwrap_or_else(|| panic!("builtin `{name}` is missing"))
}

fn oracle_grid() -> Outcome {
    let start = Instant::now();
    let mut worst = 0.0f64;
    let mut cases = 0;
    for n in 1..=12 {
        for model in [NoiseModel::Flip, NoiseModel::Erase] {
            for theta in [0.0, 0.25, 0.5] {
                for i in 0..=10 {
                    let p = i as f64 / 10.0;
                    let spec = CueSpec::new(model, p).map_err(|e| e.to_string())?;
                    let a = recall_probability(n, spec, theta).map_err(|e| e.to_string())?;
                    let e = recall_probability_enum(n, spec, theta).map_err(|e| e.to_string())?;
                    worst = worst.max((a - e).abs());
                    cases += 1;
                    if (a - e).abs() > ORACLE_TOL {
                        return Err(format!("N={n} {model} p={p} theta={theta}: {a} vs {e}"));
                    }
                }
            }
        }
    }
    let secs = start.elapsed().as_secs_f64();
    if secs >= ORACLE_BUDGET_S {
        return Err(format!("took {secs:.2} s"));
    }
    Ok(format!(
        "{cases} cases, max |diff| {worst:.1e}, {secs:.2} s"
    ))
}

fn spot_values() -> Outcome {
    let flip = |p| CueSpec::new(NoiseModel::Flip, p).unwrap();
    let a = recall_probability(7, flip(0.6), 0.0).map_err(|e| e.to_string())?;
    let b = recall_probability(2, flip(0.5), 0.0).map_err(|e| e.to_string())?;
    let b_enum = recall_probability_enum(2, flip(0.5), 0.0).map_err(|e| e.to_string())?;
    if (a - 0.710208).abs() > SPOT_TOL {
        return Err(format!("N=7 p=0.6 gave {a}"));
    }
    if (b - 0.25).abs() > SPOT_TOL || (b_enum - 0.25).abs() > SPOT_TOL {
        return Err(format!("N=2 p=0.5 gave {b} (enumerated {b_enum})"));
    }
    Ok(format!("{a:.6}, {b:.2}"))
}

fn loop_consistency() -> Outcome {
    let start = Instant::now();
    // Each cell's single-attempt probability equals the target exactly.
    let cases = [
        (0.25, 10.0, 0.5, vec![1i8, -1], NoiseModel::Flip, 0.5),
        (0.1, 5.0, 2.0, vec![1], NoiseModel::Erase, 0.1),
        (
            0.710208,
            10.0,
            0.3,
            vec![1, -1, 1, 1, -1, 1, -1],
            NoiseModel::Flip,
            0.6,
        ),
    ];
    let mut notes = Vec::new();
    for (i, (p_single, f, t0, components, model, p)) in cases.into_iter().enumerate() {
        let n = components.len();
        let cell = store_trace("c", Trace::new(components).unwrap(), 0.0).unwrap();
        let spec = CueSpec::new(model, p).unwrap();
        let exact_single = recall_probability(n, spec, 0.0).unwrap();
        if (exact_single - p_single).abs() > SPOT_TOL {
            return Err(format!(
                "cell {i} has P_single {exact_single}, wanted {p_single}"
            ));
        }
        let cfg = LoopConfig::new(f, t0, 0.0).map_err(|e| e.to_string())?;
        let expected = loop_success_probability(p_single, f, t0).unwrap();
        let hits = (0..LOOP_RUNS)
            .filter(|&run| {
                let streams = KeyedStreams::new(run, &[i as u64]);
                run_implicit_loop(&cell, spec, &cfg, &streams, 0.0, &mut ())
                    .map(|o| o.status == LoopStatus::RecalledImplicit && o.t_end <= t0)
                    .unwrap_or(false)
            })
            .count();
        let freq = hits as f64 / LOOP_RUNS as f64;
        let sigma = (expected * (1.0 - expected) / LOOP_RUNS as f64).sqrt();
        let z = (freq - expected) / sigma;
        if z.abs() > LOOP_SIGMAS {
            return Err(format!(
                "({p_single}, {f}, {t0}): {freq} vs {expected} (z = {z:.2})"
            ));
        }
        notes.push(format!("z={z:+.2}"));
    }
    let secs = start.elapsed().as_secs_f64();
    if secs >= LOOP_BUDGET_S {
        return Err(format!("took {secs:.2} s"));
    }
    Ok(format!("{}, {secs:.2} s", notes.join(" ")))
}

fn fok_biconditional() -> Outcome {
    let mut runs = 0;
    let mut foks = 0;
    for config in builtin::all() {
        for seed in 0..SEEDS {
            let c = with_seed(&config, seed);
            let log = run_scenario(&c).map_err(|e| e.to_string())?;
            let v = fok_violations(&c, &log);
            if !v.is_empty() {
                return Err(format!("{:?} seed {seed}: {}", c.name, v.join("; ")));
            }
            foks += log.of_kind(EventKind::Fok).count();
            runs += 1;
        }
    }
    Ok(format!("{runs} runs, {foks} fok events, 0 violations"))
}

fn chekhov_ordering() -> Outcome {
    let config = builtin_config("chekhov_tot");
    let category = &config.categories[0];
    let onset = config.episodes[0].at;
    let closed_form = |t: f64| category.b0 * (-(t - onset) / category.tau_b).exp();
    let mut decisive = 0;
    for seed in 0..SEEDS {
        let log = run_scenario(&with_seed(&config, seed)).map_err(|e| e.to_string())?;
        let first = |k: EventKind| log.of_kind(k).next();
        let (Some(fast), Some(slow)) = (first(EventKind::FastAction), first(EventKind::SlowAction))
        else {
            return Err(format!("seed {seed}: missing fast or slow action"));
        };
        if fast.t >= slow.t {
            return Err(format!(
                "seed {seed}: fast_action at {} after slow_action at {}",
                fast.t, slow.t
            ));
        }
        let recalled =
            first(EventKind::Recalled).ok_or_else(|| format!("seed {seed}: never recalled"))?;
        let t = recalled.t.secs();
        if let Some(hint) = log
            .of_kind(EventKind::HintApplied)
            .find(|h| h.get_f64("p_hinted") == Some(1.0))
        {
            decisive += 1;
            let lag = t - hint.t.secs();
            if !(0.0..=1.0 / config.f).contains(&lag) {
                return Err(format!(
                    "seed {seed}: recalled {lag} s after the decisive hint"
                ));
            }
        }
        let b = recalled.get_f64("b").ok_or("recalled without b")?;
        if (b - closed_form(t)).abs() > DECAY_TOL {
            return Err(format!(
                "seed {seed}: b = {b}, closed form {}",
                closed_form(t)
            ));
        }
        if b <= closed_form(t + DECAY_LAG_S) {
            return Err(format!("seed {seed}: b did not decay over {DECAY_LAG_S} s"));
        }
    }
    Ok(format!(
        "{SEEDS} seeds, {decisive} recalls after the decisive hint"
    ))
}

fn fear_after_stimulus() -> Outcome {
    let config = builtin_config("fear_flash");
    let mut foks = 0;
    let mut early_fast = 0;
    for seed in 0..SEEDS {
        let log = run_scenario(&with_seed(&config, seed)).map_err(|e| e.to_string())?;
        for (ep, spec) in config.episodes.iter().enumerate() {
            let events: Vec<_> = log.episode(ep as u64).collect();
            let off = events
                .iter()
                .find(|e| e.kind == EventKind::StimulusOff)
                .ok_or("missing stimulus_off")?
                .t;
            for fok in events.iter().filter(|e| e.kind == EventKind::Fok) {
                foks += 1;
                if fok.t < off {
                    return Err(format!(
                        "seed {seed}: fok at {} before stimulus_off at {off}",
                        fok.t
                    ));
                }
            }
            if config.t_fast < spec.duration {
                early_fast += events
                    .iter()
                    .filter(|e| e.kind == EventKind::FastAction && e.t < off)
                    .count();
            }
        }
    }
    if early_fast == 0 {
        return Err("no fast_action before stimulus_off".into());
    }
    Ok(format!(
        "{foks} fok events after offset, {early_fast} fast actions before it"
    ))
}

fn kinds_of(log: &EventLog, episode: usize) -> BTreeSet<EventKind> {
    log.episode(episode as u64).map(|e| e.kind).collect()
}

fn non_gating() -> Outcome {
    let mut realized = 0;
    for config in builtin::all() {
        let at = |b0: f64| {
            let mut c = config.clone();
            c.categories.iter_mut().for_each(|k| k.b0 = b0);
            c
        };
        let (calm, moved) = (at(0.0), at(1.0));
        for ep in 0..config.episodes.len() {
            let a = reachable_kinds(&calm, ep).map_err(|e| e.to_string())?;
            let b = reachable_kinds(&moved, ep).map_err(|e| e.to_string())?;
            if a != b {
                return Err(format!("{:?} episode {ep}: {a:?} vs {b:?}", config.name));
            }
        }
        // Realized kinds on each stimulus's first episode, where no earlier
        // mood-dependent consolidation has shifted p_base.
        let mut seen = BTreeSet::new();
        let firsts: Vec<usize> = (0..config.episodes.len())
            .filter(|&i| seen.insert(config.episodes[i].stimulus.clone()))
            .collect();
        for seed in 0..SEEDS {
            let la = run_scenario(&with_seed(&calm, seed)).map_err(|e| e.to_string())?;
            let lb = run_scenario(&with_seed(&moved, seed)).map_err(|e| e.to_string())?;
            for &ep in &firsts {
                if kinds_of(&la, ep) != kinds_of(&lb, ep) {
                    return Err(format!(
                        "{:?} seed {seed} episode {ep}: {:?} vs {:?}",
                        config.name,
                        kinds_of(&la, ep),
                        kinds_of(&lb, ep)
                    ));
                }
                realized += 1;
            }
        }
    }
    Ok(format!(
        "reachable sets equal; {realized} paired first episodes equal"
    ))
}

/// `chekhov_tot` with a ten-second explicit window and one early hint, so
/// recall rates stay away from 1.
fn short_window_chekhov() -> ScenarioConfig {
    let mut c = builtin_config("chekhov_tot");
    c.t_explicit_max = 10.0;
    c.hints.truncate(1);
    c.hints[0].at = 6.0;
    c.hints[0].delta_p = 0.1;
    c
}

fn monotonicity() -> Outcome {
    let config = short_window_chekhov();
    let runs = 200;
    let mut report = Vec::new();
    for (param, values) in [
        (SweepParam::PBase, vec![0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9]),
        (SweepParam::DeltaP, vec![0.0, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6]),
    ] {
        let mut c = config.clone();
        if param == SweepParam::DeltaP {
            c.episodes[0].p_base = 0.3;
        }
        let grid = Grid::single(param, values).map_err(|e| e.to_string())?;
        let table = sweep(&c, &grid, runs, SeedScheme::Paired).map_err(|e| e.to_string())?;
        let rates: Vec<f64> = table.rows.iter().map(|r| r.recall_rate).collect();
        if rates.windows(2).any(|w| w[1] < w[0]) {
            return Err(format!("{} rates {rates:?}", param.name()));
        }
        if rates.first() == rates.last() {
            return Err(format!("{} sweep is flat at {rates:?}", param.name()));
        }
        let fmt: Vec<String> = rates.iter().map(|r| format!("{r:.3}")).collect();
        report.push(format!("{} [{}]", param.name(), fmt.join(" ")));
    }
    Ok(report.join("; "))
}

fn cli_determinism() -> Outcome {
    let run = || {
        let out = Command::new(env!("CARGO_BIN_EXE_feelsim"))
            .args(["run", "--config", "chekhov_tot", "--seed", "42"])
            .output()
            .map_err(|e| e.to_string())?;
        if !out.status.success() {
            return Err(format!(
                "exit {:?}: {}",
                out.status.code(),
                String::from_utf8_lossy(&out.stderr)
            ));
        }
        Ok(out.stdout)
    };
    let (a, b) = (run()?, run()?);
    if a.is_empty() || a != b {
        return Err(format!("outputs differ ({} vs {} bytes)", a.len(), b.len()));
    }
    Ok(format!("{} identical bytes", a.len()))
}

/// One-sided sign test: P(X >= wins) for X ~ Binomial(n, 1/2).
fn sign_test_p(wins: u64, n: u64) -> f64 {
    let ln_half_n = n as f64 * 0.5f64.ln();
    let mut ln_choose = 0.0;
    let mut total = 0.0;
    for k in 0..=n {
        if k > 0 {
            ln_choose += ((n - k + 1) as f64).ln() - (k as f64).ln();
        }
        if k >= wins {
            total += (ln_choose + ln_half_n).exp();
        }
    }
    total.min(1.0)
}

fn overnight() -> Outcome {
    let config = builtin_config("overnight");
    if config.delta_c <= 0.0 {
        return Err("delta_c must be positive".into());
    }
    let (mut day1, mut day2) = (Vec::new(), Vec::new());
    let (mut faster, mut slower) = (0u64, 0u64);
    for seed in 0..OVERNIGHT_SEEDS {
        let s = summarize(&run_scenario(&with_seed(&config, seed)).map_err(|e| e.to_string())?)
            .map_err(|e| e.to_string())?;
        let (Some(a), Some(b)) = (
            s.episodes[0].recall_latency_s,
            s.episodes[1].recall_latency_s,
        ) else {
            return Err(format!("seed {seed}: an episode ended without recall"));
        };
        day1.push(a);
        day2.push(b);
        if b < a {
            faster += 1;
        } else if b > a {
            slower += 1;
        }
    }
    let mean = |v: &[f64]| v.iter().sum::<f64>() / v.len() as f64;
    let (m1, m2) = (mean(&day1), mean(&day2));
    let p = sign_test_p(faster, faster + slower);
    if m2 >= m1 {
        return Err(format!(
            "day-2 mean {m2:.4} s not below day-1 mean {m1:.4} s"
        ));
    }
    if p >= SIGN_TEST_ALPHA {
        return Err(format!(
            "sign test p = {p:.3e} ({faster} faster, {slower} slower)"
        ));
    }
    Ok(format!(
        "mean latency {m1:.3} s -> {m2:.3} s, {faster} faster / {slower} slower, sign test p = {p:.1e}"
    ))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 10] = [
        ("oracle equivalence", oracle_grid),
        ("spot values", spot_values),
        ("loop-level consistency", loop_consistency),
        ("fok biconditional", fok_biconditional),
        ("chekhov_tot ordering", chekhov_ordering),
        ("fear after stimulus", fear_after_stimulus),
        ("mood does not gate", non_gating),
        ("paired monotonicity", monotonicity),
        ("cli determinism", cli_determinism),
        ("overnight consolidation", overnight),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        match check() {
            Ok(detail) => println!("criterion {:>2} PASS {name}: {detail}", i + 1),
            Err(detail) => {
                failed += 1;
                println!("criterion {:>2} FAIL {name}: {detail}", i + 1);
            }
        }
    }
    println!(
        "acceptance: {} passed, {failed} failed",
        criteria.len() - failed
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
