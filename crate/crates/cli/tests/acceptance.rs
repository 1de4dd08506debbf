//! Acceptance suite: one PASS/FAIL line per criterion. Exits nonzero if any
//! criterion fails. Monte-Carlo and Gaussian-moment oracles are written out
//! here rather than taken from the library.

use std::f64::consts::PI;
use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rand_distr::StandardNormal;
use weylpath::mass_observables::{
    bare_mass_spread, BoostSpec, GaussianReference, KDistribution, Scenario, ELECTRON_MASS, HBAR_C,
};
use weylpath::trajectory::{
    check_necessary_condition, extremality_slope, integrate_trajectory, sine_bump,
    wave_sync_residual, BoostGenerator, IntegrationConfig, Trajectory,
};
use weylpath::weyl_ops::{path_transport, rect_loop_transport, translate_k, translate_x};
use weylpath::{wrap_phase, Grid, Metric, PhasePath, PhasePoint, WavePacket};

struct Outcome {
    passed: bool,
    detail: String,
}

fn packet(n: usize, length: f64) -> WavePacket {
    let grid = Grid::new(n, length).expect("grid");
    WavePacket::gaussian(&grid, 0.0, 0.0, 1.0).expect("gaussian")
}

fn criterion_1() -> Outcome {
    let psi = packet(4096, 128.0);
    let mut rng = ChaCha20Rng::seed_from_u64(1);
    let mut worst_phase: f64 = 0.0;
    let mut worst_fidelity: f64 = 1.0;
    for _ in 0..100 {
        let dx = rng.random_range(-20.0..20.0);
        let dk = rng.random_range(-20.0..20.0);
        let out = rect_loop_transport(&psi, dx, dk).expect("loop");
        worst_phase = worst_phase.max(wrap_phase(out.phase + dx * dk).abs());
        worst_fidelity = worst_fidelity.min(out.fidelity);
    }
    Outcome {
        passed: worst_phase <= 1e-10 && worst_fidelity >= 1.0 - 1e-12,
        detail: format!(
            "max |phase + dx·dk| = {worst_phase:.2e} (≤ 1e-10), min fidelity = 1 - {:.2e} (≥ 1 - 1e-12)",
            1.0 - worst_fidelity
        ),
    }
}

fn criterion_2() -> Outcome {
    let psi = packet(4096, 128.0);
    let radius = 1.0;
    let area = PI * radius * radius;
    let errors: Vec<f64> = [128, 256, 512, 1024]
        .iter()
        .map(|&n| {
            let path = PhasePath::circle(0.0, 0.0, radius, n).expect("circle");
            let out = path_transport(&psi, &path, n).expect("transport");
            (out.unwrapped_phase + area).abs()
        })
        .collect();
    let ratios: Vec<f64> = errors.windows(2).map(|w| w[0] / w[1]).collect();
    Outcome {
        passed: ratios.iter().all(|r| (r - 4.0).abs() <= 0.5),
        detail: format!(
            "|phase + πr²| = {}; ratios = {} (4 ± 0.5)",
            errors
                .iter()
                .map(|e| format!("{e:.3e}"))
                .collect::<Vec<_>>()
                .join(", "),
            ratios
                .iter()
                .map(|r| format!("{r:.4}"))
                .collect::<Vec<_>>()
                .join(", "),
        ),
    }
}

struct Walk {
    spread_drift: f64,
    mean_error: f64,
}

fn random_walk() -> Walk {
    let psi = packet(4096, 128.0);
    let start = psi.moments(1.0).expect("moments");
    let mut rng = ChaCha20Rng::seed_from_u64(3);
    let mut state = psi;
    let (mut sum_x, mut sum_k) = (0.0, 0.0);
    let mut spread_drift: f64 = 0.0;
    let mut mean_error: f64 = 0.0;
    for _ in 0..50 {
        let dx = rng.random_range(-2.0..2.0);
        let dk = rng.random_range(-2.0..2.0);
        state = translate_k(&translate_x(&state, dx).expect("x"), dk).expect("k");
        sum_x += dx;
        sum_k += dk;
        let m = state.moments(1.0).expect("moments");
        spread_drift = spread_drift
            .max((m.spread_x - start.spread_x).abs())
            .max((m.spread_k - start.spread_k).abs());
        mean_error = mean_error
            .max((m.mean_x - start.mean_x - sum_x).abs())
            .max((m.mean_k - start.mean_k - sum_k).abs());
    }
    Walk {
        spread_drift,
        mean_error,
    }
}

fn criterion_3() -> Outcome {
    let walk = random_walk();
    Outcome {
        passed: walk.spread_drift < 1e-12,
        detail: format!(
            "max δx/δk drift over 50 displacements = {:.2e} (< 1e-12)",
            walk.spread_drift
        ),
    }
}

fn criterion_4() -> Outcome {
    let walk = random_walk();
    Outcome {
        passed: walk.mean_error <= 1e-10,
        detail: format!(
            "max |⟨x⟩, ⟨k⟩ − Σ displacements| = {:.2e} (≤ 1e-10)",
            walk.mean_error
        ),
    }
}

/// Sampled variance of `(k + Δk)·(k + Δk)` in MeV⁴, with its standard error.
fn sampled_spread(
    g: &GaussianReference,
    m0: f64,
    energy: f64,
    samples: usize,
    seed: u64,
) -> (f64, f64) {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let p = ((energy - m0) * (energy + m0)).sqrt();
    let dk = [(energy - m0) / HBAR_C, p / HBAR_C];
    let tail = (1.0 - g.correlation * g.correlation).sqrt();
    let mut values = Vec::with_capacity(samples);
    for _ in 0..samples {
        let z0: f64 = rng.sample(StandardNormal);
        let z1: f64 = rng.sample(StandardNormal);
        let k0 = g.mean[0] + g.sigma0 * z0 + dk[0];
        let k1 = g.mean[1] + g.sigma_par * (g.correlation * z0 + tail * z1) + dk[1];
        values.push(k0 * k0 - k1 * k1);
    }
    let n = samples as f64;
    let mean = values.iter().sum::<f64>() / n;
    let m2 = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
    let m4 = values.iter().map(|v| (v - mean).powi(4)).sum::<f64>() / n;
    let scale = HBAR_C.powi(4);
    (
        m2 * n / (n - 1.0) * scale,
        ((m4 - m2 * m2) / n).sqrt() * scale,
    )
}

fn criterion_5() -> Outcome {
    let mut rng = ChaCha20Rng::seed_from_u64(5);
    let m0 = 100.0;
    let mut worst: f64 = 0.0;
    let mut cases = 0;
    let mut seeds = 1000u64..;
    for _ in 0..20 {
        let g = GaussianReference::new(
            [rng.random_range(0.2..0.8), rng.random_range(-0.3..0.3)],
            rng.random_range(0.005..0.1),
            rng.random_range(0.005..0.1),
            rng.random_range(-0.95..0.95),
        )
        .expect("reference");
        for gamma in [1.5, 4.0, 20.0] {
            let boost = BoostSpec::from_gamma(m0, gamma).expect("boost");
            let moments = g.moments_along(boost.direction());
            let report = bare_mass_spread(&moments, &boost, 1.0).expect("spread");
            let (var, se) =
                sampled_spread(&g, m0, boost.energy(), 1_000_000, seeds.next().unwrap());
            worst = worst.max((report.total - var).abs() / se);
            cases += 1;
        }
    }
    Outcome {
        passed: worst < 4.0,
        detail: format!(
            "{cases} cases, 10⁶ samples each: max |formula − MC| = {worst:.2} SE (< 4)"
        ),
    }
}

fn criterion_6() -> Outcome {
    // Rest-frame symmetric Gaussian: 1 eV/c spread along k_∥.
    let m = ELECTRON_MASS / HBAR_C;
    let sigma = 1e-6 / HBAR_C;
    let g = GaussianReference::new([m, 0.0], 0.0, sigma, 0.0).expect("reference");
    let ratio = |gamma: f64| {
        let boost = BoostSpec::from_gamma(ELECTRON_MASS, gamma).expect("boost");
        let r = bare_mass_spread(&g.moments_along(boost.direction()), &boost, 1.0).expect("spread");
        r.relative_spread_high_gamma / r.relative_spread
    };
    let (r3, r5) = (ratio(1e3), ratio(1e5));
    Outcome {
        passed: (0.9..=1.1).contains(&r3) && (0.97..=1.03).contains(&r5),
        detail: format!(
            "high-γ estimate / exact = {r3:.4} at γ = 1e3 (want [0.9, 1.1]), {r5:.5} at γ = 1e5 (want [0.97, 1.03]); √(2/γ) = {:.4}, {:.5}",
            (2.0f64 / 1e3).sqrt(),
            (2.0f64 / 1e5).sqrt()
        ),
    }
}

fn criterion_7() -> Outcome {
    let run = |name: &str| Scenario::preset(name).expect("preset").run().expect("run");
    let lep = run("lep2-electron");
    let tev = run("tevatron-proton");
    let e300 = run("e300-supraluminal");
    let passed = (5e-4..=5e-3).contains(&lep.relative_spread_high_gamma)
        && (1e-2..=1e-1).contains(&tev.relative_spread_high_gamma)
        && (0.2..=2.0).contains(&e300.supra_reach);
    Outcome {
        passed,
        detail: format!(
            "lep2 Δm/m = {:.3e} ∈ [5e-4, 5e-3]; tevatron Δm/m = {:.3e} ∈ [1e-2, 1e-1]; e300 reach = {:.3} MeV ∈ [0.2, 2] \
             (three-term exact Δm/m: lep2 {:.3e}, tevatron {:.3e})",
            lep.relative_spread_high_gamma,
            tev.relative_spread_high_gamma,
            e300.supra_reach,
            lep.relative_spread,
            tev.relative_spread,
        ),
    }
}

fn kinked(mass: f64, velocity: f64, steps: usize, total: f64) -> Trajectory {
    let gamma = 1.0 / (1.0 - velocity * velocity).sqrt();
    let half = steps / 2;
    let mut xs = Vec::with_capacity(steps + 1);
    let mut ks = Vec::with_capacity(steps + 1);
    for i in 0..=steps {
        let t = total * i as f64 / steps as f64;
        let (x, v) = if i <= half {
            (velocity * t, velocity)
        } else {
            (velocity * (total - t), -velocity)
        };
        xs.push(vec![t, x]);
        ks.push(vec![mass * gamma, mass * gamma * v]);
    }
    Trajectory::from_samples(xs, ks).expect("kinked path")
}

fn criterion_8() -> Outcome {
    let config = IntegrationConfig::new(0.01, 10_000);
    let free = integrate_trajectory(&[0.0, 0.0], &[5.0, 3.0], &config, None).expect("free");
    let mut boost = BoostGenerator { rate: 1e-4 };
    let pushed =
        integrate_trajectory(&[0.0, 0.0], &[5.0, 3.0], &config, Some(&mut boost)).expect("boosted");
    let drift = free.max_shell_drift().max(pushed.max_shell_drift());
    let necessary = check_necessary_condition(&free).max(check_necessary_condition(&pushed));
    let straight =
        extremality_slope(&free, sine_bump(vec![0.0, 1.0]), 1e-2, 1e-1, 5).expect("slope");
    let control = kinked(4.0, 0.6, 10_000, 100.0);
    let kink =
        extremality_slope(&control, sine_bump(vec![0.0, 1.0]), 1e-3, 1e-2, 5).expect("slope");
    Outcome {
        passed: drift < 1e-9
            && necessary < 1e-10
            && (straight.slope - 2.0).abs() <= 0.1
            && (kink.slope - 1.0).abs() <= 0.1,
        detail: format!(
            "shell drift {drift:.2e} (< 1e-9), max |dx·dk| {necessary:.2e} (< 1e-10), slope {:.4} (2 ± 0.1), kinked slope {:.4} (1 ± 0.1)",
            straight.slope, kink.slope
        ),
    }
}

fn criterion_9() -> Outcome {
    let (mass, accel, h) = (1.0, 1.0, 0.1);
    let points: Vec<PhasePoint> = (0..=20)
        .map(|i| {
            let s = 0.5 + i as f64 * h;
            let (sh, ch) = ((accel * s).sinh(), (accel * s).cosh());
            PhasePoint::new(vec![sh / accel, ch / accel], vec![mass * ch, mass * sh])
        })
        .collect();
    let path = PhasePath::open(points, Metric::Minkowski).expect("path");
    let minkowski = wave_sync_residual(&path).expect("residual");
    let euclidean = wave_sync_residual(&path.with_metric(Metric::Euclidean)).expect("residual");
    let worst = minkowski.iter().fold(0.0f64, |a, r| a.max(r.abs()));
    let least = euclidean.iter().fold(f64::INFINITY, |a, r| a.min(r.abs()));
    Outcome {
        passed: worst < 1e-10 * h * h && least > 1e-3,
        detail: format!(
            "Minkowski residual max {worst:.2e} (< 1e-10·h² = {:.0e}); Euclidean min {least:.3e} (> 1e-3)",
            1e-10 * h * h
        ),
    }
}

fn run_cli(args: &[&str]) -> (Vec<u8>, bool) {
    let out = Command::new(env!("CARGO_BIN_EXE_weylpath"))
        .args(args)
        .output()
        .expect("spawn weylpath");
    (out.stdout, out.status.success())
}

fn criterion_10() -> Outcome {
    let runs: [&[&str]; 3] = [
        &[
            "mass-spread",
            "--preset",
            "tevatron-proton",
            "--mc-samples",
            "200000",
            "--seed",
            "11",
        ],
        &[
            "mass-spread",
            "--preset",
            "lep2-electron",
            "--sweep",
            "3e5,1e4,1e5,1e3",
        ],
        &["trajectory", "--boost-rate", "1e-4", "--n-steps", "2000"],
    ];
    let mut identical = true;
    let mut ok = true;
    for args in runs {
        let (a, sa) = run_cli(args);
        let (b, sb) = run_cli(args);
        identical &= !a.is_empty() && a == b;
        ok &= sa && sb;
    }
    Outcome {
        passed: identical && ok,
        detail: format!(
            "{} CLI configurations run twice: byte-identical = {identical}, exit 0 = {ok}",
            runs.len()
        ),
    }
}

type Criterion = (u32, &'static str, fn() -> Outcome, Option<Duration>);

fn main() -> ExitCode {
    let criteria: [Criterion; 10] = [
        (
            1,
            "exact loop phase",
            criterion_1,
            Some(Duration::from_secs(5)),
        ),
        (
            2,
            "symplectic-area convergence",
            criterion_2,
            Some(Duration::from_secs(10)),
        ),
        (
            3,
            "spread invariance",
            criterion_3,
            Some(Duration::from_secs(5)),
        ),
        (4, "average covariance", criterion_4, None),
        (
            5,
            "three-term spread vs brute force",
            criterion_5,
            Some(Duration::from_secs(60)),
        ),
        (6, "high-γ asymptotics", criterion_6, None),
        (7, "quoted figures (order of magnitude)", criterion_7, None),
        (
            8,
            "trajectory invariants",
            criterion_8,
            Some(Duration::from_secs(10)),
        ),
        (9, "reciprocal phase compensation", criterion_9, None),
        (10, "CLI determinism", criterion_10, None),
    ];
    let mut failures = 0;
    for (id, name, check, limit) in criteria {
        let start = Instant::now();
        let outcome = check();
        let elapsed = start.elapsed();
        let in_time = limit.is_none_or(|l| elapsed < l);
        let passed = outcome.passed && in_time;
        let timing = match limit {
            Some(l) => format!("{:.2} s < {} s", elapsed.as_secs_f64(), l.as_secs()),
            None => format!("{:.2} s", elapsed.as_secs_f64()),
        };
        println!(
            "[{}] {id:>2} {name}: {} ({timing})",
            if passed { "PASS" } else { "FAIL" },
            outcome.detail
        );
        if !passed {
            failures += 1;
        }
    }
    println!("acceptance: {} of 10 criteria passed", 10 - failures);
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
