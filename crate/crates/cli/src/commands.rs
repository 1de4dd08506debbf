use std::fs::File;
use std::io::BufWriter;

use anyhow::{bail, Context};
use rayon::prelude::*;
use serde_json::{json, Value};
use weylpath::mass_observables::{monte_carlo_spread, MassReport, Scenario, PRESETS};
use weylpath::metric::Metric;
use weylpath::trajectory::{
    action_along, check_necessary_condition, extremality_slope, integrate_trajectory, sine_bump,
    BoostGenerator, Branch, IntegrationConfig, KUpdate,
};
use weylpath::weyl_ops::{geometric_phase_quadrature, path_transport, rect_loop_transport};
use weylpath::{wrap_phase, Grid, PhaseDisplacement, PhasePath, PhasePoint, WavePacket};

use crate::args::{
    output_path, GridArgs, LoopPhaseArgs, LoopPreset, MassSpreadArgs, TrajectoryArgs,
    TransportArgs, TransportPreset,
};
use crate::report::{num, Check, Report, Table};

const RECT_FIDELITY_TOLERANCE: f64 = 1e-12;
const RECT_PHASE_TOLERANCE: f64 = 1e-10;
const PATH_FIDELITY_TOLERANCE: f64 = 1e-9;
const TRANSPORT_PHASE_TOLERANCE: f64 = 1e-8;
const SHELL_DRIFT_TOLERANCE: f64 = 1e-9;
const NECESSARY_CONDITION_TOLERANCE: f64 = 1e-10;
const MC_STANDARD_ERRORS: f64 = 4.0;
const CONVERGED_PHASE_ERROR: f64 = 1e-10;
/// Samples of the densely drawn preset curves before resampling.
const PRESET_RESOLUTION: usize = 4096;

fn packet(grid: &GridArgs) -> anyhow::Result<WavePacket> {
    let g = Grid::new(grid.n_points, grid.box_length)?;
    Ok(WavePacket::gaussian(&g, grid.x0, grid.k0, grid.sigma)?)
}

fn read_path(path: &std::path::Path) -> anyhow::Result<PhasePath> {
    let file = File::open(path).with_context(|| format!("cannot open path {}", path.display()))?;
    Ok(PhasePath::from_csv(file, Metric::Euclidean)?)
}

pub fn loop_phase(args: &LoopPhaseArgs) -> anyhow::Result<Report> {
    let psi = packet(&args.grid)?;
    let mut report = Report::new("loop-phase", args);

    let loop_path = match (&args.path, args.preset) {
        (Some(file), _) => Some(read_path(file)?),
        (None, Some(LoopPreset::Circle)) => None,
        (None, None) => {
            let outcome = rect_loop_transport(&psi, args.dx, args.dk)?;
            let expected = PhaseDisplacement::new(vec![args.dx], vec![args.dk], Metric::Euclidean)?
                .loop_phase();
            let error = wrap_phase(outcome.phase - expected).abs();
            report.result("dx", args.dx);
            report.result("dk", args.dk);
            report.result("phase", outcome.phase);
            report.result("expected_phase", expected);
            report.result("difference", error);
            report.result("fidelity", outcome.fidelity);
            report.check(Check::at_least(
                "fidelity",
                outcome.fidelity,
                1.0 - RECT_FIDELITY_TOLERANCE,
            ));
            report.check(Check::below("phase_error", error, RECT_PHASE_TOLERANCE));
            return Ok(report);
        }
    };

    if args.levels == 0 || args.steps >> (args.levels - 1) < 4 {
        bail!(
            "--steps {} is too small for {} levels",
            args.steps,
            args.levels
        );
    }
    if !(args.radius > 0.0) {
        bail!("--radius must be positive");
    }
    let expected = match &loop_path {
        Some(p) => {
            if !p.is_closed() {
                bail!("loop-phase needs a closed path; use transport for open paths");
            }
            -p.shoelace_area()?
        }
        None => -std::f64::consts::PI * args.radius * args.radius,
    };

    let mut table = Table::new(&[
        "steps",
        "phase",
        "expected_phase",
        "error",
        "ratio",
        "fidelity",
    ]);
    let mut errors = Vec::new();
    let mut min_fidelity = f64::INFINITY;
    let mut last_phase = 0.0;
    for level in (0..args.levels).rev() {
        let steps = args.steps >> level;
        let path = match &loop_path {
            Some(p) => p.clone(),
            None => PhasePath::circle(0.0, 0.0, args.radius, steps)?,
        };
        let outcome = path_transport(&psi, &path, steps)?;
        let error = (outcome.unwrapped_phase - expected).abs();
        let ratio = errors.last().map(|prev: &f64| prev / error);
        table.push(vec![
            Value::from(steps),
            num(outcome.unwrapped_phase),
            num(expected),
            num(error),
            ratio.map(num).unwrap_or(Value::Null),
            num(outcome.fidelity),
        ]);
        errors.push(error);
        min_fidelity = min_fidelity.min(outcome.fidelity);
        last_phase = outcome.unwrapped_phase;
    }
    // Polygons with vertices on the step grid are exact at every level.
    let decreasing =
        errors.windows(2).all(|w| w[1] < w[0]) || errors.iter().all(|e| *e < CONVERGED_PHASE_ERROR);
    report.result("phase", last_phase);
    report.result("expected_phase", expected);
    report.result("difference", *errors.last().unwrap());
    report.result("fidelity", min_fidelity);
    report.check(Check::at_least(
        "fidelity",
        min_fidelity,
        1.0 - PATH_FIDELITY_TOLERANCE,
    ));
    report.check(Check::holds(
        "error_decreases_or_converged",
        *errors.last().unwrap(),
        decreasing,
        "monotone",
    ));
    if loop_path.is_none() && errors.len() >= 2 {
        let n = errors.len();
        let ratio = errors[n - 2] / errors[n - 1];
        report.result("richardson_ratio", ratio);
        report.check(Check::within("richardson_ratio", ratio, 4.0, 0.5));
    }
    report.table = Some(table);
    Ok(report)
}

fn half_circle(radius: f64) -> anyhow::Result<PhasePath> {
    let points = (0..=PRESET_RESOLUTION)
        .map(|i| {
            let theta = std::f64::consts::PI * (1.0 - i as f64 / PRESET_RESOLUTION as f64);
            PhasePoint::planar(radius * theta.cos(), radius * theta.sin())
        })
        .collect();
    Ok(PhasePath::open(points, Metric::Euclidean)?)
}

pub fn transport(args: &TransportArgs) -> anyhow::Result<Report> {
    let psi = packet(&args.grid)?;
    let path = match (&args.path, args.preset) {
        (Some(file), _) => read_path(file)?,
        (None, TransportPreset::HalfCircle) => {
            if !(args.radius > 0.0) {
                bail!("--radius must be positive");
            }
            half_circle(args.radius)?
        }
        (None, TransportPreset::Segment) => PhasePath::open(
            vec![
                PhasePoint::planar(0.0, 0.0),
                PhasePoint::planar(args.dx, args.dk),
            ],
            Metric::Euclidean,
        )?,
    };
    let outcome = path_transport(&psi, &path, args.steps)?;
    let stepped = geometric_phase_quadrature(&outcome.steps);
    let continuum = geometric_phase_quadrature(&path);

    let mut report = Report::new("transport", args);
    report.result("closed", outcome.steps.is_closed());
    report.result("phase", outcome.phase);
    report.result("unwrapped_phase", outcome.unwrapped_phase);
    report.result("predicted_phase", outcome.predicted_phase);
    report.result("action", stepped.action);
    report.result("action_dual", stepped.dual);
    report.result("boundary", stepped.boundary);
    report.result("boundary_offset", outcome.boundary_offset);
    report.result("action_input_path", continuum.action);
    report.result("fidelity", outcome.fidelity);

    report.check(Check::at_least(
        "fidelity",
        outcome.fidelity,
        1.0 - PATH_FIDELITY_TOLERANCE,
    ));
    report.check(Check::below(
        "phase_vs_quadrature",
        (outcome.unwrapped_phase - outcome.predicted_phase).abs(),
        TRANSPORT_PHASE_TOLERANCE,
    ));
    let duality = (stepped.action - stepped.dual + stepped.boundary).abs();
    report.check(Check::below(
        "action_dual_boundary",
        duality,
        1e-10 * (1.0 + stepped.action.abs()),
    ));
    Ok(report)
}

pub fn trajectory(args: &TrajectoryArgs, include_table: bool) -> anyhow::Result<Report> {
    let d = args.k0.len();
    if d < 2 {
        bail!("--k0 needs at least two components (temporal first)");
    }
    let x0 = args.x0.clone().unwrap_or_else(|| vec![0.0; d]);
    if x0.len() != d {
        bail!("--x0 has {} components but --k0 has {d}", x0.len());
    }
    let kk = Metric::Minkowski.contract(&args.k0, &args.k0);
    if let Some(expected) = args.k_c_sq {
        if (kk - expected).abs() > 1e-9 * expected.abs().max(1.0) {
            bail!("--k0 has k·k = {kk}, not the requested shell value {expected}");
        }
    }
    let config = IntegrationConfig {
        ds: args.ds,
        n_steps: args.n_steps,
        affine_lightlike: args.affine_lightlike,
    };
    let mut boost = BoostGenerator {
        rate: args.boost_rate,
    };
    let update: Option<&mut dyn KUpdate> = (args.boost_rate != 0.0).then_some(&mut boost as _);
    let traj = integrate_trajectory(&x0, &args.k0, &config, update)?;

    if let Some(dump) = &args.dump {
        let target = output_path(dump);
        let file =
            File::create(&target).with_context(|| format!("cannot create {}", target.display()))?;
        traj.write_csv(BufWriter::new(file))?;
    }

    let last = traj.states().last().unwrap();
    let branch = last.branch;
    let drift = traj.max_shell_drift();
    let necessary = check_necessary_condition(&traj);
    let mut report = Report::new("trajectory", args);
    report.result("branch", branch.name());
    report.result("k_c_sq", last.k_c_sq);
    report.result("steps", args.n_steps);
    report.result("shell_drift", drift);
    report.result("max_dx_dk", necessary);
    report.result("action", action_along(&traj));
    report.result("arc_length", traj.arc().last().copied().unwrap_or(0.0));
    report.result("final_x", &last.x);
    report.result("final_k", &last.k);

    report.check(Check::below("shell_drift", drift, SHELL_DRIFT_TOLERANCE));
    report.check(Check::below(
        "max_dx_dk",
        necessary,
        NECESSARY_CONDITION_TOLERANCE,
    ));
    // The probe varies the free action, so only free paths are extremal.
    if args.boost_rate == 0.0 && branch != Branch::Lightlike && args.n_steps >= 2 {
        let start = &traj.states()[0].x;
        let span = last
            .x
            .iter()
            .zip(start)
            .map(|(a, b)| (a - b).powi(2))
            .sum::<f64>()
            .sqrt();
        let mut direction = vec![0.0; d];
        direction[if branch == Branch::Subluminal { 1 } else { 0 }] = 1.0;
        let fit = extremality_slope(&traj, sine_bump(direction), 1e-4 * span, 1e-3 * span, 5)?;
        report.result("extremality_slope", fit.slope);
        report.check(Check::within("extremality_slope", fit.slope, 2.0, 0.1));
    }

    if include_table {
        let mut columns = vec!["s".to_string()];
        columns.extend((0..d).map(|i| format!("x{i}")));
        columns.extend((0..d).map(|i| format!("k{i}")));
        columns.push("action_so_far".into());
        let mut table = Table::new(&columns);
        for ((state, s), action) in traj
            .states()
            .iter()
            .zip(traj.arc())
            .zip(traj.action_profile())
        {
            let mut row = vec![num(*s)];
            row.extend(state.x.iter().map(|v| num(*v)));
            row.extend(state.k.iter().map(|v| num(*v)));
            row.push(num(*action));
            table.push(row);
        }
        report.table = Some(table);
    }
    Ok(report)
}

fn scenario(args: &MassSpreadArgs) -> anyhow::Result<Scenario> {
    let mut scenario = match &args.preset {
        Some(name) => Scenario::preset(name)?,
        None => {
            let (Some(m0), Some(energy), Some(delta_p)) = (args.m0, args.energy, args.delta_p)
            else {
                bail!(
                    "mass-spread needs --preset ({}) or all of --m0, --energy, --delta-p",
                    PRESETS.join(", ")
                );
            };
            Scenario {
                name: "custom".into(),
                m0,
                energy,
                delta_p,
                n_sigma: 1.0,
            }
        }
    };
    if let Some(v) = args.m0 {
        scenario.m0 = v;
    }
    if let Some(v) = args.energy {
        scenario.energy = v;
    }
    if let Some(v) = args.delta_p {
        scenario.delta_p = v;
    }
    if let Some(v) = args.n_sigma {
        scenario.n_sigma = v;
    }
    if !(scenario.n_sigma >= 0.0) || !scenario.n_sigma.is_finite() {
        bail!("--n-sigma must be a finite non-negative number");
    }
    // validates mass, energy and width up front
    scenario.boost()?;
    scenario.reference()?;
    Ok(scenario)
}

fn mass_columns() -> Vec<String> {
    ["name", "m0", "energy", "delta_p"]
        .into_iter()
        .chain(MassReport::CSV_HEADER)
        .map(String::from)
        .collect()
}

fn mass_row(s: &Scenario, r: &MassReport) -> Vec<Value> {
    let mut row = vec![
        Value::from(s.name.clone()),
        num(s.m0),
        num(s.energy),
        num(s.delta_p),
    ];
    row.extend(r.csv_row().into_iter().map(Value::from));
    row
}

fn mass_checks(report: &mut Report, label: &str, r: &MassReport) {
    let sum = r.t0 + r.t1 + r.t2;
    report.check(Check::holds(
        &format!("{label}total_is_sum_of_terms"),
        (r.total - sum).abs(),
        r.total == sum,
        "== 0",
    ));
    report.check(Check::at_least(&format!("{label}gamma"), r.gamma, 1.0));
}

pub fn mass_spread(args: &MassSpreadArgs, seed: u64) -> anyhow::Result<Report> {
    let base = scenario(args)?;
    if args.mc_samples > 0 && args.mc_chunks == 0 {
        bail!("--mc-chunks must be positive");
    }
    let mut report = Report::new("mass-spread", args);
    let mut table = Table::new(&mass_columns());

    if let Some(energies) = &args.sweep {
        if energies.is_empty() {
            bail!("--sweep needs at least one energy");
        }
        let mut points: Vec<Scenario> = energies
            .iter()
            .map(|&energy| Scenario {
                energy,
                ..base.clone()
            })
            .collect();
        for p in &points {
            p.boost()?;
        }
        points.sort_by(|a, b| a.energy.total_cmp(&b.energy));
        let reports = points
            .par_iter()
            .map(Scenario::run)
            .collect::<Result<Vec<_>, _>>()?;
        let mut entries = Vec::new();
        for (s, r) in points.iter().zip(&reports) {
            mass_checks(&mut report, &format!("E={}:", s.energy), r);
            table.push(mass_row(s, r));
            entries.push(json!({ "energy": s.energy, "report": r }));
        }
        report.result("scenario", &base);
        report.result("sweep", entries);
    } else {
        let r = base.run()?;
        mass_checks(&mut report, "", &r);
        report.result("scenario", &base);
        report.result("report", r);
        report.result(
            "high_gamma_over_exact",
            r.relative_spread_high_gamma / r.relative_spread,
        );
        if args.mc_samples > 0 {
            let boost = base.boost()?;
            let mc = monte_carlo_spread(
                &base.reference()?,
                &boost,
                args.mc_samples,
                seed,
                args.mc_chunks,
            )?;
            report.check(Check::below(
                "monte_carlo_agreement",
                (mc.variance - r.total).abs() / mc.standard_error,
                MC_STANDARD_ERRORS,
            ));
            report.result("monte_carlo", mc);
        }
        table.push(mass_row(&base, &r));
    }
    report.table = Some(table);
    Ok(report)
}
