//! Particle-trajectories: paths on a mass shell `k·k = ±k_C²` whose
//! position steps follow `dx/‖dx‖ = k/k_C`, so that `dx·dk = 0` holds step by
//! step. All contractions use the Minkowski signature (+, −, …, −).

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::metric::{euclidean_norm, Metric};
use crate::weyl_ops::PhasePath;

/// Half-width of the light-cone band, relative to `‖k‖²` (Euclidean).
pub const LIGHTLIKE_TOLERANCE: f64 = 1e-9;
/// Relative tolerance on `k·dk = 0` for externally supplied updates.
pub const TANGENCY_TOLERANCE: f64 = 1e-12;

const MINKOWSKI: Metric = Metric::Minkowski;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Branch {
    Subluminal,
    Lightlike,
    Supraluminal,
}

impl Branch {
    pub fn name(self) -> &'static str {
        match self {
            Branch::Subluminal => "subluminal",
            Branch::Lightlike => "lightlike",
            Branch::Supraluminal => "supraluminal",
        }
    }
}

/// Sheet of the mass shell that `k` lies on.
pub fn classify(k: &[f64]) -> Branch {
    let kk = MINKOWSKI.contract(k, k);
    let scale = k.iter().map(|v| v * v).sum::<f64>();
    if kk.abs() <= LIGHTLIKE_TOLERANCE * scale {
        Branch::Lightlike
    } else if kk > 0.0 {
        Branch::Subluminal
    } else {
        Branch::Supraluminal
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryState {
    pub x: Vec<f64>,
    pub k: Vec<f64>,
    /// Signed shell value `±k_C²` carried by the trajectory.
    pub k_c_sq: f64,
    pub branch: Branch,
}

impl TrajectoryState {
    /// Relative deviation of `k·k` from the carried shell value.
    pub fn shell_drift(&self) -> f64 {
        let kk = MINKOWSKI.contract(&self.k, &self.k);
        if self.k_c_sq == 0.0 {
            kk.abs()
        } else {
            (kk - self.k_c_sq).abs() / self.k_c_sq.abs()
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    states: Vec<TrajectoryState>,
    arc: Vec<f64>,
    action: Vec<f64>,
}

impl Trajectory {
    /// Builds a trajectory from raw samples, without enforcing the shell or
    /// the `dx·dk = 0` condition. The arc parameter is the cumulative
    /// interval `Σ |dx·dx|^{1/2}`.
    pub fn from_samples(xs: Vec<Vec<f64>>, ks: Vec<Vec<f64>>) -> Result<Self> {
        if xs.len() < 2 || xs.len() != ks.len() {
            return Err(Error::InvalidArgument(format!(
                "need at least two matching samples (got {} x, {} k)",
                xs.len(),
                ks.len()
            )));
        }
        let d = xs[0].len();
        if d < 2 || xs.iter().chain(&ks).any(|v| v.len() != d) {
            return Err(Error::InvalidArgument(
                "samples must share one dimension of at least 1+1".into(),
            ));
        }
        let states: Vec<TrajectoryState> = xs
            .into_iter()
            .zip(ks)
            .map(|(x, k)| TrajectoryState {
                k_c_sq: MINKOWSKI.contract(&k, &k),
                branch: classify(&k),
                x,
                k,
            })
            .collect();
        let mut arc = vec![0.0];
        for w in states.windows(2) {
            let dx = difference(&w[1].x, &w[0].x);
            arc.push(arc.last().unwrap() + MINKOWSKI.contract(&dx, &dx).abs().sqrt());
        }
        let action = cumulative_action(&states);
        Ok(Trajectory {
            states,
            arc,
            action,
        })
    }

    pub fn states(&self) -> &[TrajectoryState] {
        &self.states
    }

    pub fn arc(&self) -> &[f64] {
        &self.arc
    }

    /// `−∫k·dx` accumulated up to each state.
    pub fn action_profile(&self) -> &[f64] {
        &self.action
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn dimension(&self) -> usize {
        self.states[0].x.len()
    }

    /// Largest relative shell drift over all states.
    pub fn max_shell_drift(&self) -> f64 {
        self.states
            .iter()
            .map(TrajectoryState::shell_drift)
            .fold(0.0, f64::max)
    }

    pub fn reversed(&self) -> Self {
        let mut states = self.states.clone();
        states.reverse();
        let end = *self.arc.last().unwrap();
        let arc = self.arc.iter().rev().map(|s| end - s).collect();
        let action = cumulative_action(&states);
        Trajectory {
            states,
            arc,
            action,
        }
    }

    /// Rows `s, x0..xd-1, k0..kd-1, action_so_far`.
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let d = self.dimension();
        let mut out = csv::Writer::from_writer(writer);
        let header: Vec<String> = std::iter::once("s".to_string())
            .chain((0..d).map(|i| format!("x{i}")))
            .chain((0..d).map(|i| format!("k{i}")))
            .chain(std::iter::once("action_so_far".to_string()))
            .collect();
        out.write_record(&header)?;
        for ((state, s), action) in self.states.iter().zip(&self.arc).zip(&self.action) {
            let row = std::iter::once(s)
                .chain(&state.x)
                .chain(&state.k)
                .chain(std::iter::once(action))
                .map(|v| format!("{v:.16e}"));
            out.write_record(row)?;
        }
        out.flush()?;
        Ok(())
    }
}

fn difference(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(p, q)| p - q).collect()
}

fn midpoint(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(p, q)| 0.5 * (p + q)).collect()
}

fn cumulative_action(states: &[TrajectoryState]) -> Vec<f64> {
    let mut action = Vec::with_capacity(states.len());
    action.push(0.0);
    for w in states.windows(2) {
        let dx = difference(&w[1].x, &w[0].x);
        let k_mid = midpoint(&w[0].k, &w[1].k);
        action.push(action.last().unwrap() - MINKOWSKI.contract(&k_mid, &dx));
    }
    action
}

/// Source of per-step momentum changes. Updates must be tangent to the
/// shell (`k·dk = 0`).
pub trait KUpdate {
    fn dk(&mut self, step: usize, state: &TrajectoryState) -> Vec<f64>;
}

impl<F> KUpdate for F
where
    F: FnMut(usize, &TrajectoryState) -> Vec<f64>,
{
    fn dk(&mut self, step: usize, state: &TrajectoryState) -> Vec<f64> {
        self(step, state)
    }
}

/// Infinitesimal boost in the (k0, k1) plane: `dk = rate · (k1, k0, 0, …)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoostGenerator {
    pub rate: f64,
}

impl KUpdate for BoostGenerator {
    fn dk(&mut self, _step: usize, state: &TrajectoryState) -> Vec<f64> {
        let mut dk = vec![0.0; state.k.len()];
        dk[0] = self.rate * state.k[1];
        dk[1] = self.rate * state.k[0];
        dk
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IntegrationConfig {
    pub ds: f64,
    pub n_steps: usize,
    /// Accept light-cone initial data, stepping `dx = ds·k` with an affine
    /// parameter.
    pub affine_lightlike: bool,
}

impl IntegrationConfig {
    pub fn new(ds: f64, n_steps: usize) -> Self {
        IntegrationConfig {
            ds,
            n_steps,
            affine_lightlike: false,
        }
    }
}

/// Fixed-step midpoint integration on the mass shell.
///
/// Each step applies the (optional) tangent update, rescales `k` back onto
/// its shell, and advances `x` by `ds·(k_n + k_{n+1}) / (2 k_C)`. Since both
/// end momenta sit on the same shell, `dx·dk ∝ k_{n+1}² − k_n² = 0`.
pub fn integrate_trajectory(
    x0: &[f64],
    k0: &[f64],
    config: &IntegrationConfig,
    mut update: Option<&mut dyn KUpdate>,
) -> Result<Trajectory> {
    let d = x0.len();
    if d < 2 || k0.len() != d {
        return Err(Error::InvalidArgument(format!(
            "x0 and k0 must share a dimension of at least 1+1 (got {} and {})",
            d,
            k0.len()
        )));
    }
    if x0.iter().chain(k0).any(|v| !v.is_finite()) {
        return Err(Error::InvalidArgument("non-finite initial data".into()));
    }
    if !(config.ds > 0.0) || !config.ds.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "ds must be positive, got {}",
            config.ds
        )));
    }
    let branch = classify(k0);
    let lightlike = branch == Branch::Lightlike;
    if lightlike && !config.affine_lightlike {
        return Err(Error::InvalidArgument(
            "light-cone initial momentum: k·k = 0 has no shell normalization; \
             enable affine stepping to integrate it"
                .into(),
        ));
    }
    let k_c_sq = if lightlike {
        0.0
    } else {
        MINKOWSKI.contract(k0, k0)
    };
    let k_c = k_c_sq.abs().sqrt();

    let mut states = Vec::with_capacity(config.n_steps + 1);
    states.push(TrajectoryState {
        x: x0.to_vec(),
        k: k0.to_vec(),
        k_c_sq,
        branch,
    });
    for step in 0..config.n_steps {
        let current = states.last().unwrap();
        let dk = match update.as_mut() {
            Some(u) => u.dk(step, current),
            None => vec![0.0; d],
        };
        if dk.len() != d || dk.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidUpdate {
                step,
                reason: format!("update must be a finite {d}-vector"),
            });
        }
        let tangency = MINKOWSKI.contract(&current.k, &dk);
        let scale = euclidean_norm(&current.k) * euclidean_norm(&dk);
        if tangency.abs() > TANGENCY_TOLERANCE * scale {
            return Err(Error::InvalidUpdate {
                step,
                reason: format!("k·dk = {tangency:e} is not tangent to the shell"),
            });
        }
        let mut k_next: Vec<f64> = current.k.iter().zip(&dk).map(|(a, b)| a + b).collect();
        let next_branch = classify(&k_next);
        if next_branch != branch {
            return Err(Error::CrossOver {
                step,
                from: branch.name(),
                to: next_branch.name(),
            });
        }
        let velocity_scale = if lightlike {
            config.ds
        } else {
            let kk = MINKOWSKI.contract(&k_next, &k_next);
            let rescale = (k_c_sq.abs() / kk.abs()).sqrt();
            for v in k_next.iter_mut() {
                *v *= rescale;
            }
            config.ds / k_c
        };
        let x_next: Vec<f64> = current
            .x
            .iter()
            .zip(current.k.iter().zip(&k_next))
            .map(|(x, (a, b))| x + velocity_scale * 0.5 * (a + b))
            .collect();
        states.push(TrajectoryState {
            x: x_next,
            k: k_next,
            k_c_sq,
            branch,
        });
    }
    let arc = (0..states.len()).map(|i| i as f64 * config.ds).collect();
    let action = cumulative_action(&states);
    Ok(Trajectory {
        states,
        arc,
        action,
    })
}

/// Largest per-step `|dx·dk|` along the trajectory.
pub fn check_necessary_condition(traj: &Trajectory) -> f64 {
    traj.states
        .windows(2)
        .map(|w| {
            let dx = difference(&w[1].x, &w[0].x);
            let dk = difference(&w[1].k, &w[0].k);
            MINKOWSKI.contract(&dx, &dk).abs()
        })
        .fold(0.0, f64::max)
}

/// Per-step `dt·dω − dx·dk` for a path of `(t, x; ω, k)` samples, contracted
/// with the path's metric (a Euclidean path yields `dt·dω + dx·dk`).
pub fn wave_sync_residual(path: &PhasePath) -> Result<Vec<f64>> {
    if path.dimension() != 2 {
        return Err(Error::MalformedPath(format!(
            "wave-sync residual needs 1+1 samples (t, x; ω, k), got dimension {}",
            path.dimension()
        )));
    }
    let metric = path.metric();
    Ok(path
        .points()
        .windows(2)
        .map(|w| {
            let dx = difference(&w[1].x, &w[0].x);
            let dk = difference(&w[1].k, &w[0].k);
            metric.contract(&dx, &dk)
        })
        .collect())
}

/// Total `−∫k·dx` by the midpoint rule.
pub fn action_along(traj: &Trajectory) -> f64 {
    *traj.action.last().unwrap()
}

/// Sinusoidal bump `sin(πu)·direction` on the normalized arc `u ∈ [0, 1]`.
pub fn sine_bump(direction: Vec<f64>) -> impl Fn(f64) -> Vec<f64> {
    move |u| {
        let s = (std::f64::consts::PI * u).sin();
        direction.iter().map(|v| s * v).collect()
    }
}

/// Change of the action when the path is deformed by `ε·f(u)` and `k` is
/// re-derived on the shell from the deformed steps,
/// `k' = k_C·dx'/‖dx'‖`. Both the deformed and the reference action use
/// that construction, so `δS(0) = 0` exactly.
pub fn extremality_probe<F>(traj: &Trajectory, perturbation: F, epsilon: f64) -> Result<f64>
where
    F: Fn(f64) -> Vec<f64>,
{
    let d = traj.dimension();
    let start = perturbation(0.0);
    let end = perturbation(1.0);
    if start.len() != d || end.len() != d {
        return Err(Error::InvalidArgument(format!(
            "perturbation must return {d}-vectors"
        )));
    }
    if euclidean_norm(&start) > 1e-12 || euclidean_norm(&end) > 1e-12 {
        return Err(Error::InvalidArgument(
            "perturbation must vanish at both endpoints".into(),
        ));
    }
    if epsilon == 0.0 {
        return Ok(0.0);
    }
    let k_c = traj.states[0].k_c_sq.abs().sqrt();
    let s0 = traj.arc[0];
    let span = traj.arc.last().unwrap() - s0;
    if !(span > 0.0) {
        return Err(Error::InvalidArgument("trajectory has zero extent".into()));
    }
    let offsets: Vec<Vec<f64>> = traj
        .arc
        .iter()
        .enumerate()
        .map(|(i, s)| {
            // pin the endpoints exactly
            if i == 0 || i + 1 == traj.arc.len() {
                vec![0.0; d]
            } else {
                perturbation((s - s0) / span)
                    .into_iter()
                    .map(|v| epsilon * v)
                    .collect()
            }
        })
        .collect();

    let mut delta = 0.0;
    for (i, w) in traj.states.windows(2).enumerate() {
        let dx = difference(&w[1].x, &w[0].x);
        let shift = difference(&offsets[i + 1], &offsets[i]);
        let q0 = MINKOWSKI.contract(&dx, &dx);
        let change = 2.0 * MINKOWSKI.contract(&dx, &shift) + MINKOWSKI.contract(&shift, &shift);
        let q1 = q0 + change;
        if q0 != 0.0 && q1.signum() != q0.signum() {
            return Err(Error::InvalidArgument(format!(
                "perturbation flips the causal character of step {i}; reduce epsilon"
            )));
        }
        // k'·dx' = k_C sign(q) |q|^{1/2}; with sign(q1) = sign(q0) the
        // difference reduces to k_C (q1 − q0) / (|q1|^{1/2} + |q0|^{1/2}).
        let denom = q1.abs().sqrt() + q0.abs().sqrt();
        if denom > 0.0 {
            delta -= k_c * change / denom;
        }
    }
    Ok(delta)
}

/// Least-squares slope of `log|δS|` against `log ε`.
#[derive(Debug, Clone, PartialEq)]
pub struct ExtremalityFit {
    pub slope: f64,
    pub samples: Vec<(f64, f64)>,
}

/// Probes `δS` at `points` log-spaced amplitudes in `[eps_min, eps_max]`
/// and fits the log-log slope.
pub fn extremality_slope<F>(
    traj: &Trajectory,
    perturbation: F,
    eps_min: f64,
    eps_max: f64,
    points: usize,
) -> Result<ExtremalityFit>
where
    F: Fn(f64) -> Vec<f64>,
{
    if points < 2 || !(eps_min > 0.0) || !(eps_max > eps_min) {
        return Err(Error::InvalidArgument(
            "need 0 < eps_min < eps_max and at least two amplitudes".into(),
        ));
    }
    let ratio = (eps_max / eps_min).ln();
    let mut samples = Vec::with_capacity(points);
    for i in 0..points {
        let eps = eps_min * (ratio * i as f64 / (points - 1) as f64).exp();
        samples.push((eps, extremality_probe(traj, &perturbation, eps)?));
    }
    if samples.iter().any(|(_, ds)| *ds == 0.0) {
        return Err(Error::InvalidArgument(
            "action variation vanished identically; slope undefined".into(),
        ));
    }
    let logs: Vec<(f64, f64)> = samples
        .iter()
        .map(|(e, ds)| (e.ln(), ds.abs().ln()))
        .collect();
    let n = logs.len() as f64;
    let mx = logs.iter().map(|p| p.0).sum::<f64>() / n;
    let my = logs.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = logs.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = logs.iter().map(|p| (p.0 - mx).powi(2)).sum();
    Ok(ExtremalityFit {
        slope: sxy / sxx,
        samples,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::weyl_ops::PhasePoint;

    fn free(k0: &[f64], steps: usize) -> Trajectory {
        integrate_trajectory(&[0.0, 0.0], k0, &IntegrationConfig::new(0.01, steps), None).unwrap()
    }

    #[test]
    fn classification() {
        assert_eq!(classify(&[5.0, 3.0]), Branch::Subluminal);
        assert_eq!(classify(&[1.0, 1.0]), Branch::Lightlike);
        assert_eq!(classify(&[3.0, 5.0]), Branch::Supraluminal);
        assert_eq!(classify(&[2.0, 1.0, 1.0, 1.0]), Branch::Subluminal);
    }

    #[test]
    fn free_trajectory_is_straight() {
        let traj = free(&[5.0, 3.0], 10_000);
        assert!(traj.max_shell_drift() < 1e-12);
        assert_eq!(check_necessary_condition(&traj), 0.0);
        let last = traj.states().last().unwrap();
        // x advances by s·k/m with m = 4
        assert!((last.x[0] - 100.0 * 5.0 / 4.0).abs() < 1e-9);
        assert!((last.x[1] - 100.0 * 3.0 / 4.0).abs() < 1e-9);
    }

    #[test]
    fn boost_updates_keep_orthogonality() {
        let mut boost = BoostGenerator { rate: 1e-3 };
        let traj = integrate_trajectory(
            &[0.0, 0.0],
            &[5.0, 3.0],
            &IntegrationConfig::new(0.01, 1000),
            Some(&mut boost),
        )
        .unwrap();
        assert!(traj.max_shell_drift() < 1e-9);
        // Oracle: contract each step directly.
        let mut worst: f64 = 0.0;
        for w in traj.states().windows(2) {
            let dx = [w[1].x[0] - w[0].x[0], w[1].x[1] - w[0].x[1]];
            let dk = [w[1].k[0] - w[0].k[0], w[1].k[1] - w[0].k[1]];
            let c = dx[0] * dk[0] - dx[1] * dk[1];
            let bound = 1e-10 * (euclidean_norm(&dx) * euclidean_norm(&dk) + f64::EPSILON);
            assert!(c.abs() <= bound, "{c} > {bound}");
            worst = worst.max(c.abs());
        }
        assert!(check_necessary_condition(&traj) < 1e-10);
        assert_eq!(worst, check_necessary_condition(&traj));
        // the boost actually moved k
        assert!(traj.states().last().unwrap().k[1] > 3.5);
        assert!(traj
            .states()
            .iter()
            .all(|s| classify(&s.k) == Branch::Subluminal));
    }

    #[test]
    fn lightlike_requires_affine_flag() {
        let cfg = IntegrationConfig::new(0.1, 10);
        assert!(matches!(
            integrate_trajectory(&[0.0, 0.0], &[1.0, 1.0], &cfg, None),
            Err(Error::InvalidArgument(_))
        ));
        let affine = IntegrationConfig {
            affine_lightlike: true,
            ..cfg
        };
        let traj = integrate_trajectory(&[0.0, 0.0], &[1.0, 1.0], &affine, None).unwrap();
        let last = traj.states().last().unwrap();
        assert!((last.x[0] - 1.0).abs() < 1e-12 && (last.x[1] - 1.0).abs() < 1e-12);
        assert_eq!(last.branch, Branch::Lightlike);
        assert_eq!(action_along(&traj), 0.0);
    }

    #[test]
    fn non_tangent_update_rejected() {
        let mut push = |_: usize, _: &TrajectoryState| vec![0.1, 0.0];
        let err = integrate_trajectory(
            &[0.0, 0.0],
            &[5.0, 3.0],
            &IntegrationConfig::new(0.01, 5),
            Some(&mut push),
        )
        .unwrap_err();
        assert!(matches!(err, Error::InvalidUpdate { step: 0, .. }));
    }

    #[test]
    fn cross_over_rejected() {
        // Tangent but large enough to jump across the light cone.
        let mut kick = |_: usize, s: &TrajectoryState| vec![3.0 * s.k[1], 3.0 * s.k[0]];
        let err = integrate_trajectory(
            &[0.0, 0.0],
            &[5.0, 3.0],
            &IntegrationConfig::new(0.01, 5),
            Some(&mut kick),
        )
        .unwrap_err();
        assert!(matches!(err, Error::CrossOver { step: 0, .. }));
    }

    #[test]
    fn hand_built_violation_is_reported() {
        let xs = vec![vec![0.0, 0.0], vec![1.0, 0.5], vec![2.0, 1.0]];
        let ks = vec![vec![2.0, 0.0], vec![3.0, 1.0], vec![4.0, 0.0]];
        let traj = Trajectory::from_samples(xs, ks).unwrap();
        // steps give 1·1 − 0.5·1 = 0.5 and 1·1 − 0.5·(−1) = 1.5
        assert!((check_necessary_condition(&traj) - 1.5).abs() < 1e-15);
    }

    #[test]
    fn free_action_is_minus_mass_times_proper_time() {
        let traj = free(&[5.0, 3.0], 1000);
        // τ = 10, m = 4
        assert!((action_along(&traj) + 40.0).abs() < 1e-10);
        assert!((action_along(&traj.reversed()) - 40.0).abs() < 1e-10);
    }

    #[test]
    fn null_segment_has_no_action() {
        let traj = Trajectory::from_samples(
            vec![vec![0.0, 0.0], vec![2.0, 2.0]],
            vec![vec![1.0, 1.0], vec![1.0, 1.0]],
        )
        .unwrap();
        assert_eq!(action_along(&traj), 0.0);
    }

    #[test]
    fn wave_sync() {
        let (e, p) = (5.0, 3.0);
        let points: Vec<PhasePoint> = (0..20)
            .map(|j| {
                let t = j as f64;
                PhasePoint::new(vec![t, p / e * t], vec![e, p])
            })
            .collect();
        let path = PhasePath::open(points, Metric::Minkowski).unwrap();
        assert!(wave_sync_residual(&path).unwrap().iter().all(|r| *r == 0.0));
    }

    #[test]
    fn extremality_straight_vs_kinked() {
        let traj = free(&[5.0, 3.0], 2000);
        let bump = sine_bump(vec![0.0, 1.0]);
        assert_eq!(extremality_probe(&traj, &bump, 0.0).unwrap(), 0.0);
        let fit = extremality_slope(&traj, &bump, 1e-3, 1e-2, 5).unwrap();
        assert!((fit.slope - 2.0).abs() < 0.1, "slope {}", fit.slope);
        // proper time is maximal on the straight line, so S = −mτ grows
        assert!(fit.samples.iter().all(|(_, ds)| *ds > 0.0));

        let moving = |_: f64| vec![1.0, 0.0];
        assert!(extremality_probe(&traj, moving, 1e-3).is_err());
    }
}
