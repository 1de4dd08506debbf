//! Rest mass, bare mass and the spread of `k·k` for wave-packets pushed
//! along the mass shell.
//!
//! Internally every wave number is in fm⁻¹ (ħ = c = 1 with lengths in fm);
//! the reporting surface is in MeV. States live in 1+1 dimensions
//! `(k_0, k_∥)` with signature (+, −).

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::metric::Metric;

/// ħc in MeV·fm.
pub const HBAR_C: f64 = 197.3269804;
/// Electron rest energy in MeV.
pub const ELECTRON_MASS: f64 = 0.51099895;
/// Proton rest energy in MeV.
pub const PROTON_MASS: f64 = 938.27208816;

/// Names accepted by [`Scenario::preset`].
pub const PRESETS: [&str; 3] = ["lep2-electron", "tevatron-proton", "e300-supraluminal"];

/// Below this γ the high-boost approximation is not trustworthy.
const HIGH_GAMMA_WARNING: f64 = 10.0;

const MINKOWSKI: Metric = Metric::Minkowski;

pub fn mev_to_inverse_fm(value: f64) -> f64 {
    value / HBAR_C
}

pub fn inverse_fm_to_mev(value: f64) -> f64 {
    value * HBAR_C
}

/// A push along the mass shell from the rest point `(m0, 0)` to
/// `(E, p)`, expressed as the wave-number displacement `Δk`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoostSpec {
    m0: f64,
    energy: f64,
}

impl BoostSpec {
    /// `m0` and `energy` in MeV.
    pub fn from_energy(m0: f64, energy: f64) -> Result<Self> {
        if !(m0 > 0.0) || !m0.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "rest mass must be positive, got {m0}"
            )));
        }
        if !energy.is_finite() || energy < m0 {
            return Err(Error::InvalidArgument(format!(
                "energy {energy} MeV is below the rest energy {m0} MeV (γ < 1)"
            )));
        }
        Ok(BoostSpec { m0, energy })
    }

    pub fn from_gamma(m0: f64, gamma: f64) -> Result<Self> {
        if !(gamma >= 1.0) || !gamma.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "γ must be at least 1, got {gamma}"
            )));
        }
        Self::from_energy(m0, gamma * m0)
    }

    /// The unboosted reference.
    pub fn rest(m0: f64) -> Result<Self> {
        Self::from_energy(m0, m0)
    }

    pub fn m0(&self) -> f64 {
        self.m0
    }

    pub fn energy(&self) -> f64 {
        self.energy
    }

    pub fn gamma(&self) -> f64 {
        self.energy / self.m0
    }

    /// Kinetic energy `E − m0` in MeV.
    pub fn kinetic(&self) -> f64 {
        self.energy - self.m0
    }

    /// `p = √((E − m0)(E + m0))` in MeV.
    pub fn momentum(&self) -> f64 {
        (self.kinetic() * (self.energy + self.m0)).sqrt()
    }

    /// `Δk = ((E − m0), p) / ħc`.
    pub fn delta_k(&self) -> [f64; 2] {
        [
            mev_to_inverse_fm(self.kinetic()),
            mev_to_inverse_fm(self.momentum()),
        ]
    }

    /// `Δk·Δk = −2 m0 (E − m0) / (ħc)²`; the displacement is spacelike.
    pub fn delta_k_sq(&self) -> f64 {
        -2.0 * self.m0 * self.kinetic() / (HBAR_C * HBAR_C)
    }

    /// `‖Δk‖ = |Δk·Δk|^{1/2}`.
    pub fn delta_k_norm(&self) -> f64 {
        self.delta_k_sq().abs().sqrt()
    }

    /// `n = Δk/‖Δk‖`, with `n·n = −1`. At γ = 1 the limit `(0, 1)` is used.
    pub fn direction(&self) -> [f64; 2] {
        if self.kinetic() == 0.0 {
            return [0.0, 1.0];
        }
        let scale = (2.0 * self.m0 * self.kinetic()).sqrt();
        [self.kinetic() / scale, self.momentum() / scale]
    }
}

/// Reference-state statistics entering the spread of `k·k` under a shell
/// displacement along `n`. All values in powers of fm⁻¹.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReferenceMoments {
    /// `⟨δ²(n·k)⟩`
    pub var_nk: f64,
    /// `⟨δ²(k·k)⟩`
    pub var_kk: f64,
    /// `⟨δ(k·k) δ(n·k)⟩`
    pub cov_kk_nk: f64,
    /// `⟨δ²(k_0 − k_∥)⟩`
    pub var_k0_minus_kpar: f64,
    /// `⟨k⟩·⟨k⟩`
    pub mean_sq: f64,
    /// `n·⟨k⟩`
    pub mean_nk: f64,
    /// `⟨δk·δk⟩`
    pub spread_sq: f64,
}

impl ReferenceMoments {
    pub fn validate(&self) -> Result<()> {
        let fields = [
            self.var_nk,
            self.var_kk,
            self.cov_kk_nk,
            self.var_k0_minus_kpar,
            self.mean_sq,
            self.mean_nk,
            self.spread_sq,
        ];
        if fields.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidMoments("non-finite moment".into()));
        }
        if self.var_nk < 0.0 || self.var_kk < 0.0 || self.var_k0_minus_kpar < 0.0 {
            return Err(Error::InvalidMoments(format!(
                "negative variance (var_nk = {:e}, var_kk = {:e}, var_k0_minus_kpar = {:e})",
                self.var_nk, self.var_kk, self.var_k0_minus_kpar
            )));
        }
        let bound = self.var_kk * self.var_nk;
        if self.cov_kk_nk * self.cov_kk_nk > bound * (1.0 + 1e-12) {
            return Err(Error::InvalidMoments(format!(
                "Cauchy–Schwarz violated: cov² = {:e} > var_kk·var_nk = {:e}",
                self.cov_kk_nk * self.cov_kk_nk,
                bound
            )));
        }
        Ok(())
    }
}

/// A reference distribution of `k = (k_0, k_∥)` in fm⁻¹.
pub trait KDistribution: Sync {
    /// Moments needed for a shell displacement along `n` (`n·n = −1`).
    fn moments_along(&self, n: [f64; 2]) -> ReferenceMoments;

    fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> [f64; 2];
}

/// Bivariate Gaussian in `(k_0, k_∥)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GaussianReference {
    pub mean: [f64; 2],
    pub sigma0: f64,
    pub sigma_par: f64,
    pub correlation: f64,
}

impl GaussianReference {
    pub fn new(mean: [f64; 2], sigma0: f64, sigma_par: f64, correlation: f64) -> Result<Self> {
        if !(sigma0 >= 0.0 && sigma_par >= 0.0) || !(correlation.abs() <= 1.0) {
            return Err(Error::InvalidMoments(format!(
                "need σ0, σ∥ ≥ 0 and |ρ| ≤ 1 (got {sigma0}, {sigma_par}, {correlation})"
            )));
        }
        if mean.iter().any(|v| !v.is_finite()) || !sigma0.is_finite() || !sigma_par.is_finite() {
            return Err(Error::InvalidMoments(
                "non-finite Gaussian parameters".into(),
            ));
        }
        Ok(GaussianReference {
            mean,
            sigma0,
            sigma_par,
            correlation,
        })
    }

    pub fn covariance(&self) -> [[f64; 2]; 2] {
        let c = self.correlation * self.sigma0 * self.sigma_par;
        [
            [self.sigma0 * self.sigma0, c],
            [c, self.sigma_par * self.sigma_par],
        ]
    }
}

fn lower(v: [f64; 2]) -> [f64; 2] {
    [v[0], -v[1]]
}

fn quad(a: [f64; 2], s: &[[f64; 2]; 2], b: [f64; 2]) -> f64 {
    a[0] * (s[0][0] * b[0] + s[0][1] * b[1]) + a[1] * (s[1][0] * b[0] + s[1][1] * b[1])
}

impl KDistribution for GaussianReference {
    fn moments_along(&self, n: [f64; 2]) -> ReferenceMoments {
        let s = self.covariance();
        let gn = lower(n);
        let gm = lower(self.mean);
        // (GΣ)² trace with G = diag(1, −1)
        let gs = [[s[0][0], s[0][1]], [-s[1][0], -s[1][1]]];
        let trace_sq = gs[0][0] * gs[0][0] + 2.0 * gs[0][1] * gs[1][0] + gs[1][1] * gs[1][1];
        ReferenceMoments {
            var_nk: quad(gn, &s, gn),
            var_kk: 4.0 * quad(gm, &s, gm) + 2.0 * trace_sq,
            cov_kk_nk: 2.0 * quad(gm, &s, gn),
            var_k0_minus_kpar: s[0][0] + s[1][1] - 2.0 * s[0][1],
            mean_sq: MINKOWSKI.contract(&self.mean, &self.mean),
            mean_nk: MINKOWSKI.contract(&n, &self.mean),
            spread_sq: s[0][0] - s[1][1],
        }
    }

    fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> [f64; 2] {
        let z0: f64 = StandardNormal.sample(rng);
        let z1: f64 = StandardNormal.sample(rng);
        let rho = self.correlation;
        let tail = (1.0 - rho * rho).max(0.0).sqrt();
        [
            self.mean[0] + self.sigma0 * z0,
            self.mean[1] + self.sigma_par * (rho * z0 + tail * z1),
        ]
    }
}

/// A particle at rest with a Gaussian momentum spread, every component on
/// the shell: `k_∥ ~ N(0, σ²)`, `k_0 = √(m² + k_∥²)`. `k·k = m²` holds
/// sample by sample, so the reference carries no bare-mass spread.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OnShellReference {
    pub mass: f64,
    pub sigma: f64,
}

impl OnShellReference {
    /// Both in fm⁻¹.
    pub fn new(mass: f64, sigma: f64) -> Result<Self> {
        if !(mass > 0.0) || !(sigma >= 0.0) || !mass.is_finite() || !sigma.is_finite() {
            return Err(Error::InvalidMoments(format!(
                "need mass > 0 and σ ≥ 0 (got {mass}, {sigma})"
            )));
        }
        Ok(OnShellReference { mass, sigma })
    }

    /// `k_0 − m = k²/(m + √(m² + k²))`, free of cancellation.
    fn excess(&self, k: f64) -> f64 {
        k * k / (self.mass + (self.mass * self.mass + k * k).sqrt())
    }

    /// Mean and variance of `k_0 − m` by trapezoid quadrature over ±12σ.
    fn excess_moments(&self) -> (f64, f64) {
        if self.sigma == 0.0 {
            return (0.0, 0.0);
        }
        const NODES: usize = 4001;
        let half = 12.0;
        let h = 2.0 * half / (NODES - 1) as f64;
        let nodes = || {
            (0..NODES).map(move |i| {
                let z = -half + i as f64 * h;
                let w = if i == 0 || i == NODES - 1 { 0.5 } else { 1.0 };
                (z, w * h * (-0.5 * z * z).exp() / (2.0 * PI).sqrt())
            })
        };
        let mean: f64 = nodes().map(|(z, w)| w * self.excess(self.sigma * z)).sum();
        let var: f64 = nodes()
            .map(|(z, w)| w * (self.excess(self.sigma * z) - mean).powi(2))
            .sum();
        (mean, var)
    }
}

impl KDistribution for OnShellReference {
    fn moments_along(&self, n: [f64; 2]) -> ReferenceMoments {
        let (excess_mean, var_k0) = self.excess_moments();
        let var_par = self.sigma * self.sigma;
        let mean = [self.mass + excess_mean, 0.0];
        // cov(k_0, k_∥) = 0 by parity
        ReferenceMoments {
            var_nk: n[0] * n[0] * var_k0 + n[1] * n[1] * var_par,
            var_kk: 0.0,
            cov_kk_nk: 0.0,
            var_k0_minus_kpar: var_k0 + var_par,
            mean_sq: mean[0] * mean[0],
            mean_nk: n[0] * mean[0],
            spread_sq: var_k0 - var_par,
        }
    }

    fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> [f64; 2] {
        let z: f64 = StandardNormal.sample(rng);
        let k = self.sigma * z;
        [self.mass + self.excess(k), k]
    }
}

/// Squared masses derived from the first two moments of `k`, in MeV².
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MassPair {
    pub m0_sq: f64,
    pub m_bare_sq: f64,
    /// `m_bare² − m0² = (ħc)² ⟨δk·δk⟩`. Not sign-constrained.
    pub gap: f64,
}

/// `m0² = (ħc)² ⟨k⟩·⟨k⟩` and `m_bare² = (ħc)² ⟨k·k⟩` from the mean and
/// covariance of `k` (fm⁻¹).
pub fn rest_and_bare_mass(mean: &[f64], covariance: &[Vec<f64>], metric: Metric) -> MassPair {
    let d = mean.len();
    assert!(
        covariance.len() == d && covariance.iter().all(|row| row.len() == d),
        "covariance must be {d}×{d}"
    );
    let spread: f64 = (0..d).map(|i| metric.sign(i) * covariance[i][i]).sum();
    let scale = HBAR_C * HBAR_C;
    let m0_sq = scale * metric.contract(mean, mean);
    let gap = scale * spread;
    MassPair {
        m0_sq,
        m_bare_sq: m0_sq + gap,
        gap,
    }
}

/// Masses and the spread of `m_bare²` for a displaced reference, in MeV
/// powers.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MassReport {
    pub gamma: f64,
    pub m0_sq: f64,
    pub m_bare_sq: f64,
    pub gap: f64,
    /// `⟨δ²(k·k)⟩_ref`
    pub t0: f64,
    /// `4‖Δk‖ ⟨δ(k·k) δ(n·k)⟩_ref`
    pub t1: f64,
    /// `4‖Δk‖² ⟨δ²(n·k)⟩_ref`
    pub t2: f64,
    /// `var(m_bare²) = t0 + t1 + t2`
    pub total: f64,
    /// `Δm_bare/m_bare = √total / (2 m_bare²)`
    pub relative_spread: f64,
    /// High-boost estimate `√(2γ) √⟨δ²(k_0 − k_∥)⟩ / m_bare`.
    pub relative_spread_high_gamma: f64,
    pub linear_term_vanishes: bool,
    pub n_sigma: f64,
    pub supra_reach: f64,
    /// `None` for a light-cone state.
    pub klein_gordon_residual: Option<f64>,
}

impl MassReport {
    pub const CSV_HEADER: [&'static str; 14] = [
        "gamma",
        "m0_sq",
        "m_bare_sq",
        "gap",
        "t0",
        "t1",
        "t2",
        "total",
        "relative_spread",
        "relative_spread_high_gamma",
        "linear_term_vanishes",
        "n_sigma",
        "supra_reach",
        "klein_gordon_residual",
    ];

    /// Fields in [`MassReport::CSV_HEADER`] order; floats with 17
    /// significant digits.
    pub fn csv_row(&self) -> Vec<String> {
        let f = |v: f64| format!("{v:.16e}");
        vec![
            f(self.gamma),
            f(self.m0_sq),
            f(self.m_bare_sq),
            f(self.gap),
            f(self.t0),
            f(self.t1),
            f(self.t2),
            f(self.total),
            f(self.relative_spread),
            f(self.relative_spread_high_gamma),
            self.linear_term_vanishes.to_string(),
            f(self.n_sigma),
            f(self.supra_reach),
            self.klein_gordon_residual.map(f).unwrap_or_default(),
        ]
    }
}

struct Displaced {
    m0_sq: f64,
    m_bare_sq: f64,
    gap: f64,
    terms: [f64; 3],
}

/// Everything in fm⁻¹ powers.
fn displace(reference: &ReferenceMoments, boost: &BoostSpec) -> Displaced {
    let norm = boost.delta_k_norm();
    let m0_sq = reference.mean_sq + 2.0 * norm * reference.mean_nk + boost.delta_k_sq();
    Displaced {
        m0_sq,
        m_bare_sq: m0_sq + reference.spread_sq,
        gap: reference.spread_sq,
        terms: [
            reference.var_kk,
            4.0 * norm * reference.cov_kk_nk,
            4.0 * norm * norm * reference.var_nk,
        ],
    }
}

/// Spread of `m_bare²` after displacing the reference by the boost's `Δk`:
/// `var = var_kk + 4‖Δk‖ cov + 4‖Δk‖² var_nk`. The reference moments must
/// have been taken along `boost.direction()`.
pub fn bare_mass_spread(
    reference: &ReferenceMoments,
    boost: &BoostSpec,
    n_sigma: f64,
) -> Result<MassReport> {
    reference.validate()?;
    let shell = displace(reference, boost);
    let mev4 = HBAR_C.powi(4);
    let mev2 = HBAR_C * HBAR_C;
    let [t0, t1, t2] = shell.terms.map(|t| t * mev4);
    let total = t0 + t1 + t2;
    let m_bare_sq = shell.m_bare_sq * mev2;
    let linear_term_vanishes = t1.abs() <= 1e-12 * total.max(f64::MIN_POSITIVE);
    if linear_term_vanishes && t2 > 0.0 {
        log::debug!("linear term vanishes: symmetric reference along n");
    }
    let mut report = MassReport {
        gamma: boost.gamma(),
        m0_sq: shell.m0_sq * mev2,
        m_bare_sq,
        gap: shell.gap * mev2,
        t0,
        t1,
        t2,
        total,
        relative_spread: total.sqrt() / (2.0 * m_bare_sq.abs()),
        relative_spread_high_gamma: high_gamma_spread(boost, reference)?,
        linear_term_vanishes,
        n_sigma,
        supra_reach: 0.0,
        klein_gordon_residual: klein_gordon_residual(reference, boost).ok(),
    };
    report.supra_reach = supraluminous_reach(boost.m0(), &report, n_sigma);
    Ok(report)
}

/// High-boost estimate `Δm/m ≈ √(2γ) √⟨δ²(k_0 − k_∥)⟩ / m_bare`.
pub fn high_gamma_spread(boost: &BoostSpec, reference: &ReferenceMoments) -> Result<f64> {
    let gamma = boost.gamma();
    if !(gamma >= 1.0) {
        return Err(Error::InvalidArgument(format!("γ = {gamma} below 1")));
    }
    if gamma < HIGH_GAMMA_WARNING {
        log::warn!("high-boost spread evaluated at γ = {gamma:.3}, outside its regime");
    }
    let spread = reference.var_k0_minus_kpar.max(0.0).sqrt();
    if spread == 0.0 {
        return Ok(0.0);
    }
    let m_bare = displace(reference, boost).m_bare_sq.abs().sqrt();
    if m_bare == 0.0 {
        return Err(Error::UndefinedResidual);
    }
    Ok((2.0 * gamma).sqrt() * spread / m_bare)
}

/// Magnitude of the most negative `m²` within `n_sigma` standard deviations
/// of the `m²` distribution: `√max(0, n_sigma·√var − m0²)` in MeV.
pub fn supraluminous_reach(m0: f64, report: &MassReport, n_sigma: f64) -> f64 {
    (n_sigma * report.total.sqrt() - m0 * m0).max(0.0).sqrt()
}

/// `√var(m_bare²) / m_bare²` — how far `k·k` is from a c-number.
pub fn klein_gordon_residual(reference: &ReferenceMoments, boost: &BoostSpec) -> Result<f64> {
    let shell = displace(reference, boost);
    if shell.m_bare_sq == 0.0 {
        return Err(Error::UndefinedResidual);
    }
    let total: f64 = shell.terms.iter().sum();
    Ok(total.max(0.0).sqrt() / shell.m_bare_sq.abs())
}

/// A named beam configuration: particle mass and energy, and a 1σ momentum
/// width of the rest-frame state.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scenario {
    pub name: String,
    /// MeV
    pub m0: f64,
    /// MeV
    pub energy: f64,
    /// MeV/c
    pub delta_p: f64,
    pub n_sigma: f64,
}

impl Scenario {
    pub fn preset(name: &str) -> Result<Self> {
        let (m0, energy, delta_p) = match name {
            "lep2-electron" => (ELECTRON_MASS, 100e3, 1e-6),
            "tevatron-proton" => (PROTON_MASS, 980e3, 1.0),
            "e300-supraluminal" => (ELECTRON_MASS, 300e3, 1e-6),
            other => {
                return Err(Error::InvalidArgument(format!(
                    "unknown preset {other:?}; expected one of {}",
                    PRESETS.join(", ")
                )))
            }
        };
        Ok(Scenario {
            name: name.to_string(),
            m0,
            energy,
            delta_p,
            n_sigma: 1.0,
        })
    }

    pub fn boost(&self) -> Result<BoostSpec> {
        BoostSpec::from_energy(self.m0, self.energy)
    }

    pub fn reference(&self) -> Result<OnShellReference> {
        OnShellReference::new(mev_to_inverse_fm(self.m0), mev_to_inverse_fm(self.delta_p))
    }

    pub fn run(&self) -> Result<MassReport> {
        let boost = self.boost()?;
        let moments = self.reference()?.moments_along(boost.direction());
        bare_mass_spread(&moments, &boost, self.n_sigma)
    }
}

/// Sampled variance of `(k + Δk)·(k + Δk)` in MeV⁴.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MonteCarloSpread {
    pub samples: usize,
    pub variance: f64,
    pub standard_error: f64,
    /// One seed per worker chunk.
    pub seeds: Vec<u64>,
}

/// Monte-Carlo estimate of `var(m_bare²)` with `chunks` independently
/// seeded generators (`seed + chunk`). Deterministic for fixed inputs.
pub fn monte_carlo_spread<D: KDistribution>(
    distribution: &D,
    boost: &BoostSpec,
    samples: usize,
    seed: u64,
    chunks: usize,
) -> Result<MonteCarloSpread> {
    if samples < 2 || chunks == 0 {
        return Err(Error::InvalidArgument(
            "need at least two samples and one chunk".into(),
        ));
    }
    let dk = boost.delta_k();
    let dk_sq = boost.delta_k_sq();
    let seeds: Vec<u64> = (0..chunks as u64).map(|c| seed.wrapping_add(c)).collect();
    let value = |k: [f64; 2]| {
        // k·k + 2Δk·k + Δk·Δk keeps the large boost terms apart
        k[0] * k[0] - k[1] * k[1] + 2.0 * (dk[0] * k[0] - dk[1] * k[1]) + dk_sq
    };
    // shift by a pilot value to keep the power sums well conditioned
    let shift = value(distribution.sample(&mut ChaCha8Rng::seed_from_u64(seed)));
    let sums: Vec<[f64; 5]> = seeds
        .par_iter()
        .enumerate()
        .map(|(c, &s)| {
            let count = samples / chunks + usize::from(c < samples % chunks);
            let mut rng = ChaCha8Rng::seed_from_u64(s);
            let mut acc = [0.0; 5];
            for _ in 0..count {
                let z = value(distribution.sample(&mut rng)) - shift;
                let z2 = z * z;
                acc[0] += 1.0;
                acc[1] += z;
                acc[2] += z2;
                acc[3] += z2 * z;
                acc[4] += z2 * z2;
            }
            acc
        })
        .collect();
    let mut total = [0.0; 5];
    for acc in &sums {
        for (t, a) in total.iter_mut().zip(acc) {
            *t += a;
        }
    }
    let n = total[0];
    let [e1, e2, e3, e4] = [total[1] / n, total[2] / n, total[3] / n, total[4] / n];
    let m2 = e2 - e1 * e1;
    let m4 = e4 - 4.0 * e1 * e3 + 6.0 * e1 * e1 * e2 - 3.0 * e1.powi(4);
    let variance = m2 * n / (n - 1.0);
    let mev4 = HBAR_C.powi(4);
    Ok(MonteCarloSpread {
        samples,
        variance: variance * mev4,
        standard_error: ((m4 - m2 * m2).max(0.0) / n).sqrt() * mev4,
        seeds,
    })
}
