//! Discretized wave-packets on a periodic one-dimensional box.
//!
//! Position samples are `x_j = -L/2 + j Δx`, momentum samples are stored
//! centered, `k_c = (c - n/2) Δk`. The transform pair uses the kernel
//! `⟨x|k⟩ = e^{-ixk} / √(2π)`, which makes `k = i d/dx` and
//! `[x, k] = -i`; it is the kernel under which `e^{iΔx k}` shifts positions
//! by `+Δx` and `e^{-iΔk x}` shifts momenta by `+Δk`.

use std::f64::consts::TAU;
use std::fmt;
use std::io::Write;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};

/// Fraction of the box, on each side, treated as the edge region.
pub const EDGE_FRACTION: f64 = 0.05;
/// Largest probability tolerated inside the edge region.
pub const EDGE_MASS_TOLERANCE: f64 = 1e-10;

const INV_SQRT_TAU: f64 = 0.398_942_280_401_432_7;

/// Uniform periodic grid with its dual momentum grid.
#[derive(Clone)]
pub struct Grid {
    inner: Arc<GridInner>,
}

struct GridInner {
    n_points: usize,
    box_length: f64,
    // e^{-2πi jm/n}
    forward: Arc<dyn Fft<f64>>,
    // e^{+2πi jm/n}
    inverse: Arc<dyn Fft<f64>>,
}

impl Grid {
    pub fn new(n_points: usize, box_length: f64) -> Result<Self> {
        if n_points < 8 {
            return Err(Error::InvalidArgument(format!(
                "n_points must be at least 8, got {n_points}"
            )));
        }
        if !n_points.is_multiple_of(2) {
            return Err(Error::InvalidArgument(format!(
                "n_points must be even, got {n_points}"
            )));
        }
        if !box_length.is_finite() || box_length <= 1e-9 {
            return Err(Error::InvalidArgument(format!(
                "box_length must be a finite length above 1e-9, got {box_length}"
            )));
        }
        let mut planner = FftPlanner::new();
        let forward = planner.plan_fft_forward(n_points);
        let inverse = planner.plan_fft_inverse(n_points);
        Ok(Grid {
            inner: Arc::new(GridInner {
                n_points,
                box_length,
                forward,
                inverse,
            }),
        })
    }

    #[inline]
    pub fn n_points(&self) -> usize {
        self.inner.n_points
    }

    #[inline]
    pub fn box_length(&self) -> f64 {
        self.inner.box_length
    }

    /// Position spacing `L / n`.
    #[inline]
    pub fn dx(&self) -> f64 {
        self.inner.box_length / self.inner.n_points as f64
    }

    /// Momentum spacing `2π / L`.
    #[inline]
    pub fn dk(&self) -> f64 {
        TAU / self.inner.box_length
    }

    /// Full momentum extent `2π / Δx`.
    #[inline]
    pub fn k_extent(&self) -> f64 {
        TAU / self.dx()
    }

    #[inline]
    pub fn x(&self, j: usize) -> f64 {
        -0.5 * self.box_length() + j as f64 * self.dx()
    }

    #[inline]
    pub fn k(&self, c: usize) -> f64 {
        (c as f64 - (self.n_points() / 2) as f64) * self.dk()
    }

    pub fn positions(&self) -> Vec<f64> {
        (0..self.n_points()).map(|j| self.x(j)).collect()
    }

    pub fn momenta(&self) -> Vec<f64> {
        (0..self.n_points()).map(|c| self.k(c)).collect()
    }

    /// Signed frequency index of centered momentum slot `c`.
    #[inline]
    fn frequency(&self, c: usize) -> isize {
        c as isize - (self.n_points() / 2) as isize
    }
}

impl PartialEq for Grid {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.inner, &other.inner)
            || (self.inner.n_points == other.inner.n_points
                && self.inner.box_length == other.inner.box_length)
    }
}

impl fmt::Debug for Grid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Grid")
            .field("n_points", &self.n_points())
            .field("box_length", &self.box_length())
            .finish()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Representation {
    Position,
    Momentum,
}

impl Representation {
    pub fn name(self) -> &'static str {
        match self {
            Representation::Position => "position",
            Representation::Momentum => "momentum",
        }
    }
}

/// Averages, spreads and the k-statistics entering the bare-mass spread.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Moments {
    pub mean_x: f64,
    pub mean_k: f64,
    pub spread_x: f64,
    pub spread_k: f64,
    /// `⟨δ²(n·k)⟩`
    pub var_nk: f64,
    /// `⟨δ²(k·k)⟩`
    pub var_kk: f64,
    /// `⟨δ(k·k) δ(n·k)⟩`
    pub cov_kk_nk: f64,
}

impl Moments {
    pub fn uncertainty_product(&self) -> f64 {
        self.spread_x * self.spread_k
    }
}

/// Complex amplitudes of a pure state on a [`Grid`].
///
/// Values are immutable; every operation returns a new packet.
#[derive(Debug, Clone)]
pub struct WavePacket {
    grid: Grid,
    amplitudes: Vec<Complex64>,
    representation: Representation,
}

impl WavePacket {
    /// Wraps raw amplitudes without normalizing them.
    pub fn from_amplitudes(
        grid: &Grid,
        amplitudes: Vec<Complex64>,
        representation: Representation,
    ) -> Result<Self> {
        if amplitudes.len() != grid.n_points() {
            return Err(Error::InvalidArgument(format!(
                "expected {} amplitudes, got {}",
                grid.n_points(),
                amplitudes.len()
            )));
        }
        if amplitudes
            .iter()
            .any(|a| !a.re.is_finite() || !a.im.is_finite())
        {
            return Err(Error::InvalidArgument("non-finite amplitude".into()));
        }
        Ok(WavePacket {
            grid: grid.clone(),
            amplitudes,
            representation,
        })
    }

    /// Normalized Gaussian `∝ exp(-(x - x0)² / (4σ²) - i k0 x)`.
    ///
    /// With the transform kernel of this module the packet has `⟨x⟩ = x0`,
    /// `⟨k⟩ = k0`, `δx = σ` and `δk = 1 / (2σ)`.
    pub fn gaussian(grid: &Grid, x0: f64, k0: f64, sigma_x: f64) -> Result<Self> {
        let length = grid.box_length();
        if !(x0.is_finite() && k0.is_finite() && sigma_x.is_finite()) || sigma_x <= 0.0 {
            return Err(Error::InvalidArgument(format!(
                "gaussian parameters must be finite with sigma > 0 (x0={x0}, k0={k0}, sigma={sigma_x})"
            )));
        }
        if sigma_x >= length / 16.0 {
            return Err(Error::Domain(format!(
                "sigma_x = {sigma_x} does not fit the box: must stay below L/16 = {}",
                length / 16.0
            )));
        }
        if x0.abs() >= 0.5 * length - 8.0 * sigma_x {
            return Err(Error::Domain(format!(
                "|x0| = {} reaches within 8 sigma of the box edge",
                x0.abs()
            )));
        }
        let sigma_k = 0.5 / sigma_x;
        if k0.abs() >= 0.5 * grid.k_extent() - 8.0 * sigma_k {
            return Err(Error::Domain(format!(
                "|k0| = {} reaches within 8 sigma_k of the momentum-grid edge",
                k0.abs()
            )));
        }
        let amplitudes: Vec<Complex64> = grid
            .positions()
            .into_iter()
            .map(|x| {
                let envelope = (-(x - x0).powi(2) / (4.0 * sigma_x * sigma_x)).exp();
                Complex64::from_polar(envelope, -k0 * x)
            })
            .collect();
        let packet = WavePacket {
            grid: grid.clone(),
            amplitudes,
            representation: Representation::Position,
        };
        Ok(packet.normalized())
    }

    #[inline]
    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    #[inline]
    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    #[inline]
    pub fn representation(&self) -> Representation {
        self.representation
    }

    fn measure(&self) -> f64 {
        match self.representation {
            Representation::Position => self.grid.dx(),
            Representation::Momentum => self.grid.dk(),
        }
    }

    /// `Σ |ψ|² Δ` in the current representation.
    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>() * self.measure()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    pub fn normalized(&self) -> Self {
        let scale = 1.0 / self.norm();
        self.scaled(Complex64::new(scale, 0.0))
    }

    /// Multiplies every amplitude by `factor`.
    pub fn scaled(&self, factor: Complex64) -> Self {
        WavePacket {
            grid: self.grid.clone(),
            amplitudes: self.amplitudes.iter().map(|a| a * factor).collect(),
            representation: self.representation,
        }
    }

    pub(crate) fn map_amplitudes<F>(&self, mut f: F) -> Self
    where
        F: FnMut(usize, Complex64) -> Complex64,
    {
        WavePacket {
            grid: self.grid.clone(),
            amplitudes: self
                .amplitudes
                .iter()
                .enumerate()
                .map(|(i, &a)| f(i, a))
                .collect(),
            representation: self.representation,
        }
    }

    pub fn to_momentum(&self) -> Result<Self> {
        if self.representation != Representation::Position {
            return Err(Error::Representation {
                expected: Representation::Position.name(),
                found: self.representation.name(),
            });
        }
        let grid = &self.grid;
        let n = grid.n_points();
        let mut buffer = self.amplitudes.clone();
        grid.inner.inverse.process(&mut buffer);
        let scale = grid.dx() * INV_SQRT_TAU;
        let amplitudes = (0..n)
            .map(|c| {
                let m = grid.frequency(c);
                let sign = if m.rem_euclid(2) == 0 { scale } else { -scale };
                buffer[m.rem_euclid(n as isize) as usize] * sign
            })
            .collect();
        Ok(WavePacket {
            grid: grid.clone(),
            amplitudes,
            representation: Representation::Momentum,
        })
    }

    pub fn to_position(&self) -> Result<Self> {
        if self.representation != Representation::Momentum {
            return Err(Error::Representation {
                expected: Representation::Momentum.name(),
                found: self.representation.name(),
            });
        }
        let grid = &self.grid;
        let n = grid.n_points();
        let mut buffer = vec![Complex64::new(0.0, 0.0); n];
        for (c, a) in self.amplitudes.iter().enumerate() {
            let m = grid.frequency(c);
            let sign = if m.rem_euclid(2) == 0 { 1.0 } else { -1.0 };
            buffer[m.rem_euclid(n as isize) as usize] = a * sign;
        }
        grid.inner.forward.process(&mut buffer);
        let scale = grid.dk() * INV_SQRT_TAU;
        for a in buffer.iter_mut() {
            *a *= scale;
        }
        Ok(WavePacket {
            grid: grid.clone(),
            amplitudes: buffer,
            representation: Representation::Position,
        })
    }

    /// Same state in the position representation, transforming if needed.
    pub fn in_position(&self) -> Self {
        match self.representation {
            Representation::Position => self.clone(),
            Representation::Momentum => self.to_position().expect("tag checked"),
        }
    }

    /// Same state in the momentum representation, transforming if needed.
    pub fn in_momentum(&self) -> Self {
        match self.representation {
            Representation::Momentum => self.clone(),
            Representation::Position => self.to_momentum().expect("tag checked"),
        }
    }

    /// `⟨self|other⟩`, antilinear in `self`.
    pub fn inner(&self, other: &WavePacket) -> Result<Complex64> {
        if self.grid != other.grid {
            return Err(Error::InvalidArgument(format!(
                "inner product across different grids ({:?} vs {:?})",
                self.grid, other.grid
            )));
        }
        let (a, b) = if self.representation == other.representation {
            (self.clone(), other.clone())
        } else {
            (self.in_position(), other.in_position())
        };
        let sum: Complex64 = a
            .amplitudes
            .iter()
            .zip(&b.amplitudes)
            .map(|(x, y)| x.conj() * y)
            .sum();
        Ok(sum * a.measure())
    }

    /// Probability fractions inside the position and momentum edge bands.
    pub fn edge_mass(&self) -> (f64, f64) {
        let position = self.in_position();
        let momentum = self.in_momentum();
        let grid = &self.grid;
        let x_edge = 0.5 * grid.box_length() * (1.0 - 2.0 * EDGE_FRACTION);
        let k_edge = 0.5 * grid.k_extent() * (1.0 - 2.0 * EDGE_FRACTION);
        (
            band_fraction(&position.amplitudes, |j| grid.x(j).abs() > x_edge),
            band_fraction(&momentum.amplitudes, |c| grid.k(c).abs() > k_edge),
        )
    }

    pub(crate) fn check_position_edge(&self, context: &str) -> Result<()> {
        debug_assert_eq!(self.representation, Representation::Position);
        let grid = &self.grid;
        let edge = 0.5 * grid.box_length() * (1.0 - 2.0 * EDGE_FRACTION);
        let mass = band_fraction(&self.amplitudes, |j| grid.x(j).abs() > edge);
        if mass > EDGE_MASS_TOLERANCE {
            return Err(Error::Domain(format!(
                "{context}: position edge mass {mass:e} exceeds {EDGE_MASS_TOLERANCE:e}"
            )));
        }
        Ok(())
    }

    pub(crate) fn check_momentum_edge(&self, context: &str) -> Result<()> {
        debug_assert_eq!(self.representation, Representation::Momentum);
        let grid = &self.grid;
        let edge = 0.5 * grid.k_extent() * (1.0 - 2.0 * EDGE_FRACTION);
        let mass = band_fraction(&self.amplitudes, |c| grid.k(c).abs() > edge);
        if mass > EDGE_MASS_TOLERANCE {
            return Err(Error::Domain(format!(
                "{context}: momentum edge mass {mass:e} exceeds {EDGE_MASS_TOLERANCE:e}"
            )));
        }
        Ok(())
    }

    /// Averages and spreads in both representations, plus the k-statistics
    /// along the unit direction `direction` (±1 on a one-dimensional grid).
    pub fn moments(&self, direction: f64) -> Result<Moments> {
        if (direction.abs() - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidArgument(format!(
                "direction must be a unit vector, got {direction}"
            )));
        }
        let position = self.in_position();
        let momentum = self.in_momentum();
        position.check_position_edge("moments")?;
        momentum.check_momentum_edge("moments")?;

        let grid = &self.grid;
        let xs = unwrapped_coordinates(&position.amplitudes, grid.positions(), grid.box_length());
        let ks = unwrapped_coordinates(&momentum.amplitudes, grid.momenta(), grid.k_extent());

        let (mean_x, var_x) = weighted_mean_var(&position.amplitudes, &xs);
        let (mean_k, var_k) = weighted_mean_var(&momentum.amplitudes, &ks);

        let weights: Vec<f64> = momentum.amplitudes.iter().map(|a| a.norm_sqr()).collect();
        let total: f64 = weights.iter().sum();
        let mut mean_nk = 0.0;
        let mut mean_kk = 0.0;
        for (w, k) in weights.iter().zip(&ks) {
            mean_nk += w * direction * k;
            mean_kk += w * k * k;
        }
        mean_nk /= total;
        mean_kk /= total;
        let (mut var_nk, mut var_kk, mut cov) = (0.0, 0.0, 0.0);
        for (w, k) in weights.iter().zip(&ks) {
            let dn = direction * k - mean_nk;
            let dq = k * k - mean_kk;
            var_nk += w * dn * dn;
            var_kk += w * dq * dq;
            cov += w * dq * dn;
        }

        Ok(Moments {
            mean_x,
            mean_k,
            spread_x: var_x.sqrt(),
            spread_k: var_k.sqrt(),
            var_nk: var_nk / total,
            var_kk: var_kk / total,
            cov_kk_nk: cov / total,
        })
    }

    /// Rows `x,re,im` of the position amplitudes.
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let position = self.in_position();
        let mut out = csv::Writer::from_writer(writer);
        out.write_record(["x", "re", "im"])?;
        for (j, a) in position.amplitudes.iter().enumerate() {
            out.write_record([
                format!("{:.16e}", self.grid.x(j)),
                format!("{:.16e}", a.re),
                format!("{:.16e}", a.im),
            ])?;
        }
        out.flush()?;
        Ok(())
    }

    /// Little-endian `f64` triples `(x, re, im)`, one per grid point.
    pub fn write_binary<W: Write>(&self, mut writer: W) -> Result<()> {
        let position = self.in_position();
        for (j, a) in position.amplitudes.iter().enumerate() {
            writer.write_all(&self.grid.x(j).to_le_bytes())?;
            writer.write_all(&a.re.to_le_bytes())?;
            writer.write_all(&a.im.to_le_bytes())?;
        }
        Ok(())
    }
}

fn band_fraction<F: Fn(usize) -> bool>(amps: &[Complex64], in_band: F) -> f64 {
    let mut total = 0.0;
    let mut outer = 0.0;
    for (i, a) in amps.iter().enumerate() {
        let p = a.norm_sqr();
        total += p;
        if in_band(i) {
            outer += p;
        }
    }
    if total > 0.0 {
        outer / total
    } else {
        0.0
    }
}

/// Maps periodic coordinates onto the period centered at the circular mean
/// of the distribution, so a packet straddling the seam is not split.
fn unwrapped_coordinates(amps: &[Complex64], coords: Vec<f64>, period: f64) -> Vec<f64> {
    let z: Complex64 = amps
        .iter()
        .zip(&coords)
        .map(|(a, &c)| Complex64::from_polar(a.norm_sqr(), TAU * c / period))
        .sum();
    let center = z.arg() * period / TAU;
    coords
        .into_iter()
        .map(|c| center + (c - center + 0.5 * period).rem_euclid(period) - 0.5 * period)
        .collect()
}

fn weighted_mean_var(amps: &[Complex64], coords: &[f64]) -> (f64, f64) {
    let mut total = 0.0;
    let mut first = 0.0;
    for (a, c) in amps.iter().zip(coords) {
        let w = a.norm_sqr();
        total += w;
        first += w * c;
    }
    let mean = first / total;
    let var = amps
        .iter()
        .zip(coords)
        .map(|(a, c)| a.norm_sqr() * (c - mean).powi(2))
        .sum::<f64>()
        / total;
    (mean, var)
}
