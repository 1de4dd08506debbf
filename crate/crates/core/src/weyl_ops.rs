//! Weyl translations of wave-packets and the phases they pick up along
//! closed and open paths in (x, k) space.
//!
//! `U_Δx = e^{iΔx k}` is diagonal in the momentum representation and
//! `U_Δk = e^{-iΔk x}` in the position representation, so every composition
//! here is a sequence of exact unitary phase multiplications. Both operators
//! shift averages by `+Δx` and `+Δk` respectively and satisfy
//! `U_Δx U_Δk = e^{iΔxΔk} U_Δk U_Δx`.

use std::io::{Read, Write};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid_state::WavePacket;
use crate::metric::{wrap_phase, Metric};

/// Largest `|dx·dk|` allowed for a single transport step.
pub const MAX_STEP_AREA: f64 = 0.1;

const NORM_TOLERANCE: f64 = 1e-9;
const CLOSURE_TOLERANCE: f64 = 1e-12;

/// A `(Δx, Δk)` pair of d-vectors.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhaseDisplacement {
    dx: Vec<f64>,
    dk: Vec<f64>,
    metric: Metric,
}

impl PhaseDisplacement {
    pub fn new(dx: Vec<f64>, dk: Vec<f64>, metric: Metric) -> Result<Self> {
        if dx.is_empty() || dx.len() != dk.len() {
            return Err(Error::InvalidArgument(format!(
                "displacement legs must be non-empty and of equal dimension ({} vs {})",
                dx.len(),
                dk.len()
            )));
        }
        let this = PhaseDisplacement { dx, dk, metric };
        if !this.contraction().is_finite() {
            return Err(Error::InvalidArgument("non-finite displacement".into()));
        }
        Ok(this)
    }

    pub fn dx(&self) -> &[f64] {
        &self.dx
    }

    pub fn dk(&self) -> &[f64] {
        &self.dk
    }

    pub fn metric(&self) -> Metric {
        self.metric
    }

    /// `g_{μν} Δx^μ Δk^ν`
    pub fn contraction(&self) -> f64 {
        self.metric.contract(&self.dx, &self.dk)
    }

    /// Phase of `U_Δx U_Δk` relative to `U_Δk U_Δx`.
    pub fn ordering_phase(&self) -> f64 {
        wrap_phase(self.contraction())
    }

    /// Phase acquired around the Δx → Δk → −Δx → −Δk loop.
    pub fn loop_phase(&self) -> f64 {
        wrap_phase(-self.contraction())
    }
}

/// Operator order used to build an image state.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Ordering {
    /// `U_Δx U_Δk`: the momentum shift acts first.
    Xk,
    /// `U_Δk U_Δx`: the position shift acts first (the reference image state).
    Kx,
}

fn check_normalized(psi: &WavePacket) -> Result<()> {
    let norm = psi.norm();
    if (norm - 1.0).abs() > NORM_TOLERANCE {
        return Err(Error::InvalidArgument(format!(
            "packet must be normalized, norm = {norm}"
        )));
    }
    Ok(())
}

/// Applies `U_Δx`; the result is returned in the position representation.
pub fn translate_x(psi: &WavePacket, dx: f64) -> Result<WavePacket> {
    if !dx.is_finite() {
        return Err(Error::InvalidArgument(format!("non-finite dx = {dx}")));
    }
    check_normalized(psi)?;
    if dx == 0.0 {
        return Ok(psi.clone());
    }
    let grid = psi.grid().clone();
    let shifted = psi
        .in_momentum()
        .map_amplitudes(|c, a| a * Complex64::from_polar(1.0, dx * grid.k(c)))
        .to_position()?;
    shifted.check_position_edge("translate_x")?;
    Ok(shifted)
}

/// Applies `U_Δk`; the result is returned in the momentum representation.
pub fn translate_k(psi: &WavePacket, dk: f64) -> Result<WavePacket> {
    if !dk.is_finite() {
        return Err(Error::InvalidArgument(format!("non-finite dk = {dk}")));
    }
    check_normalized(psi)?;
    if dk == 0.0 {
        return Ok(psi.clone());
    }
    let grid = psi.grid().clone();
    let shifted = psi
        .in_position()
        .map_amplitudes(|j, a| a * Complex64::from_polar(1.0, -dk * grid.x(j)))
        .to_momentum()?;
    shifted.check_momentum_edge("translate_k")?;
    Ok(shifted)
}

/// Image state translated by `(dx, dk)` with the given operator order.
pub fn displace(psi: &WavePacket, dx: f64, dk: f64, order: Ordering) -> Result<WavePacket> {
    match order {
        Ordering::Kx => translate_k(&translate_x(psi, dx)?, dk),
        Ordering::Xk => translate_x(&translate_k(psi, dk)?, dx),
    }
}

/// Symmetric displacement `e^{i(dx k − dk x)}`, realized as half x-shifts
/// around a full k-shift.
pub fn weyl_displace(psi: &WavePacket, dx: f64, dk: f64) -> Result<WavePacket> {
    let half = translate_x(psi, 0.5 * dx)?;
    let mid = translate_k(&half, dk)?;
    translate_x(&mid, 0.5 * dx)
}

/// `arg⟨a|b⟩` in (−π, π].
pub fn pancharatnam_phase(a: &WavePacket, b: &WavePacket) -> Result<f64> {
    let z = a.inner(b)?;
    if z.norm() <= 1e-6 {
        return Err(Error::UndefinedPhase(z.norm()));
    }
    Ok(wrap_phase(z.arg()))
}

#[derive(Debug, Clone)]
pub struct LoopOutcome {
    pub state: WavePacket,
    /// `arg⟨ψ|U_loop ψ⟩`, wrapped to (−π, π].
    pub phase: f64,
    /// `|⟨ψ|U_loop ψ⟩|`
    pub fidelity: f64,
}

/// Transports `psi` around the rectangle Δx → Δk → −Δx → −Δk.
pub fn rect_loop_transport(psi: &WavePacket, dx: f64, dk: f64) -> Result<LoopOutcome> {
    let a = translate_x(psi, dx)?;
    let b = translate_k(&a, dk)?;
    let c = translate_x(&b, -dx)?;
    let state = translate_k(&c, -dk)?.in_position();
    let z = psi.inner(&state)?;
    Ok(LoopOutcome {
        phase: wrap_phase(z.arg()),
        fidelity: z.norm(),
        state,
    })
}

/// One sample of a path in (x, k) space.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhasePoint {
    pub x: Vec<f64>,
    pub k: Vec<f64>,
}

impl PhasePoint {
    pub fn new(x: Vec<f64>, k: Vec<f64>) -> Self {
        PhasePoint { x, k }
    }

    pub fn planar(x: f64, k: f64) -> Self {
        PhasePoint {
            x: vec![x],
            k: vec![k],
        }
    }

    fn distance(&self, other: &PhasePoint) -> f64 {
        self.x
            .iter()
            .zip(&other.x)
            .chain(self.k.iter().zip(&other.k))
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt()
    }

    fn lerp(&self, other: &PhasePoint, t: f64) -> PhasePoint {
        let mix = |a: &[f64], b: &[f64]| -> Vec<f64> {
            a.iter().zip(b).map(|(p, q)| p + t * (q - p)).collect()
        };
        PhasePoint {
            x: mix(&self.x, &other.x),
            k: mix(&self.k, &other.k),
        }
    }
}

/// Ordered polyline of (x, k) samples.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhasePath {
    points: Vec<PhasePoint>,
    closed: bool,
    metric: Metric,
}

impl PhasePath {
    /// Builds a path, marking it closed when the end points coincide.
    pub fn new(points: Vec<PhasePoint>, metric: Metric) -> Result<Self> {
        validate_points(&points)?;
        let closed = points[0].distance(points.last().unwrap()) <= CLOSURE_TOLERANCE;
        Ok(PhasePath {
            points,
            closed,
            metric,
        })
    }

    pub fn open(points: Vec<PhasePoint>, metric: Metric) -> Result<Self> {
        validate_points(&points)?;
        Ok(PhasePath {
            points,
            closed: false,
            metric,
        })
    }

    pub fn closed(points: Vec<PhasePoint>, metric: Metric) -> Result<Self> {
        validate_points(&points)?;
        let gap = points[0].distance(points.last().unwrap());
        if gap > CLOSURE_TOLERANCE {
            return Err(Error::MalformedPath(format!(
                "closed path must end where it starts (gap {gap:e})"
            )));
        }
        Ok(PhasePath {
            points,
            closed: true,
            metric,
        })
    }

    /// Closed Euclidean loop through the given (x, k) vertices.
    pub fn polygon(vertices: &[(f64, f64)]) -> Result<Self> {
        let mut points: Vec<PhasePoint> = vertices
            .iter()
            .map(|&(x, k)| PhasePoint::planar(x, k))
            .collect();
        if let Some(first) = points.first().cloned() {
            points.push(first);
        }
        PhasePath::closed(points, Metric::Euclidean)
    }

    /// The Δx → Δk → −Δx → −Δk rectangle starting at the origin.
    pub fn rectangle(dx: f64, dk: f64) -> Result<Self> {
        PhasePath::polygon(&[(0.0, 0.0), (dx, 0.0), (dx, dk), (0.0, dk)])
    }

    /// Counter-clockwise circle in the (x, k) plane sampled by `segments`
    /// chords, starting at `(x_center + radius, k_center)`.
    pub fn circle(x_center: f64, k_center: f64, radius: f64, segments: usize) -> Result<Self> {
        if segments < 3 || !(radius > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "circle needs radius > 0 and at least 3 segments (r={radius}, n={segments})"
            )));
        }
        let mut points: Vec<PhasePoint> = (0..segments)
            .map(|i| {
                let theta = std::f64::consts::TAU * i as f64 / segments as f64;
                PhasePoint::planar(
                    x_center + radius * theta.cos(),
                    k_center + radius * theta.sin(),
                )
            })
            .collect();
        points.push(points[0].clone());
        PhasePath::closed(points, Metric::Euclidean)
    }

    pub fn points(&self) -> &[PhasePoint] {
        &self.points
    }

    pub fn is_closed(&self) -> bool {
        self.closed
    }

    pub fn metric(&self) -> Metric {
        self.metric
    }

    pub fn dimension(&self) -> usize {
        self.points[0].x.len()
    }

    pub fn with_metric(mut self, metric: Metric) -> Self {
        self.metric = metric;
        self
    }

    pub fn reversed(&self) -> Self {
        let mut points = self.points.clone();
        points.reverse();
        PhasePath {
            points,
            closed: self.closed,
            metric: self.metric,
        }
    }

    /// Euclidean arc length of the polyline in (x, k) space.
    pub fn length(&self) -> f64 {
        self.points.windows(2).map(|w| w[0].distance(&w[1])).sum()
    }

    /// Resamples the polyline at `segments` equal arc-length steps.
    /// Vertices of the original polyline are not preserved in general.
    pub fn resample_uniform(&self, segments: usize) -> Result<Self> {
        if segments == 0 {
            return Err(Error::InvalidArgument("need at least one segment".into()));
        }
        let cumulative: Vec<f64> = std::iter::once(0.0)
            .chain(self.points.windows(2).scan(0.0, |acc, w| {
                *acc += w[0].distance(&w[1]);
                Some(*acc)
            }))
            .collect();
        let total = *cumulative.last().unwrap();
        if !(total > 0.0) || !total.is_finite() {
            return Err(Error::MalformedPath(format!(
                "path has no usable arc length ({total})"
            )));
        }
        let mut points = Vec::with_capacity(segments + 1);
        points.push(self.points[0].clone());
        let mut seg = 0;
        for i in 1..segments {
            let target = total * i as f64 / segments as f64;
            while cumulative[seg + 1] < target {
                seg += 1;
            }
            let span = cumulative[seg + 1] - cumulative[seg];
            let t = if span > 0.0 {
                (target - cumulative[seg]) / span
            } else {
                0.0
            };
            points.push(self.points[seg].lerp(&self.points[seg + 1], t));
        }
        points.push(self.points.last().unwrap().clone());
        if self.closed {
            // keep closure exact
            let first = points[0].clone();
            *points.last_mut().unwrap() = first;
        }
        Ok(PhasePath {
            points,
            closed: self.closed,
            metric: self.metric,
        })
    }

    /// Shoelace area `½ Σ (x_i k_{i+1} − x_{i+1} k_i)` of a planar path,
    /// positive for counter-clockwise loops in the (x, k) plane.
    pub fn shoelace_area(&self) -> Result<f64> {
        if self.dimension() != 1 {
            return Err(Error::MalformedPath(format!(
                "shoelace area needs a planar path, got dimension {}",
                self.dimension()
            )));
        }
        Ok(0.5
            * self
                .points
                .windows(2)
                .map(|w| w[0].x[0] * w[1].k[0] - w[1].x[0] * w[0].k[0])
                .sum::<f64>())
    }

    /// Reads `x,k` (or `x0..xd-1,k0..kd-1`) rows after a mandatory header.
    pub fn from_csv<R: Read>(reader: R, metric: Metric) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new()
            .has_headers(true)
            .trim(csv::Trim::All)
            .from_reader(reader);
        let columns = rdr.headers()?.len();
        if columns < 2 || columns % 2 != 0 {
            return Err(Error::MalformedPath(format!(
                "expected an even number (>= 2) of columns, header has {columns}"
            )));
        }
        let d = columns / 2;
        let mut points = Vec::new();
        for (row, record) in rdr.records().enumerate() {
            let record = record?;
            let values = record
                .iter()
                .map(|f| {
                    f.parse::<f64>().map_err(|_| {
                        Error::MalformedPath(format!("row {}: cannot parse '{f}'", row + 1))
                    })
                })
                .collect::<Result<Vec<f64>>>()?;
            if values.len() != columns {
                return Err(Error::MalformedPath(format!(
                    "row {} has {} fields, expected {columns}",
                    row + 1,
                    values.len()
                )));
            }
            points.push(PhasePoint::new(values[..d].to_vec(), values[d..].to_vec()));
        }
        PhasePath::new(points, metric)
    }

    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let d = self.dimension();
        let mut out = csv::Writer::from_writer(writer);
        let header: Vec<String> = if d == 1 {
            vec!["x".into(), "k".into()]
        } else {
            (0..d)
                .map(|i| format!("x{i}"))
                .chain((0..d).map(|i| format!("k{i}")))
                .collect()
        };
        out.write_record(&header)?;
        for p in &self.points {
            out.write_record(p.x.iter().chain(&p.k).map(|v| format!("{v:.16e}")))?;
        }
        out.flush()?;
        Ok(())
    }
}

fn validate_points(points: &[PhasePoint]) -> Result<()> {
    if points.len() < 2 {
        return Err(Error::MalformedPath(format!(
            "a path needs at least 2 samples, got {}",
            points.len()
        )));
    }
    let d = points[0].x.len();
    if d == 0 {
        return Err(Error::MalformedPath("zero-dimensional samples".into()));
    }
    for (i, p) in points.iter().enumerate() {
        if p.x.len() != d || p.k.len() != d {
            return Err(Error::MalformedPath(format!(
                "sample {i} has dimensions ({}, {}), expected ({d}, {d})",
                p.x.len(),
                p.k.len()
            )));
        }
        if p.x.iter().chain(&p.k).any(|v| !v.is_finite()) {
            return Err(Error::MalformedPath(format!("sample {i} is not finite")));
        }
    }
    Ok(())
}

/// Midpoint quadratures of the open-path action.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ActionQuadrature {
    /// `S = −∫ k·dx`
    pub action: f64,
    /// `+∫ x·dk`
    pub dual: f64,
    /// `(x·k)|_f − (x·k)|_i`; `action − dual = −boundary`.
    pub boundary: f64,
}

/// Midpoint quadrature of `−∫k·dx` and `+∫x·dk` along the polyline,
/// contracted with the path's metric.
///
/// On straight segments the midpoint rule is exact for both integrands, so
/// the two routes differ by the boundary term up to round-off.
pub fn geometric_phase_quadrature(path: &PhasePath) -> ActionQuadrature {
    let metric = path.metric();
    let mut action = 0.0;
    let mut dual = 0.0;
    for w in path.points().windows(2) {
        let (a, b) = (&w[0], &w[1]);
        let dx: Vec<f64> = b.x.iter().zip(&a.x).map(|(p, q)| p - q).collect();
        let dk: Vec<f64> = b.k.iter().zip(&a.k).map(|(p, q)| p - q).collect();
        let k_mid: Vec<f64> = b.k.iter().zip(&a.k).map(|(p, q)| 0.5 * (p + q)).collect();
        let x_mid: Vec<f64> = b.x.iter().zip(&a.x).map(|(p, q)| 0.5 * (p + q)).collect();
        action -= metric.contract(&k_mid, &dx);
        dual += metric.contract(&x_mid, &dk);
    }
    let first = &path.points()[0];
    let last = path.points().last().unwrap();
    let boundary = metric.contract(&last.x, &last.k) - metric.contract(&first.x, &first.k);
    ActionQuadrature {
        action,
        dual,
        boundary,
    }
}

#[derive(Debug, Clone)]
pub struct TransportOutcome {
    pub state: WavePacket,
    /// Measured phase relative to the reference state, wrapped to (−π, π].
    pub phase: f64,
    /// Sum of the measured per-step phase increments.
    pub unwrapped_phase: f64,
    /// Phase predicted by the step geometry: `−S − k_i·Δx` on the
    /// resampled path (the `k_i·Δx` part vanishes for `k_i = 0`).
    pub predicted_phase: f64,
    /// `k_i·Δx`, reported separately rather than folded into `S`.
    pub boundary_offset: f64,
    /// `|⟨reference|state⟩|`; the reference is the input state for closed
    /// paths and `U_Δk U_Δx ψ` for open ones.
    pub fidelity: f64,
    /// The path actually stepped through.
    pub steps: PhasePath,
}

/// Transports `psi` along a planar (x, k) path resampled to `segments`
/// equal arc-length steps.
///
/// Each step is the symmetric displacement `e^{i(dx k − dk x)}`, so the
/// product over a closed loop is `e^{−iA}` with `A` the shoelace area of the
/// stepped polygon; smooth loops converge to their area at second order.
pub fn path_transport(
    psi: &WavePacket,
    path: &PhasePath,
    segments: usize,
) -> Result<TransportOutcome> {
    if path.dimension() != 1 {
        return Err(Error::MalformedPath(format!(
            "grid transport needs a planar (x, k) path, got dimension {}",
            path.dimension()
        )));
    }
    check_normalized(psi)?;
    let steps = path.resample_uniform(segments)?;
    let pts = steps.points();
    for (i, w) in pts.windows(2).enumerate() {
        let area = ((w[1].x[0] - w[0].x[0]) * (w[1].k[0] - w[0].k[0])).abs();
        if area >= MAX_STEP_AREA {
            return Err(Error::InvalidArgument(format!(
                "step {i} spans |dx·dk| = {area:.3e}, above {MAX_STEP_AREA}; use more steps"
            )));
        }
    }

    let start = &pts[0];
    let mut state = psi.clone();
    let mut previous_arg = 0.0;
    let mut unwrapped = 0.0;
    for (i, w) in pts.windows(2).enumerate() {
        let dx = w[1].x[0] - w[0].x[0];
        let dk = w[1].k[0] - w[0].k[0];
        state = weyl_displace(&state, dx, dk)?;
        let reference = weyl_displace(psi, w[1].x[0] - start.x[0], w[1].k[0] - start.k[0])?;
        let z = reference.inner(&state)?;
        if z.norm() <= 1e-6 {
            return Err(Error::UndefinedPhase(z.norm()));
        }
        let arg = z.arg();
        unwrapped += wrap_phase(arg - previous_arg);
        previous_arg = arg;
        log::trace!("step {i}: accumulated phase {unwrapped}");
    }
    let state = state.in_position();

    let last = pts.last().unwrap();
    let total_dx = last.x[0] - start.x[0];
    let total_dk = last.k[0] - start.k[0];
    // e^{i(a k − b x)} = e^{iab/2} U_Δk U_Δx
    unwrapped += 0.5 * total_dx * total_dk;
    let reference = if steps.is_closed() {
        psi.in_position()
    } else {
        displace(psi, total_dx, total_dk, Ordering::Kx)?.in_position()
    };
    let z = reference.inner(&state)?;

    let quadrature = geometric_phase_quadrature(&steps);
    let boundary_offset = start.k[0] * total_dx;
    Ok(TransportOutcome {
        phase: wrap_phase(z.arg()),
        unwrapped_phase: unwrapped,
        predicted_phase: -quadrature.action - boundary_offset,
        boundary_offset,
        fidelity: z.norm(),
        state,
        steps,
    })
}
