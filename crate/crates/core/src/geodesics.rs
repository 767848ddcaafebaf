//! Geodesics by initial-value shooting, two-point shooting, and sideways
//! relaxation of a sampled path; plus a bump probe of the second variation.

use alloc::vec::Vec;

use libm::{atan2, ceil, cos, sin, sqrt};

use crate::error::{GeomError, Result};
use crate::numeric::{self, norm};
use crate::paths::{chart_tangents, Path};
use crate::surface::{ChartPoint, Metric, Surface, SurfaceKind, TangentVector};

/// Default integration step as a fraction of the surface feature scale.
pub const STEP_FRACTION: f64 = 2.5e-3;

/// Integration step used for geodesic shooting on `surface`.
pub fn shooting_step(surface: &Surface) -> f64 {
    STEP_FRACTION * surface.feature_scale()
}

/// A geodesic segment obtained by shooting.
#[derive(Debug, Clone, PartialEq)]
pub struct GeodesicShot {
    pub start: ChartPoint,
    /// Unit launch direction.
    pub direction: TangentVector,
    pub length: f64,
    /// Constant-speed samples; sample `k` sits at arclength `k·length/(n-1)`.
    pub result_path: Path,
    /// Unit velocity at the end point, in chart components.
    pub end_velocity: [f64; 2],
}

impl GeodesicShot {
    pub fn end(&self) -> ChartPoint {
        self.result_path.end()
    }

    /// Arclength parameter of each sample.
    pub fn parameters(&self) -> Vec<f64> {
        let n = self.result_path.len();
        (0..n)
            .map(|k| self.length * k as f64 / (n - 1) as f64)
            .collect()
    }
}

type State = [f64; 4];

fn rhs(surface: &Surface, y: &State) -> State {
    let p = ChartPoint::new(y[0], y[1]);
    let vel = [y[2], y[3]];
    let acc = surface.christoffel_unchecked(p).contract(vel, vel);
    [y[2], y[3], -acc[0], -acc[1]]
}

/// Fixed-step RK4 run; records every node when `record` is set.
fn integrate(
    surface: &Surface,
    y0: State,
    length: f64,
    steps: usize,
    record: bool,
) -> Result<(State, Vec<ChartPoint>)> {
    let h = length / steps as f64;
    let mut y = y0;
    let mut trace = Vec::new();
    if record {
        trace.reserve(steps + 1);
        trace.push(ChartPoint::new(y[0], y[1]));
    }
    let mut f = |s: &State| rhs(surface, s);
    for k in 0..steps {
        let next = numeric::rk4_step(&mut f, &y, h);
        let p = ChartPoint::new(next[0], next[1]);
        if !next.iter().all(|x| x.is_finite()) || !surface.domain().contains_interior(p) {
            return Err(GeomError::DomainExit {
                traversed: k as f64 * h,
            });
        }
        y = next;
        if record {
            trace.push(p);
        }
    }
    Ok((y, trace))
}

fn unit_direction(surface: &Surface, start: ChartPoint, dir: [f64; 2]) -> Result<[f64; 2]> {
    let g = surface.metric_at(start)?;
    let n = g.norm(dir);
    if !(n > 0.0) || !n.is_finite() {
        return Err(GeomError::ZeroVector);
    }
    Ok([dir[0] / n, dir[1] / n])
}

fn state_gap(a: &State, b: &State, scale: f64) -> f64 {
    let dp = libm::hypot(a[0] - b[0], a[1] - b[1]);
    let dv = libm::hypot(a[2] - b[2], a[3] - b[3]);
    dp + scale * dv
}

/// Geodesic of metric length `length` from `start` with initial direction
/// `dir` (any nonzero length). The step is halved until two successive runs
/// agree at the end point to `1e-10` relative to the feature scale.
pub fn shoot_geodesic(
    surface: &Surface,
    start: ChartPoint,
    dir: TangentVector,
    length: f64,
) -> Result<GeodesicShot> {
    surface.check_interior(start)?;
    if !(length > 0.0) || !length.is_finite() {
        return Err(GeomError::InvalidArgument(
            "geodesic length must be positive",
        ));
    }
    let unit = unit_direction(surface, start, dir.components())?;
    let y0 = [start.u, start.v, unit[0], unit[1]];
    let scale = surface.feature_scale();
    let tol = 1e-10 * scale;
    let mut steps = (ceil(length / shooting_step(surface)) as usize).max(4);
    let (mut prev, _) = integrate(surface, y0, length, steps, false)?;
    let mut levels = 0;
    let (end, trace) = loop {
        steps *= 2;
        levels += 1;
        let (end, trace) = integrate(surface, y0, length, steps, true)?;
        if state_gap(&end, &prev, scale) <= tol || levels >= 8 {
            break (end, trace);
        }
        prev = end;
    };
    Ok(GeodesicShot {
        start,
        direction: TangentVector::new(start, unit[0], unit[1]),
        length,
        result_path: Path::new(trace)?,
        end_velocity: [end[2], end[3]],
    })
}

/// End point of the geodesic `t ↦ exp(t·dir)` at `t = 1`, i.e. after metric
/// length `|dir|`. A zero vector maps to `p` itself.
pub fn exp_map(surface: &Surface, p: ChartPoint, dir: [f64; 2]) -> Result<ChartPoint> {
    let g = surface.metric_at(p)?;
    let len = g.norm(dir);
    if len == 0.0 {
        return Ok(p);
    }
    surface.check_interior(p)?;
    let y0 = [p.u, p.v, dir[0] / len, dir[1] / len];
    let scale = surface.feature_scale();
    let mut steps = (ceil(len / shooting_step(surface)) as usize).max(2);
    let (mut prev, _) = integrate(surface, y0, len, steps, false)?;
    for _ in 0..8 {
        steps *= 2;
        let (end, _) = integrate(surface, y0, len, steps, false)?;
        if state_gap(&end, &prev, scale) <= 1e-11 * scale {
            return Ok(ChartPoint::new(end[0], end[1]));
        }
        prev = end;
    }
    Ok(ChartPoint::new(prev[0], prev[1]))
}

/// Frame angle of a chart direction: `atan2(⟨d, e2⟩, ⟨d, e1⟩)`.
pub fn frame_angle(g: &Metric, d: [f64; 2]) -> f64 {
    let se = sqrt(g.e);
    let s = sqrt(g.det());
    // ⟨d, e1⟩ = (E d_u + F d_v)/√E, ⟨d, e2⟩ = √det · d_v / √E
    atan2(s * d[1] / se, (g.e * d[0] + g.f * d[1]) / se)
}

/// Chart direction of frame angle `angle`.
pub fn frame_direction(g: &Metric, angle: f64) -> [f64; 2] {
    let se = sqrt(g.e);
    let s = sqrt(g.e * g.det());
    let (c, sn) = (cos(angle), sin(angle));
    [c / se - sn * g.f / s, sn * g.e / s]
}

fn is_near_antipodal(surface: &Surface, a: ChartPoint, b: ChartPoint) -> bool {
    if let SurfaceKind::Sphere { radius } = surface.kind() {
        if let (Some(x), Some(y)) = (surface.embed(a), surface.embed(b)) {
            return norm(numeric::add(x, y)) / radius < 1e-3;
        }
    }
    false
}

/// Geodesic from `a` to `b`, found by Newton iteration on launch angle and
/// length starting from the chart straight line.
pub fn connect_geodesic(surface: &Surface, a: ChartPoint, b: ChartPoint) -> Result<GeodesicShot> {
    connect_geodesic_from(surface, a, b, None)
}

/// As [`connect_geodesic`], optionally starting from an explicit launch
/// angle (frame angle at `a`) to select another branch.
pub fn connect_geodesic_from(
    surface: &Surface,
    a: ChartPoint,
    b: ChartPoint,
    initial_angle: Option<f64>,
) -> Result<GeodesicShot> {
    surface.check_interior(a)?;
    surface.check_interior(b)?;
    if a == b {
        return Err(GeomError::InvalidArgument("geodesic endpoints coincide"));
    }
    if is_near_antipodal(surface, a, b) {
        return Err(GeomError::NearAntipodal);
    }
    let g = surface.metric_unchecked(a);
    let chord = [b.u - a.u, b.v - a.v];
    let mut angle = initial_angle.unwrap_or_else(|| frame_angle(&g, chord));
    let mut length = surface.segment_length(a, b);
    let scale = surface.feature_scale();
    let steps = (2.0 * ceil(length / shooting_step(surface))).max(16.0) as usize;
    let target = 1e-12 * scale.max(1.0);

    let residual = |angle: f64, length: f64| -> Result<[f64; 2]> {
        let d = frame_direction(&g, angle);
        let (end, _) = integrate(surface, [a.u, a.v, d[0], d[1]], length, steps, false)?;
        Ok([end[0] - b.u, end[1] - b.v])
    };
    let size = |r: [f64; 2]| libm::hypot(r[0], r[1]);

    let mut r = residual(angle, length)?;
    let mut iterations = 0;
    while size(r) > target {
        iterations += 1;
        if iterations > 60 {
            return Err(GeomError::NoConvergence {
                iterations,
                residual: size(r),
            });
        }
        let (da, dl) = (1e-7, 1e-7 * length.max(scale));
        let ra = residual(angle + da, length)?;
        let rl = residual(angle, length + dl)?;
        let jac = [
            [(ra[0] - r[0]) / da, (rl[0] - r[0]) / dl],
            [(ra[1] - r[1]) / da, (rl[1] - r[1]) / dl],
        ];
        let step = numeric::solve2(jac, r).ok_or(GeomError::NoConvergence {
            iterations,
            residual: size(r),
        })?;
        let mut t = 1.0;
        let mut accepted = false;
        for _ in 0..12 {
            let (na, nl) = (angle - t * step[0], length - t * step[1]);
            if nl > 0.0 {
                if let Ok(nr) = residual(na, nl) {
                    if size(nr) < size(r) {
                        angle = na;
                        length = nl;
                        r = nr;
                        accepted = true;
                        break;
                    }
                }
            }
            t *= 0.5;
        }
        if !accepted {
            if size(r) <= 1e3 * target {
                break;
            }
            return Err(GeomError::NoConvergence {
                iterations,
                residual: size(r),
            });
        }
    }
    let dir = frame_direction(&g, angle);
    let shot = shoot_geodesic(surface, a, TangentVector::new(a, dir[0], dir[1]), length)?;
    let miss = shot.end().chart_distance(b);
    if miss > 1e-9 * scale.max(1.0) {
        return Err(GeomError::NoConvergence {
            iterations,
            residual: miss,
        });
    }
    let mut samples = shot.result_path.into_samples();
    let last = samples.len() - 1;
    samples[last] = b;
    Ok(GeodesicShot {
        result_path: Path::new(samples)?,
        ..shot
    })
}

/// Closed polygon whose sides are geodesics joining consecutive vertices.
pub fn geodesic_polygon(surface: &Surface, vertices: &[ChartPoint]) -> Result<Path> {
    let ring = crate::polygon::open_ring(vertices);
    if ring.len() < 3 {
        return Err(GeomError::TooFewVertices(ring.len()));
    }
    let mut samples: Vec<ChartPoint> = alloc::vec![ring[0]];
    for i in 0..ring.len() {
        let side = connect_geodesic(surface, ring[i], ring[(i + 1) % ring.len()])?;
        samples.extend_from_slice(&side.result_path.samples()[1..]);
    }
    Path::new(samples)
}

/// Metric-unit left normals (chart components) at each sample.
pub(crate) fn left_normals(surface: &Surface, samples: &[ChartPoint]) -> Vec<[f64; 2]> {
    chart_tangents(samples)
        .iter()
        .zip(samples)
        .map(|(t, &p)| {
            let g = surface.metric_unchecked(p);
            let n = g.rotate_quarter(*t);
            let len = g.norm(n);
            [n[0] / len, n[1] / len]
        })
        .collect()
}

/// Discrete rotation rate at each sample: the normal component of the
/// polyline-length gradient divided by the mean adjacent segment length,
/// signed positive when the path turns left. Endpoints get 0.
pub fn rotation_rates(surface: &Surface, samples: &[ChartPoint]) -> Vec<f64> {
    discretize(surface, samples).rates
}

/// Rotation rates, unit left normals, total length and mean adjacent spacing.
struct Discrete {
    rates: Vec<f64>,
    normals: Vec<[f64; 2]>,
    length: f64,
    spacing: Vec<f64>,
}

fn discretize(surface: &Surface, samples: &[ChartPoint]) -> Discrete {
    let n = samples.len();
    let normals = left_normals(surface, samples);
    let mut grad = alloc::vec![[0.0; 2]; n];
    let mut seg = Vec::with_capacity(n.saturating_sub(1));
    let mut total = 0.0;
    for i in 0..n - 1 {
        let (len, ga, gb) = surface.segment_length_gradient(samples[i], samples[i + 1]);
        total += len;
        seg.push(len);
        for k in 0..2 {
            grad[i][k] += ga[k];
            grad[i + 1][k] += gb[k];
        }
    }
    let mut rates = alloc::vec![0.0; n];
    let mut spacing = alloc::vec![0.0; n];
    for i in 1..n - 1 {
        spacing[i] = 0.5 * (seg[i - 1] + seg[i]);
        let dl_dn = grad[i][0] * normals[i][0] + grad[i][1] * normals[i][1];
        rates[i] = -dl_dn / spacing[i];
    }
    Discrete {
        rates,
        normals,
        length: total,
        spacing,
    }
}

/// Outcome of [`relax_to_geodesic`].
#[derive(Debug, Clone, PartialEq)]
pub struct RelaxationReport {
    pub iterations: usize,
    pub length_history: Vec<f64>,
    /// Largest pointwise rotation rate before each iteration and at the end.
    pub rotation_history: Vec<f64>,
    pub final_max_rotation_rate: f64,
    pub final_path: Path,
}

/// Options for [`relax_to_geodesic`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RelaxOptions {
    /// Sideways displacement per unit of turning angle, in length units.
    /// `None` uses a tenth of the mean sample spacing.
    pub step_gain: Option<f64>,
    /// Stop when every pointwise rotation rate is below this.
    pub tol: f64,
    pub max_iterations: usize,
}

impl Default for RelaxOptions {
    fn default() -> Self {
        Self {
            step_gain: None,
            tol: 1e-6,
            max_iterations: 200_000,
        }
    }
}

/// Straightens `path` by repeatedly pushing each interior sample sideways
/// toward the side the path turns to, by `gain × turning angle`, until the
/// path stops rotating. Endpoints are fixed. A step that would lengthen the
/// path is retried at half the gain.
pub fn relax_to_geodesic(
    surface: &Surface,
    path: &Path,
    opts: RelaxOptions,
) -> Result<RelaxationReport> {
    surface.validate_path(path, f64::INFINITY)?;
    let mut samples = path.samples().to_vec();
    let n = samples.len();
    let mut state = discretize(surface, &samples);
    let base_gain = opts
        .step_gain
        .unwrap_or(0.1 * state.length / (n - 1) as f64);
    if !(base_gain > 0.0) {
        return Err(GeomError::InvalidArgument("step gain must be positive"));
    }
    let min_gap = 1e-12 * surface.domain().extent();
    let max_rate = |r: &[f64]| r.iter().fold(0.0_f64, |m, x| m.max(x.abs()));
    let mut length_history = alloc::vec![state.length];
    let mut rotation_history = alloc::vec![max_rate(&state.rates)];
    let mut iterations = 0;
    while max_rate(&state.rates) >= opts.tol {
        if iterations >= opts.max_iterations {
            let report = RelaxationReport {
                iterations,
                final_max_rotation_rate: max_rate(&state.rates),
                length_history,
                rotation_history,
                final_path: Path::new(samples)?,
            };
            return Err(GeomError::RelaxationIncomplete(alloc::boxed::Box::new(
                report,
            )));
        }
        iterations += 1;
        let mut gain = base_gain;
        let mut moved = false;
        for _ in 0..40 {
            let trial: Vec<ChartPoint> = (0..n)
                .map(|i| {
                    if i == 0 || i == n - 1 {
                        return samples[i];
                    }
                    let turn = state.rates[i] * state.spacing[i];
                    let n = state.normals[i];
                    samples[i].offset(gain * turn * n[0], gain * turn * n[1])
                })
                .collect();
            if trial
                .iter()
                .any(|p| !surface.domain().contains_interior(*p))
            {
                gain *= 0.5;
                continue;
            }
            if let Some(index) = trial
                .windows(2)
                .position(|w| w[0].chart_distance(w[1]) < min_gap)
            {
                return Err(GeomError::PathDegenerate { index: index + 1 });
            }
            let next = discretize(surface, &trial);
            if next.length <= state.length * (1.0 + 1e-12) {
                samples = trial;
                state = next;
                moved = true;
                break;
            }
            gain *= 0.5;
        }
        length_history.push(state.length);
        rotation_history.push(max_rate(&state.rates));
        if !moved {
            break;
        }
    }
    let final_max_rotation_rate = max_rate(&state.rates);
    let report = RelaxationReport {
        iterations,
        length_history,
        rotation_history,
        final_max_rotation_rate,
        final_path: Path::new(samples)?,
    };
    if final_max_rotation_rate >= opts.tol {
        return Err(GeomError::RelaxationIncomplete(alloc::boxed::Box::new(
            report,
        )));
    }
    Ok(report)
}

/// Length change of a geodesic under fixed-endpoint bumps
/// `amplitude·sin(πs/L)` along its left and right normals.
///
/// Both perturbed paths and the unperturbed one are measured as polylines
/// on the same samples, so discretization error cancels to leading order.
pub fn second_variation_probe(
    surface: &Surface,
    shot: &GeodesicShot,
    amplitude: f64,
) -> Result<(f64, f64)> {
    let samples = shot.result_path.samples();
    let n = samples.len();
    let normals = left_normals(surface, samples);
    let base = surface.path_length(&shot.result_path);
    let mut deltas = [0.0; 2];
    for (side, sign) in [1.0, -1.0].into_iter().enumerate() {
        let mut moved = Vec::with_capacity(n);
        for (k, &p) in samples.iter().enumerate() {
            let bump = amplitude * sin(core::f64::consts::PI * k as f64 / (n - 1) as f64);
            if k == 0 || k == n - 1 || bump == 0.0 {
                moved.push(p);
                continue;
            }
            let d = [sign * bump * normals[k][0], sign * bump * normals[k][1]];
            moved.push(exp_map(surface, p, d)?);
        }
        deltas[side] = surface.path_length(&Path::new(moved)?) - base;
    }
    Ok((deltas[0], deltas[1]))
}
