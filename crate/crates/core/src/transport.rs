//! Parallel transport of a direction along chart paths, real-valued loop
//! holonomy, and the two-wheeled chariot whose statue realizes transport
//! mechanically through the difference of its wheel distances.

use alloc::vec::Vec;
use core::f64::consts::PI;

use crate::error::{GeomError, Result};
use crate::geodesics::{exp_map, frame_angle, frame_direction, left_normals};
use crate::paths::{chart_tangents, Loop, Path};
use crate::surface::{ChartPoint, Surface, TangentVector};

/// Rotation of a transported direction along a path.
#[derive(Debug, Clone, PartialEq)]
pub struct TransportResult {
    /// Unwrapped counterclockwise rotation against the orthonormal chart frame.
    pub total_rotation: f64,
    /// `(arclength, frame angle)` at every sample; the angle is unwrapped.
    pub angle_trace: Vec<(f64, f64)>,
    pub final_vector: TangentVector,
    /// Estimated absolute error of `total_rotation`.
    pub error_estimate: f64,
    /// Wheel distances, present for the finite chariot only.
    pub wheels: Option<WheelTracks>,
}

/// Wheel positions and cumulative distances of a finite chariot.
#[derive(Debug, Clone, PartialEq)]
pub struct WheelTracks {
    pub left: Vec<ChartPoint>,
    pub right: Vec<ChartPoint>,
    pub d_left: Vec<f64>,
    pub d_right: Vec<f64>,
}

/// Integral of `ω(ẋ)` over the chart-straight segment `a → b`, with an
/// error estimate.
///
/// With the path fixed, the angle equation `dφ/dt = -ω(ẋ)` does not depend
/// on `φ`, so a classical RK4 step over the segment is Simpson's rule. Steps
/// are halved until two refinements agree, then Richardson-corrected.
fn segment_connection(surface: &Surface, a: ChartPoint, b: ChartPoint) -> (f64, f64) {
    let d = [b.u - a.u, b.v - a.v];
    let f = |t: f64| {
        let w = surface.connection_form_unchecked(a.lerp(b, t));
        w[0] * d[0] + w[1] * d[1]
    };
    let mut trap = 0.5 * (f(0.0) + f(1.0));
    let mut intervals = 1usize;
    let refine = |trap: f64, intervals: usize| {
        let h = 1.0 / intervals as f64;
        let mids: f64 = (0..intervals).map(|k| f((k as f64 + 0.5) * h)).sum();
        0.5 * trap + 0.5 * h * mids
    };
    let next = refine(trap, intervals);
    let mut simpson = (4.0 * next - trap) / 3.0;
    trap = next;
    intervals *= 2;
    for _ in 0..12 {
        let next = refine(trap, intervals);
        let finer = (4.0 * next - trap) / 3.0;
        let diff = finer - simpson;
        trap = next;
        intervals *= 2;
        simpson = finer;
        if diff.abs() <= 1e-15 + 1e-13 * finer.abs() {
            return (finer + diff / 15.0, diff.abs() / 15.0 + 1e-16);
        }
    }
    (simpson, 1e-10 * simpson.abs().max(1e-6))
}

/// Transports `v0` along `path`. The transported vector is represented by
/// its metric norm and its angle `φ` against the orthonormal chart frame;
/// the angle obeys `dφ = -ω` for the frame's connection form `ω`, so the
/// norm is preserved exactly and the angle is never wrapped.
pub fn parallel_transport(
    surface: &Surface,
    path: &Path,
    v0: TangentVector,
) -> Result<TransportResult> {
    if v0.base != path.start() {
        return Err(GeomError::BaseMismatch);
    }
    surface.validate_path(path, surface.max_step())?;
    let g0 = surface.metric_unchecked(v0.base);
    let size = g0.norm(v0.components());
    if !(size > 0.0) || !size.is_finite() {
        return Err(GeomError::ZeroVector);
    }
    let phi0 = frame_angle(&g0, v0.components());
    let samples = path.samples();
    let mut trace = Vec::with_capacity(samples.len());
    let (mut phi, mut s, mut err) = (phi0, 0.0, 0.0);
    trace.push((0.0, phi));
    for w in samples.windows(2) {
        let (integral, e) = segment_connection(surface, w[0], w[1]);
        phi -= integral;
        err += e;
        s += surface.segment_length(w[0], w[1]);
        trace.push((s, phi));
    }
    let end = path.end();
    let dir = frame_direction(&surface.metric_unchecked(end), phi);
    Ok(TransportResult {
        total_rotation: phi - phi0,
        angle_trace: trace,
        final_vector: TangentVector::new(end, size * dir[0], size * dir[1]),
        error_estimate: err,
        wheels: None,
    })
}

/// Holonomy of a loop as a real number (not reduced mod 2π), with an error
/// estimate. Counterclockwise-positive: a positively oriented simple loop
/// has holonomy `+∬K dA`.
pub fn loop_holonomy_with_error(surface: &Surface, l: &Loop) -> Result<(f64, f64)> {
    let base = l.base();
    let g = surface.metric_at(base)?;
    let e1 = frame_direction(&g, 0.0);
    let r = parallel_transport(surface, l.path(), TangentVector::new(base, e1[0], e1[1]))?;
    Ok((
        r.total_rotation + surface.pole_winding_correction(l.winding()),
        r.error_estimate,
    ))
}

/// Holonomy of a loop; see [`loop_holonomy_with_error`].
pub fn loop_holonomy(surface: &Surface, l: &Loop) -> Result<f64> {
    loop_holonomy_with_error(surface, l).map(|(h, _)| h)
}

/// Reduces an angle to `(-π, π]`.
pub fn wrap_angle(a: f64) -> f64 {
    let r = a - 2.0 * PI * libm::floor((a + PI) / (2.0 * PI));
    if r <= -PI {
        r + 2.0 * PI
    } else {
        r
    }
}

/// Geometry of a finite chariot.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChariotConfig {
    /// Distance between the wheels, in surface length units.
    pub width: f64,
    /// Longest metric length between path samples; longer segments are split.
    pub step: f64,
}

impl ChariotConfig {
    /// A chariot of the given width with `step = width / 2`.
    pub fn new(width: f64) -> Self {
        Self {
            width,
            step: 0.5 * width,
        }
    }
}

/// Cumulative polyline lengths with a pairwise Richardson correction: over
/// each pair of segments the chord error of the pair is compared with that
/// of the skipping chord, which is four times larger.
fn track_lengths(surface: &Surface, pts: &[ChartPoint]) -> Vec<f64> {
    let n = pts.len();
    let seg: Vec<f64> = pts
        .windows(2)
        .map(|w| surface.segment_length(w[0], w[1]))
        .collect();
    let mut out = alloc::vec![0.0; n];
    if n < 3 {
        if n == 2 {
            out[1] = seg[0];
        }
        return out;
    }
    let correction =
        |i: usize| (seg[i] + seg[i + 1] - surface.segment_length(pts[i], pts[i + 2])) / 3.0;
    let mut i = 0;
    while i + 2 < n {
        let c = correction(i);
        out[i + 1] = out[i] + seg[i] + 0.5 * c;
        out[i + 2] = out[i] + seg[i] + seg[i + 1] + c;
        i += 2;
    }
    if i + 1 < n {
        // Odd count: the last segment borrows half the correction of its pair.
        let c = correction(i - 1);
        out[i + 1] = out[i] + seg[i] + 0.5 * c;
    }
    out
}

/// Rolls a two-wheeled chariot of width `w` along `path`.
///
/// Wheel positions are geodesic offsets of length `w/2` along the left and
/// right metric normals. The statue starts along the heading and turns
/// against the chariot by `(d_l - d_r)/w`, so its frame angle is the
/// heading angle plus that amount.
pub fn finite_chariot(
    surface: &Surface,
    path: &Path,
    cfg: ChariotConfig,
) -> Result<TransportResult> {
    if !(cfg.width > 0.0) || !(cfg.step > 0.0) {
        return Err(GeomError::InvalidArgument(
            "chariot width and step must be positive",
        ));
    }
    surface.validate_path(path, surface.max_step())?;
    let path = refine_metric(surface, path, cfg.step)?;
    let samples = path.samples();
    let n = samples.len();
    let normals = left_normals(surface, samples);
    let tangents = chart_tangents(samples);
    let half = 0.5 * cfg.width;
    let mut left = Vec::with_capacity(n);
    let mut right = Vec::with_capacity(n);
    for (p, nrm) in samples.iter().zip(&normals) {
        left.push(exp_map(surface, *p, [half * nrm[0], half * nrm[1]])?);
        right.push(exp_map(surface, *p, [-half * nrm[0], -half * nrm[1]])?);
    }
    for i in 0..n - 1 {
        let g = surface.metric_unchecked(samples[i]);
        for track in [&left, &right] {
            let step = [track[i + 1].u - track[i].u, track[i + 1].v - track[i].v];
            if g.inner(step, tangents[i]) <= 0.0 {
                return Err(GeomError::WidthTooLarge {
                    width: cfg.width,
                    index: i,
                });
            }
        }
    }
    let d_left = track_lengths(surface, &left);
    let d_right = track_lengths(surface, &right);
    let center = track_lengths(surface, samples);

    let mut trace = Vec::with_capacity(n);
    let mut heading = 0.0;
    for i in 0..n {
        let g = surface.metric_unchecked(samples[i]);
        let raw = frame_angle(&g, tangents[i]);
        heading = if i == 0 {
            raw
        } else {
            heading + wrap_angle(raw - heading)
        };
        trace.push((center[i], heading + (d_left[i] - d_right[i]) / cfg.width));
    }
    let (start_angle, end_angle) = (trace[0].1, trace[n - 1].1);
    let end = path.end();
    let dir = frame_direction(&surface.metric_unchecked(end), end_angle);
    Ok(TransportResult {
        total_rotation: end_angle - start_angle,
        angle_trace: trace,
        final_vector: TangentVector::new(end, dir[0], dir[1]),
        error_estimate: 0.0,
        wheels: Some(WheelTracks {
            left,
            right,
            d_left,
            d_right,
        }),
    })
}

/// Splits segments longer than `step` in metric length.
fn refine_metric(surface: &Surface, path: &Path, step: f64) -> Result<Path> {
    let s = path.samples();
    let mut out = Vec::with_capacity(s.len());
    out.push(s[0]);
    for w in s.windows(2) {
        let pieces = libm::ceil(surface.segment_length(w[0], w[1]) / step).max(1.0) as usize;
        for k in 1..=pieces {
            out.push(if k == pieces {
                w[1]
            } else {
                w[0].lerp(w[1], k as f64 / pieces as f64)
            });
        }
    }
    Path::new(out)
}

/// `|finite chariot − continuum transport|` in total rotation for each width.
pub fn chariot_convergence(
    surface: &Surface,
    path: &Path,
    widths: &[f64],
) -> Result<Vec<(f64, f64)>> {
    let base = path.start();
    let g = surface.metric_at(base)?;
    let e1 = frame_direction(&g, 0.0);
    let continuum =
        parallel_transport(surface, path, TangentVector::new(base, e1[0], e1[1]))?.total_rotation;
    widths
        .iter()
        .map(|&w| {
            let finite = finite_chariot(surface, path, ChariotConfig::new(w))?;
            Ok((w, (finite.total_rotation - continuum).abs()))
        })
        .collect()
}
