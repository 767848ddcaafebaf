//! Flat maps of the sphere: their distance distortion, and the holonomy
//! certificate that no map of a curved region can be distance-true.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

use libm::{acos, cos, log, tan};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{GeomError, Result};
use crate::geodesics::connect_geodesic;
use crate::paths::RegionBoundary;
use crate::surface::{ChartPoint, Surface, SurfaceKind};
use crate::transport::loop_holonomy_with_error;

/// Colatitude band excluded at each pole by the Mercator map.
pub const MERCATOR_POLE_CUTOFF: f64 = 0.2;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProjectionKind {
    Mercator,
    Equirectangular,
}

/// A flat map of a sphere: `(colatitude, longitude) → (X, Y)`.
#[derive(Debug, Clone, PartialEq)]
pub struct FlatMap {
    pub name: String,
    pub kind: ProjectionKind,
    pub radius: f64,
    /// Map length per unit surface length the map claims to have.
    pub nominal_scale: f64,
}

/// `mercator` or `equirectangular` for a sphere surface.
pub fn builtin_projection(name: &str, surface: &Surface) -> Result<FlatMap> {
    let radius = match surface.kind() {
        SurfaceKind::Sphere { radius } => radius,
        _ => return Err(GeomError::NotASphere(surface.name().to_string())),
    };
    let kind = match name {
        "mercator" => ProjectionKind::Mercator,
        "equirectangular" => ProjectionKind::Equirectangular,
        other => return Err(GeomError::UnknownProjection(other.to_string())),
    };
    Ok(FlatMap {
        name: name.to_string(),
        kind,
        radius,
        nominal_scale: 1.0,
    })
}

impl FlatMap {
    pub fn with_nominal_scale(mut self, scale: f64) -> Self {
        self.nominal_scale = scale;
        self
    }

    /// Colatitude range on which the map is defined.
    pub fn colatitude_range(&self) -> (f64, f64) {
        match self.kind {
            ProjectionKind::Mercator => (MERCATOR_POLE_CUTOFF, PI - MERCATOR_POLE_CUTOFF),
            ProjectionKind::Equirectangular => (0.0, PI),
        }
    }

    pub fn contains(&self, p: ChartPoint) -> bool {
        let (lo, hi) = self.colatitude_range();
        p.u >= lo && p.u <= hi && p.v.is_finite()
    }

    /// Planar image of `p`, scaled by the nominal scale.
    pub fn forward(&self, p: ChartPoint) -> Result<(f64, f64)> {
        if !self.contains(p) {
            return Err(GeomError::OutsideDomain { u: p.u, v: p.v });
        }
        let latitude = FRAC_PI_2 - p.u;
        let k = self.radius * self.nominal_scale;
        let y = match self.kind {
            ProjectionKind::Mercator => log(tan(FRAC_PI_4 + 0.5 * latitude)),
            ProjectionKind::Equirectangular => latitude,
        };
        Ok((k * p.v, k * y))
    }

    /// East–west scale at `p` (relative to the nominal scale).
    pub fn east_west_scale(&self, p: ChartPoint) -> f64 {
        1.0 / libm::sin(p.u)
    }

    /// North–south scale at `p` (relative to the nominal scale).
    pub fn north_south_scale(&self, p: ChartPoint) -> f64 {
        match self.kind {
            ProjectionKind::Mercator => 1.0 / libm::sin(p.u),
            ProjectionKind::Equirectangular => 1.0,
        }
    }
}

/// One sampled pair.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PairSample {
    pub a: ChartPoint,
    pub b: ChartPoint,
    pub true_distance: f64,
    pub map_distance: f64,
    /// `map_distance / (nominal_scale · true_distance)`.
    pub ratio: f64,
}

/// Distance distortion over sampled point pairs.
#[derive(Debug, Clone, PartialEq)]
pub struct DistortionReport {
    pub samples: Vec<PairSample>,
    /// Pairs the geodesic solver could not join, with the reason.
    pub skipped: Vec<(ChartPoint, ChartPoint, GeomError)>,
    pub min_ratio: f64,
    pub max_ratio: f64,
}

impl DistortionReport {
    pub fn spread(&self) -> f64 {
        self.max_ratio / self.min_ratio
    }
}

/// Geodesic against map distance for one pair; `b`'s longitude is taken
/// at the representative nearest `a` for the geodesic.
pub fn measure_pair(
    map: &FlatMap,
    surface: &Surface,
    a: ChartPoint,
    b: ChartPoint,
) -> Result<PairSample> {
    let period = 2.0 * PI;
    let mut near = b;
    while near.v - a.v > PI {
        near.v -= period;
    }
    while a.v - near.v > PI {
        near.v += period;
    }
    let true_distance = connect_geodesic(surface, a, near)?.length;
    let (xa, ya) = map.forward(a)?;
    let (xb, yb) = map.forward(b)?;
    let map_distance = libm::hypot(xb - xa, yb - ya);
    Ok(PairSample {
        a,
        b,
        true_distance,
        map_distance,
        ratio: map_distance / (map.nominal_scale * true_distance),
    })
}

/// Summarizes measured pairs.
pub fn summarize(
    samples: Vec<PairSample>,
    skipped: Vec<(ChartPoint, ChartPoint, GeomError)>,
) -> Result<DistortionReport> {
    if samples.is_empty() {
        return Err(GeomError::TooFewPairs { min: 1, got: 0 });
    }
    let min_ratio = samples
        .iter()
        .map(|s| s.ratio)
        .fold(f64::INFINITY, f64::min);
    let max_ratio = samples
        .iter()
        .map(|s| s.ratio)
        .fold(f64::NEG_INFINITY, f64::max);
    Ok(DistortionReport {
        samples,
        skipped,
        min_ratio,
        max_ratio,
    })
}

/// `n_pairs` point pairs drawn uniformly by area from the map's domain,
/// reproducibly from `seed`.
pub fn sample_pairs(map: &FlatMap, n_pairs: usize, seed: u64) -> Vec<(ChartPoint, ChartPoint)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (lo, hi) = map.colatitude_range();
    let margin = 0.05;
    let (z_hi, z_lo) = (cos(lo.max(margin)), cos(hi.min(PI - margin)));
    let point = |rng: &mut ChaCha8Rng| {
        let z = z_lo + (z_hi - z_lo) * rng.random::<f64>();
        let v = 2.0 * PI * rng.random::<f64>();
        ChartPoint::new(acos(z), v)
    };
    (0..n_pairs)
        .map(|_| {
            let a = point(&mut rng);
            let b = point(&mut rng);
            (a, b)
        })
        .collect()
}

/// Samples `n_pairs` seeded pairs and compares geodesic distance with map
/// distance. Pairs the solver cannot join are skipped and recorded.
pub fn distortion_report(
    map: &FlatMap,
    surface: &Surface,
    n_pairs: usize,
    seed: u64,
) -> Result<DistortionReport> {
    if n_pairs < 10 {
        return Err(GeomError::TooFewPairs {
            min: 10,
            got: n_pairs,
        });
    }
    let mut samples = Vec::with_capacity(n_pairs);
    let mut skipped = Vec::new();
    for (a, b) in sample_pairs(map, n_pairs, seed) {
        match measure_pair(map, surface, a, b) {
            Ok(s) => samples.push(s),
            Err(e) => skipped.push((a, b, e)),
        }
    }
    summarize(samples, skipped)
}

/// Outcome of [`holonomy_obstruction`].
#[derive(Debug, Clone, PartialEq)]
pub struct ObstructionVerdict {
    pub holonomy: f64,
    pub error_estimate: f64,
    /// True when the holonomy is clearly nonzero, so no distance-preserving
    /// flat map of any neighbourhood of the region exists.
    pub certified: bool,
    pub explanation: String,
}

/// Holonomy of a region boundary and whether it rules out a distance-true
/// flat map: a flat map carries every loop to a plane loop, whose holonomy
/// is zero.
pub fn holonomy_obstruction(
    surface: &Surface,
    region: &RegionBoundary,
) -> Result<ObstructionVerdict> {
    let area = region.area(surface)?;
    if !(area > 0.0) {
        return Err(GeomError::AreaBelowNoiseFloor { area });
    }
    let (h, transport_err) = loop_holonomy_with_error(surface, region.boundary())?;
    let step = region
        .samples()
        .windows(2)
        .map(|w| w[0].chart_distance(w[1]))
        .fold(0.0, f64::max);
    let refined = crate::paths::Loop::new(region.boundary().path().refined(0.5 * step))?;
    let (h_fine, _) = loop_holonomy_with_error(surface, &refined)?;
    let error_estimate = (h - h_fine).abs().max(transport_err);
    let certified = h.abs() > 3.0 * error_estimate && h.abs() > 1e-10;
    let explanation = if certified {
        format!(
            "holonomy {h:.9} exceeds 3x its error estimate {error_estimate:.3e}; a distance-preserving flat map would make it 0"
        )
    } else {
        format!("holonomy {h:.9} is indistinguishable from 0 (error estimate {error_estimate:.3e}); no obstruction")
    };
    Ok(ObstructionVerdict {
        holonomy: h,
        error_estimate,
        certified,
        explanation,
    })
}

/// Relative length of a short east–west segment on the map against the
/// sphere, centred at `p` with longitude half-width `half`.
pub fn measured_east_west_scale(map: &FlatMap, p: ChartPoint, half: f64) -> Result<f64> {
    let (x0, y0) = map.forward(p.offset(0.0, -half))?;
    let (x1, y1) = map.forward(p.offset(0.0, half))?;
    let true_len = map.radius * libm::sin(p.u) * 2.0 * half;
    Ok(libm::hypot(x1 - x0, y1 - y0) / (map.nominal_scale * true_len))
}

/// As [`measured_east_west_scale`] for a meridian segment.
pub fn measured_north_south_scale(map: &FlatMap, p: ChartPoint, half: f64) -> Result<f64> {
    let (x0, y0) = map.forward(p.offset(-half, 0.0))?;
    let (x1, y1) = map.forward(p.offset(half, 0.0))?;
    let true_len = map.radius * 2.0 * half;
    Ok(libm::hypot(x1 - x0, y1 - y0) / (map.nominal_scale * true_len))
}
