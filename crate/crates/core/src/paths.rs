//! Sampled chart paths, closed loops and region boundaries, with the loop
//! surgery used by holonomy arguments: composition, reversal, detours,
//! base-point changes and region subdivision.

use alloc::vec::Vec;
use core::f64::consts::PI;

use libm::{ceil, cos, round, sin};

use crate::error::{GeomError, Result};
use crate::polygon;
use crate::surface::{ChartDomain, ChartPoint, Surface};

/// A chart polyline with at least two samples and no repeated consecutive samples.
#[derive(Debug, Clone, PartialEq)]
pub struct Path {
    samples: Vec<ChartPoint>,
}

impl Path {
    pub fn new(samples: Vec<ChartPoint>) -> Result<Self> {
        if samples.len() < 2 {
            return Err(GeomError::PathTooShort(samples.len()));
        }
        for (i, p) in samples.iter().enumerate() {
            if !p.u.is_finite() || !p.v.is_finite() {
                return Err(GeomError::OutsideDomain { u: p.u, v: p.v });
            }
            if i > 0 && samples[i - 1] == *p {
                return Err(GeomError::RepeatedSample { index: i });
            }
        }
        Ok(Self { samples })
    }

    pub fn samples(&self) -> &[ChartPoint] {
        &self.samples
    }

    pub fn into_samples(self) -> Vec<ChartPoint> {
        self.samples
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn start(&self) -> ChartPoint {
        self.samples[0]
    }

    pub fn end(&self) -> ChartPoint {
        self.samples[self.samples.len() - 1]
    }

    pub fn reversed(&self) -> Self {
        let mut samples = self.samples.clone();
        samples.reverse();
        Self { samples }
    }

    pub fn translated(&self, du: f64, dv: f64) -> Self {
        Self {
            samples: self.samples.iter().map(|p| p.offset(du, dv)).collect(),
        }
    }

    /// Concatenation; `second` must start where `self` ends.
    pub fn then(&self, second: &Path) -> Result<Self> {
        if self.end() != second.start() {
            return Err(GeomError::BaseMismatch);
        }
        let mut samples = self.samples.clone();
        samples.extend_from_slice(&second.samples[1..]);
        Ok(Self { samples })
    }

    /// Inserts chart-linear samples so no segment is longer than `max_step`.
    pub fn refined(&self, max_step: f64) -> Self {
        let mut samples = Vec::with_capacity(self.samples.len());
        samples.push(self.samples[0]);
        for w in self.samples.windows(2) {
            let pieces = ceil(w[0].chart_distance(w[1]) / max_step).max(1.0) as usize;
            for k in 1..=pieces {
                samples.push(if k == pieces {
                    w[1]
                } else {
                    w[0].lerp(w[1], k as f64 / pieces as f64)
                });
            }
        }
        Self { samples }
    }

    /// Chart length of the polyline.
    pub fn chart_length(&self) -> f64 {
        self.samples
            .windows(2)
            .map(|w| w[0].chart_distance(w[1]))
            .sum()
    }
}

/// A closed path. The last sample equals the first, or differs from it by
/// whole periods of a periodic chart axis (a loop that winds around).
#[derive(Debug, Clone, PartialEq)]
pub struct Loop {
    path: Path,
    offset: [f64; 2],
    winding: [i32; 2],
}

impl Loop {
    /// A loop whose last sample equals its first exactly.
    pub fn new(path: Path) -> Result<Self> {
        if path.start() != path.end() {
            return Err(GeomError::NotClosed);
        }
        Ok(Self {
            path,
            offset: [0.0; 2],
            winding: [0, 0],
        })
    }

    /// A loop that may close up to whole periods of `domain`'s periodic axes.
    pub fn periodic(path: Path, domain: &ChartDomain) -> Result<Self> {
        let (a, b) = (path.start(), path.end());
        let delta = [b.u - a.u, b.v - a.v];
        let periods = domain.periods();
        let mut winding = [0i32; 2];
        let mut offset = [0.0; 2];
        for k in 0..2 {
            match periods[k] {
                Some(period) => {
                    let turns = round(delta[k] / period);
                    if (delta[k] - turns * period).abs() > 1e-9 * period {
                        return Err(GeomError::NotClosed);
                    }
                    winding[k] = turns as i32;
                    offset[k] = delta[k];
                }
                None if delta[k] != 0.0 => return Err(GeomError::NotClosed),
                None => {}
            }
        }
        Ok(Self {
            path,
            offset,
            winding,
        })
    }

    pub fn path(&self) -> &Path {
        &self.path
    }

    pub fn samples(&self) -> &[ChartPoint] {
        self.path.samples()
    }

    pub fn base(&self) -> ChartPoint {
        self.path.start()
    }

    /// Chart displacement from the first sample to the last.
    pub fn offset(&self) -> [f64; 2] {
        self.offset
    }

    /// Number of times the loop wraps each periodic axis.
    pub fn winding(&self) -> [i32; 2] {
        self.winding
    }

    pub fn is_contractible_in_chart(&self) -> bool {
        self.winding == [0, 0]
    }

    pub fn reversed(&self) -> Self {
        // Reversed samples run from base+offset back to base; shift them home.
        let path = self
            .path
            .reversed()
            .translated(-self.offset[0], -self.offset[1]);
        Self {
            path,
            offset: [-self.offset[0], -self.offset[1]],
            winding: [-self.winding[0], -self.winding[1]],
        }
    }

    /// Traverses `self` then `second`; both must share the base point.
    pub fn compose(&self, second: &Loop) -> Result<Self> {
        if self.base() != second.base() {
            return Err(GeomError::BaseMismatch);
        }
        let shifted = second.path.translated(self.offset[0], self.offset[1]);
        let mut samples = self.path.samples.clone();
        samples.extend_from_slice(&shifted.samples[1..]);
        Ok(Self {
            path: Path { samples },
            offset: [
                self.offset[0] + second.offset[0],
                self.offset[1] + second.offset[1],
            ],
            winding: [
                self.winding[0] + second.winding[0],
                self.winding[1] + second.winding[1],
            ],
        })
    }

    /// Inserts an out-and-back excursion along `spur` at sample `index`.
    pub fn add_detour(&self, index: usize, spur: &Path) -> Result<Self> {
        let s = self.samples();
        if index >= s.len() {
            return Err(GeomError::IndexOutOfRange {
                index,
                len: s.len(),
            });
        }
        if spur.start() != s[index] {
            return Err(GeomError::SpurStartMismatch);
        }
        let back = spur.reversed();
        let mut samples = s[..=index].to_vec();
        samples.extend_from_slice(&spur.samples[1..]);
        samples.extend_from_slice(&back.samples[1..]);
        samples.extend_from_slice(&s[index + 1..]);
        Ok(Self {
            path: Path { samples },
            offset: self.offset,
            winding: self.winding,
        })
    }

    /// Moves the base point: travels `lead` to the current base, around the
    /// loop, then back along `lead`.
    pub fn conjugate(&self, lead: &Path) -> Result<Self> {
        if lead.end() != self.base() {
            return Err(GeomError::BaseMismatch);
        }
        let back = lead.reversed().translated(self.offset[0], self.offset[1]);
        let mut samples = lead.samples.clone();
        samples.extend_from_slice(&self.path.samples[1..]);
        samples.extend_from_slice(&back.samples[1..]);
        Ok(Self {
            path: Path { samples },
            offset: self.offset,
            winding: self.winding,
        })
    }

    /// Same loop started at sample `index`.
    pub fn rebase(&self, index: usize) -> Result<Self> {
        let s = self.samples();
        let n = s.len() - 1;
        if index > n {
            return Err(GeomError::IndexOutOfRange {
                index,
                len: s.len(),
            });
        }
        let mut samples = s[index..].to_vec();
        samples.extend(
            s[1..=index]
                .iter()
                .map(|p| p.offset(self.offset[0], self.offset[1])),
        );
        Ok(Self {
            path: Path { samples },
            offset: self.offset,
            winding: self.winding,
        })
    }
}

/// Which side of its boundary a region lies on, in the chart.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Orientation {
    /// Counterclockwise in the `(u, v)` chart: the region is on the left.
    Positive,
    Negative,
}

impl Orientation {
    pub fn sign(self) -> f64 {
        match self {
            Orientation::Positive => 1.0,
            Orientation::Negative => -1.0,
        }
    }
}

/// A simple chart-closed loop bounding a region.
#[derive(Debug, Clone, PartialEq)]
pub struct RegionBoundary {
    boundary: Loop,
    orientation: Orientation,
}

impl RegionBoundary {
    pub fn new(boundary: Loop) -> Result<Self> {
        if !boundary.is_contractible_in_chart() {
            return Err(GeomError::NonContractible);
        }
        let ring = polygon::open_ring(boundary.samples());
        if ring.len() < 3 {
            return Err(GeomError::TooFewVertices(ring.len()));
        }
        if !polygon::polyline_is_simple(ring, true) {
            return Err(GeomError::SelfIntersecting);
        }
        let orientation = if polygon::signed_area(ring) > 0.0 {
            Orientation::Positive
        } else {
            Orientation::Negative
        };
        Ok(Self {
            boundary,
            orientation,
        })
    }

    pub fn from_vertices(vertices: Vec<ChartPoint>) -> Result<Self> {
        let mut samples = vertices;
        if samples.first() != samples.last() {
            samples.push(samples[0]);
        }
        Self::new(Loop::new(Path::new(samples)?)?)
    }

    pub fn boundary(&self) -> &Loop {
        &self.boundary
    }

    pub fn samples(&self) -> &[ChartPoint] {
        self.boundary.samples()
    }

    /// Boundary vertices without the closing repeat.
    pub fn ring(&self) -> &[ChartPoint] {
        polygon::open_ring(self.boundary.samples())
    }

    pub fn orientation(&self) -> Orientation {
        self.orientation
    }

    pub fn reversed(&self) -> Self {
        Self {
            boundary: self.boundary.reversed(),
            orientation: match self.orientation {
                Orientation::Positive => Orientation::Negative,
                Orientation::Negative => Orientation::Positive,
            },
        }
    }

    pub fn contains(&self, p: ChartPoint) -> bool {
        polygon::contains_point(self.ring(), p)
    }

    /// Metric area of the enclosed region.
    pub fn area(&self, surface: &Surface) -> Result<f64> {
        surface.area_of_region(self.ring())
    }

    /// Chart bounding box `(u_min, u_max, v_min, v_max)`.
    pub fn bounding_box(&self) -> (f64, f64, f64, f64) {
        self.ring().iter().fold(
            (
                f64::INFINITY,
                f64::NEG_INFINITY,
                f64::INFINITY,
                f64::NEG_INFINITY,
            ),
            |(a, b, c, d), p| (a.min(p.u), b.max(p.u), c.min(p.v), d.max(p.v)),
        )
    }
}

/// Splits a region along a chord joining two boundary samples.
///
/// Both pieces keep the orientation of `region`; their holonomies add up to
/// that of the whole.
pub fn subdivide_region(
    region: &RegionBoundary,
    chord: &Path,
) -> Result<(RegionBoundary, RegionBoundary)> {
    let b = region.samples();
    let n = b.len() - 1;
    let find = |p: ChartPoint| (0..n).find(|&k| b[k] == p);
    let (i, j) = match (find(chord.start()), find(chord.end())) {
        (Some(i), Some(j)) if i != j => (i, j),
        _ => return Err(GeomError::ChordNotOnBoundary),
    };
    let ring = region.ring();
    let c = chord.samples();
    for &p in &c[1..c.len() - 1] {
        if !polygon::contains_point(ring, p) {
            return Err(GeomError::ChordExitsRegion);
        }
    }
    // Chord runs i -> j; orient it so that it goes from the lower to the higher index.
    let (i, j, forward) = if i < j {
        (i, j, chord.clone())
    } else {
        (j, i, chord.reversed())
    };
    let back = forward.reversed();

    let mut first = b[i..=j].to_vec();
    first.extend_from_slice(&back.samples()[1..]);

    let mut second = forward.samples().to_vec();
    second.extend_from_slice(&b[j + 1..]);
    second.extend_from_slice(&b[1..=i]);

    let wrap = |samples: Vec<ChartPoint>| -> Result<RegionBoundary> {
        let piece = RegionBoundary::new(Loop::new(Path::new(samples)?)?).map_err(|e| match e {
            GeomError::SelfIntersecting => GeomError::ChordExitsRegion,
            other => other,
        })?;
        if piece.orientation != region.orientation {
            return Err(GeomError::ChordExitsRegion);
        }
        Ok(piece)
    };
    Ok((wrap(first)?, wrap(second)?))
}

/// Straight chart segment from `a` to `b` with `segments` pieces.
pub fn line(a: ChartPoint, b: ChartPoint, segments: usize) -> Result<Path> {
    let segments = segments.max(1);
    Path::new(
        (0..=segments)
            .map(|k| a.lerp(b, k as f64 / segments as f64))
            .collect(),
    )
}

/// Piecewise chart-linear path through `points`, refined to `max_step`.
pub fn waypoints(points: &[ChartPoint], max_step: f64) -> Result<Path> {
    Ok(Path::new(points.to_vec())?.refined(max_step))
}

/// Counterclockwise chart rectangle starting at `(u0, v0)`, each side cut
/// into `per_side` segments.
pub fn chart_rectangle(u0: f64, u1: f64, v0: f64, v1: f64, per_side: usize) -> Result<Loop> {
    let corners = [
        ChartPoint::new(u0, v0),
        ChartPoint::new(u1, v0),
        ChartPoint::new(u1, v1),
        ChartPoint::new(u0, v1),
        ChartPoint::new(u0, v0),
    ];
    let n = per_side.max(1);
    let mut samples = alloc::vec![corners[0]];
    for w in corners.windows(2) {
        samples.extend((1..=n).map(|k| w[0].lerp(w[1], k as f64 / n as f64)));
    }
    Loop::new(Path::new(samples)?)
}

/// The circle `u = const` once around the periodic `v` axis, in increasing `v`.
pub fn latitude_circle(surface: &Surface, u: f64, v0: f64, segments: usize) -> Result<Loop> {
    let domain = surface.domain();
    let period = domain.periods()[1].ok_or(GeomError::InvalidArgument("v axis is not periodic"))?;
    let n = segments.max(3);
    let samples = (0..=n)
        .map(|k| ChartPoint::new(u, v0 + period * k as f64 / n as f64))
        .collect();
    Loop::periodic(Path::new(samples)?, domain)
}

/// Chart circle of `radius` about `center` from angle `a0` to `a1`.
pub fn arc(center: ChartPoint, radius: f64, a0: f64, a1: f64, segments: usize) -> Result<Path> {
    let n = segments.max(1);
    let mut samples: Vec<ChartPoint> = (0..=n)
        .map(|k| {
            let t = a0 + (a1 - a0) * k as f64 / n as f64;
            center.offset(radius * cos(t), radius * sin(t))
        })
        .collect();
    if ((a1 - a0).abs() - 2.0 * PI).abs() < 1e-12 {
        samples[n] = samples[0];
    }
    Path::new(samples)
}

/// Chart tangent directions at each sample, taken from the chart circle
/// through each sample and its neighbours (exact on chart lines and circles).
/// Not normalized.
pub fn chart_tangents(samples: &[ChartPoint]) -> Vec<[f64; 2]> {
    let n = samples.len();
    let d = |a: ChartPoint, b: ChartPoint| [b.u - a.u, b.v - a.v];
    let sq = |x: [f64; 2]| x[0] * x[0] + x[1] * x[1];
    if n == 2 {
        let t = d(samples[0], samples[1]);
        return alloc::vec![t, t];
    }
    (0..n)
        .map(|i| {
            if i == 0 {
                let (b, c) = (d(samples[0], samples[1]), d(samples[0], samples[2]));
                let (bb, cc) = (sq(b), sq(c));
                [cc * b[0] - bb * c[0], cc * b[1] - bb * c[1]]
            } else if i == n - 1 {
                let (a, b) = (
                    d(samples[n - 1], samples[n - 3]),
                    d(samples[n - 1], samples[n - 2]),
                );
                let (aa, bb) = (sq(a), sq(b));
                [bb * a[0] - aa * b[0], bb * a[1] - aa * b[1]]
            } else {
                let (a, c) = (d(samples[i], samples[i - 1]), d(samples[i], samples[i + 1]));
                let (aa, cc) = (sq(a), sq(c));
                [aa * c[0] - cc * a[0], aa * c[1] - cc * a[1]]
            }
        })
        .collect()
}
