//! Gaussian curvature three ways: holonomy per unit area of shrinking
//! geodesic quadrilaterals, integrated against loop holonomy over regions,
//! and extrinsically from the quadratic fit `z = a x² + b y²` of the
//! embedded surface. Also the angle excess of geodesic polygons.

use alloc::vec::Vec;
use core::f64::consts::PI;

use libm::{atan2, sqrt};

use crate::error::{GeomError, Result};
use crate::geodesics::{connect_geodesic, exp_map, frame_direction, shooting_step};
use crate::numeric::{self, cross, dot, norm, sub, Vec3};
use crate::paths::{Loop, Orientation, Path, RegionBoundary};
use crate::polygon;
use crate::surface::{ChartPoint, Surface};
use crate::transport::loop_holonomy;

/// One member of a shrinking loop family.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RatioSample {
    pub scale: f64,
    pub holonomy: f64,
    pub area: f64,
    pub ratio: f64,
}

/// Curvature at a point as the limit of holonomy over area.
#[derive(Debug, Clone, PartialEq)]
pub struct CurvatureEstimate {
    pub point: ChartPoint,
    pub ratios: Vec<RatioSample>,
    pub extrapolated: f64,
    /// Largest change between successive extrapolation levels.
    pub error_estimate: f64,
}

/// Default quadrilateral half-sizes: `[0.1, 0.05, 0.025]` × feature scale.
pub fn default_scales(surface: &Surface) -> Vec<f64> {
    let f = surface.feature_scale();
    alloc::vec![0.1 * f, 0.05 * f, 0.025 * f]
}

/// Geodesic quadrilateral about `p` with corners `exp_p(±a·e1 ± b·e2)`,
/// traversed counterclockwise.
pub fn geodesic_quadrilateral(surface: &Surface, p: ChartPoint, a: f64, b: f64) -> Result<Loop> {
    let g = surface.metric_at(p)?;
    surface.check_interior(p)?;
    let e1 = frame_direction(&g, 0.0);
    let e2 = frame_direction(&g, PI / 2.0);
    let corner = |s1: f64, s2: f64| {
        let d = [
            s1 * a * e1[0] + s2 * b * e2[0],
            s1 * a * e1[1] + s2 * b * e2[1],
        ];
        exp_map(surface, p, d)
    };
    let corners = [
        corner(-1.0, -1.0)?,
        corner(1.0, -1.0)?,
        corner(1.0, 1.0)?,
        corner(-1.0, 1.0)?,
    ];
    let mut samples = alloc::vec![corners[0]];
    for k in 0..4 {
        let side = connect_geodesic(surface, corners[k], corners[(k + 1) % 4])?;
        samples.extend_from_slice(&side.result_path.samples()[1..]);
    }
    Loop::new(Path::new(samples)?)
}

/// [`curvature_at_with_aspect`] with square quadrilaterals.
pub fn curvature_at(surface: &Surface, p: ChartPoint, scales: &[f64]) -> Result<CurvatureEstimate> {
    curvature_at_with_aspect(surface, p, scales, (1.0, 1.0))
}

/// Holonomy/area of geodesic quadrilaterals with half-sides
/// `(scale·aspect.0, scale·aspect.1)`, extrapolated to zero size assuming an
/// error even in the scale.
pub fn curvature_at_with_aspect(
    surface: &Surface,
    p: ChartPoint,
    scales: &[f64],
    aspect: (f64, f64),
) -> Result<CurvatureEstimate> {
    surface.check_interior(p)?;
    if scales.is_empty() || aspect.0 <= 0.0 || aspect.1 <= 0.0 {
        return Err(GeomError::InvalidArgument(
            "need at least one scale and a positive aspect",
        ));
    }
    let floor = 10.0 * shooting_step(surface);
    for &s in scales {
        let smallest = s * aspect.0.min(aspect.1);
        if !(smallest >= floor * (1.0 - 1e-9)) {
            return Err(GeomError::ScaleBelowNoiseFloor {
                scale: smallest,
                floor,
            });
        }
    }
    let area_floor = 1e-12 * surface.feature_scale() * surface.feature_scale();
    let mut ratios = Vec::with_capacity(scales.len());
    for &s in scales {
        let l = geodesic_quadrilateral(surface, p, s * aspect.0, s * aspect.1)?;
        let holonomy = loop_holonomy(surface, &l)?;
        let area = surface.area_of_region(l.samples())?;
        if area < area_floor {
            return Err(GeomError::AreaBelowNoiseFloor { area });
        }
        ratios.push(RatioSample {
            scale: s,
            holonomy,
            area,
            ratio: holonomy / area,
        });
    }
    let xs: Vec<f64> = ratios.iter().map(|r| r.scale * r.scale).collect();
    let fs: Vec<f64> = ratios.iter().map(|r| r.ratio).collect();
    let diagonal = numeric::neville_to_zero(&xs, &fs);
    let error_estimate = diagonal
        .windows(2)
        .map(|w| (w[1] - w[0]).abs())
        .fold(0.0, f64::max);
    Ok(CurvatureEstimate {
        point: p,
        ratios,
        extrapolated: diagonal[diagonal.len() - 1],
        error_estimate,
    })
}

/// Pointwise intrinsic curvature `K = -dω / dA` from fourth-order central
/// differences of the frame connection form.
pub fn gaussian_curvature(surface: &Surface, p: ChartPoint) -> Result<f64> {
    surface.check_interior(p)?;
    let h = 1e-3 * surface.feature_scale();
    let w = |du: f64, dv: f64| surface.connection_form_unchecked(p.offset(du, dv));
    let d =
        |f: &dyn Fn(f64) -> f64| (f(-2.0 * h) - 8.0 * f(-h) + 8.0 * f(h) - f(2.0 * h)) / (12.0 * h);
    let dwv_du = d(&|t| w(t, 0.0)[1]);
    let dwu_dv = d(&|t| w(0.0, t)[0]);
    Ok(-(dwv_du - dwu_dv) / surface.area_element(p))
}

/// A piece of a region: the part of one grid cell inside the boundary.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RegionCell {
    pub centroid: ChartPoint,
    /// Chart area of the piece (positive).
    pub chart_area: f64,
}

/// Clips `region` against a `grid × grid` lattice over its bounding box.
pub fn region_cells(region: &RegionBoundary, grid: usize) -> Result<Vec<RegionCell>> {
    if grid < 4 {
        return Err(GeomError::GridTooCoarse { min: 4, got: grid });
    }
    let (u0, u1, v0, v1) = region.bounding_box();
    let (hu, hv) = ((u1 - u0) / grid as f64, (v1 - v0) / grid as f64);
    let ring = region.ring();
    let sign = region.orientation().sign();
    let mut cells = Vec::new();
    for j in 0..grid {
        let (lo, hi) = (v0 + j as f64 * hv, v0 + (j + 1) as f64 * hv);
        let strip = polygon::clip_to_rect(ring, f64::NEG_INFINITY, f64::INFINITY, lo, hi);
        if strip.len() < 3 {
            continue;
        }
        for i in 0..grid {
            let (a, b) = (u0 + i as f64 * hu, u0 + (i + 1) as f64 * hu);
            let piece = polygon::clip_to_rect(&strip, a, b, lo, hi);
            if piece.len() < 3 {
                continue;
            }
            let chart_area = sign * polygon::signed_area(&piece);
            if chart_area <= 0.0 {
                continue;
            }
            cells.push(RegionCell {
                centroid: polygon::centroid(&piece),
                chart_area,
            });
        }
    }
    Ok(cells)
}

/// `K·√det·area` for one cell, evaluated at the cell centroid.
pub fn cell_integral(surface: &Surface, cell: &RegionCell) -> Result<f64> {
    Ok(gaussian_curvature(surface, cell.centroid)?
        * surface.area_element(cell.centroid)
        * cell.chart_area)
}

/// Boundary holonomy against the curvature integral over a region.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussBonnet {
    pub holonomy: f64,
    /// `∬K dA`, signed by the boundary orientation.
    pub integral: f64,
    pub residual: f64,
}

impl GaussBonnet {
    pub fn new(holonomy: f64, integral: f64) -> Self {
        Self {
            holonomy,
            integral,
            residual: (holonomy - integral).abs(),
        }
    }
}

/// Compares the boundary holonomy with a centroid-rule quadrature of the
/// curvature over a `grid × grid` lattice of clipped cells.
pub fn gauss_bonnet_check(
    surface: &Surface,
    region: &RegionBoundary,
    grid: usize,
) -> Result<GaussBonnet> {
    let cells = region_cells(region, grid)?;
    let holonomy = loop_holonomy(surface, region.boundary())?;
    let mut integral = 0.0;
    for cell in &cells {
        integral += cell_integral(surface, cell)?;
    }
    Ok(GaussBonnet::new(
        holonomy,
        region.orientation().sign() * integral,
    ))
}

/// Exterior angles of a geodesic polygon and the holonomy of its boundary.
#[derive(Debug, Clone, PartialEq)]
pub struct AngleExcess {
    /// Signed turning angle at each vertex (positive = left turn).
    pub exterior_angles: Vec<f64>,
    pub exterior_angle_sum: f64,
    pub holonomy: f64,
    pub orientation: Orientation,
    pub boundary: RegionBoundary,
}

impl AngleExcess {
    pub fn interior_angles(&self) -> Vec<f64> {
        let s = self.orientation.sign();
        self.exterior_angles.iter().map(|e| PI - s * e).collect()
    }
}

/// Builds the geodesic polygon through `vertices` and measures its turning
/// angles with the metric at each vertex.
pub fn polygon_angle_excess(surface: &Surface, vertices: &[ChartPoint]) -> Result<AngleExcess> {
    let ring = polygon::open_ring(vertices);
    let n = ring.len();
    if n < 3 {
        return Err(GeomError::TooFewVertices(n));
    }
    let sides = (0..n)
        .map(|k| connect_geodesic(surface, ring[k], ring[(k + 1) % n]))
        .collect::<Result<Vec<_>>>()?;
    let mut samples = alloc::vec![ring[0]];
    for side in &sides {
        samples.extend_from_slice(&side.result_path.samples()[1..]);
    }
    let boundary = RegionBoundary::new(Loop::new(Path::new(samples)?)?)?;
    let mut exterior_angles = Vec::with_capacity(n);
    for k in 0..n {
        let incoming = sides[(k + n - 1) % n].end_velocity;
        let outgoing = sides[k].direction.components();
        let g = surface.metric_at(ring[k])?;
        exterior_angles.push(atan2(
            g.wedge(incoming, outgoing),
            g.inner(incoming, outgoing),
        ));
    }
    let holonomy = loop_holonomy(surface, boundary.boundary())?;
    Ok(AngleExcess {
        exterior_angle_sum: exterior_angles.iter().sum(),
        exterior_angles,
        holonomy,
        orientation: boundary.orientation(),
        boundary,
    })
}

/// Principal coefficients of the local quadratic fit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadraticFit {
    pub a: f64,
    pub b: f64,
    /// RMS over the stencil of what the quadratic part leaves unexplained.
    pub residual: f64,
}

impl QuadraticFit {
    /// `4ab`.
    pub fn curvature(&self) -> f64 {
        4.0 * self.a * self.b
    }
}

/// Default stencil radius: `1e-2` × feature scale.
pub fn default_stencil_radius(surface: &Surface) -> f64 {
    1e-2 * surface.feature_scale()
}

/// Chart point whose embedding projects to `(x, y)` in the tangent frame.
fn project_to_surface(
    surface: &Surface,
    origin: Vec3,
    t1: Vec3,
    t2: Vec3,
    start: ChartPoint,
    x: f64,
    y: f64,
) -> Result<ChartPoint> {
    let mut q = start;
    for _ in 0..30 {
        let r = sub(
            surface
                .embed(q)
                .ok_or_else(|| GeomError::NoEmbedding(surface.name().into()))?,
            origin,
        );
        let res = [dot(r, t1) - x, dot(r, t2) - y];
        let (ru, rv) = surface
            .embedding_jacobian(q)
            .ok_or_else(|| GeomError::NoEmbedding(surface.name().into()))?;
        let jac = [[dot(t1, ru), dot(t1, rv)], [dot(t2, ru), dot(t2, rv)]];
        let step = numeric::solve2(jac, res).ok_or(GeomError::RankDeficient)?;
        q = q.offset(-step[0], -step[1]);
        if libm::hypot(step[0], step[1]) <= 1e-15 * (1.0 + libm::hypot(q.u, q.v)) {
            break;
        }
    }
    Ok(q)
}

/// Fits `z = A x² + C xy + B y²` (plus quartic terms) to the embedded
/// surface around `p` in its tangent frame on a 5×5 stencil, then rotates
/// about the normal to remove the cross term.
pub fn quadratic_fit_curvature(
    surface: &Surface,
    p: ChartPoint,
    stencil_radius: f64,
) -> Result<QuadraticFit> {
    if !surface.has_embedding() {
        return Err(GeomError::NoEmbedding(surface.name().into()));
    }
    surface.check_interior(p)?;
    if !(stencil_radius > 0.0) {
        return Err(GeomError::InvalidArgument(
            "stencil radius must be positive",
        ));
    }
    let origin = surface
        .embed(p)
        .ok_or_else(|| GeomError::NoEmbedding(surface.name().into()))?;
    let (ru, rv) = surface
        .embedding_jacobian(p)
        .ok_or_else(|| GeomError::NoEmbedding(surface.name().into()))?;
    let normal = numeric::normalize(cross(ru, rv));
    let t1 = numeric::scale(ru, 1.0 / norm(ru));
    let t2 = cross(normal, t1);

    // Quartic terms ride along so their leakage into the quadratic
    // coefficients cancels; odd orders drop out on the symmetric stencil.
    let basis = |x: f64, y: f64| {
        [
            x * x,
            x * y,
            y * y,
            x * x * x * x,
            x * x * x * y,
            x * x * y * y,
            x * y * y * y,
            y * y * y * y,
        ]
    };
    const TERMS: usize = 8;
    let mut rows = Vec::with_capacity(25);
    for i in -2i32..=2 {
        for j in -2i32..=2 {
            let (xn, yn) = (i as f64 / 2.0, j as f64 / 2.0);
            let q = project_to_surface(
                surface,
                origin,
                t1,
                t2,
                p,
                stencil_radius * xn,
                stencil_radius * yn,
            )?;
            let r = sub(surface.embed(q).unwrap_or(origin), origin);
            rows.push((basis(xn, yn), dot(r, normal)));
        }
    }
    let mut ata = alloc::vec![0.0; TERMS * TERMS];
    let mut atz = alloc::vec![0.0; TERMS];
    for (b, z) in &rows {
        for r in 0..TERMS {
            atz[r] += b[r] * z;
            for c in 0..TERMS {
                ata[r * TERMS + c] += b[r] * b[c];
            }
        }
    }
    let coef = numeric::solve_linear(ata, atz).ok_or(GeomError::RankDeficient)?;
    let residual = sqrt(
        rows.iter()
            .map(|(b, z)| {
                let e = z - b[..3].iter().zip(&coef).map(|(x, c)| x * c).sum::<f64>();
                e * e
            })
            .sum::<f64>()
            / rows.len() as f64,
    );
    let r2 = stencil_radius * stencil_radius;
    let (a2, c2, b2) = (coef[0] / r2, coef[1] / r2, coef[2] / r2);
    let (a, b) = numeric::symmetric_eigenvalues(a2, b2, 0.5 * c2);
    Ok(QuadraticFit { a, b, residual })
}

/// Intrinsic against extrinsic curvature at one point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EgregiumRow {
    pub point: ChartPoint,
    pub intrinsic: f64,
    pub extrinsic: f64,
    pub relative_gap: f64,
    pub intrinsic_error: f64,
}

/// Holonomy-based curvature versus `4ab` at each point, with default
/// scales and stencil radius.
pub fn egregium_check(surface: &Surface, points: &[ChartPoint]) -> Result<Vec<EgregiumRow>> {
    let scales = default_scales(surface);
    let radius = default_stencil_radius(surface);
    points
        .iter()
        .map(|&p| egregium_row(surface, p, &scales, radius))
        .collect()
}

/// Curvature magnitude below which gaps are measured absolutely, in units of
/// `1 / feature_scale²`.
pub fn curvature_floor(surface: &Surface) -> f64 {
    let f = surface.feature_scale();
    1e-3 / (f * f)
}

/// One row of [`egregium_check`]. The gap is relative to the extrinsic
/// value, or to [`curvature_floor`] where that is smaller.
pub fn egregium_row(
    surface: &Surface,
    p: ChartPoint,
    scales: &[f64],
    radius: f64,
) -> Result<EgregiumRow> {
    let intrinsic = curvature_at(surface, p, scales)?;
    let extrinsic = quadratic_fit_curvature(surface, p, radius)?.curvature();
    Ok(EgregiumRow {
        point: p,
        intrinsic: intrinsic.extrapolated,
        extrinsic,
        relative_gap: (intrinsic.extrapolated - extrinsic).abs()
            / extrinsic.abs().max(curvature_floor(surface)),
        intrinsic_error: intrinsic.error_estimate,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::paths;
    use core::f64::consts::FRAC_PI_2;

    fn p(u: f64, v: f64) -> ChartPoint {
        ChartPoint::new(u, v)
    }

    #[test]
    fn pointwise_curvature_of_builtins() {
        let sphere = Surface::sphere(2.0).unwrap();
        assert!((gaussian_curvature(&sphere, p(1.0, 2.0)).unwrap() - 0.25).abs() < 1e-9);
        let torus = Surface::torus(2.0, 1.0).unwrap();
        assert!((gaussian_curvature(&torus, p(0.0, 1.0)).unwrap() - 1.0 / 3.0).abs() < 1e-9);
        // inner equator: cos π / (1·(2 - 1)) = -1
        assert!((gaussian_curvature(&torus, p(PI, 1.0)).unwrap() + 1.0).abs() < 1e-9);
        let cyl = Surface::cylinder(1.0).unwrap();
        assert_eq!(gaussian_curvature(&cyl, p(0.0, 1.0)).unwrap(), 0.0);
    }

    #[test]
    fn sphere_curvature_from_holonomy() {
        let s = Surface::sphere(2.0).unwrap();
        let est = curvature_at(&s, p(1.1, 2.0), &default_scales(&s)).unwrap();
        assert!((est.extrapolated - 0.25).abs() < 1e-6);
        assert!(est.ratios.windows(2).all(|w| w[1].area < w[0].area));
        assert!(
            (est.extrapolated - est.ratios.last().unwrap().ratio).abs()
                <= 10.0 * est.error_estimate + 1e-15
        );
    }

    #[test]
    fn scale_floor_is_enforced() {
        let s = Surface::sphere(1.0).unwrap();
        assert!(matches!(
            curvature_at(&s, p(1.0, 1.0), &[0.1, 0.001]),
            Err(GeomError::ScaleBelowNoiseFloor { .. })
        ));
    }

    #[test]
    fn quadrilateral_is_positive() {
        let s = Surface::hill(1.0, 1.0).unwrap();
        let l = geodesic_quadrilateral(&s, p(0.3, -0.2), 0.1, 0.05).unwrap();
        let r = RegionBoundary::new(l).unwrap();
        assert_eq!(r.orientation(), Orientation::Positive);
    }

    #[test]
    fn gauss_bonnet_on_plane_is_zero() {
        let s = Surface::plane();
        let r =
            RegionBoundary::new(paths::chart_rectangle(0.0, 1.0, 0.0, 2.0, 10).unwrap()).unwrap();
        let gb = gauss_bonnet_check(&s, &r, 8).unwrap();
        assert_eq!((gb.holonomy, gb.integral), (0.0, 0.0));
        assert!(matches!(
            gauss_bonnet_check(&s, &r, 3),
            Err(GeomError::GridTooCoarse { .. })
        ));
    }

    #[test]
    fn cells_cover_the_region() {
        let tri = RegionBoundary::from_vertices(alloc::vec![p(0.0, 0.0), p(1.0, 0.0), p(0.0, 1.0)])
            .unwrap();
        let cells = region_cells(&tri, 7).unwrap();
        let total: f64 = cells.iter().map(|c| c.chart_area).sum();
        assert!((total - 0.5).abs() < 1e-14);
        let rev = region_cells(&tri.reversed(), 7).unwrap();
        assert_eq!(cells.len(), rev.len());
    }

    #[test]
    fn plane_triangle_turns_once() {
        let s = Surface::plane();
        let ex = polygon_angle_excess(&s, &[p(0.0, 0.0), p(1.0, 0.0), p(0.0, 1.0)]).unwrap();
        assert!((ex.exterior_angle_sum - 2.0 * PI).abs() < 1e-9);
        assert_eq!(ex.holonomy, 0.0);
        let interior: f64 = ex.interior_angles().iter().sum();
        assert!((interior - PI).abs() < 1e-9);
    }

    #[test]
    fn paraboloid_fit() {
        use alloc::sync::Arc;
        let dom = crate::surface::ChartDomain::rectangle(
            crate::surface::Axis::bounded(-1.0, 1.0),
            crate::surface::Axis::bounded(-1.0, 1.0),
        );
        let metric = Arc::new(|q: ChartPoint| crate::surface::Metric {
            e: 1.0 + 4.0 * q.u * q.u,
            f: 4.0 * q.u * q.v,
            g: 1.0 + 4.0 * q.v * q.v,
        });
        let embed = Arc::new(|q: ChartPoint| [q.u, q.v, q.u * q.u + q.v * q.v]);
        let s = Surface::custom("paraboloid", dom, metric, Some(embed), 1.0).unwrap();
        let fit = quadratic_fit_curvature(&s, p(0.0, 0.0), 1e-2).unwrap();
        assert!((fit.a - 1.0).abs() < 1e-6 && (fit.b - 1.0).abs() < 1e-6);
        assert!((fit.curvature() - 4.0).abs() < 1e-5);
    }

    #[test]
    fn cylinder_fit_has_a_flat_direction() {
        let s = Surface::cylinder(1.0).unwrap();
        let fit = quadratic_fit_curvature(&s, p(0.5, 1.0), 1e-2).unwrap();
        assert!(fit.b.abs() < 1e-9 || fit.a.abs() < 1e-9);
        assert!(fit.curvature().abs() < 1e-8);
        let sphere = Surface::sphere(2.0).unwrap();
        let fit = quadratic_fit_curvature(&sphere, p(FRAC_PI_2 - 0.4, 0.7), 1e-2).unwrap();
        assert!((fit.curvature() - 0.25).abs() < 1e-5);
    }
}
