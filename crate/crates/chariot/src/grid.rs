//! Parallel evaluation over point grids and region cells.
//!
//! Work is split with rayon but results are collected in input order and
//! summed sequentially, so output does not depend on scheduling.

use chariot_core::curvature::{
    self, cell_integral, default_scales, egregium_row, region_cells, EgregiumRow, GaussBonnet,
};
use chariot_core::{
    loop_holonomy, quadratic_fit_curvature, ChartPoint, GeomError, RegionBoundary, Surface,
};
use rayon::prelude::*;

use crate::config::GridSpec;

/// Inclusive `n[0] × n[1]` lattice, `v` varying fastest. A count of 1 takes
/// the midpoint.
pub fn lattice(spec: &GridSpec) -> Vec<ChartPoint> {
    let axis = |r: [f64; 2], n: usize| -> Vec<f64> {
        if n <= 1 {
            vec![0.5 * (r[0] + r[1])]
        } else {
            (0..n)
                .map(|k| r[0] + (r[1] - r[0]) * k as f64 / (n - 1) as f64)
                .collect()
        }
    };
    let (us, vs) = (axis(spec.u, spec.n[0]), axis(spec.v, spec.n[1]));
    us.iter()
        .flat_map(|&u| vs.iter().map(move |&v| ChartPoint::new(u, v)))
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurvatureRow {
    pub point: ChartPoint,
    pub intrinsic: f64,
    /// `4ab`, when the surface has an embedding.
    pub extrinsic: Option<f64>,
    pub error_estimate: f64,
}

/// Holonomy-based curvature at each point, with the extrinsic value where
/// available. The first failure (in input order) is returned.
pub fn curvature_rows(
    surface: &Surface,
    points: &[ChartPoint],
    scales: Option<&[f64]>,
) -> Result<Vec<CurvatureRow>, GeomError> {
    let defaults = default_scales(surface);
    let scales = scales.unwrap_or(&defaults);
    let radius = curvature::default_stencil_radius(surface);
    points
        .par_iter()
        .map(|&p| {
            let est = chariot_core::curvature_at(surface, p, scales)?;
            let extrinsic = if surface.has_embedding() {
                Some(quadratic_fit_curvature(surface, p, radius)?.curvature())
            } else {
                None
            };
            Ok(CurvatureRow {
                point: p,
                intrinsic: est.extrapolated,
                extrinsic,
                error_estimate: est.error_estimate,
            })
        })
        .collect::<Vec<_>>()
        .into_iter()
        .collect()
}

pub fn egregium_rows(
    surface: &Surface,
    points: &[ChartPoint],
) -> Result<Vec<EgregiumRow>, GeomError> {
    let scales = default_scales(surface);
    let radius = curvature::default_stencil_radius(surface);
    points
        .par_iter()
        .map(|&p| egregium_row(surface, p, &scales, radius))
        .collect::<Vec<_>>()
        .into_iter()
        .collect()
}

/// Same result as `chariot_core::gauss_bonnet_check`, with the cell
/// integrals computed in parallel.
pub fn gauss_bonnet(
    surface: &Surface,
    region: &RegionBoundary,
    grid: usize,
) -> Result<GaussBonnet, GeomError> {
    let cells = region_cells(region, grid)?;
    let holonomy = loop_holonomy(surface, region.boundary())?;
    let parts = cells
        .par_iter()
        .map(|c| cell_integral(surface, c))
        .collect::<Result<Vec<f64>, GeomError>>()?;
    let mut integral = 0.0;
    for x in parts {
        integral += x;
    }
    Ok(GaussBonnet::new(
        holonomy,
        region.orientation().sign() * integral,
    ))
}
