//! Differential geometry of parametrized surfaces through parallel
//! transport: geodesics, real-valued loop holonomy, Gaussian curvature as
//! holonomy per unit area, and the flat-map obstruction that follows.
//!
//! The crate is `no_std` and needs only `alloc`.

#![no_std]
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod curvature;
pub mod error;
pub mod geodesics;
pub mod numeric;
pub mod paths;
pub mod polygon;
pub mod projection;
pub mod surface;
pub mod transport;

pub use curvature::{
    curvature_at, egregium_check, gauss_bonnet_check, polygon_angle_excess,
    quadratic_fit_curvature, CurvatureEstimate, QuadraticFit,
};
pub use error::{GeomError, Result};
pub use geodesics::{
    connect_geodesic, relax_to_geodesic, second_variation_probe, shoot_geodesic, GeodesicShot,
    RelaxOptions, RelaxationReport,
};
pub use paths::{Loop, Orientation, Path, RegionBoundary};
pub use projection::{
    builtin_projection, distortion_report, holonomy_obstruction, DistortionReport, FlatMap,
};
pub use surface::{builtin_surface, ChartDomain, ChartPoint, Metric, Surface, TangentVector};
pub use transport::{
    finite_chariot, loop_holonomy, parallel_transport, ChariotConfig, TransportResult,
};
