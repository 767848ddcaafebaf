//! Parametrized surfaces: chart domains, the first fundamental form,
//! connection coefficients, the orthonormal-frame connection form and
//! region areas.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::sync::Arc;
use core::f64::consts::PI;
use core::fmt;

use libm::{cos, exp, sin, sqrt};

use crate::error::{GeomError, Result};
use crate::numeric::{self, cross, dot, norm, sub, Vec3, GAUSS5};
use crate::paths::Path;
use crate::polygon;

/// A point in chart coordinates.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ChartPoint {
    pub u: f64,
    pub v: f64,
}

impl ChartPoint {
    pub const fn new(u: f64, v: f64) -> Self {
        Self { u, v }
    }

    pub fn offset(self, du: f64, dv: f64) -> Self {
        Self::new(self.u + du, self.v + dv)
    }

    /// Euclidean distance in the chart (not a surface distance).
    pub fn chart_distance(self, other: Self) -> f64 {
        libm::hypot(other.u - self.u, other.v - self.v)
    }

    /// Exact at `t = 0` and `t = 1`.
    pub fn lerp(self, other: Self, t: f64) -> Self {
        Self::new(
            (1.0 - t) * self.u + t * other.u,
            (1.0 - t) * self.v + t * other.v,
        )
    }
}

/// A tangent vector given by its components in the chart coordinate basis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TangentVector {
    pub base: ChartPoint,
    pub du: f64,
    pub dv: f64,
}

impl TangentVector {
    pub const fn new(base: ChartPoint, du: f64, dv: f64) -> Self {
        Self { base, du, dv }
    }

    pub fn components(&self) -> [f64; 2] {
        [self.du, self.dv]
    }
}

/// First fundamental form `E du² + 2F du dv + G dv²`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Metric {
    pub e: f64,
    pub f: f64,
    pub g: f64,
}

impl Metric {
    pub fn det(&self) -> f64 {
        self.e * self.g - self.f * self.f
    }

    pub fn is_positive_definite(&self) -> bool {
        self.e > 0.0 && self.g > 0.0 && self.det() > 0.0
    }

    pub fn inner(&self, a: [f64; 2], b: [f64; 2]) -> f64 {
        self.e * a[0] * b[0] + self.f * (a[0] * b[1] + a[1] * b[0]) + self.g * a[1] * b[1]
    }

    pub fn norm(&self, a: [f64; 2]) -> f64 {
        sqrt(self.inner(a, a).max(0.0))
    }

    /// Signed area spanned by `a` then `b` (the metric volume form).
    pub fn wedge(&self, a: [f64; 2], b: [f64; 2]) -> f64 {
        sqrt(self.det().max(0.0)) * (a[0] * b[1] - a[1] * b[0])
    }

    /// Rotates `a` by +90° in the metric (the left normal).
    pub fn rotate_quarter(&self, a: [f64; 2]) -> [f64; 2] {
        // J a satisfies <Ja, a> = 0 and |Ja| = |a|; built from g^{-1} applied to the area form.
        let s = sqrt(self.det());
        let lowered = [self.e * a[0] + self.f * a[1], self.f * a[0] + self.g * a[1]];
        [-lowered[1] / s, lowered[0] / s]
    }

    fn component(&self, i: usize, j: usize) -> f64 {
        match (i, j) {
            (0, 0) => self.e,
            (1, 1) => self.g,
            _ => self.f,
        }
    }
}

/// Partial derivatives of the metric along `u` and `v`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MetricDerivatives {
    pub du: Metric,
    pub dv: Metric,
}

impl MetricDerivatives {
    fn along(&self, axis: usize) -> &Metric {
        if axis == 0 {
            &self.du
        } else {
            &self.dv
        }
    }
}

/// Connection coefficients `gamma[k][i][j]`, symmetric in `(i, j)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChristoffelSymbols {
    pub gamma: [[[f64; 2]; 2]; 2],
}

impl ChristoffelSymbols {
    /// `Γ^k_ij a^i b^j`.
    pub fn contract(&self, a: [f64; 2], b: [f64; 2]) -> [f64; 2] {
        let mut out = [0.0; 2];
        for (k, slot) in out.iter_mut().enumerate() {
            for i in 0..2 {
                for j in 0..2 {
                    *slot += self.gamma[k][i][j] * a[i] * b[j];
                }
            }
        }
        out
    }
}

/// Position and first/second partial derivatives of an embedding.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EmbeddingJet {
    pub r: Vec3,
    pub ru: Vec3,
    pub rv: Vec3,
    pub ruu: Vec3,
    pub ruv: Vec3,
    pub rvv: Vec3,
}

impl EmbeddingJet {
    fn metric(&self) -> Metric {
        Metric {
            e: dot(self.ru, self.ru),
            f: dot(self.ru, self.rv),
            g: dot(self.rv, self.rv),
        }
    }

    fn metric_derivatives(&self) -> MetricDerivatives {
        MetricDerivatives {
            du: Metric {
                e: 2.0 * dot(self.ru, self.ruu),
                f: dot(self.ruu, self.rv) + dot(self.ru, self.ruv),
                g: 2.0 * dot(self.rv, self.ruv),
            },
            dv: Metric {
                e: 2.0 * dot(self.ru, self.ruv),
                f: dot(self.ruv, self.rv) + dot(self.ru, self.rvv),
                g: 2.0 * dot(self.rv, self.rvv),
            },
        }
    }
}

/// One coordinate axis of a chart rectangle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Axis {
    pub min: f64,
    pub max: f64,
    pub periodic: bool,
}

impl Axis {
    pub const fn bounded(min: f64, max: f64) -> Self {
        Self {
            min,
            max,
            periodic: false,
        }
    }

    pub const fn periodic(min: f64, max: f64) -> Self {
        Self {
            min,
            max,
            periodic: true,
        }
    }

    pub fn extent(&self) -> f64 {
        self.max - self.min
    }

    fn contains(&self, x: f64, margin: f64) -> bool {
        self.periodic || (x >= self.min + margin && x <= self.max - margin)
    }
}

/// Chart rectangle with periodicity flags.
///
/// A polar chart degenerates at both ends of the `u` axis (the poles of a
/// colatitude/longitude chart); points within `pole_margin` of those ends are
/// excluded from every differential computation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChartDomain {
    pub u: Axis,
    pub v: Axis,
    pub polar: bool,
    pub pole_margin: f64,
}

impl ChartDomain {
    pub const fn rectangle(u: Axis, v: Axis) -> Self {
        Self {
            u,
            v,
            polar: false,
            pole_margin: 0.0,
        }
    }

    /// Closed-rectangle membership (poles included).
    pub fn contains(&self, p: ChartPoint) -> bool {
        p.u.is_finite() && p.v.is_finite() && self.u.contains(p.u, 0.0) && self.v.contains(p.v, 0.0)
    }

    /// Membership with the pole margin applied.
    pub fn contains_interior(&self, p: ChartPoint) -> bool {
        let margin = if self.polar { self.pole_margin } else { 0.0 };
        p.u.is_finite()
            && p.v.is_finite()
            && self.u.contains(p.u, margin)
            && self.v.contains(p.v, 0.0)
    }

    pub fn extent(&self) -> f64 {
        self.u.extent().max(self.v.extent())
    }

    /// Period of each axis, if periodic.
    pub fn periods(&self) -> [Option<f64>; 2] {
        [
            self.u.periodic.then(|| self.u.extent()),
            self.v.periodic.then(|| self.v.extent()),
        ]
    }
}

pub type MetricFn = Arc<dyn Fn(ChartPoint) -> Metric + Send + Sync>;
pub type EmbeddingFn = Arc<dyn Fn(ChartPoint) -> Vec3 + Send + Sync>;

#[derive(Clone)]
enum Shape {
    Plane,
    Sphere {
        radius: f64,
    },
    Cylinder {
        radius: f64,
    },
    Torus {
        major: f64,
        minor: f64,
    },
    Hill {
        height: f64,
        width: f64,
    },
    Ellipsoid {
        a: f64,
        b: f64,
        c: f64,
    },
    Custom {
        metric: MetricFn,
        embedding: Option<EmbeddingFn>,
        feature_scale: f64,
    },
}

/// Kind of a surface, without its closures.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SurfaceKind {
    Plane,
    Sphere { radius: f64 },
    Cylinder { radius: f64 },
    Torus { major: f64, minor: f64 },
    Hill { height: f64, width: f64 },
    Ellipsoid { a: f64, b: f64, c: f64 },
    Custom,
}

/// A parametrized surface: chart domain, metric and optional embedding.
/// Immutable once built; cheap to clone.
#[derive(Clone)]
pub struct Surface {
    name: String,
    domain: ChartDomain,
    shape: Shape,
}

impl fmt::Debug for Surface {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Surface")
            .field("name", &self.name)
            .field("kind", &self.kind())
            .field("domain", &self.domain)
            .finish()
    }
}

pub const DEFAULT_POLE_MARGIN: f64 = 1e-3;

fn positive(name: &'static str, value: f64) -> Result<f64> {
    if value.is_finite() && value > 0.0 {
        Ok(value)
    } else {
        Err(GeomError::NonPositiveParameter { name, value })
    }
}

fn polar_domain() -> ChartDomain {
    ChartDomain {
        u: Axis::bounded(0.0, PI),
        v: Axis::periodic(0.0, 2.0 * PI),
        polar: true,
        pole_margin: DEFAULT_POLE_MARGIN,
    }
}

/// Builds one of the named surfaces.
///
/// | name | params | chart |
/// |------|--------|-------|
/// | `plane` | – | `(x, y)` on `[-10, 10]²` |
/// | `sphere` | `r` | colatitude `u ∈ [0, π]`, longitude `v` (period 2π) |
/// | `cylinder` | `r` | axial `u ∈ [-10r, 10r]`, arc length `v` (period 2πr) |
/// | `torus` | `R, r` | tube angle `u`, revolution angle `v` (both period 2π) |
/// | `hill` | `h, σ` | graph of `h·exp(-(u²+v²)/σ²)` on `[-6σ, 6σ]²` |
/// | `ellipsoid` | `a, b, c` | colatitude/longitude like the sphere |
pub fn builtin_surface(name: &str, params: &[f64]) -> Result<Surface> {
    let count = |expected: &'static str, n: usize| {
        if params.len() == n {
            Ok(())
        } else {
            Err(GeomError::ParameterCount {
                surface: name.to_string(),
                expected,
                got: params.len(),
            })
        }
    };
    match name {
        "plane" => {
            count("0", 0)?;
            Ok(Surface::plane())
        }
        "sphere" => {
            count("1 (radius)", 1)?;
            Surface::sphere(params[0])
        }
        "cylinder" => {
            count("1 (radius)", 1)?;
            Surface::cylinder(params[0])
        }
        "torus" => {
            count("2 (major, minor radius)", 2)?;
            Surface::torus(params[0], params[1])
        }
        "hill" => {
            count("2 (height, width)", 2)?;
            Surface::hill(params[0], params[1])
        }
        "ellipsoid" => {
            count("3 (semi-axes a, b, c)", 3)?;
            Surface::ellipsoid(params[0], params[1], params[2])
        }
        other => Err(GeomError::UnknownSurface(other.to_string())),
    }
}

impl Surface {
    pub fn plane() -> Self {
        Self {
            name: "plane".into(),
            domain: ChartDomain::rectangle(Axis::bounded(-10.0, 10.0), Axis::bounded(-10.0, 10.0)),
            shape: Shape::Plane,
        }
    }

    pub fn sphere(radius: f64) -> Result<Self> {
        let radius = positive("radius", radius)?;
        Ok(Self {
            name: format!("sphere(r={radius})"),
            domain: polar_domain(),
            shape: Shape::Sphere { radius },
        })
    }

    pub fn cylinder(radius: f64) -> Result<Self> {
        let radius = positive("radius", radius)?;
        Ok(Self {
            name: format!("cylinder(r={radius})"),
            domain: ChartDomain::rectangle(
                Axis::bounded(-10.0 * radius, 10.0 * radius),
                Axis::periodic(0.0, 2.0 * PI * radius),
            ),
            shape: Shape::Cylinder { radius },
        })
    }

    pub fn torus(major: f64, minor: f64) -> Result<Self> {
        let major = positive("major radius", major)?;
        let minor = positive("minor radius", minor)?;
        if major <= minor {
            return Err(GeomError::TorusRadii { major, minor });
        }
        Ok(Self {
            name: format!("torus(R={major}, r={minor})"),
            domain: ChartDomain::rectangle(
                Axis::periodic(0.0, 2.0 * PI),
                Axis::periodic(0.0, 2.0 * PI),
            ),
            shape: Shape::Torus { major, minor },
        })
    }

    pub fn hill(height: f64, width: f64) -> Result<Self> {
        let height = positive("height", height)?;
        let width = positive("width", width)?;
        Ok(Self {
            name: format!("hill(h={height}, sigma={width})"),
            domain: ChartDomain::rectangle(
                Axis::bounded(-6.0 * width, 6.0 * width),
                Axis::bounded(-6.0 * width, 6.0 * width),
            ),
            shape: Shape::Hill { height, width },
        })
    }

    pub fn ellipsoid(a: f64, b: f64, c: f64) -> Result<Self> {
        let a = positive("a", a)?;
        let b = positive("b", b)?;
        let c = positive("c", c)?;
        Ok(Self {
            name: format!("ellipsoid(a={a}, b={b}, c={c})"),
            domain: polar_domain(),
            shape: Shape::Ellipsoid { a, b, c },
        })
    }

    /// A user-supplied surface. Metric derivatives are taken by central
    /// differences with step `1e-6 × domain extent`.
    pub fn custom(
        name: impl Into<String>,
        domain: ChartDomain,
        metric: MetricFn,
        embedding: Option<EmbeddingFn>,
        feature_scale: f64,
    ) -> Result<Self> {
        let feature_scale = positive("feature scale", feature_scale)?;
        Ok(Self {
            name: name.into(),
            domain,
            shape: Shape::Custom {
                metric,
                embedding,
                feature_scale,
            },
        })
    }

    /// Same surface with a different pole margin (polar charts only).
    pub fn with_pole_margin(mut self, margin: f64) -> Self {
        self.domain.pole_margin = margin.max(0.0);
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn domain(&self) -> &ChartDomain {
        &self.domain
    }

    pub fn kind(&self) -> SurfaceKind {
        match self.shape {
            Shape::Plane => SurfaceKind::Plane,
            Shape::Sphere { radius } => SurfaceKind::Sphere { radius },
            Shape::Cylinder { radius } => SurfaceKind::Cylinder { radius },
            Shape::Torus { major, minor } => SurfaceKind::Torus { major, minor },
            Shape::Hill { height, width } => SurfaceKind::Hill { height, width },
            Shape::Ellipsoid { a, b, c } => SurfaceKind::Ellipsoid { a, b, c },
            Shape::Custom { .. } => SurfaceKind::Custom,
        }
    }

    /// Length scale of the surface's features (radius, hill width, ...).
    pub fn feature_scale(&self) -> f64 {
        match self.shape {
            Shape::Plane => 1.0,
            Shape::Sphere { radius } | Shape::Cylinder { radius } => radius,
            Shape::Torus { minor, .. } => minor,
            Shape::Hill { width, .. } => width,
            Shape::Ellipsoid { a, b, c } => a.min(b).min(c),
            Shape::Custom { feature_scale, .. } => feature_scale,
        }
    }

    /// Default bound on the chart length of one path segment.
    pub fn max_step(&self) -> f64 {
        1e-2 * self.domain.extent()
    }

    pub fn has_embedding(&self) -> bool {
        !matches!(
            self.shape,
            Shape::Custom {
                embedding: None,
                ..
            }
        )
    }

    fn fd_step(&self) -> f64 {
        1e-6 * self.domain.extent()
    }

    /// Analytic embedding jet for builtin surfaces.
    pub fn embedding_jet(&self, p: ChartPoint) -> Option<EmbeddingJet> {
        let (u, v) = (p.u, p.v);
        let jet = match self.shape {
            Shape::Plane => EmbeddingJet {
                r: [u, v, 0.0],
                ru: [1.0, 0.0, 0.0],
                rv: [0.0, 1.0, 0.0],
                ruu: [0.0; 3],
                ruv: [0.0; 3],
                rvv: [0.0; 3],
            },
            Shape::Sphere { radius } => ellipsoid_jet(radius, radius, radius, u, v),
            Shape::Ellipsoid { a, b, c } => ellipsoid_jet(a, b, c, u, v),
            Shape::Cylinder { radius } => {
                let (s, c) = (sin(v / radius), cos(v / radius));
                EmbeddingJet {
                    r: [radius * c, radius * s, u],
                    ru: [0.0, 0.0, 1.0],
                    rv: [-s, c, 0.0],
                    ruu: [0.0; 3],
                    ruv: [0.0; 3],
                    rvv: [-c / radius, -s / radius, 0.0],
                }
            }
            Shape::Torus { major, minor } => {
                let (su, cu, sv, cv) = (sin(u), cos(u), sin(v), cos(v));
                let ring = major + minor * cu;
                EmbeddingJet {
                    r: [ring * cv, ring * sv, minor * su],
                    ru: [-minor * su * cv, -minor * su * sv, minor * cu],
                    rv: [-ring * sv, ring * cv, 0.0],
                    ruu: [-minor * cu * cv, -minor * cu * sv, -minor * su],
                    ruv: [minor * su * sv, -minor * su * cv, 0.0],
                    rvv: [-ring * cv, -ring * sv, 0.0],
                }
            }
            Shape::Hill { height, width } => {
                let w2 = width * width;
                let z = height * exp(-(u * u + v * v) / w2);
                let zu = -2.0 * u / w2 * z;
                let zv = -2.0 * v / w2 * z;
                let zuu = (4.0 * u * u / (w2 * w2) - 2.0 / w2) * z;
                let zuv = 4.0 * u * v / (w2 * w2) * z;
                let zvv = (4.0 * v * v / (w2 * w2) - 2.0 / w2) * z;
                EmbeddingJet {
                    r: [u, v, z],
                    ru: [1.0, 0.0, zu],
                    rv: [0.0, 1.0, zv],
                    ruu: [0.0, 0.0, zuu],
                    ruv: [0.0, 0.0, zuv],
                    rvv: [0.0, 0.0, zvv],
                }
            }
            Shape::Custom { .. } => return None,
        };
        Some(jet)
    }

    /// Raw metric evaluation without domain checks.
    pub(crate) fn metric_unchecked(&self, p: ChartPoint) -> Metric {
        match &self.shape {
            Shape::Plane => Metric {
                e: 1.0,
                f: 0.0,
                g: 1.0,
            },
            Shape::Sphere { radius } => {
                let r2 = radius * radius;
                let s = sin(p.u);
                Metric {
                    e: r2,
                    f: 0.0,
                    g: r2 * s * s,
                }
            }
            Shape::Cylinder { .. } => Metric {
                e: 1.0,
                f: 0.0,
                g: 1.0,
            },
            Shape::Torus { major, minor } => {
                let ring = major + minor * cos(p.u);
                Metric {
                    e: minor * minor,
                    f: 0.0,
                    g: ring * ring,
                }
            }
            Shape::Custom { metric, .. } => metric(p),
            Shape::Hill { .. } | Shape::Ellipsoid { .. } => {
                self.embedding_jet(p).map(|j| j.metric()).unwrap_or(Metric {
                    e: 1.0,
                    f: 0.0,
                    g: 1.0,
                })
            }
        }
    }

    pub(crate) fn metric_derivatives_unchecked(&self, p: ChartPoint) -> MetricDerivatives {
        if let Shape::Custom { metric, .. } = &self.shape {
            let h = self.fd_step();
            let diff = |a: Metric, b: Metric| Metric {
                e: (a.e - b.e) / (2.0 * h),
                f: (a.f - b.f) / (2.0 * h),
                g: (a.g - b.g) / (2.0 * h),
            };
            return MetricDerivatives {
                du: diff(metric(p.offset(h, 0.0)), metric(p.offset(-h, 0.0))),
                dv: diff(metric(p.offset(0.0, h)), metric(p.offset(0.0, -h))),
            };
        }
        match self.shape {
            Shape::Sphere { radius } => {
                let r2 = radius * radius;
                let zero = Metric {
                    e: 0.0,
                    f: 0.0,
                    g: 0.0,
                };
                MetricDerivatives {
                    du: Metric {
                        e: 0.0,
                        f: 0.0,
                        g: 2.0 * r2 * sin(p.u) * cos(p.u),
                    },
                    dv: zero,
                }
            }
            _ => self
                .embedding_jet(p)
                .map(|j| j.metric_derivatives())
                .unwrap_or(MetricDerivatives {
                    du: Metric {
                        e: 0.0,
                        f: 0.0,
                        g: 0.0,
                    },
                    dv: Metric {
                        e: 0.0,
                        f: 0.0,
                        g: 0.0,
                    },
                }),
        }
    }

    fn check_closed(&self, p: ChartPoint) -> Result<()> {
        if self.domain.contains(p) {
            Ok(())
        } else {
            Err(GeomError::OutsideDomain { u: p.u, v: p.v })
        }
    }

    pub(crate) fn check_interior(&self, p: ChartPoint) -> Result<()> {
        if self.domain.contains_interior(p) {
            Ok(())
        } else {
            Err(GeomError::OutsideDomain { u: p.u, v: p.v })
        }
    }

    /// First fundamental form `(E, F, G)` at `p`.
    pub fn metric_at(&self, p: ChartPoint) -> Result<Metric> {
        self.check_closed(p)?;
        Ok(self.metric_unchecked(p))
    }

    pub fn metric_derivatives_at(&self, p: ChartPoint) -> Result<MetricDerivatives> {
        self.check_interior(p)?;
        Ok(self.metric_derivatives_unchecked(p))
    }

    /// Connection coefficients from the metric and its first derivatives.
    pub fn christoffel_at(&self, p: ChartPoint) -> Result<ChristoffelSymbols> {
        self.check_interior(p)?;
        let g = self.metric_unchecked(p);
        if !g.is_positive_definite() {
            return Err(GeomError::DegenerateMetric { u: p.u, v: p.v });
        }
        Ok(christoffel(&g, &self.metric_derivatives_unchecked(p)))
    }

    /// Christoffel symbols without validation, for inner integration loops.
    pub(crate) fn christoffel_unchecked(&self, p: ChartPoint) -> ChristoffelSymbols {
        christoffel(
            &self.metric_unchecked(p),
            &self.metric_derivatives_unchecked(p),
        )
    }

    /// Metric-orthonormal frame `(e1, e2)` at `p`: `e1` along `∂u`, `e2` its
    /// positive quarter turn. Returned as chart components.
    pub fn frame_at(&self, p: ChartPoint) -> Result<[[f64; 2]; 2]> {
        self.check_interior(p)?;
        let g = self.metric_unchecked(p);
        if !g.is_positive_definite() {
            return Err(GeomError::DegenerateMetric { u: p.u, v: p.v });
        }
        Ok(frame(&g))
    }

    /// Connection one-form `ω = ⟨∇e1, e2⟩` of the orthonormal frame, as
    /// components `(ω_u, ω_v)`. A parallel unit field at frame angle `φ`
    /// obeys `dφ = -ω`.
    pub fn connection_form_at(&self, p: ChartPoint) -> Result<[f64; 2]> {
        self.check_interior(p)?;
        Ok(self.connection_form_unchecked(p))
    }

    pub(crate) fn connection_form_unchecked(&self, p: ChartPoint) -> [f64; 2] {
        let g = self.metric_unchecked(p);
        let dg = self.metric_derivatives_unchecked(p);
        let gamma = christoffel(&g, &dg);
        let [e1, e2] = frame(&g);
        let inv_sqrt_e = 1.0 / sqrt(g.e);
        let mut omega = [0.0; 2];
        for (axis, w) in omega.iter_mut().enumerate() {
            let de_axis = dg.along(axis).e;
            // ∇_{∂axis} e1 = ∂axis(e1) + Γ(∂axis, e1)
            let mut x = [0.0; 2];
            x[axis] = 1.0;
            let transport = gamma.contract(x, e1);
            let d_e1 = [-0.5 * inv_sqrt_e * de_axis / g.e, 0.0];
            let cov = [d_e1[0] + transport[0], d_e1[1] + transport[1]];
            *w = g.inner(cov, e2);
        }
        omega
    }

    /// `sqrt(EG - F²)`, the area density in chart coordinates.
    pub fn area_element(&self, p: ChartPoint) -> f64 {
        sqrt(self.metric_unchecked(p).det().max(0.0))
    }

    /// Metric length of the chart-straight segment from `a` to `b`.
    pub fn segment_length(&self, a: ChartPoint, b: ChartPoint) -> f64 {
        let d = [b.u - a.u, b.v - a.v];
        GAUSS5
            .iter()
            .map(|&(t, w)| w * self.metric_unchecked(a.lerp(b, t)).norm(d))
            .sum()
    }

    /// Segment length and its gradients with respect to both endpoints.
    pub(crate) fn segment_length_gradient(
        &self,
        a: ChartPoint,
        b: ChartPoint,
    ) -> (f64, [f64; 2], [f64; 2]) {
        let d = [b.u - a.u, b.v - a.v];
        let (mut len, mut ga, mut gb) = (0.0, [0.0; 2], [0.0; 2]);
        for &(t, w) in GAUSS5.iter() {
            let x = a.lerp(b, t);
            let g = self.metric_unchecked(x);
            let dg = self.metric_derivatives_unchecked(x);
            let q = g.norm(d);
            if q == 0.0 {
                continue;
            }
            len += w * q;
            let gd = [g.e * d[0] + g.f * d[1], g.f * d[0] + g.g * d[1]];
            for k in 0..2 {
                let dgk = dg.along(k);
                let quad = dgk.inner(d, d);
                // ∂q/∂x_k along the segment point, split between the endpoints by (1-t, t).
                let position = 0.5 * quad / q;
                let direction = gd[k] / q;
                ga[k] += w * ((1.0 - t) * position - direction);
                gb[k] += w * (t * position + direction);
            }
        }
        (len, ga, gb)
    }

    /// Metric length of a sampled path (sum of chart-straight segments).
    pub fn path_length(&self, path: &Path) -> f64 {
        path.samples()
            .windows(2)
            .map(|w| self.segment_length(w[0], w[1]))
            .sum()
    }

    pub fn embed(&self, p: ChartPoint) -> Option<Vec3> {
        match &self.shape {
            Shape::Custom { embedding, .. } => embedding.as_ref().map(|e| e(p)),
            _ => self.embedding_jet(p).map(|j| j.r),
        }
    }

    /// Embedding partials `(r_u, r_v)`; central differences for custom surfaces.
    pub fn embedding_jacobian(&self, p: ChartPoint) -> Option<(Vec3, Vec3)> {
        match &self.shape {
            Shape::Custom { embedding, .. } => {
                let e = embedding.as_ref()?;
                let h = 10.0 * self.fd_step();
                let ru = numeric::scale(sub(e(p.offset(h, 0.0)), e(p.offset(-h, 0.0))), 0.5 / h);
                let rv = numeric::scale(sub(e(p.offset(0.0, h)), e(p.offset(0.0, -h))), 0.5 / h);
                Some((ru, rv))
            }
            _ => self.embedding_jet(p).map(|j| (j.ru, j.rv)),
        }
    }

    /// Unit surface normal `r_u × r_v / |r_u × r_v|`.
    pub fn unit_normal(&self, p: ChartPoint) -> Option<Vec3> {
        let (ru, rv) = self.embedding_jacobian(p)?;
        let n = cross(ru, rv);
        let len = norm(n);
        (len > 0.0).then(|| numeric::scale(n, 1.0 / len))
    }

    /// Chart components of the tangential part of an ambient vector.
    pub fn tangent_from_ambient(&self, p: ChartPoint, w: Vec3) -> Option<TangentVector> {
        let (ru, rv) = self.embedding_jacobian(p)?;
        let m = [[dot(ru, ru), dot(ru, rv)], [dot(ru, rv), dot(rv, rv)]];
        let c = numeric::solve2(m, [dot(ru, w), dot(rv, w)])?;
        Some(TangentVector::new(p, c[0], c[1]))
    }

    /// Ambient image of a tangent vector.
    pub fn ambient_from_tangent(&self, t: &TangentVector) -> Option<Vec3> {
        let (ru, rv) = self.embedding_jacobian(t.base)?;
        Some(numeric::add(
            numeric::scale(ru, t.du),
            numeric::scale(rv, t.dv),
        ))
    }

    /// Checks that every sample lies in the chart interior and every segment
    /// respects `max_step` in chart length.
    pub fn validate_path(&self, path: &Path, max_step: f64) -> Result<()> {
        for &p in path.samples() {
            self.check_interior(p)?;
        }
        for (index, w) in path.samples().windows(2).enumerate() {
            let length = w[0].chart_distance(w[1]);
            if length > max_step * (1.0 + 1e-12) {
                return Err(GeomError::StepTooLong {
                    index,
                    length,
                    max_step,
                });
            }
        }
        Ok(())
    }

    /// Extra holonomy carried by a loop that winds `winding` times around the
    /// periodic longitude of a polar chart.
    ///
    /// The orthonormal chart frame turns once around each pole, so the
    /// frame-relative rotation of such a loop misses `2π` per turn. Loops are
    /// measured against the cap containing the `u = min` pole, so a circle
    /// run in increasing `v` bounds that cap positively.
    pub fn pole_winding_correction(&self, winding: [i32; 2]) -> f64 {
        if self.domain.polar {
            2.0 * PI * winding[1] as f64
        } else {
            0.0
        }
    }

    /// Area of the region bounded by a simple chart polygon.
    ///
    /// Uses Green's theorem: `∬ √det du dv = ∮ Q dv` with
    /// `Q(u, v) = ∫_{u0}^{u} √det(s, v) ds`, both integrals adaptive.
    pub fn area_of_region(&self, polygon: &[ChartPoint]) -> Result<f64> {
        let ring = polygon::open_ring(polygon);
        if ring.len() < 3 {
            return Err(GeomError::TooFewVertices(ring.len()));
        }
        if ring.iter().any(|p| !self.domain.contains(*p)) {
            return Err(GeomError::RegionOutsideDomain);
        }
        if !polygon::polyline_is_simple(ring, true) {
            return Err(GeomError::SelfIntersecting);
        }
        Ok(self.signed_area_unchecked(ring).abs())
    }

    /// Signed area (positive for counterclockwise rings) with no validation.
    pub(crate) fn signed_area_unchecked(&self, ring: &[ChartPoint]) -> f64 {
        let u0 = ring.iter().map(|p| p.u).fold(f64::INFINITY, f64::min);
        let center = polygon::centroid(ring);
        let density = self.area_element(center).max(1e-300);
        let rough = polygon::signed_area(ring).abs() * density;
        let edge_tol = (1e-12 * rough / ring.len() as f64).max(1e-300);
        let n = ring.len();
        let mut total = 0.0;
        for i in 0..n {
            let a = ring[i];
            let b = ring[(i + 1) % n];
            let dv = b.v - a.v;
            if dv == 0.0 {
                continue;
            }
            let inner = |x: ChartPoint| {
                numeric::integrate(
                    |s| self.area_element(ChartPoint::new(s, x.v)),
                    u0,
                    x.u,
                    1e-3 * edge_tol / dv.abs(),
                )
            };
            total +=
                dv * numeric::integrate(|t| inner(a.lerp(b, t)), 0.0, 1.0, edge_tol / dv.abs());
        }
        total
    }
}

fn ellipsoid_jet(a: f64, b: f64, c: f64, u: f64, v: f64) -> EmbeddingJet {
    let (su, cu, sv, cv) = (sin(u), cos(u), sin(v), cos(v));
    EmbeddingJet {
        r: [a * su * cv, b * su * sv, c * cu],
        ru: [a * cu * cv, b * cu * sv, -c * su],
        rv: [-a * su * sv, b * su * cv, 0.0],
        ruu: [-a * su * cv, -b * su * sv, -c * cu],
        ruv: [-a * cu * sv, b * cu * cv, 0.0],
        rvv: [-a * su * cv, -b * su * sv, 0.0],
    }
}

fn christoffel(g: &Metric, dg: &MetricDerivatives) -> ChristoffelSymbols {
    let det = g.det();
    let inv = [[g.g / det, -g.f / det], [-g.f / det, g.e / det]];
    // ∂_i g_{lj}
    let d = |i: usize, l: usize, j: usize| dg.along(i).component(l, j);
    let mut gamma = [[[0.0; 2]; 2]; 2];
    for k in 0..2 {
        for i in 0..2 {
            for j in i..2 {
                let mut acc = 0.0;
                for l in 0..2 {
                    acc += inv[k][l] * (d(i, l, j) + d(j, l, i) - d(l, i, j));
                }
                gamma[k][i][j] = 0.5 * acc;
                gamma[k][j][i] = 0.5 * acc;
            }
        }
    }
    ChristoffelSymbols { gamma }
}

fn frame(g: &Metric) -> [[f64; 2]; 2] {
    let se = sqrt(g.e);
    let e1 = [1.0 / se, 0.0];
    let s = sqrt(g.e * g.det());
    let e2 = [-g.f / s, g.e / s];
    [e1, e2]
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;
    use alloc::vec::Vec;
    use core::f64::consts::FRAC_PI_2;

    /// Metric from central differences of the embedding: the oracle for
    /// every builtin's analytic metric.
    fn fd_metric(s: &Surface, p: ChartPoint) -> Metric {
        let h = 1e-6;
        let e = |q: ChartPoint| s.embed(q).unwrap();
        let ru = numeric::scale(sub(e(p.offset(h, 0.0)), e(p.offset(-h, 0.0))), 0.5 / h);
        let rv = numeric::scale(sub(e(p.offset(0.0, h)), e(p.offset(0.0, -h))), 0.5 / h);
        Metric {
            e: dot(ru, ru),
            f: dot(ru, rv),
            g: dot(rv, rv),
        }
    }

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol * (1.0 + b.abs())
    }

    #[test]
    fn sphere_metric_matches_embedding() {
        let s = builtin_surface("sphere", &[1.0]).unwrap();
        for &(u, v) in &[(0.3, 0.1), (1.2, 2.0), (2.9, 5.5)] {
            let p = ChartPoint::new(u, v);
            let m = s.metric_at(p).unwrap();
            let o = fd_metric(&s, p);
            assert!(close(m.e, 1.0, 1e-15) && m.f == 0.0 && close(m.g, sin(u) * sin(u), 1e-15));
            assert!(close(m.e, o.e, 1e-8) && (m.f - o.f).abs() < 1e-8 && close(m.g, o.g, 1e-8));
        }
        let eq = s.metric_at(ChartPoint::new(FRAC_PI_2, 0.0)).unwrap();
        assert_eq!((eq.e, eq.f, eq.g), (1.0, 0.0, 1.0));
        let m = s.metric_at(ChartPoint::new(PI / 6.0, 0.0)).unwrap();
        assert!((m.g - 0.25).abs() < 1e-15);
    }

    #[test]
    fn torus_metric_matches_embedding() {
        let s = builtin_surface("torus", &[2.0, 1.0]).unwrap();
        for &(u, v) in &[(0.0, 0.0), (1.0, 2.0), (4.0, 0.5)] {
            let p = ChartPoint::new(u, v);
            let m = s.metric_at(p).unwrap();
            assert!(close(m.e, 1.0, 1e-15));
            assert!(close(m.g, (2.0 + cos(u)) * (2.0 + cos(u)), 1e-14));
            let o = fd_metric(&s, p);
            assert!(close(m.g, o.g, 1e-8) && close(m.e, o.e, 1e-8) && o.f.abs() < 1e-8);
        }
    }

    #[test]
    fn plane_is_euclidean() {
        let s = builtin_surface("plane", &[]).unwrap();
        let m = s.metric_at(ChartPoint::new(3.0, -2.0)).unwrap();
        assert_eq!((m.e, m.f, m.g), (1.0, 0.0, 1.0));
        let c = s.christoffel_at(ChartPoint::new(3.0, -2.0)).unwrap();
        assert_eq!(c.gamma, [[[0.0; 2]; 2]; 2]);
    }

    #[test]
    fn builtin_errors() {
        assert!(matches!(
            builtin_surface("klein", &[]),
            Err(GeomError::UnknownSurface(_))
        ));
        assert!(matches!(
            builtin_surface("sphere", &[-1.0]),
            Err(GeomError::NonPositiveParameter { .. })
        ));
        assert!(matches!(
            builtin_surface("torus", &[1.0, 1.0]),
            Err(GeomError::TorusRadii { .. })
        ));
        assert!(matches!(
            builtin_surface("hill", &[1.0]),
            Err(GeomError::ParameterCount { .. })
        ));
    }

    #[test]
    fn sphere_christoffel() {
        let s = Surface::sphere(1.0).unwrap();
        let p = ChartPoint::new(PI / 4.0, 0.0);
        let c = s.christoffel_at(p).unwrap();
        // Γ^u_vv = -sin u cos u, Γ^v_uv = cot u; oracle: symbolic derivative of G = sin²u.
        assert!((c.gamma[0][1][1] + 0.5).abs() < 1e-15);
        assert!((c.gamma[1][0][1] - 1.0).abs() < 1e-15);
        assert_eq!(c.gamma[1][0][1], c.gamma[1][1][0]);
        assert!(matches!(
            s.christoffel_at(ChartPoint::new(1e-4, 0.0)),
            Err(GeomError::OutsideDomain { .. })
        ));
    }

    #[test]
    fn cylinder_is_flat_in_arclength_chart() {
        let s = Surface::cylinder(1.0).unwrap();
        let c = s.christoffel_at(ChartPoint::new(0.3, 2.0)).unwrap();
        for k in 0..2 {
            for i in 0..2 {
                for j in 0..2 {
                    assert!(c.gamma[k][i][j].abs() < 1e-15);
                }
            }
        }
        assert_eq!(
            s.connection_form_at(ChartPoint::new(0.3, 2.0)).unwrap(),
            [0.0, 0.0]
        );
    }

    #[test]
    fn sphere_connection_form_is_cos_colatitude() {
        let s = Surface::sphere(2.0).unwrap();
        for &u in &[0.2, 1.0, 2.5] {
            let w = s.connection_form_at(ChartPoint::new(u, 1.0)).unwrap();
            assert!(w[0].abs() < 1e-15);
            assert!((w[1] - cos(u)).abs() < 1e-14);
        }
    }

    #[test]
    fn custom_surface_uses_finite_differences() {
        // Sphere metric supplied as a closure: FD Christoffels must match the analytic ones.
        let dom = polar_domain();
        let metric: MetricFn = Arc::new(|p: ChartPoint| Metric {
            e: 1.0,
            f: 0.0,
            g: sin(p.u) * sin(p.u),
        });
        let s = Surface::custom("sphere-fd", dom, metric, None, 1.0).unwrap();
        let c = s.christoffel_at(ChartPoint::new(PI / 4.0, 0.3)).unwrap();
        assert!((c.gamma[0][1][1] + 0.5).abs() < 1e-8);
        assert!((c.gamma[1][0][1] - 1.0).abs() < 1e-8);
        assert!(!s.has_embedding());
    }

    #[test]
    fn areas() {
        let plane = Surface::plane();
        let sq = vec![
            ChartPoint::new(0.0, 0.0),
            ChartPoint::new(1.0, 0.0),
            ChartPoint::new(1.0, 1.0),
            ChartPoint::new(0.0, 1.0),
        ];
        assert!((plane.area_of_region(&sq).unwrap() - 1.0).abs() < 1e-14);

        let s = Surface::sphere(1.0).unwrap();
        let oct = vec![
            ChartPoint::new(0.0, 0.0),
            ChartPoint::new(FRAC_PI_2, 0.0),
            ChartPoint::new(FRAC_PI_2, FRAC_PI_2),
            ChartPoint::new(0.0, FRAC_PI_2),
        ];
        assert!((s.area_of_region(&oct).unwrap() - FRAC_PI_2).abs() < 1e-8 * FRAC_PI_2);

        // Cap u ∈ [0, π/3] over the full longitude; oracle: midpoint Riemann sum.
        let cap = vec![
            ChartPoint::new(0.0, 0.0),
            ChartPoint::new(PI / 3.0, 0.0),
            ChartPoint::new(PI / 3.0, 2.0 * PI),
            ChartPoint::new(0.0, 2.0 * PI),
        ];
        let n = 20_000;
        let h = PI / 3.0 / n as f64;
        let riemann: f64 = (0..n).map(|i| sin((i as f64 + 0.5) * h) * h).sum::<f64>() * 2.0 * PI;
        let a = s.area_of_region(&cap).unwrap();
        assert!((a - riemann).abs() < 1e-7);
        assert!((a - PI).abs() < 1e-8 * PI);
    }

    #[test]
    fn area_rejects_bad_regions() {
        let plane = Surface::plane();
        let bow: Vec<ChartPoint> = [(0.0, 0.0), (1.0, 1.0), (1.0, 0.0), (0.0, 1.0)]
            .iter()
            .map(|&(u, v)| ChartPoint::new(u, v))
            .collect();
        assert_eq!(plane.area_of_region(&bow), Err(GeomError::SelfIntersecting));
        let outside: Vec<ChartPoint> = [(0.0, 0.0), (20.0, 0.0), (0.0, 1.0)]
            .iter()
            .map(|&(u, v)| ChartPoint::new(u, v))
            .collect();
        assert_eq!(
            plane.area_of_region(&outside),
            Err(GeomError::RegionOutsideDomain)
        );
    }

    #[test]
    fn segment_gradient_matches_difference_quotient() {
        let s = Surface::hill(1.0, 1.0).unwrap();
        let a = ChartPoint::new(-0.3, 0.2);
        let b = ChartPoint::new(0.1, 0.5);
        let (_, ga, gb) = s.segment_length_gradient(a, b);
        let h = 1e-6;
        let fd_b = (s.segment_length(a, b.offset(h, 0.0)) - s.segment_length(a, b.offset(-h, 0.0)))
            / (2.0 * h);
        let fd_a = (s.segment_length(a.offset(0.0, h), b) - s.segment_length(a.offset(0.0, -h), b))
            / (2.0 * h);
        assert!((gb[0] - fd_b).abs() < 1e-8);
        assert!((ga[1] - fd_a).abs() < 1e-8);
    }

    #[test]
    fn ambient_round_trip() {
        let s = Surface::ellipsoid(1.0, 1.0, 0.5).unwrap();
        let p = ChartPoint::new(1.0, 0.4);
        let t = TangentVector::new(p, 0.3, -0.7);
        let w = s.ambient_from_tangent(&t).unwrap();
        let back = s.tangent_from_ambient(p, w).unwrap();
        assert!((back.du - 0.3).abs() < 1e-13 && (back.dv + 0.7).abs() < 1e-13);
    }
}
