//! Test-side oracles, written from textbook formulas and kept apart from the
//! library's own code paths.

#![allow(dead_code)]

use chariot_core::{ChartPoint, Metric, Surface};
use std::f64::consts::PI;

pub type V3 = [f64; 3];

pub fn p(u: f64, v: f64) -> ChartPoint {
    ChartPoint::new(u, v)
}

pub fn dot(a: V3, b: V3) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

pub fn cross(a: V3, b: V3) -> V3 {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

pub fn norm(a: V3) -> f64 {
    dot(a, a).sqrt()
}

/// Point on a sphere of radius `r` at colatitude `u`, longitude `v`.
pub fn sphere_point(r: f64, c: ChartPoint) -> V3 {
    [
        r * c.u.sin() * c.v.cos(),
        r * c.u.sin() * c.v.sin(),
        r * c.u.cos(),
    ]
}

pub fn chart_of_unit(x: V3) -> ChartPoint {
    p(x[2].clamp(-1.0, 1.0).acos(), x[1].atan2(x[0]))
}

pub fn great_circle_distance(r: f64, a: ChartPoint, b: ChartPoint) -> f64 {
    let (x, y) = (sphere_point(1.0, a), sphere_point(1.0, b));
    r * norm(cross(x, y)).atan2(dot(x, y))
}

/// The octant triangle (three mutually orthogonal unit vectors), turned so
/// that no vertex or interior point comes near a pole of the chart. The
/// vertices are counterclockwise seen from outside.
pub fn octant_vertices() -> [V3; 3] {
    let a = 1.0 / 3f64.sqrt();
    [
        [a, (2.0f64 / 3.0).sqrt(), 0.0],
        [a, -1.0 / 6f64.sqrt(), 1.0 / 2f64.sqrt()],
        [a, -1.0 / 6f64.sqrt(), -1.0 / 2f64.sqrt()],
    ]
}

pub fn octant_chart() -> [ChartPoint; 3] {
    let v = octant_vertices();
    [
        chart_of_unit(v[0]),
        chart_of_unit(v[1]),
        chart_of_unit(v[2]),
    ]
}

/// Metric of the embedding by central differences of `embed`.
pub fn fd_metric(s: &Surface, c: ChartPoint, h: f64) -> Metric {
    let d = |du: f64, dv: f64| {
        let a = s.embed(c.offset(du, dv)).unwrap();
        let b = s.embed(c.offset(-du, -dv)).unwrap();
        [
            (a[0] - b[0]) / (2.0 * h),
            (a[1] - b[1]) / (2.0 * h),
            (a[2] - b[2]) / (2.0 * h),
        ]
    };
    let (ru, rv) = (d(h, 0.0), d(0.0, h));
    Metric {
        e: dot(ru, ru),
        f: dot(ru, rv),
        g: dot(rv, rv),
    }
}

/// Christoffel symbols `Γ^k_ij` from central differences of `metric_at`,
/// indexed `[k][i][j]`.
pub fn fd_christoffel(s: &Surface, c: ChartPoint, h: f64) -> [[[f64; 2]; 2]; 2] {
    let m = |q: ChartPoint| {
        let g = s.metric_at(q).unwrap();
        [[g.e, g.f], [g.f, g.g]]
    };
    let g = m(c);
    let dm = |i: usize| {
        let (a, b) = if i == 0 {
            (m(c.offset(h, 0.0)), m(c.offset(-h, 0.0)))
        } else {
            (m(c.offset(0.0, h)), m(c.offset(0.0, -h)))
        };
        let mut out = [[0.0; 2]; 2];
        for r in 0..2 {
            for q in 0..2 {
                out[r][q] = (a[r][q] - b[r][q]) / (2.0 * h);
            }
        }
        out
    };
    let d = [dm(0), dm(1)];
    let det = g[0][0] * g[1][1] - g[0][1] * g[1][0];
    let inv = [
        [g[1][1] / det, -g[0][1] / det],
        [-g[1][0] / det, g[0][0] / det],
    ];
    let mut gamma = [[[0.0; 2]; 2]; 2];
    for k in 0..2 {
        for i in 0..2 {
            for j in 0..2 {
                let mut acc = 0.0;
                for l in 0..2 {
                    acc += 0.5 * inv[k][l] * (d[i][j][l] + d[j][i][l] - d[l][i][j]);
                }
                gamma[k][i][j] = acc;
            }
        }
    }
    gamma
}

/// Transport of chart components `w` along the polyline `samples` by RK4 on
/// `dw^k/dt = -Γ^k_ij ẋ^i w^j`, `n` steps per segment, Christoffel symbols by
/// finite differences.
pub fn component_transport(s: &Surface, samples: &[ChartPoint], w: [f64; 2], n: usize) -> [f64; 2] {
    let h = 1e-5;
    let mut w = w;
    for seg in samples.windows(2) {
        let (a, b) = (seg[0], seg[1]);
        let xd = [b.u - a.u, b.v - a.v];
        let f = |t: f64, w: [f64; 2]| {
            let g = fd_christoffel(s, a.lerp(b, t), h);
            let mut out = [0.0; 2];
            for k in 0..2 {
                for i in 0..2 {
                    for j in 0..2 {
                        out[k] -= g[k][i][j] * xd[i] * w[j];
                    }
                }
            }
            out
        };
        let dt = 1.0 / n as f64;
        for step in 0..n {
            let t = step as f64 * dt;
            let k1 = f(t, w);
            let k2 = f(
                t + dt / 2.0,
                [w[0] + dt / 2.0 * k1[0], w[1] + dt / 2.0 * k1[1]],
            );
            let k3 = f(
                t + dt / 2.0,
                [w[0] + dt / 2.0 * k2[0], w[1] + dt / 2.0 * k2[1]],
            );
            let k4 = f(t + dt, [w[0] + dt * k3[0], w[1] + dt * k3[1]]);
            for k in 0..2 {
                w[k] += dt / 6.0 * (k1[k] + 2.0 * k2[k] + 2.0 * k3[k] + k4[k]);
            }
        }
    }
    w
}

/// Signed angle from `a` to `b` in the metric `g`, counterclockwise in the
/// chart orientation.
pub fn metric_angle(g: &Metric, a: [f64; 2], b: [f64; 2]) -> f64 {
    let inner = g.e * a[0] * b[0] + g.f * (a[0] * b[1] + a[1] * b[0]) + g.g * a[1] * b[1];
    let wedge = (g.e * g.g - g.f * g.f).sqrt() * (a[0] * b[1] - a[1] * b[0]);
    wedge.atan2(inner)
}

pub fn wrap(a: f64) -> f64 {
    let r = a.rem_euclid(2.0 * PI);
    if r > PI {
        r - 2.0 * PI
    } else {
        r
    }
}

/// Gaussian curvature from the closed forms of each builtin.
pub fn exact_curvature(s: &Surface, c: ChartPoint) -> f64 {
    use chariot_core::surface::SurfaceKind::*;
    match s.kind() {
        Plane | Cylinder { .. } => 0.0,
        Sphere { radius } => 1.0 / (radius * radius),
        Torus { major, minor } => c.u.cos() / (minor * (major + minor * c.u.cos())),
        Hill { height, width } => {
            let w2 = width * width;
            let z = height * (-(c.u * c.u + c.v * c.v) / w2).exp();
            let zu = -2.0 * c.u / w2 * z;
            let zv = -2.0 * c.v / w2 * z;
            let zuu = (4.0 * c.u * c.u / (w2 * w2) - 2.0 / w2) * z;
            let zvv = (4.0 * c.v * c.v / (w2 * w2) - 2.0 / w2) * z;
            let zuv = 4.0 * c.u * c.v / (w2 * w2) * z;
            (zuu * zvv - zuv * zuv) / (1.0 + zu * zu + zv * zv).powi(2)
        }
        Ellipsoid { a, b, c: cc } => {
            let x = s.embed(c).unwrap();
            let q = x[0] * x[0] / a.powi(4) + x[1] * x[1] / b.powi(4) + x[2] * x[2] / cc.powi(4);
            1.0 / (a * a * b * b * cc * cc * q * q)
        }
        Custom => f64::NAN,
    }
}
