//! Planar polygon primitives in chart coordinates.
//!
//! Polygons are vertex slices without a repeated closing vertex; callers
//! holding closed sample lists strip the duplicate first (see [`open_ring`]).

use alloc::vec::Vec;

use libm::hypot;

use crate::surface::ChartPoint;

/// Drops the closing vertex of a closed sample list, if present.
pub fn open_ring(samples: &[ChartPoint]) -> &[ChartPoint] {
    match samples {
        [first, .., last] if samples.len() > 1 && first == last => &samples[..samples.len() - 1],
        _ => samples,
    }
}

/// Shoelace signed area; positive for counterclockwise rings.
pub fn signed_area(ring: &[ChartPoint]) -> f64 {
    let n = ring.len();
    if n < 3 {
        return 0.0;
    }
    // Centered at the first vertex to limit cancellation.
    let o = ring[0];
    let mut twice = 0.0;
    for i in 1..n - 1 {
        let a = ring[i];
        let b = ring[i + 1];
        twice += (a.u - o.u) * (b.v - o.v) - (b.u - o.u) * (a.v - o.v);
    }
    0.5 * twice
}

/// Area centroid of a ring; falls back to the vertex mean for degenerate rings.
pub fn centroid(ring: &[ChartPoint]) -> ChartPoint {
    let n = ring.len();
    let o = ring[0];
    let (mut cu, mut cv, mut twice) = (0.0, 0.0, 0.0);
    for i in 0..n {
        let a = ring[i];
        let b = ring[(i + 1) % n];
        let (au, av, bu, bv) = (a.u - o.u, a.v - o.v, b.u - o.u, b.v - o.v);
        let cr = au * bv - bu * av;
        twice += cr;
        cu += (au + bu) * cr;
        cv += (av + bv) * cr;
    }
    if libm::fabs(twice) < 1e-300 {
        let (su, sv) = ring
            .iter()
            .fold((0.0, 0.0), |(su, sv), p| (su + p.u, sv + p.v));
        return ChartPoint::new(su / n as f64, sv / n as f64);
    }
    ChartPoint::new(o.u + cu / (3.0 * twice), o.v + cv / (3.0 * twice))
}

fn orient(a: ChartPoint, b: ChartPoint, c: ChartPoint) -> f64 {
    (b.u - a.u) * (c.v - a.v) - (b.v - a.v) * (c.u - a.u)
}

fn within_box(a: ChartPoint, b: ChartPoint, p: ChartPoint) -> bool {
    p.u >= a.u.min(b.u) && p.u <= a.u.max(b.u) && p.v >= a.v.min(b.v) && p.v <= a.v.max(b.v)
}

/// Closed-segment intersection test (touching counts).
pub fn segments_intersect(p1: ChartPoint, p2: ChartPoint, q1: ChartPoint, q2: ChartPoint) -> bool {
    let d1 = orient(q1, q2, p1);
    let d2 = orient(q1, q2, p2);
    let d3 = orient(p1, p2, q1);
    let d4 = orient(p1, p2, q2);
    if ((d1 > 0.0 && d2 < 0.0) || (d1 < 0.0 && d2 > 0.0))
        && ((d3 > 0.0 && d4 < 0.0) || (d3 < 0.0 && d4 > 0.0))
    {
        return true;
    }
    (d1 == 0.0 && within_box(q1, q2, p1))
        || (d2 == 0.0 && within_box(q1, q2, p2))
        || (d3 == 0.0 && within_box(p1, p2, q1))
        || (d4 == 0.0 && within_box(p1, p2, q2))
}

/// True when segments of the open polyline `pts` (closed back to the start
/// when `closed`) meet only at shared endpoints of neighbours.
///
/// Sort-and-sweep along `u`: segments are ordered by their lower `u` bound
/// and each is only tested against the ones whose span overlaps it.
pub fn polyline_is_simple(pts: &[ChartPoint], closed: bool) -> bool {
    let n = pts.len();
    if n < 2 {
        return true;
    }
    let seg_count = if closed { n } else { n - 1 };
    let seg = |i: usize| (pts[i], pts[(i + 1) % n]);
    let mut order: Vec<(f64, f64, usize)> = (0..seg_count)
        .map(|i| {
            let (a, b) = seg(i);
            (a.u.min(b.u), a.u.max(b.u), i)
        })
        .collect();
    order.sort_by(|x, y| x.0.total_cmp(&y.0));
    let adjacent = |i: usize, j: usize| {
        let d = i.abs_diff(j);
        d == 1 || (closed && d == seg_count - 1)
    };
    for (k, &(_, hi, i)) in order.iter().enumerate() {
        let (a, b) = seg(i);
        for &(lo_j, _, j) in &order[k + 1..] {
            if lo_j > hi {
                break;
            }
            if adjacent(i, j) {
                // Neighbours share one endpoint; they overlap only if collinear and folding back.
                let (c, d) = seg(j);
                let shared_is_b = b == c;
                let (p, q, r) = if shared_is_b { (a, b, d) } else { (c, d, b) };
                if orient(p, q, r) == 0.0
                    && ((r.u - q.u) * (p.u - q.u) + (r.v - q.v) * (p.v - q.v)) > 0.0
                {
                    return false;
                }
                continue;
            }
            let (c, d) = seg(j);
            if segments_intersect(a, b, c, d) {
                return false;
            }
        }
    }
    true
}

/// Even–odd point-in-polygon test.
pub fn contains_point(ring: &[ChartPoint], p: ChartPoint) -> bool {
    let n = ring.len();
    let mut inside = false;
    let mut j = n - 1;
    for i in 0..n {
        let (a, b) = (ring[i], ring[j]);
        if (a.v > p.v) != (b.v > p.v) {
            let u_cross = a.u + (p.v - a.v) / (b.v - a.v) * (b.u - a.u);
            if p.u < u_cross {
                inside = !inside;
            }
        }
        j = i;
    }
    inside
}

/// Distance-free test that `p` lies on segment `[a, b]` up to `tol` in chart units.
pub fn on_segment(a: ChartPoint, b: ChartPoint, p: ChartPoint, tol: f64) -> bool {
    let (du, dv) = (b.u - a.u, b.v - a.v);
    let len2 = du * du + dv * dv;
    if len2 == 0.0 {
        return hypot(p.u - a.u, p.v - a.v) <= tol;
    }
    let t = ((p.u - a.u) * du + (p.v - a.v) * dv) / len2;
    if !(-1e-12..=1.0 + 1e-12).contains(&t) {
        return false;
    }
    let (cu, cv) = (a.u + t * du, a.v + t * dv);
    hypot(p.u - cu, p.v - cv) <= tol
}

/// Sutherland–Hodgman clip of a ring against an axis-aligned rectangle.
pub fn clip_to_rect(ring: &[ChartPoint], u0: f64, u1: f64, v0: f64, v1: f64) -> Vec<ChartPoint> {
    let mut out: Vec<ChartPoint> = ring.to_vec();
    // (axis, bound, keep_greater)
    let planes = [(0, u0, true), (0, u1, false), (1, v0, true), (1, v1, false)];
    for (axis, bound, keep_greater) in planes {
        if out.is_empty() {
            break;
        }
        let coord = |p: &ChartPoint| if axis == 0 { p.u } else { p.v };
        let inside = |p: &ChartPoint| {
            if keep_greater {
                coord(p) >= bound
            } else {
                coord(p) <= bound
            }
        };
        let input = core::mem::take(&mut out);
        let n = input.len();
        for i in 0..n {
            let cur = input[i];
            let prev = input[(i + n - 1) % n];
            let (ci, pi) = (inside(&cur), inside(&prev));
            if ci != pi {
                let t = (bound - coord(&prev)) / (coord(&cur) - coord(&prev));
                let mut x =
                    ChartPoint::new(prev.u + t * (cur.u - prev.u), prev.v + t * (cur.v - prev.v));
                if axis == 0 {
                    x.u = bound;
                } else {
                    x.v = bound;
                }
                out.push(x);
            }
            if ci {
                out.push(cur);
            }
        }
    }
    out
}
