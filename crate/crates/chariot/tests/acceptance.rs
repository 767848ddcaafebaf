//! Acceptance run: one PASS/FAIL line per criterion, each with its own
//! tolerance and time limit. Exits nonzero if any criterion fails.

use std::f64::consts::{FRAC_PI_2, PI};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use chariot_core::curvature::default_scales;
use chariot_core::geodesics::geodesic_polygon;
use chariot_core::paths::{
    arc, chart_rectangle, latitude_circle, line, subdivide_region, waypoints,
};
use chariot_core::projection::measured_east_west_scale;
use chariot_core::transport::{chariot_convergence, wrap_angle};
use chariot_core::{
    builtin_projection, curvature_at, distortion_report, egregium_check, finite_chariot,
    gauss_bonnet_check, holonomy_obstruction, loop_holonomy, parallel_transport, relax_to_geodesic,
    second_variation_probe, shoot_geodesic, ChariotConfig, ChartPoint, Loop, Path, RegionBoundary,
    RelaxOptions, Surface, TangentVector,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Check = Result<String, String>;
type Criterion = (&'static str, u64, fn() -> Check);

fn p(u: f64, v: f64) -> ChartPoint {
    ChartPoint::new(u, v)
}

fn ensure(ok: bool, msg: impl Into<String>) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn ok<T, E: std::fmt::Debug>(r: Result<T, E>) -> Result<T, String> {
    r.map_err(|e| format!("{e:?}"))
}

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn sphere_points(r: &mut ChaCha8Rng, n: usize, margin: f64) -> Vec<ChartPoint> {
    (0..n)
        .map(|_| {
            let z: f64 = r.random_range((PI - margin).cos()..margin.cos());
            p(z.acos(), r.random_range(0.0..2.0 * PI))
        })
        .collect()
}

type V3 = [f64; 3];

fn dot(a: V3, b: V3) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

fn cross(a: V3, b: V3) -> V3 {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

fn octant_vertices() -> [V3; 3] {
    let a = 1.0 / 3f64.sqrt();
    [
        [a, (2.0f64 / 3.0).sqrt(), 0.0],
        [a, -1.0 / 6f64.sqrt(), 1.0 / 2f64.sqrt()],
        [a, -1.0 / 6f64.sqrt(), -1.0 / 2f64.sqrt()],
    ]
}

fn octant_chart() -> [ChartPoint; 3] {
    octant_vertices().map(|x| p(x[2].acos(), x[1].atan2(x[0])))
}

fn octant_loop(s: &Surface) -> Result<Loop, String> {
    ok(Loop::new(ok(geodesic_polygon(s, &octant_chart()))?))
}

fn c1_wheel_difference() -> Check {
    let s = Surface::plane();
    // Clockwise quarter arc: the left wheel runs on the outside.
    let path = ok(arc(p(0.0, 0.0), 2.0, FRAC_PI_2, 0.0, 400))?;
    let r = ok(finite_chariot(&s, &path, ChariotConfig::new(0.1)))?;
    let w = r.wheels.ok_or("no wheel tracks")?;
    let diff = w.d_left.last().unwrap() - w.d_right.last().unwrap();
    let err = (diff - 0.05 * PI).abs();
    ensure(
        err < 1e-6,
        format!("d_l - d_r = {diff:.12}, want 0.05π (err {err:.2e})"),
    )?;
    Ok(format!("d_l - d_r = {diff:.12} (err {err:.1e})"))
}

fn c2_octant() -> Check {
    let s = ok(Surface::sphere(1.0))?;
    let l = octant_loop(&s)?;
    let h = ok(loop_holonomy(&s, &l))?;
    ensure((h.abs() - FRAC_PI_2).abs() < 1e-5, format!("|H| = {h}"))?;
    // Start at the first vertex pointing along the side to the third; the
    // vector comes back along minus the second vertex, a quarter turn
    // about the outward normal at the first vertex.
    let [x1, x2, x3] = octant_vertices();
    let start = s.tangent_from_ambient(l.base(), x3).ok_or("no embedding")?;
    let r = ok(parallel_transport(&s, l.path(), start))?;
    let back = s
        .ambient_from_tangent(&r.final_vector)
        .ok_or("no embedding")?;
    let miss = (0..3).map(|k| (back[k] + x2[k]).abs()).fold(0.0, f64::max);
    ensure(miss < 1e-5, format!("returned {back:?}, want -{x2:?}"))?;
    let sin_turn = dot(cross(x3, back), x1);
    ensure(
        (sin_turn - 1.0).abs() < 1e-5,
        format!("sine of turn about the normal {sin_turn}"),
    )?;
    Ok(format!(
        "|H| = {:.10}, returned vector off -v2 by {miss:.1e}",
        h.abs()
    ))
}

fn c3_sphere_curvature() -> Check {
    let mut r = rng(3);
    let mut worst = 0.0f64;
    for radius in [0.5, 1.0, 2.0] {
        let s = ok(Surface::sphere(radius))?;
        let scales = default_scales(&s);
        for q in sphere_points(&mut r, 5, 0.3) {
            let k = ok(curvature_at(&s, q, &scales))?.extrapolated;
            let rel = (k * radius * radius - 1.0).abs();
            worst = worst.max(rel);
            ensure(rel < 1e-4, format!("r={radius} at {q:?}: K={k}"))?;
        }
    }
    Ok(format!("worst relative error {worst:.1e}"))
}

fn c4_cylinder() -> Check {
    let s = ok(Surface::cylinder(1.0))?;
    let mut r = rng(4);
    let scales = default_scales(&s);
    let mut worst_k = 0.0f64;
    for _ in 0..5 {
        let q = p(r.random_range(-4.0..4.0), r.random_range(0.0..2.0 * PI));
        let k = ok(curvature_at(&s, q, &scales))?.extrapolated;
        worst_k = worst_k.max(k.abs());
        ensure(k.abs() < 1e-6, format!("K = {k} at {q:?}"))?;
    }
    let regions = [
        ok(chart_rectangle(-2.0, 1.0, 0.5, 4.0, 50))?,
        ok(chart_rectangle(3.0, 3.3, 5.0, 7.0, 20))?,
        octant_like(&s)?,
        ok(Loop::new(ok(arc(p(0.5, 3.0), 1.2, 0.0, 2.0 * PI, 300))?))?,
    ];
    let mut worst_h = 0.0f64;
    for l in &regions {
        let region = ok(RegionBoundary::new(l.clone()))?;
        let h = ok(loop_holonomy(&s, region.boundary()))?;
        worst_h = worst_h.max(h.abs());
        ensure(h.abs() < 1e-6, format!("region holonomy {h}"))?;
    }
    Ok(format!(
        "max |K| {worst_k:.1e}, max |H| {worst_h:.1e} over {} regions",
        regions.len()
    ))
}

fn octant_like(s: &Surface) -> Result<Loop, String> {
    ok(Loop::new(ok(geodesic_polygon(
        s,
        &[p(-1.0, 1.0), p(0.5, 2.5), p(1.5, 0.5)],
    ))?))
}

fn c5_gauss_bonnet() -> Check {
    let sphere = ok(Surface::sphere(1.0))?;
    let hill = ok(Surface::hill(1.0, 1.0))?;
    let cases = [
        (
            "octant",
            &sphere,
            ok(RegionBoundary::new(octant_loop(&sphere)?))?,
        ),
        (
            "hill rectangle",
            &hill,
            ok(RegionBoundary::new(ok(chart_rectangle(
                -1.0, 0.5, -0.5, 1.0, 30,
            ))?))?,
        ),
    ];
    let mut notes = Vec::new();
    for (name, s, region) in &cases {
        let coarse = ok(gauss_bonnet_check(s, region, 32))?;
        let fine = ok(gauss_bonnet_check(s, region, 64))?;
        let ratio = fine.residual.abs() / coarse.residual.abs();
        ensure(
            fine.residual.abs() < 1e-3,
            format!("{name}: residual {}", fine.residual),
        )?;
        ensure(
            ratio <= 0.5,
            format!("{name}: residual ratio {ratio} under refinement"),
        )?;
        notes.push(format!(
            "{name} residual {:.1e} (ratio {ratio:.2})",
            fine.residual.abs()
        ));
    }
    Ok(notes.join(", "))
}

fn c6_algebra() -> Check {
    let s = ok(Surface::hill(1.0, 1.0))?;
    let square = ok(chart_rectangle(-0.8, 0.6, -0.5, 0.9, 40))?;
    let h = ok(loop_holonomy(&s, &square))?;

    let other = ok(chart_rectangle(-0.8, 1.5, -0.5, 0.2, 50))?;
    let joint = ok(loop_holonomy(&s, &ok(square.compose(&other))?))?;
    let hom = (joint - h - ok(loop_holonomy(&s, &other))?).abs();
    ensure(hom < 1e-9, format!("homomorphism off by {hom}"))?;

    let mut r = rng(6);
    let mut detour = 0.0f64;
    for _ in 0..20 {
        let index = r.random_range(0..square.samples().len() - 1);
        let angle = r.random_range(0.0..2.0 * PI);
        let len = r.random_range(0.05..1.0);
        let bend = r.random_range(-0.5..0.5);
        let a = square.samples()[index];
        let mid = a.offset(0.5 * len * angle.cos(), 0.5 * len * angle.sin());
        let tip = mid.offset(
            0.5 * len * (angle + bend).cos(),
            0.5 * len * (angle + bend).sin(),
        );
        let spur = ok(waypoints(&[a, mid, tip], 0.02))?;
        let d = ok(loop_holonomy(&s, &ok(square.add_detour(index, &spur))?))?;
        detour = detour.max((d - h).abs());
    }
    ensure(
        detour < 1e-6,
        format!("detour changed holonomy by {detour}"),
    )?;

    let mut rebase = 0.0f64;
    for index in (0..square.samples().len()).step_by(7) {
        rebase = rebase.max((ok(loop_holonomy(&s, &ok(square.rebase(index))?))? - h).abs());
    }
    ensure(
        rebase < 1e-9,
        format!("rebase changed holonomy by {rebase}"),
    )?;

    let region = ok(RegionBoundary::new(square.clone()))?;
    let b = region.samples().to_vec();
    let mut additivity = 0.0f64;
    for _ in 0..10 {
        // Samples 1..40 lie on the bottom side, 81..120 on the top.
        let i = r.random_range(1..40);
        let j = r.random_range(81..120);
        let sag = r.random_range(-0.2..0.2);
        let mid = b[i].lerp(b[j], 0.5).offset(sag, 0.0);
        let chord = ok(waypoints(&[b[i], mid, b[j]], 0.02))?;
        let (r1, r2) = ok(subdivide_region(&region, &chord))?;
        let parts = ok(loop_holonomy(&s, r1.boundary()))? + ok(loop_holonomy(&s, r2.boundary()))?;
        additivity = additivity.max((parts - h).abs());
    }
    ensure(additivity < 1e-6, format!("additivity off by {additivity}"))?;
    Ok(format!(
        "homomorphism {hom:.1e}, detours {detour:.1e}, rebase {rebase:.1e}, additivity {additivity:.1e}"
    ))
}

fn c7_real_valued() -> Check {
    let s = ok(Surface::sphere(1.0))?;
    let eq = ok(latitude_circle(&s, FRAC_PI_2, 0.0, 720))?;
    let h = ok(loop_holonomy(&s, &eq))?;
    ensure((h - 2.0 * PI).abs() < 1e-4, format!("H = {h}"))?;
    ensure(
        wrap_angle(h).abs() < 1e-4,
        format!("H mod 2π = {}", wrap_angle(h)),
    )?;
    Ok(format!("H = {h:.10}, mod 2π = {:.1e}", wrap_angle(h)))
}

fn c8_relaxation() -> Check {
    let hill = ok(Surface::hill(1.0, 1.0))?;
    let start = ok(line(p(-2.0, 0.5), p(2.0, 0.5), 40))?;
    let rep = ok(relax_to_geodesic(&hill, &start, RelaxOptions::default()))?;
    let monotone = rep
        .length_history
        .windows(2)
        .all(|w| w[1] <= w[0] * (1.0 + 1e-12));
    ensure(monotone, "hill relaxation length increased")?;
    ensure(
        rep.final_max_rotation_rate < 1e-6,
        format!("rate {}", rep.final_max_rotation_rate),
    )?;

    let sphere = ok(Surface::sphere(1.0))?;
    let n = 40;
    let bumped: Vec<ChartPoint> = (0..=n)
        .map(|k| {
            let t = k as f64 / n as f64;
            p(FRAC_PI_2 + 0.15 * (PI * t).sin(), FRAC_PI_2 * t)
        })
        .collect();
    let rep2 = ok(relax_to_geodesic(
        &sphere,
        &ok(Path::new(bumped))?,
        RelaxOptions::default(),
    ))?;
    let off = rep2
        .final_path
        .samples()
        .iter()
        .map(|q| (q.u - FRAC_PI_2).abs())
        .fold(0.0, f64::max);
    ensure(
        off < 1e-4,
        format!("relaxed arc strays {off} from the equator"),
    )?;
    Ok(format!(
        "hill rate {:.1e} after {} iterations, equator off by {off:.1e}",
        rep.final_max_rotation_rate, rep.iterations
    ))
}

fn c9_saddle() -> Check {
    let s = ok(Surface::sphere(1.0))?;
    let a = p(FRAC_PI_2, 0.0);
    let east = TangentVector::new(a, 0.0, 1.0);
    let long = ok(shoot_geodesic(&s, a, east, 1.5 * PI))?;
    let (l, r) = ok(second_variation_probe(&s, &long, 0.05))?;
    ensure(
        l < 0.0 || r < 0.0,
        format!("3π/2 arc: no shortening ({l}, {r})"),
    )?;
    let short = ok(shoot_geodesic(&s, a, east, FRAC_PI_2))?;
    for amp in [0.01, 0.05, 0.2] {
        let (sl, sr) = ok(second_variation_probe(&s, &short, amp))?;
        ensure(
            sl > 0.0 && sr > 0.0,
            format!("π/2 arc shortened at amplitude {amp}: ({sl}, {sr})"),
        )?;
    }
    Ok(format!("3π/2 arc length change ({l:.2e}, {r:.2e})"))
}

fn c10_convergence() -> Check {
    let widths = [0.2, 0.1, 0.05, 0.025];
    let sphere = ok(Surface::sphere(1.0))?;
    let hill = ok(Surface::hill(1.0, 1.0))?;
    let cases = [
        ("sphere", &sphere, ok(line(p(1.0, 0.0), p(1.0, 1.2), 60))?),
        ("hill", &hill, ok(line(p(-2.0, 0.5), p(2.0, 0.5), 200))?),
    ];
    let mut notes = Vec::new();
    for (name, s, path) in &cases {
        let errs = ok(chariot_convergence(s, path, &widths))?;
        ensure(
            errs.windows(2).all(|w| w[1].1 < w[0].1),
            format!("{name}: errors not strictly decreasing {errs:?}"),
        )?;
        let (a, b) = (errs[2], errs[3]);
        let order = (a.1 / b.1).ln() / (a.0 / b.0).ln();
        ensure(order >= 1.5, format!("{name}: order {order}"))?;
        notes.push(format!("{name} order {order:.2}"));
    }
    Ok(notes.join(", "))
}

fn c11_egregium() -> Check {
    let mut r = rng(11);
    let sphere = ok(Surface::sphere(1.0))?;
    let cylinder = ok(Surface::cylinder(1.0))?;
    let ellipsoid = ok(Surface::ellipsoid(1.0, 1.5, 2.0))?;
    let torus = ok(Surface::torus(2.0, 1.0))?;
    let sphere_pts = sphere_points(&mut r, 10, 0.3);
    let ellipsoid_pts = sphere_points(&mut r, 10, 0.3);
    let cyl_pts: Vec<_> = (0..10)
        .map(|_| p(r.random_range(-4.0..4.0), r.random_range(0.0..2.0 * PI)))
        .collect();
    let torus_pts: Vec<_> = (0..10)
        .map(|_| p(r.random_range(0.0..2.0 * PI), r.random_range(0.0..2.0 * PI)))
        .collect();
    let cases = [
        ("sphere", &sphere, sphere_pts, 1e-3),
        ("cylinder", &cylinder, cyl_pts, 1e-3),
        ("ellipsoid", &ellipsoid, ellipsoid_pts, 1e-2),
        ("torus", &torus, torus_pts, 1e-2),
    ];
    let mut notes = Vec::new();
    for (name, s, pts, tol) in &cases {
        let rows = ok(egregium_check(s, pts))?;
        let worst = rows.iter().map(|r| r.relative_gap).fold(0.0, f64::max);
        ensure(worst < *tol, format!("{name}: relative gap {worst}"))?;
        notes.push(format!("{name} {worst:.1e}"));
    }
    Ok(format!("worst relative gaps: {}", notes.join(", ")))
}

fn c12_map() -> Check {
    let s = ok(Surface::sphere(1.0))?;
    let m = ok(builtin_projection("mercator", &s))?;
    // Small-segment oracle: a parallel at 60° has length cos 60° × Δlon.
    let at60 = p(PI / 6.0, 0.4);
    let dlon = 1e-5;
    let (x0, _) = ok(m.forward(at60.offset(0.0, -dlon)))?;
    let (x1, _) = ok(m.forward(at60.offset(0.0, dlon)))?;
    let oracle = (x1 - x0) / (0.5 * 2.0 * dlon);
    let scale = ok(measured_east_west_scale(&m, at60, 1e-5))?;
    ensure(
        (oracle - 2.0).abs() < 1e-3,
        format!("oracle scale {oracle}"),
    )?;
    ensure(
        (scale - 2.0).abs() < 1e-3,
        format!("measured scale {scale}"),
    )?;

    let rep = ok(distortion_report(&m, &s, 200, 42))?;
    ensure(rep.spread() > 1.1, format!("spread {}", rep.spread()))?;

    let sphere_v = ok(holonomy_obstruction(
        &s,
        &ok(RegionBoundary::new(octant_loop(&s)?))?,
    ))?;
    ensure(
        sphere_v.certified,
        format!("sphere not certified: {}", sphere_v.explanation),
    )?;
    let plane = Surface::plane();
    let cyl = ok(Surface::cylinder(1.0))?;
    for (name, surf) in [("plane", &plane), ("cylinder", &cyl)] {
        let region = ok(RegionBoundary::new(ok(chart_rectangle(
            -2.0, 1.0, 0.5, 4.0, 50,
        ))?))?;
        let v = ok(holonomy_obstruction(surf, &region))?;
        ensure(!v.certified, format!("{name} certified: {}", v.explanation))?;
    }
    Ok(format!(
        "scale at 60° {scale:.6}, spread {:.3} over {} pairs, sphere H {:.6}",
        rep.spread(),
        rep.samples.len(),
        sphere_v.holonomy
    ))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 12] = [
        ("wheel-difference law", 1, c1_wheel_difference),
        ("octant holonomy", 5, c2_octant),
        ("sphere curvature", 30, c3_sphere_curvature),
        ("cylinder flatness", 10, c4_cylinder),
        ("Gauss-Bonnet", 60, c5_gauss_bonnet),
        ("holonomy algebra", 60, c6_algebra),
        ("real-valued holonomy", 5, c7_real_valued),
        ("geodesic relaxation", 60, c8_relaxation),
        ("saddle geodesic", 30, c9_saddle),
        ("chariot convergence", 60, c10_convergence),
        ("Theorema Egregium", 120, c11_egregium),
        ("map impossibility", 60, c12_map),
    ];
    let mut failed = 0;
    for (k, (name, limit, f)) in criteria.iter().enumerate() {
        let t = Instant::now();
        let result = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|_| Err("panicked".into()));
        let elapsed = t.elapsed();
        let limit = Duration::from_secs(*limit);
        let (pass, detail) = match result {
            Ok(d) if elapsed <= limit => (true, d),
            Ok(d) => (false, format!("{d}; over time limit")),
            Err(e) => (false, e),
        };
        if !pass {
            failed += 1;
        }
        println!(
            "{} {:>2} {name}: {detail} [{:.2}s / {}s]",
            if pass { "PASS" } else { "FAIL" },
            k + 1,
            elapsed.as_secs_f64(),
            limit.as_secs()
        );
    }
    println!(
        "{} of {} criteria passed",
        criteria.len() - failed,
        criteria.len()
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
