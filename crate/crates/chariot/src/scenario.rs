//! Runs one scenario: builds the surface and named paths, executes the
//! command, and writes `<command>.csv`, `summary.txt` and optional plots.

use std::f64::consts::FRAC_PI_2;
use std::path::{Path as FsPath, PathBuf};

use chariot_core::geodesics::{connect_geodesic_from, geodesic_polygon};
use chariot_core::paths::{arc, chart_rectangle, latitude_circle, line};
use chariot_core::projection::MERCATOR_POLE_CUTOFF;
use chariot_core::transport::{chariot_convergence, wrap_angle};
use chariot_core::{
    builtin_projection, builtin_surface, connect_geodesic, distortion_report, finite_chariot,
    holonomy_obstruction, parallel_transport, polygon_angle_excess, relax_to_geodesic,
    shoot_geodesic, ChariotConfig, ChartPoint, GeomError, Loop, Path, RegionBoundary, RelaxOptions,
    Surface, TangentVector,
};

use crate::config::{self, CommandSpec, GridSpec, PathSpec, Point, ScenarioConfig};
use crate::format::{Cell, Summary, Table};
use crate::grid;
use crate::svg::{emit_svg_plot, Labels, PlotError, PlotKind, Series};

#[derive(Debug, thiserror::Error)]
pub enum ScenarioError {
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("invalid `{field}`: {message}")]
    Validation { field: String, message: String },
    #[error("{context}: {source}")]
    Compute { context: String, source: GeomError },
    #[error("cannot write {}: {source}", path.display())]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("plot `{name}`: {source}")]
    Plot { name: String, source: PlotError },
}

impl ScenarioError {
    /// Process exit status for this error.
    pub fn exit_code(&self) -> i32 {
        match self {
            ScenarioError::Parse { .. } | ScenarioError::Validation { .. } => 2,
            _ => 1,
        }
    }
}

type Result<T> = std::result::Result<T, ScenarioError>;

fn invalid(field: impl Into<String>, message: impl Into<String>) -> ScenarioError {
    ScenarioError::Validation {
        field: field.into(),
        message: message.into(),
    }
}

fn compute<T>(context: impl FnOnce() -> String, r: std::result::Result<T, GeomError>) -> Result<T> {
    r.map_err(|source| ScenarioError::Compute {
        context: context(),
        source,
    })
}

/// Command-line overrides.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct RunOptions {
    pub out: Option<PathBuf>,
    pub seed: Option<u64>,
    pub degrees: bool,
    pub svg: bool,
}

/// Everything a run produces, before it is written out.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub command: &'static str,
    pub tables: Vec<Table>,
    pub summary: Summary,
    /// `(file name, document)`.
    pub plots: Vec<(String, String)>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunReport {
    pub outcome: Outcome,
    pub directory: PathBuf,
    pub files: Vec<PathBuf>,
}

/// Parses, executes and writes a scenario.
pub fn run_scenario(config_text: &str, opts: &RunOptions) -> Result<RunReport> {
    let config = parse(config_text)?;
    run_config(&config, opts)
}

pub fn parse(config_text: &str) -> Result<ScenarioConfig> {
    config::parse(config_text).map_err(|e| ScenarioError::Parse {
        line: e.line,
        column: e.column,
        message: e.message,
    })
}

pub fn run_config(config: &ScenarioConfig, opts: &RunOptions) -> Result<RunReport> {
    let outcome = execute(config, opts)?;
    let directory = opts
        .out
        .clone()
        .or_else(|| config.output.directory.as_ref().map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("out").join(outcome.command));
    let files = write_outcome(&outcome, &directory, opts.degrees)?;
    Ok(RunReport {
        outcome,
        directory,
        files,
    })
}

/// Writes every table, the summary and the plots into `dir`.
pub fn write_outcome(outcome: &Outcome, dir: &FsPath, degrees: bool) -> Result<Vec<PathBuf>> {
    let io = |path: &FsPath| {
        let path = path.to_path_buf();
        move |source| ScenarioError::Io { path, source }
    };
    std::fs::create_dir_all(dir).map_err(io(dir))?;
    let mut files = Vec::new();
    for t in &outcome.tables {
        let path = dir.join(format!("{}.csv", t.name));
        std::fs::write(&path, t.to_csv_string(degrees)).map_err(io(&path))?;
        files.push(path);
    }
    let path = dir.join("summary.txt");
    std::fs::write(&path, outcome.summary.render(degrees)).map_err(io(&path))?;
    files.push(path);
    for (name, doc) in &outcome.plots {
        let path = dir.join(name);
        std::fs::write(&path, doc).map_err(io(&path))?;
        files.push(path);
    }
    Ok(files)
}

fn pt(p: Point) -> ChartPoint {
    ChartPoint::new(p[0], p[1])
}

pub fn build_surface(config: &ScenarioConfig) -> Result<Surface> {
    let spec = &config.surface;
    let s = builtin_surface(&spec.kind, &spec.params).map_err(|e| {
        let field = match e {
            GeomError::UnknownSurface(_) => "surface.kind",
            _ => "surface.params",
        };
        invalid(field, e.to_string())
    })?;
    match spec.pole_margin {
        Some(m) if !(m > 0.0 && m < 0.5) => {
            Err(invalid("surface.pole_margin", "must lie in (0, 0.5)"))
        }
        Some(m) => Ok(s.with_pole_margin(m)),
        None => Ok(s),
    }
}

fn build_path(surface: &Surface, field: &str, spec: &PathSpec) -> Result<Path> {
    let ctx = || format!("building {field}");
    let path = match spec {
        PathSpec::Line { from, to, segments } => {
            if *segments == 0 {
                return Err(invalid(format!("{field}.segments"), "must be at least 1"));
            }
            compute(ctx, line(pt(*from), pt(*to), *segments))?
        }
        PathSpec::Waypoints { points, closed } => {
            let mut pts: Vec<ChartPoint> = points.iter().copied().map(pt).collect();
            if *closed && !pts.is_empty() {
                pts.push(pts[0]);
            }
            if pts.len() < 2 {
                return Err(invalid(
                    format!("{field}.points"),
                    "needs at least two points",
                ));
            }
            compute(ctx, Path::new(pts))?
        }
        PathSpec::ChartRectangle { u, v, per_side } => {
            if !(u[0] < u[1] && v[0] < v[1]) {
                return Err(invalid(
                    format!("{field}.u"),
                    "rectangle ranges must be increasing",
                ));
            }
            compute(ctx, chart_rectangle(u[0], u[1], v[0], v[1], *per_side))?
                .path()
                .clone()
        }
        PathSpec::LatitudeCircle { u, v0, segments } => {
            if *segments < 3 {
                return Err(invalid(format!("{field}.segments"), "must be at least 3"));
            }
            compute(ctx, latitude_circle(surface, *u, *v0, *segments))?
                .path()
                .clone()
        }
        PathSpec::GeodesicPolygon { vertices } => {
            if vertices.len() < 3 {
                return Err(invalid(
                    format!("{field}.vertices"),
                    "needs at least three vertices",
                ));
            }
            let v: Vec<ChartPoint> = vertices.iter().copied().map(pt).collect();
            compute(ctx, geodesic_polygon(surface, &v))?
        }
        PathSpec::Arc {
            center,
            radius,
            angles,
            segments,
        } => {
            if radius.is_nan() || *radius <= 0.0 {
                return Err(invalid(format!("{field}.radius"), "must be positive"));
            }
            compute(
                ctx,
                arc(pt(*center), *radius, angles[0], angles[1], *segments),
            )?
        }
        PathSpec::Geodesic { from, to } => {
            compute(ctx, connect_geodesic(surface, pt(*from), pt(*to)))?.result_path
        }
    };
    Ok(path.refined(surface.max_step()))
}

/// A named path from `paths`, or from `loops`.
fn named_path(config: &ScenarioConfig, surface: &Surface, field: &str, name: &str) -> Result<Path> {
    if let Some(spec) = config.paths.get(name) {
        return build_path(surface, &format!("paths.{name}"), spec);
    }
    if let Some(spec) = config.loops.get(name) {
        return build_path(surface, &format!("loops.{name}"), spec);
    }
    Err(invalid(field, format!("no path or loop named `{name}`")))
}

fn named_loop(config: &ScenarioConfig, surface: &Surface, field: &str, name: &str) -> Result<Loop> {
    let path = named_path(config, surface, field, name)?;
    compute(
        || format!("closing loop `{name}`"),
        Loop::periodic(path, surface.domain()),
    )
}

fn named_region(
    config: &ScenarioConfig,
    surface: &Surface,
    field: &str,
    name: &str,
) -> Result<RegionBoundary> {
    let spec = config
        .regions
        .get(name)
        .ok_or_else(|| invalid(field, format!("no region named `{name}`")))?;
    let l = named_loop(
        config,
        surface,
        &format!("regions.{name}.boundary"),
        &spec.boundary,
    )?;
    compute(|| format!("region `{name}`"), RegionBoundary::new(l))
}

fn eval_points(points: &[Point], grid: &Option<GridSpec>) -> Result<Vec<ChartPoint>> {
    let mut out: Vec<ChartPoint> = points.iter().copied().map(pt).collect();
    if let Some(g) = grid {
        if g.n[0] == 0 || g.n[1] == 0 {
            return Err(invalid("command.grid.n", "counts must be at least 1"));
        }
        out.extend(grid::lattice(g));
    }
    if out.is_empty() {
        return Err(invalid("command.points", "give `points` or `grid`"));
    }
    Ok(out)
}

fn positive(field: &str, x: f64) -> Result<()> {
    if x.is_finite() && x > 0.0 {
        Ok(())
    } else {
        Err(invalid(field, format!("must be positive, got {x}")))
    }
}

fn plot(name: &str, series: &[Series], kind: PlotKind, labels: Labels) -> Result<(String, String)> {
    emit_svg_plot(series, kind, &labels)
        .map(|doc| (format!("{name}.svg"), doc))
        .map_err(|source| ScenarioError::Plot {
            name: name.into(),
            source,
        })
}

fn chart_series(label: &str, pts: &[ChartPoint]) -> Series {
    Series::new(label, pts.iter().map(|p| (p.v, p.u)).collect())
}

/// `t, u, v, cumulative_length` for the samples of `path`.
fn geodesic_table(surface: &Surface, path: &Path) -> Table {
    let mut t = Table::new("geodesic", &["t", "u", "v", "cumulative_length"]);
    let s = path.samples();
    let n = s.len();
    let mut len = 0.0;
    for (k, p) in s.iter().enumerate() {
        if k > 0 {
            len += surface.segment_length(s[k - 1], *p);
        }
        t.push(vec![
            Cell::Num(k as f64 / (n - 1) as f64),
            Cell::Num(p.u),
            Cell::Num(p.v),
            Cell::Num(len),
        ]);
    }
    t
}

/// Runs the computation without touching the file system.
pub fn execute(config: &ScenarioConfig, opts: &RunOptions) -> Result<Outcome> {
    for f in &config.output.formats {
        if f != "csv" && f != "svg" {
            return Err(invalid(
                "output.formats",
                format!("unknown format `{f}` (csv, svg)"),
            ));
        }
    }
    let want_svg = opts.svg || config.output.formats.iter().any(|f| f == "svg");
    let surface = build_surface(config)?;
    let mut summary = Summary::default();
    summary.text("command", config.command.name());
    summary.text("surface", surface.name());
    let mut tables = Vec::new();
    let mut plots = Vec::new();

    match &config.command {
        CommandSpec::Transport {
            path,
            loop_name,
            initial,
        } => {
            let (name, closed) = match (path, loop_name) {
                (Some(p), None) => (p, None),
                (None, Some(l)) => (l, Some(named_loop(config, &surface, "command.loop", l)?)),
                _ => {
                    return Err(invalid(
                        "command.path",
                        "give exactly one of `path` and `loop`",
                    ))
                }
            };
            let route = match &closed {
                Some(l) => l.path().clone(),
                None => named_path(config, &surface, "command.path", name)?,
            };
            let start = route.start();
            let v0 = match initial {
                Some(v) => TangentVector::new(start, v[0], v[1]),
                None => {
                    let e = compute(|| "frame at the start".into(), surface.frame_at(start))?[0];
                    TangentVector::new(start, e[0], e[1])
                }
            };
            let r = compute(
                || format!("transport along `{name}`"),
                parallel_transport(&surface, &route, v0),
            )?;
            let mut t = Table::new("transport", &["arclength", "angle_unwrapped"]);
            let a0 = r.angle_trace[0].1;
            for (s, a) in &r.angle_trace {
                t.push(vec![Cell::Num(*s), Cell::Angle(a - a0)]);
            }
            tables.push(t);
            summary.text("path", name.as_str());
            summary.put("samples", Cell::Int(route.len() as i64));
            summary.num("length", r.angle_trace.last().map_or(0.0, |x| x.0));
            summary.angle("total_rotation", r.total_rotation);
            summary.angle("error_estimate", r.error_estimate);
            summary.num("final_du", r.final_vector.du);
            summary.num("final_dv", r.final_vector.dv);
            if let Some(l) = &closed {
                let h = r.total_rotation + surface.pole_winding_correction(l.winding());
                summary.angle("holonomy", h);
                summary.angle("holonomy_mod_2pi", wrap_angle(h));
                summary.text("winding", format!("{} {}", l.winding()[0], l.winding()[1]));
            }
            if want_svg {
                plots.push(plot(
                    "transport",
                    &[Series::new(
                        "angle",
                        r.angle_trace.iter().map(|(s, a)| (*s, a - a0)).collect(),
                    )],
                    PlotKind::PathOverlay,
                    Labels::new("Transported direction", "arclength", "rotation (rad)"),
                )?);
            }
        }

        CommandSpec::Chariot {
            path,
            width,
            step,
            convergence_widths,
        } => {
            positive("command.width", *width)?;
            if let Some(s) = step {
                positive("command.step", *s)?;
            }
            for w in convergence_widths {
                positive("command.convergence_widths", *w)?;
            }
            let route = named_path(config, &surface, "command.path", path)?;
            let cfg = ChariotConfig {
                width: *width,
                step: step.unwrap_or(0.5 * width),
            };
            let r = compute(
                || format!("chariot along `{path}`"),
                finite_chariot(&surface, &route, cfg),
            )?;
            let wheels = r.wheels.as_ref().expect("finite chariot reports wheels");
            let mut t = Table::new("chariot", &["arclength", "angle_unwrapped", "d_l", "d_r"]);
            let a0 = r.angle_trace[0].1;
            for (k, (s, a)) in r.angle_trace.iter().enumerate() {
                t.push(vec![
                    Cell::Num(*s),
                    Cell::Angle(a - a0),
                    Cell::Num(wheels.d_left[k]),
                    Cell::Num(wheels.d_right[k]),
                ]);
            }
            tables.push(t);
            let e = compute(
                || "frame at the start".into(),
                surface.frame_at(route.start()),
            )?[0];
            let continuum = compute(
                || format!("transport along `{path}`"),
                parallel_transport(
                    &surface,
                    &route,
                    TangentVector::new(route.start(), e[0], e[1]),
                ),
            )?;
            let (dl, dr) = (
                *wheels.d_left.last().unwrap(),
                *wheels.d_right.last().unwrap(),
            );
            summary.text("path", path.as_str());
            summary.num("width", *width);
            summary.num("d_l", dl);
            summary.num("d_r", dr);
            summary.num("wheel_difference", dl - dr);
            summary.angle("statue_turn", (dl - dr) / width);
            summary.angle("total_rotation", r.total_rotation);
            summary.angle("continuum_rotation", continuum.total_rotation);
            summary.angle("error", (r.total_rotation - continuum.total_rotation).abs());
            if want_svg {
                plots.push(plot(
                    "tracks",
                    &[
                        chart_series("center", route.samples()),
                        chart_series("left wheel", &wheels.left),
                        chart_series("right wheel", &wheels.right),
                    ],
                    PlotKind::PathOverlay,
                    Labels::new("Chariot wheel tracks", "v", "u"),
                )?);
            }
            if !convergence_widths.is_empty() {
                let errs = compute(
                    || "chariot convergence".into(),
                    chariot_convergence(&surface, &route, convergence_widths),
                )?;
                let mut t = Table::new("convergence", &["width", "error"]);
                for (w, e) in &errs {
                    t.push(vec![Cell::Num(*w), Cell::Angle(*e)]);
                }
                tables.push(t);
                let decreasing = errs.windows(2).all(|p| p[1].1 < p[0].1);
                summary.text(
                    "convergence_strictly_decreasing",
                    if decreasing { "yes" } else { "no" },
                );
                if errs.len() >= 2 {
                    let (a, b) = (errs[errs.len() - 2], errs[errs.len() - 1]);
                    summary.num("convergence_order", (a.1 / b.1).ln() / (a.0 / b.0).ln());
                }
                if want_svg {
                    let pts: Vec<(f64, f64)> =
                        errs.iter().copied().filter(|(_, e)| *e > 0.0).collect();
                    plots.push(plot(
                        "convergence",
                        &[Series::new("|finite - continuum|", pts)],
                        PlotKind::Convergence,
                        Labels::new("Chariot convergence", "width", "rotation error (rad)"),
                    )?);
                }
            }
        }

        CommandSpec::Geodesic {
            from,
            to,
            start,
            direction,
            length,
            initial_angle,
        } => {
            let shot = match (from, to, start, direction, length) {
                (Some(a), Some(b), None, None, None) => compute(
                    || "connecting geodesic".into(),
                    connect_geodesic_from(&surface, pt(*a), pt(*b), *initial_angle),
                )?,
                (None, None, Some(a), Some(d), Some(l)) => {
                    positive("command.length", *l)?;
                    compute(
                        || "shooting geodesic".into(),
                        shoot_geodesic(
                            &surface,
                            pt(*a),
                            TangentVector::new(pt(*a), d[0], d[1]),
                            *l,
                        ),
                    )?
                }
                _ => {
                    return Err(invalid(
                        "command",
                        "give `from` and `to`, or `start`, `direction` and `length`",
                    ))
                }
            };
            tables.push(geodesic_table(&surface, &shot.result_path));
            let end = shot.end();
            summary.num("length", shot.length);
            summary.num("start_u", shot.start.u);
            summary.num("start_v", shot.start.v);
            summary.num("end_u", end.u);
            summary.num("end_v", end.v);
            summary.put("samples", Cell::Int(shot.result_path.len() as i64));
            if want_svg {
                plots.push(plot(
                    "geodesic",
                    &[chart_series("geodesic", shot.result_path.samples())],
                    PlotKind::PathOverlay,
                    Labels::new("Geodesic", "v", "u"),
                )?);
            }
        }

        CommandSpec::Relax {
            path,
            tol,
            max_iterations,
            step_gain,
        } => {
            positive("command.tol", *tol)?;
            if *max_iterations == 0 {
                return Err(invalid("command.max_iterations", "must be at least 1"));
            }
            if let Some(g) = step_gain {
                positive("command.step_gain", *g)?;
            }
            let route = named_path(config, &surface, "command.path", path)?;
            let opts = RelaxOptions {
                step_gain: *step_gain,
                tol: *tol,
                max_iterations: *max_iterations,
            };
            let rep = compute(
                || format!("relaxing `{path}`"),
                relax_to_geodesic(&surface, &route, opts),
            )?;
            let mut t = Table::new("relax", &["iteration", "length", "max_rotation_rate"]);
            for (k, (l, r)) in rep
                .length_history
                .iter()
                .zip(&rep.rotation_history)
                .enumerate()
            {
                t.push(vec![Cell::Int(k as i64), Cell::Num(*l), Cell::Num(*r)]);
            }
            tables.push(t);
            tables.push(geodesic_table(&surface, &rep.final_path));
            let monotone = rep
                .length_history
                .windows(2)
                .all(|w| w[1] <= w[0] * (1.0 + 1e-12));
            summary.text("path", path.as_str());
            summary.put("iterations", Cell::Int(rep.iterations as i64));
            summary.num("initial_length", rep.length_history[0]);
            summary.num("final_length", *rep.length_history.last().unwrap());
            summary.num("final_max_rotation_rate", rep.final_max_rotation_rate);
            summary.text("length_monotone", if monotone { "yes" } else { "no" });
            if want_svg {
                plots.push(plot(
                    "relax",
                    &[
                        chart_series("initial", route.samples()),
                        chart_series("relaxed", rep.final_path.samples()),
                    ],
                    PlotKind::PathOverlay,
                    Labels::new("Relaxation to a geodesic", "v", "u"),
                )?);
            }
        }

        CommandSpec::Curvature {
            points,
            grid,
            scales,
        } => {
            if let Some(sc) = scales {
                if sc.is_empty() {
                    return Err(invalid("command.scales", "needs at least one scale"));
                }
                for s in sc {
                    positive("command.scales", *s)?;
                }
            }
            let pts = eval_points(points, grid)?;
            let rows = compute(
                || "curvature".into(),
                grid::curvature_rows(&surface, &pts, scales.as_deref()),
            )?;
            let mut t = Table::new(
                "curvature",
                &["u", "v", "K_intrinsic", "K_extrinsic", "error_estimate"],
            );
            for r in &rows {
                t.push(vec![
                    Cell::Num(r.point.u),
                    Cell::Num(r.point.v),
                    Cell::Num(r.intrinsic),
                    r.extrinsic.map_or(Cell::Empty, Cell::Num),
                    Cell::Num(r.error_estimate),
                ]);
            }
            tables.push(t);
            let n = rows.len() as f64;
            summary.put("points", Cell::Int(rows.len() as i64));
            summary.num(
                "mean_K_intrinsic",
                rows.iter().map(|r| r.intrinsic).sum::<f64>() / n,
            );
            summary.num(
                "min_K_intrinsic",
                rows.iter()
                    .map(|r| r.intrinsic)
                    .fold(f64::INFINITY, f64::min),
            );
            summary.num(
                "max_K_intrinsic",
                rows.iter()
                    .map(|r| r.intrinsic)
                    .fold(f64::NEG_INFINITY, f64::max),
            );
            summary.num(
                "max_error_estimate",
                rows.iter().map(|r| r.error_estimate).fold(0.0, f64::max),
            );
        }

        CommandSpec::Gaussbonnet { region, grids } => {
            if grids.is_empty() {
                return Err(invalid("command.grids", "needs at least one grid size"));
            }
            if let Some(g) = grids.iter().find(|g| **g < 4) {
                return Err(invalid(
                    "command.grids",
                    format!("grid {g} is below the minimum of 4"),
                ));
            }
            let r = named_region(config, &surface, "command.region", region)?;
            let mut t = Table::new("gaussbonnet", &["holonomy", "integral", "residual"]);
            let mut results = Vec::new();
            for &g in grids {
                let gb = compute(
                    || format!("Gauss-Bonnet on `{region}` at grid {g}"),
                    grid::gauss_bonnet(&surface, &r, g),
                )?;
                t.push(vec![
                    Cell::Angle(gb.holonomy),
                    Cell::Angle(gb.integral),
                    Cell::Angle(gb.residual),
                ]);
                results.push(gb);
            }
            tables.push(t);
            let first = results[0];
            let last = *results.last().unwrap();
            summary.text("region", region.as_str());
            summary.text(
                "orientation",
                format!("{:?}", r.orientation()).to_lowercase(),
            );
            summary.num("area", compute(|| "region area".into(), r.area(&surface))?);
            summary.angle("holonomy", first.holonomy);
            summary.angle("holonomy_magnitude", first.holonomy.abs());
            summary.angle("integral", last.integral);
            summary.angle("residual", last.residual);
            for (g, gb) in grids.iter().zip(&results) {
                summary.angle(&format!("residual_grid_{g}"), gb.residual);
            }
            if results.len() >= 2 {
                summary.num(
                    "refinement_ratio",
                    last.residual / results[results.len() - 2].residual,
                );
            }
        }

        CommandSpec::Polygon { vertices } => {
            if vertices.len() < 3 {
                return Err(invalid("command.vertices", "needs at least three vertices"));
            }
            let v: Vec<ChartPoint> = vertices.iter().copied().map(pt).collect();
            let ex = compute(
                || "geodesic polygon".into(),
                polygon_angle_excess(&surface, &v),
            )?;
            let interior = ex.interior_angles();
            let mut t = Table::new(
                "polygon",
                &["vertex", "u", "v", "interior_angle", "exterior_angle"],
            );
            for (k, p) in v.iter().enumerate() {
                t.push(vec![
                    Cell::Int(k as i64),
                    Cell::Num(p.u),
                    Cell::Num(p.v),
                    Cell::Angle(interior[k]),
                    Cell::Angle(ex.exterior_angles[k]),
                ]);
            }
            tables.push(t);
            let sum: f64 = interior.iter().sum();
            let flat = (v.len() as f64 - 2.0) * std::f64::consts::PI;
            summary.text(
                "orientation",
                format!("{:?}", ex.orientation).to_lowercase(),
            );
            summary.angle("interior_angle_sum", sum);
            summary.angle("angle_excess", sum - flat);
            summary.angle("holonomy", ex.holonomy);
            summary.angle("holonomy_magnitude", ex.holonomy.abs());
            if want_svg {
                plots.push(plot(
                    "polygon",
                    &[chart_series("boundary", ex.boundary.samples())],
                    PlotKind::PathOverlay,
                    Labels::new("Geodesic polygon", "v", "u"),
                )?);
            }
        }

        CommandSpec::Mapcheck {
            projection,
            pairs,
            seed,
            nominal_scale,
            region,
        } => {
            if *pairs < 10 {
                return Err(invalid(
                    "command.pairs",
                    format!("must be at least 10, got {pairs}"),
                ));
            }
            positive("command.nominal_scale", *nominal_scale)?;
            let m = builtin_projection(projection, &surface).map_err(|e| match e {
                GeomError::NotASphere(_) => invalid("surface.kind", e.to_string()),
                _ => invalid("command.projection", e.to_string()),
            })?;
            let m = m.with_nominal_scale(*nominal_scale);
            let seed = opts.seed.unwrap_or(*seed);
            let rep = compute(
                || "distortion report".into(),
                distortion_report(&m, &surface, *pairs, seed),
            )?;
            let mut t = Table::new(
                "mapcheck",
                &[
                    "lat1",
                    "lon1",
                    "lat2",
                    "lon2",
                    "true_dist",
                    "map_dist",
                    "ratio",
                ],
            );
            for s in &rep.samples {
                t.push(vec![
                    Cell::Angle(FRAC_PI_2 - s.a.u),
                    Cell::Angle(s.a.v),
                    Cell::Angle(FRAC_PI_2 - s.b.u),
                    Cell::Angle(s.b.v),
                    Cell::Num(s.true_distance),
                    Cell::Num(s.map_distance),
                    Cell::Num(s.ratio),
                ]);
            }
            tables.push(t);
            summary.text("projection", projection.as_str());
            if projection == "mercator" {
                summary.angle("pole_cutoff", MERCATOR_POLE_CUTOFF);
            }
            summary.put("seed", Cell::Int(seed as i64));
            summary.num("nominal_scale", *nominal_scale);
            summary.put("pairs", Cell::Int(rep.samples.len() as i64));
            summary.put("skipped", Cell::Int(rep.skipped.len() as i64));
            summary.num("min_ratio", rep.min_ratio);
            summary.num("max_ratio", rep.max_ratio);
            summary.num("spread", rep.spread());
            if let Some(name) = region {
                let r = named_region(config, &surface, "command.region", name)?;
                let v = compute(
                    || format!("holonomy obstruction on `{name}`"),
                    holonomy_obstruction(&surface, &r),
                )?;
                summary.angle("obstruction_holonomy", v.holonomy);
                summary.angle("obstruction_error", v.error_estimate);
                summary.text(
                    "obstruction_certified",
                    if v.certified { "yes" } else { "no" },
                );
                summary.text("obstruction_explanation", v.explanation);
            }
            if want_svg {
                let pts = rep.samples.iter().map(|s| (s.ratio, 0.0)).collect();
                plots.push(plot(
                    "ratios",
                    &[Series::new(projection.as_str(), pts)],
                    PlotKind::RatioHistogram,
                    Labels::new("Map distance / true distance", "ratio", "pairs"),
                )?);
            }
        }

        CommandSpec::Egregium { points, grid } => {
            let pts = eval_points(points, grid)?;
            let rows = compute(
                || "egregium check".into(),
                grid::egregium_rows(&surface, &pts),
            )?;
            let mut t = Table::new(
                "egregium",
                &[
                    "u",
                    "v",
                    "K_intrinsic",
                    "K_extrinsic",
                    "relative_gap",
                    "intrinsic_error",
                ],
            );
            for r in &rows {
                t.push(vec![
                    Cell::Num(r.point.u),
                    Cell::Num(r.point.v),
                    Cell::Num(r.intrinsic),
                    Cell::Num(r.extrinsic),
                    Cell::Num(r.relative_gap),
                    Cell::Num(r.intrinsic_error),
                ]);
            }
            tables.push(t);
            summary.put("points", Cell::Int(rows.len() as i64));
            summary.num(
                "max_relative_gap",
                rows.iter().map(|r| r.relative_gap).fold(0.0, f64::max),
            );
        }
    }

    Ok(Outcome {
        command: config.command.name(),
        tables,
        summary,
        plots,
    })
}
