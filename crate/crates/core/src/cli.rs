//! Command-line front end: `solve`, `trace`, `mesh`, `limits` and `verify`.
//!
//! Options resolve as command-line flag, then `key=value` config file, then
//! built-in default. Exit codes: 0 success, 1 failed run or check, 2 no root,
//! 3 period-closure fault, 64 usage error.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use num_complex::Complex;

use crate::error::{Error, GeometryError, SolveError};
use crate::limits::{hw_gap, hw_samples, hw_schedule, scherk_gap, scherk_samples, scherk_schedule, strictly_decreasing};
use crate::period::{
    alpha, curve_point_at_a, curve_point_at_x, i_delta, i_gamma, i_gamma_limit_b1, i_gamma_limit_ba, i_sigma, circle_identities_check,
    solve_b, trace_family_curve, FamilyCurve, TraceOptions, QUAD_TOL,
};
use crate::quadrature::{integrate, integrate_path, Endpoints, Tolerance};
use crate::surface::{
    assemble_unchecked, check_loop_periods, check_seam_translations, export_mesh, lattice_vectors, mesh_patch, quality_report, Lattice,
    MeshFormat, SurfaceMesh, Vec3,
};
use crate::weierstrass::{involution_table_check, make_params, SurfaceParams};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILED: i32 = 1;
pub const EXIT_NO_ROOT: i32 = 2;
pub const EXIT_CLOSURE: i32 = 3;
pub const EXIT_USAGE: i32 = 64;

/// Version tag of the trace cache format.
pub const CACHE_VERSION: u32 = 1;
/// Environment variable capping worker threads.
pub const THREADS_ENV: &str = "TPMS_THREADS";

#[derive(Debug, Parser)]
#[command(name = "tpms", about = "Genus-7 triply periodic minimal surfaces: period problem, continuation and meshing")]
pub struct Cli {
    /// Plain-text `key=value` config file (flags take precedence).
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Solve the first period condition for b at given (a, x).
    Solve(SolveArgs),
    /// Trace the solution curve and write it as CSV.
    Trace(TraceArgs),
    /// Mesh the fundamental piece.
    Mesh(MeshArgs),
    /// Report the gaps to both limit surfaces along their schedules.
    Limits(LimitsArgs),
    /// Run the invariant suite.
    Verify(VerifyArgs),
}

#[derive(Debug, Args)]
pub struct SolveArgs {
    #[arg(long, allow_negative_numbers = true)]
    pub a: f64,
    #[arg(long, allow_negative_numbers = true)]
    pub x: f64,
    #[arg(long)]
    pub tol: Option<f64>,
}

#[derive(Debug, Args)]
pub struct TraceArgs {
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub tol: Option<f64>,
    /// Curve cache read by `mesh --s` (default: `<out>.curve`).
    #[arg(long)]
    pub cache: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct MeshArgs {
    #[arg(long, allow_negative_numbers = true)]
    pub a: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub b: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub x: Option<f64>,
    /// Curve parameter in [0, 1], resolved against the trace cache.
    #[arg(long, conflicts_with_all = ["a", "b", "x"])]
    pub s: Option<f64>,
    #[arg(long)]
    pub cache: Option<PathBuf>,
    #[arg(long)]
    pub resolution: Option<usize>,
    /// Lattice copies `n1,n2,n3`.
    #[arg(long)]
    pub copies: Option<String>,
    #[arg(long)]
    pub format: Option<String>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Export all sixteen sheets (a unit cell) instead of the fundamental piece.
    #[arg(long)]
    pub cell: bool,
    #[arg(long)]
    pub tol: Option<f64>,
}

#[derive(Debug, Args)]
pub struct LimitsArgs {
    #[arg(long)]
    pub tol: Option<f64>,
    /// Number of schedule points per limit.
    #[arg(long)]
    pub points: Option<usize>,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// Mutation sanity check: flips the sign of `I_delta` in the additivity check.
    #[arg(long, hide = true)]
    pub flip_delta_sign: bool,
}

/// Resolved options of one invocation.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub tol: f64,
    pub n: usize,
    pub resolution: usize,
    pub copies: (usize, usize, usize),
    pub format: MeshFormat,
    pub out: Option<PathBuf>,
    pub cache: Option<PathBuf>,
    pub points: usize,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self { tol: 1e-10, n: 64, resolution: 64, copies: (1, 1, 1), format: MeshFormat::Obj, out: None, cache: None, points: 5 }
    }
}

#[derive(Debug)]
struct Usage(String);

fn parse_config(text: &str) -> Result<BTreeMap<String, String>, Usage> {
    let mut out = BTreeMap::new();
    for (k, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| Usage(format!("config line {}: expected key=value", k + 1)))?;
        out.insert(key.trim().to_string(), value.trim().to_string());
    }
    Ok(out)
}

fn parse_copies(s: &str) -> Result<(usize, usize, usize), Usage> {
    let v: Vec<usize> = s.split(',').map(|t| t.trim().parse::<usize>()).collect::<Result<_, _>>().map_err(|_| Usage(format!("bad copies '{s}'")))?;
    match v[..] {
        [a, b, c] if a >= 1 && b >= 1 && c >= 1 => Ok((a, b, c)),
        _ => Err(Usage(format!("copies must be three integers >= 1, got '{s}'"))),
    }
}

struct Resolver {
    file: BTreeMap<String, String>,
}

impl Resolver {
    fn get<V: std::str::FromStr>(&self, flag: Option<V>, key: &str) -> Result<Option<V>, Usage> {
        if flag.is_some() {
            return Ok(flag);
        }
        match self.file.get(key) {
            Some(s) => s.parse::<V>().map(Some).map_err(|_| Usage(format!("config key '{key}': cannot parse '{s}'"))),
            None => Ok(None),
        }
    }
}

impl RunConfig {
    fn validate(self) -> Result<Self, Usage> {
        if !(self.tol > 0.0 && self.tol.is_finite()) {
            return Err(Usage(format!("tolerance must be positive, got {}", self.tol)));
        }
        if self.resolution < 8 {
            return Err(Usage(format!("resolution must be at least 8, got {}", self.resolution)));
        }
        if self.n < 2 {
            return Err(Usage(format!("n must be at least 2, got {}", self.n)));
        }
        if self.points < 2 {
            return Err(Usage(format!("points must be at least 2, got {}", self.points)));
        }
        Ok(self)
    }
}

fn resolve(cli: &Cli) -> Result<RunConfig, Usage> {
    let file = match &cli.config {
        Some(p) => parse_config(&std::fs::read_to_string(p).map_err(|e| Usage(format!("{}: {e}", p.display())))?)?,
        None => BTreeMap::new(),
    };
    let r = Resolver { file };
    let d = RunConfig::default();
    let (tol, n, res, copies, format, out, cache, points) = match &cli.command {
        Command::Solve(a) => (a.tol, None, None, None, None, None, None, None),
        Command::Trace(a) => (a.tol, a.n, None, None, None, a.out.clone(), a.cache.clone(), None),
        Command::Mesh(a) => (a.tol, None, a.resolution, a.copies.clone(), a.format.clone(), a.out.clone(), a.cache.clone(), None),
        Command::Limits(a) => (a.tol, None, None, None, None, None, None, a.points),
        Command::Verify(_) => (None, None, None, None, None, None, None, None),
    };
    let copies = match r.get(copies, "copies")? {
        Some(s) => parse_copies(&s)?,
        None => d.copies,
    };
    let format = match r.get::<String>(format, "format")? {
        Some(s) => s.parse::<MeshFormat>().map_err(Usage)?,
        None => d.format,
    };
    RunConfig {
        tol: r.get(tol, "tol")?.unwrap_or(d.tol),
        n: r.get(n, "n")?.unwrap_or(d.n),
        resolution: r.get(res, "resolution")?.unwrap_or(d.resolution),
        copies,
        format,
        out: r.get(out, "out")?,
        cache: r.get(cache, "cache")?,
        points: r.get(points, "points")?.unwrap_or(d.points),
    }
    .validate()
}

fn init_threads() {
    if let Some(n) = std::env::var(THREADS_ENV).ok().and_then(|s| s.trim().parse::<usize>().ok()).filter(|&n| n > 0) {
        // A pool may already exist when running several commands in one process.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
}

/// Parses `args` (including the program name), runs the command and returns the exit code.
pub fn run<I, S>(args: I, out: &mut dyn std::io::Write, err: &mut dyn std::io::Write) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion | ErrorKind::DisplayHelpOnMissingArgumentOrSubcommand => EXIT_OK,
                _ => EXIT_USAGE,
            };
            let sink: &mut dyn std::io::Write = if code == EXIT_OK { out } else { err };
            let _ = write!(sink, "{}", e.render());
            return code;
        }
    };
    let cfg = match resolve(&cli) {
        Ok(c) => c,
        Err(Usage(m)) => {
            let _ = writeln!(err, "usage error: {m}");
            return EXIT_USAGE;
        }
    };
    init_threads();
    let result = match &cli.command {
        Command::Solve(a) => cmd_solve(a, &cfg, out),
        Command::Trace(_) => cmd_trace(&cfg, out),
        Command::Mesh(a) => cmd_mesh(a, &cfg, out),
        Command::Limits(_) => cmd_limits(&cfg, out),
        Command::Verify(a) => cmd_verify(a, out),
    };
    match result {
        Ok(code) => code,
        Err(CmdError::Usage(m)) => {
            let _ = writeln!(err, "usage error: {m}");
            EXIT_USAGE
        }
        Err(CmdError::Run(e)) => {
            let _ = writeln!(err, "error: {e}");
            EXIT_FAILED
        }
    }
}

#[derive(Debug)]
enum CmdError {
    Usage(String),
    Run(Error),
}

impl<E: Into<Error>> From<E> for CmdError {
    fn from(e: E) -> Self {
        CmdError::Run(e.into())
    }
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> CmdError + '_ {
    move |e| CmdError::Run(Error::Io { path: path.display().to_string(), source: e })
}

fn sci(v: f64) -> String {
    format!("{v:.16e}")
}

fn cmd_solve(a: &SolveArgs, cfg: &RunConfig, out: &mut dyn std::io::Write) -> Result<i32, CmdError> {
    if !(a.a > 0.0 && a.a < 1.0 && a.x > 0.0 && a.x < 1.0) {
        return Err(CmdError::Usage(format!("need 0 < a < 1 and 0 < x < 1, got a={} x={}", a.a, a.x)));
    }
    let mut w = String::new();
    match solve_b(a.a, a.x, cfg.tol) {
        Ok(b) => {
            let p = make_params(a.a, b, a.x)?;
            let qt = (cfg.tol * 1e-3).max(QUAD_TOL);
            let (ig, id, is) = (i_gamma(&p, qt)?, i_delta(&p, qt)?, i_sigma(&p, qt)?);
            let _ = writeln!(w, "a = {}\nx = {}\nb = {}", sci(a.a), sci(a.x), sci(b));
            let _ = writeln!(w, "i_gamma = {}\ni_delta = {}\ni_sigma = {}", sci(ig), sci(id), sci(is));
            let _ = writeln!(w, "in_region = true");
            out.write_all(w.as_bytes()).ok();
            Ok(EXIT_OK)
        }
        Err(SolveError::NoRoot { f_lo, f_hi, .. }) => {
            let _ = writeln!(w, "a = {}\nx = {}\nno root: I_gamma(b -> a) = {} and I_gamma(b = 1) = {} have the same sign", sci(a.a), sci(a.x), sci(f_lo), sci(f_hi));
            let _ = writeln!(w, "in_region = false");
            out.write_all(w.as_bytes()).ok();
            Ok(EXIT_NO_ROOT)
        }
        Err(e) => Err(e.into()),
    }
}

fn csv_text(curve: &FamilyCurve<f64>) -> String {
    let mut s = String::from("s,a,b,x,i_gamma,i_delta\n");
    for p in &curve.points {
        let _ = writeln!(s, "{},{},{},{},{},{}", sci(p.s), sci(p.params.a()), sci(p.params.b()), sci(p.params.x()), sci(p.i_gamma), sci(p.i_delta));
    }
    s
}

fn cache_header(tol: f64) -> String {
    format!("# tpms-curve version={CACHE_VERSION} tol={}", sci(tol))
}

fn cache_text(curve: &FamilyCurve<f64>, tol: f64) -> String {
    let mut s = cache_header(tol);
    let _ = write!(s, "\nterminal,{},{}\n", sci(curve.a_star), sci(curve.b_star));
    s.push_str(&csv_text(curve));
    s
}

/// Cached curve points `(s, a, b, x)` and terminal `(a*, b*)`.
type CachedCurve = (Vec<[f64; 4]>, (f64, f64));

/// Reads the trace cache; `None` if missing or stale.
fn read_cache(path: &Path, tol: f64) -> Option<CachedCurve> {
    let text = std::fs::read_to_string(path).ok()?;
    let mut lines = text.lines();
    let header = lines.next()?;
    let mut version = None;
    let mut cached_tol = None;
    for tok in header.split_whitespace() {
        if let Some(v) = tok.strip_prefix("version=") {
            version = v.parse::<u32>().ok();
        }
        if let Some(v) = tok.strip_prefix("tol=") {
            cached_tol = v.parse::<f64>().ok();
        }
    }
    if version != Some(CACHE_VERSION) || !(cached_tol? <= tol) {
        return None;
    }
    let term: Vec<f64> = lines.next()?.strip_prefix("terminal,")?.split(',').map(|t| t.parse().ok()).collect::<Option<_>>()?;
    lines.next()?;
    let mut pts = Vec::new();
    for l in lines {
        let v: Vec<f64> = l.split(',').map(|t| t.parse().ok()).collect::<Option<_>>()?;
        if v.len() < 4 {
            return None;
        }
        pts.push([v[0], v[1], v[2], v[3]]);
    }
    (pts.len() >= 2 && term.len() == 2).then_some((pts, (term[0], term[1])))
}

fn write_file(path: &Path, text: &str) -> Result<(), CmdError> {
    std::fs::write(path, text).map_err(io_err(path))
}

fn default_cache(out: &Path) -> PathBuf {
    let mut s = out.as_os_str().to_owned();
    s.push(".curve");
    PathBuf::from(s)
}

fn cmd_trace(cfg: &RunConfig, out: &mut dyn std::io::Write) -> Result<i32, CmdError> {
    let path = cfg.out.clone().ok_or_else(|| CmdError::Usage("trace needs --out".into()))?;
    let opts = TraceOptions { n_points: cfg.n, tol: cfg.tol, ..TraceOptions::default() };
    match trace_family_curve::<f64>(&opts) {
        Ok(curve) => {
            write_file(&path, &csv_text(&curve))?;
            let cache = cfg.cache.clone().unwrap_or_else(|| default_cache(&path));
            write_file(&cache, &cache_text(&curve, cfg.tol))?;
            let _ = writeln!(out, "wrote {} points to {}\na_star = {}\nb_star = {}", curve.points.len(), path.display(), sci(curve.a_star), sci(curve.b_star));
            Ok(EXIT_OK)
        }
        Err(e) => {
            // Points are corrected jointly; nothing beyond the header is certified.
            write_file(&path, "s,a,b,x,i_gamma,i_delta\n")?;
            let _ = writeln!(out, "continuation failed, last good s = 0: {e}");
            Ok(EXIT_FAILED)
        }
    }
}

/// Resolves a curve parameter against cached points, re-tracing if the cache is stale.
fn resolve_s(s: f64, cfg: &RunConfig, out: &mut dyn std::io::Write) -> Result<SurfaceParams<f64>, CmdError> {
    if !(0.0..=1.0).contains(&s) {
        return Err(CmdError::Usage(format!("s must lie in [0, 1], got {s}")));
    }
    let cache = cfg.cache.clone().ok_or_else(|| CmdError::Usage("mesh --s needs --cache".into()))?;
    let (pts, _) = match read_cache(&cache, cfg.tol) {
        Some(c) => c,
        None => {
            let _ = writeln!(out, "trace cache {} missing or stale; tracing", cache.display());
            let curve = trace_family_curve::<f64>(&TraceOptions { n_points: cfg.n, tol: cfg.tol, ..TraceOptions::default() })?;
            write_file(&cache, &cache_text(&curve, cfg.tol))?;
            read_cache(&cache, cfg.tol).ok_or_else(|| CmdError::Run(Error::Parse("cannot re-read trace cache".into())))?
        }
    };
    let j = pts.partition_point(|p| p[0] <= s).clamp(1, pts.len() - 1);
    let (p, q) = (pts[j - 1], pts[j]);
    let u = if q[0] > p[0] { (s - p[0]) / (q[0] - p[0]) } else { 0.0 };
    let lerp = |k: usize| p[k] + (q[k] - p[k]) * u;
    if u == 0.0 || u == 1.0 {
        let r = if u == 0.0 { p } else { q };
        return Ok(make_params(r[1], r[2], r[3])?);
    }
    let sol = if (q[3] - p[3]).abs() > (q[1] - p[1]).abs() {
        curve_point_at_x(lerp(3), lerp(1), (q[1] - p[1]).abs().max(1e-6) * 2.0, cfg.tol)?
    } else {
        curve_point_at_a(lerp(1), lerp(3), cfg.tol)?
    };
    Ok(sol.params)
}

fn print_lattice(w: &mut String, l: &[Vec3; 3]) {
    for (i, v) in l.iter().enumerate() {
        let _ = writeln!(w, "lattice_v{} = {} {} {}", i + 1, sci(v.x), sci(v.y), sci(v.z));
    }
}

fn cmd_mesh(a: &MeshArgs, cfg: &RunConfig, out: &mut dyn std::io::Write) -> Result<i32, CmdError> {
    let path = cfg.out.clone().ok_or_else(|| CmdError::Usage("mesh needs --out".into()))?;
    let params = match (a.s, a.a, a.b, a.x) {
        (Some(s), ..) => resolve_s(s, cfg, out)?,
        (None, Some(pa), Some(pb), Some(px)) => make_params(pa, pb, px).map_err(|e| CmdError::Usage(e.to_string()))?,
        _ => return Err(CmdError::Usage("mesh needs either --s or all of --a, --b, --x".into())),
    };
    let mut w = String::new();
    let _ = writeln!(w, "a = {}\nb = {}\nx = {}", sci(params.a()), sci(params.b()), sci(params.x()));
    let patch = match mesh_patch(&params, cfg.resolution) {
        Ok(p) => p,
        Err(e @ GeometryError::CellClosure { .. }) => {
            let _ = writeln!(w, "closure fault: {e}");
            out.write_all(w.as_bytes()).ok();
            return Ok(EXIT_CLOSURE);
        }
        Err(e) => return Err(e.into()),
    };
    let piece = assemble_unchecked(&patch)?;
    let seam_tol = crate::surface::assembly::SEAM_TOL * piece.scale;
    let lattice = lattice_vectors(&piece).unwrap_or(Lattice { basis: [Vec3::zeros(); 3], gram_det: 0.0 });
    let mut fault = None;
    if piece.closure_residual > seam_tol {
        fault = Some(GeometryError::ClosureFault { mismatch: piece.closure_residual, tolerance: seam_tol });
    } else if lattice.gram_det == 0.0 {
        fault = lattice_vectors(&piece).err();
    } else if let Err(e) = check_seam_translations(&piece, &lattice).and_then(|_| check_loop_periods(&params, &piece.frame, &lattice)) {
        fault = Some(e);
    }
    let mesh = if a.cell { SurfaceMesh::unit_cell(&patch, &piece, &lattice) } else { SurfaceMesh::fundamental_piece(&piece, &lattice) };
    export_mesh(&mesh, cfg.format, cfg.copies, &path).map_err(CmdError::Run)?;
    print_lattice(&mut w, &lattice.basis);
    let q = quality_report(&patch, &piece);
    let _ = writeln!(
        w,
        "census = {} vertical, {} horizontal\nplanarity = {:.3e}\nseam_mismatch = {:.3e}\ncell_circulation = {:.3e}\nnormal_continuity = {:.3e}\nmean_curvature_median = {:.6e}\neuler_characteristic = {}",
        q.vertical_curves, q.horizontal_curves, q.planarity, q.seam_mismatch, q.path_residual, q.normal_continuity, q.mean_curvature_median, q.euler_characteristic
    );
    let _ = writeln!(w, "wrote {} vertices, {} faces to {}", mesh.vertices.len() * cfg.copies.0 * cfg.copies.1 * cfg.copies.2, mesh.faces.len() * cfg.copies.0 * cfg.copies.1 * cfg.copies.2, path.display());
    if let Some(e) = fault {
        let _ = writeln!(w, "closure fault: {e}");
        out.write_all(w.as_bytes()).ok();
        return Ok(EXIT_CLOSURE);
    }
    out.write_all(w.as_bytes()).ok();
    Ok(EXIT_OK)
}

fn cmd_limits(cfg: &RunConfig, out: &mut dyn std::io::Write) -> Result<i32, CmdError> {
    let mut w = String::new();
    let sched = scherk_schedule(1e-1, 1e-3, cfg.points, cfg.tol)?;
    let mut sg = Vec::new();
    for p in &sched {
        let g = scherk_gap(&p.params, &scherk_samples())?.max_gap();
        let _ = writeln!(w, "scherk a={} b={} x={} gap={}", sci(p.params.a()), sci(p.params.b()), sci(p.params.x()), sci(g));
        sg.push(g);
    }
    let curve = trace_family_curve::<f64>(&TraceOptions { tol: cfg.tol, ..TraceOptions::default() })?;
    let mut hg = Vec::new();
    for p in hw_schedule(&curve, cfg.points) {
        let g = hw_gap(&p, Some((curve.a_star, curve.b_star)), &hw_samples())?.max_gap();
        let _ = writeln!(w, "hw a={} b={} x={} gap={}", sci(p.a()), sci(p.b()), sci(p.x()), sci(g));
        hg.push(g);
    }
    let (ok_s, ok_h) = (strictly_decreasing(&sg), strictly_decreasing(&hg));
    let _ = writeln!(w, "scherk_trend {}\nhw_trend {}", status(ok_s), status(ok_h));
    out.write_all(w.as_bytes()).ok();
    Ok(if ok_s && ok_h { EXIT_OK } else { EXIT_FAILED })
}

fn status(ok: bool) -> &'static str {
    if ok {
        "pass"
    } else {
        "FAIL"
    }
}

/// One line of the verification summary.
#[derive(Debug, Clone, PartialEq)]
pub struct CheckLine {
    pub name: String,
    pub passed: bool,
    pub worst: f64,
}

fn check(name: &str, passed: bool, worst: f64) -> CheckLine {
    CheckLine { name: name.into(), passed, worst }
}

fn run_check(name: &str, f: impl FnOnce() -> Result<(bool, f64), Error>) -> CheckLine {
    match f() {
        Ok((ok, worst)) => check(name, ok, worst),
        Err(_) => check(name, false, f64::NAN),
    }
}

/// The invariant suite behind `verify`; `flip_delta_sign` injects a sign error into the additivity check.
pub fn verify_suite(flip_delta_sign: bool) -> Vec<CheckLine> {
    let qt = QUAD_TOL;
    let mut lines = Vec::new();
    lines.push(run_check("involution_table", || {
        let p = make_params(0.3, 0.81, 0.5)?;
        let r = involution_table_check(&p, 32, 1e-9);
        let worst = r.rows.iter().map(|w| w.worst_g.max(w.worst_dh)).fold(0.0, f64::max);
        Ok((r.passed(), worst))
    }));
    lines.push(run_check("circle_identities", || {
        let r = circle_identities_check::<f64>(10, 10);
        Ok((r.passed(1e-10), r.arg_sine.max(r.im_cubic).max(r.half_factorisation).max(r.t0_residual)))
    }));
    lines.push(run_check("quadrature_self_test", || {
        let tol = Tolerance::new(1e-13, 1e-13);
        let e1 = (integrate(|t: f64| t.powf(-0.75), 0.0, 1.0, Endpoints::power_law(-0.75, 0.0), tol)?.value - 4.0).abs();
        let e2 = (integrate(|t: f64| (1.0 - t).powf(-0.5), 0.0, 1.0, Endpoints::power_law(0.0, -0.5), tol)?.value - 2.0).abs();
        let sq = [Complex::new(1.0, 1.0), Complex::new(-1.0, 1.0), Complex::new(-1.0, -1.0), Complex::new(1.0, -1.0), Complex::new(1.0, 1.0)];
        let e3 = (integrate_path(|z: Complex<f64>| z.inv(), &sq, tol)?.value - Complex::new(0.0, 2.0 * std::f64::consts::PI)).norm();
        let worst = e1.max(e2).max(e3);
        Ok((worst < 1e-11, worst))
    }));
    lines.push(run_check("additivity_grid", || {
        let mut worst = 0.0f64;
        for a in [0.2, 0.4, 0.6] {
            for bf in [0.3, 0.7] {
                for x in [0.2, 0.5, 0.8] {
                    let p = make_params(a, a + bf * (1.0 - a), x)?;
                    let d = if flip_delta_sign { -i_delta(&p, qt)? } else { i_delta(&p, qt)? };
                    worst = worst.max((d - i_gamma(&p, qt)? - i_sigma(&p, qt)?).abs());
                }
            }
        }
        Ok((worst <= 3.0 * 1e-11, worst))
    }));
    lines.push(run_check("monotonicity_grid", || {
        let h = 1e-4;
        let mut ok = true;
        let mut worst = f64::INFINITY;
        for a in [0.2, 0.4, 0.6] {
            for bf in [0.3, 0.6, 0.9] {
                for x in [0.2, 0.5, 0.8] {
                    let b = a + bf * (1.0 - a);
                    let f = |b: f64, x: f64| -> Result<f64, Error> { Ok(i_gamma(&make_params(a, b, x)?, qt)?) };
                    let dx = f(b, x + h)? - f(b, x - h)?;
                    let db = f(b + h, x)? - f(b - h, x)?;
                    ok &= dx > 0.0 && db < 0.0;
                    worst = worst.min(dx).min(-db);
                }
            }
        }
        Ok((ok, worst))
    }));
    lines.push(run_check("limit_signs", || {
        let mut worst = f64::INFINITY;
        for k in 1..=9 {
            let a = 0.1 * k as f64 - 0.05;
            worst = worst.min(i_gamma_limit_b1(a, 1.0, qt)?).min(i_gamma_limit_ba(a, 0.0, qt)?);
        }
        Ok((worst > 0.0, worst))
    }));
    lines.push(run_check("alpha_above_half", || {
        let al = alpha(1e-12)?;
        Ok((al > 0.5 && al < 1.0 && i_gamma_limit_b1(0.5, 0.0, qt)? < 0.0, al))
    }));
    lines.push(run_check("scherk_trend", || {
        let s = scherk_schedule(1e-1, 1e-3, 3, 1e-10)?;
        let g: Vec<f64> = s.iter().map(|p| scherk_gap(&p.params, &scherk_samples()).map(|r| r.max_gap())).collect::<Result<_, _>>()?;
        Ok((strictly_decreasing(&g), *g.last().unwrap()))
    }));
    lines.push(run_check("hw_trend", || {
        let c = trace_family_curve::<f64>(&TraceOptions::default())?;
        let g: Vec<f64> = hw_schedule(&c, 5)
            .iter()
            .map(|p| hw_gap(p, Some((c.a_star, c.b_star)), &hw_samples()).map(|r| r.max_gap()))
            .collect::<Result<_, _>>()
            ?;
        Ok((strictly_decreasing(&g), *g.last().unwrap()))
    }));
    lines
}

fn cmd_verify(a: &VerifyArgs, out: &mut dyn std::io::Write) -> Result<i32, CmdError> {
    let lines = verify_suite(a.flip_delta_sign);
    let mut w = String::new();
    for l in &lines {
        let _ = writeln!(w, "{} {} {:.3e}", l.name, status(l.passed), l.worst);
    }
    let ok = lines.iter().all(|l| l.passed);
    let _ = writeln!(w, "summary {}", status(ok));
    out.write_all(w.as_bytes()).ok();
    Ok(if ok { EXIT_OK } else { EXIT_FAILED })
}
