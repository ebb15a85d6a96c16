//! The `locon` command line.
//!
//! Exit codes: 0 success, 1 validation or invariant failure, 2 numeric
//! failure (singularity, refinement, step guard), 3 parse error.

pub mod config;
pub mod io;
pub mod spec;

use std::ffi::OsString;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::PathBuf;
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use clap::{Args, Parser, Subcommand};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use crate::atlas::{cocycle, exactness_test, Atlas, ChartId, ClassifyOptions, PotentialSet, CONSTANCY_TOL, DEFAULT_OVERLAP_SAMPLES};
use crate::bundle::TransitionSystem;
use crate::cover::{continue_log, lift_samples, LogGerm};
use crate::dynamics::{energy_ledger, simulate, Integrator, SimConfig, SimStatus, Trajectory};
use crate::error::{Error, Result};
use crate::fields::{is_closed, winding_number, work, FieldOneForm, Rect};
use crate::forms3;
use crate::geom::Vec2;
use crate::quad::Rule;
use crate::verify;

use config::{AtlasSpec, FieldSpec, ScenarioConfig};
use spec::{parse_eval_point, parse_list, parse_path, parse_point};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INVALID: i32 = 1;
pub const EXIT_NUMERIC: i32 = 2;
pub const EXIT_PARSE: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "locon", version, about = "Mechanics of locally conservative force fields")]
pub struct Cli {
    /// JSON scenario file; flags override its fields.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Omit wall-clock metadata so repeated runs are byte-identical.
    #[arg(long, global = true)]
    pub deterministic: bool,
    /// Worker threads for sweep entries.
    #[arg(long, global = true, default_value_t = 1)]
    pub jobs: usize,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Default, Args)]
pub struct FieldArgs {
    /// Built-in name (vortex, radial-exact, x-dy, zero) or `fx,fy` expressions.
    #[arg(long, allow_hyphen_values = true)]
    pub field: Option<String>,
    /// Singular point `x,y` of an expression field (repeatable).
    #[arg(long = "singular", allow_hyphen_values = true)]
    pub singular: Vec<String>,
}

#[derive(Debug, Clone, Default, Args)]
pub struct AtlasArgs {
    /// `quadrant` or `single:x,y`.
    #[arg(long)]
    pub atlas: Option<String>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Hodge star table and vector-calculus identity residuals on E³.
    FormsTable {
        #[arg(long, default_value_t = 100)]
        samples: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, default_value_t = forms3::DEFAULT_H)]
        h: f64,
    },
    /// Finite-difference test of df = 0 on a grid.
    CheckClosed {
        #[command(flatten)]
        field: FieldArgs,
        /// `x0,y0,x1,y1`
        #[arg(long, default_value = "0.25,0.25,2,2", allow_hyphen_values = true)]
        region: String,
        #[arg(long, default_value_t = 20)]
        grid: usize,
        #[arg(long, default_value_t = 1e-5)]
        h: f64,
        #[arg(long, default_value_t = 1e-5)]
        tol: f64,
    },
    /// Line integral of the field along a path.
    Work {
        #[command(flatten)]
        field: FieldArgs,
        /// `circle:cx,cy,r,turns`, `poly:x1,y1;x2,y2;...` or `param:xexpr,yexpr,t0,t1,N`.
        #[arg(long, allow_hyphen_values = true)]
        path: String,
        /// trapezoid, simpson or gaussN
        #[arg(long, default_value = "simpson")]
        rule: Rule,
    },
    /// Winding number of a closed path about a point.
    Winding {
        #[arg(long, allow_hyphen_values = true)]
        path: String,
        #[arg(long, default_value = "0,0", allow_hyphen_values = true)]
        about: String,
    },
    /// Local potentials on the atlas.
    Potentials {
        #[command(flatten)]
        field: FieldArgs,
        #[command(flatten)]
        atlas: AtlasArgs,
        /// `x,y@chart` (repeatable).
        #[arg(long, allow_hyphen_values = true)]
        eval: Vec<String>,
    },
    /// Overlap differences of the local potentials and the exactness test.
    Cocycle {
        #[command(flatten)]
        field: FieldArgs,
        #[command(flatten)]
        atlas: AtlasArgs,
        #[arg(long, default_value_t = DEFAULT_OVERLAP_SAMPLES)]
        samples: usize,
        #[arg(long, default_value_t = CONSTANCY_TOL)]
        tol: f64,
    },
    /// Exact, closed-not-exact or not closed.
    Classify {
        #[command(flatten)]
        field: FieldArgs,
        #[command(flatten)]
        atlas: AtlasArgs,
    },
    /// Transition functions, holonomy and triviality.
    Bundle {
        #[command(flatten)]
        field: FieldArgs,
        #[command(flatten)]
        atlas: AtlasArgs,
        /// Chart cycle such as `1,2,3,4,1` (repeatable).
        #[arg(long)]
        cycle: Vec<String>,
    },
    /// Integrate the motion and keep the per-chart energy ledger.
    Simulate(SimulateArgs),
    /// Lift a trajectory CSV to the universal cover.
    Lift {
        #[arg(long)]
        traj: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, default_value_t = 0, allow_hyphen_values = true)]
        initial_sheet: i64,
        /// Center the angle column was accumulated about.
        #[arg(long, default_value = "0,0", allow_hyphen_values = true)]
        center: String,
    },
    /// Continue a germ of log along a path.
    LogContinue {
        #[arg(long, allow_hyphen_values = true)]
        from: String,
        #[arg(long, default_value_t = 0, allow_hyphen_values = true)]
        sheet: i64,
        #[arg(long, allow_hyphen_values = true)]
        path: String,
    },
    /// Run the built-in vortex acceptance suite.
    Verify {
        /// Print the report as JSON instead of a table.
        #[arg(long)]
        json: bool,
    },
}

#[derive(Debug, Clone, Default, Args)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub field: FieldArgs,
    #[command(flatten)]
    pub atlas: AtlasArgs,
    #[arg(long, allow_hyphen_values = true)]
    pub m: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub q0: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub p0: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub h: Option<f64>,
    /// Total time.
    #[arg(long = "T", allow_hyphen_values = true)]
    pub t_end: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub r_min: Option<f64>,
    /// leapfrog or rk4
    #[arg(long)]
    pub integrator: Option<Integrator>,
    /// Trajectory CSV path.
    #[arg(long)]
    pub out: Option<String>,
    /// Transition log path (default `<out stem>.transitions.json`).
    #[arg(long)]
    pub transitions: Option<String>,
    #[arg(long)]
    pub emit_svg: Option<String>,
    /// Write the trajectory CSV to stdout instead of the JSON summary.
    #[arg(long)]
    pub csv: bool,
    /// Step sizes of a sweep, e.g. `1e-3,5e-4`.
    #[arg(long)]
    pub sweep_h: Option<String>,
}

/// Runs the command line and returns the process exit code.
pub fn run<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            let text = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion | ErrorKind::DisplayHelpOnMissingArgumentOrSubcommand => {
                    let _ = out.write_all(text.as_bytes());
                    if e.kind() == ErrorKind::DisplayHelpOnMissingArgumentOrSubcommand {
                        EXIT_PARSE
                    } else {
                        EXIT_OK
                    }
                }
                _ => {
                    let _ = err.write_all(text.as_bytes());
                    EXIT_PARSE
                }
            };
        }
    };
    match dispatch(&cli, out, err) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            exit_code(&e)
        }
    }
}

pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Parse(_) | Error::Json(_) | Error::Csv(_) => EXIT_PARSE,
        e if e.is_numeric() => EXIT_NUMERIC,
        _ => EXIT_INVALID,
    }
}

struct Ctx<'a> {
    cli: &'a Cli,
    config: ScenarioConfig,
}

impl Ctx<'_> {
    fn field(&self, args: &FieldArgs) -> Result<FieldOneForm> {
        let singular = args.singular.iter().map(|s| parse_point(s)).collect::<Result<Vec<_>>>()?;
        match (&args.field, &self.config.field) {
            (Some(s), _) => FieldSpec::from_arg(s, &singular)?.build(),
            (None, Some(spec)) => spec.build(),
            (None, None) => Ok(FieldOneForm::vortex()),
        }
    }

    fn atlas(&self, args: &AtlasArgs, f: &FieldOneForm) -> Result<Atlas> {
        match (&args.atlas, &self.config.atlas) {
            (Some(s), _) => AtlasSpec::from_arg(s)?.build(&f.singular_points),
            (None, Some(spec)) => spec.build(&f.singular_points),
            (None, None) => Ok(Atlas::quadrant()),
        }
    }

    fn metadata(&self) -> Option<String> {
        if self.cli.deterministic {
            return None;
        }
        let secs = SystemTime::now().duration_since(UNIX_EPOCH).map_or(0, |d| d.as_secs());
        Some(format!("locon {} generated at unix time {secs}", env!("CARGO_PKG_VERSION")))
    }
}

fn print_json(out: &mut dyn Write, v: &impl Serialize) -> Result<()> {
    serde_json::to_writer_pretty(&mut *out, v)?;
    writeln!(out)?;
    Ok(())
}

fn dispatch(cli: &Cli, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32> {
    let config = match &cli.config {
        Some(p) => ScenarioConfig::load(p)?,
        None => ScenarioConfig::default(),
    };
    let ctx = Ctx { cli, config };
    match &cli.command {
        Command::FormsTable { samples, seed, h } => {
            let r = forms3::identity_residuals(*samples, *seed, *h)?;
            print_json(out, &json!({ "star_table": forms3::star_table(), "residuals": r }))?;
        }
        Command::CheckClosed { field, region, grid, h, tol } => {
            let f = ctx.field(field)?;
            let v = parse_list(region)?;
            if v.len() != 4 {
                return Err(Error::invalid("region is `x0,y0,x1,y1`"));
            }
            print_json(out, &is_closed(&f, Rect::new(v[0], v[1], v[2], v[3]), *grid, *h, *tol)?)?;
        }
        Command::Work { field, path, rule } => {
            let f = ctx.field(field)?;
            let c = parse_path(path)?;
            let w = work(&f, &c, *rule)?;
            print_json(
                out,
                &json!({ "field": f.name, "path": path, "rule": rule, "segments": c.segments(), "work": w }),
            )?;
        }
        Command::Winding { path, about } => {
            let c = parse_path(path)?;
            let q = parse_point(about)?;
            print_json(out, &json!({ "path": path, "about": q, "winding": winding_number(&c, q)? }))?;
        }
        Command::Potentials { field, atlas, eval } => {
            let f = ctx.field(field)?;
            let at = ctx.atlas(atlas, &f)?;
            let ps = PotentialSet::build(&f, &at);
            let charts: Vec<Value> = at
                .charts
                .iter()
                .map(|c| json!({ "id": c.id, "label": c.label, "basepoint": c.basepoint, "gauge": 0.0 }))
                .collect();
            let evals = eval
                .iter()
                .map(|s| {
                    let (q, id) = parse_eval_point(s)?;
                    Ok(json!({ "chart": id, "q": q, "V": ps.eval(ChartId(id), q)? }))
                })
                .collect::<Result<Vec<_>>>()?;
            print_json(out, &json!({ "field": f.name, "charts": charts, "evaluations": evals }))?;
        }
        Command::Cocycle { field, atlas, samples, tol } => {
            let f = ctx.field(field)?;
            let at = ctx.atlas(atlas, &f)?;
            let cc = cocycle(&PotentialSet::build(&f, &at), &at, *samples, *tol)?;
            let ex = exactness_test(&cc)?;
            print_json(out, &json!({ "field": f.name, "cocycle": cc, "exactness": ex }))?;
        }
        Command::Classify { field, atlas } => {
            let f = ctx.field(field)?;
            let at = ctx.atlas(atlas, &f)?;
            print_json(out, &crate::atlas::classify(&f, &at, &ClassifyOptions::default())?)?;
        }
        Command::Bundle { field, atlas, cycle } => {
            let f = ctx.field(field)?;
            let at = ctx.atlas(atlas, &f)?;
            let ts = TransitionSystem::new(&cocycle(&PotentialSet::build(&f, &at), &at, DEFAULT_OVERLAP_SAMPLES, CONSTANCY_TOL)?)?;
            let holonomies = cycle
                .iter()
                .map(|s| {
                    let ids = s
                        .split(',')
                        .map(|t| t.trim().parse::<u32>().map(ChartId).map_err(|_| Error::invalid(format!("bad chart id `{t}`"))))
                        .collect::<Result<Vec<_>>>()?;
                    Ok(json!({ "cycle": ids, "holonomy": ts.holonomy(&ids)?, "log_holonomy": ts.log_holonomy(&ids)? }))
                })
                .collect::<Result<Vec<_>>>()?;
            let triv = ts.is_trivial()?;
            print_json(
                out,
                &json!({
                    "field": f.name,
                    "t_ij": ts.entries(),
                    "holonomies": holonomies,
                    "trivial": triv.trivial,
                    "triviality": triv,
                }),
            )?;
        }
        Command::Simulate(args) => return simulate_cmd(&ctx, args, out, err),
        Command::Lift { traj, out: path, initial_sheet, center } => {
            let rows = io::read_trajectory_csv(File::open(traj)?)?;
            let samples: Vec<(f64, Vec2, f64)> =
                rows.iter().map(|r| (r.t, Vec2::new(r.x, r.y), r.theta_acc)).collect();
            let lift = lift_samples(&samples, parse_point(center)?, *initial_sheet);
            let lrows = io::lift_rows(&lift)?;
            let meta = ctx.metadata();
            match path {
                Some(p) => {
                    let mut w = BufWriter::new(File::create(p)?);
                    io::write_lift_csv(&mut w, &lrows, meta.as_deref())?;
                    w.flush()?;
                    let (first, last) = (&lrows[0], &lrows[lrows.len() - 1]);
                    print_json(
                        out,
                        &json!({
                            "rows": lrows.len(),
                            "sheet_initial": first.sheet,
                            "sheet_final": last.sheet,
                            "v_change": last.v - first.v,
                            "out": p,
                        }),
                    )?;
                }
                None => io::write_lift_csv(&mut *out, &lrows, meta.as_deref())?,
            }
        }
        Command::LogContinue { from, sheet, path } => {
            let a = parse_point(from)?;
            let g = LogGerm::new(Complex64::new(a.x, a.y), *sheet)?;
            let end = continue_log(&g, &parse_path(path)?)?;
            print_json(out, &germ_json(&end, &g))?;
        }
        Command::Verify { json } => {
            let t = Instant::now();
            let report = verify::run_all(!cli.deterministic);
            if *json {
                print_json(out, &report)?;
            } else {
                out.write_all(report.table().as_bytes())?;
                writeln!(out, "overall: {}", if report.pass { "PASS" } else { "FAIL" })?;
                if !cli.deterministic {
                    writeln!(out, "# wall-clock {:.3} s", t.elapsed().as_secs_f64())?;
                }
            }
            if !report.pass {
                let _ = writeln!(err, "verify: some criteria failed");
                return Ok(EXIT_INVALID);
            }
        }
    }
    Ok(EXIT_OK)
}

fn germ_json(g: &LogGerm, start: &LogGerm) -> Value {
    let v = g.value();
    let d = v - start.value();
    json!({
        "anchor": [g.anchor.re, g.anchor.im],
        "sheet": g.sheet,
        "value": [v.re, v.im],
        "start": { "anchor": [start.anchor.re, start.anchor.im], "sheet": start.sheet },
        "value_change": [d.re, d.im],
    })
}

fn sim_config(ctx: &Ctx<'_>, args: &SimulateArgs) -> Result<SimConfig> {
    let f = ctx.field(&args.field)?;
    let at = ctx.atlas(&args.atlas, &f)?;
    let mut cfg = SimConfig::new(f, at);
    ctx.config.simulation.apply(&mut cfg);
    if let Some(v) = args.m {
        cfg.m = v;
    }
    if let Some(s) = &args.q0 {
        cfg.q0 = parse_point(s)?;
    }
    if let Some(s) = &args.p0 {
        cfg.p0 = parse_point(s)?;
    }
    if let Some(v) = args.h {
        cfg.h = v;
    }
    if let Some(v) = args.t_end {
        cfg.t_end = v;
    }
    if let Some(v) = args.r_min {
        cfg.r_min = v;
    }
    if let Some(v) = args.integrator {
        cfg.integrator = v;
    }
    cfg.validate()?;
    Ok(cfg)
}

#[derive(Serialize)]
struct RunSummary {
    field: String,
    integrator: Integrator,
    m: f64,
    h: f64,
    #[serde(rename = "T")]
    t_end: f64,
    steps: usize,
    status: SimStatus,
    final_state: Value,
    transitions: usize,
    ledger: Value,
}

fn summarize(cfg: &SimConfig, ps: &PotentialSet, tr: &Trajectory) -> RunSummary {
    let last = tr.last().expect("trajectory has its initial state");
    let ledger = cocycle(ps, &cfg.atlas, DEFAULT_OVERLAP_SAMPLES, CONSTANCY_TOL)
        .and_then(|cc| energy_ledger(tr, &cfg.field, &cc, 1e-6))
        .map_or_else(
            |e| json!({ "error": e.to_string() }),
            |l| {
                json!({
                    "segments": l.segments.len(),
                    "max_segment_drift": l.max_segment_drift,
                    "max_transition_residual": l.max_transition_residual,
                    "closed_loop": l.closed_loop,
                })
            },
        );
    RunSummary {
        field: cfg.field.name.clone(),
        integrator: cfg.integrator,
        m: cfg.m,
        h: cfg.h,
        t_end: cfg.t_end,
        steps: tr.states.len() - 1,
        status: tr.status.clone(),
        final_state: json!({
            "t": last.t,
            "q": last.q,
            "p": last.p,
            "chart": last.chart,
            "theta_acc": last.theta_acc,
            "p_theta": last.p_theta,
        }),
        transitions: tr.transitions.len(),
        ledger,
    }
}

fn simulate_cmd(ctx: &Ctx<'_>, args: &SimulateArgs, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32> {
    let cfg = sim_config(ctx, args)?;
    let ps = PotentialSet::build(&cfg.field, &cfg.atlas);

    let sweep = match &args.sweep_h {
        Some(s) => parse_list(s)?,
        None => ctx.config.sweep.as_ref().map(|s| s.h.clone()).unwrap_or_default(),
    };
    if !sweep.is_empty() {
        return sweep_cmd(ctx, &cfg, &ps, &sweep, out);
    }

    let tr = simulate(&cfg, &ps)?;
    let outputs = &ctx.config.outputs;
    let csv_path = args.out.clone().or_else(|| outputs.csv.clone());
    let meta = ctx.metadata();
    let mut written = serde_json::Map::new();
    if let Some(p) = &csv_path {
        let mut w = BufWriter::new(File::create(p)?);
        io::write_trajectory_csv(&mut w, &tr, meta.as_deref())?;
        w.flush()?;
        let side = args
            .transitions
            .clone()
            .or_else(|| outputs.transitions.clone())
            .unwrap_or_else(|| io::sidecar_path(p));
        let mut w = BufWriter::new(File::create(&side)?);
        serde_json::to_writer_pretty(&mut w, &io::TransitionLog { transitions: &tr.transitions })?;
        writeln!(w)?;
        w.flush()?;
        written.insert("csv".into(), json!(p));
        written.insert("transitions".into(), json!(side));
    }
    if let Some(p) = args.emit_svg.clone().or_else(|| outputs.svg.clone()) {
        std::fs::write(&p, io::trajectory_svg(&tr.positions(), &cfg.field.singular_points))?;
        written.insert("svg".into(), json!(p));
    }
    if args.csv {
        io::write_trajectory_csv(&mut *out, &tr, meta.as_deref())?;
    } else {
        let mut v = serde_json::to_value(summarize(&cfg, &ps, &tr))?;
        v["outputs"] = Value::Object(written);
        print_json(out, &v)?;
    }
    match &tr.status {
        SimStatus::Completed => Ok(EXIT_OK),
        SimStatus::Aborted { reason, numeric } => {
            writeln!(err, "simulation aborted: {reason}")?;
            Ok(if *numeric { EXIT_NUMERIC } else { EXIT_INVALID })
        }
    }
}

fn sweep_cmd(ctx: &Ctx<'_>, base: &SimConfig, ps: &PotentialSet, hs: &[f64], out: &mut dyn Write) -> Result<i32> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(ctx.cli.jobs.max(1))
        .build()
        .map_err(|e| Error::invalid(e.to_string()))?;
    let runs: Vec<Result<RunSummary>> = pool.install(|| {
        hs.par_iter()
            .map(|&h| {
                let mut cfg = base.clone();
                cfg.h = h;
                cfg.validate()?;
                let tr = simulate(&cfg, ps)?;
                Ok(summarize(&cfg, ps, &tr))
            })
            .collect()
    });
    let runs = runs.into_iter().collect::<Result<Vec<_>>>()?;
    let all_done = runs.iter().all(|r| r.status == SimStatus::Completed);
    print_json(out, &json!({ "sweep": runs }))?;
    Ok(if all_done { EXIT_OK } else { EXIT_NUMERIC })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn call(args: &[&str]) -> (i32, String, String) {
        let mut o = Vec::new();
        let mut e = Vec::new();
        let code = run(std::iter::once("locon").chain(args.iter().copied()), &mut o, &mut e);
        (code, String::from_utf8(o).unwrap(), String::from_utf8(e).unwrap())
    }

    #[test]
    fn work_and_winding() {
        let (code, out, _) = call(&["work", "--field", "vortex", "--path", "circle:0,0,1,1"]);
        assert_eq!(code, 0);
        let v: Value = serde_json::from_str(&out).unwrap();
        assert!((v["work"].as_f64().unwrap() - std::f64::consts::TAU).abs() < 1e-8);
        let (code, out, _) = call(&["winding", "--path", "circle:0,0,1,-2"]);
        assert_eq!(code, 0);
        let v: Value = serde_json::from_str(&out).unwrap();
        assert_eq!(v["winding"]["n"], -2);
    }

    #[test]
    fn exit_codes() {
        assert_eq!(call(&["work", "--field", "x+*y,1", "--path", "circle:0,0,1,1"]).0, EXIT_PARSE);
        assert_eq!(call(&["no-such-command"]).0, EXIT_PARSE);
        assert_eq!(call(&["winding", "--path", "poly:1,0;0,1"]).0, EXIT_INVALID);
        assert_eq!(call(&["work", "--path", "poly:-1,0;1,0"]).0, EXIT_NUMERIC);
        assert_eq!(call(&["--help"]).0, EXIT_OK);
    }

    #[test]
    fn bundle_report() {
        let (code, out, _) = call(&["bundle", "--field", "vortex", "--cycle", "1,2,3,4,1"]);
        assert_eq!(code, 0);
        let v: Value = serde_json::from_str(&out).unwrap();
        assert_eq!(v["trivial"], false);
        let hol = v["holonomies"][0]["holonomy"].as_f64().unwrap();
        assert!((hol / (-std::f64::consts::TAU).exp() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn log_continue_json() {
        let (code, out, _) = call(&["log-continue", "--from", "1,0", "--path", "circle:0,0,1,1"]);
        assert_eq!(code, 0);
        let v: Value = serde_json::from_str(&out).unwrap();
        assert_eq!(v["sheet"], 1);
        assert_eq!(v["value_change"][1].as_f64().unwrap(), std::f64::consts::TAU);
    }
}
