//! Batch command-line front end.
//!
//! Every command reads curve or domain JSON, runs one computation and
//! writes a JSON report (stdout or `--out`) and, for route tables, a CSV
//! table with the columns `route,value,err,n,runtime_ms`.  Reports embed
//! the content hash of every input and contain no timing, so identical
//! inputs, options and seeds give byte-identical JSON.
//!
//! Exit status: 0 on success, 1 when a computation fails, 2 for invalid
//! input or options (a JSON error object is written to stderr), and 3 when
//! the run completed but raised a numerical-reliability warning.

use crate::curve::{ClosedCurve, Vec3};
use crate::domain::PlanarDomain;
use crate::error::{Error, Result};
use crate::ig::{chords, circles, lines3, MCEstimate};
use crate::io::{self, Document, Input};
use crate::moebius::{invariance_suite, Functional, Subject};
use crate::planar::{self, ContourForm, CutoffForm};
use crate::space;
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};
use std::io::Write;
use std::path::PathBuf;
use std::time::Instant;

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILED: i32 = 1;
pub const EXIT_INVALID: i32 = 2;
pub const EXIT_WARNING: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "moebius", version, about = "Moebius-invariant energies of curves and planar domains")]
pub struct Cli {
    /// Worker threads; overrides the MOEBIUS_THREADS environment variable.
    #[arg(long, global = true, env = "MOEBIUS_THREADS")]
    pub threads: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Energy of a planar domain or a space curve by several routes.
    #[command(subcommand)]
    Energy(EnergyCmd),
    /// Planar potential, mutual energies and route tables.
    #[command(subcommand)]
    Planar(PlanarCmd),
    /// Writhe, mutual energy and route tables for space curves.
    #[command(subcommand)]
    Space(SpaceCmd),
    /// Monte Carlo integral geometry over circles, lines and chords.
    #[command(subcommand)]
    Ig(IgCmd),
    /// Empirical invariance under random admissible Moebius maps.
    Invariance(InvarianceArgs),
    /// Write the bundled example curves and domains.
    Corpus(CorpusArgs),
}

#[derive(Debug, Subcommand)]
pub enum EnergyCmd {
    Planar(RouteArgs),
    Space(RouteArgs),
}

#[derive(Debug, Subcommand)]
pub enum PlanarCmd {
    /// Renormalized potential at interior points and its boundary expansion.
    Potential(PotentialArgs),
    /// Mutual energy of two disjoint planar curves or domains.
    Mutual(MutualArgs),
    /// Route comparison table as CSV on stdout.
    Routes(RouteArgs),
}

#[derive(Debug, Subcommand)]
pub enum SpaceCmd {
    Writhe(WritheArgs),
    Mutual(MutualArgs),
    /// Route comparison table as CSV on stdout.
    Routes(RouteArgs),
}

#[derive(Debug, Subcommand)]
pub enum IgCmd {
    /// Circle-measure estimators of the energy and of the hits measure.
    Circles(CirclesArgs),
    /// Calibrated line-measure identity for one curve or a pair.
    Lines(LinesArgs),
    /// Linked-circle measure `f(r)` from the chord distribution.
    Chords(ChordsArgs),
}

#[derive(Debug, Args)]
pub struct Output {
    /// JSON report path; stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// CSV table path, for commands that produce one.
    #[arg(long)]
    pub csv: Option<PathBuf>,
    /// Write 0 in the runtime_ms column.
    #[arg(long)]
    pub no_timing: bool,
}

#[derive(Debug, Args)]
pub struct RouteArgs {
    /// Curve or domain JSON file.
    #[arg(long = "in")]
    pub input: PathBuf,
    /// Comma-separated routes, or `all`.
    #[arg(long, default_value = "all")]
    pub routes: String,
    /// Seed for Monte Carlo routes.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Samples for Monte Carlo routes.
    #[arg(long, default_value_t = 1_000_000)]
    pub samples: u64,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Debug, Args)]
pub struct PotentialArgs {
    #[arg(long = "in")]
    pub input: PathBuf,
    /// Interior point `x,y`; repeatable.
    #[arg(long = "at", value_parser = parse_point)]
    pub points: Vec<(f64, f64)>,
    /// Boundary point `index:t` for the boundary expansion; repeatable.
    #[arg(long = "profile", value_parser = parse_profile)]
    pub profiles: Vec<(usize, f64)>,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Debug, Args)]
pub struct MutualArgs {
    /// One file holding two curves, or two files; repeatable.
    #[arg(long = "in", required = true)]
    pub inputs: Vec<PathBuf>,
    /// Seed for the Monte Carlo cross-check (space only).
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long, default_value_t = 1_000_000)]
    pub samples: u64,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Debug, Args)]
pub struct WritheArgs {
    #[arg(long = "in")]
    pub input: PathBuf,
    /// Projection directions for the crossing-count cross-check; 0 skips it.
    #[arg(long, default_value_t = 0)]
    pub directions: usize,
    /// Polygon segments for the crossing count.
    #[arg(long, default_value_t = 2048)]
    pub segments: usize,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Debug, Args)]
pub struct CirclesArgs {
    #[arg(long = "in")]
    pub input: PathBuf,
    #[arg(long)]
    pub seed: u64,
    #[arg(long, default_value_t = 1_000_000)]
    pub samples: u64,
    /// Radii `ε` of the hits-measure check.
    #[arg(long, value_delimiter = ',')]
    pub eps: Vec<f64>,
    /// Also run the cutoff-ladder diagnostic.
    #[arg(long)]
    pub ladder: bool,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Debug, Args)]
pub struct LinesArgs {
    #[arg(long = "in", required = true)]
    pub inputs: Vec<PathBuf>,
    #[arg(long)]
    pub seed: u64,
    #[arg(long, default_value_t = 1_000_000)]
    pub samples: u64,
    /// Samples of the calibration run on coaxial circles.
    #[arg(long, default_value_t = 1_000_000)]
    pub calibration_samples: u64,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Debug, Args)]
pub struct ChordsArgs {
    #[arg(long = "in")]
    pub input: PathBuf,
    /// Circle radii.
    #[arg(long, value_delimiter = ',', required = true)]
    pub radii: Vec<f64>,
    /// Seed of the fixed-radius Monte Carlo cross-check; omitted skips it.
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long, default_value_t = 1_000_000)]
    pub samples: u64,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Debug, Args)]
pub struct InvarianceArgs {
    /// planar-K, planar-E, space-E, writhe or mutual.
    #[arg(long)]
    pub functional: String,
    #[arg(long = "in", required = true)]
    pub inputs: Vec<PathBuf>,
    #[arg(long, default_value_t = 20)]
    pub trials: usize,
    #[arg(long)]
    pub seed: u64,
    /// Allowed deviation relative to `1 + |value|`.
    #[arg(long, default_value_t = 1e-3)]
    pub threshold: f64,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Debug, Args)]
pub struct CorpusArgs {
    /// Directory for the JSON files.
    #[arg(long, default_value = "corpus")]
    pub dir: PathBuf,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum PlanarRoute {
    Potential,
    Tangent,
    Nt,
    Direct,
    Dots,
    Coscos,
    Segments,
    Chord,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum SpaceRoute {
    Direct,
    Coscos,
    Dots,
    Parallel,
    Mc,
}

fn parse_point(s: &str) -> std::result::Result<(f64, f64), String> {
    let (x, y) = s.split_once(',').ok_or("expected x,y")?;
    Ok((x.trim().parse().map_err(|e| format!("{e}"))?, y.trim().parse().map_err(|e| format!("{e}"))?))
}

fn parse_profile(s: &str) -> std::result::Result<(usize, f64), String> {
    let (i, t) = s.split_once(':').ok_or("expected index:t")?;
    Ok((i.trim().parse().map_err(|e| format!("{e}"))?, t.trim().parse().map_err(|e| format!("{e}"))?))
}

fn parse_routes<R: ValueEnum + Copy>(list: &str) -> Result<Vec<R>> {
    if list.trim() == "all" {
        return Ok(R::value_variants().to_vec());
    }
    list.split(',')
        .map(|s| R::from_str(s.trim(), true).map_err(|_| Error::Config(format!("unknown route '{}'", s.trim()))))
        .collect()
}

fn route_name<R: ValueEnum>(r: &R) -> String {
    r.to_possible_value().map(|v| v.get_name().to_string()).unwrap_or_default()
}

/// One row of a route comparison table.
#[derive(Debug, Clone, Serialize)]
pub struct RouteRow {
    pub route: String,
    /// `E_omega` or `E_K`.
    pub quantity: &'static str,
    pub value: f64,
    pub err: f64,
    pub n: u64,
    #[serde(skip)]
    pub runtime_ms: u128,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<Value>,
}

/// Accumulates results, warnings and the tables of one command.
struct Report {
    command: &'static str,
    inputs: Vec<Value>,
    config: Value,
    results: Value,
    rows: Vec<RouteRow>,
    notes: Vec<String>,
    warnings: Vec<String>,
}

impl Report {
    fn new(command: &'static str, inputs: &[&Input], config: Value) -> Self {
        Report {
            command,
            inputs: inputs.iter().map(|i| json!({ "path": i.path, "sha256": i.sha })).collect(),
            config,
            results: Value::Null,
            rows: Vec::new(),
            notes: Vec::new(),
            warnings: Vec::new(),
        }
    }

    fn to_json(&self) -> Value {
        let mut v = json!({
            "tool": "moebius",
            "version": env!("CARGO_PKG_VERSION"),
            "command": self.command,
            "inputs": self.inputs,
            "config": self.config,
            "warnings": self.warnings,
            "notes": self.notes,
        });
        if !self.rows.is_empty() {
            v["routes"] = serde_json::to_value(&self.rows).expect("rows serialize");
        }
        if !self.results.is_null() {
            v["results"] = self.results.clone();
        }
        v
    }

    fn timed<T: Serialize>(&mut self, route: &str, quantity: &'static str, f: impl FnOnce() -> Result<(T, f64, f64, u64)>) {
        let start = Instant::now();
        match f() {
            Ok((detail, value, err, n)) => {
                let detail = serde_json::to_value(&detail).ok();
                self.rows.push(RouteRow {
                    route: route.to_string(),
                    quantity,
                    value,
                    err,
                    n,
                    runtime_ms: start.elapsed().as_millis(),
                    detail,
                });
            }
            Err(e) => self.warnings.push(format!("route {route} failed: {e}")),
        }
    }
}

fn write_rows(rows: &[RouteRow], no_timing: bool, sink: &mut dyn Write) -> Result<()> {
    let mut w = csv::Writer::from_writer(sink);
    w.write_record(["route", "value", "err", "n", "runtime_ms"])?;
    for r in rows {
        let ms = if no_timing { 0 } else { r.runtime_ms };
        w.write_record([r.route.clone(), format!("{:e}", r.value), format!("{:e}", r.err), r.n.to_string(), ms.to_string()])?;
    }
    w.flush()?;
    Ok(())
}

fn emit(report: &Report, output: &Output, csv_to_stdout: bool, stdout: &mut dyn Write) -> Result<i32> {
    let text = io::to_pretty(&report.to_json())?;
    if let Some(path) = &output.out {
        std::fs::write(path, &text)?;
    } else if !csv_to_stdout {
        stdout.write_all(text.as_bytes())?;
    }
    if let Some(path) = &output.csv {
        let mut f = std::fs::File::create(path)?;
        write_rows(&report.rows, output.no_timing, &mut f)?;
    }
    if csv_to_stdout {
        write_rows(&report.rows, output.no_timing, stdout)?;
    }
    Ok(if report.warnings.is_empty() { EXIT_OK } else { EXIT_WARNING })
}

fn positive(name: &str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::Config(format!("{name} must be positive, got {v}")))
    }
}

fn positive_count(name: &str, v: u64) -> Result<()> {
    positive(name, v as f64)
}

fn planar_routes(args: &RouteArgs, command: &'static str) -> Result<Report> {
    let input = io::read_input(&args.input)?;
    let domain = input.document.domain()?;
    let routes: Vec<PlanarRoute> = parse_routes(&args.routes)?;
    positive_count("samples", args.samples)?;
    let config = json!({ "routes": routes.iter().map(route_name).collect::<Vec<_>>(), "seed": args.seed, "samples": args.samples });
    let mut rep = Report::new(command, &[&input], config);
    let boundaries = domain.boundaries();
    for r in routes {
        let name = route_name(&r);
        match r {
            PlanarRoute::Potential => rep.timed(&name, "E_omega", || {
                let f = planar::domain_energy(&domain)?;
                let (v, e, n) = (f.value, f.error_estimate, f.ladder.len() as u64);
                Ok((f, v, e, n))
            }),
            PlanarRoute::Tangent => {
                if !domain.is_simply_connected() {
                    rep.notes.push("tangent route skipped: the domain is not simply connected".into());
                    continue;
                }
                rep.timed(&name, "E_omega", || {
                    let t = planar::tangent_circle_energy(&domain)?;
                    let (v, e, n) = (t.value, t.integral.error, t.integral.n as u64);
                    Ok((t, v, e, n))
                })
            }
            PlanarRoute::Nt => {
                let Some(seed) = args.seed else {
                    rep.notes.push("nt route skipped: it needs --seed".into());
                    continue;
                };
                rep.timed(&name, "E_K", || {
                    let t = planar::nt_energy(&domain, args.samples, seed)?;
                    let (v, e) = (t.value, t.std_error);
                    Ok((t, v, e, args.samples))
                })
            }
            PlanarRoute::Direct => rep.timed(&name, "E_K", || {
                let e = planar::curve_energy(&boundaries)?;
                Ok((e, e.value, e.error, e.n as u64))
            }),
            PlanarRoute::Dots | PlanarRoute::Coscos => {
                let form = if r == PlanarRoute::Dots { CutoffForm::Dots } else { CutoffForm::Coscos };
                rep.timed(&name, "E_K", || {
                    let c = planar::curve_energy_cutoff(&boundaries, form)?;
                    let (v, e, n) = (c.e_curve, c.fit.error_estimate, c.fit.ladder.len() as u64);
                    Ok((c, v, e, n))
                })
            }
            PlanarRoute::Segments => rep.timed(&name, "E_K", || {
                let e = planar::segment_energy(&boundaries)?;
                Ok((e, e.value, e.error, e.n as u64))
            }),
            PlanarRoute::Chord => {
                let convex = domain.is_simply_connected() && boundaries[0].curvature_range().0 >= 0.0;
                if !convex {
                    rep.notes.push("chord route skipped: the domain is not convex".into());
                    continue;
                }
                rep.timed(&name, "E_K", || {
                    let e = planar::convex_chord_energy(&domain)?;
                    Ok((e, e.value, e.error, e.n as u64))
                })
            }
        };
    }
    let chi = domain.euler_characteristic();
    rep.results = json!({
        "euler_characteristic": chi,
        "relation_offset": std::f64::consts::PI.powi(2) * chi as f64 / 4.0,
        "perimeter": domain.perimeter(),
        "area": domain.area(),
    });
    Ok(rep)
}

fn space_routes(args: &RouteArgs, command: &'static str) -> Result<Report> {
    let input = io::read_input(&args.input)?;
    let curves: Vec<ClosedCurve> = input.document.curves().iter().map(|c| c.to_space()).collect();
    let refs: Vec<&ClosedCurve> = curves.iter().collect();
    let routes: Vec<SpaceRoute> = parse_routes(&args.routes)?;
    positive_count("samples", args.samples)?;
    let config = json!({ "routes": routes.iter().map(route_name).collect::<Vec<_>>(), "seed": args.seed, "samples": args.samples });
    let mut rep = Report::new(command, &[&input], config);
    for r in routes {
        let name = route_name(&r);
        let report = |e: space::EnergyReport| {
            let (v, err, n) = (e.value, e.error, e.n as u64);
            Ok((e, v, err, n))
        };
        match r {
            SpaceRoute::Direct => rep.timed(&name, "E_K", || report(space::space_energy(&refs)?)),
            SpaceRoute::Coscos => rep.timed(&name, "E_K", || report(space::space_energy_cutoff(&refs, CutoffForm::Coscos)?)),
            SpaceRoute::Dots => rep.timed(&name, "E_K", || report(space::space_energy_cutoff(&refs, CutoffForm::Dots)?)),
            SpaceRoute::Parallel => {
                let [k] = refs.as_slice() else {
                    rep.notes.push("parallel route skipped: it needs a single curve".into());
                    continue;
                };
                rep.timed(&name, "E_K", || report(space::space_energy_parallel(k)?))
            }
            SpaceRoute::Mc => {
                let Some(seed) = args.seed else {
                    rep.notes.push("mc route skipped: it needs --seed".into());
                    continue;
                };
                rep.timed(&name, "E_K", || {
                    let e = circles::mc_energy_circles(&refs, args.samples, seed)?;
                    Ok((e, e.mean, e.std_error, e.n_samples))
                })
            }
        };
    }
    let warnings: Vec<String> = rep
        .rows
        .iter()
        .filter_map(|r| r.detail.as_ref()?.get("warnings")?.as_array().cloned())
        .flatten()
        .filter_map(|w| w.as_str().map(String::from))
        .collect();
    rep.warnings.extend(warnings);
    Ok(rep)
}

fn read_pair(paths: &[PathBuf]) -> Result<(Vec<Input>, ClosedCurve, ClosedCurve, Vec<Document>)> {
    let inputs: Vec<Input> = paths.iter().map(|p| io::read_input(p)).collect::<Result<_>>()?;
    let docs: Vec<Document> = inputs.iter().map(|i| i.document.clone()).collect();
    let curves: Vec<ClosedCurve> = match docs.as_slice() {
        [d] => d.curves(),
        [a, b] => {
            let (ca, cb) = (a.curves(), b.curves());
            if ca.len() != 1 || cb.len() != 1 {
                return Err(Error::Schema("each mutual-energy input must hold one curve".into()));
            }
            vec![ca[0].clone(), cb[0].clone()]
        }
        _ => return Err(Error::Config("give one file with two curves or two files".into())),
    };
    let [a, b] = <[ClosedCurve; 2]>::try_from(curves)
        .map_err(|_| Error::Schema("a pair of curves is required".into()))?;
    Ok((inputs, a, b, docs))
}

fn planar_mutual(args: &MutualArgs) -> Result<Report> {
    let (inputs, a, b, docs) = read_pair(&args.inputs)?;
    if !a.is_planar() || !b.is_planar() {
        return Err(Error::Schema("planar mutual energy needs planar curves".into()));
    }
    let refs: Vec<&Input> = inputs.iter().collect();
    let mut rep = Report::new("planar mutual", &refs, json!({}));
    for (name, form) in [("rere", ContourForm::Rere), ("imim", ContourForm::Imim), ("dots", ContourForm::Dots)] {
        rep.timed(name, "E_mutual", || {
            let e = planar::mutual_energy_contour(&a, &b, form)?;
            Ok((e, e.value, e.error, e.n as u64))
        });
    }
    let domains: Option<(PlanarDomain, PlanarDomain)> = match docs.as_slice() {
        [_] => PlanarDomain::simple(a.clone()).ok().zip(PlanarDomain::simple(b.clone()).ok()),
        [x, y] => x.domain().ok().zip(y.domain().ok()),
        _ => None,
    };
    if let Some((d1, d2)) = domains {
        rep.timed("area", "E_mutual", || {
            let e = planar::mutual_energy_area(&d1, &d2)?;
            Ok((e, e.value, e.error, e.n as u64))
        });
        rep.timed("theta", "E_mutual", || {
            let e = planar::pair_theta_energy(&d1, &d2)?;
            let (v, err, n) = (e.value, e.integral.error, e.integral.n as u64);
            Ok((e, v, err, n))
        });
    }
    Ok(rep)
}

fn planar_potential(args: &PotentialArgs) -> Result<Report> {
    let input = io::read_input(&args.input)?;
    let domain = input.document.domain()?;
    let config = json!({ "points": args.points, "profiles": args.profiles });
    let mut rep = Report::new("planar potential", &[&input], config);
    let eval = planar::PotentialEvaluator::new(&domain);
    let mut values = Vec::new();
    for &(x, y) in &args.points {
        let w = Vec3::new(x, y, 0.0);
        let v = eval.eval(&w)?;
        let (_, _, dist, _) = domain.nearest_boundary(&w);
        if eval.saturated(dist) {
            rep.warnings.push(format!("({x}, {y}) is close to the boundary; the value is less accurate"));
        }
        values.push(json!({ "point": [x, y], "value": v, "distance": dist }));
    }
    let profiles: Vec<planar::PotentialProfile> =
        args.profiles.iter().map(|&(i, t)| planar::potential_asymptotics(&domain, i, t)).collect::<Result<_>>()?;
    rep.results = json!({ "potential": values, "profiles": profiles });
    Ok(rep)
}

fn space_writhe(args: &WritheArgs) -> Result<Report> {
    let input = io::read_input(&args.input)?;
    let [k] = <[ClosedCurve; 1]>::try_from(input.document.curves())
        .map_err(|_| Error::Schema("writhe needs a single curve".into()))?;
    let config = json!({ "directions": args.directions, "segments": args.segments });
    let mut rep = Report::new("space writhe", &[&input], config);
    let k = k.to_space();
    rep.timed("torus", "W", || {
        let w = space::writhe(&k)?;
        let (v, e, n) = (w.value, w.error, w.n as u64);
        Ok((w, v, e, n))
    });
    if args.directions > 0 {
        rep.timed("projection", "W", || {
            let w = space::projection_writhe(&k, args.directions, args.segments)?;
            let (v, e, n) = (w.value, w.error, args.directions as u64);
            Ok((w, v, e, n))
        });
    }
    Ok(rep)
}

fn space_mutual(args: &MutualArgs) -> Result<Report> {
    let (inputs, a, b, _) = read_pair(&args.inputs)?;
    let (a, b) = (a.to_space(), b.to_space());
    let refs: Vec<&Input> = inputs.iter().collect();
    let mut rep = Report::new("space mutual", &refs, json!({ "seed": args.seed, "samples": args.samples }));
    rep.timed("quadrature", "E_mutual", || {
        let m = space::mutual_energy_space(&a, &b)?;
        let (v, e, n) = (m.value, m.error, m.n as u64);
        Ok((m, v, e, n))
    });
    if let Some(seed) = args.seed {
        positive_count("samples", args.samples)?;
        rep.timed("mc", "E_mutual", || {
            let e = circles::mc_mutual_circles(&a, &b, args.samples, seed)?;
            Ok((e, e.mean, e.std_error, e.n_samples))
        });
    }
    let lk = space::linking_number(&a, &b)?;
    rep.results = json!({ "linking_number": lk, "distance": a.distance_to(&b) });
    Ok(rep)
}

fn ig_circles(args: &CirclesArgs) -> Result<Report> {
    let input = io::read_input(&args.input)?;
    let curves: Vec<ClosedCurve> = input.document.curves().iter().map(|c| c.to_space()).collect();
    let refs: Vec<&ClosedCurve> = curves.iter().collect();
    positive_count("samples", args.samples)?;
    for &e in &args.eps {
        positive("eps", e)?;
    }
    let config = json!({ "seed": args.seed, "samples": args.samples, "eps": args.eps, "ladder": args.ladder });
    let mut rep = Report::new("ig circles", &[&input], config);
    let energy = circles::mc_energy_circles(&refs, args.samples, args.seed)?;
    let length: f64 = curves.iter().map(|c| c.arclength()).sum();
    let diam = crate::cutoff::system_diameter(&refs);
    let hits: Vec<Value> = args
        .eps
        .iter()
        .enumerate()
        .map(|(i, &eps)| {
            let est = circles::hits_measure(&refs, eps, 1e3 * diam, args.samples, args.seed.wrapping_add(1 + i as u64))?;
            let exact = 2.0 * std::f64::consts::PI.powi(2) * length / eps;
            Ok(json!({ "eps": eps, "estimate": est, "leading_term": exact, "z": est.z_score(exact) }))
        })
        .collect::<Result<_>>()?;
    let ladder = if args.ladder { Some(circles::mc_energy_ladder(&refs, args.samples, args.seed)?) } else { None };
    rep.results = json!({ "energy": energy, "hits": hits, "ladder": ladder });
    Ok(rep)
}

fn ig_lines(args: &LinesArgs) -> Result<Report> {
    let inputs: Vec<Input> = args.inputs.iter().map(|p| io::read_input(p)).collect::<Result<_>>()?;
    let curves: Vec<ClosedCurve> = inputs.iter().flat_map(|i| i.document.curves()).map(|c| c.to_space()).collect();
    positive_count("samples", args.samples)?;
    positive_count("calibration-samples", args.calibration_samples)?;
    let refs: Vec<&Input> = inputs.iter().collect();
    let config = json!({ "seed": args.seed, "samples": args.samples, "calibration_samples": args.calibration_samples });
    let mut rep = Report::new("ig lines", &refs, config);
    let cal = lines3::calibrate_line_measure(args.calibration_samples, args.seed)?;
    let check = match curves.as_slice() {
        [k] => lines3::bp_lines_check(k, None, &cal, args.samples, args.seed.wrapping_add(1))?,
        [k1, k2] => lines3::bp_lines_check(k1, Some(k2), &cal, args.samples, args.seed.wrapping_add(1))?,
        _ => return Err(Error::Schema("give one curve or a pair".into())),
    };
    if check.z_score() > 3.0 {
        rep.warnings.push(format!("identity residual is {:.2} standard errors", check.z_score()));
    }
    rep.results = json!({ "calibration": cal, "check": check, "z": check.z_score() });
    Ok(rep)
}

/// Row of the `f(r)` table.
#[derive(Debug, Clone, Serialize)]
pub struct ChordRow {
    pub r: f64,
    pub f: f64,
    pub mc: Option<f64>,
    pub stderr: Option<f64>,
}

fn ig_chords(args: &ChordsArgs, stdout: &mut dyn Write) -> Result<i32> {
    let input = io::read_input(&args.input)?;
    let [k] = <[ClosedCurve; 1]>::try_from(input.document.curves())
        .map_err(|_| Error::Schema("chord distributions need a single curve".into()))?;
    for &r in &args.radii {
        positive("radius", r)?;
    }
    positive_count("samples", args.samples)?;
    let config = json!({ "radii": args.radii, "seed": args.seed, "samples": args.samples });
    let mut rep = Report::new("ig chords", &[&input], config);
    let mut rows = Vec::new();
    for (i, &r) in args.radii.iter().enumerate() {
        let f = chords::dcb_radius_measure(&k, r)?;
        let mc: Option<MCEstimate> = match args.seed {
            Some(seed) => Some(circles::linked_measure_fixed_radius(&k, r, args.samples, seed.wrapping_add(i as u64))?),
            None => None,
        };
        if let Some(m) = mc.filter(|m| m.z_score(f) > 3.0) {
            rep.warnings.push(format!("r = {r}: Monte Carlo differs by {:.2} standard errors", m.z_score(f)));
        }
        rows.push(ChordRow { r, f, mc: mc.map(|m| m.mean), stderr: mc.map(|m| m.std_error) });
    }
    let limit = chords::chord_limit(&k)?;
    rep.results = json!({ "table": rows, "small_chord_limit": limit });
    let text = io::to_pretty(&rep.to_json())?;
    match &args.output.out {
        Some(p) => std::fs::write(p, text)?,
        None => stdout.write_all(text.as_bytes())?,
    }
    if let Some(p) = &args.output.csv {
        let mut w = csv::Writer::from_path(p)?;
        for row in &rows {
            w.serialize(row)?;
        }
        w.flush()?;
    }
    Ok(if rep.warnings.is_empty() { EXIT_OK } else { EXIT_WARNING })
}

fn invariance(args: &InvarianceArgs) -> Result<Report> {
    let f: Functional = args.functional.parse()?;
    positive("threshold", args.threshold)?;
    positive_count("trials", args.trials as u64)?;
    let inputs: Vec<Input> = args.inputs.iter().map(|p| io::read_input(p)).collect::<Result<_>>()?;
    let subject = match (f, inputs.as_slice()) {
        (Functional::PlanarE, [i]) => Subject::Domain(i.document.domain()?),
        (Functional::PlanarK, [i]) if matches!(i.document, Document::Domain(_)) => Subject::Domain(i.document.domain()?),
        (Functional::PlanarK, _) => Subject::Curves(inputs.iter().flat_map(|i| i.document.curves()).collect()),
        _ => Subject::Curves(inputs.iter().flat_map(|i| i.document.curves()).map(|c| c.to_space()).collect()),
    };
    let refs: Vec<&Input> = inputs.iter().collect();
    let config = json!({ "functional": f, "trials": args.trials, "seed": args.seed, "threshold": args.threshold });
    let mut rep = Report::new("invariance", &refs, config);
    let r = invariance_suite(f, &subject, args.trials, args.seed)?;
    let bound = args.threshold * (1.0 + r.base_value.abs());
    if r.max_deviation >= bound {
        rep.warnings.push(format!("max deviation {:e} exceeds {:e}", r.max_deviation, bound));
    }
    if r.trials.len() < args.trials {
        rep.warnings.push(format!("only {} of {} trials produced an admissible image", r.trials.len(), args.trials));
    }
    rep.results = json!({ "bound": bound, "passed": r.max_deviation < bound, "report": r });
    Ok(rep)
}

fn corpus(args: &CorpusArgs) -> Result<Report> {
    std::fs::create_dir_all(&args.dir)?;
    let mut files = Vec::new();
    for (name, doc) in crate::corpus::all() {
        let text = io::to_pretty(&doc.to_json()?)?;
        let path = args.dir.join(format!("{name}.json"));
        std::fs::write(&path, &text)?;
        files.push(json!({ "name": name, "path": path.display().to_string(), "sha256": io::content_hash(text.as_bytes()) }));
    }
    let mut rep = Report::new("corpus", &[], json!({ "dir": args.dir.display().to_string() }));
    rep.results = json!({ "files": files });
    Ok(rep)
}

fn dispatch(cli: &Cli, stdout: &mut dyn Write) -> Result<i32> {
    match &cli.command {
        Command::Energy(EnergyCmd::Planar(a)) => emit(&planar_routes(a, "energy planar")?, &a.output, false, stdout),
        Command::Energy(EnergyCmd::Space(a)) => emit(&space_routes(a, "energy space")?, &a.output, false, stdout),
        Command::Planar(PlanarCmd::Routes(a)) => emit(&planar_routes(a, "planar routes")?, &a.output, true, stdout),
        Command::Planar(PlanarCmd::Potential(a)) => emit(&planar_potential(a)?, &a.output, false, stdout),
        Command::Planar(PlanarCmd::Mutual(a)) => emit(&planar_mutual(a)?, &a.output, false, stdout),
        Command::Space(SpaceCmd::Writhe(a)) => emit(&space_writhe(a)?, &a.output, false, stdout),
        Command::Space(SpaceCmd::Mutual(a)) => emit(&space_mutual(a)?, &a.output, false, stdout),
        Command::Space(SpaceCmd::Routes(a)) => emit(&space_routes(a, "space routes")?, &a.output, true, stdout),
        Command::Ig(IgCmd::Circles(a)) => emit(&ig_circles(a)?, &a.output, false, stdout),
        Command::Ig(IgCmd::Lines(a)) => emit(&ig_lines(a)?, &a.output, false, stdout),
        Command::Ig(IgCmd::Chords(a)) => ig_chords(a, stdout),
        Command::Invariance(a) => emit(&invariance(a)?, &a.output, false, stdout),
        Command::Corpus(a) => emit(&corpus(a)?, &a.output, false, stdout),
    }
}

fn is_input_error(e: &Error) -> bool {
    matches!(e, Error::Schema(_) | Error::Config(_) | Error::Io(_) | Error::Json(_) | Error::Csv(_))
}

/// Machine-readable error object written to stderr.
pub fn error_json(e: &Error) -> String {
    json!({ "error": { "kind": e.kind(), "message": e.to_string() } }).to_string()
}

/// Run a parsed command line, writing reports to `stdout` and errors to `stderr`.
pub fn run(cli: &Cli, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32 {
    if let Some(t) = cli.threads {
        if t == 0 {
            let _ = writeln!(stderr, "{}", error_json(&Error::Config("--threads must be positive".into())));
            return EXIT_INVALID;
        }
        // a global pool may already exist when called repeatedly in one process
        let _ = rayon::ThreadPoolBuilder::new().num_threads(t).build_global();
    }
    match dispatch(cli, stdout) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(stderr, "{}", error_json(&e));
            if is_input_error(&e) {
                EXIT_INVALID
            } else {
                EXIT_FAILED
            }
        }
    }
}

/// Parse `args` (including the program name) and run.
pub fn main_with_args<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    match Cli::try_parse_from(args) {
        Ok(cli) => run(&cli, stdout, stderr),
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INVALID } else { EXIT_OK };
            let _ = if e.use_stderr() {
                writeln!(stderr, "{}", json!({ "error": { "kind": "usage", "message": e.to_string() } }))
            } else {
                write!(stdout, "{e}")
            };
            code
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_args(args: &[&str]) -> (i32, String, String) {
        let (mut out, mut err) = (Vec::new(), Vec::new());
        let code = main_with_args(std::iter::once("moebius").chain(args.iter().copied()), &mut out, &mut err);
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    fn temp_dir(tag: &str) -> PathBuf {
        let d = std::env::temp_dir().join(format!("moebius-cli-{tag}-{}", std::process::id()));
        std::fs::create_dir_all(&d).unwrap();
        d
    }

    #[test]
    fn corpus_then_disk_routes() {
        let dir = temp_dir("disk");
        let d = dir.to_str().unwrap();
        let (code, _, err) = run_args(&["corpus", "--dir", d]);
        assert_eq!(code, 0, "{err}");
        let disk = dir.join("disk.json");
        let (code, csv, err) = run_args(&["planar", "routes", "--in", disk.to_str().unwrap(), "--routes", "potential,direct,chord", "--no-timing"]);
        assert_eq!(code, 0, "{err}");
        let mut lines = csv.lines();
        assert_eq!(lines.next(), Some("route,value,err,n,runtime_ms"));
        let vals: Vec<f64> = lines.map(|l| l.split(',').nth(1).unwrap().parse().unwrap()).collect();
        let pi2 = std::f64::consts::PI.powi(2);
        assert!((vals[0] - 0.75 * pi2).abs() < 1e-4);
        assert!((vals[1] - 0.5 * pi2).abs() < 1e-8);
        assert!((vals[2] - 0.5 * pi2).abs() < 1e-4);
    }

    #[test]
    fn reports_are_byte_identical() {
        let dir = temp_dir("bytes");
        let c = dir.join("c.json");
        std::fs::write(&c, io::to_pretty(&io::CurveJson::from_curve(&crate::corpus::unit_circle_space())).unwrap()).unwrap();
        let args = ["energy", "space", "--in", c.to_str().unwrap(), "--routes", "direct,mc", "--seed", "5", "--samples", "4000"];
        let a = run_args(&args);
        let b = run_args(&args);
        assert_eq!(a.0, 0, "{}", a.2);
        assert_eq!(a.1, b.1);
        let v: Value = serde_json::from_str(&a.1).unwrap();
        assert_eq!(v["inputs"][0]["sha256"].as_str().unwrap(), io::content_hash(&std::fs::read(&c).unwrap()));
    }

    #[test]
    fn invalid_inputs_exit_with_two() {
        let dir = temp_dir("bad");
        let bad = dir.join("bad.json");
        std::fs::write(&bad, r#"{"dimension":5}"#).unwrap();
        let (code, _, err) = run_args(&["energy", "planar", "--in", bad.to_str().unwrap()]);
        assert_eq!(code, EXIT_INVALID);
        let v: Value = serde_json::from_str(err.trim()).unwrap();
        assert_eq!(v["error"]["kind"], "schema");
        let (code, _, _) = run_args(&["energy", "space", "--in", bad.to_str().unwrap(), "--routes", "nonsense"]);
        assert_eq!(code, EXIT_INVALID);
        let (code, _, _) = run_args(&["ig", "circles", "--in", "x.json"]);
        assert_eq!(code, EXIT_INVALID, "seed is mandatory");
    }
}
