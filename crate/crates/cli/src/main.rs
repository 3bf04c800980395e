//! Command-line front end: geometry reports, distances, sphere meshes,
//! horofunction tools and the verification suites.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};
use subfinsler::blowup::{default_eps_schedule, halving_schedule, pansu_audit, GridWindow};
use subfinsler::distance::{d_e, geodesic};
use subfinsler::error::Error;
use subfinsler::format::fmt_num;
use subfinsler::heisenberg::HeisPoint;
use subfinsler::horo::{act, atlas, atlas_svg, is_busemann, Family, Horofunction, Member};
use subfinsler::mesh::sphere_mesh;
use subfinsler::plane::{Covector, Vec2};
use subfinsler::polygon::{fixtures, Polygon};
use subfinsler::verify;

#[derive(Parser)]
#[command(name = "subfinsler", version, about = "Polygonal sub-Finsler Heisenberg geometry")]
struct Cli {
    /// Geometry file `{"vertices": [[x, y], ...]}`. Defaults to the regular hexagon.
    #[arg(long, global = true)]
    polygon: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print the polygon, dual and isoperimetrix data as JSON.
    Geom {
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Distance from the identity, optionally with a geodesic as CSV.
    Dist {
        #[arg(long, value_parser = parse_point, allow_hyphen_values = true)]
        point: HeisPoint,
        #[arg(long, visible_alias = "out")]
        path: Option<PathBuf>,
    },
    /// Unit sphere as a Wavefront OBJ with a sibling MTL file.
    SphereMesh {
        #[arg(long, default_value_t = 32)]
        samples: usize,
        #[arg(long)]
        out: PathBuf,
    },
    /// Horofunction evaluation, atlas and group action.
    Horo {
        #[command(subcommand)]
        command: HoroCommand,
    },
    /// Run a verification suite; exits 1 when a verdict fails.
    Verify(VerifyArgs),
}

#[derive(Subcommand)]
enum HoroCommand {
    /// Evaluate a horofunction at `--point`.
    Eval {
        #[command(flatten)]
        spec: HoroSpec,
        #[arg(long, value_parser = parse_point, allow_hyphen_values = true)]
        point: HeisPoint,
    },
    /// Write the chart schematic (SVG) and the sampled atlas (JSON).
    Atlas {
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Act on a horofunction by the group element `--point`.
    Orbit {
        #[command(flatten)]
        spec: HoroSpec,
        #[arg(long, value_parser = parse_point, allow_hyphen_values = true)]
        point: HeisPoint,
    },
}

/// Exactly one of: `--family` with `--i --s --a`, `--norm-type`, `--linear`.
#[derive(Args)]
struct HoroSpec {
    /// psi_vee, psi_wedge, xi_vee or xi_wedge.
    #[arg(long)]
    family: Option<String>,
    /// Crease index, 1-based.
    #[arg(long)]
    i: Option<usize>,
    #[arg(long, allow_negative_numbers = true)]
    s: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    a: Option<f64>,
    #[arg(long, value_parser = parse_pair, allow_hyphen_values = true)]
    norm_type: Option<[f64; 2]>,
    #[arg(long, value_parser = parse_pair, allow_hyphen_values = true)]
    linear: Option<[f64; 2]>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Suite {
    Pansu,
    Vertical,
    Blowup,
    Eikonal,
    Action,
    All,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(value_enum)]
    suite: Suite,
    /// Sample count (pansu, eikonal) or number of offsets (vertical).
    #[arg(long)]
    samples: Option<usize>,
    /// Probe window `R,spacing`.
    #[arg(long, value_parser = parse_pair)]
    grid: Option<[f64; 2]>,
    /// Halving schedule from `a` down to `b`.
    #[arg(long, value_parser = parse_pair)]
    eps_schedule: Option<[f64; 2]>,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// CSV table; with `all`, one file per suite named `<stem>_<suite>.csv`.
    #[arg(long)]
    out: Option<PathBuf>,
    /// JSON summary.
    #[arg(long)]
    report: Option<PathBuf>,
}

enum Failure {
    Core(Error),
    Io(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Core(e)
    }
}

type CliResult<T> = Result<T, Failure>;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let text = e.to_string();
            let line = text.lines().next().unwrap_or("").trim_start_matches("error: ");
            eprintln!("error: InvalidArgument: {line}");
            return ExitCode::from(2);
        }
    };
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(Failure::Core(e)) => {
            eprintln!("error: {}: {}", e.kind(), e);
            ExitCode::from(2)
        }
        Err(Failure::Io(msg)) => {
            eprintln!("error: Io: {msg}");
            ExitCode::from(2)
        }
    }
}

/// Returns the verdict; only `verify` can return `false`.
fn run(cli: Cli) -> CliResult<bool> {
    let g = load_polygon(cli.polygon.as_deref())?;
    match cli.command {
        Command::Geom { out } => {
            let report = round_numbers(serde_json::to_value(&g).expect("polygon serializes"));
            emit(out.as_deref(), &pretty(&report))?;
        }
        Command::Dist { point, path } => {
            println!("{}", fmt_num(d_e(&g, point)));
            if let Some(path) = path {
                let geo = geodesic(&g, point)?;
                let mut w = csv::Writer::from_writer(Vec::new());
                w.write_record(["index", "x", "y", "z"]).map_err(csv_err)?;
                for (k, q) in geo.lifted.iter().enumerate() {
                    w.write_record([k.to_string(), fmt_num(q.x), fmt_num(q.y), fmt_num(q.z)]).map_err(csv_err)?;
                }
                write_file(&path, &w.into_inner().map_err(|e| Failure::Io(e.to_string()))?)?;
            }
        }
        Command::SphereMesh { samples, out } => {
            let mesh = sphere_mesh(&g, samples)?;
            let mtl = out.with_extension("mtl");
            let mtl_name = mtl.file_name().and_then(|n| n.to_str()).unwrap_or("sphere.mtl");
            write_file(&out, mesh.to_obj(mtl_name).as_bytes())?;
            write_file(&mtl, mesh.to_mtl().as_bytes())?;
            let (lo, hi) = mesh.z_range();
            println!(
                "vertices={} faces={} groups={} z_min={} z_max={}",
                mesh.vertices.len(),
                mesh.face_count(),
                mesh.groups.len(),
                fmt_num(lo),
                fmt_num(hi)
            );
        }
        Command::Horo { command } => horo(&g, command)?,
        Command::Verify(args) => return verify_cmd(&g, &args),
    }
    Ok(true)
}

fn horo(g: &Polygon, command: HoroCommand) -> CliResult<()> {
    match command {
        HoroCommand::Eval { spec, point } => {
            let h = spec.resolve(g)?;
            println!("{}", fmt_num(h.eval(point, g)));
        }
        HoroCommand::Atlas { out, report } => {
            write_file(&out, atlas_svg(g).as_bytes())?;
            if let Some(report) = report {
                let records: Vec<Value> = atlas(g)
                    .iter()
                    .map(|r| json!({"family": r.family, "i": r.i, "s": num(r.s), "a": num(r.a)}))
                    .collect();
                let body = json!({"charts": g.len(), "records": records});
                write_file(&report, pretty(&body).as_bytes())?;
            }
        }
        HoroCommand::Orbit { spec, point } => {
            let h = spec.resolve(g)?;
            let image = act(point, &h, g)?;
            let body = json!({
                "g": [num(point.x), num(point.y), num(point.z)],
                "input": horo_json(&h),
                "image": horo_json(&image),
                "busemann": is_busemann(&h, g),
            });
            print!("{}", pretty(&body));
        }
    }
    Ok(())
}

impl HoroSpec {
    fn resolve(&self, g: &Polygon) -> CliResult<Horofunction> {
        let given = [self.family.is_some(), self.norm_type.is_some(), self.linear.is_some()];
        if given.iter().filter(|&&b| b).count() != 1 {
            return Err(invalid("give exactly one of --family, --norm-type, --linear"));
        }
        if let Some([x, y]) = self.norm_type {
            return Ok(Horofunction::NormType { w: Vec2::new(x, y) });
        }
        if let Some([a, b]) = self.linear {
            return Ok(Horofunction::Linear { beta: Covector::new(a, b) });
        }
        let family = Family::parse(self.family.as_deref().unwrap_or_default())?;
        let (Some(i), Some(s), Some(a)) = (self.i, self.s, self.a) else {
            return Err(invalid("--family needs --i, --s and --a"));
        };
        if i == 0 || i > g.len() {
            return Err(invalid(&format!("--i must lie in 1..={}", g.len())));
        }
        Ok(Horofunction::two_piece(g, i - 1, family, s, a)?)
    }
}

/// Verdict, one summary line and the artefacts of one suite.
struct Outcome {
    name: &'static str,
    passed: bool,
    summary: String,
    csv: Vec<u8>,
    report: Value,
}

fn verify_cmd(g: &Polygon, args: &VerifyArgs) -> CliResult<bool> {
    let suites: Vec<Suite> = match args.suite {
        Suite::All => vec![Suite::Eikonal, Suite::Pansu, Suite::Vertical, Suite::Blowup, Suite::Action],
        s => vec![s],
    };
    let mut outcomes = Vec::new();
    for suite in suites {
        let o = run_suite(g, suite, args)?;
        println!("{}: {} {}", o.name, if o.passed { "PASS" } else { "FAIL" }, o.summary);
        outcomes.push(o);
    }
    if let Some(out) = &args.out {
        if outcomes.len() == 1 {
            write_file(out, &outcomes[0].csv)?;
        } else {
            for o in &outcomes {
                write_file(&suffixed(out, o.name), &o.csv)?;
            }
        }
    }
    let passed = outcomes.iter().all(|o| o.passed);
    if let Some(report) = &args.report {
        let body = if outcomes.len() == 1 {
            outcomes[0].report.clone()
        } else {
            json!({"passed": passed, "suites": outcomes.iter().map(|o| o.report.clone()).collect::<Vec<_>>()})
        };
        write_file(report, pretty(&body).as_bytes())?;
    }
    Ok(passed)
}

fn run_suite(g: &Polygon, suite: Suite, args: &VerifyArgs) -> CliResult<Outcome> {
    match suite {
        Suite::Eikonal => {
            let rep = verify::eikonal_suite(g, args.samples.unwrap_or(1000), args.seed)?;
            let max = rep.max_residual();
            let passed = max <= 1e-9;
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(["x", "y", "z", "residual"]).map_err(csv_err)?;
            for (p, r) in rep.points.iter().zip(&rep.residuals) {
                w.write_record([fmt_num(p.x), fmt_num(p.y), fmt_num(p.z), fmt_num(*r)]).map_err(csv_err)?;
            }
            Ok(Outcome {
                name: "eikonal",
                passed,
                summary: format!("samples={} max_residual={}", rep.points.len(), fmt_num(max)),
                csv: finish(w)?,
                report: json!({"suite": "eikonal", "passed": passed, "samples": rep.points.len(), "max_residual": num(max)}),
            })
        }
        Suite::Pansu => {
            let ladder = match args.eps_schedule {
                Some([a, b]) => halving_schedule(a, b)?,
                None => vec![1e-4, 5e-5],
            };
            let rep = pansu_audit(g, args.samples.unwrap_or(1000), &ladder, args.seed)?;
            let max = rep.max_error_at(0);
            let ratios: Vec<f64> = (0..ladder.len() - 1).flat_map(|k| rep.ratios(k)).collect();
            let lo = ratios.iter().copied().fold(f64::INFINITY, f64::min);
            let hi = ratios.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            let passed = max <= 1e-3 && rep.flagged() == 0 && ratios.iter().all(|r| (1.5..=3.0).contains(r));
            Ok(Outcome {
                name: "pansu",
                passed,
                summary: format!(
                    "rows={} max_error={} flagged={} ratio_min={} ratio_max={}",
                    rep.rows.len(),
                    fmt_num(max),
                    rep.flagged(),
                    fmt_num(lo),
                    fmt_num(hi)
                ),
                csv: rep.to_csv().into_bytes(),
                report: json!({
                    "suite": "pansu", "passed": passed, "rows": rep.rows.len(),
                    "eps": ladder.iter().map(|&e| num(e)).collect::<Vec<_>>(),
                    "max_error": num(max), "flagged": rep.flagged(),
                    "ratio_min": num(lo), "ratio_max": num(hi),
                }),
            })
        }
        Suite::Vertical => {
            let [r, spacing] = args.grid.unwrap_or([3.0, 0.25]);
            let probes = verify::ball_grid_probes(g, r, spacing)?;
            let s_values = [1e2, 1e3, 1e4];
            let cases = verify::vertical_suite(g, args.samples.unwrap_or(10), args.seed, &s_values, &probes)?;
            let worst = cases.iter().map(|c| *c.report.deviations.last().unwrap()).fold(0.0, f64::max);
            let monotone = cases.iter().all(|c| c.report.monotone);
            let passed = monotone && worst <= 1e-2;
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(["case", "wx", "wy", "s", "deviation"]).map_err(csv_err)?;
            for (k, c) in cases.iter().enumerate() {
                for (s, d) in c.report.s_values.iter().zip(&c.report.deviations) {
                    w.write_record([k.to_string(), fmt_num(c.w.x), fmt_num(c.w.y), fmt_num(*s), fmt_num(*d)])
                        .map_err(csv_err)?;
                }
            }
            let rows: Vec<Value> = cases
                .iter()
                .map(|c| {
                    json!({"w": [num(c.w.x), num(c.w.y)],
                           "deviations": c.report.deviations.iter().map(|&d| num(d)).collect::<Vec<_>>(),
                           "monotone": c.report.monotone})
                })
                .collect();
            Ok(Outcome {
                name: "vertical",
                passed,
                summary: format!("cases={} probes={} worst_final={} monotone={monotone}", cases.len(), probes.len(), fmt_num(worst)),
                csv: finish(w)?,
                report: json!({"suite": "vertical", "passed": passed, "probes": probes.len(),
                               "s": s_values.iter().map(|&s| num(s)).collect::<Vec<_>>(),
                               "threshold": num(1e-2), "worst_final": num(worst), "cases": rows}),
            })
        }
        Suite::Blowup => {
            let grid = match args.grid {
                Some([r, spacing]) => GridWindow::new(r, spacing, None)?,
                None => GridWindow::default(),
            };
            let eps = match args.eps_schedule {
                Some([a, b]) => halving_schedule(a, b)?,
                None => default_eps_schedule(),
            };
            let outcomes = verify::run_catalogue(g, &grid, &eps, 1e-2)?;
            let passed = outcomes.iter().all(|o| o.passed());
            let worst = outcomes.iter().map(|o| o.final_deviation()).fold(0.0, f64::max);
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(["class", "x", "y", "z", "member", "step", "eps", "deviation"]).map_err(csv_err)?;
            for o in &outcomes {
                let p = o.case.point;
                for (n, (e, d)) in o.eps.iter().zip(&o.deviations).enumerate() {
                    w.write_record([
                        o.case.class.name().to_string(),
                        fmt_num(p.x),
                        fmt_num(p.y),
                        fmt_num(p.z),
                        member_label(&o.case.member),
                        n.to_string(),
                        fmt_num(*e),
                        fmt_num(*d),
                    ])
                    .map_err(csv_err)?;
                }
            }
            let rows: Vec<Value> = outcomes
                .iter()
                .map(|o| {
                    json!({"class": o.case.class.name(), "point": [num(o.case.point.x), num(o.case.point.y), num(o.case.point.z)],
                           "member": member_label(&o.case.member), "predicted": horo_json(&o.case.predicted),
                           "final_deviation": num(o.final_deviation()), "trend_ok": o.trend_ok,
                           "lipschitz_ok": o.lipschitz_ok, "passed": o.passed()})
                })
                .collect();
            let failed = outcomes.iter().filter(|o| !o.passed()).count();
            Ok(Outcome {
                name: "blowup",
                passed,
                summary: format!("cases={} failed={failed} worst_final={}", outcomes.len(), fmt_num(worst)),
                csv: finish(w)?,
                report: json!({"suite": "blowup", "passed": passed, "grid": [num(grid.half_width), num(grid.spacing)],
                               "eps": eps.iter().map(|&e| num(e)).collect::<Vec<_>>(), "threshold": num(1e-2),
                               "worst_final": num(worst), "cases": rows}),
            })
        }
        Suite::Action => {
            let rep = verify::action_suite(g, args.seed)?;
            let passed = rep.linear_fixed <= 1e-9
                && rep.norm_translate <= 1e-9
                && rep.composition <= 1e-9
                && rep.busemann_finite_orbits == g.len()
                && rep.partition_mismatches == 0;
            let metrics = [
                ("linear_fixed", fmt_num(rep.linear_fixed)),
                ("norm_translate", fmt_num(rep.norm_translate)),
                ("composition", fmt_num(rep.composition)),
                ("busemann_finite_orbits", rep.busemann_finite_orbits.to_string()),
                ("expected_finite_orbits", g.len().to_string()),
                ("catalogue_size", rep.catalogue_size.to_string()),
                ("partition_mismatches", rep.partition_mismatches.to_string()),
            ];
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(["metric", "value"]).map_err(csv_err)?;
            for (k, v) in &metrics {
                w.write_record([*k, v.as_str()]).map_err(csv_err)?;
            }
            let summary = metrics.iter().map(|(k, v)| format!("{k}={v}")).collect::<Vec<_>>().join(" ");
            Ok(Outcome {
                name: "action",
                passed,
                summary,
                csv: finish(w)?,
                report: json!({"suite": "action", "passed": passed,
                               "linear_fixed": num(rep.linear_fixed), "norm_translate": num(rep.norm_translate),
                               "composition": num(rep.composition), "busemann_finite_orbits": rep.busemann_finite_orbits,
                               "expected_finite_orbits": g.len(), "catalogue_size": rep.catalogue_size,
                               "partition_mismatches": rep.partition_mismatches}),
            })
        }
        Suite::All => unreachable!("expanded by the caller"),
    }
}

fn member_label(m: &Member) -> String {
    match *m {
        Member::Only => "only".into(),
        Member::Norm { w } => format!("norm w=({} {})", fmt_num(w.x), fmt_num(w.y)),
        Member::Crease { i, c } => format!("crease i={} C={}", i + 1, fmt_num(c)),
    }
}

/// Reports use 1-based crease indices.
fn horo_json(h: &Horofunction) -> Value {
    match *h {
        Horofunction::Linear { beta } => json!({"variant": "linear", "beta": [num(beta.a), num(beta.b)]}),
        Horofunction::NormType { w } => json!({"variant": "norm_type", "w": [num(w.x), num(w.y)]}),
        Horofunction::TwoPiece { i, family, s, a } => {
            json!({"variant": "two_piece", "family": family.name(), "i": i + 1, "s": num(s), "a": num(a)})
        }
    }
}

/// A JSON number at 12 significant digits; non-finite values become strings.
fn num(x: f64) -> Value {
    let text = fmt_num(x);
    match text.parse::<f64>().ok().and_then(serde_json::Number::from_f64) {
        Some(n) if x.is_finite() => Value::Number(n),
        _ => Value::String(text),
    }
}

fn round_numbers(v: Value) -> Value {
    match v {
        Value::Number(n) if n.is_f64() => num(n.as_f64().unwrap_or(f64::NAN)),
        Value::Array(items) => Value::Array(items.into_iter().map(round_numbers).collect()),
        Value::Object(map) => Value::Object(map.into_iter().map(|(k, v)| (k, round_numbers(v))).collect()),
        other => other,
    }
}

fn pretty(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("json values serialize");
    s.push('\n');
    s
}

fn load_polygon(path: Option<&Path>) -> CliResult<Polygon> {
    match path {
        None => Ok(fixtures::hexagon()),
        Some(p) => {
            let text = fs::read_to_string(p).map_err(|e| Failure::Io(format!("cannot read {}: {e}", p.display())))?;
            Ok(Polygon::from_json(&text)?)
        }
    }
}

fn parse_floats<const N: usize>(s: &str) -> Result<[f64; N], String> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    if parts.len() != N {
        return Err(format!("expected {N} comma-separated numbers, got '{s}'"));
    }
    let mut out = [0.0f64; N];
    for (slot, part) in out.iter_mut().zip(parts) {
        *slot = part.parse().map_err(|_| format!("'{part}' is not a number"))?;
        if !slot.is_finite() {
            return Err(format!("'{part}' is not finite"));
        }
    }
    Ok(out)
}

fn parse_point(s: &str) -> Result<HeisPoint, String> {
    parse_floats::<3>(s).map(|[x, y, z]| HeisPoint::new(x, y, z))
}

fn parse_pair(s: &str) -> Result<[f64; 2], String> {
    parse_floats::<2>(s)
}

fn invalid(msg: &str) -> Failure {
    Failure::Core(Error::InvalidArgument(msg.into()))
}

fn csv_err(e: csv::Error) -> Failure {
    Failure::Io(e.to_string())
}

fn finish(w: csv::Writer<Vec<u8>>) -> CliResult<Vec<u8>> {
    w.into_inner().map_err(|e| Failure::Io(e.to_string()))
}

fn suffixed(path: &Path, suite: &str) -> PathBuf {
    let stem = path.file_stem().and_then(|s| s.to_str()).unwrap_or("verify");
    let ext = path.extension().and_then(|s| s.to_str()).unwrap_or("csv");
    path.with_file_name(format!("{stem}_{suite}.{ext}"))
}

fn write_file(path: &Path, bytes: &[u8]) -> CliResult<()> {
    fs::write(path, bytes).map_err(|e| Failure::Io(format!("cannot write {}: {e}", path.display())))
}

fn emit(out: Option<&Path>, text: &str) -> CliResult<()> {
    match out {
        Some(p) => write_file(p, text.as_bytes()),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}
