use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_subfinsler"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

/// Fresh scratch directory per test.
fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("subfinsler-cli-{}-{name}", std::process::id()));
    let _ = fs::remove_dir_all(&dir);
    fs::create_dir_all(&dir).unwrap();
    dir
}

fn polygon_file(dir: &Path, vertices: &str) -> String {
    let path = dir.join("polygon.json");
    fs::write(&path, format!("{{\"vertices\": {vertices}}}")).unwrap();
    path.to_str().unwrap().to_string()
}

fn assert_one_line_error(o: &Output, kind: &str) {
    assert_eq!(o.status.code(), Some(2), "{}", stderr(o));
    let err = stderr(o);
    assert_eq!(err.lines().count(), 1, "{err}");
    assert!(err.starts_with(&format!("error: {kind}: ")), "{err}");
}

#[test]
fn geom_reports_isoperimetrix_constants() {
    let dir = scratch("geom");
    let file = polygon_file(&dir, "[[1,0],[1,1],[0,1],[-1,0],[-1,-1],[0,-1]]");
    let o = run(&["--polygon", &file, "geom"]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["iso_area"].as_f64(), Some(3.0));
    assert_eq!(v["iso_perimeter"].as_f64(), Some(6.0));
    assert_eq!(v["unit_iso_area"].as_f64(), Some(0.0833333333333));
    assert_eq!(v["vertices"].as_array().unwrap().len(), 6);
}

#[test]
fn invalid_polygons_exit_with_the_error_kind() {
    let dir = scratch("invalid");
    let clockwise = polygon_file(&dir, "[[1,0],[0,-1],[-1,0],[0,1]]");
    assert_one_line_error(&run(&["--polygon", &clockwise, "geom"]), "WrongOrientation");
    let tiny = polygon_file(&dir, "[[1,0],[-1,0]]");
    assert_one_line_error(&run(&["--polygon", &tiny, "geom"]), "TooFewVertices");
    assert_one_line_error(&run(&["--polygon", "/nonexistent/p.json", "geom"]), "Io");
    assert_one_line_error(&run(&["dist", "--point", "1,2"]), "InvalidArgument");
    assert_one_line_error(&run(&["horo", "eval", "--point", "0,0,0"]), "InvalidArgument");
}

#[test]
fn dist_prints_twelve_digits_and_writes_the_geodesic() {
    let o = run(&["dist", "--point", "0,0,1"]);
    assert_eq!(stdout(&o).trim(), "3.46410161514");
    assert_eq!(stdout(&run(&["dist", "--point", "0,0,0"])).trim(), "0");

    let dir = scratch("dist");
    let csv = dir.join("path.csv");
    let o = run(&["dist", "--point", "0.3,-0.4,0.2", "--path", csv.to_str().unwrap()]);
    assert!(o.status.success(), "{}", stderr(&o));
    let text = fs::read_to_string(&csv).unwrap();
    assert!(text.starts_with("index,x,y,z\n"));
    let last: Vec<f64> = text.lines().last().unwrap().split(',').skip(1).map(|s| s.parse().unwrap()).collect();
    for (got, want) in last.iter().zip([0.3, -0.4, 0.2]) {
        assert!((got - want).abs() <= 1e-6, "{last:?}");
    }
}

#[test]
fn sphere_mesh_groups_and_determinism() {
    let dir = scratch("mesh");
    let obj = dir.join("sphere.obj");
    let o = run(&["sphere-mesh", "--samples", "8", "--out", obj.to_str().unwrap()]);
    assert!(o.status.success(), "{}", stderr(&o));
    let text = fs::read_to_string(&obj).unwrap();
    let groups: Vec<&str> = text.lines().filter(|l| l.starts_with("g ")).collect();
    assert_eq!(groups.iter().filter(|g| g.ends_with("_wall")).count(), 6);
    assert!(groups.iter().any(|g| g.ends_with("_ceiling")));
    assert!(groups.iter().any(|g| g.ends_with("_basement")));
    assert!(text.contains("mtllib sphere.mtl"));
    assert!(dir.join("sphere.mtl").exists());
    // the hexagon sphere peaks at (2/3, 2/3, 1/6), above the pole height 1/12
    assert!(stdout(&o).contains("z_min=-0.166666666667 z_max=0.166666666667"), "{}", stdout(&o));

    let again = dir.join("again.obj");
    run(&["sphere-mesh", "--samples", "8", "--out", again.to_str().unwrap()]);
    let replay = fs::read_to_string(&again).unwrap().replace("again.mtl", "sphere.mtl");
    assert_eq!(text, replay);
}

#[test]
fn horo_eval_orbit_and_atlas() {
    let o = run(&["horo", "eval", "--family", "psi_vee", "--i", "1", "--s", "0.5", "--a", "0", "--point", "0,2,0"]);
    assert_eq!(stdout(&o).trim(), "-1", "{}", stderr(&o));
    let o = run(&["horo", "eval", "--norm-type", "0.3,0.2", "--point", "0,0,0"]);
    assert_eq!(stdout(&o).trim(), "0");

    let o = run(&["horo", "orbit", "--norm-type", "0.5,-0.25", "--point", "1,0,0"]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["image"]["variant"], "norm_type");
    assert_eq!(v["image"]["w"], serde_json::json!([1.5, -0.25]));
    let o = run(&["horo", "orbit", "--linear", "1,0", "--point", "-1,2,3"]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["image"], v["input"]);
    assert_eq!(v["busemann"], true);

    let dir = scratch("atlas");
    let (svg, json) = (dir.join("atlas.svg"), dir.join("atlas.json"));
    let o = run(&["horo", "atlas", "--out", svg.to_str().unwrap(), "--report", json.to_str().unwrap()]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert_eq!(fs::read_to_string(&svg).unwrap().matches("<g id=\"chart_").count(), 6);
    let v: serde_json::Value = serde_json::from_str(&fs::read_to_string(&json).unwrap()).unwrap();
    assert_eq!(v["charts"], 6);
}

#[test]
fn verify_eikonal_and_action_pass_deterministically() {
    let dir = scratch("verify");
    let (a, b) = (dir.join("a.csv"), dir.join("b.csv"));
    for out in [&a, &b] {
        let o = run(&["verify", "eikonal", "--samples", "200", "--seed", "7", "--out", out.to_str().unwrap()]);
        assert!(o.status.success());
        assert!(stdout(&o).starts_with("eikonal: PASS"), "{}", stdout(&o));
    }
    assert_eq!(fs::read(&a).unwrap(), fs::read(&b).unwrap());

    let report = dir.join("action.json");
    let o = run(&["verify", "action", "--report", report.to_str().unwrap()]);
    assert!(o.status.success(), "{}", stdout(&o));
    let v: serde_json::Value = serde_json::from_str(&fs::read_to_string(&report).unwrap()).unwrap();
    assert_eq!(v["busemann_finite_orbits"], 6);
    assert_eq!(v["partition_mismatches"], 0);
}

#[test]
fn verify_pansu_passes_on_a_small_sample() {
    let o = run(&["verify", "pansu", "--samples", "50"]);
    assert!(o.status.success(), "{}", stdout(&o));
    assert!(stdout(&o).starts_with("pansu: PASS rows=400"), "{}", stdout(&o));
}

#[test]
fn verify_vertical_reports_a_failed_verdict_with_exit_one() {
    let o = run(&["verify", "vertical", "--samples", "2", "--grid", "2,0.5"]);
    assert_eq!(o.status.code(), Some(1), "{}", stdout(&o));
    assert!(stdout(&o).starts_with("vertical: FAIL"), "{}", stdout(&o));
    assert!(stdout(&o).contains("monotone=true"));
}

#[test]
fn verify_blowup_on_a_coarse_window() {
    let dir = scratch("blowup");
    let report = dir.join("blowup.json");
    let o = run(&[
        "--polygon",
        &polygon_file(&dir, "[[1,0],[0,1],[-1,0],[0,-1]]"),
        "verify",
        "blowup",
        "--grid",
        "1,0.25",
        "--eps-schedule",
        "0.0625,0.0000152587890625",
        "--report",
        report.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", stdout(&o));
    let v: serde_json::Value = serde_json::from_str(&fs::read_to_string(&report).unwrap()).unwrap();
    assert_eq!(v["cases"].as_array().unwrap().len(), 37);
    assert_eq!(v["eps"].as_array().unwrap().len(), 13);
}
