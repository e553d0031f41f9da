//! End-to-end runs of the `liefront` binary.

use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn data(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data").join(name).display().to_string()
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_liefront")).args(args).output().expect("binary runs")
}

fn json(out: &Output) -> Value {
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("report is JSON")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

#[test]
fn plane_has_no_singular_points() {
    let r = json(&run(&["classify", "--surface", &data("plane.surf"), "--grid", "11", "11"]));
    assert_eq!(r["points"].as_array().unwrap().len(), 0);
    assert_eq!(r["locus"].as_array().unwrap().len(), 0);
    assert!(r["matrixA"].is_null());
}

#[test]
fn cuspidal_edge_locus_is_the_u_axis() {
    let r = json(&run(&["classify", "--surface", &data("cuspidal_edge.surf"), "--grid", "21", "21"]));
    assert!(r["points"].as_array().unwrap().is_empty());
    let lines = r["locus"].as_array().unwrap();
    assert_eq!(lines.len(), 1);
    for s in lines[0].as_array().unwrap() {
        assert_eq!(s["class"], "CuspidalEdge");
        assert!(s["uv"][1].as_f64().unwrap().abs() <= 1e-10);
    }
}

#[test]
fn example_matrix_gives_one_swallowtail() {
    let r =
        json(&run(&["classify", "--surface", &data("parabolic_cylinder.surf"), "--matrix", &data("example_a.mat")]));
    let pts = r["points"].as_array().unwrap();
    assert_eq!(pts.len(), 1);
    assert_eq!(pts[0]["class"], "Swallowtail");
    assert_eq!(pts[0]["method"], "Both");
    assert_eq!(pts[0]["rank"], 1);
}

#[test]
fn reports_are_byte_stable() {
    let args = [
        "steer",
        "--surface",
        &data("parabolic_cylinder.surf"),
        "--point",
        "0",
        "0",
        "--target",
        "beaks",
        "--seed",
        "9",
    ];
    let a = run(&args);
    let b = run(&args);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let args = ["classify", "--surface", &data("swallowtail.surf"), "--grid", "31", "31"];
    assert_eq!(run(&args).stdout, run(&args).stdout);
}

#[test]
fn steering_targets() {
    let cyl = data("parabolic_cylinder.surf");
    let r = json(&run(&["steer", "--surface", &cyl, "--point", "0", "0", "--target", "Swallowtail"]));
    assert_eq!(r["points"][0]["class"], "Swallowtail");
    assert_eq!(r["steering"]["mode"], "generic");
    assert_eq!(r["steering"]["surface_type"], "Type2");

    let out = run(&["steer", "--surface", &cyl, "--point", "0", "0", "--target", "CuspidalEdge"]);
    assert_eq!(code(&out), 1);
    assert!(String::from_utf8_lossy(&out.stderr).contains("incompatible"));

    let r =
        json(&run(&["steer", "--surface", &data("elliptic_torus.surf"), "--point", "0.7", "0.1", "--target", "edge"]));
    assert_eq!(r["points"][0]["class"], "CuspidalEdge");
}

#[test]
fn steered_matrix_file_reproduces_the_class() {
    let dir = tempfile::tempdir().unwrap();
    let m = dir.path().join("lips.mat");
    let m = m.to_str().unwrap();
    let cyl = data("parabolic_cylinder.surf");
    let out = run(&["steer", "--surface", &cyl, "--point", "0", "0", "--target", "lips", "--matrix-out", m]);
    assert!(out.status.success());
    let r = json(&run(&["classify", "--surface", &cyl, "--matrix", m, "--grid", "41", "41"]));
    let pts = r["points"].as_array().unwrap();
    assert_eq!(pts.len(), 1);
    assert_eq!(pts[0]["class"], "CuspidalLips");
}

#[test]
fn degenerate_family_has_one_transition() {
    let r = json(&run(&[
        "sweep",
        "--surface",
        &data("parabolic_cylinder.surf"),
        "--point",
        "0",
        "0",
        "--mode",
        "degenerate",
        "--seed",
        "4",
        "--xi-range",
        "-5",
        "5",
        "--samples",
        "51",
    ]));
    let t = r["sweep"]["transitions"].as_array().unwrap();
    assert_eq!(t.len(), 1);
    let mut pair = [t[0]["from"].as_str().unwrap(), t[0]["to"].as_str().unwrap()];
    pair.sort();
    assert_eq!(pair, ["CuspidalBeaks", "CuspidalLips"]);
    assert_eq!(t[0]["class_at"], "Type2Degenerate");
}

#[test]
fn one_sided_range_has_no_transition() {
    let out = run(&[
        "sweep",
        "--surface",
        &data("parabolic_cylinder.surf"),
        "--point",
        "0",
        "0",
        "--matrix",
        &data("example_family.fam"),
        "--xi-range",
        "0",
        "0.3",
    ]);
    assert_eq!(code(&out), 1);
    assert!(String::from_utf8_lossy(&out.stderr).contains("no class transition"));
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.surf");
    std::fs::write(&bad, "x = u\ny = v +\nz = 0\n").unwrap();
    let out = run(&["classify", "--surface", bad.to_str().unwrap()]);
    assert_eq!(code(&out), 2);
    // diagnostics carry the source position
    assert!(String::from_utf8_lossy(&out.stderr).contains("2:"), "{}", String::from_utf8_lossy(&out.stderr));

    assert_eq!(code(&run(&["classify", "--surface", "/nonexistent/s.surf"])), 4);
    let unwritable =
        run(&["classify", "--surface", &data("plane.surf"), "--grid", "5", "5", "--report", "/nonexistent/r.json"]);
    assert_eq!(code(&unwritable), 4);
    assert_eq!(code(&run(&["classify", "--surface", &data("plane.surf"), "--order", "11"])), 2);
    assert_eq!(code(&run(&["classify", "--surface", &data("plane.surf"), "--bogus"])), 2);

    // sends the plane z = 0 to the point at infinity: nothing projects
    let inf = dir.path().join("inf.mat");
    std::fs::write(&inf, "0 0 0 0 0 1\n0 0 0 0 -1 0\n0 0 1 0 0 0\n0 0 0 1 0 0\n0 1 0 0 0 0\n1 0 0 0 0 0\n").unwrap();
    let out =
        run(&["classify", "--surface", &data("plane.surf"), "--matrix", inf.to_str().unwrap(), "--grid", "9", "9"]);
    assert_eq!(code(&out), 3);

    let bad_mat = dir.path().join("bad.mat");
    std::fs::write(&bad_mat, "1 2 3\n").unwrap();
    assert_eq!(code(&run(&["check-matrix", "--matrix", bad_mat.to_str().unwrap()])), 2);
}

#[test]
fn non_lie_matrix_fails_the_check() {
    let dir = tempfile::tempdir().unwrap();
    let m = dir.path().join("scaled.mat");
    std::fs::write(&m, "2 0 0 0 0 0\n0 1 0 0 0 0\n0 0 1 0 0 0\n0 0 0 1 0 0\n0 0 0 0 1 0\n0 0 0 0 0 1\n").unwrap();
    let out = run(&["check-matrix", "--matrix", m.to_str().unwrap()]);
    assert_eq!(code(&out), 1);
    assert!(String::from_utf8_lossy(&out.stdout).starts_with("FAIL"));
}

#[test]
fn mesh_export() {
    let dir = tempfile::tempdir().unwrap();
    let obj = dir.path().join("m.obj");
    let rep = dir.path().join("r.json");
    let out = run(&[
        "mesh",
        "--surface",
        &data("parabolic_cylinder.surf"),
        "--matrix",
        &data("example_a.mat"),
        "--grid",
        "21",
        "21",
        "--obj",
        obj.to_str().unwrap(),
        "--report",
        rep.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = std::fs::read_to_string(&obj).unwrap();
    assert_eq!(text.lines().filter(|l| l.starts_with("f ")).count(), 2 * 20 * 20);
    assert!(text.lines().any(|l| l == "o singular_locus"));
    assert!(text.lines().any(|l| l.starts_with("l ")));
    let r: Value = serde_json::from_str(&std::fs::read_to_string(&rep).unwrap()).unwrap();
    assert_eq!(r["points"][0]["class"], "Swallowtail");
    assert_eq!(code(&run(&["mesh", "--surface", &data("plane.surf")])), 2);
}

#[test]
fn config_file_with_flag_override() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.toml");
    std::fs::write(
        &cfg,
        format!(
            "surface = {:?}\nmatrix = {:?}\ngrid = [3, 3]\n",
            data("parabolic_cylinder.surf"),
            data("example_a.mat")
        ),
    )
    .unwrap();
    let r = json(&run(&["classify", "--config", cfg.to_str().unwrap(), "--grid", "41", "41"]));
    assert_eq!(r["points"][0]["class"], "Swallowtail");
    std::fs::write(&cfg, "surface = 3\n").unwrap();
    assert_eq!(code(&run(&["classify", "--config", cfg.to_str().unwrap()])), 2);
}

#[test]
fn umbilic_focal_points() {
    for (file, class) in [("umbilic_elliptic.surf", "D4Minus"), ("umbilic_hyperbolic.surf", "D4Plus")] {
        let dir = tempfile::tempdir().unwrap();
        let m = dir.path().join("par.mat");
        // parallel transformation by distance 1 = 1 / kappa at the umbilic
        let a = liefront::transform::parallel_matrix(1.0);
        std::fs::write(&m, liefront::minkowski::format_matrix(&a)).unwrap();
        let r =
            json(&run(&["classify", "--surface", &data(file), "--matrix", m.to_str().unwrap(), "--grid", "41", "41"]));
        let pts = r["points"].as_array().unwrap();
        let at_origin: Vec<&Value> = pts
            .iter()
            .filter(|p| p["uv"][0].as_f64().unwrap().abs() < 1e-8 && p["uv"][1].as_f64().unwrap().abs() < 1e-8)
            .collect();
        assert_eq!(at_origin.len(), 1, "{pts:?}");
        assert_eq!(at_origin[0]["class"], class);
        assert_eq!(at_origin[0]["rank"], 0);
    }
}
