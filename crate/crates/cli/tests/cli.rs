//! End-to-end tests of the `greenroute` binary: exit codes, determinism,
//! and the report CSV contract.

use std::path::Path;
use std::process::{Command, Output};

fn greenroute(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_greenroute"))
        .current_dir(dir)
        .args(args)
        .output()
        .expect("binary runs")
}

fn gen_city(dir: &Path, name: &str, extra: &[&str]) {
    let mut args = vec![
        "gen", "--seed", "11", "--grid", "6", "--spacing", "200", "--hills", "5", "--amp", "60",
        "-o", name,
    ];
    args.extend_from_slice(extra);
    let out = greenroute(dir, &args);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn gen_is_byte_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    gen_city(dir.path(), "a.json", &[]);
    gen_city(dir.path(), "b.json", &[]);
    let a = std::fs::read(dir.path().join("a.json")).unwrap();
    let b = std::fs::read(dir.path().join("b.json")).unwrap();
    assert_eq!(a, b);

    let out = greenroute(
        dir.path(),
        &["gen", "--seed", "12", "--grid", "6", "-o", "c.json"],
    );
    assert!(out.status.success());
    let c = std::fs::read(dir.path().join("c.json")).unwrap();
    assert_ne!(a, c, "different seeds must differ");
}

#[test]
fn route_solves_and_reports_metrics() {
    let dir = tempfile::tempdir().unwrap();
    gen_city(dir.path(), "city.json", &[]);
    let out = greenroute(
        dir.path(),
        &[
            "route", "--net", "city.json", "--from", "0", "--to", "35", "--truck", "mdd",
            "--load-pct", "50", "--path", "greenest", "--speed", "dynamic",
        ],
    );
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("greenest path for mdd"));
    assert!(text.contains("co2:"));

    let out = greenroute(
        dir.path(),
        &[
            "route", "--net", "city.json", "--from", "0", "--to", "35", "--json",
        ],
    );
    assert!(out.status.success());
    let doc: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!(doc["metrics"]["co2"].as_f64().unwrap() > 0.0);
    assert_eq!(doc["path"]["source"], 0);
    assert_eq!(doc["path"]["target"], 35);
}

#[test]
fn unreachable_od_exits_with_3() {
    let dir = tempfile::tempdir().unwrap();
    // node 2 has no incoming arcs
    std::fs::write(
        dir.path().join("tiny.json"),
        r#"{"nodes":[{"id":0,"x":0.0,"y":0.0,"elev":0.0},{"id":1,"x":100.0,"y":0.0,"elev":0.0},{"id":2,"x":200.0,"y":0.0,"elev":0.0}],"arcs":[{"id":0,"from":0,"to":1,"length":100.0}]}"#,
    )
    .unwrap();
    let out = greenroute(
        dir.path(),
        &["route", "--net", "tiny.json", "--from", "0", "--to", "2"],
    );
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn spec_errors_exit_with_2() {
    let dir = tempfile::tempdir().unwrap();
    gen_city(dir.path(), "city.json", &[]);
    // unknown truck
    let out = greenroute(
        dir.path(),
        &[
            "route", "--net", "city.json", "--from", "0", "--to", "35", "--truck", "xdd",
        ],
    );
    assert_eq!(out.status.code(), Some(2));
    // missing network file
    let out = greenroute(
        dir.path(),
        &["route", "--net", "nope.json", "--from", "0", "--to", "35"],
    );
    assert_eq!(out.status.code(), Some(2));
    // traffic policy on a network without traffic speeds
    let out = greenroute(
        dir.path(),
        &[
            "route", "--net", "city.json", "--from", "0", "--to", "35", "--path", "fastest",
            "--speed", "traffic",
        ],
    );
    assert_eq!(out.status.code(), Some(2));
    // malformed JSON
    std::fs::write(dir.path().join("bad.json"), "{\"nodes\": [").unwrap();
    let out = greenroute(
        dir.path(),
        &["route", "--net", "bad.json", "--from", "0", "--to", "1"],
    );
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn sweep_writes_contract_csv_deterministically() {
    let dir = tempfile::tempdir().unwrap();
    gen_city(dir.path(), "city.json", &["--traffic", "4,18"]);
    std::fs::write(dir.path().join("ods.csv"), "source,target\n0,35\n3,32\n").unwrap();
    for name in ["r1.csv", "r2.csv"] {
        let out = greenroute(
            dir.path(),
            &[
                "sweep",
                "--net",
                "city.json",
                "--ods",
                "ods.csv",
                "--loads",
                "30,60",
                "--include-traffic",
                "-o",
                name,
                "--summary",
                &format!("{name}.summary"),
            ],
        );
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    }
    let r1 = std::fs::read(dir.path().join("r1.csv")).unwrap();
    let r2 = std::fs::read(dir.path().join("r2.csv")).unwrap();
    assert_eq!(r1, r2, "sweep reports must be byte-identical across runs");

    let text = String::from_utf8(r1).unwrap();
    let mut lines = text.lines();
    assert_eq!(
        lines.next().unwrap(),
        "net,od_source,od_target,truck,load_pct,ratio_name,value,delta_h,dist_sp,sigma_grade"
    );
    assert!(lines.next().unwrap().starts_with("city,0,35,hdd,30,"));
    assert!(dir.path().join("r1.csv.meta.json").exists());
    assert!(dir.path().join("r1.csv.summary").exists());
}

#[test]
fn compare_runs_custom_ratio_spec() {
    let dir = tempfile::tempdir().unwrap();
    gen_city(dir.path(), "city.json", &[]);
    std::fs::write(
        dir.path().join("compare.json"),
        r#"{
  "ods": [[0, 35], [5, 30]],
  "trucks": ["hdd", "ldd"],
  "loads_pct": [40, 80],
  "ratios": [
    {"baseline": {"path": "shortest", "speed": "static"},
     "alternative": {"path": "greenest", "speed": "dynamic"}},
    {"baseline": {"path": "greenest", "speed": "static"},
     "alternative": {"path": "asymptotic", "speed": "static"}}
  ]
}"#,
    )
    .unwrap();
    let out = greenroute(
        dir.path(),
        &[
            "compare", "--net", "city.json", "--spec", "compare.json", "-o", "report.csv",
        ],
    );
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = std::fs::read_to_string(dir.path().join("report.csv")).unwrap();
    // 2 ods x 2 trucks x 2 loads x 2 ratios x 3 metrics + header
    assert_eq!(text.lines().count(), 1 + 48);
    assert!(text.contains("E:greenest-static->asymptotic-static"));

    // a ratio requiring traffic speeds on a traffic-free network is a spec error
    std::fs::write(
        dir.path().join("traffic.json"),
        r#"{
  "ods": [[0, 35]],
  "trucks": ["hdd"],
  "loads_pct": [50],
  "ratios": [
    {"baseline": {"path": "fastest", "speed": "traffic"},
     "alternative": {"path": "greenest", "speed": "traffic"}}
  ]
}"#,
    )
    .unwrap();
    let out = greenroute(
        dir.path(),
        &[
            "compare", "--net", "city.json", "--spec", "traffic.json", "-o", "t.csv",
        ],
    );
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn custom_vehicle_file_is_accepted() {
    let dir = tempfile::tempdir().unwrap();
    gen_city(dir.path(), "city.json", &[]);
    std::fs::write(
        dir.path().join("van.vehicle"),
        "# small van\nxi = 1\ng = 9.81\nrho = 1.2041\nc_r = 0.01\neta = 0.45\neta_tf = 0.45\n\
         kappa = 44\npsi = 737\nw = 2500\nl_max = 1500\nk = 0.25\nn = 40\nd = 3.0\nc_d = 0.5\n\
         s = 5\nc_e = 2.67\n",
    )
    .unwrap();
    let out = greenroute(
        dir.path(),
        &[
            "route", "--net", "city.json", "--from", "0", "--to", "35", "--truck", "van.vehicle",
            "--json",
        ],
    );
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let doc: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(doc["truck"], "van");
    assert_eq!(doc["load_kg"].as_f64().unwrap(), 900.0);
}
