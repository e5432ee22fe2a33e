use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn roadalign(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_roadalign")).args(args).output().unwrap()
}

fn gen_terrain(dir: &Path, seed: &str) -> Output {
    let out = dir.join("terrain.asc");
    roadalign(&[
        "gen-terrain", "--kind", "sinusoidal", "--width", "200", "--height", "400", "--cell", "10",
        "--amplitude", "6", "--seed", seed, "--out", out.to_str().unwrap(),
    ])
}

const CONFIG: &str = r#"
[terrain]
path = "terrain.asc"

[alignment]
start = [100.0, 5.0]
end = [100.0, 395.0]
n_ips = 2
m = 3

[constraints]
r_min = 15.0
max_grade = 0.15
z_bar = 8.0
box_half_width = 40.0

[solver]
kind = "dms"
budget = 300
seed = 4
"#;

fn setup(config: &str) -> tempfile::TempDir {
    let dir = tempfile::tempdir().unwrap();
    assert!(gen_terrain(dir.path(), "3").status.success());
    fs::write(dir.path().join("run.toml"), config).unwrap();
    dir
}

fn cfg_path(dir: &tempfile::TempDir) -> String {
    dir.path().join("run.toml").to_str().unwrap().to_string()
}

#[test]
fn run_writes_all_artifacts() {
    let dir = setup(CONFIG);
    let out = dir.path().join("out");
    let o = roadalign(&["run", "--config", &cfg_path(&dir), "--out", out.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let front = fs::read_to_string(out.join("front.csv")).unwrap();
    let n = front.lines().count() - 1;
    assert!(n >= 1);
    for f in ["candidates.csv", "front_breakdown.csv", "designs/member_000.csv", "geometry/member_000.csv", "constraints/member_000.csv"] {
        assert!(out.join(f).exists(), "{f} missing");
    }
    let manifest: serde_json::Value = serde_json::from_str(&fs::read_to_string(out.join("manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["front_size"].as_u64().unwrap() as usize, n);
    let evals = manifest["evaluations"].as_u64().unwrap() as usize;
    let dim = manifest["dimension"].as_u64().unwrap() as usize;
    assert!(evals >= 300 && evals <= 300 + 2 * dim);
}

#[test]
fn eval_reproduces_front_costs() {
    let dir = setup(CONFIG);
    let out = dir.path().join("out");
    assert!(roadalign(&["run", "--config", &cfg_path(&dir), "--out", out.to_str().unwrap()]).status.success());
    let front = fs::read_to_string(out.join("front.csv")).unwrap();
    let first: Vec<&str> = front.lines().nth(1).unwrap().split(',').collect();
    let design = out.join("designs/member_000.csv");
    let o = roadalign(&["eval", "--config", &cfg_path(&dir), "--design", design.to_str().unwrap()]);
    assert!(o.status.success());
    let text = String::from_utf8(o.stdout).unwrap();
    let row: Vec<&str> = text.lines().nth(1).unwrap().split(',').collect();
    assert_eq!(row[3], first[0]);
    assert_eq!(row[4], first[1]);
    assert!(text.contains("feasible,true"));
}

#[test]
fn eval_lists_violations_of_bad_design() {
    let dir = setup(CONFIG);
    // IPs outside their boxes and radii below the minimum.
    let design = dir.path().join("bad.csv");
    let z: Vec<String> = (0..10).map(|_| "100".to_string()).collect();
    fs::write(&design, format!("10,190,130,270,5,5,{}\n", z.join(","))).unwrap();
    let o = roadalign(&["eval", "--config", &cfg_path(&dir), "--design", design.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = String::from_utf8(o.stdout).unwrap();
    assert!(text.contains("feasible,false"));
    assert!(text.contains("violated,box,ip1.X"));
    assert!(text.contains("violated,radius,ip2"));
}

#[test]
fn malformed_design_is_a_config_error() {
    let dir = setup(CONFIG);
    let design = dir.path().join("bad.csv");
    fs::write(&design, "1,2,abc\n").unwrap();
    let o = roadalign(&["eval", "--config", &cfg_path(&dir), "--design", design.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn budget_zero_returns_the_seed() {
    let dir = setup(CONFIG);
    let out = dir.path().join("out");
    let o = roadalign(&["run", "--config", &cfg_path(&dir), "--budget", "0", "--out", out.to_str().unwrap()]);
    assert!(o.status.success());
    let front = fs::read_to_string(out.join("front.csv")).unwrap();
    assert_eq!(front.lines().count(), 2);
    assert!(front.ends_with(",0\n"));
}

#[test]
fn missing_terrain_fails_without_output() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("run.toml"), CONFIG).unwrap();
    let out = dir.path().join("out");
    let o = roadalign(&["run", "--config", &cfg_path(&dir), "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(3));
    assert!(!out.exists());
}

#[test]
fn bad_config_exits_two() {
    let dir = setup(&CONFIG.replace("n_ips = 2", "n_ips = 2\nbogus = 1"));
    assert_eq!(roadalign(&["run", "--config", &cfg_path(&dir)]).status.code(), Some(2));
    let dir = setup(&CONFIG.replace("max_grade = 0.15", "max_grade = -0.1"));
    assert_eq!(roadalign(&["run", "--config", &cfg_path(&dir)]).status.code(), Some(2));
}

#[test]
fn impossible_grade_exits_four() {
    let dir = setup(&CONFIG.replace("end = [100.0, 395.0]", "end = [100.0, 395.0, 400.0]"));
    let o = roadalign(&["run", "--config", &cfg_path(&dir), "--out", dir.path().join("out").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(4), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(!dir.path().join("out").exists());
}

#[test]
fn gen_terrain_is_deterministic() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    assert!(gen_terrain(a.path(), "11").status.success());
    assert!(gen_terrain(b.path(), "11").status.success());
    let ta = fs::read(a.path().join("terrain.asc")).unwrap();
    assert_eq!(ta, fs::read(b.path().join("terrain.asc")).unwrap());
    let text = String::from_utf8(ta).unwrap();
    assert!(text.contains("ncols 21") && text.contains("nrows 41"));

    let c = tempfile::tempdir().unwrap();
    let out = c.path().join("t.asc");
    assert!(roadalign(&["gen-terrain", "--out", out.to_str().unwrap()]).status.success());
    let t = roadalign::terrain::TerrainGrid::load_ascii(&out).unwrap();
    assert_eq!((t.n_cols(), t.n_rows()), (50, 100));
}
