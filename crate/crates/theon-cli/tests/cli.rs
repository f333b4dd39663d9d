use std::path::PathBuf;
use std::process::{Command, Output};

fn root() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../..")
}

fn theon(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_theon")).args(args).current_dir(root()).output().expect("binary runs")
}

fn stdout(args: &[&str]) -> String {
    let out = theon(args);
    assert_eq!(out.status.code(), Some(0), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap().trim_end().to_string()
}

#[test]
fn density_golden() {
    assert_eq!(stdout(&["density", "--kind", "p", "models/K2.mdl", "models/P3.mdl"]), "2/3");
}

#[test]
fn tournament_enumeration_golden() {
    assert_eq!(stdout(&["enumerate", "--theory", "Tournament", "--n", "3"]).lines().count(), 2);
}

#[test]
fn exact_golden() {
    let args = ["exact", "--theon", "builtin:constant_graphon:1/2", "--model", "models/K3.mdl", "--kind", "ind"];
    assert_eq!(stdout(&args), "1/8");
}

#[test]
fn rationals_always_have_denominators() {
    assert_eq!(stdout(&["lineon", "triangle", "--subset", "n=3 ff"]), "1/1");
    assert_eq!(stdout(&["density", "--kind", "ind", "Tr3", "W4"]), "1/8");
}

#[test]
fn json_output() {
    let out = stdout(&["--json", "multi-density", "--host", "P5", "K2", "K2"]);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["value"], "1/5");
}

#[test]
fn sampling_requires_seed() {
    let out = theon(&["sample", "--theon", "builtin:linorder_std", "--n", "3"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn usage_and_compute_errors() {
    assert_eq!(theon(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(theon(&["exact", "--theon", "builtin:nope", "--model", "K2"]).status.code(), Some(1));
    assert_eq!(theon(&["density", "K2", "14235"]).status.code(), Some(1));
}

#[test]
fn sampling_is_deterministic_across_jobs() {
    let base = ["sample", "--theon", "samples/bipartite.ton", "--n", "5", "--seed", "11", "--count", "4"];
    let one = stdout(&[&["--jobs", "1"], &base[..]].concat());
    let many = stdout(&[&["--jobs", "4"], &base[..]].concat());
    assert_eq!(one, many);
    assert_eq!(one.lines().count(), 4);
}

#[test]
fn interpretation_check() {
    assert_eq!(stdout(&["interpret", "check", "samples/orientation.interp"]), "PASS");
    assert!(stdout(&["interpret", "check", "samples/broken.interp"]).starts_with("FAIL"));
}

#[test]
fn flag_commands() {
    let sq = stdout(&["product", "--level", "4", "samples/K2.flag", "samples/K2.flag"]);
    assert_eq!(stdout(&["evaluate", &sq, "P5"]), "1/5");
    let pi = stdout(&["pi", "--interp", "orientation-erasing", "samples/K2.flag"]);
    assert!(pi.contains("Orgraph"));
}

#[test]
fn theon_commands() {
    assert!(stdout(&["check", "weak", "--theon", "builtin:turan:3"]).ends_with("PASS"));
    let strong = stdout(&["check", "strong", "--theon", "builtin:linorder_std", "--seed", "1", "--trials", "500"]);
    assert!(strong.starts_with("PASS"));
    let lin =
        stdout(&["strengthen", "linorder", "--theon", "builtin:linorder_mod:3", "--seed", "2", "--trials", "500"]);
    assert!(lin.starts_with("bad_pairs\t0/1"));
    let planar = stdout(&["permuton", "extract", "--theon", "builtin:standard_permuton:@samples/permuton.planar"]);
    assert_eq!(planar, "planar { m = 2 w = 1/2 0/1 0/1 1/2 }");
    let pos = stdout(&["poseton", "extract", "--theon", "builtin:poseton_from_W:@samples/chain.poseton"]);
    assert!(pos.starts_with("poseton { m = 2"));
}

#[test]
fn lineon_commands() {
    assert_eq!(stdout(&["lineon", "triangle", "--subset", "n=3 96"]), "1/4");
    assert_eq!(stdout(&["lineon", "blowup", "--subset", "n=2 9", "--t", "1"]), "n=3 99");
    let d = stdout(&["lineon", "density", "--pattern", "m=2 6", "--subset", "n=3 96", "--tind"]);
    assert_eq!(d.lines().count(), 2);
}
