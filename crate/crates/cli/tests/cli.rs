use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn systems() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../systems")
}

fn domsplit(args: &[&str], out: &Path) -> Output {
    let sys = systems();
    let args: Vec<String> = args
        .iter()
        .map(|a| match a.strip_prefix("@") {
            Some(name) => sys.join(name).to_string_lossy().into_owned(),
            None => a.to_string(),
        })
        .collect();
    Command::new(env!("CARGO_BIN_EXE_domsplit"))
        .args(&args)
        .arg("--out")
        .arg(out)
        .output()
        .expect("binary runs")
}

fn json(path: &Path) -> serde_json::Value {
    serde_json::from_slice(&fs::read(path).unwrap()).unwrap()
}

#[test]
fn dominate_exit_codes() {
    let tmp = tempfile::tempdir().unwrap();
    let ok = domsplit(&["dominate", "--shift", "@full2.json", "--cocycle", "@constant_diag.json"], tmp.path());
    assert_eq!(ok.status.code(), Some(0));
    let cert = json(&tmp.path().join("certificate.json"));
    assert_eq!(cert["certificate"]["verdict"], "Dominated");
    assert!((cert["certificate"]["tau"].as_f64().unwrap() - 0.25).abs() < 1e-6);
    assert_eq!(cert["meta"]["seed"], 0);
    assert_eq!(cert["meta"]["config_digest"].as_str().unwrap().len(), 64);

    let neg = domsplit(&["dominate", "--shift", "@full2.json", "--cocycle", "@swap.json"], tmp.path());
    assert_eq!(neg.status.code(), Some(2));
    assert_eq!(json(&tmp.path().join("certificate.json"))["certificate"]["verdict"], "NotDominated");
}

#[test]
fn errors_exit_with_one() {
    let tmp = tempfile::tempdir().unwrap();
    let missing = domsplit(&["dominate", "--shift", "@nope.json", "--cocycle", "@swap.json"], tmp.path());
    assert_eq!(missing.status.code(), Some(1));
    // a 2-symbol cocycle does not cover a 3-symbol shift
    let uncovered = domsplit(&["spectrum", "--shift", "@full3.json", "--cocycle", "@swap.json"], tmp.path());
    assert_eq!(uncovered.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&uncovered.stderr).starts_with("error:"));
}

#[test]
fn spectrum_classifies_constant_data() {
    let tmp = tempfile::tempdir().unwrap();
    let out = domsplit(
        &["spectrum", "--shift", "@full2.json", "--cocycle", "@constant_diag.json", "--center", "log2,-log2", "--delta", "0"],
        tmp.path(),
    );
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&tmp.path().join("spectrum.json"))["classification"], "Constant");
    let csv = fs::read_to_string(tmp.path().join("spectrum.csv")).unwrap();
    assert!(csv.starts_with("# tool=domsplit"));
    assert!(csv.lines().nth(1).unwrap().starts_with("point,period,exponent_1,exponent_2"));
}

#[test]
fn shadow_and_bounds_report_verdicts() {
    let tmp = tempfile::tempdir().unwrap();
    let out = domsplit(
        &["shadow", "--shift", "@golden.json", "--cocycle", "@shear_range1.json", "--radius", "12", "--steps", "50"],
        tmp.path(),
    );
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = fs::read_to_string(tmp.path().join("error_terms.csv")).unwrap();
    assert!(csv.lines().skip(2).all(|l| l.ends_with(",PASS")));

    let yes = domsplit(&["bounds", "sl2", "--lambda", "1", "--delta", "0.1"], tmp.path());
    assert_eq!(yes.status.code(), Some(0));
    let no = domsplit(&["bounds", "sl2", "--lambda", "1", "--delta", "0.4"], tmp.path());
    assert_eq!(no.status.code(), Some(2));
    let narrow = domsplit(
        &["bounds", "gamma-narrow", "--mu", "1.5", "--lambda1", "1", "--lambda2", "-1", "--delta", "0.5"],
        tmp.path(),
    );
    assert_eq!(narrow.status.code(), Some(2));
}

#[test]
fn config_runs_match_direct_invocation() {
    let tmp = tempfile::tempdir().unwrap();
    let sys = systems();
    let config = tmp.path().join("experiment.toml");
    fs::write(
        &config,
        format!(
            "[command]\nname = \"dominate\"\nshift = {:?}\ncocycle = {:?}\ndepth = 20\nseed = 5\nout = \"from_config\"\n",
            sys.join("full2.json"),
            sys.join("two_diagonal.json")
        ),
    )
    .unwrap();
    let run = Command::new(env!("CARGO_BIN_EXE_domsplit"))
        .args(["run", "--config"])
        .arg(&config)
        .output()
        .unwrap();
    assert_eq!(run.status.code(), Some(0), "{}", String::from_utf8_lossy(&run.stderr));

    let direct_dir = tmp.path().join("direct");
    let direct = domsplit(
        &["dominate", "--shift", "@full2.json", "--cocycle", "@two_diagonal.json", "--depth", "20", "--seed", "5"],
        &direct_dir,
    );
    assert_eq!(direct.status.code(), Some(0));
    let a = fs::read(tmp.path().join("from_config/certificate.json")).unwrap();
    let b = fs::read(direct_dir.join("certificate.json")).unwrap();
    assert_eq!(a, b);
}
