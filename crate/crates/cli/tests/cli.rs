use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bundled(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("scenarios").join(name)
}

fn pandemic(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_pandemic"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn run_ok(args: &[&str]) -> String {
    let out = pandemic(args);
    assert!(
        out.status.success(),
        "{args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn write_temp(text: &str) -> tempfile::NamedTempFile {
    let file = tempfile::Builder::new().suffix(".toml").tempfile().unwrap();
    std::fs::write(file.path(), text).unwrap();
    file
}

fn value_of(table: &str, item: &str) -> String {
    table
        .lines()
        .find_map(|line| {
            let cols: Vec<&str> = line.split_whitespace().collect();
            (cols.len() >= 3 && cols[1] == item).then(|| cols[2..].join(" "))
        })
        .unwrap_or_else(|| panic!("no row {item} in\n{table}"))
}

#[test]
fn bayesian_threshold_and_decision() {
    let s = bundled("bayesian.toml");
    let out = run_ok(&["mask-bayesian", "--scenario", s.to_str().unwrap()]);
    assert_eq!(value_of(&out, "threshold"), "125.000000");
    assert_eq!(value_of(&out, "decision"), "wear");
}

#[test]
fn one_infected_game_rows() {
    let s = bundled("bayesian.toml");
    let out = run_ok(&["mask-basic", "--scenario", s.to_str().unwrap(), "--format", "csv"]);
    assert!(out.contains("susceptible-infected,nash,\"(in, no)\""), "{out}");
    assert!(out.contains("susceptible-infected,social_optimum,\"(no, out)\""), "{out}");
    assert!(out.contains("infected-susceptible,nash,\"(no, in)\""), "{out}");
}

#[test]
fn multiplayer_statuses_flag() {
    let s = bundled("bayesian.toml");
    let out = run_ok(&[
        "mask-basic",
        "--scenario",
        s.to_str().unwrap(),
        "--statuses",
        "s,i,s",
    ]);
    assert_eq!(value_of(&out, "nash"), "(no, no)");
    assert!(out.contains("(in, no, in)"), "{out}");
    assert!(out.contains("so_all_out"));
}

#[test]
fn curves_csv_schema() {
    let s = bundled("curves_mixed.toml");
    let out = run_ok(&[
        "curves",
        "--scenario",
        s.to_str().unwrap(),
        "--format",
        "csv",
        "--grid-steps",
        "250",
    ]);
    let mut lines = out.lines();
    assert_eq!(lines.next(), Some("z,objective"));
    let rows: Vec<&str> = lines.collect();
    assert_eq!(rows.len(), 251);
    for row in rows {
        let fields: Vec<&str> = row.split(',').collect();
        assert_eq!(fields.len(), 2);
        for f in fields {
            f.parse::<f64>().unwrap();
        }
    }
    assert!(out.ends_with('\n') && !out.contains('\r'));
}

#[test]
fn policy_compare_csv_schema() {
    let s = bundled("policy.toml");
    let out = run_ok(&["policy-compare", "--scenario", s.to_str().unwrap(), "--format", "csv"]);
    let mut reader = csv::Reader::from_reader(out.as_bytes());
    let header: Vec<String> = reader.headers().unwrap().iter().map(str::to_owned).collect();
    assert_eq!(header, pandemic_cli::commands::POLICY_COLUMNS);
    let numeric = [0, 3, 4, 5, 6, 7, 8, 9, 10, 11];
    let mut count = 0;
    for record in reader.records() {
        let record = record.unwrap();
        assert_eq!(record.len(), header.len());
        for &i in &numeric {
            record[i].parse::<f64>().unwrap();
        }
        count += 1;
    }
    assert_eq!(count, 8);
}

#[test]
fn precision_flag() {
    let s = bundled("bayesian.toml");
    let out = run_ok(&["mask-bayesian", "--scenario", s.to_str().unwrap(), "--precision", "2"]);
    assert_eq!(value_of(&out, "threshold"), "125.00");
    let out = run_ok(&[
        "mask-bayesian",
        "--scenario",
        s.to_str().unwrap(),
        "--format",
        "csv",
        "--precision",
        "4",
    ]);
    assert!(out.contains("bayesian,threshold,125.0\n"), "{out}");
}

#[test]
fn out_flag_writes_file() {
    let s = bundled("distancing.toml");
    let dir = tempfile::tempdir().unwrap();
    let target = dir.path().join("report.txt");
    let stdout = run_ok(&[
        "distancing",
        "--scenario",
        s.to_str().unwrap(),
        "--out",
        target.to_str().unwrap(),
    ]);
    assert!(stdout.is_empty());
    let written = std::fs::read_to_string(target).unwrap();
    assert_eq!(value_of(&written, "decision"), "go");
    assert_eq!(value_of(&written, "life_value_multiplier"), "3819.709702");
}

#[test]
fn invalid_configs_exit_one_naming_key() {
    let cases = [
        (
            "[mask]\nc_out = 10\nc_in = 10\nc_use = 100\nc_infection = 1000\n",
            "mask-basic",
            "c_out < c_in",
        ),
        (
            "[mask]\nc_out = 1\nc_in = 10\nc_use = 100\nc_infection = 1000\n[bayesian]\nrho = 1.5\np1 = 0.5\n",
            "mask-bayesian",
            "[bayesian].rho",
        ),
        (
            "[bayesian]\nrho = 0.5\np1 = 0.5\nmood = 3\n",
            "mask-bayesian",
            "mood",
        ),
        ("[bayesian]\nrho = 0.5\np1 = 0.5\n", "mask-bayesian", "[mask]"),
        (
            "[distancing]\nB = 1\nC = 1\nm = 0.1\nL = 10\nrho = 0.1\n[functions]\nbenefit = \"cubic:1\"\ncost = \"constant:1\"\n",
            "meeting-opt",
            "[functions].benefit",
        ),
    ];
    for (text, command, needle) in cases {
        let file = write_temp(text);
        let out = pandemic(&[command, "--scenario", file.path().to_str().unwrap()]);
        let stderr = String::from_utf8_lossy(&out.stderr);
        assert_eq!(out.status.code(), Some(1), "{command}: {stderr}");
        assert!(stderr.contains(needle), "expected {needle:?} in {stderr}");
        assert!(out.stdout.is_empty());
    }
}

#[test]
fn usage_errors_exit_one() {
    assert_eq!(pandemic(&["mask-basic"]).status.code(), Some(1));
    assert_eq!(pandemic(&["juggle", "--scenario", "x.toml"]).status.code(), Some(1));
    let missing = pandemic(&["mask-basic", "--scenario", "/nonexistent/scenario.toml"]);
    assert_eq!(missing.status.code(), Some(1));
    assert_eq!(pandemic(&["--help"]).status.code(), Some(0));
}

#[test]
fn zero_infection_probability_is_a_domain_error() {
    let file = write_temp(
        "[distancing]\nB = 1\nC = 1\nm = 0.1\nL = 10\nrho = 0\n\
         [functions]\nbenefit = \"constant:1\"\ncost = \"constant:1\"\n",
    );
    let out = pandemic(&["meeting-opt", "--scenario", file.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("domain error"));
}

#[test]
fn sequential_and_parallel_agree() {
    let s = bundled("curves_linear.toml");
    let par = run_ok(&["curves", "--scenario", s.to_str().unwrap(), "--format", "csv"]);
    let seq = run_ok(&[
        "curves",
        "--scenario",
        s.to_str().unwrap(),
        "--format",
        "csv",
        "--sequential",
    ]);
    assert_eq!(par, seq);
}
