use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn irr(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_irr"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

/// CSV rows with the timing column dropped.
fn rows_without_timing(csv_text: &str) -> Vec<Vec<String>> {
    let mut rdr = csv::Reader::from_reader(csv_text.as_bytes());
    let headers = rdr.headers().unwrap().clone();
    let t = headers.iter().position(|h| h == "elapsed_ms").unwrap();
    rdr.records()
        .map(|r| {
            r.unwrap()
                .iter()
                .enumerate()
                .filter(|&(i, _)| i != t)
                .map(|(_, v)| v.to_owned())
                .collect()
        })
        .collect()
}

#[test]
fn synth_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a");
    let b = dir.path().join("b");
    for out in [&a, &b] {
        let o = irr(&["synth", "--dist", "25,25", "--seed", "1", "--out", path(out)]);
        assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    }
    let mut names: Vec<_> = fs::read_dir(&a).unwrap().map(|e| e.unwrap().file_name()).collect();
    names.sort();
    // 50 documents, topics.tsv and manifest.json
    assert_eq!(names.len(), 52);
    for n in &names {
        assert_eq!(fs::read(a.join(n)).unwrap(), fs::read(b.join(n)).unwrap(), "{n:?}");
    }
    let topics = fs::read_to_string(a.join("topics.tsv")).unwrap();
    assert_eq!(topics.lines().filter(|l| l.ends_with("\tt0")).count(), 25);
    assert_eq!(topics.lines().filter(|l| l.ends_with("\tt1")).count(), 25);
}

#[test]
fn synth_manifest_records_dominances() {
    let dir = tempfile::tempdir().unwrap();
    let o = irr(&["synth", "--dist", "46,4", "--out", path(dir.path())]);
    assert_eq!(code(&o), 0);
    let m: serde_json::Value = serde_json::from_slice(&fs::read(dir.path().join("manifest.json")).unwrap()).unwrap();
    assert_eq!(m["documents"], 50);
    let ratio = m["nonuniformity"].as_f64().unwrap();
    assert!((ratio - (46.0f64 / 4.0).sqrt()).abs() < 1e-12);
}

#[test]
fn run_writes_one_row_per_method() {
    let o = irr(&["run", "--dist", "25,25", "--seed", "1", "--methods", "vsm,lsi,irr"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let text = String::from_utf8(o.stdout).unwrap();
    let mut rdr = csv::Reader::from_reader(text.as_bytes());
    let h = rdr.headers().unwrap().clone();
    let col = |n: &str| h.iter().position(|c| c == n).unwrap();
    let rows: Vec<csv::StringRecord> = rdr.records().map(Result::unwrap).collect();
    assert_eq!(rows.len(), 3);
    assert!(rows.iter().all(|r| &r[col("dataset")] == "25-25"));
    // Plain irr defaults to the automatic scaling factor, which is recorded.
    let q: f64 = rows[2][col("q")].parse().unwrap();
    assert!(q > 0.0);
    assert!(rows[..2].iter().all(|r| r[col("q")].is_empty()));
    assert_eq!(&rows[1][col("ell")], "2");
    assert_eq!(&rows[0][col("nonuniformity")], "1");
}

#[test]
fn run_is_deterministic_and_flags_override_config() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("exp.conf");
    fs::write(&cfg, "# sweep\ndist=30,20\nseeds=1..2\nmethods=lsi\nmetrics=kappa,cluster\n").unwrap();
    let out = |name: &str| dir.path().join(name);
    for name in ["r1.csv", "r2.csv"] {
        let o = irr(&["run", "--config", path(&cfg), "--methods", "lsi,irr:auto", "--out", path(&out(name))]);
        assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    }
    let r1 = rows_without_timing(&fs::read_to_string(out("r1.csv")).unwrap());
    let r2 = rows_without_timing(&fs::read_to_string(out("r2.csv")).unwrap());
    assert_eq!(r1, r2);
    assert_eq!(r1.len(), 4);
    assert_eq!(r1[1][3], "irr:auto");
}

#[test]
fn plotdata_from_report() {
    let dir = tempfile::tempdir().unwrap();
    let report = dir.path().join("r.csv");
    let o = irr(&[
        "run", "--dist", "25,25", "--dist", "40,10", "--seeds", "1,2", "--methods", "lsi", "--out", path(&report),
    ]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let o = irr(&["plotdata", path(&report)]);
    assert_eq!(code(&o), 0);
    let text = String::from_utf8(o.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "x,series,n,kappa_mean,kappa_std");
    assert_eq!(lines.len(), 3);
    assert!(lines[1].starts_with("1,lsi,2,"));
    assert!(lines[2].starts_with("2,lsi,2,"));

    let o = irr(&["plotdata", path(&report), "--y", "floor"]);
    assert_eq!(code(&o), 0);
    let o = irr(&["plotdata", path(&report), "--x", "missing"]);
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("missing"));
}

#[test]
fn exit_codes() {
    assert_eq!(code(&irr(&["nonsense"])), 1);
    assert_eq!(code(&irr(&["run", "--dist", "25,25", "--methods", "svd"])), 1);
    assert_eq!(code(&irr(&["run", "--dist", "25,25", "--q", "-1"])), 1);
    assert_eq!(code(&irr(&["run"])), 1);
    assert_eq!(code(&irr(&["run", "--corpus", "/nonexistent/corpus"])), 2);

    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.conf");
    fs::write(&cfg, "dist=25,25\nmethods=lsi\nell=zero\n").unwrap();
    let o = irr(&["run", "--config", path(&cfg)]);
    assert_eq!(code(&o), 1);
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 3"));
}

#[test]
fn verify_passes_and_detects_injected_fault() {
    let o = irr(&["verify", "--trials", "1", "--noise", "0"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let text = String::from_utf8(o.stdout).unwrap();
    let last: serde_json::Value = serde_json::from_str(text.lines().last().unwrap()).unwrap();
    assert_eq!(last["summary"]["passed"], true);
    // With zero noise every Theorem 1 record is an equality case.
    let records: Vec<serde_json::Value> = text.lines().map(|l| serde_json::from_str(l).unwrap()).collect();
    let t1: Vec<_> = records.iter().filter(|r| r["check"] == "theorem1").collect();
    assert_eq!(t1.len(), 8);
    for r in t1 {
        assert_eq!(r["is_exact"], true);
        assert!(r["max_gap"].as_f64().unwrap() < 1e-8, "{r}");
    }

    let o = irr(&["verify", "--trials", "1", "--inject-fault"]);
    assert_eq!(code(&o), 3);
}
