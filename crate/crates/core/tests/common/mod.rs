//! Helpers for driving the `wh` binary.

#![allow(dead_code)]

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

pub fn wh(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_wh"))
        .args(args)
        .env_remove("WH_OUTPUT_DIR")
        .env("RUST_LOG", "warn")
        .output()
        .expect("wh binary runs")
}

pub fn wh_ok(args: &[&str]) -> Output {
    let out = wh(args);
    assert!(
        out.status.success(),
        "wh {args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    out
}

pub fn path_str(p: &Path) -> &str {
    p.to_str().expect("utf-8 temp path")
}

/// Numeric content of every output file except the manifest. Timing
/// fields of the benchmark report are dropped.
pub fn numeric_outputs(dir: &Path) -> BTreeMap<String, Vec<u8>> {
    let mut files = BTreeMap::new();
    for entry in std::fs::read_dir(dir).unwrap() {
        let path = entry.unwrap().path();
        let name = path.file_name().unwrap().to_string_lossy().into_owned();
        if name == "manifest.json" {
            continue;
        }
        let bytes = std::fs::read(&path).unwrap();
        let bytes = if name == "bench.json" {
            let mut v: Value = serde_json::from_slice(&bytes).unwrap();
            strip_timings(&mut v);
            serde_json::to_vec(&v).unwrap()
        } else {
            bytes
        };
        files.insert(name, bytes);
    }
    files
}

fn strip_timings(v: &mut Value) {
    match v {
        Value::Object(map) => {
            for key in [
                "seconds",
                "events_per_second",
                "dense_over_sparse_seconds",
                "sparse_faster",
            ] {
                map.remove(key);
            }
            map.values_mut().for_each(strip_timings);
        }
        Value::Array(items) => items.iter_mut().for_each(strip_timings),
        _ => {}
    }
}

/// Runs `args` into `<root>/<tag>`, replays its manifest into
/// `<root>/<tag>-rerun`, and reports whether every numeric output matched.
pub fn rerun_matches(root: &Path, tag: &str, args: &[&str]) -> Result<(), String> {
    let first = root.join(tag);
    let again = root.join(format!("{tag}-rerun"));
    let mut full: Vec<&str> = args.to_vec();
    full.extend(["--out-dir", path_str(&first)]);
    let out = wh(&full);
    if !out.status.success() {
        return Err(format!(
            "run failed: {}",
            String::from_utf8_lossy(&out.stderr)
        ));
    }
    let manifest: PathBuf = first.join("manifest.json");
    let out = wh(&["rerun", path_str(&manifest), "--out-dir", path_str(&again)]);
    if !out.status.success() {
        return Err(format!(
            "rerun failed: {}",
            String::from_utf8_lossy(&out.stderr)
        ));
    }
    let (a, b) = (numeric_outputs(&first), numeric_outputs(&again));
    if a.is_empty() {
        return Err("no outputs".into());
    }
    if a.keys().ne(b.keys()) {
        return Err(format!(
            "file sets differ: {:?} vs {:?}",
            a.keys(),
            b.keys()
        ));
    }
    for (name, bytes) in &a {
        if &b[name] != bytes {
            return Err(format!("{name} differs"));
        }
    }
    Ok(())
}

/// Small inputs for every subcommand that reads files.
pub struct Fixtures {
    pub dir: tempfile::TempDir,
}

impl Fixtures {
    pub fn new() -> Self {
        let dir = tempfile::tempdir().unwrap();
        std::fs::write(
            dir.path().join("toy.tsv"),
            "cues\toutcomes\na_b\tX\na\tY\nb_c\tX\n",
        )
        .unwrap();
        let mut corpus = String::new();
        for n in 0..200 {
            let (target, tail) = if n % 2 == 0 {
                ("cat", "purrs")
            } else {
                ("dog", "barks")
            };
            corpus.push_str(&format!(
                "The old {target} {tail} loudly. A small {target} sleeps.\n"
            ));
        }
        std::fs::write(dir.path().join("corpus.txt"), corpus).unwrap();
        std::fs::write(
            dir.path().join("gold.tsv"),
            "word1\tword2\tscore\ncat\tdog\t7.5\nold\tsmall\t3.0\ncat\tloudly\t1.0\ndog\tsleeps\t2.0\nzebra\tcat\t4.0\n",
        )
        .unwrap();
        Self { dir }
    }

    pub fn path(&self, name: &str) -> String {
        path_str(&self.dir.path().join(name)).to_owned()
    }
}

/// One invocation per subcommand, sized to run in well under a second.
pub fn subcommand_runs(f: &Fixtures) -> Vec<(&'static str, Vec<String>)> {
    let s = |v: &[&str]| v.iter().map(|x| x.to_string()).collect::<Vec<_>>();
    vec![
        (
            "train",
            s(&[
                "train",
                "--events",
                &f.path("toy.tsv"),
                "--gamma",
                "0.1",
                "--epochs",
                "3",
                "--shuffle-seed",
                "7",
                "--watch",
                "a:X",
            ]),
        ),
        (
            "simulate-color",
            s(&["simulate-color", "--n", "5000", "--seed", "3"]),
        ),
        ("converge", s(&["converge", "--repeats", "20"])),
        (
            "embed",
            s(&[
                "embed",
                "--corpus",
                &f.path("corpus.txt"),
                "--dim",
                "4",
                "--gamma",
                "0.01",
                "--selection",
                "sample-diverse",
                "--seed",
                "5",
                "--gold",
                &f.path("gold.tsv"),
            ]),
        ),
        (
            "bench",
            s(&["bench", "--j", "300", "--k", "300", "--events", "50"]),
        ),
        (
            "pupil",
            s(&[
                "pupil",
                "--trials",
                "40",
                "--samples",
                "10",
                "--conditions",
                "3",
            ]),
        ),
    ]
}
