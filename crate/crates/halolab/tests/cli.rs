//! End-to-end checks of the command-line front end: reproducibility and exit codes.

use halolab::cli::{exit_code, main_with_args, Outcome, EXIT_FALSIFIED, EXIT_OK, EXIT_RESOURCE, EXIT_USAGE};
use halolab::HaloError;
use std::fs;
use std::path::{Path, PathBuf};

fn dir(name: &str) -> PathBuf {
    let d = Path::new(env!("CARGO_TARGET_TMPDIR")).join("cli").join(name);
    let _ = fs::remove_dir_all(&d);
    fs::create_dir_all(&d).unwrap();
    d
}

fn spec(d: &Path, body: &str) -> String {
    let p = d.join("spec.json");
    fs::write(&p, body).unwrap();
    p.display().to_string()
}

fn run(args: &[&str]) -> i32 {
    main_with_args(std::iter::once("halolab").chain(args.iter().copied()))
}

/// Runs `args` into two fresh directories and compares every written file.
fn reproducible(name: &str, body: &str, args: &[&str], files: &[&str]) {
    let outs: Vec<PathBuf> = (0..2).map(|i| dir(&format!("{name}{i}"))).collect();
    for o in &outs {
        let s = spec(o, body);
        let mut a = args.to_vec();
        a.extend(["--spec", &s, "--out", o.to_str().unwrap()]);
        assert_eq!(run(&a), EXIT_OK, "{name}");
    }
    for f in files {
        let (x, y) = (fs::read(outs[0].join(f)).unwrap(), fs::read(outs[1].join(f)).unwrap());
        assert!(!x.is_empty(), "{name}/{f} is empty");
        assert_eq!(x, y, "{name}/{f} differs between runs");
    }
}

#[test]
fn same_seed_gives_identical_files() {
    reproducible(
        "couple",
        r#"{"schema":"halolab/1","triples":300}"#,
        &["couple", "--seed", "2026"],
        &["couple.csv", "couple.json"],
    );
    reproducible(
        "moments",
        r#"{"schema":"halolab/1","samples":3000,"depths":[5,6,7]}"#,
        &["moments", "--seed", "2026"],
        &["moments_samples.csv", "moments_series.csv", "moments.json"],
    );
    reproducible(
        "lift",
        r#"{"schema":"halolab/1","samples":100}"#,
        &["lift", "--seed", "2026"],
        &["lift.csv", "lift.json"],
    );
}

#[test]
fn different_seeds_differ() {
    let body = r#"{"schema":"halolab/1","triples":300}"#;
    let files: Vec<Vec<u8>> = ["7", "8"]
        .iter()
        .map(|seed| {
            let o = dir(&format!("seed{seed}"));
            let s = spec(&o, body);
            assert_eq!(run(&["couple", "--seed", seed, "--spec", &s, "--out", o.to_str().unwrap()]), EXIT_OK);
            fs::read(o.join("couple.csv")).unwrap()
        })
        .collect();
    assert_ne!(files[0], files[1]);
}

#[test]
fn exit_codes() {
    let o = dir("codes");
    let out = o.to_str().unwrap();
    assert_eq!(run(&["verify-tiling", "--out", out]), EXIT_OK);
    assert_eq!(run(&["--help"]), EXIT_OK);
    assert_eq!(run(&["couple", "--out", out]), EXIT_USAGE, "missing seed");
    assert_eq!(run(&["frobnicate"]), EXIT_USAGE);
    let s = spec(&o, r#"{"schema":"halolab/1","bogus":1}"#);
    assert_eq!(run(&["verify-tiling", "--spec", &s, "--out", out]), EXIT_USAGE, "unknown field");
    let s = spec(&o, r#"{"levels":[0]}"#);
    assert_eq!(run(&["verify-tiling", "--spec", &s, "--out", out]), EXIT_USAGE, "missing schema");
    assert_eq!(run(&["verify-tiling", "--enum-cap", "2", "--out", out]), EXIT_RESOURCE);
    let falsified = Ok(Outcome { ok: false, lines: vec![], files: vec![] });
    assert_eq!(exit_code(&falsified), EXIT_FALSIFIED);
    assert_eq!(exit_code(&Err(HaloError::Invariant("x".into()))), EXIT_FALSIFIED);
}
