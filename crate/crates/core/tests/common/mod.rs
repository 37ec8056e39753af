#![allow(dead_code)]

use geoblock::cli::{run, RunOutcome};
use serde_json::Value;

/// One invocation of every subcommand, with the documented examples first.
pub const COMMANDS: &[&[&str]] = &[
    &["torus", "block", "--config", "0/1,0/1:1/3,1/5", "--midpoints"],
    &["torus", "min-block", "--config", "0:1/2", "--lengths", "10"],
    &["sphere", "classify", "--x", "1,0,0", "--y", "-1,0,0"],
    &["torus", "enumerate", "--config", "0,0:1/3,1/5", "--lattice", "1,0;0,1", "--length", "2"],
    &["torus", "block", "--config", "0,0:1/3,1/5", "--set", "1/6,1/10;2/3,1/10", "--length", "2"],
    &["torus", "min-block", "--config", "0,0:1/3,1/5", "--lengths", "2,4"],
    &["sphere", "classify", "--space", "rp", "--x", "1,0,0", "--y", "0.6,0.8,0"],
    &["sphere", "classify", "--space", "cp", "--n", "2", "--x", "1,0,0", "--y", "0,1,0"],
    &["sphere", "arcs", "--x", "1,0,0", "--y", "0,1,0"],
    &["sphere", "witness", "--x", "0,0,1", "--random", "50", "--seed", "7"],
    &["group", "classify", "--n", "2", "--k1", "I", "--k2", "diag(0.4,-0.4)"],
    &["group", "block", "--n", "3", "--k1", "I", "--k2", "diag(0.3,0.5,-0.8)", "--length", "10"],
    &["cover", "check", "--kind", "torus", "--config", "0,0:1/3,1/5", "--sublattice", "2,0;0,2", "--length", "4"],
    &["cover", "lift", "--kind", "torus", "--config", "0:1/3", "--sublattice", "2", "--length", "6"],
    &["cover", "project", "--kind", "projective", "--x", "1,0,0", "--y", "0.6,0.8,0"],
    &["cover", "check", "--kind", "projective", "--x", "1,0,0", "--y", "0.6,0.8,0", "--length", "6.3"],
];

pub fn go(args: &[&str]) -> RunOutcome {
    run(std::iter::once("geoblock").chain(args.iter().copied()))
}

/// The report text with the timing field removed.
pub fn without_timing(out: &RunOutcome) -> String {
    let mut v: Value = serde_json::from_str(&out.stdout).expect("stdout is a JSON report");
    v.as_object_mut().unwrap().remove("timing");
    serde_json::to_string_pretty(&v).unwrap()
}

pub fn schema() -> Value {
    let text = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/schema/report.schema.json"))
        .expect("schema ships with the crate");
    serde_json::from_str(&text).unwrap()
}
