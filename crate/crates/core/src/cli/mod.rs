//! The `geoblock` command line.
//!
//! Every run produces a JSON report (schema [`SCHEMA_ID`], shipped as
//! `schema/report.schema.json`) with the normalized inputs, the outputs, the
//! certificates that were established and the elapsed time. Apart from the
//! `timing` field, reports are byte-identical across identical runs.
//!
//! Exit codes: 0 success (secure, blocked, verified), 1 a counterexample or
//! insecure verdict was found, 2 input error, 3 search budget or numerical
//! precision exhausted.

pub mod parse;
pub mod report;
pub mod svg;

use std::path::{Path, PathBuf};
use std::sync::Arc;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use serde_json::{json, Value};

use crate::blocking::{BlockingSet, Certificate, Provenance};
use crate::compact_groups::{
    classify_group_config, defect, group_blocking_set, group_geodesics, BiInvariantMetric,
    GroupConfiguration,
};
use crate::coverings::{Covering, ProjectiveCover, ProjectivePoint, TorusCover};
use crate::error::{Error, Result};
use crate::lattice::{reduce, Lattice, LengthBound, RationalMatrix, TorusPoint};
use crate::optimizer::{security_profile, SearchOptions, DEFAULT_NODE_BUDGET};
use crate::rank_one::{
    antipodal_escape_witness, arc_clearance, classify, sphere_arcs, RankOneKind, RankOneSpace,
    SecurityStatus, SpherePoint,
};
use crate::torus::{
    connecting_geodesics, midpoint_set, verify_bounded, verify_universal, BoundedCheck,
    TorusConfiguration, UniversalCheck,
};

pub use svg::render_torus_svg;

pub const SCHEMA_ID: &str = "geoblock-report/1";
/// Overrides the optimizer's node budget.
pub const NODE_BUDGET_ENV: &str = "GEOBLOCK_NODE_BUDGET";

pub const EXIT_OK: i32 = 0;
pub const EXIT_FOUND: i32 = 1;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_RESOURCE: i32 = 3;

/// Group geodesics must pass a blocker at `t = 1/2` within this distance.
pub const GROUP_MIDPOINT_TOL: f64 = 1e-8;

#[derive(Parser, Debug)]
#[command(name = "geoblock", version, about = "Blocking sets for connecting geodesics")]
struct Cli {
    /// Re-run the command recorded in a report and compare the results.
    #[arg(long, global = true, value_name = "FILE")]
    recheck: Option<PathBuf>,
    /// Write the report to FILE instead of standard output.
    #[arg(long, global = true, value_name = "FILE")]
    output: Option<PathBuf>,
    #[command(subcommand)]
    command: Option<Command>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Flat tori R^n / Λ with exact rational data.
    Torus {
        #[command(subcommand)]
        cmd: TorusCmd,
    },
    /// Spheres and the other compact rank-one spaces.
    Sphere {
        #[command(subcommand)]
        cmd: SphereCmd,
    },
    /// SU(n) with the bi-invariant metric.
    Group {
        #[command(subcommand)]
        cmd: GroupCmd,
    },
    /// Transfer through finite coverings.
    Cover {
        #[command(subcommand)]
        cmd: CoverCmd,
    },
}

#[derive(Args, Debug, Clone)]
struct TorusArgs {
    /// Configuration `x:y`, coordinates separated by commas.
    #[arg(long, allow_hyphen_values = true)]
    config: String,
    /// Basis matrix B, rows separated by `;`; the lattice is B·Z^n.
    #[arg(long, alias = "lattice", allow_hyphen_values = true)]
    basis: Option<String>,
    /// Gram matrix of the ambient inner product.
    #[arg(long, allow_hyphen_values = true)]
    gram: Option<String>,
}

#[derive(Subcommand, Debug)]
enum TorusCmd {
    /// List connecting geodesics up to a length bound.
    Enumerate {
        #[command(flatten)]
        torus: TorusArgs,
        /// Rational length bound.
        #[arg(long)]
        length: String,
        /// Draw the geodesics in the fundamental domain (2-tori only).
        #[arg(long, value_name = "FILE")]
        svg: Option<PathBuf>,
    },
    /// Check a blocking set: universally for `--midpoints` (or a set without
    /// `--length`), up to the bound otherwise.
    Block {
        #[command(flatten)]
        torus: TorusArgs,
        /// Points separated by `;`.
        #[arg(long, allow_hyphen_values = true, conflicts_with = "midpoints")]
        set: Option<String>,
        #[arg(long)]
        midpoints: bool,
        #[arg(long)]
        length: Option<String>,
        #[arg(long, value_name = "FILE")]
        svg: Option<PathBuf>,
    },
    /// Certified minimum blocking sets at each bound.
    MinBlock {
        #[command(flatten)]
        torus: TorusArgs,
        /// Increasing rational bounds separated by commas.
        #[arg(long)]
        lengths: String,
        /// Also write the profile as CSV.
        #[arg(long, value_name = "FILE")]
        csv: Option<PathBuf>,
    },
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum SpaceArg {
    Sphere,
    Rp,
    Cp,
    Hp,
    F2,
}

#[derive(Subcommand, Debug)]
enum SphereCmd {
    /// Security verdict for `{x, y}`.
    Classify {
        #[arg(long, value_enum, default_value = "sphere")]
        space: SpaceArg,
        /// Dimension parameter; inferred from the points for spheres and RP^n.
        #[arg(long)]
        n: Option<usize>,
        #[arg(long, allow_hyphen_values = true)]
        x: String,
        #[arg(long, allow_hyphen_values = true)]
        y: String,
    },
    /// Connecting geodesics of `{x, y}` on the round sphere.
    Arcs {
        #[arg(long, allow_hyphen_values = true)]
        x: String,
        #[arg(long, allow_hyphen_values = true)]
        y: String,
    },
    /// A half great circle from x to -x avoiding the obstacles.
    Witness {
        #[arg(long, allow_hyphen_values = true)]
        x: String,
        /// Obstacle points separated by `;`.
        #[arg(long, allow_hyphen_values = true)]
        obstacles: Option<String>,
        /// Add this many random obstacles.
        #[arg(long)]
        random: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

#[derive(Args, Debug, Clone)]
struct GroupArgs {
    /// Matrix size of SU(n).
    #[arg(long)]
    n: usize,
    /// `I`, `-I`, `scalar(θ)`, `diag(θ_1,…,θ_n)` or a complex matrix.
    #[arg(long, allow_hyphen_values = true)]
    k1: String,
    #[arg(long, allow_hyphen_values = true)]
    k2: String,
}

#[derive(Subcommand, Debug)]
enum GroupCmd {
    /// Security verdict and defect of `{k1, k2}`.
    Classify {
        #[command(flatten)]
        group: GroupArgs,
    },
    /// The square-root blocking set of a regular pair.
    Block {
        #[command(flatten)]
        group: GroupArgs,
        /// Also check every geodesic up to this group length.
        #[arg(long)]
        length: Option<String>,
        /// Metric scale c in `-c·Re tr(XY)`.
        #[arg(long, default_value = "1")]
        scale: String,
    },
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum CoverKind {
    Torus,
    Projective,
}

#[derive(Args, Debug, Clone)]
struct CoverArgs {
    #[arg(long, value_enum)]
    kind: CoverKind,
    /// Torus: configuration downstairs.
    #[arg(long, allow_hyphen_values = true)]
    config: Option<String>,
    #[arg(long, alias = "lattice", allow_hyphen_values = true)]
    basis: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    gram: Option<String>,
    /// Torus: integer matrix M; the upper lattice is generated by B·M.
    #[arg(long, allow_hyphen_values = true)]
    sublattice: Option<String>,
    /// Projective: representatives of the two points.
    #[arg(long, allow_hyphen_values = true)]
    x: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    y: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    length: Option<String>,
}

#[derive(Subcommand, Debug)]
enum CoverCmd {
    /// Compare the lifted family with the union of upstairs families.
    Check {
        #[command(flatten)]
        cover: CoverArgs,
    },
    /// Lift a downstairs blocking set (default: the canonical one).
    Lift {
        #[command(flatten)]
        cover: CoverArgs,
        #[arg(long, allow_hyphen_values = true)]
        set: Option<String>,
    },
    /// Project an upstairs set (default: the canonical sets of every fiber
    /// configuration).
    Project {
        #[command(flatten)]
        cover: CoverArgs,
        #[arg(long, allow_hyphen_values = true)]
        set: Option<String>,
    },
}

/// Result of one invocation.
#[derive(Debug)]
pub struct RunOutcome {
    pub code: i32,
    pub report: Option<Value>,
    pub stdout: String,
    pub stderr: String,
}

struct Done {
    code: i32,
    inputs: Value,
    outputs: Value,
    certificates: Vec<Value>,
}

fn exit_code_for(e: &Error) -> i32 {
    match e {
        Error::BudgetExhausted { .. } | Error::IllConditioned { .. } => EXIT_RESOURCE,
        _ => EXIT_INPUT,
    }
}

fn error_kind(e: &Error) -> &'static str {
    match e {
        Error::Parse { .. } => "parse",
        Error::BudgetExhausted { .. } => "budget_exhausted",
        Error::IllConditioned { .. } => "ill_conditioned",
        _ => "input",
    }
}

/// Runs the command line `argv` (including the program name).
pub fn run<I, T>(argv: I) -> RunOutcome
where
    I: IntoIterator<Item = T>,
    T: Into<String>,
{
    let argv: Vec<String> = argv.into_iter().map(Into::into).collect();
    let echo: Vec<String> = argv.iter().skip(1).cloned().collect();
    let start = Instant::now();
    let cli = match Cli::try_parse_from(&argv) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            let rendered = e.render().to_string();
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                return RunOutcome {
                    code: EXIT_OK,
                    report: None,
                    stdout: rendered,
                    stderr: String::new(),
                };
            }
            let report = error_report(&echo, "usage", &rendered, start);
            return finish(EXIT_INPUT, report, None, rendered);
        }
    };
    let output = cli.output.clone();
    let result = match (&cli.recheck, cli.command) {
        (Some(path), None) => recheck(path),
        (Some(_), Some(_)) => Err(Error::InvalidInput(
            "--recheck takes no subcommand".into(),
        )),
        (None, Some(cmd)) => dispatch(cmd),
        (None, None) => Err(Error::InvalidInput("missing subcommand; see --help".into())),
    };
    match result {
        Ok(done) => {
            let report = json!({
                "schema": SCHEMA_ID,
                "command": echo,
                "exit_code": done.code,
                "inputs": done.inputs,
                "outputs": done.outputs,
                "certificates": done.certificates,
                "timing": { "elapsed_ms": start.elapsed().as_secs_f64() * 1e3 },
            });
            finish(done.code, report, output.as_deref(), String::new())
        }
        Err(e) => {
            let code = exit_code_for(&e);
            let message = e.to_string();
            let mut report = error_report(&echo, error_kind(&e), &message, start);
            report["exit_code"] = json!(code);
            finish(code, report, output.as_deref(), format!("error: {message}\n"))
        }
    }
}

fn error_report(echo: &[String], kind: &str, message: &str, start: Instant) -> Value {
    json!({
        "schema": SCHEMA_ID,
        "command": echo,
        "exit_code": EXIT_INPUT,
        "error": { "kind": kind, "message": message },
        "timing": { "elapsed_ms": start.elapsed().as_secs_f64() * 1e3 },
    })
}

fn finish(code: i32, report: Value, output: Option<&Path>, mut stderr: String) -> RunOutcome {
    let mut text = serde_json::to_string_pretty(&report).expect("reports serialize");
    text.push('\n');
    let stdout = match output {
        Some(path) => match std::fs::write(path, &text) {
            Ok(()) => String::new(),
            Err(e) => {
                stderr.push_str(&format!("error: cannot write {}: {e}\n", path.display()));
                return RunOutcome {
                    code: EXIT_INPUT,
                    report: Some(report),
                    stdout: text,
                    stderr,
                };
            }
        },
        None => text,
    };
    RunOutcome {
        code,
        report: Some(report),
        stdout,
        stderr,
    }
}

fn dispatch(cmd: Command) -> Result<Done> {
    match cmd {
        Command::Torus { cmd } => torus_command(cmd),
        Command::Sphere { cmd } => sphere_command(cmd),
        Command::Group { cmd } => group_command(cmd),
        Command::Cover { cmd } => cover_command(cmd),
    }
}

fn node_budget() -> Result<SearchOptions> {
    match std::env::var(NODE_BUDGET_ENV) {
        Ok(v) => {
            let node_budget = v.trim().parse::<u64>().map_err(|_| Error::Parse {
                location: NODE_BUDGET_ENV.into(),
                message: format!("`{v}` is not a node count"),
            })?;
            Ok(SearchOptions { node_budget })
        }
        Err(_) => Ok(SearchOptions {
            node_budget: DEFAULT_NODE_BUDGET,
        }),
    }
}

fn write_file(path: &Path, contents: &str) -> Result<()> {
    std::fs::write(path, contents)
        .map_err(|e| Error::InvalidInput(format!("cannot write {}: {e}", path.display())))
}

fn build_lattice(n: usize, basis: Option<&str>, gram: Option<&str>) -> Result<Arc<Lattice>> {
    let basis = match basis {
        Some(b) => parse::parse_rational_matrix(b, "--basis")?,
        None => RationalMatrix::identity(n),
    };
    let gram = match gram {
        Some(g) => parse::parse_rational_matrix(g, "--gram")?,
        None => RationalMatrix::identity(n),
    };
    if basis.dim() != n || gram.dim() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: if basis.dim() != n { basis.dim() } else { gram.dim() },
        });
    }
    Ok(Arc::new(Lattice::new(basis, gram)?))
}

fn torus_config(config: &str, basis: Option<&str>, gram: Option<&str>) -> Result<TorusConfiguration> {
    let (x, y) = parse::parse_config(config, "--config")?;
    let lattice = build_lattice(x.dim(), basis, gram)?;
    TorusConfiguration::from_vectors(&x, &y, &lattice)
}

fn torus_inputs(cfg: &TorusConfiguration) -> Value {
    json!({
        "x": report::torus_point(cfg.x()),
        "y": report::torus_point(cfg.y()),
        "lattice": report::lattice(cfg.lattice()),
    })
}

fn length_bound(s: &str, location: &str) -> Result<LengthBound> {
    LengthBound::new(parse::parse_rational(s, location)?)
}

fn torus_points(s: &str, lattice: &Arc<Lattice>, location: &str) -> Result<Vec<TorusPoint>> {
    parse::parse_rational_points(s, location)?
        .iter()
        .map(|p| reduce(p, lattice))
        .collect()
}

fn cert_entry(subject: &str, c: &Certificate) -> Value {
    let mut v = report::certificate(c);
    v["subject"] = json!(subject);
    v
}

fn torus_command(cmd: TorusCmd) -> Result<Done> {
    match cmd {
        TorusCmd::Enumerate { torus, length, svg } => {
            let cfg = torus_config(&torus.config, torus.basis.as_deref(), torus.gram.as_deref())?;
            let bound = length_bound(&length, "--length")?;
            let family = connecting_geodesics(&cfg, &bound);
            if let Some(path) = &svg {
                write_file(path, &render_torus_svg(&family, None)?)?;
            }
            let mut inputs = torus_inputs(&cfg);
            inputs["length_bound"] = report::length_bound(&bound);
            Ok(Done {
                code: EXIT_OK,
                inputs,
                outputs: json!({ "family": report::torus_family(&family) }),
                certificates: vec![],
            })
        }
        TorusCmd::Block {
            torus,
            set,
            midpoints,
            length,
            svg,
        } => {
            let cfg = torus_config(&torus.config, torus.basis.as_deref(), torus.gram.as_deref())?;
            let blocking = match (&set, midpoints) {
                (Some(s), false) => BlockingSet::new(
                    torus_points(s, cfg.lattice(), "--set")?,
                    Provenance::Manual,
                ),
                (None, true) => midpoint_set(&cfg),
                _ => {
                    return Err(Error::InvalidInput(
                        "give exactly one of --set and --midpoints".into(),
                    ))
                }
            };
            let bound = length.as_deref().map(|l| length_bound(l, "--length")).transpose()?;
            let mut inputs = torus_inputs(&cfg);
            inputs["set"] = Value::Array(blocking.points().iter().map(report::torus_point).collect());
            inputs["midpoints"] = json!(midpoints);
            inputs["length_bound"] = bound.as_ref().map_or(Value::Null, report::length_bound);
            let mut outputs = serde_json::Map::new();
            let mut certificates = vec![];
            let mut code = EXIT_OK;
            if midpoints || bound.is_none() {
                match verify_universal(&cfg, &blocking)? {
                    UniversalCheck::Certified(b) => {
                        certificates.push(cert_entry("blocking_set", b.certificate()));
                        outputs.insert("universal".into(), json!({ "blocked": true }));
                        outputs.insert("blocking".into(), report::torus_blocking(&b));
                    }
                    UniversalCheck::Violation { residue, midpoint } => {
                        code = EXIT_FOUND;
                        outputs.insert(
                            "universal".into(),
                            json!({
                                "blocked": false,
                                "residue": residue,
                                "unblocked_midpoint": report::torus_point(&midpoint),
                            }),
                        );
                        outputs.insert("blocking".into(), report::torus_blocking(&blocking));
                    }
                }
            }
            if let Some(bound) = &bound {
                let check = verify_bounded(&cfg, &blocking, bound)?;
                let v = match &check {
                    BoundedCheck::Blocked => {
                        certificates.push(cert_entry(
                            "blocking_set",
                            &Certificate::BoundedLength(bound.clone()),
                        ));
                        json!({ "blocked": true, "length_bound": report::length_bound(bound) })
                    }
                    BoundedCheck::Unblocked(g) => {
                        code = EXIT_FOUND;
                        json!({
                            "blocked": false,
                            "length_bound": report::length_bound(bound),
                            "witness": report::torus_geodesic(g),
                        })
                    }
                };
                outputs.insert("bounded".into(), v);
                if !outputs.contains_key("blocking") {
                    outputs.insert("blocking".into(), report::torus_blocking(&blocking));
                }
            }
            if let Some(path) = &svg {
                let l = bound.clone().unwrap_or(LengthBound::new(crate::lattice::int(2))?);
                write_file(path, &render_torus_svg(&connecting_geodesics(&cfg, &l), Some(&blocking))?)?;
            }
            Ok(Done {
                code,
                inputs,
                outputs: Value::Object(outputs),
                certificates,
            })
        }
        TorusCmd::MinBlock { torus, lengths, csv } => {
            let cfg = torus_config(&torus.config, torus.basis.as_deref(), torus.gram.as_deref())?;
            let bounds = parse::parse_lengths(&lengths, "--lengths")?
                .into_iter()
                .map(LengthBound::new)
                .collect::<Result<Vec<_>>>()?;
            let options = node_budget()?;
            let profile = security_profile(&cfg, &bounds, &options)?;
            let ceiling = midpoint_set(&cfg).len();
            let mut code = EXIT_OK;
            let mut entries = vec![];
            let mut certificates = vec![];
            let mut rows = vec![];
            for e in &profile {
                let lb = report::length_bound(&e.bound);
                match &e.result {
                    Ok(c) => {
                        certificates.push(cert_entry(
                            &format!("witness@{}", e.bound),
                            c.witness.certificate(),
                        ));
                        let mut v = report::optimality(c);
                        v["length_bound"] = lb;
                        v["family_size"] = json!(e.family_size);
                        entries.push(v);
                        rows.push([
                            e.bound.to_string(),
                            e.family_size.to_string(),
                            c.optimum.to_string(),
                            c.nodes.to_string(),
                            report::lower_bound_proof(&c.lower_bound_proof)["kind"]
                                .as_str()
                                .unwrap_or_default()
                                .to_string(),
                        ]);
                    }
                    Err(err) => {
                        code = EXIT_RESOURCE;
                        entries.push(json!({
                            "length_bound": lb,
                            "family_size": e.family_size,
                            "error": { "kind": error_kind(err), "message": err.to_string() },
                        }));
                        rows.push([
                            e.bound.to_string(),
                            e.family_size.to_string(),
                            String::new(),
                            String::new(),
                            error_kind(err).to_string(),
                        ]);
                    }
                }
            }
            if let Some(path) = &csv {
                let mut w = csv::Writer::from_writer(Vec::new());
                let io = |e: csv::Error| Error::InvalidInput(format!("csv: {e}"));
                w.write_record(["length_bound", "family_size", "optimum", "nodes", "proof"])
                    .map_err(io)?;
                for r in &rows {
                    w.write_record(r).map_err(io)?;
                }
                let bytes = w.into_inner().map_err(|e| Error::InvalidInput(e.to_string()))?;
                write_file(path, &String::from_utf8_lossy(&bytes))?;
            }
            let mut inputs = torus_inputs(&cfg);
            inputs["length_bounds"] = Value::Array(bounds.iter().map(report::length_bound).collect());
            inputs["node_budget"] = json!(options.node_budget);
            Ok(Done {
                code,
                inputs,
                outputs: json!({ "profile": entries, "midpoint_set_size": ceiling }),
                certificates,
            })
        }
    }
}

fn sphere_point(s: &str, location: &str) -> Result<SpherePoint> {
    let v = parse::parse_real_vector(s, location)?;
    SpherePoint::new(v).map_err(|e| Error::Parse {
        location: location.into(),
        message: e.to_string(),
    })
}

fn sphere_command(cmd: SphereCmd) -> Result<Done> {
    match cmd {
        SphereCmd::Classify { space, n, x, y } => {
            let xp = sphere_point(&x, "--x")?;
            let yp = sphere_point(&y, "--y")?;
            let kind = match space {
                SpaceArg::Sphere => RankOneKind::Sphere,
                SpaceArg::Rp => RankOneKind::RealProjective,
                SpaceArg::Cp => RankOneKind::ComplexProjective,
                SpaceArg::Hp => RankOneKind::QuaternionicProjective,
                SpaceArg::F2 => RankOneKind::CayleyPlane,
            };
            let n = match (kind, n) {
                (RankOneKind::Sphere | RankOneKind::RealProjective, None) => xp.ambient_dim() - 1,
                (_, Some(n)) => n,
                (_, None) => 2,
            };
            let space = RankOneSpace::new(kind, n)?;
            let v = classify(&space, &xp, &yp)?;
            let code = if v.status == SecurityStatus::Insecure { EXIT_FOUND } else { EXIT_OK };
            let certificates = v
                .blocking
                .as_ref()
                .map(|b| vec![cert_entry("blocking_set", b.certificate())])
                .unwrap_or_default();
            Ok(Done {
                code,
                inputs: json!({
                    "space": space.name(),
                    "x": report::sphere_point(&xp),
                    "y": report::sphere_point(&yp),
                }),
                outputs: json!({ "verdict": report::verdict(&v, report::sphere_point) }),
                certificates,
            })
        }
        SphereCmd::Arcs { x, y } => {
            let xp = sphere_point(&x, "--x")?;
            let yp = sphere_point(&y, "--y")?;
            let arcs = sphere_arcs(&xp, &yp)?;
            Ok(Done {
                code: EXIT_OK,
                inputs: json!({ "x": report::sphere_point(&xp), "y": report::sphere_point(&yp) }),
                outputs: json!({ "arcs": report::sphere_arcs(&arcs) }),
                certificates: vec![],
            })
        }
        SphereCmd::Witness {
            x,
            obstacles,
            random,
            seed,
        } => {
            let xp = sphere_point(&x, "--x")?;
            let mut obs = match &obstacles {
                Some(s) => parse::parse_real_points(s, "--obstacles")?
                    .into_iter()
                    .enumerate()
                    .map(|(i, p)| {
                        SpherePoint::normalized(p).map_err(|e| Error::Parse {
                            location: format!("--obstacles, point {}", i + 1),
                            message: e.to_string(),
                        })
                    })
                    .collect::<Result<Vec<_>>>()?,
                None => vec![],
            };
            if let Some(k) = random {
                let mut rng = rand::rngs::StdRng::seed_from_u64(seed);
                obs.extend((0..k).map(|_| crate::rank_one::random_point(xp.ambient_dim(), &mut rng)));
            }
            let arc = antipodal_escape_witness(&xp, &obs)?;
            let clearance = arc_clearance(&arc, &obs);
            Ok(Done {
                code: EXIT_OK,
                inputs: json!({
                    "x": report::sphere_point(&xp),
                    "obstacles": obs.iter().map(report::sphere_point).collect::<Vec<_>>(),
                    "seed": seed,
                }),
                outputs: json!({
                    "arc": report::great_arc(&arc),
                    "clearance": clearance,
                    "margin": crate::rank_one::ESCAPE_MARGIN,
                }),
                certificates: vec![],
            })
        }
    }
}

fn group_config(g: &GroupArgs) -> Result<GroupConfiguration> {
    let k1 = parse::parse_unitary(&g.k1, g.n, "--k1")?;
    let k2 = parse::parse_unitary(&g.k2, g.n, "--k2")?;
    GroupConfiguration::new(k1, k2)
}

fn group_inputs(cfg: &GroupConfiguration) -> Value {
    json!({
        "n": cfg.n(),
        "k1": report::unitary(cfg.k1()),
        "k2": report::unitary(cfg.k2()),
    })
}

fn group_command(cmd: GroupCmd) -> Result<Done> {
    match cmd {
        GroupCmd::Classify { group } => {
            let cfg = group_config(&group)?;
            let d = defect(&cfg)?;
            let v = classify_group_config(&cfg)?;
            let code = if v.status == SecurityStatus::Insecure { EXIT_FOUND } else { EXIT_OK };
            let certificates = v
                .blocking
                .as_ref()
                .map(|b| vec![cert_entry("blocking_set", b.certificate())])
                .unwrap_or_default();
            Ok(Done {
                code,
                inputs: group_inputs(&cfg),
                outputs: json!({ "defect": d, "verdict": report::verdict(&v, report::unitary) }),
                certificates,
            })
        }
        GroupCmd::Block {
            group,
            length,
            scale,
        } => {
            let cfg = group_config(&group)?;
            let metric = BiInvariantMetric::new(parse::parse_real(&scale, "--scale")?)?;
            let (reduction, set) = group_blocking_set(&cfg)?;
            let mut outputs = json!({
                "blocking": report::blocking_with(&set, report::unitary),
                "torus": {
                    "angles": reduction.coordinates.angles,
                    "frame": report::unitary(&reduction.coordinates.frame),
                    "config": torus_inputs(&reduction.config),
                },
            });
            let mut code = EXIT_OK;
            if let Some(l) = &length {
                let bound = parse::parse_real(l, "--length")?;
                let family = group_geodesics(&cfg, bound, metric)?;
                let mut worst: f64 = 0.0;
                let mut all = true;
                for g in &family.geodesics {
                    let m = family.point_at(g, 0.5);
                    let d = set
                        .points()
                        .iter()
                        .map(|b| b.distance(&m))
                        .fold(f64::INFINITY, f64::min);
                    worst = worst.max(d);
                    all &= d <= GROUP_MIDPOINT_TOL;
                }
                if !all {
                    code = EXIT_FOUND;
                }
                outputs["midpoint_check"] = json!({
                    "length_bound": bound,
                    "geodesics": family.len(),
                    "lengths": family.geodesics.iter().map(|g| g.length).collect::<Vec<_>>(),
                    "all_pass": all,
                    "max_deviation": worst,
                    "tolerance": GROUP_MIDPOINT_TOL,
                });
            }
            let mut inputs = group_inputs(&cfg);
            inputs["scale"] = json!(metric.scale());
            Ok(Done {
                code,
                inputs,
                outputs,
                certificates: vec![cert_entry("blocking_set", set.certificate())],
            })
        }
    }
}

fn require<'a>(v: &'a Option<String>, flag: &str) -> Result<&'a str> {
    v.as_deref()
        .ok_or_else(|| Error::InvalidInput(format!("{flag} is required for this covering")))
}

fn torus_cover(c: &CoverArgs) -> Result<(TorusCover, TorusConfiguration)> {
    let cfg = torus_config(require(&c.config, "--config")?, c.basis.as_deref(), c.gram.as_deref())?;
    let m = parse::parse_integer_matrix(require(&c.sublattice, "--sublattice")?, "--sublattice")?;
    let cover = TorusCover::sublattice(Arc::clone(cfg.lattice()), &m)?;
    Ok((cover, cfg))
}

fn projective(c: &CoverArgs) -> Result<(ProjectiveCover, ProjectivePoint, ProjectivePoint, Option<f64>)> {
    let x = sphere_point(require(&c.x, "--x")?, "--x")?;
    let y = sphere_point(require(&c.y, "--y")?, "--y")?;
    let cover = ProjectiveCover::new(x.ambient_dim() - 1)?;
    let bound = c.length.as_deref().map(|l| parse::parse_real(l, "--length")).transpose()?;
    Ok((cover, ProjectivePoint::new(x), ProjectivePoint::new(y), bound))
}

fn cover_inputs_torus(cover: &TorusCover, cfg: &TorusConfiguration, bound: &LengthBound) -> Value {
    let mut v = torus_inputs(cfg);
    v["upper_lattice"] = report::lattice(cover.upper());
    v["degree"] = json!(cover.degree());
    v["length_bound"] = report::length_bound(bound);
    v
}

fn cover_inputs_projective(
    cover: &ProjectiveCover,
    x: &ProjectivePoint,
    y: &ProjectivePoint,
    bound: Option<f64>,
) -> Value {
    json!({
        "space": format!("RP^{}", cover.n()),
        "x": report::projective_point(x),
        "y": report::projective_point(y),
        "degree": cover.degree(),
        "length_bound": bound,
    })
}

fn cover_command(cmd: CoverCmd) -> Result<Done> {
    match cmd {
        CoverCmd::Check { cover } => match cover.kind {
            CoverKind::Torus => {
                let (tc, cfg) = torus_cover(&cover)?;
                let bound = length_bound(require(&cover.length, "--length")?, "--length")?;
                let r = tc.verify_preimage_identity(&cfg, &bound)?;
                Ok(Done {
                    code: if r.holds() { EXIT_OK } else { EXIT_FOUND },
                    inputs: cover_inputs_torus(&tc, &cfg, &bound),
                    outputs: json!({ "preimage": report::preimage(&r, report::torus_geodesic) }),
                    certificates: vec![],
                })
            }
            CoverKind::Projective => {
                let (pc, x, y, bound) = projective(&cover)?;
                let r = pc.verify_preimage_identity(&x, &y, bound)?;
                Ok(Done {
                    code: if r.holds() { EXIT_OK } else { EXIT_FOUND },
                    inputs: cover_inputs_projective(&pc, &x, &y, bound),
                    outputs: json!({ "preimage": report::preimage(&r, report::great_arc) }),
                    certificates: vec![],
                })
            }
        },
        CoverCmd::Lift { cover, set } => match cover.kind {
            CoverKind::Torus => {
                let (tc, cfg) = torus_cover(&cover)?;
                let bound = length_bound(require(&cover.length, "--length")?, "--length")?;
                let down = match &set {
                    Some(s) => BlockingSet::new(torus_points(s, tc.lower(), "--set")?, Provenance::Manual),
                    None => midpoint_set(&cfg),
                };
                let up = tc.lift_blocking(&down)?;
                let cert = tc.certify_lifted(&cfg, &up, &bound)?;
                let mut inputs = cover_inputs_torus(&tc, &cfg, &bound);
                inputs["set"] = Value::Array(down.points().iter().map(report::torus_point).collect());
                let lifted = cert.as_ref().unwrap_or(&up);
                Ok(Done {
                    code: if cert.is_some() { EXIT_OK } else { EXIT_FOUND },
                    inputs,
                    outputs: json!({ "lifted": report::torus_blocking(lifted), "blocks_lifted_family": cert.is_some() }),
                    certificates: vec![cert_entry("lifted_set", lifted.certificate())],
                })
            }
            CoverKind::Projective => {
                let (pc, x, y, bound) = projective(&cover)?;
                let down = match &set {
                    Some(s) => BlockingSet::new(
                        parse::parse_real_points(s, "--set")?
                            .into_iter()
                            .map(|p| SpherePoint::normalized(p).map(ProjectivePoint::new))
                            .collect::<Result<Vec<_>>>()?,
                        Provenance::Manual,
                    ),
                    None => pc.blocking_from_fibers(&x, &y)?,
                };
                let up = pc.lift_blocking(&down)?;
                let ok = pc.certify_lifted(&x, &y, &up, bound)?;
                let mut inputs = cover_inputs_projective(&pc, &x, &y, bound);
                inputs["set"] = Value::Array(down.points().iter().map(report::projective_point).collect());
                Ok(Done {
                    code: if ok { EXIT_OK } else { EXIT_FOUND },
                    inputs,
                    outputs: json!({
                        "lifted": report::blocking_with(&up, report::sphere_point),
                        "blocks_lifted_family": ok,
                    }),
                    certificates: vec![],
                })
            }
        },
        CoverCmd::Project { cover, set } => match cover.kind {
            CoverKind::Torus => {
                let (tc, cfg) = torus_cover(&cover)?;
                let bound = length_bound(require(&cover.length, "--length")?, "--length")?;
                let up = match &set {
                    Some(s) => BlockingSet::new(torus_points(s, tc.upper(), "--set")?, Provenance::Manual),
                    None => {
                        let mut pts = vec![];
                        for c in tc.fiber_configurations(&cfg)? {
                            pts.extend(midpoint_set(&c).points().iter().cloned());
                        }
                        BlockingSet::new(pts, Provenance::CanonicalMidpoint)
                    }
                };
                let down = tc.project_blocking(&up)?;
                let cert = tc.certify_projected(&cfg, &down, &bound)?;
                let projected = cert.as_ref().unwrap_or(&down);
                let mut inputs = cover_inputs_torus(&tc, &cfg, &bound);
                inputs["set"] = Value::Array(up.points().iter().map(report::torus_point).collect());
                Ok(Done {
                    code: if cert.is_some() { EXIT_OK } else { EXIT_FOUND },
                    inputs,
                    outputs: json!({ "projected": report::torus_blocking(projected), "blocks_family": cert.is_some() }),
                    certificates: vec![cert_entry("projected_set", projected.certificate())],
                })
            }
            CoverKind::Projective => {
                let (pc, x, y, bound) = projective(&cover)?;
                let down = match &set {
                    Some(s) => {
                        let up = BlockingSet::new(
                            parse::parse_real_points(s, "--set")?
                                .into_iter()
                                .map(SpherePoint::normalized)
                                .collect::<Result<Vec<_>>>()?,
                            Provenance::Manual,
                        );
                        pc.project_blocking(&up)?
                    }
                    None => pc.blocking_from_fibers(&x, &y)?,
                };
                let cert = pc.certify_downstairs(&x, &y, &down, bound)?;
                let projected = cert.as_ref().unwrap_or(&down);
                Ok(Done {
                    code: if cert.is_some() { EXIT_OK } else { EXIT_FOUND },
                    inputs: cover_inputs_projective(&pc, &x, &y, bound),
                    outputs: json!({
                        "projected": report::blocking_with(projected, report::projective_point),
                        "blocks_family": cert.is_some(),
                    }),
                    certificates: vec![cert_entry("projected_set", projected.certificate())],
                })
            }
        },
    }
}

/// Flags whose values name files; they are dropped when replaying.
const FILE_FLAGS: [&str; 3] = ["--output", "--svg", "--csv"];

fn replay_argv(command: &[String]) -> Vec<String> {
    let mut out = vec!["geoblock".to_string()];
    let mut skip = false;
    for a in command {
        if skip {
            skip = false;
            continue;
        }
        if FILE_FLAGS.contains(&a.as_str()) {
            skip = true;
            continue;
        }
        if FILE_FLAGS.iter().any(|f| a.starts_with(&format!("{f}="))) {
            continue;
        }
        out.push(a.clone());
    }
    out
}

fn recheck(path: &Path) -> Result<Done> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::InvalidInput(format!("cannot read {}: {e}", path.display())))?;
    let original: Value = serde_json::from_str(&text).map_err(|e| Error::Parse {
        location: path.display().to_string(),
        message: e.to_string(),
    })?;
    if original.get("schema").and_then(Value::as_str) != Some(SCHEMA_ID) {
        return Err(Error::InvalidInput(format!("{} is not a {SCHEMA_ID} report", path.display())));
    }
    let command: Vec<String> = original
        .get("command")
        .and_then(Value::as_array)
        .map(|a| a.iter().filter_map(|s| s.as_str().map(String::from)).collect())
        .ok_or_else(|| Error::InvalidInput("report has no command".into()))?;
    let argv = replay_argv(&command);
    if argv.iter().any(|a| a == "--recheck") {
        return Err(Error::InvalidInput("cannot recheck a recheck report".into()));
    }
    let fresh = run(argv).report.unwrap_or(Value::Null);
    let differences = report::differences(&original, &fresh, &["timing", "command"]);
    let identical = differences.is_empty();
    Ok(Done {
        code: if identical { EXIT_OK } else { EXIT_FOUND },
        inputs: json!({ "report": path.display().to_string(), "replayed": command }),
        outputs: json!({
            "identical": identical,
            "differences": differences,
            "original_exit_code": original.get("exit_code").cloned().unwrap_or(Value::Null),
        }),
        certificates: vec![],
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn go(args: &[&str]) -> RunOutcome {
        run(std::iter::once("geoblock").chain(args.iter().copied()))
    }

    #[test]
    fn universal_block_exit_zero() {
        let r = go(&["torus", "block", "--config", "0/1,0/1:1/3,1/5", "--midpoints"]);
        assert_eq!(r.code, 0, "{}", r.stderr);
        let rep = r.report.unwrap();
        assert_eq!(rep["certificates"][0]["kind"], "universal");
        assert_eq!(rep["outputs"]["blocking"]["size"], 4);
    }

    #[test]
    fn min_block_circle() {
        let r = go(&["torus", "min-block", "--config", "0:1/2", "--lengths", "10"]);
        assert_eq!(r.code, 0, "{}", r.stderr);
        assert_eq!(r.report.unwrap()["outputs"]["profile"][0]["optimum"], 2);
    }

    #[test]
    fn antipodal_exit_one() {
        let r = go(&["sphere", "classify", "--x", "1,0,0", "--y", "-1,0,0"]);
        assert_eq!(r.code, 1);
        let v = &r.report.unwrap()["outputs"]["verdict"];
        assert_eq!(v["status"], "insecure");
        assert_eq!(v["reason"], "antipodal");
    }

    #[test]
    fn parse_error_exit_two_with_location() {
        let r = go(&["torus", "block", "--config", "0,0:1/3,q", "--midpoints"]);
        assert_eq!(r.code, 2);
        assert!(r.stderr.contains("--config, point 2, coordinate 2"), "{}", r.stderr);
        assert_eq!(r.report.unwrap()["error"]["kind"], "parse");
    }

    #[test]
    fn unblocked_exit_one() {
        let r = go(&["torus", "block", "--config", "0:1/2", "--set", "1/4", "--length", "1"]);
        assert_eq!(r.code, 1);
        let rep = r.report.unwrap();
        assert_eq!(rep["outputs"]["bounded"]["witness"]["displacement"][0], "-1/2");
    }

    #[test]
    fn usage_error_exit_two() {
        assert_eq!(go(&["torus", "frobnicate"]).code, 2);
        assert_eq!(go(&[]).code, 2);
        assert_eq!(go(&["--help"]).code, 0);
    }

    #[test]
    fn replay_drops_file_flags() {
        let cmd: Vec<String> = ["torus", "enumerate", "--svg", "a.svg", "--output=b.json", "--length", "2"]
            .iter()
            .map(|s| s.to_string())
            .collect();
        assert_eq!(replay_argv(&cmd), vec!["geoblock", "torus", "enumerate", "--length", "2"]);
    }
}
