//! Command-line front end for the spread/parallelism verification library.
//!
//! Every subcommand prints a deterministic JSON report (stable field order,
//! identical bytes for identical config + seed, independent of worker count)
//! and emits wall-clock metadata separately: to stderr, or to
//! `<out>.meta.json` when `--out` is given. Exit codes: 0 when all checks
//! pass, 1 when a verification fails (the report with witnesses is still
//! written), 2 on configuration or input errors.

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use pg3par::clifford::CliffordSide;
use pg3par::lines::{sample_uniform_line, OrientedPlueckerLine};
use pg3par::parallelism::{
    equivalence_reduction_check, ClassResolver, GroupCopyParams, Parallelism,
};
use pg3par::report::{
    write_csv, CheckBatteryReport, CoordsEntry, CoordsReport, MetaTimer, RunMeta,
};
use pg3par::sampling::CounterRng;
use pg3par::spreads::{sample_probe_point, RotationalSpread, SpreadProfile};
use pg3par::suite;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

/// Numerical verification of rotational spreads and parallelisms of real
/// projective 3-space.
#[derive(Debug, Parser)]
#[command(name = "pg3par", version, about)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Debug, Subcommand)]
enum Cmd {
    /// Check the exact-cover axiom of a rotational line family.
    VerifySpread(VerifySpreadArgs),
    /// Check that a line family partitions sampled lines into single classes.
    VerifyParallelism(VerifyParallelismArgs),
    /// Check the two-sided product action and conjugation-exchange identities.
    CliffordCheck(CheckArgs),
    /// Run the full verification battery (all criteria in one report).
    TheoremSuite(TheoremSuiteArgs),
    /// Dump the Klein sphere-pair coordinates of input lines.
    Coords(CoordsArgs),
    /// Check that scaling the first two axes reduces a group copy to s = 1.
    Reduce(ReduceArgs),
}

#[derive(Debug, Args)]
struct IoArgs {
    /// JSON file mirroring the flags of this subcommand; explicit flags win.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Write the JSON report here instead of stdout (run metadata then goes
    /// to `<out>.meta.json` instead of stderr).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct SampleArgs {
    /// Number of random samples.
    #[arg(long)]
    n: Option<u64>,
    /// Seed of the deterministic sample stream.
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Debug, Args)]
struct VerifySpreadArgs {
    #[command(flatten)]
    io: IoArgs,
    #[command(flatten)]
    sample: SampleArgs,
    /// Spread profile: `complex:C` or the path of a tabulated-profile JSON.
    #[arg(long)]
    profile: Option<String>,
    /// Treat lines as unoriented (checks the ordinary axiom instead of the
    /// oriented one).
    #[arg(long = "no-oriented")]
    no_oriented: bool,
    /// Per-sample CSV dump: probe point and coverage count.
    #[arg(long)]
    csv: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct VerifyParallelismArgs {
    #[command(flatten)]
    io: IoArgs,
    #[command(flatten)]
    sample: SampleArgs,
    /// Family kind: `orbit` (rotation-group orbit of a spread) or `clifford`.
    #[arg(long)]
    family: Option<String>,
    /// Base spread profile for orbit families: `complex:C` or a JSON path.
    #[arg(long)]
    profile: Option<String>,
    /// Clifford side for `--family clifford`: `left` or `right`.
    #[arg(long)]
    side: Option<String>,
    /// Scale of the third axis in the group copy (orbit families).
    #[arg(long)]
    s: Option<f64>,
    /// Shift of the third axis in the group copy (orbit families).
    #[arg(long)]
    t: Option<f64>,
    /// Treat lines as unoriented.
    #[arg(long = "no-oriented")]
    no_oriented: bool,
    /// Per-sample CSV dump: line components and class multiplicity.
    #[arg(long)]
    csv: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct CheckArgs {
    #[command(flatten)]
    io: IoArgs,
    #[command(flatten)]
    sample: SampleArgs,
}

#[derive(Debug, Args)]
struct TheoremSuiteArgs {
    #[command(flatten)]
    io: IoArgs,
    /// Seed of the deterministic sample streams.
    #[arg(long)]
    seed: Option<u64>,
    /// Run with reduced sample counts (seconds instead of minutes).
    #[arg(long)]
    quick: bool,
}

#[derive(Debug, Args)]
struct CoordsArgs {
    #[command(flatten)]
    io: IoArgs,
    /// A line as six comma-separated Plücker components; repeatable.
    #[arg(long)]
    pluecker: Vec<String>,
    /// JSON file with an array of lines (`[c0,...,c5]` or `{"pluecker":
    /// [...]}` entries).
    #[arg(long)]
    input: Option<PathBuf>,
    /// CSV dump of the same table.
    #[arg(long)]
    csv: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct ReduceArgs {
    #[command(flatten)]
    io: IoArgs,
    #[command(flatten)]
    sample: SampleArgs,
    /// Base spread profile: `complex:C` or a JSON path.
    #[arg(long)]
    profile: Option<String>,
    /// Scale of the third axis in the group copy to reduce.
    #[arg(long)]
    s: Option<f64>,
    /// Shift of the third axis in the group copy.
    #[arg(long)]
    t: Option<f64>,
}

/// Config-file mirror of the flags. Unknown keys are rejected so typos
/// surface as parse errors instead of silently using defaults.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileConfig {
    profile: Option<String>,
    family: Option<String>,
    side: Option<String>,
    s: Option<f64>,
    t: Option<f64>,
    oriented: Option<bool>,
    n: Option<u64>,
    seed: Option<u64>,
    quick: Option<bool>,
    out: Option<PathBuf>,
    csv: Option<PathBuf>,
}

fn main() -> ExitCode {
    match run() {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn run() -> Result<bool> {
    configure_threads()?;
    match Cli::parse().cmd {
        Cmd::VerifySpread(args) => verify_spread_cmd(args),
        Cmd::VerifyParallelism(args) => verify_parallelism_cmd(args),
        Cmd::CliffordCheck(args) => clifford_check_cmd(args),
        Cmd::TheoremSuite(args) => theorem_suite_cmd(args),
        Cmd::Coords(args) => coords_cmd(args),
        Cmd::Reduce(args) => reduce_cmd(args),
    }
}

/// `PG3_THREADS` caps the worker pool; reports do not depend on it.
fn configure_threads() -> Result<()> {
    if let Ok(raw) = std::env::var("PG3_THREADS") {
        let n: usize =
            raw.parse().with_context(|| format!("parsing PG3_THREADS={raw:?}"))?;
        if n == 0 {
            bail!("PG3_THREADS must be positive");
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .context("installing the worker pool")?;
    }
    Ok(())
}

fn load_config(path: &Option<PathBuf>) -> Result<FileConfig> {
    match path {
        None => Ok(FileConfig::default()),
        Some(p) => {
            let body = std::fs::read_to_string(p)
                .with_context(|| format!("reading config {}", p.display()))?;
            serde_json::from_str(&body)
                .with_context(|| format!("parsing config {}", p.display()))
        }
    }
}

fn parse_profile(spec: &str) -> Result<SpreadProfile> {
    if let Some(c) = spec.strip_prefix("complex:") {
        let c: f64 =
            c.parse().with_context(|| format!("parsing slope constant in {spec:?}"))?;
        return Ok(SpreadProfile::complex(c)?);
    }
    let body = std::fs::read_to_string(spec).with_context(|| {
        format!("reading profile file {spec:?} (use complex:C for the closed-form family)")
    })?;
    let profile: SpreadProfile = serde_json::from_str(&body)
        .with_context(|| format!("parsing profile file {spec:?}"))?;
    profile.validate()?;
    Ok(profile)
}

fn parse_side(spec: &str) -> Result<CliffordSide> {
    match spec.to_ascii_lowercase().as_str() {
        "left" => Ok(CliffordSide::Left),
        "right" => Ok(CliffordSide::Right),
        other => bail!("unknown side {other:?}; expected left or right"),
    }
}

/// Writes the deterministic report and the separate run metadata.
fn emit<T: Serialize>(report: &T, out: &Option<PathBuf>, meta: RunMeta) -> Result<()> {
    let body = serde_json::to_string_pretty(report).context("serializing report")?;
    let meta_body = serde_json::to_string_pretty(&meta).context("serializing metadata")?;
    match out {
        Some(path) => {
            std::fs::write(path, format!("{body}\n"))
                .with_context(|| format!("writing report {}", path.display()))?;
            let meta_path = PathBuf::from(format!("{}.meta.json", path.display()));
            std::fs::write(&meta_path, format!("{meta_body}\n"))
                .with_context(|| format!("writing metadata {}", meta_path.display()))?;
        }
        None => {
            println!("{body}");
            eprintln!("{meta_body}");
        }
    }
    Ok(())
}

fn verify_spread_cmd(args: VerifySpreadArgs) -> Result<bool> {
    let timer = MetaTimer::start("verify-spread");
    let cfg = load_config(&args.io.config)?;
    let spec = args.profile.or(cfg.profile).unwrap_or_else(|| "complex:1.0".to_string());
    let oriented = if args.no_oriented { false } else { cfg.oriented.unwrap_or(true) };
    let n = args.sample.n.or(cfg.n).unwrap_or(10_000);
    let seed = args.sample.seed.or(cfg.seed).unwrap_or(7);
    let out = args.io.out.or(cfg.out);
    let csv = args.csv.or(cfg.csv);

    let spread = RotationalSpread::new(parse_profile(&spec)?, oriented)?;
    let report = spread.verify_spread(n, seed);
    if let Some(path) = &csv {
        dump_spread_csv(&spread, n, seed, path)?;
    }
    emit(&report, &out, timer.finish())?;
    Ok(report.pass)
}

fn dump_spread_csv(
    spread: &RotationalSpread,
    samples: u64,
    seed: u64,
    path: &Path,
) -> Result<()> {
    let rows: Vec<String> = (0..samples)
        .into_par_iter()
        .map(|i| {
            let p = sample_probe_point(seed, i);
            let count = spread.coverage_count(p).map(|c| c.count()).unwrap_or(0);
            format!("{i},{},{},{},{count}", p.x, p.y, p.z)
        })
        .collect();
    write_csv(path, "index,px,py,pz,count", rows)
        .with_context(|| format!("writing csv {}", path.display()))
}

fn verify_parallelism_cmd(args: VerifyParallelismArgs) -> Result<bool> {
    let timer = MetaTimer::start("verify-parallelism");
    let cfg = load_config(&args.io.config)?;
    let kind = args.family.or(cfg.family).unwrap_or_else(|| "orbit".to_string());
    let oriented = if args.no_oriented { false } else { cfg.oriented.unwrap_or(true) };
    let n = args.sample.n.or(cfg.n).unwrap_or(1_000);
    let seed = args.sample.seed.or(cfg.seed).unwrap_or(7);
    let out = args.io.out.or(cfg.out);
    let csv = args.csv.or(cfg.csv);

    let family = match kind.as_str() {
        "orbit" => {
            let spec =
                args.profile.or(cfg.profile).unwrap_or_else(|| "complex:1.0".to_string());
            let base = RotationalSpread::new(parse_profile(&spec)?, oriented)?;
            let s = args.s.or(cfg.s).unwrap_or(1.0);
            let t = args.t.or(cfg.t).unwrap_or(0.0);
            Parallelism::rotation_orbit(base, GroupCopyParams::new(s, t)?)
        }
        "clifford" => {
            let side = parse_side(&args.side.or(cfg.side).unwrap_or_else(|| "left".to_string()))?;
            Parallelism::clifford(side, oriented)
        }
        other => bail!("unknown family {other:?}; expected orbit or clifford"),
    };

    let resolver = family.resolver();
    let report = resolver.verify_parallelism(n, seed);
    if let Some(path) = &csv {
        dump_parallelism_csv(&resolver, n, seed, path)?;
    }
    emit(&report, &out, timer.finish())?;
    Ok(report.pass)
}

fn dump_parallelism_csv(
    resolver: &ClassResolver,
    samples: u64,
    seed: u64,
    path: &Path,
) -> Result<()> {
    let rows: Vec<String> = (0..samples)
        .into_par_iter()
        .map(|i| {
            let line = sample_uniform_line(&mut CounterRng::new(seed, i));
            let multiplicity = resolver.resolve(&line).map(|r| r.multiplicity()).unwrap_or(0);
            let c = line.components();
            format!(
                "{i},{},{},{},{},{},{},{multiplicity}",
                c[0], c[1], c[2], c[3], c[4], c[5]
            )
        })
        .collect();
    write_csv(path, "index,c0,c1,c2,c3,c4,c5,multiplicity", rows)
        .with_context(|| format!("writing csv {}", path.display()))
}

fn clifford_check_cmd(args: CheckArgs) -> Result<bool> {
    let timer = MetaTimer::start("clifford-check");
    let cfg = load_config(&args.io.config)?;
    let n = args.sample.n.or(cfg.n).unwrap_or(2_000);
    let seed = args.sample.seed.or(cfg.seed).unwrap_or(7);
    let out = args.io.out.or(cfg.out);

    let criteria = vec![suite::product_action(n, seed), suite::conjugation_exchange(n, seed)];
    let pass = criteria.iter().all(|c| c.pass);
    let report = CheckBatteryReport { samples: n, seed, criteria, pass };
    emit(&report, &out, timer.finish())?;
    Ok(pass)
}

fn theorem_suite_cmd(args: TheoremSuiteArgs) -> Result<bool> {
    let timer = MetaTimer::start("theorem-suite");
    let cfg = load_config(&args.io.config)?;
    let quick = args.quick || cfg.quick.unwrap_or(false);
    let seed = args.seed.or(cfg.seed).unwrap_or(7);
    let out = args.io.out.or(cfg.out);

    let report = suite::run_all(quick, seed);
    emit(&report, &out, timer.finish())?;
    Ok(report.pass)
}

/// Accepted shapes for one line in a `coords --input` file.
#[derive(Deserialize)]
#[serde(untagged)]
enum LineInput {
    Components([f64; 6]),
    Tagged { pluecker: [f64; 6] },
}

impl LineInput {
    fn components(self) -> [f64; 6] {
        match self {
            LineInput::Components(c) => c,
            LineInput::Tagged { pluecker } => pluecker,
        }
    }
}

fn parse_component_list(spec: &str) -> Result<[f64; 6]> {
    let parts: Vec<f64> = spec
        .split(',')
        .map(|p| p.trim().parse::<f64>().with_context(|| format!("parsing component {p:?}")))
        .collect::<Result<_>>()?;
    let n = parts.len();
    parts.try_into().map_err(|_| {
        anyhow::anyhow!("expected six comma-separated components, got {n} in {spec:?}")
    })
}

fn coords_cmd(args: CoordsArgs) -> Result<bool> {
    let timer = MetaTimer::start("coords");
    let cfg = load_config(&args.io.config)?;
    let out = args.io.out.or(cfg.out);
    let csv = args.csv.or(cfg.csv);

    let mut raw: Vec<[f64; 6]> = Vec::new();
    if let Some(path) = &args.input {
        let body = std::fs::read_to_string(path)
            .with_context(|| format!("reading input {}", path.display()))?;
        let parsed: Vec<LineInput> = serde_json::from_str(&body)
            .with_context(|| format!("parsing input {}", path.display()))?;
        raw.extend(parsed.into_iter().map(LineInput::components));
    }
    for spec in &args.pluecker {
        raw.push(parse_component_list(spec)?);
    }
    if raw.is_empty() {
        bail!("no input lines; pass --pluecker C0,C1,C2,C3,C4,C5 or --input FILE");
    }

    let mut entries = Vec::with_capacity(raw.len());
    for c in raw {
        let line = OrientedPlueckerLine::from_components(c)
            .with_context(|| format!("invalid line {c:?}"))?;
        let sphere = line.klein_split();
        entries.push(CoordsEntry {
            pluecker: line.components(),
            x: [sphere.x.x, sphere.x.y, sphere.x.z],
            y: [sphere.y.x, sphere.y.y, sphere.y.z],
        });
    }
    if let Some(path) = &csv {
        let rows = entries.iter().enumerate().map(|(i, e)| {
            let p = e.pluecker;
            format!(
                "{i},{},{},{},{},{},{},{},{},{},{},{},{}",
                p[0], p[1], p[2], p[3], p[4], p[5], e.x[0], e.x[1], e.x[2], e.y[0], e.y[1],
                e.y[2]
            )
        });
        write_csv(path, "index,c0,c1,c2,c3,c4,c5,x0,x1,x2,y0,y1,y2", rows)
            .with_context(|| format!("writing csv {}", path.display()))?;
    }
    let report = CoordsReport { lines: entries };
    emit(&report, &out, timer.finish())?;
    Ok(true)
}

fn reduce_cmd(args: ReduceArgs) -> Result<bool> {
    let timer = MetaTimer::start("reduce");
    let cfg = load_config(&args.io.config)?;
    let spec = args.profile.or(cfg.profile).unwrap_or_else(|| "complex:1.0".to_string());
    let s = args
        .s
        .or(cfg.s)
        .ok_or_else(|| anyhow::anyhow!("missing --s (axes scale of the group copy)"))?;
    let t = args.t.or(cfg.t).unwrap_or(0.0);
    let n = args.sample.n.or(cfg.n).unwrap_or(200);
    let seed = args.sample.seed.or(cfg.seed).unwrap_or(7);
    let out = args.io.out.or(cfg.out);

    let base = RotationalSpread::new(parse_profile(&spec)?, true)?;
    let report = equivalence_reduction_check(&base, GroupCopyParams::new(s, t)?, n, seed);
    emit(&report, &out, timer.finish())?;
    Ok(report.pass)
}
