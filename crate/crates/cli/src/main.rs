//! `dynramsey`: batch front end for the coloring pipeline and the Ramsey oracles.
//!
//! Primary output goes to stdout (or `--out`); a run manifest goes to stderr
//! or `--manifest`. Exit codes: 0 ok, 2 usage, 3 cap, 4 I/O, 5 verification.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_rational::Ratio;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use dynramsey::action::{Alpha, ShiftSystem, TorusSystem};
use dynramsey::cliques::{mono_clique_report, opposite_upper_bound, DEFAULT_CLIQUE_CAP};
use dynramsey::colorer::{
    color_graph, decode_decg_unverified, encode_decg, fnv1a64, graph_checksum, revalidate,
    shift_vertex_set,
};
use dynramsey::metric::{probe_question_shift, probe_question_torus, DEFAULT_PROBE_BUDGET};
use dynramsey::ramsey::{gg_upper, lr_lower, opposite_ramsey_exact, sandwich_report, Evidence};
use dynramsey::sepset::GrowthSequence;
use dynramsey::Error;

const EXIT_USAGE: u8 = 2;
const EXIT_CAP: u8 = 3;
const EXIT_IO: u8 = 4;
const EXIT_VERIFY: u8 = 5;

#[derive(Parser, Debug)]
#[command(name = "dynramsey", version, about = "Edge-colorings of complete graphs from expansive Z^2 actions")]
struct Cli {
    /// Worker threads (results do not depend on this).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Seed for every random choice; absent means 0.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Write the run manifest here instead of stderr.
    #[arg(long, global = true)]
    manifest: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
enum SystemKind {
    Shift,
    Torus,
}

#[derive(Args, Debug)]
struct ColorArgs {
    #[arg(long, value_enum, default_value = "shift")]
    system: SystemKind,
    #[arg(long, default_value_t = 2)]
    k: u8,
    #[arg(long)]
    n: u32,
    #[arg(long, default_value = "2")]
    alpha: Alpha,
    /// Sample this many vertices instead of enumerating all patterns.
    #[arg(long)]
    max_vertices: Option<u64>,
    /// Skip the pairwise separation check before coloring.
    #[arg(long)]
    no_precheck: bool,
    /// Destination file; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Build V_n, color its complete graph and write a DECG file.
    Color(ColorArgs),
    /// Revalidate a DECG file and report its monochromatic cliques.
    Cliques {
        path: PathBuf,
        /// Constant c of the illustrative lower bound 2^(c g k), as p/q.
        #[arg(long, default_value = "1")]
        lr_constant: String,
    },
    /// Exact opposite-Ramsey number r(p, q).
    Opposite {
        #[arg(long)]
        p: u32,
        #[arg(long)]
        q: usize,
        #[arg(long, default_value = "1")]
        lr_constant: String,
    },
    /// Classical bounds g^(g k) and 2^(c g k).
    Bounds {
        #[arg(long)]
        g: u32,
        #[arg(long)]
        k: u32,
        #[arg(long, default_value = "1")]
        c: String,
    },
    /// Separated-set growth and dimension terms as CSV.
    Dimension {
        #[arg(long, default_value_t = 2)]
        k: u8,
        #[arg(long)]
        n_max: u32,
        #[arg(long, default_value = "2")]
        alpha: Alpha,
    },
    /// Search for a pair defeating the strengthened recovery property.
    Probe {
        #[arg(long, value_enum, default_value = "shift")]
        system: SystemKind,
        #[arg(long)]
        n: u32,
        #[arg(long, default_value_t = DEFAULT_PROBE_BUDGET)]
        budget: u64,
        #[arg(long, default_value_t = 2)]
        k: u8,
        #[arg(long, default_value = "2")]
        alpha: Alpha,
    },
    /// Re-run the command recorded in a manifest and compare output checksums.
    Replay { manifest_path: PathBuf },
}

#[derive(Debug)]
struct Failure {
    code: u8,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match &e {
            Error::CapExceeded { .. } => EXIT_CAP,
            Error::Io(_) | Error::BadFormat { .. } => EXIT_IO,
            Error::ChecksumMismatch { .. }
            | Error::NoWitness { .. }
            | Error::InconsistentCertificate(_)
            | Error::Verification(_) => EXIT_VERIFY,
            _ => EXIT_USAGE,
        };
        Failure { code, message: e.to_string() }
    }
}

fn fail(code: u8, message: impl Into<String>) -> Failure {
    Failure { code, message: message.into() }
}

type Outcome<T> = std::result::Result<T, Failure>;

#[derive(Debug, Serialize, Deserialize)]
struct Digest {
    name: String,
    fnv1a64: String,
}

#[derive(Debug, Serialize, Deserialize)]
struct RunManifest {
    subcommand: String,
    argv: Vec<String>,
    parameters: Value,
    seed: u64,
    threads: Option<usize>,
    version: String,
    inputs: Vec<Digest>,
    outputs: Vec<Digest>,
    wall_time_ms: u128,
}

/// What a subcommand produced.
struct Run {
    primary: Vec<u8>,
    out: Option<PathBuf>,
    /// Extra text for stdout when the primary output went to a file.
    summary: Option<String>,
    inputs: Vec<Digest>,
}

impl Run {
    fn stdout(primary: String) -> Self {
        Run { primary: primary.into_bytes(), out: None, summary: None, inputs: Vec::new() }
    }
}

fn digest(name: &str, bytes: &[u8]) -> Digest {
    Digest { name: name.to_string(), fnv1a64: format!("{:016x}", fnv1a64(bytes)) }
}

fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("serializable report");
    s.push('\n');
    s
}

fn parse_ratio(text: &str) -> Outcome<Ratio<u64>> {
    let bad = || fail(EXIT_USAGE, format!("constant {text:?} is not a positive p/q"));
    let (num, den) = match text.split_once('/') {
        Some((a, b)) => (a.trim().parse().map_err(|_| bad())?, b.trim().parse().map_err(|_| bad())?),
        None => (text.trim().parse().map_err(|_| bad())?, 1),
    };
    if num == 0 || den == 0 {
        return Err(bad());
    }
    Ok(Ratio::new(num, den))
}

fn read_file(path: &Path) -> Outcome<Vec<u8>> {
    fs::read(path).map_err(|e| fail(EXIT_IO, format!("{}: {e}", path.display())))
}

fn cmd_color(seed: u64, args: &ColorArgs) -> Outcome<Run> {
    let ColorArgs { system, k, n, alpha, max_vertices, no_precheck, ref out } = *args;
    if let SystemKind::Torus = system {
        return Err(fail(EXIT_USAGE, "DECG output is defined for the shift only"));
    }
    let sys = ShiftSystem::new(k, alpha)?;
    let sample = max_vertices.map(|m| (m, seed));
    let (set, sampling) = shift_vertex_set(&sys, n, sample, DEFAULT_CLIQUE_CAP as u64)?;
    let graph = color_graph(&sys, &set, n, sampling, !no_precheck)?;
    let text = encode_decg(&graph);
    let summary = to_json(&json!({
        "vertices": graph.vertex_count(),
        "edges": graph.edge_count(),
        "palette_size": graph.palette_size(),
        "colors_used": graph.colors_used(),
        "sampling": graph.sampling(),
        "graph_checksum": graph_checksum(&graph),
    }));
    Ok(Run {
        primary: text.into_bytes(),
        summary: out.as_ref().map(|_| summary),
        out: out.clone(),
        inputs: Vec::new(),
    })
}

fn cmd_cliques(path: &Path, lr_constant: &str) -> Outcome<Run> {
    let c = parse_ratio(lr_constant)?;
    let bytes = read_file(path)?;
    let text = String::from_utf8(bytes).map_err(|_| fail(EXIT_IO, "DECG file is not UTF-8"))?;
    let (graph, status) = decode_decg_unverified(&text)?;
    // Revalidate first so a tampered edge is named even if the checksum broke too.
    if let Some(bad) = revalidate(&graph)? {
        return Err(fail(
            EXIT_VERIFY,
            format!(
                "edge ({}, {}) with color {} fails revalidation: stored {}, recomputed {}",
                bad.i, bad.j, bad.color, bad.stored, bad.recomputed
            ),
        ));
    }
    if !status.matches() {
        return Err(Error::ChecksumMismatch { stated: status.stated, computed: status.computed }.into());
    }
    let report = mono_clique_report(&graph)?;
    let upper = opposite_upper_bound(&report, &graph)?;
    let sandwich = match &upper.certificate {
        Some(cert) => Some(sandwich_report(
            graph.palette_size() as u64,
            graph.vertex_count() as u64,
            Evidence::Coloring { r_upper: upper.bound, certificate: cert, graph: &graph },
            c,
        )?),
        None => None,
    };
    let body = to_json(&json!({
        "graph_checksum": graph_checksum(&graph),
        "n": graph.n(),
        "vertices": graph.vertex_count(),
        "edges_revalidated": graph.edge_count(),
        "report": report,
        "upper_bound": upper,
        "sandwich": sandwich,
    }));
    let mut run = Run::stdout(body);
    run.inputs.push(digest(&path.display().to_string(), text.as_bytes()));
    Ok(run)
}

fn cmd_opposite(p: u32, q: usize, lr_constant: &str) -> Outcome<Run> {
    let c = parse_ratio(lr_constant)?;
    let result = opposite_ramsey_exact(p, q)?;
    let sandwich = sandwich_report(p as u64, q as u64, Evidence::Exact(&result), c)?;
    Ok(Run::stdout(to_json(&json!({ "result": result, "sandwich": sandwich }))))
}

fn cmd_bounds(g: u32, k: u32, c: &str) -> Outcome<Run> {
    let ratio = parse_ratio(c)?;
    Ok(Run::stdout(to_json(&json!({
        "g": g,
        "k": k,
        "c": format!("{}/{}", ratio.numer(), ratio.denom()),
        "gg_upper": gg_upper(g, k)?.to_string(),
        "lr_lower": lr_lower(g, k, ratio)?.to_string(),
        "lr_constant_note": "illustrative: the asymptotic lower-bound constant is unspecified",
    }))))
}

fn cmd_dimension(k: u8, n_max: u32, alpha: Alpha) -> Outcome<Run> {
    if n_max == 0 {
        return Err(fail(EXIT_USAGE, "--n-max must be at least 1"));
    }
    ShiftSystem::new(k, alpha)?;
    let seq = GrowthSequence::shift_closed_form(k as u64, 1..=n_max);
    Ok(Run::stdout(seq.to_csv(alpha.to_f64())?))
}

fn cmd_probe(seed: u64, system: SystemKind, n: u32, budget: u64, k: u8, alpha: Alpha) -> Outcome<Run> {
    let body = match system {
        SystemKind::Shift => {
            let sys = ShiftSystem::new(k, alpha)?;
            let found = probe_question_shift(&sys, n, budget)?;
            let checks = found.as_ref().map(|c| {
                json!({
                    "distance_meets_hypothesis": c.evidence.distance_exponent <= c.evidence.hypothesis_exponent,
                    "orbit_stays_below_floor": c.evidence.best_shifted_exponent > c.evidence.separation_exponent,
                })
            });
            json!({
                "system": "shift",
                "k": k,
                "alpha": alpha.to_string(),
                "n": n,
                "budget": budget,
                "counterexample": found,
                "checks": checks,
            })
        }
        SystemKind::Torus => {
            let sys = TorusSystem::cat_map();
            let found = probe_question_torus(&sys, n, budget, seed)?;
            let checks = json!({
                "distance_meets_hypothesis": found.distance >= found.hypothesis_floor,
                "orbit_stays_below_floor": found.best.achieved < found.separation_floor,
            });
            json!({
                "system": "torus",
                "n": n,
                "budget": budget,
                "seed": seed,
                "counterexample": found,
                "checks": checks,
            })
        }
    };
    Ok(Run::stdout(to_json(&body)))
}

fn parameters(command: &Command) -> (String, Value) {
    match command {
        Command::Color(ColorArgs { system, k, n, alpha, max_vertices, no_precheck, out }) => (
            "color".into(),
            json!({ "system": system, "k": k, "n": n, "alpha": alpha.to_string(),
                    "max_vertices": max_vertices, "precheck": !no_precheck, "out": out }),
        ),
        Command::Cliques { path, lr_constant } => {
            ("cliques".into(), json!({ "path": path, "lr_constant": lr_constant }))
        }
        Command::Opposite { p, q, lr_constant } => {
            ("opposite".into(), json!({ "p": p, "q": q, "lr_constant": lr_constant }))
        }
        Command::Bounds { g, k, c } => ("bounds".into(), json!({ "g": g, "k": k, "c": c })),
        Command::Dimension { k, n_max, alpha } => (
            "dimension".into(),
            json!({ "k": k, "n_max": n_max, "alpha": alpha.to_string() }),
        ),
        Command::Probe { system, n, budget, k, alpha } => (
            "probe".into(),
            json!({ "system": system, "n": n, "budget": budget, "k": k, "alpha": alpha.to_string() }),
        ),
        Command::Replay { manifest_path } => ("replay".into(), json!({ "manifest_path": manifest_path })),
    }
}

fn dispatch(cli: &Cli) -> Outcome<Run> {
    match &cli.command {
        Command::Color(args) => cmd_color(cli.seed, args),
        Command::Cliques { path, lr_constant } => cmd_cliques(path, lr_constant),
        Command::Opposite { p, q, lr_constant } => cmd_opposite(*p, *q, lr_constant),
        Command::Bounds { g, k, c } => cmd_bounds(*g, *k, c),
        Command::Dimension { k, n_max, alpha } => cmd_dimension(*k, *n_max, *alpha),
        Command::Probe { system, n, budget, k, alpha } => {
            cmd_probe(cli.seed, *system, *n, *budget, *k, *alpha)
        }
        Command::Replay { manifest_path } => cmd_replay(manifest_path),
    }
}

fn in_pool<T: Send>(threads: Option<usize>, f: impl FnOnce() -> Outcome<T> + Send) -> Outcome<T> {
    match threads {
        None => f(),
        Some(0) => Err(fail(EXIT_USAGE, "--threads must be at least 1")),
        Some(t) => rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build()
            .map_err(|e| fail(EXIT_USAGE, e.to_string()))?
            .install(f),
    }
}

fn cmd_replay(path: &Path) -> Outcome<Run> {
    let bytes = read_file(path)?;
    let recorded: RunManifest = serde_json::from_slice(&bytes)
        .map_err(|e| fail(EXIT_IO, format!("{}: not a run manifest: {e}", path.display())))?;
    let cli = Cli::try_parse_from(&recorded.argv)
        .map_err(|e| fail(EXIT_USAGE, format!("recorded argv does not parse: {e}")))?;
    if matches!(cli.command, Command::Replay { .. }) {
        return Err(fail(EXIT_USAGE, "refusing to replay a replay"));
    }
    let run = in_pool(cli.threads, || dispatch(&cli))?;
    let now = digest("primary", &run.primary);
    let before = recorded.outputs.iter().find(|d| d.name == "primary");
    let identical = before.is_some_and(|d| d.fnv1a64 == now.fnv1a64);
    let body = to_json(&json!({
        "subcommand": recorded.subcommand,
        "recorded": before.map(|d| &d.fnv1a64),
        "reproduced": now.fnv1a64,
        "identical": identical,
    }));
    if !identical {
        return Err(fail(EXIT_VERIFY, body.trim_end()));
    }
    Ok(Run::stdout(body))
}

fn emit(run: &Run) -> Outcome<()> {
    let io = |e: std::io::Error| fail(EXIT_IO, e.to_string());
    let mut stdout = std::io::stdout().lock();
    match &run.out {
        Some(path) => {
            fs::write(path, &run.primary).map_err(|e| fail(EXIT_IO, format!("{}: {e}", path.display())))?;
            if let Some(s) = &run.summary {
                stdout.write_all(s.as_bytes()).map_err(io)?;
            }
        }
        None => stdout.write_all(&run.primary).map_err(io)?,
    }
    stdout.flush().map_err(io)?;
    Ok(())
}

fn write_manifest(cli: &Cli, argv: Vec<String>, run: &Run, started: Instant) -> Outcome<()> {
    let (subcommand, parameters) = parameters(&cli.command);
    let mut outputs = vec![digest("primary", &run.primary)];
    if let Some(s) = &run.summary {
        outputs.push(digest("summary", s.as_bytes()));
    }
    let manifest = RunManifest {
        subcommand,
        argv,
        parameters,
        seed: cli.seed,
        threads: cli.threads,
        version: env!("CARGO_PKG_VERSION").to_string(),
        inputs: run.inputs.iter().map(|d| Digest { name: d.name.clone(), fnv1a64: d.fnv1a64.clone() }).collect(),
        outputs,
        wall_time_ms: started.elapsed().as_millis(),
    };
    let text = serde_json::to_string(&manifest).expect("serializable manifest");
    match &cli.manifest {
        Some(path) => fs::write(path, format!("{text}\n"))
            .map_err(|e| fail(EXIT_IO, format!("{}: {e}", path.display()))),
        None => {
            eprintln!("{text}");
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let started = Instant::now();
    let argv: Vec<String> = std::env::args().collect();
    let cli = match Cli::try_parse_from(&argv) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_USAGE } else { 0 });
        }
    };
    let result = in_pool(cli.threads, || dispatch(&cli))
        .and_then(|run| emit(&run).map(|_| run))
        .and_then(|run| write_manifest(&cli, argv, &run, started));
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
