//! One binary, subcommand style. All randomness derives from --seed; reports
//! are byte-reproducible under fixed (args, seed) with elapsed fields masked,
//! independent of the HAM_THREADS worker cap.

mod report;

use anyhow::{anyhow, Context, Result};
use clap::{Args, Parser, Subcommand};
use ham3::audit::{density_audit, AuditCaps, Notion, Strategy};
use ham3::bits::VertexSet;
use ham3::connect::{build_cascade, cascade_bounds, connect, CascadeParams};
use ham3::cover::{cover_with_paths, CoverBackend, CoverParams};
use ham3::gen::{generate, GenKind, GenSpec};
use ham3::hypergraph::{Hypergraph3, SeqMode};
use ham3::pipeline::{find_tight_hamilton, PipelineConfig};
use ham3::reservoir::sample_reservoir;
use ham3::{absorb, io};
use report::OutputFormat;
use std::path::PathBuf;
use std::process::exit;
use std::time::Instant;

#[derive(Parser)]
#[command(name = "ham3", version, about = "Tight Hamilton cycles in dense 3-uniform hypergraphs")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Generate an instance (H3 v1 format plus a JSON sidecar).
    Gen(GenArgs),
    /// Deviation audit for one of the four density notions.
    Audit(AuditArgs),
    /// Connect two vertex pairs by a 10-vertex tight path (debug tool).
    Connect(ConnectArgs),
    /// Count or sample absorbers.
    Absorbers(AbsorbersArgs),
    /// Cover almost all vertices by few disjoint tight paths.
    Cover(CoverArgs),
    /// Sample a certified reservoir (debug tool).
    Reservoir(ReservoirArgs),
    /// Run the full tight-Hamilton-cycle pipeline.
    Find(FindArgs),
    /// Re-validate a cycle file against an instance.
    Verify(VerifyArgs),
    /// Seed-swept benchmark producing per-run records and an aggregate table.
    Bench(BenchArgs),
}

#[derive(Args)]
struct GenArgs {
    #[arg(long)]
    kind: String,
    #[arg(long)]
    n: usize,
    #[arg(long, default_value_t = 0.5)]
    p: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output file; the sidecar goes to <out>.json. Stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct AuditArgs {
    file: PathBuf,
    #[arg(long)]
    notion: String,
    /// Reference density d; defaults to the instance's global edge density.
    #[arg(long)]
    d: Option<f64>,
    #[arg(long, default_value_t = 200)]
    samples: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    exhaustive: bool,
    #[arg(long, default_value = "json")]
    format: OutputFormat,
}

#[derive(Args)]
struct ConnectArgs {
    file: PathBuf,
    /// Four vertices a,b,c,d: connect pair (a, b) to pair (c, d).
    #[arg(long, value_delimiter = ',')]
    pairs: Vec<u32>,
    #[arg(long)]
    beta: f64,
    /// File of whitespace-separated forbidden vertex ids.
    #[arg(long)]
    forbidden: Option<PathBuf>,
    #[arg(long)]
    omega: Option<usize>,
    #[arg(long = "t-deg")]
    t_deg: Option<usize>,
}

#[derive(Args)]
struct AbsorbersArgs {
    file: PathBuf,
    #[arg(long)]
    beta: f64,
    /// Single vertex to serve; --all sweeps every vertex (count mode).
    #[arg(long)]
    v: Option<u32>,
    #[arg(long)]
    all: bool,
    #[arg(long)]
    count: bool,
    #[arg(long)]
    sample: bool,
    /// Expected family size divided by n (sampling rate times n^3).
    #[arg(long, default_value_t = 0.2)]
    gamma: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    cap: Option<u64>,
    #[arg(long, default_value_t = 3)]
    retries: usize,
    #[arg(long, default_value = "json")]
    format: OutputFormat,
}

#[derive(Args)]
struct CoverArgs {
    file: PathBuf,
    #[arg(long, default_value_t = 0.1)]
    zeta: f64,
    #[arg(long, default_value = "greedy")]
    backend: String,
    #[arg(long, default_value_t = 0.1)]
    epsilon: f64,
    #[arg(long, default_value_t = 4)]
    t0: usize,
    #[arg(long, default_value_t = 16)]
    tcap: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Reference density for packing; defaults to the global edge density.
    #[arg(long)]
    d: Option<f64>,
    #[arg(long = "d-prime")]
    d_prime: Option<f64>,
    #[arg(long, default_value = "json")]
    format: OutputFormat,
}

#[derive(Args)]
struct ReservoirArgs {
    file: PathBuf,
    #[arg(long)]
    beta: f64,
    #[arg(long)]
    nu: f64,
    /// File of whitespace-separated excluded vertex ids.
    #[arg(long)]
    exclude: Option<PathBuf>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 20)]
    retries: usize,
    #[arg(long, default_value = "json")]
    format: OutputFormat,
}

#[derive(Args)]
struct FindArgs {
    file: PathBuf,
    /// Path to a PipelineConfig JSON, or the literal "defaults".
    #[arg(long, default_value = "defaults")]
    config: String,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Write the full stage trace (with config echo) to this file.
    #[arg(long)]
    trace: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyArgs {
    file: PathBuf,
    #[arg(long)]
    cycle: PathBuf,
}

#[derive(Args)]
struct BenchArgs {
    /// random-sweep or planted-sweep.
    #[arg(long, default_value = "random-sweep")]
    suite: String,
    /// Sweep of instance orders start:end:step (inclusive), or a single n.
    #[arg(long, default_value = "60:180:60")]
    n: String,
    #[arg(long, default_value_t = 0.5)]
    p: f64,
    #[arg(long, default_value_t = 20)]
    reps: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Per-repetition records file (CSV). Aggregate always prints to stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, default_value = "defaults")]
    config: String,
    #[arg(long, default_value = "csv")]
    format: OutputFormat,
}

fn main() {
    if let Ok(threads) = std::env::var("HAM_THREADS") {
        if let Ok(t) = threads.trim().parse::<usize>() {
            if t > 0 {
                let _ = rayon::ThreadPoolBuilder::new().num_threads(t).build_global();
            }
        }
    }
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind::*;
            let code = match e.kind() {
                DisplayHelp | DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            exit(code);
        }
    };
    match run(cli) {
        Ok(code) => exit(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            exit(1);
        }
    }
}

fn run(cli: Cli) -> Result<i32> {
    match cli.cmd {
        Cmd::Gen(a) => cmd_gen(a),
        Cmd::Audit(a) => cmd_audit(a),
        Cmd::Connect(a) => cmd_connect(a),
        Cmd::Absorbers(a) => cmd_absorbers(a),
        Cmd::Cover(a) => cmd_cover(a),
        Cmd::Reservoir(a) => cmd_reservoir(a),
        Cmd::Find(a) => cmd_find(a),
        Cmd::Verify(a) => cmd_verify(a),
        Cmd::Bench(a) => report::cmd_bench(a),
    }
}

fn load_h3(path: &PathBuf) -> Result<Hypergraph3> {
    io::read_h3_file(path).with_context(|| format!("reading {}", path.display()))
}

fn load_vertex_set(path: &Option<PathBuf>) -> Result<VertexSet> {
    Ok(match path {
        Some(p) => io::read_sequence_file(p)
            .with_context(|| format!("reading {}", p.display()))?
            .into_iter()
            .collect(),
        None => VertexSet::new(),
    })
}

fn load_config(spec: &str) -> Result<PipelineConfig> {
    if spec == "defaults" {
        Ok(PipelineConfig::default())
    } else {
        let text = std::fs::read_to_string(spec).with_context(|| format!("reading {spec}"))?;
        serde_json::from_str(&text).with_context(|| format!("parsing config {spec}"))
    }
}

fn cmd_gen(a: GenArgs) -> Result<i32> {
    let spec = GenSpec { kind: a.kind.parse::<GenKind>()?, n: a.n, p: a.p, seed: a.seed };
    let (h, meta) = generate(&spec)?;
    match &a.out {
        Some(path) => {
            io::write_h3_file(&h, path)?;
            let sidecar = path.with_extension(format!(
                "{}json",
                path.extension().map(|e| format!("{}.", e.to_string_lossy())).unwrap_or_default()
            ));
            std::fs::write(&sidecar, serde_json::to_string_pretty(&meta)?)?;
            println!("{}", serde_json::to_string(&meta)?);
        }
        None => {
            print!("{}", io::h3_to_string(&h));
        }
    }
    Ok(0)
}

fn cmd_audit(a: AuditArgs) -> Result<i32> {
    let h = load_h3(&a.file)?;
    let notion: Notion = a.notion.parse()?;
    let strategy = if a.exhaustive {
        Strategy::Exhaustive
    } else {
        Strategy::Sampled { count: a.samples, seed: a.seed }
    };
    let t0 = Instant::now();
    let d = a.d.unwrap_or_else(|| report::global_density(&h));
    let rep = density_audit(&h, d, notion, strategy, &AuditCaps::default())?;
    report::print_audit(&rep, t0.elapsed(), a.format)?;
    Ok(0)
}

fn cmd_connect(a: ConnectArgs) -> Result<i32> {
    let h = load_h3(&a.file)?;
    if a.pairs.len() != 4 {
        return Err(anyhow!("--pairs needs exactly 4 vertices, got {}", a.pairs.len()));
    }
    let forbidden = load_vertex_set(&a.forbidden)?;
    let mut params = CascadeParams::for_order(h.vertex_count());
    if let Some(o) = a.omega {
        params.omega = o;
    }
    if let Some(t) = a.t_deg {
        params.t_deg = t;
    }
    let from = (a.pairs[0], a.pairs[1]);
    let to = (a.pairs[2], a.pairs[3]);
    let t0 = Instant::now();
    let path = connect(&h, a.beta, from, to, &forbidden, &params)?;

    // cascade bound diagnostics on the filtered available graph
    let avail = h.active().difference(&forbidden);
    let hb = h.induced(&avail).filter_beta(a.beta).graph;
    let diag = |x: u32, y: u32| {
        build_cascade(&hb, x, y, &params).ok().map(|c| cascade_bounds(&c, a.beta))
    };
    let bounds = (diag(from.0, from.1), diag(to.1, to.0));
    match &path {
        Some(p) => {
            println!(
                "{}",
                p.vertices().iter().map(u32::to_string).collect::<Vec<_>>().join(" ")
            );
        }
        None => println!("ABSENT"),
    }
    report::print_connect_diag(&path, bounds, t0.elapsed())?;
    Ok(if path.is_some() { 0 } else { 2 })
}

fn cmd_absorbers(a: AbsorbersArgs) -> Result<i32> {
    let h = load_h3(&a.file)?;
    if a.sample == a.count && !a.all {
        // exactly one of the modes unless --all implies counting
        if a.sample == a.count {
            return Err(anyhow!("pick exactly one of --count or --sample"));
        }
    }
    let t0 = Instant::now();
    if a.sample {
        let fam = match absorb::sample_family(&h, a.beta, a.gamma, a.seed, a.retries, 1) {
            Ok(f) => f,
            Err(e) => {
                eprintln!("error: {e}");
                return Ok(2);
            }
        };
        report::print_family(&fam, t0.elapsed(), a.format)?;
        return Ok(0);
    }
    let vs: Vec<u32> = if a.all {
        h.active().to_vec()
    } else {
        vec![a.v.ok_or_else(|| anyhow!("need --v <vertex> or --all"))?]
    };
    let hb = h.filter_beta(a.beta).graph;
    let rows: Vec<(u32, u64)> = vs
        .into_iter()
        .map(|v| (v, absorb::count_absorbers_in(&h, &hb, v, a.cap)))
        .collect();
    report::print_counts(&rows, t0.elapsed(), a.format)?;
    Ok(0)
}

fn cmd_cover(a: CoverArgs) -> Result<i32> {
    let h = load_h3(&a.file)?;
    let backend: CoverBackend = a.backend.parse()?;
    let d = a.d.unwrap_or_else(|| report::global_density(&h));
    let params = CoverParams {
        epsilon: a.epsilon,
        t0: a.t0,
        t_cap: a.tcap,
        d_prime: a.d_prime.unwrap_or(d / 2.0),
        seed: a.seed,
    };
    let t0 = Instant::now();
    let rep = cover_with_paths(&h, d, a.zeta, backend, &params)?;
    report::print_cover(&rep, t0.elapsed(), a.format)?;
    Ok(0)
}

fn cmd_reservoir(a: ReservoirArgs) -> Result<i32> {
    let h = load_h3(&a.file)?;
    let excluded = load_vertex_set(&a.exclude)?;
    let t0 = Instant::now();
    match sample_reservoir(&h, a.beta, a.nu, &excluded, a.seed, a.retries) {
        Ok(r) => {
            report::print_reservoir(&r, t0.elapsed(), a.format)?;
            Ok(0)
        }
        Err(e) => {
            eprintln!("error: {e}");
            Ok(2)
        }
    }
}

fn cmd_find(a: FindArgs) -> Result<i32> {
    let h = load_h3(&a.file)?;
    let cfg = load_config(&a.config)?;
    let run = find_tight_hamilton(&h, &cfg, a.seed);
    if let Some(path) = &a.trace {
        let doc = report::trace_doc(&cfg, &run)?;
        std::fs::write(path, serde_json::to_string_pretty(&doc)?)?;
    }
    match &run.cycle {
        Some(c) => {
            println!(
                "{}",
                c.vertices().iter().map(u32::to_string).collect::<Vec<_>>().join(" ")
            );
            Ok(0)
        }
        None => {
            println!("FAILURE {}", run.trace.outcome.trim_start_matches("failure:"));
            Ok(2)
        }
    }
}

fn cmd_verify(a: VerifyArgs) -> Result<i32> {
    let h = load_h3(&a.file)?;
    let seq = io::read_sequence_file(&a.cycle)?;
    let verdict = h.validate_tight(&seq, SeqMode::Cycle, true);
    report::print_verify(&verdict)?;
    Ok(if verdict.ok { 0 } else { 2 })
}
