//! Report shapes and serialization. Everything here prints either one JSON
//! document per run or flat CSV with a header row; field order is fixed so
//! replays are byte-identical (elapsed fields excepted).

use crate::BenchArgs;
use anyhow::{anyhow, Result};
use ham3::absorb::AbsorberFamily;
use ham3::audit::DensityReport;
use ham3::connect::CascadeBounds;
use ham3::cover::CoverReport;
use ham3::hypergraph::{Hypergraph3, TightPath, TightVerdict};
use ham3::pipeline::{find_tight_hamilton, FaithfulConstants, PipelineConfig, PipelineRun, StageTrace};
use ham3::reservoir::Reservoir;
use ham3::rng;
use rayon::prelude::*;
use serde::Serialize;
use sha2::{Digest, Sha256};
use std::time::Duration;

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum OutputFormat {
    Json,
    Csv,
}

pub fn global_density(h: &Hypergraph3) -> f64 {
    let n = h.vertex_count() as f64;
    if n < 3.0 {
        return 0.0;
    }
    6.0 * h.edge_count() as f64 / (n * (n - 1.0) * (n - 2.0))
}

fn ms(d: Duration) -> f64 {
    d.as_secs_f64() * 1e3
}

#[derive(Serialize)]
struct AuditDoc<'a> {
    #[serde(flatten)]
    report: &'a DensityReport,
    elapsed_ms: f64,
}

pub fn print_audit(rep: &DensityReport, took: Duration, format: OutputFormat) -> Result<()> {
    match format {
        OutputFormat::Json => {
            println!("{}", serde_json::to_string(&AuditDoc { report: rep, elapsed_ms: ms(took) })?)
        }
        OutputFormat::Csv => {
            println!("notion,d,rho_hat,strategy,samples,seed,global_density,elapsed_ms");
            println!(
                "{:?},{},{},{},{},{},{},{}",
                rep.notion,
                rep.d,
                rep.rho_hat,
                rep.strategy.kind,
                rep.strategy.samples.map(|s| s.to_string()).unwrap_or_default(),
                rep.strategy.seed.map(|s| s.to_string()).unwrap_or_default(),
                rep.global_density,
                ms(took),
            );
        }
    }
    Ok(())
}

#[derive(Serialize)]
struct ConnectDiag<'a> {
    found: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    path: Option<&'a [u32]>,
    cascade_from: Option<CascadeBounds>,
    cascade_to: Option<CascadeBounds>,
    elapsed_ms: f64,
}

pub fn print_connect_diag(
    path: &Option<TightPath>,
    bounds: (Option<CascadeBounds>, Option<CascadeBounds>),
    took: Duration,
) -> Result<()> {
    let doc = ConnectDiag {
        found: path.is_some(),
        path: path.as_ref().map(|p| p.vertices()),
        cascade_from: bounds.0,
        cascade_to: bounds.1,
        elapsed_ms: ms(took),
    };
    println!("{}", serde_json::to_string(&doc)?);
    Ok(())
}

#[derive(Serialize)]
struct CountRow {
    v: u32,
    count: u64,
}

#[derive(Serialize)]
struct CountDoc {
    rows: Vec<CountRow>,
    elapsed_ms: f64,
}

pub fn print_counts(rows: &[(u32, u64)], took: Duration, format: OutputFormat) -> Result<()> {
    match format {
        OutputFormat::Json => {
            let doc = CountDoc {
                rows: rows.iter().map(|&(v, count)| CountRow { v, count }).collect(),
                elapsed_ms: ms(took),
            };
            println!("{}", serde_json::to_string(&doc)?);
        }
        OutputFormat::Csv => {
            println!("v,count");
            for (v, c) in rows {
                println!("{v},{c}");
            }
        }
    }
    Ok(())
}

#[derive(Serialize)]
struct FamilyDoc<'a> {
    members: &'a [ham3::absorb::Absorber],
    min_coverage: usize,
    elapsed_ms: f64,
}

pub fn print_family(fam: &AbsorberFamily, took: Duration, format: OutputFormat) -> Result<()> {
    match format {
        OutputFormat::Json => {
            let doc = FamilyDoc {
                members: &fam.members,
                min_coverage: fam.min_coverage,
                elapsed_ms: ms(took),
            };
            println!("{}", serde_json::to_string(&doc)?);
        }
        OutputFormat::Csv => {
            println!("x,y,z,w,served");
            for m in &fam.members {
                let [x, y, z, w] = m.quad;
                let served =
                    m.served.iter().map(u32::to_string).collect::<Vec<_>>().join(" ");
                println!("{x},{y},{z},{w},{served}");
            }
        }
    }
    Ok(())
}

#[derive(Serialize)]
struct CoverDoc {
    paths: Vec<Vec<u32>>,
    coverage: usize,
    count: usize,
    backend: ham3::cover::CoverBackend,
    #[serde(skip_serializing_if = "Option::is_none")]
    certified: Option<bool>,
    shortfall: usize,
    met: bool,
    elapsed_ms: f64,
}

pub fn print_cover(rep: &CoverReport, took: Duration, format: OutputFormat) -> Result<()> {
    match format {
        OutputFormat::Json => {
            let doc = CoverDoc {
                count: rep.paths.len(),
                paths: rep.paths.clone(),
                coverage: rep.covered,
                backend: rep.backend,
                certified: rep.certified,
                shortfall: rep.shortfall,
                met: rep.met,
                elapsed_ms: ms(took),
            };
            println!("{}", serde_json::to_string(&doc)?);
        }
        OutputFormat::Csv => {
            println!("backend,count,coverage,shortfall,met,certified,elapsed_ms");
            println!(
                "{:?},{},{},{},{},{},{}",
                rep.backend,
                rep.paths.len(),
                rep.covered,
                rep.shortfall,
                rep.met,
                rep.certified.map(|c| c.to_string()).unwrap_or_default(),
                ms(took),
            );
        }
    }
    Ok(())
}

#[derive(Serialize)]
struct ReservoirDoc<'a> {
    members: &'a [u32],
    certified_min: usize,
    retries_used: usize,
    elapsed_ms: f64,
}

pub fn print_reservoir(r: &Reservoir, took: Duration, format: OutputFormat) -> Result<()> {
    match format {
        OutputFormat::Json => {
            let doc = ReservoirDoc {
                members: &r.members,
                certified_min: r.certified_min,
                retries_used: r.retries_used,
                elapsed_ms: ms(took),
            };
            println!("{}", serde_json::to_string(&doc)?);
        }
        OutputFormat::Csv => {
            println!("size,certified_min,retries_used,elapsed_ms");
            println!("{},{},{},{}", r.members.len(), r.certified_min, r.retries_used, ms(took));
        }
    }
    Ok(())
}

#[derive(Serialize)]
pub struct TraceDoc<'a> {
    config: &'a PipelineConfig,
    faithful: FaithfulConstants,
    trace: &'a StageTrace,
    #[serde(skip_serializing_if = "Option::is_none")]
    cycle: Option<&'a [u32]>,
}

pub fn trace_doc<'a>(cfg: &'a PipelineConfig, run: &'a PipelineRun) -> Result<TraceDoc<'a>> {
    Ok(TraceDoc {
        config: cfg,
        faithful: cfg.faithful(),
        trace: &run.trace,
        cycle: run.cycle.as_ref().map(|c| c.vertices()),
    })
}

#[derive(Serialize)]
struct VerifyDoc {
    valid: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    violation_index: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    violation_kind: Option<String>,
}

pub fn print_verify(verdict: &TightVerdict) -> Result<()> {
    let doc = VerifyDoc {
        valid: verdict.ok,
        violation_index: verdict.violation.map(|(i, _)| i),
        violation_kind: verdict.violation.map(|(_, k)| format!("{k:?}")),
    };
    println!("{}", serde_json::to_string(&doc)?);
    Ok(())
}

// Benchmarks: one RunRecord per repetition, aggregation as a separate pure
// pass over the records.

#[derive(Clone, Serialize)]
pub struct RunRecord {
    pub command: String,
    pub suite: String,
    pub n: usize,
    pub p: f64,
    pub rep: usize,
    pub seed: u64,
    pub outcome: String,
    pub success: bool,
    pub attempts: usize,
    pub elapsed_ms: f64,
    pub input_sha256: String,
}

fn record_csv_header() -> &'static str {
    "command,suite,n,p,rep,seed,outcome,success,attempts,elapsed_ms,input_sha256"
}

fn record_csv_row(r: &RunRecord) -> String {
    format!(
        "{},{},{},{},{},{},{},{},{},{},{}",
        r.command,
        r.suite,
        r.n,
        r.p,
        r.rep,
        r.seed,
        r.outcome,
        r.success,
        r.attempts,
        r.elapsed_ms,
        r.input_sha256
    )
}

fn parse_sweep(spec: &str) -> Result<Vec<usize>> {
    let parts: Vec<&str> = spec.split(':').collect();
    match parts.as_slice() {
        [single] => Ok(vec![single.parse()?]),
        [start, end, step] => {
            let (a, b, s): (usize, usize, usize) = (start.parse()?, end.parse()?, step.parse()?);
            if s == 0 || b < a {
                return Err(anyhow!("bad sweep {spec:?}"));
            }
            Ok((a..=b).step_by(s).collect())
        }
        _ => Err(anyhow!("sweep must be n or start:end:step, got {spec:?}")),
    }
}

pub fn cmd_bench(a: BenchArgs) -> Result<i32> {
    let cfg: PipelineConfig = crate::load_config(&a.config)?;
    let ns = parse_sweep(&a.n)?;
    let mut records: Vec<RunRecord> = Vec::new();
    for &n in &ns {
        let mut batch: Vec<RunRecord> = (0..a.reps)
            .into_par_iter()
            .map(|rep| one_rep(&a, &cfg, n, rep))
            .collect::<Result<Vec<_>>>()?;
        records.append(&mut batch);
    }
    if let Some(path) = &a.out {
        let mut text = String::from(record_csv_header());
        text.push('\n');
        for r in &records {
            text.push_str(&record_csv_row(r));
            text.push('\n');
        }
        std::fs::write(path, text)?;
    }
    match a.format {
        OutputFormat::Json => println!("{}", serde_json::to_string(&records)?),
        OutputFormat::Csv => {
            println!("suite,n,p,reps,successes,success_rate,mean_elapsed_ms");
            for &n in &ns {
                let group: Vec<&RunRecord> = records.iter().filter(|r| r.n == n).collect();
                let succ = group.iter().filter(|r| r.success).count();
                let mean_ms =
                    group.iter().map(|r| r.elapsed_ms).sum::<f64>() / group.len().max(1) as f64;
                println!(
                    "{},{n},{},{},{succ},{},{mean_ms}",
                    a.suite,
                    a.p,
                    group.len(),
                    succ as f64 / group.len().max(1) as f64,
                );
            }
        }
    }
    Ok(0)
}

fn one_rep(a: &BenchArgs, cfg: &PipelineConfig, n: usize, rep: usize) -> Result<RunRecord> {
    let rep_seed = rng::mix(rng::mix(a.seed ^ rng::DOMAIN_BENCH) ^ ((n as u64) << 20 | rep as u64));
    let h = match a.suite.as_str() {
        "random-sweep" => ham3::gen::gen_random(n, a.p, rep_seed),
        "planted-sweep" => ham3::gen::gen_planted(n, a.p, rep_seed).0,
        other => return Err(anyhow!("unknown suite {other:?}")),
    };
    let sha = {
        let mut hasher = Sha256::new();
        hasher.update(ham3::io::h3_to_string(&h).as_bytes());
        let out = hasher.finalize();
        out.iter().map(|b| format!("{b:02x}")).collect::<String>()
    };
    let run = find_tight_hamilton(&h, cfg, rep_seed);
    Ok(RunRecord {
        command: "find".into(),
        suite: a.suite.clone(),
        n,
        p: a.p,
        rep,
        seed: rep_seed,
        outcome: run.trace.outcome.clone(),
        success: run.cycle.is_some(),
        attempts: run.trace.attempts.len(),
        elapsed_ms: run.trace.elapsed_ms,
        input_sha256: sha,
    })
}
