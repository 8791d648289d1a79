//! End-to-end tight Hamilton cycle search: derive constants, build the
//! absorbing path, reserve junction vertices, cover the rest with paths,
//! concatenate everything into a cycle through reservoir-restricted
//! connections, and absorb the leftovers.
//!
//! The reference constants are computable but astronomically small, so the
//! pipeline runs with practical fractions by default and verifies every
//! stage's guarantee exactly instead of trusting tail bounds. A failed stage
//! aborts the attempt; attempts restart with fresh substreams up to a
//! budget. Failure is a first-class result carrying the full stage trace.

use crate::absorb::{absorb_into, build_absorbing_path, sample_family_in, AbsorberFamily};
use crate::bits::VertexSet;
use crate::connect::{connect, CascadeParams};
use crate::cover::{cover_with_paths, CoverBackend, CoverParams};
use crate::error::{Error, Result};
use crate::hypergraph::{Hypergraph3, SeqMode, TightCycle};
use crate::reservoir::sample_reservoir_in;
use crate::rng::{self, substream};
use rand::Rng;
use serde::{Deserialize, Serialize};
use std::time::Instant;

// Reference constant formulas, kept as standalone functions so they can be
// checked verbatim.

/// Absorbers per vertex scale: c = d^2 alpha^9 / 2^48.
pub fn c_count(d: f64, alpha: f64) -> f64 {
    d * d * alpha.powi(9) / 2.0f64.powi(48)
}

/// Per-quadruple sampling rate times n^3: gamma = c / (4 * 17).
pub fn gamma_probability(d: f64, alpha: f64) -> f64 {
    c_count(d, alpha) / 68.0
}

/// Family size fraction: two gammas.
pub fn f_frac_ref(d: f64, alpha: f64) -> f64 {
    2.0 * gamma_probability(d, alpha)
}

/// Per-vertex family coverage fraction: c * gamma / 4.
pub fn a_frac_ref(d: f64, alpha: f64) -> f64 {
    c_count(d, alpha) * gamma_probability(d, alpha) / 4.0
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct RhoValue {
    pub value: f64,
    /// The printed formula can go non-positive at these arguments.
    pub non_positive: bool,
}

impl RhoValue {
    fn new(value: f64) -> Self {
        Self { value, non_positive: !(value > 0.0) }
    }
}

/// Admissible deviation for connecting: min{d b^6 / 2^15, d / (12 (1 - 1/(d-b)))}.
/// The second term is negative whenever d - b < 1; it is computed as printed
/// and flagged rather than corrected.
pub fn rho_connect(d: f64, beta: f64) -> RhoValue {
    let t1 = d * beta.powi(6) / 2.0f64.powi(15);
    let t2 = d / (12.0 * (1.0 - 1.0 / (d - beta)));
    RhoValue::new(t1.min(t2))
}

/// Admissible deviation for absorber counting: min{d a^6 / 2^30, a (d - b) / 8}.
pub fn rho_count(d: f64, alpha: f64, beta: f64) -> f64 {
    (d * alpha.powi(6) / 2.0f64.powi(30)).min(alpha * (d - beta) / 8.0)
}

/// Admissible deviation for the absorbing path stage.
pub fn rho_absorb(d: f64, alpha: f64, beta: f64) -> RhoValue {
    let kappa = 10.0 * f_frac_ref(d, alpha);
    let t1 = rho_connect(d, beta - kappa).value * (1.0 - kappa).powi(3);
    RhoValue::new(t1.min(rho_count(d, alpha, beta)))
}

/// Admissible deviation for the matching step: d zeta^3 / 27.
pub fn rho_matching(d: f64, zeta: f64) -> f64 {
    d * zeta.powi(3) / 27.0
}

/// Cover-stage constants: rho' = rho_matching(d/2, zeta/12), then
/// t_reg = max{8/rho', 8/zeta}, d' = rho'/4, eps_reg = min{d'/2, zeta/24},
/// and the cover deviation rho'/4.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct CoverConstants {
    pub rho_prime: f64,
    pub t_reg: f64,
    pub d_prime: f64,
    pub eps_reg: f64,
    pub rho_cover: f64,
}

pub fn cover_constants(d: f64, zeta: f64) -> CoverConstants {
    let rho_prime = rho_matching(d / 2.0, zeta / 12.0);
    CoverConstants {
        rho_prime,
        t_reg: (8.0 / rho_prime).max(8.0 / zeta),
        d_prime: rho_prime / 4.0,
        eps_reg: (rho_prime / 8.0).min(zeta / 24.0),
        rho_cover: rho_prime / 4.0,
    }
}

/// Every derived constant at its reference formula value.
#[derive(Clone, Debug, Serialize)]
pub struct FaithfulConstants {
    pub c_count: f64,
    pub gamma_prob: f64,
    pub f_frac: f64,
    pub a_frac: f64,
    pub kappa: f64,
    pub m_frac: f64,
    pub nu: f64,
    pub rho_connect: RhoValue,
    pub rho_count: f64,
    pub rho_absorb: RhoValue,
    pub cover: CoverConstants,
    pub rho_final: RhoValue,
}

pub fn faithful_constants(d: f64, alpha: f64, beta: f64) -> FaithfulConstants {
    let c = c_count(d, alpha);
    let gamma = gamma_probability(d, alpha);
    let f = f_frac_ref(d, alpha);
    let a = a_frac_ref(d, alpha);
    let kappa = 10.0 * f;
    let m = a;
    let nu = m / 2.0;
    let absorb = rho_absorb(d, alpha, beta);
    let cov = cover_constants(d, m / 2.0);
    let final_term2 = 0.5 * cov.rho_cover * (d - beta) * (1.0 - kappa - nu).powi(3);
    let final_term3 = rho_connect(d, beta * nu / 8.0).value * (nu / 2.0).powi(3);
    FaithfulConstants {
        c_count: c,
        gamma_prob: gamma,
        f_frac: f,
        a_frac: a,
        kappa,
        m_frac: m,
        nu,
        rho_connect: rho_connect(d, beta),
        rho_count: rho_count(d, alpha, beta),
        rho_absorb: absorb,
        cover: cov,
        rho_final: RhoValue::new(absorb.value.min(final_term2).min(final_term3)),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Faithful,
    Practical,
}

/// All knobs of a run in one auditable record. Fraction fields are relative
/// to the instance order n.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(default)]
pub struct PipelineConfig {
    pub mode: Mode,
    pub d: f64,
    pub alpha: f64,
    pub beta: f64,
    pub kappa: f64,
    pub m_frac: f64,
    pub nu: f64,
    pub zeta: f64,
    pub gamma_budget: usize,
    pub epsilon: f64,
    pub t0: usize,
    pub t_cap: usize,
    pub omega: usize,
    pub t_deg: usize,
    pub probe_budget: u64,
    pub backend: CoverBackend,
    pub max_attempts: usize,
    pub family_retries: usize,
    pub reservoir_retries: usize,
    pub min_n: usize,
    /// Below min_n the staged pipeline cannot run; instances up to this order
    /// fall back to a budgeted exhaustive search instead.
    pub direct_search_max_n: usize,
    pub direct_search_nodes: u64,
    /// kappa <= beta/4 and the other reference-side constraints; recorded,
    /// and enforced only in faithful mode.
    pub lemma_constraints_ok: bool,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        Self {
            mode: Mode::Practical,
            d: 0.5,
            alpha: 0.5,
            beta: 0.15,
            kappa: 0.1,
            m_frac: 0.2,
            nu: 0.3,
            zeta: 0.05,
            gamma_budget: 24,
            epsilon: 0.1,
            t0: 4,
            t_cap: 16,
            omega: 1,
            t_deg: 1,
            probe_budget: 500_000,
            backend: CoverBackend::Greedy,
            max_attempts: 64,
            family_retries: 6,
            reservoir_retries: 20,
            min_n: 40,
            direct_search_max_n: 16,
            direct_search_nodes: 4_000_000,
            lemma_constraints_ok: false,
        }
    }
}

impl PipelineConfig {
    pub fn faithful(&self) -> FaithfulConstants {
        faithful_constants(self.d, self.alpha, self.beta)
    }

    pub fn cascade_params(&self) -> CascadeParams {
        CascadeParams { omega: self.omega, t_deg: self.t_deg, probe_budget: self.probe_budget }
    }
}

/// Optional overrides applied on top of the mode's derived values.
#[derive(Clone, Debug, Default, Deserialize)]
pub struct ConfigOverrides {
    pub beta: Option<f64>,
    pub kappa: Option<f64>,
    pub m_frac: Option<f64>,
    pub nu: Option<f64>,
    pub zeta: Option<f64>,
    pub gamma_budget: Option<usize>,
    pub max_attempts: Option<usize>,
    pub omega: Option<usize>,
    pub t_deg: Option<usize>,
    pub backend: Option<CoverBackend>,
}

/// Builds a validated config. Faithful mode sets every fraction from its
/// reference formula (and enforces the reference constraints); practical
/// mode starts from the documented defaults and applies overrides, recording
/// whether the reference constraints happen to hold.
pub fn derive_constants(
    d: f64,
    alpha: f64,
    mode: Mode,
    overrides: &ConfigOverrides,
) -> Result<PipelineConfig> {
    if !(d > 0.0 && d <= 1.0 && alpha > 0.0 && alpha <= 1.0) {
        return Err(Error::Precondition(format!("d = {d}, alpha = {alpha} must lie in (0, 1]")));
    }
    let mut cfg = PipelineConfig { mode, d, alpha, ..PipelineConfig::default() };
    if let Mode::Faithful = mode {
        let beta_floor = d * d * alpha.powi(9);
        cfg.beta = overrides.beta.unwrap_or((beta_floor + d) / 2.0);
        let f = faithful_constants(d, alpha, cfg.beta);
        cfg.kappa = f.kappa;
        cfg.m_frac = f.m_frac;
        cfg.nu = f.nu;
        cfg.zeta = f.m_frac / 2.0;
    }
    if let Some(b) = overrides.beta {
        cfg.beta = b;
    }
    if let Some(k) = overrides.kappa {
        cfg.kappa = k;
    }
    if let Some(m) = overrides.m_frac {
        cfg.m_frac = m;
    }
    if let Some(nu) = overrides.nu {
        cfg.nu = nu;
    }
    if let Some(z) = overrides.zeta {
        cfg.zeta = z;
    }
    if let Some(g) = overrides.gamma_budget {
        cfg.gamma_budget = g;
    }
    if let Some(a) = overrides.max_attempts {
        cfg.max_attempts = a;
    }
    if let Some(o) = overrides.omega {
        cfg.omega = o;
    }
    if let Some(t) = overrides.t_deg {
        cfg.t_deg = t;
    }
    if let Some(b) = overrides.backend {
        cfg.backend = b;
    }

    let beta_floor = d * d * alpha.powi(9);
    if !(cfg.beta >= beta_floor && cfg.beta < d) {
        return Err(Error::Precondition(format!(
            "beta = {} must lie in [d^2 alpha^9, d) = [{beta_floor:.3e}, {d})",
            cfg.beta
        )));
    }
    if !(cfg.kappa > 0.0 && cfg.kappa < cfg.beta) {
        return Err(Error::Precondition(format!(
            "kappa = {} must lie in (0, beta = {})",
            cfg.kappa, cfg.beta
        )));
    }
    if !(cfg.nu > 0.0 && cfg.nu <= 0.5) {
        return Err(Error::Precondition(format!("nu = {} must lie in (0, 1/2]", cfg.nu)));
    }
    cfg.lemma_constraints_ok = cfg.kappa <= cfg.beta / 4.0;
    if mode == Mode::Faithful && !cfg.lemma_constraints_ok {
        return Err(Error::Precondition(format!(
            "faithful mode needs kappa <= beta/4, got kappa = {} beta = {}",
            cfg.kappa, cfg.beta
        )));
    }
    Ok(cfg)
}

#[derive(Clone, Debug, Serialize)]
pub struct StageRecord {
    pub stage: String,
    pub ok: bool,
    pub detail: String,
    pub size: u64,
    pub elapsed_ms: f64,
    /// Junction stages: the freshly used internal vertices.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub internals: Option<Vec<u32>>,
}

#[derive(Clone, Debug, Serialize)]
pub struct AttemptTrace {
    pub attempt: usize,
    pub ok: bool,
    pub stages: Vec<StageRecord>,
}

#[derive(Clone, Debug, Serialize)]
pub struct StageTrace {
    pub n: usize,
    pub seed: u64,
    pub outcome: String,
    pub attempts: Vec<AttemptTrace>,
    pub elapsed_ms: f64,
}

#[derive(Clone, Debug)]
pub struct PipelineRun {
    pub cycle: Option<TightCycle>,
    pub trace: StageTrace,
}

struct AttemptLog {
    stages: Vec<StageRecord>,
    t0: Instant,
}

impl AttemptLog {
    fn new() -> Self {
        Self { stages: Vec::new(), t0: Instant::now() }
    }

    fn rec(&mut self, stage: &str, ok: bool, detail: String, size: u64) {
        self.stages.push(StageRecord {
            stage: stage.to_string(),
            ok,
            detail,
            size,
            elapsed_ms: self.t0.elapsed().as_secs_f64() * 1e3,
            internals: None,
        });
        self.t0 = Instant::now();
    }

    fn rec_junction(&mut self, stage: &str, internals: Vec<u32>) {
        self.stages.push(StageRecord {
            stage: stage.to_string(),
            ok: true,
            detail: String::new(),
            size: internals.len() as u64,
            elapsed_ms: self.t0.elapsed().as_secs_f64() * 1e3,
            internals: Some(internals),
        });
        self.t0 = Instant::now();
    }
}

/// Runs the full pipeline. Returns the cycle on success; either way the
/// trace records every attempt's stages. Deterministic in (config, seed).
pub fn find_tight_hamilton(h: &Hypergraph3, cfg: &PipelineConfig, seed: u64) -> PipelineRun {
    let t_start = Instant::now();
    let n = h.vertex_count();
    let mut attempts = Vec::new();
    let mut outcome = String::new();

    if n < cfg.min_n {
        // too small for the staged pipeline; search directly when feasible
        if n <= cfg.direct_search_max_n {
            let mut log = AttemptLog::new();
            let found = direct_search(h, cfg.direct_search_nodes);
            let (cycle, outcome) = match found {
                Some(seq) => {
                    log.rec("direct-search", true, "exhaustive search".into(), seq.len() as u64);
                    (Some(TightCycle(seq)), "success".to_string())
                }
                None => {
                    log.rec("direct-search", false, "no cycle within budget".into(), 0);
                    (None, "failure:direct-search".to_string())
                }
            };
            attempts.push(AttemptTrace { attempt: 0, ok: cycle.is_some(), stages: log.stages });
            return PipelineRun {
                cycle,
                trace: StageTrace {
                    n,
                    seed,
                    outcome,
                    attempts,
                    elapsed_ms: t_start.elapsed().as_secs_f64() * 1e3,
                },
            };
        }
        outcome = format!("failure:precheck (n = {n} below minimum {})", cfg.min_n);
    } else if ((cfg.nu * n as f64).ceil() as usize) / 6 < 2 {
        outcome = format!("failure:precheck (reservoir {} too small for two junctions)",
            (cfg.nu * n as f64).ceil());
    }
    if !outcome.is_empty() {
        return PipelineRun {
            cycle: None,
            trace: StageTrace {
                n,
                seed,
                outcome,
                attempts,
                elapsed_ms: t_start.elapsed().as_secs_f64() * 1e3,
            },
        };
    }

    let filtered_full = h.filter_beta(cfg.beta);
    for attempt in 0..cfg.max_attempts {
        let mut log = AttemptLog::new();
        let result = run_attempt(h, cfg, seed, attempt, &filtered_full, &mut log);
        let ok = result.is_ok();
        match result {
            Ok(cycle) => {
                attempts.push(AttemptTrace { attempt, ok, stages: log.stages });
                return PipelineRun {
                    cycle: Some(TightCycle(cycle)),
                    trace: StageTrace {
                        n,
                        seed,
                        outcome: "success".into(),
                        attempts,
                        elapsed_ms: t_start.elapsed().as_secs_f64() * 1e3,
                    },
                };
            }
            Err(stage) => {
                outcome = format!("failure:{stage}");
                attempts.push(AttemptTrace { attempt, ok, stages: log.stages });
            }
        }
    }
    PipelineRun {
        cycle: None,
        trace: StageTrace {
            n,
            seed,
            outcome,
            attempts,
            elapsed_ms: t_start.elapsed().as_secs_f64() * 1e3,
        },
    }
}

fn stage_fail(log: &mut AttemptLog, stage: &str, detail: String) -> String {
    log.rec(stage, false, detail, 0);
    stage.to_string()
}

/// Budgeted DFS for a tight Hamilton cycle on a tiny instance. The first
/// vertex is pinned (cycles are rotation-invariant) and extensions scan in
/// ascending id order; deterministic.
fn direct_search(h: &Hypergraph3, node_budget: u64) -> Option<Vec<u32>> {
    fn dfs(
        h: &Hypergraph3,
        n: usize,
        seq: &mut Vec<u32>,
        used: &mut VertexSet,
        budget: &mut u64,
    ) -> bool {
        if *budget == 0 {
            return false;
        }
        *budget -= 1;
        if seq.len() == n {
            return h.has_edge(seq[n - 2], seq[n - 1], seq[0])
                && h.has_edge(seq[n - 1], seq[0], seq[1]);
        }
        let cands: Vec<u32> = if seq.len() < 2 {
            h.active().difference(used).to_vec()
        } else {
            h.coneighbors(seq[seq.len() - 2], seq[seq.len() - 1]).difference(used).to_vec()
        };
        for v in cands {
            seq.push(v);
            used.insert(v);
            if dfs(h, n, seq, used, budget) {
                return true;
            }
            seq.pop();
            used.remove(v);
        }
        false
    }

    let n = h.vertex_count();
    if n < 3 {
        return None;
    }
    let start = h.active().first()?;
    let mut seq = vec![start];
    let mut used: VertexSet = [start].into_iter().collect();
    let mut budget = node_budget;
    dfs(h, n, &mut seq, &mut used, &mut budget).then_some(seq)
}

fn run_attempt(
    h: &Hypergraph3,
    cfg: &PipelineConfig,
    seed: u64,
    attempt: usize,
    filtered_full: &crate::hypergraph::BetaFiltered,
    log: &mut AttemptLog,
) -> std::result::Result<Vec<u32>, String> {
    let n = h.vertex_count();
    let nf = n as f64;
    let params = cfg.cascade_params();
    let mut arng = substream(seed, rng::DOMAIN_ATTEMPT, attempt as u64);
    let family_seed: u64 = arng.gen();
    let reservoir_seed: u64 = arng.gen();
    let cover_seed: u64 = arng.gen();

    // (1) absorber family sized to the kappa budget, then the absorbing path
    let r_budget = (((cfg.kappa * nf + 6.0) / 10.0).floor() as usize).max(1);
    let gamma_prob = ((4.0 * r_budget as f64).max(8.0) / nf).min(0.9);
    let mut family: Option<AbsorberFamily> = None;
    for t in 0..=cfg.family_retries as u64 {
        let fam = sample_family_in(
            h,
            &filtered_full.graph,
            gamma_prob,
            family_seed.wrapping_add(t),
            0,
            0,
        )
        .map_err(|e| stage_fail(log, "family", e.to_string()))?;
        if !fam.is_empty() {
            family = Some(fam);
            break;
        }
    }
    let Some(mut family) = family else {
        return Err(stage_fail(log, "family", "no valid absorber sampled".into()));
    };
    family.truncate(h, r_budget);
    log.rec("family", true, format!("members = {}", family.len()), family.len() as u64);

    let path = build_absorbing_path(h, &family, cfg.beta, cfg.kappa, &params)
        .map_err(|e| stage_fail(log, "absorbing-path", e.to_string()))?;
    if path.len() as f64 > cfg.kappa * nf {
        return Err(stage_fail(
            log,
            "absorbing-path",
            format!("path has {} vertices, over kappa n = {}", path.len(), cfg.kappa * nf),
        ));
    }
    log.rec("absorbing-path", true, format!("vertices = {}", path.len()), path.len() as u64);
    let path_set: VertexSet = path.0.iter().copied().collect();

    // (2) reservoir avoiding the absorbing path
    let reservoir = sample_reservoir_in(
        h,
        filtered_full,
        cfg.beta,
        cfg.nu,
        &path_set,
        reservoir_seed,
        cfg.reservoir_retries,
    )
    .map_err(|e| stage_fail(log, "reservoir", e.to_string()))?;
    let r_size = reservoir.members.len();
    log.rec(
        "reservoir",
        true,
        format!("size = {r_size}, certified_min = {}", reservoir.certified_min),
        r_size as u64,
    );
    let r_set = reservoir.vertex_set();

    // (3) path cover of H' = H - V(A) - R, on edges that stay relevant in H
    let mut removed = path_set.clone();
    removed.union_with(&r_set);
    let hprime = h.without(&removed);
    let np = hprime.vertex_count();
    let hcov = hprime.filter_beta_abs(cfg.beta * nf).graph;
    let shortfall_budget = cfg.m_frac * nf / 2.0;
    let zeta_local = if np == 0 { 1.0 } else { (shortfall_budget / np as f64).min(1.0) };
    let cover_params = CoverParams {
        epsilon: cfg.epsilon,
        t0: cfg.t0,
        t_cap: cfg.t_cap,
        d_prime: cfg.d / 2.0,
        seed: cover_seed,
    };
    let cover = cover_with_paths(&hcov, cfg.d, zeta_local, cfg.backend, &cover_params)
        .map_err(|e| stage_fail(log, "cover", e.to_string()))?;
    if cover.shortfall as f64 > shortfall_budget {
        return Err(stage_fail(
            log,
            "cover",
            format!("shortfall {} over budget {shortfall_budget:.1}", cover.shortfall),
        ));
    }
    log.rec(
        "cover",
        true,
        format!("paths = {}, covered = {}/{np}", cover.paths.len(), cover.covered),
        cover.paths.len() as u64,
    );
    let mut covered_set = VertexSet::new();
    for p in &cover.paths {
        covered_set.extend(p.iter().copied());
    }
    let uncovered = hprime.active().difference(&covered_set);

    // (3b) the cycle uses gamma = r_size/6 junctions; split cover paths so
    // that exactly gamma - 1 of them chain with the absorbing path
    let gamma = r_size / 6;
    if gamma > cfg.gamma_budget {
        return Err(stage_fail(
            log,
            "cover",
            format!("needs {gamma} junctions, budget {}", cfg.gamma_budget),
        ));
    }
    let mut paths = cover.paths;
    let want = gamma - 1;
    if paths.len() > want {
        return Err(stage_fail(
            log,
            "cover",
            format!("{} cover paths exceed the {want} junction slots", paths.len()),
        ));
    }
    while paths.len() < want {
        // split the longest splittable path in half
        let (mut best_i, mut best_len) = (usize::MAX, 5);
        for (i, p) in paths.iter().enumerate() {
            if p.len() > best_len {
                best_len = p.len();
                best_i = i;
            }
        }
        if best_i == usize::MAX {
            return Err(stage_fail(
                log,
                "cover",
                format!("cannot split {} paths into {want}", paths.len()),
            ));
        }
        let tail = paths[best_i].split_off(best_len / 2);
        paths.push(tail);
    }
    log.rec("split", true, format!("paths = {}, target = {want}", paths.len()), want as u64);

    // (4) chain the cover paths, then the absorbing path, through the
    // reservoir; (5) close the cycle
    let beta_junction = cfg.beta * cfg.nu / 8.0;
    let mut r_free = r_set.clone();
    let mut pending: Vec<Vec<u32>> = paths;
    let mut seq: Vec<u32> = if want == 0 { path.0.clone() } else { pending.remove(0) };
    let mut absorbing_pending = want > 0;
    let mut junction_idx = 0usize;
    while !pending.is_empty() || absorbing_pending {
        junction_idx += 1;
        let (a, b) = (seq[seq.len() - 2], seq[seq.len() - 1]);
        let mut joined = false;
        let targets: Vec<Vec<u32>> = if pending.is_empty() {
            vec![path.0.clone()]
        } else {
            pending.clone()
        };
        'target: for (ti, target) in targets.iter().enumerate() {
            for rev in [false, true] {
                let mut tv = target.clone();
                if rev {
                    tv.reverse();
                }
                let (c, d) = (tv[0], tv[1]);
                let mut r_i = r_free.clone();
                for anchor in [a, b, c, d] {
                    r_i.insert(anchor);
                }
                let forbidden = h.active().difference(&r_i);
                let cp = connect(h, beta_junction, (a, b), (c, d), &forbidden, &params)
                    .map_err(|e| stage_fail(log, "junction", e.to_string()))?;
                if let Some(p) = cp {
                    let internals = p.0[2..8].to_vec();
                    for &v in &internals {
                        r_free.remove(v);
                    }
                    seq.extend_from_slice(&p.0[2..]);
                    seq.extend_from_slice(&tv[2..]);
                    log.rec_junction(&format!("junction:{junction_idx}"), internals);
                    if pending.is_empty() {
                        absorbing_pending = false;
                    } else {
                        pending.remove(ti);
                    }
                    joined = true;
                    break 'target;
                }
            }
        }
        if !joined {
            return Err(stage_fail(
                log,
                "junction",
                format!("junction {junction_idx} found no connection"),
            ));
        }
    }
    // close the cycle
    let (a, b) = (seq[seq.len() - 2], seq[seq.len() - 1]);
    let (c, d) = (seq[0], seq[1]);
    let mut r_i = r_free.clone();
    for anchor in [a, b, c, d] {
        r_i.insert(anchor);
    }
    let forbidden = h.active().difference(&r_i);
    let close = connect(h, beta_junction, (a, b), (c, d), &forbidden, &params)
        .map_err(|e| stage_fail(log, "closure", e.to_string()))?;
    let Some(cp) = close else {
        return Err(stage_fail(log, "closure", "closing junction found no connection".into()));
    };
    let internals = cp.0[2..8].to_vec();
    for &v in &internals {
        r_free.remove(v);
    }
    seq.extend_from_slice(&cp.0[2..8]);
    log.rec_junction("closure", internals);

    // (6) absorb uncovered vertices and unused reservoir into the cycle
    let mut extra = uncovered.clone();
    extra.union_with(&r_free);
    if extra.len() as f64 > cfg.m_frac * nf {
        return Err(stage_fail(
            log,
            "absorb",
            format!("{} leftovers exceed capacity {}", extra.len(), cfg.m_frac * nf),
        ));
    }
    absorb_into(&mut seq, &mut family, &extra)
        .map_err(|e| stage_fail(log, "absorb", e.to_string()))?;
    log.rec("absorb", true, format!("absorbed = {}", extra.len()), extra.len() as u64);

    // (7) exact final validation: spanning, conservation, tightness
    let mut sorted = seq.clone();
    sorted.sort_unstable();
    sorted.dedup();
    if sorted.len() != seq.len() || sorted != h.active().to_vec() {
        return Err(stage_fail(log, "validate", "cycle does not conserve the vertex set".into()));
    }
    let verdict = h.validate_tight(&seq, SeqMode::Cycle, true);
    if !verdict.ok {
        return Err(stage_fail(log, "validate", format!("{:?}", verdict.violation)));
    }
    log.rec("validate", true, "tight Hamilton cycle".into(), seq.len() as u64);
    Ok(seq)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_formulas() {
        assert_eq!(c_count(1.0, 1.0), 2.0f64.powi(-48));
        assert_eq!(gamma_probability(1.0, 1.0), 2.0f64.powi(-48) / 68.0);
        assert_eq!(rho_matching(1.0, 1.0), 1.0 / 27.0);
        let cc = cover_constants(1.0, 1.0);
        assert_eq!(cc.rho_prime, rho_matching(0.5, 1.0 / 12.0));
        assert_eq!(cc.t_reg, (8.0 / cc.rho_prime).max(8.0));
    }

    #[test]
    fn rho_connect_flags_negative_term() {
        let r = rho_connect(0.5, 0.15);
        assert!(r.non_positive, "second term negative since d - beta < 1");
        let r2 = rho_connect(0.5, 0.15);
        assert_eq!(r.value, r2.value);
    }

    #[test]
    fn derive_constants_validation() {
        let cfg = derive_constants(0.5, 0.5, Mode::Practical, &ConfigOverrides::default())
            .unwrap();
        assert_eq!(cfg.beta, 0.15);
        assert!(!cfg.lemma_constraints_ok); // kappa = 0.1 > beta/4

        let bad = derive_constants(
            0.5,
            0.5,
            Mode::Practical,
            &ConfigOverrides { beta: Some(0.7), ..Default::default() },
        );
        assert!(bad.is_err());

        let faithful =
            derive_constants(0.5, 0.5, Mode::Faithful, &ConfigOverrides::default()).unwrap();
        let f = faithful.faithful();
        assert_eq!(faithful.kappa, f.kappa);
        assert_eq!(faithful.nu, f.m_frac / 2.0);
        assert!(faithful.lemma_constraints_ok);
    }

    #[test]
    fn pipeline_succeeds_on_planted() {
        let (h, _) = crate::gen::gen_planted(60, 0.5, 13);
        let cfg = PipelineConfig::default();
        let run = find_tight_hamilton(&h, &cfg, 13);
        let cycle = run.cycle.expect(&format!("outcome: {}", run.trace.outcome));
        assert!(h.validate_tight(cycle.vertices(), SeqMode::Cycle, true).ok);
    }

    #[test]
    fn pipeline_fails_on_counterexample() {
        let (h, _, _) = crate::gen::gen_counterexample(120, 1).unwrap();
        let mut cfg = PipelineConfig::default();
        cfg.max_attempts = 2;
        let run = find_tight_hamilton(&h, &cfg, 1);
        assert!(run.cycle.is_none());
        assert!(run.trace.outcome.starts_with("failure"));
    }

    #[test]
    fn pipeline_deterministic() {
        let h = crate::gen::gen_random(60, 0.5, 21);
        let cfg = PipelineConfig::default();
        let a = find_tight_hamilton(&h, &cfg, 5);
        let b = find_tight_hamilton(&h, &cfg, 5);
        assert_eq!(a.trace.outcome, b.trace.outcome);
        assert_eq!(a.cycle.map(|c| c.0), b.cycle.map(|c| c.0));
    }
}
