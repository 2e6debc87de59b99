//! Search and census engines over parametrized curve families.
//!
//! Every engine splits its candidate space into numbered chunks. The driver
//! runs chunks in waves on a dedicated thread pool, merges results in chunk
//! order, and optionally writes a checkpoint after each wave so long runs can
//! resume. Survivors are identified by integer keys that the engine turns
//! back into curves; every survivor is re-counted through the curve models
//! before it is reported.

mod covers;
mod diagonal;
mod fiber;
mod genus3;
mod genus4;
mod klein;
mod quartic2;

pub use covers::DoubleCoverEngine;
pub use diagonal::DiagonalQuarticEngine;
pub use fiber::{fiberproduct_filter, FiberProductEngine};
pub use genus3::{pgl2_classes, HyperGenus3Engine};
pub use genus4::HyperGenus4Char2Engine;
pub use klein::{Klein4EvenEngine, Klein4OddEngine};
pub use quartic2::QuarticChar2Engine;

use std::collections::{BTreeMap, BTreeSet};
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::Instant;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::algebra::{Fe, FiniteField};
use crate::curves::Curve;
use crate::error::{Error, Result};
use crate::zeta::{self, ZetaReport};

/// Largest q^i for which survivors get extension counts by default.
const COUNT_BUDGET: u64 = 1 << 20;
/// Survivors that receive a full zeta report.
const ZETA_SURVIVORS: usize = 8;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    Klein4HyperOdd,
    Klein4HyperEven,
    DiagonalQuartic,
    QuarticChar2,
    Fiberproduct,
    HyperGenus3,
    DoubleCovers,
    HyperGenus4Char2,
}

impl Family {
    pub const ALL: [Family; 8] = [
        Family::Klein4HyperOdd,
        Family::Klein4HyperEven,
        Family::DiagonalQuartic,
        Family::QuarticChar2,
        Family::Fiberproduct,
        Family::HyperGenus3,
        Family::DoubleCovers,
        Family::HyperGenus4Char2,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Family::Klein4HyperOdd => "klein4_hyper_odd",
            Family::Klein4HyperEven => "klein4_hyper_even",
            Family::DiagonalQuartic => "diagonal_quartic",
            Family::QuarticChar2 => "quartic_char2",
            Family::Fiberproduct => "fiberproduct",
            Family::HyperGenus3 => "hyper_genus3",
            Family::DoubleCovers => "double_covers",
            Family::HyperGenus4Char2 => "hyper_genus4_char2",
        }
    }
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Family::ALL.into_iter().find(|f| f.name() == s).ok_or_else(|| Error::UnknownFamily(s.to_string()))
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    /// Stop at the first survivor in enumeration order.
    #[default]
    FirstFind,
    /// Visit the whole space and classify survivors.
    Census,
}

#[derive(Clone, Debug)]
pub struct SearchConfig {
    pub mode: Mode,
    pub jobs: usize,
    /// Cap on examined candidates.
    pub budget: Option<u64>,
    pub checkpoint: Option<PathBuf>,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig { mode: Mode::FirstFind, jobs: 1, budget: None, checkpoint: None }
    }
}

impl SearchConfig {
    pub fn census() -> Self {
        SearchConfig { mode: Mode::Census, ..Self::default() }
    }

    pub fn with_jobs(mut self, jobs: usize) -> Self {
        self.jobs = jobs.max(1);
        self
    }
}

/// Work done on one chunk.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChunkResult {
    pub examined: u64,
    /// Survivor keys in enumeration order.
    pub keys: Vec<Vec<u64>>,
    /// Named counters such as per-test kill counts.
    pub stats: BTreeMap<String, u64>,
}

impl ChunkResult {
    fn merge(&mut self, o: ChunkResult) {
        self.examined += o.examined;
        self.keys.extend(o.keys);
        for (k, v) in o.stats {
            *self.stats.entry(k).or_default() += v;
        }
    }

    pub(crate) fn bump(&mut self, stat: &str) {
        *self.stats.entry(stat.to_string()).or_default() += 1;
    }
}

/// A surviving curve, re-validated through the curve models.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Survivor {
    pub key: Vec<u64>,
    pub curve: String,
    pub kind: String,
    pub genus: u32,
    /// N_1, N_2, ... as far as affordable.
    pub counts: Vec<u64>,
    pub zeta: Option<ZetaReport>,
    /// Family-specific data (parameters, properties).
    pub detail: serde_json::Value,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SearchReport {
    pub family: Family,
    pub field: String,
    /// The canonical nonsquare (odd q) used for square-class normalization.
    pub nu: Option<String>,
    pub parameters: serde_json::Value,
    pub mode: Mode,
    pub chunks: u64,
    pub chunks_done: u64,
    pub candidates: u64,
    pub raw_survivors: usize,
    pub classes: usize,
    pub survivors: Vec<Survivor>,
    pub stats: BTreeMap<String, u64>,
    pub fingerprint: String,
    pub wall_time_ms: u128,
}

/// A candidate space split into chunks.
pub trait Engine: Sync {
    fn family(&self) -> Family;
    fn field(&self) -> &FiniteField;
    /// Family parameters as they should appear in reports and fingerprints.
    fn parameters(&self) -> serde_json::Value;
    fn chunk_count(&self) -> u64;
    /// Describes the visit order; part of the fingerprint.
    fn order_spec(&self) -> String;
    fn run_chunk(&self, chunk: u64, first_only: bool) -> Result<ChunkResult>;
    /// Rebuilds and re-validates a survivor.
    fn survivor(&self, key: &[u64]) -> Result<Survivor>;
    /// Number of classes among census survivors. Defaults to distinct
    /// count vectors.
    fn classes(&self, survivors: &[Survivor]) -> Result<usize> {
        Ok(survivors.iter().map(|s| &s.counts).collect::<BTreeSet<_>>().len())
    }
}

#[derive(Clone, Debug, Default, Serialize, Deserialize)]
struct Checkpoint {
    fingerprint: String,
    done: BTreeSet<u64>,
    results: BTreeMap<u64, ChunkResult>,
}

pub fn field_label(k: &FiniteField) -> String {
    if k.n() == 1 {
        format!("F_{}", k.q())
    } else {
        let m: Vec<String> = k.modulus().iter().map(|c| c.to_string()).collect();
        format!("F_{} (p = {}, modulus [{}] low to high)", k.q(), k.p(), m.join(", "))
    }
}

pub fn fingerprint(engine: &dyn Engine) -> String {
    let mut h = Sha256::new();
    h.update(engine.family().name());
    h.update(field_label(engine.field()));
    h.update(engine.parameters().to_string());
    h.update(engine.chunk_count().to_le_bytes());
    h.update(engine.order_spec());
    hex::encode(h.finalize())
}

fn load_checkpoint(path: &Path, fp: &str) -> Result<Checkpoint> {
    match std::fs::read_to_string(path) {
        Ok(text) => {
            let cp: Checkpoint =
                serde_json::from_str(&text).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
            if cp.fingerprint != fp {
                return Err(Error::Io(format!("{}: checkpoint belongs to a different search", path.display())));
            }
            Ok(cp)
        }
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => {
            Ok(Checkpoint { fingerprint: fp.to_string(), ..Default::default() })
        }
        Err(e) => Err(e.into()),
    }
}

fn save_checkpoint(path: &Path, cp: &Checkpoint) -> Result<()> {
    let tmp = path.with_extension("tmp");
    std::fs::write(&tmp, serde_json::to_vec(cp).map_err(|e| Error::Io(e.to_string()))?)?;
    std::fs::rename(&tmp, path)?;
    Ok(())
}

/// Runs an engine to completion (census) or to its first survivor.
pub fn run(engine: &dyn Engine, config: &SearchConfig) -> Result<SearchReport> {
    let start = Instant::now();
    let fp = fingerprint(engine);
    let mut cp = match &config.checkpoint {
        Some(path) => load_checkpoint(path, &fp)?,
        None => Checkpoint { fingerprint: fp.clone(), ..Default::default() },
    };
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(config.jobs.max(1))
        .build()
        .map_err(|e| Error::Io(e.to_string()))?;
    let first_only = config.mode == Mode::FirstFind;
    let total = engine.chunk_count();
    let wave = (4 * config.jobs.max(1) as u64).max(16);
    let pending: Vec<u64> = (0..total).filter(|c| !cp.done.contains(c)).collect();
    let found_before = cp.results.values().any(|r| !r.keys.is_empty());
    if !(first_only && found_before) {
        for batch in pending.chunks(wave as usize) {
            use rayon::prelude::*;
            let results: Vec<(u64, Result<ChunkResult>)> =
                pool.install(|| batch.par_iter().map(|&c| (c, engine.run_chunk(c, first_only))).collect());
            for (c, r) in results {
                cp.done.insert(c);
                cp.results.insert(c, r?);
            }
            if let Some(path) = &config.checkpoint {
                save_checkpoint(path, &cp)?;
            }
            let examined: u64 = cp.results.values().map(|r| r.examined).sum();
            if let Some(b) = config.budget {
                if examined > b {
                    return Err(Error::BudgetExceeded(b));
                }
            }
            if first_only && cp.results.values().any(|r| !r.keys.is_empty()) {
                break;
            }
        }
    }

    let mut merged = ChunkResult::default();
    for (_, r) in std::mem::take(&mut cp.results) {
        merged.merge(r);
    }
    if first_only {
        merged.keys.truncate(1);
    }
    let raw = merged.keys.len();
    let mut survivors = merged.keys.iter().map(|k| engine.survivor(k)).collect::<Result<Vec<_>>>()?;
    for (i, s) in survivors.iter_mut().enumerate() {
        if i < ZETA_SURVIVORS && s.counts.len() >= s.genus as usize {
            s.zeta = zeta::zeta_report(engine.field().q(), s.genus as usize, &s.counts).ok();
        }
    }
    let classes = if survivors.is_empty() { 0 } else { engine.classes(&survivors)? };
    let k = engine.field();
    Ok(SearchReport {
        family: engine.family(),
        field: field_label(k),
        nu: (!k.is_char2()).then(|| k.format(k.first_nonsquare())),
        parameters: engine.parameters(),
        mode: config.mode,
        chunks: total,
        chunks_done: cp.done.len() as u64,
        candidates: merged.examined,
        raw_survivors: raw,
        classes,
        survivors,
        stats: merged.stats,
        fingerprint: fp,
        wall_time_ms: start.elapsed().as_millis(),
    })
}

/// Survivor record for a curve model: recounts it, checks pointlessness and
/// genus, and counts over extensions while q^i stays within budget.
pub(crate) fn validated(
    key: &[u64],
    curve: Curve,
    genus: u32,
    depth: u32,
    detail: serde_json::Value,
) -> Result<Survivor> {
    let computed = curve.genus()?;
    if computed != genus {
        return Err(Error::InvalidCurve(format!(
            "survivor {} has genus {computed}, expected {genus}",
            curve.describe()
        )));
    }
    let q = curve.base().q();
    let mut counts = vec![curve.count(1)?];
    if counts[0] != 0 {
        return Err(Error::InvalidCurve(format!("survivor {} has {} points", curve.describe(), counts[0])));
    }
    for i in 2..=depth {
        match (q as u128).checked_pow(i) {
            Some(size) if size <= COUNT_BUDGET as u128 => counts.push(curve.count(i)?),
            _ => break,
        }
    }
    Ok(Survivor {
        key: key.to_vec(),
        curve: curve.describe(),
        kind: curve.kind().to_string(),
        genus,
        counts,
        zeta: None,
        detail,
    })
}

/// Mixed-radix digits of `idx`, least significant last.
pub(crate) fn digits(mut idx: u64, radix: u64, len: usize) -> Vec<u64> {
    let mut out = vec![0; len];
    for slot in out.iter_mut().rev() {
        *slot = idx % radix;
        idx /= radix;
    }
    out
}

pub(crate) fn fe_json(k: &FiniteField, v: Fe) -> serde_json::Value {
    serde_json::Value::String(k.format(v))
}
