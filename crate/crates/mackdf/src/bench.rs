//! Per-invocation timing of the seven MAC/KDF constructions.
//!
//! Every target is run `warmup` times untimed and then `iterations` times,
//! each call timed on its own with [`Instant`]. Inputs come from a ChaCha8
//! stream seeded by the caller and are generated before the timed loop, so
//! a run is replayable and the generator never shows up in the samples.
//! Outliers are kept.

use std::fmt;
use std::hint::black_box;
use std::io::Write;
use std::str::FromStr;
use std::time::Instant;

use mackdf_core::cmac::cmac;
use mackdf_core::hmac::hmac_sha256;
use mackdf_core::kdf::{counter_kdf, ieee_kdf, kmac_kdf, IeeeKdfInput, PrfChoice};
use mackdf_core::kmac::{kmac, KmacParams};
use mackdf_core::primitives::sha256;
use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub const DEFAULT_ITERATIONS: usize = 1000;
pub const DEFAULT_WARMUP: usize = 100;
pub const DEFAULT_MSG_LEN: usize = 32;
pub const DEFAULT_KDF_OUT_LEN: usize = 48;
pub const DEFAULT_KEY_LEN: usize = 16;
/// `iValue || jValue`.
pub const IEEE_CONTEXT_LEN: usize = 8;

#[derive(Debug, Error)]
pub enum BenchError {
    #[error("iterations must be at least 1")]
    NoIterations,
    #[error("empty sample set")]
    EmptySamples,
    #[error("invalid target {kind}: {reason}")]
    InvalidTarget { kind: BenchKind, reason: String },
    #[error("unknown target `{0}`")]
    UnknownTarget(String),
    #[error("nothing to export")]
    NothingToExport,
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum BenchKind {
    #[serde(rename = "HMAC")]
    Hmac,
    #[serde(rename = "CMAC")]
    Cmac,
    #[serde(rename = "KMAC")]
    Kmac,
    #[serde(rename = "HMAC_KDF")]
    HmacKdf,
    #[serde(rename = "CMAC_KDF")]
    CmacKdf,
    #[serde(rename = "KMAC_KDF")]
    KmacKdf,
    #[serde(rename = "IEEE_KDF")]
    IeeeKdf,
}

impl BenchKind {
    pub const MACS: [BenchKind; 3] = [BenchKind::Hmac, BenchKind::Cmac, BenchKind::Kmac];
    pub const KDFS: [BenchKind; 4] = [
        BenchKind::HmacKdf,
        BenchKind::CmacKdf,
        BenchKind::KmacKdf,
        BenchKind::IeeeKdf,
    ];
    pub const ALL: [BenchKind; 7] = [
        BenchKind::Hmac,
        BenchKind::Cmac,
        BenchKind::Kmac,
        BenchKind::HmacKdf,
        BenchKind::CmacKdf,
        BenchKind::KmacKdf,
        BenchKind::IeeeKdf,
    ];

    pub fn name(self) -> &'static str {
        match self {
            BenchKind::Hmac => "HMAC",
            BenchKind::Cmac => "CMAC",
            BenchKind::Kmac => "KMAC",
            BenchKind::HmacKdf => "HMAC_KDF",
            BenchKind::CmacKdf => "CMAC_KDF",
            BenchKind::KmacKdf => "KMAC_KDF",
            BenchKind::IeeeKdf => "IEEE_KDF",
        }
    }

    pub fn is_kdf(self) -> bool {
        Self::KDFS.contains(&self)
    }
}

impl fmt::Display for BenchKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for BenchKind {
    type Err = BenchError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        BenchKind::ALL
            .into_iter()
            .find(|k| k.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| BenchError::UnknownTarget(s.to_string()))
    }
}

/// `all`, `macs`, `kdfs`, or a comma-separated list of kind names.
pub fn parse_target_set(spec: &str) -> Result<Vec<BenchKind>, BenchError> {
    match spec.trim().to_ascii_lowercase().as_str() {
        "all" => Ok(BenchKind::ALL.to_vec()),
        "macs" => Ok(BenchKind::MACS.to_vec()),
        "kdfs" => Ok(BenchKind::KDFS.to_vec()),
        _ => spec.split(',').map(|s| s.trim().parse()).collect(),
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BenchTarget {
    pub kind: BenchKind,
    pub key: Vec<u8>,
    /// Message (MACs) or context (KDFs) length. The IEEE KDF always
    /// consumes 8 bytes: the two 4-byte indices.
    pub msg_len: usize,
    /// Derived output length in bytes; ignored by MAC kinds and fixed at 48
    /// for the IEEE KDF.
    pub out_len: usize,
}

impl BenchTarget {
    /// Default configuration: 16-byte key drawn from `seed`, 32-byte
    /// messages, 48-byte KDF outputs.
    pub fn with_defaults(kind: BenchKind, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x6b65_795f_7365_6564);
        let mut key = vec![0u8; DEFAULT_KEY_LEN];
        rng.fill_bytes(&mut key);
        BenchTarget {
            kind,
            key,
            msg_len: if kind == BenchKind::IeeeKdf {
                IEEE_CONTEXT_LEN
            } else {
                DEFAULT_MSG_LEN
            },
            out_len: if kind.is_kdf() { DEFAULT_KDF_OUT_LEN } else { 0 },
        }
    }

    fn validate(&self) -> Result<(), BenchError> {
        let invalid = |reason: &str| BenchError::InvalidTarget {
            kind: self.kind,
            reason: reason.to_string(),
        };
        let aes_keyed = matches!(
            self.kind,
            BenchKind::Cmac | BenchKind::CmacKdf | BenchKind::IeeeKdf
        );
        if aes_keyed && self.key.len() != 16 {
            return Err(invalid("AES-based targets need a 16-byte key"));
        }
        if self.kind == BenchKind::IeeeKdf {
            if self.msg_len != IEEE_CONTEXT_LEN {
                return Err(invalid("IEEE KDF context is exactly 8 bytes"));
            }
            if self.out_len != DEFAULT_KDF_OUT_LEN {
                return Err(invalid("IEEE KDF output is exactly 48 bytes"));
            }
        }
        if self.kind.is_kdf() && self.out_len == 0 {
            return Err(invalid("KDF output length must be positive"));
        }
        Ok(())
    }

    /// One invocation; the result is only a byte count so the caller can
    /// feed it to `black_box`.
    fn invoke(&self, msg: &[u8]) -> usize {
        let key = &self.key;
        match self.kind {
            BenchKind::Hmac => hmac_sha256(key, msg).len(),
            BenchKind::Cmac => cmac(key, msg).expect("validated").len(),
            BenchKind::Kmac => kmac(key, msg, &KmacParams::default()).expect("validated").len(),
            BenchKind::HmacKdf => counter_kdf(PrfChoice::HmacSha256, key, msg, self.out_len)
                .expect("validated")
                .len(),
            BenchKind::CmacKdf => counter_kdf(PrfChoice::CmacAes128, key, msg, self.out_len)
                .expect("validated")
                .len(),
            BenchKind::KmacKdf => kmac_kdf(key, msg, self.out_len * 8).expect("validated").len(),
            BenchKind::IeeeKdf => {
                let input = IeeeKdfInput::from_slices(key, &msg[..4], &msg[4..], 1).expect("validated");
                ieee_kdf(&input).len()
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TimingSampleSet {
    /// Elapsed time of each timed invocation, in nanoseconds (at least 1).
    pub samples: Vec<u64>,
    pub iterations: usize,
    pub warmup_count: usize,
    pub seed: u64,
    /// SHA-256 over every generated input, warmup included.
    pub input_digest: String,
}

pub fn run_bench(
    target: &BenchTarget,
    iterations: usize,
    warmup: usize,
    seed: u64,
) -> Result<TimingSampleSet, BenchError> {
    if iterations == 0 {
        return Err(BenchError::NoIterations);
    }
    target.validate()?;

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut inputs = vec![0u8; (warmup + iterations) * target.msg_len];
    rng.fill_bytes(&mut inputs);
    let input_digest = hex::encode(sha256(&inputs));
    let mut messages: Box<dyn Iterator<Item = &[u8]>> = if target.msg_len == 0 {
        Box::new(std::iter::repeat(&[][..]))
    } else {
        Box::new(inputs.chunks_exact(target.msg_len))
    };

    for msg in messages.by_ref().take(warmup) {
        black_box(target.invoke(black_box(msg)));
    }

    let mut samples = Vec::with_capacity(iterations);
    for msg in messages.take(iterations) {
        let start = Instant::now();
        black_box(target.invoke(black_box(msg)));
        let ns = start.elapsed().as_nanos();
        samples.push(u64::try_from(ns).unwrap_or(u64::MAX).max(1));
    }

    Ok(TimingSampleSet {
        samples,
        iterations,
        warmup_count: warmup,
        seed,
        input_digest,
    })
}

/// Summary statistics in milliseconds.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BenchStats {
    pub mean_ms: f64,
    pub median_ms: f64,
    pub stddev_ms: f64,
    pub q1_ms: f64,
    pub q3_ms: f64,
    pub min_ms: f64,
    pub max_ms: f64,
}

/// Linear interpolation between closest ranks on sorted data.
fn quantile(sorted: &[f64], p: f64) -> f64 {
    let pos = p * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    sorted[lo] + (sorted[hi] - sorted[lo]) * (pos - lo as f64)
}

/// Statistics of raw millisecond values.
pub fn summarize_ms(values: &[f64]) -> Result<BenchStats, BenchError> {
    if values.is_empty() {
        return Err(BenchError::EmptySamples);
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len() as f64;
    let mean = sorted.iter().sum::<f64>() / n;
    let var = sorted.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
    Ok(BenchStats {
        // summation order can push the mean a hair outside [min, max]
        mean_ms: mean.clamp(sorted[0], sorted[sorted.len() - 1]),
        median_ms: quantile(&sorted, 0.5),
        stddev_ms: var.sqrt(),
        q1_ms: quantile(&sorted, 0.25),
        q3_ms: quantile(&sorted, 0.75),
        min_ms: sorted[0],
        max_ms: sorted[sorted.len() - 1],
    })
}

pub fn summarize(samples: &TimingSampleSet) -> Result<BenchStats, BenchError> {
    let ms: Vec<f64> = samples.samples.iter().map(|&ns| ns as f64 / 1e6).collect();
    summarize_ms(&ms)
}

fn round6(v: f64) -> f64 {
    (v * 1e6).round() / 1e6
}

impl BenchStats {
    /// Every field rounded to 6 decimal places, as exported.
    pub fn rounded(&self) -> BenchStats {
        BenchStats {
            mean_ms: round6(self.mean_ms),
            median_ms: round6(self.median_ms),
            stddev_ms: round6(self.stddev_ms),
            q1_ms: round6(self.q1_ms),
            q3_ms: round6(self.q3_ms),
            min_ms: round6(self.min_ms),
            max_ms: round6(self.max_ms),
        }
    }
}

/// One exported row: target metadata plus its statistics.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchRecord {
    pub target: BenchKind,
    pub msg_len: usize,
    pub out_len: usize,
    pub iterations: usize,
    pub warmup: usize,
    pub seed: u64,
    pub input_digest: String,
    #[serde(flatten)]
    pub stats: BenchStats,
}

impl BenchRecord {
    pub fn new(target: &BenchTarget, samples: &TimingSampleSet, stats: BenchStats) -> Self {
        BenchRecord {
            target: target.kind,
            msg_len: target.msg_len,
            out_len: target.out_len,
            iterations: samples.iterations,
            warmup: samples.warmup_count,
            seed: samples.seed,
            input_digest: samples.input_digest.clone(),
            stats,
        }
    }
}

/// Runs each kind with default targets, one after another.
pub fn run_suite(
    kinds: &[BenchKind],
    iterations: usize,
    warmup: usize,
    seed: u64,
) -> Result<Vec<BenchRecord>, BenchError> {
    kinds
        .iter()
        .map(|&kind| {
            let target = BenchTarget::with_defaults(kind, seed);
            let samples = run_bench(&target, iterations, warmup, seed)?;
            let stats = summarize(&samples)?;
            Ok(BenchRecord::new(&target, &samples, stats))
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExportFormat {
    Csv,
    Json,
}

impl FromStr for ExportFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "csv" => Ok(ExportFormat::Csv),
            "json" => Ok(ExportFormat::Json),
            other => Err(format!("unknown format `{other}` (csv or json)")),
        }
    }
}

/// CSV column order.
pub const CSV_HEADER: [&str; 14] = [
    "target",
    "msg_len",
    "out_len",
    "iterations",
    "warmup",
    "seed",
    "input_digest",
    "mean_ms",
    "median_ms",
    "stddev_ms",
    "q1_ms",
    "q3_ms",
    "min_ms",
    "max_ms",
];

pub fn export_results(
    records: &[BenchRecord],
    format: ExportFormat,
    out: impl Write,
) -> Result<(), BenchError> {
    if records.is_empty() {
        return Err(BenchError::NothingToExport);
    }
    match format {
        ExportFormat::Csv => {
            let mut w = csv::Writer::from_writer(out);
            w.write_record(CSV_HEADER)?;
            for r in records {
                let s = r.stats;
                let ms = |v: f64| format!("{v:.6}");
                w.write_record([
                    r.target.name().to_string(),
                    r.msg_len.to_string(),
                    r.out_len.to_string(),
                    r.iterations.to_string(),
                    r.warmup.to_string(),
                    r.seed.to_string(),
                    r.input_digest.clone(),
                    ms(s.mean_ms),
                    ms(s.median_ms),
                    ms(s.stddev_ms),
                    ms(s.q1_ms),
                    ms(s.q3_ms),
                    ms(s.min_ms),
                    ms(s.max_ms),
                ])?;
            }
            w.flush()?;
        }
        ExportFormat::Json => {
            let rounded: Vec<BenchRecord> = records
                .iter()
                .map(|r| BenchRecord {
                    stats: r.stats.rounded(),
                    ..r.clone()
                })
                .collect();
            let mut out = out;
            serde_json::to_writer_pretty(&mut out, &rounded)?;
            writeln!(out)?;
        }
    }
    Ok(())
}

/// Table-shaped summary: one column per target, Mean/Median/Standard
/// Deviation rows, milliseconds.
pub fn write_table<W: Write + ?Sized>(records: &[BenchRecord], out: &mut W) -> std::io::Result<()> {
    write!(out, "{:<20}", "(ms)")?;
    for r in records {
        write!(out, "{:>12}", r.target.name())?;
    }
    writeln!(out)?;
    type Row = (&'static str, fn(&BenchStats) -> f64);
    let rows: [Row; 3] = [
        ("Mean", |s| s.mean_ms),
        ("Median", |s| s.median_ms),
        ("Standard Deviation", |s| s.stddev_ms),
    ];
    for (label, get) in rows {
        write!(out, "{label:<20}")?;
        for r in records {
            write!(out, "{:>12.6}", get(&r.stats))?;
        }
        writeln!(out)?;
    }
    Ok(())
}

/// Reference means (ms) from the original desktop measurements.
pub const REFERENCE_MEAN_MS: [(BenchKind, f64); 7] = [
    (BenchKind::Hmac, 0.007),
    (BenchKind::Cmac, 0.007),
    (BenchKind::Kmac, 0.015),
    (BenchKind::HmacKdf, 0.021),
    (BenchKind::CmacKdf, 0.014),
    (BenchKind::KmacKdf, 0.038),
    (BenchKind::IeeeKdf, 0.069),
];

pub const KMAC_CMAC_RATIO_RANGE: (f64, f64) = (1.2, 5.0);

#[derive(Debug, Clone, PartialEq)]
pub struct ShapeCheck {
    pub name: &'static str,
    pub ok: bool,
    pub detail: String,
}

impl fmt::Display for ShapeCheck {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let tag = if self.ok { "OK  " } else { "WARN" };
        write!(f, "{tag} {}: {}", self.name, self.detail)
    }
}

/// Soft ordering checks against the reference tables. Checks whose targets
/// are missing from `records` are skipped.
pub fn shape_checks(records: &[BenchRecord]) -> Vec<ShapeCheck> {
    let mean = |k: BenchKind| {
        records
            .iter()
            .find(|r| r.target == k)
            .map(|r| r.stats.mean_ms)
    };
    let mut checks = Vec::new();

    if let (Some(c), Some(h), Some(k)) = (
        mean(BenchKind::Cmac),
        mean(BenchKind::Hmac),
        mean(BenchKind::Kmac),
    ) {
        checks.push(ShapeCheck {
            name: "mean(CMAC) <= mean(HMAC) <= mean(KMAC)",
            ok: c <= h && h <= k,
            detail: format!("CMAC {c:.6} / HMAC {h:.6} / KMAC {k:.6} ms"),
        });
        let ratio = k / c;
        let (lo, hi) = KMAC_CMAC_RATIO_RANGE;
        checks.push(ShapeCheck {
            name: "mean(KMAC) / mean(CMAC) in [1.2, 5]",
            ok: (lo..=hi).contains(&ratio),
            detail: format!("ratio {ratio:.2} (reference ~2.1)"),
        });
    }
    if let Some(c) = mean(BenchKind::Cmac) {
        checks.push(ShapeCheck {
            name: "mean(CMAC) within 10x of 0.007 ms",
            ok: (0.0007..=0.07).contains(&c),
            detail: format!("{c:.6} ms"),
        });
    }

    let kdfs: Vec<(BenchKind, f64)> = BenchKind::KDFS
        .iter()
        .filter_map(|&k| mean(k).map(|m| (k, m)))
        .collect();
    if kdfs.len() == BenchKind::KDFS.len() {
        let fastest = kdfs.iter().min_by(|a, b| a.1.total_cmp(&b.1)).unwrap();
        let slowest = kdfs.iter().max_by(|a, b| a.1.total_cmp(&b.1)).unwrap();
        let listing = kdfs
            .iter()
            .map(|(k, m)| format!("{k} {m:.6}"))
            .collect::<Vec<_>>()
            .join(" / ");
        checks.push(ShapeCheck {
            name: "mean(CMAC_KDF) is the smallest KDF mean",
            ok: fastest.0 == BenchKind::CmacKdf,
            detail: listing.clone(),
        });
        checks.push(ShapeCheck {
            name: "mean(IEEE_KDF) is the largest KDF mean",
            ok: slowest.0 == BenchKind::IeeeKdf,
            detail: listing,
        });
    }
    checks
}
