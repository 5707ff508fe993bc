//! Known-answer vector files and the runner behind `mackdf selftest`.
//!
//! A vector file is a JSON array of [`VectorCase`] records. Byte fields are
//! hex strings (any case); `params` carries the construction-specific knobs:
//!
//! | construction   | params used                         |
//! |----------------|-------------------------------------|
//! | `aes`          | none (`msg` is the 16-byte block)   |
//! | `sha256`       | none (`key` must be empty)          |
//! | `shake`        | `variant` (128/256), `bits`         |
//! | `cshake`       | `variant`, `bits`, `n`, `s`         |
//! | `hmac`         | none (HMAC-SHA256)                  |
//! | `cmac`         | none (AES-128-CMAC)                 |
//! | `kmac`         | `variant`, `bits`, `s`              |
//! | `kdf-ctr-hmac` | `len` (bytes)                       |
//! | `kdf-ctr-cmac` | `len` (bytes)                       |
//! | `kdf-kmac`     | `bits`                              |
//! | `kdf-ieee`     | `i`, `j` (4-byte hex), `purpose`    |
//!
//! `n` and `s` are plain UTF-8 strings.

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use mackdf_core::cmac::cmac;
use mackdf_core::hmac::hmac_sha256;
use mackdf_core::kdf::{counter_kdf, ieee_kdf, kmac_kdf_with_variant, IeeeKdfInput, PrfChoice};
use mackdf_core::kmac::{cshake, kmac, KmacParams, KmacVariant};
use mackdf_core::primitives::{aes_encrypt_block, sha256, Block128};
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// The vector file shipped with the crate.
pub const BUNDLED_VECTORS: &str = include_str!("../vectors/standard.json");

#[derive(Debug, Error)]
pub enum VectorError {
    #[error("cannot read vector file {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("cannot parse vector file: {0}")]
    Parse(#[from] serde_json::Error),
    #[error("unknown construction `{0}`")]
    UnknownConstruction(String),
    #[error("field `{field}`: {reason}")]
    Field { field: &'static str, reason: String },
    #[error(transparent)]
    Crypto(#[from] mackdf_core::Error),
}

fn field_err(field: &'static str, reason: impl fmt::Display) -> VectorError {
    VectorError::Field {
        field,
        reason: reason.to_string(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Construction {
    Aes,
    Sha256,
    Shake,
    Cshake,
    Hmac,
    Cmac,
    Kmac,
    KdfCtrHmac,
    KdfCtrCmac,
    KdfKmac,
    KdfIeee,
}

impl Construction {
    pub const ALL: [Construction; 11] = [
        Construction::Aes,
        Construction::Sha256,
        Construction::Shake,
        Construction::Cshake,
        Construction::Hmac,
        Construction::Cmac,
        Construction::Kmac,
        Construction::KdfCtrHmac,
        Construction::KdfCtrCmac,
        Construction::KdfKmac,
        Construction::KdfIeee,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Construction::Aes => "aes",
            Construction::Sha256 => "sha256",
            Construction::Shake => "shake",
            Construction::Cshake => "cshake",
            Construction::Hmac => "hmac",
            Construction::Cmac => "cmac",
            Construction::Kmac => "kmac",
            Construction::KdfCtrHmac => "kdf-ctr-hmac",
            Construction::KdfCtrCmac => "kdf-ctr-cmac",
            Construction::KdfKmac => "kdf-kmac",
            Construction::KdfIeee => "kdf-ieee",
        }
    }
}

impl FromStr for Construction {
    type Err = VectorError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Construction::ALL
            .into_iter()
            .find(|c| c.name() == s)
            .ok_or_else(|| VectorError::UnknownConstruction(s.to_string()))
    }
}

impl fmt::Display for Construction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VectorParams {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub variant: Option<u16>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bits: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub len: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub s: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub i: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub j: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub purpose: Option<u8>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VectorCase {
    pub construction: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub source: Option<String>,
    #[serde(default)]
    pub key: String,
    #[serde(default)]
    pub msg: String,
    #[serde(default)]
    pub params: VectorParams,
    pub expect: String,
}

pub fn parse_vectors(json: &str) -> Result<Vec<VectorCase>, VectorError> {
    Ok(serde_json::from_str(json)?)
}

pub fn load_vectors(path: &Path) -> Result<Vec<VectorCase>, VectorError> {
    let text = std::fs::read_to_string(path).map_err(|source| VectorError::Io {
        path: path.display().to_string(),
        source,
    })?;
    parse_vectors(&text)
}

pub fn bundled_vectors() -> Vec<VectorCase> {
    parse_vectors(BUNDLED_VECTORS).expect("bundled vector file is valid")
}

fn decode(field: &'static str, s: &str) -> Result<Vec<u8>, VectorError> {
    hex::decode(s).map_err(|e| field_err(field, e))
}

fn kmac_variant(v: Option<u16>) -> Result<KmacVariant, VectorError> {
    match v.unwrap_or(128) {
        128 => Ok(KmacVariant::Kmac128),
        256 => Ok(KmacVariant::Kmac256),
        other => Err(field_err("variant", format!("{other} is not 128 or 256"))),
    }
}

fn required<T: Copy>(field: &'static str, v: Option<T>) -> Result<T, VectorError> {
    v.ok_or_else(|| field_err(field, "missing"))
}

impl VectorCase {
    pub fn construction(&self) -> Result<Construction, VectorError> {
        self.construction.parse()
    }

    /// Runs the construction on this case's inputs.
    pub fn compute(&self) -> Result<Vec<u8>, VectorError> {
        let key = decode("key", &self.key)?;
        let msg = decode("msg", &self.msg)?;
        let p = &self.params;
        let text = |s: &Option<String>| s.clone().unwrap_or_default().into_bytes();
        Ok(match self.construction()? {
            Construction::Aes => {
                let block = Block128::from_slice(&msg).map_err(|e| field_err("msg", e))?;
                aes_encrypt_block(&key, &block)?.0.to_vec()
            }
            Construction::Sha256 => {
                if !key.is_empty() {
                    return Err(field_err("key", "sha256 takes no key"));
                }
                sha256(&msg).to_vec()
            }
            Construction::Shake => {
                let variant = kmac_variant(p.variant)?;
                cshake(&msg, required("bits", p.bits)?, b"", b"", variant.rate())?
            }
            Construction::Cshake => {
                let variant = kmac_variant(p.variant)?;
                cshake(
                    &msg,
                    required("bits", p.bits)?,
                    &text(&p.n),
                    &text(&p.s),
                    variant.rate(),
                )?
            }
            Construction::Hmac => hmac_sha256(&key, &msg).to_vec(),
            Construction::Cmac => cmac(&key, &msg)?.to_vec(),
            Construction::Kmac => {
                let params = KmacParams::new(
                    kmac_variant(p.variant)?,
                    required("bits", p.bits)?,
                    &text(&p.s),
                );
                kmac(&key, &msg, &params)?
            }
            Construction::KdfCtrHmac => {
                counter_kdf(PrfChoice::HmacSha256, &key, &msg, required("len", p.len)?)?.into_vec()
            }
            Construction::KdfCtrCmac => {
                counter_kdf(PrfChoice::CmacAes128, &key, &msg, required("len", p.len)?)?.into_vec()
            }
            Construction::KdfKmac => {
                kmac_kdf_with_variant(kmac_variant(p.variant)?, &key, &msg, required("bits", p.bits)?)?
                    .into_vec()
            }
            Construction::KdfIeee => {
                let i = decode("i", p.i.as_deref().ok_or_else(|| field_err("i", "missing"))?)?;
                let j = decode("j", p.j.as_deref().ok_or_else(|| field_err("j", "missing"))?)?;
                let input = IeeeKdfInput::from_slices(&key, &i, &j, required("purpose", p.purpose)?)?;
                ieee_kdf(&input).into_vec()
            }
        })
    }

    pub fn run(&self) -> CaseOutcome {
        let expect = match decode("expect", &self.expect) {
            Ok(e) => e,
            Err(e) => return CaseOutcome::Error(e.to_string()),
        };
        match self.compute() {
            Ok(got) if got == expect => CaseOutcome::Pass,
            Ok(got) => CaseOutcome::Fail {
                got: hex::encode(got),
            },
            Err(e) => CaseOutcome::Error(e.to_string()),
        }
    }

    pub fn label(&self) -> String {
        match &self.source {
            Some(src) => format!("{} ({src})", self.construction),
            None => self.construction.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CaseOutcome {
    Pass,
    Fail { got: String },
    /// The case could not be evaluated (bad hex, bad parameters); counted as a failure.
    Error(String),
}

impl CaseOutcome {
    pub fn passed(&self) -> bool {
        matches!(self, CaseOutcome::Pass)
    }
}

#[derive(Debug, Clone)]
pub struct SuiteReport {
    pub results: Vec<(VectorCase, CaseOutcome)>,
}

impl SuiteReport {
    pub fn passed(&self) -> usize {
        self.results.iter().filter(|(_, o)| o.passed()).count()
    }

    pub fn total(&self) -> usize {
        self.results.len()
    }

    pub fn all_passed(&self) -> bool {
        self.passed() == self.total()
    }

    /// One `PASS`/`FAIL` line per case, then `passed/total`.
    pub fn write_to<W: std::io::Write + ?Sized>(&self, out: &mut W) -> std::io::Result<()> {
        for (case, outcome) in &self.results {
            match outcome {
                CaseOutcome::Pass => writeln!(out, "PASS {}", case.label())?,
                CaseOutcome::Fail { got } => writeln!(
                    out,
                    "FAIL {}: expected {}, got {got}",
                    case.label(),
                    case.expect.to_ascii_lowercase()
                )?,
                CaseOutcome::Error(e) => writeln!(out, "FAIL {}: {e}", case.label())?,
            }
        }
        writeln!(out, "{}/{}", self.passed(), self.total())
    }
}

/// Runs every case whose construction name equals `filter` (all when `None`).
pub fn run_suite(cases: &[VectorCase], filter: Option<&str>) -> SuiteReport {
    let results = cases
        .iter()
        .filter(|c| filter.is_none_or(|f| c.construction == f))
        .map(|c| (c.clone(), c.run()))
        .collect();
    SuiteReport { results }
}
