use std::ffi::OsString;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::PathBuf;

use anyhow::{anyhow, bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use mackdf_core::cmac::cmac;
use mackdf_core::hmac::hmac_sha256;
use mackdf_core::kdf::{counter_kdf, ieee_kdf, kmac_kdf_with_variant, IeeeKdfInput, PrfChoice};
use mackdf_core::kmac::{kmac, KmacParams, KmacVariant};

use crate::bench::{self, ExportFormat};
use crate::vectors;

pub const EXIT_OK: i32 = 0;
pub const EXIT_SELFTEST_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

/// Overrides the default `bench --iterations`.
pub const ITERATIONS_ENV: &str = "MACKDF_BENCH_ITERATIONS";

#[derive(Debug, Parser)]
#[command(name = "mackdf", version, about = "HMAC / CMAC / KMAC and the KDFs built on them")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Compute a message authentication code.
    Mac(MacArgs),
    /// Derive key material.
    Kdf(KdfArgs),
    /// Run a known-answer vector file.
    Selftest(SelftestArgs),
    /// Time every construction and export the statistics.
    Bench(BenchArgs),
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum MacAlgorithm {
    Hmac,
    Cmac,
    Kmac,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum Variant {
    #[value(name = "128")]
    V128,
    #[value(name = "256")]
    V256,
}

impl From<Variant> for KmacVariant {
    fn from(v: Variant) -> Self {
        match v {
            Variant::V128 => KmacVariant::Kmac128,
            Variant::V256 => KmacVariant::Kmac256,
        }
    }
}

#[derive(Debug, Args)]
pub struct MacArgs {
    pub algorithm: MacAlgorithm,
    /// Key, hex.
    #[arg(long)]
    pub key: String,
    /// Message, hex.
    #[arg(long, default_value = "")]
    pub msg: String,
    /// KMAC output length in bits.
    #[arg(long, default_value_t = 256)]
    pub bits: usize,
    /// KMAC customization string, hex.
    #[arg(long, default_value = "")]
    pub custom: String,
    #[arg(long, value_enum, default_value = "128")]
    pub variant: Variant,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum KdfFamily {
    /// Counter mode over HMAC-SHA256 or AES-CMAC.
    Ctr,
    /// KMAC with customization "KDF".
    Kmac,
    /// IEEE 1609.2.1 expansion function.
    Ieee,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum PrfArg {
    Hmac,
    Cmac,
}

#[derive(Debug, Args)]
pub struct KdfArgs {
    pub family: KdfFamily,
    /// Key, hex.
    #[arg(long)]
    pub key: String,
    /// Context message, hex (ctr and kmac).
    #[arg(long, default_value = "")]
    pub msg: String,
    /// PRF for the counter-mode family.
    #[arg(long, value_enum)]
    pub prf: Option<PrfArg>,
    /// Output length in bytes (ctr).
    #[arg(long)]
    pub len: Option<usize>,
    /// Output length in bits (kmac).
    #[arg(long)]
    pub bits: Option<usize>,
    #[arg(long, value_enum, default_value = "128")]
    pub variant: Variant,
    /// Period index, 4 bytes hex (ieee).
    #[arg(long)]
    pub i: Option<String>,
    /// Key index, 4 bytes hex (ieee).
    #[arg(long)]
    pub j: Option<String>,
    /// 1 = signing, 2 = encryption (ieee).
    #[arg(long)]
    pub purpose: Option<u8>,
}

#[derive(Debug, Args)]
pub struct SelftestArgs {
    /// JSON vector file; the bundled file when omitted.
    pub vector_file: Option<PathBuf>,
    /// Only run cases of this construction.
    #[arg(long)]
    pub filter: Option<String>,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    /// `all`, `macs`, `kdfs`, or a comma-separated list such as `CMAC,IEEE_KDF`.
    #[arg(long, default_value = "all")]
    pub targets: String,
    #[arg(long)]
    pub iterations: Option<usize>,
    #[arg(long, default_value_t = bench::DEFAULT_WARMUP)]
    pub warmup: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Result file; the export goes to standard output after the table when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, default_value = "csv")]
    pub format: ExportFormat,
}

fn parse_hex(field: &str, value: &str) -> anyhow::Result<Vec<u8>> {
    hex::decode(value).map_err(|e| anyhow!("--{field}: invalid hex: {e}"))
}

fn run_mac(args: &MacArgs) -> anyhow::Result<Vec<u8>> {
    let key = parse_hex("key", &args.key)?;
    let msg = parse_hex("msg", &args.msg)?;
    Ok(match args.algorithm {
        MacAlgorithm::Hmac => hmac_sha256(&key, &msg).to_vec(),
        MacAlgorithm::Cmac => cmac(&key, &msg)?.to_vec(),
        MacAlgorithm::Kmac => {
            let custom = parse_hex("custom", &args.custom)?;
            kmac(&key, &msg, &KmacParams::new(args.variant.into(), args.bits, &custom))?
        }
    })
}

fn run_kdf(args: &KdfArgs) -> anyhow::Result<Vec<u8>> {
    let key = parse_hex("key", &args.key)?;
    let msg = parse_hex("msg", &args.msg)?;
    Ok(match args.family {
        KdfFamily::Ctr => {
            let prf = match args.prf.context("ctr requires --prf hmac|cmac")? {
                PrfArg::Hmac => PrfChoice::HmacSha256,
                PrfArg::Cmac => PrfChoice::CmacAes128,
            };
            let len = args.len.context("ctr requires --len <bytes>")?;
            counter_kdf(prf, &key, &msg, len)?.into_vec()
        }
        KdfFamily::Kmac => {
            let bits = args.bits.context("kmac requires --bits <n>")?;
            kmac_kdf_with_variant(args.variant.into(), &key, &msg, bits)?.into_vec()
        }
        KdfFamily::Ieee => {
            let i = parse_hex("i", args.i.as_deref().context("ieee requires --i <8 hex digits>")?)?;
            let j = parse_hex("j", args.j.as_deref().context("ieee requires --j <8 hex digits>")?)?;
            let purpose = args.purpose.context("ieee requires --purpose 1|2")?;
            ieee_kdf(&IeeeKdfInput::from_slices(&key, &i, &j, purpose)?).into_vec()
        }
    })
}

fn run_selftest(args: &SelftestArgs, out: &mut dyn Write) -> anyhow::Result<i32> {
    let cases = match &args.vector_file {
        Some(path) => vectors::load_vectors(path)?,
        None => vectors::bundled_vectors(),
    };
    let report = vectors::run_suite(&cases, args.filter.as_deref());
    report.write_to(out)?;
    Ok(if report.all_passed() {
        EXIT_OK
    } else {
        EXIT_SELFTEST_FAILED
    })
}

fn iterations_from_env() -> anyhow::Result<Option<usize>> {
    match std::env::var(ITERATIONS_ENV) {
        Ok(v) => Ok(Some(
            v.parse()
                .with_context(|| format!("{ITERATIONS_ENV}={v} is not a count"))?,
        )),
        Err(_) => Ok(None),
    }
}

fn run_bench_cmd(args: &BenchArgs, out: &mut dyn Write) -> anyhow::Result<()> {
    let kinds = bench::parse_target_set(&args.targets)?;
    let iterations = match args.iterations {
        Some(n) => n,
        None => iterations_from_env()?.unwrap_or(bench::DEFAULT_ITERATIONS),
    };
    if iterations == 0 {
        bail!("--iterations must be at least 1");
    }
    // open first: an unwritable path should fail before the timing runs
    let file = match &args.out {
        Some(path) => Some(
            File::create(path).with_context(|| format!("cannot write {}", path.display()))?,
        ),
        None => None,
    };
    let records = bench::run_suite(&kinds, iterations, args.warmup, args.seed)?;
    bench::write_table(&records, out)?;
    for check in bench::shape_checks(&records) {
        writeln!(out, "{check}")?;
    }
    match file {
        Some(f) => {
            let mut w = BufWriter::new(f);
            bench::export_results(&records, args.format, &mut w)?;
            w.flush()?;
        }
        None => {
            writeln!(out)?;
            bench::export_results(&records, args.format, &mut *out)?;
        }
    }
    Ok(())
}

fn dispatch(cli: &Cli, out: &mut dyn Write) -> anyhow::Result<i32> {
    match &cli.command {
        Command::Mac(args) => writeln!(out, "{}", hex::encode(run_mac(args)?))?,
        Command::Kdf(args) => writeln!(out, "{}", hex::encode(run_kdf(args)?))?,
        Command::Selftest(args) => return run_selftest(args, out),
        Command::Bench(args) => run_bench_cmd(args, out)?,
    }
    Ok(EXIT_OK)
}

/// Parses `argv` and runs the command, returning the process exit code.
pub fn run<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let rendered = e.render().to_string();
            let _ = if code == EXIT_OK {
                write!(out, "{rendered}")
            } else {
                write!(err, "{rendered}")
            };
            return code;
        }
    };
    match dispatch(&cli, out) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e:#}");
            EXIT_USAGE
        }
    }
}
