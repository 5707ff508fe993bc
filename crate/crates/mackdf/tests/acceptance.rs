//! Acceptance gate. Each criterion prints one PASS/FAIL line; run with
//! `cargo test -p mackdf --test acceptance -- --nocapture` to see them.

use std::collections::HashSet;
use std::time::{Duration, Instant};

use mackdf::bench::{self, BenchKind};
use mackdf::vectors::{bundled_vectors, run_suite, CaseOutcome, VectorCase};
use mackdf_core::cmac::{cmac, dbl, split_and_pad, derive_subkeys};
use mackdf_core::hmac::hmac_sha256;
use mackdf_core::kdf::{counter_kdf, ieee_kdf, kmac_kdf, CounterProfile, IeeeKdfInput, PrfChoice};
use mackdf_core::kmac::{encode_string, kmac, KmacParams, KmacVariant};
use mackdf_core::primitives::{
    aes_encrypt_block, sponge_absorb_squeeze, Aes128Cipher, Block128, RATE_128, RATE_256,
    SHAKE_DOMAIN,
};
use rand::seq::SliceRandom;
use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Check = Result<(), String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Check {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

struct Gate {
    failures: Vec<String>,
}

impl Gate {
    fn criterion(&mut self, id: u32, name: &str, budget: Duration, f: impl FnOnce() -> Check) {
        let start = Instant::now();
        let result = f();
        let elapsed = start.elapsed();
        let result = result.and_then(|()| {
            ensure(elapsed < budget, || {
                format!("took {elapsed:.2?}, budget {budget:?}")
            })
        });
        match result {
            Ok(()) => println!("PASS [{id}] {name} ({elapsed:.2?})"),
            Err(e) => {
                println!("FAIL [{id}] {name} ({elapsed:.2?}): {e}");
                self.failures.push(format!("[{id}] {name}: {e}"));
            }
        }
    }
}

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn bytes(r: &mut ChaCha8Rng, len: usize) -> Vec<u8> {
    let mut v = vec![0u8; len];
    r.fill_bytes(&mut v);
    v
}

fn known_answers() -> Check {
    let cases = bundled_vectors();
    let sources: Vec<&str> = cases.iter().filter_map(|c| c.source.as_deref()).collect();
    let required = [
        "RFC 4231 case 1",
        "RFC 4231 case 2",
        "RFC 4231 case 3",
        "RFC 4231 case 4",
        "RFC 4493 example len 0",
        "RFC 4493 example len 16",
        "RFC 4493 example len 40",
        "RFC 4493 example len 64",
        "FIPS-197 C.1",
        "FIPS 180-4",
        "FIPS 202 SHAKE128 empty",
        "SP 800-185 cSHAKE128 sample 1",
        "SP 800-185 cSHAKE128 sample 2",
        "SP 800-185 KMAC sample 1",
        "SP 800-185 KMAC sample 2",
        "SP 800-185 KMAC sample 3",
    ];
    for r in required {
        ensure(sources.contains(&r), || format!("bundle lacks {r}"))?;
    }
    let report = run_suite(&cases, None);
    let failed: Vec<String> = report
        .results
        .iter()
        .filter(|(_, o)| !o.passed())
        .map(|(c, o)| format!("{} => {o:?}", c.label()))
        .collect();
    ensure(failed.is_empty(), || failed.join("; "))?;
    ensure(report.total() == cases.len(), || "cases skipped".into())
}

fn oracle_equivalence() -> Check {
    let mut r = rng(0xacce55);
    let profile = CounterProfile::default();
    for prf in [PrfChoice::HmacSha256, PrfChoice::CmacAes128] {
        for len in 1..=96usize {
            for _ in 0..50 {
                let key = bytes(&mut r, 16);
                let msg_len = r.gen_range(0..64);
                let msg = bytes(&mut r, msg_len);
                let n = len.div_ceil(prf.block_len());
                let mut manual = Vec::new();
                for i in 1..=n as u32 {
                    let input = profile.fixed_input(i, &msg, len);
                    match prf {
                        PrfChoice::HmacSha256 => manual.extend(hmac_sha256(&key, &input)),
                        PrfChoice::CmacAes128 => manual.extend(cmac(&key, &input).unwrap()),
                    }
                }
                manual.truncate(len);
                let got = counter_kdf(prf, &key, &msg, len).map_err(|e| e.to_string())?;
                ensure(got.as_bytes() == manual, || format!("{prf:?} L={len}"))?;
            }
        }
    }
    let key = bytes(&mut r, 16);
    for purpose in [1u8, 2] {
        for i in 0..16u32 {
            for j in 0..16u32 {
                let input =
                    IeeeKdfInput::from_slices(&key, &i.to_be_bytes(), &j.to_be_bytes(), purpose)
                        .map_err(|e| e.to_string())?;
                let pad = if purpose == 1 { [0u8; 4] } else { [0x11; 4] };
                let mut unrolled = Vec::new();
                for n in 1..=3u8 {
                    let mut x = [0u8; 16];
                    x[..4].copy_from_slice(&pad);
                    x[4..8].copy_from_slice(&i.to_be_bytes());
                    x[8..12].copy_from_slice(&j.to_be_bytes());
                    x[15] = n;
                    let c = aes_encrypt_block(&key, &Block128(x)).unwrap();
                    unrolled.extend(c.0.iter().zip(x).map(|(a, b)| a ^ b));
                }
                ensure(ieee_kdf(&input).as_bytes() == unrolled, || {
                    format!("ieee U={purpose} i={i} j={j}")
                })?;
            }
        }
    }
    Ok(())
}

fn invariant_suites() -> Check {
    let mut r = rng(0x1a7);

    // primitives
    let cipher = Aes128Cipher::new(&bytes(&mut r, 16)).unwrap();
    let mut cts = HashSet::new();
    let mut pts = HashSet::new();
    while pts.len() < 1000 {
        let pt: [u8; 16] = r.gen();
        if pts.insert(pt) {
            ensure(cts.insert(cipher.encrypt(&Block128(pt))), || "AES collision".into())?;
        }
    }
    for _ in 0..50 {
        let input_len = r.gen_range(0..400);
        let input = bytes(&mut r, input_len);
        let rate = *[RATE_128, RATE_256].choose(&mut r).unwrap();
        let (a, b) = (r.gen_range(1..300), r.gen_range(1..300));
        let (s, l) = (a.min(b), a.max(b));
        let short = sponge_absorb_squeeze(&input, rate, SHAKE_DOMAIN, s).unwrap();
        let long = sponge_absorb_squeeze(&input, rate, SHAKE_DOMAIN, l).unwrap();
        ensure(short[..] == long[..s], || "sponge prefix".into())?;
    }

    // hmac
    let key_buf = bytes(&mut r, 200);
    let msg_buf = bytes(&mut r, 300);
    for klen in 0..=200 {
        for mlen in (0..=300).step_by(25) {
            ensure(hmac_sha256(&key_buf[..klen], &msg_buf[..mlen]).len() == 32, || "hmac len".into())?;
        }
        if klen < 64 {
            let mut padded = key_buf[..klen].to_vec();
            padded.resize(64, 0);
            ensure(
                hmac_sha256(&key_buf[..klen], &msg_buf) == hmac_sha256(&padded, &msg_buf),
                || format!("hmac padding equivalence at key len {klen}"),
            )?;
        }
    }
    let base = hmac_sha256(&key_buf[..32], &msg_buf[..64]);
    for _ in 0..1000 {
        let bit = r.gen_range(0..512);
        let mut m = msg_buf[..64].to_vec();
        m[bit / 8] ^= 1 << (bit % 8);
        ensure(hmac_sha256(&key_buf[..32], &m) != base, || "hmac bit flip".into())?;
    }
    ensure(hmac_sha256(b"k", b"m") == hmac_sha256(b"k", b"m"), || "hmac determinism".into())?;

    // cmac
    ensure(dbl(&dbl(&Block128::ZERO)) == Block128::ZERO, || "dbl fixed point".into())?;
    let key = bytes(&mut r, 16);
    let msg = bytes(&mut r, 1000);
    for len in 0..=1000 {
        ensure(cmac(&key, &msg[..len]).unwrap().len() == 16, || "cmac len".into())?;
    }
    let sk = derive_subkeys(&key).unwrap();
    for len in 0..=64 {
        let mut c = Block128::ZERO;
        for b in split_and_pad(&msg[..len], &sk).blocks {
            c = aes_encrypt_block(&key, &(c ^ b)).unwrap();
        }
        ensure(c.0 == cmac(&key, &msg[..len]).unwrap(), || format!("cmac fold L={len}"))?;
    }
    for _ in 0..1000 {
        let len = loop {
            let l = r.gen_range(1..100usize);
            if l % 16 != 0 {
                break l;
            }
        };
        let a = bytes(&mut r, len);
        let mut b = a.clone();
        b[len - 1] ^= r.gen_range(1..=255u8);
        ensure(cmac(&key, &a).unwrap() != cmac(&key, &b).unwrap(), || "cmac last byte".into())?;
    }

    // kmac
    for bits in (8..=4096).step_by(8) {
        let p = KmacParams::new(KmacVariant::Kmac128, bits, b"");
        ensure(kmac(&key, b"m", &p).unwrap().len() == bits / 8, || "kmac len".into())?;
    }
    ensure(
        kmac(&key, b"m", &KmacParams::new(KmacVariant::Kmac128, 256, b"")).unwrap()
            != kmac(&key, b"m", &KmacParams::new(KmacVariant::Kmac128, 256, b"KDF")).unwrap(),
        || "kmac domain separation".into(),
    )?;
    for _ in 0..100 {
        let x_len = r.gen_range(0..1000);
        let x = bytes(&mut r, x_len);
        let e = encode_string(&x);
        let n = e[0] as usize;
        let bits = e[1..=n].iter().fold(0u64, |acc, &b| (acc << 8) | b as u64);
        ensure(bits == x.len() as u64 * 8 && e[1 + n..] == x[..], || "encode_string".into())?;
    }

    // kdf
    for prf in [PrfChoice::HmacSha256, PrfChoice::CmacAes128] {
        for len in 1..=200 {
            ensure(counter_kdf(prf, &key, b"ctx", len).unwrap().len() == len, || "ctr len".into())?;
        }
    }
    for _ in 0..100 {
        let k = bytes(&mut r, 32);
        let m = bytes(&mut r, 32);
        let direct = kmac(&k, &m, &KmacParams::new(KmacVariant::Kmac128, 384, b"KDF")).unwrap();
        ensure(kmac_kdf(&k, &m, 384).unwrap().as_bytes() == direct, || "kmac_kdf".into())?;
    }
    let mut seen = HashSet::new();
    for i in 0..16u32 {
        for j in 0..16u32 {
            let input = IeeeKdfInput::from_slices(&key, &i.to_be_bytes(), &j.to_be_bytes(), 1).unwrap();
            ensure(ieee_kdf(&input) == ieee_kdf(&input), || "ieee determinism".into())?;
            ensure(seen.insert(ieee_kdf(&input).into_vec()), || "ieee collision".into())?;
        }
    }
    type Kdf = fn(&[u8], &[u8]) -> Vec<u8>;
    let kdfs: [(&str, Kdf); 4] = [
        ("HMAC_KDF", |k, m| counter_kdf(PrfChoice::HmacSha256, k, m, 48).unwrap().into_vec()),
        ("CMAC_KDF", |k, m| counter_kdf(PrfChoice::CmacAes128, k, m, 48).unwrap().into_vec()),
        ("KMAC_KDF", |k, m| kmac_kdf(k, m, 384).unwrap().into_vec()),
        ("IEEE_KDF", |k, m| {
            ieee_kdf(&IeeeKdfInput::from_slices(k, &m[..4], &m[4..8], 1).unwrap()).into_vec()
        }),
    ];
    for (name, kdf) in kdfs {
        let mut counts = [0u32; 256];
        let mut total = 0;
        while total < 10_000 {
            let out = kdf(&bytes(&mut r, 16), &bytes(&mut r, 32));
            for b in out {
                counts[b as usize] += 1;
                total += 1;
            }
        }
        ensure(counts.iter().all(|&c| c > 0), || format!("{name} byte coverage"))?;
    }

    // bench statistics
    let samples: Vec<f64> = (0..501).map(|_| r.gen_range(0.001..0.1)).collect();
    let stats = bench::summarize_ms(&samples).unwrap();
    ensure(
        stats.min_ms <= stats.q1_ms
            && stats.q1_ms <= stats.median_ms
            && stats.median_ms <= stats.q3_ms
            && stats.q3_ms <= stats.max_ms
            && stats.stddev_ms >= 0.0
            && (stats.min_ms..=stats.max_ms).contains(&stats.mean_ms),
        || "stats ordering".into(),
    )?;
    for _ in 0..20 {
        let mut shuffled = samples.clone();
        shuffled.shuffle(&mut r);
        let s = bench::summarize_ms(&shuffled).unwrap();
        ensure(
            s.median_ms == stats.median_ms
                && s.q1_ms == stats.q1_ms
                && s.q3_ms == stats.q3_ms
                && (s.mean_ms - stats.mean_ms).abs() < 1e-12
                && (s.stddev_ms - stats.stddev_ms).abs() < 1e-12,
            || "stats permutation invariance".into(),
        )?;
    }
    let mut with_dup = samples.clone();
    with_dup.push(stats.median_ms);
    ensure(
        bench::summarize_ms(&with_dup).unwrap().median_ms == stats.median_ms,
        || "median duplicate".into(),
    )
}

fn benchmark_shape() -> Check {
    let records = bench::run_suite(&BenchKind::ALL, 1000, 100, 2024).map_err(|e| e.to_string())?;
    ensure(records.len() == 7, || format!("{} rows", records.len()))?;
    let kinds: Vec<BenchKind> = records.iter().map(|r| r.target).collect();
    ensure(kinds == BenchKind::ALL, || "row order".into())?;
    for rec in &records {
        ensure(rec.iterations == 1000, || "iterations".into())?;
        if rec.target.is_kdf() {
            ensure(rec.out_len == 48, || "KDF output length".into())?;
        }
        if rec.target != BenchKind::IeeeKdf {
            ensure(rec.msg_len == 32, || "message length".into())?;
        }
        let s = rec.stats;
        ensure(s.mean_ms > 0.0 && s.median_ms > 0.0 && s.stddev_ms >= 0.0, || {
            format!("{} stats", rec.target)
        })?;
    }
    let mut table = Vec::new();
    bench::write_table(&records, &mut table).unwrap();
    print!("{}", String::from_utf8(table).unwrap());
    // soft: timing order depends on the machine, so violations only warn
    for check in bench::shape_checks(&records) {
        println!("    {check}");
    }
    Ok(())
}

fn mutate(case: &VectorCase, r: &mut ChaCha8Rng) -> (VectorCase, &'static str) {
    let mut fields: Vec<&'static str> = vec!["expect"];
    if !case.key.is_empty() {
        fields.push("key");
    }
    if !case.msg.is_empty() {
        fields.push("msg");
    }
    let field = *fields.choose(r).unwrap();
    let mut m = case.clone();
    let target = match field {
        "key" => &mut m.key,
        "msg" => &mut m.msg,
        _ => &mut m.expect,
    };
    let mut raw = hex::decode(&*target).unwrap();
    let idx = r.gen_range(0..raw.len());
    raw[idx] ^= r.gen_range(1..=255u8);
    *target = hex::encode(raw);
    (m, field)
}

fn negative_controls() -> Check {
    let cases = bundled_vectors();
    let mut r = rng(0xbad);
    for _ in 0..20 {
        let case = cases.choose(&mut r).unwrap();
        let (mutated, field) = mutate(case, &mut r);
        let outcome = mutated.run();
        ensure(!matches!(outcome, CaseOutcome::Pass), || {
            format!("{} still passes with corrupted {field}", case.label())
        })?;
    }
    Ok(())
}

#[test]
fn acceptance() {
    let mut gate = Gate { failures: Vec::new() };
    gate.criterion(1, "known-answer conformance", Duration::from_secs(5), known_answers);
    gate.criterion(2, "oracle equivalence", Duration::from_secs(30), oracle_equivalence);
    gate.criterion(3, "invariant suites", Duration::from_secs(60), invariant_suites);
    gate.criterion(4, "benchmark shape", Duration::from_secs(120), benchmark_shape);
    gate.criterion(5, "negative controls", Duration::from_secs(5), negative_controls);
    assert!(gate.failures.is_empty(), "{:#?}", gate.failures);
}
