//! cSHAKE and KMAC (NIST SP 800-185) over the in-crate Keccak sponge.
//!
//! `KMAC(K, X, L, S) = cSHAKE(bytepad(encode_string(K), r) || X || right_encode(L), L, "KMAC", S)`

use alloc::vec;
use alloc::vec::Vec;

use crate::primitives::{SpongeState, CSHAKE_DOMAIN, RATE_128, RATE_256, SHAKE_DOMAIN};
use crate::{Error, Result};

/// Function name string fixed by KMAC.
pub const KMAC_FUNCTION_NAME: &[u8] = b"KMAC";

/// An integer encoded by `left_encode` / `right_encode`: at most 8 value
/// bytes plus the one length byte.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct EncodedInt {
    buf: [u8; 9],
    len: usize,
}

impl AsRef<[u8]> for EncodedInt {
    fn as_ref(&self) -> &[u8] {
        &self.buf[..self.len]
    }
}

fn minimal_be(n: u64) -> ([u8; 8], usize) {
    let bytes = n.to_be_bytes();
    // zero still takes one byte
    let skip = (n.leading_zeros() as usize / 8).min(7);
    (bytes, skip)
}

/// Length byte, then the big-endian value in as few bytes as possible.
pub fn left_encode(n: u64) -> EncodedInt {
    let (bytes, skip) = minimal_be(n);
    let len = 8 - skip;
    let mut buf = [0u8; 9];
    buf[0] = len as u8;
    buf[1..=len].copy_from_slice(&bytes[skip..]);
    EncodedInt { buf, len: len + 1 }
}

/// Big-endian value in as few bytes as possible, then the length byte.
pub fn right_encode(n: u64) -> EncodedInt {
    let (bytes, skip) = minimal_be(n);
    let len = 8 - skip;
    let mut buf = [0u8; 9];
    buf[..len].copy_from_slice(&bytes[skip..]);
    buf[len] = len as u8;
    EncodedInt { buf, len: len + 1 }
}

/// `left_encode(bit length) || x`.
pub fn encode_string(x: &[u8]) -> Vec<u8> {
    let prefix = left_encode(bit_len(x.len()));
    let mut out = Vec::with_capacity(prefix.as_ref().len() + x.len());
    out.extend_from_slice(prefix.as_ref());
    out.extend_from_slice(x);
    out
}

/// `left_encode(w) || x`, zero-filled to a multiple of `w` bytes.
pub fn bytepad(x: &[u8], w: usize) -> Vec<u8> {
    let prefix = left_encode(w as u64);
    let mut out = Vec::with_capacity(x.len() + 9 + w);
    out.extend_from_slice(prefix.as_ref());
    out.extend_from_slice(x);
    let rem = out.len() % w;
    if rem != 0 {
        out.resize(out.len() + w - rem, 0);
    }
    out
}

fn bit_len(bytes: usize) -> u64 {
    (bytes as u64) * 8
}

fn bits_to_bytes(out_len_bits: usize) -> Result<usize> {
    if out_len_bits == 0 {
        return Err(Error::InvalidParameter("output length must be positive"));
    }
    if !out_len_bits.is_multiple_of(8) {
        return Err(Error::InvalidParameter(
            "output length must be a multiple of 8 bits",
        ));
    }
    Ok(out_len_bits / 8)
}

/// Streaming cSHAKE. The `bytepad(encode_string(N) || encode_string(S), r)`
/// prefix is absorbed up front and never materialized.
#[derive(Clone)]
pub struct CShake {
    sponge: SpongeState,
    domain: u8,
}

impl CShake {
    pub fn new(function_name: &[u8], customization: &[u8], rate: usize) -> Result<Self> {
        let mut sponge = SpongeState::new(rate)?;
        let domain = if function_name.is_empty() && customization.is_empty() {
            SHAKE_DOMAIN
        } else {
            sponge.absorb(left_encode(rate as u64).as_ref());
            sponge.absorb(left_encode(bit_len(function_name.len())).as_ref());
            sponge.absorb(function_name);
            sponge.absorb(left_encode(bit_len(customization.len())).as_ref());
            sponge.absorb(customization);
            sponge.fill_block();
            CSHAKE_DOMAIN
        };
        Ok(CShake { sponge, domain })
    }

    pub fn update(&mut self, data: &[u8]) {
        self.sponge.absorb(data);
    }

    /// Zero-fills to the next rate boundary (the tail of a `bytepad`).
    fn fill_block(&mut self) {
        self.sponge.fill_block();
    }

    pub fn finalize_into(self, out: &mut [u8]) {
        self.sponge.finalize(self.domain).squeeze(out);
    }
}

pub fn cshake(
    msg: &[u8],
    out_len_bits: usize,
    function_name: &[u8],
    customization: &[u8],
    rate: usize,
) -> Result<Vec<u8>> {
    let out_len = bits_to_bytes(out_len_bits)?;
    let mut c = CShake::new(function_name, customization, rate)?;
    c.update(msg);
    let mut out = vec![0u8; out_len];
    c.finalize_into(&mut out);
    Ok(out)
}

/// SHAKE128 (`rate = 168`) or SHAKE256 (`rate = 136`).
pub fn shake(msg: &[u8], out_len_bits: usize, rate: usize) -> Result<Vec<u8>> {
    cshake(msg, out_len_bits, b"", b"", rate)
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, Default)]
pub enum KmacVariant {
    #[default]
    Kmac128,
    Kmac256,
}

impl KmacVariant {
    pub fn rate(self) -> usize {
        match self {
            KmacVariant::Kmac128 => RATE_128,
            KmacVariant::Kmac256 => RATE_256,
        }
    }
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct KmacParams {
    pub variant: KmacVariant,
    pub out_len_bits: usize,
    pub customization: Vec<u8>,
}

impl KmacParams {
    pub fn new(variant: KmacVariant, out_len_bits: usize, customization: &[u8]) -> Self {
        KmacParams {
            variant,
            out_len_bits,
            customization: customization.to_vec(),
        }
    }
}

impl Default for KmacParams {
    /// KMAC128 with a 256-bit tag and empty customization.
    fn default() -> Self {
        KmacParams::new(KmacVariant::Kmac128, 256, b"")
    }
}

/// Streaming KMAC; the key block is absorbed on construction.
#[derive(Clone)]
pub struct Kmac {
    inner: CShake,
    out_len_bits: usize,
}

impl Kmac {
    pub fn new(key: &[u8], params: &KmacParams) -> Result<Self> {
        bits_to_bytes(params.out_len_bits)?;
        let rate = params.variant.rate();
        let mut inner = CShake::new(KMAC_FUNCTION_NAME, &params.customization, rate)?;
        inner.update(left_encode(rate as u64).as_ref());
        inner.update(left_encode(bit_len(key.len())).as_ref());
        inner.update(key);
        inner.fill_block();
        Ok(Kmac {
            inner,
            out_len_bits: params.out_len_bits,
        })
    }

    pub fn update(&mut self, data: &[u8]) {
        self.inner.update(data);
    }

    pub fn finalize(mut self) -> Vec<u8> {
        self.inner
            .update(right_encode(self.out_len_bits as u64).as_ref());
        let mut out = vec![0u8; self.out_len_bits / 8];
        self.inner.finalize_into(&mut out);
        out
    }
}

pub fn kmac(key: &[u8], msg: &[u8], params: &KmacParams) -> Result<Vec<u8>> {
    let mut k = Kmac::new(key, params)?;
    k.update(msg);
    Ok(k.finalize())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn h(s: &str) -> Vec<u8> {
        (0..s.len())
            .step_by(2)
            .map(|i| u8::from_str_radix(&s[i..i + 2], 16).unwrap())
            .collect()
    }

    #[test]
    fn encodings() {
        assert_eq!(right_encode(0).as_ref(), &[0x00, 0x01]);
        assert_eq!(left_encode(0).as_ref(), &[0x01, 0x00]);
        assert_eq!(left_encode(1344).as_ref(), &[0x02, 0x05, 0x40]);
        assert_eq!(right_encode(256).as_ref(), &[0x01, 0x00, 0x02]);
        assert_eq!(left_encode(168).as_ref(), &[0x01, 0xa8]);
        assert_eq!(
            left_encode(u64::MAX).as_ref(),
            &[8, 0xff, 0xff, 0xff, 0xff, 0xff, 0xff, 0xff, 0xff]
        );
    }

    #[test]
    fn encode_string_and_bytepad() {
        assert_eq!(encode_string(b""), vec![0x01, 0x00]);
        assert_eq!(encode_string(b"KMAC"), vec![0x01, 0x20, b'K', b'M', b'A', b'C']);
        let p = bytepad(b"abc", 168);
        assert_eq!(p.len(), 168);
        assert_eq!(&p[..5], &[0x01, 0xa8, b'a', b'b', b'c']);
        assert!(p[5..].iter().all(|&b| b == 0));
        // already on a boundary: no extra block
        assert_eq!(bytepad(&[7u8; 134], 136).len(), 136);
    }

    #[test]
    fn cshake_empty_strings_is_shake() {
        let a = cshake(b"", 256, b"", b"", RATE_128).unwrap();
        assert_eq!(
            a,
            h("7f9c2ba4e88f827d616045507605853ed73b8093f6efbc88eb1a6eacfa66ef26")
        );
    }

    #[test]
    fn cshake128_sample_1() {
        let out = cshake(&h("00010203"), 256, b"", b"Email Signature", RATE_128).unwrap();
        assert_eq!(
            out,
            h("c1c36925b6409a04f1b504fcbca9d82b4017277cb5ed2b2065fc1d3814d5aaf5")
        );
    }

    #[test]
    fn kmac128_samples() {
        let key: Vec<u8> = (0x40..0x60).collect();
        let msg = h("00010203");
        let p = KmacParams::new(KmacVariant::Kmac128, 256, b"");
        assert_eq!(
            kmac(&key, &msg, &p).unwrap(),
            h("e5780b0d3ea6f7d3a429c5706aa43a00fadbd7d49628839e3187243f456ee14e")
        );
        let p = KmacParams::new(KmacVariant::Kmac128, 256, b"My Tagged Application");
        assert_eq!(
            kmac(&key, &msg, &p).unwrap(),
            h("3b1fba963cd8b0b59e8c1a6d71888b7143651af8ba0a7070c0979e2811324aa5")
        );
    }

    #[test]
    fn kmac_key_block_matches_bytepad() {
        // streaming key absorption vs. building Msg* explicitly
        let key = [0x5au8; 200];
        let msg = b"hello";
        let rate = RATE_128;
        let mut explicit = bytepad(&encode_string(&key), rate);
        explicit.extend_from_slice(msg);
        explicit.extend_from_slice(right_encode(256).as_ref());
        let via_cshake = cshake(&explicit, 256, KMAC_FUNCTION_NAME, b"S", rate).unwrap();
        let p = KmacParams::new(KmacVariant::Kmac128, 256, b"S");
        assert_eq!(kmac(&key, msg, &p).unwrap(), via_cshake);
    }

    #[test]
    fn length_changes_whole_output() {
        let p256 = KmacParams::new(KmacVariant::Kmac128, 256, b"");
        let p512 = KmacParams::new(KmacVariant::Kmac128, 512, b"");
        let a = kmac(b"k", b"m", &p256).unwrap();
        let b = kmac(b"k", b"m", &p512).unwrap();
        assert_eq!(b.len(), 64);
        assert_ne!(a[..], b[..32]);
    }

    #[test]
    fn rejects_bad_lengths() {
        for bits in [0, 1, 7, 9, 255] {
            let p = KmacParams::new(KmacVariant::Kmac128, bits, b"");
            assert!(kmac(b"k", b"m", &p).is_err(), "{bits}");
            assert!(cshake(b"", bits, b"N", b"", RATE_128).is_err());
        }
    }
}
