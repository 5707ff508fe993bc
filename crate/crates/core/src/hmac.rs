//! HMAC (FIPS 198-1) over any [`HashFunction`].
//!
//! `K0` is the key brought to exactly one hash input block: hashed first
//! when longer than the block, then right-padded with zero bytes. The tag is
//! `H((K0 ^ opad) || H((K0 ^ ipad) || msg))`.

use alloc::vec;
use alloc::vec::Vec;

use crate::primitives::{HashFunction, Sha256};

pub const IPAD: u8 = 0x36;
pub const OPAD: u8 = 0x5c;

/// The key normalized to the hash block length.
#[derive(Clone, PartialEq, Eq)]
pub struct PaddedKey(Vec<u8>);

impl PaddedKey {
    pub fn as_bytes(&self) -> &[u8] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl core::fmt::Debug for PaddedKey {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        write!(f, "PaddedKey({} bytes)", self.0.len())
    }
}

/// An HMAC output of the hash's digest length.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct HmacTag(Vec<u8>);

impl HmacTag {
    pub fn as_bytes(&self) -> &[u8] {
        &self.0
    }

    pub fn into_vec(self) -> Vec<u8> {
        self.0
    }
}

impl AsRef<[u8]> for HmacTag {
    fn as_ref(&self) -> &[u8] {
        &self.0
    }
}

pub fn derive_k0<H: HashFunction>(key: &[u8]) -> PaddedKey {
    let block_len = H::SPEC.block_len;
    let mut k0 = vec![0u8; block_len];
    if key.len() > block_len {
        let mut h = H::new();
        h.update(key);
        h.finalize_into(&mut k0[..H::SPEC.digest_len]);
    } else {
        k0[..key.len()].copy_from_slice(key);
    }
    PaddedKey(k0)
}

/// Incremental HMAC. The inner hash is keyed on construction; the outer
/// pad is kept until [`Hmac::finalize`].
#[derive(Clone)]
pub struct Hmac<H: HashFunction> {
    inner: H,
    outer_key: Vec<u8>,
}

impl<H: HashFunction> Hmac<H> {
    pub fn new(key: &[u8]) -> Self {
        let k0 = derive_k0::<H>(key);
        let mut inner = H::new();
        let ipad: Vec<u8> = k0.0.iter().map(|b| b ^ IPAD).collect();
        inner.update(&ipad);
        let outer_key = k0.0.iter().map(|b| b ^ OPAD).collect();
        Hmac { inner, outer_key }
    }

    pub fn update(&mut self, data: &[u8]) {
        self.inner.update(data);
    }

    pub fn finalize(self) -> HmacTag {
        let digest_len = H::SPEC.digest_len;
        let mut inner_digest = vec![0u8; digest_len];
        self.inner.finalize_into(&mut inner_digest);
        let mut outer = H::new();
        outer.update(&self.outer_key);
        outer.update(&inner_digest);
        let mut tag = vec![0u8; digest_len];
        outer.finalize_into(&mut tag);
        HmacTag(tag)
    }
}

pub fn hmac<H: HashFunction>(key: &[u8], msg: &[u8]) -> HmacTag {
    let mut mac = Hmac::<H>::new(key);
    mac.update(msg);
    mac.finalize()
}

pub fn hmac_sha256(key: &[u8], msg: &[u8]) -> [u8; 32] {
    let tag = hmac::<Sha256>(key, msg);
    let mut out = [0u8; 32];
    out.copy_from_slice(tag.as_bytes());
    out
}
