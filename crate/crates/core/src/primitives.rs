//! Adapters over the three primitives every construction in this crate
//! consumes: the AES-128 forward cipher, SHA-256 and the Keccak-f[1600]
//! permutation.
//!
//! Only the raw block function / compression function / permutation is
//! taken from an external crate. The Keccak sponge (absorb, multi-rate
//! padding, squeeze) is implemented here on top of `keccak::f1600`.

use alloc::vec;
use alloc::vec::Vec;
use core::ops::{BitXor, BitXorAssign};

use aes::cipher::{BlockEncrypt, KeyInit};

use crate::{Error, Result};

/// AES block size in bytes.
pub const BLOCK_LEN: usize = 16;

/// AES-128 key size in bytes.
pub const AES128_KEY_LEN: usize = 16;

/// A single 128-bit block.
#[derive(Clone, Copy, Default, PartialEq, Eq, Hash)]
pub struct Block128(pub [u8; BLOCK_LEN]);

impl Block128 {
    pub const ZERO: Block128 = Block128([0; BLOCK_LEN]);

    /// Copies exactly 16 bytes out of `bytes`.
    pub fn from_slice(bytes: &[u8]) -> Result<Self> {
        let arr: [u8; BLOCK_LEN] = bytes
            .try_into()
            .map_err(|_| Error::InvalidParameter("block must be exactly 16 bytes"))?;
        Ok(Block128(arr))
    }

    pub fn as_bytes(&self) -> &[u8; BLOCK_LEN] {
        &self.0
    }

    pub fn into_bytes(self) -> [u8; BLOCK_LEN] {
        self.0
    }
}

impl From<[u8; BLOCK_LEN]> for Block128 {
    fn from(b: [u8; BLOCK_LEN]) -> Self {
        Block128(b)
    }
}

impl AsRef<[u8]> for Block128 {
    fn as_ref(&self) -> &[u8] {
        &self.0
    }
}

impl BitXorAssign for Block128 {
    fn bitxor_assign(&mut self, rhs: Self) {
        for (a, b) in self.0.iter_mut().zip(rhs.0) {
            *a ^= b;
        }
    }
}

impl BitXor for Block128 {
    type Output = Block128;

    fn bitxor(mut self, rhs: Self) -> Block128 {
        self ^= rhs;
        self
    }
}

impl core::fmt::Debug for Block128 {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.write_str("Block128(")?;
        for b in self.0 {
            write!(f, "{b:02x}")?;
        }
        f.write_str(")")
    }
}

/// AES-128 with an expanded key schedule, reusable across blocks.
#[derive(Clone)]
pub struct Aes128Cipher {
    inner: aes::Aes128,
}

impl Aes128Cipher {
    pub fn new(key: &[u8]) -> Result<Self> {
        if key.len() != AES128_KEY_LEN {
            return Err(Error::InvalidKeyLength {
                expected: AES128_KEY_LEN,
                actual: key.len(),
            });
        }
        let inner = aes::Aes128::new_from_slice(key).map_err(|_| Error::InvalidKeyLength {
            expected: AES128_KEY_LEN,
            actual: key.len(),
        })?;
        Ok(Aes128Cipher { inner })
    }

    pub fn encrypt(&self, block: &Block128) -> Block128 {
        let mut b = aes::Block::from(block.0);
        self.inner.encrypt_block(&mut b);
        Block128(b.into())
    }
}

impl core::fmt::Debug for Aes128Cipher {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.write_str("Aes128Cipher(..)")
    }
}

/// One-shot AES-128 forward cipher.
pub fn aes_encrypt_block(key: &[u8], plaintext: &Block128) -> Result<Block128> {
    Ok(Aes128Cipher::new(key)?.encrypt(plaintext))
}

/// Block and digest sizes of a hash function, in bytes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct HashSpec {
    pub block_len: usize,
    pub digest_len: usize,
}

impl HashSpec {
    pub const SHA256: HashSpec = HashSpec {
        block_len: 64,
        digest_len: 32,
    };
    pub const SHA3_256: HashSpec = HashSpec {
        block_len: RATE_256,
        digest_len: 32,
    };
}

/// Incremental hash function with a known [`HashSpec`].
pub trait HashFunction: Clone {
    const SPEC: HashSpec;

    fn new() -> Self;
    fn update(&mut self, data: &[u8]);
    /// Writes exactly `SPEC.digest_len` bytes to the front of `out`.
    fn finalize_into(self, out: &mut [u8]);

    fn digest(data: &[u8]) -> Vec<u8> {
        let mut h = Self::new();
        h.update(data);
        let mut out = vec![0u8; Self::SPEC.digest_len];
        h.finalize_into(&mut out);
        out
    }
}

#[derive(Clone, Default)]
pub struct Sha256(sha2::Sha256);

impl HashFunction for Sha256 {
    const SPEC: HashSpec = HashSpec::SHA256;

    fn new() -> Self {
        Sha256(<sha2::Sha256 as sha2::Digest>::new())
    }

    fn update(&mut self, data: &[u8]) {
        sha2::Digest::update(&mut self.0, data);
    }

    fn finalize_into(self, out: &mut [u8]) {
        out[..32].copy_from_slice(&sha2::Digest::finalize(self.0));
    }
}

/// SHA3-256 over the in-crate sponge.
#[derive(Clone)]
pub struct Sha3_256(SpongeState);

impl HashFunction for Sha3_256 {
    const SPEC: HashSpec = HashSpec::SHA3_256;

    fn new() -> Self {
        Sha3_256(SpongeState::with_rate(RATE_256))
    }

    fn update(&mut self, data: &[u8]) {
        self.0.absorb(data);
    }

    fn finalize_into(self, out: &mut [u8]) {
        self.0.finalize(SHA3_DOMAIN).squeeze(&mut out[..32]);
    }
}

pub fn sha256(data: &[u8]) -> [u8; 32] {
    let mut out = [0u8; 32];
    let mut h = Sha256::new();
    h.update(data);
    h.finalize_into(&mut out);
    out
}

/// Rate of the 128-bit security Keccak sponge (SHAKE128, cSHAKE128, KMAC128).
pub const RATE_128: usize = 168;
/// Rate of the 256-bit security Keccak sponge (SHAKE256, cSHAKE256, KMAC256, SHA3-256).
pub const RATE_256: usize = 136;

/// Domain byte for SHAKE.
pub const SHAKE_DOMAIN: u8 = 0x1f;
/// Domain byte for cSHAKE with a non-empty function name or customization.
pub const CSHAKE_DOMAIN: u8 = 0x04;
/// Domain byte for the SHA3 fixed-output hashes.
pub const SHA3_DOMAIN: u8 = 0x06;

const STATE_BYTES: usize = 200;

/// Keccak-f[1600] sponge in the absorbing phase.
///
/// `absorbed_offset` is the byte position inside the current rate block and
/// stays below `rate`: a block is permuted as soon as it fills up.
#[derive(Clone)]
pub struct SpongeState {
    state: [u64; 25],
    rate: usize,
    absorbed_offset: usize,
}

impl SpongeState {
    pub fn new(rate: usize) -> Result<Self> {
        if rate != RATE_128 && rate != RATE_256 {
            return Err(Error::InvalidRate(rate));
        }
        Ok(Self::with_rate(rate))
    }

    fn with_rate(rate: usize) -> Self {
        SpongeState {
            state: [0; 25],
            rate,
            absorbed_offset: 0,
        }
    }

    pub fn rate(&self) -> usize {
        self.rate
    }

    pub fn absorbed_offset(&self) -> usize {
        self.absorbed_offset
    }

    /// Snapshot of the 200-byte state (lanes little-endian).
    pub fn state_bytes(&self) -> [u8; STATE_BYTES] {
        let mut out = [0u8; STATE_BYTES];
        for (chunk, lane) in out.chunks_exact_mut(8).zip(self.state.iter()) {
            chunk.copy_from_slice(&lane.to_le_bytes());
        }
        out
    }

    #[inline]
    fn xor_byte(&mut self, pos: usize, b: u8) {
        self.state[pos / 8] ^= (b as u64) << (8 * (pos % 8));
    }

    fn permute(&mut self) {
        keccak::f1600(&mut self.state);
    }

    pub fn absorb(&mut self, mut data: &[u8]) {
        while !data.is_empty() {
            if self.absorbed_offset == 0 && data.len() >= self.rate {
                let (block, rest) = data.split_at(self.rate);
                for (lane, chunk) in self.state.iter_mut().zip(block.chunks_exact(8)) {
                    *lane ^= u64::from_le_bytes(chunk.try_into().unwrap());
                }
                self.permute();
                data = rest;
                continue;
            }
            let take = (self.rate - self.absorbed_offset).min(data.len());
            for (i, &b) in data[..take].iter().enumerate() {
                self.xor_byte(self.absorbed_offset + i, b);
            }
            self.absorbed_offset += take;
            data = &data[take..];
            if self.absorbed_offset == self.rate {
                self.permute();
                self.absorbed_offset = 0;
            }
        }
    }

    /// Zero-fills the rest of the current rate block. A no-op on a block
    /// boundary.
    pub fn fill_block(&mut self) {
        if self.absorbed_offset != 0 {
            self.permute();
            self.absorbed_offset = 0;
        }
    }

    /// Applies the multi-rate pad with `domain` and switches to squeezing.
    pub fn finalize(mut self, domain: u8) -> SpongeReader {
        let off = self.absorbed_offset;
        self.xor_byte(off, domain);
        self.xor_byte(self.rate - 1, 0x80);
        self.permute();
        SpongeReader {
            state: self.state,
            rate: self.rate,
            offset: 0,
        }
    }
}

/// Keccak sponge in the squeezing phase.
#[derive(Clone)]
pub struct SpongeReader {
    state: [u64; 25],
    rate: usize,
    offset: usize,
}

impl SpongeReader {
    pub fn squeeze(&mut self, out: &mut [u8]) {
        for b in out.iter_mut() {
            if self.offset == self.rate {
                keccak::f1600(&mut self.state);
                self.offset = 0;
            }
            *b = (self.state[self.offset / 8] >> (8 * (self.offset % 8))) as u8;
            self.offset += 1;
        }
    }
}

/// One-shot sponge: absorb `input`, pad with `domain_pad`, squeeze
/// `out_len` bytes.
pub fn sponge_absorb_squeeze(
    input: &[u8],
    rate: usize,
    domain_pad: u8,
    out_len: usize,
) -> Result<Vec<u8>> {
    if out_len == 0 {
        return Err(Error::InvalidParameter("output length must be positive"));
    }
    let mut sponge = SpongeState::new(rate)?;
    sponge.absorb(input);
    let mut out = vec![0u8; out_len];
    sponge.finalize(domain_pad).squeeze(&mut out);
    Ok(out)
}
