//! AES-128 CMAC (NIST SP 800-38B, RFC 4493).

use alloc::vec::Vec;

use crate::primitives::{Aes128Cipher, Block128, BLOCK_LEN};
use crate::Result;

/// Reduction constant for doubling in GF(2^128).
const RB: u8 = 0x87;

/// Multiplication by `x` in GF(2^128): one-bit left shift of the whole
/// block, folding the carried-out bit back in as `0x87` on the last byte.
pub fn dbl(block: &Block128) -> Block128 {
    let b = &block.0;
    let mut out = [0u8; BLOCK_LEN];
    for i in 0..BLOCK_LEN - 1 {
        out[i] = (b[i] << 1) | (b[i + 1] >> 7);
    }
    out[BLOCK_LEN - 1] = b[BLOCK_LEN - 1] << 1;
    // 0xff when the top bit was set, 0x00 otherwise
    let mask = 0u8.wrapping_sub(b[0] >> 7);
    out[BLOCK_LEN - 1] ^= RB & mask;
    Block128(out)
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct SubkeyPair {
    pub k1: Block128,
    pub k2: Block128,
}

impl SubkeyPair {
    fn from_cipher(cipher: &Aes128Cipher) -> Self {
        let l = cipher.encrypt(&Block128::ZERO);
        let k1 = dbl(&l);
        let k2 = dbl(&k1);
        SubkeyPair { k1, k2 }
    }
}

pub fn derive_subkeys(key: &[u8]) -> Result<SubkeyPair> {
    Ok(SubkeyPair::from_cipher(&Aes128Cipher::new(key)?))
}

/// A message split into 16-byte blocks with the final block already
/// padded and masked (`M*_m`).
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct MessageBlocks {
    pub blocks: Vec<Block128>,
    pub last_was_complete: bool,
}

/// `true` when the final chunk of `msg` fills a whole block. The empty
/// message has an incomplete (empty) final chunk.
fn last_is_complete(len: usize) -> bool {
    len != 0 && len.is_multiple_of(BLOCK_LEN)
}

/// Final block: `M_m ^ K1` when complete, `(M_m || 0x80 || 0..) ^ K2` otherwise.
fn masked_last_block(tail: &[u8], subkeys: &SubkeyPair) -> Block128 {
    if tail.len() == BLOCK_LEN {
        let mut b = Block128::ZERO;
        b.0.copy_from_slice(tail);
        b ^ subkeys.k1
    } else {
        let mut b = Block128::ZERO;
        b.0[..tail.len()].copy_from_slice(tail);
        b.0[tail.len()] = 0x80;
        b ^ subkeys.k2
    }
}

/// Splits `msg` into `max(1, ceil(len / 16))` blocks, the last one masked.
pub fn split_and_pad(msg: &[u8], subkeys: &SubkeyPair) -> MessageBlocks {
    let complete = last_is_complete(msg.len());
    let m = if msg.is_empty() {
        1
    } else {
        msg.len().div_ceil(BLOCK_LEN)
    };
    let head_len = (m - 1) * BLOCK_LEN;
    let mut blocks: Vec<Block128> = msg[..head_len]
        .chunks_exact(BLOCK_LEN)
        .map(|c| Block128(c.try_into().unwrap()))
        .collect();
    blocks.push(masked_last_block(&msg[head_len..], subkeys));
    MessageBlocks {
        blocks,
        last_was_complete: complete,
    }
}

/// A keyed CMAC instance: AES key schedule and subkeys computed once.
#[derive(Clone, Debug)]
pub struct Cmac {
    cipher: Aes128Cipher,
    subkeys: SubkeyPair,
}

impl Cmac {
    pub fn new(key: &[u8]) -> Result<Self> {
        let cipher = Aes128Cipher::new(key)?;
        let subkeys = SubkeyPair::from_cipher(&cipher);
        Ok(Cmac { cipher, subkeys })
    }

    pub fn subkeys(&self) -> &SubkeyPair {
        &self.subkeys
    }

    /// CBC-chains every block but the last from `c_0 = 0`, then encrypts
    /// `c_{m-1} ^ M*_m`. Blocks are consumed straight from `msg`.
    pub fn tag(&self, msg: &[u8]) -> [u8; BLOCK_LEN] {
        let m = if msg.is_empty() {
            1
        } else {
            msg.len().div_ceil(BLOCK_LEN)
        };
        let head_len = (m - 1) * BLOCK_LEN;
        let mut chain = Block128::ZERO;
        for chunk in msg[..head_len].chunks_exact(BLOCK_LEN) {
            for (c, b) in chain.0.iter_mut().zip(chunk) {
                *c ^= b;
            }
            chain = self.cipher.encrypt(&chain);
        }
        chain ^= masked_last_block(&msg[head_len..], &self.subkeys);
        self.cipher.encrypt(&chain).0
    }
}

pub fn cmac(key: &[u8], msg: &[u8]) -> Result<[u8; BLOCK_LEN]> {
    Ok(Cmac::new(key)?.tag(msg))
}
