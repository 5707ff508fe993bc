//! Key derivation functions built on the MACs in this crate:
//!
//! * [`counter_kdf`]: counter-mode KDF with an HMAC-SHA256 or AES-CMAC PRF,
//!   block `i` computed over `[i] || "KDF" || 0x00 || msg || [L]`.
//! * [`kmac_kdf`]: KMAC128 with customization string `"KDF"`.
//! * [`ieee_kdf`]: the IEEE 1609.2.1 butterfly expansion function, three
//!   AES-128 blocks each XORed with their own input.
//!
//! The IEEE function runs AES in raw ECB mode over inputs that are public
//! in practice (the period and key indices), so the trailing XOR adds little
//! beyond the cipher itself.

use alloc::vec::Vec;

use crate::cmac::Cmac;
use crate::hmac::Hmac;
use crate::kmac::{kmac, KmacParams, KmacVariant};
use crate::primitives::{Aes128Cipher, Block128, HashFunction, Sha256, AES128_KEY_LEN, BLOCK_LEN};
use crate::{Error, Result};

/// Output of any KDF in this module.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct DerivedBytes(Vec<u8>);

impl DerivedBytes {
    pub fn as_bytes(&self) -> &[u8] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn into_vec(self) -> Vec<u8> {
        self.0
    }
}

impl AsRef<[u8]> for DerivedBytes {
    fn as_ref(&self) -> &[u8] {
        &self.0
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum PrfChoice {
    HmacSha256,
    CmacAes128,
}

impl PrfChoice {
    /// PRF output length in bytes.
    pub fn block_len(self) -> usize {
        match self {
            PrfChoice::HmacSha256 => Sha256::SPEC.digest_len,
            PrfChoice::CmacAes128 => BLOCK_LEN,
        }
    }
}

/// Unit in which the output length field is encoded.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum LengthUnit {
    Bytes,
    Bits,
}

/// Fixed-input layout of the counter-mode KDF.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct CounterProfile {
    /// Width of the big-endian block counter, 1..=4 bytes.
    pub counter_width: usize,
    /// Width of the big-endian length field, 1..=8 bytes.
    pub length_width: usize,
    pub length_unit: LengthUnit,
    pub label: &'static [u8],
    pub separator: u8,
}

impl Default for CounterProfile {
    /// 4-byte counter, 4-byte length in bytes, label `"KDF"`, separator `0x00`.
    fn default() -> Self {
        CounterProfile {
            counter_width: 4,
            length_width: 4,
            length_unit: LengthUnit::Bytes,
            label: b"KDF",
            separator: 0x00,
        }
    }
}

fn fits(value: u64, width: usize) -> bool {
    width >= 8 || value >> (8 * width) == 0
}

fn push_be(out: &mut Vec<u8>, value: u64, width: usize) {
    out.extend_from_slice(&value.to_be_bytes()[8 - width..]);
}

impl CounterProfile {
    /// Builds the input for block `counter`.
    pub fn fixed_input(&self, counter: u32, msg: &[u8], out_len_bytes: usize) -> Vec<u8> {
        let mut buf = Vec::with_capacity(
            self.counter_width + self.label.len() + 1 + msg.len() + self.length_width,
        );
        push_be(&mut buf, counter as u64, self.counter_width);
        buf.extend_from_slice(self.label);
        buf.push(self.separator);
        buf.extend_from_slice(msg);
        push_be(&mut buf, self.encoded_length(out_len_bytes), self.length_width);
        buf
    }

    fn encoded_length(&self, out_len_bytes: usize) -> u64 {
        match self.length_unit {
            LengthUnit::Bytes => out_len_bytes as u64,
            LengthUnit::Bits => out_len_bytes as u64 * 8,
        }
    }

    fn validate(&self, blocks: usize, out_len_bytes: usize) -> Result<()> {
        if !(1..=4).contains(&self.counter_width) || !(1..=8).contains(&self.length_width) {
            return Err(Error::InvalidParameter("unsupported counter or length width"));
        }
        if !fits(blocks as u64, self.counter_width) {
            return Err(Error::InvalidParameter("output too long for the counter width"));
        }
        let encoded = out_len_bytes
            .checked_mul(8)
            .map(|_| self.encoded_length(out_len_bytes))
            .ok_or(Error::InvalidParameter("output length overflows"))?;
        if !fits(encoded, self.length_width) {
            return Err(Error::InvalidParameter("output length exceeds the length field"));
        }
        Ok(())
    }
}

#[allow(clippy::large_enum_variant)] // one per call, never stored
enum KeyedPrf {
    Hmac(Hmac<Sha256>),
    Cmac(Cmac),
}

impl KeyedPrf {
    fn new(prf: PrfChoice, key: &[u8]) -> Result<Self> {
        Ok(match prf {
            PrfChoice::HmacSha256 => KeyedPrf::Hmac(Hmac::new(key)),
            PrfChoice::CmacAes128 => KeyedPrf::Cmac(Cmac::new(key)?),
        })
    }

    fn apply(&self, input: &[u8], out: &mut Vec<u8>) {
        match self {
            KeyedPrf::Hmac(keyed) => {
                let mut mac = keyed.clone();
                mac.update(input);
                out.extend_from_slice(mac.finalize().as_bytes());
            }
            KeyedPrf::Cmac(keyed) => out.extend_from_slice(&keyed.tag(input)),
        }
    }
}

/// Counter-mode KDF with the default [`CounterProfile`].
pub fn counter_kdf(
    prf: PrfChoice,
    key: &[u8],
    msg: &[u8],
    out_len_bytes: usize,
) -> Result<DerivedBytes> {
    counter_kdf_with_profile(prf, key, msg, out_len_bytes, &CounterProfile::default())
}

/// `PRF(k, Msg'_1) || ... || PRF(k, Msg'_n)` truncated to `out_len_bytes`,
/// where `n = ceil(L / B)`.
pub fn counter_kdf_with_profile(
    prf: PrfChoice,
    key: &[u8],
    msg: &[u8],
    out_len_bytes: usize,
    profile: &CounterProfile,
) -> Result<DerivedBytes> {
    if out_len_bytes == 0 {
        return Err(Error::InvalidParameter("output length must be positive"));
    }
    let blocks = out_len_bytes.div_ceil(prf.block_len());
    profile.validate(blocks, out_len_bytes)?;
    let keyed = KeyedPrf::new(prf, key)?;

    let mut input = profile.fixed_input(1, msg, out_len_bytes);
    let mut out = Vec::with_capacity(blocks * prf.block_len());
    for i in 1..=blocks as u64 {
        input[..profile.counter_width].copy_from_slice(&i.to_be_bytes()[8 - profile.counter_width..]);
        keyed.apply(&input, &mut out);
    }
    out.truncate(out_len_bytes);
    Ok(DerivedBytes(out))
}

/// Customization string of the KMAC-based KDF.
pub const KMAC_KDF_CUSTOMIZATION: &[u8] = b"KDF";

/// `KMAC128(key, msg, L, "KDF")`.
pub fn kmac_kdf(key: &[u8], msg: &[u8], out_len_bits: usize) -> Result<DerivedBytes> {
    kmac_kdf_with_variant(KmacVariant::Kmac128, key, msg, out_len_bits)
}

pub fn kmac_kdf_with_variant(
    variant: KmacVariant,
    key: &[u8],
    msg: &[u8],
    out_len_bits: usize,
) -> Result<DerivedBytes> {
    let params = KmacParams::new(variant, out_len_bits, KMAC_KDF_CUSTOMIZATION);
    Ok(DerivedBytes(kmac(key, msg, &params)?))
}

/// Output length of [`ieee_kdf`].
pub const IEEE_KDF_OUTPUT_LEN: usize = 3 * BLOCK_LEN;

/// Leading four bytes of every input block when `U = 1`.
pub const PAD_SIGNING: [u8; 4] = [0x00; 4];
/// Leading four bytes of every input block when `U = 2`.
pub const PAD_ENCRYPTION: [u8; 4] = [0x11; 4];

/// Key usage flag `U`.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Purpose {
    Signing = 1,
    Encryption = 2,
}

impl Purpose {
    pub fn pad(self) -> [u8; 4] {
        match self {
            Purpose::Signing => PAD_SIGNING,
            Purpose::Encryption => PAD_ENCRYPTION,
        }
    }
}

impl TryFrom<u8> for Purpose {
    type Error = Error;

    fn try_from(u: u8) -> Result<Self> {
        match u {
            1 => Ok(Purpose::Signing),
            2 => Ok(Purpose::Encryption),
            _ => Err(Error::InvalidParameter("purpose must be 1 or 2")),
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct IeeeKdfInput {
    pub key: [u8; AES128_KEY_LEN],
    /// Period index.
    pub i_value: [u8; 4],
    /// Key index within the period.
    pub j_value: [u8; 4],
    pub purpose: Purpose,
}

impl IeeeKdfInput {
    pub fn from_slices(key: &[u8], i_value: &[u8], j_value: &[u8], purpose: u8) -> Result<Self> {
        let key = key.try_into().map_err(|_| Error::InvalidKeyLength {
            expected: AES128_KEY_LEN,
            actual: key.len(),
        })?;
        let i_value = i_value
            .try_into()
            .map_err(|_| Error::InvalidParameter("i_value must be 4 bytes"))?;
        let j_value = j_value
            .try_into()
            .map_err(|_| Error::InvalidParameter("j_value must be 4 bytes"))?;
        Ok(IeeeKdfInput {
            key,
            i_value,
            j_value,
            purpose: Purpose::try_from(purpose)?,
        })
    }

    /// `Pad_U || i_value || j_value || 00000000`.
    pub fn base_block(&self) -> Block128 {
        let mut b = [0u8; BLOCK_LEN];
        b[..4].copy_from_slice(&self.purpose.pad());
        b[4..8].copy_from_slice(&self.i_value);
        b[8..12].copy_from_slice(&self.j_value);
        Block128(b)
    }

    /// `base + i` as a 128-bit big-endian integer, wrapping.
    pub fn input_block(&self, i: u32) -> Block128 {
        let base = u128::from_be_bytes(self.base_block().0);
        Block128(base.wrapping_add(i as u128).to_be_bytes())
    }
}

/// `(AES(k, X_1) ^ X_1) || (AES(k, X_2) ^ X_2) || (AES(k, X_3) ^ X_3)`
/// with `X_i = base + i`.
pub fn ieee_kdf(input: &IeeeKdfInput) -> DerivedBytes {
    let cipher = Aes128Cipher::new(&input.key).expect("key is 16 bytes by construction");
    let mut out = Vec::with_capacity(IEEE_KDF_OUTPUT_LEN);
    for i in 1..=3 {
        let x = input.input_block(i);
        out.extend_from_slice(&(cipher.encrypt(&x) ^ x).0);
    }
    DerivedBytes(out)
}
