//! Message authentication codes (HMAC, AES-CMAC, KMAC) and the key
//! derivation functions layered on top of them.
//!
//! The crate is `no_std` and only needs `alloc`. The AES-128 block
//! function, the SHA-256 compression function and the Keccak-f[1600]
//! permutation come from vetted external crates through [`primitives`];
//! padding, sponge framing and every MAC/KDF construction live here.

#![cfg_attr(not(feature = "std"), no_std)]
#![forbid(unsafe_code)]

extern crate alloc;

mod error;

pub mod cmac;
pub mod hmac;
pub mod kdf;
pub mod kmac;
pub mod primitives;

pub use error::{Error, Result};
