//! Test-only reference code, independent of the crate's primitive adapters.

#![allow(dead_code)]

/// Textbook AES-128 (byte-oriented, S-box derived from the GF(2^8)
/// inverse). Slow; only used to cross-check the adapter.
pub mod ref_aes {
    fn xtime(b: u8) -> u8 {
        (b << 1) ^ if b & 0x80 != 0 { 0x1b } else { 0 }
    }

    fn gmul(mut a: u8, mut b: u8) -> u8 {
        let mut p = 0;
        while b != 0 {
            if b & 1 != 0 {
                p ^= a;
            }
            a = xtime(a);
            b >>= 1;
        }
        p
    }

    fn sbox(x: u8) -> u8 {
        let inv = if x == 0 {
            0
        } else {
            (1..=255u8).find(|&y| gmul(x, y) == 1).unwrap()
        };
        let mut s = inv;
        for i in 1..5 {
            s ^= inv.rotate_left(i);
        }
        s ^ 0x63
    }

    fn table() -> &'static [u8; 256] {
        static SBOX: std::sync::OnceLock<[u8; 256]> = std::sync::OnceLock::new();
        SBOX.get_or_init(|| core::array::from_fn(|i| sbox(i as u8)))
    }

    pub fn encrypt(key: &[u8; 16], block: &[u8; 16]) -> [u8; 16] {
        let sb = table();
        let mut w = [[0u8; 4]; 44];
        for i in 0..4 {
            w[i].copy_from_slice(&key[4 * i..4 * i + 4]);
        }
        let mut rcon = 1u8;
        for i in 4..44 {
            let mut t = w[i - 1];
            if i % 4 == 0 {
                t = [sb[t[1] as usize] ^ rcon, sb[t[2] as usize], sb[t[3] as usize], sb[t[0] as usize]];
                rcon = xtime(rcon);
            }
            for j in 0..4 {
                w[i][j] = w[i - 4][j] ^ t[j];
            }
        }
        let mut s = *block;
        let add = |s: &mut [u8; 16], r: usize| {
            for c in 0..4 {
                for j in 0..4 {
                    s[4 * c + j] ^= w[4 * r + c][j];
                }
            }
        };
        add(&mut s, 0);
        for round in 1..=10 {
            for b in s.iter_mut() {
                *b = sb[*b as usize];
            }
            let t = s;
            for c in 0..4 {
                for r in 0..4 {
                    s[4 * c + r] = t[4 * ((c + r) % 4) + r];
                }
            }
            if round != 10 {
                for c in 0..4 {
                    let a = [s[4 * c], s[4 * c + 1], s[4 * c + 2], s[4 * c + 3]];
                    for r in 0..4 {
                        s[4 * c + r] = gmul(a[r], 2)
                            ^ gmul(a[(r + 1) % 4], 3)
                            ^ a[(r + 2) % 4]
                            ^ a[(r + 3) % 4];
                    }
                }
            }
            add(&mut s, round);
        }
        s
    }
}

pub fn hex(s: &str) -> Vec<u8> {
    hex::decode(s).unwrap()
}
