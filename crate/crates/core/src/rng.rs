//! Counter-based random streams.
//!
//! Every random draw in the simulator is a pure function of
//! `(seed, replicate, i, j, draw index)`, so any edge path can be
//! regenerated in isolation and results do not depend on how work is
//! scheduled across threads.
//!
//! The generator is Philox4x32-10 (Salmon et al., "Parallel random
//! numbers: as easy as 1, 2, 3", SC'11). The 64-bit master seed is the
//! Philox key (low word first); the 128-bit counter is
//! `[block, j, i, replicate]`. Each block yields four 32-bit words, which
//! are consumed in pairs `(w0, w1)`, `(w2, w3)` to form uniforms
//! `((w_hi << 21) ^ (w_lo >> 11) + 0.5) * 2^-53`, i.e. values on the open
//! interval (0, 1).

const M0: u32 = 0xD251_1F53;
const M1: u32 = 0xCD9E_8D57;
const W0: u32 = 0x9E37_79B9;
const W1: u32 = 0xBB67_AE85;

/// The Philox4x32 bijection with 10 rounds.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Philox4x32 {
    key: [u32; 2],
}

impl Philox4x32 {
    pub fn new(key: [u32; 2]) -> Self {
        Self { key }
    }

    pub fn from_seed(seed: u64) -> Self {
        Self::new([seed as u32, (seed >> 32) as u32])
    }

    #[inline]
    pub fn block(&self, mut ctr: [u32; 4]) -> [u32; 4] {
        let mut key = self.key;
        for round in 0..10 {
            if round > 0 {
                key[0] = key[0].wrapping_add(W0);
                key[1] = key[1].wrapping_add(W1);
            }
            let p0 = u64::from(M0) * u64::from(ctr[0]);
            let p1 = u64::from(M1) * u64::from(ctr[2]);
            ctr = [
                ((p1 >> 32) as u32) ^ ctr[1] ^ key[0],
                p1 as u32,
                ((p0 >> 32) as u32) ^ ctr[3] ^ key[1],
                p0 as u32,
            ];
        }
        ctr
    }
}

/// Anything that yields uniforms on the open interval (0, 1).
pub trait UniformSource {
    fn next_uniform(&mut self) -> f64;
}

/// Identifies one independent substream.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct StreamKey {
    pub seed: u64,
    pub replicate: u32,
    pub i: u32,
    pub j: u32,
}

impl StreamKey {
    pub fn new(seed: u64, replicate: u32, i: u32, j: u32) -> Self {
        Self { seed, replicate, i, j }
    }

    pub fn stream(self) -> CounterStream {
        CounterStream::new(self)
    }
}

/// Sequential reader over the blocks of one substream.
#[derive(Debug, Clone)]
pub struct CounterStream {
    gen: Philox4x32,
    ctr: [u32; 4],
    buf: [u32; 4],
    // Next unread word in `buf`; 4 means the buffer is exhausted.
    pos: usize,
}

impl CounterStream {
    pub fn new(key: StreamKey) -> Self {
        Self {
            gen: Philox4x32::from_seed(key.seed),
            ctr: [0, key.j, key.i, key.replicate],
            buf: [0; 4],
            pos: 4,
        }
    }

    #[inline]
    pub fn next_u32(&mut self) -> u32 {
        if self.pos == 4 {
            self.buf = self.gen.block(self.ctr);
            self.ctr[0] = self.ctr[0].wrapping_add(1);
            self.pos = 0;
        }
        let w = self.buf[self.pos];
        self.pos += 1;
        w
    }
}

impl UniformSource for CounterStream {
    #[inline]
    fn next_uniform(&mut self) -> f64 {
        let hi = u64::from(self.next_u32());
        let lo = u64::from(self.next_u32());
        let bits = (hi << 21) ^ (lo >> 11);
        (bits as f64 + 0.5) * (1.0 / 9_007_199_254_740_992.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    // Known-answer vectors from the Random123 distribution (kat_vectors).
    #[test]
    fn philox_known_answers() {
        let zero = Philox4x32::new([0, 0]).block([0, 0, 0, 0]);
        assert_eq!(zero, [0x6627_e8d5, 0xe169_c58d, 0xbc57_ac4c, 0x9b00_dbd8]);

        let ones = Philox4x32::new([u32::MAX, u32::MAX]).block([u32::MAX; 4]);
        assert_eq!(ones, [0x408f_276d, 0x41c8_3b0e, 0xa20b_c7c6, 0x6d54_51fd]);

        let pi = Philox4x32::new([0xa409_3822, 0x299f_31d0])
            .block([0x243f_6a88, 0x85a3_08d3, 0x1319_8a2e, 0x0370_7344]);
        assert_eq!(pi, [0xd16c_fe09, 0x94fd_cceb, 0x5001_e420, 0x2412_6ea1]);
    }

    #[test]
    fn uniforms_are_open_interval_and_reproducible() {
        let key = StreamKey::new(42, 7, 3, 5);
        let mut a = key.stream();
        let mut b = key.stream();
        for _ in 0..10_000 {
            let u = a.next_uniform();
            assert!(u > 0.0 && u < 1.0);
            assert_eq!(u.to_bits(), b.next_uniform().to_bits());
        }
    }

    #[test]
    fn distinct_keys_give_distinct_streams() {
        let mut a = StreamKey::new(1, 0, 0, 1).stream();
        let mut b = StreamKey::new(1, 0, 1, 0).stream();
        let same = (0..64).filter(|_| a.next_u32() == b.next_u32()).count();
        assert!(same < 2);
    }

    #[test]
    fn uniform_mean_and_variance() {
        let mut s = StreamKey::new(9, 0, 0, 0).stream();
        let n = 200_000;
        let (mut m, mut m2) = (0.0, 0.0);
        for _ in 0..n {
            let u = s.next_uniform();
            m += u;
            m2 += u * u;
        }
        m /= n as f64;
        m2 /= n as f64;
        assert!((m - 0.5).abs() < 4.0 * (1.0 / 12.0f64 / n as f64).sqrt());
        assert!((m2 - m * m - 1.0 / 12.0).abs() < 2e-3);
    }
}
