//! Self-contained deterministic random number generation.
//!
//! The simulator's reproducibility contract is byte-identical output for a
//! fixed configuration, across runs and across worker counts. To keep that
//! contract independent of any third-party crate's version history, the
//! generator is implemented here: a xoshiro256** core seeded through
//! SplitMix64.
//!
//! # Stream splitting rule
//!
//! Every trial draws from generators derived purely from
//! `(master_seed, trial_index, stream)`:
//!
//! ```text
//! trial_seed(master, trial)     = mix(master ^ mix(0x7472_6961 + trial))
//! stream_seed(trial_seed, tag)  = mix(trial_seed ^ (tag * 0x9E3779B97F4A7C15))
//! ```
//!
//! where `mix` is the SplitMix64 finalizer. Parallel execution therefore
//! cannot perturb results: a trial's randomness never depends on scheduling.

use crate::field::Gf;
use crate::field::MODULUS;

#[inline]
fn splitmix64(state: &mut u64) -> u64 {
    *state = state.wrapping_add(0x9E37_79B9_7F4A_7C15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

#[inline]
fn mix(v: u64) -> u64 {
    let mut s = v;
    splitmix64(&mut s)
}

/// Independent randomness streams within one trial.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Stream {
    /// Channel-state indicators and link gains, shared across both phases.
    Channel = 1,
    /// Random-combination coefficients for multicast transmission.
    Coding = 2,
    /// Anything a benchmark scheme needs beyond the channel itself.
    Scheme = 3,
}

/// xoshiro256** generator.
#[derive(Clone, Debug)]
pub struct Rng {
    s: [u64; 4],
}

impl Rng {
    pub fn new(seed: u64) -> Self {
        let mut sm = seed;
        let mut s = [0u64; 4];
        for slot in s.iter_mut() {
            *slot = splitmix64(&mut sm);
        }
        // xoshiro must not start from the all-zero state
        if s.iter().all(|&x| x == 0) {
            s[0] = 0x9E37_79B9_7F4A_7C15;
        }
        Rng { s }
    }

    /// Generator for one trial's stream, per the documented splitting rule.
    pub fn for_trial(master_seed: u64, trial: u64, stream: Stream) -> Self {
        let trial_seed = mix(master_seed ^ mix(0x7472_6961u64.wrapping_add(trial)));
        Rng::new(mix(trial_seed ^ (stream as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15)))
    }

    #[inline]
    pub fn next_u64(&mut self) -> u64 {
        let result = self.s[1].wrapping_mul(5).rotate_left(7).wrapping_mul(9);
        let t = self.s[1] << 17;
        self.s[2] ^= self.s[0];
        self.s[3] ^= self.s[1];
        self.s[1] ^= self.s[2];
        self.s[0] ^= self.s[3];
        self.s[2] ^= t;
        self.s[3] = self.s[3].rotate_left(45);
        result
    }

    /// Uniform integer in `[0, n)`, unbiased (Lemire rejection).
    #[inline]
    pub fn below(&mut self, n: u32) -> u32 {
        assert!(n > 0);
        loop {
            let x = self.next_u64() as u32 as u64;
            let m = x * n as u64;
            let lo = m as u32;
            if lo >= n {
                return (m >> 32) as u32;
            }
            // slow path: lo < n, check threshold
            let t = n.wrapping_neg() % n;
            if lo >= t {
                return (m >> 32) as u32;
            }
        }
    }

    /// Bernoulli(p) draw; p must already be validated into [0, 1].
    #[inline]
    pub fn bernoulli(&mut self, p: f64) -> bool {
        // threshold comparison on 64 bits: exact for p = 0 and p = 1
        let threshold = (p * 18_446_744_073_709_551_616.0) as u128;
        (self.next_u64() as u128) < threshold
    }

    /// Uniform field element, zero included.
    #[inline]
    pub fn field_uniform(&mut self) -> Gf {
        Gf::new(self.below(MODULUS) as u64)
    }

    /// Uniform nonzero field element: the discrete stand-in for a gain drawn
    /// from a continuous distribution.
    #[inline]
    pub fn field_nonzero(&mut self) -> Gf {
        Gf::new(1 + self.below(MODULUS - 1) as u64)
    }
}
