//! Deterministic pseudo-randomness for sampled suites.
//!
//! The generator is SplitMix64 (Steele, Lea & Flood's 64-bit mixing
//! generator, the seeding generator of the xoshiro family). It is chosen
//! for reproducibility: the sampled verification suites must produce
//! identical results for identical seeds across runs, platforms and
//! worker counts. Independent streams are derived per suite by folding an
//! FNV-1a hash of a textual label into the seed.

/// Artifact-wide default seed, recorded verbatim in every sampled report.
pub const DEFAULT_SEED: u64 = 0xC0FFEE;

#[derive(Debug, Clone)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        SplitMix64 { state: seed }
    }

    /// Derives an independent stream for `label`, leaving `self` untouched.
    pub fn fork(&self, label: &str) -> Self {
        let mut h: u64 = 0xcbf29ce484222325;
        for &b in label.as_bytes() {
            h ^= u64::from(b);
            h = h.wrapping_mul(0x100000001b3);
        }
        let mut s = SplitMix64 {
            state: self.state ^ h,
        };
        s.next_u64(); // decorrelate from the raw xor
        s
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9e3779b97f4a7c15);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
        z ^ (z >> 31)
    }

    /// Uniform value in `[0, n)`, unbiased via rejection sampling.
    pub fn below(&mut self, n: u64) -> u64 {
        assert!(n > 0, "below(0)");
        let zone = u64::MAX - u64::MAX % n;
        loop {
            let v = self.next_u64();
            if v < zone {
                return v % n;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deterministic_for_fixed_seed() {
        let mut a = SplitMix64::new(DEFAULT_SEED);
        let mut b = SplitMix64::new(DEFAULT_SEED);
        for _ in 0..100 {
            assert_eq!(a.next_u64(), b.next_u64());
        }
    }

    #[test]
    fn forked_streams_differ_by_label() {
        let root = SplitMix64::new(DEFAULT_SEED);
        let mut a = root.fork("suite-a");
        let mut b = root.fork("suite-b");
        let va: Vec<u64> = (0..8).map(|_| a.next_u64()).collect();
        let vb: Vec<u64> = (0..8).map(|_| b.next_u64()).collect();
        assert_ne!(va, vb);
        // re-forking reproduces the stream
        let mut a2 = root.fork("suite-a");
        let va2: Vec<u64> = (0..8).map(|_| a2.next_u64()).collect();
        assert_eq!(va, va2);
    }

    #[test]
    fn below_stays_in_range_and_hits_everything() {
        let mut r = SplitMix64::new(7);
        let mut seen = [false; 7];
        for _ in 0..1000 {
            let v = r.below(7) as usize;
            seen[v] = true;
        }
        assert!(seen.iter().all(|&s| s));
    }
}
