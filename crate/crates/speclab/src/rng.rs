//! Seeded counter-based random number generator.
//!
//! The generator is the SplitMix64 finalizer applied to an affine counter
//! sequence: output(i) = mix(seed + (i+1) * GOLDEN) where GOLDEN is the
//! 64-bit golden-ratio constant 0x9E3779B97F4A7C15.  The stream is therefore
//! a pure function of (seed, counter), which makes parallel Monte-Carlo
//! trials reproducible: trial t draws from the substream with seed
//! `seed ^ (t * GOLDEN)`.

const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;

/// Counter-based generator; cheap to fork and fully deterministic.
#[derive(Debug, Clone)]
pub struct CounterRng {
    seed: u64,
    counter: u64,
    cached_normal: Option<f64>,
}

impl CounterRng {
    pub fn new(seed: u64) -> Self {
        CounterRng { seed, counter: 0, cached_normal: None }
    }

    /// Substream for Monte-Carlo trial `trial` under master seed `seed`.
    pub fn substream(seed: u64, trial: u64) -> Self {
        CounterRng::new(seed ^ trial.wrapping_mul(GOLDEN))
    }

    pub fn next_u64(&mut self) -> u64 {
        self.counter = self.counter.wrapping_add(1);
        let mut z = self.seed.wrapping_add(self.counter.wrapping_mul(GOLDEN));
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }

    /// Uniform on [0, 1) with 53 bits of precision.
    pub fn uniform(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform on [lo, hi).
    pub fn uniform_in(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.uniform()
    }

    /// Standard normal via the polar (Marsaglia) method.
    pub fn standard_normal(&mut self) -> f64 {
        if let Some(v) = self.cached_normal.take() {
            return v;
        }
        loop {
            let u = 2.0 * self.uniform() - 1.0;
            let v = 2.0 * self.uniform() - 1.0;
            let s = u * u + v * v;
            if s > 0.0 && s < 1.0 {
                let factor = (-2.0 * s.ln() / s).sqrt();
                self.cached_normal = Some(v * factor);
                return u * factor;
            }
        }
    }

    pub fn normal_vec(&mut self, len: usize) -> Vec<f64> {
        (0..len).map(|_| self.standard_normal()).collect()
    }
}

/// Stable 64-bit FNV-1a hash, used to derive per-check substreams from ids.
pub fn stable_hash(s: &str) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in s.as_bytes() {
        h ^= *b as u64;
        h = h.wrapping_mul(0x1000_0000_01b3);
    }
    h
}
