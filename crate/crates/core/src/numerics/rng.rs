use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

/// Seeded pseudo-random source.
///
/// Backed by ChaCha8 (`rand_chacha`), a fixed, portable stream cipher: the
/// same 64-bit seed yields the same draw sequence on every platform. One `Rng`
/// value is owned by exactly one run; it is never shared across threads.
#[derive(Clone, Debug)]
pub struct Rng {
    seed: u64,
    inner: ChaCha8Rng,
}

impl Rng {
    pub fn new(seed: u64) -> Self {
        Self { seed, inner: ChaCha8Rng::seed_from_u64(seed) }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Derives an independent child generator. Children with distinct tags get
    /// unrelated streams (SplitMix64 finalizer over seed and tag).
    pub fn derive(&self, tag: u64) -> Rng {
        Rng::new(mix64(self.seed ^ mix64(tag ^ 0x9E37_79B9_7F4A_7C15)))
    }

    pub fn next_u64(&mut self) -> u64 {
        self.inner.next_u64()
    }

    /// Uniform in [0, 1) with 53 random bits.
    pub fn uniform(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform integer in [0, n). Unbiased via rejection sampling.
    pub fn below(&mut self, n: usize) -> usize {
        assert!(n > 0, "below(0) is undefined");
        let n = n as u64;
        let cap = (u64::MAX / n) * n;
        loop {
            let x = self.next_u64();
            if x < cap {
                return (x % n) as usize;
            }
        }
    }

    /// Standard normal draw (ziggurat from `rand_distr`).
    pub fn normal(&mut self) -> f64 {
        StandardNormal.sample(&mut self.inner)
    }

    pub fn fill_normal(&mut self, out: &mut [f64]) {
        for x in out.iter_mut() {
            *x = self.normal();
        }
    }

    /// Random point on the Euclidean unit sphere.
    pub fn unit_vector(&mut self, n: usize) -> Vec<f64> {
        assert!(n > 0);
        loop {
            let mut v: Vec<f64> = (0..n).map(|_| self.normal()).collect();
            let norm = super::dot(&v, &v).sqrt();
            if norm > 1e-30 {
                for x in &mut v {
                    *x /= norm;
                }
                return v;
            }
        }
    }
}

/// SplitMix64 finalizer.
fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}
