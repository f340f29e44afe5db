use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use qtate::qalg::Domain;
use qtate::{rat, Algebra, Element, Free, Rational, Scalar};
use std::sync::Arc;

/// Seeded generator of random scalars and algebra elements.
pub struct Sampler {
    rng: ChaCha8Rng,
    precision: i64,
}

impl Sampler {
    pub fn new(seed: u64, precision: i64) -> Self {
        Sampler { rng: ChaCha8Rng::seed_from_u64(seed), precision }
    }

    pub fn rational(&mut self, span: i64) -> Rational {
        let n = self.rng.gen_range(-span..=span);
        let d = self.rng.gen_range(1..=4);
        rat(n, d)
    }

    pub fn radii(&mut self, d: usize) -> Vec<Rational> {
        (0..d).map(|_| self.rational(6)).collect()
    }

    /// A nonzero scalar with at most three terms of t-adic order in `-2..=3`.
    pub fn scalar(&mut self) -> Scalar {
        loop {
            let len = self.rng.gen_range(1..=3);
            let terms: Vec<(i64, Rational)> = (0..len)
                .map(|_| (self.rng.gen_range(-2..=3), rat(self.rng.gen_range(-5..=5), self.rng.gen_range(1..=3))))
                .collect();
            let s = Scalar::from_terms(terms, self.precision);
            if !s.is_zero() {
                return s;
            }
        }
    }

    /// A nonzero element with up to `max_len` terms and exponents in
    /// `0..=max_deg` (polydisc) or `-max_deg..=max_deg` (torus).
    pub fn element(&mut self, alg: &Arc<Algebra>, domain: Domain, max_deg: i64, max_len: usize) -> Element {
        let lo = if domain == Domain::Torus { -max_deg } else { 0 };
        loop {
            let len = self.rng.gen_range(1..=max_len);
            let terms: Vec<(Vec<i64>, Scalar)> = (0..len)
                .map(|_| {
                    let e = (0..alg.dim()).map(|_| self.rng.gen_range(lo..=max_deg)).collect();
                    (e, self.scalar())
                })
                .collect();
            let f = alg.element(terms, domain, None).expect("well-formed terms");
            if !f.is_zero() {
                return f;
            }
        }
    }

    /// A nonzero free-algebra element with words of length at most `max_word`.
    pub fn free(&mut self, letters: usize, max_word: usize, max_len: usize) -> Free {
        loop {
            let len = self.rng.gen_range(1..=max_len);
            let terms: Vec<(Vec<u32>, Scalar)> = (0..len)
                .map(|_| {
                    let wl = self.rng.gen_range(0..=max_word);
                    let w = (0..wl).map(|_| self.rng.gen_range(0..letters as u32)).collect();
                    (w, self.scalar())
                })
                .collect();
            let f = Free::from_terms(letters, terms).expect("letters in range");
            if !f.is_zero() {
                return f;
            }
        }
    }

    pub fn dim(&mut self, max: usize) -> usize {
        self.rng.gen_range(1..=max)
    }
}
