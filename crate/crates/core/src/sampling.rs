//! Deterministic random streams and dyadic point sampling.
//!
//! Every stochastic routine derives its generator from a global seed and a
//! list of integer tags (trial index, vertex, attempt, ...). Results thus do
//! not depend on how work is split across threads.

use num_bigint::BigInt;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::framework::DomainSpec;
use crate::poly::{parse_rat, rat, rat_to_string, Point, PolyError, Rat};

pub type StreamRng = ChaCha8Rng;

fn splitmix(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    x = (x ^ (x >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    x ^ (x >> 31)
}

/// Independent generator for `(seed, tags...)`.
pub fn rng_stream(seed: u64, tags: &[u64]) -> StreamRng {
    let mut state = splitmix(seed);
    for (i, &t) in tags.iter().enumerate() {
        state = splitmix(state ^ splitmix(t.wrapping_add((i as u64 + 1) << 56)));
    }
    let mut bytes = [0u8; 32];
    for (i, chunk) in bytes.chunks_mut(8).enumerate() {
        state = splitmix(state.wrapping_add(i as u64));
        chunk.copy_from_slice(&state.to_le_bytes());
    }
    ChaCha8Rng::from_seed(bytes)
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SamplingError {
    #[error("box is empty or degenerate in coordinate {0}")]
    DegenerateBox(usize),
    #[error("box has {got} coordinates, expected {expected}")]
    BoxDimension { expected: usize, got: usize },
    #[error("no point of the box landed in the domain after {0} attempts")]
    RetriesExhausted(usize),
    #[error("cannot parse box {0:?}; expected lo:hi or a comma-separated list of lo:hi")]
    Parse(String),
    #[error(transparent)]
    Poly(#[from] PolyError),
}

/// Axis-aligned box with rational bounds, `lo[i] < hi[i]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SampleBox {
    pub lo: Vec<Rat>,
    pub hi: Vec<Rat>,
}

impl SampleBox {
    pub fn new(lo: Vec<Rat>, hi: Vec<Rat>) -> Result<Self, SamplingError> {
        if lo.len() != hi.len() {
            return Err(SamplingError::BoxDimension {
                expected: lo.len(),
                got: hi.len(),
            });
        }
        if let Some(i) = lo.iter().zip(&hi).position(|(l, h)| l >= h) {
            return Err(SamplingError::DegenerateBox(i));
        }
        Ok(SampleBox { lo, hi })
    }

    pub fn cube(dim: usize, lo: Rat, hi: Rat) -> Result<Self, SamplingError> {
        Self::new(vec![lo; dim], vec![hi; dim])
    }

    pub fn cube_int(dim: usize, lo: i64, hi: i64) -> Result<Self, SamplingError> {
        Self::cube(dim, rat(lo), rat(hi))
    }

    pub fn dim(&self) -> usize {
        self.lo.len()
    }

    /// Parses `lo:hi` (replicated to `dim` coordinates) or one `lo:hi` per
    /// coordinate separated by commas. Bounds are rationals like `-3/2`.
    pub fn parse(s: &str, dim: usize) -> Result<Self, SamplingError> {
        let err = || SamplingError::Parse(s.to_string());
        let parts: Vec<&str> = s.split(',').map(str::trim).collect();
        let mut lo = Vec::new();
        let mut hi = Vec::new();
        for p in &parts {
            let (l, h) = p.split_once(':').ok_or_else(err)?;
            lo.push(parse_rat(l).map_err(|_| err())?);
            hi.push(parse_rat(h).map_err(|_| err())?);
        }
        if parts.len() == 1 {
            lo = vec![lo[0].clone(); dim];
            hi = vec![hi[0].clone(); dim];
        } else if parts.len() != dim {
            return Err(SamplingError::BoxDimension {
                expected: dim,
                got: parts.len(),
            });
        }
        Self::new(lo, hi)
    }

    pub fn render(&self) -> String {
        self.lo
            .iter()
            .zip(&self.hi)
            .map(|(l, h)| format!("{}:{}", rat_to_string(l), rat_to_string(h)))
            .collect::<Vec<_>>()
            .join(",")
    }

    /// Uniform dyadic point `lo + (hi - lo) * k / 2^bits` with `k` in `0..=2^bits`.
    pub fn sample<R: Rng>(&self, rng: &mut R, bits: u32) -> Point {
        let scale = BigInt::one() << bits as usize;
        self.lo
            .iter()
            .zip(&self.hi)
            .map(|(l, h)| {
                let k: u64 = rng.gen_range(0..=(1u64 << bits));
                l + (h - l) * Rat::new(BigInt::from(k), scale.clone())
            })
            .collect()
    }
}

impl Serialize for SampleBox {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.render())
    }
}

impl<'de> Deserialize<'de> for SampleBox {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        let dim = s.split(',').count();
        SampleBox::parse(&s, dim).map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SamplingOptions {
    /// Denominator exponent of sampled dyadic coordinates.
    pub bits: u32,
    pub max_retries: usize,
}

impl Default for SamplingOptions {
    fn default() -> Self {
        SamplingOptions {
            bits: 16,
            max_retries: 10_000,
        }
    }
}

/// Rejection-samples a dyadic point of `bx` lying in the domain.
pub fn random_point<R: Rng>(
    domain: &DomainSpec,
    rng: &mut R,
    bx: &SampleBox,
    opts: SamplingOptions,
) -> Result<Point, SamplingError> {
    if bx.dim() != domain.d {
        return Err(SamplingError::BoxDimension {
            expected: domain.d,
            got: bx.dim(),
        });
    }
    for _ in 0..opts.max_retries {
        let p = bx.sample(rng, opts.bits);
        if domain.contains(&p)? {
            return Ok(p);
        }
    }
    Err(SamplingError::RetriesExhausted(opts.max_retries))
}

/// A random direction with small dyadic entries, never the zero vector.
pub fn random_direction<R: Rng>(rng: &mut R, dim: usize) -> Vec<Rat> {
    loop {
        let v: Vec<Rat> = (0..dim)
            .map(|_| Rat::new(BigInt::from(rng.gen_range(-64i64..=64)), BigInt::from(64)))
            .collect();
        if v.iter().any(|x| !x.is_zero()) {
            return v;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::ratio;
    use rand::RngCore;

    #[test]
    fn streams_are_reproducible_and_distinct() {
        let a: Vec<u64> = (0..4).map(|_| rng_stream(7, &[1, 2]).next_u64()).collect();
        assert!(a.windows(2).all(|w| w[0] == w[1]));
        assert_ne!(rng_stream(7, &[1, 2]).next_u64(), rng_stream(7, &[2, 1]).next_u64());
        assert_ne!(rng_stream(7, &[1]).next_u64(), rng_stream(8, &[1]).next_u64());
        assert_ne!(rng_stream(7, &[]).next_u64(), rng_stream(7, &[0]).next_u64());
    }

    #[test]
    fn box_parse_and_render() {
        let b = SampleBox::parse("-1:1", 3).unwrap();
        assert_eq!(b.dim(), 3);
        let c = SampleBox::parse("-1/2:3, 0:1", 2).unwrap();
        assert_eq!(c.lo, vec![ratio(-1, 2), rat(0)]);
        assert_eq!(SampleBox::parse(&c.render(), 2).unwrap(), c);
        assert!(SampleBox::parse("1:1", 1).is_err());
        assert!(SampleBox::parse("0:1,0:1", 3).is_err());
        assert!(SampleBox::parse("0..1", 1).is_err());
    }

    #[test]
    fn samples_stay_in_box() {
        let b = SampleBox::parse("-3/2:5/7", 4).unwrap();
        let mut rng = rng_stream(1, &[]);
        for _ in 0..200 {
            let p = b.sample(&mut rng, 10);
            for (i, x) in p.iter().enumerate() {
                assert!(x >= &b.lo[i] && x <= &b.hi[i]);
            }
        }
    }
}
