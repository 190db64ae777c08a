//! Deterministic synthetic test series.
//!
//! Random series draw from xoshiro256++ seeded through SplitMix64
//! (`rand_xoshiro::Xoshiro256PlusPlus::seed_from_u64`), whose output is
//! specified bit-exactly and identical on every platform:
//!
//! * uniform: the top 53 bits of one draw, scaled by 2^-53, giving [0, 1)
//! * exponential (scale 1): `-ln(1 - u)`
//! * standard normal: Box–Muller on two uniforms, `sqrt(-2 ln(1 - u1)) *
//!   cos(2 pi u2)`, one normal per pair (the sine partner is discarded)
//! * random walk: starts at 0, steps +1 if the top bit of a draw is set,
//!   else -1
//!
//! The Conway series is the 1-indexed recurrence a(1) = a(2) = 1,
//! a(t) = a(a(t-1)) + a(t - a(t-1)); term a(t) is stored at position t - 1.

use std::f64::consts::TAU;
use std::fmt;
use std::str::FromStr;

use rand_core::{Rng, SeedableRng};
use rand_xoshiro::Xoshiro256PlusPlus;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum GeneratorKind {
    Uniform01,
    StdNormal,
    ExponentialUnit,
    Conway,
    RandomWalk,
}

impl GeneratorKind {
    pub const ALL: [GeneratorKind; 5] = [
        GeneratorKind::Uniform01,
        GeneratorKind::StdNormal,
        GeneratorKind::ExponentialUnit,
        GeneratorKind::Conway,
        GeneratorKind::RandomWalk,
    ];

    pub fn name(self) -> &'static str {
        match self {
            GeneratorKind::Uniform01 => "uniform",
            GeneratorKind::StdNormal => "normal",
            GeneratorKind::ExponentialUnit => "exponential",
            GeneratorKind::Conway => "conway",
            GeneratorKind::RandomWalk => "walk",
        }
    }
}

impl fmt::Display for GeneratorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for GeneratorKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "uniform" => Ok(GeneratorKind::Uniform01),
            "normal" => Ok(GeneratorKind::StdNormal),
            "exponential" => Ok(GeneratorKind::ExponentialUnit),
            "conway" => Ok(GeneratorKind::Conway),
            "walk" | "random-walk" => Ok(GeneratorKind::RandomWalk),
            other => Err(Error::InvalidChoice(format!("unknown generator {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct GeneratorSpec {
    pub kind: GeneratorKind,
    pub length: usize,
    /// Ignored by [`GeneratorKind::Conway`].
    pub seed: u64,
}

impl GeneratorSpec {
    pub fn new(kind: GeneratorKind, length: usize, seed: u64) -> Self {
        Self { kind, length, seed }
    }
}

pub fn generate(spec: &GeneratorSpec) -> Result<Vec<f64>> {
    if spec.length == 0 {
        return Err(Error::EmptyInput);
    }
    let n = spec.length;
    let mut rng = Xoshiro256PlusPlus::seed_from_u64(spec.seed);
    let series = match spec.kind {
        GeneratorKind::Uniform01 => (0..n).map(|_| unit(&mut rng)).collect(),
        GeneratorKind::ExponentialUnit => (0..n).map(|_| -(1.0 - unit(&mut rng)).ln()).collect(),
        GeneratorKind::StdNormal => (0..n)
            .map(|_| {
                let u1 = unit(&mut rng);
                let u2 = unit(&mut rng);
                (-2.0 * (1.0 - u1).ln()).sqrt() * (TAU * u2).cos()
            })
            .collect(),
        GeneratorKind::RandomWalk => {
            let mut level = 0.0;
            let mut out = Vec::with_capacity(n);
            out.push(level);
            for _ in 1..n {
                level += if rng.next_u64() >> 63 == 1 { 1.0 } else { -1.0 };
                out.push(level);
            }
            out
        }
        GeneratorKind::Conway => conway(n).into_iter().map(|v| v as f64).collect(),
    };
    Ok(series)
}

#[inline]
fn unit(rng: &mut Xoshiro256PlusPlus) -> f64 {
    (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// First `n` terms of the Hofstadter–Conway sequence, memoized.
fn conway(n: usize) -> Vec<u64> {
    let mut a = vec![0u64; n.max(2) + 1];
    a[1] = 1;
    a[2] = 1;
    for t in 3..=n {
        let prev = a[t - 1] as usize;
        a[t] = a[prev] + a[t - prev];
    }
    a.truncate(n + 1);
    a.remove(0);
    a
}
