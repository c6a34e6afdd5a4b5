//! Deterministic generators for function families: seeded random tables,
//! symmetric functions, cyclic-invariant functions and the usual named
//! functions (parity, majority, tribes, dictator, constant).
//!
//! All generators are pure: the same parameters give a bit-identical table on
//! every platform and thread schedule. Enumeration orders are fixed so
//! "function #k of family F" is a stable cross-run identifier.

use serde::{Deserialize, Serialize};

use crate::spectrum::TruthTable;
use crate::{check_arity, Error, Result, DEFAULT_ARITY_CAP};

/// Largest arity accepted by [`symmetric_enumerate`] (2^{n+1} functions of
/// 2^n bits each).
pub const SYMMETRIC_ARITY_MAX: u32 = 20;

/// Default budget on the number of functions [`cyclic_invariant_enumerate`]
/// will materialize; `2^20` covers full enumeration up to p = 7.
pub const CYCLIC_ENUMERATION_BUDGET: u128 = 1 << 20;

// ---------------------------------------------------------------------------
// Counter-based SplitMix64
// ---------------------------------------------------------------------------

const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;

/// The SplitMix64 step (Vigna's reference mixing constants and shifts).
#[derive(Debug, Clone, Copy)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(state: u64) -> Self {
        Self { state }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(GOLDEN);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }
}

/// Per-trial stream key: one SplitMix64 advance of `seed XOR trial·golden`.
/// Counter-based keying makes parallel trials order-independent.
pub fn mix(seed: u64, trial: u64) -> u64 {
    SplitMix64::new(seed ^ trial.wrapping_mul(GOLDEN)).next_u64()
}

/// A uniformly random ±1 table: each of the `2^n` sign bits drawn from the
/// SplitMix64 stream keyed by `mix(seed, trial)`.
pub fn random_function(n: u32, seed: u64, trial: u64) -> Result<TruthTable> {
    random_function_with_cap(n, seed, trial, DEFAULT_ARITY_CAP)
}

pub fn random_function_with_cap(n: u32, seed: u64, trial: u64, cap: u32) -> Result<TruthTable> {
    check_arity(n, cap)?;
    let points = 1usize << n;
    let mut rng = SplitMix64::new(mix(seed, trial));
    let mut words: Vec<u64> = (0..points.div_ceil(64)).map(|_| rng.next_u64()).collect();
    if points % 64 != 0 {
        let last = words.last_mut().unwrap();
        *last &= (1u64 << (points % 64)) - 1;
    }
    TruthTable::from_words(n, words, cap)
}

// ---------------------------------------------------------------------------
// Named functions
// ---------------------------------------------------------------------------

/// The character `chi_S`: `f(k) = (-1)^popcount(S & k)`.
pub fn parity(n: u32, mask: usize) -> Result<TruthTable> {
    check_arity(n, DEFAULT_ARITY_CAP)?;
    if mask >= 1 << n {
        return Err(Error::Domain(format!("parity mask {mask} out of range for n={n}")));
    }
    TruthTable::from_fn(n, |k| (mask & k).count_ones() % 2 == 1)
}

/// Majority of an odd number of coordinates (no ties).
pub fn majority(n: u32) -> Result<TruthTable> {
    if n % 2 == 0 {
        return Err(Error::Domain(format!("majority needs odd arity, got {n}")));
    }
    check_arity(n, DEFAULT_ARITY_CAP)?;
    // bit i of k set means x_i = -1, so the majority output is -1 iff more
    // than half the bits are set
    TruthTable::from_fn(n, |k| (k as u64).count_ones() > n / 2)
}

/// Tribes: an OR of `count` disjoint ANDs of `width` coordinates each,
/// `n = width·count`. Logical TRUE is encoded as -1 throughout.
pub fn tribes(width: u32, count: u32) -> Result<TruthTable> {
    if width == 0 || count == 0 {
        return Err(Error::Domain("tribes width and count must be positive".into()));
    }
    let n = width
        .checked_mul(count)
        .ok_or_else(|| Error::Domain("tribes width·count overflows".into()))?;
    check_arity(n, DEFAULT_ARITY_CAP)?;
    let tribe_mask = (1usize << width) - 1;
    TruthTable::from_fn(n, |k| {
        // TRUE=-1 is a set bit, so a tribe fires when its block is all ones
        (0..count).any(|t| k >> (t * width) & tribe_mask == tribe_mask)
    })
}

/// The dictator `f = x_i`.
pub fn dictator(n: u32, index: u32) -> Result<TruthTable> {
    check_arity(n, DEFAULT_ARITY_CAP)?;
    if index >= n {
        return Err(Error::Domain(format!("dictator index {index} out of range for n={n}")));
    }
    TruthTable::from_fn(n, |k| k >> index & 1 == 1)
}

/// A constant function, `sign` ∈ {+1, -1}.
pub fn constant(n: u32, sign: i32) -> Result<TruthTable> {
    match sign {
        1 => TruthTable::all_plus(n),
        -1 => TruthTable::from_fn(n, |_| true),
        _ => Err(Error::Domain(format!("constant sign must be ±1, got {sign}"))),
    }
}

// ---------------------------------------------------------------------------
// Symmetric functions
// ---------------------------------------------------------------------------

/// All `2^{n+1}` symmetric functions of arity `n`, one per assignment of ±1
/// to each Hamming weight, in binary-counter order over the weight vector
/// (bit `w` of the counter set means value -1 at weight `w`).
pub fn symmetric_enumerate(n: u32) -> Result<impl Iterator<Item = TruthTable>> {
    check_arity(n, DEFAULT_ARITY_CAP)?;
    if n > SYMMETRIC_ARITY_MAX {
        return Err(Error::Capacity(format!(
            "symmetric enumeration capped at n={SYMMETRIC_ARITY_MAX}, got {n}"
        )));
    }
    let total = 1u64 << (n + 1);
    Ok((0..total).map(move |weight_vec| {
        TruthTable::from_fn(n, |k| weight_vec >> (k as u64).count_ones() & 1 == 1)
            .expect("arity already checked")
    }))
}

// ---------------------------------------------------------------------------
// Cyclic-invariant functions
// ---------------------------------------------------------------------------

/// Orbit decomposition of the point indices `0..2^p` under cyclic rotation
/// of the `p` coordinates. For prime `p` there are exactly two fixed points
/// (all-zeros and all-ones) and `(2^p - 2)/p` orbits of size `p`.
#[derive(Debug, Clone)]
pub struct CyclicOrbits {
    p: u32,
    /// `orbit_of[k]` is the orbit index of point `k`; orbits are numbered by
    /// ascending minimal representative.
    orbit_of: Vec<u32>,
    orbit_count: u32,
    sizes: Vec<u32>,
}

fn rotate_right(k: usize, p: u32) -> usize {
    (k >> 1) | ((k & 1) << (p - 1))
}

fn is_prime(p: u32) -> bool {
    if p < 2 {
        return false;
    }
    (2..=p / 2).all(|d| p % d != 0)
}

impl CyclicOrbits {
    pub fn new(p: u32) -> Result<Self> {
        if !is_prime(p) {
            return Err(Error::Domain(format!("cyclic-invariant arity {p} is not prime")));
        }
        check_arity(p, DEFAULT_ARITY_CAP)?;
        let points = 1usize << p;
        let mut orbit_of = vec![u32::MAX; points];
        let mut sizes = Vec::new();
        let mut next = 0u32;
        for k in 0..points {
            if orbit_of[k] != u32::MAX {
                continue;
            }
            let mut size = 0u32;
            let mut j = k;
            loop {
                orbit_of[j] = next;
                size += 1;
                j = rotate_right(j, p);
                if j == k {
                    break;
                }
            }
            sizes.push(size);
            next += 1;
        }
        Ok(Self { p, orbit_of, orbit_count: next, sizes })
    }

    pub fn arity(&self) -> u32 {
        self.p
    }

    pub fn orbit_count(&self) -> u32 {
        self.orbit_count
    }

    pub fn orbit_sizes(&self) -> &[u32] {
        &self.sizes
    }

    /// `log2` of the family size; the family has one function per ±1
    /// assignment to orbits.
    pub fn log2_family_size(&self) -> u32 {
        self.orbit_count
    }

    /// Exact family size when it fits in a `u128`.
    pub fn family_size(&self) -> Option<u128> {
        (self.orbit_count < 128).then(|| 1u128 << self.orbit_count)
    }

    /// Function #`index` of the family: orbit `j` gets value -1 iff bit `j`
    /// of `index` is set.
    pub fn function(&self, index: u128) -> TruthTable {
        TruthTable::from_fn(self.p, |k| index >> self.orbit_of[k] & 1 == 1)
            .expect("arity already checked")
    }

    /// Uniformly random member, orbit signs drawn from the same
    /// counter-based stream as [`random_function`].
    pub fn sample(&self, seed: u64, trial: u64) -> TruthTable {
        let mut rng = SplitMix64::new(mix(seed, trial));
        let words = (self.orbit_count as usize).div_ceil(64);
        let signs: Vec<u64> = (0..words).map(|_| rng.next_u64()).collect();
        TruthTable::from_fn(self.p, |k| {
            let o = self.orbit_of[k] as usize;
            signs[o / 64] >> (o % 64) & 1 == 1
        })
        .expect("arity already checked")
    }
}

/// All `2^{(2^p-2)/p + 2}` cyclic-invariant functions for prime `p`, in
/// orbit-counter order. Errors with a capacity hint when the family exceeds
/// `budget`; use [`CyclicOrbits`] directly for count-only or sampling modes.
pub fn cyclic_invariant_enumerate(
    p: u32,
    budget: u128,
) -> Result<impl Iterator<Item = TruthTable>> {
    let orbits = CyclicOrbits::new(p)?;
    let size = orbits.family_size().filter(|&s| s <= budget).ok_or_else(|| {
        Error::Capacity(format!(
            "cyclic family for p={p} has 2^{} members, over the enumeration budget; \
             use count or sample mode",
            orbits.log2_family_size()
        ))
    })?;
    Ok((0..size).map(move |index| orbits.function(index)))
}

// ---------------------------------------------------------------------------
// FamilySpec
// ---------------------------------------------------------------------------

/// A named function with parameters, parsed from strings like
/// `majority,n=9` or `parity,n=4,mask=5`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum NamedFunction {
    Parity { n: u32, mask: usize },
    Majority { n: u32 },
    Tribes { width: u32, count: u32 },
    Dictator { n: u32, index: u32 },
    Constant { n: u32, sign: i32 },
}

impl NamedFunction {
    pub fn build(&self) -> Result<TruthTable> {
        match *self {
            NamedFunction::Parity { n, mask } => parity(n, mask),
            NamedFunction::Majority { n } => majority(n),
            NamedFunction::Tribes { width, count } => tribes(width, count),
            NamedFunction::Dictator { n, index } => dictator(n, index),
            NamedFunction::Constant { n, sign } => constant(n, sign),
        }
    }
}

/// Descriptor selecting a function family, parsed from compact CLI strings:
/// `random:n=10,seed=42`, `symmetric:n=8`, `cyclic:p=5`,
/// `named:majority,n=9`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum FamilySpec {
    Random { n: u32, seed: u64 },
    Symmetric { n: u32 },
    CyclicInvariant { p: u32 },
    Named(NamedFunction),
}

fn parse_params(s: &str) -> Result<Vec<(&str, &str)>> {
    s.split(',')
        .filter(|part| !part.is_empty())
        .map(|part| {
            part.split_once('=')
                .ok_or_else(|| Error::Parse(format!("expected key=value, got {part:?}")))
        })
        .collect()
}

fn take<'a>(params: &[(&'a str, &'a str)], key: &str) -> Result<&'a str> {
    params
        .iter()
        .find(|(k, _)| *k == key)
        .map(|(_, v)| *v)
        .ok_or_else(|| Error::Parse(format!("missing parameter {key:?}")))
}

fn take_num<T: std::str::FromStr>(params: &[(&str, &str)], key: &str) -> Result<T> {
    take(params, key)?
        .parse()
        .map_err(|_| Error::Parse(format!("bad value for {key:?}")))
}

impl std::str::FromStr for FamilySpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (kind, rest) = s
            .split_once(':')
            .ok_or_else(|| Error::Parse(format!("missing ':' in family spec {s:?}")))?;
        match kind {
            "random" => {
                let params = parse_params(rest)?;
                Ok(FamilySpec::Random {
                    n: take_num(&params, "n")?,
                    seed: take_num(&params, "seed")?,
                })
            }
            "symmetric" => {
                let params = parse_params(rest)?;
                Ok(FamilySpec::Symmetric { n: take_num(&params, "n")? })
            }
            "cyclic" => {
                let params = parse_params(rest)?;
                let p = take_num(&params, "p")?;
                if !is_prime(p) {
                    return Err(Error::Domain(format!("cyclic arity {p} is not prime")));
                }
                Ok(FamilySpec::CyclicInvariant { p })
            }
            "named" => {
                let (name, params_str) = rest.split_once(',').unwrap_or((rest, ""));
                let params = parse_params(params_str)?;
                let named = match name {
                    "parity" => NamedFunction::Parity {
                        n: take_num(&params, "n")?,
                        mask: take_num(&params, "mask")?,
                    },
                    "majority" => NamedFunction::Majority { n: take_num(&params, "n")? },
                    "tribes" => NamedFunction::Tribes {
                        width: take_num(&params, "width")?,
                        count: take_num(&params, "count")?,
                    },
                    "dictator" => NamedFunction::Dictator {
                        n: take_num(&params, "n")?,
                        index: take_num(&params, "index")?,
                    },
                    "constant" => NamedFunction::Constant {
                        n: take_num(&params, "n")?,
                        sign: take_num(&params, "sign")?,
                    },
                    other => return Err(Error::Parse(format!("unknown named function {other:?}"))),
                };
                // cheap validity check up front so CLI errors precede work
                named.build()?;
                Ok(FamilySpec::Named(named))
            }
            other => Err(Error::Parse(format!("unknown family kind {other:?}"))),
        }
    }
}

impl std::fmt::Display for FamilySpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            FamilySpec::Random { n, seed } => write!(f, "random:n={n},seed={seed}"),
            FamilySpec::Symmetric { n } => write!(f, "symmetric:n={n}"),
            FamilySpec::CyclicInvariant { p } => write!(f, "cyclic:p={p}"),
            FamilySpec::Named(named) => match *named {
                NamedFunction::Parity { n, mask } => write!(f, "named:parity,n={n},mask={mask}"),
                NamedFunction::Majority { n } => write!(f, "named:majority,n={n}"),
                NamedFunction::Tribes { width, count } => {
                    write!(f, "named:tribes,width={width},count={count}")
                }
                NamedFunction::Dictator { n, index } => {
                    write!(f, "named:dictator,n={n},index={index}")
                }
                NamedFunction::Constant { n, sign } => {
                    write!(f, "named:constant,n={n},sign={sign}")
                }
            },
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashSet;

    // Frozen from the published SplitMix64 reference sequence: seeding the
    // reference algorithm with 0 yields 0xE220A8397B1DCDAF first, which is
    // exactly mix(0, 0); the first stream word after that key is below.
    #[test]
    fn splitmix64_reference_sequence() {
        let mut rng = SplitMix64::new(0);
        assert_eq!(rng.next_u64(), 0xE220_A839_7B1D_CDAF);
        assert_eq!(rng.next_u64(), 0x6E78_9E6A_A1B9_65F4);
        assert_eq!(rng.next_u64(), 0x06C4_5D18_8009_454F);
        assert_eq!(mix(0, 0), 0xE220_A839_7B1D_CDAF);
    }

    #[test]
    fn random_function_first_bits_fixture() {
        let tt = random_function(4, 0, 0).unwrap();
        // first stream word for key mix(0,0) is 0xA706DD2F4D197E6F
        let expected = [1, 1, 1, 1, 0, 1, 1, 0, 0, 1, 1, 1, 1, 1, 1, 0];
        for (k, &bit) in expected.iter().enumerate() {
            assert_eq!(tt.bit(k) as u8, bit, "bit {k}");
        }
    }

    #[test]
    fn random_function_is_deterministic() {
        let a = random_function(10, 42, 17).unwrap();
        let b = random_function(10, 42, 17).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, random_function(10, 42, 18).unwrap());
    }

    #[test]
    fn random_function_is_roughly_unbiased() {
        // per-point frequency over many trials; 10^4 trials keeps the test
        // quick and still pins a ±0.02 band at 4 sigma
        let trials = 10_000u64;
        let mut counts = [0u32; 256];
        for t in 0..trials {
            let tt = random_function(8, 99, t).unwrap();
            for (k, c) in counts.iter_mut().enumerate() {
                *c += tt.bit(k) as u32;
            }
        }
        for &c in &counts {
            let freq = c as f64 / trials as f64;
            assert!((freq - 0.5).abs() < 0.02, "per-point frequency {freq}");
        }
    }

    #[test]
    fn symmetric_counts_and_uniqueness() {
        for n in 1..=6u32 {
            let all: Vec<_> = symmetric_enumerate(n).unwrap().collect();
            assert_eq!(all.len(), 1 << (n + 1));
            let distinct: HashSet<_> = all.iter().cloned().collect();
            assert_eq!(distinct.len(), all.len());
        }
    }

    #[test]
    fn symmetric_functions_are_symmetric() {
        // invariant under any transposition of coordinates
        for tt in symmetric_enumerate(4).unwrap() {
            for k in 0..tt.num_points() {
                for i in 0..4 {
                    for j in i + 1..4 {
                        let bi = k >> i & 1;
                        let bj = k >> j & 1;
                        let swapped = k & !(1 << i) & !(1 << j) | (bj << i) | (bi << j);
                        assert_eq!(tt.bit(k), tt.bit(swapped));
                    }
                }
            }
        }
    }

    #[test]
    fn n1_symmetric_family_is_everything() {
        let all: HashSet<_> = symmetric_enumerate(1).unwrap().collect();
        assert_eq!(all.len(), 4);
    }

    #[test]
    fn cyclic_orbit_structure() {
        for p in [3u32, 5, 7, 11, 13] {
            let orbits = CyclicOrbits::new(p).unwrap();
            let expected = 2 + ((1u64 << p) - 2) / p as u64;
            assert_eq!(orbits.orbit_count() as u64, expected);
            let singles = orbits.orbit_sizes().iter().filter(|&&s| s == 1).count();
            assert_eq!(singles, 2);
            assert!(orbits.orbit_sizes().iter().all(|&s| s == 1 || s == p));
        }
    }

    #[test]
    fn cyclic_family_sizes() {
        assert_eq!(CyclicOrbits::new(3).unwrap().family_size(), Some(16));
        assert_eq!(CyclicOrbits::new(5).unwrap().family_size(), Some(256));
        assert_eq!(CyclicOrbits::new(7).unwrap().family_size(), Some(1 << 20));
        // p=13 gives 2^632, exact size no longer representable
        let big = CyclicOrbits::new(13).unwrap();
        assert_eq!(big.log2_family_size(), 632);
        assert_eq!(big.family_size(), None);
    }

    #[test]
    fn cyclic_enumerate_counts_and_invariance() {
        for p in [3u32, 5] {
            let all: Vec<_> = cyclic_invariant_enumerate(p, CYCLIC_ENUMERATION_BUDGET)
                .unwrap()
                .collect();
            assert_eq!(all.len(), 1 << (2 + ((1usize << p) - 2) / p as usize));
            let distinct: HashSet<_> = all.iter().cloned().collect();
            assert_eq!(distinct.len(), all.len());
            for tt in &all {
                for k in 0..tt.num_points() {
                    assert_eq!(tt.bit(k), tt.bit(rotate_right(k, p)));
                }
            }
        }
    }

    #[test]
    fn cyclic_rejects_composite_and_over_budget() {
        assert!(matches!(CyclicOrbits::new(4), Err(Error::Domain(_))));
        assert!(matches!(CyclicOrbits::new(9), Err(Error::Domain(_))));
        assert!(matches!(
            cyclic_invariant_enumerate(11, CYCLIC_ENUMERATION_BUDGET).map(|_| ()),
            Err(Error::Capacity(_))
        ));
    }

    #[test]
    fn cyclic_sample_is_invariant_and_deterministic() {
        let orbits = CyclicOrbits::new(11).unwrap();
        for t in 0..20 {
            let tt = orbits.sample(5, t);
            assert_eq!(tt, orbits.sample(5, t));
            for k in 0..tt.num_points() {
                assert_eq!(tt.bit(k), tt.bit(rotate_right(k, 11)));
            }
        }
    }

    #[test]
    fn parity_equals_pointwise_product() {
        let tt = parity(3, 0b011).unwrap();
        for k in 0..8usize {
            let x1 = if k & 1 == 1 { -1.0 } else { 1.0 };
            let x2 = if k >> 1 & 1 == 1 { -1.0 } else { 1.0 };
            assert_eq!(tt.value(k), x1 * x2);
        }
    }

    #[test]
    fn majority_matches_sign_of_sum() {
        let tt = majority(5).unwrap();
        for k in 0..32usize {
            let sum: i32 = (0..5).map(|i| if k >> i & 1 == 1 { -1 } else { 1 }).sum();
            assert_eq!(tt.value(k), if sum > 0 { 1.0 } else { -1.0 });
        }
        assert!(majority(4).is_err());
    }

    #[test]
    fn tribes_fires_when_any_block_is_all_true() {
        let tt = tribes(2, 3).unwrap();
        assert_eq!(tt.arity(), 6);
        // TRUE is -1, i.e. set bits; block {0,1} all true at k=0b000011
        assert!(tt.bit(0b000011));
        assert!(tt.bit(0b110000));
        assert!(!tt.bit(0b010101));
        assert!(!tt.bit(0));
    }

    #[test]
    fn family_spec_parsing() {
        assert_eq!(
            "random:n=10,seed=42".parse::<FamilySpec>().unwrap(),
            FamilySpec::Random { n: 10, seed: 42 }
        );
        assert_eq!(
            "symmetric:n=8".parse::<FamilySpec>().unwrap(),
            FamilySpec::Symmetric { n: 8 }
        );
        assert_eq!(
            "cyclic:p=5".parse::<FamilySpec>().unwrap(),
            FamilySpec::CyclicInvariant { p: 5 }
        );
        assert_eq!(
            "named:majority,n=9".parse::<FamilySpec>().unwrap(),
            FamilySpec::Named(NamedFunction::Majority { n: 9 })
        );
        assert_eq!(
            "named:tribes,width=2,count=3".parse::<FamilySpec>().unwrap(),
            FamilySpec::Named(NamedFunction::Tribes { width: 2, count: 3 })
        );
        for bad in [
            "random:n=10",
            "cyclic:p=4",
            "named:frobnicate,n=3",
            "symmetric",
            "named:majority,n=4",
        ] {
            assert!(bad.parse::<FamilySpec>().is_err(), "{bad}");
        }
        // round trip through Display
        for s in ["random:n=10,seed=42", "symmetric:n=8", "cyclic:p=5", "named:majority,n=9"] {
            assert_eq!(s.parse::<FamilySpec>().unwrap().to_string(), s);
        }
    }
}
