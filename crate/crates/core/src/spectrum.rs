//! Packed truth tables and the Fourier-Walsh transform.
//!
//! Point encoding is fixed across the crate: bit `i` of a point index `k`
//! equals 1 iff coordinate `x_i = -1`, so index 0 is the all-`+1` point and
//! flipping coordinate `i` is `k ^ (1 << i)`. The character is
//! `chi_S(k) = (-1)^popcount(S & k)`.

use crate::{check_arity, Error, Result, DEFAULT_ARITY_CAP};

/// Tolerance for Parseval when a spectrum is produced from a truth table.
pub const PARSEVAL_TOL: f64 = 1e-9;

/// Tolerance on reconstructed values when converting a spectrum back to a
/// truth table: every value must be within this of ±1.
pub const RECONSTRUCT_TOL: f64 = 1e-6;

/// A boolean function `f : {-1,1}^n -> {-1,1}` as `2^n` packed sign bits.
/// A set bit at point index `k` means `f(k) = -1`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct TruthTable {
    n: u32,
    bits: Vec<u64>,
}

impl TruthTable {
    /// Builds a table from a predicate returning `true` where `f(k) = -1`.
    pub fn from_fn(n: u32, mut is_negative: impl FnMut(usize) -> bool) -> Result<Self> {
        Self::from_fn_with_cap(n, DEFAULT_ARITY_CAP, &mut is_negative)
    }

    /// Same as [`TruthTable::from_fn`] with an explicit arity cap.
    pub fn from_fn_with_cap(
        n: u32,
        cap: u32,
        is_negative: &mut dyn FnMut(usize) -> bool,
    ) -> Result<Self> {
        check_arity(n, cap)?;
        let points = 1usize << n;
        let mut bits = vec![0u64; points.div_ceil(64)];
        for k in 0..points {
            if is_negative(k) {
                bits[k / 64] |= 1 << (k % 64);
            }
        }
        Ok(Self { n, bits })
    }

    /// Builds a table directly from packed words (little-endian by point
    /// index). Trailing bits beyond `2^n` must be zero.
    pub fn from_words(n: u32, bits: Vec<u64>, cap: u32) -> Result<Self> {
        check_arity(n, cap)?;
        let points = 1usize << n;
        if bits.len() != points.div_ceil(64) {
            return Err(Error::Domain(format!(
                "expected {} words for n={n}, got {}",
                points.div_ceil(64),
                bits.len()
            )));
        }
        if points % 64 != 0 && bits[points / 64] >> (points % 64) != 0 {
            return Err(Error::Domain("nonzero bits past 2^n".into()));
        }
        Ok(Self { n, bits })
    }

    /// The constant function `f == 1` (all bits clear).
    pub fn all_plus(n: u32) -> Result<Self> {
        Self::from_fn(n, |_| false)
    }

    pub fn arity(&self) -> u32 {
        self.n
    }

    /// Number of points, `2^n`.
    pub fn num_points(&self) -> usize {
        1 << self.n
    }

    /// `true` iff `f(k) = -1`.
    pub fn bit(&self, k: usize) -> bool {
        debug_assert!(k < self.num_points());
        self.bits[k / 64] >> (k % 64) & 1 == 1
    }

    /// `f(k)` as ±1.
    pub fn value(&self, k: usize) -> f64 {
        if self.bit(k) {
            -1.0
        } else {
            1.0
        }
    }

    pub fn words(&self) -> &[u64] {
        &self.bits
    }

    /// Serializes as `n=<arity>:<hex>`, hex digits little-endian by point
    /// index (digit `d` covers points `4d..4d+4`, most significant digit
    /// last).
    pub fn to_hex(&self) -> String {
        let digits = self.num_points().div_ceil(4);
        let mut s = format!("n={}:", self.n);
        for d in 0..digits {
            let nibble = (self.bits[d / 16] >> (4 * (d % 16))) & 0xf;
            s.push(char::from_digit(nibble as u32, 16).unwrap());
        }
        s
    }

    /// Parses the [`TruthTable::to_hex`] format.
    pub fn from_hex(s: &str) -> Result<Self> {
        Self::from_hex_with_cap(s, DEFAULT_ARITY_CAP)
    }

    pub fn from_hex_with_cap(s: &str, cap: u32) -> Result<Self> {
        let rest = s
            .strip_prefix("n=")
            .ok_or_else(|| Error::Parse(format!("missing n= prefix in {s:?}")))?;
        let (arity, hex) = rest
            .split_once(':')
            .ok_or_else(|| Error::Parse(format!("missing ':' in {s:?}")))?;
        let n: u32 = arity
            .parse()
            .map_err(|_| Error::Parse(format!("bad arity {arity:?}")))?;
        check_arity(n, cap)?;
        let points = 1usize << n;
        let digits = points.div_ceil(4);
        if hex.len() != digits {
            return Err(Error::Parse(format!(
                "expected {digits} hex digits for n={n}, got {}",
                hex.len()
            )));
        }
        let mut bits = vec![0u64; points.div_ceil(64)];
        for (d, c) in hex.chars().enumerate() {
            let nibble = c
                .to_digit(16)
                .ok_or_else(|| Error::Parse(format!("bad hex digit {c:?}")))? as u64;
            bits[d / 16] |= nibble << (4 * (d % 16));
        }
        if points % 64 != 0 && bits[points / 64] >> (points % 64) != 0 {
            return Err(Error::Parse("nonzero bits past 2^n".into()));
        }
        Ok(Self { n, bits })
    }
}

/// The `2^n` Fourier coefficients of a function, indexed by subset bitmask.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    n: u32,
    coeffs: Vec<f64>,
}

impl Spectrum {
    /// Wraps raw coefficients. Length must be exactly `2^n`.
    pub fn from_coeffs(n: u32, coeffs: Vec<f64>) -> Result<Self> {
        check_arity(n, DEFAULT_ARITY_CAP)?;
        if coeffs.len() != 1 << n {
            return Err(Error::Domain(format!(
                "expected {} coefficients for n={n}, got {}",
                1usize << n,
                coeffs.len()
            )));
        }
        Ok(Self { n, coeffs })
    }

    pub fn arity(&self) -> u32 {
        self.n
    }

    /// `f̂(S)` for subset mask `S`.
    pub fn coeff(&self, mask: usize) -> f64 {
        self.coeffs[mask]
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    /// `Σ_S f̂(S)²`; 1 for a ±1-valued function.
    pub fn power_sum(&self) -> f64 {
        self.coeffs.iter().map(|c| c * c).sum()
    }

    /// CSV export, one `mask,coefficient` row per subset.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("mask,coefficient\n");
        for (mask, c) in self.coeffs.iter().enumerate() {
            out.push_str(&format!("{mask},{c}\n"));
        }
        out
    }
}

/// In-place radix-2 Walsh-Hadamard butterfly, unnormalized.
fn fwht(values: &mut [f64]) {
    let len = values.len();
    let mut dist = 1;
    while dist < len {
        for block in (0..len).step_by(dist * 2) {
            for i in block..block + dist {
                let a = values[i];
                let b = values[i + dist];
                values[i] = a + b;
                values[i + dist] = a - b;
            }
        }
        dist *= 2;
    }
}

/// Full Fourier transform of a truth table, `O(n·2^n)`.
///
/// `coeffs[S] = 2^{-n} Σ_k f(k)·chi_S(k)`. The transform runs on the raw ±1
/// values and scales once by `2^{-n}` at the end.
pub fn spectrum_of(tt: &TruthTable) -> Spectrum {
    let points = tt.num_points();
    let mut values: Vec<f64> = (0..points).map(|k| tt.value(k)).collect();
    fwht(&mut values);
    let scale = 1.0 / points as f64;
    for v in &mut values {
        *v *= scale;
    }
    Spectrum {
        n: tt.arity(),
        coeffs: values,
    }
}

/// Direct `O(2^n)` evaluation of a single coefficient, the differential-test
/// oracle for [`spectrum_of`].
pub fn coefficient_naive(tt: &TruthTable, mask: usize) -> Result<f64> {
    let points = tt.num_points();
    if mask >= points {
        return Err(Error::Domain(format!(
            "mask {mask} out of range for n={}",
            tt.arity()
        )));
    }
    let mut sum = 0.0;
    for k in 0..points {
        let chi = if (mask & k).count_ones() % 2 == 0 {
            1.0
        } else {
            -1.0
        };
        sum += tt.value(k) * chi;
    }
    Ok(sum / points as f64)
}

/// Inverse transform followed by sign extraction. Fails with
/// [`Error::NotBoolean`] unless every reconstructed value is within
/// [`RECONSTRUCT_TOL`] of ±1.
pub fn truth_table_of(spec: &Spectrum) -> Result<TruthTable> {
    let mut values = spec.coeffs.clone();
    fwht(&mut values);
    for (k, v) in values.iter().enumerate() {
        if (v.abs() - 1.0).abs() > RECONSTRUCT_TOL {
            return Err(Error::NotBoolean(format!(
                "reconstructed value {v} at point {k} is not ±1"
            )));
        }
    }
    TruthTable::from_fn(spec.n, |k| values[k] < 0.0)
}
