//! Spectral entropy, influence and the entropy/influence verdict.

use serde::{Deserialize, Serialize};

use crate::spectrum::{spectrum_of, Spectrum, TruthTable};
use crate::{Error, Result};

/// Parseval slack accepted before the squared coefficients stop being a
/// probability distribution and the entropy loses its meaning.
const ENTROPY_PARSEVAL_TOL: f64 = 1e-6;

/// Total influence below this is treated as exactly zero (constant function).
pub const CONSTANT_INFLUENCE_TOL: f64 = 1e-12;

/// Slack on the `H <= C·Inf` comparison so a ratio exactly equal to `C`
/// counts as satisfying.
pub const VERDICT_SLACK: f64 = 1e-9;

/// Entropy, influence and FEI verdict for one function under a constant `C`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeiReport {
    pub n: u32,
    pub entropy: f64,
    pub influence_total: f64,
    pub influence_per_coord: Vec<f64>,
    /// `entropy / influence_total`; `None` for constant functions.
    pub ratio: Option<f64>,
    pub constant_c: f64,
    pub satisfies: bool,
}

/// Base-2 Shannon entropy of the distribution `{f̂(S)²}`, with the convention
/// `0·log(1/0) = 0`.
pub fn entropy(spec: &Spectrum) -> Result<f64> {
    let power = spec.power_sum();
    if (power - 1.0).abs() > ENTROPY_PARSEVAL_TOL {
        return Err(Error::InvalidSpectrum(format!(
            "squared coefficients sum to {power}, not 1"
        )));
    }
    let mut h = 0.0;
    for c in spec.coeffs() {
        let p = c * c;
        if p > 0.0 {
            h -= p * p.log2();
        }
    }
    Ok(h)
}

/// `Inf(f) = Σ_S f̂(S)²·|S|`.
pub fn influence_total(spec: &Spectrum) -> f64 {
    spec.coeffs()
        .iter()
        .enumerate()
        .map(|(mask, c)| c * c * mask.count_ones() as f64)
        .sum()
}

/// `Inf_i(f) = Σ_{S: i∈S} f̂(S)²`.
pub fn influence_coord(spec: &Spectrum, i: u32) -> Result<f64> {
    if i >= spec.arity() {
        return Err(Error::Domain(format!(
            "coordinate {i} out of range for n={}",
            spec.arity()
        )));
    }
    Ok(spec
        .coeffs()
        .iter()
        .enumerate()
        .filter(|(mask, _)| mask >> i & 1 == 1)
        .map(|(_, c)| c * c)
        .sum())
}

/// Combinatorial influence `Pr_x[f(x) != f(x with coordinate i flipped)]`,
/// the oracle for [`influence_coord`].
pub fn influence_combinatorial(tt: &TruthTable, i: u32) -> Result<f64> {
    if i >= tt.arity() {
        return Err(Error::Domain(format!(
            "coordinate {i} out of range for n={}",
            tt.arity()
        )));
    }
    let points = tt.num_points();
    let flip = 1usize << i;
    let pivotal = (0..points).filter(|&k| tt.bit(k) != tt.bit(k ^ flip)).count();
    Ok(pivotal as f64 / points as f64)
}

/// Full report for one function. Constant functions satisfy vacuously and
/// carry no ratio.
pub fn fei_report(tt: &TruthTable, c: f64) -> Result<FeiReport> {
    if c <= 0.0 {
        return Err(Error::Domain(format!("constant C must be positive, got {c}")));
    }
    let spec = spectrum_of(tt);
    let h = entropy(&spec)?;
    let per_coord: Vec<f64> = (0..tt.arity())
        .map(|i| influence_coord(&spec, i))
        .collect::<Result<_>>()?;
    let total = influence_total(&spec);
    let ratio = if total <= CONSTANT_INFLUENCE_TOL {
        None
    } else {
        Some(h / total)
    };
    Ok(FeiReport {
        n: tt.arity(),
        entropy: h,
        influence_total: total,
        influence_per_coord: per_coord,
        ratio,
        constant_c: c,
        satisfies: h <= c * total + VERDICT_SLACK,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families::{self, random_function};
    use crate::spectrum::TruthTable;

    fn maj3() -> TruthTable {
        TruthTable::from_fn(3, |k| k.count_ones() >= 2).unwrap()
    }

    /// n=2 function with spectrum (1/2, 1/2, 1/2, -1/2): the OR-type table
    /// with a single -1 value.
    fn or2() -> TruthTable {
        TruthTable::from_fn(2, |k| k == 3).unwrap()
    }

    #[test]
    fn entropy_of_parity_is_zero() {
        let spec = spectrum_of(&families::parity(3, 0b111).unwrap());
        assert_eq!(entropy(&spec).unwrap(), 0.0);
    }

    #[test]
    fn entropy_of_four_quarter_atoms_is_two() {
        for tt in [or2(), maj3()] {
            let h = entropy(&spectrum_of(&tt)).unwrap();
            assert!((h - 2.0).abs() < 1e-12);
        }
    }

    #[test]
    fn entropy_rejects_non_parseval_spectrum() {
        let s = Spectrum::from_coeffs(1, vec![1.0, 1.0]).unwrap();
        assert!(matches!(entropy(&s), Err(Error::InvalidSpectrum(_))));
    }

    #[test]
    fn total_influence_known_values() {
        assert_eq!(
            influence_total(&spectrum_of(&families::parity(3, 0b111).unwrap())),
            3.0
        );
        assert_eq!(influence_total(&spectrum_of(&TruthTable::all_plus(3).unwrap())), 0.0);
        assert!((influence_total(&spectrum_of(&maj3())) - 1.5).abs() < 1e-12);
    }

    #[test]
    fn coordinate_influence_known_values() {
        let dict = spectrum_of(&families::dictator(2, 0).unwrap());
        assert_eq!(influence_coord(&dict, 0).unwrap(), 1.0);
        assert_eq!(influence_coord(&dict, 1).unwrap(), 0.0);
        let maj = spectrum_of(&maj3());
        for i in 0..3 {
            assert!((influence_coord(&maj, i).unwrap() - 0.5).abs() < 1e-12);
        }
        let par = spectrum_of(&families::parity(4, 0b1111).unwrap());
        for i in 0..4 {
            assert!((influence_coord(&par, i).unwrap() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn combinatorial_influence_known_values() {
        let dict = families::dictator(2, 0).unwrap();
        assert_eq!(influence_combinatorial(&dict, 0).unwrap(), 1.0);
        assert_eq!(influence_combinatorial(&TruthTable::all_plus(4).unwrap(), 2).unwrap(), 0.0);
        for i in 0..3 {
            assert_eq!(influence_combinatorial(&maj3(), i).unwrap(), 0.5);
        }
    }

    #[test]
    fn coordinate_out_of_range() {
        let tt = maj3();
        assert!(influence_combinatorial(&tt, 3).is_err());
        assert!(influence_coord(&spectrum_of(&tt), 3).is_err());
    }

    #[test]
    fn spectral_matches_combinatorial_exhaustively_small_n() {
        for n in 1..=3u32 {
            let points = 1usize << n;
            for g in 0u64..1 << points {
                let tt = TruthTable::from_fn(n, |k| g >> k & 1 == 1).unwrap();
                let spec = spectrum_of(&tt);
                for i in 0..n {
                    let a = influence_coord(&spec, i).unwrap();
                    let b = influence_combinatorial(&tt, i).unwrap();
                    assert!((a - b).abs() <= 1e-9, "n={n} g={g} i={i}: {a} vs {b}");
                }
            }
        }
    }

    #[test]
    fn spectral_matches_combinatorial_random_n10() {
        for trial in 0..1000 {
            let tt = random_function(10, 7, trial).unwrap();
            let spec = spectrum_of(&tt);
            for i in 0..10 {
                let a = influence_coord(&spec, i).unwrap();
                let b = influence_combinatorial(&tt, i).unwrap();
                assert!((a - b).abs() <= 1e-9);
            }
        }
    }

    #[test]
    fn report_for_maj3() {
        let r = fei_report(&maj3(), 2.0).unwrap();
        assert!((r.entropy - 2.0).abs() < 1e-12);
        assert!((r.influence_total - 1.5).abs() < 1e-12);
        assert!((r.ratio.unwrap() - 4.0 / 3.0).abs() < 1e-12);
        assert!(r.satisfies);
        let total: f64 = r.influence_per_coord.iter().sum();
        assert!((total - r.influence_total).abs() < 1e-9);
    }

    #[test]
    fn report_boundary_ratio_counts_as_satisfying() {
        let r = fei_report(&or2(), 2.0).unwrap();
        assert!((r.ratio.unwrap() - 2.0).abs() < 1e-12);
        assert!(r.satisfies);
    }

    #[test]
    fn report_for_parity_with_tiny_c() {
        let r = fei_report(&families::parity(4, 0b1111).unwrap(), 0.1).unwrap();
        assert_eq!(r.entropy, 0.0);
        assert!(r.satisfies);
    }

    #[test]
    fn constant_function_ratio_absent() {
        let r = fei_report(&TruthTable::all_plus(3).unwrap(), 2.0).unwrap();
        assert_eq!(r.ratio, None);
        assert!(r.satisfies);
        assert_eq!(r.influence_total, 0.0);
    }

    #[test]
    fn satisfaction_monotone_in_c() {
        for g in 0u64..256 {
            let tt = TruthTable::from_fn(3, |k| g >> k & 1 == 1).unwrap();
            let mut prev = false;
            for c in [0.5, 1.0, 2.0, 4.0] {
                let sat = fei_report(&tt, c).unwrap().satisfies;
                assert!(!prev || sat);
                prev = sat;
            }
        }
    }

    #[test]
    fn report_serializes_ratio_as_null_when_absent() {
        let r = fei_report(&TruthTable::all_plus(2).unwrap(), 2.0).unwrap();
        let json = serde_json::to_string(&r).unwrap();
        assert!(json.contains("\"ratio\":null"));
    }
}
