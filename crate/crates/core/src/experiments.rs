//! Quantitative experiments over function families: exact moments of the
//! influence of a uniformly random function by exhaustive enumeration,
//! enumerated fourth moments of Fourier coefficients, seeded Monte-Carlo
//! estimation at larger arity, the matching Chebyshev tail bounds, and
//! extremal entropy/influence-ratio scans over enumerable families.

use std::collections::BTreeMap;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::families::{
    cyclic_invariant_enumerate, symmetric_enumerate, FamilySpec, CYCLIC_ENUMERATION_BUDGET,
};
use crate::measures::{fei_report, CONSTANT_INFLUENCE_TOL, VERDICT_SLACK};
use crate::spectrum::TruthTable;
use crate::{check_arity, Error, Result, DEFAULT_ARITY_CAP};

/// Largest arity for which every one of the `2^{2^n}` functions is
/// enumerated. `n = 5` would mean 4.3e9 functions.
pub const EXHAUSTIVE_ARITY_MAX: u32 = 4;

/// Histogram of FEI ratios with fixed-width bins over `[0, n]`; ratios past
/// the last edge are clamped into the final bin.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RatioHistogram {
    pub bin_width: f64,
    pub counts: Vec<u64>,
}

impl RatioHistogram {
    fn new(n: u32) -> Self {
        let bins = (n as f64 / 0.1).ceil() as usize;
        Self { bin_width: 0.1, counts: vec![0; bins.max(1)] }
    }

    fn record(&mut self, ratio: f64) {
        let bin = ((ratio / self.bin_width) as usize).min(self.counts.len() - 1);
        self.counts[bin] += 1;
    }

    /// CSV export with `bin_low,bin_high,count` rows.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("bin_low,bin_high,count\n");
        for (i, c) in self.counts.iter().enumerate() {
            let lo = i as f64 * self.bin_width;
            let hi = lo + self.bin_width;
            out.push_str(&format!("{lo:.1},{hi:.1},{c}\n"));
        }
        out
    }
}

/// One experiment run: parameters, aggregate statistics and the matching
/// theoretical bounds, serialized as a single JSON document.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentRecord {
    pub experiment: String,
    pub version: String,
    pub n: u32,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub trials: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub delta: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub family: Option<String>,
    pub stats: BTreeMap<String, f64>,
    pub bounds: BTreeMap<String, f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub histogram: Option<RatioHistogram>,
    pub runtime_ms: u64,
}

impl ExperimentRecord {
    fn new(experiment: &str, n: u32) -> Self {
        Self {
            experiment: experiment.into(),
            version: env!("CARGO_PKG_VERSION").into(),
            n,
            seed: None,
            trials: None,
            epsilon: None,
            delta: None,
            family: None,
            stats: BTreeMap::new(),
            bounds: BTreeMap::new(),
            histogram: None,
            runtime_ms: 0,
        }
    }
}

/// `Pr[H_r > (2+2ε)·I_r] <= 4(1 + 1/ε)² / (2^{n+1}·n)`, reported uncapped
/// (above 1 the bound is vacuous).
pub fn chebyshev_bound(n: u32, epsilon: f64) -> Result<f64> {
    if n < 1 {
        return Err(Error::Domain("n must be at least 1".into()));
    }
    if epsilon <= 0.0 {
        return Err(Error::Domain(format!("epsilon must be positive, got {epsilon}")));
    }
    let t = 1.0 + 1.0 / epsilon;
    Ok(4.0 * t * t / (2f64.powi(n as i32 + 1) * n as f64))
}

/// The guaranteed fraction of functions satisfying the conjecture with
/// `C = 2 + δ`: `1 - 4(1 + 2/δ)² / (2^{n+1}·n)`. Equals
/// `1 - chebyshev_bound(n, δ/2)` exactly; may go negative (vacuous).
pub fn fraction_bound(n: u32, delta: f64) -> Result<f64> {
    if delta <= 0.0 {
        return Err(Error::Domain(format!("delta must be positive, got {delta}")));
    }
    Ok(1.0 - chebyshev_bound(n, delta / 2.0)?)
}

/// Fixed-order pairwise summation, independent of how the values were
/// produced, so parallel runs reduce identically.
fn pairwise_sum(values: &[f64]) -> f64 {
    match values.len() {
        0 => 0.0,
        1 => values[0],
        len => {
            let (a, b) = values.split_at(len / 2);
            pairwise_sum(a) + pairwise_sum(b)
        }
    }
}

/// In-place unnormalized butterfly over a value buffer; the exhaustive loops
/// reuse one buffer per worker instead of allocating a `Spectrum` each time.
fn fwht_values(values: &mut [f64]) {
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

fn influence_entropy_of_values(values: &mut [f64]) -> (f64, f64) {
    fwht_values(values);
    let scale = 1.0 / values.len() as f64;
    let mut inf = 0.0;
    let mut ent = 0.0;
    for (mask, v) in values.iter().enumerate() {
        let c = v * scale;
        let p = c * c;
        inf += p * mask.count_ones() as f64;
        if p > 0.0 {
            ent -= p * p.log2();
        }
    }
    (inf, ent)
}

/// Exact influence moments, extremal ratio and FEI-violation count over all
/// `2^{2^n}` functions of arity `n <= 4`, under the uniform distribution.
pub fn exhaustive_stats(n: u32, epsilon: f64) -> Result<ExperimentRecord> {
    check_arity(n, DEFAULT_ARITY_CAP)?;
    if n > EXHAUSTIVE_ARITY_MAX {
        return Err(Error::Capacity(format!(
            "exhaustive enumeration capped at n={EXHAUSTIVE_ARITY_MAX}; use monte_carlo for n={n}"
        )));
    }
    if epsilon <= 0.0 {
        return Err(Error::Domain(format!("epsilon must be positive, got {epsilon}")));
    }
    let start = Instant::now();
    let points = 1usize << n;
    let total = 1u64 << points;
    let c = 2.0 + 2.0 * epsilon;

    let mut sum_inf = 0.0;
    let mut sum_inf_sq = 0.0;
    let mut sum_ent = 0.0;
    let mut violations = 0u64;
    let mut max_ratio = f64::NEG_INFINITY;
    let mut argmax = 0u64;
    let mut values = vec![0.0f64; points];
    for g in 0..total {
        for (k, v) in values.iter_mut().enumerate() {
            *v = if g >> k & 1 == 1 { -1.0 } else { 1.0 };
        }
        let (inf, ent) = influence_entropy_of_values(&mut values);
        sum_inf += inf;
        sum_inf_sq += inf * inf;
        sum_ent += ent;
        if ent > c * inf + VERDICT_SLACK {
            violations += 1;
        }
        if inf > CONSTANT_INFLUENCE_TOL {
            let ratio = ent / inf;
            if ratio > max_ratio {
                max_ratio = ratio;
                argmax = g;
            }
        }
    }

    let count = total as f64;
    let mean = sum_inf / count;
    let mean_sq = sum_inf_sq / count;
    let mut rec = ExperimentRecord::new("exhaustive", n);
    rec.epsilon = Some(epsilon);
    rec.stats.insert("mean_influence".into(), mean);
    rec.stats.insert("mean_sq_influence".into(), mean_sq);
    rec.stats.insert("var_influence".into(), mean_sq - mean * mean);
    rec.stats.insert("mean_entropy".into(), sum_ent / count); // empirical only
    rec.stats.insert("max_ratio".into(), max_ratio);
    rec.stats.insert("argmax_id".into(), argmax as f64);
    rec.stats.insert("violation_count".into(), violations as f64);
    rec.stats.insert("violation_fraction".into(), violations as f64 / count);
    rec.bounds.insert("mean_influence".into(), n as f64 / 2.0);
    rec.bounds
        .insert("var_influence".into(), n as f64 / 2f64.powi(n as i32 + 1));
    rec.bounds.insert(
        "mean_sq_influence".into(),
        n as f64 / 2f64.powi(n as i32 + 1) + (n as f64).powi(2) / 4.0,
    );
    rec.bounds
        .insert("chebyshev_bound".into(), chebyshev_bound(n, epsilon)?);
    rec.runtime_ms = start.elapsed().as_millis() as u64;
    Ok(rec)
}

/// One `(S1, S2)` cell of the enumerated fourth-moment table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FourthMomentEntry {
    pub s1: usize,
    pub s2: usize,
    /// `E[f̂(S1)² f̂(S2)²]` over all functions of arity n.
    pub enumerated: f64,
    /// Closed form: `(3·2^{2n} - 2·2^n)/2^{4n}` on the diagonal,
    /// `(2^{2n} - 2·2^n)/2^{4n}` off it.
    pub formula: f64,
    pub abs_diff: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FourthMomentTable {
    pub n: u32,
    pub entries: Vec<FourthMomentEntry>,
    pub max_abs_diff: f64,
}

/// Closed-form fourth moment of a pair of coefficients of a random function.
pub fn fourth_moment_formula(n: u32, equal_masks: bool) -> f64 {
    let p2n = 2f64.powi(2 * n as i32);
    let pn = 2f64.powi(n as i32);
    let numer = if equal_masks { 3.0 * p2n - 2.0 * pn } else { p2n - 2.0 * pn };
    numer / 2f64.powi(4 * n as i32)
}

/// Enumerates `E[f̂(S1)² f̂(S2)²]` for every mask pair over all `2^{2^n}`
/// functions and compares against the closed form.
pub fn fourth_moment_table(n: u32) -> Result<FourthMomentTable> {
    check_arity(n, DEFAULT_ARITY_CAP)?;
    if n > EXHAUSTIVE_ARITY_MAX {
        return Err(Error::Capacity(format!(
            "fourth-moment enumeration capped at n={EXHAUSTIVE_ARITY_MAX}"
        )));
    }
    let points = 1usize << n;
    let total = 1u64 << points;
    let mut acc = vec![0.0f64; points * points];
    let mut values = vec![0.0f64; points];
    let mut sq = vec![0.0f64; points];
    for g in 0..total {
        for (k, v) in values.iter_mut().enumerate() {
            *v = if g >> k & 1 == 1 { -1.0 } else { 1.0 };
        }
        fwht_values(&mut values);
        let scale = 1.0 / points as f64;
        for (s, v) in values.iter().enumerate() {
            let c = v * scale;
            sq[s] = c * c;
        }
        for s1 in 0..points {
            let row = &mut acc[s1 * points..(s1 + 1) * points];
            let a = sq[s1];
            for (s2, cell) in row.iter_mut().enumerate() {
                *cell += a * sq[s2];
            }
        }
    }
    let count = total as f64;
    let mut entries = Vec::with_capacity(points * points);
    let mut max_abs_diff = 0.0f64;
    for s1 in 0..points {
        for s2 in 0..points {
            let enumerated = acc[s1 * points + s2] / count;
            let formula = fourth_moment_formula(n, s1 == s2);
            let abs_diff = (enumerated - formula).abs();
            max_abs_diff = max_abs_diff.max(abs_diff);
            entries.push(FourthMomentEntry { s1, s2, enumerated, formula, abs_diff });
        }
    }
    Ok(FourthMomentTable { n, entries, max_abs_diff })
}

/// Monte-Carlo estimates of the influence and entropy moments of a random
/// function, plus the observed FEI-violation fraction at `C = 2 + 2ε`.
///
/// Trials are keyed by index, run in parallel, and reduced with a fixed-order
/// pairwise sum, so the record is independent of thread count.
pub fn monte_carlo(n: u32, trials: u64, seed: u64, epsilon: f64) -> Result<ExperimentRecord> {
    monte_carlo_with_cap(n, trials, seed, epsilon, DEFAULT_ARITY_CAP)
}

pub fn monte_carlo_with_cap(
    n: u32,
    trials: u64,
    seed: u64,
    epsilon: f64,
    cap: u32,
) -> Result<ExperimentRecord> {
    check_arity(n, cap)?;
    if trials < 1 {
        return Err(Error::Domain("trials must be at least 1".into()));
    }
    if epsilon <= 0.0 {
        return Err(Error::Domain(format!("epsilon must be positive, got {epsilon}")));
    }
    let start = Instant::now();
    let c = 2.0 + 2.0 * epsilon;
    let samples: Vec<(f64, f64)> = (0..trials)
        .into_par_iter()
        .map(|trial| {
            let tt = random_function_with_cap_unchecked(n, seed, trial, cap);
            let mut values: Vec<f64> = (0..tt.num_points()).map(|k| tt.value(k)).collect();
            influence_entropy_of_values(&mut values)
        })
        .collect();

    let infs: Vec<f64> = samples.iter().map(|s| s.0).collect();
    let ents: Vec<f64> = samples.iter().map(|s| s.1).collect();
    let count = trials as f64;
    let mean_inf = pairwise_sum(&infs) / count;
    let mean_ent = pairwise_sum(&ents) / count;
    let centered: Vec<f64> = infs.iter().map(|x| (x - mean_inf).powi(2)).collect();
    let var_inf = if trials > 1 {
        pairwise_sum(&centered) / (count - 1.0)
    } else {
        0.0
    };
    let violations = samples
        .iter()
        .filter(|(inf, ent)| *ent > c * inf + VERDICT_SLACK)
        .count() as u64;

    let mut rec = ExperimentRecord::new("montecarlo", n);
    rec.seed = Some(seed);
    rec.trials = Some(trials);
    rec.epsilon = Some(epsilon);
    rec.stats.insert("mean_influence".into(), mean_inf);
    rec.stats.insert("var_influence".into(), var_inf);
    rec.stats.insert("mean_entropy".into(), mean_ent); // empirical only
    rec.stats.insert("violation_count".into(), violations as f64);
    rec.stats.insert("violation_fraction".into(), violations as f64 / count);
    rec.bounds.insert("mean_influence".into(), n as f64 / 2.0);
    rec.bounds
        .insert("var_influence".into(), n as f64 / 2f64.powi(n as i32 + 1));
    rec.bounds
        .insert("chebyshev_bound".into(), chebyshev_bound(n, epsilon)?);
    rec.runtime_ms = start.elapsed().as_millis() as u64;
    Ok(rec)
}

// arity already validated by the caller; keeps the hot loop free of Results
fn random_function_with_cap_unchecked(n: u32, seed: u64, trial: u64, cap: u32) -> TruthTable {
    crate::families::random_function_with_cap(n, seed, trial, cap)
        .expect("arity validated before the trial loop")
}

/// Iterates an enumerable family, reporting the extremal FEI ratio, the
/// first index attaining it, the violation count for the given `c`, and a
/// ratio histogram.
pub fn family_scan(family: &FamilySpec, c: f64) -> Result<ExperimentRecord> {
    let start = Instant::now();
    let (n, iter): (u32, Box<dyn Iterator<Item = TruthTable>>) = match family {
        FamilySpec::Symmetric { n } => (*n, Box::new(symmetric_enumerate(*n)?)),
        FamilySpec::CyclicInvariant { p } => (
            *p,
            Box::new(cyclic_invariant_enumerate(*p, CYCLIC_ENUMERATION_BUDGET)?),
        ),
        FamilySpec::Named(named) => {
            let tt = named.build()?;
            (tt.arity(), Box::new(std::iter::once(tt)))
        }
        FamilySpec::Random { .. } => {
            return Err(Error::Capacity(
                "the random family is not enumerable; use the montecarlo experiment".into(),
            ))
        }
    };

    let mut histogram = RatioHistogram::new(n);
    let mut max_ratio = f64::NEG_INFINITY;
    let mut argmax = 0u64;
    let mut violations = 0u64;
    let mut population = 0u64;
    let mut max_entropy = 0.0f64;
    for (idx, tt) in iter.enumerate() {
        let report = fei_report(&tt, c)?;
        population += 1;
        max_entropy = max_entropy.max(report.entropy);
        if !report.satisfies {
            violations += 1;
        }
        if let Some(ratio) = report.ratio {
            histogram.record(ratio);
            if ratio > max_ratio {
                max_ratio = ratio;
                argmax = idx as u64;
            }
        }
    }

    let mut rec = ExperimentRecord::new("scan", n);
    rec.family = Some(family.to_string());
    rec.stats.insert("population".into(), population as f64);
    rec.stats.insert("max_ratio".into(), max_ratio);
    rec.stats.insert("argmax_id".into(), argmax as f64);
    rec.stats.insert("max_entropy".into(), max_entropy);
    rec.stats.insert("violation_count".into(), violations as f64);
    rec.stats
        .insert("violation_fraction".into(), violations as f64 / population as f64);
    rec.bounds.insert("constant_c".into(), c);
    rec.bounds.insert("entropy_max".into(), n as f64);
    rec.histogram = Some(histogram);
    rec.runtime_ms = start.elapsed().as_millis() as u64;
    Ok(rec)
}
