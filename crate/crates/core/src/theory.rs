//! Closed-form weight-distribution predictions and code-theoretic analysis:
//! value distributions of plateaued functions and their duals, sign-side
//! value counts, the per-construction weight tables, power-moment analysis
//! of dual low weights, the minimality criterion, and classic bounds.
//!
//! All table families are generated from one parameterized engine: the
//! support splits into sign × dual-value classes whose cardinalities come
//! from [`bplus_value_counts`], each class maps to a codeword weight given
//! by the construction, and equal weights merge. The per-parity and
//! side-of-zero table variants fall out of the same composition.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigUint;

use crate::field::FieldCtx;

/// Weight → multiplicity table of a linear code, including A_0 = 1.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WeightDistribution {
    length: u64,
    dimension: u32,
    counts: BTreeMap<u64, i64>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TheoryError {
    BalancedFunction,
    KNotDivisible { k: i64, p: u32 },
    KOutOfRange { k: i64, max: i64 },
    SOutOfRange { s: u32, max: i64 },
    PuncturedNotSupported,
    /// The sides of 0 in the two partitions contradict the parity-of-p^{n+s}
    /// relation that holds for scaling-homogeneous inputs.
    TypeRelationViolation,
    InvalidDistribution(String),
    NonIntegralSolution { moment: u32 },
    NegativeSolution { moment: u32 },
    ZeroCode,
}

impl fmt::Display for TheoryError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TheoryError::BalancedFunction => write!(f, "balanced function has no type"),
            TheoryError::KNotDivisible { k, p } => write!(f, "k = {k} is not divisible by p = {p}"),
            TheoryError::KOutOfRange { k, max } => {
                write!(f, "k = {k} must be strictly between 0 and {max}")
            }
            TheoryError::SOutOfRange { s, max } => {
                write!(f, "amplitude s = {s} outside the supported range 0..={max}")
            }
            TheoryError::PuncturedNotSupported => {
                write!(f, "puncturing applies only to defining-set constructions")
            }
            TheoryError::TypeRelationViolation => {
                write!(f, "sides of 0 in the two partitions are inconsistent for these parameters")
            }
            TheoryError::InvalidDistribution(msg) => write!(f, "invalid weight distribution: {msg}"),
            TheoryError::NonIntegralSolution { moment } => {
                write!(f, "moment {moment} solves to a non-integer dual count")
            }
            TheoryError::NegativeSolution { moment } => {
                write!(f, "moment {moment} solves to a negative dual count")
            }
            TheoryError::ZeroCode => write!(f, "code has no nonzero weight"),
        }
    }
}

impl std::error::Error for TheoryError {}

impl WeightDistribution {
    /// Build from nonzero-weight multiplicities; A_0 = 1 is added.
    pub fn from_nonzero(length: u64, dimension: u32, pairs: &[(u64, i64)]) -> Self {
        let mut counts = BTreeMap::new();
        counts.insert(0u64, 1i64);
        for &(w, c) in pairs {
            if c != 0 {
                *counts.entry(w).or_insert(0) += c;
            }
        }
        WeightDistribution { length, dimension, counts }
    }

    pub fn length(&self) -> u64 {
        self.length
    }

    pub fn dimension(&self) -> u32 {
        self.dimension
    }

    /// All (weight, multiplicity) pairs ascending, including (0, 1).
    pub fn pairs(&self) -> impl Iterator<Item = (u64, i64)> + '_ {
        self.counts.iter().map(|(&w, &c)| (w, c))
    }

    pub fn multiplicity(&self, w: u64) -> i64 {
        self.counts.get(&w).copied().unwrap_or(0)
    }

    /// Smallest nonzero weight.
    pub fn min_distance(&self) -> Option<u64> {
        self.counts.keys().find(|&&w| w > 0).copied()
    }

    pub fn max_weight(&self) -> Option<u64> {
        self.counts.keys().next_back().copied().filter(|&w| w > 0)
    }

    /// Number of distinct nonzero weights.
    pub fn weight_count(&self) -> usize {
        self.counts.keys().filter(|&&w| w > 0).count()
    }

    pub fn total(&self) -> i64 {
        self.counts.values().sum()
    }

    /// Check Σ A_w = p^dimension.
    pub fn check_total(&self, p: u32) -> bool {
        let expect = (p as i128).pow(self.dimension);
        self.counts.values().map(|&c| c as i128).sum::<i128>() == expect
    }

    /// Scale length and all weights by 1/(p-1); used by punctured codes.
    pub fn scale_down(&self, factor: u64) -> Option<WeightDistribution> {
        if self.length % factor != 0 {
            return None;
        }
        let mut counts = BTreeMap::new();
        for (&w, &c) in &self.counts {
            if w % factor != 0 {
                return None;
            }
            counts.insert(w / factor, c);
        }
        Some(WeightDistribution { length: self.length / factor, dimension: self.dimension, counts })
    }

    /// "1+30z^144+..." with ascending exponents.
    pub fn enumerator_string(&self) -> String {
        let mut out = String::from("1");
        for (&w, &c) in &self.counts {
            if w == 0 {
                continue;
            }
            out.push_str(&format!("+{c}z^{w}"));
        }
        out
    }

    /// JSON object {"length", "dimension", "weights": [[w, count], ...]}.
    pub fn to_json(&self) -> serde_json::Value {
        let weights: Vec<serde_json::Value> = self
            .counts
            .iter()
            .map(|(&w, &c)| serde_json::json!([w, c]))
            .collect();
        serde_json::json!({
            "length": self.length,
            "dimension": self.dimension,
            "weights": weights,
        })
    }
}

fn ipow(p: u32, e: u32) -> i64 {
    (p as i64).pow(e)
}

/// Value distribution N_j(f) of an unbalanced s-plateaued function, keyed by
/// the type sign of f and j0 = f*(0).
pub fn value_distribution_f(
    p: u32,
    n: u32,
    s: u32,
    type_sign: i8,
    j0: u32,
) -> Result<Vec<i64>, TheoryError> {
    distribution_from_exponent(p, n + s, n, type_sign, j0)
}

/// Value distribution N_j(f*) of the dual over the support; total p^{n-s}.
/// `type_sign` is the side of 0 in the dual partition and j0 = f(0).
pub fn value_distribution_fstar(
    p: u32,
    n: u32,
    s: u32,
    type_sign: i8,
    j0: u32,
) -> Result<Vec<i64>, TheoryError> {
    if s > n {
        return Err(TheoryError::SOutOfRange { s, max: n as i64 });
    }
    distribution_from_exponent(p, n - s, n - s, type_sign, j0)
}

/// Shared shape: counts over F_p summing to p^dim, with deviation scale
/// p^{e/2} (even e) or p^{(e-1)/2} (odd e).
fn distribution_from_exponent(
    p: u32,
    e: u32,
    dim: u32,
    type_sign: i8,
    j0: u32,
) -> Result<Vec<i64>, TheoryError> {
    assert!(type_sign == 1 || type_sign == -1, "type sign must be ±1");
    let ctx = FieldCtx::new(p).expect("valid prime");
    let t = type_sign as i64;
    let mut out = vec![0i64; p as usize];
    if e % 2 == 0 {
        if e < 2 {
            return Err(TheoryError::SOutOfRange { s: 0, max: dim as i64 - 2 });
        }
        let big = ipow(p, e / 2);
        let small = ipow(p, e / 2 - 1);
        for j in 0..p {
            out[j as usize] = if j == j0 {
                ipow(p, dim - 1) + t * (big - small)
            } else {
                ipow(p, dim - 1) - t * small
            };
        }
    } else {
        let dev = ipow(p, (e - 1) / 2);
        out[j0 as usize] = ipow(p, dim - 1);
        for j in 1..p {
            let idx = ((j0 + j) % p) as usize;
            out[idx] = ipow(p, dim - 1) + t * ctx.eta(j) as i64 * dev;
        }
    }
    Ok(out)
}

/// The counts c_j = #{x ∈ B_+(f): f*(x) = j} and d_j over B_-(f), for a
/// scaling-homogeneous function whose dual is bent relative to the support.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BplusCounts {
    pub c: Vec<i64>,
    pub d: Vec<i64>,
}

impl BplusCounts {
    /// e_j = c_j - d_j.
    pub fn e(&self) -> Vec<i64> {
        self.c.iter().zip(&self.d).map(|(a, b)| a - b).collect()
    }
}

/// Compute the (c_j, d_j) maps from p, n, s, k = #B_+(f), the side of 0 in
/// the dual partition, and j0 = f(0). Requires p | k and 0 < k < p^{n-s}.
pub fn bplus_value_counts(
    p: u32,
    n: u32,
    s: u32,
    k: i64,
    side0_fstar: i8,
    j0: u32,
) -> Result<BplusCounts, TheoryError> {
    assert!(side0_fstar == 1 || side0_fstar == -1);
    if s > n {
        return Err(TheoryError::SOutOfRange { s, max: n as i64 });
    }
    let max = ipow(p, n - s);
    if k <= 0 || k >= max {
        return Err(TheoryError::KOutOfRange { k, max });
    }
    if k % p as i64 != 0 {
        return Err(TheoryError::KNotDivisible { k, p });
    }
    let ctx = FieldCtx::new(p).expect("valid prime");
    let kp = k / p as i64;
    let r = ipow(p, n - s - 1);
    let plus = side0_fstar > 0;
    let mut c = vec![0i64; p as usize];
    let mut d = vec![0i64; p as usize];
    if (n + s) % 2 == 0 {
        // n-s is even as well; needs n-s ≥ 2 for the deviation scale.
        if n - s < 2 {
            return Err(TheoryError::SOutOfRange { s, max: n as i64 - 2 });
        }
        let q = ipow(p, (n - s) / 2 - 1);
        for j in 0..p {
            if j == j0 {
                c[j as usize] = if plus { kp + (p as i64 - 1) * q } else { kp };
                d[j as usize] =
                    if plus { r - kp } else { r - (p as i64 - 1) * q - kp };
            } else {
                c[j as usize] = if plus { kp - q } else { kp };
                d[j as usize] = if plus { r - kp } else { r + q - kp };
            }
        }
    } else {
        let t = ipow(p, (n - s - 1) / 2);
        c[j0 as usize] = kp;
        d[j0 as usize] = r - kp;
        for j in 1..p {
            let idx = ((j0 + j) % p) as usize;
            let ej = ctx.eta(j) as i64;
            if p % 4 == 1 {
                c[idx] = if plus { kp + ej * t } else { kp };
                d[idx] = if plus { r - kp } else { r - ej * t - kp };
            } else {
                c[idx] = if plus { kp } else { kp - ej * t };
                d[idx] = if plus { r + ej * t - kp } else { r - kp };
            }
        }
    }
    Ok(BplusCounts { c, d })
}

/// Which code family a prediction targets.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConstructionKind {
    /// Codewords (a·f(x) - b·x)_{x≠0}, message (a, b).
    FirstGen,
    /// Defining set {x ≠ 0 : f(x) = 0}.
    DefSetZero,
    /// Defining set {x ≠ 0 : f(x) a nonzero square}.
    DefSetSq,
    /// Defining set {x ≠ 0 : f(x) a nonsquare}.
    DefSetNsq,
}

/// Numeric inputs for a closed-form weight-distribution prediction.
#[derive(Debug, Clone, Copy)]
pub struct PredictionInput {
    pub p: u32,
    pub n: u32,
    pub s: u32,
    /// #B_+(f).
    pub k: i64,
    /// Type sign of f (side of 0 in its own partition); None when balanced.
    pub eps0_f: Option<i8>,
    /// Side of 0 in the dual partition.
    pub eps0_fstar: i8,
    pub kind: ConstructionKind,
    pub punctured: bool,
}

/// Dispatch on the construction kind.
pub fn predict_weights(input: &PredictionInput) -> Result<WeightDistribution, TheoryError> {
    match input.kind {
        ConstructionKind::FirstGen => predict_weights_firstgen(input),
        ConstructionKind::DefSetZero => predict_weights_defset(input),
        ConstructionKind::DefSetSq | ConstructionKind::DefSetNsq => {
            predict_weights_quadratic_defset(input)
        }
    }
}

struct ClassTally {
    pairs: BTreeMap<u64, i64>,
}

impl ClassTally {
    fn new() -> Self {
        ClassTally { pairs: BTreeMap::new() }
    }

    fn add(&mut self, weight: i64, count: i64) {
        assert!(weight > 0, "nonzero message produced weight {weight}");
        assert!(count >= 0, "negative class count {count}");
        if count > 0 {
            *self.pairs.entry(weight as u64).or_insert(0) += count;
        }
    }

    fn finish(self, length: i64, dimension: u32) -> WeightDistribution {
        let pairs: Vec<(u64, i64)> = self.pairs.into_iter().collect();
        WeightDistribution::from_nonzero(length as u64, dimension, &pairs)
    }
}

fn check_s_range(s: u32, max: i64) -> Result<(), TheoryError> {
    if (s as i64) > max || max < 0 {
        return Err(TheoryError::SOutOfRange { s, max });
    }
    Ok(())
}

fn eta_minus_one(p: u32) -> i64 {
    if p % 4 == 1 {
        1
    } else {
        -1
    }
}

/// Whether the fixed unimodular factor is 1, i.e. p^{n+s} ≡ 1 (mod 4).
fn epsilon_is_one(p: u32, n: u32, s: u32) -> bool {
    p % 4 == 1 || (n + s) % 2 == 0
}

/// Weight distribution of the two-parameter code (a·f(x) - b·x)_{x≠0}
/// of length p^n - 1 and dimension n + 1.
pub fn predict_weights_firstgen(input: &PredictionInput) -> Result<WeightDistribution, TheoryError> {
    let &PredictionInput { p, n, s, k, punctured, eps0_fstar, .. } = input;
    if punctured {
        return Err(TheoryError::PuncturedNotSupported);
    }
    let even = (n + s) % 2 == 0;
    check_s_range(s, if even { n as i64 - 2 } else { n as i64 - 1 })?;

    let pl = p as i64;
    let length = ipow(p, n) - 1;
    let mut tally = ClassTally::new();
    let w_base = (pl - 1) * ipow(p, n - 1);
    // a = 0, b ≠ 0 together with a ≠ 0, a^{-1}b outside the support.
    tally.add(w_base, (ipow(p, n) - 1) + (pl - 1) * (ipow(p, n) - ipow(p, n - s)));

    if even {
        let counts = bplus_value_counts(p, n, s, k, eps0_fstar, 0)?;
        let q = ipow(p, (n + s) / 2 - 1);
        for (side, cd) in [(1i64, &counts.c), (-1, &counts.d)] {
            for j in 0..p as usize {
                let weight = if j == 0 {
                    (pl - 1) * (ipow(p, n - 1) - side * q)
                } else {
                    w_base + side * q
                };
                tally.add(weight, (pl - 1) * cd[j]);
            }
        }
    } else {
        // Independent of k and of the sign partition in the odd case.
        let max = ipow(p, n - s);
        if k <= 0 || k >= max {
            return Err(TheoryError::KOutOfRange { k, max });
        }
        let t = ipow(p, (n + s - 1) / 2);
        let h2 = (pl - 1) * (pl - 1) / 2;
        let r = ipow(p, n - s - 1);
        let dev = ipow(p, (n - s - 1) / 2);
        tally.add(w_base, (pl - 1) * r);
        tally.add(w_base - t, h2 * (r + dev));
        tally.add(w_base + t, h2 * (r - dev));
    }
    Ok(tally.finish(length, n + 1))
}

/// Shared validation for the defining-set families, which require an
/// unbalanced scaling-homogeneous function with a bent-relative dual.
fn defset_inputs(input: &PredictionInput) -> Result<(i64, BplusCounts), TheoryError> {
    let &PredictionInput { p, n, s, k, eps0_f, eps0_fstar, .. } = input;
    let eps0 = eps0_f.ok_or(TheoryError::BalancedFunction)?;
    assert!(eps0 == 1 || eps0 == -1);
    // The two sides of 0 agree exactly when p^{n+s} ≡ 1 (mod 4).
    let same = eps0 == eps0_fstar;
    if same != epsilon_is_one(p, n, s) {
        return Err(TheoryError::TypeRelationViolation);
    }
    let counts = bplus_value_counts(p, n, s, k, eps0_fstar, 0)?;
    Ok((eps0 as i64, counts))
}

fn maybe_puncture(
    wd: WeightDistribution,
    p: u32,
    punctured: bool,
) -> Result<WeightDistribution, TheoryError> {
    if !punctured {
        return Ok(wd);
    }
    wd.scale_down(p as u64 - 1).ok_or_else(|| {
        TheoryError::InvalidDistribution("weights not divisible by p-1".into())
    })
}

/// Weight distribution of the code (a·x)_{x∈D} with D = {x ≠ 0 : f(x) = 0};
/// `punctured` keeps one representative per scaling class.
pub fn predict_weights_defset(input: &PredictionInput) -> Result<WeightDistribution, TheoryError> {
    let &PredictionInput { p, n, s, punctured, .. } = input;
    let even = (n + s) % 2 == 0;
    check_s_range(s, if even { n as i64 - 4 } else { n as i64 - 3 })?;
    let (eps0, counts) = defset_inputs(input)?;

    let pl = p as i64;
    let ctx = FieldCtx::new(p).expect("valid prime");
    let mut tally = ClassTally::new();
    let length;
    if even {
        let q = ipow(p, (n + s) / 2 - 2);
        length = ipow(p, n - 1) + eps0 * (pl - 1) * pl * q - 1;
        tally.add(
            (pl - 1) * (ipow(p, n - 2) + eps0 * (pl - 1) * q),
            ipow(p, n) - ipow(p, n - s),
        );
        for (side, cd) in [(1i64, &counts.c), (-1, &counts.d)] {
            for j in 0..p as usize {
                let weight = if j == 0 {
                    (pl - 1) * (ipow(p, n - 2) + (eps0 - side) * (pl - 1) * q)
                } else {
                    (pl - 1) * (ipow(p, n - 2) + (eps0 * (pl - 1) + side) * q)
                };
                let excluded = if j == 0 && side == eps0 { 1 } else { 0 };
                tally.add(weight, cd[j] - excluded);
            }
        }
    } else {
        let t = ipow(p, (n + s - 3) / 2);
        length = ipow(p, n - 1) - 1;
        let em1 = eta_minus_one(p);
        tally.add((pl - 1) * ipow(p, n - 2), ipow(p, n) - ipow(p, n - s));
        for (side, cd) in [(1i64, &counts.c), (-1, &counts.d)] {
            for j in 0..p as usize {
                let weight = if j == 0 {
                    (pl - 1) * ipow(p, n - 2)
                } else {
                    (pl - 1)
                        * (ipow(p, n - 2) - side * em1 * ctx.eta(j as u32) as i64 * t)
                };
                let excluded = if j == 0 && side == eps0 { 1 } else { 0 };
                tally.add(weight, cd[j] - excluded);
            }
        }
    }
    maybe_puncture(tally.finish(length, n), p, punctured)
}

/// Weight distributions of the codes over D = {x ≠ 0 : f(x) ∈ SQ} or NSQ.
pub fn predict_weights_quadratic_defset(
    input: &PredictionInput,
) -> Result<WeightDistribution, TheoryError> {
    let &PredictionInput { p, n, s, kind, punctured, .. } = input;
    let sq = match kind {
        ConstructionKind::DefSetSq => true,
        ConstructionKind::DefSetNsq => false,
        _ => panic!("quadratic predictor called with {kind:?}"),
    };
    let even = (n + s) % 2 == 0;
    check_s_range(s, if even { n as i64 - 4 } else { n as i64 - 3 })?;
    let (eps0, counts) = defset_inputs(input)?;

    let pl = p as i64;
    let ctx = FieldCtx::new(p).expect("valid prime");
    let h1 = (pl - 1) / 2;
    let h2 = (pl - 1) * (pl - 1) / 2;
    let em1 = eta_minus_one(p);
    let mut tally = ClassTally::new();
    let length;
    if even {
        let q = ipow(p, (n + s) / 2 - 2);
        length = h1 * (ipow(p, n - 1) - eps0 * pl * q);
        let base = h2 * (ipow(p, n - 2) - eps0 * q);
        tally.add(base, ipow(p, n) - ipow(p, n - s));
        for (side, cd) in [(1i64, &counts.c), (-1, &counts.d)] {
            for j in 0..p as usize {
                let weight = if j == 0 {
                    h2 * (ipow(p, n - 2) + (side - eps0) * q)
                } else {
                    let ej = ctx.eta(j as u32) as i64;
                    if sq {
                        base - side * h1 * q * (pl * ej + 1)
                    } else {
                        base + side * h1 * q * (pl * ej - 1)
                    }
                };
                let excluded = if j == 0 && side == eps0 { 1 } else { 0 };
                tally.add(weight, cd[j] - excluded);
            }
        }
    } else {
        let t = ipow(p, (n + s - 3) / 2);
        let sq_sign = if sq { 1i64 } else { -1 };
        length = h1 * (ipow(p, n - 1) + sq_sign * eps0 * pl * t);
        let base = h2 * (ipow(p, n - 2) + sq_sign * eps0 * t);
        tally.add(base, ipow(p, n) - ipow(p, n - s));
        for (side, cd) in [(1i64, &counts.c), (-1, &counts.d)] {
            for j in 0..p as usize {
                let weight = if j == 0 {
                    h2 * (ipow(p, n - 2) + sq_sign * (eps0 - side) * t)
                } else {
                    let ej = ctx.eta(j as u32) as i64;
                    if sq {
                        base + side * h1 * t * (1 + em1 * ej)
                    } else {
                        base - side * h1 * t * (1 - em1 * ej)
                    }
                };
                let excluded = if j == 0 && side == eps0 { 1 } else { 0 };
                tally.add(weight, cd[j] - excluded);
            }
        }
    }
    maybe_puncture(tally.finish(length, n), p, punctured)
}

/// Lowest dual weights recovered from the first five power moments.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DualLowWeights {
    /// A_1 through A_4 of the dual code.
    pub a: [i128; 4],
    pub d_dual: DualDistance,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DualDistance {
    Exact(u32),
    AtLeastFive,
}

impl fmt::Display for DualDistance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DualDistance::Exact(d) => write!(f, "{d}"),
            DualDistance::AtLeastFive => write!(f, ">=5"),
        }
    }
}

/// Moment S_r scaled to T_r = S_r / p^{k-r}, exact or an error.
fn scaled_moment(s_r: i128, p: i128, k: u32, r: u32) -> Result<i128, TheoryError> {
    if r >= k {
        Ok(s_r * p.pow(r - k))
    } else {
        let den = p.pow(k - r);
        if s_r % den != 0 {
            return Err(TheoryError::NonIntegralSolution { moment: r });
        }
        Ok(s_r / den)
    }
}

/// Solve the first five power-moment identities sequentially and exactly for
/// the dual multiplicities A_1 through A_4; the dual minimum distance is the
/// least index with a positive count, reported as at-least-5 otherwise.
pub fn pless_dual_low_weights(
    wd: &WeightDistribution,
    p: u32,
) -> Result<DualLowWeights, TheoryError> {
    let k = wd.dimension();
    let m = wd.length() as i128;
    let pp = p as i128;

    let mut s = [0i128; 5];
    for (w, c) in wd.pairs() {
        let w = w as i128;
        let c = c as i128;
        let mut acc = c;
        s[0] += acc;
        for r in 1..5 {
            acc *= w;
            s[r] += acc;
        }
    }
    if s[0] != pp.pow(k) {
        return Err(TheoryError::InvalidDistribution(format!(
            "total {} != p^{k}",
            s[0]
        )));
    }

    let t1 = scaled_moment(s[1], pp, k, 1)?;
    let t2 = scaled_moment(s[2], pp, k, 2)?;
    let t3 = scaled_moment(s[3], pp, k, 3)?;
    let t4 = scaled_moment(s[4], pp, k, 4)?;

    let a1 = (pp - 1) * m - t1;

    let a2_num = t2 - (pp - 1) * m * (pp * m - m + 1) + (2 * pp * m - pp - 2 * m + 2) * a1;
    if a2_num % 2 != 0 {
        return Err(TheoryError::NonIntegralSolution { moment: 2 });
    }
    let a2 = a2_num / 2;

    let x3 = pp * pp * m * m - 2 * pp * m * m + 3 * pp * m - pp + m * m - 3 * m + 2;
    let y3 = 3 * pp * pp * m * m - 3 * pp * pp * m - 6 * pp * m * m + 12 * pp * m + pp * pp
        - 6 * pp
        + 3 * m * m
        - 9 * m
        + 6;
    let a3_num = (pp - 1) * m * x3 - y3 * a1 + 6 * (pp * m - pp - m + 2) * a2 - t3;
    if a3_num % 6 != 0 {
        return Err(TheoryError::NonIntegralSolution { moment: 3 });
    }
    let a3 = a3_num / 6;

    let p2 = pp * pp;
    let p3 = p2 * pp;
    let m2 = m * m;
    let m3 = m2 * m;
    let x4 = p3 * m3 - 3 * p2 * m3 + 6 * p2 * m2 - 4 * p2 * m + p2 + 3 * pp * m3
        - 12 * pp * m2
        + 15 * pp * m
        - 6 * pp
        - m3
        + 6 * m2
        - 11 * m
        + 6;
    let y4 = 4 * p3 * m3 - 6 * p3 * m2 + 4 * p3 * m - p3 - 12 * p2 * m3 + 36 * p2 * m2
        - 38 * p2 * m
        + 14 * p2
        + 12 * pp * m3
        - 54 * pp * m2
        + 78 * pp * m
        - 36 * pp
        - 4 * m3
        + 24 * m2
        - 44 * m
        + 24;
    let z4 = 12 * p2 * m2 - 24 * p2 * m + 14 * p2 - 24 * pp * m2 + 84 * pp * m - 72 * pp
        + 12 * m2
        - 60 * m
        + 72;
    let w4 = 24 * pp * m - 36 * pp - 24 * m + 72;
    let a4_num = t4 - (pp - 1) * m * x4 + y4 * a1 - z4 * a2 + w4 * a3;
    if a4_num % 24 != 0 {
        return Err(TheoryError::NonIntegralSolution { moment: 4 });
    }
    let a4 = a4_num / 24;

    let a = [a1, a2, a3, a4];
    for (i, &v) in a.iter().enumerate() {
        if v < 0 {
            return Err(TheoryError::NegativeSolution { moment: i as u32 + 1 });
        }
    }
    let d_dual = match a.iter().position(|&v| v > 0) {
        Some(i) => DualDistance::Exact(i as u32 + 1),
        None => DualDistance::AtLeastFive,
    };
    Ok(DualLowWeights { a, d_dual })
}

/// Sufficient-condition minimality verdict: (p-1)/p < wt_min/wt_max,
/// compared by cross-multiplication.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MinimalityReport {
    pub minimal: bool,
    pub wt_min: u64,
    pub wt_max: u64,
}

pub fn minimality_check(wd: &WeightDistribution, p: u32) -> Result<MinimalityReport, TheoryError> {
    let wt_min = wd.min_distance().ok_or(TheoryError::ZeroCode)?;
    let wt_max = wd.max_weight().ok_or(TheoryError::ZeroCode)?;
    let minimal = (p as u128 - 1) * (wt_max as u128) < (p as u128) * (wt_min as u128);
    Ok(MinimalityReport { minimal, wt_min, wt_max })
}

/// Singleton and sphere-packing verdicts for an [n, k, d] code.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BoundReport {
    pub singleton_defect: i64,
    pub mds: bool,
    pub amds: bool,
    pub sphere_packing_ok: bool,
}

pub fn bound_checks(length: u64, dimension: u32, d: u64, p: u32) -> BoundReport {
    assert!(dimension as u64 <= length, "dimension exceeds length");
    assert!(d >= 1 && d <= length, "distance out of range");
    let singleton_defect = (length as i64) - (dimension as i64) + 1 - d as i64;
    let volume = sphere_volume(length, d, p);
    let codim = BigUint::from(p).pow(length as u32 - dimension);
    BoundReport {
        singleton_defect,
        mds: singleton_defect == 0,
        amds: singleton_defect == 1,
        sphere_packing_ok: codim >= volume,
    }
}

/// Σ_{j=0}^{⌊(d-1)/2⌋} C(n, j)·(p-1)^j, exactly.
fn sphere_volume(length: u64, d: u64, p: u32) -> BigUint {
    let radius = (d - 1) / 2;
    let mut sum = BigUint::from(1u32);
    let mut binom = BigUint::from(1u32);
    let mut power = BigUint::from(1u32);
    let q = BigUint::from(p - 1);
    for j in 1..=radius {
        binom = binom * BigUint::from(length - j + 1) / BigUint::from(j);
        power *= &q;
        sum += &binom * &power;
    }
    sum
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn value_distribution_even_case() {
        // p=3, n=5, s=1, type (+), j0 = 0
        let d = value_distribution_f(3, 5, 1, 1, 0).unwrap();
        assert_eq!(d, vec![99, 72, 72]);
        assert_eq!(d.iter().sum::<i64>(), 243);
    }

    #[test]
    fn value_distribution_odd_case() {
        // p=5, n=4, s=1, type (+), j0 = 0: N_0 = 125, N_j = 125 ± 25·η(j)
        let d = value_distribution_f(5, 4, 1, 1, 0).unwrap();
        assert_eq!(d[0], 125);
        assert_eq!(d[1], 150); // η(1) = 1
        assert_eq!(d[2], 100); // η(2) = -1
        assert_eq!(d[3], 100);
        assert_eq!(d[4], 150);
        assert_eq!(d.iter().sum::<i64>(), 625);
    }

    #[test]
    fn dual_value_distribution() {
        let d = value_distribution_fstar(3, 5, 1, 1, 0).unwrap();
        assert_eq!(d, vec![33, 24, 24]);
        assert_eq!(d.iter().sum::<i64>(), 81);
        let d = value_distribution_fstar(5, 4, 1, 1, 0).unwrap();
        assert_eq!(d[0], 25);
        assert_eq!(d[1], 30);
        assert_eq!(d[2], 20);
        assert_eq!(d.iter().sum::<i64>(), 125);
    }

    #[test]
    fn bplus_counts_even() {
        // p=3, n=5, s=1, k=27, 0 on the plus side of the dual partition
        let bc = bplus_value_counts(3, 5, 1, 27, 1, 0).unwrap();
        assert_eq!(bc.c, vec![15, 6, 6]);
        assert_eq!(bc.d, vec![18, 18, 18]);
        assert_eq!(bc.c.iter().sum::<i64>(), 27);
        assert_eq!(bc.d.iter().sum::<i64>(), 81 - 27);
        // c_j + d_j equals the dual value distribution
        let nd = value_distribution_fstar(3, 5, 1, 1, 0).unwrap();
        for j in 0..3 {
            assert_eq!(bc.c[j] + bc.d[j], nd[j]);
        }
    }

    #[test]
    fn bplus_counts_odd() {
        // p=5 ≡ 1 (mod 4), n=4, s=1, k=25
        let bc = bplus_value_counts(5, 4, 1, 25, 1, 0).unwrap();
        assert_eq!(bc.c[0], 5);
        assert_eq!(bc.d[0], 20);
        assert_eq!(bc.c.iter().sum::<i64>(), 25);
        assert_eq!(bc.d.iter().sum::<i64>(), 100);
        let e = bc.e();
        assert_eq!(e[0], -15);
    }

    #[test]
    fn bplus_counts_preconditions() {
        assert!(matches!(
            bplus_value_counts(3, 5, 1, 26, 1, 0),
            Err(TheoryError::KNotDivisible { .. })
        ));
        assert!(matches!(
            bplus_value_counts(3, 5, 1, 81, 1, 0),
            Err(TheoryError::KOutOfRange { .. })
        ));
    }

    fn wd_from(pairs: &[(u64, i64)], length: u64, dim: u32) -> WeightDistribution {
        WeightDistribution::from_nonzero(length, dim, pairs)
    }

    #[test]
    fn firstgen_even_flagship() {
        let input = PredictionInput {
            p: 3,
            n: 5,
            s: 1,
            k: 27,
            eps0_f: Some(1),
            eps0_fstar: 1,
            kind: ConstructionKind::FirstGen,
            punctured: false,
        };
        let wd = predict_weights_firstgen(&input).unwrap();
        let expect = wd_from(&[(144, 30), (153, 72), (162, 566), (171, 24), (180, 36)], 242, 6);
        assert_eq!(wd, expect);
        assert!(wd.check_total(3));
    }

    #[test]
    fn firstgen_even_minus_side() {
        let input = PredictionInput {
            p: 3,
            n: 5,
            s: 1,
            k: 54,
            eps0_f: Some(-1),
            eps0_fstar: -1,
            kind: ConstructionKind::FirstGen,
            punctured: false,
        };
        let wd = predict_weights_firstgen(&input).unwrap();
        let expect = wd_from(&[(144, 36), (153, 48), (162, 566), (171, 72), (180, 6)], 242, 6);
        assert_eq!(wd, expect);
    }

    #[test]
    fn firstgen_odd_three_weights() {
        let input = PredictionInput {
            p: 5,
            n: 4,
            s: 1,
            k: 25,
            eps0_f: Some(1),
            eps0_fstar: 1,
            kind: ConstructionKind::FirstGen,
            punctured: false,
        };
        let wd = predict_weights_firstgen(&input).unwrap();
        let expect = wd_from(&[(475, 240), (500, 2724), (525, 160)], 624, 5);
        assert_eq!(wd, expect);
    }

    #[test]
    fn defset_even_flagship() {
        let input = PredictionInput {
            p: 3,
            n: 5,
            s: 1,
            k: 27,
            eps0_f: Some(1),
            eps0_fstar: 1,
            kind: ConstructionKind::DefSetZero,
            punctured: false,
        };
        let wd = predict_weights_defset(&input).unwrap();
        let expect = wd_from(&[(54, 14), (60, 36), (66, 162), (72, 12), (78, 18)], 98, 5);
        assert_eq!(wd, expect);
        // punctured: lengths and weights divide by p-1
        let wd = predict_weights_defset(&PredictionInput { punctured: true, ..input }).unwrap();
        let expect = wd_from(&[(27, 14), (30, 36), (33, 162), (36, 12), (39, 18)], 49, 5);
        assert_eq!(wd, expect);
    }

    #[test]
    fn defset_odd_example() {
        let input = PredictionInput {
            p: 5,
            n: 4,
            s: 1,
            k: 25,
            eps0_f: Some(1),
            eps0_fstar: 1,
            kind: ConstructionKind::DefSetZero,
            punctured: false,
        };
        let wd = predict_weights_defset(&input).unwrap();
        let expect = wd_from(&[(80, 60), (100, 524), (120, 40)], 124, 4);
        assert_eq!(wd, expect);
    }

    #[test]
    fn quadratic_defset_examples() {
        let input = PredictionInput {
            p: 3,
            n: 5,
            s: 1,
            k: 27,
            eps0_f: Some(1),
            eps0_fstar: 1,
            kind: ConstructionKind::DefSetSq,
            punctured: false,
        };
        let wd = predict_weights_quadratic_defset(&input).unwrap();
        let expect = wd_from(&[(36, 6), (42, 36), (48, 162), (54, 20), (60, 18)], 72, 5);
        assert_eq!(wd, expect);
        // NSQ agrees with SQ in the even case
        let nsq =
            predict_weights_quadratic_defset(&PredictionInput {
                kind: ConstructionKind::DefSetNsq,
                ..input
            })
            .unwrap();
        assert_eq!(nsq, wd);

        // odd case over F_5^4 with k = 25
        let input = PredictionInput {
            p: 5,
            n: 4,
            s: 1,
            k: 25,
            eps0_f: Some(1),
            eps0_fstar: 1,
            kind: ConstructionKind::DefSetSq,
            punctured: false,
        };
        let wd = predict_weights_quadratic_defset(&input).unwrap();
        let expect = wd_from(&[(200, 4), (220, 40), (240, 540), (260, 20), (280, 20)], 300, 4);
        assert_eq!(wd, expect);

        // bent case over F_5^5 with k = 625
        let input = PredictionInput {
            p: 5,
            n: 5,
            s: 0,
            k: 625,
            eps0_f: Some(1),
            eps0_fstar: 1,
            kind: ConstructionKind::DefSetSq,
            punctured: false,
        };
        let wd = predict_weights_quadratic_defset(&input).unwrap();
        let expect = wd_from(
            &[(1000, 124), (1020, 1000), (1040, 1200), (1060, 300), (1080, 500)],
            1300,
            5,
        );
        assert_eq!(wd, expect);
    }

    #[test]
    fn type_relation_enforced() {
        // p=3, n+s odd ⇒ the sides must differ; equal sides must be rejected.
        let input = PredictionInput {
            p: 3,
            n: 4,
            s: 1,
            k: 9,
            eps0_f: Some(1),
            eps0_fstar: 1,
            kind: ConstructionKind::DefSetZero,
            punctured: false,
        };
        assert!(matches!(
            predict_weights_defset(&input),
            Err(TheoryError::TypeRelationViolation)
        ));
    }

    #[test]
    fn pless_flagship_dual() {
        let wd = wd_from(&[(144, 30), (153, 72), (162, 566), (171, 24), (180, 36)], 242, 6);
        let dual = pless_dual_low_weights(&wd, 3).unwrap();
        assert_eq!(dual.a[0], 0);
        assert!(dual.a[1] > 0);
        assert_eq!(dual.d_dual, DualDistance::Exact(2));
    }

    #[test]
    fn pless_punctured_dual() {
        let wd = wd_from(&[(27, 14), (30, 36), (33, 162), (36, 12), (39, 18)], 49, 5);
        let dual = pless_dual_low_weights(&wd, 3).unwrap();
        assert_eq!(dual.a[0], 0);
        assert_eq!(dual.a[1], 0);
        assert!(dual.a[2] > 0);
        assert_eq!(dual.d_dual, DualDistance::Exact(3));
    }

    #[test]
    fn pless_full_space_trivial_dual() {
        // Whole space F_3^1: weights {0: 1, 1: 2}, dual is the zero code.
        let wd = wd_from(&[(1, 2)], 1, 1);
        let dual = pless_dual_low_weights(&wd, 3).unwrap();
        assert_eq!(dual.a, [0, 0, 0, 0]);
        assert_eq!(dual.d_dual, DualDistance::AtLeastFive);
    }

    /// Brute-force dual check on a small code: D = all nonzero points of
    /// F_3^2, generator rows are the two coordinate projections.
    #[test]
    fn pless_matches_brute_force_dual() {
        use crate::funcspace::decode_point;
        let p = 3u32;
        let coords: Vec<Vec<u32>> = (1..9).map(|i| decode_point(p, 2, i)).collect();
        let m = coords.len();
        // primal weights
        let mut pairs: BTreeMap<u64, i64> = BTreeMap::new();
        for a_idx in 1..9 {
            let a = decode_point(p, 2, a_idx);
            let w = coords
                .iter()
                .filter(|x| (a[0] * x[0] + a[1] * x[1]) % p != 0)
                .count() as u64;
            *pairs.entry(w).or_insert(0) += 1;
        }
        let pairs: Vec<(u64, i64)> = pairs.into_iter().collect();
        let wd = wd_from(&pairs, m as u64, 2);
        let dual = pless_dual_low_weights(&wd, p).unwrap();

        // enumerate the dual by brute force: all vectors orthogonal to the
        // generator rows (x-projection and y-projection of the coords)
        let mut dual_counts = [0i128; 5];
        let mut v = vec![0u32; m];
        let total = 3usize.pow(m as u32);
        for _ in 0..total {
            let mut ok = true;
            for row in 0..2 {
                let dot: u32 = v.iter().zip(&coords).map(|(c, x)| c * x[row]).sum();
                if dot % p != 0 {
                    ok = false;
                    break;
                }
            }
            if ok {
                let w = v.iter().filter(|&&c| c != 0).count();
                if (1..=4).contains(&w) {
                    dual_counts[w] += 1;
                }
            }
            crate::funcspace::increment_digits(p, &mut v);
        }
        assert_eq!(dual.a[0], dual_counts[1]);
        assert_eq!(dual.a[1], dual_counts[2]);
        assert_eq!(dual.a[2], dual_counts[3]);
        assert_eq!(dual.a[3], dual_counts[4]);
    }

    #[test]
    fn minimality_examples() {
        let wd = wd_from(&[(144, 30), (153, 72), (162, 566), (171, 24), (180, 36)], 242, 6);
        assert!(minimality_check(&wd, 3).unwrap().minimal);
        let wd = wd_from(&[(54, 14), (60, 36), (66, 162), (72, 12), (78, 18)], 98, 5);
        assert!(minimality_check(&wd, 3).unwrap().minimal);
        let wd = wd_from(&[(12, 6), (14, 36), (18, 20), (20, 18)], 24, 4);
        assert!(!minimality_check(&wd, 3).unwrap().minimal);
        let wd = WeightDistribution::from_nonzero(5, 0, &[]);
        assert!(matches!(minimality_check(&wd, 3), Err(TheoryError::ZeroCode)));
    }

    #[test]
    fn bound_examples() {
        // [p-1, 2, p-2] for p = 5 is MDS
        let b = bound_checks(4, 2, 3, 5);
        assert!(b.mds && !b.amds);
        // [p²-1, p²-4, 3] is AMDS
        let b = bound_checks(8, 5, 3, 3);
        assert!(b.amds && !b.mds);
        // [49, 44, d]: packing holds at d = 3 and 4, fails at 5
        assert!(bound_checks(49, 44, 3, 3).sphere_packing_ok);
        assert!(bound_checks(49, 44, 4, 3).sphere_packing_ok);
        assert!(!bound_checks(49, 44, 5, 3).sphere_packing_ok);
    }

    #[test]
    fn distribution_json_shape() {
        let wd = wd_from(&[(2, 4), (3, 4)], 4, 2);
        let v = wd.to_json();
        assert_eq!(v["length"], 4);
        assert_eq!(v["dimension"], 2);
        assert_eq!(v["weights"][0][0], 0);
        assert_eq!(v["weights"][0][1], 1);
        assert_eq!(wd.enumerator_string(), "1+4z^2+4z^3");
    }
}
