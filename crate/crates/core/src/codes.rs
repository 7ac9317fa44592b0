//! Materialized code constructions and exhaustive weight enumeration.
//!
//! Two families: the two-parameter code with codewords (a·f(x) - b·x) over
//! all nonzero points, and defining-set codes (a·x)_{x∈D} where D selects
//! points by the value class of f. Exhaustive enumeration over the message
//! space is the reference; the spectrum-driven fast path for the first
//! family is an optimization gated by an equality property test.

use std::collections::{BTreeMap, HashSet};
use std::fmt;

use crate::funcspace::{decode_point, scale_point_index, FunctionTable};
use crate::theory::WeightDistribution;
use crate::walsh::WalshSpectrum;

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Which value class of f selects the defining set.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Selector {
    Zero,
    Sq,
    Nsq,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CodeKind {
    FirstGen,
    DefSet(Selector),
}

/// A constructed code: ordered coordinate list plus message-space shape.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CodeSpec {
    pub p: u32,
    pub n: u32,
    pub kind: CodeKind,
    /// Ascending point indices; never contains the zero point.
    pub coords: Vec<u32>,
    /// n + 1 for the two-parameter family, n for defining-set codes.
    pub message_dim: u32,
    pub punctured: bool,
    /// Value of the source function at 0 (the fast path needs it).
    pub f_at_zero: u8,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CodesError {
    EmptyDefiningSet,
    WrongKind,
    MismatchedFunction,
    NotScalingClosed { witness: u32 },
    BudgetExceeded { cost: u128, budget: u64 },
    DimensionCollapse { message: Vec<u32> },
}

impl fmt::Display for CodesError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CodesError::EmptyDefiningSet => write!(f, "defining set is empty"),
            CodesError::WrongKind => write!(f, "operation applies to a different code kind"),
            CodesError::MismatchedFunction => {
                write!(f, "function table does not match the code parameters")
            }
            CodesError::NotScalingClosed { witness } => {
                write!(f, "defining set is not closed under scaling (witness point {witness})")
            }
            CodesError::BudgetExceeded { cost, budget } => {
                write!(f, "enumeration cost {cost} exceeds the operation budget {budget}")
            }
            CodesError::DimensionCollapse { message } => {
                write!(f, "nonzero message {message:?} yields the zero codeword")
            }
        }
    }
}

impl std::error::Error for CodesError {}

/// Cap on p^{message_dim}·|coords| for any enumeration job.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OpBudget(pub u64);

impl Default for OpBudget {
    fn default() -> Self {
        OpBudget(10_000_000_000)
    }
}

/// The two-parameter code on all nonzero points, message space F_p^{n+1}.
pub fn first_gen_code(f: &FunctionTable) -> CodeSpec {
    CodeSpec {
        p: f.p(),
        n: f.n(),
        kind: CodeKind::FirstGen,
        coords: (1..f.len() as u32).collect(),
        message_dim: f.n() + 1,
        punctured: false,
        f_at_zero: f.value(0),
    }
}

/// Defining-set code: coords are all x ≠ 0 with f(x) in the selected class.
pub fn defining_set(f: &FunctionTable, selector: Selector) -> Result<CodeSpec, CodesError> {
    let ctx = crate::field::FieldCtx::new(f.p()).expect("valid prime");
    let coords: Vec<u32> = (1..f.len() as u32)
        .filter(|&x| {
            let v = f.value(x as usize) as u32;
            match selector {
                Selector::Zero => v == 0,
                Selector::Sq => ctx.eta(v) == 1,
                Selector::Nsq => ctx.eta(v) == -1,
            }
        })
        .collect();
    if coords.is_empty() {
        return Err(CodesError::EmptyDefiningSet);
    }
    Ok(CodeSpec {
        p: f.p(),
        n: f.n(),
        kind: CodeKind::DefSet(selector),
        coords,
        message_dim: f.n(),
        punctured: false,
        f_at_zero: f.value(0),
    })
}

/// Replace a scaling-closed defining set by one representative per class
/// {a·x : a ∈ F_p^×}, choosing the member with the smallest index.
pub fn puncture_representatives(spec: &CodeSpec) -> Result<CodeSpec, CodesError> {
    if !matches!(spec.kind, CodeKind::DefSet(_)) {
        return Err(CodesError::WrongKind);
    }
    let p = spec.p;
    let n = spec.n;
    let set: HashSet<u32> = spec.coords.iter().copied().collect();
    let mut visited: HashSet<u32> = HashSet::new();
    let mut reps = Vec::with_capacity(spec.coords.len() / (p as usize - 1));
    for &x in &spec.coords {
        if visited.contains(&x) {
            continue;
        }
        for a in 1..p {
            let y = scale_point_index(p, n, a, x as usize) as u32;
            if !set.contains(&y) {
                return Err(CodesError::NotScalingClosed { witness: x });
            }
            visited.insert(y);
        }
        reps.push(x);
    }
    debug_assert_eq!(reps.len() * (p as usize - 1), spec.coords.len());
    Ok(CodeSpec { coords: reps, punctured: true, ..spec.clone() })
}

fn check_budget(spec: &CodeSpec, budget: OpBudget) -> Result<(), CodesError> {
    let cost = (spec.p as u128).pow(spec.message_dim) * spec.coords.len() as u128;
    if cost > budget.0 as u128 {
        return Err(CodesError::BudgetExceeded { cost, budget: budget.0 });
    }
    Ok(())
}

struct Histogram {
    counts: Vec<i64>,
    collapse: Option<Vec<u32>>,
}

impl Histogram {
    fn new(max_weight: usize) -> Self {
        Histogram { counts: vec![0; max_weight + 1], collapse: None }
    }

    fn merge(mut self, other: Histogram) -> Histogram {
        for (a, b) in self.counts.iter_mut().zip(&other.counts) {
            *a += b;
        }
        if self.collapse.is_none() {
            self.collapse = other.collapse;
        }
        self
    }

    fn into_distribution(
        self,
        length: u64,
        dimension: u32,
    ) -> Result<WeightDistribution, CodesError> {
        if let Some(message) = self.collapse {
            return Err(CodesError::DimensionCollapse { message });
        }
        let pairs: Vec<(u64, i64)> = self
            .counts
            .iter()
            .enumerate()
            .skip(1)
            .filter(|(_, &c)| c != 0)
            .map(|(w, &c)| (w as u64, c))
            .collect();
        Ok(WeightDistribution::from_nonzero(length, dimension, &pairs))
    }
}

/// Enumerate every message, build its codeword, and count nonzero entries.
/// Asserts that only the zero message yields the zero codeword.
pub fn weight_distribution_exhaustive(
    spec: &CodeSpec,
    f: &FunctionTable,
    budget: OpBudget,
) -> Result<WeightDistribution, CodesError> {
    if spec.p != f.p() || spec.n != f.n() {
        return Err(CodesError::MismatchedFunction);
    }
    check_budget(spec, budget)?;
    let m = spec.coords.len();
    let hist = match spec.kind {
        CodeKind::FirstGen => enumerate_first_gen(spec, f),
        CodeKind::DefSet(_) => enumerate_defset(spec),
    };
    hist.into_distribution(m as u64, spec.message_dim)
}

fn enumerate_first_gen(spec: &CodeSpec, f: &FunctionTable) -> Histogram {
    let p = spec.p;
    let size = f.len();
    let m = spec.coords.len();
    // The coordinate list is all nonzero points in order.
    debug_assert_eq!(m, size - 1);

    let run_range = |bs: std::ops::Range<usize>| -> Histogram {
        let mut hist = Histogram::new(m);
        let mut dots = vec![0u8; size];
        let mut mul = vec![0u8; p as usize];
        for b_idx in bs {
            let b = decode_point(p, spec.n, b_idx);
            fill_dot_table(p, &b, &mut dots);
            for a in 0..p {
                for (v, entry) in mul.iter_mut().enumerate() {
                    *entry = ((a as u64 * v as u64) % p as u64) as u8;
                }
                let mut weight = 0usize;
                for x in 1..size {
                    if mul[f.value(x) as usize] != dots[x] {
                        weight += 1;
                    }
                }
                if weight == 0 && (a != 0 || b_idx != 0) {
                    let mut msg = vec![a];
                    msg.extend(&b);
                    hist.collapse.get_or_insert(msg);
                } else if weight > 0 {
                    hist.counts[weight] += 1;
                }
            }
        }
        hist
    };

    parallel_fold(size, run_range)
}

/// dots[x] = b·x mod p for every point, one pass in encoding order. Each
/// digit-position change during an increment adds b_i mod p to the running
/// value (a reset from p-1 to 0 subtracts (p-1)·b_i ≡ +b_i).
fn fill_dot_table(p: u32, b: &[u32], dots: &mut [u8]) {
    let n = b.len();
    let mut digits = vec![0u32; n];
    let mut acc = 0u32;
    dots[0] = 0;
    for slot in dots.iter_mut().skip(1) {
        for i in (0..n).rev() {
            acc = (acc + b[i]) % p;
            digits[i] += 1;
            if digits[i] < p {
                break;
            }
            digits[i] = 0;
        }
        *slot = acc as u8;
    }
}

fn enumerate_defset(spec: &CodeSpec) -> Histogram {
    let p = spec.p;
    let n = spec.n as usize;
    let size = (p as usize).pow(spec.n);
    let m = spec.coords.len();
    let mut coord_digits = vec![0u32; m * n];
    for (i, &x) in spec.coords.iter().enumerate() {
        coord_digits[i * n..(i + 1) * n].copy_from_slice(&decode_point(p, spec.n, x as usize));
    }

    let run_range = |arange: std::ops::Range<usize>| -> Histogram {
        let mut hist = Histogram::new(m);
        for a_idx in arange {
            if a_idx == 0 {
                continue;
            }
            let a = decode_point(p, spec.n, a_idx);
            let mut weight = 0usize;
            for digits in coord_digits.chunks_exact(n) {
                let mut acc = 0u64;
                for (&ai, &xi) in a.iter().zip(digits) {
                    acc += ai as u64 * xi as u64;
                }
                if acc % p as u64 != 0 {
                    weight += 1;
                }
            }
            if weight == 0 {
                hist.collapse.get_or_insert(a);
            } else {
                hist.counts[weight] += 1;
            }
        }
        hist
    };

    parallel_fold(size, run_range)
}

#[cfg(feature = "parallel")]
fn parallel_fold<F>(size: usize, run_range: F) -> Histogram
where
    F: Fn(std::ops::Range<usize>) -> Histogram + Sync,
{
    let workers = rayon::current_num_threads().max(1);
    let chunk = size.div_ceil(workers * 4).max(1);
    let ranges: Vec<std::ops::Range<usize>> = (0..size)
        .step_by(chunk)
        .map(|start| start..(start + chunk).min(size))
        .collect();
    ranges
        .into_par_iter()
        .map(&run_range)
        .reduce_with(Histogram::merge)
        .expect("at least one range")
}

#[cfg(not(feature = "parallel"))]
fn parallel_fold<F>(size: usize, run_range: F) -> Histogram
where
    F: Fn(std::ops::Range<usize>) -> Histogram + Sync,
{
    run_range(0..size)
}

/// Weight distribution of the two-parameter code straight from the
/// spectrum: for a ≠ 0 the zero count of a·f(x) - b·x over all x is the
/// zero fiber of the count vector at a^{-1}b, so each of the p^n fiber rows
/// contributes p-1 codewords of one weight. Output identical to
/// [`weight_distribution_exhaustive`] in O(p^{n+1}) operations.
pub fn firstgen_weight_distribution_fast(
    spec: &CodeSpec,
    spectrum: &WalshSpectrum,
) -> Result<WeightDistribution, CodesError> {
    if spec.kind != CodeKind::FirstGen {
        return Err(CodesError::WrongKind);
    }
    if spec.p != spectrum.p() || spec.n != spectrum.n() {
        return Err(CodesError::MismatchedFunction);
    }
    let p = spec.p as i64;
    let size = spectrum.domain_size() as i64;
    let m = spec.coords.len() as i64;
    debug_assert_eq!(m, size - 1);

    let mut pairs: BTreeMap<u64, i64> = BTreeMap::new();
    // a = 0, b ≠ 0: zeros of b·x over x ≠ 0 number p^{n-1} - 1.
    let w0 = size - (size / p);
    *pairs.entry(w0 as u64).or_insert(0) += size - 1;
    // a ≠ 0: every β = a^{-1}b pairs with p-1 choices of a.
    let f0_zero = spec.f_at_zero == 0;
    for beta in 0..spectrum.domain_size() {
        let zeros_all_x = spectrum.row(beta)[0];
        let zeros = zeros_all_x - i64::from(f0_zero);
        let weight = (size - 1) - zeros;
        if weight == 0 {
            return Err(CodesError::DimensionCollapse {
                message: decode_point(spec.p, spec.n, beta),
            });
        }
        *pairs.entry(weight as u64).or_insert(0) += p - 1;
    }
    let pairs: Vec<(u64, i64)> = pairs.into_iter().collect();
    Ok(WeightDistribution::from_nonzero(m as u64, spec.message_dim, &pairs))
}

/// Exact comparison of an enumerated distribution against a prediction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MatchReport {
    pub matched: bool,
    pub length_mismatch: Option<(u64, u64)>,
    pub dimension_mismatch: Option<(u32, u32)>,
    /// (weight, actual multiplicity, predicted multiplicity) where they differ.
    pub weight_deltas: Vec<(u64, i64, i64)>,
}

pub fn verify_prediction(actual: &WeightDistribution, predicted: &WeightDistribution) -> MatchReport {
    let length_mismatch =
        (actual.length() != predicted.length()).then_some((actual.length(), predicted.length()));
    let dimension_mismatch = (actual.dimension() != predicted.dimension())
        .then_some((actual.dimension(), predicted.dimension()));
    let mut weight_deltas = Vec::new();
    let weights: std::collections::BTreeSet<u64> =
        actual.pairs().map(|(w, _)| w).chain(predicted.pairs().map(|(w, _)| w)).collect();
    for w in weights {
        let a = actual.multiplicity(w);
        let b = predicted.multiplicity(w);
        if a != b {
            weight_deltas.push((w, a, b));
        }
    }
    MatchReport {
        matched: length_mismatch.is_none()
            && dimension_mismatch.is_none()
            && weight_deltas.is_empty(),
        length_mismatch,
        dimension_mismatch,
        weight_deltas,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::funcspace::parse_poly;
    use crate::walsh::walsh_counts_fast;

    fn table(src: &str, p: u32, n: u32) -> FunctionTable {
        parse_poly(src, p, n).unwrap().eval_to_table()
    }

    #[test]
    fn defining_set_sizes() {
        let f = table("2*x1^2*x4^2+2*x1^2+x2^2+x3*x4", 3, 5);
        assert_eq!(defining_set(&f, Selector::Zero).unwrap().coords.len(), 98);
        assert_eq!(defining_set(&f, Selector::Sq).unwrap().coords.len(), 72);
        assert_eq!(defining_set(&f, Selector::Nsq).unwrap().coords.len(), 72);
    }

    #[test]
    fn defining_set_empty() {
        let f = FunctionTable::new(3, 2, vec![1; 9]).unwrap();
        assert!(matches!(defining_set(&f, Selector::Zero), Err(CodesError::EmptyDefiningSet)));
    }

    #[test]
    fn puncture_sizes() {
        let f = table("2*x1^2*x4^2+2*x1^2+x2^2+x3*x4", 3, 5);
        let dz = defining_set(&f, Selector::Zero).unwrap();
        let punct = puncture_representatives(&dz).unwrap();
        assert_eq!(punct.coords.len(), 49);
        assert!(punct.punctured);
        let dsq = defining_set(&f, Selector::Sq).unwrap();
        assert_eq!(puncture_representatives(&dsq).unwrap().coords.len(), 36);
    }

    #[test]
    fn puncture_rejects_unclosed_set() {
        let spec = CodeSpec {
            p: 3,
            n: 2,
            kind: CodeKind::DefSet(Selector::Zero),
            coords: vec![1],
            message_dim: 2,
            punctured: false,
            f_at_zero: 0,
        };
        assert!(matches!(
            puncture_representatives(&spec),
            Err(CodesError::NotScalingClosed { witness: 1 })
        ));
        let fg = CodeSpec { kind: CodeKind::FirstGen, ..spec };
        assert!(matches!(puncture_representatives(&fg), Err(CodesError::WrongKind)));
    }

    #[test]
    fn exhaustive_small_defset() {
        // D = all nonzero points of F_3^2: every nonzero codeword kills
        // exactly two nonzero points, weight 6.
        let f = FunctionTable::new(3, 2, vec![0; 9]).unwrap();
        let spec = defining_set(&f, Selector::Zero).unwrap();
        let wd = weight_distribution_exhaustive(&spec, &f, OpBudget::default()).unwrap();
        assert_eq!(wd.length(), 8);
        assert_eq!(wd.multiplicity(6), 8);
        assert_eq!(wd.total(), 9);
    }

    #[test]
    fn exhaustive_firstgen_zero_message_only() {
        let f = table("x1*x2", 3, 2);
        let spec = first_gen_code(&f);
        let wd = weight_distribution_exhaustive(&spec, &f, OpBudget::default()).unwrap();
        assert_eq!(wd.length(), 8);
        assert_eq!(wd.dimension(), 3);
        assert_eq!(wd.total(), 27);
        assert_eq!(wd.multiplicity(0), 1);
    }

    #[test]
    fn fast_matches_exhaustive_on_examples() {
        let f = table("x1*x2", 3, 2);
        let spec = first_gen_code(&f);
        let slow = weight_distribution_exhaustive(&spec, &f, OpBudget::default()).unwrap();
        let fast = firstgen_weight_distribution_fast(&spec, &walsh_counts_fast(&f)).unwrap();
        assert_eq!(slow, fast);
    }

    #[test]
    fn fast_matches_exhaustive_randomized() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(0xC0DE);
        for _ in 0..50 {
            let p = 3u32;
            let n = 3u32;
            let size = (p as usize).pow(n);
            let values: Vec<u8> = (0..size).map(|_| rng.gen_range(0..p) as u8).collect();
            let f = FunctionTable::new(p, n, values).unwrap();
            let spec = first_gen_code(&f);
            let slow = weight_distribution_exhaustive(&spec, &f, OpBudget::default()).unwrap();
            let fast = firstgen_weight_distribution_fast(&spec, &walsh_counts_fast(&f)).unwrap();
            assert_eq!(slow, fast);
        }
    }

    #[test]
    fn firstgen_a_zero_weight() {
        // messages with a = 0, b ≠ 0 all have weight (p-1)p^{n-1}
        let f = table("x1*x2", 3, 2);
        let spec = first_gen_code(&f);
        let wd = weight_distribution_exhaustive(&spec, &f, OpBudget::default()).unwrap();
        assert!(wd.multiplicity(6) >= 8);
    }

    #[test]
    fn dimension_collapse_detected() {
        // D ⊂ {x : x_1 = 0}, so a = (1, 0) kills every coordinate.
        let spec = CodeSpec {
            p: 3,
            n: 2,
            kind: CodeKind::DefSet(Selector::Zero),
            coords: vec![1, 2],
            message_dim: 2,
            punctured: false,
            f_at_zero: 0,
        };
        let f = FunctionTable::new(3, 2, vec![0; 9]).unwrap();
        let err = weight_distribution_exhaustive(&spec, &f, OpBudget::default()).unwrap_err();
        assert!(matches!(err, CodesError::DimensionCollapse { .. }));
    }

    #[test]
    fn budget_rejection() {
        let f = table("x1*x2", 3, 2);
        let spec = first_gen_code(&f);
        assert!(matches!(
            weight_distribution_exhaustive(&spec, &f, OpBudget(10)),
            Err(CodesError::BudgetExceeded { .. })
        ));
    }

    #[test]
    fn verify_prediction_reports_deltas() {
        let a = WeightDistribution::from_nonzero(8, 2, &[(6, 8)]);
        let b = WeightDistribution::from_nonzero(8, 2, &[(6, 8)]);
        assert!(verify_prediction(&a, &b).matched);
        let c = WeightDistribution::from_nonzero(8, 2, &[(5, 2), (6, 6)]);
        let report = verify_prediction(&a, &c);
        assert!(!report.matched);
        assert_eq!(report.weight_deltas, vec![(5, 0, 2), (6, 8, 6)]);
    }
}
