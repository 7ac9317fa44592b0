//! Exact Walsh spectra and plateau classification.
//!
//! A Walsh value χ̂_f(α) = Σ_x ξ^{f(x)-α·x} is stored as its fiber-count
//! vector N(α) with N(α)_j = #{x : f(x) - α·x = j}, which canonicalizes to
//! the value in Z[ξ_p]. The fast transform is a radix-p butterfly over the
//! group ring: multiplying by ξ^m is a cyclic shift of the count vector, so
//! each axis pass costs O(p^{n+2}) integer additions instead of O(p^{2n}).

use crate::field::{recognize_walsh_form, CycInt, FieldCtx, Parity, WalshForm};
use crate::funcspace::{
    decode_point, dot, increment_digits, negate_point_index, scale_point_index, FunctionTable,
};

#[cfg(feature = "parallel")]
use rayon::prelude::*;

use std::fmt;

/// Complete exact spectrum: one fiber-count row per α, in point order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WalshSpectrum {
    p: u32,
    n: u32,
    counts: Vec<i64>,
}

impl WalshSpectrum {
    #[inline]
    pub fn p(&self) -> u32 {
        self.p
    }

    #[inline]
    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn domain_size(&self) -> usize {
        self.counts.len() / self.p as usize
    }

    /// Raw count row N(α).
    #[inline]
    pub fn row(&self, alpha: usize) -> &[i64] {
        let p = self.p as usize;
        &self.counts[alpha * p..(alpha + 1) * p]
    }

    /// χ̂_f(α) as a canonical cyclotomic integer.
    pub fn value(&self, alpha: usize) -> CycInt {
        CycInt::canonicalize(self.p, self.row(alpha).to_vec()).unwrap()
    }

    /// Σ_α χ̂_f(α)·conj(χ̂_f(α)), exactly. Equals the rational integer
    /// p^{2n} for every function (Parseval).
    pub fn parseval_sum(&self) -> CycInt {
        let mut acc = CycInt::zero(self.p);
        for alpha in 0..self.domain_size() {
            let w = self.value(alpha);
            acc = acc.add(&w.mul(&w.conj()));
        }
        acc
    }
}

/// Direct double-loop transform, the reference oracle. O(p^{2n}) time.
pub fn walsh_counts_naive(f: &FunctionTable) -> WalshSpectrum {
    let p = f.p();
    let n = f.n();
    let size = f.len();
    let mut counts = vec![0i64; size * p as usize];
    let mut alpha = vec![0u32; n as usize];
    for a_idx in 0..size {
        let row = &mut counts[a_idx * p as usize..(a_idx + 1) * p as usize];
        let mut x = vec![0u32; n as usize];
        for x_idx in 0..size {
            let j = (f.value(x_idx) as u32 + p - dot(p, &alpha, &x)) % p;
            row[j as usize] += 1;
            increment_digits(p, &mut x);
        }
        increment_digits(p, &mut alpha);
    }
    WalshSpectrum { p, n, counts }
}

/// Butterfly transform; identical output to [`walsh_counts_naive`] in
/// O(n·p^{n+2}) integer operations.
pub fn walsh_counts_fast(f: &FunctionTable) -> WalshSpectrum {
    let p = f.p();
    let n = f.n();
    let size = f.len();
    let mut counts = vec![0i64; size * p as usize];
    for (x, chunk) in counts.chunks_mut(p as usize).enumerate() {
        chunk[f.value(x) as usize] = 1;
    }
    transform_rows(p, n, &mut counts);
    WalshSpectrum { p, n, counts }
}

/// In-place radix-p pass over every axis. `rows` holds p^n vectors of
/// length p; on return row α is Σ_x rot_{-α·x}(row_x).
pub(crate) fn transform_rows(p: u32, n: u32, rows: &mut [i64]) {
    let pu = p as usize;
    let size = rows.len() / pu;
    let mut stride = size / pu;
    for _ in 0..n {
        let block = stride * pu * pu; // i64 elements per independent block
        let process = |chunk: &mut [i64]| {
            let mut scratch = vec![0i64; pu * pu];
            for low in 0..stride {
                for m in 0..pu {
                    let src = (m * stride + low) * pu;
                    scratch[m * pu..(m + 1) * pu].copy_from_slice(&chunk[src..src + pu]);
                }
                for a in 0..pu {
                    let dst = (a * stride + low) * pu;
                    let out = &mut chunk[dst..dst + pu];
                    out.fill(0);
                    for m in 0..pu {
                        let shift = (a * m) % pu;
                        let row = &scratch[m * pu..(m + 1) * pu];
                        // out[j] += row[(j + a·m) mod p]
                        for j in 0..pu {
                            let mut k = j + shift;
                            if k >= pu {
                                k -= pu;
                            }
                            out[j] += row[k];
                        }
                    }
                }
            }
        };
        #[cfg(feature = "parallel")]
        rows.par_chunks_mut(block).for_each(process);
        #[cfg(not(feature = "parallel"))]
        rows.chunks_mut(block).for_each(process);
        stride /= pu;
    }
}

/// Which side of the sign partition a support point falls on, or the type
/// of the function read off at α = 0.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FunctionType {
    Plus,
    Minus,
    /// χ̂_f(0) = 0; no type is defined.
    Balanced,
}

impl FunctionType {
    pub fn sign(self) -> Option<i8> {
        match self {
            FunctionType::Plus => Some(1),
            FunctionType::Minus => Some(-1),
            FunctionType::Balanced => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Regularity {
    /// All support signs +1 and the fixed unimodular factor is 1.
    Regular,
    /// All support signs equal.
    WeaklyRegular,
    /// Both signs occur.
    NonWeaklyRegular,
}

impl Regularity {
    pub fn is_weakly_regular(self) -> bool {
        matches!(self, Regularity::Regular | Regularity::WeaklyRegular)
    }
}

/// Dual-side data filled in when f* is bent relative to the support.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DualBentData {
    /// f**: F_p^n → F_p, the dual of f*.
    pub fstarstar: Vec<u8>,
    /// Side of each α in the partition of F_p^n induced by χ̂_{f*}.
    pub side: Vec<i8>,
    pub type_of_fstar: FunctionType,
    /// Whether f**(x) = f(-x) held at every point.
    pub involution_ok: bool,
}

/// Classification of an s-plateaued function: support, dual values, sign
/// partition, regularity, and (when applicable) scaling-homogeneity data.
#[derive(Debug, Clone)]
pub struct PlateauProfile {
    p: u32,
    n: u32,
    s: u32,
    supp: Vec<usize>,
    eps: Vec<i8>,
    fstar: Vec<u8>,
    supp_pos: Vec<i32>,
    k: i64,
    type_of_f: FunctionType,
    regularity: Regularity,
    nwr_witness: Option<(usize, usize)>,
    /// Smallest even t with gcd(t-1, p-1) = 1 and f(ax) = a^t f(x).
    pub nwrf_t: Option<u32>,
    /// h = l+1 where l·(t-1) ≡ 1 (mod p-1); the dual scaling exponent.
    pub dual_h: Option<u32>,
    pub dual: Option<DualBentData>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum WalshError {
    /// Support size is not a power of p, or some nonzero value failed
    /// form recognition (witness index attached).
    NotPlateaued { witness: Option<usize> },
}

impl fmt::Display for WalshError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            WalshError::NotPlateaued { witness: Some(a) } => {
                write!(f, "not plateaued: value at point {a} has no canonical form")
            }
            WalshError::NotPlateaued { witness: None } => {
                write!(f, "not plateaued: support size is not a power of p")
            }
        }
    }
}

impl std::error::Error for WalshError {}

impl PlateauProfile {
    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn s(&self) -> u32 {
        self.s
    }

    /// Walsh support, ascending point indices. Has p^{n-s} elements.
    pub fn support(&self) -> &[usize] {
        &self.supp
    }

    /// Sign attached to α (None when α is outside the support).
    pub fn eps_at(&self, alpha: usize) -> Option<i8> {
        let pos = self.supp_pos[alpha];
        (pos >= 0).then(|| self.eps[pos as usize])
    }

    /// Dual value f*(α) (None outside the support).
    pub fn fstar_at(&self, alpha: usize) -> Option<u8> {
        let pos = self.supp_pos[alpha];
        (pos >= 0).then(|| self.fstar[pos as usize])
    }

    pub fn in_support(&self, alpha: usize) -> bool {
        self.supp_pos[alpha] >= 0
    }

    /// #B_+(f).
    pub fn k(&self) -> i64 {
        self.k
    }

    pub fn type_of_f(&self) -> FunctionType {
        self.type_of_f
    }

    /// Sign of the type of f: +1, -1, or None when balanced.
    pub fn eps0(&self) -> Option<i8> {
        self.type_of_f.sign()
    }

    pub fn regularity(&self) -> Regularity {
        self.regularity
    }

    /// A pair of support points with opposite signs, when non-weakly regular.
    pub fn non_weakly_regular_witness(&self) -> Option<(usize, usize)> {
        self.nwr_witness
    }

    /// Side of 0 in the dual partition, when the dual is bent relative.
    pub fn dual_side_of_zero(&self) -> Option<i8> {
        self.dual.as_ref().map(|d| d.side[0])
    }

    pub fn iter_support(&self) -> impl Iterator<Item = (usize, i8, u8)> + '_ {
        self.supp
            .iter()
            .zip(&self.eps)
            .zip(&self.fstar)
            .map(|((&a, &e), &v)| (a, e, v))
    }
}

/// Determine s from the support size, recognize every nonzero value, and
/// assemble the sign partition, type, and regularity class.
pub fn classify_plateaued(spectrum: &WalshSpectrum) -> Result<PlateauProfile, WalshError> {
    let p = spectrum.p();
    let n = spectrum.n();
    let size = spectrum.domain_size();
    let ctx = FieldCtx::new(p).expect("spectrum carries a valid prime");

    let mut supp = Vec::new();
    let mut values = Vec::new();
    for alpha in 0..size {
        let w = spectrum.value(alpha);
        if !w.is_zero() {
            supp.push(alpha);
            values.push(w);
        }
    }

    // #Supp = p^{n-s} for an s-plateaued function.
    let mut e = 0u32;
    let mut acc = 1usize;
    while acc < supp.len() {
        acc *= p as usize;
        e += 1;
    }
    if acc != supp.len() || e > n {
        return Err(WalshError::NotPlateaued { witness: None });
    }
    let s = n - e;

    let parity = if (n + s) % 2 == 0 { Parity::Even } else { Parity::Odd };
    let magnitude = (p as i64).pow((n + s) / 2);

    let mut eps = Vec::with_capacity(supp.len());
    let mut fstar = Vec::with_capacity(supp.len());
    for (&alpha, w) in supp.iter().zip(&values) {
        let (sign, phase) = match recognize_walsh_form(&ctx, w, magnitude, parity) {
            WalshForm::Root { sign, phase } if parity == Parity::Even => (sign, phase),
            WalshForm::Gauss { sign, phase } if parity == Parity::Odd => (sign, phase),
            _ => return Err(WalshError::NotPlateaued { witness: Some(alpha) }),
        };
        eps.push(sign);
        fstar.push(phase as u8);
    }

    let mut supp_pos = vec![-1i32; size];
    for (i, &alpha) in supp.iter().enumerate() {
        supp_pos[alpha] = i as i32;
    }

    let k = eps.iter().filter(|&&e| e > 0).count() as i64;
    let type_of_f = if supp.first() == Some(&0) {
        if eps[0] > 0 {
            FunctionType::Plus
        } else {
            FunctionType::Minus
        }
    } else {
        FunctionType::Balanced
    };

    let epsilon_is_one = p % 4 == 1 || (n + s) % 2 == 0;
    let all_plus = eps.iter().all(|&e| e > 0);
    let all_equal = eps.iter().all(|&e| e == eps[0]);
    let (regularity, nwr_witness) = if all_plus && epsilon_is_one {
        (Regularity::Regular, None)
    } else if all_equal {
        (Regularity::WeaklyRegular, None)
    } else {
        let plus = supp[eps.iter().position(|&e| e > 0).unwrap()];
        let minus = supp[eps.iter().position(|&e| e < 0).unwrap()];
        (Regularity::NonWeaklyRegular, Some((plus, minus)))
    };

    Ok(PlateauProfile {
        p,
        n,
        s,
        supp,
        eps,
        fstar,
        supp_pos,
        k,
        type_of_f,
        regularity,
        nwr_witness,
        nwrf_t: None,
        dual_h: None,
        dual: None,
    })
}

/// Outcome of the dual bent-relative check.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DualBentStatus {
    BentRelative,
    /// Some χ̂_{f*}(α) is not of the required magnitude; witness attached.
    NotBentRelative { witness: usize },
}

/// Compute χ̂_{f*}(α) = Σ_{x∈Supp} ξ^{f*(x)-α·x} for every α exactly and,
/// when every value matches the canonical shape at magnitude p^{(n-s)/2},
/// fill in f**, the dual sign partition, and the f**(x) = f(-x) check.
pub fn dual_spectrum_and_bent_check(
    f: &FunctionTable,
    profile: &mut PlateauProfile,
) -> DualBentStatus {
    let p = profile.p;
    let n = profile.n;
    let s = profile.s;
    let size = f.len();
    let pu = p as usize;
    let ctx = FieldCtx::new(p).expect("valid prime");

    // Masked initial rows: e_{f*(x)} on the support, zero elsewhere.
    let mut rows = vec![0i64; size * pu];
    for (alpha, _, value) in profile.iter_support() {
        rows[alpha * pu + value as usize] = 1;
    }
    transform_rows(p, n, &mut rows);

    let parity = if (n + s) % 2 == 0 { Parity::Even } else { Parity::Odd };
    let magnitude = (p as i64).pow((n - s) / 2);

    let mut fstarstar = vec![0u8; size];
    let mut side = vec![0i8; size];
    for alpha in 0..size {
        let w = CycInt::canonicalize(p, rows[alpha * pu..(alpha + 1) * pu].to_vec()).unwrap();
        let (sign, phase) = match recognize_walsh_form(&ctx, &w, magnitude, parity) {
            WalshForm::Root { sign, phase } if parity == Parity::Even => (sign, phase),
            WalshForm::Gauss { sign, phase } if parity == Parity::Odd => (sign, phase),
            _ => {
                profile.dual = None;
                return DualBentStatus::NotBentRelative { witness: alpha };
            }
        };
        side[alpha] = sign;
        fstarstar[alpha] = phase as u8;
    }

    let type_of_fstar = if side[0] > 0 { FunctionType::Plus } else { FunctionType::Minus };
    let involution_ok =
        (0..size).all(|x| fstarstar[x] == f.value(negate_point_index(p, n, x)));

    profile.dual = Some(DualBentData { fstarstar, side, type_of_fstar, involution_ok });
    DualBentStatus::BentRelative
}

/// Search for the smallest even t in {2, 4, ..., 2(p-1)} with
/// gcd(t-1, p-1) = 1 such that f(0) = 0 and f(a·x) = a^t·f(x) for all
/// a ∈ F_p^×. On success also derives the dual scaling exponent h.
pub fn nwrf_exponent(f: &FunctionTable, profile: &mut PlateauProfile) -> Option<u32> {
    let p = f.p();
    let n = f.n();
    profile.nwrf_t = None;
    profile.dual_h = None;
    if f.value(0) != 0 {
        return None;
    }
    't_loop: for t in (2..=2 * (p - 1)).step_by(2) {
        if gcd(t - 1, p - 1) != 1 {
            continue;
        }
        for a in 2..p {
            let at = pow_mod_u32(p, a, t);
            for x in 0..f.len() {
                let scaled = scale_point_index(p, n, a, x);
                if f.value(scaled) as u32 != (at * f.value(x) as u32) % p {
                    continue 't_loop;
                }
            }
        }
        let l = (1..p).find(|&l| (l * (t - 1)) % (p - 1) == 1).expect("t-1 invertible");
        profile.nwrf_t = Some(t);
        profile.dual_h = Some(l + 1);
        return Some(t);
    }
    None
}

/// Read-out of the regularity class together with its witness.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RegularityReport {
    pub label: Regularity,
    pub witness: Option<(usize, usize)>,
}

pub fn regularity_of(profile: &PlateauProfile) -> RegularityReport {
    RegularityReport { label: profile.regularity(), witness: profile.non_weakly_regular_witness() }
}

/// Full spectral pipeline: fast transform, classification, dual check,
/// scaling-exponent search.
pub fn analyze(f: &FunctionTable) -> Result<PlateauProfile, WalshError> {
    let spectrum = walsh_counts_fast(f);
    let mut profile = classify_plateaued(&spectrum)?;
    dual_spectrum_and_bent_check(f, &mut profile);
    nwrf_exponent(f, &mut profile);
    Ok(profile)
}

fn gcd(a: u32, b: u32) -> u32 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

fn pow_mod_u32(p: u32, base: u32, mut e: u32) -> u32 {
    let mut acc = 1u64;
    let mut b = base as u64 % p as u64;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * b % p as u64;
        }
        b = b * b % p as u64;
        e >>= 1;
    }
    acc as u32
}

/// Digits of α for report output.
pub fn point_digits(p: u32, n: u32, alpha: usize) -> Vec<u32> {
    decode_point(p, n, alpha)
}
