//! Arithmetic in F_p and in the cyclotomic ring Z[ξ_p].
//!
//! [`FieldCtx`] carries the quadratic character table of a fixed odd prime p
//! together with the derived sets SQ/NSQ and the signed prime p* = η(-1)p.
//! [`CycInt`] is an exact element of Z[ξ_p] stored as an integer coefficient
//! vector (c_0, ..., c_{p-1}) with the canonical normalization c_{p-1} = 0,
//! obtained by reducing along 1 + ξ + ... + ξ^{p-1} = 0. Walsh values enter
//! as nonnegative fiber-count vectors, which canonicalize by one subtraction.

use std::fmt;

/// Context for a fixed odd prime p: quadratic character, square classes, p*.
#[derive(Debug, Clone)]
pub struct FieldCtx {
    p: u32,
    eta: Vec<i8>,
    sq: Vec<u32>,
    nsq: Vec<u32>,
    p_star: i64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FieldError {
    /// p is not an odd prime.
    NotOddPrime(u32),
    /// Raw coefficient vector has the wrong length for this p.
    LengthMismatch { expected: usize, got: usize },
}

impl fmt::Display for FieldError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FieldError::NotOddPrime(p) => write!(f, "{p} is not an odd prime"),
            FieldError::LengthMismatch { expected, got } => {
                write!(f, "coefficient vector length {got}, expected {expected}")
            }
        }
    }
}

impl std::error::Error for FieldError {}

fn is_prime(p: u32) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2u32;
    while d * d <= p {
        if p % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

impl FieldCtx {
    pub fn new(p: u32) -> Result<Self, FieldError> {
        if p < 3 || p % 2 == 0 || !is_prime(p) {
            return Err(FieldError::NotOddPrime(p));
        }
        let mut eta = vec![-1i8; p as usize];
        eta[0] = 0;
        let mut sq = Vec::with_capacity((p as usize - 1) / 2);
        for a in 1..p {
            let r = ((a as u64 * a as u64) % p as u64) as usize;
            if eta[r] != 1 {
                eta[r] = 1;
                sq.push(r as u32);
            }
        }
        sq.sort_unstable();
        let nsq: Vec<u32> = (1..p).filter(|&a| eta[a as usize] == -1).collect();
        let p_star = if p % 4 == 1 { p as i64 } else { -(p as i64) };
        Ok(FieldCtx { p, eta, sq, nsq, p_star })
    }

    #[inline]
    pub fn p(&self) -> u32 {
        self.p
    }

    /// Quadratic character η(a), with the convention η(0) = 0.
    #[inline]
    pub fn eta(&self, a: u32) -> i32 {
        debug_assert!(a < self.p);
        self.eta[a as usize] as i32
    }

    /// Nonzero squares of F_p, ascending.
    pub fn sq_set(&self) -> &[u32] {
        &self.sq
    }

    /// Nonsquares of F_p, ascending.
    pub fn nsq_set(&self) -> &[u32] {
        &self.nsq
    }

    /// p* = η(-1)·p: +p when p ≡ 1 (mod 4), -p when p ≡ 3 (mod 4).
    #[inline]
    pub fn p_star(&self) -> i64 {
        self.p_star
    }

    /// Quadratic Gauss sum Σ_{y≠0} η(y)ξ^y; its square is p*.
    pub fn gauss_sum(&self) -> CycInt {
        let mut raw = vec![0i64; self.p as usize];
        for y in 1..self.p {
            raw[y as usize] = self.eta(y) as i64;
        }
        CycInt::from_raw(self.p, raw)
    }
}

/// Quadratic character as a free function, mirroring η in formulas.
#[inline]
pub fn quadratic_character(ctx: &FieldCtx, a: u32) -> i32 {
    ctx.eta(a)
}

/// Exact element of Z[ξ_p] in canonical form (last coefficient zero).
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct CycInt {
    p: u32,
    coeffs: Vec<i64>,
}

impl CycInt {
    /// Canonicalize a raw length-p coefficient vector: subtract the last
    /// entry from every entry. Two count vectors differing by a constant
    /// represent the same ring element and map to the same canonical form.
    pub fn canonicalize(p: u32, raw: Vec<i64>) -> Result<Self, FieldError> {
        if raw.len() != p as usize {
            return Err(FieldError::LengthMismatch { expected: p as usize, got: raw.len() });
        }
        Ok(Self::from_raw(p, raw))
    }

    fn from_raw(p: u32, mut raw: Vec<i64>) -> Self {
        let last = raw[p as usize - 1];
        if last != 0 {
            for c in raw.iter_mut() {
                *c -= last;
            }
        }
        CycInt { p, coeffs: raw }
    }

    pub fn zero(p: u32) -> Self {
        CycInt { p, coeffs: vec![0; p as usize] }
    }

    /// The rational integer v as an element of Z[ξ_p].
    pub fn from_integer(p: u32, v: i64) -> Self {
        let mut coeffs = vec![0; p as usize];
        coeffs[0] = v;
        CycInt { p, coeffs }
    }

    /// ξ^j in canonical form.
    pub fn root_power(p: u32, j: u32) -> Self {
        let j = j % p;
        let mut raw = vec![0i64; p as usize];
        raw[j as usize] = 1;
        Self::from_raw(p, raw)
    }

    #[inline]
    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn coeffs(&self) -> &[i64] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|&c| c == 0)
    }

    /// Some(v) when the element is the rational integer v.
    pub fn as_integer(&self) -> Option<i64> {
        if self.coeffs[1..].iter().all(|&c| c == 0) {
            Some(self.coeffs[0])
        } else {
            None
        }
    }

    pub fn add(&self, other: &CycInt) -> CycInt {
        assert_eq!(self.p, other.p, "mismatched cyclotomic order");
        let raw: Vec<i64> =
            self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a + b).collect();
        // Both operands canonical, so the sum already has last entry 0.
        CycInt { p: self.p, coeffs: raw }
    }

    pub fn sub(&self, other: &CycInt) -> CycInt {
        assert_eq!(self.p, other.p, "mismatched cyclotomic order");
        let raw: Vec<i64> =
            self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a - b).collect();
        CycInt { p: self.p, coeffs: raw }
    }

    pub fn neg(&self) -> CycInt {
        CycInt { p: self.p, coeffs: self.coeffs.iter().map(|&c| -c).collect() }
    }

    pub fn scale(&self, c: i64) -> CycInt {
        CycInt { p: self.p, coeffs: self.coeffs.iter().map(|&v| v * c).collect() }
    }

    /// Ring product: cyclic convolution modulo ξ^p = 1, then canonicalize.
    pub fn mul(&self, other: &CycInt) -> CycInt {
        assert_eq!(self.p, other.p, "mismatched cyclotomic order");
        let p = self.p as usize;
        let mut raw = vec![0i64; p];
        for (i, &a) in self.coeffs.iter().enumerate() {
            if a == 0 {
                continue;
            }
            for (j, &b) in other.coeffs.iter().enumerate() {
                if b == 0 {
                    continue;
                }
                let mut k = i + j;
                if k >= p {
                    k -= p;
                }
                raw[k] += a * b;
            }
        }
        Self::from_raw(self.p, raw)
    }

    /// Galois automorphism σ_a (ξ ↦ ξ^a), a ∈ F_p^×.
    pub fn galois(&self, a: u32) -> CycInt {
        assert!(a >= 1 && a < self.p, "automorphism index must be in 1..p");
        let p = self.p as usize;
        let mut raw = vec![0i64; p];
        for (j, &c) in self.coeffs.iter().enumerate() {
            raw[(j * a as usize) % p] = c;
        }
        Self::from_raw(self.p, raw)
    }

    /// Complex conjugation, i.e. σ_{p-1}.
    pub fn conj(&self) -> CycInt {
        self.galois(self.p - 1)
    }
}

impl fmt::Debug for CycInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "CycInt(p={}, {:?})", self.p, self.coeffs)
    }
}

/// Outcome of matching a Walsh value against its two canonical shapes.
///
/// With ε = 1 for p^{n+s} ≡ 1 (mod 4) and ε = i for p^{n+s} ≡ 3 (mod 4),
/// a plateaued Walsh value is 0 or ±ε·p^{(n+s)/2}·ξ^{f*(α)}. For even n+s
/// this is `Root` (ε = 1 and the magnitude is an integer power of p); for
/// odd n+s the value equals ±p^{(n+s-1)/2}·G·ξ^{f*(α)} in both residue
/// classes of p, where G = gauss_sum, and is reported as `Gauss`. The sign
/// carried here is the sign multiplying ε, so +1 selects the B_+ side.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WalshForm {
    Zero,
    Root { sign: i8, phase: u32 },
    Gauss { sign: i8, phase: u32 },
    NoMatch,
}

/// Parity of the exponent n+s governing which shape applies.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Parity {
    Even,
    Odd,
}

/// Match w against 0, ±magnitude·ξ^j (even) or ±magnitude·G·ξ^j (odd) by
/// exhaustive trial over sign × j with exact coefficient comparison.
pub fn recognize_walsh_form(
    ctx: &FieldCtx,
    w: &CycInt,
    magnitude: i64,
    parity: Parity,
) -> WalshForm {
    assert_eq!(ctx.p(), w.p(), "mismatched cyclotomic order");
    assert!(magnitude >= 1, "magnitude must be positive");
    if w.is_zero() {
        return WalshForm::Zero;
    }
    let p = ctx.p();
    for j in 0..p {
        let base = match parity {
            Parity::Even => CycInt::root_power(p, j).scale(magnitude),
            Parity::Odd => ctx.gauss_sum().mul(&CycInt::root_power(p, j)).scale(magnitude),
        };
        if *w == base {
            return match parity {
                Parity::Even => WalshForm::Root { sign: 1, phase: j },
                Parity::Odd => WalshForm::Gauss { sign: 1, phase: j },
            };
        }
        if *w == base.neg() {
            return match parity {
                Parity::Even => WalshForm::Root { sign: -1, phase: j },
                Parity::Odd => WalshForm::Gauss { sign: -1, phase: j },
            };
        }
    }
    WalshForm::NoMatch
}
