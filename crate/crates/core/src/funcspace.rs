//! Functions f: F_p^n → F_p as dense value tables, plus the multivariate
//! monomial parser used to enter them from text.
//!
//! Points are numbered by the big-endian radix-p encoding
//! index = Σ_i x_i·p^{n-i} (x_1 most significant); every module in the crate
//! uses this one convention.

use std::fmt;



/// A monomial coeff·Π x_i^{e_i} with coeff ∈ F_p^×.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Monomial {
    pub coeff: u32,
    /// One exponent per variable, index 0 ↔ x1.
    pub exponents: Vec<u32>,
}

/// A polynomial over F_p in n variables, stored as a monomial list.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PolyExpr {
    p: u32,
    n: u32,
    monomials: Vec<Monomial>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ParseError {
    UnexpectedChar { pos: usize, found: char },
    UnexpectedEnd { pos: usize },
    ExpectedNumber { pos: usize },
    VariableIndexOutOfRange { pos: usize, index: u64, n: u32 },
    ZeroCoefficient { pos: usize },
    InvalidPrime(u32),
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ParseError::UnexpectedChar { pos, found } => {
                write!(f, "unexpected character '{found}' at position {pos}")
            }
            ParseError::UnexpectedEnd { pos } => write!(f, "unexpected end of input at position {pos}"),
            ParseError::ExpectedNumber { pos } => write!(f, "expected a number at position {pos}"),
            ParseError::VariableIndexOutOfRange { pos, index, n } => {
                write!(f, "variable x{index} at position {pos} exceeds the {n} declared variables")
            }
            ParseError::ZeroCoefficient { pos } => {
                write!(f, "term at position {pos} has coefficient ≡ 0 mod p")
            }
            ParseError::InvalidPrime(p) => write!(f, "{p} is not an odd prime"),
        }
    }
}

impl std::error::Error for ParseError {}

struct Cursor<'a> {
    src: &'a [u8],
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn bump(&mut self) {
        self.pos += 1;
    }

    fn number(&mut self) -> Result<u64, ParseError> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if self.pos == start {
            return Err(ParseError::ExpectedNumber { pos: start });
        }
        let text = std::str::from_utf8(&self.src[start..self.pos]).unwrap();
        text.parse::<u64>().map_err(|_| ParseError::ExpectedNumber { pos: start })
    }
}

/// Parse the explicit-operator grammar
/// `expr := term (('+'|'-') term)*; term := [coeff '*'] factor ('*' factor)*;
/// factor := var ['^' uint]; var := 'x' uint`.
/// Coefficients are reduced mod p; like monomials are combined; a literal
/// term whose coefficient vanishes mod p is rejected.
pub fn parse_poly(src: &str, p: u32, n: u32) -> Result<PolyExpr, ParseError> {
    if p < 3 || p % 2 == 0 {
        return Err(ParseError::InvalidPrime(p));
    }
    let mut cur = Cursor { src: src.as_bytes(), pos: 0 };
    let mut monomials: Vec<Monomial> = Vec::new();

    let mut negate = false;
    loop {
        let term_pos = cur.pos;
        let (coeff, exponents) = parse_term(&mut cur, p, n)?;
        let coeff = if negate { (p - coeff) % p } else { coeff };
        if coeff == 0 {
            return Err(ParseError::ZeroCoefficient { pos: term_pos });
        }
        match monomials.iter_mut().find(|m| m.exponents == exponents) {
            Some(m) => m.coeff = (m.coeff + coeff) % p,
            None => monomials.push(Monomial { coeff, exponents }),
        }
        match cur.peek() {
            None => break,
            Some(b'+') => {
                cur.bump();
                negate = false;
            }
            Some(b'-') => {
                cur.bump();
                negate = true;
            }
            Some(c) => {
                return Err(ParseError::UnexpectedChar { pos: cur.pos, found: c as char })
            }
        }
    }
    monomials.retain(|m| m.coeff != 0);
    Ok(PolyExpr { p, n, monomials })
}

fn parse_term(cur: &mut Cursor, p: u32, n: u32) -> Result<(u32, Vec<u32>), ParseError> {
    let mut coeff = 1u64;
    let mut exponents = vec![0u32; n as usize];

    match cur.peek() {
        Some(c) if c.is_ascii_digit() => {
            coeff = cur.number()?;
            match cur.peek() {
                Some(b'*') => cur.bump(),
                Some(c) => return Err(ParseError::UnexpectedChar { pos: cur.pos, found: c as char }),
                None => return Err(ParseError::UnexpectedEnd { pos: cur.pos }),
            }
        }
        _ => {}
    }

    loop {
        parse_factor(cur, n, &mut exponents)?;
        match cur.peek() {
            Some(b'*') => cur.bump(),
            _ => break,
        }
    }
    Ok(((coeff % p as u64) as u32, exponents))
}

fn parse_factor(cur: &mut Cursor, n: u32, exponents: &mut [u32]) -> Result<(), ParseError> {
    match cur.peek() {
        Some(b'x') => cur.bump(),
        Some(c) => return Err(ParseError::UnexpectedChar { pos: cur.pos, found: c as char }),
        None => return Err(ParseError::UnexpectedEnd { pos: cur.pos }),
    }
    let var_pos = cur.pos;
    let idx = cur.number()?;
    if idx < 1 || idx > n as u64 {
        return Err(ParseError::VariableIndexOutOfRange { pos: var_pos, index: idx, n });
    }
    let mut exp = 1u64;
    if cur.peek() == Some(b'^') {
        cur.bump();
        exp = cur.number()?;
    }
    exponents[(idx - 1) as usize] += exp as u32;
    Ok(())
}

impl PolyExpr {
    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn monomials(&self) -> &[Monomial] {
        &self.monomials
    }

    /// Evaluate at a single point, reducing exponents via x^p = x.
    pub fn eval_at(&self, x: &[u32]) -> u32 {
        debug_assert_eq!(x.len(), self.n as usize);
        let p = self.p as u64;
        let mut acc = 0u64;
        for m in &self.monomials {
            let mut term = m.coeff as u64;
            for (i, &e) in m.exponents.iter().enumerate() {
                term = term * pow_fermat(self.p, x[i], e) as u64 % p;
                if term == 0 {
                    break;
                }
            }
            acc = (acc + term) % p;
        }
        acc as u32
    }

    /// Evaluate over the whole domain in canonical point order.
    pub fn eval_to_table(&self) -> FunctionTable {
        let p = self.p;
        let n = self.n;
        // Per-variable power tables for the Fermat-reduced exponents.
        let reduced: Vec<Vec<u32>> = self
            .monomials
            .iter()
            .map(|m| m.exponents.iter().map(|&e| reduce_exponent(p, e)).collect())
            .collect();
        let mut pow = vec![vec![0u32; p as usize]; p as usize];
        for (v, row) in pow.iter_mut().enumerate() {
            for (e, entry) in row.iter_mut().enumerate() {
                *entry = pow_mod(p, v as u32, e as u32);
            }
        }
        let size = checked_domain_size(p, n);
        let mut values = vec![0u8; size];
        let mut digits = vec![0u32; n as usize];
        for (idx, slot) in values.iter_mut().enumerate() {
            let mut acc = 0u32;
            for (m, e_red) in self.monomials.iter().zip(&reduced) {
                let mut term = m.coeff;
                for (i, &e) in e_red.iter().enumerate() {
                    if e != 0 {
                        term = term * pow[digits[i] as usize][e as usize] % p;
                        if term == 0 {
                            break;
                        }
                    }
                }
                acc = (acc + term) % p;
            }
            *slot = acc as u8;
            if idx + 1 < size {
                increment_digits(p, &mut digits);
            }
        }
        FunctionTable { p, n, values }
    }
}

impl fmt::Display for PolyExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.monomials.is_empty() {
            return write!(f, "0");
        }
        for (i, m) in self.monomials.iter().enumerate() {
            if i > 0 {
                write!(f, "+")?;
            }
            let mut lead = true;
            if m.coeff != 1 || m.exponents.iter().all(|&e| e == 0) {
                write!(f, "{}", m.coeff)?;
                lead = false;
            }
            for (v, &e) in m.exponents.iter().enumerate() {
                if e == 0 {
                    continue;
                }
                if !lead {
                    write!(f, "*")?;
                }
                lead = false;
                write!(f, "x{}", v + 1)?;
                if e > 1 {
                    write!(f, "^{e}")?;
                }
            }
        }
        Ok(())
    }
}

fn reduce_exponent(p: u32, e: u32) -> u32 {
    if e == 0 {
        0
    } else {
        1 + (e - 1) % (p - 1)
    }
}

fn pow_mod(p: u32, base: u32, mut e: u32) -> u32 {
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

fn pow_fermat(p: u32, base: u32, e: u32) -> u32 {
    pow_mod(p, base, reduce_exponent(p, e))
}

/// Dense table of a function F_p^n → F_p in canonical point order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FunctionTable {
    p: u32,
    n: u32,
    values: Vec<u8>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TableError {
    BadHeader,
    WrongLength { expected: usize, got: usize },
    ValueOutOfRange { index: usize, value: u32 },
    DomainTooLarge { p: u32, n: u32 },
    InvalidPrime(u32),
}

impl fmt::Display for TableError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TableError::BadHeader => write!(f, "first line must be \"p n\""),
            TableError::WrongLength { expected, got } => {
                write!(f, "table has {got} entries, expected {expected}")
            }
            TableError::ValueOutOfRange { index, value } => {
                write!(f, "entry {value} at index {index} is not in [0, p)")
            }
            TableError::DomainTooLarge { p, n } => {
                write!(f, "domain size {p}^{n} exceeds the supported integer range")
            }
            TableError::InvalidPrime(p) => write!(f, "{p} is not an odd prime"),
        }
    }
}

impl std::error::Error for TableError {}

/// Checked p^n as usize; panics only past the documented i64 bound.
fn checked_domain_size(p: u32, n: u32) -> usize {
    domain_size(p, n).expect("domain size exceeds supported range") as usize
}

/// p^n if p^{n+1} still fits a signed 64-bit integer, the crate-wide bound.
pub fn domain_size(p: u32, n: u32) -> Option<i64> {
    let mut acc: i64 = 1;
    for _ in 0..=n {
        acc = acc.checked_mul(p as i64)?;
    }
    Some(acc / p as i64)
}

impl FunctionTable {
    pub fn new(p: u32, n: u32, values: Vec<u8>) -> Result<Self, TableError> {
        if p < 3 || p % 2 == 0 {
            return Err(TableError::InvalidPrime(p));
        }
        let size = domain_size(p, n).ok_or(TableError::DomainTooLarge { p, n })? as usize;
        if values.len() != size {
            return Err(TableError::WrongLength { expected: size, got: values.len() });
        }
        if let Some((i, &v)) = values.iter().enumerate().find(|(_, &v)| v as u32 >= p) {
            return Err(TableError::ValueOutOfRange { index: i, value: v as u32 });
        }
        Ok(FunctionTable { p, n, values })
    }

    #[inline]
    pub fn p(&self) -> u32 {
        self.p
    }

    #[inline]
    pub fn n(&self) -> u32 {
        self.n
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    #[inline]
    pub fn value(&self, index: usize) -> u8 {
        self.values[index]
    }

    pub fn values(&self) -> &[u8] {
        &self.values
    }

    /// Serialize to the table file format: "p n" header, then all values.
    pub fn render(&self) -> String {
        let body: Vec<String> = self.values.iter().map(|v| v.to_string()).collect();
        format!("{} {}\n{}\n", self.p, self.n, body.join(" "))
    }

    /// Parse the table file format.
    pub fn parse(text: &str) -> Result<Self, TableError> {
        let mut lines = text.lines();
        let header = lines.next().ok_or(TableError::BadHeader)?;
        let mut parts = header.split_whitespace();
        let p: u32 = parts
            .next()
            .and_then(|s| s.parse().ok())
            .ok_or(TableError::BadHeader)?;
        let n: u32 = parts
            .next()
            .and_then(|s| s.parse().ok())
            .ok_or(TableError::BadHeader)?;
        if parts.next().is_some() {
            return Err(TableError::BadHeader);
        }
        let rest: String = lines.collect::<Vec<_>>().join(" ");
        let mut values = Vec::new();
        for tok in rest.split_whitespace() {
            let v: u32 = tok.parse().map_err(|_| TableError::BadHeader)?;
            values.push(v as u8);
        }
        FunctionTable::new(p, n, values)
    }
}

/// Big-endian radix-p point encoding: index = Σ_i x_i·p^{n-i}.
pub fn encode_point(p: u32, n: u32, digits: &[u32]) -> usize {
    debug_assert_eq!(digits.len(), n as usize);
    let mut idx = 0usize;
    for &d in digits {
        debug_assert!(d < p);
        idx = idx * p as usize + d as usize;
    }
    idx
}

/// Inverse of [`encode_point`].
pub fn decode_point(p: u32, n: u32, index: usize) -> Vec<u32> {
    let mut digits = vec![0u32; n as usize];
    let mut rest = index;
    for i in (0..n as usize).rev() {
        digits[i] = (rest % p as usize) as u32;
        rest /= p as usize;
    }
    debug_assert_eq!(rest, 0, "index out of range");
    digits
}

/// Advance a digit vector to the next point in encoding order.
#[inline]
pub fn increment_digits(p: u32, digits: &mut [u32]) {
    for d in digits.iter_mut().rev() {
        *d += 1;
        if *d < p {
            return;
        }
        *d = 0;
    }
}

/// Ordinary inner product Σ a_i·x_i mod p.
pub fn dot(p: u32, a: &[u32], x: &[u32]) -> u32 {
    assert_eq!(a.len(), x.len(), "mismatched point lengths");
    let mut acc = 0u64;
    for (&ai, &xi) in a.iter().zip(x) {
        acc += ai as u64 * xi as u64;
    }
    (acc % p as u64) as u32
}

/// Index of the scaled point a·x (digitwise), a ∈ F_p.
pub fn scale_point_index(p: u32, n: u32, a: u32, index: usize) -> usize {
    let mut out = 0usize;
    let mut rest = index;
    let mut scale = 1usize;
    for _ in 0..n {
        let d = (rest % p as usize) as u32;
        out += ((a * d) % p) as usize * scale;
        rest /= p as usize;
        scale *= p as usize;
    }
    out
}

/// Index of -x.
pub fn negate_point_index(p: u32, n: u32, index: usize) -> usize {
    scale_point_index(p, n, p - 1, index)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn encode_decode_examples() {
        assert_eq!(encode_point(3, 2, &[1, 2]), 5);
        assert_eq!(decode_point(3, 2, 0), vec![0, 0]);
        // exhaustive round trip for p = 5, n = 3
        for idx in 0..125 {
            let digits = decode_point(5, 3, idx);
            assert_eq!(encode_point(5, 3, &digits), idx);
        }
    }

    #[test]
    fn parse_example_function() {
        let e = parse_poly("2*x1^2*x4^2+2*x1^2+x2^2+x3*x4", 3, 5).unwrap();
        assert_eq!(e.monomials().len(), 4);
        let coeffs: Vec<u32> = e.monomials().iter().map(|m| m.coeff).collect();
        assert_eq!(coeffs, vec![2, 2, 1, 1]);
        assert_eq!(e.monomials()[0].exponents, vec![2, 0, 0, 2, 0]);
    }

    #[test]
    fn parse_single_variable() {
        let e = parse_poly("x1", 3, 1).unwrap();
        assert_eq!(e.monomials().len(), 1);
        assert_eq!(e.monomials()[0].coeff, 1);
        assert_eq!(e.monomials()[0].exponents, vec![1]);
    }

    #[test]
    fn parse_errors() {
        assert!(matches!(
            parse_poly("x6", 3, 5),
            Err(ParseError::VariableIndexOutOfRange { index: 6, .. })
        ));
        assert!(matches!(parse_poly("3*x1", 3, 2), Err(ParseError::ZeroCoefficient { .. })));
        assert!(parse_poly("x1+", 3, 2).is_err());
        assert!(parse_poly("", 3, 2).is_err());
        assert!(parse_poly("2x1", 3, 2).is_err());
    }

    #[test]
    fn parse_subtraction_and_whitespace() {
        let e = parse_poly(" x1^2 - x2 ", 3, 2).unwrap();
        assert_eq!(e.monomials()[1].coeff, 2);
        let printed = e.to_string();
        assert_eq!(printed, "x1^2+2*x2");
        assert_eq!(parse_poly(&printed, 3, 2).unwrap(), e);
    }

    #[test]
    fn display_roundtrip_is_fixed_point() {
        for src in [
            "2*x1^2*x4^2+2*x1^2+x2^2+x3*x4",
            "4*x1^2*x4^4+4*x1^2*x4^3+3*x1^2*x4+x1^2+x2^2+x3*x4",
            "x1*x2",
        ] {
            let (p, n) = if src.starts_with('4') { (5, 4) } else { (3, 5) };
            let e = parse_poly(src, p, n).unwrap();
            let printed = e.to_string();
            let e2 = parse_poly(&printed, p, n).unwrap();
            assert_eq!(e, e2);
            assert_eq!(e2.to_string(), printed);
        }
    }

    #[test]
    fn eval_example_function() {
        let e = parse_poly("2*x1^2*x4^2+2*x1^2+x2^2+x3*x4", 3, 5).unwrap();
        assert_eq!(e.eval_at(&[0, 0, 0, 0, 0]), 0);
        assert_eq!(e.eval_at(&[1, 0, 0, 1, 0]), 1);
    }

    #[test]
    fn eval_to_table_small_oracle() {
        let e = parse_poly("x1^2+x2^2", 3, 2).unwrap();
        let t = e.eval_to_table();
        assert_eq!(t.values(), &[0, 1, 1, 1, 2, 2, 1, 2, 2]);
    }

    // Term-by-term evaluator with no exponent-reduction shortcuts.
    fn eval_naive(e: &PolyExpr, x: &[u32]) -> u32 {
        let p = e.p() as u64;
        let mut acc = 0u64;
        for m in e.monomials() {
            let mut term = m.coeff as u64;
            for (i, &exp) in m.exponents.iter().enumerate() {
                for _ in 0..exp {
                    term = term * x[i] as u64 % p;
                }
            }
            acc = (acc + term) % p;
        }
        acc as u32
    }

    #[test]
    fn eval_matches_naive_evaluator() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for &(p, n) in &[(3u32, 4u32), (5, 3)] {
            for _ in 0..40 {
                let terms = rng.gen_range(1..5);
                let mut src = String::new();
                for t in 0..terms {
                    if t > 0 {
                        src.push('+');
                    }
                    let mut term = format!("{}", rng.gen_range(1..p));
                    let mut has_factor = false;
                    for v in 1..=n {
                        if rng.gen_bool(0.5) {
                            term.push_str(&format!("*x{v}^{}", rng.gen_range(1..2 * p)));
                            has_factor = true;
                        }
                    }
                    if !has_factor {
                        term.push_str("*x1");
                    }
                    src.push_str(&term);
                }
                let e = match parse_poly(&src, p, n) {
                    Ok(e) => e,
                    Err(ParseError::ZeroCoefficient { .. }) => continue,
                    Err(err) => panic!("unexpected parse failure for {src}: {err}"),
                };
                let table = e.eval_to_table();
                let mut digits = vec![0u32; n as usize];
                for idx in 0..table.len() {
                    assert_eq!(table.value(idx) as u32, eval_naive(&e, &digits), "{src} at {digits:?}");
                    increment_digits(p, &mut digits);
                }
            }
        }
    }

    #[test]
    fn dot_examples() {
        assert_eq!(dot(3, &[1, 2], &[2, 2]), 0);
        assert_eq!(dot(3, &[0, 0], &[2, 1]), 0);
        assert_eq!(dot(5, &[1, 1, 1], &[1, 2, 3]), 1);
    }

    #[test]
    fn table_file_roundtrip() {
        let e = parse_poly("x1*x2", 3, 2).unwrap();
        let t = e.eval_to_table();
        let text = t.render();
        assert!(text.starts_with("3 2\n"));
        let t2 = FunctionTable::parse(&text).unwrap();
        assert_eq!(t, t2);
        assert!(FunctionTable::parse("3 2\n0 0 0\n").is_err());
        assert!(FunctionTable::parse("garbage").is_err());
    }

    #[test]
    fn scale_and_negate_points() {
        let p = 5;
        let n = 3;
        for idx in 0..125usize {
            let digits = decode_point(p, n, idx);
            for a in 0..p {
                let scaled: Vec<u32> = digits.iter().map(|&d| (a * d) % p).collect();
                assert_eq!(scale_point_index(p, n, a, idx), encode_point(p, n, &scaled));
            }
            assert_eq!(
                negate_point_index(p, n, negate_point_index(p, n, idx)),
                idx
            );
        }
    }
}
