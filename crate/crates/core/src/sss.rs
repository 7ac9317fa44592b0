//! Massey-style secret sharing on a constructed code.
//!
//! A scheme context wraps the generator columns g_0, ..., g_{m-1} of a code
//! C (column j is the functional sending a message to codeword entry j).
//! Dealing and recovery follow the classic construction on C itself: the
//! dealer picks u with u·g_0 = secret and hands out the codeword tail.
//! The access-structure analysis targets the scheme hosted on the dual of a
//! minimal C; its minimal access sets are the supports of codewords of C
//! with first coordinate 1, so everything enumerates C and the dual is
//! never materialized.

use std::collections::HashMap;
use std::fmt;

use crate::codes::{CodeKind, CodeSpec, OpBudget};
use crate::funcspace::{decode_point, FunctionTable};

/// Generator-column view of a code, hosting the dealing and analysis ops.
#[derive(Debug, Clone)]
pub struct SchemeCtx {
    p: u32,
    /// Message dimension k of the base code.
    k: u32,
    /// One column per coordinate, each of length k.
    columns: Vec<Vec<u32>>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SssError {
    ZeroSecretColumn,
    WrongLength { expected: usize, got: usize },
    ConstraintViolated,
    BadParticipant { index: usize },
    NotAnAccessSet,
    BudgetExceeded { cost: u128, budget: u64 },
    MissingFunction,
}

impl fmt::Display for SssError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SssError::ZeroSecretColumn => write!(f, "secret coordinate column is zero"),
            SssError::WrongLength { expected, got } => {
                write!(f, "vector length {got}, expected {expected}")
            }
            SssError::ConstraintViolated => write!(f, "randomness does not satisfy u·g0 = secret"),
            SssError::BadParticipant { index } => write!(f, "no participant with index {index}"),
            SssError::NotAnAccessSet => {
                write!(f, "secret column is outside the span of the given columns")
            }
            SssError::BudgetExceeded { cost, budget } => {
                write!(f, "enumeration cost {cost} exceeds the operation budget {budget}")
            }
            SssError::MissingFunction => {
                write!(f, "this code kind needs the source function to build columns")
            }
        }
    }
}

impl std::error::Error for SssError {}

impl SchemeCtx {
    /// Build the column view of a constructed code. Two-parameter codes
    /// need the source function (column at x is (f(x), -x)); defining-set
    /// columns are the points themselves.
    pub fn from_code(spec: &CodeSpec, f: Option<&FunctionTable>) -> Result<Self, SssError> {
        let p = spec.p;
        let n = spec.n;
        let mut columns = Vec::with_capacity(spec.coords.len());
        match spec.kind {
            CodeKind::FirstGen => {
                let f = f.ok_or(SssError::MissingFunction)?;
                for &x in &spec.coords {
                    let digits = decode_point(p, n, x as usize);
                    let mut col = Vec::with_capacity(n as usize + 1);
                    col.push(f.value(x as usize) as u32);
                    col.extend(digits.iter().map(|&d| (p - d) % p));
                    columns.push(col);
                }
            }
            CodeKind::DefSet(_) => {
                for &x in &spec.coords {
                    columns.push(decode_point(p, n, x as usize));
                }
            }
        }
        Self::from_columns(p, columns)
    }

    /// Raw constructor, also used to inject degenerate schemes in tests.
    pub fn from_columns(p: u32, columns: Vec<Vec<u32>>) -> Result<Self, SssError> {
        assert!(!columns.is_empty(), "scheme needs at least one coordinate");
        let k = columns[0].len() as u32;
        assert!(columns.iter().all(|c| c.len() == k as usize), "ragged columns");
        if columns[0].iter().all(|&v| v == 0) {
            return Err(SssError::ZeroSecretColumn);
        }
        Ok(SchemeCtx { p, k, columns })
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn dimension(&self) -> u32 {
        self.k
    }

    /// Number of participants: every coordinate except the secret one.
    pub fn participants(&self) -> usize {
        self.columns.len() - 1
    }

    fn dot(&self, u: &[u32], col: &[u32]) -> u32 {
        let mut acc = 0u64;
        for (&a, &b) in u.iter().zip(col) {
            acc += a as u64 * b as u64;
        }
        (acc % self.p as u64) as u32
    }

    /// Compute the share vector (t_1, ..., t_{m-1}) from randomness u;
    /// requires u·g_0 = secret.
    pub fn deal(&self, secret: u32, u: &[u32]) -> Result<Vec<u32>, SssError> {
        if u.len() != self.k as usize {
            return Err(SssError::WrongLength { expected: self.k as usize, got: u.len() });
        }
        if self.dot(u, &self.columns[0]) != secret % self.p {
            return Err(SssError::ConstraintViolated);
        }
        Ok(self.columns[1..].iter().map(|col| self.dot(u, col)).collect())
    }

    /// Deterministically adjust free entropy into valid randomness: keep
    /// every component except the pivot (first nonzero entry of g_0) and
    /// solve that one for u·g_0 = secret. Returns (u, shares).
    pub fn deal_adjusted(&self, secret: u32, entropy: &[u32]) -> Result<(Vec<u32>, Vec<u32>), SssError> {
        if entropy.len() != self.k as usize {
            return Err(SssError::WrongLength { expected: self.k as usize, got: entropy.len() });
        }
        let g0 = &self.columns[0];
        let pivot = g0.iter().position(|&v| v != 0).ok_or(SssError::ZeroSecretColumn)?;
        let mut u: Vec<u32> = entropy.iter().map(|&v| v % self.p).collect();
        u[pivot] = 0;
        let partial = self.dot(&u, g0);
        let need = (secret % self.p + self.p - partial) % self.p;
        u[pivot] = need * inverse_mod(self.p, g0[pivot]) % self.p;
        let shares = self.deal(secret, &u)?;
        Ok((u, shares))
    }

    /// Recover the secret from the shares of an access set: solve
    /// g_0 = Σ x_k·g_{j_k} over F_p and return Σ x_k·t_{j_k}.
    pub fn recover(&self, access: &[usize], shares: &[u32]) -> Result<u32, SssError> {
        if shares.len() != access.len() {
            return Err(SssError::WrongLength { expected: access.len(), got: shares.len() });
        }
        for &j in access {
            if j < 1 || j > self.participants() {
                return Err(SssError::BadParticipant { index: j });
            }
        }
        let p = self.p;
        let k = self.k as usize;
        let cols = access.len();
        // Augmented system [g_{j_1} ... g_{j_c} | g_0], row-reduced over F_p.
        let mut mat = vec![0u32; k * (cols + 1)];
        for (c, &j) in access.iter().enumerate() {
            for r in 0..k {
                mat[r * (cols + 1) + c] = self.columns[j][r];
            }
        }
        for r in 0..k {
            mat[r * (cols + 1) + cols] = self.columns[0][r];
        }
        let width = cols + 1;
        let mut pivot_col_of_row = Vec::new();
        let mut rank_row = 0usize;
        for col in 0..cols {
            let Some(pr) = (rank_row..k).find(|&r| mat[r * width + col] != 0) else {
                continue;
            };
            for c in 0..width {
                mat.swap(rank_row * width + c, pr * width + c);
            }
            let inv = inverse_mod(p, mat[rank_row * width + col]);
            for c in 0..width {
                mat[rank_row * width + c] = mat[rank_row * width + c] * inv % p;
            }
            for r in 0..k {
                if r != rank_row && mat[r * width + col] != 0 {
                    let factor = mat[r * width + col];
                    for c in 0..width {
                        let sub = factor * mat[rank_row * width + c] % p;
                        mat[r * width + c] = (mat[r * width + c] + p - sub) % p;
                    }
                }
            }
            pivot_col_of_row.push(col);
            rank_row += 1;
        }
        // Consistent iff no row reads 0 = nonzero in the augmented column.
        for r in rank_row..k {
            if mat[r * width + cols] != 0 {
                return Err(SssError::NotAnAccessSet);
            }
        }
        let mut coeffs = vec![0u32; cols];
        for (row, &col) in pivot_col_of_row.iter().enumerate() {
            coeffs[col] = mat[row * width + cols];
        }
        let mut secret = 0u64;
        for (c, &x) in coeffs.iter().enumerate() {
            secret += x as u64 * shares[c] as u64;
        }
        Ok((secret % p as u64) as u32)
    }

    /// Is column g_j a scalar multiple of g_0?
    pub fn parallel_to_secret(&self, j: usize) -> bool {
        let g0 = &self.columns[0];
        let gj = &self.columns[j];
        for c in 1..self.p {
            if g0.iter().zip(gj).all(|(&a, &b)| (c * a) % self.p == b) {
                return true;
            }
        }
        false
    }

    /// Enumerate the minimal access sets of the scheme hosted on the dual:
    /// supports of codewords of the base code with first coordinate 1,
    /// restricted to participant coordinates, then filtered for
    /// support-minimality (a no-op exactly when the base code is minimal).
    pub fn minimal_access_sets(&self, budget: OpBudget) -> Result<AccessStructure, SssError> {
        let p = self.p;
        let k = self.k as usize;
        let m = self.columns.len();
        let raw_count = (p as u128).pow(self.k - 1);
        let cost = raw_count * m as u128;
        if cost > budget.0 as u128 {
            return Err(SssError::BudgetExceeded { cost, budget: budget.0 });
        }

        let g0 = &self.columns[0];
        let pivot = g0.iter().position(|&v| v != 0).ok_or(SssError::ZeroSecretColumn)?;
        let inv = inverse_mod(p, g0[pivot]);
        let words = (m - 1).div_ceil(64);

        let mut supports: Vec<Vec<u64>> = Vec::with_capacity(raw_count as usize);
        let mut sizes: Vec<u32> = Vec::with_capacity(raw_count as usize);
        let mut free = vec![0u32; k - 1];
        loop {
            let mut u = vec![0u32; k];
            let mut fi = 0;
            for (i, slot) in u.iter_mut().enumerate() {
                if i != pivot {
                    *slot = free[fi];
                    fi += 1;
                }
            }
            let partial = self.dot(&u, g0);
            u[pivot] = (1 + p - partial) % p * inv % p;
            debug_assert_eq!(self.dot(&u, g0), 1);

            let mut bits = vec![0u64; words];
            let mut size = 0u32;
            for (j, col) in self.columns.iter().enumerate().skip(1) {
                if self.dot(&u, col) != 0 {
                    bits[(j - 1) / 64] |= 1u64 << ((j - 1) % 64);
                    size += 1;
                }
            }
            supports.push(bits);
            sizes.push(size);

            // next free assignment
            let mut done = true;
            for d in free.iter_mut().rev() {
                *d += 1;
                if *d < p {
                    done = false;
                    break;
                }
                *d = 0;
            }
            if done {
                break;
            }
        }

        // Deduplicate, then drop any support strictly containing another.
        let mut order: Vec<usize> = (0..supports.len()).collect();
        order.sort_by_key(|&i| (sizes[i], supports[i].clone()));
        let mut kept: Vec<Vec<u64>> = Vec::new();
        let mut duplicates = 0usize;
        let mut non_minimal = 0usize;
        'outer: for &i in &order {
            let cand = &supports[i];
            for prev in &kept {
                if prev == cand {
                    duplicates += 1;
                    continue 'outer;
                }
                if prev.iter().zip(cand).all(|(a, b)| a & b == *a) {
                    non_minimal += 1;
                    continue 'outer;
                }
            }
            kept.push(cand.clone());
        }

        Ok(AccessStructure {
            participants: m - 1,
            raw_count: supports.len(),
            duplicates,
            filtered_non_minimal: non_minimal,
            sets: kept,
        })
    }

    /// Coverage statistics of the minimal access structure. `d_dual` is the
    /// minimum distance of the dual of the base code (the hosting code of
    /// the scheme). For d_dual = 2 participants split by column parallelism;
    /// for d_dual ≥ 3 every t-set with t ≤ min(k-1, d_dual-2) must be
    /// involved in (p-1)^t·p^{k-(t+1)} sets, verified by exhaustive tally.
    pub fn coverage_report(&self, access: &AccessStructure, d_dual: u32) -> CoverageReport {
        let p = self.p as i64;
        let k = self.k;
        let total = access.sets.len();
        let mut per_participant = Vec::with_capacity(access.participants);
        for j in 1..=access.participants {
            let count = access
                .sets
                .iter()
                .filter(|bits| bits[(j - 1) / 64] >> ((j - 1) % 64) & 1 == 1)
                .count();
            per_participant.push(ParticipantCoverage {
                participant: j,
                in_sets: count,
                parallel_to_secret: self.parallel_to_secret(j),
            });
        }

        let expect_nonparallel =
            if k >= 2 { ((p - 1) * p.pow(k - 2)) as usize } else { 0 };
        let mut d2_consistent = None;
        let mut t_checks = Vec::new();
        if d_dual == 2 && k >= 2 {
            d2_consistent = Some(per_participant.iter().all(|pc| {
                if pc.parallel_to_secret {
                    pc.in_sets == total
                } else {
                    pc.in_sets == expect_nonparallel
                }
            }));
        } else if d_dual >= 3 {
            let t_max = (k - 1).min(d_dual - 2);
            for t in 1..=t_max {
                t_checks.push(self.check_t_coverage(access, t));
            }
        }

        CoverageReport {
            total_sets: total,
            expect_nonparallel,
            per_participant,
            d2_consistent,
            t_checks,
        }
    }

    fn check_t_coverage(&self, access: &AccessStructure, t: u32) -> TCoverageCheck {
        let p = self.p as u128;
        let expected = (p - 1).pow(t) * p.pow(self.k - t - 1);
        let mut tally: HashMap<Vec<usize>, u128> = HashMap::new();
        for bits in &access.sets {
            let members: Vec<usize> = (0..access.participants)
                .filter(|&j| bits[j / 64] >> (j % 64) & 1 == 1)
                .collect();
            for combo in combinations(&members, t as usize) {
                *tally.entry(combo).or_insert(0) += 1;
            }
        }
        // every t-subset of participants must reach the expected count
        let all_subsets = binomial(access.participants as u128, t as u128);
        let ok = tally.len() as u128 == all_subsets && tally.values().all(|&c| c == expected);
        TCoverageCheck { t, expected, ok }
    }
}

/// Minimal access structure: bitset supports over participant indices.
#[derive(Debug, Clone)]
pub struct AccessStructure {
    pub participants: usize,
    /// Codewords with first coordinate 1 (p^{k-1}).
    pub raw_count: usize,
    pub duplicates: usize,
    /// Supports removed because they strictly contain a smaller one;
    /// zero exactly when the base code is minimal.
    pub filtered_non_minimal: usize,
    pub sets: Vec<Vec<u64>>,
}

impl AccessStructure {
    pub fn count(&self) -> usize {
        self.sets.len()
    }

    pub fn filtering_was_noop(&self) -> bool {
        self.duplicates == 0 && self.filtered_non_minimal == 0
    }

    /// Participant indices (1-based) of one stored set.
    pub fn set_members(&self, idx: usize) -> Vec<usize> {
        (0..self.participants)
            .filter(|&j| self.sets[idx][j / 64] >> (j % 64) & 1 == 1)
            .map(|j| j + 1)
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParticipantCoverage {
    pub participant: usize,
    pub in_sets: usize,
    pub parallel_to_secret: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TCoverageCheck {
    pub t: u32,
    pub expected: u128,
    pub ok: bool,
}

#[derive(Debug, Clone)]
pub struct CoverageReport {
    pub total_sets: usize,
    pub per_participant: Vec<ParticipantCoverage>,
    /// (p-1)·p^{k-2}, the required count for non-parallel participants.
    pub expect_nonparallel: usize,
    pub d2_consistent: Option<bool>,
    pub t_checks: Vec<TCoverageCheck>,
}

fn inverse_mod(p: u32, a: u32) -> u32 {
    assert!(a % p != 0, "zero has no inverse");
    // p is tiny; scan.
    (1..p).find(|&x| (x * a) % p == 1).expect("prime modulus")
}

fn combinations(items: &[usize], t: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    if t == 0 || t > items.len() {
        return out;
    }
    let mut idx: Vec<usize> = (0..t).collect();
    loop {
        out.push(idx.iter().map(|&i| items[i]).collect());
        // advance
        let mut i = t;
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            if idx[i] != i + items.len() - t {
                break;
            }
        }
        idx[i] += 1;
        for j in i + 1..t {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

fn binomial(n: u128, k: u128) -> u128 {
    if k > n {
        return 0;
    }
    let mut acc = 1u128;
    for j in 1..=k {
        acc = acc * (n - k + j) / j;
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::codes::{defining_set, puncture_representatives, Selector};
    use crate::funcspace::parse_poly;

    fn example_scheme() -> SchemeCtx {
        let f = parse_poly("2*x1^2*x4^2+2*x1^2+x2^2+x3*x4", 3, 5).unwrap().eval_to_table();
        let spec = defining_set(&f, Selector::Zero).unwrap();
        SchemeCtx::from_code(&spec, Some(&f)).unwrap()
    }

    #[test]
    fn deal_zero_secret_zero_randomness() {
        let ctx = example_scheme();
        let shares = ctx.deal(0, &[0; 5]).unwrap();
        assert!(shares.iter().all(|&t| t == 0));
        assert_eq!(shares.len(), ctx.participants());
    }

    #[test]
    fn deal_requires_constraint() {
        let ctx = example_scheme();
        assert!(matches!(ctx.deal(1, &[0; 5]), Err(SssError::ConstraintViolated)));
        let (u, _) = ctx.deal_adjusted(1, &[0, 2, 1, 0, 2]).unwrap();
        assert_eq!(ctx.deal(1, &u).unwrap().len(), ctx.participants());
    }

    #[test]
    fn full_set_recovers() {
        let ctx = example_scheme();
        let (_, shares) = ctx.deal_adjusted(2, &[1, 2, 0, 1, 1]).unwrap();
        let access: Vec<usize> = (1..=ctx.participants()).collect();
        assert_eq!(ctx.recover(&access, &shares).unwrap(), 2);
    }

    #[test]
    fn parallel_participant_recovers_alone() {
        let ctx = example_scheme();
        let j = (1..=ctx.participants())
            .find(|&j| ctx.parallel_to_secret(j))
            .expect("scaling-closed set has parallel columns");
        let (_, shares) = ctx.deal_adjusted(1, &[2, 0, 1, 2, 0]).unwrap();
        assert_eq!(ctx.recover(&[j], &[shares[j - 1]]).unwrap(), 1);
    }

    #[test]
    fn empty_access_rejected() {
        let ctx = example_scheme();
        assert!(matches!(ctx.recover(&[], &[]), Err(SssError::NotAnAccessSet)));
    }

    #[test]
    fn deal_recover_roundtrip_randomized() {
        use rand::{seq::SliceRandom, Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(512);
        let f = parse_poly("2*x1^2*x4^2+2*x1^2+x2^2+x3*x4", 3, 5).unwrap().eval_to_table();
        let spec = defining_set(&f, Selector::Zero).unwrap();
        let punct = puncture_representatives(&spec).unwrap();
        for ctx in [SchemeCtx::from_code(&spec, Some(&f)).unwrap(),
                    SchemeCtx::from_code(&punct, Some(&f)).unwrap()] {
            for _ in 0..25 {
                let secret = rng.gen_range(0..3);
                let entropy: Vec<u32> = (0..5).map(|_| rng.gen_range(0..3)).collect();
                let (_, shares) = ctx.deal_adjusted(secret, &entropy).unwrap();
                // random access superset: the full set always works, and a
                // random subset either recovers the true secret or errs.
                let mut idx: Vec<usize> = (1..=ctx.participants()).collect();
                idx.shuffle(&mut rng);
                let take = rng.gen_range(1..=idx.len());
                let subset: Vec<usize> = idx[..take].to_vec();
                let sub_shares: Vec<u32> = subset.iter().map(|&j| shares[j - 1]).collect();
                if let Ok(got) = ctx.recover(&subset, &sub_shares) {
                    assert_eq!(got, secret);
                }
                let all: Vec<usize> = (1..=ctx.participants()).collect();
                assert_eq!(ctx.recover(&all, &shares).unwrap(), secret);
            }
        }
    }

    #[test]
    fn minimal_access_sets_of_flagship_code() {
        let ctx = example_scheme();
        let st = ctx.minimal_access_sets(OpBudget::default()).unwrap();
        assert_eq!(st.raw_count, 81);
        assert_eq!(st.count(), 81);
        assert!(st.filtering_was_noop());
        assert_eq!(st.participants, 97);
        // dual distance of the [98, 5, 54] code is 2
        let report = ctx.coverage_report(&st, 2);
        assert_eq!(report.d2_consistent, Some(true));
        let parallel: Vec<_> =
            report.per_participant.iter().filter(|pc| pc.parallel_to_secret).collect();
        assert!(!parallel.is_empty());
        assert!(parallel.iter().all(|pc| pc.in_sets == 81));
        assert!(report
            .per_participant
            .iter()
            .filter(|pc| !pc.parallel_to_secret)
            .all(|pc| pc.in_sets == 54));
    }

    #[test]
    fn punctured_scheme_uniform_coverage() {
        let f = parse_poly("2*x1^2*x4^2+2*x1^2+x2^2+x3*x4", 3, 5).unwrap().eval_to_table();
        let spec = defining_set(&f, Selector::Zero).unwrap();
        let punct = puncture_representatives(&spec).unwrap();
        let ctx = SchemeCtx::from_code(&punct, Some(&f)).unwrap();
        let st = ctx.minimal_access_sets(OpBudget::default()).unwrap();
        assert_eq!(st.count(), 81);
        // dual distance of the [49, 5, 27] code is 3: t = 1 coverage only
        let report = ctx.coverage_report(&st, 3);
        assert_eq!(report.t_checks.len(), 1);
        assert_eq!(report.t_checks[0].expected, 54);
        assert!(report.t_checks[0].ok);
    }

    #[test]
    fn non_minimal_scheme_flagged() {
        // Repeated column: codeword supports nest, so filtering must act.
        let columns = vec![
            vec![1, 0],
            vec![0, 1],
            vec![0, 1],
            vec![1, 1],
        ];
        let ctx = SchemeCtx::from_columns(3, columns).unwrap();
        let st = ctx.minimal_access_sets(OpBudget::default()).unwrap();
        assert_eq!(st.raw_count, 3);
        assert!(!st.filtering_was_noop());
        assert!(st.count() < st.raw_count);
    }

    #[test]
    fn zero_secret_column_rejected() {
        let columns = vec![vec![0, 0], vec![1, 0]];
        assert!(matches!(SchemeCtx::from_columns(3, columns), Err(SssError::ZeroSecretColumn)));
    }
}
