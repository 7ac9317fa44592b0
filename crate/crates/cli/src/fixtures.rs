//! Built-in verification fixtures: expected parameters, enumerators, and
//! dual parameters for the 22 reference constructions, stored as literal
//! data so a regression in prediction code cannot mask a transcription
//! error in the expectations.

use serde::Deserialize;

#[derive(Debug, Clone, Deserialize)]
pub struct Fixture {
    pub id: u32,
    pub name: String,
    pub p: u32,
    pub n: u32,
    pub poly: String,
    pub profile: ProfilePins,
    pub codes: Vec<CodePin>,
}

/// Stated classification facts; absent fields are not pinned.
#[derive(Debug, Clone, Deserialize)]
pub struct ProfilePins {
    pub s: u32,
    pub regularity: String,
    pub k: Option<i64>,
    /// Side of 0 in the sign partition of f.
    pub side_zero: Option<i8>,
    /// Side of 0 in the dual partition.
    pub dual_side_zero: Option<i8>,
    /// Whether the function is scaling-homogeneous with an even exponent.
    pub nwrf: Option<bool>,
    pub dual_bent: bool,
}

#[derive(Debug, Clone, Deserialize)]
pub struct CodePin {
    pub construction: String,
    pub punctured: bool,
    /// [length, dimension, minimum distance].
    pub parameters: [u64; 3],
    /// Nonzero (weight, multiplicity) pairs.
    pub enumerator: Vec<(u64, i64)>,
    /// Dual [length, dimension, minimum distance].
    pub dual: [u64; 3],
    /// Frozen sufficient-condition minimality verdict.
    pub ab_minimal: bool,
    /// True where the construction's stated amplitude range guarantees
    /// minimality, in which case ab_minimal must also hold.
    pub minimal_guaranteed: bool,
}

pub fn builtin() -> Vec<Fixture> {
    serde_json::from_str(include_str!("../fixtures/examples.json"))
        .expect("embedded fixture data parses")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fixtures_load_and_count() {
        let fixtures = builtin();
        assert_eq!(fixtures.len(), 22);
        assert!(fixtures.iter().all(|f| !f.codes.is_empty()));
        // totals are consistent: sum of multiplicities is p^dim - 1
        for f in &fixtures {
            for code in &f.codes {
                let total: i64 = code.enumerator.iter().map(|&(_, c)| c).sum();
                let expect = (f.p as i64).pow(code.parameters[1] as u32) - 1;
                assert_eq!(total, expect, "fixture {} {}", f.id, code.construction);
                assert_eq!(code.parameters[2], code.enumerator[0].0);
                assert_eq!(code.dual[0], code.parameters[0]);
                assert_eq!(code.dual[1], code.parameters[0] - code.parameters[1]);
                if code.minimal_guaranteed {
                    assert!(code.ab_minimal, "fixture {} guarantee", f.id);
                }
            }
        }
    }
}
