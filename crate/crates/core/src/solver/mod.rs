//! Solution-set machinery: brute-force enumeration of tropical solutions
//! over finite windows, exact checking of series solutions, tropicalized
//! solution families, jet-level witness search, and the comparison of
//! `Sol(trop(G))` with `trop(Sol(G))`.

pub mod family;
pub mod verify;
pub mod witness;

pub use family::{trop_of_family, FamilyTropicalization, ParamSampler, SolutionFamily};
pub use verify::{verify_fundamental_theorem, FtReport, VerifyOptions, WitnessElement};
pub use witness::{jet_witness_search, WitnessOutcome, WitnessReport, WitnessStrategy};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::series::{Precision, Rational, TruncatedSeries};
use crate::support::SupportSet;
use crate::tropical::TropDiffPolynomial;
use crate::DiffPolynomial;

/// One point of the tropical search space: a support set per variable.
pub type SupportTuple = Vec<SupportSet>;

/// Default cap on the number of candidate tuples an enumeration may visit.
pub const DEFAULT_SEARCH_CAP: u64 = 1 << 20;

/// The finite search window: supports are drawn from the subsets of
/// `{0, …, bound}`, optionally extended by a full tail starting at
/// `bound + 1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WindowSpec {
    pub bound: u64,
    #[serde(default)]
    pub allow_tail: bool,
}

impl WindowSpec {
    pub fn new(bound: u64) -> Self {
        WindowSpec { bound, allow_tail: false }
    }

    pub fn with_tail(bound: u64) -> Self {
        WindowSpec { bound, allow_tail: true }
    }

    /// Candidate supports for one variable.
    fn candidate_count(&self) -> Result<u64> {
        let bits = self.bound + 1;
        if bits > 62 {
            return Err(Error::SearchSpaceExceeded { size: u128::MAX, cap: DEFAULT_SEARCH_CAP });
        }
        Ok((1u64 << bits) * if self.allow_tail { 2 } else { 1 })
    }

    /// The `idx`-th candidate support (bitmask over `{0..=bound}`, with
    /// the low bit selecting the tail variant when tails are allowed).
    fn candidate(&self, idx: u64) -> SupportSet {
        let (mask, tail) = if self.allow_tail {
            (idx >> 1, idx & 1 == 1)
        } else {
            (idx, false)
        };
        SupportSet::new(
            (0..=self.bound).filter(|&k| mask >> k & 1 == 1),
            tail.then_some(self.bound + 1),
        )
    }
}

/// Exhaustively enumerates the support tuples in the window that solve
/// every polynomial of the system, in ascending canonical order.
///
/// All polynomials must fit within `n` variables; narrower ones are
/// embedded. Fails when the candidate space exceeds `cap`.
pub fn enumerate_tropical_solutions(
    system: &[TropDiffPolynomial],
    n: usize,
    window: &WindowSpec,
    cap: u64,
) -> Result<Vec<SupportTuple>> {
    let n = n.max(1);
    let system: Vec<TropDiffPolynomial> = system
        .iter()
        .map(|phi| {
            if phi.var_count() > n {
                Err(Error::ArityMismatch { expected: n, got: phi.var_count() })
            } else {
                Ok(phi.with_vars(n))
            }
        })
        .collect::<Result<_>>()?;

    let per = window.candidate_count()? as u128;
    let total = per
        .checked_pow(n as u32)
        .ok_or(Error::SearchSpaceExceeded { size: u128::MAX, cap })?;
    if total > cap as u128 {
        return Err(Error::SearchSpaceExceeded { size: total, cap });
    }

    let per = per as u64;
    let mut digits = vec![0u64; n];
    let mut tuple: SupportTuple = (0..n).map(|_| window.candidate(0)).collect();
    let mut solutions = Vec::new();
    loop {
        if system.iter().all(|phi| phi.is_solution(&tuple)) {
            solutions.push(tuple.clone());
        }
        // Mixed-radix increment.
        let mut i = 0;
        while i < n {
            digits[i] += 1;
            if digits[i] < per {
                tuple[i] = window.candidate(digits[i]);
                break;
            }
            digits[i] = 0;
            tuple[i] = window.candidate(0);
            i += 1;
        }
        if i == n {
            break;
        }
    }
    solutions.sort();
    Ok(solutions)
}

/// Verdict of checking a series tuple against a generator list.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SeriesCheck {
    pub ok: bool,
    pub failure: Option<CheckFailure>,
}

/// The first failing generator and the offending residue coefficient.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CheckFailure {
    /// 1-based index into the generator list.
    pub generator: usize,
    pub exponent: u64,
    pub coefficient: Rational,
}

/// Checks that every generator evaluates to `0 mod t^order` at the tuple.
/// Fails with a precision error when a residue is not known far enough.
pub fn check_series_solution(
    gens: &[DiffPolynomial],
    phi: &[TruncatedSeries],
    order: u64,
) -> Result<SeriesCheck> {
    for (idx, gen) in gens.iter().enumerate() {
        let residue = gen.eval(phi)?;
        if let Precision::Order(known) = residue.precision() {
            if known < order {
                return Err(Error::PrecisionExhausted(format!(
                    "generator {} evaluates to a series known only to O(t^{known}), \
                     cannot check modulo t^{order}",
                    idx + 1
                )));
            }
        }
        let first = residue.terms().next().map(|(k, c)| (k, c.clone()));
        if let Some((k, c)) = first {
            if k < order {
                return Ok(SeriesCheck {
                    ok: false,
                    failure: Some(CheckFailure {
                        generator: idx + 1,
                        exponent: k,
                        coefficient: c,
                    }),
                });
            }
        }
    }
    Ok(SeriesCheck { ok: true, failure: None })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::{parse_diff_poly, parse_series, parse_support_set, parse_trop_poly};
    use crate::tropical::tropicalize;

    fn sset(text: &str) -> SupportSet {
        parse_support_set(text).unwrap()
    }

    /// Naive per-tuple oracle: scan every subset mask independently of the
    /// enumerator's candidate ordering.
    fn oracle_single_var(system: &[TropDiffPolynomial], bound: u64) -> Vec<SupportTuple> {
        let mut out = Vec::new();
        for mask in 0u64..1 << (bound + 1) {
            let s = SupportSet::from_elements((0..=bound).filter(|&k| mask >> k & 1 == 1));
            let tuple = vec![s];
            if system.iter().all(|phi| phi.is_solution(&tuple)) {
                out.push(tuple);
            }
        }
        out.sort();
        out
    }

    #[test]
    fn enumerate_min_plus_example() {
        // 1⊙x' ⊕ 2⊙x''' ⊕ 3 over subsets of {0..5}: the twelve sets
        // B ∪ {2,3} ∪ C (B ⊆ {0}, C ⊆ {4,5}) and B ∪ {4} ∪ C (C ⊆ {5}).
        let phi = parse_trop_poly("1 (*) x1' (+) 2 (*) x1^(3) (+) 3").unwrap();
        let sols =
            enumerate_tropical_solutions(&[phi.clone()], 1, &WindowSpec::new(5), DEFAULT_SEARCH_CAP)
                .unwrap();
        let mut expected: Vec<SupportTuple> = Vec::new();
        for b in [false, true] {
            for c in 0u64..4 {
                let mut elems = vec![2, 3];
                if b {
                    elems.push(0);
                }
                if c & 1 == 1 {
                    elems.push(4);
                }
                if c & 2 == 2 {
                    elems.push(5);
                }
                expected.push(vec![SupportSet::from_elements(elems)]);
            }
            for c in [false, true] {
                let mut elems = vec![4];
                if b {
                    elems.push(0);
                }
                if c {
                    elems.push(5);
                }
                expected.push(vec![SupportSet::from_elements(elems)]);
            }
        }
        expected.sort();
        assert_eq!(sols.len(), 12);
        assert_eq!(sols, expected);
        assert_eq!(sols, oracle_single_var(&[phi], 5));
    }

    #[test]
    fn enumerate_second_order_example() {
        // trop(x'' − t): solutions in the window are exactly the sets with
        // 2 ∉ S and 3 ∈ S.
        let trop = tropicalize(&parse_diff_poly("x1'' - t").unwrap()).unwrap();
        let sols =
            enumerate_tropical_solutions(&[trop.clone()], 1, &WindowSpec::new(4), DEFAULT_SEARCH_CAP)
                .unwrap();
        assert_eq!(sols.len(), 8);
        for tuple in &sols {
            assert!(!tuple[0].contains(2) && tuple[0].contains(3));
        }
        assert_eq!(sols, oracle_single_var(&[trop], 4));
    }

    #[test]
    fn enumerate_with_derivative_cuts_to_family_supports() {
        let p = parse_diff_poly("x1'' - t").unwrap();
        let system = vec![
            tropicalize(&p).unwrap(),
            tropicalize(&p.derive_n(2).unwrap()).unwrap(),
        ];
        let sols =
            enumerate_tropical_solutions(&system, 1, &WindowSpec::new(4), DEFAULT_SEARCH_CAP)
                .unwrap();
        let expected: Vec<SupportTuple> = ["{3}", "{0,3}", "{1,3}", "{0,1,3}"]
            .iter()
            .map(|s| vec![sset(s)])
            .collect::<std::collections::BTreeSet<_>>()
            .into_iter()
            .collect();
        assert_eq!(sols, expected);
    }

    #[test]
    fn enumerate_empty_system_accepts_everything() {
        let sols =
            enumerate_tropical_solutions(&[], 1, &WindowSpec::new(2), DEFAULT_SEARCH_CAP).unwrap();
        assert_eq!(sols.len(), 8);
    }

    #[test]
    fn enumerate_tail_candidates() {
        // trop(x⁗): Val_S(4); solutions need S ∩ [4,∞) = ∅, so every tail
        // variant is rejected and the finite subsets of {0..3} remain.
        let trop = tropicalize(&parse_diff_poly("x1^(4)").unwrap()).unwrap();
        let sols =
            enumerate_tropical_solutions(&[trop], 1, &WindowSpec::with_tail(3), DEFAULT_SEARCH_CAP)
                .unwrap();
        assert_eq!(sols.len(), 16);
        assert!(sols.iter().all(|t| t[0].is_finite()));
    }

    #[test]
    fn enumerate_cap_guard() {
        let err =
            enumerate_tropical_solutions(&[], 2, &WindowSpec::new(10), 1 << 10).unwrap_err();
        assert!(matches!(err, Error::SearchSpaceExceeded { size, cap: 1024 } if size == 1 << 22));
    }

    #[test]
    fn check_series_solution_examples() {
        let gens = vec![parse_diff_poly("x1'' - t").unwrap()];
        let sol = parse_series("1 + 2*t + 1/6*t^3").unwrap();
        assert!(check_series_solution(&gens, &[sol], 10).unwrap().ok);

        let not_sol = parse_series("t^2").unwrap();
        let check = check_series_solution(&gens, &[not_sol], 5).unwrap();
        assert!(!check.ok);
        let failure = check.failure.unwrap();
        assert_eq!(failure.generator, 1);
        assert_eq!(failure.exponent, 0);
        assert_eq!(failure.coefficient, Rational::from_integer(2.into()));

        assert!(check_series_solution(&[], &[parse_series("t").unwrap()], 3).unwrap().ok);
    }

    #[test]
    fn check_series_solution_precision_guard() {
        let gens = vec![parse_diff_poly("x1'' - t").unwrap()];
        let truncated = parse_series("1 + 1/6*t^3 ; O(t^4)").unwrap();
        // Residue is known to O(t^2) after two derivatives.
        assert!(check_series_solution(&gens, &[truncated.clone()], 10).is_err());
        assert!(check_series_solution(&gens, &[truncated], 2).unwrap().ok);
    }
}
