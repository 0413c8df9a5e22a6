//! Window-and-depth comparison of the two solution sets attached to a
//! generator list: the tropical solutions of the derivative closure
//! `{d^k f : k ≤ depth}` versus the tropicalized solution family.
//!
//! Equality can only be certified "at depth K over window N": the
//! derivative closure is a finite stand-in for the full differential
//! ideal, so a failed equality is reported as inconclusive rather than as
//! a counterexample.

use serde::Serialize;

use crate::diffpoly::DiffPolynomial;
use crate::error::{Error, Result};
use crate::solver::family::{trop_of_family, ParamSampler, SolutionFamily};
use crate::solver::{check_series_solution, enumerate_tropical_solutions, SupportTuple, WindowSpec, DEFAULT_SEARCH_CAP};
use crate::tropical::{tropicalize, TropDiffPolynomial};

/// Tuning knobs for a verification run.
#[derive(Clone, Debug)]
pub struct VerifyOptions {
    pub window: WindowSpec,
    /// Derivative-closure depth `K`.
    pub depth: u64,
    pub cap: u64,
    pub sampler: ParamSampler,
}

impl VerifyOptions {
    pub fn new(window: WindowSpec, depth: u64) -> Self {
        VerifyOptions { window, depth, cap: DEFAULT_SEARCH_CAP, sampler: ParamSampler::default() }
    }
}

/// One element of the witness set: the `derivative`-th derivative of
/// generator `generator` (1-based), tropicalized.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct WitnessElement {
    pub generator: usize,
    pub derivative: u64,
    pub tropicalization: String,
}

/// Outcome of a verification run.
#[derive(Clone, Debug, Serialize)]
pub struct FtReport {
    pub window: WindowSpec,
    pub depth: u64,
    pub witness_set: Vec<WitnessElement>,
    /// Supports of sampled family members (`trop(Sol(G))` over the window).
    pub trop_of_solutions: Vec<SupportTuple>,
    /// Enumerated solutions of the tropicalized witness set
    /// (`Sol(trop(G))` cut to depth and window).
    pub solutions_of_trop: Vec<SupportTuple>,
    pub inclusion_ok: bool,
    pub equal: bool,
    /// Tuples solving the tropical system but not realized by the family.
    pub discrepancies: Vec<SupportTuple>,
    pub cancellation_notes: Vec<String>,
}

impl FtReport {
    /// One-line human verdict.
    pub fn status(&self) -> String {
        if !self.inclusion_ok {
            "INCLUSION VIOLATED (implementation bug: a family support fails the tropical system)"
                .into()
        } else if self.equal {
            format!(
                "equal at depth {} over window {{0..{}}}",
                self.depth, self.window.bound
            )
        } else {
            format!(
                "inclusion only: {} tropical solution(s) unrealized; inconclusive at depth {} \
                 over window {{0..{}}}",
                self.discrepancies.len(),
                self.depth,
                self.window.bound
            )
        }
    }
}

/// Compares `Sol(trop(W))` for the witness set `W = {d^k f : k ≤ depth}`
/// against the tropicalization of the solution family over the window.
///
/// Sampled family members are first checked to actually solve every
/// generator; a failure aborts the run, since the comparison would be
/// meaningless.
pub fn verify_fundamental_theorem(
    gens: &[DiffPolynomial],
    family: &SolutionFamily,
    opts: &VerifyOptions,
) -> Result<FtReport> {
    let n = family.var_count();
    for gen in gens {
        if gen.var_count() > n {
            return Err(Error::ArityMismatch { expected: n, got: gen.var_count() });
        }
    }
    let gens: Vec<DiffPolynomial> = gens.iter().map(|g| g.with_vars(n)).collect();

    // Sampled members must solve the generators exactly.
    let params = family.params().len();
    if params > 20 {
        return Err(Error::InvalidFamily("too many free parameters".into()));
    }
    for pattern in 0u64..1 << params {
        let assignment: Vec<_> = (0..params)
            .map(|i| {
                crate::series::Rational::from_integer(if pattern >> i & 1 == 1 {
                    (2 + 3 * i as i64).into()
                } else {
                    0.into()
                })
            })
            .collect();
        let member = family.evaluate(&assignment);
        let check = check_series_solution(&gens, &member, u64::MAX)?;
        if let Some(failure) = check.failure {
            return Err(Error::InvalidFamily(format!(
                "generator {} does not vanish on the member with parameter pattern {:#b} \
                 (residue coefficient {} at t^{})",
                failure.generator, pattern, failure.coefficient, failure.exponent
            )));
        }
    }

    // Witness set: derivative closure up to the requested depth.
    let mut witness_set = Vec::new();
    let mut system: Vec<TropDiffPolynomial> = Vec::new();
    for (idx, gen) in gens.iter().enumerate() {
        let mut current = gen.clone();
        for k in 0..=opts.depth {
            let trop = tropicalize(&current)?;
            witness_set.push(WitnessElement {
                generator: idx + 1,
                derivative: k,
                tropicalization: trop.to_string(),
            });
            system.push(trop);
            if k < opts.depth {
                current = current.derive()?;
            }
        }
    }

    let solutions_of_trop = enumerate_tropical_solutions(&system, n, &opts.window, opts.cap)?;
    let family_trop = trop_of_family(family, &opts.window, &opts.sampler);
    let trop_of_solutions = family_trop.supports;

    let solution_set: std::collections::BTreeSet<&SupportTuple> = solutions_of_trop.iter().collect();
    let inclusion_ok = trop_of_solutions.iter().all(|t| solution_set.contains(t));
    let family_set: std::collections::BTreeSet<&SupportTuple> = trop_of_solutions.iter().collect();
    let discrepancies: Vec<SupportTuple> = solutions_of_trop
        .iter()
        .filter(|t| !family_set.contains(t))
        .cloned()
        .collect();
    let equal = inclusion_ok && discrepancies.is_empty();

    Ok(FtReport {
        window: opts.window,
        depth: opts.depth,
        witness_set,
        trop_of_solutions,
        solutions_of_trop,
        inclusion_ok,
        equal,
        discrepancies,
        cancellation_notes: family_trop.cancellation_notes,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::{parse_diff_poly, parse_family, parse_support_set};

    fn run(gens: &[&str], family: &str, bound: u64, depth: u64) -> FtReport {
        let gens: Vec<DiffPolynomial> =
            gens.iter().map(|t| parse_diff_poly(t).unwrap()).collect();
        let fam = parse_family(family).unwrap();
        verify_fundamental_theorem(&gens, &fam, &VerifyOptions::new(WindowSpec::new(bound), depth))
            .unwrap()
    }

    #[test]
    fn equality_at_depth_two() {
        let report = run(&["x1'' - t"], "c1 + c2*t + 1/6*t^3", 4, 2);
        assert!(report.inclusion_ok);
        assert!(report.equal, "{}", report.status());
        let expected: Vec<SupportTuple> = {
            let mut v: Vec<SupportTuple> = ["{3}", "{0,3}", "{1,3}", "{0,1,3}"]
                .iter()
                .map(|s| vec![parse_support_set(s).unwrap()])
                .collect();
            v.sort();
            v
        };
        assert_eq!(report.trop_of_solutions, expected);
        assert_eq!(report.solutions_of_trop, expected);
        assert_eq!(report.witness_set.len(), 3);
    }

    #[test]
    fn inclusion_only_at_depth_zero() {
        let report = run(&["x1'' - t"], "c1 + c2*t + 1/6*t^3", 4, 0);
        assert!(report.inclusion_ok);
        assert!(!report.equal);
        assert_eq!(report.solutions_of_trop.len(), 8);
        assert_eq!(report.trop_of_solutions.len(), 4);
        assert_eq!(report.discrepancies.len(), 4);
        // The unrealized tuples are exactly the ones containing 4.
        for tuple in &report.discrepancies {
            assert!(tuple[0].contains(4));
        }
        assert!(report.status().contains("inclusion only"));
    }

    #[test]
    fn monotone_in_depth() {
        let mut previous: Option<Vec<SupportTuple>> = None;
        for depth in 0..=3 {
            let report = run(&["x1'' - t"], "c1 + c2*t + 1/6*t^3", 4, depth);
            assert!(report.inclusion_ok, "depth {depth}");
            if let Some(prev) = previous {
                let prev_set: std::collections::BTreeSet<_> = prev.iter().collect();
                assert!(
                    report.solutions_of_trop.iter().all(|t| prev_set.contains(t)),
                    "solution set grew at depth {depth}"
                );
            }
            previous = Some(report.solutions_of_trop);
        }
    }

    #[test]
    fn empty_generator_list_degenerates_to_inclusion() {
        let report = run(&[], "1 + t", 2, 0);
        assert!(report.inclusion_ok);
        assert!(!report.equal);
        // Every tuple in the window solves the empty system.
        assert_eq!(report.solutions_of_trop.len(), 8);
        assert_eq!(report.trop_of_solutions, vec![vec![parse_support_set("{0,1}").unwrap()]]);
    }

    #[test]
    fn family_that_fails_the_generators_is_rejected() {
        let gens = vec![parse_diff_poly("x1'' - t").unwrap()];
        let fam = parse_family("c1 + t^2").unwrap();
        let err = verify_fundamental_theorem(
            &gens,
            &fam,
            &VerifyOptions::new(WindowSpec::new(3), 1),
        )
        .unwrap_err();
        assert!(matches!(err, Error::InvalidFamily(_)));
    }

    #[test]
    fn report_serializes_to_json() {
        let report = run(&["x1'' - t"], "c1 + c2*t + 1/6*t^3", 4, 2);
        let json = serde_json::to_value(&report).unwrap();
        assert_eq!(json["equal"], serde_json::Value::Bool(true));
        assert!(json["witness_set"].as_array().unwrap().len() == 3);
        assert!(json["solutions_of_trop"].as_array().unwrap().len() == 4);
    }
}
