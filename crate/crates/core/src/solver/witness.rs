//! Finite-level witness search: given generators, a support tuple `S` and
//! a jet level `m`, look for a point with `x_ij = 0` exactly when
//! `j ∉ S_i` (for `j` up to the level's variable range) annihilating every
//! jet polynomial `F_{ℓk}`, `k ≤ m`.
//!
//! A found point is verified exactly and returned as a coefficient
//! sequence tuple (apply `psi` to get the series). Emptiness is *proved*
//! only by the linear strategy; grid and random search report
//! `Inconclusive` on exhaustion.

use std::collections::BTreeMap;

use num::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::diffpoly::DiffPolynomial;
use crate::error::{Error, Result};
use crate::ordinary::{OrdinaryPolynomial, Var};
use crate::series::{CoeffSequence, Rational};
use crate::support::SupportSet;

/// How to search the torus slice.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum WitnessStrategy {
    /// Linear solve when every constraint is affine, grid otherwise.
    Auto,
    /// Exact linear solve; fails on nonlinear constraints.
    Linear,
    /// Exhaustive grid over a small pool of nonzero rationals.
    Grid,
    /// Randomized sampling with the given number of trials.
    Random { trials: u64 },
}

/// Outcome of a witness search.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum WitnessOutcome {
    /// A verified point of the torus slice, as one coefficient sequence
    /// per variable.
    Witness(Vec<CoeffSequence>),
    /// The slice is provably empty at this level.
    Empty,
    /// Search exhausted without a proof either way.
    Inconclusive,
}

/// Search result plus the jet-level bookkeeping needed to interpret it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WitnessReport {
    pub outcome: WitnessOutcome,
    /// Largest derivative index constrained at this level; coordinates
    /// beyond it are untouched by the check.
    pub level: u64,
    pub strategy: &'static str,
}

/// Runs the jet-level witness search. `seed` only affects the random
/// strategy.
pub fn jet_witness_search(
    gens: &[DiffPolynomial],
    s: &[SupportSet],
    m: u64,
    strategy: &WitnessStrategy,
    seed: u64,
) -> Result<WitnessReport> {
    let n = s.len().max(1);
    let gens: Vec<DiffPolynomial> = gens
        .iter()
        .map(|g| {
            if g.var_count() > n {
                Err(Error::ArityMismatch { expected: n, got: g.var_count() })
            } else {
                Ok(g.with_vars(n))
            }
        })
        .collect::<Result<_>>()?;

    // Jet polynomials F_{ℓk}, k ≤ m, and the variable range they span.
    let mut jets: Vec<OrdinaryPolynomial> = Vec::new();
    let mut level = 0u64;
    for gen in &gens {
        let (polys, gen_level) = gen.jet_polys(m)?;
        level = level.max(gen_level);
        jets.extend(polys);
    }

    // Coordinates allowed to be nonzero: x_ij with j ∈ S_i, j ≤ level.
    let torus_vars: Vec<Var> = (1..=n)
        .flat_map(|i| {
            let s_i = &s[i - 1];
            (0..=level).filter(|&j| s_i.contains(j)).map(move |j| (i, j))
        })
        .collect();

    // Impose the zero pattern; the survivors constrain only torus
    // coordinates.
    let constraints: Vec<OrdinaryPolynomial> = jets
        .iter()
        .map(|f| f.substitute_zero(|(i, j)| !s[i - 1].contains(j)))
        .collect();

    // Constant constraints decide immediately.
    let mut live: Vec<&OrdinaryPolynomial> = Vec::new();
    for f in &constraints {
        match f.as_constant() {
            Some(c) if c.is_zero() => {}
            Some(_) => {
                return Ok(WitnessReport {
                    outcome: WitnessOutcome::Empty,
                    level,
                    strategy: "constant",
                })
            }
            None => live.push(f),
        }
    }
    if live.is_empty() {
        // No constraints left: any all-nonzero assignment works.
        let assignment: BTreeMap<Var, Rational> =
            torus_vars.iter().map(|&v| (v, Rational::one())).collect();
        let outcome = WitnessOutcome::Witness(assignment_to_sequences(n, &assignment));
        return Ok(WitnessReport { outcome, level, strategy: "trivial" });
    }

    let all_affine = live.iter().all(|f| f.is_affine());
    let (outcome, strategy) = match strategy {
        WitnessStrategy::Linear if !all_affine => {
            return Err(Error::StrategyNotApplicable(
                "linear strategy requires affine jet constraints; use grid or random".into(),
            ))
        }
        WitnessStrategy::Auto if all_affine => (linear_search(&live, &torus_vars), "linear"),
        WitnessStrategy::Linear => (linear_search(&live, &torus_vars), "linear"),
        WitnessStrategy::Auto | WitnessStrategy::Grid => {
            (grid_search(&live, &torus_vars)?, "grid")
        }
        WitnessStrategy::Random { trials } => {
            (random_search(&live, &torus_vars, *trials, seed), "random")
        }
    };
    let outcome = match outcome {
        SliceSearch::Point(assignment) => {
            debug_assert!(verify_point(&constraints, &assignment));
            WitnessOutcome::Witness(assignment_to_sequences(n, &assignment))
        }
        SliceSearch::ProvedEmpty => WitnessOutcome::Empty,
        SliceSearch::Exhausted => WitnessOutcome::Inconclusive,
    };
    Ok(WitnessReport { outcome, level, strategy })
}

enum SliceSearch {
    Point(BTreeMap<Var, Rational>),
    ProvedEmpty,
    Exhausted,
}

fn verify_point<'a>(
    constraints: impl IntoIterator<Item = &'a OrdinaryPolynomial>,
    point: &BTreeMap<Var, Rational>,
) -> bool {
    constraints
        .into_iter()
        .all(|f| f.eval_with(|v| point.get(&v).cloned().unwrap_or_else(Rational::zero)).is_zero())
        && point.values().all(|x| !x.is_zero())
}

fn assignment_to_sequences(n: usize, point: &BTreeMap<Var, Rational>) -> Vec<CoeffSequence> {
    let mut out = vec![CoeffSequence::new(); n];
    for (&(i, j), value) in point {
        out[i - 1].set(j, value.clone());
    }
    out
}

// ---------------------------------------------------------------------
// Linear strategy: exact Gauss-Jordan elimination over the rationals
// ---------------------------------------------------------------------

/// Solves the affine system on the torus coordinates and decides whether
/// the solution space meets the torus (all coordinates nonzero). The
/// answer is exact in both directions: a returned point is a solution,
/// and `ProvedEmpty` means the affine solution set misses the torus.
fn linear_search(constraints: &[&OrdinaryPolynomial], vars: &[Var]) -> SliceSearch {
    let ncols = vars.len();
    let index: BTreeMap<Var, usize> = vars.iter().enumerate().map(|(k, &v)| (v, k)).collect();

    // Rows are [coefficients | rhs] for Σ c_v x_v = −constant.
    let mut rows: Vec<Vec<Rational>> = Vec::with_capacity(constraints.len());
    for f in constraints {
        let (coeffs, constant) = f.linear_form().expect("caller checked affinity");
        let mut row = vec![Rational::zero(); ncols + 1];
        for (v, c) in coeffs {
            row[index[&v]] = c;
        }
        row[ncols] = -constant;
        rows.push(row);
    }

    // Gauss-Jordan with full normalization.
    let mut pivot_of_col: Vec<Option<usize>> = vec![None; ncols];
    let mut rank = 0;
    for col in 0..ncols {
        let Some(pivot_row) = (rank..rows.len()).find(|&r| !rows[r][col].is_zero()) else {
            continue;
        };
        rows.swap(rank, pivot_row);
        let inv = rows[rank][col].recip();
        for x in rows[rank].iter_mut() {
            *x *= inv.clone();
        }
        let pivot_vals = rows[rank].clone();
        for (r, row) in rows.iter_mut().enumerate() {
            if r != rank && !row[col].is_zero() {
                let factor = row[col].clone();
                for (x, p) in row.iter_mut().zip(&pivot_vals) {
                    *x -= p * &factor;
                }
            }
        }
        pivot_of_col[col] = Some(rank);
        rank += 1;
    }

    // A remaining row with zero coefficients and nonzero rhs is `0 = c`.
    for row in rows.iter().skip(rank) {
        if !row[ncols].is_zero() {
            return SliceSearch::ProvedEmpty;
        }
    }

    let free_cols: Vec<usize> =
        (0..ncols).filter(|&c| pivot_of_col[c].is_none()).collect();

    // Particular solution (free coordinates at zero) and nullspace basis.
    let mut particular = vec![Rational::zero(); ncols];
    for (col, pivot) in pivot_of_col.iter().enumerate() {
        if let Some(r) = pivot {
            particular[col] = rows[*r][ncols].clone();
        }
    }
    let basis: Vec<Vec<Rational>> = free_cols
        .iter()
        .map(|&fc| {
            let mut vec = vec![Rational::zero(); ncols];
            vec[fc] = Rational::one();
            for (col, pivot) in pivot_of_col.iter().enumerate() {
                if let Some(r) = pivot {
                    vec[col] = -rows[*r][fc].clone();
                }
            }
            vec
        })
        .collect();

    // A coordinate identically zero on the solution space rules out every
    // torus point.
    for col in 0..ncols {
        if particular[col].is_zero() && basis.iter().all(|b| b[col].is_zero()) {
            return SliceSearch::ProvedEmpty;
        }
    }

    // Each coordinate of particular + Σ_b μ^{b+1}·basis_b is a nonzero
    // polynomial in μ of degree ≤ |basis|, so at most ncols·|basis| values
    // of μ hit a zero coordinate.
    let budget = (ncols as u64) * (basis.len() as u64) + 1;
    for mu in 1..=budget {
        let mu = Rational::from_integer(mu.into());
        let mut point = particular.clone();
        let mut weight = Rational::one();
        for b in &basis {
            weight *= mu.clone();
            for (x, delta) in point.iter_mut().zip(b) {
                *x += &weight * delta;
            }
        }
        if point.iter().all(|x| !x.is_zero()) {
            let assignment = vars.iter().copied().zip(point).collect();
            return SliceSearch::Point(assignment);
        }
    }
    unreachable!("a torus point exists within the search budget");
}

// ---------------------------------------------------------------------
// Grid and random strategies
// ---------------------------------------------------------------------

fn grid_pool() -> Vec<Rational> {
    [(1, 1), (-1, 1), (2, 1), (-2, 1), (1, 2), (-1, 2), (3, 1), (-3, 1)]
        .iter()
        .map(|&(n, d)| Rational::new(n.into(), d.into()))
        .collect()
}

const GRID_CAP: u64 = 1 << 20;

fn grid_search(constraints: &[&OrdinaryPolynomial], vars: &[Var]) -> Result<SliceSearch> {
    let pool = grid_pool();
    let total = (pool.len() as u128)
        .checked_pow(vars.len() as u32)
        .ok_or(Error::SearchSpaceExceeded { size: u128::MAX, cap: GRID_CAP })?;
    if total > GRID_CAP as u128 {
        return Err(Error::SearchSpaceExceeded { size: total, cap: GRID_CAP });
    }
    let mut digits = vec![0usize; vars.len()];
    loop {
        let point: BTreeMap<Var, Rational> = vars
            .iter()
            .zip(&digits)
            .map(|(&v, &d)| (v, pool[d].clone()))
            .collect();
        if verify_point(constraints.iter().copied(), &point) {
            return Ok(SliceSearch::Point(point));
        }
        let mut i = 0;
        while i < digits.len() {
            digits[i] += 1;
            if digits[i] < pool.len() {
                break;
            }
            digits[i] = 0;
            i += 1;
        }
        if i == digits.len() {
            return Ok(SliceSearch::Exhausted);
        }
    }
}

fn random_search(
    constraints: &[&OrdinaryPolynomial],
    vars: &[Var],
    trials: u64,
    seed: u64,
) -> SliceSearch {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..trials {
        let point: BTreeMap<Var, Rational> = vars
            .iter()
            .map(|&v| {
                let numer = loop {
                    let x: i64 = rng.gen_range(-9..=9);
                    if x != 0 {
                        break x;
                    }
                };
                let denom: i64 = rng.gen_range(1..=9);
                (v, Rational::new(numer.into(), denom.into()))
            })
            .collect();
        if verify_point(constraints.iter().copied(), &point) {
            return SliceSearch::Point(point);
        }
    }
    SliceSearch::Exhausted
}
