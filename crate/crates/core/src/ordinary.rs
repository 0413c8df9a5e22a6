//! Ordinary (non-differential) multivariate polynomials over the rationals
//! in the variables `x_ij` — the home of the jet polynomials obtained by
//! differentiating a generator and evaluating at `t = 0`.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num::{One, Signed, Zero};

use crate::series::{CoeffSequence, Rational};

/// A variable `x_ij`: component index `i` (1-based) and derivative order
/// `j` (0-based).
pub type Var = (usize, u64);

/// Exponent map of one monomial: variable to positive power.
type VarPowers = BTreeMap<Var, u32>;

/// Sparse multivariate polynomial over the rationals in the `x_ij`.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct OrdinaryPolynomial {
    terms: BTreeMap<VarPowers, Rational>,
}

impl OrdinaryPolynomial {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn constant(c: Rational) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(VarPowers::new(), c);
        }
        OrdinaryPolynomial { terms }
    }

    /// The variable `x_ij` as a polynomial.
    pub fn variable(var: usize, deriv: u64) -> Self {
        assert!(var >= 1, "variable indices are 1-based");
        let mut powers = VarPowers::new();
        powers.insert((var, deriv), 1);
        OrdinaryPolynomial { terms: BTreeMap::from([(powers, Rational::one())]) }
    }

    /// A single term `c · Π x_v^e`.
    pub fn term(c: Rational, powers: impl IntoIterator<Item = (Var, u32)>) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        let powers: VarPowers = powers.into_iter().filter(|&(_, e)| e > 0).collect();
        OrdinaryPolynomial { terms: BTreeMap::from([(powers, c)]) }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// The constant value, if the polynomial has no variables.
    pub fn as_constant(&self) -> Option<Rational> {
        match self.terms.len() {
            0 => Some(Rational::zero()),
            1 => {
                let (powers, c) = self.terms.iter().next().unwrap();
                powers.is_empty().then(|| c.clone())
            }
            _ => None,
        }
    }

    /// All variables that occur.
    pub fn vars(&self) -> BTreeSet<Var> {
        self.terms.keys().flat_map(|p| p.keys().copied()).collect()
    }

    /// The largest derivative order among occurring variables.
    pub fn max_deriv(&self) -> Option<u64> {
        self.terms.keys().flat_map(|p| p.keys().map(|&(_, j)| j)).max()
    }

    /// The largest total degree of a term.
    pub fn total_degree(&self) -> u32 {
        self.terms.keys().map(|p| p.values().sum()).max().unwrap_or(0)
    }

    /// True when every term has total degree ≤ 1.
    pub fn is_affine(&self) -> bool {
        self.total_degree() <= 1
    }

    /// For an affine polynomial, its linear coefficients and constant term.
    pub fn linear_form(&self) -> Option<(BTreeMap<Var, Rational>, Rational)> {
        if !self.is_affine() {
            return None;
        }
        let mut coeffs = BTreeMap::new();
        let mut constant = Rational::zero();
        for (powers, c) in &self.terms {
            match powers.iter().next() {
                None => constant = c.clone(),
                Some((&v, _)) => {
                    coeffs.insert(v, c.clone());
                }
            }
        }
        Some((coeffs, constant))
    }

    /// Substitutes `0` for every variable selected by the predicate,
    /// dropping the terms that contain one.
    pub fn substitute_zero(&self, mut is_zero_var: impl FnMut(Var) -> bool) -> Self {
        let terms = self
            .terms
            .iter()
            .filter(|(powers, _)| !powers.keys().any(|&v| is_zero_var(v)))
            .map(|(p, c)| (p.clone(), c.clone()))
            .collect();
        OrdinaryPolynomial { terms }
    }

    /// Evaluates at the point `x_ij = a[i-1].get(j)`; indices missing from
    /// the sequences read as zero.
    pub fn eval(&self, a: &[CoeffSequence]) -> Rational {
        self.eval_with(|(i, j)| {
            a.get(i - 1).map(|seq| seq.get(j)).unwrap_or_else(Rational::zero)
        })
    }

    /// Evaluates with an arbitrary variable assignment.
    pub fn eval_with(&self, mut value_of: impl FnMut(Var) -> Rational) -> Rational {
        let mut acc = Rational::zero();
        for (powers, c) in &self.terms {
            let mut term = c.clone();
            for (&v, &e) in powers {
                term *= num::pow::pow(value_of(v), e as usize);
            }
            acc += term;
        }
        acc
    }

    /// Terms as `(powers, coefficient)` pairs in key order.
    pub fn terms(&self) -> impl Iterator<Item = (&BTreeMap<Var, u32>, &Rational)> {
        self.terms.iter()
    }

    fn add_term(&mut self, powers: VarPowers, c: Rational) {
        use std::collections::btree_map::Entry;
        match self.terms.entry(powers) {
            Entry::Vacant(e) => {
                if !c.is_zero() {
                    e.insert(c);
                }
            }
            Entry::Occupied(mut e) => {
                *e.get_mut() += c;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    pub fn add(&self, rhs: &Self) -> Self {
        let mut out = self.clone();
        for (powers, c) in &rhs.terms {
            out.add_term(powers.clone(), c.clone());
        }
        out
    }

    pub fn neg(&self) -> Self {
        OrdinaryPolynomial {
            terms: self.terms.iter().map(|(p, c)| (p.clone(), -c)).collect(),
        }
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        self.add(&rhs.neg())
    }

    pub fn mul(&self, rhs: &Self) -> Self {
        let mut out = Self::zero();
        for (pa, ca) in &self.terms {
            for (pb, cb) in &rhs.terms {
                let mut powers = pa.clone();
                for (&v, &e) in pb {
                    *powers.entry(v).or_insert(0) += e;
                }
                out.add_term(powers, ca * cb);
            }
        }
        out
    }

    pub fn scale(&self, c: &Rational) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        OrdinaryPolynomial {
            terms: self.terms.iter().map(|(p, v)| (p.clone(), v * c)).collect(),
        }
    }
}

impl fmt::Display for OrdinaryPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        // Higher-degree terms first reads more naturally.
        for (idx, (powers, c)) in self.terms.iter().rev().enumerate() {
            let (sign, mag) = if c.is_negative() { ("-", -c) } else { ("+", c.clone()) };
            if idx == 0 {
                if sign == "-" {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {sign} ")?;
            }
            let mut factors: Vec<String> = Vec::new();
            if !mag.is_one() || powers.is_empty() {
                factors.push(format!("{mag}"));
            }
            for (&(i, j), &e) in powers {
                let var = format!("x{i}_{j}");
                factors.push(if e == 1 { var } else { format!("{var}^{e}") });
            }
            write!(f, "{}", factors.join("*"))?;
        }
        Ok(())
    }
}
