//! Tropical differential polynomials: min-plus combinations of monomials
//! `ε_M` acting on support tuples, the solution predicate (minimum
//! attained at least twice, or infinite), and the tropicalization of
//! classical differential polynomials.

use std::collections::BTreeMap;
use std::fmt;

use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use crate::diffpoly::{var_factor_text, DiffPolynomial, ExponentMatrix};
use crate::error::{Error, Result};
use crate::semiring::TropValue;
use crate::series::Precision;
use crate::support::SupportSet;

/// Evaluates the tropical monomial `ε_M(S) = Σ M_ij · Val_{S_i}(j)`,
/// with infinity absorbing wherever `M_ij > 0`. The all-zero matrix gives
/// the empty product, `0`.
pub fn eval_trop_monomial(m: &ExponentMatrix, s: &[SupportSet]) -> TropValue {
    assert_eq!(s.len(), m.var_count(), "support tuple length must match the variable count");
    let mut acc = TropValue::ONE;
    for (i, j, e) in m.entries() {
        acc = acc.mul(s[i - 1].val_at(j).mul_scalar(e as u64));
        if acc.is_infinite() {
            return TropValue::Infinity;
        }
    }
    acc
}

/// A tropical differential polynomial `⊕ a_M ⊙ ε_M`.
///
/// Stored coefficients are finite: a term with coefficient `inf` is the
/// neutral element of `⊕` and is never kept, so the empty polynomial is
/// the one that evaluates to `inf` everywhere.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TropDiffPolynomial {
    n: usize,
    terms: BTreeMap<ExponentMatrix, u64>,
}

/// Result of evaluating a tropical polynomial at a support tuple: the
/// value together with every monomial attaining it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SolutionCheck {
    pub value: TropValue,
    /// Monomials attaining the minimum (empty when the value is infinite).
    pub minimizers: Vec<ExponentMatrix>,
}

impl SolutionCheck {
    /// The solution predicate: the value is infinite, or at least two
    /// distinct monomials attain it.
    pub fn is_solution(&self) -> bool {
        self.value.is_infinite() || self.minimizers.len() >= 2
    }
}

impl TropDiffPolynomial {
    /// The empty polynomial in `n` variables (identically `inf`).
    pub fn empty(n: usize) -> Self {
        TropDiffPolynomial { n: n.max(1), terms: BTreeMap::new() }
    }

    /// Builds from `(coefficient, matrix)` pairs; duplicate monomials are
    /// merged by `⊕` (minimum) and infinite coefficients are dropped.
    pub fn from_terms(
        n: usize,
        terms: impl IntoIterator<Item = (TropValue, ExponentMatrix)>,
    ) -> Self {
        let n = n.max(1);
        let mut map: BTreeMap<ExponentMatrix, u64> = BTreeMap::new();
        for (a, m) in terms {
            assert_eq!(m.var_count(), n, "exponent matrix has wrong variable count");
            if let TropValue::Finite(a) = a {
                map.entry(m).and_modify(|b| *b = (*b).min(a)).or_insert(a);
            }
        }
        TropDiffPolynomial { n, terms: map }
    }

    pub fn var_count(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn term_count(&self) -> usize {
        self.terms.len()
    }

    /// Terms as `(coefficient, matrix)` in ascending matrix order.
    pub fn terms(&self) -> impl Iterator<Item = (TropValue, &ExponentMatrix)> {
        self.terms.iter().map(|(m, &a)| (TropValue::Finite(a), m))
    }

    /// Embeds into a wider variable tuple.
    pub fn with_vars(&self, n: usize) -> TropDiffPolynomial {
        TropDiffPolynomial {
            n,
            terms: self.terms.iter().map(|(m, &a)| (m.with_vars(n), a)).collect(),
        }
    }

    /// Evaluates at a support tuple: `min over M of a_M + ε_M(S)`; `inf`
    /// for the empty polynomial.
    pub fn eval(&self, s: &[SupportSet]) -> TropValue {
        self.terms
            .iter()
            .map(|(m, &a)| TropValue::Finite(a).mul(eval_trop_monomial(m, s)))
            .fold(TropValue::ZERO, TropValue::add)
    }

    /// Evaluates and reports every monomial attaining the minimum.
    pub fn check_solution(&self, s: &[SupportSet]) -> SolutionCheck {
        let mut value = TropValue::Infinity;
        let mut minimizers: Vec<ExponentMatrix> = Vec::new();
        for (m, &a) in &self.terms {
            let v = TropValue::Finite(a).mul(eval_trop_monomial(m, s));
            if v.is_infinite() {
                continue;
            }
            if v < value {
                value = v;
                minimizers.clear();
                minimizers.push(m.clone());
            } else if v == value {
                minimizers.push(m.clone());
            }
        }
        SolutionCheck { value, minimizers }
    }

    /// The solution predicate without materializing the witness list.
    pub fn is_solution(&self, s: &[SupportSet]) -> bool {
        let mut value = TropValue::Infinity;
        let mut count = 0u32;
        for (m, &a) in &self.terms {
            let v = TropValue::Finite(a).mul(eval_trop_monomial(m, s));
            if v.is_infinite() {
                continue;
            }
            if v < value {
                value = v;
                count = 1;
            } else if v == value {
                count += 1;
                if count >= 2 {
                    return true;
                }
            }
        }
        value.is_infinite()
    }
}

/// The tropicalization `trop(P) = ⊕ val(ψ_M) ⊙ ε_M`. Requires exact
/// coefficients: the valuation of a truncated series is not certain.
pub fn tropicalize(p: &DiffPolynomial) -> Result<TropDiffPolynomial> {
    let mut terms = Vec::with_capacity(p.term_count());
    for (m, psi) in p.terms() {
        if let Precision::Order(order) = psi.precision() {
            return Err(Error::TruncatedInput { operation: "tropicalization", order });
        }
        // Exact nonzero coefficients have finite valuation.
        terms.push((psi.valuation()?, m.clone()));
    }
    Ok(TropDiffPolynomial::from_terms(p.var_count(), terms))
}

impl fmt::Display for TropDiffPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "inf");
        }
        let mut parts: Vec<String> = Vec::new();
        for (m, &a) in self.terms.iter().rev() {
            let mut factors: Vec<String> = Vec::new();
            if a != 0 || m.is_constant() {
                factors.push(a.to_string());
            }
            for (i, j, e) in m.entries() {
                for _ in 0..e {
                    factors.push(var_factor_text(i, j));
                }
            }
            parts.push(factors.join(" (*) "));
        }
        write!(f, "{}", parts.join(" (+) "))
    }
}

impl Serialize for TropDiffPolynomial {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Term<'a> {
            coeff: u64,
            monomial: &'a ExponentMatrix,
        }
        let terms: Vec<Term<'_>> =
            self.terms.iter().map(|(m, &a)| Term { coeff: a, monomial: m }).collect();
        let mut s = serializer.serialize_struct("TropDiffPolynomial", 2)?;
        s.serialize_field("vars", &self.n)?;
        s.serialize_field("terms", &terms)?;
        s.end()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::series::test_util::poly;

    fn fin(v: u64) -> TropValue {
        TropValue::Finite(v)
    }

    fn sset(elems: &[u64]) -> SupportSet {
        SupportSet::from_elements(elems.iter().copied())
    }

    /// 1 ⊙ x' ⊕ 2 ⊙ x''' ⊕ 3
    fn example_poly() -> TropDiffPolynomial {
        TropDiffPolynomial::from_terms(
            1,
            [
                (fin(1), ExponentMatrix::variable(1, 1, 1)),
                (fin(2), ExponentMatrix::variable(1, 1, 3)),
                (fin(3), ExponentMatrix::constant(1)),
            ],
        )
    }

    #[test]
    fn monomial_examples() {
        let m = ExponentMatrix::variable(1, 1, 2);
        assert_eq!(eval_trop_monomial(&m, &[sset(&[0, 3])]), fin(1));

        let m = ExponentMatrix::variable(1, 1, 1);
        assert_eq!(eval_trop_monomial(&m, &[sset(&[2, 3])]), fin(1));

        // Zero exactly when every used derivative index lies in the support.
        let m = ExponentMatrix::from_entries(2, [(1, 0, 2), (2, 1, 1)]);
        let s = [sset(&[0, 5]), sset(&[1])];
        assert_eq!(eval_trop_monomial(&m, &s), fin(0));
        let s = [sset(&[0, 5]), sset(&[2])];
        assert_ne!(eval_trop_monomial(&m, &s), fin(0));
    }

    #[test]
    fn monomial_zero_iff_membership() {
        let m = ExponentMatrix::from_entries(1, [(1, 1, 1), (1, 3, 2)]);
        for bits in 0u32..32 {
            let s = [SupportSet::from_elements((0..5).filter(|&i| bits >> i & 1 == 1))];
            let zero = eval_trop_monomial(&m, &s) == fin(0);
            let member = s[0].contains(1) && s[0].contains(3);
            assert_eq!(zero, member, "bits {bits:b}");
        }
    }

    #[test]
    fn poly_eval_examples() {
        let phi = example_poly();
        assert_eq!(phi.eval(&[sset(&[2, 3])]), fin(2));
        assert_eq!(TropDiffPolynomial::empty(1).eval(&[sset(&[0])]), TropValue::Infinity);

        // trop(x'' − t) evaluated at {3}: min(Val_S(2), 1) = 1.
        let trop = tropicalize(
            &DiffPolynomial::variable(1, 1, 2)
                .sub(&DiffPolynomial::constant(1, poly(&[(1, 1, 1)]))),
        )
        .unwrap();
        assert_eq!(trop.eval(&[sset(&[3])]), fin(1));
    }

    #[test]
    fn solution_predicate_examples() {
        let phi = example_poly();
        let check = phi.check_solution(&[sset(&[2, 3])]);
        assert!(check.is_solution());
        assert_eq!(check.value, fin(2));
        assert_eq!(
            check.minimizers,
            vec![
                ExponentMatrix::variable(1, 1, 1),
                ExponentMatrix::variable(1, 1, 3)
            ]
        );

        // {1}: the x' term alone attains 1.
        let check = phi.check_solution(&[sset(&[1])]);
        assert!(!check.is_solution());
        assert_eq!(check.value, fin(2));
        assert_eq!(check.minimizers.len(), 1);

        assert!(TropDiffPolynomial::empty(1).check_solution(&[sset(&[7])]).is_solution());
    }

    #[test]
    fn is_solution_agrees_with_check() {
        let phi = example_poly();
        for bits in 0u32..64 {
            let s = [SupportSet::from_elements((0..6).filter(|&i| bits >> i & 1 == 1))];
            assert_eq!(phi.is_solution(&s), phi.check_solution(&s).is_solution());
        }
    }

    #[test]
    fn tropicalize_examples() {
        let p = DiffPolynomial::variable(1, 1, 2)
            .sub(&DiffPolynomial::constant(1, poly(&[(1, 1, 1)])));
        let trop = tropicalize(&p).unwrap();
        assert_eq!(
            trop,
            TropDiffPolynomial::from_terms(
                1,
                [
                    (fin(0), ExponentMatrix::variable(1, 1, 2)),
                    (fin(1), ExponentMatrix::constant(1)),
                ]
            )
        );

        let quartic = DiffPolynomial::variable(1, 1, 4);
        assert_eq!(
            tropicalize(&quartic).unwrap(),
            TropDiffPolynomial::from_terms(1, [(fin(0), ExponentMatrix::variable(1, 1, 4))])
        );
    }

    #[test]
    fn tropicalize_of_t_times_p_raises_coefficients() {
        let p = DiffPolynomial::variable(1, 1, 2)
            .mul(&DiffPolynomial::variable(1, 1, 0))
            .sub(&DiffPolynomial::constant(1, poly(&[(0, 5, 1), (1, 1, 1)])));
        let t = poly(&[(1, 1, 1)]);
        let trop_p = tropicalize(&p).unwrap();
        let trop_tp = tropicalize(&p.scale(&t)).unwrap();
        let raised: Vec<_> = trop_p
            .terms()
            .map(|(a, m)| (a.mul(fin(1)), m.clone()))
            .collect();
        assert_eq!(trop_tp, TropDiffPolynomial::from_terms(1, raised));
    }

    #[test]
    fn tropicalize_rejects_truncated_coefficients() {
        use crate::series::{Precision, TruncatedSeries};
        let trunc = TruncatedSeries::from_coeffs(
            [(1, num::BigRational::from_integer(1.into()))],
            Precision::Order(3),
        );
        let p = DiffPolynomial::constant(1, trunc);
        assert!(matches!(tropicalize(&p), Err(Error::TruncatedInput { .. })));
    }

    #[test]
    fn display_round_trip() {
        let phi = example_poly();
        assert_eq!(phi.to_string(), "2 (*) x1''' (+) 1 (*) x1' (+) 3");
        for p in [
            phi,
            TropDiffPolynomial::empty(1),
            TropDiffPolynomial::from_terms(
                2,
                [
                    (fin(0), ExponentMatrix::from_entries(2, [(1, 1, 2), (2, 0, 1)])),
                    (fin(4), ExponentMatrix::constant(2)),
                ],
            ),
        ] {
            let text = p.to_string();
            assert_eq!(crate::parse::parse_trop_poly(&text).unwrap(), p, "from `{text}`");
        }
    }
}
