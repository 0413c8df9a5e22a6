//! Differential polynomials over the power-series ring: sums of monomials
//! `E_M = Π x_ij^{M_ij}` with series coefficients, evaluated by
//! substituting `x_ij ↦ d^j φ_i`, together with the extended derivation
//! (`d x_ij = x_i(j+1)`) and the jet polynomials obtained by evaluating
//! derivatives at `t = 0`.

use std::collections::BTreeMap;
use std::fmt;

use num::{One, Signed, Zero};
use serde::ser::SerializeSeq;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::ordinary::OrdinaryPolynomial;
use crate::series::{Precision, Rational, TruncatedSeries};

/// The exponent matrix of a differential monomial: entry `(i, j)` is the
/// power of `x_ij` (component `i`, 1-based; derivative order `j`,
/// 0-based).
///
/// Canonical form trims trailing all-zero derivative columns, so the
/// constant monomial in `n` variables is the `n×1` zero matrix and
/// `order()` is the highest derivative that actually occurs.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ExponentMatrix {
    rows: Vec<Vec<u32>>,
}

impl ExponentMatrix {
    /// The constant monomial (empty product) in `n` variables.
    pub fn constant(n: usize) -> Self {
        ExponentMatrix { rows: vec![vec![0]; n.max(1)] }
    }

    /// The single variable `x_ij` in `n` variables (`i` is 1-based).
    pub fn variable(n: usize, var: usize, deriv: u64) -> Self {
        Self::from_entries(n, [(var, deriv, 1)])
    }

    /// Builds a matrix from `(i, j, power)` entries, `i` 1-based.
    pub fn from_entries(n: usize, entries: impl IntoIterator<Item = (usize, u64, u32)>) -> Self {
        let mut rows = vec![Vec::new(); n.max(1)];
        for (i, j, m) in entries {
            assert!(i >= 1 && i <= rows.len(), "variable index x{i} out of range for n={n}");
            let row = &mut rows[i - 1];
            let j = j as usize;
            if row.len() <= j {
                row.resize(j + 1, 0);
            }
            row[j] += m;
        }
        Self::from_rows(rows)
    }

    /// Builds a matrix from raw rows (row `i−1` lists the powers of
    /// `x_i0, x_i1, …`), normalizing the column count.
    pub fn from_rows(rows: Vec<Vec<u32>>) -> Self {
        let mut cols = 1;
        for row in &rows {
            let used = row.iter().rposition(|&m| m != 0).map_or(0, |p| p + 1);
            cols = cols.max(used);
        }
        let rows = rows
            .into_iter()
            .map(|mut row| {
                row.resize(cols, 0);
                row
            })
            .collect();
        ExponentMatrix { rows }
    }

    /// Number of differential variables.
    pub fn var_count(&self) -> usize {
        self.rows.len()
    }

    /// The maximal derivative order `r` (0 for the constant monomial).
    pub fn order(&self) -> u64 {
        (self.rows[0].len() - 1) as u64
    }

    /// The power of `x_ij` (`i` 1-based); 0 outside the stored range.
    pub fn entry(&self, var: usize, deriv: u64) -> u32 {
        self.rows
            .get(var - 1)
            .and_then(|row| row.get(deriv as usize))
            .copied()
            .unwrap_or(0)
    }

    pub fn is_constant(&self) -> bool {
        self.rows.iter().all(|row| row.iter().all(|&m| m == 0))
    }

    pub fn total_degree(&self) -> u32 {
        self.rows.iter().flatten().sum()
    }

    /// Nonzero entries as `(i, j, power)`, `i` 1-based, ascending.
    pub fn entries(&self) -> impl Iterator<Item = (usize, u64, u32)> + '_ {
        self.rows.iter().enumerate().flat_map(|(i, row)| {
            row.iter()
                .enumerate()
                .filter(|(_, &m)| m != 0)
                .map(move |(j, &m)| (i + 1, j as u64, m))
        })
    }

    /// Entry-wise sum: the exponent matrix of the product `E_M · E_N`.
    pub fn mul(&self, rhs: &ExponentMatrix) -> ExponentMatrix {
        assert_eq!(self.var_count(), rhs.var_count(), "variable counts differ");
        let rows = self
            .rows
            .iter()
            .zip(&rhs.rows)
            .map(|(a, b)| {
                (0..a.len().max(b.len()))
                    .map(|j| a.get(j).copied().unwrap_or(0) + b.get(j).copied().unwrap_or(0))
                    .collect()
            })
            .collect();
        Self::from_rows(rows)
    }

    /// Embeds into a wider variable tuple by appending zero rows.
    pub fn with_vars(&self, n: usize) -> ExponentMatrix {
        assert!(n >= self.var_count(), "cannot shrink the variable count");
        let mut rows = self.rows.clone();
        rows.resize(n, vec![0; rows[0].len()]);
        ExponentMatrix { rows }
    }

    /// Evaluates `E_M(φ) = Π (d^j φ_i)^{M_ij}`.
    pub fn eval(&self, phi: &[TruncatedSeries]) -> Result<TruncatedSeries> {
        if phi.len() != self.var_count() {
            return Err(Error::ArityMismatch { expected: self.var_count(), got: phi.len() });
        }
        let mut out = TruncatedSeries::one();
        for (i, j, m) in self.entries() {
            let deriv = phi[i - 1].derive_n(j)?;
            out = &out * &deriv.pow(m);
        }
        Ok(out)
    }
}

// Ordered by derivative order, then entries; polynomial displays iterate
// in reverse so higher-order terms come first.
impl Ord for ExponentMatrix {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        (self.order(), &self.rows).cmp(&(other.order(), &other.rows))
    }
}

impl PartialOrd for ExponentMatrix {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Serialize for ExponentMatrix {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut seq = serializer.serialize_seq(Some(self.rows.len()))?;
        for row in &self.rows {
            seq.serialize_element(row)?;
        }
        seq.end()
    }
}

/// Text for the variable factor `x_ij`: primes up to order 3, caret
/// notation beyond.
pub(crate) fn var_factor_text(var: usize, deriv: u64) -> String {
    match deriv {
        0..=3 => format!("x{var}{}", "'".repeat(deriv as usize)),
        _ => format!("x{var}^({deriv})"),
    }
}

impl fmt::Display for ExponentMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_constant() {
            return write!(f, "1");
        }
        let factors: Vec<String> = self
            .entries()
            .flat_map(|(i, j, m)| std::iter::repeat(var_factor_text(i, j)).take(m as usize))
            .collect();
        write!(f, "{}", factors.join("*"))
    }
}

/// A differential polynomial `Σ ψ_M E_M` with series coefficients.
///
/// Terms are kept normalized: equal exponent matrices are merged and
/// exactly-zero coefficients dropped, so the valuations seen by
/// tropicalization are the true ones.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DiffPolynomial {
    n: usize,
    terms: BTreeMap<ExponentMatrix, TruncatedSeries>,
}

impl DiffPolynomial {
    /// The zero polynomial in `n` variables.
    pub fn zero(n: usize) -> Self {
        DiffPolynomial { n: n.max(1), terms: BTreeMap::new() }
    }

    /// A constant (series) polynomial.
    pub fn constant(n: usize, psi: TruncatedSeries) -> Self {
        Self::from_terms(n, [(ExponentMatrix::constant(n), psi)])
    }

    /// The variable `x_ij` as a polynomial.
    pub fn variable(n: usize, var: usize, deriv: u64) -> Self {
        Self::from_terms(n, [(ExponentMatrix::variable(n, var, deriv), TruncatedSeries::one())])
    }

    /// Builds a polynomial, merging duplicate monomials and dropping
    /// exactly-zero coefficients.
    pub fn from_terms(
        n: usize,
        terms: impl IntoIterator<Item = (ExponentMatrix, TruncatedSeries)>,
    ) -> Self {
        let n = n.max(1);
        let mut map: BTreeMap<ExponentMatrix, TruncatedSeries> = BTreeMap::new();
        for (m, psi) in terms {
            assert_eq!(m.var_count(), n, "exponent matrix has wrong variable count");
            use std::collections::btree_map::Entry;
            match map.entry(m) {
                Entry::Vacant(e) => {
                    e.insert(psi);
                }
                Entry::Occupied(mut e) => {
                    let sum = e.get() + &psi;
                    *e.get_mut() = sum;
                }
            }
        }
        map.retain(|_, psi| !psi.is_exactly_zero());
        DiffPolynomial { n, terms: map }
    }

    pub fn var_count(&self) -> usize {
        self.n
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Terms as `(matrix, coefficient)` in ascending matrix order.
    pub fn terms(&self) -> impl Iterator<Item = (&ExponentMatrix, &TruncatedSeries)> {
        self.terms.iter()
    }

    pub fn term_count(&self) -> usize {
        self.terms.len()
    }

    /// The largest derivative order appearing in any monomial.
    pub fn order(&self) -> u64 {
        self.terms.keys().map(|m| m.order()).max().unwrap_or(0)
    }

    /// True when every coefficient is an exact series.
    pub fn has_exact_coefficients(&self) -> bool {
        self.terms.values().all(|psi| psi.is_exact())
    }

    /// Embeds into a wider variable tuple.
    pub fn with_vars(&self, n: usize) -> DiffPolynomial {
        DiffPolynomial {
            n,
            terms: self
                .terms
                .iter()
                .map(|(m, psi)| (m.with_vars(n), psi.clone()))
                .collect(),
        }
    }

    pub fn add(&self, rhs: &Self) -> Self {
        assert_eq!(self.n, rhs.n, "variable counts differ");
        Self::from_terms(
            self.n,
            self.terms
                .iter()
                .chain(rhs.terms.iter())
                .map(|(m, psi)| (m.clone(), psi.clone())),
        )
    }

    pub fn neg(&self) -> Self {
        DiffPolynomial {
            n: self.n,
            terms: self.terms.iter().map(|(m, psi)| (m.clone(), -psi)).collect(),
        }
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        self.add(&rhs.neg())
    }

    pub fn mul(&self, rhs: &Self) -> Self {
        assert_eq!(self.n, rhs.n, "variable counts differ");
        let products = self.terms.iter().flat_map(|(ma, pa)| {
            rhs.terms.iter().map(move |(mb, pb)| (ma.mul(mb), pa * pb))
        });
        Self::from_terms(self.n, products)
    }

    /// Multiplies every coefficient by a series.
    pub fn scale(&self, psi: &TruncatedSeries) -> Self {
        Self::from_terms(
            self.n,
            self.terms.iter().map(|(m, c)| (m.clone(), c * psi)),
        )
    }

    /// The extended derivation: `d(ψ E_M) = dψ·E_M + ψ·d(E_M)` with
    /// `d x_ij = x_i(j+1)` expanded by the product rule.
    ///
    /// Fails only when a truncated coefficient has no precision left to
    /// differentiate; exact coefficients never fail.
    pub fn derive(&self) -> Result<DiffPolynomial> {
        let mut out: Vec<(ExponentMatrix, TruncatedSeries)> = Vec::new();
        for (m, psi) in &self.terms {
            let dpsi = psi.derive()?;
            if !dpsi.is_exactly_zero() {
                out.push((m.clone(), dpsi));
            }
            for (i, j, e) in m.entries() {
                // Replace one factor x_ij by x_i(j+1), times the exponent.
                let mut bumped = m.clone();
                bumped.rows[i - 1][j as usize] -= 1;
                let jj = (j + 1) as usize;
                if bumped.rows[i - 1].len() <= jj {
                    for row in &mut bumped.rows {
                        row.resize(jj + 1, 0);
                    }
                }
                bumped.rows[i - 1][jj] += 1;
                out.push((
                    ExponentMatrix::from_rows(bumped.rows),
                    psi.scale(&Rational::from_integer(e.into())),
                ));
            }
        }
        Ok(Self::from_terms(self.n, out))
    }

    /// The `k`-th derivative.
    pub fn derive_n(&self, k: u64) -> Result<DiffPolynomial> {
        let mut out = self.clone();
        for _ in 0..k {
            out = out.derive()?;
        }
        Ok(out)
    }

    /// Evaluates at a series tuple: `Σ ψ_M Π (d^j φ_i)^{M_ij}`, with
    /// precision propagated through every product and sum.
    pub fn eval(&self, phi: &[TruncatedSeries]) -> Result<TruncatedSeries> {
        if phi.len() != self.n {
            return Err(Error::ArityMismatch { expected: self.n, got: phi.len() });
        }
        // Derivatives of each component, computed once up to the order used.
        let mut derivs: Vec<Vec<TruncatedSeries>> =
            phi.iter().map(|p| vec![p.clone()]).collect();
        let mut acc = TruncatedSeries::zero();
        for (m, psi) in &self.terms {
            let mut term = psi.clone();
            for (i, j, e) in m.entries() {
                let cache = &mut derivs[i - 1];
                while (cache.len() as u64) <= j {
                    let next = cache.last().unwrap().derive()?;
                    cache.push(next);
                }
                term = &term * &cache[j as usize].pow(e);
            }
            acc = &acc + &term;
        }
        Ok(acc)
    }

    /// Substitutes `t = 0` into every coefficient, producing an ordinary
    /// polynomial in the `x_ij`. Requires exact coefficients.
    pub fn eval_at_zero(&self) -> Result<OrdinaryPolynomial> {
        let mut out = OrdinaryPolynomial::zero();
        for (m, psi) in &self.terms {
            if let Precision::Order(order) = psi.precision() {
                return Err(Error::TruncatedInput { operation: "evaluation at t = 0", order });
            }
            let c = psi.constant_term().expect("exact series knows its constant term");
            if c.is_zero() {
                continue;
            }
            out = out.add(&OrdinaryPolynomial::term(
                c,
                m.entries().map(|(i, j, e)| ((i, j), e)),
            ));
        }
        Ok(out)
    }

    /// The jet polynomials `[F_0, …, F_m]` with `F_k = (d^k self)|_{t=0}`,
    /// together with the largest derivative index appearing in any of them.
    pub fn jet_polys(&self, m: u64) -> Result<(Vec<OrdinaryPolynomial>, u64)> {
        let mut polys = Vec::with_capacity(m as usize + 1);
        let mut current = self.clone();
        let mut level = 0;
        for k in 0..=m {
            let f = current.eval_at_zero()?;
            level = level.max(f.max_deriv().unwrap_or(0));
            polys.push(f);
            if k < m {
                current = current.derive()?;
            }
        }
        Ok((polys, level))
    }
}

impl fmt::Display for DiffPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (idx, (m, psi)) in self.terms.iter().rev().enumerate() {
            let (neg, text) = coefficient_term_text(psi, m);
            if idx == 0 {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if neg { "-" } else { "+" })?;
            }
            write!(f, "{text}")?;
        }
        Ok(())
    }
}

/// Renders `ψ·E_M` as a signed factor string. Multi-term coefficients are
/// parenthesized; single-monomial ones are inlined with their sign pulled
/// out.
fn coefficient_term_text(psi: &TruncatedSeries, m: &ExponentMatrix) -> (bool, String) {
    let single: Vec<(u64, &Rational)> = psi.terms().collect();
    if psi.is_exact() && single.len() == 1 {
        let (k, c) = (single[0].0, single[0].1);
        let (neg, mag) = if c.is_negative() { (true, -c) } else { (false, c.clone()) };
        let mut factors: Vec<String> = Vec::new();
        if !(mag.is_one() && k == 0) || m.is_constant() {
            factors.push(crate::series::term_text(&mag, k));
        }
        if !m.is_constant() {
            factors.push(m.to_string());
        }
        (neg, factors.join("*"))
    } else if m.is_constant() {
        (false, format!("({psi})"))
    } else {
        (false, format!("({psi})*{m}"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::series::test_util::{int, poly, rat};
    use crate::series::CoeffSequence;

    fn x_double_prime_minus_t() -> DiffPolynomial {
        // x1'' − t
        DiffPolynomial::variable(1, 1, 2)
            .sub(&DiffPolynomial::constant(1, poly(&[(1, 1, 1)])))
    }

    #[test]
    fn matrix_canonical_form() {
        let m = ExponentMatrix::from_rows(vec![vec![0, 1, 0, 0]]);
        assert_eq!(m.order(), 1);
        assert_eq!(ExponentMatrix::constant(2).order(), 0);
        assert!(ExponentMatrix::constant(2).is_constant());
        assert_eq!(m.entry(1, 1), 1);
        assert_eq!(m.entry(1, 7), 0);
    }

    #[test]
    fn eval_monomial_examples() {
        // x'' on t³/6 gives t.
        let m = ExponentMatrix::from_rows(vec![vec![0, 0, 1]]);
        let cubic = poly(&[(3, 1, 6)]);
        assert_eq!(m.eval(&[cubic]).unwrap(), poly(&[(1, 1, 1)]));

        // The constant monomial is the empty product.
        let one = ExponentMatrix::constant(1);
        assert_eq!(one.eval(&[poly(&[(5, 3, 1)])]).unwrap(), TruncatedSeries::one());

        // x·x' on t² gives t²·2t = 2t³.
        let m = ExponentMatrix::from_rows(vec![vec![1, 1]]);
        assert_eq!(m.eval(&[poly(&[(2, 1, 1)])]).unwrap(), poly(&[(3, 2, 1)]));
    }

    #[test]
    fn eval_poly_examples() {
        let p = x_double_prime_minus_t();
        // Every member of the solution family vanishes: c1 + c2 t + t³/6.
        let sol = poly(&[(0, 1, 1), (1, 2, 1), (3, 1, 6)]);
        assert!(p.eval(&[sol]).unwrap().is_exactly_zero());
        // At t² the residue is 2 − t.
        assert_eq!(
            p.eval(&[poly(&[(2, 1, 1)])]).unwrap(),
            poly(&[(0, 2, 1), (1, -1, 1)])
        );
        // The empty sum is zero.
        assert!(DiffPolynomial::zero(1)
            .eval(&[poly(&[(0, 9, 1)])])
            .unwrap()
            .is_exactly_zero());
    }

    #[test]
    fn derive_examples() {
        let p = x_double_prime_minus_t();
        // d(x'' − t) = x''' − 1
        let dp = p.derive().unwrap();
        assert_eq!(
            dp,
            DiffPolynomial::variable(1, 1, 3)
                .sub(&DiffPolynomial::constant(1, TruncatedSeries::one()))
        );
        // d²(x'' − t) = x⁗
        assert_eq!(p.derive_n(2).unwrap(), DiffPolynomial::variable(1, 1, 4));
        // Constants die.
        assert!(DiffPolynomial::constant(1, TruncatedSeries::from_int(5))
            .derive()
            .unwrap()
            .is_zero());
    }

    #[test]
    fn derive_is_a_derivation() {
        // d(PQ) = dP·Q + P·dQ on a nontrivial product.
        let p = DiffPolynomial::variable(1, 1, 0)
            .mul(&DiffPolynomial::variable(1, 1, 1))
            .add(&DiffPolynomial::constant(1, poly(&[(2, 1, 1)])));
        let q = DiffPolynomial::variable(1, 1, 2)
            .sub(&DiffPolynomial::constant(1, poly(&[(0, 1, 3)])));
        let lhs = p.mul(&q).derive().unwrap();
        let rhs = p.derive().unwrap().mul(&q).add(&p.mul(&q.derive().unwrap()));
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn derivation_commutes_with_evaluation() {
        let p = x_double_prime_minus_t();
        let phi = [poly(&[(0, 1, 2), (2, -3, 1), (4, 1, 12)])];
        for k in 0..5 {
            assert_eq!(
                p.derive_n(k).unwrap().eval(&phi).unwrap(),
                p.eval(&phi).unwrap().derive_n(k).unwrap()
            );
        }
    }

    #[test]
    fn eval_at_zero_examples() {
        let p = x_double_prime_minus_t();
        assert_eq!(p.eval_at_zero().unwrap(), OrdinaryPolynomial::variable(1, 2));

        let dp = p.derive().unwrap();
        assert_eq!(
            dp.eval_at_zero().unwrap(),
            OrdinaryPolynomial::variable(1, 3).sub(&OrdinaryPolynomial::constant(int(1)))
        );

        // t·x' has no constant part.
        let tx = DiffPolynomial::variable(1, 1, 1).scale(&poly(&[(1, 1, 1)]));
        assert!(tx.eval_at_zero().unwrap().is_zero());
    }

    #[test]
    fn jet_polys_examples() {
        let p = x_double_prime_minus_t();
        let (jets, level) = p.jet_polys(2).unwrap();
        let x = OrdinaryPolynomial::variable;
        assert_eq!(
            jets,
            vec![
                x(1, 2),
                x(1, 3).sub(&OrdinaryPolynomial::constant(int(1))),
                x(1, 4)
            ]
        );
        assert_eq!(level, 4);

        let (jets, _) = DiffPolynomial::variable(1, 1, 1).jet_polys(1).unwrap();
        assert_eq!(jets, vec![x(1, 1), x(1, 2)]);

        // x·x': F0 = x10·x11, F1 = x11² + x10·x12.
        let xxp = DiffPolynomial::variable(1, 1, 0).mul(&DiffPolynomial::variable(1, 1, 1));
        let (jets, _) = xxp.jet_polys(1).unwrap();
        assert_eq!(jets[0], x(1, 0).mul(&x(1, 1)));
        assert_eq!(jets[1], x(1, 1).mul(&x(1, 1)).add(&x(1, 0).mul(&x(1, 2))));
    }

    #[test]
    fn coefficient_formula_spot_check() {
        // Coefficients of P(psi(a)) against jet polynomials at a.
        let p = x_double_prime_minus_t()
            .mul(&DiffPolynomial::variable(1, 1, 0))
            .add(&DiffPolynomial::constant(1, poly(&[(0, 1, 2)])));
        let a = [CoeffSequence::from_pairs([(0, int(2)), (1, rat(1, 3)), (3, int(-1))])];
        let series = p.eval(&[crate::series::psi(&a[0])]).unwrap();
        let (jets, _) = p.jet_polys(5).unwrap();
        for (k, f) in jets.iter().enumerate() {
            let expected =
                f.eval(&a) / Rational::from_integer(crate::series::factorial(k as u64));
            assert_eq!(series.coeff(k as u64).unwrap(), expected, "coefficient {k}");
        }
    }

    #[test]
    fn truncated_coefficient_rejected_at_zero() {
        let trunc = TruncatedSeries::from_coeffs([(0, int(1))], Precision::Order(2));
        let p = DiffPolynomial::constant(1, trunc);
        assert!(matches!(p.eval_at_zero(), Err(Error::TruncatedInput { .. })));
    }

    #[test]
    fn display_round_trip() {
        let p = x_double_prime_minus_t();
        assert_eq!(p.to_string(), "x1'' - t");
        let q = DiffPolynomial::variable(2, 1, 1)
            .mul(&DiffPolynomial::variable(2, 2, 0))
            .scale(&poly(&[(1, 1, 1)]))
            .add(&DiffPolynomial::constant(2, poly(&[(0, 1, 2)])));
        for poly in [&p, &q] {
            let text = poly.to_string();
            assert_eq!(&crate::parse::parse_diff_poly(&text).unwrap(), poly, "from `{text}`");
        }
    }
}
