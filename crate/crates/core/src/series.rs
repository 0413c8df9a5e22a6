//! Formal power series over exact rationals with explicit precision
//! tracking, and the bijection `psi` between coefficient sequences and
//! series.
//!
//! A series is either `Exact` — a polynomial in `t`, all higher
//! coefficients known to be zero — or truncated at `O(t^N)`, in which case
//! only coefficients below `N` are known. Exactness matters: the
//! tropicalization of an ideal generator must not depend on unseen
//! coefficients, so valuations are only certain for exact series (or
//! truncated ones with a visible nonzero term).

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use num::{BigInt, BigRational, One, Signed, Zero};

use crate::error::{Error, Result};
use crate::semiring::TropValue;
use crate::support::SupportSet;

/// Exact rational scalar used throughout the crate.
pub type Rational = BigRational;

/// How much of a series is known.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Precision {
    /// All coefficients are known (the series is a polynomial in `t`).
    Exact,
    /// Coefficients of `t^k` are known for `k < N` only.
    Order(u64),
}

impl Precision {
    /// The coarser of two precisions; `Exact` is neutral.
    pub fn meet(self, other: Precision) -> Precision {
        match (self, other) {
            (Precision::Exact, p) | (p, Precision::Exact) => p,
            (Precision::Order(a), Precision::Order(b)) => Precision::Order(a.min(b)),
        }
    }

    /// True when the coefficient of `t^k` is determined.
    pub fn knows(self, k: u64) -> bool {
        match self {
            Precision::Exact => true,
            Precision::Order(n) => k < n,
        }
    }
}

/// A formal power series `Σ a_k t^k` with sparse exact-rational
/// coefficients and tracked precision.
///
/// Invariants: no stored coefficient is zero, and when the precision is
/// `O(t^N)` every stored exponent is `< N`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct TruncatedSeries {
    coeffs: BTreeMap<u64, Rational>,
    precision: Precision,
}

impl TruncatedSeries {
    /// The exact zero series.
    pub fn zero() -> Self {
        TruncatedSeries { coeffs: BTreeMap::new(), precision: Precision::Exact }
    }

    /// The exact constant `1`.
    pub fn one() -> Self {
        Self::constant(Rational::one())
    }

    /// An exact constant series.
    pub fn constant(c: Rational) -> Self {
        Self::monomial(c, 0)
    }

    /// An exact integer constant.
    pub fn from_int(c: i64) -> Self {
        Self::constant(Rational::from_integer(BigInt::from(c)))
    }

    /// The exact monomial `c·t^k`.
    pub fn monomial(c: Rational, k: u64) -> Self {
        let mut coeffs = BTreeMap::new();
        if !c.is_zero() {
            coeffs.insert(k, c);
        }
        TruncatedSeries { coeffs, precision: Precision::Exact }
    }

    /// Builds a series from a coefficient map, dropping zeros and anything
    /// at or beyond the truncation order.
    pub fn from_coeffs(coeffs: impl IntoIterator<Item = (u64, Rational)>, precision: Precision) -> Self {
        let mut map: BTreeMap<u64, Rational> = BTreeMap::new();
        for (k, c) in coeffs {
            if precision.knows(k) && !c.is_zero() {
                let entry = map.entry(k).or_insert_with(Rational::zero);
                *entry += c;
                if entry.is_zero() {
                    map.remove(&k);
                }
            }
        }
        TruncatedSeries { coeffs: map, precision }
    }

    pub fn precision(&self) -> Precision {
        self.precision
    }

    pub fn is_exact(&self) -> bool {
        self.precision == Precision::Exact
    }

    /// True when the series is known to be zero everywhere.
    pub fn is_exactly_zero(&self) -> bool {
        self.is_exact() && self.coeffs.is_empty()
    }

    /// True when every known coefficient is zero (an `O(t^N)` series with
    /// no visible terms is zero *as far as can be seen*).
    pub fn is_zero_to_precision(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// The coefficient of `t^k`, or `None` when it lies beyond the
    /// truncation order.
    pub fn coeff(&self, k: u64) -> Option<Rational> {
        if self.precision.knows(k) {
            Some(self.coeffs.get(&k).cloned().unwrap_or_else(Rational::zero))
        } else {
            None
        }
    }

    /// Stored (nonzero) coefficients in ascending exponent order.
    pub fn terms(&self) -> impl Iterator<Item = (u64, &Rational)> {
        self.coeffs.iter().map(|(&k, c)| (k, c))
    }

    /// The set of exponents with nonzero coefficient. Complete for exact
    /// series; for an `O(t^N)` series this is the support below `N` only
    /// (check [`TruncatedSeries::is_exact`] to tell the cases apart).
    pub fn support(&self) -> SupportSet {
        SupportSet::from_elements(self.coeffs.keys().copied())
    }

    /// `min Supp(φ)`: infinity for the exact zero series; an error for a
    /// truncated series with no visible term, whose valuation is not
    /// determined by the known coefficients.
    pub fn valuation(&self) -> Result<TropValue> {
        match self.coeffs.keys().next() {
            Some(&k) => Ok(TropValue::Finite(k)),
            None => match self.precision {
                Precision::Exact => Ok(TropValue::Infinity),
                Precision::Order(n) => Err(Error::ValuationUnknown { order: n }),
            },
        }
    }

    /// Term-wise derivative `Σ k·a_k t^{k−1}`. Exact stays exact;
    /// `O(t^N)` drops to `O(t^{N−1})`, and `O(t^0)` has nothing left to
    /// differentiate.
    pub fn derive(&self) -> Result<TruncatedSeries> {
        let precision = match self.precision {
            Precision::Exact => Precision::Exact,
            Precision::Order(0) => {
                return Err(Error::PrecisionExhausted(
                    "cannot differentiate a series known only to O(t^0)".into(),
                ))
            }
            Precision::Order(n) => Precision::Order(n - 1),
        };
        let coeffs = self
            .coeffs
            .iter()
            .filter(|(&k, _)| k > 0)
            .map(|(&k, c)| (k - 1, c * Rational::from_integer(BigInt::from(k))));
        Ok(Self::from_coeffs(coeffs, precision))
    }

    /// The `s`-th derivative.
    pub fn derive_n(&self, s: u64) -> Result<TruncatedSeries> {
        let mut out = self.clone();
        for _ in 0..s {
            out = out.derive()?;
        }
        Ok(out)
    }

    /// Scales by an exact rational.
    pub fn scale(&self, c: &Rational) -> TruncatedSeries {
        if c.is_zero() {
            return TruncatedSeries { coeffs: BTreeMap::new(), precision: self.precision };
        }
        let coeffs = self.coeffs.iter().map(|(&k, v)| (k, v * c));
        Self::from_coeffs(coeffs, self.precision)
    }

    /// `self^n` by repeated multiplication; `n = 0` gives the exact `1`.
    pub fn pow(&self, n: u32) -> TruncatedSeries {
        let mut out = TruncatedSeries::one();
        for _ in 0..n {
            out = &out * self;
        }
        out
    }

    /// Lowers the precision to `O(t^n)` (known coefficients above are
    /// discarded). Useful for comparing against truncated expectations.
    pub fn truncate(&self, n: u64) -> TruncatedSeries {
        let precision = self.precision.meet(Precision::Order(n));
        Self::from_coeffs(self.coeffs.iter().map(|(&k, c)| (k, c.clone())), precision)
    }

    /// The constant term `a_0` when it is known.
    pub fn constant_term(&self) -> Option<Rational> {
        self.coeff(0)
    }

    /// Evaluates an exact series (a polynomial) at a rational point.
    pub fn eval_at(&self, x: &Rational) -> Result<Rational> {
        match self.precision {
            Precision::Exact => {}
            Precision::Order(order) => {
                return Err(Error::TruncatedInput { operation: "polynomial evaluation", order })
            }
        }
        let mut acc = Rational::zero();
        for (&k, c) in self.coeffs.iter().rev() {
            acc += c * num::pow::pow(x.clone(), k as usize);
        }
        Ok(acc)
    }
}

impl Add for &TruncatedSeries {
    type Output = TruncatedSeries;

    fn add(self, rhs: &TruncatedSeries) -> TruncatedSeries {
        let precision = self.precision.meet(rhs.precision);
        let coeffs = self
            .coeffs
            .iter()
            .chain(rhs.coeffs.iter())
            .map(|(&k, c)| (k, c.clone()));
        TruncatedSeries::from_coeffs(coeffs, precision)
    }
}

impl Sub for &TruncatedSeries {
    type Output = TruncatedSeries;

    fn sub(self, rhs: &TruncatedSeries) -> TruncatedSeries {
        self + &(-rhs)
    }
}

impl Neg for &TruncatedSeries {
    type Output = TruncatedSeries;

    fn neg(self) -> TruncatedSeries {
        TruncatedSeries {
            coeffs: self.coeffs.iter().map(|(&k, c)| (k, -c)).collect(),
            precision: self.precision,
        }
    }
}

impl Mul for &TruncatedSeries {
    type Output = TruncatedSeries;

    fn mul(self, rhs: &TruncatedSeries) -> TruncatedSeries {
        let precision = self.precision.meet(rhs.precision);
        let mut coeffs: BTreeMap<u64, Rational> = BTreeMap::new();
        for (&ka, ca) in &self.coeffs {
            if !precision.knows(ka) {
                break;
            }
            for (&kb, cb) in &rhs.coeffs {
                let k = ka + kb;
                if !precision.knows(k) {
                    break;
                }
                let entry = coeffs.entry(k).or_insert_with(Rational::zero);
                *entry += ca * cb;
            }
        }
        coeffs.retain(|_, c| !c.is_zero());
        TruncatedSeries { coeffs, precision }
    }
}

impl fmt::Display for TruncatedSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeffs.is_empty() {
            write!(f, "0")?;
        } else {
            for (idx, (&k, c)) in self.coeffs.iter().enumerate() {
                let (sign, mag) = if c.is_negative() { ("-", -c) } else { ("+", c.clone()) };
                if idx == 0 {
                    if sign == "-" {
                        write!(f, "-")?;
                    }
                } else {
                    write!(f, " {sign} ")?;
                }
                write!(f, "{}", term_text(&mag, k))?;
            }
        }
        if let Precision::Order(n) = self.precision {
            write!(f, " ; O(t^{n})")?;
        }
        Ok(())
    }
}

pub(crate) fn term_text(mag: &Rational, k: u64) -> String {
    let power = match k {
        0 => return format!("{mag}"),
        1 => "t".to_string(),
        _ => format!("t^{k}"),
    };
    if mag.is_one() {
        power
    } else {
        format!("{mag}*{power}")
    }
}

impl FromStr for TruncatedSeries {
    type Err = crate::parse::ParseError;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        crate::parse::parse_series(s)
    }
}

/// A finitely supported sequence `(a_j)_{j≥0}` of exact rationals: a point
/// of the coefficient space that `psi` identifies with a series.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct CoeffSequence {
    entries: BTreeMap<u64, Rational>,
}

impl CoeffSequence {
    pub fn new() -> Self {
        Self::default()
    }

    /// Builds a sequence from `(index, value)` pairs, dropping zeros.
    pub fn from_pairs(pairs: impl IntoIterator<Item = (u64, Rational)>) -> Self {
        CoeffSequence {
            entries: pairs.into_iter().filter(|(_, v)| !v.is_zero()).collect(),
        }
    }

    /// Dense front of the sequence: entry `j` holds `a_j`.
    pub fn from_dense(values: impl IntoIterator<Item = i64>) -> Self {
        Self::from_pairs(
            values
                .into_iter()
                .enumerate()
                .map(|(j, v)| (j as u64, Rational::from_integer(BigInt::from(v)))),
        )
    }

    pub fn get(&self, j: u64) -> Rational {
        self.entries.get(&j).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn set(&mut self, j: u64, value: Rational) {
        if value.is_zero() {
            self.entries.remove(&j);
        } else {
            self.entries.insert(j, value);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    /// Nonzero entries in ascending index order.
    pub fn iter(&self) -> impl Iterator<Item = (u64, &Rational)> {
        self.entries.iter().map(|(&j, v)| (j, v))
    }

    pub fn max_index(&self) -> Option<u64> {
        self.entries.keys().next_back().copied()
    }

    /// The left shift `(a_{s+j})_{j≥0}`.
    pub fn shift(&self, s: u64) -> CoeffSequence {
        Self::from_pairs(
            self.entries
                .iter()
                .filter(|(&j, _)| j >= s)
                .map(|(&j, v)| (j - s, v.clone())),
        )
    }
}

impl fmt::Display for CoeffSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let top = self.max_index().unwrap_or(0);
        write!(f, "(")?;
        for j in 0..=top {
            if j > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{}", self.get(j))?;
        }
        write!(f, ")")
    }
}

/// `j!` as an exact integer.
pub fn factorial(j: u64) -> BigInt {
    (1..=j).fold(BigInt::one(), |acc, k| acc * BigInt::from(k))
}

/// The bijection `psi(a) = Σ a_j t^j / j!` from coefficient sequences to
/// exact series.
pub fn psi(a: &CoeffSequence) -> TruncatedSeries {
    TruncatedSeries::from_coeffs(
        a.iter().map(|(j, v)| (j, v / Rational::from_integer(factorial(j)))),
        Precision::Exact,
    )
}

/// Inverse of [`psi`]: `a_j = j! · (coefficient of t^j)`. Rejects
/// truncated input, whose hidden coefficients are undetermined.
pub fn psi_inverse(phi: &TruncatedSeries) -> Result<CoeffSequence> {
    match phi.precision() {
        Precision::Exact => {}
        Precision::Order(order) => {
            return Err(Error::TruncatedInput { operation: "psi_inverse", order })
        }
    }
    Ok(CoeffSequence::from_pairs(
        phi.terms().map(|(j, c)| (j, c * Rational::from_integer(factorial(j)))),
    ))
}

#[cfg(test)]
pub(crate) mod test_util {
    use super::*;

    pub fn rat(n: i64, d: i64) -> Rational {
        Rational::new(BigInt::from(n), BigInt::from(d))
    }

    pub fn int(n: i64) -> Rational {
        Rational::from_integer(BigInt::from(n))
    }

    /// Series from `(exponent, numerator, denominator)` triples.
    pub fn poly(terms: &[(u64, i64, i64)]) -> TruncatedSeries {
        TruncatedSeries::from_coeffs(
            terms.iter().map(|&(k, n, d)| (k, rat(n, d))),
            Precision::Exact,
        )
    }
}

#[cfg(test)]
mod tests {
    use super::test_util::{int, poly, rat};
    use super::*;

    #[test]
    fn support_examples() {
        // 2 + t − 8t² + t³ (parameters instantiated at 1)
        let s = poly(&[(0, 2, 1), (1, 1, 1), (2, -8, 1), (3, 1, 1)]);
        assert_eq!(s.support(), SupportSet::from_elements([0, 1, 2, 3]));
        assert_eq!(TruncatedSeries::zero().support(), SupportSet::empty());
        assert_eq!(poly(&[(3, 1, 6)]).support(), SupportSet::from_elements([3]));
    }

    #[test]
    fn valuation_examples() {
        assert_eq!(poly(&[(0, 2, 1), (3, 1, 1)]).valuation().unwrap(), TropValue::Finite(0));
        assert_eq!(poly(&[(3, 1, 6)]).valuation().unwrap(), TropValue::Finite(3));
        assert_eq!(TruncatedSeries::zero().valuation().unwrap(), TropValue::Infinity);

        let truncated_zero = TruncatedSeries::from_coeffs([], Precision::Order(5));
        assert_eq!(
            truncated_zero.valuation(),
            Err(Error::ValuationUnknown { order: 5 })
        );
        // A visible term settles the valuation even under truncation.
        let t = TruncatedSeries::from_coeffs([(2, int(3))], Precision::Order(5));
        assert_eq!(t.valuation().unwrap(), TropValue::Finite(2));
    }

    #[test]
    fn derive_examples() {
        // 5 + 7t + t³/6 → 7 + t²/2, term by term.
        let s = poly(&[(0, 5, 1), (1, 7, 1), (3, 1, 6)]);
        assert_eq!(s.derive().unwrap(), poly(&[(0, 7, 1), (2, 1, 2)]));
        // Second derivative of t³/6 is t.
        assert_eq!(poly(&[(3, 1, 6)]).derive_n(2).unwrap(), poly(&[(1, 1, 1)]));
        assert_eq!(TruncatedSeries::from_int(5).derive().unwrap(), TruncatedSeries::zero());
    }

    #[test]
    fn derive_precision() {
        let s = TruncatedSeries::from_coeffs([(0, int(1)), (1, int(1))], Precision::Order(2));
        let d = s.derive().unwrap();
        assert_eq!(d.precision(), Precision::Order(1));
        assert_eq!(d.coeff(0), Some(int(1)));

        let exhausted = TruncatedSeries::from_coeffs([], Precision::Order(0));
        assert!(matches!(exhausted.derive(), Err(Error::PrecisionExhausted(_))));
    }

    #[test]
    fn psi_examples() {
        assert_eq!(psi(&CoeffSequence::from_dense([0, 0, 0, 1])), poly(&[(3, 1, 6)]));
        // (c1, c2) = (5, 7) ↦ 5 + 7t
        assert_eq!(
            psi(&CoeffSequence::from_dense([5, 7])),
            poly(&[(0, 5, 1), (1, 7, 1)])
        );
        // Direct formula: a = (0,1,0,2) ↦ t + (2/3!)t³ = t + t³/3.
        assert_eq!(
            psi(&CoeffSequence::from_dense([0, 1, 0, 2])),
            poly(&[(1, 1, 1), (3, 1, 3)])
        );
    }

    #[test]
    fn psi_inverse_examples() {
        assert_eq!(
            psi_inverse(&poly(&[(3, 1, 6)])).unwrap(),
            CoeffSequence::from_dense([0, 0, 0, 1])
        );
        assert_eq!(psi_inverse(&TruncatedSeries::zero()).unwrap(), CoeffSequence::new());
        assert_eq!(
            psi_inverse(&poly(&[(1, 1, 1), (3, 1, 3)])).unwrap(),
            CoeffSequence::from_dense([0, 1, 0, 2])
        );
        let truncated = TruncatedSeries::from_coeffs([(0, int(1))], Precision::Order(3));
        assert!(matches!(psi_inverse(&truncated), Err(Error::TruncatedInput { .. })));
    }

    #[test]
    fn psi_round_trip_and_derivative_shift() {
        let a = CoeffSequence::from_pairs([(0, rat(2, 3)), (2, int(-5)), (6, rat(1, 7))]);
        assert_eq!(psi_inverse(&psi(&a)).unwrap(), a);
        // d^s psi(a) = psi(a shifted by s); evaluating at 0 recovers a_s.
        for s in 0..8 {
            let ds = psi(&a).derive_n(s).unwrap();
            assert_eq!(ds, psi(&a.shift(s)));
            assert_eq!(ds.constant_term().unwrap(), a.get(s));
        }
    }

    #[test]
    fn arithmetic_examples() {
        let one_plus_t = poly(&[(0, 1, 1), (1, 1, 1)]);
        assert_eq!(
            &one_plus_t + &TruncatedSeries::from_int(-1),
            poly(&[(1, 1, 1)])
        );
        assert_eq!(
            &poly(&[(1, 1, 1)]) * &poly(&[(2, 1, 1)]),
            poly(&[(3, 1, 1)])
        );
        // (1 + t + O(t³))·(1 − t) = 1 − t² + O(t³): the t-coefficient
        // cancels, the t² one is kept.
        let a = TruncatedSeries::from_coeffs([(0, int(1)), (1, int(1))], Precision::Order(3));
        let b = poly(&[(0, 1, 1), (1, -1, 1)]);
        let prod = &a * &b;
        assert_eq!(prod.precision(), Precision::Order(3));
        assert_eq!(prod.coeff(0), Some(int(1)));
        assert_eq!(prod.coeff(1), Some(int(0)));
        assert_eq!(prod.coeff(2), Some(int(-1)));
        assert_eq!(prod.coeff(3), None);
    }

    #[test]
    fn product_matches_pointwise_evaluation() {
        // Independent check of the convolution on exact polynomials.
        let a = poly(&[(0, 3, 2), (2, -1, 1), (5, 1, 3)]);
        let b = poly(&[(1, 2, 1), (3, 7, 4)]);
        let prod = &a * &b;
        for x in [int(0), int(1), int(-2), rat(1, 3), rat(-5, 7)] {
            assert_eq!(
                prod.eval_at(&x).unwrap(),
                a.eval_at(&x).unwrap() * b.eval_at(&x).unwrap()
            );
        }
    }

    #[test]
    fn precision_propagation() {
        let exact = poly(&[(0, 1, 1)]);
        let o3 = TruncatedSeries::from_coeffs([(0, int(1))], Precision::Order(3));
        let o5 = TruncatedSeries::from_coeffs([(0, int(1))], Precision::Order(5));
        assert_eq!((&exact + &exact).precision(), Precision::Exact);
        assert_eq!((&exact + &o3).precision(), Precision::Order(3));
        assert_eq!((&o5 + &o3).precision(), Precision::Order(3));
        assert_eq!((&exact * &o5).precision(), Precision::Order(5));
        assert_eq!((&o5 * &o3).precision(), Precision::Order(3));
    }

    #[test]
    fn display_round_trip() {
        for s in [
            TruncatedSeries::zero(),
            poly(&[(0, 2, 1), (3, 1, 6)]),
            poly(&[(0, -1, 2), (1, 1, 1), (4, -3, 1)]),
            TruncatedSeries::from_coeffs([(0, int(1)), (2, int(-1))], Precision::Order(4)),
        ] {
            assert_eq!(s.to_string().parse::<TruncatedSeries>().unwrap(), s);
        }
        assert_eq!(poly(&[(0, 2, 1), (3, 1, 6)]).to_string(), "2 + 1/6*t^3");
        assert_eq!(
            TruncatedSeries::from_coeffs([(2, int(-1))], Precision::Order(4)).to_string(),
            "-t^2 ; O(t^4)"
        );
    }
}
