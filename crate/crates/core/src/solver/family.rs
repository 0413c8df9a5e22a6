//! Parametric solution families and their tropicalization: the image of a
//! family under the support map, computed by sampling zero/nonzero
//! patterns of the parameters.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num::{One, Signed, Zero};

use crate::series::{Precision, Rational, TruncatedSeries};
use crate::solver::{SupportTuple, WindowSpec};

/// A polynomial in the family parameters (the coefficient of one power of
/// `t` in one component).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParamPoly {
    /// Sparse exponent map (param index → power) to coefficient.
    terms: BTreeMap<BTreeMap<usize, u32>, Rational>,
}

impl ParamPoly {
    pub fn constant(c: Rational) -> Self {
        Self::from_terms([(c, Vec::new())])
    }

    pub fn param(idx: usize) -> Self {
        Self::from_terms([(Rational::one(), vec![(idx, 1)])])
    }

    /// Builds from `(coefficient, monomial)` pairs, merging duplicates.
    pub fn from_terms(terms: impl IntoIterator<Item = (Rational, Vec<(usize, u32)>)>) -> Self {
        let mut map: BTreeMap<BTreeMap<usize, u32>, Rational> = BTreeMap::new();
        for (c, monom) in terms {
            let key: BTreeMap<usize, u32> =
                monom.into_iter().filter(|&(_, e)| e > 0).collect();
            let entry = map.entry(key).or_insert_with(Rational::zero);
            *entry += c;
        }
        map.retain(|_, c| !c.is_zero());
        ParamPoly { terms: map }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn eval(&self, assignment: &[Rational]) -> Rational {
        let mut acc = Rational::zero();
        for (monom, c) in &self.terms {
            let mut term = c.clone();
            for (&idx, &e) in monom {
                term *= num::pow::pow(assignment[idx].clone(), e as usize);
            }
            acc += term;
        }
        acc
    }

    fn display(&self, params: &[String]) -> String {
        if self.terms.is_empty() {
            return "0".into();
        }
        let mut out = String::new();
        for (idx, (monom, c)) in self.terms.iter().enumerate() {
            let (neg, mag) = if c.is_negative() { (true, -c) } else { (false, c.clone()) };
            if idx == 0 {
                if neg {
                    out.push('-');
                }
            } else {
                out.push_str(if neg { " - " } else { " + " });
            }
            let mut factors: Vec<String> = Vec::new();
            if !mag.is_one() || monom.is_empty() {
                factors.push(format!("{mag}"));
            }
            for (&p, &e) in monom {
                for _ in 0..e {
                    factors.push(params[p].clone());
                }
            }
            out.push_str(&factors.join("*"));
        }
        out
    }
}

/// A tuple of series templates whose `t`-coefficients are polynomials in
/// named free parameters; evaluating an assignment yields an exact series
/// tuple.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SolutionFamily {
    params: Vec<String>,
    components: Vec<Vec<(u64, ParamPoly)>>,
}

impl SolutionFamily {
    /// Builds a family; coefficients that are identically zero are
    /// dropped.
    pub fn new(params: Vec<String>, components: Vec<Vec<(u64, ParamPoly)>>) -> Self {
        let components = components
            .into_iter()
            .map(|c| c.into_iter().filter(|(_, p)| !p.is_zero()).collect())
            .collect();
        SolutionFamily { params, components }
    }

    pub fn from_text(text: &str) -> Result<Self, crate::parse::ParseError> {
        crate::parse::parse_family(text)
    }

    pub fn params(&self) -> &[String] {
        &self.params
    }

    pub fn var_count(&self) -> usize {
        self.components.len()
    }

    /// Instantiates the template at a parameter assignment (one rational
    /// per parameter, in declaration order).
    pub fn evaluate(&self, assignment: &[Rational]) -> Vec<TruncatedSeries> {
        assert_eq!(assignment.len(), self.params.len(), "one value per parameter");
        self.components
            .iter()
            .map(|coeffs| {
                TruncatedSeries::from_coeffs(
                    coeffs.iter().map(|(k, p)| (*k, p.eval(assignment))),
                    Precision::Exact,
                )
            })
            .collect()
    }
}

impl fmt::Display for SolutionFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let render = |coeffs: &[(u64, ParamPoly)]| -> String {
            if coeffs.is_empty() {
                return "0".into();
            }
            coeffs
                .iter()
                .map(|(k, p)| {
                    let coeff = p.display(&self.params);
                    let coeff = if p.terms.len() > 1 { format!("({coeff})") } else { coeff };
                    match k {
                        0 => coeff,
                        1 if coeff == "1" => "t".into(),
                        _ if coeff == "1" => format!("t^{k}"),
                        1 => format!("{coeff}*t"),
                        _ => format!("{coeff}*t^{k}"),
                    }
                })
                .collect::<Vec<_>>()
                .join(" + ")
        };
        if self.components.len() == 1 {
            write!(f, "{}", render(&self.components[0]))
        } else {
            let parts: Vec<String> = self.components.iter().map(|c| render(c)).collect();
            write!(f, "({})", parts.join(", "))
        }
    }
}

/// Deterministic parameter assignments: each free parameter is sampled at
/// `rounds` distinct nonzero rationals (prime values, disjoint across
/// parameters and rounds) so that accidental cancellations in one sample
/// do not go unnoticed.
#[derive(Clone, Debug)]
pub struct ParamSampler {
    pub rounds: usize,
}

impl Default for ParamSampler {
    fn default() -> Self {
        ParamSampler { rounds: 3 }
    }
}

impl ParamSampler {
    fn values(&self, param_count: usize) -> Vec<Rational> {
        primes(param_count * self.rounds.max(1))
            .into_iter()
            .map(|p| Rational::from_integer(p.into()))
            .collect()
    }
}

fn primes(count: usize) -> Vec<u64> {
    let mut out = Vec::with_capacity(count);
    let mut candidate = 2u64;
    while out.len() < count {
        if (2..candidate).take_while(|d| d * d <= candidate).all(|d| candidate % d != 0) {
            out.push(candidate);
        }
        candidate += 1;
    }
    out
}

/// The tropicalization of a family over a window.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FamilyTropicalization {
    /// Window-restricted support tuples, ascending.
    pub supports: Vec<SupportTuple>,
    /// Zero/nonzero patterns whose sampled supports disagreed across
    /// rounds (the union was used).
    pub cancellation_notes: Vec<String>,
}

/// Computes `{trop(φ) : φ in the family}` over the window by evaluating
/// every zero/nonzero pattern of the parameters, sampling each nonzero
/// parameter at several distinct values and taking the union of the
/// observed supports.
pub fn trop_of_family(
    family: &SolutionFamily,
    window: &WindowSpec,
    sampler: &ParamSampler,
) -> FamilyTropicalization {
    let p = family.params().len();
    assert!(p <= 20, "too many free parameters for pattern enumeration");
    let rounds = sampler.rounds.max(1);
    let values = sampler.values(p);

    let mut supports: BTreeSet<SupportTuple> = BTreeSet::new();
    let mut notes = Vec::new();
    for pattern in 0u64..1 << p {
        let mut unioned: Option<SupportTuple> = None;
        let mut disagreement = false;
        for round in 0..rounds {
            let assignment: Vec<Rational> = (0..p)
                .map(|i| {
                    if pattern >> i & 1 == 1 {
                        values[round * p + i].clone()
                    } else {
                        Rational::zero()
                    }
                })
                .collect();
            let tuple: SupportTuple = family
                .evaluate(&assignment)
                .iter()
                .map(|s| s.support().restrict(window.bound))
                .collect();
            unioned = Some(match unioned {
                None => tuple,
                Some(prev) => {
                    if prev != tuple {
                        disagreement = true;
                    }
                    prev.iter().zip(&tuple).map(|(a, b)| a.union(b)).collect()
                }
            });
        }
        if disagreement {
            notes.push(format!(
                "pattern [{}]: sampled supports disagreed across rounds; union taken",
                pattern_text(family.params(), pattern)
            ));
        }
        supports.insert(unioned.expect("at least one round"));
    }
    FamilyTropicalization { supports: supports.into_iter().collect(), cancellation_notes: notes }
}

fn pattern_text(params: &[String], pattern: u64) -> String {
    if params.is_empty() {
        return "no parameters".into();
    }
    params
        .iter()
        .enumerate()
        .map(|(i, name)| format!("{name}{}", if pattern >> i & 1 == 1 { "≠0" } else { "=0" }))
        .collect::<Vec<_>>()
        .join(",")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parse::{parse_family, parse_support_set};
    use crate::support::SupportSet;

    fn sset(text: &str) -> SupportSet {
        parse_support_set(text).unwrap()
    }

    #[test]
    fn evaluate_instantiates_parameters() {
        let fam = parse_family("c1 + c2*t + 1/6*t^3").unwrap();
        let one = Rational::from_integer(1.into());
        let series = fam.evaluate(&[one.clone(), -one]);
        assert_eq!(series.len(), 1);
        assert_eq!(series[0].to_string(), "1 - t + 1/6*t^3");
    }

    #[test]
    fn single_variable_family_supports() {
        let fam = parse_family("c1 + c2*t + 1/6*t^3").unwrap();
        let trop = trop_of_family(&fam, &WindowSpec::new(4), &ParamSampler::default());
        let expected: Vec<SupportTuple> = ["{0,1,3}", "{0,3}", "{1,3}", "{3}"]
            .iter()
            .map(|s| vec![sset(s)])
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect();
        assert_eq!(trop.supports, expected);
        assert!(trop.cancellation_notes.is_empty());
    }

    #[test]
    fn two_variable_family_supports() {
        let fam = parse_family("(a + 5*t + b*t^2, 2 + a*t - 8*t^2 + c*t^3)").unwrap();
        let trop = trop_of_family(&fam, &WindowSpec::new(3), &ParamSampler::default());
        let expected: BTreeSet<SupportTuple> = [
            ("{1}", "{0,2}"),
            ("{0,1}", "{0,1,2}"),
            ("{1,2}", "{0,2}"),
            ("{1}", "{0,2,3}"),
            ("{0,1,2}", "{0,1,2}"),
            ("{0,1}", "{0,1,2,3}"),
            ("{1,2}", "{0,2,3}"),
            ("{0,1,2}", "{0,1,2,3}"),
        ]
        .iter()
        .map(|(a, b)| vec![sset(a), sset(b)])
        .collect();
        assert_eq!(trop.supports, expected.into_iter().collect::<Vec<_>>());
    }

    #[test]
    fn fixed_family_has_one_support() {
        let fam = parse_family("2 + t^2").unwrap();
        let trop = trop_of_family(&fam, &WindowSpec::new(5), &ParamSampler::default());
        assert_eq!(trop.supports, vec![vec![sset("{0,2}")]]);
    }

    #[test]
    fn window_restricts_supports() {
        let fam = parse_family("1 + t^7").unwrap();
        let trop = trop_of_family(&fam, &WindowSpec::new(3), &ParamSampler::default());
        assert_eq!(trop.supports, vec![vec![sset("{0}")]]);
    }

    #[test]
    fn display_round_trip() {
        for text in ["c1 + c2*t + 1/6*t^3", "(a + 5*t + b*t^2, 2 + a*t - 8*t^2 + c*t^3)"] {
            let fam = parse_family(text).unwrap();
            assert_eq!(parse_family(&fam.to_string()).unwrap(), fam);
        }
    }
}
