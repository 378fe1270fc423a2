//! Quasipolynomials in the total chip count c: one polynomial branch per
//! residue class of c modulo the period, with exact rational coefficients.
//! Fitting is Lagrange interpolation per branch plus exact verification on
//! every held-out sample; there is no tolerance anywhere.

use std::collections::BTreeMap;

use num::rational::Ratio;
use num::{One, Zero};

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::scalar::ExactInt;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Quasipolynomial<T: ExactInt> {
    period: u64,
    onset: u64,
    /// `coefficients[r][j]` multiplies c^j on the branch c ≡ r (mod period).
    coefficients: Vec<Vec<Ratio<T>>>,
}

impl<T: ExactInt> Quasipolynomial<T> {
    pub fn new(period: u64, onset: u64, coefficients: Vec<Vec<Ratio<T>>>) -> Result<Self> {
        if period == 0 {
            return Err(Error::BadQuasipolynomial("period must be at least 1".into()));
        }
        if coefficients.len() != period as usize {
            return Err(Error::BadQuasipolynomial(format!(
                "expected {} branches, got {}",
                period,
                coefficients.len()
            )));
        }
        let width = coefficients[0].len();
        if width == 0 || coefficients.iter().any(|row| row.len() != width) {
            return Err(Error::BadQuasipolynomial(
                "every branch needs the same nonzero coefficient count".into(),
            ));
        }
        Ok(Quasipolynomial {
            period,
            onset,
            coefficients,
        })
    }

    pub fn constant(value: T) -> Self {
        Quasipolynomial {
            period: 1,
            onset: 0,
            coefficients: vec![vec![Ratio::from_integer(value)]],
        }
    }

    pub fn period(&self) -> u64 {
        self.period
    }

    pub fn degree(&self) -> usize {
        self.coefficients[0].len() - 1
    }

    pub fn onset(&self) -> u64 {
        self.onset
    }

    pub fn coefficients(&self) -> &[Vec<Ratio<T>>] {
        &self.coefficients
    }

    pub fn coefficient(&self, residue: u64, power: usize) -> &Ratio<T> {
        &self.coefficients[residue as usize][power]
    }

    /// Exact evaluation. Only integers can come out of a verified fit; a
    /// non-integer value means the quasipolynomial was built by hand wrong.
    pub fn evaluate(&self, c: u64) -> Result<T> {
        if c < self.onset {
            return Err(Error::BelowOnset {
                c,
                onset: self.onset,
            });
        }
        let branch = &self.coefficients[(c % self.period) as usize];
        let x = Ratio::from_integer(T::from_u64_exact(c));
        let mut acc: Ratio<T> = Ratio::zero();
        for coeff in branch.iter().rev() {
            acc = acc * x.clone() + coeff.clone();
        }
        if !acc.is_integer() {
            return Err(Error::NonIntegerValue { c });
        }
        Ok(acc.to_integer())
    }

    /// Renders one branch over a common denominator, highest power first,
    /// e.g. `(c^2 + 3c + 6)/6`.
    pub fn branch_display(&self, residue: u64) -> String {
        let branch = &self.coefficients[residue as usize];
        let mut denom = T::one();
        for coeff in branch {
            denom = denom.lcm(coeff.denom());
        }
        let mut terms: Vec<(T, usize)> = Vec::new();
        for (power, coeff) in branch.iter().enumerate().rev() {
            let scaled = (coeff.clone() * Ratio::from_integer(denom.clone())).to_integer();
            if !scaled.is_zero() {
                terms.push((scaled, power));
            }
        }
        let poly = if terms.is_empty() {
            "0".to_string()
        } else {
            let mut out = String::new();
            for (i, (a, power)) in terms.iter().enumerate() {
                let magnitude = a.abs();
                if i == 0 {
                    if a.is_negative() {
                        out.push('-');
                    }
                } else if a.is_negative() {
                    out.push_str(" - ");
                } else {
                    out.push_str(" + ");
                }
                let unit = magnitude.is_one() && *power > 0;
                if !unit {
                    out.push_str(&magnitude.to_string());
                }
                match power {
                    0 => {}
                    1 => out.push('c'),
                    _ => out.push_str(&format!("c^{power}")),
                }
            }
            out
        };
        if denom.is_one() {
            poly
        } else {
            format!("({poly})/{denom}")
        }
    }
}

/// Multiplies a coefficient vector by (x − root).
fn poly_mul_linear<T: ExactInt>(poly: &[Ratio<T>], root: &Ratio<T>) -> Vec<Ratio<T>> {
    let mut out = vec![Ratio::zero(); poly.len() + 1];
    for (p, coeff) in poly.iter().enumerate() {
        out[p + 1] = out[p + 1].clone() + coeff.clone();
        out[p] = out[p].clone() - coeff.clone() * root.clone();
    }
    out
}

/// Exact Lagrange interpolation through all given points.
fn lagrange<T: ExactInt>(points: &[(u64, T)]) -> Vec<Ratio<T>> {
    let mut result = vec![Ratio::zero(); points.len()];
    for (i, (xi, yi)) in points.iter().enumerate() {
        let xi_r: Ratio<T> = Ratio::from_integer(T::from_u64_exact(*xi));
        let mut basis = vec![Ratio::one()];
        let mut denom: Ratio<T> = Ratio::one();
        for (j, (xj, _)) in points.iter().enumerate() {
            if j == i {
                continue;
            }
            let xj_r = Ratio::from_integer(T::from_u64_exact(*xj));
            basis = poly_mul_linear(&basis, &xj_r);
            denom = denom * (xi_r.clone() - xj_r);
        }
        let scale = Ratio::from_integer(yi.clone()) / denom;
        for (p, b) in basis.into_iter().enumerate() {
            result[p] = result[p].clone() + scale.clone() * b;
        }
    }
    result
}

/// Fits a quasipolynomial of the given shape to `values`, or reports that
/// no such quasipolynomial exists.
///
/// Per residue class the first degree+1 points (with c ≥ onset) pin the
/// branch; at least one more point per class must exist to verify against,
/// and every remaining sample must match exactly. Too few points is an
/// error — with nothing held out, "it fits" would be vacuous.
pub fn fit_quasipolynomial<T: ExactInt>(
    values: &BTreeMap<u64, T>,
    period: u64,
    degree: usize,
    onset: u64,
) -> Result<Option<Quasipolynomial<T>>> {
    if period == 0 {
        return Err(Error::BadQuasipolynomial("period must be at least 1".into()));
    }
    let mut per_residue: Vec<Vec<(u64, T)>> = vec![Vec::new(); period as usize];
    for (&c, value) in values.range(onset..) {
        per_residue[(c % period) as usize].push((c, value.clone()));
    }
    let need = degree + 2;
    for (r, points) in per_residue.iter().enumerate() {
        if points.len() < need {
            return Err(Error::InsufficientSamples {
                residue: r as u64,
                period,
                got: points.len(),
                need,
            });
        }
    }
    let coefficients: Vec<Vec<Ratio<T>>> = per_residue
        .iter()
        .map(|points| lagrange(&points[..=degree]))
        .collect();
    let q = Quasipolynomial::new(period, onset, coefficients)?;
    for (&c, value) in values.range(onset..) {
        match q.evaluate(c) {
            Ok(v) if &v == value => {}
            _ => return Ok(None),
        }
    }
    Ok(Some(q))
}

/// Period search order: ascending divisors of `max_period` first (the
/// natural candidates when the caller passes a group order), then the
/// remaining values ascending.
fn period_candidates(max_period: u64) -> Vec<u64> {
    let mut order: Vec<u64> = (1..=max_period).filter(|p| max_period % p == 0).collect();
    order.extend((1..=max_period).filter(|p| max_period % p != 0));
    order
}

/// Searches the (onset, period, degree) grid in lexicographic order and
/// returns the first shape that fits, i.e. the earliest-valid law with the
/// smallest period. Residue classes with too few samples simply fail that
/// candidate; `None` means nothing on the grid fits.
pub fn detect_quasipolynomial<T: ExactInt>(
    values: &BTreeMap<u64, T>,
    max_period: u64,
    max_degree: usize,
    max_onset: u64,
) -> Option<Quasipolynomial<T>> {
    let data_min = *values.keys().next()?;
    let periods = period_candidates(max_period);
    for onset in data_min..=max_onset {
        for &period in &periods {
            for degree in 0..=max_degree {
                if let Ok(Some(q)) = fit_quasipolynomial(values, period, degree, onset) {
                    return Some(q);
                }
            }
        }
    }
    None
}

/// Checks the counting law for debt-reachable sweeps: the coefficient of
/// c^(n−1) must be exactly 1/((n−1)!·κ) on every branch, where κ is the
/// graph's spanning-tree count.
pub fn leading_coefficient_check<T: ExactInt>(q: &Quasipolynomial<T>, g: &Graph) -> bool {
    let n = g.vertex_count();
    if q.degree() != n - 1 {
        return false;
    }
    let mut factorial = T::one();
    for i in 2..n {
        factorial = factorial * T::from_usize_exact(i);
    }
    let expected = Ratio::new(T::one(), factorial * g.spanning_tree_count::<T>());
    q.coefficients
        .iter()
        .all(|branch| branch[n - 1] == expected)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::enumerate::{count_debt_reachable, count_reachable};
    use crate::reach::Limits;
    use crate::{Int, IntConfiguration, Rat};

    fn rat(numer: i64, denom: i64) -> Rat {
        Ratio::new(Int::from(numer), Int::from(denom))
    }

    /// Branches of the debt-reachable count on the triangle from (c,0,0),
    /// in the variable c: r=0 → (c²+3c+6)/6, r=1,2 → (c²+3c+2)/6.
    fn triangle_debt_q() -> Quasipolynomial<Int> {
        Quasipolynomial::new(
            3,
            0,
            vec![
                vec![rat(1, 1), rat(1, 2), rat(1, 6)],
                vec![rat(1, 3), rat(1, 2), rat(1, 6)],
                vec![rat(1, 3), rat(1, 2), rat(1, 6)],
            ],
        )
        .unwrap()
    }

    fn triangle_debt_values(cmax: u64) -> BTreeMap<u64, Int> {
        let g = Graph::cycle(3).unwrap();
        let limits = Limits::default();
        (0..=cmax)
            .map(|c| {
                let from = IntConfiguration::concentrated(3, 0, Int::from(c)).unwrap();
                (c, count_debt_reachable(&g, &from, &limits).unwrap())
            })
            .collect()
    }

    #[test]
    fn evaluation_matches_branch_formulas() {
        let q = triangle_debt_q();
        let expected = [1i64, 1, 2, 4, 5, 7, 10, 12, 15, 19, 22, 26];
        for (c, want) in expected.iter().enumerate() {
            assert_eq!(q.evaluate(c as u64).unwrap(), Int::from(*want), "c = {c}");
        }
        assert_eq!(q.evaluate(6).unwrap(), Int::from(10));
    }

    #[test]
    fn constant_quasipolynomial_evaluates_everywhere() {
        let q = Quasipolynomial::constant(Int::from(7));
        for c in [0u64, 1, 5, 1000] {
            assert_eq!(q.evaluate(c).unwrap(), Int::from(7));
        }
        assert_eq!(q.period(), 1);
        assert_eq!(q.degree(), 0);
    }

    #[test]
    fn reachable_branch_value_at_nine() {
        // reachable counts on the triangle: 2 less than debt when 3 | c
        let q = Quasipolynomial::new(
            3,
            1,
            vec![
                vec![rat(-1, 1), rat(1, 2), rat(1, 6)],
                vec![rat(1, 3), rat(1, 2), rat(1, 6)],
                vec![rat(1, 3), rat(1, 2), rat(1, 6)],
            ],
        )
        .unwrap();
        assert_eq!(q.evaluate(9).unwrap(), Int::from(17));
        assert_eq!(q.evaluate(3).unwrap(), Int::from(2));
        assert_eq!(q.evaluate(6).unwrap(), Int::from(8));
    }

    #[test]
    fn evaluation_below_onset_is_an_error() {
        let q = Quasipolynomial::new(1, 4, vec![vec![rat(1, 1)]]).unwrap();
        assert!(matches!(
            q.evaluate(3),
            Err(Error::BelowOnset { c: 3, onset: 4 })
        ));
        assert!(q.evaluate(4).is_ok());
    }

    #[test]
    fn non_integer_evaluation_is_reported() {
        let q = Quasipolynomial::new(1, 0, vec![vec![rat(1, 2)]]).unwrap();
        assert!(matches!(q.evaluate(5), Err(Error::NonIntegerValue { c: 5 })));
    }

    #[test]
    fn malformed_shapes_are_rejected() {
        assert!(Quasipolynomial::<Int>::new(0, 0, vec![]).is_err());
        assert!(Quasipolynomial::<Int>::new(2, 0, vec![vec![rat(1, 1)]]).is_err());
        assert!(Quasipolynomial::<Int>::new(
            2,
            0,
            vec![vec![rat(1, 1)], vec![rat(1, 1), rat(1, 1)]]
        )
        .is_err());
    }

    #[test]
    fn fit_recovers_triangle_debt_branches() {
        let values = triangle_debt_values(11);
        let q = fit_quasipolynomial(&values, 3, 2, 0).unwrap().unwrap();
        assert_eq!(q, triangle_debt_q());
    }

    #[test]
    fn fit_of_constant_data() {
        let values: BTreeMap<u64, Int> = (0..=5).map(|c| (c, Int::from(9))).collect();
        let q = fit_quasipolynomial(&values, 1, 0, 0).unwrap().unwrap();
        assert_eq!(q, Quasipolynomial::constant(Int::from(9)));
    }

    #[test]
    fn fit_requires_a_verification_point_per_residue() {
        // c = 0..10 leaves residue 2 with only 3 points; degree 2 needs 4
        let values = triangle_debt_values(10);
        let err = fit_quasipolynomial(&values, 3, 2, 0);
        assert!(matches!(
            err,
            Err(Error::InsufficientSamples {
                residue: 2,
                period: 3,
                got: 3,
                need: 4,
            })
        ));
    }

    #[test]
    fn fit_with_wrong_period_fails_verification() {
        let values = triangle_debt_values(13);
        assert_eq!(fit_quasipolynomial(&values, 2, 2, 0).unwrap(), None);
        assert_eq!(fit_quasipolynomial(&values, 1, 2, 0).unwrap(), None);
    }

    #[test]
    fn fit_rejects_corrupted_samples() {
        let mut values = triangle_debt_values(11);
        values.insert(11, values[&11].clone() + Int::from(1));
        assert_eq!(fit_quasipolynomial(&values, 3, 2, 0).unwrap(), None);
    }

    #[test]
    fn fit_round_trips_a_constructed_quasipolynomial() {
        let q = Quasipolynomial::new(
            2,
            0,
            vec![
                vec![rat(2, 1), rat(1, 2), rat(1, 2)],
                vec![rat(1, 1), rat(0, 1), rat(1, 1)],
            ],
        )
        .unwrap();
        let values: BTreeMap<u64, Int> = (0..=13).map(|c| (c, q.evaluate(c).unwrap())).collect();
        let refit = fit_quasipolynomial(&values, 2, 2, 0).unwrap().unwrap();
        for c in 0..=13 {
            assert_eq!(refit.evaluate(c).unwrap(), q.evaluate(c).unwrap());
        }
    }

    #[test]
    fn detect_finds_smallest_shape_for_triangle_debt() {
        let values = triangle_debt_values(14);
        let q = detect_quasipolynomial(&values, 6, 4, 6).unwrap();
        assert_eq!(q.onset(), 0);
        assert_eq!(q.period(), 3);
        assert_eq!(q.degree(), 2);
        assert_eq!(q, triangle_debt_q());
    }

    #[test]
    fn detect_reports_onset_one_for_triangle_reachable() {
        let g = Graph::cycle(3).unwrap();
        let limits = Limits::default();
        let values: BTreeMap<u64, Int> = (0..=20)
            .map(|c| {
                let from = IntConfiguration::concentrated(3, 0, Int::from(c)).unwrap();
                (c, count_reachable(&g, &from, &limits).unwrap())
            })
            .collect();
        let q = detect_quasipolynomial(&values, 6, 4, 8).unwrap();
        // the count at c = 0 is 1, off the branch formula, so the law
        // starts at c = 1
        assert_eq!(q.onset(), 1);
        assert_eq!(q.period(), 3);
        assert_eq!(q.degree(), 2);
    }

    #[test]
    fn detect_gives_up_on_random_noise() {
        let values: BTreeMap<u64, Int> = [3, 1, 4, 1, 5, 9, 2, 6, 5, 3, 5, 8, 9, 7, 9, 3]
            .iter()
            .enumerate()
            .map(|(c, &v)| (c as u64, Int::from(v)))
            .collect();
        assert!(detect_quasipolynomial(&values, 3, 2, 3).is_none());
    }

    #[test]
    fn period_order_prefers_divisors() {
        assert_eq!(period_candidates(6), vec![1, 2, 3, 6, 4, 5]);
        assert_eq!(period_candidates(1), vec![1]);
    }

    #[test]
    fn leading_coefficient_law_on_the_triangle() {
        let values = triangle_debt_values(11);
        let q = fit_quasipolynomial(&values, 3, 2, 0).unwrap().unwrap();
        let c3 = Graph::cycle(3).unwrap();
        assert!(leading_coefficient_check(&q, &c3));
        // wrong graph (κ = 4, n = 4) and wrong degree both fail
        let c4 = Graph::cycle(4).unwrap();
        assert!(!leading_coefficient_check(&q, &c4));
        assert!(!leading_coefficient_check(
            &Quasipolynomial::constant(Int::from(1)),
            &c3
        ));
    }

    #[test]
    fn branch_rendering_uses_a_common_denominator() {
        let q = triangle_debt_q();
        assert_eq!(q.branch_display(0), "(c^2 + 3c + 6)/6");
        assert_eq!(q.branch_display(1), "(c^2 + 3c + 2)/6");
        let constant = Quasipolynomial::constant(Int::from(7));
        assert_eq!(constant.branch_display(0), "7");
        let mixed = Quasipolynomial::new(
            1,
            0,
            vec![vec![rat(-1, 1), rat(1, 1), rat(0, 1), rat(2, 1)]],
        )
        .unwrap();
        assert_eq!(mixed.branch_display(0), "2c^3 + c - 1");
    }
}
