//! Enumeration and counting: weak-composition streams, debt-reachable
//! counts by residue filtering, an independent simplex lattice-point
//! counter, legal-reachability counts by BFS, and c-range sweeps.

use std::marker::PhantomData;
use std::time::Instant;

use num::rational::Ratio;

use crate::chip::Configuration;
use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::linalg;
use crate::matrix::Matrix;
use crate::reach::{self, Limits, ResidueClassifier};
use crate::scalar::ExactInt;

/// Exact binomial coefficient; each interior division is exact.
pub fn binomial<T: ExactInt>(n: u64, k: u64) -> T {
    if k > n {
        return T::zero();
    }
    let k = k.min(n - k);
    let mut acc = T::one();
    for i in 1..=k {
        acc = acc * T::from_u64_exact(n - k + i) / T::from_u64_exact(i);
    }
    acc
}

/// Number of weak compositions of `c` into `parts` parts.
pub fn composition_count<T: ExactInt>(parts: usize, c: u64) -> T {
    assert!(parts >= 1);
    binomial(c + parts as u64 - 1, parts as u64 - 1)
}

pub(crate) fn ensure_enumerable<T: ExactInt>(parts: usize, c: u64, limits: &Limits) -> Result<()> {
    let expected: T = composition_count(parts, c);
    if expected > T::from_u64_exact(limits.max_compositions) {
        return Err(Error::ResourceLimit {
            kind: "compositions",
            needed: expected.to_string(),
            limit: limits.max_compositions,
        });
    }
    Ok(())
}

/// Streams every configuration of `c` chips on `n` vertices exactly once.
///
/// Order: first entry descending, ties broken by the next entry, i.e.
/// (3,0), (2,1), (1,2), (0,3). The successor move takes one chip from the
/// rightmost positive entry among the first n−1 and drops it, plus the
/// whole last entry, just after that position.
pub struct AllConfigurations<T> {
    state: Option<Vec<u64>>,
    _scalar: PhantomData<T>,
}

pub fn all_configurations<T: ExactInt>(n: usize, c: u64) -> AllConfigurations<T> {
    assert!(n >= 1);
    let mut first = vec![0u64; n];
    first[0] = c;
    AllConfigurations {
        state: Some(first),
        _scalar: PhantomData,
    }
}

impl<T: ExactInt> Iterator for AllConfigurations<T> {
    type Item = Configuration<T>;

    fn next(&mut self) -> Option<Self::Item> {
        let state = self.state.as_mut()?;
        let chips: Vec<T> = state.iter().map(|&v| T::from_u64_exact(v)).collect();
        let current =
            Configuration::new(chips).expect("composition entries are nonnegative");
        let n = state.len();
        let pivot = (0..n - 1).rev().find(|&i| state[i] > 0);
        match pivot {
            Some(i) => {
                let tail = state[n - 1];
                state[n - 1] = 0;
                state[i] -= 1;
                state[i + 1] = tail + 1;
            }
            None => self.state = None,
        }
        Some(current)
    }
}

/// Counts configurations with the same total and the same residue label as
/// `from`: exactly the ones debt-reachable from it.
pub fn count_debt_reachable<T: ExactInt>(
    g: &Graph,
    from: &Configuration<T>,
    limits: &Limits,
) -> Result<T> {
    let mut count: u64 = 0;
    visit_debt_reachable(g, from, limits, |_| count += 1)?;
    Ok(T::from_u64_exact(count))
}

/// Listing variant of [`count_debt_reachable`]; the resource guard bounds
/// the result size.
pub fn debt_reachable_configurations<T: ExactInt>(
    g: &Graph,
    from: &Configuration<T>,
    limits: &Limits,
) -> Result<Vec<Configuration<T>>> {
    let mut out = Vec::new();
    visit_debt_reachable(g, from, limits, |c| out.push(c.clone()))?;
    Ok(out)
}

fn visit_debt_reachable<T, F>(
    g: &Graph,
    from: &Configuration<T>,
    limits: &Limits,
    mut visit: F,
) -> Result<()>
where
    T: ExactInt,
    F: FnMut(&Configuration<T>),
{
    from.check_graph(g)?;
    let n = g.vertex_count();
    let total = from.total().to_u64().ok_or_else(|| Error::ResourceLimit {
        kind: "compositions",
        needed: format!("total {}", from.total()),
        limit: limits.max_compositions,
    })?;
    ensure_enumerable::<T>(n, total, limits)?;
    let classifier = ResidueClassifier::<T>::new(g);
    let target = classifier.label(from);
    for config in all_configurations::<T>(n, total) {
        if classifier.label(&config) == target {
            visit(&config);
        }
    }
    Ok(())
}

/// The feasible region whose lattice points biject with the configurations
/// debt-reachable from `c` chips on `source`: vectors x̂ (firing counts of
/// the kept vertices, the omitted one pinned to 0) for which firing leaves
/// every vertex nonnegative. One constraint row per vertex; only the
/// source row has a nonzero constant term.
pub struct SimplexSpec<T> {
    /// n × (n−1): row v, column j holds the net chips vertex v gains per
    /// firing of kept vertex j.
    rows: Matrix<T>,
    /// Constant terms: c at the source row, 0 elsewhere.
    constants: Vec<T>,
}

impl<T: ExactInt> SimplexSpec<T> {
    pub fn new(g: &Graph, source: usize, c: u64) -> Result<Self> {
        g.check_vertex(source)?;
        let n = g.vertex_count();
        let mut rows = Matrix::zeros(n, n - 1);
        for v in 0..n {
            for j in 0..n - 1 {
                if v == j {
                    rows[(v, j)] = -T::from_usize_exact(g.degree(v));
                } else if g.neighbors(v).binary_search(&j).is_ok() {
                    rows[(v, j)] = T::one();
                }
            }
        }
        let mut constants: Vec<T> = (0..n).map(|_| T::zero()).collect();
        constants[source] = T::from_u64_exact(c);
        Ok(SimplexSpec { rows, constants })
    }

    pub fn dimension(&self) -> usize {
        self.rows.cols()
    }

    pub fn contains(&self, point: &[T]) -> bool {
        assert_eq!(point.len(), self.dimension());
        for v in 0..self.rows.rows() {
            let mut acc = self.constants[v].clone();
            for j in 0..self.dimension() {
                acc = acc + self.rows[(v, j)].clone() * point[j].clone();
            }
            if acc.is_negative() {
                return false;
            }
        }
        true
    }

    /// The region's vertices, exactly: for each constraint row r, the point
    /// where the other n−1 constraints are tight. The source row's vertex
    /// is the origin. A singular tight system signals an inconsistency the
    /// construction cannot produce, and is reported rather than guessed at.
    pub fn vertices(&self) -> Result<Vec<Vec<Ratio<T>>>> {
        let n = self.rows.rows();
        let dim = self.dimension();
        let mut out = Vec::with_capacity(n);
        for slack in 0..n {
            let mut tight = Matrix::zeros(dim, dim);
            let mut rhs: Vec<T> = Vec::with_capacity(dim);
            let mut i = 0;
            for v in 0..n {
                if v == slack {
                    continue;
                }
                for j in 0..dim {
                    tight[(i, j)] = self.rows[(v, j)].clone();
                }
                rhs.push(-self.constants[v].clone());
                i += 1;
            }
            let det = linalg::determinant(&tight)?;
            if det.is_zero() {
                return Err(Error::UnboundedRegion);
            }
            let scaled = linalg::adjugate(&tight)?.mul_vec(&rhs)?;
            out.push(
                scaled
                    .into_iter()
                    .map(|numer| Ratio::new(numer, det.clone()))
                    .collect(),
            );
        }
        Ok(out)
    }

    /// Integer bounding box of the region, per coordinate.
    fn bounding_box(&self) -> Result<Vec<(T, T)>> {
        let vertices = self.vertices()?;
        let dim = self.dimension();
        let mut bounds = Vec::with_capacity(dim);
        for j in 0..dim {
            let mut lo: Option<Ratio<T>> = None;
            let mut hi: Option<Ratio<T>> = None;
            for vertex in &vertices {
                let coord = &vertex[j];
                if lo.as_ref().map_or(true, |l| coord < l) {
                    lo = Some(coord.clone());
                }
                if hi.as_ref().map_or(true, |h| coord > h) {
                    hi = Some(coord.clone());
                }
            }
            let lo = lo.expect("at least one vertex").ceil().to_integer();
            let hi = hi.expect("at least one vertex").floor().to_integer();
            bounds.push((lo, hi));
        }
        Ok(bounds)
    }
}

/// Counts lattice points in the simplex for `c` chips on `source` by
/// recursive coordinate enumeration over exact rational bounds. This is an
/// independent cross-check of [`count_debt_reachable`]: it never looks at
/// residue labels.
pub fn simplex_lattice_count<T: ExactInt>(
    g: &Graph,
    source: usize,
    c: u64,
    limits: &Limits,
) -> Result<T> {
    let spec = SimplexSpec::<T>::new(g, source, c)?;
    let bounds = spec.bounding_box()?;
    let mut box_points = T::one();
    for (lo, hi) in &bounds {
        if hi < lo {
            return Ok(T::zero());
        }
        box_points = box_points * (hi.clone() - lo.clone() + T::one());
    }
    if box_points > T::from_u64_exact(limits.max_compositions) {
        return Err(Error::ResourceLimit {
            kind: "lattice box points",
            needed: box_points.to_string(),
            limit: limits.max_compositions,
        });
    }

    fn descend<T: ExactInt>(
        spec: &SimplexSpec<T>,
        bounds: &[(T, T)],
        point: &mut Vec<T>,
        count: &mut u64,
    ) {
        let depth = point.len();
        if depth == bounds.len() {
            if spec.contains(point) {
                *count += 1;
            }
            return;
        }
        let (lo, hi) = &bounds[depth];
        let mut cursor = lo.clone();
        while &cursor <= hi {
            point.push(cursor.clone());
            descend(spec, bounds, point, count);
            point.pop();
            cursor = cursor + T::one();
        }
    }

    let mut count = 0u64;
    let mut point = Vec::with_capacity(spec.dimension());
    descend(&spec, &bounds, &mut point, &mut count);
    Ok(T::from_u64_exact(count))
}

/// Counts configurations legally reachable from `from` (including itself)
/// by exhaustive BFS.
pub fn count_reachable<T: ExactInt>(
    g: &Graph,
    from: &Configuration<T>,
    limits: &Limits,
) -> Result<T> {
    from.check_graph(g)?;
    let mut count: u64 = 0;
    reach::bfs_legal(g, from, limits, |_| {
        count += 1;
        false
    })?;
    Ok(T::from_u64_exact(count))
}

/// Which quantities a sweep evaluates per c.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Modes {
    pub debt: bool,
    pub reachable: bool,
    pub blocks: bool,
}

impl Modes {
    pub const DEBT: Modes = Modes {
        debt: true,
        reachable: false,
        blocks: false,
    };

    pub fn any(&self) -> bool {
        self.debt || self.reachable || self.blocks
    }
}

/// One sweep row: counts for a single total c from the concentrated source
/// (all chips on one vertex). Unrequested modes stay `None`.
#[derive(Debug, Clone)]
pub struct SweepRecord<T> {
    pub c: u64,
    pub debt_count: Option<T>,
    pub reachable_count: Option<T>,
    pub block_count: Option<usize>,
    pub seconds: f64,
}

/// Evaluates the requested modes for one c value.
pub fn sweep_one<T: ExactInt>(
    g: &Graph,
    source: usize,
    c: u64,
    modes: Modes,
    limits: &Limits,
) -> Result<SweepRecord<T>> {
    g.check_vertex(source)?;
    let start = Instant::now();
    let from = Configuration::concentrated(g.vertex_count(), source, T::from_u64_exact(c))
        .expect("source vertex checked");
    let debt_count = if modes.debt {
        Some(count_debt_reachable(g, &from, limits)?)
    } else {
        None
    };
    let reachable_count = if modes.reachable {
        Some(count_reachable(g, &from, limits)?)
    } else {
        None
    };
    let block_count = if modes.blocks {
        Some(reach::block_partition::<T>(g, c, limits)?.block_count())
    } else {
        None
    };
    Ok(SweepRecord {
        c,
        debt_count,
        reachable_count,
        block_count,
        seconds: start.elapsed().as_secs_f64(),
    })
}

/// Evaluates `sweep_one` for every c in [c_min, c_max], in order.
pub fn sweep<T: ExactInt>(
    g: &Graph,
    source: usize,
    c_min: u64,
    c_max: u64,
    modes: Modes,
    limits: &Limits,
) -> Result<Vec<SweepRecord<T>>> {
    if c_min > c_max {
        return Err(Error::EmptyRange { c_min, c_max });
    }
    (c_min..=c_max)
        .map(|c| sweep_one(g, source, c, modes, limits))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::{Int, IntConfiguration};
    use num::{ToPrimitive, Zero};

    fn cfg(entries: &[i64]) -> IntConfiguration {
        IntConfiguration::from_i64(entries).unwrap()
    }

    #[test]
    fn binomial_basics() {
        assert_eq!(binomial::<Int>(4, 2), Int::from(6));
        assert_eq!(binomial::<Int>(7, 0), Int::from(1));
        assert_eq!(binomial::<Int>(3, 5), Int::from(0));
        assert_eq!(binomial::<Int>(35, 5), Int::from(324_632));
    }

    #[test]
    fn composition_stream_matches_binomial_count() {
        for (n, c) in [(3usize, 2u64), (4, 5), (5, 3), (2, 0), (1, 4)] {
            let listed: Vec<IntConfiguration> = all_configurations(n, c).collect();
            let expected = composition_count::<Int>(n, c).to_usize().unwrap();
            assert_eq!(listed.len(), expected, "n={n} c={c}");
            for config in &listed {
                assert_eq!(config.total(), &Int::from(c as i64));
            }
            let distinct: std::collections::HashSet<_> = listed.iter().collect();
            assert_eq!(distinct.len(), listed.len());
        }
    }

    #[test]
    fn composition_stream_order_is_first_entry_descending() {
        let listed: Vec<String> = all_configurations::<Int>(2, 3)
            .map(|c| c.to_string())
            .collect();
        assert_eq!(listed, ["3,0", "2,1", "1,2", "0,3"]);
    }

    #[test]
    fn zero_total_has_exactly_the_zero_configuration() {
        let listed: Vec<IntConfiguration> = all_configurations(4, 0).collect();
        assert_eq!(listed, vec![IntConfiguration::zeros(4)]);
    }

    #[test]
    fn debt_counts_on_triangle_match_closed_form() {
        let g = Graph::cycle(3).unwrap();
        let limits = Limits::default();
        assert_eq!(
            count_debt_reachable(&g, &cfg(&[3, 0, 0]), &limits).unwrap(),
            Int::from(4)
        );
        assert_eq!(
            count_debt_reachable(&g, &cfg(&[4, 0, 0]), &limits).unwrap(),
            Int::from(5)
        );
    }

    #[test]
    fn debt_count_on_cycle_5_matches_binomial_formula() {
        // gcd(3, 5) = 1, so the count is binom(7,4)/5 = 7
        let g = Graph::cycle(5).unwrap();
        let from = cfg(&[3, 0, 0, 0, 0]);
        assert_eq!(
            count_debt_reachable(&g, &from, &Limits::default()).unwrap(),
            Int::from(7)
        );
    }

    #[test]
    fn debt_listing_agrees_with_count_and_labels() {
        let g = Graph::cycle(4).unwrap();
        let limits = Limits::default();
        let from = cfg(&[5, 0, 0, 0]);
        let listed = debt_reachable_configurations(&g, &from, &limits).unwrap();
        assert_eq!(
            Int::from(listed.len() as u64),
            count_debt_reachable(&g, &from, &limits).unwrap()
        );
        for c in &listed {
            assert!(reach::debt_reachability_vector(&g, &from, c).is_some());
        }
    }

    #[test]
    fn composition_guard_rejects_oversized_enumerations() {
        let g = Graph::cycle(5).unwrap();
        let tiny = Limits {
            max_compositions: 10,
            ..Limits::default()
        };
        let err = count_debt_reachable(&g, &cfg(&[9, 0, 0, 0, 0]), &tiny);
        assert!(matches!(err, Err(Error::ResourceLimit { .. })));
    }

    #[test]
    fn simplex_count_on_triangle_matches_closed_form() {
        let g = Graph::cycle(3).unwrap();
        let limits = Limits::default();
        assert_eq!(
            simplex_lattice_count::<Int>(&g, 0, 3, &limits).unwrap(),
            Int::from(4)
        );
        assert_eq!(
            simplex_lattice_count::<Int>(&g, 0, 5, &limits).unwrap(),
            Int::from(7)
        );
    }

    #[test]
    fn simplex_count_at_zero_is_the_origin_only() {
        for g in [
            Graph::cycle(3).unwrap(),
            Graph::path(4).unwrap(),
            Graph::complete(4).unwrap(),
        ] {
            assert_eq!(
                simplex_lattice_count::<Int>(&g, 0, 0, &Limits::default()).unwrap(),
                Int::from(1)
            );
        }
    }

    #[test]
    fn simplex_origin_vertex_sits_at_the_source_row() {
        let g = Graph::cycle(4).unwrap();
        let spec = SimplexSpec::<Int>::new(&g, 0, 6).unwrap();
        let vertices = spec.vertices().unwrap();
        assert_eq!(vertices.len(), 4);
        assert!(vertices[0].iter().all(|coord| coord.is_zero()));
    }

    #[test]
    fn the_two_counting_methods_agree() {
        let limits = Limits::default();
        let cases = [
            (Graph::cycle(3).unwrap(), 12u64),
            (Graph::cycle(4).unwrap(), 10),
            (Graph::path(3).unwrap(), 10),
            (Graph::path(4).unwrap(), 8),
            (Graph::complete(4).unwrap(), 8),
            (Graph::cycle(5).unwrap(), 6),
        ];
        for (g, cmax) in cases {
            for source in [0, g.vertex_count() - 1] {
                for c in 0..=cmax {
                    let from = IntConfiguration::concentrated(
                        g.vertex_count(),
                        source,
                        Int::from(c as i64),
                    )
                    .unwrap();
                    let by_labels = count_debt_reachable(&g, &from, &limits).unwrap();
                    let by_geometry =
                        simplex_lattice_count::<Int>(&g, source, c, &limits).unwrap();
                    assert_eq!(
                        by_labels, by_geometry,
                        "graph {:?} source {source} c {c}",
                        g.edges()
                    );
                }
            }
        }
    }

    #[test]
    fn reachable_counts_on_triangle_match_closed_form() {
        let g = Graph::cycle(3).unwrap();
        let limits = Limits::default();
        assert_eq!(
            count_reachable(&g, &cfg(&[3, 0, 0]), &limits).unwrap(),
            Int::from(2)
        );
        assert_eq!(
            count_reachable(&g, &cfg(&[4, 0, 0]), &limits).unwrap(),
            Int::from(5)
        );
        assert_eq!(
            count_reachable(&g, &cfg(&[1, 0, 0]), &limits).unwrap(),
            Int::from(1)
        );
    }

    #[test]
    fn reachable_never_exceeds_debt_reachable() {
        let g = Graph::cycle(4).unwrap();
        let limits = Limits::default();
        for c in 0..=10 {
            let from = cfg(&[c, 0, 0, 0]);
            let debt = count_debt_reachable(&g, &from, &limits).unwrap();
            let reachable = count_reachable(&g, &from, &limits).unwrap();
            assert!(reachable <= debt, "c = {c}");
        }
    }

    #[test]
    fn debt_counts_never_decrease_with_more_chips() {
        let g = Graph::cycle(4).unwrap();
        let limits = Limits::default();
        let mut previous = Int::from(0);
        for c in 0..=15 {
            let count = count_debt_reachable(&g, &cfg(&[c, 0, 0, 0]), &limits).unwrap();
            assert!(count >= previous, "c = {c}");
            previous = count;
        }
    }

    #[test]
    fn sweep_tabulates_triangle_counts() {
        let g = Graph::cycle(3).unwrap();
        let limits = Limits::default();
        let records = sweep::<Int>(&g, 0, 0, 6, Modes::DEBT, &limits).unwrap();
        let debt: Vec<i64> = records
            .iter()
            .map(|r| r.debt_count.as_ref().unwrap().to_i64().unwrap())
            .collect();
        assert_eq!(debt, [1, 1, 2, 4, 5, 7, 10]);
        assert!(records.iter().all(|r| r.reachable_count.is_none()));

        let both = Modes {
            debt: true,
            reachable: true,
            blocks: false,
        };
        let row = sweep_one::<Int>(&g, 0, 3, both, &limits).unwrap();
        assert_eq!(row.debt_count, Some(Int::from(4)));
        assert_eq!(row.reachable_count, Some(Int::from(2)));
    }

    #[test]
    fn sweep_reports_single_block_on_trees() {
        let g = Graph::path(2).unwrap();
        let limits = Limits::default();
        let blocks = Modes {
            debt: false,
            reachable: false,
            blocks: true,
        };
        let records = sweep::<Int>(&g, 0, 0, 5, blocks, &limits).unwrap();
        assert!(records.iter().all(|r| r.block_count == Some(1)));
    }

    #[test]
    fn sweep_rejects_empty_ranges() {
        let g = Graph::cycle(3).unwrap();
        let err = sweep::<Int>(&g, 0, 5, 2, Modes::DEBT, &Limits::default());
        assert!(matches!(err, Err(Error::EmptyRange { .. })));
    }
}
