//! Decision procedures for chip-firing reachability.
//!
//! Debt-reachability is a lattice-membership question: C' is debt-reachable
//! from C iff the difference lies in the image of the reduced Laplacian.
//! Plain reachability (legal moves only) is decided by greedily spending the
//! debt firing vector; a BFS oracle over legal moves double-checks it.

use std::collections::{HashMap, HashSet, VecDeque};

use crate::chip::{
    can_fire, fire_legal, reduce_firing_vector, Configuration, FiringVector,
};
use crate::enumerate;
use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::linalg;
use crate::scalar::ExactInt;

/// Caps on state/configuration enumeration. Exceeding a cap is an error,
/// never a silently wrong answer.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Limits {
    /// Maximum distinct configurations a BFS may visit.
    pub max_states: u64,
    /// Maximum weak compositions a full enumeration may touch.
    pub max_compositions: u64,
}

impl Default for Limits {
    fn default() -> Self {
        Limits {
            max_states: 10_000_000,
            max_compositions: 10_000_000,
        }
    }
}

impl Limits {
    pub fn with_max_states(max_states: u64) -> Self {
        Limits {
            max_states,
            ..Limits::default()
        }
    }
}

/// Canonical coordinates of a configuration in the cokernel of the reduced
/// Laplacian: one entry per invariant factor d > 1, reduced mod that factor.
/// Among configurations with equal totals, equal labels is exactly
/// debt-reachability. Trees have no nontrivial factors, so every label is
/// empty and all equal-total configurations fall in one class.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ResidueLabel<T> {
    coordinates: Vec<T>,
}

impl<T: ExactInt> ResidueLabel<T> {
    pub fn coordinates(&self) -> &[T] {
        &self.coordinates
    }

    pub fn is_trivial(&self) -> bool {
        self.coordinates.is_empty()
    }
}

/// Precomputed label machinery for one graph: the rows of the unimodular U
/// from S = U·L'·V that correspond to invariant factors d > 1.
///
/// For kept-coordinate vectors a, b: a − b ∈ L'·Z^(n−1) iff U·(a − b) is
/// divisible coordinate-wise by the diagonal of S, and the coordinates with
/// d = 1 are always divisible. Hence the label (U·ĉ mod d) decides the class.
#[derive(Debug, Clone)]
pub struct ResidueClassifier<T> {
    omit: usize,
    moduli: Vec<T>,
    rows: Vec<Vec<T>>,
}

impl<T: ExactInt> ResidueClassifier<T> {
    pub fn new(g: &Graph) -> Self {
        let omit = g.vertex_count() - 1;
        let reduced = g
            .reduced_laplacian::<T>(omit)
            .expect("last vertex always exists");
        let dec = linalg::smith_normal_form(&reduced);
        let mut moduli = Vec::new();
        let mut rows = Vec::new();
        for (k, d) in dec.invariant_factors().into_iter().enumerate() {
            if d > T::one() {
                rows.push((0..reduced.cols()).map(|c| dec.u[(k, c)].clone()).collect());
                moduli.push(d);
            }
        }
        ResidueClassifier { omit, moduli, rows }
    }

    /// Invariant factors greater than 1, in divisibility order.
    pub fn moduli(&self) -> &[T] {
        &self.moduli
    }

    pub fn label(&self, c: &Configuration<T>) -> ResidueLabel<T> {
        self.label_of_chips(c.chips())
    }

    pub(crate) fn label_of_chips(&self, chips: &[T]) -> ResidueLabel<T> {
        let coordinates = self
            .rows
            .iter()
            .zip(&self.moduli)
            .map(|(row, modulus)| {
                let mut acc = T::zero();
                let mut j = 0;
                for (v, chip) in chips.iter().enumerate() {
                    if v == self.omit {
                        continue;
                    }
                    if !chip.is_zero() {
                        acc = acc + row[j].clone() * chip.clone();
                    }
                    j += 1;
                }
                acc.mod_floor(modulus)
            })
            .collect();
        ResidueLabel { coordinates }
    }
}

/// Label of one configuration. For repeated queries on the same graph,
/// build a [`ResidueClassifier`] once instead.
pub fn residue_label<T: ExactInt>(g: &Graph, c: &Configuration<T>) -> ResidueLabel<T> {
    ResidueClassifier::new(g).label(c)
}

/// Firing vector witnessing that `to` is debt-reachable from `from`, or
/// `None` when it is not (or the totals differ, which already settles it).
///
/// Solves L'·x̂ = (from − to) on the kept coordinates, embeds x̂ with 0 at
/// the omitted vertex, and reduces. Applying the result to `from` yields
/// `to` exactly.
pub fn debt_reachability_vector<T: ExactInt>(
    g: &Graph,
    from: &Configuration<T>,
    to: &Configuration<T>,
) -> Option<FiringVector<T>> {
    assert_eq!(from.len(), g.vertex_count(), "configuration/graph mismatch");
    assert_eq!(to.len(), g.vertex_count(), "configuration/graph mismatch");
    if from.total() != to.total() {
        return None;
    }
    let omit = g.vertex_count() - 1;
    let reduced = g
        .reduced_laplacian::<T>(omit)
        .expect("last vertex always exists");
    let b: Vec<T> = (0..omit)
        .map(|v| from.get(v).clone() - to.get(v).clone())
        .collect();
    let solution = linalg::solve_integer(&reduced, &b)
        .expect("reduced laplacian of a connected graph is nonsingular");
    solution.map(|mut xhat| {
        xhat.push(T::zero()); // the omitted vertex fires zero times
        reduce_firing_vector(&FiringVector::new(xhat))
    })
}

/// Partition of all configurations with total `c` into debt-reachability
/// classes, keyed by residue label.
#[derive(Debug, Clone)]
pub struct BlockPartition<T> {
    pub c: u64,
    /// (label, number of configurations), sorted by label for determinism.
    pub blocks: Vec<(ResidueLabel<T>, u64)>,
}

impl<T: ExactInt> BlockPartition<T> {
    pub fn block_count(&self) -> usize {
        self.blocks.len()
    }

    pub fn configuration_count(&self) -> u64 {
        self.blocks.iter().map(|(_, size)| *size).sum()
    }

    pub fn min_block_size(&self) -> Option<u64> {
        self.blocks.iter().map(|(_, size)| *size).min()
    }

    pub fn max_block_size(&self) -> Option<u64> {
        self.blocks.iter().map(|(_, size)| *size).max()
    }
}

/// Groups every configuration with total `c` by residue label.
pub fn block_partition<T: ExactInt>(
    g: &Graph,
    c: u64,
    limits: &Limits,
) -> Result<BlockPartition<T>> {
    let n = g.vertex_count();
    let expected: T = enumerate::composition_count(n, c);
    if expected > T::from_u64_exact(limits.max_compositions) {
        return Err(Error::ResourceLimit {
            kind: "compositions",
            needed: expected.to_string(),
            limit: limits.max_compositions,
        });
    }
    let classifier = ResidueClassifier::<T>::new(g);
    let mut groups: HashMap<ResidueLabel<T>, u64> = HashMap::new();
    for config in enumerate::all_configurations::<T>(n, c) {
        *groups.entry(classifier.label(&config)).or_insert(0) += 1;
    }
    let mut blocks: Vec<_> = groups.into_iter().collect();
    blocks.sort();
    Ok(BlockPartition { c, blocks })
}

/// Outcome of greedily spending a firing budget: the final configuration
/// and the unspent part of the budget. Every vertex with unspent budget is
/// unable to fire in the final configuration.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MostFiredResult<T> {
    pub configuration: Configuration<T>,
    pub remaining: FiringVector<T>,
}

/// Fires vertices legally, never exceeding the per-vertex budget, until no
/// budgeted vertex can fire. The greedy policy picks the lowest eligible
/// index and spends as much of its budget as its chips allow in one batch;
/// the endpoint is independent of these choices, which the test suite
/// checks against randomized orders.
pub fn most_fired<T: ExactInt>(
    g: &Graph,
    from: &Configuration<T>,
    budget: &FiringVector<T>,
) -> MostFiredResult<T> {
    assert_eq!(from.len(), g.vertex_count(), "configuration/graph mismatch");
    assert_eq!(budget.len(), g.vertex_count(), "budget/graph mismatch");
    assert!(
        !budget.multiplicities().iter().any(|m| m.is_negative()),
        "budget entries must be nonnegative"
    );
    let n = g.vertex_count();
    let mut chips = from.chips().to_vec();
    let mut remaining = budget.multiplicities().to_vec();
    'scan: loop {
        for v in 0..n {
            if remaining[v].is_zero() {
                continue;
            }
            let degree = T::from_usize_exact(g.degree(v));
            if chips[v] < degree {
                continue;
            }
            // Batch: the vertex can fire floor(chips/degree) times in a row
            // (neighbors only gain), capped by its remaining budget.
            let by_chips = chips[v].div_floor(&degree);
            let batch = if remaining[v] < by_chips {
                remaining[v].clone()
            } else {
                by_chips
            };
            chips[v] = chips[v].clone() - degree * batch.clone();
            for &u in g.neighbors(v) {
                chips[u] = chips[u].clone() + batch.clone();
            }
            remaining[v] = remaining[v].clone() - batch;
            continue 'scan;
        }
        break;
    }
    MostFiredResult {
        configuration: Configuration::new(chips)
            .expect("legal fires keep every entry nonnegative"),
        remaining: FiringVector::new(remaining),
    }
}

/// Legal-move reachability, decided without search: compute the debt
/// witness, then check the greedy spender exhausts it. If any budget is
/// left, the stuck point is unique and the target is unreachable.
pub fn is_reachable<T: ExactInt>(
    g: &Graph,
    from: &Configuration<T>,
    to: &Configuration<T>,
) -> bool {
    match debt_reachability_vector(g, from, to) {
        None => false,
        Some(witness) => {
            let result = most_fired(g, from, &witness);
            let done = result.remaining.is_zero();
            debug_assert!(!done || &result.configuration == to);
            done
        }
    }
}

/// Breadth-first search over legal fires, visiting each configuration once.
/// `visit` returns true to stop early; the function then returns true.
pub(crate) fn bfs_legal<T, F>(
    g: &Graph,
    from: &Configuration<T>,
    limits: &Limits,
    mut visit: F,
) -> Result<bool>
where
    T: ExactInt,
    F: FnMut(&Configuration<T>) -> bool,
{
    let n = g.vertex_count();
    let mut seen: HashSet<Configuration<T>> = HashSet::new();
    let mut queue: VecDeque<Configuration<T>> = VecDeque::new();
    seen.insert(from.clone());
    if visit(from) {
        return Ok(true);
    }
    queue.push_back(from.clone());
    while let Some(current) = queue.pop_front() {
        for v in 0..n {
            if !can_fire(g, &current, v) {
                continue;
            }
            let next = fire_legal(g, &current, v).expect("can_fire checked");
            if seen.contains(&next) {
                continue;
            }
            if seen.len() as u64 >= limits.max_states {
                return Err(Error::ResourceLimit {
                    kind: "bfs states",
                    needed: format!("more than {}", seen.len()),
                    limit: limits.max_states,
                });
            }
            if visit(&next) {
                return Ok(true);
            }
            seen.insert(next.clone());
            queue.push_back(next);
        }
    }
    Ok(false)
}

/// Independent reachability oracle: exhaustive BFS over legal moves.
pub fn is_reachable_bfs<T: ExactInt>(
    g: &Graph,
    from: &Configuration<T>,
    to: &Configuration<T>,
    limits: &Limits,
) -> Result<bool> {
    assert_eq!(from.len(), g.vertex_count(), "configuration/graph mismatch");
    assert_eq!(to.len(), g.vertex_count(), "configuration/graph mismatch");
    if from.total() != to.total() {
        return Ok(false);
    }
    bfs_legal(g, from, limits, |c| c == to)
}

/// Every configuration legally reachable from `from`, in BFS order.
pub fn reachable_configurations<T: ExactInt>(
    g: &Graph,
    from: &Configuration<T>,
    limits: &Limits,
) -> Result<Vec<Configuration<T>>> {
    let mut out = Vec::new();
    bfs_legal(g, from, limits, |c| {
        out.push(c.clone());
        false
    })?;
    Ok(out)
}
