//! Chip configurations and firing moves. A firing of vertex v sends one
//! chip along each incident edge: v loses deg(v) chips, each neighbor
//! gains one. Legal moves require v to hold at least deg(v) chips; general
//! (debt) moves do not.

use std::fmt;
use std::str::FromStr;

use num::Zero;

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::scalar::ExactInt;

/// Nonnegative chip assignment, one entry per vertex. The total is cached
/// because every move preserves it.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Configuration<T> {
    chips: Vec<T>,
    total: T,
}

impl<T: ExactInt> Configuration<T> {
    pub fn new(chips: Vec<T>) -> Result<Self> {
        for (index, value) in chips.iter().enumerate() {
            if value.is_negative() {
                return Err(Error::NegativeChips {
                    index,
                    value: value.to_string(),
                });
            }
        }
        let total = sum(&chips);
        Ok(Configuration { chips, total })
    }

    pub fn zeros(n: usize) -> Self {
        Configuration {
            chips: (0..n).map(|_| T::zero()).collect(),
            total: T::zero(),
        }
    }

    /// All chips on one vertex: the (0, …, c, …, 0) source family.
    pub fn concentrated(n: usize, vertex: usize, amount: T) -> Result<Self> {
        if vertex >= n {
            return Err(Error::VertexOutOfRange { index: vertex, n });
        }
        let mut chips: Vec<T> = (0..n).map(|_| T::zero()).collect();
        chips[vertex] = amount;
        Self::new(chips)
    }

    pub fn from_i64(entries: &[i64]) -> Result<Self> {
        Self::new(entries.iter().map(|&v| T::from_i64_exact(v)).collect())
    }

    pub fn len(&self) -> usize {
        self.chips.len()
    }

    pub fn is_empty(&self) -> bool {
        self.chips.is_empty()
    }

    pub fn chips(&self) -> &[T] {
        &self.chips
    }

    pub fn total(&self) -> &T {
        &self.total
    }

    pub fn get(&self, v: usize) -> &T {
        &self.chips[v]
    }

    pub fn as_general(&self) -> GeneralConfiguration<T> {
        GeneralConfiguration {
            chips: self.chips.clone(),
            total: self.total.clone(),
        }
    }

    pub fn check_graph(&self, g: &Graph) -> Result<()> {
        if self.len() == g.vertex_count() {
            Ok(())
        } else {
            Err(Error::LengthMismatch {
                expected: g.vertex_count(),
                got: self.len(),
            })
        }
    }
}

/// Chip assignment allowed to go negative ("in debt").
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct GeneralConfiguration<T> {
    chips: Vec<T>,
    total: T,
}

impl<T: ExactInt> GeneralConfiguration<T> {
    pub fn new(chips: Vec<T>) -> Self {
        let total = sum(&chips);
        GeneralConfiguration { chips, total }
    }

    pub fn from_i64(entries: &[i64]) -> Self {
        Self::new(entries.iter().map(|&v| T::from_i64_exact(v)).collect())
    }

    pub fn len(&self) -> usize {
        self.chips.len()
    }

    pub fn is_empty(&self) -> bool {
        self.chips.is_empty()
    }

    pub fn chips(&self) -> &[T] {
        &self.chips
    }

    pub fn total(&self) -> &T {
        &self.total
    }

    pub fn in_debt(&self) -> bool {
        self.chips.iter().any(|v| v.is_negative())
    }

    /// Converts back to a nonnegative configuration, or reports which
    /// entry is in debt.
    pub fn to_configuration(&self) -> Result<Configuration<T>> {
        Configuration::new(self.chips.clone())
    }
}

/// How many times each vertex fires. Entries may be negative before
/// reduction; a reduced vector has minimum entry exactly 0.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FiringVector<T> {
    multiplicities: Vec<T>,
}

impl<T: ExactInt> FiringVector<T> {
    pub fn new(multiplicities: Vec<T>) -> Self {
        FiringVector { multiplicities }
    }

    pub fn zeros(n: usize) -> Self {
        FiringVector {
            multiplicities: (0..n).map(|_| T::zero()).collect(),
        }
    }

    pub fn from_i64(entries: &[i64]) -> Self {
        FiringVector {
            multiplicities: entries.iter().map(|&v| T::from_i64_exact(v)).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.multiplicities.len()
    }

    pub fn is_empty(&self) -> bool {
        self.multiplicities.is_empty()
    }

    pub fn multiplicities(&self) -> &[T] {
        &self.multiplicities
    }

    pub fn get(&self, v: usize) -> &T {
        &self.multiplicities[v]
    }

    pub fn is_zero(&self) -> bool {
        self.multiplicities.iter().all(Zero::is_zero)
    }

    pub fn is_reduced(&self) -> bool {
        match self.multiplicities.iter().min() {
            Some(min) => min.is_zero(),
            None => true,
        }
    }
}

fn sum<T: ExactInt>(values: &[T]) -> T {
    values.iter().fold(T::zero(), |acc, v| acc + v.clone())
}

/// True iff vertex v holds at least deg(v) chips.
pub fn can_fire<T: ExactInt>(g: &Graph, c: &Configuration<T>, v: usize) -> bool {
    assert_eq!(c.len(), g.vertex_count(), "configuration/graph mismatch");
    *c.get(v) >= T::from_usize_exact(g.degree(v))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FireMode {
    /// Requires the fired vertex to hold at least its degree.
    Legal,
    /// Debt allowed: the fired vertex may go negative.
    General,
}

/// Fires vertex v once. In legal mode, firing a vertex with fewer chips
/// than its degree is an error.
pub fn fire<T: ExactInt>(
    g: &Graph,
    c: &GeneralConfiguration<T>,
    v: usize,
    mode: FireMode,
) -> Result<GeneralConfiguration<T>> {
    assert_eq!(c.len(), g.vertex_count(), "configuration/graph mismatch");
    g.check_vertex(v)?;
    let degree = g.degree(v);
    if mode == FireMode::Legal && c.chips()[v] < T::from_usize_exact(degree) {
        return Err(Error::IllegalMove {
            vertex: v,
            chips: c.chips()[v].to_string(),
            degree,
        });
    }
    let mut chips = c.chips().to_vec();
    chips[v] = chips[v].clone() - T::from_usize_exact(degree);
    for &u in g.neighbors(v) {
        chips[u] = chips[u].clone() + T::one();
    }
    Ok(GeneralConfiguration {
        chips,
        total: c.total().clone(),
    })
}

/// Legal fire on a nonnegative configuration; the result is nonnegative by
/// construction (v keeps ≥ 0 after losing deg(v), neighbors only gain).
pub fn fire_legal<T: ExactInt>(g: &Graph, c: &Configuration<T>, v: usize) -> Result<Configuration<T>> {
    let fired = fire(g, &c.as_general(), v, FireMode::Legal)?;
    Ok(Configuration {
        chips: fired.chips,
        total: fired.total,
    })
}

/// Applies a whole firing vector at once: each vertex v loses
/// deg(v)·x[v] and gains Σ x[u] over its neighbors u. Equals performing
/// the individual general moves in any order.
pub fn apply_firing_vector<T: ExactInt>(
    g: &Graph,
    c: &GeneralConfiguration<T>,
    x: &FiringVector<T>,
) -> GeneralConfiguration<T> {
    assert_eq!(c.len(), g.vertex_count(), "configuration/graph mismatch");
    assert_eq!(x.len(), g.vertex_count(), "firing vector/graph mismatch");
    let mut chips = Vec::with_capacity(c.len());
    for v in 0..g.vertex_count() {
        let mut entry = c.chips()[v].clone()
            - T::from_usize_exact(g.degree(v)) * x.get(v).clone();
        for &u in g.neighbors(v) {
            entry = entry + x.get(u).clone();
        }
        chips.push(entry);
    }
    GeneralConfiguration {
        chips,
        total: c.total().clone(),
    }
}

/// Shifts the vector so its minimum entry is 0. Adding a constant to every
/// multiplicity never changes the configuration a firing vector produces,
/// so this canonical representative is free to choose.
pub fn reduce_firing_vector<T: ExactInt>(x: &FiringVector<T>) -> FiringVector<T> {
    let Some(min) = x.multiplicities().iter().min().cloned() else {
        return x.clone();
    };
    FiringVector {
        multiplicities: x
            .multiplicities()
            .iter()
            .map(|v| v.clone() - min.clone())
            .collect(),
    }
}

macro_rules! fmt_comma_separated {
    ($field:ident) => {
        fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
            for (i, v) in self.$field.iter().enumerate() {
                if i > 0 {
                    write!(f, ",")?;
                }
                write!(f, "{v}")?;
            }
            Ok(())
        }
    };
}

impl<T: ExactInt> fmt::Display for Configuration<T> {
    fmt_comma_separated!(chips);
}

impl<T: ExactInt> fmt::Display for GeneralConfiguration<T> {
    fmt_comma_separated!(chips);
}

impl<T: ExactInt> fmt::Display for FiringVector<T> {
    fmt_comma_separated!(multiplicities);
}

fn parse_entries<T: ExactInt>(s: &str) -> Result<Vec<T>> {
    let bad = |why: &str| Error::MalformedConfiguration(s.to_string(), why.to_string());
    if s.trim().is_empty() {
        return Err(bad("empty"));
    }
    s.split(',')
        .map(|part| {
            T::from_str_radix(part.trim(), 10)
                .map_err(|_| bad(&format!("bad integer {:?}", part.trim())))
        })
        .collect()
}

impl<T: ExactInt> FromStr for Configuration<T> {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Configuration::new(parse_entries(s)?)
    }
}

impl<T: ExactInt> FromStr for GeneralConfiguration<T> {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Ok(GeneralConfiguration::new(parse_entries(s)?))
    }
}
