//! Exact integer matrix algebra: determinant, adjugate, integer linear
//! solve, and Smith normal form. Everything is fraction-free; no floats.

use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::scalar::ExactInt;

/// Exact determinant via fraction-free (Bareiss) elimination.
/// Every interior division is exact, so the result is always an integer.
pub fn determinant<T: ExactInt>(m: &Matrix<T>) -> Result<T> {
    let n = m.require_square()?;
    if n == 0 {
        return Ok(T::one());
    }
    let mut a = m.clone();
    let mut negate = false;
    let mut prev = T::one();
    for k in 0..n - 1 {
        if a[(k, k)].is_zero() {
            match (k + 1..n).find(|&r| !a[(r, k)].is_zero()) {
                Some(r) => {
                    a.swap_rows(k, r);
                    negate = !negate;
                }
                None => return Ok(T::zero()),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let num = a[(k, k)].clone() * a[(i, j)].clone()
                    - a[(i, k)].clone() * a[(k, j)].clone();
                a[(i, j)] = num / prev.clone();
            }
            a[(i, k)] = T::zero();
        }
        prev = a[(k, k)].clone();
    }
    let det = a[(n - 1, n - 1)].clone();
    Ok(if negate { -det } else { det })
}

/// Adjugate (transposed cofactor matrix): M·adj(M) = det(M)·I exactly,
/// for every square M including singular ones.
pub fn adjugate<T: ExactInt>(m: &Matrix<T>) -> Result<Matrix<T>> {
    let n = m.require_square()?;
    let mut adj = Matrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            let cof = determinant(&m.minor(i, j))?;
            adj[(j, i)] = if (i + j) % 2 == 0 { cof } else { -cof };
        }
    }
    Ok(adj)
}

/// Solves M·x = b over the integers for nonsingular M.
///
/// Returns `None` when the unique rational solution is not integral
/// (adj(M)·b has a component not divisible by det M). A singular M is an
/// error, not `None`: callers distinguish "no integer solution" from
/// "the question was ill-posed".
pub fn solve_integer<T: ExactInt>(m: &Matrix<T>, b: &[T]) -> Result<Option<Vec<T>>> {
    let n = m.require_square()?;
    if b.len() != n {
        return Err(Error::LengthMismatch {
            expected: n,
            got: b.len(),
        });
    }
    let det = determinant(m)?;
    if det.is_zero() {
        return Err(Error::Singular);
    }
    let scaled = adjugate(m)?.mul_vec(b)?;
    let mut x = Vec::with_capacity(n);
    for component in scaled {
        let (q, r) = component.div_rem(&det);
        if !r.is_zero() {
            return Ok(None);
        }
        x.push(q);
    }
    Ok(Some(x))
}

/// Smith normal form S = U·M·V with U, V unimodular and S diagonal,
/// each diagonal entry nonnegative and dividing the next.
#[derive(Debug, Clone)]
pub struct SmithDecomposition<T> {
    pub u: Matrix<T>,
    pub s: Matrix<T>,
    pub v: Matrix<T>,
}

impl<T: ExactInt> SmithDecomposition<T> {
    /// Diagonal entries of S, in order.
    pub fn invariant_factors(&self) -> Vec<T> {
        (0..self.s.rows().min(self.s.cols()))
            .map(|i| self.s[(i, i)].clone())
            .collect()
    }

    /// Diagonal entries greater than 1: the cyclic factors of the
    /// cokernel. Entries equal to 1 contribute nothing to residue labels.
    pub fn nontrivial_invariant_factors(&self) -> Vec<T> {
        self.invariant_factors()
            .into_iter()
            .filter(|d| *d > T::one())
            .collect()
    }
}

/// Computes the Smith normal form by repeated pivoting and row/column
/// reduction. Pivot choice is the smallest nonzero absolute value with the
/// lowest (row, col) as tie-break, so the decomposition is deterministic.
pub fn smith_normal_form<T: ExactInt>(m: &Matrix<T>) -> SmithDecomposition<T> {
    let rows = m.rows();
    let cols = m.cols();
    let mut s = m.clone();
    let mut u: Matrix<T> = Matrix::identity(rows);
    let mut v: Matrix<T> = Matrix::identity(cols);
    let mut t = 0;
    'pivots: while t < rows.min(cols) {
        let mut best: Option<(usize, usize)> = None;
        for i in t..rows {
            for j in t..cols {
                if s[(i, j)].is_zero() {
                    continue;
                }
                let take = match best {
                    None => true,
                    Some((bi, bj)) => s[(i, j)].abs() < s[(bi, bj)].abs(),
                };
                if take {
                    best = Some((i, j));
                }
            }
        }
        let Some((pi, pj)) = best else {
            break; // trailing submatrix is zero
        };
        s.swap_rows(t, pi);
        u.swap_rows(t, pi);
        s.swap_cols(t, pj);
        v.swap_cols(t, pj);
        if s[(t, t)].is_negative() {
            for c in 0..cols {
                s[(t, c)] = -s[(t, c)].clone();
            }
            for c in 0..rows {
                u[(t, c)] = -u[(t, c)].clone();
            }
        }
        let p = s[(t, t)].clone();

        // Clear column t below the pivot; floor division against a positive
        // pivot leaves remainders in [0, p).
        let mut dirty = false;
        for i in t + 1..rows {
            if s[(i, t)].is_zero() {
                continue;
            }
            let q = s[(i, t)].div_floor(&p);
            if !q.is_zero() {
                for c in 0..cols {
                    s[(i, c)] = s[(i, c)].clone() - q.clone() * s[(t, c)].clone();
                }
                for c in 0..rows {
                    u[(i, c)] = u[(i, c)].clone() - q.clone() * u[(t, c)].clone();
                }
            }
            if !s[(i, t)].is_zero() {
                dirty = true;
            }
        }
        // Clear row t right of the pivot.
        for j in t + 1..cols {
            if s[(t, j)].is_zero() {
                continue;
            }
            let q = s[(t, j)].div_floor(&p);
            if !q.is_zero() {
                for r in 0..rows {
                    s[(r, j)] = s[(r, j)].clone() - q.clone() * s[(r, t)].clone();
                }
                for r in 0..cols {
                    v[(r, j)] = v[(r, j)].clone() - q.clone() * v[(r, t)].clone();
                }
            }
            if !s[(t, j)].is_zero() {
                dirty = true;
            }
        }
        if dirty {
            // A remainder smaller than the pivot appeared; re-pivot on it.
            continue;
        }
        // Pivot divides its row and column; enforce the divisibility chain
        // by folding in any offending lower-right entry and reducing again.
        for i in t + 1..rows {
            for j in t + 1..cols {
                if !s[(i, j)].is_multiple_of(&p) {
                    for c in 0..cols {
                        s[(t, c)] = s[(t, c)].clone() + s[(i, c)].clone();
                    }
                    for c in 0..rows {
                        u[(t, c)] = u[(t, c)].clone() + u[(i, c)].clone();
                    }
                    continue 'pivots;
                }
            }
        }
        t += 1;
    }
    SmithDecomposition { u, s, v }
}
