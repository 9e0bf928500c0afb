//! Linear algebra on the limiting modulating chain `(q_ij)`.
//!
//! All solves are direct: the singular systems `pi (Q - I) = 0` and
//! `(Q - I) a = -d` get one redundant equation replaced by a normalization
//! row and are then handed to Gaussian elimination with partial pivoting.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::{max_abs, Field};

const ROW_SUM_TOL: f64 = 1e-12;

/// Row-stochastic `|S| x |S|` matrix, row and column indexed by label position.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(
    into = "Vec<Vec<T>>",
    try_from = "Vec<Vec<T>>",
    bound(
        serialize = "T: Field + Serialize",
        deserialize = "T: Field + Deserialize<'de>"
    )
)]
pub struct StochasticMatrix<T> {
    n: usize,
    entries: Vec<T>,
}

impl<T: Field> StochasticMatrix<T> {
    /// Validates non-negativity and unit row sums (within `1e-12`).
    /// Irreducibility is a separate check, see [`is_irreducible`].
    pub fn new(rows: Vec<Vec<T>>) -> Result<Self> {
        let n = rows.len();
        if n == 0 {
            return Err(Error::NotStochastic("empty matrix".into()));
        }
        let tol = T::lit(ROW_SUM_TOL);
        let mut entries = Vec::with_capacity(n * n);
        for (i, row) in rows.into_iter().enumerate() {
            if row.len() != n {
                return Err(Error::NotStochastic(format!(
                    "row {i} has {} entries, expected {n}",
                    row.len()
                )));
            }
            let mut sum = T::zero();
            for (j, v) in row.into_iter().enumerate() {
                if v < T::zero() {
                    return Err(Error::NotStochastic(format!(
                        "entry ({i},{j}) = {:e} is negative",
                        v.approx_f64()
                    )));
                }
                sum = sum + v.clone();
                entries.push(v);
            }
            if (sum.clone() - T::one()).abs() > tol {
                return Err(Error::NotStochastic(format!(
                    "row {i} sums to {}",
                    sum.approx_f64()
                )));
            }
        }
        Ok(Self { n, entries })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> &T {
        &self.entries[i * self.n + j]
    }

    pub fn row(&self, i: usize) -> &[T] {
        &self.entries[i * self.n..(i + 1) * self.n]
    }

    pub fn rows(&self) -> Vec<Vec<T>> {
        self.entries.chunks(self.n).map(|r| r.to_vec()).collect()
    }

    /// `sum_j (v_j - v_i) q_ij` for every `i`.
    pub fn generator_apply(&self, v: &[T]) -> Vec<T> {
        (0..self.n)
            .map(|i| {
                self.row(i).iter().zip(v).fold(T::zero(), |acc, (q, vj)| {
                    acc + (vj.clone() - v[i].clone()) * q.clone()
                })
            })
            .collect()
    }

    pub fn is_irreducible(&self) -> bool {
        is_irreducible(self)
    }
}

impl<T: Field> From<StochasticMatrix<T>> for Vec<Vec<T>> {
    fn from(m: StochasticMatrix<T>) -> Self {
        m.rows()
    }
}

impl<T: Field> TryFrom<Vec<Vec<T>>> for StochasticMatrix<T> {
    type Error = Error;

    fn try_from(rows: Vec<Vec<T>>) -> Result<Self> {
        Self::new(rows)
    }
}

/// Unique stationary law `pi` of an irreducible [`StochasticMatrix`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound(serialize = "T: Serialize", deserialize = "T: Deserialize<'de>"))]
pub struct StationaryDistribution<T> {
    pub weights: Vec<T>,
}

impl<T: Field> StationaryDistribution<T> {
    /// `sum_i pi_i v_i`.
    pub fn weighted_sum(&self, v: &[T]) -> T {
        self.weights
            .iter()
            .zip(v)
            .fold(T::zero(), |acc, (p, x)| acc + p.clone() * x.clone())
    }
}

/// Min-normalized solution `a` of `d_i + sum_j (a_j - a_i) q_ij = 0`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound(serialize = "T: Serialize", deserialize = "T: Deserialize<'de>"))]
pub struct PoissonSolution<T> {
    pub values: Vec<T>,
    /// Largest row defect over all equations.
    pub residual: T,
}

impl<T: Field> PoissonSolution<T> {
    /// Another member of the solution family `a + c`. The residual is kept,
    /// since translation leaves every row unchanged.
    pub fn translated(&self, shift: T) -> Self {
        Self {
            values: self
                .values
                .iter()
                .map(|a| a.clone() + shift.clone())
                .collect(),
            residual: self.residual.clone(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    Negative,
    Positive,
}

/// Strong connectivity of the support digraph `{(i, j) : q_ij > 0}`.
pub fn is_irreducible<T: Field>(q: &StochasticMatrix<T>) -> bool {
    let n = q.dim();
    let reach = |forward: bool| {
        let mut seen = vec![false; n];
        let mut stack = vec![0usize];
        seen[0] = true;
        while let Some(u) = stack.pop() {
            for v in 0..n {
                let edge = if forward { q.get(u, v) } else { q.get(v, u) };
                if !seen[v] && *edge > T::zero() {
                    seen[v] = true;
                    stack.push(v);
                }
            }
        }
        seen.into_iter().all(|s| s)
    };
    reach(true) && reach(false)
}

/// Solves `pi Q = pi`, `sum pi = 1` directly.
pub fn stationary_distribution<T: Field>(
    q: &StochasticMatrix<T>,
) -> Result<StationaryDistribution<T>> {
    if !is_irreducible(q) {
        return Err(Error::Reducible);
    }
    let n = q.dim();
    // (Q^T - I) pi = 0 with the last equation swapped for sum pi = 1.
    let mut a = vec![T::zero(); n * n];
    let mut b = vec![T::zero(); n];
    for i in 0..n - 1 {
        for j in 0..n {
            let mut v = q.get(j, i).clone();
            if i == j {
                v = v - T::one();
            }
            a[i * n + j] = v;
        }
    }
    for j in 0..n {
        a[(n - 1) * n + j] = T::one();
    }
    b[n - 1] = T::one();
    let weights = solve_dense(a, b, n).ok_or(Error::Reducible)?;
    Ok(StationaryDistribution { weights })
}

/// Max row defect `|d_i + sum_j (a_j - a_i) q_ij|`.
pub fn poisson_residual<T: Field>(q: &StochasticMatrix<T>, d: &[T], a: &[T]) -> T {
    max_abs(
        q.generator_apply(a)
            .into_iter()
            .zip(d)
            .map(|(g, di)| g + di.clone()),
    )
}

/// Solves `(Q - I) a = -d`, normalized so that `min_i a_i = 0`.
///
/// Solvable iff `sum_i pi_i d_i = 0`; anything beyond `tol` is
/// [`Error::NonCentered`].
pub fn solve_poisson<T: Field>(
    q: &StochasticMatrix<T>,
    d: &[T],
    tol: T,
) -> Result<PoissonSolution<T>> {
    let n = q.dim();
    if d.len() != n {
        return Err(Error::Dimension(format!(
            "d has {} entries, Q is {n}x{n}",
            d.len()
        )));
    }
    let pi = stationary_distribution(q)?;
    let weighted = pi.weighted_sum(d);
    if weighted.abs() > tol {
        return Err(Error::NonCentered {
            weighted: weighted.approx_f64(),
            tol: tol.approx_f64(),
        });
    }
    // Rows are dependent through pi; dropping the row with the largest pi_k
    // keeps the centering defect (weighted / pi_k) in the residual smallest.
    let drop = (0..n)
        .max_by(|&x, &y| {
            pi.weights[x]
                .partial_cmp(&pi.weights[y])
                .unwrap_or(std::cmp::Ordering::Equal)
        })
        .unwrap_or(0);
    let mut a = vec![T::zero(); n * n];
    let mut b = vec![T::zero(); n];
    for i in 0..n {
        if i == drop {
            a[i * n] = T::one();
            continue;
        }
        for j in 0..n {
            let mut v = q.get(i, j).clone();
            if i == j {
                v = v - T::one();
            }
            a[i * n + j] = v;
        }
        b[i] = -d[i].clone();
    }
    let raw = solve_dense(a, b, n).ok_or(Error::Reducible)?;
    let min = raw
        .iter()
        .cloned()
        .fold(None, |m: Option<T>, v| match m {
            Some(m) if m <= v => Some(m),
            _ => Some(v),
        })
        .unwrap_or_else(T::zero);
    let values: Vec<T> = raw.into_iter().map(|v| v - min.clone()).collect();
    let residual = poisson_residual(q, d, &values);
    Ok(PoissonSolution { values, residual })
}

/// Finds `b` with `u_i + sum_j (b_j - b_i) q_ij < 0` for every `i`
/// (or `> 0` for [`Direction::Positive`]).
///
/// With `eps = |sum pi u|`, the centered drift `u_i +- eps / (|S| pi_i)` is fed
/// to [`solve_poisson`]; every row then sits `eps / (|S| pi_i)` inside the
/// required half-line. The inequalities are re-checked by substitution.
pub fn solve_strict_drift<T: Field>(
    q: &StochasticMatrix<T>,
    u: &[T],
    direction: Direction,
) -> Result<Vec<T>> {
    let n = q.dim();
    if u.len() != n {
        return Err(Error::Dimension(format!(
            "u has {} entries, Q is {n}x{n}",
            u.len()
        )));
    }
    let pi = stationary_distribution(q)?;
    let weighted = pi.weighted_sum(u);
    let ok = match direction {
        Direction::Negative => weighted < T::zero(),
        Direction::Positive => weighted > T::zero(),
    };
    if !ok {
        return Err(Error::WrongSign {
            weighted: weighted.approx_f64(),
        });
    }
    let eps = weighted.abs();
    let size = T::from_usize_lossy(n);
    let shifted: Vec<T> = u
        .iter()
        .zip(&pi.weights)
        .map(|(ui, p)| {
            let eps_i = eps.clone() / (size.clone() * p.clone());
            match direction {
                Direction::Negative => ui.clone() + eps_i,
                Direction::Positive => ui.clone() - eps_i,
            }
        })
        .collect();
    // The shifted drift is centered up to rounding in eps.
    let tol = T::lit(1e-9) * (T::one() + eps.clone() + max_abs(u.iter().cloned()));
    let b = solve_poisson(q, &shifted, tol)?.values;
    let rows = strict_drift_rows(q, u, &b);
    let holds = rows.iter().all(|r| match direction {
        Direction::Negative => *r < T::zero(),
        Direction::Positive => *r > T::zero(),
    });
    if !holds {
        return Err(Error::Invalid(format!(
            "strict drift construction failed: row values {:?}",
            rows.iter().map(|r| r.approx_f64()).collect::<Vec<_>>()
        )));
    }
    Ok(b)
}

/// `u_i + sum_j (b_j - b_i) q_ij` per row.
pub fn strict_drift_rows<T: Field>(q: &StochasticMatrix<T>, u: &[T], b: &[T]) -> Vec<T> {
    q.generator_apply(b)
        .into_iter()
        .zip(u)
        .map(|(g, ui)| g + ui.clone())
        .collect()
}

/// Dense `A x = b`, row-major `A`, partial pivoting. `None` if singular.
pub(crate) fn solve_dense<T: Field>(mut a: Vec<T>, mut b: Vec<T>, n: usize) -> Option<Vec<T>> {
    for col in 0..n {
        let pivot = (col..n).max_by(|&x, &y| {
            a[x * n + col]
                .abs()
                .partial_cmp(&a[y * n + col].abs())
                .unwrap_or(std::cmp::Ordering::Equal)
        })?;
        if a[pivot * n + col].is_zero() {
            return None;
        }
        if pivot != col {
            for k in 0..n {
                a.swap(col * n + k, pivot * n + k);
            }
            b.swap(col, pivot);
        }
        let p = a[col * n + col].clone();
        for row in col + 1..n {
            let factor = a[row * n + col].clone() / p.clone();
            if factor.is_zero() {
                continue;
            }
            for k in col..n {
                let v = a[col * n + k].clone();
                a[row * n + k] = a[row * n + k].clone() - factor.clone() * v;
            }
            b[row] = b[row].clone() - factor * b[col].clone();
        }
    }
    let mut x = vec![T::zero(); n];
    for row in (0..n).rev() {
        let mut acc = b[row].clone();
        for k in row + 1..n {
            acc = acc - a[row * n + k].clone() * x[k].clone();
        }
        x[row] = acc / a[row * n + row].clone();
    }
    Some(x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use num_rational::Rational64;

    fn m(rows: &[&[f64]]) -> StochasticMatrix<f64> {
        StochasticMatrix::new(rows.iter().map(|r| r.to_vec()).collect()).unwrap()
    }

    fn r(n: i64, d: i64) -> Rational64 {
        Rational64::new(n, d)
    }

    #[test]
    fn rejects_non_stochastic() {
        assert!(StochasticMatrix::new(vec![vec![0.5, 0.4], vec![0.5, 0.5]]).is_err());
        assert!(StochasticMatrix::new(vec![vec![1.2, -0.2], vec![0.5, 0.5]]).is_err());
        assert!(StochasticMatrix::new(vec![vec![1.0, 0.0]]).is_err());
        assert!(StochasticMatrix::<f64>::new(vec![]).is_err());
    }

    #[test]
    fn irreducibility() {
        assert!(!m(&[&[1.0, 0.0], &[0.0, 1.0]]).is_irreducible());
        assert!(m(&[&[0.0, 1.0], &[1.0, 0.0]]).is_irreducible());
        assert!(m(&[&[0.5, 0.5, 0.0], &[0.0, 0.5, 0.5], &[0.5, 0.0, 0.5]]).is_irreducible());
        // 0 -> 1 -> 1: reachable one way only
        assert!(!m(&[&[0.5, 0.5], &[0.0, 1.0]]).is_irreducible());
        assert!(m(&[&[1.0]]).is_irreducible());
    }

    #[test]
    fn stationary_examples() {
        let pi = stationary_distribution(&m(&[&[0.6, 0.4], &[0.4, 0.6]])).unwrap();
        assert_abs_diff_eq!(pi.weights[0], 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(pi.weights[1], 0.5, epsilon = 1e-15);

        let ds = m(&[&[0.2, 0.3, 0.5], &[0.5, 0.2, 0.3], &[0.3, 0.5, 0.2]]);
        for w in stationary_distribution(&ds).unwrap().weights {
            assert_abs_diff_eq!(w, 1.0 / 3.0, epsilon = 1e-15);
        }

        let pi = stationary_distribution(&m(&[&[0.9, 0.1], &[0.2, 0.8]])).unwrap();
        assert_abs_diff_eq!(pi.weights[0], 2.0 / 3.0, epsilon = 1e-15);
        assert_abs_diff_eq!(pi.weights[1], 1.0 / 3.0, epsilon = 1e-15);

        assert!(matches!(
            stationary_distribution(&m(&[&[1.0, 0.0], &[0.0, 1.0]])),
            Err(Error::Reducible)
        ));
    }

    #[test]
    fn stationary_is_exact_over_rationals() {
        let q =
            StochasticMatrix::new(vec![vec![r(9, 10), r(1, 10)], vec![r(1, 5), r(4, 5)]]).unwrap();
        let pi = stationary_distribution(&q).unwrap();
        assert_eq!(pi.weights, vec![r(2, 3), r(1, 3)]);
    }

    #[test]
    fn poisson_examples() {
        let q = m(&[&[0.6, 0.4], &[0.4, 0.6]]);
        let a = solve_poisson(&q, &[0.2, -0.2], 1e-9).unwrap();
        assert_abs_diff_eq!(a.values[0], 0.5, epsilon = 1e-14);
        assert_abs_diff_eq!(a.values[1], 0.0, epsilon = 1e-14);
        assert!(a.residual <= 1e-10);

        let zero = solve_poisson(&q, &[0.0, 0.0], 1e-9).unwrap();
        assert_eq!(zero.values, vec![0.0, 0.0]);

        let q2 = m(&[&[0.9, 0.1], &[0.2, 0.8]]);
        let a = solve_poisson(&q2, &[1.0, -2.0], 1e-9).unwrap();
        assert_abs_diff_eq!(a.values[0], 10.0, epsilon = 1e-12);
        assert_abs_diff_eq!(a.values[1], 0.0, epsilon = 1e-12);
    }

    #[test]
    fn poisson_exact_over_rationals() {
        // a_{+1} = (2q - 1) / (1 - q) at q = 3/5
        let q =
            StochasticMatrix::new(vec![vec![r(3, 5), r(2, 5)], vec![r(2, 5), r(3, 5)]]).unwrap();
        let a = solve_poisson(&q, &[r(1, 5), r(-1, 5)], Rational64::from_integer(0)).unwrap();
        assert_eq!(a.values, vec![r(1, 2), r(0, 1)]);
        assert_eq!(a.residual, r(0, 1));
    }

    #[test]
    fn poisson_rejects_uncentered() {
        let q = m(&[&[0.6, 0.4], &[0.4, 0.6]]);
        match solve_poisson(&q, &[0.3, 0.3], 1e-9) {
            Err(Error::NonCentered { weighted, .. }) => {
                assert_abs_diff_eq!(weighted, 0.3, epsilon = 1e-15)
            }
            other => panic!("expected NonCentered, got {other:?}"),
        }
        assert!(matches!(
            solve_poisson(&m(&[&[1.0, 0.0], &[0.0, 1.0]]), &[0.0, 0.0], 1e-9),
            Err(Error::Reducible)
        ));
        assert!(matches!(
            solve_poisson(&q, &[0.0], 1e-9),
            Err(Error::Dimension(_))
        ));
    }

    #[test]
    fn strict_drift_examples() {
        let q = m(&[&[0.6, 0.4], &[0.4, 0.6]]);
        let b = solve_strict_drift(&q, &[-1.0, -1.0], Direction::Negative).unwrap();
        assert_abs_diff_eq!(b[0], 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(b[1], 0.0, epsilon = 1e-15);

        let u = [1.0, -2.0];
        let b = solve_strict_drift(&q, &u, Direction::Negative).unwrap();
        let rows = strict_drift_rows(&q, &u, &b);
        // eps = 0.5, eps_i = 0.5 / (2 * 0.5) = 0.5 in every row
        for v in rows {
            assert_abs_diff_eq!(v, -0.5, epsilon = 1e-12);
        }

        assert!(matches!(
            solve_strict_drift(&q, &u, Direction::Positive),
            Err(Error::WrongSign { .. })
        ));
        assert!(matches!(
            solve_strict_drift(&q, &[1.0, -1.0], Direction::Negative),
            Err(Error::WrongSign { .. })
        ));
    }

    #[test]
    fn strict_drift_positive_direction() {
        let q = m(&[&[0.9, 0.1], &[0.2, 0.8]]);
        let u = [-1.0, 3.0];
        // pi = (2/3, 1/3): sum pi u = 1/3
        let b = solve_strict_drift(&q, &u, Direction::Positive).unwrap();
        assert!(strict_drift_rows(&q, &u, &b).iter().all(|v| *v > 0.0));
    }
}
