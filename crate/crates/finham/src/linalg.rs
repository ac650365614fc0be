//! Banded linear solves for implicit time stepping.

use crate::error::{Error, Result};
use crate::real::Real;

/// Tridiagonal matrix with two optional fill-in entries: row 0 may carry a
/// coefficient at column 2 and the last row one at column n-3. Those appear
/// when one-sided second-order boundary stencils widen the edge rows.
///
/// `lower[i]` is entry (i, i-1), `diag[i]` is (i, i), `upper[i]` is (i, i+1);
/// `lower[0]` and `upper[n-1]` are ignored.
#[derive(Debug, Clone)]
pub struct TriBand<T> {
    pub lower: Vec<T>,
    pub diag: Vec<T>,
    pub upper: Vec<T>,
    pub row0_c2: T,
    pub rowl_c3: T,
}

impl<T: Real> TriBand<T> {
    pub fn zeros(n: usize) -> Result<Self> {
        if n < 4 {
            return Err(Error::invalid("n", format!("band solver needs n >= 4, got {n}")));
        }
        Ok(TriBand {
            lower: vec![T::zero(); n],
            diag: vec![T::zero(); n],
            upper: vec![T::zero(); n],
            row0_c2: T::zero(),
            rowl_c3: T::zero(),
        })
    }

    pub fn n(&self) -> usize {
        self.diag.len()
    }

    /// I + s*A, fills included.
    pub fn identity_plus(s: T, a: &TriBand<T>) -> TriBand<T> {
        let n = a.n();
        let mut m = a.clone();
        for i in 0..n {
            m.lower[i] = s * a.lower[i];
            m.diag[i] = T::one() + s * a.diag[i];
            m.upper[i] = s * a.upper[i];
        }
        m.row0_c2 = s * a.row0_c2;
        m.rowl_c3 = s * a.rowl_c3;
        m
    }

    pub fn apply(&self, v: &[T]) -> Vec<T> {
        let n = self.n();
        debug_assert_eq!(v.len(), n);
        let mut out = vec![T::zero(); n];
        out[0] = self.diag[0] * v[0] + self.upper[0] * v[1] + self.row0_c2 * v[2];
        for i in 1..n - 1 {
            out[i] = self.lower[i] * v[i - 1] + self.diag[i] * v[i] + self.upper[i] * v[i + 1];
        }
        out[n - 1] = self.rowl_c3 * v[n - 3] + self.lower[n - 1] * v[n - 2] + self.diag[n - 1] * v[n - 1];
        out
    }

    /// Thomas elimination after folding the two fill entries into their
    /// neighbour rows. Fails on a vanishing pivot instead of dividing by it.
    pub fn solve(&self, rhs: &[T]) -> Result<Vec<T>> {
        let n = self.n();
        if rhs.len() != n {
            return Err(Error::Solve(format!("rhs length {} vs matrix size {n}", rhs.len())));
        }
        let mut lower = self.lower.clone();
        let mut diag = self.diag.clone();
        let mut upper = self.upper.clone();
        let mut b = rhs.to_vec();

        if self.row0_c2 != T::zero() {
            // row 1 spans columns 0..2, so it can absorb the (0, 2) entry
            if upper[1] == T::zero() {
                return Err(Error::Solve("cannot eliminate row-0 fill: (1, 2) entry is zero".into()));
            }
            let f = self.row0_c2 / upper[1];
            diag[0] = diag[0] - f * lower[1];
            upper[0] = upper[0] - f * diag[1];
            b[0] = b[0] - f * b[1];
        }
        if self.rowl_c3 != T::zero() {
            if lower[n - 2] == T::zero() {
                return Err(Error::Solve(
                    "cannot eliminate last-row fill: subdiagonal neighbour entry is zero".into(),
                ));
            }
            let f = self.rowl_c3 / lower[n - 2];
            lower[n - 1] = lower[n - 1] - f * diag[n - 2];
            diag[n - 1] = diag[n - 1] - f * upper[n - 2];
            b[n - 1] = b[n - 1] - f * b[n - 2];
        }

        // forward sweep
        for i in 1..n {
            let pivot = diag[i - 1];
            if pivot.abs() <= T::min_positive_value() {
                return Err(Error::Solve(format!("zero pivot at row {}", i - 1)));
            }
            let w = lower[i] / pivot;
            diag[i] = diag[i] - w * upper[i - 1];
            b[i] = b[i] - w * b[i - 1];
        }
        let last = diag[n - 1];
        if last.abs() <= T::min_positive_value() {
            return Err(Error::Solve(format!("zero pivot at row {}", n - 1)));
        }
        let mut x = vec![T::zero(); n];
        x[n - 1] = b[n - 1] / last;
        for i in (0..n - 1).rev() {
            x[i] = (b[i] - upper[i] * x[i + 1]) / diag[i];
        }
        Ok(x)
    }
}
