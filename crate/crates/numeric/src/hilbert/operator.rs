use std::fmt;

use nalgebra::DMatrix;

use super::{linalg, STABILIZATION_STEP, TOL_INPUT};
use crate::{Error, Result};

/// Periodic 0/1 pattern on tail coordinates: entry `W + k` is `period[k % len]`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct TailPattern {
    period: Vec<bool>,
}

impl TailPattern {
    pub fn periodic(period: Vec<bool>) -> Result<Self> {
        if period.is_empty() {
            return Err(Error::Shape("tail pattern period must be non-empty".into()));
        }
        // Reduce to the minimal period so equal patterns compare equal.
        let len = period.len();
        let minimal = (1..=len)
            .filter(|d| len.is_multiple_of(*d))
            .find(|&d| (0..len).all(|k| period[k] == period[k % d]))
            .unwrap_or(len);
        Ok(Self { period: period[..minimal].to_vec() })
    }

    pub fn ones() -> Self {
        Self { period: vec![true] }
    }

    pub fn zeros() -> Self {
        Self { period: vec![false] }
    }

    /// `1, 0, 1, 0, …`: infinite rank and infinite corank.
    pub fn alternating() -> Self {
        Self { period: vec![true, false] }
    }

    pub fn period(&self) -> &[bool] {
        &self.period
    }

    pub fn at(&self, offset: usize) -> bool {
        self.period[offset % self.period.len()]
    }

    pub fn is_zero(&self) -> bool {
        self.period.iter().all(|b| !b)
    }

    fn combine(&self, other: &Self, op: impl Fn(bool, bool) -> bool) -> Self {
        let len = lcm(self.period.len(), other.period.len());
        let period = (0..len).map(|k| op(self.at(k), other.at(k))).collect();
        Self::periodic(period).expect("non-empty")
    }

    pub fn intersection(&self, other: &Self) -> Self {
        self.combine(other, |a, b| a && b)
    }

    pub fn union(&self, other: &Self) -> Self {
        self.combine(other, |a, b| a || b)
    }

    pub fn is_disjoint(&self, other: &Self) -> bool {
        self.intersection(other).is_zero()
    }

    pub fn complement(&self) -> Self {
        Self { period: self.period.iter().map(|b| !b).collect() }
    }
}

fn lcm(a: usize, b: usize) -> usize {
    fn gcd(a: usize, b: usize) -> usize {
        if b == 0 {
            a
        } else {
            gcd(b, a % b)
        }
    }
    a / gcd(a, b) * b
}

impl fmt::Display for TailPattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &b in &self.period {
            f.write_str(if b { "1" } else { "0" })?;
        }
        f.write_str("…")
    }
}

/// How an operator acts on the tail.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum TailMap {
    /// Diagonal 0/1 pattern, no coupling to the window.
    Diagonal(TailPattern),
    /// `e_j ↦ e_{j+s}` wherever row or column lies in the tail; couples the
    /// last (first) window coordinates to the tail.
    Shift(isize),
}

impl TailMap {
    fn expected(&self, window: usize, row: usize, col: usize) -> f64 {
        let hit = match self {
            TailMap::Diagonal(p) => row == col && p.at(row - window),
            TailMap::Shift(s) => row as isize == col as isize + s,
        };
        if hit {
            1.0
        } else {
            0.0
        }
    }

    pub fn pattern(&self) -> Option<&TailPattern> {
        match self {
            TailMap::Diagonal(p) => Some(p),
            TailMap::Shift(_) => None,
        }
    }
}

/// An `N × N` real matrix that equals its declared [`TailMap`] exactly on
/// every entry whose row or column index is `≥ W`.
#[derive(Debug, Clone, PartialEq)]
pub struct TruncatedOperator {
    window: usize,
    tail: TailMap,
    entries: DMatrix<f64>,
}

impl TruncatedOperator {
    pub fn new(entries: DMatrix<f64>, window: usize, tail: TailMap) -> Result<Self> {
        let n = entries.nrows();
        if entries.ncols() != n {
            return Err(Error::Shape(format!("operator must be square, got {}x{}", n, entries.ncols())));
        }
        if window == 0 || n < window + STABILIZATION_STEP {
            return Err(Error::Shape(format!(
                "need 0 < window and dim >= window + {STABILIZATION_STEP}, got window {window}, dim {n}"
            )));
        }
        for col in 0..n {
            for row in 0..n {
                if (row >= window || col >= window) && entries[(row, col)] != tail.expected(window, row, col) {
                    return Err(Error::TailViolation { row, col });
                }
            }
        }
        Ok(Self { window, tail, entries })
    }

    /// Places a `W × W` block in the window and fills the tail diagonally.
    pub fn from_window_block(block: &DMatrix<f64>, dim: usize, tail: TailPattern) -> Result<Self> {
        let w = block.nrows();
        if block.ncols() != w {
            return Err(Error::Shape("window block must be square".into()));
        }
        if w == 0 || dim < w + STABILIZATION_STEP {
            return Err(Error::Shape(format!("dim {dim} too small for window {w}")));
        }
        let mut entries = DMatrix::zeros(dim, dim);
        entries.view_mut((0, 0), (w, w)).copy_from(block);
        for k in w..dim {
            if tail.at(k - w) {
                entries[(k, k)] = 1.0;
            }
        }
        Ok(Self { window: w, tail: TailMap::Diagonal(tail), entries })
    }

    pub fn identity(dim: usize, window: usize) -> Result<Self> {
        Self::from_window_block(&DMatrix::identity(window, window), dim, TailPattern::ones())
    }

    /// `e_j ↦ e_{j+s}` on all of `ℝᴺ` (the unilateral shift for `s = 1`).
    pub fn shift(dim: usize, window: usize, s: isize) -> Result<Self> {
        let entries = DMatrix::from_fn(dim, dim, |r, c| if r as isize == c as isize + s { 1.0 } else { 0.0 });
        Self::new(entries, window, TailMap::Shift(s))
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn window(&self) -> usize {
        self.window
    }

    pub fn tail(&self) -> &TailMap {
        &self.tail
    }

    pub fn entries(&self) -> &DMatrix<f64> {
        &self.entries
    }

    pub fn window_block(&self) -> DMatrix<f64> {
        self.entries.view((0, 0), (self.window, self.window)).into_owned()
    }

    /// The same operator at truncation `N + extra`.
    pub fn extended(&self, extra: usize) -> Self {
        let n = self.dim() + extra;
        let w = self.window;
        let mut entries = DMatrix::from_fn(n, n, |r, c| {
            if r >= w || c >= w {
                self.tail.expected(w, r, c)
            } else {
                0.0
            }
        });
        entries.view_mut((0, 0), (w, w)).copy_from(&self.entries.view((0, 0), (w, w)));
        Self { window: w, tail: self.tail.clone(), entries }
    }

    pub fn transpose(&self) -> Self {
        let tail = match &self.tail {
            TailMap::Diagonal(p) => TailMap::Diagonal(p.clone()),
            TailMap::Shift(s) => TailMap::Shift(-s),
        };
        Self { window: self.window, tail, entries: self.entries.transpose() }
    }

    /// `self · other` for diagonal tails.
    pub fn compose(&self, other: &Self) -> Result<Self> {
        let (TailMap::Diagonal(a), TailMap::Diagonal(b)) = (&self.tail, &other.tail) else {
            return Err(Error::Shape("composition needs diagonal tails".into()));
        };
        if self.dim() != other.dim() || self.window != other.window {
            return Err(Error::Shape("composition of operators with different truncations".into()));
        }
        let product = &self.entries * &other.entries;
        Self::new(product, self.window, TailMap::Diagonal(a.intersection(b)))
    }
}

/// A symmetric idempotent [`TruncatedOperator`] with a diagonal 0/1 tail.
#[derive(Debug, Clone, PartialEq)]
pub struct ProjectionMatrix(TruncatedOperator);

impl ProjectionMatrix {
    pub fn new(op: TruncatedOperator) -> Result<Self> {
        Self::with_tolerance(op, TOL_INPUT)
    }

    pub fn with_tolerance(op: TruncatedOperator, tol: f64) -> Result<Self> {
        if !matches!(op.tail, TailMap::Diagonal(_)) {
            return Err(Error::Shape("projection tail must be a diagonal pattern".into()));
        }
        let b = op.window_block();
        let symmetry = (&b - b.transpose()).norm();
        let idempotency = (&b * &b - &b).norm();
        if symmetry > tol || idempotency > tol {
            return Err(Error::NotProjection { symmetry, idempotency });
        }
        Ok(Self(op))
    }

    pub fn from_window_block(block: &DMatrix<f64>, dim: usize, tail: TailPattern) -> Result<Self> {
        Self::new(TruncatedOperator::from_window_block(block, dim, tail)?)
    }

    /// Window block symmetrized before validation; for constructed projections
    /// carrying rounding noise.
    pub(crate) fn from_constructed_block(block: &DMatrix<f64>, dim: usize, tail: TailPattern, tol: f64) -> Result<Self> {
        let sym = (block + block.transpose()) * 0.5;
        Self::with_tolerance(TruncatedOperator::from_window_block(&sym, dim, tail)?, tol)
    }

    pub fn op(&self) -> &TruncatedOperator {
        &self.0
    }

    pub fn into_op(self) -> TruncatedOperator {
        self.0
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.0.entries
    }

    pub fn dim(&self) -> usize {
        self.0.dim()
    }

    pub fn window(&self) -> usize {
        self.0.window
    }

    pub fn tail(&self) -> &TailPattern {
        match &self.0.tail {
            TailMap::Diagonal(p) => p,
            TailMap::Shift(_) => unreachable!("validated at construction"),
        }
    }

    pub fn window_block(&self) -> DMatrix<f64> {
        self.0.window_block()
    }

    /// Rank of the window block.
    pub fn window_rank(&self) -> usize {
        linalg::numerical_rank(&self.window_block(), super::RANK_TOL)
    }

    pub fn extended(&self, extra: usize) -> Self {
        Self(self.0.extended(extra))
    }

    /// `1 − p`.
    pub fn complement(&self) -> Self {
        let b = DMatrix::identity(self.window(), self.window()) - self.window_block();
        Self(
            TruncatedOperator::from_window_block(&b, self.dim(), self.tail().complement())
                .expect("same truncation"),
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn patterns_canonicalize() {
        let a = TailPattern::periodic(vec![true, false, true, false]).unwrap();
        assert_eq!(a, TailPattern::alternating());
        assert_eq!(TailPattern::periodic(vec![true, true]).unwrap(), TailPattern::ones());
        assert!(TailPattern::periodic(vec![]).is_err());
        let odd = TailPattern::alternating().complement();
        assert!(odd.is_disjoint(&TailPattern::alternating()));
        assert_eq!(odd.union(&TailPattern::alternating()), TailPattern::ones());
    }

    #[test]
    fn tail_is_enforced() {
        let mut m = DMatrix::<f64>::identity(16, 16);
        assert!(TruncatedOperator::new(m.clone(), 8, TailMap::Diagonal(TailPattern::ones())).is_ok());
        m[(3, 12)] = 1e-17;
        assert_eq!(
            TruncatedOperator::new(m, 8, TailMap::Diagonal(TailPattern::ones())),
            Err(Error::TailViolation { row: 3, col: 12 })
        );
    }

    #[test]
    fn needs_headroom() {
        let m = DMatrix::<f64>::identity(12, 12);
        assert!(TruncatedOperator::new(m, 8, TailMap::Diagonal(TailPattern::ones())).is_err());
    }

    #[test]
    fn extension_keeps_window_and_regenerates_tail() {
        let block = DMatrix::from_fn(4, 4, |r, c| (r * 4 + c) as f64);
        let op = TruncatedOperator::from_window_block(&block, 12, TailPattern::alternating()).unwrap();
        let big = op.extended(8);
        assert_eq!(big.dim(), 20);
        assert_eq!(big.window_block(), block);
        assert!(TruncatedOperator::new(big.entries().clone(), 4, big.tail().clone()).is_ok());

        let s = TruncatedOperator::shift(12, 4, 1).unwrap().extended(8);
        assert_eq!(s, TruncatedOperator::shift(20, 4, 1).unwrap());
    }

    #[test]
    fn projection_validation() {
        let mut b = DMatrix::zeros(4, 4);
        b[(0, 0)] = 1.0;
        assert!(ProjectionMatrix::from_window_block(&b, 12, TailPattern::ones()).is_ok());
        b[(1, 1)] = 0.5;
        assert!(matches!(
            ProjectionMatrix::from_window_block(&b, 12, TailPattern::ones()),
            Err(Error::NotProjection { .. })
        ));
        let shift = TruncatedOperator::shift(12, 4, 1).unwrap();
        assert!(ProjectionMatrix::new(shift).is_err());
    }

    #[test]
    fn complement_flips_tail() {
        let mut b = DMatrix::zeros(4, 4);
        b[(0, 0)] = 1.0;
        let p = ProjectionMatrix::from_window_block(&b, 12, TailPattern::alternating()).unwrap();
        let c = p.complement();
        assert_eq!(c.window_rank(), 3);
        assert_eq!(c.tail(), &TailPattern::alternating().complement());
        let sum = p.matrix() + c.matrix();
        assert_eq!(sum, DMatrix::identity(12, 12));
    }
}
