//! The four base spaces and their partitions.
//!
//! Coordinates are bookkeeping only: classification depends on the number of
//! partition points and on which subintervals have an infinite end.

use alloc::vec::Vec;
use core::fmt;

use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SpaceKind {
    /// `[0, 1]`
    Interval,
    /// `[0, ∞)`
    HalfLine,
    /// `(−∞, ∞)`
    Line,
    /// `[0, 1]/{0 ~ 1}`, wrap point `x₀ = 0 = 1`.
    Circle,
}

impl SpaceKind {
    pub fn name(self) -> &'static str {
        match self {
            Self::Interval => "interval",
            Self::HalfLine => "half-line",
            Self::Line => "line",
            Self::Circle => "circle",
        }
    }
}

impl fmt::Display for SpaceKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Bound {
    Finite(f64),
    NegInfinity,
    PosInfinity,
}

impl Bound {
    pub fn is_infinite(self) -> bool {
        !matches!(self, Bound::Finite(_))
    }

    pub fn finite(self) -> Option<f64> {
        match self {
            Bound::Finite(x) => Some(x),
            _ => None,
        }
    }
}

/// The closed subinterval `Xᵢ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SubintervalInfo {
    pub index: usize,
    pub lower: Bound,
    pub upper: Bound,
}

impl SubintervalInfo {
    pub fn has_infinite_end(&self) -> bool {
        self.lower.is_infinite() || self.upper.is_infinite()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BaseSpace {
    kind: SpaceKind,
    partition: Vec<f64>,
}

impl BaseSpace {
    /// Validates that the partition is finite, strictly increasing and lies in
    /// the interior of the space.
    pub fn new(kind: SpaceKind, partition: Vec<f64>) -> Result<Self> {
        if partition.iter().any(|x| !x.is_finite()) {
            return Err(Error::InvalidPartition("partition points must be finite"));
        }
        if partition.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidPartition("partition points must be strictly increasing"));
        }
        let inside = match kind {
            SpaceKind::Interval | SpaceKind::Circle => partition.iter().all(|&x| 0.0 < x && x < 1.0),
            SpaceKind::HalfLine => partition.iter().all(|&x| x > 0.0),
            SpaceKind::Line => true,
        };
        if !inside {
            return Err(Error::InvalidPartition("partition points must lie in the interior"));
        }
        Ok(Self { kind, partition })
    }

    pub fn kind(&self) -> SpaceKind {
        self.kind
    }

    pub fn partition(&self) -> &[f64] {
        &self.partition
    }

    /// Number of partition points `n`; there are `n + 1` subintervals.
    pub fn n(&self) -> usize {
        self.partition.len()
    }

    /// Whether jump data carries the extra wrap jump at `x₀ = 0 = 1`.
    pub fn has_wrap(&self) -> bool {
        self.kind == SpaceKind::Circle
    }

    pub fn subintervals(&self) -> Vec<SubintervalInfo> {
        let n = self.n();
        let (start, end) = match self.kind {
            SpaceKind::Interval | SpaceKind::Circle => (Bound::Finite(0.0), Bound::Finite(1.0)),
            SpaceKind::HalfLine => (Bound::Finite(0.0), Bound::PosInfinity),
            SpaceKind::Line => (Bound::NegInfinity, Bound::PosInfinity),
        };
        (0..=n)
            .map(|i| SubintervalInfo {
                index: i,
                lower: if i == 0 { start } else { Bound::Finite(self.partition[i - 1]) },
                upper: if i == n { end } else { Bound::Finite(self.partition[i]) },
            })
            .collect()
    }

    /// Indices `i` with `tᵢ = 0` forced because `Xᵢ` has an infinite end.
    pub fn forced_zero_indices(&self) -> Vec<usize> {
        let n = self.n();
        let mut out = Vec::new();
        match self.kind {
            SpaceKind::Interval | SpaceKind::Circle => {}
            SpaceKind::HalfLine => out.push(n),
            SpaceKind::Line => {
                out.push(0);
                if n > 0 {
                    out.push(n);
                }
            }
        }
        out
    }
}
