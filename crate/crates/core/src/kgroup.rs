//! Finitely generated abelian groups `ℤʳ ⊕ ℤ/d₁ ⊕ … ⊕ ℤ/dₖ` standing in for
//! `K₀(B)`, and the telescoping solver every classification decision uses.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::{Error, Result};

/// Invariant-factor description of a finitely generated abelian group.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct GroupSpec {
    free_rank: usize,
    torsion: Vec<u64>,
}

impl GroupSpec {
    pub fn new(free_rank: usize, torsion: Vec<u64>) -> Result<Self> {
        if let Some(&d) = torsion.iter().find(|&&d| d < 2) {
            return Err(Error::InvalidTorsionOrder(d));
        }
        Ok(Self { free_rank, torsion })
    }

    /// `ℤ`, the value group of essential codimensions when `B` is the compacts.
    pub fn integers() -> Self {
        Self { free_rank: 1, torsion: Vec::new() }
    }

    /// `ℤ/d`.
    pub fn cyclic(order: u64) -> Result<Self> {
        Self::new(0, vec![order])
    }

    pub fn free_rank(&self) -> usize {
        self.free_rank
    }

    pub fn torsion_orders(&self) -> &[u64] {
        &self.torsion
    }

    pub fn zero(&self) -> GroupElement {
        GroupElement {
            spec: self.clone(),
            free: vec![0; self.free_rank],
            torsion: vec![0; self.torsion.len()],
        }
    }

    /// Builds an element, reducing torsion coordinates into `[0, dⱼ)`.
    pub fn element(&self, free: Vec<i64>, torsion: &[i64]) -> Result<GroupElement> {
        if free.len() != self.free_rank {
            return Err(Error::Shape { expected: self.free_rank, found: free.len() });
        }
        if torsion.len() != self.torsion.len() {
            return Err(Error::Shape { expected: self.torsion.len(), found: torsion.len() });
        }
        if free.contains(&i64::MIN) {
            return Err(Error::Overflow);
        }
        let torsion = torsion
            .iter()
            .zip(&self.torsion)
            .map(|(&r, &d)| reduce(r as i128, d))
            .collect();
        Ok(GroupElement { spec: self.clone(), free, torsion })
    }

    /// Embeds an integer in a group with a single generator (`ℤ` or `ℤ/d`).
    pub fn from_integer(&self, value: i64) -> Result<GroupElement> {
        match (self.free_rank, self.torsion.len()) {
            (1, 0) => self.element(vec![value], &[]),
            (0, 1) => self.element(Vec::new(), &[value]),
            _ => Err(Error::SpecMismatch),
        }
    }
}

fn reduce(value: i128, order: u64) -> u64 {
    value.rem_euclid(order as i128) as u64
}

/// An element of a [`GroupSpec`] group. Torsion residues are always reduced,
/// so derived equality is group equality.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct GroupElement {
    spec: GroupSpec,
    free: Vec<i64>,
    torsion: Vec<u64>,
}

impl GroupElement {
    pub fn spec(&self) -> &GroupSpec {
        &self.spec
    }

    pub fn free_part(&self) -> &[i64] {
        &self.free
    }

    pub fn torsion_part(&self) -> &[u64] {
        &self.torsion
    }

    pub fn is_zero(&self) -> bool {
        self.free.iter().all(|&v| v == 0) && self.torsion.iter().all(|&v| v == 0)
    }

    /// The value as an integer when the group is `ℤ`.
    pub fn as_integer(&self) -> Option<i64> {
        match (self.free.as_slice(), self.torsion.is_empty()) {
            ([v], true) => Some(*v),
            _ => None,
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.spec != other.spec {
            return Err(Error::SpecMismatch);
        }
        let free = self
            .free
            .iter()
            .zip(&other.free)
            .map(|(&a, &b)| a.checked_add(b).filter(|&s| s != i64::MIN).ok_or(Error::Overflow))
            .collect::<Result<Vec<_>>>()?;
        let torsion = self
            .torsion
            .iter()
            .zip(&other.torsion)
            .zip(&self.spec.torsion)
            .map(|((&a, &b), &d)| reduce(a as i128 + b as i128, d))
            .collect();
        Ok(Self { spec: self.spec.clone(), free, torsion })
    }

    pub fn neg(&self) -> Self {
        // i64::MIN is never stored, so negation cannot overflow.
        let free = self.free.iter().map(|&a| -a).collect();
        let torsion = self
            .torsion
            .iter()
            .zip(&self.spec.torsion)
            .map(|(&a, &d)| reduce(-(a as i128), d))
            .collect();
        Self { spec: self.spec.clone(), free, torsion }
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.neg())
    }
}

impl fmt::Display for GroupElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(v) = self.as_integer() {
            return write!(f, "{v}");
        }
        if self.free.is_empty() && self.torsion.len() == 1 {
            return write!(f, "{} mod {}", self.torsion[0], self.spec.torsion[0]);
        }
        f.write_str("(")?;
        for (i, v) in self.free.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{v}")?;
        }
        f.write_str(";")?;
        for (i, v) in self.torsion.iter().enumerate() {
            f.write_str(if i == 0 { " " } else { ", " })?;
            write!(f, "{v}")?;
        }
        f.write_str(")")
    }
}

/// Why a telescoping system has no solution.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Refutation {
    /// `t_from = t_to = 0` is forced but `δ_{from+1} + … + δ_to = sum ≠ 0`.
    ForcedSegment { from: usize, to: usize, sum: GroupElement },
    /// The cyclic closure needs `δ₀ + δ₁ + … + δₙ = 0`.
    CyclicSum { sum: GroupElement },
}

impl fmt::Display for Refutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::ForcedSegment { from, to, sum } => write!(
                f,
                "t_{from} = t_{to} = 0 is forced but delta_{} + ... + delta_{to} = {sum} != 0",
                from + 1
            ),
            Self::CyclicSum { sum } => {
                write!(f, "cyclic closure needs delta_0 + ... + delta_n = 0, got {sum}")
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Telescoping {
    /// `t₀, …, tₙ`.
    Witness(Vec<GroupElement>),
    Refuted(Refutation),
}

impl Telescoping {
    pub fn witness(&self) -> Option<&[GroupElement]> {
        match self {
            Self::Witness(t) => Some(t),
            Self::Refuted(_) => None,
        }
    }
}

/// Solves `tᵢ − tᵢ₋₁ = δᵢ` (`i = 1..n`, `deltas[i-1] = δᵢ`) subject to
/// `tᵢ = 0` for every index in `forced_zero` and, when `wrap = Some(δ₀)`,
/// the cyclic closure `t₀ − tₙ = δ₀`.
///
/// Every solution is `t₀ + (partial sums)`, so the system is solvable iff the
/// partial sums agree on the forced indices (and the full cyclic sum
/// vanishes). `t₀` is pinned by the smallest forced index when there is one
/// and set to zero otherwise.
pub fn solve_telescoping(
    spec: &GroupSpec,
    deltas: &[GroupElement],
    forced_zero: &[usize],
    wrap: Option<&GroupElement>,
) -> Result<Telescoping> {
    let n = deltas.len();
    if deltas.iter().chain(wrap).any(|d| d.spec() != spec) {
        return Err(Error::SpecMismatch);
    }
    if let Some(&index) = forced_zero.iter().find(|&&i| i > n) {
        return Err(Error::ForcedIndexOutOfRange { index, max: n });
    }
    if wrap.is_some() && !forced_zero.is_empty() {
        return Err(Error::CyclicWithForcedZero);
    }

    let mut partial = Vec::with_capacity(n + 1);
    partial.push(spec.zero());
    for d in deltas {
        let next = partial[partial.len() - 1].add(d)?;
        partial.push(next);
    }

    let mut forced: Vec<usize> = forced_zero.to_vec();
    forced.sort_unstable();
    forced.dedup();

    let t0 = match forced.first() {
        Some(&anchor) => {
            for &other in &forced[1..] {
                let sum = partial[other].sub(&partial[anchor])?;
                if !sum.is_zero() {
                    return Ok(Telescoping::Refuted(Refutation::ForcedSegment {
                        from: anchor,
                        to: other,
                        sum,
                    }));
                }
            }
            partial[anchor].neg()
        }
        None => spec.zero(),
    };

    if let Some(d0) = wrap {
        let sum = d0.add(&partial[n])?;
        if !sum.is_zero() {
            return Ok(Telescoping::Refuted(Refutation::CyclicSum { sum }));
        }
    }

    let t = partial.iter().map(|s| t0.add(s)).collect::<Result<Vec<_>>>()?;
    Ok(Telescoping::Witness(t))
}
