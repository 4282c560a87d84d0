//! Local liftings: one sampled projection path per closed subinterval `Xᵢ`,
//! with window-supported jumps at the partition points.
//!
//! Grid conventions: every partition point is a sample of both adjacent
//! subintervals, and an infinite end is represented by a single *far* sample
//! ([`FAR_OFFSET`] beyond the nearest finite coordinate) where decay is tested.

mod deform;
mod path;
mod smooth;
mod witness;

pub use deform::{realize_mvn_witness, Deformation};
pub use path::{extract_subprojection, normalize_jumps, normalize_pair, subtract_ranks, trivialize_path};
pub use smooth::smooth_representative;
pub use witness::{build_mvn_witness, index_data, IsometrySegment, Mismatch, PartialIsometryPath, SegmentResidual, WitnessReport};

use corona_core::{BaseSpace, Bound, JumpData, SubintervalInfo};
use nalgebra::DMatrix;

use crate::hilbert::linalg::op_norm;
use crate::hilbert::{essential_codimension, is_window_supported, ProjectionMatrix, TailPattern, MAX_GAP};
use crate::{Error, Result};

/// Distance of the far sample from the nearest finite coordinate.
pub const FAR_OFFSET: f64 = 10.0;
/// Norm bound for "vanishes at an infinite end", tested at far samples.
pub const DECAY_TOL: f64 = 1e-6;

/// The finite stretch of `Xᵢ` that carries the regular samples: the
/// subinterval itself when compact, otherwise one unit next to its finite end
/// (`(−1, 1)` for the whole line).
pub fn finite_span(info: &SubintervalInfo) -> (f64, f64) {
    match (info.lower.finite(), info.upper.finite()) {
        (Some(a), Some(b)) => (a, b),
        (None, Some(b)) => (b - 1.0, b),
        (Some(a), None) => (a, a + 1.0),
        (None, None) => (-1.0, 1.0),
    }
}

/// `samples` equispaced points on [`finite_span`], plus a far sample for each
/// infinite end.
pub fn default_grid(info: &SubintervalInfo, samples: usize) -> Vec<f64> {
    let (a, b) = finite_span(info);
    let m = samples.max(2);
    let mut grid = Vec::with_capacity(m + 2);
    if info.lower.is_infinite() {
        grid.push(info.upper.finite().unwrap_or(0.0) - FAR_OFFSET);
    }
    grid.extend((0..m).map(|j| if j == m - 1 { b } else { a + (b - a) * j as f64 / (m - 1) as f64 }));
    if info.upper.is_infinite() {
        grid.push(info.lower.finite().unwrap_or(0.0) + FAR_OFFSET);
    }
    grid
}

fn check_grid(info: &SubintervalInfo, grid: &[f64]) -> Result<()> {
    if grid.is_empty() {
        return Err(Error::GridMismatch(format!("X_{} has an empty grid", info.index)));
    }
    // Negated so that NaN grid points are rejected too.
    #[allow(clippy::neg_cmp_op_on_partial_ord)]
    if grid.windows(2).any(|w| !(w[0] < w[1])) {
        return Err(Error::GridMismatch(format!("grid of X_{} is not strictly increasing", info.index)));
    }
    let ends = [(info.lower, grid[0]), (info.upper, grid[grid.len() - 1])];
    for (bound, sample) in ends {
        match bound {
            Bound::Finite(x) if x != sample => {
                return Err(Error::GridMismatch(format!("X_{} must be sampled at its end point {x}", info.index)));
            }
            Bound::NegInfinity | Bound::PosInfinity if grid.len() < 2 => {
                return Err(Error::GridMismatch(format!("X_{} needs a far sample and a finite sample", info.index)));
            }
            _ => {}
        }
    }
    Ok(())
}

/// Sampled projection path over one subinterval. Neighbouring samples are
/// within [`MAX_GAP`] in operator norm and share dimension, window and tail.
#[derive(Debug, Clone, PartialEq)]
pub struct ProjectionPath {
    info: SubintervalInfo,
    grid: Vec<f64>,
    samples: Vec<ProjectionMatrix>,
}

impl ProjectionPath {
    pub fn new(info: SubintervalInfo, grid: Vec<f64>, samples: Vec<ProjectionMatrix>) -> Result<Self> {
        if grid.len() != samples.len() {
            return Err(Error::GridMismatch(format!("{} grid points but {} samples", grid.len(), samples.len())));
        }
        check_grid(&info, &grid)?;
        let first = &samples[0];
        for (x, s) in grid.iter().zip(&samples) {
            if s.dim() != first.dim() || s.window() != first.window() || s.tail() != first.tail() {
                return Err(Error::AtPoint {
                    point: *x,
                    source: Box::new(Error::Shape("samples differ in dimension, window or tail".into())),
                });
            }
        }
        for j in 1..samples.len() {
            let gap = op_norm(&(samples[j].window_block() - samples[j - 1].window_block()));
            if gap > MAX_GAP {
                return Err(Error::AtPoint { point: grid[j], source: Box::new(Error::SamplesTooCoarse(gap)) });
            }
        }
        Ok(Self { info, grid, samples })
    }

    pub fn info(&self) -> &SubintervalInfo {
        &self.info
    }

    pub fn grid(&self) -> &[f64] {
        &self.grid
    }

    pub fn samples(&self) -> &[ProjectionMatrix] {
        &self.samples
    }

    pub fn first(&self) -> &ProjectionMatrix {
        &self.samples[0]
    }

    pub fn last(&self) -> &ProjectionMatrix {
        &self.samples[self.samples.len() - 1]
    }

    pub fn dim(&self) -> usize {
        self.first().dim()
    }

    pub fn window(&self) -> usize {
        self.first().window()
    }

    pub fn tail(&self) -> &TailPattern {
        self.first().tail()
    }

    /// Smallest window rank over the samples.
    pub fn min_window_rank(&self) -> usize {
        self.samples.iter().map(ProjectionMatrix::window_rank).min().unwrap_or(0)
    }
}

/// A local lifting `p = (p₀, …, pₙ)` over a partitioned base space.
///
/// Every sample has window rank and corank at least one (the finite stand-in
/// for "full and properly infinite"), all paths share one tail, and the jumps
/// at partition points (and the wrap point of the circle) are
/// window-supported.
#[derive(Debug, Clone, PartialEq)]
pub struct LocalLifting {
    space: BaseSpace,
    paths: Vec<ProjectionPath>,
}

impl LocalLifting {
    pub fn new(space: BaseSpace, paths: Vec<ProjectionPath>) -> Result<Self> {
        let infos = space.subintervals();
        if paths.len() != infos.len() {
            return Err(Error::InvalidLifting(format!("{} paths for {} subintervals", paths.len(), infos.len())));
        }
        for (path, info) in paths.iter().zip(&infos) {
            if path.info != *info {
                return Err(Error::InvalidLifting(format!("path {} is not over X_{}", path.info.index, info.index)));
            }
        }
        let first = &paths[0];
        for path in &paths {
            if path.dim() != first.dim() || path.window() != first.window() || path.tail() != first.tail() {
                return Err(Error::InvalidLifting(format!(
                    "X_{} differs from X_0 in dimension, window or tail",
                    path.info.index
                )));
            }
            let w = path.window();
            for (x, s) in path.grid.iter().zip(&path.samples) {
                let r = s.window_rank();
                if r == 0 || r == w {
                    return Err(Error::AtPoint {
                        point: *x,
                        source: Box::new(Error::InvalidLifting(format!(
                            "window rank {r} of {w}: need rank and corank at least 1"
                        ))),
                    });
                }
            }
        }
        let lifting = Self { space, paths };
        for (point, after, before) in lifting.junctions() {
            let diff = after.matrix() - before.matrix();
            if !is_window_supported(&diff, after.window()) {
                return Err(Error::AtPoint { point, source: Box::new(Error::NotWindowSupported("jump".into())) });
            }
        }
        Ok(lifting)
    }

    pub fn space(&self) -> &BaseSpace {
        &self.space
    }

    pub fn paths(&self) -> &[ProjectionPath] {
        &self.paths
    }

    pub fn dim(&self) -> usize {
        self.paths[0].dim()
    }

    pub fn window(&self) -> usize {
        self.paths[0].window()
    }

    pub fn tail(&self) -> &TailPattern {
        self.paths[0].tail()
    }

    /// `(xᵢ, pᵢ(xᵢ), pᵢ₋₁(xᵢ))` for `i = 1..n`, then the wrap point of the
    /// circle as `(0, p₀(0), pₙ(1))`.
    fn junctions(&self) -> Vec<(f64, &ProjectionMatrix, &ProjectionMatrix)> {
        let n = self.space.n();
        let mut out: Vec<_> = (1..=n)
            .map(|i| (self.space.partition()[i - 1], self.paths[i].first(), self.paths[i - 1].last()))
            .collect();
        if self.space.has_wrap() {
            out.push((0.0, self.paths[0].first(), self.paths[n].last()));
        }
        out
    }

    /// Section data for [`same_corona_class`] and [`smooth_representative`].
    pub fn to_section(&self) -> Section {
        Section {
            space: self.space.clone(),
            window: self.window(),
            segments: self
                .paths
                .iter()
                .map(|p| SectionSegment {
                    grid: p.grid.clone(),
                    samples: p.samples.iter().map(|s| s.matrix().clone()).collect(),
                })
                .collect(),
        }
    }
}

/// Integer jumps `kᵢ = [pᵢ(xᵢ) : pᵢ₋₁(xᵢ)]` and, for the circle, the wrap
/// jump `k₀ = [p₀(0) : pₙ(1)]`. Errors name the offending point.
pub fn jump_integers(lifting: &LocalLifting) -> Result<(Vec<i64>, Option<i64>)> {
    let n = lifting.space.n();
    let mut jumps = Vec::with_capacity(n);
    let mut wrap = None;
    for (idx, (point, after, before)) in lifting.junctions().into_iter().enumerate() {
        let k = essential_codimension(after, before).map_err(|e| Error::AtPoint { point, source: Box::new(e) })?;
        if idx < n {
            jumps.push(k);
        } else {
            wrap = Some(k);
        }
    }
    Ok((jumps, wrap))
}

/// [`jump_integers`] as [`JumpData`] over `ℤ`.
pub fn jump_classes(lifting: &LocalLifting) -> Result<JumpData> {
    let (jumps, wrap) = jump_integers(lifting)?;
    Ok(JumpData::integers(&jumps, wrap)?)
}

/// Matrix-valued section data, one sampled segment per subinterval. Unlike a
/// [`LocalLifting`] the samples need not be projections.
#[derive(Debug, Clone, PartialEq)]
pub struct Section {
    pub space: BaseSpace,
    pub window: usize,
    pub segments: Vec<SectionSegment>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SectionSegment {
    pub grid: Vec<f64>,
    pub samples: Vec<DMatrix<f64>>,
}

impl Section {
    fn check_aligned(&self, other: &Self) -> Result<()> {
        if self.space != other.space || self.window != other.window {
            return Err(Error::GridMismatch("different base spaces or windows".into()));
        }
        if self.segments.len() != other.segments.len() {
            return Err(Error::GridMismatch("different numbers of segments".into()));
        }
        for (i, (a, b)) in self.segments.iter().zip(&other.segments).enumerate() {
            if a.grid != b.grid {
                return Err(Error::GridMismatch(format!("grids differ on X_{i}")));
            }
            let shape = |s: &SectionSegment| s.samples.iter().map(|m| m.shape()).collect::<Vec<_>>();
            if shape(a) != shape(b) {
                return Err(Error::GridMismatch(format!("sample shapes differ on X_{i}")));
            }
        }
        Ok(())
    }

    /// Indices `(segment, sample)` of far samples at infinite ends.
    fn far_samples(&self) -> Vec<(usize, usize)> {
        let infos = self.space.subintervals();
        let mut out = Vec::new();
        if infos[0].lower.is_infinite() {
            out.push((0, 0));
        }
        let last = infos.len() - 1;
        if infos[last].upper.is_infinite() {
            out.push((last, self.segments[last].samples.len() - 1));
        }
        out
    }
}

/// Whether `f` and `g` define the same corona element: at every shared sample
/// `f − g` is window-supported, and it vanishes (to [`DECAY_TOL`]) at far
/// samples of infinite ends.
pub fn same_corona_class(f: &Section, g: &Section) -> Result<bool> {
    f.check_aligned(g)?;
    for (a, b) in f.segments.iter().zip(&g.segments) {
        for (x, y) in a.samples.iter().zip(&b.samples) {
            if !is_window_supported(&(x - y), f.window) {
                return Ok(false);
            }
        }
    }
    for (i, j) in f.far_samples() {
        if op_norm(&(&f.segments[i].samples[j] - &g.segments[i].samples[j])) > DECAY_TOL {
            return Ok(false);
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use corona_core::SpaceKind;

    fn front(w: usize, dim: usize, f: usize) -> ProjectionMatrix {
        let b = DMatrix::from_fn(w, w, |r, c| if r == c && r < f { 1.0 } else { 0.0 });
        ProjectionMatrix::from_window_block(&b, dim, TailPattern::alternating()).unwrap()
    }

    fn constant_lifting(space: &BaseSpace, fronts: &[usize]) -> LocalLifting {
        let paths = space
            .subintervals()
            .iter()
            .zip(fronts)
            .map(|(info, &f)| {
                let grid = default_grid(info, 4);
                let samples = vec![front(8, 16, f); grid.len()];
                ProjectionPath::new(*info, grid, samples).unwrap()
            })
            .collect();
        LocalLifting::new(space.clone(), paths).unwrap()
    }

    #[test]
    fn grids_follow_conventions() {
        let line = BaseSpace::new(SpaceKind::Line, vec![0.0, 2.0]).unwrap();
        let infos = line.subintervals();
        assert_eq!(default_grid(&infos[0], 3), vec![-10.0, -1.0, -0.5, 0.0]);
        assert_eq!(default_grid(&infos[1], 3), vec![0.0, 1.0, 2.0]);
        assert_eq!(default_grid(&infos[2], 2), vec![2.0, 3.0, 12.0]);
        let whole = BaseSpace::new(SpaceKind::Line, vec![]).unwrap();
        assert_eq!(default_grid(&whole.subintervals()[0], 3), vec![-10.0, -1.0, 0.0, 1.0, 10.0]);
        let half = BaseSpace::new(SpaceKind::HalfLine, vec![]).unwrap();
        assert_eq!(default_grid(&half.subintervals()[0], 2), vec![0.0, 1.0, 10.0]);
    }

    #[test]
    fn constant_lifting_has_zero_jumps() {
        let s = BaseSpace::new(SpaceKind::Interval, vec![0.5]).unwrap();
        let l = constant_lifting(&s, &[3, 3]);
        assert_eq!(jump_integers(&l).unwrap(), (vec![0], None));
    }

    #[test]
    fn front_jumps_are_counted() {
        let s = BaseSpace::new(SpaceKind::Circle, vec![0.3, 0.6]).unwrap();
        let l = constant_lifting(&s, &[2, 3, 5]);
        assert_eq!(jump_integers(&l).unwrap(), (vec![1, 2], Some(-3)));
    }

    #[test]
    fn homogeneity_is_enforced() {
        let s = BaseSpace::new(SpaceKind::Interval, vec![]).unwrap();
        let info = s.subintervals()[0];
        let grid = default_grid(&info, 2);
        let path = ProjectionPath::new(info, grid.clone(), vec![front(8, 16, 0); 2]).unwrap();
        assert!(matches!(LocalLifting::new(s.clone(), vec![path]), Err(Error::AtPoint { .. })));
        let path = ProjectionPath::new(info, grid, vec![front(8, 16, 8); 2]).unwrap();
        assert!(LocalLifting::new(s, vec![path]).is_err());
    }

    #[test]
    fn coarse_paths_are_rejected() {
        let s = BaseSpace::new(SpaceKind::Interval, vec![]).unwrap();
        let info = s.subintervals()[0];
        let err = ProjectionPath::new(info, vec![0.0, 1.0], vec![front(8, 16, 2), front(8, 16, 3)]).unwrap_err();
        assert!(matches!(err, Error::AtPoint { point, .. } if point == 1.0));
    }

    #[test]
    fn corona_class_predicate() {
        let s = BaseSpace::new(SpaceKind::Line, vec![0.0]).unwrap();
        let f = constant_lifting(&s, &[3, 3]).to_section();
        assert!(same_corona_class(&f, &f).unwrap());

        let mut g = f.clone();
        g.segments[1].samples[1][(0, 1)] += 0.25;
        assert!(same_corona_class(&f, &g).unwrap());

        // Window-supported but not decaying at the far sample.
        let mut g = f.clone();
        g.segments[1].samples.last_mut().unwrap()[(0, 0)] = 0.0;
        assert!(!same_corona_class(&f, &g).unwrap());

        // Tail change.
        let mut g = f.clone();
        g.segments[0].samples[1][(9, 9)] = 1.0 - g.segments[0].samples[1][(9, 9)];
        assert!(!same_corona_class(&f, &g).unwrap());

        let mut g = f.clone();
        g.segments[0].grid[1] += 0.01;
        assert!(matches!(same_corona_class(&f, &g), Err(Error::GridMismatch(_))));
    }
}
