use nalgebra::DMatrix;

use super::path::transports;
use super::LocalLifting;
use crate::hilbert::linalg::op_norm;
use crate::hilbert::{completion_block, essential_codimension, is_window_supported, ProjectionMatrix, TruncatedOperator};
use crate::{Error, Result};

/// Residual bound for partial isometries along a witness path.
pub const WITNESS_TOL: f64 = 1e-6;

/// Sampled partial isometries over one subinterval.
#[derive(Debug, Clone, PartialEq)]
pub struct IsometrySegment {
    pub grid: Vec<f64>,
    pub samples: Vec<TruncatedOperator>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SegmentResidual {
    pub subinterval: usize,
    /// `max ‖uᵀu − p‖` over the samples.
    pub source: f64,
    /// `max ‖uuᵀ − q‖` over the samples.
    pub range: f64,
}

/// `uᵢ(xᵢ) − uᵢ₋₁(xᵢ)` at a partition point (or the wrap point).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mismatch {
    pub point: f64,
    pub window_supported: bool,
    pub norm: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct WitnessReport {
    pub residuals: Vec<SegmentResidual>,
    pub mismatches: Vec<Mismatch>,
    pub wrap: Option<Mismatch>,
}

impl WitnessReport {
    pub fn max_residual(&self) -> f64 {
        self.residuals.iter().map(|r| r.source.max(r.range)).fold(0.0, f64::max)
    }

    pub fn all_window_supported(&self) -> bool {
        self.mismatches.iter().chain(&self.wrap).all(|m| m.window_supported)
    }
}

/// An MvN witness `u = (u₀, …, uₙ)` with `uᵢᵀuᵢ = pᵢ`, `uᵢuᵢᵀ = qᵢ` and
/// window-supported mismatches at partition points.
#[derive(Debug, Clone, PartialEq)]
pub struct PartialIsometryPath {
    pub segments: Vec<IsometrySegment>,
    pub report: WitnessReport,
}

fn check_pair(lp: &LocalLifting, lq: &LocalLifting) -> Result<()> {
    if lp.space() != lq.space() {
        return Err(Error::GridMismatch("liftings over different base spaces".into()));
    }
    if lp.dim() != lq.dim() || lp.window() != lq.window() {
        return Err(Error::Shape("liftings with different truncations".into()));
    }
    if lp.tail() != lq.tail() {
        return Err(Error::InvalidLifting("p and q must share the tail pattern".into()));
    }
    for (i, (a, b)) in lp.paths().iter().zip(lq.paths()).enumerate() {
        if a.grid() != b.grid() {
            return Err(Error::GridMismatch(format!("grids differ on X_{i}")));
        }
    }
    Ok(())
}

/// Builds `u` with `uᵀu = p` and `uuᵀ = q` subinterval by subinterval.
///
/// On `Xᵢ` a partial isometry `vᵢ: ran pᵢ(xᵢ) → ran qᵢ(xᵢ)` is transported
/// along both paths: `uᵢ(x) = U_q(x) vᵢ U_p(x)ᵀ`. For `i ≥ 1`, `vᵢ` is the
/// compact-perturbation completion of `qᵢ(xᵢ) uᵢ₋₁(xᵢ) pᵢ(xᵢ)`, which exists
/// exactly when the window ranks agree (index zero); otherwise the offending
/// partition point is reported. Because the transported `vᵢ` is already
/// continuous on `Xᵢ`, no separate reconnection is needed.
pub fn build_mvn_witness(lp: &LocalLifting, lq: &LocalLifting) -> Result<PartialIsometryPath> {
    check_pair(lp, lq)?;
    let (dim, w) = (lp.dim(), lp.window());
    let tail = lp.tail().clone();
    let mut blocks: Vec<Vec<DMatrix<f64>>> = Vec::with_capacity(lp.paths().len());
    let mut residuals = Vec::new();
    for (i, (pp, pq)) in lp.paths().iter().zip(lq.paths()).enumerate() {
        let up = transports(pp)?;
        let uq = transports(pq)?;
        let start = match blocks.last() {
            Some(prev) => prev[prev.len() - 1].clone(),
            None => DMatrix::identity(w, w),
        };
        let x = pp.grid()[0];
        let v = completion_block(&start, &pp.first().window_block(), &pq.first().window_block(), false)
            .map_err(|e| Error::AtPoint { point: x, source: Box::new(e) })?;
        let mut seg = Vec::with_capacity(up.len());
        let mut res = SegmentResidual { subinterval: i, source: 0.0, range: 0.0 };
        for (j, (a, b)) in up.iter().zip(&uq).enumerate() {
            let u = b * &v * a.transpose();
            let source = (u.transpose() * &u - pp.samples()[j].window_block()).norm();
            let range = (&u * u.transpose() - pq.samples()[j].window_block()).norm();
            if source.max(range) > WITNESS_TOL {
                return Err(Error::AtPoint {
                    point: pp.grid()[j],
                    source: Box::new(Error::Numerical(format!("witness residuals {source:.3e}, {range:.3e}"))),
                });
            }
            res.source = res.source.max(source);
            res.range = res.range.max(range);
            seg.push(u);
        }
        residuals.push(res);
        blocks.push(seg);
    }
    let segments: Vec<IsometrySegment> = blocks
        .iter()
        .zip(lp.paths())
        .map(|(seg, path)| {
            let samples = seg
                .iter()
                .map(|u| TruncatedOperator::from_window_block(u, dim, tail.clone()))
                .collect::<Result<Vec<_>>>()?;
            Ok(IsometrySegment { grid: path.grid().to_vec(), samples })
        })
        .collect::<Result<_>>()?;
    let mismatch = |point: f64, after: &TruncatedOperator, before: &TruncatedOperator| {
        let d = after.entries() - before.entries();
        Mismatch { point, window_supported: is_window_supported(&d, w), norm: op_norm(&(after.window_block() - before.window_block())) }
    };
    let n = segments.len() - 1;
    let mismatches = (1..=n)
        .map(|i| {
            let before = &segments[i - 1].samples;
            mismatch(lp.space().partition()[i - 1], &segments[i].samples[0], &before[before.len() - 1])
        })
        .collect();
    let wrap = lp.space().has_wrap().then(|| {
        let last = &segments[n].samples;
        mismatch(0.0, &segments[0].samples[0], &last[last.len() - 1])
    });
    Ok(PartialIsometryPath { segments, report: WitnessReport { residuals, mismatches, wrap } })
}

/// `tᵢ = [pᵢ : uᵀu] − [qᵢ : uuᵀ]`, evaluated at every sample of `Xᵢ`.
///
/// Must be constant on each subinterval and zero on subintervals with an
/// infinite end.
pub fn index_data(u: &PartialIsometryPath, lp: &LocalLifting, lq: &LocalLifting) -> Result<Vec<i64>> {
    check_pair(lp, lq)?;
    if u.segments.len() != lp.paths().len() {
        return Err(Error::Shape("witness and liftings have different numbers of segments".into()));
    }
    let infos = lp.space().subintervals();
    let mut t = Vec::with_capacity(infos.len());
    for (i, (seg, (pp, pq))) in u.segments.iter().zip(lp.paths().iter().zip(lq.paths())).enumerate() {
        if seg.grid != pp.grid() {
            return Err(Error::GridMismatch(format!("witness grid differs on X_{i}")));
        }
        let mut value = None;
        for (j, op) in seg.samples.iter().enumerate() {
            let at = |e: Error| Error::AtPoint { point: seg.grid[j], source: Box::new(e) };
            let m = op.window_block();
            let (p, q) = (&pp.samples()[j], &pq.samples()[j]);
            let source = ProjectionMatrix::from_constructed_block(&(m.transpose() * &m), p.dim(), p.tail().clone(), WITNESS_TOL)
                .map_err(at)?;
            let range = ProjectionMatrix::from_constructed_block(&(&m * m.transpose()), q.dim(), q.tail().clone(), WITNESS_TOL)
                .map_err(at)?;
            let here = essential_codimension(p, &source).map_err(at)? - essential_codimension(q, &range).map_err(at)?;
            match value {
                None => value = Some(here),
                Some(first) if first != here => {
                    return Err(Error::NonConstantIndex { subinterval: i, first, other: here });
                }
                _ => {}
            }
        }
        let ti = value.unwrap_or(0);
        if ti != 0 && infos[i].has_infinite_end() {
            return Err(Error::InvalidLifting(format!("index {ti} on X_{i}, which has an infinite end")));
        }
        t.push(ti);
    }
    Ok(t)
}
