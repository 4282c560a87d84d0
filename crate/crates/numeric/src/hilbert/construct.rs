use nalgebra::DMatrix;

use super::linalg::{inverse_sqrt_spd, numerical_rank, op_norm, range_basis, svd};
use super::operator::{ProjectionMatrix, TailPattern, TruncatedOperator};
use super::{MAX_GAP, RANK_TOL, TOL_CONSTRUCTED};
use crate::{Error, Result};

/// Window-level transport: `U` with `U p Uᵀ = p2`, identity on the tail.
pub(crate) fn transport_block(p: &DMatrix<f64>, p2: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let w = p.nrows();
    let id = DMatrix::<f64>::identity(w, w);
    let d = p - p2;
    let gap = op_norm(&d);
    if gap > MAX_GAP {
        return Err(Error::SamplesTooCoarse(gap));
    }
    let a = p2 * p + (&id - p2) * (&id - p);
    let s = &id - &d * &d;
    let root = inverse_sqrt_spd(&s).ok_or_else(|| Error::Numerical("1 - (p - p2)^2 not positive".into()))?;
    let u = a * root;
    let unitarity = (&u * u.transpose() - &id).norm();
    let conjugation = (&u * p * u.transpose() - p2).norm();
    if unitarity > TOL_CONSTRUCTED || conjugation > TOL_CONSTRUCTED {
        return Err(Error::Numerical(format!(
            "transport residuals {unitarity:.3e} (unitarity), {conjugation:.3e} (conjugation)"
        )));
    }
    Ok(u)
}

/// The two-projection unitary `U = (p2 p + (1−p2)(1−p)) (1 − (p−p2)²)^{−1/2}`.
///
/// Requires `‖p − p2‖ ≤ 0.5`; then `U Uᵀ = 1` and `U p Uᵀ = p2` to `1e−8`.
pub fn transport_unitary(p: &ProjectionMatrix, p2: &ProjectionMatrix) -> Result<TruncatedOperator> {
    if p.dim() != p2.dim() || p.window() != p2.window() {
        return Err(Error::Shape("projections have different truncations".into()));
    }
    if p.tail() != p2.tail() {
        // Differing tails are at distance 1.
        return Err(Error::SamplesTooCoarse(1.0));
    }
    let u = transport_block(&p.window_block(), &p2.window_block())?;
    TruncatedOperator::from_window_block(&u, p.dim(), TailPattern::ones())
}

/// Window-level completion of `q a p` to a partial isometry `ran p → ran q`.
///
/// With orthonormal range bases `Bp`, `Bq` and `N = Bqᵀ a Bp = U Σ Vᵀ`, returns
/// `Bq U Vᵀ Bpᵀ`: the polar factor of `q a p` when `N` is invertible, and
/// otherwise that polar factor corrected by a finite-rank map from its kernel
/// onto its cokernel.
pub(crate) fn completion_block(
    a: &DMatrix<f64>,
    p: &DMatrix<f64>,
    q: &DMatrix<f64>,
    strict: bool,
) -> Result<DMatrix<f64>> {
    let bp = range_basis(p);
    let bq = range_basis(q);
    let (rp, rq) = (bp.ncols(), bq.ncols());
    if rp != rq {
        return Err(Error::IndexObstruction(format!("window ranks {rp} and {rq} differ")));
    }
    let w = p.nrows();
    if rp == 0 {
        return Ok(DMatrix::zeros(w, w));
    }
    let n = bq.transpose() * a * &bp;
    if strict {
        let r = numerical_rank(&n, RANK_TOL);
        if r < rp {
            return Err(Error::IndexObstruction(format!("q A p has rank {r} < {rp}")));
        }
    }
    let svd = svd(&n, true, true);
    let (u, v_t) = (svd.u.expect("requested U"), svd.v_t.expect("requested V"));
    let v = &bq * (u * v_t) * bp.transpose();
    let source = (v.transpose() * &v - p).norm();
    let range = (&v * v.transpose() - q).norm();
    if source > TOL_CONSTRUCTED || range > TOL_CONSTRUCTED {
        return Err(Error::Numerical(format!("partial isometry residuals {source:.3e}, {range:.3e}")));
    }
    Ok(v)
}

fn partial_isometry(a: &TruncatedOperator, p: &ProjectionMatrix, q: &ProjectionMatrix, strict: bool) -> Result<TruncatedOperator> {
    if a.dim() != p.dim() || p.dim() != q.dim() || a.window() != p.window() || p.window() != q.window() {
        return Err(Error::Shape("operator and projections have different truncations".into()));
    }
    if p.tail() != q.tail() {
        return Err(Error::IndexObstruction("p and q have different tails".into()));
    }
    match a.tail().pattern() {
        Some(t) if t.intersection(p.tail()) == *p.tail() => {}
        _ => return Err(Error::Shape("A must act as the identity on the tail of p".into())),
    }
    let v = completion_block(&a.window_block(), &p.window_block(), &q.window_block(), strict)?;
    TruncatedOperator::from_window_block(&v, p.dim(), p.tail().clone())
}

/// Polar factor `v` of `q A p`: `vᵀv = p`, `vvᵀ = q`, `v = q v p`.
///
/// Fails with an index obstruction when the window ranks of `p` and `q`
/// differ or `q A p` is rank-deficient on `ran p`.
pub fn polar_partial_isometry(a: &TruncatedOperator, p: &ProjectionMatrix, q: &ProjectionMatrix) -> Result<TruncatedOperator> {
    partial_isometry(a, p, q, true)
}

/// Like [`polar_partial_isometry`], but a rank-deficient `q A p` is completed
/// by a window-supported correction instead of rejected. Only equal window
/// ranks (index zero) are required.
pub fn index_zero_partial_isometry(a: &TruncatedOperator, p: &ProjectionMatrix, q: &ProjectionMatrix) -> Result<TruncatedOperator> {
    partial_isometry(a, p, q, false)
}
