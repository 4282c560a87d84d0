use nalgebra::DMatrix;

use super::linalg::{null_space, numerical_rank, range_basis};
use super::operator::{ProjectionMatrix, TruncatedOperator};
use super::{RANK_TOL, STABILIZATION_STEP};
use crate::{Error, Result};

/// `true` iff every entry with row or column `≥ window` is exactly zero.
pub fn is_window_supported(m: &DMatrix<f64>, window: usize) -> bool {
    let n = m.nrows();
    (0..m.ncols()).all(|c| (0..n).all(|r| (r < window && c < window) || m[(r, c)] == 0.0))
}

/// `dim ker − dim coker` of `F: ran(domain) → ran(codomain)`.
///
/// Kernel and cokernel vectors reaching into the last [`STABILIZATION_STEP`]
/// coordinates are truncation artifacts (the shift loses `e_{N−1}`) and are
/// not counted. The index is computed at `N` and at `N + 8`; the two must
/// agree.
pub fn fredholm_index(f: &TruncatedOperator, domain: &ProjectionMatrix, codomain: &ProjectionMatrix) -> Result<i64> {
    let small = index_at(f, domain, codomain)?;
    let large = index_at(
        &f.extended(STABILIZATION_STEP),
        &domain.extended(STABILIZATION_STEP),
        &codomain.extended(STABILIZATION_STEP),
    )?;
    if small != large {
        return Err(Error::TruncationTooSmall { small, large });
    }
    Ok(small)
}

fn index_at(f: &TruncatedOperator, domain: &ProjectionMatrix, codomain: &ProjectionMatrix) -> Result<i64> {
    let n = f.dim();
    if domain.dim() != n || codomain.dim() != n {
        return Err(Error::Shape("operator and projections have different truncations".into()));
    }
    let bd = range_basis(domain.matrix());
    let bc = range_basis(codomain.matrix());
    let image = f.entries() * &bd;
    let leak = (&image - codomain.matrix() * &image).norm();
    if leak > RANK_TOL * image.norm().max(1.0) {
        return Err(Error::LeavesCodomain(leak));
    }
    let m = bc.transpose() * &image;
    let kernel = &bd * null_space(&m, RANK_TOL);
    let cokernel = &bc * null_space(&m.transpose(), RANK_TOL);
    Ok(genuine_dimension(&kernel) as i64 - genuine_dimension(&cokernel) as i64)
}

/// Dimension of the part of `span(vectors)` vanishing on the edge band.
fn genuine_dimension(vectors: &DMatrix<f64>) -> usize {
    let n = vectors.nrows();
    let k = vectors.ncols();
    if k == 0 {
        return 0;
    }
    let band = vectors.rows(n - STABILIZATION_STEP, STABILIZATION_STEP).into_owned();
    k - numerical_rank(&band, RANK_TOL)
}

/// `trace(p − q)` rounded, after checking `p − q` is window-supported and the
/// trace is within `1e−6` of an integer.
pub fn codimension_by_trace(p: &ProjectionMatrix, q: &ProjectionMatrix) -> Result<i64> {
    if p.dim() != q.dim() || p.window() != q.window() {
        return Err(Error::Shape("projections have different truncations".into()));
    }
    let diff = p.matrix() - q.matrix();
    if !is_window_supported(&diff, p.window()) {
        return Err(Error::NotWindowSupported("p - q".into()));
    }
    let trace = diff.trace();
    let rounded = trace.round();
    if (trace - rounded).abs() > 1e-6 {
        return Err(Error::NonIntegerTrace(trace));
    }
    Ok(rounded as i64)
}

/// `[p : q]` for `p − q` supported in the window: the trace of `p − q`,
/// confirmed by the Fredholm index of `qp: ran p → ran q`.
pub fn essential_codimension(p: &ProjectionMatrix, q: &ProjectionMatrix) -> Result<i64> {
    let trace = codimension_by_trace(p, q)?;
    let qp = q.op().compose(p.op())?;
    let index = fredholm_index(&qp, p, q)?;
    if index != trace {
        return Err(Error::MethodDisagreement { trace, index });
    }
    Ok(trace)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hilbert::TailPattern;

    fn diag_projection(window: usize, dim: usize, ones: &[usize], tail: TailPattern) -> ProjectionMatrix {
        let mut b = DMatrix::zeros(window, window);
        for &i in ones {
            b[(i, i)] = 1.0;
        }
        ProjectionMatrix::from_window_block(&b, dim, tail).unwrap()
    }

    #[test]
    fn identity_has_index_zero() {
        let id = TruncatedOperator::identity(24, 8).unwrap();
        let one = ProjectionMatrix::new(id.clone()).unwrap();
        assert_eq!(fredholm_index(&id, &one, &one).unwrap(), 0);
    }

    #[test]
    fn unilateral_shift_has_index_minus_one() {
        // ker S = 0 and coker S = span(e_0); e_{N-1} is lost to truncation.
        let s = TruncatedOperator::shift(24, 8, 1).unwrap();
        let one = ProjectionMatrix::new(TruncatedOperator::identity(24, 8).unwrap()).unwrap();
        assert_eq!(fredholm_index(&s, &one, &one).unwrap(), -1);
        assert_eq!(fredholm_index(&s.transpose(), &one, &one).unwrap(), 1);
        let s2 = TruncatedOperator::shift(24, 8, 2).unwrap();
        assert_eq!(fredholm_index(&s2, &one, &one).unwrap(), -2);
    }

    #[test]
    fn dropping_the_first_vector() {
        // p = 1{0,1,...}, q = 1{1,2,...}: counting |S \ T| - |T \ S| = 1.
        let all: Vec<usize> = (0..8).collect();
        let p = diag_projection(8, 24, &all, TailPattern::ones());
        let q = diag_projection(8, 24, &all[1..], TailPattern::ones());
        assert_eq!(essential_codimension(&p, &q).unwrap(), 1);
        assert_eq!(essential_codimension(&q, &p).unwrap(), -1);
        assert_eq!(essential_codimension(&p, &p).unwrap(), 0);
    }

    #[test]
    fn nested_rank_three() {
        let p = diag_projection(8, 24, &[0, 1, 2, 3, 4], TailPattern::alternating());
        let q = diag_projection(8, 24, &[1, 3], TailPattern::alternating());
        assert_eq!(essential_codimension(&p, &q).unwrap(), 3);
    }

    #[test]
    fn tail_mismatch_is_rejected() {
        let p = diag_projection(8, 24, &[0], TailPattern::ones());
        let q = diag_projection(8, 24, &[0], TailPattern::alternating());
        assert!(matches!(essential_codimension(&p, &q), Err(Error::NotWindowSupported(_))));
    }

    #[test]
    fn operator_must_land_in_codomain() {
        let p = diag_projection(8, 24, &[0], TailPattern::ones());
        let q = diag_projection(8, 24, &[1], TailPattern::ones());
        let id = TruncatedOperator::identity(24, 8).unwrap();
        assert!(matches!(fredholm_index(&id, &p, &q), Err(Error::LeavesCodomain(_))));
    }

    #[test]
    fn window_support_check() {
        let mut m = DMatrix::zeros(12, 12);
        m[(3, 3)] = 2.0;
        assert!(is_window_supported(&m, 4));
        m[(3, 4)] = 1e-300;
        assert!(!is_window_supported(&m, 4));
    }
}
