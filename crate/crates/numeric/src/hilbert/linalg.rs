//! Dense kernels shared by the index and construction code.

use nalgebra::{DMatrix, DVector, Dyn, SVD};

type Svd = SVD<f64, Dyn, Dyn>;

fn bounded(a: &DMatrix<f64>, want_u: bool, want_v: bool) -> Option<Svd> {
    let budget = 100 * a.nrows().max(a.ncols()).max(1);
    let finite = |m: &Option<DMatrix<f64>>| m.as_ref().is_none_or(|m| m.iter().all(|x| x.is_finite()));
    [f64::EPSILON, 1e-14, 1e-12]
        .into_iter()
        .filter_map(|eps| SVD::try_new(a.clone(), want_u, want_v, eps, budget))
        .find(|s| s.singular_values.iter().all(|x| x.is_finite()) && finite(&s.u) && finite(&s.v_t))
}

/// Householder reflection `I − 2wwᵀ` with a fixed irregular `w`.
fn reflector(n: usize) -> DMatrix<f64> {
    let w = DVector::from_fn(n, |i, _| (1.0 + i as f64).sin() + 0.5).normalize();
    DMatrix::identity(n, n) - &w * w.transpose() * 2.0
}

/// SVD with a bounded iteration count.
///
/// The implicit-shift iteration can stall (or break down into NaNs) on
/// sparse, exactly degenerate inputs such as partial isometries with many
/// equal singular values. A stall is retried on `c·a` for a few irregular
/// scales, then on `aᵀ`, then on `H a` for a dense reflection `H`; each gives
/// the same decomposition after undoing the transformation.
pub(crate) fn svd(a: &DMatrix<f64>, want_u: bool, want_v: bool) -> Svd {
    if let Some(s) = bounded(a, want_u, want_v) {
        return s;
    }
    for c in [3.0, 0.37, 7.1] {
        if let Some(s) = bounded(&(a * c), want_u, want_v) {
            return SVD { singular_values: s.singular_values / c, ..s };
        }
    }
    if let Some(s) = bounded(&a.transpose(), want_v, want_u) {
        return SVD { u: s.v_t.map(|v| v.transpose()), v_t: s.u.map(|u| u.transpose()), singular_values: s.singular_values };
    }
    let h = reflector(a.nrows());
    let s = bounded(&(&h * a), want_u, want_v)
        .unwrap_or_else(|| panic!("SVD did not converge on a {}x{} matrix", a.nrows(), a.ncols()));
    SVD { u: s.u.map(|u| &h * u), ..s }
}

pub fn singular_values(a: &DMatrix<f64>) -> Vec<f64> {
    if a.is_empty() {
        return Vec::new();
    }
    svd(a, false, false).singular_values.iter().copied().collect()
}

/// Number of singular values above `tol · max(1, σ_max)`.
pub fn numerical_rank(a: &DMatrix<f64>, tol: f64) -> usize {
    let sv = singular_values(a);
    let threshold = tol * sv.iter().copied().fold(1.0, f64::max);
    sv.iter().filter(|&&s| s > threshold).count()
}

/// Operator (spectral) norm.
pub fn op_norm(a: &DMatrix<f64>) -> f64 {
    singular_values(a).into_iter().fold(0.0, f64::max)
}

/// Orthonormal basis (as columns) of the null space of `a`, using the same
/// rank threshold as [`numerical_rank`].
pub fn null_space(a: &DMatrix<f64>, tol: f64) -> DMatrix<f64> {
    let cols = a.ncols();
    if cols == 0 {
        return DMatrix::zeros(0, 0);
    }
    if a.nrows() == 0 {
        return DMatrix::identity(cols, cols);
    }
    // Pad to at least square so the SVD returns a full right basis.
    let padded = if a.nrows() < cols {
        let mut m = DMatrix::zeros(cols, cols);
        m.view_mut((0, 0), (a.nrows(), cols)).copy_from(a);
        m
    } else {
        a.clone()
    };
    let svd = svd(&padded, false, true);
    let v_t = svd.v_t.expect("requested V");
    let sv = &svd.singular_values;
    let threshold = tol * sv.iter().copied().fold(1.0, f64::max);
    let picked: Vec<_> = (0..sv.len()).filter(|&i| sv[i] <= threshold).collect();
    DMatrix::from_fn(cols, picked.len(), |r, c| v_t[(picked[c], r)])
}

/// Orthonormal basis of the range of a (numerically) symmetric projection:
/// eigenvectors with eigenvalue above `1/2`, ordered by decreasing eigenvalue.
pub fn range_basis(p: &DMatrix<f64>) -> DMatrix<f64> {
    let n = p.nrows();
    if n == 0 {
        return DMatrix::zeros(0, 0);
    }
    let sym = (p + p.transpose()) * 0.5;
    let eig = sym.symmetric_eigen();
    let mut picked: Vec<usize> = (0..n).filter(|&i| eig.eigenvalues[i] > 0.5).collect();
    picked.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]).then(a.cmp(&b)));
    DMatrix::from_fn(n, picked.len(), |r, c| eig.eigenvectors[(r, picked[c])])
}

/// `s^{-1/2}` for a symmetric positive definite `s`.
pub fn inverse_sqrt_spd(s: &DMatrix<f64>) -> Option<DMatrix<f64>> {
    let sym = (s + s.transpose()) * 0.5;
    let eig = sym.symmetric_eigen();
    if eig.eigenvalues.iter().any(|&l| l <= 0.0) {
        return None;
    }
    let d = DMatrix::from_diagonal(&eig.eigenvalues.map(|l| 1.0 / l.sqrt()));
    Some(&eig.eigenvectors * d * eig.eigenvectors.transpose())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ranks() {
        assert_eq!(numerical_rank(&DMatrix::zeros(4, 4), 1e-8), 0);
        assert_eq!(numerical_rank(&DMatrix::identity(5, 5), 1e-8), 5);
        let d = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![1.0, 1e-14]));
        assert_eq!(numerical_rank(&d, 1e-8), 1);
        assert_eq!(numerical_rank(&DMatrix::zeros(0, 3), 1e-8), 0);
    }

    #[test]
    fn rank_threshold_is_relative_above_one() {
        let d = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![1e6, 1e-3]));
        assert_eq!(numerical_rank(&d, 1e-8), 1);
        let d = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![1e-3, 1e-9]));
        assert_eq!(numerical_rank(&d, 1e-8), 1);
    }

    #[test]
    fn null_space_of_wide_matrix() {
        let a = DMatrix::from_row_slice(1, 3, &[1.0, 1.0, 0.0]);
        let k = null_space(&a, 1e-8);
        assert_eq!(k.ncols(), 2);
        assert!((&a * &k).norm() < 1e-12);
        assert!((k.transpose() * &k - DMatrix::identity(2, 2)).norm() < 1e-12);
    }

    #[test]
    fn range_of_projection() {
        let v = nalgebra::DVector::from_vec(vec![0.6, 0.8, 0.0]);
        let p = &v * v.transpose();
        let b = range_basis(&p);
        assert_eq!(b.ncols(), 1);
        assert!((&b * b.transpose() - &p).norm() < 1e-12);
    }

    #[test]
    fn inverse_square_root() {
        let s = DMatrix::from_row_slice(2, 2, &[4.0, 0.0, 0.0, 9.0]);
        let r = inverse_sqrt_spd(&s).unwrap();
        assert!((r - DMatrix::from_row_slice(2, 2, &[0.5, 0.0, 0.0, 1.0 / 3.0])).norm() < 1e-14);
        assert!(inverse_sqrt_spd(&DMatrix::zeros(2, 2)).is_none());
    }

    #[test]
    fn svd_survives_a_stalling_partial_isometry() {
        let text = include_str!("../../tests/data/svd_stall.txt");
        let rows: Vec<Vec<f64>> =
            text.lines().map(|l| l.split_whitespace().map(|x| x.parse().unwrap()).collect()).collect();
        let a = DMatrix::from_fn(rows.len(), rows[0].len(), |r, c| rows[r][c]);
        let s = svd(&a, true, true);
        let (u, v_t) = (s.u.clone().unwrap(), s.v_t.clone().unwrap());
        let rebuilt = &u * DMatrix::from_diagonal(&s.singular_values) * &v_t;
        let e = (rebuilt - &a).norm();
        assert!(e < 1e-10, "reconstruction error {e}");
        assert_eq!(numerical_rank(&a, 1e-8), 20);
        let ns = null_space(&a, 1e-8);
        assert_eq!(ns.ncols(), 5);
        assert!((&a * ns).norm() < 1e-10);
    }
}
