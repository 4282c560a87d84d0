use corona_core::JumpData;
use nalgebra::DMatrix;

use super::{jump_integers, LocalLifting, ProjectionPath};
use crate::hilbert::linalg::range_basis;
use crate::hilbert::{transport_block, ProjectionMatrix, TailPattern, TruncatedOperator, TOL_CONSTRUCTED};
use crate::{Error, Result};

/// Window blocks `U(x_j)` with `U(x₀) = 1` and `U(x_j) p(x₀) U(x_j)ᵀ = p(x_j)`.
pub(crate) fn transports(path: &ProjectionPath) -> Result<Vec<DMatrix<f64>>> {
    let w = path.window();
    let mut out = Vec::with_capacity(path.samples().len());
    out.push(DMatrix::identity(w, w));
    for j in 1..path.samples().len() {
        let step = transport_block(&path.samples()[j - 1].window_block(), &path.samples()[j].window_block())
            .map_err(|e| Error::AtPoint { point: path.grid()[j], source: Box::new(e) })?;
        let next = step * &out[j - 1];
        out.push(next);
    }
    Ok(out)
}

/// Unitaries conjugating the first sample of the path onto every sample,
/// chained from neighbouring [`transport_unitary`](crate::hilbert::transport_unitary)s.
pub fn trivialize_path(path: &ProjectionPath) -> Result<Vec<TruncatedOperator>> {
    let p0 = path.first().window_block();
    transports(path)?
        .into_iter()
        .zip(path.samples())
        .zip(path.grid())
        .map(|((u, p), &x)| {
            let residual = (&u * &p0 * u.transpose() - p.window_block()).norm();
            if residual > 1e-6 {
                return Err(Error::AtPoint {
                    point: x,
                    source: Box::new(Error::Numerical(format!("trivialization residual {residual:.3e}"))),
                });
            }
            TruncatedOperator::from_window_block(&u, path.dim(), TailPattern::ones())
        })
        .collect()
}

/// A continuous rank-`m` subprojection `r ≤ p` supported in the window.
///
/// `m` orthonormal vectors of `ran p` at the first sample are carried along the
/// path by the trivializing unitaries. At least one dimension of `ran p` is
/// left over in the window.
pub fn extract_subprojection(path: &ProjectionPath, m: i64) -> Result<ProjectionPath> {
    if m < 0 {
        return Err(Error::NegativeRank(m));
    }
    let available = path.min_window_rank().saturating_sub(1);
    if m as usize > available {
        return Err(Error::RankTooLarge { requested: m, available });
    }
    let (dim, w) = (path.dim(), path.window());
    let m = m as usize;
    if m == 0 {
        let zero = ProjectionMatrix::from_window_block(&DMatrix::zeros(w, w), dim, TailPattern::zeros())?;
        return ProjectionPath::new(*path.info(), path.grid().to_vec(), vec![zero; path.grid().len()]);
    }
    let basis = range_basis(&path.first().window_block()).columns(0, m).into_owned();
    let r0 = &basis * basis.transpose();
    let mut samples = Vec::with_capacity(path.grid().len());
    for ((u, p), &x) in transports(path)?.iter().zip(path.samples()).zip(path.grid()) {
        let r = u * &r0 * u.transpose();
        let pw = p.window_block();
        let defect = (&pw * &r - &r).norm();
        if defect > TOL_CONSTRUCTED {
            return Err(Error::AtPoint {
                point: x,
                source: Box::new(Error::Numerical(format!("subprojection not under p: {defect:.3e}"))),
            });
        }
        samples.push(
            ProjectionMatrix::from_constructed_block(&r, dim, TailPattern::zeros(), TOL_CONSTRUCTED)
                .map_err(|e| Error::AtPoint { point: x, source: Box::new(e) })?,
        );
    }
    ProjectionPath::new(*path.info(), path.grid().to_vec(), samples)
}

/// `pᵢ − rᵢ` with `rᵢ` a rank-`ranks[i]` subprojection of `pᵢ`.
pub fn subtract_ranks(lifting: &LocalLifting, ranks: &[i64]) -> Result<LocalLifting> {
    if ranks.len() != lifting.paths().len() {
        return Err(Error::Shape(format!("{} ranks for {} subintervals", ranks.len(), lifting.paths().len())));
    }
    let mut paths = Vec::with_capacity(ranks.len());
    for (path, &m) in lifting.paths().iter().zip(ranks) {
        if m == 0 {
            paths.push(path.clone());
            continue;
        }
        let r = extract_subprojection(path, m)?;
        let samples = path
            .samples()
            .iter()
            .zip(r.samples())
            .map(|(p, r)| {
                ProjectionMatrix::from_constructed_block(
                    &(p.window_block() - r.window_block()),
                    p.dim(),
                    p.tail().clone(),
                    TOL_CONSTRUCTED,
                )
            })
            .collect::<Result<Vec<_>>>()?;
        paths.push(ProjectionPath::new(*path.info(), path.grid().to_vec(), samples)?);
    }
    LocalLifting::new(lifting.space().clone(), paths)
}

fn integers(j: &JumpData) -> Result<(Vec<i64>, Option<i64>)> {
    let as_int = |g: &corona_core::GroupElement| {
        g.as_integer().ok_or_else(|| Error::Shape(format!("target {g} is not an integer")))
    };
    let jumps = j.jumps().iter().map(as_int).collect::<Result<Vec<_>>>()?;
    let wrap = j.wrap().map(as_int).transpose()?;
    Ok((jumps, wrap))
}

/// Changes the lifting by finite-rank subprojections so that its jumps become
/// `targets`, keeping the corona class.
///
/// With `c₀ = 0` and `cᵢ = cᵢ₋₁ + kᵢ − targetᵢ`, a rank-`cᵢ` subprojection is
/// removed from `pᵢ`. Negative `cᵢ` cannot be realized on this side
/// ([`Error::NegativeRank`]); a nonzero `cᵢ` on a subinterval with an infinite
/// end would not vanish there.
pub fn normalize_jumps(lifting: &LocalLifting, targets: &JumpData) -> Result<LocalLifting> {
    let space = lifting.space();
    targets.fits(space)?;
    let (target, target_wrap) = integers(targets)?;
    let (k, k_wrap) = jump_integers(lifting)?;
    let mut c = vec![0i64; k.len() + 1];
    for i in 1..c.len() {
        c[i] = c[i - 1] + k[i - 1] - target[i - 1];
    }
    if let Some(&neg) = c.iter().find(|&&v| v < 0) {
        return Err(Error::NegativeRank(neg));
    }
    for (info, &ci) in space.subintervals().iter().zip(&c) {
        if ci != 0 && info.has_infinite_end() {
            return Err(Error::InvalidLifting(format!(
                "class change {ci} on X_{} would not vanish at its infinite end",
                info.index
            )));
        }
    }
    if let (Some(k0), Some(t0)) = (k_wrap, target_wrap) {
        // p₀ keeps c₀ = 0, so the wrap jump moves by c_n.
        if k0 + c[c.len() - 1] != t0 {
            return Err(Error::InvalidLifting(format!(
                "wrap jump {k0} cannot become {t0} without changing X_0"
            )));
        }
    }
    subtract_ranks(lifting, &c)
}

/// Removes `max(tᵢ, 0)` dimensions from `pᵢ` and `max(−tᵢ, 0)` from `qᵢ`, so
/// that the jumps of the results agree whenever `kᵢ − lᵢ = tᵢ − tᵢ₋₁`.
pub fn normalize_pair(lp: &LocalLifting, lq: &LocalLifting, t: &[i64]) -> Result<(LocalLifting, LocalLifting)> {
    let cp: Vec<i64> = t.iter().map(|&v| v.max(0)).collect();
    let cq: Vec<i64> = t.iter().map(|&v| (-v).max(0)).collect();
    Ok((subtract_ranks(lp, &cp)?, subtract_ranks(lq, &cq)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lifting::{default_grid, same_corona_class};
    use corona_core::{BaseSpace, SpaceKind};

    fn rotating_path(info: corona_core::SubintervalInfo, f: usize, w: usize, dim: usize) -> ProjectionPath {
        let grid = default_grid(&info, 8);
        let (a, b) = crate::lifting::finite_span(&info);
        let samples = grid
            .iter()
            .map(|&x| {
                let th = 0.8 * ((x - a) / (b - a)).clamp(0.0, 1.0);
                let mut g = DMatrix::<f64>::identity(w, w);
                let (i, j) = (f - 1, f);
                g[(i, i)] = th.cos();
                g[(j, j)] = th.cos();
                g[(j, i)] = th.sin();
                g[(i, j)] = -th.sin();
                let d = DMatrix::from_fn(w, w, |r, c| if r == c && r < f { 1.0 } else { 0.0 });
                ProjectionMatrix::from_constructed_block(&(&g * d * g.transpose()), dim, TailPattern::alternating(), 1e-10)
                    .unwrap()
            })
            .collect();
        ProjectionPath::new(info, grid, samples).unwrap()
    }

    #[test]
    fn constant_path_trivializes_to_identity() {
        let s = BaseSpace::new(SpaceKind::Interval, vec![]).unwrap();
        let info = s.subintervals()[0];
        let grid = default_grid(&info, 4);
        let p = rotating_path(info, 3, 8, 16).first().clone();
        let path = ProjectionPath::new(info, grid, vec![p; 4]).unwrap();
        for u in trivialize_path(&path).unwrap() {
            assert!((u.entries() - DMatrix::identity(16, 16)).norm() < 1e-14);
        }
    }

    #[test]
    fn rotation_path_is_conjugated() {
        let s = BaseSpace::new(SpaceKind::Interval, vec![]).unwrap();
        let path = rotating_path(s.subintervals()[0], 4, 8, 16);
        let us = trivialize_path(&path).unwrap();
        let p0 = path.first().matrix();
        for (u, p) in us.iter().zip(path.samples()) {
            let u = u.entries();
            assert!((u * p0 * u.transpose() - p.matrix()).norm() < 1e-6);
        }
    }

    #[test]
    fn subprojections() {
        let s = BaseSpace::new(SpaceKind::Interval, vec![]).unwrap();
        let path = rotating_path(s.subintervals()[0], 4, 8, 16);
        let zero = extract_subprojection(&path, 0).unwrap();
        assert!(zero.samples().iter().all(|r| r.matrix().iter().all(|&v| v == 0.0)));
        let r = extract_subprojection(&path, 3).unwrap();
        for (r, p) in r.samples().iter().zip(path.samples()) {
            assert_eq!(r.window_rank(), 3);
            assert!((p.matrix() * r.matrix() - r.matrix()).norm() < 1e-8);
        }
        assert!(matches!(extract_subprojection(&path, 4), Err(Error::RankTooLarge { requested: 4, available: 3 })));
        assert!(matches!(extract_subprojection(&path, -1), Err(Error::NegativeRank(-1))));
    }

    #[test]
    fn normalization_hits_targets_and_keeps_class() {
        let s = BaseSpace::new(SpaceKind::Interval, vec![0.5]).unwrap();
        let infos = s.subintervals();
        let l = LocalLifting::new(s.clone(), vec![rotating_path(infos[0], 2, 8, 16), rotating_path(infos[1], 5, 8, 16)])
            .unwrap();
        assert_eq!(jump_integers(&l).unwrap().0, vec![3]);
        let same = normalize_jumps(&l, &JumpData::integers(&[3], None).unwrap()).unwrap();
        assert_eq!(same, l);
        let flat = normalize_jumps(&l, &JumpData::integers(&[0], None).unwrap()).unwrap();
        assert_eq!(jump_integers(&flat).unwrap().0, vec![0]);
        assert!(same_corona_class(&l.to_section(), &flat.to_section()).unwrap());
        assert!(matches!(
            normalize_jumps(&l, &JumpData::integers(&[4], None).unwrap()),
            Err(Error::NegativeRank(-1))
        ));
    }
}
