use super::{build_mvn_witness, index_data, normalize_pair, LocalLifting, PartialIsometryPath};
use crate::{Error, Result};

/// Output of [`realize_mvn_witness`].
#[derive(Debug, Clone, PartialEq)]
pub struct Deformation {
    /// The realized index sequence `t₀..tₙ`.
    pub t: Vec<i64>,
    /// Constant added to the requested sequence to match the truncation.
    pub shift: i64,
    pub normalized_p: LocalLifting,
    pub normalized_q: LocalLifting,
    pub witness: PartialIsometryPath,
    /// [`index_data`] of the witness against the original liftings.
    pub index: Vec<i64>,
}

/// Realizes an MvN witness sequence `t` (from the classifier) as an explicit
/// partial-isometry path between `lp` and `lq`.
///
/// At finite truncation a partial isometry between `pᵢ − rᵢ` and `qᵢ − rᵢ'`
/// needs equal window ranks, which pins `tᵢ = rank pᵢ − rank qᵢ`. When no
/// entry of `t` is forced to zero the sequence is shifted by a constant to
/// meet this (any constant shift is again a witness); otherwise a mismatch is
/// an obstruction of the truncation.
pub fn realize_mvn_witness(lp: &LocalLifting, lq: &LocalLifting, t: &[i64]) -> Result<Deformation> {
    if lp.space() != lq.space() {
        return Err(Error::GridMismatch("liftings over different base spaces".into()));
    }
    let space = lp.space();
    if t.len() != space.n() + 1 {
        return Err(Error::Shape(format!("witness has {} entries, need {}", t.len(), space.n() + 1)));
    }
    let natural: Vec<i64> = lp
        .paths()
        .iter()
        .zip(lq.paths())
        .map(|(a, b)| a.first().window_rank() as i64 - b.first().window_rank() as i64)
        .collect();
    let shift = natural[0] - t[0];
    if shift != 0 && !space.forced_zero_indices().is_empty() {
        return Err(Error::IndexObstruction(format!(
            "window ranks on X_0 differ by {} but the witness needs t_0 = {}",
            natural[0], t[0]
        )));
    }
    let realized: Vec<i64> = t.iter().map(|v| v + shift).collect();
    if let Some(i) = (0..realized.len()).find(|&i| realized[i] != natural[i]) {
        return Err(Error::IndexObstruction(format!(
            "on X_{i} the window ranks differ by {} but the witness needs {}",
            natural[i], realized[i]
        )));
    }
    let (normalized_p, normalized_q) = normalize_pair(lp, lq, &realized)?;
    let witness = build_mvn_witness(&normalized_p, &normalized_q)?;
    let index = index_data(&witness, lp, lq)?;
    if index != realized {
        return Err(Error::Numerical(format!("measured index {index:?} differs from {realized:?}")));
    }
    Ok(Deformation { t: realized, shift, normalized_p, normalized_q, witness, index })
}
