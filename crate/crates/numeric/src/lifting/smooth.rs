use nalgebra::DMatrix;

use super::{finite_span, Section};
use crate::hilbert::is_window_supported;
use crate::{Error, Result};

/// A continuous representative of the same corona class.
///
/// With jumps `Jᵢ = fᵢ(xᵢ) − fᵢ₋₁(xᵢ)` and hats `mᵢ` (zero at `xᵢ₋₁` and
/// `xᵢ₊₁`, equal to `Jᵢ` at `xᵢ`, linear in between), the output on `Xᵢ` is
/// `fᵢ − mᵢ/2 + mᵢ₊₁/2`, with `m₀ = mₙ₊₁ = 0`. Outer nodes are `0` and `1` for
/// compact spaces and `x₁ − 1`, `xₙ + 1` at infinite ends; far samples are
/// therefore untouched. The circle's wrap jump is left in place.
pub fn smooth_representative(f: &Section) -> Result<Section> {
    let n = f.space.n();
    if f.segments.len() != n + 1 {
        return Err(Error::GridMismatch(format!("{} segments for {} subintervals", f.segments.len(), n + 1)));
    }
    let partition = f.space.partition();
    let mut jumps: Vec<DMatrix<f64>> = Vec::with_capacity(n);
    for i in 1..=n {
        let after = &f.segments[i];
        let before = &f.segments[i - 1];
        if after.grid.first() != Some(&partition[i - 1]) || before.grid.last() != Some(&partition[i - 1]) {
            return Err(Error::GridMismatch(format!("x_{i} must be sampled on both sides")));
        }
        let j = &after.samples[0] - &before.samples[before.samples.len() - 1];
        if !is_window_supported(&j, f.window) {
            return Err(Error::AtPoint {
                point: partition[i - 1],
                source: Box::new(Error::NotWindowSupported("jump".into())),
            });
        }
        jumps.push(j);
    }
    let mut out = f.clone();
    for (i, (info, seg)) in f.space.subintervals().iter().zip(out.segments.iter_mut()).enumerate() {
        let (a, b) = finite_span(info);
        for (x, sample) in seg.grid.iter().zip(seg.samples.iter_mut()) {
            let rise = ((x - a) / (b - a)).clamp(0.0, 1.0);
            // mᵢ descends across Xᵢ, mᵢ₊₁ rises.
            if i >= 1 {
                *sample -= &jumps[i - 1] * (0.5 * (1.0 - rise));
            }
            if i < n {
                *sample += &jumps[i] * (0.5 * rise);
            }
        }
    }
    Ok(out)
}
