//! Deterministic projection families with known jump data.
//!
//! Every sample is `G(τ) D_f G(τ)ᵀ ⊕ tail`, where `D_f` is the indicator of
//! the first `f` window coordinates (the *front*) and `G(τ)` is a product of
//! Givens rotations in the disjoint planes `(f−1−m, f+m)`, `m = 0, 1, 2`, each
//! straddling the front. Rotations never change the rank, so the jump at `xᵢ`
//! is exactly `fᵢ − fᵢ₋₁`.

use std::f64::consts::PI;

use corona_core::{BaseSpace, JumpData, SpaceKind};
use nalgebra::DMatrix;

use crate::hilbert::{ProjectionMatrix, TailPattern, TOL_INPUT};
use crate::lifting::{default_grid, finite_span, jump_integers, LocalLifting, ProjectionPath};
use crate::{Error, Result};

pub const DEFAULT_DIM: usize = 64;
pub const DEFAULT_WINDOW: usize = 32;
pub const DEFAULT_SAMPLES: usize = 16;

const PLANES: usize = 3;

#[derive(Debug, Clone, PartialEq)]
pub enum Family {
    /// Front `fronts[i]` on `Xᵢ`, swept by a quarter turn times `sweep ∈ [0, 1]`
    /// across each subinterval.
    Front { fronts: Vec<usize>, sweep: f64 },
    /// Constant front `rank`, oscillating rotations of size `amplitude ∈ [0, 0.5]`.
    /// All jumps vanish.
    Rotation { rank: usize, amplitude: f64 },
    /// Circle only: front `base + winding` on `X₀` and `base` elsewhere, so the
    /// wrap jump is `winding` (compensated at `x₁`).
    Winding { winding: i64, base: usize },
    /// Fronts plus sweep plus seeded oscillations.
    Composite { fronts: Vec<usize>, amplitude: f64, seed: u64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct FamilySpec {
    pub family: Family,
    pub dim: usize,
    pub window: usize,
    /// Regular samples per subinterval (far samples come on top).
    pub samples: usize,
    pub tail: TailPattern,
}

impl FamilySpec {
    /// Default truncation (64 / 32), 16 samples, alternating tail.
    pub fn new(family: Family) -> Self {
        Self {
            family,
            dim: DEFAULT_DIM,
            window: DEFAULT_WINDOW,
            samples: DEFAULT_SAMPLES,
            tail: TailPattern::alternating(),
        }
    }
}

/// A catalog lifting with its ground-truth jump data.
#[derive(Debug, Clone, PartialEq)]
pub struct CatalogLifting {
    pub lifting: LocalLifting,
    pub declared: JumpData,
}

struct Profile {
    fronts: Vec<usize>,
    sweep: f64,
    amplitude: f64,
    seed: u64,
}

fn profile(family: &Family, space: &BaseSpace) -> Result<Profile> {
    let pieces = space.n() + 1;
    let check_len = |fronts: &Vec<usize>| {
        if fronts.len() == pieces {
            Ok(())
        } else {
            Err(Error::InvalidFamily(format!("{} fronts for {pieces} subintervals", fronts.len())))
        }
    };
    let check_amplitude = |a: f64| {
        if (0.0..=0.5).contains(&a) {
            Ok(())
        } else {
            Err(Error::InvalidFamily(format!("amplitude {a} outside [0, 0.5]")))
        }
    };
    Ok(match family {
        Family::Front { fronts, sweep } => {
            check_len(fronts)?;
            if !(0.0..=1.0).contains(sweep) {
                return Err(Error::InvalidFamily(format!("sweep {sweep} outside [0, 1]")));
            }
            Profile { fronts: fronts.clone(), sweep: *sweep, amplitude: 0.0, seed: 0 }
        }
        Family::Rotation { rank, amplitude } => {
            check_amplitude(*amplitude)?;
            Profile { fronts: vec![*rank; pieces], sweep: 0.0, amplitude: *amplitude, seed: 0 }
        }
        Family::Winding { winding, base } => {
            if space.kind() != SpaceKind::Circle {
                return Err(Error::InvalidFamily("winding family lives on the circle".into()));
            }
            if *winding != 0 && space.n() == 0 {
                return Err(Error::InvalidFamily("nonzero winding needs a partition point".into()));
            }
            let first = *base as i64 + winding;
            if first < 0 {
                return Err(Error::InvalidFamily(format!("front {first} on X_0 is negative")));
            }
            let mut fronts = vec![*base; pieces];
            fronts[0] = first as usize;
            Profile { fronts, sweep: 0.0, amplitude: 0.0, seed: 0 }
        }
        Family::Composite { fronts, amplitude, seed } => {
            check_len(fronts)?;
            check_amplitude(*amplitude)?;
            Profile { fronts: fronts.clone(), sweep: 0.5, amplitude: *amplitude, seed: *seed }
        }
    })
}

/// Phase in `[0, 1)` of plane `m` on `Xᵢ`.
fn phase(seed: u64, i: usize, m: usize) -> f64 {
    ((seed.wrapping_mul(7) + 3 * i as u64 + 5 * m as u64) % 11) as f64 / 11.0
}

fn window_sample(w: usize, front: usize, angles: &[f64; PLANES]) -> DMatrix<f64> {
    let mut p = DMatrix::from_fn(w, w, |r, c| if r == c && r < front { 1.0 } else { 0.0 });
    for (m, &th) in angles.iter().enumerate() {
        if front < m + 1 || front + m >= w || th == 0.0 {
            continue;
        }
        let (a, b) = (front - 1 - m, front + m);
        let mut g = DMatrix::<f64>::identity(w, w);
        let (c, s) = (th.cos(), th.sin());
        g[(a, a)] = c;
        g[(b, b)] = c;
        g[(b, a)] = s;
        g[(a, b)] = -s;
        p = &g * p * g.transpose();
    }
    p
}

/// Builds the family over `space` and checks the measured jumps against the
/// declared ones.
pub fn instantiate(spec: &FamilySpec, space: &BaseSpace) -> Result<CatalogLifting> {
    let prof = profile(&spec.family, space)?;
    let w = spec.window;
    if let Some(&f) = prof.fronts.iter().find(|&&f| f == 0 || f >= w) {
        return Err(Error::InvalidFamily(format!("front {f} outside [1, {}]", w.saturating_sub(1))));
    }
    if spec.samples < 2 {
        return Err(Error::InvalidFamily("need at least 2 samples per subinterval".into()));
    }
    let mut paths = Vec::with_capacity(prof.fronts.len());
    for (info, &front) in space.subintervals().iter().zip(&prof.fronts) {
        let (a, b) = finite_span(info);
        let grid = default_grid(info, spec.samples);
        let samples = grid
            .iter()
            .map(|&x| {
                let tau = ((x - a) / (b - a)).clamp(0.0, 1.0);
                let angles: [f64; PLANES] = std::array::from_fn(|m| {
                    let sweep = if m == 0 { prof.sweep * PI / 2.0 * tau } else { 0.0 };
                    let phi = phase(prof.seed, info.index, m);
                    sweep + prof.amplitude * (PI * (m as f64 + 1.0) * tau + 2.0 * PI * phi).sin()
                });
                let block = window_sample(w, front, &angles);
                ProjectionMatrix::from_constructed_block(&block, spec.dim, spec.tail.clone(), TOL_INPUT)
            })
            .collect::<Result<Vec<_>>>()?;
        paths.push(ProjectionPath::new(*info, grid, samples)?);
    }
    let lifting = LocalLifting::new(space.clone(), paths)?;
    let f = &prof.fronts;
    let declared: Vec<i64> = f.windows(2).map(|p| p[1] as i64 - p[0] as i64).collect();
    let declared_wrap = space.has_wrap().then(|| f[0] as i64 - f[f.len() - 1] as i64);
    let measured = jump_integers(&lifting)?;
    if measured != (declared.clone(), declared_wrap) {
        return Err(Error::InvalidFamily(format!(
            "measured jumps {measured:?} differ from declared {:?}",
            (declared, declared_wrap)
        )));
    }
    Ok(CatalogLifting { lifting, declared: JumpData::integers(&declared, declared_wrap)? })
}
