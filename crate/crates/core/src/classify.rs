//! Decision procedures for Murray–von Neumann, unitary and homotopy
//! equivalence of two homogeneous projections given by their jump data.
//!
//! With `δᵢ = kᵢ − lᵢ`, the projections are
//!
//! * MvN equivalent iff some `t` has `tᵢ − tᵢ₋₁ = δᵢ` and `tᵢ = 0` on
//!   subintervals with an infinite end;
//! * unitarily equivalent (halving fibres) iff additionally some `s` has
//!   `sᵢ + tᵢ = sᵢ₋₁ + tᵢ₋₁` with the same forced zeros;
//! * homotopic (good index theory) iff that constant is `0`.
//!
//! Every `Equivalent` certificate carries witnesses that
//! [`verify_certificate`] rechecks exactly.

use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

use crate::kgroup::{solve_telescoping, GroupElement, GroupSpec, Telescoping};
use crate::space::BaseSpace;
use crate::{Error, Result};

/// Jump classes `k₁, …, kₙ` of a local lifting, plus the wrap jump `k₀` on the
/// circle.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct JumpData {
    spec: GroupSpec,
    jumps: Vec<GroupElement>,
    wrap: Option<GroupElement>,
}

impl JumpData {
    pub fn new(spec: GroupSpec, jumps: Vec<GroupElement>, wrap: Option<GroupElement>) -> Result<Self> {
        if jumps.iter().chain(&wrap).any(|k| k.spec() != &spec) {
            return Err(Error::SpecMismatch);
        }
        Ok(Self { spec, jumps, wrap })
    }

    /// Integer jump data over `ℤ`.
    pub fn integers(jumps: &[i64], wrap: Option<i64>) -> Result<Self> {
        let spec = GroupSpec::integers();
        let jumps = jumps.iter().map(|&k| spec.from_integer(k)).collect::<Result<Vec<_>>>()?;
        let wrap = wrap.map(|w| spec.from_integer(w)).transpose()?;
        Self::new(spec, jumps, wrap)
    }

    /// All-zero jump data shaped for `space`.
    pub fn zeros(spec: &GroupSpec, space: &BaseSpace) -> Self {
        Self {
            spec: spec.clone(),
            jumps: (0..space.n()).map(|_| spec.zero()).collect(),
            wrap: space.has_wrap().then(|| spec.zero()),
        }
    }

    pub fn spec(&self) -> &GroupSpec {
        &self.spec
    }

    /// `kᵢ` at `jumps()[i - 1]`.
    pub fn jumps(&self) -> &[GroupElement] {
        &self.jumps
    }

    pub fn wrap(&self) -> Option<&GroupElement> {
        self.wrap.as_ref()
    }

    pub fn fits(&self, space: &BaseSpace) -> Result<()> {
        if self.jumps.len() != space.n() {
            return Err(Error::JumpShape("one jump per partition point"));
        }
        if self.wrap.is_some() != space.has_wrap() {
            return Err(Error::JumpShape("wrap jump present exactly on the circle"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Relation {
    Mvn,
    Unitary,
    Homotopy,
}

impl Relation {
    pub const ALL: [Relation; 3] = [Relation::Mvn, Relation::Unitary, Relation::Homotopy];

    pub fn name(self) -> &'static str {
        match self {
            Self::Mvn => "mvn",
            Self::Unitary => "unitary",
            Self::Homotopy => "homotopy",
        }
    }
}

impl fmt::Display for Relation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Verdict {
    Equivalent,
    NotEquivalent,
    /// A hypothesis the criterion needs is not available.
    Undetermined,
}

impl Verdict {
    pub fn name(self) -> &'static str {
        match self {
            Self::Equivalent => "equivalent",
            Self::NotEquivalent => "not-equivalent",
            Self::Undetermined => "undetermined",
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// How the wrap jump on the circle enters the MvN system.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum CircleMode {
    /// Include `t₀ − tₙ = k₀ − l₀`, so the cyclic sum of `kᵢ − lᵢ` must vanish.
    #[default]
    StrictCyclic,
    /// Ignore the wrap equation: no endpoint restrictions, always solvable.
    PaperRemark,
}

impl CircleMode {
    pub fn name(self) -> &'static str {
        match self {
            Self::StrictCyclic => "strict",
            Self::PaperRemark => "paper",
        }
    }
}

/// Hypotheses on `B` (and `C(X) ⊗ B`) that gate the deciders.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct AlgebraCapabilities {
    pub good_index_theory: bool,
    /// Fibres full and properly infinite.
    pub homogeneity_assumed: bool,
    /// Fibres are halving projections.
    pub halving_assumed: bool,
}

impl AlgebraCapabilities {
    /// `B = K`: `C(X) ⊗ K` has stable rank one, hence good index theory.
    pub fn compact_operators() -> Self {
        Self { good_index_theory: true, homogeneity_assumed: true, halving_assumed: true }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EquivalenceCertificate {
    pub relation: Relation,
    pub verdict: Verdict,
    pub circle_mode: CircleMode,
    pub witness_t: Option<Vec<GroupElement>>,
    pub witness_s: Option<Vec<GroupElement>>,
    pub refutation: Option<String>,
}

fn check_inputs(jp: &JumpData, jq: &JumpData, space: &BaseSpace) -> Result<()> {
    if jp.spec != jq.spec {
        return Err(Error::SpecMismatch);
    }
    jp.fits(space)?;
    jq.fits(space)
}

fn solve_t(jp: &JumpData, jq: &JumpData, space: &BaseSpace, mode: CircleMode) -> Result<Telescoping> {
    check_inputs(jp, jq, space)?;
    let deltas = jp
        .jumps
        .iter()
        .zip(&jq.jumps)
        .map(|(k, l)| k.sub(l))
        .collect::<Result<Vec<_>>>()?;
    let wrap = match (&jp.wrap, &jq.wrap, mode) {
        (Some(k0), Some(l0), CircleMode::StrictCyclic) => Some(k0.sub(l0)?),
        _ => None,
    };
    solve_telescoping(&jp.spec, &deltas, &space.forced_zero_indices(), wrap.as_ref())
}

fn refuted(relation: Relation, mode: CircleMode, why: &impl fmt::Display) -> EquivalenceCertificate {
    EquivalenceCertificate {
        relation,
        verdict: Verdict::NotEquivalent,
        circle_mode: mode,
        witness_t: None,
        witness_s: None,
        refutation: Some(alloc::format!("with delta_i = k_i - l_i: {why}")),
    }
}

pub fn decide_mvn(
    jp: &JumpData,
    jq: &JumpData,
    space: &BaseSpace,
    mode: CircleMode,
) -> Result<EquivalenceCertificate> {
    Ok(match solve_t(jp, jq, space, mode)? {
        Telescoping::Witness(t) => EquivalenceCertificate {
            relation: Relation::Mvn,
            verdict: Verdict::Equivalent,
            circle_mode: mode,
            witness_t: Some(t),
            witness_s: None,
            refutation: None,
        },
        Telescoping::Refuted(r) => refuted(Relation::Mvn, mode, &r),
    })
}

/// `t` from the MvN system and `s = c − t` with `c = 0`. Forced zeros of `s`
/// then follow from those of `t`, and `sᵢ − sᵢ₋₁ = lᵢ − kᵢ` holds by
/// construction.
fn with_complement(relation: Relation, t: Vec<GroupElement>, mode: CircleMode) -> EquivalenceCertificate {
    let s = t.iter().map(GroupElement::neg).collect();
    EquivalenceCertificate {
        relation,
        verdict: Verdict::Equivalent,
        circle_mode: mode,
        witness_t: Some(t),
        witness_s: Some(s),
        refutation: None,
    }
}

pub fn decide_unitary(
    jp: &JumpData,
    jq: &JumpData,
    space: &BaseSpace,
    caps: AlgebraCapabilities,
    mode: CircleMode,
) -> Result<EquivalenceCertificate> {
    if !caps.halving_assumed {
        return Err(Error::HypothesisNotMet("unitary classification needs halving fibres"));
    }
    Ok(match solve_t(jp, jq, space, mode)? {
        Telescoping::Witness(t) => with_complement(Relation::Unitary, t, mode),
        Telescoping::Refuted(r) => refuted(Relation::Unitary, mode, &r),
    })
}

pub fn decide_homotopy(
    jp: &JumpData,
    jq: &JumpData,
    space: &BaseSpace,
    caps: AlgebraCapabilities,
    mode: CircleMode,
) -> Result<EquivalenceCertificate> {
    check_inputs(jp, jq, space)?;
    if !caps.good_index_theory {
        return Ok(EquivalenceCertificate {
            relation: Relation::Homotopy,
            verdict: Verdict::Undetermined,
            circle_mode: mode,
            witness_t: None,
            witness_s: None,
            refutation: None,
        });
    }
    Ok(match solve_t(jp, jq, space, mode)? {
        Telescoping::Witness(t) => with_complement(Relation::Homotopy, t, mode),
        Telescoping::Refuted(r) => refuted(Relation::Homotopy, mode, &r),
    })
}

pub fn decide(
    relation: Relation,
    jp: &JumpData,
    jq: &JumpData,
    space: &BaseSpace,
    caps: AlgebraCapabilities,
    mode: CircleMode,
) -> Result<EquivalenceCertificate> {
    match relation {
        Relation::Mvn => decide_mvn(jp, jq, space, mode),
        Relation::Unitary => decide_unitary(jp, jq, space, caps, mode),
        Relation::Homotopy => decide_homotopy(jp, jq, space, caps, mode),
    }
}

/// Rechecks every defining equation of an `Equivalent` certificate exactly.
/// Anything else (other verdicts, malformed witnesses, inputs that do not fit
/// `space`) yields `false`.
pub fn verify_certificate(
    cert: &EquivalenceCertificate,
    jp: &JumpData,
    jq: &JumpData,
    space: &BaseSpace,
) -> bool {
    if cert.verdict != Verdict::Equivalent || check_inputs(jp, jq, space).is_err() {
        return false;
    }
    verify_equations(cert, jp, jq, space).unwrap_or(false)
}

fn verify_equations(
    cert: &EquivalenceCertificate,
    jp: &JumpData,
    jq: &JumpData,
    space: &BaseSpace,
) -> Result<bool> {
    let n = space.n();
    let spec = &jp.spec;
    let Some(t) = &cert.witness_t else { return Ok(false) };
    if t.len() != n + 1 || t.iter().any(|x| x.spec() != spec) {
        return Ok(false);
    }
    let forced = space.forced_zero_indices();
    let cyclic = cert.circle_mode == CircleMode::StrictCyclic && space.has_wrap();

    let chain_ok = |w: &[GroupElement], sign_kl: bool| -> Result<bool> {
        for i in 1..=n {
            let (a, b) = (&jp.jumps[i - 1], &jq.jumps[i - 1]);
            let want = if sign_kl { a.sub(b)? } else { b.sub(a)? };
            if w[i].sub(&w[i - 1])? != want {
                return Ok(false);
            }
        }
        if cyclic {
            let (a, b) = (jp.wrap.as_ref().unwrap(), jq.wrap.as_ref().unwrap());
            let want = if sign_kl { a.sub(b)? } else { b.sub(a)? };
            if w[0].sub(&w[n])? != want {
                return Ok(false);
            }
        }
        Ok(forced.iter().all(|&i| w[i].is_zero()))
    };

    if !chain_ok(t, true)? {
        return Ok(false);
    }
    if cert.relation == Relation::Mvn {
        return Ok(true);
    }

    let Some(s) = &cert.witness_s else { return Ok(false) };
    if s.len() != n + 1 || s.iter().any(|x| x.spec() != spec) {
        return Ok(false);
    }
    if !chain_ok(s, false)? {
        return Ok(false);
    }
    let c = s[0].add(&t[0])?;
    for i in 0..=n {
        let sum = s[i].add(&t[i])?;
        if sum != c {
            return Ok(false);
        }
    }
    Ok(cert.relation != Relation::Homotopy || c.is_zero())
}

impl fmt::Display for EquivalenceCertificate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.relation, self.verdict)?;
        let join = |w: &[GroupElement]| {
            w.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(", ")
        };
        if let Some(t) = &self.witness_t {
            write!(f, " t=[{}]", join(t))?;
        }
        if let Some(s) = &self.witness_s {
            write!(f, " s=[{}]", join(s))?;
        }
        if let Some(r) = &self.refutation {
            write!(f, " ({r})")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::space::SpaceKind;
    use alloc::vec;

    fn space(kind: SpaceKind, n: usize) -> BaseSpace {
        let partition = match kind {
            SpaceKind::Interval | SpaceKind::Circle => (1..=n).map(|i| i as f64 / (n + 1) as f64).collect(),
            _ => (1..=n).map(|i| i as f64).collect(),
        };
        BaseSpace::new(kind, partition).unwrap()
    }

    fn jd(k: &[i64]) -> JumpData {
        JumpData::integers(k, None).unwrap()
    }

    fn ints(w: &[GroupElement]) -> Vec<i64> {
        w.iter().map(|x| x.as_integer().unwrap()).collect()
    }

    const BK: AlgebraCapabilities = AlgebraCapabilities {
        good_index_theory: true,
        homogeneity_assumed: true,
        halving_assumed: true,
    };

    #[test]
    fn interval_always_mvn_equivalent() {
        let s = space(SpaceKind::Interval, 3);
        let c = decide_mvn(&jd(&[1, -4, 2]), &jd(&[0, 3, 3]), &s, CircleMode::default()).unwrap();
        assert_eq!(c.verdict, Verdict::Equivalent);
        assert_eq!(ints(c.witness_t.as_ref().unwrap()), vec![0, 1, -6, -7]);
        assert!(verify_certificate(&c, &jd(&[1, -4, 2]), &jd(&[0, 3, 3]), &s));
    }

    #[test]
    fn line_needs_equal_sums() {
        let s = space(SpaceKind::Line, 2);
        let c = decide_mvn(&jd(&[1, 2]), &jd(&[2, 1]), &s, CircleMode::default()).unwrap();
        assert_eq!(c.verdict, Verdict::Equivalent);
        assert_eq!(ints(c.witness_t.as_ref().unwrap()), vec![0, -1, 0]);

        let c = decide_mvn(&jd(&[1, 0]), &jd(&[0, 0]), &s, CircleMode::default()).unwrap();
        assert_eq!(c.verdict, Verdict::NotEquivalent);
        assert!(c.refutation.is_some());
        assert!(c.witness_t.is_none());
    }

    #[test]
    fn equal_jumps_give_zero_witness() {
        let s = space(SpaceKind::Line, 3);
        let k = jd(&[3, -1, 5]);
        for rel in Relation::ALL {
            let c = decide(rel, &k, &k, &s, BK, CircleMode::default()).unwrap();
            assert_eq!(c.verdict, Verdict::Equivalent);
            assert!(c.witness_t.as_ref().unwrap().iter().all(GroupElement::is_zero));
            if let Some(sw) = &c.witness_s {
                assert!(sw.iter().all(GroupElement::is_zero));
            }
        }
    }

    #[test]
    fn circle_modes() {
        let s = space(SpaceKind::Circle, 1);
        let jp = JumpData::integers(&[-1], Some(1)).unwrap();
        let jq = JumpData::integers(&[0], Some(0)).unwrap();
        let strict = decide_mvn(&jp, &jq, &s, CircleMode::StrictCyclic).unwrap();
        assert_eq!(strict.verdict, Verdict::Equivalent);
        assert!(verify_certificate(&strict, &jp, &jq, &s));

        let jp = JumpData::integers(&[0], Some(1)).unwrap();
        let strict = decide_mvn(&jp, &jq, &s, CircleMode::StrictCyclic).unwrap();
        assert_eq!(strict.verdict, Verdict::NotEquivalent);
        let paper = decide_mvn(&jp, &jq, &s, CircleMode::PaperRemark).unwrap();
        assert_eq!(paper.verdict, Verdict::Equivalent);
        assert!(verify_certificate(&paper, &jp, &jq, &s));
    }

    #[test]
    fn unitary_requires_halving() {
        let s = space(SpaceKind::Interval, 1);
        let caps = AlgebraCapabilities { halving_assumed: false, ..BK };
        assert!(matches!(
            decide_unitary(&jd(&[1]), &jd(&[0]), &s, caps, CircleMode::default()),
            Err(Error::HypothesisNotMet(_))
        ));
    }

    #[test]
    fn unitary_on_line_and_interval() {
        let line = space(SpaceKind::Line, 2);
        let c = decide_unitary(&jd(&[1, 1]), &jd(&[0, 1]), &line, BK, CircleMode::default()).unwrap();
        assert_eq!(c.verdict, Verdict::NotEquivalent);

        let iv = space(SpaceKind::Interval, 2);
        let c = decide_unitary(&jd(&[1, 1]), &jd(&[0, 1]), &iv, BK, CircleMode::default()).unwrap();
        assert_eq!(c.verdict, Verdict::Equivalent);
        assert!(verify_certificate(&c, &jd(&[1, 1]), &jd(&[0, 1]), &iv));
    }

    #[test]
    fn homotopy_gate() {
        let s = space(SpaceKind::Line, 1);
        let none = AlgebraCapabilities::default();
        let c = decide_homotopy(&jd(&[1]), &jd(&[0]), &s, none, CircleMode::default()).unwrap();
        assert_eq!(c.verdict, Verdict::Undetermined);
        let c = decide_homotopy(&jd(&[1]), &jd(&[0]), &s, BK, CircleMode::default()).unwrap();
        assert_eq!(c.verdict, Verdict::NotEquivalent);
        let iv = space(SpaceKind::Interval, 1);
        let c = decide_homotopy(&jd(&[1]), &jd(&[0]), &iv, BK, CircleMode::default()).unwrap();
        assert_eq!(c.verdict, Verdict::Equivalent);
        assert!(verify_certificate(&c, &jd(&[1]), &jd(&[0]), &iv));
    }

    #[test]
    fn tampered_witness_fails() {
        let s = space(SpaceKind::Interval, 2);
        let (jp, jq) = (jd(&[2, 1]), jd(&[0, 0]));
        let mut c = decide_homotopy(&jp, &jq, &s, BK, CircleMode::default()).unwrap();
        assert!(verify_certificate(&c, &jp, &jq, &s));
        let t = c.witness_t.as_mut().unwrap();
        t[1] = t[1].add(&GroupSpec::integers().from_integer(1).unwrap()).unwrap();
        assert!(!verify_certificate(&c, &jp, &jq, &s));
    }

    #[test]
    fn wrong_length_fails() {
        let s = space(SpaceKind::Interval, 2);
        let (jp, jq) = (jd(&[2, 1]), jd(&[0, 0]));
        let mut c = decide_mvn(&jp, &jq, &s, CircleMode::default()).unwrap();
        c.witness_t.as_mut().unwrap().pop();
        assert!(!verify_certificate(&c, &jp, &jq, &s));
    }

    #[test]
    fn non_equivalent_certificates_do_not_verify() {
        let s = space(SpaceKind::Line, 1);
        let c = decide_mvn(&jd(&[1]), &jd(&[0]), &s, CircleMode::default()).unwrap();
        assert!(!verify_certificate(&c, &jd(&[1]), &jd(&[0]), &s));
    }

    #[test]
    fn shape_errors() {
        let s = space(SpaceKind::Line, 2);
        assert!(decide_mvn(&jd(&[1]), &jd(&[1]), &s, CircleMode::default()).is_err());
        let c = space(SpaceKind::Circle, 1);
        assert!(decide_mvn(&jd(&[1]), &jd(&[1]), &c, CircleMode::default()).is_err());
        let z3 = GroupSpec::cyclic(3).unwrap();
        let other = JumpData::new(z3.clone(), vec![z3.from_integer(1).unwrap(); 2], None).unwrap();
        assert_eq!(
            decide_mvn(&jd(&[1, 1]), &other, &s, CircleMode::default()),
            Err(Error::SpecMismatch)
        );
    }

    #[test]
    fn torsion_line() {
        let z3 = GroupSpec::cyclic(3).unwrap();
        let el = |v| z3.from_integer(v).unwrap();
        let s = space(SpaceKind::Line, 2);
        let jp = JumpData::new(z3.clone(), vec![el(2), el(2)], None).unwrap();
        let jq = JumpData::new(z3.clone(), vec![el(0), el(1)], None).unwrap();
        // 2 + 2 = 1 = 0 + 1 mod 3
        let c = decide_homotopy(&jp, &jq, &s, BK, CircleMode::default()).unwrap();
        assert_eq!(c.verdict, Verdict::Equivalent);
        assert!(verify_certificate(&c, &jp, &jq, &s));
    }

    #[test]
    fn deterministic() {
        let s = space(SpaceKind::HalfLine, 3);
        let (jp, jq) = (jd(&[1, 2, -3]), jd(&[0, 0, 1]));
        let a = decide_unitary(&jp, &jq, &s, BK, CircleMode::default()).unwrap();
        let b = decide_unitary(&jp, &jq, &s, BK, CircleMode::default()).unwrap();
        assert_eq!(a, b);
    }
}
