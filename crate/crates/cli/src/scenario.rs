//! Scenario files.
//!
//! ```json
//! {
//!   "group": { "free_rank": 1, "torsion": [] },
//!   "space": { "kind": "line", "partition": [0.0, 1.0] },
//!   "capabilities": "bk",
//!   "circle_mode": "strict",
//!   "symbolic": { "p": { "jumps": [1, 2] }, "q": { "jumps": [2, 1] } }
//! }
//! ```
//!
//! Numeric scenarios replace `symbolic` by
//! `"numeric": { "dim": 64, "window": 32, "samples": 16, "tail": [1, 0], "p": …, "q": … }`
//! where each lifting is either `{ "catalog": { "family": "front", … } }` or
//! `{ "explicit": { "segments": [ { "grid": [...], "samples": [ N×N row-major ] } ] } }`.
//! Group elements are `{ "free": [...], "torsion": [...] }`; a bare integer is
//! accepted for `ℤ` and `ℤ/d`.

use std::path::Path;

use corona_core::{AlgebraCapabilities, BaseSpace, CircleMode, GroupElement, GroupSpec, JumpData, SpaceKind};
use corona_numeric::catalog::{self, CatalogLifting, Family, FamilySpec};
use corona_numeric::hilbert::{ProjectionMatrix, TailMap, TailPattern, TruncatedOperator};
use corona_numeric::lifting::{LocalLifting, ProjectionPath};
use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::CliError;

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub group: GroupDto,
    pub space: SpaceDto,
    #[serde(default)]
    pub capabilities: Option<CapabilitiesDto>,
    #[serde(default)]
    pub circle_mode: Option<CircleModeDto>,
    #[serde(default)]
    pub symbolic: Option<SymbolicDto>,
    #[serde(default)]
    pub numeric: Option<NumericDto>,
    #[serde(default)]
    pub tolerances: Option<TolerancesDto>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GroupDto {
    pub free_rank: usize,
    #[serde(default)]
    pub torsion: Vec<u64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpaceDto {
    pub kind: SpaceKindDto,
    #[serde(default)]
    pub partition: Vec<f64>,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SpaceKindDto {
    Interval,
    #[serde(alias = "halfline")]
    HalfLine,
    Line,
    Circle,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(untagged)]
pub enum CapabilitiesDto {
    Preset(PresetDto),
    Flags {
        #[serde(default)]
        good_index_theory: bool,
        #[serde(default)]
        homogeneity_assumed: bool,
        #[serde(default)]
        halving_assumed: bool,
    },
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PresetDto {
    /// `B = K`, the compact operators.
    Bk,
    None,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "kebab-case")]
pub enum CircleModeDto {
    Strict,
    Paper,
}

impl From<CircleModeDto> for CircleMode {
    fn from(m: CircleModeDto) -> Self {
        match m {
            CircleModeDto::Strict => CircleMode::StrictCyclic,
            CircleModeDto::Paper => CircleMode::PaperRemark,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SymbolicDto {
    pub p: JumpDto,
    pub q: JumpDto,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JumpDto {
    #[serde(default)]
    pub jumps: Vec<ElementDto>,
    #[serde(default)]
    pub wrap: Option<ElementDto>,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(untagged)]
pub enum ElementDto {
    Integer(i64),
    Full {
        #[serde(default)]
        free: Vec<i64>,
        #[serde(default)]
        torsion: Vec<i64>,
    },
}

impl ElementDto {
    pub fn from_element(g: &GroupElement) -> Self {
        let spec = g.spec();
        let simple = (spec.free_rank() == 1 && spec.torsion_orders().is_empty())
            || (spec.free_rank() == 0 && spec.torsion_orders().len() == 1);
        match g.as_integer() {
            Some(v) if simple => ElementDto::Integer(v),
            _ => ElementDto::Full {
                free: g.free_part().to_vec(),
                torsion: g.torsion_part().iter().map(|&t| t as i64).collect(),
            },
        }
    }

    fn to_element(&self, spec: &GroupSpec) -> Result<GroupElement, CliError> {
        Ok(match self {
            ElementDto::Integer(v) => spec.from_integer(*v)?,
            ElementDto::Full { free, torsion } => spec.element(free.clone(), torsion)?,
        })
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NumericDto {
    #[serde(default)]
    pub dim: Option<usize>,
    #[serde(default)]
    pub window: Option<usize>,
    #[serde(default)]
    pub samples: Option<usize>,
    /// Tail period as 0/1 entries; default `[1, 0]`.
    #[serde(default)]
    pub tail: Option<Vec<u8>>,
    pub p: LiftingDto,
    pub q: LiftingDto,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", deny_unknown_fields)]
pub enum LiftingDto {
    Catalog(FamilyDto),
    Explicit(ExplicitDto),
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "kebab-case", deny_unknown_fields)]
pub enum FamilyDto {
    Front {
        fronts: Vec<usize>,
        #[serde(default)]
        sweep: f64,
    },
    Rotation {
        rank: usize,
        #[serde(default)]
        amplitude: f64,
    },
    Winding {
        winding: i64,
        base: usize,
    },
    Composite {
        fronts: Vec<usize>,
        #[serde(default)]
        amplitude: f64,
        #[serde(default)]
        seed: u64,
    },
}

impl From<&FamilyDto> for Family {
    fn from(f: &FamilyDto) -> Self {
        match f.clone() {
            FamilyDto::Front { fronts, sweep } => Family::Front { fronts, sweep },
            FamilyDto::Rotation { rank, amplitude } => Family::Rotation { rank, amplitude },
            FamilyDto::Winding { winding, base } => Family::Winding { winding, base },
            FamilyDto::Composite { fronts, amplitude, seed } => Family::Composite { fronts, amplitude, seed },
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExplicitDto {
    /// Overrides the scenario-level tail for this lifting.
    #[serde(default)]
    pub tail: Option<Vec<u8>>,
    pub segments: Vec<SegmentDto>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SegmentDto {
    pub grid: Vec<f64>,
    /// One dense row-major `N × N` matrix per grid point.
    pub samples: Vec<Vec<Vec<f64>>>,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TolerancesDto {
    #[serde(default)]
    pub residual: Option<f64>,
}

/// Command-line overrides applied on top of the scenario file.
#[derive(Debug, Clone, Copy, Default)]
pub struct Overrides {
    pub dim: Option<usize>,
    pub circle_mode: Option<CircleMode>,
    pub tol: Option<f64>,
}

pub const DEFAULT_TOL: f64 = 1e-8;

/// A validated scenario.
#[derive(Debug, Clone)]
pub struct Loaded {
    pub spec: GroupSpec,
    pub space: BaseSpace,
    pub caps: AlgebraCapabilities,
    pub circle_mode: CircleMode,
    pub tol: f64,
    pub mode: Mode,
}

#[derive(Debug, Clone)]
pub enum Mode {
    Symbolic { p: JumpData, q: JumpData },
    Numeric { p: NumericLifting, q: NumericLifting },
}

#[derive(Debug, Clone)]
pub struct NumericLifting {
    pub lifting: LocalLifting,
    pub declared: Option<JumpData>,
}

pub fn read(path: &Path) -> Result<Scenario, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    parse(&text)
}

pub fn parse(text: &str) -> Result<Scenario, CliError> {
    serde_json::from_str(text).map_err(|e| CliError::Input(format!("malformed scenario: {e}")))
}

fn tail_pattern(raw: &[u8]) -> Result<TailPattern, CliError> {
    if raw.iter().any(|&b| b > 1) {
        return Err(CliError::Input("tail entries must be 0 or 1".into()));
    }
    Ok(TailPattern::periodic(raw.iter().map(|&b| b == 1).collect())?)
}

impl Scenario {
    pub fn load(&self, o: &Overrides) -> Result<Loaded, CliError> {
        let spec = GroupSpec::new(self.group.free_rank, self.group.torsion.clone())?;
        let kind = match self.space.kind {
            SpaceKindDto::Interval => SpaceKind::Interval,
            SpaceKindDto::HalfLine => SpaceKind::HalfLine,
            SpaceKindDto::Line => SpaceKind::Line,
            SpaceKindDto::Circle => SpaceKind::Circle,
        };
        let space = BaseSpace::new(kind, self.space.partition.clone())?;
        let caps = match self.capabilities {
            None | Some(CapabilitiesDto::Preset(PresetDto::Bk)) => AlgebraCapabilities::compact_operators(),
            Some(CapabilitiesDto::Preset(PresetDto::None)) => AlgebraCapabilities::default(),
            Some(CapabilitiesDto::Flags { good_index_theory, homogeneity_assumed, halving_assumed }) => {
                AlgebraCapabilities { good_index_theory, homogeneity_assumed, halving_assumed }
            }
        };
        let circle_mode = o
            .circle_mode
            .or(self.circle_mode.map(Into::into))
            .unwrap_or_default();
        let tol = o
            .tol
            .or(self.tolerances.and_then(|t| t.residual))
            .unwrap_or(DEFAULT_TOL);
        let mode = match (&self.symbolic, &self.numeric) {
            (Some(s), None) => {
                let jumps = |j: &JumpDto| -> Result<JumpData, CliError> {
                    let jumps = j.jumps.iter().map(|e| e.to_element(&spec)).collect::<Result<Vec<_>, _>>()?;
                    let wrap = j.wrap.as_ref().map(|e| e.to_element(&spec)).transpose()?;
                    let data = JumpData::new(spec.clone(), jumps, wrap)?;
                    data.fits(&space)?;
                    Ok(data)
                };
                Mode::Symbolic { p: jumps(&s.p)?, q: jumps(&s.q)? }
            }
            (None, Some(n)) => {
                if spec != GroupSpec::integers() {
                    return Err(CliError::Input("numeric scenarios realize B = K: group must be Z".into()));
                }
                let dim = o.dim.or(n.dim).unwrap_or(catalog::DEFAULT_DIM);
                let window = n.window.unwrap_or(dim / 2);
                let samples = n.samples.unwrap_or(catalog::DEFAULT_SAMPLES);
                let tail = tail_pattern(n.tail.as_deref().unwrap_or(&[1, 0]))?;
                let build = |l: &LiftingDto| build_lifting(l, &space, dim, window, samples, &tail);
                Mode::Numeric { p: build(&n.p)?, q: build(&n.q)? }
            }
            (Some(_), Some(_)) => return Err(CliError::Input("scenario has both symbolic and numeric blocks".into())),
            (None, None) => return Err(CliError::Input("scenario needs a symbolic or a numeric block".into())),
        };
        Ok(Loaded { spec, space, caps, circle_mode, tol, mode })
    }
}

fn build_lifting(
    l: &LiftingDto,
    space: &BaseSpace,
    dim: usize,
    window: usize,
    samples: usize,
    tail: &TailPattern,
) -> Result<NumericLifting, CliError> {
    match l {
        LiftingDto::Catalog(f) => {
            let spec = FamilySpec { family: f.into(), dim, window, samples, tail: tail.clone() };
            let CatalogLifting { lifting, declared } = catalog::instantiate(&spec, space)?;
            Ok(NumericLifting { lifting, declared: Some(declared) })
        }
        LiftingDto::Explicit(e) => {
            let tail = match &e.tail {
                Some(t) => tail_pattern(t)?,
                None => tail.clone(),
            };
            let infos = space.subintervals();
            if e.segments.len() != infos.len() {
                return Err(CliError::Input(format!(
                    "{} segments for {} subintervals",
                    e.segments.len(),
                    infos.len()
                )));
            }
            let mut paths = Vec::with_capacity(infos.len());
            for (info, seg) in infos.iter().zip(&e.segments) {
                if seg.grid.len() != seg.samples.len() {
                    return Err(CliError::Input(format!(
                        "X_{}: {} grid points but {} samples",
                        info.index,
                        seg.grid.len(),
                        seg.samples.len()
                    )));
                }
                let mut mats = Vec::with_capacity(seg.samples.len());
                for (x, rows) in seg.grid.iter().zip(&seg.samples) {
                    let at = |e: corona_numeric::Error| corona_numeric::Error::AtPoint { point: *x, source: Box::new(e) };
                    if rows.len() != dim || rows.iter().any(|r| r.len() != dim) {
                        return Err(at(corona_numeric::Error::Shape(format!("sample must be {dim}x{dim}"))).into());
                    }
                    let m = DMatrix::from_fn(dim, dim, |r, c| rows[r][c]);
                    let op = TruncatedOperator::new(m, window, TailMap::Diagonal(tail.clone())).map_err(at)?;
                    mats.push(ProjectionMatrix::new(op).map_err(at)?);
                }
                paths.push(ProjectionPath::new(*info, seg.grid.clone(), mats)?);
            }
            Ok(NumericLifting { lifting: LocalLifting::new(space.clone(), paths)?, declared: None })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const LINE: &str = r#"{
        "group": { "free_rank": 1 },
        "space": { "kind": "line", "partition": [0.0] },
        "circle_mode": "paper",
        "tolerances": { "residual": 1e-7 },
        "symbolic": { "p": { "jumps": [2] }, "q": { "jumps": [{ "free": [2], "torsion": [] }] } }
    }"#;

    #[test]
    fn integers_and_full_elements_agree() {
        let l = parse(LINE).unwrap().load(&Overrides::default()).unwrap();
        let Mode::Symbolic { p, q } = l.mode else { panic!("symbolic") };
        assert_eq!(p, q);
    }

    #[test]
    fn flags_override_scenario_which_overrides_defaults() {
        let sc = parse(LINE).unwrap();
        let l = sc.load(&Overrides::default()).unwrap();
        assert_eq!((l.circle_mode, l.tol), (CircleMode::PaperRemark, 1e-7));
        let o = Overrides { circle_mode: Some(CircleMode::StrictCyclic), tol: Some(1e-9), dim: None };
        let l = sc.load(&o).unwrap();
        assert_eq!((l.circle_mode, l.tol), (CircleMode::StrictCyclic, 1e-9));
        let bare = parse(&LINE.replace(r#""circle_mode": "paper","#, "").replace(r#""tolerances": { "residual": 1e-7 },"#, ""))
            .unwrap()
            .load(&Overrides::default())
            .unwrap();
        assert_eq!((bare.circle_mode, bare.tol), (CircleMode::StrictCyclic, DEFAULT_TOL));
        assert_eq!(bare.caps, AlgebraCapabilities::compact_operators());
    }

    #[test]
    fn unknown_fields_and_missing_blocks_are_rejected() {
        assert!(parse(&LINE.replace("\"circle_mode\"", "\"circle\"")).is_err());
        let none = r#"{ "group": { "free_rank": 1 }, "space": { "kind": "circle" } }"#;
        let err = parse(none).unwrap().load(&Overrides::default()).unwrap_err();
        assert!(err.to_string().contains("symbolic or a numeric"));
    }

    #[test]
    fn jump_count_must_fit_the_partition() {
        let bad = LINE.replace(r#""jumps": [2]"#, r#""jumps": [2, 1]"#);
        assert!(matches!(parse(&bad).unwrap().load(&Overrides::default()), Err(CliError::Core(_))));
    }

    #[test]
    fn numeric_scenarios_need_the_integers_and_matching_segments() {
        let numeric = r#"{
            "group": { "free_rank": 1, "torsion": [2] },
            "space": { "kind": "interval" },
            "numeric": {
                "dim": 20, "window": 12,
                "p": { "catalog": { "family": "rotation", "rank": 3 } },
                "q": { "explicit": { "segments": [] } }
            }
        }"#;
        assert!(matches!(parse(numeric).unwrap().load(&Overrides::default()), Err(CliError::Input(_))));
        let z = numeric.replace(r#", "torsion": [2]"#, "");
        let err = parse(&z).unwrap().load(&Overrides::default()).unwrap_err();
        assert!(err.to_string().contains("0 segments for 1 subintervals"), "{err}");
    }

    #[test]
    fn catalog_liftings_carry_their_declaration() {
        let text = r#"{
            "group": { "free_rank": 1 },
            "space": { "kind": "interval", "partition": [0.5] },
            "numeric": {
                "dim": 24, "window": 12, "tail": [1],
                "p": { "catalog": { "family": "front", "fronts": [2, 5] } },
                "q": { "catalog": { "family": "front", "fronts": [3, 3] } }
            }
        }"#;
        let l = parse(text).unwrap().load(&Overrides::default()).unwrap();
        let Mode::Numeric { p, .. } = l.mode else { panic!("numeric") };
        assert_eq!(p.lifting.dim(), 24);
        assert_eq!(p.declared.unwrap(), JumpData::integers(&[3], None).unwrap());
    }
}
