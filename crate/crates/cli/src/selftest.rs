//! Registry of invariant suites run by `corona selftest`.
//!
//! Each suite is deterministic (fixed seeds). A [`Faults`] set names suites
//! whose computation is deliberately corrupted, so the harness can confirm
//! that a broken invariant is reported under its own name.

use std::collections::BTreeSet;

use corona_core::{
    decide, decide_mvn, solve_telescoping, verify_certificate, AlgebraCapabilities, BaseSpace, CircleMode,
    GroupElement, GroupSpec, JumpData, Relation, SpaceKind, Verdict,
};
use corona_numeric::catalog::{instantiate, Family, FamilySpec};
use corona_numeric::hilbert::{
    essential_codimension, fredholm_index, transport_unitary, ProjectionMatrix, TailPattern, TruncatedOperator,
};
use corona_numeric::lifting::{
    jump_classes, normalize_jumps, realize_mvn_witness, same_corona_class, smooth_representative, trivialize_path,
};
use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Names of suites to corrupt.
#[derive(Debug, Clone, Default)]
pub struct Faults(BTreeSet<String>);

impl Faults {
    pub fn none() -> Self {
        Self::default()
    }

    pub fn inject<I: IntoIterator<Item = S>, S: Into<String>>(names: I) -> Self {
        Self(names.into_iter().map(Into::into).collect())
    }

    fn has(&self, name: &str) -> bool {
        self.0.contains(name)
    }
}

type Check = Result<usize, String>;

pub struct Suite {
    pub name: &'static str,
    pub invariant: &'static str,
    run: fn(bool) -> Check,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SuiteResult {
    pub name: &'static str,
    pub invariant: &'static str,
    /// Number of checks on success, failure detail otherwise.
    pub outcome: Result<usize, String>,
}

impl SuiteResult {
    pub fn passed(&self) -> bool {
        self.outcome.is_ok()
    }
}

pub fn registry() -> Vec<Suite> {
    vec![
        Suite { name: "kgroup-axioms", invariant: "group axioms hold exactly", run: kgroup_axioms },
        Suite { name: "telescoping-reverify", invariant: "telescoping witnesses satisfy every defining equation", run: telescoping_reverify },
        Suite { name: "telescoping-oracle", invariant: "telescoping solvability equals brute-force search", run: telescoping_oracle },
        Suite { name: "forced-zero-consistency", invariant: "forced zeros are exactly the infinite-ended subintervals", run: forced_zero_consistency },
        Suite { name: "classify-hierarchy", invariant: "homotopy => unitary => MvN", run: classify_hierarchy },
        Suite { name: "topology-laws", invariant: "interval/half-line always equivalent; line iff sums agree", run: topology_laws },
        Suite { name: "classify-exhaustive-oracle", invariant: "deciders match bounded witness search", run: classify_exhaustive_oracle },
        Suite { name: "determinism", invariant: "identical inputs give identical outputs", run: determinism },
        Suite { name: "codim-axioms", invariant: "antisymmetry, chain rule and finite-rank rule of [p:q]", run: codim_axioms },
        Suite { name: "norm-gap", invariant: "||p - q|| < 1 implies [p:q] = 0", run: norm_gap },
        Suite { name: "index-stability", invariant: "Fredholm index invariant under window perturbations", run: index_stability },
        Suite { name: "transport-composition", invariant: "chained transports conjugate path endpoints", run: transport_composition },
        Suite { name: "catalog-declared-jumps", invariant: "catalog jumps equal their declaration", run: catalog_declared_jumps },
        Suite { name: "normalize-preserves-class", invariant: "normalize_jumps keeps the corona class", run: normalize_preserves_class },
        Suite { name: "smoothing-idempotent", invariant: "smoothing is continuous, class-preserving and idempotent", run: smoothing_idempotent },
        Suite { name: "witness-index-consistency", invariant: "witness index data re-verifies against the classifier", run: witness_index_consistency },
    ]
}

pub fn run(faults: &Faults) -> Vec<SuiteResult> {
    registry()
        .into_iter()
        .map(|s| SuiteResult { name: s.name, invariant: s.invariant, outcome: (s.run)(faults.has(s.name)) })
        .collect()
}

fn ensure(cond: bool, what: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(what())
    }
}

fn err(e: impl std::fmt::Display) -> String {
    e.to_string()
}

fn mixed_spec() -> GroupSpec {
    GroupSpec::new(1, vec![3, 4]).expect("valid spec")
}

fn random_element(rng: &mut ChaCha8Rng, spec: &GroupSpec, bound: i64) -> GroupElement {
    let free = (0..spec.free_rank()).map(|_| rng.random_range(-bound..=bound)).collect();
    let tors: Vec<i64> = spec.torsion_orders().iter().map(|&d| rng.random_range(0..d as i64)).collect();
    spec.element(free, &tors).expect("in range")
}

fn space(kind: SpaceKind, n: usize) -> BaseSpace {
    BaseSpace::new(kind, (1..=n).map(|i| i as f64 / (n + 1) as f64).collect()).expect("valid partition")
}

const KINDS: [SpaceKind; 4] = [SpaceKind::Interval, SpaceKind::HalfLine, SpaceKind::Line, SpaceKind::Circle];

fn kgroup_axioms(fault: bool) -> Check {
    let spec = mixed_spec();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for _ in 0..100 {
        let a = random_element(&mut rng, &spec, 50);
        let b = random_element(&mut rng, &spec, 50);
        let c = random_element(&mut rng, &spec, 50);
        let ab_c = a.add(&b).and_then(|x| x.add(&c)).map_err(err)?;
        let a_bc = b.add(&c).and_then(|x| a.add(&x)).map_err(err)?;
        ensure(ab_c == a_bc, || format!("associativity fails for {a}, {b}, {c}"))?;
        ensure(a.add(&b).map_err(err)? == b.add(&a).map_err(err)?, || format!("{a} + {b} not commutative"))?;
        let inverse = if fault { a.clone() } else { a.neg() };
        ensure(a.add(&inverse).map_err(err)?.is_zero(), || format!("{a} + neg({a}) != 0"))?;
        ensure(a.neg().neg() == a, || format!("neg(neg({a})) != {a}"))?;
    }
    Ok(400)
}

fn recheck(t: &[GroupElement], deltas: &[GroupElement], forced: &[usize], wrap: Option<&GroupElement>) -> bool {
    let steps = deltas.iter().enumerate().all(|(i, d)| t[i + 1].sub(&t[i]).map(|x| x == *d).unwrap_or(false));
    let zeros = forced.iter().all(|&i| t[i].is_zero());
    let cyc = wrap.is_none_or(|d0| t[0].sub(&t[t.len() - 1]).map(|x| x == *d0).unwrap_or(false));
    steps && zeros && cyc
}

fn telescoping_reverify(fault: bool) -> Check {
    let spec = mixed_spec();
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut checked = 0;
    for round in 0..200 {
        let n = rng.random_range(0..5);
        let deltas: Vec<_> = (0..n).map(|_| random_element(&mut rng, &spec, 5)).collect();
        let cyclic = round % 3 == 0;
        let wrap = cyclic.then(|| random_element(&mut rng, &spec, 5));
        let forced: Vec<usize> = if cyclic { vec![] } else { (0..=n).filter(|_| rng.random_bool(0.3)).collect() };
        let sol = solve_telescoping(&spec, &deltas, &forced, wrap.as_ref()).map_err(err)?;
        if let Some(t) = sol.witness() {
            let mut t = t.to_vec();
            if fault && t.len() > 1 {
                t[1] = t[1].add(&spec.element(vec![1], &[0, 0]).map_err(err)?).map_err(err)?;
            }
            ensure(recheck(&t, &deltas, &forced, wrap.as_ref()), || format!("witness {t:?} fails for deltas {deltas:?}"))?;
            checked += 1;
        }
    }
    Ok(checked)
}

/// Exhaustive search over `t` with `|tᵢ| ≤ bound`.
fn brute_force(deltas: &[i64], forced: &[usize], wrap: Option<i64>, bound: i64) -> bool {
    fn go(t: &mut Vec<i64>, deltas: &[i64], forced: &[usize], wrap: Option<i64>, bound: i64) -> bool {
        let i = t.len();
        if i == deltas.len() + 1 {
            return wrap.is_none_or(|d0| t[0] - t[i - 1] == d0);
        }
        for c in -bound..=bound {
            if (forced.contains(&i) && c != 0) || (i > 0 && c - t[i - 1] != deltas[i - 1]) {
                continue;
            }
            t.push(c);
            if go(t, deltas, forced, wrap, bound) {
                return true;
            }
            t.pop();
        }
        false
    }
    go(&mut Vec::new(), deltas, forced, wrap, bound)
}

fn telescoping_oracle(fault: bool) -> Check {
    let spec = GroupSpec::integers();
    let mut count = 0;
    for n in 0..=2usize {
        let combos = 5usize.pow(n as u32);
        for code in 0..combos {
            let deltas: Vec<i64> = (0..n).map(|i| (code / 5usize.pow(i as u32) % 5) as i64 - 2).collect();
            let elems: Vec<_> = deltas.iter().map(|&d| spec.from_integer(d).expect("integer")).collect();
            for mask in 0u32..(1 << (n + 1)) {
                let forced: Vec<usize> = (0..=n).filter(|&i| mask & (1 << i) != 0).collect();
                let got = solve_telescoping(&spec, &elems, &forced, None).map_err(err)?.witness().is_some();
                let mut want = brute_force(&deltas, &forced, None, 8);
                if fault && count == 0 {
                    want = !want;
                }
                ensure(got == want, || format!("deltas {deltas:?} forced {forced:?}: solver {got}, oracle {want}"))?;
                count += 1;
            }
        }
    }
    Ok(count)
}

fn forced_zero_consistency(fault: bool) -> Check {
    let mut count = 0;
    for kind in KINDS {
        for n in 0..5 {
            let s = space(kind, n);
            let mut forced = s.forced_zero_indices();
            if fault {
                forced.pop();
            }
            for info in s.subintervals() {
                ensure(forced.contains(&info.index) == info.has_infinite_end(), || {
                    format!("{kind} n={n}: X_{} flag and forced set disagree", info.index)
                })?;
                count += 1;
            }
            ensure(s.has_wrap() == (kind == SpaceKind::Circle), || format!("{kind}: wrap slot"))?;
        }
    }
    Ok(count)
}

fn random_jumps(rng: &mut ChaCha8Rng, s: &BaseSpace, bound: i64) -> JumpData {
    let k: Vec<i64> = (0..s.n()).map(|_| rng.random_range(-bound..=bound)).collect();
    let wrap = s.has_wrap().then(|| rng.random_range(-bound..=bound));
    JumpData::integers(&k, wrap).expect("integers")
}

fn verdicts(jp: &JumpData, jq: &JumpData, s: &BaseSpace, mode: CircleMode) -> Result<[Verdict; 3], String> {
    let caps = AlgebraCapabilities::compact_operators();
    let v = |r| decide(r, jp, jq, s, caps, mode).map(|c| c.verdict).map_err(err);
    Ok([v(Relation::Mvn)?, v(Relation::Unitary)?, v(Relation::Homotopy)?])
}

fn classify_hierarchy(fault: bool) -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut count = 0;
    for round in 0..400 {
        let s = space(KINDS[round % 4], rng.random_range(0..4));
        let (jp, jq) = (random_jumps(&mut rng, &s, 3), random_jumps(&mut rng, &s, 3));
        let mode = if round % 8 < 4 { CircleMode::StrictCyclic } else { CircleMode::PaperRemark };
        let [m, u, mut h] = verdicts(&jp, &jq, &s, mode)?;
        if fault {
            h = Verdict::Equivalent;
        }
        ensure(h != Verdict::Equivalent || u == Verdict::Equivalent, || format!("homotopy without unitary on {s:?}"))?;
        ensure(u != Verdict::Equivalent || m == Verdict::Equivalent, || format!("unitary without MvN on {s:?}"))?;
        count += 1;
    }
    Ok(count)
}

fn sum(j: &JumpData) -> i64 {
    j.jumps().iter().map(|g| g.as_integer().expect("integer")).sum()
}

fn topology_laws(fault: bool) -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut count = 0;
    for kind in [SpaceKind::Interval, SpaceKind::HalfLine, SpaceKind::Line] {
        for _ in 0..200 {
            let s = space(kind, rng.random_range(0..5));
            let (jp, jq) = (random_jumps(&mut rng, &s, 3), random_jumps(&mut rng, &s, 3));
            let vs = verdicts(&jp, &jq, &s, CircleMode::StrictCyclic)?;
            let mut expect = kind != SpaceKind::Line || sum(&jp) == sum(&jq);
            if fault && kind == SpaceKind::Line {
                expect = !expect;
            }
            let want = if expect { Verdict::Equivalent } else { Verdict::NotEquivalent };
            ensure(vs.iter().all(|&v| v == want), || format!("{kind}: verdicts {vs:?}, expected {want}"))?;
            count += 1;
        }
    }
    Ok(count)
}

fn classify_exhaustive_oracle(fault: bool) -> Check {
    let mut count = 0;
    for kind in KINDS {
        for n in 0..=1usize {
            let s = space(kind, n);
            let wraps: Vec<Option<i64>> = if s.has_wrap() { (-2..=2).map(Some).collect() } else { vec![None] };
            let vals: Vec<Vec<i64>> = if n == 0 { vec![vec![]] } else { (-2..=2).map(|v| vec![v]).collect() };
            for k in &vals {
                for l in &vals {
                    for &kw in &wraps {
                        for &lw in &wraps {
                            let jp = JumpData::integers(k, kw).map_err(err)?;
                            let jq = JumpData::integers(l, lw).map_err(err)?;
                            let deltas: Vec<i64> = k.iter().zip(l).map(|(a, b)| a - b).collect();
                            let d0 = kw.zip(lw).map(|(a, b)| a - b);
                            let mut want = brute_force(&deltas, &s.forced_zero_indices(), d0, 8);
                            if fault && count == 0 {
                                want = !want;
                            }
                            let expect = if want { Verdict::Equivalent } else { Verdict::NotEquivalent };
                            let vs = verdicts(&jp, &jq, &s, CircleMode::StrictCyclic)?;
                            ensure(vs.iter().all(|&v| v == expect), || format!("{kind} k={k:?} l={l:?}: {vs:?}"))?;
                            count += 1;
                        }
                    }
                }
            }
        }
    }
    Ok(count)
}

fn determinism(fault: bool) -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for round in 0..100 {
        let s = space(KINDS[round % 4], rng.random_range(0..4));
        let (jp, jq) = (random_jumps(&mut rng, &s, 3), random_jumps(&mut rng, &s, 3));
        let a = decide_mvn(&jp, &jq, &s, CircleMode::StrictCyclic).map_err(err)?;
        let mut b = decide_mvn(&jp, &jq, &s, CircleMode::StrictCyclic).map_err(err)?;
        if fault {
            b.refutation = Some("perturbed".into());
        }
        ensure(a == b, || format!("two runs differ on {s:?}"))?;
    }
    let spec = FamilySpec::new(Family::Composite { fronts: vec![4, 9], amplitude: 0.3, seed: 3 });
    let s = space(SpaceKind::Interval, 1);
    let a = instantiate(&spec, &s).map_err(err)?;
    let b = instantiate(&spec, &s).map_err(err)?;
    ensure(a == b, || "catalog instantiation is not deterministic".into())?;
    Ok(101)
}

fn catalog_samples(seed: u64, fronts: Vec<usize>, tail: TailPattern) -> Result<Vec<ProjectionMatrix>, String> {
    let s = space(SpaceKind::Interval, fronts.len() - 1);
    let mut spec = FamilySpec::new(Family::Composite { fronts, amplitude: 0.4, seed });
    spec.tail = tail;
    let c = instantiate(&spec, &s).map_err(err)?;
    Ok(c.lifting.paths().iter().flat_map(|p| p.samples().iter().step_by(5).cloned()).collect())
}

fn codim_axioms(fault: bool) -> Check {
    let ps = catalog_samples(6, vec![3, 8, 5], TailPattern::alternating())?;
    let mut count = 0;
    for (i, a) in ps.iter().enumerate().step_by(2) {
        for b in ps.iter().skip(1).step_by(3) {
            let ab = essential_codimension(a, b).map_err(err)?;
            let ba = essential_codimension(b, a).map_err(err)?;
            ensure(ab == -ba, || format!("antisymmetry: {ab} vs {ba}"))?;
            let c = &ps[(i + 5) % ps.len()];
            let mut ac = essential_codimension(a, c).map_err(err)?;
            if fault {
                ac += 1;
            }
            let chain = ab + essential_codimension(b, c).map_err(err)?;
            ensure(ac == chain, || format!("chain rule: {ac} vs {chain}"))?;
            count += 2;
        }
    }
    let finite = catalog_samples(7, vec![2, 6], TailPattern::zeros())?;
    for a in &finite {
        for b in &finite {
            let want = a.window_rank() as i64 - b.window_rank() as i64;
            ensure(essential_codimension(a, b).map_err(err)? == want, || "finite-rank rule".into())?;
            count += 1;
        }
    }
    Ok(count)
}

fn random_orthogonal(rng: &mut ChaCha8Rng, w: usize) -> DMatrix<f64> {
    DMatrix::from_fn(w, w, |_, _| rng.random_range(-1.0..1.0)).qr().q()
}

fn projection(block: &DMatrix<f64>, dim: usize) -> Result<ProjectionMatrix, String> {
    let sym = (block + block.transpose()) * 0.5;
    ProjectionMatrix::from_window_block(&sym, dim, TailPattern::alternating()).map_err(err)
}

fn norm_gap(fault: bool) -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let w = 16;
    for _ in 0..50 {
        let f = rng.random_range(1..w);
        let d = DMatrix::from_fn(w, w, |r, c| if r == c && r < f { 1.0 } else { 0.0 });
        let u = random_orthogonal(&mut rng, w);
        let p = projection(&(&u * &d * u.transpose()), 32)?;
        let angle = if fault { std::f64::consts::FRAC_PI_2 } else { rng.random_range(0.0..1.5) };
        let mut g = DMatrix::<f64>::identity(w, w);
        g[(f - 1, f - 1)] = angle.cos();
        g[(f, f)] = angle.cos();
        g[(f, f - 1)] = angle.sin();
        g[(f - 1, f)] = -angle.sin();
        let v = &u * g;
        let mut d2 = d.clone();
        if fault {
            d2[(f, f)] = 1.0;
        }
        let q = projection(&(&v * d2 * v.transpose()), 32)?;
        let c = essential_codimension(&p, &q).map_err(err)?;
        ensure(c == 0, || format!("gap {:.3} but [p:q] = {c}", angle.sin()))?;
    }
    Ok(50)
}

fn index_stability(fault: bool) -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let w = 12;
    for _ in 0..50 {
        let s: Vec<bool> = (0..w).map(|_| rng.random_bool(0.5)).collect();
        let t: Vec<bool> = (0..w).map(|_| rng.random_bool(0.5)).collect();
        let diag = |set: &[bool]| DMatrix::from_fn(w, w, |r, c| if r == c && set[r] { 1.0 } else { 0.0 });
        let (pw, qw) = (diag(&s), diag(&t));
        let p = ProjectionMatrix::from_window_block(&pw, 20, TailPattern::ones()).map_err(err)?;
        let q = ProjectionMatrix::from_window_block(&qw, 20, TailPattern::ones()).map_err(err)?;
        let base = q.op().compose(p.op()).map_err(err)?;
        let noise = DMatrix::from_fn(w, w, |_, _| rng.random_range(-1.0..1.0));
        let f = &qw * (&qw * &pw + noise) * &pw;
        let f = TruncatedOperator::from_window_block(&f, 20, TailPattern::ones()).map_err(err)?;
        let i0 = fredholm_index(&base, &p, &q).map_err(err)?;
        let i1 = fredholm_index(&f, &p, &q).map_err(err)? + i64::from(fault);
        ensure(i0 == i1, || format!("index moved from {i0} to {i1}"))?;
    }
    Ok(50)
}

fn transport_composition(fault: bool) -> Check {
    let s = space(SpaceKind::Interval, 0);
    let mut spec = FamilySpec::new(Family::Composite { fronts: vec![9], amplitude: 0.5, seed: 10 });
    spec.samples = 30;
    let c = instantiate(&spec, &s).map_err(err)?;
    let path = &c.lifting.paths()[0];
    let mut us = trivialize_path(path).map_err(err)?;
    if fault {
        us[10] = transport_unitary(path.first(), path.first()).map_err(err)?;
    }
    let bound = path.samples().len() as f64 * 1e-8;
    let p0 = path.first().matrix();
    for (j, (u, p)) in us.iter().zip(path.samples()).enumerate() {
        let u = u.entries();
        let r = (u * p0 * u.transpose() - p.matrix()).norm();
        ensure(r <= bound, || format!("sample {j}: conjugation residual {r:.3e}"))?;
    }
    Ok(us.len())
}

fn catalog_declared_jumps(fault: bool) -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut count = 0;
    for round in 0..12 {
        let kind = KINDS[round % 3];
        let n = rng.random_range(0..3);
        let fronts: Vec<usize> = (0..=n).map(|_| rng.random_range(1..31)).collect();
        let s = space(kind, n);
        let c = instantiate(&FamilySpec::new(Family::Composite { fronts, amplitude: 0.3, seed: round as u64 }), &s)
            .map_err(err)?;
        let mut measured = jump_classes(&c.lifting).map_err(err)?;
        if fault && n > 0 {
            let bumped: Vec<i64> = measured.jumps().iter().map(|g| g.as_integer().expect("integer") + 1).collect();
            measured = JumpData::integers(&bumped, None).map_err(err)?;
        }
        ensure(measured == c.declared, || format!("{kind}: measured {measured:?}"))?;
        count += 1;
    }
    let s = space(SpaceKind::Circle, 2);
    let c = instantiate(&FamilySpec::new(Family::Winding { winding: 3, base: 5 }), &s).map_err(err)?;
    ensure(jump_classes(&c.lifting).map_err(err)? == c.declared, || "winding family".into())?;
    Ok(count + 1)
}

fn normalize_preserves_class(fault: bool) -> Check {
    let s = space(SpaceKind::Interval, 2);
    let p = instantiate(&FamilySpec::new(Family::Composite { fronts: vec![4, 10, 7], amplitude: 0.3, seed: 1 }), &s)
        .map_err(err)?;
    let target = JumpData::integers(&[1, -2], None).map_err(err)?;
    let out = normalize_jumps(&p.lifting, &target).map_err(err)?;
    let mut section = out.to_section();
    if fault {
        let w = section.window;
        section.segments[1].samples[0][(w, w)] = 1.0 - section.segments[1].samples[0][(w, w)];
    }
    ensure(same_corona_class(&p.lifting.to_section(), &section).map_err(err)?, || "class changed".into())?;
    ensure(jump_classes(&out).map_err(err)? == target, || "targets missed".into())?;
    Ok(2)
}

fn smoothing_idempotent(fault: bool) -> Check {
    let mut count = 0;
    for (i, kind) in KINDS.into_iter().enumerate() {
        let s = space(kind, 2);
        let c = instantiate(&FamilySpec::new(Family::Composite { fronts: vec![3, 8, 5], amplitude: 0.3, seed: i as u64 }), &s)
            .map_err(err)?;
        let f = c.lifting.to_section();
        let mut g = smooth_representative(&f).map_err(err)?;
        if fault {
            g.segments[1].samples[0][(0, 0)] += 1e-3;
        }
        for j in 1..g.segments.len() {
            let gap = (&g.segments[j].samples[0] - g.segments[j - 1].samples.last().expect("non-empty")).norm();
            ensure(gap <= 1e-10, || format!("{kind}: jump {gap:.3e} at x_{j}"))?;
        }
        ensure(same_corona_class(&f, &g).map_err(err)?, || format!("{kind}: class changed"))?;
        let h = smooth_representative(&g).map_err(err)?;
        let drift = g
            .segments
            .iter()
            .zip(&h.segments)
            .flat_map(|(a, b)| a.samples.iter().zip(&b.samples).map(|(x, y)| (x - y).norm()))
            .fold(0.0, f64::max);
        ensure(drift <= 1e-12, || format!("{kind}: second pass moved by {drift:.3e}"))?;
        count += 3;
    }
    Ok(count)
}

fn witness_index_consistency(fault: bool) -> Check {
    let pairs: [(SpaceKind, Vec<usize>, Vec<usize>); 3] = [
        (SpaceKind::Interval, vec![6, 9, 4], vec![6, 5, 7]),
        (SpaceKind::Line, vec![5, 8, 6], vec![5, 2, 6]),
        (SpaceKind::Circle, vec![7, 5, 9], vec![7, 9, 9]),
    ];
    for (i, (kind, fp, fq)) in pairs.into_iter().enumerate() {
        let s = space(kind, 2);
        let make = |fronts, seed| {
            instantiate(&FamilySpec::new(Family::Composite { fronts, amplitude: 0.3, seed }), &s).map_err(err)
        };
        let (p, q) = (make(fp, i as u64)?, make(fq, 10 + i as u64)?);
        let cert = decide_mvn(&p.declared, &q.declared, &s, CircleMode::StrictCyclic).map_err(err)?;
        let t: Vec<i64> = cert
            .witness_t
            .as_ref()
            .ok_or_else(|| format!("{kind}: pair not equivalent"))?
            .iter()
            .map(|g| g.as_integer().expect("integer"))
            .collect();
        let d = realize_mvn_witness(&p.lifting, &q.lifting, &t).map_err(err)?;
        let mut measured = cert.clone();
        let mut index = d.index.clone();
        if fault {
            index[1] += 1;
        }
        let spec = GroupSpec::integers();
        measured.witness_t = Some(index.iter().map(|&v| spec.from_integer(v)).collect::<Result<_, _>>().map_err(err)?);
        ensure(verify_certificate(&measured, &p.declared, &q.declared, &s), || format!("{kind}: index {index:?} rejected"))?;
        ensure(index == t, || format!("{kind}: index {index:?} vs classifier {t:?}"))?;
        ensure(d.witness.report.max_residual() <= 1e-6, || format!("{kind}: residual too large"))?;
    }
    Ok(3)
}
