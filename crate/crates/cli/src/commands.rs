use std::fmt::Write as _;

use corona_core::{decide, decide_mvn, verify_certificate, EquivalenceCertificate, Relation, Verdict};
use corona_numeric::hilbert::{essential_codimension, is_window_supported};
use corona_numeric::lifting::{jump_classes, realize_mvn_witness, LocalLifting};
use serde::Serialize;
use serde_json::Value;

use crate::scenario::{ElementDto, Loaded, Mode, NumericLifting};
use crate::{exit, CliError};

/// Result of a command: structured report, text summary, exit code.
#[derive(Debug)]
pub struct Outcome {
    pub report: Value,
    pub summary: String,
    pub exit_code: i32,
}

#[derive(Debug, Serialize)]
pub struct CertificateDto {
    pub relation: &'static str,
    pub verdict: &'static str,
    pub circle_mode: &'static str,
    pub t: Option<Vec<ElementDto>>,
    pub s: Option<Vec<ElementDto>>,
    pub refutation: Option<String>,
}

impl From<&EquivalenceCertificate> for CertificateDto {
    fn from(c: &EquivalenceCertificate) -> Self {
        let seq = |w: &Option<Vec<corona_core::GroupElement>>| {
            w.as_ref().map(|v| v.iter().map(ElementDto::from_element).collect())
        };
        Self {
            relation: c.relation.name(),
            verdict: c.verdict.name(),
            circle_mode: c.circle_mode.name(),
            t: seq(&c.witness_t),
            s: seq(&c.witness_s),
            refutation: c.refutation.clone(),
        }
    }
}

fn to_value(v: impl Serialize) -> Value {
    serde_json::to_value(v).expect("report types serialize")
}

pub fn classify(sc: &Loaded, relations: &[Relation]) -> Result<Outcome, CliError> {
    let Mode::Symbolic { p, q } = &sc.mode else {
        return Err(CliError::Input("classify needs a symbolic scenario".into()));
    };
    let mut certs = Vec::new();
    let mut summary = String::new();
    let mut code = exit::OK;
    for &rel in relations {
        let cert = decide(rel, p, q, &sc.space, sc.caps, sc.circle_mode)?;
        if cert.verdict == Verdict::Undetermined {
            code = exit::UNDETERMINED;
        }
        writeln!(summary, "{cert}").unwrap();
        certs.push(CertificateDto::from(&cert));
    }
    let report = serde_json::json!({
        "command": "classify",
        "space": sc.space.kind().name(),
        "partition": sc.space.partition(),
        "certificates": to_value(&certs),
    });
    Ok(Outcome { report, summary, exit_code: code })
}

#[derive(Debug, Serialize)]
struct PointReport {
    point: f64,
    trace: f64,
    /// Distance of the trace from the nearest integer.
    trace_residual: f64,
    window_supported: bool,
    codimension: i64,
}

#[derive(Debug, Serialize)]
struct LiftingReport {
    measured: Vec<i64>,
    measured_wrap: Option<i64>,
    declared: Option<Vec<ElementDto>>,
    declared_wrap: Option<ElementDto>,
    matches_declared: Option<bool>,
    points: Vec<PointReport>,
}

fn junctions(l: &LocalLifting) -> Vec<(f64, usize, usize)> {
    let n = l.space().n();
    let mut out: Vec<_> = (1..=n).map(|i| (l.space().partition()[i - 1], i, i - 1)).collect();
    if l.space().has_wrap() {
        out.push((0.0, 0, n));
    }
    out
}

fn analyze_one(nl: &NumericLifting) -> Result<LiftingReport, CliError> {
    let l = &nl.lifting;
    let mut points = Vec::new();
    for (point, after, before) in junctions(l) {
        let a = l.paths()[after].first();
        let b = l.paths()[before].last();
        let diff = a.matrix() - b.matrix();
        let trace = diff.trace();
        let codimension = essential_codimension(a, b)
            .map_err(|e| corona_numeric::Error::AtPoint { point, source: Box::new(e) })?;
        points.push(PointReport {
            point,
            trace,
            trace_residual: (trace - trace.round()).abs(),
            window_supported: is_window_supported(&diff, a.window()),
            codimension,
        });
    }
    let measured = jump_classes(l)?;
    let ints = |j: &corona_core::JumpData| -> (Vec<i64>, Option<i64>) {
        (
            j.jumps().iter().map(|g| g.as_integer().expect("integer jumps")).collect(),
            j.wrap().map(|g| g.as_integer().expect("integer jumps")),
        )
    };
    let (m, mw) = ints(&measured);
    Ok(LiftingReport {
        measured: m,
        measured_wrap: mw,
        declared: nl.declared.as_ref().map(|d| d.jumps().iter().map(ElementDto::from_element).collect()),
        declared_wrap: nl.declared.as_ref().and_then(|d| d.wrap()).map(ElementDto::from_element),
        matches_declared: nl.declared.as_ref().map(|d| *d == measured),
        points,
    })
}

pub fn analyze(sc: &Loaded) -> Result<Outcome, CliError> {
    let Mode::Numeric { p, q } = &sc.mode else {
        return Err(CliError::Input("analyze needs a numeric scenario".into()));
    };
    let rp = analyze_one(p)?;
    let rq = analyze_one(q)?;
    let mut summary = String::new();
    let mut code = exit::OK;
    for (name, r) in [("p", &rp), ("q", &rq)] {
        write!(summary, "{name}: jumps {:?}", r.measured).unwrap();
        if let Some(w) = r.measured_wrap {
            write!(summary, ", wrap {w}").unwrap();
        }
        match r.matches_declared {
            Some(true) => summary.push_str(" (matches declared)"),
            Some(false) => {
                summary.push_str(" (DIFFERS from declared)");
                code = exit::ERROR;
            }
            None => {}
        }
        summary.push('\n');
    }
    let report = serde_json::json!({
        "command": "analyze",
        "space": sc.space.kind().name(),
        "partition": sc.space.partition(),
        "p": to_value(&rp),
        "q": to_value(&rq),
    });
    Ok(Outcome { report, summary, exit_code: code })
}

pub fn deform(sc: &Loaded) -> Result<Outcome, CliError> {
    let Mode::Numeric { p, q } = &sc.mode else {
        return Err(CliError::Input("deform needs a numeric scenario".into()));
    };
    let jp = jump_classes(&p.lifting)?;
    let jq = jump_classes(&q.lifting)?;
    let cert = decide_mvn(&jp, &jq, &sc.space, sc.circle_mode)?;
    if cert.verdict != Verdict::Equivalent {
        return Err(CliError::Refused(format!(
            "classifier says not equivalent ({})",
            cert.refutation.as_deref().unwrap_or("no witness")
        )));
    }
    let t: Vec<i64> = cert
        .witness_t
        .as_ref()
        .expect("equivalent certificates carry t")
        .iter()
        .map(|g| g.as_integer().expect("integer witness"))
        .collect();
    let d = realize_mvn_witness(&p.lifting, &q.lifting, &t)?;
    let mut realized = cert.clone();
    realized.witness_t = Some(d.t.iter().map(|&v| sc.spec.from_integer(v)).collect::<Result<_, _>>()?);
    let verified = verify_certificate(&realized, &jp, &jq, &sc.space);
    let report = &d.witness.report;
    let max_residual = report.max_residual();
    if max_residual > sc.tol.max(f64::MIN_POSITIVE) {
        return Err(CliError::Refused(format!("witness residual {max_residual:.3e} exceeds tolerance {:.1e}", sc.tol)));
    }
    if !verified || !report.all_window_supported() {
        return Err(CliError::Refused("realized witness failed verification".into()));
    }
    let residuals: Vec<Value> = report
        .residuals
        .iter()
        .map(|r| serde_json::json!({ "subinterval": r.subinterval, "source": r.source, "range": r.range }))
        .collect();
    let mismatch = |m: &corona_numeric::lifting::Mismatch| {
        serde_json::json!({ "point": m.point, "window_supported": m.window_supported, "norm": m.norm })
    };
    let summary = format!(
        "MvN witness realized: t = {:?} (classifier {:?}, shift {}), index data {:?}, max residual {:.2e}\n",
        d.t, t, d.shift, d.index, max_residual
    );
    let report = serde_json::json!({
        "command": "deform",
        "space": sc.space.kind().name(),
        "partition": sc.space.partition(),
        "certificate": to_value(CertificateDto::from(&cert)),
        "realized_t": d.t,
        "shift": d.shift,
        "index_data": d.index,
        "verified": verified,
        "max_residual": max_residual,
        "residuals": residuals,
        "mismatches": report.mismatches.iter().map(mismatch).collect::<Vec<_>>(),
        "wrap_mismatch": report.wrap.as_ref().map(mismatch),
    });
    Ok(Outcome { report, summary, exit_code: exit::OK })
}

/// Relations selected by `--relation`.
pub fn relations(name: &str) -> Option<Vec<Relation>> {
    Some(match name {
        "all" => Relation::ALL.to_vec(),
        "mvn" => vec![Relation::Mvn],
        "unitary" => vec![Relation::Unitary],
        "homotopy" => vec![Relation::Homotopy],
        _ => return None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scenario::{parse, Overrides};

    fn load(text: &str) -> Loaded {
        parse(text).unwrap().load(&Overrides::default()).unwrap()
    }

    const SYMBOLIC: &str = r#"{
        "group": { "free_rank": 1 },
        "space": { "kind": "half-line", "partition": [1.0, 2.0] },
        "symbolic": { "p": { "jumps": [1, 4] }, "q": { "jumps": [0, 0] } }
    }"#;

    #[test]
    fn relation_names() {
        assert_eq!(relations("all").unwrap().len(), 3);
        assert_eq!(relations("unitary").unwrap(), vec![Relation::Unitary]);
        assert!(relations("homotopic").is_none());
    }

    #[test]
    fn classify_reports_every_requested_relation() {
        let o = classify(&load(SYMBOLIC), &Relation::ALL).unwrap();
        assert_eq!(o.exit_code, exit::OK);
        let certs = o.report["certificates"].as_array().unwrap();
        assert_eq!(certs.len(), 3);
        assert!(certs.iter().all(|c| c["verdict"] == "equivalent"));
        assert_eq!(certs[0]["t"], serde_json::json!([-5, -4, 0]));
    }

    #[test]
    fn commands_check_the_scenario_mode() {
        let sc = load(SYMBOLIC);
        assert!(matches!(analyze(&sc), Err(CliError::Input(_))));
        assert!(matches!(deform(&sc), Err(CliError::Input(_))));
    }
}
