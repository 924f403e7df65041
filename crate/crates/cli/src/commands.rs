//! The subcommands, written against the doctrine and monad traits.

use reldoc::completion::{
    check_reflection_agreement, check_sruc_section, find_singletons, map_category, ruc_doctrine, cauchy_reflector,
    strongly_complete_objects, Restricted,
};
use reldoc::doctrine::{extensionality_witness, object_named, objects};
use reldoc::monad::{check_monad, DoctrineMonad, PowersetMonad, PresentedMonad};
use reldoc::quotients::{crisp_equivalence, quotient_arrow};
use reldoc::relprops::{
    check_arrow_characterizations, check_discreteness, check_sruc_iff_ruc_and_extensional, find_ruc_counterexample,
    profile,
};
use reldoc::topology::{compactify, tspaces};
use reldoc::builtins::ValuedDoctrine;
use reldoc::{check_doctrine_laws, check_quantale_laws, is_lean, Doctrine, Error, LawReport, Limits, Matrix, ObjId, Result};
use serde_json::{json, Value};

pub struct Outcome {
    pub report: Value,
    /// A law failed or a counterexample was found.
    pub flagged: bool,
}

fn to_value<T: serde::Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("reports serialize")
}

pub fn laws<D: Doctrine>(d: &D, limits: &Limits) -> Result<(Value, bool)> {
    let mut out = serde_json::Map::new();
    let mut clean = true;
    if let Some(q) = d.value_quantale() {
        let r = check_quantale_laws(q);
        clean &= r.is_clean();
        out.insert("quantale".into(), to_value(&r));
    }
    let r = check_doctrine_laws(d, limits)?;
    clean &= r.is_clean();
    out.insert("doctrine".into(), to_value(&r));
    Ok((Value::Object(out), clean))
}

/// Tower levels above this many points are left out of the doctrine laws.
const TOWER_LAW_POINTS: usize = 16;
/// Instances per law on the tower, where every relation is a 16×16 matrix.
const TOWER_LAW_BUDGET: u64 = 1 << 16;

/// Doctrine laws on the lower tower levels of the powerset presentation.
pub fn tower_laws(m: &PowersetMonad, limits: &Limits) -> Result<(Value, bool)> {
    let d = m.doctrine();
    let (keep, left_out): (Vec<ObjId>, Vec<ObjId>) = objects(d).partition(|&x| d.object(x).size <= TOWER_LAW_POINTS);
    let budget = limits.budget.min(TOWER_LAW_BUDGET);
    let (mut report, clean) = laws(&Restricted::new(d.clone(), keep), &Limits { budget, ..*limits })?;
    let skipped: Vec<String> = left_out
        .iter()
        .map(|&x| format!("{} has {} points, above {TOWER_LAW_POINTS}", d.object_name(x), d.object(x).size))
        .collect();
    report["left_out"] = json!(skipped);
    report["budget"] = json!(budget);
    Ok((report, clean))
}

pub fn monad_laws<M: DoctrineMonad>(m: &M, limits: &Limits) -> Result<(Value, bool)> {
    let r: LawReport = check_monad(m, limits)?;
    Ok((json!({ "name": m.name(), "report": r }), r.is_clean()))
}

pub fn analyze<D: Doctrine>(d: &D, limits: &Limits) -> Result<Outcome> {
    let mut objs = Vec::new();
    for y in objects(d) {
        let agreement = check_sruc_iff_ruc_and_extensional(d, y)?;
        objs.push(json!({
            "name": d.object_name(y),
            "cauchy_complete": agreement.complete,
            "strongly_cauchy_complete": agreement.strong,
            "extensional": extensionality_witness(d, y)?.is_none(),
            "sruc_iff_ruc_and_extensional": agreement.agree,
        }));
    }
    let mut profiles = Vec::new();
    for x in objects(d) {
        for y in objects(d) {
            for a in d.fibre(x, y)?.iter() {
                profiles.push(to_value(&profile(d, x, y, a)?.record(d, x, y, a)));
            }
        }
    }
    let discreteness = check_discreteness(d, limits)?;
    let arrows = check_arrow_characterizations(d, limits)?;
    let flagged = !discreteness.is_clean() || !arrows.is_clean();
    let mut report = json!({
        "objects": objs,
        "profiles": profiles,
        "discreteness": discreteness,
        "arrow_characterizations": arrows,
    });
    if let Some(q) = d.value_quantale().filter(|q| q.is_affine()) {
        report["lean"] = to_value(&is_lean(q)?);
    }
    Ok(Outcome { report, flagged })
}

pub fn complete<D: Doctrine>(d: D, limits: &Limits) -> Result<Outcome> {
    let map = map_category(&d)?;
    let mut homs = Vec::new();
    for x in objects(&d) {
        for y in objects(&d) {
            homs.push(json!({
                "source": d.object_name(x),
                "target": d.object_name(y),
                "arrows": d.hom(x, y)?.len(),
                "maps": map.hom(x, y).len(),
            }));
        }
    }
    let map_laws = map.check(&d);
    let before = check_sruc_section(&d)?;
    let r = ruc_doctrine(d);
    let strong: Vec<String> = strongly_complete_objects(&r)?.into_iter().map(|y| r.object_name(y)).collect();
    let after = check_sruc_section(&r)?;
    let ruc_laws = check_doctrine_laws(&r, limits)?;
    let flagged = !map_laws.is_clean() || !after.all() || !ruc_laws.is_clean() || strong.len() != r.object_count();
    let report = json!({
        "maps": { "arrows": map.arrow_count(), "homs": homs, "laws": map_laws },
        "section": before,
        "ruc": { "strongly_complete": strong, "section": after, "laws": ruc_laws },
    });
    Ok(Outcome { report, flagged })
}

pub fn singletons<D: Doctrine + Clone>(d: &D) -> Result<Outcome> {
    let s = find_singletons(d)?;
    let witnesses: Vec<Value> = s
        .witnesses
        .iter()
        .enumerate()
        .map(|(a, w)| match w {
            Some(w) => to_value(&w.record(d)),
            None => json!({ "object": d.object_name(a), "singleton": null }),
        })
        .collect();
    let reflector = if s.is_total() { Some(cauchy_reflector(d, &s)?) } else { None };
    let agreement = check_reflection_agreement(d)?;
    let flagged = !agreement.agree() || reflector.as_ref().is_some_and(|r| !r.holds());
    let report = json!({
        "witnesses": witnesses,
        "total": s.is_total(),
        "fully_faithful": s.fully_faithful,
        "reflector": reflector,
        "agreement": agreement,
        "agree": agreement.agree(),
    });
    Ok(Outcome { report, flagged })
}

pub fn counterexample<D: Doctrine>(d: &D, strong: bool) -> Result<Outcome> {
    Ok(match find_ruc_counterexample(d, strong)? {
        Some((y, w)) => Outcome {
            report: json!({ "strong": strong, "witness": w.record(d, y) }),
            flagged: true,
        },
        None => Outcome {
            report: json!({ "strong": strong, "witness": "none" }),
            flagged: false,
        },
    })
}

/// A relation given as a JSON matrix of quantale element names.
pub fn parse_matrix(d: &ValuedDoctrine, text: &str) -> Result<Matrix> {
    let rows: Vec<Vec<String>> =
        serde_json::from_str(text).map_err(|e| Error::structural(format!("relation: {e}")))?;
    Matrix::from_names(&rows, d.quantale()).map_err(|e| Error::structural(format!("relation: {e}")))
}

/// Pairs `i-j` of point indices, e.g. `0-1,2-3`.
pub fn parse_pairs(text: &str) -> Result<Vec<(usize, usize)>> {
    text.split(',')
        .filter(|s| !s.trim().is_empty())
        .map(|p| {
            let bad = || Error::InvalidParameter(format!("pair {p:?} is not i-j"));
            let (a, b) = p.trim().split_once('-').ok_or_else(bad)?;
            Ok((a.parse().map_err(|_| bad())?, b.parse().map_err(|_| bad())?))
        })
        .collect()
}

pub enum RelationArg<'a> {
    Matrix(&'a str),
    Pairs(&'a str),
}

pub fn quotient(d: &ValuedDoctrine, object: &str, rel: RelationArg) -> Result<Outcome> {
    let x = object_named(d, object)?;
    let n = d.object(x).size;
    let rho = match rel {
        RelationArg::Matrix(text) => parse_matrix(d, text)?,
        RelationArg::Pairs(text) => {
            let pairs = parse_pairs(text)?;
            if let Some(&(i, j)) = pairs.iter().find(|&&(i, j)| i >= n || j >= n) {
                return Err(Error::InvalidParameter(format!("pair {i}-{j} is outside {object}")));
            }
            crisp_equivalence(d.quantale(), n, &pairs)
        }
    };
    if !d.contains(x, x, &rho) {
        return Err(Error::TypeMismatch(format!("not a relation in R({object},{object})")));
    }
    let q = quotient_arrow(d, x, &rho)?;
    Ok(Outcome {
        flagged: !q.holds(),
        report: to_value(&q.record(&rho)),
    })
}

pub fn compactify_one<M: PresentedMonad>(m: &M, object: &str, phi: Option<&str>) -> Result<Outcome> {
    let d = m.doctrine();
    let x = object_named(d, object)?;
    let spaces: Vec<Matrix> = match phi {
        Some(text) => vec![parse_matrix(d, text)?],
        None => tspaces(m, x)?,
    };
    let mut records = Vec::new();
    let mut flagged = false;
    for phi in &spaces {
        let c = compactify(m, x, phi)?;
        flagged |= !c.holds();
        records.push(to_value(&c.record(m)));
    }
    Ok(Outcome {
        report: json!({ "monad": m.name(), "compactifications": records }),
        flagged,
    })
}
