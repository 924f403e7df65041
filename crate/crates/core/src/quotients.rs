//! Equivalence relations and their quotient arrows.
//!
//! A quotient arrow of an equivalence ρ on X is q: X → W with
//! ρ ⊑ gr q ; gr q° through which every f with ρ ⊑ gr f ; gr f° factors
//! uniquely. [`check_quotient_arrow`] verifies this against every presented
//! target; [`quotient_arrow`] builds one for the builtin matrix doctrines.

use crate::builtins::{Flavor, MapArrow, ValuedDoctrine, ValuedObject};
use crate::doctrine::{objects, Doctrine, ObjId};
use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::quantale::Quantale;
use serde::{Deserialize, Serialize};
use std::collections::HashMap;
use std::fmt;

const KEEP_FAILURES: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Axiom {
    Reflexive,
    Symmetric,
    Transitive,
}

impl fmt::Display for Axiom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Axiom::Reflexive => "reflexive",
            Axiom::Symmetric => "symmetric",
            Axiom::Transitive => "transitive",
        })
    }
}

/// The first equivalence axiom `rho` violates, if any.
pub fn equivalence_failure<D: Doctrine>(d: &D, x: ObjId, rho: &D::Rel) -> Option<Axiom> {
    if !d.leq(x, x, &d.diag(x), rho) {
        Some(Axiom::Reflexive)
    } else if !d.leq(x, x, &d.conv(x, x, rho), rho) {
        Some(Axiom::Symmetric)
    } else if !d.leq(x, x, &d.comp(x, x, x, rho, rho), rho) {
        Some(Axiom::Transitive)
    } else {
        None
    }
}

pub fn is_equivalence<D: Doctrine>(d: &D, x: ObjId, rho: &D::Rel) -> bool {
    equivalence_failure(d, x, rho).is_none()
}

/// A relation known to be an equivalence.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct REquivalence<R> {
    pub object: ObjId,
    pub rel: R,
}

impl<R> REquivalence<R> {
    pub fn new<D: Doctrine<Rel = R>>(d: &D, x: ObjId, rel: R) -> Result<Self> {
        if !d.contains(x, x, &rel) {
            return Err(Error::TypeMismatch(format!("{} is not in R({},{})", d.rel_name(x, x, &rel), d.object_name(x), d.object_name(x))));
        }
        match equivalence_failure(d, x, &rel) {
            Some(axiom) => Err(Error::Precondition(format!("{} is not {axiom}", d.rel_name(x, x, &rel)))),
            None => Ok(REquivalence { object: x, rel }),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FactorizationFailure {
    pub arrow: String,
    pub factorizations: usize,
}

/// Outcome of checking the universal property of a candidate quotient arrow.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct QuotientVerification {
    /// ρ ⊑ gr q ; gr q°.
    pub covers: bool,
    /// Arrows f out of X with ρ ⊑ gr f ; gr f°.
    pub candidates: usize,
    /// Candidates without exactly one factorization (first few).
    pub failures: Vec<FactorizationFailure>,
    pub failure_count: usize,
    /// Targets whose hom-sets could not be enumerated.
    pub skipped: Vec<String>,
}

impl QuotientVerification {
    pub fn holds(&self) -> bool {
        self.covers && self.failure_count == 0
    }
}

/// Checks that `q` is a quotient arrow of `rho` against every presented
/// target whose hom-sets can be enumerated.
pub fn check_quotient_arrow<D: Doctrine>(d: &D, rho: &D::Rel, q: &D::Arrow) -> Result<QuotientVerification> {
    let (x, w) = (d.src(q), d.tgt(q));
    let kernel = |f: &D::Arrow| d.kernel(f);
    let mut out = QuotientVerification {
        covers: d.leq(x, x, rho, &kernel(q)),
        ..QuotientVerification::default()
    };
    for z in objects(d) {
        let (from_x, from_w) = match (d.hom(x, z), d.hom(w, z)) {
            (Ok(a), Ok(b)) => (a, b),
            (Err(Error::CapExceeded { .. }), _) | (_, Err(Error::CapExceeded { .. })) => {
                out.skipped.push(d.object_name(z));
                continue;
            }
            (Err(e), _) | (_, Err(e)) => return Err(e),
        };
        let mut through: HashMap<D::Arrow, usize> = HashMap::new();
        for h in from_w.iter() {
            *through.entry(d.compose(q, h)).or_insert(0) += 1;
        }
        for f in from_x.iter() {
            if !d.leq(x, x, rho, &kernel(f)) {
                continue;
            }
            out.candidates += 1;
            let found = through.get(f).copied().unwrap_or(0);
            if found != 1 {
                out.failure_count += 1;
                if out.failures.len() < KEEP_FAILURES {
                    out.failures.push(FactorizationFailure {
                        arrow: d.arrow_name(f),
                        factorizations: found,
                    });
                }
            }
        }
    }
    Ok(out)
}

/// An entry where two relations differ.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EntryWitness {
    pub row: usize,
    pub col: usize,
    pub expected: String,
    pub found: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Flavors {
    /// ρ = gr q ; gr q°.
    pub effective: bool,
    /// d_W = gr q° ; gr q.
    pub surjective: bool,
    pub effective_witness: Option<EntryWitness>,
    pub surjective_witness: Option<EntryWitness>,
}

fn difference<D: Doctrine>(d: &D, x: ObjId, y: ObjId, expected: &D::Rel, found: &D::Rel) -> Option<EntryWitness> {
    if expected == found {
        return None;
    }
    let (Some(q), Some(a), Some(b)) = (d.value_quantale(), d.rel_values(x, y, expected), d.rel_values(x, y, found)) else {
        return Some(EntryWitness {
            row: 0,
            col: 0,
            expected: d.rel_name(x, y, expected),
            found: d.rel_name(x, y, found),
        });
    };
    (0..a.rows())
        .flat_map(|i| (0..a.cols()).map(move |j| (i, j)))
        .find(|&(i, j)| a.get(i, j) != b.get(i, j))
        .map(|(i, j)| EntryWitness {
            row: i,
            col: j,
            expected: q.name(a.get(i, j)).to_string(),
            found: q.name(b.get(i, j)).to_string(),
        })
}

pub fn check_quotient_flavors<D: Doctrine>(d: &D, rho: &D::Rel, q: &D::Arrow) -> Flavors {
    let (x, w) = (d.src(q), d.tgt(q));
    let g = d.graph(q);
    let gc = d.conv(x, w, &g);
    let kernel = d.comp(x, w, x, &g, &gc);
    let image = d.comp(w, x, w, &gc, &g);
    let effective_witness = difference(d, x, x, rho, &kernel);
    let surjective_witness = difference(d, w, w, &d.diag(w), &image);
    Flavors {
        effective: effective_witness.is_none(),
        surjective: surjective_witness.is_none(),
        effective_witness,
        surjective_witness,
    }
}

/// How the quotient object is built from ρ.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Recipe {
    /// Crisp set of classes of the equivalence closure of ρ ≠ ⊥.
    Support,
    /// Classes of ρ ⊒ e, with the distance of classes the join of ρ over
    /// representatives.
    Separated,
    /// The points of X with ρ as distance; q is the identity map.
    Carrier,
}

/// A quotient object and projection, before it is placed in a presentation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QuotientPlan {
    pub recipe: Recipe,
    pub object: ValuedObject,
    pub map: Vec<u32>,
    pub classes: Vec<Vec<usize>>,
}

fn classes_of(n: usize, related: impl Fn(usize, usize) -> bool) -> (Vec<u32>, Vec<Vec<usize>>) {
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(p: &mut [usize], i: usize) -> usize {
        let mut r = i;
        while p[r] != r {
            r = p[r];
        }
        p[i] = r;
        r
    }
    for i in 0..n {
        for j in 0..n {
            if related(i, j) {
                let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                parent[a.max(b)] = a.min(b);
            }
        }
    }
    let mut map = vec![0u32; n];
    let mut classes: Vec<Vec<usize>> = Vec::new();
    let mut index = vec![usize::MAX; n];
    for i in 0..n {
        let r = find(&mut parent, i);
        if index[r] == usize::MAX {
            index[r] = classes.len();
            classes.push(Vec::new());
        }
        classes[index[r]].push(i);
        map[i] = index[r] as u32;
    }
    (map, classes)
}

fn class_names(obj: &ValuedObject, classes: &[Vec<usize>]) -> Vec<String> {
    classes
        .iter()
        .map(|c| {
            let names: Vec<String> = c.iter().map(|&i| obj.point_name(i)).collect();
            format!("{{{}}}", names.join(" "))
        })
        .collect()
}

fn plan_from_classes(d: &ValuedDoctrine, x: ObjId, rho: &Matrix, recipe: Recipe, map: Vec<u32>, classes: Vec<Vec<usize>>) -> QuotientPlan {
    let q = d.quantale();
    let src = d.object(x);
    let dist = match recipe {
        Recipe::Support => None,
        _ => Some(Matrix::from_fn(classes.len(), classes.len(), |a, b| {
            q.join_all(classes[a].iter().flat_map(|&i| classes[b].iter().map(move |&j| rho.get(i, j))))
        })),
    };
    QuotientPlan {
        recipe,
        object: ValuedObject {
            name: format!("{}/{}", src.name, classes.len()),
            size: classes.len(),
            point_names: Some(class_names(src, &classes)),
            dist,
            extent: None,
        },
        map,
        classes,
    }
}

/// Candidate quotients of an equivalence, in order of preference.
pub fn quotient_plans(d: &ValuedDoctrine, x: ObjId, rho: &Matrix) -> Result<Vec<QuotientPlan>> {
    REquivalence::new(d, x, rho.clone())?;
    let q = d.quantale();
    let n = d.object(x).size;
    match d.flavor() {
        Flavor::Rel => {
            let (map, classes) = classes_of(n, |i, j| rho.get(i, j) != q.bottom());
            Ok(vec![plan_from_classes(d, x, rho, Recipe::Support, map, classes)])
        }
        Flavor::Metric => {
            let e = q.unit();
            let (map, classes) = classes_of(n, |i, j| q.leq(e, rho.get(i, j)) && q.leq(e, rho.get(j, i)));
            let merged = plan_from_classes(d, x, rho, Recipe::Separated, map, classes);
            let singletons: Vec<Vec<usize>> = (0..n).map(|i| vec![i]).collect();
            let carrier = plan_from_classes(d, x, rho, Recipe::Carrier, (0..n as u32).collect(), singletons);
            if merged.classes.len() == n {
                Ok(vec![carrier])
            } else {
                Ok(vec![merged, carrier])
            }
        }
        Flavor::Walters => Err(Error::Unsupported("no quotient recipe for Walters bimodules".into())),
    }
}

/// A quotient arrow placed in a presentation, with its verification.
#[derive(Debug, Clone)]
pub struct Quotient {
    /// The presentation containing W; differs from the input when extended.
    pub doctrine: ValuedDoctrine,
    pub source: ObjId,
    pub object: ObjId,
    pub arrow: MapArrow,
    pub recipe: Recipe,
    pub classes: Vec<Vec<usize>>,
    pub extended: bool,
    pub verification: QuotientVerification,
    pub flavors: Flavors,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct QuotientRecord {
    pub source: String,
    pub relation: String,
    pub object: String,
    pub arrow: String,
    pub recipe: Recipe,
    pub classes: Vec<Vec<String>>,
    pub distance: Option<Vec<Vec<String>>>,
    pub extended: bool,
    pub verification: QuotientVerification,
    pub flavors: Flavors,
}

impl Quotient {
    pub fn holds(&self) -> bool {
        self.verification.holds()
    }

    pub fn record(&self, rho: &Matrix) -> QuotientRecord {
        let d = &self.doctrine;
        let src = d.object(self.source);
        QuotientRecord {
            source: src.name.clone(),
            relation: rho.label(d.quantale()),
            object: d.object_name(self.object),
            arrow: d.arrow_name(&self.arrow),
            recipe: self.recipe,
            classes: self.classes.iter().map(|c| c.iter().map(|&i| src.point_name(i)).collect()).collect(),
            distance: d.object(self.object).dist.as_ref().map(|m| m.to_names(d.quantale())),
            extended: self.extended,
            verification: self.verification.clone(),
            flavors: self.flavors.clone(),
        }
    }
}

pub(crate) fn fresh_name(d: &ValuedDoctrine, base: &str) -> String {
    let mut name = base.to_string();
    while d.objects().iter().any(|o| o.name == name) {
        name.push('\'');
    }
    name
}

/// Finds or adds the object of `plan`, returning the presentation, W and q.
/// Over a restricted base the maps induced out of W are added as generators.
pub fn realize_plan(d: &ValuedDoctrine, x: ObjId, rho: &Matrix, plan: &QuotientPlan) -> Result<(ValuedDoctrine, ObjId, MapArrow, bool)> {
    let q = d.quantale();
    let existing = d.objects().iter().position(|o| o.same_structure(&plan.object, q));
    let (mut out, w, mut extended) = match existing {
        Some(w) => (d.clone(), w, false),
        None => {
            let mut obj = plan.object.clone();
            obj.name = fresh_name(d, &obj.name);
            let (grown, w) = d.with_object(obj)?;
            (grown, w, true)
        }
    };
    let arrow = MapArrow::new(x, w, plan.map.clone());
    if !out.is_base_arrow(&arrow) {
        return Err(Error::Precondition(format!("projection {} is not a base arrow", out.arrow_name(&arrow))));
    }
    if let Some(mut generators) = out.listed_arrows() {
        let before = generators.len();
        if !generators.contains(&arrow) {
            generators.push(arrow.clone());
        }
        for z in objects(&out) {
            for f in out.hom(x, z)?.iter() {
                let g = out.graph(f);
                if !rho.leq(&g.compose(&g.transpose(), q), q) {
                    continue;
                }
                let mut h = vec![u32::MAX; plan.object.size];
                let consistent = (0..plan.map.len()).all(|i| {
                    let slot = &mut h[plan.map[i] as usize];
                    let ok = *slot == u32::MAX || *slot == f.map[i];
                    *slot = f.map[i];
                    ok
                });
                let h = MapArrow::new(w, z, h);
                if consistent && !h.map.contains(&u32::MAX) && out.is_base_arrow(&h) && !generators.contains(&h) {
                    generators.push(h);
                }
            }
        }
        if generators.len() > before {
            out = out.with_generators(&generators)?;
            extended = true;
        }
    }
    Ok((out, w, arrow, extended))
}

/// Builds a quotient arrow of `rho` and verifies it on the presentation.
/// When no candidate recipe verifies, the last attempt is returned so the
/// failure can be reported.
pub fn quotient_arrow(d: &ValuedDoctrine, x: ObjId, rho: &Matrix) -> Result<Quotient> {
    let plans = quotient_plans(d, x, rho)?;
    let mut last = None;
    for plan in plans {
        let (doctrine, w, arrow, extended) = realize_plan(d, x, rho, &plan)?;
        let verification = check_quotient_arrow(&doctrine, rho, &arrow)?;
        let flavors = check_quotient_flavors(&doctrine, rho, &arrow);
        let quotient = Quotient {
            doctrine,
            source: x,
            object: w,
            arrow,
            recipe: plan.recipe,
            classes: plan.classes,
            extended,
            verification,
            flavors,
        };
        if quotient.holds() {
            return Ok(quotient);
        }
        last = Some(quotient);
    }
    Ok(last.expect("at least one quotient recipe"))
}

/// The relation with value `e` on the given pairs and their converses and
/// diagonal, `⊥` elsewhere.
pub fn crisp_equivalence(q: &Quantale, n: usize, pairs: &[(usize, usize)]) -> Matrix {
    let (map, _) = classes_of(n, |i, j| i == j || pairs.contains(&(i, j)) || pairs.contains(&(j, i)));
    Matrix::from_fn(n, n, |i, j| if map[i] == map[j] { q.unit() } else { q.bottom() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::builtins::{make_vcat_doctrine, make_vrel_doctrine, VCategory, VCategoryJson};
    use crate::doctrine::Limits;
    use crate::quantale::{builtin_quantale, QuantaleKind};

    fn boolean() -> Quantale {
        builtin_quantale(QuantaleKind::Boolean).unwrap()
    }

    fn tropical() -> Quantale {
        builtin_quantale(QuantaleKind::TropicalGrid { step: 1.0, cap: 2.0 }).unwrap()
    }

    fn cat(q: &Quantale, points: &[&str], dist: &[&[&str]]) -> VCategory {
        let j = VCategoryJson {
            name: None,
            points: points.iter().map(|s| s.to_string()).collect(),
            dist: dist.iter().map(|r| r.iter().map(|s| s.to_string()).collect()).collect(),
            extent: None,
        };
        VCategory::from_json(&j, q).unwrap()
    }

    fn named(q: &Quantale, rows: &[&[&str]]) -> Matrix {
        let rows: Vec<Vec<String>> = rows.iter().map(|r| r.iter().map(|s| s.to_string()).collect()).collect();
        Matrix::from_names(&rows, q).unwrap()
    }

    #[test]
    fn equivalence_axioms() {
        let b = boolean();
        let d = make_vrel_doctrine(&b, &[2], true, &Limits::default()).unwrap();
        assert!(is_equivalence(&d, 0, &d.diag(0)));
        assert!(is_equivalence(&d, 0, &Matrix::filled(2, 2, 1)));
        let one_pair = Matrix::new(2, 2, vec![0, 1, 0, 0]);
        assert_eq!(equivalence_failure(&d, 0, &one_pair), Some(Axiom::Reflexive));
        let not_symmetric = Matrix::new(2, 2, vec![1, 1, 0, 1]);
        assert_eq!(equivalence_failure(&d, 0, &not_symmetric), Some(Axiom::Symmetric));
        assert!(REquivalence::new(&d, 0, one_pair).is_err());
    }

    #[test]
    fn diagonal_quotient_is_the_identity() {
        let b = boolean();
        let d = make_vrel_doctrine(&b, &[1, 2], true, &Limits::default()).unwrap();
        let q = quotient_arrow(&d, 1, &d.diag(1)).unwrap();
        assert!(q.holds(), "{:?}", q.verification);
        assert_eq!(q.object, 1);
        assert_eq!(&*q.arrow.map, &[0, 1]);
        assert!(!q.extended);
        assert!(q.flavors.effective && q.flavors.surjective);
    }

    #[test]
    fn full_relation_collapses_to_a_point() {
        let b = boolean();
        let d = make_vrel_doctrine(&b, &[1, 2], true, &Limits::default()).unwrap();
        let q = quotient_arrow(&d, 1, &Matrix::filled(2, 2, 1)).unwrap();
        assert!(q.holds());
        assert_eq!(q.object, 0);
        assert_eq!(q.classes, vec![vec![0, 1]]);
        // Both constant maps into X1 factor through the point.
        assert_eq!(q.verification.candidates, 3);
        assert!(q.flavors.effective && q.flavors.surjective);

        let lone = make_vrel_doctrine(&b, &[2], true, &Limits::default()).unwrap();
        let q = quotient_arrow(&lone, 0, &Matrix::filled(2, 2, 1)).unwrap();
        assert!(q.extended && q.holds());
        assert_eq!(q.doctrine.object(q.object).size, 1);
    }

    #[test]
    fn restricted_base_gains_induced_maps() {
        let b = boolean();
        let d = make_vrel_doctrine(&b, &[3], false, &Limits::default()).unwrap();
        let rho = crisp_equivalence(&b, 3, &[(0, 1)]);
        let q = quotient_arrow(&d, 0, &rho).unwrap();
        assert!(q.extended && q.holds(), "{:?}", q.verification);
        assert_eq!(q.classes, vec![vec![0, 1], vec![2]]);
    }

    #[test]
    fn support_closure_merges_across_meets() {
        let h = builtin_quantale(QuantaleKind::PowersetFrame { n: 2 }).unwrap();
        let d = make_vrel_doctrine(&h, &[3], true, &Limits::default()).unwrap();
        let rho = named(&h, &[&["{a,b}", "{a}", "{}"], &["{a}", "{a,b}", "{b}"], &["{}", "{b}", "{a,b}"]]);
        assert_eq!(equivalence_failure(&d, 0, &rho), None);
        let q = quotient_arrow(&d, 0, &rho).unwrap();
        assert_eq!(q.classes, vec![vec![0, 1, 2]]);
        assert!(q.holds());
        // Kernel of q is the top relation, strictly above ρ.
        let w = q.flavors.effective_witness.clone().unwrap();
        assert_eq!((w.row, w.col, w.expected.as_str(), w.found.as_str()), (0, 1, "{a}", "{a,b}"));
    }

    #[test]
    fn tropical_pair_at_distance_zero_merges() {
        let t = tropical();
        let x = cat(&t, &["p", "q", "r"], &[&["0", "1", "2"], &["1", "0", "1"], &["2", "1", "0"]]);
        let d = make_vcat_doctrine(&t, &[x], &Limits::default()).unwrap();
        let rho = named(&t, &[&["0", "0", "1"], &["0", "0", "1"], &["1", "1", "0"]]);
        let q = quotient_arrow(&d, 0, &rho).unwrap();
        assert_eq!(q.recipe, Recipe::Separated);
        assert!(q.holds(), "{:?}", q.verification);
        assert_eq!(q.classes, vec![vec![0, 1], vec![2]]);
        assert_eq!(q.doctrine.object(q.object).dist.as_ref().unwrap().to_names(&t), vec![vec!["0", "1"], vec!["1", "0"]]);
        assert!(q.flavors.effective && q.flavors.surjective);
    }

    #[test]
    fn merging_fails_against_a_non_separated_target() {
        let t = tropical();
        let x = cat(&t, &["p", "q"], &[&["0", "1"], &["1", "0"]]);
        let z = cat(&t, &["u", "v"], &[&["0", "0"], &["0", "0"]]);
        let d = make_vcat_doctrine(&t, &[x, z], &Limits::default()).unwrap();
        let rho = named(&t, &[&["0", "0"], &["0", "0"]]);
        let plans = quotient_plans(&d, 0, &rho).unwrap();
        assert_eq!(plans[0].recipe, Recipe::Separated);
        let (merged, _, arrow, _) = realize_plan(&d, 0, &rho, &plans[0]).unwrap();
        let v = check_quotient_arrow(&merged, &rho, &arrow).unwrap();
        assert!(v.covers && !v.holds());
        assert_eq!(v.failures[0].factorizations, 0);

        // The carrier recipe lands on Z itself and is universal.
        let q = quotient_arrow(&d, 0, &rho).unwrap();
        assert_eq!(q.recipe, Recipe::Carrier);
        assert_eq!(q.object, 1);
        assert!(q.holds() && q.flavors.effective && q.flavors.surjective);
    }

    #[test]
    fn graded_relation_is_not_effective_over_sets() {
        let t = tropical();
        let d = make_vrel_doctrine(&t, &[2], true, &Limits::default()).unwrap();
        let rho = named(&t, &[&["0", "1"], &["1", "0"]]);
        let q = quotient_arrow(&d, 0, &rho).unwrap();
        assert!(q.holds());
        assert!(!q.flavors.effective && q.flavors.surjective);
        let w = q.flavors.effective_witness.unwrap();
        assert_eq!((w.row, w.col, w.expected.as_str(), w.found.as_str()), (0, 1, "1", "0"));
    }

    #[test]
    fn walters_has_no_recipe() {
        let h = builtin_quantale(QuantaleKind::Chain { n: 2 }).unwrap();
        let x = VCategory {
            name: None,
            points: vec!["p".into()],
            dist: Matrix::new(1, 1, vec![1]),
            extent: Some(vec![1]),
        };
        let d = crate::builtins::make_walters_doctrine(&h, &[x], &Limits::default()).unwrap();
        assert!(matches!(quotient_arrow(&d, 0, &d.diag(0)), Err(Error::Unsupported(_))));
    }
}
