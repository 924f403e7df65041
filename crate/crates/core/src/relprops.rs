//! Properties of relations, tracking arrows, and Cauchy-completeness relative
//! to a finite presentation.

use crate::doctrine::{
    extensionality_witness, forall, left_adjoint_unchecked, objects, reindex_unchecked, Doctrine, Limits, ObjId,
    Populations,
};
use crate::error::{Error, Result};
use crate::report::LawReport;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::collections::HashMap;

/// `α°;α ⊑ d_Y`.
pub fn is_functional<D: Doctrine>(d: &D, x: ObjId, y: ObjId, a: &D::Rel) -> bool {
    let c = d.comp(y, x, y, &d.conv(x, y, a), a);
    d.leq(y, y, &c, &d.diag(y))
}

/// `d_X ⊑ α;α°`.
pub fn is_total<D: Doctrine>(d: &D, x: ObjId, y: ObjId, a: &D::Rel) -> bool {
    let c = d.comp(x, y, x, a, &d.conv(x, y, a));
    d.leq(x, x, &d.diag(x), &c)
}

/// `α;α° ⊑ d_X`.
pub fn is_injective<D: Doctrine>(d: &D, x: ObjId, y: ObjId, a: &D::Rel) -> bool {
    let c = d.comp(x, y, x, a, &d.conv(x, y, a));
    d.leq(x, x, &c, &d.diag(x))
}

/// `d_Y ⊑ α°;α`.
pub fn is_surjective<D: Doctrine>(d: &D, x: ObjId, y: ObjId, a: &D::Rel) -> bool {
    let c = d.comp(y, x, y, &d.conv(x, y, a), a);
    d.leq(y, y, &d.diag(y), &c)
}

pub fn is_functional_total<D: Doctrine>(d: &D, x: ObjId, y: ObjId, a: &D::Rel) -> bool {
    is_functional(d, x, y, a) && is_total(d, x, y, a)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PropertyProfile<A> {
    pub functional: bool,
    pub total: bool,
    pub injective: bool,
    pub surjective: bool,
    pub bijective: bool,
    pub tracking: Vec<A>,
}

/// Serializable form of a profile.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProfileRecord {
    pub source: String,
    pub target: String,
    pub relation: String,
    pub functional: bool,
    pub total: bool,
    pub injective: bool,
    pub surjective: bool,
    pub bijective: bool,
    pub tracking: Vec<String>,
}

impl<A> PropertyProfile<A> {
    pub fn record<D: Doctrine<Arrow = A>>(&self, d: &D, x: ObjId, y: ObjId, a: &D::Rel) -> ProfileRecord {
        ProfileRecord {
            source: d.object_name(x),
            target: d.object_name(y),
            relation: d.rel_name(x, y, a),
            functional: self.functional,
            total: self.total,
            injective: self.injective,
            surjective: self.surjective,
            bijective: self.bijective,
            tracking: self.tracking.iter().map(|f| d.arrow_name(f)).collect(),
        }
    }
}

pub fn profile<D: Doctrine>(d: &D, x: ObjId, y: ObjId, a: &D::Rel) -> Result<PropertyProfile<D::Arrow>> {
    let functional = is_functional(d, x, y, a);
    let total = is_total(d, x, y, a);
    let injective = is_injective(d, x, y, a);
    let surjective = is_surjective(d, x, y, a);
    Ok(PropertyProfile {
        functional,
        total,
        injective,
        surjective,
        bijective: functional && total && injective && surjective,
        tracking: tracking_arrows(d, x, y, a)?,
    })
}

/// Base arrows whose graph is `α`. For functional total `α` the search is
/// repeated with `gr f ⊑ α`, which must give the same arrows.
pub fn tracking_arrows<D: Doctrine>(d: &D, x: ObjId, y: ObjId, a: &D::Rel) -> Result<Vec<D::Arrow>> {
    let hom = d.hom(x, y)?;
    let exact: Vec<D::Arrow> = hom.iter().filter(|f| &d.graph(f) == a).cloned().collect();
    if is_functional_total(d, x, y, a) {
        let below: Vec<&D::Arrow> = hom.iter().filter(|f| d.leq(x, y, &d.graph(f), a)).collect();
        if below.len() != exact.len() || below.iter().zip(&exact).any(|(f, g)| *f != g) {
            return Err(Error::Precondition(format!(
                "tracking arrows of {} disagree between the equality and order tests",
                d.rel_name(x, y, a)
            )));
        }
    }
    Ok(exact)
}

/// A functional total relation into the object with no tracking arrow, or
/// with several when uniqueness was asked for.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CauchyWitness<A, R> {
    pub source: ObjId,
    pub relation: R,
    pub tracking: Vec<A>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CauchyWitnessRecord {
    pub object: String,
    pub source: String,
    pub relation: String,
    pub tracking: Vec<String>,
}

impl<A, R> CauchyWitness<A, R> {
    pub fn record<D: Doctrine<Arrow = A, Rel = R>>(&self, d: &D, y: ObjId) -> CauchyWitnessRecord {
        CauchyWitnessRecord {
            object: d.object_name(y),
            source: d.object_name(self.source),
            relation: d.rel_name(self.source, y, &self.relation),
            tracking: self.tracking.iter().map(|f| d.arrow_name(f)).collect(),
        }
    }
}

/// Scans every presented `X` and every functional total `α ∈ R(X,y)`.
/// `None` means `y` is (strongly, if asked) Cauchy-complete.
pub fn cauchy_witness<D: Doctrine>(
    d: &D,
    y: ObjId,
    strong: bool,
) -> Result<Option<CauchyWitness<D::Arrow, D::Rel>>> {
    for x in objects(d) {
        let hom = d.hom(x, y)?;
        let mut by_graph: HashMap<D::Rel, Vec<D::Arrow>> = HashMap::new();
        for f in hom.iter() {
            by_graph.entry(d.graph(f)).or_default().push(f.clone());
        }
        for a in d.fibre(x, y)?.iter() {
            if !is_functional_total(d, x, y, a) {
                continue;
            }
            let tracking = by_graph.get(a).cloned().unwrap_or_default();
            let below = hom.iter().filter(|f| d.leq(x, y, &d.graph(f), a)).count();
            if below != tracking.len() {
                return Err(Error::Precondition(format!(
                    "tracking arrows of {} disagree between the equality and order tests",
                    d.rel_name(x, y, a)
                )));
            }
            if tracking.is_empty() || (strong && tracking.len() > 1) {
                return Ok(Some(CauchyWitness {
                    source: x,
                    relation: a.clone(),
                    tracking,
                }));
            }
        }
    }
    Ok(None)
}

pub fn is_cauchy_complete<D: Doctrine>(d: &D, y: ObjId, strong: bool) -> Result<bool> {
    Ok(cauchy_witness(d, y, strong)?.is_none())
}

/// The first object failing Cauchy-completeness, with its witness.
pub fn find_ruc_counterexample<D: Doctrine>(
    d: &D,
    strong: bool,
) -> Result<Option<(ObjId, CauchyWitness<D::Arrow, D::Rel>)>> {
    for y in objects(d) {
        if let Some(w) = cauchy_witness(d, y, strong)? {
            return Ok(Some((y, w)));
        }
    }
    Ok(None)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SrucAgreement {
    pub strong: bool,
    pub complete: bool,
    pub extensional: bool,
    pub agree: bool,
}

/// Strong completeness against completeness plus extensionality.
pub fn check_sruc_iff_ruc_and_extensional<D: Doctrine>(d: &D, y: ObjId) -> Result<SrucAgreement> {
    let strong = is_cauchy_complete(d, y, true)?;
    let complete = is_cauchy_complete(d, y, false)?;
    let extensional = extensionality_witness(d, y)?.is_none();
    Ok(SrucAgreement {
        strong,
        complete,
        extensional,
        agree: strong == (complete && extensional),
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IsoCheck<A> {
    /// Source and target extensional, source Cauchy-complete.
    pub hypotheses: bool,
    pub bijective: bool,
    pub inverse: Option<A>,
    /// Whenever the hypotheses hold and the arrow is bijective an inverse
    /// exists, and a base isomorphism is always bijective.
    pub consistent: bool,
}

/// Checks that bijective arrows between suitable objects are isomorphisms,
/// and that isomorphisms are bijective.
pub fn bijective_implies_iso_check<D: Doctrine>(d: &D, f: &D::Arrow) -> Result<IsoCheck<D::Arrow>> {
    let (x, y) = (d.src(f), d.tgt(f));
    let hypotheses = extensionality_witness(d, x)?.is_none()
        && extensionality_witness(d, y)?.is_none()
        && is_cauchy_complete(d, x, false)?;
    let gr = d.graph(f);
    let bijective = is_injective(d, x, y, &gr) && is_surjective(d, x, y, &gr);
    let inverse = d
        .hom(y, x)?
        .iter()
        .find(|g| d.compose(f, g) == d.identity(x) && d.compose(g, f) == d.identity(y))
        .cloned();
    let consistent = (!(hypotheses && bijective) || inverse.is_some()) && (inverse.is_none() || bijective);
    Ok(IsoCheck {
        hypotheses,
        bijective,
        inverse,
        consistent,
    })
}

/// Among functional total relations of a fibre, the order is discrete.
pub fn check_discreteness<D: Doctrine>(d: &D, limits: &Limits) -> Result<LawReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(limits.seed);
    let pops = Populations::build(d, limits, &mut rng)?;
    let mut r = LawReport::default();
    let law = "functional total relations are discrete";
    for x in objects(d) {
        for y in objects(d) {
            let pop = pops.rel(x, y);
            let ft: Vec<&D::Rel> = pop.items.iter().filter(|a| is_functional_total(d, x, y, a)).collect();
            let (n, ex) = forall(&[ft.len(), ft.len()], limits.budget, &mut rng, |t| {
                let (a, b) = (ft[t[0]], ft[t[1]]);
                r.check(law, !d.leq(x, y, a, b) || a == b, || {
                    vec![d.rel_name(x, y, a), d.rel_name(x, y, b)]
                });
            });
            r.cover(law, n, ex && pop.complete);
        }
    }
    Ok(r)
}

/// For every arrow `f: A→X`: injective iff `R[f,f]∘E[f,f] = id`, surjective
/// iff `E[f,f]∘R[f,f] = id`, bijective iff `R[f,f]` is an order isomorphism.
pub fn check_arrow_characterizations<D: Doctrine>(d: &D, limits: &Limits) -> Result<LawReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(limits.seed);
    let pops = Populations::build(d, limits, &mut rng)?;
    let mut r = LawReport::default();
    for a in objects(d) {
        for x in objects(d) {
            let homs = pops.hom(a, x);
            for f in homs.items.iter() {
                let gr = d.graph(f);
                let inj = is_injective(d, a, x, &gr);
                let surj = is_surjective(d, a, x, &gr);
                let (src_pop, tgt_pop) = (pops.rel(a, a), pops.rel(x, x));
                let re_id = src_pop.items.iter().all(|b| {
                    reindex_unchecked(d, f, f, &left_adjoint_unchecked(d, f, f, b)) == *b
                });
                let er_id = tgt_pop.items.iter().all(|al| {
                    left_adjoint_unchecked(d, f, f, &reindex_unchecked(d, f, f, al)) == *al
                });
                let name = || vec![d.arrow_name(f)];
                r.check("injective iff R∘E is the identity", inj == re_id, name);
                r.check("surjective iff E∘R is the identity", surj == er_id, name);
                let complete = src_pop.complete && tgt_pop.complete;
                let iso = if complete {
                    is_bijection(d, f, &tgt_pop.items, &src_pop.items) && re_id && er_id
                } else {
                    re_id && er_id
                };
                r.check("bijective iff R is an order isomorphism", (inj && surj) == iso, name);
                let checked = (src_pop.items.len() + tgt_pop.items.len()) as u64;
                r.cover("injective iff R∘E is the identity", checked, complete && homs.complete);
                r.cover("surjective iff E∘R is the identity", checked, complete && homs.complete);
                r.cover("bijective iff R is an order isomorphism", checked, complete && homs.complete);
            }
        }
    }
    Ok(r)
}

/// `R[f,f]` is a bijection between the full fibres. Together with `E∘R` and
/// `R∘E` being identities this makes `E` its inverse, monotone as an adjoint.
fn is_bijection<D: Doctrine>(d: &D, f: &D::Arrow, tgt_fibre: &[D::Rel], src_fibre: &[D::Rel]) -> bool {
    if tgt_fibre.len() != src_fibre.len() {
        return false;
    }
    let image: std::collections::HashSet<D::Rel> = tgt_fibre.iter().map(|al| reindex_unchecked(d, f, f, al)).collect();
    image.len() == src_fibre.len()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::builtins::{make_vcat_doctrine, make_vrel_doctrine, VCategory, VCategoryJson};
    use crate::matrix::Matrix;
    use crate::quantale::{builtin_quantale, Quantale, QuantaleKind};

    fn boolean() -> Quantale {
        builtin_quantale(QuantaleKind::Boolean).unwrap()
    }

    fn powerset2() -> Quantale {
        builtin_quantale(QuantaleKind::PowersetFrame { n: 2 }).unwrap()
    }

    #[test]
    fn diagonal_profile() {
        let d = make_vrel_doctrine(&boolean(), &[2], true, &Limits::default()).unwrap();
        let p = profile(&d, 0, 0, &d.diag(0)).unwrap();
        assert!(p.functional && p.total && p.injective && p.surjective && p.bijective);
        assert_eq!(p.tracking, vec![d.identity(0)]);
    }

    #[test]
    fn graphs_are_functional_and_total_and_empty_is_not_total() {
        let b = boolean();
        let d = make_vrel_doctrine(&b, &[2, 3], true, &Limits::default()).unwrap();
        for f in d.hom(0, 1).unwrap().iter() {
            let p = profile(&d, 0, 1, &d.graph(f)).unwrap();
            assert!(p.functional && p.total);
            assert_eq!(p.tracking, vec![f.clone()]);
        }
        let empty = Matrix::filled(2, 3, 0);
        let p = profile(&d, 0, 1, &empty).unwrap();
        assert!(p.functional && !p.total);
    }

    #[test]
    fn boolean_rel_is_strongly_cauchy_complete() {
        let d = make_vrel_doctrine(&boolean(), &[1, 2, 3], true, &Limits::default()).unwrap();
        for y in 0..3 {
            assert!(is_cauchy_complete(&d, y, true).unwrap());
            let s = check_sruc_iff_ruc_and_extensional(&d, y).unwrap();
            assert_eq!(
                s,
                SrucAgreement { strong: true, complete: true, extensional: true, agree: true }
            );
        }
        assert!(find_ruc_counterexample(&d, true).unwrap().is_none());
    }

    #[test]
    fn powerset_frame_fails_unique_choice() {
        let h = powerset2();
        let d = make_vrel_doctrine(&h, &[1, 2], true, &Limits::default()).unwrap();
        let (y, w) = find_ruc_counterexample(&d, false).unwrap().unwrap();
        assert_eq!(y, 1);
        assert_eq!(w.source, 0);
        assert!(w.tracking.is_empty());
        let names = w.relation.to_names(&h);
        assert!(names == vec![vec!["{a}", "{b}"]] || names == vec![vec!["{b}", "{a}"]], "{names:?}");
    }

    #[test]
    fn non_separated_object_is_not_strongly_complete() {
        let t = builtin_quantale(QuantaleKind::TropicalGrid { step: 1.0, cap: 2.0 }).unwrap();
        let cat = |pts: &[&str], rows: &[&[&str]]| {
            VCategory::from_json(
                &VCategoryJson {
                    name: None,
                    points: pts.iter().map(|s| s.to_string()).collect(),
                    dist: rows.iter().map(|r| r.iter().map(|s| s.to_string()).collect()).collect(),
                    extent: None,
                },
                &t,
            )
            .unwrap()
        };
        let d = make_vcat_doctrine(
            &t,
            &[cat(&["o"], &[&["0"]]), cat(&["p", "q"], &[&["0", "0"], &["0", "0"]])],
            &Limits::default(),
        )
        .unwrap();
        let s = check_sruc_iff_ruc_and_extensional(&d, 1).unwrap();
        assert!(!s.strong && !s.extensional && s.agree);
    }

    #[test]
    fn bijections_have_inverses() {
        let d = make_vrel_doctrine(&boolean(), &[3], true, &Limits::default()).unwrap();
        for f in d.hom(0, 0).unwrap().iter() {
            let c = bijective_implies_iso_check(&d, f).unwrap();
            assert!(c.hypotheses && c.consistent);
            let is_perm = {
                let mut m = f.map.to_vec();
                m.sort();
                m == vec![0, 1, 2]
            };
            assert_eq!(c.bijective, is_perm);
            if let Some(g) = c.inverse {
                assert_eq!(d.compose(f, &g), d.identity(0));
            }
        }
    }

    #[test]
    fn discreteness_and_characterizations_hold() {
        let limits = Limits::default();
        for q in [boolean(), powerset2()] {
            let d = make_vrel_doctrine(&q, &[1, 2], true, &limits).unwrap();
            assert!(check_discreteness(&d, &limits).unwrap().is_clean());
            let r = check_arrow_characterizations(&d, &limits).unwrap();
            assert!(r.is_clean(), "{r:?}");
        }
    }
}
