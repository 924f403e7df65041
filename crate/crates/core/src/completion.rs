//! The category of functional total relations, the unique-choice completion,
//! singleton objects and the Cauchy reflector.

use crate::doctrine::{objects, Doctrine, ObjId};
use crate::error::{Error, Result};
use crate::relprops::{is_cauchy_complete, is_functional_total, is_injective, is_surjective};
use crate::report::LawReport;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::collections::HashMap;
use std::sync::{Arc, OnceLock};

/// `Map R`: the objects of the base, functional total relations as arrows.
#[derive(Debug, Clone)]
pub struct MapCategory<R> {
    pub objects: usize,
    homs: Vec<Vec<R>>,
}

impl<R: Clone + Eq + std::hash::Hash> MapCategory<R> {
    pub fn hom(&self, x: ObjId, y: ObjId) -> &[R] {
        &self.homs[x * self.objects + y]
    }

    pub fn arrow_count(&self) -> usize {
        self.homs.iter().map(Vec::len).sum()
    }

    /// Closure under composition, identities and associativity.
    pub fn check<D: Doctrine<Rel = R>>(&self, d: &D) -> LawReport {
        let mut r = LawReport::default();
        let n = self.objects;
        for x in 0..n {
            r.check("identity is functional and total", self.hom(x, x).contains(&d.diag(x)), || {
                vec![d.object_name(x)]
            });
            for y in 0..n {
                for z in 0..n {
                    let mut checked = 0;
                    for a in self.hom(x, y) {
                        for b in self.hom(y, z) {
                            checked += 1;
                            let c = d.comp(x, y, z, a, b);
                            r.check("composites are functional and total", self.hom(x, z).contains(&c), || {
                                vec![d.rel_name(x, y, a), d.rel_name(y, z, b)]
                            });
                        }
                    }
                    r.cover("composites are functional and total", checked, true);
                }
            }
        }
        for x in 0..n {
            for y in 0..n {
                for z in 0..n {
                    for w in 0..n {
                        let mut checked = 0;
                        for a in self.hom(x, y) {
                            for b in self.hom(y, z) {
                                let ab = d.comp(x, y, z, a, b);
                                for c in self.hom(z, w) {
                                    checked += 1;
                                    let left = d.comp(x, z, w, &ab, c);
                                    let right = d.comp(x, y, w, a, &d.comp(y, z, w, b, c));
                                    r.check("composition is associative", left == right, || {
                                        vec![d.rel_name(x, y, a), d.rel_name(y, z, b), d.rel_name(z, w, c)]
                                    });
                                }
                            }
                        }
                        r.cover("composition is associative", checked, true);
                    }
                }
            }
        }
        r
    }
}

fn functional_total<D: Doctrine>(d: &D, x: ObjId, y: ObjId) -> Result<Vec<D::Rel>> {
    Ok(d.fibre(x, y)?
        .iter()
        .filter(|a| is_functional_total(d, x, y, a))
        .cloned()
        .collect())
}

pub fn map_category<D: Doctrine>(d: &D) -> Result<MapCategory<D::Rel>> {
    let n = d.object_count();
    let mut homs = Vec::with_capacity(n * n);
    for x in 0..n {
        for y in 0..n {
            homs.push(functional_total(d, x, y)?);
        }
    }
    Ok(MapCategory { objects: n, homs })
}

/// An arrow of `Map R`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MapRel<R> {
    pub src: ObjId,
    pub tgt: ObjId,
    pub rel: R,
}

/// The doctrine `Ruc R` over `Map R`, with the fibres of `R`. Every arrow is
/// its own graph.
#[derive(Debug)]
pub struct Ruc<D: Doctrine> {
    pub inner: D,
    homs: Vec<OnceLock<Result<Arc<Vec<MapRel<D::Rel>>>>>>,
}

impl<D: Doctrine + Clone> Clone for Ruc<D> {
    fn clone(&self) -> Self {
        Ruc::new(self.inner.clone())
    }
}

impl<D: Doctrine> Ruc<D> {
    pub fn new(inner: D) -> Self {
        let n = inner.object_count();
        Ruc {
            inner,
            homs: (0..n * n).map(|_| OnceLock::new()).collect(),
        }
    }
}

pub fn ruc_doctrine<D: Doctrine>(d: D) -> Ruc<D> {
    Ruc::new(d)
}

impl<D: Doctrine> Doctrine for Ruc<D> {
    type Arrow = MapRel<D::Rel>;
    type Rel = D::Rel;

    fn object_count(&self) -> usize {
        self.inner.object_count()
    }
    fn object_name(&self, x: ObjId) -> String {
        self.inner.object_name(x)
    }
    fn hom(&self, x: ObjId, y: ObjId) -> Result<Arc<Vec<Self::Arrow>>> {
        let n = self.object_count();
        self.homs[x * n + y]
            .get_or_init(|| {
                let rels = functional_total(&self.inner, x, y)?;
                Ok(Arc::new(rels.into_iter().map(|rel| MapRel { src: x, tgt: y, rel }).collect()))
            })
            .clone()
    }
    fn src(&self, f: &Self::Arrow) -> ObjId {
        f.src
    }
    fn tgt(&self, f: &Self::Arrow) -> ObjId {
        f.tgt
    }
    fn compose(&self, f: &Self::Arrow, g: &Self::Arrow) -> Self::Arrow {
        MapRel {
            src: f.src,
            tgt: g.tgt,
            rel: self.inner.comp(f.src, f.tgt, g.tgt, &f.rel, &g.rel),
        }
    }
    fn identity(&self, x: ObjId) -> Self::Arrow {
        MapRel {
            src: x,
            tgt: x,
            rel: self.inner.diag(x),
        }
    }
    fn arrow_name(&self, f: &Self::Arrow) -> String {
        format!(
            "{}->{}{}",
            self.inner.object_name(f.src),
            self.inner.object_name(f.tgt),
            self.inner.rel_name(f.src, f.tgt, &f.rel)
        )
    }
    fn fibre(&self, x: ObjId, y: ObjId) -> Result<Arc<Vec<D::Rel>>> {
        self.inner.fibre(x, y)
    }
    fn contains(&self, x: ObjId, y: ObjId, a: &D::Rel) -> bool {
        self.inner.contains(x, y, a)
    }
    fn leq(&self, x: ObjId, y: ObjId, a: &D::Rel, b: &D::Rel) -> bool {
        self.inner.leq(x, y, a, b)
    }
    fn diag(&self, x: ObjId) -> D::Rel {
        self.inner.diag(x)
    }
    fn comp(&self, x: ObjId, y: ObjId, z: ObjId, a: &D::Rel, b: &D::Rel) -> D::Rel {
        self.inner.comp(x, y, z, a, b)
    }
    fn conv(&self, x: ObjId, y: ObjId, a: &D::Rel) -> D::Rel {
        self.inner.conv(x, y, a)
    }
    fn graph(&self, f: &Self::Arrow) -> D::Rel {
        f.rel.clone()
    }
    fn rel_name(&self, x: ObjId, y: ObjId, a: &D::Rel) -> String {
        self.inner.rel_name(x, y, a)
    }
    fn join(&self, x: ObjId, y: ObjId, a: &D::Rel, b: &D::Rel) -> Option<D::Rel> {
        self.inner.join(x, y, a, b)
    }
    fn bottom(&self, x: ObjId, y: ObjId) -> Option<D::Rel> {
        self.inner.bottom(x, y)
    }
    fn fibre_len(&self, x: ObjId, y: ObjId) -> Option<u128> {
        self.inner.fibre_len(x, y)
    }
    fn sample_rel(&self, x: ObjId, y: ObjId, rng: &mut ChaCha8Rng) -> Result<D::Rel> {
        self.inner.sample_rel(x, y, rng)
    }
    fn fibre_height(&self, x: ObjId, y: ObjId) -> Option<u64> {
        self.inner.fibre_height(x, y)
    }
    fn value_quantale(&self) -> Option<&crate::quantale::Quantale> {
        self.inner.value_quantale()
    }
    fn rel_values(&self, x: ObjId, y: ObjId, a: &D::Rel) -> Option<crate::matrix::Matrix> {
        self.inner.rel_values(x, y, a)
    }
}

/// The full subdoctrine on a subset of objects.
#[derive(Debug, Clone)]
pub struct Restricted<D> {
    pub inner: D,
    keep: Vec<ObjId>,
    position: Vec<Option<ObjId>>,
}

impl<D: Doctrine> Restricted<D> {
    pub fn new(inner: D, keep: Vec<ObjId>) -> Self {
        let mut position = vec![None; inner.object_count()];
        for (i, &x) in keep.iter().enumerate() {
            position[x] = Some(i);
        }
        Restricted { inner, keep, position }
    }

    pub fn kept(&self) -> &[ObjId] {
        &self.keep
    }

    fn pos(&self, x: ObjId) -> ObjId {
        self.position[x].expect("arrow leaves the restriction")
    }
}

impl<D: Doctrine> Doctrine for Restricted<D> {
    type Arrow = D::Arrow;
    type Rel = D::Rel;

    fn object_count(&self) -> usize {
        self.keep.len()
    }
    fn object_name(&self, x: ObjId) -> String {
        self.inner.object_name(self.keep[x])
    }
    fn hom(&self, x: ObjId, y: ObjId) -> Result<Arc<Vec<D::Arrow>>> {
        self.inner.hom(self.keep[x], self.keep[y])
    }
    fn src(&self, f: &D::Arrow) -> ObjId {
        self.pos(self.inner.src(f))
    }
    fn tgt(&self, f: &D::Arrow) -> ObjId {
        self.pos(self.inner.tgt(f))
    }
    fn compose(&self, f: &D::Arrow, g: &D::Arrow) -> D::Arrow {
        self.inner.compose(f, g)
    }
    fn identity(&self, x: ObjId) -> D::Arrow {
        self.inner.identity(self.keep[x])
    }
    fn arrow_name(&self, f: &D::Arrow) -> String {
        self.inner.arrow_name(f)
    }
    fn fibre(&self, x: ObjId, y: ObjId) -> Result<Arc<Vec<D::Rel>>> {
        self.inner.fibre(self.keep[x], self.keep[y])
    }
    fn contains(&self, x: ObjId, y: ObjId, a: &D::Rel) -> bool {
        self.inner.contains(self.keep[x], self.keep[y], a)
    }
    fn leq(&self, x: ObjId, y: ObjId, a: &D::Rel, b: &D::Rel) -> bool {
        self.inner.leq(self.keep[x], self.keep[y], a, b)
    }
    fn diag(&self, x: ObjId) -> D::Rel {
        self.inner.diag(self.keep[x])
    }
    fn comp(&self, x: ObjId, y: ObjId, z: ObjId, a: &D::Rel, b: &D::Rel) -> D::Rel {
        self.inner.comp(self.keep[x], self.keep[y], self.keep[z], a, b)
    }
    fn conv(&self, x: ObjId, y: ObjId, a: &D::Rel) -> D::Rel {
        self.inner.conv(self.keep[x], self.keep[y], a)
    }
    fn graph(&self, f: &D::Arrow) -> D::Rel {
        self.inner.graph(f)
    }
    fn kernel(&self, f: &D::Arrow) -> D::Rel {
        self.inner.kernel(f)
    }
    fn rel_name(&self, x: ObjId, y: ObjId, a: &D::Rel) -> String {
        self.inner.rel_name(self.keep[x], self.keep[y], a)
    }
    fn join(&self, x: ObjId, y: ObjId, a: &D::Rel, b: &D::Rel) -> Option<D::Rel> {
        self.inner.join(self.keep[x], self.keep[y], a, b)
    }
    fn bottom(&self, x: ObjId, y: ObjId) -> Option<D::Rel> {
        self.inner.bottom(self.keep[x], self.keep[y])
    }
    fn fibre_len(&self, x: ObjId, y: ObjId) -> Option<u128> {
        self.inner.fibre_len(self.keep[x], self.keep[y])
    }
    fn sample_rel(&self, x: ObjId, y: ObjId, rng: &mut ChaCha8Rng) -> Result<D::Rel> {
        self.inner.sample_rel(self.keep[x], self.keep[y], rng)
    }
    fn sample_arrow(&self, x: ObjId, y: ObjId, rng: &mut ChaCha8Rng) -> Result<Option<D::Arrow>> {
        self.inner.sample_arrow(self.keep[x], self.keep[y], rng)
    }
    fn fibre_height(&self, x: ObjId, y: ObjId) -> Option<u64> {
        self.inner.fibre_height(self.keep[x], self.keep[y])
    }
    fn value_quantale(&self) -> Option<&crate::quantale::Quantale> {
        self.inner.value_quantale()
    }
    fn rel_values(&self, x: ObjId, y: ObjId, a: &D::Rel) -> Option<crate::matrix::Matrix> {
        self.inner.rel_values(self.keep[x], self.keep[y], a)
    }
}

/// Objects that are strongly Cauchy-complete relative to the presentation.
pub fn strongly_complete_objects<D: Doctrine>(d: &D) -> Result<Vec<ObjId>> {
    let mut out = Vec::new();
    for y in objects(d) {
        if is_cauchy_complete(d, y, true)? {
            out.push(y);
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SectionCheck {
    /// Every object strongly Cauchy-complete.
    pub sruc: bool,
    /// The graph functor into `Map R` is bijective on hom-sets.
    pub graph_iso: bool,
    /// The graph 1-arrow has a retraction that is the identity on fibres.
    pub graph_section: bool,
}

impl SectionCheck {
    pub fn agree(&self) -> bool {
        self.sruc == self.graph_iso && self.graph_iso == self.graph_section
    }

    pub fn all(&self) -> bool {
        self.sruc && self.graph_iso && self.graph_section
    }
}

pub fn check_sruc_section<D: Doctrine>(d: &D) -> Result<SectionCheck> {
    let sruc = strongly_complete_objects(d)?.len() == d.object_count();
    let map = map_category(d)?;
    let n = d.object_count();
    let mut graph_iso = true;
    for x in 0..n {
        for y in 0..n {
            let graphs: Vec<D::Rel> = d.hom(x, y)?.iter().map(|f| d.graph(f)).collect();
            let distinct: std::collections::HashSet<&D::Rel> = graphs.iter().collect();
            let covered = map.hom(x, y).iter().all(|a| distinct.contains(a));
            graph_iso &= distinct.len() == graphs.len() && covered && distinct.len() == map.hom(x, y).len();
        }
    }
    let graph_section = find_retraction(d, &map)?.is_some();
    Ok(SectionCheck {
        sruc,
        graph_iso,
        graph_section,
    })
}

/// A functor `Map R → C`, identity on objects, with `gr P(α) = α` and
/// `P(gr f) = f`. Returned per hom-set in the order of `map`.
fn find_retraction<D: Doctrine>(d: &D, map: &MapCategory<D::Rel>) -> Result<Option<Vec<Vec<D::Arrow>>>> {
    let n = d.object_count();
    let mut choice: Vec<Vec<D::Arrow>> = Vec::with_capacity(n * n);
    for x in 0..n {
        for y in 0..n {
            let hom = d.hom(x, y)?;
            let mut by_graph: HashMap<D::Rel, Vec<D::Arrow>> = HashMap::new();
            for f in hom.iter() {
                by_graph.entry(d.graph(f)).or_default().push(f.clone());
            }
            let mut row = Vec::new();
            for a in map.hom(x, y) {
                // Every arrow with graph α must be P(α), so exactly one may exist.
                match by_graph.get(a).map(Vec::as_slice) {
                    Some([f]) => row.push(f.clone()),
                    _ => return Ok(None),
                }
            }
            choice.push(row);
        }
    }
    let at = |x: ObjId, y: ObjId, a: &D::Rel| -> Option<&D::Arrow> {
        map.hom(x, y).iter().position(|b| b == a).map(|i| &choice[x * n + y][i])
    };
    for x in 0..n {
        if at(x, x, &d.diag(x)) != Some(&d.identity(x)) {
            return Ok(None);
        }
        for y in 0..n {
            for z in 0..n {
                for (i, a) in map.hom(x, y).iter().enumerate() {
                    for (j, b) in map.hom(y, z).iter().enumerate() {
                        let composite = d.compose(&choice[x * n + y][i], &choice[y * n + z][j]);
                        if at(x, z, &d.comp(x, y, z, a, b)) != Some(&composite) {
                            return Ok(None);
                        }
                    }
                }
            }
        }
    }
    Ok(Some(choice))
}

/// A singleton object for `object`: a bijective `epsilon ∈ R(singleton, object)`
/// through which every functional total relation into `object` factors
/// uniquely as `gr χ ; ε`. `unit` is the arrow classifying `d`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SingletonWitness<A, R> {
    pub object: ObjId,
    pub singleton: ObjId,
    pub epsilon: R,
    pub unit: A,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SingletonRecord {
    pub object: String,
    pub singleton: String,
    pub epsilon: String,
    pub unit: String,
    pub verified: Vec<String>,
}

impl<A, R> SingletonWitness<A, R> {
    pub fn record<D: Doctrine<Arrow = A, Rel = R>>(&self, d: &D) -> SingletonRecord {
        SingletonRecord {
            object: d.object_name(self.object),
            singleton: d.object_name(self.singleton),
            epsilon: d.rel_name(self.singleton, self.object, &self.epsilon),
            unit: d.arrow_name(&self.unit),
            verified: vec![
                "epsilon bijective".into(),
                "unique classifying arrows".into(),
                "unit composed with epsilon is d".into(),
            ],
        }
    }
}

pub struct Singletons<A, R> {
    pub witnesses: Vec<Option<SingletonWitness<A, R>>>,
    /// The induced functor `Map R → C` is full and faithful between objects
    /// that have witnesses.
    pub fully_faithful: bool,
}

impl<A, R> Singletons<A, R> {
    pub fn is_total(&self) -> bool {
        self.witnesses.iter().all(Option::is_some)
    }
}

fn is_bijective<D: Doctrine>(d: &D, x: ObjId, y: ObjId, a: &D::Rel) -> bool {
    is_functional_total(d, x, y, a) && is_injective(d, x, y, a) && is_surjective(d, x, y, a)
}

/// For each `χ: X→S`, the relation `gr χ ; ε`, tallied.
fn classified<D: Doctrine>(d: &D, x: ObjId, s: ObjId, a: ObjId, eps: &D::Rel) -> Result<HashMap<D::Rel, Vec<D::Arrow>>> {
    let mut out: HashMap<D::Rel, Vec<D::Arrow>> = HashMap::new();
    for chi in d.hom(x, s)?.iter() {
        out.entry(d.comp(x, s, a, &d.graph(chi), eps)).or_default().push(chi.clone());
    }
    Ok(out)
}

fn singleton_for<D: Doctrine>(d: &D, a: ObjId) -> Result<Option<SingletonWitness<D::Arrow, D::Rel>>> {
    let mut order: Vec<ObjId> = vec![a];
    order.extend(objects(d).filter(|&s| s != a));
    for s in order {
        let mut eps_order: Vec<D::Rel> = Vec::new();
        if s == a {
            eps_order.push(d.diag(a));
        }
        eps_order.extend(d.fibre(s, a)?.iter().filter(|e| s != a || **e != d.diag(a)).cloned());
        'eps: for eps in eps_order {
            if !is_bijective(d, s, a, &eps) {
                continue;
            }
            for x in objects(d) {
                let table = classified(d, x, s, a, &eps)?;
                for alpha in functional_total(d, x, a)? {
                    if table.get(&alpha).map_or(0, Vec::len) != 1 {
                        continue 'eps;
                    }
                }
            }
            let unit = classified(d, a, s, a, &eps)?
                .remove(&d.diag(a))
                .and_then(|v| v.into_iter().next())
                .expect("classification covers d");
            return Ok(Some(SingletonWitness {
                object: a,
                singleton: s,
                epsilon: eps,
                unit,
            }));
        }
    }
    Ok(None)
}

/// Searches the presented objects for singletons. A missing witness means
/// none exists among the presented objects.
pub fn find_singletons<D: Doctrine>(d: &D) -> Result<Singletons<D::Arrow, D::Rel>> {
    let witnesses: Vec<_> = objects(d).map(|a| singleton_for(d, a)).collect::<Result<_>>()?;
    let mut fully_faithful = true;
    for wa in witnesses.iter().flatten() {
        for wb in witnesses.iter().flatten() {
            let (a, b, sa, sb) = (wa.object, wb.object, wa.singleton, wb.singleton);
            let table = classified(d, sa, sb, b, &wb.epsilon)?;
            let mut hit: std::collections::HashSet<D::Arrow> = Default::default();
            for beta in functional_total(d, a, b)? {
                let target = d.comp(sa, a, b, &wa.epsilon, &beta);
                match table.get(&target).map(Vec::as_slice) {
                    Some([chi]) => fully_faithful &= hit.insert(chi.clone()),
                    _ => fully_faithful = false,
                }
            }
            fully_faithful &= hit.len() == d.hom(sa, sb)?.len();
        }
    }
    Ok(Singletons {
        witnesses,
        fully_faithful,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReflectorCheck {
    /// Name of the reflection of each object.
    pub reflection: Vec<String>,
    pub units: Vec<String>,
    pub units_bijective: bool,
    /// The unit is invertible exactly at strongly Cauchy-complete objects.
    pub unit_iso_iff_strong: bool,
    /// Every arrow into a strongly Cauchy-complete object factors uniquely
    /// through the unit.
    pub universal: bool,
}

impl ReflectorCheck {
    pub fn holds(&self) -> bool {
        self.units_bijective && self.unit_iso_iff_strong && self.universal
    }
}

/// Builds the reflector from singleton witnesses and verifies it.
pub fn cauchy_reflector<D: Doctrine>(d: &D, singletons: &Singletons<D::Arrow, D::Rel>) -> Result<ReflectorCheck> {
    if !singletons.is_total() {
        let missing: Vec<String> = singletons
            .witnesses
            .iter()
            .enumerate()
            .filter(|(_, w)| w.is_none())
            .map(|(a, _)| d.object_name(a))
            .collect();
        return Err(Error::Precondition(format!("no singleton for {}", missing.join(", "))));
    }
    let strong = strongly_complete_objects(d)?;
    let mut check = ReflectorCheck {
        reflection: Vec::new(),
        units: Vec::new(),
        units_bijective: true,
        unit_iso_iff_strong: true,
        universal: true,
    };
    for w in singletons.witnesses.iter().flatten() {
        let (a, s) = (w.object, w.singleton);
        check.reflection.push(d.object_name(s));
        check.units.push(d.arrow_name(&w.unit));
        let gr = d.graph(&w.unit);
        check.units_bijective &= is_injective(d, a, s, &gr) && is_surjective(d, a, s, &gr);
        let invertible = d
            .hom(s, a)?
            .iter()
            .any(|g| d.compose(&w.unit, g) == d.identity(a) && d.compose(g, &w.unit) == d.identity(s));
        check.unit_iso_iff_strong &= invertible == strong.contains(&a);
        check.universal &= unique_factorizations(d, &w.unit, &strong)?;
    }
    Ok(check)
}

/// Every `f: A→Y` with `Y` in `targets` factors as `h ∘ σ` for exactly one `h`.
fn unique_factorizations<D: Doctrine>(d: &D, sigma: &D::Arrow, targets: &[ObjId]) -> Result<bool> {
    let (a, s) = (d.src(sigma), d.tgt(sigma));
    for &y in targets {
        let mut count: HashMap<D::Arrow, usize> = HashMap::new();
        for h in d.hom(s, y)?.iter() {
            *count.entry(d.compose(sigma, h)).or_default() += 1;
        }
        if d.hom(a, y)?.iter().any(|f| count.get(f) != Some(&1)) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Searches directly for a reflection into the strongly Cauchy-complete
/// objects with bijective units, without using singletons.
pub fn find_reflection<D: Doctrine>(d: &D) -> Result<Option<Vec<D::Arrow>>> {
    let strong = strongly_complete_objects(d)?;
    let mut units = Vec::new();
    for a in objects(d) {
        let mut found = None;
        'search: for &s in &strong {
            for sigma in d.hom(a, s)?.iter() {
                let gr = d.graph(sigma);
                if is_injective(d, a, s, &gr) && is_surjective(d, a, s, &gr) && unique_factorizations(d, sigma, &strong)? {
                    found = Some(sigma.clone());
                    break 'search;
                }
            }
        }
        match found {
            Some(f) => units.push(f),
            None => return Ok(None),
        }
    }
    Ok(Some(units))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct EquivalenceCheck {
    pub fully_faithful: bool,
    pub essentially_surjective: bool,
}

impl EquivalenceCheck {
    pub fn holds(&self) -> bool {
        self.fully_faithful && self.essentially_surjective
    }
}

/// The graph 1-arrow restricted to strongly Cauchy-complete objects, as a
/// 1-arrow into `Ruc R`. Fibres are unchanged, so it is an equivalence when
/// its base functor is.
pub fn check_graph_inclusion_equivalence<D: Doctrine>(d: &D) -> Result<EquivalenceCheck> {
    let strong = strongly_complete_objects(d)?;
    let mut fully_faithful = true;
    for &x in &strong {
        for &y in &strong {
            let graphs: std::collections::HashSet<D::Rel> = d.hom(x, y)?.iter().map(|f| d.graph(f)).collect();
            let ft = functional_total(d, x, y)?;
            fully_faithful &= graphs.len() == d.hom(x, y)?.len() && graphs.len() == ft.len();
        }
    }
    let mut essentially_surjective = true;
    for a in objects(d) {
        let mut hit = false;
        for &s in &strong {
            if d.fibre(s, a)?.iter().any(|e| is_bijective(d, s, a, e)) {
                hit = true;
                break;
            }
        }
        essentially_surjective &= hit;
    }
    Ok(EquivalenceCheck {
        fully_faithful,
        essentially_surjective,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReflectionAgreement {
    pub singletons_total: bool,
    pub reflection_exists: bool,
    pub graph_inclusion_equivalence: bool,
    /// The section test on the strongly Cauchy-complete restriction.
    pub restricted_section: SectionCheck,
    pub reflector: Option<ReflectorCheck>,
}

impl ReflectionAgreement {
    pub fn agree(&self) -> bool {
        self.singletons_total == self.reflection_exists
            && self.reflection_exists == self.graph_inclusion_equivalence
            && self.restricted_section.all()
            && self.reflector.as_ref().map_or(true, ReflectorCheck::holds)
    }
}

/// Existence of singletons, of a reflection with bijective units, and the
/// equivalence of the complete restriction with `Ruc R`, computed
/// independently.
pub fn check_reflection_agreement<D: Doctrine + Clone>(d: &D) -> Result<ReflectionAgreement> {
    let singletons = find_singletons(d)?;
    let singletons_total = singletons.is_total() && singletons.fully_faithful;
    let reflector = if singletons.is_total() {
        Some(cauchy_reflector(d, &singletons)?)
    } else {
        None
    };
    let restricted = Restricted::new(d.clone(), strongly_complete_objects(d)?);
    Ok(ReflectionAgreement {
        singletons_total,
        reflection_exists: find_reflection(d)?.is_some(),
        graph_inclusion_equivalence: check_graph_inclusion_equivalence(d)?.holds(),
        restricted_section: check_sruc_section(&restricted)?,
        reflector,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::builtins::{make_vrel_doctrine, make_walters_doctrine, walters_completion, VCategory, VCategoryJson};
    use crate::doctrine::{check_doctrine_laws, Limits};
    use crate::finite::terminal_doctrine;
    use crate::quantale::{builtin_quantale, Quantale, QuantaleKind};

    fn q(kind: QuantaleKind) -> Quantale {
        builtin_quantale(kind).unwrap()
    }

    #[test]
    fn boolean_map_category_counts_functions() {
        let d = make_vrel_doctrine(&q(QuantaleKind::Boolean), &[1, 2], true, &Limits::default()).unwrap();
        let m = map_category(&d).unwrap();
        for (x, nx) in [(0, 1u32), (1, 2)] {
            for (y, ny) in [(0, 1u32), (1, 2)] {
                assert_eq!(m.hom(x, y).len(), ny.pow(nx) as usize);
            }
        }
        assert!(m.check(&d).is_clean());
        let t = terminal_doctrine();
        assert_eq!(map_category(&t).unwrap().arrow_count(), 1);
    }

    #[test]
    fn powerset_map_category_has_extra_arrows() {
        let h = q(QuantaleKind::PowersetFrame { n: 2 });
        let d = make_vrel_doctrine(&h, &[1, 2], true, &Limits::default()).unwrap();
        let m = map_category(&d).unwrap();
        assert!(m.hom(0, 1).len() > 2);
        let split = crate::matrix::Matrix::from_names(&[vec!["{a}".into(), "{b}".into()]], &h).unwrap();
        assert!(m.hom(0, 1).contains(&split));
    }

    #[test]
    fn ruc_is_strongly_complete_and_idempotent() {
        let h = q(QuantaleKind::PowersetFrame { n: 2 });
        let d = make_vrel_doctrine(&h, &[1, 2], true, &Limits::default()).unwrap();
        let before = check_sruc_section(&d).unwrap();
        assert_eq!(before, SectionCheck { sruc: false, graph_iso: false, graph_section: false });
        let r = ruc_doctrine(d);
        assert!(check_doctrine_laws(&r, &Limits::default()).unwrap().is_clean());
        for y in 0..2 {
            assert!(is_cauchy_complete(&r, y, true).unwrap());
        }
        assert!(check_sruc_section(&r).unwrap().all());
        let rr = ruc_doctrine(r.clone());
        assert!(check_sruc_section(&rr).unwrap().graph_iso);
    }

    #[test]
    fn boolean_and_terminal_sections() {
        let d = make_vrel_doctrine(&q(QuantaleKind::Boolean), &[1, 2], true, &Limits::default()).unwrap();
        assert!(check_sruc_section(&d).unwrap().all());
        assert!(check_sruc_section(&terminal_doctrine()).unwrap().all());
    }

    #[test]
    fn boolean_singletons_are_identities() {
        let d = make_vrel_doctrine(&q(QuantaleKind::Boolean), &[1, 2], true, &Limits::default()).unwrap();
        let s = find_singletons(&d).unwrap();
        assert!(s.is_total() && s.fully_faithful);
        for (a, w) in s.witnesses.iter().enumerate() {
            let w = w.as_ref().unwrap();
            assert_eq!((w.singleton, &w.epsilon), (a, &d.diag(a)));
            assert_eq!(w.unit, d.identity(a));
        }
        let agreement = check_reflection_agreement(&d).unwrap();
        assert!(agreement.agree() && agreement.singletons_total);
    }

    #[test]
    fn powerset_without_completion_has_no_singleton() {
        let h = q(QuantaleKind::PowersetFrame { n: 2 });
        let d = make_vrel_doctrine(&h, &[1, 2], true, &Limits::default()).unwrap();
        let s = find_singletons(&d).unwrap();
        assert!(s.witnesses[0].is_some());
        assert!(s.witnesses[1].is_none());
        let agreement = check_reflection_agreement(&d).unwrap();
        assert!(agreement.agree());
        assert!(!agreement.reflection_exists);
    }

    #[test]
    fn walters_completion_is_the_singleton() {
        let h = q(QuantaleKind::Chain { n: 2 });
        let j = VCategoryJson {
            name: Some("X".into()),
            points: vec!["p".into()],
            dist: vec![vec!["1".into()]],
            extent: Some(vec!["1".into()]),
        };
        let x = VCategory::from_json(&j, &h).unwrap();
        let xbar = walters_completion(&h, &x).unwrap();
        let d = make_walters_doctrine(&h, &[x, xbar], &Limits::default()).unwrap();
        let s = find_singletons(&d).unwrap();
        assert!(s.is_total() && s.fully_faithful);
        let w = s.witnesses[0].as_ref().unwrap();
        assert_eq!(w.singleton, 1);
        assert_eq!(w.unit.map.to_vec(), vec![1]);
        assert_eq!(w.epsilon, d.graph(&w.unit).transpose());
        let r = cauchy_reflector(&d, &s).unwrap();
        assert!(r.holds(), "{r:?}");
        let agreement = check_reflection_agreement(&d).unwrap();
        assert!(agreement.agree() && agreement.singletons_total, "{agreement:?}");
    }
}
