//! Eilenberg-Moore algebras with closed relations, T-spaces, the closure Φ,
//! and the compactification of T-spaces into algebras.

use crate::builtins::MapArrow;
use crate::completion::{strongly_complete_objects, Restricted};
use crate::doctrine::{is_extensional, objects, Doctrine, Limits, ObjId};
use crate::error::{Error, Result};
use crate::finite::{tabulate, FiniteDoctrine};
use crate::matrix::Matrix;
use crate::monad::{ArrowOf, DoctrineMonad, PresentedMonad, RelOf};
use crate::morphism::find_equivalence;
use crate::quotients::{check_quotient_arrow, equivalence_failure, fresh_name, is_equivalence, quotient_plans, FactorizationFailure, QuotientPlan, QuotientVerification, Recipe};
use crate::relprops::is_functional_total;
use crate::report::LawReport;
use serde::{Deserialize, Serialize};
use std::collections::{HashMap, HashSet};
use std::sync::{Arc, OnceLock};

fn missing<D: Doctrine>(d: &D, what: &str, x: ObjId) -> Error {
    Error::Unsupported(format!("{what} at {} is not presented", d.object_name(x)))
}

fn t_obj<M: DoctrineMonad>(m: &M, x: ObjId) -> Result<ObjId> {
    m.obj(x).ok_or_else(|| missing(m.doctrine(), "T", x))
}

fn t_arr<M: DoctrineMonad>(m: &M, f: &ArrowOf<M>) -> Result<ArrowOf<M>> {
    m.arr(f)
        .ok_or_else(|| Error::Unsupported(format!("T on {} is not presented", m.doctrine().arrow_name(f))))
}

fn unit<M: DoctrineMonad>(m: &M, x: ObjId) -> Result<ArrowOf<M>> {
    m.unit(x).ok_or_else(|| missing(m.doctrine(), "the unit", x))
}

fn mult<M: DoctrineMonad>(m: &M, x: ObjId) -> Result<ArrowOf<M>> {
    m.mult(x).ok_or_else(|| missing(m.doctrine(), "the multiplication", x))
}

fn lift<M: DoctrineMonad>(m: &M, x: ObjId, y: ObjId, a: &RelOf<M>) -> Result<RelOf<M>> {
    let d = m.doctrine();
    m.lift(x, y, a).ok_or_else(|| {
        Error::Unsupported(format!("the lifting of R({},{}) is not presented", d.object_name(x), d.object_name(y)))
    })
}

/// Whether `a: TX → X` satisfies the unit and associativity laws.
pub fn is_algebra<M: DoctrineMonad>(m: &M, x: ObjId, a: &ArrowOf<M>) -> Result<bool> {
    let d = m.doctrine();
    let tx = t_obj(m, x)?;
    if (d.src(a), d.tgt(a)) != (tx, x) {
        return Err(Error::TypeMismatch(format!("{} is not an arrow T{1} -> {1}", d.arrow_name(a), d.object_name(x))));
    }
    if d.compose(&unit(m, x)?, a) != d.identity(x) {
        return Ok(false);
    }
    Ok(d.compose(&mult(m, x)?, a) == d.compose(&t_arr(m, a)?, a))
}

/// All algebra structures on `x`.
pub fn algebras<M: DoctrineMonad>(m: &M, x: ObjId) -> Result<Vec<ArrowOf<M>>> {
    let tx = t_obj(m, x)?;
    let mut out = Vec::new();
    for a in m.doctrine().hom(tx, x)?.iter() {
        if is_algebra(m, x, a)? {
            out.push(a.clone());
        }
    }
    Ok(out)
}

/// `f ∘ a = b ∘ Tf`.
pub fn is_homomorphism<M: DoctrineMonad>(m: &M, a: &ArrowOf<M>, b: &ArrowOf<M>, f: &ArrowOf<M>) -> Result<bool> {
    let d = m.doctrine();
    Ok(d.compose(a, f) == d.compose(&t_arr(m, f)?, b))
}

/// `φ° ; T̂α ; ψ ⊑ α` for structures `φ ∈ R(TX,X)`, `ψ ∈ R(TY,Y)`.
pub fn is_closed<M: DoctrineMonad>(m: &M, x: ObjId, phi: &RelOf<M>, y: ObjId, psi: &RelOf<M>, a: &RelOf<M>) -> Result<bool> {
    let d = m.doctrine();
    let (tx, ty) = (t_obj(m, x)?, t_obj(m, y)?);
    let moved = d.comp(tx, ty, y, &lift(m, x, y, a)?, psi);
    let lhs = d.comp(x, tx, y, &d.conv(tx, x, phi), &moved);
    Ok(d.leq(x, y, &lhs, a))
}

/// Whether `φ ∈ R(TX,X)` is reflexive (`d ⊑ gr η ; φ`) and transitive
/// (`T̂φ ; φ ⊑ gr μ ; φ`).
pub fn is_tspace<M: DoctrineMonad>(m: &M, x: ObjId, phi: &RelOf<M>) -> Result<bool> {
    let d = m.doctrine();
    let tx = t_obj(m, x)?;
    let ttx = t_obj(m, tx)?;
    let reflexive = d.leq(x, x, &d.diag(x), &d.comp(x, tx, x, &d.graph(&unit(m, x)?), phi));
    if !reflexive {
        return Ok(false);
    }
    let lhs = d.comp(ttx, tx, x, &lift(m, tx, x, phi)?, phi);
    let rhs = d.comp(ttx, tx, x, &d.graph(&mult(m, x)?), phi);
    Ok(d.leq(ttx, x, &lhs, &rhs))
}

/// All T-space structures on `x`.
pub fn tspaces<M: DoctrineMonad>(m: &M, x: ObjId) -> Result<Vec<RelOf<M>>> {
    let tx = t_obj(m, x)?;
    let mut out = Vec::new();
    for phi in m.doctrine().fibre(tx, x)?.iter() {
        if is_tspace(m, x, phi)? {
            out.push(phi.clone());
        }
    }
    Ok(out)
}

pub fn is_compact_hausdorff<M: DoctrineMonad>(m: &M, x: ObjId, phi: &RelOf<M>) -> Result<bool> {
    Ok(is_functional_total(m.doctrine(), t_obj(m, x)?, x, phi))
}

/// `φ ; gr f ⊑ gr Tf ; ψ` for `f: X → Y`.
pub fn is_space_morphism<M: DoctrineMonad>(m: &M, x: ObjId, phi: &RelOf<M>, y: ObjId, psi: &RelOf<M>, f: &ArrowOf<M>) -> Result<bool> {
    let d = m.doctrine();
    let (tx, ty) = (t_obj(m, x)?, t_obj(m, y)?);
    let lhs = d.comp(tx, x, y, phi, &d.graph(f));
    let rhs = d.comp(tx, ty, y, &d.graph(&t_arr(m, f)?), psi);
    Ok(d.leq(tx, y, &lhs, &rhs))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PhiClosure<R> {
    pub rel: R,
    /// Strict increases before the fixed point.
    pub steps: usize,
}

/// The least relation above `alpha` that is reflexive, transitive and closed
/// for the algebra `a: TX → X`: the least fixed point of
/// `Φ(γ) = α ∨ d ∨ γ;γ ∨ gr a° ; T̂γ ; gr a`, reached by iteration from ⊥.
pub fn closure_phi<M: DoctrineMonad>(m: &M, x: ObjId, a: &ArrowOf<M>, alpha: &RelOf<M>) -> Result<PhiClosure<RelOf<M>>> {
    let d = m.doctrine();
    let tx = t_obj(m, x)?;
    if !d.contains(x, x, alpha) {
        return Err(Error::TypeMismatch(format!("{alpha:?} is not a relation on {}", d.object_name(x))));
    }
    let no_joins = || Error::Unsupported("closure needs binary joins and a bottom in the fibre".into());
    let join = |p: &RelOf<M>, q: &RelOf<M>| d.join(x, x, p, q).ok_or_else(no_joins);
    let ga = d.graph(a);
    let gac = d.conv(tx, x, &ga);
    let mut gamma = d.bottom(x, x).ok_or_else(no_joins)?;
    let mut steps = 0;
    loop {
        let closed = d.comp(x, tx, x, &gac, &d.comp(tx, tx, x, &lift(m, x, x, &gamma)?, &ga));
        let next = join(&join(&join(alpha, &d.diag(x))?, &d.comp(x, x, x, &gamma, &gamma))?, &closed)?;
        if next == gamma {
            break;
        }
        if !d.leq(x, x, &gamma, &next) {
            return Err(Error::Precondition("the lifting is not monotone, so Φ has no iterative fixed point".into()));
        }
        gamma = next;
        steps += 1;
    }
    Ok(PhiClosure { rel: gamma, steps })
}

/// Reference search for [`closure_phi`]: the least element of the fibre
/// that lies above `alpha` and is reflexive, transitive and closed.
pub fn least_closed_extension<M: DoctrineMonad>(m: &M, x: ObjId, a: &ArrowOf<M>, alpha: &RelOf<M>) -> Result<Option<RelOf<M>>> {
    let d = m.doctrine();
    let ga = d.graph(a);
    let mut above = Vec::new();
    for g in d.fibre(x, x)?.iter() {
        let ok = d.leq(x, x, alpha, g)
            && d.leq(x, x, &d.diag(x), g)
            && d.leq(x, x, &d.comp(x, x, x, g, g), g)
            && is_closed(m, x, &ga, x, &ga, g)?;
        if ok {
            above.push(g.clone());
        }
    }
    Ok(above.iter().find(|g| above.iter().all(|h| d.leq(x, x, g, h))).cloned())
}

/// An object of a doctrine of structured objects: a carrier with a structure
/// relation `φ ∈ R(TX,X)`, and the algebra when `φ` is its graph.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Structured<A, R> {
    pub carrier: ObjId,
    pub relation: R,
    pub algebra: Option<A>,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct StructArrow<A> {
    pub src: ObjId,
    pub tgt: ObjId,
    pub arrow: A,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ArrowRule {
    Homomorphisms,
    SpaceMorphisms,
}

type Cached<T> = OnceLock<Result<Arc<Vec<T>>>>;

/// Structured objects over carriers of a monad, with their morphisms and the
/// relations closed for both structures. With algebras and homomorphisms
/// this is the Eilenberg-Moore doctrine; with compact Hausdorff spaces and
/// space morphisms it is the compact Hausdorff doctrine.
pub struct ClosedDoctrine<'a, M: DoctrineMonad> {
    m: &'a M,
    rule: ArrowRule,
    objects: Vec<Structured<ArrowOf<M>, RelOf<M>>>,
    names: Vec<String>,
    homs: Vec<Cached<StructArrow<ArrowOf<M>>>>,
    fibres: Vec<Cached<RelOf<M>>>,
}

impl<'a, M: DoctrineMonad> ClosedDoctrine<'a, M> {
    pub fn new(m: &'a M, rule: ArrowRule, objects: Vec<Structured<ArrowOf<M>, RelOf<M>>>, names: Vec<String>) -> Self {
        let n = objects.len();
        ClosedDoctrine {
            m,
            rule,
            objects,
            names,
            homs: (0..n * n).map(|_| OnceLock::new()).collect(),
            fibres: (0..n * n).map(|_| OnceLock::new()).collect(),
        }
    }

    pub fn structure(&self, i: ObjId) -> &Structured<ArrowOf<M>, RelOf<M>> {
        &self.objects[i]
    }

    pub fn rule(&self) -> ArrowRule {
        self.rule
    }

    fn carrier(&self, i: ObjId) -> ObjId {
        self.objects[i].carrier
    }

    fn admits(&self, i: ObjId, j: ObjId, f: &ArrowOf<M>) -> Result<bool> {
        let (s, t) = (&self.objects[i], &self.objects[j]);
        match (self.rule, &s.algebra, &t.algebra) {
            (ArrowRule::Homomorphisms, Some(a), Some(b)) => is_homomorphism(self.m, a, b, f),
            _ => is_space_morphism(self.m, s.carrier, &s.relation, t.carrier, &t.relation, f),
        }
    }

    fn compute_hom(&self, i: ObjId, j: ObjId) -> Result<Arc<Vec<StructArrow<ArrowOf<M>>>>> {
        let d = self.m.doctrine();
        let mut out = Vec::new();
        for f in d.hom(self.carrier(i), self.carrier(j))?.iter() {
            if self.admits(i, j, f)? {
                out.push(StructArrow { src: i, tgt: j, arrow: f.clone() });
            }
        }
        Ok(Arc::new(out))
    }

    fn closed(&self, i: ObjId, j: ObjId, a: &RelOf<M>) -> Result<bool> {
        let (s, t) = (&self.objects[i], &self.objects[j]);
        is_closed(self.m, s.carrier, &s.relation, t.carrier, &t.relation, a)
    }

    fn compute_fibre(&self, i: ObjId, j: ObjId) -> Result<Arc<Vec<RelOf<M>>>> {
        let d = self.m.doctrine();
        let mut out = Vec::new();
        for a in d.fibre(self.carrier(i), self.carrier(j))?.iter() {
            if self.closed(i, j, a)? {
                out.push(a.clone());
            }
        }
        Ok(Arc::new(out))
    }
}

impl<M: DoctrineMonad> Doctrine for ClosedDoctrine<'_, M> {
    type Arrow = StructArrow<ArrowOf<M>>;
    type Rel = RelOf<M>;

    fn object_count(&self) -> usize {
        self.objects.len()
    }
    fn object_name(&self, x: ObjId) -> String {
        self.names[x].clone()
    }
    fn hom(&self, x: ObjId, y: ObjId) -> Result<Arc<Vec<Self::Arrow>>> {
        self.homs[x * self.objects.len() + y].get_or_init(|| self.compute_hom(x, y)).clone()
    }
    fn src(&self, f: &Self::Arrow) -> ObjId {
        f.src
    }
    fn tgt(&self, f: &Self::Arrow) -> ObjId {
        f.tgt
    }
    fn compose(&self, f: &Self::Arrow, g: &Self::Arrow) -> Self::Arrow {
        StructArrow { src: f.src, tgt: g.tgt, arrow: self.m.doctrine().compose(&f.arrow, &g.arrow) }
    }
    fn identity(&self, x: ObjId) -> Self::Arrow {
        StructArrow { src: x, tgt: x, arrow: self.m.doctrine().identity(self.carrier(x)) }
    }
    fn arrow_name(&self, f: &Self::Arrow) -> String {
        format!("{}: {} -> {}", self.m.doctrine().arrow_name(&f.arrow), self.names[f.src], self.names[f.tgt])
    }
    fn fibre(&self, x: ObjId, y: ObjId) -> Result<Arc<Vec<Self::Rel>>> {
        self.fibres[x * self.objects.len() + y].get_or_init(|| self.compute_fibre(x, y)).clone()
    }
    fn contains(&self, x: ObjId, y: ObjId, a: &Self::Rel) -> bool {
        self.m.doctrine().contains(self.carrier(x), self.carrier(y), a) && self.closed(x, y, a).unwrap_or(false)
    }
    fn leq(&self, x: ObjId, y: ObjId, a: &Self::Rel, b: &Self::Rel) -> bool {
        self.m.doctrine().leq(self.carrier(x), self.carrier(y), a, b)
    }
    fn diag(&self, x: ObjId) -> Self::Rel {
        self.m.doctrine().diag(self.carrier(x))
    }
    fn comp(&self, x: ObjId, y: ObjId, z: ObjId, a: &Self::Rel, b: &Self::Rel) -> Self::Rel {
        self.m.doctrine().comp(self.carrier(x), self.carrier(y), self.carrier(z), a, b)
    }
    fn conv(&self, x: ObjId, y: ObjId, a: &Self::Rel) -> Self::Rel {
        self.m.doctrine().conv(self.carrier(x), self.carrier(y), a)
    }
    fn graph(&self, f: &Self::Arrow) -> Self::Rel {
        self.m.doctrine().graph(&f.arrow)
    }
    fn rel_name(&self, x: ObjId, y: ObjId, a: &Self::Rel) -> String {
        self.m.doctrine().rel_name(self.carrier(x), self.carrier(y), a)
    }
    fn value_quantale(&self) -> Option<&crate::quantale::Quantale> {
        self.m.doctrine().value_quantale()
    }
    fn rel_values(&self, x: ObjId, y: ObjId, a: &Self::Rel) -> Option<Matrix> {
        self.m.doctrine().rel_values(self.carrier(x), self.carrier(y), a)
    }
}

/// Algebras on the monad's carriers, homomorphisms, and closed relations.
pub fn em_doctrine<M: DoctrineMonad>(m: &M) -> Result<ClosedDoctrine<'_, M>> {
    let d = m.doctrine();
    let (mut objs, mut names) = (Vec::new(), Vec::new());
    for x in m.carriers() {
        for (k, a) in algebras(m, x)?.into_iter().enumerate() {
            names.push(format!("{}.a{k}", d.object_name(x)));
            objs.push(Structured { carrier: x, relation: d.graph(&a), algebra: Some(a) });
        }
    }
    Ok(ClosedDoctrine::new(m, ArrowRule::Homomorphisms, objs, names))
}

/// Compact Hausdorff spaces on the monad's carriers, space morphisms, and
/// closed relations.
pub fn chem_doctrine<M: DoctrineMonad>(m: &M) -> Result<ClosedDoctrine<'_, M>> {
    let d = m.doctrine();
    let (mut objs, mut names) = (Vec::new(), Vec::new());
    for x in m.carriers() {
        let mut k = 0;
        for phi in tspaces(m, x)? {
            if is_compact_hausdorff(m, x, &phi)? {
                names.push(format!("{}.s{k}", d.object_name(x)));
                objs.push(Structured { carrier: x, relation: phi, algebra: None });
                k += 1;
            }
        }
    }
    Ok(ClosedDoctrine::new(m, ArrowRule::SpaceMorphisms, objs, names))
}

/// The Eilenberg-Moore doctrine written out as tables.
pub fn em_closed_doctrine<M: DoctrineMonad>(m: &M, limits: &Limits) -> Result<FiniteDoctrine> {
    tabulate(&em_doctrine(m)?, limits)
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct FactorizationCount {
    pub algebras: usize,
    /// Space morphisms out of the space into algebra graphs.
    pub morphisms: usize,
    pub failures: Vec<FactorizationFailure>,
    pub failure_count: usize,
    /// Carriers whose hom-sets could not be enumerated.
    pub skipped: Vec<String>,
}

/// A compactification, with the monad it lives over when the quotient
/// carrier had to be added to the presentation.
#[derive(Debug, Clone)]
pub struct Compactification<M> {
    pub monad: Option<M>,
    pub source: ObjId,
    pub phi: Matrix,
    pub free: ObjId,
    pub closure: PhiClosure<Matrix>,
    pub recipe: Recipe,
    pub classes: Vec<Vec<usize>>,
    pub carrier: ObjId,
    pub structure: MapArrow,
    pub zeta: MapArrow,
    pub quotient: QuotientVerification,
    /// T q checked as a quotient of the lifted closure; `None` when that
    /// lifting is not presented.
    pub preservation: Option<QuotientVerification>,
    pub zeta_is_morphism: bool,
    pub universal: FactorizationCount,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CompactificationRecord {
    pub space: String,
    pub phi: Vec<Vec<String>>,
    pub free: String,
    pub rho: Vec<Vec<String>>,
    pub steps: usize,
    pub recipe: Recipe,
    pub partition: Vec<Vec<String>>,
    pub carrier: String,
    pub extended: bool,
    pub structure: Vec<[String; 2]>,
    pub zeta: Vec<[String; 2]>,
    pub quotient: QuotientVerification,
    pub preservation: Option<QuotientVerification>,
    pub zeta_is_morphism: bool,
    pub universal: FactorizationCount,
    pub holds: bool,
}

impl<M: PresentedMonad> Compactification<M> {
    /// The monad the result lives over: the extended one, or `original`.
    pub fn over<'a>(&'a self, original: &'a M) -> &'a M {
        self.monad.as_ref().unwrap_or(original)
    }

    pub fn holds(&self) -> bool {
        self.quotient.holds()
            && self.preservation.as_ref().map_or(true, |p| p.holds())
            && self.zeta_is_morphism
            && self.universal.failure_count == 0
    }

    pub fn record(&self, original: &M) -> CompactificationRecord {
        let d = self.over(original).doctrine();
        let q = d.quantale();
        let points = |x: ObjId, f: &MapArrow| {
            (0..f.map.len())
                .map(|i| [d.object(x).point_name(i), d.object(f.tgt).point_name(f.apply(i))])
                .collect()
        };
        CompactificationRecord {
            space: d.object_name(self.source),
            phi: self.phi.to_names(q),
            free: d.object_name(self.free),
            rho: self.closure.rel.to_names(q),
            steps: self.closure.steps,
            recipe: self.recipe,
            partition: self
                .classes
                .iter()
                .map(|c| c.iter().map(|&i| d.object(self.free).point_name(i)).collect())
                .collect(),
            carrier: d.object_name(self.carrier),
            extended: self.monad.is_some(),
            structure: points(self.structure.src, &self.structure),
            zeta: points(self.source, &self.zeta),
            quotient: self.quotient.clone(),
            preservation: self.preservation.clone(),
            zeta_is_morphism: self.zeta_is_morphism,
            universal: self.universal.clone(),
            holds: self.holds(),
        }
    }
}

/// Counts, for every presented algebra `(Z,c)` and space morphism
/// `f: (X,φ) → (Z, gr c)`, the homomorphisms `h` out of `(W,b)` with `h ∘ ζ = f`.
fn count_factorizations<M: DoctrineMonad>(m: &M, x: ObjId, phi: &RelOf<M>, w: ObjId, b: &ArrowOf<M>, zeta: &ArrowOf<M>) -> Result<FactorizationCount> {
    let d = m.doctrine();
    let mut out = FactorizationCount::default();
    for z in m.carriers() {
        let (from_x, from_w) = match (d.hom(x, z), d.hom(w, z)) {
            (Ok(a), Ok(b)) => (a, b),
            (Err(Error::CapExceeded { .. }), _) | (_, Err(Error::CapExceeded { .. })) => {
                out.skipped.push(d.object_name(z));
                continue;
            }
            (Err(e), _) | (_, Err(e)) => return Err(e),
        };
        let structures = match algebras(m, z) {
            Ok(s) => s,
            Err(Error::CapExceeded { .. }) => {
                out.skipped.push(d.object_name(z));
                continue;
            }
            Err(e) => return Err(e),
        };
        for c in structures {
            out.algebras += 1;
            let gc = d.graph(&c);
            let mut through: HashMap<ArrowOf<M>, usize> = HashMap::new();
            for h in from_w.iter() {
                if is_homomorphism(m, b, &c, h)? {
                    *through.entry(d.compose(zeta, h)).or_insert(0) += 1;
                }
            }
            for f in from_x.iter() {
                if !is_space_morphism(m, x, phi, z, &gc, f)? {
                    continue;
                }
                out.morphisms += 1;
                let found = through.get(f).copied().unwrap_or(0);
                if found != 1 {
                    out.failure_count += 1;
                    if out.failures.len() < 8 {
                        out.failures.push(FactorizationFailure { arrow: d.arrow_name(f), factorizations: found });
                    }
                }
            }
        }
    }
    Ok(out)
}

fn attempt<M: PresentedMonad>(m: &M, x: ObjId, phi: &Matrix, closure: &PhiClosure<Matrix>, plan: &QuotientPlan) -> Result<Compactification<M>> {
    let d = m.doctrine();
    let q = d.quantale();
    let tx = t_obj(m, x)?;
    let ttx = t_obj(m, tx)?;
    let mu = mult(m, x)?;
    let eta = unit(m, x)?;
    let existing = objects(d).find(|&w| {
        d.object(w).same_structure(&plan.object, q) && m.obj(w).and_then(|t| m.obj(t)).is_some()
    });
    let (grown, w) = match existing {
        Some(w) => (None, w),
        None => {
            let mut obj = plan.object.clone();
            obj.name = fresh_name(d, &obj.name);
            let (g, w) = m.with_carrier(obj)?;
            (Some(g), w)
        }
    };
    let cur = grown.as_ref().unwrap_or(m);
    let d = cur.doctrine();
    let proj = MapArrow::new(tx, w, plan.map.clone());
    if !d.is_base_arrow(&proj) {
        return Err(Error::Precondition(format!("projection {} is not a base arrow", d.arrow_name(&proj))));
    }
    let quotient = check_quotient_arrow(d, &closure.rel, &proj)?;
    let tw = t_obj(cur, w)?;
    let tq = t_arr(cur, &proj)?;
    // b ∘ Tq = q ∘ μ determines b on the image of Tq.
    let mut b = vec![u32::MAX; d.object(tw).size];
    for s in 0..d.object(ttx).size {
        let v = proj.map[mu.apply(s)];
        let slot = &mut b[tq.apply(s)];
        if *slot != u32::MAX && *slot != v {
            return Err(Error::Precondition(format!(
                "the free structure on {} does not descend to {}",
                d.object_name(tx),
                d.object_name(w)
            )));
        }
        *slot = v;
    }
    if b.contains(&u32::MAX) {
        return Err(Error::Precondition(format!("T{} is not surjective", d.arrow_name(&proj))));
    }
    let b = MapArrow::new(tw, w, b);
    if !d.is_base_arrow(&b) || !is_algebra(cur, w, &b)? {
        return Err(Error::Precondition(format!("the induced structure on {} is not an algebra", d.object_name(w))));
    }
    let zeta = d.compose(&eta, &proj);
    let gb = d.graph(&b);
    let zeta_is_morphism = is_space_morphism(cur, x, phi, w, &gb, &zeta)?;
    let preservation = match cur.lift(tx, tx, &closure.rel) {
        Some(lifted) => Some(check_quotient_arrow(d, &lifted, &tq)?),
        None => None,
    };
    let universal = count_factorizations(cur, x, phi, w, &b, &zeta)?;
    Ok(Compactification {
        monad: grown,
        source: x,
        phi: phi.clone(),
        free: tx,
        closure: closure.clone(),
        recipe: plan.recipe,
        classes: plan.classes.clone(),
        carrier: w,
        structure: b,
        zeta,
        quotient,
        preservation,
        zeta_is_morphism,
        universal,
    })
}

/// Compactifies the T-space `(x, phi)`: closes `φ;φ°` under Φ on the free
/// algebra, quotients the free algebra by it, induces the algebra structure
/// and checks the unit ζ against every presented algebra.
pub fn compactify<M: PresentedMonad>(m: &M, x: ObjId, phi: &Matrix) -> Result<Compactification<M>> {
    let d = m.doctrine();
    let tx = t_obj(m, x)?;
    if !d.contains(tx, x, phi) {
        return Err(Error::TypeMismatch(format!("not a relation in R(T{0},{0})", d.object_name(x))));
    }
    if !is_tspace(m, x, phi)? {
        return Err(Error::Precondition(format!("the relation is not a T-space structure on {}", d.object_name(x))));
    }
    let mu = mult(m, x)?;
    let kernel = d.comp(tx, x, tx, phi, &d.conv(tx, x, phi));
    let closure = closure_phi(m, tx, &mu, &kernel)?;
    if let Some(axiom) = equivalence_failure(d, tx, &closure.rel) {
        return Err(Error::Precondition(format!("the closure on {} is not {axiom}", d.object_name(tx))));
    }
    let mut last = None;
    for plan in quotient_plans(d, tx, &closure.rel)? {
        let outcome = attempt(m, x, phi, &closure, &plan);
        let done = matches!(&outcome, Ok(c) if c.holds());
        last = Some(outcome);
        if done {
            break;
        }
    }
    let found = last.ok_or_else(|| Error::Unsupported("no quotient recipe for this doctrine".into()))??;
    if let Some(p) = &found.preservation {
        if !p.holds() {
            return Err(Error::Precondition(format!(
                "T does not preserve the quotient of {}: {} lifted candidates fail to factor",
                d.object_name(tx),
                p.failure_count
            )));
        }
    }
    Ok(found)
}

/// Checks that T sends quotient arrows of equivalences on carriers to
/// quotient arrows of the lifted equivalences.
pub fn check_quotient_preservation<M: PresentedMonad>(m: &M, limits: &Limits) -> Result<LawReport> {
    let d = m.doctrine();
    let q = d.quantale();
    let mut r = LawReport::default();
    for x in m.carriers() {
        if d.fibre_len(x, x).map_or(true, |l| l > limits.fibre_cap) {
            r.skip(format!("relations on {} are too many to enumerate", d.object_name(x)));
            continue;
        }
        for rho in d.fibre(x, x)?.iter().filter(|rho| is_equivalence(d, x, rho)) {
            let rn = || vec![d.object_name(x), d.rel_name(x, x, rho)];
            let mut found = None;
            for plan in quotient_plans(d, x, rho)? {
                let Some(w) = objects(d).find(|&w| d.object(w).same_structure(&plan.object, q) && m.obj(w).is_some()) else {
                    continue;
                };
                let proj = MapArrow::new(x, w, plan.map.clone());
                if d.is_base_arrow(&proj) && check_quotient_arrow(d, rho, &proj)?.holds() {
                    found = Some(proj);
                    break;
                }
            }
            let Some(proj) = found else {
                r.skip(format!("no presented quotient of {} on {}", d.rel_name(x, x, rho), d.object_name(x)));
                continue;
            };
            let (Some(tq), Some(lifted)) = (m.arr(&proj), m.lift(x, x, rho)) else {
                r.skip(format!("T not presented on the quotient of {}", d.rel_name(x, x, rho)));
                continue;
            };
            let v = check_quotient_arrow(d, &lifted, &tq)?;
            r.check("quotient preservation", v.holds(), rn);
            r.cover("quotient preservation", 1, v.skipped.is_empty());
        }
    }
    Ok(r)
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpfunReport {
    pub algebras: usize,
    pub compact_hausdorff: usize,
    /// Every algebra graph is a compact Hausdorff T-space.
    pub graphs_compact_hausdorff: bool,
    pub extensional: bool,
    /// Space morphisms between algebra graphs are homomorphisms; checked
    /// only when the carriers are extensional.
    pub full: Option<bool>,
    pub base_sruc: bool,
    /// The compact Hausdorff doctrine satisfies (sruc); checked when the base does.
    pub chem_sruc: Option<bool>,
    /// The compact Hausdorff and algebra doctrines coincide; checked when the base has (sruc).
    pub chem_matches_em: Option<bool>,
    pub notes: Vec<String>,
}

impl SpfunReport {
    pub fn holds(&self) -> bool {
        self.graphs_compact_hausdorff
            && self.full != Some(false)
            && self.chem_sruc != Some(false)
            && self.chem_matches_em != Some(false)
    }
}

fn same_doctrines<M: DoctrineMonad>(em: &ClosedDoctrine<'_, M>, chem: &ClosedDoctrine<'_, M>) -> Result<bool> {
    let n = em.object_count();
    if chem.object_count() != n {
        return Ok(false);
    }
    let mut partner = Vec::with_capacity(n);
    for i in 0..n {
        let s = em.structure(i);
        let hit = (0..n).find(|&j| chem.structure(j).carrier == s.carrier && chem.structure(j).relation == s.relation);
        match hit {
            Some(j) => partner.push(j),
            None => return Ok(false),
        }
    }
    for i in 0..n {
        for j in 0..n {
            let (pi, pj) = (partner[i], partner[j]);
            let a: HashSet<_> = em.hom(i, j)?.iter().map(|f| f.arrow.clone()).collect();
            let b: HashSet<_> = chem.hom(pi, pj)?.iter().map(|f| f.arrow.clone()).collect();
            let r: HashSet<_> = em.fibre(i, j)?.iter().cloned().collect();
            let s: HashSet<_> = chem.fibre(pi, pj)?.iter().cloned().collect();
            if a != b || r != s {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Checks, on the monad's carriers, that algebra graphs are compact
/// Hausdorff spaces, that the passage is full over extensional carriers, and
/// under (sruc) that compact Hausdorff spaces form a doctrine with (sruc)
/// that coincides with the algebras.
pub fn check_spfun_properties<M: DoctrineMonad>(m: &M) -> Result<SpfunReport>
where
    M::D: Clone,
{
    let d = m.doctrine();
    let carriers = m.carriers();
    let em = em_doctrine(m)?;
    let mut out = SpfunReport { algebras: em.object_count(), graphs_compact_hausdorff: true, ..Default::default() };
    for i in objects(&em) {
        let s = em.structure(i);
        if !(is_tspace(m, s.carrier, &s.relation)? && is_compact_hausdorff(m, s.carrier, &s.relation)?) {
            out.graphs_compact_hausdorff = false;
            out.notes.push(format!("the graph of {} is not a compact Hausdorff space", em.object_name(i)));
        }
    }

    let mut core = carriers.clone();
    for &c in &carriers {
        core.push(t_obj(m, c)?);
    }
    core.sort_unstable();
    core.dedup();
    let restricted = Restricted::new(d.clone(), core.clone());
    out.extensional = true;
    for &c in &carriers {
        let pos = core.iter().position(|&y| y == c).expect("carrier is kept");
        if !is_extensional(&restricted, pos)? {
            out.extensional = false;
        }
    }
    if out.extensional {
        let mut full = true;
        for i in objects(&em) {
            for j in objects(&em) {
                let (s, t) = (em.structure(i), em.structure(j));
                for f in d.hom(s.carrier, t.carrier)?.iter() {
                    if is_space_morphism(m, s.carrier, &s.relation, t.carrier, &t.relation, f)?
                        && !is_homomorphism(m, s.algebra.as_ref().unwrap(), t.algebra.as_ref().unwrap(), f)?
                    {
                        full = false;
                        out.notes.push(format!("{} is a space morphism but not a homomorphism", d.arrow_name(f)));
                    }
                }
            }
        }
        out.full = Some(full);
    } else {
        out.notes.push("carriers are not extensional; fullness not checked".into());
    }

    let base = Restricted::new(d.clone(), carriers.clone());
    out.base_sruc = strongly_complete_objects(&base)?.len() == carriers.len();
    let chem = chem_doctrine(m)?;
    out.compact_hausdorff = chem.object_count();
    if out.base_sruc {
        out.chem_sruc = Some(strongly_complete_objects(&chem)?.len() == chem.object_count());
        out.chem_matches_em = Some(same_doctrines(&em, &chem)?);
    } else {
        out.notes.push("carriers do not satisfy (sruc); the compact Hausdorff doctrine is not compared".into());
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SpaceArrow<A> {
    pub src: ObjId,
    pub tgt: ObjId,
    pub arrow: A,
    pub image: StructArrow<A>,
}

/// T-spaces and their morphisms, with relations those between their
/// compactifications: the algebra doctrine pulled back along compactification.
struct PulledBack<'b, 'a, M: DoctrineMonad> {
    m: &'a M,
    em: &'b ClosedDoctrine<'a, M>,
    spaces: Vec<(ObjId, RelOf<M>)>,
    names: Vec<String>,
    image: Vec<ObjId>,
    zeta: Vec<ArrowOf<M>>,
    homs: Vec<Cached<SpaceArrow<ArrowOf<M>>>>,
}

impl<M: DoctrineMonad> PulledBack<'_, '_, M> {
    fn compute_hom(&self, i: ObjId, j: ObjId) -> Result<Arc<Vec<SpaceArrow<ArrowOf<M>>>>> {
        let d = self.m.doctrine();
        let ((x, phi), (y, psi)) = (&self.spaces[i], &self.spaces[j]);
        let targets = self.em.hom(self.image[i], self.image[j])?;
        let mut out = Vec::new();
        for f in d.hom(*x, *y)?.iter() {
            if !is_space_morphism(self.m, *x, phi, *y, psi, f)? {
                continue;
            }
            let square = d.compose(f, &self.zeta[j]);
            let mut hits = targets.iter().filter(|h| d.compose(&self.zeta[i], &h.arrow) == square);
            match (hits.next(), hits.next()) {
                (Some(h), None) => out.push(SpaceArrow { src: i, tgt: j, arrow: f.clone(), image: h.clone() }),
                _ => {
                    return Err(Error::Precondition(format!(
                        "{} has no unique image between compactifications",
                        d.arrow_name(f)
                    )))
                }
            }
        }
        Ok(Arc::new(out))
    }
}

impl<M: DoctrineMonad> Doctrine for PulledBack<'_, '_, M> {
    type Arrow = SpaceArrow<ArrowOf<M>>;
    type Rel = RelOf<M>;

    fn object_count(&self) -> usize {
        self.spaces.len()
    }
    fn object_name(&self, x: ObjId) -> String {
        self.names[x].clone()
    }
    fn hom(&self, x: ObjId, y: ObjId) -> Result<Arc<Vec<Self::Arrow>>> {
        self.homs[x * self.spaces.len() + y].get_or_init(|| self.compute_hom(x, y)).clone()
    }
    fn src(&self, f: &Self::Arrow) -> ObjId {
        f.src
    }
    fn tgt(&self, f: &Self::Arrow) -> ObjId {
        f.tgt
    }
    fn compose(&self, f: &Self::Arrow, g: &Self::Arrow) -> Self::Arrow {
        SpaceArrow { src: f.src, tgt: g.tgt, arrow: self.m.doctrine().compose(&f.arrow, &g.arrow), image: self.em.compose(&f.image, &g.image) }
    }
    fn identity(&self, x: ObjId) -> Self::Arrow {
        SpaceArrow { src: x, tgt: x, arrow: self.m.doctrine().identity(self.spaces[x].0), image: self.em.identity(self.image[x]) }
    }
    fn arrow_name(&self, f: &Self::Arrow) -> String {
        self.m.doctrine().arrow_name(&f.arrow)
    }
    fn fibre(&self, x: ObjId, y: ObjId) -> Result<Arc<Vec<Self::Rel>>> {
        self.em.fibre(self.image[x], self.image[y])
    }
    fn contains(&self, x: ObjId, y: ObjId, a: &Self::Rel) -> bool {
        self.em.contains(self.image[x], self.image[y], a)
    }
    fn leq(&self, x: ObjId, y: ObjId, a: &Self::Rel, b: &Self::Rel) -> bool {
        self.em.leq(self.image[x], self.image[y], a, b)
    }
    fn diag(&self, x: ObjId) -> Self::Rel {
        self.em.diag(self.image[x])
    }
    fn comp(&self, x: ObjId, y: ObjId, z: ObjId, a: &Self::Rel, b: &Self::Rel) -> Self::Rel {
        self.em.comp(self.image[x], self.image[y], self.image[z], a, b)
    }
    fn conv(&self, x: ObjId, y: ObjId, a: &Self::Rel) -> Self::Rel {
        self.em.conv(self.image[x], self.image[y], a)
    }
    fn graph(&self, f: &Self::Arrow) -> Self::Rel {
        self.em.graph(&f.image)
    }
    fn rel_name(&self, x: ObjId, y: ObjId, a: &Self::Rel) -> String {
        self.em.rel_name(self.image[x], self.image[y], a)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CompactificationEquivalence {
    /// The algebra doctrine satisfies (sruc).
    pub em_sruc: bool,
    pub spaces: Vec<String>,
    /// Spaces that are strongly Cauchy-complete in the pulled-back doctrine.
    pub strongly_complete: Vec<String>,
    /// Algebra to space, when an equivalence was found.
    pub equivalence: Option<Vec<[String; 2]>>,
}

impl CompactificationEquivalence {
    pub fn holds(&self) -> bool {
        self.em_sruc && self.equivalence.is_some()
    }
}

/// Pulls the algebra doctrine back along compactification of all T-spaces on
/// the carriers, restricts to strongly Cauchy-complete spaces, and searches
/// for an equivalence from the algebra doctrine onto that restriction.
pub fn check_compactification_equivalence<M: PresentedMonad>(m: &M, limits: &Limits, max: usize) -> Result<CompactificationEquivalence> {
    let d = m.doctrine();
    let em = em_doctrine(m)?;
    let mut out = CompactificationEquivalence {
        em_sruc: strongly_complete_objects(&em)?.len() == em.object_count(),
        ..Default::default()
    };
    let (mut spaces, mut names, mut image, mut zeta) = (Vec::new(), Vec::new(), Vec::new(), Vec::new());
    for x in m.carriers() {
        for (k, phi) in tspaces(m, x)?.into_iter().enumerate() {
            let c = compactify(m, x, &phi)?;
            if c.monad.is_some() {
                return Err(Error::Precondition(format!(
                    "the compactification of a space on {} needs a carrier outside the presentation",
                    d.object_name(x)
                )));
            }
            if !c.holds() {
                return Err(Error::Precondition(format!("the compactification of a space on {} does not verify", d.object_name(x))));
            }
            let target = objects(&em).find(|&i| {
                let s = em.structure(i);
                s.carrier == c.carrier && s.algebra.as_ref() == Some(&c.structure)
            });
            let Some(target) = target else {
                return Err(Error::Precondition("a compactification is not among the presented algebras".into()));
            };
            names.push(format!("{}.t{k}", d.object_name(x)));
            spaces.push((x, phi));
            image.push(target);
            zeta.push(c.zeta);
        }
    }
    let n = spaces.len();
    let pulled = PulledBack {
        m,
        em: &em,
        spaces,
        names: names.clone(),
        image,
        zeta,
        homs: (0..n * n).map(|_| OnceLock::new()).collect(),
    };
    let keep = strongly_complete_objects(&pulled)?;
    out.spaces = names.clone();
    out.strongly_complete = keep.iter().map(|&i| names[i].clone()).collect();
    let restricted = Restricted::new(pulled, keep.clone());
    if let Some(f) = find_equivalence(&em, &restricted, limits, max)? {
        out.equivalence = Some(
            objects(&em)
                .map(|i| [em.object_name(i), names[keep[f.obj[i]]].clone()])
                .collect(),
        );
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::builtins::{make_vrel_doctrine, ValuedDoctrine};
    use crate::doctrine::check_doctrine_laws;
    use crate::monad::{powerset_monad, IdentityMonad};
    use crate::quantale::{builtin_quantale, QuantaleKind};

    fn identity(carriers: &[usize]) -> IdentityMonad<ValuedDoctrine> {
        let b = builtin_quantale(QuantaleKind::Boolean).unwrap();
        IdentityMonad::new(make_vrel_doctrine(&b, carriers, true, &Limits::default()).unwrap())
    }

    fn rel(n: usize, pairs: &[(usize, usize)]) -> Matrix {
        Matrix::from_fn(n, n, |i, j| pairs.contains(&(i, j)) as u8)
    }

    #[test]
    fn identity_spaces_are_preorders() {
        let m = identity(&[0, 1, 2, 3]);
        let counts: Vec<usize> = (0..4).map(|x| tspaces(&m, x).unwrap().len()).collect();
        assert_eq!(counts, vec![1, 1, 4, 29]);
    }

    #[test]
    fn identity_algebras_are_forced() {
        let m = identity(&[1, 2]);
        let em = em_doctrine(&m).unwrap();
        assert_eq!(em.object_count(), 2);
        assert_eq!(em.fibre(1, 1).unwrap().len(), 16);
        let fd = em_closed_doctrine(&m, &Limits::default()).unwrap();
        assert!(check_doctrine_laws(&fd, &Limits::default()).unwrap().is_clean());
        assert!(find_equivalence(&em, m.doctrine(), &Limits::default(), 1000).unwrap().is_some());
    }

    #[test]
    fn powerset_on_a_point_has_one_algebra() {
        let m = powerset_monad(&[1], &Limits::default()).unwrap();
        let em = em_doctrine(&m).unwrap();
        assert_eq!(em.object_count(), 1);
        let s = em.structure(0);
        assert!(em.contains(0, 0, &m.doctrine().diag(s.carrier)));
    }

    #[test]
    fn powerset_algebras_are_semilattices() {
        let m = powerset_monad(&[2], &Limits::default()).unwrap();
        // Complete join-semilattice structures on two points: the two orders.
        assert_eq!(algebras(&m, 0).unwrap().len(), 2);
        let fd = em_closed_doctrine(&m, &Limits::default()).unwrap();
        assert!(check_doctrine_laws(&fd, &Limits::default()).unwrap().is_clean());
    }

    #[test]
    fn algebra_graphs_are_compact_hausdorff() {
        let m = powerset_monad(&[2], &Limits::default()).unwrap();
        for a in algebras(&m, 0).unwrap() {
            let g = m.doctrine().graph(&a);
            assert!(is_tspace(&m, 0, &g).unwrap());
            assert!(is_compact_hausdorff(&m, 0, &g).unwrap());
        }
    }

    #[test]
    fn empty_carrier_is_a_space() {
        let m = identity(&[0]);
        let phi = Matrix::filled(0, 0, 0);
        assert!(is_tspace(&m, 0, &phi).unwrap());
    }

    #[test]
    fn closure_examples() {
        let m = identity(&[2]);
        let id = m.doctrine().identity(0);
        let bottom = rel(2, &[]);
        assert_eq!(closure_phi(&m, 0, &id, &bottom).unwrap().rel, rel(2, &[(0, 0), (1, 1)]));
        let step = rel(2, &[(0, 1)]);
        let c = closure_phi(&m, 0, &id, &step).unwrap();
        assert_eq!(c.rel, rel(2, &[(0, 0), (1, 1), (0, 1)]));
        assert_eq!(Some(c.rel), least_closed_extension(&m, 0, &id, &step).unwrap());
        let sym = rel(2, &[(0, 1), (1, 0)]);
        assert!(is_equivalence(m.doctrine(), 0, &closure_phi(&m, 0, &id, &sym).unwrap().rel));
    }

    #[test]
    fn closure_matches_search_for_powerset_algebras() {
        let m = powerset_monad(&[2], &Limits::default()).unwrap();
        let d = m.doctrine();
        for a in algebras(&m, 0).unwrap() {
            for alpha in d.fibre(0, 0).unwrap().iter() {
                let c = closure_phi(&m, 0, &a, alpha).unwrap();
                assert_eq!(Some(c.rel), least_closed_extension(&m, 0, &a, alpha).unwrap());
            }
        }
    }

    #[test]
    fn ordered_pair_compactifies_to_a_point() {
        let m = identity(&[1, 2]);
        let c = compactify(&m, 1, &rel(2, &[(0, 0), (1, 1), (0, 1)])).unwrap();
        assert!(c.holds(), "{:?}", c.record(&m));
        assert!(c.monad.is_none());
        assert_eq!(c.carrier, 0);
        assert_eq!(c.closure.rel, rel(2, &[(0, 0), (0, 1), (1, 0), (1, 1)]));
        assert_eq!(&*c.zeta.map, &[0, 0]);
        assert!(c.universal.morphisms > 0);
    }

    #[test]
    fn discrete_space_compactifies_bijectively() {
        let m = identity(&[2]);
        let c = compactify(&m, 0, &rel(2, &[(0, 0), (1, 1)])).unwrap();
        assert!(c.holds());
        assert_eq!(c.carrier, 0);
        assert_eq!(&*c.zeta.map, &[0, 1]);
    }

    #[test]
    fn compactify_adds_a_missing_carrier() {
        let m = identity(&[2]);
        let c = compactify(&m, 0, &rel(2, &[(0, 0), (1, 1), (0, 1), (1, 0)])).unwrap();
        assert!(c.holds());
        let grown = c.monad.as_ref().unwrap();
        assert_eq!(grown.doctrine().object(c.carrier).size, 1);
        assert!(c.record(&m).extended);
    }

    #[test]
    fn powerset_spaces_compactify() {
        let m = powerset_monad(&[1, 2], &Limits::default()).unwrap();
        for x in m.carriers() {
            for phi in tspaces(&m, x).unwrap() {
                let c = compactify(&m, x, &phi).unwrap();
                assert!(c.holds(), "{:?}", c.record(&m));
            }
        }
    }

    #[test]
    fn monads_preserve_quotients() {
        let r = check_quotient_preservation(&identity(&[1, 2, 3]), &Limits::default()).unwrap();
        assert!(r.is_clean() && r.is_exhaustive(), "{r:?}");
        let m = powerset_monad(&[1, 2], &Limits::default()).unwrap();
        let r = check_quotient_preservation(&m, &Limits::default()).unwrap();
        assert!(r.is_clean(), "{r:?}");
    }

    #[test]
    fn spfun_properties_hold() {
        let r = check_spfun_properties(&identity(&[1, 2])).unwrap();
        assert!(r.holds() && r.full == Some(true) && r.chem_sruc == Some(true) && r.chem_matches_em == Some(true), "{r:?}");
        let m = powerset_monad(&[1, 2], &Limits::default()).unwrap();
        let r = check_spfun_properties(&m).unwrap();
        assert!(r.holds(), "{r:?}");
    }

    #[test]
    fn algebras_match_compact_spaces_under_compactification() {
        let m = identity(&[1, 2]);
        let c = check_compactification_equivalence(&m, &Limits::default(), 100_000).unwrap();
        assert!(c.holds(), "{c:?}");
        assert_eq!(c.spaces.len(), 5);
        assert_eq!(c.strongly_complete, vec!["X0.t0".to_string(), "X1.t0".to_string()]);
    }
}
