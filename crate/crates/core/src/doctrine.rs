//! Relational doctrines over finite bases.
//!
//! A [`Doctrine`] bundles a base category with fibres of relations, identity
//! relations, composition and converse. Reindexing is derived from graphs.

use crate::error::{Error, Result};
use crate::report::LawReport;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::collections::HashSet;
use std::fmt::Debug;
use std::hash::Hash;
use std::sync::Arc;

pub type ObjId = usize;

pub trait Doctrine {
    type Arrow: Clone + Eq + Hash + Debug;
    type Rel: Clone + Eq + Hash + Debug;

    fn object_count(&self) -> usize;
    fn object_name(&self, x: ObjId) -> String;

    /// All base arrows `x → y`, in a fixed order.
    fn hom(&self, x: ObjId, y: ObjId) -> Result<Arc<Vec<Self::Arrow>>>;
    fn src(&self, f: &Self::Arrow) -> ObjId;
    fn tgt(&self, f: &Self::Arrow) -> ObjId;
    /// `g ∘ f`, i.e. first `f` then `g`.
    fn compose(&self, f: &Self::Arrow, g: &Self::Arrow) -> Self::Arrow;
    fn identity(&self, x: ObjId) -> Self::Arrow;
    fn arrow_name(&self, f: &Self::Arrow) -> String;

    /// All elements of `R(x,y)`, in a fixed order.
    fn fibre(&self, x: ObjId, y: ObjId) -> Result<Arc<Vec<Self::Rel>>>;
    fn contains(&self, x: ObjId, y: ObjId, a: &Self::Rel) -> bool;
    fn leq(&self, x: ObjId, y: ObjId, a: &Self::Rel, b: &Self::Rel) -> bool;
    fn diag(&self, x: ObjId) -> Self::Rel;
    fn comp(&self, x: ObjId, y: ObjId, z: ObjId, a: &Self::Rel, b: &Self::Rel) -> Self::Rel;
    fn conv(&self, x: ObjId, y: ObjId, a: &Self::Rel) -> Self::Rel;
    fn graph(&self, f: &Self::Arrow) -> Self::Rel;
    fn rel_name(&self, x: ObjId, y: ObjId, a: &Self::Rel) -> String;

    /// `gr f ; gr f°`.
    fn kernel(&self, f: &Self::Arrow) -> Self::Rel {
        let (x, y) = (self.src(f), self.tgt(f));
        let g = self.graph(f);
        self.comp(x, y, x, &g, &self.conv(x, y, &g))
    }

    /// Binary join in the fibre, when it exists.
    fn join(&self, x: ObjId, y: ObjId, a: &Self::Rel, b: &Self::Rel) -> Option<Self::Rel> {
        let els = self.fibre(x, y).ok()?;
        let ups: Vec<&Self::Rel> = els
            .iter()
            .filter(|c| self.leq(x, y, a, c) && self.leq(x, y, b, c))
            .collect();
        ups.iter()
            .find(|c| ups.iter().all(|u| self.leq(x, y, c, u)))
            .map(|c| (*c).clone())
    }

    /// Least element of the fibre, when it exists.
    fn bottom(&self, x: ObjId, y: ObjId) -> Option<Self::Rel> {
        let els = self.fibre(x, y).ok()?;
        els.iter().find(|c| els.iter().all(|u| self.leq(x, y, c, u))).cloned()
    }

    /// Number of elements of `R(x,y)` if known without enumerating.
    fn fibre_len(&self, x: ObjId, y: ObjId) -> Option<u128> {
        self.fibre(x, y).ok().map(|f| f.len() as u128)
    }

    fn sample_rel(&self, x: ObjId, y: ObjId, rng: &mut ChaCha8Rng) -> Result<Self::Rel> {
        let els = self.fibre(x, y)?;
        els.choose(rng)
            .cloned()
            .ok_or_else(|| Error::Precondition(format!("fibre {},{} is empty", x, y)))
    }

    fn sample_arrow(&self, x: ObjId, y: ObjId, rng: &mut ChaCha8Rng) -> Result<Option<Self::Arrow>> {
        Ok(self.hom(x, y)?.choose(rng).cloned())
    }

    /// Laws particular to how the doctrine is presented, such as agreement of
    /// supplied reindexing tables with derived reindexing.
    fn presentation_laws(&self, _limits: &Limits) -> LawReport {
        LawReport::default()
    }

    /// The quantale that relation values live in, for value-backed fibres.
    fn value_quantale(&self) -> Option<&crate::quantale::Quantale> {
        None
    }

    /// The value matrix of a relation, for value-backed fibres.
    fn rel_values(&self, _x: ObjId, _y: ObjId, _a: &Self::Rel) -> Option<crate::matrix::Matrix> {
        None
    }

    /// Length of the longest strict chain in `R(x,y)`, if computable.
    fn fibre_height(&self, x: ObjId, y: ObjId) -> Option<u64> {
        let els = self.fibre(x, y).ok()?;
        if els.len() > 1 << 12 {
            return None;
        }
        poset_height(els.len(), |i, j| self.leq(x, y, &els[i], &els[j]))
    }
}

/// Height of a finite poset given by its order relation, in steps.
pub fn poset_height(n: usize, leq: impl Fn(usize, usize) -> bool) -> Option<u64> {
    // Sort by number of elements below, which is a linear extension.
    let below: Vec<usize> = (0..n).map(|i| (0..n).filter(|&j| leq(j, i)).count()).collect();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by_key(|&i| below[i]);
    let mut depth = vec![0u64; n];
    for (pos, &i) in order.iter().enumerate() {
        for &j in &order[..pos] {
            if j != i && leq(j, i) && !leq(i, j) {
                depth[i] = depth[i].max(depth[j] + 1);
            }
        }
    }
    Some(depth.into_iter().max().unwrap_or(0))
}

pub fn objects<D: Doctrine>(d: &D) -> std::ops::Range<ObjId> {
    0..d.object_count()
}

/// Looks up an object by name.
pub fn object_named<D: Doctrine>(d: &D, name: &str) -> Result<ObjId> {
    objects(d)
        .find(|&x| d.object_name(x) == name)
        .ok_or_else(|| Error::structural(format!("unknown object {name:?}")))
}

fn expect_member<D: Doctrine>(d: &D, x: ObjId, y: ObjId, a: &D::Rel) -> Result<()> {
    if d.contains(x, y, a) {
        Ok(())
    } else {
        Err(Error::TypeMismatch(format!(
            "{a:?} is not a relation in R({},{})",
            d.object_name(x),
            d.object_name(y)
        )))
    }
}

/// `R[f,g](α) = gr f ; α ; gr g°` for `f: A→X`, `g: B→Y`, `α ∈ R(X,Y)`.
pub fn reindex<D: Doctrine>(d: &D, f: &D::Arrow, g: &D::Arrow, a: &D::Rel) -> Result<D::Rel> {
    expect_member(d, d.tgt(f), d.tgt(g), a)?;
    Ok(reindex_unchecked(d, f, g, a))
}

pub(crate) fn reindex_unchecked<D: Doctrine>(d: &D, f: &D::Arrow, g: &D::Arrow, a: &D::Rel) -> D::Rel {
    let (sa, x, sb, y) = (d.src(f), d.tgt(f), d.src(g), d.tgt(g));
    let left = d.comp(sa, x, y, &d.graph(f), a);
    d.comp(sa, y, sb, &left, &d.conv(sb, y, &d.graph(g)))
}

/// `E[f,g](β) = gr f° ; β ; gr g`, left adjoint to [`reindex`].
pub fn left_adjoint_reindex<D: Doctrine>(d: &D, f: &D::Arrow, g: &D::Arrow, b: &D::Rel) -> Result<D::Rel> {
    expect_member(d, d.src(f), d.src(g), b)?;
    Ok(left_adjoint_unchecked(d, f, g, b))
}

pub(crate) fn left_adjoint_unchecked<D: Doctrine>(d: &D, f: &D::Arrow, g: &D::Arrow, b: &D::Rel) -> D::Rel {
    let (sa, x, sb, y) = (d.src(f), d.tgt(f), d.src(g), d.tgt(g));
    let left = d.comp(x, sa, sb, &d.conv(sa, x, &d.graph(f)), b);
    d.comp(x, sb, y, &left, &d.graph(g))
}

/// Extensional equality: equal graphs.
pub fn ext_equal<D: Doctrine>(d: &D, f: &D::Arrow, g: &D::Arrow) -> Result<bool> {
    if d.src(f) != d.src(g) || d.tgt(f) != d.tgt(g) {
        return Err(Error::TypeMismatch(format!(
            "{} and {} are not parallel",
            d.arrow_name(f),
            d.arrow_name(g)
        )));
    }
    Ok(d.graph(f) == d.graph(g))
}

/// Two distinct parallel arrows with the same graph.
#[derive(Debug, Clone, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct ExtensionalityWitness {
    pub first: String,
    pub second: String,
}

/// `None` when `y` is extensional; otherwise a pair of distinct arrows into
/// `y` with equal graphs.
pub fn extensionality_witness<D: Doctrine>(d: &D, y: ObjId) -> Result<Option<ExtensionalityWitness>> {
    for x in objects(d) {
        let hom = d.hom(x, y)?;
        let mut seen: std::collections::HashMap<D::Rel, &D::Arrow> = Default::default();
        for f in hom.iter() {
            if let Some(g) = seen.insert(d.graph(f), f) {
                return Ok(Some(ExtensionalityWitness {
                    first: d.arrow_name(g),
                    second: d.arrow_name(f),
                }));
            }
        }
    }
    Ok(None)
}

pub fn is_extensional<D: Doctrine>(d: &D, y: ObjId) -> Result<bool> {
    Ok(extensionality_witness(d, y)?.is_none())
}

pub fn is_extensional_doctrine<D: Doctrine>(d: &D) -> Result<bool> {
    for y in objects(d) {
        if !is_extensional(d, y)? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// The opposite doctrine: reversed base and fibre orders, reindexing by the
/// left adjoints, same relational operations. Graphs become converses.
#[derive(Debug, Clone)]
pub struct Opposite<D>(pub D);

impl<D: Doctrine> Doctrine for Opposite<D> {
    type Arrow = D::Arrow;
    type Rel = D::Rel;

    fn object_count(&self) -> usize {
        self.0.object_count()
    }
    fn object_name(&self, x: ObjId) -> String {
        self.0.object_name(x)
    }
    fn hom(&self, x: ObjId, y: ObjId) -> Result<Arc<Vec<D::Arrow>>> {
        self.0.hom(y, x)
    }
    fn src(&self, f: &D::Arrow) -> ObjId {
        self.0.tgt(f)
    }
    fn tgt(&self, f: &D::Arrow) -> ObjId {
        self.0.src(f)
    }
    fn compose(&self, f: &D::Arrow, g: &D::Arrow) -> D::Arrow {
        self.0.compose(g, f)
    }
    fn identity(&self, x: ObjId) -> D::Arrow {
        self.0.identity(x)
    }
    fn arrow_name(&self, f: &D::Arrow) -> String {
        self.0.arrow_name(f)
    }
    fn fibre(&self, x: ObjId, y: ObjId) -> Result<Arc<Vec<D::Rel>>> {
        self.0.fibre(x, y)
    }
    fn contains(&self, x: ObjId, y: ObjId, a: &D::Rel) -> bool {
        self.0.contains(x, y, a)
    }
    fn leq(&self, x: ObjId, y: ObjId, a: &D::Rel, b: &D::Rel) -> bool {
        self.0.leq(x, y, b, a)
    }
    fn diag(&self, x: ObjId) -> D::Rel {
        self.0.diag(x)
    }
    fn comp(&self, x: ObjId, y: ObjId, z: ObjId, a: &D::Rel, b: &D::Rel) -> D::Rel {
        self.0.comp(x, y, z, a, b)
    }
    fn conv(&self, x: ObjId, y: ObjId, a: &D::Rel) -> D::Rel {
        self.0.conv(x, y, a)
    }
    fn graph(&self, f: &D::Arrow) -> D::Rel {
        self.0.conv(self.0.src(f), self.0.tgt(f), &self.0.graph(f))
    }
    fn rel_name(&self, x: ObjId, y: ObjId, a: &D::Rel) -> String {
        self.0.rel_name(x, y, a)
    }
    fn fibre_len(&self, x: ObjId, y: ObjId) -> Option<u128> {
        self.0.fibre_len(x, y)
    }
    fn sample_rel(&self, x: ObjId, y: ObjId, rng: &mut ChaCha8Rng) -> Result<D::Rel> {
        self.0.sample_rel(x, y, rng)
    }
    fn sample_arrow(&self, x: ObjId, y: ObjId, rng: &mut ChaCha8Rng) -> Result<Option<D::Arrow>> {
        self.0.sample_arrow(y, x, rng)
    }
    fn fibre_height(&self, x: ObjId, y: ObjId) -> Option<u64> {
        self.0.fibre_height(x, y)
    }
}

/// Limits shared by checkers and searches.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Limits {
    /// Largest fibre or hom-set that may be enumerated.
    pub fibre_cap: u128,
    /// Largest hom-set allowed in functor enumeration.
    pub hom_cap: usize,
    /// Instances per law; beyond it instances are sampled.
    pub budget: u64,
    /// Size of the stand-in population for fibres too large to enumerate.
    pub sample: usize,
    pub seed: u64,
}

impl Default for Limits {
    fn default() -> Self {
        Limits {
            fibre_cap: 1 << 20,
            hom_cap: 8,
            budget: 1 << 22,
            sample: 256,
            seed: 0,
        }
    }
}

/// Elements a law quantifies over: the whole set, or a sample when the set
/// is too large to enumerate.
pub(crate) struct Population<T> {
    pub items: Arc<Vec<T>>,
    pub complete: bool,
}

impl<T> Clone for Population<T> {
    fn clone(&self) -> Self {
        Population {
            items: self.items.clone(),
            complete: self.complete,
        }
    }
}

pub(crate) struct Populations<D: Doctrine> {
    n: usize,
    pub homs: Vec<Population<D::Arrow>>,
    pub rels: Vec<Population<D::Rel>>,
}

impl<D: Doctrine> Populations<D> {
    pub fn build(d: &D, limits: &Limits, rng: &mut ChaCha8Rng) -> Result<Self> {
        let n = d.object_count();
        let mut homs = Vec::with_capacity(n * n);
        for x in 0..n {
            for y in 0..n {
                homs.push(match d.hom(x, y) {
                    Ok(h) => Population { items: h, complete: true },
                    Err(Error::CapExceeded { .. }) => {
                        let mut items = Vec::new();
                        let mut seen = HashSet::new();
                        if x == y {
                            seen.insert(d.identity(x));
                            items.push(d.identity(x));
                        }
                        for _ in 0..limits.sample {
                            if let Some(f) = d.sample_arrow(x, y, rng)? {
                                if seen.insert(f.clone()) {
                                    items.push(f);
                                }
                            }
                        }
                        Population { items: Arc::new(items), complete: false }
                    }
                    Err(e) => return Err(e),
                });
            }
        }
        let mut rels = Vec::with_capacity(n * n);
        for x in 0..n {
            for y in 0..n {
                let too_big = d.fibre_len(x, y).map_or(false, |l| l > limits.fibre_cap);
                let full = if too_big { Err(Error::cap("fibre", None, limits.fibre_cap)) } else { d.fibre(x, y) };
                rels.push(match full {
                    Ok(f) => Population { items: f, complete: true },
                    Err(Error::CapExceeded { .. }) => {
                        let mut items: Vec<D::Rel> = Vec::new();
                        let mut seen: HashSet<D::Rel> = HashSet::new();
                        let mut push = |r: D::Rel| {
                            if seen.insert(r.clone()) {
                                items.push(r);
                            }
                        };
                        if x == y {
                            push(d.diag(x));
                        }
                        if let Some(b) = d.bottom(x, y) {
                            push(b);
                        }
                        for f in homs[x * n + y].items.iter() {
                            push(d.graph(f));
                        }
                        for f in homs[y * n + x].items.iter() {
                            push(d.conv(y, x, &d.graph(f)));
                        }
                        for _ in 0..limits.sample {
                            push(d.sample_rel(x, y, rng)?);
                        }
                        Population { items: Arc::new(items), complete: false }
                    }
                    Err(e) => return Err(e),
                });
            }
        }
        Ok(Populations { n, homs, rels })
    }

    pub fn hom(&self, x: ObjId, y: ObjId) -> &Population<D::Arrow> {
        &self.homs[x * self.n + y]
    }

    pub fn rel(&self, x: ObjId, y: ObjId) -> &Population<D::Rel> {
        &self.rels[x * self.n + y]
    }
}

/// Runs `f` on every index tuple of the product of `sizes`, or on `budget`
/// random tuples when the product is larger. Returns (instances, exhaustive).
pub(crate) fn forall(sizes: &[usize], budget: u64, rng: &mut ChaCha8Rng, mut f: impl FnMut(&[usize])) -> (u64, bool) {
    let total = sizes
        .iter()
        .try_fold(1u64, |acc, &s| acc.checked_mul(s as u64))
        .unwrap_or(u64::MAX);
    if total == 0 {
        return (0, true);
    }
    let mut idx = vec![0usize; sizes.len()];
    if total <= budget {
        loop {
            f(&idx);
            let mut k = sizes.len();
            loop {
                if k == 0 {
                    return (total, true);
                }
                k -= 1;
                idx[k] += 1;
                if idx[k] < sizes[k] {
                    break;
                }
                idx[k] = 0;
            }
        }
    }
    for _ in 0..budget {
        for (slot, &s) in idx.iter_mut().zip(sizes) {
            *slot = rng.gen_range(0..s);
        }
        f(&idx);
    }
    (budget, false)
}

/// All tuples of objects of the given arity.
pub(crate) fn object_tuples(n: usize, arity: usize) -> Vec<Vec<ObjId>> {
    let mut out = Vec::new();
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    forall(&vec![n; arity], u64::MAX, &mut rng, |t| out.push(t.to_vec()));
    out
}

/// Verifies the doctrine axioms: the equations of a relational doctrine,
/// monotonicity, lax naturality of derived reindexing, graph functoriality,
/// the reindexing adjunction and the base category laws.
pub fn check_doctrine_laws<D: Doctrine>(d: &D, limits: &Limits) -> Result<LawReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(limits.seed);
    let pops = Populations::build(d, limits, &mut rng)?;
    let mut r = d.presentation_laws(limits);
    let n = d.object_count();
    let on = |x: ObjId| d.object_name(x);
    let rn = |x: ObjId, y: ObjId, a: &D::Rel| d.rel_name(x, y, a);
    let an = |f: &D::Arrow| d.arrow_name(f);

    // Budget per object tuple, so large presentations still finish.
    let per = |arity: usize| (limits.budget / (n.max(1).pow(arity as u32) as u64)).max(1);

    // Base category.
    for x in 0..n {
        let id = d.identity(x);
        r.check("identity is an endo-arrow", d.src(&id) == x && d.tgt(&id) == x, || vec![on(x)]);
    }
    for t in object_tuples(n, 2) {
        let (x, y) = (t[0], t[1]);
        let h = pops.hom(x, y);
        let (c, e) = forall(&[h.items.len()], per(2), &mut rng, |i| {
            let f = &h.items[i[0]];
            r.check("arrow typing", d.src(f) == x && d.tgt(f) == y, || vec![an(f)]);
            r.check("identity law", d.compose(&d.identity(x), f) == *f && d.compose(f, &d.identity(y)) == *f, || {
                vec![an(f)]
            });
        });
        r.cover("identity law", c, e && h.complete);
    }
    for t in object_tuples(n, 4) {
        let (w, x, y, z) = (t[0], t[1], t[2], t[3]);
        let (hf, hg, hh) = (pops.hom(w, x), pops.hom(x, y), pops.hom(y, z));
        let (c, e) = forall(&[hf.items.len(), hg.items.len(), hh.items.len()], per(4), &mut rng, |i| {
            let (f, g, h) = (&hf.items[i[0]], &hg.items[i[1]], &hh.items[i[2]]);
            r.check(
                "base composition associative",
                d.compose(&d.compose(f, g), h) == d.compose(f, &d.compose(g, h)),
                || vec![an(f), an(g), an(h)],
            );
        });
        r.cover("base composition associative", c, e && hf.complete && hg.complete && hh.complete);
    }

    // Equations.
    for x in 0..n {
        let dx = d.diag(x);
        r.check("d° = d", d.conv(x, x, &dx) == dx, || vec![on(x)]);
    }
    for t in object_tuples(n, 2) {
        let (x, y) = (t[0], t[1]);
        let p = pops.rel(x, y);
        let (dx, dy) = (d.diag(x), d.diag(y));
        let (c, e) = forall(&[p.items.len()], per(2), &mut rng, |i| {
            let a = &p.items[i[0]];
            r.check("d;α = α", d.comp(x, x, y, &dx, a) == *a, || vec![rn(x, y, a)]);
            r.check("α;d = α", d.comp(x, y, y, a, &dy) == *a, || vec![rn(x, y, a)]);
            r.check("α°° = α", d.conv(y, x, &d.conv(x, y, a)) == *a, || vec![rn(x, y, a)]);
        });
        r.cover("unit and involution laws", c, e && p.complete);
    }
    for t in object_tuples(n, 3) {
        let (x, y, z) = (t[0], t[1], t[2]);
        let (pa, pb) = (pops.rel(x, y), pops.rel(y, z));
        let (c, e) = forall(&[pa.items.len(), pb.items.len()], per(3), &mut rng, |i| {
            let (a, b) = (&pa.items[i[0]], &pb.items[i[1]]);
            let lhs = d.conv(x, z, &d.comp(x, y, z, a, b));
            let rhs = d.comp(z, y, x, &d.conv(y, z, b), &d.conv(x, y, a));
            r.check("(α;β)° = β°;α°", lhs == rhs, || vec![rn(x, y, a), rn(y, z, b)]);
        });
        r.cover("(α;β)° = β°;α°", c, e && pa.complete && pb.complete);
    }
    for t in object_tuples(n, 4) {
        let (w, x, y, z) = (t[0], t[1], t[2], t[3]);
        let (pa, pb, pc) = (pops.rel(w, x), pops.rel(x, y), pops.rel(y, z));
        let (c, e) = forall(&[pa.items.len(), pb.items.len(), pc.items.len()], per(4), &mut rng, |i| {
            let (a, b, g) = (&pa.items[i[0]], &pb.items[i[1]], &pc.items[i[2]]);
            let lhs = d.comp(w, y, z, &d.comp(w, x, y, a, b), g);
            let rhs = d.comp(w, x, z, a, &d.comp(x, y, z, b, g));
            r.check("α;(β;γ) = (α;β);γ", lhs == rhs, || vec![rn(w, x, a), rn(x, y, b), rn(y, z, g)]);
        });
        r.cover("α;(β;γ) = (α;β);γ", c, e && pa.complete && pb.complete && pc.complete);
    }

    // Monotonicity. A pair (α, α') is tested when α ⊑ α'; when joins exist
    // the second element is replaced by α ∨ α' so every sample counts.
    let bigger = |x: ObjId, y: ObjId, a: &D::Rel, b: &D::Rel| -> Option<D::Rel> {
        if d.leq(x, y, a, b) {
            Some(b.clone())
        } else {
            d.join(x, y, a, b)
        }
    };
    for t in object_tuples(n, 2) {
        let (x, y) = (t[0], t[1]);
        let p = pops.rel(x, y);
        let (c, e) = forall(&[p.items.len(), p.items.len()], per(2), &mut rng, |i| {
            let a = &p.items[i[0]];
            let b = &p.items[i[1]];
            if d.leq(x, y, a, b) {
                r.check("converse monotone", d.leq(y, x, &d.conv(x, y, a), &d.conv(x, y, b)), || {
                    vec![rn(x, y, a), rn(x, y, b)]
                });
            }
        });
        r.cover("converse monotone", c, e && p.complete);
    }
    for t in object_tuples(n, 3) {
        let (x, y, z) = (t[0], t[1], t[2]);
        let (pa, pb) = (pops.rel(x, y), pops.rel(y, z));
        let exhaustive_pairs = (pa.items.len() as u64).saturating_mul(pa.items.len() as u64).saturating_mul(pb.items.len() as u64) <= per(3);
        let (c, e) = if exhaustive_pairs {
            forall(&[pa.items.len(), pa.items.len(), pb.items.len()], per(3), &mut rng, |i| {
                let (a, a2, b) = (&pa.items[i[0]], &pa.items[i[1]], &pb.items[i[2]]);
                if d.leq(x, y, a, a2) {
                    r.check("composition monotone", d.leq(x, z, &d.comp(x, y, z, a, b), &d.comp(x, y, z, a2, b)), || {
                        vec![rn(x, y, a), rn(x, y, a2), rn(y, z, b)]
                    });
                }
            })
        } else {
            forall(&[pa.items.len(), pa.items.len(), pb.items.len(), pb.items.len()], per(3), &mut rng, |i| {
                let (a, b) = (&pa.items[i[0]], &pb.items[i[2]]);
                if let Some(a2) = bigger(x, y, a, &pa.items[i[1]]) {
                    r.check("composition monotone", d.leq(x, z, &d.comp(x, y, z, a, b), &d.comp(x, y, z, &a2, b)), || {
                        vec![rn(x, y, a), rn(x, y, &a2), rn(y, z, b)]
                    });
                }
                if let Some(b2) = bigger(y, z, b, &pb.items[i[3]]) {
                    r.check("composition monotone", d.leq(x, z, &d.comp(x, y, z, a, b), &d.comp(x, y, z, a, &b2)), || {
                        vec![rn(x, y, a), rn(y, z, b), rn(y, z, &b2)]
                    });
                }
            })
        };
        // The exhaustive branch varies only the left argument; cover the right one too.
        let (c2, e2) = if exhaustive_pairs {
            let pb2 = pb.items.len();
            forall(&[pa.items.len(), pb2, pb2], per(3), &mut rng, |i| {
                let (a, b, b2) = (&pa.items[i[0]], &pb.items[i[1]], &pb.items[i[2]]);
                if d.leq(y, z, b, b2) {
                    r.check("composition monotone", d.leq(x, z, &d.comp(x, y, z, a, b), &d.comp(x, y, z, a, b2)), || {
                        vec![rn(x, y, a), rn(y, z, b), rn(y, z, b2)]
                    });
                }
            })
        } else {
            (0, true)
        };
        r.cover("composition monotone", c + c2, e && e2 && pa.complete && pb.complete);
    }

    // Graphs.
    for x in 0..n {
        r.check("gr id = d", d.graph(&d.identity(x)) == d.diag(x), || vec![on(x)]);
    }
    for t in object_tuples(n, 3) {
        let (x, y, z) = (t[0], t[1], t[2]);
        let (hf, hg) = (pops.hom(x, y), pops.hom(y, z));
        let (c, e) = forall(&[hf.items.len(), hg.items.len()], per(3), &mut rng, |i| {
            let (f, g) = (&hf.items[i[0]], &hg.items[i[1]]);
            let lhs = d.graph(&d.compose(f, g));
            let rhs = d.comp(x, y, z, &d.graph(f), &d.graph(g));
            r.check("gr(g∘f) = gr f ; gr g", lhs == rhs, || vec![an(f), an(g)]);
        });
        r.cover("gr(g∘f) = gr f ; gr g", c, e && hf.complete && hg.complete);
    }

    // Lax naturality of d and converse, unit and counit of the adjunction.
    for t in object_tuples(n, 2) {
        let (a, x) = (t[0], t[1]);
        let h = pops.hom(a, x);
        let (c, e) = forall(&[h.items.len()], per(2), &mut rng, |i| {
            let f = &h.items[i[0]];
            let lhs = d.diag(a);
            let rhs = reindex_unchecked(d, f, f, &d.diag(x));
            r.check("d ⊑ R[f,f](d)", d.leq(a, a, &lhs, &rhs), || vec![an(f)]);
        });
        r.cover("d ⊑ R[f,f](d)", c, e && h.complete);
    }
    for t in object_tuples(n, 4) {
        let (a, b, x, y) = (t[0], t[1], t[2], t[3]);
        let (hf, hg, pa, pb) = (pops.hom(a, x), pops.hom(b, y), pops.rel(x, y), pops.rel(a, b));
        let (c, e) = forall(&[hf.items.len(), hg.items.len(), pa.items.len()], per(4), &mut rng, |i| {
            let (f, g, al) = (&hf.items[i[0]], &hg.items[i[1]], &pa.items[i[2]]);
            let re = reindex_unchecked(d, f, g, al);
            let lhs = d.conv(a, b, &re);
            let rhs = reindex_unchecked(d, g, f, &d.conv(x, y, al));
            r.check("(R[f,g]α)° ⊑ R[g,f](α°)", d.leq(b, a, &lhs, &rhs), || vec![an(f), an(g), rn(x, y, al)]);
            r.check("E[f,g]R[f,g]α ⊑ α", d.leq(x, y, &left_adjoint_unchecked(d, f, g, &re), al), || {
                vec![an(f), an(g), rn(x, y, al)]
            });
        });
        r.cover("(R[f,g]α)° ⊑ R[g,f](α°)", c, e && hf.complete && hg.complete && pa.complete);
        let (c, e) = forall(&[hf.items.len(), hg.items.len(), pb.items.len()], per(4), &mut rng, |i| {
            let (f, g, be) = (&hf.items[i[0]], &hg.items[i[1]], &pb.items[i[2]]);
            let back = reindex_unchecked(d, f, g, &left_adjoint_unchecked(d, f, g, be));
            r.check("β ⊑ R[f,g]E[f,g]β", d.leq(a, b, be, &back), || vec![an(f), an(g), rn(a, b, be)]);
        });
        r.cover("β ⊑ R[f,g]E[f,g]β", c, e && hf.complete && hg.complete && pb.complete);
        let (c, e) = forall(&[hf.items.len(), hg.items.len(), pa.items.len(), pb.items.len()], per(4), &mut rng, |i| {
            let (f, g) = (&hf.items[i[0]], &hg.items[i[1]]);
            let (al, be) = (&pa.items[i[2]], &pb.items[i[3]]);
            let left = d.leq(a, b, be, &reindex_unchecked(d, f, g, al));
            let right = d.leq(x, y, &left_adjoint_unchecked(d, f, g, be), al);
            r.check("β ⊑ R[f,g]α ⇔ E[f,g]β ⊑ α", left == right, || {
                vec![an(f), an(g), rn(x, y, al), rn(a, b, be)]
            });
        });
        r.cover(
            "β ⊑ R[f,g]α ⇔ E[f,g]β ⊑ α",
            c,
            e && hf.complete && hg.complete && pa.complete && pb.complete,
        );
    }
    // R[f,g](α) ; R[g,h](β) ⊑ R[f,h](α;β) over objects A,B,C → X,Y,Z.
    for t in object_tuples(n, 6) {
        let (a, b, cc, x, y, z) = (t[0], t[1], t[2], t[3], t[4], t[5]);
        let (hf, hg, hh) = (pops.hom(a, x), pops.hom(b, y), pops.hom(cc, z));
        let (pa, pb) = (pops.rel(x, y), pops.rel(y, z));
        let sizes = [hf.items.len(), hg.items.len(), hh.items.len(), pa.items.len(), pb.items.len()];
        let (c, e) = forall(&sizes, per(6), &mut rng, |i| {
            let (f, g, h) = (&hf.items[i[0]], &hg.items[i[1]], &hh.items[i[2]]);
            let (al, be) = (&pa.items[i[3]], &pb.items[i[4]]);
            let lhs = d.comp(a, b, cc, &reindex_unchecked(d, f, g, al), &reindex_unchecked(d, g, h, be));
            let rhs = reindex_unchecked(d, f, h, &d.comp(x, y, z, al, be));
            r.check("R[f,g]α;R[g,h]β ⊑ R[f,h](α;β)", d.leq(a, cc, &lhs, &rhs), || {
                vec![an(f), an(g), an(h), rn(x, y, al), rn(y, z, be)]
            });
        });
        let complete = hf.complete && hg.complete && hh.complete && pa.complete && pb.complete;
        r.cover("R[f,g]α;R[g,h]β ⊑ R[f,h](α;β)", c, e && complete);
    }
    Ok(r)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn forall_enumerates_small_products() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let mut seen = Vec::new();
        let (n, e) = forall(&[2, 3], 100, &mut rng, |i| seen.push((i[0], i[1])));
        assert_eq!((n, e), (6, true));
        assert_eq!(seen.len(), 6);
        assert_eq!(seen[5], (1, 2));
        let (n, e) = forall(&[10, 10], 7, &mut rng, |_| {});
        assert_eq!((n, e), (7, false));
        assert_eq!(forall(&[0, 3], 10, &mut rng, |_| {}), (0, true));
    }

    #[test]
    fn poset_height_of_a_chain() {
        assert_eq!(poset_height(4, |i, j| i <= j), Some(3));
        assert_eq!(poset_height(3, |i, j| i == j), Some(0));
    }
}
