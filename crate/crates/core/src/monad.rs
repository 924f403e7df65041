//! Monads on a doctrine: a monad on the base together with a lifting of
//! relations that is a 1-arrow, and unit and multiplication that are 2-arrows.

use crate::builtins::{Flavor, MapArrow, ValuedDoctrine, ValuedObject};
use crate::doctrine::{objects, Doctrine, Limits, ObjId};
use crate::error::{Error, Result};
use crate::finite::FiniteDoctrine;
use crate::matrix::Matrix;
use crate::quantale::{builtin_quantale, QuantaleKind};
use crate::report::LawReport;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, HashMap};

pub type ArrowOf<M> = <<M as DoctrineMonad>::D as Doctrine>::Arrow;
pub type RelOf<M> = <<M as DoctrineMonad>::D as Doctrine>::Rel;

/// A monad on the base of a doctrine with a relation lifting T̂.
///
/// Components are partial: they are `None` where the presentation lacks the
/// objects involved, e.g. at the top level of a truncated tower TX, TTX, ….
pub trait DoctrineMonad {
    type D: Doctrine;

    fn doctrine(&self) -> &Self::D;
    fn name(&self) -> String;
    fn obj(&self, x: ObjId) -> Option<ObjId>;
    fn arr(&self, f: &<Self::D as Doctrine>::Arrow) -> Option<<Self::D as Doctrine>::Arrow>;
    /// T̂α ∈ R(TX,TY) for α ∈ R(X,Y).
    fn lift(&self, x: ObjId, y: ObjId, a: &<Self::D as Doctrine>::Rel) -> Option<<Self::D as Doctrine>::Rel>;
    /// η_X: X → TX.
    fn unit(&self, x: ObjId) -> Option<<Self::D as Doctrine>::Arrow>;
    /// μ_X: TTX → TX.
    fn mult(&self, x: ObjId) -> Option<<Self::D as Doctrine>::Arrow>;

    /// Objects over which algebras and spaces are enumerated.
    fn carriers(&self) -> Vec<ObjId> {
        objects(self.doctrine())
            .filter(|&x| self.obj(x).and_then(|t| self.obj(t)).is_some())
            .collect()
    }

    /// Whether T on arrows out of `x` is costly to compute.
    fn heavy(&self, _x: ObjId) -> bool {
        false
    }
}

/// A monad over a matrix doctrine whose presentation can grow by a carrier.
pub trait PresentedMonad: DoctrineMonad<D = ValuedDoctrine> + Sized {
    fn with_carrier(&self, obj: ValuedObject) -> Result<(Self, ObjId)>;
}

#[derive(Debug, Clone)]
pub struct IdentityMonad<D> {
    pub doctrine: D,
}

impl<D: Doctrine> IdentityMonad<D> {
    pub fn new(doctrine: D) -> Self {
        IdentityMonad { doctrine }
    }
}

impl<D: Doctrine> DoctrineMonad for IdentityMonad<D> {
    type D = D;

    fn doctrine(&self) -> &D {
        &self.doctrine
    }
    fn name(&self) -> String {
        "identity".into()
    }
    fn obj(&self, x: ObjId) -> Option<ObjId> {
        Some(x)
    }
    fn arr(&self, f: &D::Arrow) -> Option<D::Arrow> {
        Some(f.clone())
    }
    fn lift(&self, _x: ObjId, _y: ObjId, a: &D::Rel) -> Option<D::Rel> {
        Some(a.clone())
    }
    fn unit(&self, x: ObjId) -> Option<D::Arrow> {
        Some(self.doctrine.identity(x))
    }
    fn mult(&self, x: ObjId) -> Option<D::Arrow> {
        Some(self.doctrine.identity(x))
    }
    fn carriers(&self) -> Vec<ObjId> {
        objects(&self.doctrine).collect()
    }
}

impl PresentedMonad for IdentityMonad<ValuedDoctrine> {
    fn with_carrier(&self, obj: ValuedObject) -> Result<(Self, ObjId)> {
        let (d, x) = self.doctrine.with_object(obj)?;
        Ok((IdentityMonad::new(d), x))
    }
}

/// Points of a tower level beyond this are not presented.
const MAX_POINTS: usize = 1 << 16;
/// Deepest tower level; associativity at a carrier needs level 3.
const MAX_LEVEL: usize = 3;
/// T on arrows out of objects with more image points than this is costly.
const HEAVY_POINTS: usize = 1 << 12;

/// The powerset monad on finite sets over Boolean relations, with the
/// Egli-Milner lifting. Objects form towers X, PX, PPX, PPPX; a point of a
/// level is the bitmask of a subset of the level below.
#[derive(Debug, Clone)]
pub struct PowersetMonad {
    d: ValuedDoctrine,
    carriers: Vec<(String, usize)>,
    base: Vec<ObjId>,
    next: Vec<Option<ObjId>>,
    lift_cap: usize,
    limits: Limits,
}

pub fn powerset_monad(carriers: &[usize], limits: &Limits) -> Result<PowersetMonad> {
    let named: Vec<(String, usize)> = carriers.iter().enumerate().map(|(i, &n)| (format!("X{i}"), n)).collect();
    powerset_monad_named(&named, limits)
}

pub fn powerset_monad_named(carriers: &[(String, usize)], limits: &Limits) -> Result<PowersetMonad> {
    let b = builtin_quantale(QuantaleKind::Boolean)?;
    let mut objs = Vec::new();
    let mut next = Vec::new();
    let mut base = Vec::new();
    for (name, n) in carriers {
        if *n > 16 {
            return Err(Error::cap(format!("powerset of {name}"), Some(1u128 << n), MAX_POINTS as u128));
        }
        let mut size = *n;
        let mut label = name.clone();
        base.push(objs.len());
        for level in 0..=MAX_LEVEL {
            objs.push(ValuedObject::set(label.clone(), size));
            let grows = level < MAX_LEVEL && size <= 16 && (1usize << size) <= MAX_POINTS;
            next.push(if grows { Some(objs.len()) } else { None });
            if !grows {
                break;
            }
            size = 1 << size;
            label = format!("P{label}");
        }
    }
    let d = ValuedDoctrine::new(b, Flavor::Rel, objs, limits)?;
    Ok(PowersetMonad {
        d,
        carriers: carriers.to_vec(),
        base,
        next,
        lift_cap: MAX_POINTS,
        limits: *limits,
    })
}

impl PowersetMonad {
    fn size(&self, x: ObjId) -> usize {
        self.d.object(x).size
    }

    /// The base carriers, without their powerset levels.
    pub fn base(&self) -> &[ObjId] {
        &self.base
    }
}

fn image_mask(f: &MapArrow, mask: usize) -> u32 {
    let mut out = 0u32;
    let mut m = mask;
    while m != 0 {
        let i = m.trailing_zeros() as usize;
        out |= 1 << f.map[i];
        m &= m - 1;
    }
    out
}

impl DoctrineMonad for PowersetMonad {
    type D = ValuedDoctrine;

    fn doctrine(&self) -> &ValuedDoctrine {
        &self.d
    }
    fn name(&self) -> String {
        "powerset".into()
    }
    fn obj(&self, x: ObjId) -> Option<ObjId> {
        self.next[x]
    }
    fn arr(&self, f: &MapArrow) -> Option<MapArrow> {
        let (tx, ty) = (self.next[f.src]?, self.next[f.tgt]?);
        let map = (0..self.size(tx)).map(|s| image_mask(f, s)).collect();
        Some(MapArrow::new(tx, ty, map))
    }
    fn lift(&self, x: ObjId, y: ObjId, a: &Matrix) -> Option<Matrix> {
        let (tx, ty) = (self.next[x]?, self.next[y]?);
        let (ntx, nty) = (self.size(tx), self.size(ty));
        if ntx.checked_mul(nty)? > self.lift_cap {
            return None;
        }
        let nx = self.size(x);
        let related: Vec<u32> = (0..nx)
            .map(|i| (0..self.size(y)).filter(|&j| a.get(i, j) != 0).fold(0, |m, j| m | 1 << j))
            .collect();
        let mut out = Matrix::filled(ntx, nty, 0);
        for s in 0..ntx {
            let reach = (0..nx).filter(|i| s & (1 << i) != 0).fold(0u32, |m, i| m | related[i]);
            for t in 0..nty {
                let t32 = t as u32;
                let forth = (0..nx).all(|i| s & (1 << i) == 0 || related[i] & t32 != 0);
                let back = t32 & !reach == 0;
                if forth && back {
                    out.set(s, t, 1);
                }
            }
        }
        Some(out)
    }
    fn unit(&self, x: ObjId) -> Option<MapArrow> {
        let tx = self.next[x]?;
        Some(MapArrow::new(x, tx, (0..self.size(x)).map(|i| 1u32 << i).collect()))
    }
    fn mult(&self, x: ObjId) -> Option<MapArrow> {
        let tx = self.next[x]?;
        let ttx = self.next[tx]?;
        let map = (0..self.size(ttx))
            .map(|s| {
                let mut out = 0u32;
                let mut m = s;
                while m != 0 {
                    out |= m.trailing_zeros();
                    m &= m - 1;
                }
                out
            })
            .collect();
        Some(MapArrow::new(ttx, tx, map))
    }
    fn carriers(&self) -> Vec<ObjId> {
        self.base.clone()
    }
    fn heavy(&self, x: ObjId) -> bool {
        self.next[x].map_or(false, |t| self.size(t) > HEAVY_POINTS)
    }
}

impl PresentedMonad for PowersetMonad {
    fn with_carrier(&self, obj: ValuedObject) -> Result<(Self, ObjId)> {
        if obj.dist.is_some() || obj.extent.is_some() {
            return Err(Error::Unsupported("powerset carriers are plain sets".into()));
        }
        let mut carriers = self.carriers.clone();
        carriers.push((obj.name, obj.size));
        let grown = powerset_monad_named(&carriers, &self.limits)?;
        let x = *grown.base.last().expect("a carrier was added");
        Ok((grown, x))
    }
}

/// The wire form of a tabulated monad, keyed by object, arrow and element ids.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct MonadJson {
    #[serde(rename = "T_obj")]
    pub t_obj: BTreeMap<String, String>,
    #[serde(rename = "T_arr")]
    pub t_arr: BTreeMap<String, String>,
    /// `"X,Y"` to a map from elements of R(X,Y) to elements of R(TX,TY).
    pub lift: BTreeMap<String, BTreeMap<String, String>>,
    pub eta: BTreeMap<String, String>,
    pub mu: BTreeMap<String, String>,
}

/// A monad given by tables over a [`FiniteDoctrine`].
#[derive(Debug, Clone)]
pub struct TabulatedMonad {
    d: FiniteDoctrine,
    t_obj: Vec<Option<ObjId>>,
    t_arr: Vec<Option<usize>>,
    lift: HashMap<(ObjId, ObjId), Vec<u32>>,
    eta: Vec<Option<usize>>,
    mu: Vec<Option<usize>>,
}

impl TabulatedMonad {
    /// Reads the monad stored under the `monad` key of the doctrine's extras.
    pub fn from_extras(d: FiniteDoctrine) -> Result<Option<Self>> {
        let Some(v) = d.extras.get("monad").cloned() else {
            return Ok(None);
        };
        let j: MonadJson = serde_json::from_value(v).map_err(|e| Error::structural(format!("monad: {e}")))?;
        Self::from_json(d, &j).map(Some)
    }

    pub fn from_json(d: FiniteDoctrine, j: &MonadJson) -> Result<Self> {
        let n = d.object_count();
        let mut errs = Vec::new();
        let obj = |name: &str, errs: &mut Vec<String>| {
            let found = objects(&d).find(|&x| d.object_name(x) == name);
            if found.is_none() {
                errs.push(format!("monad: unknown object {name:?}"));
            }
            found
        };
        let arrow = |id: &str, errs: &mut Vec<String>| {
            let found = d.base.arrow_index(id);
            if found.is_none() {
                errs.push(format!("monad: unknown arrow {id:?}"));
            }
            found
        };
        let mut t_obj = vec![None; n];
        for (k, v) in &j.t_obj {
            if let (Some(x), Some(t)) = (obj(k, &mut errs), obj(v, &mut errs)) {
                t_obj[x] = Some(t);
            }
        }
        let mut t_arr = vec![None; d.base.arrow_count()];
        for (k, v) in &j.t_arr {
            if let (Some(f), Some(g)) = (arrow(k, &mut errs), arrow(v, &mut errs)) {
                let expect = (t_obj[d.src(&f)], t_obj[d.tgt(&f)]);
                if expect != (Some(d.src(&g)), Some(d.tgt(&g))) {
                    errs.push(format!("monad: T_arr {k} -> {v} has the wrong type"));
                }
                t_arr[f] = Some(g);
            }
        }
        let component = |table: &BTreeMap<String, String>, what: &str, typed: &dyn Fn(ObjId) -> Option<(ObjId, ObjId)>, errs: &mut Vec<String>| {
            let mut out = vec![None; n];
            for (k, v) in table {
                if let (Some(x), Some(f)) = (obj(k, errs), arrow(v, errs)) {
                    if typed(x) != Some((d.src(&f), d.tgt(&f))) {
                        errs.push(format!("monad: {what} at {k} has the wrong type"));
                    }
                    out[x] = Some(f);
                }
            }
            out
        };
        let eta = component(&j.eta, "eta", &|x| Some((x, t_obj[x]?)), &mut errs);
        let mu = component(&j.mu, "mu", &|x| Some((t_obj[t_obj[x]?]?, t_obj[x]?)), &mut errs);
        let mut lift = HashMap::new();
        for (key, table) in &j.lift {
            let Some((xs, ys)) = key.split_once(',') else {
                errs.push(format!("monad: lift key {key:?} is not \"X,Y\""));
                continue;
            };
            let (Some(x), Some(y)) = (obj(xs, &mut errs), obj(ys, &mut errs)) else {
                continue;
            };
            let (Some(tx), Some(ty)) = (t_obj[x], t_obj[y]) else {
                errs.push(format!("monad: lift at {key} without T on both objects"));
                continue;
            };
            let (src, tgt) = (d.fibre_table(x, y), d.fibre_table(tx, ty));
            let mut map = vec![u32::MAX; src.len()];
            for (a, b) in table {
                match (src.index(a), tgt.index(b)) {
                    (Some(i), Some(k)) => map[i as usize] = k,
                    _ => errs.push(format!("monad: lift at {key} maps unknown element {a:?} or {b:?}")),
                }
            }
            if map.contains(&u32::MAX) {
                errs.push(format!("monad: lift at {key} is not total"));
            }
            lift.insert((x, y), map);
        }
        if !errs.is_empty() {
            return Err(Error::Structural(errs));
        }
        Ok(TabulatedMonad { d, t_obj, t_arr, lift, eta, mu })
    }

    pub fn to_json(&self) -> MonadJson {
        let d = &self.d;
        let on = |x: ObjId| d.object_name(x);
        let mut j = MonadJson::default();
        for x in objects(d) {
            if let Some(t) = self.t_obj[x] {
                j.t_obj.insert(on(x), on(t));
            }
            if let Some(f) = self.eta[x] {
                j.eta.insert(on(x), d.arrow_name(&f));
            }
            if let Some(f) = self.mu[x] {
                j.mu.insert(on(x), d.arrow_name(&f));
            }
        }
        for (f, g) in self.t_arr.iter().enumerate() {
            if let Some(g) = g {
                j.t_arr.insert(d.arrow_name(&f), d.arrow_name(g));
            }
        }
        for (&(x, y), map) in &self.lift {
            let (tx, ty) = (self.t_obj[x].unwrap(), self.t_obj[y].unwrap());
            let table = map
                .iter()
                .enumerate()
                .map(|(a, b)| (d.rel_name(x, y, &(a as u32)), d.rel_name(tx, ty, b)))
                .collect();
            j.lift.insert(format!("{},{}", on(x), on(y)), table);
        }
        j
    }
}

/// The identity monad written out as tables.
pub fn identity_monad_json(d: &FiniteDoctrine) -> MonadJson {
    let mut j = MonadJson::default();
    for x in objects(d) {
        let name = d.object_name(x);
        let id = d.arrow_name(&d.identity(x));
        j.t_obj.insert(name.clone(), name.clone());
        j.eta.insert(name.clone(), id.clone());
        j.mu.insert(name, id);
    }
    for f in 0..d.base.arrow_count() {
        j.t_arr.insert(d.arrow_name(&f), d.arrow_name(&f));
    }
    for x in objects(d) {
        for y in objects(d) {
            let fibre = d.fibre_table(x, y);
            let table = fibre.elements.iter().map(|e| (e.clone(), e.clone())).collect();
            j.lift.insert(format!("{},{}", d.object_name(x), d.object_name(y)), table);
        }
    }
    j
}

impl DoctrineMonad for TabulatedMonad {
    type D = FiniteDoctrine;

    fn doctrine(&self) -> &FiniteDoctrine {
        &self.d
    }
    fn name(&self) -> String {
        "tabulated".into()
    }
    fn obj(&self, x: ObjId) -> Option<ObjId> {
        self.t_obj[x]
    }
    fn arr(&self, f: &usize) -> Option<usize> {
        self.t_arr[*f]
    }
    fn lift(&self, x: ObjId, y: ObjId, a: &u32) -> Option<u32> {
        self.lift.get(&(x, y)).map(|m| m[*a as usize])
    }
    fn unit(&self, x: ObjId) -> Option<usize> {
        self.eta[x]
    }
    fn mult(&self, x: ObjId) -> Option<usize> {
        self.mu[x]
    }
}

/// Elements per fibre or hom-set taken in full by the monad checker.
const POPULATION_CAP: usize = 4096;
/// Instances per law and tuple of objects.
const TUPLE_BUDGET: u64 = 1 << 12;
/// Instances per tuple when T on arrows is costly.
const HEAVY_BUDGET: u64 = 16;

struct Pop<T> {
    items: Vec<T>,
    complete: bool,
}

fn arrow_pop<D: Doctrine>(d: &D, x: ObjId, y: ObjId, size: usize, rng: &mut ChaCha8Rng) -> Result<Pop<D::Arrow>> {
    match d.hom(x, y) {
        Ok(h) if h.len() <= size => Ok(Pop { items: h.to_vec(), complete: true }),
        Ok(h) => {
            let mut items: Vec<D::Arrow> = h.choose_multiple(rng, size).cloned().collect();
            if x == y && !items.contains(&d.identity(x)) {
                items.push(d.identity(x));
            }
            Ok(Pop { items, complete: false })
        }
        Err(Error::CapExceeded { .. }) => {
            let mut items = Vec::new();
            if x == y {
                items.push(d.identity(x));
            }
            for _ in 0..size {
                if let Some(f) = d.sample_arrow(x, y, rng)? {
                    if !items.contains(&f) {
                        items.push(f);
                    }
                }
            }
            Ok(Pop { items, complete: false })
        }
        Err(e) => Err(e),
    }
}

fn rel_pop<D: Doctrine>(d: &D, x: ObjId, y: ObjId, size: usize, arrows: &[D::Arrow], rng: &mut ChaCha8Rng) -> Result<Pop<D::Rel>> {
    if d.fibre_len(x, y).map_or(false, |l| l <= POPULATION_CAP as u128) {
        let f = d.fibre(x, y)?;
        return Ok(Pop { items: f.to_vec(), complete: true });
    }
    let mut items: Vec<D::Rel> = Vec::new();
    let mut push = |r: D::Rel| {
        if !items.contains(&r) {
            items.push(r);
        }
    };
    if x == y {
        push(d.diag(x));
    }
    if let Some(b) = d.bottom(x, y) {
        push(b);
    }
    for f in arrows {
        push(d.graph(f));
    }
    for _ in 0..size {
        push(d.sample_rel(x, y, rng)?);
    }
    Ok(Pop { items, complete: false })
}

/// Verifies the monad laws on the base, that the lifting is a 1-arrow, and
/// that unit and multiplication are 2-arrows, wherever the presentation
/// contains the objects involved. Uncheckable instances are listed as skipped.
pub fn check_monad<M: DoctrineMonad>(m: &M, limits: &Limits) -> Result<LawReport> {
    let d = m.doctrine();
    let mut r = LawReport::default();
    let mut rng = ChaCha8Rng::seed_from_u64(limits.seed);
    let per_tuple = limits.budget.min(TUPLE_BUDGET);
    let live: Vec<ObjId> = objects(d).filter(|&x| m.obj(x).is_some()).collect();
    let on = |x: ObjId| d.object_name(x);
    let an = |f: &ArrowOf<M>| d.arrow_name(f);

    let mut units = HashMap::new();
    let mut mults = HashMap::new();
    for &x in &live {
        let tx = m.obj(x).unwrap();
        match m.arr(&d.identity(x)) {
            Some(t) => r.check("functor identity", t == d.identity(tx), || vec![on(x)]),
            None => r.fail("T on arrows presented", vec![an(&d.identity(x))]),
        }
        r.cover("functor identity", 1, true);
        let Some(eta) = m.unit(x) else {
            r.fail("unit presented", vec![on(x)]);
            continue;
        };
        if (d.src(&eta), d.tgt(&eta)) != (x, tx) {
            r.fail("unit typing", vec![on(x), an(&eta)]);
            continue;
        }
        units.insert(x, eta.clone());
        let Some(ttx) = m.obj(tx) else {
            r.skip(format!("multiplication at {}: TTX not presented", on(x)));
            continue;
        };
        let Some(mu) = m.mult(x) else {
            r.fail("multiplication presented", vec![on(x)]);
            continue;
        };
        if (d.src(&mu), d.tgt(&mu)) != (ttx, tx) {
            r.fail("multiplication typing", vec![on(x), an(&mu)]);
            continue;
        }
        mults.insert(x, mu.clone());
        if let Some(eta_t) = m.unit(tx) {
            r.check("left unit", d.compose(&eta_t, &mu) == d.identity(tx), || vec![on(x)]);
            r.cover("left unit", 1, true);
        }
        match m.arr(&eta) {
            Some(t_eta) => {
                r.check("right unit", d.compose(&t_eta, &mu) == d.identity(tx), || vec![on(x)]);
                r.cover("right unit", 1, true);
            }
            None => r.fail("T on arrows presented", vec![an(&eta)]),
        }
        match (m.obj(ttx), m.mult(tx), m.arr(&mu)) {
            (Some(_), Some(mu_t), Some(t_mu)) => {
                let outer = d.compose(&mu_t, &mu);
                let inner = d.compose(&t_mu, &mu);
                r.check("associativity", outer == inner, || vec![on(x), an(&outer), an(&inner)]);
                r.cover("associativity", 1, true);
            }
            _ => r.skip(format!("associativity at {}: T³X not presented", on(x))),
        }
    }

    // Populations of arrows and relations between objects with a T-image.
    let mut homs: HashMap<(ObjId, ObjId), (Pop<ArrowOf<M>>, Vec<Option<ArrowOf<M>>>)> = HashMap::new();
    for &x in &live {
        for &y in &live {
            let size = if m.heavy(x) { HEAVY_BUDGET as usize } else { POPULATION_CAP };
            let pop = arrow_pop(d, x, y, size.min(limits.sample.max(1) * 16), &mut rng)?;
            let images = pop.items.iter().map(|f| m.arr(f)).collect();
            homs.insert((x, y), (pop, images));
        }
    }
    for &x in &live {
        for &y in &live {
            let (pop, images) = &homs[&(x, y)];
            let mut checked = 0;
            for (f, tf) in pop.items.iter().zip(images) {
                let Some(tf) = tf else {
                    r.fail("T on arrows presented", vec![an(f)]);
                    continue;
                };
                checked += 1;
                let (tx, ty) = (m.obj(x).unwrap(), m.obj(y).unwrap());
                r.check("functor typing", (d.src(tf), d.tgt(tf)) == (tx, ty), || vec![an(f), an(tf)]);
                if let (Some(ex), Some(ey)) = (units.get(&x), units.get(&y)) {
                    r.check("unit naturality", d.compose(f, ey) == d.compose(ex, tf), || vec![an(f)]);
                    r.cover("unit naturality", 1, pop.complete);
                }
                if let (Some(mx), Some(my)) = (mults.get(&x), mults.get(&y)) {
                    if m.heavy(m.obj(x).unwrap()) && checked > HEAVY_BUDGET {
                        r.cover("multiplication naturality", 0, false);
                        continue;
                    }
                    if let Some(ttf) = m.arr(tf) {
                        r.check("multiplication naturality", d.compose(&ttf, my) == d.compose(mx, tf), || vec![an(f)]);
                        r.cover("multiplication naturality", 1, pop.complete);
                    }
                }
            }
            r.cover("functor typing", checked, pop.complete);
        }
    }
    for &x in &live {
        for &y in &live {
            for &z in &live {
                let (p, ip) = &homs[&(x, y)];
                let (q, iq) = &homs[&(y, z)];
                let budget = if m.heavy(x) { HEAVY_BUDGET } else { per_tuple };
                let (n, exhaustive) = crate::doctrine::forall(&[p.items.len(), q.items.len()], budget, &mut rng, |ix| {
                    let (f, g) = (&p.items[ix[0]], &q.items[ix[1]]);
                    if let (Some(tf), Some(tg), Some(tfg)) = (&ip[ix[0]], &iq[ix[1]], m.arr(&d.compose(f, g))) {
                        r.check("functor composition", tfg == d.compose(tf, tg), || vec![an(f), an(g)]);
                    }
                });
                r.cover("functor composition", n, exhaustive && p.complete && q.complete);
            }
        }
    }

    // The lifting, on pairs of objects where it is presented.
    let mut rels: HashMap<(ObjId, ObjId), (Pop<RelOf<M>>, Vec<RelOf<M>>)> = HashMap::new();
    for &x in &live {
        for &y in &live {
            let arrows = &homs[&(x, y)].0.items;
            let pop = rel_pop(d, x, y, limits.sample, arrows, &mut rng)?;
            let lifted: Option<Vec<RelOf<M>>> = pop.items.iter().map(|a| m.lift(x, y, a)).collect();
            match lifted {
                Some(l) => {
                    rels.insert((x, y), (pop, l));
                }
                None => r.skip(format!("lifting of R({},{}) not presented", on(x), on(y))),
            }
        }
    }
    for (&(x, y), (pop, lifted)) in &rels {
        let (tx, ty) = (m.obj(x).unwrap(), m.obj(y).unwrap());
        let rn = |a: &RelOf<M>| d.rel_name(x, y, a);
        for (a, ta) in pop.items.iter().zip(lifted) {
            r.check("lift typing", d.contains(tx, ty, ta), || vec![rn(a), d.rel_name(tx, ty, ta)]);
            if let Some(tc) = m.lift(y, x, &d.conv(x, y, a)) {
                r.check("lift preserves converse", tc == d.conv(tx, ty, ta), || vec![rn(a)]);
                r.cover("lift preserves converse", 1, pop.complete);
            }
            if let (Some(ex), Some(ey)) = (units.get(&x), units.get(&y)) {
                let bound = d.comp(x, ty, y, &d.comp(x, tx, ty, &d.graph(ex), ta), &d.conv(y, ty, &d.graph(ey)));
                r.check("unit is a 2-arrow", d.leq(x, y, a, &bound), || vec![rn(a)]);
                r.cover("unit is a 2-arrow", 1, pop.complete);
            }
            if let (Some(mx), Some(my)) = (mults.get(&x), mults.get(&y)) {
                if let Some(tta) = m.lift(tx, ty, ta) {
                    let (ttx, tty) = (m.obj(tx).unwrap(), m.obj(ty).unwrap());
                    let bound = d.comp(ttx, ty, tty, &d.comp(ttx, tx, ty, &d.graph(mx), ta), &d.conv(tty, ty, &d.graph(my)));
                    r.check("multiplication is a 2-arrow", d.leq(ttx, tty, &tta, &bound), || vec![rn(a)]);
                    r.cover("multiplication is a 2-arrow", 1, pop.complete);
                }
            }
        }
        r.cover("lift typing", pop.items.len() as u64, pop.complete);
        let (n, exhaustive) = crate::doctrine::forall(&[pop.items.len(), pop.items.len()], per_tuple, &mut rng, |ix| {
            let (a, b) = (&pop.items[ix[0]], &pop.items[ix[1]]);
            let (ta, tb) = (&lifted[ix[0]], &lifted[ix[1]]);
            match d.join(x, y, a, b) {
                Some(c) => {
                    if let Some(tc) = m.lift(x, y, &c) {
                        let ok = d.leq(tx, ty, ta, &tc) && d.leq(tx, ty, tb, &tc);
                        r.check("lift monotone", ok, || vec![rn(a), rn(b)]);
                    }
                }
                None => {
                    if d.leq(x, y, a, b) {
                        r.check("lift monotone", d.leq(tx, ty, ta, tb), || vec![rn(a), rn(b)]);
                    }
                }
            }
        });
        r.cover("lift monotone", n, exhaustive && pop.complete);
        let arrows = &homs[&(x, y)];
        for (f, tf) in arrows.0.items.iter().zip(&arrows.1) {
            if let (Some(tf), Some(tg)) = (tf, m.lift(x, y, &d.graph(f))) {
                r.check("lift preserves graphs", tg == d.graph(tf), || vec![an(f)]);
            }
        }
        r.cover("lift preserves graphs", arrows.0.items.len() as u64, arrows.0.complete);
        if x == y {
            if let Some(td) = m.lift(x, x, &d.diag(x)) {
                r.check("lift preserves diagonals", td == d.diag(tx), || vec![on(x)]);
                r.cover("lift preserves diagonals", 1, true);
            }
        }
    }
    for &x in &live {
        for &y in &live {
            for &z in &live {
                let (Some((p, lp)), Some((q, lq))) = (rels.get(&(x, y)), rels.get(&(y, z))) else {
                    continue;
                };
                if !rels.contains_key(&(x, z)) {
                    continue;
                }
                let (tx, ty, tz) = (m.obj(x).unwrap(), m.obj(y).unwrap(), m.obj(z).unwrap());
                let (n, exhaustive) = crate::doctrine::forall(&[p.items.len(), q.items.len()], per_tuple, &mut rng, |ix| {
                    let (a, b) = (&p.items[ix[0]], &q.items[ix[1]]);
                    if let Some(tab) = m.lift(x, z, &d.comp(x, y, z, a, b)) {
                        let ok = tab == d.comp(tx, ty, tz, &lp[ix[0]], &lq[ix[1]]);
                        r.check("lift preserves composition", ok, || vec![d.rel_name(x, y, a), d.rel_name(y, z, b)]);
                    }
                });
                r.cover("lift preserves composition", n, exhaustive && p.complete && q.complete);
            }
        }
    }
    Ok(r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::builtins::make_vrel_doctrine;
    use crate::finite::tabulate;

    fn boolean_rel(carriers: &[usize]) -> ValuedDoctrine {
        let b = builtin_quantale(QuantaleKind::Boolean).unwrap();
        make_vrel_doctrine(&b, carriers, true, &Limits::default()).unwrap()
    }

    #[test]
    fn identity_monad_is_clean() {
        let m = IdentityMonad::new(boolean_rel(&[1, 2]));
        let r = check_monad(&m, &Limits::default()).unwrap();
        assert!(r.is_clean(), "{:?}", r.violations);
        assert!(r.is_exhaustive(), "{:?}", r);
    }

    #[test]
    fn powerset_tower_shape() {
        let m = powerset_monad(&[1, 2], &Limits::default()).unwrap();
        let d = m.doctrine();
        let sizes: Vec<usize> = d.objects().iter().map(|o| o.size).collect();
        assert_eq!(sizes, vec![1, 2, 4, 16, 2, 4, 16, 65536]);
        assert_eq!(d.object_name(6), "PPX1");
        assert_eq!(m.obj(6), Some(7));
        assert_eq!(m.obj(7), None);
        assert_eq!(m.carriers(), vec![0, 4]);
    }

    #[test]
    fn powerset_structure_maps() {
        let m = powerset_monad(&[2], &Limits::default()).unwrap();
        assert_eq!(&*m.unit(0).unwrap().map, &[1, 2]);
        // {∅,{0}} ↦ {0}, {{0},{1}} ↦ {0,1}.
        let mu = m.mult(0).unwrap();
        assert_eq!(mu.map[0b0011], 0b01);
        assert_eq!(mu.map[0b0110], 0b11);
        let swap = m.doctrine().arrow(0, 0, vec![1, 0]).unwrap();
        assert_eq!(&*m.arr(&swap).unwrap().map, &[0, 2, 1, 3]);
    }

    #[test]
    fn egli_milner_lifting() {
        let m = powerset_monad(&[2], &Limits::default()).unwrap();
        let a = Matrix::new(2, 2, vec![0, 1, 0, 0]);
        let ta = m.lift(0, 0, &a).unwrap();
        // Only ∅~∅ and {0}~{1}.
        let related: Vec<(usize, usize)> = (0..4).flat_map(|s| (0..4).map(move |t| (s, t))).filter(|&(s, t)| ta.get(s, t) == 1).collect();
        assert_eq!(related, vec![(0, 0), (1, 2)]);
    }

    #[test]
    fn powerset_monad_is_clean() {
        let m = powerset_monad(&[1, 2], &Limits::default()).unwrap();
        let r = check_monad(&m, &Limits::default()).unwrap();
        assert!(r.is_clean(), "{:?}", r.violations);
        let assoc = r.coverage.iter().find(|c| c.law == "associativity").unwrap();
        assert_eq!(assoc.checked, 2);
    }

    struct Corrupted(PowersetMonad);

    impl DoctrineMonad for Corrupted {
        type D = ValuedDoctrine;
        fn doctrine(&self) -> &ValuedDoctrine {
            self.0.doctrine()
        }
        fn name(&self) -> String {
            "corrupted".into()
        }
        fn obj(&self, x: ObjId) -> Option<ObjId> {
            self.0.obj(x)
        }
        fn arr(&self, f: &MapArrow) -> Option<MapArrow> {
            self.0.arr(f)
        }
        fn lift(&self, x: ObjId, y: ObjId, a: &Matrix) -> Option<Matrix> {
            self.0.lift(x, y, a)
        }
        fn unit(&self, x: ObjId) -> Option<MapArrow> {
            self.0.unit(x)
        }
        fn heavy(&self, x: ObjId) -> bool {
            self.0.heavy(x)
        }
        fn mult(&self, x: ObjId) -> Option<MapArrow> {
            let mut mu = self.0.mult(x)?;
            if x == 0 {
                // {∅,{0,1}} should go to {0,1}.
                let mut map = mu.map.to_vec();
                map[0b1001] = 0b01;
                mu = MapArrow::new(mu.src, mu.tgt, map);
            }
            Some(mu)
        }
    }

    #[test]
    fn corrupted_multiplication_breaks_associativity() {
        let m = Corrupted(powerset_monad(&[2], &Limits::default()).unwrap());
        let r = check_monad(&m, &Limits::default()).unwrap();
        assert!(r.failures.contains_key("associativity"), "{:?}", r.failures);
        assert!(!r.failures.contains_key("left unit") && !r.failures.contains_key("right unit"));
        let v = r.violations.iter().find(|v| v.law == "associativity").unwrap();
        assert_eq!(v.witness[0], "X0");
    }

    #[test]
    fn tabulated_identity_round_trips() {
        let d = tabulate(&boolean_rel(&[1, 2]), &Limits::default()).unwrap();
        let j = identity_monad_json(&d);
        let m = TabulatedMonad::from_json(d.clone(), &j).unwrap();
        assert_eq!(m.to_json(), j);
        assert!(check_monad(&m, &Limits::default()).unwrap().is_clean());

        let mut bad = j.clone();
        let first = bad.mu.keys().next().unwrap().clone();
        bad.mu.insert(first, "nonexistent".into());
        assert!(matches!(TabulatedMonad::from_json(d, &bad), Err(Error::Structural(_))));
    }
}
