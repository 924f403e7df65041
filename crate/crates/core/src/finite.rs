//! Tabulated presentations: every fibre, composition and converse stored as
//! explicit tables. This is the JSON exchange format.

use crate::doctrine::{objects, reindex_unchecked, Doctrine, Limits, ObjId, Opposite};
use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::quantale::{Quantale, QuantaleJson};
use crate::report::LawReport;
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, HashMap};
use std::sync::Arc;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ArrowInfo {
    pub id: String,
    pub src: String,
    pub tgt: String,
}

/// A finite category given by tables.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiniteCategory {
    objects: Vec<String>,
    arrows: Vec<(String, ObjId, ObjId)>,
    compose: HashMap<(usize, usize), usize>,
    identity: Vec<usize>,
    homs: Vec<Arc<Vec<usize>>>,
}

impl FiniteCategory {
    pub fn objects(&self) -> &[String] {
        &self.objects
    }

    pub fn arrow_count(&self) -> usize {
        self.arrows.len()
    }

    pub fn arrow_id(&self, f: usize) -> &str {
        &self.arrows[f].0
    }

    pub fn arrow_index(&self, id: &str) -> Option<usize> {
        self.arrows.iter().position(|a| a.0 == id)
    }

    pub fn src(&self, f: usize) -> ObjId {
        self.arrows[f].1
    }

    pub fn tgt(&self, f: usize) -> ObjId {
        self.arrows[f].2
    }

    pub fn identity(&self, x: ObjId) -> usize {
        self.identity[x]
    }

    /// `g ∘ f`.
    pub fn compose(&self, f: usize, g: usize) -> usize {
        self.compose[&(f, g)]
    }

    pub fn hom(&self, x: ObjId, y: ObjId) -> &Arc<Vec<usize>> {
        &self.homs[x * self.objects.len() + y]
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Fibre {
    pub elements: Vec<String>,
    leq: Vec<bool>,
    pub values: Option<Vec<Matrix>>,
}

impl Fibre {
    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn leq(&self, a: u32, b: u32) -> bool {
        self.leq[a as usize * self.elements.len() + b as usize]
    }

    pub fn index(&self, id: &str) -> Option<u32> {
        self.elements.iter().position(|e| e == id).map(|i| i as u32)
    }
}

/// Raw reindexing table `R[f,g]: R(X,Y) → R(A,B)`.
#[derive(Debug, Clone, PartialEq, Eq)]
struct RawReindex {
    f: usize,
    g: usize,
    map: Vec<u32>,
}

/// A fully tabulated doctrine. Arrows are arrow indices, relations are
/// element indices within their fibre.
#[derive(Debug, Clone, PartialEq)]
pub struct FiniteDoctrine {
    pub base: FiniteCategory,
    fibres: Vec<Fibre>,
    all: Vec<Arc<Vec<u32>>>,
    diag: Vec<u32>,
    comp: Vec<Vec<u32>>,
    conv: Vec<Vec<u32>>,
    graph: Vec<u32>,
    reindex: Vec<RawReindex>,
    quantale: Option<Quantale>,
    /// Passthrough fields such as `recipe` and `monad`.
    pub extras: BTreeMap<String, serde_json::Value>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BaseJson {
    pub objects: Vec<String>,
    pub arrows: Vec<ArrowInfo>,
    /// `"f,g" → g∘f`.
    pub compose: BTreeMap<String, String>,
    pub identity: BTreeMap<String, String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FibreJson {
    pub elements: Vec<String>,
    pub leq: Vec<Vec<bool>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub values: Option<Vec<Vec<Vec<String>>>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReindexJson {
    pub f: String,
    pub g: String,
    pub map: BTreeMap<String, String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DoctrineJson {
    pub base: BaseJson,
    pub fibres: BTreeMap<String, FibreJson>,
    pub d: BTreeMap<String, String>,
    /// `"X,Y,Z"` → rows indexed by `R(X,Y)`, columns by `R(Y,Z)`.
    pub comp: BTreeMap<String, Vec<Vec<String>>>,
    pub conv: BTreeMap<String, BTreeMap<String, String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub graph: Option<BTreeMap<String, String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reindex: Option<Vec<ReindexJson>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub quantale: Option<QuantaleJson>,
    #[serde(flatten)]
    pub extras: BTreeMap<String, serde_json::Value>,
}

fn pair_key(a: &str, b: &str) -> String {
    format!("{a},{b}")
}

impl FiniteDoctrine {
    pub fn fibre_table(&self, x: ObjId, y: ObjId) -> &Fibre {
        &self.fibres[x * self.n() + y]
    }

    pub fn quantale(&self) -> Option<&Quantale> {
        self.quantale.as_ref()
    }

    fn n(&self) -> usize {
        self.base.objects.len()
    }

    pub fn from_json(j: &DoctrineJson) -> Result<Self> {
        let mut errs: Vec<String> = Vec::new();
        let b = &j.base;
        let n = b.objects.len();
        let mut obj_index: HashMap<&str, ObjId> = HashMap::new();
        for (i, o) in b.objects.iter().enumerate() {
            if o.contains(',') {
                errs.push(format!("object id {o:?} contains a comma"));
            }
            if obj_index.insert(o.as_str(), i).is_some() {
                errs.push(format!("duplicate object {o:?}"));
            }
        }
        let mut arrows = Vec::new();
        let mut arrow_index: HashMap<&str, usize> = HashMap::new();
        for a in &b.arrows {
            if a.id.contains(',') {
                errs.push(format!("arrow id {:?} contains a comma", a.id));
            }
            match (obj_index.get(a.src.as_str()), obj_index.get(a.tgt.as_str())) {
                (Some(&s), Some(&t)) => {
                    if arrow_index.insert(a.id.as_str(), arrows.len()).is_some() {
                        errs.push(format!("duplicate arrow {:?}", a.id));
                    }
                    arrows.push((a.id.clone(), s, t));
                }
                _ => errs.push(format!("arrow {:?} has an unknown endpoint", a.id)),
            }
        }
        if !errs.is_empty() {
            return Err(Error::Structural(errs));
        }
        let mut identity = vec![0usize; n];
        for (x, o) in b.objects.iter().enumerate() {
            match b.identity.get(o).and_then(|id| arrow_index.get(id.as_str())) {
                Some(&f) if arrows[f].1 == x && arrows[f].2 == x => identity[x] = f,
                Some(_) => errs.push(format!("identity of {o:?} is not an endo-arrow of {o:?}")),
                None => errs.push(format!("missing identity for object {o:?}")),
            }
        }
        let mut compose = HashMap::new();
        for (key, h) in &b.compose {
            let parts: Vec<&str> = key.split(',').collect();
            let (Some(&f), Some(&g)) = (
                parts.first().and_then(|p| arrow_index.get(p)),
                parts.get(1).and_then(|p| arrow_index.get(p)),
            ) else {
                errs.push(format!("compose key {key:?} does not name two arrows"));
                continue;
            };
            if parts.len() != 2 || arrows[f].2 != arrows[g].1 {
                errs.push(format!("compose entry {key:?} is not a composable pair"));
                continue;
            }
            match arrow_index.get(h.as_str()) {
                Some(&c) if arrows[c].1 == arrows[f].1 && arrows[c].2 == arrows[g].2 => {
                    compose.insert((f, g), c);
                }
                Some(_) => errs.push(format!("compose entry {key:?} has the wrong type")),
                None => errs.push(format!("compose entry {key:?} names unknown arrow {h:?}")),
            }
        }
        for f in 0..arrows.len() {
            for g in 0..arrows.len() {
                if arrows[f].2 == arrows[g].1 && !compose.contains_key(&(f, g)) {
                    errs.push(format!("missing compose entry \"{},{}\"", arrows[f].0, arrows[g].0));
                }
            }
        }
        let quantale = match &j.quantale {
            Some(q) => match Quantale::from_json(q) {
                Ok(q) => Some(q),
                Err(Error::Structural(e)) => {
                    errs.extend(e);
                    None
                }
                Err(e) => return Err(e),
            },
            None => None,
        };
        let mut fibres = Vec::with_capacity(n * n);
        for x in &b.objects {
            for y in &b.objects {
                let key = pair_key(x, y);
                let Some(fj) = j.fibres.get(&key) else {
                    errs.push(format!("missing fibre {key:?}"));
                    fibres.push(Fibre { elements: vec![], leq: vec![], values: None });
                    continue;
                };
                let m = fj.elements.len();
                if fj.leq.len() != m || fj.leq.iter().any(|r| r.len() != m) {
                    errs.push(format!("fibre {key:?}: leq table is not {m}x{m}"));
                }
                let mut uniq = std::collections::BTreeSet::new();
                if fj.elements.iter().any(|e| !uniq.insert(e)) {
                    errs.push(format!("fibre {key:?}: duplicate element ids"));
                }
                let values = match (&fj.values, &quantale) {
                    (None, _) => None,
                    (Some(_), None) => {
                        errs.push(format!("fibre {key:?} has values but no quantale is given"));
                        None
                    }
                    (Some(vs), Some(q)) => {
                        if vs.len() != m {
                            errs.push(format!("fibre {key:?}: {} values for {m} elements", vs.len()));
                        }
                        let mut out = Vec::new();
                        for v in vs {
                            match Matrix::from_names(v, q) {
                                Ok(mx) => out.push(mx),
                                Err(e) => errs.push(format!("fibre {key:?}: {e}")),
                            }
                        }
                        Some(out)
                    }
                };
                fibres.push(Fibre {
                    elements: fj.elements.clone(),
                    leq: fj.leq.iter().flatten().copied().collect(),
                    values,
                });
            }
        }
        if !errs.is_empty() {
            return Err(Error::Structural(errs));
        }
        let el = |x: ObjId, y: ObjId, id: &str, what: &str, errs: &mut Vec<String>| -> u32 {
            fibres[x * n + y].index(id).unwrap_or_else(|| {
                errs.push(format!("{what}: {id:?} is not an element of fibre {:?}", pair_key(&b.objects[x], &b.objects[y])));
                0
            })
        };
        let mut diag = vec![0u32; n];
        for (x, o) in b.objects.iter().enumerate() {
            match j.d.get(o) {
                Some(id) => diag[x] = el(x, x, id, "d", &mut errs),
                None => errs.push(format!("missing d entry for {o:?}")),
            }
        }
        let mut comp = Vec::with_capacity(n * n * n);
        for x in 0..n {
            for y in 0..n {
                for z in 0..n {
                    let key = format!("{},{},{}", b.objects[x], b.objects[y], b.objects[z]);
                    let (lxy, lyz) = (fibres[x * n + y].len(), fibres[y * n + z].len());
                    let mut table = vec![0u32; lxy * lyz];
                    match j.comp.get(&key) {
                        Some(rows) if rows.len() == lxy && rows.iter().all(|r| r.len() == lyz) => {
                            for (i, row) in rows.iter().enumerate() {
                                for (k, id) in row.iter().enumerate() {
                                    table[i * lyz + k] = el(x, z, id, "comp", &mut errs);
                                }
                            }
                        }
                        Some(_) => errs.push(format!("comp table {key:?} is not {lxy}x{lyz}")),
                        None => errs.push(format!("missing comp table {key:?}")),
                    }
                    comp.push(table);
                }
            }
        }
        let mut conv = Vec::with_capacity(n * n);
        for x in 0..n {
            for y in 0..n {
                let key = pair_key(&b.objects[x], &b.objects[y]);
                let f = &fibres[x * n + y];
                let mut table = vec![0u32; f.len()];
                match j.conv.get(&key) {
                    Some(map) => {
                        for (i, e) in f.elements.iter().enumerate() {
                            match map.get(e) {
                                Some(id) => table[i] = el(y, x, id, "conv", &mut errs),
                                None => errs.push(format!("missing conv entry for {e:?} in {key:?}")),
                            }
                        }
                    }
                    None => errs.push(format!("missing conv table {key:?}")),
                }
                conv.push(table);
            }
        }
        let mut reindex = Vec::new();
        for rj in j.reindex.iter().flatten() {
            let (Some(&f), Some(&g)) = (arrow_index.get(rj.f.as_str()), arrow_index.get(rj.g.as_str())) else {
                errs.push(format!("reindex table names unknown arrows {:?},{:?}", rj.f, rj.g));
                continue;
            };
            let (a, x, bb, y) = (arrows[f].1, arrows[f].2, arrows[g].1, arrows[g].2);
            let src = &fibres[x * n + y];
            let mut map = vec![0u32; src.len()];
            for (i, e) in src.elements.iter().enumerate() {
                match rj.map.get(e) {
                    Some(id) => map[i] = el(a, bb, id, "reindex", &mut errs),
                    None => errs.push(format!("reindex table {},{} misses {e:?}", rj.f, rj.g)),
                }
            }
            reindex.push(RawReindex { f, g, map });
        }
        let mut graph = vec![0u32; arrows.len()];
        for (fi, (id, s, t)) in arrows.iter().enumerate() {
            let given = j.graph.as_ref().and_then(|g| g.get(id));
            match given {
                Some(e) => graph[fi] = el(*s, *t, e, "graph", &mut errs),
                None => {
                    // gr f = R[f,id](d) from a raw table, if one is supplied.
                    let idt = identity[*t];
                    match reindex.iter().find(|r| r.f == fi && r.g == idt) {
                        Some(r) => graph[fi] = r.map[diag[*t] as usize],
                        None => errs.push(format!("missing graph for arrow {id:?}")),
                    }
                }
            }
        }
        if !errs.is_empty() {
            return Err(Error::Structural(errs));
        }
        let mut homs = vec![Vec::new(); n * n];
        for (i, a) in arrows.iter().enumerate() {
            homs[a.1 * n + a.2].push(i);
        }
        let all = fibres.iter().map(|f| Arc::new((0..f.len() as u32).collect())).collect();
        Ok(FiniteDoctrine {
            base: FiniteCategory {
                objects: b.objects.clone(),
                arrows,
                compose,
                identity,
                homs: homs.into_iter().map(Arc::new).collect(),
            },
            fibres,
            all,
            diag,
            comp,
            conv,
            graph,
            reindex,
            quantale,
            extras: j.extras.clone(),
        })
    }

    pub fn to_json(&self) -> DoctrineJson {
        let n = self.n();
        let obj = &self.base.objects;
        let aid = |f: usize| self.base.arrows[f].0.clone();
        let mut compose = BTreeMap::new();
        for (&(f, g), &h) in &self.base.compose {
            compose.insert(pair_key(&aid(f), &aid(g)), aid(h));
        }
        let base = BaseJson {
            objects: obj.clone(),
            arrows: self
                .base
                .arrows
                .iter()
                .map(|(id, s, t)| ArrowInfo { id: id.clone(), src: obj[*s].clone(), tgt: obj[*t].clone() })
                .collect(),
            compose,
            identity: (0..n).map(|x| (obj[x].clone(), aid(self.base.identity[x]))).collect(),
        };
        let q = self.quantale.as_ref();
        let mut fibres = BTreeMap::new();
        let mut conv = BTreeMap::new();
        for x in 0..n {
            for y in 0..n {
                let f = self.fibre_table(x, y);
                let m = f.len();
                fibres.insert(
                    pair_key(&obj[x], &obj[y]),
                    FibreJson {
                        elements: f.elements.clone(),
                        leq: (0..m).map(|i| f.leq[i * m..(i + 1) * m].to_vec()).collect(),
                        values: match (&f.values, q) {
                            (Some(vs), Some(q)) => Some(vs.iter().map(|v| v.to_names(q)).collect()),
                            _ => None,
                        },
                    },
                );
                let back = self.fibre_table(y, x);
                conv.insert(
                    pair_key(&obj[x], &obj[y]),
                    f.elements
                        .iter()
                        .enumerate()
                        .map(|(i, e)| (e.clone(), back.elements[self.conv[x * n + y][i] as usize].clone()))
                        .collect(),
                );
            }
        }
        let mut comp = BTreeMap::new();
        for x in 0..n {
            for y in 0..n {
                for z in 0..n {
                    let (lxy, lyz) = (self.fibre_table(x, y).len(), self.fibre_table(y, z).len());
                    let out = self.fibre_table(x, z);
                    let t = &self.comp[(x * n + y) * n + z];
                    comp.insert(
                        format!("{},{},{}", obj[x], obj[y], obj[z]),
                        (0..lxy)
                            .map(|i| (0..lyz).map(|k| out.elements[t[i * lyz + k] as usize].clone()).collect())
                            .collect(),
                    );
                }
            }
        }
        let graph = (0..self.base.arrows.len())
            .map(|f| {
                let (s, t) = (self.base.src(f), self.base.tgt(f));
                (aid(f), self.fibre_table(s, t).elements[self.graph[f] as usize].clone())
            })
            .collect();
        let reindex = if self.reindex.is_empty() {
            None
        } else {
            Some(
                self.reindex
                    .iter()
                    .map(|r| {
                        let (a, x, b, y) = (self.base.src(r.f), self.base.tgt(r.f), self.base.src(r.g), self.base.tgt(r.g));
                        let (from, to) = (self.fibre_table(x, y), self.fibre_table(a, b));
                        ReindexJson {
                            f: aid(r.f),
                            g: aid(r.g),
                            map: r
                                .map
                                .iter()
                                .enumerate()
                                .map(|(i, &e)| (from.elements[i].clone(), to.elements[e as usize].clone()))
                                .collect(),
                        }
                    })
                    .collect(),
            )
        };
        DoctrineJson {
            base,
            fibres,
            d: (0..n)
                .map(|x| (obj[x].clone(), self.fibre_table(x, x).elements[self.diag[x] as usize].clone()))
                .collect(),
            comp,
            conv,
            graph: Some(graph),
            reindex,
            quantale: q.map(Quantale::to_json),
            extras: self.extras.clone(),
        }
    }

    /// Overrides one converse entry; used to build corrupted presentations.
    pub fn set_conv(&mut self, x: ObjId, y: ObjId, a: u32, b: u32) {
        let n = self.n();
        self.conv[x * n + y][a as usize] = b;
    }
}

impl Doctrine for FiniteDoctrine {
    type Arrow = usize;
    type Rel = u32;

    fn object_count(&self) -> usize {
        self.n()
    }
    fn object_name(&self, x: ObjId) -> String {
        self.base.objects[x].clone()
    }
    fn hom(&self, x: ObjId, y: ObjId) -> Result<Arc<Vec<usize>>> {
        Ok(self.base.hom(x, y).clone())
    }
    fn src(&self, f: &usize) -> ObjId {
        self.base.src(*f)
    }
    fn tgt(&self, f: &usize) -> ObjId {
        self.base.tgt(*f)
    }
    fn compose(&self, f: &usize, g: &usize) -> usize {
        self.base.compose(*f, *g)
    }
    fn identity(&self, x: ObjId) -> usize {
        self.base.identity(x)
    }
    fn arrow_name(&self, f: &usize) -> String {
        self.base.arrow_id(*f).to_string()
    }
    fn fibre(&self, x: ObjId, y: ObjId) -> Result<Arc<Vec<u32>>> {
        Ok(self.all[x * self.n() + y].clone())
    }
    fn contains(&self, x: ObjId, y: ObjId, a: &u32) -> bool {
        (*a as usize) < self.fibre_table(x, y).len()
    }
    fn leq(&self, x: ObjId, y: ObjId, a: &u32, b: &u32) -> bool {
        self.fibre_table(x, y).leq(*a, *b)
    }
    fn diag(&self, x: ObjId) -> u32 {
        self.diag[x]
    }
    fn comp(&self, x: ObjId, y: ObjId, z: ObjId, a: &u32, b: &u32) -> u32 {
        let n = self.n();
        let lyz = self.fibre_table(y, z).len();
        self.comp[(x * n + y) * n + z][*a as usize * lyz + *b as usize]
    }
    fn conv(&self, x: ObjId, y: ObjId, a: &u32) -> u32 {
        self.conv[x * self.n() + y][*a as usize]
    }
    fn graph(&self, f: &usize) -> u32 {
        self.graph[*f]
    }
    fn rel_name(&self, x: ObjId, y: ObjId, a: &u32) -> String {
        self.fibre_table(x, y).elements[*a as usize].clone()
    }
    fn value_quantale(&self) -> Option<&Quantale> {
        self.quantale.as_ref()
    }
    fn rel_values(&self, x: ObjId, y: ObjId, a: &u32) -> Option<Matrix> {
        self.fibre_table(x, y).values.as_ref().map(|v| v[*a as usize].clone())
    }

    fn presentation_laws(&self, _limits: &Limits) -> LawReport {
        let mut r = LawReport::default();
        let n = self.n();
        for x in 0..n {
            for y in 0..n {
                let f = self.fibre_table(x, y);
                let key = pair_key(&self.base.objects[x], &self.base.objects[y]);
                let m = f.len() as u32;
                let name = |a: u32| f.elements[a as usize].clone();
                for a in 0..m {
                    r.check("fibre order reflexive", f.leq(a, a), || vec![key.clone(), name(a)]);
                    for b in 0..m {
                        if a != b {
                            r.check("fibre order antisymmetric", !(f.leq(a, b) && f.leq(b, a)), || {
                                vec![key.clone(), name(a), name(b)]
                            });
                        }
                        if let (Some(vs), Some(q)) = (&f.values, &self.quantale) {
                            let pointwise = vs[a as usize].leq(&vs[b as usize], q);
                            r.check("fibre order is pointwise on values", pointwise == f.leq(a, b), || {
                                vec![key.clone(), name(a), name(b)]
                            });
                        }
                        for c in 0..m {
                            r.check(
                                "fibre order transitive",
                                !(f.leq(a, b) && f.leq(b, c)) || f.leq(a, c),
                                || vec![key.clone(), name(a), name(b), name(c)],
                            );
                        }
                    }
                }
                r.cover("fibre order", (m as u64).pow(3), true);
            }
        }
        for raw in &self.reindex {
            let (f, g) = (raw.f, raw.g);
            let (a, x, b, y) = (self.base.src(f), self.base.tgt(f), self.base.src(g), self.base.tgt(g));
            for (i, &img) in raw.map.iter().enumerate() {
                let al = i as u32;
                let derived = reindex_unchecked(self, &f, &g, &al);
                r.check("raw reindexing agrees with gr f;α;gr g°", derived == img, || {
                    vec![self.arrow_name(&f), self.arrow_name(&g), self.rel_name(x, y, &al)]
                });
                // Converse is strictly natural.
                if let Some(back) = self.reindex.iter().find(|o| o.f == g && o.g == f) {
                    let lhs = self.conv(a, b, &img);
                    let rhs = back.map[self.conv(x, y, &al) as usize];
                    r.check("(R[f,g]α)° = R[g,f](α°)", lhs == rhs, || {
                        vec![self.arrow_name(&f), self.arrow_name(&g), self.rel_name(x, y, &al)]
                    });
                }
            }
            r.cover("raw reindexing", raw.map.len() as u64, true);
        }
        r
    }
}

/// Tabulates any doctrine whose hom-sets and fibres can be enumerated.
pub fn tabulate<D: Doctrine>(d: &D, limits: &Limits) -> Result<FiniteDoctrine> {
    let n = d.object_count();
    let objects: Vec<String> = objects(d).map(|x| d.object_name(x)).collect();
    let mut arrows: Vec<D::Arrow> = Vec::new();
    let mut arrow_pos: HashMap<D::Arrow, usize> = HashMap::new();
    for x in 0..n {
        for y in 0..n {
            for f in d.hom(x, y)?.iter() {
                arrow_pos.insert(f.clone(), arrows.len());
                arrows.push(f.clone());
            }
        }
    }
    let mut fibres: Vec<Arc<Vec<D::Rel>>> = Vec::with_capacity(n * n);
    let mut index: Vec<HashMap<D::Rel, u32>> = Vec::with_capacity(n * n);
    for x in 0..n {
        for y in 0..n {
            let f = d.fibre(x, y)?;
            index.push(f.iter().enumerate().map(|(i, r)| (r.clone(), i as u32)).collect());
            fibres.push(f);
        }
    }
    let mut table_size: u128 = 0;
    for x in 0..n {
        for y in 0..n {
            table_size += (fibres[x * n + y].len() as u128).pow(2);
            for z in 0..n {
                table_size += fibres[x * n + y].len() as u128 * fibres[y * n + z].len() as u128;
            }
        }
    }
    let cap = limits.fibre_cap.saturating_mul(16);
    if table_size > cap {
        return Err(Error::cap("tabulated presentation", Some(table_size), cap));
    }
    let lookup = |x: ObjId, y: ObjId, r: &D::Rel| -> Result<u32> {
        index[x * n + y].get(r).copied().ok_or_else(|| {
            Error::Precondition(format!("operation left fibre {},{}: {:?}", objects[x], objects[y], r))
        })
    };
    let mut j = DoctrineJson {
        base: BaseJson {
            objects: objects.clone(),
            arrows: arrows
                .iter()
                .map(|f| ArrowInfo {
                    id: d.arrow_name(f),
                    src: objects[d.src(f)].clone(),
                    tgt: objects[d.tgt(f)].clone(),
                })
                .collect(),
            compose: BTreeMap::new(),
            identity: (0..n).map(|x| (objects[x].clone(), d.arrow_name(&d.identity(x)))).collect(),
        },
        fibres: BTreeMap::new(),
        d: BTreeMap::new(),
        comp: BTreeMap::new(),
        conv: BTreeMap::new(),
        graph: Some(arrows.iter().map(|f| (d.arrow_name(f), d.rel_name(d.src(f), d.tgt(f), &d.graph(f)))).collect()),
        reindex: None,
        quantale: d.value_quantale().map(Quantale::to_json),
        extras: BTreeMap::new(),
    };
    for f in &arrows {
        for g in &arrows {
            if d.src(g) == d.tgt(f) {
                let h = d.compose(f, g);
                if !arrow_pos.contains_key(&h) {
                    return Err(Error::Precondition(format!("composite of {} and {} is not listed", d.arrow_name(f), d.arrow_name(g))));
                }
                j.base.compose.insert(pair_key(&d.arrow_name(f), &d.arrow_name(g)), d.arrow_name(&h));
            }
        }
    }
    let q = d.value_quantale();
    for x in 0..n {
        j.d.insert(objects[x].clone(), d.rel_name(x, x, &d.diag(x)));
        for y in 0..n {
            let f = &fibres[x * n + y];
            let names: Vec<String> = f.iter().map(|r| d.rel_name(x, y, r)).collect();
            let values = q.and_then(|q| {
                f.iter()
                    .map(|r| d.rel_values(x, y, r).map(|m| m.to_names(q)))
                    .collect::<Option<Vec<_>>>()
            });
            j.fibres.insert(
                pair_key(&objects[x], &objects[y]),
                FibreJson {
                    elements: names.clone(),
                    leq: f.iter().map(|a| f.iter().map(|b| d.leq(x, y, a, b)).collect()).collect(),
                    values,
                },
            );
            let mut cv = BTreeMap::new();
            for (i, r) in f.iter().enumerate() {
                let c = d.conv(x, y, r);
                lookup(y, x, &c)?;
                cv.insert(names[i].clone(), d.rel_name(y, x, &c));
            }
            j.conv.insert(pair_key(&objects[x], &objects[y]), cv);
            for z in 0..n {
                let g = &fibres[y * n + z];
                let mut rows = Vec::with_capacity(f.len());
                for a in f.iter() {
                    let mut row = Vec::with_capacity(g.len());
                    for b in g.iter() {
                        let c = d.comp(x, y, z, a, b);
                        lookup(x, z, &c)?;
                        row.push(d.rel_name(x, z, &c));
                    }
                    rows.push(row);
                }
                j.comp.insert(format!("{},{},{}", objects[x], objects[y], objects[z]), rows);
            }
        }
    }
    FiniteDoctrine::from_json(&j)
}

/// The opposite presentation.
pub fn opposite(d: &FiniteDoctrine, limits: &Limits) -> Result<FiniteDoctrine> {
    let mut out = tabulate(&Opposite(d.clone()), limits)?;
    out.extras = BTreeMap::new();
    Ok(out)
}

/// The doctrine with one object, one arrow and a one-element fibre.
pub fn terminal_doctrine() -> FiniteDoctrine {
    let j: DoctrineJson = serde_json::from_value(serde_json::json!({
        "base": {"objects": ["*"], "arrows": [{"id": "id", "src": "*", "tgt": "*"}],
                 "compose": {"id,id": "id"}, "identity": {"*": "id"}},
        "fibres": {"*,*": {"elements": ["t"], "leq": [[true]]}},
        "d": {"*": "t"},
        "comp": {"*,*,*": [["t"]]},
        "conv": {"*,*": {"t": "t"}},
        "graph": {"id": "t"}
    }))
    .expect("terminal doctrine literal");
    FiniteDoctrine::from_json(&j).expect("terminal doctrine is well formed")
}
