//! Concrete doctrines of quantale-valued relations: plain V-relations between
//! sets, bimodules between V-categories, and bimodules between categories
//! enriched in relations over a frame (with extents).

use crate::doctrine::{Doctrine, Limits, ObjId};
use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::quantale::{Elem, Quantale};
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::sync::{Arc, OnceLock};

/// A finite V-category: points with a distance valued in the quantale, and
/// for the frame-enriched variant an extent per point.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VCategory {
    pub name: Option<String>,
    pub points: Vec<String>,
    pub dist: Matrix,
    pub extent: Option<Vec<Elem>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VCategoryJson {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    pub points: Vec<String>,
    pub dist: Vec<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub extent: Option<Vec<String>>,
}

impl VCategory {
    pub fn from_json(j: &VCategoryJson, q: &Quantale) -> Result<Self> {
        let dist = Matrix::from_names(&j.dist, q).map_err(Error::structural)?;
        let n = j.points.len();
        if dist.rows() != n || dist.cols() != n {
            return Err(Error::structural(format!("distance table is not {n}x{n}")));
        }
        let extent = match &j.extent {
            None => None,
            Some(e) if e.len() == n => Some(
                e.iter()
                    .map(|s| q.index_of(s).ok_or_else(|| Error::structural(format!("unknown extent {s:?}"))))
                    .collect::<Result<Vec<_>>>()?,
            ),
            Some(_) => return Err(Error::structural("extent list has the wrong length")),
        };
        Ok(VCategory {
            name: j.name.clone(),
            points: j.points.clone(),
            dist,
            extent,
        })
    }

    pub fn to_json(&self, q: &Quantale) -> VCategoryJson {
        VCategoryJson {
            name: self.name.clone(),
            points: self.points.clone(),
            dist: self.dist.to_names(q),
            extent: self.extent.as_ref().map(|e| e.iter().map(|&v| q.name(v).to_string()).collect()),
        }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Checks reflexivity, transitivity and symmetry.
    pub fn validate_metric(&self, q: &Quantale) -> Result<()> {
        let n = self.len();
        let d = |i, j| self.dist.get(i, j);
        for i in 0..n {
            if !q.leq(q.unit(), d(i, i)) {
                return Err(Error::Precondition(format!("point {} is not reflexive", self.points[i])));
            }
        }
        self.validate_common(q)
    }

    fn validate_common(&self, q: &Quantale) -> Result<()> {
        let n = self.len();
        let d = |i, j| self.dist.get(i, j);
        for i in 0..n {
            for j in 0..n {
                if d(i, j) != d(j, i) {
                    return Err(Error::Precondition(format!(
                        "distance is not symmetric at {},{}",
                        self.points[i], self.points[j]
                    )));
                }
                for k in 0..n {
                    if !q.leq(q.tensor(d(i, j), d(j, k)), d(i, k)) {
                        return Err(Error::Precondition(format!(
                            "distance is not transitive at {},{},{}",
                            self.points[i], self.points[j], self.points[k]
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    /// Checks the frame-enriched axioms: `d(x,x) = e(x)`, `d(x,y) ≤ e(x)∧e(y)`,
    /// transitivity, symmetry and skeletality.
    pub fn validate_walters(&self, h: &Quantale) -> Result<()> {
        let e = self
            .extent
            .as_ref()
            .ok_or_else(|| Error::Precondition("category has no extents".into()))?;
        let n = self.len();
        for i in 0..n {
            if self.dist.get(i, i) != e[i] {
                return Err(Error::Precondition(format!("d(x,x) differs from the extent at {}", self.points[i])));
            }
            for j in 0..n {
                if !h.leq(self.dist.get(i, j), h.meet(e[i], e[j])) {
                    return Err(Error::Precondition(format!(
                        "d({},{}) exceeds the meet of the extents",
                        self.points[i], self.points[j]
                    )));
                }
                if i != j && self.dist.get(i, j) == e[i] && e[i] == e[j] {
                    return Err(Error::Precondition(format!(
                        "not skeletal: {} and {} are indistinguishable",
                        self.points[i], self.points[j]
                    )));
                }
            }
        }
        self.validate_common(h)
    }
}

/// The completion of a frame-enriched category: points are the left adjoint
/// bimodules from one-point categories, `d(α,β) = ⋁_x α(x)∧β(x)` and the
/// extent of `α` is `⋁_x α(x)`.
pub fn walters_completion(h: &Quantale, x: &VCategory) -> Result<VCategory> {
    x.validate_walters(h)?;
    let n = x.len();
    let e = x.extent.as_ref().expect("validated");
    let d = |i, j| x.dist.get(i, j);
    let candidates: Vec<Vec<Elem>> = (0..n).map(|i| h.elements().filter(|&v| h.leq(v, e[i])).collect()).collect();
    let mut points: Vec<Vec<Elem>> = Vec::new();
    let mut idx = vec![0usize; n];
    loop {
        let alpha: Vec<Elem> = (0..n).map(|i| candidates[i][idx[i]]).collect();
        // Module on the X side, and functional.
        let ok = (0..n).all(|i| {
            (0..n).all(|j| h.leq(h.meet(alpha[i], d(i, j)), alpha[j]) && h.leq(h.meet(alpha[i], alpha[j]), d(i, j)))
        });
        if ok {
            points.push(alpha);
        }
        let mut k = n;
        loop {
            if k == 0 {
                return Ok(build_completion(h, x, points));
            }
            k -= 1;
            idx[k] += 1;
            if idx[k] < candidates[k].len() {
                break;
            }
            idx[k] = 0;
        }
    }
}

fn build_completion(h: &Quantale, x: &VCategory, points: Vec<Vec<Elem>>) -> VCategory {
    let m = points.len();
    let dist = Matrix::from_fn(m, m, |p, r| h.join_all((0..x.len()).map(|i| h.meet(points[p][i], points[r][i]))));
    let extent = points.iter().map(|a| h.join_all(a.iter().copied())).collect();
    let names = points
        .iter()
        .map(|a| format!("[{}]", a.iter().map(|&v| h.name(v)).collect::<Vec<_>>().join(",")))
        .collect();
    VCategory {
        name: x.name.as_ref().map(|s| format!("{s}~")),
        points: names,
        dist,
        extent: Some(extent),
    }
}

/// The unit into the completion: `x ↦ (e(x), d(x,−))`, as point indices.
pub fn completion_unit(h: &Quantale, x: &VCategory, completion: &VCategory) -> Vec<u32> {
    (0..x.len())
        .map(|i| {
            let name = format!(
                "[{}]",
                (0..x.len()).map(|j| h.name(x.dist.get(i, j))).collect::<Vec<_>>().join(",")
            );
            completion.points.iter().position(|p| *p == name).expect("unit lands in the completion") as u32
        })
        .collect()
}

/// What kind of relations the doctrine carries.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Flavor {
    /// V-relations between sets; identities are crisp diagonals.
    Rel,
    /// Bimodules between symmetric V-categories.
    Metric,
    /// Bimodules between frame-enriched categories with extents.
    Walters,
}

/// An object of a [`ValuedDoctrine`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ValuedObject {
    pub name: String,
    pub size: usize,
    pub point_names: Option<Vec<String>>,
    /// `None` stands for the crisp diagonal.
    pub dist: Option<Matrix>,
    pub extent: Option<Vec<Elem>>,
}

impl ValuedObject {
    pub fn set(name: impl Into<String>, size: usize) -> Self {
        ValuedObject {
            name: name.into(),
            size,
            point_names: None,
            dist: None,
            extent: None,
        }
    }

    pub fn from_category(name: impl Into<String>, c: &VCategory) -> Self {
        ValuedObject {
            name: name.into(),
            size: c.len(),
            point_names: Some(c.points.clone()),
            dist: Some(c.dist.clone()),
            extent: c.extent.clone(),
        }
    }

    pub fn point_name(&self, i: usize) -> String {
        match &self.point_names {
            Some(p) => p[i].clone(),
            None => format!("x{i}"),
        }
    }

    fn dist_at(&self, q: &Quantale, i: usize, j: usize) -> Elem {
        match &self.dist {
            Some(m) => m.get(i, j),
            None if i == j => q.unit(),
            None => q.bottom(),
        }
    }

    fn is_crisp(&self) -> bool {
        self.dist.is_none()
    }

    /// Same structure, so one can stand in for the other point by point.
    pub fn same_structure(&self, other: &ValuedObject, q: &Quantale) -> bool {
        self.size == other.size
            && self.extent == other.extent
            && (0..self.size).all(|i| (0..self.size).all(|j| self.dist_at(q, i, j) == other.dist_at(q, i, j)))
    }
}

/// A base arrow: a map of points.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MapArrow {
    pub src: ObjId,
    pub tgt: ObjId,
    pub map: Arc<[u32]>,
}

impl MapArrow {
    pub fn new(src: ObjId, tgt: ObjId, map: Vec<u32>) -> Self {
        MapArrow {
            src,
            tgt,
            map: map.into(),
        }
    }

    pub fn apply(&self, i: usize) -> usize {
        self.map[i] as usize
    }
}

/// A doctrine of quantale-valued matrices over a base of point maps.
#[derive(Debug, Clone)]
pub struct ValuedDoctrine {
    q: Arc<Quantale>,
    flavor: Flavor,
    objects: Vec<ValuedObject>,
    /// `None`: every structure-preserving map. Otherwise the generated
    /// subcategory, listed per hom-set.
    listed: Option<Vec<Arc<Vec<MapArrow>>>>,
    fibre_cap: u128,
    fibres: Vec<OnceLock<Result<Arc<Vec<Matrix>>>>>,
    homs: Vec<OnceLock<Result<Arc<Vec<MapArrow>>>>>,
}

fn sized_names(prefix: &str, n: usize) -> impl Iterator<Item = String> + '_ {
    (0..n).map(move |i| format!("{prefix}{i}"))
}

/// V-relations between finite sets of the given sizes.
pub fn make_vrel_doctrine(q: &Quantale, carriers: &[usize], include_all_functions: bool, limits: &Limits) -> Result<ValuedDoctrine> {
    if carriers.is_empty() {
        return Err(Error::InvalidParameter("no carriers given".into()));
    }
    let objects = sized_names("X", carriers.len())
        .zip(carriers)
        .map(|(name, &n)| ValuedObject::set(name, n))
        .collect();
    let d = ValuedDoctrine::new(q.clone(), Flavor::Rel, objects, limits)?;
    d.guard_fibres()?;
    if include_all_functions {
        Ok(d)
    } else {
        d.with_generators(&[])
    }
}

/// Bimodules between symmetric V-categories; arrows are the non-expansive maps.
pub fn make_vcat_doctrine(q: &Quantale, cats: &[VCategory], limits: &Limits) -> Result<ValuedDoctrine> {
    let mut objects = Vec::new();
    for (i, c) in cats.iter().enumerate() {
        if c.extent.is_some() {
            return Err(Error::InvalidParameter("metric categories carry no extents".into()));
        }
        c.validate_metric(q)?;
        objects.push(ValuedObject::from_category(c.name.clone().unwrap_or_else(|| format!("C{i}")), c));
    }
    let d = ValuedDoctrine::new(q.clone(), Flavor::Metric, objects, limits)?;
    d.guard_fibres()?;
    Ok(d)
}

/// Bimodules between frame-enriched categories; arrows preserve extents and
/// do not expand distances.
pub fn make_walters_doctrine(h: &Quantale, cats: &[VCategory], limits: &Limits) -> Result<ValuedDoctrine> {
    if !h.is_frame() {
        return Err(Error::InvalidParameter("the quantale is not a frame".into()));
    }
    let mut objects = Vec::new();
    for (i, c) in cats.iter().enumerate() {
        c.validate_walters(h)?;
        objects.push(ValuedObject::from_category(c.name.clone().unwrap_or_else(|| format!("C{i}")), c));
    }
    let d = ValuedDoctrine::new(h.clone(), Flavor::Walters, objects, limits)?;
    d.guard_fibres()?;
    Ok(d)
}

impl ValuedDoctrine {
    /// Builds a doctrine without the eager fibre-size guard; fibres are
    /// enumerated lazily and refused individually when too large.
    pub fn new(q: Quantale, flavor: Flavor, objects: Vec<ValuedObject>, limits: &Limits) -> Result<Self> {
        let mut names = std::collections::BTreeSet::new();
        for o in &objects {
            if o.name.contains(',') || !names.insert(o.name.clone()) {
                return Err(Error::InvalidParameter(format!("bad or duplicate object name {:?}", o.name)));
            }
            if o.size > u32::MAX as usize {
                return Err(Error::InvalidParameter("object too large".into()));
            }
        }
        let n = objects.len();
        Ok(ValuedDoctrine {
            q: Arc::new(q),
            flavor,
            objects,
            listed: None,
            fibre_cap: limits.fibre_cap,
            fibres: (0..n * n).map(|_| OnceLock::new()).collect(),
            homs: (0..n * n).map(|_| OnceLock::new()).collect(),
        })
    }

    /// Refuses if some fibre would exceed the cap.
    pub fn guard_fibres(&self) -> Result<()> {
        let n = self.objects.len();
        for x in 0..n {
            for y in 0..n {
                let size = self.candidate_count(x, y);
                if size.map_or(true, |s| s > self.fibre_cap) {
                    return Err(Error::cap(
                        format!("fibre R({},{})", self.objects[x].name, self.objects[y].name),
                        size,
                        self.fibre_cap,
                    ));
                }
            }
        }
        Ok(())
    }

    /// Restricts the base to the subcategory generated by `generators`.
    pub fn with_generators(&self, generators: &[MapArrow]) -> Result<ValuedDoctrine> {
        let n = self.objects.len();
        let mut by_hom: Vec<Vec<MapArrow>> = vec![Vec::new(); n * n];
        let mut all: std::collections::BTreeSet<MapArrow> = (0..n).map(|x| self.identity(x)).collect();
        for g in generators {
            if !self.is_base_arrow(g) {
                return Err(Error::InvalidParameter(format!("{} is not structure preserving", self.arrow_name(g))));
            }
            all.insert(g.clone());
        }
        loop {
            let current: Vec<MapArrow> = all.iter().cloned().collect();
            let mut grew = false;
            for f in &current {
                for g in &current {
                    if f.tgt == g.src && all.insert(self.compose(f, g)) {
                        grew = true;
                    }
                }
            }
            if !grew {
                break;
            }
            if all.len() as u128 > self.fibre_cap {
                return Err(Error::cap("generated base", Some(all.len() as u128), self.fibre_cap));
            }
        }
        for f in all {
            by_hom[f.src * n + f.tgt].push(f);
        }
        let mut out = self.fresh(self.objects.clone());
        out.listed = Some(by_hom.into_iter().map(Arc::new).collect());
        Ok(out)
    }

    fn fresh(&self, objects: Vec<ValuedObject>) -> ValuedDoctrine {
        let n = objects.len();
        ValuedDoctrine {
            q: self.q.clone(),
            flavor: self.flavor,
            objects,
            listed: None,
            fibre_cap: self.fibre_cap,
            fibres: (0..n * n).map(|_| OnceLock::new()).collect(),
            homs: (0..n * n).map(|_| OnceLock::new()).collect(),
        }
    }

    /// A copy with one more object. Over a restricted base the new object
    /// only gets its identity.
    pub fn with_object(&self, obj: ValuedObject) -> Result<(ValuedDoctrine, ObjId)> {
        if self.objects.iter().any(|o| o.name == obj.name) {
            return Err(Error::InvalidParameter(format!("object {:?} already exists", obj.name)));
        }
        let mut objects = self.objects.clone();
        objects.push(obj);
        let id = objects.len() - 1;
        let grown = self.fresh(objects);
        match self.listed_arrows() {
            None => Ok((grown, id)),
            Some(arrows) => Ok((grown.with_generators(&arrows)?, id)),
        }
    }

    /// Every arrow of a restricted base; `None` when the base has all maps.
    pub fn listed_arrows(&self) -> Option<Vec<MapArrow>> {
        self.listed
            .as_ref()
            .map(|homs| homs.iter().flat_map(|h| h.iter().cloned()).collect())
    }

    pub fn quantale(&self) -> &Quantale {
        &self.q
    }

    pub fn flavor(&self) -> Flavor {
        self.flavor
    }

    pub fn object(&self, x: ObjId) -> &ValuedObject {
        &self.objects[x]
    }

    pub fn objects(&self) -> &[ValuedObject] {
        &self.objects
    }

    pub fn dist(&self, x: ObjId, i: usize, j: usize) -> Elem {
        self.objects[x].dist_at(&self.q, i, j)
    }

    /// Per-entry admissible values.
    fn entry_bounds(&self, x: ObjId, y: ObjId) -> Vec<Vec<Elem>> {
        let q = &self.q;
        let (ox, oy) = (&self.objects[x], &self.objects[y]);
        let mut out = Vec::with_capacity(ox.size * oy.size);
        for i in 0..ox.size {
            for j in 0..oy.size {
                let bound = match (&ox.extent, &oy.extent) {
                    (Some(ex), Some(ey)) => q.meet(ex[i], ey[j]),
                    (Some(ex), None) => ex[i],
                    (None, Some(ey)) => ey[j],
                    (None, None) => q.top(),
                };
                out.push(q.elements().filter(|&v| q.leq(v, bound)).collect());
            }
        }
        out
    }

    fn candidate_count(&self, x: ObjId, y: ObjId) -> Option<u128> {
        let (ox, oy) = (&self.objects[x], &self.objects[y]);
        if ox.extent.is_none() && oy.extent.is_none() {
            let entries = (ox.size as u128).checked_mul(oy.size as u128)?;
            let mut acc: u128 = 1;
            for _ in 0..entries {
                acc = acc.checked_mul(self.q.len() as u128)?;
            }
            return Some(acc);
        }
        self.entry_bounds(x, y)
            .iter()
            .try_fold(1u128, |acc, b| acc.checked_mul(b.len() as u128))
    }

    fn needs_filter(&self, x: ObjId, y: ObjId) -> bool {
        !(self.objects[x].is_crisp() && self.objects[y].is_crisp())
    }

    /// Module compatibility on both sides and the extent bound.
    pub fn is_bimodule(&self, x: ObjId, y: ObjId, m: &Matrix) -> bool {
        let (ox, oy) = (&self.objects[x], &self.objects[y]);
        if m.rows() != ox.size || m.cols() != oy.size {
            return false;
        }
        let bounds_ok = match (&ox.extent, &oy.extent) {
            (None, None) => true,
            _ => {
                let b = self.entry_bounds(x, y);
                (0..ox.size).all(|i| (0..oy.size).all(|j| b[i * oy.size + j].contains(&m.get(i, j))))
            }
        };
        bounds_ok && (!self.needs_filter(x, y) || self.compatible(x, y, m))
    }

    fn compatible(&self, x: ObjId, y: ObjId, m: &Matrix) -> bool {
        let q = &self.q;
        let (nx, ny) = (self.objects[x].size, self.objects[y].size);
        for i in 0..nx {
            for j in 0..ny {
                let v = m.get(i, j);
                if v == q.bottom() {
                    continue;
                }
                for i2 in 0..nx {
                    if !q.leq(q.tensor(v, self.dist(x, i2, i)), m.get(i2, j)) {
                        return false;
                    }
                }
                for j2 in 0..ny {
                    if !q.leq(q.tensor(self.dist(y, j, j2), v), m.get(i, j2)) {
                        return false;
                    }
                }
            }
        }
        true
    }

    fn enumerate_fibre(&self, x: ObjId, y: ObjId) -> Result<Arc<Vec<Matrix>>> {
        let size = self.candidate_count(x, y);
        if size.map_or(true, |s| s > self.fibre_cap) {
            return Err(Error::cap(
                format!("fibre R({},{})", self.objects[x].name, self.objects[y].name),
                size,
                self.fibre_cap,
            ));
        }
        let (nx, ny) = (self.objects[x].size, self.objects[y].size);
        let bounds = self.entry_bounds(x, y);
        let filter = self.needs_filter(x, y);
        let mut out = Vec::new();
        let mut idx = vec![0usize; nx * ny];
        let mut data: Vec<Elem> = bounds.iter().map(|b| b[0]).collect();
        loop {
            let m = Matrix::new(nx, ny, data.clone());
            if !filter || self.compatible(x, y, &m) {
                out.push(m);
            }
            let mut k = idx.len();
            loop {
                if k == 0 {
                    return Ok(Arc::new(out));
                }
                k -= 1;
                idx[k] += 1;
                if idx[k] < bounds[k].len() {
                    data[k] = bounds[k][idx[k]];
                    break;
                }
                idx[k] = 0;
                data[k] = bounds[k][0];
            }
        }
    }

    pub fn is_base_arrow(&self, f: &MapArrow) -> bool {
        let (ox, oy) = (&self.objects[f.src], &self.objects[f.tgt]);
        if f.map.len() != ox.size || f.map.iter().any(|&v| v as usize >= oy.size) {
            return false;
        }
        if let (Some(ex), Some(ey)) = (&ox.extent, &oy.extent) {
            if (0..ox.size).any(|i| ey[f.apply(i)] != ex[i]) {
                return false;
            }
        } else if ox.extent.is_some() != oy.extent.is_some() {
            return false;
        }
        if ox.is_crisp() {
            return true;
        }
        let q = &self.q;
        (0..ox.size).all(|i| {
            (0..ox.size).all(|j| q.leq(self.dist(f.src, i, j), self.dist(f.tgt, f.apply(i), f.apply(j))))
        })
    }

    fn enumerate_hom(&self, x: ObjId, y: ObjId) -> Result<Arc<Vec<MapArrow>>> {
        if let Some(listed) = &self.listed {
            let n = self.objects.len();
            return Ok(listed[x * n + y].clone());
        }
        let (nx, ny) = (self.objects[x].size, self.objects[y].size);
        let count = (ny as u128).checked_pow(nx as u32);
        if count.map_or(true, |c| c > self.fibre_cap) {
            return Err(Error::cap(
                format!("hom-set {}→{}", self.objects[x].name, self.objects[y].name),
                count,
                self.fibre_cap,
            ));
        }
        let mut out = Vec::new();
        if ny == 0 && nx > 0 {
            return Ok(Arc::new(out));
        }
        let mut map = vec![0u32; nx];
        loop {
            let f = MapArrow::new(x, y, map.clone());
            if self.is_base_arrow(&f) {
                out.push(f);
            }
            let mut k = nx;
            loop {
                if k == 0 {
                    return Ok(Arc::new(out));
                }
                k -= 1;
                map[k] += 1;
                if (map[k] as usize) < ny {
                    break;
                }
                map[k] = 0;
            }
        }
    }

    /// The matrix of a base arrow's graph: `gr f(x,y) = d_Y(f x, y)`.
    pub fn graph_matrix(&self, f: &MapArrow) -> Matrix {
        let (nx, ny) = (self.objects[f.src].size, self.objects[f.tgt].size);
        Matrix::from_fn(nx, ny, |i, j| self.dist(f.tgt, f.apply(i), j))
    }

    pub fn arrow(&self, src: ObjId, tgt: ObjId, map: Vec<u32>) -> Result<MapArrow> {
        let f = MapArrow::new(src, tgt, map);
        if self.is_base_arrow(&f) {
            Ok(f)
        } else {
            Err(Error::InvalidParameter(format!("{} is not a base arrow", self.arrow_name(&f))))
        }
    }
}

impl Doctrine for ValuedDoctrine {
    type Arrow = MapArrow;
    type Rel = Matrix;

    fn object_count(&self) -> usize {
        self.objects.len()
    }
    fn object_name(&self, x: ObjId) -> String {
        self.objects[x].name.clone()
    }
    fn hom(&self, x: ObjId, y: ObjId) -> Result<Arc<Vec<MapArrow>>> {
        let n = self.objects.len();
        self.homs[x * n + y].get_or_init(|| self.enumerate_hom(x, y)).clone()
    }
    fn src(&self, f: &MapArrow) -> ObjId {
        f.src
    }
    fn tgt(&self, f: &MapArrow) -> ObjId {
        f.tgt
    }
    fn compose(&self, f: &MapArrow, g: &MapArrow) -> MapArrow {
        debug_assert_eq!(f.tgt, g.src);
        MapArrow::new(f.src, g.tgt, f.map.iter().map(|&i| g.map[i as usize]).collect())
    }
    fn identity(&self, x: ObjId) -> MapArrow {
        MapArrow::new(x, x, (0..self.objects[x].size as u32).collect())
    }
    fn arrow_name(&self, f: &MapArrow) -> String {
        let map: Vec<String> = f.map.iter().map(u32::to_string).collect();
        format!("{}->{}[{}]", self.objects[f.src].name, self.objects[f.tgt].name, map.join(" "))
    }
    fn fibre(&self, x: ObjId, y: ObjId) -> Result<Arc<Vec<Matrix>>> {
        let n = self.objects.len();
        self.fibres[x * n + y].get_or_init(|| self.enumerate_fibre(x, y)).clone()
    }
    fn contains(&self, x: ObjId, y: ObjId, a: &Matrix) -> bool {
        self.is_bimodule(x, y, a)
    }
    fn leq(&self, _x: ObjId, _y: ObjId, a: &Matrix, b: &Matrix) -> bool {
        a.leq(b, &self.q)
    }
    fn diag(&self, x: ObjId) -> Matrix {
        let n = self.objects[x].size;
        Matrix::from_fn(n, n, |i, j| self.dist(x, i, j))
    }
    fn comp(&self, _x: ObjId, _y: ObjId, _z: ObjId, a: &Matrix, b: &Matrix) -> Matrix {
        a.compose(b, &self.q)
    }
    fn conv(&self, _x: ObjId, _y: ObjId, a: &Matrix) -> Matrix {
        a.transpose()
    }
    fn graph(&self, f: &MapArrow) -> Matrix {
        self.graph_matrix(f)
    }
    fn kernel(&self, f: &MapArrow) -> Matrix {
        let n = self.objects[f.src].size;
        Matrix::from_fn(n, n, |i, j| self.dist(f.tgt, f.apply(i), f.apply(j)))
    }
    fn rel_name(&self, _x: ObjId, _y: ObjId, a: &Matrix) -> String {
        a.label(&self.q)
    }
    fn join(&self, _x: ObjId, _y: ObjId, a: &Matrix, b: &Matrix) -> Option<Matrix> {
        Some(a.join(b, &self.q))
    }
    fn bottom(&self, x: ObjId, y: ObjId) -> Option<Matrix> {
        Some(Matrix::filled(self.objects[x].size, self.objects[y].size, self.q.bottom()))
    }
    fn fibre_len(&self, x: ObjId, y: ObjId) -> Option<u128> {
        let n = self.objects.len();
        if let Some(Ok(f)) = self.fibres[x * n + y].get() {
            return Some(f.len() as u128);
        }
        if self.needs_filter(x, y) {
            None
        } else {
            self.candidate_count(x, y)
        }
    }
    fn sample_rel(&self, x: ObjId, y: ObjId, rng: &mut ChaCha8Rng) -> Result<Matrix> {
        let bounds = self.entry_bounds(x, y);
        let (nx, ny) = (self.objects[x].size, self.objects[y].size);
        let data = bounds.iter().map(|b| b[rng.gen_range(0..b.len())]).collect();
        let m = Matrix::new(nx, ny, data);
        if !self.needs_filter(x, y) {
            return Ok(m);
        }
        // The least bimodule above a random matrix.
        Ok(self.diag(x).compose(&m, &self.q).compose(&self.diag(y), &self.q))
    }
    fn sample_arrow(&self, x: ObjId, y: ObjId, rng: &mut ChaCha8Rng) -> Result<Option<MapArrow>> {
        if self.listed.is_some() {
            let h = self.hom(x, y)?;
            return Ok(if h.is_empty() { None } else { Some(h[rng.gen_range(0..h.len())].clone()) });
        }
        let (nx, ny) = (self.objects[x].size, self.objects[y].size);
        if ny == 0 {
            return Ok(if nx == 0 { Some(self.identity(x)) } else { None });
        }
        for _ in 0..64 {
            let f = MapArrow::new(x, y, (0..nx).map(|_| rng.gen_range(0..ny as u32)).collect());
            if self.is_base_arrow(&f) {
                return Ok(Some(f));
            }
        }
        Ok(None)
    }
    fn fibre_height(&self, x: ObjId, y: ObjId) -> Option<u64> {
        if !self.needs_filter(x, y) && self.objects[x].extent.is_none() && self.objects[y].extent.is_none() {
            let entries = (self.objects[x].size * self.objects[y].size) as u64;
            return Some(entries * self.q.height() as u64);
        }
        let els = self.fibre(x, y).ok()?;
        if els.len() > 1 << 12 {
            return None;
        }
        crate::doctrine::poset_height(els.len(), |i, j| els[i].leq(&els[j], &self.q))
    }
    fn value_quantale(&self) -> Option<&Quantale> {
        Some(&self.q)
    }
    fn rel_values(&self, _x: ObjId, _y: ObjId, a: &Matrix) -> Option<Matrix> {
        Some(a.clone())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::doctrine::{check_doctrine_laws, ext_equal, is_extensional, objects};
    use crate::quantale::{builtin_quantale, QuantaleKind};

    fn boolean() -> Quantale {
        builtin_quantale(QuantaleKind::Boolean).unwrap()
    }

    fn tropical() -> Quantale {
        builtin_quantale(QuantaleKind::TropicalGrid { step: 1.0, cap: 2.0 }).unwrap()
    }

    fn powerset2() -> Quantale {
        builtin_quantale(QuantaleKind::PowersetFrame { n: 2 }).unwrap()
    }

    fn cat(q: &Quantale, points: &[&str], dist: &[&[&str]], extent: Option<&[&str]>) -> VCategory {
        let j = VCategoryJson {
            name: None,
            points: points.iter().map(|s| s.to_string()).collect(),
            dist: dist.iter().map(|r| r.iter().map(|s| s.to_string()).collect()).collect(),
            extent: extent.map(|e| e.iter().map(|s| s.to_string()).collect()),
        };
        VCategory::from_json(&j, q).unwrap()
    }

    #[test]
    fn vrel_fibres_diagonals_and_composition() {
        let b = boolean();
        let d = make_vrel_doctrine(&b, &[1, 2], true, &Limits::default()).unwrap();
        assert_eq!(d.fibre(0, 1).unwrap().len(), 4);
        assert_eq!(d.diag(1), Matrix::crisp_identity(&b, 2));
        let alpha = Matrix::new(1, 2, vec![1, 0]);
        let beta = Matrix::new(2, 1, vec![1, 0]);
        assert_eq!(d.comp(0, 1, 0, &alpha, &beta), Matrix::new(1, 1, vec![1]));
        let constant = d.arrow(1, 0, vec![0, 0]).unwrap();
        assert_eq!(d.graph(&constant).label(&b), "[[1],[1]]");
    }

    #[test]
    fn vrel_graphs_are_function_graphs() {
        let b = boolean();
        let d = make_vrel_doctrine(&b, &[2, 3], true, &Limits::default()).unwrap();
        for f in d.hom(0, 1).unwrap().iter() {
            let expected = Matrix::from_fn(2, 3, |i, j| u8::from(f.apply(i) == j));
            assert_eq!(d.graph(f), expected);
        }
        assert_eq!(d.hom(0, 1).unwrap().len(), 9);
    }

    #[test]
    fn vrel_laws_hold() {
        let b = boolean();
        let d = make_vrel_doctrine(&b, &[1, 2, 3], true, &Limits::default()).unwrap();
        let r = check_doctrine_laws(&d, &Limits::default()).unwrap();
        assert!(r.is_clean(), "{r:?}");
        let t = make_vrel_doctrine(&tropical(), &[1, 2], true, &Limits::default()).unwrap();
        assert!(check_doctrine_laws(&t, &Limits::default()).unwrap().is_clean());
    }

    #[test]
    fn fibre_cap_is_enforced() {
        let limits = Limits {
            fibre_cap: 1000,
            ..Limits::default()
        };
        let err = make_vrel_doctrine(&boolean(), &[1, 4], true, &limits).unwrap_err();
        assert!(matches!(err, Error::CapExceeded { .. }), "{err}");
    }

    #[test]
    fn tropical_metric_diagonal_reads_distances() {
        let t = tropical();
        let c = cat(&t, &["p", "q"], &[&["0", "1"], &["1", "0"]], None);
        let d = make_vcat_doctrine(&t, &[c], &Limits::default()).unwrap();
        assert_eq!(d.diag(0).to_names(&t), vec![vec!["0", "1"], vec!["1", "0"]]);
        assert!(check_doctrine_laws(&d, &Limits::default()).unwrap().is_clean());
    }

    #[test]
    fn one_point_metric_is_terminal_like() {
        let t = tropical();
        let c = cat(&t, &["p"], &[&["0"]], None);
        let d = make_vcat_doctrine(&t, &[c], &Limits::default()).unwrap();
        // Bimodules on a point are all values, d is the unit.
        assert_eq!(d.diag(0), Matrix::new(1, 1, vec![t.unit()]));
        assert_eq!(d.hom(0, 0).unwrap().len(), 1);
    }

    #[test]
    fn bimodule_count_matches_brute_force() {
        let b = boolean();
        let cats = [
            cat(&b, &["a", "b"], &[&["1", "0"], &["0", "1"]], None),
            cat(&b, &["c", "d"], &[&["1", "1"], &["1", "1"]], None),
        ];
        let d = make_vcat_doctrine(&b, &cats, &Limits::default()).unwrap();
        for x in 0..2 {
            for y in 0..2 {
                let (dx, dy) = (&cats[x].dist, &cats[y].dist);
                let brute = (0u8..16)
                    .filter(|bits| {
                        let phi = |i: usize, j: usize| (bits >> (i * 2 + j)) & 1;
                        (0..2).all(|i| {
                            (0..2).all(|j| {
                                (0..2).all(|k| {
                                    (phi(i, j) & dx.get(k, i)) <= phi(k, j) && (dy.get(j, k) & phi(i, j)) <= phi(i, k)
                                })
                            })
                        })
                    })
                    .count();
                assert_eq!(d.fibre(x, y).unwrap().len(), brute, "fibre {x},{y}");
            }
        }
        // discrete to discrete: all 16; indiscrete to indiscrete: empty or full.
        assert_eq!(d.fibre(0, 0).unwrap().len(), 16);
        assert_eq!(d.fibre(1, 1).unwrap().len(), 2);
        assert!(check_doctrine_laws(&d, &Limits::default()).unwrap().is_clean());
    }

    #[test]
    fn zero_distance_points_are_not_extensional() {
        let t = tropical();
        let c = cat(&t, &["p", "q"], &[&["0", "0"], &["0", "0"]], None);
        let one = cat(&t, &["o"], &[&["0"]], None);
        let d = make_vcat_doctrine(&t, &[one, c], &Limits::default()).unwrap();
        let f = d.arrow(0, 1, vec![0]).unwrap();
        let g = d.arrow(0, 1, vec![1]).unwrap();
        assert!(ext_equal(&d, &f, &g).unwrap());
        assert!(!is_extensional(&d, 1).unwrap());
        assert!(is_extensional(&d, 0).unwrap());
    }

    #[test]
    fn walters_powerset_diagonal() {
        let h = powerset2();
        let c = cat(&h, &["u", "v"], &[&["{a}", "{}"], &["{}", "{b}"]], Some(&["{a}", "{b}"]));
        let d = make_walters_doctrine(&h, &[c], &Limits::default()).unwrap();
        assert_eq!(d.diag(0).label(&h), "[[{a},{}],[{},{b}]]");
        // Off-diagonal entries are forced to the bottom in every bimodule.
        for m in d.fibre(0, 0).unwrap().iter() {
            assert_eq!(m.get(0, 1), h.bottom());
            assert_eq!(m.get(1, 0), h.bottom());
        }
        assert!(check_doctrine_laws(&d, &Limits::default()).unwrap().is_clean());
    }

    #[test]
    fn kernels_read_distances() {
        let t = tropical();
        let h = powerset2();
        let metric = cat(&t, &["p", "q", "r"], &[&["0", "1", "2"], &["1", "0", "1"], &["2", "1", "0"]], None);
        let walters = cat(&h, &["u", "v"], &[&["{a,b}", "{a}"], &["{a}", "{a}"]], Some(&["{a,b}", "{a}"]));
        let doctrines = [
            make_vrel_doctrine(&t, &[1, 2], true, &Limits::default()).unwrap(),
            make_vcat_doctrine(&t, &[metric.clone(), metric], &Limits::default()).unwrap(),
            make_walters_doctrine(&h, &[walters.clone(), walters], &Limits::default()).unwrap(),
        ];
        for d in &doctrines {
            for x in objects(d) {
                for y in objects(d) {
                    for f in d.hom(x, y).unwrap().iter() {
                        let g = d.graph(f);
                        assert_eq!(d.kernel(f), d.comp(x, y, x, &g, &d.conv(x, y, &g)), "{}", d.arrow_name(f));
                    }
                }
            }
        }
    }

    #[test]
    fn walters_rejects_bad_inputs() {
        let t = tropical();
        let c = cat(&t, &["p"], &[&["0"]], Some(&["0"]));
        assert!(make_walters_doctrine(&t, &[c], &Limits::default()).is_err());
        let h = builtin_quantale(QuantaleKind::Chain { n: 2 }).unwrap();
        let twins = cat(&h, &["p", "q"], &[&["1", "1"], &["1", "1"]], Some(&["1", "1"]));
        assert!(matches!(
            make_walters_doctrine(&h, &[twins], &Limits::default()),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn walters_completion_of_a_point() {
        let h = builtin_quantale(QuantaleKind::Chain { n: 2 }).unwrap();
        let x = cat(&h, &["p"], &[&["1"]], Some(&["1"]));
        let xbar = walters_completion(&h, &x).unwrap();
        assert_eq!(xbar.points, vec!["[0]", "[1]"]);
        assert_eq!(xbar.extent, Some(vec![0, 1]));
        assert_eq!(completion_unit(&h, &x, &xbar), vec![1]);
        xbar.validate_walters(&h).unwrap();
        let d = make_walters_doctrine(&h, &[x, xbar], &Limits::default()).unwrap();
        assert!(check_doctrine_laws(&d, &Limits::default()).unwrap().is_clean());
    }

    #[test]
    fn restricted_base_is_closed_under_composition() {
        let b = boolean();
        let full = make_vrel_doctrine(&b, &[2], true, &Limits::default()).unwrap();
        let swap = full.arrow(0, 0, vec![1, 0]).unwrap();
        let d = full.with_generators(&[swap]).unwrap();
        assert_eq!(d.hom(0, 0).unwrap().len(), 2);
        let bare = make_vrel_doctrine(&b, &[2], false, &Limits::default()).unwrap();
        assert_eq!(bare.hom(0, 0).unwrap().len(), 1);
    }
}
