//! Finite commutative quantales.
//!
//! Elements are indices into the carrier. Joins are a binary table plus a
//! bottom element; n-ary joins fold the table.

use crate::error::{Error, Result};
use crate::report::LawReport;
use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;

/// Index of a quantale element.
pub type Elem = u8;

/// Largest supported carrier.
pub const MAX_CARRIER: usize = 256;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Quantale {
    names: Vec<String>,
    leq: Vec<bool>,
    join: Vec<Elem>,
    tensor: Vec<Elem>,
    meet: Vec<Elem>,
    unit: Elem,
    bottom: Elem,
    top: Elem,
}

/// Wire format. Rows and columns follow `carrier` order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct QuantaleJson {
    pub carrier: Vec<String>,
    pub leq: Vec<Vec<bool>>,
    pub join: Vec<Vec<String>>,
    pub tensor: Vec<Vec<String>>,
    pub unit: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bottom: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub top: Option<String>,
}

impl Quantale {
    /// Builds a quantale from raw tables. Only the shape is validated here;
    /// the algebraic laws are the business of [`check_quantale_laws`].
    pub fn from_tables(
        names: Vec<String>,
        leq: Vec<Vec<bool>>,
        join: Vec<Vec<Elem>>,
        tensor: Vec<Vec<Elem>>,
        unit: Elem,
        bottom: Option<Elem>,
        top: Option<Elem>,
    ) -> Result<Self> {
        let n = names.len();
        let mut errs = Vec::new();
        if n == 0 {
            errs.push("carrier is empty".to_string());
        }
        if n > MAX_CARRIER {
            errs.push(format!("carrier has {n} elements; at most {MAX_CARRIER} are supported"));
        }
        let mut seen = std::collections::BTreeSet::new();
        for name in &names {
            if !seen.insert(name) {
                errs.push(format!("duplicate carrier element {name:?}"));
            }
        }
        let square = |t: &str, rows: usize, cols: &[usize], errs: &mut Vec<String>| {
            if rows != n || cols.iter().any(|&c| c != n) {
                errs.push(format!("{t} table is not {n}x{n}"));
            }
        };
        square("leq", leq.len(), &leq.iter().map(Vec::len).collect::<Vec<_>>(), &mut errs);
        square("join", join.len(), &join.iter().map(Vec::len).collect::<Vec<_>>(), &mut errs);
        square("tensor", tensor.len(), &tensor.iter().map(Vec::len).collect::<Vec<_>>(), &mut errs);
        let in_range = |v: Elem| (v as usize) < n;
        if join.iter().flatten().chain(tensor.iter().flatten()).any(|&v| !in_range(v)) {
            errs.push("table entry outside the carrier".to_string());
        }
        for (what, v) in [("unit", Some(unit)), ("bottom", bottom), ("top", top)] {
            if let Some(v) = v {
                if !in_range(v) {
                    errs.push(format!("{what} outside the carrier"));
                }
            }
        }
        if !errs.is_empty() {
            return Err(Error::Structural(errs));
        }
        let leq: Vec<bool> = leq.into_iter().flatten().collect();
        let join: Vec<Elem> = join.into_iter().flatten().collect();
        let tensor: Vec<Elem> = tensor.into_iter().flatten().collect();
        let below_all = |b: usize| (0..n).all(|x| leq[b * n + x]);
        let above_all = |t: usize| (0..n).all(|x| leq[x * n + t]);
        let bottom = bottom.unwrap_or_else(|| (0..n).find(|&b| below_all(b)).unwrap_or(0) as Elem);
        let top = top.unwrap_or_else(|| (0..n).find(|&t| above_all(t)).unwrap_or(n - 1) as Elem);
        let mut q = Quantale {
            names,
            leq,
            join,
            tensor,
            meet: Vec::new(),
            unit,
            bottom,
            top,
        };
        q.meet = (0..n * n)
            .map(|i| {
                let (a, b) = ((i / n) as Elem, (i % n) as Elem);
                q.join_all(q.elements().filter(|&c| q.leq(c, a) && q.leq(c, b)))
            })
            .collect();
        Ok(q)
    }

    pub fn from_json(j: &QuantaleJson) -> Result<Self> {
        let mut errs = Vec::new();
        let index = |name: &str, errs: &mut Vec<String>| -> Elem {
            match j.carrier.iter().position(|c| c == name) {
                Some(i) => i as Elem,
                None => {
                    errs.push(format!("unknown quantale element {name:?}"));
                    0
                }
            }
        };
        let table = |t: &Vec<Vec<String>>, errs: &mut Vec<String>| -> Vec<Vec<Elem>> {
            t.iter()
                .map(|row| row.iter().map(|s| index(s, errs)).collect())
                .collect()
        };
        let join = table(&j.join, &mut errs);
        let tensor = table(&j.tensor, &mut errs);
        let unit = index(&j.unit, &mut errs);
        let bottom = j.bottom.as_deref().map(|s| index(s, &mut errs));
        let top = j.top.as_deref().map(|s| index(s, &mut errs));
        if !errs.is_empty() {
            return Err(Error::Structural(errs));
        }
        Self::from_tables(j.carrier.clone(), j.leq.clone(), join, tensor, unit, bottom, top)
    }

    pub fn to_json(&self) -> QuantaleJson {
        let n = self.len();
        let table = |t: &[Elem]| -> Vec<Vec<String>> {
            (0..n)
                .map(|i| (0..n).map(|k| self.names[t[i * n + k] as usize].clone()).collect())
                .collect()
        };
        QuantaleJson {
            carrier: self.names.clone(),
            leq: (0..n).map(|i| self.leq[i * n..(i + 1) * n].to_vec()).collect(),
            join: table(&self.join),
            tensor: table(&self.tensor),
            unit: self.name(self.unit).to_string(),
            bottom: Some(self.name(self.bottom).to_string()),
            top: Some(self.name(self.top).to_string()),
        }
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn elements(&self) -> impl Iterator<Item = Elem> + Clone {
        (0..self.names.len()).map(|i| i as Elem)
    }

    pub fn name(&self, a: Elem) -> &str {
        &self.names[a as usize]
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn index_of(&self, name: &str) -> Option<Elem> {
        self.names.iter().position(|n| n == name).map(|i| i as Elem)
    }

    #[inline]
    pub fn leq(&self, a: Elem, b: Elem) -> bool {
        self.leq[a as usize * self.names.len() + b as usize]
    }

    #[inline]
    pub fn join(&self, a: Elem, b: Elem) -> Elem {
        self.join[a as usize * self.names.len() + b as usize]
    }

    #[inline]
    pub fn tensor(&self, a: Elem, b: Elem) -> Elem {
        self.tensor[a as usize * self.names.len() + b as usize]
    }

    /// Greatest lower bound, computed as the join of all lower bounds.
    #[inline]
    pub fn meet(&self, a: Elem, b: Elem) -> Elem {
        self.meet[a as usize * self.names.len() + b as usize]
    }

    pub fn join_all(&self, items: impl IntoIterator<Item = Elem>) -> Elem {
        items.into_iter().fold(self.bottom, |acc, x| self.join(acc, x))
    }

    pub fn unit(&self) -> Elem {
        self.unit
    }

    pub fn bottom(&self) -> Elem {
        self.bottom
    }

    pub fn top(&self) -> Elem {
        self.top
    }

    /// Unit is the top element.
    pub fn is_affine(&self) -> bool {
        self.unit == self.top
    }

    /// Tensor is meet and the unit is top.
    pub fn is_frame(&self) -> bool {
        self.is_affine()
            && self
                .elements()
                .all(|a| self.elements().all(|b| self.tensor(a, b) == self.meet(a, b)))
    }

    /// Length of the longest strict chain, counted in steps.
    pub fn height(&self) -> usize {
        let n = self.len();
        // Longest chain ending at each element, by repeated relaxation.
        let mut depth = vec![0usize; n];
        for _ in 0..n {
            for a in 0..n {
                for b in 0..n {
                    if a != b && self.leq[a * n + b] && depth[b] < depth[a] + 1 {
                        depth[b] = depth[a] + 1;
                    }
                }
            }
        }
        depth.into_iter().max().unwrap_or(0)
    }
}

/// Checks every quantale law exhaustively.
pub fn check_quantale_laws(q: &Quantale) -> LawReport {
    let mut r = LawReport::default();
    let n = q.len() as u64;
    let name = |a: Elem| q.name(a).to_string();
    for a in q.elements() {
        r.check("leq reflexive", q.leq(a, a), || vec![name(a)]);
        r.check("bottom is least", q.leq(q.bottom(), a), || vec![name(q.bottom()), name(a)]);
        r.check("top is greatest", q.leq(a, q.top()), || vec![name(a), name(q.top())]);
        r.check("unit law", q.tensor(q.unit(), a) == a, || vec![name(a)]);
        r.check("tensor preserves empty join", q.tensor(a, q.bottom()) == q.bottom(), || {
            vec![name(a)]
        });
        for b in q.elements() {
            if a != b {
                r.check("leq antisymmetric", !(q.leq(a, b) && q.leq(b, a)), || vec![name(a), name(b)]);
            }
            let j = q.join(a, b);
            r.check("join is an upper bound", q.leq(a, j) && q.leq(b, j), || vec![name(a), name(b)]);
            r.check("join coherent with leq", q.leq(a, b) == (j == b), || vec![name(a), name(b)]);
            r.check("tensor commutative", q.tensor(a, b) == q.tensor(b, a), || vec![name(a), name(b)]);
            for c in q.elements() {
                r.check("leq transitive", !(q.leq(a, b) && q.leq(b, c)) || q.leq(a, c), || {
                    vec![name(a), name(b), name(c)]
                });
                r.check("join is least", !(q.leq(a, c) && q.leq(b, c)) || q.leq(j, c), || {
                    vec![name(a), name(b), name(c)]
                });
                r.check(
                    "tensor associative",
                    q.tensor(q.tensor(a, b), c) == q.tensor(a, q.tensor(b, c)),
                    || vec![name(a), name(b), name(c)],
                );
                r.check(
                    "tensor distributes over joins",
                    q.tensor(a, q.join(b, c)) == q.join(q.tensor(a, b), q.tensor(a, c)),
                    || vec![name(a), name(b), name(c)],
                );
            }
        }
    }
    r.cover("quantale laws", n * n * n, true);
    r
}

/// Result of the leanness test.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Leanness {
    pub lean: bool,
    pub witness: Option<(String, String)>,
}

/// Decides `x∨y=⊤ ∧ x∧y=⊥ ⇒ x=⊤ ∨ y=⊤`. Only meaningful for affine quantales.
pub fn is_lean(q: &Quantale) -> Result<Leanness> {
    if !q.is_affine() {
        return Err(Error::Precondition(format!(
            "leanness is defined for affine quantales; unit {} is not top {}",
            q.name(q.unit()),
            q.name(q.top())
        )));
    }
    for x in q.elements() {
        for y in q.elements() {
            let complementary = q.join(x, y) == q.top() && q.meet(x, y) == q.bottom();
            if complementary && x != q.top() && y != q.top() {
                return Ok(Leanness {
                    lean: false,
                    witness: Some((q.name(x).to_string(), q.name(y).to_string())),
                });
            }
        }
    }
    Ok(Leanness {
        lean: true,
        witness: None,
    })
}

/// The builtin quantale families.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum QuantaleKind {
    Boolean,
    Chain { n: usize },
    PowersetFrame { n: usize },
    TropicalGrid { step: f64, cap: f64 },
}

impl fmt::Display for QuantaleKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            QuantaleKind::Boolean => write!(f, "boolean"),
            QuantaleKind::Chain { n } => write!(f, "chain({n})"),
            QuantaleKind::PowersetFrame { n } => write!(f, "powerset({n})"),
            QuantaleKind::TropicalGrid { step, cap } => write!(f, "tropical({step},{cap})"),
        }
    }
}

impl FromStr for QuantaleKind {
    type Err = Error;

    /// Accepts `boolean`, `chain(n)`, `powerset(n)` and `tropical(step,cap)`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let bad = || Error::InvalidParameter(format!("unknown quantale {s:?}"));
        if s == "boolean" {
            return Ok(QuantaleKind::Boolean);
        }
        let (head, rest) = s.split_once('(').ok_or_else(bad)?;
        let args: Vec<&str> = rest.strip_suffix(')').ok_or_else(bad)?.split(',').map(str::trim).collect();
        let int = |a: &str| a.parse::<usize>().map_err(|_| bad());
        let num = |a: &str| a.parse::<f64>().map_err(|_| bad());
        match (head.trim(), args.as_slice()) {
            ("chain", [n]) => Ok(QuantaleKind::Chain { n: int(n)? }),
            ("powerset" | "powerset_frame", [n]) => Ok(QuantaleKind::PowersetFrame { n: int(n)? }),
            ("tropical" | "tropical_grid", [step, cap]) => Ok(QuantaleKind::TropicalGrid {
                step: num(step)?,
                cap: num(cap)?,
            }),
            _ => Err(bad()),
        }
    }
}

fn tables<F, G>(n: usize, join: F, tensor: G) -> (Vec<Vec<Elem>>, Vec<Vec<Elem>>)
where
    F: Fn(usize, usize) -> usize,
    G: Fn(usize, usize) -> usize,
{
    let build = |op: &dyn Fn(usize, usize) -> usize| {
        (0..n)
            .map(|a| (0..n).map(|b| op(a, b) as Elem).collect())
            .collect()
    };
    (build(&join), build(&tensor))
}

fn format_number(v: f64) -> String {
    let r = (v * 1e9).round() / 1e9;
    format!("{r}")
}

pub fn builtin_quantale(kind: QuantaleKind) -> Result<Quantale> {
    match kind {
        QuantaleKind::Boolean => chain(2),
        QuantaleKind::Chain { n } => chain(n),
        QuantaleKind::PowersetFrame { n } => {
            if n == 0 || n > 8 {
                return Err(Error::InvalidParameter(format!("powerset frame needs 1..=8 atoms, got {n}")));
            }
            let size = 1usize << n;
            let names = (0..size)
                .map(|mask| {
                    let atoms: Vec<String> = (0..n)
                        .filter(|i| mask & (1 << i) != 0)
                        .map(|i| ((b'a' + i as u8) as char).to_string())
                        .collect();
                    format!("{{{}}}", atoms.join(","))
                })
                .collect();
            let leq = (0..size)
                .map(|a| (0..size).map(|b| a & !b == 0).collect())
                .collect();
            let (join, tensor) = tables(size, |a, b| a | b, |a, b| a & b);
            Quantale::from_tables(names, leq, join, tensor, (size - 1) as Elem, Some(0), Some((size - 1) as Elem))
        }
        QuantaleKind::TropicalGrid { step, cap } => {
            if !(step > 0.0) || !(cap >= 0.0) || !step.is_finite() || !cap.is_finite() {
                return Err(Error::InvalidParameter(format!("tropical grid needs step > 0 and finite cap ≥ 0")));
            }
            let k = cap / step;
            if (k - k.round()).abs() > 1e-9 {
                return Err(Error::InvalidParameter(format!("cap {cap} is not a multiple of step {step}")));
            }
            let k = k.round() as usize;
            if k + 2 > MAX_CARRIER {
                return Err(Error::InvalidParameter(format!("tropical grid with {} levels is too large", k + 2)));
            }
            // Index i ≤ k stands for i·step; index k+1 is ∞.
            let inf = k + 1;
            let size = k + 2;
            let mut names: Vec<String> = (0..=k).map(|i| format_number(i as f64 * step)).collect();
            names.push("inf".to_string());
            let leq = (0..size)
                .map(|a| (0..size).map(|b| a >= b).collect())
                .collect();
            let (join, tensor) = tables(size, |a, b| a.min(b), |a, b| if a + b > k { inf } else { a + b });
            Quantale::from_tables(names, leq, join, tensor, 0, Some(inf as Elem), Some(0))
        }
    }
}

fn chain(n: usize) -> Result<Quantale> {
    if n == 0 || n > MAX_CARRIER {
        return Err(Error::InvalidParameter(format!("chain needs 1..={MAX_CARRIER} elements, got {n}")));
    }
    let names = (0..n).map(|i| i.to_string()).collect();
    let leq = (0..n).map(|a| (0..n).map(|b| a <= b).collect()).collect();
    let (join, tensor) = tables(n, usize::max, usize::min);
    Quantale::from_tables(names, leq, join, tensor, (n - 1) as Elem, Some(0), Some((n - 1) as Elem))
}
