//! Random small presentations drawn from the builtin constructors.

use crate::builtins::{make_vcat_doctrine, make_vrel_doctrine, make_walters_doctrine, Flavor, ValuedDoctrine, VCategory};
use crate::doctrine::Limits;
use crate::error::Result;
use crate::matrix::Matrix;
use crate::quantale::{builtin_quantale, Quantale, QuantaleKind};
use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub fn sample_quantales() -> [QuantaleKind; 4] {
    [
        QuantaleKind::Boolean,
        QuantaleKind::Chain { n: 3 },
        QuantaleKind::PowersetFrame { n: 2 },
        QuantaleKind::TropicalGrid { step: 1.0, cap: 2.0 },
    ]
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Shape {
    pub max_objects: usize,
    pub max_points: usize,
}

impl Default for Shape {
    fn default() -> Self {
        Shape { max_objects: 2, max_points: 3 }
    }
}

#[derive(Debug, Clone)]
pub struct Generated {
    pub label: String,
    pub kind: QuantaleKind,
    pub doctrine: ValuedDoctrine,
}

fn close_transitively(q: &Quantale, d: &mut Matrix) {
    let n = d.rows();
    loop {
        let mut changed = false;
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    let via = q.join(d.get(i, k), q.tensor(d.get(i, j), d.get(j, k)));
                    if via != d.get(i, k) {
                        d.set(i, k, via);
                        changed = true;
                    }
                }
            }
        }
        if !changed {
            return;
        }
    }
}

fn pick(q: &Quantale, rng: &mut ChaCha8Rng) -> u8 {
    let all: Vec<u8> = q.elements().collect();
    *all.choose(rng).expect("quantales are non-empty")
}

/// A symmetric, reflexive, transitive V-category on `n` points.
pub fn random_metric(q: &Quantale, n: usize, rng: &mut ChaCha8Rng) -> VCategory {
    let mut d = Matrix::filled(n, n, q.bottom());
    for i in 0..n {
        d.set(i, i, q.join(q.unit(), pick(q, rng)));
        for j in 0..i {
            let v = pick(q, rng);
            d.set(i, j, v);
            d.set(j, i, v);
        }
    }
    close_transitively(q, &mut d);
    VCategory {
        name: None,
        points: (0..n).map(|i| format!("p{i}")).collect(),
        dist: d,
        extent: None,
    }
}

/// A skeletal frame-enriched category on `n` points, or `None` when the
/// draw collapsed two points.
pub fn random_walters(h: &Quantale, n: usize, rng: &mut ChaCha8Rng) -> Option<VCategory> {
    let e: Vec<u8> = (0..n).map(|_| pick(h, rng)).collect();
    let mut d = Matrix::filled(n, n, h.bottom());
    for i in 0..n {
        d.set(i, i, e[i]);
        for j in 0..i {
            let v = h.meet(pick(h, rng), h.meet(e[i], e[j]));
            d.set(i, j, v);
            d.set(j, i, v);
        }
    }
    close_transitively(h, &mut d);
    let skeletal = (0..n).all(|i| (0..n).all(|j| i == j || !(d.get(i, j) == e[i] && e[i] == e[j])));
    skeletal.then(|| VCategory {
        name: None,
        points: (0..n).map(|i| format!("p{i}")).collect(),
        dist: d,
        extent: Some(e),
    })
}

/// A random presentation: a sample quantale, a flavor it supports, and up
/// to `shape.max_objects` objects of at most `shape.max_points` points.
pub fn random_presentation(rng: &mut ChaCha8Rng, shape: Shape, limits: &Limits) -> Result<Generated> {
    let kind = *sample_quantales().choose(rng).expect("non-empty");
    let q = builtin_quantale(kind)?;
    let flavors: &[Flavor] = if q.is_frame() {
        &[Flavor::Rel, Flavor::Metric, Flavor::Walters]
    } else {
        &[Flavor::Rel, Flavor::Metric]
    };
    let flavor = *flavors.choose(rng).expect("non-empty");
    let count = rng.gen_range(1..=shape.max_objects);
    let sizes: Vec<usize> = (0..count).map(|_| rng.gen_range(1..=shape.max_points)).collect();
    let (doctrine, what) = match flavor {
        Flavor::Rel => {
            let all = rng.gen_bool(0.75);
            let d = make_vrel_doctrine(&q, &sizes, all, limits)?;
            (d, if all { "VRel" } else { "VRel, identities only" })
        }
        Flavor::Metric => {
            let cats: Vec<VCategory> = sizes.iter().map(|&n| random_metric(&q, n, rng)).collect();
            (make_vcat_doctrine(&q, &cats, limits)?, "VCat")
        }
        Flavor::Walters => {
            let mut cats = Vec::new();
            for &n in &sizes {
                let c = loop {
                    if let Some(c) = random_walters(&q, n, rng) {
                        break c;
                    }
                };
                cats.push(c);
            }
            (make_walters_doctrine(&q, &cats, limits)?, "Walters")
        }
    };
    Ok(Generated {
        label: format!("{what} over {kind}, carriers {sizes:?}"),
        kind,
        doctrine,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;

    #[test]
    fn generated_categories_validate() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for kind in sample_quantales() {
            let q = builtin_quantale(kind).unwrap();
            for n in 1..=3 {
                random_metric(&q, n, &mut rng).validate_metric(&q).unwrap();
                if q.is_frame() {
                    if let Some(c) = random_walters(&q, n, &mut rng) {
                        c.validate_walters(&q).unwrap();
                    }
                }
            }
        }
    }

    #[test]
    fn draws_are_reproducible() {
        let draw = |seed| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            (0..5)
                .map(|_| random_presentation(&mut rng, Shape::default(), &Limits::default()).unwrap().label)
                .collect::<Vec<_>>()
        };
        assert_eq!(draw(3), draw(3));
    }
}
