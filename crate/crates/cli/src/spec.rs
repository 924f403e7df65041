//! Loading and emitting presentations.
//!
//! A spec file is either a tabulated doctrine (`base`, `fibres`, ...) or a
//! bare recipe `{"recipe": {...}}` naming a builtin constructor. Tabulated
//! files written by `builtin` keep their recipe under `extras.recipe`, so the
//! constructions that need the matrix form can rebuild it.

use reldoc::builtins::{
    make_vcat_doctrine, make_vrel_doctrine, make_walters_doctrine, walters_completion, ValuedDoctrine, VCategory,
    VCategoryJson,
};
use reldoc::finite::DoctrineJson;
use reldoc::generate::{random_metric, random_walters};
use reldoc::monad::{identity_monad_json, powerset_monad, IdentityMonad, PowersetMonad, TabulatedMonad};
use reldoc::{builtin_quantale, tabulate, Error, FiniteDoctrine, Limits, QuantaleKind, Result};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MonadKind {
    Identity,
}

fn yes() -> bool {
    true
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Recipe {
    Vrel {
        quantale: QuantaleKind,
        carriers: Vec<usize>,
        #[serde(default = "yes")]
        all_functions: bool,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        monad: Option<MonadKind>,
    },
    Vcat {
        quantale: QuantaleKind,
        categories: Vec<VCategoryJson>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        monad: Option<MonadKind>,
    },
    Walters {
        quantale: QuantaleKind,
        categories: Vec<VCategoryJson>,
        /// Adds the completion of every category to the presentation.
        #[serde(default)]
        completions: bool,
    },
    /// Boolean relations with the powerset monad.
    PowersetRel { carriers: Vec<usize> },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct RecipeFile {
    recipe: Recipe,
}

/// A presentation built from a recipe, with its monad if it has one.
#[derive(Debug, Clone)]
pub enum Built {
    Plain(ValuedDoctrine),
    Identity(IdentityMonad<ValuedDoctrine>),
    Powerset(PowersetMonad),
}

impl Built {
    pub fn doctrine(&self) -> &ValuedDoctrine {
        match self {
            Built::Plain(d) => d,
            Built::Identity(m) => &m.doctrine,
            Built::Powerset(m) => reldoc::monad::DoctrineMonad::doctrine(m),
        }
    }
}

pub enum Loaded {
    Finite {
        doctrine: FiniteDoctrine,
        monad: Option<TabulatedMonad>,
        recipe: Option<Recipe>,
    },
    Recipe(Built),
}

fn structural(what: &str, e: impl std::fmt::Display) -> Error {
    Error::structural(format!("{what}: {e}"))
}

fn named_categories(q: &reldoc::Quantale, cats: &[VCategoryJson], prefix: &str) -> Result<Vec<VCategory>> {
    cats.iter()
        .enumerate()
        .map(|(i, j)| {
            let mut c = VCategory::from_json(j, q)?;
            c.name.get_or_insert_with(|| format!("{prefix}{i}"));
            Ok(c)
        })
        .collect()
}

pub fn build(recipe: &Recipe, limits: &Limits) -> Result<Built> {
    match recipe {
        Recipe::Vrel { quantale, carriers, all_functions, monad } => {
            let q = builtin_quantale(*quantale)?;
            let d = make_vrel_doctrine(&q, carriers, *all_functions, limits)?;
            Ok(match monad {
                Some(MonadKind::Identity) => Built::Identity(IdentityMonad::new(d)),
                None => Built::Plain(d),
            })
        }
        Recipe::Vcat { quantale, categories, monad } => {
            let q = builtin_quantale(*quantale)?;
            let d = make_vcat_doctrine(&q, &named_categories(&q, categories, "C")?, limits)?;
            Ok(match monad {
                Some(MonadKind::Identity) => Built::Identity(IdentityMonad::new(d)),
                None => Built::Plain(d),
            })
        }
        Recipe::Walters { quantale, categories, completions } => {
            let h = builtin_quantale(*quantale)?;
            let mut cats = named_categories(&h, categories, "C")?;
            if *completions {
                let closed = cats.iter().map(|c| walters_completion(&h, c)).collect::<Result<Vec<_>>>()?;
                cats.extend(closed);
            }
            Ok(Built::Plain(make_walters_doctrine(&h, &cats, limits)?))
        }
        Recipe::PowersetRel { carriers } => Ok(Built::Powerset(powerset_monad(carriers, limits)?)),
    }
}

pub fn parse(text: &str, limits: &Limits) -> Result<Loaded> {
    let value: serde_json::Value = serde_json::from_str(text).map_err(|e| structural("invalid JSON", e))?;
    if value.get("base").is_some() {
        let j: DoctrineJson = serde_json::from_value(value).map_err(|e| structural("doctrine", e))?;
        let doctrine = FiniteDoctrine::from_json(&j)?;
        let recipe = match doctrine.extras.get("recipe") {
            Some(r) => Some(serde_json::from_value(r.clone()).map_err(|e| structural("recipe", e))?),
            None => None,
        };
        let monad = TabulatedMonad::from_extras(doctrine.clone())?;
        Ok(Loaded::Finite { doctrine, monad, recipe })
    } else if value.get("recipe").is_some() {
        let f: RecipeFile = serde_json::from_value(value).map_err(|e| structural("recipe", e))?;
        let built = build(&f.recipe, limits)?;
        Ok(Loaded::Recipe(built))
    } else {
        Err(Error::structural("expected a tabulated doctrine (with \"base\") or a \"recipe\""))
    }
}

/// The file contents `builtin` writes: the tabulated doctrine carrying its
/// recipe, or the bare recipe when the presentation is not tabulated. Pretty
/// JSON with a trailing newline, in the field order loading and saving keeps.
pub fn emit(recipe: &Recipe, tabulated: bool, limits: &Limits) -> Result<String> {
    let built = build(recipe, limits)?;
    let text = if !tabulated || matches!(built, Built::Powerset(_)) {
        serde_json::to_string_pretty(&RecipeFile { recipe: recipe.clone() })
    } else {
        let mut fd = tabulate(built.doctrine(), limits)?;
        let recipe_value = serde_json::to_value(recipe).map_err(|e| structural("recipe", e))?;
        fd.extras.insert("recipe".into(), recipe_value);
        if let Built::Identity(_) = built {
            let monad = serde_json::to_value(identity_monad_json(&fd)).map_err(|e| structural("monad", e))?;
            fd.extras.insert("monad".into(), monad);
        }
        serde_json::to_string_pretty(&fd.to_json())
    };
    Ok(text.map_err(|e| structural("spec", e))? + "\n")
}

/// Categories for a recipe drawn from the seed, one per requested size.
pub fn random_categories(kind: QuantaleKind, sizes: &[usize], walters: bool, seed: u64) -> Result<Vec<VCategoryJson>> {
    let q = builtin_quantale(kind)?;
    if walters && !q.is_frame() {
        return Err(Error::InvalidParameter(format!("{kind} is not a frame")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::new();
    for (i, &n) in sizes.iter().enumerate() {
        let mut c = if walters {
            loop {
                if let Some(c) = random_walters(&q, n, &mut rng) {
                    break c;
                }
            }
        } else {
            random_metric(&q, n, &mut rng)
        };
        c.name = Some(format!("C{i}"));
        out.push(c.to_json(&q));
    }
    Ok(out)
}
