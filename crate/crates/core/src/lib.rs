//! Finite models of relational doctrines.
//!
//! A relational doctrine assigns to each pair of objects of a base category a
//! poset of relations, with identities, composition and converse. This crate
//! represents finite instances, checks their laws, decides the rule of unique
//! choice, and runs the associated universal constructions: the unique-choice
//! completion, singleton objects and the Cauchy reflector, quotients, and the
//! compactification of spaces for a monad.

pub mod builtins;
pub mod completion;
pub mod doctrine;
pub mod error;
pub mod finite;
pub mod generate;
pub mod matrix;
pub mod morphism;
pub mod monad;
pub mod quantale;
pub mod quotients;
pub mod relprops;
pub mod report;
pub mod topology;

pub use doctrine::{check_doctrine_laws, Doctrine, Limits, ObjId};
pub use error::{Error, Result};
pub use finite::{FiniteDoctrine, tabulate};
pub use matrix::Matrix;
pub use quantale::{builtin_quantale, check_quantale_laws, is_lean, Quantale, QuantaleKind};
pub use report::LawReport;
