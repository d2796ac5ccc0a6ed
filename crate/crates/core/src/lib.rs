//! Finite structure-semantics engine.
//!
//! Everything here is exhaustively computable: categories are given by
//! explicit object lists, hom tables and composition tables, and every
//! construction (model categories, structure theories, codensity monads,
//! profinite completions, topological completions) is realised on finite
//! instances with canonical, deterministic ordering throughout.

pub mod accept;
pub mod eqpres;
pub mod fincat;
pub mod groupsem;
pub mod monads;
pub mod proth;
pub mod rng;
pub mod setval;
pub mod topth;

pub use fincat::{FinCategory, FinFunctor, FinSet, NatTransformation, SetFunction};
