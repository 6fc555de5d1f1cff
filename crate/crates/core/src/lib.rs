//! Finite partial Markov categories.
//!
//! A typed string-diagram language is evaluated into the finite backends
//! named by [`Backend`]. On top of them sit order deciders with inference
//! constructions, checked by a seeded law harness.

pub mod diagram;
pub mod discrete;
pub mod error;
pub mod eval;
pub mod finstoch;
pub mod inference;
pub mod laws;
pub mod morphism;
pub mod order;
pub mod random;
pub mod text;

pub use diagram::{typecheck, DiagramTerm, Generator, ObjectType, Signature};
pub use discrete::{FinRel, PartialFn};
pub use error::{Error, Result};
pub use eval::evaluate;
pub use finstoch::SubKernel;
pub use inference::{bayes_invert, cond_compose, conditional, Conditionals, JointFactorization};
pub use morphism::{Backend, Morphism, ScalarValue, Tolerance};
pub use order::{conditional_leq, restriction_leq, ConditionalOrder, OrderVerdict, Relation};
pub use text::{parse, render, SourceSpan};
