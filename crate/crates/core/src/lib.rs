//! Rigorous verification toolkit for the five-point spherical distance-sum
//! problem: five unit vectors maximise the sum of their mutual Euclidean
//! distances exactly at the triangular bipyramid, with value
//! `3√3 + 6√2 + 2`.
//!
//! The crate is layered:
//!
//! * [`rational`] and [`interval`] — exact rational numbers and outward-rounded
//!   interval arithmetic with certified elementary functions;
//! * [`expr`] — expression trees with parsing, interval evaluation and
//!   symbolic differentiation;
//! * [`linalg`] — symmetric interval matrices and their definiteness tests;
//! * [`model`] — the objective, its derivatives, the named constants and
//!   domains, and the pruning predicates;
//! * [`verifier`] — the branch-and-bound certifier, proof traces and replay.
//!
//! The guide in `book/` walks through each layer; its code blocks are
//! compiled and run as documentation tests of this crate.

// Matrix code indexes rows and columns symmetrically; `Expr::{neg, sub, div}`
// are n-ary-style constructors, not operator overloads.
#![allow(clippy::needless_range_loop, clippy::should_implement_trait)]

pub mod certificates;
pub mod expr;
pub mod interval;
pub mod linalg;
pub mod model;
pub mod rational;
pub mod verifier;

pub use interval::{Interval, RoundingPolicy};
pub use rational::Rational;

/// The chapters of the guide in `book/`, compiled so that their code blocks
/// run as documentation tests.
#[cfg(doctest)]
pub mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    pub mod introduction {}
    #[doc = include_str!("../../../book/src/intervals.md")]
    pub mod intervals {}
    #[doc = include_str!("../../../book/src/expressions.md")]
    pub mod expressions {}
    #[doc = include_str!("../../../book/src/definiteness.md")]
    pub mod definiteness {}
    #[doc = include_str!("../../../book/src/model.md")]
    pub mod model {}
    #[doc = include_str!("../../../book/src/verifier.md")]
    pub mod verifier {}
    #[doc = include_str!("../../../book/src/cli.md")]
    pub mod cli {}
}
