//! Exact-rational toolkit for convex algebras, their one-point extensions,
//! and the termination behaviour of probabilistic automata.
//!
//! The crate provides, bottom up:
//!
//! - [`rational`]: exact coefficients in the closed unit interval;
//! - [`algebra`]: binary convex operations as oracles, derived n-ary
//!   mixtures, the three convex-algebra laws, adherence, and sampled
//!   subset classification (ideal / prime / extremal);
//! - [`dist`]: finitely supported rational distributions and the free
//!   algebra over a label set;
//! - [`geometry`]: canonical V-representation polytopes with exact hulls,
//!   Minkowski sums, homothety normal forms, planar decomposition, and
//!   flagged (partially open) plane polygons;
//! - [`semilattice`]: meet-semilattice algebras and fiberwise gluing;
//! - [`extension`]: the one-point extension tables on free algebras and on
//!   convex subsets of simplices, validation, classification by probing,
//!   the prime-ideal gluing construction, and naturality checks;
//! - [`automata`]: probabilistic automata lifted to belief-state
//!   transformers through a chosen extension;
//! - [`sample`]: seeded deterministic generators for certification runs.

pub mod algebra;
pub mod automata;
pub mod dist;
pub mod error;
pub mod extension;
pub mod geometry;
pub mod rational;
pub mod sample;
pub mod semilattice;

pub use algebra::{
    adheres, adheres_half, check_axioms, classify_subset_sampled, derive_nary, extremal_points,
    AxiomReport, AxiomViolation, CoeffVector, Oracle, SubsetReport,
};
pub use automata::{lift, parse_pa, run_word, PaSpec, StepResult};
pub use dist::{free_algebra, uniform, Dist};
pub use error::{Error, Result};
pub use extension::{
    build_case4_with_prime, build_css_extension, build_free_extension, check_naturality,
    css_adheres, css_algebra, css_combine, eligible_case4, glue, imitate_inner_extension,
    is_extremal_in_kd_simplex, probe_extension, AdherenceSet, Case4Report, ConvexMap,
    CssExtensionSpec, ExtElem, ExtensionReport, FreeExtensionSpec,
};
pub use geometry::{standard_simplex, FlaggedPolygon, Point, Polytope};
pub use rational::{parse_rational, Rational};
