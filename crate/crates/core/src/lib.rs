//! One-sided shifts of finite type and the objects attached to them.
//!
//! - [`matrix`], [`graph`]: presentations, words and cylinders.
//! - [`code`], [`witness`]: sliding block codes and finite verification of
//!   conjugacy and eventual-conjugacy witnesses.
//! - [`amalgamation`]: out-splitting, total amalgamation and the one-sided
//!   conjugacy decision.
//! - [`point`], [`groupoid`]: eventually periodic points and the
//!   Deaconu-Renault groupoid on them, with the cocycle and the shift
//!   endomorphism.
//! - [`algebra`]: the dense *-algebra of the Cuntz-Krieger algebra on the
//!   monomials `s_α s_β^*`, with `τ`, `φ`, the diagonal expectation and the
//!   gauge grading.

pub mod algebra;
pub mod amalgamation;
pub mod code;
pub mod counterexample;
pub mod format;
pub mod graph;
pub mod groupoid;
pub mod matrix;
pub mod point;
pub mod random;
pub mod search;
pub mod witness;

pub use amalgamation::{
    decide_one_sided_conjugacy, graphs_isomorphic, mergeable_pairs, out_amalgamate, out_split, total_amalgamation,
    AmalgamationError, AmalgamationMove, DecisionReport, Verdict,
};
pub use code::{apply_code, higher_block, CodeError, HigherBlock, SlidingBlockCode};
pub use graph::{Edge, GraphError, Multigraph};
pub use groupoid::{verify_groupoid_axioms, AxiomReport, BasisBisection, GroupoidElement, GroupoidError, InducedGroupoidMap};
pub use matrix::{admissible_words, validate_matrix, Cylinder, Letter, Matrix01, MatrixError, Word, WordError};
pub use point::{EPPoint, PointError};
pub use witness::{
    verify_conjugacy, verify_eventual_conjugacy, verify_homeomorphism, Conjugacy, ConjugacyWitness,
    EventualConjugacyWitness, Verification,
};
