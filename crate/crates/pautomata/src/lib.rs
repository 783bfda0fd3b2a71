//! Finite p-automata for ascending HNN extensions of free abelian groups.
//!
//! The crate builds and verifies, exactly and over arbitrary-precision
//! integers, the chain
//!
//! ```text
//! matrix M = pN + C  ->  carry automaton over {0,…,p-1}^r
//!                    ->  state group = exponentiation of cyclic p-groups
//!                    ->  tree embedding of the state group
//!                    ->  equivalent automaton over p letters, all state
//!                        permutations powers of one p-cycle
//! ```
//!
//! together with exact (bisimulation-based, not depth-bounded) verification
//! of the HNN presentation relations and finite-level p-group witnesses.
//!
//! Modules follow the pipeline: [`perm`] and [`matrix`] are the exact
//! primitives; [`wreath`] and [`exp`] implement portraits and the
//! exponentiation action; [`closure`] and [`sylow`] enumerate p-groups and
//! embed them into regular rooted trees; [`transducer`] and [`bisim`] are
//! the Mealy-machine algebra; [`affine`], [`relations`], [`minimizer`] and
//! [`pipeline`] assemble the artifact.
//!
//! Data-parallel inner loops (closures, exhaustive verifications) run on
//! rayon when the default `parallel` feature is enabled and fall back to
//! sequential loops without it; the sequential reference implementations
//! stay available either way and the `parallel` bench compares the two.

pub mod affine;
pub mod bisim;
pub mod closure;
pub mod dot;
pub mod error;
mod exec;
pub mod exp;
pub mod fixtures;
pub mod jsonio;
pub mod matrix;
pub mod minimizer;
pub mod perm;
pub mod pipeline;
pub mod relations;
pub mod sylow;
pub mod transducer;
pub mod words;
pub mod wreath;

pub use affine::AffineAutomaton;
pub use error::{Error, Result};
pub use exp::{exp_apply, exponentiation_generators, ExpElement};
pub use matrix::{divmod_vec, permutation_matrix, IntMatrix, IntVector};
pub use minimizer::{
    build_b, embedding_from_tree, phi_extend, verify_minimization, EmbeddingData,
    MinimizedAutomaton,
};
pub use perm::{is_power_of_cycle, Permutation};
pub use pipeline::{build_matrix, run_pipeline, PipelineReport, PipelineSpec};
pub use relations::{
    generator_candidates, level_group_is_p_group, verify_hnn_relations,
    verify_states_exponentiation, RelationReport,
};
pub use sylow::{sylow_tree_embedding, TreeEmbedding};
pub use transducer::{PAutomatonCert, PermAutomaton, PointedAutomaton};
pub use wreath::{decompose_tree_perm, WreathElement};

pub use closure::{group_closure, group_closure_seq, group_closure_with, Closure};
