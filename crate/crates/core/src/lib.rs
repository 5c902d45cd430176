//! Subgroup graphs of free products of finite groups.
//!
//! Given `G = G1 * G2` with both factors finite and a finite list of words
//! generating a subgroup `H`, this crate builds the reduced precover
//! `Γ(H)` by generalized Stallings foldings, decides membership in `H`,
//! and reads a Kurosh decomposition
//! `H = F(S) * g_1 H_1 g_1^-1 * ... * g_k H_k g_k^-1` off the graph,
//! together with a presentation of `H`.
//!
//! Module map:
//!
//! - [`fingroup`]: finite factor groups, Cayley and coset graphs, Schreier
//!   stabilizers and Reidemeister–Schreier presentations.
//! - [`words`]: words over the two-coloured alphabet and free-product normal forms.
//! - [`lgraph`]: pointed labelled graphs with involutive edges (folding,
//!   hair cutting, components, spanning trees, isomorphism, DOT output).
//! - [`precover`]: the folding pipeline producing `Γ(H)` and membership.
//! - [`kurosh`]: the decomposition itself and its verification.
//! - [`par`]: the data-parallel batch layer (rayon behind the `parallel` feature).

pub mod fingroup;
pub mod kurosh;
pub mod lgraph;
pub mod par;
pub mod precover;
pub mod words;

mod union_find;

pub use fingroup::{FactorPair, FiniteGroup, Gen, GenWord, GroupError, Presentation};
pub use kurosh::{decompose, verify, ConjugatedFactor, KuroshDecomposition, KuroshError};
pub use lgraph::{GraphError, LabeledGraph, MonoComponent};
pub use par::Execution;
pub use precover::{subgroup_graph, SubgroupGraph};
pub use words::{Factor, Letter, NormalWord, Word, WordError};
