//! Minimization of integer-valued submodular functions over complements of
//! `k`-hierarchical lattices.
//!
//! A family is a `k`-hierarchical lattice when it splits into `F_1, .., F_k`
//! with `F_1` a lattice and, for `i >= 2`, every pair in `F_i` either keeping
//! its union and intersection in `F_i` or dropping one of them into a lower
//! part. Minimizing a submodular `f` over the complement of such a family
//! reduces to `O(n^{2k})` ordinary minimizations over box lattices
//! `{X : S ⊆ X ⊆ V \ T}` with `|S|, |T| <= k`; see [`solver`].
//!
//! [`brute`] is an exhaustive reference implementation that shares nothing
//! with the solver beyond [`Mask`].

pub mod brute;
pub mod cli;
pub mod error;
pub mod families;
pub mod functions;
pub mod gen;
pub mod ground;
pub mod instance;
pub mod oracle;
pub mod sfm;
pub mod solver;

pub use error::{Error, Result};
pub use ground::{enumerate_st_pairs, enumerate_subsets, st_pair_count, GroundSet, Mask};
pub use oracle::{Counting, FnOracle, SubmodularOracle};
