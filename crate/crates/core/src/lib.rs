//! Computational companion to the lifting problem for automorphisms of
//! abelian varieties.
//!
//! - [`dims`]: Hodge, Hochschild and deformation dimensions as functions of `g`.
//! - [`exact_seq`]: which maps of a long exact sequence are forced injective,
//!   surjective or zero by the dimensions alone.
//! - [`ec_arith`]: elliptic curves over `F_p`: point counts, trace, p-rank,
//!   j-invariant and geometric derived equivalence.
//! - [`isometry`]: the `f ↦ f̃` calculus on 2×2 endomorphism matrices of
//!   `A × Â` and the isometric group `U(A × Â)`.
//! - [`cli`]: batch front end used by the `avlift` binary.

pub mod cli;
pub mod dims;
pub mod ec_arith;
pub mod exact_seq;
pub mod isometry;
