//! Exact checks of Dehn-twist generating sets for the twist subgroup of a
//! nonorientable surface, carried out in the mod-2 homology representation.
//!
//! Layers, bottom up:
//!
//! - [`f2linalg`]: bit-packed GF(2) vectors and matrices, transvections, and
//!   signed permutation matrices with a quotient determinant.
//! - [`surface`]: the genus model, curve catalog, rotation and reflections.
//! - [`words`]: free words over twist and rotation symbols, with evaluation.
//! - [`f2group`]: stabilizer chains for exact orders and membership.
//! - [`proofscripts`]: proof chains as step lists, and a runner.
//!
//! Passing a script certifies the homological shadow of a proof and exact
//! generation of the mod-2 image group. It says nothing about equality of
//! mapping classes, since the representation is not faithful.

pub mod expr;
pub mod f2group;
pub mod f2linalg;
pub mod proofscripts;
pub mod surface;
pub mod words;

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/homology.md")]
    mod homology {}
    #[doc = include_str!("../../../book/src/surface.md")]
    mod surface {}
    #[doc = include_str!("../../../book/src/words.md")]
    mod words {}
    #[doc = include_str!("../../../book/src/groups.md")]
    mod groups {}
    #[doc = include_str!("../../../book/src/scripts.md")]
    mod scripts {}
    #[doc = include_str!("../../../book/src/conjugators.md")]
    mod conjugators {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
