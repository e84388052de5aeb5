//! Conjugacy in cyclic extensions of surface and free groups.
//!
//! The groups handled here are extensions `1 -> <h> -> G -> H -> 1` with a
//! cyclic fiber over a free, torus or closed hyperbolic surface base, the
//! fundamental groups of Seifert fibered spaces with cone-point-free base.
//! The crate decides equality and conjugacy in these groups, computes the
//! lambda invariants describing which fiber offsets `h^n` preserve a
//! conjugacy class, constructs finite p-group order witnesses through the
//! Magnus embedding, verifies the twisted-conjugacy identities on finite
//! extensions exhaustively, and searches for explicit finite quotients
//! separating non-conjugate pairs.

pub mod extensions;
pub mod nilpotent;
pub mod parse;
pub mod seifert;
pub mod surface;
pub mod witness;
pub mod words;

pub use seifert::{BaseKind, FiberedElement, LambdaPair, SeifertPresentation};
pub use surface::SurfacePresentation;
pub use words::{Alphabet, CyclicWord, Letter, Word};
