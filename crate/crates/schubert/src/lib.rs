//! Exact-arithmetic Schubert decompositions of quiver Grassmannians.
//!
//! The library builds coefficient quivers for families of indecomposable
//! representations of extended Dynkin type `D~n` (and of Kronecker and Dynkin
//! type A/D quivers), derives the associated Schubert systems, classifies every
//! Schubert cell as empty or an affine space, and assembles Euler
//! characteristics, counting polynomials, F-polynomials and cluster variables
//! from the cell data. Everything runs over exact fields (rationals or small
//! prime fields), and every classification can be cross-checked against a
//! brute-force count of subrepresentations over `F_q`.

pub mod classify;
pub mod dim;
pub mod families;
pub mod fpoly;
pub mod grass;
pub mod linalg;
pub mod patchwork;
pub mod quiver;
pub mod rep;
pub mod scalar;
pub mod solve;
pub mod state;
pub mod system;

mod error;

pub use error::Error;
pub type Result<T> = std::result::Result<T, Error>;
