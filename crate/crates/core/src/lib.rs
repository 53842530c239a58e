//! Separability criteria built on the Bloch representation of density matrices.
//!
//! A state is expanded over the identity and the generalized Gell-Mann
//! generators of SU(d). The resulting local Bloch vectors and correlation
//! matrix (bipartite) or correlation tensor (multipartite) are bordered by
//! weighted copies of the local data, and the trace norm of the bordered
//! object is compared to a bound that every separable state satisfies.
//! Exceeding the bound certifies entanglement.
//!
//! Modules, bottom-up:
//!
//! - [`numerics`]: Kronecker products, singular values, trace/spectral norms,
//!   Hermitian eigenvalues.
//! - [`su_basis`]: generalized Gell-Mann generators.
//! - [`states`]: density matrices, named test states, sampling, partial
//!   transpose and realignment, JSON file format.
//! - [`bloch`]: bipartite decomposition `(r, s, T)` and the bordered
//!   correlation tensor.
//! - [`criteria`]: the bipartite and multipartite checks, their named
//!   presets and the PPT/CCNR baselines.
//! - [`detect`]: threshold searches over one-parameter state families.

pub mod bloch;
pub mod criteria;
pub mod detect;
mod error;
pub mod numerics;
pub mod states;
pub mod su_basis;

pub use error::{Error, Result};
pub use num_complex::Complex64;
pub use numerics::{ComplexMatrix, RealMatrix};
