//! Phase-space quantum mechanics on the cylinder S¹×ℝ.
//!
//! The crate carries the full deformation-quantization toolchain for a
//! particle on a circle of length `a`, worked in a truncated angular-momentum
//! basis |m;k⟩, m ∈ [−N, N], over a quasi-momentum fiber k:
//!
//! - [`numerics`]: circle grids, exact DFT quadrature, the Jacobi θ₃ series,
//!   and a small dense matrix exponential;
//! - [`wbz`]: the Weil-Brezin-Zak transform between the line and the circle,
//!   fiber Fourier analysis, decomposability of line operators, and the ℝ²
//!   Weyl kernel kept as a desk-scale oracle;
//! - [`cylinder`]: the Moyal quantizer Ω⁽ᵏ⁾(x,n), Weyl quantization of
//!   lattice observables, symbols on the quantum phase space S¹×ℤ, trace
//!   identities, the trikernel, and two star products;
//! - [`pptt`]: the unitary-operator formalism on θ ∈ [−π,π) with the integer
//!   momentum lattice, and its exact bridge (x,n) = (2θ,2n) onto the
//!   cylinder quantizer;
//! - [`coherent`]: theta-function coherent states, resolution of unity, and
//!   the semiclassical expectation sweep;
//! - [`verify`]: named identity suites with structured pass/fail results.
//!
//! Everything is pure and immutable after construction; all functions are
//! safe to call from many threads.

pub mod coherent;
pub mod cylinder;
pub mod error;
pub mod numerics;
pub mod pptt;
pub mod verify;
pub mod wbz;

pub use error::{Error, Result};
