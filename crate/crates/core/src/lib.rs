//! Flux quantization on thin superconducting rings shaped as an annulus or a
//! Möbius band, studied on a discrete strip lattice.
//!
//! A Cooper pair is modelled as a single charged boson hopping on an
//! `nx × ny` grid whose ends are glued either straight (annulus) or with a
//! row flip `j ↦ ny−1−j` (Möbius band). The vector potential lives on links as
//! Peierls phases. The crate provides:
//!
//! - [`lattice`]: strip geometry, seam gluing, canonical loops, homology
//!   classes and the cut-open lattice obtained by removing the center row.
//! - [`gauge`]: link-angle gauge fields, Wilson loops, face curvature, gauge
//!   transforms and the Stokes-defect identity on the cut-open lattice.
//! - [`hamiltonian`]: sparse Hermitian assembly, the ring spectrum oracle and
//!   reflection-parity sector restriction.
//! - [`eigensolver`]: dense and Lanczos eigensolvers with residual
//!   certification.
//! - [`experiments`]: flux sweeps, quantization minima, nodal amplitudes,
//!   persistent currents, the decoupled-ladder test and the annulus
//!   equivalence check.
//!
//! Flux sweeps evaluate grid points with rayon when the `parallel` feature is
//! enabled (the default) and sequentially otherwise.

pub mod eigensolver;
pub mod error;
pub mod experiments;
pub mod gauge;
pub mod hamiltonian;
pub mod lattice;
pub mod loops;
mod numeric;
pub mod parallel;

pub use error::{Error, Result};
pub use numeric::{exact_sum, wrap_angle};

pub use num_complex::Complex64;
