//! Squeezed-state wave packets for the hydrogen Coulomb problem.
//!
//! The central object is a product state: a radial squeezed state
//! `r^alpha exp(-gamma0 r - i gamma1 r)` times a spherical squeezed state
//! `sin^beta(theta) exp(delta sin(theta) cos(phi) + i beta phi)`. The five
//! parameters are fitted so the packet rides a classical Kepler orbit of a
//! chosen principal quantum number and angular momentum, then the packet is
//! expanded over bound hydrogenic (or quantum-defect) states and evolved by
//! phase rotation in the energy eigenbasis.
//!
//! Atomic units throughout (hbar = m_e = e = 1, energies in hartree, lengths
//! in bohr, times in units of hbar/hartree).

pub mod angular;
mod error;
pub mod packet;
pub mod qdt;
pub mod radial;
pub mod specfun;

pub use error::{Error, Result};
