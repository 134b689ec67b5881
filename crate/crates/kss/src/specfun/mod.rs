//! Special functions and numerical kernels used by every other module:
//! log-gamma and double factorials, modified Bessel functions (including
//! real-order modified spherical Bessel functions), orthonormal spherical
//! harmonics, hydrogenic radial wavefunctions in log-magnitude form,
//! generalized Laguerre polynomials, Gauss-Legendre quadrature, and a
//! bracketing root finder.

mod bessel;
mod dd;
mod gamma;
mod hydrogen;
mod quad;
mod root;
mod sphharm;

pub use bessel::{bessel_i, bessel_i_ln, bessel_i_scaled, sph_bessel_i, sph_bessel_i_ln};
pub(crate) use bessel::{sph_bessel_i_dd, sph_bessel_i_int_ln};
pub(crate) use dd::Dd;
pub use gamma::{double_factorial, double_factorial_ln, ln_gamma};
pub(crate) use gamma::ln_gamma_pos;
pub use hydrogen::{hydro_radial, hydro_radial_ln, laguerre_gen};
pub(crate) use hydrogen::radial_kernel_ln;
pub use quad::{integrate, integrate_adaptive, integrate_adaptive_c, QuadratureRule};
pub use root::{solve_root, RootBracket};
pub use sphharm::{sph_harm, sph_harm_theta};
