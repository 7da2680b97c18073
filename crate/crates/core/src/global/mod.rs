//! The global form through its Whittaker expansion: archimedean kernels,
//! Hecke coefficients, the ramified factor `lambda'`, sup-norm scans, and
//! the classical congruence subgroup `Gamma_{T,D}(N)`.

pub mod arch;
pub mod bessel;
pub mod classical;
pub mod coeffs;
pub mod expansion;
pub mod ramified;
pub mod scan;
