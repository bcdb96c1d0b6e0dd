//! Spectral determinants of the two-photon quantum Rabi model
//! `H = omega a^dag a + (a^2 + a^dag^2) sigma_z + delta sigma_x` (coupling `g = 1`)
//! in the pure-point regime `omega > 2`.
//!
//! Three G-functions are provided: a continued fraction over the minimal
//! solution of the power-series recurrence ([`zhang`]), a squeezed-frame series
//! with analytically known poles ([`chen`]), and a forward-recursion variant kept
//! as a numerical-instability exhibit ([`travenec`]). A truncated
//! diagonalization ([`oracle`]) serves as ground truth, and [`solver`] turns any
//! backend into a spectrum.

pub mod chen;
pub mod error;
pub mod eval;
pub mod model;
pub mod oracle;
pub mod solver;
pub mod travenec;
pub mod validate;
pub mod zhang;

pub use error::{Error, Result};
pub use eval::{ComplexEvaluation, EvalFlags, GEvaluation, GFunction};
pub use model::{
    bogoliubov_frame, characteristic_exponents, critical_beta, critical_rho, exponent_rho,
    pole_energies, pole_energy, recurrence_roots, BogoliubovFrame, CriticalExponent, ModelParams,
    Parity, Phase, PoleGrid, Regime, SymmetrySector,
};
