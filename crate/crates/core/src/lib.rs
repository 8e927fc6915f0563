//! Numerical laboratory for the complex Monge-Ampère equation
//! `det(I + φ_{αβ̄}) = e^F` on flat tori `C^n / Z^{2n}`.
//!
//! The crate provides a pseudospectral discretization of the torus, exact and
//! Newton-Krylov solvers, moduli of continuity with their Dini-type integrals,
//! mollification, measurement of gradient estimates on computed solutions and
//! the closed-form Pogorelov-type singular solution.

pub mod error;
pub mod estimates;
mod fft;
pub mod hermitian;
pub mod io;
pub mod moduli;
pub mod mollify;
pub mod pogorelov;
pub mod rhs;
pub mod solver;
mod sum;
pub mod torus;

pub use error::{Error, Result};
pub use estimates::{
    check_bochner, check_diff_ineq, compare_companion, exp_moment, grad_lp, moment_fit, skoda,
    EstimateReport, ParamOverrides, ParamSet, Weight,
};
pub use moduli::{iteration_sum, r_q, DiniResult, ModulusOfContinuity};
pub use mollify::{decompose, mollify, verify_bounds, MollifyReport};
pub use pogorelov::{det_residual, eval_u, gradient_exponent, PogorelovPoint};
pub use rhs::{manufactured, normalize_rhs, weierstrass, RhsSpec, TrigPotential, TrigTerm};
pub use solver::{
    companion_psi, residual, solve, solve_n1, CompanionMap, SolveReport, SolverConfig,
};
pub use torus::{
    complex_hessian, gradient, integrate, make_domain, min_eigenvalue, Domain, ScalarField,
    TorusDomain,
};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");
