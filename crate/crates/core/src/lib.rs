//! Interpolatory cubature over orthogonal-polynomial bases.
//!
//! The crate computes Gröbner bases of vanishing ideals of finite point sets
//! directly in a product orthogonal basis, reads cubature weights off as
//! expectations of Lagrange polynomials, and certifies the degree of
//! exactness of the resulting formula.
//!
//! ```
//! use cubalg_core::{gauss_rule, RecurrenceSystem};
//!
//! let rule = gauss_rule(&RecurrenceSystem::hermite(), 3).unwrap();
//! assert!((rule.weights[1] - 2.0 / 3.0).abs() < 1e-12);
//! ```

pub mod cubature;
pub mod error;
pub mod hermite;
pub mod ideal;
mod linalg;
pub mod ortho;
pub mod poly;
pub mod snap;

pub use cubature::{
    cubature_degree, cubature_value, exact_expectation, fraction_error, fraction_weights,
    product_grid_expectation, s_orthogonality, zero_mean_check, CubatureFormula, Fraction,
    GridExpectation,
};
pub use error::{Error, Result};
pub use hermite::{aliasing_nf, aliasing_row, hermite_poly, product_expand, weighing_polynomial, HermiteExpansion};
pub use ideal::{
    bm_ortho, bm_ortho_exact, bm_ortho_numeric, indicator_polynomials, interpolate, product_design, weights,
    Design, GElement, OrthoGBasis, StandardSet, Tolerance,
};
pub use ortho::{
    cd_kernel, cd_kernel_closed, eval_pi, eval_pi_upto, fourier_identify, gauss_rule, interpolatory_weights,
    monomial_to_ortho, nodes, norm_sq, ortho_to_monomial, quadrature_error_1d, to_ortho, QuadratureRule,
    RecurrenceSystem, UniBasis, UniPoly,
};
pub use poly::{compare, AnyPoly, MonoPoly, MultiIndex, OrderKind, OrthoPoly, TermOrder};
