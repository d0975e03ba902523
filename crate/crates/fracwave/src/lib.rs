//! Finite difference solvers for the time-fractional hyperbolic equation
//!
//!   D_t^α u = u_xx + f(x,t),  α ∈ (1, 2),
//!
//! on (0,L)×(0,T] with homogeneous Dirichlet data, where D_t^α is the Caputo
//! derivative. The time discretisation is the H3N3-2σ formula: cubic Hermite
//! interpolation on the first half-interval, cubic Newton interpolation on
//! the interior half-intervals, quadratic Newton interpolation on the final
//! stub, evaluated at the superconvergence point t_{k+σ} with σ = 1 − α/2,
//! which lifts the temporal accuracy to second order.
//!
//! What's here:
//!
//! * [`coeffs`] — the discrete-convolution weights (uniform and graded
//!   meshes) and their monotonicity/positivity property suite;
//! * [`operators`] — scalar Caputo operators with exact power-function
//!   oracles, plus the L2C baseline weights;
//! * [`soe`] / [`fast`] — sum-of-exponentials kernel compression and the
//!   O(1)-per-step recursive history it enables;
//! * [`solver`] — the implicit schemes (direct, fast, graded, L2C) behind a
//!   single [`solver::solve`] entry point;
//! * [`harness`] — config-driven convergence sweeps with CSV reports;
//! * the `fracwave` binary — CLI access to all of the above.
//!
//! ```
//! use fracwave::{FractionalOrder, ProblemSpec, Scheme, SpatialGrid};
//!
//! let order = FractionalOrder::new(1.5)?;
//! let problem = ProblemSpec::ex51(order);
//! let grid = SpatialGrid::new(problem.length, 32)?;
//! let result = fracwave::solve(&problem, &grid, 16, Scheme::H3n3Fast, 1.0, 1e-10)?;
//! let err = result.max_error(&problem, &grid, 0).unwrap();
//! assert!(err < 1e-2);
//! # Ok::<(), fracwave::Error>(())
//! ```

pub mod coeffs;
pub mod error;
pub mod fast;
pub mod gamma;
pub mod harness;
pub mod mesh;
pub mod norms;
pub mod operators;
pub mod problem;
pub mod quadrature;
pub mod soe;
pub mod solver;
pub mod tridiag;

pub use coeffs::{
    check_coefficient_properties, graded_coeff_table, uniform_coeff_table, CoefficientTable,
};
pub use error::{Error, Result};
pub use mesh::{derive_sigma, FractionalOrder, GradedTemporalMesh, UniformTemporalMesh};
pub use problem::ProblemSpec;
pub use soe::{build_soe, soe_eval, SoeApproximation};
pub use solver::{solve, Scheme, SolveResult, SpatialGrid};

// The guide chapters double as doc-tests so the book's code never drifts
// from the crate (mdbook itself cannot run snippets against dependencies).
#[doc = include_str!("../../../book/src/introduction.md")]
#[doc(hidden)]
pub mod book_introduction {}
#[doc = include_str!("../../../book/src/discretization.md")]
#[doc(hidden)]
pub mod book_discretization {}
#[doc = include_str!("../../../book/src/coefficients.md")]
#[doc(hidden)]
pub mod book_coefficients {}
#[doc = include_str!("../../../book/src/kernel-compression.md")]
#[doc(hidden)]
pub mod book_kernel_compression {}
#[doc = include_str!("../../../book/src/solving.md")]
#[doc(hidden)]
pub mod book_solving {}
#[doc = include_str!("../../../book/src/graded-meshes.md")]
#[doc(hidden)]
pub mod book_graded_meshes {}
#[doc = include_str!("../../../book/src/harness.md")]
#[doc(hidden)]
pub mod book_harness {}
