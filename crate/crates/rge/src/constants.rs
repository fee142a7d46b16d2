//! Numerical tolerances and grids, fixed in one place.

/// Allowed imbalance between source and sink mass before a transport
/// problem is rejected as infeasible.
pub const FEASIBILITY_TOL: f64 = 1e-9;

/// Agreement tolerance between the transport solver and reference oracles.
pub const ORACLE_TOL: f64 = 1e-9;

/// Tolerance on transport-plan marginals against the requested weights.
pub const MARGINAL_TOL: f64 = 1e-9;

/// Weight vectors produced by the library sum to one within this bound.
pub const WEIGHT_SUM_TOL: f64 = 1e-12;

/// Integer grid onto which transport weights are rescaled before the
/// exact solve. One grid unit is 1e-12 of total mass, so apportionment
/// perturbs each weight by strictly less than 1e-12 and the solved
/// objective stays within the 1e-9 tolerances above with a wide margin.
pub const WEIGHT_GRID: u64 = 1_000_000_000_000;

/// Reduced-cost threshold below which a simplex arc counts as improving.
pub const PIVOT_TOL: f64 = 1e-12;

/// Eigenpair residual bound, relative to the Frobenius norm of the
/// Laplacian: every returned pair (lambda, v) satisfies
/// ||L v - lambda v|| <= EIGEN_RESIDUAL_TOL * ||L||_F.
pub const EIGEN_RESIDUAL_TOL: f64 = 1e-8;

/// Eigenvalues closer than this are treated as tied when ordering
/// eigenvectors deterministically.
pub const EIGEN_TIE_TOL: f64 = 1e-10;

/// Graph size above which the iterative eigensolver replaces the dense one.
pub const DENSE_EIGEN_LIMIT: usize = 512;
