//! Numerical tolerances shared by the library and its test suites.
//!
//! Everything that decides "close enough" lives here so that the code and
//! the tests cannot silently disagree about a threshold.

/// Convergence threshold for the cyclic Jacobi sweep: the eigensolver stops
/// once the Frobenius norm of the off-diagonal part drops below this times
/// `max(1, ||A||_F)`.
pub const JACOBI_OFFDIAG_TOL: f64 = 1e-12;

/// Jacobi sweep cap is `100 * d * d`; reaching it means the input was not a
/// finite symmetric matrix.
pub const JACOBI_SWEEP_FACTOR: usize = 100;

/// A Cholesky pivot at or below this value fails the factorization; this is
/// the positive-definiteness test used everywhere.
pub const CHOLESKY_MIN_PIVOT: f64 = 1e-13;

/// Relative residual guarantee of [`crate::linalg::SymMat::spd_solve`].
pub const SPD_SOLVE_REL_RESIDUAL: f64 = 1e-9;

/// Eigendecomposition reconstruction guarantee (max-abs entry).
pub const EIG_RECONSTRUCT_TOL: f64 = 1e-9;

/// The ball projection bisection stops once `| ||w|| - R_B | <= tol * R_B`.
pub const PROJECTION_REL_TOL: f64 = 1e-9;

/// Bisection iteration cap for the ball projection; 200 halvings exhaust
/// double precision on the analytic bracket.
pub const PROJECTION_MAX_ITERS: usize = 200;

/// Slack allowed on the `||w_t|| <= R_B` invariant.
pub const BALL_CONSTRAINT_SLACK: f64 = 1e-9;

/// Slack allowed on the `lambda_min(Sigma_t) >= Lambda_i` invariant.
pub const EIGENFLOOR_SLACK: f64 = 1e-9;

/// Per-step prediction tolerance for the algorithm reduction identities
/// (LASER at `c = inf` vs AAR, CR-RLS at `T0 = inf` vs RLS, and so on).
pub const REDUCTION_TOL: f64 = 1e-9;

/// Tolerance for the brute-force minimum of the drift-penalized quadratic
/// against the recursive closed form.
pub const QUADRATIC_ORACLE_TOL: f64 = 1e-6;

/// Default grid step of the min-max prediction oracle.
pub const MINMAX_GRID_RESOLUTION: f64 = 1e-3;

/// Agreement required between the min-max grid oracle and the clipped
/// closed-form prediction (twice the grid step).
pub const MINMAX_MATCH_TOL: f64 = 2e-3;

/// Default polar grid step (radians, and fraction of the radius) of the
/// projection oracle.
pub const PROJECTION_GRID_STEP: f64 = 2e-3;

/// Agreement required between the projection and its grid oracle, measured
/// in the Mahalanobis objective.
pub const PROJECTION_ORACLE_TOL: f64 = 1e-3;

/// Largest eigenvalue allowed for the interpolated-update PSD expression
/// (exactly zero in exact arithmetic).
pub const PSD_EXPRESSION_TOL: f64 = 1e-8;

/// Slack on the covariance-evidence eigenvalue cap along a LASER run.
pub const EIGENVALUE_CAP_SLACK: f64 = 1e-9;

/// Prefix-weight agreement between recursive least squares and the batch
/// ridge oracle.
pub const BATCH_EQUIV_TOL: f64 = 1e-9;

/// Default divisor regularizer for NLMS.
pub const NLMS_DEFAULT_EPS: f64 = 1e-8;

/// Ridge regularizer standing in for the unregularized least-squares
/// infimum when computing fixed-comparator regret.
pub const RIDGE_UNREG_EPS: f64 = 1e-10;
