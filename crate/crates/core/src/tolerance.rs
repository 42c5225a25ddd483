//! Numerical thresholds shared across modules.

/// Chevalley and grading relation residual bound.
pub const CHEVALLEY: f64 = 1e-12;

/// Equivariance bound for intertwiners.
pub const EQUIVARIANCE: f64 = 1e-9;

/// Minimal real-part gap for a maximal eigenvalue.
pub const MAXIMAL_GAP: f64 = 1e-8;

/// Maximal imaginary part of a maximal eigenvalue.
pub const MAXIMAL_IMAG: f64 = 1e-10;

/// Genericity margin for ell-eigenvalue gaps and resonances.
pub const GENERIC: f64 = 1e-6;

/// Linear independence threshold in Gram-Schmidt sweeps.
pub const INDEPENDENCE: f64 = 1e-9;

/// Default relative step tolerance of the ODE integrators.
pub const ODE_TOL: f64 = 1e-10;

/// Matching separation: smallest x with lambda Re S(x) at least this.
pub const MATCH_ACTION: f64 = 25.0;

/// Condition number above which a Frobenius basis is rejected.
pub const FROBENIUS_COND: f64 = 1e12;

/// Relative size of the last retained Frobenius term.
pub const FROBENIUS_TAIL: f64 = 1e-14;
