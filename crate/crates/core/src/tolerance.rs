//! Numerical thresholds shared by the validity checks.

/// Per-call tolerance bundle. `Default` carries the stock values.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    /// Hermiticity, trace and positivity checks on states.
    pub validity: f64,
    /// Residuals of reconstructions (eigendecompositions, steady states).
    pub reconstruction: f64,
    /// Hermiticity accepted on input to the eigensolver.
    pub hermitian_input: f64,
    /// Eigenvalues with modulus below this count as zero modes.
    pub null_eigenvalue: f64,
    /// Slack on the 0 <= Q <= dim bound before it is declared a violation.
    pub bound: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            validity: 1e-10,
            reconstruction: 1e-9,
            hermitian_input: 1e-8,
            null_eigenvalue: 1e-9,
            bound: 1e-8,
        }
    }
}
