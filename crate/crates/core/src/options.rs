/// Numerical settings shared by the analyses.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Options {
    /// Feasibility and optimality tolerance.
    pub tol: f64,
    /// Largest `n` for which all `2^n` orthants are enumerated.
    pub orthant_cap: usize,
    /// Iteration limit of the worst-case upper-bound method.
    pub max_iters: usize,
}

impl Default for Options {
    fn default() -> Self {
        Options {
            tol: 1e-9,
            orthant_cap: 16,
            max_iters: 50,
        }
    }
}
