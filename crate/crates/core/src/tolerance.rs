/// Numerical thresholds shared by the geometry kernel and the checks.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    /// Sphere-constraint validation of specs at sample points.
    pub constraint: f64,
    /// Sphere-constraint deviation at which a point is rejected outright.
    pub sphere_abort: f64,
    /// Pass threshold for characterization and identity residuals.
    pub residual: f64,
    /// Largest accepted condition number of the induced metric.
    pub max_condition: f64,
    /// Pass threshold for the finite-type annihilation residual.
    pub spectral: f64,
    /// Relative determinant below which the two-eigenvalue fit is treated as singular.
    pub conditioning: f64,
    /// `|φ₀|` below which an immersion is mass-symmetric.
    pub mass: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            constraint: 1e-10,
            sphere_abort: 1e-8,
            residual: 1e-8,
            max_condition: 1e8,
            spectral: 1e-7,
            conditioning: 1e-10,
            mass: 1e-9,
        }
    }
}
