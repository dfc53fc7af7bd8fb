use serde::{Deserialize, Serialize};

use crate::expr::DEFAULT_SEED;

/// Grid density, tolerances and seed shared by every verifier.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Settings {
    /// Points per coordinate for tensor grids.
    pub grid: usize,
    /// Largest tensor grid; denser requests are thinned uniformly.
    pub grid_budget: usize,
    /// Sample count for numeric zero tests.
    pub samples: usize,
    pub tol_closed: f64,
    pub tol_nondeg: f64,
    pub seed: u64,
}

impl Default for Settings {
    fn default() -> Settings {
        Settings {
            grid: 17,
            grid_budget: 150_000,
            samples: 500,
            tol_closed: 1e-9,
            tol_nondeg: 1e-8,
            seed: DEFAULT_SEED,
        }
    }
}
