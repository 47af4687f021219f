//! Functions that can be queried off the grid, with gradients.

use crate::grid::{gradient, interpolate_nodal, GridGeometry, SampledGridFunction};

pub trait ScalarField: Sync {
    fn dim(&self) -> usize;
    fn value(&self, x: &[f64]) -> f64;
    fn gradient(&self, x: &[f64]) -> Vec<f64>;
}

/// Multilinear interpolation of sampled values and of their nodal
/// finite-difference gradient.
#[derive(Debug, Clone)]
pub struct GridField<'a> {
    u: &'a SampledGridFunction,
    grad: Vec<Vec<f64>>,
}

impl<'a> GridField<'a> {
    pub fn new(u: &'a SampledGridFunction) -> Self {
        GridField { u, grad: gradient(u) }
    }

    pub fn geometry(&self) -> &GridGeometry {
        self.u.geometry()
    }

    pub fn nodal_gradient(&self) -> &[Vec<f64>] {
        &self.grad
    }
}

impl ScalarField for GridField<'_> {
    fn dim(&self) -> usize {
        self.u.dim()
    }

    fn value(&self, x: &[f64]) -> f64 {
        self.u.interpolate(x)
    }

    fn gradient(&self, x: &[f64]) -> Vec<f64> {
        self.grad
            .iter()
            .map(|g| interpolate_nodal(self.u.geometry(), g, x))
            .collect()
    }
}
