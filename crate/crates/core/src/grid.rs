//! Nonnegative, compactly supported functions sampled on uniform N-dimensional
//! grids, together with the finite-difference and quadrature helpers shared by
//! the checkers.

use crate::error::{Error, Result};

/// Shape, origin and spacing of a uniform grid. Values are stored row-major
/// with the last axis varying fastest.
#[derive(Debug, Clone, PartialEq)]
pub struct GridGeometry {
    shape: Vec<usize>,
    origin: Vec<f64>,
    spacing: Vec<f64>,
    strides: Vec<usize>,
}

impl GridGeometry {
    pub fn new(shape: Vec<usize>, origin: Vec<f64>, spacing: Vec<f64>) -> Result<Self> {
        let dim = shape.len();
        if dim == 0 {
            return Err(Error::InvalidGrid("dimension must be at least 1".into()));
        }
        if origin.len() != dim || spacing.len() != dim {
            return Err(Error::InvalidGrid(format!(
                "shape has {dim} axes but origin has {} and spacing {}",
                origin.len(),
                spacing.len()
            )));
        }
        if shape.iter().any(|&n| n < 2) {
            return Err(Error::InvalidGrid("every extent must be at least 2".into()));
        }
        if spacing.iter().any(|&h| !(h > 0.0) || !h.is_finite()) {
            return Err(Error::InvalidGrid("spacing must be positive and finite".into()));
        }
        if origin.iter().any(|o| !o.is_finite()) {
            return Err(Error::InvalidGrid("origin must be finite".into()));
        }
        let mut strides = vec![1; dim];
        for a in (0..dim - 1).rev() {
            strides[a] = strides[a + 1] * shape[a + 1];
        }
        Ok(GridGeometry {
            shape,
            origin,
            spacing,
            strides,
        })
    }

    /// A cube `[lo, hi]^dim` with `n` nodes per axis.
    pub fn cube(dim: usize, n: usize, lo: f64, hi: f64) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidGrid("need at least 2 nodes per axis".into()));
        }
        let h = (hi - lo) / (n - 1) as f64;
        GridGeometry::new(vec![n; dim], vec![lo; dim], vec![h; dim])
    }

    pub fn dim(&self) -> usize {
        self.shape.len()
    }

    pub fn shape(&self) -> &[usize] {
        &self.shape
    }

    pub fn origin(&self) -> &[f64] {
        &self.origin
    }

    pub fn spacing(&self) -> &[f64] {
        &self.spacing
    }

    pub fn strides(&self) -> &[usize] {
        &self.strides
    }

    pub fn len(&self) -> usize {
        self.shape.iter().product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn max_spacing(&self) -> f64 {
        self.spacing.iter().cloned().fold(0.0, f64::max)
    }

    pub fn cell_volume(&self) -> f64 {
        self.spacing.iter().product()
    }

    pub fn check_axis(&self, axis: usize) -> Result<()> {
        if axis >= self.dim() {
            return Err(Error::AxisOutOfRange {
                axis,
                dim: self.dim(),
            });
        }
        Ok(())
    }

    /// Index along `axis` of the flat node index `idx`.
    #[inline]
    pub fn axis_index(&self, idx: usize, axis: usize) -> usize {
        (idx / self.strides[axis]) % self.shape[axis]
    }

    pub fn multi_index(&self, idx: usize) -> Vec<usize> {
        (0..self.dim()).map(|a| self.axis_index(idx, a)).collect()
    }

    pub fn flat_index(&self, multi: &[usize]) -> usize {
        multi
            .iter()
            .zip(&self.strides)
            .map(|(i, s)| i * s)
            .sum()
    }

    #[inline]
    pub fn coordinate(&self, idx: usize, axis: usize) -> f64 {
        self.origin[axis] + self.axis_index(idx, axis) as f64 * self.spacing[axis]
    }

    pub fn point(&self, idx: usize) -> Vec<f64> {
        (0..self.dim()).map(|a| self.coordinate(idx, a)).collect()
    }

    pub fn axis_coordinates(&self, axis: usize) -> Vec<f64> {
        (0..self.shape[axis])
            .map(|i| self.origin[axis] + i as f64 * self.spacing[axis])
            .collect()
    }

    pub fn upper_corner(&self, axis: usize) -> f64 {
        self.origin[axis] + (self.shape[axis] - 1) as f64 * self.spacing[axis]
    }

    pub fn is_boundary(&self, idx: usize) -> bool {
        (0..self.dim()).any(|a| {
            let i = self.axis_index(idx, a);
            i == 0 || i + 1 == self.shape[a]
        })
    }

    /// First node of every 1D section along `axis`, in increasing flat order.
    pub fn section_bases(&self, axis: usize) -> Vec<usize> {
        (0..self.len())
            .filter(|&idx| self.axis_index(idx, axis) == 0)
            .collect()
    }

    /// Neighbour of `idx` one step along `axis` (`forward` or backward).
    #[inline]
    pub fn neighbor(&self, idx: usize, axis: usize, forward: bool) -> Option<usize> {
        let i = self.axis_index(idx, axis);
        if forward {
            (i + 1 < self.shape[axis]).then(|| idx + self.strides[axis])
        } else {
            (i > 0).then(|| idx - self.strides[axis])
        }
    }
}

/// A nonnegative function sampled on a grid, vanishing on the grid boundary.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledGridFunction {
    geometry: GridGeometry,
    values: Vec<f64>,
    lipschitz_hint: Option<f64>,
}

impl SampledGridFunction {
    pub fn new(
        geometry: GridGeometry,
        values: Vec<f64>,
        lipschitz_hint: Option<f64>,
    ) -> Result<Self> {
        if values.len() != geometry.len() {
            return Err(Error::InvalidGrid(format!(
                "expected {} values, got {}",
                geometry.len(),
                values.len()
            )));
        }
        if let Some(bad) = values.iter().find(|v| !v.is_finite() || **v < 0.0) {
            return Err(Error::InvalidGrid(format!(
                "values must be finite and nonnegative, found {bad}"
            )));
        }
        if let Some(idx) = (0..values.len()).find(|&i| geometry.is_boundary(i) && values[i] != 0.0)
        {
            return Err(Error::InvalidGrid(format!(
                "values must vanish on the grid boundary (node {:?})",
                geometry.multi_index(idx)
            )));
        }
        if let Some(l) = lipschitz_hint {
            if !(l >= 0.0) || !l.is_finite() {
                return Err(Error::InvalidGrid(format!("invalid lipschitz hint {l}")));
            }
        }
        Ok(SampledGridFunction {
            geometry,
            values,
            lipschitz_hint,
        })
    }

    /// Samples `f` at every node; boundary nodes are forced to zero.
    pub fn from_fn<F>(geometry: GridGeometry, lipschitz_hint: Option<f64>, f: F) -> Result<Self>
    where
        F: Fn(&[f64]) -> f64,
    {
        let values = (0..geometry.len())
            .map(|idx| {
                if geometry.is_boundary(idx) {
                    0.0
                } else {
                    f(&geometry.point(idx)).max(0.0)
                }
            })
            .collect();
        SampledGridFunction::new(geometry, values, lipschitz_hint)
    }

    pub(crate) fn from_parts_unchecked(
        geometry: GridGeometry,
        values: Vec<f64>,
        lipschitz_hint: Option<f64>,
    ) -> Self {
        SampledGridFunction {
            geometry,
            values,
            lipschitz_hint,
        }
    }

    pub fn geometry(&self) -> &GridGeometry {
        &self.geometry
    }

    pub fn dim(&self) -> usize {
        self.geometry.dim()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn lipschitz_hint(&self) -> Option<f64> {
        self.lipschitz_hint
    }

    pub fn with_lipschitz_hint(mut self, hint: Option<f64>) -> Self {
        self.lipschitz_hint = hint;
        self
    }

    pub fn sup(&self) -> f64 {
        self.values.iter().cloned().fold(0.0, f64::max)
    }

    /// The Lipschitz hint if present, otherwise the largest finite-difference
    /// gradient magnitude.
    pub fn lipschitz(&self) -> f64 {
        self.lipschitz_hint.unwrap_or_else(|| {
            gradient_magnitude(self)
                .into_iter()
                .fold(0.0, f64::max)
        })
    }

    /// Applies `f` pointwise. `f` must map `0` to `0` and stay nonnegative.
    pub fn map<F: Fn(f64) -> f64>(&self, f: F) -> Result<Self> {
        let values = self.values.iter().map(|&v| f(v)).collect();
        SampledGridFunction::new(self.geometry.clone(), values, self.lipschitz_hint)
    }

    pub fn check_same_grid(&self, other: &SampledGridFunction) -> Result<()> {
        if self.geometry != other.geometry {
            return Err(Error::GridMismatch(format!(
                "shapes {:?} vs {:?}",
                self.geometry.shape(),
                other.geometry.shape()
            )));
        }
        Ok(())
    }

    /// Midpoint-rule integral of `f(u)` over the grid.
    pub fn integrate<F: Fn(f64) -> f64>(&self, f: F) -> f64 {
        self.values.iter().map(|&v| f(v)).sum::<f64>() * self.geometry.cell_volume()
    }

    /// Measure of `{u > c}` counted by nodes.
    pub fn superlevel_measure(&self, c: f64) -> f64 {
        self.values.iter().filter(|&&v| v > c).count() as f64 * self.geometry.cell_volume()
    }

    /// Largest Euclidean norm of a node carrying a positive value.
    pub fn support_radius(&self) -> f64 {
        (0..self.values.len())
            .filter(|&i| self.values[i] > 0.0)
            .map(|i| {
                self.geometry
                    .point(i)
                    .iter()
                    .map(|x| x * x)
                    .sum::<f64>()
                    .sqrt()
            })
            .fold(0.0, f64::max)
    }

    /// Multilinear interpolation at an arbitrary point (zero outside the box).
    pub fn interpolate(&self, x: &[f64]) -> f64 {
        interpolate_nodal(&self.geometry, &self.values, x)
    }
}

pub(crate) fn interpolate_nodal(geom: &GridGeometry, nodal: &[f64], x: &[f64]) -> f64 {
    let dim = geom.dim();
    let mut base = 0usize;
    let mut frac = vec![0.0; dim];
    for a in 0..dim {
        let s = (x[a] - geom.origin()[a]) / geom.spacing()[a];
        let n = geom.shape()[a];
        if !(s >= 0.0) || s > (n - 1) as f64 {
            return 0.0;
        }
        let mut i = s.floor() as usize;
        if i >= n - 1 {
            i = n - 2;
        }
        frac[a] = s - i as f64;
        base += i * geom.strides()[a];
    }
    let mut acc = 0.0;
    for corner in 0..(1usize << dim) {
        let mut w = 1.0;
        let mut idx = base;
        for a in 0..dim {
            if corner >> a & 1 == 1 {
                w *= frac[a];
                idx += geom.strides()[a];
            } else {
                w *= 1.0 - frac[a];
            }
        }
        if w != 0.0 {
            acc += w * nodal[idx];
        }
    }
    acc
}

/// Partial derivative along `axis` at every node.
///
/// Central differences where both neighbours lie in the support, one-sided
/// toward the support at its edge, and zero at nodes where `u` vanishes.
pub fn partial_derivative(u: &SampledGridFunction, axis: usize) -> Vec<f64> {
    let g = u.geometry();
    let h = g.spacing()[axis];
    let v = u.values();
    (0..v.len())
        .map(|idx| {
            if v[idx] == 0.0 {
                return 0.0;
            }
            let fwd = g.neighbor(idx, axis, true).map(|j| v[j]);
            let bwd = g.neighbor(idx, axis, false).map(|j| v[j]);
            match (bwd, fwd) {
                (Some(b), Some(f)) => {
                    if b > 0.0 && f > 0.0 {
                        (f - b) / (2.0 * h)
                    } else if f > 0.0 {
                        (f - v[idx]) / h
                    } else if b > 0.0 {
                        (v[idx] - b) / h
                    } else {
                        0.0
                    }
                }
                (None, Some(f)) => (f - v[idx]) / h,
                (Some(b), None) => (v[idx] - b) / h,
                (None, None) => 0.0,
            }
        })
        .collect()
}

/// Plain central differences (one-sided on the grid boundary), used where the
/// support-edge rule is not wanted.
pub fn central_partial(geom: &GridGeometry, values: &[f64], axis: usize) -> Vec<f64> {
    let h = geom.spacing()[axis];
    (0..values.len())
        .map(|idx| {
            let fwd = geom.neighbor(idx, axis, true);
            let bwd = geom.neighbor(idx, axis, false);
            match (bwd, fwd) {
                (Some(b), Some(f)) => (values[f] - values[b]) / (2.0 * h),
                (None, Some(f)) => (values[f] - values[idx]) / h,
                (Some(b), None) => (values[idx] - values[b]) / h,
                (None, None) => 0.0,
            }
        })
        .collect()
}

/// Gradient as one vector of partials per axis.
pub fn gradient(u: &SampledGridFunction) -> Vec<Vec<f64>> {
    (0..u.dim()).map(|a| partial_derivative(u, a)).collect()
}

pub fn gradient_magnitude(u: &SampledGridFunction) -> Vec<f64> {
    magnitude(&gradient(u))
}

pub(crate) fn magnitude(grad: &[Vec<f64>]) -> Vec<f64> {
    let n = grad[0].len();
    (0..n)
        .map(|i| grad.iter().map(|g| g[i] * g[i]).sum::<f64>().sqrt())
        .collect()
}

/// `∫ G(|∇u|) dx` with the finite-difference gradient and midpoint quadrature.
pub fn gradient_energy<G: Fn(f64) -> f64>(u: &SampledGridFunction, big_g: G) -> f64 {
    gradient_magnitude(u).into_iter().map(big_g).sum::<f64>() * u.geometry().cell_volume()
}

/// Local finite-difference truncation estimate `h²/6 · |∂³u|` at every node,
/// with the third derivative taken from the widest centered stencil that fits.
pub fn truncation_estimate(geom: &GridGeometry, values: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; values.len()];
    for axis in 0..geom.dim() {
        let h = geom.spacing()[axis];
        let s = geom.strides()[axis];
        let n = geom.shape()[axis];
        for (idx, slot) in out.iter_mut().enumerate() {
            let i = geom.axis_index(idx, axis);
            if i < 2 || i + 2 >= n {
                continue;
            }
            let d3 = (values[idx + 2 * s] - 2.0 * values[idx + s] + 2.0 * values[idx - s]
                - values[idx - 2 * s])
                / (2.0 * h * h * h);
            let est = h * h / 6.0 * d3.abs();
            if est > *slot {
                *slot = est;
            }
        }
    }
    out
}

/// Connected components (face adjacency) of the nodes where `mask` is set.
/// Labels are assigned in increasing order of each component's first node.
pub fn label_components(geom: &GridGeometry, mask: &[bool]) -> (Vec<Option<usize>>, usize) {
    let mut labels = vec![None; mask.len()];
    let mut count = 0;
    let mut stack = Vec::new();
    for start in 0..mask.len() {
        if !mask[start] || labels[start].is_some() {
            continue;
        }
        labels[start] = Some(count);
        stack.push(start);
        while let Some(idx) = stack.pop() {
            for axis in 0..geom.dim() {
                for fwd in [false, true] {
                    if let Some(j) = geom.neighbor(idx, axis, fwd) {
                        if mask[j] && labels[j].is_none() {
                            labels[j] = Some(count);
                            stack.push(j);
                        }
                    }
                }
            }
        }
        count += 1;
    }
    (labels, count)
}

/// A point where the piecewise-linear interpolant crosses a level along a grid
/// edge, tagged with the nodes on the high and low sides.
#[derive(Debug, Clone)]
pub struct CrossingPoint {
    pub position: Vec<f64>,
    pub inside_node: usize,
    pub outside_node: usize,
}

/// All edge crossings of the level `c` (nodes with `value > c` are inside).
pub fn level_crossings(geom: &GridGeometry, values: &[f64], c: f64) -> Vec<CrossingPoint> {
    let mut out = Vec::new();
    for idx in 0..values.len() {
        for axis in 0..geom.dim() {
            let Some(j) = geom.neighbor(idx, axis, true) else {
                continue;
            };
            let (a, b) = (values[idx], values[j]);
            if (a > c) == (b > c) {
                continue;
            }
            let theta = (c - a) / (b - a);
            let mut position = geom.point(idx);
            position[axis] += theta * geom.spacing()[axis];
            out.push(CrossingPoint {
                position,
                inside_node: if a > c { idx } else { j },
                outside_node: if a > c { j } else { idx },
            });
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn square(n: usize) -> GridGeometry {
        GridGeometry::cube(2, n, -1.0, 1.0).unwrap()
    }

    #[test]
    fn geometry_indexing() {
        let g = GridGeometry::new(vec![3, 4], vec![0.0, 10.0], vec![1.0, 0.5]).unwrap();
        assert_eq!(g.strides(), &[4, 1]);
        assert_eq!(g.multi_index(7), vec![1, 3]);
        assert_eq!(g.flat_index(&[2, 1]), 9);
        assert_eq!(g.point(7), vec![1.0, 11.5]);
        assert_eq!(g.section_bases(0), vec![0, 1, 2, 3]);
        assert_eq!(g.section_bases(1), vec![0, 4, 8]);
    }

    #[test]
    fn rejects_nonzero_boundary() {
        let g = square(5);
        let mut v = vec![0.0; 25];
        v[0] = 1.0;
        assert!(SampledGridFunction::new(g.clone(), v, None).is_err());
        let mut v = vec![0.0; 25];
        v[12] = -1.0;
        assert!(SampledGridFunction::new(g, v, None).is_err());
    }

    #[test]
    fn interpolation_reproduces_bilinear() {
        let g = square(9);
        let f = |x: &[f64]| (1.0 - x[0]) * (1.0 + x[1]) * (1.0 + x[0]) * (1.0 - x[1]);
        let u = SampledGridFunction::from_fn(g, None, f).unwrap();
        let x = [0.25, -0.5];
        assert!((u.interpolate(&x) - f(&x)).abs() < 1e-12);
        assert_eq!(u.interpolate(&[2.0, 0.0]), 0.0);
    }

    #[test]
    fn central_gradient_is_second_order() {
        let err = |n: usize| {
            let g = square(n);
            let u = SampledGridFunction::from_fn(g.clone(), None, |x| {
                (1.0 - x[0] * x[0]).powi(3) * (1.0 - x[1] * x[1]).powi(3)
            })
            .unwrap();
            let dx = partial_derivative(&u, 0);
            let idx = g.flat_index(&[n / 4, n / 3]);
            let x = g.point(idx);
            let exact = -6.0 * x[0] * (1.0 - x[0] * x[0]).powi(2) * (1.0 - x[1] * x[1]).powi(3);
            (dx[idx] - exact).abs()
        };
        let ratio = err(33) / err(65);
        assert!(ratio > 3.5, "ratio {ratio}");
    }

    #[test]
    fn components_of_two_blobs() {
        let g = GridGeometry::new(vec![3, 7], vec![0.0, 0.0], vec![1.0, 1.0]).unwrap();
        let mut mask = vec![false; g.len()];
        for j in [1, 2, 4, 5] {
            mask[g.flat_index(&[1, j])] = true;
        }
        let (labels, count) = label_components(&g, &mask);
        assert_eq!(count, 2);
        assert_eq!(labels[g.flat_index(&[1, 1])], Some(0));
        assert_eq!(labels[g.flat_index(&[1, 5])], Some(1));
    }

    #[test]
    fn crossings_of_a_cone() {
        let g = square(41);
        let u = SampledGridFunction::from_fn(g.clone(), None, |x| {
            (0.8 - (x[0] * x[0] + x[1] * x[1]).sqrt()).max(0.0)
        })
        .unwrap();
        let pts = level_crossings(&g, u.values(), 0.3);
        assert!(!pts.is_empty());
        for p in pts {
            let r = p.position.iter().map(|x| x * x).sum::<f64>().sqrt();
            assert!((r - 0.5).abs() < 0.01, "r = {r}");
        }
    }
}
