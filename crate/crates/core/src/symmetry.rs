//! Local symmetry in a coordinate direction and the annular decomposition of
//! locally symmetric functions.
//!
//! A point `y` with `∂₁u(y) > 0` is matched with the first point `ỹ` further
//! along the same line where `u` returns to `u(y)`. Local symmetry asks for
//! `∂₁u(ỹ) = −∂₁u(y)` and equal transverse derivatives at every such pair.

use std::fmt::Write as _;

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::field::{GridField, ScalarField};
use crate::grid::{
    gradient_magnitude, label_components, level_crossings, truncation_estimate, GridGeometry,
    SampledGridFunction,
};
use crate::report::{fmt_f64, PropertyReport};

const BISECTIONS: usize = 80;

/// How the partner of a point is searched for along a line.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PartnerSearch {
    /// Marching step along the axis.
    pub step: f64,
    /// The search stops at this coordinate.
    pub limit: f64,
    /// `∂₁u(y)` must exceed this threshold.
    pub tau_grad: f64,
}

impl PartnerSearch {
    /// Quarter-cell steps up to the end of the box.
    pub fn for_grid(geom: &GridGeometry, axis: usize, tau_grad: f64) -> Self {
        PartnerSearch {
            step: 0.25 * geom.spacing()[axis],
            limit: geom.upper_corner(axis),
            tau_grad,
        }
    }
}

/// The first point `ỹ = y + s·e_axis`, `s > 0`, with `u(ỹ) = u(y)` and
/// `u > u(y)` in between. `None` when `u(y) ≤ 0`, the derivative is below the
/// threshold, or the line never returns to the value.
///
/// The return is located by marching with `search.step` and bisecting the
/// bracketing step, so a dip narrower than one step can be missed.
pub fn reflection_partner(
    u: &dyn ScalarField,
    y: &[f64],
    axis: usize,
    search: &PartnerSearch,
) -> Option<Vec<f64>> {
    let target = u.value(y);
    if !(target > 0.0) || !(u.gradient(y)[axis] > search.tau_grad) {
        return None;
    }
    let mut p = y.to_vec();
    let at = |p: &mut Vec<f64>, s: f64| {
        p[axis] = y[axis] + s;
        u.value(p)
    };
    let mut lo = 0.0;
    let mut hi = search.step;
    loop {
        if y[axis] + hi > search.limit {
            return None;
        }
        if at(&mut p, hi) <= target {
            break;
        }
        lo = hi;
        hi += search.step;
    }
    for _ in 0..BISECTIONS {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if at(&mut p, mid) > target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    p[axis] = y[axis] + hi;
    Some(p)
}

/// A sample point failing the reflection conditions.
#[derive(Debug, Clone, PartialEq)]
pub struct Violation {
    pub point: Vec<f64>,
    pub partner: Option<Vec<f64>>,
    /// Largest gradient mismatch; infinite when there is no partner.
    pub residual: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SymmetryVerdict {
    pub axis: usize,
    pub tol: f64,
    /// Number of sample points with `∂u > τ_grad`.
    pub checked: usize,
    pub max_residual: f64,
    pub violations: Vec<Violation>,
}

impl SymmetryVerdict {
    pub fn is_symmetric(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn report(&self) -> PropertyReport {
        PropertyReport::new(
            format!("local_symmetry_axis{}", self.axis),
            self.max_residual,
            self.tol,
            0.0,
        )
    }

    /// `x_1, …, x_N, partner_1, …, partner_N, residual` per violation.
    pub fn violations_csv(&self) -> String {
        let dim = self.violations.first().map_or(0, |v| v.point.len());
        let mut out = String::new();
        let mut head: Vec<String> = (0..dim).map(|i| format!("x{i}")).collect();
        head.extend((0..dim).map(|i| format!("partner{i}")));
        head.push("residual".into());
        out.push_str(&head.join(","));
        out.push('\n');
        for v in &self.violations {
            let mut row: Vec<String> = v.point.iter().map(|x| fmt_f64(*x)).collect();
            match &v.partner {
                Some(q) => row.extend(q.iter().map(|x| fmt_f64(*x))),
                None => row.extend((0..dim).map(|_| "nan".to_string())),
            }
            row.push(fmt_f64(v.residual));
            out.push_str(&row.join(","));
            out.push('\n');
        }
        out
    }
}

fn pair_residual(u: &dyn ScalarField, y: &[f64], partner: &[f64], axis: usize) -> f64 {
    let a = u.gradient(y);
    let b = u.gradient(partner);
    let mut r = (a[axis] + b[axis]).abs();
    for i in 0..a.len() {
        if i != axis {
            r = r.max((a[i] - b[i]).abs());
        }
    }
    r
}

/// Checks the reflection conditions at every node of `nodes` where
/// `0 < u < sup` and `∂u > tau(node)`.
fn check_nodes(
    u: &dyn ScalarField,
    nodes: &GridGeometry,
    axis: usize,
    tol: f64,
    tau: &(dyn Fn(usize) -> f64 + Sync),
) -> Result<SymmetryVerdict> {
    nodes.check_axis(axis)?;
    if u.dim() != nodes.dim() {
        return Err(Error::GridMismatch(format!(
            "field of dimension {} on a {}-dimensional grid",
            u.dim(),
            nodes.dim()
        )));
    }
    let values: Vec<f64> = (0..nodes.len())
        .into_par_iter()
        .map(|i| u.value(&nodes.point(i)))
        .collect();
    let sup = values.iter().cloned().fold(0.0, f64::max);
    let results: Vec<Option<Violation>> = (0..nodes.len())
        .into_par_iter()
        .map(|i| {
            if !(values[i] > 0.0 && values[i] < sup) {
                return None;
            }
            let y = nodes.point(i);
            let search = PartnerSearch::for_grid(nodes, axis, tau(i));
            if !(u.gradient(&y)[axis] > search.tau_grad) {
                return None;
            }
            Some(match reflection_partner(u, &y, axis, &search) {
                Some(q) => Violation {
                    residual: pair_residual(u, &y, &q, axis),
                    point: y,
                    partner: Some(q),
                },
                None => Violation {
                    point: y,
                    partner: None,
                    residual: f64::INFINITY,
                },
            })
        })
        .collect();
    let checked = results.iter().filter(|r| r.is_some()).count();
    let mut max_residual = 0.0f64;
    let mut violations = Vec::new();
    for v in results.into_iter().flatten() {
        max_residual = max_residual.max(v.residual);
        if !(v.residual <= tol) {
            violations.push(v);
        }
    }
    Ok(SymmetryVerdict {
        axis,
        tol,
        checked,
        max_residual,
        violations,
    })
}

/// Reflection test of a field with exact gradients, sampled at the nodes of
/// `nodes`, with a fixed derivative threshold.
pub fn check_field_symmetry(
    u: &dyn ScalarField,
    nodes: &GridGeometry,
    axis: usize,
    tau_grad: f64,
    tol: f64,
) -> Result<SymmetryVerdict> {
    check_nodes(u, nodes, axis, tol, &|_| tau_grad)
}

/// Reflection test of sampled data. Gradients are central differences
/// interpolated multilinearly; the derivative threshold at each node is three
/// times its local truncation estimate.
pub fn is_locally_symmetric_in_direction(
    u: &SampledGridFunction,
    axis: usize,
    tol: f64,
) -> Result<SymmetryVerdict> {
    let field = GridField::new(u);
    let tau = gradient_threshold(u);
    check_nodes(&field, u.geometry(), axis, tol, &|i| tau[i])
}

/// `τ_grad` at every node: three times the local finite-difference truncation
/// estimate.
pub fn gradient_threshold(u: &SampledGridFunction) -> Vec<f64> {
    truncation_estimate(u.geometry(), u.values())
        .into_iter()
        .map(|t| 3.0 * t)
        .collect()
}

/// Least-squares spheres through groups of points sharing one center. Returns
/// the center and one radius per group. An algebraic fit is refined by one
/// Gauss–Newton step on the geometric distances.
pub fn fit_concentric_spheres(groups: &[Vec<Vec<f64>>]) -> Result<(Vec<f64>, Vec<f64>)> {
    let groups: Vec<&Vec<Vec<f64>>> = groups.iter().filter(|g| !g.is_empty()).collect();
    let Some(first) = groups.first().and_then(|g| g.first()) else {
        return Err(Error::InvalidParameter("no points to fit".into()));
    };
    let dim = first.len();
    let rows: usize = groups.iter().map(|g| g.len()).sum();
    let cols = dim + groups.len();
    if rows < cols {
        return Err(Error::InvalidParameter("too few points for a sphere fit".into()));
    }
    let mut a = DMatrix::zeros(rows, cols);
    let mut b = DVector::zeros(rows);
    let mut r = 0;
    for (j, g) in groups.iter().enumerate() {
        for x in g.iter() {
            for k in 0..dim {
                a[(r, k)] = 2.0 * x[k];
            }
            a[(r, dim + j)] = 1.0;
            b[r] = x.iter().map(|v| v * v).sum();
            r += 1;
        }
    }
    let sol = a
        .svd(true, true)
        .solve(&b, 1e-12)
        .map_err(|e| Error::InvalidParameter(format!("sphere fit: {e}")))?;
    let mut center: Vec<f64> = (0..dim).map(|k| sol[k]).collect();
    let c2: f64 = center.iter().map(|v| v * v).sum();
    let mut radii: Vec<f64> = (0..groups.len())
        .map(|j| (sol[dim + j] + c2).max(0.0).sqrt())
        .collect();

    // one Gauss–Newton step on |x − z| − ρ_j
    let mut jac = DMatrix::zeros(rows, cols);
    let mut res = DVector::zeros(rows);
    let mut r = 0;
    for (j, g) in groups.iter().enumerate() {
        for x in g.iter() {
            let d: Vec<f64> = x.iter().zip(&center).map(|(a, c)| a - c).collect();
            let norm = d.iter().map(|v| v * v).sum::<f64>().sqrt();
            if norm > 0.0 {
                for k in 0..dim {
                    jac[(r, k)] = -d[k] / norm;
                }
            }
            jac[(r, dim + j)] = -1.0;
            res[r] = norm - radii[j];
            r += 1;
        }
    }
    if let Ok(step) = jac.svd(true, true).solve(&(-res), 1e-12) {
        if step.iter().all(|v| v.is_finite()) {
            for k in 0..dim {
                center[k] += step[k];
            }
            for (j, rho) in radii.iter_mut().enumerate() {
                *rho += step[dim + j];
            }
        }
    }
    Ok((center, radii))
}

/// One annulus `B_R(z) \ Q_r(z)` on which `u` is radial and decreasing.
#[derive(Debug, Clone, PartialEq)]
pub struct Annulus {
    pub center: Vec<f64>,
    pub inner_radius: f64,
    pub outer_radius: f64,
    /// `(radius, value)` bin averages, increasing in radius.
    pub profile: Vec<(f64, f64)>,
    /// `max |u(x) − U(|x − z|)|` over the nodes of the component.
    pub radiality_residual: f64,
    /// Bin averages strictly decrease.
    pub monotone: bool,
    /// Worst shortfall `U(r) − u(x)` on the inner ball, clipped at zero.
    pub inner_shortfall: f64,
    pub nodes: usize,
    pub accepted: bool,
}

impl Annulus {
    /// Profile value at radius `r`, interpolated linearly between bins and
    /// held constant beyond the first and last bin.
    pub fn profile_at(&self, r: f64) -> f64 {
        let p = &self.profile;
        if p.is_empty() {
            return 0.0;
        }
        if r <= p[0].0 {
            return p[0].1;
        }
        let k = p.partition_point(|q| q.0 <= r);
        if k >= p.len() {
            return p[p.len() - 1].1;
        }
        let (r0, v0) = p[k - 1];
        let (r1, v1) = p[k];
        v0 + (v1 - v0) * (r - r0) / (r1 - r0)
    }

    fn contains(&self, x: &[f64]) -> bool {
        let d = distance(x, &self.center);
        d < self.outer_radius && d >= self.inner_radius
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AnnularDecomposition {
    pub annuli: Vec<Annulus>,
    /// Nodes of `{u > 0}` where `|∇u| ≤ τ_grad`.
    pub flat_mask: Vec<bool>,
    /// Fraction of `{u > 0}` covered neither by an accepted annulus nor by
    /// the flat set.
    pub residual_fraction: f64,
    pub tol: f64,
}

impl AnnularDecomposition {
    /// Whether the closed annuli are pairwise disjoint: either apart, or one
    /// inside the hole of the other.
    pub fn disjoint(&self) -> bool {
        let a = &self.annuli;
        for i in 0..a.len() {
            for j in i + 1..a.len() {
                let d = distance(&a[i].center, &a[j].center);
                let apart = d >= a[i].outer_radius + a[j].outer_radius;
                let in_i = d + a[j].outer_radius <= a[i].inner_radius;
                let in_j = d + a[i].outer_radius <= a[j].inner_radius;
                if !(apart || in_i || in_j) {
                    return false;
                }
            }
        }
        true
    }

    pub fn accepted(&self) -> bool {
        self.annuli.iter().all(|a| a.accepted)
    }

    /// `k, z_1, …, z_N, r, R, radiality_residual, monotone, accepted`.
    pub fn to_csv(&self) -> String {
        let dim = self.annuli.first().map_or(0, |a| a.center.len());
        let mut out = String::from("k");
        for i in 0..dim {
            let _ = write!(out, ",z{i}");
        }
        out.push_str(",inner_radius,outer_radius,radiality_residual,monotone,accepted\n");
        for (k, a) in self.annuli.iter().enumerate() {
            let _ = write!(out, "{k}");
            for z in &a.center {
                let _ = write!(out, ",{}", fmt_f64(*z));
            }
            let _ = writeln!(
                out,
                ",{},{},{},{},{}",
                fmt_f64(a.inner_radius),
                fmt_f64(a.outer_radius),
                fmt_f64(a.radiality_residual),
                a.monotone,
                a.accepted
            );
        }
        out
    }
}

fn distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

const FIT_LEVELS: usize = 8;

/// Splits `{0 < u < sup, |∇u| > τ_grad}` into connected components and fits a
/// radial annulus to each. Components whose radiality residual exceeds `tol`,
/// whose profile is not decreasing, or whose inner ball dips below the inner
/// profile value by more than `tol` are kept but not accepted.
pub fn decompose(u: &SampledGridFunction, tol: f64) -> Result<AnnularDecomposition> {
    if !(tol > 0.0) {
        return Err(Error::InvalidParameter(format!("tol must be positive, got {tol}")));
    }
    let g = u.geometry();
    let vals = u.values();
    let sup = u.sup();
    let grad = gradient_magnitude(u);
    let tau = gradient_threshold(u);
    let flat_mask: Vec<bool> = (0..vals.len())
        .map(|i| vals[i] > 0.0 && grad[i] <= tau[i])
        .collect();
    let mask: Vec<bool> = (0..vals.len())
        .map(|i| vals[i] > 0.0 && vals[i] < sup && grad[i] > tau[i])
        .collect();
    let (labels, count) = label_components(g, &mask);
    let mut members: Vec<Vec<usize>> = vec![Vec::new(); count];
    for (i, l) in labels.iter().enumerate() {
        if let Some(k) = l {
            members[*k].push(i);
        }
    }
    let annuli: Vec<Annulus> = members
        .par_iter()
        .enumerate()
        .filter(|(_, m)| m.len() > g.dim() + 1)
        .map(|(k, m)| fit_annulus(u, &labels, k, m, tol))
        .collect::<Result<Vec<_>>>()?;

    let positive = vals.iter().filter(|&&v| v > 0.0).count();
    let uncovered = (0..vals.len())
        .filter(|&i| vals[i] > 0.0 && !flat_mask[i])
        .filter(|&i| {
            let x = g.point(i);
            !annuli.iter().any(|a| a.accepted && a.contains(&x))
        })
        .count();
    Ok(AnnularDecomposition {
        annuli,
        flat_mask,
        residual_fraction: if positive == 0 {
            0.0
        } else {
            uncovered as f64 / positive as f64
        },
        tol,
    })
}

fn fit_annulus(
    u: &SampledGridFunction,
    labels: &[Option<usize>],
    k: usize,
    members: &[usize],
    tol: f64,
) -> Result<Annulus> {
    let g = u.geometry();
    let vals = u.values();
    let (lo, hi) = members
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &i| (a.min(vals[i]), b.max(vals[i])));
    let mut groups = Vec::with_capacity(FIT_LEVELS);
    for j in 0..FIT_LEVELS {
        let c = lo + (hi - lo) * (j as f64 + 0.5) / FIT_LEVELS as f64;
        let pts: Vec<Vec<f64>> = level_crossings(g, vals, c)
            .into_iter()
            .filter(|p| labels[p.inside_node] == Some(k) || labels[p.outside_node] == Some(k))
            .map(|p| p.position)
            .collect();
        groups.push(pts);
    }
    let (center, _) = fit_concentric_spheres(&groups)?;

    let radii: Vec<f64> = members.iter().map(|&i| distance(&g.point(i), &center)).collect();
    let inner = radii.iter().cloned().fold(f64::INFINITY, f64::min);
    let outer = radii.iter().cloned().fold(0.0, f64::max);

    let width = g.max_spacing();
    let bins = (((outer - inner) / width).ceil() as usize).max(1);
    let mut sums = vec![(0.0, 0.0, 0usize); bins];
    for (&i, &r) in members.iter().zip(&radii) {
        let b = (((r - inner) / width) as usize).min(bins - 1);
        sums[b].0 += r;
        sums[b].1 += vals[i];
        sums[b].2 += 1;
    }
    let profile: Vec<(f64, f64)> = sums
        .into_iter()
        .filter(|s| s.2 > 0)
        .map(|(r, v, n)| (r / n as f64, v / n as f64))
        .collect();
    let monotone = profile.windows(2).all(|w| w[1].1 < w[0].1);

    let mut annulus = Annulus {
        center,
        inner_radius: inner,
        outer_radius: outer,
        profile,
        radiality_residual: 0.0,
        monotone,
        inner_shortfall: 0.0,
        nodes: members.len(),
        accepted: false,
    };
    annulus.radiality_residual = members
        .iter()
        .zip(&radii)
        .map(|(&i, &r)| (vals[i] - annulus.profile_at(r)).abs())
        .fold(0.0, f64::max);
    let top = annulus.profile_at(inner);
    annulus.inner_shortfall = (0..vals.len())
        .filter(|&i| distance(&g.point(i), &annulus.center) < inner)
        .map(|i| (top - vals[i]).max(0.0))
        .fold(0.0, f64::max);
    annulus.accepted =
        annulus.radiality_residual <= tol && monotone && annulus.inner_shortfall <= tol;
    Ok(annulus)
}

/// Shape of one component of a superlevel set.
#[derive(Debug, Clone, PartialEq)]
pub struct BallComponent {
    pub center: Vec<f64>,
    pub radius: f64,
    /// `max ||x − z| − ρ| / ρ` over the level crossings.
    pub shape_deviation: f64,
    /// Relative standard deviation of `|∇u|` over the level crossings.
    pub gradient_spread: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BallCheck {
    pub components: Vec<BallComponent>,
    pub report: PropertyReport,
}

/// Tests whether every component of `{u > c}` is a ball on whose boundary
/// `|∇u|` is constant. Each component's level crossings are fitted by a
/// sphere; the report's left side is the worst relative radial deviation or
/// gradient spread.
pub fn levelset_ball_check(u: &SampledGridFunction, c: f64, tol: f64) -> Result<BallCheck> {
    if !(c > 0.0) {
        return Err(Error::InvalidParameter(format!("need c > 0, got {c}")));
    }
    let g = u.geometry();
    let vals = u.values();
    let mask: Vec<bool> = vals.iter().map(|&v| v > c).collect();
    let (labels, count) = label_components(g, &mask);
    let mut groups: Vec<Vec<Vec<f64>>> = vec![Vec::new(); count];
    for p in level_crossings(g, vals, c) {
        if let Some(k) = labels[p.inside_node] {
            groups[k].push(p.position);
        }
    }
    let field = GridField::new(u);
    let components: Vec<BallComponent> = groups
        .par_iter()
        .map(|pts| {
            let (center, radii) = fit_concentric_spheres(std::slice::from_ref(pts))?;
            let radius = radii[0];
            let shape_deviation = pts
                .iter()
                .map(|x| (distance(x, &center) - radius).abs() / radius)
                .fold(0.0, f64::max);
            let mags: Vec<f64> = pts
                .iter()
                .map(|x| field.gradient(x).iter().map(|v| v * v).sum::<f64>().sqrt())
                .collect();
            let mean = mags.iter().sum::<f64>() / mags.len() as f64;
            let var = mags.iter().map(|m| (m - mean) * (m - mean)).sum::<f64>() / mags.len() as f64;
            Ok(BallComponent {
                center,
                radius,
                shape_deviation,
                gradient_spread: if mean > 0.0 { var.sqrt() / mean } else { f64::INFINITY },
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let worst = components
        .iter()
        .map(|b| b.shape_deviation.max(b.gradient_spread))
        .fold(0.0, f64::max);
    Ok(BallCheck {
        components,
        report: PropertyReport::new("levelset_balls", worst, tol, 0.0),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exemplar::ExemplarParams;

    struct Radial;

    impl ScalarField for Radial {
        fn dim(&self) -> usize {
            2
        }
        fn value(&self, x: &[f64]) -> f64 {
            (1.0 - x[0] * x[0] - x[1] * x[1]).max(0.0).powi(2)
        }
        fn gradient(&self, x: &[f64]) -> Vec<f64> {
            let q = (1.0 - x[0] * x[0] - x[1] * x[1]).max(0.0);
            vec![-4.0 * q * x[0], -4.0 * q * x[1]]
        }
    }

    fn search() -> PartnerSearch {
        PartnerSearch {
            step: 0.01,
            limit: 2.0,
            tau_grad: 1e-9,
        }
    }

    #[test]
    fn partner_of_radial_bump_is_the_mirror() {
        let y = [-0.6, 0.3];
        let q = reflection_partner(&Radial, &y, 0, &search()).unwrap();
        assert!((q[0] - 0.6).abs() < 1e-12 && q[1] == 0.3);
        assert!((Radial.value(&q) - Radial.value(&y)).abs() < 1e-12);
    }

    #[test]
    fn no_partner_on_the_falling_side() {
        assert!(reflection_partner(&Radial, &[0.6, 0.0], 0, &search()).is_none());
    }

    struct Ramp;

    impl ScalarField for Ramp {
        fn dim(&self) -> usize {
            1
        }
        fn value(&self, x: &[f64]) -> f64 {
            x[0].max(0.0)
        }
        fn gradient(&self, _: &[f64]) -> Vec<f64> {
            vec![1.0]
        }
    }

    #[test]
    fn monotone_line_has_no_partner() {
        assert!(reflection_partner(&Ramp, &[0.5], 0, &search()).is_none());
    }

    #[test]
    fn radial_bump_is_symmetric_at_tight_tolerance() {
        let nodes = GridGeometry::cube(2, 41, -1.5, 1.5).unwrap();
        for axis in 0..2 {
            let v = check_field_symmetry(&Radial, &nodes, axis, 1e-9, 1e-8).unwrap();
            assert!(v.is_symmetric() && v.checked > 0, "{:?}", v.violations.first());
        }
    }

    #[test]
    fn exemplar_partner_crosses_the_mountain() {
        let e = ExemplarParams::three_mountain(2);
        let y = [-3.1, 0.2];
        let q = reflection_partner(&e, &y, 0, &search_for(&e)).unwrap();
        // mirror image across the vertical line through x¹
        assert!((q[0] - (-1.9)).abs() < 1e-9, "{q:?}");
        assert!(pair_residual(&e, &y, &q, 0) < 1e-6);
    }

    fn search_for(_: &ExemplarParams) -> PartnerSearch {
        PartnerSearch {
            step: 0.01,
            limit: 6.5,
            tau_grad: 1e-9,
        }
    }

    #[test]
    fn sphere_fit_recovers_circles() {
        let circle = |r: f64, n: usize| -> Vec<Vec<f64>> {
            (0..n)
                .map(|k| {
                    let a = k as f64 * 0.37;
                    vec![1.5 + r * a.cos(), -0.5 + r * a.sin()]
                })
                .collect()
        };
        let (z, radii) = fit_concentric_spheres(&[circle(1.0, 20), circle(2.5, 30)]).unwrap();
        assert!((z[0] - 1.5).abs() < 1e-10 && (z[1] + 0.5).abs() < 1e-10);
        assert!((radii[0] - 1.0).abs() < 1e-10 && (radii[1] - 2.5).abs() < 1e-10);
    }

    #[test]
    fn radial_bump_decomposes_into_one_ball() {
        let g = GridGeometry::cube(2, 81, -1.5, 1.5).unwrap();
        let u = SampledGridFunction::from_fn(g, None, |x| Radial.value(x)).unwrap();
        let d = decompose(&u, 0.05).unwrap();
        assert_eq!(d.annuli.len(), 1);
        let a = &d.annuli[0];
        assert!(a.accepted && a.monotone, "{a:?}");
        assert!(a.inner_radius < 0.1 && (a.outer_radius - 1.0).abs() < 0.1);
        assert!(a.center.iter().all(|z| z.abs() < 1e-6));
    }

    #[test]
    fn empty_superlevel_set_passes() {
        let g = GridGeometry::cube(2, 33, -1.5, 1.5).unwrap();
        let u = SampledGridFunction::from_fn(g, None, |x| Radial.value(x)).unwrap();
        let b = levelset_ball_check(&u, 5.0, 0.01).unwrap();
        assert!(b.components.is_empty() && b.report.pass);
    }
}
