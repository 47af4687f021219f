//! Numerical checks of the rearrangement properties of `u ↦ u^t`.
//!
//! Every check compares a left side with a right side and allows an explicit
//! slack `C · η · scale`, where `η = h·L/sup u + 1/M` is the relative
//! discretization error of one symmetrization (grid spacing `h`, Lipschitz
//! constant `L`, ladder size `M`) and `scale` carries the units of the
//! compared quantities.

use crate::cst::{cst, LevelLadder, DEFAULT_LEVELS};
use crate::error::{Error, Result};
use crate::grid::{gradient_energy, SampledGridFunction};
use crate::report::PropertyReport;

pub const C_CAVALIERI: f64 = 0.02;
pub const C_EQUIMEASURABILITY: f64 = 0.05;
pub const C_MONOTONICITY: f64 = 0.2;
pub const C_NONEXPANSIVITY: f64 = 0.01;
pub const C_HARDY_LITTLEWOOD: f64 = 0.01;
pub const C_DRIFT: f64 = 2.0;
pub const C_ENERGY: f64 = 0.2;
pub const C_COMMUTATION: f64 = 0.2;
/// Support allowance in grid spacings.
pub const SUPPORT_CELLS: f64 = 2.0;

/// Shared configuration of the symmetrization under test.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Settings {
    pub axis: usize,
    pub levels: usize,
}

impl Default for Settings {
    fn default() -> Self {
        Settings {
            axis: 0,
            levels: DEFAULT_LEVELS,
        }
    }
}

impl Settings {
    pub fn new(axis: usize, levels: usize) -> Self {
        Settings { axis, levels }
    }

    pub fn symmetrize(&self, u: &SampledGridFunction, t: f64) -> Result<SampledGridFunction> {
        let ladder = LevelLadder::for_function(u, self.levels)?;
        cst(u, self.axis, t, &ladder)
    }
}

/// Relative discretization error `h·L/sup + 1/M` of one symmetrization.
pub fn eta(u: &SampledGridFunction, levels: usize) -> f64 {
    let sup = u.sup();
    if sup == 0.0 {
        return 0.0;
    }
    u.geometry().max_spacing() * u.lipschitz() / sup + 1.0 / levels as f64
}

/// Absolute sup-norm discretization error `h·L + sup/M`.
pub fn delta(u: &SampledGridFunction, levels: usize) -> f64 {
    eta(u, levels) * u.sup()
}

fn support_measure(u: &SampledGridFunction) -> f64 {
    u.superlevel_measure(0.0)
}

fn union_support_measure(u: &SampledGridFunction, v: &SampledGridFunction) -> f64 {
    let n = u
        .values()
        .iter()
        .zip(v.values())
        .filter(|(a, b)| **a > 0.0 || **b > 0.0)
        .count();
    n as f64 * u.geometry().cell_volume()
}

/// Lipschitz constant of `F` on `[0, top]`, by sampling.
fn lipschitz_on(f: &dyn Fn(f64) -> f64, top: f64) -> f64 {
    let n = 1000;
    let dz = top / n as f64;
    if dz == 0.0 {
        return 0.0;
    }
    (0..n)
        .map(|k| {
            let a = k as f64 * dz;
            ((f(a + dz) - f(a)) / dz).abs()
        })
        .fold(0.0, f64::max)
}

/// `∫F(u) = ∫F(u^t)`.
pub fn cavalieri_check(
    u: &SampledGridFunction,
    t: f64,
    f: &dyn Fn(f64) -> f64,
    settings: &Settings,
) -> Result<PropertyReport> {
    let ut = settings.symmetrize(u, t)?;
    let lhs = (u.integrate(f) - ut.integrate(f)).abs();
    let scale = lipschitz_on(f, u.sup()) * u.sup() * support_measure(u);
    Ok(PropertyReport::new(
        "cavalieri",
        lhs,
        0.0,
        C_CAVALIERI * eta(u, settings.levels) * scale,
    ))
}

/// `|{u^t > c}| = |{u > c}|` at every ladder level, measured by nodes.
pub fn equimeasurability_check(
    u: &SampledGridFunction,
    t: f64,
    settings: &Settings,
) -> Result<PropertyReport> {
    let ladder = LevelLadder::for_function(u, settings.levels)?;
    let ut = cst(u, settings.axis, t, &ladder)?;
    let lhs = ladder
        .levels()
        .iter()
        .map(|&c| (ut.superlevel_measure(c) - u.superlevel_measure(c)).abs())
        .fold(0.0, f64::max);
    Ok(PropertyReport::new(
        "equimeasurability",
        lhs,
        0.0,
        C_EQUIMEASURABILITY * eta(u, settings.levels) * support_measure(u),
    ))
}

/// `u ≤ v ⇒ u^t ≤ v^t`, reported as `max(u^t − v^t) ≤ 0`.
pub fn monotonicity_check(
    u: &SampledGridFunction,
    v: &SampledGridFunction,
    t: f64,
    settings: &Settings,
) -> Result<PropertyReport> {
    u.check_same_grid(v)?;
    if u.values().iter().zip(v.values()).any(|(a, b)| a > b) {
        return Err(Error::InvalidParameter("monotonicity needs u <= v".into()));
    }
    let ut = settings.symmetrize(u, t)?;
    let vt = settings.symmetrize(v, t)?;
    let lhs = ut
        .values()
        .iter()
        .zip(vt.values())
        .map(|(a, b)| a - b)
        .fold(0.0, f64::max);
    let slack = C_MONOTONICITY * (delta(u, settings.levels) + delta(v, settings.levels));
    Ok(PropertyReport::new("monotonicity", lhs, 0.0, slack))
}

fn lp_distance(a: &[f64], b: &[f64], p: f64, vol: f64) -> f64 {
    let s: f64 = a.iter().zip(b).map(|(x, y)| (x - y).abs().powf(p)).sum();
    (s * vol).powf(1.0 / p)
}

/// `‖u^t − v^t‖_p ≤ ‖u − v‖_p`.
pub fn nonexpansivity_check(
    u: &SampledGridFunction,
    v: &SampledGridFunction,
    t: f64,
    p: f64,
    settings: &Settings,
) -> Result<PropertyReport> {
    u.check_same_grid(v)?;
    if !(p >= 1.0) {
        return Err(Error::InvalidParameter(format!("need p >= 1, got {p}")));
    }
    let ut = settings.symmetrize(u, t)?;
    let vt = settings.symmetrize(v, t)?;
    let vol = u.geometry().cell_volume();
    let lhs = lp_distance(ut.values(), vt.values(), p, vol);
    let rhs = lp_distance(u.values(), v.values(), p, vol);
    let slack = C_NONEXPANSIVITY
        * (delta(u, settings.levels) + delta(v, settings.levels))
        * union_support_measure(u, v).powf(1.0 / p);
    Ok(PropertyReport::new(format!("nonexpansivity_p{p}"), lhs, rhs, slack))
}

/// `∫uv ≤ ∫u^t v^t`.
pub fn hardy_littlewood_check(
    u: &SampledGridFunction,
    v: &SampledGridFunction,
    t: f64,
    settings: &Settings,
) -> Result<PropertyReport> {
    u.check_same_grid(v)?;
    let ut = settings.symmetrize(u, t)?;
    let vt = settings.symmetrize(v, t)?;
    let vol = u.geometry().cell_volume();
    let dot = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| x * y).sum::<f64>() * vol;
    let lhs = dot(u.values(), v.values());
    let rhs = dot(ut.values(), vt.values());
    let slack = C_HARDY_LITTLEWOOD
        * (delta(u, settings.levels) * v.sup() + delta(v, settings.levels) * u.sup())
        * union_support_measure(u, v);
    Ok(PropertyReport::new("hardy_littlewood", lhs, rhs, slack))
}

/// `‖u^t − u‖_∞ ≤ L·R·t`, with `R` the support radius.
pub fn lipschitz_drift_check(
    u: &SampledGridFunction,
    t: f64,
    settings: &Settings,
) -> Result<PropertyReport> {
    let ut = settings.symmetrize(u, t)?;
    let lhs = ut
        .values()
        .iter()
        .zip(u.values())
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    let rhs = if t == 0.0 {
        0.0
    } else {
        u.lipschitz() * u.support_radius() * t
    };
    Ok(PropertyReport::new(
        "lipschitz_drift",
        lhs,
        rhs,
        C_DRIFT * delta(u, settings.levels),
    ))
}

/// `supp u^t ⊂ B_R` with `R` the support radius of `u`.
pub fn support_check(u: &SampledGridFunction, t: f64, settings: &Settings) -> Result<PropertyReport> {
    let ut = settings.symmetrize(u, t)?;
    Ok(PropertyReport::new(
        "support",
        ut.support_radius(),
        u.support_radius(),
        SUPPORT_CELLS * u.geometry().max_spacing(),
    ))
}

/// `∫G(|∇u|)`.
pub fn energy(u: &SampledGridFunction, big_g: &dyn Fn(f64) -> f64) -> f64 {
    gradient_energy(u, big_g)
}

/// `∫G(|∇u^t|) ≤ ∫G(|∇u|)`.
pub fn energy_inequality_check(
    u: &SampledGridFunction,
    t: f64,
    big_g: &dyn Fn(f64) -> f64,
    settings: &Settings,
) -> Result<PropertyReport> {
    let ut = settings.symmetrize(u, t)?;
    let rhs = energy(u, big_g);
    Ok(PropertyReport::new(
        "energy_inequality",
        energy(&ut, big_g),
        rhs,
        C_ENERGY * eta(u, settings.levels) * rhs,
    ))
}

/// `T_γ^β[u^t] = (T_γ^β[u])^t`, in sup norm.
pub fn commutation_check(
    u: &SampledGridFunction,
    t: f64,
    gamma: f64,
    beta: f64,
    settings: &Settings,
) -> Result<PropertyReport> {
    use crate::cst::truncate;
    let a = truncate(&settings.symmetrize(u, t)?, gamma, beta)?;
    let b = settings.symmetrize(&truncate(u, gamma, beta)?, t)?;
    let lhs = a
        .values()
        .iter()
        .zip(b.values())
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max);
    Ok(PropertyReport::new(
        "commutation",
        lhs,
        0.0,
        C_COMMUTATION * delta(u, settings.levels),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::GridGeometry;

    fn bump(n: usize, cx: f64, cy: f64, r: f64) -> SampledGridFunction {
        let g = GridGeometry::cube(2, n, -4.0, 4.0).unwrap();
        SampledGridFunction::from_fn(g, None, |x| {
            let q = 1.0 - ((x[0] - cx).powi(2) + (x[1] - cy).powi(2)) / (r * r);
            q.max(0.0).powi(2)
        })
        .unwrap()
    }

    #[test]
    fn identity_cases() {
        let u = bump(64, 0.5, -0.3, 1.5);
        let s = Settings::default();
        assert!(nonexpansivity_check(&u, &u, 1.0, 2.0, &s).unwrap().lhs < 1e-12);
        let m = monotonicity_check(&u, &u, 0.5, &s).unwrap();
        assert!(m.lhs <= 1e-12 && m.pass);
        let c = cavalieri_check(&u, 0.7, &|z| z, &s).unwrap();
        assert!(c.pass, "{c:?}");
    }

    #[test]
    fn hardy_littlewood_strict_gain() {
        let u = bump(64, -2.0, 0.0, 1.0);
        let v = bump(64, 2.0, 0.0, 1.0);
        let r = hardy_littlewood_check(&u, &v, f64::INFINITY, &Settings::default()).unwrap();
        assert!(r.pass);
        assert!(r.lhs.abs() < 1e-12 && r.rhs > 0.5, "{r:?}");
    }

    #[test]
    fn energy_drops_for_off_center_bump() {
        let u = bump(64, 1.0, 0.0, 1.2);
        let r = energy_inequality_check(&u, 1.0, &|z| z * z / 2.0, &Settings::default()).unwrap();
        assert!(r.pass);
    }

    #[test]
    fn rejects_unordered_pair() {
        let u = bump(32, 0.0, 0.0, 1.0);
        let v = bump(32, 0.5, 0.0, 1.0);
        assert!(monotonicity_check(&u, &v, 0.1, &Settings::default()).is_err());
    }
}
