//! Checks of the energy, flux and small-time estimates used by the symmetry
//! argument, evaluated on sampled functions.

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;

use crate::cst::{
    cst_section, positive_part, section_values, superlevel_set, truncate, LevelLadder,
    SectionProfile,
};
use crate::interval::IntervalUnion;
use crate::error::{Error, Result};
use crate::grid::{gradient_magnitude, truncation_estimate, SampledGridFunction};
use crate::nonlinearity::NonlinearityPair;
use crate::properties::{energy, eta, Settings};
use crate::report::PropertyReport;

pub const C_LEVEL_MONOTONICITY: f64 = 0.05;
pub const C_SURPLUS: f64 = 0.01;
pub const C_FLUX: f64 = 0.5;
pub const C_SLOPE: f64 = 1.0;

/// `2^-4, …, 2^-10`.
pub fn default_t_ladder() -> Vec<f64> {
    (4..=10).map(|k| 2f64.powi(-k)).collect()
}

/// Least-squares `y = a·t + b·t² + c·t³`, returned as `(a, b)`. Falls back to
/// fewer terms when there are too few distinct times.
pub fn fit_small_time(ts: &[f64], ys: &[f64]) -> (f64, f64) {
    let mut distinct: Vec<f64> = ts.to_vec();
    distinct.sort_by(f64::total_cmp);
    distinct.dedup();
    let terms = distinct.len().min(3);
    if terms < 2 {
        return (fit_through_origin(ts, ys), 0.0);
    }
    let design = DMatrix::from_fn(ts.len(), terms, |i, k| ts[i].powi(k as i32 + 1));
    let rhs = DVector::from_column_slice(ys);
    match design.svd(true, true).solve(&rhs, 1e-300) {
        Ok(c) => (c[0], c[1]),
        Err(_) => (fit_through_origin(ts, ys), 0.0),
    }
}

/// Least-squares slope of `y = slope·t`.
pub fn fit_through_origin(ts: &[f64], ys: &[f64]) -> f64 {
    let sxy: f64 = ts.iter().zip(ys).map(|(t, y)| t * y).sum();
    let sxx: f64 = ts.iter().map(|t| t * t).sum();
    if sxx > 0.0 {
        sxy / sxx
    } else {
        0.0
    }
}

/// Energy change `∫G(|∇w^t|) − ∫G(|∇w|)`.
fn energy_change(
    w: &SampledGridFunction,
    t: f64,
    big_g: &dyn Fn(f64) -> f64,
    settings: &Settings,
) -> Result<f64> {
    let wt = settings.symmetrize(w, t)?;
    Ok(energy(&wt, big_g) - energy(w, big_g))
}

/// `Δ(γ₁) ≤ Δ(γ₀)` for `γ₀ ≥ γ₁ > 0`, where `Δ(γ)` is the energy change of
/// `(u − γ)₊` under symmetrization.
pub fn monotonicity_in_level_check(
    u: &SampledGridFunction,
    t: f64,
    gamma0: f64,
    gamma1: f64,
    big_g: &dyn Fn(f64) -> f64,
    settings: &Settings,
) -> Result<PropertyReport> {
    if !(gamma0 >= gamma1) || !(gamma1 > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "need gamma0 >= gamma1 > 0, got {gamma0}, {gamma1}"
        )));
    }
    let w0 = positive_part(u, gamma0)?;
    let w1 = positive_part(u, gamma1)?;
    let d0 = energy_change(&w0, t, big_g, settings)?;
    let d1 = energy_change(&w1, t, big_g, settings)?;
    let slack = C_LEVEL_MONOTONICITY * eta(&w1, settings.levels) * energy(&w1, big_g);
    Ok(PropertyReport::new("monotonicity_in_level", d1, d0, slack))
}

/// The same ordering for the two-sided truncations `min{β, (u − γ)₊}`, with
/// parameters `β₁ ≥ β₀ > γ₀ ≥ γ₁ > 0`. The active band of the narrower
/// truncation, `(γ₀, γ₀ + β₀)`, must lie inside that of the wider one.
pub fn truncated_monotonicity_check(
    u: &SampledGridFunction,
    t: f64,
    (beta1, beta0, gamma0, gamma1): (f64, f64, f64, f64),
    big_g: &dyn Fn(f64) -> f64,
    settings: &Settings,
) -> Result<PropertyReport> {
    if !(beta1 >= beta0 && beta0 > gamma0 && gamma0 >= gamma1 && gamma1 > 0.0) {
        return Err(Error::InvalidParameter(
            "need beta1 >= beta0 > gamma0 >= gamma1 > 0".into(),
        ));
    }
    if gamma0 + beta0 > gamma1 + beta1 {
        return Err(Error::InvalidParameter(
            "truncation bands are not nested: gamma0 + beta0 > gamma1 + beta1".into(),
        ));
    }
    let w0 = truncate(u, gamma0, beta0)?;
    let w1 = truncate(u, gamma1, beta1)?;
    let d0 = energy_change(&w0, t, big_g, settings)?;
    let d1 = energy_change(&w1, t, big_g, settings)?;
    let slack = C_LEVEL_MONOTONICITY * eta(&w1, settings.levels) * energy(&w1, big_g);
    Ok(PropertyReport::new("truncated_monotonicity", d1, d0, slack))
}

/// The three terms of the convexity-surplus inequality, each as
/// `∫_{u^t>γ} · − ∫_{u>γ} ·`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SurplusTerms {
    pub energy: f64,
    pub pairing: f64,
    pub h_drift: f64,
}

pub fn surplus_terms(
    u: &SampledGridFunction,
    t: f64,
    gamma: f64,
    pair: &NonlinearityPair,
    settings: &Settings,
) -> Result<SurplusTerms> {
    let ut = settings.symmetrize(u, t)?;
    let a = gradient_magnitude(u);
    let b = gradient_magnitude(&ut);
    let vol = u.geometry().cell_volume();
    let mut terms = SurplusTerms {
        energy: 0.0,
        pairing: 0.0,
        h_drift: 0.0,
    };
    for i in 0..a.len() {
        if ut.values()[i] > gamma {
            terms.energy += pair.big_g(b[i]);
            terms.pairing += pair.g(a[i]) * b[i];
            terms.h_drift += pair.h(a[i]);
        }
        if u.values()[i] > gamma {
            terms.energy -= pair.big_g(a[i]);
            terms.pairing -= pair.g(a[i]) * a[i];
            terms.h_drift -= pair.h(a[i]);
        }
    }
    terms.energy *= vol;
    terms.pairing *= vol;
    terms.h_drift *= vol;
    Ok(terms)
}

/// Energy difference `≥` pairing difference `−` h-drift difference, over
/// `{u^t > γ}` and `{u > γ}`.
pub fn convexity_surplus_check(
    u: &SampledGridFunction,
    t: f64,
    gamma: f64,
    pair: &NonlinearityPair,
    settings: &Settings,
) -> Result<PropertyReport> {
    if !(gamma > 0.0) {
        return Err(Error::InvalidParameter(format!("need gamma > 0, got {gamma}")));
    }
    let terms = surplus_terms(u, t, gamma, pair, settings)?;
    let scale = energy(u, &|z| pair.big_g(z));
    let slack = C_SURPLUS * eta(u, settings.levels) * scale;
    Ok(PropertyReport::new(
        "convexity_surplus",
        terms.pairing - terms.h_drift,
        terms.energy,
        slack,
    ))
}

/// Co-area estimate of `∫_{u=γ} g(|∇u|) dH^{N−1}`:
/// `∫_{γ−δ<u<γ+δ} g(|∇u|)|∇u| dx` divided by the band height, `δ = 2hL`.
pub fn boundary_flux(u: &SampledGridFunction, gamma: f64, pair: &NonlinearityPair) -> Result<f64> {
    if !(gamma > 0.0) {
        return Err(Error::InvalidParameter(format!("need gamma > 0, got {gamma}")));
    }
    if gamma >= u.sup() {
        return Ok(0.0);
    }
    let d = 2.0 * u.geometry().max_spacing() * u.lipschitz();
    let (lo, hi) = ((gamma - d).max(0.0), gamma + d);
    let grad = gradient_magnitude(u);
    let tau = truncation_estimate(u.geometry(), u.values());
    let mut sum = 0.0;
    let mut nodes = 0usize;
    for (i, &v) in u.values().iter().enumerate() {
        if v > lo && v < hi {
            nodes += 1;
            if grad[i] <= 3.0 * tau[i] || grad[i] == 0.0 {
                return Err(Error::DegenerateLevel { level: gamma });
            }
            sum += pair.g(grad[i]) * grad[i];
        }
    }
    if nodes == 0 {
        return Err(Error::EmptyBand);
    }
    Ok(sum * u.geometry().cell_volume() / (hi - lo))
}

/// `∫|f(u)| dx`, the level-independent ceiling for the flux.
pub fn flux_ceiling(u: &SampledGridFunction, pair: &NonlinearityPair) -> f64 {
    u.integrate(|z| pair.f(z).abs())
}

/// Flux at each level against the ceiling `∫|f(u)|`.
pub fn flux_bound_check(
    u: &SampledGridFunction,
    gammas: &[f64],
    pair: &NonlinearityPair,
) -> Result<PropertyReport> {
    let ceiling = flux_ceiling(u, pair);
    let mut worst = 0.0f64;
    for &g in gammas {
        worst = worst.max(boundary_flux(u, g, pair)?);
    }
    let slack = C_FLUX * eta(u, crate::cst::DEFAULT_LEVELS) * ceiling;
    Ok(PropertyReport::new("flux_bound", worst, ceiling, slack))
}

/// A small-time fit `y ≈ slope·t + curvature·t² + O(t³)`.
#[derive(Debug, Clone, PartialEq)]
pub struct SlopeReport {
    pub times: Vec<f64>,
    pub values: Vec<f64>,
    pub slope: f64,
    pub curvature: f64,
    pub report: PropertyReport,
}

fn check_gamma(u: &SampledGridFunction, gamma: f64) -> Result<()> {
    if !(gamma > 0.0 && gamma < u.sup()) {
        return Err(Error::InvalidParameter(format!("gamma must lie in (0, sup u), got {gamma}")));
    }
    Ok(())
}

fn check_times(times: &[f64]) -> Result<()> {
    if times.len() < 2 || times.iter().any(|t| !(*t > 0.0) || !t.is_finite()) {
        return Err(Error::InvalidParameter(
            "slope fits need at least two positive finite times".into(),
        ));
    }
    Ok(())
}

/// `∫_a^b` of the piecewise-linear interpolant through `(xs, ys)`.
fn pl_integral(xs: &[f64], ys: &[f64], a: f64, b: f64) -> f64 {
    let mut total = 0.0;
    for k in 0..xs.len() - 1 {
        let (x0, x1) = (xs[k], xs[k + 1]);
        let (lo, hi) = (a.max(x0), b.min(x1));
        if hi <= lo {
            continue;
        }
        let at = |x: f64| ys[k] + (ys[k + 1] - ys[k]) * (x - x0) / (x1 - x0);
        total += 0.5 * (hi - lo) * (at(lo) + at(hi));
    }
    total
}

const GAUSS: [(f64, f64); 3] = [
    (-0.774_596_669_241_483_4, 5.0 / 9.0),
    (0.0, 8.0 / 9.0),
    (0.774_596_669_241_483_4, 5.0 / 9.0),
];

/// `∫ f(u(x))·(a(x) − b(x)) dx` along one section, Gauss rule on every piece
/// between consecutive breakpoints of the three profiles.
fn section_pairing(
    pair: &NonlinearityPair,
    u: &SectionProfile,
    a: &SectionProfile,
    b: &SectionProfile,
) -> f64 {
    let mut xs: Vec<f64> = a.coordinates().iter().chain(b.coordinates()).cloned().collect();
    xs.extend_from_slice(u.coordinates());
    xs.sort_by(f64::total_cmp);
    xs.dedup();
    let mut total = 0.0;
    for w in xs.windows(2) {
        let (mid, half) = (0.5 * (w[0] + w[1]), 0.5 * (w[1] - w[0]));
        for (node, weight) in GAUSS {
            let x = mid + half * node;
            let d = a.eval(x) - b.eval(x);
            if d != 0.0 {
                total += weight * half * pair.f(u.eval(x)) * d;
            }
        }
    }
    total
}

/// Per-section values for every time, summed across sections in a fixed
/// order.
fn sum_sections<F>(u: &SampledGridFunction, axis: usize, count: usize, op: F) -> Result<Vec<f64>>
where
    F: Fn(&SectionProfile, usize) -> Result<Vec<f64>> + Sync,
{
    let g = u.geometry();
    g.check_axis(axis)?;
    let coords = g.axis_coordinates(axis);
    let across = g.cell_volume() / g.spacing()[axis];
    let parts: Vec<Option<Vec<f64>>> = g
        .section_bases(axis)
        .par_iter()
        .map(|&base| {
            let heights = section_values(u, base, axis);
            if heights.iter().all(|&v| v == 0.0) {
                return Ok(None);
            }
            let profile = SectionProfile::new(coords.clone(), heights)?;
            op(&profile, base).map(Some)
        })
        .collect::<Result<Vec<_>>>()?;
    let mut total = vec![0.0; count];
    for part in parts.into_iter().flatten() {
        for (t, v) in total.iter_mut().zip(part) {
            *t += v;
        }
    }
    Ok(total.into_iter().map(|v| v * across).collect())
}

/// `∫_{u^t>γ} h(|∇u|) − ∫_{u>γ} h(|∇u|) ≤ εt + o(t)`: passes when the fitted
/// slope is at most `ε`. The sets `{u^t > γ}` are evolved exactly, section by
/// section, and `h(|∇u|)` is integrated over them as a piecewise-linear
/// function.
pub fn h_drift_check(
    u: &SampledGridFunction,
    gamma: f64,
    pair: &NonlinearityPair,
    epsilon: f64,
    times: &[f64],
    settings: &Settings,
) -> Result<SlopeReport> {
    check_gamma(u, gamma)?;
    check_times(times)?;
    let g = u.geometry();
    g.check_axis(settings.axis)?;
    let hs: Vec<f64> = gradient_magnitude(u).into_iter().map(|z| pair.h(z)).collect();
    let stride = g.strides()[settings.axis];
    let coords = g.axis_coordinates(settings.axis);
    let values = sum_sections(u, settings.axis, times.len(), |p, base| {
        let hv: Vec<f64> = (0..coords.len()).map(|i| hs[base + i * stride]).collect();
        let over = |set: &IntervalUnion| -> f64 {
            set.intervals()
                .iter()
                .map(|iv| pl_integral(&coords, &hv, iv.lo(), iv.hi()))
                .sum()
        };
        let set = superlevel_set(p, gamma);
        let base_value = over(&set);
        times
            .iter()
            .map(|&t| Ok(over(&set.evolve(t)?) - base_value))
            .collect()
    })?;
    let (slope, curvature) = fit_small_time(times, &values);
    let slack = C_SLOPE * eta(u, settings.levels) * epsilon.abs();
    Ok(SlopeReport {
        times: times.to_vec(),
        values,
        slope,
        curvature,
        report: PropertyReport::new("h_drift_slope", slope, epsilon, slack),
    })
}

/// `∫ f(u)[(u−γ)₊^t − (u−γ)₊] ≥ −εt + o(t)`: passes when the fitted slope is at
/// least `−ε`. The pairing is integrated section by section against the
/// reconstructed profiles before resampling; the reference `(u−γ)₊` is the
/// time-zero reconstruction, so the level quantization cancels in the
/// difference.
pub fn f_pairing_check(
    u: &SampledGridFunction,
    gamma: f64,
    pair: &NonlinearityPair,
    epsilon: f64,
    times: &[f64],
    settings: &Settings,
) -> Result<SlopeReport> {
    check_gamma(u, gamma)?;
    check_times(times)?;
    let w = positive_part(u, gamma)?;
    let ladder = LevelLadder::for_function(&w, settings.levels)?;
    let g = u.geometry();
    g.check_axis(settings.axis)?;
    let stride = g.strides()[settings.axis];
    let coords = g.axis_coordinates(settings.axis);
    let values = sum_sections(&w, settings.axis, times.len(), |p, base| {
        let uv: Vec<f64> = (0..coords.len()).map(|i| u.values()[base + i * stride]).collect();
        let up = SectionProfile::new(coords.clone(), uv)?;
        let w0 = cst_section(p, 0.0, &ladder)?;
        times
            .iter()
            .map(|&t| Ok(section_pairing(pair, &up, &cst_section(p, t, &ladder)?, &w0)))
            .collect()
    })?;
    let (slope, curvature) = fit_small_time(times, &values);
    let slack = C_SLOPE * eta(u, settings.levels) * epsilon.abs();
    Ok(SlopeReport {
        times: times.to_vec(),
        values,
        slope,
        curvature,
        report: PropertyReport::new("f_pairing_slope", -slope, epsilon, slack),
    })
}
