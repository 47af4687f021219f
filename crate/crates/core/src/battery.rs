//! Fixed collections of checks, run in a deterministic order.

use crate::error::{Error, Result};
use crate::exemplar::ExemplarParams;
use crate::grid::SampledGridFunction;
use crate::lemmas::{
    convexity_surplus_check, default_t_ladder, f_pairing_check, flux_bound_check, h_drift_check,
    monotonicity_in_level_check, truncated_monotonicity_check,
};
use crate::nonlinearity::NonlinearityPair;
use crate::properties::{
    cavalieri_check, commutation_check, energy_inequality_check, equimeasurability_check,
    hardy_littlewood_check, lipschitz_drift_check, monotonicity_check, nonexpansivity_check,
    support_check, Settings,
};
use crate::report::PropertyReport;

fn renamed(mut r: PropertyReport, name: &str) -> PropertyReport {
    r.name = name.to_string();
    r
}

/// The three convex integrands of the energy checks.
pub fn standard_energies() -> [(&'static str, fn(f64) -> f64); 3] {
    [
        ("z2", |z| z * z / 2.0),
        ("z3", |z| z * z * z / 3.0),
        ("mc", |z| (1.0 + z * z).sqrt() - 1.0),
    ]
}

/// Rearrangement properties of `u` (and the pair `u ≤ v`) at time `t`.
pub fn property_battery(
    u: &SampledGridFunction,
    v: &SampledGridFunction,
    t: f64,
    settings: &Settings,
) -> Result<Vec<PropertyReport>> {
    let mut out = Vec::new();
    out.push(renamed(cavalieri_check(u, t, &|z| z, settings)?, "cavalieri_z1"));
    out.push(renamed(cavalieri_check(u, t, &|z| z * z, settings)?, "cavalieri_z2"));
    out.push(renamed(cavalieri_check(u, t, &|z| z * z * z, settings)?, "cavalieri_z3"));
    out.push(equimeasurability_check(u, t, settings)?);
    out.push(monotonicity_check(u, v, t, settings)?);
    out.push(renamed(nonexpansivity_check(u, v, t, 1.0, settings)?, "nonexpansivity_p1"));
    out.push(renamed(nonexpansivity_check(u, v, t, 2.0, settings)?, "nonexpansivity_p2"));
    out.push(hardy_littlewood_check(u, v, t, settings)?);
    out.push(lipschitz_drift_check(u, t, settings)?);
    out.push(support_check(u, t, settings)?);
    for (name, g) in standard_energies() {
        let r = energy_inequality_check(u, t, &g, settings)?;
        out.push(renamed(r, &format!("energy_inequality_{name}")));
    }
    let top = u.sup();
    out.push(commutation_check(u, t, 0.125 * top, 0.375 * top, settings)?);
    Ok(out)
}

/// Parameters of the lemma suite.
#[derive(Debug, Clone, PartialEq)]
pub struct LemmaConfig {
    pub t: f64,
    pub gamma_levels: (f64, f64),
    pub truncations: (f64, f64, f64, f64),
    pub surplus_gamma: f64,
    pub flux_gammas: Vec<f64>,
    pub drift_gamma: f64,
    pub epsilon: f64,
    pub times: Vec<f64>,
}

impl Default for LemmaConfig {
    fn default() -> Self {
        LemmaConfig {
            t: 0.2,
            gamma_levels: (0.5, 0.1),
            truncations: (0.9, 0.8, 0.3, 0.2),
            surplus_gamma: 0.3,
            flux_gammas: vec![0.2, 0.1, 0.05, 0.025],
            drift_gamma: 0.05,
            epsilon: 0.1,
            times: default_t_ladder(),
        }
    }
}

/// Energy, flux and small-time estimates for `u` solving the equation with
/// `pair`. The truncated ordering runs on `ring` when given, else on `u`.
pub fn lemma_battery(
    u: &SampledGridFunction,
    ring: Option<&SampledGridFunction>,
    pair: &NonlinearityPair,
    config: &LemmaConfig,
    settings: &Settings,
) -> Result<Vec<PropertyReport>> {
    let big_g = |z: f64| pair.big_g(z);
    let mut out = Vec::new();
    let (g0, g1) = config.gamma_levels;
    out.push(monotonicity_in_level_check(u, config.t, g0, g1, &big_g, settings)?);
    let target = ring.unwrap_or(u);
    out.push(truncated_monotonicity_check(target, 0.1, config.truncations, &big_g, settings)?);
    out.push(convexity_surplus_check(u, 0.1, config.surplus_gamma, pair, settings)?);
    out.push(flux_bound_check(u, &config.flux_gammas, pair)?);
    let drift = h_drift_check(u, config.drift_gamma, pair, config.epsilon, &config.times, settings)?;
    out.push(drift.report);
    let pairing = f_pairing_check(u, config.drift_gamma, pair, config.epsilon, &config.times, settings)?;
    out.push(pairing.report);
    Ok(out)
}

/// Standard battery on the three-mountain exemplar sampled at `n²`, with the
/// perturbed exemplar as the upper comparison function.
pub fn standard_battery(n: usize, settings: &Settings) -> Result<Vec<PropertyReport>> {
    let e = ExemplarParams::three_mountain(2);
    let u = e.sample(n)?;
    let v = ExemplarParams::perturbed(2).sample(n)?;
    let ring = ExemplarParams::ring(2).sample(n)?;
    let pair = NonlinearityPair::p_laplacian(e.p, e.source())?;
    let mut out = property_battery(&u, &v, 0.5, settings)?;
    out.extend(lemma_battery(&u, Some(&ring), &pair, &LemmaConfig::default(), settings)?);
    Ok(out)
}

/// Runs `f` on a dedicated pool of `threads` workers.
pub fn with_threads<T: Send>(threads: usize, f: impl FnOnce() -> T + Send) -> Result<T> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads.max(1))
        .build()
        .map_err(|e| Error::InvalidParameter(format!("thread pool: {e}")))?;
    Ok(pool.install(f))
}
