//! Acceptance run: one line per criterion, nonzero exit if any fails.

mod common;

use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use steinerflow::battery::{lemma_battery, property_battery, standard_battery, with_threads, LemmaConfig};
use steinerflow::grid::GridGeometry;
use steinerflow::lemmas::default_t_ladder;
use steinerflow::pde::{
    boundary_verdict, brock_derivative, strong_residual, weak_residual, BoundaryMode, BrockResult, TestFunction,
};
use steinerflow::report::to_csv;
use steinerflow::symmetry::{check_field_symmetry, decompose};
use steinerflow::{ExemplarParams, NonlinearityPair, Settings};

use common::{euler_oracle, max_endpoint_gap, random_union, single};

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

fn log_slope(hs: &[f64], ys: &[f64]) -> f64 {
    let xs: Vec<f64> = hs.iter().map(|h| h.ln()).collect();
    let zs: Vec<f64> = ys.iter().map(|y| y.ln()).collect();
    let n = xs.len() as f64;
    let (mx, mz) = (xs.iter().sum::<f64>() / n, zs.iter().sum::<f64>() / n);
    let sxz: f64 = xs.iter().zip(&zs).map(|(x, z)| (x - mx) * (z - mz)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    sxz / sxx
}

fn interval_law() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut worst = 0.0f64;
    for _ in 0..1000 {
        let (x, r, t) = (rng.gen_range(-50.0..50.0), rng.gen_range(0.0..10.0), rng.gen_range(0.0..10.0));
        let got = single(x, r).evolve(t).unwrap().endpoints()[0];
        let c = x * (-t).exp();
        worst = worst.max((got.0 - (c - r)).abs()).max((got.1 - (c + r)).abs());
    }
    outcome(worst <= 1e-12, format!("max endpoint error {worst:.1e}"))
}

fn unions() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let (mut semigroup, mut drift) = (0.0f64, 0.0f64);
    for _ in 0..1000 {
        let m = random_union(&mut rng, 20, 20.0);
        let (s, t) = (rng.gen_range(0.0..4.0), rng.gen_range(0.0..4.0));
        let two = m.evolve(s).unwrap().evolve(t).unwrap();
        let one = m.evolve(s + t).unwrap();
        semigroup = semigroup.max(max_endpoint_gap(&two.endpoints(), &one.endpoints()));
        drift = drift.max((one.measure() - m.measure()).abs());
    }
    let mut oracle = 0.0f64;
    for _ in 0..100 {
        let m = random_union(&mut rng, 20, 5.0);
        let t = rng.gen_range(0.05..1.5);
        let exact = m.evolve(t).unwrap().endpoints();
        oracle = oracle.max(max_endpoint_gap(&exact, &euler_oracle(&m, t, 1e-6)));
    }
    outcome(
        semigroup <= 1e-10 && drift <= 1e-12 && oracle <= 1e-4,
        format!("semigroup {semigroup:.1e}, measure drift {drift:.1e}, fine-step oracle {oracle:.1e}"),
    )
}

fn property_battery_refines() -> Outcome {
    let run = |n: usize, levels: usize| {
        let u = ExemplarParams::three_mountain(2).sample(n).unwrap();
        let v = ExemplarParams::perturbed(2).sample(n).unwrap();
        property_battery(&u, &v, 0.5, &Settings::new(0, levels)).unwrap()
    };
    let coarse = run(128, 256);
    let fine = run(256, 512);
    let failed: Vec<&str> = coarse.iter().filter(|r| !r.pass).map(|r| r.name.as_str()).collect();
    let mut min_ratio = f64::INFINITY;
    let mut worst = String::new();
    for (a, b) in coarse.iter().zip(&fine) {
        let ratio = a.slack / b.slack;
        if ratio < min_ratio {
            min_ratio = ratio;
            worst = a.name.clone();
        }
    }
    let use_of_slack = coarse
        .iter()
        .map(|r| (r.lhs - r.rhs).max(0.0) / r.slack)
        .fold(0.0, f64::max);
    outcome(
        failed.is_empty() && min_ratio >= 1.8,
        format!(
            "{} checks, failed {failed:?}, worst excess/slack {use_of_slack:.3}, min slack ratio {min_ratio:.3} ({worst})",
            coarse.len()
        ),
    )
}

fn exemplar_constants() -> Outcome {
    let u = ExemplarParams::three_mountain(2).sample(256).unwrap();
    let h = u.geometry().max_spacing();
    let outer = boundary_verdict(&u, BoundaryMode::OuterPositive, h).unwrap().c_estimates[0];
    let ring = ExemplarParams::ring(2);
    let r = boundary_verdict(&ring.sample(256).unwrap(), BoundaryMode::Ring, h).unwrap();
    let inner_expected = ring.s * 0.75f64.powf(ring.s - 1.0);
    let e_out = (outer / (36.0 / 11.0) - 1.0).abs();
    let e_in = (r.c_estimates[1] / inner_expected - 1.0).abs();
    outcome(
        e_out <= 0.02 && e_in <= 0.02,
        format!(
            "outer {outer:.5} vs 36/11 ({:.2}%), ring inner {:.5} vs {inner_expected:.5} ({:.2}%)",
            100.0 * e_out,
            r.c_estimates[1],
            100.0 * e_in
        ),
    )
}

fn pde_verification() -> Outcome {
    let e = ExemplarParams::three_mountain(2);
    let pair = NonlinearityPair::p_laplacian(e.p, e.source()).unwrap();
    let phis = TestFunction::random_family(&e.sample(64).unwrap(), 10, (0.5, 1.5), 0).unwrap();
    let (mut hs, mut weak, mut strong) = (Vec::new(), Vec::new(), Vec::new());
    let mut within_h = phis.len() == 10;
    for n in [64, 128, 256] {
        let u = e.sample(n).unwrap();
        let g = u.geometry();
        let h = g.max_spacing();
        let w = phis
            .iter()
            .map(|phi| weak_residual(&u, &pair, phi).unwrap().abs())
            .fold(0.0, f64::max);
        within_h &= w <= h;
        let keep: Vec<bool> = (0..g.len())
            .map(|i| {
                let x = g.point(i);
                let r = (x[0] * x[0] + x[1] * x[1]).sqrt();
                let d = |c: &[f64]| ((x[0] - c[0]).powi(2) + (x[1] - c[1]).powi(2)).sqrt();
                [r - 5.0, r - 6.0, d(&e.x1) - 1.0, d(&e.x2) - 1.0].iter().all(|v| v.abs() > 0.45)
            })
            .collect();
        hs.push(h);
        weak.push(w);
        strong.push(strong_residual(&u, &pair).max_abs(|i| keep[i]));
    }
    let (kw, ks) = (log_slope(&hs, &weak), log_slope(&hs, &strong));
    outcome(
        within_h && kw >= 0.9 && ks >= 1.8,
        format!("weak max {:.2e}..{:.2e} order {kw:.2}, strong order {ks:.2}", weak[0], weak[2]),
    )
}

fn local_symmetry() -> Outcome {
    let e = ExemplarParams::three_mountain(2);
    let nodes = GridGeometry::cube(2, 129, -6.5, 6.5).unwrap();
    let mut residual = 0.0f64;
    let mut symmetric = true;
    for axis in 0..2 {
        let v = check_field_symmetry(&e, &nodes, axis, 1e-3, 1e-6).unwrap();
        symmetric &= v.is_symmetric() && v.checked > 0;
        residual = residual.max(v.max_residual);
    }

    let u = e.sample(256).unwrap();
    let h = u.geometry().max_spacing();
    let d = decompose(&u, 0.05).unwrap();
    let targets = [(vec![0.0, 0.0], 5.0, 6.0), (e.x1.clone(), 0.0, 1.0), (e.x2.clone(), 0.0, 1.0)];
    let mut matched = d.annuli.len() == 3 && d.accepted();
    for (z, r, big_r) in &targets {
        let hit = d.annuli.iter().any(|a| {
            let dz = ((a.center[0] - z[0]).powi(2) + (a.center[1] - z[1]).powi(2)).sqrt();
            dz <= 2.0 * h && (a.inner_radius - r).abs() <= 2.0 * h && (a.outer_radius - big_r).abs() <= 2.0 * h
        });
        matched &= hit;
    }

    let p = ExemplarParams::perturbed(2);
    let bump = &p.bumps[0];
    let v = check_field_symmetry(&p, &nodes, 0, 1e-3, 1e-6).unwrap();
    let near = |x: &[f64]| {
        ((x[0] - bump.center[0]).powi(2) + (x[1] - bump.center[1]).powi(2)).sqrt() <= bump.radius + 1e-9
    };
    let localized = v
        .violations
        .iter()
        .all(|w| near(&w.point) || w.partner.as_deref().is_some_and(near));
    outcome(
        symmetric && matched && !v.violations.is_empty() && localized,
        format!(
            "analytic residual {residual:.1e}; {} annuli, matched {matched}; perturbed: {} violations, localized {localized}",
            d.annuli.len(),
            v.violations.len()
        ),
    )
}

fn brock(e: &ExemplarParams, n: usize) -> BrockResult {
    let u = e.sample(n).unwrap();
    let pair = NonlinearityPair::p_laplacian(e.p, |_| 0.0).unwrap();
    let g = |z: f64| pair.big_g(z);
    brock_derivative(&u, &g, &default_t_ladder(), &Settings::default(), None).unwrap()
}

fn brock_criterion() -> Outcome {
    let n = 256;
    let exemplar = brock(&ExemplarParams::three_mountain(2), n);
    let shifted = brock(&ExemplarParams::shifted(2), n);
    let bump = brock(&ExemplarParams::perturbed(2), n);
    let pass = exemplar.report.pass
        && shifted.slope < 0.0
        && shifted.slope.abs() > shifted.epsilon_crit
        && [&exemplar, &shifted, &bump].iter().all(|b| b.energy_bound_holds());
    outcome(
        pass,
        format!(
            "exemplar slope {:.2e} (eps {:.2e}); shifted mountain slope {:.3} (eps {:.2e}); \
             bump slope {:.2e} (eps {:.2e}, not resolved); max E(t) {:.1e}",
            exemplar.slope,
            exemplar.epsilon_crit,
            shifted.slope,
            shifted.epsilon_crit,
            bump.slope,
            bump.epsilon_crit,
            exemplar.max_energy.max(shifted.max_energy).max(bump.max_energy)
        ),
    )
}

fn lemma_suite() -> Outcome {
    let e = ExemplarParams::three_mountain(2);
    let u = e.sample(128).unwrap();
    let ring = ExemplarParams::ring(2).sample(128).unwrap();
    let pair = NonlinearityPair::p_laplacian(e.p, e.source()).unwrap();
    let reports = lemma_battery(&u, Some(&ring), &pair, &LemmaConfig::default(), &Settings::default()).unwrap();
    let failed: Vec<&str> = reports.iter().filter(|r| !r.pass).map(|r| r.name.as_str()).collect();
    let names: Vec<String> = reports
        .iter()
        .map(|r| format!("{} {:.2e}/{:.2e}", r.name, r.lhs - r.rhs, r.slack))
        .collect();
    outcome(failed.is_empty(), format!("failed {failed:?}; excess/slack: {}", names.join(", ")))
}

fn determinism() -> Outcome {
    let run = |threads| with_threads(threads, || to_csv(&standard_battery(128, &Settings::default()).unwrap())).unwrap();
    let (a, b) = (run(1), run(8));
    outcome(a == b, format!("{} bytes, identical {}", a.len(), a == b))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome, Duration); 9] = [
        ("interval law", interval_law, Duration::from_secs(1)),
        ("semigroup and equimeasurability", unions, Duration::from_secs(30)),
        ("rearrangement battery", property_battery_refines, Duration::from_secs(300)),
        ("exemplar constants", exemplar_constants, Duration::from_secs(60)),
        ("pde verification", pde_verification, Duration::from_secs(300)),
        ("local symmetry", local_symmetry, Duration::from_secs(120)),
        ("brock criterion", brock_criterion, Duration::from_secs(300)),
        ("lemma suite", lemma_suite, Duration::from_secs(600)),
        ("determinism", determinism, Duration::from_secs(600)),
    ];
    let mut failures = 0;
    for (k, (name, check, budget)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let o = check();
        let took = start.elapsed();
        let pass = o.pass && took <= *budget;
        if !pass {
            failures += 1;
        }
        println!(
            "criterion {} {name}: {} [{:.2}s / {}s] {}",
            k + 1,
            if pass { "PASS" } else { "FAIL" },
            took.as_secs_f64(),
            budget.as_secs(),
            o.detail
        );
    }
    if failures > 0 {
        println!("{failures} criteria failed");
        std::process::exit(1);
    }
}
