use steinerflow::pde::{boundary_verdict, strong_residual, weak_residual, BoundaryMode, TestFunction};
use steinerflow::{ExemplarParams, NonlinearityPair, SampledGridFunction};

/// Least-squares slope of `log y` against `log h`.
fn order(hs: &[f64], ys: &[f64]) -> f64 {
    let xs: Vec<f64> = hs.iter().map(|h| h.ln()).collect();
    let zs: Vec<f64> = ys.iter().map(|y| y.ln()).collect();
    let n = xs.len() as f64;
    let (mx, mz) = (xs.iter().sum::<f64>() / n, zs.iter().sum::<f64>() / n);
    let sxz: f64 = xs.iter().zip(&zs).map(|(x, z)| (x - mx) * (z - mz)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    sxz / sxx
}

/// Nodes at least `margin` away from every branch interface of the exemplar.
fn away_from_interfaces(e: &ExemplarParams, u: &SampledGridFunction, margin: f64) -> Vec<bool> {
    let g = u.geometry();
    (0..g.len())
        .map(|i| {
            let x = g.point(i);
            let r = x.iter().map(|a| a * a).sum::<f64>().sqrt();
            let d = |c: &[f64]| x.iter().zip(c).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt();
            (r - 5.0).abs() > margin
                && (r - 6.0).abs() > margin
                && (d(&e.x1) - 1.0).abs() > margin
                && (d(&e.x2) - 1.0).abs() > margin
        })
        .collect()
}

/// Integrates the radial equation `(r^{N−1}|u'|^{p−2}u')' = −r^{N−1} f(u)`
/// inward from `r = 6` with `u = 0`, `u' = −12s/11` by RK4, and compares with
/// the closed-form outer profile.
fn shoot(p: f64, s: f64, dim: usize) -> f64 {
    let e = ExemplarParams::three_mountain(dim).with_ps(p, s);
    let f = |z: f64| e.eval_f(z.clamp(0.0, 2.0)).unwrap();
    let n1 = (dim - 1) as f64;
    let rhs = |r: f64, y: [f64; 2]| -> [f64; 2] {
        let w = y[1];
        let du = w.signum() * w.abs().powf(1.0 / (p - 1.0));
        [du, -n1 / r * w - f(y[0])]
    };
    let profile = |r: f64| 1.0 - ((r * r - 25.0) / 11.0).powf(s);
    let c: f64 = 12.0 * s / 11.0;
    let mut y = [0.0, -c.powf(p - 1.0)];
    let mut r = 6.0;
    let h = -1e-4;
    let mut worst = 0.0f64;
    while r > 5.3 {
        let k1 = rhs(r, y);
        let k2 = rhs(r + h / 2.0, [y[0] + h / 2.0 * k1[0], y[1] + h / 2.0 * k1[1]]);
        let k3 = rhs(r + h / 2.0, [y[0] + h / 2.0 * k2[0], y[1] + h / 2.0 * k2[1]]);
        let k4 = rhs(r + h, [y[0] + h * k3[0], y[1] + h * k3[1]]);
        for i in 0..2 {
            y[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        }
        r += h;
        worst = worst.max((y[0] - profile(r)).abs());
    }
    worst
}

#[test]
fn source_term_matches_radial_shooting() {
    for (p, s, dim) in [(2.0, 3.0, 2), (3.0, 4.0, 2), (2.0, 3.0, 3), (2.5, 6.0, 2)] {
        let err = shoot(p, s, dim);
        assert!(err < 1e-8, "p={p} s={s} N={dim}: {err}");
    }
}

#[test]
fn source_at_zero_by_substitution() {
    let e = ExemplarParams::three_mountain(2);
    let expected = 6.0 / 11.0 * (100.0 / 11.0 + 6.0);
    assert!((e.eval_f(0.0).unwrap() - expected).abs() < 1e-12);
}

#[test]
fn weak_residual_converges() {
    let e = ExemplarParams::three_mountain(2);
    let pair = NonlinearityPair::p_laplacian(e.p, e.source()).unwrap();
    let phis = TestFunction::random_family(&e.sample(64).unwrap(), 10, (0.5, 1.5), 0).unwrap();
    assert_eq!(phis.len(), 10);
    let (mut hs, mut worst) = (Vec::new(), Vec::new());
    for n in [64, 128, 256] {
        let u = e.sample(n).unwrap();
        let h = u.geometry().max_spacing();
        let w = phis
            .iter()
            .map(|phi| weak_residual(&u, &pair, phi).unwrap().abs())
            .fold(0.0, f64::max);
        assert!(w <= h, "n={n}: {w} > h = {h}");
        hs.push(h);
        worst.push(w);
    }
    let k = order(&hs, &worst);
    assert!(k >= 0.9, "weak order {k}: {worst:?}");
}

#[test]
fn strong_residual_p2_is_second_order_off_interfaces() {
    let e = ExemplarParams::three_mountain(2);
    let pair = NonlinearityPair::p_laplacian(e.p, e.source()).unwrap();
    let (mut hs, mut worst) = (Vec::new(), Vec::new());
    for n in [64, 128, 256] {
        let u = e.sample(n).unwrap();
        let keep = away_from_interfaces(&e, &u, 0.45);
        let r = strong_residual(&u, &pair);
        hs.push(u.geometry().max_spacing());
        worst.push(r.max_abs(|i| keep[i]));
    }
    let k = order(&hs, &worst);
    assert!(k >= 1.8, "strong order {k}: {worst:?}");
}

#[test]
fn strong_residual_is_first_order_for_other_exponents() {
    for (p, s, dim, ns) in [(3.0, 4.0, 2, [64, 128, 256]), (2.0, 3.0, 3, [32, 64, 96])] {
        let e = ExemplarParams::three_mountain(dim).with_ps(p, s);
        let pair = NonlinearityPair::p_laplacian(p, e.source()).unwrap();
        let mut per_h = Vec::new();
        for n in ns {
            let u = e.sample(n).unwrap();
            let keep = away_from_interfaces(&e, &u, 0.45);
            let r = strong_residual(&u, &pair).max_abs(|i| keep[i]);
            per_h.push(r / u.geometry().max_spacing());
        }
        assert!(per_h.windows(2).all(|w| w[1] <= w[0]), "p={p} N={dim}: {per_h:?}");
    }
}

#[test]
fn boundary_constants_at_n256() {
    let u = ExemplarParams::three_mountain(2).sample(256).unwrap();
    let h = u.geometry().max_spacing();
    let v = boundary_verdict(&u, BoundaryMode::OuterPositive, h).unwrap();
    assert!(v.report(&[36.0 / 11.0], 0.02).pass, "{:?}", v.c_estimates);

    let ring = ExemplarParams::ring(2);
    let s = ring.s;
    let u = ring.sample(256).unwrap();
    let v = boundary_verdict(&u, BoundaryMode::Ring, h).unwrap();
    let inner = s * 0.75f64.powf(s - 1.0);
    assert!(v.report(&[36.0 / 11.0, inner], 0.02).pass, "{:?}", v.c_estimates);
}

#[test]
fn ring_values_stay_below_the_inner_boundary_value() {
    let e = ExemplarParams::ring(2);
    let u = e.sample(128).unwrap();
    let eta = e.eta();
    assert!(u.values().iter().all(|&v| v >= 0.0 && v <= eta));
    assert_eq!(u.sup(), eta);
}

#[test]
fn degenerate_band_fails_for_positive_gradient() {
    let u = ExemplarParams::three_mountain(2).sample(128).unwrap();
    let h = u.geometry().max_spacing();
    let v = boundary_verdict(&u, BoundaryMode::Degenerate { epsilon: 0.1 }, h).unwrap();
    assert!(v.c_estimates[0] > 0.1);
}
