#![allow(dead_code)]

use rand::Rng;
use steinerflow::{Interval, IntervalUnion, Openness};

/// Up to `max` disjoint intervals inside `[-width, width]`, with gaps.
pub fn random_union(rng: &mut impl Rng, max: usize, width: f64) -> IntervalUnion {
    let count = rng.gen_range(1..=max);
    let mut cuts: Vec<f64> = (0..2 * count).map(|_| rng.gen_range(-width..width)).collect();
    cuts.sort_by(f64::total_cmp);
    let pairs: Vec<(f64, f64)> = cuts
        .chunks_exact(2)
        .map(|c| (c[0], c[1]))
        .filter(|(a, b)| b > a)
        .collect();
    // consecutive chunks may share an endpoint; keep the gaps open
    let mut out: Vec<(f64, f64)> = Vec::new();
    for (a, b) in pairs {
        if out.last().is_none_or(|l| a > l.1) {
            out.push((a, b));
        }
    }
    IntervalUnion::from_endpoints(&out, Openness::Open).unwrap()
}

/// Forward Euler on the centers `c' = -c` with step `dt`. Overlapping
/// neighbours are replaced by one interval of the summed length, centred at
/// the length-weighted mean of the two centers.
pub fn euler_oracle(m: &IntervalUnion, t: f64, dt: f64) -> Vec<(f64, f64)> {
    let mut iv: Vec<(f64, f64)> = m.intervals().iter().map(|i| (i.center, i.half_length)).collect();
    let steps = (t / dt).round() as usize;
    let merge = |iv: &mut Vec<(f64, f64)>| loop {
        let hit = iv
            .windows(2)
            .position(|w| w[0].0 + w[0].1 >= w[1].0 - w[1].1);
        match hit {
            None => break,
            Some(k) => {
                let (a, b) = (iv[k], iv[k + 1]);
                let half = a.1 + b.1;
                let center = if half > 0.0 { (a.0 * a.1 + b.0 * b.1) / half } else { 0.5 * (a.0 + b.0) };
                iv[k] = (center, half);
                iv.remove(k + 1);
            }
        }
    };
    merge(&mut iv);
    for _ in 0..steps {
        for c in iv.iter_mut() {
            c.0 -= c.0 * dt;
        }
        merge(&mut iv);
    }
    iv.iter().map(|&(c, r)| (c - r, c + r)).collect()
}

pub fn single(center: f64, half: f64) -> IntervalUnion {
    IntervalUnion::new(vec![Interval::new(center, half).unwrap()], Openness::Compact).unwrap()
}

pub fn max_endpoint_gap(a: &[(f64, f64)], b: &[(f64, f64)]) -> f64 {
    if a.len() != b.len() {
        return f64::INFINITY;
    }
    a.iter()
        .zip(b)
        .map(|(x, y)| (x.0 - y.0).abs().max((x.1 - y.1).abs()))
        .fold(0.0, f64::max)
}
