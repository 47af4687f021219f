//! Closed-form three-mountain and ring solutions of the `p`-Laplace
//! overdetermined problem on `B_6`, with their source term `f`.
//!
//! `w(x) = (1−|x|²)^s` on the unit ball, `v = 1` on `B_5` and
//! `1 − ((|x|²−25)/11)^s` on `5 ≤ |x| ≤ 6`, and
//! `u = v + w(·−x¹) + w(·−x²)`. The ring function drops the second mountain and
//! is constant `η = 1 + (3/4)^s` on `B_{1/2}(x¹)`.

use crate::error::{Error, Result};
use crate::field::ScalarField;
use crate::grid::{GridGeometry, SampledGridFunction};

/// Half-width of the sampling box `[−6.5, 6.5]^N`.
pub const BOX_HALF_WIDTH: f64 = 6.5;
/// Default cap on `N·n^N` for [`ExemplarParams::sample`].
pub const DEFAULT_SAMPLE_CAP: usize = 1 << 28;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Variant {
    ThreeMountain,
    Ring,
}

/// A smooth bump `a·(1−|x−c|²/ρ²)³` added on top of an exemplar. The result
/// is no longer a solution; it is used to break local symmetry on purpose.
#[derive(Debug, Clone, PartialEq)]
pub struct Bump {
    pub center: Vec<f64>,
    pub radius: f64,
    pub amplitude: f64,
}

impl Bump {
    fn value(&self, x: &[f64]) -> f64 {
        let q = 1.0 - dist2(x, &self.center) / (self.radius * self.radius);
        if q <= 0.0 {
            0.0
        } else {
            self.amplitude * q * q * q
        }
    }

    fn gradient(&self, x: &[f64]) -> Vec<f64> {
        let r2 = self.radius * self.radius;
        let q = 1.0 - dist2(x, &self.center) / r2;
        if q <= 0.0 {
            return vec![0.0; x.len()];
        }
        let k = -6.0 * self.amplitude * q * q / r2;
        x.iter().zip(&self.center).map(|(a, c)| k * (a - c)).collect()
    }

    fn max_gradient(&self) -> f64 {
        // |∇| = 6a r q²/ρ², maximal at r = ρ/√5
        let r = self.radius / 5f64.sqrt();
        let q = 0.8;
        6.0 * self.amplitude.abs() * r * q * q / (self.radius * self.radius)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExemplarParams {
    pub p: f64,
    pub s: f64,
    pub dim: usize,
    pub x1: Vec<f64>,
    /// Second mountain; unused by the ring variant.
    pub x2: Vec<f64>,
    pub variant: Variant,
    pub bumps: Vec<Bump>,
}

fn dist2(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

fn norm(a: &[f64]) -> f64 {
    a.iter().map(|x| x * x).sum::<f64>().sqrt()
}

fn axis_point(dim: usize, first: f64, second: f64) -> Vec<f64> {
    let mut v = vec![0.0; dim];
    v[0] = first;
    if dim > 1 {
        v[1] = second;
    }
    v
}

impl ExemplarParams {
    /// `p = 2`, `s = 3`, `x¹ = (−2.5, 0, …)`, `x² = (2.5, 0, …)`.
    pub fn three_mountain(dim: usize) -> Self {
        ExemplarParams {
            p: 2.0,
            s: 3.0,
            dim,
            x1: axis_point(dim, -2.5, 0.0),
            x2: axis_point(dim, 2.5, 0.0),
            variant: Variant::ThreeMountain,
            bumps: Vec::new(),
        }
    }

    /// Ring variant with `x¹ = (1, 0.5, 0, …)`.
    pub fn ring(dim: usize) -> Self {
        ExemplarParams {
            x1: axis_point(dim, 1.0, 0.5),
            x2: vec![0.0; dim],
            variant: Variant::Ring,
            ..ExemplarParams::three_mountain(dim)
        }
    }

    /// Three mountains plus a small bump straddling the flank of the first
    /// mountain, off both axes through its center.
    pub fn perturbed(dim: usize) -> Self {
        let mut e = ExemplarParams::three_mountain(dim);
        let mut c = e.x1.clone();
        c[0] += 0.35;
        if dim > 1 {
            c[1] += 0.35;
        }
        e.bumps.push(Bump {
            center: c,
            radius: 0.4,
            amplitude: 0.05,
        });
        e
    }

    /// Three mountains with the second one moved onto the outer flank, so that
    /// it straddles `|x| = 5`. Not a solution; local symmetry fails.
    pub fn shifted(dim: usize) -> Self {
        ExemplarParams {
            x2: axis_point(dim, 2.4, 3.8),
            ..ExemplarParams::three_mountain(dim)
        }
    }

    pub fn with_ps(mut self, p: f64, s: f64) -> Self {
        self.p = p;
        self.s = s;
        self
    }

    /// Whether the parameters describe an exact solution.
    pub fn is_solution(&self) -> bool {
        self.bumps.is_empty() && self.validate().is_ok()
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidParameter(m));
        if self.dim == 0 || self.x1.len() != self.dim || self.x2.len() != self.dim {
            return bad("centers must have the exemplar dimension".into());
        }
        if !(self.p >= 2.0) || !(self.s > 2.0) {
            return bad(format!("need p >= 2 and s > 2, got p = {}, s = {}", self.p, self.s));
        }
        if self.p > 2.0 && !(self.s > self.p / (self.p - 2.0)) {
            return bad(format!("p > 2 needs s > p/(p-2), got s = {}", self.s));
        }
        match self.variant {
            Variant::ThreeMountain => {
                if !(norm(&self.x1) < 4.0) || !(norm(&self.x2) < 4.0) {
                    return bad("mountain centers must lie in B_4".into());
                }
                if !(dist2(&self.x1, &self.x2).sqrt() > 2.0) {
                    return bad("mountain centers must be more than 2 apart".into());
                }
            }
            Variant::Ring => {
                if !(norm(&self.x1) < 2.0) {
                    return bad("ring center must lie in B_2".into());
                }
            }
        }
        Ok(())
    }

    /// Looser check for sampling: mountains inside `B_6`, any `p > 1`, `s > 1`.
    fn validate_geometry(&self) -> Result<()> {
        if self.dim == 0 || self.x1.len() != self.dim || self.x2.len() != self.dim {
            return Err(Error::InvalidParameter(
                "centers must have the exemplar dimension".into(),
            ));
        }
        if !(self.p > 1.0) || !(self.s > 1.0) {
            return Err(Error::InvalidParameter("need p > 1 and s > 1".into()));
        }
        let centers = self.mountains();
        if centers.iter().any(|c| !(norm(c) + 1.0 < 6.0)) {
            return Err(Error::InvalidParameter("mountains must lie inside B_6".into()));
        }
        Ok(())
    }

    fn mountains(&self) -> Vec<&[f64]> {
        match self.variant {
            Variant::ThreeMountain => vec![&self.x1, &self.x2],
            Variant::Ring => vec![&self.x1],
        }
    }

    /// Inner boundary value of the ring, `1 + (3/4)^s`.
    pub fn eta(&self) -> f64 {
        1.0 + 0.75f64.powf(self.s)
    }

    fn w(&self, y: &[f64]) -> f64 {
        let q = 1.0 - y.iter().map(|a| a * a).sum::<f64>();
        if q <= 0.0 {
            0.0
        } else {
            q.powf(self.s)
        }
    }

    fn grad_w(&self, y: &[f64]) -> Vec<f64> {
        let q = 1.0 - y.iter().map(|a| a * a).sum::<f64>();
        if q <= 0.0 {
            return vec![0.0; y.len()];
        }
        let k = -2.0 * self.s * q.powf(self.s - 1.0);
        y.iter().map(|a| k * a).collect()
    }

    fn v(&self, x: &[f64]) -> f64 {
        let r2 = x.iter().map(|a| a * a).sum::<f64>();
        if r2 < 25.0 {
            1.0
        } else if r2 <= 36.0 {
            1.0 - ((r2 - 25.0) / 11.0).powf(self.s)
        } else {
            0.0
        }
    }

    fn grad_v(&self, x: &[f64]) -> Vec<f64> {
        let r2 = x.iter().map(|a| a * a).sum::<f64>();
        if !(25.0..=36.0).contains(&r2) {
            return vec![0.0; x.len()];
        }
        let k = -self.s * ((r2 - 25.0) / 11.0).powf(self.s - 1.0) * 2.0 / 11.0;
        x.iter().map(|a| k * a).collect()
    }

    fn in_ring_hole(&self, x: &[f64]) -> bool {
        self.variant == Variant::Ring && dist2(x, &self.x1) < 0.25
    }

    pub fn eval_u(&self, x: &[f64]) -> f64 {
        if self.in_ring_hole(x) {
            return self.eta();
        }
        let mut u = self.v(x);
        for c in self.mountains() {
            let y: Vec<f64> = x.iter().zip(c).map(|(a, b)| a - b).collect();
            u += self.w(&y);
        }
        for b in &self.bumps {
            u += b.value(x);
        }
        u.max(0.0)
    }

    pub fn eval_grad_u(&self, x: &[f64]) -> Vec<f64> {
        if self.in_ring_hole(x) {
            return vec![0.0; x.len()];
        }
        let mut g = self.grad_v(x);
        for c in self.mountains() {
            let y: Vec<f64> = x.iter().zip(c).map(|(a, b)| a - b).collect();
            for (gi, wi) in g.iter_mut().zip(self.grad_w(&y)) {
                *gi += wi;
            }
        }
        for b in &self.bumps {
            for (gi, bi) in g.iter_mut().zip(b.gradient(x)) {
                *gi += bi;
            }
        }
        g
    }

    /// The source term, for `z ∈ [0, 2]`.
    pub fn eval_f(&self, z: f64) -> Result<f64> {
        if !(0.0..=2.0).contains(&z) {
            return Err(Error::OutOfDomain {
                value: z,
                lo: 0.0,
                hi: 2.0,
            });
        }
        let (p, s, n) = (self.p, self.s, self.dim as f64);
        let common = 2.0 * p * s - 2.0 * s - p + n;
        let tail = p - p / s - 1.0;
        if z <= 1.0 {
            let a = (1.0 - z).powf(1.0 / s);
            Ok((2.0 * s / 11.0).powf(p - 1.0)
                * (25.0 + 11.0 * a).powf(p / 2.0 - 1.0)
                * (1.0 - z).powf(tail)
                * (50.0 / 11.0 * (p - 1.0) * (s - 1.0) + common * a))
        } else {
            let b = (z - 1.0).powf(1.0 / s);
            Ok((2.0 * s).powf(p - 1.0)
                * (1.0 - b).powf(p / 2.0 - 1.0)
                * (z - 1.0).powf(tail)
                * (-2.0 * (s - 1.0) * (p - 1.0) + common * b))
        }
    }

    /// `f` extended by its endpoint values outside `[0, 2]`, for use inside
    /// quadratures that may probe slightly past the range.
    pub fn source(&self) -> impl Fn(f64) -> f64 + Send + Sync + 'static {
        let e = self.clone();
        move |z: f64| e.eval_f(z.clamp(0.0, 2.0)).unwrap_or(0.0)
    }

    /// Upper bound for `|∇u|`.
    pub fn lipschitz_bound(&self) -> f64 {
        let s = self.s;
        let outer = 12.0 * s / 11.0;
        let rho2 = 1.0 / (2.0 * s - 1.0);
        let mountain = 2.0 * s * rho2.sqrt() * (1.0 - rho2).powf(s - 1.0);
        let overlap = self
            .mountains()
            .iter()
            .any(|c| norm(c) + 1.0 > 5.0);
        let mut l = if overlap {
            outer + mountain
        } else {
            outer.max(mountain)
        };
        l += self.bumps.iter().map(Bump::max_gradient).sum::<f64>();
        l
    }

    pub fn sample(&self, n: usize) -> Result<SampledGridFunction> {
        self.sample_with_cap(n, DEFAULT_SAMPLE_CAP)
    }

    /// Samples `u` on `n^N` nodes covering `[−6.5, 6.5]^N`.
    pub fn sample_with_cap(&self, n: usize, cap: usize) -> Result<SampledGridFunction> {
        self.validate_geometry()?;
        if n < 16 {
            return Err(Error::InvalidParameter(format!("need n >= 16, got {n}")));
        }
        let requested = (n as u128)
            .checked_pow(self.dim as u32)
            .map(|v| v * self.dim as u128)
            .unwrap_or(u128::MAX);
        if requested > cap as u128 {
            return Err(Error::ResourceGuard {
                requested: requested.min(usize::MAX as u128) as usize,
                cap,
            });
        }
        let geom = GridGeometry::cube(self.dim, n, -BOX_HALF_WIDTH, BOX_HALF_WIDTH)?;
        SampledGridFunction::from_fn(geom, Some(self.lipschitz_bound()), |x| self.eval_u(x))
    }
}

impl ScalarField for ExemplarParams {
    fn dim(&self) -> usize {
        self.dim
    }

    fn value(&self, x: &[f64]) -> f64 {
        self.eval_u(x)
    }

    fn gradient(&self, x: &[f64]) -> Vec<f64> {
        self.eval_grad_u(x)
    }
}
