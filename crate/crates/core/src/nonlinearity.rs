//! The nonlinearity pair `(g, f)` of `-div(g(|∇u|) ∇u/|∇u|) = f(u)` and the
//! derived functions `G(z) = ∫_0^z g` and `h(z) = z g(z) − G(z)`.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};

type ScalarFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

const TABLE_NODES: usize = 4096;
const QUAD_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Kind {
    /// `g(z) = z^{p−1}`.
    PLaplacian { p: f64 },
    /// `g(z) = z/√(1+z²)`.
    MeanCurvature,
    /// User `g`; `G` from quadrature.
    Custom,
}

#[derive(Clone)]
struct Table {
    z_max: f64,
    step: f64,
    values: Vec<f64>,
}

#[derive(Clone)]
pub struct NonlinearityPair {
    kind: Kind,
    g: ScalarFn,
    f: ScalarFn,
    f_jumps: Vec<f64>,
    table: Option<Arc<Table>>,
}

impl fmt::Debug for NonlinearityPair {
    fn fmt(&self, fm: &mut fmt::Formatter<'_>) -> fmt::Result {
        fm.debug_struct("NonlinearityPair")
            .field("kind", &self.kind)
            .field("f_jumps", &self.f_jumps)
            .finish()
    }
}

fn simpson(a: f64, b: f64, fa: f64, fm: f64, fb: f64) -> f64 {
    (b - a) / 6.0 * (fa + 4.0 * fm + fb)
}

fn adaptive(g: &dyn Fn(f64) -> f64, a: f64, b: f64, fa: f64, fm: f64, fb: f64, whole: f64, tol: f64, depth: u32) -> f64 {
    let m = 0.5 * (a + b);
    let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
    let (flm, frm) = (g(lm), g(rm));
    let left = simpson(a, m, fa, flm, fm);
    let right = simpson(m, b, fm, frm, fb);
    let delta = left + right - whole;
    if depth == 0 || delta.abs() <= 15.0 * tol {
        return left + right + delta / 15.0;
    }
    adaptive(g, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)
        + adaptive(g, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)
}

/// Adaptive Simpson quadrature of `g` on `[a, b]` to absolute tolerance `tol`.
pub fn integrate(g: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    if b == a {
        return 0.0;
    }
    let (fa, fm, fb) = (g(a), g(0.5 * (a + b)), g(b));
    let whole = simpson(a, b, fa, fm, fb);
    adaptive(g, a, b, fa, fm, fb, whole, tol, 40)
}

impl NonlinearityPair {
    /// `p`-Laplacian, `p > 1`.
    pub fn p_laplacian<F>(p: f64, f: F) -> Result<Self>
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        if !(p > 1.0) || !p.is_finite() {
            return Err(Error::InvalidParameter(format!("p must exceed 1, got {p}")));
        }
        Ok(NonlinearityPair {
            kind: Kind::PLaplacian { p },
            g: Arc::new(move |z: f64| z.powf(p - 1.0)),
            f: Arc::new(f),
            f_jumps: Vec::new(),
            table: None,
        })
    }

    pub fn mean_curvature<F>(f: F) -> Self
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        NonlinearityPair {
            kind: Kind::MeanCurvature,
            g: Arc::new(|z: f64| z / (1.0 + z * z).sqrt()),
            f: Arc::new(f),
            f_jumps: Vec::new(),
            table: None,
        }
    }

    /// Custom `g`, checked for `g(0) = 0` and strict increase on `[0, z_max]`.
    /// `G` is tabulated on `[0, z_max]` and interpolated linearly.
    pub fn custom<Gf, F>(g: Gf, f: F, z_max: f64) -> Result<Self>
    where
        Gf: Fn(f64) -> f64 + Send + Sync + 'static,
        F: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        if !(z_max > 0.0) || !z_max.is_finite() {
            return Err(Error::InvalidParameter(format!("z_max must be positive, got {z_max}")));
        }
        if g(0.0) != 0.0 {
            return Err(Error::InvalidParameter("g(0) must be 0".into()));
        }
        let probes = 1000;
        let mut prev = 0.0;
        for k in 1..=probes {
            let v = g(z_max * k as f64 / probes as f64);
            if !(v > prev) || !v.is_finite() {
                return Err(Error::InvalidParameter(
                    "g must be strictly increasing".into(),
                ));
            }
            prev = v;
        }
        let step = z_max / (TABLE_NODES - 1) as f64;
        let mut values = Vec::with_capacity(TABLE_NODES);
        values.push(0.0);
        let tol = QUAD_TOL / TABLE_NODES as f64;
        for k in 1..TABLE_NODES {
            let a = step * (k - 1) as f64;
            let last = values[k - 1];
            values.push(last + integrate(&g, a, a + step, tol));
        }
        Ok(NonlinearityPair {
            kind: Kind::Custom,
            g: Arc::new(g),
            f: Arc::new(f),
            f_jumps: Vec::new(),
            table: Some(Arc::new(Table { z_max, step, values })),
        })
    }

    /// Records the jump points of `f`, for exclusion from pointwise checks.
    pub fn with_jumps(mut self, mut jumps: Vec<f64>) -> Self {
        jumps.sort_by(f64::total_cmp);
        self.f_jumps = jumps;
        self
    }

    pub fn kind(&self) -> Kind {
        self.kind
    }

    pub fn f_jumps(&self) -> &[f64] {
        &self.f_jumps
    }

    pub fn g(&self, z: f64) -> f64 {
        (self.g)(z)
    }

    pub fn f(&self, z: f64) -> f64 {
        (self.f)(z)
    }

    /// `g(z)/z`, continued to `z = 0` by its limit.
    pub fn flux_coefficient(&self, z: f64) -> f64 {
        match self.kind {
            Kind::PLaplacian { p } => {
                if p == 2.0 {
                    1.0
                } else if z == 0.0 {
                    if p < 2.0 { f64::INFINITY } else { 0.0 }
                } else {
                    z.powf(p - 2.0)
                }
            }
            Kind::MeanCurvature => 1.0 / (1.0 + z * z).sqrt(),
            Kind::Custom => {
                let z = z.max(1e-12);
                self.g(z) / z
            }
        }
    }

    /// `G(z) = ∫_0^z g`.
    pub fn big_g(&self, z: f64) -> f64 {
        match self.kind {
            Kind::PLaplacian { p } => z.powf(p) / p,
            Kind::MeanCurvature => (1.0 + z * z).sqrt() - 1.0,
            Kind::Custom => {
                let t = self.table.as_ref().expect("custom pair has a table");
                if z >= t.z_max {
                    let top = *t.values.last().unwrap();
                    return top + integrate(&*self.g, t.z_max, z, QUAD_TOL);
                }
                let x = z / t.step;
                let k = (x.floor() as usize).min(TABLE_NODES - 2);
                let theta = x - k as f64;
                t.values[k] + theta * (t.values[k + 1] - t.values[k])
            }
        }
    }

    /// `h(z) = z g(z) − G(z)`.
    pub fn h(&self, z: f64) -> f64 {
        match self.kind {
            Kind::PLaplacian { p } => z.powf(p) * (p - 1.0) / p,
            _ => z * self.g(z) - self.big_g(z),
        }
    }

    /// Midpoint convexity of `G` and monotonicity of `h` on `[0, z_max]`.
    pub fn validate(&self, z_max: f64) -> Result<()> {
        let n = 512;
        let dz = z_max / n as f64;
        for k in 1..n {
            let (a, b) = (dz * (k - 1) as f64, dz * (k + 1) as f64);
            let mid = self.big_g(0.5 * (a + b));
            let chord = 0.5 * (self.big_g(a) + self.big_g(b));
            if mid > chord + 1e-9 * (1.0 + chord.abs()) {
                return Err(Error::InvalidParameter(format!("G is not convex near {}", 0.5 * (a + b))));
            }
            let (ha, hb) = (self.h(dz * (k - 1) as f64), self.h(dz * k as f64));
            if hb < ha - 1e-9 * (1.0 + ha.abs()) {
                return Err(Error::InvalidParameter(format!("h decreases near {}", dz * k as f64)));
            }
        }
        Ok(())
    }
}
