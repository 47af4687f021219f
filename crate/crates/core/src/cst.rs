//! Continuous Steiner symmetrization of sampled functions.
//!
//! Each 1D section along the symmetrization axis is treated as a
//! piecewise-linear profile. Its superlevel sets are exact finite unions of
//! open intervals; these are evolved with [`IntervalUnion::evolve`] and the
//! symmetrized section is rebuilt from the evolved level sets (layer-cake
//! reconstruction) on a ladder of levels.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::grid::{GridGeometry, SampledGridFunction};
use crate::interval::{Interval, IntervalUnion, Openness};

/// Piecewise-linear restriction of a function to one line.
#[derive(Debug, Clone, PartialEq)]
pub struct SectionProfile {
    coordinates: Vec<f64>,
    heights: Vec<f64>,
}

impl SectionProfile {
    pub fn new(coordinates: Vec<f64>, heights: Vec<f64>) -> Result<Self> {
        if coordinates.len() != heights.len() || coordinates.len() < 2 {
            return Err(Error::InvalidParameter(
                "a profile needs at least two breakpoints with one height each".into(),
            ));
        }
        if coordinates.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(Error::InvalidParameter(
                "profile breakpoints must be strictly increasing".into(),
            ));
        }
        if heights.iter().any(|h| !(*h >= 0.0) || !h.is_finite()) {
            return Err(Error::InvalidParameter(
                "profile heights must be finite and nonnegative".into(),
            ));
        }
        if heights[0] != 0.0 || *heights.last().unwrap() != 0.0 {
            return Err(Error::InvalidParameter(
                "profile must vanish at both ends".into(),
            ));
        }
        Ok(SectionProfile {
            coordinates,
            heights,
        })
    }

    pub fn coordinates(&self) -> &[f64] {
        &self.coordinates
    }

    pub fn heights(&self) -> &[f64] {
        &self.heights
    }

    pub fn max_height(&self) -> f64 {
        self.heights.iter().cloned().fold(0.0, f64::max)
    }

    pub fn is_zero(&self) -> bool {
        self.heights.iter().all(|&h| h == 0.0)
    }

    /// Piecewise-linear evaluation, zero outside the breakpoint range.
    pub fn eval(&self, x: f64) -> f64 {
        let xs = &self.coordinates;
        if !(x >= xs[0]) || x > *xs.last().unwrap() {
            return 0.0;
        }
        let k = xs.partition_point(|&c| c <= x);
        if k >= xs.len() {
            return *self.heights.last().unwrap();
        }
        let (x0, x1) = (xs[k - 1], xs[k]);
        let (y0, y1) = (self.heights[k - 1], self.heights[k]);
        y0 + (y1 - y0) * (x - x0) / (x1 - x0)
    }

    /// Slope of the segment containing `x`; zero outside the breakpoint range.
    /// At a breakpoint the segment to the right is used.
    pub fn slope(&self, x: f64) -> f64 {
        let xs = &self.coordinates;
        if !(x >= xs[0]) || x >= *xs.last().unwrap() {
            return 0.0;
        }
        let k = xs.partition_point(|&c| c <= x);
        (self.heights[k] - self.heights[k - 1]) / (xs[k] - xs[k - 1])
    }

    /// Evaluates at sorted sample positions in one pass.
    pub fn eval_sorted(&self, xs: &[f64]) -> Vec<f64> {
        let mut out = Vec::with_capacity(xs.len());
        let c = &self.coordinates;
        let mut k = 1;
        for &x in xs {
            if x < c[0] || x > *c.last().unwrap() {
                out.push(0.0);
                continue;
            }
            while k < c.len() - 1 && c[k] < x {
                k += 1;
            }
            let (x0, x1) = (c[k - 1], c[k]);
            let (y0, y1) = (self.heights[k - 1], self.heights[k]);
            let theta = if x1 > x0 { (x - x0) / (x1 - x0) } else { 1.0 };
            out.push(y0 + (y1 - y0) * theta.clamp(0.0, 1.0));
        }
        out
    }

    /// Measure of `{p > c}` (`strict`) or `{p ≥ c}`.
    pub fn measure_above(&self, c: f64, strict: bool) -> f64 {
        let mut total = 0.0;
        for k in 0..self.coordinates.len() - 1 {
            let (xa, xb) = (self.coordinates[k], self.coordinates[k + 1]);
            let (ya, yb) = (self.heights[k], self.heights[k + 1]);
            let above = |y: f64| if strict { y > c } else { y >= c };
            if ya == yb {
                if above(ya) {
                    total += xb - xa;
                }
                continue;
            }
            let (lo, hi) = if ya < yb { (ya, yb) } else { (yb, ya) };
            if c <= lo {
                total += xb - xa;
            } else if c < hi {
                total += (xb - xa) * (hi - c) / (hi - lo);
            }
        }
        total
    }
}

/// Strictly increasing levels `0 < c_1 < … < c_M` below the supremum.
#[derive(Debug, Clone, PartialEq)]
pub struct LevelLadder {
    levels: Vec<f64>,
}

/// Default ladder size.
pub const DEFAULT_LEVELS: usize = 256;

impl LevelLadder {
    pub fn new(levels: Vec<f64>) -> Result<Self> {
        if levels.iter().any(|c| !(*c > 0.0) || !c.is_finite()) {
            return Err(Error::InvalidParameter("ladder levels must be positive".into()));
        }
        if levels.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(Error::InvalidParameter(
                "ladder levels must be strictly increasing".into(),
            ));
        }
        Ok(LevelLadder { levels })
    }

    /// `M` equally spaced levels `sup·k/(M+1)`, `k = 1..=M`.
    pub fn uniform(sup: f64, count: usize) -> Result<Self> {
        if count == 0 {
            return Err(Error::InvalidParameter("ladder needs at least one level".into()));
        }
        if !(sup >= 0.0) || !sup.is_finite() {
            return Err(Error::InvalidParameter(format!("invalid supremum {sup}")));
        }
        if sup == 0.0 {
            return Ok(LevelLadder { levels: Vec::new() });
        }
        let step = sup / (count + 1) as f64;
        LevelLadder::new((1..=count).map(|k| step * k as f64).collect())
    }

    pub fn for_function(u: &SampledGridFunction, count: usize) -> Result<Self> {
        LevelLadder::uniform(u.sup(), count)
    }

    pub fn levels(&self) -> &[f64] {
        &self.levels
    }

    pub fn len(&self) -> usize {
        self.levels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.levels.is_empty()
    }

    /// Sup-norm quantization bound of the layer-cake reconstruction.
    pub fn quantization(&self) -> f64 {
        match self.levels.len() {
            0 => 0.0,
            1 => self.levels[0],
            n => self.levels[n - 1] / n as f64,
        }
    }
}

/// The open set `{p > c}` as a finite union of open intervals.
///
/// A level that coincides with a breakpoint height is nudged one ulp down, so
/// plateaus at that height are included.
pub fn superlevel_set(p: &SectionProfile, c: f64) -> IntervalUnion {
    let c = if p.heights.contains(&c) {
        c.next_down()
    } else {
        c
    };
    raw_superlevel(p, c)
}

fn raw_superlevel(p: &SectionProfile, c: f64) -> IntervalUnion {
    let xs = &p.coordinates;
    let ys = &p.heights;
    let mut out = Vec::new();
    let mut start: Option<f64> = None;
    for k in 0..xs.len() {
        let inside = ys[k] > c;
        match (start, inside) {
            (None, true) => {
                // entered between k-1 and k (ends are zero, so k > 0)
                let (x0, x1, y0, y1) = (xs[k - 1], xs[k], ys[k - 1], ys[k]);
                start = Some(x0 + (c - y0) / (y1 - y0) * (x1 - x0));
            }
            (Some(lo), false) => {
                let (x0, x1, y0, y1) = (xs[k - 1], xs[k], ys[k - 1], ys[k]);
                let hi = x0 + (y0 - c) / (y0 - y1) * (x1 - x0);
                if hi > lo {
                    out.push(Interval {
                        center: 0.5 * (lo + hi),
                        half_length: 0.5 * (hi - lo),
                    });
                }
                start = None;
            }
            _ => {}
        }
    }
    IntervalUnion::from_sorted_unchecked(out, Openness::Open)
}

/// Layer-cake reconstruction of `T_t` applied to one section.
///
/// The levels are those of the ladder below the section maximum plus the
/// heights of the section's plateaus.
/// Every evolved level set contributes its endpoints at its own height; the
/// evolved support contributes its endpoints at height zero. The result is
/// the piecewise-linear interpolant through these points, which lies within
/// one ladder step of the upper step envelope everywhere.
pub fn cst_section(p: &SectionProfile, t: f64, ladder: &LevelLadder) -> Result<SectionProfile> {
    if t.is_nan() || t < 0.0 {
        return Err(Error::InvalidTime(t));
    }
    if p.is_zero() {
        return Ok(p.clone());
    }
    let mut points: Vec<(f64, f64)> = Vec::new();
    let support = raw_superlevel(p, 0.0).evolve(t)?;
    for iv in support.intervals() {
        points.push((iv.lo(), 0.0));
        points.push((iv.hi(), 0.0));
    }
    let top = p.max_height();
    // plateau heights join the ladder, so flat parts are reproduced exactly
    let mut levels: Vec<f64> = ladder.levels().iter().cloned().filter(|&c| c < top).collect();
    levels.extend(
        p.heights
            .windows(2)
            .filter(|w| w[0] == w[1] && w[0] > 0.0)
            .map(|w| w[0]),
    );
    levels.sort_by(f64::total_cmp);
    levels.dedup();
    for c in levels {
        let set = superlevel_set(p, c).evolve(t)?;
        for iv in set.intervals() {
            points.push((iv.lo(), c));
            points.push((iv.hi(), c));
        }
    }
    Ok(profile_through(points, p.coordinates[0], *p.coordinates.last().unwrap()))
}

/// Builds a valid profile through `(x, height)` points, padding with zero
/// ends that cover `[lo, hi]`.
fn profile_through(mut points: Vec<(f64, f64)>, lo: f64, hi: f64) -> SectionProfile {
    points.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)));
    let min_x = points.first().map_or(lo, |p| p.0);
    let max_x = points.last().map_or(hi, |p| p.0);
    let mut xs = Vec::with_capacity(points.len() + 2);
    let mut ys = Vec::with_capacity(points.len() + 2);
    xs.push(lo.min(min_x));
    ys.push(0.0);
    for (x, y) in points {
        let last = *xs.last().unwrap();
        if x <= last {
            if y == *ys.last().unwrap() {
                continue;
            }
            xs.push(last.next_up());
        } else {
            xs.push(x);
        }
        ys.push(y);
    }
    let last = *xs.last().unwrap();
    if *ys.last().unwrap() != 0.0 || hi > last {
        xs.push(if hi > last { hi } else { last.next_up() });
        ys.push(0.0);
    }
    if max_x > hi && *ys.last().unwrap() != 0.0 {
        xs.push(xs.last().unwrap().next_up());
        ys.push(0.0);
    }
    SectionProfile {
        coordinates: xs,
        heights: ys,
    }
}

/// Exact Steiner symmetrization (`t = ∞`) of a piecewise-linear profile, built
/// from the distribution function at the breakpoint heights.
pub fn steiner_section(p: &SectionProfile) -> SectionProfile {
    let lo = p.coordinates[0];
    let hi = *p.coordinates.last().unwrap();
    if p.is_zero() {
        return p.clone();
    }
    let mut heights: Vec<f64> = p.heights.iter().cloned().filter(|&h| h > 0.0).collect();
    heights.sort_by(f64::total_cmp);
    heights.dedup();
    // (half-width, height) on the right half, from the support edge inward
    let mut right: Vec<(f64, f64)> = vec![(0.5 * p.measure_above(0.0, true), 0.0)];
    for &c in &heights {
        right.push((0.5 * p.measure_above(c, false), c));
        right.push((0.5 * p.measure_above(c, true), c));
    }
    let mut points: Vec<(f64, f64)> = Vec::with_capacity(2 * right.len());
    for &(r, c) in &right {
        points.push((-r, c));
        if r > 0.0 {
            points.push((r, c));
        }
    }
    profile_through(points, lo, hi)
}

fn check_time(t: f64) -> Result<()> {
    if t.is_nan() || t < 0.0 {
        return Err(Error::InvalidTime(t));
    }
    Ok(())
}

pub(crate) fn section_values(u: &SampledGridFunction, base: usize, axis: usize) -> Vec<f64> {
    let g = u.geometry();
    let stride = g.strides()[axis];
    (0..g.shape()[axis])
        .map(|i| u.values()[base + i * stride])
        .collect()
}

/// Applies `op` to every section along `axis` and writes the resampled
/// profiles back onto the grid. Sections run in parallel; the output does not
/// depend on scheduling.
fn map_sections<F>(u: &SampledGridFunction, axis: usize, op: F) -> Result<SampledGridFunction>
where
    F: Fn(&SectionProfile) -> Result<SectionProfile> + Sync,
{
    let g: &GridGeometry = u.geometry();
    g.check_axis(axis)?;
    let coords = g.axis_coordinates(axis);
    let (lo, hi) = (coords[0], *coords.last().unwrap());
    let bases = g.section_bases(axis);
    let sections: Vec<Option<Vec<f64>>> = bases
        .par_iter()
        .map(|&base| {
            let heights = section_values(u, base, axis);
            if heights.iter().all(|&v| v == 0.0) {
                return Ok(None);
            }
            let profile = SectionProfile::new(coords.clone(), heights)?;
            let out = op(&profile)?;
            let c = out.coordinates();
            let support_lo = c[out.heights().iter().position(|&h| h > 0.0).unwrap_or(0)];
            let support_hi = c[out.heights().iter().rposition(|&h| h > 0.0).unwrap_or(0)];
            if support_lo <= lo || support_hi >= hi {
                return Err(Error::SupportEscapesGrid { axis });
            }
            Ok(Some(out.eval_sorted(&coords)))
        })
        .collect::<Result<Vec<_>>>()?;

    let mut values = u.values().to_vec();
    let stride = g.strides()[axis];
    for (base, section) in bases.iter().zip(sections) {
        if let Some(vals) = section {
            for (i, v) in vals.into_iter().enumerate() {
                values[base + i * stride] = v;
            }
        }
    }
    Ok(SampledGridFunction::from_parts_unchecked(
        g.clone(),
        values,
        u.lipschitz_hint(),
    ))
}

/// The reconstructed profiles of `u^t` before resampling, one per section in
/// the order of [`GridGeometry::section_bases`]; `None` for zero sections.
pub fn cst_profiles(
    u: &SampledGridFunction,
    axis: usize,
    t: f64,
    ladder: &LevelLadder,
) -> Result<Vec<Option<SectionProfile>>> {
    check_time(t)?;
    let g = u.geometry();
    g.check_axis(axis)?;
    let coords = g.axis_coordinates(axis);
    g.section_bases(axis)
        .par_iter()
        .map(|&base| {
            let heights = section_values(u, base, axis);
            if heights.iter().all(|&v| v == 0.0) {
                return Ok(None);
            }
            let profile = SectionProfile::new(coords.clone(), heights)?;
            cst_section(&profile, t, ladder).map(Some)
        })
        .collect()
}

/// `u^t`: continuous Steiner symmetrization along `axis` at time `t ∈ [0, ∞]`.
pub fn cst(
    u: &SampledGridFunction,
    axis: usize,
    t: f64,
    ladder: &LevelLadder,
) -> Result<SampledGridFunction> {
    check_time(t)?;
    map_sections(u, axis, |p| cst_section(p, t, ladder))
}

/// `u^t` with a uniform ladder of `levels` levels below `sup u`.
pub fn cst_with_levels(
    u: &SampledGridFunction,
    axis: usize,
    t: f64,
    levels: usize,
) -> Result<SampledGridFunction> {
    let ladder = LevelLadder::for_function(u, levels)?;
    cst(u, axis, t, &ladder)
}

/// Steiner symmetrization `u*` along `axis`, exact for the piecewise-linear
/// interpolant of every section.
pub fn steiner_symmetrize(u: &SampledGridFunction, axis: usize) -> Result<SampledGridFunction> {
    map_sections(u, axis, |p| Ok(steiner_section(p)))
}

/// `T_γ^β[u] = min{β, (u − γ)₊}`.
pub fn truncate(u: &SampledGridFunction, gamma: f64, beta: f64) -> Result<SampledGridFunction> {
    if !(beta > gamma) || !(gamma >= 0.0) {
        return Err(Error::InvalidParameter(format!(
            "truncation needs beta > gamma >= 0, got gamma = {gamma}, beta = {beta}"
        )));
    }
    u.map(|v| (v - gamma).max(0.0).min(beta))
}

/// `(u − γ)₊`.
pub fn positive_part(u: &SampledGridFunction, gamma: f64) -> Result<SampledGridFunction> {
    truncate(u, gamma, f64::INFINITY)
}

/// Node mask of `{u^t > c}`, computed exactly as `T_t({u > c})` section by
/// section.
pub fn cst_superlevel_mask(
    u: &SampledGridFunction,
    axis: usize,
    t: f64,
    c: f64,
) -> Result<Vec<bool>> {
    check_time(t)?;
    let g = u.geometry();
    g.check_axis(axis)?;
    let coords = g.axis_coordinates(axis);
    let stride = g.strides()[axis];
    let bases = g.section_bases(axis);
    let sections: Vec<Option<Vec<bool>>> = bases
        .par_iter()
        .map(|&base| {
            let heights = section_values(u, base, axis);
            if heights.iter().all(|&v| v <= c) {
                return Ok(None);
            }
            let profile = SectionProfile::new(coords.clone(), heights)?;
            let set = superlevel_set(&profile, c).evolve(t)?;
            Ok(Some(coords.iter().map(|&x| set.contains(x)).collect()))
        })
        .collect::<Result<Vec<_>>>()?;
    let mut mask = vec![false; u.values().len()];
    for (base, section) in bases.iter().zip(sections) {
        if let Some(m) = section {
            for (i, inside) in m.into_iter().enumerate() {
                mask[base + i * stride] = inside;
            }
        }
    }
    Ok(mask)
}
