//! Continuous symmetrization `T_t` of finite unions of intervals.
//!
//! Every component interval keeps its half-length while its center decays as
//! `c·e^{-t}`. Two neighbours that touch are replaced by the interval spanning
//! their union, which then continues to decay toward the origin. Because all
//! centers contract by the same factor, each cluster can be described by an
//! *anchor*: the center it would have had at `t = 0`. The center at time `t` is
//! `anchor·e^{-t}`, and the gap-closing time between neighbours has the closed
//! form `ln((a_R - a_L) / (R_L + R_R))`.

use crate::error::{Error, Result};

/// A closed or open interval `[center - half_length, center + half_length]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval {
    pub center: f64,
    pub half_length: f64,
}

impl Interval {
    pub fn new(center: f64, half_length: f64) -> Result<Self> {
        if !center.is_finite() || !half_length.is_finite() || half_length < 0.0 {
            return Err(Error::InvalidInterval {
                center,
                half_length,
            });
        }
        Ok(Interval {
            center,
            half_length,
        })
    }

    pub fn from_endpoints(lo: f64, hi: f64) -> Result<Self> {
        if !(lo <= hi) {
            return Err(Error::InvalidInterval {
                center: 0.5 * (lo + hi),
                half_length: 0.5 * (hi - lo),
            });
        }
        Interval::new(0.5 * (lo + hi), 0.5 * (hi - lo))
    }

    #[inline]
    pub fn lo(&self) -> f64 {
        self.center - self.half_length
    }

    #[inline]
    pub fn hi(&self) -> f64 {
        self.center + self.half_length
    }

    #[inline]
    pub fn length(&self) -> f64 {
        2.0 * self.half_length
    }

    /// The single-interval law `[x e^{-t} - R, x e^{-t} + R]`.
    pub fn evolve(&self, t: f64) -> Interval {
        let center = if t.is_infinite() {
            0.0
        } else {
            self.center * (-t).exp()
        };
        Interval {
            center,
            half_length: self.half_length,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Openness {
    Open,
    Compact,
}

/// Two neighbouring components that merge at `time`. Indices refer to the
/// component list as it stood immediately before the merge.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MergeEvent {
    pub time: f64,
    pub left_index: usize,
    pub right_index: usize,
}

/// A finite union of pairwise disjoint intervals, sorted by center.
#[derive(Debug, Clone, PartialEq)]
pub struct IntervalUnion {
    intervals: Vec<Interval>,
    openness: Openness,
}

fn check_time(t: f64) -> Result<()> {
    if t.is_nan() || t < 0.0 {
        return Err(Error::InvalidTime(t));
    }
    Ok(())
}

fn check_disjoint(left: &Interval, right: &Interval) -> Result<()> {
    if left.hi() > right.lo() {
        return Err(Error::Overlap {
            left_lo: left.lo(),
            left_hi: left.hi(),
            right_lo: right.lo(),
            right_hi: right.hi(),
        });
    }
    Ok(())
}

/// Closed-form time at which `left` and `right` first touch under `T_t`.
///
/// Returns `Some(0.0)` for touching intervals and `None` when both have zero
/// length (two points only meet in the limit `t = ∞`).
pub fn collision_time(left: &Interval, right: &Interval) -> Result<Option<f64>> {
    if left.center > right.center {
        return collision_time(right, left);
    }
    check_disjoint(left, right)?;
    Ok(gap_closing_time(
        left.center,
        left.half_length,
        right.center,
        right.half_length,
    ))
}

#[inline]
fn gap_closing_time(a_left: f64, h_left: f64, a_right: f64, h_right: f64) -> Option<f64> {
    let reach = h_left + h_right;
    if reach <= 0.0 {
        return None;
    }
    let ratio = (a_right - a_left) / reach;
    if ratio <= 1.0 {
        Some(0.0)
    } else {
        Some(ratio.ln())
    }
}

#[derive(Debug, Clone, Copy)]
struct Cluster {
    anchor: f64,
    half: f64,
}

impl IntervalUnion {
    /// Builds a union from arbitrary-order intervals. Overlaps are rejected;
    /// touching neighbours are accepted. Zero-length intervals are dropped
    /// from open unions.
    pub fn new(mut intervals: Vec<Interval>, openness: Openness) -> Result<Self> {
        for iv in &intervals {
            Interval::new(iv.center, iv.half_length)?;
        }
        if openness == Openness::Open {
            intervals.retain(|iv| iv.half_length > 0.0);
        }
        intervals.sort_by(|a, b| {
            a.center
                .total_cmp(&b.center)
                .then(a.half_length.total_cmp(&b.half_length))
        });
        for pair in intervals.windows(2) {
            check_disjoint(&pair[0], &pair[1])?;
        }
        Ok(IntervalUnion {
            intervals,
            openness,
        })
    }

    pub fn empty(openness: Openness) -> Self {
        IntervalUnion {
            intervals: Vec::new(),
            openness,
        }
    }

    pub fn from_endpoints(pairs: &[(f64, f64)], openness: Openness) -> Result<Self> {
        let intervals = pairs
            .iter()
            .map(|&(lo, hi)| Interval::from_endpoints(lo, hi))
            .collect::<Result<Vec<_>>>()?;
        IntervalUnion::new(intervals, openness)
    }

    /// Internal constructor for already sorted, disjoint input.
    pub(crate) fn from_sorted_unchecked(intervals: Vec<Interval>, openness: Openness) -> Self {
        debug_assert!(intervals.windows(2).all(|w| w[0].hi() <= w[1].lo() + 1e-9));
        IntervalUnion {
            intervals,
            openness,
        }
    }

    pub fn intervals(&self) -> &[Interval] {
        &self.intervals
    }

    pub fn openness(&self) -> Openness {
        self.openness
    }

    pub fn len(&self) -> usize {
        self.intervals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.intervals.is_empty()
    }

    pub fn measure(&self) -> f64 {
        self.intervals.iter().map(Interval::length).sum()
    }

    pub fn endpoints(&self) -> Vec<(f64, f64)> {
        self.intervals.iter().map(|iv| (iv.lo(), iv.hi())).collect()
    }

    pub fn contains(&self, x: f64) -> bool {
        // Sorted and disjoint, so the last interval starting at or before x
        // is the only candidate.
        let idx = self.intervals.partition_point(|iv| iv.lo() <= x);
        if idx == 0 {
            return false;
        }
        let iv = &self.intervals[idx - 1];
        match self.openness {
            Openness::Open => x > iv.lo() && x < iv.hi(),
            Openness::Compact => x >= iv.lo() && x <= iv.hi(),
        }
    }

    /// Component-wise containment: every component of `self` lies inside a
    /// component of `other`, up to `tol` at the endpoints.
    pub fn is_subset_of(&self, other: &IntervalUnion, tol: f64) -> bool {
        self.intervals.iter().all(|a| {
            other
                .intervals
                .iter()
                .any(|b| b.lo() <= a.lo() + tol && a.hi() <= b.hi() + tol)
        })
    }

    /// Lebesgue measure of the intersection with `other`.
    pub fn intersection_measure(&self, other: &IntervalUnion) -> f64 {
        let (a, b) = (&self.intervals, &other.intervals);
        let (mut i, mut j) = (0, 0);
        let mut total = 0.0;
        while i < a.len() && j < b.len() {
            let lo = a[i].lo().max(b[j].lo());
            let hi = a[i].hi().min(b[j].hi());
            if hi > lo {
                total += hi - lo;
            }
            if a[i].hi() < b[j].hi() {
                i += 1;
            } else {
                j += 1;
            }
        }
        total
    }

    /// Measure of the symmetric difference with `other`.
    pub fn symmetric_difference_measure(&self, other: &IntervalUnion) -> f64 {
        self.measure() + other.measure() - 2.0 * self.intersection_measure(other)
    }

    /// Steiner symmetrization: the centered interval of equal measure.
    pub fn steiner(&self) -> IntervalUnion {
        let m = self.measure();
        if self.intervals.is_empty() {
            return IntervalUnion::empty(self.openness);
        }
        if m == 0.0 && self.openness == Openness::Open {
            return IntervalUnion::empty(self.openness);
        }
        IntervalUnion {
            intervals: vec![Interval {
                center: 0.0,
                half_length: 0.5 * m,
            }],
            openness: self.openness,
        }
    }

    /// `T_t(M)` for `t ∈ [0, ∞]`.
    pub fn evolve(&self, t: f64) -> Result<IntervalUnion> {
        self.evolve_with_events(t).map(|(u, _)| u)
    }

    /// `T_t(M)` together with the merge events that occurred in `[0, t]`.
    pub fn evolve_with_events(&self, t: f64) -> Result<(IntervalUnion, Vec<MergeEvent>)> {
        check_time(t)?;
        if t.is_infinite() {
            return Ok((self.steiner(), Vec::new()));
        }
        if t == 0.0 || self.intervals.len() <= 1 {
            let out = self.intervals.iter().map(|iv| iv.evolve(t)).collect();
            return Ok((
                IntervalUnion::from_sorted_unchecked(out, self.openness),
                Vec::new(),
            ));
        }

        let mut clusters: Vec<Cluster> = self
            .intervals
            .iter()
            .map(|iv| Cluster {
                anchor: iv.center,
                half: iv.half_length,
            })
            .collect();
        let mut events = Vec::new();
        let mut now = 0.0_f64;

        loop {
            // Earliest gap closing; ties resolve to the leftmost pair.
            let mut next: Option<(f64, usize)> = None;
            for (k, pair) in clusters.windows(2).enumerate() {
                if let Some(tc) =
                    gap_closing_time(pair[0].anchor, pair[0].half, pair[1].anchor, pair[1].half)
                {
                    let tc = tc.max(now);
                    if next.is_none_or(|(best, _)| tc < best) {
                        next = Some((tc, k));
                    }
                }
            }
            let Some((tc, k)) = next else { break };
            if tc > t {
                break;
            }
            let (l, r) = (clusters[k], clusters[k + 1]);
            let half = l.half + r.half;
            // The span of the union at the moment of contact has midpoint equal
            // to the length-weighted mean of the two centers.
            let anchor = (l.anchor * l.half + r.anchor * r.half) / half;
            clusters[k] = Cluster { anchor, half };
            clusters.remove(k + 1);
            events.push(MergeEvent {
                time: tc,
                left_index: k,
                right_index: k + 1,
            });
            now = tc;
        }

        let decay = (-t).exp();
        let out = clusters
            .iter()
            .map(|c| Interval {
                center: c.anchor * decay,
                half_length: c.half,
            })
            .collect();
        Ok((IntervalUnion::from_sorted_unchecked(out, self.openness), events))
    }
}
