//! Upper envelopes of families of traced sub-curves.
//!
//! Power-splitting regions are unions over a swept parameter of
//! sub-regions, each traced as its own rate-energy curve. The union's
//! boundary is sampled on a shared energy grid: at each grid energy the
//! envelope keeps the best rate any sub-curve attains there. Sub-curves
//! are piecewise-linear in between their own samples, which slightly
//! under-reports a concave curve and therefore never overstates the
//! region.

/// One traced sub-curve: (energy, rate) samples sorted by energy.
#[derive(Debug, Clone, Default)]
pub(crate) struct SubCurve {
    points: Vec<(f64, f64)>,
}

impl SubCurve {
    pub fn new(mut points: Vec<(f64, f64)>) -> Self {
        points.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
        points.dedup_by(|next, prev| {
            if (next.0 - prev.0).abs() <= 1e-12 * prev.0.abs().max(1.0) {
                prev.1 = prev.1.max(next.1);
                true
            } else {
                false
            }
        });
        Self { points }
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Linear interpolation within the curve's energy support, `None`
    /// outside it (with a relative slack of 1e-9 at the ends).
    pub fn rate_at(&self, energy: f64) -> Option<f64> {
        let first = self.points.first()?;
        let last = self.points.last()?;
        let slack = 1e-9 * last.0.abs().max(1.0);
        if energy < first.0 - slack || energy > last.0 + slack {
            return None;
        }
        if energy <= first.0 {
            return Some(first.1);
        }
        if energy >= last.0 {
            return Some(last.1);
        }
        let idx = self.points.partition_point(|p| p.0 < energy);
        let (a, b) = (self.points[idx - 1], self.points[idx]);
        if b.0 - a.0 <= 0.0 {
            return Some(a.1.max(b.1));
        }
        let t = (energy - a.0) / (b.0 - a.0);
        Some(a.1 + t * (b.1 - a.1))
    }
}

/// Pointwise max of the sub-curves at each grid energy; `None` where no
/// curve reaches.
pub(crate) fn upper_envelope(curves: &[SubCurve], grid: &[f64]) -> Vec<Option<f64>> {
    grid.iter()
        .map(|&e| {
            curves
                .iter()
                .filter_map(|c| c.rate_at(e))
                .fold(None, |acc: Option<f64>, r| {
                    Some(acc.map_or(r, |a| a.max(r)))
                })
        })
        .collect()
}

/// Raise rates to the upper concave hull of the given (energy, rate)
/// samples, keeping the energy grid. Used for schemes whose region is
/// convex (time-sharing two operating points achieves every chord), where
/// the raw union of finitely traced sub-regions can dip below the
/// achievable boundary.
pub(crate) fn concave_majorant(points: &[(f64, f64)]) -> Vec<(f64, f64)> {
    if points.len() <= 2 {
        return points.to_vec();
    }
    // Andrew monotone chain, upper hull over energies (inputs sorted).
    let mut hull: Vec<(f64, f64)> = Vec::with_capacity(points.len());
    for &p in points {
        while hull.len() >= 2 {
            let a = hull[hull.len() - 2];
            let b = hull[hull.len() - 1];
            let cross = (b.0 - a.0) * (p.1 - a.1) - (p.0 - a.0) * (b.1 - a.1);
            if cross >= 0.0 {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(p);
    }
    // Evaluate the hull back on the original grid.
    let mut out = Vec::with_capacity(points.len());
    let mut seg = 0;
    for &(e, r) in points {
        while seg + 1 < hull.len() && hull[seg + 1].0 < e {
            seg += 1;
        }
        let value = if seg + 1 < hull.len() && hull[seg + 1].0 > hull[seg].0 {
            let (e0, r0) = hull[seg];
            let (e1, r1) = hull[seg + 1];
            let t = ((e - e0) / (e1 - e0)).clamp(0.0, 1.0);
            r0 + t * (r1 - r0)
        } else {
            hull[seg].1
        };
        out.push((e, value.max(r)));
    }
    out
}
