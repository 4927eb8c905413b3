//! Observables of blow-up runs: self-similar representations, semi-width,
//! front point, deviation norms and stability verdicts.

use crate::error::{Error, Result};
use crate::medium::{scaling_laws, MediumParams};
use crate::mesh::{interpolate, GridFunction};
use crate::scalar::Real;

/// Level below which a nodal value counts as zero when locating fronts.
pub const FRONT_THRESHOLD: f64 = 1e-12;

/// Reference nodes with `θ_s ≤ DEVIATION_CUTOFF·max θ_s` are ignored by the deviation norm.
pub const DEVIATION_CUTOFF: f64 = 1e-3;

/// One row of a run's time series. Undefined observables are NaN.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesRecord<T> {
    pub t: T,
    pub u_max: T,
    pub semi_width: T,
    pub front: T,
    pub x_edge: T,
    pub tau: T,
    pub n_nodes: usize,
    pub gamma: T,
    pub deviation: T,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct DiagnosticsSeries<T> {
    pub records: Vec<SeriesRecord<T>>,
    pub reference: Option<GridFunction<T>>,
}

impl<T: Real> DiagnosticsSeries<T> {
    pub fn new(reference: Option<GridFunction<T>>) -> Self {
        Self {
            records: Vec::new(),
            reference,
        }
    }

    pub fn push(&mut self, record: SeriesRecord<T>) {
        debug_assert!(self.records.last().is_none_or(|r| record.t > r.t));
        self.records.push(record);
    }

    pub fn last(&self) -> Option<&SeriesRecord<T>> {
        self.records.last()
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }
}

/// `Θ(t, ξ) = u(t, ξ·γ^{−m})/γ` on the reference grid, `γ = max u / max θ_s`.
pub fn ss_representation<T: Real>(
    x: &[T],
    u: &[T],
    reference: &GridFunction<T>,
    params: &MediumParams<T>,
) -> GridFunction<T> {
    let u_max = u.iter().copied().fold(T::zero(), T::max);
    let gamma = u_max / reference.max();
    let stretch = gamma.powf(-params.m());
    let values = reference
        .xi
        .iter()
        .map(|&xi| interpolate(x, u, xi * stretch).unwrap_or_else(T::zero) / gamma)
        .collect();
    GridFunction::new(reference.xi.clone(), values)
}

/// `Θ(t, ξ) = u(t, ξψ(t))/φ(t)` with the scalings of a known blow-up time
/// `t0`, on the nodes `x/ψ(t)`.
pub fn ss_representation_known_t0<T: Real>(
    x: &[T],
    u: &[T],
    t: T,
    params: &MediumParams<T>,
    t0: T,
) -> Result<GridFunction<T>> {
    let p = params.with_t0(t0)?;
    let s = scaling_laws(&p, t)?;
    Ok(GridFunction::new(
        x.iter().map(|&xi| xi / s.psi).collect(),
        u.iter().map(|&v| v / s.phi).collect(),
    ))
}

/// `max|Θ − θ_s| / max θ_s` over the reference nodes where `θ_s` exceeds
/// [`DEVIATION_CUTOFF`] of its maximum. `theta` is sampled on the reference grid.
pub fn deviation<T: Real>(theta: &[T], reference: &GridFunction<T>) -> T {
    let max = reference.max();
    let cut = T::lit(DEVIATION_CUTOFF) * max;
    theta
        .iter()
        .zip(&reference.values)
        .filter(|(_, &r)| r > cut)
        .map(|(&a, &b)| (a - b).abs())
        .fold(T::zero(), T::max)
        / max
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SemiWidth<T> {
    /// First crossing of the half level; `None` when it is never reached.
    pub value: Option<T>,
    /// Whether the profile is nonincreasing from the origin.
    pub monotone: bool,
}

/// Radius where `u` first falls to `u(0)/2`, by linear interpolation.
pub fn semi_width<T: Real>(x: &[T], u: &[T]) -> SemiWidth<T> {
    let monotone = u.windows(2).all(|w| w[1] <= w[0]);
    let half = u[0] / T::lit(2.0);
    let value = u.windows(2).zip(x.windows(2)).find_map(|(uw, xw)| {
        if uw[0] > half && uw[1] <= half {
            let s = (uw[0] - half) / (uw[0] - uw[1]);
            Some(xw[0] + s * (xw[1] - xw[0]))
        } else {
            None
        }
    });
    SemiWidth { value, monotone }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FrontPoint<T> {
    /// Largest node with `u > FRONT_THRESHOLD`.
    pub value: T,
    /// The following node; the true front lies in `[value, bracket]`.
    pub bracket: T,
    /// Set when the profile is positive up to the last interior node.
    pub saturated: bool,
}

/// Largest node with `u > FRONT_THRESHOLD`, bracketed by the next node; zero
/// for `u ≡ 0`.
pub fn front_point<T: Real>(x: &[T], u: &[T]) -> FrontPoint<T> {
    let delta = T::lit(FRONT_THRESHOLD);
    match u.iter().rposition(|&v| v > delta) {
        None => FrontPoint {
            value: T::zero(),
            bracket: T::zero(),
            saturated: false,
        },
        Some(i) => {
            let j = (i + 1).min(x.len() - 1);
            FrontPoint {
                value: x[i],
                bracket: x[j],
                saturated: i + 2 >= x.len(),
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum VerdictKind {
    StructurallyStable,
    Metastable,
    Divergent,
}

impl VerdictKind {
    pub fn as_str(self) -> &'static str {
        match self {
            VerdictKind::StructurallyStable => "structurally_stable",
            VerdictKind::Metastable => "metastable",
            VerdictKind::Divergent => "divergent",
        }
    }
}

impl std::fmt::Display for VerdictKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StabilityThresholds<T> {
    pub epsilon: T,
    pub gamma_hold: T,
    /// Required ratio of final to initial `γ`.
    pub min_growth: T,
    /// Allowed rise of the deviation over the last decade, relative to `epsilon`.
    pub noise: T,
}

impl<T: Real> Default for StabilityThresholds<T> {
    fn default() -> Self {
        Self {
            epsilon: T::lit(0.05),
            gamma_hold: T::lit(1e3),
            min_growth: T::lit(1e3),
            noise: T::lit(0.1),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StabilityVerdict<T> {
    pub kind: VerdictKind,
    /// Largest `γ` up to which the deviation stayed within `epsilon`.
    pub hold_until_gamma: T,
    pub final_deviation: T,
}

/// Classifies a run by its deviation history.
///
/// Structurally stable: over the last decade of `γ` the deviation stays within
/// `epsilon` and does not grow (up to `noise·epsilon`). Metastable: within
/// `epsilon` from the start until at least `gamma_hold`, then above it.
/// Divergent otherwise.
pub fn stability_verdict<T: Real>(
    series: &DiagnosticsSeries<T>,
    thresholds: &StabilityThresholds<T>,
) -> Result<StabilityVerdict<T>> {
    let recs: Vec<&SeriesRecord<T>> = series
        .records
        .iter()
        .filter(|r| r.deviation.is_finite())
        .collect();
    let (Some(first), Some(last)) = (recs.first(), recs.last()) else {
        return Err(Error::InsufficientSeries("no deviation records".into()));
    };
    let growth = last.gamma / first.gamma;
    if !(growth >= thresholds.min_growth) {
        return Err(Error::InsufficientSeries(format!(
            "gamma grew by {growth:e}, need {:e}",
            thresholds.min_growth
        )));
    }
    let eps = thresholds.epsilon;
    let hold_until_gamma = recs
        .iter()
        .take_while(|r| r.deviation <= eps)
        .last()
        .map(|r| r.gamma)
        .unwrap_or_else(T::zero);
    let decade: Vec<&&SeriesRecord<T>> = recs
        .iter()
        .filter(|r| r.gamma >= last.gamma / T::lit(10.0))
        .collect();
    let within = decade.iter().all(|r| r.deviation <= eps);
    let start = decade.first().map(|r| r.deviation).unwrap_or(last.deviation);
    let settled = last.deviation <= start + thresholds.noise * eps;
    let kind = if within && settled {
        VerdictKind::StructurallyStable
    } else if hold_until_gamma >= thresholds.gamma_hold {
        VerdictKind::Metastable
    } else {
        VerdictKind::Divergent
    };
    Ok(StabilityVerdict {
        kind,
        hold_until_gamma,
        final_deviation: last.deviation,
    })
}
