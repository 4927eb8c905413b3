//! Blow-up evolution of `u_t = x^{1−N}(x^{N−1}u^σu_x)_x + u^β` on `[0, X(t)]`
//! with `u(X) = 0`.
//!
//! Space: linear elements with lumped mass, the flux through the interpolated
//! Kirchhoff variable and the source interpolated nodally, so that
//! `U̇ = −M⁻¹K·G(U) + U^β`. Time: the two-stage strong-stability-preserving
//! Runge–Kutta scheme (Heun), which is a convex combination of forward Euler
//! steps and keeps `U ≥ 0` under the Euler positivity bound. Steps are
//! rejected and halved on negative values or more than 10% amplitude growth.
//!
//! Meshes follow the self-similar scaling `Δx ∝ Γ^{−m}` with
//! `Γ = max u / max u₀`: in the LS regime elements that are still evolving
//! are split when `Δx·Γ^m > λΔx⁰`; in the HS regime the domain and all
//! elements are doubled when `Δx·Γ^m < Δx⁰/λ`.

use crate::banded::BandedMatrix;
use crate::diagnostics::{
    deviation, front_point, semi_width, ss_representation, DiagnosticsSeries, SeriesRecord,
};
use crate::error::{Error, Result};
use crate::fem::ElementData;
use crate::medium::{classify, MediumParams, RegimeKind};
use crate::mesh::{interpolate, ElementKind, GridFunction, Mesh1D};
use crate::scalar::Real;

/// `G(u) = u^{σ+1}/(σ+1)`.
pub fn kirchhoff<T: Real>(u: T, sigma: T) -> T {
    u.max(T::zero()).powf(sigma + T::one()) / (sigma + T::one())
}

/// Lumped mass diagonal and weighted stiffness of a linear-element mesh.
#[derive(Debug, Clone)]
pub struct Matrices<T> {
    pub lumped: Vec<T>,
    pub stiffness: BandedMatrix<T>,
}

pub fn assemble<T: Real>(params: &MediumParams<T>, mesh: &Mesh1D<T>) -> Result<Matrices<T>> {
    if mesh.kind() != ElementKind::Linear {
        return Err(Error::InvalidMesh("the evolution solver uses linear elements".into()));
    }
    let ed = ElementData::new(mesh, params.dim);
    Ok(Matrices {
        lumped: ed.lumped_mass(),
        stiffness: ed.stiffness(),
    })
}

/// `−M⁻¹K·G(U) + U^β`, with a zero rate at the boundary node.
pub fn rhs<T: Real>(params: &MediumParams<T>, u: &[T], m: &Matrices<T>) -> Result<Vec<T>> {
    let g: Vec<T> = u.iter().map(|&v| kirchhoff(v, params.sigma)).collect();
    let kg = m.stiffness.mul_vec(&g);
    let mut out: Vec<T> = kg
        .iter()
        .zip(&m.lumped)
        .zip(u)
        .map(|((&k, &mi), &v)| -k / mi + v.max(T::zero()).powf(params.beta))
        .collect();
    if let Some(i) = out.iter().position(|r| !r.is_finite()) {
        return Err(Error::SourceOverflow {
            t: f64::NAN,
            u_max: u[i].to_f64_lossy(),
        });
    }
    let last = out.len() - 1;
    out[last] = T::zero();
    Ok(out)
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvolveOptions<T> {
    /// Stop once `max u` reaches this value.
    pub amplitude_cap: T,
    /// Stop once `t` reaches this value (runs that do not blow up).
    pub max_time: T,
    pub max_steps: usize,
    /// Mesh-law factor λ.
    pub lambda: T,
    /// Tolerance δ_u of the established-solution test.
    pub delta_u: T,
    /// Fraction of the explicit stability bound used as the step ceiling.
    pub safety: T,
    pub tau_min: T,
    /// Largest accepted relative amplitude growth per step.
    pub max_growth: T,
    /// Largest factor by which τ may grow after an accepted step.
    pub tau_increase: T,
    /// A record is written whenever `max u` has grown by this factor.
    pub record_growth: T,
    /// Amplitude ratios `Γ` at which profile snapshots are kept.
    pub snapshot_gammas: Vec<T>,
    /// Switches self-similar mesh adaptation off.
    pub adapt: bool,
}

impl<T: Real> Default for EvolveOptions<T> {
    fn default() -> Self {
        Self {
            amplitude_cap: T::lit(1e6),
            max_time: T::lit(1e3),
            max_steps: 20_000_000,
            lambda: T::lit(2.0),
            delta_u: T::lit(1e-7),
            safety: T::lit(0.5),
            tau_min: T::lit(1e-16),
            max_growth: T::lit(0.1),
            tau_increase: T::lit(1.2),
            record_growth: T::lit(1.005),
            snapshot_gammas: Vec::new(),
            adapt: true,
        }
    }
}

impl<T: Real> EvolveOptions<T> {
    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("amplitude_cap", self.amplitude_cap),
            ("max_time", self.max_time),
            ("delta_u", self.delta_u),
            ("safety", self.safety),
            ("tau_min", self.tau_min),
            ("max_growth", self.max_growth),
        ];
        for (name, v) in positive {
            if !(v > T::zero()) || !v.is_finite() {
                return Err(Error::InvalidParams(format!("{name} must be positive, got {v}")));
            }
        }
        if !(self.lambda > T::one()) {
            return Err(Error::InvalidParams(format!("lambda must exceed 1, got {}", self.lambda)));
        }
        if !(self.tau_increase >= T::one()) || !(self.record_growth > T::one()) {
            return Err(Error::InvalidParams("tau_increase >= 1 and record_growth > 1 required".into()));
        }
        if self.safety > T::one() {
            return Err(Error::InvalidParams(format!("safety must be <= 1, got {}", self.safety)));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvolutionState<T> {
    pub t: T,
    pub mesh: Mesh1D<T>,
    pub u: Vec<T>,
    pub tau: T,
    /// `Γ(t) = max u / max u₀`.
    pub gamma_ratio: T,
    /// Nodes whose values have settled within δ_u.
    pub established: Vec<bool>,
    u0_max: T,
    dx0: T,
    /// Consecutive quiet checks per node and the values at the last check.
    quiet: Vec<u8>,
    checked: Vec<T>,
    next_check: T,
}

/// Checks required before a node counts as established.
const QUIET_CHECKS: u8 = 3;

/// Established checks happen each time `Γ` grows by this factor.
const CHECK_GROWTH: f64 = 1.1;

impl<T: Real> EvolutionState<T> {
    pub fn new(mesh: Mesh1D<T>, mut u: Vec<T>) -> Result<Self> {
        if u.len() != mesh.n_dofs() {
            return Err(Error::InvalidMesh(format!(
                "{} values for {} nodes",
                u.len(),
                mesh.n_dofs()
            )));
        }
        if let Some(i) = u.iter().position(|&v| v < T::zero() || !v.is_finite()) {
            return Err(Error::InvalidParams(format!("initial value {} at node {i}", u[i])));
        }
        let last = u.len() - 1;
        u[last] = T::zero();
        let u0_max = u.iter().copied().fold(T::zero(), T::max);
        let n = u.len();
        Ok(Self {
            t: T::zero(),
            dx0: mesh.h_max(),
            mesh,
            checked: u.clone(),
            u,
            tau: T::zero(),
            gamma_ratio: T::one(),
            established: vec![false; n],
            u0_max,
            quiet: vec![0; n],
            next_check: T::lit(CHECK_GROWTH),
        })
    }

    pub fn u_max(&self) -> T {
        self.u.iter().copied().fold(T::zero(), T::max)
    }

    pub fn x_edge(&self) -> T {
        self.mesh.length()
    }

    /// Element length of the initial mesh, the Δx⁰ of the mesh laws.
    pub fn initial_spacing(&self) -> T {
        self.dx0
    }

    pub fn profile(&self) -> GridFunction<T> {
        GridFunction::new(self.mesh.dof_coords(), self.u.clone())
    }

    /// `Δx·Γ^m` for every element.
    pub fn scaled_spacings(&self, m: T) -> Vec<T> {
        let g = self.gamma_ratio.powf(m);
        (0..self.mesh.n_elements())
            .map(|e| self.mesh.element_length(e) * g)
            .collect()
    }

    fn element_established(&self, e: usize) -> bool {
        self.established[e] && self.established[e + 1]
    }

    fn update_gamma(&mut self) {
        self.gamma_ratio = if self.u0_max > T::zero() {
            self.u_max() / self.u0_max
        } else {
            T::one()
        };
    }
}

/// Largest step allowed by the explicit stability bound
/// `τ ≤ safety·M_ii/(K_ii·max(u)^σ)` over node neighbourhoods.
pub fn stable_step<T: Real>(params: &MediumParams<T>, u: &[T], m: &Matrices<T>, safety: T) -> T {
    let n = u.len();
    let mut tau = T::infinity();
    for i in 0..n - 1 {
        let lo = i.saturating_sub(1);
        let hi = (i + 1).min(n - 1);
        let umax = u[lo..=hi].iter().copied().fold(T::zero(), T::max);
        let d = umax.powf(params.sigma);
        let k = m.stiffness.get(i, i);
        if d > T::zero() && k > T::zero() {
            tau = tau.min(m.lumped[i] / (k * d));
        }
    }
    safety * tau
}

/// Outcome of [`step`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepReport<T> {
    pub tau: T,
    pub rejections: usize,
}

/// One accepted SSP-RK2 step. The trial step starts at `min(state.tau·1.2,
/// stability bound)` and is halved until accepted or below `tau_min`.
pub fn step<T: Real>(
    params: &MediumParams<T>,
    state: &mut EvolutionState<T>,
    m: &Matrices<T>,
    options: &EvolveOptions<T>,
) -> Result<StepReport<T>> {
    let bound = stable_step(params, &state.u, m, options.safety);
    let mut tau = if state.tau > T::zero() {
        (state.tau * options.tau_increase).min(bound)
    } else {
        bound
    };
    if !tau.is_finite() {
        // u ≡ 0: nothing evolves
        tau = options.max_time - state.t;
    }
    let u_max = state.u_max();
    let f0 = rhs(params, &state.u, m).map_err(|e| with_time(e, state.t))?;
    let mut rejections = 0;
    loop {
        if tau < options.tau_min {
            return Err(Error::StepCollapsed {
                t: state.t.to_f64_lossy(),
                tau_min: options.tau_min.to_f64_lossy(),
            });
        }
        let u1: Vec<T> = state.u.iter().zip(&f0).map(|(&u, &f)| u + tau * f).collect();
        let trial = rhs(params, &u1, m).and_then(|f1| {
            Ok(state
                .u
                .iter()
                .zip(&u1)
                .zip(&f1)
                .map(|((&u, &v), &f)| (u + v + tau * f) / T::lit(2.0))
                .collect::<Vec<T>>())
        });
        if let Ok(u2) = trial {
            let new_max = u2.iter().copied().fold(T::zero(), T::max);
            let positive = u1.iter().chain(&u2).all(|&v| v >= T::zero() && v.is_finite());
            if positive && new_max <= u_max * (T::one() + options.max_growth) {
                state.u = u2;
                state.t += tau;
                state.tau = tau;
                state.update_gamma();
                return Ok(StepReport { tau, rejections });
            }
        }
        tau = tau / T::lit(2.0);
        rejections += 1;
    }
}

fn with_time(e: Error, t: impl Real) -> Error {
    match e {
        Error::SourceOverflow { u_max, .. } => Error::SourceOverflow {
            t: t.to_f64_lossy(),
            u_max,
        },
        other => other,
    }
}

/// What [`adapt_mesh`] changed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Adaptation {
    None,
    Refined { split: usize },
    Doubled,
}

/// Applies the regime's mesh law. Returns whether the mesh changed.
pub fn adapt_mesh<T: Real>(
    params: &MediumParams<T>,
    state: &mut EvolutionState<T>,
    options: &EvolveOptions<T>,
) -> Adaptation {
    let m = params.m();
    match classify(params).kind {
        RegimeKind::LS | RegimeKind::BeyondFujita => {
            update_established(state, options.delta_u);
            let limit = options.lambda * state.dx0;
            let spacings = state.scaled_spacings(m);
            let flags: Vec<bool> = spacings
                .iter()
                .enumerate()
                .map(|(e, &s)| s > limit && !state.element_established(e))
                .collect();
            let split = flags.iter().filter(|&&f| f).count();
            if split == 0 {
                return Adaptation::None;
            }
            let old = state.mesh.clone();
            let new_mesh = old.split(&flags);
            let x_old = old.dof_coords();
            let x_new = new_mesh.dof_coords();
            let mut u = Vec::with_capacity(x_new.len());
            let mut est = Vec::with_capacity(x_new.len());
            let mut quiet = Vec::with_capacity(x_new.len());
            let mut checked = Vec::with_capacity(x_new.len());
            let mut j = 0;
            for &x in &x_new {
                if j < x_old.len() && x_old[j] == x {
                    u.push(state.u[j]);
                    est.push(state.established[j]);
                    quiet.push(state.quiet[j]);
                    checked.push(state.checked[j]);
                    j += 1;
                } else {
                    let v = interpolate(&x_old, &state.u, x).unwrap_or_else(T::zero);
                    u.push(v);
                    est.push(false);
                    quiet.push(0);
                    checked.push(v);
                }
            }
            state.mesh = new_mesh;
            state.u = u;
            state.established = est;
            state.quiet = quiet;
            state.checked = checked;
            Adaptation::Refined { split }
        }
        RegimeKind::HS => {
            let limit = state.dx0 / options.lambda;
            let spacings = state.scaled_spacings(m);
            if !spacings.iter().any(|&s| s < limit) {
                return Adaptation::None;
            }
            let x_old = state.mesh.dof_coords();
            let new_mesh = state.mesh.scaled(T::lit(2.0));
            let x_new = new_mesh.dof_coords();
            state.u = x_new
                .iter()
                .map(|&x| interpolate(&x_old, &state.u, x).unwrap_or_else(T::zero))
                .collect();
            let last = state.u.len() - 1;
            state.u[last] = T::zero();
            state.mesh = new_mesh;
            state.checked = state.u.clone();
            state.quiet.iter_mut().for_each(|q| *q = 0);
            state.established.iter_mut().for_each(|e| *e = false);
            Adaptation::Doubled
        }
        RegimeKind::S => Adaptation::None,
    }
}

/// Established test, run each time `Γ` has grown by 10% since the last one:
/// a node is established after three consecutive checks with
/// `|Δu|/max(1, u) < δ_u`.
fn update_established<T: Real>(state: &mut EvolutionState<T>, delta_u: T) {
    if state.gamma_ratio < state.next_check {
        return;
    }
    state.next_check = state.gamma_ratio * T::lit(CHECK_GROWTH);
    for i in 0..state.u.len() {
        let u = state.u[i];
        let change = (u - state.checked[i]).abs() / u.max(T::one());
        if change < delta_u {
            state.quiet[i] = state.quiet[i].saturating_add(1);
        } else {
            state.quiet[i] = 0;
        }
        state.established[i] = state.quiet[i] >= QUIET_CHECKS;
        state.checked[i] = u;
    }
}

/// Blow-up time estimates of a run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlowupEstimate<T> {
    /// Time of the last accepted step.
    pub t_stop: T,
    /// t-intercept of the least-squares line through `u_max^{−(β−1)}` against `t`.
    pub fit_t0: T,
    /// Slope of `ln u_max` against `ln(fit_t0 − t)`; `−1/(β−1)` for self-similar growth.
    pub exponent_fit: T,
    /// Why the run stopped.
    pub stop: StopReason,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StopReason {
    AmplitudeCap,
    StepCollapsed,
    MaxTime,
    MaxSteps,
}

impl StopReason {
    pub fn as_str(self) -> &'static str {
        match self {
            StopReason::AmplitudeCap => "amplitude_cap",
            StopReason::StepCollapsed => "step_collapsed",
            StopReason::MaxTime => "max_time",
            StopReason::MaxSteps => "max_steps",
        }
    }
}

/// Profile kept when `Γ` first passed a requested value.
#[derive(Debug, Clone, PartialEq)]
pub struct Snapshot<T> {
    pub t: T,
    pub gamma: T,
    pub profile: GridFunction<T>,
}

/// A mesh change and the state at which it happened.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AdaptationEvent<T> {
    pub t: T,
    pub u_max: T,
    pub kind: Adaptation,
    pub n_nodes: usize,
}

/// Everything a run produces.
#[derive(Debug, Clone, PartialEq)]
pub struct RunOutput<T> {
    pub series: DiagnosticsSeries<T>,
    pub estimate: BlowupEstimate<T>,
    pub snapshots: Vec<Snapshot<T>>,
    pub final_state: EvolutionState<T>,
    pub adaptations: Vec<AdaptationEvent<T>>,
    /// Largest relative violation of the mesh law seen after any adaptation
    /// (≤ 0 when the law always held).
    pub mesh_law_excess: T,
    /// Smallest nodal value over all accepted states.
    pub min_value: T,
    pub steps: usize,
    pub rejections: usize,
}

fn record<T: Real>(
    params: &MediumParams<T>,
    state: &EvolutionState<T>,
    reference: Option<&GridFunction<T>>,
) -> SeriesRecord<T> {
    let x = state.mesh.dof_coords();
    let u_max = state.u_max();
    let dev = match reference {
        Some(r) if u_max > T::zero() => {
            let rep = ss_representation(&x, &state.u, r, params);
            deviation(&rep.values, r)
        }
        _ => T::nan(),
    };
    let gamma = match reference {
        Some(r) => u_max / r.max(),
        None => state.gamma_ratio,
    };
    SeriesRecord {
        t: state.t,
        u_max,
        semi_width: semi_width(&x, &state.u).value.unwrap_or_else(T::nan),
        front: front_point(&x, &state.u).value,
        x_edge: state.x_edge(),
        tau: state.tau,
        n_nodes: x.len(),
        gamma,
        deviation: dev,
    }
}

/// Relative excess of the mesh law: LS `max(Δx·Γ^m)/(λΔx⁰) − 1` over
/// non-established elements, HS `1 − min(Δx·Γ^m)/(Δx⁰/λ)`.
pub fn mesh_law_excess<T: Real>(
    params: &MediumParams<T>,
    state: &EvolutionState<T>,
    lambda: T,
) -> T {
    let s = state.scaled_spacings(params.m());
    match classify(params).kind {
        RegimeKind::LS | RegimeKind::BeyondFujita => {
            let worst = s
                .iter()
                .enumerate()
                .filter(|(e, _)| !state.element_established(*e))
                .map(|(_, &v)| v)
                .fold(T::zero(), T::max);
            worst / (lambda * state.dx0) - T::one()
        }
        RegimeKind::HS => {
            let worst = s.iter().copied().fold(T::infinity(), T::min);
            T::one() - worst / (state.dx0 / lambda)
        }
        RegimeKind::S => -T::one(),
    }
}

/// Integrates until the amplitude cap, step collapse, `max_time` or
/// `max_steps`, recording the series and fitting the blow-up time.
pub fn run_to_blowup<T: Real>(
    params: &MediumParams<T>,
    mesh: &Mesh1D<T>,
    u0: &[T],
    options: &EvolveOptions<T>,
    reference: Option<&GridFunction<T>>,
) -> Result<RunOutput<T>> {
    params.validate()?;
    options.validate()?;
    let mut state = EvolutionState::new(mesh.clone(), u0.to_vec())?;
    let mut matrices = assemble(params, &state.mesh)?;
    let mut series = DiagnosticsSeries::new(reference.cloned());
    series.push(record(params, &state, reference));
    let mut last_recorded = state.u_max();
    let mut snapshots = Vec::new();
    let mut pending: Vec<T> = options.snapshot_gammas.clone();
    pending.sort_by(|a, b| a.partial_cmp(b).expect("finite snapshot ratios"));
    let mut adaptations = Vec::new();
    let mut excess = -T::one();
    let mut min_value = state.u.iter().copied().fold(T::infinity(), T::min);
    let mut steps = 0;
    let mut rejections = 0;
    let take_snapshots = |state: &EvolutionState<T>, pending: &mut Vec<T>, snaps: &mut Vec<Snapshot<T>>| {
        while let Some(&g) = pending.first() {
            if state.gamma_ratio < g {
                break;
            }
            snaps.push(Snapshot {
                t: state.t,
                gamma: state.gamma_ratio,
                profile: state.profile(),
            });
            pending.remove(0);
        }
    };
    take_snapshots(&state, &mut pending, &mut snapshots);
    let stop = loop {
        if state.u_max() >= options.amplitude_cap {
            break StopReason::AmplitudeCap;
        }
        if state.t >= options.max_time {
            break StopReason::MaxTime;
        }
        if steps >= options.max_steps {
            break StopReason::MaxSteps;
        }
        match step(params, &mut state, &matrices, options) {
            Ok(r) => rejections += r.rejections,
            Err(Error::StepCollapsed { .. }) => break StopReason::StepCollapsed,
            Err(e) => return Err(e),
        }
        steps += 1;
        min_value = state.u.iter().copied().fold(min_value, T::min);
        if options.adapt {
            let a = adapt_mesh(params, &mut state, options);
            if a != Adaptation::None {
                matrices = assemble(params, &state.mesh)?;
                adaptations.push(AdaptationEvent {
                    t: state.t,
                    u_max: state.u_max(),
                    kind: a,
                    n_nodes: state.mesh.n_dofs(),
                });
                log::debug!("t = {}: {a:?}, {} nodes", state.t, state.mesh.n_dofs());
            }
            if !adaptations.is_empty() {
                excess = excess.max(mesh_law_excess(params, &state, options.lambda));
            }
        }
        take_snapshots(&state, &mut pending, &mut snapshots);
        let u_max = state.u_max();
        if u_max >= last_recorded * options.record_growth || u_max >= options.amplitude_cap {
            series.push(record(params, &state, reference));
            last_recorded = u_max;
        }
    };
    if series.last().is_some_and(|r| r.t < state.t) {
        series.push(record(params, &state, reference));
    }
    let (fit_t0, exponent_fit) = fit_blowup(params, &series, T::lit(10.0), T::lit(1e4));
    Ok(RunOutput {
        estimate: BlowupEstimate {
            t_stop: state.t,
            fit_t0,
            exponent_fit,
            stop,
        },
        series,
        snapshots,
        final_state: state,
        adaptations,
        mesh_law_excess: excess,
        min_value,
        steps,
        rejections,
    })
}

/// Blow-up time from a least-squares line through `(t, u_max^{−(β−1)})` and
/// growth exponent from `ln u_max` against `ln(T̃₀ − t)`, both over records
/// with `lo ≤ u_max ≤ hi`. NaN when fewer than three records qualify.
pub fn fit_blowup<T: Real>(
    params: &MediumParams<T>,
    series: &DiagnosticsSeries<T>,
    lo: T,
    hi: T,
) -> (T, T) {
    let pts: Vec<(T, T)> = series
        .records
        .iter()
        .filter(|r| r.u_max >= lo && r.u_max <= hi)
        .map(|r| (r.t, r.u_max))
        .collect();
    if pts.len() < 3 {
        return (T::nan(), T::nan());
    }
    let q = params.beta - T::one();
    let line: Vec<(T, T)> = pts.iter().map(|&(t, u)| (t, u.powf(-q))).collect();
    let (a, b) = least_squares(&line);
    let t0 = -a / b;
    let logs: Vec<(T, T)> = pts
        .iter()
        .filter(|(t, _)| *t < t0)
        .map(|&(t, u)| ((t0 - t).ln(), u.ln()))
        .collect();
    let exponent = if logs.len() >= 3 { least_squares(&logs).1 } else { T::nan() };
    (t0, exponent)
}

/// Intercept and slope of the least-squares line through `pts`.
fn least_squares<T: Real>(pts: &[(T, T)]) -> (T, T) {
    let n = T::from_usize_lossy(pts.len());
    let mx = pts.iter().map(|p| p.0).sum::<T>() / n;
    let my = pts.iter().map(|p| p.1).sum::<T>() / n;
    let sxy: T = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: T = pts.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    let slope = sxy / sxx;
    (my - slope * mx, slope)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{fundamental_length, zk_eval};
    use approx::assert_relative_eq;

    #[test]
    fn kirchhoff_values() {
        assert_eq!(kirchhoff(0.0_f64, 2.0), 0.0);
        assert_relative_eq!(kirchhoff(1.0_f64, 2.0), 1.0 / 3.0);
        assert_relative_eq!(kirchhoff(2.0_f64, 2.0), 8.0 / 3.0);
    }

    #[test]
    fn assembly_properties() {
        let p = MediumParams::new(2.0, 3.0, 2).unwrap();
        let mesh = Mesh1D::uniform(3.0_f64, 30, ElementKind::Linear).unwrap();
        let m = assemble(&p, &mesh).unwrap();
        assert!(m.lumped.iter().all(|&v| v > 0.0));
        assert_relative_eq!(m.lumped.iter().sum::<f64>(), 4.5, max_relative = 1e-13);
        assert_eq!(m.stiffness.bandwidth(), 3);
        assert!(m.stiffness.row_sums().iter().all(|r| r.abs() < 1e-12));
        let q = Mesh1D::uniform(3.0_f64, 30, ElementKind::Quadratic).unwrap();
        assert!(assemble(&p, &q).is_err());
    }

    #[test]
    fn rhs_examples() {
        let p = MediumParams::new(2.0, 3.0, 1).unwrap();
        let mesh = Mesh1D::uniform(4.0_f64, 40, ElementKind::Linear).unwrap();
        let m = assemble(&p, &mesh).unwrap();
        assert!(rhs(&p, &vec![0.0; 41], &m).unwrap().iter().all(|&r| r == 0.0));
        let r = rhs(&p, &vec![1.0; 41], &m).unwrap();
        for &v in &r[..39] {
            assert_relative_eq!(v, 1.0, epsilon = 1e-12);
        }
        // self-similar data: d(max u)/dt = φ'(0)·θ(0) = θ(0)/((β−1)T₀)
        let ls = fundamental_length(2.0);
        let mesh = Mesh1D::uniform(1.5 * ls, 600, ElementKind::Linear).unwrap();
        let m = assemble(&p, &mesh).unwrap();
        let u: Vec<f64> = mesh.dof_coords().iter().map(|&x| zk_eval(2.0, x)).collect();
        let r = rhs(&p, &u, &m).unwrap();
        assert!((r[0] / 1.224_745 - 1.0).abs() < 0.05, "{}", r[0]);
    }

    #[test]
    fn zero_data_is_equilibrium() {
        let p = MediumParams::new(2.0, 3.0, 1).unwrap();
        let mesh = Mesh1D::uniform(4.0_f64, 20, ElementKind::Linear).unwrap();
        let opts = EvolveOptions {
            max_time: 1.0,
            ..EvolveOptions::default()
        };
        let out = run_to_blowup(&p, &mesh, &vec![0.0; 21], &opts, None).unwrap();
        assert_eq!(out.estimate.stop, StopReason::MaxTime);
        assert!(out.final_state.u.iter().all(|&v| v == 0.0));
        assert!(out.series.records.iter().all(|r| r.u_max == 0.0));
    }

    /// Pure diffusion of nearly flat data against a fine-step reference.
    #[test]
    fn second_order_in_time() {
        let p = MediumParams::new(1.0, 3.0, 1).unwrap();
        let mesh = Mesh1D::uniform(1.0_f64, 20, ElementKind::Linear).unwrap();
        let m = assemble(&p, &mesh).unwrap();
        let u0: Vec<f64> = mesh
            .dof_coords()
            .iter()
            .map(|&x| 1.0 + 0.1 * (std::f64::consts::PI * x / 2.0).cos())
            .collect();
        // Heun without source, fixed steps
        let diffuse = |tau: f64, n: usize| {
            let mut u = u0.clone();
            for _ in 0..n {
                let f = |v: &[f64]| -> Vec<f64> {
                    let g: Vec<f64> = v.iter().map(|&w| kirchhoff(w, 1.0)).collect();
                    let mut r: Vec<f64> = m.stiffness.mul_vec(&g).iter().zip(&m.lumped).map(|(k, mi)| -k / mi).collect();
                    *r.last_mut().unwrap() = 0.0;
                    r
                };
                let f0 = f(&u);
                let u1: Vec<f64> = u.iter().zip(&f0).map(|(a, b)| a + tau * b).collect();
                let f1 = f(&u1);
                u = u.iter().zip(&u1).zip(&f1).map(|((a, b), c)| (a + b + tau * c) / 2.0).collect();
            }
            u
        };
        let t = 0.01;
        let reference = diffuse(t / 4096.0, 4096);
        let err = |n: usize| {
            diffuse(t / n as f64, n).iter().zip(&reference).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max)
        };
        let (e1, e2) = (err(16), err(32));
        assert!((e1 / e2).log2() > 1.8, "{e1} {e2}");
    }

    #[test]
    fn mesh_law_trigger_values() {
        // LS σ=2, β=3.6: m = 0.3, refinement first when Γ^m > 2
        let ls = MediumParams::new(2.0, 3.6, 1).unwrap();
        let mesh = Mesh1D::uniform(10.0_f64, 40, ElementKind::Linear).unwrap();
        let u: Vec<f64> = mesh.dof_coords().iter().map(|&x| 1.0 / (1.0 + x * x)).collect();
        let opts = EvolveOptions::default();
        let mut st = EvolutionState::new(mesh.clone(), u.clone()).unwrap();
        assert_eq!(adapt_mesh(&ls, &mut st, &opts), Adaptation::None);
        let trigger = 2f64.powf(1.0 / 0.3);
        assert!((trigger - 10.08).abs() < 0.01);
        st.gamma_ratio = trigger * 0.999;
        assert_eq!(adapt_mesh(&ls, &mut st, &opts), Adaptation::None);
        st.gamma_ratio = trigger * 1.001;
        assert!(matches!(adapt_mesh(&ls, &mut st, &opts), Adaptation::Refined { .. }));
        assert!(mesh_law_excess(&ls, &st, 2.0) <= 0.0);
        // HS σ=2, β=2.4: m = −0.3, doubling at the same Γ
        let hs = MediumParams::new(2.0, 2.4, 1).unwrap();
        let mut st = EvolutionState::new(mesh, u).unwrap();
        st.gamma_ratio = trigger * 0.999;
        assert_eq!(adapt_mesh(&hs, &mut st, &opts), Adaptation::None);
        st.gamma_ratio = trigger * 1.001;
        assert_eq!(adapt_mesh(&hs, &mut st, &opts), Adaptation::Doubled);
        assert_eq!(st.mesh.n_dofs(), 41);
        assert_relative_eq!(st.x_edge(), 20.0);
        assert!(mesh_law_excess(&hs, &st, 2.0) <= 0.0);
    }

    #[test]
    fn least_squares_line() {
        let pts: Vec<(f64, f64)> = (0..5).map(|i| (i as f64, 3.0 - 2.0 * i as f64)).collect();
        let (a, b) = least_squares(&pts);
        assert_relative_eq!(a, 3.0, epsilon = 1e-12);
        assert_relative_eq!(b, -2.0, epsilon = 1e-12);
    }
}
