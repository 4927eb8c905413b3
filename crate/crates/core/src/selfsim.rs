//! Self-similar profiles by the continuous analogue of Newton's method.
//!
//! The profile operator
//!
//! ```text
//! L(θ) = −ξ^{1−N}(ξ^{N−1} θ^σ θ')' + m̂ ξ θ' + c θ − θ^β
//! ```
//!
//! is discretised by weighted Galerkin finite elements on `[0, l]`. The flux
//! is written through the Kirchhoff variable `G(θ) = θ^{σ+1}/(σ+1)`,
//! interpolated nodally, so the diffusion part is `K·G(θ)`. The reaction is
//! integrated with the consistent mass and `θ` evaluated at quadrature points.
//! Powers use the odd extension `sign(θ)|θ|^q`, which keeps the iteration well
//! defined across small undershoots near fronts.
//!
//! At `ξ = l` the LS regime uses the power-tail Robin condition and the other
//! regimes `θ(l) = 0`. In the HS regime the advection is directed inwards and
//! its Galerkin form admits a sawtooth mode on the zero set, so it is replaced
//! there by a one-sided difference weighted by the lumped mass.

use crate::banded::BandedMatrix;
use crate::error::{Error, Result};
use crate::exact::fundamental_length;
use crate::fem::ElementData;
use crate::linear_init::{build_ls_guess, build_s_guess, bump_guess};
use crate::medium::{classify, MediumParams, RegimeKind};
use crate::mesh::{crossings, GridFunction, Mesh1D};
use crate::scalar::{signed_pow, Real};

/// Floor applied to `|θ|` inside the derivative of the diffusion coefficient.
pub const DEGENERACY_FLOOR: f64 = 1e-14;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Boundary {
    /// `θ(l) = 0`.
    Dirichlet,
    /// `θ'(l) = −p θ(l)/l` from the power tail.
    Robin,
    /// Natural condition `θ'(l) = 0`.
    Neumann,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Advection {
    Galerkin,
    Upwind,
}

/// Assembled, state-independent parts of the discrete profile operator.
#[derive(Debug, Clone)]
pub struct ProfileOperator<T> {
    pub params: MediumParams<T>,
    pub mesh: Mesh1D<T>,
    pub boundary: Boundary,
    pub advection: Advection,
    elements: ElementData<T>,
    stiffness: BandedMatrix<T>,
    transport: BandedMatrix<T>,
    lumped: Vec<T>,
    total_weight: T,
}

impl<T: Real> ProfileOperator<T> {
    pub fn new(params: &MediumParams<T>, mesh: &Mesh1D<T>) -> Result<Self> {
        params.validate()?;
        let kind = classify(params).kind;
        let boundary = match kind {
            RegimeKind::LS | RegimeKind::BeyondFujita => Boundary::Robin,
            RegimeKind::S | RegimeKind::HS => Boundary::Dirichlet,
        };
        let advection = if kind == RegimeKind::HS {
            Advection::Upwind
        } else {
            Advection::Galerkin
        };
        Ok(Self::with_options(params, mesh, boundary, advection))
    }

    pub fn with_options(
        params: &MediumParams<T>,
        mesh: &Mesh1D<T>,
        boundary: Boundary,
        advection: Advection,
    ) -> Self {
        let elements = ElementData::new(mesh, params.dim);
        let stiffness = elements.stiffness();
        let lumped = elements.lumped_mass();
        let transport = match advection {
            Advection::Galerkin => elements.advection(),
            Advection::Upwind => {
                let x = mesh.dof_coords();
                let mut a = elements.empty_matrix();
                for i in 0..x.len() - 1 {
                    let w = lumped[i] * x[i] / (x[i + 1] - x[i]);
                    a.add(i, i, -w);
                    a.add(i, i + 1, w);
                }
                a
            }
        };
        let total_weight = lumped.iter().copied().sum();
        Self {
            params: *params,
            mesh: mesh.clone(),
            boundary,
            advection,
            elements,
            stiffness,
            transport,
            lumped,
            total_weight,
        }
    }

    pub fn n_dofs(&self) -> usize {
        self.lumped.len()
    }

    pub fn lumped_mass(&self) -> &[T] {
        &self.lumped
    }

    fn robin_coeff(&self) -> T {
        let l = self.mesh.length();
        l.powi(self.params.dim as i32 - 2) * self.params.tail_exponent()
    }

    /// Weak-form residual vector; the Dirichlet row holds `θ(l)`.
    pub fn residual(&self, theta: &[T]) -> Vec<T> {
        let p = &self.params;
        let (sigma, beta) = (p.sigma, p.beta);
        let s1 = sigma + T::one();
        let c = p.linear_coeff();
        let mh = p.advection_coeff();
        let g: Vec<T> = theta.iter().map(|&t| signed_pow(t, s1) / s1).collect();
        let mut r = self.stiffness.mul_vec(&g);
        for (ri, ai) in r.iter_mut().zip(self.transport.mul_vec(theta)) {
            *ri += mh * ai;
        }
        let n = self.elements.nloc();
        for (e, qps) in self.elements.points.iter().enumerate() {
            let d = self.elements.dofs[e];
            for q in qps {
                let t = self.elements.value_at(e, q, theta);
                let f = q.wt * (c * t - signed_pow(t, beta));
                for a in 0..n {
                    r[d[a]] += f * q.phi[a];
                }
            }
        }
        let last = r.len() - 1;
        match self.boundary {
            Boundary::Robin => r[last] += self.robin_coeff() * signed_pow(theta[last], s1),
            Boundary::Dirichlet => r[last] = theta[last],
            Boundary::Neumann => {}
        }
        r
    }

    /// `sqrt(Σ r_i²/M_ii / Σ M_ii)` over the non-Dirichlet rows.
    pub fn norm(&self, r: &[T]) -> T {
        let skip = match self.boundary {
            Boundary::Dirichlet => 1,
            Boundary::Robin | Boundary::Neumann => 0,
        };
        let s: T = r[..r.len() - skip]
            .iter()
            .zip(&self.lumped)
            .map(|(&ri, &m)| ri * ri / m)
            .sum();
        (s / self.total_weight).sqrt()
    }

    /// Banded matrix of `L'(θ)` in the finite element basis.
    pub fn jacobian(&self, theta: &[T]) -> BandedMatrix<T> {
        let p = &self.params;
        let (sigma, beta) = (p.sigma, p.beta);
        let floor = T::lit(DEGENERACY_FLOOR);
        let c = p.linear_coeff();
        let dg: Vec<T> = theta.iter().map(|&t| t.abs().max(floor).powf(sigma)).collect();
        let mut j = self.stiffness.clone();
        j.scale_columns(&dg);
        j.add_scaled(p.advection_coeff(), &self.transport);
        let n = self.elements.nloc();
        for (e, qps) in self.elements.points.iter().enumerate() {
            let d = self.elements.dofs[e];
            for q in qps {
                let t = self.elements.value_at(e, q, theta);
                let f = q.wt * (c - beta * t.abs().powf(beta - T::one()));
                for a in 0..n {
                    for b in 0..n {
                        j.add(d[a], d[b], f * q.phi[a] * q.phi[b]);
                    }
                }
            }
        }
        let last = theta.len() - 1;
        match self.boundary {
            Boundary::Robin => {
                let s1 = sigma + T::one();
                j.add(last, last, self.robin_coeff() * s1 * dg[last]);
            }
            Boundary::Dirichlet => j.set_identity_row(last, T::one()),
            Boundary::Neumann => {}
        }
        j
    }
}

/// Residual vector and norm of `theta` (nodal values at the dof coordinates).
pub fn residual<T: Real>(
    params: &MediumParams<T>,
    mesh: &Mesh1D<T>,
    theta: &[T],
) -> Result<(Vec<T>, T)> {
    let op = ProfileOperator::new(params, mesh)?;
    check_len(&op, theta)?;
    let r = op.residual(theta);
    let n = op.norm(&r);
    Ok((r, n))
}

/// Assembled `L'(θ)`.
pub fn linearized_apply<T: Real>(
    params: &MediumParams<T>,
    mesh: &Mesh1D<T>,
    theta: &[T],
) -> Result<BandedMatrix<T>> {
    let op = ProfileOperator::new(params, mesh)?;
    check_len(&op, theta)?;
    Ok(op.jacobian(theta))
}

fn check_len<T: Real>(op: &ProfileOperator<T>, theta: &[T]) -> Result<()> {
    if theta.len() != op.n_dofs() {
        return Err(Error::InvalidMesh(format!(
            "{} nodal values for {} degrees of freedom",
            theta.len(),
            op.n_dofs()
        )));
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CanmOptions<T> {
    pub tolerance: T,
    pub max_iterations: usize,
    pub tau0: T,
    pub max_halvings: usize,
    /// Negative values above `−clamp_tolerance·max θ` are zeroed after convergence.
    pub clamp_tolerance: T,
    /// Converged profiles must stay below `envelope·θ_H`.
    pub envelope: T,
}

impl<T: Real> Default for CanmOptions<T> {
    fn default() -> Self {
        Self {
            tolerance: T::lit(1e-7),
            max_iterations: 60,
            tau0: T::lit(0.1),
            max_halvings: 5,
            clamp_tolerance: T::lit(1e-3),
            envelope: T::lit(10.0),
        }
    }
}

/// One accepted step `θ_{n+1} = θ_n + τ_n v_n`.
#[derive(Debug, Clone, PartialEq)]
pub struct NewtonStep<T> {
    pub tau: T,
    pub direction: Vec<T>,
    pub residual_before: T,
    pub residual_after: T,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SelfSimilarSolution<T> {
    pub params: MediumParams<T>,
    pub k: usize,
    pub mesh: Mesh1D<T>,
    /// Values at the dof coordinates of `mesh`.
    pub theta: Vec<T>,
    pub residual_norm: T,
    pub iterations: usize,
    pub steps: Vec<NewtonStep<T>>,
}

impl<T: Real> SelfSimilarSolution<T> {
    pub fn profile(&self) -> GridFunction<T> {
        GridFunction::new(self.mesh.dof_coords(), self.theta.clone())
    }

    pub fn amplitude(&self) -> T {
        self.theta.iter().copied().fold(T::zero(), T::max)
    }

    pub fn crossings(&self) -> usize {
        crossings(&self.theta, self.params.theta_h(), T::lit(1e-9))
    }

    pub fn is_strictly_decreasing(&self) -> bool {
        let max = self.amplitude();
        // values below this are treated as the zero set beyond a front
        let tol = max * T::lit(1e-6);
        self.theta
            .windows(2)
            .all(|w| w[1] < w[0] || (w[0] <= tol && w[1] <= tol))
    }

    /// Largest dof coordinate with `θ > threshold`, or zero.
    pub fn support_edge(&self, threshold: T) -> T {
        let x = self.mesh.dof_coords();
        self.theta
            .iter()
            .rposition(|&t| t > threshold)
            .map(|i| x[i])
            .unwrap_or_else(T::zero)
    }
}

/// Continuous Newton iteration from `guess` (nodal values on `mesh`).
///
/// `τ_0 = 0.1`, then `τ_n = min(1, τ_{n−1}·r_{n−1}/r_n)`; a step that does not
/// lower the residual norm is retried with `τ` halved, and the run fails once
/// the halvings are exhausted.
pub fn canm_solve<T: Real>(
    params: &MediumParams<T>,
    k: usize,
    guess: &[T],
    mesh: &Mesh1D<T>,
    options: &CanmOptions<T>,
) -> Result<SelfSimilarSolution<T>> {
    let op = ProfileOperator::new(params, mesh)?;
    canm_solve_with(&op, k, guess, options)
}

pub fn canm_solve_with<T: Real>(
    op: &ProfileOperator<T>,
    k: usize,
    guess: &[T],
    options: &CanmOptions<T>,
) -> Result<SelfSimilarSolution<T>> {
    check_len(op, guess)?;
    if let Some(i) = guess.iter().position(|&g| g < T::zero() || !g.is_finite()) {
        return Err(Error::GuessRejected(format!("guess value {} at dof {i}", guess[i])));
    }
    let mut theta = guess.to_vec();
    let mut r = op.residual(&theta);
    let mut norm = op.norm(&r);
    let mut tau = options.tau0;
    let mut steps = Vec::new();
    let mut iterations = 0;
    while !(norm < options.tolerance) {
        if iterations >= options.max_iterations {
            return Err(Error::MaxIterations {
                max_iterations: options.max_iterations,
                residual: norm.to_f64_lossy(),
            });
        }
        let rhs: Vec<T> = r.iter().map(|&v| -v).collect();
        let v = op.jacobian(&theta).solve(&rhs)?;
        let mut accepted = None;
        for _ in 0..=options.max_halvings {
            let trial: Vec<T> = theta.iter().zip(&v).map(|(&t, &d)| t + tau * d).collect();
            let rt = op.residual(&trial);
            let nt = op.norm(&rt);
            if nt < norm {
                accepted = Some((trial, rt, nt));
                break;
            }
            tau = tau / T::lit(2.0);
        }
        let Some((trial, rt, nt)) = accepted else {
            return Err(Error::Diverged {
                iteration: iterations,
                residual: norm.to_f64_lossy(),
            });
        };
        iterations += 1;
        log::debug!("canm step {iterations}: tau {tau:e}, residual {norm:e} -> {nt:e}");
        steps.push(NewtonStep {
            tau,
            direction: v,
            residual_before: norm,
            residual_after: nt,
        });
        tau = (tau * norm / nt).min(T::one());
        theta = trial;
        r = rt;
        norm = nt;
    }
    let max = theta.iter().copied().fold(T::zero(), T::max);
    let bound = options.envelope * op.params.theta_h();
    if max > bound {
        return Err(Error::OutOfEnvelope {
            max: max.to_f64_lossy(),
            bound: bound.to_f64_lossy(),
        });
    }
    let floor = -options.clamp_tolerance * max.max(op.params.theta_h());
    for (i, t) in theta.iter_mut().enumerate() {
        if *t < floor {
            return Err(Error::NegativeValues {
                node: i,
                value: t.to_f64_lossy(),
            });
        }
        if *t < T::zero() {
            *t = T::zero();
        }
    }
    Ok(SelfSimilarSolution {
        params: op.params,
        k,
        mesh: op.mesh.clone(),
        theta,
        residual_norm: norm,
        iterations,
        steps,
    })
}

/// Amplitudes tried, in order, for LS guesses.
pub const LS_AMPLITUDES: [f64; 10] = [0.05, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9];

/// Bump radii (fractions of the mesh length) and amplitudes tried for HS guesses.
pub const HS_RADII: [f64; 5] = [0.3, 0.375, 0.25, 0.5, 0.2];
pub const HS_AMPLITUDES: [f64; 2] = [1.5, 3.0];

/// Solves for the `k`-th profile, trying a family of guesses and returning the
/// first converged profile with the right structure: `k` crossings of `θ_H`
/// in the LS regime, a nontrivial profile whose support ends before `0.9·l`
/// in the HS regime. S-regime solves start from the multibump guess when
/// `N = 1` or `k > 1`, and from the HS family of bumps otherwise. LS solves
/// that fail for every amplitude fall back to continuation from `N − 1`.
pub fn solve_profile<T: Real>(
    params: &MediumParams<T>,
    k: usize,
    mesh: &Mesh1D<T>,
    options: &CanmOptions<T>,
) -> Result<SelfSimilarSolution<T>> {
    let op = ProfileOperator::new(params, mesh)?;
    let th = params.theta_h();
    match classify(params).kind {
        RegimeKind::S if params.dim == 1 || k > 1 => {
            let g = build_s_guess(params, k, mesh)?;
            canm_solve_with(&op, k, &g.values.values, options)
        }
        RegimeKind::S | RegimeKind::HS => {
            let l = mesh.length();
            let mut last = None;
            for &rf in &HS_RADII {
                for &amp in &HS_AMPLITUDES {
                    let g = bump_guess(params, T::lit(rf) * l, T::lit(amp), mesh);
                    match canm_solve_with(&op, k, &g.values.values, options) {
                        Ok(s) if s.theta[0] > th / T::lit(2.0)
                            && s.support_edge(T::lit(1e-3) * s.amplitude()) < T::lit(0.9) * l =>
                        {
                            return Ok(s)
                        }
                        Ok(s) => {
                            last = Some(Error::GuessRejected(format!(
                                "converged to a profile with theta(0) = {}",
                                s.theta[0]
                            )))
                        }
                        Err(e) => last = Some(e),
                    }
                }
            }
            Err(last.unwrap_or_else(|| Error::GuessRejected("no guess tried".into())))
        }
        RegimeKind::LS | RegimeKind::BeyondFujita => {
            let mut last = None;
            for &amp in &LS_AMPLITUDES {
                let g = match build_ls_guess(params, k, T::lit(amp), mesh) {
                    Ok(g) => g,
                    Err(e) => {
                        last = Some(e);
                        continue;
                    }
                };
                match canm_solve_with(&op, k, &g.values.values, options) {
                    Ok(s) if s.crossings() == k => return Ok(s),
                    Ok(s) => {
                        last = Some(Error::GuessRejected(format!(
                            "converged profile has {} crossings of theta_H, need {k}",
                            s.crossings()
                        )))
                    }
                    Err(e) => last = Some(e),
                }
            }
            // continuation in the dimension from the profile one dimension lower
            if params.dim > 1 {
                let lower = MediumParams {
                    dim: params.dim - 1,
                    ..*params
                };
                if let Ok(s) = solve_profile(&lower, k, mesh, options) {
                    match canm_solve_with(&op, k, &s.theta, options) {
                        Ok(s) if s.crossings() == k => return Ok(s),
                        Ok(_) => {}
                        Err(e) => last = Some(e),
                    }
                }
            }
            Err(last.unwrap_or_else(|| Error::GuessRejected("no amplitude tried".into())))
        }
    }
}

/// Default truncation length: `(1.5·k + 1)·L_s/2` in S for `N = 1`, `2·L_s`
/// in HS and in S for `N > 1`, and 20 in LS.
pub fn default_length<T: Real>(params: &MediumParams<T>, k: usize) -> T {
    let ls = fundamental_length(params.sigma);
    match classify(params).kind {
        RegimeKind::S if params.dim == 1 || k > 1 => {
            (T::lit(1.5) * T::from_usize_lossy(k.max(1)) + T::one()) * ls / T::lit(2.0)
        }
        RegimeKind::S => T::lit(2.0) * ls,
        RegimeKind::HS => T::lit(2.0) * ls,
        _ => T::lit(20.0),
    }
}

/// Observed orders of a mesh-refinement study.
#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceStudy<T> {
    pub h: Vec<T>,
    /// Nodal max-errors over all dofs.
    pub errors: Vec<T>,
    /// `log2(e_i / e_{i+1})` between consecutive meshes.
    pub orders: Vec<T>,
    /// Nodal max-errors where the reference exceeds half its maximum,
    /// away from the front singularity.
    pub interior_errors: Vec<T>,
    pub interior_orders: Vec<T>,
    pub iterations: Vec<usize>,
    /// False when the errors do not decrease monotonically.
    pub conclusive: bool,
}

/// Nodal max-errors on a sequence of meshes, against `exact` when given and
/// against the finest solution (sampled at the coarse dofs) otherwise.
pub fn convergence_study<T: Real>(
    params: &MediumParams<T>,
    k: usize,
    meshes: &[Mesh1D<T>],
    guess: impl Fn(&Mesh1D<T>) -> Vec<T>,
    exact: Option<&dyn Fn(T) -> T>,
    options: &CanmOptions<T>,
) -> Result<ConvergenceStudy<T>> {
    let ops = meshes
        .iter()
        .map(|m| ProfileOperator::new(params, m))
        .collect::<Result<Vec<_>>>()?;
    convergence_study_with(&ops, k, guess, exact, options)
}

/// [`convergence_study`] on explicitly configured operators.
pub fn convergence_study_with<T: Real>(
    ops: &[ProfileOperator<T>],
    k: usize,
    guess: impl Fn(&Mesh1D<T>) -> Vec<T>,
    exact: Option<&dyn Fn(T) -> T>,
    options: &CanmOptions<T>,
) -> Result<ConvergenceStudy<T>> {
    let meshes: Vec<&Mesh1D<T>> = ops.iter().map(|op| &op.mesh).collect();
    if meshes.len() < 3 {
        return Err(Error::InvalidMesh(format!(
            "a convergence study needs at least 3 meshes, got {}",
            meshes.len()
        )));
    }
    let sols = ops
        .iter()
        .map(|op| canm_solve_with(op, k, &guess(&op.mesh), options))
        .collect::<Result<Vec<_>>>()?;
    let finest = sols.last().expect("nonempty").profile();
    let reference = |x: T| match exact {
        Some(f) => f(x),
        None => finest.eval(x),
    };
    let used = if exact.is_some() { sols.len() } else { sols.len() - 1 };
    let mut errors = Vec::with_capacity(used);
    let mut interior_errors = Vec::with_capacity(used);
    for s in &sols[..used] {
        let x = s.mesh.dof_coords();
        let refs: Vec<T> = x.iter().map(|&xi| reference(xi)).collect();
        let cut = refs.iter().copied().fold(T::zero(), T::max) / T::lit(2.0);
        let (mut all, mut inner) = (T::zero(), T::zero());
        for (&t, &r) in s.theta.iter().zip(&refs) {
            let e = (t - r).abs();
            all = all.max(e);
            if r >= cut {
                inner = inner.max(e);
            }
        }
        errors.push(all);
        interior_errors.push(inner);
    }
    let rates = |e: &[T]| e.windows(2).map(|w| (w[0] / w[1]).log2()).collect::<Vec<T>>();
    Ok(ConvergenceStudy {
        h: meshes[..used].iter().map(|m| m.h_max()).collect(),
        orders: rates(&errors),
        interior_orders: rates(&interior_errors),
        conclusive: errors.windows(2).all(|w| w[1] < w[0]),
        errors,
        interior_errors,
        iterations: sols.iter().map(|s| s.iterations).collect(),
    })
}
