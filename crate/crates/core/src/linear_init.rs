//! Initial approximations for the self-similar profiles.
//!
//! Around the constant solution `θ_H` the profile equation linearises to
//!
//! ```text
//! θ_H^σ (y'' + (N−1)/ξ · y') − m̂ ξ y' + (β−1)c · y = 0,   y(0) = 1, y'(0) = 0,
//! ```
//!
//! whose bounded solution is `₁F₁(−(β−1)c/(2m̂); N/2; m̂ξ²/(2θ_H^σ))` off the
//! S-regime and `₀F₁(; N/2; −ω²ξ²/4)` with `ω² = (β−1)c/θ_H^σ` on it (a cosine,
//! `J₀` or `sin(x)/x` for `N = 1, 2, 3`). Guesses for the `k`-th LS profile
//! perturb `θ_H` by `α·y` up to a sewing point and continue with the power tail.

use crate::error::{Error, Result};
use crate::exact::zk_multibump;
use crate::medium::{classify, MediumParams, RegimeKind};
use crate::mesh::{crossings, GridFunction, Mesh1D};
use crate::scalar::Real;
use crate::special::{bessel_j, hyp0f1, kummer_1f1};

/// Largest |argument| of the special functions accepted when sampling `y`.
pub const MAX_ARGUMENT: f64 = 300.0;

/// Points per unit length of the scan used to locate zeros and extrema of `y`.
const SCAN_DENSITY: f64 = 200.0;

/// An initial approximation `θ₀` for the `k`-th profile.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearApproximation<T> {
    pub params: MediumParams<T>,
    pub k: usize,
    /// Amplitude of the linear perturbation (zero for non-linearised guesses).
    pub alpha: T,
    /// Start of the power tail; the mesh length when there is no tail.
    pub sew_point: T,
    /// Interval on which `1 + α·y` was negative and clamped to zero.
    pub clamp_interval: Option<(T, T)>,
    /// `θ₀` at the dof coordinates of the mesh it was built for.
    pub values: GridFunction<T>,
}

impl<T: Real> LinearApproximation<T> {
    /// Number of sign changes of `θ₀ − θ_H`.
    pub fn crossings(&self) -> usize {
        crossings(&self.values.values, self.params.theta_h(), T::lit(1e-9))
    }
}

/// Argument of the special function at `ξ`.
fn argument<T: Real>(params: &MediumParams<T>, xi: T) -> T {
    let diff = params.theta_h().powf(params.sigma);
    if params.is_s_regime() {
        let omega2 = (params.beta - T::one()) * params.linear_coeff() / diff;
        -omega2 * xi * xi / T::lit(4.0)
    } else {
        params.advection_coeff() * xi * xi / (T::lit(2.0) * diff)
    }
}

fn profile_at<T: Real>(params: &MediumParams<T>, xi: T) -> Result<T> {
    let z = argument(params, xi);
    if z.abs() > T::lit(MAX_ARGUMENT) {
        return Err(Error::Overflow(format!(
            "linearised profile argument {z} at xi = {xi} exceeds {MAX_ARGUMENT}"
        )));
    }
    let half_n = params.dim_real() / T::lit(2.0);
    if params.is_s_regime() {
        let x = T::lit(2.0) * (-z).sqrt();
        match params.dim {
            1 => Ok(x.cos()),
            2 => Ok(bessel_j(0, x)),
            3 if x > T::zero() => Ok(x.sin() / x),
            _ => hyp0f1(half_n, z),
        }
    } else {
        let a = -(params.beta - T::one()) * params.linear_coeff()
            / (T::lit(2.0) * params.advection_coeff());
        kummer_1f1(a, half_n, z)
    }
}

/// Bounded solution `y` of the linearised profile equation on `xi_grid`.
pub fn linearized_profile<T: Real>(params: &MediumParams<T>, xi_grid: &[T]) -> Result<Vec<T>> {
    params.validate()?;
    xi_grid.iter().map(|&x| profile_at(params, x)).collect()
}

/// Largest `ξ` at which `y` can be sampled within [`MAX_ARGUMENT`].
pub fn max_profile_radius<T: Real>(params: &MediumParams<T>) -> T {
    let unit = argument(params, T::one()).abs();
    (T::lit(MAX_ARGUMENT) / unit).sqrt()
}

/// Zeros of `y` on `[0, xi_max]` (scan plus bisection) and the scan itself.
#[derive(Debug, Clone)]
struct Oscillation<T> {
    zeros: Vec<T>,
    scan: Vec<(T, T)>,
}

fn oscillation<T: Real>(params: &MediumParams<T>, xi_max: T) -> Result<Oscillation<T>> {
    let n = (xi_max * T::lit(SCAN_DENSITY)).ceil().to_f64_lossy().max(16.0) as usize;
    let h = xi_max / T::from_usize_lossy(n);
    let scan = (0..=n)
        .map(|i| {
            let x = T::from_usize_lossy(i) * h;
            profile_at(params, x).map(|y| (x, y))
        })
        .collect::<Result<Vec<_>>>()?;
    let mut zeros = Vec::new();
    for w in scan.windows(2) {
        let ((x0, y0), (x1, y1)) = (w[0], w[1]);
        if y0 == T::zero() {
            zeros.push(x0);
        } else if y0 * y1 < T::zero() {
            let (mut a, mut b, mut fa) = (x0, x1, y0);
            for _ in 0..60 {
                let mid = (a + b) / T::lit(2.0);
                let fm = profile_at(params, mid)?;
                if fm * fa <= T::zero() {
                    b = mid;
                } else {
                    a = mid;
                    fa = fm;
                }
            }
            zeros.push((a + b) / T::lit(2.0));
        }
    }
    Ok(Oscillation { zeros, scan })
}

/// Point of largest `|y|` of the scan inside `[lo, hi]`.
fn extremum<T: Real>(scan: &[(T, T)], lo: T, hi: T) -> (T, T) {
    scan.iter()
        .filter(|(x, _)| *x >= lo && *x <= hi)
        .copied()
        .fold((lo, T::zero()), |best, p| if p.1.abs() > best.1.abs() { p } else { best })
}

/// Guess for the `k`-th LS profile with perturbation amplitude `amp`.
///
/// For `k = 1`, `α = amp` and the tail is attached where the logarithmic slope
/// of `1 + α·y` first reaches the tail value `−p` (or at its steepest point
/// before the first zero of `y`). For `k ≥ 2`, `α` is normalised so that
/// `|α·y| = amp` at the extremum of `y` between its `(k−1)`-th and `k`-th
/// zeros, which is also the sewing point.
pub fn build_ls_guess<T: Real>(
    params: &MediumParams<T>,
    k: usize,
    amp: T,
    mesh: &Mesh1D<T>,
) -> Result<LinearApproximation<T>> {
    if k == 0 {
        return Err(Error::InvalidParams("structure index k must be >= 1".into()));
    }
    let th = params.theta_h();
    let p = params.tail_exponent();
    let l = mesh.length();
    let osc = oscillation(params, l.min(max_profile_radius(params)))?;
    if osc.zeros.len() < k {
        return Err(Error::GuessRejected(format!(
            "linearised profile has {} zeros before xi = {l}, need {k}",
            osc.zeros.len()
        )));
    }
    let sign = if k % 2 == 1 { T::one() } else { -T::one() };
    let (alpha, sew) = if k == 1 {
        let alpha = amp;
        let z1 = osc.zeros[0];
        let mut steepest = (T::zero(), T::infinity());
        let mut sew = None;
        for w in osc.scan.windows(2) {
            let ((x0, y0), (x1, y1)) = (w[0], w[1]);
            if x1 > z1 {
                break;
            }
            let (t0, t1) = (T::one() + alpha * y0, T::one() + alpha * y1);
            if !(t0 > T::zero() && t1 > T::zero()) || x0 == T::zero() {
                continue;
            }
            let xm = (x0 + x1) / T::lit(2.0);
            let slope = xm * (t1.ln() - t0.ln()) / (x1 - x0);
            if slope < steepest.1 {
                steepest = (x1, slope);
            }
            if slope <= -p {
                sew = Some(x1);
                break;
            }
        }
        (alpha, sew.unwrap_or(steepest.0))
    } else {
        let lo = osc.zeros[k - 2];
        let hi = osc.zeros[k - 1];
        let (x_ext, y_ext) = extremum(&osc.scan, lo, hi);
        if y_ext == T::zero() {
            return Err(Error::GuessRejected(format!("no extremum of y in [{lo}, {hi}]")));
        }
        (sign * amp / y_ext.abs(), x_ext)
    };
    if !(sew > T::zero() && sew < l) {
        return Err(Error::GuessRejected(format!(
            "sewing point {sew} outside (0, {l})"
        )));
    }
    let base = T::one() + alpha * profile_at(params, sew)?;
    if !(base > T::zero()) {
        return Err(Error::GuessRejected(format!("nonpositive value at sewing point {sew}")));
    }
    let theta_sew = th * base;
    let coords = mesh.dof_coords();
    let mut clamp: Option<(T, T)> = None;
    let mut values = Vec::with_capacity(coords.len());
    for &x in &coords {
        let v = if x <= sew {
            let lin = T::one() + alpha * profile_at(params, x)?;
            if lin < T::zero() {
                clamp = Some(match clamp {
                    None => (x, x),
                    Some((a, _)) => (a, x),
                });
            }
            th * lin.max(T::zero())
        } else {
            theta_sew * (sew / x).powf(p)
        };
        values.push(v);
    }
    Ok(LinearApproximation {
        params: *params,
        k,
        alpha,
        sew_point: sew,
        clamp_interval: clamp,
        values: GridFunction::new(coords, values),
    })
}

/// S-regime guess: `k` elementary profiles scaled by `θ_H`.
pub fn build_s_guess<T: Real>(
    params: &MediumParams<T>,
    k: usize,
    mesh: &Mesh1D<T>,
) -> Result<LinearApproximation<T>> {
    if !params.is_s_regime() {
        return Err(Error::InvalidParams(format!(
            "beta = {} is not sigma + 1 = {}",
            params.beta,
            params.sigma + T::one()
        )));
    }
    let th = params.theta_h();
    let coords = mesh.dof_coords();
    let values = GridFunction::from_fn(coords, |x| th * zk_multibump(params.sigma, k, x));
    Ok(LinearApproximation {
        params: *params,
        k,
        alpha: T::zero(),
        sew_point: mesh.length(),
        clamp_interval: None,
        values,
    })
}

/// Compactly supported bump `θ_H·(amp·cos²(πξ/(2R)))^{1/σ}` on `[0, R]`, used
/// as a starting profile for HS solves.
pub fn bump_guess<T: Real>(
    params: &MediumParams<T>,
    radius: T,
    amp: T,
    mesh: &Mesh1D<T>,
) -> LinearApproximation<T> {
    let th = params.theta_h();
    let sigma = params.sigma;
    let values = GridFunction::from_fn(mesh.dof_coords(), |x| {
        if x >= radius {
            T::zero()
        } else {
            let c = (T::PI() * x / (T::lit(2.0) * radius)).cos();
            th * (amp * c * c).powf(T::one() / sigma)
        }
    });
    LinearApproximation {
        params: *params,
        k: 1,
        alpha: T::zero(),
        sew_point: radius,
        clamp_interval: None,
        values,
    }
}

/// Regime-dispatched guess: LS uses the linearisation with the smallest
/// amplitude whose guess has `k` crossings, S uses multibump profiles and HS
/// a bump of radius half the mesh length.
pub fn build_guess<T: Real>(
    params: &MediumParams<T>,
    k: usize,
    mesh: &Mesh1D<T>,
) -> Result<LinearApproximation<T>> {
    match classify(params).kind {
        RegimeKind::S => build_s_guess(params, k, mesh),
        RegimeKind::HS => Ok(bump_guess(params, mesh.length() / T::lit(2.0), T::lit(1.5), mesh)),
        RegimeKind::LS | RegimeKind::BeyondFujita => {
            let mut last = None;
            for i in 1..=9 {
                let amp = T::lit(0.1) * T::from_usize_lossy(i);
                match build_ls_guess(params, k, amp, mesh) {
                    Ok(g) if g.crossings() == k => return Ok(g),
                    Ok(g) => {
                        last = Some(Error::GuessRejected(format!(
                            "guess has {} crossings of theta_H, need {k}",
                            g.crossings()
                        )))
                    }
                    Err(e) => last = Some(e),
                }
            }
            Err(last.unwrap_or_else(|| Error::GuessRejected("no amplitude accepted".into())))
        }
    }
}
