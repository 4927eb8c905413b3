//! Closed-form reference profiles: the elementary S-regime solution, its
//! multi-bump compositions, and the power-tail slope used at truncation
//! points in the LS regime.

use crate::error::{Error, Result};
use crate::medium::MediumParams;
use crate::scalar::Real;

/// Elementary S-regime profile for `N = 1`, `β = σ + 1`, `T₀ = 1/σ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ElementaryProfile<T> {
    pub params: MediumParams<T>,
    /// Fundamental length `L_s = 2π√(σ+1)/σ` (diameter of the support).
    pub fundamental_length: T,
    /// Half-maximum radius `x_s = L_s·arccos(2^{−σ/2})/π`.
    pub semi_width: T,
}

impl<T: Real> ElementaryProfile<T> {
    pub fn new(sigma: T) -> Result<Self> {
        let params = MediumParams::new(sigma, sigma + T::one(), 1)?;
        Ok(Self {
            params,
            fundamental_length: fundamental_length(sigma),
            semi_width: semi_width(sigma),
        })
    }

    pub fn eval(&self, xi: T) -> T {
        zk_eval(self.params.sigma, xi)
    }

    /// Front point `L_s/2`.
    pub fn front(&self) -> T {
        self.fundamental_length / T::lit(2.0)
    }

    pub fn amplitude(&self) -> T {
        self.eval(T::zero())
    }
}

pub fn fundamental_length<T: Real>(sigma: T) -> T {
    T::lit(2.0) * T::PI() * (sigma + T::one()).sqrt() / sigma
}

pub fn semi_width<T: Real>(sigma: T) -> T {
    let c = T::lit(2.0).powf(-sigma / T::lit(2.0));
    fundamental_length(sigma) * c.acos() / T::PI()
}

/// `(2(σ+1)/(σ+2)·cos²(πξ/L_s))^{1/σ}` on `|ξ| ≤ L_s/2`, zero outside.
pub fn zk_eval<T: Real>(sigma: T, xi: T) -> T {
    let ls = fundamental_length(sigma);
    if xi.abs() > ls / T::lit(2.0) {
        return T::zero();
    }
    let c = (T::PI() * xi / ls).cos();
    let amp = T::lit(2.0) * (sigma + T::one()) / (sigma + T::lit(2.0));
    // cos can dip a hair below zero at the front through rounding
    (amp * c * c).max(T::zero()).powf(T::one() / sigma)
}

/// `k` elementary profiles with abutting supports, symmetric about the origin.
///
/// Bump `j` (for `j = 0..k`) is centred at `(j − (k−1)/2)·L_s`, so the total
/// support is `[−k·L_s/2, k·L_s/2]`. For odd `k` a bump sits on the origin; for
/// even `k` the origin is a junction with value zero.
pub fn zk_multibump<T: Real>(sigma: T, k: usize, xi: T) -> T {
    if k == 0 {
        return T::zero();
    }
    let ls = fundamental_length(sigma);
    let half_total = T::from_usize_lossy(k) * ls / T::lit(2.0);
    let x = xi.abs();
    if x > half_total {
        return T::zero();
    }
    // offset from the left edge of the composite support, in units of L_s
    let s = (x + half_total) / ls;
    let j = s.floor().min(T::from_usize_lossy(k - 1));
    let centre = (j + T::lit(0.5)) * ls - half_total;
    zk_eval(sigma, x - centre)
}

/// Boundary slope `θ' = −(2/(β−σ−1))·θ/ξ` implied by the power tail
/// `θ ~ C ξ^{−2/(β−σ−1)}`; independent of the unknown constant `C`.
pub fn ls_tail_slope<T: Real>(params: &MediumParams<T>, xi: T, theta: T) -> Result<T> {
    if params.is_s_regime() || params.beta <= params.sigma + T::one() {
        return Err(Error::Undefined {
            what: "power-tail slope",
            context: format!("beta = {} <= sigma + 1", params.beta),
        });
    }
    if !(xi > T::zero()) {
        return Err(Error::Undefined {
            what: "power-tail slope",
            context: format!("xi = {xi} <= 0"),
        });
    }
    Ok(-params.tail_exponent() * theta / xi)
}
