//! Medium parameters, regime classification and the self-similar scaling laws.
//!
//! The medium is `u_t = x^{1-N} (x^{N-1} u^σ u_x)_x + u^β` in radial symmetry.
//! Everything downstream is parameterised by the triple `(σ, β, N)` together
//! with the blow-up time convention `T₀`.

use crate::error::{Error, Result};
use crate::scalar::{rel_eq, Real};

/// Relative tolerance used to detect the analytic boundary `β = σ + 1`.
pub const REGIME_REL_TOL: f64 = 1e-12;

/// Problem parameters `(σ, β, N, T₀)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MediumParams<T> {
    pub sigma: T,
    pub beta: T,
    pub dim: usize,
    pub t0: T,
}

impl<T: Real> MediumParams<T> {
    /// Parameters with the default blow-up time `T₀ = 1/(β − 1)`, for which `θ_H = 1`.
    pub fn new(sigma: T, beta: T, dim: usize) -> Result<Self> {
        let p = Self {
            sigma,
            beta,
            dim,
            t0: T::one() / (beta - T::one()),
        };
        p.validate()?;
        Ok(p)
    }

    pub fn with_t0(mut self, t0: T) -> Result<Self> {
        self.t0 = t0;
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.sigma > T::zero()) || !self.sigma.is_finite() {
            return Err(Error::InvalidParams(format!("sigma must be > 0, got {}", self.sigma)));
        }
        if !(self.beta > T::one()) || !self.beta.is_finite() {
            return Err(Error::InvalidParams(format!("beta must be > 1, got {}", self.beta)));
        }
        if self.dim < 1 {
            return Err(Error::InvalidParams("dim must be >= 1".into()));
        }
        if !(self.t0 > T::zero()) || !self.t0.is_finite() {
            return Err(Error::InvalidParams(format!("t0 must be > 0, got {}", self.t0)));
        }
        Ok(())
    }

    pub fn dim_real(&self) -> T {
        T::from_usize_lossy(self.dim)
    }

    /// `m = (β − σ − 1)/2`.
    pub fn m(&self) -> T {
        (self.beta - self.sigma - T::one()) / T::lit(2.0)
    }

    /// `θ_H = (T₀(β − 1))^{−1/(β−1)}`, the nonzero constant solution of the profile equation.
    pub fn theta_h(&self) -> T {
        let bm1 = self.beta - T::one();
        (self.t0 * bm1).powf(-T::one() / bm1)
    }

    /// Coefficient of `ξθ'` in the profile operator: `(β−σ−1) / (2(β−1)T₀)`.
    pub fn advection_coeff(&self) -> T {
        (self.beta - self.sigma - T::one()) / (T::lit(2.0) * (self.beta - T::one()) * self.t0)
    }

    /// Coefficient of `θ` in the profile operator: `1 / ((β−1)T₀)`.
    pub fn linear_coeff(&self) -> T {
        T::one() / ((self.beta - T::one()) * self.t0)
    }

    pub fn is_s_regime(&self) -> bool {
        rel_eq(self.beta, self.sigma + T::one(), T::lit(REGIME_REL_TOL))
    }

    /// Fujita exponent `β_f = σ + 1 + 2/N`.
    pub fn beta_fujita(&self) -> T {
        self.sigma + T::one() + T::lit(2.0) / self.dim_real()
    }

    /// Sobolev exponent `(σ+1)(N+2)/(N−2)`, defined for `N ≥ 3`.
    pub fn beta_sobolev(&self) -> Option<T> {
        if self.dim < 3 {
            return None;
        }
        let n = self.dim_real();
        Some((self.sigma + T::one()) * (n + T::lit(2.0)) / (n - T::lit(2.0)))
    }

    /// `β_u = (σ+1)(1 + 4/(N − 4 − 2√(N−1)))`, defined for `N ≥ 11`.
    pub fn beta_u(&self) -> Option<T> {
        if self.dim < 11 {
            return None;
        }
        let n = self.dim_real();
        let denom = n - T::lit(4.0) - T::lit(2.0) * (n - T::one()).sqrt();
        Some((self.sigma + T::one()) * (T::one() + T::lit(4.0) / denom))
    }

    /// `β_p = 1 + 3(σ+1) + √(σ²(N−10)² + 2σ(5σ+1)(N−10) + 9(σ+1)²)/(N−10)`, defined for `N ≥ 11`.
    pub fn beta_p(&self) -> Option<T> {
        if self.dim < 11 {
            return None;
        }
        let s = self.sigma;
        let d = self.dim_real() - T::lit(10.0);
        let disc = s * s * d * d
            + T::lit(2.0) * s * (T::lit(5.0) * s + T::one()) * d
            + T::lit(9.0) * (s + T::one()) * (s + T::one());
        Some(T::one() + T::lit(3.0) * (s + T::one()) + disc.sqrt() / d)
    }

    /// `a = (β − 1)/(β − σ − 1)`, the quantity controlling the solution count.
    /// Undefined in the S-regime.
    pub fn kummer_ratio(&self) -> Option<T> {
        if self.is_s_regime() {
            None
        } else {
            Some((self.beta - T::one()) / (self.beta - self.sigma - T::one()))
        }
    }

    /// Exponent `2/(β − σ − 1)` of the power tail `θ ~ C ξ^{−2/(β−σ−1)}`.
    pub fn tail_exponent(&self) -> T {
        T::lit(2.0) / (self.beta - self.sigma - T::one())
    }
}

/// Combustion regime of the medium.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RegimeKind {
    /// `β < σ + 1`: total blow-up, heat wave.
    HS,
    /// `β = σ + 1`: regional blow-up on the fundamental length.
    S,
    /// `σ + 1 < β < β_f`: single-point blow-up.
    LS,
    /// `β ≥ β_f`.
    BeyondFujita,
}

impl RegimeKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            RegimeKind::HS => "HS",
            RegimeKind::S => "S",
            RegimeKind::LS => "LS",
            RegimeKind::BeyondFujita => "BeyondFujita",
        }
    }
}

impl std::fmt::Display for RegimeKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Regime plus the critical-exponent flags that apply for the given dimension.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Regime {
    pub kind: RegimeKind,
    /// `β > β_s`; present only for `N ≥ 3`.
    pub beyond_sobolev: Option<bool>,
    /// `β > β_u`; present only for `N ≥ 11`.
    pub beyond_u: Option<bool>,
    /// `β > β_p`; present only for `N ≥ 11`.
    pub beyond_p: Option<bool>,
}

pub fn classify<T: Real>(params: &MediumParams<T>) -> Regime {
    let s1 = params.sigma + T::one();
    let kind = if params.is_s_regime() {
        RegimeKind::S
    } else if params.beta < s1 {
        RegimeKind::HS
    } else if params.beta < params.beta_fujita() {
        RegimeKind::LS
    } else {
        RegimeKind::BeyondFujita
    };
    Regime {
        kind,
        beyond_sobolev: params.beta_sobolev().map(|b| params.beta > b),
        beyond_u: params.beta_u().map(|b| params.beta > b),
        beyond_p: params.beta_p().map(|b| params.beta > b),
    }
}

/// Lower bound and refined count of distinct self-similar functions for `β > σ + 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolutionCount<T> {
    pub a: T,
    /// `K = −⌊−a⌋ − 1`.
    pub lower_bound: usize,
    /// `⌊a⌋` for non-integer `a`, `a − 1` for integer `a`.
    pub refined: usize,
}

impl<T> SolutionCount<T> {
    pub fn differs(&self) -> bool {
        self.lower_bound != self.refined
    }
}

pub fn solution_count<T: Real>(params: &MediumParams<T>) -> Result<SolutionCount<T>> {
    let s1 = params.sigma + T::one();
    if params.is_s_regime() || params.beta <= s1 {
        return Err(Error::Undefined {
            what: "solution count",
            context: format!("beta = {} <= sigma + 1 = {}", params.beta, s1),
        });
    }
    let a = (params.beta - T::one()) / (params.beta - s1);
    let a_round = a.round();
    let integer = rel_eq(a, a_round, T::lit(REGIME_REL_TOL));
    // −⌊−a⌋ = ⌈a⌉
    let ceil = if integer { a_round } else { a.ceil() };
    let lower_bound = (ceil - T::one()).to_usize().unwrap_or(usize::MAX);
    let refined = if integer {
        (a_round - T::one()).to_usize().unwrap_or(usize::MAX)
    } else {
        a.floor().to_usize().unwrap_or(usize::MAX)
    };
    Ok(SolutionCount {
        a,
        lower_bound,
        refined,
    })
}

pub fn theta_h<T: Real>(params: &MediumParams<T>) -> T {
    params.theta_h()
}

/// Amplitude factor `φ(t)` and length factor `ψ(t)` of the self-similar solution.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Scaling<T> {
    pub phi: T,
    pub psi: T,
}

pub fn scaling_laws<T: Real>(params: &MediumParams<T>, t: T) -> Result<Scaling<T>> {
    if !(t >= T::zero()) || t >= params.t0 {
        return Err(Error::Undefined {
            what: "self-similar scaling",
            context: format!("t = {} outside [0, T0 = {})", t, params.t0),
        });
    }
    let s = T::one() - t / params.t0;
    let bm1 = params.beta - T::one();
    Ok(Scaling {
        phi: s.powf(-T::one() / bm1),
        psi: s.powf(params.m() / bm1),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn p(sigma: f64, beta: f64, n: usize) -> MediumParams<f64> {
        MediumParams::new(sigma, beta, n).unwrap()
    }

    #[test]
    fn classify_examples() {
        assert_eq!(classify(&p(2.0, 3.0, 1)).kind, RegimeKind::S);
        assert_eq!(classify(&p(2.0, 2.4, 1)).kind, RegimeKind::HS);
        assert_eq!(classify(&p(2.0, 3.6, 1)).kind, RegimeKind::LS);
        assert_eq!(classify(&p(2.0, 6.0, 1)).kind, RegimeKind::BeyondFujita);
        // β_f = 5 exactly is already beyond
        assert_eq!(classify(&p(2.0, 5.0, 1)).kind, RegimeKind::BeyondFujita);
    }

    #[test]
    fn s_regime_tolerance() {
        assert_eq!(classify(&p(2.0, 3.0 + 1e-13, 1)).kind, RegimeKind::S);
        assert_eq!(classify(&p(2.0, 3.0 + 1e-9, 1)).kind, RegimeKind::LS);
    }

    #[test]
    fn exponent_flags_follow_dimension() {
        let r1 = classify(&p(2.0, 3.6, 1));
        assert_eq!(r1.beyond_sobolev, None);
        assert_eq!(r1.beyond_u, None);
        let r3 = classify(&p(2.0, 3.6, 3));
        // β_s = 3·5/1 = 15
        assert_eq!(r3.beyond_sobolev, Some(false));
        assert_eq!(r3.beyond_u, None);
        let r12 = classify(&p(1.0, 4.0, 12));
        assert!(r12.beyond_u.is_some() && r12.beyond_p.is_some());
    }

    #[test]
    fn critical_exponent_formulas() {
        let q = p(2.0, 3.6, 3);
        assert_relative_eq!(q.beta_sobolev().unwrap(), 15.0);
        let q = p(1.0, 3.0, 11);
        // β_u = 2(1 + 4/(7 − 2√10))
        let bu = 2.0 * (1.0 + 4.0 / (7.0 - 2.0 * 10f64.sqrt()));
        assert_relative_eq!(q.beta_u().unwrap(), bu, max_relative = 1e-14);
        // β_p at N = 11, σ = 1: 1 + 6 + √(1 + 12 + 36)/1 = 14
        assert_relative_eq!(q.beta_p().unwrap(), 14.0, max_relative = 1e-14);
    }

    #[test]
    fn solution_count_examples() {
        let c = solution_count(&p(2.0, 3.6, 1)).unwrap();
        assert_eq!(c.lower_bound, 4);
        assert_eq!(c.refined, 4);
        let c = solution_count(&p(2.0, 4.0, 1)).unwrap();
        assert_eq!(c.lower_bound, 2);
        assert_eq!(c.refined, 2);
        assert!(!c.differs());
        let c = solution_count(&p(2.0, 100.0, 1)).unwrap();
        assert_eq!(c.lower_bound, 1);
        assert!(solution_count(&p(2.0, 3.0, 1)).is_err());
        assert!(solution_count(&p(2.0, 2.4, 1)).is_err());
    }

    #[test]
    fn theta_h_examples() {
        assert_relative_eq!(p(2.0, 3.0, 1).with_t0(0.5).unwrap().theta_h(), 1.0);
        assert_relative_eq!(p(2.0, 3.0, 1).with_t0(2.0).unwrap().theta_h(), 0.5);
        assert_relative_eq!(p(1.0, 2.0, 1).with_t0(1.0).unwrap().theta_h(), 1.0);
    }

    #[test]
    fn scaling_examples() {
        let q = p(2.0, 3.0, 1);
        let s = scaling_laws(&q, 0.0).unwrap();
        assert_eq!((s.phi, s.psi), (1.0, 1.0));
        let s = scaling_laws(&q, 0.375).unwrap();
        assert_relative_eq!(s.phi, 2.0, max_relative = 1e-14);
        assert_relative_eq!(s.psi, 1.0);
        assert!(scaling_laws(&q, 0.5).is_err());
        let ls = p(2.0, 3.6, 1);
        let a = scaling_laws(&ls, 0.1).unwrap().psi;
        let b = scaling_laws(&ls, 0.3).unwrap().psi;
        assert!(b < a);
    }

    #[test]
    fn rejects_invalid() {
        assert!(MediumParams::new(0.0, 3.0, 1).is_err());
        assert!(MediumParams::new(2.0, 0.5, 1).is_err());
        assert!(MediumParams::new(2.0, 3.0, 0).is_err());
        assert!(MediumParams::new(2.0_f64, 3.0, 1).unwrap().with_t0(-1.0).is_err());
    }

    #[test]
    fn generic_over_f32() {
        let q = MediumParams::new(2.0_f32, 3.6, 1).unwrap();
        assert_eq!(classify(&q).kind, RegimeKind::LS);
        assert!((q.theta_h() - 1.0).abs() < 1e-6);
    }
}
