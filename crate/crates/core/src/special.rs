//! Real-parameter special functions used by the linearised profiles:
//! Kummer's confluent hypergeometric function `₁F₁(a; b; z)`, integer-order
//! Bessel functions `J_k(z)` and the limit function `₀F₁(; b; z)`.
//!
//! All series use Neumaier-compensated summation and a term budget of
//! [`MAX_TERMS`]. Working range for `₁F₁`: `|z| ≤ 300` (beyond that the
//! budget is exhausted or `e^z` overflows).

use crate::error::{Error, Result};
use crate::scalar::Real;

pub const MAX_TERMS: usize = 500;

/// Neumaier compensated accumulator.
#[derive(Debug, Clone, Copy, Default)]
pub(crate) struct CompensatedSum<T> {
    sum: T,
    comp: T,
}

impl<T: Real> CompensatedSum<T> {
    pub fn new() -> Self {
        Self {
            sum: T::zero(),
            comp: T::zero(),
        }
    }

    pub fn add(&mut self, x: T) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> T {
        self.sum + self.comp
    }
}

fn is_nonpositive_integer<T: Real>(x: T) -> bool {
    x <= T::zero() && x == x.round()
}

/// Kummer's function `₁F₁(a; b; z) = Σ (a)_n z^n / ((b)_n n!)`.
pub fn kummer_1f1<T: Real>(a: T, b: T, z: T) -> Result<T> {
    if is_nonpositive_integer(b) {
        return Err(Error::Domain {
            function: "1F1",
            detail: format!("b = {b} is a nonpositive integer"),
        });
    }
    if !(a.is_finite() && b.is_finite() && z.is_finite()) {
        return Err(Error::Domain {
            function: "1F1",
            detail: format!("non-finite argument (a = {a}, b = {b}, z = {z})"),
        });
    }
    if z == T::zero() || a == T::zero() {
        return Ok(T::one());
    }
    // Kummer transformation avoids the alternating cancellation for z < 0.
    if z < T::zero() && !is_nonpositive_integer(a) {
        let inner = kummer_series(b - a, b, -z)?;
        let value = z.exp() * inner;
        return check_finite("1F1", value);
    }
    kummer_series(a, b, z)
}

fn check_finite<T: Real>(function: &'static str, value: T) -> Result<T> {
    if value.is_finite() {
        Ok(value)
    } else {
        Err(Error::Overflow(format!("{function} evaluation is not finite")))
    }
}

fn kummer_series<T: Real>(a: T, b: T, z: T) -> Result<T> {
    let eps = T::epsilon();
    let mut acc = CompensatedSum::new();
    let mut term = T::one();
    acc.add(term);
    let mut small_run = 0;
    for n in 0..MAX_TERMS {
        let nf = T::from_usize_lossy(n);
        term = term * (a + nf) * z / ((b + nf) * (nf + T::one()));
        if term == T::zero() {
            // terminating polynomial
            return check_finite("1F1", acc.value());
        }
        acc.add(term);
        if !acc.value().is_finite() {
            return Err(Error::Overflow(format!("1F1({a}, {b}, {z})")));
        }
        // require the ratio to be contracting before trusting a small term
        let contracting = nf + T::one() > (a.abs() + z.abs()).max(T::zero());
        if contracting && term.abs() <= eps * acc.value().abs() {
            small_run += 1;
            if small_run >= 2 {
                return Ok(acc.value());
            }
        } else {
            small_run = 0;
        }
    }
    Err(Error::SeriesNotConverged {
        function: "1F1",
        terms: MAX_TERMS,
    })
}

/// `₀F₁(; b; z) = Σ z^n / ((b)_n n!)`.
pub fn hyp0f1<T: Real>(b: T, z: T) -> Result<T> {
    if is_nonpositive_integer(b) {
        return Err(Error::Domain {
            function: "0F1",
            detail: format!("b = {b} is a nonpositive integer"),
        });
    }
    let eps = T::epsilon();
    let mut acc = CompensatedSum::new();
    let mut term = T::one();
    acc.add(term);
    for n in 0..MAX_TERMS {
        let nf = T::from_usize_lossy(n);
        term = term * z / ((b + nf) * (nf + T::one()));
        acc.add(term);
        if nf * nf > z.abs() && term.abs() <= eps * acc.value().abs() {
            return check_finite("0F1", acc.value());
        }
    }
    Err(Error::SeriesNotConverged {
        function: "0F1",
        terms: MAX_TERMS,
    })
}

/// Below this |z| the power series is used for `J_k`.
const BESSEL_SERIES_LIMIT: f64 = 17.0;

/// Bessel function of the first kind of integer order.
pub fn bessel_j<T: Real>(k: u32, z: T) -> T {
    if z < T::zero() {
        let v = bessel_j(k, -z);
        return if k % 2 == 1 { -v } else { v };
    }
    let kf = T::from_u32(k).expect("order out of range");
    if z <= T::lit(BESSEL_SERIES_LIMIT) || kf * kf >= z {
        bessel_series(k, z)
    } else {
        bessel_asymptotic(kf, z)
    }
}

fn bessel_series<T: Real>(k: u32, z: T) -> T {
    let half = z / T::lit(2.0);
    // (z/2)^k / k!
    let mut lead = T::one();
    for i in 1..=k {
        lead = lead * half / T::from_u32(i).unwrap();
    }
    if lead == T::zero() {
        return T::zero();
    }
    let q = -half * half;
    let kf = T::from_u32(k).unwrap();
    let mut acc = CompensatedSum::new();
    let mut term = T::one();
    acc.add(term);
    for j in 1..MAX_TERMS {
        let jf = T::from_usize_lossy(j);
        term = term * q / (jf * (jf + kf));
        acc.add(term);
        if jf * jf > q.abs() && term.abs() <= T::epsilon() * acc.value().abs() {
            break;
        }
    }
    lead * acc.value()
}

/// Hankel expansion `J_ν(z) ≈ √(2/(πz)) (P cos χ − Q sin χ)`, truncated at the smallest term.
fn bessel_asymptotic<T: Real>(nu: T, z: T) -> T {
    let mu = T::lit(4.0) * nu * nu;
    let chi = z - (nu / T::lit(2.0) + T::lit(0.25)) * T::PI();
    let mut p = CompensatedSum::new();
    let mut q = CompensatedSum::new();
    let mut term = T::one();
    let mut last = T::infinity();
    p.add(term);
    for k in 1..60usize {
        let kf = T::from_usize_lossy(k);
        let odd = T::lit(2.0) * kf - T::one();
        term = term * (mu - odd * odd) / (kf * T::lit(8.0) * z);
        if term.abs() >= last {
            break;
        }
        last = term.abs();
        // a_k/z^k with sign pattern (−1)^{⌊k/2⌋}
        let signed = if (k / 2) % 2 == 0 { term } else { -term };
        if k % 2 == 0 {
            p.add(signed);
        } else {
            q.add(signed);
        }
        if term.abs() < T::epsilon() {
            break;
        }
    }
    (T::lit(2.0) / (T::PI() * z)).sqrt() * (p.value() * chi.cos() - q.value() * chi.sin())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn kummer_examples() {
        assert_eq!(kummer_1f1(0.3, 1.7, 0.0).unwrap(), 1.0);
        assert_relative_eq!(kummer_1f1(1.0, 1.0, 1.0).unwrap(), std::f64::consts::E, max_relative = 1e-14);
        assert_relative_eq!(kummer_1f1(-1.0, 2.0, 3.0).unwrap(), -0.5, max_relative = 1e-14);
        assert_relative_eq!(kummer_1f1(1.0, 1.0, -5.0).unwrap(), (-5.0f64).exp(), max_relative = 1e-13);
        assert_relative_eq!(kummer_1f1(1.0, 1.0, 30.0).unwrap(), 30f64.exp(), max_relative = 1e-13);
    }

    #[test]
    fn kummer_domain_errors() {
        assert!(matches!(kummer_1f1(1.0, -2.0, 1.0), Err(Error::Domain { .. })));
        assert!(matches!(kummer_1f1(1.0, 0.0, 1.0), Err(Error::Domain { .. })));
        assert!(kummer_1f1(1.0, 1.0, 2000.0).is_err());
    }

    /// `₁F₁(1/2; 3/2; −x²) = √π erf(x)/(2x)`; compared with a Simpson quadrature of `e^{−t²}`.
    #[test]
    fn kummer_matches_error_function() {
        for &x in &[0.3_f64, 1.0, 2.5] {
            let n = 2000;
            let h = x / n as f64;
            let mut s = 1.0 + (-x * x).exp();
            for i in 1..n {
                let t = i as f64 * h;
                s += if i % 2 == 1 { 4.0 } else { 2.0 } * (-t * t).exp();
            }
            let integral = s * h / 3.0;
            let expected = integral / x;
            assert_relative_eq!(kummer_1f1(0.5, 1.5, -x * x).unwrap(), expected, max_relative = 1e-11);
        }
    }

    #[test]
    fn bessel_small_values() {
        assert_eq!(bessel_j(0, 0.0_f64), 1.0);
        assert_eq!(bessel_j(1, 0.0_f64), 0.0);
        assert_relative_eq!(bessel_j(0, 1.0_f64), 0.765_197_686_557_966_6, max_relative = 1e-14);
        assert_relative_eq!(bessel_j(1, 1.0_f64), 0.440_050_585_744_933_5, max_relative = 1e-14);
        assert_relative_eq!(bessel_j(2, -1.0_f64), 0.114_903_484_931_900_5, max_relative = 1e-13);
        assert_relative_eq!(bessel_j(1, -1.0_f64), -0.440_050_585_744_933_5, max_relative = 1e-14);
    }

    /// Both evaluation routes must agree where they meet, and the recurrence
    /// `J_{k−1} + J_{k+1} = (2k/z) J_k` must hold across the switch.
    #[test]
    fn bessel_routes_agree() {
        for &z in &[17.5_f64, 18.5, 20.0] {
            let s = bessel_series(0, z);
            let a = bessel_asymptotic(0.0, z);
            assert!((s - a).abs() < 1e-8, "z = {z}: {s} vs {a}");
        }
        for &z in &[10.0_f64, 18.0, 30.0, 45.0] {
            let lhs = bessel_j(1, z) + bessel_j(3, z);
            let rhs = 4.0 / z * bessel_j(2, z);
            assert!((lhs - rhs).abs() < 1e-10, "z = {z}");
        }
    }

    #[test]
    fn hyp0f1_elementary() {
        // ₀F₁(; 1/2; −x²/4) = cos x ; ₀F₁(; 3/2; −x²/4) = sin x / x
        for &x in &[0.5_f64, 2.0, 7.0] {
            assert_relative_eq!(hyp0f1(0.5, -x * x / 4.0).unwrap(), x.cos(), epsilon = 1e-13);
            assert_relative_eq!(hyp0f1(1.5, -x * x / 4.0).unwrap(), x.sin() / x, epsilon = 1e-13);
        }
    }

    #[test]
    fn compensated_sum_recovers_small_terms() {
        let mut acc = CompensatedSum::<f64>::new();
        acc.add(1.0);
        for _ in 0..10 {
            acc.add(1e-17);
        }
        acc.add(-1.0);
        assert_relative_eq!(acc.value(), 1e-16, max_relative = 1e-10);
    }
}
