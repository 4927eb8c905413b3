//! Lagrange shape functions, Gauss quadrature and the radially weighted
//! element loop shared by the profile and evolution solvers.

use crate::banded::BandedMatrix;
use crate::mesh::{ElementKind, Mesh1D};
use crate::scalar::Real;

/// Gauss–Legendre rule on `[0, 1]` as `(abscissa, weight)` pairs.
fn gauss_rule(points: usize) -> &'static [(f64, f64)] {
    // 3- and 5-point rules mapped from [−1, 1]
    const G3: [(f64, f64); 3] = [
        (0.112_701_665_379_258_31, 0.277_777_777_777_777_8),
        (0.5, 0.444_444_444_444_444_4),
        (0.887_298_334_620_741_7, 0.277_777_777_777_777_8),
    ];
    const G5: [(f64, f64); 5] = [
        (0.046_910_077_030_668_00, 0.118_463_442_528_094_5),
        (0.230_765_344_947_158_5, 0.239_314_335_249_683_2),
        (0.5, 0.284_444_444_444_444_4),
        (0.769_234_655_052_841_5, 0.239_314_335_249_683_2),
        (0.953_089_922_969_332, 0.118_463_442_528_094_5),
    ];
    match points {
        3 => &G3,
        5 => &G5,
        _ => panic!("unsupported rule"),
    }
}

/// One quadrature point of an element, with the radial weight folded into `wt`.
#[derive(Debug, Clone, Copy)]
pub struct QuadPoint<T> {
    pub xi: T,
    /// `w_q · h · ξ^{N−1}`
    pub wt: T,
    pub phi: [T; 3],
    pub dphi: [T; 3],
}

fn shape<T: Real>(kind: ElementKind, s: T, h: T) -> ([T; 3], [T; 3]) {
    let two = T::lit(2.0);
    match kind {
        ElementKind::Linear => (
            [T::one() - s, s, T::zero()],
            [-T::one() / h, T::one() / h, T::zero()],
        ),
        ElementKind::Quadratic => (
            [
                (T::one() - s) * (T::one() - two * s),
                T::lit(4.0) * s * (T::one() - s),
                s * (two * s - T::one()),
            ],
            [
                (T::lit(4.0) * s - T::lit(3.0)) / h,
                (T::lit(4.0) - T::lit(8.0) * s) / h,
                (T::lit(4.0) * s - T::one()) / h,
            ],
        ),
    }
}

/// Radial weight `ξ^{N−1}`.
#[inline]
pub fn radial_weight<T: Real>(xi: T, dim: usize) -> T {
    match dim {
        1 => T::one(),
        2 => xi,
        3 => xi * xi,
        _ => xi.powi(dim as i32 - 1),
    }
}

/// Precomputed quadrature data for every element of a mesh.
#[derive(Debug, Clone)]
pub struct ElementData<T> {
    pub kind: ElementKind,
    pub dofs: Vec<[usize; 3]>,
    pub points: Vec<Vec<QuadPoint<T>>>,
    pub n_dofs: usize,
}

impl<T: Real> ElementData<T> {
    /// 3-point Gauss for linear, 5-point for quadratic elements.
    pub fn new(mesh: &Mesh1D<T>, dim: usize) -> Self {
        let kind = mesh.kind();
        let rule = match kind {
            ElementKind::Linear => gauss_rule(3),
            ElementKind::Quadratic => gauss_rule(5),
        };
        let mut dofs = Vec::with_capacity(mesh.n_elements());
        let mut points = Vec::with_capacity(mesh.n_elements());
        for e in 0..mesh.n_elements() {
            let (a, b) = mesh.element(e);
            let h = b - a;
            let qps = rule
                .iter()
                .map(|&(s, w)| {
                    let s = T::lit(s);
                    let xi = a + s * h;
                    let (phi, dphi) = shape(kind, s, h);
                    QuadPoint {
                        xi,
                        wt: T::lit(w) * h * radial_weight(xi, dim),
                        phi,
                        dphi,
                    }
                })
                .collect();
            dofs.push(mesh.element_dofs(e));
            points.push(qps);
        }
        Self {
            kind,
            dofs,
            points,
            n_dofs: mesh.n_dofs(),
        }
    }

    pub fn nloc(&self) -> usize {
        self.kind.local_dofs()
    }

    pub fn half_bandwidth(&self) -> usize {
        self.nloc() - 1
    }

    pub fn empty_matrix(&self) -> BandedMatrix<T> {
        let hb = self.half_bandwidth();
        BandedMatrix::zeros(self.n_dofs, hb, hb)
    }

    /// Value of the finite element function with dof vector `u` at a quadrature point.
    #[inline]
    pub fn value_at(&self, e: usize, q: &QuadPoint<T>, u: &[T]) -> T {
        let d = &self.dofs[e];
        (0..self.nloc()).map(|a| q.phi[a] * u[d[a]]).sum()
    }

    #[inline]
    pub fn slope_at(&self, e: usize, q: &QuadPoint<T>, u: &[T]) -> T {
        let d = &self.dofs[e];
        (0..self.nloc()).map(|a| q.dphi[a] * u[d[a]]).sum()
    }

    /// Weighted stiffness `K_ij = ∫ ξ^{N−1} φ_i' φ_j' dξ`.
    pub fn stiffness(&self) -> BandedMatrix<T> {
        let mut k = self.empty_matrix();
        let n = self.nloc();
        for (e, qps) in self.points.iter().enumerate() {
            let d = &self.dofs[e];
            for q in qps {
                for a in 0..n {
                    for b in 0..n {
                        k.add(d[a], d[b], q.wt * q.dphi[a] * q.dphi[b]);
                    }
                }
            }
        }
        k
    }

    /// Weighted advection `A_ij = ∫ ξ^{N−1} ξ φ_i φ_j' dξ`.
    pub fn advection(&self) -> BandedMatrix<T> {
        let mut m = self.empty_matrix();
        let n = self.nloc();
        for (e, qps) in self.points.iter().enumerate() {
            let d = &self.dofs[e];
            for q in qps {
                for a in 0..n {
                    for b in 0..n {
                        m.add(d[a], d[b], q.wt * q.xi * q.phi[a] * q.dphi[b]);
                    }
                }
            }
        }
        m
    }

    /// Consistent weighted mass `∫ ξ^{N−1} φ_i φ_j dξ`.
    pub fn mass(&self) -> BandedMatrix<T> {
        let mut m = self.empty_matrix();
        let n = self.nloc();
        for (e, qps) in self.points.iter().enumerate() {
            let d = &self.dofs[e];
            for q in qps {
                for a in 0..n {
                    for b in 0..n {
                        m.add(d[a], d[b], q.wt * q.phi[a] * q.phi[b]);
                    }
                }
            }
        }
        m
    }

    /// Row-sum lumped mass `∫ ξ^{N−1} φ_i dξ`.
    pub fn lumped_mass(&self) -> Vec<T> {
        let mut m = vec![T::zero(); self.n_dofs];
        let n = self.nloc();
        for (e, qps) in self.points.iter().enumerate() {
            let d = &self.dofs[e];
            for q in qps {
                for a in 0..n {
                    m[d[a]] += q.wt * q.phi[a];
                }
            }
        }
        m
    }
}
