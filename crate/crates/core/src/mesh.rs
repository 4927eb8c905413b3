//! Nonuniform radial meshes and nodal grid functions.

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Minimum number of elements a mesh may have.
pub const MIN_ELEMENTS: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ElementKind {
    Linear,
    Quadratic,
}

impl ElementKind {
    /// Local degrees of freedom per element.
    pub fn local_dofs(self) -> usize {
        match self {
            ElementKind::Linear => 2,
            ElementKind::Quadratic => 3,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            ElementKind::Linear => "linear",
            ElementKind::Quadratic => "quadratic",
        }
    }
}

impl std::str::FromStr for ElementKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "linear" | "p1" => Ok(ElementKind::Linear),
            "quadratic" | "p2" => Ok(ElementKind::Quadratic),
            other => Err(Error::InvalidMesh(format!("unknown element kind '{other}'"))),
        }
    }
}

/// Radial mesh on `[0, l]`: strictly increasing vertices starting at zero.
///
/// For quadratic elements each element carries an extra midpoint degree of
/// freedom; dof `2e` is the left vertex of element `e`, `2e + 1` its midpoint.
#[derive(Debug, Clone, PartialEq)]
pub struct Mesh1D<T> {
    vertices: Vec<T>,
    kind: ElementKind,
}

impl<T: Real> Mesh1D<T> {
    pub fn new(vertices: Vec<T>, kind: ElementKind) -> Result<Self> {
        if vertices.len() < MIN_ELEMENTS + 1 {
            return Err(Error::InvalidMesh(format!(
                "need at least {MIN_ELEMENTS} elements, got {}",
                vertices.len().saturating_sub(1)
            )));
        }
        if vertices[0] != T::zero() {
            return Err(Error::InvalidMesh(format!("first node must be 0, got {}", vertices[0])));
        }
        if let Some(i) = vertices.windows(2).position(|w| !(w[1] > w[0])) {
            return Err(Error::InvalidMesh(format!(
                "nodes must be strictly increasing (element {i}: {} -> {})",
                vertices[i],
                vertices[i + 1]
            )));
        }
        Ok(Self { vertices, kind })
    }

    pub fn uniform(length: T, elements: usize, kind: ElementKind) -> Result<Self> {
        if !(length > T::zero()) {
            return Err(Error::InvalidMesh(format!("length must be positive, got {length}")));
        }
        let h = length / T::from_usize_lossy(elements.max(1));
        let mut v: Vec<T> = (0..=elements).map(|i| T::from_usize_lossy(i) * h).collect();
        if let Some(last) = v.last_mut() {
            *last = length;
        }
        Self::new(v, kind)
    }

    pub fn kind(&self) -> ElementKind {
        self.kind
    }

    pub fn vertices(&self) -> &[T] {
        &self.vertices
    }

    pub fn n_elements(&self) -> usize {
        self.vertices.len() - 1
    }

    pub fn n_dofs(&self) -> usize {
        match self.kind {
            ElementKind::Linear => self.vertices.len(),
            ElementKind::Quadratic => 2 * self.n_elements() + 1,
        }
    }

    pub fn length(&self) -> T {
        *self.vertices.last().expect("mesh is never empty")
    }

    pub fn element(&self, e: usize) -> (T, T) {
        (self.vertices[e], self.vertices[e + 1])
    }

    pub fn element_length(&self, e: usize) -> T {
        self.vertices[e + 1] - self.vertices[e]
    }

    pub fn h_max(&self) -> T {
        (0..self.n_elements())
            .map(|e| self.element_length(e))
            .fold(T::zero(), T::max)
    }

    pub fn h_min(&self) -> T {
        (0..self.n_elements())
            .map(|e| self.element_length(e))
            .fold(T::infinity(), T::min)
    }

    /// Global dof indices of element `e`, in local order.
    pub fn element_dofs(&self, e: usize) -> [usize; 3] {
        match self.kind {
            ElementKind::Linear => [e, e + 1, usize::MAX],
            ElementKind::Quadratic => [2 * e, 2 * e + 1, 2 * e + 2],
        }
    }

    /// Coordinates of every degree of freedom.
    pub fn dof_coords(&self) -> Vec<T> {
        match self.kind {
            ElementKind::Linear => self.vertices.clone(),
            ElementKind::Quadratic => {
                let mut out = Vec::with_capacity(self.n_dofs());
                for e in 0..self.n_elements() {
                    let (a, b) = self.element(e);
                    out.push(a);
                    out.push((a + b) / T::lit(2.0));
                }
                out.push(self.length());
                out
            }
        }
    }

    /// Half-band width of the assembled operators (1 for linear, 2 for quadratic).
    pub fn half_bandwidth(&self) -> usize {
        self.kind.local_dofs() - 1
    }

    /// Halves every element.
    pub fn refined(&self) -> Self {
        self.split(&vec![true; self.n_elements()])
    }

    /// Splits the flagged elements into two equal halves.
    pub fn split(&self, flags: &[bool]) -> Self {
        debug_assert_eq!(flags.len(), self.n_elements());
        let mut v = Vec::with_capacity(self.vertices.len() * 2);
        for e in 0..self.n_elements() {
            let (a, b) = self.element(e);
            v.push(a);
            if flags[e] {
                v.push((a + b) / T::lit(2.0));
            }
        }
        v.push(self.length());
        Self {
            vertices: v,
            kind: self.kind,
        }
    }

    /// Mesh with every coordinate multiplied by `factor` (> 0).
    pub fn scaled(&self, factor: T) -> Self {
        Self {
            vertices: self.vertices.iter().map(|&x| x * factor).collect(),
            kind: self.kind,
        }
    }
}

/// Nodal values on a set of increasing coordinates, with piecewise-linear evaluation.
#[derive(Debug, Clone, PartialEq)]
pub struct GridFunction<T> {
    pub xi: Vec<T>,
    pub values: Vec<T>,
}

impl<T: Real> GridFunction<T> {
    pub fn new(xi: Vec<T>, values: Vec<T>) -> Self {
        assert_eq!(xi.len(), values.len(), "coordinates and values differ in length");
        Self { xi, values }
    }

    pub fn from_fn(xi: Vec<T>, f: impl Fn(T) -> T) -> Self {
        let values = xi.iter().map(|&x| f(x)).collect();
        Self { xi, values }
    }

    pub fn len(&self) -> usize {
        self.xi.len()
    }

    pub fn is_empty(&self) -> bool {
        self.xi.is_empty()
    }

    pub fn max(&self) -> T {
        self.values.iter().copied().fold(T::neg_infinity(), T::max)
    }

    pub fn min(&self) -> T {
        self.values.iter().copied().fold(T::infinity(), T::min)
    }

    /// Piecewise-linear interpolation; zero outside `[xi[0], xi[last]]`.
    pub fn eval(&self, x: T) -> T {
        interpolate(&self.xi, &self.values, x).unwrap_or_else(T::zero)
    }
}

/// Piecewise-linear interpolation of `(xs, ys)` at `x`; `None` outside the range.
pub fn interpolate<T: Real>(xs: &[T], ys: &[T], x: T) -> Option<T> {
    let n = xs.len();
    if n == 0 || x < xs[0] || x > xs[n - 1] {
        return None;
    }
    if n == 1 {
        return Some(ys[0]);
    }
    // index of the first node strictly greater than x
    let j = xs.partition_point(|&v| v <= x).clamp(1, n - 1);
    let (x0, x1) = (xs[j - 1], xs[j]);
    let s = (x - x0) / (x1 - x0);
    Some(ys[j - 1] + s * (ys[j] - ys[j - 1]))
}

/// Number of sign changes of `values − level`, ignoring entries within `tol` of the level.
pub fn crossings<T: Real>(values: &[T], level: T, tol: T) -> usize {
    let mut last: Option<bool> = None;
    let mut count = 0;
    for &v in values {
        let d = v - level;
        if d.abs() <= tol {
            continue;
        }
        let positive = d > T::zero();
        if let Some(prev) = last {
            if prev != positive {
                count += 1;
            }
        }
        last = Some(positive);
    }
    count
}
