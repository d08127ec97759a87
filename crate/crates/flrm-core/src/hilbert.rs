//! Discretized separable Hilbert space: grids, curves, and kernel operators.
//!
//! A [`Grid`] fixes the abscissa points and quadrature weights shared by all
//! functions in one analysis, a [`Curve`] is a function evaluated on a grid,
//! and a [`LinearOperator`] acts through an `m x m` kernel so that
//! `(Kf)(t_i) = sum_j K[i,j] w_j f(t_j)`. Every inner product and tensor
//! product downstream has exactly this numerical meaning.

use std::sync::Arc;

use nalgebra::DMatrix;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum HilbertError {
    #[error("curves live on different grids (sizes {left} and {right})")]
    GridMismatch { left: usize, right: usize },
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("non-finite value at position {0}")]
    NonFinite(usize),
    #[error("kernel is {rows}x{cols} but grid has {grid} points")]
    KernelShape { rows: usize, cols: usize, grid: usize },
}

/// Quadrature abscissas and positive weights on a closed interval.
///
/// The uniform constructor places `m` midpoints with rectangle weights
/// `(b - a) / m`, which makes the discrete Fourier modes orthonormal to
/// machine precision. Grids built from explicit points get composite
/// trapezoid weights.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid {
    points: Vec<f64>,
    weights: Vec<f64>,
}

impl Grid {
    pub fn new(points: Vec<f64>, weights: Vec<f64>) -> Result<Arc<Self>, HilbertError> {
        if points.len() < 2 {
            return Err(HilbertError::InvalidGrid("need at least 2 points".into()));
        }
        if points.len() != weights.len() {
            return Err(HilbertError::InvalidGrid(format!(
                "{} points but {} weights",
                points.len(),
                weights.len()
            )));
        }
        if points.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(HilbertError::InvalidGrid(
                "points must be strictly increasing".into(),
            ));
        }
        if points.iter().chain(weights.iter()).any(|v| !v.is_finite()) {
            return Err(HilbertError::InvalidGrid("non-finite point or weight".into()));
        }
        if weights.iter().any(|&w| w <= 0.0) {
            return Err(HilbertError::InvalidGrid("weights must be positive".into()));
        }
        Ok(Arc::new(Self { points, weights }))
    }

    /// Uniform grid of `m` midpoints on `[a, b]` with rectangle weights.
    pub fn uniform(a: f64, b: f64, m: usize) -> Result<Arc<Self>, HilbertError> {
        if !(a < b) {
            return Err(HilbertError::InvalidGrid(format!("empty interval [{a}, {b}]")));
        }
        let step = (b - a) / m as f64;
        let points = (0..m).map(|i| a + (i as f64 + 0.5) * step).collect();
        let weights = vec![step; m];
        Self::new(points, weights)
    }

    /// Uniform grid on the unit interval.
    pub fn uniform_unit(m: usize) -> Result<Arc<Self>, HilbertError> {
        Self::uniform(0.0, 1.0, m)
    }

    /// Grid over caller-supplied points with composite trapezoid weights.
    pub fn from_points(points: Vec<f64>) -> Result<Arc<Self>, HilbertError> {
        if points.len() < 2 {
            return Err(HilbertError::InvalidGrid("need at least 2 points".into()));
        }
        let m = points.len();
        let mut weights = vec![0.0; m];
        weights[0] = (points[1] - points[0]) / 2.0;
        weights[m - 1] = (points[m - 1] - points[m - 2]) / 2.0;
        for i in 1..m - 1 {
            weights[i] = (points[i + 1] - points[i - 1]) / 2.0;
        }
        Self::new(points, weights)
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }
}

/// Two curves interoperate only when they share a grid. Pointer equality is
/// the fast path; structural equality covers grids rebuilt from files.
pub fn same_grid(a: &Arc<Grid>, b: &Arc<Grid>) -> bool {
    Arc::ptr_eq(a, b) || a == b
}

fn check_same_grid(a: &Arc<Grid>, b: &Arc<Grid>) -> Result<(), HilbertError> {
    if same_grid(a, b) {
        Ok(())
    } else {
        Err(HilbertError::GridMismatch {
            left: a.len(),
            right: b.len(),
        })
    }
}

/// A function observed on a shared grid.
#[derive(Debug, Clone)]
pub struct Curve {
    grid: Arc<Grid>,
    values: Vec<f64>,
}

impl Curve {
    pub fn new(grid: Arc<Grid>, values: Vec<f64>) -> Result<Self, HilbertError> {
        if values.len() != grid.len() {
            return Err(HilbertError::GridMismatch {
                left: grid.len(),
                right: values.len(),
            });
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(HilbertError::NonFinite(i));
        }
        Ok(Self { grid, values })
    }

    pub fn zeros(grid: Arc<Grid>) -> Self {
        let values = vec![0.0; grid.len()];
        Self { grid, values }
    }

    /// Evaluate `f` at every grid point.
    pub fn from_fn(grid: Arc<Grid>, f: impl Fn(f64) -> f64) -> Self {
        let values = grid.points().iter().map(|&t| f(t)).collect();
        Self { grid, values }
    }

    pub fn grid(&self) -> &Arc<Grid> {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// `self + c * other`, in place.
    pub fn axpy(&mut self, c: f64, other: &Curve) -> Result<(), HilbertError> {
        check_same_grid(&self.grid, &other.grid)?;
        for (v, o) in self.values.iter_mut().zip(&other.values) {
            *v += c * o;
        }
        Ok(())
    }

    pub fn scale(&mut self, c: f64) {
        for v in self.values.iter_mut() {
            *v *= c;
        }
    }

    pub fn norm(&self) -> f64 {
        inner_product(self, self).expect("same grid").max(0.0).sqrt()
    }
}

/// Weighted quadrature inner product `sum_i w_i a_i b_i`.
pub fn inner_product(a: &Curve, b: &Curve) -> Result<f64, HilbertError> {
    check_same_grid(&a.grid, &b.grid)?;
    let w = a.grid.weights();
    let mut acc = 0.0;
    for i in 0..w.len() {
        acc += w[i] * a.values[i] * b.values[i];
    }
    Ok(acc)
}

/// Bounded linear operator represented by its kernel matrix:
/// `(Kf)(t_i) = sum_j K[i,j] w_j f(t_j)`.
#[derive(Debug, Clone)]
pub struct LinearOperator {
    grid: Arc<Grid>,
    kernel: DMatrix<f64>,
}

impl LinearOperator {
    pub fn new(grid: Arc<Grid>, kernel: DMatrix<f64>) -> Result<Self, HilbertError> {
        if kernel.nrows() != grid.len() || kernel.ncols() != grid.len() {
            return Err(HilbertError::KernelShape {
                rows: kernel.nrows(),
                cols: kernel.ncols(),
                grid: grid.len(),
            });
        }
        if let Some(i) = kernel.as_slice().iter().position(|v| !v.is_finite()) {
            return Err(HilbertError::NonFinite(i));
        }
        Ok(Self { grid, kernel })
    }

    /// Builds a symmetric operator, averaging `(K + K^T) / 2` to kill
    /// asymmetry accumulated in floating point before eigendecomposition.
    pub fn new_symmetric(grid: Arc<Grid>, kernel: DMatrix<f64>) -> Result<Self, HilbertError> {
        let sym = (&kernel + kernel.transpose()) * 0.5;
        Self::new(grid, sym)
    }

    pub fn zeros(grid: Arc<Grid>) -> Self {
        let m = grid.len();
        Self {
            grid,
            kernel: DMatrix::zeros(m, m),
        }
    }

    pub fn grid(&self) -> &Arc<Grid> {
        &self.grid
    }

    pub fn kernel(&self) -> &DMatrix<f64> {
        &self.kernel
    }

    pub fn is_symmetric(&self, rel_tol: f64) -> bool {
        let scale = self.kernel.amax().max(1e-300);
        for i in 0..self.kernel.nrows() {
            for j in (i + 1)..self.kernel.ncols() {
                if (self.kernel[(i, j)] - self.kernel[(j, i)]).abs() > rel_tol * scale {
                    return false;
                }
            }
        }
        true
    }

    /// `self + c * other`, in place.
    pub fn axpy(&mut self, c: f64, other: &LinearOperator) -> Result<(), HilbertError> {
        check_same_grid(&self.grid, &other.grid)?;
        self.kernel.zip_apply(&other.kernel, |k, o| *k += c * o);
        Ok(())
    }

    /// Frobenius norm of the kernel matrix.
    pub fn frobenius(&self) -> f64 {
        self.kernel.norm()
    }
}

/// Rank-one tensor product `a (x) b`, acting as `z -> <z, a> b`.
pub fn tensor_product(a: &Curve, b: &Curve) -> Result<LinearOperator, HilbertError> {
    check_same_grid(&a.grid, &b.grid)?;
    let m = a.len();
    let mut kernel = DMatrix::zeros(m, m);
    for i in 0..m {
        for j in 0..m {
            kernel[(i, j)] = b.values[i] * a.values[j];
        }
    }
    LinearOperator::new(a.grid.clone(), kernel)
}

/// Apply an operator to a curve through the quadrature rule.
pub fn apply(op: &LinearOperator, f: &Curve) -> Result<Curve, HilbertError> {
    check_same_grid(&op.grid, &f.grid)?;
    let m = f.len();
    let w = op.grid.weights();
    let mut out = vec![0.0; m];
    for i in 0..m {
        let row = op.kernel.row(i);
        let mut acc = 0.0;
        for j in 0..m {
            acc += row[j] * w[j] * f.values[j];
        }
        out[i] = acc;
    }
    Curve::new(op.grid.clone(), out)
}
