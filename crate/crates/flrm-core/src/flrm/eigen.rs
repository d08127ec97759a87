//! Eigendecomposition of symmetric kernel operators and truncated inverses.

use nalgebra::{DMatrix, DVector};

use crate::hilbert::{Curve, LinearOperator};

use super::FlrmError;

/// Leading eigenpairs of a symmetric positive semi-definite operator.
///
/// Eigenvalues are sorted in decreasing order and clipped at a numerical
/// rank tolerance; eigenfunctions are orthonormal in the grid's weighted
/// inner product and carry a deterministic sign (the entry of largest
/// magnitude is positive, earliest grid index winning ties).
#[derive(Debug, Clone)]
pub struct EigenSystem {
    eigenvalues: Vec<f64>,
    eigenfunctions: Vec<Curve>,
    rank: usize,
    rank_tol: f64,
}

impl EigenSystem {
    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn eigenfunctions(&self) -> &[Curve] {
        &self.eigenfunctions
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    /// Threshold below which eigenvalues were treated as zero.
    pub fn rank_tol(&self) -> f64 {
        self.rank_tol
    }

    pub(crate) fn empty(rank_tol: f64) -> Self {
        Self {
            eigenvalues: Vec::new(),
            eigenfunctions: Vec::new(),
            rank: 0,
            rank_tol,
        }
    }
}

/// Numerical rank threshold: `dim * eps * lead`, the usual scaled-machine-
/// epsilon rule with `dim = max(grid size, sample size)`.
pub(crate) fn rank_tolerance(dim: usize, lead: f64) -> f64 {
    dim as f64 * f64::EPSILON * lead.max(0.0)
}

/// Flip the sign so the entry of largest magnitude is positive; the earliest
/// grid index wins ties. Removes the inherent sign ambiguity so that golden
/// outputs and bootstrap runs reproduce.
fn canonicalize_sign(values: &mut [f64]) {
    let mut best = 0usize;
    for i in 1..values.len() {
        if values[i].abs() > values[best].abs() {
            best = i;
        }
    }
    if values[best] < 0.0 {
        for v in values.iter_mut() {
            *v = -*v;
        }
    }
}

/// Eigendecompose a symmetric PSD operator, keeping at most `max_rank`
/// pairs. The rank tolerance is scaled by `tol_dim` (callers that know the
/// sample size pass `max(m, n)`).
pub fn eigendecompose_with_dim(
    op: &LinearOperator,
    max_rank: usize,
    tol_dim: usize,
) -> Result<EigenSystem, FlrmError> {
    if !op.is_symmetric(1e-8) {
        return Err(FlrmError::NotSymmetric);
    }
    let grid = op.grid().clone();
    let m = grid.len();
    let w = grid.weights();
    let sqrt_w: Vec<f64> = w.iter().map(|&x| x.sqrt()).collect();

    // Similarity transform B = W^{1/2} K W^{1/2} turns the weighted operator
    // eigenproblem into an ordinary symmetric one.
    let mut b = DMatrix::zeros(m, m);
    for i in 0..m {
        for j in 0..m {
            b[(i, j)] = sqrt_w[i] * op.kernel()[(i, j)] * sqrt_w[j];
        }
    }
    b = (&b + b.transpose()) * 0.5;
    let decomp = b.symmetric_eigen();

    let mut order: Vec<usize> = (0..m).collect();
    order.sort_by(|&a, &c| {
        decomp.eigenvalues[c]
            .partial_cmp(&decomp.eigenvalues[a])
            .expect("finite eigenvalues")
    });

    let lead = decomp.eigenvalues[order[0]];
    let rank_tol = rank_tolerance(tol_dim.max(m), lead);
    if lead <= rank_tol || lead <= 0.0 {
        return Ok(EigenSystem::empty(rank_tol));
    }

    let mut eigenvalues = Vec::new();
    let mut eigenfunctions = Vec::new();
    for &idx in order.iter().take(max_rank.min(m)) {
        let lam = decomp.eigenvalues[idx];
        if lam <= rank_tol {
            break;
        }
        let col: DVector<f64> = decomp.eigenvectors.column(idx).into();
        let mut values: Vec<f64> = (0..m).map(|i| col[i] / sqrt_w[i]).collect();
        canonicalize_sign(&mut values);
        eigenvalues.push(lam);
        eigenfunctions.push(Curve::new(grid.clone(), values)?);
    }
    let rank = eigenvalues.len();
    Ok(EigenSystem {
        eigenvalues,
        eigenfunctions,
        rank,
        rank_tol,
    })
}

/// Eigendecompose a symmetric PSD operator, keeping at most `max_rank` pairs.
pub fn eigendecompose(op: &LinearOperator, max_rank: usize) -> Result<EigenSystem, FlrmError> {
    let m = op.grid().len();
    eigendecompose_with_dim(op, max_rank, m.max(max_rank))
}

/// `sum_{j<=h} eigval_j^{-1} <x, phi_j> phi_j`, the action of the truncated
/// inverse on `x`.
pub fn truncated_inverse_apply(
    eig: &EigenSystem,
    h: usize,
    x: &Curve,
) -> Result<Curve, FlrmError> {
    if h == 0 || h > eig.rank {
        return Err(FlrmError::TruncationExceedsRank {
            requested: h,
            max_admissible: eig.rank,
        });
    }
    let mut out = Curve::zeros(x.grid().clone());
    for j in 0..h {
        let phi = &eig.eigenfunctions[j];
        let coeff = crate::hilbert::inner_product(x, phi)? / eig.eigenvalues[j];
        out.axpy(coeff, phi)?;
    }
    Ok(out)
}
