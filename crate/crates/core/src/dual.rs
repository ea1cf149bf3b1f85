//! Dual frames: the canonical dual `S^{-1} F(w)`, the affine family of
//! alternate duals around it, and verification of the reconstruction
//! identity `x = sum_w mu(w) <x, G(w)> F(w)`.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::frame::{Field, Frame, FrameBounds};
use crate::numerics::{self, CMatrix, CVector, C64};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DualPairReport {
    pub reconstruction_residual: f64,
    pub g_bounds: FrameBounds,
    pub is_dual: bool,
}

/// Duals returned by [`alternate_duals`]. `unique` is set when the
/// synthesis map has a trivial kernel, in which case the canonical dual is
/// the only dual.
#[derive(Debug, Clone)]
pub struct AlternateDuals {
    pub duals: Vec<Frame>,
    pub unique: bool,
    pub kernel_dim: usize,
}

fn require_frame(f: &Frame, tol: f64) -> Result<()> {
    let lower = f.optimal_bounds().lower;
    if lower <= tol {
        return Err(Error::NotAFrame { lower });
    }
    Ok(())
}

pub(crate) fn require_same_space(f: &Frame, g: &Frame) -> Result<()> {
    if f.dim() != g.dim() {
        return Err(Error::SpaceMismatch(format!("dimension {} vs {}", f.dim(), g.dim())));
    }
    if !f.space().matches(g.space()) {
        return Err(Error::SpaceMismatch("labels or weights differ".into()));
    }
    Ok(())
}

/// `S^{-1} F(w)` for every measure point.
///
/// Computed from the pseudoinverse of the weighted analysis matrix `T`
/// rather than by inverting `S = T* T`: column `w` of `T^+` is
/// `sqrt(mu(w)) S^{-1} F(w)`, and going through `T` keeps the error
/// proportional to the condition number of `T` instead of its square.
pub fn canonical_dual(f: &Frame, tol: f64) -> Result<Frame> {
    require_frame(f, tol)?;
    let pinv = numerics::pseudo_inverse(&f.analysis_matrix())?;
    let vectors = f
        .space()
        .weights()
        .iter()
        .enumerate()
        .map(|(i, mu)| pinv.column(i).unscale(mu.sqrt()))
        .collect();
    f.with_vectors(vectors)
}

/// `sum_w mu(w) F(w) G(w)*`, the synthesis-by-F of analysis-by-G.
pub fn reconstruction_operator(f: &Frame, g: &Frame) -> CMatrix {
    let n = f.dim();
    let mut r = CMatrix::zeros(n, n);
    for ((fv, gv), mu) in f.vectors().iter().zip(g.vectors()).zip(f.space().weights()) {
        r += (fv * gv.adjoint()) * C64::new(*mu, 0.0);
    }
    r
}

/// Checks `x = sum_w mu(w) <x, G(w)> F(w)` on every standard basis vector and
/// that `G` is itself a frame.
pub fn verify_hilbert_dual(f: &Frame, g: &Frame, tol: f64) -> Result<DualPairReport> {
    require_same_space(f, g)?;
    let r = reconstruction_operator(f, g) - CMatrix::identity(f.dim(), f.dim());
    let reconstruction_residual = (0..f.dim()).map(|j| r.column(j).norm()).fold(0.0, f64::max);
    let g_bounds = g.optimal_bounds();
    Ok(DualPairReport {
        reconstruction_residual,
        g_bounds,
        is_dual: reconstruction_residual <= tol && g_bounds.lower > tol,
    })
}

/// Orthonormal basis (columns, length `m`) of the kernel of the weighted
/// synthesis map `c -> sum_w mu(w) c_w F(w)`.
pub fn synthesis_kernel(f: &Frame) -> CMatrix {
    let weights = f.space().weights();
    let synthesis = CMatrix::from_fn(f.dim(), f.len(), |j, i| f.vectors()[i][j] * weights[i]);
    numerics::null_space(&synthesis)
}

/// The canonical dual followed by `count - 1` further duals
/// `G(w) = S^{-1} F(w) + h(w)` where the perturbations satisfy
/// `sum_w mu(w) <x, h(w)> F(w) = 0` for every `x`.
///
/// Perturbations are `H* = K C` with `K` an orthonormal kernel basis of
/// the weighted synthesis map and `C` seeded standard Gaussian
/// coefficients scaled by `magnitude`. Real frames get real coefficients.
/// A dual that fails verification (possible only for large magnitudes
/// that destroy the lower frame bound) is redrawn.
pub fn alternate_duals(f: &Frame, count: usize, seed: u64, magnitude: f64, tol: f64) -> Result<AlternateDuals> {
    let canonical = canonical_dual(f, tol)?;
    let kernel = synthesis_kernel(f);
    let kernel_dim = kernel.ncols();
    let mut duals = vec![canonical.clone()];
    if kernel_dim == 0 {
        return Ok(AlternateDuals {
            duals,
            unique: true,
            kernel_dim,
        });
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = f.dim();
    let mut attempts = 0;
    while duals.len() < count && attempts < 100 * count.max(1) {
        attempts += 1;
        let coeffs = CMatrix::from_fn(kernel_dim, n, |_, _| {
            let re: f64 = StandardNormal.sample(&mut rng);
            let im: f64 = match f.field() {
                Field::Real => 0.0,
                Field::Complex => StandardNormal.sample(&mut rng),
            };
            C64::new(re * magnitude, im * magnitude)
        });
        // row w of K C is h(w)*
        let h_adj = &kernel * coeffs;
        let vectors: Vec<CVector> = canonical
            .vectors()
            .iter()
            .enumerate()
            .map(|(w, g)| g + h_adj.row(w).adjoint())
            .collect();
        let candidate = canonical.with_vectors(vectors)?;
        let distinct = duals.iter().all(|d| !same_vectors(d, &candidate));
        if distinct && verify_hilbert_dual(f, &candidate, tol)?.is_dual {
            duals.push(candidate);
        }
    }
    Ok(AlternateDuals {
        duals,
        unique: false,
        kernel_dim,
    })
}

fn same_vectors(a: &Frame, b: &Frame) -> bool {
    a.vectors()
        .iter()
        .zip(b.vectors())
        .all(|(x, y)| (x - y).norm() <= 1e-12)
}
