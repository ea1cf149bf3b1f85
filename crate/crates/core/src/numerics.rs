//! Dense linear-algebra kernels.
//!
//! Everything works over complex scalars; real data is carried with zero
//! imaginary parts. The Hermitian eigensolver is a cyclic Jacobi iteration
//! implemented here, singular values and pseudoinverses come from
//! `nalgebra`'s SVD, and spans are handled by Gram-Schmidt with
//! reorthogonalization. Keeping eigenvalues and singular values on separate
//! algorithms lets the two be cross-checked against each other.

use nalgebra::{Complex, DMatrix, DVector};

use crate::error::{Error, Result};

pub type C64 = Complex<f64>;
pub type CMatrix = DMatrix<C64>;
pub type CVector = DVector<C64>;

/// Singular values at or below `RANK_RTOL * sigma_max` count as zero.
pub const RANK_RTOL: f64 = 1e-10;

/// Entrywise tolerance for the Hermitian symmetry check.
pub const HERMITIAN_TOL: f64 = 1e-10;

const MAX_JACOBI_SWEEPS: usize = 100;

/// `<x, y>`, linear in the first argument.
pub fn inner(x: &CVector, y: &CVector) -> C64 {
    y.dotc(x)
}

pub fn real_vector(entries: &[f64]) -> CVector {
    CVector::from_iterator(entries.len(), entries.iter().map(|&v| C64::new(v, 0.0)))
}

/// Standard basis vector `e_k` (zero-based `k`).
pub fn basis_vector(dim: usize, k: usize) -> CVector {
    let mut v = CVector::zeros(dim);
    v[k] = C64::new(1.0, 0.0);
    v
}

pub fn real_matrix(rows: &[&[f64]]) -> CMatrix {
    let nrows = rows.len();
    let ncols = rows.first().map_or(0, |r| r.len());
    CMatrix::from_fn(nrows, ncols, |i, j| C64::new(rows[i][j], 0.0))
}

pub fn real_diagonal(diag: &[f64]) -> CMatrix {
    let n = diag.len();
    CMatrix::from_fn(n, n, |i, j| {
        if i == j {
            C64::new(diag[i], 0.0)
        } else {
            C64::new(0.0, 0.0)
        }
    })
}

pub fn is_finite_matrix(m: &CMatrix) -> bool {
    m.iter().all(|z| z.re.is_finite() && z.im.is_finite())
}

/// Largest entrywise deviation `|m_ij - conj(m_ji)|`.
pub fn hermitian_deviation(m: &CMatrix) -> f64 {
    let n = m.nrows();
    let mut dev = 0.0_f64;
    for i in 0..n {
        for j in i..n {
            dev = dev.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    dev
}

/// Eigen-decomposition of a Hermitian matrix, eigenvalues ascending and
/// eigenvectors in the matching columns.
#[derive(Debug, Clone)]
pub struct HermitianEigen {
    pub values: Vec<f64>,
    pub vectors: CMatrix,
}

pub fn hermitian_eigenvalues(m: &CMatrix) -> Result<Vec<f64>> {
    hermitian_eigen(m).map(|e| e.values)
}

/// Cyclic complex Jacobi. Each rotation first removes the phase of the
/// pivot `a_pq` with a diagonal unitary and then applies the classical real
/// rotation, so the pair `(p, q)` is annihilated exactly.
pub fn hermitian_eigen(m: &CMatrix) -> Result<HermitianEigen> {
    let (rows, cols) = m.shape();
    if rows != cols {
        return Err(Error::NotSquare { rows, cols });
    }
    if !is_finite_matrix(m) {
        return Err(Error::NonFinite("matrix".into()));
    }
    let deviation = hermitian_deviation(m);
    if deviation > HERMITIAN_TOL {
        return Err(Error::NotHermitian { deviation });
    }
    let n = rows;
    let mut a = (m + m.adjoint()).map(|z| z * 0.5);
    let mut v = CMatrix::identity(n, n);

    for _ in 0..MAX_JACOBI_SWEEPS {
        let mut off = 0.0;
        let mut total = 0.0;
        for i in 0..n {
            for j in 0..n {
                let s = a[(i, j)].norm_sqr();
                total += s;
                if i != j {
                    off += s;
                }
            }
        }
        if off == 0.0 || off <= (f64::EPSILON * f64::EPSILON) * total {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                rotate(&mut a, &mut v, p, q);
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(i, i)].re.total_cmp(&a[(j, j)].re));
    let values = order.iter().map(|&i| a[(i, i)].re).collect();
    let vectors = CMatrix::from_fn(n, n, |r, c| v[(r, order[c])]);
    Ok(HermitianEigen { values, vectors })
}

fn rotate(a: &mut CMatrix, v: &mut CMatrix, p: usize, q: usize) {
    let apq = a[(p, q)];
    let r = apq.norm();
    if r == 0.0 {
        return;
    }
    let phase = apq / r;
    let theta = (a[(q, q)].re - a[(p, p)].re) / (2.0 * r);
    let t = if theta.is_infinite() {
        0.0
    } else {
        theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt())
    };
    if t == 0.0 {
        // |a_pq| negligible against the diagonal gap
        a[(p, q)] = C64::new(0.0, 0.0);
        a[(q, p)] = C64::new(0.0, 0.0);
        return;
    }
    let c = 1.0 / (t * t + 1.0).sqrt();
    let s = t * c;
    let u_pp = C64::new(c, 0.0);
    let u_pq = C64::new(s, 0.0);
    let u_qp = -phase.conj() * s;
    let u_qq = phase.conj() * c;

    let n = a.nrows();
    for k in 0..n {
        let (x, y) = (a[(k, p)], a[(k, q)]);
        a[(k, p)] = x * u_pp + y * u_qp;
        a[(k, q)] = x * u_pq + y * u_qq;
    }
    for k in 0..n {
        let (x, y) = (a[(p, k)], a[(q, k)]);
        a[(p, k)] = u_pp.conj() * x + u_qp.conj() * y;
        a[(q, k)] = u_pq.conj() * x + u_qq.conj() * y;
    }
    for k in 0..n {
        let (x, y) = (v[(k, p)], v[(k, q)]);
        v[(k, p)] = x * u_pp + y * u_qp;
        v[(k, q)] = x * u_pq + y * u_qq;
    }
    a[(p, q)] = C64::new(0.0, 0.0);
    a[(q, p)] = C64::new(0.0, 0.0);
    a[(p, p)].im = 0.0;
    a[(q, q)].im = 0.0;
}

/// Singular values in descending order; `min(rows, cols)` of them.
pub fn singular_values(m: &CMatrix) -> Result<Vec<f64>> {
    if m.is_empty() {
        return Err(Error::EmptyMatrix);
    }
    if !is_finite_matrix(m) {
        return Err(Error::NonFinite("matrix".into()));
    }
    let mut sv: Vec<f64> = m.clone().svd(false, false).singular_values.iter().copied().collect();
    sv.sort_by(|a, b| b.total_cmp(a));
    Ok(sv)
}

/// Numerical rank with the `RANK_RTOL` cutoff.
pub fn rank(m: &CMatrix) -> usize {
    if m.is_empty() {
        return 0;
    }
    let sv = match singular_values(m) {
        Ok(sv) => sv,
        Err(_) => return 0,
    };
    let cutoff = RANK_RTOL * sv[0];
    sv.iter().filter(|&&s| s > cutoff && s > 0.0).count()
}

/// Moore-Penrose pseudoinverse with the `RANK_RTOL` cutoff.
pub fn pseudo_inverse(m: &CMatrix) -> Result<CMatrix> {
    let (rows, cols) = m.shape();
    if m.is_empty() {
        return Ok(CMatrix::zeros(cols, rows));
    }
    if !is_finite_matrix(m) {
        return Err(Error::NonFinite("matrix".into()));
    }
    let svd = m.clone().svd(true, true);
    let u = svd.u.expect("left singular vectors requested");
    let v_t = svd.v_t.expect("right singular vectors requested");
    let sigma_max = svd.singular_values.iter().copied().fold(0.0, f64::max);
    let cutoff = RANK_RTOL * sigma_max;
    let mut pinv = CMatrix::zeros(cols, rows);
    for (k, &s) in svd.singular_values.iter().enumerate() {
        if s > cutoff && s > 0.0 {
            let vk = v_t.row(k).adjoint();
            let uk = u.column(k);
            pinv += (vk * uk.adjoint()) * C64::new(1.0 / s, 0.0);
        }
    }
    Ok(pinv)
}

/// Solution of a least-squares problem together with its residual norm.
#[derive(Debug, Clone)]
pub struct LeastSquares {
    pub solution: CVector,
    pub residual: f64,
}

/// Minimal-norm least-squares solution `x = a^+ b`.
pub fn min_norm_solve(a: &CMatrix, b: &CVector) -> Result<LeastSquares> {
    if a.nrows() != b.len() {
        return Err(Error::DimensionMismatch {
            expected: a.nrows(),
            found: b.len(),
        });
    }
    let solution = pseudo_inverse(a)? * b;
    let residual = (a * &solution - b).norm();
    Ok(LeastSquares { solution, residual })
}

/// Orthonormal basis grown one vector at a time.
///
/// Candidates whose component orthogonal to the current span is at most
/// `RANK_RTOL * scale` are dropped, which is how dependent families are
/// tolerated. Projections are applied twice (classical Gram-Schmidt with
/// one reorthogonalization pass).
#[derive(Debug, Clone)]
pub struct OrthoBasis {
    dim: usize,
    cutoff: f64,
    vectors: Vec<CVector>,
}

impl OrthoBasis {
    pub fn new(dim: usize, scale: f64) -> Self {
        OrthoBasis {
            dim,
            cutoff: RANK_RTOL * scale,
            vectors: Vec::new(),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn rank(&self) -> usize {
        self.vectors.len()
    }

    pub fn vectors(&self) -> &[CVector] {
        &self.vectors
    }

    /// `x - P x` for the orthogonal projector `P` onto the current span.
    pub fn residual(&self, x: &CVector) -> CVector {
        let mut r = x.clone();
        for _ in 0..2 {
            for q in &self.vectors {
                let c = q.dotc(&r);
                r.axpy(-c, q, C64::new(1.0, 0.0));
            }
        }
        r
    }

    /// Adds `v` if it extends the span; returns whether it did.
    pub fn push(&mut self, v: &CVector) -> bool {
        let r = self.residual(v);
        let norm = r.norm();
        if norm > self.cutoff && norm > 0.0 {
            self.vectors.push(r.unscale(norm));
            true
        } else {
            false
        }
    }

    /// Orthonormal basis of the orthogonal complement of the current span.
    pub fn complement(&self) -> Vec<CVector> {
        let mut full = OrthoBasis {
            dim: self.dim,
            cutoff: RANK_RTOL,
            vectors: self.vectors.clone(),
        };
        let mut extra = Vec::new();
        for k in 0..self.dim {
            if full.rank() == self.dim {
                break;
            }
            if full.push(&basis_vector(self.dim, k)) {
                extra.push(full.vectors.last().unwrap().clone());
            }
        }
        extra
    }
}

fn max_norm<'a>(vs: impl IntoIterator<Item = &'a CVector>) -> f64 {
    vs.into_iter().map(|v| v.norm()).fold(0.0, f64::max)
}

/// Orthonormal basis for the span of `vectors`, scaled cutoff relative to
/// the longest vector.
pub fn span_basis(dim: usize, vectors: &[CVector]) -> OrthoBasis {
    let mut basis = OrthoBasis::new(dim, max_norm(vectors));
    for v in vectors {
        basis.push(v);
    }
    basis
}

/// Euclidean distance from `x` to `span(basis)`; an empty basis gives `|x|`.
pub fn distance_to_span(x: &CVector, basis: &[CVector]) -> Result<f64> {
    let dim = x.len();
    if let Some(bad) = basis.iter().find(|b| b.len() != dim) {
        return Err(Error::DimensionMismatch {
            expected: dim,
            found: bad.len(),
        });
    }
    Ok(span_basis(dim, basis).residual(x).norm())
}

/// Orthonormal basis (as columns) of the kernel of `a`.
pub fn null_space(a: &CMatrix) -> CMatrix {
    let cols = a.ncols();
    let rows: Vec<CVector> = (0..a.nrows()).map(|i| a.row(i).adjoint()).collect();
    let basis = span_basis(cols, &rows);
    let kernel = basis.complement();
    if kernel.is_empty() {
        return CMatrix::zeros(cols, 0);
    }
    CMatrix::from_columns(&kernel)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn eigenvalues_of_diagonal_are_sorted() {
        let ev = hermitian_eigenvalues(&real_diagonal(&[2.0, 1.0, 1.0])).unwrap();
        assert_eq!(ev, vec![1.0, 1.0, 2.0]);
    }

    #[test]
    fn eigenvalues_of_identity() {
        let ev = hermitian_eigenvalues(&CMatrix::identity(3, 3)).unwrap();
        assert_eq!(ev, vec![1.0, 1.0, 1.0]);
    }

    #[test]
    fn eigenvalues_of_swap_match_characteristic_polynomial() {
        let m = real_matrix(&[&[0.0, 1.0], &[1.0, 0.0]]);
        // lambda^2 - tr*lambda + det, solved directly
        let (tr, det) = (0.0_f64, -1.0_f64);
        let disc = (tr * tr - 4.0 * det).sqrt();
        let oracle = [(tr - disc) / 2.0, (tr + disc) / 2.0];
        let ev = hermitian_eigenvalues(&m).unwrap();
        assert_abs_diff_eq!(ev[0], oracle[0], epsilon = 1e-14);
        assert_abs_diff_eq!(ev[1], oracle[1], epsilon = 1e-14);
    }

    #[test]
    fn complex_hermitian_2x2_matches_closed_form() {
        // [[2, 1-i], [1+i, 3]]: lambda = (5 ± sqrt(1 + 8)) / 2 = 1, 4
        let m = CMatrix::from_row_slice(2, 2, &[c(2.0, 0.0), c(1.0, -1.0), c(1.0, 1.0), c(3.0, 0.0)]);
        let eig = hermitian_eigen(&m).unwrap();
        assert_abs_diff_eq!(eig.values[0], 1.0, epsilon = 1e-13);
        assert_abs_diff_eq!(eig.values[1], 4.0, epsilon = 1e-13);
        let recon = &eig.vectors * real_diagonal(&eig.values) * eig.vectors.adjoint();
        assert!((recon - m).norm() < 1e-12);
    }

    #[test]
    fn non_hermitian_and_non_square_are_rejected() {
        let m = real_matrix(&[&[0.0, 1.0], &[0.0, 0.0]]);
        assert!(matches!(hermitian_eigenvalues(&m), Err(Error::NotHermitian { .. })));
        let r = CMatrix::zeros(2, 3);
        assert!(matches!(
            hermitian_eigenvalues(&r),
            Err(Error::NotSquare { rows: 2, cols: 3 })
        ));
    }

    #[test]
    fn singular_value_examples() {
        assert_eq!(singular_values(&CMatrix::identity(2, 2)).unwrap(), vec![1.0, 1.0]);
        let d = singular_values(&real_diagonal(&[1.0, 0.25, 1.0 / 9.0])).unwrap();
        assert_abs_diff_eq!(d[0], 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(d[1], 0.25, epsilon = 1e-15);
        assert_abs_diff_eq!(d[2], 1.0 / 9.0, epsilon = 1e-15);
        let col = real_matrix(&[&[3.0], &[4.0]]);
        let s = singular_values(&col).unwrap();
        assert_eq!(s.len(), 1);
        assert_abs_diff_eq!(s[0], (3.0_f64 * 3.0 + 4.0 * 4.0).sqrt(), epsilon = 1e-14);
        assert!(matches!(
            singular_values(&CMatrix::zeros(0, 0)),
            Err(Error::EmptyMatrix)
        ));
    }

    #[test]
    fn distance_examples() {
        let e = |k| basis_vector(3, k);
        assert_abs_diff_eq!(distance_to_span(&e(0), &[e(1), e(2)]).unwrap(), 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(distance_to_span(&e(0), &[e(0)]).unwrap(), 0.0, epsilon = 1e-15);

        let h = std::f64::consts::FRAC_1_SQRT_2;
        let x = real_vector(&[h, h]);
        let e1 = basis_vector(2, 0);
        // x - <x,e1> e1 by hand
        let oracle = (&x - &e1 * inner(&x, &e1)).norm();
        assert_abs_diff_eq!(distance_to_span(&x, &[e1]).unwrap(), oracle, epsilon = 1e-15);
        assert_abs_diff_eq!(oracle, h, epsilon = 1e-15);
    }

    #[test]
    fn distance_handles_empty_and_dependent_bases() {
        let x = real_vector(&[3.0, 4.0, 0.0]);
        assert_abs_diff_eq!(distance_to_span(&x, &[]).unwrap(), 5.0, epsilon = 1e-14);
        let b = [
            real_vector(&[1.0, 0.0, 0.0]),
            real_vector(&[2.0, 0.0, 0.0]),
            real_vector(&[0.0, 0.0, 0.0]),
        ];
        assert_abs_diff_eq!(distance_to_span(&x, &b).unwrap(), 4.0, epsilon = 1e-14);
        assert!(matches!(
            distance_to_span(&x, &[real_vector(&[1.0, 0.0])]),
            Err(Error::DimensionMismatch { expected: 3, found: 2 })
        ));
    }

    #[test]
    fn min_norm_examples() {
        let sol = min_norm_solve(&CMatrix::identity(2, 2), &real_vector(&[1.0, 2.0])).unwrap();
        assert!((sol.solution - real_vector(&[1.0, 2.0])).norm() < 1e-14);

        let a = real_matrix(&[&[1.0, 0.0], &[0.0, 0.0]]);
        let sol = min_norm_solve(&a, &real_vector(&[1.0, 1.0])).unwrap();
        assert!((sol.solution - real_vector(&[1.0, 0.0])).norm() < 1e-14);
        assert_abs_diff_eq!(sol.residual, 1.0, epsilon = 1e-14);

        // full row rank: x = a^T (a a^T)^{-1} b = (1,1)^T * 2/2
        let a = real_matrix(&[&[1.0, 1.0]]);
        let sol = min_norm_solve(&a, &real_vector(&[2.0])).unwrap();
        assert!((sol.solution - real_vector(&[1.0, 1.0])).norm() < 1e-14);
        assert!(sol.residual < 1e-14);

        assert!(matches!(
            min_norm_solve(&a, &real_vector(&[1.0, 2.0])),
            Err(Error::DimensionMismatch { expected: 1, found: 2 })
        ));
    }

    #[test]
    fn null_space_is_orthonormal_kernel() {
        let a = real_matrix(&[&[1.0, 1.0, 0.0, 0.0], &[0.0, 0.0, 1.0, 0.0]]);
        let k = null_space(&a);
        assert_eq!(k.ncols(), 2);
        assert!((&a * &k).norm() < 1e-14);
        assert!((k.adjoint() * &k - CMatrix::identity(2, 2)).norm() < 1e-14);
        assert!(k.iter().all(|z| z.im == 0.0));
    }

    #[test]
    fn rank_uses_relative_cutoff() {
        assert_eq!(rank(&real_diagonal(&[1.0, 1e-11, 0.5])), 2);
        assert_eq!(rank(&real_diagonal(&[1.0, 1e-9, 0.5])), 3);
        assert_eq!(rank(&CMatrix::zeros(2, 2)), 0);
    }
}
