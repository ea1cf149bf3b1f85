//! Frames indexed by a finite measure space.
//!
//! A frame is one vector `F(w)` per measure point `w`, together with the
//! point weights `mu(w)`. The frame inequality
//!
//! ```text
//! A |x|^2 <= sum_w mu(w) |<x, F(w)>|^2 <= B |x|^2
//! ```
//!
//! is evaluated through the weighted analysis matrix, whose row `w` is
//! `sqrt(mu(w)) F(w)*`, so that `|T x|^2` is exactly the weighted sum above
//! and `T* T` is the frame operator.

use std::collections::HashSet;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::numerics::{self, CMatrix, CVector, C64};

/// Tolerance used when callers do not supply their own.
pub const DEFAULT_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Field {
    Real,
    Complex,
}

/// Finite index set with strictly positive weights.
#[derive(Debug, Clone, PartialEq)]
pub struct MeasureSpace {
    labels: Vec<String>,
    weights: Vec<f64>,
}

impl MeasureSpace {
    pub fn new(labels: Vec<String>, weights: Vec<f64>) -> Result<Self> {
        if labels.is_empty() {
            return Err(Error::InvalidMeasure("no measure points".into()));
        }
        if labels.len() != weights.len() {
            return Err(Error::InvalidMeasure(format!(
                "{} labels but {} weights",
                labels.len(),
                weights.len()
            )));
        }
        let mut seen = HashSet::new();
        for l in &labels {
            if !seen.insert(l.as_str()) {
                return Err(Error::InvalidMeasure(format!("duplicate label {l:?}")));
            }
        }
        if let Some((i, w)) = weights.iter().enumerate().find(|(_, w)| !(w.is_finite() && **w > 0.0)) {
            return Err(Error::InvalidMeasure(format!(
                "weight of {:?} must be positive and finite, got {w}",
                labels[i]
            )));
        }
        Ok(MeasureSpace { labels, weights })
    }

    /// Counting measure on the given labels.
    pub fn counting(labels: Vec<String>) -> Result<Self> {
        let weights = vec![1.0; labels.len()];
        Self::new(labels, weights)
    }

    /// Counting measure on `"1", ..., "m"`.
    pub fn counting_numbered(m: usize) -> Result<Self> {
        Self::counting((1..=m).map(|i| i.to_string()).collect())
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn total_weight(&self) -> f64 {
        self.weights.iter().sum()
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    /// Same labels, every weight multiplied by `c`.
    pub fn scaled(&self, c: f64) -> Result<Self> {
        Self::new(self.labels.clone(), self.weights.iter().map(|w| w * c).collect())
    }

    /// Labels agree exactly and weights agree to 1e-12 relative.
    pub fn matches(&self, other: &MeasureSpace) -> bool {
        self.labels == other.labels
            && self
                .weights
                .iter()
                .zip(&other.weights)
                .all(|(a, b)| (a - b).abs() <= 1e-12 * a.abs().max(b.abs()))
    }
}

/// Midpoint rule on `[a, b]`: nodes `a + (i - 1/2) h`, weights `h = (b - a)/m`.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureRule {
    pub nodes: Vec<f64>,
    pub space: MeasureSpace,
}

pub fn uniform_quadrature(a: f64, b: f64, m: usize) -> Result<QuadratureRule> {
    if !(a.is_finite() && b.is_finite() && a < b) || m == 0 {
        return Err(Error::InvalidInterval { a, b, m });
    }
    let h = (b - a) / m as f64;
    let nodes: Vec<f64> = (0..m).map(|i| a + (i as f64 + 0.5) * h).collect();
    let labels = (1..=m).map(|i| format!("t{i}")).collect();
    let space = MeasureSpace::new(labels, vec![h; m])?;
    Ok(QuadratureRule { nodes, space })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FrameBounds {
    pub lower: f64,
    pub upper: f64,
    pub optimal: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FrameClass {
    pub is_bessel: bool,
    pub is_frame: bool,
    pub is_tight: bool,
    pub is_parseval: bool,
    pub is_exact: bool,
    pub bounds: FrameBounds,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Frame {
    space: MeasureSpace,
    dim: usize,
    vectors: Vec<CVector>,
    field: Field,
}

impl Frame {
    pub fn new(space: MeasureSpace, dim: usize, vectors: Vec<CVector>, field: Field) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidFrame("dimension must be at least 1".into()));
        }
        if vectors.len() != space.len() {
            return Err(Error::InvalidFrame(format!(
                "{} vectors for {} measure points",
                vectors.len(),
                space.len()
            )));
        }
        for (label, v) in space.labels().iter().zip(&vectors) {
            if v.len() != dim {
                return Err(Error::InvalidFrame(format!(
                    "vector {label:?} has {} entries, expected {dim}",
                    v.len()
                )));
            }
            if !v.iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
                return Err(Error::NonFinite(format!("vector {label:?}")));
            }
            if field == Field::Real && v.iter().any(|z| z.im != 0.0) {
                return Err(Error::InvalidFrame(format!(
                    "vector {label:?} has imaginary parts in a real frame"
                )));
            }
        }
        Ok(Frame {
            space,
            dim,
            vectors,
            field,
        })
    }

    /// Real frame from plain rows.
    pub fn real(space: MeasureSpace, rows: &[Vec<f64>]) -> Result<Self> {
        let dim = rows.first().map_or(0, |r| r.len());
        let vectors = rows.iter().map(|r| numerics::real_vector(r)).collect();
        Self::new(space, dim, vectors, Field::Real)
    }

    /// Real frame under counting measure with labels `"1".."m"`.
    pub fn real_counting(rows: &[Vec<f64>]) -> Result<Self> {
        Self::real(MeasureSpace::counting_numbered(rows.len())?, rows)
    }

    /// Standard orthonormal basis of dimension `n` under counting measure.
    pub fn orthonormal_basis(n: usize) -> Result<Self> {
        let vectors = (0..n).map(|k| numerics::basis_vector(n, k)).collect();
        Self::new(MeasureSpace::counting_numbered(n)?, n, vectors, Field::Real)
    }

    pub fn space(&self) -> &MeasureSpace {
        &self.space
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn vectors(&self) -> &[CVector] {
        &self.vectors
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    /// Same vectors on a different measure space with the same point count.
    pub fn with_space(&self, space: MeasureSpace) -> Result<Self> {
        Self::new(space, self.dim, self.vectors.clone(), self.field)
    }

    /// Same measure space and field, new vectors. Imaginary round-off is
    /// dropped for real frames.
    pub fn with_vectors(&self, vectors: Vec<CVector>) -> Result<Self> {
        let vectors = match self.field {
            Field::Real => vectors.into_iter().map(|v| v.map(|z| C64::new(z.re, 0.0))).collect(),
            Field::Complex => vectors,
        };
        Self::new(self.space.clone(), self.dim, vectors, self.field)
    }

    /// Reorders measure points (labels, weights and vectors together).
    pub fn permuted(&self, order: &[usize]) -> Result<Self> {
        let labels = order.iter().map(|&i| self.space.labels[i].clone()).collect();
        let weights = order.iter().map(|&i| self.space.weights[i]).collect();
        let vectors = order.iter().map(|&i| self.vectors[i].clone()).collect();
        Self::new(MeasureSpace::new(labels, weights)?, self.dim, vectors, self.field)
    }

    /// `sum_w mu(w) |<x, F(w)>|^2`.
    pub fn energy(&self, x: &CVector) -> f64 {
        self.vectors
            .iter()
            .zip(self.space.weights())
            .map(|(f, mu)| mu * numerics::inner(x, f).norm_sqr())
            .sum()
    }

    /// Coefficients `<x, F(w)>` in label order.
    pub fn coefficients(&self, x: &CVector) -> Vec<C64> {
        self.vectors.iter().map(|f| numerics::inner(x, f)).collect()
    }

    /// `m x n` matrix with row `w` equal to `sqrt(mu(w)) F(w)*`.
    pub fn analysis_matrix(&self) -> CMatrix {
        let weights = self.space.weights();
        CMatrix::from_fn(self.len(), self.dim, |i, j| {
            self.vectors[i][j].conj() * weights[i].sqrt()
        })
    }

    /// `S = sum_w mu(w) F(w) F(w)*`, assembled so that it is exactly Hermitian.
    pub fn frame_operator(&self) -> CMatrix {
        frame_operator_of(self.dim, self.vectors.iter().zip(self.space.weights().iter().copied()))
    }

    /// Extremal eigenvalues of the frame operator. A lower bound of zero
    /// means the family does not span.
    pub fn optimal_bounds(&self) -> FrameBounds {
        let ev = numerics::hermitian_eigenvalues(&self.frame_operator())
            .expect("frame operator is square, finite and Hermitian by construction");
        FrameBounds {
            lower: ev[0].max(0.0),
            upper: ev[ev.len() - 1].max(0.0),
            optimal: true,
        }
    }

    /// Whether the family with the given indices removed is still a frame
    /// for the span of the full family. Removing everything never is.
    pub fn remains_frame_without(&self, removed: &[usize], tol: f64) -> bool {
        let span = numerics::span_basis(self.dim, &self.vectors);
        if span.rank() == 0 {
            return false;
        }
        let q = CMatrix::from_columns(span.vectors());
        let kept = self
            .vectors
            .iter()
            .zip(self.space.weights().iter().copied())
            .enumerate()
            .filter(|(i, _)| !removed.contains(i))
            .map(|(_, p)| p);
        let reduced = frame_operator_of(self.dim, kept);
        let compressed = q.adjoint() * reduced * &q;
        let compressed = (&compressed + compressed.adjoint()).map(|z| z * 0.5);
        let ev = numerics::hermitian_eigenvalues(&compressed).expect("compressed operator is Hermitian");
        ev[0] > tol
    }

    /// Indices of the given labels; unknown labels are an error.
    pub fn indices_of(&self, labels: &[String]) -> Result<Vec<usize>> {
        labels
            .iter()
            .map(|l| self.space.index_of(l).ok_or_else(|| Error::UnknownLabel(l.clone())))
            .collect()
    }

    /// Tightness, Parseval and exactness flags.
    ///
    /// Exactness removes one measure point at a time: the family is exact
    /// when every single removal leaves something that is no longer a frame
    /// for the span of the whole family.
    pub fn classify(&self, tol: f64) -> FrameClass {
        let bounds = self.optimal_bounds();
        let is_frame = bounds.lower > tol;
        let is_tight = is_frame && (bounds.upper - bounds.lower).abs() <= tol * bounds.upper;
        let is_parseval = is_tight && (bounds.upper - 1.0).abs() <= tol && (bounds.lower - 1.0).abs() <= tol;
        let is_exact = (0..self.len()).all(|i| !self.remains_frame_without(&[i], tol));
        FrameClass {
            is_bessel: bounds.upper.is_finite(),
            is_frame,
            is_tight,
            is_parseval,
            is_exact,
            bounds,
        }
    }
}

fn frame_operator_of<'a>(dim: usize, terms: impl Iterator<Item = (&'a CVector, f64)>) -> CMatrix {
    let mut s = CMatrix::zeros(dim, dim);
    for (f, mu) in terms {
        for i in 0..dim {
            for j in i..dim {
                s[(i, j)] += f[i] * f[j].conj() * mu;
            }
        }
    }
    for i in 0..dim {
        s[(i, i)].im = 0.0;
        for j in (i + 1)..dim {
            s[(j, i)] = s[(i, j)].conj();
        }
    }
    s
}
