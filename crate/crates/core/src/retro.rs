//! Retro-dual diagnostics.
//!
//! A candidate family `G` is an `Omega0`-dual of `F` when
//! `<G(w0), F(w)> = delta(w0, w)` for every `w` and every `w0` outside
//! `Omega0`, and `G` itself satisfies a lower frame bound (its analysis
//! operator `y -> {<y, G(w)>}` is bounded below). The checks here work on
//! a finite truncation, so a negative outcome is evidence at that
//! truncation and not a statement about the infinite-dimensional family.
//!
//! "For almost all w" is read as "for every measure point": all weights
//! are positive, so the only null set is the empty one.

use std::collections::BTreeSet;

use serde::Serialize;

use crate::dual::require_same_space;
use crate::error::{Error, Result};
use crate::frame::{Frame, FrameBounds};
use crate::numerics::{self, CMatrix, CVector, C64};

/// Excluded measure points `Omega0`. Empty means a strong dual is sought.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct OmegaSubset {
    pub excluded: BTreeSet<String>,
}

impl OmegaSubset {
    pub fn empty() -> Self {
        Self::default()
    }

    pub fn from_labels<I, S>(labels: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        OmegaSubset {
            excluded: labels.into_iter().map(Into::into).collect(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.excluded.is_empty()
    }

    /// Per-point mask, `true` where the point is excluded.
    pub fn mask(&self, f: &Frame) -> Result<Vec<bool>> {
        let mut mask = vec![false; f.len()];
        for label in &self.excluded {
            let i = f
                .space()
                .index_of(label)
                .ok_or_else(|| Error::UnknownLabel(label.clone()))?;
            mask[i] = true;
        }
        Ok(mask)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BiorthReport {
    /// Labels `w0` of the constrained rows (those outside `Omega0`).
    pub rows: Vec<String>,
    /// `|<G(w0), F(w)> - delta(w0, w)|`, one row per constrained `w0`.
    pub residual_matrix: Vec<Vec<f64>>,
    pub max_residual: f64,
    pub holds: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DistanceProfile {
    #[serde(skip)]
    pub x: CVector,
    /// `dist(x, span{G(w_1), ..., G(w_k)})` for `k = 1..depth`.
    pub distances: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AnalysisBounds {
    pub a0: f64,
    pub b0: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Verdict {
    DualConfirmed,
    NoDualWitness,
    Inconclusive,
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Verdict::DualConfirmed => "DUAL_CONFIRMED",
            Verdict::NoDualWitness => "NO_DUAL_WITNESS",
            Verdict::Inconclusive => "INCONCLUSIVE",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RetroVerdict {
    pub verdict: Verdict,
    pub biorth: BiorthReport,
    /// `(a0, b0)` of the candidate family.
    pub candidate_bounds: FrameBounds,
    pub candidate: Frame,
    /// Unit `y` with `<y, G(w)> ~ 0` for every `w`, when one exists.
    pub witness: Option<CVector>,
    /// `dim - rank{G(w)}`.
    pub rank_deficit: usize,
    pub truncation_dim: usize,
    /// Distances of the witness to the nested spans of `G`.
    pub evidence: Option<DistanceProfile>,
    pub note: String,
}

/// `<G(w0), F(w)>` against the Kronecker delta for every constrained `w0`.
pub fn check_biorthogonality(f: &Frame, g: &Frame, omega0: &OmegaSubset, tol: f64) -> Result<BiorthReport> {
    require_same_space(f, g)?;
    let mask = omega0.mask(f)?;
    let mut rows = Vec::new();
    let mut residual_matrix = Vec::new();
    let mut max_residual = 0.0_f64;
    for (w0, gv) in g.vectors().iter().enumerate() {
        if mask[w0] {
            continue;
        }
        let row: Vec<f64> = f
            .vectors()
            .iter()
            .enumerate()
            .map(|(w, fv)| {
                let delta = if w == w0 { 1.0 } else { 0.0 };
                (numerics::inner(gv, fv) - C64::new(delta, 0.0)).norm()
            })
            .collect();
        max_residual = row.iter().copied().fold(max_residual, f64::max);
        rows.push(f.space().labels()[w0].clone());
        residual_matrix.push(row);
    }
    Ok(BiorthReport {
        rows,
        residual_matrix,
        max_residual,
        holds: max_residual <= tol,
    })
}

/// Minimal-norm solutions of `<G(w0), F(w)> = delta(w0, w)` for each `w0`
/// outside `Omega0`; excluded points get `G(w0) = 0`.
///
/// The system for `w0` is consistent exactly when `F(w0)` is not in the
/// span of the other vectors. The first inconsistent `w0` (in label order)
/// is reported as [`Error::Infeasible`].
pub fn min_norm_biorthogonal(f: &Frame, omega0: &OmegaSubset, tol: f64) -> Result<Frame> {
    let mask = omega0.mask(f)?;
    // row w is F(w)*, so (A g)_w = <g, F(w)>
    let a = CMatrix::from_fn(f.len(), f.dim(), |w, j| f.vectors()[w][j].conj());
    let pinv = numerics::pseudo_inverse(&a)?;
    let mut vectors = Vec::with_capacity(f.len());
    for (w0, excluded) in mask.iter().enumerate() {
        if *excluded {
            vectors.push(CVector::zeros(f.dim()));
            continue;
        }
        let g = pinv.column(w0).into_owned();
        let mut residual = &a * &g;
        residual[w0] -= C64::new(1.0, 0.0);
        let residual = residual.norm();
        if residual > tol {
            return Err(Error::Infeasible {
                index: w0,
                label: f.space().labels()[w0].clone(),
                residual,
            });
        }
        vectors.push(g);
    }
    f.with_vectors(vectors)
}

/// Distance from each `F(w_i)` to the span of all the others.
pub fn exactness_profile(f: &Frame) -> Vec<f64> {
    (0..f.len())
        .map(|i| {
            let others: Vec<CVector> = f
                .vectors()
                .iter()
                .enumerate()
                .filter(|(j, _)| *j != i)
                .map(|(_, v)| v.clone())
                .collect();
            numerics::distance_to_span(&f.vectors()[i], &others).expect("frame vectors share one dimension")
        })
        .collect()
}

pub fn is_exact_by_distance(profile: &[f64], tol: f64) -> bool {
    profile.iter().all(|&d| d > tol)
}

/// Distances of `x` to the nested spans `L_k = span{G(w_1), ..., G(w_k)}`,
/// in label order. `depth` defaults to every measure point.
pub fn distance_profile(g: &Frame, x: &CVector, depth: Option<usize>) -> Result<DistanceProfile> {
    if x.len() != g.dim() {
        return Err(Error::DimensionMismatch {
            expected: g.dim(),
            found: x.len(),
        });
    }
    let depth = depth.unwrap_or(g.len());
    if depth > g.len() {
        return Err(Error::DimensionMismatch {
            expected: g.len(),
            found: depth,
        });
    }
    let scale = g.vectors().iter().map(|v| v.norm()).fold(0.0, f64::max);
    let mut span = numerics::OrthoBasis::new(g.dim(), scale);
    let mut distances = Vec::with_capacity(depth);
    let mut r = x.clone();
    for v in &g.vectors()[..depth] {
        if span.push(v) {
            // nested spans: only the new direction needs projecting out
            let q = span.vectors().last().unwrap();
            let c = q.dotc(&r);
            r.axpy(-c, q, C64::new(1.0, 0.0));
        }
        distances.push(r.norm());
    }
    Ok(DistanceProfile {
        x: x.clone(),
        distances,
    })
}

/// `(sigma_min^2, sigma_max^2)` of the weighted analysis matrix of `g`,
/// with `sigma_min = 0` when there are fewer points than dimensions.
pub fn analysis_lower_bound(g: &Frame) -> AnalysisBounds {
    let sv = numerics::singular_values(&g.analysis_matrix()).expect("analysis matrix is nonempty and finite");
    let b0 = sv[0] * sv[0];
    let a0 = if g.len() < g.dim() {
        0.0
    } else {
        let s = sv[sv.len() - 1];
        s * s
    };
    AnalysisBounds { a0, b0 }
}

/// Unit vector spanning (part of) the kernel of the analysis map of `g`:
/// the right singular vector for the smallest singular value, phase-fixed
/// so its largest entry is real and positive. `None` if the analysis map
/// is bounded below by more than `tol`.
pub fn witness(g: &Frame, tol: f64) -> Option<CVector> {
    let t = g.analysis_matrix();
    // pad to at least dim rows so the SVD returns a full set of right vectors
    let rows = t.nrows().max(t.ncols());
    let padded = CMatrix::from_fn(rows, t.ncols(), |i, j| {
        if i < t.nrows() {
            t[(i, j)]
        } else {
            C64::new(0.0, 0.0)
        }
    });
    let svd = padded.svd(false, true);
    let v_t = svd.v_t.expect("right singular vectors requested");
    let (k, s) = svd
        .singular_values
        .iter()
        .copied()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(&b.1))?;
    if s * s > tol {
        return None;
    }
    let y: CVector = v_t.row(k).adjoint();
    Some(fix_phase(y))
}

fn fix_phase(y: CVector) -> CVector {
    let max = y.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let pivot = y.iter().find(|z| z.norm() >= max * (1.0 - 1e-9)).copied();
    match pivot {
        Some(p) if p.norm() > 0.0 => {
            let phase = p.conj() / p.norm();
            y * phase
        }
        _ => y,
    }
}

/// Fills the unconstrained vectors at the `Omega0` points with an
/// orthonormal basis of the complement of the span of the others (as far
/// as there are points to fill). Biorthogonality on the constrained rows is
/// untouched.
pub fn complete_on_excluded(g: &Frame, omega0: &OmegaSubset) -> Result<Frame> {
    let mask = omega0.mask(g)?;
    let constrained: Vec<CVector> = g
        .vectors()
        .iter()
        .zip(&mask)
        .filter(|(_, excluded)| !**excluded)
        .map(|(v, _)| v.clone())
        .collect();
    let mut fill = numerics::span_basis(g.dim(), &constrained).complement().into_iter();
    let vectors = g
        .vectors()
        .iter()
        .zip(&mask)
        .map(|(v, excluded)| match excluded {
            true => fill.next().unwrap_or_else(|| CVector::zeros(g.dim())),
            false => v.clone(),
        })
        .collect();
    g.with_vectors(vectors)
}

/// Combined verdict on whether `F` admits an `Omega0`-dual.
///
/// The candidate is the supplied family or, if none, the minimal-norm
/// biorthogonal family, completed on `Omega0` when that is needed for a
/// lower bound. `DUAL_CONFIRMED` needs biorthogonality and a
/// positive lower bound for the candidate. `NO_DUAL_WITNESS` is returned
/// when biorthogonality holds, the candidate has a kernel witness, and no
/// biorthogonal family can span: every such family consists of one vector
/// per measure point, so with fewer points than dimensions no choice of
/// perturbation (or of the unconstrained vectors on `Omega0`) removes the
/// witness. Anything else is `INCONCLUSIVE`.
pub fn retro_dual_verdict(
    f: &Frame,
    omega0: &OmegaSubset,
    candidate: Option<&Frame>,
    tol: f64,
) -> Result<RetroVerdict> {
    let g = match candidate {
        Some(g) => {
            require_same_space(f, g)?;
            g.clone()
        }
        None => {
            let g = min_norm_biorthogonal(f, omega0, tol)?;
            if omega0.is_empty() || analysis_lower_bound(&g).a0 > tol {
                g
            } else {
                complete_on_excluded(&g, omega0)?
            }
        }
    };
    let biorth = check_biorthogonality(f, &g, omega0, tol)?;
    let AnalysisBounds { a0, b0 } = analysis_lower_bound(&g);
    let candidate_bounds = FrameBounds {
        lower: a0,
        upper: b0,
        optimal: true,
    };
    let n = f.dim();
    let rank = numerics::span_basis(n, g.vectors()).rank();
    let rank_deficit = n - rank;

    let witness = if a0 <= tol { witness(&g, tol) } else { None };
    let evidence = match &witness {
        Some(y) => Some(distance_profile(&g, y, None)?),
        None => None,
    };
    let span_f = numerics::span_basis(n, f.vectors()).rank();
    let max_achievable_rank = f.len().min(n);

    let (verdict, note) = if biorth.holds && a0 > tol {
        (
            Verdict::DualConfirmed,
            format!("biorthogonal candidate is bounded below with a0 = {a0:e} at truncation dimension {n}"),
        )
    } else if biorth.holds && witness.is_some() && max_achievable_rank < n {
        (
            Verdict::NoDualWitness,
            format!(
                "finite-scale evidence only: at truncation dimension {n} the {} measure points span a \
                 {span_f}-dimensional subspace, so every biorthogonal family misses a direction; \
                 the witness is orthogonal to every candidate vector",
                f.len()
            ),
        )
    } else if !biorth.holds {
        (
            Verdict::Inconclusive,
            format!("candidate is not biorthogonal (max residual {:e})", biorth.max_residual),
        )
    } else {
        (
            Verdict::Inconclusive,
            format!(
                "candidate has a0 = {a0:e} and rank deficit {rank_deficit}, but another biorthogonal \
                 family could still span at truncation dimension {n}"
            ),
        )
    };

    Ok(RetroVerdict {
        verdict,
        biorth,
        candidate_bounds,
        candidate: g,
        witness,
        rank_deficit,
        truncation_dim: n,
        evidence,
        note,
    })
}
