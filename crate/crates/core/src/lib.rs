//! Frames indexed by finite measure spaces.
//!
//! * [`numerics`]: dense complex linear-algebra kernels.
//! * [`frame`]: measure spaces, frames, analysis/frame operators, optimal
//!   bounds, classification and midpoint quadrature.
//! * [`dual`]: canonical and alternate dual frames, dual-pair verification.
//! * [`retro`]: biorthogonality on `Omega \ Omega0`, exactness distances,
//!   nested-span distance profiles, analysis lower bounds and the combined
//!   retro-dual verdict.
//! * [`scenarios`]: executable worked examples.
//! * [`io`]: frame files and 17-significant-digit JSON reports.

pub mod dual;
pub mod error;
pub mod frame;
pub mod io;
pub mod numerics;
pub mod retro;
pub mod scenarios;

pub use dual::{alternate_duals, canonical_dual, verify_hilbert_dual, AlternateDuals, DualPairReport};
pub use error::{Error, Result};
pub use frame::{uniform_quadrature, Field, Frame, FrameBounds, FrameClass, MeasureSpace, QuadratureRule, DEFAULT_TOL};
pub use retro::{
    analysis_lower_bound, check_biorthogonality, distance_profile, exactness_profile, min_norm_biorthogonal,
    retro_dual_verdict, AnalysisBounds, BiorthReport, DistanceProfile, OmegaSubset, RetroVerdict, Verdict,
};
pub use scenarios::{list_scenarios, run_scenario, run_scenario_with, ScenarioConfig, ScenarioInfo, ScenarioReport};
