//! Parameterized reproductions of the worked examples and counterexamples,
//! plus two extension scenarios (a tight harmonic frame and a continuous
//! frame on the circle). Every scenario is deterministic in `(name, n, seed)`.

use std::f64::consts::PI;

use serde::Serialize;

use crate::dual::{alternate_duals, canonical_dual, verify_hilbert_dual};
use crate::error::{Error, Result};
use crate::frame::{uniform_quadrature, Frame, DEFAULT_TOL};
use crate::numerics::{self, CVector, C64};
use crate::retro::{
    analysis_lower_bound, check_biorthogonality, distance_profile, exactness_profile, min_norm_biorthogonal,
    retro_dual_verdict, OmegaSubset, Verdict,
};

#[derive(Debug, Clone, Serialize)]
pub struct ScenarioInfo {
    pub name: &'static str,
    pub anchor: &'static str,
    pub parameter: &'static str,
    pub min_n: usize,
    pub extension: bool,
}

const REGISTRY: [ScenarioInfo; 7] = [
    ScenarioInfo {
        name: "ex2_1",
        anchor: "Example 2.1",
        parameter: "n >= 3 measure points, dimension n - 1",
        min_n: 3,
        extension: false,
    },
    ScenarioInfo {
        name: "ex3_6",
        anchor: "Example 3.6",
        parameter: "n >= 3, orthonormal basis of dimension n",
        min_n: 3,
        extension: false,
    },
    ScenarioInfo {
        name: "ex3_7",
        anchor: "Example 3.7",
        parameter: "n >= 3, dimension n with n - 1 measure points",
        min_n: 3,
        extension: false,
    },
    ScenarioInfo {
        name: "ex3_9",
        anchor: "Example 3.9",
        parameter: "n >= 3, dimension n with n - 1 measure points",
        min_n: 3,
        extension: false,
    },
    ScenarioInfo {
        name: "prop3_11",
        anchor: "Proposition 3.11",
        parameter: "n >= 3, dimension n with n measure points",
        min_n: 3,
        extension: false,
    },
    ScenarioInfo {
        name: "circle",
        anchor: "Def 2.2 continuous measure",
        parameter: "n >= 3 midpoint quadrature nodes on [0, 2pi)",
        min_n: 3,
        extension: true,
    },
    ScenarioInfo {
        name: "mercedes",
        anchor: "Def 2.2 tight frame",
        parameter: "n >= 3 equiangular vectors in the plane (n = 3 is Mercedes-Benz)",
        min_n: 3,
        extension: true,
    },
];

/// Registered scenarios in a fixed order.
pub fn list_scenarios() -> Vec<ScenarioInfo> {
    REGISTRY.to_vec()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Check {
    /// `|measured - expected| <= tol`
    AbsWithin,
    /// `|measured - expected| <= tol * |expected|`
    RelWithin,
    /// `measured <= expected`
    AtMost,
    /// `measured < expected`
    Below,
    /// `measured > expected`
    Above,
    /// `measured >= expected`
    AtLeast,
    /// boolean condition, `measured` is 1 or 0
    IsTrue,
    /// recorded only, never fails
    Info,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Assertion {
    pub name: String,
    pub check: Check,
    pub measured: f64,
    pub expected: f64,
    pub tol: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScenarioReport {
    pub name: String,
    pub anchor: String,
    pub extension: bool,
    pub n: usize,
    pub seed: u64,
    pub assertions: Vec<Assertion>,
    pub notes: Vec<String>,
    pub all_pass: bool,
}

impl ScenarioReport {
    fn new(info: &ScenarioInfo, n: usize, seed: u64) -> Self {
        ScenarioReport {
            name: info.name.to_string(),
            anchor: info.anchor.to_string(),
            extension: info.extension,
            n,
            seed,
            assertions: Vec::new(),
            notes: Vec::new(),
            all_pass: true,
        }
    }

    fn push(&mut self, name: impl Into<String>, check: Check, measured: f64, expected: f64, tol: f64) {
        let pass = match check {
            Check::AbsWithin => (measured - expected).abs() <= tol,
            Check::RelWithin => (measured - expected).abs() <= tol * expected.abs(),
            Check::AtMost => measured <= expected,
            Check::Below => measured < expected,
            Check::Above => measured > expected,
            Check::AtLeast => measured >= expected,
            Check::IsTrue => measured == 1.0,
            Check::Info => true,
        };
        self.all_pass &= pass;
        self.assertions.push(Assertion {
            name: name.into(),
            check,
            measured,
            expected,
            tol,
            pass,
        });
    }

    fn near(&mut self, name: impl Into<String>, measured: f64, expected: f64, tol: f64) {
        self.push(name, Check::AbsWithin, measured, expected, tol);
    }

    fn rel(&mut self, name: impl Into<String>, measured: f64, expected: f64, tol: f64) {
        self.push(name, Check::RelWithin, measured, expected, tol);
    }

    fn below(&mut self, name: impl Into<String>, measured: f64, limit: f64) {
        self.push(name, Check::Below, measured, limit, 0.0);
    }

    fn at_most(&mut self, name: impl Into<String>, measured: f64, limit: f64) {
        self.push(name, Check::AtMost, measured, limit, 0.0);
    }

    fn above(&mut self, name: impl Into<String>, measured: f64, limit: f64) {
        self.push(name, Check::Above, measured, limit, 0.0);
    }

    fn at_least(&mut self, name: impl Into<String>, measured: f64, limit: f64) {
        self.push(name, Check::AtLeast, measured, limit, 0.0);
    }

    fn flag(&mut self, name: impl Into<String>, cond: bool) {
        self.push(name, Check::IsTrue, if cond { 1.0 } else { 0.0 }, 1.0, 0.0);
    }

    fn info(&mut self, name: impl Into<String>, measured: f64) {
        self.push(name, Check::Info, measured, f64::NAN, 0.0);
    }

    pub fn failures(&self) -> impl Iterator<Item = &Assertion> {
        self.assertions.iter().filter(|a| !a.pass)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScenarioConfig {
    /// Tolerance handed to the operations (frame/dual/biorthogonality tests).
    pub tol: f64,
    pub seed: u64,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        ScenarioConfig {
            tol: DEFAULT_TOL,
            seed: 0,
        }
    }
}

pub fn run_scenario(name: &str, n: usize) -> Result<ScenarioReport> {
    run_scenario_with(name, n, &ScenarioConfig::default())
}

pub fn run_scenario_with(name: &str, n: usize, cfg: &ScenarioConfig) -> Result<ScenarioReport> {
    let info = REGISTRY
        .iter()
        .find(|s| s.name == name)
        .ok_or_else(|| Error::UnknownScenario(name.to_string()))?;
    if n < info.min_n {
        return Err(Error::BadDimension(n));
    }
    let mut report = ScenarioReport::new(info, n, cfg.seed);
    match name {
        "ex2_1" => repeated_vector(&mut report, n, cfg)?,
        "ex3_6" => orthonormal(&mut report, n, cfg)?,
        "ex3_7" => shifted_no_dual(&mut report, n, cfg)?,
        "ex3_9" => shifted_with_basis(&mut report, n, cfg)?,
        "prop3_11" => power_weights(&mut report, n, cfg)?,
        "circle" => circle(&mut report, n, cfg)?,
        "mercedes" => harmonic(&mut report, n, cfg)?,
        _ => unreachable!("registry and dispatch agree"),
    }
    Ok(report)
}

fn e(dim: usize, k: usize) -> CVector {
    numerics::basis_vector(dim, k)
}

fn scaled(v: &CVector, c: f64) -> CVector {
    v * C64::new(c, 0.0)
}

fn max_deviation(a: &[CVector], b: &[CVector]) -> f64 {
    a.iter()
        .zip(b)
        .flat_map(|(x, y)| x.iter().zip(y.iter()).map(|(p, q)| (p - q).norm()))
        .fold(0.0, f64::max)
}

/// `{e1, e1, e2, ..., e_{n-1}}` in dimension `n - 1`.
pub fn repeated_vector_frame(n: usize) -> Result<Frame> {
    let d = n - 1;
    let mut vectors = vec![e(d, 0)];
    vectors.extend((0..d).map(|k| e(d, k)));
    Frame::new(
        crate::frame::MeasureSpace::counting_numbered(n)?,
        d,
        vectors,
        crate::frame::Field::Real,
    )
}

/// `F(w) = e_{w+1} + e_1`, `w = 1..n-1`, in dimension `n`.
pub fn shifted_frame(n: usize) -> Result<Frame> {
    let rows: Vec<Vec<f64>> = (1..n)
        .map(|w| {
            let mut r = vec![0.0; n];
            r[0] = 1.0;
            r[w] = 1.0;
            r
        })
        .collect();
    Frame::real_counting(&rows)
}

/// `F(w) = w^p e_w`, `w = 1..n`.
pub fn power_frame(n: usize, p: i32) -> Result<Frame> {
    let rows: Vec<Vec<f64>> = (1..=n)
        .map(|w| {
            let mut r = vec![0.0; n];
            r[w - 1] = (w as f64).powi(p);
            r
        })
        .collect();
    Frame::real_counting(&rows)
}

/// `(cos t, sin t)` sampled at the midpoint-rule nodes of `[0, 2pi)`.
pub fn circle_frame(m: usize) -> Result<Frame> {
    let q = uniform_quadrature(0.0, 2.0 * PI, m)?;
    let rows: Vec<Vec<f64>> = q.nodes.iter().map(|t| vec![t.cos(), t.sin()]).collect();
    Frame::real(q.space, &rows)
}

/// `n` equally spaced unit vectors in the plane.
pub fn harmonic_frame(n: usize) -> Result<Frame> {
    let rows: Vec<Vec<f64>> = (0..n)
        .map(|k| {
            let t = 2.0 * PI * k as f64 / n as f64;
            vec![t.cos(), t.sin()]
        })
        .collect();
    Frame::real_counting(&rows)
}

fn repeated_vector(r: &mut ScenarioReport, n: usize, cfg: &ScenarioConfig) -> Result<()> {
    let f = repeated_vector_frame(n)?;
    let d = f.dim();
    let bounds = f.optimal_bounds();
    r.near("optimal lower bound", bounds.lower, 1.0, 1e-10);
    r.near("optimal upper bound", bounds.upper, 2.0, 1e-10);
    let class = f.classify(cfg.tol);
    r.flag("frame, not tight", class.is_frame && !class.is_tight);
    r.flag("not exact", !class.is_exact);

    let canonical = canonical_dual(&f, cfg.tol)?;
    let mut expected = vec![scaled(&e(d, 0), 0.5), scaled(&e(d, 0), 0.5)];
    expected.extend((1..d).map(|k| e(d, k)));
    r.at_most(
        "canonical dual {e1/2, e1/2, e2, ...} max entry deviation",
        max_deviation(canonical.vectors(), &expected),
        1e-10,
    );

    let mut second = vec![CVector::zeros(d)];
    second.extend((0..d).map(|k| e(d, k)));
    let rep = verify_hilbert_dual(&f, &f.with_vectors(second)?, cfg.tol)?;
    r.below(
        "dual {0, e1, e2, ...} reconstruction residual",
        rep.reconstruction_residual,
        1e-10,
    );
    r.flag("dual {0, e1, e2, ...} verified", rep.is_dual);

    let mut third = vec![scaled(&e(d, 0), 1.0 / 3.0), scaled(&e(d, 0), 2.0 / 3.0)];
    third.extend((1..d).map(|k| e(d, k)));
    let rep = verify_hilbert_dual(&f, &f.with_vectors(third)?, cfg.tol)?;
    r.below(
        "dual {e1/3, 2e1/3, e2, ...} reconstruction residual",
        rep.reconstruction_residual,
        1e-10,
    );
    r.flag("dual {e1/3, 2e1/3, e2, ...} verified", rep.is_dual);

    let alt = alternate_duals(&f, 3, cfg.seed, 1.0, cfg.tol)?;
    let mut worst = 0.0_f64;
    let mut verified = 0;
    for g in &alt.duals {
        let rep = verify_hilbert_dual(&f, g, cfg.tol)?;
        worst = worst.max(rep.reconstruction_residual);
        verified += rep.is_dual as usize;
    }
    r.at_least("distinct verified alternate duals", verified as f64, 3.0);
    r.below("alternate duals max reconstruction residual", worst, 1e-10);

    // The printed canonical dual repeats the second basis vector, and the
    // printed second dual interleaves zeros; both are measured here.
    if n >= 4 {
        r.info(
            "distance of computed 4th canonical dual vector from e2",
            (&canonical.vectors()[3] - e(d, 1)).norm(),
        );
    }
    let interleaved: Vec<CVector> = (0..n)
        .map(|k| {
            if k % 2 == 0 || k.div_ceil(2) > d {
                CVector::zeros(d)
            } else {
                e(d, k.div_ceil(2) - 1)
            }
        })
        .collect();
    let rep = verify_hilbert_dual(&f, &f.with_vectors(interleaved)?, cfg.tol)?;
    r.info(
        "interleaved {0, e1, 0, e2, ...} reconstruction residual",
        rep.reconstruction_residual,
    );
    r.notes.push(
        "canonical dual computed as S^-1 F(w) = {e1/2, e1/2, e2, e3, ...}; the printed form repeats e2, \
         which disagrees with direct computation"
            .into(),
    );
    r.notes.push(
        "the interleaved form {0, e1, 0, e2, ...} does not reconstruct; {0, e1, e2, ...} does and is the one asserted"
            .into(),
    );
    Ok(())
}

fn orthonormal(r: &mut ScenarioReport, n: usize, cfg: &ScenarioConfig) -> Result<()> {
    let f = Frame::orthonormal_basis(n)?;
    let class = f.classify(cfg.tol);
    r.near("optimal lower bound", class.bounds.lower, 1.0, 1e-12);
    r.near("optimal upper bound", class.bounds.upper, 1.0, 1e-12);
    r.flag("Parseval", class.is_parseval);
    r.flag("exact", class.is_exact);
    let profile = exactness_profile(&f);
    r.near(
        "min exactness distance",
        profile.iter().copied().fold(f64::INFINITY, f64::min),
        1.0,
        1e-12,
    );
    let v = retro_dual_verdict(&f, &OmegaSubset::empty(), None, cfg.tol)?;
    r.flag("verdict DUAL_CONFIRMED", v.verdict == Verdict::DualConfirmed);
    r.near("a0 of strong dual", v.candidate_bounds.lower, 1.0, 1e-12);
    r.notes.push(v.note);
    Ok(())
}

fn shifted_no_dual(r: &mut ScenarioReport, n: usize, cfg: &ScenarioConfig) -> Result<()> {
    let f = shifted_frame(n)?;
    let k = (n - 1) as f64;

    let profile = exactness_profile(&f);
    let min_dist = profile.iter().copied().fold(f64::INFINITY, f64::min);
    r.above("min exactness distance", min_dist, 0.5);
    r.near(
        "exactness distance closed form sqrt((k+1)/k)",
        min_dist,
        ((k + 1.0) / k).sqrt(),
        1e-12,
    );
    let class = f.classify(cfg.tol);
    r.flag("exact", class.is_exact);
    r.at_most("lower frame bound on the full space", class.bounds.lower, 1e-12);

    let stated = f.with_vectors((1..n).map(|w| e(n, w)).collect())?;
    let rep = check_biorthogonality(&f, &stated, &OmegaSubset::empty(), cfg.tol)?;
    r.at_most("biorthogonality residual of G(w) = e_{w+1}", rep.max_residual, 1e-12);

    let g = min_norm_biorthogonal(&f, &OmegaSubset::empty(), cfg.tol)?;
    let rep = check_biorthogonality(&f, &g, &OmegaSubset::empty(), cfg.tol)?;
    r.below("minimal-norm biorthogonal residual", rep.max_residual, 1e-10);
    r.below("a0 of minimal-norm candidate", analysis_lower_bound(&g).a0, 1e-12);

    let v = retro_dual_verdict(&f, &OmegaSubset::empty(), None, cfg.tol)?;
    r.flag("verdict NO_DUAL_WITNESS", v.verdict == Verdict::NoDualWitness);
    r.near("rank deficit", v.rank_deficit as f64, 1.0, 0.0);
    match &v.witness {
        Some(w) => {
            let worst = v
                .candidate
                .vectors()
                .iter()
                .map(|gv| numerics::inner(w, gv).norm())
                .fold(0.0, f64::max);
            r.below("max |<witness, G(w)>|", worst, 1e-10);
            let s = 1.0 / (n as f64).sqrt();
            let mut expected = vec![-s; n];
            expected[0] = s;
            r.below(
                "witness distance from (1,-1,...,-1)/sqrt(n)",
                (w - numerics::real_vector(&expected)).norm(),
                1e-10,
            );
        }
        None => r.flag("witness present", false),
    }

    let p = distance_profile(&stated, &e(n, 0), None)?;
    let spread = p.distances.iter().map(|d| (d - 1.0).abs()).fold(0.0, f64::max);
    r.at_most("distance profile of e1 against e_{w+1} stays at 1", spread, 1e-12);
    r.notes.push(v.note);
    Ok(())
}

fn shifted_with_basis(r: &mut ScenarioReport, n: usize, cfg: &ScenarioConfig) -> Result<()> {
    let f = shifted_frame(n)?;
    let g = f.with_vectors((0..n - 1).map(|w| e(n, w)).collect())?;

    // |<e_{w0}, e_{w+1} + e_1> - delta|, zero-based w0, w
    let closed_form = |w0: usize, w: usize| -> f64 {
        let inner = (w0 == w + 1) as u8 as f64 + (w0 == 0) as u8 as f64;
        (inner - (w0 == w) as u8 as f64).abs()
    };
    let full = check_biorthogonality(&f, &g, &OmegaSubset::empty(), cfg.tol)?;
    let mut deviation = 0.0_f64;
    for (w0, row) in full.residual_matrix.iter().enumerate() {
        for (w, v) in row.iter().enumerate() {
            deviation = deviation.max((v - closed_form(w0, w)).abs());
        }
    }
    r.at_most("residual matrix matches direct computation", deviation, 0.0);
    r.info("max residual, Omega0 empty", full.max_residual);

    let mut best = f64::INFINITY;
    for label in f.space().labels() {
        let rep = check_biorthogonality(&f, &g, &OmegaSubset::from_labels([label.as_str()]), cfg.tol)?;
        r.info(format!("max residual, Omega0 = {{{label}}}"), rep.max_residual);
        best = best.min(rep.max_residual);
    }
    r.info("smallest max residual over singleton Omega0", best);

    let shifted_partner = f.with_vectors((1..n).map(|w| e(n, w)).collect())?;
    let rep = check_biorthogonality(&f, &shifted_partner, &OmegaSubset::empty(), cfg.tol)?;
    r.info("max residual with index-shifted G(w) = e_{w+1}", rep.max_residual);

    let b = g.optimal_bounds();
    r.info("lower frame bound of G at this truncation", b.lower);
    r.info("upper frame bound of G at this truncation", b.upper);
    let v = retro_dual_verdict(&f, &OmegaSubset::from_labels(["1"]), Some(&g), cfg.tol)?;
    r.info(
        "verdict with G, Omega0 = {1} (0 confirmed, 1 witness, 2 inconclusive)",
        verdict_code(v.verdict),
    );

    r.notes.push(
        "<e_{w0}, e_{w+1} + e_1> equals delta(w0, w+1) + delta(w0, 1), which matches delta(w0, w) only \
         under an index shift; residuals are reported, the stated biorthogonality is not asserted"
            .into(),
    );
    r.notes
        .push(format!("G = {{e_1..e_{}}} misses e_{n} at this truncation", n - 1));
    Ok(())
}

fn verdict_code(v: Verdict) -> f64 {
    match v {
        Verdict::DualConfirmed => 0.0,
        Verdict::NoDualWitness => 1.0,
        Verdict::Inconclusive => 2.0,
    }
}

fn power_weights(r: &mut ScenarioReport, n: usize, cfg: &ScenarioConfig) -> Result<()> {
    let f = power_frame(n, 2)?;
    let g = power_frame(n, -2)?;
    let nn = n as f64;

    let fb = f.optimal_bounds();
    r.rel("lower frame bound of F", fb.lower, 1.0, 1e-10);
    r.rel("upper frame bound of F", fb.upper, nn.powi(4), 1e-10);

    let rep = check_biorthogonality(&f, &g, &OmegaSubset::empty(), cfg.tol)?;
    r.below("biorthogonality residual", rep.max_residual, 1e-12);

    let min_norm = min_norm_biorthogonal(&f, &OmegaSubset::empty(), cfg.tol)?;
    r.at_most(
        "minimal-norm biorthogonal equals e_w / w^2 (max relative entry deviation)",
        max_deviation(min_norm.vectors(), g.vectors()) * nn.powi(2),
        1e-10,
    );

    let v = retro_dual_verdict(&f, &OmegaSubset::empty(), Some(&g), cfg.tol)?;
    r.flag("verdict DUAL_CONFIRMED", v.verdict == Verdict::DualConfirmed);
    r.rel("a0 = n^-4", v.candidate_bounds.lower, nn.powi(-4), 1e-10);

    let mut sizes = vec![4, 8, 16, n];
    sizes.sort_unstable();
    sizes.dedup();
    let trend: Vec<f64> = sizes
        .iter()
        .map(|&k| power_frame(k, -2).map(|g| analysis_lower_bound(&g).a0))
        .collect::<Result<_>>()?;
    for (k, a0) in sizes.iter().zip(&trend) {
        r.info(format!("a0 at n = {k}"), *a0);
    }
    r.flag("a0 strictly decreasing in n", trend.windows(2).all(|w| w[1] < w[0]));
    r.notes.push(
        "a0 is positive at every truncation but tends to zero, so the analysis map of G has no \
         uniform lower bound in the limit"
            .into(),
    );
    Ok(())
}

fn circle(r: &mut ScenarioReport, m: usize, cfg: &ScenarioConfig) -> Result<()> {
    let f = circle_frame(m)?;
    r.near("total weight 2pi", f.space().total_weight(), 2.0 * PI, 1e-13);
    let class = f.classify(cfg.tol);
    r.near("optimal lower bound", class.bounds.lower, PI, 1e-12);
    r.near("optimal upper bound", class.bounds.upper, PI, 1e-12);
    r.flag("tight", class.is_tight);
    r.flag("not Parseval", !class.is_parseval);
    let canonical = canonical_dual(&f, cfg.tol)?;
    let expected: Vec<CVector> = f.vectors().iter().map(|v| scaled(v, 1.0 / PI)).collect();
    r.at_most(
        "canonical dual is F / pi",
        max_deviation(canonical.vectors(), &expected),
        1e-12,
    );
    r.notes
        .push("extension: continuous measure on [0, 2pi) discretized by the midpoint rule".into());
    Ok(())
}

fn harmonic(r: &mut ScenarioReport, n: usize, cfg: &ScenarioConfig) -> Result<()> {
    let f = harmonic_frame(n)?;
    let class = f.classify(cfg.tol);
    let half = n as f64 / 2.0;
    r.near("optimal lower bound n/2", class.bounds.lower, half, 1e-12);
    r.near("optimal upper bound n/2", class.bounds.upper, half, 1e-12);
    r.flag("tight", class.is_tight);
    r.flag("not exact", !class.is_exact);
    let canonical = canonical_dual(&f, cfg.tol)?;
    let expected: Vec<CVector> = f.vectors().iter().map(|v| scaled(v, 1.0 / half)).collect();
    r.at_most(
        "canonical dual is (2/n) F",
        max_deviation(canonical.vectors(), &expected),
        1e-12,
    );
    let rep = verify_hilbert_dual(&f, &canonical, cfg.tol)?;
    r.below("canonical reconstruction residual", rep.reconstruction_residual, 1e-10);
    let alt = alternate_duals(&f, 3, cfg.seed, 1.0, cfg.tol)?;
    let verified = alt
        .duals
        .iter()
        .map(|g| verify_hilbert_dual(&f, g, cfg.tol).map(|rep| rep.is_dual))
        .collect::<Result<Vec<_>>>()?;
    r.at_least(
        "distinct verified duals",
        verified.iter().filter(|&&ok| ok).count() as f64,
        3.0,
    );
    r.notes.push("extension: equal-norm tight frame in the plane".into());
    Ok(())
}
