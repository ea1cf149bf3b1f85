mod common;

use std::process::ExitCode;
use std::time::Instant;

use common::{gaussian_vector, max_abs_diff, random_field, random_frame, random_space, rel_err};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use retroframe::numerics::{self, basis_vector, hermitian_eigenvalues, inner, CMatrix, CVector, C64};
use retroframe::scenarios::{circle_frame, power_frame, repeated_vector_frame, shifted_frame};
use retroframe::{
    alternate_duals, analysis_lower_bound, canonical_dual, check_biorthogonality, distance_profile, exactness_profile,
    min_norm_biorthogonal, retro_dual_verdict, verify_hilbert_dual, Error, Frame, OmegaSubset, Verdict, DEFAULT_TOL,
};

const SEED: u64 = 20_240_611;

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn e(dim: usize, k: usize) -> CVector {
    basis_vector(dim, k)
}

fn criterion_1() -> Outcome {
    let n = 8;
    let f = repeated_vector_frame(n).map_err(|x| x.to_string())?;
    let d = f.dim();
    let b = f.optimal_bounds();
    ensure((b.lower - 1.0).abs() <= 1e-10 && (b.upper - 2.0).abs() <= 1e-10, || {
        format!("bounds ({}, {})", b.lower, b.upper)
    })?;

    let g = canonical_dual(&f, DEFAULT_TOL).map_err(|x| x.to_string())?;
    let mut expected = vec![e(d, 0) * C64::new(0.5, 0.0), e(d, 0) * C64::new(0.5, 0.0)];
    expected.extend((1..d).map(|k| e(d, k)));
    let dev = max_abs_diff(g.vectors(), &expected);
    ensure(dev <= 1e-10, || format!("canonical dual deviates by {dev:e}"))?;

    let zero = CVector::zeros(d);
    let mut e2 = vec![zero.clone()];
    e2.extend((0..d).map(|k| e(d, k)));
    let mut e3 = vec![e(d, 0), zero];
    e3.extend((1..d).map(|k| e(d, k)));
    let mut worst: f64 = 0.0;
    for vectors in [e2, e3] {
        let h = f.with_vectors(vectors).map_err(|x| x.to_string())?;
        let rep = verify_hilbert_dual(&f, &h, DEFAULT_TOL).map_err(|x| x.to_string())?;
        ensure(rep.is_dual && rep.reconstruction_residual < 1e-10, || {
            format!("alternate dual residual {:e}", rep.reconstruction_residual)
        })?;
        worst = worst.max(rep.reconstruction_residual);
    }

    let alts = alternate_duals(&f, 3, SEED, 1.0, DEFAULT_TOL).map_err(|x| x.to_string())?;
    ensure(alts.duals.len() >= 3, || {
        format!("{} alternate duals", alts.duals.len())
    })?;
    for (i, a) in alts.duals.iter().enumerate() {
        let rep = verify_hilbert_dual(&f, a, DEFAULT_TOL).map_err(|x| x.to_string())?;
        ensure(rep.is_dual, || format!("alternate {i} fails verification"))?;
        for b in &alts.duals[..i] {
            ensure(max_abs_diff(a.vectors(), b.vectors()) > 1e-6, || {
                format!("alternate {i} repeats")
            })?;
        }
    }
    Ok(format!(
        "canonical deviation {dev:.1e}, E''/E''' residual {worst:.1e}, {} alternates",
        alts.duals.len()
    ))
}

fn criterion_2() -> Outcome {
    for n in [1, 3, 8] {
        let f = Frame::orthonormal_basis(n).map_err(|x| x.to_string())?;
        let c = f.classify(DEFAULT_TOL);
        ensure(
            (c.bounds.lower - 1.0).abs() <= 1e-12 && (c.bounds.upper - 1.0).abs() <= 1e-12,
            || format!("n={n}: bounds ({}, {})", c.bounds.lower, c.bounds.upper),
        )?;
        ensure(c.is_parseval && c.is_exact, || format!("n={n}: {c:?}"))?;
        let v = retro_dual_verdict(&f, &OmegaSubset::empty(), None, DEFAULT_TOL).map_err(|x| x.to_string())?;
        ensure(v.verdict == Verdict::DualConfirmed, || {
            format!("n={n}: verdict {}", v.verdict)
        })?;
    }
    Ok("n in {1, 3, 8}: Parseval, exact, DUAL_CONFIRMED".into())
}

fn criterion_3() -> Outcome {
    let mut worst_biorth: f64 = 0.0;
    let mut worst_witness: f64 = 0.0;
    for n in [5, 6, 10] {
        let f = shifted_frame(n).map_err(|x| x.to_string())?;
        let prof = exactness_profile(&f);
        let min = prof.iter().cloned().fold(f64::INFINITY, f64::min);
        ensure(min > 0.5, || format!("n={n}: exactness min {min}"))?;

        let omega = OmegaSubset::empty();
        let g = min_norm_biorthogonal(&f, &omega, DEFAULT_TOL).map_err(|x| format!("n={n}: {x}"))?;
        let rep = check_biorthogonality(&f, &g, &omega, DEFAULT_TOL).map_err(|x| x.to_string())?;
        ensure(rep.max_residual < 1e-10, || {
            format!("n={n}: biorth residual {:e}", rep.max_residual)
        })?;
        worst_biorth = worst_biorth.max(rep.max_residual);
        let a0 = analysis_lower_bound(&g).a0;
        ensure(a0 < 1e-12, || format!("n={n}: a0 {a0:e}"))?;

        let v = retro_dual_verdict(&f, &omega, None, DEFAULT_TOL).map_err(|x| x.to_string())?;
        ensure(v.verdict == Verdict::NoDualWitness, || {
            format!("n={n}: verdict {}", v.verdict)
        })?;
        let y = v.witness.ok_or_else(|| format!("n={n}: no witness"))?;
        ensure((y.norm() - 1.0).abs() < 1e-10, || {
            format!("n={n}: witness norm {}", y.norm())
        })?;
        let wmax = v
            .candidate
            .vectors()
            .iter()
            .map(|gw| inner(&y, gw).norm())
            .fold(0.0, f64::max);
        ensure(wmax < 1e-10, || format!("n={n}: witness pairing {wmax:e}"))?;
        worst_witness = worst_witness.max(wmax);

        // G(w) = chi_{w+1}, w = 1..n-1.
        let chi = f
            .with_vectors((1..n).map(|k| e(n, k)).collect())
            .map_err(|x| x.to_string())?;
        let dp = distance_profile(&chi, &e(n, 0), None).map_err(|x| x.to_string())?;
        ensure(dp.distances.len() == n - 1, || {
            format!("n={n}: profile length {}", dp.distances.len())
        })?;
        let dev = dp.distances.iter().map(|d| (d - 1.0).abs()).fold(0.0, f64::max);
        ensure(dev < 1e-12, || format!("n={n}: chi_1 profile {:?}", dp.distances))?;
    }
    Ok(format!(
        "n in {{5, 6, 10}}: biorth residual {worst_biorth:.1e}, witness pairing {worst_witness:.1e}"
    ))
}

fn criterion_4() -> Outcome {
    let mut a0s = Vec::new();
    for n in [4, 8, 16] {
        let f = power_frame(n, 2).map_err(|x| x.to_string())?;
        let g = power_frame(n, -2).map_err(|x| x.to_string())?;
        let omega = OmegaSubset::empty();
        let rep = check_biorthogonality(&f, &g, &omega, DEFAULT_TOL).map_err(|x| x.to_string())?;
        ensure(rep.max_residual < 1e-12, || {
            format!("n={n}: residual {:e}", rep.max_residual)
        })?;
        let v = retro_dual_verdict(&f, &omega, Some(&g), DEFAULT_TOL).map_err(|x| x.to_string())?;
        ensure(v.verdict == Verdict::DualConfirmed, || {
            format!("n={n}: verdict {}", v.verdict)
        })?;
        let a0 = analysis_lower_bound(&g).a0;
        let expected = (n as f64).powi(-4);
        ensure(rel_err(a0, expected) <= 1e-10, || {
            format!("n={n}: a0 {a0:e} vs {expected:e}")
        })?;
        a0s.push(a0);
    }
    ensure(a0s.windows(2).all(|w| w[1] < w[0]), || {
        format!("a0 not decreasing: {a0s:?}")
    })?;
    Ok(format!("a0 = {:.3e}, {:.3e}, {:.3e}", a0s[0], a0s[1], a0s[2]))
}

fn criterion_5(rng: &mut ChaCha8Rng) -> Outcome {
    let (mut wb, mut wd, mut wr): (f64, f64, f64) = (0.0, 0.0, 0.0);
    for i in 0..200 {
        let dim = rng.random_range(1..=6);
        let m = rng.random_range(dim..=12);
        let field = random_field(rng);
        let f = random_frame(rng, dim, m, field);
        let fb = f.optimal_bounds();
        let g = canonical_dual(&f, DEFAULT_TOL).map_err(|x| format!("frame {i}: {x}"))?;
        let gb = g.optimal_bounds();
        let eb = rel_err(gb.lower, 1.0 / fb.upper).max(rel_err(gb.upper, 1.0 / fb.lower));
        ensure(eb <= 1e-8, || {
            format!("frame {i} (dim {dim}, m {m}): dual bounds off by {eb:e}")
        })?;
        let gg = canonical_dual(&g, DEFAULT_TOL).map_err(|x| format!("frame {i}: {x}"))?;
        let scale = f.vectors().iter().map(|v| v.norm()).fold(0.0, f64::max);
        let ed = max_abs_diff(gg.vectors(), f.vectors()) / scale;
        ensure(ed <= 1e-8, || format!("frame {i}: double dual off by {ed:e}"))?;
        let rep = verify_hilbert_dual(&f, &g, DEFAULT_TOL).map_err(|x| x.to_string())?;
        ensure(rep.reconstruction_residual < 1e-10, || {
            format!("frame {i}: reconstruction residual {:e}", rep.reconstruction_residual)
        })?;
        wb = wb.max(eb);
        wd = wd.max(ed);
        wr = wr.max(rep.reconstruction_residual);
    }
    Ok(format!(
        "worst: bounds {wb:.1e}, double dual {wd:.1e}, reconstruction {wr:.1e}"
    ))
}

fn criterion_6(rng: &mut ChaCha8Rng) -> Outcome {
    let (mut in_span, mut violation): (usize, f64) = (0, 0.0);
    for i in 0..500 {
        let dim = rng.random_range(1..=8);
        let m = rng.random_range(1..=10);
        let r = rng.random_range(1..=dim);
        let field = random_field(rng);
        // m vectors inside a random r-dimensional subspace.
        let gens: Vec<CVector> = (0..r).map(|_| gaussian_vector(rng, dim, field)).collect();
        let combo = |rng: &mut ChaCha8Rng, from: &[CVector]| {
            let c = gaussian_vector(rng, from.len(), field);
            from.iter()
                .zip(c.iter())
                .fold(CVector::zeros(dim), |acc, (v, ci)| acc + v * *ci)
        };
        let vectors: Vec<CVector> = (0..m).map(|_| combo(rng, &gens)).collect();
        let g = Frame::new(random_space(rng, m), dim, vectors.clone(), field).unwrap();
        let x = if rng.random_bool(0.5) {
            combo(rng, &vectors)
        } else {
            gaussian_vector(rng, dim, field)
        };

        let dp = distance_profile(&g, &x, None).map_err(|err| format!("pair {i}: {err}"))?;
        for w in dp.distances.windows(2) {
            violation = violation.max(w[1] - w[0]);
        }
        ensure(violation <= 1e-12, || {
            format!("pair {i}: profile increases {:?}", dp.distances)
        })?;

        let mut cols = CMatrix::zeros(dim, m + 1);
        for (k, v) in vectors.iter().enumerate() {
            cols.set_column(k, v);
        }
        let rank_g = numerics::rank(&cols.columns(0, m).into_owned());
        cols.set_column(m, &x);
        let spanned = numerics::rank(&cols) == rank_g;
        let last = *dp.distances.last().unwrap();
        ensure((last <= 1e-10) == spanned, || {
            format!("pair {i}: final distance {last:e} but rank says in_span={spanned}")
        })?;
        in_span += spanned as usize;
    }
    Ok(format!("{in_span}/500 in span, max increase {violation:.1e}"))
}

/// `sum_i mu_i |<x, F_i>|^2` for unit `x`, straight from the vectors.
fn rayleigh(f: &Frame, x: &CVector) -> f64 {
    f.vectors()
        .iter()
        .zip(f.space().weights())
        .map(|(v, mu)| mu * inner(x, v).norm_sqr())
        .sum()
}

/// Gaps between sampled extremes and eigenvalues are relative to `lambda_max`.
fn criterion_7(rng: &mut ChaCha8Rng) -> Outcome {
    const SAMPLES: usize = 100_000;
    let (mut worst, mut outside, mut strict_misses): (f64, f64, usize) = (0.0, 0.0, 0);
    for i in 0..100 {
        let dim = rng.random_range(1..=4);
        let m = rng.random_range(dim..=12);
        let field = random_field(rng);
        let f = random_frame(rng, dim, m, field);
        let eig = hermitian_eigenvalues(&f.frame_operator()).map_err(|x| x.to_string())?;
        let (lmin, lmax) = (eig[0], eig[dim - 1]);
        let (mut qmin, mut qmax) = (f64::INFINITY, f64::NEG_INFINITY);
        for _ in 0..SAMPLES {
            let mut x = gaussian_vector(rng, dim, field);
            x.unscale_mut(x.norm());
            let q = rayleigh(&f, &x);
            qmin = qmin.min(q);
            qmax = qmax.max(q);
        }
        outside = outside.max(lmin - qmin).max(qmax - lmax);
        ensure(qmin >= lmin - 1e-8 && qmax <= lmax + 1e-8, || {
            format!("frame {i}: samples [{qmin}, {qmax}] outside [{lmin}, {lmax}]")
        })?;
        let gap = (qmin - lmin).max(lmax - qmax) / lmax;
        ensure(gap <= 0.05, || {
            format!("frame {i} (dim {dim}, m {m}, {field:?}): extremes [{qmin}, {qmax}] vs [{lmin}, {lmax}]")
        })?;
        worst = worst.max(gap);
        strict_misses += (rel_err(qmin, lmin) > 0.05 || rel_err(qmax, lmax) > 0.05) as usize;
    }
    Ok(format!(
        "max excursion {outside:.1e}, worst extreme gap {:.2}% of lambda_max ({strict_misses}/100 frames beyond 5% of lambda_min)",
        100.0 * worst
    ))
}

fn criterion_8() -> Outcome {
    let f = circle_frame(16).map_err(|x| x.to_string())?;
    let c = f.classify(DEFAULT_TOL);
    let pi = std::f64::consts::PI;
    ensure(
        (c.bounds.lower - pi).abs() <= 1e-12 && (c.bounds.upper - pi).abs() <= 1e-12,
        || format!("bounds ({}, {})", c.bounds.lower, c.bounds.upper),
    )?;
    ensure(c.is_tight && !c.is_parseval, || format!("{c:?}"))?;
    Ok(format!(
        "bounds deviate from pi by {:.1e}",
        (c.bounds.lower - pi).abs().max((c.bounds.upper - pi).abs())
    ))
}

fn criterion_9(rng: &mut ChaCha8Rng) -> Outcome {
    let mut exact = 0;
    for i in 0..200 {
        let dim = rng.random_range(1..=6);
        let field = random_field(rng);
        let f = match rng.random_range(0..3) {
            0 => random_frame(rng, dim, dim, field),
            1 => {
                let m = rng.random_range(dim + 1..=dim + 4);
                random_frame(rng, dim, m, field)
            }
            _ => {
                // A basis plus a zero vector or a repeated vector.
                let b = random_frame(rng, dim, dim + 1, field);
                let mut vs = b.vectors().to_vec();
                vs[dim] = if rng.random_bool(0.5) {
                    CVector::zeros(dim)
                } else {
                    vs[0].clone() * C64::new(-0.5, 0.0)
                };
                b.with_vectors(vs).unwrap()
            }
        };
        if f.optimal_bounds().lower <= 1e-6 {
            continue;
        }
        let prof = exactness_profile(&f);
        let positive = prof.iter().all(|&d| d > DEFAULT_TOL);
        let outcome = min_norm_biorthogonal(&f, &OmegaSubset::empty(), DEFAULT_TOL);
        let feasible = match &outcome {
            Ok(_) => true,
            Err(Error::Infeasible { .. }) => false,
            Err(other) => return Err(format!("frame {i}: {other}")),
        };
        ensure(feasible == positive, || {
            format!("frame {i}: profile {prof:?} but feasible={feasible}")
        })?;
        ensure(f.classify(DEFAULT_TOL).is_exact == positive, || {
            format!("frame {i}: classify disagrees")
        })?;
        exact += positive as usize;
    }
    Ok(format!("{exact} exact / {} non-exact, all agree", 200 - exact))
}

fn main() -> ExitCode {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let start = Instant::now();
    let results: Vec<(&str, Outcome)> = vec![
        ("ex2_1 reproduction (n = 8)", criterion_1()),
        ("ex3_6 orthonormal basis", criterion_2()),
        ("ex3_7 no strong dual", criterion_3()),
        ("prop3_11 analysis lower bound", criterion_4()),
        ("canonical dual reciprocity, 200 frames", criterion_5(&mut rng)),
        ("distance-profile monotonicity, 500 pairs", criterion_6(&mut rng)),
        ("spectral oracle, 100 frames x 1e5 samples", criterion_7(&mut rng)),
        ("circle frame, m = 16", criterion_8()),
        (
            "exactness vs biorthogonal feasibility, 200 frames",
            criterion_9(&mut rng),
        ),
    ];
    let mut failed = 0;
    for (k, (name, outcome)) in results.iter().enumerate() {
        match outcome {
            Ok(detail) => println!("criterion {}: PASS  {name}: {detail}", k + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {}: FAIL  {name}: {why}", k + 1);
            }
        }
    }
    println!(
        "{} passed, {failed} failed in {:.1?}",
        results.len() - failed,
        start.elapsed()
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
