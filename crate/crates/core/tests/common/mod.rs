#![allow(dead_code)]

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use retroframe::numerics::{CVector, C64};
use retroframe::{Field, Frame, MeasureSpace};

pub fn gaussian_vector<R: Rng>(rng: &mut R, dim: usize, field: Field) -> CVector {
    CVector::from_fn(dim, |_, _| {
        let re: f64 = StandardNormal.sample(rng);
        match field {
            Field::Real => C64::new(re, 0.0),
            Field::Complex => C64::new(re, StandardNormal.sample(rng)),
        }
    })
}

pub fn random_field<R: Rng>(rng: &mut R) -> Field {
    if rng.random_bool(0.5) {
        Field::Complex
    } else {
        Field::Real
    }
}

pub fn random_space<R: Rng>(rng: &mut R, m: usize) -> MeasureSpace {
    let labels = (1..=m).map(|k| format!("w{k}")).collect();
    let weights = (0..m).map(|_| rng.random_range(0.2..3.0)).collect();
    MeasureSpace::new(labels, weights).unwrap()
}

pub fn random_frame<R: Rng>(rng: &mut R, dim: usize, m: usize, field: Field) -> Frame {
    let space = random_space(rng, m);
    let vectors = (0..m).map(|_| gaussian_vector(rng, dim, field)).collect();
    Frame::new(space, dim, vectors, field).unwrap()
}

/// Redraws until the optimal lower bound exceeds `1e-3`.
pub fn random_spanning_frame(rng: &mut ChaCha8Rng, dim: usize, m: usize, field: Field) -> Frame {
    loop {
        let f = random_frame(rng, dim, m, field);
        if f.optimal_bounds().lower > 1e-3 {
            return f;
        }
    }
}

pub fn max_abs_diff(a: &[CVector], b: &[CVector]) -> f64 {
    a.iter()
        .zip(b)
        .flat_map(|(x, y)| x.iter().zip(y.iter()).map(|(p, q)| (p - q).norm()))
        .fold(0.0, f64::max)
}

pub fn rel_err(x: f64, y: f64) -> f64 {
    (x - y).abs() / y.abs().max(f64::MIN_POSITIVE)
}
