//! The generating function against direct integration of the normal
//! characteristic function over both complex amplitudes.
//!
//! With `β_j = √λ_j (x_j + i y_j)` the integral becomes a 4-D Gauss-Hermite
//! quadrature of `exp(β†Aβ/2)`, where `A` is assembled here directly from
//! the six state parameters.

use twinbeam_core::state::{attenuate, beam_splitter, twin_beam, BeamSplitterParams, TwinBeamParams};
use twinbeam_core::{Complex64, KMatrix, TwoModeGaussianState};

/// Gauss-Hermite nodes and weights for weight `exp(-x²)`, by Newton
/// iteration on the orthonormal recurrence.
fn gauss_hermite(n: usize) -> (Vec<f64>, Vec<f64>) {
    let pim4 = std::f64::consts::PI.powf(-0.25);
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    let m = n.div_ceil(2);
    let nf = n as f64;
    let mut z = 0.0f64;
    for i in 0..m {
        z = match i {
            0 => (2.0 * nf + 1.0).sqrt() - 1.85575 * (2.0 * nf + 1.0).powf(-1.0 / 6.0),
            1 => z - 1.14 * nf.powf(0.426) / z,
            2 => 1.86 * z - 0.86 * x[0],
            3 => 1.91 * z - 0.91 * x[1],
            _ => 2.0 * z - x[i - 2],
        };
        let mut pp = 0.0;
        for _ in 0..100 {
            let mut p1 = pim4;
            let mut p2 = 0.0;
            for j in 1..=n {
                let p3 = p2;
                p2 = p1;
                p1 = z * (2.0 / j as f64).sqrt() * p2 - ((j - 1) as f64 / j as f64).sqrt() * p3;
            }
            pp = (2.0 * nf).sqrt() * p2;
            let z1 = z;
            z = z1 - p1 / pp;
            if (z - z1).abs() < 1e-15 {
                break;
            }
        }
        x[i] = z;
        x[n - 1 - i] = -z;
        w[i] = 2.0 / (pp * pp);
        w[n - 1 - i] = w[i];
    }
    (x, w)
}

fn normal_covariance(s: &TwoModeGaussianState) -> [[Complex64; 4]; 4] {
    let b1 = Complex64::new(-s.b1(), 0.0);
    let b2 = Complex64::new(-s.b2(), 0.0);
    let (c1, c2, d, db) = (s.c1(), s.c2(), s.d12(), s.dbar12());
    [
        [b1, c1, db.conj(), d],
        [c1.conj(), b1, d.conj(), db],
        [db, d, b2, c2],
        [d.conj(), db.conj(), c2.conj(), b2],
    ]
}

fn quadrature_g(s: &TwoModeGaussianState, l1: f64, l2: f64, nodes: &(Vec<f64>, Vec<f64>)) -> f64 {
    let a = normal_covariance(s);
    let (x, w) = nodes;
    let (r1, r2) = (l1.sqrt(), l2.sqrt());
    let mut total = 0.0;
    for (i, &x1) in x.iter().enumerate() {
        for (j, &y1) in x.iter().enumerate() {
            let beta1 = Complex64::new(x1, y1) * r1;
            let w1 = w[i] * w[j];
            for (k, &x2) in x.iter().enumerate() {
                for (l, &y2) in x.iter().enumerate() {
                    let beta2 = Complex64::new(x2, y2) * r2;
                    let v = [beta1, beta1.conj(), beta2, beta2.conj()];
                    let mut form = Complex64::new(0.0, 0.0);
                    for p in 0..4 {
                        for q in 0..4 {
                            form += v[p].conj() * a[p][q] * v[q];
                        }
                    }
                    total += w1 * w[k] * w[l] * (0.5 * form.re).exp();
                }
            }
        }
    }
    total / (std::f64::consts::PI * std::f64::consts::PI)
}

struct Lcg(u64);

impl Lcg {
    fn next(&mut self) -> f64 {
        self.0 = self.0.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
        (self.0 >> 11) as f64 / (1u64 << 53) as f64
    }
}

fn check(s: &TwoModeGaussianState, points: &[(f64, f64)], tol: f64) {
    let nodes = gauss_hermite(24);
    let k = KMatrix::from_state(s);
    for &(l1, l2) in points {
        let quad = quadrature_g(s, l1, l2, &nodes);
        let closed = k.generating_function(l1, l2);
        assert!(
            (quad - closed).abs() < tol * closed,
            "λ=({l1},{l2}): quadrature {quad} vs closed form {closed}"
        );
    }
}

#[test]
fn hermite_rule_integrates_polynomials() {
    let (x, w) = gauss_hermite(24);
    let m0: f64 = w.iter().sum();
    let m2: f64 = x.iter().zip(&w).map(|(x, w)| w * x * x).sum();
    let m4: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(4)).sum();
    let sp = std::f64::consts::PI.sqrt();
    assert!((m0 - sp).abs() < 1e-13);
    assert!((m2 - sp / 2.0).abs() < 1e-13);
    assert!((m4 - 3.0 * sp / 4.0).abs() < 1e-13);
}

#[test]
fn balanced_output_of_twin_beam() {
    let s = beam_splitter(&twin_beam(TwinBeamParams::noiseless(1.0).unwrap()), BeamSplitterParams::balanced());
    let mut rng = Lcg(7);
    let points: Vec<_> = (0..5).map(|_| (0.02 + 0.13 * rng.next(), 0.02 + 0.13 * rng.next())).collect();
    check(&s, &points, 1e-10);
}

#[test]
fn noisy_twin_beam() {
    let s = twin_beam(TwinBeamParams::new(0.8, 0.3, 0.1).unwrap());
    check(&s, &[(0.1, 0.05), (0.15, 0.15), (0.03, 0.12)], 1e-10);
}

#[test]
fn general_states_exercise_every_entry() {
    // unbalanced noise and a phase populate C1, C2, D and D̄ at once
    let mut rng = Lcg(42);
    for _ in 0..4 {
        let p = TwinBeamParams::new(0.2 + rng.next(), 0.5 * rng.next(), 0.5 * rng.next()).unwrap();
        let bs = BeamSplitterParams::new(rng.next(), 6.0 * rng.next()).unwrap();
        let s = beam_splitter(&twin_beam(p), bs);
        let s = attenuate(&s, 0.5 + 0.5 * rng.next(), 0.5 + 0.5 * rng.next()).unwrap();
        let s = beam_splitter(&s, BeamSplitterParams::new(rng.next(), 1.3).unwrap());
        assert!(s.c1().norm() > 0.0 && s.d12().norm() > 0.0 && s.dbar12().norm() > 0.0);
        check(&s, &[(0.12, 0.07), (0.05, 0.14)], 1e-9);
    }
}
