//! Independent reference computations shared by the integration tests.
#![allow(dead_code)]

use std::f64::consts::PI;

const GL_NODES: [f64; 5] = [
    -0.906_179_845_938_664,
    -0.538_469_310_105_683_1,
    0.0,
    0.538_469_310_105_683_1,
    0.906_179_845_938_664,
];
const GL_WEIGHTS: [f64; 5] = [
    0.236_926_885_056_189_1,
    0.478_628_670_499_366_5,
    0.568_888_888_888_888_9,
    0.478_628_670_499_366_5,
    0.236_926_885_056_189_1,
];

/// Composite 5-point Gauss–Legendre on `[lo, hi]` with `pieces` panels.
pub fn gauss_legendre(f: impl Fn(f64) -> f64, lo: f64, hi: f64, pieces: usize) -> f64 {
    let w = (hi - lo) / pieces as f64;
    let mut sum = 0.0;
    for i in 0..pieces {
        let mid = lo + (i as f64 + 0.5) * w;
        for (x, c) in GL_NODES.iter().zip(GL_WEIGHTS) {
            sum += c * f(mid + 0.5 * w * x);
        }
    }
    0.5 * w * sum
}

/// Closed form of the kernel on `[0, 1]`, written out independently.
pub fn p_closed(x: f64) -> f64 {
    let r = x.rem_euclid(1.0);
    (r - 0.5).cosh() / (2.0 * 0.5f64.sinh())
}

pub fn p_closed_x(x: f64) -> f64 {
    let r = x.rem_euclid(1.0);
    (r - 0.5).sinh() / (2.0 * 0.5f64.sinh())
}

/// `(p * f)(x)` by quadrature over `s ∈ [x-1, x]`, where `p(x - s)` is smooth.
pub fn convolve(f: &impl Fn(f64) -> f64, x: f64) -> f64 {
    gauss_legendre(|s| p_closed(x - s) * f(s), x - 1.0, x, 64)
}

/// `(p_x * f)(x)` by quadrature, for the nonlocal term.
pub fn convolve_x(f: &impl Fn(f64) -> f64, x: f64) -> f64 {
    gauss_legendre(|s| p_closed_x(x - s) * f(s), x - 1.0, x, 64)
}

/// A trigonometric polynomial with analytic derivative.
#[derive(Clone, Debug)]
pub struct TrigPoly {
    pub mean: f64,
    pub cos: Vec<f64>,
    pub sin: Vec<f64>,
}

impl TrigPoly {
    pub fn eval(&self, x: f64) -> f64 {
        let mut v = self.mean;
        for (k, (a, b)) in self.cos.iter().zip(&self.sin).enumerate() {
            let w = 2.0 * PI * (k + 1) as f64;
            v += a * (w * x).cos() + b * (w * x).sin();
        }
        v
    }

    pub fn deriv(&self, x: f64) -> f64 {
        let mut v = 0.0;
        for (k, (a, b)) in self.cos.iter().zip(&self.sin).enumerate() {
            let w = 2.0 * PI * (k + 1) as f64;
            v += w * (-a * (w * x).sin() + b * (w * x).cos());
        }
        v
    }
}
