//! Uniform periodic grid on [0, 1), Fourier transforms and the multipliers
//! built on them: differentiation, the Green's function `p` of `1 - d²/dx²`
//! and its spectral inverse, and trigonometric interpolation off the grid.
//!
//! Forward transforms are normalised by `1/n`, so coefficient `k = 0` is the
//! mean of the samples. Coefficients are stored in FFT order: index `j`
//! holds wavenumber `j` for `j < n/2` and `j - n` otherwise.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::{Arc, Mutex, OnceLock};

use rustfft::num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::error::{DpError, Result};

const TWO_PI: f64 = 2.0 * PI;

/// Uniform grid `x_j = j/n`, `j = 0..n`, on the unit circle.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Grid {
    n: usize,
}

impl Grid {
    pub fn new(n: usize) -> Result<Self> {
        if n < 8 || !n.is_multiple_of(2) {
            return Err(DpError::InvalidGrid(n));
        }
        Ok(Grid { n })
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn dx(&self) -> f64 {
        1.0 / self.n as f64
    }

    #[inline]
    pub fn point(&self, j: usize) -> f64 {
        j as f64 / self.n as f64
    }

    pub fn points(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.n).map(move |j| self.point(j))
    }

    /// Signed wavenumber stored at FFT index `j`.
    #[inline]
    pub fn wavenumber(&self, j: usize) -> i64 {
        if j < self.n / 2 {
            j as i64
        } else {
            j as i64 - self.n as i64
        }
    }

    /// The Nyquist mode `k = -n/2`, which has no symmetric partner.
    #[inline]
    pub fn nyquist_index(&self) -> usize {
        self.n / 2
    }

    /// Largest `|k|` kept by the 2/3 rule. Products of fields limited to
    /// `|k| <= K` alias only into `|k| > K` when `3K < n`.
    #[inline]
    pub fn dealias_cutoff(&self) -> usize {
        (self.n - 1) / 3
    }

    /// Index of the grid point nearest to `x`, after reduction mod 1.
    pub fn nearest_index(&self, x: f64) -> usize {
        let r = x - x.floor();
        ((r * self.n as f64).round() as usize) % self.n
    }
}

/// Real 1-periodic function sampled on a [`Grid`].
#[derive(Clone, Debug, PartialEq)]
pub struct PeriodicField {
    grid: Grid,
    values: Vec<f64>,
}

impl PeriodicField {
    pub fn new(grid: Grid, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.n() {
            return Err(DpError::LengthMismatch {
                expected: grid.n(),
                got: values.len(),
            });
        }
        if let Some(j) = values.iter().position(|v| !v.is_finite()) {
            return Err(DpError::NonFinite(j));
        }
        Ok(PeriodicField { grid, values })
    }

    /// Skips the finiteness check; the solver inspects its own states.
    pub(crate) fn from_raw(grid: Grid, values: Vec<f64>) -> Self {
        debug_assert_eq!(values.len(), grid.n());
        PeriodicField { grid, values }
    }

    pub fn from_fn(grid: Grid, f: impl Fn(f64) -> f64) -> Self {
        let values = grid.points().map(f).collect();
        PeriodicField { grid, values }
    }

    pub fn constant(grid: Grid, c: f64) -> Self {
        PeriodicField {
            grid,
            values: vec![c; grid.n()],
        }
    }

    pub fn zeros(grid: Grid) -> Self {
        Self::constant(grid, 0.0)
    }

    #[inline]
    pub fn grid(&self) -> Grid {
        self.grid
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.grid.n()
    }

    #[inline]
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn is_finite(&self) -> bool {
        self.values.iter().all(|v| v.is_finite())
    }

    pub fn mean(&self) -> f64 {
        self.values.iter().sum::<f64>() / self.n() as f64
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Smallest sample and its index; ties resolve to the lowest index.
    pub fn argmin(&self) -> (usize, f64) {
        let mut best = (0, self.values[0]);
        for (j, &v) in self.values.iter().enumerate().skip(1) {
            if v < best.1 {
                best = (j, v);
            }
        }
        best
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Self {
        PeriodicField {
            grid: self.grid,
            values: self.values.iter().map(|&v| f(v)).collect(),
        }
    }

    /// `self + s * other`.
    pub fn axpy(&self, s: f64, other: &PeriodicField) -> Self {
        assert_eq!(self.grid, other.grid, "grid mismatch");
        PeriodicField {
            grid: self.grid,
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(a, b)| a + s * b)
                .collect(),
        }
    }

    pub fn sup_distance(&self, other: &PeriodicField) -> f64 {
        assert_eq!(self.grid, other.grid, "grid mismatch");
        self.values
            .iter()
            .zip(&other.values)
            .fold(0.0, |m, (a, b)| m.max((a - b).abs()))
    }
}

/// Fourier coefficients of a real field, normalised so that `coeff(0)` is
/// the mean.
#[derive(Clone, Debug)]
pub struct SpectralField {
    grid: Grid,
    coeffs: Vec<Complex64>,
}

struct Plans {
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

fn plans(n: usize) -> Arc<Plans> {
    static CACHE: OnceLock<Mutex<HashMap<usize, Arc<Plans>>>> = OnceLock::new();
    let mut cache = CACHE
        .get_or_init(|| Mutex::new(HashMap::new()))
        .lock()
        .expect("fft plan cache poisoned");
    cache
        .entry(n)
        .or_insert_with(|| {
            let mut planner = FftPlanner::new();
            Arc::new(Plans {
                forward: planner.plan_fft_forward(n),
                inverse: planner.plan_fft_inverse(n),
            })
        })
        .clone()
}

impl SpectralField {
    pub fn forward(field: &PeriodicField) -> Self {
        let n = field.n();
        let mut buf: Vec<Complex64> = field
            .values
            .iter()
            .map(|&v| Complex64::new(v, 0.0))
            .collect();
        plans(n).forward.process(&mut buf);
        let scale = 1.0 / n as f64;
        for c in &mut buf {
            *c *= scale;
        }
        SpectralField {
            grid: field.grid,
            coeffs: buf,
        }
    }

    /// Back to physical space. The imaginary part is discarded; it is
    /// round-off for Hermitian coefficient sets.
    pub fn inverse(&self) -> PeriodicField {
        let mut buf = self.coeffs.clone();
        plans(self.grid.n()).inverse.process(&mut buf);
        PeriodicField {
            grid: self.grid,
            values: buf.into_iter().map(|c| c.re).collect(),
        }
    }

    pub(crate) fn from_coeffs(grid: Grid, coeffs: Vec<Complex64>) -> Self {
        debug_assert_eq!(coeffs.len(), grid.n());
        SpectralField { grid, coeffs }
    }

    #[inline]
    pub fn grid(&self) -> Grid {
        self.grid
    }

    /// Coefficients in FFT order.
    #[inline]
    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    /// Coefficient of wavenumber `k ∈ [-n/2, n/2)`.
    pub fn coeff(&self, k: i64) -> Complex64 {
        let n = self.grid.n() as i64;
        assert!((-n / 2..n / 2).contains(&k), "wavenumber {k} out of range");
        self.coeffs[k.rem_euclid(n) as usize]
    }

    /// Multiply every coefficient by `m(k)`.
    pub fn apply(&mut self, m: impl Fn(i64) -> Complex64) {
        let grid = self.grid;
        for (j, c) in self.coeffs.iter_mut().enumerate() {
            *c *= m(grid.wavenumber(j));
        }
    }

    /// Zero every mode with `|k| > cutoff`. The Nyquist mode counts as
    /// `|k| = n/2`.
    pub fn truncate(&mut self, cutoff: usize) {
        let grid = self.grid;
        for (j, c) in self.coeffs.iter_mut().enumerate() {
            if grid.wavenumber(j).unsigned_abs() as usize > cutoff {
                *c = Complex64::new(0.0, 0.0);
            }
        }
    }

    /// Multiplier of an odd-order operator: the Nyquist mode is dropped.
    pub(crate) fn apply_odd(&mut self, m: impl Fn(i64) -> Complex64) {
        self.apply(m);
        let ny = self.grid.nyquist_index();
        self.coeffs[ny] = Complex64::new(0.0, 0.0);
    }

    /// Energy of the derivative, `Σ (2πk)²|c_k|²`, over modes with
    /// `lo < |k| <= hi`.
    pub fn slope_band_energy(&self, lo: usize, hi: usize) -> f64 {
        let grid = self.grid;
        self.coeffs
            .iter()
            .enumerate()
            .filter_map(|(j, c)| {
                let k = grid.wavenumber(j).unsigned_abs() as usize;
                (k > lo && k <= hi).then(|| {
                    let w = TWO_PI * k as f64;
                    w * w * c.norm_sqr()
                })
            })
            .sum()
    }

    /// Energy `Σ|c_k|²` over modes with `lo < |k| <= hi`.
    pub fn band_energy(&self, lo: usize, hi: usize) -> f64 {
        let grid = self.grid;
        self.coeffs
            .iter()
            .enumerate()
            .filter(|(j, _)| {
                let k = grid.wavenumber(*j).unsigned_abs() as usize;
                k > lo && k <= hi
            })
            .map(|(_, c)| c.norm_sqr())
            .sum()
    }
}

#[inline]
fn ik(k: i64) -> Complex64 {
    Complex64::new(0.0, TWO_PI * k as f64)
}

#[inline]
fn helmholtz_symbol(k: i64) -> f64 {
    let w = TWO_PI * k as f64;
    1.0 / (1.0 + w * w)
}

/// Green's function of `1 - d²/dx²` on the unit circle.
pub fn kernel_p(x: f64) -> f64 {
    let s = x - x.floor() - 0.5;
    s.cosh() / (2.0 * 0.5f64.sinh())
}

/// Derivative of [`kernel_p`] away from the integers. At an integer the
/// right limit `-1/2` is returned.
pub fn kernel_px(x: f64) -> f64 {
    let s = x - x.floor() - 0.5;
    s.sinh() / (2.0 * 0.5f64.sinh())
}

/// `p * f` with multiplier `1 / (1 + (2πk)²)`.
pub fn helmholtz_inverse(f: &PeriodicField) -> PeriodicField {
    let mut s = SpectralField::forward(f);
    s.apply(|k| Complex64::new(helmholtz_symbol(k), 0.0));
    s.inverse()
}

/// Spectral first derivative; the Nyquist mode is zeroed.
pub fn ddx(f: &PeriodicField) -> PeriodicField {
    let mut s = SpectralField::forward(f);
    s.apply_odd(ik);
    s.inverse()
}

/// Spectral second derivative with multiplier `-(2πk)²`. Even order, so the
/// Nyquist mode is kept and `f - d2dx2(f)` inverts [`helmholtz_inverse`]
/// exactly on every discrete field.
pub fn d2dx2(f: &PeriodicField) -> PeriodicField {
    let mut s = SpectralField::forward(f);
    s.apply(|k| {
        let w = TWO_PI * k as f64;
        Complex64::new(-w * w, 0.0)
    });
    s.inverse()
}

/// `min_x min(p + β p_x, p - β p_x)` over `samples` uniform points of one
/// period, using the closed forms of `p` and `p_x`. Nonnegative exactly
/// when `|β| <= coth(1/2)`.
///
/// Panics if `samples < 64`.
pub fn kernel_positivity_margin(beta: f64, samples: usize) -> f64 {
    assert!(samples >= 64, "need at least 64 sample points");
    let b = beta.abs();
    (0..samples)
        .map(|j| {
            let x = j as f64 / samples as f64;
            kernel_p(x) - b * kernel_px(x).abs()
        })
        .fold(f64::INFINITY, f64::min)
}

/// Evaluates the trigonometric interpolant of a field at arbitrary points.
///
/// The Nyquist mode enters as `c cos(π n x)`, which keeps the interpolant
/// real and reproduces the samples. The derivative omits it, matching
/// [`ddx`].
#[derive(Clone, Debug)]
pub struct Interpolant {
    n: usize,
    mean: f64,
    /// `c_k` for `k = 1..n/2`.
    positive: Vec<Complex64>,
    nyquist: f64,
}

/// Exact phase is recomputed every this many terms of the recurrence.
const RESEED: usize = 32;

impl Interpolant {
    pub fn new(f: &PeriodicField) -> Self {
        let s = SpectralField::forward(f);
        let n = f.n();
        Interpolant {
            n,
            mean: s.coeffs[0].re,
            positive: s.coeffs[1..n / 2].to_vec(),
            nyquist: s.coeffs[n / 2].re,
        }
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.eval_with_derivative(x).0
    }

    /// Value and spectral derivative at `x`.
    pub fn eval_with_derivative(&self, x: f64) -> (f64, f64) {
        let r = x - x.floor();
        let theta = TWO_PI * r;
        let step = Complex64::from_polar(1.0, theta);
        let mut value = 0.0;
        let mut deriv = 0.0;
        let mut z = step;
        for (i, c) in self.positive.iter().enumerate() {
            let k = i + 1;
            if k % RESEED == 0 {
                z = Complex64::from_polar(1.0, theta * k as f64);
            }
            let t = c * z;
            value += t.re;
            // d/dx Re(c e^{2πikx}) = Re(2πik c e^{2πikx}) = -2πk Im(c e^{..})
            deriv -= k as f64 * t.im;
            z *= step;
        }
        let nyq = self.nyquist * (PI * self.n as f64 * r).cos();
        (
            self.mean + 2.0 * value + nyq,
            2.0 * TWO_PI * deriv,
        )
    }
}

/// Trigonometric interpolation of `f` at `x`, O(n) per point.
pub fn interp_eval(f: &PeriodicField, x: f64) -> f64 {
    Interpolant::new(f).eval(x)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid(n: usize) -> Grid {
        Grid::new(n).unwrap()
    }

    #[test]
    fn grid_rejects_odd_and_small() {
        assert!(Grid::new(7).is_err());
        assert!(Grid::new(6).is_err());
        assert!(Grid::new(33).is_err());
        assert!(Grid::new(8).is_ok());
    }

    #[test]
    fn field_validation() {
        let g = grid(8);
        assert!(matches!(
            PeriodicField::new(g, vec![0.0; 7]),
            Err(DpError::LengthMismatch { expected: 8, got: 7 })
        ));
        let mut v = vec![0.0; 8];
        v[3] = f64::NAN;
        assert!(matches!(PeriodicField::new(g, v), Err(DpError::NonFinite(3))));
    }

    #[test]
    fn kernel_values() {
        let coth_half = 0.5f64.cosh() / 0.5f64.sinh();
        assert!((kernel_p(0.0) - coth_half / 2.0).abs() < 1e-15);
        assert!((kernel_p(0.0) - 1.0819767).abs() < 1e-7);
        assert!((kernel_p(0.5) - 1.0 / (2.0 * 0.5f64.sinh())).abs() < 1e-15);
        assert!((kernel_p(0.5) - 0.9595).abs() < 1e-4);
        assert_eq!(kernel_p(0.25), kernel_p(0.75));
        assert!((kernel_p(3.3) - kernel_p(0.3)).abs() < 1e-14);
        assert!((kernel_p(-0.2) - kernel_p(0.8)).abs() < 1e-14);
    }

    #[test]
    fn helmholtz_of_constant_and_cosine() {
        let g = grid(64);
        let c = PeriodicField::constant(g, 2.5);
        assert!(helmholtz_inverse(&c).sup_distance(&c) < 1e-14);

        let f = PeriodicField::from_fn(g, |x| (TWO_PI * x).cos());
        let want = f.map(|v| v / (1.0 + 4.0 * PI * PI));
        assert!(helmholtz_inverse(&f).sup_distance(&want) < 1e-15);
    }

    #[test]
    fn ddx_examples() {
        let g = grid(64);
        let c = PeriodicField::constant(g, -1.25);
        assert!(ddx(&c).max_abs() < 1e-14);

        let f = PeriodicField::from_fn(g, |x| (TWO_PI * x).sin());
        let want = PeriodicField::from_fn(g, |x| TWO_PI * (TWO_PI * x).cos());
        assert!(ddx(&f).sup_distance(&want) < 1e-12);
    }

    #[test]
    fn ddx_drops_nyquist() {
        let g = grid(16);
        let alt = PeriodicField::from_fn(g, |x| (PI * 16.0 * x).cos());
        assert!(ddx(&alt).max_abs() < 1e-12);
        // Even order keeps it.
        let d2 = d2dx2(&alt);
        let w = PI * 16.0;
        assert!(d2.sup_distance(&alt.map(|v| -w * w * v)) < 1e-9);
    }

    #[test]
    fn derivative_of_sampled_kernel_is_odd_about_half() {
        let n = 128;
        let g = grid(n);
        let p = PeriodicField::from_fn(g, kernel_p);
        let dp = ddx(&p);
        let v = dp.values();
        for j in 1..n {
            assert!((v[j] + v[n - j]).abs() < 1e-12, "j = {j}");
        }
    }

    #[test]
    fn positivity_margin_examples() {
        let coth_half = 0.5f64.cosh() / 0.5f64.sinh();
        let samples = 1 << 14;
        assert!(kernel_positivity_margin(1.5f64.sqrt(), samples) >= 0.0);
        assert!(kernel_positivity_margin(coth_half, samples).abs() < 1e-15);
        assert!(kernel_positivity_margin(3.0, samples) < 0.0);
        assert_eq!(
            kernel_positivity_margin(-2.0, samples),
            kernel_positivity_margin(2.0, samples)
        );
    }

    #[test]
    #[should_panic]
    fn positivity_margin_needs_samples() {
        kernel_positivity_margin(1.0, 32);
    }

    #[test]
    fn interpolation_examples() {
        let g = grid(64);
        let f = PeriodicField::from_fn(g, |x| (TWO_PI * x).sin());
        let want = (TWO_PI * 0.123).sin();
        assert!((interp_eval(&f, 0.123) - want).abs() < 1e-12);
        assert!((interp_eval(&f, 1.123) - want).abs() < 1e-12);

        let c = PeriodicField::constant(g, 0.75);
        for x in [0.0, 0.31, -4.2, 17.9] {
            assert!((interp_eval(&c, x) - 0.75).abs() < 1e-14);
        }
    }

    #[test]
    fn interpolant_derivative_matches_ddx() {
        let g = grid(32);
        let f = PeriodicField::from_fn(g, |x| {
            (TWO_PI * x).sin() + 0.4 * (3.0 * TWO_PI * x).cos() + 0.1 * (10.0 * TWO_PI * x).sin()
        });
        let df = ddx(&f);
        let ip = Interpolant::new(&f);
        let ipd = Interpolant::new(&df);
        for x in [0.0, 0.07, 0.5, 0.913] {
            let (_, d) = ip.eval_with_derivative(x);
            assert!((d - ipd.eval(x)).abs() < 1e-11);
        }
    }

    #[test]
    fn coefficient_accessor_and_mean() {
        let g = grid(16);
        let f = PeriodicField::from_fn(g, |x| 0.3 + (TWO_PI * 2.0 * x).cos());
        let s = SpectralField::forward(&f);
        assert!((s.coeff(0).re - 0.3).abs() < 1e-15);
        assert!((s.coeff(2).re - 0.5).abs() < 1e-15);
        assert!((s.coeff(-2).re - 0.5).abs() < 1e-15);
        assert!(s.coeff(-8).norm() < 1e-15);
    }
}
