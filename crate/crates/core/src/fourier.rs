//! Discrete Fourier representation of real periodic functions on the
//! 2π-torus and the nonlocal multiplier operators built on top of it.
//!
//! Conventions: collocation nodes x_j = -π + 2πj/n, Fourier coefficients
//! f̂(k) = (1/2π)∫ f(x) e^{-ikx} dx, so that f(x) = Σ_k f̂(k) e^{ikx} and a
//! multiplier operator acts as (Lf)^(k) = m(k) f̂(k).

use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::{Arc, Mutex, OnceLock};

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::error::{CoreError, Result};

/// Uniform collocation grid on the 2π-torus.
///
/// Holds only the node count; nodes and wavenumbers are derived. `n` is even
/// so the represented wavenumbers are |k| ≤ n/2, with the ±n/2 pair folded
/// into a single real cosine mode.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TorusGrid {
    n: usize,
}

impl TorusGrid {
    /// Create a grid with `n` nodes. `n` must be even and at least 8.
    pub fn new(n: usize) -> Result<Self> {
        if n < 8 || n % 2 != 0 {
            return Err(CoreError::InvalidGridSize(n));
        }
        Ok(Self { n })
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Node spacing 2π/n.
    pub fn spacing(&self) -> f64 {
        2.0 * PI / self.n as f64
    }

    /// j-th node, x_j = -π + 2πj/n.
    pub fn node(&self, j: usize) -> f64 {
        debug_assert!(j < self.n);
        -PI + 2.0 * PI * j as f64 / self.n as f64
    }

    pub fn nodes(&self) -> Vec<f64> {
        (0..self.n).map(|j| self.node(j)).collect()
    }

    /// Largest represented wavenumber, n/2.
    pub fn max_wavenumber(&self) -> i64 {
        (self.n / 2) as i64
    }

    /// Wavenumber of FFT bin `b`: b for b ≤ n/2, b - n otherwise.
    pub fn wavenumber_of_bin(&self, b: usize) -> i64 {
        debug_assert!(b < self.n);
        if b <= self.n / 2 {
            b as i64
        } else {
            b as i64 - self.n as i64
        }
    }

    /// FFT bin of wavenumber `k`, |k| ≤ n/2 (k = -n/2 shares the bin of n/2).
    pub fn bin_of(&self, k: i64) -> usize {
        let half = (self.n / 2) as i64;
        debug_assert!(k.abs() <= half);
        if k >= 0 {
            k as usize
        } else if k == -half {
            self.n / 2
        } else {
            (k + self.n as i64) as usize
        }
    }
}

fn fft_pair(n: usize) -> (Arc<dyn Fft<f64>>, Arc<dyn Fft<f64>>) {
    static PLANS: OnceLock<Mutex<HashMap<usize, (Arc<dyn Fft<f64>>, Arc<dyn Fft<f64>>)>>> =
        OnceLock::new();
    let cache = PLANS.get_or_init(|| Mutex::new(HashMap::new()));
    let mut cache = cache.lock().expect("fft plan cache poisoned");
    cache
        .entry(n)
        .or_insert_with(|| {
            let mut planner = FftPlanner::new();
            (planner.plan_fft_forward(n), planner.plan_fft_inverse(n))
        })
        .clone()
}

/// Real zero-or-nonzero-mean periodic function stored as samples at the grid
/// nodes together with its Fourier coefficients f̂(k) in FFT bin order.
#[derive(Debug, Clone)]
pub struct WaveProfile {
    grid: TorusGrid,
    samples: Vec<f64>,
    coeffs: Vec<Complex64>,
}

impl WaveProfile {
    /// Build a profile from sample values at the grid nodes.
    pub fn from_samples(grid: TorusGrid, samples: Vec<f64>) -> Result<Self> {
        if samples.len() != grid.len() {
            return Err(CoreError::SampleCountMismatch {
                expected: grid.len(),
                got: samples.len(),
            });
        }
        let coeffs = forward(grid, &samples);
        Ok(Self {
            grid,
            samples,
            coeffs,
        })
    }

    /// Sample a closure at the grid nodes.
    pub fn from_fn(grid: TorusGrid, f: impl Fn(f64) -> f64) -> Self {
        let samples: Vec<f64> = (0..grid.len()).map(|j| f(grid.node(j))).collect();
        let coeffs = forward(grid, &samples);
        Self {
            grid,
            samples,
            coeffs,
        }
    }

    /// Build a profile from a full spectrum in FFT bin order. The spectrum is
    /// symmetrized so the reconstruction is real.
    pub fn from_spectrum(grid: TorusGrid, mut coeffs: Vec<Complex64>) -> Result<Self> {
        if coeffs.len() != grid.len() {
            return Err(CoreError::SampleCountMismatch {
                expected: grid.len(),
                got: coeffs.len(),
            });
        }
        symmetrize(grid, &mut coeffs);
        let samples = inverse(grid, &coeffs);
        Ok(Self {
            grid,
            samples,
            coeffs,
        })
    }

    /// Zero-mean even profile Σ_j a_j cos(jx) from cosine amplitudes
    /// a_1..a_{n/2} (`amps[j-1]` is a_j; the last entry is the Nyquist mode).
    pub fn from_cosine_coeffs(grid: TorusGrid, amps: &[f64]) -> Result<Self> {
        let half = grid.len() / 2;
        if amps.len() != half {
            return Err(CoreError::SampleCountMismatch {
                expected: half,
                got: amps.len(),
            });
        }
        let mut coeffs = vec![Complex64::ZERO; grid.len()];
        for (idx, &a) in amps.iter().enumerate() {
            let j = idx + 1;
            if j < half {
                coeffs[j] = Complex64::new(a / 2.0, 0.0);
                coeffs[grid.len() - j] = Complex64::new(a / 2.0, 0.0);
            } else {
                coeffs[half] = Complex64::new(a, 0.0);
            }
        }
        let samples = inverse(grid, &coeffs);
        Ok(Self {
            grid,
            samples,
            coeffs,
        })
    }

    pub fn zero(grid: TorusGrid) -> Self {
        Self {
            grid,
            samples: vec![0.0; grid.len()],
            coeffs: vec![Complex64::ZERO; grid.len()],
        }
    }

    pub fn grid(&self) -> TorusGrid {
        self.grid
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    /// Full spectrum in FFT bin order.
    pub fn spectrum(&self) -> &[Complex64] {
        &self.coeffs
    }

    /// Fourier coefficient f̂(k), |k| ≤ n/2.
    pub fn coeff(&self, k: i64) -> Complex64 {
        let c = self.coeffs[self.grid.bin_of(k)];
        if k == -self.grid.max_wavenumber() {
            // the folded Nyquist pair is stored once, as a real cosine mode
            c.conj()
        } else {
            c
        }
    }

    /// Amplitude of cos(jx) in the real cosine expansion, 1 ≤ j ≤ n/2.
    pub fn cosine_coeff(&self, j: usize) -> f64 {
        debug_assert!(j >= 1 && j <= self.grid.len() / 2);
        if j < self.grid.len() / 2 {
            2.0 * self.coeffs[j].re
        } else {
            self.coeffs[j].re
        }
    }

    /// Cosine amplitudes a_1..a_{n/2} (see [`WaveProfile::from_cosine_coeffs`]).
    pub fn cosine_coeffs(&self) -> Vec<f64> {
        (1..=self.grid.len() / 2)
            .map(|j| self.cosine_coeff(j))
            .collect()
    }

    /// Mean value, i.e. f̂(0).
    pub fn mean(&self) -> f64 {
        self.coeffs[0].re
    }

    pub fn sup_norm(&self) -> f64 {
        self.samples.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn is_finite(&self) -> bool {
        self.samples.iter().all(|v| v.is_finite())
    }

    /// Translate by `delta`: returns x ↦ f(x - delta), applied spectrally.
    pub fn shift(&self, delta: f64) -> Self {
        let grid = self.grid;
        let mut coeffs = self.coeffs.clone();
        for (b, c) in coeffs.iter_mut().enumerate() {
            let k = grid.wavenumber_of_bin(b) as f64;
            *c *= Complex64::from_polar(1.0, -k * delta);
        }
        symmetrize(grid, &mut coeffs);
        let samples = inverse(grid, &coeffs);
        Self {
            grid,
            samples,
            coeffs,
        }
    }

    /// Reflect about `lambda`: returns x ↦ f(2λ - x), applied spectrally.
    pub fn reflect(&self, lambda: f64) -> Self {
        let grid = self.grid;
        let mut coeffs = vec![Complex64::ZERO; grid.len()];
        for (b, c) in coeffs.iter_mut().enumerate() {
            let k = grid.wavenumber_of_bin(b) as f64;
            // ĝ(k) = f̂(-k) e^{-2ikλ} = conj(f̂(k)) e^{-2ikλ} for real f
            *c = self.coeffs[b].conj() * Complex64::from_polar(1.0, -2.0 * k * lambda);
        }
        symmetrize(grid, &mut coeffs);
        let samples = inverse(grid, &coeffs);
        Self {
            grid,
            samples,
            coeffs,
        }
    }

    /// Pointwise linear combination self + t·other.
    pub fn add_scaled(&self, other: &Self, t: f64) -> Result<Self> {
        check_same_grid(self, other)?;
        let samples: Vec<f64> = self
            .samples
            .iter()
            .zip(&other.samples)
            .map(|(a, b)| a + t * b)
            .collect();
        let coeffs: Vec<Complex64> = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| a + t * b)
            .collect();
        Ok(Self {
            grid: self.grid,
            samples,
            coeffs,
        })
    }
}

/// Tolerance used by the zero-mean checks: 1e-12 · max(1, ‖f‖∞).
pub fn zero_mean_tol(f: &WaveProfile) -> f64 {
    1e-12 * f.sup_norm().max(1.0)
}

fn check_same_grid(a: &WaveProfile, b: &WaveProfile) -> Result<()> {
    if a.grid != b.grid {
        return Err(CoreError::GridMismatch(a.grid.len(), b.grid.len()));
    }
    Ok(())
}

fn check_zero_mean(f: &WaveProfile) -> Result<()> {
    let tol = zero_mean_tol(f);
    let mean = f.mean();
    if mean.abs() > tol {
        return Err(CoreError::NonzeroMean { mean, tol });
    }
    Ok(())
}

/// f̂(k) = (1/n) Σ_j f_j e^{-ik x_j}; the (-1)^bin twist accounts for the
/// nodes starting at -π rather than 0.
fn forward(grid: TorusGrid, samples: &[f64]) -> Vec<Complex64> {
    let n = grid.len();
    let (fft, _) = fft_pair(n);
    let mut buf: Vec<Complex64> = samples.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    fft.process(&mut buf);
    let scale = 1.0 / n as f64;
    for (b, c) in buf.iter_mut().enumerate() {
        let sign = if b % 2 == 0 { 1.0 } else { -1.0 };
        *c *= sign * scale;
    }
    buf
}

fn inverse(grid: TorusGrid, coeffs: &[Complex64]) -> Vec<f64> {
    let n = grid.len();
    let (_, ifft) = fft_pair(n);
    let mut buf: Vec<Complex64> = coeffs
        .iter()
        .enumerate()
        .map(|(b, &c)| if b % 2 == 0 { c } else { -c })
        .collect();
    ifft.process(&mut buf);
    buf.into_iter().map(|c| c.re).collect()
}

/// Force exact conjugate symmetry (and a real Nyquist bin) so the inverse
/// transform is real to rounding.
fn symmetrize(grid: TorusGrid, coeffs: &mut [Complex64]) {
    let n = grid.len();
    coeffs[0] = Complex64::new(coeffs[0].re, 0.0);
    coeffs[n / 2] = Complex64::new(coeffs[n / 2].re, 0.0);
    for k in 1..n / 2 {
        let avg = 0.5 * (coeffs[k] + coeffs[n - k].conj());
        coeffs[k] = avg;
        coeffs[n - k] = avg.conj();
    }
}

/// Apply a real, even Fourier multiplier: output coefficients m(k)·f̂(k).
///
/// The symbol is sampled at k = 0..n/2 and applied to ±k alike, which
/// enforces evenness and keeps the output real. A non-finite m(0) is allowed
/// when the input has zero mean; the k = 0 output is then pinned to 0. A
/// non-finite m(k) elsewhere is an error unless f̂(k) vanishes.
pub fn apply_multiplier(f: &WaveProfile, m: impl Fn(i64) -> f64) -> Result<WaveProfile> {
    let grid = f.grid();
    let n = grid.len();
    let coeff_floor = 1e-13 * f.sup_norm().max(1.0);
    let mut out = vec![Complex64::ZERO; n];
    for k in 0..=n / 2 {
        let sym = m(k as i64);
        let c = f.coeffs[k];
        if !sym.is_finite() {
            if k == 0 {
                check_zero_mean(f)?;
                out[0] = Complex64::ZERO;
                continue;
            }
            if c.norm() > coeff_floor {
                return Err(CoreError::NonFiniteSymbol { k: k as i64 });
            }
            continue;
        }
        out[k] = sym * c;
        if k > 0 && k < n / 2 {
            out[n - k] = sym * f.coeffs[n - k];
        }
    }
    WaveProfile::from_spectrum(grid, out)
}

/// D⁻²: divide f̂(k) by k² for k ≠ 0. Requires zero mean; the k = 0 output
/// coefficient is 0. Equals convolution with the kernel [`kernel_k`].
pub fn d2_inverse(f: &WaveProfile) -> Result<WaveProfile> {
    check_zero_mean(f)?;
    apply_multiplier(f, |k| {
        if k == 0 {
            f64::INFINITY
        } else {
            1.0 / (k * k) as f64
        }
    })
}

/// Smoothing operator 1/(c + βD²): divide f̂(k) by c + βk².
pub fn smoothing_op(f: &WaveProfile, beta: f64, c: f64) -> Result<WaveProfile> {
    if !(c > 0.0) {
        return Err(CoreError::NonpositiveSpeed(c));
    }
    if !(beta >= 0.0) {
        return Err(CoreError::InvalidParameter(format!(
            "beta must be nonnegative, got {beta}"
        )));
    }
    apply_multiplier(f, |k| 1.0 / (c + beta * (k * k) as f64))
}

/// Spectral derivative of the given order: coefficients (ik)^order f̂(k).
/// Odd orders zero the Nyquist mode, whose sine partner is not representable.
pub fn derivative(f: &WaveProfile, order: u32) -> WaveProfile {
    let grid = f.grid();
    let n = grid.len();
    let mut out = vec![Complex64::ZERO; n];
    for b in 0..n {
        let k = grid.wavenumber_of_bin(b);
        if b == n / 2 && order % 2 == 1 {
            continue;
        }
        let ik = Complex64::new(0.0, k as f64);
        out[b] = ik.powu(order) * f.coeffs[b];
    }
    WaveProfile::from_spectrum(grid, out).expect("spectrum length matches grid")
}

/// Subtract the mean; the output has f̂(0) = 0 exactly.
pub fn project_zero_mean(f: &WaveProfile) -> WaveProfile {
    let mean = f.mean();
    let mut coeffs = f.coeffs.clone();
    coeffs[0] = Complex64::ZERO;
    let samples: Vec<f64> = f.samples.iter().map(|v| v - mean).collect();
    WaveProfile {
        grid: f.grid,
        samples,
        coeffs,
    }
}

/// Periodic convolution ∫ kernel(x - y) f(y) dy by the trapezoid rule on the
/// grid nodes. Spectrally accurate for smooth kernels, second order at kinks;
/// the right tool for profiles whose spectral truncation converges slowly.
pub fn convolve_quadrature(kernel: impl Fn(f64) -> f64, f: &WaveProfile) -> WaveProfile {
    let grid = f.grid();
    let n = grid.len();
    let h = grid.spacing();
    // kernel values at node offsets d·h, reduced to [-π, π]
    let kv: Vec<f64> = (0..n).map(|d| kernel(reduce_to_pi(d as f64 * h))).collect();
    let samples: Vec<f64> = (0..n)
        .map(|j| {
            let mut acc = 0.0;
            for (l, &fl) in f.samples.iter().enumerate() {
                let d = (j + n - l) % n;
                acc += kv[d] * fl;
            }
            acc * h
        })
        .collect();
    WaveProfile::from_samples(grid, samples).expect("sample count matches grid")
}

/// Reduce x modulo 2π to [-π, π].
pub fn reduce_to_pi(x: f64) -> f64 {
    let r = x - 2.0 * PI * (x / (2.0 * PI)).round();
    r.clamp(-PI, PI)
}

/// Closed form of the convolution kernel of D⁻²:
/// K(x) = (1/4π)(|x| - π)² - π/12 on [-π, π].
pub fn kernel_k(x: f64) -> f64 {
    let r = reduce_to_pi(x).abs();
    (r - PI).powi(2) / (4.0 * PI) - PI / 12.0
}

/// Partial sum (1/π) Σ_{k=1}^{m} cos(xk)/k²; the series oracle for
/// [`kernel_k`]. The truncation error is bounded by 1/(π m) uniformly in x.
pub fn kernel_k_series(x: f64, m_terms: usize) -> f64 {
    assert!(m_terms >= 1, "m_terms must be at least 1");
    let mut acc = 0.0;
    for k in (1..=m_terms).rev() {
        let kf = k as f64;
        acc += (x * kf).cos() / (kf * kf);
    }
    acc / PI
}

/// Partial sum 1/(2πc) + (1/π) Σ_{k=1}^{m} cos(xk)/(c + βk²); the normative
/// definition of the smoothing kernel G_{β,c}.
pub fn kernel_g_series(x: f64, beta: f64, c: f64, m_terms: usize) -> f64 {
    assert!(beta > 0.0 && c > 0.0, "kernel_g_series requires beta, c > 0");
    assert!(m_terms >= 1, "m_terms must be at least 1");
    let mut acc = 0.0;
    for k in (1..=m_terms).rev() {
        let kf = k as f64;
        acc += (x * kf).cos() / (c + beta * kf * kf);
    }
    1.0 / (2.0 * PI * c) + acc / PI
}

/// Closed form of G_{β,c}, summed from the series:
/// cosh(√(c/β)(π - |x|)) / (2√(βc) sinh(π√(c/β))).
///
/// Evaluated in an exponential form that stays finite for large c/β.
pub fn kernel_g_closed(x: f64, beta: f64, c: f64) -> f64 {
    assert!(beta > 0.0 && c > 0.0, "kernel_g_closed requires beta, c > 0");
    let r = reduce_to_pi(x).abs();
    let s = (c / beta).sqrt();
    // cosh(s(π-r))/sinh(sπ) = e^{-sr} (1 + e^{-2s(π-r)}) / (1 - e^{-2sπ})
    let ratio = (-s * r).exp() * (1.0 + (-2.0 * s * (PI - r)).exp()) / (1.0 - (-2.0 * PI * s).exp());
    ratio / (2.0 * (beta * c).sqrt())
}

/// The closed form of G_{β,c} as printed in the source material, with c/β in
/// place of √(c/β). Kept only as a negative control; it does not match the
/// series (see `kernels --paper-g-form`).
pub fn kernel_g_printed(x: f64, beta: f64, c: f64) -> f64 {
    assert!(beta > 0.0 && c > 0.0, "kernel_g_printed requires beta, c > 0");
    let r = reduce_to_pi(x).abs();
    let q = c / beta;
    let ratio = (-q * r).exp() * (1.0 + (-2.0 * q * (PI - r)).exp()) / (1.0 - (-2.0 * PI * q).exp());
    1.0 / (2.0 * PI * c) + beta / (4.0 * c) * ratio - beta * beta / (4.0 * PI * c * c)
}

/// Evaluate `map` pointwise on a 2n zero-padded grid and truncate back to n
/// modes. Exact dealiasing for products up to cubic degree in the input.
pub fn dealiased_map(f: &WaveProfile, map: impl Fn(f64) -> f64) -> WaveProfile {
    let fine = pad_spectrum(f);
    let vals: Vec<f64> = fine.samples().iter().map(|&u| map(u)).collect();
    let fine_out = WaveProfile::from_samples(fine.grid(), vals).expect("fine grid length");
    truncate_spectrum(&fine_out, f.grid())
}

/// Two-argument variant of [`dealiased_map`].
pub fn dealiased_map2(
    f: &WaveProfile,
    g: &WaveProfile,
    map: impl Fn(f64, f64) -> f64,
) -> Result<WaveProfile> {
    check_same_grid(f, g)?;
    let ff = pad_spectrum(f);
    let gf = pad_spectrum(g);
    let vals: Vec<f64> = ff
        .samples()
        .iter()
        .zip(gf.samples())
        .map(|(&u, &v)| map(u, v))
        .collect();
    let fine_out = WaveProfile::from_samples(ff.grid(), vals).expect("fine grid length");
    Ok(truncate_spectrum(&fine_out, f.grid()))
}

/// Re-sample a profile on a grid of `n_new` nodes by spectral padding or
/// truncation.
pub fn resample(f: &WaveProfile, n_new: usize) -> Result<WaveProfile> {
    let new_grid = TorusGrid::new(n_new)?;
    if n_new >= f.grid().len() {
        let mut coeffs = vec![Complex64::ZERO; n_new];
        copy_into_larger(f, &mut coeffs);
        WaveProfile::from_spectrum(new_grid, coeffs)
    } else {
        Ok(truncate_spectrum(f, new_grid))
    }
}

fn pad_spectrum(f: &WaveProfile) -> WaveProfile {
    let n = f.grid().len();
    let fine_grid = TorusGrid::new(2 * n).expect("doubled grid is valid");
    let mut coeffs = vec![Complex64::ZERO; 2 * n];
    copy_into_larger(f, &mut coeffs);
    WaveProfile::from_spectrum(fine_grid, coeffs).expect("spectrum length matches grid")
}

fn copy_into_larger(f: &WaveProfile, coeffs: &mut [Complex64]) {
    let n = f.grid().len();
    let big = coeffs.len();
    coeffs[0] = f.coeffs[0];
    for k in 1..n / 2 {
        coeffs[k] = f.coeffs[k];
        coeffs[big - k] = f.coeffs[n - k];
    }
    // the folded Nyquist cosine splits into the ±n/2 pair
    let ny = 0.5 * f.coeffs[n / 2].re;
    coeffs[n / 2] = Complex64::new(ny, 0.0);
    coeffs[big - n / 2] = Complex64::new(ny, 0.0);
}

fn truncate_spectrum(f: &WaveProfile, grid: TorusGrid) -> WaveProfile {
    let big = f.grid().len();
    let n = grid.len();
    debug_assert!(n < big);
    let mut coeffs = vec![Complex64::ZERO; n];
    coeffs[0] = f.coeffs[0];
    for k in 1..n / 2 {
        coeffs[k] = f.coeffs[k];
        coeffs[n - k] = f.coeffs[big - k];
    }
    // fold the ±n/2 pair back into a single real cosine amplitude
    let ny = f.coeffs[n / 2] + f.coeffs[big - n / 2];
    coeffs[n / 2] = Complex64::new(ny.re, 0.0);
    WaveProfile::from_spectrum(grid, coeffs).expect("spectrum length matches grid")
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn grid(n: usize) -> TorusGrid {
        TorusGrid::new(n).unwrap()
    }

    #[test]
    fn make_grid_nodes() {
        let g = grid(8);
        let nodes = g.nodes();
        assert_eq!(nodes.len(), 8);
        assert_abs_diff_eq!(nodes[0], -PI, epsilon = 1e-15);
        assert_abs_diff_eq!(nodes[1], -3.0 * PI / 4.0, epsilon = 1e-15);
        assert_abs_diff_eq!(nodes[7], 3.0 * PI / 4.0, epsilon = 1e-15);
        for w in nodes.windows(2) {
            assert_abs_diff_eq!(w[1] - w[0], g.spacing(), epsilon = 1e-15);
        }
    }

    #[test]
    fn make_grid_rejects_odd_or_small() {
        assert!(TorusGrid::new(7).is_err());
        assert!(TorusGrid::new(6).is_err());
        assert!(TorusGrid::new(0).is_err());
        assert!(TorusGrid::new(256).is_ok());
        assert_abs_diff_eq!(grid(256).spacing(), 2.0 * PI / 256.0, epsilon = 1e-18);
    }

    #[test]
    fn roundtrip_is_exact_to_rounding() {
        let g = grid(64);
        let f = WaveProfile::from_fn(g, |x| (x.sin() * 2.0).exp() - 0.3 * (3.0 * x).cos());
        let back = WaveProfile::from_spectrum(g, f.spectrum().to_vec()).unwrap();
        let tol = 10.0 * f64::EPSILON * f.sup_norm();
        for (a, b) in f.samples().iter().zip(back.samples()) {
            assert!((a - b).abs() <= tol);
        }
    }

    #[test]
    fn coefficients_match_convention() {
        let g = grid(32);
        // f = 1 + 2cos(x) + 3sin(2x): f̂(0)=1, f̂(±1)=1, f̂(±2)=∓3i/2
        let f = WaveProfile::from_fn(g, |x| 1.0 + 2.0 * x.cos() + 3.0 * (2.0 * x).sin());
        assert_abs_diff_eq!(f.coeff(0).re, 1.0, epsilon = 1e-14);
        assert_abs_diff_eq!(f.coeff(1).re, 1.0, epsilon = 1e-14);
        assert_abs_diff_eq!(f.coeff(-1).re, 1.0, epsilon = 1e-14);
        assert_abs_diff_eq!(f.coeff(2).im, -1.5, epsilon = 1e-14);
        assert_abs_diff_eq!(f.coeff(-2).im, 1.5, epsilon = 1e-14);
        assert_abs_diff_eq!(f.mean(), 1.0, epsilon = 1e-14);
    }

    #[test]
    fn cosine_coeff_roundtrip_including_nyquist() {
        let g = grid(16);
        let mut amps = vec![0.0; 8];
        amps[0] = 1.5; // cos x
        amps[4] = -0.25; // cos 5x
        amps[7] = 0.75; // cos 8x = Nyquist
        let f = WaveProfile::from_cosine_coeffs(g, &amps).unwrap();
        for (j, &a) in amps.iter().enumerate() {
            assert_abs_diff_eq!(f.cosine_coeff(j + 1), a, epsilon = 1e-13);
        }
        // samples actually equal the cosine sum
        for (j, &s) in f.samples().iter().enumerate() {
            let x = g.node(j);
            let expect = 1.5 * x.cos() - 0.25 * (5.0 * x).cos() + 0.75 * (8.0 * x).cos();
            assert_abs_diff_eq!(s, expect, epsilon = 1e-12);
        }
    }

    #[test]
    fn multiplier_identity_and_eigenfunctions() {
        let g = grid(64);
        let f = WaveProfile::from_fn(g, |x| x.cos() + 0.5 * (3.0 * x).sin());
        let id = apply_multiplier(&f, |_| 1.0).unwrap();
        for (a, b) in f.samples().iter().zip(id.samples()) {
            assert_abs_diff_eq!(a, b, epsilon = 1e-12);
        }

        let cosx = WaveProfile::from_fn(g, |x| x.cos());
        let lap = apply_multiplier(&cosx, |k| (k * k) as f64).unwrap();
        for (a, b) in cosx.samples().iter().zip(lap.samples()) {
            assert_abs_diff_eq!(a, b, epsilon = 1e-12);
        }

        let cos2 = WaveProfile::from_fn(g, |x| (2.0 * x).cos());
        let inv = apply_multiplier(&cos2, |k| {
            if k == 0 {
                f64::NAN
            } else {
                1.0 / (k * k) as f64
            }
        })
        .unwrap();
        for (j, b) in inv.samples().iter().enumerate() {
            assert_abs_diff_eq!(*b, 0.25 * (2.0 * g.node(j)).cos(), epsilon = 1e-13);
        }
    }

    #[test]
    fn multiplier_rejects_nonfinite_symbol_on_live_mode() {
        let g = grid(32);
        let f = WaveProfile::from_fn(g, |x| (2.0 * x).cos());
        let err = apply_multiplier(&f, |k| if k == 2 { f64::NAN } else { 1.0 });
        assert!(matches!(err, Err(CoreError::NonFiniteSymbol { k: 2 })));
        // same symbol is fine when the mode is absent
        let f2 = WaveProfile::from_fn(g, |x| (3.0 * x).cos());
        assert!(apply_multiplier(&f2, |k| if k == 2 { f64::NAN } else { 1.0 }).is_ok());
    }

    #[test]
    fn d2_inverse_eigenvalues_and_mean_guard() {
        let g = grid(64);
        let cases: Vec<(WaveProfile, Box<dyn Fn(f64) -> f64>)> = vec![
            (
                WaveProfile::from_fn(g, |x| x.cos()),
                Box::new(|x: f64| x.cos()),
            ),
            (
                WaveProfile::from_fn(g, |x| (3.0 * x).cos()),
                Box::new(|x: f64| (3.0 * x).cos() / 9.0),
            ),
            (
                WaveProfile::from_fn(g, |x| (2.0 * x).sin()),
                Box::new(|x: f64| (2.0 * x).sin() / 4.0),
            ),
        ];
        for (f, expect) in cases {
            let out = d2_inverse(&f).unwrap();
            for (j, v) in out.samples().iter().enumerate() {
                assert_abs_diff_eq!(*v, expect(g.node(j)), epsilon = 1e-13);
            }
        }
        let bad = WaveProfile::from_fn(g, |x| 1.0 + x.cos());
        assert!(matches!(d2_inverse(&bad), Err(CoreError::NonzeroMean { .. })));
    }

    #[test]
    fn smoothing_op_symbol_values() {
        let g = grid(32);
        let f = WaveProfile::from_fn(g, |x| x.cos());
        let out = smoothing_op(&f, 0.0, 2.0).unwrap();
        assert_abs_diff_eq!(out.cosine_coeff(1), 0.5, epsilon = 1e-14);

        let out = smoothing_op(&f, 1.0, 1.0).unwrap();
        assert_abs_diff_eq!(out.cosine_coeff(1), 0.5, epsilon = 1e-14);

        let f2 = WaveProfile::from_fn(g, |x| (2.0 * x).cos());
        let out = smoothing_op(&f2, 0.5, 0.5).unwrap();
        assert_abs_diff_eq!(out.cosine_coeff(2), 1.0 / 2.5, epsilon = 1e-14);

        assert!(matches!(
            smoothing_op(&f, 1.0, 0.0),
            Err(CoreError::NonpositiveSpeed(_))
        ));
    }

    #[test]
    fn kernel_k_closed_form_values() {
        assert_abs_diff_eq!(kernel_k(PI), -PI / 12.0, epsilon = 1e-15);
        assert_abs_diff_eq!(kernel_k(-PI), -PI / 12.0, epsilon = 1e-15);
        assert_abs_diff_eq!(kernel_k(0.0), PI / 6.0, epsilon = 1e-15);
        // periodic reduction
        assert_abs_diff_eq!(kernel_k(2.0 * PI + 0.3), kernel_k(0.3), epsilon = 1e-13);
        // zero mean: exact integral of the piecewise quadratic
        // ∫K = 2[(1/4π)·π³/3 - (π/12)·π] = 0; check by Simpson on [0, π]
        let m = 4096;
        let h = PI / m as f64;
        let mut acc = kernel_k(0.0) + kernel_k(PI);
        for j in 1..m {
            let w = if j % 2 == 1 { 4.0 } else { 2.0 };
            acc += w * kernel_k(j as f64 * h);
        }
        acc *= h / 3.0 * 2.0; // both halves by symmetry
        assert_abs_diff_eq!(acc, 0.0, epsilon = 1e-12);
    }

    #[test]
    fn kernel_k_series_oracle() {
        let m = 100_000;
        assert_abs_diff_eq!(kernel_k_series(PI, m), -PI / 12.0, epsilon = 1e-4);
        assert_abs_diff_eq!(kernel_k_series(0.0, m), PI / 6.0, epsilon = 1e-4);
        assert_abs_diff_eq!(kernel_k_series(0.0, 1), 1.0 / PI, epsilon = 1e-15);
        // tail bound 1/(π m) over scattered points
        for i in 0..50 {
            let x = -PI + 2.0 * PI * i as f64 / 50.0;
            let diff = (kernel_k(x) - kernel_k_series(x, 10_000)).abs();
            assert!(diff <= 1.0 / (PI * 10_000.0) + 1e-12, "x={x} diff={diff}");
        }
    }

    #[test]
    fn kernel_g_series_matches_closed_form() {
        // the cosh closed form must track the series; the printed form must not
        for &(beta, c) in &[(1.0, 1.0), (0.5, 0.2), (2.0, 3.0)] {
            let mut worst = 0.0f64;
            for i in 0..33 {
                let x = -PI + 2.0 * PI * i as f64 / 33.0;
                let series = kernel_g_series(x, beta, c, 200_000);
                let closed = kernel_g_closed(x, beta, c);
                worst = worst.max((series - closed).abs());
            }
            assert!(worst < 1e-5, "beta={beta} c={c} worst={worst}");
        }
        let series = kernel_g_series(0.7, 1.0, 1.0, 200_000);
        assert!((kernel_g_printed(0.7, 1.0, 1.0) - series).abs() > 1e-3);
    }

    #[test]
    fn kernel_g_positive_and_unit_mass() {
        let (beta, c) = (1.0, 1.0);
        let mut min = f64::INFINITY;
        for i in 0..200 {
            let x = -PI + 2.0 * PI * i as f64 / 200.0;
            min = min.min(kernel_g_closed(x, beta, c));
        }
        assert!(min > 0.0);
        // ∫G = 1/c from the k=0 term; trapezoid is second order at the kink
        let n = 2048;
        let h = 2.0 * PI / n as f64;
        let total: f64 = (0..n).map(|j| kernel_g_closed(-PI + j as f64 * h, beta, c)).sum::<f64>() * h;
        assert_abs_diff_eq!(total, 1.0 / c, epsilon = 1e-5);
    }

    #[test]
    fn derivative_values() {
        let g = grid(64);
        let f = WaveProfile::from_fn(g, |x| x.cos());
        let d2 = derivative(&f, 2);
        for (j, v) in d2.samples().iter().enumerate() {
            assert_abs_diff_eq!(*v, -g.node(j).cos(), epsilon = 1e-12);
        }
        let s = WaveProfile::from_fn(g, |x| (2.0 * x).sin());
        let d1 = derivative(&s, 1);
        for (j, v) in d1.samples().iter().enumerate() {
            assert_abs_diff_eq!(*v, 2.0 * (2.0 * g.node(j)).cos(), epsilon = 1e-12);
        }
    }

    #[test]
    fn d2_inverse_then_second_derivative_negates() {
        let g = grid(128);
        let f = WaveProfile::from_fn(g, |x| (x.cos() + 1.0).sin() + 0.3 * (7.0 * x).sin());
        let f = project_zero_mean(&f);
        let out = derivative(&d2_inverse(&f).unwrap(), 2);
        let tol = 1e-12 * f.sup_norm().max(1.0);
        for (a, b) in out.samples().iter().zip(f.samples()) {
            assert!((a + b).abs() <= tol * 10.0, "{a} vs -{b}");
        }
    }

    #[test]
    fn project_zero_mean_cases() {
        let g = grid(32);
        let f = WaveProfile::from_fn(g, |x| 1.0 + x.cos());
        let p = project_zero_mean(&f);
        assert_eq!(p.coeff(0), Complex64::ZERO);
        for (j, v) in p.samples().iter().enumerate() {
            assert_abs_diff_eq!(*v, g.node(j).cos(), epsilon = 1e-13);
        }
        let already = WaveProfile::from_fn(g, |x| x.cos());
        let p2 = project_zero_mean(&already);
        for (a, b) in p2.samples().iter().zip(already.samples()) {
            assert_abs_diff_eq!(a, b, epsilon = 1e-14);
        }
        let constant = WaveProfile::from_fn(g, |_| 5.0);
        assert_abs_diff_eq!(project_zero_mean(&constant).sup_norm(), 0.0, epsilon = 1e-13);
    }

    #[test]
    fn quadrature_convolution_matches_spectral_on_cosine() {
        // K * cos = cos with O(n^{-2}) quadrature error; halving h quarters it
        let mut errs = Vec::new();
        for &n in &[256usize, 512] {
            let g = grid(n);
            let f = WaveProfile::from_fn(g, |x| x.cos());
            let conv = convolve_quadrature(kernel_k, &f);
            let err = conv
                .samples()
                .iter()
                .zip(f.samples())
                .fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
            errs.push(err);
        }
        assert!(errs[0] < 1e-3);
        let ratio = errs[0] / errs[1];
        assert!(ratio > 2.5 && ratio < 6.0, "second-order ratio, got {ratio}");

        let g = grid(256);
        let zero = WaveProfile::zero(g);
        assert_eq!(convolve_quadrature(kernel_k, &zero).sup_norm(), 0.0);
    }

    #[test]
    fn dealiased_product_is_alias_free() {
        // on a coarse grid, cos(5x)² = (1 + cos(10x))/2 would alias without padding
        let g = grid(16);
        let f = WaveProfile::from_fn(g, |x| (5.0 * x).cos());
        let sq = dealiased_map(&f, |u| u * u);
        assert_abs_diff_eq!(sq.mean(), 0.5, epsilon = 1e-13);
        // the 10-mode is beyond n/2 = 8 and must be absent, not folded back
        for j in 1..=8 {
            let expect = 0.0;
            assert_abs_diff_eq!(sq.cosine_coeff(j), expect, epsilon = 1e-13);
        }
    }

    #[test]
    fn resample_roundtrip() {
        let g = grid(32);
        let f = WaveProfile::from_fn(g, |x| x.cos() + 0.2 * (4.0 * x).sin());
        let up = resample(&f, 128).unwrap();
        let down = resample(&up, 32).unwrap();
        for (a, b) in f.samples().iter().zip(down.samples()) {
            assert_abs_diff_eq!(a, b, epsilon = 1e-13);
        }
        // upsampled profile interpolates the original nodes
        for j in 0..32 {
            assert_abs_diff_eq!(up.samples()[4 * j], f.samples()[j], epsilon = 1e-13);
        }
    }

    #[test]
    fn shift_and_reflect_are_spectral() {
        let g = grid(64);
        let f = WaveProfile::from_fn(g, |x| (x - 0.4).cos() + 0.1 * (3.0 * (x - 0.4)).sin());
        let shifted = f.shift(g.spacing() * 3.0);
        for j in 0..g.len() {
            let src = f.samples()[(j + g.len() - 3) % g.len()];
            assert_abs_diff_eq!(shifted.samples()[j], src, epsilon = 1e-12);
        }
        let refl = f.reflect(0.4);
        // φ(2λ-x) at nodes: compare against direct evaluation
        for j in 0..g.len() {
            let x = g.node(j);
            let expect = (0.8 - x - 0.4).cos() + 0.1 * (3.0 * (0.8 - x - 0.4)).sin();
            assert_abs_diff_eq!(refl.samples()[j], expect, epsilon = 1e-12);
        }
    }

    #[test]
    fn operators_commute_and_stay_real() {
        let g = grid(64);
        let f = project_zero_mean(&WaveProfile::from_fn(g, |x| {
            (x.sin()).exp() - 0.2 * (5.0 * x).cos()
        }));
        let a = smoothing_op(&d2_inverse(&f).unwrap(), 0.7, 1.3).unwrap();
        let b = d2_inverse(&smoothing_op(&f, 0.7, 1.3).unwrap()).unwrap();
        for (x, y) in a.samples().iter().zip(b.samples()) {
            assert_abs_diff_eq!(x, y, epsilon = 1e-15);
        }
        // conjugate symmetry of the output spectrum
        for k in 1..(g.len() / 2) as i64 {
            let diff = (a.coeff(k) - a.coeff(-k).conj()).norm();
            assert!(diff < 1e-16 * f.sup_norm().max(1.0) * 10.0);
        }
    }

    #[test]
    fn concurrent_use_on_distinct_inputs() {
        let handles: Vec<_> = (0..4)
            .map(|t| {
                std::thread::spawn(move || {
                    let g = TorusGrid::new(64 + 8 * t).unwrap();
                    let f = WaveProfile::from_fn(g, |x| x.cos());
                    let out = d2_inverse(&f).unwrap();
                    out.cosine_coeff(1)
                })
            })
            .collect();
        for h in handles {
            assert_abs_diff_eq!(h.join().unwrap(), 1.0, epsilon = 1e-13);
        }
    }
}
