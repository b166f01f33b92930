//! The Gardner-Ostrovsky model: polynomial nonlinearity n, traveling-wave
//! function F(φ) = -cφ + n(φ), dispersion relation, the steady residual in
//! nonlocal form and its linearization, bifurcation speeds and the
//! transversality coefficient.
//!
//! The steady equation for a traveling wave `u(t,x) = φ(x - ct)` is
//! `(-cφ + n(φ) + β φ_xx)_xx = φ`, rewritten in the nonlocal form
//! `-φ + D⁻²L_{β,c}φ + L_{β,c} n(φ) = B_φ` with `L_{β,c} = 1/(c + βD²)`.
//! The residual here is the zero-mean projection of the left-hand side, so
//! the integration constant B_φ never becomes an unknown.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{CoreError, Result};
use crate::fourier::{
    self, apply_multiplier, convolve_quadrature, dealiased_map, dealiased_map2, kernel_k,
    project_zero_mean, smoothing_op, zero_mean_tol, WaveProfile,
};

/// Dispersion parameters and polynomial nonlinearity coefficients.
///
/// The nonlinearity is n(u) = Σ_{j=2}^{d} a_j u^j with d ≤ 6; the Coriolis
/// parameter γ is fixed to 1.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelParams {
    beta: f64,
    /// full coefficient list a_0..a_d with a_0 = a_1 = 0
    coeffs: Vec<f64>,
}

pub const GAMMA: f64 = 1.0;

/// Maximal supported polynomial degree of n.
pub const MAX_DEGREE: usize = 6;

impl ModelParams {
    /// General polynomial nonlinearity: `nonlin` lists (a_2, ..., a_d).
    pub fn new(beta: f64, nonlin: &[f64]) -> Result<Self> {
        if !beta.is_finite() || beta < 0.0 {
            return Err(CoreError::InvalidParameter(format!(
                "beta must be finite and nonnegative, got {beta}"
            )));
        }
        if nonlin.len() + 1 > MAX_DEGREE {
            return Err(CoreError::InvalidNonlinearity(format!(
                "polynomial degree {} exceeds the maximum {MAX_DEGREE}",
                nonlin.len() + 1
            )));
        }
        if nonlin.iter().any(|a| !a.is_finite()) {
            return Err(CoreError::InvalidNonlinearity(
                "coefficients must be finite".into(),
            ));
        }
        let mut coeffs = vec![0.0, 0.0];
        coeffs.extend_from_slice(nonlin);
        while coeffs.len() > 2 && coeffs.last() == Some(&0.0) {
            coeffs.pop();
        }
        if coeffs.len() <= 2 {
            return Err(CoreError::InvalidNonlinearity(
                "at least one coefficient must be nonzero".into(),
            ));
        }
        Ok(Self { beta, coeffs })
    }

    /// Gardner nonlinearity n(u) = (σ/2)u² + (α/3)u³.
    pub fn gardner(beta: f64, sigma: f64, alpha: f64) -> Result<Self> {
        Self::new(beta, &[sigma / 2.0, alpha / 3.0])
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn gamma(&self) -> f64 {
        GAMMA
    }

    /// Degree d of the nonlinearity.
    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    /// Coefficients (a_2, ..., a_d).
    pub fn nonlin_coeffs(&self) -> &[f64] {
        &self.coeffs[2..]
    }

    /// (σ, α) when n is the Gardner quadratic-cubic nonlinearity.
    pub fn gardner_coeffs(&self) -> Option<(f64, f64)> {
        if self.degree() <= 3 {
            let a2 = self.coeffs.get(2).copied().unwrap_or(0.0);
            let a3 = self.coeffs.get(3).copied().unwrap_or(0.0);
            Some((2.0 * a2, 3.0 * a3))
        } else {
            None
        }
    }

    /// n^{(order)}(u) by exact polynomial differentiation.
    pub fn nonlin(&self, u: f64, order: u32) -> f64 {
        let order = order as usize;
        if order > self.degree() {
            return 0.0;
        }
        // Horner with falling-factorial weights: d^order/du^order of a_j u^j
        let mut acc = 0.0;
        for j in (order..=self.degree()).rev() {
            let mut fall = 1.0;
            for i in 0..order {
                fall *= (j - i) as f64;
            }
            acc = acc * u + self.coeffs[j] * fall;
        }
        acc
    }

    /// Exact antiderivative N(u) with N(0) = 0, N' = n.
    pub fn nonlin_antiderivative(&self, u: f64) -> f64 {
        let mut acc = 0.0;
        for j in (2..=self.degree()).rev() {
            acc = (acc + self.coeffs[j] / (j + 1) as f64) * u;
        }
        acc * u * u
    }

    /// F^{(order)}(u) for F(u) = -cu + n(u).
    pub fn f_eval(&self, c: f64, u: f64, order: u32) -> f64 {
        match order {
            0 => -c * u + self.nonlin(u, 0),
            1 => -c + self.nonlin(u, 1),
            _ => self.nonlin(u, order),
        }
    }
}

/// Linear dispersion data at integer wavenumber k.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Dispersion {
    /// ω(k) = γ/k - βk³
    pub omega: f64,
    /// phase velocity ω/k = γ/k² - βk²
    pub phase: f64,
    /// group velocity dω/dk = -γ/k² - 3βk²
    pub group: f64,
}

/// Dispersion relation of the linearized equation; k must be nonzero.
pub fn dispersion(params: &ModelParams, k: i64) -> Result<Dispersion> {
    if k == 0 {
        return Err(CoreError::ZeroWavenumber);
    }
    let kf = k as f64;
    let k2 = kf * kf;
    Ok(Dispersion {
        omega: GAMMA / kf - params.beta * kf * kf * kf,
        phase: GAMMA / k2 - params.beta * k2,
        group: -GAMMA / k2 - 3.0 * params.beta * k2,
    })
}

/// Bifurcation speed c_k = 1/k² - βk², or None when nonpositive.
pub fn bifurcation_speed(params: &ModelParams, k: usize) -> Option<f64> {
    assert!(k >= 1, "bifurcation index must be positive");
    let k2 = (k * k) as f64;
    let c = 1.0 / k2 - params.beta * k2;
    (c > 0.0).then_some(c)
}

/// One steady solution: speed, profile, integration constant and residual.
#[derive(Debug, Clone)]
pub struct SteadyState {
    pub c: f64,
    pub profile: WaveProfile,
    /// integration constant B_φ, the mean of L_{β,c} n(φ)
    pub b_const: f64,
    /// sup-norm of the zero-mean steady residual
    pub residual_norm: f64,
}

impl SteadyState {
    pub fn new(params: &ModelParams, c: f64, profile: WaveProfile) -> Result<Self> {
        let b_const = integration_constant(params, c, &profile)?;
        let residual_norm = residual(params, c, &profile)?.sup_norm();
        Ok(Self {
            c,
            profile,
            b_const,
            residual_norm,
        })
    }
}

/// Pointwise nonlinearity n(φ) with exact cubic dealiasing.
pub fn nonlin_profile(params: &ModelParams, profile: &WaveProfile) -> WaveProfile {
    dealiased_map(profile, |u| params.nonlin(u, 0))
}

/// The integration constant B_φ = mean of L_{β,c} n(φ) = mean(n(φ))/c.
/// Exposed as a diagnostic; the residual absorbs it by projection.
pub fn integration_constant(params: &ModelParams, c: f64, profile: &WaveProfile) -> Result<f64> {
    if !(c > 0.0) {
        return Err(CoreError::NonpositiveSpeed(c));
    }
    require_zero_mean(profile)?;
    Ok(nonlin_profile(params, profile).mean() / c)
}

fn require_zero_mean(profile: &WaveProfile) -> Result<()> {
    let tol = zero_mean_tol(profile);
    let mean = profile.mean();
    if mean.abs() > tol {
        return Err(CoreError::NonzeroMean { mean, tol });
    }
    Ok(())
}

/// Zero-mean steady residual -φ + D⁻²L_{β,c}φ + L_{β,c}n(φ), projected.
/// A traveling wave of speed c makes this vanish identically.
pub fn residual(params: &ModelParams, c: f64, profile: &WaveProfile) -> Result<WaveProfile> {
    if !(c > 0.0) {
        return Err(CoreError::NonpositiveSpeed(c));
    }
    require_zero_mean(profile)?;
    let beta = params.beta;
    let d2l = apply_multiplier(profile, |k| {
        if k == 0 {
            f64::INFINITY
        } else {
            let k2 = (k * k) as f64;
            1.0 / (k2 * (c + beta * k2))
        }
    })?;
    let lnphi = smoothing_op(&nonlin_profile(params, profile), beta, c)?;
    let r = d2l.add_scaled(profile, -1.0)?.add_scaled(&lnphi, 1.0)?;
    Ok(project_zero_mean(&r))
}

/// Residual evaluated with quadrature convolution for D⁻² instead of the
/// spectral symbol, and the nonlinearity taken pointwise at the nodes.
/// Only available for β = 0; appropriate for peaked or cusped profiles
/// where spectral truncation converges slowly.
pub fn residual_quadrature(params: &ModelParams, c: f64, profile: &WaveProfile) -> Result<WaveProfile> {
    if params.beta != 0.0 {
        return Err(CoreError::RequiresZeroBeta(params.beta));
    }
    if !(c > 0.0) {
        return Err(CoreError::NonpositiveSpeed(c));
    }
    require_zero_mean(profile)?;
    let conv = convolve_quadrature(kernel_k, profile);
    let grid = profile.grid();
    let samples: Vec<f64> = (0..grid.len())
        .map(|j| {
            let u = profile.samples()[j];
            -u + (conv.samples()[j] + params.nonlin(u, 0)) / c
        })
        .collect();
    let r = WaveProfile::from_samples(grid, samples)?;
    Ok(project_zero_mean(&r))
}

/// Linearization of the residual at `profile`, applied to `psi`:
/// the zero-mean projection of -ψ + D⁻²L_{β,c}ψ + L_{β,c}(n'(φ)ψ).
pub fn jacobian_apply(
    params: &ModelParams,
    c: f64,
    profile: &WaveProfile,
    psi: &WaveProfile,
) -> Result<WaveProfile> {
    if !(c > 0.0) {
        return Err(CoreError::NonpositiveSpeed(c));
    }
    require_zero_mean(psi)?;
    let beta = params.beta;
    let d2l = apply_multiplier(psi, |k| {
        if k == 0 {
            f64::INFINITY
        } else {
            let k2 = (k * k) as f64;
            1.0 / (k2 * (c + beta * k2))
        }
    })?;
    let prod = dealiased_map2(profile, psi, |u, v| params.nonlin(u, 1) * v)?;
    let lprod = smoothing_op(&prod, beta, c)?;
    let r = d2l.add_scaled(psi, -1.0)?.add_scaled(&lprod, 1.0)?;
    Ok(project_zero_mean(&r))
}

/// Derivative of the residual with respect to the wave speed:
/// -D⁻²L²φ - L²n(φ), zero-mean projected (dL/dc = -L²).
pub fn residual_dc(params: &ModelParams, c: f64, profile: &WaveProfile) -> Result<WaveProfile> {
    if !(c > 0.0) {
        return Err(CoreError::NonpositiveSpeed(c));
    }
    let beta = params.beta;
    let term1 = apply_multiplier(profile, |k| {
        if k == 0 {
            f64::INFINITY
        } else {
            let k2 = (k * k) as f64;
            let l = 1.0 / (c + beta * k2);
            -l * l / k2
        }
    })?;
    let q = nonlin_profile(params, profile);
    let term2 = apply_multiplier(&q, |k| {
        let k2 = (k * k) as f64;
        let l = 1.0 / (c + beta * k2);
        -l * l
    })?;
    let r = term1.add_scaled(&term2, 1.0)?;
    Ok(project_zero_mean(&r))
}

/// Dense matrix of [`jacobian_apply`] in the zero-mean cosine basis
/// {cos(jx)}, j = 1..n/2 (`even_only`), or in the full real trigonometric
/// basis [cos(1..n/2), sin(1..n/2-1)]. Column j is `jacobian_apply` of the
/// j-th basis function.
pub fn jacobian_matrix(
    params: &ModelParams,
    c: f64,
    profile: &WaveProfile,
    even_only: bool,
) -> Result<DMatrix<f64>> {
    if even_only {
        jacobian_matrix_even(params, c, profile)
    } else {
        jacobian_matrix_full(params, c, profile)
    }
}

/// Even-basis Jacobian built analytically: the diagonal multiplier part plus
/// L·T where T is the cosine-basis matrix of multiplication by n'(φ). The
/// product-to-sum construction reproduces the dealiased product exactly,
/// including the fold onto the Nyquist row.
fn jacobian_matrix_even(params: &ModelParams, c: f64, profile: &WaveProfile) -> Result<DMatrix<f64>> {
    if !(c > 0.0) {
        return Err(CoreError::NonpositiveSpeed(c));
    }
    let beta = params.beta;
    let n = profile.grid().len();
    let m = n / 2;

    // cosine amplitudes of n'(φ) on the 2n grid: g(x) = Σ_{q=0}^{n} g_q cos(qx)
    let fine = fourier::resample(profile, 2 * n)?;
    let gfine = WaveProfile::from_samples(
        fine.grid(),
        fine.samples().iter().map(|&u| params.nonlin(u, 1)).collect(),
    )?;
    let mut gq = vec![0.0; n + 1];
    gq[0] = gfine.mean();
    for (q, slot) in gq.iter_mut().enumerate().skip(1) {
        *slot = gfine.cosine_coeff(q);
    }

    let mut mat = DMatrix::<f64>::zeros(m, m);
    for l in 1..=m {
        let k2 = (l * l) as f64;
        let sl = 1.0 / (c + beta * k2);
        for j in 1..=m {
            let mut t = if l == j {
                gq[0] + 0.5 * gq[l + j]
            } else {
                0.5 * (gq[l.abs_diff(j)] + gq[l + j])
            };
            if l == m && j == m {
                // cos(nx)·cos((n/2)x) sampled on the 2n grid folds its
                // (3n/2)-frequency half back onto the Nyquist mode
                t += 0.5 * gq[n];
            }
            let diag = if l == j { -1.0 + sl / k2 } else { 0.0 };
            mat[(l - 1, j - 1)] = diag + sl * t;
        }
    }
    Ok(mat)
}

fn jacobian_matrix_full(params: &ModelParams, c: f64, profile: &WaveProfile) -> Result<DMatrix<f64>> {
    let grid = profile.grid();
    let n = grid.len();
    let dim = full_basis_dim(n);
    let mut mat = DMatrix::<f64>::zeros(dim, dim);
    for j in 0..dim {
        let basis = full_basis_profile(grid, j)?;
        let col = jacobian_apply(params, c, profile, &basis)?;
        let coords = full_basis_coords(&col);
        for i in 0..dim {
            mat[(i, j)] = coords[i];
        }
    }
    Ok(mat)
}

/// Dimension of the full zero-mean trigonometric basis: n/2 cosines plus
/// n/2 - 1 sines.
pub fn full_basis_dim(n: usize) -> usize {
    n - 1
}

/// The j-th full-basis function: cos((j+1)x) for j < n/2, then
/// sin((j - n/2 + 1)x).
pub fn full_basis_profile(grid: crate::fourier::TorusGrid, j: usize) -> Result<WaveProfile> {
    let m = grid.len() / 2;
    let n = grid.len();
    let mut coeffs = vec![Complex64::ZERO; n];
    if j < m {
        let k = j + 1;
        if k < m {
            coeffs[k] = Complex64::new(0.5, 0.0);
            coeffs[n - k] = Complex64::new(0.5, 0.0);
        } else {
            coeffs[m] = Complex64::new(1.0, 0.0);
        }
    } else {
        let k = j - m + 1;
        debug_assert!(k < m);
        coeffs[k] = Complex64::new(0.0, -0.5);
        coeffs[n - k] = Complex64::new(0.0, 0.5);
    }
    WaveProfile::from_spectrum(grid, coeffs)
}

/// Coordinates of a zero-mean profile in the full basis.
pub fn full_basis_coords(f: &WaveProfile) -> Vec<f64> {
    let n = f.grid().len();
    let m = n / 2;
    let mut out = Vec::with_capacity(n - 1);
    for j in 1..=m {
        out.push(f.cosine_coeff(j));
    }
    for k in 1..m {
        // sin amplitude b_k = -2 Im f̂(k)
        out.push(-2.0 * f.coeff(k as i64).im);
    }
    out
}

/// Coefficient of cos(kx) in D²_{c,φ}G(c_k, 0)[cos(k·)] from the operator
/// formula -D⁻²L²: the transversality value -1/(k²(c_k + βk²)²). Strictly
/// negative wherever c_k is defined.
pub fn transversality_value(params: &ModelParams, k: usize) -> Result<f64> {
    let c_k = bifurcation_speed(params, k).ok_or(CoreError::NoBifurcationSpeed {
        k,
        beta: params.beta,
    })?;
    let k2 = (k * k) as f64;
    Ok(-1.0 / (k2 * (c_k + params.beta * k2).powi(2)))
}
