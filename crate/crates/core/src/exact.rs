//! Closed-form highest waves of the reduced and modified reduced Ostrovsky
//! equations, their steady-residual verification, and the Hamiltonian
//! machinery of the steady fourth-order ODE for β > 0.

use std::f64::consts::PI;

use crate::error::{CoreError, Result};
use crate::fourier::{convolve_quadrature, kernel_k, project_zero_mean, reduce_to_pi, TorusGrid, WaveProfile};
use crate::model::ModelParams;

/// Speed of the highest wave of the reduced Ostrovsky family (α = 0).
pub const REDUCED_SPEED: f64 = PI * PI / 9.0;

/// Speed of the highest wave of the modified reduced Ostrovsky family (σ = 0).
pub const MODIFIED_SPEED: f64 = PI * PI / 8.0;

/// Highest wave of the reduced Ostrovsky family:
/// φ_σ(x) = (3(|x| - π)² - π²)/(18σ), peaked at x = 0 with
/// φ_σ(0) = π²/(9σ) = c/σ, traveling at speed c = π²/9.
pub fn reduced_ostrovsky_peak(sigma: f64, x: f64) -> f64 {
    assert!(sigma != 0.0, "sigma must be nonzero");
    let r = reduce_to_pi(x).abs();
    (3.0 * (r - PI).powi(2) - PI * PI) / (18.0 * sigma)
}

/// Highest wave of the modified reduced Ostrovsky family:
/// φ_α(x) = (π/2 - |x|)/√(2α), peaked at x = 0 with
/// φ_α(0) = π/(2√(2α)) = √(c/α), traveling at speed c = π²/8.
pub fn modified_peak(alpha: f64, x: f64) -> f64 {
    assert!(alpha > 0.0, "alpha must be positive");
    let r = reduce_to_pi(x).abs();
    (PI / 2.0 - r) / (2.0 * alpha).sqrt()
}

/// The reduced-family highest wave as printed in the source material, with
/// an inner π² in place of π. Does not solve the steady equation; kept as a
/// negative control for `verify-exact --use-printed-form`.
pub fn reduced_ostrovsky_peak_printed(sigma: f64, x: f64) -> f64 {
    assert!(sigma != 0.0, "sigma must be nonzero");
    let r = reduce_to_pi(x).abs();
    (3.0 * (r - PI * PI).powi(2) - PI * PI) / (18.0 * sigma)
}

/// The modified-family highest wave as printed, with π²/2 in place of π/2.
/// Negative control only.
pub fn modified_peak_printed(alpha: f64, x: f64) -> f64 {
    assert!(alpha > 0.0, "alpha must be positive");
    let r = reduce_to_pi(x).abs();
    (PI * PI / 2.0 - r) / (2.0 * alpha).sqrt()
}

/// Which closed-form family to verify.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ExactWave {
    /// reduced Ostrovsky, α = 0, σ ≠ 0
    ReducedSigma(f64),
    /// modified reduced Ostrovsky, σ = 0, α > 0
    ModifiedAlpha(f64),
}

impl ExactWave {
    /// Designated wave speed of the family.
    pub fn speed(&self) -> f64 {
        match self {
            ExactWave::ReducedSigma(_) => REDUCED_SPEED,
            ExactWave::ModifiedAlpha(_) => MODIFIED_SPEED,
        }
    }

    pub fn params(&self) -> Result<ModelParams> {
        match *self {
            ExactWave::ReducedSigma(sigma) => ModelParams::gardner(0.0, sigma, 0.0),
            ExactWave::ModifiedAlpha(alpha) => ModelParams::gardner(0.0, 0.0, alpha),
        }
    }

    /// Sample the corrected closed form on a grid.
    pub fn sample(&self, grid: TorusGrid) -> WaveProfile {
        match *self {
            ExactWave::ReducedSigma(s) => {
                WaveProfile::from_fn(grid, |x| reduced_ostrovsky_peak(s, x))
            }
            ExactWave::ModifiedAlpha(a) => WaveProfile::from_fn(grid, |x| modified_peak(a, x)),
        }
    }

    /// Sample the printed (uncorrected) form on a grid.
    pub fn sample_printed(&self, grid: TorusGrid) -> WaveProfile {
        match *self {
            ExactWave::ReducedSigma(s) => {
                WaveProfile::from_fn(grid, |x| reduced_ostrovsky_peak_printed(s, x))
            }
            ExactWave::ModifiedAlpha(a) => {
                WaveProfile::from_fn(grid, |x| modified_peak_printed(a, x))
            }
        }
    }
}

/// Sup-norm of the zero-mean projection of F(φ) + K∗φ over the grid nodes,
/// with the convolution done by quadrature. Vanishes (up to quadrature
/// error) exactly when φ is a steady wave of speed c.
pub fn steady_residual_sup(params: &ModelParams, c: f64, profile: &WaveProfile) -> Result<f64> {
    if !(c > 0.0) {
        return Err(CoreError::NonpositiveSpeed(c));
    }
    let conv = convolve_quadrature(kernel_k, profile);
    let grid = profile.grid();
    let samples: Vec<f64> = (0..grid.len())
        .map(|j| params.f_eval(c, profile.samples()[j], 0) + conv.samples()[j])
        .collect();
    let r = WaveProfile::from_samples(grid, samples)?;
    Ok(project_zero_mean(&r).sup_norm())
}

/// Verify a closed-form highest wave: the residual sup-norm at the family's
/// designated speed, on an n-node grid. Use `speed_override` for negative
/// controls at the wrong speed.
pub fn verify_exact(wave: ExactWave, n: usize, speed_override: Option<f64>) -> Result<f64> {
    let grid = TorusGrid::new(n)?;
    let params = wave.params()?;
    let profile = wave.sample(grid);
    steady_residual_sup(&params, speed_override.unwrap_or_else(|| wave.speed()), &profile)
}

/// Residual of the printed (uncorrected) form; expected to be large.
pub fn verify_printed(wave: ExactWave, n: usize) -> Result<f64> {
    let grid = TorusGrid::new(n)?;
    let params = wave.params()?;
    let profile = wave.sample_printed(grid);
    steady_residual_sup(&params, wave.speed(), &profile)
}

/// State of the steady first-order system (φ, φ', v, v') at position x,
/// where φ'' = (cφ - n(φ) + γv)/β and v'' = φ.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OdeState {
    pub phi: f64,
    pub phi_prime: f64,
    pub v: f64,
    pub v_prime: f64,
    pub x: f64,
}

impl OdeState {
    pub fn new(phi: f64, phi_prime: f64, v: f64, v_prime: f64) -> Self {
        Self {
            phi,
            phi_prime,
            v,
            v_prime,
            x: 0.0,
        }
    }

    pub fn is_finite(&self) -> bool {
        self.phi.is_finite()
            && self.phi_prime.is_finite()
            && self.v.is_finite()
            && self.v_prime.is_finite()
    }
}

/// Hamiltonian E(φ,v) = ½((φ')² + (γ/β)(v')²) + (1/β)(-c/2 φ² + N(φ) - γvφ),
/// conserved along the steady ODE flow. Requires β > 0.
pub fn hamiltonian(params: &ModelParams, c: f64, state: &OdeState) -> Result<f64> {
    let beta = params.beta();
    if !(beta > 0.0) {
        return Err(CoreError::RequiresPositiveBeta(beta));
    }
    let gamma = params.gamma();
    let kinetic = 0.5 * (state.phi_prime.powi(2) + gamma / beta * state.v_prime.powi(2));
    let potential = (-0.5 * c * state.phi * state.phi + params.nonlin_antiderivative(state.phi)
        - gamma * state.v * state.phi)
        / beta;
    Ok(kinetic + potential)
}

/// Chain-rule derivative of E along the vector field, with φ'' and v''
/// substituted from the system. Cancels identically; evaluating it measures
/// only floating-point noise.
pub fn hamiltonian_rate(params: &ModelParams, c: f64, state: &OdeState) -> Result<f64> {
    let beta = params.beta();
    if !(beta > 0.0) {
        return Err(CoreError::RequiresPositiveBeta(beta));
    }
    let gamma = params.gamma();
    let phi_pp = (c * state.phi - params.nonlin(state.phi, 0) + gamma * state.v) / beta;
    let v_pp = state.phi;
    Ok(state.phi_prime * phi_pp + gamma / beta * state.v_prime * v_pp
        + (-c * state.phi * state.phi_prime + params.nonlin(state.phi, 0) * state.phi_prime
            - gamma * state.v_prime * state.phi
            - gamma * state.v * state.phi_prime)
            / beta)
}

/// A fixed-step RK4 trajectory of the steady system. `blew_up` is set when a
/// non-finite state was encountered; the trajectory is then truncated at the
/// last finite state.
#[derive(Debug, Clone)]
pub struct OdeTrajectory {
    pub states: Vec<OdeState>,
    pub blew_up: bool,
}

fn rhs(params: &ModelParams, c: f64, s: &OdeState) -> [f64; 4] {
    let beta = params.beta();
    let gamma = params.gamma();
    [
        s.phi_prime,
        (c * s.phi - params.nonlin(s.phi, 0) + gamma * s.v) / beta,
        s.v_prime,
        s.phi,
    ]
}

fn advance(s: &OdeState, k: &[f64; 4], h: f64) -> OdeState {
    OdeState {
        phi: s.phi + h * k[0],
        phi_prime: s.phi_prime + h * k[1],
        v: s.v + h * k[2],
        v_prime: s.v_prime + h * k[3],
        x: s.x,
    }
}

/// Classical fourth-order Runge-Kutta flow of the steady system over
/// `x_span = (x0, x1)` with fixed `step`. Requires β > 0.
pub fn ode_flow(
    params: &ModelParams,
    c: f64,
    state0: OdeState,
    x_span: (f64, f64),
    step: f64,
) -> Result<OdeTrajectory> {
    if !(params.beta() > 0.0) {
        return Err(CoreError::RequiresPositiveBeta(params.beta()));
    }
    if !(step > 0.0) {
        return Err(CoreError::InvalidParameter(format!(
            "step must be positive, got {step}"
        )));
    }
    let (x0, x1) = x_span;
    let n_steps = ((x1 - x0) / step).round() as usize;
    let mut states = Vec::with_capacity(n_steps + 1);
    let mut s = OdeState { x: x0, ..state0 };
    states.push(s);
    for i in 0..n_steps {
        let k1 = rhs(params, c, &s);
        let k2 = rhs(params, c, &advance(&s, &k1, step / 2.0));
        let k3 = rhs(params, c, &advance(&s, &k2, step / 2.0));
        let k4 = rhs(params, c, &advance(&s, &k3, step));
        let next = OdeState {
            phi: s.phi + step / 6.0 * (k1[0] + 2.0 * k2[0] + 2.0 * k3[0] + k4[0]),
            phi_prime: s.phi_prime + step / 6.0 * (k1[1] + 2.0 * k2[1] + 2.0 * k3[1] + k4[1]),
            v: s.v + step / 6.0 * (k1[2] + 2.0 * k2[2] + 2.0 * k3[2] + k4[2]),
            v_prime: s.v_prime + step / 6.0 * (k1[3] + 2.0 * k2[3] + 2.0 * k3[3] + k4[3]),
            x: x0 + (i + 1) as f64 * step,
        };
        if !next.is_finite() {
            return Ok(OdeTrajectory {
                states,
                blew_up: true,
            });
        }
        states.push(next);
        s = next;
    }
    Ok(OdeTrajectory {
        states,
        blew_up: false,
    })
}

/// Maximal relative Hamiltonian drift along a trajectory:
/// max_x |E(x) - E(0)| / max(1, |E(0)|).
pub fn hamiltonian_drift(params: &ModelParams, c: f64, traj: &OdeTrajectory) -> Result<f64> {
    let e0 = hamiltonian(params, c, &traj.states[0])?;
    let mut worst = 0.0f64;
    for s in &traj.states[1..] {
        let e = hamiltonian(params, c, s)?;
        worst = worst.max((e - e0).abs());
    }
    Ok(worst / e0.abs().max(1.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use rand::Rng;
    use rand::SeedableRng;

    #[test]
    fn reduced_peak_values() {
        assert_abs_diff_eq!(reduced_ostrovsky_peak(1.0, 0.0), PI * PI / 9.0, epsilon = 1e-15);
        assert_abs_diff_eq!(reduced_ostrovsky_peak(1.0, PI), -PI * PI / 18.0, epsilon = 1e-15);
        // peak value equals c/σ for several σ
        for sigma in [1.0, -1.0, 4.0] {
            assert_abs_diff_eq!(
                reduced_ostrovsky_peak(sigma, 0.0),
                REDUCED_SPEED / sigma,
                epsilon = 1e-14
            );
        }
        // evenness
        for x in [0.3, 1.1, 2.9] {
            assert_eq!(
                reduced_ostrovsky_peak(1.0, x),
                reduced_ostrovsky_peak(1.0, -x)
            );
        }
    }

    #[test]
    fn modified_peak_values() {
        let s2 = (2.0f64).sqrt();
        assert_abs_diff_eq!(modified_peak(1.0, 0.0), PI / (2.0 * s2), epsilon = 1e-15);
        assert_abs_diff_eq!(modified_peak(1.0, PI), -PI / (2.0 * s2), epsilon = 1e-15);
        assert_abs_diff_eq!(modified_peak(1.0, -PI), -PI / (2.0 * s2), epsilon = 1e-15);
        // peak equals √(c/α)
        for alpha in [0.5, 1.0, 4.0] {
            assert_abs_diff_eq!(
                modified_peak(alpha, 0.0),
                (MODIFIED_SPEED / alpha).sqrt(),
                epsilon = 1e-14
            );
        }
    }

    #[test]
    fn closed_forms_have_zero_mean() {
        // φ_σ is piecewise quadratic: Simpson on [0, π] is exact
        let m = 1 << 12;
        let h = PI / m as f64;
        let simpson = |f: &dyn Fn(f64) -> f64| {
            let mut acc = f(0.0) + f(PI);
            for j in 1..m {
                acc += f(j as f64 * h) * if j % 2 == 1 { 4.0 } else { 2.0 };
            }
            acc * h / 3.0
        };
        let int_r = simpson(&|x| reduced_ostrovsky_peak(2.5, x));
        assert_abs_diff_eq!(int_r, 0.0, epsilon = 1e-13);
        let int_m = simpson(&|x| modified_peak(0.7, x));
        assert_abs_diff_eq!(int_m, 0.0, epsilon = 1e-13);
    }

    #[test]
    fn peak_sits_at_singular_level_with_critical_slope() {
        // F'(φ(0)) = 0 exactly at the crest for both families
        let pr = ModelParams::gardner(0.0, 1.0, 0.0).unwrap();
        assert_abs_diff_eq!(
            pr.f_eval(REDUCED_SPEED, reduced_ostrovsky_peak(1.0, 0.0), 1),
            0.0,
            epsilon = 1e-14
        );
        let pm = ModelParams::gardner(0.0, 0.0, 1.0).unwrap();
        assert_abs_diff_eq!(
            pm.f_eval(MODIFIED_SPEED, modified_peak(1.0, 0.0), 1),
            0.0,
            epsilon = 1e-14
        );
        // one-sided slope of φ_σ at 0 is π/3
        let h = 1e-7;
        let slope = (reduced_ostrovsky_peak(1.0, h) - reduced_ostrovsky_peak(1.0, 0.0)) / h;
        assert_abs_diff_eq!(slope.abs(), PI / 3.0, epsilon = 1e-6);
    }

    #[test]
    fn verify_exact_accepts_corrected_forms() {
        for sigma in [1.0, -1.0] {
            let r = verify_exact(ExactWave::ReducedSigma(sigma), 2048, None).unwrap();
            assert!(r <= 4e-4, "sigma={sigma} residual {r}");
        }
        let r = verify_exact(ExactWave::ModifiedAlpha(1.0), 2048, None).unwrap();
        assert!(r <= 4e-4, "alpha=1 residual {r}");
    }

    #[test]
    fn verify_exact_rejects_wrong_speed_and_printed_form() {
        let r = verify_exact(ExactWave::ReducedSigma(1.0), 2048, Some(1.0)).unwrap();
        assert!(r >= 1e-2, "wrong-speed residual {r}");
        let r = verify_printed(ExactWave::ReducedSigma(1.0), 2048).unwrap();
        assert!(r >= 1e-2, "printed-form residual {r}");
        let r = verify_printed(ExactWave::ModifiedAlpha(1.0), 2048).unwrap();
        assert!(r >= 1e-2, "printed-form residual {r}");
    }

    #[test]
    fn hamiltonian_values() {
        let p = ModelParams::gardner(1.0, 1.0, 0.0).unwrap();
        let zero = OdeState::new(0.0, 0.0, 0.0, 0.0);
        assert_eq!(hamiltonian(&p, 1.0, &zero).unwrap(), 0.0);
        let kin = OdeState::new(0.0, 1.0, 0.0, 0.0);
        assert_abs_diff_eq!(hamiltonian(&p, 1.0, &kin).unwrap(), 0.5, epsilon = 1e-15);
        // N(u) = u³/6 for n = u²/2: E(1,0,0,0) = -1/2 + 1/6 = -1/3
        let pot = OdeState::new(1.0, 0.0, 0.0, 0.0);
        assert_abs_diff_eq!(hamiltonian(&p, 1.0, &pot).unwrap(), -1.0 / 3.0, epsilon = 1e-15);
        // rejected for beta = 0
        let p0 = ModelParams::gardner(0.0, 1.0, 0.0).unwrap();
        assert!(hamiltonian(&p0, 1.0, &zero).is_err());
    }

    #[test]
    fn hamiltonian_rate_cancels_at_random_states() {
        let p = ModelParams::gardner(1.0, 1.0, 0.0).unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        let mut worst = 0.0f64;
        for _ in 0..1_000_000 {
            let s = OdeState::new(
                rng.random_range(-2.0..2.0),
                rng.random_range(-2.0..2.0),
                rng.random_range(-2.0..2.0),
                rng.random_range(-2.0..2.0),
            );
            let rate = hamiltonian_rate(&p, 1.0, &s).unwrap();
            let scale = (s.phi.abs() + s.v.abs() + 1.0).powi(2);
            worst = worst.max(rate.abs() / scale);
        }
        assert!(worst <= 1e-10, "worst relative rate {worst}");
    }

    #[test]
    fn ode_flow_equilibrium_and_energy_drift() {
        let p = ModelParams::gardner(1.0, 1.0, 0.0).unwrap();
        let zero = OdeState::new(0.0, 0.0, 0.0, 0.0);
        let traj = ode_flow(&p, 1.0, zero, (0.0, 5.0), 1e-2).unwrap();
        assert!(!traj.blew_up);
        assert!(traj.states.iter().all(|s| s.phi == 0.0 && s.v == 0.0));

        let s0 = OdeState::new(1e-4, -5e-5, 2e-5, 8e-5);
        let traj = ode_flow(&p, 1.0, s0, (0.0, 10.0), 1e-3).unwrap();
        assert!(!traj.blew_up);
        let drift = hamiltonian_drift(&p, 1.0, &traj).unwrap();
        assert!(drift <= 1e-8, "drift {drift}");
    }

    #[test]
    fn energy_drift_scales_as_step_to_the_fourth() {
        let p = ModelParams::gardner(1.0, 1.0, 0.0).unwrap();
        let s0 = OdeState::new(3e-4, -1e-4, 2e-4, 1e-4);
        let coarse =
            hamiltonian_drift(&p, 1.0, &ode_flow(&p, 1.0, s0, (0.0, 10.0), 2e-3).unwrap()).unwrap();
        let fine =
            hamiltonian_drift(&p, 1.0, &ode_flow(&p, 1.0, s0, (0.0, 10.0), 1e-3).unwrap()).unwrap();
        let ratio = coarse / fine;
        assert!(ratio > 8.0 && ratio < 32.0, "expected ≈16, got {ratio}");
    }
}
