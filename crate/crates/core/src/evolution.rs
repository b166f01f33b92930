//! Pseudospectral time integration of the evolution equation on zero-mean
//! periodic data: û_t(k) = -iω(k)û(k) - ik (n(u))^(k) with ω(k) = γ/k - βk³.
//!
//! The linear phase is applied exactly (integrating factor), the nonlinear
//! flux by RK4 stages with exact cubic dealiasing. The k = 0 mode is pinned
//! to zero each step; ∂_x⁻¹ only exists on zero-mean data and the pin is the
//! discrete form of that constraint.

use num_complex::Complex64;

use crate::error::{CoreError, Result};
use crate::fourier::{dealiased_map, derivative, WaveProfile};
use crate::model::{dispersion, ModelParams};

/// Time-stepping configuration.
#[derive(Debug, Clone)]
pub struct EvolutionConfig {
    pub dt: f64,
    pub t_final: f64,
    /// a snapshot is recorded every this many steps (the final state is
    /// always recorded)
    pub record_every: usize,
    /// drop the nonlinear flux entirely: pure phase rotation
    pub linear_only: bool,
    /// stop and flag when sup|u_x| grows by this factor over its initial value
    pub breaking_factor: f64,
}

impl Default for EvolutionConfig {
    fn default() -> Self {
        Self {
            dt: 1e-3,
            t_final: 1.0,
            record_every: 100,
            linear_only: false,
            breaking_factor: 1e4,
        }
    }
}

/// Gradient blow-up information for a truncated run.
#[derive(Debug, Clone, Copy)]
pub struct Breaking {
    pub t: f64,
    /// last finite sup|u_x|
    pub gradient_sup: f64,
}

/// Recorded trajectory.
#[derive(Debug, Clone)]
pub struct Evolution {
    pub times: Vec<f64>,
    pub snapshots: Vec<WaveProfile>,
    pub breaking: Option<Breaking>,
}

impl Evolution {
    pub fn final_state(&self) -> &WaveProfile {
        self.snapshots.last().expect("at least the initial state")
    }
}

struct Stepper<'a> {
    params: &'a ModelParams,
    grid: crate::fourier::TorusGrid,
    /// e^{-iω(k) dt/2} per bin; identity at k = 0
    half_phase: Vec<Complex64>,
    linear_only: bool,
}

impl<'a> Stepper<'a> {
    fn new(params: &'a ModelParams, grid: crate::fourier::TorusGrid, dt: f64, linear_only: bool) -> Self {
        let n = grid.len();
        let mut half_phase = vec![Complex64::new(1.0, 0.0); n];
        for (b, ph) in half_phase.iter_mut().enumerate() {
            let k = grid.wavenumber_of_bin(b);
            if k != 0 && b != n / 2 {
                let omega = dispersion(params, k).expect("k != 0").omega;
                *ph = Complex64::from_polar(1.0, -omega * dt / 2.0);
            }
        }
        Self {
            params,
            grid,
            half_phase,
            linear_only,
        }
    }

    /// Nonlinear flux N(û) = -ik (n(u))^(k), dealiased, with k = 0 and the
    /// Nyquist mode pinned (the advection symbol is odd, so the Nyquist
    /// cosine has no representable image).
    fn flux(&self, spec: &[Complex64]) -> Result<Vec<Complex64>> {
        let n = self.grid.len();
        if self.linear_only {
            return Ok(vec![Complex64::ZERO; n]);
        }
        let u = WaveProfile::from_spectrum(self.grid, spec.to_vec())?;
        let nu = dealiased_map(&u, |v| self.params.nonlin(v, 0));
        let mut out = vec![Complex64::ZERO; n];
        for (b, slot) in out.iter_mut().enumerate() {
            let k = self.grid.wavenumber_of_bin(b);
            if k == 0 || b == n / 2 {
                continue;
            }
            *slot = Complex64::new(0.0, -(k as f64)) * nu.spectrum()[b];
        }
        Ok(out)
    }

    /// One integrating-factor RK4 step of size dt.
    fn step(&self, spec: &mut Vec<Complex64>, dt: f64) -> Result<()> {
        let n = self.grid.len();
        let e = &self.half_phase;
        let a = self.flux(spec)?;
        let mut stage = vec![Complex64::ZERO; n];
        for b in 0..n {
            stage[b] = e[b] * (spec[b] + 0.5 * dt * a[b]);
        }
        let bf = self.flux(&stage)?;
        for b in 0..n {
            stage[b] = e[b] * spec[b] + 0.5 * dt * bf[b];
        }
        let cf = self.flux(&stage)?;
        for b in 0..n {
            stage[b] = e[b] * (e[b] * spec[b] + dt * cf[b]);
        }
        let df = self.flux(&stage)?;
        for b in 0..n {
            let e2 = e[b] * e[b];
            spec[b] = e2 * spec[b]
                + dt / 6.0 * (e2 * a[b] + 2.0 * e[b] * (bf[b] + cf[b]) + df[b]);
        }
        // exact zero-mean conservation; the Nyquist pair is unrepresentable
        // under the odd symbols and stays pinned as well
        spec[0] = Complex64::ZERO;
        spec[n / 2] = Complex64::ZERO;
        Ok(())
    }
}

/// Advective CFL ceiling 0.5·(2π/n)/max|n'(u0)|; infinite for trivial data.
pub fn cfl_ceiling(params: &ModelParams, u0: &WaveProfile) -> f64 {
    let max_speed = u0
        .samples()
        .iter()
        .map(|&v| params.nonlin(v, 1).abs())
        .fold(0.0f64, f64::max);
    if max_speed == 0.0 {
        f64::INFINITY
    } else {
        0.5 * u0.grid().spacing() / max_speed
    }
}

/// Integrate the evolution equation from `u0`. The trajectory is sampled
/// every `record_every` steps; on gradient blow-up the recorded part is
/// returned with a breaking flag.
pub fn evolve(params: &ModelParams, u0: &WaveProfile, config: &EvolutionConfig) -> Result<Evolution> {
    if !(config.dt > 0.0 && config.t_final > 0.0) {
        return Err(CoreError::InvalidParameter(
            "dt and t_final must be positive".into(),
        ));
    }
    if config.record_every == 0 {
        return Err(CoreError::InvalidParameter(
            "record_every must be positive".into(),
        ));
    }
    let tol = 1e-12 * u0.sup_norm().max(1.0);
    if u0.mean().abs() > tol {
        return Err(CoreError::NonzeroMean {
            mean: u0.mean(),
            tol,
        });
    }
    let ceiling = cfl_ceiling(params, u0);
    if config.dt > ceiling {
        return Err(CoreError::TimeStepTooLarge {
            dt: config.dt,
            ceiling,
        });
    }

    let grid = u0.grid();
    let n_steps = (config.t_final / config.dt).ceil() as usize;
    let stepper = Stepper::new(params, grid, config.dt, config.linear_only);
    // a distinct phase table for the possibly-shorter final step
    let last_dt = config.t_final - config.dt * (n_steps - 1) as f64;
    let last_stepper = Stepper::new(params, grid, last_dt, config.linear_only);

    let mut spec = u0.spectrum().to_vec();
    spec[0] = Complex64::ZERO;
    let grad0 = derivative(u0, 1).sup_norm();
    let mut times = vec![0.0];
    let mut snapshots = vec![u0.clone()];

    for step_idx in 1..=n_steps {
        let (s, dt) = if step_idx == n_steps {
            (&last_stepper, last_dt)
        } else {
            (&stepper, config.dt)
        };
        let t = if step_idx == n_steps {
            config.t_final
        } else {
            step_idx as f64 * config.dt
        };
        s.step(&mut spec, dt)?;

        let state = WaveProfile::from_spectrum(grid, spec.clone())?;
        let finite = state.is_finite();
        let grad = if finite {
            derivative(&state, 1).sup_norm()
        } else {
            f64::INFINITY
        };
        if !finite || (grad0 > 0.0 && grad > config.breaking_factor * grad0) {
            let last_grad = snapshots
                .last()
                .map(|p| derivative(p, 1).sup_norm())
                .unwrap_or(grad0);
            return Ok(Evolution {
                times,
                snapshots,
                breaking: Some(Breaking {
                    t,
                    gradient_sup: if finite { grad } else { last_grad },
                }),
            });
        }
        if step_idx % config.record_every == 0 || step_idx == n_steps {
            times.push(t);
            snapshots.push(state);
        }
    }
    Ok(Evolution {
        times,
        snapshots,
        breaking: None,
    })
}

/// Relative traveling-wave error ‖u(T,·) - φ(· - cT)‖∞ / ‖φ‖∞ for a steady
/// profile φ of speed c evolved to T under the full equation.
pub fn traveling_error(
    params: &ModelParams,
    c: f64,
    profile: &WaveProfile,
    t_final: f64,
    config: &EvolutionConfig,
) -> Result<f64> {
    let norm = profile.sup_norm();
    if norm == 0.0 {
        return Err(CoreError::TrivialProfile);
    }
    if t_final == 0.0 {
        return Ok(0.0);
    }
    let cfg = EvolutionConfig {
        t_final,
        ..config.clone()
    };
    let evo = evolve(params, profile, &cfg)?;
    let shifted = profile.shift(c * t_final);
    let final_state = evo.final_state();
    let err = final_state
        .samples()
        .iter()
        .zip(shifted.samples())
        .fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
    Ok(err / norm)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fourier::TorusGrid;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::PI;

    fn grid(n: usize) -> TorusGrid {
        TorusGrid::new(n).unwrap()
    }

    #[test]
    fn zero_stays_zero() {
        let g = grid(64);
        let p = ModelParams::gardner(0.25, 1.0, 0.0).unwrap();
        let evo = evolve(&p, &WaveProfile::zero(g), &EvolutionConfig::default()).unwrap();
        assert!(evo.breaking.is_none());
        for s in &evo.snapshots {
            assert_eq!(s.sup_norm(), 0.0);
        }
    }

    #[test]
    fn linear_phase_advance_matches_dispersion() {
        let g = grid(128);
        let p = ModelParams::gardner(0.25, 1.0, 0.0).unwrap();
        let delta = 1e-6;
        for k in [1i64, 2, 3, 5] {
            let u0 = WaveProfile::from_fn(g, |x| delta * (k as f64 * x).cos());
            let t_final = 0.5;
            let cfg = EvolutionConfig {
                dt: 1e-3,
                t_final,
                record_every: 1000,
                ..Default::default()
            };
            let evo = evolve(&p, &u0, &cfg).unwrap();
            let before = u0.coeff(k);
            let after = evo.final_state().coeff(k);
            let omega = dispersion(&p, k).unwrap().omega;
            // measured phase advance against ω(k)T, mod 2π
            let measured = (after / before).arg();
            let expected = -omega * t_final;
            let mut diff = measured - expected;
            while diff > PI {
                diff -= 2.0 * PI;
            }
            while diff < -PI {
                diff += 2.0 * PI;
            }
            assert!(diff.abs() <= 1e-8, "k={k}: phase error {diff:.3e}");
            // phase velocity to 1e-8
            let cp = dispersion(&p, k).unwrap().phase;
            let measured_cp = -measured / (k as f64 * t_final);
            // unwrap against the expected value
            let wraps = ((cp - measured_cp) * (k as f64 * t_final) / (2.0 * PI)).round();
            let measured_cp = measured_cp + wraps * 2.0 * PI / (k as f64 * t_final);
            assert!((measured_cp - cp).abs() <= 1e-8, "k={k}: c_p error");
        }
    }

    #[test]
    fn linear_energy_is_conserved() {
        let g = grid(128);
        let p = ModelParams::gardner(0.5, 1.0, 0.0).unwrap();
        let u0 = WaveProfile::from_fn(g, |x| 0.3 * x.cos() - 0.2 * (4.0 * x).sin());
        let cfg = EvolutionConfig {
            dt: 1e-3,
            t_final: 1.0,
            record_every: 100,
            linear_only: true,
            ..Default::default()
        };
        let evo = evolve(&p, &u0, &cfg).unwrap();
        let energy = |w: &WaveProfile| -> f64 {
            (1..w.grid().len() / 2)
                .map(|k| w.coeff(k as i64).norm_sqr())
                .sum()
        };
        let e0 = energy(&u0);
        for s in &evo.snapshots {
            assert_abs_diff_eq!(energy(s), e0, epsilon = 1e-12 * e0.max(1.0));
        }
    }

    #[test]
    fn zero_mean_is_pinned() {
        let g = grid(128);
        let p = ModelParams::gardner(0.0, 1.0, 0.0).unwrap();
        let u0 = WaveProfile::from_fn(g, |x| 0.2 * x.cos() + 0.1 * (2.0 * x).cos());
        let cfg = EvolutionConfig {
            dt: 5e-4,
            t_final: 0.2,
            record_every: 50,
            ..Default::default()
        };
        let evo = evolve(&p, &u0, &cfg).unwrap();
        for s in &evo.snapshots {
            assert_eq!(s.mean(), 0.0);
        }
    }

    #[test]
    fn traveling_error_zero_at_time_zero() {
        let g = grid(64);
        let p = ModelParams::gardner(0.25, 1.0, 0.0).unwrap();
        let phi = WaveProfile::from_fn(g, |x| 0.1 * x.cos());
        let e = traveling_error(&p, 0.75, &phi, 0.0, &EvolutionConfig::default()).unwrap();
        assert_eq!(e, 0.0);
    }

    #[test]
    fn rejects_cfl_violation_and_nonzero_mean() {
        let g = grid(64);
        let p = ModelParams::gardner(0.0, 1.0, 0.0).unwrap();
        let big = WaveProfile::from_fn(g, |x| 5.0 * x.cos());
        let cfg = EvolutionConfig {
            dt: 0.5,
            ..Default::default()
        };
        assert!(matches!(
            evolve(&p, &big, &cfg),
            Err(CoreError::TimeStepTooLarge { .. })
        ));
        let biased = WaveProfile::from_fn(g, |x| 1.0 + 0.1 * x.cos());
        assert!(matches!(
            evolve(&p, &biased, &EvolutionConfig::default()),
            Err(CoreError::NonzeroMean { .. })
        ));
    }

    #[test]
    fn breaking_flag_on_steep_data() {
        // β = 0 with large data steepens; breaking must flag, not crash
        let g = grid(256);
        let p = ModelParams::gardner(0.0, 1.0, 0.0).unwrap();
        let u0 = WaveProfile::from_fn(g, |x| 2.0 * x.sin());
        let cfg = EvolutionConfig {
            dt: 2e-4,
            t_final: 30.0,
            record_every: 500,
            breaking_factor: 20.0,
            ..Default::default()
        };
        let evo = evolve(&p, &u0, &cfg).unwrap();
        assert!(evo.breaking.is_some(), "expected gradient blow-up flag");
        let b = evo.breaking.unwrap();
        assert!(b.t > 0.0 && b.gradient_sup.is_finite());
    }
}
