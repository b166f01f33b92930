//! Newton solver with amplitude normalization and branch continuation in
//! the wave speed, seeded by the local bifurcation asymptotics at
//! c_k = 1/k² - βk².
//!
//! The unknowns are the cosine coefficients of an even zero-mean profile
//! plus the speed c; the amplitude constraint pins the cos(k₀x) projection
//! of φ at ε, closing the bordered system. Continuation steps ε with warm
//! starts from linear extrapolation and halves the step on Newton failure.

use nalgebra::{DMatrix, DVector};

use crate::analysis::{amplitude_check, diagnose, slack, DiagnosticsReport};
use crate::error::{CoreError, Result};
use crate::fourier::{resample, TorusGrid, WaveProfile};
use crate::model::{
    bifurcation_speed, full_basis_coords, full_basis_dim, full_basis_profile, jacobian_matrix,
    residual, residual_dc, ModelParams,
};

/// How a continuation run ended.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BranchTermination {
    /// reached the requested amplitude
    AmplitudeTarget,
    /// step-size floor reached without convergence
    NewtonFailure,
    /// slack fell below the floor (β = 0 approach to the highest wave)
    SlackExhausted,
    /// step budget exhausted
    MaxSteps,
}

/// Whether a point still obeys the small-amplitude asymptotics
/// |c - c_{k₀}| < 10 ε².
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PointRegime {
    Asymptotic,
    Continued,
}

/// One converged solution on a bifurcation branch.
#[derive(Debug, Clone)]
pub struct BranchPoint {
    pub c: f64,
    /// amplitude parameter: the cos(k₀x) projection (1/π)∫φ cos(k₀x) dx
    pub eps: f64,
    pub profile: WaveProfile,
    pub residual_norm: f64,
    pub newton_iters: usize,
    pub regime: PointRegime,
    pub diagnostics: Option<DiagnosticsReport>,
}

/// A continuation branch emanating from (c_{k₀}, 0).
#[derive(Debug, Clone)]
pub struct Branch {
    pub k0: usize,
    pub params: ModelParams,
    pub points: Vec<BranchPoint>,
    pub termination: BranchTermination,
}

/// Solver and continuation settings. `Default` gives the values used by the
/// shipped experiments.
#[derive(Debug, Clone)]
pub struct SolverSettings {
    /// starting resolution
    pub n: usize,
    /// resolution cap for the spectral-tail refinement rule
    pub n_max: usize,
    /// sup-norm residual tolerance in the smooth regime
    pub tol: f64,
    /// tolerance once slack < `relax_slack`; profiles lose smoothness there
    pub relaxed_tol: f64,
    pub relax_slack: f64,
    pub max_iters: usize,
    /// continuation stops when eps exceeds this
    pub eps_max: f64,
    pub max_steps: usize,
    /// β = 0 branches stop when slack falls below this
    pub slack_floor: f64,
    /// minimal step as a fraction of the requested eps_step
    pub step_floor_frac: f64,
    /// relative size of the last retained coefficient that triggers doubling
    pub tail_threshold: f64,
}

impl Default for SolverSettings {
    fn default() -> Self {
        Self {
            n: 512,
            n_max: 1024,
            tol: 1e-10,
            relaxed_tol: 1e-6,
            relax_slack: 0.05,
            max_iters: 30,
            eps_max: 0.9,
            max_steps: 10_000,
            slack_floor: 1e-2,
            step_floor_frac: 1.0 / 64.0,
            tail_threshold: 1e-10,
        }
    }
}

impl SolverSettings {
    fn tol_for_slack(&self, slack: f64) -> f64 {
        if slack < self.relax_slack {
            self.relaxed_tol
        } else {
            self.tol
        }
    }
}

/// Leading-order branch point: c = c_{k₀}, φ = ε cos(k₀x).
pub fn initial_guess(
    params: &ModelParams,
    k0: usize,
    eps: f64,
    grid: TorusGrid,
) -> Result<(f64, WaveProfile)> {
    let c = bifurcation_speed(params, k0).ok_or(CoreError::NoBifurcationSpeed {
        k: k0,
        beta: params.beta(),
    })?;
    let profile = WaveProfile::from_fn(grid, |x| eps * (k0 as f64 * x).cos());
    Ok((c, profile))
}

fn classify(params: &ModelParams, k0: usize, c: f64, eps: f64) -> PointRegime {
    match bifurcation_speed(params, k0) {
        Some(ck) if (c - ck).abs() < 10.0 * eps * eps => PointRegime::Asymptotic,
        _ => PointRegime::Continued,
    }
}

/// Solve the augmented system {zero-mean even residual = 0, ⟨φ, cos(k₀·)⟩/π = ε}
/// for (φ, c) by Newton iteration with a dense bordered Jacobian, starting
/// from (c0, profile0). Converged when ‖residual‖∞ ≤ tol.
pub fn newton_solve(
    params: &ModelParams,
    k0: usize,
    c0: f64,
    profile0: &WaveProfile,
    eps: f64,
    tol: f64,
    max_iters: usize,
) -> Result<BranchPoint> {
    if eps == 0.0 {
        return Err(CoreError::ZeroAmplitude);
    }
    let grid = profile0.grid();
    let m = grid.len() / 2;
    let mut a = DVector::from_vec(profile0.cosine_coeffs());
    let mut c = c0;
    a[k0 - 1] = eps;

    let mut profile = WaveProfile::from_cosine_coeffs(grid, a.as_slice())?;
    let mut res = residual(params, c, &profile)?;
    let mut res_norm = res.sup_norm();
    let mut iters = 0;

    while res_norm > tol {
        if iters >= max_iters {
            return Err(CoreError::NewtonDiverged {
                iters,
                residual: res_norm,
                tol,
            });
        }
        let jac = jacobian_matrix(params, c, &profile, true)?;
        let dc = residual_dc(params, c, &profile)?;

        // bordered system: [J, dR/dc; e_{k0}^T, 0] [δa; δc] = -[R; a_{k0} - ε]
        let mut big = DMatrix::<f64>::zeros(m + 1, m + 1);
        big.view_mut((0, 0), (m, m)).copy_from(&jac);
        for i in 0..m {
            big[(i, m)] = dc.cosine_coeff(i + 1);
        }
        big[(m, k0 - 1)] = 1.0;

        let mut rhs = DVector::<f64>::zeros(m + 1);
        for i in 0..m {
            rhs[i] = -res.cosine_coeff(i + 1);
        }
        rhs[m] = -(a[k0 - 1] - eps);

        let lu = big.lu();
        let delta = lu.solve(&rhs).ok_or(CoreError::SingularJacobian)?;
        for i in 0..m {
            a[i] += delta[i];
        }
        c += delta[m];
        iters += 1;

        if !(c.is_finite() && a.iter().all(|v| v.is_finite())) {
            return Err(CoreError::CorruptIterate);
        }
        profile = WaveProfile::from_cosine_coeffs(grid, a.as_slice())?;
        if !profile.is_finite() {
            return Err(CoreError::CorruptIterate);
        }
        res = residual(params, c, &profile)?;
        res_norm = res.sup_norm();
    }
    if !(c > 0.0) {
        return Err(CoreError::NonpositiveSpeed(c));
    }
    Ok(BranchPoint {
        c,
        eps,
        profile,
        residual_norm: res_norm,
        newton_iters: iters,
        regime: classify(params, k0, c, eps),
        diagnostics: None,
    })
}

/// Continue the branch bifurcating at k₀ from eps_start in steps of
/// eps_step. Steps halve adaptively on Newton failure down to a floor; each
/// solve is warm-started from a linear extrapolation of the previous two
/// points. For β = 0 the run ends when the slack reaches the floor.
pub fn continue_branch(
    params: &ModelParams,
    k0: usize,
    eps_start: f64,
    eps_step: f64,
    settings: &SolverSettings,
) -> Result<Branch> {
    if !(eps_start > 0.0 && eps_step > 0.0) {
        return Err(CoreError::InvalidParameter(
            "eps_start and eps_step must be positive".into(),
        ));
    }
    let mut grid = TorusGrid::new(settings.n)?;
    let (c0, guess) = initial_guess(params, k0, eps_start, grid)?;

    let first = match newton_solve(params, k0, c0, &guess, eps_start, settings.tol, settings.max_iters)
    {
        // exactly at a second singular speed c_j the bordered matrix can be
        // singular; nudge c before giving up
        Err(CoreError::SingularJacobian) => newton_solve(
            params,
            k0,
            c0 + 1e-8,
            &guess,
            eps_start,
            settings.tol,
            settings.max_iters,
        ),
        other => other,
    }
    .map_err(|e| CoreError::ContinuationFailed {
        eps: eps_start,
        source: Box::new(e),
    })?;

    let mut points = vec![first];
    let mut termination = BranchTermination::MaxSteps;
    let step_floor = eps_step * settings.step_floor_frac;
    let mut step = eps_step;

    for _ in 0..settings.max_steps {
        let last = points.last().expect("at least one point");
        let cur_slack = slack(params, last.c, &last.profile);
        if params.beta() == 0.0 && cur_slack <= settings.slack_floor {
            termination = BranchTermination::SlackExhausted;
            break;
        }
        if last.eps >= settings.eps_max {
            termination = BranchTermination::AmplitudeTarget;
            break;
        }

        // refine the grid when the spectral tail is no longer negligible
        if grid.len() < settings.n_max {
            let tail = relative_tail(&last.profile);
            if tail > settings.tail_threshold {
                grid = TorusGrid::new((grid.len() * 2).min(settings.n_max))?;
                let refined = resample(&last.profile, grid.len())?;
                let tol = settings.tol_for_slack(cur_slack);
                let re = newton_solve(params, k0, last.c, &refined, last.eps, tol, settings.max_iters)
                    .map_err(|e| CoreError::ContinuationFailed {
                        eps: last.eps,
                        source: Box::new(e),
                    })?;
                *points.last_mut().expect("nonempty") = re;
                continue;
            }
        }

        // slack-aware step control near the highest wave: don't overshoot
        let mut this_step = step.min(settings.eps_max - last.eps + step_floor);
        let slack_guard = (4.0 * settings.slack_floor).max(0.02);
        if params.beta() == 0.0 && points.len() >= 2 && cur_slack < slack_guard {
            let prev = &points[points.len() - 2];
            let prev_slack = slack(params, prev.c, &prev.profile);
            let dslack = (prev_slack - cur_slack) / (last.eps - prev.eps).max(1e-300);
            if dslack > 0.0 {
                // aim halfway into the remaining slack above the floor
                let target = (cur_slack - 0.8 * settings.slack_floor) / (2.0 * dslack);
                this_step = this_step.min(target.max(step_floor));
            }
        }

        let mut amplitude_rejected = false;
        let solved = loop {
            let (cw, warm) = warm_start(&points, this_step, grid)?;
            let eps_next = last.eps + this_step;
            let tol = settings.tol_for_slack(cur_slack);
            let attempt = newton_solve(params, k0, cw, &warm, eps_next, tol, settings.max_iters)
                .map(|pt| {
                    // a β = 0 iterate that crosses a singular level is past
                    // the branch end; refuse it and shorten the step
                    let admissible = params.beta() != 0.0
                        || amplitude_check(params, pt.c, &pt.profile)
                            .map(|chk| chk.ok)
                            .unwrap_or(false);
                    (pt, admissible)
                });
            match attempt {
                Ok((pt, true)) => break Some(pt),
                Ok((_, false)) if this_step > step_floor => {
                    amplitude_rejected = true;
                    this_step = (this_step / 2.0).max(step_floor);
                }
                Ok((_, false)) => {
                    // the branch end lies within one step-floor of here
                    termination = BranchTermination::SlackExhausted;
                    break None;
                }
                Err(_) if this_step > step_floor => {
                    this_step = (this_step / 2.0).max(step_floor);
                }
                Err(_) => {
                    termination = if params.beta() == 0.0
                        && (amplitude_rejected || cur_slack <= 2.0 * settings.slack_floor)
                    {
                        BranchTermination::SlackExhausted
                    } else {
                        BranchTermination::NewtonFailure
                    };
                    break None;
                }
            }
        };
        match solved {
            Some(pt) => {
                points.push(pt);
                // recover the step toward the requested size
                step = (this_step * 2.0).min(eps_step);
            }
            None => break,
        }
    }

    Ok(Branch {
        k0,
        params: params.clone(),
        points,
        termination,
    })
}

/// Relative magnitude of the highest retained cosine coefficients. Uses the
/// last two so that odd-harmonic profiles (whose even modes vanish) still
/// register their tail.
fn relative_tail(profile: &WaveProfile) -> f64 {
    let amps = profile.cosine_coeffs();
    let max = amps.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    if max == 0.0 {
        return 0.0;
    }
    amps[amps.len().saturating_sub(2)..]
        .iter()
        .fold(0.0f64, |m, v| m.max(v.abs()))
        / max
}

/// Linear extrapolation of (a, c) from the last two points, resampled onto
/// the current grid.
fn warm_start(points: &[BranchPoint], step: f64, grid: TorusGrid) -> Result<(f64, WaveProfile)> {
    let last = points.last().expect("at least one point");
    let last_profile = if last.profile.grid() == grid {
        last.profile.clone()
    } else {
        resample(&last.profile, grid.len())?
    };
    if points.len() < 2 {
        return Ok((last.c, last_profile));
    }
    let prev = &points[points.len() - 2];
    let de = last.eps - prev.eps;
    if de <= 0.0 {
        return Ok((last.c, last_profile));
    }
    let t = step / de;
    let prev_profile = if prev.profile.grid() == grid {
        prev.profile.clone()
    } else {
        resample(&prev.profile, grid.len())?
    };
    let diff = last_profile.add_scaled(&prev_profile, -1.0)?;
    let warm = last_profile.add_scaled(&diff, t)?;
    let cw = last.c + t * (last.c - prev.c);
    Ok((cw, warm))
}

/// Attach analysis diagnostics to every stored point.
pub fn attach_diagnostics(branch: &mut Branch) -> Result<()> {
    for pt in &mut branch.points {
        pt.diagnostics = Some(diagnose(&branch.params, pt.c, &pt.profile)?);
    }
    Ok(())
}

/// Re-evaluate a point's residual on a grid twice as fine (grid-independence
/// check).
pub fn residual_at_doubled_resolution(params: &ModelParams, point: &BranchPoint) -> Result<f64> {
    let fine = resample(&point.profile, point.profile.grid().len() * 2)?;
    Ok(residual(params, point.c, &fine)?.sup_norm())
}

/// Newton solve in the full trigonometric basis with the sin(k₀x)
/// coefficient pinned to 0 (fixing translation). Used for symmetry
/// experiments with asymmetric initial guesses; the even-subspace
/// [`newton_solve`] is the production path.
pub fn newton_solve_full(
    params: &ModelParams,
    k0: usize,
    c0: f64,
    profile0: &WaveProfile,
    eps: f64,
    tol: f64,
    max_iters: usize,
) -> Result<BranchPoint> {
    if eps == 0.0 {
        return Err(CoreError::ZeroAmplitude);
    }
    let grid = profile0.grid();
    let n = grid.len();
    let m = n / 2;
    let dim = full_basis_dim(n);
    let sin_k0 = m + k0 - 1; // index of the pinned sin(k₀x) coordinate
    let mut z = DVector::from_vec(full_basis_coords(profile0));
    z[k0 - 1] = eps;
    z[sin_k0] = 0.0;
    let mut c = c0;

    // free coordinates: all but the pinned sine mode
    let free: Vec<usize> = (0..dim).filter(|&j| j != sin_k0).collect();
    let nf = free.len();

    let rebuild = |z: &DVector<f64>| -> Result<WaveProfile> {
        let mut acc = WaveProfile::zero(grid);
        for (j, &v) in z.iter().enumerate() {
            if v != 0.0 {
                acc = acc.add_scaled(&full_basis_profile(grid, j)?, v)?;
            }
        }
        Ok(acc)
    };

    let mut profile = rebuild(&z)?;
    let mut res = residual(params, c, &profile)?;
    let mut res_norm = res.sup_norm();
    let mut iters = 0;

    while res_norm > tol {
        if iters >= max_iters {
            return Err(CoreError::NewtonDiverged {
                iters,
                residual: res_norm,
                tol,
            });
        }
        let jac = jacobian_matrix(params, c, &profile, false)?;
        let dc = residual_dc(params, c, &profile)?;
        let dc_coords = full_basis_coords(&dc);
        let res_coords = full_basis_coords(&res);

        let mut big = DMatrix::<f64>::zeros(nf + 1, nf + 1);
        for (ri, &i) in free.iter().enumerate() {
            for (cj, &j) in free.iter().enumerate() {
                big[(ri, cj)] = jac[(i, j)];
            }
            big[(ri, nf)] = dc_coords[i];
        }
        // amplitude constraint on the cos(k₀x) coordinate
        let k0_free = free.iter().position(|&j| j == k0 - 1).expect("cos mode is free");
        big[(nf, k0_free)] = 1.0;

        let mut rhs = DVector::<f64>::zeros(nf + 1);
        for (ri, &i) in free.iter().enumerate() {
            rhs[ri] = -res_coords[i];
        }
        rhs[nf] = -(z[k0 - 1] - eps);

        let delta = big.lu().solve(&rhs).ok_or(CoreError::SingularJacobian)?;
        for (ri, &i) in free.iter().enumerate() {
            z[i] += delta[ri];
        }
        c += delta[nf];
        iters += 1;

        if !(c.is_finite() && z.iter().all(|v| v.is_finite())) {
            return Err(CoreError::CorruptIterate);
        }
        profile = rebuild(&z)?;
        res = residual(params, c, &profile)?;
        res_norm = res.sup_norm();
    }
    if !(c > 0.0) {
        return Err(CoreError::NonpositiveSpeed(c));
    }
    Ok(BranchPoint {
        c,
        eps,
        profile,
        residual_norm: res_norm,
        newton_iters: iters,
        regime: classify(params, k0, c, eps),
        diagnostics: None,
    })
}
