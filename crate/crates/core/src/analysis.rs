//! Numerical verification of regularity, amplitude and symmetry properties
//! of computed or exact wave profiles: singular levels of F' and their
//! order, the predicted peak/cusp Hölder law, log-log Hölder fits, Fourier
//! decay slopes, reflection asymmetry and crest counting.

use nalgebra::DMatrix;

use crate::error::{CoreError, Result};
use crate::fourier::{derivative, WaveProfile};
use crate::model::ModelParams;

/// Slack threshold separating the smooth regime from the near-singular one.
pub const SMOOTH_SLACK_THRESHOLD: f64 = 1e-2;

/// Margin allowed by [`amplitude_check`] on each bound.
pub const AMPLITUDE_MARGIN: f64 = 1e-6;

/// Roots of F'(φ) = -c + n'(φ) closest to the origin on each side, together
/// with the order a = min{m ≥ 2 : F^{(m)} ≠ 0} at each root.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SingularLevels {
    pub phi_minus: Option<f64>,
    pub phi_plus: Option<f64>,
    pub order_minus: Option<u32>,
    pub order_plus: Option<u32>,
}

impl SingularLevels {
    pub fn none() -> Self {
        Self {
            phi_minus: None,
            phi_plus: None,
            order_minus: None,
            order_plus: None,
        }
    }
}

/// Singular levels of F' for the given speed. Uses the closed-form quadratic
/// solution for the Gardner cubic nonlinearity and companion-matrix root
/// extraction for higher-degree polynomials. Reports none on both sides when
/// F' has no real critical points.
pub fn singular_levels(params: &ModelParams, c: f64) -> Result<SingularLevels> {
    if !(c > 0.0) {
        return Err(CoreError::NonpositiveSpeed(c));
    }
    let roots = if let Some((sigma, alpha)) = params.gardner_coeffs() {
        gardner_critical_points(sigma, alpha, c)
    } else {
        polynomial_critical_points(params, c)
    };
    let mut out = SingularLevels::none();
    for r in roots {
        if r > 0.0 && out.phi_plus.is_none_or(|p| r < p) {
            out.phi_plus = Some(r);
        }
        if r < 0.0 && out.phi_minus.is_none_or(|m| r > m) {
            out.phi_minus = Some(r);
        }
    }
    if let Some(p) = out.phi_plus {
        out.order_plus = Some(vanishing_order(params, c, p)?);
    }
    if let Some(m) = out.phi_minus {
        out.order_minus = Some(vanishing_order(params, c, m)?);
    }
    Ok(out)
}

/// Real roots of -c + σu + αu² = 0, with a degenerate-discriminant double
/// root collapsed to -σ/(2α).
fn gardner_critical_points(sigma: f64, alpha: f64, c: f64) -> Vec<f64> {
    if alpha == 0.0 {
        if sigma == 0.0 {
            return Vec::new();
        }
        return vec![c / sigma];
    }
    let disc = sigma * sigma + 4.0 * alpha * c;
    let scale = sigma * sigma + 4.0 * alpha.abs() * c;
    if disc < -1e-12 * scale {
        return Vec::new();
    }
    if disc.abs() <= 1e-12 * scale {
        return vec![-sigma / (2.0 * alpha)];
    }
    let sq = disc.sqrt();
    vec![(-sigma + sq) / (2.0 * alpha), (-sigma - sq) / (2.0 * alpha)]
}

/// Real eigenvalues of the companion matrix of F'(u) = -c + n'(u).
fn polynomial_critical_points(params: &ModelParams, c: f64) -> Vec<f64> {
    // F'(u) = Σ_{j=0}^{p} b_j u^j with b_0 = -c, b_j = (j+1) a_{j+1}
    let d = params.degree();
    let mut b = vec![0.0; d];
    b[0] = -c;
    for j in 1..d {
        b[j] = (j + 1) as f64 * params.nonlin_coeffs()[j - 1];
    }
    while b.len() > 1 && b.last().map(|v| v.abs() < 1e-300) == Some(true) {
        b.pop();
    }
    let p = b.len() - 1;
    if p == 0 {
        return Vec::new();
    }
    let lead = b[p];
    let mut mat = DMatrix::<f64>::zeros(p, p);
    for i in 1..p {
        mat[(i, i - 1)] = 1.0;
    }
    for i in 0..p {
        mat[(i, p - 1)] = -b[i] / lead;
    }
    let eigs = mat.complex_eigenvalues();
    eigs.iter()
        .filter(|e| e.im.abs() <= 1e-8 * (1.0 + e.re.abs()))
        .map(|e| e.re)
        .collect()
}

/// Smallest m ≥ 2 with F^{(m)}(u) ≠ 0, with a relative tolerance so a
/// near-degenerate double root of F' is classified as order 3.
fn vanishing_order(params: &ModelParams, c: f64, u: f64) -> Result<u32> {
    let d = params.degree() as u32;
    let scale = (2..=d)
        .map(|m| params.f_eval(c, u, m).abs())
        .fold(0.0f64, f64::max);
    if scale == 0.0 {
        return Err(CoreError::InvalidNonlinearity(
            "all derivatives of F vanish at the critical level".into(),
        ));
    }
    for m in 2..=d {
        if params.f_eval(c, u, m).abs() > 1e-7 * scale {
            return Ok(m);
        }
    }
    Err(CoreError::InvalidNonlinearity(
        "no nonvanishing derivative of F at the critical level".into(),
    ))
}

/// min over nodes of c - n'(φ(x)) = min of -F'(φ). Positive slack means the
/// profile stays strictly below every singular level.
pub fn slack(params: &ModelParams, c: f64, profile: &WaveProfile) -> f64 {
    profile
        .samples()
        .iter()
        .map(|&u| c - params.nonlin(u, 1))
        .fold(f64::INFINITY, f64::min)
}

/// Node index attaining the slack minimum.
pub fn slack_argmin(params: &ModelParams, c: f64, profile: &WaveProfile) -> usize {
    let mut best = 0;
    let mut val = f64::INFINITY;
    for (j, &u) in profile.samples().iter().enumerate() {
        let s = c - params.nonlin(u, 1);
        if s < val {
            val = s;
            best = j;
        }
    }
    best
}

/// Predicted local behavior |φ(x) - φ̄| ≈ C |x - x̄|^{2/a} at a singular
/// level φ̄, with a = min{m ≥ 2 : F^{(m)}(φ̄) ≠ 0} and
/// C = (a! |φ̄| / (2|F^{(a)}(φ̄)|))^{1/a}.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HolderPrediction {
    pub order: u32,
    pub exponent: f64,
    pub constant: f64,
}

pub fn predicted_holder(params: &ModelParams, c: f64, phi_bar: f64) -> Result<HolderPrediction> {
    let fp = params.f_eval(c, phi_bar, 1);
    if fp.abs() > 1e-8 * c.max(1.0) {
        return Err(CoreError::InvalidParameter(format!(
            "phi_bar = {phi_bar} is not a critical level: F'(phi_bar) = {fp:.3e}"
        )));
    }
    let a = vanishing_order(params, c, phi_bar)?;
    let fa = params.f_eval(c, phi_bar, a).abs();
    let mut fact = 1.0;
    for m in 2..=a {
        fact *= m as f64;
    }
    let constant = (fact * phi_bar.abs() / (2.0 * fa)).powf(1.0 / a as f64);
    Ok(HolderPrediction {
        order: a,
        exponent: 2.0 / a as f64,
        constant,
    })
}

/// Least-squares fit of log|φ(x) - φ(x*)| against log|x - x*| over the nodes
/// with exclude_radius < |x - x*| ≤ window grid spacings on both sides.
/// Returns (exponent, constant) of |φ - φ*| ≈ C |x - x*|^p.
pub fn holder_fit(
    profile: &WaveProfile,
    x_star_index: usize,
    window: usize,
    exclude_radius: usize,
) -> Result<(f64, f64)> {
    let grid = profile.grid();
    let n = grid.len();
    if x_star_index >= n {
        return Err(CoreError::InvalidParameter(format!(
            "node index {x_star_index} out of range for grid of {n}"
        )));
    }
    if window <= exclude_radius {
        return Err(CoreError::InvalidParameter(
            "window must exceed exclude_radius".into(),
        ));
    }
    let h = grid.spacing();
    let center = profile.samples()[x_star_index];
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for d in (exclude_radius + 1)..=window {
        for sgn in [-1i64, 1] {
            let j = (x_star_index as i64 + sgn * d as i64).rem_euclid(n as i64) as usize;
            let dv = (profile.samples()[j] - center).abs();
            if dv == 0.0 {
                return Err(CoreError::InvalidParameter(format!(
                    "profile is exactly flat at distance {d} from the fit center"
                )));
            }
            xs.push((d as f64 * h).ln());
            ys.push(dv.ln());
        }
    }
    if xs.len() < 8 {
        return Err(CoreError::TooFewPoints {
            context: "holder_fit",
            needed: 8,
            found: xs.len(),
        });
    }
    let (slope, intercept) = ols(&xs, &ys);
    Ok((slope, intercept.exp()))
}

fn ols(xs: &[f64], ys: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    for (x, y) in xs.iter().zip(ys) {
        sxx += (x - mx) * (x - mx);
        sxy += (x - mx) * (y - my);
    }
    let slope = sxy / sxx;
    (slope, my - slope * mx)
}

/// Reflection asymmetry: min over λ of ‖φ(2λ-·) - φ‖∞ / ‖φ‖∞, found by a
/// coarse scan over half-node shifts followed by golden-section refinement.
/// Returns (λ*, value); 0 for an even profile up to rounding.
pub fn asymmetry(profile: &WaveProfile) -> Result<(f64, f64)> {
    let norm = profile.sup_norm();
    if norm == 0.0 {
        return Err(CoreError::TrivialProfile);
    }
    let n = profile.grid().len();
    let h = profile.grid().spacing();
    let mismatch = |lambda: f64| -> f64 {
        let refl = profile.reflect(lambda);
        refl.samples()
            .iter()
            .zip(profile.samples())
            .fold(0.0f64, |m, (a, b)| m.max((a - b).abs()))
            / norm
    };
    // reflections about λ and λ+π coincide, so λ ∈ [0, π) suffices
    let mut best_l = 0.0;
    let mut best_v = f64::INFINITY;
    for j in 0..n {
        let lambda = j as f64 * h / 2.0;
        let v = mismatch(lambda);
        if v < best_v {
            best_v = v;
            best_l = lambda;
        }
    }
    // golden-section refinement on [λ - h/2, λ + h/2]
    let gr = (5.0f64.sqrt() - 1.0) / 2.0;
    let mut a = best_l - h / 2.0;
    let mut b = best_l + h / 2.0;
    let mut c = b - gr * (b - a);
    let mut d = a + gr * (b - a);
    let mut fc = mismatch(c);
    let mut fd = mismatch(d);
    for _ in 0..60 {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - gr * (b - a);
            fc = mismatch(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + gr * (b - a);
            fd = mismatch(d);
        }
    }
    let (l, v) = if fc < fd { (c, fc) } else { (d, fd) };
    if v < best_v {
        Ok((l, v))
    } else {
        Ok((best_l, best_v))
    }
}

/// Number of crests per period: sign changes + to - of the spectral
/// derivative around the torus, with values below 1e-10·‖φ'‖∞ treated as 0.
pub fn crest_count(profile: &WaveProfile) -> Result<usize> {
    if profile.sup_norm() == 0.0 {
        return Err(CoreError::TrivialProfile);
    }
    let dp = derivative(profile, 1);
    let floor = 1e-10 * dp.sup_norm();
    let signs: Vec<i8> = dp
        .samples()
        .iter()
        .filter_map(|&v| {
            if v > floor {
                Some(1)
            } else if v < -floor {
                Some(-1)
            } else {
                None
            }
        })
        .collect();
    if signs.is_empty() {
        return Ok(0);
    }
    let mut count = 0;
    for i in 0..signs.len() {
        let a = signs[i];
        let b = signs[(i + 1) % signs.len()];
        if a == 1 && b == -1 {
            count += 1;
        }
    }
    Ok(count)
}

/// Least-squares slope of log|φ̂(k)| against log k over k ≥ k_min with
/// coefficients above the noise floor. A slope of -p-1 or steeper indicates
/// roughly C^{p-1} regularity; smooth profiles give very steep slopes.
pub fn fourier_decay(profile: &WaveProfile, k_min: usize) -> Result<f64> {
    if k_min < 4 {
        return Err(CoreError::InvalidParameter(
            "fourier_decay requires k_min >= 4".into(),
        ));
    }
    let half = profile.grid().len() / 2;
    let max_amp = (1..half)
        .map(|k| profile.coeff(k as i64).norm())
        .fold(0.0f64, f64::max);
    if max_amp == 0.0 {
        return Err(CoreError::TrivialProfile);
    }
    let floor = 1e-13 * max_amp;
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for k in k_min..half {
        let a = profile.coeff(k as i64).norm();
        if a > floor {
            xs.push((k as f64).ln());
            ys.push(a.ln());
        }
    }
    if xs.len() < 5 {
        return Err(CoreError::TooFewPoints {
            context: "fourier_decay",
            needed: 5,
            found: xs.len(),
        });
    }
    Ok(ols(&xs, &ys).0)
}

/// Outcome of the amplitude-bound check with signed margins (nonnegative
/// margin = bound satisfied).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AmplitudeCheck {
    pub ok: bool,
    /// φ̄₊ + margin - max φ, when φ̄₊ exists
    pub upper_margin: Option<f64>,
    /// min φ - (φ̄₋ - margin), when φ̄₋ exists
    pub lower_margin: Option<f64>,
    /// 2√(σ²/4α² + c/α) + margin - (max φ - min φ), for Gardner α > 0
    pub range_margin: Option<f64>,
}

/// Check max φ ≤ φ̄₊, min φ ≥ φ̄₋ (where the levels exist) and, for the
/// Gardner nonlinearity with α > 0, max φ - min φ ≤ 2√(σ²/4α² + c/α), each
/// with a 1e-6 margin.
pub fn amplitude_check(
    params: &ModelParams,
    c: f64,
    profile: &WaveProfile,
) -> Result<AmplitudeCheck> {
    let levels = singular_levels(params, c)?;
    let max = profile
        .samples()
        .iter()
        .fold(f64::NEG_INFINITY, |m, &v| m.max(v));
    let min = profile.samples().iter().fold(f64::INFINITY, |m, &v| m.min(v));
    let upper_margin = levels.phi_plus.map(|p| p + AMPLITUDE_MARGIN - max);
    let lower_margin = levels.phi_minus.map(|m| min - (m - AMPLITUDE_MARGIN));
    let range_margin = params.gardner_coeffs().and_then(|(sigma, alpha)| {
        if alpha > 0.0 {
            let bound = 2.0 * (sigma * sigma / (4.0 * alpha * alpha) + c / alpha).sqrt();
            Some(bound + AMPLITUDE_MARGIN - (max - min))
        } else {
            None
        }
    });
    let ok = upper_margin.is_none_or(|m| m >= 0.0)
        && lower_margin.is_none_or(|m| m >= 0.0)
        && range_margin.is_none_or(|m| m >= 0.0);
    Ok(AmplitudeCheck {
        ok,
        upper_margin,
        lower_margin,
        range_margin,
    })
}

/// Regularity, amplitude and symmetry metrics attached to one profile.
#[derive(Debug, Clone)]
pub struct DiagnosticsReport {
    /// min of c - n'(φ); nonnegative in the admissible regime
    pub slack: f64,
    /// fitted Hölder exponent at the binding extremum (near-singular regime only)
    pub holder_exponent: Option<f64>,
    pub holder_constant: Option<f64>,
    /// 2/a at the binding singular level, when one exists
    pub predicted_exponent: Option<f64>,
    pub predicted_constant: Option<f64>,
    pub asymmetry: f64,
    pub crest_count: usize,
    pub fourier_decay_rate: Option<f64>,
    pub amplitude_ok: bool,
}

/// Default window (in grid spacings) for the Hölder fit.
pub const HOLDER_WINDOW: usize = 16;
/// Default exclusion radius (in grid spacings) around the fit center.
pub const HOLDER_EXCLUDE: usize = 2;

/// Assemble the full diagnostics for a profile at speed c. Near-singular
/// profiles (slack ≤ 1e-2) get a Hölder fit at the extremum that binds;
/// smooth ones are classified by their Fourier decay slope.
pub fn diagnose(params: &ModelParams, c: f64, profile: &WaveProfile) -> Result<DiagnosticsReport> {
    let slack_val = slack(params, c, profile);
    let levels = singular_levels(params, c)?;
    let (_, asym) = asymmetry(profile)?;
    let crests = crest_count(profile)?;
    let amp = amplitude_check(params, c, profile)?;
    let decay = fourier_decay(profile, 4).ok();

    // the level the profile is approaching: nearest existing root of F' to
    // the sample where the slack is attained
    let j_star = slack_argmin(params, c, profile);
    let u_star = profile.samples()[j_star];
    let binding = match (levels.phi_minus, levels.phi_plus) {
        (Some(m), Some(p)) => Some(if (u_star - m).abs() < (u_star - p).abs() {
            m
        } else {
            p
        }),
        (Some(m), None) => Some(m),
        (None, Some(p)) => Some(p),
        (None, None) => None,
    };
    let predicted = binding.and_then(|b| predicted_holder(params, c, b).ok());

    let (h_exp, h_const) = if slack_val <= SMOOTH_SLACK_THRESHOLD {
        // fit at the global extremum on the binding side
        let idx = if binding.unwrap_or(1.0) >= 0.0 {
            argmax(profile.samples())
        } else {
            argmin(profile.samples())
        };
        match holder_fit(profile, idx, HOLDER_WINDOW, HOLDER_EXCLUDE) {
            Ok((e, k)) => (Some(e), Some(k)),
            Err(_) => (None, None),
        }
    } else {
        (None, None)
    };

    Ok(DiagnosticsReport {
        slack: slack_val,
        holder_exponent: h_exp,
        holder_constant: h_const,
        predicted_exponent: predicted.map(|p| p.exponent),
        predicted_constant: predicted.map(|p| p.constant),
        asymmetry: asym,
        crest_count: crests,
        fourier_decay_rate: decay,
        amplitude_ok: amp.ok,
    })
}

fn argmax(v: &[f64]) -> usize {
    let mut best = 0;
    for (j, &x) in v.iter().enumerate() {
        if x > v[best] {
            best = j;
        }
    }
    best
}

fn argmin(v: &[f64]) -> usize {
    let mut best = 0;
    for (j, &x) in v.iter().enumerate() {
        if x < v[best] {
            best = j;
        }
    }
    best
}
