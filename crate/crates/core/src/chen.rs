//! G-function in the squeezed (Bogoliubov) frame.
//!
//! The second spinor component `phi2(z) = sum a_{2m} z^{2m}` obeys
//! `(n+1)(n+2) Gamma a_{n+2} = [delta^2/(E1 - n omega1) - (n omega2 + E2)] a_n - Gamma a_{n-2}`
//! with `a_{-2} = 0`, `a_0 = 1`, and the first component follows from
//! `abar_n = delta a_n / (E1 - n omega1)`. Mapping both back to the original frame
//! at `z = 0` gives
//!
//! `G(E) = sum_m (1 - delta/(E1 - 2m omega1)) a_{2m} t^m (2m)!/(2^m m!)`, `t = tanh|theta|`,
//!
//! with simple poles wherever `E1/omega1` is an even integer.
//!
//! The factorial weight is never formed: the series is carried in the scaled
//! variable `b_m = a_{2m} c_m` with `c_m = t^m (2m-1)!!`, for which the
//! recurrence becomes
//! `b_{m+1} = t [K_m b_m - Gamma t (2m-1) b_{m-1}] / ((2m+2) Gamma)`.

use crate::error::{Error, Result};
use crate::eval::{EvalFlags, GEvaluation, GFunction};
use crate::model::{bogoliubov_frame, BogoliubovFrame, ModelParams, Phase};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChenConfig {
    /// Pole window half-width in units of `omega1`.
    pub pole_eps: f64,
    /// Number of consecutive negligible terms that ends the sum.
    pub quiet_terms: usize,
    /// Relative size below which a term counts as negligible.
    pub tol: f64,
    pub m_max: usize,
    /// Internal starting value of the scaled series; the result does not depend on it.
    pub rescale: f64,
}

impl Default for ChenConfig {
    fn default() -> Self {
        Self {
            pole_eps: 1e-10,
            quiet_terms: 8,
            tol: 1e-17,
            m_max: 200_000,
            rescale: 1.0,
        }
    }
}

/// Evaluated series with its bookkeeping.
#[derive(Debug, Clone, PartialEq)]
pub struct ScaledSeries {
    /// Terms `(1 - delta/(E1 - 2m omega1)) b_m`.
    pub m_terms: Vec<f64>,
    pub partial_sums: Vec<f64>,
    pub truncation_m: usize,
    pub converged: bool,
    pub max_term: f64,
}

impl ScaledSeries {
    pub fn sum(&self) -> f64 {
        self.partial_sums.last().copied().unwrap_or(0.0)
    }
}

fn pole_distance(frame: &BogoliubovFrame, energy: f64, n: usize) -> f64 {
    frame.e1(energy) - n as f64 * frame.omega1
}

fn signed_delta(delta: f64, phase: Phase) -> f64 {
    delta * phase.sign()
}

fn check_pole(frame: &BogoliubovFrame, energy: f64, n: usize, pole_eps: f64) -> Result<()> {
    if pole_distance(frame, energy, n).abs() < pole_eps * frame.omega1 {
        return Err(Error::PoleProximity {
            energy,
            index: n / 2,
        });
    }
    Ok(())
}

/// Even coefficients `a_0, a_2, ..., a_{2 m_max}` by forward recursion.
pub fn chen_coefficients(params: &ModelParams, energy: f64, m_max: usize) -> Result<Vec<f64>> {
    let frame = bogoliubov_frame(params.omega())?;
    let pole_eps = ChenConfig::default().pole_eps;
    let delta = params.delta();
    let e2 = frame.e2(energy);
    let mut a = Vec::with_capacity(m_max + 1);
    a.push(1.0);
    let mut prev = 0.0;
    for m in 0..m_max {
        let n = 2 * m;
        check_pole(&frame, energy, n, pole_eps)?;
        let k = delta * delta / pole_distance(&frame, energy, n) - (n as f64 * frame.omega2 + e2);
        let nf = n as f64;
        let next = (k * a[m] - frame.gamma * prev) / ((nf + 1.0) * (nf + 2.0) * frame.gamma);
        prev = a[m];
        a.push(next);
    }
    Ok(a)
}

/// First-component coefficients `abar_{2m} = delta a_{2m} / (E1 - 2m omega1)`.
pub fn phi1_coefficients(params: &ModelParams, a: &[f64], energy: f64) -> Result<Vec<f64>> {
    let frame = bogoliubov_frame(params.omega())?;
    let pole_eps = ChenConfig::default().pole_eps;
    a.iter()
        .enumerate()
        .map(|(m, am)| {
            check_pole(&frame, energy, 2 * m, pole_eps)?;
            Ok(params.delta() * am / pole_distance(&frame, energy, 2 * m))
        })
        .collect()
}

/// Sums the scaled series for one energy.
pub fn scaled_series(
    params: &ModelParams,
    energy: f64,
    phase: Phase,
    config: &ChenConfig,
) -> Result<ScaledSeries> {
    let frame = bogoliubov_frame(params.omega())?;
    let delta = signed_delta(params.delta(), phase);
    let t = frame.tanh_abs_theta;
    let gamma = frame.gamma;
    let e2 = frame.e2(energy);
    let lambda = config.rescale;

    let mut m_terms = Vec::new();
    let mut partial_sums = Vec::new();
    let mut b_prev = 0.0;
    let mut b = lambda;
    let mut sum = 0.0;
    let mut max_term: f64 = 0.0;
    let mut quiet = 0;
    for m in 0..config.m_max {
        let n = 2 * m;
        let d = pole_distance(&frame, energy, n);
        let term = (1.0 - delta / d) * b;
        sum += term;
        max_term = max_term.max(term.abs());
        m_terms.push(term / lambda);
        partial_sums.push(sum / lambda);
        if !sum.is_finite() {
            break;
        }
        if term.abs() <= config.tol * sum.abs().max(max_term) {
            quiet += 1;
            if quiet >= config.quiet_terms {
                return Ok(ScaledSeries {
                    m_terms,
                    partial_sums,
                    truncation_m: m,
                    converged: true,
                    max_term: max_term / lambda,
                });
            }
        } else {
            quiet = 0;
        }
        let k = delta * delta / d - (n as f64 * frame.omega2 + e2);
        let mf = m as f64;
        let next = t * (k * b - gamma * t * (2.0 * mf - 1.0) * b_prev) / ((2.0 * mf + 2.0) * gamma);
        b_prev = b;
        b = next;
    }
    let truncation_m = m_terms.len().saturating_sub(1);
    Ok(ScaledSeries {
        m_terms,
        partial_sums,
        truncation_m,
        converged: false,
        max_term: max_term / lambda,
    })
}

/// True when `E1/omega1` lies within `pole_eps` of an even integer `>= 0`.
pub fn in_pole_window(frame: &BogoliubovFrame, energy: f64, pole_eps: f64) -> bool {
    let x = frame.reduced_energy(energy);
    let m = (x / 2.0).round().max(0.0);
    (x - 2.0 * m).abs() < pole_eps
}

/// Evaluates the squeezed-frame G-function for the even sector with the given phase.
pub fn g_chen(params: &ModelParams, energy: f64, phase: Phase) -> Result<GEvaluation> {
    g_chen_with(params, energy, phase, &ChenConfig::default())
}

pub fn g_chen_with(
    params: &ModelParams,
    energy: f64,
    phase: Phase,
    config: &ChenConfig,
) -> Result<GEvaluation> {
    params.require_pure_point()?;
    if params.delta() == 0.0 {
        return Err(Error::ZeroDelta);
    }
    let frame = bogoliubov_frame(params.omega())?;
    let series = scaled_series(params, energy, phase, config)?;
    if !series.converged && series.sum().is_finite() {
        return Err(Error::NotConverged {
            what: "squeezed-frame series",
            detail: format!("m_max = {} reached at E = {energy}", config.m_max),
        });
    }
    let mut eval = GEvaluation::new(energy, series.sum());
    eval.flags = eval.flags.union(EvalFlags {
        near_pole: in_pole_window(&frame, energy, config.pole_eps),
        ..EvalFlags::default()
    });
    Ok(eval)
}

/// Squeezed-frame G-function bound to parameters and a phase.
#[derive(Debug, Clone, Copy)]
pub struct ChenG {
    pub params: ModelParams,
    pub phase: Phase,
    pub config: ChenConfig,
    frame: BogoliubovFrame,
}

impl ChenG {
    pub fn new(params: ModelParams, phase: Phase) -> Result<Self> {
        params.require_pure_point()?;
        if params.delta() == 0.0 {
            return Err(Error::ZeroDelta);
        }
        Ok(Self {
            params,
            phase,
            config: ChenConfig::default(),
            frame: bogoliubov_frame(params.omega())?,
        })
    }

    pub fn frame(&self) -> &BogoliubovFrame {
        &self.frame
    }
}

impl GFunction for ChenG {
    fn evaluate(&self, energy: f64) -> Result<GEvaluation> {
        g_chen_with(&self.params, energy, self.phase, &self.config)
    }

    fn poles_in(&self, lo: f64, hi: f64) -> Vec<f64> {
        let f = &self.frame;
        let gap = f.pole_gap();
        let first = f.e1_offset;
        // E^(m) = 2m omega1 - e1_offset
        let start = ((lo + first) / gap).ceil().max(0.0) as usize;
        (start..)
            .map(|m| m as f64 * gap - first)
            .take_while(|&e| e <= hi)
            .collect()
    }

    fn has_known_poles(&self) -> bool {
        true
    }

    fn name(&self) -> &'static str {
        "chen"
    }
}

/// Outcome of probing one pole.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PoleKind {
    Pole,
    /// Vanishing residue: exceptional-spectrum candidate.
    Lifted,
    Inconclusive,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ResidueProbe {
    pub m: usize,
    pub energy: f64,
    /// Stencil estimates `h (G(E+h) - G(E-h))/2` for shrinking `h`.
    pub estimates: Vec<f64>,
    /// Typical magnitude of `(E - E^(m)) G(E)` half a gap away.
    pub scale: f64,
    pub kind: PoleKind,
}

impl ResidueProbe {
    /// Estimate at the smallest step.
    pub fn residue(&self) -> f64 {
        *self.estimates.last().expect("stencil is never empty")
    }
}

/// Relative residue below which a pole counts as lifted.
pub const LIFT_TOL: f64 = 1e-6;

const STENCIL: [f64; 3] = [1e-3, 1e-4, 1e-5];

/// Residue estimate at the pole `E^(m)` of the `(even, +)` function.
pub fn residue_probe(params: &ModelParams, m: usize) -> Result<ResidueProbe> {
    residue_probe_phase(params, m, Phase::Plus)
}

pub fn residue_probe_phase(params: &ModelParams, m: usize, phase: Phase) -> Result<ResidueProbe> {
    let frame = bogoliubov_frame(params.omega())?;
    let energy = 2.0 * m as f64 * frame.omega1 - frame.e1_offset;
    if params.delta() == 0.0 {
        // Every pole is lifted: the spectrum sits exactly on the grid.
        return Ok(ResidueProbe {
            m,
            energy,
            estimates: vec![0.0; STENCIL.len()],
            scale: 0.0,
            kind: PoleKind::Lifted,
        });
    }
    let config = ChenConfig::default();
    let g = |e: f64| g_chen_with(params, e, phase, &config).map(|x| x.value);
    let half = frame.omega1;
    let scale = (half * g(energy + half)?)
        .abs()
        .max((half * g(energy - half)?).abs());
    let mut estimates = Vec::with_capacity(STENCIL.len());
    for rel in STENCIL {
        let h = rel * frame.omega1;
        estimates.push(h * (g(energy + h)? - g(energy - h)?) / 2.0);
    }
    let mags: Vec<f64> = estimates.iter().map(|r| r.abs()).collect();
    let largest = mags.iter().cloned().fold(0.0, f64::max);
    let smallest = mags.iter().cloned().fold(f64::INFINITY, f64::min);
    let last = mags[mags.len() - 1];
    let kind = if last < LIFT_TOL * scale {
        PoleKind::Lifted
    } else if smallest == 0.0 || largest / smallest > 10.0 {
        PoleKind::Inconclusive
    } else {
        PoleKind::Pole
    };
    Ok(ResidueProbe {
        m,
        energy,
        estimates,
        scale,
        kind,
    })
}

/// Coefficients `c_0, c_2, ..., c_n` of the formal expansion `z^r sum c_n z^{-n}`
/// at infinity, `r = E1/omega1`. The recurrence coefficients grow with `n`, so the
/// expansion has zero radius of convergence; returned only for diagnostics.
pub fn asymptotic_coefficients(
    params: &ModelParams,
    energy: f64,
    n_max: usize,
) -> Result<Vec<f64>> {
    let frame = bogoliubov_frame(params.omega())?;
    let ab = frame.abbreviations(energy, params.delta());
    let r = frame.reduced_energy(energy);
    let mut c = vec![1.0];
    for k in 1..=n_max / 2 {
        let n = (2 * k) as f64;
        let c2 = c[k - 1];
        let c4 = if k >= 2 { c[k - 2] } else { 0.0 };
        let lead = ab.b1 * (r - n + 1.0) * (r - n + 2.0) + ab.b3 * (r - n + 2.0) + ab.b4;
        c.push((lead * c2 + (4.0 - n) * (r - n + 3.0) * (r - n + 4.0) * c4) / n);
    }
    Ok(c)
}

/// Term ratios of the two power series in `w` built from the same coefficients:
/// the one evaluated in the squeezed frame (radius 1) and the one mapped back to
/// the original frame (radius `1 + sqrt(omega^2-4)/omega`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesRadii {
    pub squeezed_radius: f64,
    pub original_radius: f64,
}

/// Root-test estimate of both radii from terms `m_lo..m_hi`.
pub fn series_radii(
    params: &ModelParams,
    energy: f64,
    m_lo: usize,
    m_hi: usize,
) -> Result<SeriesRadii> {
    let frame = bogoliubov_frame(params.omega())?;
    let config = ChenConfig {
        quiet_terms: usize::MAX,
        m_max: m_hi + 1,
        ..ChenConfig::default()
    };
    let s = scaled_series(params, energy, Phase::Plus, &config)?;
    let delta = params.delta();
    // b_m from the stored terms.
    let b = |m: usize| {
        let d = pole_distance(&frame, energy, 2 * m);
        s.m_terms[m] / (1.0 - delta / d)
    };
    let log_b = |m: usize| b(m).abs().ln();
    // squeezed-frame term: b_m (2/(t omega))^m / (E1 - 2m omega1)
    let w_factor = (2.0 / (frame.tanh_abs_theta * params.omega())).ln();
    let log_w =
        |m: usize| log_b(m) + m as f64 * w_factor - pole_distance(&frame, energy, 2 * m).abs().ln();
    let span = (m_hi - m_lo) as f64;
    Ok(SeriesRadii {
        squeezed_radius: (-(log_w(m_hi) - log_w(m_lo)) / span).exp(),
        original_radius: (-(log_b(m_hi) - log_b(m_lo)) / span).exp(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::{assert_abs_diff_eq, assert_relative_eq};

    fn params() -> ModelParams {
        ModelParams::new(2.5, 0.7).unwrap()
    }

    #[test]
    fn second_coefficient_from_first_step() {
        let p = params();
        let f = bogoliubov_frame(2.5).unwrap();
        let e = 1.1;
        let a = chen_coefficients(&p, e, 3).unwrap();
        let expected = (0.49 / f.e1(e) - f.e2(e)) / (2.0 * f.gamma);
        assert_relative_eq!(a[1], expected, max_relative = 1e-14);
    }

    #[test]
    fn pole_energy_is_rejected() {
        let p = params();
        assert!(matches!(
            chen_coefficients(&p, 2.5, 4),
            Err(Error::PoleProximity { index: 1, .. })
        ));
        assert!(phi1_coefficients(&p, &[1.0], -0.5).is_err());
    }

    #[test]
    fn phi1_first_coefficient() {
        let p = params();
        let f = bogoliubov_frame(2.5).unwrap();
        let a = chen_coefficients(&p, 0.3, 2).unwrap();
        let abar = phi1_coefficients(&p, &a, 0.3).unwrap();
        assert_relative_eq!(abar[0], 0.7 / f.e1(0.3));
        let zero = ModelParams::new(2.5, 0.0).unwrap();
        assert!(phi1_coefficients(&zero, &a, 0.3)
            .unwrap()
            .iter()
            .all(|x| *x == 0.0));
    }

    #[test]
    fn scaled_series_matches_unscaled_sum() {
        let p = params();
        let f = bogoliubov_frame(2.5).unwrap();
        let e = 1.7;
        let a = chen_coefficients(&p, e, 60).unwrap();
        let mut weight = 1.0;
        let mut direct = 0.0;
        for (m, am) in a.iter().enumerate() {
            if m > 0 {
                weight *= f.tanh_abs_theta * (2 * m - 1) as f64;
            }
            direct += (1.0 - 0.7 / (f.e1(e) - 2.0 * m as f64 * f.omega1)) * am * weight;
        }
        let g = g_chen(&p, e, Phase::Plus).unwrap().value;
        assert_relative_eq!(g, direct, max_relative = 1e-12);
    }

    #[test]
    fn rescaling_leaves_sum_unchanged() {
        let p = params();
        let base = g_chen(&p, 3.3, Phase::Plus).unwrap().value;
        for lambda in [1e-200, 1e-7, 3.0, 1e150] {
            let cfg = ChenConfig {
                rescale: lambda,
                ..ChenConfig::default()
            };
            let v = g_chen_with(&p, 3.3, Phase::Plus, &cfg).unwrap().value;
            assert_relative_eq!(v, base, max_relative = 1e-13);
        }
    }

    #[test]
    fn zero_delta_is_rejected() {
        let p = ModelParams::new(2.5, 0.0).unwrap();
        assert_eq!(g_chen(&p, 1.0, Phase::Plus), Err(Error::ZeroDelta));
    }

    #[test]
    fn sign_flip_across_first_poles() {
        let p = params();
        for e in [-0.5, 2.5, 5.5] {
            let lo = g_chen(&p, e - 1e-9, Phase::Plus).unwrap();
            let hi = g_chen(&p, e + 1e-9, Phase::Plus).unwrap();
            assert!(lo.value * hi.value < 0.0);
            assert!(lo.value.abs() > 1e6 && hi.value.abs() > 1e6);
        }
        let near = g_chen(&p, 2.5 + 1e-12, Phase::Plus).unwrap();
        assert!(near.flags.near_pole);
    }

    #[test]
    fn generic_pole_has_residue() {
        let probe = residue_probe(&params(), 0).unwrap();
        assert_eq!(probe.kind, PoleKind::Pole);
        let spread = probe.estimates[0] / probe.estimates[2];
        assert_abs_diff_eq!(spread, 1.0, epsilon = 1e-3);
    }

    #[test]
    fn juddian_point_lifts_pole() {
        // delta^2 = E1 E2 at E = 2.5 for omega = 2.5 gives delta = 1.
        let p = ModelParams::new(2.5, 1.0).unwrap();
        let probe = residue_probe(&p, 1).unwrap();
        assert_eq!(probe.kind, PoleKind::Lifted, "{probe:?}");
        let lo = residue_probe(&p.with_delta(0.95).unwrap(), 1)
            .unwrap()
            .residue();
        let hi = residue_probe(&p.with_delta(1.05).unwrap(), 1)
            .unwrap()
            .residue();
        assert!(lo * hi < 0.0);
    }

    #[test]
    fn delta_zero_lifts_every_pole() {
        let p = ModelParams::new(2.5, 0.0).unwrap();
        for m in 0..4 {
            assert_eq!(residue_probe(&p, m).unwrap().kind, PoleKind::Lifted);
        }
    }

    #[test]
    fn poles_listed_in_range() {
        let g = ChenG::new(params(), Phase::Plus).unwrap();
        let poles = g.poles_in(-1.0, 6.0);
        assert_eq!(poles.len(), 3);
        for (a, b) in poles.iter().zip([-0.5, 2.5, 5.5]) {
            assert_abs_diff_eq!(*a, b, epsilon = 1e-14);
        }
        assert!(g.poles_in(-5.0, -1.0).is_empty());
    }

    #[test]
    fn asymptotic_expansion_diverges() {
        let c = asymptotic_coefficients(&params(), 0.4, 200).unwrap();
        let ratio = |k: usize| (c[k] / c[k - 1]).abs();
        // |c_n / c_{n-2}| grows linearly in n, so the expansion has zero radius.
        let slope = ratio(100) / 200.0;
        assert!(slope > 1.0 && slope < 1.3, "{slope}");
        assert!(ratio(100) > 3.0 * ratio(20));
    }

    #[test]
    fn radii_of_the_two_frames() {
        let p = params();
        let r = series_radii(&p, 0.4, 80, 120).unwrap();
        assert_abs_diff_eq!(r.original_radius, 1.0 + 1.5 / 2.5, epsilon = 0.05);
        assert_abs_diff_eq!(r.squeezed_radius, 1.0, epsilon = 0.05);
    }
}
