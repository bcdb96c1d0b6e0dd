//! Continued-fraction G-function built from the minimal solution of the
//! three-term recurrence of the Bargmann-space power series.
//!
//! In sector `(p, s)` the coefficients of `phi(z) = sum a_n z^(2n+p)` obey
//! `A(n) a_{n+1} + B(n, E) a_n + a_{n-1} = 0` with
//! `A(n) = (2n+2+p)(2n+1+p)` and `B(n, E) = (2n+p) omega - E + s (-1)^n delta`.
//! The ratios `V_n = a_n / a_{n-1}` of the minimal solution satisfy
//! `V_n = -1 / (B(n) + A(n) V_{n+1})`, and
//! `G(E) = -B(0)/A(0) - V_1(E)` vanishes exactly on the sector spectrum.

use crate::error::{Error, Result};
use crate::eval::{EvalFlags, GEvaluation, GFunction};
use crate::model::{recurrence_roots, ModelParams, SymmetrySector};

/// Level-1 denominators smaller than this (relative to their summands) are
/// reported as a pole of `V_1`.
const POLE_RELATIVE: f64 = 1e-13;

/// Coefficient functions of the power-series recurrence in one sector.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SectorRecurrence {
    pub sector: SymmetrySector,
    pub omega: f64,
    pub delta: f64,
}

impl SectorRecurrence {
    pub fn new(params: &ModelParams, sector: SymmetrySector) -> Self {
        Self {
            sector,
            omega: params.omega(),
            delta: params.delta(),
        }
    }

    pub fn a(&self, n: usize) -> f64 {
        let p = self.sector.parity_offset() as f64;
        let n = n as f64;
        (2.0 * n + 2.0 + p) * (2.0 * n + 1.0 + p)
    }

    pub fn b(&self, n: usize, energy: f64) -> f64 {
        let p = self.sector.parity_offset() as f64;
        let alt = if n.is_multiple_of(2) { 1.0 } else { -1.0 };
        (2.0 * n as f64 + p) * self.omega - energy + self.sector.phase_sign() * alt * self.delta
    }

    /// `a_1/a_0` forced by the `n = 0` equation.
    pub fn initial_ratio(&self, energy: f64) -> f64 {
        -self.b(0, energy) / self.a(0)
    }
}

/// Depth policy for the backward recursion.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ZhangConfig {
    pub start_depth: usize,
    pub max_depth: usize,
    /// Stop doubling once `|V_1(2d) - V_1(d)| < tol * max(1, |V_1|)`.
    pub tol: f64,
}

impl Default for ZhangConfig {
    fn default() -> Self {
        Self {
            start_depth: 64,
            max_depth: 1 << 20,
            tol: 1e-14,
        }
    }
}

/// How the deepest level of the continued fraction is seeded.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TailStart {
    Zero,
    /// `V_depth = x_plus / depth` from the asymptotics of the minimal solution.
    Asymptotic,
}

struct Backward {
    v1: f64,
    level1_relative: f64,
}

fn backward(rec: &SectorRecurrence, energy: f64, depth: usize, seed: f64) -> Backward {
    let mut v = seed;
    let mut level1_relative = f64::INFINITY;
    for n in (1..depth).rev() {
        let b = rec.b(n, energy);
        let av = rec.a(n) * v;
        let den = b + av;
        if n == 1 {
            let size = b.abs() + av.abs();
            level1_relative = if size > 0.0 { den.abs() / size } else { 0.0 };
        }
        v = -1.0 / den;
    }
    Backward {
        v1: v,
        level1_relative,
    }
}

fn seed(omega: f64, depth: usize, tail: TailStart) -> Result<f64> {
    let (x_plus, _) = recurrence_roots(omega)?;
    Ok(match tail {
        TailStart::Zero => 0.0,
        TailStart::Asymptotic => x_plus / depth as f64,
    })
}

/// `V_1(E)` from backward recursion starting at level `depth`.
pub fn cf_tail(
    params: &ModelParams,
    sector: SymmetrySector,
    energy: f64,
    depth: usize,
    tail: TailStart,
) -> Result<f64> {
    if depth < 1 {
        return Err(Error::InvalidParameter("depth must be at least 1".into()));
    }
    let rec = SectorRecurrence::new(params, sector);
    let out = backward(
        &rec,
        energy,
        depth.max(2),
        seed(params.omega(), depth, tail)?,
    );
    if out.level1_relative < POLE_RELATIVE || !out.v1.is_finite() {
        return Err(Error::ContinuedFractionPole { energy, level: 1 });
    }
    Ok(out.v1)
}

/// Result of the depth-doubling loop.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TailValue {
    pub v1: f64,
    pub depth: usize,
    pub change: f64,
    pub converged: bool,
    pub near_pole: bool,
}

/// `V_1(E)` with depth doubled until two successive values agree.
pub fn converged_tail(
    params: &ModelParams,
    sector: SymmetrySector,
    energy: f64,
    config: &ZhangConfig,
) -> Result<TailValue> {
    params.require_pure_point()?;
    let rec = SectorRecurrence::new(params, sector);
    let mut depth = config.start_depth.max(2);
    let mut prev = backward(
        &rec,
        energy,
        depth,
        seed(params.omega(), depth, TailStart::Asymptotic)?,
    );
    loop {
        let next_depth = depth * 2;
        let next = backward(
            &rec,
            energy,
            next_depth,
            seed(params.omega(), next_depth, TailStart::Asymptotic)?,
        );
        let change = (next.v1 - prev.v1).abs();
        let converged = change < config.tol * next.v1.abs().max(1.0)
            || (!next.v1.is_finite() && !prev.v1.is_finite());
        if converged || next_depth >= config.max_depth {
            return Ok(TailValue {
                v1: next.v1,
                depth: next_depth,
                change,
                converged,
                near_pole: next.level1_relative < POLE_RELATIVE || !next.v1.is_finite(),
            });
        }
        depth = next_depth;
        prev = next;
    }
}

/// Continued-fraction G-function of one symmetry sector.
#[derive(Debug, Clone, Copy)]
pub struct ZhangG {
    pub params: ModelParams,
    pub sector: SymmetrySector,
    pub config: ZhangConfig,
}

impl ZhangG {
    pub fn new(params: ModelParams, sector: SymmetrySector) -> Result<Self> {
        params.require_pure_point()?;
        Ok(Self {
            params,
            sector,
            config: ZhangConfig::default(),
        })
    }
}

impl GFunction for ZhangG {
    fn evaluate(&self, energy: f64) -> Result<GEvaluation> {
        g_zhang_with(&self.params, self.sector, energy, &self.config)
    }

    fn name(&self) -> &'static str {
        "zhang"
    }
}

pub fn g_zhang(params: &ModelParams, sector: SymmetrySector, energy: f64) -> Result<GEvaluation> {
    g_zhang_with(params, sector, energy, &ZhangConfig::default())
}

pub fn g_zhang_with(
    params: &ModelParams,
    sector: SymmetrySector,
    energy: f64,
    config: &ZhangConfig,
) -> Result<GEvaluation> {
    let tail = converged_tail(params, sector, energy, config)?;
    let rec = SectorRecurrence::new(params, sector);
    let value = rec.initial_ratio(energy) - tail.v1;
    let mut eval = GEvaluation::new(energy, value);
    eval.flags = eval.flags.union(EvalFlags {
        near_pole: tail.near_pole,
        not_converged: !tail.converged,
        ..EvalFlags::default()
    });
    Ok(eval)
}

/// `a_0..=a_n` of the minimal solution, normalised to `a_0 = 1`.
///
/// The ratios come from a converged backward recursion; away from the spectrum
/// the result does not satisfy the `n = 0` equation.
pub fn minimal_coefficients(
    params: &ModelParams,
    sector: SymmetrySector,
    energy: f64,
    n: usize,
) -> Result<Vec<f64>> {
    let config = ZhangConfig::default();
    let tail = converged_tail(params, sector, energy, &config)?;
    if !tail.converged {
        return Err(Error::NotConverged {
            what: "continued fraction",
            detail: format!("change {:e} at depth {}", tail.change, tail.depth),
        });
    }
    let rec = SectorRecurrence::new(params, sector);
    let depth = tail.depth.max(4 * (n + 1));
    let mut v = seed(params.omega(), depth, TailStart::Asymptotic)?;
    let mut ratios = vec![0.0; n + 1];
    for k in (1..depth).rev() {
        v = -1.0 / (rec.b(k, energy) + rec.a(k) * v);
        if k <= n {
            ratios[k] = v;
        }
    }
    let mut coeffs = Vec::with_capacity(n + 1);
    coeffs.push(1.0);
    for k in 1..=n {
        coeffs.push(coeffs[k - 1] * ratios[k]);
    }
    Ok(coeffs)
}

/// `a_0..=a_n` by forward recursion from `a_0 = 1`, `a_1 = -B(0)/A(0)`.
/// Off the spectrum this is dominated by the non-minimal solution.
pub fn forward_coefficients(
    params: &ModelParams,
    sector: SymmetrySector,
    energy: f64,
    n: usize,
) -> Vec<f64> {
    let rec = SectorRecurrence::new(params, sector);
    let mut coeffs = vec![1.0];
    if n == 0 {
        return coeffs;
    }
    coeffs.push(rec.initial_ratio(energy));
    for k in 1..n {
        let next = -(rec.b(k, energy) * coeffs[k] + coeffs[k - 1]) / rec.a(k);
        coeffs.push(next);
    }
    coeffs
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    // Lowest (even, +) levels at omega = 2.5, delta = 0.7 from the dense oracle.
    const LEVELS: [f64; 4] = [-0.01386, 2.48674, 5.27159, 8.41276];

    fn params() -> ModelParams {
        ModelParams::new(2.5, 0.7).unwrap()
    }

    #[test]
    fn even_plus_recurrence_matches_textbook_form() {
        let rec = SectorRecurrence::new(&params(), SymmetrySector::EVEN_PLUS);
        for n in 0..10 {
            let nf = n as f64;
            assert_eq!(rec.a(n), (2.0 * nf + 2.0) * (2.0 * nf + 1.0));
            let alt = if n.is_multiple_of(2) { 1.0 } else { -1.0 };
            assert_eq!(rec.b(n, 1.3), 2.0 * nf * 2.5 - 1.3 + alt * 0.7);
        }
        assert_abs_diff_eq!(rec.initial_ratio(1.3), (1.3 - 0.7) / 2.0);
    }

    #[test]
    fn tail_is_insensitive_to_seed() {
        let p = params();
        for e in [-3.0, 1.0, 7.7] {
            let a = cf_tail(&p, SymmetrySector::EVEN_PLUS, e, 512, TailStart::Zero).unwrap();
            let b = cf_tail(&p, SymmetrySector::EVEN_PLUS, e, 512, TailStart::Asymptotic).unwrap();
            assert_abs_diff_eq!(a, b, epsilon = 1e-12);
        }
    }

    #[test]
    fn doubling_converges_far_from_spectrum() {
        let t = converged_tail(
            &params(),
            SymmetrySector::EVEN_PLUS,
            1.0,
            &ZhangConfig::default(),
        )
        .unwrap();
        assert!(t.converged);
        assert!(t.v1.is_finite());
        assert!(t.depth <= 256);
    }

    #[test]
    fn rejects_critical_and_subcritical() {
        let p = ModelParams::new(2.0, 0.7).unwrap();
        assert!(g_zhang(&p, SymmetrySector::EVEN_PLUS, 0.0).is_err());
        let p = ModelParams::new(1.5, 0.7).unwrap();
        assert!(cf_tail(
            &p,
            SymmetrySector::EVEN_PLUS,
            0.0,
            64,
            TailStart::Asymptotic
        )
        .is_err());
    }

    #[test]
    fn sign_changes_bracket_known_levels() {
        let p = params();
        for e in LEVELS {
            let lo = g_zhang(&p, SymmetrySector::EVEN_PLUS, e - 1e-4)
                .unwrap()
                .value;
            let hi = g_zhang(&p, SymmetrySector::EVEN_PLUS, e + 1e-4)
                .unwrap()
                .value;
            assert!(lo * hi < 0.0, "no sign change at {e}");
        }
    }

    #[test]
    fn minimal_ratio_approaches_x_plus() {
        let a = minimal_coefficients(&params(), SymmetrySector::EVEN_PLUS, 1.0, 100).unwrap();
        let n = 99;
        assert_abs_diff_eq!(n as f64 * a[n + 1] / a[n], -0.25, epsilon = 1e-2);
    }

    #[test]
    fn forward_recursion_is_dominated_off_spectrum() {
        let p = params();
        let fwd = forward_coefficients(&p, SymmetrySector::EVEN_PLUS, 1.0, 60);
        let n = 59;
        assert_abs_diff_eq!(n as f64 * fwd[n + 1] / fwd[n], -1.0, epsilon = 0.05);
    }

    #[test]
    fn delta_zero_zeros_sit_on_poles() {
        let p = ModelParams::new(2.5, 0.0).unwrap();
        for e in [-0.5, 2.5, 5.5] {
            let lo = g_zhang(&p, SymmetrySector::EVEN_PLUS, e - 1e-6)
                .unwrap()
                .value;
            let hi = g_zhang(&p, SymmetrySector::EVEN_PLUS, e + 1e-6)
                .unwrap()
                .value;
            assert!(lo * hi < 0.0 && lo.abs() < 1e-3, "E = {e}: {lo} {hi}");
        }
    }
}
