//! Forward-recursion G-function `G_T(E) = phi2(-i z0) - phi1(z0)`.
//!
//! In exact arithmetic this function vanishes for every `E`: the initial
//! condition `phi1(0) = phi2(0)` already enforces the symmetry it tests. In
//! double precision the forward recursion picks up the dominant solution
//! through rounding, so `|G_T|` is astronomically large off the spectrum and
//! dips only where the recursion happens to follow the minimal solution.
//! It is kept as an exhibit of that instability, not as a production backend.
//!
//! The streams are carried pre-multiplied by `z0^(2n)` so that no power of
//! `z0` is ever formed on its own.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::eval::{ComplexEvaluation, EvalFlags};
use crate::model::{characteristic_exponents, ModelParams};

/// Default number of series terms.
pub const DEFAULT_TERMS: usize = 200;

/// Magnitude above which a sample is flagged `huge`.
pub const HUGE: f64 = 1e8;

/// Coefficient streams `a1_n z0^(2n)` and `a2_n z0^(2n)`.
#[derive(Debug, Clone, PartialEq)]
pub struct TravenecState {
    pub c1: Vec<Complex64>,
    pub c2: Vec<Complex64>,
    pub z0: Complex64,
    pub n_terms: usize,
}

fn gamma1(omega: f64) -> f64 {
    characteristic_exponents(omega)[0].re
}

/// Runs both recursions from `a1_0 = a2_0 = 1`.
pub fn travenec_state(
    params: &ModelParams,
    energy: f64,
    z0: Complex64,
    n_terms: usize,
) -> Result<TravenecState> {
    params.require_pure_point()?;
    if z0 == Complex64::new(0.0, 0.0) {
        return Err(Error::InvalidParameter("z0 must be non-zero".into()));
    }
    let w = params.omega();
    let d = params.delta();
    let g1 = gamma1(w);
    let z2 = z0 * z0;
    let z4 = z2 * z2;
    let mut c1 = Vec::with_capacity(n_terms + 1);
    let mut c2 = Vec::with_capacity(n_terms + 1);
    c1.push(Complex64::new(1.0, 0.0));
    c2.push(Complex64::new(1.0, 0.0));
    for n in 0..n_terms {
        let nf = n as f64;
        let c = (2.0 * nf + 2.0) * (2.0 * nf + 1.0);
        let next1 = z2 * ((energy - g1 - 2.0 * nf * (2.0 * g1 + w)) * c1[n] - d * c2[n]) / c;
        let mut next2 = z2 * ((-energy - g1 - 2.0 * nf * (2.0 * g1 - w)) * c2[n] + d * c1[n]) / c;
        if n > 0 {
            next2 += 2.0 * w * g1 * z4 * c2[n - 1] / c;
        }
        c1.push(next1);
        c2.push(next2);
    }
    Ok(TravenecState {
        c1,
        c2,
        z0,
        n_terms,
    })
}

pub fn g_travenec(
    params: &ModelParams,
    energy: f64,
    z0: Complex64,
    n_terms: usize,
) -> Result<ComplexEvaluation> {
    let state = travenec_state(params, energy, z0, n_terms)?;
    let g1 = gamma1(params.omega());
    let z2 = z0 * z0;
    let sum1: Complex64 = state.c1.iter().sum();
    let sum2: Complex64 = state
        .c2
        .iter()
        .enumerate()
        .map(|(n, c)| if n % 2 == 0 { *c } else { -*c })
        .sum();
    let phi1 = (g1 * z2 / 2.0).exp() * sum1;
    let phi2 = (-g1 * z2 / 2.0).exp() * sum2;
    let mut value = phi2 - phi1;
    let overflow = !(value.re.is_finite() && value.im.is_finite());
    if overflow {
        value = Complex64::new(f64::INFINITY, f64::INFINITY);
    }
    Ok(ComplexEvaluation {
        energy,
        value,
        flags: EvalFlags {
            overflow,
            huge: overflow || value.norm() > HUGE,
            ..EvalFlags::default()
        },
    })
}

fn magnitude(params: &ModelParams, energy: f64, z0: Complex64, n_terms: usize) -> Result<f64> {
    Ok(g_travenec(params, energy, z0, n_terms)?.value.norm())
}

/// A local minimum of `|G_T|`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Dip {
    pub energy: f64,
    pub magnitude: f64,
}

/// Grid-refined minimum of `|G_T|` on `[center - half_width, center + half_width]`.
pub fn locate_dip(
    params: &ModelParams,
    z0: Complex64,
    n_terms: usize,
    center: f64,
    half_width: f64,
) -> Result<Dip> {
    const POINTS: usize = 201;
    let mut lo = center - half_width;
    let mut hi = center + half_width;
    let mut best = Dip {
        energy: center,
        magnitude: f64::INFINITY,
    };
    while hi - lo > 1e-10 * center.abs().max(1.0) {
        let step = (hi - lo) / (POINTS - 1) as f64;
        for k in 0..POINTS {
            let e = lo + step * k as f64;
            let m = magnitude(params, e, z0, n_terms)?;
            if m < best.magnitude {
                best = Dip {
                    energy: e,
                    magnitude: m,
                };
            }
        }
        lo = best.energy - 2.0 * step;
        hi = best.energy + 2.0 * step;
    }
    Ok(best)
}

/// Largest `|G_T|` over `points` equally spaced energies in `[lo, hi]`.
pub fn neighbourhood_max(
    params: &ModelParams,
    z0: Complex64,
    n_terms: usize,
    lo: f64,
    hi: f64,
    points: usize,
) -> Result<f64> {
    let mut max: f64 = 0.0;
    for k in 0..points {
        let e = lo + (hi - lo) * k as f64 / (points - 1).max(1) as f64;
        max = max.max(magnitude(params, e, z0, n_terms)?);
    }
    Ok(max)
}

/// Dip positions near `centers` for `n_terms` and `2 n_terms`; the largest
/// shift measures whether the truncation has settled.
pub fn dip_sentinel(
    params: &ModelParams,
    z0: Complex64,
    n_terms: usize,
    centers: &[f64],
    half_width: f64,
) -> Result<f64> {
    let mut shift: f64 = 0.0;
    for &c in centers {
        let a = locate_dip(params, z0, n_terms, c, half_width)?;
        let b = locate_dip(params, z0, 2 * n_terms, c, half_width)?;
        shift = shift.max((a.energy - b.energy).abs());
    }
    Ok(shift)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params() -> ModelParams {
        ModelParams::new(2.5, 0.7).unwrap()
    }

    #[test]
    fn rejects_origin_and_critical_frequency() {
        assert!(g_travenec(&params(), 0.0, Complex64::new(0.0, 0.0), 10).is_err());
        let p = ModelParams::new(2.0, 0.7).unwrap();
        assert!(g_travenec(&p, 0.0, Complex64::new(1.0, 1.0), 10).is_err());
    }

    #[test]
    fn initial_condition() {
        let s = travenec_state(&params(), 0.3, Complex64::new(1.0, 0.0), 3).unwrap();
        assert_eq!(s.c1[0], Complex64::new(1.0, 0.0));
        assert_eq!(s.c2[0], Complex64::new(1.0, 0.0));
        assert_eq!(s.c1.len(), 4);
    }

    #[test]
    fn small_z0_is_close_to_exact_zero() {
        // Rounding is not yet amplified for a small evaluation point.
        let g = g_travenec(&params(), 1.3, Complex64::new(0.3, 0.2), DEFAULT_TERMS).unwrap();
        assert!(g.value.norm() < 1e-12, "{}", g.value);
    }

    #[test]
    fn off_spectrum_values_are_huge() {
        let g = g_travenec(&params(), 1.0, Complex64::new(5.0, 5.0), DEFAULT_TERMS).unwrap();
        assert!(g.flags.huge, "{}", g.value);
    }

    #[test]
    fn dip_near_ground_state() {
        let z0 = Complex64::new(5.0, 5.0);
        let dip = locate_dip(&params(), z0, DEFAULT_TERMS, -0.01386, 2e-3).unwrap();
        assert!((dip.energy + 0.013_862_6).abs() < 1e-4, "{dip:?}");
    }
}
