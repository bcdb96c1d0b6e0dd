//! Cross-backend checks with pinned tolerances, numbered like the acceptance suite. Each check returns a
//! [`Check`] whose findings are plain strings with fixed float formatting, so a
//! report rendered from them is byte-for-byte reproducible.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::chen::{g_chen, ChenG};
use crate::error::Result;
use crate::model::{
    characteristic_exponents, critical_rho, exponent_rho, pole_energy, CriticalExponent,
    ModelParams, Phase, SymmetrySector,
};
use crate::oracle::{self, delta0_exact, lowest_eigenvalues, sector_block, LevelSelection};
use crate::solver::{
    collapse_scan, conjecture_audit, find_zeros, juddian_scan, linspace, lowest_chen_zeros,
    CollapseRow, RootFindConfig,
};
use crate::travenec::{self, locate_dip, neighbourhood_max, DEFAULT_TERMS};
use crate::zhang::ZhangG;

/// Pinned tolerances and study grids.
pub mod limits {
    /// Required `Re(rho)` and tolerance for the exponent identity.
    pub const RHO_REAL: f64 = -1.5;
    pub const RHO_TOL: f64 = 1e-9;
    pub const RHO_SAMPLES: usize = 100;
    pub const RHO_SEED: u64 = 0x05ee_d2b0;
    /// Expected critical exponents of the first kind for `gamma = 1` and `gamma = -1`.
    pub const CRITICAL_RHO_PLUS: f64 = -8.0 / 5.0;
    pub const CRITICAL_RHO_MINUS: f64 = 0.0;
    pub const CRITICAL_RHO_TOL: f64 = 1e-12;

    pub const DELTA0_OMEGAS: [f64; 3] = [2.2, 2.5, 3.0];
    pub const DELTA0_N_MAX: usize = 512;
    pub const DELTA0_K_MAX: usize = 10;
    pub const DELTA0_TOL: f64 = 1e-9;

    pub const CROSS_LEVELS: usize = 8;
    pub const CROSS_TOL: f64 = 1e-6;
    pub const DIP_TOL: f64 = 1e-4;
    /// Half-width of the window searched for a dip around each level.
    pub const DIP_WINDOW: f64 = 0.2;

    pub const POLE_COUNT: usize = 6;
    pub const POLE_OFFSETS: [f64; 3] = [1e-9, 1e-8, 1e-7];
    pub const POLE_MAGNITUDE: f64 = 1e6;

    pub const AUDIT_OMEGA: (f64, f64, usize) = (2.1, 4.0, 5);
    pub const AUDIT_DELTA: (f64, f64, usize) = (0.1, 2.0, 4);
    pub const AUDIT_INTERVALS: usize = 6;

    pub const COLLAPSE_DELTA: f64 = 0.7;
    pub const COLLAPSE_OMEGAS: [f64; 4] = [2.5, 2.2, 2.1, 2.05];
    pub const COLLAPSE_LEVELS: usize = 45;
    pub const COLLAPSE_BAND: f64 = 0.10;
    pub const THRESHOLD: f64 = -1.0;

    pub const HUGE: f64 = 1e8;
    pub const REL_DIP: f64 = 1e-6;
    pub const NEIGHBOURHOOD_POINTS: usize = 101;
    pub const Z0_REFERENCE: (f64, f64) = (5.0, 5.0);
    pub const Z0_SET: [(f64, f64); 3] = [(5.0, 5.0), (3.0, 2.0), (0.0, 7.0)];

    pub const JUDDIAN_OMEGA: f64 = 2.5;
    pub const JUDDIAN_POLES: [usize; 2] = [1, 2];
    pub const JUDDIAN_DELTA: (f64, f64, usize) = (0.05, 3.0, 60);
    pub const JUDDIAN_TOL: f64 = 1e-5;
}

use limits::*;

/// Outcome of one check.
#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub id: u8,
    pub name: &'static str,
    pub passed: bool,
    pub findings: Vec<String>,
}

impl Check {
    fn new(id: u8, name: &'static str) -> Self {
        Self {
            id,
            name,
            passed: true,
            findings: Vec::new(),
        }
    }

    fn require(&mut self, ok: bool, finding: String) {
        if !ok {
            self.passed = false;
        }
        self.findings
            .push(format!("[{}] {finding}", if ok { "ok" } else { "FAIL" }));
    }

    fn note(&mut self, finding: String) {
        self.findings.push(format!("[note] {finding}"));
    }

    fn fail_with(id: u8, name: &'static str, err: impl std::fmt::Display) -> Self {
        let mut c = Self::new(id, name);
        c.require(false, format!("error: {err}"));
        c
    }
}

fn e(x: f64) -> String {
    format!("{:.6e}", x + 0.0)
}

/// `(omega, E, exponent index)` samples for the exponent identity.
pub fn exponent_samples(seed: u64, n: usize) -> Vec<(f64, f64, usize)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|_| {
            let omega = rng.random_range(f64::EPSILON..2.0);
            let energy = rng.random_range(-50.0..=50.0);
            let j = rng.random_range(0..4usize);
            (omega, energy, j)
        })
        .collect()
}

/// Exponent of the first kind below the critical frequency and at it.
pub fn check_exponents() -> Check {
    let mut c = Check::new(1, "exponent identity");
    let mut worst: f64 = 0.0;
    let mut per_exponent = [0.0f64; 4];
    let mut failures = 0;
    for (omega, energy, j) in exponent_samples(RHO_SEED, RHO_SAMPLES) {
        let gamma = characteristic_exponents(omega)[j];
        match exponent_rho(gamma, omega, energy) {
            Ok(rho) => {
                let dev = (rho.re - RHO_REAL).abs();
                worst = worst.max(dev);
                per_exponent[j] = rho.re;
                if dev > RHO_TOL {
                    failures += 1;
                }
            }
            Err(err) => {
                failures += 1;
                c.note(format!("omega = {} gives {err}", e(omega)));
            }
        }
    }
    c.require(
        failures == 0,
        format!(
            "Re(rho) = {} within {} on {RHO_SAMPLES} samples: {failures} outside, max deviation {}",
            e(RHO_REAL),
            e(RHO_TOL),
            e(worst)
        ),
    );
    c.note(format!(
        "sampled Re(rho) by exponent index: g1 {}, g2 {}, g3 {}, g4 {}",
        e(per_exponent[0]),
        e(per_exponent[1]),
        e(per_exponent[2]),
        e(per_exponent[3])
    ));
    for (gamma, expected) in [
        (CriticalExponent::Plus, CRITICAL_RHO_PLUS),
        (CriticalExponent::Minus, CRITICAL_RHO_MINUS),
    ] {
        let rho = critical_rho(gamma, 0.0);
        c.require(
            (rho - expected).abs() <= CRITICAL_RHO_TOL,
            format!(
                "critical rho(gamma = {}) = {} (expected {})",
                gamma.gamma(),
                e(rho),
                e(expected)
            ),
        );
    }
    c
}

/// Uncoupled-qubit spectrum from a fixed truncation against the closed form.
pub fn check_delta0() -> Check {
    let mut c = Check::new(2, "delta = 0 oracle");
    for omega in DELTA0_OMEGAS {
        let run = || -> Result<(f64, bool)> {
            let p = ModelParams::new(omega, 0.0)?;
            let even = lowest_eigenvalues(
                &sector_block(&p, SymmetrySector::EVEN_PLUS, DELTA0_N_MAX),
                DELTA0_K_MAX / 2 + 1,
            );
            let odd = lowest_eigenvalues(
                &sector_block(&p, SymmetrySector::ODD_PLUS, DELTA0_N_MAX),
                DELTA0_K_MAX.div_ceil(2),
            );
            let mut worst: f64 = 0.0;
            let mut exact_on_grid = true;
            for k in 0..=DELTA0_K_MAX {
                let level = if k % 2 == 0 { even[k / 2] } else { odd[k / 2] };
                let exact = delta0_exact(omega, k)?;
                worst = worst.max((level - exact).abs());
                if k % 2 == 0 {
                    exact_on_grid &= exact.to_bits() == pole_energy(omega, k / 2)?.to_bits();
                }
            }
            Ok((worst, exact_on_grid))
        };
        match run() {
            Ok((worst, on_grid)) => {
                c.require(
                    worst <= DELTA0_TOL,
                    format!(
                        "omega = {}: max |E_k - closed form| for k <= {DELTA0_K_MAX} at n_max = {DELTA0_N_MAX}: {}",
                        e(omega),
                        e(worst)
                    ),
                );
                c.require(
                    on_grid,
                    format!("omega = {}: E_2m identical to the pole grid", e(omega)),
                );
            }
            Err(err) => c.require(false, format!("omega = {}: {err}", e(omega))),
        }
    }
    c
}

fn zhang_zeros(params: &ModelParams, sector: SymmetrySector, e_max: f64) -> Result<Vec<f64>> {
    let g = ZhangG::new(*params, sector)?;
    let config = RootFindConfig::for_params(params, e_max)?;
    Ok(find_zeros(&g, params.omega(), &config)?
        .zeros
        .iter()
        .map(|z| z.energy)
        .collect())
}

fn z0(c: (f64, f64)) -> Complex64 {
    Complex64::new(c.0, c.1)
}

fn dips(params: &ModelParams, point: Complex64, levels: &[f64]) -> Result<Vec<travenec::Dip>> {
    levels
        .iter()
        .map(|&l| locate_dip(params, point, DEFAULT_TERMS, l, DIP_WINDOW))
        .collect()
}

/// Lowest `(even, +)` zeros of both series backends, the oracle levels and the
/// forward-recursion dips.
pub fn check_cross_backend(params: &ModelParams) -> Check {
    let mut c = Check::new(3, "cross-backend zero agreement");
    let run = |c: &mut Check| -> Result<()> {
        let oracle = oracle::eigenvalues(
            params,
            SymmetrySector::EVEN_PLUS,
            LevelSelection::Lowest(CROSS_LEVELS),
            1e-12,
        )?;
        let chen: Vec<f64> = lowest_chen_zeros(params, Phase::Plus, CROSS_LEVELS)?
            .iter()
            .map(|z| z.energy)
            .collect();
        let e_max = oracle.energies.last().copied().unwrap_or(0.0) + 1.0;
        let zhang = zhang_zeros(params, SymmetrySector::EVEN_PLUS, e_max)?;
        c.require(
            chen.len() == CROSS_LEVELS && zhang.len() >= CROSS_LEVELS,
            format!(
                "zero counts: chen {}, zhang {}, oracle {}",
                chen.len(),
                zhang.len(),
                oracle.energies.len()
            ),
        );
        let mut worst: f64 = 0.0;
        for k in 0..CROSS_LEVELS.min(chen.len()).min(zhang.len()) {
            let o = oracle.energies[k];
            let d = (chen[k] - o)
                .abs()
                .max((zhang[k] - o).abs())
                .max((chen[k] - zhang[k]).abs());
            worst = worst.max(d);
            c.note(format!(
                "level {k}: oracle {} chen {} zhang {}",
                e(o),
                e(chen[k] - o),
                e(zhang[k] - o)
            ));
        }
        c.require(
            worst <= CROSS_TOL,
            format!(
                "max mutual difference {} (tolerance {})",
                e(worst),
                e(CROSS_TOL)
            ),
        );
        let found = dips(params, z0(Z0_REFERENCE), &oracle.energies)?;
        let mut worst_dip: f64 = 0.0;
        for (k, (d, o)) in found.iter().zip(&oracle.energies).enumerate() {
            let off = d.energy - o;
            worst_dip = worst_dip.max(off.abs());
            c.note(format!("forward-recursion dip {k}: offset {}", e(off)));
        }
        c.require(
            worst_dip <= DIP_TOL,
            format!(
                "forward-recursion dips (z0 = {}+{}i) within {}: max offset {}",
                Z0_REFERENCE.0,
                Z0_REFERENCE.1,
                e(DIP_TOL),
                e(worst_dip)
            ),
        );
        Ok(())
    };
    if let Err(err) = run(&mut c) {
        return Check::fail_with(3, "cross-backend zero agreement", err);
    }
    c
}

/// Sign flips and divergence of the squeezed-frame function at its first poles.
pub fn check_poles(params: &ModelParams) -> Check {
    let mut c = Check::new(4, "pole structure");
    for m in 0..POLE_COUNT {
        let run = || -> Result<(f64, bool, f64)> {
            let pole = pole_energy(params.omega(), m)?;
            let mut biggest: f64 = 0.0;
            let mut flips = true;
            for h in POLE_OFFSETS {
                let lo = g_chen(params, pole - h, Phase::Plus)?.value;
                let hi = g_chen(params, pole + h, Phase::Plus)?.value;
                flips &= lo.signum() != hi.signum();
                biggest = biggest.max(lo.abs()).max(hi.abs());
            }
            Ok((pole, flips, biggest))
        };
        match run() {
            Ok((pole, flips, biggest)) => c.require(
                flips && biggest > POLE_MAGNITUDE,
                format!(
                    "E^({m}) = {}: sign flip {flips}, max |G| within {} = {}",
                    e(pole),
                    e(POLE_OFFSETS[POLE_OFFSETS.len() - 1]),
                    e(biggest)
                ),
            ),
            Err(err) => c.require(false, format!("E^({m}): {err}")),
        }
    }
    c
}

/// Zero counts between adjacent poles over the audit grid. Violations are
/// findings, not failures.
pub fn check_audit() -> Check {
    let mut c = Check::new(5, "zeros per inter-pole interval");
    let omegas = linspace(AUDIT_OMEGA.0, AUDIT_OMEGA.1, AUDIT_OMEGA.2);
    let deltas = linspace(AUDIT_DELTA.0, AUDIT_DELTA.1, AUDIT_DELTA.2);
    match conjecture_audit(&omegas, &deltas, AUDIT_INTERVALS) {
        Ok(points) => {
            let mut violations = 0;
            for p in &points {
                let total: usize = p.counts.iter().sum();
                let v = p.violations();
                violations += v.len();
                let counts: Vec<String> = p.counts.iter().map(|n| n.to_string()).collect();
                c.note(format!(
                    "omega {} delta {}: counts [{}], oracle levels {}, unresolved {}{}",
                    e(p.omega),
                    e(p.delta),
                    counts.join(" "),
                    p.oracle_total,
                    p.unresolved,
                    if total == p.oracle_total {
                        ""
                    } else {
                        " (count differs from oracle)"
                    }
                ));
            }
            c.note(format!(
                "{} grid points, {violations} intervals with more than two zeros",
                points.len()
            ));
            c.require(
                true,
                format!("audit completed over {} points", points.len()),
            );
        }
        Err(err) => c.require(false, format!("audit failed: {err}")),
    }
    c
}

/// Spacing statistics as `omega -> 2`.
pub fn check_collapse() -> Check {
    let mut c = Check::new(6, "approach to the critical frequency");
    let rows = collapse_scan(COLLAPSE_DELTA, &COLLAPSE_OMEGAS, COLLAPSE_LEVELS);
    for row in &rows {
        collapse_row_findings(&mut c, row);
    }
    let mut sorted: Vec<&CollapseRow> = rows.iter().collect();
    sorted.sort_by(|a, b| b.omega.total_cmp(&a.omega));
    let distances: Vec<f64> = sorted
        .iter()
        .map(|r| (r.threshold_estimate - THRESHOLD).abs())
        .collect();
    let trending = distances.windows(2).all(|w| w[1] < w[0]);
    c.require(
        trending,
        format!(
            "lowest level approaches {} as omega decreases: distances {}",
            e(THRESHOLD),
            distances
                .iter()
                .map(|d| e(*d))
                .collect::<Vec<_>>()
                .join(" ")
        ),
    );
    c
}

fn collapse_row_findings(c: &mut Check, row: &CollapseRow) {
    if let Some(err) = &row.error {
        c.require(false, format!("omega {}: {err}", e(row.omega)));
        return;
    }
    let tail =
        &row.spacing_ratios[crate::solver::COLLAPSE_FIRST_SPACING.min(row.spacing_ratios.len())..];
    let worst = tail.iter().map(|r| (r - 1.0).abs()).fold(0.0, f64::max);
    c.require(
        !tail.is_empty() && worst <= COLLAPSE_BAND,
        format!(
            "omega {}: spacings 5..{} within {} of the pole gap {}: max deviation {}",
            e(row.omega),
            row.spacing_ratios.len(),
            e(COLLAPSE_BAND),
            e(row.pole_gap),
            e(worst)
        ),
    );
    let blocks = row.block_deviations();
    let monotone = blocks.len() >= 2 && blocks.windows(2).all(|w| w[1] <= w[0]);
    c.require(
        monotone,
        format!(
            "omega {}: block maxima of |ratio - 1| non-increasing: {}",
            e(row.omega),
            blocks.iter().map(|b| e(*b)).collect::<Vec<_>>().join(" ")
        ),
    );
    c.note(format!(
        "omega {}: mean spacing {}, lowest level {}, solver-oracle {}",
        e(row.omega),
        e(row.mean_spacing),
        e(row.threshold_estimate),
        e(row.oracle_max_delta)
    ));
}

/// Off-spectrum magnitude, dip contrast and `z0` independence of the forward recursion.
pub fn check_travenec(params: &ModelParams) -> Check {
    let mut c = Check::new(7, "forward-recursion instability");
    let run = |c: &mut Check| -> Result<()> {
        let levels = oracle::eigenvalues(
            params,
            SymmetrySector::EVEN_PLUS,
            LevelSelection::Lowest(CROSS_LEVELS),
            1e-12,
        )?
        .energies;
        let reference = z0(Z0_REFERENCE);
        let mids: Vec<f64> = levels.windows(2).map(|w| 0.5 * (w[0] + w[1])).collect();
        let mut smallest_off = f64::INFINITY;
        for &m in &mids {
            smallest_off = smallest_off.min(
                travenec::g_travenec(params, m, reference, DEFAULT_TERMS)?
                    .value
                    .norm(),
            );
        }
        c.require(
            smallest_off > HUGE,
            format!(
                "smallest |G_T| midway between levels: {} (> {})",
                e(smallest_off),
                e(HUGE)
            ),
        );
        let found = dips(params, reference, &levels)?;
        let mut worst_rel: f64 = 0.0;
        for (k, d) in found.iter().enumerate() {
            let lo = if k == 0 {
                levels[0] - (levels[1] - levels[0])
            } else {
                levels[k - 1]
            };
            let hi = if k + 1 < levels.len() {
                levels[k + 1]
            } else {
                levels[k] + (levels[k] - levels[k - 1])
            };
            let max = neighbourhood_max(
                params,
                reference,
                DEFAULT_TERMS,
                0.5 * (lo + levels[k]),
                0.5 * (levels[k] + hi),
                NEIGHBOURHOOD_POINTS,
            )?;
            let rel = d.magnitude / max;
            worst_rel = worst_rel.max(rel);
            c.note(format!(
                "level {k}: relative dip {}, neighbourhood max {}",
                e(rel),
                e(max)
            ));
        }
        c.require(
            worst_rel < REL_DIP,
            format!("largest relative dip {} (< {})", e(worst_rel), e(REL_DIP)),
        );
        let per_z0: Vec<Vec<travenec::Dip>> = Z0_SET
            .iter()
            .map(|&p| dips(params, z0(p), &levels))
            .collect::<Result<_>>()?;
        let mut worst_spread: f64 = 0.0;
        for k in 0..levels.len() {
            let pos: Vec<f64> = per_z0.iter().map(|d| d[k].energy).collect();
            let spread = pos.iter().cloned().fold(f64::NEG_INFINITY, f64::max)
                - pos.iter().cloned().fold(f64::INFINITY, f64::min);
            worst_spread = worst_spread.max(spread);
            c.note(format!("level {k}: dip spread over z0 {}", e(spread)));
        }
        c.require(
            worst_spread <= DIP_TOL,
            format!(
                "dip positions independent of z0 within {}: max spread {}",
                e(DIP_TOL),
                e(worst_spread)
            ),
        );
        let shift =
            travenec::dip_sentinel(params, reference, DEFAULT_TERMS, &levels[..2], DIP_WINDOW)?;
        c.note(format!(
            "dip shift from {} to {} terms: {}",
            DEFAULT_TERMS,
            2 * DEFAULT_TERMS,
            e(shift)
        ));
        Ok(())
    };
    if let Err(err) = run(&mut c) {
        return Check::fail_with(7, "forward-recursion instability", err);
    }
    c
}

/// Lifted poles located by a `delta` scan, confirmed as doubly degenerate by the oracle.
pub fn check_exceptional() -> Check {
    let mut c = Check::new(8, "exceptional (lifted-pole) detection");
    let deltas = linspace(JUDDIAN_DELTA.0, JUDDIAN_DELTA.1, JUDDIAN_DELTA.2);
    let mut confirmed = 0;
    for m in JUDDIAN_POLES {
        match juddian_scan(JUDDIAN_OMEGA, m, &deltas) {
            Ok(points) => {
                for p in points {
                    let sectors = ModelParams::new(JUDDIAN_OMEGA, p.delta)
                        .and_then(|params| oracle::sectors_at(&params, p.energy, JUDDIAN_TOL));
                    let degenerate = matches!(&sectors, Ok(s) if s.contains(&SymmetrySector::EVEN_PLUS) && s.contains(&SymmetrySector::EVEN_MINUS));
                    if degenerate {
                        confirmed += 1;
                    }
                    c.note(format!(
                        "E^({m}) = {} lifted at delta = {:.12e}: oracle sectors {}",
                        e(p.energy),
                        p.delta,
                        match &sectors {
                            Ok(s) => s.iter().map(|x| x.label()).collect::<Vec<_>>().join(" "),
                            Err(err) => err.to_string(),
                        }
                    ));
                }
            }
            Err(err) => c.note(format!("scan of E^({m}) failed: {err}")),
        }
    }
    c.require(
        confirmed > 0,
        format!(
            "{confirmed} lifted poles confirmed doubly degenerate within {}",
            e(JUDDIAN_TOL)
        ),
    );
    c
}

/// Full report for one parameter pair.
#[derive(Debug, Clone, PartialEq)]
pub struct ValidationReport {
    pub omega: f64,
    pub delta: f64,
    pub checks: Vec<Check>,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

/// Runs every check; the parameter-bound ones use `params`.
pub fn run_validation(params: &ModelParams) -> Result<ValidationReport> {
    params.require_pure_point()?;
    ChenG::new(*params, Phase::Plus)?;
    let checks = vec![
        check_exponents(),
        check_delta0(),
        check_cross_backend(params),
        check_poles(params),
        check_audit(),
        check_collapse(),
        check_travenec(params),
        check_exceptional(),
    ];
    Ok(ValidationReport {
        omega: params.omega(),
        delta: params.delta(),
        checks,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn samples_are_reproducible() {
        assert_eq!(exponent_samples(7, 20), exponent_samples(7, 20));
        assert!(exponent_samples(7, 100)
            .iter()
            .all(|(w, e, j)| *w > 0.0 && *w < 2.0 && e.abs() <= 50.0 && *j < 4));
    }

    #[test]
    fn delta0_check_passes() {
        let c = check_delta0();
        assert!(c.passed, "{:?}", c.findings);
    }

    #[test]
    fn pole_check_passes_at_reference_parameters() {
        let c = check_poles(&ModelParams::new(2.5, 0.7).unwrap());
        assert!(c.passed, "{:?}", c.findings);
    }
}
