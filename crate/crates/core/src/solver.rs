//! Pole-aware bracketing and Brent polishing over any [`GFunction`], plus the
//! studies built on top of it: spectrum assembly, the zeros-per-interval
//! audit, the approach to the critical frequency, and the search for lifted poles.

use rayon::prelude::*;

use crate::chen::{residue_probe_phase, ChenG, PoleKind};
use crate::error::{Error, Result};
use crate::eval::GFunction;
use crate::model::{
    interval_index, pole_energy_unchecked, require_pure_point, squeezed_frequency, ModelParams,
    Parity, Phase, SymmetrySector,
};
use crate::oracle::{self, LevelSelection, SpectrumReport};
use crate::zhang::ZhangG;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RootFindConfig {
    pub grid_points_per_interval: usize,
    /// Absolute tolerance of the Brent iteration.
    pub brent_tol: f64,
    /// Half-width of the excluded window around each known pole, as a fraction of the pole gap.
    pub pole_exclusion: f64,
    /// Final-bracket magnitude above which a sign change is treated as a pole crossing.
    pub pole_flank: f64,
    /// Levels of grid subdivision tried around same-sign minima of `|G|`.
    pub refine_depth: usize,
    pub e_min: f64,
    pub e_max: f64,
}

impl RootFindConfig {
    /// Defaults for a window `[e_min, e_max]`.
    pub fn new(e_min: f64, e_max: f64) -> Self {
        Self {
            grid_points_per_interval: 64,
            brent_tol: 1e-11,
            pole_exclusion: 1e-6,
            pole_flank: 1e3,
            refine_depth: 3,
            e_min,
            e_max,
        }
    }

    /// Window from just below the lowest possible level up to `e_max`.
    ///
    /// Every level lies above `E^(0) - |delta|`: the uncoupled spectrum starts at
    /// `E^(0)` and the `delta sigma_x` term has norm `|delta|`.
    pub fn for_params(params: &ModelParams, e_max: f64) -> Result<Self> {
        Ok(Self::new(default_e_min(params)?, e_max))
    }

    pub fn validate(&self) -> Result<()> {
        let positive = [self.brent_tol, self.pole_exclusion, self.pole_flank];
        if positive.iter().any(|x| x.is_nan() || *x <= 0.0) || self.grid_points_per_interval < 2 {
            return Err(Error::InvalidParameter(
                "tolerances must be positive and the grid needs at least 2 points per interval"
                    .into(),
            ));
        }
        if self.e_min.partial_cmp(&self.e_max) != Some(std::cmp::Ordering::Less) {
            return Err(Error::InvalidParameter(format!(
                "empty energy window [{}, {}]",
                self.e_min, self.e_max
            )));
        }
        Ok(())
    }
}

pub fn default_e_min(params: &ModelParams) -> Result<f64> {
    params.require_pure_point()?;
    let gap = 2.0 * squeezed_frequency(params.omega());
    Ok(pole_energy_unchecked(params.omega(), 0) - params.delta().abs() - 0.1 * gap - 1e-3)
}

/// A polished zero.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Zero {
    pub energy: f64,
    /// 0 below `E^(0)`, `m + 1` for `(E^(m), E^(m+1))`.
    pub interval: usize,
    pub value: f64,
    /// Larger `|G|` of the two grid samples that bracketed the zero.
    pub scale: f64,
    pub bracket: (f64, f64),
}

/// Zero count of one pole-grid interval.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct IntervalCount {
    pub interval: usize,
    pub count: usize,
    /// False when the window cuts the interval.
    pub complete: bool,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct ZeroSearch {
    pub zeros: Vec<Zero>,
    pub pole_crossings: Vec<f64>,
    /// Windows where `|G|` dips without a sign change; two close roots may hide there.
    pub unresolved: Vec<(f64, f64)>,
    pub interval_counts: Vec<IntervalCount>,
}

/// Brent's method on a sign-changing bracket. Returns the best estimate and the
/// final bracket.
pub fn brent<F>(
    mut f: F,
    lo: f64,
    hi: f64,
    f_lo: f64,
    f_hi: f64,
    tol: f64,
) -> Result<(f64, f64, f64)>
where
    F: FnMut(f64) -> Result<f64>,
{
    if f_lo == 0.0 {
        return Ok((lo, lo, lo));
    }
    if f_hi == 0.0 {
        return Ok((hi, hi, hi));
    }
    if f_lo.signum() == f_hi.signum() {
        return Err(Error::NoBracket { lo, hi });
    }
    let (mut a, mut b, mut fa, mut fb) = (lo, hi, f_lo, f_hi);
    let (mut c, mut fc) = (b, fb);
    let mut d = b - a;
    let mut e = d;
    for _ in 0..200 {
        if (fb > 0.0) == (fc > 0.0) {
            c = a;
            fc = fa;
            d = b - a;
            e = d;
        }
        if fc.abs() < fb.abs() {
            a = b;
            b = c;
            c = a;
            fa = fb;
            fb = fc;
            fc = fa;
        }
        let tol1 = 2.0 * f64::EPSILON * b.abs() + 0.5 * tol;
        let xm = 0.5 * (c - b);
        if xm.abs() <= tol1 || fb == 0.0 {
            return Ok((b, b.min(c), b.max(c)));
        }
        if e.abs() >= tol1 && fa.abs() > fb.abs() {
            let s = fb / fa;
            let (mut p, mut q);
            if a == c {
                p = 2.0 * xm * s;
                q = 1.0 - s;
            } else {
                let qa = fa / fc;
                let r = fb / fc;
                p = s * (2.0 * xm * qa * (qa - r) - (b - a) * (r - 1.0));
                q = (qa - 1.0) * (r - 1.0) * (s - 1.0);
            }
            if p > 0.0 {
                q = -q;
            }
            p = p.abs();
            let min1 = 3.0 * xm * q - (tol1 * q).abs();
            let min2 = (e * q).abs();
            if 2.0 * p < min1.min(min2) {
                e = d;
                d = p / q;
            } else {
                d = xm;
                e = d;
            }
        } else {
            d = xm;
            e = d;
        }
        a = b;
        fa = fb;
        b += if d.abs() > tol1 { d } else { tol1.copysign(xm) };
        fb = f(b)?;
    }
    Err(Error::NotConverged {
        what: "Brent iteration",
        detail: format!("bracket [{lo}, {hi}]"),
    })
}

struct Segment {
    index: usize,
    lo: f64,
    hi: f64,
    complete: bool,
}

fn segments(omega: f64, backend_poles: bool, config: &RootFindConfig) -> Vec<Segment> {
    let gap = 2.0 * squeezed_frequency(omega);
    let window = config.pole_exclusion * gap;
    let first = interval_index(omega, config.e_min);
    let last = interval_index(omega, config.e_max);
    let mut out = Vec::new();
    for index in first..=last {
        let left_pole = (index > 0).then(|| pole_energy_unchecked(omega, index - 1));
        let right_pole = pole_energy_unchecked(omega, index);
        let mut lo = left_pole.unwrap_or(config.e_min);
        let mut hi = right_pole;
        let mut complete = left_pole.is_some() && lo >= config.e_min && hi <= config.e_max;
        if index == 0 {
            complete = config.e_min < right_pole && hi <= config.e_max;
        }
        if backend_poles {
            if left_pole.is_some() {
                lo += window;
            }
            hi -= window;
        }
        lo = lo.max(config.e_min);
        hi = hi.min(config.e_max);
        if lo < hi {
            out.push(Segment {
                index,
                lo,
                hi,
                complete,
            });
        }
    }
    out
}

#[derive(Default)]
struct SegmentResult {
    zeros: Vec<Zero>,
    pole_crossings: Vec<f64>,
    unresolved: Vec<(f64, f64)>,
}

fn polish(
    g: &dyn GFunction,
    seg: &Segment,
    (x0, f0): (f64, f64),
    (x1, f1): (f64, f64),
    config: &RootFindConfig,
    out: &mut SegmentResult,
) -> Result<()> {
    let eval = |x: f64| g.evaluate(x).map(|v| v.value);
    let (root, a, b) = brent(eval, x0, x1, f0, f1, config.brent_tol)?;
    let fa = g.evaluate(a)?.value.abs();
    let fb = g.evaluate(b)?.value.abs();
    if fa.min(fb) > config.pole_flank {
        out.pole_crossings.push(root);
        return Ok(());
    }
    out.zeros.push(Zero {
        energy: root,
        interval: seg.index,
        value: g.evaluate(root)?.value,
        scale: f0.abs().max(f1.abs()),
        bracket: (a, b),
    });
    Ok(())
}

fn sample(g: &dyn GFunction, lo: f64, hi: f64, points: usize) -> Result<Vec<(f64, f64)>> {
    (0..points)
        .map(|k| {
            let x = if k + 1 == points {
                hi
            } else {
                lo + (hi - lo) * k as f64 / (points - 1) as f64
            };
            Ok((x, g.evaluate(x)?.value))
        })
        .collect()
}

fn scan_samples(
    g: &dyn GFunction,
    seg: &Segment,
    samples: &[(f64, f64)],
    depth: usize,
    config: &RootFindConfig,
    out: &mut SegmentResult,
) -> Result<()> {
    for i in 0..samples.len() - 1 {
        let (x0, f0) = samples[i];
        let (x1, f1) = samples[i + 1];
        if f0 == 0.0 {
            out.zeros.push(Zero {
                energy: x0,
                interval: seg.index,
                value: 0.0,
                scale: f1.abs(),
                bracket: (x0, x0),
            });
            continue;
        }
        if f0.is_finite() && f1.is_finite() && f0.signum() != f1.signum() && f1 != 0.0 {
            polish(g, seg, (x0, f0), (x1, f1), config, out)?;
        }
    }
    // Same-sign extrema of |G| may hide two nearby roots (a dip) or a root
    // next to a pole (a peak).
    for i in 1..samples.len() - 1 {
        let (fl, fc, fr) = (samples[i - 1].1, samples[i].1, samples[i + 1].1);
        let same = fl.signum() == fc.signum() && fc.signum() == fr.signum();
        let dip = fc.abs() < fl.abs() && fc.abs() < fr.abs();
        let peak = fc.abs() > fl.abs() && fc.abs() > fr.abs();
        if same && (dip || peak) {
            let (lo, hi) = (samples[i - 1].0, samples[i + 1].0);
            if depth == 0 {
                if dip && fc.abs() < 1e-3 * fl.abs().min(fr.abs()) {
                    out.unresolved.push((lo, hi));
                }
                continue;
            }
            let fine = sample(g, lo, hi, 17)?;
            scan_samples(g, seg, &fine, depth - 1, config, out)?;
        }
    }
    Ok(())
}

fn search_segment(
    g: &dyn GFunction,
    seg: &Segment,
    config: &RootFindConfig,
) -> Result<SegmentResult> {
    let samples = sample(g, seg.lo, seg.hi, config.grid_points_per_interval)?;
    let mut out = SegmentResult::default();
    scan_samples(g, seg, &samples, config.refine_depth, config, &mut out)?;
    out.zeros.sort_by(|a, b| a.energy.total_cmp(&b.energy));
    // Refinement can rediscover a root already bracketed on the coarse grid.
    out.zeros
        .dedup_by(|b, a| (b.energy - a.energy).abs() <= 4.0 * config.brent_tol);
    out.pole_crossings.sort_by(f64::total_cmp);
    out.pole_crossings
        .dedup_by(|b, a| (*b - *a).abs() <= 4.0 * config.brent_tol);
    Ok(out)
}

/// All zeros of `g` in the configured window.
///
/// The window is cut at the pole grid of the frequency; for a backend with
/// known poles each cut is widened by the exclusion window, otherwise the grid
/// only sets the sampling density.
pub fn find_zeros(g: &dyn GFunction, omega: f64, config: &RootFindConfig) -> Result<ZeroSearch> {
    require_pure_point(omega)?;
    config.validate()?;
    let segs = segments(omega, g.has_known_poles(), config);
    let results: Vec<Result<SegmentResult>> = segs
        .par_iter()
        .map(|s| search_segment(g, s, config))
        .collect();
    let mut search = ZeroSearch::default();
    for (seg, res) in segs.iter().zip(results) {
        let res = res?;
        search.interval_counts.push(IntervalCount {
            interval: seg.index,
            count: res.zeros.len(),
            complete: seg.complete,
        });
        search.zeros.extend(res.zeros);
        search.pole_crossings.extend(res.pole_crossings);
        search.unresolved.extend(res.unresolved);
    }
    Ok(search)
}

/// Production backends.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Backend {
    Chen,
    Zhang,
}

impl Backend {
    /// Boxed G-function for a sector. The squeezed-frame function covers even sectors only.
    pub fn build(self, params: &ModelParams, sector: SymmetrySector) -> Result<Box<dyn GFunction>> {
        match self {
            Backend::Chen => {
                if sector.parity != Parity::Even {
                    return Err(Error::InvalidParameter(
                        "the squeezed-frame G-function covers even sectors only".into(),
                    ));
                }
                Ok(Box::new(ChenG::new(*params, sector.phase)?))
            }
            Backend::Zhang => Ok(Box::new(ZhangG::new(*params, sector)?)),
        }
    }

    /// Chen where available, otherwise the continued fraction.
    pub fn preferred(params: &ModelParams, sector: SymmetrySector) -> Self {
        if sector.parity == Parity::Even && params.delta() != 0.0 {
            Backend::Chen
        } else {
            Backend::Zhang
        }
    }
}

/// Largest allowed distance between a solver zero and an oracle level.
pub const ORACLE_MATCH: f64 = 1e-5;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LevelKind {
    Regular,
    /// Lifted pole: an eigenvalue sitting on the pole grid.
    ExceptionalCandidate,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Level {
    pub energy: f64,
    pub interval: usize,
    pub kind: LevelKind,
    /// Signed distance to the nearest oracle level.
    pub oracle_delta: Option<f64>,
    pub suspect: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AssembledSpectrum {
    pub omega: f64,
    pub delta: f64,
    pub sector: SymmetrySector,
    pub backend: Backend,
    pub e_max: f64,
    pub levels: Vec<Level>,
    pub interval_counts: Vec<IntervalCount>,
    pub unresolved: Vec<(f64, f64)>,
    pub oracle: SpectrumReport,
}

fn nearest(sorted: &[f64], x: f64) -> Option<f64> {
    let i = sorted.partition_point(|e| *e < x);
    let mut best: Option<f64> = None;
    for j in [i.wrapping_sub(1), i] {
        if let Some(e) = sorted.get(j) {
            let d = x - e;
            if best.is_none_or(|b| d.abs() < b.abs()) {
                best = Some(d);
            }
        }
    }
    best
}

/// Regular zeros, lifted-pole candidates and oracle deltas for one sector below `e_max`.
pub fn assemble_spectrum(
    params: &ModelParams,
    sector: SymmetrySector,
    e_max: f64,
) -> Result<AssembledSpectrum> {
    assemble_spectrum_with(params, sector, e_max, Backend::preferred(params, sector))
}

/// [`assemble_spectrum`] with an explicit backend.
pub fn assemble_spectrum_with(
    params: &ModelParams,
    sector: SymmetrySector,
    e_max: f64,
    backend: Backend,
) -> Result<AssembledSpectrum> {
    params.require_pure_point()?;
    let g = backend.build(params, sector)?;
    let config = RootFindConfig::for_params(params, e_max)?;
    let search = find_zeros(g.as_ref(), params.omega(), &config)?;
    let oracle = oracle::eigenvalues(params, sector, LevelSelection::Below(e_max + 1.0), 1e-10)?;

    let mut levels: Vec<Level> = search
        .zeros
        .iter()
        .map(|z| Level {
            energy: z.energy,
            interval: z.interval,
            kind: LevelKind::Regular,
            oracle_delta: None,
            suspect: false,
        })
        .collect();

    if backend == Backend::Chen {
        let omega = params.omega();
        for m in 0.. {
            let e = pole_energy_unchecked(omega, m);
            if e > e_max {
                break;
            }
            let probe = residue_probe_phase(params, m, sector.phase)?;
            if probe.kind == PoleKind::Lifted {
                levels.push(Level {
                    energy: e,
                    interval: m + 1,
                    kind: LevelKind::ExceptionalCandidate,
                    oracle_delta: None,
                    suspect: false,
                });
            }
        }
    }
    levels.sort_by(|a, b| a.energy.total_cmp(&b.energy));
    for level in &mut levels {
        level.oracle_delta = nearest(&oracle.energies, level.energy);
        level.suspect = level.oracle_delta.is_none_or(|d| d.abs() > ORACLE_MATCH);
    }
    let mut oracle = oracle;
    oracle.interval_counts = search.interval_counts.iter().map(|c| c.count).collect();
    Ok(AssembledSpectrum {
        omega: params.omega(),
        delta: params.delta(),
        sector,
        backend,
        e_max,
        levels,
        interval_counts: search.interval_counts,
        unresolved: search.unresolved,
        oracle,
    })
}

/// Lowest `count` zeros of the `(even, phase)` squeezed-frame function.
pub fn lowest_chen_zeros(params: &ModelParams, phase: Phase, count: usize) -> Result<Vec<Zero>> {
    let g = ChenG::new(*params, phase)?;
    let omega = params.omega();
    // Zeros per interval average one; leave a margin of a few intervals.
    let mut intervals = count + 4;
    loop {
        let e_max = pole_energy_unchecked(omega, intervals);
        let config = RootFindConfig::for_params(params, e_max)?;
        let search = find_zeros(&g, omega, &config)?;
        if search.zeros.len() >= count {
            return Ok(search.zeros[..count].to_vec());
        }
        if intervals > 8 * (count + 4) {
            return Err(Error::NotConverged {
                what: "zero search",
                detail: format!(
                    "found {} of {count} zeros below {e_max}",
                    search.zeros.len()
                ),
            });
        }
        intervals *= 2;
    }
}

/// One frequency of the approach to `omega = 2`.
#[derive(Debug, Clone, PartialEq)]
pub struct CollapseRow {
    pub omega: f64,
    pub levels: Vec<f64>,
    pub mean_spacing: f64,
    pub pole_gap: f64,
    /// Adjacent spacings divided by the pole gap.
    pub spacing_ratios: Vec<f64>,
    /// Lowest level; tends to the threshold `-1` as `omega -> 2`.
    pub threshold_estimate: f64,
    /// Largest solver-oracle level difference.
    pub oracle_max_delta: f64,
    pub error: Option<String>,
}

/// First spacing index included in the collapse statistics (the 5th spacing).
pub const COLLAPSE_FIRST_SPACING: usize = 4;
/// Number of spacings per block of the monotonicity statistic.
pub const COLLAPSE_BLOCK: usize = 10;

impl CollapseRow {
    /// `max |ratio - 1|` over consecutive blocks of spacings starting at the 5th.
    pub fn block_deviations(&self) -> Vec<f64> {
        self.spacing_ratios
            .get(COLLAPSE_FIRST_SPACING..)
            .unwrap_or(&[])
            .chunks_exact(COLLAPSE_BLOCK)
            .map(|c| c.iter().map(|r| (r - 1.0).abs()).fold(0.0, f64::max))
            .collect()
    }
}

fn collapse_row(delta: f64, omega: f64, levels: usize) -> Result<CollapseRow> {
    let params = ModelParams::new(omega, delta)?;
    params.require_pure_point()?;
    let zeros = lowest_chen_zeros(&params, Phase::Plus, levels)?;
    let energies: Vec<f64> = zeros.iter().map(|z| z.energy).collect();
    let oracle = oracle::eigenvalues(
        &params,
        SymmetrySector::EVEN_PLUS,
        LevelSelection::Lowest(levels),
        1e-10,
    )?;
    let oracle_max_delta = energies
        .iter()
        .zip(&oracle.energies)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    let pole_gap = 2.0 * squeezed_frequency(omega);
    let spacing_ratios: Vec<f64> = energies
        .windows(2)
        .map(|w| (w[1] - w[0]) / pole_gap)
        .collect();
    let mean_spacing = if energies.len() > 1 {
        (energies[energies.len() - 1] - energies[0]) / (energies.len() - 1) as f64
    } else {
        f64::NAN
    };
    let error = if !oracle.converged {
        Some(format!(
            "oracle truncation not converged at n_max = {}",
            oracle.n_max
        ))
    } else if oracle_max_delta > ORACLE_MATCH {
        Some(format!("solver and oracle differ by {oracle_max_delta:e}"))
    } else {
        None
    };
    Ok(CollapseRow {
        omega,
        threshold_estimate: energies.first().copied().unwrap_or(f64::NAN),
        levels: energies,
        mean_spacing,
        pole_gap,
        spacing_ratios,
        oracle_max_delta,
        error,
    })
}

/// Spacing statistics of the lowest `levels` `(even, +)` levels for each frequency.
/// A failure at one frequency is recorded in its row and the scan continues.
pub fn collapse_scan(delta: f64, omegas: &[f64], levels: usize) -> Vec<CollapseRow> {
    omegas
        .par_iter()
        .map(|&omega| {
            collapse_row(delta, omega, levels).unwrap_or_else(|e| CollapseRow {
                omega,
                levels: Vec::new(),
                mean_spacing: f64::NAN,
                pole_gap: if omega > 2.0 {
                    2.0 * squeezed_frequency(omega)
                } else {
                    f64::NAN
                },
                spacing_ratios: Vec::new(),
                threshold_estimate: f64::NAN,
                oracle_max_delta: f64::NAN,
                error: Some(e.to_string()),
            })
        })
        .collect()
}

/// Zero counts of the first inter-pole intervals at one grid point.
#[derive(Debug, Clone, PartialEq)]
pub struct AuditPoint {
    pub omega: f64,
    pub delta: f64,
    /// Counts for `(E^(m), E^(m+1))`, `m = 0, 1, ...`.
    pub counts: Vec<usize>,
    /// Number of oracle levels in the same energy range, for comparison.
    pub oracle_total: usize,
    pub unresolved: usize,
}

impl AuditPoint {
    pub fn violations(&self) -> Vec<(usize, usize)> {
        self.counts
            .iter()
            .enumerate()
            .filter(|(_, c)| **c > 2)
            .map(|(m, c)| (m, *c))
            .collect()
    }
}

/// `n` equally spaced values covering `[lo, hi]`.
pub fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![lo],
        _ => (0..n)
            .map(|k| {
                if k + 1 == n {
                    hi
                } else {
                    lo + (hi - lo) * k as f64 / (n - 1) as f64
                }
            })
            .collect(),
    }
}

/// Zero counts in the first `intervals` gaps between adjacent poles of the
/// `(even, +)` function over the grid `omegas x deltas`.
pub fn conjecture_audit(
    omegas: &[f64],
    deltas: &[f64],
    intervals: usize,
) -> Result<Vec<AuditPoint>> {
    let grid: Vec<(f64, f64)> = omegas
        .iter()
        .flat_map(|&w| deltas.iter().map(move |&d| (w, d)))
        .collect();
    grid.par_iter()
        .map(|&(omega, delta)| {
            let params = ModelParams::new(omega, delta)?;
            let g = ChenG::new(params, Phase::Plus)?;
            let lo = pole_energy_unchecked(omega, 0);
            let hi = pole_energy_unchecked(omega, intervals);
            let config = RootFindConfig::new(lo, hi);
            let search = find_zeros(&g, omega, &config)?;
            let counts = (1..=intervals)
                .map(|i| {
                    search
                        .interval_counts
                        .iter()
                        .find(|c| c.interval == i)
                        .map_or(0, |c| c.count)
                })
                .collect();
            let oracle = oracle::eigenvalues(
                &params,
                SymmetrySector::EVEN_PLUS,
                LevelSelection::Below(hi),
                1e-10,
            )?;
            let oracle_total = oracle.energies.iter().filter(|e| **e > lo).count();
            Ok(AuditPoint {
                omega,
                delta,
                counts,
                oracle_total,
                unresolved: search.unresolved.len(),
            })
        })
        .collect()
}

/// A lifted pole found by scanning `delta`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JuddianPoint {
    pub omega: f64,
    pub m: usize,
    pub delta: f64,
    pub energy: f64,
    pub residue_scale: f64,
}

/// Sign changes of the residue at `E^(m)` of the `(even, +)` function along
/// `deltas`, each polished by Brent in `delta`.
pub fn juddian_scan(omega: f64, m: usize, deltas: &[f64]) -> Result<Vec<JuddianPoint>> {
    require_pure_point(omega)?;
    let residue = |d: f64| -> Result<f64> {
        let p = ModelParams::new(omega, d)?;
        Ok(residue_probe_phase(&p, m, Phase::Plus)?.residue())
    };
    let values: Vec<f64> = deltas
        .par_iter()
        .map(|&d| residue(d))
        .collect::<Result<_>>()?;
    let mut out = Vec::new();
    for i in 0..deltas.len().saturating_sub(1) {
        let (f0, f1) = (values[i], values[i + 1]);
        if f0.signum() != f1.signum() && f0 != 0.0 && f1 != 0.0 {
            let (d, _, _) = brent(residue, deltas[i], deltas[i + 1], f0, f1, 1e-13)?;
            let p = ModelParams::new(omega, d)?;
            let probe = residue_probe_phase(&p, m, Phase::Plus)?;
            out.push(JuddianPoint {
                omega,
                m,
                delta: d,
                energy: probe.energy,
                residue_scale: probe.scale,
            });
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    const LEVELS: [f64; 8] = [
        -0.013_862_595_716_794_5,
        2.486_739_941_170_521,
        5.271_590_839_905_922,
        8.412_757_154_536_525,
        11.604_183_099_715_199,
        14.637_355_180_774_819,
        17.472_704_748_327_633,
        20.372_873_373_409_085,
    ];

    fn params() -> ModelParams {
        ModelParams::new(2.5, 0.7).unwrap()
    }

    #[test]
    fn brent_on_cosine() {
        let (x, a, b) = brent(|x| Ok(x.cos()), 1.0, 2.0, 1f64.cos(), 2f64.cos(), 1e-14).unwrap();
        assert_abs_diff_eq!(x, std::f64::consts::FRAC_PI_2, epsilon = 1e-14);
        assert!(a <= x && x <= b && b - a < 1e-13);
        assert!(brent(Ok, 1.0, 2.0, 1.0, 2.0, 1e-12).is_err());
    }

    #[test]
    fn chen_zeros_at_reference_parameters() {
        let g = ChenG::new(params(), Phase::Plus).unwrap();
        let config = RootFindConfig::for_params(&params(), 21.0).unwrap();
        let search = find_zeros(&g, 2.5, &config).unwrap();
        assert_eq!(search.zeros.len(), 8);
        for (z, e) in search.zeros.iter().zip(LEVELS) {
            assert_abs_diff_eq!(z.energy, e, epsilon = 1e-8);
        }
        assert!(search.pole_crossings.is_empty());
        for c in &search.interval_counts {
            assert!(c.count <= 2);
        }
    }

    #[test]
    fn zhang_zeros_skip_its_poles() {
        let g = ZhangG::new(params(), SymmetrySector::EVEN_PLUS).unwrap();
        let config = RootFindConfig::for_params(&params(), 21.0).unwrap();
        let search = find_zeros(&g, 2.5, &config).unwrap();
        assert_eq!(search.zeros.len(), 8);
        for (z, e) in search.zeros.iter().zip(LEVELS) {
            assert_abs_diff_eq!(z.energy, e, epsilon = 1e-8);
        }
        assert!(!search.pole_crossings.is_empty());
    }

    #[test]
    fn empty_window_is_rejected() {
        let g = ChenG::new(params(), Phase::Plus).unwrap();
        assert!(find_zeros(&g, 2.5, &RootFindConfig::new(3.0, 1.0)).is_err());
    }

    #[test]
    fn chen_backend_requires_even_sector() {
        assert!(Backend::Chen
            .build(&params(), SymmetrySector::ODD_PLUS)
            .is_err());
        assert_eq!(
            Backend::preferred(&params(), SymmetrySector::ODD_PLUS),
            Backend::Zhang
        );
    }

    #[test]
    fn assembled_spectrum_matches_oracle() {
        let s = assemble_spectrum(&params(), SymmetrySector::EVEN_MINUS, 12.0).unwrap();
        assert!(!s.levels.is_empty());
        assert!(s
            .levels
            .iter()
            .all(|l| !l.suspect && l.kind == LevelKind::Regular));
        let s = assemble_spectrum(&params(), SymmetrySector::ODD_PLUS, 12.0).unwrap();
        assert_eq!(s.backend, Backend::Zhang);
        assert!(s.levels.iter().all(|l| !l.suspect));
    }

    #[test]
    fn juddian_point_at_unit_delta() {
        let points = juddian_scan(2.5, 1, &linspace(0.5, 1.5, 11)).unwrap();
        assert_eq!(points.len(), 1);
        assert_abs_diff_eq!(points[0].delta, 1.0, epsilon = 1e-8);
        assert_abs_diff_eq!(points[0].energy, 2.5, epsilon = 1e-14);
    }

    #[test]
    fn exceptional_entry_in_assembled_spectrum() {
        let p = ModelParams::new(2.5, 1.0).unwrap();
        let s = assemble_spectrum(&p, SymmetrySector::EVEN_PLUS, 6.0).unwrap();
        let exc: Vec<&Level> = s
            .levels
            .iter()
            .filter(|l| l.kind == LevelKind::ExceptionalCandidate)
            .collect();
        assert_eq!(exc.len(), 1);
        assert_abs_diff_eq!(exc[0].energy, 2.5, epsilon = 1e-14);
        assert!(!exc[0].suspect);
    }

    #[test]
    fn block_deviation_layout() {
        let row = CollapseRow {
            omega: 2.5,
            levels: Vec::new(),
            mean_spacing: 0.0,
            pole_gap: 3.0,
            spacing_ratios: (0..30).map(|k| 1.0 + 0.1 / (k + 1) as f64).collect(),
            threshold_estimate: 0.0,
            oracle_max_delta: 0.0,
            error: None,
        };
        let b = row.block_deviations();
        assert_eq!(b.len(), 2);
        assert_abs_diff_eq!(b[0], 0.1 / 5.0, epsilon = 1e-15);
        assert_abs_diff_eq!(b[1], 0.1 / 15.0, epsilon = 1e-15);
    }

    #[test]
    fn linspace_endpoints() {
        let v = linspace(2.1, 4.0, 5);
        assert_eq!(v.len(), 5);
        assert_eq!(v[0], 2.1);
        assert_eq!(v[4], 4.0);
    }
}
