//! Truncated Fock-space diagonalization, used as ground truth for the G-functions.
//!
//! The spin is written in the `sigma_x` eigenbasis, where `Phi = i^(a^dag a) sigma_x`
//! is diagonal with eigenvalue `i^n s` on `|n, s>`. The coupling
//! `(a^2 + a^dag^2) sigma_z` links `(n, s)` to `(n + 2, -s)` and preserves that
//! label, so each symmetry sector is a chain `n = p, p+2, ...` with alternating
//! spin and its Hamiltonian block is symmetric tridiagonal.

use nalgebra::DMatrix;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::model::{require_pure_point, squeezed_frequency, ModelParams, SymmetrySector};

/// Smallest truncation accepted by the matrix builders.
pub const MIN_N_MAX: usize = 8;
/// First truncation tried by the convergence loop.
pub const START_N_MAX: usize = 128;
/// Largest truncation tried by the convergence loop.
pub const N_MAX_CAP: usize = 4096;
/// Below this frequency reports carry a truncation caveat.
pub const NEAR_CRITICAL_OMEGA: f64 = 2.05;

/// States `|n, s>` of one sector with `n <= n_max`.
#[derive(Debug, Clone, PartialEq)]
pub struct SectorBasis {
    pub sector: SymmetrySector,
    pub indices: Vec<(usize, i8)>,
}

impl SectorBasis {
    pub fn new(sector: SymmetrySector, n_max: usize) -> Self {
        let p = sector.parity_offset();
        let s0 = sector.phase_sign() as i8;
        let indices = (p..=n_max)
            .step_by(2)
            .enumerate()
            .map(|(k, n)| (n, if k % 2 == 0 { s0 } else { -s0 }))
            .collect();
        Self { sector, indices }
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }
}

/// Diagonal and off-diagonal of a sector block.
#[derive(Debug, Clone, PartialEq)]
pub struct Tridiagonal {
    pub diag: Vec<f64>,
    pub off: Vec<f64>,
}

fn sector_tridiagonal(params: &ModelParams, basis: &SectorBasis, coupling: f64) -> Tridiagonal {
    let w = params.omega();
    let d = params.delta();
    let diag = basis
        .indices
        .iter()
        .map(|&(n, s)| w * n as f64 + d * s as f64)
        .collect();
    let off = basis
        .indices
        .iter()
        .skip(1)
        .map(|&(n, _)| {
            let m = (n - 2) as f64;
            coupling * ((m + 1.0) * (m + 2.0)).sqrt()
        })
        .collect();
    Tridiagonal { diag, off }
}

fn check_n_max(n_max: usize) -> Result<()> {
    if n_max < MIN_N_MAX {
        return Err(Error::InvalidParameter(format!(
            "n_max must be at least {MIN_N_MAX}, got {n_max}"
        )));
    }
    Ok(())
}

/// Sector block as a tridiagonal pair.
pub fn sector_block(params: &ModelParams, sector: SymmetrySector, n_max: usize) -> Tridiagonal {
    sector_tridiagonal(params, &SectorBasis::new(sector, n_max), 1.0)
}

/// Dense sector block. `coupling` scales the two-photon term (1 for the model).
pub fn build_hamiltonian_scaled(
    params: &ModelParams,
    sector: SymmetrySector,
    n_max: usize,
    coupling: f64,
) -> DMatrix<f64> {
    let t = sector_tridiagonal(params, &SectorBasis::new(sector, n_max), coupling);
    let dim = t.diag.len();
    DMatrix::from_fn(dim, dim, |i, j| {
        if i == j {
            t.diag[i]
        } else if i + 1 == j {
            t.off[i]
        } else if j + 1 == i {
            t.off[j]
        } else {
            0.0
        }
    })
}

pub fn build_hamiltonian(
    params: &ModelParams,
    sector: SymmetrySector,
    n_max: usize,
) -> Result<DMatrix<f64>> {
    check_n_max(n_max)?;
    Ok(build_hamiltonian_scaled(params, sector, n_max, 1.0))
}

/// Unprojected matrix on all `|n, s>` with `n <= n_max`, ordered `(n, +), (n, -)`.
pub fn full_hamiltonian(params: &ModelParams, n_max: usize) -> Result<DMatrix<f64>> {
    check_n_max(n_max)?;
    let dim = 2 * (n_max + 1);
    let idx = |n: usize, s: i8| 2 * n + usize::from(s < 0);
    let mut h = DMatrix::zeros(dim, dim);
    for n in 0..=n_max {
        for s in [1i8, -1] {
            let i = idx(n, s);
            h[(i, i)] = params.omega() * n as f64 + params.delta() * s as f64;
            if n + 2 <= n_max {
                let j = idx(n + 2, -s);
                let v = (((n + 1) * (n + 2)) as f64).sqrt();
                h[(i, j)] = v;
                h[(j, i)] = v;
            }
        }
    }
    Ok(h)
}

/// Number of eigenvalues of the tridiagonal matrix strictly below `x` (Sturm count).
pub fn sturm_count(t: &Tridiagonal, x: f64) -> usize {
    let mut count = 0;
    let mut q = 1.0;
    for i in 0..t.diag.len() {
        let e2 = if i == 0 {
            0.0
        } else {
            t.off[i - 1] * t.off[i - 1]
        };
        q = t.diag[i] - x - if i == 0 { 0.0 } else { e2 / q };
        if q == 0.0 {
            q = -f64::EPSILON * (t.diag[i].abs() + x.abs() + 1.0);
        }
        if q < 0.0 {
            count += 1;
        }
    }
    count
}

fn gershgorin(t: &Tridiagonal) -> (f64, f64) {
    let n = t.diag.len();
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for i in 0..n {
        let r = if i > 0 { t.off[i - 1].abs() } else { 0.0 }
            + if i + 1 < n { t.off[i].abs() } else { 0.0 };
        lo = lo.min(t.diag[i] - r);
        hi = hi.max(t.diag[i] + r);
    }
    (lo, hi)
}

/// `k`-th smallest eigenvalue (0-based) by bisection on the Sturm count.
pub fn kth_eigenvalue(t: &Tridiagonal, k: usize) -> f64 {
    let (mut lo, mut hi) = gershgorin(t);
    loop {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi || hi - lo <= 2.0 * f64::EPSILON * lo.abs().max(hi.abs()) {
            return mid;
        }
        if sturm_count(t, mid) > k {
            hi = mid;
        } else {
            lo = mid;
        }
    }
}

/// All eigenvalues below `e_cut`, ascending.
pub fn eigenvalues_below(t: &Tridiagonal, e_cut: f64) -> Vec<f64> {
    let n = sturm_count(t, e_cut);
    (0..n).map(|k| kth_eigenvalue(t, k)).collect()
}

/// The `count` lowest eigenvalues, ascending.
pub fn lowest_eigenvalues(t: &Tridiagonal, count: usize) -> Vec<f64> {
    (0..count.min(t.diag.len()))
        .map(|k| kth_eigenvalue(t, k))
        .collect()
}

/// Which part of the spectrum to certify.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LevelSelection {
    Below(f64),
    Lowest(usize),
}

/// Converged sector spectrum.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumReport {
    pub sector: SymmetrySector,
    pub energies: Vec<f64>,
    pub n_max: usize,
    /// All reported energies below this value passed the doubling check.
    pub converged_below: f64,
    pub converged: bool,
    /// Largest change seen in the final doubling step.
    pub last_change: f64,
    /// Zero counts per inter-pole interval, filled in by the solver.
    pub interval_counts: Vec<usize>,
    pub warning: Option<String>,
}

fn select(t: &Tridiagonal, which: LevelSelection) -> Vec<f64> {
    match which {
        LevelSelection::Below(e) => eigenvalues_below(t, e),
        LevelSelection::Lowest(k) => lowest_eigenvalues(t, k),
    }
}

/// Sector eigenvalues with the truncation doubled from 128 until the selected
/// levels move by less than `tol`.
pub fn eigenvalues(
    params: &ModelParams,
    sector: SymmetrySector,
    which: LevelSelection,
    tol: f64,
) -> Result<SpectrumReport> {
    eigenvalues_from(params, sector, which, tol, START_N_MAX)
}

pub fn eigenvalues_from(
    params: &ModelParams,
    sector: SymmetrySector,
    which: LevelSelection,
    tol: f64,
    start_n_max: usize,
) -> Result<SpectrumReport> {
    require_pure_point(params.omega())?;
    if tol.is_nan() || tol <= 0.0 {
        return Err(Error::InvalidParameter("tol must be positive".into()));
    }
    check_n_max(start_n_max)?;
    let warning = (params.omega() < NEAR_CRITICAL_OMEGA).then(|| {
        format!(
            "omega = {} is close to 2: truncated levels crowd toward the threshold as an artifact of the cutoff",
            params.omega()
        )
    });
    let mut n_max = start_n_max;
    let mut prev = select(&sector_block(params, sector, n_max), which);
    loop {
        let next_n = (2 * n_max).min(N_MAX_CAP);
        let next = select(&sector_block(params, sector, next_n), which);
        let mut change: f64 = 0.0;
        let mut converged_below = f64::INFINITY;
        for (k, e) in next.iter().enumerate() {
            let d = prev.get(k).map_or(f64::INFINITY, |p| (p - e).abs());
            change = change.max(d);
            if d >= tol && converged_below.is_infinite() {
                converged_below = *e;
            }
        }
        let count_stable = next.len() == prev.len();
        let converged = count_stable && change < tol;
        if converged || next_n >= N_MAX_CAP {
            let converged_below = if converged {
                match which {
                    LevelSelection::Below(e) => e,
                    LevelSelection::Lowest(_) => next.last().map_or(f64::INFINITY, |e| e.next_up()),
                }
            } else {
                converged_below
            };
            return Ok(SpectrumReport {
                sector,
                energies: next,
                n_max: next_n,
                converged_below,
                converged,
                last_change: change,
                interval_counts: Vec::new(),
                warning,
            });
        }
        n_max = next_n;
        prev = next;
    }
}

/// Reports for all four sectors, computed in parallel.
pub fn all_sectors(
    params: &ModelParams,
    which: LevelSelection,
    tol: f64,
) -> Result<Vec<SpectrumReport>> {
    SymmetrySector::ALL
        .par_iter()
        .map(|s| eigenvalues(params, *s, which, tol))
        .collect()
}

/// Closed-form level `E_k = (k + 1/2) sqrt(omega^2 - 4) - omega/2` at `delta = 0`.
/// Even `k` belong to the even sectors and coincide with the pole grid.
pub fn delta0_exact(omega: f64, k: usize) -> Result<f64> {
    require_pure_point(omega)?;
    Ok((k as f64 + 0.5) * squeezed_frequency(omega) - omega / 2.0)
}

/// Sectors with an eigenvalue within `tol` of `energy` (converged truncation).
pub fn sectors_at(params: &ModelParams, energy: f64, tol: f64) -> Result<Vec<SymmetrySector>> {
    let cut = energy + 1.0;
    let reports = all_sectors(params, LevelSelection::Below(cut), 1e-11)?;
    Ok(reports
        .into_iter()
        .filter(|r| r.energies.iter().any(|e| (e - energy).abs() < tol))
        .map(|r| r.sector)
        .collect())
}
