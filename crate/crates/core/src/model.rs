//! Model parameters, Z4 symmetry sectors and the closed-form quantities shared
//! by every G-function backend: characteristic exponents, the roots of the
//! Poincaré equation of the power-series recurrence, the Bogoliubov frame and
//! the pole grid of Chen's G-function.
//!
//! Energies and frequencies are measured in units of the coupling `g = 1`.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// The critical frequency where the discrete spectrum turns continuous.
pub const OMEGA_CRITICAL: f64 = 2.0;

/// Spectral regime of the Hamiltonian, decided by an exact comparison with `omega = 2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Regime {
    /// `omega < 2`: unbounded below, not self-adjoint.
    Subcritical,
    /// `omega == 2`: continuum above `E = -1` plus bound states below.
    Critical,
    /// `omega > 2`: pure point spectrum.
    PurePoint,
}

/// Physical inputs `omega` (mode frequency) and `delta` (qubit splitting).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelParams {
    omega: f64,
    delta: f64,
}

impl ModelParams {
    pub fn new(omega: f64, delta: f64) -> Result<Self> {
        if !omega.is_finite() || omega <= 0.0 {
            return Err(Error::InvalidParameter(format!(
                "omega must be finite and positive, got {omega}"
            )));
        }
        if !delta.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "delta must be finite, got {delta}"
            )));
        }
        Ok(Self { omega, delta })
    }

    /// Same frequency, different splitting.
    pub fn with_delta(&self, delta: f64) -> Result<Self> {
        Self::new(self.omega, delta)
    }

    pub fn omega(&self) -> f64 {
        self.omega
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn regime(&self) -> Regime {
        regime(self.omega)
    }

    /// Errors unless `omega > 2`.
    pub fn require_pure_point(&self) -> Result<()> {
        require_pure_point(self.omega)
    }

    /// `sqrt(omega^2 - 4)`, the single conditioning-critical quantity.
    pub fn squeezed_frequency(&self) -> Result<f64> {
        self.require_pure_point()?;
        Ok(squeezed_frequency(self.omega))
    }
}

pub fn regime(omega: f64) -> Regime {
    if omega < OMEGA_CRITICAL {
        Regime::Subcritical
    } else if omega == OMEGA_CRITICAL {
        Regime::Critical
    } else {
        Regime::PurePoint
    }
}

pub(crate) fn require_pure_point(omega: f64) -> Result<()> {
    if omega.is_finite() && regime(omega) == Regime::PurePoint {
        Ok(())
    } else {
        Err(Error::NotPurePoint { omega })
    }
}

/// `sqrt(omega^2 - 4)` computed as `sqrt((omega - 2)(omega + 2))` to keep
/// relative accuracy when `omega -> 2+`.
pub(crate) fn squeezed_frequency(omega: f64) -> f64 {
    ((omega - 2.0) * (omega + 2.0)).sqrt()
}

/// Eigenvalue of `Phi^2`: even or odd functions of the Bargmann variable.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Parity {
    Even,
    Odd,
}

/// Relative sign `b` between the two spinor components under `z -> iz`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Phase {
    Plus,
    Minus,
}

impl Phase {
    pub fn sign(self) -> f64 {
        match self {
            Phase::Plus => 1.0,
            Phase::Minus => -1.0,
        }
    }
}

/// One of the four invariant subspaces of the Z4 symmetry
/// `Phi = exp(i pi/2 a^dag a) sigma_x`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SymmetrySector {
    pub parity: Parity,
    pub phase: Phase,
}

impl SymmetrySector {
    pub const EVEN_PLUS: Self = Self::new(Parity::Even, Phase::Plus);
    pub const EVEN_MINUS: Self = Self::new(Parity::Even, Phase::Minus);
    pub const ODD_PLUS: Self = Self::new(Parity::Odd, Phase::Plus);
    pub const ODD_MINUS: Self = Self::new(Parity::Odd, Phase::Minus);

    pub const ALL: [Self; 4] = [
        Self::EVEN_PLUS,
        Self::EVEN_MINUS,
        Self::ODD_PLUS,
        Self::ODD_MINUS,
    ];

    pub const fn new(parity: Parity, phase: Phase) -> Self {
        Self { parity, phase }
    }

    /// 0 for even, 1 for odd: the power offset of the series in `z^(2n+p)`.
    pub fn parity_offset(self) -> usize {
        match self.parity {
            Parity::Even => 0,
            Parity::Odd => 1,
        }
    }

    pub fn phase_sign(self) -> f64 {
        self.phase.sign()
    }

    /// Eigenvalue of `Phi` on this sector: `+1, -1` for even, `+i, -i` for odd.
    pub fn z4_eigenvalue(self) -> Complex64 {
        let s = self.phase_sign();
        match self.parity {
            Parity::Even => Complex64::new(s, 0.0),
            Parity::Odd => Complex64::new(0.0, s),
        }
    }

    /// Short label `++`, `+-`, `-+`, `--` (parity first, then phase).
    pub fn label(self) -> &'static str {
        match (self.parity, self.phase) {
            (Parity::Even, Phase::Plus) => "++",
            (Parity::Even, Phase::Minus) => "+-",
            (Parity::Odd, Phase::Plus) => "-+",
            (Parity::Odd, Phase::Minus) => "--",
        }
    }
}

impl fmt::Display for SymmetrySector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for SymmetrySector {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let sector = match s.trim().to_ascii_lowercase().as_str() {
            "++" | "even-plus" | "even,plus" | "pp" => Self::EVEN_PLUS,
            "+-" | "even-minus" | "even,minus" | "pm" => Self::EVEN_MINUS,
            "-+" | "odd-plus" | "odd,plus" | "mp" => Self::ODD_PLUS,
            "--" | "odd-minus" | "odd,minus" | "mm" => Self::ODD_MINUS,
            other => {
                return Err(Error::InvalidParameter(format!(
                    "unknown sector '{other}' (expected ++, +-, -+ or --)"
                )))
            }
        };
        Ok(sector)
    }
}

/// The four exponents of the second kind, in the order `(g1, g2, g3, g4)` with
/// `g1,4 = (-w +- sqrt(w^2-4))/2` and `g2,3 = (w -+ sqrt(w^2-4))/2`.
///
/// All four solve `g^4 + (2 - w^2) g^2 + 1 = 0`; for `w < 2` they lie on the unit circle.
pub fn characteristic_exponents(omega: f64) -> [Complex64; 4] {
    let root = Complex64::new((omega - 2.0) * (omega + 2.0), 0.0).sqrt();
    let w = Complex64::new(omega, 0.0);
    [
        (-w + root) / 2.0,
        (w - root) / 2.0,
        (w + root) / 2.0,
        (-w - root) / 2.0,
    ]
}

/// Roots `(x_plus, x_minus)` of `x^2 + (w/2) x + 1/4 = 0`, which govern
/// `a_{n+1}/a_n ~ x/n` for the power-series recurrence.
///
/// `x_plus = g1/2` (minimal) and `x_minus = g4/2` (dominant). No minimal solution
/// exists for `omega <= 2`, where both roots have modulus 1/2.
pub fn recurrence_roots(omega: f64) -> Result<(f64, f64)> {
    require_pure_point(omega)?;
    let s = squeezed_frequency(omega);
    // x_plus via Vieta avoids the cancellation in (s - w)/4 at large omega.
    let x_minus = -(s + omega) / 4.0;
    let x_plus = 0.25 / x_minus;
    Ok((x_plus, x_minus))
}

/// Exponent of the first kind `rho(gamma, omega, E)` for the asymptotic form
/// `exp(gamma z^2/2) z^rho` of solutions of the fourth-order equation.
pub fn exponent_rho(gamma: Complex64, omega: f64, energy: f64) -> Result<Complex64> {
    let w2 = omega * omega;
    let g2 = gamma * gamma;
    let g3 = g2 * gamma;
    let denominator = 4.0 * g3 + 2.0 * (2.0 - w2) * gamma;
    let numerator = 6.0 * g3
        + 2.0 * omega * g2
        + (2.0 - w2) * gamma
        + (4.0 + 2.0 * omega * energy - w2) * gamma
        - 2.0 * omega;
    let size = numerator.norm().max(4.0 * g3.norm()).max(f64::MIN_POSITIVE);
    if denominator.norm() <= 64.0 * f64::EPSILON * size {
        return Err(Error::DegenerateDenominator {
            gamma: format!("{gamma}"),
        });
    }
    Ok(-numerator / denominator)
}

/// The two doubly degenerate exponents at `omega = 2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CriticalExponent {
    /// `gamma = +1`
    Plus,
    /// `gamma = -1`
    Minus,
}

impl CriticalExponent {
    pub fn gamma(self) -> f64 {
        match self {
            CriticalExponent::Plus => 1.0,
            CriticalExponent::Minus => -1.0,
        }
    }

    /// `beta^2` at `omega = 2`: `-(E+1)` for `gamma = 1`, `E+1` for `gamma = -1`.
    pub fn beta_squared(self, energy: f64) -> f64 {
        match self {
            CriticalExponent::Plus => -(energy + 1.0),
            CriticalExponent::Minus => energy + 1.0,
        }
    }
}

/// Both roots `+-beta` of the linear exponent at the critical point.
pub fn critical_beta(gamma: CriticalExponent, energy: f64) -> [Complex64; 2] {
    let b = Complex64::new(gamma.beta_squared(energy), 0.0).sqrt();
    [b, -b]
}

/// Exponent of the first kind at `omega = 2`, where the generic quotient in
/// [`exponent_rho`] is 0/0.
///
/// With `gamma^2 = 1` the `z^4` and `z^3` balances vanish identically, the `z^2`
/// balance fixes `beta`, and the `z^1` balance
/// `E + beta^2 gamma + (3 gamma^2 - 1) rho + 3 gamma^2 + 2 gamma = 0` fixes `rho`.
/// The result does not depend on `E`.
pub fn critical_rho(gamma: CriticalExponent, energy: f64) -> f64 {
    let g = gamma.gamma();
    let beta2 = gamma.beta_squared(energy);
    -(energy + beta2 * g + 3.0 * g * g + 2.0 * g) / (3.0 * g * g - 1.0)
}

/// Constants of the squeezed frame with `tanh(2 theta) = -2/omega`.
///
/// In this frame the eigenvalue problem reads
/// `omega1 z phi1' - E1 phi1 + delta phi2 = 0` and
/// `Gamma phi2'' + omega2 z phi2' + (Gamma z^2 + E2) phi2 - delta phi1 = 0`,
/// with `E1 = E + e1_offset` and `E2 = E + e2_offset`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BogoliubovFrame {
    pub omega: f64,
    /// Squeezing parameter (negative).
    pub theta: f64,
    pub gamma: f64,
    pub omega1: f64,
    pub omega2: f64,
    pub e1_offset: f64,
    pub e2_offset: f64,
    pub tanh_abs_theta: f64,
}

/// The frame constants recomputed through hyperbolic functions of `theta`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DirectFrame {
    pub gamma: f64,
    pub omega1: f64,
    pub omega2: f64,
    pub e1_offset: f64,
    pub e2_offset: f64,
    pub tanh_abs_theta: f64,
}

/// Abbreviations `b1..b4` of the third-order equation for the first component.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Abbreviations {
    pub b1: f64,
    pub b2: f64,
    pub b3: f64,
    pub b4: f64,
}

impl BogoliubovFrame {
    pub fn e1(&self, energy: f64) -> f64 {
        energy + self.e1_offset
    }

    pub fn e2(&self, energy: f64) -> f64 {
        energy + self.e2_offset
    }

    /// Distance between adjacent poles of Chen's G-function, `2 sqrt(omega^2-4)`.
    pub fn pole_gap(&self) -> f64 {
        2.0 * self.omega1
    }

    /// `E1/omega1`; poles of Chen's G-function sit at even integer values.
    pub fn reduced_energy(&self, energy: f64) -> f64 {
        self.e1(energy) / self.omega1
    }

    pub fn abbreviations(&self, energy: f64, delta: f64) -> Abbreviations {
        let e1 = self.e1(energy);
        let e2 = self.e2(energy);
        let (g, w1, w2) = (self.gamma, self.omega1, self.omega2);
        Abbreviations {
            b1: w2 / g,
            b2: 2.0 - e1 / w1,
            b3: (e2 * w1 - e1 * w2 + w1 * w2) / (g * w1),
            b4: (delta * delta - e1 * e2) / (g * w1),
        }
    }

    /// Straight evaluation of the frame definitions from `theta`; used to audit
    /// the closed forms stored in `self`.
    pub fn direct(&self) -> DirectFrame {
        let t = self.theta;
        let w = self.omega;
        let sh2 = (2.0 * t).sinh();
        let sh = t.sinh();
        DirectFrame {
            gamma: 2.0 * (2.0 * t).cosh(),
            omega1: -sh2 * (w * w / 2.0 - 2.0),
            omega2: sh2 * (w * w / 2.0 + 2.0),
            e1_offset: -sh2 - w * sh * sh,
            e2_offset: sh2 - w * sh * sh,
            tanh_abs_theta: t.abs().tanh(),
        }
    }
}

pub fn bogoliubov_frame(omega: f64) -> Result<BogoliubovFrame> {
    require_pure_point(omega)?;
    let s = squeezed_frequency(omega);
    // (omega - s)/2 written as 2/(omega + s) to avoid cancellation at large omega.
    let half_gap = 2.0 / (omega + s);
    Ok(BogoliubovFrame {
        omega,
        theta: 0.5 * (-2.0 / omega).atanh(),
        gamma: 2.0 * omega / s,
        omega1: s,
        omega2: -(omega * omega + 4.0) / s,
        e1_offset: half_gap,
        e2_offset: omega / 2.0 - (omega * omega + 4.0) / (2.0 * s),
        tanh_abs_theta: half_gap,
    })
}

/// Pole energy `E^(m) = (2m + 1/2) sqrt(omega^2-4) - omega/2`.
pub fn pole_energy(omega: f64, m: usize) -> Result<f64> {
    require_pure_point(omega)?;
    Ok(pole_energy_unchecked(omega, m))
}

pub(crate) fn pole_energy_unchecked(omega: f64, m: usize) -> f64 {
    (2.0 * m as f64 + 0.5) * squeezed_frequency(omega) - omega / 2.0
}

/// Ascending pole energies of Chen's G-function.
#[derive(Debug, Clone, PartialEq)]
pub struct PoleGrid {
    omega: f64,
    energies: Vec<f64>,
}

impl PoleGrid {
    pub fn energies(&self) -> &[f64] {
        &self.energies
    }

    pub fn omega(&self) -> f64 {
        self.omega
    }

    pub fn gap(&self) -> f64 {
        2.0 * squeezed_frequency(self.omega)
    }

    pub fn len(&self) -> usize {
        self.energies.len()
    }

    pub fn is_empty(&self) -> bool {
        self.energies.is_empty()
    }

    /// Interval index of `energy`: 0 below `E^(0)`, `m + 1` for `(E^(m), E^(m+1))`.
    /// Energies beyond the last stored pole are extrapolated on the same grid.
    pub fn interval_of(&self, energy: f64) -> usize {
        interval_index(self.omega, energy)
    }
}

pub(crate) fn interval_index(omega: f64, energy: f64) -> usize {
    let s = squeezed_frequency(omega);
    let x = (energy + omega / 2.0) / (2.0 * s) - 0.25;
    if x < 0.0 {
        0
    } else {
        x.floor() as usize + 1
    }
}

pub fn pole_energies(omega: f64, m_max: usize) -> Result<PoleGrid> {
    require_pure_point(omega)?;
    let energies = (0..=m_max)
        .map(|m| pole_energy_unchecked(omega, m))
        .collect();
    Ok(PoleGrid { omega, energies })
}
