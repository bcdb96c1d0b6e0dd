//! Sample types shared by the G-function backends.

use num_complex::Complex64;

use crate::error::Result;

/// Status bits attached to one G-function sample.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash)]
pub struct EvalFlags {
    pub near_pole: bool,
    pub overflow: bool,
    pub not_converged: bool,
    pub huge: bool,
}

impl EvalFlags {
    pub const NEAR_POLE: u8 = 1;
    pub const OVERFLOW: u8 = 2;
    pub const NOT_CONVERGED: u8 = 4;
    pub const HUGE: u8 = 8;

    pub fn bits(&self) -> u8 {
        let mut b = 0;
        if self.near_pole {
            b |= Self::NEAR_POLE;
        }
        if self.overflow {
            b |= Self::OVERFLOW;
        }
        if self.not_converged {
            b |= Self::NOT_CONVERGED;
        }
        if self.huge {
            b |= Self::HUGE;
        }
        b
    }

    pub fn from_bits(bits: u8) -> Self {
        Self {
            near_pole: bits & Self::NEAR_POLE != 0,
            overflow: bits & Self::OVERFLOW != 0,
            not_converged: bits & Self::NOT_CONVERGED != 0,
            huge: bits & Self::HUGE != 0,
        }
    }

    pub fn is_clean(&self) -> bool {
        self.bits() == 0
    }

    pub fn union(self, other: Self) -> Self {
        Self::from_bits(self.bits() | other.bits())
    }
}

/// One real sample `G(E)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GEvaluation {
    pub energy: f64,
    pub value: f64,
    pub flags: EvalFlags,
}

impl GEvaluation {
    pub fn new(energy: f64, value: f64) -> Self {
        let flags = EvalFlags {
            overflow: !value.is_finite(),
            ..EvalFlags::default()
        };
        Self {
            energy,
            value,
            flags,
        }
    }
}

/// One complex sample, used by the forward-recursion backend.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ComplexEvaluation {
    pub energy: f64,
    pub value: Complex64,
    pub flags: EvalFlags,
}

/// A real spectral determinant whose zeros are eigenvalues of one symmetry sector.
pub trait GFunction: Sync {
    fn evaluate(&self, energy: f64) -> Result<GEvaluation>;

    /// Energies in `[lo, hi]` where the function is known to have poles.
    /// Backends with unknown pole positions return an empty list.
    fn poles_in(&self, _lo: f64, _hi: f64) -> Vec<f64> {
        Vec::new()
    }

    /// True when pole positions are known in closed form.
    fn has_known_poles(&self) -> bool {
        false
    }

    /// Short name used in reports.
    fn name(&self) -> &'static str;
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flag_bits_round_trip() {
        for bits in 0..16u8 {
            assert_eq!(EvalFlags::from_bits(bits).bits(), bits);
        }
        assert!(EvalFlags::default().is_clean());
    }

    #[test]
    fn non_finite_value_sets_overflow() {
        assert!(GEvaluation::new(1.0, f64::INFINITY).flags.overflow);
        assert!(GEvaluation::new(1.0, 3.0).flags.is_clean());
    }
}
