//! The eleven pointer moments consumed by the squeezing, correlation and SNR
//! formulas, plus their direct state-vector evaluation.

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::fock::{Ladder, TwoModeState};

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct ExpectationSet {
    /// ⟨â⟩
    pub a: C64,
    /// ⟨b̂⟩
    pub b: C64,
    /// ⟨â²⟩
    pub a2: C64,
    /// ⟨b̂²⟩
    pub b2: C64,
    /// ⟨â†â⟩
    pub adag_a: C64,
    /// ⟨b̂†b̂⟩
    pub bdag_b: C64,
    /// ⟨â†b̂⟩
    pub adag_b: C64,
    /// ⟨âb̂⟩
    pub ab: C64,
    /// ⟨â†âb̂†b̂⟩
    pub adaga_bdagb: C64,
    /// ⟨â†²â²⟩
    pub adag2a2: C64,
    /// ⟨b̂†²b̂²⟩
    pub bdag2b2: C64,
}

/// Moment names in canonical order, matching [`ExpectationSet::entries`].
pub const MOMENT_NAMES: [&str; 11] =
    ["a", "b", "a2", "b2", "adag_a", "bdag_b", "adag_b", "ab", "adaga_bdagb", "adag2a2", "bdag2b2"];

/// Normal-ordered operator strings for each moment, same order as
/// [`MOMENT_NAMES`].
pub const MOMENT_OPERATORS: [&[Ladder]; 11] = {
    use Ladder::*;
    [
        &[A],
        &[B],
        &[A, A],
        &[B, B],
        &[ADag, A],
        &[BDag, B],
        &[ADag, B],
        &[A, B],
        &[ADag, A, BDag, B],
        &[ADag, ADag, A, A],
        &[BDag, BDag, B, B],
    ]
};

impl ExpectationSet {
    pub fn from_entries(v: [C64; 11]) -> Self {
        Self {
            a: v[0],
            b: v[1],
            a2: v[2],
            b2: v[3],
            adag_a: v[4],
            bdag_b: v[5],
            adag_b: v[6],
            ab: v[7],
            adaga_bdagb: v[8],
            adag2a2: v[9],
            bdag2b2: v[10],
        }
    }

    pub fn entries(&self) -> [C64; 11] {
        [
            self.a,
            self.b,
            self.a2,
            self.b2,
            self.adag_a,
            self.bdag_b,
            self.adag_b,
            self.ab,
            self.adaga_bdagb,
            self.adag2a2,
            self.bdag2b2,
        ]
    }

    pub fn named(&self) -> impl Iterator<Item = (&'static str, C64)> {
        MOMENT_NAMES.into_iter().zip(self.entries())
    }

    /// Moments of a state by direct ladder-operator application.
    pub fn of_state(state: &TwoModeState) -> Self {
        let norm = state.norm_sqr();
        let mut values = [C64::new(0.0, 0.0); 11];
        for (v, ops) in values.iter_mut().zip(MOMENT_OPERATORS) {
            *v = state.expect(ops) / norm;
        }
        Self::from_entries(values)
    }

    /// `Σ wᵢ ⟨·⟩ᵢ` for an incoherent mixture.
    pub fn mixture(parts: &[(f64, ExpectationSet)]) -> Self {
        let mut values = [C64::new(0.0, 0.0); 11];
        for (w, set) in parts {
            for (v, e) in values.iter_mut().zip(set.entries()) {
                *v += *w * e;
            }
        }
        Self::from_entries(values)
    }

    /// `⟨â†b̂⟩* = ⟨âb̂†⟩`.
    pub fn a_bdag(&self) -> C64 {
        self.adag_b.conj()
    }
}

/// Quadrature-squeezing parameters `Q_i = ΔF_i² − 1/4` for
/// `F₁ = (â + b̂ + h.c.)/2^{3/2}` and `F₂ = (â + b̂ − h.c.)/(2^{3/2} i)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Squeezing {
    pub q1: f64,
    pub q2: f64,
}

impl Squeezing {
    /// Quadrature variances `ΔF_i² = Q_i + 1/4`.
    pub fn variances(&self) -> (f64, f64) {
        (self.q1 + 0.25, self.q2 + 0.25)
    }

    /// Exact variances expanded from normal-ordered moments.
    pub fn from_moments(m: &ExpectationSet) -> Self {
        let number = m.adag_a.re + m.bdag_b.re + 2.0 * m.adag_b.re;
        let pair = 2.0 * m.ab.re;
        let square = 2.0 * m.a2.re + 2.0 * m.b2.re;
        let re_mean = 2.0 * (m.a.re + m.b.re);
        let im_mean = 2.0 * (m.a.im + m.b.im);
        let q1 = 0.25 * (number + pair) + 0.125 * square - 0.125 * re_mean * re_mean;
        let q2 = 0.25 * (number - pair) - 0.125 * square - 0.125 * im_mean * im_mean;
        Self { q1, q2 }
    }
}
