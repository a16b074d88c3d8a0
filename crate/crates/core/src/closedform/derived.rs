//! Exact closed forms that replace the printed expressions where those
//! disagree with the state vectors.
//!
//! The pointer `|Ψ⟩ = (λ/2) Σ_k t_k D(s_k)|Ψᵢ⟩`, `t_± = 1 ± w`, `s_± = ±Γ/2`,
//! only ever needs displacement matrix elements between a-mode levels 0 and 1:
//! for a normal-ordered `O = (a^p b^r)†(a^q b^u)`,
//!
//! `⟨O⟩ = (λ²/4) Σ_{jk} t_j* t_k ⟨(a+s_j)^p b^r Ψᵢ| D(s_k−s_j) |(a+s_k)^q b^u Ψᵢ⟩`,
//!
//! and `(a+s)^q b^u Ψᵢ` stays inside `span{|0⟩,|1⟩}_a ⊗ span{|0⟩,|1⟩}_b`.

use std::f64::consts::{FRAC_1_SQRT_2, SQRT_2};

use num_complex::Complex64 as C64;

use super::Common;
use crate::error::Result;
use crate::grid::hermite_functions;
use crate::moments::ExpectationSet;
use crate::weakmeas::MeasurementParams;

/// Amplitudes `v[n][m]` on `|n⟩_a|m⟩_b`, `n, m ∈ {0, 1}`.
type Small = [[C64; 2]; 2];

const ZERO: C64 = C64::new(0.0, 0.0);

/// Exponents `(p, r, q, u)` of each moment, in [`crate::moments::MOMENT_NAMES`] order.
const EXPONENTS: [(u32, u32, u32, u32); 11] = [
    (0, 0, 1, 0),
    (0, 0, 0, 1),
    (0, 0, 2, 0),
    (0, 0, 0, 2),
    (1, 0, 1, 0),
    (0, 1, 0, 1),
    (1, 0, 0, 1),
    (0, 0, 1, 1),
    (1, 1, 1, 1),
    (2, 0, 2, 0),
    (0, 2, 0, 2),
];

/// Moment algebra of the displaced low-photon pointer.
#[derive(Clone, Copy, Debug)]
pub struct LowPhotonAlgebra {
    initial: Small,
    shift: f64,
    weights: [C64; 2],
    branch_prob: [f64; 2],
}

impl LowPhotonAlgebra {
    pub fn new(p: &MeasurementParams) -> Result<Self> {
        let c = Common::new(p)?;
        let norm = c.q.sqrt().recip();
        let one = c.phase * (c.gamma * FRAC_1_SQRT_2 * norm);
        let initial = [[C64::new(norm, 0.0), C64::i() * one], [one, ZERO]];
        let bias = p.pre_angle.sin() * p.pre_phase.cos();
        Ok(Self {
            initial,
            shift: 0.5 * c.g,
            weights: [1.0 + c.w, 1.0 - c.w],
            branch_prob: [0.5 * (1.0 + bias), 0.5 * (1.0 - bias)],
        })
    }

    fn shifts(&self) -> [f64; 2] {
        [self.shift, -self.shift]
    }

    /// `(a + s)^q b^u Ψᵢ`.
    fn raised(&self, s: f64, q: u32, u: u32) -> Small {
        let mut v = self.initial;
        for _ in 0..u {
            v = [[v[0][1], ZERO], [v[1][1], ZERO]];
        }
        for _ in 0..q {
            v = [[v[1][0] + s * v[0][0], v[1][1] + s * v[0][1]], [s * v[1][0], s * v[1][1]]];
        }
        v
    }

    /// `⟨l| D(β) |r⟩` for real `β`.
    fn displaced_inner(l: &Small, beta: f64, r: &Small) -> C64 {
        let e = (-0.5 * beta * beta).exp();
        let d = [[e, -beta * e], [beta * e, (1.0 - beta * beta) * e]];
        let mut acc = ZERO;
        for n in 0..2 {
            for k in 0..2 {
                for m in 0..2 {
                    acc += l[n][m].conj() * d[n][k] * r[k][m];
                }
            }
        }
        acc
    }

    fn postselected_moment(&self, (p, r, q, u): (u32, u32, u32, u32), lambda: f64) -> C64 {
        let s = self.shifts();
        let mut acc = ZERO;
        for j in 0..2 {
            let bra = self.raised(s[j], p, r);
            for k in 0..2 {
                let ket = self.raised(s[k], q, u);
                acc += self.weights[j].conj() * self.weights[k] * Self::displaced_inner(&bra, s[k] - s[j], &ket);
            }
        }
        0.25 * lambda * lambda * acc
    }

    /// The eleven moments of the normalized postselected pointer.
    pub fn postselected_moments(&self, lambda: f64) -> ExpectationSet {
        ExpectationSet::from_entries(EXPONENTS.map(|e| self.postselected_moment(e, lambda)))
    }

    /// Moments of the pointer with the system traced out (no postselection).
    pub fn nonpostselected_moments(&self) -> ExpectationSet {
        let s = self.shifts();
        ExpectationSet::from_entries(EXPONENTS.map(|(p, r, q, u)| {
            (0..2)
                .map(|j| {
                    let bra = self.raised(s[j], p, r);
                    let ket = self.raised(s[j], q, u);
                    self.branch_prob[j] * Self::displaced_inner(&bra, 0.0, &ket)
                })
                .sum()
        }))
    }

    /// `‖Σ_k t_k D(s_k)Ψᵢ‖² / 4`, i.e. `λ⁻²`.
    pub fn inverse_lambda_sqr(&self) -> f64 {
        self.postselected_moment((0, 0, 0, 0), 1.0).re
    }
}

/// Exact coordinate wavefunction of the postselected pointer.
pub(crate) fn wavefunction(c: &Common, p: &MeasurementParams, lambda: f64, x: f64, y: f64) -> C64 {
    let sigma = p.sigma;
    let s = 0.5 * c.g;
    let uy = hermite_functions(0, y, sigma)[0];
    let lg = c.phase * c.gamma;
    let mut acc = ZERO;
    for (t, shift) in [(1.0 + c.w, s), (1.0 - c.w, -s)] {
        let ux = hermite_functions(0, x - SQRT_2 * sigma * shift, sigma)[0];
        let first = lg * (x / sigma - SQRT_2 * shift);
        let vortex = C64::i() * lg * (y / sigma);
        acc += t * (1.0 + first + vortex) * ux * uy;
    }
    acc * (0.5 * lambda / c.q.sqrt())
}
