//! The published expressions, transcribed term by term.

use std::f64::consts::SQRT_2;

use num_complex::Complex64 as C64;

use super::{Common, HelperTerms};
use crate::error::Result;
use crate::moments::{ExpectationSet, Squeezing};
use crate::weakmeas::MeasurementParams;

pub(crate) fn helper_terms(c: &Common, p: &MeasurementParams) -> Result<HelperTerms> {
    let (g, gamma, q, e) = (c.g, c.gamma, c.q, c.damp);
    let ep = c.phase;
    let emp = c.phase.conj();
    let i = C64::i();
    let sin_phi = p.mode_phase.sin();
    let cos_phi = p.mode_phase.cos();
    let g2 = g * g;

    let i1 = (1.0 - (i * SQRT_2 * g * gamma * sin_phi + 0.5 * (gamma * g).powi(2)) / q) * e;
    let i2 = (q + i * SQRT_2 * g * gamma * sin_phi - 0.5 * gamma * gamma * g2) / q * e;
    let ii = gamma * ep * e / (SQRT_2 * q);
    let iii = |sign: f64| e / q * (0.5 * gamma * gamma * (1.0 - g2) + sign * gamma * ep / SQRT_2 * g);
    let b_term = |sign: f64, phase: C64| sign * i * gamma * e / q * (0.5 * gamma * (1.0 - g2) - phase / SQRT_2 * g);
    let m_term = |sign: f64| {
        C64::new(
            g2 * gamma * gamma / (2.0 * q) + sign * g.powi(3) * gamma * cos_phi / (2.0 * SQRT_2 * q) + g.powi(4) / 16.0,
            0.0,
        )
    };
    let t_term = |sign: f64| gamma * ep * g / q * (g / SQRT_2 - sign * gamma * emp * (1.0 - 0.5 * g2)) * e;
    let t = C64::new(g2 / q * (1.0 + gamma * gamma * (2.0 - 0.5 * g2)) * e, 0.0);
    let iv1 = e / q * (0.5 * gamma * gamma * (1.0 - g2) - gamma * ep / SQRT_2 * g);
    let iv2 = e / q * (0.5 * gamma * gamma * (1.0 - g2) + gamma * ep / SQRT_2 * g);
    let v_term = |sign: f64| {
        e / (2.0 * q)
            * (g2 * gamma * ep + SQRT_2 * gamma * emp * (1.0 - g2)
                - sign * 2.0 * g
                - sign * g * gamma * gamma * (1.0 + (2.0 - g2) / SQRT_2))
    };

    let t_plus = t_term(1.0);
    let t_minus = t_term(-1.0);
    let v_plus = v_term(1.0);
    let v_minus = v_term(-1.0);
    let m1 = g * t_plus + 0.25 * g2 * (t + 4.0 * iv1) + 0.25 * g.powi(3) * (v_plus + ii) + g.powi(4) * i1 / 16.0;
    // the printed M₂ has no operator between −ΓT₋ and the Γ²/4 group; read as subtraction
    let m2 = -g * t_minus - 0.25 * g2 * (t + 4.0 * iv2) - 0.25 * g.powi(3) * (v_minus + ii) + g.powi(4) * i2 / 16.0;

    Ok(HelperTerms {
        i1,
        i2,
        ii,
        iii_plus: iii(1.0),
        iii_minus: iii(-1.0),
        b_plus: b_term(1.0, ep),
        b_minus: b_term(-1.0, emp),
        m_plus: m_term(1.0),
        m_minus: m_term(-1.0),
        m1,
        m2,
        t_plus,
        t_minus,
        t,
        iv1,
        iv2,
        v_plus,
        v_minus,
    })
}

pub(crate) fn expectations(c: &Common, p: &MeasurementParams, lambda: f64) -> Result<ExpectationSet> {
    let h = helper_terms(c, p)?;
    let (g, gamma, q, e) = (c.g, c.gamma, c.q, c.damp);
    let ep = c.phase;
    let i = C64::i();
    let w = c.w;
    let wc = w.conj();
    let aw2 = c.w_abs2();
    let l = lambda * lambda;
    let g2 = g * g;
    // (1 + w*)(1 − w) and (1 − w*)(1 + w)
    let cross_m = (1.0 + wc) * (1.0 - w);
    let cross_p = (1.0 - wc) * (1.0 + w);

    let a = l / 2.0 * ((1.0 + aw2) * gamma * ep / (SQRT_2 * q) + (1.0 - aw2) * h.ii + g * (1.0 - h.i2) * w.re);
    let b = l * i * SQRT_2 * gamma * ep / (4.0 * q) * (1.0 + aw2 + (1.0 - aw2) * e)
        - i * l * gamma * gamma * g / (2.0 * q) * w.im * e;
    let shared = l * g2 / 16.0 * (cross_m * h.i2 + cross_p * h.i1);
    let a2 = l * g / 2.0 * ((SQRT_2 * gamma * ep / q + 2.0 * h.ii) * w.re + (1.0 + aw2) * g / 4.0) + shared;
    let adag_a = l / 2.0 * (1.0 + aw2) * (gamma * gamma / (2.0 * q) + g2 / 4.0)
        + i * l * g * gamma * p.mode_phase.cos() / (2.0 * SQRT_2 * q) * w.im
        + l / 4.0 * cross_m * h.iii_plus
        + l / 4.0 * (1.0 - aw2) * h.iii_minus
        + shared
        + l * g / 8.0 * (cross_p * (h.iv1 + h.ii) - cross_m * (h.iv2 + h.ii));
    let bdag_b = l / 4.0 * ((1.0 + aw2) * gamma * gamma / q + (1.0 - aw2) * gamma * gamma / q * e);
    let adag_b = l / 4.0
        * ((1.0 + aw2) * i * gamma * gamma / q
            + w.im * i * g * gamma * ep / (SQRT_2 * q) * (1.0 + e)
            + (1.0 - aw2) * gamma * gamma * g2 * e / (2.0 * q))
        + l / 4.0 * (cross_m * h.b_plus + cross_p * h.b_minus);
    let ab = l * gamma * g / (8.0 * q) * (2.0 * SQRT_2 * i * ep * (w.re + i * w.im * e) + (1.0 - aw2) * gamma * g * e);
    let adaga_bdagb = l * g2 * gamma * gamma / (16.0 * q) * (1.0 + aw2 - (1.0 - aw2) * e);
    let adag2a2 = l / 4.0 * ((1.0 - wc) * (1.0 - w) * h.m_minus + (1.0 + wc) * (1.0 + w) * h.m_plus)
        + l / 4.0 * (cross_p * h.m1 + cross_m * h.m2);

    Ok(ExpectationSet {
        a,
        b,
        a2,
        b2: C64::new(0.0, 0.0),
        adag_a,
        bdag_b: C64::new(bdag_b, 0.0),
        adag_b,
        ab,
        adaga_bdagb: C64::new(adaga_bdagb, 0.0),
        adag2a2,
        bdag2b2: C64::new(0.0, 0.0),
    })
}

/// `Q₁` and `Q₂` with the second one's pair and mean terms as printed.
pub(crate) fn squeezing(m: &ExpectationSet) -> Squeezing {
    let number = m.adag_a.re + m.bdag_b.re + 2.0 * m.adag_b.re;
    let pair = 2.0 * m.ab.re;
    let square = 2.0 * m.a2.re + 2.0 * m.b2.re;
    let mean = 2.0 * (m.a.re + m.b.re);
    let q1 = 0.25 * (number + pair) + 0.125 * square - 0.125 * mean * mean;
    let q2 = 0.25 * (number + pair) - 0.125 * square + 0.125 * mean * mean;
    Squeezing { q1, q2 }
}

/// Printed coordinate wavefunction with the unspecified prefactor set to one.
pub(crate) fn wavefunction(c: &Common, p: &MeasurementParams, x: f64, y: f64) -> C64 {
    let sigma = p.sigma;
    let s = 0.5 * c.g;
    let norm = (std::f64::consts::PI * sigma * sigma).powf(-0.25);
    let phi_s = |s: f64| {
        norm * (-0.5 * s * s).exp() * (x * x / (2.0 * sigma * sigma)).exp() * (-(x / sigma - s / SQRT_2).powi(2)).exp()
    };
    let psi_y = norm * (-y * y / (2.0 * sigma * sigma)).exp();
    let lg = c.gamma * c.phase;
    let mut acc = C64::new(0.0, 0.0);
    for (t, sign) in [(1.0 - c.w, -1.0), (1.0 + c.w, 1.0)] {
        let base = phi_s(sign * s) * psi_y;
        let m = C64::new(base, 0.0);
        let tt = lg / SQRT_2 * (sign * (1.0 - SQRT_2) * s + 2.0 * x / sigma) * base;
        let k = C64::i() * SQRT_2 * y / sigma * lg * base;
        acc += t * (m + tt + k);
    }
    acc / c.q.sqrt()
}
