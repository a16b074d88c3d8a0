//! Analytic evaluation of every pointer quantity directly from
//! [`MeasurementParams`], without building state vectors.
//!
//! Two formula sets are available. [`FormulaSet::Printed`] transcribes the
//! published expressions verbatim, typos included. [`FormulaSet::Derived`]
//! (the default) replaces the expressions that disagree with the state-vector
//! oracle by re-derived closed forms. The validation report in
//! [`crate::oracle`] quantifies the residual of each printed expression.

mod derived;
mod printed;

use std::f64::consts::{FRAC_1_SQRT_2, PI, SQRT_2};

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{FieldKind, GridSpec, ScalarField};
use crate::moments::{ExpectationSet, Squeezing};
use crate::weakmeas::MeasurementParams;

pub use derived::LowPhotonAlgebra;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FormulaSet {
    #[default]
    Derived,
    Printed,
}

/// How `⟨X̂²⟩` is assembled from the a-mode moments in the SNR ratio.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PositionConvention {
    /// `(σ²/2){⟨â†â⟩ + Re⟨â²⟩ + 2}` as printed.
    #[default]
    Printed,
    /// `σ²{2⟨â†â⟩ + 2Re⟨â²⟩ + 1}` from `X̂ = σ(â + â†)`.
    Operator,
}

/// Printed helper quantities, each evaluated verbatim.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct HelperTerms {
    pub i1: C64,
    pub i2: C64,
    pub ii: C64,
    pub iii_plus: C64,
    pub iii_minus: C64,
    pub b_plus: C64,
    pub b_minus: C64,
    pub m_plus: C64,
    pub m_minus: C64,
    pub m1: C64,
    pub m2: C64,
    pub t_plus: C64,
    pub t_minus: C64,
    pub t: C64,
    pub iv1: C64,
    pub iv2: C64,
    pub v_plus: C64,
    pub v_minus: C64,
}

/// Recurring scalar pieces of the formulas.
#[derive(Clone, Copy, Debug)]
pub(crate) struct Common {
    pub g: f64,
    pub gamma: f64,
    pub q: f64,
    pub damp: f64,
    pub phase: C64,
    pub w: C64,
}

impl Common {
    pub fn new(p: &MeasurementParams) -> Result<Self> {
        p.validate()?;
        let g = p.coupling;
        Ok(Self {
            g,
            gamma: p.mode_weight,
            q: 1.0 + p.mode_weight * p.mode_weight,
            damp: (-0.5 * g * g).exp(),
            phase: C64::from_polar(1.0, p.mode_phase),
            w: p.weak_value()?.value,
        })
    }

    pub fn w_abs2(&self) -> f64 {
        self.w.norm_sqr()
    }

    /// `⟨â⟩` of the initial pointer, `γe^{iφ}/(√2(1+γ²))`.
    pub fn initial_a(&self) -> C64 {
        self.phase * (self.gamma * FRAC_1_SQRT_2 / self.q)
    }
}

/// `⟨Ψᵢ|D(β)|Ψᵢ⟩ = e^{−β²/2}[1 − (γ²β²/2 + i√2βγ sin φ)/(1+γ²)]` for real `β`.
/// `I₁ = I(Γ)` and `I₂ = I(−Γ)`.
pub fn initial_overlap(p: &MeasurementParams, beta: f64) -> C64 {
    let gamma = p.mode_weight;
    let q = 1.0 + gamma * gamma;
    let bracket =
        C64::new(1.0 - 0.5 * gamma * gamma * beta * beta / q, -SQRT_2 * beta * gamma * p.mode_phase.sin() / q);
    bracket * (-0.5 * beta * beta).exp()
}

pub fn helper_terms(p: &MeasurementParams) -> Result<HelperTerms> {
    printed::helper_terms(&Common::new(p)?, p)
}

/// SNR of postselected and non-postselected readout and their ratio χ.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Snr {
    pub chi: f64,
    pub rp: f64,
    pub rn: f64,
}

/// First and second position moments `⟨X̂⟩`, `⟨X̂²⟩`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PositionStats {
    pub mean: f64,
    pub second: f64,
}

impl PositionStats {
    /// From the a-mode moments `⟨â⟩`, `⟨â†â⟩`, `⟨â²⟩`.
    pub fn from_moments(a: C64, adag_a: C64, a2: C64, sigma: f64, convention: PositionConvention) -> Self {
        let second = match convention {
            PositionConvention::Printed => 0.5 * sigma * sigma * (adag_a.re + a2.re + 2.0),
            PositionConvention::Operator => sigma * sigma * (2.0 * adag_a.re + 2.0 * a2.re + 1.0),
        };
        Self { mean: 2.0 * sigma * a.re, second }
    }
}

/// `χ = R_p/R_n` with `R_p = √(N P_s)|δx|/Δx` and `R_n = √N|δx′|/Δx′`.
pub fn snr_from_stats(
    shots: u64,
    success_probability: f64,
    initial_mean: f64,
    post: PositionStats,
    nonpost: PositionStats,
) -> Result<Snr> {
    let n = shots as f64;
    let shift_post = post.mean - initial_mean;
    let shift_nonpost = nonpost.mean - initial_mean;
    if !(shift_nonpost.abs() >= 1e-14) {
        return Err(Error::DegenerateShift(shift_nonpost.abs()));
    }
    let var_post = post.second - post.mean * post.mean;
    let var_nonpost = nonpost.second - nonpost.mean * nonpost.mean;
    if !(var_post > 0.0) {
        return Err(Error::VarianceCollapse { which: "postselected", value: var_post });
    }
    if !(var_nonpost > 0.0) {
        return Err(Error::VarianceCollapse { which: "non-postselected", value: var_nonpost });
    }
    let rp = (n * success_probability).sqrt() * shift_post.abs() / var_post.sqrt();
    let rn = n.sqrt() * shift_nonpost.abs() / var_nonpost.sqrt();
    Ok(Snr { chi: rp / rn, rp, rn })
}

/// `⟨â†â⟩ / (⟨â†â⟩⟨b̂†b̂⟩)` guard shared by both engines.
pub fn g2_from_moments(m: &ExpectationSet) -> Result<f64> {
    let na = m.adag_a.re;
    let nb = m.bdag_b.re;
    if !(na > 1e-12 && nb > 1e-12) {
        return Err(Error::UndefinedCorrelation { na, nb });
    }
    Ok(m.adaga_bdagb.re / (na * nb))
}

/// Closed-form evaluator for one formula set and position convention.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClosedForm {
    pub formulas: FormulaSet,
    pub convention: PositionConvention,
}

impl ClosedForm {
    pub fn derived() -> Self {
        Self { formulas: FormulaSet::Derived, convention: PositionConvention::Printed }
    }

    pub fn printed() -> Self {
        Self { formulas: FormulaSet::Printed, convention: PositionConvention::Printed }
    }

    pub fn with_convention(self, convention: PositionConvention) -> Self {
        Self { convention, ..self }
    }

    /// Normalization `λ` of the postselected pointer.
    pub fn lambda(&self, p: &MeasurementParams) -> Result<f64> {
        let c = Common::new(p)?;
        let i1 = initial_overlap(p, p.coupling);
        let a2 = c.w_abs2();
        let mut bracket = 0.5 * (1.0 + a2 + (1.0 - a2) * i1.re);
        if self.formulas == FormulaSet::Derived {
            bracket -= c.w.im * i1.im;
        }
        // same threshold as the state-vector postselection guard
        if !(bracket >= 1e-28) {
            return Err(Error::DestructiveInterference(bracket.max(0.0).sqrt()));
        }
        Ok(bracket.sqrt().recip())
    }

    pub fn expectations(&self, p: &MeasurementParams) -> Result<ExpectationSet> {
        let c = Common::new(p)?;
        let lambda = self.lambda(p)?;
        match self.formulas {
            FormulaSet::Derived => Ok(LowPhotonAlgebra::new(p)?.postselected_moments(lambda)),
            FormulaSet::Printed => printed::expectations(&c, p, lambda),
        }
    }

    /// `⟨â⟩`, `⟨â†â⟩`, `⟨â²⟩` of the pointer without postselection.
    pub fn nonpostselected(&self, p: &MeasurementParams) -> Result<(C64, C64, C64)> {
        let c = Common::new(p)?;
        let g = c.g;
        let bias = p.pre_angle.sin() * p.pre_phase.cos();
        let a0 = c.initial_a();
        let a = a0 + 0.5 * g * bias;
        let number = 0.25 * g * g + 0.5 * c.gamma * c.gamma / c.q;
        Ok(match self.formulas {
            FormulaSet::Derived => (a, C64::new(number + g * bias * a0.re, 0.0), 0.25 * g * g + g * bias * a0),
            FormulaSet::Printed => (a, C64::new(number, 0.0), 0.25 * g * g + g * (1.0 + bias) * a0),
        })
    }

    pub fn squeezing(&self, p: &MeasurementParams) -> Result<Squeezing> {
        let m = self.expectations(p)?;
        Ok(match self.formulas {
            FormulaSet::Derived => Squeezing::from_moments(&m),
            FormulaSet::Printed => printed::squeezing(&m),
        })
    }

    pub fn g2_cross(&self, p: &MeasurementParams) -> Result<f64> {
        g2_from_moments(&self.expectations(p)?)
    }

    pub fn fidelity(&self, p: &MeasurementParams) -> Result<f64> {
        let c = Common::new(p)?;
        let lambda = self.lambda(p)?;
        // printed: I(±Γ); the overlap ⟨Ψᵢ|D(±Γ/2)|Ψᵢ⟩ is what enters |⟨Ψᵢ|Ψ⟩|²
        let beta = match self.formulas {
            FormulaSet::Derived => 0.5 * p.coupling,
            FormulaSet::Printed => p.coupling,
        };
        let plus = initial_overlap(p, beta);
        let minus = initial_overlap(p, -beta);
        let amp = 0.5 * lambda * ((1.0 - c.w) * minus + (1.0 + c.w) * plus);
        Ok(amp.norm_sqr())
    }

    /// SNR ratio for `shots` repetitions.
    pub fn snr_ratio(&self, p: &MeasurementParams, shots: u64) -> Result<Snr> {
        let c = Common::new(p)?;
        let m = self.expectations(p)?;
        let (a, adag_a, a2) = self.nonpostselected(p)?;
        let sigma = p.sigma;
        let post = PositionStats::from_moments(m.a, m.adag_a, m.a2, sigma, self.convention);
        let nonpost = PositionStats::from_moments(a, adag_a, a2, sigma, self.convention);
        let ps = p.weak_value()?.success_probability;
        snr_from_stats(shots, ps, 2.0 * sigma * c.initial_a().re, post, nonpost)
    }

    /// Coordinate-space wavefunction up to the overall constant.
    pub fn wavefunction_at(&self, p: &MeasurementParams, x: f64, y: f64) -> Result<C64> {
        let c = Common::new(p)?;
        Ok(match self.formulas {
            FormulaSet::Derived => derived::wavefunction(&c, p, self.lambda(p)?, x, y),
            FormulaSet::Printed => printed::wavefunction(&c, p, x, y),
        })
    }

    /// `|Ψ(x, y)|²` normalized to unit grid integral.
    pub fn intensity_field(&self, p: &MeasurementParams, grid: &GridSpec) -> Result<ScalarField<f64>> {
        grid.validate()?;
        let c = Common::new(p)?;
        let lambda = self.lambda(p)?;
        let formulas = self.formulas;
        let values = grid.sample(|x, y| {
            match formulas {
                FormulaSet::Derived => derived::wavefunction(&c, p, lambda, x, y),
                FormulaSet::Printed => printed::wavefunction(&c, p, x, y),
            }
            .norm_sqr()
        });
        ScalarField::new(*grid, FieldKind::Intensity, values)?.normalized()
    }

    /// Reduced a-mode Wigner function at `α = x + ip`, with its imaginary
    /// residue.
    pub fn wigner_at(&self, p: &MeasurementParams, x: f64, mom: f64) -> Result<(f64, f64)> {
        let c = Common::new(p)?;
        let lambda = self.lambda(p)?;
        let z = wigner_value(&c, lambda, x, mom);
        Ok((z.re, z.im))
    }

    pub fn wigner_field(&self, p: &MeasurementParams, grid: &GridSpec) -> Result<ScalarField<f64>> {
        grid.validate()?;
        let c = Common::new(p)?;
        let lambda = self.lambda(p)?;
        let samples = grid.sample(|x, mom| {
            let z = wigner_value(&c, lambda, x, mom);
            (z.re, z.im.abs())
        });
        let residue = samples.iter().map(|s| s.1).fold(0.0, f64::max);
        if residue > 1e-9 {
            return Err(Error::WignerResidue(residue));
        }
        ScalarField::new(*grid, FieldKind::Wigner, samples.mapv(|s| s.0))
    }
}

/// `W₊` and `W₋` of the displaced branches (`sign = ±1`).
fn wigner_branch(c: &Common, sign: f64, x: f64, mom: f64) -> f64 {
    let u = 2.0 * x + sign * c.g;
    let (sin_phi, cos_phi) = (c.phase.im, c.phase.re);
    let poly = 2.0
        + 2.0 * c.gamma * SQRT_2 / c.q * (u * cos_phi + 2.0 * mom * sin_phi)
        + c.gamma * c.gamma / c.q * (4.0 * mom * mom + u * u - 2.0);
    poly * (-2.0 * mom * mom - 0.5 * u * u).exp() / PI
}

/// Interference term `W₁` evaluated at coupling `g`; `W₁(−Γ)` is the
/// Hermitian partner of `W₁(Γ)`.
fn wigner_cross(c: &Common, g: f64, x: f64, mom: f64) -> C64 {
    let (sin_phi, cos_phi) = (c.phase.im, c.phase.re);
    let poly = 2.0
        + 4.0 * c.gamma * SQRT_2 / c.q * (x * cos_phi + mom * sin_phi)
        + 2.0 * c.gamma * c.gamma / c.q * (2.0 * x * x + 2.0 * mom * mom - 1.0);
    let shifted = C64::new(2.0 * mom, -g);
    let exponent = -2.0 * x * x - 0.5 * shifted * shifted;
    (-0.5 * g * g).exp() / PI * poly * exponent.exp()
}

/// `(λ²/4){|1−w|²W₊ + |1+w|²W₋ + (1+w*)(1−w)W₁ + h.c.}`, with the Hermitian
/// partner evaluated independently so the imaginary part audits the formula.
fn wigner_value(c: &Common, lambda: f64, x: f64, mom: f64) -> C64 {
    let w = c.w;
    let cross = (1.0 + w.conj()) * (1.0 - w);
    let direct =
        (1.0 - w).norm_sqr() * wigner_branch(c, 1.0, x, mom) + (1.0 + w).norm_sqr() * wigner_branch(c, -1.0, x, mom);
    let interference = cross * wigner_cross(c, c.g, x, mom) + cross.conj() * wigner_cross(c, -c.g, x, mom);
    0.25 * lambda * lambda * (direct + interference)
}

/// Derived-set closed forms with the default position convention.
pub fn lambda_norm(p: &MeasurementParams) -> Result<f64> {
    ClosedForm::derived().lambda(p)
}

pub fn expectations(p: &MeasurementParams) -> Result<ExpectationSet> {
    ClosedForm::derived().expectations(p)
}

pub fn squeezing(p: &MeasurementParams) -> Result<Squeezing> {
    ClosedForm::derived().squeezing(p)
}

pub fn g2_cross(p: &MeasurementParams) -> Result<f64> {
    ClosedForm::derived().g2_cross(p)
}

pub fn fidelity(p: &MeasurementParams) -> Result<f64> {
    ClosedForm::derived().fidelity(p)
}

pub fn snr_ratio(p: &MeasurementParams, shots: u64) -> Result<Snr> {
    ClosedForm::derived().snr_ratio(p, shots)
}

pub fn intensity_field(p: &MeasurementParams, grid: &GridSpec) -> Result<ScalarField<f64>> {
    ClosedForm::derived().intensity_field(p, grid)
}

pub fn wigner_field(p: &MeasurementParams, grid: &GridSpec) -> Result<ScalarField<f64>> {
    ClosedForm::derived().wigner_field(p, grid)
}
