//! The measurement pipeline on explicit state vectors: initial LG-superposition
//! pointer, von Neumann coupling `σ̂ₓ ⊗ P̂ₓ`, and postselection onto `|H⟩`.

use std::f64::consts::{FRAC_1_SQRT_2, PI};

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fock::{DisplaceMethod, TwoModeState};
use crate::moments::ExpectationSet;

/// Scalar knobs of one experiment configuration.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MeasurementParams {
    /// Coupling strength Γ = gt/σ.
    pub coupling: f64,
    /// Preselection polar angle α ∈ [0, π).
    pub pre_angle: f64,
    /// Preselection relative phase δ ∈ [0, 2π].
    pub pre_phase: f64,
    /// Relative phase φ of the LG₀₁ component.
    pub mode_phase: f64,
    /// Amplitude weight γ of the LG₀₁ component.
    pub mode_weight: f64,
    /// Beam waist σ.
    pub sigma: f64,
}

impl Default for MeasurementParams {
    fn default() -> Self {
        Self { coupling: 0.0, pre_angle: 0.0, pre_phase: 0.0, mode_phase: 0.0, mode_weight: 1.0, sigma: 1.0 }
    }
}

fn domain(name: &'static str, value: f64, ok: bool, domain: &'static str) -> Result<()> {
    if ok && value.is_finite() {
        Ok(())
    } else {
        Err(Error::Parameter { name, value, domain })
    }
}

impl MeasurementParams {
    pub fn new(
        coupling: f64,
        pre_angle: f64,
        pre_phase: f64,
        mode_phase: f64,
        mode_weight: f64,
        sigma: f64,
    ) -> Result<Self> {
        let p = Self { coupling, pre_angle, pre_phase, mode_phase, mode_weight, sigma };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        domain("Gamma", self.coupling, self.coupling >= 0.0, "[0, inf)")?;
        domain("alpha", self.pre_angle, (0.0..PI).contains(&self.pre_angle), "[0, pi)")?;
        domain("delta", self.pre_phase, (0.0..=2.0 * PI).contains(&self.pre_phase), "[0, 2pi]")?;
        domain("phi", self.mode_phase, (0.0..=2.0 * PI).contains(&self.mode_phase), "[0, 2pi]")?;
        domain("gamma", self.mode_weight, self.mode_weight >= 0.0, "[0, inf)")?;
        domain("sigma", self.sigma, self.sigma > 0.0, "(0, inf)")?;
        Ok(())
    }

    pub fn with_coupling(self, coupling: f64) -> Self {
        Self { coupling, ..self }
    }

    pub fn with_pre_angle(self, pre_angle: f64) -> Self {
        Self { pre_angle, ..self }
    }

    pub fn with_pre_phase(self, pre_phase: f64) -> Self {
        Self { pre_phase, ..self }
    }

    pub fn with_mode_phase(self, mode_phase: f64) -> Self {
        Self { mode_phase, ..self }
    }

    pub fn with_mode_weight(self, mode_weight: f64) -> Self {
        Self { mode_weight, ..self }
    }

    pub fn with_sigma(self, sigma: f64) -> Self {
        Self { sigma, ..self }
    }

    pub fn weak_value(&self) -> Result<WeakValue> {
        weak_value(self.pre_angle, self.pre_phase)
    }

    /// Displacement amplitude Γ/2 applied to each branch.
    pub fn half_shift(&self) -> f64 {
        0.5 * self.coupling
    }

    /// `⟨D|ψᵢ⟩` and `⟨A|ψᵢ⟩` for `|ψᵢ⟩ = cos(α/2)|H⟩ + e^{iδ} sin(α/2)|V⟩`.
    pub fn diagonal_amplitudes(&self) -> (C64, C64) {
        let c = C64::new((0.5 * self.pre_angle).cos(), 0.0);
        let s = C64::from_polar((0.5 * self.pre_angle).sin(), self.pre_phase);
        ((c + s) * FRAC_1_SQRT_2, (c - s) * FRAC_1_SQRT_2)
    }
}

/// Weak value of `σ̂ₓ` for preselection `|ψᵢ⟩` and postselection `|H⟩`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct WeakValue {
    pub value: C64,
    /// Pre-interaction postselection probability `|⟨H|ψᵢ⟩|² = cos²(α/2)`.
    pub success_probability: f64,
}

pub fn weak_value(pre_angle: f64, pre_phase: f64) -> Result<WeakValue> {
    domain("alpha", pre_angle, (0.0..PI).contains(&pre_angle), "[0, pi)")?;
    domain("delta", pre_phase, (0.0..=2.0 * PI).contains(&pre_phase), "[0, 2pi]")?;
    let half = 0.5 * pre_angle;
    Ok(WeakValue { value: C64::from_polar(half.tan(), pre_phase), success_probability: half.cos().powi(2) })
}

/// Default a-mode cutoff for couplings up to `max_coupling`:
/// `max(40, ⌈(Γ/2 + 6)²⌉)`.
pub fn default_cutoff(max_coupling: f64) -> usize {
    let reach = 0.5 * max_coupling.abs() + 6.0;
    40usize.max((reach * reach).ceil() as usize)
}

/// `(|0⟩ + γe^{iφ}/√2 |1⟩)|0⟩ + iγe^{iφ}/√2 |0⟩|1⟩`, normalized by `(1+γ²)^{−1/2}`.
pub fn initial_pointer(params: &MeasurementParams, na: usize) -> Result<TwoModeState> {
    params.validate()?;
    if na < 2 {
        return Err(Error::Dimensions { na, nb: 2 });
    }
    let mut state = TwoModeState::zeros(na, 2, params.sigma)?.into_coeffs();
    let norm = (1.0 + params.mode_weight * params.mode_weight).sqrt().recip();
    let lg = C64::from_polar(params.mode_weight * FRAC_1_SQRT_2, params.mode_phase);
    state[(0, 0)] = C64::new(norm, 0.0);
    state[(1, 0)] = lg * norm;
    state[(0, 1)] = C64::i() * lg * norm;
    TwoModeState::from_coeffs(state, params.sigma)
}

/// System ⊗ pointer after the coupling, written in the `{|D⟩, |A⟩}` basis:
/// `|Φ⟩ = ⟨D|ψᵢ⟩ |D⟩ ⊗ D(Γ/2)|Ψᵢ⟩ + ⟨A|ψᵢ⟩ |A⟩ ⊗ D(−Γ/2)|Ψᵢ⟩`.
#[derive(Clone, Debug)]
pub struct JointState {
    pub branch_plus: TwoModeState,
    pub branch_minus: TwoModeState,
    pub amp_plus: C64,
    pub amp_minus: C64,
    /// Worst displacement norm drift of the two branches.
    pub norm_drift: f64,
}

impl JointState {
    pub fn norm_sqr(&self) -> f64 {
        self.amp_plus.norm_sqr() * self.branch_plus.norm_sqr()
            + self.amp_minus.norm_sqr() * self.branch_minus.norm_sqr()
    }
}

pub fn evolve_joint(pointer: &TwoModeState, params: &MeasurementParams, method: DisplaceMethod) -> Result<JointState> {
    params.validate()?;
    let shift = C64::new(params.half_shift(), 0.0);
    let plus = pointer.displace_a(shift, method);
    let minus = pointer.displace_a(-shift, method);
    let (amp_plus, amp_minus) = params.diagonal_amplitudes();
    Ok(JointState {
        norm_drift: plus.norm_drift.max(minus.norm_drift),
        branch_plus: plus.state,
        branch_minus: minus.state,
        amp_plus,
        amp_minus,
    })
}

/// Normalized pointer after a successful postselection onto `|H⟩`.
#[derive(Clone, Debug)]
pub struct Postselected {
    pub state: TwoModeState,
    /// Exact success probability `‖⟨H|Φ⟩‖²`, interaction included.
    pub probability: f64,
    /// Normalization `λ` such that `|Ψ⟩ = (λ/2)[(1+w)D(Γ/2) + (1−w)D(−Γ/2)]|Ψᵢ⟩`.
    pub normalization: f64,
}

pub fn postselect(joint: &JointState, params: &MeasurementParams) -> Result<Postselected> {
    // ⟨H|D⟩ = ⟨H|A⟩ = 1/√2
    let projected = joint.branch_plus.combine(
        joint.amp_plus * FRAC_1_SQRT_2,
        &joint.branch_minus,
        joint.amp_minus * FRAC_1_SQRT_2,
    )?;
    let probability = projected.norm_sqr();
    // (λ/2)[…] with the cos(α/2) of ⟨H|ψᵢ⟩ divided out
    let overlap = (0.5 * params.pre_angle).cos();
    let unnormalized = probability.sqrt() / overlap;
    if !(unnormalized >= 1e-14) {
        return Err(Error::DestructiveInterference(unnormalized));
    }
    Ok(Postselected { state: projected.normalize()?, probability, normalization: unnormalized.recip() })
}

/// Pointer moments without postselection: the system qubit is traced out,
/// leaving the mixture of the two displaced branches.
pub fn nonpostselected_moments(joint: &JointState) -> ExpectationSet {
    ExpectationSet::mixture(&[
        (joint.amp_plus.norm_sqr(), ExpectationSet::of_state(&joint.branch_plus)),
        (joint.amp_minus.norm_sqr(), ExpectationSet::of_state(&joint.branch_minus)),
    ])
}

/// Everything the oracle needs for one parameter point.
#[derive(Clone, Debug)]
pub struct Pipeline {
    pub params: MeasurementParams,
    pub initial: TwoModeState,
    pub joint: JointState,
    pub postselected: Postselected,
}

impl Pipeline {
    pub fn run(params: &MeasurementParams, na: usize, method: DisplaceMethod) -> Result<Self> {
        let initial = initial_pointer(params, na)?;
        let joint = evolve_joint(&initial, params, method)?;
        let postselected = postselect(&joint, params)?;
        Ok(Self { params: *params, initial, joint, postselected })
    }

    pub fn final_state(&self) -> &TwoModeState {
        &self.postselected.state
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn weak_value_examples() {
        let w = weak_value(8.0 * PI / 9.0, 0.0).unwrap();
        assert!((w.value.re - 5.671).abs() < 1e-3);
        assert_eq!(w.value.im, 0.0);
        assert_eq!(weak_value(0.0, 1.3).unwrap().value.norm(), 0.0);
        let w = weak_value(11.0 * PI / 12.0, 0.0).unwrap();
        assert!((w.value.re - 7.596).abs() < 1e-3);
        assert!(weak_value(PI, 0.0).is_err());
        assert!(weak_value(-0.1, 0.0).is_err());
        assert!(weak_value(1.0, 7.0).is_err());
    }

    #[test]
    fn weak_value_invariants() {
        for &(a, d) in &[(0.3, 0.0), (1.2, 2.0), (2.9, 6.0)] {
            let w = weak_value(a, d).unwrap();
            assert!((w.value.norm() - (a / 2.0).tan()).abs() < 1e-14);
            assert!((w.success_probability - (a / 2.0).cos().powi(2)).abs() < 1e-15);
        }
    }

    #[test]
    fn params_domain() {
        assert!(MeasurementParams::new(0.3, 1.0, 0.0, 0.0, 1.0, 1.0).is_ok());
        assert!(MeasurementParams::new(-0.1, 1.0, 0.0, 0.0, 1.0, 1.0).is_err());
        assert!(MeasurementParams::new(0.3, PI, 0.0, 0.0, 1.0, 1.0).is_err());
        assert!(MeasurementParams::new(0.3, 1.0, 0.0, 0.0, -1.0, 1.0).is_err());
        assert!(MeasurementParams::new(0.3, 1.0, 0.0, 0.0, 1.0, 0.0).is_err());
    }

    #[test]
    fn initial_pointer_examples() {
        let p = MeasurementParams::default().with_mode_weight(0.0);
        let s = initial_pointer(&p, 4).unwrap();
        assert_eq!(s, TwoModeState::vacuum(4, 2, 1.0).unwrap());

        let p = MeasurementParams::default();
        let s = initial_pointer(&p, 4).unwrap();
        let c = s.coeffs();
        assert!((c[(0, 0)] - FRAC_1_SQRT_2).norm() < 1e-15);
        assert!((c[(1, 0)] - 0.5).norm() < 1e-15);
        assert!((c[(0, 1)] - C64::new(0.0, 0.5)).norm() < 1e-15);
        assert!((s.norm() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn cutoff_policy() {
        assert_eq!(default_cutoff(0.0), 40);
        assert_eq!(default_cutoff(2.0), 49);
        assert_eq!(default_cutoff(4.0), 64);
    }

    #[test]
    fn identity_coupling_returns_initial_pointer() {
        let p = MeasurementParams::new(0.0, 2.0, 1.0, 0.7, 1.3, 1.0).unwrap();
        let run = Pipeline::run(&p, 40, DisplaceMethod::ClosedForm).unwrap();
        assert!(run.final_state().distance(&run.initial).unwrap() < 1e-14);
        assert!((run.postselected.normalization - 1.0).abs() < 1e-14);
        let ps = p.weak_value().unwrap().success_probability;
        assert!((run.postselected.probability - ps).abs() < 1e-14);
    }

    #[test]
    fn displaced_vacuum_branches() {
        let p = MeasurementParams::default().with_mode_weight(0.0).with_coupling(1.0);
        let init = initial_pointer(&p, 40).unwrap();
        let joint = evolve_joint(&init, &p, DisplaceMethod::ClosedForm).unwrap();
        let a_plus = ExpectationSet::of_state(&joint.branch_plus).a;
        let a_minus = ExpectationSet::of_state(&joint.branch_minus).a;
        assert!((a_plus - 0.5).norm() < 1e-14);
        assert!((a_minus + 0.5).norm() < 1e-14);
    }
}
