//! State-vector ground truth and the closed-form comparison report.
//!
//! Nothing here evaluates an analytic moment formula: every number comes from
//! ladder operators, inner products and displacement matrices applied to the
//! truncated pointer.

use std::collections::BTreeMap;
use std::f64::consts::{FRAC_PI_2, PI};

use ndarray::Array2;
use num_complex::Complex64 as C64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::closedform::{g2_from_moments, snr_from_stats, ClosedForm, PositionConvention, PositionStats};
use crate::error::{Error, Result};
use crate::fock::{displacement_recurrence, DisplaceMethod, TwoModeState};
use crate::grid::{coordinate_wavefunction, FieldKind, GridSpec, ScalarField};
use crate::moments::{ExpectationSet, Squeezing};
use crate::weakmeas::{default_cutoff, nonpostselected_moments, MeasurementParams, Pipeline};

/// Top-level occupation above which oracle moments are reported as truncated.
pub const TRUNCATION_WARN: f64 = 1e-8;

/// Number of shots used for SNR evaluation; the ratio does not depend on it.
pub const SNR_SHOTS: u64 = 1000;

fn audit_truncation(state: &TwoModeState) {
    let top = state.top_occupation();
    if top > TRUNCATION_WARN {
        log::warn!("top Fock level holds {top:e} of the norm; moments are truncation-limited");
    }
}

/// The eleven moments by direct ladder-operator application.
pub fn oracle_expectations(state: &TwoModeState) -> ExpectationSet {
    audit_truncation(state);
    ExpectationSet::of_state(state)
}

/// `ρ_a = Tr_b |ψ⟩⟨ψ|`, normalized to unit trace.
pub fn reduced_density(state: &TwoModeState) -> Array2<C64> {
    let c = state.coeffs();
    let norm = state.norm_sqr();
    let (na, nb) = state.dims();
    Array2::from_shape_fn((na, na), |(n, k)| (0..nb).map(|m| c[(n, m)] * c[(k, m)].conj()).sum::<C64>() / norm)
}

/// Reduced a-mode Wigner function by displaced parity,
/// `W(α) = (2/π) Tr[ρ_a D(α) P D†(α)] = (2/π) Tr[ρ_a D(2α) P]` with `α = x + ip`.
pub fn oracle_wigner(state: &TwoModeState, grid: &GridSpec) -> Result<ScalarField<f64>> {
    grid.validate()?;
    audit_truncation(state);
    let rho = reduced_density(state);
    let na = rho.nrows();
    let values = grid.sample(|x, p| {
        let d = displacement_recurrence(C64::new(2.0 * x, 2.0 * p), na);
        let mut acc = C64::new(0.0, 0.0);
        for k in 0..na {
            let parity = if k.is_multiple_of(2) { 1.0 } else { -1.0 };
            let column: C64 = (0..na).map(|n| rho[(k, n)] * d[(n, k)]).sum();
            acc += parity * column;
        }
        2.0 / PI * acc.re
    });
    ScalarField::new(*grid, FieldKind::Wigner, values)
}

/// `|Ψ(x, y)|²` of the state, normalized to unit grid integral.
pub fn oracle_intensity(state: &TwoModeState, grid: &GridSpec) -> Result<ScalarField<f64>> {
    coordinate_wavefunction(state, grid)?.intensity().normalized()
}

/// Every scalar the closed forms provide, computed from state vectors.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OracleRecord {
    pub params: MeasurementParams,
    pub cutoff: usize,
    pub lambda: f64,
    /// Exact postselection probability including the interaction.
    pub probability: f64,
    pub i1: C64,
    pub i2: C64,
    pub moments: ExpectationSet,
    pub squeezing: Squeezing,
    pub g2: Option<f64>,
    pub fidelity: f64,
    /// χ with the printed `⟨X̂²⟩` assembly.
    pub chi: Option<f64>,
    /// χ with `⟨X̂²⟩` from `X̂ = σ(â + â†)`.
    pub chi_operator: Option<f64>,
    pub nonpostselected: ExpectationSet,
    pub initial_moments: ExpectationSet,
}

fn chi_of(
    params: &MeasurementParams,
    initial: &ExpectationSet,
    post: &ExpectationSet,
    nonpost: &ExpectationSet,
    convention: PositionConvention,
) -> Result<f64> {
    let sigma = params.sigma;
    let ps = params.weak_value()?.success_probability;
    let post = PositionStats::from_moments(post.a, post.adag_a, post.a2, sigma, convention);
    let nonpost = PositionStats::from_moments(nonpost.a, nonpost.adag_a, nonpost.a2, sigma, convention);
    snr_from_stats(SNR_SHOTS, ps, 2.0 * sigma * initial.a.re, post, nonpost).map(|s| s.chi)
}

/// Runs the state-vector pipeline at cutoff `na` and collects every scalar.
pub fn oracle_quantities(params: &MeasurementParams, na: usize) -> Result<OracleRecord> {
    let run = Pipeline::run(params, na, DisplaceMethod::ClosedForm)?;
    let initial = &run.initial;
    let state = run.final_state();
    let moments = oracle_expectations(state);
    let initial_moments = oracle_expectations(initial);
    let nonpostselected = nonpostselected_moments(&run.joint);
    let overlap = |beta: f64| -> Result<C64> {
        initial.inner(&initial.displace_a(C64::new(beta, 0.0), DisplaceMethod::ClosedForm).state)
    };
    let fidelity = initial.inner(state)?.norm_sqr();
    Ok(OracleRecord {
        params: *params,
        cutoff: na,
        lambda: run.postselected.normalization,
        probability: run.postselected.probability,
        i1: overlap(params.coupling)?,
        i2: overlap(-params.coupling)?,
        squeezing: Squeezing::from_moments(&moments),
        g2: g2_from_moments(&moments).ok(),
        fidelity,
        chi: chi_of(params, &initial_moments, &moments, &nonpostselected, PositionConvention::Printed).ok(),
        chi_operator: chi_of(params, &initial_moments, &moments, &nonpostselected, PositionConvention::Operator).ok(),
        moments,
        nonpostselected,
        initial_moments,
    })
}

/// `oracle_quantities` at the default cutoff for the point's coupling.
pub fn oracle_at(params: &MeasurementParams) -> Result<OracleRecord> {
    oracle_quantities(params, default_cutoff(params.coupling))
}

/// Named scalars in report order. Undefined quantities are `None`.
pub type Scalars = Vec<(String, Option<C64>)>;

fn real(v: f64) -> Option<C64> {
    Some(C64::new(v, 0.0))
}

fn moment_scalars(prefix: &str, m: &ExpectationSet, out: &mut Scalars) {
    for (name, v) in m.named() {
        out.push((format!("{prefix}{name}"), Some(v)));
    }
}

impl OracleRecord {
    /// χ under `convention`, keeping the reason when it is undefined.
    pub fn chi_with(&self, convention: PositionConvention) -> Result<f64> {
        chi_of(&self.params, &self.initial_moments, &self.moments, &self.nonpostselected, convention)
    }

    /// g⁽²⁾ of the postselected state, keeping the reason when it is undefined.
    pub fn g2_checked(&self) -> Result<f64> {
        g2_from_moments(&self.moments)
    }

    pub fn scalars(&self) -> Scalars {
        let mut out = Vec::new();
        moment_scalars("", &self.moments, &mut out);
        out.push(("lambda".into(), real(self.lambda)));
        out.push(("probability".into(), real(self.probability)));
        out.push(("I1".into(), Some(self.i1)));
        out.push(("I2".into(), Some(self.i2)));
        out.push(("Q1".into(), real(self.squeezing.q1)));
        out.push(("Q2".into(), real(self.squeezing.q2)));
        out.push(("g2".into(), self.g2.and_then(real)));
        out.push(("fidelity".into(), real(self.fidelity)));
        out.push(("chi".into(), self.chi.and_then(real)));
        out.push(("chi_operator".into(), self.chi_operator.and_then(real)));
        out.push(("nonpost_a".into(), Some(self.nonpostselected.a)));
        out.push(("nonpost_adag_a".into(), Some(self.nonpostselected.adag_a)));
        out.push(("nonpost_a2".into(), Some(self.nonpostselected.a2)));
        out
    }
}

/// The same scalars from a closed-form evaluator, in the same order as
/// [`OracleRecord::scalars`].
pub fn closed_scalars(cf: &ClosedForm, p: &MeasurementParams) -> Result<Scalars> {
    let m = cf.expectations(p)?;
    let lambda = cf.lambda(p)?;
    let ps = p.weak_value()?.success_probability;
    let q = cf.squeezing(p)?;
    let helpers = crate::closedform::helper_terms(p)?;
    let operator = cf.with_convention(PositionConvention::Operator);
    let printed = cf.with_convention(PositionConvention::Printed);
    let (na, nn, n2) = cf.nonpostselected(p)?;
    let mut out = Vec::new();
    moment_scalars("", &m, &mut out);
    out.push(("lambda".into(), real(lambda)));
    out.push(("probability".into(), real(ps / (lambda * lambda))));
    out.push(("I1".into(), Some(helpers.i1)));
    out.push(("I2".into(), Some(helpers.i2)));
    out.push(("Q1".into(), real(q.q1)));
    out.push(("Q2".into(), real(q.q2)));
    out.push(("g2".into(), cf.g2_cross(p).ok().and_then(real)));
    out.push(("fidelity".into(), real(cf.fidelity(p)?)));
    out.push(("chi".into(), printed.snr_ratio(p, SNR_SHOTS).ok().and_then(|s| real(s.chi))));
    out.push(("chi_operator".into(), operator.snr_ratio(p, SNR_SHOTS).ok().and_then(|s| real(s.chi))));
    out.push(("nonpost_a".into(), Some(na)));
    out.push(("nonpost_adag_a".into(), Some(nn)));
    out.push(("nonpost_a2".into(), Some(n2)));
    Ok(out)
}

/// Quantities allowed to fail without failing the run.
pub const DEFAULT_WHITELIST: [&str; 2] = ["adag2a2", "chi_x2_printed"];

/// The 200-point validation set: a Halton sequence (bases 2, 3, 5) over
/// `Γ ∈ [0, 2]`, `α ∈ [0, 0.95π]`, `γ ∈ [0, 2]`, with `δ` and `φ` cycling
/// through `{0, π/2}²`.
pub fn validation_set() -> Vec<MeasurementParams> {
    (1..=200)
        .map(|i: usize| {
            let k = i - 1;
            MeasurementParams {
                coupling: 2.0 * radical_inverse(i, 2),
                pre_angle: 0.95 * PI * radical_inverse(i, 3),
                pre_phase: if k.is_multiple_of(2) { 0.0 } else { FRAC_PI_2 },
                mode_phase: if (k / 2).is_multiple_of(2) { 0.0 } else { FRAC_PI_2 },
                mode_weight: 2.0 * radical_inverse(i, 5),
                sigma: 1.0,
            }
        })
        .collect()
}

/// Van der Corput radical inverse of `i` in `base`.
pub fn radical_inverse(mut i: usize, base: usize) -> f64 {
    let inv = 1.0 / base as f64;
    let mut scale = inv;
    let mut out = 0.0;
    while i > 0 {
        out += (i % base) as f64 * scale;
        i /= base;
        scale *= inv;
    }
    out
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    pub abs: f64,
    pub rel: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self { abs: 1e-10, rel: 1e-8 }
    }
}

impl Tolerances {
    pub fn accepts(&self, abs_delta: f64, rel_delta: f64) -> bool {
        abs_delta <= self.abs || rel_delta <= self.rel
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReportEntry {
    pub quantity: String,
    pub point: usize,
    pub params: MeasurementParams,
    pub closed: Option<C64>,
    pub oracle: Option<C64>,
    pub abs_delta: f64,
    pub rel_delta: f64,
    pub pass: bool,
    pub whitelisted: bool,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct QuantitySummary {
    pub pass: usize,
    pub fail: usize,
    /// Points where exactly one side is undefined (e.g. a collapsed variance).
    pub definedness_mismatch: usize,
    /// Largest deltas over points where both sides are defined.
    pub max_abs_delta: f64,
    pub max_rel_delta: f64,
    pub whitelisted: bool,
}

/// Worst residual of one printed expression against the oracle.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct AuditLine {
    pub within_tolerance: usize,
    pub outside_tolerance: usize,
    pub definedness_mismatch: usize,
    pub max_abs_delta: f64,
    pub worst_point: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub tolerances: Tolerances,
    pub whitelist: Vec<String>,
    pub entries: Vec<ReportEntry>,
    pub summary: BTreeMap<String, QuantitySummary>,
    /// Residuals of the verbatim published formulas; informational only.
    pub printed_audit: BTreeMap<String, AuditLine>,
    /// Truncation check run alongside the comparison, when requested.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cutoff_check: Option<CutoffCheck>,
}

impl ValidationReport {
    /// True when every failing entry belongs to a whitelisted quantity.
    pub fn passed(&self) -> bool {
        self.entries.iter().all(|e| e.pass || e.whitelisted)
    }

    pub fn failures(&self) -> impl Iterator<Item = &ReportEntry> {
        self.entries.iter().filter(|e| !e.pass)
    }

    pub fn to_json(&self) -> serde_json::Result<String> {
        serde_json::to_string_pretty(self)
    }
}

/// What [`compare`] evaluates beyond the scalar quantities.
#[derive(Clone, Debug, PartialEq)]
pub struct CompareOptions {
    pub tolerances: Tolerances,
    pub whitelist: Vec<String>,
    /// Fixed cutoff; `None` picks [`default_cutoff`] per point.
    pub cutoff: Option<usize>,
    /// Grid for the field max-deviation entries; `None` skips fields.
    pub field_grid: Option<GridSpec>,
}

impl Default for CompareOptions {
    fn default() -> Self {
        Self {
            tolerances: Tolerances::default(),
            whitelist: DEFAULT_WHITELIST.iter().map(|s| s.to_string()).collect(),
            cutoff: None,
            field_grid: GridSpec::square(6.0, 41).ok(),
        }
    }
}

fn deltas(closed: Option<C64>, oracle: Option<C64>) -> (f64, f64) {
    match (closed, oracle) {
        (None, None) => (0.0, 0.0),
        (Some(c), Some(o)) => {
            let abs = (c - o).norm();
            let rel = if abs == 0.0 { 0.0 } else { abs / o.norm() };
            (abs, rel)
        }
        _ => (f64::INFINITY, f64::INFINITY),
    }
}

/// `(quantity, closed, oracle)` triples.
type Paired = Vec<(String, Option<C64>, Option<C64>)>;

struct PointResult {
    derived: Paired,
    printed: Paired,
}

fn evaluate_point(p: &MeasurementParams, opts: &CompareOptions) -> Result<PointResult> {
    let na = opts.cutoff.unwrap_or_else(|| default_cutoff(p.coupling));
    let record = oracle_quantities(p, na)?;
    let oracle = record.scalars();
    let pair = |cf: &ClosedForm| -> Result<Paired> {
        Ok(closed_scalars(cf, p)?.into_iter().zip(oracle.iter()).map(|((name, c), (_, o))| (name, c, *o)).collect())
    };
    let mut derived = pair(&ClosedForm::derived())?;
    let printed = pair(&ClosedForm::printed())?;
    // printed ⟨X̂²⟩ assembly against the operator-exact oracle χ
    let chi_closed = derived.iter().find(|e| e.0 == "chi").and_then(|e| e.1);
    derived.push(("chi_x2_printed".into(), chi_closed, record.chi_operator.and_then(real)));

    if let Some(grid) = &opts.field_grid {
        let run = Pipeline::run(p, na, DisplaceMethod::ClosedForm)?;
        let state = run.final_state();
        let wigner = ClosedForm::derived().wigner_field(p, grid)?;
        let wigner_dev = wigner.max_abs_diff(&oracle_wigner(state, grid)?);
        let intensity = ClosedForm::derived().intensity_field(p, grid)?;
        let intensity_dev = intensity.max_abs_diff(&oracle_intensity(state, grid)?);
        let printed_intensity = ClosedForm::printed().intensity_field(p, grid)?;
        let printed_dev = printed_intensity.max_abs_diff(&oracle_intensity(state, grid)?);
        derived.push(("wigner_field".into(), real(wigner_dev), real(0.0)));
        derived.push(("intensity_field".into(), real(intensity_dev), real(0.0)));
        let mut printed_fields = printed;
        printed_fields.push(("intensity_field".into(), real(printed_dev), real(0.0)));
        return Ok(PointResult { derived, printed: printed_fields });
    }
    Ok(PointResult { derived, printed })
}

/// Evaluates the derived closed forms and the oracle at every point and
/// records per-quantity agreement. Printed-formula residuals go to the audit
/// section and never affect pass/fail.
pub fn compare(points: &[MeasurementParams], opts: &CompareOptions) -> Result<ValidationReport> {
    if points.is_empty() {
        return Err(Error::EmptyParameterSet);
    }
    let results: Vec<PointResult> = points.par_iter().map(|p| evaluate_point(p, opts)).collect::<Result<_>>()?;

    let tol = &opts.tolerances;
    let mut entries = Vec::new();
    let mut summary: BTreeMap<String, QuantitySummary> = BTreeMap::new();
    let mut printed_audit: BTreeMap<String, AuditLine> = BTreeMap::new();
    for (point, (p, result)) in points.iter().zip(&results).enumerate() {
        for (quantity, closed, oracle) in &result.derived {
            let (abs_delta, rel_delta) = deltas(*closed, *oracle);
            let pass = tol.accepts(abs_delta, rel_delta);
            let whitelisted = opts.whitelist.iter().any(|w| w == quantity);
            let s = summary.entry(quantity.clone()).or_default();
            if pass {
                s.pass += 1;
            } else {
                s.fail += 1;
            }
            s.whitelisted = whitelisted;
            if abs_delta.is_finite() {
                s.max_abs_delta = s.max_abs_delta.max(abs_delta);
                if rel_delta.is_finite() {
                    s.max_rel_delta = s.max_rel_delta.max(rel_delta);
                }
            } else {
                s.definedness_mismatch += 1;
            }
            entries.push(ReportEntry {
                quantity: quantity.clone(),
                point,
                params: *p,
                closed: *closed,
                oracle: *oracle,
                abs_delta,
                rel_delta,
                pass,
                whitelisted,
            });
        }
        for (quantity, closed, oracle) in &result.printed {
            let (abs_delta, rel_delta) = deltas(*closed, *oracle);
            let line = printed_audit.entry(quantity.clone()).or_default();
            if tol.accepts(abs_delta, rel_delta) {
                line.within_tolerance += 1;
            } else {
                line.outside_tolerance += 1;
            }
            if !abs_delta.is_finite() {
                line.definedness_mismatch += 1;
            } else if abs_delta > line.max_abs_delta || line.worst_point.is_none() {
                line.max_abs_delta = line.max_abs_delta.max(abs_delta);
                line.worst_point = Some(point);
            }
        }
    }
    Ok(ValidationReport {
        tolerances: tol.clone(),
        whitelist: opts.whitelist.clone(),
        entries,
        summary,
        printed_audit,
        cutoff_check: None,
    })
}

/// Largest change of any oracle scalar when the cutoff is doubled.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CutoffCheck {
    pub max_change: f64,
    pub quantity: String,
    pub point: usize,
}

pub fn cutoff_self_check(points: &[MeasurementParams], cutoff: Option<usize>) -> Result<CutoffCheck> {
    if points.is_empty() {
        return Err(Error::EmptyParameterSet);
    }
    let changes: Vec<(f64, String)> = points
        .par_iter()
        .map(|p| {
            let na = cutoff.unwrap_or_else(|| default_cutoff(p.coupling));
            let base = oracle_quantities(p, na)?.scalars();
            let doubled = oracle_quantities(p, 2 * na)?.scalars();
            let mut worst = (0.0, String::new());
            for ((name, a), (_, b)) in base.into_iter().zip(doubled) {
                let (abs, _) = deltas(a, b);
                if abs > worst.0 || worst.1.is_empty() {
                    worst = (abs.max(worst.0), name);
                }
            }
            Ok(worst)
        })
        .collect::<Result<_>>()?;
    let (point, (max_change, quantity)) =
        changes.into_iter().enumerate().max_by(|a, b| a.1 .0.total_cmp(&b.1 .0)).expect("nonempty");
    Ok(CutoffCheck { max_change, quantity, point })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn vacuum_and_fock_wigner() {
        let grid = GridSpec::new(-1.0, 1.0, -1.0, 1.0, 5, 5).unwrap();
        let vac = TwoModeState::vacuum(20, 2, 1.0).unwrap();
        let w = oracle_wigner(&vac, &grid).unwrap();
        for i in 0..5 {
            for j in 0..5 {
                let (x, p) = (grid.x(i), grid.y(j));
                let exact = 2.0 / PI * (-2.0 * (x * x + p * p)).exp();
                assert!((w.values[(i, j)] - exact).abs() < 1e-14);
            }
        }
        let one = TwoModeState::fock(20, 2, 1.0, 1, 0).unwrap();
        let w = oracle_wigner(&one, &grid).unwrap();
        assert!((w.values[(2, 2)] + 2.0 / PI).abs() < 1e-14);
    }

    #[test]
    fn coherent_moments() {
        let vac = TwoModeState::vacuum(40, 2, 1.0).unwrap();
        let coh = vac.displace_a(C64::new(0.5, 0.0), DisplaceMethod::ClosedForm).state;
        let m = oracle_expectations(&coh);
        assert!((m.a - 0.5).norm() < 1e-14);
        assert!((m.adag_a - 0.25).norm() < 1e-14);
        assert!((m.a2 - 0.25).norm() < 1e-14);
    }

    #[test]
    fn initial_pointer_cross_moment() {
        let p = MeasurementParams::default();
        let state = crate::weakmeas::initial_pointer(&p, 4).unwrap();
        let m = oracle_expectations(&state);
        assert!((m.adag_b - C64::new(0.0, 0.25)).norm() < 1e-15);
    }

    #[test]
    fn reduced_density_has_unit_trace() {
        let p = MeasurementParams::default().with_coupling(1.3).with_pre_angle(2.0);
        let run = Pipeline::run(&p, 40, DisplaceMethod::ClosedForm).unwrap();
        let rho = reduced_density(run.final_state());
        let trace: C64 = rho.diag().sum();
        assert!((trace - 1.0).norm() < 1e-12);
    }

    #[test]
    fn radical_inverse_digits() {
        assert_eq!(radical_inverse(1, 2), 0.5);
        assert_eq!(radical_inverse(3, 2), 0.75);
        assert!((radical_inverse(5, 3) - (2.0 / 3.0 + 1.0 / 9.0)).abs() < 1e-15);
    }

    #[test]
    fn validation_set_covers_domain() {
        let set = validation_set();
        assert_eq!(set.len(), 200);
        for p in &set {
            p.validate().unwrap();
            assert!(p.coupling <= 2.0 && p.pre_angle <= 0.95 * PI && p.mode_weight <= 2.0);
        }
        for phases in [(0.0, 0.0), (FRAC_PI_2, 0.0), (0.0, FRAC_PI_2), (FRAC_PI_2, FRAC_PI_2)] {
            assert_eq!(set.iter().filter(|p| (p.pre_phase, p.mode_phase) == phases).count(), 50);
        }
    }

    #[test]
    fn compare_rejects_empty_set() {
        assert_eq!(compare(&[], &CompareOptions::default()), Err(Error::EmptyParameterSet));
    }

    #[test]
    fn identity_point_passes() {
        let p = MeasurementParams::default().with_pre_angle(1.1).with_mode_phase(0.4);
        let report = compare(&[p], &CompareOptions::default()).unwrap();
        assert!(report.entries.iter().all(|e| e.pass), "{:?}", report.failures().collect::<Vec<_>>());
    }
}
