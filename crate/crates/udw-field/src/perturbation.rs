//! Kraus kernels of the measurement map and POVM expectation values.
//!
//! Projectively measuring the detector after the coupling induces a field
//! operator `M = ⟨s|U|ψ⟩` whose perturbative orders are the kernels held
//! here; POVM weights are `⟨E⟩ = ⟨M†M⟩`, expanded through λ².

use crate::detector::{matrix_element, DetectorSpec, DetectorVector};
use crate::fieldstate::Field;
use crate::kernels::{Bracket, EngineOpts, SandwichEngine};
use crate::profiles::DEFAULT_SUPPORT_LEVEL;
use crate::series::PertSeries;
use crate::spacetime::{region_of, InteractionRegion};
use crate::{C64, Error, Result, IM};

/// Tolerance below which an outcome overlap counts as orthogonal and the
/// λ²-leading expansions take over.
pub const ORTHOGONALITY_THRESHOLD: f64 = 1e-8;

/// Imaginary residues above this size indicate a broken expectation value.
pub const IMAG_TOLERANCE: f64 = 1e-10;

/// A measurement: detector coupling, initial state, outcome projector, and
/// the region where the projective readout happens.
#[derive(Clone, Debug)]
pub struct MeasurementSpec {
    pub detector: DetectorSpec,
    /// Initial detector state |ψ⟩.
    pub psi: DetectorVector,
    /// Outcome state |s⟩ (the complementary outcome is its orthogonal).
    pub s: DetectorVector,
    /// Where the projective measurement happens; its causal future is the
    /// region where selective updates apply.
    pub measurement_region: InteractionRegion,
}

impl MeasurementSpec {
    /// Standard geometry: the readout happens at the switch-off time, over
    /// the smearing support.
    pub fn standard(detector: DetectorSpec, psi: DetectorVector, s: DetectorVector) -> Result<Self> {
        let region = region_of(&detector.chi, &detector.smearing)?;
        let measurement_region = InteractionRegion::new(
            region.t_off,
            region.t_off,
            region.spatial_center.clone(),
            region.spatial_radius,
            region.effective_support_level,
        )?;
        Ok(MeasurementSpec { detector, psi, s, measurement_region })
    }

    /// Override the readout region; it must not precede the switch-off.
    pub fn with_measurement_region(mut self, region: InteractionRegion) -> Result<Self> {
        let (_, t_off) = self.detector.chi.support_interval(DEFAULT_SUPPORT_LEVEL);
        if region.t_on < t_off - 1e-12 {
            return Err(Error::InvalidConfiguration(format!(
                "measurement at t = {} precedes switch-off at t = {t_off}",
                region.t_on
            )));
        }
        self.measurement_region = region;
        Ok(self)
    }

    /// Interaction region of the coupling.
    pub fn interaction_region(&self) -> Result<InteractionRegion> {
        region_of(&self.detector.chi, &self.detector.smearing)
    }

    pub fn sbar(&self) -> DetectorVector {
        self.s.orthogonal()
    }

    /// Complementary-outcome measurement (same geometry).
    pub fn complement(&self) -> MeasurementSpec {
        MeasurementSpec {
            detector: self.detector.clone(),
            psi: self.psi,
            s: self.sbar(),
            measurement_region: self.measurement_region.clone(),
        }
    }

    pub fn is_orthogonal(&self) -> bool {
        self.s.inner(&self.psi).norm() < ORTHOGONALITY_THRESHOLD
    }
}

/// Order-0/1/2 kernel representation of the measurement operator.
///
/// `k1` and `k2` evaluate the integrand kernels pointwise; they are the
/// contract surface (support checks, delta collapse is handled by the
/// integration engine, which never calls them on delta profiles).
pub struct KrausKernels {
    pub c0: C64,
    pub spec: DetectorSpec,
    pub s: DetectorVector,
    pub psi: DetectorVector,
}

impl KrausKernels {
    pub fn build(m: &MeasurementSpec) -> KrausKernels {
        KrausKernels {
            c0: m.s.inner(&m.psi),
            spec: m.detector.clone(),
            s: m.s,
            psi: m.psi,
        }
    }

    /// First-order kernel `K₁(t, x) = −i χ(t) F(x) ⟨s|μ(t)|ψ⟩`.
    pub fn k1(&self, t: f64, x: &[f64]) -> Result<C64> {
        let chi = self.spec.chi.eval1(t)?;
        let f = self.spec.smearing.eval(x)?;
        Ok(-IM * chi * f * matrix_element(&self.s, &[t], &self.psi, self.spec.gap))
    }

    /// Second-order kernel
    /// `K₂ = −θ(t−t') χ(t)χ(t') F(x)F(x') ⟨s|μ(t)μ(t')|ψ⟩`, θ(0) = 1/2.
    pub fn k2(&self, t: f64, x: &[f64], tp: f64, xp: &[f64]) -> Result<C64> {
        let theta = if t > tp {
            1.0
        } else if t == tp {
            0.5
        } else {
            0.0
        };
        if theta == 0.0 {
            return Ok(C64::new(0.0, 0.0));
        }
        let chi = self.spec.chi.eval1(t)? * self.spec.chi.eval1(tp)?;
        let f = self.spec.smearing.eval(x)? * self.spec.smearing.eval(xp)?;
        Ok(-C64::from(theta * chi * f)
            * matrix_element(&self.s, &[t, tp], &self.psi, self.spec.gap))
    }
}

/// POVM expectation series: coefficients of λ⁰, λ¹, λ² in `⟨E_{s,ψ}⟩` (plus
/// the cubic coefficient used by orthogonal branches).
pub fn povm_series(field: &Field, m: &MeasurementSpec) -> Result<crate::kernels::SandwichSeries> {
    let engine = SandwichEngine::new(field, &m.detector, EngineOpts::default())?;
    engine.sandwich_series(Bracket::Selective { s: m.s, psi: m.psi }, &[])
}

/// POVM expectation value truncated at the requested order in λ.
pub fn povm_expectation(field: &Field, m: &MeasurementSpec, order: usize) -> Result<f64> {
    if order > 2 {
        return Err(Error::InvalidConfiguration("orders above 2 are out of scope".into()));
    }
    let series = povm_series(field, m)?;
    let lambda = m.detector.coupling;
    let mut acc = C64::new(0.0, 0.0);
    for k in 0..=order {
        acc += series.k[k] * lambda.powi(k as i32);
    }
    if acc.im.abs() > IMAG_TOLERANCE * (1.0 + acc.re.abs()) {
        return Err(Error::PerturbativeValidity(format!(
            "POVM expectation has imaginary residue {:.3e}",
            acc.im
        )));
    }
    if acc.re < -IMAG_TOLERANCE {
        return Err(Error::PerturbativeValidity(format!(
            "POVM expectation {:.3e} is negative beyond tolerance (coupling too large?)",
            acc.re
        )));
    }
    let zeroth = series.k[0].re;
    let second = (series.k[2] * lambda.powi(2)).norm();
    if zeroth > 0.0 && second > 0.1 * zeroth {
        log::warn!(
            "perturbative validity marginal: λ²⟨E⁽²⁾⟩ = {:.3e} vs ⟨E⁽⁰⁾⟩ = {:.3e}",
            second,
            zeroth
        );
    }
    Ok(acc.re.max(0.0))
}

/// |⟨E_s⟩ + ⟨E_s̄⟩ − 1| at the given order.
pub fn completeness_defect(field: &Field, m: &MeasurementSpec, order: usize) -> Result<f64> {
    let s_series = povm_series(field, m)?;
    let sbar_series = povm_series(field, &m.complement())?;
    let lambda = m.detector.coupling;
    let mut acc = C64::new(0.0, 0.0);
    for k in 0..=order.min(2) {
        acc += (s_series.k[k] + sbar_series.k[k]) * lambda.powi(k as i32);
    }
    Ok((acc - crate::cr(1.0)).norm())
}

/// POVM series as a [`PertSeries`] for ratio algebra downstream.
pub fn povm_pert_series(field: &Field, m: &MeasurementSpec) -> Result<PertSeries> {
    let s = povm_series(field, m)?;
    Ok(PertSeries::from_coeffs(s.k[0], s.k[1], s.k[2]))
}

/// Support bound of K1 as an interaction region (structural locality check).
pub fn kernel_support(m: &MeasurementSpec) -> Result<InteractionRegion> {
    region_of(&m.detector.chi, &m.detector.smearing)
}
