//! Measurement-update rules for Wightman n-point functions.
//!
//! The non-selective update is outcome-summed and applies everywhere; the
//! selective update is piecewise: whenever any argument (or an attached
//! third-party system) lies in the causal future of the readout region, the
//! normalized ratio form applies, otherwise the non-selective form does.
//! Both are computed as truncated series in the coupling via the sandwich
//! engine, with the orthogonal-outcome branch (⟨s|ψ⟩ = 0) handled by its
//! λ²-leading ratio expansion.

use crate::fieldstate::boxmodes::{mode_fn, BoxMode};
use crate::fieldstate::Field;
use crate::kernels::{Bracket, EngineOpts, JointGaussian, SandwichEngine, TaggedPoint};
use crate::perturbation::MeasurementSpec;
use crate::series::PertSeries;
use crate::spacetime::{in_causal_future, Event};
use crate::{C64, Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum UpdateMode {
    NonSelective,
    Selective,
}

/// Series coefficients of the non-selective updated n-point function.
pub fn ns_series(field: &Field, m: &MeasurementSpec, points: &[Event]) -> Result<PertSeries> {
    let engine = SandwichEngine::new(field, &m.detector, EngineOpts::default())?;
    let s = engine.sandwich_series(Bracket::Traced { psi: m.psi }, points)?;
    Ok(PertSeries::from_coeffs(s.k[0], s.k[1], s.k[2]))
}

/// Series coefficients of the selective updated n-point function. Applies
/// the piecewise region rule; `points` entirely outside the causal future of
/// the readout fall back to the non-selective series.
pub fn sel_series(field: &Field, m: &MeasurementSpec, points: &[Event]) -> Result<PertSeries> {
    let touched = points.iter().any(|p| in_causal_future(p, &m.measurement_region));
    if !touched {
        return ns_series(field, m, points);
    }
    sel_ratio_series(field, m, points)
}

/// The ratio form of the selective update, regardless of region membership.
pub fn sel_ratio_series(
    field: &Field,
    m: &MeasurementSpec,
    points: &[Event],
) -> Result<PertSeries> {
    let engine = SandwichEngine::new(field, &m.detector, EngineOpts::default())?;
    let num = engine.sandwich_series(Bracket::Selective { s: m.s, psi: m.psi }, points)?;
    let den = engine.sandwich_series(Bracket::Selective { s: m.s, psi: m.psi }, &[])?;
    ratio_series(m, &num, &den)
}

pub(crate) fn ratio_series(
    m: &MeasurementSpec,
    num: &crate::kernels::SandwichSeries,
    den: &crate::kernels::SandwichSeries,
) -> Result<PertSeries> {
    if !m.is_orthogonal() {
        let n = PertSeries::from_coeffs(num.k[0], num.k[1], num.k[2]);
        let d = PertSeries::from_coeffs(den.k[0], den.k[1], den.k[2]);
        return n.div(&d, 1e-300);
    }
    // orthogonal branch: numerator and denominator both start at λ²
    let f_n = num.k[2];
    let g_n = num.k[3];
    let f_0 = den.k[2];
    let g_0 = den.k[3];
    let lambda = m.detector.coupling;
    if f_0.norm() <= 1e-14 || lambda * lambda * f_0.norm() <= 1e-14 {
        return Err(Error::ZeroProbabilityOutcome(format!(
            "leading POVM weight {:.3e} vanishes for the orthogonal outcome",
            lambda * lambda * f_0.norm()
        )));
    }
    let r0 = f_n / f_0;
    let r1 = g_n / f_0 - f_n * g_0 / (f_0 * f_0);
    // one more order is determined when the leading numerator vanishes and
    // the quartic coefficient is structurally zero
    if f_n.norm() <= 1e-12 * f_0.norm() && num.quartic_vanishes {
        let r1 = g_n / f_0;
        let r2 = -g_n * g_0 / (f_0 * f_0);
        let mut out = PertSeries::from_coeffs(C64::new(0.0, 0.0), r1, r2);
        out.known = 2;
        return Ok(out);
    }
    let mut out = PertSeries::from_coeffs(r0, r1, C64::new(0.0, 0.0));
    out.known = 1;
    Ok(out)
}

/// Updated n-point function evaluated at the detector's coupling, truncated
/// at `order`.
pub fn update_value(
    field: &Field,
    m: &MeasurementSpec,
    points: &[Event],
    mode: UpdateMode,
    order: usize,
) -> Result<C64> {
    if order > 2 {
        return Err(Error::InvalidConfiguration("orders above 2 are out of scope".into()));
    }
    let series = match mode {
        UpdateMode::NonSelective => ns_series(field, m, points)?,
        UpdateMode::Selective => sel_series(field, m, points)?,
    };
    Ok(series.eval(m.detector.coupling, order))
}

/// Non-selective update of the n-point function.
pub fn ns_update(field: &Field, m: &MeasurementSpec, points: &[Event], order: usize) -> Result<C64> {
    update_value(field, m, points, UpdateMode::NonSelective, order)
}

/// Selective update of the n-point function (piecewise in the causal future
/// of the readout region).
pub fn sel_update(field: &Field, m: &MeasurementSpec, points: &[Event], order: usize) -> Result<C64> {
    update_value(field, m, points, UpdateMode::Selective, order)
}

// ---------------------------------------------------------------------------
// extended correlators with third parties
// ---------------------------------------------------------------------------

/// Factorized finite third party: the party state is uncorrelated with the
/// field, so extended correlators factor into a party matrix element times
/// the updated n-point function. The party's location still participates in
/// the piecewise region rule.
pub struct FactorizedParty<'a> {
    /// Party density matrix.
    pub rho: &'a nalgebra::DMatrix<C64>,
    /// Whether the party system sits in the causal future of the readout.
    pub in_readout_future: bool,
}

/// Extended correlator `w̃_{Γ,n}(l, m; x₁..x_n)` for a factorized finite
/// party: `tr(ρ_Φ |γ_l⟩⟨γ_m| φ(x₁)···φ(x_n))` updated by the measurement.
pub fn extended_finite_factorized(
    field: &Field,
    meas: &MeasurementSpec,
    party: &FactorizedParty,
    l: usize,
    m_idx: usize,
    points: &[Event],
    mode: UpdateMode,
    order: usize,
) -> Result<C64> {
    // tr(ρ_Γ |γ_l⟩⟨γ_m|) = ⟨γ_m| ρ_Γ |γ_l⟩
    let party_el = party.rho[(m_idx, l)];
    let field_part = match mode {
        UpdateMode::NonSelective => ns_series(field, meas, points)?,
        UpdateMode::Selective => {
            let touched = party.in_readout_future
                || points.iter().any(|p| in_causal_future(p, &meas.measurement_region));
            if touched {
                sel_ratio_series(field, meas, points)?
            } else {
                ns_series(field, meas, points)?
            }
        }
    };
    Ok(party_el * field_part.eval(meas.detector.coupling, order))
}

/// Jointly Gaussian second field: `(n', n)`-point correlators
/// `tr(ρ_Φ σ(y₁)···σ(y_{n'}) φ(x₁)···φ(x_n))` under the update.
pub fn extended_field_update(
    joint: &JointGaussian,
    meas: &MeasurementSpec,
    sigma_points: &[Event],
    phi_points: &[Event],
    mode: UpdateMode,
    order: usize,
) -> Result<C64> {
    let engine = SandwichEngine::with_joint(joint, &meas.detector, EngineOpts::default())?;
    let tagged: Vec<TaggedPoint> = sigma_points
        .iter()
        .map(|e| TaggedPoint { family: 1, event: *e })
        .chain(phi_points.iter().map(|e| TaggedPoint::field(*e)))
        .collect();
    let series = match mode {
        UpdateMode::NonSelective => {
            let s = engine.sandwich_series_tagged(Bracket::Traced { psi: meas.psi }, &tagged)?;
            PertSeries::from_coeffs(s.k[0], s.k[1], s.k[2])
        }
        UpdateMode::Selective => {
            let touched = tagged
                .iter()
                .any(|p| in_causal_future(&p.event, &meas.measurement_region));
            if touched {
                let num = engine
                    .sandwich_series_tagged(Bracket::Selective { s: meas.s, psi: meas.psi }, &tagged)?;
                let den =
                    engine.sandwich_series_tagged(Bracket::Selective { s: meas.s, psi: meas.psi }, &[])?;
                ratio_series(meas, &num, &den)?
            } else {
                let s = engine.sandwich_series_tagged(Bracket::Traced { psi: meas.psi }, &tagged)?;
                PertSeries::from_coeffs(s.k[0], s.k[1], s.k[2])
            }
        }
    };
    Ok(series.eval(meas.detector.coupling, order))
}

/// Joint Gaussian state of two box fields entangled pairwise by two-mode
/// squeezing: `pairs[(i, j, r)]` squeezes φ-mode `i` against σ-mode `j`.
pub fn two_mode_squeezed_joint(
    length: f64,
    phi_modes: Vec<BoxMode>,
    sigma_modes: Vec<BoxMode>,
    pairs: Vec<(usize, usize, f64)>,
) -> JointGaussian {
    let cov_block = move |a: &TaggedPoint, b: &TaggedPoint| -> Result<C64> {
        let modes_a: &[BoxMode] = if a.family == 0 { &phi_modes } else { &sigma_modes };
        let modes_b: &[BoxMode] = if b.family == 0 { &phi_modes } else { &sigma_modes };
        let mut acc = C64::new(0.0, 0.0);
        if a.family == b.family {
            // same-field block: vacuum + thermal-like occupation from the
            // two-mode squeezing
            for (idx, mode) in modes_a.iter().enumerate() {
                let nbar: f64 = pairs
                    .iter()
                    .filter(|(i, j, _)| if a.family == 0 { *i == idx } else { *j == idx })
                    .map(|(_, _, r)| r.sinh().powi(2))
                    .sum();
                let f_a = mode_fn(length, mode, &a.event);
                let f_b = mode_fn(length, mode, &b.event);
                acc += f_a * f_b.conj() * (nbar + 1.0) + f_a.conj() * f_b * nbar;
            }
        } else {
            // cross block: ⟨a b⟩ = ⟨a†b†⟩ = cosh r sinh r on squeezed pairs
            for &(i, j, r) in &pairs {
                let cs = r.cosh() * r.sinh();
                let (ia, ib) = if a.family == 0 { (i, j) } else { (j, i) };
                let f_a = mode_fn(length, &modes_a[ia], &a.event);
                let f_b = mode_fn(length, &modes_b[ib], &b.event);
                acc += (f_a * f_b + (f_a * f_b).conj()) * cs;
            }
        }
        Ok(acc)
    };
    JointGaussian {
        spatial_dim: 1,
        has_mean: false,
        cov: Box::new(cov_block),
        mean: Box::new(|_| Ok(C64::new(0.0, 0.0))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cr;
    use crate::detector::{DetectorSpec, DetectorVector};
    use crate::fieldstate::{FieldState, ModeBasis};
    use crate::profiles::Profile;
    use nalgebra::DMatrix;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn box_field(state: FieldState) -> Field {
        Field::new(ModeBasis::box_symmetric(10.0, 0.0, 2).unwrap(), state).unwrap()
    }

    fn measurement(lambda: f64, psi: DetectorVector, s: DetectorVector) -> MeasurementSpec {
        let det = DetectorSpec::new(
            1.0,
            lambda,
            Profile::gaussian_time(0.7, 0.0),
            Profile::delta_space(1, vec![0.0]),
            "d",
        )
        .unwrap();
        MeasurementSpec::standard(det, psi, s).unwrap()
    }

    #[test]
    fn ns_normalization_is_exact() {
        let field = box_field(FieldState::Vacuum);
        let m = measurement(0.08, DetectorVector::i_plus(), DetectorVector::excited());
        let series = ns_series(&field, &m, &[]).unwrap();
        assert!((series.c[0] - cr(1.0)).norm() < 1e-12);
        assert!(series.c[1].norm() < 1e-12, "λ¹ coefficient {:?}", series.c[1]);
        assert!(series.c[2].norm() < 1e-10, "λ² coefficient {:?}", series.c[2]);
    }

    #[test]
    fn sel_normalization_is_exact() {
        let field = box_field(FieldState::Vacuum);
        let m = measurement(0.08, DetectorVector::i_plus(), DetectorVector::excited());
        let series = sel_ratio_series(&field, &m, &[]).unwrap();
        assert!((series.c[0] - cr(1.0)).norm() < 1e-12);
        assert!(series.c[1].norm() < 1e-12);
        assert!(series.c[2].norm() < 1e-10);
        // orthogonal branch too
        let mo = measurement(0.08, DetectorVector::ground(), DetectorVector::excited());
        let so = sel_ratio_series(&field, &mo, &[]).unwrap();
        assert!((so.c[0] - cr(1.0)).norm() < 1e-12);
        assert!(so.c[1].norm() < 1e-12);
    }

    #[test]
    fn eigenstate_first_order_ns_is_trivial() {
        // ⟨ψ|μ(t)|ψ⟩ = 0 for eigenstates: the O(λ) term of w₁ vanishes
        let alphas = vec![C64::new(0.3, 0.0); 4];
        let field = box_field(FieldState::coherent_box(alphas));
        for psi in [DetectorVector::ground(), DetectorVector::excited()] {
            let m = measurement(0.05, psi, DetectorVector::excited());
            let series = ns_series(&field, &m, &[Event::d1(0.5, 1.0)]).unwrap();
            assert!(series.c[1].norm() < 1e-12);
        }
    }

    #[test]
    fn spacelike_points_recover_initial_function() {
        // deep spacelike points: selective = non-selective = initial
        let field = box_field(FieldState::Vacuum);
        let m = measurement(0.06, DetectorVector::i_plus(), DetectorVector::excited());
        // the box wraps around, so "spacelike" needs a point outside both the
        // direct and periodic light cones within the support span
        let p = Event::d1(0.0, 5.0);
        assert!(!in_causal_future(&p, &m.measurement_region));
        let sel = sel_series(&field, &m, &[p, Event::d1(0.1, 4.5)]).unwrap();
        let ns = ns_series(&field, &m, &[p, Event::d1(0.1, 4.5)]).unwrap();
        for j in 0..3 {
            assert!((sel.c[j] - ns.c[j]).norm() < 1e-14);
        }
    }

    #[test]
    fn hermiticity_of_updates() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let alphas = (0..4)
            .map(|_| C64::new(rng.gen_range(-0.4..0.4), rng.gen_range(-0.4..0.4)))
            .collect();
        let field = box_field(FieldState::coherent_box(alphas));
        let m = measurement(0.05, DetectorVector::i_plus(), DetectorVector::plus());
        let pts = vec![Event::d1(2.2, 0.3), Event::d1(2.5, -0.7), Event::d1(3.0, 0.1)];
        let rev: Vec<Event> = pts.iter().rev().copied().collect();
        for mode in [UpdateMode::NonSelective, UpdateMode::Selective] {
            let fwd = match mode {
                UpdateMode::NonSelective => ns_series(&field, &m, &pts).unwrap(),
                UpdateMode::Selective => sel_series(&field, &m, &pts).unwrap(),
            };
            let bwd = match mode {
                UpdateMode::NonSelective => ns_series(&field, &m, &rev).unwrap(),
                UpdateMode::Selective => sel_series(&field, &m, &rev).unwrap(),
            };
            for j in 0..3 {
                assert!(
                    (fwd.c[j] - bwd.c[j].conj()).norm() < 1e-10 * (1.0 + fwd.c[j].norm()),
                    "{mode:?} order {j}: {:?} vs {:?}",
                    fwd.c[j],
                    bwd.c[j]
                );
            }
        }
    }

    /// Mixture identity: ⟨E_s⟩w^{S,s} + ⟨E_s̄⟩w^{S,s̄} = w^NS order by order
    /// (both outcomes in ratio form).
    #[test]
    fn mixture_identity() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..6 {
            let alphas = (0..4)
                .map(|_| C64::new(rng.gen_range(-0.4..0.4), rng.gen_range(-0.4..0.4)))
                .collect();
            let field = box_field(FieldState::coherent_box(alphas));
            let psi = DetectorVector::new(
                C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)),
                C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)),
            );
            let s = DetectorVector::new(
                C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)),
                C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)),
            );
            let m = measurement(rng.gen_range(0.02..0.07), psi, s);
            let mbar = m.complement();
            let pts = vec![Event::d1(2.5, 0.2), Event::d1(2.8, -0.5)];
            let e_s = crate::perturbation::povm_pert_series(&field, &m).unwrap();
            let e_sbar = crate::perturbation::povm_pert_series(&field, &mbar).unwrap();
            let w_s = sel_ratio_series(&field, &m, &pts).unwrap();
            let w_sbar = sel_ratio_series(&field, &mbar, &pts).unwrap();
            let ns = ns_series(&field, &m, &pts).unwrap();
            let lhs = e_s.mul(&w_s).add(&e_sbar.mul(&w_sbar));
            for j in 0..3 {
                assert!(
                    (lhs.c[j] - ns.c[j]).norm() < 1e-9 * (1.0 + ns.c[j].norm()),
                    "order {j}: {:?} vs {:?}",
                    lhs.c[j],
                    ns.c[j]
                );
            }
        }
    }

    #[test]
    fn zero_probability_outcome_is_an_error() {
        // λ = 0 with orthogonal outcome: E vanishes identically
        let field = box_field(FieldState::Vacuum);
        let m = measurement(0.0, DetectorVector::ground(), DetectorVector::excited());
        let p = Event::d1(2.0, 0.0);
        assert!(matches!(
            sel_ratio_series(&field, &m, &[p]),
            Err(Error::ZeroProbabilityOutcome(_))
        ));
    }

    #[test]
    fn trivial_party_factorizes() {
        let field = box_field(FieldState::Vacuum);
        let m = measurement(0.05, DetectorVector::i_plus(), DetectorVector::excited());
        let mut rho = DMatrix::<C64>::zeros(2, 2);
        rho[(0, 0)] = cr(0.7);
        rho[(1, 1)] = cr(0.3);
        rho[(0, 1)] = C64::new(0.1, 0.2);
        rho[(1, 0)] = C64::new(0.1, -0.2);
        let party = FactorizedParty { rho: &rho, in_readout_future: false };
        let pts = [Event::d1(2.0, 0.5)];
        for mode in [UpdateMode::NonSelective, UpdateMode::Selective] {
            let w = extended_finite_factorized(&field, &m, &party, 0, 1, &pts, mode, 2).unwrap();
            let expected = rho[(1, 0)]
                * match mode {
                    UpdateMode::NonSelective => ns_update(&field, &m, &pts, 2).unwrap(),
                    UpdateMode::Selective => sel_update(&field, &m, &pts, 2).unwrap(),
                };
            assert!((w - expected).norm() < 1e-13);
        }
        // n = 0 non-selective extended correlator is untouched
        let w0 = extended_finite_factorized(
            &field,
            &m,
            &party,
            0,
            1,
            &[],
            UpdateMode::NonSelective,
            2,
        )
        .unwrap();
        assert!((w0 - rho[(1, 0)]).norm() < 1e-10);
    }

    #[test]
    fn party_in_future_forces_ratio_form() {
        let field = box_field(FieldState::Vacuum);
        let m = measurement(0.05, DetectorVector::i_plus(), DetectorVector::excited());
        let rho = DMatrix::<C64>::identity(2, 2) * cr(0.5);
        // spacelike point, but the party itself is in the readout future
        let pts = [Event::d1(0.0, 5.0)];
        let inside = FactorizedParty { rho: &rho, in_readout_future: true };
        let outside = FactorizedParty { rho: &rho, in_readout_future: false };
        let a = extended_finite_factorized(&field, &m, &inside, 0, 0, &pts, UpdateMode::Selective, 2)
            .unwrap();
        let b =
            extended_finite_factorized(&field, &m, &outside, 0, 0, &pts, UpdateMode::Selective, 2)
                .unwrap();
        // ratio form vs non-selective form differ at order λ
        assert!((a - b).norm() > 1e-6, "selective piecewise rule had no effect: {a:?} vs {b:?}");
    }
}
