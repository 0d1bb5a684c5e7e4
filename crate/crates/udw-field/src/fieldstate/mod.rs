//! Field states and their Wightman n-point functions.
//!
//! Two mode backends are supported: a continuum of plane waves (closed-form
//! two-point functions, d ∈ {1,2,3}) and a finite list of periodic box modes
//! in 1+1 dimensions (exact mode sums). All supported states are Gaussian, so
//! every n-point function reduces to means and centered two-point kernels
//! through Wick pairing.

pub mod bessel;
pub mod boxmodes;
pub mod continuum;
pub mod wick;

use crate::spacetime::Event;
use crate::{cr, C64, Error, Result};
use boxmodes::{BoxMode, CovTerm, MeanTerm, ModeMoments};
use continuum::Regulator;
use std::f64::consts::PI;
use std::sync::Arc;

/// Mode decomposition backing a field configuration.
#[derive(Clone, Debug)]
pub enum ModeBasis {
    Continuum {
        dim: usize,
        mass: f64,
        regulator: Regulator,
    },
    BoxModes {
        length: f64,
        mass: f64,
        modes: Vec<BoxMode>,
    },
}

impl ModeBasis {
    pub fn continuum(dim: usize, mass: f64) -> Result<ModeBasis> {
        if !(1..=3).contains(&dim) {
            return Err(Error::UnsupportedConfiguration("spatial dimension must be 1..=3".into()));
        }
        if mass < 0.0 {
            return Err(Error::InvalidConfiguration("mass must be non-negative".into()));
        }
        if dim == 1 && mass == 0.0 {
            return Err(Error::UnsupportedConfiguration(
                "massless 1+1 continuum field is infrared-divergent".into(),
            ));
        }
        Ok(ModeBasis::Continuum { dim, mass, regulator: Regulator::default() })
    }

    /// Continuum basis with an explicit iε prescription.
    pub fn continuum_with_regulator(dim: usize, mass: f64, regulator: Regulator) -> Result<ModeBasis> {
        let mut basis = Self::continuum(dim, mass)?;
        if let ModeBasis::Continuum { regulator: r, .. } = &mut basis {
            *r = regulator;
        }
        Ok(basis)
    }

    /// Box with the first `count` positive wavenumbers `k_j = 2πj/L`.
    pub fn box_positive(length: f64, mass: f64, count: usize) -> Result<ModeBasis> {
        Self::box_from_indices(length, mass, (1..=count as i64).collect())
    }

    /// Box with `pairs` symmetric wavenumber pairs `±2πj/L`, j = 1..pairs.
    pub fn box_symmetric(length: f64, mass: f64, pairs: usize) -> Result<ModeBasis> {
        let mut idx = Vec::new();
        for j in 1..=pairs as i64 {
            idx.push(j);
            idx.push(-j);
        }
        Self::box_from_indices(length, mass, idx)
    }

    pub fn box_from_indices(length: f64, mass: f64, indices: Vec<i64>) -> Result<ModeBasis> {
        if length <= 0.0 {
            return Err(Error::InvalidConfiguration("box length must be positive".into()));
        }
        if indices.is_empty() {
            return Err(Error::InvalidConfiguration("at least one mode required".into()));
        }
        if indices.contains(&0) && mass == 0.0 {
            return Err(Error::UnsupportedConfiguration(
                "massless zero mode is ill-defined".into(),
            ));
        }
        let modes = indices
            .iter()
            .map(|&j| {
                let k = 2.0 * PI * j as f64 / length;
                BoxMode { k, omega: (k * k + mass * mass).sqrt() }
            })
            .collect();
        Ok(ModeBasis::BoxModes { length, mass, modes })
    }

    pub fn spatial_dim(&self) -> usize {
        match self {
            ModeBasis::Continuum { dim, .. } => *dim,
            ModeBasis::BoxModes { .. } => 1,
        }
    }

    pub fn mode_count(&self) -> usize {
        match self {
            ModeBasis::Continuum { .. } => 0,
            ModeBasis::BoxModes { modes, .. } => modes.len(),
        }
    }
}

/// User-supplied mean/covariance oracles for a general Gaussian state.
pub struct GaussianKernels {
    pub mean: Box<dyn Fn(&Event) -> C64 + Send + Sync>,
    pub cov: Box<dyn Fn(&Event, &Event) -> C64 + Send + Sync>,
}

impl std::fmt::Debug for GaussianKernels {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str("GaussianKernels{..}")
    }
}

/// Per-mode squeezing of the box vacuum.
#[derive(Clone, Copy, Debug)]
pub struct SqueezeParam {
    pub r: f64,
    pub phase: f64,
}

#[derive(Clone, Debug)]
pub enum FieldState {
    Vacuum,
    /// Box: per-mode displacement amplitudes. Continuum: isotropic Gaussian
    /// packet `α(k) = amplitude·e^{−k²width²/2}`.
    Coherent(CoherentSpec),
    /// KMS state at inverse temperature β (box backend only).
    Thermal { beta: f64 },
    /// Per-mode squeezed vacuum (box backend only); a concrete zero-mean
    /// Gaussian family.
    Squeezed(Vec<SqueezeParam>),
    /// Arbitrary Gaussian state given by mean and covariance closures.
    GaussianGeneral(Arc<GaussianKernels>),
}

impl FieldState {
    pub fn coherent_box(alphas: Vec<C64>) -> FieldState {
        FieldState::Coherent(CoherentSpec::BoxAmplitudes(alphas))
    }

    pub fn coherent_packet(amplitude: f64, width: f64) -> FieldState {
        FieldState::Coherent(CoherentSpec::Packet { amplitude, width })
    }

    pub fn has_mean(&self) -> bool {
        matches!(self, FieldState::Coherent(_) | FieldState::GaussianGeneral(_))
    }
}

#[derive(Clone, Debug)]
pub enum CoherentSpec {
    BoxAmplitudes(Vec<C64>),
    Packet { amplitude: f64, width: f64 },
}

/// A field state prepared on a mode basis; the unit every Wightman-function
/// query runs against.
#[derive(Clone, Debug)]
pub struct Field {
    basis: ModeBasis,
    state: FieldState,
    /// Cached covariance decomposition (box backend, moment-described states).
    cov_terms: Option<Arc<Vec<CovTerm>>>,
    mean_terms: Option<Arc<Vec<MeanTerm>>>,
}

impl Field {
    pub fn new(basis: ModeBasis, state: FieldState) -> Result<Field> {
        // compatibility checks
        match (&basis, &state) {
            (ModeBasis::Continuum { .. }, FieldState::Thermal { .. }) => {
                return Err(Error::UnsupportedConfiguration(
                    "thermal states are box-backend only".into(),
                ));
            }
            (ModeBasis::Continuum { .. }, FieldState::Squeezed(_)) => {
                return Err(Error::UnsupportedConfiguration(
                    "per-mode squeezing requires the box backend".into(),
                ));
            }
            (
                ModeBasis::Continuum { .. },
                FieldState::Coherent(CoherentSpec::BoxAmplitudes(_)),
            ) => {
                return Err(Error::UnsupportedConfiguration(
                    "per-mode amplitudes require the box backend".into(),
                ));
            }
            (ModeBasis::BoxModes { .. }, FieldState::Coherent(CoherentSpec::Packet { .. })) => {
                return Err(Error::UnsupportedConfiguration(
                    "packet amplitudes require the continuum backend".into(),
                ));
            }
            (ModeBasis::BoxModes { modes, .. }, FieldState::Coherent(CoherentSpec::BoxAmplitudes(a))) => {
                if a.len() != modes.len() {
                    return Err(Error::DimensionMismatch(format!(
                        "{} amplitudes for {} modes",
                        a.len(),
                        modes.len()
                    )));
                }
            }
            (ModeBasis::BoxModes { modes, .. }, FieldState::Squeezed(p)) => {
                if p.len() != modes.len() {
                    return Err(Error::DimensionMismatch(format!(
                        "{} squeeze parameters for {} modes",
                        p.len(),
                        modes.len()
                    )));
                }
            }
            (ModeBasis::BoxModes { .. }, FieldState::Thermal { beta }) => {
                if *beta <= 0.0 {
                    return Err(Error::InvalidConfiguration(
                        "inverse temperature must be positive".into(),
                    ));
                }
            }
            _ => {}
        }
        let mut field = Field { basis, state, cov_terms: None, mean_terms: None };
        field.build_caches();
        Ok(field)
    }

    pub fn vacuum(basis: ModeBasis) -> Result<Field> {
        Field::new(basis, FieldState::Vacuum)
    }

    fn build_caches(&mut self) {
        if let ModeBasis::BoxModes { length, modes, .. } = &self.basis {
            let moments: Option<Vec<ModeMoments>> = match &self.state {
                FieldState::Vacuum | FieldState::Coherent(_) => {
                    Some(modes.iter().map(|_| ModeMoments::vacuum()).collect())
                }
                FieldState::Thermal { beta } => {
                    Some(modes.iter().map(|m| ModeMoments::thermal(*beta, m.omega)).collect())
                }
                FieldState::Squeezed(params) => Some(
                    params.iter().map(|p| ModeMoments::squeezed(p.r, p.phase)).collect(),
                ),
                FieldState::GaussianGeneral(_) => None,
            };
            if let Some(m) = moments {
                self.cov_terms =
                    Some(Arc::new(boxmodes::covariance_terms(*length, modes, &m)));
            }
            if let FieldState::Coherent(CoherentSpec::BoxAmplitudes(alphas)) = &self.state {
                self.mean_terms =
                    Some(Arc::new(boxmodes::mean_terms(*length, modes, alphas)));
            }
        }
    }

    pub fn basis(&self) -> &ModeBasis {
        &self.basis
    }

    pub fn state(&self) -> &FieldState {
        &self.state
    }

    pub fn spatial_dim(&self) -> usize {
        self.basis.spatial_dim()
    }

    pub fn is_box(&self) -> bool {
        matches!(self.basis, ModeBasis::BoxModes { .. })
    }

    /// Covariance decomposition for the factorized kernel integrals; `None`
    /// for continuum backends and closure-described states.
    pub fn box_cov_terms(&self) -> Option<&Arc<Vec<CovTerm>>> {
        self.cov_terms.as_ref()
    }

    pub fn box_mean_terms(&self) -> Option<&Arc<Vec<MeanTerm>>> {
        self.mean_terms.as_ref()
    }

    pub fn box_modes(&self) -> Option<(f64, &[BoxMode])> {
        match &self.basis {
            ModeBasis::BoxModes { length, modes, .. } => Some((*length, modes)),
            ModeBasis::Continuum { .. } => None,
        }
    }

    fn check_event(&self, ev: &Event) -> Result<()> {
        if ev.dim() != self.spatial_dim() {
            return Err(Error::DimensionMismatch(format!(
                "event dimension {} vs field dimension {}",
                ev.dim(),
                self.spatial_dim()
            )));
        }
        Ok(())
    }

    /// Mean field ⟨φ(x)⟩.
    pub fn mean(&self, ev: &Event) -> Result<C64> {
        self.check_event(ev)?;
        match (&self.basis, &self.state) {
            (_, FieldState::Vacuum) | (_, FieldState::Thermal { .. }) | (_, FieldState::Squeezed(_)) => {
                Ok(C64::new(0.0, 0.0))
            }
            (_, FieldState::GaussianGeneral(k)) => Ok((k.mean)(ev)),
            (ModeBasis::BoxModes { modes, .. }, FieldState::Coherent(_)) => {
                let terms = self.mean_terms.as_ref().expect("cached");
                Ok(boxmodes::eval_mean(modes, terms, ev))
            }
            (
                ModeBasis::Continuum { dim, mass, .. },
                FieldState::Coherent(CoherentSpec::Packet { amplitude, width }),
            ) => Ok(cr(continuum::packet_mean(*dim, *mass, *amplitude, *width, ev))),
            _ => unreachable!("validated in constructor"),
        }
    }

    /// Coherent mean field as a real amplitude; errors if the state is not
    /// coherent.
    pub fn coherent_amplitude(&self, ev: &Event) -> Result<f64> {
        match &self.state {
            FieldState::Coherent(_) => Ok(self.mean(ev)?.re),
            _ => Err(Error::InvalidConfiguration("state is not coherent".into())),
        }
    }

    /// Centered covariance ⟨(φ(a) − φ̄(a))(φ(b) − φ̄(b))⟩.
    pub fn cov(&self, a: &Event, b: &Event) -> Result<C64> {
        self.check_event(a)?;
        self.check_event(b)?;
        match (&self.basis, &self.state) {
            (_, FieldState::GaussianGeneral(k)) => Ok((k.cov)(a, b)),
            (ModeBasis::BoxModes { length, modes, .. }, _) => {
                let terms = self.cov_terms.as_ref().expect("cached");
                Ok(boxmodes::eval_cov(*length, modes, terms, a, b))
            }
            (ModeBasis::Continuum { dim, mass, regulator }, _) => {
                let dt = a.t - b.t;
                let r = a.spatial_distance(b);
                let scale = (dt.abs() + r).max(1e-3);
                let val = if *mass == 0.0 {
                    match dim {
                        3 => regulator.limit(scale, |e| continuum::w2_massless_3d(dt, r, e)),
                        2 => regulator.limit(scale, |e| continuum::w2_massless_2d(dt, r, e)),
                        _ => unreachable!("massless 1+1 rejected in constructor"),
                    }
                } else {
                    regulator.limit(scale, |e| continuum::w2_massive(*dim, *mass, dt, r, e))
                };
                Ok(val)
            }
        }
    }

    /// Full two-point Wightman function ⟨φ(a)φ(b)⟩.
    pub fn two_point(&self, a: &Event, b: &Event) -> Result<C64> {
        let centered = self.cov(a, b)?;
        if self.state.has_mean() {
            Ok(centered + self.mean(a)? * self.mean(b)?)
        } else {
            Ok(centered)
        }
    }

    /// n-point Wightman function ⟨φ(x₁)···φ(x_n)⟩ via Gaussian moment
    /// expansion; the empty product is 1.
    pub fn n_point(&self, points: &[Event]) -> Result<C64> {
        if points.is_empty() {
            return Ok(cr(1.0));
        }
        for p in points {
            self.check_event(p)?;
        }
        let with_singles = self.state.has_mean();
        let parts = wick::partitions(points.len(), with_singles);
        if parts.is_empty() {
            return Ok(C64::new(0.0, 0.0));
        }
        let mut means = Vec::new();
        if with_singles {
            for p in points {
                means.push(self.mean(p)?);
            }
        }
        let mut total = C64::new(0.0, 0.0);
        for part in &parts {
            let mut term = cr(1.0);
            for &(i, j) in &part.pairs {
                term *= self.cov(&points[i], &points[j])?;
            }
            for &i in &part.singles {
                term *= means[i];
            }
            total += term;
        }
        Ok(total)
    }

    /// Number of terms in the Gaussian moment expansion of the n-point
    /// function for this state (coherent: partitions with means; centered:
    /// perfect matchings).
    pub fn n_point_term_count(&self, n: usize) -> usize {
        wick::partitions(n, self.state.has_mean()).len()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn ev(t: f64, x: f64) -> Event {
        Event::d1(t, x)
    }

    #[test]
    fn rejects_massless_1d_continuum() {
        assert!(ModeBasis::continuum(1, 0.0).is_err());
        assert!(ModeBasis::continuum(3, 0.0).is_ok());
    }

    #[test]
    fn box_single_mode_equal_point() {
        let basis = ModeBasis::box_positive(10.0, 0.0, 1).unwrap();
        let f = Field::vacuum(basis).unwrap();
        let omega1 = 2.0 * PI / 10.0;
        let w = f.two_point(&ev(0.0, 0.0), &ev(0.0, 0.0)).unwrap();
        assert_abs_diff_eq!(w.re, 1.0 / (2.0 * 10.0 * omega1), epsilon = 1e-14);
        assert_abs_diff_eq!(w.im, 0.0, epsilon = 1e-15);
    }

    #[test]
    fn vacuum_odd_n_vanishes() {
        let basis = ModeBasis::box_symmetric(10.0, 0.0, 2).unwrap();
        let f = Field::vacuum(basis).unwrap();
        for n in [1usize, 3, 5] {
            let pts: Vec<Event> = (0..n).map(|i| ev(0.1 * i as f64, 0.3 * i as f64)).collect();
            assert_eq!(f.n_point(&pts).unwrap(), C64::new(0.0, 0.0));
        }
    }

    #[test]
    fn vacuum_four_point_is_wick_sum() {
        let basis = ModeBasis::box_symmetric(8.0, 0.4, 2).unwrap();
        let f = Field::vacuum(basis).unwrap();
        let pts = [ev(0.0, 0.1), ev(0.2, -0.4), ev(-0.3, 0.9), ev(0.7, 0.2)];
        let w4 = f.n_point(&pts).unwrap();
        let w = |i: usize, j: usize| f.two_point(&pts[i], &pts[j]).unwrap();
        let expected = w(0, 1) * w(2, 3) + w(0, 2) * w(1, 3) + w(0, 3) * w(1, 2);
        assert!((w4 - expected).norm() < 1e-14);
    }

    #[test]
    fn coherent_shifts_mean_and_keeps_vacuum_fluctuations() {
        let basis = ModeBasis::box_positive(10.0, 0.0, 2).unwrap();
        let alphas = vec![C64::new(0.3, 0.0), C64::new(0.0, 0.0)];
        let f = Field::new(basis.clone(), FieldState::coherent_box(alphas)).unwrap();
        let vac = Field::vacuum(basis).unwrap();
        let (a, b) = (ev(0.0, 0.0), ev(0.4, 1.0));
        // w2 = φ̄φ̄ + w2_vac
        let lhs = f.two_point(&a, &b).unwrap();
        let rhs = f.mean(&a).unwrap() * f.mean(&b).unwrap() + vac.two_point(&a, &b).unwrap();
        assert!((lhs - rhs).norm() < 1e-14);
        // single-mode amplitude value at the origin: 2α/√(2Lω₁)
        let omega1 = 2.0 * PI / 10.0;
        assert_abs_diff_eq!(
            f.coherent_amplitude(&ev(0.0, 0.0)).unwrap(),
            2.0 * 0.3 / (2.0 * 10.0 * omega1).sqrt(),
            epsilon = 1e-14
        );
        // periodicity in time for the single excited mode
        let period = 2.0 * PI / omega1;
        assert_abs_diff_eq!(
            f.coherent_amplitude(&ev(0.3, 0.7)).unwrap(),
            f.coherent_amplitude(&ev(0.3 + period, 0.7)).unwrap(),
            epsilon = 1e-12
        );
        // all-zero amplitudes reduce to vacuum
        let f0 = Field::new(
            ModeBasis::box_positive(10.0, 0.0, 2).unwrap(),
            FieldState::coherent_box(vec![C64::new(0.0, 0.0); 2]),
        )
        .unwrap();
        assert_eq!(f0.coherent_amplitude(&ev(1.0, 2.0)).unwrap(), 0.0);
    }

    #[test]
    fn coherent_three_point_expansion() {
        let basis = ModeBasis::box_positive(10.0, 0.2, 2).unwrap();
        let alphas = vec![C64::new(0.4, 0.1), C64::new(-0.2, 0.3)];
        let f = Field::new(basis.clone(), FieldState::coherent_box(alphas)).unwrap();
        let vac = Field::vacuum(basis).unwrap();
        let pts = [ev(0.0, 0.0), ev(0.5, 1.0), ev(-0.2, 0.6)];
        let w3 = f.n_point(&pts).unwrap();
        let m = |i: usize| f.mean(&pts[i]).unwrap();
        let wv = |i: usize, j: usize| vac.two_point(&pts[i], &pts[j]).unwrap();
        let expected = m(0) * m(1) * m(2)
            + m(0) * wv(1, 2)
            + m(1) * wv(0, 2)
            + m(2) * wv(0, 1);
        assert!((w3 - expected).norm() < 1e-14);
        // term counts 1, 2, 4 for n = 1, 2, 3
        assert_eq!(f.n_point_term_count(1), 1);
        assert_eq!(f.n_point_term_count(2), 2);
        assert_eq!(f.n_point_term_count(3), 4);
    }

    fn random_box_state(rng: &mut ChaCha8Rng, pairs: usize) -> Field {
        let basis = ModeBasis::box_symmetric(9.0, 0.3, pairs).unwrap();
        let n = 2 * pairs;
        match rng.gen_range(0..4) {
            0 => Field::vacuum(basis).unwrap(),
            1 => {
                let alphas =
                    (0..n).map(|_| C64::new(rng.gen_range(-0.5..0.5), rng.gen_range(-0.5..0.5))).collect();
                Field::new(basis, FieldState::coherent_box(alphas)).unwrap()
            }
            2 => Field::new(basis, FieldState::Thermal { beta: rng.gen_range(1.0..4.0) }).unwrap(),
            _ => {
                let params = (0..n)
                    .map(|_| SqueezeParam {
                        r: rng.gen_range(0.0..0.5),
                        phase: rng.gen_range(0.0..2.0 * PI),
                    })
                    .collect();
                Field::new(basis, FieldState::Squeezed(params)).unwrap()
            }
        }
    }

    #[test]
    fn hermiticity_of_n_point() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..12 {
            let f = random_box_state(&mut rng, 2);
            let n = rng.gen_range(1..=6);
            let pts: Vec<Event> = (0..n)
                .map(|_| ev(rng.gen_range(-2.0..2.0), rng.gen_range(-3.0..3.0)))
                .collect();
            let fwd = f.n_point(&pts).unwrap();
            let rev_pts: Vec<Event> = pts.iter().rev().copied().collect();
            let rev = f.n_point(&rev_pts).unwrap();
            assert!(
                (fwd - rev.conj()).norm() <= 1e-10 * (1.0 + fwd.norm()),
                "hermiticity violated: {fwd:?} vs {rev:?}"
            );
        }
    }

    #[test]
    fn squeezed_odd_moments_vanish() {
        let basis = ModeBasis::box_symmetric(9.0, 0.3, 2).unwrap();
        let params = vec![SqueezeParam { r: 0.4, phase: 1.0 }; 4];
        let f = Field::new(basis, FieldState::Squeezed(params)).unwrap();
        for n in [1usize, 3, 5] {
            let pts: Vec<Event> = (0..n).map(|i| ev(0.2 * i as f64, -0.5 * i as f64)).collect();
            assert_eq!(f.n_point(&pts).unwrap(), C64::new(0.0, 0.0));
        }
    }

    #[test]
    fn microcausality_converges_with_mode_count() {
        // spacelike commutator leakage decays as modes are added; measured as
        // the RMS of Im w2 over a spacelike patch (pointwise partial sums
        // oscillate). The massive zero mode must be kept or the leakage
        // saturates at its contribution.
        let mut last = f64::INFINITY;
        for pairs in [4usize, 8, 16, 32] {
            let mut indices: Vec<i64> = vec![0];
            for j in 1..=pairs as i64 {
                indices.push(j);
                indices.push(-j);
            }
            let basis = ModeBasis::box_from_indices(10.0, 0.5, indices).unwrap();
            let f = Field::vacuum(basis).unwrap();
            let mut acc = 0.0;
            let mut n = 0usize;
            for i in 0..8 {
                for j in 0..8 {
                    let dt = 0.1 + 0.8 * i as f64 / 7.0;
                    let dx = 2.0 + 2.0 * j as f64 / 7.0;
                    acc += f.two_point(&ev(dt, dx), &ev(0.0, 0.0)).unwrap().im.powi(2);
                    n += 1;
                }
            }
            let rms = (acc / n as f64).sqrt();
            assert!(rms < last, "pairs={pairs}: rms {rms} !< {last}");
            last = rms;
        }
        assert!(last < 2e-3);
    }

    #[test]
    fn continuum_vacuum_closed_form() {
        let basis = ModeBasis::continuum(3, 0.0).unwrap();
        let f = Field::vacuum(basis).unwrap();
        let a = Event::d3(0.1, 1.0, 0.0, 0.0);
        let b = Event::d3(0.0, 0.0, 0.0, 0.0);
        let w = f.two_point(&a, &b).unwrap();
        // regulator leaves an O(ε²) residue by construction
        let expected = 1.0 / (4.0 * PI * PI) / (1.0 - 0.01);
        assert_abs_diff_eq!(w.re, expected, epsilon = 1e-6);
    }

    #[test]
    fn general_gaussian_closures() {
        // wrap a box vacuum in closures and check n_point agreement
        let basis = ModeBasis::box_symmetric(8.0, 0.2, 2).unwrap();
        let concrete = Field::vacuum(basis.clone()).unwrap();
        let inner = concrete.clone();
        let general = Field::new(
            basis,
            FieldState::GaussianGeneral(Arc::new(GaussianKernels {
                mean: Box::new(|_| C64::new(0.0, 0.0)),
                cov: Box::new(move |a, b| inner.cov(a, b).unwrap()),
            })),
        )
        .unwrap();
        let pts = [ev(0.0, 0.3), ev(0.5, -0.2), ev(0.1, 1.0), ev(-0.4, 0.8)];
        let a = concrete.n_point(&pts).unwrap();
        let b = general.n_point(&pts).unwrap();
        assert!((a - b).norm() < 1e-13);
    }
}
