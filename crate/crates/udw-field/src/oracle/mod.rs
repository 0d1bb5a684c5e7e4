//! Exact reference backend on a truncated detector ⊗ Fock Hilbert space.
//!
//! Detectors and box modes are assembled into finite matrices, the
//! interaction-picture Schrödinger equation is integrated with adaptive
//! stepping, and measurements are applied as exact projections. Everything
//! the perturbative machinery predicts is validated against this module.

pub mod evolve;
pub mod fock;

use crate::detector::{DetectorSpec, DetectorVector};
use crate::fieldstate::boxmodes::BoxMode;
use crate::fieldstate::{CoherentSpec, FieldState, ModeBasis};
use crate::profiles::DEFAULT_SUPPORT_LEVEL;
use crate::spacetime::Event;
use crate::{cr, C64, Error, Result, IM};
use evolve::{propagate, Rhs, StepReport};
use fock::{FockBasis, FockTruncation};
use nalgebra::{DMatrix, DVector};

pub const DEFAULT_DIM_CAP: usize = 4096;
pub const DEFAULT_ODE_TOL: f64 = 1e-11;

/// One detector wired into the truncated system.
#[derive(Clone, Debug)]
pub struct OracleDetector {
    pub spec: DetectorSpec,
    /// Initial pure state.
    pub psi: DetectorVector,
    /// Per-mode coupling coefficients `c_k = F̃(−k)/√(2Lω_k)`.
    coupling: Vec<C64>,
    /// Mode family this detector couples to.
    pub family: usize,
    /// Truncated switching support.
    t_support: (f64, f64),
}

impl OracleDetector {
    fn build(
        spec: DetectorSpec,
        psi: DetectorVector,
        family: usize,
        length: f64,
        modes: &[BoxMode],
        families: &[usize],
    ) -> Result<OracleDetector> {
        if spec.chi.is_delta() {
            return Err(Error::UnsupportedConfiguration(
                "the oracle integrates in time; delta switchings are perturbation-only".into(),
            ));
        }
        if spec.spatial_dim() != 1 {
            return Err(Error::DimensionMismatch(
                "box-backend detectors need 1-dimensional smearing".into(),
            ));
        }
        let ft = spec.smearing.fourier();
        let coupling = modes
            .iter()
            .zip(families)
            .map(|(m, fam)| {
                if *fam == family {
                    ft.spatial(&[-m.k]) / (2.0 * length * m.omega).sqrt()
                } else {
                    C64::new(0.0, 0.0)
                }
            })
            .collect();
        let t_support = spec.chi.support_interval(DEFAULT_SUPPORT_LEVEL);
        Ok(OracleDetector { spec, psi, coupling, family, t_support })
    }
}

/// Detector(s) ⊗ truncated Fock space with a prepared field state.
pub struct TruncatedSystem {
    pub length: f64,
    pub mass: f64,
    modes: Vec<BoxMode>,
    /// Mode family tags (0 is the probed field; other tags are spectator
    /// fields used by extended correlators).
    families: Vec<usize>,
    pub basis: FockBasis,
    pub detectors: Vec<OracleDetector>,
    state: PreparedField,
    /// Probability mass lost to truncation during preparation.
    pub preparation_leakage: f64,
    pub ode_tol: f64,
}

#[derive(Clone, Debug)]
pub enum PreparedField {
    Pure(DVector<C64>),
    Density(DMatrix<C64>),
}

impl TruncatedSystem {
    /// Single-family system from a box basis.
    pub fn new(
        basis: &ModeBasis,
        truncation: FockTruncation,
        detectors: Vec<(DetectorSpec, DetectorVector)>,
        field_state: &FieldState,
    ) -> Result<TruncatedSystem> {
        let (length, mass, modes) = match basis {
            ModeBasis::BoxModes { length, mass, modes } => (*length, *mass, modes.clone()),
            ModeBasis::Continuum { .. } => {
                return Err(Error::UnsupportedConfiguration(
                    "the oracle requires a box mode basis".into(),
                ))
            }
        };
        let families = vec![0usize; modes.len()];
        Self::assemble(length, mass, modes, families, detectors, field_state, DEFAULT_DIM_CAP, truncation)
    }

    /// Two-family system: `extra_modes` belong to a spectator field (family 1).
    pub fn with_spectator_field(
        basis: &ModeBasis,
        extra_modes: Vec<BoxMode>,
        truncation: FockTruncation,
        detectors: Vec<(DetectorSpec, DetectorVector)>,
        field_state: &FieldState,
    ) -> Result<TruncatedSystem> {
        let (length, mass, mut modes) = match basis {
            ModeBasis::BoxModes { length, mass, modes } => (*length, *mass, modes.clone()),
            _ => {
                return Err(Error::UnsupportedConfiguration(
                    "the oracle requires a box mode basis".into(),
                ))
            }
        };
        let mut families = vec![0usize; modes.len()];
        families.extend(std::iter::repeat(1).take(extra_modes.len()));
        modes.extend(extra_modes);
        Self::assemble(length, mass, modes, families, detectors, field_state, DEFAULT_DIM_CAP, truncation)
    }

    #[allow(clippy::too_many_arguments)]
    fn assemble(
        length: f64,
        mass: f64,
        modes: Vec<BoxMode>,
        families: Vec<usize>,
        detectors: Vec<(DetectorSpec, DetectorVector)>,
        field_state: &FieldState,
        dim_cap: usize,
        truncation: FockTruncation,
    ) -> Result<TruncatedSystem> {
        let basis = FockBasis::new(modes.len(), truncation);
        let total = basis.dim() << detectors.len();
        if total > dim_cap {
            return Err(Error::UnsupportedConfiguration(format!(
                "total dimension {total} exceeds the cap {dim_cap}"
            )));
        }
        let dets = detectors
            .into_iter()
            .map(|(spec, psi)| OracleDetector::build(spec, psi, 0, length, &modes, &families))
            .collect::<Result<Vec<_>>>()?;
        let (state, leakage) = prepare_field(&basis, &modes, field_state)?;
        Ok(TruncatedSystem {
            length,
            mass,
            modes,
            families,
            basis,
            detectors: dets,
            state,
            preparation_leakage: leakage,
            ode_tol: DEFAULT_ODE_TOL,
        })
    }

    /// Replace a detector's mode couplings (validation studies need detectors
    /// that address selected modes only).
    pub fn override_coupling(&mut self, det: usize, coupling: Vec<C64>) -> Result<()> {
        if coupling.len() != self.modes.len() {
            return Err(Error::DimensionMismatch("one coefficient per mode required".into()));
        }
        self.detectors[det].coupling = coupling;
        Ok(())
    }

    /// Replace the prepared field state by an explicit vector (normalized on
    /// entry).
    pub fn override_state(&mut self, v: DVector<C64>) -> Result<()> {
        if v.len() != self.basis.dim() {
            return Err(Error::DimensionMismatch("state dimension mismatch".into()));
        }
        let n = v.norm();
        if n == 0.0 {
            return Err(Error::InvalidConfiguration("zero state".into()));
        }
        self.state = PreparedField::Pure(v / cr(n));
        self.preparation_leakage = 0.0;
        Ok(())
    }

    pub fn modes(&self) -> &[BoxMode] {
        &self.modes
    }

    pub fn mode_family(&self, idx: usize) -> usize {
        self.families[idx]
    }

    pub fn field_dim(&self) -> usize {
        self.basis.dim()
    }

    pub fn n_detectors(&self) -> usize {
        self.detectors.len()
    }

    pub fn total_dim(&self) -> usize {
        self.basis.dim() << self.detectors.len()
    }

    pub fn prepared_state(&self) -> &PreparedField {
        &self.state
    }

    /// Prepared field state as a density matrix.
    pub fn field_density(&self) -> DMatrix<C64> {
        match &self.state {
            PreparedField::Pure(v) => v * v.adjoint(),
            PreparedField::Density(r) => r.clone(),
        }
    }

    /// Union of (truncated) switching supports, padded slightly.
    pub fn switching_span(&self) -> (f64, f64) {
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for d in &self.detectors {
            lo = lo.min(d.t_support.0);
            hi = hi.max(d.t_support.1);
        }
        (lo, hi)
    }

    /// Field operator of one family at an event, on the Fock factor.
    pub fn field_operator(&self, ev: &Event, family: usize) -> DMatrix<C64> {
        let d = self.basis.dim();
        let mut out = DMatrix::zeros(d, d);
        for (idx, (mode, fam)) in self.modes.iter().zip(&self.families).enumerate() {
            if *fam != family {
                continue;
            }
            let f = crate::fieldstate::boxmodes::mode_fn(self.length, mode, ev);
            for (src, dst, amp) in self.basis.lowering(idx) {
                out[(dst, src)] += f * amp; // a_k
                out[(src, dst)] += f.conj() * amp; // a_k†
            }
        }
        out
    }

    /// Product `φ̂(x₁)···φ̂(x_n)` on the Fock factor (family 0).
    pub fn field_product(&self, points: &[Event]) -> DMatrix<C64> {
        self.field_product_tagged(&points.iter().map(|p| (0usize, *p)).collect::<Vec<_>>())
    }

    /// Ordered operator product over tagged (family, event) pairs.
    pub fn field_product_tagged(&self, points: &[(usize, Event)]) -> DMatrix<C64> {
        let d = self.basis.dim();
        let mut out = DMatrix::<C64>::identity(d, d);
        for (family, p) in points {
            out *= self.field_operator(p, *family);
        }
        out
    }

    fn rhs(&self, active: &[usize]) -> SystemRhs {
        let tables = self
            .detectors
            .iter()
            .enumerate()
            .filter(|(i, _)| active.contains(i))
            .map(|(i, det)| {
                let mode_terms = self
                    .modes
                    .iter()
                    .enumerate()
                    .filter(|(k, _)| det.coupling[*k].norm() > 0.0)
                    .map(|(k, m)| ModeTerm {
                        c: det.coupling[k],
                        omega: m.omega,
                        lower: self.basis.lowering(k),
                    })
                    .collect();
                DetTable {
                    bit: self.detectors.len() - 1 - i,
                    gap: det.spec.gap,
                    lambda: det.spec.coupling,
                    chi: det.spec.chi.clone(),
                    support: det.t_support,
                    mode_terms,
                }
            })
            .collect();
        SystemRhs { n_det: self.detectors.len(), field_dim: self.basis.dim(), tables }
    }

    /// Full evolution operator over `t_span` with the listed detectors
    /// active. The span must cover every active switching support.
    pub fn evolve_selected(&self, active: &[usize], t_span: (f64, f64)) -> Result<EvolutionResult> {
        for &i in active {
            let (lo, hi) = self.detectors[i].t_support;
            if t_span.0 > lo || t_span.1 < hi {
                return Err(Error::InvalidConfiguration(format!(
                    "t_span [{}, {}] does not cover detector {} support [{lo}, {hi}]",
                    t_span.0, t_span.1, i
                )));
            }
        }
        let dim = self.total_dim();
        let y0 = DMatrix::<C64>::identity(dim, dim);
        let rhs = self.rhs(active);
        let (u, report) = propagate(&rhs, y0, t_span.0, t_span.1, self.ode_tol)?;
        Ok(EvolutionResult { u, report })
    }

    /// Full evolution operator with all detectors active.
    pub fn evolve(&self, t_span: (f64, f64)) -> Result<EvolutionResult> {
        let all: Vec<usize> = (0..self.detectors.len()).collect();
        self.evolve_selected(&all, t_span)
    }

    /// Evolve an arbitrary block (columns of amplitudes on the full space).
    pub fn evolve_block(
        &self,
        active: &[usize],
        y0: DMatrix<C64>,
        t_span: (f64, f64),
    ) -> Result<(DMatrix<C64>, StepReport)> {
        let rhs = self.rhs(active);
        propagate(&rhs, y0, t_span.0, t_span.1, self.ode_tol)
    }

    /// Kraus operator `⟨s| U |ψ⟩` over detector `det`, as a matrix on the
    /// remaining space (other detectors ⊗ field).
    pub fn kraus_from_unitary(
        &self,
        u: &DMatrix<C64>,
        det: usize,
        s: &DetectorVector,
        psi: &DetectorVector,
    ) -> DMatrix<C64> {
        let n_det = self.detectors.len();
        let f_dim = self.basis.dim();
        let rest_dim = (1usize << (n_det - 1)) * f_dim;
        let bit = n_det - 1 - det; // detector 0 owns the most significant bit
        let s_comp = [s.g.conj(), s.e.conj()];
        let psi_comp = [psi.g, psi.e];
        let expand = expander(f_dim, bit);
        let mut m = DMatrix::zeros(rest_dim, rest_dim);
        for col in 0..rest_dim {
            for (b_in, &pc) in psi_comp.iter().enumerate() {
                if pc.norm() == 0.0 {
                    continue;
                }
                let full_col = expand(col, b_in);
                for row in 0..rest_dim {
                    let mut acc = C64::new(0.0, 0.0);
                    for (b_out, &sc) in s_comp.iter().enumerate() {
                        if sc.norm() == 0.0 {
                            continue;
                        }
                        acc += sc * u[(expand(row, b_out), full_col)];
                    }
                    m[(row, col)] += acc * pc;
                }
            }
        }
        m
    }

    /// Kraus operator on the field space for a single-detector system,
    /// computed by evolving the `|ψ⟩ ⊗ field` block (avoids the full
    /// unitary; preferred at large dimension).
    pub fn kraus_direct(
        &self,
        s: &DetectorVector,
        t_span: (f64, f64),
    ) -> Result<DMatrix<C64>> {
        if self.detectors.len() != 1 {
            return Err(Error::UnsupportedConfiguration(
                "kraus_direct assumes a single detector; use kraus_from_unitary".into(),
            ));
        }
        let psi = self.detectors[0].psi;
        let f_dim = self.basis.dim();
        let mut y0 = DMatrix::zeros(2 * f_dim, f_dim);
        for f in 0..f_dim {
            y0[(f, f)] = psi.g; // detector bit 0 block = ground
            y0[(f_dim + f, f)] = psi.e;
        }
        let (y, _) = self.evolve_block(&[0], y0, t_span)?;
        let mut m = DMatrix::zeros(f_dim, f_dim);
        for col in 0..f_dim {
            for row in 0..f_dim {
                m[(row, col)] = s.g.conj() * y[(row, col)] + s.e.conj() * y[(f_dim + row, col)];
            }
        }
        Ok(m)
    }

    /// Apply a field-space Kraus operator to the prepared state; returns the
    /// unnormalized updated density matrix and the outcome weight.
    pub fn apply_kraus(&self, m: &DMatrix<C64>) -> (DMatrix<C64>, f64) {
        match &self.state {
            PreparedField::Pure(v) => {
                let w = m * v;
                let p = w.norm_squared();
                (&w * w.adjoint(), p)
            }
            PreparedField::Density(r) => {
                let mr = m * r * m.adjoint();
                let p = mr.diagonal().iter().map(|c| c.re).sum();
                (mr, p)
            }
        }
    }

    /// Exact expectation `tr(ρ_field · φ̂(x₁)···φ̂(x_n))`.
    pub fn n_point_of(&self, rho_field: &DMatrix<C64>, points: &[Event]) -> C64 {
        let op = self.field_product(points);
        (rho_field * op).trace()
    }
}

/// Result of a full-unitary evolution.
pub struct EvolutionResult {
    pub u: DMatrix<C64>,
    pub report: StepReport,
}

impl EvolutionResult {
    pub fn unitarity_defect(&self) -> f64 {
        let n = self.u.nrows();
        (self.u.adjoint() * &self.u - DMatrix::<C64>::identity(n, n)).norm()
    }
}

/// Insert detector bit `b` at position `bit` of the detector part of a
/// reduced index.
fn expander(f_dim: usize, bit: usize) -> impl Fn(usize, usize) -> usize {
    move |r: usize, b: usize| -> usize {
        let rd = r / f_dim;
        let rf = r % f_dim;
        let low_mask = (1usize << bit) - 1;
        let high = (rd & !low_mask) << 1;
        let low = rd & low_mask;
        let d = high | (b << bit) | low;
        d * f_dim + rf
    }
}

struct ModeTerm {
    c: C64,
    omega: f64,
    lower: Vec<(usize, usize, f64)>,
}

struct DetTable {
    bit: usize,
    gap: f64,
    lambda: f64,
    chi: crate::profiles::Profile,
    support: (f64, f64),
    mode_terms: Vec<ModeTerm>,
}

/// Applies `−i H(t)` with `H = Σ_ν λ_ν χ_ν(t) μ_ν(t) ⊗ Φ_ν(t)`.
pub struct SystemRhs {
    n_det: usize,
    field_dim: usize,
    tables: Vec<DetTable>,
}

impl Rhs for SystemRhs {
    fn apply(&self, t: f64, y: &DMatrix<C64>, out: &mut DMatrix<C64>) {
        out.fill(C64::new(0.0, 0.0));
        let f_dim = self.field_dim;
        let n_d = 1usize << self.n_det;
        for table in &self.tables {
            if t < table.support.0 || t > table.support.1 {
                continue;
            }
            let chi = table.chi.eval1(t).expect("switching evaluable");
            if chi == 0.0 {
                continue;
            }
            let pref = -IM * (table.lambda * chi);
            let bit = table.bit;
            // detector phase by source bit: g→e carries e^{+iΩt}
            let ph_up = (IM * table.gap * t).exp();
            let ph_down = ph_up.conj();
            for term in &table.mode_terms {
                let mode_ph = (-IM * term.omega * t).exp();
                let ca = pref * term.c * mode_ph; // multiplies a_k
                let cc = pref * term.c.conj() * mode_ph.conj(); // multiplies a_k†
                for &(src_f, dst_f, amp) in &term.lower {
                    for col in 0..y.ncols() {
                        for d in 0..n_d {
                            let d_flip = d ^ (1 << bit);
                            let det_ph = if (d >> bit) & 1 == 0 { ph_up } else { ph_down };
                            // a_k: |src_f⟩ → |dst_f⟩
                            let v1 = y[(d * f_dim + src_f, col)];
                            if v1.re != 0.0 || v1.im != 0.0 {
                                out[(d_flip * f_dim + dst_f, col)] += ca * det_ph * amp * v1;
                            }
                            // a_k†: |dst_f⟩ → |src_f⟩
                            let v2 = y[(d * f_dim + dst_f, col)];
                            if v2.re != 0.0 || v2.im != 0.0 {
                                out[(d_flip * f_dim + src_f, col)] += cc * det_ph * amp * v2;
                            }
                        }
                    }
                }
            }
        }
    }
}

/// Prepare a field state on the truncated basis, returning the probability
/// leakage removed by renormalization.
fn prepare_field(
    basis: &FockBasis,
    modes: &[BoxMode],
    state: &FieldState,
) -> Result<(PreparedField, f64)> {
    match state {
        FieldState::Vacuum => {
            let mut v = DVector::zeros(basis.dim());
            v[basis.vacuum_index()] = cr(1.0);
            Ok((PreparedField::Pure(v), 0.0))
        }
        FieldState::Coherent(CoherentSpec::BoxAmplitudes(alphas)) => {
            if alphas.len() != modes.len() {
                return Err(Error::DimensionMismatch("one amplitude per mode".into()));
            }
            build_pure(basis, |occ| {
                let mut a = cr(1.0);
                for (m, &n) in occ.iter().enumerate() {
                    a *= coherent_amp(alphas[m], n as usize);
                }
                a
            })
        }
        FieldState::Coherent(CoherentSpec::Packet { .. }) => Err(Error::UnsupportedConfiguration(
            "continuum packets are not preparable on the box oracle".into(),
        )),
        FieldState::Squeezed(params) => {
            if params.len() != modes.len() {
                return Err(Error::DimensionMismatch("one squeeze parameter per mode".into()));
            }
            build_pure(basis, |occ| {
                let mut a = cr(1.0);
                for (m, &n) in occ.iter().enumerate() {
                    a *= squeezed_amp(params[m].r, params[m].phase, n as usize);
                }
                a
            })
        }
        FieldState::Thermal { beta } => {
            let mut weights = vec![0.0f64; basis.dim()];
            let mut total = 0.0;
            for (i, occ) in basis.occupations.iter().enumerate() {
                let mut w = 1.0;
                for (m, &n) in occ.iter().enumerate() {
                    let x = (-beta * modes[m].omega).exp();
                    w *= x.powi(n as i32) * (1.0 - x);
                }
                weights[i] = w;
                total += w;
            }
            let leakage = 1.0 - total;
            let mut rho = DMatrix::zeros(basis.dim(), basis.dim());
            for i in 0..basis.dim() {
                rho[(i, i)] = cr(weights[i] / total);
            }
            Ok((PreparedField::Density(rho), leakage))
        }
        FieldState::GaussianGeneral(_) => Err(Error::UnsupportedConfiguration(
            "closure-described Gaussian states are not preparable on the oracle".into(),
        )),
    }
}

fn build_pure<F: Fn(&[u8]) -> C64>(basis: &FockBasis, amp: F) -> Result<(PreparedField, f64)> {
    let mut v = DVector::zeros(basis.dim());
    for (i, occ) in basis.occupations.iter().enumerate() {
        v[i] = amp(occ);
    }
    let norm2 = v.norm_squared();
    if norm2 <= 0.0 {
        return Err(Error::InvalidConfiguration("state vanishes after truncation".into()));
    }
    let leakage = 1.0 - norm2;
    Ok((PreparedField::Pure(v / cr(norm2.sqrt())), leakage.max(0.0)))
}

/// ⟨n|α⟩ with the exact normalization (so truncation shows up as leakage).
fn coherent_amp(alpha: C64, n: usize) -> C64 {
    let mut a = cr((-0.5 * alpha.norm_sqr()).exp());
    for j in 1..=n {
        a *= alpha / cr((j as f64).sqrt());
    }
    a
}

/// ⟨n|ξ⟩ for squeezed vacuum; odd amplitudes vanish.
fn squeezed_amp(r: f64, phase: f64, n: usize) -> C64 {
    if n % 2 == 1 {
        return C64::new(0.0, 0.0);
    }
    let m = n / 2;
    let tanh = r.tanh();
    let mut fact = 1.0f64;
    for j in 1..=2 * m {
        fact *= j as f64;
    }
    let mut mfact = 1.0f64;
    for j in 1..=m {
        mfact *= j as f64;
    }
    let base = (-(IM * phase).exp() * tanh).powu(m as u32);
    base * (fact.sqrt() / (2.0f64.powi(m as i32) * mfact)) / cr(r.cosh().sqrt())
}

/// Largest singular value by power iteration on `G†G`.
pub fn spectral_norm(g: &DMatrix<C64>) -> f64 {
    let n = g.ncols();
    if n == 0 {
        return 0.0;
    }
    let mut v = DVector::from_fn(n, |i, _| C64::new(1.0 / ((i + 1) as f64), 0.3 / ((i + 2) as f64)));
    v /= cr(v.norm());
    let mut last = 0.0;
    for _ in 0..300 {
        let w = g.adjoint() * (g * &v);
        let norm = w.norm();
        if norm == 0.0 {
            return 0.0;
        }
        let next = norm.sqrt();
        v = w / cr(norm);
        if (next - last).abs() <= 1e-11 * next.max(1e-300) {
            return next;
        }
        last = next;
    }
    last
}

/// Trace distance `½‖ρ₁ − ρ₂‖₁` of Hermitian matrices.
pub fn trace_distance(r1: &DMatrix<C64>, r2: &DMatrix<C64>) -> f64 {
    let diff = r1 - r2;
    let herm = (&diff + diff.adjoint()) * cr(0.5);
    let eig = herm.symmetric_eigenvalues();
    0.5 * eig.iter().map(|l| l.abs()).sum::<f64>()
}

/// Minimum eigenvalue of a Hermitian matrix (positivity checks).
pub fn min_eigenvalue(r: &DMatrix<C64>) -> f64 {
    let herm = (r + r.adjoint()) * cr(0.5);
    herm.symmetric_eigenvalues().iter().fold(f64::INFINITY, |a, &b| a.min(b))
}

/// Partial trace over all detector factors of a full-space density matrix.
pub fn trace_out_detectors(rho: &DMatrix<C64>, n_det: usize, field_dim: usize) -> DMatrix<C64> {
    let mut out = DMatrix::zeros(field_dim, field_dim);
    for d in 0..(1usize << n_det) {
        for i in 0..field_dim {
            for j in 0..field_dim {
                out[(i, j)] += rho[(d * field_dim + i, d * field_dim + j)];
            }
        }
    }
    out
}

/// Partial trace over the field factor, leaving the detector space.
pub fn trace_out_field(rho: &DMatrix<C64>, n_det: usize, field_dim: usize) -> DMatrix<C64> {
    let d_dim = 1usize << n_det;
    let mut out = DMatrix::zeros(d_dim, d_dim);
    for a in 0..d_dim {
        for b in 0..d_dim {
            let mut acc = C64::new(0.0, 0.0);
            for f in 0..field_dim {
                acc += rho[(a * field_dim + f, b * field_dim + f)];
            }
            out[(a, b)] = acc;
        }
    }
    out
}

/// Partial trace over one detector (bit position `bit`) of a detector-space
/// matrix.
pub fn trace_out_detector_bit(rho: &DMatrix<C64>, n_det: usize, bit: usize) -> DMatrix<C64> {
    let dim = 1usize << n_det;
    let out_dim = dim >> 1;
    let low_mask = (1usize << bit) - 1;
    let expand = |r: usize, b: usize| -> usize { ((r & !low_mask) << 1) | (b << bit) | (r & low_mask) };
    let mut out = DMatrix::zeros(out_dim, out_dim);
    for a in 0..out_dim {
        for b in 0..out_dim {
            for bitval in 0..2 {
                out[(a, b)] += rho[(expand(a, bitval), expand(b, bitval))];
            }
        }
    }
    out
}
