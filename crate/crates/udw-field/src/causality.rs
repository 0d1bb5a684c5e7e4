//! Causality diagnostics: the Δ estimators that localize the spacetime
//! effect of a selective measurement update.
//!
//! `Δ_n(x₁..x_n) = (⟨φ···φ⟩_updated − ⟨φ···φ⟩)·⟨E⟩` expanded in the
//! coupling. The formulas here are assembled directly from the
//! covariance/commutator decompositions (independently of the series
//! machinery in [`crate::update`], which the consistency tests compare
//! against): at first order a covariance term and a commutator term; at
//! second order two commutator terms plus twice the real part of the
//! connected S-term.

use crate::detector::{matrix_element, DetectorVector};
use crate::fieldstate::Field;
use crate::perturbation::MeasurementSpec;
use crate::profiles::{Profile, ProfileKind, DEFAULT_SUPPORT_LEVEL};
use crate::quad::{self, QuadOpts};
use crate::spacetime::{classify, CausalRelation, Event};
use crate::{cr, C64, Error, Result, IM};
use rayon::prelude::*;
use std::collections::BTreeMap;
use std::f64::consts::PI;

/// A Δ evaluation with its named decomposition; `value` is the sum of the
/// decomposition terms by construction, so the map is the complete account.
#[derive(Clone, Debug)]
pub struct DeltaReport {
    pub points: Vec<Event>,
    pub relations: Vec<CausalRelation>,
    pub value: C64,
    pub order: usize,
    pub decomposition: BTreeMap<String, C64>,
}

impl DeltaReport {
    fn from_terms(
        points: Vec<Event>,
        relations: Vec<CausalRelation>,
        order: usize,
        decomposition: BTreeMap<String, C64>,
    ) -> DeltaReport {
        let value = decomposition.values().sum();
        DeltaReport { points, relations, value, order, decomposition }
    }
}

struct SmearedCov<'a> {
    field: &'a Field,
    smearing: &'a Profile,
    quad: QuadOpts,
}

impl<'a> SmearedCov<'a> {
    fn new(field: &'a Field, smearing: &'a Profile) -> Result<Self> {
        match &smearing.kind {
            ProfileKind::Delta { .. } => {}
            ProfileKind::Gaussian { .. } => {
                if field.spatial_dim() != 3 {
                    return Err(Error::UnsupportedConfiguration(
                        "smeared causality integrals support pointlike smearing or 3-d gaussians"
                            .into(),
                    ));
                }
            }
            _ => {
                return Err(Error::UnsupportedConfiguration(
                    "causality integrals support delta or gaussian smearing".into(),
                ))
            }
        }
        Ok(SmearedCov {
            field,
            smearing,
            quad: QuadOpts { rel_tol: 1e-9, abs_tol: 1e-13, max_panels: 60_000 },
        })
    }

    /// `∫ dx F(x) cov((t, x), y)` (or with swapped argument order).
    fn slot_ext(&self, t: f64, y: &Event, slot_first: bool) -> C64 {
        match &self.smearing.kind {
            ProfileKind::Delta { center } => {
                let e = Event::new(t, center);
                if slot_first {
                    self.field.cov(&e, y).unwrap()
                } else {
                    self.field.cov(y, &e).unwrap()
                }
            }
            ProfileKind::Gaussian { width, center, amplitude } => {
                let r_cy: f64 = y
                    .x()
                    .iter()
                    .zip(center)
                    .map(|(a, b)| (a - b) * (a - b))
                    .sum::<f64>()
                    .sqrt();
                let cov_rad = |s: f64| -> C64 {
                    let e = Event::new(t, &[s, 0.0, 0.0]);
                    let o = Event::new(y.t, &[0.0, 0.0, 0.0]);
                    if slot_first {
                        self.field.cov(&e, &o).unwrap()
                    } else {
                        self.field.cov(&o, &e).unwrap()
                    }
                };
                gaussian_shell_integral(*width, *amplitude, r_cy, &self.quad, cov_rad)
            }
            _ => unreachable!("guarded in constructor"),
        }
    }

    /// `∬ dx dx' F(x) F(x') cov((t, x), (t', x'))`.
    fn slot_slot(&self, t: f64, tp: f64) -> C64 {
        match &self.smearing.kind {
            ProfileKind::Delta { center } => {
                self.field.cov(&Event::new(t, center), &Event::new(tp, center)).unwrap()
            }
            ProfileKind::Gaussian { width, amplitude, .. } => {
                let cov_rad = |u: f64| -> C64 {
                    self.field
                        .cov(&Event::new(t, &[u, 0.0, 0.0]), &Event::new(tp, &[0.0, 0.0, 0.0]))
                        .unwrap()
                };
                gaussian_pair_distance_integral(*width, *amplitude, &self.quad, cov_rad)
            }
            _ => unreachable!(),
        }
    }

    /// `∫ dx F(x) ⟨φ(t, x)⟩`.
    fn slot_mean(&self, t: f64) -> C64 {
        match &self.smearing.kind {
            ProfileKind::Delta { center } => self.field.mean(&Event::new(t, center)).unwrap(),
            ProfileKind::Gaussian { width, amplitude, center } => {
                let mean_rad = |s: f64| -> C64 {
                    let mut x = center.clone();
                    x[0] += s;
                    self.field.mean(&Event::new(t, &x)).unwrap()
                };
                // isotropic-state assumption: mean depends on |x - origin|;
                // only centered packets are supported here
                gaussian_shell_integral(*width, *amplitude, 0.0, &self.quad, mean_rad)
            }
            _ => unreachable!(),
        }
    }
}

/// `∫d³x F(|x−c|) h(|x−y|)` with `F` a gaussian of the given width/amplitude
/// and `R = |c−y|`, via the bipolar shell reduction.
fn gaussian_shell_integral<H: Fn(f64) -> C64>(
    width: f64,
    amplitude: f64,
    r_cy: f64,
    opts: &QuadOpts,
    h: H,
) -> C64 {
    let s2 = width * width;
    let reach = 9.0 * width;
    if r_cy < 1e-9 {
        // concentric limit: 4π ∫ ρ² F(ρ) h(ρ) dρ
        return quad::integrate(
            |rho| cr(4.0 * PI * rho * rho * amplitude * (-0.5 * rho * rho / s2).exp()) * h(rho),
            0.0,
            reach,
            opts,
        )
        .value;
    }
    // shell weight: (2π s / R) ∫_{|s−R|}^{s+R} ρ F(ρ) dρ, closed for gaussians
    let weight = |s: f64| -> f64 {
        let a = (s - r_cy).abs();
        let b = s + r_cy;
        2.0 * PI * s / r_cy
            * amplitude
            * s2
            * ((-0.5 * a * a / s2).exp() - (-0.5 * b * b / s2).exp())
    };
    quad::integrate(
        |s| cr(weight(s)) * h(s),
        (r_cy - reach).max(0.0),
        r_cy + reach,
        opts,
    )
    .value
}

/// `∬ d³x d³x' F(x)F(x') h(|x−x'|)` for identical centered gaussians: the
/// separation is Maxwell-distributed with scale √2·width.
fn gaussian_pair_distance_integral<H: Fn(f64) -> C64>(
    width: f64,
    amplitude: f64,
    opts: &QuadOpts,
    h: H,
) -> C64 {
    let mass = amplitude * (2.0 * PI).powf(1.5) * width.powi(3);
    let s = width * 2.0f64.sqrt();
    let density = move |u: f64| (2.0 / PI).sqrt() * u * u / (s * s * s) * (-0.5 * u * u / (s * s)).exp();
    quad::integrate(|u| cr(mass * mass * density(u)) * h(u), 0.0, 10.0 * s, opts).value
}

fn chi_bounds(m: &MeasurementSpec) -> (f64, f64) {
    m.detector.chi.support_interval(DEFAULT_SUPPORT_LEVEL)
}

fn chi_pinned(m: &MeasurementSpec) -> Option<f64> {
    match &m.detector.chi.kind {
        ProfileKind::Delta { center } => Some(center[0]),
        _ => None,
    }
}

/// `z(t) = ⟨ψ|s⟩⟨s|μ(t)|ψ⟩`
fn z_factor(m: &MeasurementSpec, t: f64) -> C64 {
    m.psi.inner(&m.s) * matrix_element(&m.s, &[t], &m.psi, m.detector.gap)
}

/// `c₂(t,t') = ⟨ψ|s⟩⟨s|μ(t)μ(t')|ψ⟩ − ⟨ψ|μ(t)|s⟩⟨s|μ(t')|ψ⟩` (the connected
/// S-term coefficient).
fn c2_factor(m: &MeasurementSpec, t: f64, tp: f64) -> C64 {
    let gap = m.detector.gap;
    m.psi.inner(&m.s) * matrix_element(&m.s, &[t, tp], &m.psi, gap)
        - matrix_element(&m.psi, &[t], &m.s, gap) * matrix_element(&m.s, &[tp], &m.psi, gap)
}

/// `⟨s|ψ⟩⟨ψ|μ(t')μ(t)|s⟩` (the adjoint-side commutator coefficient).
fn bra_mu2(m: &MeasurementSpec, tp: f64, t: f64) -> C64 {
    m.s.inner(&m.psi) * matrix_element(&m.psi, &[tp, t], &m.s, m.detector.gap)
}

/// `⟨ψ|s⟩⟨s|μ(t)μ(t')|ψ⟩`
fn ket_mu2(m: &MeasurementSpec, t: f64, tp: f64) -> C64 {
    m.psi.inner(&m.s) * matrix_element(&m.s, &[t, tp], &m.psi, m.detector.gap)
}

fn integrate_chi<F: Fn(f64) -> C64>(m: &MeasurementSpec, opts: &QuadOpts, f: F) -> C64 {
    if let Some(c) = chi_pinned(m) {
        return f(c);
    }
    let (lo, hi) = chi_bounds(m);
    let chi = &m.detector.chi;
    quad::integrate(|t| cr(chi.eval1(t).unwrap()) * f(t), lo, hi, opts).value
}

fn integrate_chi_triangle<F: Fn(f64, f64) -> C64 + Sync>(
    m: &MeasurementSpec,
    opts: &QuadOpts,
    f: F,
) -> C64 {
    if let Some(c) = chi_pinned(m) {
        // θ(0) = 1/2 on the collapsed diagonal
        return f(c, c) * 0.5;
    }
    let (lo, hi) = chi_bounds(m);
    let chi = &m.detector.chi;
    quad::integrate_triangle(
        |t, tp| cr(chi.eval1(t).unwrap() * chi.eval1(tp).unwrap()) * f(t, tp),
        lo,
        hi,
        opts,
    )
}

/// Δ₁ estimator at the given order (1 or 2), with the covariance/commutator
/// (order 1) and commutator/S-term (order 2) decomposition.
pub fn delta1(field: &Field, m: &MeasurementSpec, x1: &Event, order: usize) -> Result<DeltaReport> {
    delta_n(field, m, &[*x1], order)
}

/// Δ₂ estimator at the given order.
pub fn delta2(
    field: &Field,
    m: &MeasurementSpec,
    x1: &Event,
    x2: &Event,
    order: usize,
) -> Result<DeltaReport> {
    delta_n(field, m, &[*x1, *x2], order)
}

/// General Δ_n for n = 1 or 2 query points.
fn delta_n(field: &Field, m: &MeasurementSpec, points: &[Event], order: usize) -> Result<DeltaReport> {
    if !(1..=2).contains(&order) {
        return Err(Error::InvalidConfiguration("Δ orders are 1 or 2".into()));
    }
    if points.is_empty() || points.len() > 2 {
        return Err(Error::InvalidConfiguration("Δ estimators take 1 or 2 points".into()));
    }
    let lambda = m.detector.coupling;
    let sm = SmearedCov::new(field, &m.detector.smearing)?;
    let opts = sm.quad;
    let region = m.interaction_region()?;
    let relations = points.iter().map(|p| classify(p, &region)).collect();

    let w_n = field.n_point(points)?;

    let mut decomposition = BTreeMap::new();

    // --- first order ---
    // covariance term: 2λ ∫χF Im(z) Cov[φ(slot), Πφ(x)]
    // commutator term: −iλ ∫χF z ⟨[φ(slot), Πφ(x)]⟩
    let cov_term = integrate_chi(m, &opts, |t| {
        let im_z = z_factor(m, t).im;
        cr(2.0 * im_z) * slot_product_cov(&sm, field, t, points, true)
    }) * lambda;
    let comm_term = integrate_chi(m, &opts, |t| {
        let z = z_factor(m, t);
        let fwd = slot_product_corr(&sm, field, t, points, true);
        let bwd = slot_product_corr(&sm, field, t, points, false);
        -IM * z * (fwd - bwd)
    }) * lambda;
    decomposition.insert("covariance".into(), cov_term);
    decomposition.insert("commutator".into(), comm_term);

    if order == 2 {
        let l2 = lambda * lambda;
        // −λ² ∬θ χχ'FF' [ bra-side commutator + ket-side commutator + 2Re S ]
        let comm_bra = integrate_chi_triangle(m, &opts, |t, tp| {
            let coeff = bra_mu2(m, tp, t);
            // ⟨φ(t') [φ(t), Πφ(x)]⟩
            let with = three_corr(&sm, field, tp, t, points, ThreeOrder::PrimeFirst);
            let without = three_corr(&sm, field, tp, t, points, ThreeOrder::PrimeFirstReversed);
            coeff * (with - without)
        }) * (-l2);
        let comm_ket = integrate_chi_triangle(m, &opts, |t, tp| {
            let coeff = ket_mu2(m, t, tp);
            // ⟨[Πφ(x), φ(t)] φ(t')⟩
            let first = three_corr(&sm, field, tp, t, points, ThreeOrder::ProductFirst);
            let second = three_corr(&sm, field, tp, t, points, ThreeOrder::ProductMiddle);
            coeff * (first - second)
        }) * (-l2);
        let s_term = integrate_chi_triangle(m, &opts, |t, tp| {
            let coeff = c2_factor(m, t, tp);
            // ⟨φ(t) Πφ(x) φ(t')⟩ − ⟨φ(t)φ(t')⟩⟨Πφ(x)⟩
            let sandwich = sandwich_corr(&sm, field, t, tp, points);
            let disconnected = sm.slot_slot(t, tp) * w_n;
            let s = coeff * (sandwich - disconnected);
            cr(2.0) * cr(s.re)
        }) * (-l2);
        decomposition.insert("commutator-adjoint".into(), comm_bra);
        decomposition.insert("commutator-direct".into(), comm_ket);
        decomposition.insert("s-term".into(), s_term);
    }

    Ok(DeltaReport::from_terms(points.to_vec(), relations, order, decomposition))
}

/// `Cov[φ(slot,t), Πφ(x)] = ⟨φ(slot)Πφ(x)⟩ − ⟨φ(slot)⟩⟨Πφ(x)⟩`.
fn slot_product_cov(sm: &SmearedCov, field: &Field, t: f64, points: &[Event], slot_first: bool) -> C64 {
    let full = slot_product_corr(sm, field, t, points, slot_first);
    let mean_slot = sm.slot_mean(t);
    let w_n = field.n_point(points).unwrap();
    full - mean_slot * w_n
}

/// `⟨φ(t,slot) φ(x₁)···⟩` (slot_first) or `⟨φ(x₁)··· φ(t,slot)⟩`.
fn slot_product_corr(
    sm: &SmearedCov,
    field: &Field,
    t: f64,
    points: &[Event],
    slot_first: bool,
) -> C64 {
    match points.len() {
        1 => {
            let pair = sm.slot_ext(t, &points[0], slot_first);
            let means = sm.slot_mean(t) * field.mean(&points[0]).unwrap();
            pair + means
        }
        2 => {
            let c1 = sm.slot_ext(t, &points[0], slot_first);
            let c2 = sm.slot_ext(t, &points[1], slot_first);
            let c12 = field.cov(&points[0], &points[1]).unwrap();
            let ms = sm.slot_mean(t);
            let m1 = field.mean(&points[0]).unwrap();
            let m2 = field.mean(&points[1]).unwrap();
            // Gaussian third moment with operator order preserved
            c1 * m2 + c2 * m1 + c12 * ms + ms * m1 * m2
        }
        _ => unreachable!(),
    }
}

enum ThreeOrder {
    /// ⟨φ(t') φ(t) Πφ(x)⟩
    PrimeFirst,
    /// ⟨φ(t') Πφ(x) φ(t)⟩
    PrimeFirstReversed,
    /// ⟨Πφ(x) φ(t) φ(t')⟩
    ProductFirst,
    /// ⟨φ(t) Πφ(x) φ(t')⟩
    ProductMiddle,
}

/// Correlators of two slot insertions and the external product, in the four
/// operator orders needed by the second-order commutator terms.
fn three_corr(
    sm: &SmearedCov,
    field: &Field,
    tp: f64,
    t: f64,
    points: &[Event],
    order: ThreeOrder,
) -> C64 {
    // legs listed in operator order; a slot leg is (time, tag)
    // evaluate via the Gaussian moment expansion over typed legs
    enum L {
        S(f64),
        E(usize),
    }
    let legs: Vec<L> = match order {
        ThreeOrder::PrimeFirst => {
            let mut v = vec![L::S(tp), L::S(t)];
            v.extend((0..points.len()).map(L::E));
            v
        }
        ThreeOrder::PrimeFirstReversed => {
            let mut v = vec![L::S(tp)];
            v.extend((0..points.len()).map(L::E));
            v.push(L::S(t));
            v
        }
        ThreeOrder::ProductFirst => {
            let mut v: Vec<L> = (0..points.len()).map(L::E).collect();
            v.push(L::S(t));
            v.push(L::S(tp));
            v
        }
        ThreeOrder::ProductMiddle => {
            let mut v = vec![L::S(t)];
            v.extend((0..points.len()).map(L::E));
            v.push(L::S(tp));
            v
        }
    };
    let cov = |a: &L, b: &L| -> C64 {
        match (a, b) {
            (L::S(ta), L::S(tb)) => sm.slot_slot(*ta, *tb),
            (L::S(ta), L::E(e)) => sm.slot_ext(*ta, &points[*e], true),
            (L::E(e), L::S(tb)) => sm.slot_ext(*tb, &points[*e], false),
            (L::E(a), L::E(b)) => field.cov(&points[*a], &points[*b]).unwrap(),
        }
    };
    let mean = |a: &L| -> C64 {
        match a {
            L::S(t) => sm.slot_mean(*t),
            L::E(e) => field.mean(&points[*e]).unwrap(),
        }
    };
    let parts = crate::fieldstate::wick::partitions(legs.len(), field.state().has_mean());
    let mut acc = C64::new(0.0, 0.0);
    for p in &parts {
        let mut term = cr(1.0);
        for &(i, j) in &p.pairs {
            term *= cov(&legs[i], &legs[j]);
        }
        for &i in &p.singles {
            term *= mean(&legs[i]);
        }
        acc += term;
    }
    acc
}

/// `⟨φ(t) Πφ(x) φ(t')⟩`
fn sandwich_corr(sm: &SmearedCov, field: &Field, t: f64, tp: f64, points: &[Event]) -> C64 {
    three_corr(sm, field, tp, t, points, ThreeOrder::ProductMiddle)
}

// ---------------------------------------------------------------------------
// eigenstate closed forms
// ---------------------------------------------------------------------------

/// κ and σ of `c₂(t,t') = κ e^{iσΩ(t−t')}` for eigenstate (s, ψ) pairs.
fn eigenstate_phase(m: &MeasurementSpec) -> Result<(f64, i8)> {
    let is_eigen = |v: &DetectorVector| v.g.norm() < 1e-12 || v.e.norm() < 1e-12;
    if !is_eigen(&m.psi) || !is_eigen(&m.s) {
        return Err(Error::InvalidConfiguration(
            "the closed Δ₂ form requires eigenstate (s, ψ) pairs".into(),
        ));
    }
    let kappa = c2_factor(m, 0.0, 0.0);
    let probe = c2_factor(m, 1.0, 0.0) / kappa;
    let sigma = if probe.im > 0.0 { 1i8 } else { -1i8 };
    // verify the factorization |c₂| is time-independent
    debug_assert!((probe.norm() - 1.0).abs() < 1e-10);
    Ok((kappa.re, sigma))
}

/// Closed real-space Δ₂ for eigenstate pairs over zero-mean Gaussian states:
/// `−κ (A₁ Ā₂ + A₂ Ā₁)` with the smeared positive-phase amplitudes
/// `A_i = ∫dt dx χF e^{iσΩt} cov((t,x), x_i)`.
pub fn delta2_eigenstate_closed(
    field: &Field,
    m: &MeasurementSpec,
    x1: &Event,
    x2: &Event,
) -> Result<C64> {
    if field.state().has_mean() {
        return Err(Error::InvalidConfiguration(
            "the closed Δ₂ form assumes a zero-mean Gaussian state".into(),
        ));
    }
    let (kappa, sigma) = eigenstate_phase(m)?;
    let sm = SmearedCov::new(field, &m.detector.smearing)?;
    let opts = sm.quad;
    let gap = m.detector.gap;
    let amp = |y: &Event| -> C64 {
        integrate_chi(m, &opts, |t| {
            (IM * (sigma as f64) * gap * t).exp() * sm.slot_ext(t, y, true)
        })
    };
    let a1 = amp(x1);
    let a2 = amp(x2);
    let l2 = m.detector.coupling.powi(2);
    Ok(cr(-kappa * l2) * (a1 * a2.conj() + a2 * a1.conj()))
}

/// Momentum-space Δ₂ for eigenstate pairs on the continuum vacuum, through
/// the profile transforms χ̃ and F̃:
/// `A_i = ∫ d^dk/((2π)^d 2ω) χ̃(σΩ−ω) F̃(k) e^{i(ωt_i − k·x_i)}` and
/// `Δ₂ = −κλ²(A₁Ā₂ + A₂Ā₁)`.
pub fn delta2_momentum(
    field: &Field,
    m: &MeasurementSpec,
    x1: &Event,
    x2: &Event,
) -> Result<C64> {
    let (dim, mass) = match field.basis() {
        crate::fieldstate::ModeBasis::Continuum { dim, mass, .. } => (*dim, *mass),
        _ => {
            return Err(Error::UnsupportedConfiguration(
                "the momentum-space Δ₂ runs on the continuum backend".into(),
            ))
        }
    };
    if !matches!(field.state(), crate::fieldstate::FieldState::Vacuum) {
        return Err(Error::UnsupportedConfiguration(
            "the momentum-space Δ₂ assumes the vacuum".into(),
        ));
    }
    let (kappa, sigma) = eigenstate_phase(m)?;
    let gap = m.detector.gap;
    let chi_ft = m.detector.chi.fourier();
    let f_ft = m.detector.smearing.fourier();
    let center = m.detector.smearing.center().to_vec();
    let opts = QuadOpts { rel_tol: 1e-10, abs_tol: 1e-14, max_panels: 100_000 };
    // χ̃ decays like a gaussian of the switching width; bound the k range
    let k_max = {
        let width = match &m.detector.chi.kind {
            ProfileKind::Gaussian { width, .. } => *width,
            _ => {
                return Err(Error::UnsupportedConfiguration(
                    "the momentum-space Δ₂ needs a gaussian switching for convergence".into(),
                ))
            }
        };
        gap + 14.0 / width
    };
    let amp = |y: &Event| -> C64 {
        let r: f64 = y
            .x()
            .iter()
            .zip(&center)
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt();
        match dim {
            3 => {
                quad::integrate(
                    |k| {
                        let omega = (k * k + mass * mass).sqrt();
                        let sinc = if k * r < 1e-10 { 1.0 } else { (k * r).sin() / (k * r) };
                        chi_ft.temporal(sigma as f64 * gap - omega)
                            * cr(k * k / (2.0 * omega) * f_ft.radial(k) * sinc)
                            * (IM * omega * y.t).exp()
                    },
                    0.0,
                    k_max,
                    &opts,
                )
                .value
                    / (2.0 * PI * PI)
            }
            1 => {
                quad::integrate(
                    |k| {
                        let omega = (k * k + mass * mass).sqrt();
                        chi_ft.temporal(sigma as f64 * gap - omega)
                            * cr(f_ft.radial(k) * (k * r).cos() / (2.0 * omega))
                            * (IM * omega * y.t).exp()
                    },
                    0.0,
                    k_max,
                    &opts,
                )
                .value
                    / PI
            }
            _ => unreachable!("continuum momentum path covers d = 1, 3"),
        }
    };
    let a1 = amp(x1);
    let a2 = amp(x2);
    let l2 = m.detector.coupling.powi(2);
    Ok(cr(-kappa * l2) * (a1 * a2.conj() + a2 * a1.conj()))
}

// ---------------------------------------------------------------------------
// scans
// ---------------------------------------------------------------------------

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ScanKind {
    /// Control row: `w₁^NS − w₁` (vanishes off the causal future).
    NonSelectiveOne,
    /// `w₂^NS − w₂` control.
    NonSelectiveTwo,
    /// Selective Δ₁.
    SelectiveOne,
    /// Selective Δ₂ against the region center as the second point.
    SelectiveTwo,
}

#[derive(Clone, Debug)]
pub struct ScanRow {
    pub event: Event,
    pub relation: CausalRelation,
    pub value: C64,
    pub decomposition: BTreeMap<String, C64>,
}

/// Evaluate a Δ (or non-selective control) over a grid of events.
pub fn spacelike_scan(
    field: &Field,
    m: &MeasurementSpec,
    events: &[Event],
    kind: ScanKind,
    order: usize,
) -> Result<Vec<ScanRow>> {
    let region = m.interaction_region()?;
    let rows: Vec<Result<ScanRow>> = events
        .par_iter()
        .map(|ev| -> Result<ScanRow> {
            let relation = classify(ev, &region);
            let (value, decomposition) = match kind {
                ScanKind::NonSelectiveOne => {
                    let w0 = field.n_point(&[*ev])?;
                    let w = crate::update::ns_update(field, m, &[*ev], order)?;
                    (w - w0, BTreeMap::new())
                }
                ScanKind::NonSelectiveTwo => {
                    let second = Event::new(
                        region.temporal_midpoint(),
                        &region
                            .spatial_center
                            .iter()
                            .enumerate()
                            .map(|(i, c)| if i == 0 { c + 2.0 * (region.spatial_radius + 0.1) } else { *c })
                            .collect::<Vec<_>>(),
                    );
                    let pts = [*ev, second];
                    let w0 = field.n_point(&pts)?;
                    let w = crate::update::ns_update(field, m, &pts, order)?;
                    (w - w0, BTreeMap::new())
                }
                ScanKind::SelectiveOne => {
                    let rep = delta1(field, m, ev, order)?;
                    (rep.value, rep.decomposition)
                }
                ScanKind::SelectiveTwo => {
                    let second = Event::new(
                        region.temporal_midpoint(),
                        &region
                            .spatial_center
                            .iter()
                            .enumerate()
                            .map(|(i, c)| if i == 0 { c + 2.0 * (region.spatial_radius + 1.0) } else { *c })
                            .collect::<Vec<_>>(),
                    );
                    let rep = delta2(field, m, ev, &second, order)?;
                    (rep.value, rep.decomposition)
                }
            };
            Ok(ScanRow { event: *ev, relation, value, decomposition })
        })
        .collect();
    rows.into_iter().collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::detector::DetectorSpec;
    use crate::fieldstate::{FieldState, ModeBasis, SqueezeParam};
    use crate::profiles::Profile;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn pointlike_sudden(lambda: f64, psi: DetectorVector, s: DetectorVector) -> MeasurementSpec {
        let det = DetectorSpec::new(
            1.0,
            lambda,
            Profile::delta_time(0.0),
            Profile::delta_space(3, vec![0.0; 3]),
            "d",
        )
        .unwrap();
        MeasurementSpec::standard(det, psi, s).unwrap()
    }

    #[test]
    fn pointlike_sudden_delta1_formula() {
        // Δ₁ = λ⟨φ(0)φ(x₁)⟩ + (λ/2)⟨[φ(0),φ(x₁)]⟩ + O(λ²)
        let field = Field::vacuum(ModeBasis::continuum(3, 0.0).unwrap()).unwrap();
        let m = pointlike_sudden(0.3, DetectorVector::i_plus(), DetectorVector::excited());
        let x1 = Event::d3(0.2, 1.5, 0.0, 0.0);
        let rep = delta1(&field, &m, &x1, 1).unwrap();
        let origin = Event::d3(0.0, 0.0, 0.0, 0.0);
        let w = field.two_point(&origin, &x1).unwrap();
        let comm = w - field.two_point(&x1, &origin).unwrap();
        let expected = w * 0.3 + comm * (0.3 / 2.0);
        assert!((rep.value - expected).norm() < 1e-9, "{:?} vs {expected:?}", rep.value);
        // spacelike point: the commutator part dies, Δ₁ = λ·w₂ (real)
        assert!(rep.relations[0].is_spacelike());
        assert!((rep.value - cr(0.3 * w.re)).norm() < 1e-6);
    }

    #[test]
    fn eigenstates_kill_first_order() {
        let field = Field::vacuum(ModeBasis::continuum(3, 0.0).unwrap()).unwrap();
        for (psi, s) in [
            (DetectorVector::ground(), DetectorVector::ground()),
            (DetectorVector::ground(), DetectorVector::excited()),
            (DetectorVector::excited(), DetectorVector::ground()),
            (DetectorVector::excited(), DetectorVector::excited()),
        ] {
            let m = pointlike_sudden(0.2, psi, s);
            let rep = delta1(&field, &m, &Event::d3(0.5, 2.0, 0.0, 0.0), 1).unwrap();
            assert!(rep.value.norm() < 1e-12, "({psi:?},{s:?}): {:?}", rep.value);
        }
    }

    /// Gaussian-state theorem: Δ₁ vanishes at both orders for eigenstate
    /// pairs over zero-mean Gaussian states, everywhere.
    #[test]
    fn gaussian_state_theorem() {
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        let bases: Vec<Field> = vec![
            Field::vacuum(ModeBasis::box_symmetric(10.0, 0.3, 2).unwrap()).unwrap(),
            Field::new(
                ModeBasis::box_symmetric(10.0, 0.3, 2).unwrap(),
                FieldState::Thermal { beta: 2.0 },
            )
            .unwrap(),
            Field::new(
                ModeBasis::box_symmetric(10.0, 0.3, 2).unwrap(),
                FieldState::Squeezed(vec![
                    SqueezeParam { r: 0.3, phase: 0.7 },
                    SqueezeParam { r: 0.2, phase: -1.1 },
                    SqueezeParam { r: 0.15, phase: 2.0 },
                    SqueezeParam { r: 0.25, phase: 0.4 },
                ]),
            )
            .unwrap(),
        ];
        let det = DetectorSpec::new(
            1.0,
            0.1,
            Profile::gaussian_time(0.6, 0.0),
            Profile::delta_space(1, vec![0.0]),
            "d",
        )
        .unwrap();
        for field in &bases {
            for (psi, s) in [
                (DetectorVector::ground(), DetectorVector::ground()),
                (DetectorVector::ground(), DetectorVector::excited()),
                (DetectorVector::excited(), DetectorVector::ground()),
                (DetectorVector::excited(), DetectorVector::excited()),
            ] {
                let m = MeasurementSpec::standard(det.clone(), psi, s).unwrap();
                for _ in 0..5 {
                    let ev = Event::d1(rng.gen_range(-3.0..3.0), rng.gen_range(-4.0..4.0));
                    for order in [1, 2] {
                        let rep = delta1(field, &m, &ev, order).unwrap();
                        assert!(
                            rep.value.norm() < 1e-10,
                            "order {order} at {ev:?}: {:?}",
                            rep.value
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn delta2_matches_closed_form_for_eigenstates() {
        // continuum vacuum (exact microcausality): the general ℛ₂/S₂ path
        // must reproduce the factorized closed form at spacelike separation
        let basis = ModeBasis::continuum_with_regulator(
            3,
            0.0,
            crate::fieldstate::continuum::Regulator { eps_rel: 1e-6, richardson: true },
        )
        .unwrap();
        let field = Field::vacuum(basis).unwrap();
        let det = DetectorSpec::new(
            0.9,
            0.1,
            Profile::gaussian_time(0.5, 0.0),
            Profile::delta_space(3, vec![0.0; 3]),
            "d",
        )
        .unwrap();
        for (psi, s) in [
            (DetectorVector::ground(), DetectorVector::excited()),
            (DetectorVector::excited(), DetectorVector::ground()),
            (DetectorVector::ground(), DetectorVector::ground()),
            (DetectorVector::excited(), DetectorVector::excited()),
        ] {
            let m = MeasurementSpec::standard(det.clone(), psi, s).unwrap();
            let (x1, x2) = (Event::d3(0.4, 5.0, 0.0, 0.0), Event::d3(-0.6, 0.0, 5.5, 0.0));
            let general = delta2(&field, &m, &x1, &x2, 2).unwrap();
            let closed = delta2_eigenstate_closed(&field, &m, &x1, &x2).unwrap();
            assert!(
                (general.value - closed).norm() < 1e-6 * (1.0 + closed.norm()),
                "({psi:?},{s:?}): {:?} vs {closed:?}",
                general.value
            );
            // first order vanishes for eigenstates
            let first = delta2(&field, &m, &x1, &x2, 1).unwrap();
            assert!(first.value.norm() < 1e-12);
        }
    }

    #[test]
    fn delta2_momentum_matches_real_space() {
        let basis = ModeBasis::continuum_with_regulator(
            3,
            0.0,
            crate::fieldstate::continuum::Regulator { eps_rel: 1e-6, richardson: true },
        )
        .unwrap();
        let field = Field::vacuum(basis).unwrap();
        let det = DetectorSpec::new(
            1.1,
            0.08,
            Profile::gaussian_time(0.8, 0.0),
            Profile::delta_space(3, vec![0.0; 3]),
            "d",
        )
        .unwrap();
        let m = MeasurementSpec::standard(det, DetectorVector::ground(), DetectorVector::excited())
            .unwrap();
        let x1 = Event::d3(0.3, 6.0, 0.0, 0.0);
        let x2 = Event::d3(-0.5, 0.0, 6.5, 0.0);
        let real_space = delta2_eigenstate_closed(&field, &m, &x1, &x2).unwrap();
        let momentum = delta2_momentum(&field, &m, &x1, &x2).unwrap();
        assert!(
            (real_space - momentum).norm() < 1e-7 * real_space.norm().max(1e-12),
            "{real_space:?} vs {momentum:?}"
        );
    }

    #[test]
    fn lambda_zero_gives_zero() {
        let field = Field::vacuum(ModeBasis::continuum(3, 0.0).unwrap()).unwrap();
        let m = pointlike_sudden(0.0, DetectorVector::i_plus(), DetectorVector::excited());
        let rep = delta2(&field, &m, &Event::d3(0.0, 2.0, 0.0, 0.0), &Event::d3(0.1, -2.0, 0.0, 0.0), 2)
            .unwrap();
        assert_eq!(rep.value, C64::new(0.0, 0.0));
    }

    #[test]
    fn decomposition_sums_to_value() {
        let field = Field::vacuum(ModeBasis::box_symmetric(10.0, 0.4, 2).unwrap()).unwrap();
        let det = DetectorSpec::new(
            0.9,
            0.07,
            Profile::gaussian_time(0.5, 0.0),
            Profile::delta_space(1, vec![0.0]),
            "d",
        )
        .unwrap();
        let m = MeasurementSpec::standard(det, DetectorVector::i_plus(), DetectorVector::plus())
            .unwrap();
        let rep = delta2(&field, &m, &Event::d1(1.0, 2.0), &Event::d1(0.5, -3.0), 2).unwrap();
        let sum: C64 = rep.decomposition.values().sum();
        assert!((sum - rep.value).norm() <= 1e-12 * (1.0 + rep.value.norm()));
        assert_eq!(rep.decomposition.len(), 5);
    }
}
