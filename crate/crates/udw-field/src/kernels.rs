//! Smeared kernel integrals behind the perturbative measurement formulas.
//!
//! Every perturbative quantity reduces to "sandwich expectations"
//! `⟨M†⁽ᵖ⁾ φ(y₁)···φ(y_n) M⁽q⁾⟩` with the kernel orders p, q ≤ 2 (plus the
//! p+q = 3 combinations needed one order past leading for orthogonal
//! outcomes). The engine expands the detector matrix elements into phase
//! terms, Wick-expands the field expectation over slot and external legs,
//! and integrates the switching/smearing kernels:
//!
//! * box backends factorize every integral through the mode decomposition
//!   into cached 1-d (`∫χ e^{iαt}`) and time-ordered 2-d
//!   (`∬_{t>t'} χχ' e^{iαt+iβt'}`) quadratures, with smearing transforms
//!   evaluated exactly at the mode wavenumbers;
//! * continuum backends run nested adaptive quadrature over the slot times
//!   with pointlike smearing (delta profiles collapse their integrals
//!   analytically, including the `θ(0) = 1/2` weight of the sudden limit).

use crate::detector::{mu_phase_terms, DetectorSpec, DetectorVector, MuPhaseTerm};
use crate::fieldstate::{wick, Field};
use crate::profiles::ProfileKind;
use crate::quad::{self, QuadOpts};
use crate::spacetime::Event;
use crate::{cr, C64, Error, Result, IM};
use std::cell::RefCell;
use std::collections::HashMap;

/// Numerical options for the kernel integrals.
#[derive(Clone, Copy, Debug)]
pub struct EngineOpts {
    pub quad: QuadOpts,
    /// Mass level used to truncate non-compact switching supports.
    pub support_level: f64,
}

impl Default for EngineOpts {
    fn default() -> Self {
        EngineOpts {
            quad: QuadOpts { rel_tol: 1e-10, abs_tol: 1e-13, max_panels: 60_000 },
            support_level: crate::profiles::DEFAULT_SUPPORT_LEVEL,
        }
    }
}

/// Which detector matrix elements surround the field operators.
#[derive(Clone, Copy)]
pub enum Bracket {
    /// `⟨ψ|μ···|s⟩⟨s|μ···|ψ⟩` — a fixed measurement outcome.
    Selective { s: DetectorVector, psi: DetectorVector },
    /// Outcome-summed: `⟨ψ|μ··· μ···|ψ⟩` (non-selective).
    Traced { psi: DetectorVector },
}

/// Sandwich coefficients by total kernel order 0..=3. The cubic coefficient
/// omits the `(3,0)/(0,3)` pieces; those carry a factor `⟨s|ψ⟩` and the
/// coefficient is only consumed on the orthogonal-outcome branch where that
/// overlap vanishes.
#[derive(Clone, Copy, Debug)]
pub struct SandwichSeries {
    pub k: [C64; 4],
    /// True when the quartic coefficient is structurally zero (centered
    /// state, odd total operator count); ratio expansions may then keep one
    /// extra order.
    pub quartic_vanishes: bool,
}

/// A spacetime point tagged with the field it belongs to (family 0 is the
/// probed field; other families are spectator fields of extended
/// correlators).
#[derive(Clone, Copy, Debug)]
pub struct TaggedPoint {
    pub family: usize,
    pub event: Event,
}

impl TaggedPoint {
    pub fn field(event: Event) -> TaggedPoint {
        TaggedPoint { family: 0, event }
    }
}

/// Mean/covariance oracles of a jointly Gaussian multi-field state.
pub struct JointGaussian {
    pub spatial_dim: usize,
    pub has_mean: bool,
    #[allow(clippy::type_complexity)]
    pub cov: Box<dyn Fn(&TaggedPoint, &TaggedPoint) -> Result<C64> + Send + Sync>,
    #[allow(clippy::type_complexity)]
    pub mean: Box<dyn Fn(&TaggedPoint) -> Result<C64> + Send + Sync>,
}

type CovFn<'a> = Box<dyn Fn(&TaggedPoint, &TaggedPoint) -> Result<C64> + 'a>;
type MeanFn<'a> = Box<dyn Fn(&TaggedPoint) -> Result<C64> + 'a>;

pub struct SandwichEngine<'a> {
    field: Option<&'a Field>,
    cov_fn: CovFn<'a>,
    mean_fn: MeanFn<'a>,
    has_mean: bool,
    det: &'a DetectorSpec,
    opts: EngineOpts,
    chi_support: (f64, f64),
    /// Pinned slot time for a delta switching.
    chi_pinned: Option<f64>,
    backend: Backend,
    s1: RefCell<HashMap<u64, C64>>,
    s2: RefCell<HashMap<(u64, u64), C64>>,
    ft_spatial: RefCell<HashMap<u64, C64>>,
}

enum Backend {
    /// Mode-factorized covariance/mean (box backend, moment-described state).
    BoxFactorized,
    /// Pointwise kernels with pointlike smearing.
    PointSmeared { center: Vec<f64> },
}

impl<'a> SandwichEngine<'a> {
    pub fn new(field: &'a Field, det: &'a DetectorSpec, opts: EngineOpts) -> Result<Self> {
        if det.spatial_dim() != field.spatial_dim() {
            return Err(Error::DimensionMismatch(format!(
                "smearing dimension {} vs field dimension {}",
                det.spatial_dim(),
                field.spatial_dim()
            )));
        }
        let backend = if field.box_cov_terms().is_some() {
            Backend::BoxFactorized
        } else if det.smearing.is_delta() {
            Backend::PointSmeared { center: det.smearing.center().to_vec() }
        } else {
            return Err(Error::UnsupportedConfiguration(
                "non-factorized states require pointlike smearing in the kernel engine".into(),
            ));
        };
        let cov_fn: CovFn<'a> = Box::new(move |a: &TaggedPoint, b: &TaggedPoint| {
            if a.family != 0 || b.family != 0 {
                return Err(Error::UnsupportedConfiguration(
                    "single-field states carry family-0 points only".into(),
                ));
            }
            field.cov(&a.event, &b.event)
        });
        let mean_fn: MeanFn<'a> = Box::new(move |a: &TaggedPoint| {
            if a.family != 0 {
                return Err(Error::UnsupportedConfiguration(
                    "single-field states carry family-0 points only".into(),
                ));
            }
            field.mean(&a.event)
        });
        Self::assemble(Some(field), cov_fn, mean_fn, field.state().has_mean(), det, opts, backend)
    }

    /// Engine over a jointly Gaussian multi-field state; pointlike smearing
    /// only (no mode factorization is available for the closures).
    pub fn with_joint(joint: &'a JointGaussian, det: &'a DetectorSpec, opts: EngineOpts) -> Result<Self> {
        if det.spatial_dim() != joint.spatial_dim {
            return Err(Error::DimensionMismatch("smearing/joint dimension mismatch".into()));
        }
        if !det.smearing.is_delta() {
            return Err(Error::UnsupportedConfiguration(
                "joint states require pointlike smearing in the kernel engine".into(),
            ));
        }
        let backend = Backend::PointSmeared { center: det.smearing.center().to_vec() };
        let cov_fn: CovFn<'a> = Box::new(move |a: &TaggedPoint, b: &TaggedPoint| (joint.cov)(a, b));
        let mean_fn: MeanFn<'a> = Box::new(move |a: &TaggedPoint| (joint.mean)(a));
        Self::assemble(None, cov_fn, mean_fn, joint.has_mean, det, opts, backend)
    }

    #[allow(clippy::too_many_arguments)]
    fn assemble(
        field: Option<&'a Field>,
        cov_fn: CovFn<'a>,
        mean_fn: MeanFn<'a>,
        has_mean: bool,
        det: &'a DetectorSpec,
        opts: EngineOpts,
        backend: Backend,
    ) -> Result<Self> {
        let chi_pinned = match &det.chi.kind {
            ProfileKind::Delta { center } => Some(center[0]),
            _ => None,
        };
        let chi_support = match chi_pinned {
            Some(c) => (c, c),
            None => det.chi.support_interval(opts.support_level),
        };
        Ok(SandwichEngine {
            field,
            cov_fn,
            mean_fn,
            has_mean,
            det,
            opts,
            chi_support,
            chi_pinned,
            backend,
            s1: RefCell::new(HashMap::new()),
            s2: RefCell::new(HashMap::new()),
            ft_spatial: RefCell::new(HashMap::new()),
        })
    }

    pub fn detector(&self) -> &DetectorSpec {
        self.det
    }

    /// `∫ dt χ(t) e^{iαt}` over the truncated support.
    fn s1(&self, alpha: f64) -> C64 {
        if let Some(c) = self.chi_pinned {
            return (IM * alpha * c).exp();
        }
        let key = alpha.to_bits();
        if let Some(v) = self.s1.borrow().get(&key) {
            return *v;
        }
        let (lo, hi) = self.chi_support;
        let chi = &self.det.chi;
        let v = quad::integrate(
            |t| cr(chi.eval1(t).expect("switching evaluable")) * (IM * alpha * t).exp(),
            lo,
            hi,
            &self.opts.quad,
        )
        .value;
        self.s1.borrow_mut().insert(key, v);
        v
    }

    /// `∬_{t > t'} χ(t) χ(t') e^{iαt + iβt'}`.
    fn s2(&self, alpha: f64, beta: f64) -> C64 {
        if let Some(c) = self.chi_pinned {
            // θ(0) = 1/2 on the pinned diagonal
            return (IM * (alpha + beta) * c).exp() * 0.5;
        }
        let key = (alpha.to_bits(), beta.to_bits());
        if let Some(v) = self.s2.borrow().get(&key) {
            return *v;
        }
        let (lo, hi) = self.chi_support;
        let chi = &self.det.chi;
        let v = quad::integrate_triangle(
            |t, tp| {
                cr(chi.eval1(t).unwrap() * chi.eval1(tp).unwrap())
                    * (IM * (alpha * t + beta * tp)).exp()
            },
            lo,
            hi,
            &self.opts.quad,
        );
        self.s2.borrow_mut().insert(key, v);
        v
    }

    /// Smearing transform of the slot side: `∫ dx F(x) e^{i w x}` = F̃(−w).
    fn ft(&self, w: f64) -> C64 {
        let key = w.to_bits();
        if let Some(v) = self.ft_spatial.borrow().get(&key) {
            return *v;
        }
        let v = self.det.smearing.fourier().spatial(&[-w]);
        self.ft_spatial.borrow_mut().insert(key, v);
        v
    }

    /// Sandwich coefficients of λ^k, k = 0..=3, for
    /// `Σ_{p+q=k} ⟨M†⁽ᵖ⁾ φ(y₁)···φ(y_n) M⁽q⁾⟩` (selective bracket) or the
    /// outcome-summed version (traced; k ≤ 2 suffices there).
    pub fn sandwich_series(&self, bracket: Bracket, points: &[Event]) -> Result<SandwichSeries> {
        let tagged: Vec<TaggedPoint> = points.iter().map(|e| TaggedPoint::field(*e)).collect();
        self.sandwich_series_tagged(bracket, &tagged)
    }

    pub fn sandwich_series_tagged(
        &self,
        bracket: Bracket,
        points: &[TaggedPoint],
    ) -> Result<SandwichSeries> {
        let mut k = [C64::new(0.0, 0.0); 4];
        for (p, q) in [(0, 0), (1, 0), (0, 1), (2, 0), (1, 1), (0, 2), (2, 1), (1, 2)] {
            let order = p + q;
            if order == 3 && matches!(bracket, Bracket::Traced { .. }) {
                continue;
            }
            k[order] += self.sandwich_tagged(p, q, bracket, points)?;
        }
        Ok(SandwichSeries { k, quartic_vanishes: !self.has_mean && points.len() % 2 == 1 })
    }

    /// One `⟨M†⁽ᵖ⁾ φ···φ M⁽q⁾⟩` contribution (without powers of λ).
    pub fn sandwich(&self, p: usize, q: usize, bracket: Bracket, points: &[Event]) -> Result<C64> {
        let tagged: Vec<TaggedPoint> = points.iter().map(|e| TaggedPoint::field(*e)).collect();
        self.sandwich_tagged(p, q, bracket, &tagged)
    }

    pub fn sandwich_tagged(
        &self,
        p: usize,
        q: usize,
        bracket: Bracket,
        points: &[TaggedPoint],
    ) -> Result<C64> {
        assert!(p <= 2 && q <= 2 && p + q <= 3, "kernel orders are capped at two");
        let n = points.len();
        let n_slots = p + q;
        // operator legs: [M†-slots][externals][M-slots]
        let legs: Vec<Leg> = (0..p)
            .map(Leg::Slot)
            .chain((0..n).map(Leg::Ext))
            .chain((p..p + q).map(Leg::Slot))
            .collect();
        // θ-ordered slot pair: (later, earlier)
        let theta: Option<(usize, usize)> = if p == 2 {
            Some((1, 0)) // M†² = −∬θ(a−b)⟨ψ|μ(b)μ(a)|s⟩ φ(b)φ(a)
        } else if q == 2 {
            Some((p, p + 1)) // M² = −∬θ(c−d)⟨s|μ(c)μ(d)|ψ⟩ φ(c)φ(d)
        } else {
            None
        };
        let sign = side_sign(p).conj() * side_sign(q);
        let phases = self.phase_terms(p, q, &bracket);
        if phases.is_empty() {
            return Ok(C64::new(0.0, 0.0));
        }
        let partitions = wick::partitions(legs.len(), self.has_mean);
        let mut total = C64::new(0.0, 0.0);
        for part in &partitions {
            let mut ext_const = cr(1.0);
            let mut elements: Vec<Element> = Vec::new();
            let mut degenerate = false;
            for &(i, j) in &part.pairs {
                match (&legs[i], &legs[j]) {
                    (Leg::Ext(a), Leg::Ext(b)) => {
                        ext_const *= (self.cov_fn)(&points[*a], &points[*b])?;
                    }
                    (Leg::Slot(sl), Leg::Ext(e)) => {
                        elements.push(Element::SlotExt { slot: *sl, ext: *e, slot_first: true });
                    }
                    (Leg::Ext(e), Leg::Slot(sl)) => {
                        elements.push(Element::SlotExt { slot: *sl, ext: *e, slot_first: false });
                    }
                    (Leg::Slot(s1), Leg::Slot(s2)) => {
                        elements.push(Element::SlotSlot { first: *s1, second: *s2 });
                    }
                }
            }
            if !degenerate {
                for &i in &part.singles {
                    match &legs[i] {
                        Leg::Ext(e) => {
                            let m = (self.mean_fn)(&points[*e])?;
                            if m.norm() == 0.0 {
                                degenerate = true;
                                break;
                            }
                            ext_const *= m;
                        }
                        Leg::Slot(sl) => elements.push(Element::SlotMean { slot: *sl }),
                    }
                }
            }
            if degenerate || ext_const.norm() == 0.0 {
                continue;
            }
            for phase in &phases {
                let contribution = match &self.backend {
                    Backend::BoxFactorized => {
                        self.box_term(n_slots, theta, &phase.sigma, &elements, points)?
                    }
                    Backend::PointSmeared { center } => {
                        self.generic_term(n_slots, theta, &phase.sigma, &elements, points, center)?
                    }
                };
                total += sign * phase.coeff * ext_const * contribution;
            }
        }
        Ok(total)
    }

    /// Combined μ phase terms for the bracket, with per-slot Ω signs (slots
    /// ordered by id: M†-side string first, then M-side string).
    fn phase_terms(&self, p: usize, q: usize, bracket: &Bracket) -> Vec<MuPhaseTerm> {
        match bracket {
            Bracket::Selective { s, psi } => {
                let bra = mu_phase_terms(psi, s, p);
                let ket = mu_phase_terms(s, psi, q);
                let mut out = Vec::new();
                for b in &bra {
                    for k in &ket {
                        let mut sigma = b.sigma.clone();
                        sigma.extend_from_slice(&k.sigma);
                        out.push(MuPhaseTerm { coeff: b.coeff * k.coeff, sigma });
                    }
                }
                out
            }
            Bracket::Traced { psi } => mu_phase_terms(psi, psi, p + q),
        }
    }

    /// Box backend: enumerate cov/mean term choices per element and integrate
    /// the factorized exponentials.
    fn box_term(
        &self,
        n_slots: usize,
        theta: Option<(usize, usize)>,
        sigma: &[i8],
        elements: &[Element],
        points: &[TaggedPoint],
    ) -> Result<C64> {
        let field = self.field.expect("box backend implies a plain field");
        let (_, modes) = field.box_modes().expect("box backend");
        let cov = field.box_cov_terms().expect("box backend").clone();
        let mean_terms = field.box_mean_terms().cloned();
        let gap = self.det.gap;
        let base_alpha: Vec<f64> = (0..n_slots).map(|i| sigma[i] as f64 * gap).collect();
        let mut total = C64::new(0.0, 0.0);
        let radix: Vec<usize> = elements
            .iter()
            .map(|e| match e {
                Element::SlotMean { .. } => mean_terms.as_ref().map(|m| m.len()).unwrap_or(0),
                _ => cov.len(),
            })
            .collect();
        if radix.iter().any(|&r| r == 0) {
            return Ok(total);
        }
        let mut choice = vec![0usize; elements.len()];
        'combos: loop {
            let mut coeff = cr(1.0);
            let mut alpha = base_alpha.clone();
            for (e, &c) in elements.iter().zip(&choice) {
                match e {
                    Element::SlotExt { slot, ext, slot_first } => {
                        let term = &cov[c];
                        let (slot_side, ext_side) = if *slot_first {
                            (&term.left, &term.right)
                        } else {
                            (&term.right, &term.left)
                        };
                        coeff *= term.coeff
                            * ext_side.eval(modes, &points[*ext].event)
                            * self.ft(slot_side.wavenumber(modes));
                        alpha[*slot] += slot_side.alpha(modes);
                    }
                    Element::SlotSlot { first, second } => {
                        let term = &cov[c];
                        coeff *= term.coeff
                            * self.ft(term.left.wavenumber(modes))
                            * self.ft(term.right.wavenumber(modes));
                        alpha[*first] += term.left.alpha(modes);
                        alpha[*second] += term.right.alpha(modes);
                    }
                    Element::SlotMean { slot } => {
                        let term = &mean_terms.as_ref().expect("checked radix")[c];
                        coeff *= term.coeff * self.ft(term.factor.wavenumber(modes));
                        alpha[*slot] += term.factor.alpha(modes);
                    }
                }
                if coeff.norm() == 0.0 {
                    if !advance(&mut choice, &radix) {
                        break 'combos;
                    }
                    continue 'combos;
                }
            }
            let mut val = coeff;
            let mut used = vec![false; n_slots];
            if let Some((later, earlier)) = theta {
                val *= self.s2(alpha[later], alpha[earlier]);
                used[later] = true;
                used[earlier] = true;
            }
            for (sidx, u) in used.iter().enumerate() {
                if !u {
                    val *= self.s1(alpha[sidx]);
                }
            }
            total += val;
            if elements.is_empty() || !advance(&mut choice, &radix) {
                break;
            }
        }
        Ok(total)
    }

    /// Continuum/pointlike backend: nested adaptive quadrature over the free
    /// slot times.
    fn generic_term(
        &self,
        n_slots: usize,
        theta: Option<(usize, usize)>,
        sigma: &[i8],
        elements: &[Element],
        points: &[TaggedPoint],
        center: &[f64],
    ) -> Result<C64> {
        let gap = self.det.gap;
        let chi = &self.det.chi;
        let at = |t: f64| TaggedPoint::field(Event::new(t, center));
        let eval = |times: &[f64]| -> C64 {
            let mut v = cr(1.0);
            for e in elements {
                v *= match e {
                    Element::SlotExt { slot, ext, slot_first } => {
                        let se = at(times[*slot]);
                        if *slot_first {
                            (self.cov_fn)(&se, &points[*ext]).unwrap()
                        } else {
                            (self.cov_fn)(&points[*ext], &se).unwrap()
                        }
                    }
                    Element::SlotSlot { first, second } => {
                        (self.cov_fn)(&at(times[*first]), &at(times[*second])).unwrap()
                    }
                    Element::SlotMean { slot } => (self.mean_fn)(&at(times[*slot])).unwrap(),
                };
                if v.norm() == 0.0 {
                    return v;
                }
            }
            let phase: f64 = (0..n_slots).map(|i| sigma[i] as f64 * gap * times[i]).sum();
            v * (IM * phase).exp()
        };
        if let Some(c) = self.chi_pinned {
            let times = vec![c; n_slots];
            let theta_weight = if theta.is_some() { 0.5 } else { 1.0 };
            return Ok(eval(&times) * theta_weight);
        }
        let (lo, hi) = self.chi_support;
        let w = |t: f64| chi.eval1(t).unwrap();
        let opts = &self.opts.quad;
        let value = match (n_slots, theta) {
            (0, _) => eval(&[]),
            (1, _) => quad::integrate(|t| cr(w(t)) * eval(&[t]), lo, hi, opts).value,
            (2, Some((later, earlier))) => quad::integrate_triangle(
                |tl, te| {
                    let mut times = [0.0; 2];
                    times[later] = tl;
                    times[earlier] = te;
                    cr(w(tl) * w(te)) * eval(&times)
                },
                lo,
                hi,
                opts,
            ),
            (2, None) => quad::integrate_rect(
                |t0, t1| cr(w(t0) * w(t1)) * eval(&[t0, t1]),
                lo,
                hi,
                lo,
                hi,
                opts,
            ),
            (3, Some((later, earlier))) => {
                let free: usize = (0..3).find(|i| *i != later && *i != earlier).unwrap();
                let outer_opts = QuadOpts {
                    rel_tol: opts.rel_tol * 10.0,
                    abs_tol: opts.abs_tol * 10.0,
                    max_panels: opts.max_panels,
                };
                quad::integrate(
                    |tf| {
                        cr(w(tf))
                            * quad::integrate_triangle(
                                |tl, te| {
                                    let mut times = [0.0; 3];
                                    times[later] = tl;
                                    times[earlier] = te;
                                    times[free] = tf;
                                    cr(w(tl) * w(te)) * eval(&times)
                                },
                                lo,
                                hi,
                                opts,
                            )
                    },
                    lo,
                    hi,
                    &outer_opts,
                )
                .value
            }
            _ => unreachable!("slot counts are 0..=3"),
        };
        Ok(value)
    }
}

fn advance(choice: &mut [usize], radix: &[usize]) -> bool {
    for (c, &r) in choice.iter_mut().zip(radix) {
        *c += 1;
        if *c < r {
            return true;
        }
        *c = 0;
    }
    false
}

fn side_sign(order: usize) -> C64 {
    match order {
        0 => cr(1.0),
        1 => -IM,
        2 => cr(-1.0),
        _ => unreachable!(),
    }
}

#[derive(Clone, Copy, Debug)]
enum Leg {
    Slot(usize),
    Ext(usize),
}

#[derive(Clone, Copy, Debug)]
enum Element {
    SlotExt { slot: usize, ext: usize, slot_first: bool },
    SlotSlot { first: usize, second: usize },
    SlotMean { slot: usize },
}
