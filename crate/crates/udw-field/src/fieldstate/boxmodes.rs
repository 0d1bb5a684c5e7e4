//! Discrete box-mode (1+1 dimensional, periodic) field data.
//!
//! Mode functions are `f_n(t, x) = e^{−i(ω_n t − k_n x)}/√(2Lω_n)`; the field
//! operator is `φ = Σ_n (f_n a_n + f̄_n a_n†)`. Gaussian states are described
//! by their per-mode second moments, which also drive the factorized kernel
//! integrals used by the perturbative machinery.

use crate::spacetime::Event;
use crate::{cr, C64, IM};

#[derive(Clone, Copy, Debug)]
pub struct BoxMode {
    pub k: f64,
    pub omega: f64,
}

/// Per-mode second moments `⟨a a⟩, ⟨a† a⟩` (plus conjugates) of a Gaussian
/// zero-displacement state. Vacuum is `aa = 0, nbar = 0`.
#[derive(Clone, Copy, Debug)]
pub struct ModeMoments {
    /// ⟨a a⟩
    pub aa: C64,
    /// ⟨a† a⟩ (real, ≥ 0)
    pub nbar: f64,
}

impl ModeMoments {
    pub fn vacuum() -> Self {
        ModeMoments { aa: C64::new(0.0, 0.0), nbar: 0.0 }
    }

    pub fn thermal(beta: f64, omega: f64) -> Self {
        ModeMoments { aa: C64::new(0.0, 0.0), nbar: 1.0 / ((beta * omega).exp() - 1.0) }
    }

    /// Squeezed vacuum with parameter `ξ = r e^{iφ}`:
    /// ⟨aa⟩ = −e^{iφ} sinh r cosh r, ⟨a†a⟩ = sinh² r.
    pub fn squeezed(r: f64, phase: f64) -> Self {
        let (s, c) = (r.sinh(), r.cosh());
        ModeMoments { aa: -(IM * phase).exp() * s * c, nbar: s * s }
    }
}

/// Mode function `f_n(x)` including the 1/√(2Lω) normalization.
pub fn mode_fn(length: f64, mode: &BoxMode, ev: &Event) -> C64 {
    let norm = 1.0 / (2.0 * length * mode.omega).sqrt();
    cr(norm) * (-IM * (mode.omega * ev.t - mode.k * ev.x()[0])).exp()
}

/// One factor `coeff · e^{s·(−i)(ωt − kx)}` of a covariance term; `sign = +1`
/// is the positive-frequency mode function (without normalization, which is
/// folded into the term coefficient).
#[derive(Clone, Copy, Debug)]
pub struct ModeFactor {
    pub mode_idx: usize,
    /// +1 for `e^{−i(ωt−kx)}`, −1 for the conjugate.
    pub sign: i8,
}

impl ModeFactor {
    pub fn eval(&self, modes: &[BoxMode], ev: &Event) -> C64 {
        let m = &modes[self.mode_idx];
        let ph = m.omega * ev.t - m.k * ev.x()[0];
        ((-IM) * (self.sign as f64) * ph).exp()
    }

    /// Frequency contributed to a time integral `∫ χ(t) e^{iαt}`: the factor
    /// is `e^{−i s ω t}` in time, i.e. α = −s·ω.
    pub fn alpha(&self, modes: &[BoxMode]) -> f64 {
        -(self.sign as f64) * modes[self.mode_idx].omega
    }

    /// Wavenumber in `e^{+i s k x}`: the spatial integral `∫F(x)e^{iskx}dx`
    /// equals `F̃(−s·k)`.
    pub fn wavenumber(&self, modes: &[BoxMode]) -> f64 {
        (self.sign as f64) * modes[self.mode_idx].k
    }
}

/// Separable covariance decomposition `cov(a, b) = Σ coeff · u(a) · v(b)`.
#[derive(Clone, Debug)]
pub struct CovTerm {
    pub coeff: C64,
    pub left: ModeFactor,
    pub right: ModeFactor,
}

/// Covariance terms for a state given by per-mode moments.
pub fn covariance_terms(length: f64, modes: &[BoxMode], moments: &[ModeMoments]) -> Vec<CovTerm> {
    assert_eq!(modes.len(), moments.len());
    let mut terms = Vec::new();
    for (idx, (m, mom)) in modes.iter().zip(moments).enumerate() {
        let norm = 1.0 / (2.0 * length * m.omega);
        let plus = ModeFactor { mode_idx: idx, sign: 1 };
        let minus = ModeFactor { mode_idx: idx, sign: -1 };
        // ⟨a a†⟩ = nbar + 1 → f(a) f̄(b)
        terms.push(CovTerm { coeff: cr(norm * (mom.nbar + 1.0)), left: plus, right: minus });
        if mom.nbar != 0.0 {
            terms.push(CovTerm { coeff: cr(norm * mom.nbar), left: minus, right: plus });
        }
        if mom.aa.norm() > 0.0 {
            terms.push(CovTerm { coeff: cr(norm) * mom.aa, left: plus, right: plus });
            terms.push(CovTerm { coeff: cr(norm) * mom.aa.conj(), left: minus, right: minus });
        }
    }
    terms
}

/// Mean-field terms `φ̄(x) = Σ coeff · (mode factor)(x)` for a coherent
/// displacement `⟨a_n⟩ = α_n`.
#[derive(Clone, Debug)]
pub struct MeanTerm {
    pub coeff: C64,
    pub factor: ModeFactor,
}

pub fn mean_terms(length: f64, modes: &[BoxMode], alphas: &[C64]) -> Vec<MeanTerm> {
    assert_eq!(modes.len(), alphas.len());
    let mut terms = Vec::new();
    for (idx, (m, alpha)) in modes.iter().zip(alphas).enumerate() {
        if alpha.norm() == 0.0 {
            continue;
        }
        let norm = 1.0 / (2.0 * length * m.omega).sqrt();
        terms.push(MeanTerm {
            coeff: cr(norm) * alpha,
            factor: ModeFactor { mode_idx: idx, sign: 1 },
        });
        terms.push(MeanTerm {
            coeff: cr(norm) * alpha.conj(),
            factor: ModeFactor { mode_idx: idx, sign: -1 },
        });
    }
    terms
}

pub fn eval_cov(length: f64, modes: &[BoxMode], terms: &[CovTerm], a: &Event, b: &Event) -> C64 {
    let _ = length;
    terms
        .iter()
        .map(|t| t.coeff * t.left.eval(modes, a) * t.right.eval(modes, b))
        .sum()
}

pub fn eval_mean(modes: &[BoxMode], terms: &[MeanTerm], a: &Event) -> C64 {
    terms.iter().map(|t| t.coeff * t.factor.eval(modes, a)).sum()
}
