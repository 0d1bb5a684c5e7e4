//! Two-level detector algebra: monopole operator products and matrix
//! elements between arbitrary pure states.
//!
//! The interaction-picture monopole operator is
//! `μ(t) = |g⟩⟨e| e^{−iΩt} + |e⟩⟨g| e^{iΩt}`; products of N of them are
//! diagonal (N even) or antidiagonal (N odd) with phases `e^{∓iΩT}`,
//! `T = Σ (−1)^{n−1} t_n`.

use crate::profiles::Profile;
use crate::{cr, C64, Error, Result, IM};
use nalgebra::Matrix2;

/// Coupling data for one detector.
#[derive(Clone, Debug)]
pub struct DetectorSpec {
    /// Energy gap Ω between ground and excited levels.
    pub gap: f64,
    /// Coupling strength λ ≥ 0.
    pub coupling: f64,
    /// Switching function χ(t).
    pub chi: Profile,
    /// Spatial smearing F(x).
    pub smearing: Profile,
    pub label: String,
}

impl DetectorSpec {
    pub fn new(gap: f64, coupling: f64, chi: Profile, smearing: Profile, label: &str) -> Result<Self> {
        if coupling < 0.0 {
            return Err(Error::InvalidConfiguration("coupling must be non-negative".into()));
        }
        if chi.dim != 1 {
            return Err(Error::DimensionMismatch("switching must be 1-dimensional".into()));
        }
        Ok(DetectorSpec { gap, coupling, chi, smearing, label: label.to_string() })
    }

    pub fn spatial_dim(&self) -> usize {
        self.smearing.dim
    }
}

/// A pure detector state in the {|g⟩, |e⟩} basis, normalized on construction.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DetectorVector {
    pub g: C64,
    pub e: C64,
}

impl DetectorVector {
    pub fn new(g: C64, e: C64) -> DetectorVector {
        let norm = (g.norm_sqr() + e.norm_sqr()).sqrt();
        assert!(norm > 0.0, "detector state must be nonzero");
        DetectorVector { g: g / norm, e: e / norm }
    }

    pub fn ground() -> DetectorVector {
        DetectorVector { g: cr(1.0), e: cr(0.0) }
    }

    pub fn excited() -> DetectorVector {
        DetectorVector { g: cr(0.0), e: cr(1.0) }
    }

    /// `(|g⟩ + |e⟩)/√2`
    pub fn plus() -> DetectorVector {
        DetectorVector::new(cr(1.0), cr(1.0))
    }

    /// `(i|g⟩ + |e⟩)/√2`, the pointlike-sudden example state.
    pub fn i_plus() -> DetectorVector {
        DetectorVector::new(IM, cr(1.0))
    }

    /// The unique (up to phase) state orthogonal to `self`.
    pub fn orthogonal(&self) -> DetectorVector {
        DetectorVector { g: -self.e.conj(), e: self.g.conj() }
    }

    pub fn inner(&self, other: &DetectorVector) -> C64 {
        self.g.conj() * other.g + self.e.conj() * other.e
    }

    pub fn as_column(&self) -> nalgebra::Vector2<C64> {
        nalgebra::Vector2::new(self.g, self.e)
    }
}

/// Product `μ(t_1)·μ(t_2)···μ(t_N)` as a 2×2 matrix in the ordered basis
/// {|g⟩, |e⟩}.
pub fn mu_product(times: &[f64], gap: f64) -> Result<Matrix2<C64>> {
    if times.is_empty() {
        return Err(Error::InvalidConfiguration("mu_product requires at least one time".into()));
    }
    let t_alt: f64 = times
        .iter()
        .enumerate()
        .map(|(n, t)| if n % 2 == 0 { *t } else { -*t })
        .sum();
    let phase_minus = (-IM * gap * t_alt).exp();
    let phase_plus = (IM * gap * t_alt).exp();
    let zero = C64::new(0.0, 0.0);
    if times.len() % 2 == 1 {
        Ok(Matrix2::new(zero, phase_minus, phase_plus, zero))
    } else {
        Ok(Matrix2::new(phase_minus, zero, zero, phase_plus))
    }
}

/// `⟨s| μ(t_1)···μ(t_N) |ψ⟩`; an empty time list gives `⟨s|ψ⟩`.
pub fn matrix_element(
    s: &DetectorVector,
    times: &[f64],
    psi: &DetectorVector,
    gap: f64,
) -> C64 {
    if times.is_empty() {
        return s.inner(psi);
    }
    let m = mu_product(times, gap).expect("nonempty");
    let v = m * psi.as_column();
    s.g.conj() * v[0] + s.e.conj() * v[1]
}

/// One term of a monopole-product matrix element, written as
/// `coeff · exp(iΩ Σ_j sigma_j t_j)`.
#[derive(Clone, Debug)]
pub struct MuPhaseTerm {
    pub coeff: C64,
    /// Sign of Ω multiplying each time argument, in operator order.
    pub sigma: Vec<i8>,
}

/// Expand `⟨a| μ(t_1)···μ(t_N) |b⟩` into at most two phase terms; for N = 0
/// the single term is the constant `⟨a|b⟩`.
pub fn mu_phase_terms(a: &DetectorVector, b: &DetectorVector, n: usize) -> Vec<MuPhaseTerm> {
    if n == 0 {
        return vec![MuPhaseTerm { coeff: a.inner(b), sigma: vec![] }];
    }
    // μ-product row g picks e^{-iΩT}: sigma alternates -,+,-,...
    // target component of |b⟩: e for odd N (antidiagonal), g for even N.
    let sig_minus: Vec<i8> = (0..n).map(|j| if j % 2 == 0 { -1 } else { 1 }).collect();
    let sig_plus: Vec<i8> = sig_minus.iter().map(|s| -s).collect();
    let (b_for_g, b_for_e) = if n % 2 == 1 { (b.e, b.g) } else { (b.g, b.e) };
    let mut out = Vec::with_capacity(2);
    let c1 = a.g.conj() * b_for_g;
    if c1.norm() > 0.0 {
        out.push(MuPhaseTerm { coeff: c1, sigma: sig_minus });
    }
    let c2 = a.e.conj() * b_for_e;
    if c2.norm() > 0.0 {
        out.push(MuPhaseTerm { coeff: c2, sigma: sig_plus });
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use rand::Rng;

    fn random_state(rng: &mut impl Rng) -> DetectorVector {
        DetectorVector::new(
            C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)),
            C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)),
        )
    }

    #[test]
    fn single_mu_matches_definition() {
        let t = 0.37;
        let gap = 1.3;
        let m = mu_product(&[t], gap).unwrap();
        assert_abs_diff_eq!((m[(0, 1)] - (-IM * gap * t).exp()).norm(), 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!((m[(1, 0)] - (IM * gap * t).exp()).norm(), 0.0, epsilon = 1e-15);
        assert_eq!(m[(0, 0)], C64::new(0.0, 0.0));
    }

    #[test]
    fn mu_squared_at_equal_times_is_identity() {
        let m = mu_product(&[0.8, 0.8], 2.1).unwrap();
        assert!((m - Matrix2::identity()).norm() < 1e-15);
    }

    #[test]
    fn odd_triple_alternating_sum() {
        let gap = 0.9;
        let (t1, t2, t3) = (0.2, -0.5, 1.1);
        let m = mu_product(&[t1, t2, t3], gap).unwrap();
        let t_alt = t1 - t2 + t3;
        assert!((m[(0, 1)] - (-IM * gap * t_alt).exp()).norm() < 1e-15);
        assert_eq!(m[(0, 0)], C64::new(0.0, 0.0));
    }

    #[test]
    fn empty_product_rejected() {
        assert!(mu_product(&[], 1.0).is_err());
    }

    #[test]
    fn matrix_element_examples() {
        let gap = 1.0;
        // diagonal element of a single (antidiagonal) μ vanishes
        let g = DetectorVector::ground();
        assert_eq!(matrix_element(&g, &[0.4], &g, gap), C64::new(0.0, 0.0));
        // ⟨e|μ(t)|g⟩ = e^{iΩt}
        let e = DetectorVector::excited();
        let t = -0.73;
        assert!((matrix_element(&e, &[t], &g, gap) - (IM * gap * t).exp()).norm() < 1e-15);
        // N = 0 with the pointlike-sudden example state
        let psi = DetectorVector::i_plus();
        let v = matrix_element(&e, &[], &psi, gap);
        assert_abs_diff_eq!(v.re, 1.0 / 2.0f64.sqrt(), epsilon = 1e-15);
        assert_abs_diff_eq!(v.im, 0.0, epsilon = 1e-15);
    }

    #[test]
    fn unitarity_of_single_mu() {
        let m = mu_product(&[1.7], 0.6).unwrap();
        let prod = m * m.adjoint();
        assert!((prod - Matrix2::identity()).norm() < 1e-15);
    }

    #[test]
    fn composition_property() {
        let gap = 1.4;
        let a = [0.3, -0.9];
        let b = [0.5, 2.0, -0.1];
        let joined: Vec<f64> = a.iter().chain(b.iter()).copied().collect();
        let lhs = mu_product(&joined, gap).unwrap();
        let rhs = mu_product(&a, gap).unwrap() * mu_product(&b, gap).unwrap();
        assert!((lhs - rhs).norm() < 1e-14);
    }

    #[test]
    fn eigenstate_selection_rule() {
        let gap = 1.0;
        let states = [DetectorVector::ground(), DetectorVector::excited()];
        for s in &states {
            for psi in &states {
                for times in [vec![0.1], vec![0.1, 0.7], vec![0.1, 0.7, -0.3]] {
                    let me = matrix_element(s, &times, psi, gap);
                    let same = s == psi;
                    let even = times.len() % 2 == 0;
                    if same == even {
                        assert!(me.norm() > 0.9, "expected nonzero for {times:?}");
                    } else {
                        assert_eq!(me.norm(), 0.0, "expected zero for {times:?}");
                    }
                }
            }
        }
    }

    #[test]
    fn phase_terms_reproduce_matrix_elements() {
        let mut rng = rand::thread_rng();
        let gap = 0.77;
        for n in 1..=4 {
            for _ in 0..20 {
                let a = random_state(&mut rng);
                let b = random_state(&mut rng);
                let times: Vec<f64> = (0..n).map(|_| rng.gen_range(-2.0..2.0)).collect();
                let direct = matrix_element(&a, &times, &b, gap);
                let expanded: C64 = mu_phase_terms(&a, &b, n)
                    .iter()
                    .map(|term| {
                        let phase: f64 = term
                            .sigma
                            .iter()
                            .zip(&times)
                            .map(|(s, t)| *s as f64 * gap * t)
                            .sum();
                        term.coeff * (IM * phase).exp()
                    })
                    .sum();
                assert!((direct - expanded).norm() < 1e-13);
            }
        }
    }

    #[test]
    fn orthogonal_complement() {
        let mut rng = rand::thread_rng();
        for _ in 0..20 {
            let s = random_state(&mut rng);
            let sbar = s.orthogonal();
            assert!(s.inner(&sbar).norm() < 1e-15);
            assert_abs_diff_eq!(sbar.inner(&sbar).re, 1.0, epsilon = 1e-14);
        }
    }
}
