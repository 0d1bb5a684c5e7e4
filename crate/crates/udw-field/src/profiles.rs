//! Switching functions χ(t) and spatial smearing functions F(x).
//!
//! Four parametric families are supported: Gaussians, compactly supported
//! bumps, indicator functions of an interval/ball, and Dirac deltas. Deltas
//! are integration-only symbols: any integral operator consuming one
//! collapses the corresponding integral analytically, and pointwise
//! evaluation is rejected.
//!
//! Fourier conventions, fixed once for the whole crate:
//! `χ̃(ω) = ∫ dt χ(t) e^{+iωt}` for one-dimensional (temporal) profiles and
//! `F̃(k) = ∫ d^d x F(x) e^{−ik·x}` for spatial ones.

use crate::quad::{self, ChebFn, QuadOpts};
use crate::{cr, C64, Error, Result, IM};
use std::f64::consts::PI;
use std::sync::Arc;

/// Default fraction of L¹ mass enclosed by the reported support of
/// non-compact profiles.
pub const DEFAULT_SUPPORT_LEVEL: f64 = 1.0 - 1e-8;

#[derive(Clone, Debug)]
pub enum ProfileKind {
    /// `amplitude · exp(-|x-center|² / (2 width²))`
    Gaussian { width: f64, center: Vec<f64>, amplitude: f64 },
    /// `exp(1 - 1/(1 - |x-center|²/radius²))` inside the ball, 0 outside.
    CompactBump { radius: f64, center: Vec<f64> },
    /// 1 inside the interval (1-dim) or the ball of `radius` (d-dim), else 0.
    Indicator { radius: f64, center: Vec<f64> },
    /// Dirac delta at `center`. Integration-only.
    Delta { center: Vec<f64> },
}

/// A switching (1-dim) or smearing (d-dim, isotropic) profile.
#[derive(Clone, Debug)]
pub struct Profile {
    pub kind: ProfileKind,
    pub dim: usize,
}

impl Profile {
    pub fn gaussian_time(width: f64, center: f64) -> Profile {
        assert!(width > 0.0, "gaussian width must be positive");
        Profile {
            kind: ProfileKind::Gaussian { width, center: vec![center], amplitude: 1.0 },
            dim: 1,
        }
    }

    pub fn gaussian_space(dim: usize, width: f64, center: Vec<f64>) -> Profile {
        assert!(width > 0.0 && center.len() == dim);
        Profile { kind: ProfileKind::Gaussian { width, center, amplitude: 1.0 }, dim }
    }

    pub fn with_amplitude(mut self, amplitude: f64) -> Profile {
        assert!(amplitude > 0.0, "amplitude must be positive");
        if let ProfileKind::Gaussian { amplitude: a, .. } = &mut self.kind {
            *a = amplitude;
        } else {
            panic!("amplitude is only adjustable on gaussian profiles");
        }
        self
    }

    pub fn indicator_time(lo: f64, hi: f64) -> Profile {
        assert!(hi > lo);
        Profile {
            kind: ProfileKind::Indicator { radius: 0.5 * (hi - lo), center: vec![0.5 * (hi + lo)] },
            dim: 1,
        }
    }

    pub fn indicator_ball(dim: usize, radius: f64, center: Vec<f64>) -> Profile {
        assert!(radius > 0.0 && center.len() == dim);
        Profile { kind: ProfileKind::Indicator { radius, center }, dim }
    }

    pub fn bump_time(radius: f64, center: f64) -> Profile {
        assert!(radius > 0.0);
        Profile { kind: ProfileKind::CompactBump { radius, center: vec![center] }, dim: 1 }
    }

    pub fn bump_space(dim: usize, radius: f64, center: Vec<f64>) -> Profile {
        assert!(radius > 0.0 && center.len() == dim);
        Profile { kind: ProfileKind::CompactBump { radius, center }, dim }
    }

    pub fn delta_time(center: f64) -> Profile {
        Profile { kind: ProfileKind::Delta { center: vec![center] }, dim: 1 }
    }

    pub fn delta_space(dim: usize, center: Vec<f64>) -> Profile {
        assert!(center.len() == dim);
        Profile { kind: ProfileKind::Delta { center }, dim }
    }

    pub fn is_delta(&self) -> bool {
        matches!(self.kind, ProfileKind::Delta { .. })
    }

    pub fn center(&self) -> &[f64] {
        match &self.kind {
            ProfileKind::Gaussian { center, .. }
            | ProfileKind::CompactBump { center, .. }
            | ProfileKind::Indicator { center, .. }
            | ProfileKind::Delta { center } => center,
        }
    }

    /// Pointwise value. Fails on delta profiles.
    pub fn eval(&self, x: &[f64]) -> Result<f64> {
        if x.len() != self.dim {
            return Err(Error::DimensionMismatch(format!(
                "profile has dimension {}, point has {}",
                self.dim,
                x.len()
            )));
        }
        let r2 = |c: &[f64]| -> f64 {
            x.iter().zip(c).map(|(a, b)| (a - b) * (a - b)).sum::<f64>()
        };
        match &self.kind {
            ProfileKind::Gaussian { width, center, amplitude } => {
                Ok(amplitude * (-0.5 * r2(center) / (width * width)).exp())
            }
            ProfileKind::CompactBump { radius, center } => {
                let u2 = r2(center) / (radius * radius);
                if u2 >= 1.0 {
                    Ok(0.0)
                } else {
                    Ok((1.0 - 1.0 / (1.0 - u2)).exp())
                }
            }
            ProfileKind::Indicator { radius, center } => {
                Ok(if r2(center) <= radius * radius { 1.0 } else { 0.0 })
            }
            ProfileKind::Delta { .. } => Err(Error::DeltaEvaluation),
        }
    }

    /// Convenience for 1-dim profiles.
    pub fn eval1(&self, t: f64) -> Result<f64> {
        self.eval(&[t])
    }

    /// Half-width of the (effective) support around the center at the given
    /// mass level. Exact for compact kinds; for Gaussians inverts the tail
    /// integral.
    pub fn support_radius(&self, level: f64) -> f64 {
        assert!(level > 0.0 && level <= 1.0);
        match &self.kind {
            ProfileKind::Gaussian { width, .. } => {
                if level >= 1.0 {
                    f64::INFINITY
                } else {
                    gaussian_half_width(self.dim, level) * width
                }
            }
            ProfileKind::CompactBump { radius, .. } | ProfileKind::Indicator { radius, .. } => {
                *radius
            }
            ProfileKind::Delta { .. } => 0.0,
        }
    }

    /// Support interval for a 1-dim profile at the given level.
    pub fn support_interval(&self, level: f64) -> (f64, f64) {
        assert_eq!(self.dim, 1, "support_interval applies to switching profiles");
        let c = self.center()[0];
        let a = self.support_radius(level);
        (c - a, c + a)
    }

    /// Total L¹ mass `∫ |profile|`.
    pub fn mass(&self) -> f64 {
        match &self.kind {
            ProfileKind::Gaussian { width, amplitude, .. } => {
                amplitude * (2.0 * PI).powf(self.dim as f64 / 2.0) * width.powi(self.dim as i32)
            }
            ProfileKind::CompactBump { radius, .. } => {
                let opts = QuadOpts::with_rel_tol(1e-12);
                match self.dim {
                    1 => {
                        2.0 * radius
                            * quad::integrate_real(
                                |u| (1.0 - 1.0 / (1.0 - u * u)).exp(),
                                0.0,
                                1.0 - 1e-14,
                                &opts,
                            )
                    }
                    d => {
                        let sphere = sphere_area(d);
                        sphere
                            * radius.powi(d as i32)
                            * quad::integrate_real(
                                |u| u.powi(d as i32 - 1) * (1.0 - 1.0 / (1.0 - u * u)).exp(),
                                0.0,
                                1.0 - 1e-14,
                                &opts,
                            )
                    }
                }
            }
            ProfileKind::Indicator { radius, .. } => match self.dim {
                1 => 2.0 * radius,
                d => ball_volume(d) * radius.powi(d as i32),
            },
            ProfileKind::Delta { .. } => 1.0,
        }
    }

    /// Fourier transform with the crate conventions.
    pub fn fourier(&self) -> FourierProfile {
        FourierProfile::new(self)
    }
}

/// Surface area of the unit (d-1)-sphere embedded in d dimensions.
fn sphere_area(d: usize) -> f64 {
    match d {
        1 => 2.0,
        2 => 2.0 * PI,
        3 => 4.0 * PI,
        _ => unreachable!("spatial dimension must be 1, 2 or 3"),
    }
}

fn ball_volume(d: usize) -> f64 {
    match d {
        1 => 2.0,
        2 => PI,
        3 => 4.0 * PI / 3.0,
        _ => unreachable!("spatial dimension must be 1, 2 or 3"),
    }
}

/// Solve for the half-width (in units of the Gaussian width) that encloses
/// `level` of the L¹ mass of a d-dimensional Gaussian.
fn gaussian_half_width(dim: usize, level: f64) -> f64 {
    // 1-dim: erf(a/√2) = level; d-dim radial mass handled by bisection on the
    // radial integral.
    let mass = |a: f64| -> f64 {
        match dim {
            1 => libm::erf(a / std::f64::consts::SQRT_2),
            d => {
                let opts = QuadOpts::with_rel_tol(1e-13);
                let num = quad::integrate_real(
                    |u| u.powi(d as i32 - 1) * (-0.5 * u * u).exp(),
                    0.0,
                    a,
                    &opts,
                );
                let den = quad::integrate_real(
                    |u| u.powi(d as i32 - 1) * (-0.5 * u * u).exp(),
                    0.0,
                    40.0,
                    &opts,
                );
                num / den
            }
        }
    };
    let (mut lo, mut hi) = (0.0f64, 50.0f64);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mass(mid) < level {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Closed-form or interpolated Fourier transform of a profile.
#[derive(Clone)]
pub enum FourierProfile {
    Gaussian { width: f64, center: Vec<f64>, amplitude: f64, dim: usize },
    Indicator { radius: f64, center: Vec<f64>, dim: usize },
    Bump { radial: Arc<ChebFn>, k_max: f64, radius: f64, center: Vec<f64>, dim: usize },
    Delta { center: Vec<f64> },
}

impl FourierProfile {
    fn new(p: &Profile) -> FourierProfile {
        match &p.kind {
            ProfileKind::Gaussian { width, center, amplitude } => FourierProfile::Gaussian {
                width: *width,
                center: center.clone(),
                amplitude: *amplitude,
                dim: p.dim,
            },
            ProfileKind::Indicator { radius, center } => FourierProfile::Indicator {
                radius: *radius,
                center: center.clone(),
                dim: p.dim,
            },
            ProfileKind::Delta { center } => FourierProfile::Delta { center: center.clone() },
            ProfileKind::CompactBump { radius, center } => {
                // cache the radial transform of the centered bump
                let r = *radius;
                let dim = p.dim;
                let k_max = 60.0 / r;
                let opts = QuadOpts::with_rel_tol(1e-12);
                let radial = ChebFn::fit(
                    |k| bump_radial_transform(dim, r, k, &opts),
                    0.0,
                    k_max,
                    1e-12,
                );
                FourierProfile::Bump {
                    radial: Arc::new(radial),
                    k_max,
                    radius: r,
                    center: center.clone(),
                    dim,
                }
            }
        }
    }

    /// Temporal transform `χ̃(ω)` (1-dim profiles only).
    pub fn temporal(&self, omega: f64) -> C64 {
        match self {
            FourierProfile::Gaussian { width, center, amplitude, dim } => {
                assert_eq!(*dim, 1);
                let mag = amplitude * (2.0 * PI).sqrt() * width
                    * (-0.5 * width * width * omega * omega).exp();
                cr(mag) * (IM * omega * center[0]).exp()
            }
            FourierProfile::Indicator { radius, center, dim } => {
                assert_eq!(*dim, 1);
                let mag = if omega.abs() < 1e-12 {
                    2.0 * radius * (1.0 - (radius * omega).powi(2) / 6.0)
                } else {
                    2.0 * (radius * omega).sin() / omega
                };
                cr(mag) * (IM * omega * center[0]).exp()
            }
            FourierProfile::Bump { radial, k_max, center, dim, .. } => {
                assert_eq!(*dim, 1);
                let w = omega.abs();
                let mag = if w <= *k_max { radial.eval(w).re } else { 0.0 };
                cr(mag) * (IM * omega * center[0]).exp()
            }
            FourierProfile::Delta { center } => (IM * omega * center[0]).exp(),
        }
    }

    /// Spatial transform `F̃(k)`; `k` must match the profile dimension.
    pub fn spatial(&self, k: &[f64]) -> C64 {
        let kc = |center: &[f64]| -> f64 { k.iter().zip(center).map(|(a, b)| a * b).sum() };
        let knorm = (k.iter().map(|a| a * a).sum::<f64>()).sqrt();
        match self {
            FourierProfile::Gaussian { width, center, amplitude, dim } => {
                let mag = amplitude
                    * (2.0 * PI).powf(*dim as f64 / 2.0)
                    * width.powi(*dim as i32)
                    * (-0.5 * width * width * knorm * knorm).exp();
                cr(mag) * (-IM * kc(center)).exp()
            }
            FourierProfile::Indicator { radius, center, dim } => {
                cr(indicator_radial_transform(*dim, *radius, knorm))
                    * (-IM * kc(center)).exp()
            }
            FourierProfile::Bump { radial, k_max, center, .. } => {
                let mag = if knorm <= *k_max { radial.eval(knorm).re } else { 0.0 };
                cr(mag) * (-IM * kc(center)).exp()
            }
            FourierProfile::Delta { center } => (-IM * kc(center)).exp(),
        }
    }

    /// Radial part of the spatial transform (isotropic profiles centered at
    /// the origin); the phase from the center is omitted.
    pub fn radial(&self, k: f64) -> f64 {
        match self {
            FourierProfile::Gaussian { width, amplitude, dim, .. } => {
                amplitude
                    * (2.0 * PI).powf(*dim as f64 / 2.0)
                    * width.powi(*dim as i32)
                    * (-0.5 * width * width * k * k).exp()
            }
            FourierProfile::Indicator { radius, dim, .. } => {
                indicator_radial_transform(*dim, *radius, k)
            }
            FourierProfile::Bump { radial, k_max, .. } => {
                if k.abs() <= *k_max {
                    radial.eval(k.abs()).re
                } else {
                    0.0
                }
            }
            FourierProfile::Delta { .. } => 1.0,
        }
    }
}

fn indicator_radial_transform(dim: usize, radius: f64, k: f64) -> f64 {
    let ka = k * radius;
    match dim {
        1 => {
            if ka.abs() < 1e-12 {
                2.0 * radius
            } else {
                2.0 * ka.sin() / k
            }
        }
        2 => {
            // 2π a J₁(ka)/k
            if ka.abs() < 1e-10 {
                PI * radius * radius
            } else {
                2.0 * PI * radius * bessel_j1(ka) / k
            }
        }
        3 => {
            if ka.abs() < 1e-10 {
                4.0 * PI * radius.powi(3) / 3.0
            } else {
                4.0 * PI * (ka.sin() - ka * ka.cos()) / (k * k * k)
            }
        }
        _ => unreachable!(),
    }
}

/// Radial transform of the centered bump by direct quadrature.
fn bump_radial_transform(dim: usize, radius: f64, k: f64, opts: &QuadOpts) -> C64 {
    let bump = |u: f64| (1.0 - 1.0 / (1.0 - u * u)).exp();
    let val = match dim {
        1 => {
            2.0 * radius
                * quad::integrate_real(|u| bump(u) * (k * radius * u).cos(), 0.0, 1.0 - 1e-14, opts)
        }
        2 => {
            2.0 * PI
                * radius
                * radius
                * quad::integrate_real(
                    |u| u * bump(u) * bessel_j0(k * radius * u),
                    0.0,
                    1.0 - 1e-14,
                    opts,
                )
        }
        3 => {
            let kr = k * radius;
            4.0 * PI
                * radius.powi(3)
                * quad::integrate_real(
                    |u| {
                        let x = kr * u;
                        let sinc = if x.abs() < 1e-8 { 1.0 - x * x / 6.0 } else { x.sin() / x };
                        u * u * bump(u) * sinc
                    },
                    0.0,
                    1.0 - 1e-14,
                    opts,
                )
        }
        _ => unreachable!(),
    };
    cr(val)
}

/// J₀ via the integral representation; accurate to ~1e-13 and only used for
/// low-frequency bump/indicator transforms, never in inner loops.
pub(crate) fn bessel_j0(x: f64) -> f64 {
    let opts = QuadOpts::with_rel_tol(1e-13);
    quad::integrate_real(|th| (x * th.sin()).cos(), 0.0, PI, &opts) / PI
}

pub(crate) fn bessel_j1(x: f64) -> f64 {
    let opts = QuadOpts::with_rel_tol(1e-13);
    quad::integrate_real(|th| (th - x * th.sin()).cos(), 0.0, PI, &opts) / PI
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quad::{integrate, QuadOpts};
    use approx::assert_abs_diff_eq;

    #[test]
    fn gaussian_peak_value() {
        let p = Profile::gaussian_time(1.0, 0.0);
        assert_abs_diff_eq!(p.eval1(0.0).unwrap(), 1.0);
    }

    #[test]
    fn indicator_outside_support() {
        let p = Profile::indicator_time(0.0, 1.0);
        assert_abs_diff_eq!(p.eval1(2.0).unwrap(), 0.0);
        assert_abs_diff_eq!(p.eval1(0.5).unwrap(), 1.0);
    }

    #[test]
    fn bump_value_and_smoothness() {
        let p = Profile::bump_space(1, 1.0, vec![0.0]);
        // e · e^{-1/(1-0.25)} at |x| = 0.5
        let expected = (1.0f64 - 1.0 / (1.0 - 0.25)).exp();
        assert_abs_diff_eq!(p.eval(&[0.5]).unwrap(), expected, epsilon = 1e-15);
        // vanishes smoothly toward the edge: strictly decreasing and tiny near r
        let mut last = p.eval(&[0.9]).unwrap();
        for i in 1..=9 {
            let x = 0.9 + 0.01 * i as f64;
            let v = p.eval(&[x]).unwrap();
            assert!(v < last);
            last = v;
        }
        assert!(p.eval(&[0.999]).unwrap() < 1e-200);
        assert_abs_diff_eq!(p.eval(&[1.2]).unwrap(), 0.0);
    }

    #[test]
    fn delta_eval_forbidden() {
        let p = Profile::delta_time(0.0);
        assert!(matches!(p.eval1(0.0), Err(Error::DeltaEvaluation)));
    }

    #[test]
    fn delta_transform_is_unity() {
        let p = Profile::delta_time(0.0).fourier();
        for w in [-3.0, 0.0, 1.7, 42.0] {
            assert_eq!(p.temporal(w), cr(1.0));
        }
    }

    /// Closed-form transforms checked against direct quadrature of the
    /// defining integral at sample frequencies.
    #[test]
    fn transforms_match_quadrature() {
        let opts = QuadOpts::with_rel_tol(1e-12);
        let cases = [
            Profile::gaussian_time(0.8, 0.3),
            Profile::indicator_time(-0.7, 1.1),
            Profile::bump_time(0.9, -0.2),
        ];
        for p in &cases {
            let ft = p.fourier();
            let (lo, hi) = p.support_interval(1.0 - 1e-15);
            let (lo, hi) = if lo.is_finite() { (lo, hi) } else { (-12.0, 12.0) };
            for j in 0..20 {
                let w = -5.0 + 10.0 * j as f64 / 19.0;
                let direct = integrate(
                    |t| cr(p.eval1(t).unwrap()) * (IM * w * t).exp(),
                    lo.max(-15.0),
                    hi.min(15.0),
                    &opts,
                )
                .value;
                assert!(
                    (ft.temporal(w) - direct).norm() < 1e-10,
                    "{w}: {:?} vs {direct:?}",
                    ft.temporal(w)
                );
            }
        }
    }

    #[test]
    fn spatial_transform_matches_quadrature_3d() {
        // isotropic Gaussian in 3d against radial quadrature of the full integral
        let p = Profile::gaussian_space(3, 0.5, vec![0.0; 3]);
        let ft = p.fourier();
        let opts = QuadOpts::with_rel_tol(1e-12);
        for k in [0.3, 1.0, 2.5] {
            // ∫d³x F e^{-ikx} = 4π/k ∫ r F(r) sin(kr) dr
            let direct = 4.0 * PI / k
                * quad::integrate_real(
                    |r| r * p.eval(&[r, 0.0, 0.0]).unwrap() * (k * r).sin(),
                    0.0,
                    8.0,
                    &opts,
                );
            assert_abs_diff_eq!(ft.spatial(&[0.0, 0.0, k]).re, direct, epsilon = 1e-9);
        }
    }

    /// Plancherel: ∫|χ|² dt = (1/2π)∫|χ̃|² dω for the closed-form transforms.
    #[test]
    fn plancherel_identity() {
        let opts = QuadOpts::with_rel_tol(1e-11);
        // Gaussian: transform decays fast, plain truncation suffices
        {
            let p = Profile::gaussian_time(0.6, 0.1);
            let ft = p.fourier();
            let time_side = quad::integrate_real(|t| p.eval1(t).unwrap().powi(2), -10.0, 10.0, &opts);
            let w_max = 60.0 / 0.6;
            let freq_side = quad::integrate_real(
                |w| ft.temporal(w).norm_sqr(),
                -w_max,
                w_max,
                &QuadOpts { rel_tol: 1e-11, abs_tol: 1e-15, max_panels: 40000 },
            ) / (2.0 * PI);
            assert!(
                ((time_side - freq_side) / time_side).abs() < 1e-8,
                "plancherel failed: {time_side} vs {freq_side}"
            );
        }
        // Indicator: |χ̃|² = 4 sin²(aω)/ω² decays like 1/ω²; append the
        // analytic tail ∫_W^∞ = 1/(2W)·4 + sin(2aW)/(aW²) + O(W⁻³) per side
        {
            let a = 0.65;
            let p = Profile::indicator_time(-a, a);
            let ft = p.fourier();
            let time_side = 2.0 * a;
            let w_max = 4000.0;
            let body = quad::integrate_real(
                |w| ft.temporal(w).norm_sqr(),
                -w_max,
                w_max,
                &QuadOpts { rel_tol: 1e-10, abs_tol: 1e-14, max_panels: 120_000 },
            );
            let tail = 2.0 * (4.0 * 0.5 / w_max + (2.0 * a * w_max).sin() / (a * w_max * w_max));
            let freq_side = (body + tail) / (2.0 * PI);
            assert!(
                ((time_side - freq_side) / time_side).abs() < 1e-8,
                "plancherel failed: {time_side} vs {freq_side}"
            );
        }
    }

    /// χ real ⇒ χ̃(−ω) = conj(χ̃(ω)).
    #[test]
    fn reality_symmetry() {
        let profiles = [
            Profile::gaussian_time(1.3, -0.4),
            Profile::indicator_time(0.2, 2.0),
            Profile::bump_time(0.7, 0.5),
        ];
        for p in &profiles {
            let ft = p.fourier();
            for j in 0..50 {
                let w = -8.0 + 16.0 * (j as f64 + 0.31) / 50.0;
                let a = ft.temporal(-w);
                let b = ft.temporal(w).conj();
                assert!((a - b).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn gaussian_support_tail_inversion() {
        // Numeric oracle: find a such that ∫_{c-a}^{c+a} χ = level · mass
        let p = Profile::gaussian_time(1.0, 0.0);
        let level = DEFAULT_SUPPORT_LEVEL;
        let opts = QuadOpts::with_rel_tol(1e-13);
        let mass = p.mass();
        let frac = |a: f64| {
            quad::integrate_real(|t| p.eval1(t).unwrap(), -a, a, &opts) / mass
        };
        let (mut lo, mut hi) = (1.0, 10.0);
        for _ in 0..80 {
            let mid = 0.5 * (lo + hi);
            if frac(mid) < level {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let oracle = 0.5 * (lo + hi);
        assert_abs_diff_eq!(p.support_radius(level), oracle, epsilon = 1e-6);
        // the scale is the √(2 ln 1e8) one, up to the erf normalization
        let scale = (2.0 * (1e8f64).ln()).sqrt();
        assert!((oracle - scale).abs() < 0.1 * scale, "oracle {oracle} vs scale {scale}");
    }

    #[test]
    fn masses() {
        assert_abs_diff_eq!(Profile::gaussian_time(2.0, 0.0).mass(), (2.0 * PI).sqrt() * 2.0);
        assert_abs_diff_eq!(Profile::indicator_time(0.0, 3.0).mass(), 3.0);
        assert_abs_diff_eq!(Profile::delta_time(1.0).mass(), 1.0);
    }
}
